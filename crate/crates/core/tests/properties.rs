use bogomolov::cayley_bacharach::{cb_oracle, satisfies_cb, CbQuery, ZeroCycle};
use bogomolov::existence_bounds::{alpha_leading_ratio, ChernShape};
use bogomolov::large_families::{leading_term_ratio, make_schedule, member_for, verify_order, FamilyParams};
use bogomolov::sbi_falsifier::{audit_certificate, falsify, SbiQuery};
use bogomolov::surface_lattice::h0_adjoint_twist;
use bogomolov::Catalog;
use num_rational::BigRational;
use num_traits::Signed;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn h0_eventually_monotone_on_catalog() {
    for inv in Catalog::builtin().surfaces {
        let start = 1.max((-inv.k + inv.e - 1) / inv.e);
        let values: Vec<_> = (start..=50).map(|n| h0_adjoint_twist(&inv, n).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]), "{}", inv.label());
    }
}

#[test]
fn alpha_leading_term_on_catalog() {
    let (lo, hi) = (q(9, 10), q(11, 10));
    for inv in Catalog::builtin().surfaces {
        for (r, a) in [(100u64, 10u64), (150, 12), (400, 25)] {
            for c in 1..=3 {
                let b = (r * a) as i64 - c;
                let alpha = alpha_leading_ratio(&inv, &ChernShape::new(r, a, b).unwrap()).unwrap();
                assert!(alpha >= lo && alpha <= hi, "{} r={r} a={a} c={c}: {alpha}", inv.label());
                let delta = leading_term_ratio(&inv, &member_for(&inv, 0, r, a, c).unwrap()).unwrap();
                assert!(delta >= lo && delta <= hi, "{} r={r} a={a} c={c}: {delta}", inv.label());
            }
        }
    }
}

#[test]
fn rank_and_discriminant_orders_on_catalog() {
    for (s, t) in [(q(1, 1), q(5, 1)), (q(1, 1), q(6, 1)), (q(3, 2), q(7, 1))] {
        let params = FamilyParams::new(s.clone(), t.clone(), 3, 10, 200).unwrap();
        let (s_f, t_f) = (
            num_traits::ToPrimitive::to_f64(&s).unwrap(),
            num_traits::ToPrimitive::to_f64(&t).unwrap(),
        );
        for inv in Catalog::builtin().surfaces {
            let sched = make_schedule(&inv, &params).unwrap();
            assert!(sched.members.iter().all(|m| m.delta.is_positive()));
            let ranks = verify_order(&sched.ranks(), s_f, 0.1, 3.0).unwrap();
            assert!(ranks.accepted, "{} s={s}: {ranks:?}", inv.label());
            let deltas = verify_order(&sched.discriminants(), t_f, 0.1, 3.0).unwrap();
            assert!(deltas.accepted, "{} t={t}: {deltas:?}", inv.label());
        }
    }
}

#[test]
fn certificates_verify_on_catalog() {
    for l in [q(9, 2), q(5, 1), q(11, 2), q(6, 1), q(13, 2), q(7, 1)] {
        for inv in Catalog::builtin().surfaces {
            let query = SbiQuery {
                l: l.clone(),
                sigmas: vec![q(1, 1), q(1, 100)],
                surface: inv.clone(),
            };
            let cert = falsify(&query, 10, 200, 3).unwrap();
            assert_eq!(audit_certificate(&cert), Vec::<String>::new(), "{} l={l}", inv.label());
            assert!(cert.tail().len() >= 2, "{} l={l}", inv.label());
        }
    }
}

#[test]
fn decay_slope_tracks_exponent_gap() {
    // l = 9/2 is excluded: a_m = round(m^(1/8)) only takes the values 1 and 2
    // on [10, 200], which is too coarse for the fit.
    for l in [q(5, 1), q(11, 2), q(6, 1), q(13, 2), q(7, 1)] {
        let predicted = -num_traits::ToPrimitive::to_f64(&((&l - q(4, 1)) / q(2, 1))).unwrap();
        for inv in Catalog::builtin().surfaces {
            let query = SbiQuery {
                l: l.clone(),
                sigmas: vec![q(1, 1)],
                surface: inv.clone(),
            };
            let slope = falsify(&query, 10, 200, 3).unwrap().decay_slope_value().unwrap();
            assert!((slope - predicted).abs() <= 0.15, "{} l={l}: {slope} vs {predicted}", inv.label());
        }
    }
}

#[test]
fn sbi_four_is_refused() {
    let query = SbiQuery {
        l: q(4, 1),
        sigmas: vec![q(1, 1)],
        surface: Catalog::builtin().get("quartic-k3").unwrap().clone(),
    };
    assert!(falsify(&query, 10, 200, 3).is_err());
}

#[test]
fn complete_intersection_grids() {
    for k in [2i64, 3] {
        let query = CbQuery::new(ZeroCycle::grid(k), 2 * k - 3);
        assert!(satisfies_cb(&query));
        assert!(cb_oracle(&query).unwrap());
    }
}
