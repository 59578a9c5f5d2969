//! Cayley-Bacharach checks for reduced 0-cycles in the projective plane.
//!
//! A Serre extension `0 -> O(L') -> E -> O(L) (x) I_Z -> 0` can be chosen
//! locally free iff `Z` has the Cayley-Bacharach property for
//! `|L - L' + K|`: every member through all but one point of `Z` also
//! contains the last one. On `P^2` with `K = -3H` that system is the space of
//! degree-`d` forms, so the check is exact linear algebra on monomial
//! evaluations.

pub mod linalg;
mod points;

use num_rational::BigRational;
use num_traits::Zero;

pub use points::{parse_cycle, CycleError, ProjectivePoint, ZeroCycle};

/// Point-count bound for [`cb_oracle`].
pub const ORACLE_MAX_POINTS: usize = 12;
/// Degree bound for [`cb_oracle`].
pub const ORACLE_MAX_DEGREE: i64 = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CbError {
    #[error("oracle is limited to {ORACLE_MAX_POINTS} points and degree {ORACLE_MAX_DEGREE}; got {points} points, degree {degree}")]
    OracleBounds { points: usize, degree: i64 },
    #[error("{cycles} cycles but {degrees} line bundle degrees")]
    LengthMismatch { cycles: usize, degrees: usize },
    #[error("a direct sum needs at least one summand")]
    EmptySum,
}

/// `Z` together with the degree `d` of the linear system `|O(d)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbQuery {
    pub cycle: ZeroCycle,
    pub d: i64,
}

impl CbQuery {
    pub fn new(cycle: ZeroCycle, d: i64) -> Self {
        CbQuery { cycle, d }
    }
}

/// Exponent triples `(i, j, k)` with `i + j + k = d`, in lexicographic order.
pub fn monomials(d: u32) -> Vec<[u32; 3]> {
    (0..=d)
        .rev()
        .flat_map(|i| (0..=d - i).rev().map(move |j| [i, j, d - i - j]))
        .collect()
}

fn power(base: &BigRational, exp: u32) -> BigRational {
    num_traits::pow(base.clone(), exp as usize)
}

/// Row `p` holds the degree-`d` monomials evaluated at the coordinate triple `p`.
/// Coordinates are taken as given, without normalization.
pub fn evaluation_matrix(points: &[[BigRational; 3]], d: u32) -> Vec<Vec<BigRational>> {
    let monos = monomials(d);
    points
        .iter()
        .map(|[x, y, z]| {
            monos
                .iter()
                .map(|&[i, j, k]| power(x, i) * power(y, j) * power(z, k))
                .collect()
        })
        .collect()
}

fn cycle_matrix(cycle: &ZeroCycle, d: u32) -> Vec<Vec<BigRational>> {
    let coords: Vec<_> = cycle.points().iter().map(|p| p.coords().clone()).collect();
    evaluation_matrix(&coords, d)
}

fn space_dim(d: u32) -> usize {
    let d = d as usize;
    (d + 1) * (d + 2) / 2
}

/// `h0(I_Z(d))`, the dimension of degree-`d` forms vanishing on `Z`.
pub fn vanishing_dim(cycle: &ZeroCycle, d: i64) -> usize {
    let Ok(d) = u32::try_from(d) else {
        return 0;
    };
    space_dim(d) - linalg::rank(&cycle_matrix(cycle, d))
}

/// Points `p` of `Z` admitting a degree-`d` form through `Z \ {p}` but not `p`.
pub fn cb_failures(query: &CbQuery) -> Vec<ProjectivePoint> {
    if query.d < 0 {
        return Vec::new();
    }
    let full = vanishing_dim(&query.cycle, query.d);
    (0..query.cycle.len())
        .filter(|&i| vanishing_dim(&query.cycle.without(i), query.d) != full)
        .map(|i| query.cycle.points()[i].clone())
        .collect()
}

/// Cayley-Bacharach property of `Z` for `|O(d)|`, by comparing
/// `h0(I_{Z \ p}(d))` with `h0(I_Z(d))`. Vacuously true for `d < 0`.
pub fn satisfies_cb(query: &CbQuery) -> bool {
    if query.d < 0 {
        return true;
    }
    let full = vanishing_dim(&query.cycle, query.d);
    (0..query.cycle.len()).all(|i| vanishing_dim(&query.cycle.without(i), query.d) == full)
}

/// Same answer as [`satisfies_cb`], computed by evaluating an explicit kernel
/// basis of the forms through `Z \ {p}` at `p`.
pub fn cb_oracle(query: &CbQuery) -> Result<bool, CbError> {
    if query.cycle.len() > ORACLE_MAX_POINTS || query.d > ORACLE_MAX_DEGREE {
        return Err(CbError::OracleBounds {
            points: query.cycle.len(),
            degree: query.d,
        });
    }
    if query.d < 0 {
        return Ok(true);
    }
    let d = query.d as u32;
    let monos = monomials(d);
    for (i, p) in query.cycle.points().iter().enumerate() {
        let rest = cycle_matrix(&query.cycle.without(i), d);
        let kernel = linalg::nullspace_basis(&rest, monos.len());
        let [x, y, z] = p.coords();
        for form in &kernel {
            let value: BigRational = form
                .iter()
                .zip(&monos)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, &[a, b, e])| c * power(x, a) * power(y, b) * power(z, e))
                .sum();
            if !value.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Degree of `|L_i - L' + K|` on `P^2` for `L_i = l_i H`, `L' = l' H`.
pub fn serre_degree(l_i: i64, l_prime: i64) -> i64 {
    l_i - l_prime - 3
}

/// Locally free extensions of `(+)_i O(l_i) (x) I_{Z_i}` by `O(l')` exist iff
/// every `Z_i` is Cayley-Bacharach for `|O(l_i - l' - 3)|`.
pub fn cb_for_direct_sum(cycles: &[ZeroCycle], l_list: &[i64], l_prime: i64) -> Result<bool, CbError> {
    if cycles.len() != l_list.len() {
        return Err(CbError::LengthMismatch {
            cycles: cycles.len(),
            degrees: l_list.len(),
        });
    }
    if cycles.is_empty() {
        return Err(CbError::EmptySum);
    }
    Ok(cycles.iter().zip(l_list).all(|(z, &l)| {
        satisfies_cb(&CbQuery::new(z.clone(), serre_degree(l, l_prime)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single() -> ZeroCycle {
        ZeroCycle::new(vec![ProjectivePoint::affine(0, 0)]).unwrap()
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(0), vec![[0, 0, 0]]);
        assert_eq!(monomials(1), vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        for d in 0..8 {
            assert_eq!(monomials(d).len(), space_dim(d));
        }
    }

    #[test]
    fn vanishing_dim_examples() {
        assert_eq!(vanishing_dim(&ZeroCycle::empty(), 3), 10);
        let origin = ZeroCycle::new(vec![ProjectivePoint::from_ints(0, 0, 1).unwrap()]).unwrap();
        assert_eq!(vanishing_dim(&origin, 1), 2);
        assert_eq!(vanishing_dim(&ZeroCycle::grid(3), 3), 2);
        assert_eq!(vanishing_dim(&ZeroCycle::grid(3), -1), 0);
    }

    #[test]
    fn cb_examples() {
        assert!(!satisfies_cb(&CbQuery::new(single(), 0)));
        assert!(satisfies_cb(&CbQuery::new(ZeroCycle::grid(3), -1)));
        assert!(satisfies_cb(&CbQuery::new(ZeroCycle::grid(3), 3)));
        assert!(!satisfies_cb(&CbQuery::new(ZeroCycle::grid(3).without(4), 3)));
        for q in [
            CbQuery::new(single(), 0),
            CbQuery::new(ZeroCycle::grid(3), -1),
            CbQuery::new(ZeroCycle::grid(3), 3),
            CbQuery::new(ZeroCycle::grid(3).without(4), 3),
        ] {
            assert_eq!(cb_oracle(&q).unwrap(), satisfies_cb(&q));
        }
    }

    #[test]
    fn failures_name_the_obstructed_points() {
        let eight = ZeroCycle::grid(3).without(0);
        let bad = cb_failures(&CbQuery::new(eight.clone(), 3));
        assert!(!bad.is_empty());
        assert!(cb_failures(&CbQuery::new(ZeroCycle::grid(3), 3)).is_empty());
    }

    #[test]
    fn oracle_bounds() {
        assert!(matches!(
            cb_oracle(&CbQuery::new(ZeroCycle::grid(4), 2)),
            Err(CbError::OracleBounds { points: 16, .. })
        ));
        assert!(cb_oracle(&CbQuery::new(ZeroCycle::grid(2), 6)).is_err());
    }

    #[test]
    fn serre_degrees() {
        assert_eq!(serre_degree(6, 0), 3);
        assert_eq!(serre_degree(3, 0), 0);
        assert_eq!(serre_degree(1, 0), -2);
    }

    #[test]
    fn direct_sums() {
        let grid = ZeroCycle::grid(3);
        assert!(cb_for_direct_sum(std::slice::from_ref(&grid), &[6], 0).unwrap());
        assert!(!cb_for_direct_sum(&[grid.clone(), single()], &[6, 6], 0).unwrap());
        assert!(cb_for_direct_sum(&[single()], &[1], 0).unwrap());
        assert_eq!(
            cb_for_direct_sum(&[grid], &[6, 6], 0),
            Err(CbError::LengthMismatch { cycles: 1, degrees: 2 })
        );
        assert_eq!(cb_for_direct_sum(&[], &[], 0), Err(CbError::EmptySum));
    }

    fn arb_cycle(max: usize) -> impl Strategy<Value = ZeroCycle> {
        proptest::collection::btree_set((-3i64..=3, -3i64..=3, -3i64..=3), 0..=max).prop_map(|set| {
            let mut pts: Vec<ProjectivePoint> = set
                .into_iter()
                .filter_map(|(x, y, z)| ProjectivePoint::from_ints(x, y, z).ok())
                .collect();
            pts.sort();
            pts.dedup();
            ZeroCycle::new(pts).unwrap()
        })
    }

    proptest! {
        #[test]
        fn vacuity_when_subcycles_impose_everything(cycle in arb_cycle(8), d in 0i64..=3) {
            let all_zero = (0..cycle.len()).all(|i| vanishing_dim(&cycle.without(i), d) == 0);
            if all_zero {
                prop_assert!(satisfies_cb(&CbQuery::new(cycle, d)));
            }
        }

        #[test]
        fn rank_ignores_rescaling(cycle in arb_cycle(6), d in 0u32..=4,
                                  scales in proptest::collection::vec((1i64..=7, 1i64..=5, proptest::bool::ANY), 6)) {
            let raw: Vec<[BigRational; 3]> = cycle.points().iter().zip(&scales).map(|(p, &(n, den, neg))| {
                let mut lambda = BigRational::new(n.into(), den.into());
                if neg { lambda = -lambda; }
                let [x, y, z] = p.coords();
                [x * &lambda, y * &lambda, z * &lambda]
            }).collect();
            let normalized: Vec<_> = cycle.points().iter().map(|p| p.coords().clone()).collect();
            prop_assert_eq!(
                linalg::rank(&evaluation_matrix(&raw, d)),
                linalg::rank(&evaluation_matrix(&normalized, d))
            );
            let renormalized = ZeroCycle::new(raw.into_iter().map(|[x, y, z]| ProjectivePoint::new(x, y, z).unwrap()).collect()).unwrap();
            prop_assert_eq!(satisfies_cb(&CbQuery::new(renormalized, d as i64)), satisfies_cb(&CbQuery::new(cycle, d as i64)));
        }
    }
}
