//! Parameter schedules realizing large families of order `(s, t)`, `t > 4s`.
//!
//! For index `m` the family uses rank `r_m ~ m^s`, polarization `L = a_m L0`
//! and first Chern class `c1 = b_m L0` with `r_m a_m - b_m = c` held fixed.
//! With `c` fixed the `h0` term of the existence bound is constant, and the
//! minimal admissible discriminant is
//!
//! `Delta_m = 8 r (r-1)^3 a^2 e + 2 r (r-1) (1 + M) - (r-1) c^2 e`,
//!
//! so `Delta_m ~ m^(4s) a_m^2`. Reaching order `t` therefore takes
//! `a_m ~ m^((t - 4s) / 2)`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{ln_int, round_half_up_pow, RatDisplay};
use crate::existence_bounds::{discriminant, li_qin_alpha, BoundsError, ChernShape};
use crate::fit::least_squares;
use crate::surface_lattice::SurfaceInvariants;

/// Default value of `r a - b`.
pub const DEFAULT_TWIST: i64 = 3;
pub const DEFAULT_TOL_SLOPE: f64 = 0.1;
pub const DEFAULT_TOL_RATIO: f64 = 3.0;
pub const DEFAULT_M_RANGE: (u64, u64) = (10, 200);

const MAX_EXPONENT: i64 = 16;
const MAX_EXPONENT_DENOM: i64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("t <= 4s: large families of order (s,t) require t > 4s (got s = {s}, t = {t})")]
    OrderTooLow { s: String, t: String },
    #[error("exponent s must be positive")]
    NonPositiveRankExponent,
    #[error("exponent {0} is outside the supported range (0, {MAX_EXPONENT}] with denominator <= {MAX_EXPONENT_DENOM}")]
    ExponentUnsupported(String),
    #[error("twist c = r a - b must be at least 1, got {0}")]
    Twist(i64),
    #[error("index range must satisfy 2 <= m_min < m_max, got [{0}, {1}]")]
    Range(u64, u64),
    #[error("slope precondition r L^2 > K.L fails at m = {m} (r = {r}, a = {a}); raise the discriminant exponent or c")]
    Precondition { m: u64, r: u64, a: u64 },
    #[error("parameters overflow machine integers at m = {0}")]
    Overflow(u64),
    #[error("rank must be at least 2 for the leading-term ratio")]
    Rank,
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Exponents and index range of a family. `x = t - 4s` is stored implicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyParams {
    pub s: BigRational,
    pub t: BigRational,
    pub c: i64,
    pub m_min: u64,
    pub m_max: u64,
}

impl FamilyParams {
    pub fn new(s: BigRational, t: BigRational, c: i64, m_min: u64, m_max: u64) -> Result<Self, FamilyError> {
        if !s.is_positive() {
            return Err(FamilyError::NonPositiveRankExponent);
        }
        let four_s = &s * BigRational::from_integer(4.into());
        if t <= four_s {
            return Err(FamilyError::OrderTooLow {
                s: RatDisplay(&s).to_string(),
                t: RatDisplay(&t).to_string(),
            });
        }
        let params = FamilyParams { s, t, c, m_min, m_max };
        for exp in [&params.s, &params.excess()] {
            let bounded = exp.denom() <= &BigInt::from(MAX_EXPONENT_DENOM)
                && exp <= &BigRational::from_integer(MAX_EXPONENT.into());
            if !bounded {
                return Err(FamilyError::ExponentUnsupported(RatDisplay(exp).to_string()));
            }
        }
        if c < 1 {
            return Err(FamilyError::Twist(c));
        }
        if m_min < 2 || m_max <= m_min {
            return Err(FamilyError::Range(m_min, m_max));
        }
        Ok(params)
    }

    /// `x = t - 4s`, the discriminant growth beyond the rank contribution.
    pub fn excess(&self) -> BigRational {
        &self.t - &self.s * BigRational::from_integer(4.into())
    }

    /// Exponent of `a_m`, namely `x / 2`.
    pub fn polarization_exponent(&self) -> BigRational {
        self.excess() / BigRational::from_integer(2.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    pub m: u64,
    pub r: u64,
    pub a: u64,
    pub b: i64,
    pub c2: BigInt,
    pub delta: BigInt,
    pub alpha_ceiling: BigInt,
    pub precondition_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySchedule {
    pub params: FamilyParams,
    pub surface: SurfaceInvariants,
    pub members: Vec<FamilyMember>,
}

/// The member with rank `r`, multiple `a` and `b = r a - c`, at minimal `c2`.
///
/// Unlike [`make_schedule`] this does not insist on the slope precondition;
/// the flag is recorded in the member.
pub fn member_for(inv: &SurfaceInvariants, m: u64, r: u64, a: u64, c: i64) -> Result<FamilyMember, FamilyError> {
    let b = (r as i128)
        .checked_mul(a as i128)
        .map(|ra| ra - c as i128)
        .and_then(|b| i64::try_from(b).ok())
        .ok_or(FamilyError::Overflow(m))?;
    let shape = ChernShape::new(r, a, b)?;
    let report = li_qin_alpha(inv, &shape)?;
    let delta = discriminant(r, &shape.c1_sq(inv), &report.alpha_ceiling);
    Ok(FamilyMember {
        m,
        r,
        a,
        b,
        c2: report.alpha_ceiling.clone(),
        delta,
        alpha_ceiling: report.alpha_ceiling,
        precondition_ok: report.precondition_ok,
    })
}

/// Builds the schedule `r_m = max(2, round(m^s))`, `a_m = max(1, round(m^(x/2)))`,
/// `b_m = r_m a_m - c`, `c2 = ceil(alpha)` for every `m` in range.
pub fn make_schedule(inv: &SurfaceInvariants, params: &FamilyParams) -> Result<FamilySchedule, FamilyError> {
    inv.ensure_valid().map_err(BoundsError::from)?;
    let a_exp = params.polarization_exponent();
    let indices: Vec<u64> = (params.m_min..=params.m_max).collect();

    let mut ranks = Vec::with_capacity(indices.len());
    let mut running = 2u64;
    for &m in &indices {
        let r = round_half_up_pow(m, &params.s).to_u64().ok_or(FamilyError::Overflow(m))?;
        running = running.max(r);
        ranks.push(running);
    }

    let members = indices
        .par_iter()
        .zip(ranks.par_iter())
        .map(|(&m, &r)| {
            let a = round_half_up_pow(m, &a_exp)
                .to_u64()
                .ok_or(FamilyError::Overflow(m))?
                .max(1);
            let member = member_for(inv, m, r, a, params.c)?;
            if !member.precondition_ok {
                return Err(FamilyError::Precondition { m, r, a });
            }
            Ok(member)
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(FamilySchedule {
        params: params.clone(),
        surface: inv.clone(),
        members,
    })
}

/// Exact `Delta / (8 r (r-1)^3 a^2 e)`.
pub fn leading_term_ratio(inv: &SurfaceInvariants, member: &FamilyMember) -> Result<BigRational, FamilyError> {
    if member.r < 2 {
        return Err(FamilyError::Rank);
    }
    let r = BigInt::from(member.r);
    let r1 = &r - 1;
    let lead = BigInt::from(8) * &r * &r1 * &r1 * &r1 * member.a * member.a * inv.e;
    Ok(BigRational::new(member.delta.clone(), lead))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderError {
    #[error("need at least 10 points, got {0}")]
    TooFewPoints(usize),
    #[error("index range must span a factor of at least 5 (got {0}..{1})")]
    NarrowRange(u64, u64),
    #[error("value at m = {0} is not positive")]
    NonPositive(u64),
    #[error("index m must be positive")]
    ZeroIndex,
}

/// Verdict of [`verify_order`]: `accepted` iff the fitted slope is within
/// `tol_slope` of `t` and `max(v/m^t) / min(v/m^t) <= tol_ratio`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderVerdict {
    pub accepted: bool,
    pub slope: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`, computed in log space.
    pub spread: f64,
}

/// Two-sided check that `v_m = Theta(m^t)` on the sampled range.
pub fn verify_order(seq: &[(u64, BigInt)], t: f64, tol_slope: f64, tol_ratio: f64) -> Result<OrderVerdict, OrderError> {
    if seq.len() < 10 {
        return Err(OrderError::TooFewPoints(seq.len()));
    }
    let mut points = Vec::with_capacity(seq.len());
    for (m, v) in seq {
        if *m == 0 {
            return Err(OrderError::ZeroIndex);
        }
        if !v.is_positive() {
            return Err(OrderError::NonPositive(*m));
        }
        points.push(((*m as f64).ln(), ln_int(v)));
    }
    let lo = seq.iter().map(|p| p.0).min().unwrap_or(0);
    let hi = seq.iter().map(|p| p.0).max().unwrap_or(0);
    if hi < lo.saturating_mul(5) {
        return Err(OrderError::NarrowRange(lo, hi));
    }
    let (slope, _) = least_squares(&points).ok_or(OrderError::NarrowRange(lo, hi))?;
    let log_ratios = points.iter().map(|(lm, lv)| lv - t * lm);
    let (min_log, max_log) = log_ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    let spread = (max_log - min_log).exp();
    Ok(OrderVerdict {
        accepted: (slope - t).abs() <= tol_slope && spread <= tol_ratio,
        slope,
        min_ratio: min_log.exp(),
        max_ratio: max_log.exp(),
        spread,
    })
}

impl FamilySchedule {
    pub fn ranks(&self) -> Vec<(u64, BigInt)> {
        self.members.iter().map(|m| (m.m, BigInt::from(m.r))).collect()
    }

    pub fn discriminants(&self) -> Vec<(u64, BigInt)> {
        self.members.iter().map(|m| (m.m, m.delta.clone())).collect()
    }

    pub fn rows(&self) -> Vec<ScheduleRow> {
        self.members
            .iter()
            .map(|m| ScheduleRow {
                m: m.m,
                r: m.r,
                a: m.a,
                b: m.b,
                c2: m.c2.to_string(),
                delta: m.delta.to_string(),
            })
            .collect()
    }

    /// Tab-separated table with header `m r a b c2 delta`.
    pub fn to_table(&self) -> String {
        write_table(&self.rows())
    }
}

/// One line of the schedule table. Large integers are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub m: u64,
    pub r: u64,
    pub a: u64,
    pub b: i64,
    pub c2: String,
    pub delta: String,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("schedule table: {0}")]
    Csv(#[from] csv::Error),
    #[error("schedule table header must be m, r, a, b, c2, delta")]
    Header,
    #[error("schedule table row {row}: {field} is not a decimal integer")]
    Integer { row: usize, field: &'static str },
}

const TABLE_HEADER: [&str; 6] = ["m", "r", "a", "b", "c2", "delta"];

pub fn write_table(rows: &[ScheduleRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{}", TABLE_HEADER.join("\t")).unwrap();
    for row in rows {
        writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", row.m, row.r, row.a, row.b, row.c2, row.delta).unwrap();
    }
    out
}

pub fn parse_table(text: &str) -> Result<Vec<ScheduleRow>, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .from_reader(text.as_bytes());
    if reader.headers()?.iter().ne(TABLE_HEADER) {
        return Err(TableError::Header);
    }
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<ScheduleRow>().enumerate() {
        let row = record?;
        for (field, value) in [("c2", &row.c2), ("delta", &row.delta)] {
            if value.parse::<BigInt>().is_err() {
                return Err(TableError::Integer { row: i + 1, field });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

impl ScheduleRow {
    pub fn delta_int(&self) -> BigInt {
        self.delta.parse().unwrap_or_else(|_| BigInt::zero())
    }
}
