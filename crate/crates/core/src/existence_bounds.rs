//! Discriminant, the Li-Qin existence bound for stable bundles built by the
//! Serre construction, and the Douglas-Reinbacher-Yau defect.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::ceil_int;
use crate::surface_lattice::{h0_adjoint_twist, SurfaceError, SurfaceInvariants};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("rank must be at least {min}, got {rank}")]
    Rank { rank: u64, min: u64 },
    #[error("polarization multiple a must be at least 1")]
    Multiple,
    #[error("r*a - b = {0} must be at least 1 (the adjoint twist must be ample)")]
    TwistNotAmple(i128),
    #[error("surface has no topological Euler number; needed for the DRY defect")]
    MissingEuler,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Rank and first Chern class `c1 = b L0` of a candidate bundle, with the
/// polarization `L = a L0` used to check stability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernShape {
    pub rank: u64,
    pub a: u64,
    pub b: i64,
}

/// A [`ChernShape`] completed by a second Chern number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChernData {
    pub shape: ChernShape,
    pub c2: BigInt,
}

impl ChernShape {
    pub fn new(rank: u64, a: u64, b: i64) -> Result<Self, BoundsError> {
        let shape = ChernShape { rank, a, b };
        shape.check()?;
        Ok(shape)
    }

    fn check(&self) -> Result<(), BoundsError> {
        if self.rank < 2 {
            return Err(BoundsError::Rank {
                rank: self.rank,
                min: 2,
            });
        }
        if self.a < 1 {
            return Err(BoundsError::Multiple);
        }
        let c = self.twist();
        if c < 1 {
            return Err(BoundsError::TwistNotAmple(c));
        }
        Ok(())
    }

    /// `c = r a - b`, so that `rL - c1 = c L0`.
    pub fn twist(&self) -> i128 {
        self.rank as i128 * self.a as i128 - self.b as i128
    }

    /// `c1^2 = b^2 e`.
    pub fn c1_sq(&self, inv: &SurfaceInvariants) -> BigInt {
        let b = BigInt::from(self.b);
        &b * &b * inv.e
    }
}

impl ChernData {
    pub fn discriminant(&self, inv: &SurfaceInvariants) -> BigInt {
        discriminant(self.shape.rank, &self.shape.c1_sq(inv), &self.c2)
    }
}

/// Output of [`li_qin_alpha`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub alpha: BigRational,
    /// Least integer `c2 >= alpha`.
    pub alpha_ceiling: BigInt,
    /// `r L^2 > K . L`.
    pub precondition_ok: bool,
    /// `max(pg, h0(O(rL - c1 + K)))`.
    pub max_term: BigInt,
}

/// `Delta = 2 r c2 - (r - 1) c1^2`.
pub fn discriminant(rank: u64, c1_sq: &BigInt, c2: &BigInt) -> BigInt {
    assert!(rank >= 1, "rank must be positive");
    let r = BigInt::from(rank);
    BigInt::from(2) * &r * c2 - (r - 1) * c1_sq
}

/// `r L^2 > K . L` with `L = a L0`, i.e. `r a e > k`.
pub fn slope_precondition(inv: &SurfaceInvariants, rank: u64, a: u64) -> bool {
    BigInt::from(rank) * a * inv.e > BigInt::from(inv.k)
}

/// Existence bound `alpha`: every `c2 >= alpha` is the second Chern number of
/// an `L`-stable rank-`r` bundle with `c1 = b L0`, provided the slope
/// precondition holds.
///
/// With `c = r a - b` and `M = max(pg, h0(c L0 + K))`:
///
/// `alpha = (r-1) [1 + M + 4 (r-1)^2 a^2 e] + (r-1) a b e - r(r-1)/2 a^2 e`.
///
/// The precondition is reported, not enforced.
pub fn li_qin_alpha(inv: &SurfaceInvariants, shape: &ChernShape) -> Result<BoundReport, BoundsError> {
    inv.ensure_valid()?;
    shape.check()?;
    let c = i64::try_from(shape.twist()).map_err(|_| BoundsError::TwistNotAmple(shape.twist()))?;
    let h0 = h0_adjoint_twist(inv, c)?;
    let max_term = h0.max(BigInt::from(inv.pg));

    let r = BigInt::from(shape.rank);
    let r1 = &r - 1;
    let a = BigInt::from(shape.a);
    let e = BigInt::from(inv.e);
    let l_sq = &a * &a * &e;
    let c1_dot_l = &a * shape.b * &e;

    let bracket = BigInt::one() + &max_term + BigInt::from(4) * &r1 * &r1 * &l_sq;
    let twice = BigInt::from(2) * (&r1 * bracket + &r1 * c1_dot_l) - &r * &r1 * l_sq;
    let alpha = BigRational::new(twice, BigInt::from(2));
    Ok(BoundReport {
        alpha_ceiling: ceil_int(&alpha),
        alpha,
        precondition_ok: slope_precondition(inv, shape.rank, shape.a),
        max_term,
    })
}

/// Least admissible second Chern number, `ceil(alpha)`.
pub fn min_c2(inv: &SurfaceInvariants, shape: &ChernShape) -> Result<BigInt, BoundsError> {
    Ok(li_qin_alpha(inv, shape)?.alpha_ceiling)
}

/// `2 r c2 - (r-1) c1^2 - r^2 c2(S) / 12`. Negative values violate the
/// DRY inequality for these Chern numbers.
pub fn dry_defect(
    inv: &SurfaceInvariants,
    rank: u64,
    c1_sq: &BigInt,
    c2: &BigInt,
) -> Result<BigRational, BoundsError> {
    if rank < 1 {
        return Err(BoundsError::Rank { rank, min: 1 });
    }
    let euler = inv.euler_c2.ok_or(BoundsError::MissingEuler)?;
    let r = BigInt::from(rank);
    let delta = BigRational::from_integer(discriminant(rank, c1_sq, c2));
    Ok(delta - BigRational::new(&r * &r * euler, BigInt::from(12)))
}

/// `alpha / (4 (r-1)^3 a^2 e + r (r-1) a^2 e / 2)`, the ratio of the bound to
/// its leading terms.
pub fn alpha_leading_ratio(inv: &SurfaceInvariants, shape: &ChernShape) -> Result<BigRational, BoundsError> {
    let report = li_qin_alpha(inv, shape)?;
    let r = BigInt::from(shape.rank);
    let r1 = &r - 1;
    let l_sq = BigInt::from(shape.a) * shape.a * inv.e;
    let lead = BigRational::new(
        BigInt::from(8) * &r1 * &r1 * &r1 * &l_sq + &r * &r1 * &l_sq,
        BigInt::from(2),
    );
    debug_assert!(!lead.is_zero());
    Ok(report.alpha / lead)
}
