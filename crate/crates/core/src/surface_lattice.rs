//! Numerical data of a polarized surface and the rank-one lattice spanned by
//! the polarization `L0`.
//!
//! Every divisor that appears in the construction is an integer multiple
//! `n * L0`, so intersections reduce to multiples of `e = L0^2`, and the only
//! canonical-class datum needed is `k = K_S . L0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

/// Numerical invariants of a smooth projective surface with a fixed very
/// ample polarization `L0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceInvariants {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// `L0^2`.
    pub e: i64,
    /// `K_S . L0`.
    pub k: i64,
    /// `chi(O_S)`.
    pub chi: i64,
    pub pg: i64,
    pub q: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ksq: Option<i64>,
    /// Topological Euler number `c2(S)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_c2: Option<i64>,
}

/// A failed invariant of [`SurfaceInvariants`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("polarization degree e = {e} must be positive (L0 is very ample)")]
    NonPositiveDegree { e: i64 },
    #[error("parity violation: e + k = {sum} is odd (adjunction requires L0^2 + K.L0 even)")]
    Parity { sum: i64 },
    #[error("pg = {0} must be non-negative")]
    NegativeGenus(i64),
    #[error("q = {0} must be non-negative")]
    NegativeIrregularity(i64),
    #[error("euler_c2 = {0} must be non-negative")]
    NegativeEuler(i64),
    #[error("chi = {chi} but 1 - q + pg = {expected}")]
    HodgeChi { chi: i64, expected: i64 },
    #[error("Noether's formula fails: 12 chi = {twelve_chi} but K^2 + c2 = {rhs}")]
    Noether { twelve_chi: i64, rhs: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("invalid surface invariants: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("chi(O({n} L0 + K)) is not an integer; parity invariant was bypassed")]
    NonIntegralChi { n: i64 },
    #[error("h0 is only computed for ample twists n >= 1, got n = {0}")]
    OutsideVanishingRange(i64),
    #[error("chi(O({n} L0 + K)) = {value} is negative, surface data is inconsistent")]
    NegativeSections { n: i64, value: BigInt },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// The class `n * L0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorMultiple(pub i64);

impl SurfaceInvariants {
    pub fn new(e: i64, k: i64, chi: i64, pg: i64, q: i64) -> Self {
        SurfaceInvariants {
            name: None,
            e,
            k,
            chi,
            pg,
            q,
            ksq: None,
            euler_c2: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_noether(mut self, ksq: i64, euler_c2: i64) -> Self {
        self.ksq = Some(ksq);
        self.euler_c2 = Some(euler_c2);
        self
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("<inline>")
    }

    pub fn is_valid(&self) -> bool {
        validate(self).is_empty()
    }

    pub fn ensure_valid(&self) -> Result<(), SurfaceError> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(SurfaceError::Invalid(v))
        }
    }
}

/// Every failed invariant; empty iff the data describe a plausible surface.
pub fn validate(inv: &SurfaceInvariants) -> Vec<Violation> {
    let mut out = Vec::new();
    if inv.e < 1 {
        out.push(Violation::NonPositiveDegree { e: inv.e });
    }
    let sum = inv.e as i128 + inv.k as i128;
    if sum.is_odd() {
        out.push(Violation::Parity { sum: sum as i64 });
    }
    if inv.pg < 0 {
        out.push(Violation::NegativeGenus(inv.pg));
    }
    if inv.q < 0 {
        out.push(Violation::NegativeIrregularity(inv.q));
    }
    if let Some(c2) = inv.euler_c2 {
        if c2 < 0 {
            out.push(Violation::NegativeEuler(c2));
        }
    }
    let expected = 1 - inv.q as i128 + inv.pg as i128;
    if inv.chi as i128 != expected {
        out.push(Violation::HodgeChi {
            chi: inv.chi,
            expected: expected as i64,
        });
    }
    if let (Some(ksq), Some(c2)) = (inv.ksq, inv.euler_c2) {
        let twelve_chi = 12 * inv.chi as i128;
        let rhs = ksq as i128 + c2 as i128;
        if twelve_chi != rhs {
            out.push(Violation::Noether {
                twelve_chi: twelve_chi as i64,
                rhs: rhs as i64,
            });
        }
    }
    out
}

/// Intersection number `(n1 L0) . (n2 L0) = n1 n2 e`.
pub fn pair(inv: &SurfaceInvariants, d1: DivisorMultiple, d2: DivisorMultiple) -> BigInt {
    BigInt::from(d1.0) * d2.0 * inv.e
}

/// `2 (chi(O(n L0 + K)) - chi(O_S)) = n^2 e + n k`, by Riemann-Roch.
fn twice_twist_excess(inv: &SurfaceInvariants, n: i64) -> BigInt {
    let n = BigInt::from(n);
    &n * &n * inv.e + &n * inv.k
}

/// `chi(O_S(n L0 + K_S)) = chi + (n^2 e + n k) / 2`.
///
/// Errors if the value is not integral, which only happens when the parity
/// invariant `e + k even` was bypassed.
pub fn chi_adjoint_twist(inv: &SurfaceInvariants, n: i64) -> Result<BigRational, SurfaceError> {
    let value = BigRational::from_integer(inv.chi.into())
        + BigRational::new(twice_twist_excess(inv, n), 2.into());
    if value.is_integer() {
        Ok(value)
    } else {
        Err(SurfaceError::NonIntegralChi { n })
    }
}

/// `h0(O_S(n L0 + K_S))` for `n >= 1`.
///
/// `n L0` is ample, so Kodaira vanishing kills `h1` and `h2` and the value is
/// exactly the Euler characteristic.
pub fn h0_adjoint_twist(inv: &SurfaceInvariants, n: i64) -> Result<BigInt, SurfaceError> {
    if n < 1 {
        return Err(SurfaceError::OutsideVanishingRange(n));
    }
    let value = chi_adjoint_twist(inv, n)?.to_integer();
    if value.is_negative() {
        return Err(SurfaceError::NegativeSections { n, value });
    }
    Ok(value)
}
