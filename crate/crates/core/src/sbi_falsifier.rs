//! Certificates that the strong Bogomolov inequality `SBI_l`,
//! `Delta(E) >= sigma r^l` for all stable `E`, fails for a given `l > 4`.
//!
//! A large family of order `(s, t)` with `t < l s` has `Delta_m / r_m^l -> 0`,
//! so every `sigma > 0` is eventually undercut. The certificate records the
//! family, the exact sample ratios and, per `sigma`, the first index where
//! `Delta_N < sigma r_N^l`.
//!
//! `l = p/q` is rational, and ratios are stored as their `q`-th powers
//! `Delta^q / r^p`, which are exact rationals. Comparisons against `sigma`
//! become `Delta^q < sigma^q r^p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exact::{ln_ratio, serde_exact, RatDisplay};
use crate::fit::least_squares;
use crate::large_families::{make_schedule, FamilyError, FamilyParams, FamilySchedule};
use crate::surface_lattice::SurfaceInvariants;

pub const CERTIFICATE_FORMAT: &str = "sbi-certificate/1";
/// Decimal places written for `decay_slope`.
pub const SLOPE_PRECISION: u32 = 6;

#[derive(Debug, thiserror::Error)]
pub enum SbiError {
    #[error("l = {0} but a falsification is only available for l > 4")]
    ExponentTooSmall(String),
    #[error("exponents need s > 0 and x > 0, got s = {s}, x = {x}")]
    Exponents { s: String, x: String },
    #[error("t = {t} is not below l*s = {ls}; the family does not undercut r^l")]
    NotFalsifying { t: String, ls: String },
    #[error("threshold sigma = {0} must be positive")]
    Sigma(String),
    #[error("at least one threshold sigma is required")]
    NoSigma,
    #[error("l = {0} has too large a denominator for exact comparison")]
    Denominator(String),
    #[error("index range needs at least 10 points spanning a factor of 5, got [{0}, {1}]")]
    Range(u64, u64),
    #[error("decay slope could not be fitted")]
    Fit,
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, thiserror::Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Toml(#[from] toml::de::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbiQuery {
    #[serde(with = "serde_exact::rational")]
    pub l: BigRational,
    #[serde(with = "serde_exact::rational_vec")]
    pub sigmas: Vec<BigRational>,
    pub surface: SurfaceInvariants,
}

/// Family order `(s, t)` with `x = t - 4s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exponents {
    #[serde(with = "serde_exact::rational")]
    pub s: BigRational,
    #[serde(with = "serde_exact::rational")]
    pub x: BigRational,
    #[serde(with = "serde_exact::rational")]
    pub t: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleRef {
    pub c: i64,
    pub m_min: u64,
    pub m_max: u64,
    /// SHA-256 of the schedule table.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sample {
    pub m: u64,
    pub r: u64,
    #[serde(with = "serde_exact::int")]
    pub delta: BigInt,
    /// `Delta^q / r^p` for `l = p/q`.
    #[serde(with = "serde_exact::rational")]
    pub ratio: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Threshold {
    #[serde(with = "serde_exact::rational")]
    pub sigma: BigRational,
    /// Least sampled `N` with `Delta_N < sigma r_N^l`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Index predicted by the fitted decay when no sample undercuts `sigma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolated_n: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbiCertificate {
    pub format: String,
    /// Informational; ignored by [`check_certificate`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    /// `q` in `l = p/q`.
    pub ratio_power: u32,
    /// First index of the strictly decreasing tail of sample ratios.
    pub tail_start: u64,
    pub decay_slope: String,
    pub slope_precision: u32,
    /// Every threshold was undercut inside the sampled range.
    pub complete: bool,
    pub query: SbiQuery,
    pub exponents: Exponents,
    pub schedule: ScheduleRef,
    pub samples: Vec<Sample>,
    pub thresholds: Vec<Threshold>,
}

fn four() -> BigRational {
    BigRational::from_integer(4.into())
}

fn show(q: &BigRational) -> String {
    RatDisplay(q).to_string()
}

/// The default order for `SBI_l`: `s = 1`, `x = (l - 4)/2`, so `t = 4 + x < l`.
pub fn choose_exponents(l: &BigRational) -> Result<Exponents, SbiError> {
    if l <= &four() {
        return Err(SbiError::ExponentTooSmall(show(l)));
    }
    let x = (l - four()) / BigRational::from_integer(2.into());
    exponents_with(l, BigRational::one(), x)
}

/// Order `(s, 4s + x)`, accepted only when it undercuts `r^l`.
pub fn exponents_with(l: &BigRational, s: BigRational, x: BigRational) -> Result<Exponents, SbiError> {
    if l <= &four() {
        return Err(SbiError::ExponentTooSmall(show(l)));
    }
    if !s.is_positive() || !x.is_positive() {
        return Err(SbiError::Exponents { s: show(&s), x: show(&x) });
    }
    let t = &s * four() + &x;
    let ls = l * &s;
    if t >= ls {
        return Err(SbiError::NotFalsifying { t: show(&t), ls: show(&ls) });
    }
    Ok(Exponents { s, x, t })
}

fn l_parts(l: &BigRational) -> Result<(usize, u32), SbiError> {
    let p = l.numer().to_usize().filter(|&p| p <= 4096);
    let q = l.denom().to_u32().filter(|&q| q <= 64);
    match (p, q) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(SbiError::Denominator(show(l))),
    }
}

fn ratio_power(delta: &BigInt, r: u64, p: usize, q: u32) -> BigRational {
    BigRational::new(num_traits::pow(delta.clone(), q as usize), num_traits::pow(BigInt::from(r), p))
}

/// `Delta^q < sigma^q r^p`, decided on integers.
fn undercuts(delta: &BigInt, r: u64, sigma: &BigRational, p: usize, q: u32) -> bool {
    let q = q as usize;
    let lhs = num_traits::pow(delta.clone(), q) * num_traits::pow(sigma.denom().clone(), q);
    let rhs = num_traits::pow(sigma.numer().clone(), q) * num_traits::pow(BigInt::from(r), p);
    lhs < rhs
}

fn fit_decay(samples: &[Sample], q: u32) -> Option<(f64, f64)> {
    let pts: Vec<_> = samples
        .iter()
        .map(|s| ((s.m as f64).ln(), ln_ratio(&s.ratio) / q as f64))
        .collect();
    least_squares(&pts)
}

fn tail_start(samples: &[Sample]) -> u64 {
    let mut start = samples.len() - 1;
    while start > 0 && samples[start - 1].ratio > samples[start].ratio {
        start -= 1;
    }
    samples[start].m
}

fn format_slope(slope: f64) -> String {
    format!("{:.*}", SLOPE_PRECISION as usize, slope)
}

pub fn schedule_digest(schedule: &FamilySchedule) -> String {
    hex::encode(Sha256::digest(schedule.to_table().as_bytes()))
}

/// Builds the certificate for the default exponents of [`choose_exponents`].
pub fn falsify(query: &SbiQuery, m_min: u64, m_max: u64, c: i64) -> Result<SbiCertificate, SbiError> {
    let exponents = choose_exponents(&query.l)?;
    falsify_with(query, exponents, m_min, m_max, c)
}

pub fn falsify_with(
    query: &SbiQuery,
    exponents: Exponents,
    m_min: u64,
    m_max: u64,
    c: i64,
) -> Result<SbiCertificate, SbiError> {
    let exponents = exponents_with(&query.l, exponents.s, exponents.x)?;
    if query.sigmas.is_empty() {
        return Err(SbiError::NoSigma);
    }
    if let Some(bad) = query.sigmas.iter().find(|s| !s.is_positive()) {
        return Err(SbiError::Sigma(show(bad)));
    }
    if m_max < m_min.saturating_add(9) || m_max < m_min.saturating_mul(5) {
        return Err(SbiError::Range(m_min, m_max));
    }
    let (p, q) = l_parts(&query.l)?;

    let params = FamilyParams::new(exponents.s.clone(), exponents.t.clone(), c, m_min, m_max)?;
    let schedule = make_schedule(&query.surface, &params)?;
    let samples: Vec<Sample> = schedule
        .members
        .iter()
        .map(|mem| Sample {
            m: mem.m,
            r: mem.r,
            delta: mem.delta.clone(),
            ratio: ratio_power(&mem.delta, mem.r, p, q),
        })
        .collect();

    let (slope, intercept) = fit_decay(&samples, q).ok_or(SbiError::Fit)?;
    let thresholds: Vec<Threshold> = query
        .sigmas
        .iter()
        .map(|sigma| {
            let n = samples
                .iter()
                .find(|s| undercuts(&s.delta, s.r, sigma, p, q))
                .map(|s| s.m);
            let extrapolated_n = match n {
                Some(_) => None,
                None if slope < 0.0 => {
                    let ln_n = (ln_ratio(sigma) - intercept) / slope;
                    Some(format!("{:.6e}", ln_n.exp().max(m_max as f64)))
                }
                None => Some("unbounded".to_string()),
            };
            Threshold {
                sigma: sigma.clone(),
                n,
                extrapolated_n,
            }
        })
        .collect();

    Ok(SbiCertificate {
        format: CERTIFICATE_FORMAT.to_string(),
        generated_at: None,
        ratio_power: q,
        tail_start: tail_start(&samples),
        decay_slope: format_slope(slope),
        slope_precision: SLOPE_PRECISION,
        complete: thresholds.iter().all(|t| t.n.is_some()),
        query: query.clone(),
        exponents,
        schedule: ScheduleRef {
            c,
            m_min,
            m_max,
            digest: schedule_digest(&schedule),
        },
        samples,
        thresholds,
    })
}

impl SbiCertificate {
    pub fn decay_slope_value(&self) -> Option<f64> {
        self.decay_slope.trim().parse().ok()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("certificate serializes")
    }

    /// Samples from [`Self::tail_start`] on.
    pub fn tail(&self) -> &[Sample] {
        let start = self
            .samples
            .iter()
            .position(|s| s.m == self.tail_start)
            .unwrap_or(self.samples.len());
        &self.samples[start..]
    }
}

pub fn parse_certificate(text: &str) -> Result<SbiCertificate, CertificateError> {
    Ok(toml::from_str(text)?)
}

/// Re-verifies a certificate from its raw data. Returns every failed
/// invariant; an empty list means the certificate holds.
///
/// Extrapolated indices of incomplete certificates are not verified.
pub fn audit_certificate(cert: &SbiCertificate) -> Vec<String> {
    let mut out = Vec::new();
    let mut fail = |msg: String| out.push(msg);

    if cert.format != CERTIFICATE_FORMAT {
        fail(format!("format: expected {CERTIFICATE_FORMAT:?}, got {:?}", cert.format));
    }
    let l = &cert.query.l;
    if l <= &four() {
        fail(format!("query.l: {} is not above 4", show(l)));
    }
    if let Err(e) = cert.query.surface.ensure_valid() {
        fail(format!("query.surface: {e}"));
    }
    if cert.query.sigmas.is_empty() || cert.query.sigmas.iter().any(|s| !s.is_positive()) {
        fail("query.sigmas: thresholds must be positive and non-empty".to_string());
    }
    let ex = &cert.exponents;
    if !ex.s.is_positive() || !ex.x.is_positive() {
        fail("exponents: s and x must be positive".to_string());
    }
    if ex.t != &ex.s * four() + &ex.x {
        fail("exponents.t: t != 4s + x".to_string());
    }
    if ex.t >= l * &ex.s {
        fail(format!("exponents: t = {} is not below l*s = {}", show(&ex.t), show(&(l * &ex.s))));
    }

    let (p, q) = match l_parts(l) {
        Ok(parts) => parts,
        Err(e) => {
            fail(format!("query.l: {e}"));
            return out;
        }
    };
    if cert.ratio_power != q {
        fail(format!("ratio_power: expected {q}, got {}", cert.ratio_power));
    }
    if cert.samples.len() < 2 {
        fail("samples: fewer than two samples".to_string());
        return out;
    }

    for (i, s) in cert.samples.iter().enumerate() {
        if s.r < 2 || !s.delta.is_positive() {
            fail(format!("samples[{i}]: needs r >= 2 and delta > 0"));
            continue;
        }
        if s.ratio != ratio_power(&s.delta, s.r, p, q) {
            fail(format!("samples[{i}].ratio: does not equal delta^{q} / r^{p} (m = {})", s.m));
        }
    }
    let indices_ok = cert.samples.windows(2).all(|w| w[1].m == w[0].m + 1)
        && cert.samples.first().map(|s| s.m) == Some(cert.schedule.m_min)
        && cert.samples.last().map(|s| s.m) == Some(cert.schedule.m_max);
    if !indices_ok {
        fail("samples: indices must run consecutively over [m_min, m_max]".to_string());
        return out;
    }

    match FamilyParams::new(ex.s.clone(), ex.t.clone(), cert.schedule.c, cert.schedule.m_min, cert.schedule.m_max)
        .map_err(SbiError::from)
        .and_then(|params| Ok(make_schedule(&cert.query.surface, &params)?))
    {
        Ok(schedule) => {
            if schedule_digest(&schedule) != cert.schedule.digest {
                fail("schedule.digest: does not match the regenerated schedule".to_string());
            }
            let same = schedule.members.len() == cert.samples.len()
                && schedule
                    .members
                    .iter()
                    .zip(&cert.samples)
                    .all(|(mem, s)| mem.m == s.m && mem.r == s.r && mem.delta == s.delta);
            if !same {
                fail("samples: (m, r, delta) differ from the regenerated schedule".to_string());
            }
        }
        Err(e) => fail(format!("schedule: cannot regenerate: {e}")),
    }

    if cert.thresholds.len() != cert.query.sigmas.len() {
        fail("thresholds: one entry per sigma required".to_string());
    }
    for (i, (th, sigma)) in cert.thresholds.iter().zip(&cert.query.sigmas).enumerate() {
        if &th.sigma != sigma {
            fail(format!("thresholds[{i}].sigma: does not match query.sigmas[{i}]"));
        }
        if !th.sigma.is_positive() {
            continue;
        }
        let first = cert
            .samples
            .iter()
            .find(|s| s.delta.is_positive() && undercuts(&s.delta, s.r, &th.sigma, p, q))
            .map(|s| s.m);
        match th.n {
            Some(n) => match cert.samples.iter().find(|s| s.m == n) {
                None => fail(format!("thresholds[{i}].n: index {n} is not sampled")),
                Some(s) if !undercuts(&s.delta, s.r, &th.sigma, p, q) => fail(format!(
                    "thresholds[{i}]: Delta_{n} < sigma r_{n}^l does not hold"
                )),
                Some(_) if first != Some(n) => {
                    fail(format!("thresholds[{i}].n: {n} is not the least witness"))
                }
                Some(_) => {}
            },
            None => {
                if let Some(m) = first {
                    fail(format!("thresholds[{i}]: marked unreached but m = {m} undercuts sigma"));
                }
            }
        }
    }
    let complete = cert.thresholds.iter().all(|t| t.n.is_some());
    if cert.complete != complete {
        fail(format!("complete: expected {complete}"));
    }

    match cert.samples.iter().position(|s| s.m == cert.tail_start) {
        None => fail(format!("tail_start: index {} is not sampled", cert.tail_start)),
        Some(pos) => {
            let decreasing = cert.samples[pos..].windows(2).all(|w| w[0].ratio > w[1].ratio);
            if !decreasing {
                fail("tail_start: ratios are not strictly decreasing from tail_start".to_string());
            }
            if pos > 0 && cert.samples[pos - 1].ratio > cert.samples[pos].ratio {
                fail("tail_start: the decreasing tail starts earlier".to_string());
            }
        }
    }

    match cert.decay_slope_value() {
        None => fail(format!("decay_slope: not a decimal: {:?}", cert.decay_slope)),
        Some(stored) => {
            if stored.is_nan() || stored >= 0.0 {
                fail(format!("decay_slope: {stored} is not negative"));
            }
            let valid: Vec<_> = cert
                .samples
                .iter()
                .filter(|s| s.ratio.is_positive())
                .cloned()
                .collect();
            match fit_decay(&valid, q) {
                Some((refit, _)) => {
                    let precision = cert.slope_precision.min(15) as i32;
                    let tol = 0.5 * 10f64.powi(-precision) + 1e-9;
                    if (refit - stored).abs() > tol {
                        fail(format!("decay_slope: stored {stored} but refit gives {refit}"));
                    }
                }
                None => fail("decay_slope: cannot refit".to_string()),
            }
        }
    }
    out
}

pub fn check_certificate(cert: &SbiCertificate) -> bool {
    audit_certificate(cert).is_empty()
}

impl Sample {
    /// `Delta / r^l` as a float, for display.
    pub fn ratio_f64(&self, q: u32) -> f64 {
        if self.ratio.is_zero() {
            return 0.0;
        }
        (ln_ratio(&self.ratio) / q as f64).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn plane_query(l: BigRational, sigmas: Vec<BigRational>) -> SbiQuery {
        SbiQuery {
            l,
            sigmas,
            surface: Catalog::builtin().get("projective-plane").unwrap().clone(),
        }
    }

    #[test]
    fn exponent_choices() {
        assert_eq!(
            choose_exponents(&q(5, 1)).unwrap(),
            Exponents { s: q(1, 1), x: q(1, 2), t: q(9, 2) }
        );
        assert_eq!(
            choose_exponents(&q(6, 1)).unwrap(),
            Exponents { s: q(1, 1), x: q(1, 1), t: q(5, 1) }
        );
        assert!(matches!(choose_exponents(&q(4, 1)), Err(SbiError::ExponentTooSmall(_))));
        assert!(matches!(choose_exponents(&q(7, 2)), Err(SbiError::ExponentTooSmall(_))));
        assert!(matches!(
            exponents_with(&q(5, 1), q(1, 1), q(1, 1)),
            Err(SbiError::NotFalsifying { .. })
        ));
        assert!(exponents_with(&q(5, 1), q(2, 1), q(1, 1)).is_ok());
    }

    #[test]
    fn plane_l5_certificate() {
        let cert = falsify(&plane_query(q(5, 1), vec![q(1, 1)]), 10, 200, 3).unwrap();
        let slope = cert.decay_slope_value().unwrap();
        assert!((slope + 0.5).abs() <= 0.15, "slope {slope}");
        assert!(cert.thresholds[0].n.is_some());
        assert!(cert.complete);
        assert_eq!(audit_certificate(&cert), Vec::<String>::new());
    }

    #[test]
    fn plane_l6_certificate() {
        let cert = falsify(&plane_query(q(6, 1), vec![q(1, 1000)]), 10, 200, 3).unwrap();
        let slope = cert.decay_slope_value().unwrap();
        assert!((slope + 1.0).abs() <= 0.15, "slope {slope}");
        assert!(check_certificate(&cert));
    }

    #[test]
    fn unreached_threshold_is_extrapolated() {
        let cert = falsify(&plane_query(q(5, 1), vec![q(1, 1), q(1, 10_000)]), 10, 200, 3).unwrap();
        assert!(!cert.complete);
        assert!(cert.thresholds[1].n.is_none());
        let n: f64 = cert.thresholds[1].extrapolated_n.as_ref().unwrap().parse().unwrap();
        assert!(n > 200.0);
        assert!(check_certificate(&cert));
    }

    #[test]
    fn tampering_detected() {
        let cert = falsify(&plane_query(q(5, 1), vec![q(1, 1)]), 10, 200, 3).unwrap();

        let mut bumped = cert.clone();
        let n = bumped.thresholds[0].n.unwrap();
        let idx = bumped.samples.iter().position(|s| s.m == n).unwrap();
        bumped.samples[idx].delta += 1;
        assert!(!check_certificate(&bumped));

        let mut flipped = cert.clone();
        flipped.decay_slope = flipped.decay_slope.trim_start_matches('-').to_string();
        assert!(!check_certificate(&flipped));

        let mut lied = cert.clone();
        lied.thresholds[0].n = Some(n + 1);
        assert!(!check_certificate(&lied));

        let mut wrong_tail = cert.clone();
        wrong_tail.tail_start = cert.schedule.m_min;
        assert!(!check_certificate(&wrong_tail));

        let mut incomplete = cert.clone();
        incomplete.complete = false;
        assert!(!check_certificate(&incomplete));

        let mut stretched = cert;
        stretched.schedule.m_max = u64::MAX / 2;
        let findings = audit_certificate(&stretched);
        assert!(findings.iter().any(|f| f.contains("consecutively")), "{findings:?}");
    }

    #[test]
    fn certificate_round_trips_through_toml() {
        let mut cert = falsify(&plane_query(q(9, 2), vec![q(1, 1), q(5, 2)]), 10, 200, 3).unwrap();
        cert.generated_at = Some("1700000000".into());
        let text = cert.to_toml();
        let back = parse_certificate(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(audit_certificate(&back), Vec::<String>::new());
    }

    #[test]
    fn malformed_certificates_rejected() {
        assert!(parse_certificate("format = 3").is_err());
        let cert = falsify(&plane_query(q(6, 1), vec![q(1, 1)]), 10, 60, 3).unwrap();
        let text = cert.to_toml().replacen("delta = \"", "delta = \"x", 1);
        let err = parse_certificate(&text).unwrap_err().to_string();
        assert!(err.contains("decimal integer"), "{err}");
    }

    #[test]
    fn bad_queries_rejected() {
        assert!(matches!(falsify(&plane_query(q(4, 1), vec![q(1, 1)]), 10, 200, 3), Err(SbiError::ExponentTooSmall(_))));
        assert!(matches!(falsify(&plane_query(q(5, 1), vec![]), 10, 200, 3), Err(SbiError::NoSigma)));
        assert!(matches!(falsify(&plane_query(q(5, 1), vec![q(-1, 1)]), 10, 200, 3), Err(SbiError::Sigma(_))));
        assert!(matches!(falsify(&plane_query(q(5, 1), vec![q(1, 1)]), 10, 30, 3), Err(SbiError::Range(10, 30))));
    }
}
