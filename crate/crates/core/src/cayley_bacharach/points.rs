//! Rational points of the projective plane and reduced 0-cycles.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::{parse_rational, RatDisplay};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CycleError {
    #[error("point ({0}) has all coordinates zero")]
    ZeroPoint(String),
    #[error("point {0} appears twice; 0-cycles must be reduced")]
    Duplicate(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// A point `(x : y : z)`, stored with its last nonzero coordinate equal to 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint([BigRational; 3]);

impl ProjectivePoint {
    pub fn new(x: BigRational, y: BigRational, z: BigRational) -> Result<Self, CycleError> {
        let mut coords = [x, y, z];
        let Some(last) = coords.iter().rposition(|c| !c.is_zero()) else {
            return Err(CycleError::ZeroPoint("0, 0, 0".into()));
        };
        let scale = coords[last].recip();
        for c in coords.iter_mut() {
            *c *= &scale;
        }
        Ok(ProjectivePoint(coords))
    }

    /// Affine point `(x : y : 1)`.
    pub fn affine(x: i64, y: i64) -> Self {
        let q = |v: i64| BigRational::from_integer(v.into());
        ProjectivePoint([q(x), q(y), BigRational::one()])
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Result<Self, CycleError> {
        let q = |v: i64| BigRational::from_integer(v.into());
        Self::new(q(x), q(y), q(z))
    }

    pub fn coords(&self) -> &[BigRational; 3] {
        &self.0
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = &self.0;
        write!(f, "({} : {} : {})", RatDisplay(x), RatDisplay(y), RatDisplay(z))
    }
}

/// A reduced 0-cycle: finitely many distinct points, in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ZeroCycle {
    points: Vec<ProjectivePoint>,
}

impl ZeroCycle {
    pub fn new(points: Vec<ProjectivePoint>) -> Result<Self, CycleError> {
        let mut seen = std::collections::BTreeSet::new();
        for p in &points {
            if !seen.insert(p) {
                return Err(CycleError::Duplicate(p.to_string()));
            }
        }
        Ok(ZeroCycle { points })
    }

    pub fn empty() -> Self {
        ZeroCycle::default()
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The cycle with the point at `index` removed.
    pub fn without(&self, index: usize) -> ZeroCycle {
        let mut points = self.points.clone();
        points.remove(index);
        ZeroCycle { points }
    }

    /// The `k x k` grid `{(i : j : 1) : 0 <= i, j < k}`, the complete
    /// intersection of `prod (x - i z)` and `prod (y - j z)`.
    pub fn grid(k: i64) -> ZeroCycle {
        let points = (0..k)
            .flat_map(|i| (0..k).map(move |j| ProjectivePoint::affine(i, j)))
            .collect();
        ZeroCycle { points }
    }

    /// One point per line, three coordinates, exact rationals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let [x, y, z] = p.coords();
            out.push_str(&format!("{} {} {}\n", RatDisplay(x), RatDisplay(y), RatDisplay(z)));
        }
        out
    }
}

/// Parses a cycle file: one point per line as three rationals (`3`, `-1/2`,
/// `0.25`) separated by whitespace or commas. `#` starts a comment.
pub fn parse_cycle(text: &str) -> Result<ZeroCycle, CycleError> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 3 {
            return Err(CycleError::Syntax {
                line: i + 1,
                msg: format!("expected 3 coordinates, found {}", fields.len()),
            });
        }
        let mut coords = Vec::with_capacity(3);
        for f in fields {
            coords.push(parse_rational(f).map_err(|e| CycleError::Syntax {
                line: i + 1,
                msg: e.to_string(),
            })?);
        }
        let z = coords.pop().unwrap();
        let y = coords.pop().unwrap();
        let x = coords.pop().unwrap();
        let p = ProjectivePoint::new(x, y, z).map_err(|e| CycleError::Syntax {
            line: i + 1,
            msg: e.to_string(),
        })?;
        points.push(p);
    }
    ZeroCycle::new(points)
}
