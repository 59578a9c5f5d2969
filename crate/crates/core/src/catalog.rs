//! Surface catalog files and inline surface descriptions.
//!
//! A catalog is a TOML document holding an array of `[[surface]]` tables
//! with keys `name, e, k, chi, pg, q` and optional `ksq, euler_c2`.

use serde::{Deserialize, Serialize};

use crate::surface_lattice::SurfaceInvariants;

/// Catalog shipped with the crate.
pub const BUILTIN_CATALOG: &str = include_str!("../data/catalog.toml");

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("malformed catalog: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("catalog record {index} has no name")]
    Unnamed { index: usize },
    #[error("duplicate surface name {0:?}")]
    Duplicate(String),
    #[error("unknown surface {0:?}")]
    Unknown(String),
    #[error("inline surface: {0}")]
    Inline(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Catalog {
    #[serde(default, rename = "surface")]
    pub surfaces: Vec<SurfaceInvariants>,
}

impl Catalog {
    pub fn builtin() -> Catalog {
        parse_catalog(BUILTIN_CATALOG).expect("shipped catalog parses")
    }

    pub fn get(&self, name: &str) -> Result<&SurfaceInvariants, CatalogError> {
        self.surfaces
            .iter()
            .find(|s| s.name.as_deref() == Some(name))
            .ok_or_else(|| CatalogError::Unknown(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.surfaces.iter().filter_map(|s| s.name.as_deref())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("catalog serializes")
    }
}

/// Parses a catalog document. Records are checked for names and uniqueness
/// only; geometric consistency is [`crate::surface_lattice::validate`]'s job.
pub fn parse_catalog(text: &str) -> Result<Catalog, CatalogError> {
    let catalog: Catalog = toml::from_str(text)?;
    let mut seen = std::collections::BTreeSet::new();
    for (index, s) in catalog.surfaces.iter().enumerate() {
        let name = s.name.as_deref().ok_or(CatalogError::Unnamed { index })?;
        if !seen.insert(name) {
            return Err(CatalogError::Duplicate(name.to_string()));
        }
    }
    Ok(catalog)
}

/// Parses `"e=1,k=-3,chi=1,pg=0,q=0[,ksq=9,euler_c2=3][,name=foo]"`.
pub fn parse_inline(text: &str) -> Result<SurfaceInvariants, CatalogError> {
    let err = |msg: String| CatalogError::Inline(msg);
    let mut inv = SurfaceInvariants::new(0, 0, 0, 0, 0);
    let mut required = [false; 5];
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got {item:?}")))?;
        let key = key.trim();
        let value = value.trim();
        if key == "name" {
            inv.name = Some(value.to_string());
            continue;
        }
        let n: i64 = value
            .parse()
            .map_err(|_| err(format!("{key} is not an integer: {value:?}")))?;
        match key {
            "e" => (inv.e, required[0]) = (n, true),
            "k" => (inv.k, required[1]) = (n, true),
            "chi" => (inv.chi, required[2]) = (n, true),
            "pg" => (inv.pg, required[3]) = (n, true),
            "q" => (inv.q, required[4]) = (n, true),
            "ksq" => inv.ksq = Some(n),
            "euler_c2" => inv.euler_c2 = Some(n),
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    let names = ["e", "k", "chi", "pg", "q"];
    if let Some(i) = required.iter().position(|seen| !seen) {
        return Err(err(format!("missing key {}", names[i])));
    }
    Ok(inv)
}

/// Smooth degree-`d` surface in `P^3` polarized by the hyperplane class.
pub fn hypersurface(d: i64) -> SurfaceInvariants {
    assert!(d >= 1, "degree must be positive");
    // K = (d - 4) H, c2 = d (d^2 - 4d + 6), pg = C(d-1, 3)
    let pg = (d - 1) * (d - 2) * (d - 3) / 6;
    SurfaceInvariants::new(d, d * (d - 4), 1 + pg, pg, 0)
        .with_noether(d * (d - 4) * (d - 4), d * (d * d - 4 * d + 6))
        .with_name(format!("hypersurface-degree-{d}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_lattice::validate;

    #[test]
    fn builtin_catalog_is_valid() {
        let cat = Catalog::builtin();
        assert!(cat.surfaces.len() >= 5);
        for s in &cat.surfaces {
            assert!(validate(s).is_empty(), "{}: {:?}", s.label(), validate(s));
        }
        for name in ["projective-plane", "quadric", "quartic-k3", "abelian-surface"] {
            cat.get(name).unwrap();
        }
    }

    #[test]
    fn hypersurfaces_match_catalog() {
        let cat = Catalog::builtin();
        let strip = |mut s: SurfaceInvariants| {
            s.name = None;
            s
        };
        assert_eq!(strip(hypersurface(3)), strip(cat.get("cubic-surface").unwrap().clone()));
        assert_eq!(strip(hypersurface(4)), strip(cat.get("quartic-k3").unwrap().clone()));
        assert_eq!(strip(hypersurface(5)), strip(cat.get("quintic-surface").unwrap().clone()));
        for d in 1..=12 {
            assert!(validate(&hypersurface(d)).is_empty(), "d={d}");
        }
    }

    #[test]
    fn catalog_round_trips() {
        let cat = Catalog::builtin();
        assert_eq!(parse_catalog(&cat.to_toml()).unwrap(), cat);
    }

    #[test]
    fn catalog_rejects_structural_problems() {
        let dup = "[[surface]]\nname='a'\ne=1\nk=-3\nchi=1\npg=0\nq=0\n".repeat(2);
        assert!(matches!(parse_catalog(&dup), Err(CatalogError::Duplicate(_))));
        let unnamed = "[[surface]]\ne=1\nk=-3\nchi=1\npg=0\nq=0\n";
        assert!(matches!(parse_catalog(unnamed), Err(CatalogError::Unnamed { index: 0 })));
        let extra = "[[surface]]\nname='a'\ne=1\nk=-3\nchi=1\npg=0\nq=0\ncolor=1\n";
        assert!(parse_catalog(extra).is_err());
        assert!(matches!(Catalog::builtin().get("nope"), Err(CatalogError::Unknown(_))));
    }

    #[test]
    fn inline_surfaces() {
        let s = parse_inline("e=1, k=-3, chi=1, pg=0, q=0, ksq=9, euler_c2=3").unwrap();
        assert_eq!(s, SurfaceInvariants::new(1, -3, 1, 0, 0).with_noether(9, 3));
        assert!(parse_inline("e=1,k=-3,chi=1,pg=0").is_err());
        assert!(parse_inline("e=1,k=x,chi=1,pg=0,q=0").is_err());
        assert!(parse_inline("e=1,k=1,chi=1,pg=0,q=0,w=2").is_err());
    }
}
