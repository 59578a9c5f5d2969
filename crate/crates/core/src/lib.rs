//! Exact arithmetic for large families of stable vector bundles on
//! polarized surfaces.
//!
//! * [`surface_lattice`]: surface invariants, the `L0` sublattice, Riemann-Roch.
//! * [`existence_bounds`]: discriminant and the existence bound for the Serre
//!   construction.
//! * [`large_families`]: schedules of order `(s, t)` and order verification.
//! * [`sbi_falsifier`]: certificates against the strong Bogomolov inequality.
//! * [`cayley_bacharach`]: the local-freeness criterion on `P^2`.

pub mod catalog;
pub mod cayley_bacharach;
pub mod exact;
pub mod existence_bounds;
pub mod fit;
pub mod large_families;
pub mod sbi_falsifier;
pub mod surface_lattice;

pub use catalog::{parse_catalog, Catalog};
pub use existence_bounds::{discriminant, dry_defect, li_qin_alpha, min_c2, BoundReport, ChernData, ChernShape};
pub use large_families::{make_schedule, verify_order, FamilyMember, FamilyParams, FamilySchedule, OrderVerdict};
pub use sbi_falsifier::{check_certificate, falsify, parse_certificate, SbiCertificate, SbiQuery};
pub use surface_lattice::{DivisorMultiple, SurfaceInvariants};
