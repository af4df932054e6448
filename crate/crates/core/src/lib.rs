//! Genus invariants of modular curves `X_H` for the classical families of
//! level structures.
//!
//! For each family the crate evaluates the closed-form invariants
//! `(i, ε₂, ε₃, ε∞, g)` and can recompute them from scratch by realizing
//! `H` as a matrix group and counting cosets in `SL2(Z/NZ)`.
//!
//! ```
//! use modcurve::{invariants_formula, Family, SubgroupSpec};
//!
//! let spec = SubgroupSpec::new(Family::NsPlus, 39);
//! let inv = invariants_formula(&spec).unwrap();
//! assert_eq!((inv.psl2_index, inv.genus), (468, 28));
//! ```

pub mod arith;
pub mod error;
pub mod families;
pub mod formulas;
pub mod matgrp;
pub mod verify;

pub use error::{Error, Result};
pub use families::{Family, SubgroupSpec};
pub use formulas::{genus_from_invariants, invariants_formula, InvariantSet, Method};
pub use matgrp::{invariants_bruteforce, EngineConfig, DEFAULT_MAX_SL2_ELEMENTS};
pub use verify::{cross_check, sweep, CheckEntry, SweepPlan, VerificationReport};
