//! Harmonic-based approximation algorithms for multidimensional bin packing,
//! strip packing and knapsack, including their multiple-choice and rotational variants.
//!
//! All lengths, volumes and bounds are exact rationals. Solvers work in unit bins
//! (unit-base strips for strip packing); [`instance`] scales other bin sizes in and out.

pub mod assignment;
pub mod dff;
pub mod error;
pub mod fullh;
pub mod harmonic;
pub mod hgap;
pub mod instance;
pub mod knapsack;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod orientation;
pub mod report;
pub mod shelves;
pub mod strip;
pub mod validate;

pub use error::{Error, Result};
pub use harmonic::{compute_t, HarmonicContext, TransformMode, Transformed, TypeVector};
pub use model::{Choice, Item, Itemset, Packing, PackingKind, Placement, RotationPolicy};
pub use numeric::Rational;
pub use validate::{validate_packing, ValidationReport, Violation};
