//! Numerical core for checking weighted Caffarelli–Kohn–Nirenberg inequalities
//! on pointed radial metric measure spaces.
//!
//! Everything here is a pure function of its inputs and works without `std`
//! (an allocator is required). File formats and the command line live in the
//! companion `ckn-lab` crate.
#![no_std]
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

extern crate alloc;

pub mod bernstein;
pub mod ckn;
pub mod counterexample;
pub mod error;
pub mod grid;
pub mod optimize;
pub mod profiles;
pub mod quadrature;
pub mod report;
pub mod rigidity;
pub mod sharp;
pub mod space;
pub mod special;
pub mod volume;

pub use bernstein::{BernsteinTable, FProfile};
pub use ckn::{CknIntegrals, CknReport};
pub use counterexample::{CounterexampleBundle, CounterexampleSpec};
pub use error::{Error, Result};
pub use profiles::{FamilyPart, FamilySpec, ProfileKind, RadialProfile};
pub use quadrature::{QuadResult, QuadratureSpec, TailCut};
pub use report::{CheckReport, MonotonicityReport};
pub use rigidity::{ConeParams, StabilityRecord};
pub use sharp::{OptimizerSpec, SharpEstimate};
pub use space::{DensityForm, DensitySegment, Geometry, PointedRadialSpace};
