//! Logarithmic class groups and circular units of real abelian number fields.

pub mod abelian;
pub mod annihilate;
pub mod arith;
pub mod classgrp;
pub mod cyclo;
pub mod error;
pub mod ladic;
pub mod quadratic;
pub mod report;
pub mod snf;
pub mod units;

pub use abelian::{AbelianField, FieldSpec, GaloisElement, Limits};
pub use cyclo::{CycloElement, FormalProduct};
pub use error::{Error, Result};
