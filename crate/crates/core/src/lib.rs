//! Spectral numerics for the Rhaly (terraced) operator on weighted null
//! sequence spaces.
//!
//! The matrix `R_a` has row `i` equal to `a_i` in columns `1..=i`. The crate
//! decides boundedness and compactness between weighted spaces `c_0(r)` and
//! `c_0(s)`, classifies complex points against the fine spectrum, builds
//! explicit resolvent and eigenvector sections, validates the product
//! asymptotics that drive those results, and evaluates s-number quasi-norms.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod ideals;
pub mod numeric;
pub mod operator;
pub mod products;
pub mod sequences;
pub mod spectrum;

pub use asymptotics::{AsymptoticClass, LimitClass, SumClass, SumVerdict};
pub use error::{Error, Result};
pub use ideals::{QuasiNormResult, SNumberSequence};
pub use numeric::TriState;
pub use operator::{build_section, classify_boundedness, BoundednessReport, FiniteSection};
pub use sequences::{
    estimate_chi, verify_weight, ChiEstimate, Family, SequenceConfig, SequenceSpec, WeightFlags,
};
pub use spectrum::{classify_point, GridSpec, SpectralConfig, SpectralLabel, SpectralPoint};
