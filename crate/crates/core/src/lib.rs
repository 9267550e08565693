//! Executable coarse geometry on finite truncations of ultrametric spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`metric`]: finite (ultra)metric spaces with exact rational distances,
//!   balls, minimum nets, entropy profiles, products, hyperspaces and
//!   chain ultrametrization.
//! * [`tower`]: leveled forests truncated to a single germ, their path
//!   metric, level subtowers, degree profiles and the group/ball towers.
//! * [`morphism`]: multi-maps, distortion moduli, asymorphism certificates,
//!   tower embeddings and the admissible-morphism builder.
//! * [`homogenize`]: asymptotic homogeneity, the sequence synthesizer and
//!   the end-to-end equivalence pipelines.
//!
//! All metric predicates use exact arithmetic; nothing here touches floats.

pub mod error;
pub mod homogenize;
pub mod metric;
pub mod morphism;
pub mod rational;
pub mod report;
pub mod tower;

pub use error::{Error, Result};
pub use metric::{FiniteUltraSpace, NetConvention, SizeCaps};
pub use morphism::{DistortionModulus, MorphismCertificate, MorphismKind, MultiMap};
pub use rational::{Big, Dist};
pub use report::ValidationReport;
pub use tower::{DegreeProfile, Tower};
