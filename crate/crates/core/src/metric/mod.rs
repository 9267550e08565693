//! Finite (ultra)metric spaces.

mod chain;
mod construct;
pub mod io;
mod net;
mod space;
mod validate;
mod word;

pub use chain::{chain_components, ultrametrize};
pub use construct::{hausdorff, hyperspace, product};
pub use net::{ball, ball_by_id, entropy_profile, min_net, EntropyEntry, EntropyProfile, NetConvention};
pub(crate) use net::class_labels;
pub use space::{FiniteUltraSpace, SizeCaps};
pub use validate::{validate_metric, validate_ultrametric, validate_ultrametric_exhaustive};
pub use word::{word_id, word_letters, word_space, WordSpaceSpec};
