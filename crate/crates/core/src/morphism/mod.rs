//! Multi-maps, distortion moduli and morphism certificates.

mod admissible;
mod certificate;
mod embed;
mod modulus;
mod multimap;

pub use admissible::{
    balanced_partition, build_admissible_morphism, check_admissible, check_l2_preconditions, fibre_counts,
    partition_feasible, AdmissibleBuild, AdmissibleSequences, Inequality, L2Level, L2Report,
};
pub use certificate::{
    coarse_normal_form, is_large, selection_pair, verify_asymorphism, Check, MorphismCertificate, MorphismKind,
    NormalForm, SelectionPair,
};
pub use embed::{tower_embedding, TowerEmbedding};
pub use modulus::{distortion_modulus, DistortionModulus, ModulusEntry};
pub use multimap::{compose, MultiMap, MultiMapJson};
