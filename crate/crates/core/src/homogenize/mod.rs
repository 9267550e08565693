//! Asymptotic homogeneity, sequence synthesis and the equivalence pipelines.

mod classify;
mod pipeline;
mod synth;
mod witness;

pub use classify::{classify, Degree, InfMarker, MarkedEntry, MarkedProfile, Verdict};
pub use pipeline::{
    canonical_word_map, entropy_ratio_comparison, equivalence_pipeline, space_equivalence, stagewise_bound, Closing,
    EntropyLevel, PipelineOptions, PipelineReport, PipelineRun, RatioComparison, ReproHeader, SelectionSummary,
    SpaceEquivalenceReport, SpaceEquivalenceRun, Stage,
};
pub use synth::{grouped_regular_profile, synthesize_sequences, SynthesisOutput, SynthesisPolicy};
pub use witness::{asymptotic_homogeneity, Homogeneity, HomogeneityWitness};
