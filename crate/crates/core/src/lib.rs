//! Wave-particle duality in multipath interference of partially coherent
//! light.
//!
//! * [`coherence`]: normalized mutual-coherence matrices and the n-point
//!   degree of coherence.
//! * [`engine`]: analytic n-slit patterns with their incoherent reference.
//! * [`measures`]: visibility, path distinguishability and the duality
//!   relations between them.
//! * [`analysis`]: operational visibilities read off sampled patterns.
//! * [`oracle`]: Monte-Carlo field ensembles reproducing the analytic
//!   patterns.

pub mod analysis;
pub mod coherence;
pub mod engine;
pub mod error;
pub mod exec;
pub mod measures;
pub mod oracle;

pub use analysis::{extract_michelson, extract_vc, find_primary_max, fringe_width, PeakEstimate};
pub use coherence::{
    random_aligned_coherence, random_coherence, CoherenceJson, CoherenceMatrix, ModeDecomposition,
    PolarizationSet,
};
pub use engine::{
    delay, intensity_at, pattern, pattern_with, Envelope, InterferencePattern, PatternMeta,
    PhaseModel, ScreenGeometry, SlitArray,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use measures::{
    density_from_beams, distinguishability, distinguishability_prime, linear_identity, michelson,
    pythagorean_identity, quantum_coherence, visibility_analytic, BeamDensityMatrix,
    DualityReport, IdentityCheck,
};
pub use oracle::{
    mc_pattern, mc_pattern_with, mc_validate, realize_fields, ConvergenceReport, EnsembleSpec,
};

pub use num_complex::Complex64;
