//! Truncated tensor algebra, path signatures and rough path analytics.
//!
//! The algebra is generic over the coefficient type. Exact arithmetic works
//! with [`Rational64`](num_rational::Rational64); norms and Hölder analytics
//! need a floating point type. The aliases below fix `f64` for everyday use.

pub mod cli;
pub mod error;
pub mod grouplike;
pub mod io;
pub mod rough;
pub mod scalar;
pub mod signature;
pub mod tensor;
pub mod word;

pub use error::{Error, Result};
pub use grouplike::{
    grouplike_inverse, is_grouplike, is_lie, lie_bracket, lie_project_dims, GroupElement,
    GrouplikeReport, ShuffleTable, ShuffleViolation, DEFAULT_GROUPLIKE_TOL,
};
pub use rough::{
    graded_holder, holder_norm, holder_report, is_multiplicative, minimal_depth, rho_holder,
    young_integral, HolderReport, MultiplicativeReport, YoungOptions, YoungResult,
};
pub use scalar::{Real, Scalar};
pub use signature::{
    brute_force_sig, full_signature, levy_area, log_signature, path_signature, segment_sig,
    signature_path, PairwiseFunctional, SampledPath, SignaturePath, TwoParameter,
};
pub use tensor::{entry_cap, set_entry_cap, TruncatedTensor, DEFAULT_ENTRY_CAP};
pub use word::{antipode, deconcat, enumerate_words, pair, shuffle, Word, WordPoly};

pub type Tensor = TruncatedTensor<f64>;
pub type TensorF32 = TruncatedTensor<f32>;
pub type ExactTensor = TruncatedTensor<num_rational::Rational64>;
pub type Path = SampledPath<f64>;
pub type PathF32 = SampledPath<f32>;
pub type ExactPath = SampledPath<num_rational::Rational64>;
pub type SigPath = SignaturePath<f64>;
pub type Group = GroupElement<f64>;
