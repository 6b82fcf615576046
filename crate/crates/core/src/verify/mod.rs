//! Parameter predicates and numerical inequality suites.

mod battery;
mod embedding;
pub mod ensembles;
mod hardy;
mod interp;
mod mixed;
mod predicates;
mod report;
mod sweep;
mod traces;

pub use battery::{battery_json, run_battery, run_reference_suite, SUITES, SWEEP_T, THREADS_ENV};
pub use embedding::{
    dilation_exponent, run_buc_suite, run_embedding_pair, run_embedding_suite, BUC_BOUND, EMBEDDING_BOUND,
};
pub use ensembles::{BandLimited1D, BandLimited2D, Ensemble, Profile};
pub use hardy::{hardy_constant, hardy_sides, poincare_constant, run_hardy_suite, run_poincare_suite};
pub use interp::{run_interp_suite, run_interp_suite_on};
pub use mixed::{modewise_ratio, run_mixed_derivative_suite, MixedParams, MIXED_BOUND};
pub use predicates::{
    embeds, trace_space_order, EmbeddingQuery, EmbeddingVariant, TraceOrder, TraceQuery, TraceVariant,
};
pub use report::{fmt_num, Instance, Tolerances, Verdict, VerificationReport};
pub use sweep::{run_t_uniformity_sweep, SWEEP_ORDERS, VARIATION_BOUND};
pub use traces::{besov_norm, run_trace_suites, TraceEnsemble, RIGHT_INVERSE_TOL, TRACE_RATIO_CEILING};
