//! Card ranking from query-reformulation feedback.
//!
//! Mobile search results are organized as *cards* (news, weather, local, ...)
//! and the strongest page-level engagement signal is whether the user
//! immediately reformulated the query. This crate turns that page-level
//! signal into per-card training labels, trains gradient-boosted-tree
//! ranking models on them, and evaluates the resulting rankers with an
//! exact-match list protocol.
//!
//! The pipeline, end to end:
//!
//! 1. [`qpv`] — query-page-view (QPV) log model: parsing, validation, and
//!    session chaining into (reformulated, satisfied) QPV pairs.
//! 2. [`labeling`] — label derivation strategies: naive/discounted/movement
//!    pointwise, pairwise and its pointwise approximation, listwise, plus
//!    CTR and imported human judgments as baselines.
//! 3. [`ltl`] — "learning to label": a per-query logistic model that
//!    distributes the page outcome onto the shown cards as credits.
//! 4. [`gbt`] — gradient boosted regression trees (squared loss, best-first
//!    leaf growth), the ranking model family.
//! 5. [`ranking`] — feature extraction from logs, training-set assembly per
//!    labeling scenario, and pointwise/listwise ranked-list prediction.
//! 6. [`eval`] — exact-match TPR/TNR/F-measure and k-fold cross-validation
//!    over any strategy.
//! 7. [`synth`] — a synthetic log generator with known latent relevance,
//!    used as ground-truth oracle in tests and experiments.
//!
//! The `cardrank` binary wires these into batch subcommands; the `examples/`
//! directory has one runnable program per capability.

pub mod error;
pub mod eval;
pub mod gbt;
pub mod labeling;
pub mod ltl;
pub mod qpv;
pub mod ranking;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
