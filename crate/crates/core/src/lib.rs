//! Online row sampling for streaming spectral approximation.
//!
//! Rows `a₁, a₂, …` of a tall matrix `A` arrive one at a time. Each sampler
//! decides immediately and irrevocably whether to keep a row (rescaled by
//! `1/√p`), and the kept rows `Ã` satisfy
//!
//! ```text
//! (1−ε)AᵀA − δI ⪯ ÃᵀÃ ⪯ (1+ε)AᵀA + δI
//! ```
//!
//! with high probability ([`OnlineSample`], [`SlimSample`]) or always
//! ([`OnlineBss`]).
//!
//! Modules:
//!
//! * [`linalg`]: Gram bookkeeping with Sherman–Morrison inverse maintenance,
//!   eigen-solves, and the sandwich check.
//! * [`leverage`]: offline and online ridge leverage scores.
//! * [`samplers`]: the samplers behind one streaming interface.
//! * [`verify`]: certificates and audits.
//! * [`streams`]: generators and row files.
//!
//! The numerical core is generic over [`Scalar`] (`f32`/`f64`); the `*64`
//! aliases below name the double-precision instantiations.
//!
//! ```
//! use orss_core::{Accuracy, Algorithm, run_sampler, certify, gen_gaussian};
//!
//! let rows = gen_gaussian::<f64>(300, 4, 1).collect_rows().unwrap();
//! let acc = Accuracy::new(0.5, 0.1).unwrap();
//! let run = run_sampler(Algorithm::Bss, 4, &rows, acc, 7).unwrap();
//! let cert = certify(4, &rows, &run.kept, acc.eps, acc.delta).unwrap();
//! assert!(cert.passed);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN

pub mod error;
pub mod leverage;
pub mod linalg;
pub mod samplers;
mod scalar;
pub mod streams;
pub mod verify;

pub use error::{Error, Result};
pub use leverage::{
    offline_ridge_scores, online_ridge_scores, online_ridge_scores_inclusive, score_sum_bound,
    OnlineScorer, ScoreTrace,
};
pub use linalg::{psd_sandwich_margins, PdInverse, PsdState, RankOneUpdate, SandwichMargins};
pub use samplers::{
    drive, run_sampler, Accuracy, Algorithm, BatchEstimate, OfflineSampler, OnlineBss,
    OnlineSample, SampleDecision, SampleRun, SamplerStats, SlimSample, StreamingSampler,
};
pub use scalar::Scalar;
pub use streams::{
    gen_doubling_cliques, gen_gaussian, permute_stream, read_rows, read_weighted_rows, write_rows,
    write_weighted_rows, GraphStreamSpec, RowFormat, RowSink, RowStream, RowWriter, WeightedRow,
};
pub use verify::{
    audit_score_bound, certify, expected_count_bss, BoundAudit, Certificate, CountEstimate,
};

pub type PsdState64 = PsdState<f64>;
pub type PsdState32 = PsdState<f32>;
pub type ScoreTrace64 = ScoreTrace<f64>;
pub type OnlineSample64 = OnlineSample<f64>;
pub type SlimSample64 = SlimSample<f64>;
pub type OnlineBss64 = OnlineBss<f64>;
pub type OnlineSample32 = OnlineSample<f32>;
pub type OnlineBss32 = OnlineBss<f32>;
pub type Certificate64 = Certificate<f64>;
pub type WeightedRow64 = WeightedRow<f64>;
pub type RowStream64<'a> = RowStream<'a, f64>;
