//! Online row samplers.
//!
//! Every sampler sees rows one at a time and makes an irrevocable decision
//! per row: keep it (rescaled by `1/√p`) with probability `p`, or drop it.
//! The samplers differ only in how `p` is computed:
//!
//! * [`OnlineSample`] scores each row against the rows it has kept so far.
//! * [`SlimSample`] takes its scores from an independent, coarser
//!   `OnlineSample` run and never looks at its own output.
//! * [`OnlineBss`] uses two shifting barriers and always returns a valid
//!   approximation, trading memory for the missing `log d` factor.
//! * [`OfflineSampler`] is the two-pass baseline using exact ridge scores.

mod batch;
mod bss;
mod offline;
mod online;
mod slim;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use batch::BatchEstimate;
pub use bss::OnlineBss;
pub use offline::OfflineSampler;
pub use online::OnlineSample;
pub use slim::SlimSample;

use crate::error::{invalid, Error, Result};
use crate::linalg::gram;
use crate::scalar::Scalar;
use crate::streams::{RowSink, WeightedRow};

/// Outcome of feeding one row to a sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDecision<T> {
    pub kept: bool,
    /// Keep probability `p ∈ [0, 1]`. Zero only for rows that cannot matter
    /// (zero rows).
    pub probability: T,
    /// `1/√p` when kept, otherwise 0.
    pub rescale: T,
    /// The score or barrier quantity `p` was derived from.
    pub score_used: T,
}

impl<T: Scalar> SampleDecision<T> {
    /// Draws the keep/drop coin for probability `p`. Certain outcomes
    /// (`p = 0` or `p = 1`) consume no randomness.
    pub(crate) fn draw(probability: T, score_used: T, rng: &mut ChaCha8Rng) -> Self {
        let kept = if probability <= T::zero() {
            false
        } else if probability >= T::one() {
            true
        } else {
            rng.random::<f64>() < probability.as_f64()
        };
        Self {
            kept,
            probability,
            rescale: if kept {
                T::one() / probability.sqrt()
            } else {
                T::zero()
            },
            score_used,
        }
    }

    /// The row as it enters the sample, `row / √p`.
    pub fn rescaled(&self, row: &[T]) -> Option<Vec<T>> {
        self.kept
            .then(|| row.iter().map(|&x| x * self.rescale).collect())
    }
}

/// Accuracy targets shared by all samplers: multiplicative `eps ∈ (0, 1)` and
/// additive `delta > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy<T> {
    pub eps: T,
    pub delta: T,
}

impl<T: Scalar> Accuracy<T> {
    pub fn new(eps: T, delta: T) -> Result<Self> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
        }
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(invalid(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { eps, delta })
    }

    /// `λ = δ/ε`.
    pub fn lambda(&self) -> T {
        self.delta / self.eps
    }

    /// Oversampling constant `c = 8 ln d / ε²`.
    pub fn oversampling(&self, dim: usize) -> T {
        T::lit(8.0) * crate::scalar::log_dim::<T>(dim) / (self.eps * self.eps)
    }
}

/// Common streaming interface: construct, feed rows, read the counters.
pub trait StreamingSampler<T: Scalar> {
    fn dim(&self) -> usize;

    fn step(&mut self, row: &[T]) -> Result<SampleDecision<T>>;

    /// Rows fed so far.
    fn rows_seen(&self) -> usize;

    /// Rows emitted so far.
    fn kept_count(&self) -> usize;

    /// Size of the working state, counted in `d`-vectors.
    fn working_rows(&self) -> usize;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Online,
    Slim,
    Bss,
    Offline,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Online,
        Algorithm::Slim,
        Algorithm::Bss,
        Algorithm::Offline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Online => "online",
            Algorithm::Slim => "slim",
            Algorithm::Bss => "bss",
            Algorithm::Offline => "offline",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| invalid(format!("unknown algorithm `{s}`")))
    }
}

/// Summary counters of one sampling pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerStats {
    pub kept: usize,
    pub n: usize,
    pub d: usize,
    pub sum_scores: f64,
    pub peak_memory_rows: usize,
    pub seconds: f64,
}

/// Feeds a fallible row stream through `sampler`, forwarding kept rows
/// (already rescaled) to `sink` as they are decided.
pub fn drive<T, S, K, I>(sampler: &mut S, rows: I, sink: &mut K) -> Result<SamplerStats>
where
    T: Scalar,
    S: StreamingSampler<T> + ?Sized,
    K: RowSink<T> + ?Sized,
    I: IntoIterator<Item = Result<Vec<T>>>,
{
    let start = Instant::now();
    let mut sum_scores = 0.0;
    let mut peak = sampler.working_rows();
    for row in rows {
        let row = row?;
        let decision = sampler.step(&row)?;
        sum_scores += decision.score_used.as_f64();
        if let Some(scaled) = decision.rescaled(&row) {
            sink.accept(WeightedRow {
                row: scaled,
                weight: decision.rescale,
            })?;
        }
        peak = peak.max(sampler.working_rows());
    }
    Ok(SamplerStats {
        kept: sampler.kept_count(),
        n: sampler.rows_seen(),
        d: sampler.dim(),
        sum_scores,
        peak_memory_rows: peak,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Kept rows of a buffered run plus its counters.
#[derive(Debug, Clone)]
pub struct SampleRun<T> {
    pub kept: Vec<WeightedRow<T>>,
    pub stats: SamplerStats,
}

/// Builds the sampler for `algorithm`. The offline baseline needs the full
/// Gram up front, so it is computed from `rows` here.
pub fn build_sampler<T, R>(
    algorithm: Algorithm,
    dim: usize,
    rows: &[R],
    accuracy: Accuracy<T>,
    seed: u64,
) -> Result<Box<dyn StreamingSampler<T> + Send>>
where
    T: Scalar,
    R: AsRef<[T]>,
{
    Ok(match algorithm {
        Algorithm::Online => Box::new(OnlineSample::new(dim, accuracy, seed)?),
        Algorithm::Slim => Box::new(SlimSample::new(dim, accuracy, seed)?),
        Algorithm::Bss => Box::new(OnlineBss::new(dim, accuracy, seed)?),
        Algorithm::Offline => Box::new(OfflineSampler::new(gram(dim, rows)?, accuracy, seed)?),
    })
}

/// Runs `algorithm` over an in-memory matrix and buffers the kept rows.
pub fn run_sampler<T, R>(
    algorithm: Algorithm,
    dim: usize,
    rows: &[R],
    accuracy: Accuracy<T>,
    seed: u64,
) -> Result<SampleRun<T>>
where
    T: Scalar,
    R: AsRef<[T]>,
{
    let mut sampler = build_sampler(algorithm, dim, rows, accuracy, seed)?;
    let mut kept = Vec::new();
    let stats = drive(
        sampler.as_mut(),
        rows.iter().map(|r| Ok(r.as_ref().to_vec())),
        &mut kept,
    )?;
    Ok(SampleRun { kept, stats })
}

/// Independent ChaCha streams for the sub-generators of one sampler.
pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
