use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use ndarray::{Array2, ArrayView1};
use orss_core::linalg::{add_outer, gram, spectral_norm_sq};
use orss_core::streams::NullSink;
use orss_core::verify::{bss_count_comparator, row_count_comparator};
use orss_core::{
    certify, drive, gen_doubling_cliques, gen_gaussian, permute_stream, read_rows,
    read_weighted_rows, run_sampler, Accuracy, Algorithm, Error, GraphStreamSpec, OfflineSampler,
    OnlineBss, OnlineSample, Result, RowFormat, RowSink, RowStream, RowWriter, SamplerStats,
    SlimSample, StreamingSampler, WeightedRow,
};
use rayon::prelude::*;

use crate::args::{self, AlgoArg, BenchArgs, GenerateArgs, Generator, SampleArgs, VerifyArgs};

fn accuracy(a: &args::Accuracy) -> Result<Accuracy<f64>> {
    Accuracy::new(a.eps, a.delta)
}

fn required<V: Copy>(v: Option<V>, flag: &str, generator: &str) -> Result<V> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required for --gen {generator}")))
}

fn write_stream(path: &Path, stream: RowStream<'_, f64>) -> Result<usize> {
    let mut out = RowWriter::create(path, RowFormat::from_path(path), stream.dim(), false)?;
    for row in stream {
        out.push(&row?, None)?;
    }
    let n = out.rows_written();
    out.finish()?;
    Ok(n)
}

pub fn generate(a: &GenerateArgs) -> Result<ExitCode> {
    let stream = match a.generator {
        Generator::Gaussian => {
            let n = required(a.n, "n", "gaussian")?;
            let d = required(a.d, "d", "gaussian")?;
            if d == 0 {
                return Err(Error::InvalidParameter("d must be at least 1".into()));
            }
            gen_gaussian(n, d, a.seed)
        }
        Generator::Cliques => {
            let d = required(a.d, "d", "cliques")?;
            let copies = required(a.copies, "N", "cliques")?;
            let acc = accuracy(&a.accuracy)?;
            gen_doubling_cliques(GraphStreamSpec::lower_bound(d, copies, acc.eps, acc.delta))?
        }
        Generator::Permute => {
            let input = a.input.as_deref().ok_or_else(|| {
                Error::InvalidParameter("--in is required for --gen permute".into())
            })?;
            permute_stream(read_rows(input, RowFormat::from_path(input))?, a.seed)?
        }
    };
    let n = write_stream(&a.out, stream)?;
    eprintln!("wrote {n} rows to {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

/// Kept-row destination for `sample`: a weighted file or nothing.
enum Sink {
    File(RowWriter<f64>),
    Null(NullSink),
}

impl RowSink<f64> for Sink {
    fn accept(&mut self, row: WeightedRow<f64>) -> Result<()> {
        match self {
            Sink::File(w) => w.push(&row.row, Some(row.weight)),
            Sink::Null(n) => n.accept(row),
        }
    }
}

/// Block-scored Online-Sample pass.
fn drive_batched(
    sampler: &mut OnlineSample<f64>,
    rows: RowStream<'_, f64>,
    batch: usize,
    sketch_dim: usize,
    sink: &mut Sink,
) -> Result<SamplerStats> {
    let start = Instant::now();
    let mut sum_scores = 0.0;
    let mut peak = 0;
    let mut block = Vec::with_capacity(batch);
    let mut rows = rows.peekable();
    while rows.peek().is_some() {
        block.clear();
        while block.len() < batch {
            match rows.next() {
                Some(row) => block.push(row?),
                None => break,
            }
        }
        for (row, dec) in block.iter().zip(sampler.step_block(&block, sketch_dim)?) {
            sum_scores += dec.score_used;
            if let Some(scaled) = dec.rescaled(row) {
                sink.accept(WeightedRow {
                    row: scaled,
                    weight: dec.rescale,
                })?;
            }
        }
        peak = peak.max(sampler.working_rows() + block.len());
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

/// Gram of a row file, accumulated in one streaming pass.
fn streamed_gram(path: &Path) -> Result<Array2<f64>> {
    let stream = read_rows::<f64>(path, RowFormat::from_path(path))?;
    let mut g = Array2::zeros((stream.dim(), stream.dim()));
    for row in stream {
        add_outer(&mut g, ArrayView1::from(&row?), 1.0);
    }
    Ok(g)
}

pub fn sample(a: &SampleArgs) -> Result<ExitCode> {
    let acc = accuracy(&a.accuracy)?;
    let format = RowFormat::from_path(&a.input);
    let rows = read_rows::<f64>(&a.input, format)?;
    let d = rows.dim();
    let mut sink = match &a.out {
        Some(path) => Sink::File(RowWriter::create(
            path,
            RowFormat::from_path(path),
            d,
            true,
        )?),
        None => Sink::Null(NullSink),
    };

    let stats = match (a.algo, a.batch) {
        (AlgoArg::Online, Some(batch)) => {
            if batch == 0 {
                return Err(Error::InvalidParameter("--batch must be at least 1".into()));
            }
            let mut s = OnlineSample::new(d, acc, a.seed)?;
            drive_batched(&mut s, rows, batch, a.sketch_dim.unwrap_or(d), &mut sink)?
        }
        (_, Some(_)) => {
            return Err(Error::InvalidParameter(
                "--batch is only supported with --algo online".into(),
            ))
        }
        (algo, None) => {
            let mut sampler: Box<dyn StreamingSampler<f64>> = match algo {
                AlgoArg::Online => Box::new(OnlineSample::new(d, acc, a.seed)?),
                AlgoArg::Slim => Box::new(SlimSample::new(d, acc, a.seed)?),
                AlgoArg::Bss => Box::new(OnlineBss::new(d, acc, a.seed)?),
                AlgoArg::Offline => {
                    Box::new(OfflineSampler::new(streamed_gram(&a.input)?, acc, a.seed)?)
                }
            };
            drive(sampler.as_mut(), rows, &mut sink)?
        }
    };
    if let Sink::File(w) = sink {
        w.finish()?;
    }

    println!(
        "{}",
        serde_json::to_string(&stats).expect("stats serialize")
    );
    eprintln!(
        "{}: kept {} of {} rows (d = {}), score sum {:.3}, peak {} rows, {:.3}s",
        Algorithm::from(a.algo),
        stats.kept,
        stats.n,
        stats.d,
        stats.sum_scores,
        stats.peak_memory_rows,
        stats.seconds
    );
    Ok(ExitCode::SUCCESS)
}

pub fn verify(a: &VerifyArgs) -> Result<ExitCode> {
    let rows = read_rows::<f64>(&a.input, RowFormat::from_path(&a.input))?;
    let d = rows.dim();
    let rows = rows.collect_rows()?;
    let kept = read_weighted_rows::<f64>(&a.kept, RowFormat::from_path(&a.kept))?;
    if kept.dim != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: kept.dim,
        });
    }
    let cert = certify(d, &rows, &kept.rows, a.accuracy.eps, a.accuracy.delta)?;
    println!(
        "{}",
        serde_json::to_string(&cert).expect("certificate serialize")
    );
    eprintln!(
        "{}: whitened eigenvalues in [{:.6}, {:.6}], allowed [{:.6}, {:.6}]",
        if cert.passed { "pass" } else { "FAIL" },
        cert.min_eig,
        cert.max_eig,
        1.0 - cert.eps,
        1.0 + cert.eps
    );
    Ok(if cert.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Debug)]
struct BenchRow {
    seed: u64,
    algorithm: Algorithm,
    kept: usize,
    passed: bool,
    sum_scores: f64,
    bound: f64,
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("ORSS_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            Error::InvalidParameter(format!("ORSS_THREADS must be an integer, got `{v}`"))
        })?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

pub fn bench(a: &BenchArgs) -> Result<ExitCode> {
    if a.trials == 0 {
        return Err(Error::InvalidParameter(
            "--trials must be at least 1".into(),
        ));
    }
    let acc = accuracy(&a.accuracy)?;
    let algorithm = Algorithm::from(a.algo);
    let stream = read_rows::<f64>(&a.input, RowFormat::from_path(&a.input))?;
    let d = stream.dim();
    let rows = stream.collect_rows()?;
    if rows.is_empty() {
        return Err(Error::Empty("bench input has no rows"));
    }
    // Expected kept-count comparator for the algorithm.
    let bound = match algorithm {
        Algorithm::Bss => bss_count_comparator(d, &rows, acc)?,
        _ => row_count_comparator(
            d,
            spectral_norm_sq(gram(d, &rows)?.view())?,
            acc.eps,
            acc.delta,
        ),
    };

    let results: Vec<Result<BenchRow>> = thread_pool()?.install(|| {
        (0..a.trials as u64)
            .into_par_iter()
            .map(|t| {
                let seed = a.seed + t;
                let run = run_sampler(algorithm, d, &rows, acc, seed)?;
                let cert = certify(d, &rows, &run.kept, acc.eps, acc.delta)?;
                Ok(BenchRow {
                    seed,
                    algorithm,
                    kept: run.stats.kept,
                    passed: cert.passed,
                    sum_scores: run.stats.sum_scores,
                    bound,
                })
            })
            .collect()
    });

    let mut passes = 0;
    let mut kept = 0;
    println!("seed,algorithm,kept,passed,sum_scores,bound");
    for r in results {
        let r = r?;
        passes += r.passed as usize;
        kept += r.kept;
        println!(
            "{},{},{},{},{},{}",
            r.seed, r.algorithm, r.kept, r.passed, r.sum_scores, r.bound
        );
    }
    eprintln!(
        "{algorithm}: {passes}/{} certified, mean kept {:.1}, comparator {bound:.1}",
        a.trials,
        kept as f64 / a.trials as f64
    );
    Ok(ExitCode::SUCCESS)
}
