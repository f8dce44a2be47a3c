//! Row streams: generators, permutation, and file formats.

mod io;

pub use io::{
    read_rows, read_weighted_rows, write_rows, write_weighted_rows, RowFormat, RowWriter,
    WeightedRows, BINARY_MAGIC, BINARY_VERSION,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::linalg::check_row;
use crate::scalar::Scalar;

/// An ordered, single-pass sequence of `d`-dimensional rows.
///
/// Rows are validated as they are pulled: a row of the wrong length or with a
/// non-finite entry ends the stream with an error naming its index.
pub struct RowStream<'a, T> {
    dim: usize,
    index: usize,
    rows: Box<dyn Iterator<Item = Result<Vec<T>>> + 'a>,
}

impl<'a, T: Scalar> RowStream<'a, T> {
    pub fn new(dim: usize, rows: impl Iterator<Item = Result<Vec<T>>> + 'a) -> Self {
        Self {
            dim,
            index: 0,
            rows: Box::new(rows),
        }
    }

    pub fn from_rows(dim: usize, rows: Vec<Vec<T>>) -> Self {
        Self::new(dim, rows.into_iter().map(Ok))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn collect_rows(self) -> Result<Vec<Vec<T>>> {
        self.collect()
    }
}

impl<T: Scalar> Iterator for RowStream<'_, T> {
    type Item = Result<Vec<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        let item = self.rows.next()?;
        let index = self.index;
        self.index += 1;
        Some(item.and_then(|row| {
            check_row(&row, self.dim, index)?;
            Ok(row)
        }))
    }
}

/// A kept row, already rescaled by `1/√p`, with that factor recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedRow<T> {
    pub row: Vec<T>,
    pub weight: T,
}

/// Destination for kept rows.
pub trait RowSink<T> {
    fn accept(&mut self, row: WeightedRow<T>) -> Result<()>;
}

impl<T> RowSink<T> for Vec<WeightedRow<T>> {
    fn accept(&mut self, row: WeightedRow<T>) -> Result<()> {
        self.push(row);
        Ok(())
    }
}

/// Discards everything; for runs where only the counters matter.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl<T> RowSink<T> for NullSink {
    fn accept(&mut self, _row: WeightedRow<T>) -> Result<()> {
        Ok(())
    }
}

/// `n` i.i.d. standard normal rows, a pure function of `(n, d, seed)`.
pub fn gen_gaussian<T: Scalar>(n: usize, d: usize, seed: u64) -> RowStream<'static, T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RowStream::new(
        d,
        (0..n).map(move |_| {
            Ok((0..d)
                .map(|_| T::lit(StandardNormal.sample(&mut rng)))
                .collect())
        }),
    )
}

/// The rows of the `d × d` identity.
pub fn identity_stream<T: Scalar>(d: usize) -> RowStream<'static, T> {
    RowStream::new(
        d,
        (0..d).map(move |k| {
            let mut v = vec![T::zero(); d];
            v[k] = T::one();
            Ok(v)
        }),
    )
}

/// `n` copies of the same row.
pub fn repeated_row<T: Scalar>(row: Vec<T>, n: usize) -> RowStream<'static, T> {
    let d = row.len();
    RowStream::new(d, std::iter::repeat_n(row, n).map(Ok))
}

/// A stream of `copies` weighted complete graphs on `d` vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStreamSpec<T> {
    pub d: usize,
    pub copies: usize,
    pub base_edge_weight: T,
    /// Double the edge weight with each successive copy.
    pub doubling: bool,
}

impl<T: Scalar> GraphStreamSpec<T> {
    /// The hard instance for `(ε, δ)`: edge weight `δ/(dε)`, so the first
    /// copy's Laplacian has every nonzero eigenvalue equal to `δ/ε`, with
    /// weights doubling per copy.
    pub fn lower_bound(d: usize, copies: usize, eps: T, delta: T) -> Self {
        Self {
            d,
            copies,
            base_edge_weight: delta / (T::lit(d as f64) * eps),
            doubling: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(invalid(format!(
                "complete graph needs d >= 2 vertices, got {}",
                self.d
            )));
        }
        if self.copies < 1 {
            return Err(invalid("need at least one graph copy"));
        }
        if !(self.base_edge_weight > T::zero()) || !self.base_edge_weight.is_finite() {
            return Err(invalid("edge weight must be positive and finite"));
        }
        Ok(())
    }

    pub fn edges_per_copy(&self) -> usize {
        self.d * (self.d - 1) / 2
    }

    pub fn len(&self) -> usize {
        self.copies * self.edges_per_copy()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Edge weight of copy `k` (0-based).
    pub fn copy_weight(&self, k: usize) -> T {
        if self.doubling {
            self.base_edge_weight * T::lit(2.0).powi(k as i32)
        } else {
            self.base_edge_weight
        }
    }
}

/// Incidence rows `√w·(e_u − e_v)` of each copy, edges in lexicographic
/// `u < v` order within a copy.
pub fn gen_doubling_cliques<T: Scalar>(spec: GraphStreamSpec<T>) -> Result<RowStream<'static, T>> {
    spec.validate()?;
    let d = spec.d;
    let rows = (0..spec.copies).flat_map(move |k| {
        let s = spec.copy_weight(k).sqrt();
        (0..d).flat_map(move |u| {
            ((u + 1)..d).map(move |v| {
                let mut row = vec![T::zero(); d];
                row[u] = s;
                row[v] = -s;
                Ok(row)
            })
        })
    });
    Ok(RowStream::new(d, rows))
}

/// Uniformly random reordering of a stream, deterministic per seed.
pub fn permute_stream<'a, T: Scalar>(
    stream: RowStream<'a, T>,
    seed: u64,
) -> Result<RowStream<'a, T>> {
    let dim = stream.dim();
    let mut rows = stream.collect_rows()?;
    rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(RowStream::from_rows(dim, rows))
}
