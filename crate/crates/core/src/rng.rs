//! Reproducible Gaussian streams.
//!
//! Every stream is addressed by `(seed, stream_id)` and split into chunks of
//! [`CHUNK`] samples; chunk `c` starts at a fixed ChaCha word offset, so a
//! chunk can be regenerated independently of the others. Parallel reductions
//! run one task per chunk and combine the partial results in chunk order,
//! which makes every estimator independent of the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per chunk.
pub const CHUNK: usize = 4096;

/// Word offset between chunk starts (far more than any chunk consumes).
const CHUNK_WORDS_LOG2: u32 = 36;

/// Named substreams derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Substream {
    /// Left-hand sides of identity checks, and the shared stream of coupled comparisons.
    ConeA,
    /// Right-hand sides of identity checks; independent of `ConeA`.
    ConeB,
    /// Random starting directions for the angular-distance ascent.
    Ascent,
    /// Random test points (projection suites, stability checks).
    Points,
    /// Free-form numbered substream.
    Indexed(u32),
}

impl Substream {
    pub fn id(self) -> u64 {
        match self {
            Substream::ConeA => 1,
            Substream::ConeB => 2,
            Substream::Ascent => 3,
            Substream::Points => 4,
            Substream::Indexed(i) => 1000 + u64::from(i),
        }
    }
}

/// How many samples to draw and from which stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    pub n: u64,
    pub seed: u64,
    pub stream: u64,
}

impl Sampling {
    pub fn new(n: u64, seed: u64, stream: Substream) -> Self {
        Sampling {
            n,
            seed,
            stream: stream.id(),
        }
    }

    pub fn chunks(&self) -> usize {
        (self.n as usize).div_ceil(CHUNK)
    }
}

fn chunk_rng(seed: u64, stream_id: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng.set_word_pos(u128::from(chunk) << CHUNK_WORDS_LOG2);
    rng
}

/// Sequential view of a stream; yields exactly the vectors the chunked
/// engine hands to its workers, in order.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    d: usize,
    seed: u64,
    stream_id: u64,
    chunk: u64,
    in_chunk: usize,
    rng: ChaCha8Rng,
}

impl GaussianStream {
    pub fn new(d: usize, seed: u64, stream_id: u64) -> Self {
        Self::at_chunk(d, seed, stream_id, 0)
    }

    fn at_chunk(d: usize, seed: u64, stream_id: u64, chunk: u64) -> Self {
        GaussianStream {
            d,
            seed,
            stream_id,
            chunk,
            in_chunk: 0,
            rng: chunk_rng(seed, stream_id, chunk),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Writes the next vector into `out` (length `d`).
    pub fn fill(&mut self, out: &mut [f64]) {
        if self.in_chunk == CHUNK {
            *self = Self::at_chunk(self.d, self.seed, self.stream_id, self.chunk + 1);
        }
        for v in out.iter_mut() {
            *v = StandardNormal.sample(&mut self.rng);
        }
        self.in_chunk += 1;
    }
}

impl Iterator for GaussianStream {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let mut v = vec![0.0; self.d];
        self.fill(&mut v);
        Some(v)
    }
}

/// Reproducible i.i.d. `N(0, I_d)` vectors for `(seed, stream_id)`.
pub fn gaussian_stream(d: usize, seed: u64, stream_id: u64) -> GaussianStream {
    GaussianStream::new(d, seed, stream_id)
}

/// Samples of one chunk.
#[derive(Debug)]
pub struct ChunkSamples {
    stream: GaussianStream,
    /// Global index of the first sample in this chunk.
    pub start: u64,
    /// Number of samples in this chunk.
    pub len: usize,
}

impl ChunkSamples {
    pub fn fill(&mut self, out: &mut [f64]) {
        self.stream.fill(out);
    }
}

/// Runs `f` once per chunk (in parallel) and returns the results in chunk order.
pub fn map_chunks<T, F>(d: usize, sampling: Sampling, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(ChunkSamples) -> T + Sync + Send,
{
    let n = sampling.n;
    (0..sampling.chunks())
        .into_par_iter()
        .map(|c| {
            let start = (c * CHUNK) as u64;
            let len = ((n - start) as usize).min(CHUNK);
            f(ChunkSamples {
                stream: GaussianStream::at_chunk(d, sampling.seed, sampling.stream, c as u64),
                start,
                len,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream_is_identical() {
        let a: Vec<Vec<f64>> = gaussian_stream(3, 9, 1).take(100).collect();
        let b: Vec<Vec<f64>> = gaussian_stream(3, 9, 1).take(100).collect();
        assert_eq!(a, b);
        let c: Vec<Vec<f64>> = gaussian_stream(3, 9, 2).take(100).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn chunked_engine_matches_sequential_stream() {
        let d = 2;
        let s = Sampling {
            n: (2 * CHUNK + 17) as u64,
            seed: 5,
            stream: 7,
        };
        let parts = map_chunks(d, s, |mut ch| {
            let mut out = Vec::with_capacity(ch.len * d);
            let mut buf = vec![0.0; d];
            for _ in 0..ch.len {
                ch.fill(&mut buf);
                out.extend_from_slice(&buf);
            }
            out
        });
        let flat: Vec<f64> = parts.concat();
        let seq: Vec<f64> = gaussian_stream(d, 5, 7)
            .take(s.n as usize)
            .flatten()
            .collect();
        assert_eq!(flat, seq);
    }

    #[test]
    fn moments_at_one_million() {
        let n = 1_000_000;
        let d = 3;
        let s = Sampling {
            n,
            seed: 1,
            stream: 1,
        };
        let parts = map_chunks(d, s, |mut ch| {
            let mut sum = vec![0.0; d];
            let mut sq = vec![0.0; d];
            let mut buf = vec![0.0; d];
            for _ in 0..ch.len {
                ch.fill(&mut buf);
                for i in 0..d {
                    sum[i] += buf[i];
                    sq[i] += buf[i] * buf[i];
                }
            }
            (sum, sq)
        });
        for i in 0..d {
            let m: f64 = parts.iter().map(|p| p.0[i]).sum::<f64>() / n as f64;
            let v: f64 = parts.iter().map(|p| p.1[i]).sum::<f64>() / n as f64 - m * m;
            assert!(m.abs() <= 4.0 / (n as f64).sqrt(), "mean {m}");
            assert!((v - 1.0).abs() <= 0.01, "var {v}");
        }
    }
}
