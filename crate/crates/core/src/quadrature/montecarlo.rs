//! Chunked, reproducible Monte Carlo.
//!
//! Samples are drawn in fixed-size chunks; chunk `c` of stream `s` always
//! uses the same ChaCha substream, and chunk moments are merged in chunk
//! order. Estimates are therefore bitwise identical whether chunks run on
//! one thread or many.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::geometry::Point;
use crate::par;

pub(crate) const CHUNK: u64 = 4096;
const PILOT_CHUNKS: u64 = 2;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic RNG for `(seed, stream, chunk)`.
pub(crate) fn substream(seed: u64, stream: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(stream)));
    rng.set_stream(chunk);
    rng
}

/// Running mean and centred second moment (Chan et al. merge).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        Moments { n, mean, m2 }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

fn chunk_range<S>(first: u64, last: u64, total: u64, seed: u64, stream: u64, parallel: bool, sampler: &S) -> Moments
where
    S: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let parts = par::map_range((last - first) as usize, parallel, |j| {
        let c = first + j as u64;
        let mut rng = substream(seed, stream, c);
        let count = CHUNK.min(total - c * CHUNK);
        let mut m = Moments::default();
        for _ in 0..count {
            m.push(sampler(&mut rng));
        }
        m
    });
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

/// One stratum of a stratified estimate.
pub(crate) struct Stratum<'a> {
    pub weight: f64,
    pub sampler: Box<dyn Fn(&mut ChaCha8Rng) -> f64 + Sync + 'a>,
}

pub(crate) struct McOutcome {
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
    pub samples: u64,
}

/// Stratified estimate of `sum_i weight_i E[sampler_i]` with allocation
/// proportional to weight. A pilot run sizes the main run so that three
/// standard errors reach `target`, capped at `max_samples` in total.
pub(crate) fn stratified(strata: &[Stratum<'_>], target: f64, max_samples: u64, seed: u64, stream_base: u64, parallel: bool) -> McOutcome {
    let total_weight: f64 = strata.iter().map(|s| s.weight).sum();
    let pilot: Vec<Moments> = par::map_range(strata.len(), parallel, |i| {
        let st = &strata[i];
        let n = PILOT_CHUNKS * CHUNK;
        chunk_range(0, PILOT_CHUNKS, n, seed, stream_base + i as u64, false, &st.sampler)
    });
    // Proportional allocation: Var = sum w_i sigma_i^2 / N (weights normalized).
    let pooled: f64 = strata
        .iter()
        .zip(&pilot)
        .map(|(s, m)| s.weight / total_weight * m.variance())
        .sum();
    let wanted = (9.0 * pooled / (target * target)).ceil();
    let min_total = PILOT_CHUNKS * CHUNK * strata.len() as u64;
    let total = if wanted.is_finite() { (wanted as u64).clamp(min_total, max_samples.max(min_total)) } else { max_samples };

    let finals: Vec<Moments> = par::map_range(strata.len(), parallel, |i| {
        let st = &strata[i];
        let share = ((total as f64) * st.weight / total_weight).ceil() as u64;
        let n = share.max(PILOT_CHUNKS * CHUNK);
        let chunks = n.div_ceil(CHUNK);
        if chunks <= PILOT_CHUNKS {
            return pilot[i];
        }
        let extra = chunk_range(PILOT_CHUNKS, chunks, chunks * CHUNK, seed, stream_base + i as u64, parallel, &st.sampler);
        pilot[i].merge(extra)
    });
    let mut mean = 0.0;
    let mut var = 0.0;
    let mut samples = 0;
    for (s, m) in strata.iter().zip(&finals) {
        let w = s.weight / total_weight;
        mean += w * m.mean;
        var += w * w * m.variance() / m.n as f64;
        samples += m.n;
    }
    McOutcome { mean, std_error: var.sqrt(), samples }
}

/// Uniform point in the simplex with the given vertices.
pub(crate) fn sample_simplex<R: Rng>(rng: &mut R, vertices: &[Point]) -> Point {
    let mut x = Point::zeros(vertices[0].len());
    let e: Vec<f64> = vertices.iter().map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = e.iter().sum();
    for (v, w) in vertices.iter().zip(&e) {
        x.axpy(w / total, v, 1.0);
    }
    x
}

/// Uniform unit vector in R^n via normalized Gaussians.
pub(crate) fn sample_direction<R: Rng>(rng: &mut R, n: usize) -> Point {
    loop {
        let g = Point::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = g.norm();
        if norm > 1e-12 {
            return g / norm;
        }
    }
}
