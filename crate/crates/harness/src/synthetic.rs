//! Seeded synthetic datasets.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::str::FromStr;

use vecsum::linalg::random_orthogonal;
use vecsum::DenseMatrix;

use crate::error::HarnessError;

/// Fraction of heavy-tail points scaled up.
pub const HEAVY_FRACTION: f64 = 0.01;
pub const HEAVY_SCALE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// i.i.d. standard normal entries.
    Gaussian,
    /// Gaussian with 1% of the rows multiplied by 100.
    HeavyTail,
    /// Rank-`rank` Gaussian factor model plus isotropic noise.
    LowRankNoise,
}

/// A generator description, written `kind:n=..,d=..[,seed=..][,rank=..][,noise=..]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub rank: usize,
    pub noise: f64,
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, n: usize, d: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            d,
            seed,
            rank: 3,
            noise: 0.1,
        }
    }

    pub fn generate(&self) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
        match self.kind {
            SyntheticKind::Gaussian => DenseMatrix::from_fn(self.n, self.d, |_, _| normal()),
            SyntheticKind::HeavyTail => {
                let mut m = DenseMatrix::from_fn(self.n, self.d, |_, _| normal());
                let count = ((self.n as f64 * HEAVY_FRACTION).ceil() as usize).min(self.n);
                let mut pick_rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
                for i in sample(&mut pick_rng, self.n, count) {
                    m.row_mut(i).iter_mut().for_each(|x| *x *= HEAVY_SCALE);
                }
                m
            }
            SyntheticKind::LowRankNoise => {
                let rank = self.rank.clamp(1, self.d);
                let basis = random_orthogonal(self.d, rank, self.seed.wrapping_add(1))
                    .expect("rank is at most d");
                let mut m = DenseMatrix::from_fn(self.n, self.d, |_, _| self.noise * normal());
                for i in 0..self.n {
                    for t in 0..rank {
                        let z = normal() * (rank - t) as f64;
                        for j in 0..self.d {
                            let v = m.get(i, j) + z * basis.get(j, t);
                            m.set(i, j, v);
                        }
                    }
                }
                m
            }
        }
    }
}

impl FromStr for SyntheticSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: String| HarnessError::Config(format!("synthetic spec `{s}`: {msg}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kind = match kind {
            "gaussian" => SyntheticKind::Gaussian,
            "heavy-tail" => SyntheticKind::HeavyTail,
            "low-rank+noise" | "low-rank" => SyntheticKind::LowRankNoise,
            other => return Err(bad(format!("unknown generator `{other}`"))),
        };
        let mut spec = SyntheticSpec::new(kind, 0, 0, 0);
        for pair in rest.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| bad(format!("`{pair}` is not key=value")))?;
            let int = || value.parse::<usize>().map_err(|_| bad(format!("`{value}` is not an integer")));
            match key {
                "n" => spec.n = int()?,
                "d" => spec.d = int()?,
                "rank" => spec.rank = int()?,
                "seed" => spec.seed = value.parse().map_err(|_| bad(format!("`{value}` is not a seed")))?,
                "noise" => spec.noise = value.parse().map_err(|_| bad(format!("`{value}` is not a number")))?,
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        if spec.n == 0 || spec.d == 0 {
            return Err(bad("n and d must be positive".into()));
        }
        Ok(spec)
    }
}
