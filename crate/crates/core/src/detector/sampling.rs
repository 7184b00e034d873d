use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use super::{check_moment_order, dark_factor, moment_weight, serialize_rows, ClickDetectorConfig, ClickDistribution};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Histogram of `n_total` simulated click events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClickSampleSet {
    #[serde(serialize_with = "serialize_rows")]
    counts: DMatrix<u64>,
    n_total: u64,
    seed: u64,
}

impl ClickSampleSet {
    /// Wraps explicit counts.
    pub fn from_counts(counts: DMatrix<u64>, seed: u64) -> Self {
        let n_total = counts.iter().sum();
        Self {
            counts,
            n_total,
            seed,
        }
    }

    pub fn counts(&self) -> &DMatrix<u64> {
        &self.counts
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Multinomial draw of `n` events from the click distribution.
///
/// Cells are visited in row-major order and each receives a binomial share
/// of the events not yet assigned. The generator for cell `c` is ChaCha8
/// seeded with `seed` on stream `c`, so results depend only on the seed.
pub fn sample_clicks(clicks: &ClickDistribution, n: u64, seed: u64) -> Result<ClickSampleSet> {
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    let probs = clicks.probabilities();
    let total = clicks.total();
    if (total - 1.0).abs() > Tolerances::DEFAULT.click_sum {
        return Err(Error::NotNormalized(total));
    }
    let (rows, cols) = probs.shape();
    let mut counts = DMatrix::<u64>::zeros(rows, cols);
    let mut remaining = n;
    let mut mass = 1.0;
    let cells = rows * cols;
    for cell in 0..cells {
        let (i, j) = (cell / cols, cell % cols);
        if remaining == 0 {
            break;
        }
        if cell + 1 == cells {
            counts[(i, j)] = remaining;
            break;
        }
        let p = probs[(i, j)].max(0.0);
        let share = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 1.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(cell as u64);
        let k = Binomial::new(remaining, share)
            .expect("share lies in [0, 1]")
            .sample(&mut rng);
        counts[(i, j)] = k;
        remaining -= k;
        mass -= p;
    }
    Ok(ClickSampleSet {
        counts,
        n_total: n,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    /// Sample standard deviation of the per-event weight over `sqrt(n)`.
    pub std_error: f64,
}

/// Plug-in estimate of `mu_{k,l}` from simulated or measured click counts.
pub fn estimate_mgf_from_samples(
    samples: &ClickSampleSet,
    k: usize,
    l: usize,
    cfg_a: &ClickDetectorConfig,
    cfg_b: &ClickDetectorConfig,
    correct_dark: bool,
) -> Result<MomentEstimate> {
    let (da, db) = (cfg_a.d, cfg_b.d);
    if samples.counts.shape() != (da + 1, db + 1) {
        return Err(Error::Domain("sample shape does not match the detectors".into()));
    }
    check_moment_order(k, l, da, db)?;
    let n = samples.n_total;
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    let nf = n as f64;
    let mut mean = 0.0;
    for i in 0..=da {
        for j in 0..=db {
            mean += samples.counts[(i, j)] as f64 * moment_weight(i, j, k, l, da, db);
        }
    }
    mean /= nf;
    let mut ss = 0.0;
    for i in 0..=da {
        for j in 0..=db {
            let d = moment_weight(i, j, k, l, da, db) - mean;
            ss += samples.counts[(i, j)] as f64 * d * d;
        }
    }
    let std_error = if n > 1 { (ss / (nf - 1.0) / nf).sqrt() } else { 0.0 };
    let scale = if correct_dark { dark_factor(k, l, cfg_a, cfg_b) } else { 1.0 };
    Ok(MomentEstimate {
        value: mean / scale,
        std_error: std_error / scale,
    })
}
