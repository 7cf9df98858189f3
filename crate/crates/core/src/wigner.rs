//! Monte Carlo for the ρ-correlated Wigner process.
//!
//! Entries follow `w(k) = ρ w(k-1) + √(1-ρ²) ξ_k`, so `E[w(k) w(m)] = ρ^{|m-k|}`, and
//! matrices are scaled by `1/√N`. The normalized trace of a product of `2m` consecutive
//! matrices converges to `ρ^m C_m(ρ²)` with `C_m` the t-Catalan polynomial.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{non_crossing_pair_partitions, t_catalan_value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryLaw {
    Gaussian,
    /// ±1 with equal probability, for both the initial entries and the innovations.
    Rademacher,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerConfig {
    /// Matrix size `N`.
    pub size: usize,
    pub rho: f64,
    /// Number of matrices in the trace product.
    pub factors: usize,
    pub trials: usize,
    pub seed: u64,
    pub entries: EntryLaw,
}

impl WignerConfig {
    pub fn new(size: usize, rho: f64, factors: usize, trials: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            size,
            rho,
            factors,
            trials,
            seed,
            entries: EntryLaw::Gaussian,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_entries(mut self, entries: EntryLaw) -> Self {
        self.entries = entries;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 2 {
            return Err(Error::Invalid(format!("matrix size must be at least 2, got {}", self.size)));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Invalid(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        if self.factors == 0 {
            return Err(Error::Invalid("the trace product needs at least one factor".into()));
        }
        if self.trials < 2 {
            return Err(Error::Invalid("at least two trials are needed for a standard error".into()));
        }
        Ok(())
    }
}

/// `n` consecutive symmetric matrices `W(1), …, W(n)` of one process realisation (unscaled).
#[derive(Clone, Debug, PartialEq)]
pub struct WignerProcessSample {
    pub matrices: Vec<DMatrix<f64>>,
}

fn draw(rng: &mut ChaCha12Rng, law: EntryLaw) -> f64 {
    match law {
        EntryLaw::Gaussian => rng.sample(StandardNormal),
        EntryLaw::Rademacher => {
            if rng.random_bool(0.5) {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// Draws one realisation, consuming `rng` matrix by matrix in row-major upper-triangular order.
pub fn sample_process_with(cfg: &WignerConfig, rng: &mut ChaCha12Rng) -> WignerProcessSample {
    let n = cfg.size;
    let innovation = (1.0 - cfg.rho * cfg.rho).max(0.0).sqrt();
    let mut matrices: Vec<DMatrix<f64>> = Vec::with_capacity(cfg.factors);
    for k in 0..cfg.factors {
        let mut w = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = if k == 0 {
                    draw(rng, cfg.entries)
                } else if innovation == 0.0 {
                    matrices[k - 1][(i, j)]
                } else {
                    cfg.rho * matrices[k - 1][(i, j)] + innovation * draw(rng, cfg.entries)
                };
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
        matrices.push(w);
    }
    WignerProcessSample { matrices }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// The realisation used by trial 0 of [`monte_carlo`].
pub fn sample_process(cfg: &WignerConfig) -> Result<WignerProcessSample> {
    cfg.validate()?;
    Ok(sample_process_with(cfg, &mut trial_rng(cfg.seed, 0)))
}

/// `(1/N) Tr(Π_k W(k)/√N)`.
pub fn trace_statistic(matrices: &[DMatrix<f64>]) -> Result<f64> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::Invalid("trace statistic needs at least one matrix".into()))?;
    let n = first.nrows();
    if matrices.iter().any(|m| m.nrows() != n || m.ncols() != n) {
        return Err(Error::Invalid("matrices in the trace product differ in size".into()));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let last = matrices.last().expect("non-empty");
    let trace = if matrices.len() == 1 {
        first.trace()
    } else {
        let mut prod = first.clone();
        for m in &matrices[1..matrices.len() - 1] {
            prod = &prod * m;
        }
        // Tr(P W) = Σ_ij P_ij W_ji, and W is symmetric
        prod.component_mul(last).sum()
    };
    Ok(trace * scale.powi(matrices.len() as i32) / n as f64)
}

/// `ρ^m C_m(ρ²)` for `2m` factors; zero for an odd number of factors.
pub fn theoretical_limit(rho: f64, factors: usize) -> f64 {
    if factors % 2 == 1 {
        return 0.0;
    }
    let m = factors / 2;
    rho.powi(m as i32) * t_catalan_value(m, &(rho * rho))
}

/// `ρ^m Σ_{V ∈ NC₂(2m)} ρ^{2 nest(V)}`, summed pairing by pairing.
pub fn theoretical_limit_by_enumeration(rho: f64, factors: usize) -> f64 {
    if factors % 2 == 1 {
        return 0.0;
    }
    let m = factors / 2;
    let sum: f64 = non_crossing_pair_partitions(m)
        .iter()
        .map(|v| rho.powi(2 * v.nestings() as i32))
        .sum();
    rho.powi(m as i32) * sum
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub config: WignerConfig,
    pub estimate: TraceEstimate,
    pub prediction: f64,
    pub z_score: f64,
    pub per_trial: Vec<f64>,
}

/// Runs `cfg.trials` independent realisations in parallel.
///
/// Trial `i` draws from ChaCha12 seeded with `cfg.seed` on stream `i`, and the statistics are
/// accumulated in trial order, so the output does not depend on the thread count.
pub fn monte_carlo(cfg: &WignerConfig) -> Result<MonteCarloResult> {
    cfg.validate()?;
    let per_trial: Vec<f64> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let sample = sample_process_with(cfg, &mut trial_rng(cfg.seed, i));
            trace_statistic(&sample.matrices)
        })
        .collect::<Result<_>>()?;
    let n = per_trial.len() as f64;
    let mean = per_trial.iter().sum::<f64>() / n;
    let var = per_trial.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let std_error = (var / n).sqrt();
    let prediction = theoretical_limit(cfg.rho, cfg.factors);
    let z_score = if std_error > 0.0 {
        (mean - prediction) / std_error
    } else if mean == prediction {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(MonteCarloResult {
        config: cfg.clone(),
        estimate: TraceEstimate {
            mean,
            std_error,
            trials: cfg.trials,
        },
        prediction,
        z_score,
        per_trial,
    })
}
