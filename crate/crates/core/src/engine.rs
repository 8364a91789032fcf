//! Path loop shared by every Monte Carlo estimator.
//!
//! Paths are grouped in fixed blocks, each block accumulates its own moments,
//! and blocks are merged in index order. With per-path generators this makes
//! the result independent of the number of worker threads.

use crate::error::{CovError, Result};
use crate::rng::{PathRng, StreamFamily};
use crate::stats::{EstimatorOutput, Moments};

pub const BLOCK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub n: u64,
    pub seed: u64,
    pub execution: Execution,
}

impl SimConfig {
    pub fn new(n: u64, seed: u64) -> Self {
        Self { n, seed, execution: Execution::default() }
    }

    pub fn sequential(mut self) -> Self {
        self.execution = Execution::Sequential;
        self
    }
}

/// Per-output moments plus the number of draws the sampler discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub moments: Vec<Moments>,
    pub rejected: u64,
}

impl RunSummary {
    pub fn outputs(&self) -> Result<Vec<EstimatorOutput>> {
        self.moments.iter().map(Moments::output).collect()
    }
}

fn run_block<S, F>(family: &StreamFamily, block: u64, n: u64, dims: usize, scratch: &mut S, sample: &F) -> Result<RunSummary>
where
    F: Fn(&mut PathRng, &mut S, &mut [f64]) -> Result<u64>,
{
    let mut moments = vec![Moments::default(); dims];
    let mut out = vec![0.0; dims];
    let mut rejected = 0;
    let start = block * BLOCK;
    let end = (start + BLOCK).min(n);
    for index in start..end {
        let mut rng = family.path(index);
        rejected += sample(&mut rng, scratch, &mut out)?;
        for (m, &v) in moments.iter_mut().zip(&out) {
            if !v.is_finite() {
                return Err(CovError::PoisonedSample { index });
            }
            m.push(v);
        }
    }
    Ok(RunSummary { moments, rejected })
}

/// Runs `n` paths of `sample`, which writes `dims` values per path and returns how many draws it rejected.
pub fn run_paths<S, I, F>(cfg: &SimConfig, label: &str, dims: usize, init: I, sample: F) -> Result<RunSummary>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut PathRng, &mut S, &mut [f64]) -> Result<u64> + Sync,
{
    if cfg.n < 2 {
        return Err(CovError::InvalidParameter(format!("sample size must be at least 2, got {}", cfg.n)));
    }
    let family = StreamFamily::new(cfg.seed, label);
    let blocks = cfg.n.div_ceil(BLOCK);
    let parts: Vec<Result<RunSummary>> = match cfg.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..blocks)
                .into_par_iter()
                .map_init(&init, |scratch, b| run_block(&family, b, cfg.n, dims, scratch, &sample))
                .collect()
        }
        _ => {
            let mut scratch = init();
            (0..blocks).map(|b| run_block(&family, b, cfg.n, dims, &mut scratch, &sample)).collect()
        }
    };
    let mut total = RunSummary { moments: vec![Moments::default(); dims], rejected: 0 };
    for part in parts {
        let part = part?;
        for (t, m) in total.moments.iter_mut().zip(&part.moments) {
            t.merge(m);
        }
        total.rejected += part.rejected;
    }
    Ok(total)
}

/// Scalar convenience wrapper around [`run_paths`].
pub fn estimate<F>(cfg: &SimConfig, label: &str, sample: F) -> Result<EstimatorOutput>
where
    F: Fn(&mut PathRng) -> f64 + Sync,
{
    run_paths(cfg, label, 1, || (), |rng, _, out| {
        out[0] = sample(rng);
        Ok(0)
    })?
    .moments[0]
        .output()
}
