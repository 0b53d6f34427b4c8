use gmem_core::holevo::{chi_coherent_with, chi_with_unraveling, PhotonBudget};
use gmem_core::models::ModelConfig;
use gmem_core::unravel::{phase_symmetry, unravel, verify_unraveling};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{ConfigError, SweepSpec};

/// Random states used to measure the unraveling residual of each point.
pub const VERIFY_TRIALS: usize = 16;
/// Default gain threshold separating entangled-optimal from separable-optimal.
pub const GAIN_EPS: f64 = 1e-6;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

/// One sweep point. Numeric fields are `None` when the point failed, in
/// which case `error` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub chi_optimal: Option<f64>,
    pub chi_coherent: Option<f64>,
    pub gain: Option<f64>,
    pub entangled: Option<bool>,
    pub symmetric: Option<bool>,
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(param: f64, error: String) -> Self {
        Self {
            param,
            chi_optimal: None,
            chi_coherent: None,
            gain: None,
            entangled: None,
            symmetric: None,
            residual: None,
            error: Some(error),
        }
    }
}

/// Evaluates one model instance. `seed` drives the random states used for
/// the residual check.
pub fn evaluate_point(cfg: &ModelConfig, photons: f64, param: f64, seed: u64) -> SweepRow {
    let run = || -> gmem_core::Result<SweepRow> {
        let ch = cfg.build()?;
        let ur = unravel(&ch)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let residual = verify_unraveling(&ch, &ur, VERIFY_TRIALS, &mut rng)?.max(ur.residual);
        let symmetric = phase_symmetry(&ch)?.channel_symmetric;
        let budget = PhotonBudget::new(photons, cfg.n)?;
        let best = chi_with_unraveling(&ur, budget)?;
        let coherent = chi_coherent_with(&ur, budget)?;
        Ok(SweepRow {
            param: round12(param),
            chi_optimal: Some(round12(best.chi)),
            chi_coherent: Some(round12(coherent)),
            gain: Some(round12(best.chi - coherent)),
            entangled: Some(best.entangled_inputs),
            symmetric: Some(symmetric),
            residual: Some(round12(residual)),
            error: None,
        })
    };
    run().unwrap_or_else(|e| SweepRow::failed(round12(param), e.to_string()))
}

/// Evaluates every value of the sweep parameter in parallel. Rows come back
/// in input order; failing points carry their error instead of aborting.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, ConfigError> {
    let name = spec.validate_sweep()?;
    let base = spec.model_config()?;
    Ok(spec
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &value)| {
            let mut cfg = base.clone();
            cfg.params.set(name, value);
            evaluate_point(&cfg, spec.photons, value, spec.seed.wrapping_add(i as u64))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    /// Smallest parameter value whose gain exceeds the threshold.
    pub threshold: Option<f64>,
    /// The threshold is the smallest nonzero grid point.
    pub zero_threshold: bool,
}

/// Locates the onset of entangled-optimal inputs in rows sorted by `param`.
pub fn detect_transition(rows: &[SweepRow], eps: f64) -> Transition {
    let threshold = rows.iter().find(|r| r.gain.is_some_and(|g| g > eps)).map(|r| r.param);
    let first_nonzero = rows.iter().map(|r| r.param).find(|&p| p != 0.0);
    Transition { threshold, zero_threshold: threshold.is_some() && threshold == first_nonzero }
}
