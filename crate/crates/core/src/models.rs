//! Channel families with a tunable memory parameter.
//!
//! All constructors return Blocked-ordering channels without displacement.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use nalgebra::{DMatrix, DVector};

use crate::channel::GaussianChannel;
use crate::error::{Error, Result};
use crate::gaussian::Ordering;
use crate::linalg;

fn check_range(name: &'static str, value: f64, ok: bool) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange { name, value })
    }
}

/// Nearest-neighbour Toeplitz matrix: zero diagonal, unit first off-diagonals.
pub fn nearest_neighbour(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 })
}

/// Lossy channel with a correlated thermal-squeezed environment:
/// `X = √η I`, `Y = (1-η)(T+1/2) diag(e^{Ms}, e^{-Ms})`.
pub fn lossy_correlated(n: usize, eta: f64, temperature: f64, s: f64, m: &DMatrix<f64>) -> Result<GaussianChannel> {
    check_range("eta", eta, (0.0..=1.0).contains(&eta))?;
    check_range("T", temperature, temperature >= 0.0)?;
    check_range("s", s, s >= 0.0)?;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
    }
    if (m - m.transpose()).amax() > 1e-12 * (1.0 + m.amax()) {
        return Err(Error::NotSymmetricM);
    }
    let level = (1.0 - eta) * (temperature + 0.5);
    let y = linalg::block_diag(&(linalg::expm_symmetric(m, s) * level), &(linalg::expm_symmetric(m, -s) * level));
    let x = DMatrix::identity(2 * n, 2 * n) * libm::sqrt(eta);
    GaussianChannel::new(DVector::zeros(2 * n), x, y, Ordering::Blocked)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkovVariant {
    Symmetric,
    Asymmetric,
}

/// Markov correlation matrix `V_jk = scale · φ^|j-k|`.
pub fn markov_matrix(n: usize, phi: f64, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| scale * libm::pow(phi, i.abs_diff(j) as f64))
}

/// Additive classical noise `X = I`, `Y = diag(V, V')` with `V' = V` or
/// `V' = scale² V⁻¹`.
pub fn additive_markov(n: usize, variant: MarkovVariant, phi: f64, scale: f64) -> Result<GaussianChannel> {
    check_range("phi", phi, (0.0..1.0).contains(&phi))?;
    check_range("scale", scale, scale > 0.0)?;
    let v = markov_matrix(n, phi, scale);
    let vp = match variant {
        MarkovVariant::Symmetric => v.clone(),
        MarkovVariant::Asymmetric => {
            let inv = v.clone().cholesky().ok_or(Error::NoConvergence)?.inverse() * (scale * scale);
            (&inv + inv.transpose()) * 0.5
        }
    };
    let y = linalg::block_diag(&v, &vp);
    GaussianChannel::new(DVector::zeros(2 * n), DMatrix::identity(2 * n, 2 * n), y, Ordering::Blocked)
}

/// Banded interference matrix: diagonal `1 - c`, first off-diagonals `c/2`.
pub fn isi_matrix(n: usize, coupling: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 1.0 - coupling,
        1 => coupling / 2.0,
        _ => 0.0,
    })
}

/// Inter-symbol interference with a vacuum environment:
/// `X = diag(M, M)`, `Y = 1/2 diag(e^{b} NNᵀ, e^{-b} NNᵀ)`, `NNᵀ = I - MMᵀ`.
/// `broken_s = b > 0` squeezes the environment and breaks phase symmetry.
pub fn inter_symbol(n: usize, coupling: f64, broken_s: f64) -> Result<GaussianChannel> {
    if !(0.0..=1.0).contains(&coupling) {
        return Err(Error::SpectrumOutOfRange(coupling));
    }
    check_range("broken_s", broken_s, broken_s >= 0.0)?;
    let mut m = isi_matrix(n, coupling);
    let norm = m.clone().symmetric_eigenvalues().amax();
    if norm > 1.0 {
        m /= norm;
    }
    let mmt = &m * m.transpose();
    let nnt = DMatrix::identity(n, n) - &mmt;
    let nnt = (&nnt + nnt.transpose()) * 0.5;
    let y = linalg::block_diag(&(&nnt * (0.5 * libm::exp(broken_s))), &(&nnt * (0.5 * libm::exp(-broken_s))));
    GaussianChannel::new(DVector::zeros(2 * n), linalg::block_diag(&m, &m), y, Ordering::Blocked)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    LossyCorrelatedEnv,
    AdditiveMarkovSymmetric,
    AdditiveMarkovAsymmetric,
    InterSymbol,
    BrokenSymmetrySeparable,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::LossyCorrelatedEnv,
        Family::AdditiveMarkovSymmetric,
        Family::AdditiveMarkovAsymmetric,
        Family::InterSymbol,
        Family::BrokenSymmetrySeparable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::LossyCorrelatedEnv => "lossy_correlated_env",
            Family::AdditiveMarkovSymmetric => "additive_markov_symmetric",
            Family::AdditiveMarkovAsymmetric => "additive_markov_asymmetric",
            Family::InterSymbol => "inter_symbol",
            Family::BrokenSymmetrySeparable => "broken_symmetry_separable",
        }
    }

    /// Parameters the family reads.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Family::LossyCorrelatedEnv => &["eta", "T", "s"],
            Family::AdditiveMarkovSymmetric | Family::AdditiveMarkovAsymmetric => &["phi", "scale"],
            Family::InterSymbol => &["coupling"],
            Family::BrokenSymmetrySeparable => &["coupling", "s"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown model family `{s}`"))
    }
}

/// Named model parameters. `s` is the squeezing of the lossy environment
/// and the symmetry-breaking squeezing of the interference family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub eta: f64,
    pub temperature: f64,
    pub s: f64,
    pub phi: f64,
    pub scale: f64,
    pub coupling: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { eta: 0.8, temperature: 0.5, s: 0.0, phi: 0.0, scale: 1.0, coupling: 0.3 }
    }
}

impl ModelParams {
    pub const NAMES: [&'static str; 6] = ["eta", "T", "s", "phi", "scale", "coupling"];

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "eta" => self.eta,
            "T" => self.temperature,
            "s" => self.s,
            "phi" => self.phi,
            "scale" => self.scale,
            "coupling" => self.coupling,
            _ => return None,
        })
    }

    /// Sets a parameter by name; returns `false` for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "eta" => &mut self.eta,
            "T" => &mut self.temperature,
            "s" => &mut self.s,
            "phi" => &mut self.phi,
            "scale" => &mut self.scale,
            "coupling" => &mut self.coupling,
            _ => return false,
        };
        *slot = value;
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub family: Family,
    pub n: usize,
    pub params: ModelParams,
}

impl ModelConfig {
    pub fn new(family: Family, n: usize) -> Self {
        Self { family, n, params: ModelParams::default() }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        assert!(self.params.set(name, value), "unknown parameter `{name}`");
        self
    }

    pub fn build(&self) -> Result<GaussianChannel> {
        if self.n == 0 {
            return Err(Error::ParamOutOfRange { name: "n", value: 0.0 });
        }
        let p = &self.params;
        match self.family {
            Family::LossyCorrelatedEnv => {
                lossy_correlated(self.n, p.eta, p.temperature, p.s, &nearest_neighbour(self.n))
            }
            Family::AdditiveMarkovSymmetric => additive_markov(self.n, MarkovVariant::Symmetric, p.phi, p.scale),
            Family::AdditiveMarkovAsymmetric => additive_markov(self.n, MarkovVariant::Asymmetric, p.phi, p.scale),
            Family::InterSymbol => inter_symbol(self.n, p.coupling, 0.0),
            Family::BrokenSymmetrySeparable => inter_symbol(self.n, p.coupling, p.s),
        }
    }

    /// Human-readable description of the implementation-chosen matrices.
    pub fn defaults_used(&self) -> Vec<String> {
        match self.family {
            Family::LossyCorrelatedEnv => vec![format!(
                "M = nearest-neighbour symmetric Toeplitz, zero diagonal, unit off-diagonal ({n}x{n})",
                n = self.n
            )],
            Family::AdditiveMarkovSymmetric => vec![String::from("V_jk = scale * phi^|j-k|; Y = diag(V, V)")],
            Family::AdditiveMarkovAsymmetric => vec![
                String::from("V_jk = scale * phi^|j-k|"),
                String::from("V' = scale^2 * V^-1; Y = diag(V, V')"),
            ],
            Family::InterSymbol | Family::BrokenSymmetrySeparable => vec![
                String::from("M banded: diagonal 1 - coupling, off-diagonal coupling/2, rescaled to spectral norm <= 1"),
                String::from("NN^T = I - MM^T (vacuum environment, CP-saturating)"),
                String::from("Y = 1/2 diag(e^s NN^T, e^-s NN^T) with s = 0 for inter_symbol"),
            ],
        }
    }
}

/// A fixed set of configurations covering every family with and without
/// memory, at `n` modes.
pub fn zoo(n: usize) -> Vec<ModelConfig> {
    use Family::*;
    vec![
        ModelConfig::new(LossyCorrelatedEnv, n).with("s", 0.0),
        ModelConfig::new(LossyCorrelatedEnv, n).with("s", 0.5),
        ModelConfig::new(LossyCorrelatedEnv, n).with("s", 1.0).with("eta", 0.5).with("T", 0.0),
        ModelConfig::new(AdditiveMarkovSymmetric, n).with("phi", 0.0),
        ModelConfig::new(AdditiveMarkovSymmetric, n).with("phi", 0.6),
        ModelConfig::new(AdditiveMarkovSymmetric, n).with("phi", 0.9).with("scale", 0.5),
        ModelConfig::new(AdditiveMarkovAsymmetric, n).with("phi", 0.5),
        ModelConfig::new(InterSymbol, n).with("coupling", 0.0),
        ModelConfig::new(InterSymbol, n).with("coupling", 0.3),
        ModelConfig::new(InterSymbol, n).with("coupling", 0.8),
        ModelConfig::new(BrokenSymmetrySeparable, n).with("coupling", 0.3).with("s", 0.5),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{symplectic_eigenvalues, CovarianceMatrix};
    use crate::unravel::{phase_symmetry, unravel, RESIDUAL_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lossy_examples() {
        let ch = lossy_correlated(4, 0.7, 0.3, 0.0, &nearest_neighbour(4)).unwrap();
        assert!((ch.y() - DMatrix::identity(8, 8) * (0.3 * 0.8)).amax() < 1e-14);
        let id = lossy_correlated(3, 1.0, 2.0, 0.7, &nearest_neighbour(3)).unwrap();
        assert_eq!(id.x(), &DMatrix::identity(6, 6));
        assert!(id.y().amax() < 1e-15);
        // pure squeezed environment
        let env = lossy_correlated(5, 0.0, 0.0, 0.8, &nearest_neighbour(5)).unwrap();
        let cm = CovarianceMatrix::new(env.y().clone(), Ordering::Blocked).unwrap();
        for nu in symplectic_eigenvalues(&cm).unwrap() {
            assert!((nu - 0.5).abs() < 1e-9);
        }
        assert!(matches!(lossy_correlated(2, 1.2, 0.0, 0.0, &nearest_neighbour(2)), Err(Error::ParamOutOfRange { .. })));
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(lossy_correlated(2, 0.5, 0.0, 0.1, &bad), Err(Error::NotSymmetricM));
    }

    #[test]
    fn markov_examples() {
        let ch = additive_markov(4, MarkovVariant::Symmetric, 0.0, 0.7).unwrap();
        assert!((ch.y() - DMatrix::identity(8, 8) * 0.7).amax() < 1e-15);
        for phi in [0.0, 0.4, 0.9] {
            let sym = additive_markov(5, MarkovVariant::Symmetric, phi, 1.3).unwrap();
            assert!(phase_symmetry(&sym).unwrap().channel_symmetric);
        }
        let asym = additive_markov(5, MarkovVariant::Asymmetric, 0.4, 1.3).unwrap();
        assert!(!phase_symmetry(&asym).unwrap().channel_symmetric);
        assert!(matches!(additive_markov(3, MarkovVariant::Symmetric, 1.0, 1.0), Err(Error::ParamOutOfRange { .. })));
    }

    #[test]
    fn isi_examples() {
        let id = inter_symbol(4, 0.0, 0.0).unwrap();
        assert!((id.x() - DMatrix::identity(8, 8)).amax() < 1e-15);
        assert!(id.y().amax() < 1e-15);
        assert!(phase_symmetry(&inter_symbol(6, 0.4, 0.0).unwrap()).unwrap().channel_symmetric);
        assert!(!phase_symmetry(&inter_symbol(6, 0.4, 0.5).unwrap()).unwrap().channel_symmetric);
        assert_eq!(inter_symbol(3, 1.5, 0.0), Err(Error::SpectrumOutOfRange(1.5)));
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
            for p in f.params() {
                assert!(ModelParams::default().get(p).is_some());
            }
        }
        assert!("lossy".parse::<Family>().is_err());
        let mut p = ModelParams::default();
        assert!(p.set("T", 2.0) && p.temperature == 2.0);
        assert!(!p.set("temperature", 1.0));
    }

    fn random_config(rng: &mut ChaCha8Rng, family: Family) -> ModelConfig {
        let n = rng.random_range(1..=6);
        ModelConfig::new(family, n)
            .with("eta", rng.random_range(0.0..=1.0))
            .with("T", rng.random_range(0.0..3.0))
            .with("s", rng.random_range(0.0..2.0))
            .with("phi", rng.random_range(0.0..0.99))
            .with("scale", rng.random_range(0.05..3.0))
            .with("coupling", rng.random_range(0.0..=1.0))
    }

    #[test]
    fn random_sweep_is_valid_and_unravelable() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for family in Family::ALL {
            for _ in 0..100 {
                let cfg = random_config(&mut rng, family);
                let ch = cfg.build().unwrap();
                let v = ch.validate();
                assert!(v.valid, "{cfg:?}: {v:?}");
                let ur = unravel(&ch).unwrap_or_else(|e| panic!("{cfg:?}: {e}"));
                assert!(ur.residual <= RESIDUAL_TOL, "{cfg:?}: {}", ur.residual);
            }
        }
    }

    #[test]
    fn memoryless_limits_give_identical_blocks() {
        let configs = [
            ModelConfig::new(Family::LossyCorrelatedEnv, 6).with("s", 0.0),
            ModelConfig::new(Family::AdditiveMarkovSymmetric, 6).with("phi", 0.0),
            ModelConfig::new(Family::AdditiveMarkovAsymmetric, 6).with("phi", 0.0),
            ModelConfig::new(Family::InterSymbol, 6).with("coupling", 0.0),
            ModelConfig::new(Family::BrokenSymmetrySeparable, 6).with("coupling", 0.0).with("s", 0.4),
        ];
        for cfg in configs {
            let ur = unravel(&cfg.build().unwrap()).unwrap();
            let first = ur.blocks[0];
            for b in &ur.blocks {
                let d = (b.x - first.x).amax().max((b.y - first.y).amax());
                assert!(d <= 1e-9, "{cfg:?}: {d}");
            }
        }
    }

    #[test]
    fn zoo_builds() {
        for cfg in zoo(4) {
            assert!(cfg.build().unwrap().validate().valid);
            assert!(!cfg.defaults_used().is_empty());
        }
    }
}
