//! Constrained Gaussian Holevo function.
//!
//! For an unraveled channel the `n`-mode problem splits into one-mode
//! problems coupled only through the photon budget `Σ N_k / n = N`:
//!
//! - phase-symmetric (scalar) blocks have coherent optimal inputs and a
//!   closed-form value, so the budget is water-filled by bisection on the
//!   Lagrange multiplier;
//! - other blocks are optimized numerically over pure squeezed inputs and
//!   anisotropic modulation, and the budget is moved between blocks by a
//!   damped Newton iteration on finite-difference marginals.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2};
use nalgebra::{DMatrix, Matrix2};

use crate::channel::GaussianChannel;
use crate::error::{Error, Result};
use crate::gaussian::{entropy_one_mode, g_prime, g_prime_inverse, g_unchecked, CovarianceMatrix, Ordering};
use crate::linalg;
use crate::simplex::{self, SimplexOptions};
use crate::unravel::{self, OneModeChannel, UnravelingResult};

/// Target accuracy of the budget constraint `|Σ N_k / n - N|`.
pub const BUDGET_TOL: f64 = 1e-9;
/// Off-block magnitude of the optimal input CM above which inputs count as entangled.
pub const ENTANGLEMENT_TOL: f64 = 1e-7;
const CP_SLACK: f64 = 1e-10;
const FD_STEP: f64 = 1e-4;
const ALLOCATION_TOL: f64 = 1e-8;
const MAX_SWEEPS: usize = 200;

/// Mean photon number per mode available for modulation and input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonBudget {
    pub photons: f64,
    pub modes: usize,
}

impl PhotonBudget {
    pub fn new(photons: f64, modes: usize) -> Result<Self> {
        if photons.is_nan() || photons < 0.0 || !photons.is_finite() {
            return Err(Error::NegativeBudget(photons));
        }
        Ok(Self { photons, modes })
    }

    /// Whether `tr(V_in + V_c) / 2n <= N + 1/2` (with `tol` slack).
    pub fn admits(&self, total_cm: &DMatrix<f64>, tol: f64) -> bool {
        total_cm.trace() / (2.0 * self.modes as f64) <= self.photons + 0.5 + tol
    }
}

/// Per-block photon numbers and the water level they share.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub photons: Vec<f64>,
    /// Lagrange multiplier of the budget constraint, in bits per photon.
    pub mu: f64,
}

impl PowerAllocation {
    pub fn mean(&self) -> f64 {
        self.photons.iter().sum::<f64>() / self.photons.len() as f64
    }
}

/// Input and modulation covariance matrices for one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeInput {
    pub input: Matrix2<f64>,
    pub modulation: Matrix2<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolevoResult {
    /// Bits per channel use.
    pub chi: f64,
    pub allocation: PowerAllocation,
    /// Optimal ensemble per unraveled block (dressed modes).
    pub per_mode_inputs: Vec<ModeInput>,
    /// Optimal input CM `E (⊕ V_in) Eᵀ` in the channel's own modes, interleaved.
    pub input_cm: DMatrix<f64>,
    pub entangled_inputs: bool,
    /// True when every block was phase-symmetric and water-filling applied directly.
    pub symmetric_route: bool,
}

fn check_scalar_block(x: f64, y: f64) -> Result<()> {
    if x * x / 2.0 + y < 0.5 - CP_SLACK {
        return Err(Error::UnphysicalBlock(alloc::format!("x²/2 + y = {} < 1/2", x * x / 2.0 + y)));
    }
    Ok(())
}

/// Holevo quantity of the phase-insensitive block `(x I, y I)` with
/// coherent inputs and isotropic modulation of `nk` photons.
pub fn chi_one_mode_symmetric(x: f64, y: f64, nk: f64) -> Result<f64> {
    check_scalar_block(x, y)?;
    if nk.is_nan() || nk < 0.0 {
        return Err(Error::NegativeBudget(nk));
    }
    Ok(scalar_value(x, y, nk))
}

/// Output thermal occupation of a vacuum input, `x²/2 + y - 1/2`. Every
/// scalar formula goes through it so that forward and inverse evaluations
/// stay consistent when it is tiny (nearly pure outputs).
#[inline]
fn scalar_floor(x: f64, y: f64) -> f64 {
    x * x * 0.5 + y - 0.5
}

/// Output occupation `x² N + floor` with `nk` photons of modulation.
#[inline]
fn scalar_level(x: f64, y: f64, nk: f64) -> f64 {
    x * x * nk + scalar_floor(x, y)
}

#[inline]
fn scalar_value(x: f64, y: f64, nk: f64) -> f64 {
    g_unchecked(scalar_level(x, y, nk)) - g_unchecked(scalar_floor(x, y))
}

#[inline]
fn scalar_marginal(x: f64, y: f64, nk: f64) -> f64 {
    let x2 = x * x;
    if x2 == 0.0 {
        return 0.0;
    }
    x2 * g_prime(scalar_level(x, y, nk))
}

/// Closed-form inverse of [`scalar_marginal`], clamped at zero.
#[inline]
fn scalar_marginal_inverse(x: f64, y: f64, mu: f64) -> f64 {
    let x2 = x * x;
    if x2 == 0.0 {
        return 0.0;
    }
    let t = g_prime_inverse(mu / x2);
    ((t - scalar_floor(x, y)) / x2).max(0.0)
}

/// Largest KKT violation of an allocation over scalar blocks: `|f_k(N_k) - μ|`
/// on active blocks, `max(0, f_k(0) - μ)` on idle ones.
pub fn kkt_residual(blocks: &[(f64, f64)], alloc: &PowerAllocation) -> f64 {
    blocks
        .iter()
        .zip(&alloc.photons)
        .map(|(&(x, y), &nk)| {
            let f = scalar_marginal(x, y, nk);
            if nk > 0.0 {
                (f - alloc.mu).abs()
            } else if f.is_infinite() && alloc.mu.is_infinite() {
                0.0
            } else {
                (f - alloc.mu).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// Solves `Σ_k inverse(k, μ) = total` for the multiplier by bisection;
/// `inverse(k, ·)` must be nonincreasing.
fn bisect_multiplier<F: Fn(usize, f64) -> f64>(count: usize, total: f64, inverse: F) -> (Vec<f64>, f64) {
    let spend = |mu: f64| -> f64 { (0..count).map(|k| inverse(k, mu)).sum() };
    let mut hi = 1.0;
    while spend(hi) > total && hi < 1e300 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while spend(lo) < total && lo > 1e-300 {
        lo *= 0.5;
    }
    if lo == hi {
        hi = lo * 2.0;
    }
    for _ in 0..400 {
        let mid = libm::sqrt(lo * hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if spend(mid) > total {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-15 * hi {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut photons: Vec<f64> = (0..count).map(|k| inverse(k, mu)).collect();
    // Absorb the rounding-level mismatch proportionally: an additive shift
    // would move nearly starved blocks far along their steep marginals.
    let spent: f64 = photons.iter().sum();
    if spent > 0.0 {
        let scale = total / spent;
        photons.iter_mut().for_each(|p| *p *= scale);
    }
    (photons, mu)
}

/// Water-filling over phase-symmetric blocks `(x_k, y_k)`: maximizes
/// `(1/n) Σ_k chi_one_mode_symmetric(x_k, y_k, N_k)` subject to
/// `Σ_k N_k / n = N`, `N_k >= 0`.
pub fn waterfill(blocks: &[(f64, f64)], budget: PhotonBudget) -> Result<PowerAllocation> {
    if blocks.is_empty() {
        return Err(Error::EmptyBlocks);
    }
    PhotonBudget::new(budget.photons, budget.modes)?;
    for &(x, y) in blocks {
        check_scalar_block(x, y)?;
    }
    let n = blocks.len();
    let total = budget.photons * n as f64;
    let peak = blocks.iter().map(|&(x, y)| scalar_marginal(x, y, 0.0)).fold(0.0, f64::max);
    if total == 0.0 {
        return Ok(PowerAllocation { photons: vec![0.0; n], mu: peak });
    }
    if peak == 0.0 {
        // every block has x = 0: no use for photons anywhere
        return Ok(PowerAllocation { photons: vec![budget.photons; n], mu: 0.0 });
    }
    let (photons, mu) = bisect_multiplier(n, total, |k, mu| scalar_marginal_inverse(blocks[k].0, blocks[k].1, mu));
    Ok(PowerAllocation { photons, mu })
}

/// Mean Holevo quantity of a scalar allocation.
pub fn waterfill_chi(blocks: &[(f64, f64)], alloc: &PowerAllocation) -> f64 {
    let sum: f64 = blocks.iter().zip(&alloc.photons).map(|(&(x, y), &nk)| scalar_value(x, y, nk)).sum();
    sum / blocks.len() as f64
}

/// Optimal single-mode Gaussian ensemble for a general block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneModeOptimum {
    pub chi: f64,
    pub input: Matrix2<f64>,
    pub modulation: Matrix2<f64>,
    /// Squeezing parameter `r` of the pure input, `V_in = R diag(e^{2r}, e^{-2r}) Rᵀ / 2`.
    pub squeezing: f64,
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = libm::sincos(theta);
    Matrix2::new(c, -s, s, c)
}

/// `Σ[X (V_in + V_c) Xᵀ + Y] - Σ[X V_in Xᵀ + Y]` for one mode.
pub fn block_chi(block: &OneModeChannel, input: &Matrix2<f64>, modulation: &Matrix2<f64>) -> f64 {
    let xt = block.x.transpose();
    let noisy = block.x * input * xt + block.y;
    let signal = noisy + block.x * modulation * xt;
    entropy_one_mode(&signal) - entropy_one_mode(&noisy)
}

struct Ensemble {
    input: Matrix2<f64>,
    modulation: Matrix2<f64>,
    squeezing: f64,
}

/// Maps unconstrained `(u, φ, ψ, w)` to a pure squeezed input and a
/// modulation CM that exhausts the budget `tr(V_in + V_c)/2 = N + 1/2`.
fn ensemble(p: &[f64], nk: f64) -> Ensemble {
    let r_max = 0.5 * libm::acosh(2.0 * nk + 1.0);
    let r = r_max * libm::tanh(p[0]);
    let (e2r, cosh2r) = (libm::exp(2.0 * r), libm::cosh(2.0 * r));
    let rin = rotation(p[1]);
    let input = rin * Matrix2::new(0.5 * e2r, 0.0, 0.0, 0.5 / e2r) * rin.transpose();
    let spare = (2.0 * nk + 1.0 - cosh2r).max(0.0);
    let t = 0.5 * (1.0 + libm::sin(p[3]));
    let rc = rotation(p[2]);
    let modulation = rc * Matrix2::new(spare * t, 0.0, 0.0, spare * (1.0 - t)) * rc.transpose();
    Ensemble { input, modulation, squeezing: r }
}

const STARTS: [[f64; 4]; 8] = [
    [0.0, 0.0, 0.0, 0.0],
    [0.8, 0.0, 0.0, 0.8],
    [-0.8, 0.0, 0.0, -0.8],
    [0.3, FRAC_PI_4, FRAC_PI_4, 0.3],
    [-0.3, -FRAC_PI_4, -FRAC_PI_4, -0.3],
    [0.8, FRAC_PI_2, 0.0, -0.8],
    [1.5, 0.0, 0.0, 1.2],
    [-1.5, 0.0, FRAC_PI_2, 1.2],
];

fn optimize_block(block: &OneModeChannel, nk: f64) -> OneModeOptimum {
    if nk <= 0.0 {
        return OneModeOptimum {
            chi: 0.0,
            input: Matrix2::identity() * 0.5,
            modulation: Matrix2::zeros(),
            squeezing: 0.0,
        };
    }
    let objective = |p: &[f64]| {
        let e = ensemble(p, nk);
        -block_chi(block, &e.input, &e.modulation)
    };
    let opts = SimplexOptions::default();
    let best = STARTS
        .iter()
        .map(|s| simplex::minimize(objective, s, &[0.4; 4], opts))
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("nonempty start list");
    let e = ensemble(&best.x, nk);
    OneModeOptimum { chi: -best.value, input: e.input, modulation: e.modulation, squeezing: e.squeezing }
}

/// Maximizes the one-mode Gaussian Holevo quantity of `(X1, Y1)` over pure
/// squeezed inputs and arbitrary modulation CMs under the budget `nk`.
pub fn chi_one_mode_general(x1: &Matrix2<f64>, y1: &Matrix2<f64>, nk: f64) -> Result<OneModeOptimum> {
    if nk.is_nan() || nk < 0.0 {
        return Err(Error::NegativeBudget(nk));
    }
    let block = OneModeChannel::new(*x1, *y1)?;
    Ok(optimize_block(&block, nk))
}

/// Coherent-input value of a block with isotropic modulation `nk`.
fn coherent_value(block: &OneModeChannel, nk: f64) -> f64 {
    let half = Matrix2::identity() * 0.5;
    block_chi(block, &half, &(Matrix2::identity() * nk))
}

/// Derivative of [`coherent_value`] in `nk`: with `V_out = A + N B`,
/// `det V_out` is quadratic in `N` and `d/dN g(ν - 1/2) = g'(ν - 1/2) ν'`.
fn coherent_marginal(block: &OneModeChannel, nk: f64) -> f64 {
    let b = block.x * block.x.transpose();
    let a = b * 0.5 + block.y;
    let adj_a = Matrix2::new(a[(1, 1)], -a[(0, 1)], -a[(1, 0)], a[(0, 0)]);
    let a1 = (adj_a * b).trace();
    let a2 = b.determinant();
    let v = a + b * nk;
    let nu = libm::sqrt(v.determinant().max(0.25));
    if a1 + 2.0 * a2 * nk == 0.0 {
        return 0.0;
    }
    g_prime(nu - 0.5) * (a1 + 2.0 * a2 * nk) / (2.0 * nu)
}

fn coherent_marginal_inverse(block: &OneModeChannel, mu: f64) -> f64 {
    if coherent_marginal(block, 0.0) <= mu {
        return 0.0;
    }
    let mut hi = 1.0;
    while coherent_marginal(block, hi) > mu && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if coherent_marginal(block, mid) > mu {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn scalar_params(block: &OneModeChannel) -> (f64, f64) {
    (block.x[(0, 0)], block.y[(0, 0)])
}

fn coherent_allocation(blocks: &[OneModeChannel], budget: PhotonBudget) -> Result<PowerAllocation> {
    if blocks.iter().all(|b| b.is_scalar(unravel::SYMMETRY_TOL)) {
        let params: Vec<_> = blocks.iter().map(scalar_params).collect();
        return waterfill(&params, budget);
    }
    let n = blocks.len();
    let total = budget.photons * n as f64;
    if total == 0.0 {
        return Ok(PowerAllocation { photons: vec![0.0; n], mu: f64::INFINITY });
    }
    let (photons, mu) = bisect_multiplier(n, total, |k, mu| coherent_marginal_inverse(&blocks[k], mu));
    Ok(PowerAllocation { photons, mu })
}

fn validate_blocks(ur: &UnravelingResult) -> Result<()> {
    if ur.blocks.is_empty() {
        return Err(Error::EmptyBlocks);
    }
    for (k, b) in ur.blocks.iter().enumerate() {
        let v = b.to_channel().validate();
        if !v.valid {
            return Err(Error::UnphysicalBlock(alloc::format!("block {k}: min CP eigenvalue {:e}", v.min_eig)));
        }
    }
    Ok(())
}

/// Gaussian Holevo quantity of `ch` with coherent inputs `I/2` and
/// isotropic modulation water-filled across the unraveled blocks.
pub fn chi_coherent_baseline(ch: &GaussianChannel, budget: PhotonBudget) -> Result<f64> {
    let ur = unravel::unravel(ch)?;
    chi_coherent_with(&ur, budget)
}

pub fn chi_coherent_with(ur: &UnravelingResult, budget: PhotonBudget) -> Result<f64> {
    validate_blocks(ur)?;
    let alloc = coherent_allocation(&ur.blocks, budget)?;
    let sum: f64 = ur.blocks.iter().zip(&alloc.photons).map(|(b, &nk)| coherent_value(b, nk)).sum();
    Ok(sum / ur.blocks.len() as f64)
}

/// Optimal Gaussian Holevo quantity of an unravelable memory channel.
pub fn chi_memory_channel(ch: &GaussianChannel, budget: PhotonBudget) -> Result<HolevoResult> {
    let ur = unravel::unravel(ch)?;
    chi_with_unraveling(&ur, budget)
}

/// Same as [`chi_memory_channel`] for a precomputed unraveling.
pub fn chi_with_unraveling(ur: &UnravelingResult, budget: PhotonBudget) -> Result<HolevoResult> {
    validate_blocks(ur)?;
    PhotonBudget::new(budget.photons, budget.modes)?;
    let n = ur.blocks.len();
    let symmetric_route = ur.all_scalar();
    let (allocation, per_mode_inputs, chi) = if symmetric_route {
        let params: Vec<_> = ur.blocks.iter().map(scalar_params).collect();
        let allocation = waterfill(&params, budget)?;
        let inputs: Vec<ModeInput> = allocation
            .photons
            .iter()
            .map(|&nk| ModeInput { input: Matrix2::identity() * 0.5, modulation: Matrix2::identity() * nk })
            .collect();
        let chi = waterfill_chi(&params, &allocation);
        (allocation, inputs, chi)
    } else {
        let start = coherent_allocation(&ur.blocks, budget)?;
        let allocation = GeneralAllocator::new(&ur.blocks).run(start);
        let optima: Vec<OneModeOptimum> = ur
            .blocks
            .iter()
            .zip(&allocation.photons)
            .map(|(b, &nk)| block_optimum(b, nk))
            .collect();
        let chi = optima.iter().map(|o| o.chi).sum::<f64>() / n as f64;
        let inputs: Vec<ModeInput> = optima.iter().map(|o| ModeInput { input: o.input, modulation: o.modulation }).collect();
        (allocation, inputs, chi)
    };
    let input_cm = undo_encoding(ur, &per_mode_inputs);
    let entangled_inputs = linalg::max_off_block(&input_cm) > ENTANGLEMENT_TOL;
    Ok(HolevoResult { chi, allocation, per_mode_inputs, input_cm, entangled_inputs, symmetric_route })
}

fn undo_encoding(ur: &UnravelingResult, inputs: &[ModeInput]) -> DMatrix<f64> {
    let blocks: Vec<_> = inputs.iter().map(|m| m.input).collect();
    let dressed = CovarianceMatrix::from_parts_unchecked(linalg::direct_sum(&blocks), Ordering::Interleaved);
    ur.encoding.transform(&dressed).into_matrix()
}

/// Block optimum, using the closed form for scalar blocks.
fn block_optimum(block: &OneModeChannel, nk: f64) -> OneModeOptimum {
    if block.is_scalar(unravel::SYMMETRY_TOL) {
        let (x, y) = scalar_params(block);
        OneModeOptimum {
            chi: scalar_value(x, y, nk),
            input: Matrix2::identity() * 0.5,
            modulation: Matrix2::identity() * nk,
            squeezing: 0.0,
        }
    } else {
        optimize_block(block, nk)
    }
}

/// Budget allocation across general blocks by damped Newton steps on a
/// separable quadratic model of the block value functions.
struct GeneralAllocator<'a> {
    blocks: &'a [OneModeChannel],
    scalar: Vec<bool>,
}

struct Local {
    slope: f64,
    curvature: f64,
}

impl<'a> GeneralAllocator<'a> {
    fn new(blocks: &'a [OneModeChannel]) -> Self {
        let scalar = blocks.iter().map(|b| b.is_scalar(unravel::SYMMETRY_TOL)).collect();
        Self { blocks, scalar }
    }

    fn value(&self, k: usize, nk: f64) -> f64 {
        if self.scalar[k] {
            let (x, y) = scalar_params(&self.blocks[k]);
            scalar_value(x, y, nk)
        } else {
            optimize_block(&self.blocks[k], nk).chi
        }
    }

    fn local(&self, k: usize, nk: f64) -> Local {
        if self.scalar[k] {
            let (x, y) = scalar_params(&self.blocks[k]);
            let x2 = x * x;
            let t = scalar_level(x, y, nk);
            // g''(t) = -1 / (ln2 · t (t + 1))
            let curvature = if t > 0.0 { -x2 * x2 / (LN_2 * t * (t + 1.0)) } else { f64::NEG_INFINITY };
            return Local { slope: scalar_marginal(x, y, nk), curvature };
        }
        let h = FD_STEP;
        let (slope, curvature) = if nk >= h {
            let (m, c, p) = (self.value(k, nk - h), self.value(k, nk), self.value(k, nk + h));
            ((p - m) / (2.0 * h), (p - 2.0 * c + m) / (h * h))
        } else {
            let (a, b, c) = (self.value(k, nk), self.value(k, nk + h), self.value(k, nk + 2.0 * h));
            ((-3.0 * a + 4.0 * b - c) / (2.0 * h), (a - 2.0 * b + c) / (h * h))
        };
        Local { slope, curvature }
    }

    fn total(&self, photons: &[f64]) -> f64 {
        photons.iter().enumerate().map(|(k, &nk)| self.value(k, nk)).sum()
    }

    fn run(&self, start: PowerAllocation) -> PowerAllocation {
        let n = self.blocks.len();
        let budget: f64 = start.photons.iter().sum();
        let mut photons = start.photons;
        let mut mu = start.mu;
        if budget == 0.0 {
            return PowerAllocation { photons, mu };
        }
        let mut current = self.total(&photons);
        for _ in 0..MAX_SWEEPS {
            let locals: Vec<Local> = (0..n).map(|k| self.local(k, photons[k])).collect();
            let target = |k: usize, level: f64| -> f64 {
                let l = &locals[k];
                let curv = l.curvature.min(-1e-9);
                if curv.is_infinite() {
                    return photons[k];
                }
                (photons[k] + (level - l.slope) / curv).max(0.0)
            };
            // model marginals are linear, so bracket the level directly
            let mut lo = locals.iter().enumerate().map(|(k, l)| l.slope + l.curvature.min(-1e-9) * (budget - photons[k])).fold(f64::INFINITY, f64::min);
            let mut hi = locals.iter().enumerate().map(|(k, l)| l.slope - l.curvature.min(-1e-9) * photons[k]).fold(f64::NEG_INFINITY, f64::max);
            lo = lo.max(-1e12) - 1.0;
            hi = hi.min(1e12) + 1.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let spend: f64 = (0..n).map(|k| target(k, mid)).sum();
                if spend > budget {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            mu = 0.5 * (lo + hi);
            let mut proposal: Vec<f64> = (0..n).map(|k| target(k, mu)).collect();
            let spent: f64 = proposal.iter().sum();
            if spent > 0.0 {
                proposal.iter_mut().for_each(|p| *p *= budget / spent);
            }
            let step: Vec<f64> = proposal.iter().zip(&photons).map(|(p, c)| p - c).collect();
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..30 {
                let trial: Vec<f64> = photons.iter().zip(&step).map(|(c, s)| (c + alpha * s).max(0.0)).collect();
                let value = self.total(&trial);
                if value > current {
                    accepted = Some((trial, value));
                    break;
                }
                alpha *= 0.5;
                if alpha * step.iter().fold(0.0_f64, |m, s| m.max(s.abs())) < ALLOCATION_TOL {
                    break;
                }
            }
            match accepted {
                Some((trial, value)) => {
                    let moved = trial.iter().zip(&photons).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
                    photons = trial;
                    current = value;
                    if moved < ALLOCATION_TOL {
                        break;
                    }
                }
                None => break,
            }
        }
        PowerAllocation { photons, mu }
    }
}

/// Direct `n`-mode evaluation of `(1/n)(Σ[X(V_in+V_c)Xᵀ+Y] - Σ[X V_in Xᵀ+Y])`
/// for a given ensemble, without unraveling.
pub fn chi_for_ensemble(ch: &GaussianChannel, input: &CovarianceMatrix, modulation: &DMatrix<f64>) -> Result<f64> {
    let n = ch.modes();
    let input = input.convert_ordering(ch.ordering());
    let modulation = Ordering::Interleaved.permute_matrix(ch.ordering(), modulation);
    let out = |v: &DMatrix<f64>| -> Result<f64> {
        let w = ch.x() * v * ch.x().transpose() + ch.y();
        let cm = CovarianceMatrix::from_parts_unchecked((&w + w.transpose()) * 0.5, ch.ordering());
        crate::gaussian::entropy(&cm)
    };
    let signal = out(&(input.matrix() + &modulation))?;
    let noise = out(input.matrix())?;
    Ok((signal - noise) / n as f64)
}

/// Dressed-mode ensemble of a result mapped back to the channel's modes:
/// `(E (⊕ V_in) Eᵀ, E (⊕ V_c) Eᵀ)`, interleaved.
pub fn ensemble_in_channel_modes(ur: &UnravelingResult, result: &HolevoResult) -> (CovarianceMatrix, DMatrix<f64>) {
    let input = CovarianceMatrix::from_parts_unchecked(result.input_cm.clone(), Ordering::Interleaved);
    let mods: Vec<_> = result.per_mode_inputs.iter().map(|m| m.modulation).collect();
    let dressed = CovarianceMatrix::from_parts_unchecked(linalg::direct_sum(&mods), Ordering::Interleaved);
    (input, ur.encoding.transform(&dressed).into_matrix())
}
