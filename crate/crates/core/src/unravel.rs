//! Memory unraveling: passive encodings/decodings `(E, D)` such that the
//! dressed channel `(0, D X E, D Y Dᵀ)` is a direct sum of one-mode channels,
//! plus the phase-rotation symmetry test that decides whether coherent
//! inputs are optimal.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;

use crate::channel::{GaussianChannel, PhaseRotation, SymplecticOrthogonal};
use crate::error::{Error, Result};
use crate::gaussian::Ordering;
use crate::linalg;
use crate::random;

/// Largest off-block magnitude accepted for a successful unraveling.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Frobenius tolerance on commutators with the rotation generator.
pub const SYMMETRY_TOL: f64 = 1e-9;
const STRUCTURE_TOL: f64 = 1e-10;
const COMMUTATOR_TOL: f64 = 1e-8;
const CLUSTER_TOL: f64 = 1e-8;

/// A one-mode channel `(0, X1, Y1)` given by its 2×2 blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneModeChannel {
    pub x: Matrix2<f64>,
    pub y: Matrix2<f64>,
}

impl OneModeChannel {
    /// Checked constructor: the block must be a CP-valid channel.
    pub fn new(x: Matrix2<f64>, y: Matrix2<f64>) -> Result<Self> {
        let block = Self { x, y };
        let v = block.to_channel().validate();
        if !v.valid {
            return Err(Error::UnphysicalBlock(format!("min CP eigenvalue {:e}", v.min_eig)));
        }
        Ok(block)
    }

    /// The phase-insensitive block `(x I, y I)`.
    pub fn scalar(x: f64, y: f64) -> Self {
        Self { x: Matrix2::identity() * x, y: Matrix2::identity() * y }
    }

    /// True when both `X1` and `Y1` are multiples of the identity.
    pub fn is_scalar(&self, tol: f64) -> bool {
        let scalar = |m: &Matrix2<f64>| {
            (m[(0, 0)] - m[(1, 1)]).abs() <= tol && m[(0, 1)].abs() <= tol && m[(1, 0)].abs() <= tol
        };
        scalar(&self.x) && scalar(&self.y)
    }

    pub fn to_channel(&self) -> GaussianChannel {
        direct_sum(core::slice::from_ref(self))
    }
}

/// Interleaved-ordering channel `⊕_k (X1_k, Y1_k)`.
pub fn direct_sum(blocks: &[OneModeChannel]) -> GaussianChannel {
    let xs: Vec<_> = blocks.iter().map(|b| b.x).collect();
    let ys: Vec<_> = blocks.iter().map(|b| b.y).collect();
    GaussianChannel::new(
        DVector::zeros(2 * blocks.len()),
        linalg::direct_sum(&xs),
        linalg::direct_sum(&ys),
        Ordering::Interleaved,
    )
    .expect("direct sum of 2x2 blocks is well shaped")
}

/// Encoding, decoding and the resulting one-mode blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct UnravelingResult {
    pub encoding: SymplecticOrthogonal,
    pub decoding: SymplecticOrthogonal,
    pub blocks: Vec<OneModeChannel>,
    /// Largest entry of the dressed `X` or `Y` outside the 2×2 mode blocks.
    pub residual: f64,
}

impl UnravelingResult {
    /// Dresses `ch` with the given pair and reads off the mode blocks.
    pub fn from_pair(ch: &GaussianChannel, encoding: SymplecticOrthogonal, decoding: SymplecticOrthogonal) -> Result<Self> {
        let dressed = ch.dress(&encoding, &decoding)?.convert_ordering(Ordering::Interleaved);
        let residual = linalg::max_off_block(dressed.x()).max(linalg::max_off_block(dressed.y()));
        let blocks = (0..ch.modes())
            .map(|k| OneModeChannel {
                x: linalg::block_2x2(dressed.x(), k),
                y: linalg::block_2x2(dressed.y(), k),
            })
            .collect();
        Ok(Self { encoding, decoding, blocks, residual })
    }

    pub fn all_scalar(&self) -> bool {
        self.blocks.iter().all(|b| b.is_scalar(SYMMETRY_TOL))
    }
}

fn require_no_displacement(ch: &GaussianChannel) -> Result<()> {
    if ch.has_displacement() {
        Err(Error::NonzeroDisplacement)
    } else {
        Ok(())
    }
}

struct BlockedParts {
    n: usize,
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl BlockedParts {
    fn new(ch: &GaussianChannel) -> Self {
        let b = ch.convert_ordering(Ordering::Blocked);
        Self { n: ch.modes(), x: b.x().clone(), y: b.y().clone() }
    }

    fn block(m: &DMatrix<f64>, n: usize, r: usize, c: usize) -> DMatrix<f64> {
        m.view((r * n, c * n), (n, n)).into_owned()
    }

    fn y_block(&self, r: usize, c: usize) -> DMatrix<f64> {
        Self::block(&self.y, self.n, r, c)
    }

    fn x_block(&self, r: usize, c: usize) -> DMatrix<f64> {
        Self::block(&self.x, self.n, r, c)
    }

    fn y_coupling(&self) -> f64 {
        linalg::max_abs(&self.y_block(0, 1)).max(linalg::max_abs(&self.y_block(1, 0)))
    }
}

fn commutator_norm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a * b - b * a).norm()
}

fn scalar_deviation(x: &DMatrix<f64>) -> (f64, f64) {
    let x0 = x[(0, 0)];
    let dev = linalg::max_abs(&(x - DMatrix::identity(x.nrows(), x.ncols()) * x0));
    (x0, dev)
}

/// Unravels channels with `X = x I` and `Y = Y_q ⊕ Y_p` (blocked) where the
/// two noise blocks commute: lossy channels with correlated environments
/// and additive classical noise.
pub fn unravel_commuting(ch: &GaussianChannel) -> Result<UnravelingResult> {
    require_no_displacement(ch)?;
    let parts = BlockedParts::new(ch);
    let (x0, dev) = scalar_deviation(&parts.x);
    if dev > STRUCTURE_TOL * x0.abs().max(1.0) {
        return Err(Error::NonScalarX(dev));
    }
    let coupling = parts.y_coupling();
    if coupling > STRUCTURE_TOL {
        return Err(Error::OffDiagonalCoupling(coupling));
    }
    let (yq, yp) = (parts.y_block(0, 0), parts.y_block(1, 1));
    let comm = commutator_norm(&yq, &yp);
    if comm > COMMUTATOR_TOL {
        return Err(Error::NotCommuting(comm));
    }
    // columns of q are joint eigenvectors; D = diag(qᵀ, qᵀ), E = D⁻¹
    let q = linalg::joint_diagonalize(&[&yq, &yp], CLUSTER_TOL);
    let decoding = SymplecticOrthogonal::from_orthogonal(&q.transpose(), ch.ordering())?;
    let encoding = decoding.inverse();
    let ur = UnravelingResult::from_pair(ch, encoding, decoding)?;
    if ur.residual > RESIDUAL_TOL {
        return Err(Error::NotCommuting(ur.residual));
    }
    Ok(ur)
}

/// Unravels inter-symbol interference channels `X = M ⊕ M`,
/// `Y = Y_q ⊕ Y_p` (blocked) through the singular value decomposition
/// `M = U Σ Wᵀ`, with `U` chosen to also diagonalize the noise.
pub fn unravel_isi(ch: &GaussianChannel) -> Result<UnravelingResult> {
    require_no_displacement(ch)?;
    let parts = BlockedParts::new(ch);
    let n = parts.n;
    let m = parts.x_block(0, 0);
    let x_dev = linalg::max_abs(&parts.x_block(0, 1))
        .max(linalg::max_abs(&parts.x_block(1, 0)))
        .max(linalg::max_abs(&(&m - parts.x_block(1, 1))));
    if x_dev > STRUCTURE_TOL * linalg::max_abs(&m).max(1.0) {
        return Err(Error::NotCoDiagonalizable(format!("X is not of the form M ⊕ M (deviation {x_dev:e})")));
    }
    let coupling = parts.y_coupling();
    if coupling > STRUCTURE_TOL {
        return Err(Error::NotCoDiagonalizable(format!("noise couples q and p (magnitude {coupling:e})")));
    }
    let gram = &m * m.transpose();
    let (yq, yp) = (parts.y_block(0, 0), parts.y_block(1, 1));
    let comm = commutator_norm(&gram, &yq)
        .max(commutator_norm(&gram, &yp))
        .max(commutator_norm(&yq, &yp));
    if comm > COMMUTATOR_TOL {
        return Err(Error::NotCoDiagonalizable(format!("M Mᵀ and noise do not commute ({comm:e})")));
    }
    let u = linalg::joint_diagonalize(&[&gram, &yq, &yp], CLUSTER_TOL);
    // singular values descending; stable so degenerate groups keep their order
    let mt_u = m.transpose() * &u;
    let sigma: Vec<f64> = (0..n).map(|k| mt_u.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let u = DMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
    let sigma_max = sigma.iter().fold(0.0_f64, |a, &b| a.max(b));
    let cutoff = 1e-8 * sigma_max.max(1e-300);
    let live: Vec<_> = order
        .iter()
        .take_while(|&&k| sigma[k] > cutoff)
        .map(|&k| mt_u.column(k) / sigma[k])
        .collect();
    let w = if live.is_empty() {
        DMatrix::identity(n, n)
    } else {
        linalg::complete_orthonormal(&DMatrix::from_columns(&live))
    };
    let encoding = SymplecticOrthogonal::from_orthogonal(&w, ch.ordering())?;
    let decoding = SymplecticOrthogonal::from_orthogonal(&u.transpose(), ch.ordering())?;
    let ur = UnravelingResult::from_pair(ch, encoding, decoding)?;
    if ur.residual > RESIDUAL_TOL {
        return Err(Error::NotCoDiagonalizable(format!("residual {:e}", ur.residual)));
    }
    Ok(ur)
}

/// Picks the matching routine: scalar `X` goes to [`unravel_commuting`],
/// anything else to [`unravel_isi`].
pub fn unravel(ch: &GaussianChannel) -> Result<UnravelingResult> {
    require_no_displacement(ch)?;
    let parts = BlockedParts::new(ch);
    let (x0, dev) = scalar_deviation(&parts.x);
    if dev <= STRUCTURE_TOL * x0.abs().max(1.0) {
        unravel_commuting(ch)
    } else {
        unravel_isi(ch)
    }
}

/// Largest discrepancy, over `trials` random Gaussian states, between the
/// dressed channel and the direct sum of the unraveled blocks. Moments and
/// covariance matrices both enter the (Frobenius) distance.
pub fn verify_unraveling<R: Rng + ?Sized>(
    ch: &GaussianChannel,
    ur: &UnravelingResult,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let dressed = ch.dress(&ur.encoding, &ur.decoding)?.convert_ordering(Ordering::Interleaved);
    let blocks = direct_sum(&ur.blocks);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let s = random::state(rng, ch.modes(), Ordering::Interleaved);
        let a = dressed.apply(&s)?;
        let b = blocks.apply(&s)?;
        let dm = (a.mean() - b.mean()).norm_squared();
        let dv = (a.cov().matrix() - b.cov().matrix()).norm_squared();
        worst = worst.max(libm::sqrt(dm + dv));
    }
    Ok(worst)
}

/// Result of the phase-rotation symmetry test.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub channel_symmetric: bool,
    /// Per unraveled block, whether `X1` and `Y1` are scalar. Empty when the
    /// channel could not be unraveled.
    pub blocks_symmetric: Vec<bool>,
    /// Frobenius norms of `[X, J]` and `[Y, J]`.
    pub commutator_norms: (f64, f64),
}

impl SymmetryReport {
    /// True when the channel-level test and the block-level test agree.
    pub fn routes_agree(&self) -> bool {
        self.blocks_symmetric.is_empty() || self.blocks_symmetric.iter().all(|&b| b) == self.channel_symmetric
    }
}

/// Tests invariance under global phase rotations, `R(θ) X R(θ)ᵀ = X` and
/// `R(θ) Y R(θ)ᵀ = Y` for all θ, through commutators with the generator.
pub fn phase_symmetry(ch: &GaussianChannel) -> Result<SymmetryReport> {
    require_no_displacement(ch)?;
    let j = PhaseRotation::generator(ch.modes(), ch.ordering());
    let cx = commutator_norm(ch.x(), &j);
    let cy = commutator_norm(ch.y(), &j);
    let blocks_symmetric = match unravel(ch) {
        Ok(ur) => ur.blocks.iter().map(|b| b.is_scalar(SYMMETRY_TOL)).collect(),
        Err(_) => Vec::new(),
    };
    Ok(SymmetryReport {
        channel_symmetric: cx <= SYMMETRY_TOL && cy <= SYMMETRY_TOL,
        blocks_symmetric,
        commutator_norms: (cx, cy),
    })
}
