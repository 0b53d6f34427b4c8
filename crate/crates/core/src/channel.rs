//! Gaussian channel triads `(d, X, Y)` and the passive (symplectic and
//! orthogonal) unitaries used as encodings and decodings.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{symplectic_form, CovarianceMatrix, GaussianState, Ordering, SYMMETRY_TOL};
use crate::linalg;

/// Eigenvalue threshold for the positivity tests in [`GaussianChannel::validate`].
pub const CP_TOL: f64 = 1e-10;
/// Tolerance on `S Ω Sᵀ = Ω`, `Sᵀ S = I` and on unitarity of `A + iB`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// A Gaussian channel acting as `(m, V) -> (X m + d, X V Xᵀ + Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    d: DVector<f64>,
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    ordering: Ordering,
}

/// Outcome of the complete-positivity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub valid: bool,
    /// Smallest eigenvalue of `Y + (i/2)(Ω - X Ω Xᵀ)`.
    pub min_eig: f64,
    /// Smallest eigenvalue of `Y`.
    pub min_noise_eig: f64,
}

impl GaussianChannel {
    /// Builds a triad. Only shapes and the symmetry of `Y` are checked here;
    /// use [`validate`](Self::validate) for complete positivity.
    pub fn new(d: DVector<f64>, x: DMatrix<f64>, y: DMatrix<f64>, ordering: Ordering) -> Result<Self> {
        let dim = x.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || !linalg::is_square(&x) {
            return Err(Error::DimensionMismatch { expected: 2 * (dim / 2).max(1), got: x.ncols() });
        }
        for got in [y.nrows(), y.ncols(), d.len()] {
            if got != dim {
                return Err(Error::DimensionMismatch { expected: dim, got });
            }
        }
        let y = linalg::symmetrize_checked(&y, SYMMETRY_TOL)?;
        Ok(Self { d, x, y, ordering })
    }

    pub fn identity(n: usize, ordering: Ordering) -> Self {
        Self {
            d: DVector::zeros(2 * n),
            x: DMatrix::identity(2 * n, 2 * n),
            y: DMatrix::zeros(2 * n, 2 * n),
            ordering,
        }
    }

    /// The unitary channel `(0, S, 0)`.
    pub fn unitary(s: &SymplecticOrthogonal) -> Self {
        let n = s.modes();
        Self {
            d: DVector::zeros(2 * n),
            x: s.matrix.clone(),
            y: DMatrix::zeros(2 * n, 2 * n),
            ordering: s.ordering,
        }
    }

    pub fn modes(&self) -> usize {
        self.x.nrows() / 2
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn convert_ordering(&self, target: Ordering) -> Self {
        let from = self.ordering;
        Self {
            d: from.permute_vector(target, &self.d),
            x: from.permute_matrix(target, &self.x),
            y: from.permute_matrix(target, &self.y),
            ordering: target,
        }
    }

    fn check_compatible(&self, n: usize, ordering: Ordering) -> Result<()> {
        if n != self.modes() {
            return Err(Error::DimensionMismatch { expected: 2 * self.modes(), got: 2 * n });
        }
        if ordering != self.ordering {
            return Err(Error::OrderingMismatch);
        }
        Ok(())
    }

    /// Action on a Gaussian state.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        self.check_compatible(state.modes(), state.ordering())?;
        let mean = &self.x * state.mean() + &self.d;
        let v = &self.x * state.cov().matrix() * self.x.transpose() + &self.y;
        let v = (&v + v.transpose()) * 0.5;
        GaussianState::new(mean, CovarianceMatrix::from_parts_unchecked(v, self.ordering))
    }

    /// `second ∘ self`: apply `self` first, then `second`.
    pub fn then(&self, second: &GaussianChannel) -> Result<GaussianChannel> {
        compose(second, self)
    }

    /// Checks `Y ⪰ 0` and `Y + (i/2)(Ω - X Ω Xᵀ) ⪰ 0` up to [`CP_TOL`].
    pub fn validate(&self) -> Validity {
        let n = self.modes();
        let omega = symplectic_form(n, self.ordering);
        // Hermitian H = Y + iA; its real embedding [[Y, -A], [A, Y]] has the
        // spectrum of H with every eigenvalue doubled.
        let a = (&omega - &self.x * &omega * self.x.transpose()) * 0.5;
        let a = (&a - a.transpose()) * 0.5;
        let dim = 2 * n;
        let mut embed = DMatrix::zeros(2 * dim, 2 * dim);
        embed.view_mut((0, 0), (dim, dim)).copy_from(&self.y);
        embed.view_mut((dim, dim), (dim, dim)).copy_from(&self.y);
        embed.view_mut((0, dim), (dim, dim)).copy_from(&(-&a));
        embed.view_mut((dim, 0), (dim, dim)).copy_from(&a);
        let min_eig = linalg::min_eigenvalue(&embed);
        let min_noise_eig = linalg::min_eigenvalue(&self.y);
        Validity { valid: min_eig >= -CP_TOL && min_noise_eig >= -CP_TOL, min_eig, min_noise_eig }
    }

    /// Drops the displacement, returning the displacement-free channel and
    /// the removed vector.
    pub fn eliminate_displacement(&self) -> (GaussianChannel, DVector<f64>) {
        let mut ch = self.clone();
        let d = core::mem::replace(&mut ch.d, DVector::zeros(self.d.len()));
        (ch, d)
    }

    pub fn has_displacement(&self) -> bool {
        self.d.iter().any(|v| *v != 0.0)
    }

    /// Dressed channel `(0, D X E, D Y Dᵀ)`.
    pub fn dress(&self, enc: &SymplecticOrthogonal, dec: &SymplecticOrthogonal) -> Result<GaussianChannel> {
        if self.has_displacement() {
            return Err(Error::NonzeroDisplacement);
        }
        for s in [enc, dec] {
            if s.modes() != self.modes() {
                return Err(Error::DimensionMismatch { expected: 2 * self.modes(), got: 2 * s.modes() });
            }
        }
        let e = enc.convert_ordering(self.ordering);
        let dm = dec.convert_ordering(self.ordering);
        let y = &dm.matrix * &self.y * dm.matrix.transpose();
        Ok(Self {
            d: self.d.clone(),
            x: &dm.matrix * &self.x * &e.matrix,
            y: (&y + y.transpose()) * 0.5,
            ordering: self.ordering,
        })
    }
}

/// Composition `second ∘ first` with triad `(X'd + d', X'X, X'YX'ᵀ + Y')`.
pub fn compose(second: &GaussianChannel, first: &GaussianChannel) -> Result<GaussianChannel> {
    second.check_compatible(first.modes(), first.ordering)?;
    let y = &second.x * &first.y * second.x.transpose() + &second.y;
    Ok(GaussianChannel {
        d: &second.x * &first.d + &second.d,
        x: &second.x * &first.x,
        y: (&y + y.transpose()) * 0.5,
        ordering: first.ordering,
    })
}

/// A passive Gaussian unitary: symplectic and orthogonal, hence
/// energy preserving. In blocked ordering it reads `[[A, B], [-B, A]]`
/// with `A + iB` unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOrthogonal {
    matrix: DMatrix<f64>,
    ordering: Ordering,
}

impl SymplecticOrthogonal {
    pub fn new(matrix: DMatrix<f64>, ordering: Ordering) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || !linalg::is_square(&matrix) {
            return Err(Error::DimensionMismatch { expected: 2 * (dim / 2).max(1), got: matrix.ncols() });
        }
        let omega = symplectic_form(dim / 2, ordering);
        let symp = linalg::max_abs(&(&matrix * &omega * matrix.transpose() - &omega));
        let orth = linalg::max_abs(&(matrix.transpose() * &matrix - DMatrix::identity(dim, dim)));
        let dev = symp.max(orth);
        if dev > SYMPLECTIC_TOL {
            return Err(Error::NotSymplecticOrthogonal(dev));
        }
        Ok(Self { matrix, ordering })
    }

    /// Builds `[[A, B], [-B, A]]` (blocked) from the real and imaginary parts
    /// of an `n × n` unitary, then expresses it in `ordering`.
    pub fn from_unitary(a: &DMatrix<f64>, b: &DMatrix<f64>, ordering: Ordering) -> Result<Self> {
        let n = a.nrows();
        if !linalg::is_square(a) || b.shape() != a.shape() || n == 0 {
            return Err(Error::DimensionMismatch { expected: n, got: b.nrows() });
        }
        let re = a * a.transpose() + b * b.transpose() - DMatrix::identity(n, n);
        let im = b * a.transpose() - a * b.transpose();
        let dev = linalg::max_abs(&re).max(linalg::max_abs(&im));
        if dev > SYMPLECTIC_TOL {
            return Err(Error::NotUnitary(dev));
        }
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(a);
        m.view_mut((0, n), (n, n)).copy_from(b);
        m.view_mut((n, 0), (n, n)).copy_from(&(-b));
        m.view_mut((n, n), (n, n)).copy_from(a);
        Ok(Self { matrix: Ordering::Blocked.permute_matrix(ordering, &m), ordering })
    }

    /// `diag(O, O)` in blocked ordering for a real orthogonal `O`.
    pub fn from_orthogonal(o: &DMatrix<f64>, ordering: Ordering) -> Result<Self> {
        Self::from_unitary(o, &DMatrix::zeros(o.nrows(), o.ncols()), ordering)
    }

    pub fn identity(n: usize, ordering: Ordering) -> Self {
        Self { matrix: DMatrix::identity(2 * n, 2 * n), ordering }
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> Self {
        Self { matrix: self.matrix.transpose(), ordering: self.ordering }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &SymplecticOrthogonal) -> Self {
        let other = other.convert_ordering(self.ordering);
        Self { matrix: &self.matrix * &other.matrix, ordering: self.ordering }
    }

    pub fn convert_ordering(&self, target: Ordering) -> Self {
        Self { matrix: self.ordering.permute_matrix(target, &self.matrix), ordering: target }
    }

    /// Real and imaginary parts `(A, B)` of the underlying unitary.
    pub fn unitary_parts(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let m = self.ordering.permute_matrix(Ordering::Blocked, &self.matrix);
        let n = self.modes();
        (m.view((0, 0), (n, n)).into_owned(), m.view((0, n), (n, n)).into_owned())
    }

    /// Transforms a covariance matrix as `S V Sᵀ`.
    pub fn transform(&self, cm: &CovarianceMatrix) -> CovarianceMatrix {
        let s = self.convert_ordering(cm.ordering());
        let v = &s.matrix * cm.matrix() * s.matrix.transpose();
        CovarianceMatrix::from_parts_unchecked((&v + v.transpose()) * 0.5, cm.ordering())
    }
}

/// Global phase rotation by `theta` on `n` modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRotation {
    pub modes: usize,
    pub theta: f64,
}

impl PhaseRotation {
    pub fn new(modes: usize, theta: f64) -> Self {
        Self { modes, theta }
    }

    /// `⊕_k R1(θ)` in interleaved ordering, `R1 = [[cos, -sin], [sin, cos]]`.
    pub fn matrix(&self, ordering: Ordering) -> DMatrix<f64> {
        let (s, c) = libm::sincos(self.theta);
        let n = self.modes;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            m[(2 * k, 2 * k)] = c;
            m[(2 * k, 2 * k + 1)] = -s;
            m[(2 * k + 1, 2 * k)] = s;
            m[(2 * k + 1, 2 * k + 1)] = c;
        }
        Ordering::Interleaved.permute_matrix(ordering, &m)
    }

    pub fn to_symplectic_orthogonal(&self, ordering: Ordering) -> SymplecticOrthogonal {
        SymplecticOrthogonal { matrix: self.matrix(ordering), ordering }
    }

    /// The generator `J` with `R(θ) = exp(θ J)`; per mode `[[0, -1], [1, 0]]`.
    pub fn generator(modes: usize, ordering: Ordering) -> DMatrix<f64> {
        -symplectic_form(modes, ordering)
    }

    pub fn then(&self, other: &PhaseRotation) -> PhaseRotation {
        PhaseRotation { modes: self.modes, theta: self.theta + other.theta }
    }
}
