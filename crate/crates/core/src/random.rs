//! Random test objects: unitaries, symplectic matrices, physical states and
//! CP-valid channels. All draws go through a caller-supplied generator.

use nalgebra::{Complex, DMatrix, DVector, QR};
use rand::Rng;

use crate::channel::{GaussianChannel, SymplecticOrthogonal};
use crate::gaussian::{CovarianceMatrix, GaussianState, Ordering};
use crate::linalg;

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Real and imaginary parts of a random `n × n` unitary (QR of a random
/// complex matrix).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let z = DMatrix::from_fn(n, n, |_, _| Complex::new(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)));
    let q = QR::new(z).q();
    (q.map(|c| c.re), q.map(|c| c.im))
}

/// Random real orthogonal `n × n` matrix.
pub fn orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let z = DMatrix::from_fn(n, n, |_, _| uniform(rng, -1.0, 1.0));
    QR::new(z).q()
}

pub fn symplectic_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize, ordering: Ordering) -> SymplecticOrthogonal {
    let (a, b) = unitary(rng, n);
    SymplecticOrthogonal::from_unitary(&a, &b, ordering).expect("QR factor is unitary")
}

/// Random symplectic matrix `O1 · Z · O2` with single-mode squeezing
/// parameters drawn from `[-max_squeeze, max_squeeze]`.
pub fn symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize, max_squeeze: f64, ordering: Ordering) -> DMatrix<f64> {
    let o1 = symplectic_orthogonal(rng, n, Ordering::Blocked);
    let o2 = symplectic_orthogonal(rng, n, Ordering::Blocked);
    let mut z = DVector::zeros(2 * n);
    for k in 0..n {
        let r = uniform(rng, -max_squeeze, max_squeeze);
        z[k] = libm::exp(r);
        z[n + k] = libm::exp(-r);
    }
    let s = o1.matrix() * DMatrix::from_diagonal(&z) * o2.matrix();
    Ordering::Blocked.permute_matrix(ordering, &s)
}

/// Random physical covariance matrix with symplectic eigenvalues in `[1/2, 5/2]`.
pub fn covariance_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, ordering: Ordering) -> CovarianceMatrix {
    let photons: alloc::vec::Vec<f64> = (0..n).map(|_| uniform(rng, 0.0, 2.0)).collect();
    let thermal = CovarianceMatrix::thermal(&photons, ordering);
    let s = symplectic(rng, n, 0.8, ordering);
    let v = &s * thermal.matrix() * s.transpose();
    CovarianceMatrix::from_parts_unchecked((&v + v.transpose()) * 0.5, ordering)
}

pub fn state<R: Rng + ?Sized>(rng: &mut R, n: usize, ordering: Ordering) -> GaussianState {
    let mean = DVector::from_fn(2 * n, |_, _| uniform(rng, -2.0, 2.0));
    GaussianState::new(mean, covariance_matrix(rng, n, ordering)).expect("shapes agree")
}

/// Random CP-valid channel with a generic (non-symplectic) `X`.
///
/// `Y = λ I + R Rᵀ` where `λ` is the spectral norm of `(i/2)(X Ω Xᵀ - Ω)`,
/// which is enough to make `Y + (i/2)(Ω - X Ω Xᵀ)` positive.
pub fn valid_channel<R: Rng + ?Sized>(rng: &mut R, n: usize, ordering: Ordering) -> GaussianChannel {
    let dim = 2 * n;
    let x = DMatrix::from_fn(dim, dim, |_, _| uniform(rng, -0.6, 0.6));
    let omega = crate::gaussian::symplectic_form(n, ordering);
    let a = (&x * &omega * x.transpose() - &omega) * 0.5;
    // spectral norm of the Hermitian matrix iA via its real embedding
    let mut embed = DMatrix::zeros(2 * dim, 2 * dim);
    embed.view_mut((0, dim), (dim, dim)).copy_from(&(-&a));
    embed.view_mut((dim, 0), (dim, dim)).copy_from(&a);
    let lambda = -linalg::min_eigenvalue(&embed);
    let r = DMatrix::from_fn(dim, dim, |_, _| uniform(rng, -0.3, 0.3));
    let y = DMatrix::identity(dim, dim) * lambda + &r * r.transpose();
    let d = DVector::from_fn(dim, |_, _| uniform(rng, -1.0, 1.0));
    GaussianChannel::new(d, x, (&y + y.transpose()) * 0.5, ordering).expect("shapes agree")
}
