//! Gaussian states: quadrature orderings, the symplectic form, covariance
//! matrices, symplectic eigenvalues and von Neumann entropy.
//!
//! Conventions: `[q, p] = i`, vacuum covariance matrix `I/2`, and a
//! covariance matrix is physical iff every symplectic eigenvalue is at
//! least `1/2`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Schur};

use crate::error::{Error, Result};
use crate::linalg;

/// Absolute tolerance used when checking `nu >= 1/2`.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Absolute tolerance when pairing `±i nu` eigenvalues of `Omega V`.
pub const PAIRING_TOL: f64 = 1e-9;
/// Relative asymmetry below which inputs are silently symmetrized.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Order of the canonical variables in a phase-space vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// `(q1, p1, q2, p2, ..., qn, pn)`
    Interleaved,
    /// `(q1, ..., qn, p1, ..., pn)`
    Blocked,
}

impl Ordering {
    /// Index map such that `target[i] = source[map[i]]` when converting a
    /// `2n`-vector from `self` to `target`.
    pub fn index_map(self, target: Ordering, n: usize) -> Vec<usize> {
        (0..2 * n)
            .map(|i| match (self, target) {
                (a, b) if a == b => i,
                // target is Blocked, source Interleaved
                (Ordering::Interleaved, Ordering::Blocked) => {
                    if i < n {
                        2 * i
                    } else {
                        2 * (i - n) + 1
                    }
                }
                _ => {
                    if i % 2 == 0 {
                        i / 2
                    } else {
                        n + i / 2
                    }
                }
            })
            .collect()
    }

    pub fn permute_vector(self, target: Ordering, v: &DVector<f64>) -> DVector<f64> {
        let map = self.index_map(target, v.len() / 2);
        DVector::from_fn(v.len(), |i, _| v[map[i]])
    }

    pub fn permute_matrix(self, target: Ordering, m: &DMatrix<f64>) -> DMatrix<f64> {
        let map = self.index_map(target, m.nrows() / 2);
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(map[i], map[j])])
    }
}

/// The `n`-mode symplectic form in the requested ordering.
pub fn symplectic_form(n: usize, ordering: Ordering) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    match ordering {
        Ordering::Interleaved => {
            for k in 0..n {
                omega[(2 * k, 2 * k + 1)] = 1.0;
                omega[(2 * k + 1, 2 * k)] = -1.0;
            }
        }
        Ordering::Blocked => {
            for k in 0..n {
                omega[(k, n + k)] = 1.0;
                omega[(n + k, k)] = -1.0;
            }
        }
    }
    omega
}

/// Real symmetric `2n × 2n` covariance matrix tagged with its ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
    ordering: Ordering,
}

impl CovarianceMatrix {
    /// Builds a physical covariance matrix: symmetric and satisfying the
    /// uncertainty relation.
    pub fn new(matrix: DMatrix<f64>, ordering: Ordering) -> Result<Self> {
        let cm = Self::classical(matrix, ordering)?;
        let nu = symplectic_eigenvalues(&cm)?;
        if let Some(&low) = nu.first() {
            if low < 0.5 - PHYSICAL_TOL {
                return Err(Error::Unphysical(low));
            }
        }
        Ok(cm)
    }

    /// Builds a symmetric covariance matrix without the uncertainty check,
    /// as used for classical noise.
    pub fn classical(matrix: DMatrix<f64>, ordering: Ordering) -> Result<Self> {
        if !linalg::is_square(&matrix) || !matrix.nrows().is_multiple_of(2) || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 2 * (matrix.nrows() / 2).max(1),
                got: matrix.ncols(),
            });
        }
        let matrix = linalg::symmetrize_checked(&matrix, SYMMETRY_TOL)?;
        Ok(Self { matrix, ordering })
    }

    /// Vacuum state `I/2`.
    pub fn vacuum(n: usize, ordering: Ordering) -> Self {
        Self::thermal(&alloc::vec![0.0; n], ordering)
    }

    /// Product of thermal states with the given mean photon numbers.
    pub fn thermal(mean_photons: &[f64], ordering: Ordering) -> Self {
        let n = mean_photons.len();
        let diag = DVector::from_fn(2 * n, |i, _| {
            let k = match ordering {
                Ordering::Interleaved => i / 2,
                Ordering::Blocked => i % n,
            };
            mean_photons[k] + 0.5
        });
        Self { matrix: DMatrix::from_diagonal(&diag), ordering }
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

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Re-expresses the matrix in `target` ordering. Pure index permutation.
    pub fn convert_ordering(&self, target: Ordering) -> Self {
        Self {
            matrix: self.ordering.permute_matrix(target, &self.matrix),
            ordering: target,
        }
    }

    /// Direct sum `self ⊕ other`, in `self`'s ordering.
    pub fn direct_sum(&self, other: &CovarianceMatrix) -> Self {
        let a = self.convert_ordering(Ordering::Interleaved);
        let b = other.convert_ordering(Ordering::Interleaved);
        let (na, nb) = (a.matrix.nrows(), b.matrix.nrows());
        let mut m = DMatrix::zeros(na + nb, na + nb);
        m.view_mut((0, 0), (na, na)).copy_from(&a.matrix);
        m.view_mut((na, na), (nb, nb)).copy_from(&b.matrix);
        Self { matrix: m, ordering: Ordering::Interleaved }.convert_ordering(self.ordering)
    }

    pub(crate) fn from_parts_unchecked(matrix: DMatrix<f64>, ordering: Ordering) -> Self {
        Self { matrix, ordering }
    }
}

/// First moments plus covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: CovarianceMatrix,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, cov: CovarianceMatrix) -> Result<Self> {
        if mean.len() != cov.matrix.nrows() {
            return Err(Error::DimensionMismatch { expected: cov.matrix.nrows(), got: mean.len() });
        }
        if let Some(bad) = mean.iter().find(|v| !v.is_finite()) {
            return Err(Error::DomainError(*bad));
        }
        Ok(Self { mean, cov })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn modes(&self) -> usize {
        self.cov.modes()
    }

    pub fn ordering(&self) -> Ordering {
        self.cov.ordering
    }

    pub fn convert_ordering(&self, target: Ordering) -> Self {
        Self {
            mean: self.cov.ordering.permute_vector(target, &self.mean),
            cov: self.cov.convert_ordering(target),
        }
    }
}

/// Symplectic eigenvalues, ascending, from the spectrum `{±i nu_k}` of `Omega V`.
pub fn symplectic_eigenvalues(cm: &CovarianceMatrix) -> Result<Vec<f64>> {
    symplectic_spectrum(&cm.matrix, cm.ordering)
}

pub(crate) fn symplectic_spectrum(v: &DMatrix<f64>, ordering: Ordering) -> Result<Vec<f64>> {
    let n = v.nrows() / 2;
    if n == 1 {
        // det(V) = nu^2 for a single mode; skip the Schur iteration.
        let det = v[(0, 0)] * v[(1, 1)] - v[(0, 1)] * v[(1, 0)];
        if det < 0.0 {
            return Err(Error::PairingFailure(det.abs()));
        }
        return Ok(alloc::vec![libm::sqrt(det)]);
    }
    let omega_v = symplectic_form(n, ordering) * v;
    let schur = Schur::try_new(omega_v, f64::EPSILON, 10_000).ok_or(Error::NoConvergence)?;
    let eig = schur.complex_eigenvalues();
    let mut moduli = Vec::with_capacity(2 * n);
    for z in eig.iter() {
        let scale = libm::hypot(z.re, z.im).max(1.0);
        if z.re.abs() > PAIRING_TOL * scale {
            return Err(Error::PairingFailure(z.re.abs()));
        }
        moduli.push(z.im.abs());
    }
    moduli.sort_by(f64::total_cmp);
    let mut nu = Vec::with_capacity(n);
    for pair in moduli.chunks(2) {
        let gap = (pair[0] - pair[1]).abs();
        if gap > PAIRING_TOL * pair[1].max(1.0) {
            return Err(Error::PairingFailure(gap));
        }
        nu.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(nu)
}

const LN_2: f64 = core::f64::consts::LN_2;

/// `g(x) = (x+1) log2(x+1) - x log2(x)`, the entropy in bits of a thermal
/// state with mean photon number `x`.
pub fn g_function(x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::DomainError(x));
    }
    Ok(g_unchecked(x))
}

/// `g` for `x >= 0`; negative arguments are treated as 0.
#[inline]
pub(crate) fn g_unchecked(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    // (x+1)log(x+1) - x log x = log(1+x) + x log(1 + 1/x)
    (libm::log1p(x) + x * libm::log1p(1.0 / x)) / LN_2
}

/// Derivative `g'(t) = log2((t+1)/t)`; infinite at `t = 0`.
#[inline]
pub fn g_prime(t: f64) -> f64 {
    if t <= 0.0 {
        return f64::INFINITY;
    }
    libm::log1p(1.0 / t) / LN_2
}

/// Inverse of `g'` on `(0, inf)`: the `t` with `g'(t) = slope`.
#[inline]
pub(crate) fn g_prime_inverse(slope: f64) -> f64 {
    if slope == f64::INFINITY {
        return 0.0;
    }
    1.0 / libm::expm1(slope * LN_2)
}

/// Von Neumann entropy in bits, `sum_k g(nu_k - 1/2)`.
pub fn entropy(cm: &CovarianceMatrix) -> Result<f64> {
    let nu = symplectic_eigenvalues(cm)?;
    entropy_from_spectrum(&nu)
}

pub(crate) fn entropy_from_spectrum(nu: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &v in nu {
        if v < 0.5 - PHYSICAL_TOL {
            return Err(Error::Unphysical(v));
        }
        total += g_unchecked(v - 0.5);
    }
    Ok(total)
}

/// Entropy of a single-mode covariance matrix given as a 2×2 block.
#[inline]
pub(crate) fn entropy_one_mode(v: &nalgebra::Matrix2<f64>) -> f64 {
    let det = v[(0, 0)] * v[(1, 1)] - v[(0, 1)] * v[(1, 0)];
    g_unchecked(libm::sqrt(det.max(0.25)) - 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn ordering_conversion_is_a_permutation() {
        let v = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![1.0, 2.0, 3.0, 4.0]));
        let cm = CovarianceMatrix::classical(v, Ordering::Interleaved).unwrap();
        let blocked = cm.convert_ordering(Ordering::Blocked);
        let expected = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![1.0, 3.0, 2.0, 4.0]));
        assert_eq!(blocked.matrix(), &expected);
        assert_eq!(cm.convert_ordering(Ordering::Interleaved), cm);
    }

    #[test]
    fn ordering_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6 {
            let cm = random::covariance_matrix(&mut rng, n, Ordering::Interleaved);
            let back = cm.convert_ordering(Ordering::Blocked).convert_ordering(Ordering::Interleaved);
            assert_eq!(back, cm);
        }
    }

    #[test]
    fn symplectic_forms_agree_under_permutation() {
        for n in 1..5 {
            let a = symplectic_form(n, Ordering::Interleaved);
            let b = symplectic_form(n, Ordering::Blocked);
            assert_eq!(Ordering::Interleaved.permute_matrix(Ordering::Blocked, &a), b);
            let sq = &b * &b + DMatrix::<f64>::identity(2 * n, 2 * n);
            assert_eq!(linalg::max_abs(&sq), 0.0);
            assert_eq!(b.transpose(), -&b);
        }
    }

    #[test]
    fn vacuum_and_squeezed_vacuum_are_pure() {
        let vac = CovarianceMatrix::vacuum(1, Ordering::Interleaved);
        assert!(approx(symplectic_eigenvalues(&vac).unwrap()[0], 0.5, 1e-15));
        assert_eq!(entropy(&vac).unwrap(), 0.0);
        let r: f64 = 0.7;
        let sq = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![
            libm::exp(2.0 * r) / 2.0,
            libm::exp(-2.0 * r) / 2.0
        ]));
        let cm = CovarianceMatrix::new(sq, Ordering::Interleaved).unwrap();
        assert!(approx(symplectic_eigenvalues(&cm).unwrap()[0], 0.5, 1e-12));
    }

    #[test]
    fn recovers_constructed_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ordering in [Ordering::Interleaved, Ordering::Blocked] {
            let s = random::symplectic(&mut rng, 2, 0.8, ordering);
            let d = CovarianceMatrix::thermal(&[0.2, 0.8], ordering);
            let v = &s * d.matrix() * s.transpose();
            let cm = CovarianceMatrix::new(v, ordering).unwrap();
            let nu = symplectic_eigenvalues(&cm).unwrap();
            assert!(approx(nu[0], 0.7, 1e-9) && approx(nu[1], 1.3, 1e-9), "{nu:?}");
        }
    }

    #[test]
    fn g_values() {
        assert_eq!(g_function(0.0).unwrap(), 0.0);
        assert!(approx(g_function(1.0).unwrap(), 2.0, 1e-15));
        // 1.5 log2 1.5 - 0.5 log2 0.5
        let direct = 1.5 * libm::log2(1.5) - 0.5 * libm::log2(0.5);
        assert!(approx(g_function(0.5).unwrap(), direct, 1e-15));
        assert!(approx(direct, 1.377_443_751_081_734_4, 1e-15));
        assert_eq!(g_function(-1e-3), Err(Error::DomainError(-1e-3)));
        // tiny arguments stay accurate: g(x) ~ x log2(e/x)
        let x = 1e-12;
        let series = x * (1.0 / LN_2 - libm::log2(x));
        assert!(((g_function(x).unwrap() - series) / series).abs() < 1e-9);
    }

    #[test]
    fn g_is_increasing_and_concave() {
        let pts: Vec<f64> = (0..20).map(|i| libm::pow(10.0, -3.0 + 5.0 * i as f64 / 19.0)).collect();
        for &x in &pts {
            let h = 1e-5 * x;
            let fd = (g_unchecked(x + h) - g_unchecked(x - h)) / (2.0 * h);
            assert!(fd > 0.0);
            assert!(((fd - g_prime(x)) / g_prime(x)).abs() < 1e-6, "x={x}");
            let second = g_unchecked(x + 10.0 * h) - 2.0 * g_unchecked(x) + g_unchecked(x - 10.0 * h);
            assert!(second < 0.0, "x={x}");
        }
        for slope in [0.01, 0.5, 2.0, 9.0] {
            assert!(approx(g_prime(g_prime_inverse(slope)), slope, 1e-12));
        }
    }

    #[test]
    fn thermal_entropy() {
        let cm = CovarianceMatrix::thermal(&[1.0], Ordering::Interleaved);
        assert!(approx(entropy(&cm).unwrap(), 2.0, 1e-12));
        let cm = CovarianceMatrix::thermal(&[1.0, 2.0], Ordering::Blocked);
        // g(2) = 3 log2 3 - 2
        let g2 = 3.0 * libm::log2(3.0) - 2.0;
        assert!(approx(g2, 2.754_887_502_163_468, 1e-14));
        assert!(approx(entropy(&cm).unwrap(), 2.0 + g2, 1e-12));
    }

    #[test]
    fn entropy_rejects_unphysical() {
        let cm = CovarianceMatrix::classical(DMatrix::identity(2, 2) * 0.3, Ordering::Interleaved).unwrap();
        assert!(matches!(entropy(&cm), Err(Error::Unphysical(_))));
        assert!(matches!(
            CovarianceMatrix::new(DMatrix::identity(2, 2) * 0.3, Ordering::Interleaved),
            Err(Error::Unphysical(_))
        ));
    }

    #[test]
    fn asymmetric_input_rejected_or_symmetrized() {
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = 1e-14;
        let cm = CovarianceMatrix::new(m.clone(), Ordering::Interleaved).unwrap();
        assert_eq!(cm.matrix()[(0, 1)], cm.matrix()[(1, 0)]);
        m[(0, 1)] = 1e-3;
        assert!(matches!(CovarianceMatrix::new(m, Ordering::Interleaved), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn indefinite_matrix_fails_pairing() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![1.0, -1.0, 1.0, 1.0]));
        let cm = CovarianceMatrix::classical(m, Ordering::Interleaved).unwrap();
        assert!(matches!(symplectic_eigenvalues(&cm), Err(Error::PairingFailure(_))));
    }
}
