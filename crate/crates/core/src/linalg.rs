//! Small dense linear-algebra helpers shared by the channel and unraveling code.

use alloc::vec::Vec;
use nalgebra::{DMatrix, Matrix2, SymmetricEigen};

use crate::error::{Error, Result};

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub(crate) fn is_square(m: &DMatrix<f64>) -> bool {
    m.nrows() == m.ncols()
}

/// Symmetrizes `m` if its asymmetry is below `rel_tol` relative to its largest entry.
pub(crate) fn symmetrize_checked(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let asym = max_abs(&(m - m.transpose()));
    if asym > rel_tol * max_abs(m).max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok((m + m.transpose()) * 0.5)
}

fn is_diagonal(m: &DMatrix<f64>, tol: f64) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].abs() <= tol))
}

/// Eigen-decomposition of a symmetric matrix. Already-diagonal input returns
/// the identity basis untouched so that trivial cases keep trivial encodings.
pub(crate) fn sym_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let scale = max_abs(m).max(1.0);
    if is_diagonal(m, 1e-15 * scale) {
        return ((0..n).map(|i| m[(i, i)]).collect(), DMatrix::identity(n, n));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v))
}

/// Finds an orthogonal `Q` whose columns simultaneously diagonalize every
/// matrix in `mats` (assumed symmetric and pairwise commuting).
///
/// Each matrix refines the eigenspace clusters left by the previous ones;
/// eigenvalues closer than `cluster_tol` (relative) stay in one cluster.
pub(crate) fn joint_diagonalize(mats: &[&DMatrix<f64>], cluster_tol: f64) -> DMatrix<f64> {
    let n = mats.first().map_or(0, |m| m.nrows());
    let mut q = DMatrix::<f64>::identity(n, n);
    let mut clusters: Vec<Vec<usize>> = alloc::vec![(0..n).collect()];
    for m in mats {
        let scale = max_abs(m).max(1.0);
        let mut refined = Vec::new();
        for cols in &clusters {
            if cols.len() == 1 {
                refined.push(cols.clone());
                continue;
            }
            let basis = DMatrix::from_fn(n, cols.len(), |r, c| q[(r, cols[c])]);
            let restricted = basis.transpose() * *m * &basis;
            let restricted = (&restricted + restricted.transpose()) * 0.5;
            let (values, vectors) = sym_eigh(&restricted);
            let rotated = &basis * &vectors;
            for (c, &col) in cols.iter().enumerate() {
                q.set_column(col, &rotated.column(c));
            }
            let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
            for (c, &v) in values.iter().enumerate() {
                match groups
                    .iter_mut()
                    .find(|(rep, _)| (rep - v).abs() <= cluster_tol * scale)
                {
                    Some((_, members)) => members.push(cols[c]),
                    None => groups.push((v, alloc::vec![cols[c]])),
                }
            }
            refined.extend(groups.into_iter().map(|(_, g)| g));
        }
        clusters = refined;
    }
    q
}

#[cfg(test)]
/// Largest magnitude of `qᵀ m q` outside the diagonal.
pub(crate) fn off_diagonal_after(m: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let d = q.transpose() * m * q;
    let n = d.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                worst = worst.max(d[(i, j)].abs());
            }
        }
    }
    worst
}

/// `exp(s·m)` for symmetric `m`.
pub(crate) fn expm_symmetric(m: &DMatrix<f64>, s: f64) -> DMatrix<f64> {
    let (values, vectors) = sym_eigh(m);
    let n = m.nrows();
    let diag = DMatrix::from_fn(n, n, |i, j| if i == j { libm::exp(s * values[i]) } else { 0.0 });
    let out = &vectors * diag * vectors.transpose();
    (&out + out.transpose()) * 0.5
}

/// Largest entry outside the 2×2 diagonal blocks of an interleaved matrix.
pub(crate) fn max_off_block(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i / 2 != j / 2 {
                worst = worst.max(m[(i, j)].abs());
            }
        }
    }
    worst
}

pub(crate) fn block_2x2(m: &DMatrix<f64>, k: usize) -> Matrix2<f64> {
    Matrix2::new(
        m[(2 * k, 2 * k)],
        m[(2 * k, 2 * k + 1)],
        m[(2 * k + 1, 2 * k)],
        m[(2 * k + 1, 2 * k + 1)],
    )
}

/// Interleaved direct sum of 2×2 blocks.
pub(crate) fn direct_sum(blocks: &[Matrix2<f64>]) -> DMatrix<f64> {
    let n = blocks.len();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for (k, b) in blocks.iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                out[(2 * k + r, 2 * k + c)] = b[(r, c)];
            }
        }
    }
    out
}

/// Blocked-ordering matrix `diag(a, b)` from two n×n blocks.
pub(crate) fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (n, n)).copy_from(b);
    out
}

/// Completes the orthonormal columns of `partial` (n×k) to an n×n orthogonal matrix.
pub(crate) fn complete_orthonormal(partial: &DMatrix<f64>) -> DMatrix<f64> {
    let n = partial.nrows();
    let mut cols: Vec<nalgebra::DVector<f64>> =
        partial.column_iter().map(|c| c.into_owned()).collect();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = nalgebra::DVector::<f64>::zeros(n);
        v[e] = 1.0;
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dot(&v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            cols.push(v / norm);
        }
    }
    DMatrix::from_columns(&cols)
}
