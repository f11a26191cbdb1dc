//! Sparse kernels behind the forms and solvers: CSR storage, Thomas and
//! conjugate-gradient solves, Sturm bisection for tridiagonal pencils and a
//! restarted shift-invert Lanczos iteration for everything else.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Square sparse matrix in compressed-row form.
#[derive(Clone, Debug)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    /// Builds from unsorted triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).filter(|&(j, _)| j == i).map(|(_, v)| v).sum())
            .collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.apply(x))
    }

    pub fn is_tridiagonal(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, _)| i.abs_diff(j) <= 1))
    }

    /// `(diagonal, superdiagonal)` of a symmetric tridiagonal matrix.
    pub fn tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if !self.is_tridiagonal() {
            return None;
        }
        let diag = self.diagonal();
        let off = (0..self.n.saturating_sub(1))
            .map(|i| self.row(i).filter(|&(j, _)| j == i + 1).map(|(_, v)| v).sum())
            .collect();
        Some((diag, off))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] += v;
            }
        }
        d
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves a symmetric tridiagonal system without pivoting (LDLᵀ).
///
/// Only meant for positive definite matrices; returns `None` on a zero pivot.
pub fn thomas_solve(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 || !denom.is_finite() {
        return None;
    }
    if n > 1 {
        c[0] = off[0] / denom;
    }
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off[i - 1] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        if i + 1 < n {
            c[i] = off[i] / denom;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

#[derive(Clone, Copy, Debug)]
pub struct CgOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for `A x = b`, `A` symmetric
/// positive (semi)definite and consistent. `x` holds the initial guess.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> CgOutcome {
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgOutcome { iterations: 0, relative_residual: 0.0 };
    }
    let inv: Vec<f64> = diag.iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut res = norm(&r) / bnorm;
    let mut it = 0;
    while res > tol && it < max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            break;
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        it += 1;
        res = norm(&r) / bnorm;
        for k in 0..n {
            z[k] = r[k] * inv[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    // Recompute the true residual; the recurrence drifts near machine precision.
    apply(x, &mut ax);
    let true_res = b.iter().zip(&ax).map(|(b, a)| (b - a).powi(2)).sum::<f64>().sqrt() / bnorm;
    CgOutcome { iterations: it, relative_residual: true_res }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        if q.abs() < tiny {
            q = if q < 0.0 { -tiny } else { tiny };
        }
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenpair of a symmetric tridiagonal matrix: bisection on the
/// Sturm count, then inverse iteration just below the bracketed eigenvalue.
pub fn tridiagonal_ground_state(diag: &[f64], off: &[f64]) -> (f64, Vec<f64>) {
    let n = diag.len();
    if n == 1 {
        return (diag[0], vec![1.0]);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let radius = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - radius);
        hi = hi.max(diag[i] + radius);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * scale {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // `lo` has zero eigenvalues below it, so T - σ is positive definite for σ < lo.
    let mut shift = lo - 1e-12 * scale;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = hi;
    for _ in 0..6 {
        let shifted: Vec<f64> = diag.iter().map(|d| d - shift).collect();
        let w = match thomas_solve(&shifted, off, &v) {
            Some(w) => w,
            None => {
                shift -= 1e-9 * scale;
                continue;
            }
        };
        let wn = norm(&w);
        v = w.into_iter().map(|x| x / wn).collect();
        lambda = tridiagonal_rayleigh(diag, off, &v);
        if tridiagonal_residual(diag, off, &v, lambda) <= 1e-15 * scale {
            break;
        }
    }
    (lambda, v)
}

fn tridiagonal_apply(diag: &[f64], off: &[f64], v: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut s = diag[i] * v[i];
            if i > 0 {
                s += off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += off[i] * v[i + 1];
            }
            s
        })
        .collect()
}

fn tridiagonal_rayleigh(diag: &[f64], off: &[f64], v: &[f64]) -> f64 {
    dot(v, &tridiagonal_apply(diag, off, v)) / dot(v, v)
}

fn tridiagonal_residual(diag: &[f64], off: &[f64], v: &[f64], lambda: f64) -> f64 {
    let tv = tridiagonal_apply(diag, off, v);
    tv.iter().zip(v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
pub struct LanczosOutcome {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest eigenpair of the symmetric matrix `C` through Lanczos on
/// `(C - σ)⁻¹`, restarted from the best Ritz vector.
///
/// `solve` must apply `(C - σ)⁻¹` for some `σ` below the spectrum; `apply`
/// applies `C`.
#[allow(clippy::too_many_arguments)]
pub fn shift_invert_lanczos(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    solve: impl Fn(&[f64]) -> Result<Vec<f64>>,
    start: &[f64],
    tol: f64,
    basis_size: usize,
    max_restarts: usize,
) -> Result<LanczosOutcome> {
    let n = start.len();
    let k_max = basis_size.min(n).max(1);
    let mut v: Vec<f64> = start.to_vec();
    let mut best = LanczosOutcome { value: f64::NAN, vector: v.clone(), residual: f64::INFINITY, iterations: 0 };
    let mut total = 0;
    for _ in 0..max_restarts.max(1) {
        let vn = norm(&v);
        if vn == 0.0 || !vn.is_finite() {
            return Err(Error::NoConvergence { solver: "lanczos", iterations: total, residual: best.residual });
        }
        let mut q: Vec<Vec<f64>> = vec![v.iter().map(|x| x / vn).collect()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for k in 0..k_max {
            let mut w = solve(&q[k])?;
            total += 1;
            let a = dot(&w, &q[k]);
            alpha.push(a);
            // full reorthogonalisation, twice
            for _ in 0..2 {
                for qi in &q {
                    let c = dot(&w, qi);
                    w.iter_mut().zip(qi).for_each(|(wj, qj)| *wj -= c * qj);
                }
            }
            let b = norm(&w);
            if k + 1 == k_max || b <= 1e-14 * a.abs().max(1e-300) {
                break;
            }
            beta.push(b);
            q.push(w.into_iter().map(|x| x / b).collect());
        }
        let m = alpha.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imax, _) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty Krylov basis");
        let coeffs = eig.eigenvectors.column(imax);
        let mut y = vec![0.0; n];
        for (qi, c) in q.iter().zip(coeffs.iter()) {
            y.iter_mut().zip(qi).for_each(|(yj, qj)| *yj += c * qj);
        }
        let yn = norm(&y);
        y.iter_mut().for_each(|x| *x /= yn);
        let cy = apply(&y);
        let value = dot(&y, &cy);
        let residual = cy.iter().zip(&y).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt();
        if residual < best.residual {
            best = LanczosOutcome { value, vector: y.clone(), residual, iterations: total };
        }
        if residual <= tol {
            return Ok(best);
        }
        v = y;
    }
    Err(Error::NoConvergence { solver: "lanczos", iterations: total, residual: best.residual })
}
