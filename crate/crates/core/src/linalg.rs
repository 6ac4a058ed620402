//! Dense row-major matrices and a one-sided Jacobi SVD.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CoresetError, Result};

/// Sweep budget for the Jacobi SVD.
pub const MAX_SWEEPS: usize = 60;

/// A dense, row-major matrix of finite `f64` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(CoresetError::InvalidInput(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(CoresetError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(CoresetError::InvalidInput(format!(
                "non-finite entry at row {}, column {}",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix must be non-empty");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(CoresetError::InvalidInput("no rows".into()));
        };
        let cols = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(CoresetError::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(CoresetError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a = self.row(i);
            let o = out.row_mut(i);
            for (k, &aik) in a.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                for (oj, &bkj) in o.iter_mut().zip(other.row(k)) {
                    *oj += aik * bkj;
                }
            }
        }
        Ok(out)
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Keeps only the listed rows, in order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn frobenius_norm(a: &DenseMatrix) -> f64 {
    norm_sq(a.as_slice()).sqrt()
}

/// Thin singular value decomposition `A = U diag(S) Vᵀ`.
///
/// With `m = min(rows, cols)`, `u` is `rows x m`, `v` is `cols x m`, both with
/// orthonormal columns, and `s` is non-increasing.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdFactors {
    pub fn reconstruct(&self) -> DenseMatrix {
        let (n, m, c) = (self.u.rows(), self.s.len(), self.v.rows());
        DenseMatrix::from_fn(n, c, |i, j| {
            (0..m)
                .map(|t| self.u.get(i, t) * self.s[t] * self.v.get(j, t))
                .sum()
        })
    }

    fn transposed(self) -> Self {
        Self {
            u: self.v,
            s: self.s,
            v: self.u,
        }
    }
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Column pairs are swept in cyclic order until every pair is orthogonal to
/// working precision. Each right singular vector is signed so that its
/// largest-magnitude entry is nonnegative, which makes the output a
/// deterministic function of the input.
pub fn svd(a: &DenseMatrix) -> Result<SvdFactors> {
    if a.rows() < a.cols() {
        return svd(&a.transpose()).map(SvdFactors::transposed);
    }
    let (n, m) = (a.rows(), a.cols());

    // Column-major working copies.
    let mut w: Vec<Vec<f64>> = (0..m).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..m)
        .map(|j| (0..m).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let tol = f64::EPSILON * (m as f64);
    // Columns this small are numerically zero; rotating them against large
    // columns only exchanges rounding noise. Below the rank cutoff used later.
    let negligible = (f64::EPSILON * frobenius_norm(a)).powi(2);
    let mut converged = m < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let alpha = norm_sq(&w[p]);
                let beta = norm_sq(&w[q]);
                let gamma = dot(&w[p], &w[q]);
                if alpha <= negligible || beta <= negligible || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(CoresetError::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }

    let norms: Vec<f64> = w.iter().map(|c| norm_sq(c).sqrt()).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let s_max = norms[order[0]];
    let cutoff = s_max * (n.max(m) as f64) * f64::EPSILON;
    let mut s = Vec::with_capacity(m);
    let mut u_cols: Vec<Option<Vec<f64>>> = Vec::with_capacity(m);
    let mut v_cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    for &j in &order {
        let sigma = norms[j];
        v_cols.push(v[j].clone());
        if sigma > cutoff && sigma > 0.0 {
            s.push(sigma);
            u_cols.push(Some(w[j].iter().map(|x| x / sigma).collect()));
        } else {
            s.push(0.0);
            u_cols.push(None);
        }
    }
    let mut u_cols = complete_orthonormal(u_cols, n);

    for (uj, vj) in u_cols.iter_mut().zip(v_cols.iter_mut()) {
        let lead = vj
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bi, bv), (i, x)| {
                if x.abs() > bv.abs() {
                    (i, *x)
                } else {
                    (bi, bv)
                }
            })
            .1;
        if lead < 0.0 {
            uj.iter_mut().for_each(|x| *x = -*x);
            vj.iter_mut().for_each(|x| *x = -*x);
        }
    }

    let u = DenseMatrix::from_fn(n, m, |i, j| u_cols[j][i]);
    let v = DenseMatrix::from_fn(m, m, |i, j| v_cols[j][i]);
    Ok(SvdFactors { u, s, v })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    for (xp, xq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (a, b) = (*xp, *xq);
        *xp = c * a - s * b;
        *xq = s * a + c * b;
    }
}

/// Fills the `None` slots with unit vectors orthogonal to every other column.
fn complete_orthonormal(cols: Vec<Option<Vec<f64>>>, n: usize) -> Vec<Vec<f64>> {
    let mut fixed: Vec<Vec<f64>> = cols.iter().flatten().cloned().collect();
    let mut candidate = 0;
    let mut out = Vec::with_capacity(cols.len());
    for c in cols {
        match c {
            Some(c) => out.push(c),
            None => loop {
                assert!(candidate < n, "ran out of basis vectors to complete U");
                let mut e = vec![0.0; n];
                e[candidate] = 1.0;
                candidate += 1;
                for _ in 0..2 {
                    for f in &fixed {
                        let proj = dot(&e, f);
                        e.iter_mut().zip(f).for_each(|(x, y)| *x -= proj * y);
                    }
                }
                let norm = norm_sq(&e).sqrt();
                if norm > 1e-6 {
                    e.iter_mut().for_each(|x| *x /= norm);
                    fixed.push(e.clone());
                    out.push(e);
                    break;
                }
            },
        }
    }
    out
}

/// A `d x cols` matrix with orthonormal columns, from Gram-Schmidt on seeded
/// Gaussian columns.
pub fn random_orthogonal(d: usize, cols: usize, seed: u64) -> Result<DenseMatrix> {
    if cols == 0 || cols > d {
        return Err(CoresetError::InvalidParameter {
            name: "cols",
            reason: format!("need 1 <= cols <= d = {d}, got {cols}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(&g, b);
                g.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = norm_sq(&g).sqrt();
        if norm > 1e-8 {
            g.iter_mut().for_each(|x| *x /= norm);
            basis.push(g);
        }
    }
    Ok(DenseMatrix::from_fn(d, cols, |i, j| basis[j][i]))
}
