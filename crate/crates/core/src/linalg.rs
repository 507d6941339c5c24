//! Dense complex matrices and a Hermitian eigensolver.
//!
//! The solver reduces to real symmetric tridiagonal form with Householder
//! reflections (plus a diagonal phase change) and then runs implicit-shift QL.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let v: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&v)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^* self`, computed without forming the adjoint.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut out = Self::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let a = row[i].conj();
                if a == ZERO {
                    continue;
                }
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `D_left * self * D_right` for real diagonal factors.
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> Self {
        assert_eq!(left.len(), self.rows);
        assert_eq!(right.len(), self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * (left[i] * right[j]))
    }

    /// `(self + self^*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Principal submatrix on the given index list.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// `max_ij |A_ij - A_ji^*|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diag_real(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn check_finite(&self) -> Result<()> {
        for (idx, a) in self.data.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::NonFinite {
                    row: idx / self.cols,
                    col: idx % self.cols,
                });
            }
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// How much eigenvector information to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vectors {
    None,
    /// Only the component of each eigenvector along the first basis vector.
    FirstComponent,
    Full,
}

/// Output of [`eigh`]: ascending eigenvalues with optional vectors.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]` (when `Vectors::Full`).
    pub vectors: Option<CMatrix>,
    /// `v_i[0]` for each eigenvector (when `Vectors::FirstComponent` or `Full`).
    pub first: Option<Vec<Complex64>>,
}

/// Eigen-decomposition of a Hermitian matrix. Only the lower triangle is read.
pub fn eigh(a: &CMatrix, want: Vectors) -> Result<Eigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    a.check_finite()?;
    let n = a.rows();
    if n == 0 {
        return Ok(Eigen {
            values: vec![],
            vectors: (want == Vectors::Full).then(|| CMatrix::zeros(0, 0)),
            first: (want != Vectors::None).then(Vec::new),
        });
    }

    let mut w = a.clone();
    // Mirror the lower triangle so the working copy is exactly Hermitian.
    for i in 0..n {
        w[(i, i)] = Complex64::new(w[(i, i)].re, 0.0);
        for j in 0..i {
            w[(j, i)] = w[(i, j)].conj();
        }
    }
    let (diag, off, reflectors) = tridiagonalize(&mut w);

    // Phase change making the subdiagonal real and nonnegative.
    let mut phase = vec![ONE; n];
    let mut e = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let r = off[i].norm();
        e[i] = r;
        phase[i + 1] = if r > 0.0 { phase[i] * (off[i] / r) } else { phase[i] };
    }
    let mut d = diag;

    match want {
        Vectors::None => {
            tql(&mut d, &mut e, None)?;
            let mut values = d;
            values.sort_by(f64::total_cmp);
            Ok(Eigen {
                values,
                vectors: None,
                first: None,
            })
        }
        Vectors::FirstComponent => {
            // The reflectors fix the first basis vector, so the first row of
            // the eigenvector matrix is the first row of the tridiagonal one.
            let mut z = vec![0.0; n];
            z[0] = 1.0;
            let mut zt = RowStore::Real(vec![z]);
            tql(&mut d, &mut e, Some(&mut zt))?;
            let RowStore::Real(rows) = zt else { unreachable!() };
            let order = ascending_order(&d);
            let values = order.iter().map(|&i| d[i]).collect();
            let first = order.iter().map(|&i| phase[0] * rows[0][i]).collect();
            Ok(Eigen {
                values,
                vectors: None,
                first: Some(first),
            })
        }
        Vectors::Full => {
            // Rows of `q` are the columns of Q * diag(phase).
            let mut q = vec![vec![ZERO; n]; n];
            for (i, qi) in q.iter_mut().enumerate() {
                qi[i] = phase[i];
            }
            // Apply reflectors in reverse: Q = H_0 H_1 ... H_{n-3}.
            // Column j of Q D equals Q e_j phase_j; we build it as
            // H_0 (H_1 (... e_j)) phase_j. Stored row-wise as column vectors.
            for (k, (v, tau)) in reflectors.iter().enumerate().rev() {
                let off = k + 1;
                for col in q.iter_mut() {
                    let s: Complex64 = v.iter().zip(&col[off..]).map(|(vi, ci)| vi.conj() * ci).sum();
                    if s == ZERO {
                        continue;
                    }
                    let f = s * *tau;
                    for (ci, vi) in col[off..].iter_mut().zip(v) {
                        *ci -= vi * f;
                    }
                }
            }
            let mut zt = RowStore::Complex(q);
            tql(&mut d, &mut e, Some(&mut zt))?;
            let RowStore::Complex(cols) = zt else { unreachable!() };
            let order = ascending_order(&d);
            let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
            let vectors = CMatrix::from_fn(n, n, |r, c| cols[order[c]][r]);
            let first = (0..n).map(|c| vectors[(0, c)]).collect();
            Ok(Eigen {
                values,
                vectors: Some(vectors),
                first: Some(first),
            })
        }
    }
}

fn ascending_order(d: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    order
}

type Reflector = (Vec<Complex64>, Complex64);

/// Householder reduction `A = Q T Q^*` in place. Returns the real diagonal,
/// the complex subdiagonal and the reflectors `(v, tau)` acting on indices
/// `k+1..n` with `H_k = I - tau v v^*`.
fn tridiagonalize(a: &mut CMatrix) -> (Vec<f64>, Vec<Complex64>, Vec<Reflector>) {
    let n = a.rows();
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        // Scale by the largest entry so tiny columns do not underflow tau.
        let scale = (k + 1..n).map(|i| a[(i, k)].norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            reflectors.push((vec![ZERO; m], ZERO));
            continue;
        }
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)] / scale).collect();
        let tail: f64 = x[1..].iter().map(|c| c.norm_sqr()).sum();
        if tail == 0.0 {
            reflectors.push((vec![ZERO; m], ZERO));
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let x0abs = x[0].norm();
        let unit = if x0abs > 0.0 { x[0] / x0abs } else { ONE };
        let alpha = -unit * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let alpha = alpha * scale;
        let tau = Complex64::new(1.0 / (xnorm * (xnorm + x0abs)), 0.0);

        // w = tau * B v on the trailing block B = a[k+1.., k+1..].
        let mut w = vec![ZERO; m];
        for (i, wi) in w.iter_mut().enumerate() {
            let row = &a.data[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            *wi = row.iter().zip(&v).map(|(b, vj)| b * vj).sum::<Complex64>() * tau;
        }
        let kk: Complex64 = v.iter().zip(&w).map(|(vi, wi)| vi.conj() * wi).sum::<Complex64>() * tau * 0.5;
        let kk = Complex64::new(kk.re, 0.0);
        let q: Vec<Complex64> = w.iter().zip(&v).map(|(wi, vi)| wi - kk * vi).collect();
        for i in 0..m {
            let (vi, qi) = (v[i], q[i]);
            let row = &mut a.data[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            for j in 0..m {
                row[j] -= vi * q[j].conj() + qi * v[j].conj();
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }
        reflectors.push((v, tau));
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    let off = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect();
    (diag, off, reflectors)
}

enum RowStore {
    Real(Vec<Vec<f64>>),
    Complex(Vec<Vec<Complex64>>),
}

impl RowStore {
    /// Rotate the stored vectors: entries `i` and `i+1` of every row
    /// (real case) or rows `i` and `i+1` themselves (complex case).
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        match self {
            RowStore::Real(rows) => {
                for r in rows.iter_mut() {
                    let h = r[i + 1];
                    r[i + 1] = s * r[i] + c * h;
                    r[i] = c * r[i] - s * h;
                }
            }
            RowStore::Complex(cols) => {
                let (lo, hi) = cols.split_at_mut(i + 1);
                let (a, b) = (&mut lo[i], &mut hi[0]);
                for (ai, bi) in a.iter_mut().zip(b.iter_mut()) {
                    let h = *bi;
                    *bi = *ai * s + h * c;
                    *ai = *ai * c - h * s;
                }
            }
        }
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix with diagonal `d` and
/// subdiagonal `e` (`e[i]` couples `i` and `i+1`, `e[n-1]` ignored).
fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut RowStore>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence { index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        z.rotate(i, c, s);
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    match d.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NoConvergence { index }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_and_swap() {
        let a = CMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        assert_eq!(eigh(&a, Vectors::None).unwrap().values, vec![1.0, 2.0, 3.0]);
        let b = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let ev = eigh(&b, Vectors::Full).unwrap();
        assert!((ev.values[0] + 1.0).abs() < 1e-15 && (ev.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tiny_columns_do_not_underflow() {
        // Entries near 1e-160 square to subnormals; unscaled reflectors blow up.
        let mut a = CMatrix::zeros(6, 6);
        for i in 0..6 {
            a[(i, i)] = c(1.0 + i as f64, 0.0);
        }
        a[(3, 0)] = c(1e-160, 2e-160);
        a[(5, 0)] = c(-3e-161, 0.0);
        a[(4, 1)] = c(1e-170, -1e-170);
        a[(2, 1)] = c(0.5, 0.25);
        for j in 0..6 {
            for i in 0..j {
                let v = a[(j, i)];
                a[(i, j)] = v.conj();
            }
        }
        let ev = eigh(&a, Vectors::Full).unwrap();
        assert!(ev.values.iter().all(|x| x.is_finite()));
        let sum: f64 = ev.values.iter().sum();
        assert!((sum - a.trace().re).abs() < 1e-12);
        let v = ev.vectors.unwrap();
        let res = a
            .matmul(&v)
            .sub(&v.matmul(&CMatrix::from_real_diag(&ev.values)))
            .max_abs();
        assert!(res < 1e-13, "residual {res:e}");
    }

    #[test]
    fn complex_three_by_three() {
        let a = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 1.0), c(1.0, -1.0)],
            vec![c(0.0, -1.0), c(3.0, 0.0), c(0.5, 0.0)],
            vec![c(1.0, 1.0), c(0.5, 0.0), c(1.0, 0.0)],
        ]);
        let ev = eigh(&a, Vectors::Full).unwrap();
        let v = ev.vectors.unwrap();
        for (j, &lam) in ev.values.iter().enumerate() {
            let col: Vec<Complex64> = (0..3).map(|i| v[(i, j)]).collect();
            let av = a.mul_vec(&col);
            let res: f64 = av.iter().zip(&col).map(|(x, y)| (x - y * lam).norm_sqr()).sum();
            assert!(res.sqrt() < 1e-13, "residual {res}");
        }
        let first = eigh(&a, Vectors::FirstComponent).unwrap().first.unwrap();
        for j in 0..3 {
            assert!((first[j].norm() - v[(0, j)].norm()).abs() < 1e-13);
        }
    }

    #[test]
    fn empty_and_singleton() {
        assert!(eigh(&CMatrix::zeros(0, 0), Vectors::Full).unwrap().values.is_empty());
        let a = CMatrix::from_real_diag(&[-4.5]);
        assert_eq!(eigh(&a, Vectors::Full).unwrap().values, vec![-4.5]);
    }

    #[test]
    fn rejects_nan() {
        let mut a = CMatrix::identity(2);
        a[(1, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(eigh(&a, Vectors::None), Err(Error::NonFinite { .. })));
    }
}
