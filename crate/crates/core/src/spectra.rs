//! Galerkin truncations on lattice boxes and spectral services.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{add, norm_sq, sup_norm, FourierElement, Point};
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, Vectors};

/// The box `{k : |k|_inf <= K}` with the origin first and the remaining
/// points in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis {
    n: usize,
    radius: usize,
    points: Vec<Point>,
    index: HashMap<Point, usize>,
}

impl LatticeBasis {
    pub fn new(n: usize, radius: usize) -> Self {
        let side = 2 * radius + 1;
        let r = radius as i64;
        let size = side.pow(n as u32);
        let mut points = Vec::with_capacity(size);
        points.push(vec![0; n]);
        let mut cur = vec![-r; n];
        loop {
            if cur.iter().any(|&c| c != 0) {
                points.push(cur.clone());
            }
            let mut axis = n;
            loop {
                if axis == 0 {
                    let index = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
                    return Self {
                        n,
                        radius,
                        points,
                        index,
                    };
                }
                axis -= 1;
                if cur[axis] < r {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = -r;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        self.index.get(k).copied()
    }
}

/// A dense square matrix indexed by a lattice box.
#[derive(Debug, Clone)]
pub struct GeneralOperator {
    pub basis: Arc<LatticeBasis>,
    pub matrix: CMatrix,
}

impl GeneralOperator {
    pub fn new(basis: Arc<LatticeBasis>, matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: matrix.rows(),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            basis: self.basis.clone(),
            matrix: self.matrix.matmul(&other.matrix),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn hermitian_part(&self) -> HermitianOperator {
        HermitianOperator::new(self.matrix.clone())
    }
}

/// A Hermitian matrix; symmetrized on construction.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        Self {
            matrix: CMatrix::from_real_diag(d),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.add(&other.matrix),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale(Complex64::new(s, 0.0)),
        }
    }

    /// `D A D` for a real diagonal `D`.
    pub fn congruence_diag(&self, d: &[f64]) -> Self {
        Self {
            matrix: self.matrix.scale_rows_cols(d, d),
        }
    }

    /// Delete the rows and columns listed in `drop`.
    pub fn delete(&self, drop: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.dim()).filter(|i| !drop.contains(i)).collect();
        Self {
            matrix: self.matrix.submatrix(&keep),
        }
    }

    /// Restriction to the zero-mean subspace (index 0 removed).
    pub fn dotted(&self) -> Self {
        self.delete(&[0])
    }
}

/// Ascending eigenvalues with optional eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub vectors: Option<CMatrix>,
}

impl Spectrum {
    /// `max |lambda|`.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Matrix of `lambda(x)` on the box: entry `(k', k) = x_{k'-k} exp(i phi(k'-k, k))`.
pub fn left_mult_matrix(x: &FourierElement, basis: &Arc<LatticeBasis>) -> Result<GeneralOperator> {
    if x.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: x.dim(),
        });
    }
    let theta = x.theta();
    let size = basis.len();
    let mut m = CMatrix::zeros(size, size);
    for (col, k) in basis.points().iter().enumerate() {
        for (shift, c) in x.coeffs() {
            let target = add(shift, k);
            if let Some(row) = basis.index_of(&target) {
                m[(row, col)] += c * theta.cocycle(shift, k);
            }
        }
    }
    GeneralOperator::new(basis.clone(), m)
}

/// Diagonal matrix of the Fourier multiplier `g(-i grad)`.
pub fn multiplier_matrix(g: impl Fn(&[i64]) -> Complex64, basis: &Arc<LatticeBasis>) -> GeneralOperator {
    let d: Vec<Complex64> = basis.points().iter().map(|k| g(k)).collect();
    GeneralOperator {
        basis: basis.clone(),
        matrix: CMatrix::from_diag(&d),
    }
}

/// `g_s(k) = |k|^{-s}` with `g_s(0) = 0`.
pub fn power_symbol(s: f64) -> impl Fn(&[i64]) -> Complex64 {
    move |k| {
        let r2 = norm_sq(k);
        if r2 == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((r2 as f64).powf(-s / 2.0), 0.0)
        }
    }
}

pub fn hermitian_eig(a: &HermitianOperator, want_vectors: bool) -> Result<Spectrum> {
    let want = if want_vectors { Vectors::Full } else { Vectors::None };
    let e = eigh(a.matrix(), want)?;
    Ok(Spectrum {
        eigenvalues: e.values,
        vectors: e.vectors,
    })
}

/// Singular values, descending, with the resolution floor used for clamping.
#[derive(Debug, Clone)]
pub struct SingularValues {
    pub values: Vec<f64>,
    /// Values below `sqrt(8 n eps) * ||T||` are reported as zero: squaring
    /// through the Gram matrix leaves noise of that size on zero singular values.
    pub floor: f64,
}

pub fn singular_values(t: &CMatrix) -> Result<SingularValues> {
    let e = eigh(&t.gram(), Vectors::None)?;
    let top = e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let floor = (8.0 * t.cols().max(1) as f64 * f64::EPSILON).sqrt() * top;
    let values = e
        .values
        .iter()
        .rev()
        .map(|&v| {
            let s = v.max(0.0).sqrt();
            if s < floor {
                0.0
            } else {
                s
            }
        })
        .collect();
    Ok(SingularValues { values, floor })
}

/// `V f(Lambda) V^*`.
pub fn spectral_function(a: &HermitianOperator, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
    let e = eigh(a.matrix(), Vectors::Full)?;
    let v = e.vectors.expect("full vectors requested");
    let fv: Vec<f64> = e
        .values
        .iter()
        .map(|&lam| {
            let y = f(lam);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::NonFiniteSpectralValue { eigenvalue: lam })
            }
        })
        .collect::<Result<_>>()?;
    let n = a.dim();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = Complex64::new(0.0, 0.0);
            for (l, &w) in fv.iter().enumerate() {
                if w != 0.0 {
                    s += v[(i, l)] * v[(j, l)].conj() * w;
                }
            }
            out[(i, j)] = s;
            out[(j, i)] = s.conj();
        }
    }
    Ok(HermitianOperator { matrix: out })
}

/// `t -> t^s` on `|t| > cutoff` and `0` on the kernel; `s = -1` is the
/// partial inverse.
pub fn partial_power(s: f64, cutoff: f64) -> impl Fn(f64) -> f64 {
    move |t| if t.abs() <= cutoff { 0.0 } else { t.powf(s) }
}

/// Hermitian part of the compression of `lambda(x)` to the box.
pub fn hermitian_compression(x: &FourierElement, basis: &Arc<LatticeBasis>) -> Result<HermitianOperator> {
    Ok(left_mult_matrix(x, basis)?.hermitian_part())
}

/// Two estimates of a trace functional `tau[f(x)]` from box compressions.
///
/// `box_average` is the normalized trace `(1/dim) sum f(eig)` of the
/// compression. For convex `f` it never exceeds the true value, but it
/// carries an `O(1/K)` boundary bias. `centered` is the diagonal entry
/// `<f(P A P) 1, 1>` at the origin, which is exact whenever `f` agrees with a
/// polynomial of degree `<= 2K / support` on the spectrum and otherwise
/// converges at the rate of polynomial approximation of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEstimate {
    pub k_tau: usize,
    pub dim: usize,
    pub box_average: f64,
    pub centered: f64,
    /// Relative change of `box_average` from radius `k_tau - 1`.
    pub box_change: f64,
    /// Relative change of `centered` from radius `k_tau - 1`.
    pub centered_change: f64,
}

impl TraceEstimate {
    pub fn box_converged(&self, tol: f64) -> bool {
        self.box_change < tol
    }

    pub fn centered_converged(&self, tol: f64) -> bool {
        self.centered_change < tol
    }
}

fn relative_change(new: f64, old: f64) -> f64 {
    let d = (new - old).abs();
    if d == 0.0 {
        0.0
    } else {
        d / new.abs().max(old.abs())
    }
}

/// `(box_average, centered)` for a Hermitian matrix and spectral weight `f`.
fn functional_pair(a: &HermitianOperator, f: &dyn Fn(f64) -> f64) -> Result<(f64, f64)> {
    let e = eigh(a.matrix(), Vectors::FirstComponent)?;
    let first = e.first.expect("first components requested");
    let dim = e.values.len() as f64;
    let mut avg = 0.0;
    let mut cen = 0.0;
    for (lam, v0) in e.values.iter().zip(&first) {
        let y = f(*lam);
        avg += y;
        cen += y * v0.norm_sqr();
    }
    Ok((avg / dim, cen))
}

fn check_radius(x: &FourierElement, k_tau: usize) -> Result<()> {
    let support = x.support_radius();
    if k_tau < support || k_tau == 0 {
        return Err(Error::RadiusTooSmall {
            radius: k_tau,
            support: support.max(1),
        });
    }
    Ok(())
}

/// Estimates of `tau[f(x)]` for self-adjoint `x`.
pub fn trace_of_function(x: &FourierElement, k_tau: usize, f: impl Fn(f64) -> f64) -> Result<TraceEstimate> {
    check_radius(x, k_tau)?;
    let defect = x.self_adjoint_defect();
    let scale = x.hatlp_norm(1.0)?.max(1.0);
    if defect > 1e-12 * scale {
        return Err(Error::NotSelfAdjoint { defect });
    }
    let at = |k: usize| -> Result<(f64, f64, usize)> {
        let basis = Arc::new(LatticeBasis::new(x.dim(), k));
        let h = hermitian_compression(x, &basis)?;
        let (a, c) = functional_pair(&h, &f)?;
        Ok((a, c, basis.len()))
    };
    let (avg, cen, dim) = at(k_tau)?;
    let (avg0, cen0, _) = at(k_tau - 1)?;
    Ok(TraceEstimate {
        k_tau,
        dim,
        box_average: avg,
        centered: cen,
        box_change: relative_change(avg, avg0),
        centered_change: relative_change(cen, cen0),
    })
}

/// Estimates of `tau[|x|^p]`.
///
/// The box average is `(1/dim) sum sigma_i^p` over the singular values of the
/// compression of `lambda(x)`; for `p >= 2` it is a lower bound for the true
/// value. The centered estimate uses the compression of `lambda(x^* x)`.
pub fn lp_trace(x: &FourierElement, p: f64, k_tau: usize) -> Result<TraceEstimate> {
    if !(p > 0.0) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            domain: "p > 0",
        });
    }
    check_radius(x, k_tau)?;
    let scale = x.hatlp_norm(1.0)?.max(1.0);
    if x.self_adjoint_defect() <= 1e-14 * scale {
        return trace_of_function(&x.real_part(), k_tau, |t| t.abs().powf(p));
    }
    let xx = x.adjoint().mul(x)?.real_part();
    let half = p / 2.0;
    let at = |k: usize| -> Result<(f64, f64, usize)> {
        let basis = Arc::new(LatticeBasis::new(x.dim(), k));
        let t = left_mult_matrix(x, &basis)?;
        let sq = eigh(&t.matrix.gram(), Vectors::None)?;
        let avg = sq.values.iter().map(|&v| v.max(0.0).powf(half)).sum::<f64>() / basis.len() as f64;
        let h = hermitian_compression(&xx, &basis)?;
        let (_, cen) = functional_pair(&h, &|t: f64| t.max(0.0).powf(half))?;
        Ok((avg, cen, basis.len()))
    };
    let (avg, cen, dim) = at(k_tau)?;
    let (avg0, cen0, _) = at(k_tau - 1)?;
    Ok(TraceEstimate {
        k_tau,
        dim,
        box_average: avg,
        centered: cen,
        box_change: relative_change(avg, avg0),
        centered_change: relative_change(cen, cen0),
    })
}

/// Estimates of `tau[|V_-|^q]` from `f(t) = max(-t, 0)^q` on the compression.
pub fn positive_negative_parts(v: &FourierElement, k_tau: usize, q: f64) -> Result<TraceEstimate> {
    if !(q > 0.0) {
        return Err(Error::Domain {
            name: "q",
            value: q,
            domain: "q > 0",
        });
    }
    trace_of_function(v, k_tau, move |t| if t < 0.0 { (-t).powf(q) } else { 0.0 })
}

/// Radius of the smallest box containing `k`.
pub fn box_radius(k: &[i64]) -> usize {
    sup_norm(k)
}
