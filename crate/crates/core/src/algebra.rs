//! Twisted Fourier algebra of the noncommutative torus.
//!
//! An element is a finitely supported map `k -> x_k` on `Z^n`, read as
//! `x = sum_k x_k U^k` with the normal-ordered monomials
//! `U^k = U_1^{k_1} ... U_n^{k_n}`. The generators obey
//! `U_l U_j = exp(2 pi i theta_{jl}) U_j U_l`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the integer lattice `Z^n`.
pub type Point = Vec<i64>;

pub fn add(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[i64]) -> Point {
    a.iter().map(|x| -x).collect()
}

/// `|k|_inf`, used for box truncation.
pub fn sup_norm(k: &[i64]) -> usize {
    k.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)
}

/// `|k|_2^2`, used for spectral symbols.
pub fn norm_sq(k: &[i64]) -> i64 {
    k.iter().map(|x| x * x).sum()
}

/// Real antisymmetric deformation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl ThetaMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::InvalidTheta {
                reason: format!("dimension {n} < 2"),
            });
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::InvalidTheta {
                    reason: "matrix is not square".into(),
                });
            }
            entries.extend_from_slice(row);
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTheta {
                reason: "non-finite entry".into(),
            });
        }
        for j in 0..n {
            for l in 0..n {
                if entries[j * n + l] != -entries[l * n + j] {
                    return Err(Error::InvalidTheta {
                        reason: format!("not antisymmetric at ({j}, {l})"),
                    });
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// The commutative torus.
    pub fn zero(n: usize) -> Self {
        assert!(n >= 2, "dimension must be at least 2");
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// Two-dimensional torus with `theta_{12} = t`.
    pub fn planar(t: f64) -> Self {
        Self {
            n: 2,
            entries: vec![0.0, t, -t, 0.0],
        }
    }

    /// Build from the strictly upper triangle, listed row by row.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTheta {
                reason: format!("dimension {n} < 2"),
            });
        }
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: n * (n - 1) / 2,
                found: upper.len(),
            });
        }
        let mut entries = vec![0.0; n * n];
        let mut it = upper.iter();
        for j in 0..n {
            for l in j + 1..n {
                let v = *it.next().unwrap();
                entries[j * n + l] = v;
                entries[l * n + j] = -v;
            }
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, l: usize) -> f64 {
        self.entries[j * self.n + l]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    /// `sum_{j<l} theta_{jl} k_l m_j`, the cocycle measured in turns.
    pub fn cocycle_turns(&self, k: &[i64], m: &[i64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for (j, &mj) in m.iter().enumerate().take(n) {
            if mj == 0 {
                continue;
            }
            for (l, &kl) in k.iter().enumerate().take(n).skip(j + 1) {
                let t = self.entries[j * n + l];
                if t != 0.0 && kl != 0 {
                    s += t * (kl * mj) as f64;
                }
            }
        }
        s
    }

    /// `exp(i phi(k, m))`.
    pub fn cocycle(&self, k: &[i64], m: &[i64]) -> Complex64 {
        unit_from_turns(self.cocycle_turns(k, m))
    }
}

fn unit_from_turns(turns: f64) -> Complex64 {
    let f = turns - turns.floor();
    if f == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, TAU * f)
    }
}

/// An angle in radians reduced to `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PhaseAngle(f64);

impl PhaseAngle {
    pub fn from_turns(turns: f64) -> Self {
        let f = turns - turns.floor();
        let v = TAU * f;
        Self(if v >= TAU { 0.0 } else { v })
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn unit(self) -> Complex64 {
        Complex64::from_polar(1.0, self.0)
    }
}

/// The phase `phi(k, m)` with `U^k U^m = exp(i phi(k, m)) U^{k+m}`.
pub fn phase_cocycle(k: &[i64], m: &[i64], theta: &ThetaMatrix) -> Result<PhaseAngle> {
    let n = theta.dim();
    for v in [k, m] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    Ok(PhaseAngle::from_turns(theta.cocycle_turns(k, m)))
}

/// A finitely supported element `sum_k x_k U^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct FourierElement {
    theta: ThetaMatrix,
    coeffs: BTreeMap<Point, Complex64>,
}

impl FourierElement {
    /// Build from `(k, x_k)` pairs. Repeated keys are summed; zeros are dropped.
    pub fn new<I>(theta: ThetaMatrix, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Point, Complex64)>,
    {
        let n = theta.dim();
        let mut coeffs: BTreeMap<Point, Complex64> = BTreeMap::new();
        for (k, c) in terms {
            if k.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: k.len(),
                });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Invalid(format!("non-finite coefficient at {k:?}")));
            }
            *coeffs.entry(k).or_default() += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Self { theta, coeffs })
    }

    fn from_map(theta: ThetaMatrix, mut coeffs: BTreeMap<Point, Complex64>) -> Self {
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { theta, coeffs }
    }

    pub fn zero(theta: ThetaMatrix) -> Self {
        Self {
            theta,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(theta: ThetaMatrix) -> Self {
        let n = theta.dim();
        Self::monomial(theta, vec![0; n], Complex64::new(1.0, 0.0))
    }

    pub fn scalar(theta: ThetaMatrix, c: Complex64) -> Self {
        let n = theta.dim();
        Self::monomial(theta, vec![0; n], c)
    }

    /// `c U^k`.
    pub fn monomial(theta: ThetaMatrix, k: Point, c: Complex64) -> Self {
        assert_eq!(k.len(), theta.dim(), "lattice point has wrong dimension");
        let mut coeffs = BTreeMap::new();
        coeffs.insert(k, c);
        Self::from_map(theta, coeffs)
    }

    pub fn theta(&self) -> &ThetaMatrix {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn coeffs(&self) -> &BTreeMap<Point, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|k|_inf` over the support (0 for the zero element).
    pub fn support_radius(&self) -> usize {
        self.coeffs.keys().map(|k| sup_norm(k)).max().unwrap_or(0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.theta != other.theta {
            Err(Error::ThetaMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            *coeffs.entry(k.clone()).or_default() += c;
        }
        Ok(Self::from_map(self.theta.clone(), coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (k.clone(), c * s)).collect();
        Self::from_map(self.theta.clone(), coeffs)
    }

    /// Twisted convolution `(xy)_p = sum_{k+m=p} x_k y_m exp(i phi(k, m))`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut coeffs: BTreeMap<Point, Complex64> = BTreeMap::new();
        for (k, a) in &self.coeffs {
            for (m, b) in &other.coeffs {
                let c = a * b * self.theta.cocycle(k, m);
                *coeffs.entry(add(k, m)).or_default() += c;
            }
        }
        Ok(Self::from_map(self.theta.clone(), coeffs))
    }

    /// `(x*)_m = conj(x_{-m}) exp(-i phi(-m, m))`.
    pub fn adjoint(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let m = neg(k);
                let phase = self.theta.cocycle(k, &m).conj();
                (m, c.conj() * phase)
            })
            .collect();
        Self::from_map(self.theta.clone(), coeffs)
    }

    /// `tau(x) = x_0`.
    pub fn trace(&self) -> Complex64 {
        self.coeff(&vec![0; self.dim()])
    }

    /// `d_j`, with `axis` counted from zero: `d_j U^k = i k_j U^k`.
    pub fn derivation(&self, axis: usize) -> Result<Self> {
        let n = self.dim();
        if axis >= n {
            return Err(Error::AxisOutOfRange { axis, n });
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| (k.clone(), c * Complex64::new(0.0, k[axis] as f64)))
            .collect();
        Ok(Self::from_map(self.theta.clone(), coeffs))
    }

    /// `tau(|grad u|^2) = sum_k |k|^2 |u_k|^2`.
    pub fn gradient_energy(&self) -> f64 {
        self.coeffs.iter().map(|(k, c)| norm_sq(k) as f64 * c.norm_sqr()).sum()
    }

    pub fn sobolev_norm(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain {
                name: "s",
                value: s,
                domain: "s >= 0",
            });
        }
        let sum: f64 = self
            .coeffs
            .iter()
            .map(|(k, c)| (1.0 + norm_sq(k) as f64).powf(s) * c.norm_sqr())
            .sum();
        Ok(sum.sqrt())
    }

    /// The `l_p` (quasi-)norm of the coefficient sequence; `p = inf` allowed.
    pub fn hatlp_norm(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::Domain {
                name: "p",
                value: p,
                domain: "p > 0",
            });
        }
        if p.is_infinite() {
            return Ok(self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max));
        }
        let scale = self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Ok(0.0);
        }
        let s: f64 = self.coeffs.values().map(|c| (c.norm() / scale).powf(p)).sum();
        Ok(scale * s.powf(1.0 / p))
    }

    /// `||x - x*||_{l^1}`, zero for self-adjoint elements.
    pub fn self_adjoint_defect(&self) -> f64 {
        let d = self.sub(&self.adjoint()).expect("adjoint lives on the same torus");
        d.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `(x + x*) / 2`.
    pub fn real_part(&self) -> Self {
        self.add(&self.adjoint())
            .expect("adjoint lives on the same torus")
            .scale(Complex64::new(0.5, 0.0))
    }

    /// Sesquilinear pairing `tau(x y*) = sum_k x_k conj(y_k)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self.coeffs.iter().map(|(k, a)| a * other.coeff(k).conj()).sum())
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("element serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffRepr {
    k: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    n: usize,
    theta: Vec<Vec<f64>>,
    coeffs: Vec<CoeffRepr>,
}

impl TryFrom<ElementRepr> for FourierElement {
    type Error = Error;

    fn try_from(r: ElementRepr) -> Result<Self> {
        let theta = ThetaMatrix::new(r.theta)?;
        if theta.dim() != r.n {
            return Err(Error::DimensionMismatch {
                expected: r.n,
                found: theta.dim(),
            });
        }
        FourierElement::new(theta, r.coeffs.into_iter().map(|c| (c.k, Complex64::new(c.re, c.im))))
    }
}

impl From<FourierElement> for ElementRepr {
    fn from(x: FourierElement) -> Self {
        ElementRepr {
            n: x.dim(),
            theta: x.theta.rows(),
            coeffs: x
                .coeffs
                .into_iter()
                .map(|(k, c)| CoeffRepr { k, re: c.re, im: c.im })
                .collect(),
        }
    }
}
