//! Rearrangements, (weak) Schatten quasinorms, Hardy-Littlewood-Polya
//! (sub)majorization and the explicit constants used by the verifiers.

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Nonnegative, nonincreasing finite sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecreasingSequence(Vec<f64>);

impl DecreasingSequence {
    /// Accepts any real values; their moduli are sorted.
    pub fn from_reals(values: impl IntoIterator<Item = f64>) -> Self {
        let mut v: Vec<f64> = values.into_iter().map(f64::abs).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        Self(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    /// Elementwise `a_j^e` (keeps the order for `e > 0`).
    pub fn powf(&self, e: f64) -> Self {
        Self(self.0.iter().map(|a| a.powf(e)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|a| a * s.abs()).collect())
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub fn decreasing_rearrangement(a: &[Complex64]) -> DecreasingSequence {
    DecreasingSequence::from_reals(a.iter().map(|c| c.norm()))
}

fn check_positive(name: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: p,
            domain: "0 < p < inf",
        })
    }
}

/// `max_j (j+1)^{1/p} a_j`.
pub fn weak_quasinorm(a: &DecreasingSequence, p: f64) -> Result<f64> {
    check_positive("p", p)?;
    Ok(a.0
        .iter()
        .enumerate()
        .map(|(j, &v)| ((j + 1) as f64).powf(1.0 / p) * v)
        .fold(0.0, f64::max))
}

/// `sup_N N^{-1+1/p} sum_{j<N} a_j`, a norm equivalent to the weak quasinorm.
pub fn primed_norm(a: &DecreasingSequence, p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain {
            name: "p",
            value: p,
            domain: "1 < p < inf",
        });
    }
    let mut best: f64 = 0.0;
    let mut partial = 0.0;
    for (j, &v) in a.0.iter().enumerate() {
        partial += v;
        let n = (j + 1) as f64;
        best = best.max(n.powf(-1.0 + 1.0 / p) * partial);
    }
    Ok(best)
}

/// `(sum a_j^p)^{1/p}`.
pub fn schatten_norm(a: &DecreasingSequence, p: f64) -> Result<f64> {
    check_positive("p", p)?;
    let top = a.first();
    if top == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = a.0.iter().map(|&v| (v / top).powf(p)).sum();
    Ok(top * s.powf(1.0 / p))
}

/// Outcome of a partial-sum comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Majorization {
    pub holds: bool,
    /// Index `N` (zero-based) where `sum_{j<=N} a_j - sum_{j<=N} b_j` is largest.
    pub worst_index: usize,
    /// That largest excess; nonpositive when the partial sums are dominated.
    pub deficit: f64,
    /// `sum a - sum b` over the full (padded) length.
    pub total_gap: f64,
}

fn partial_sum_gap(b: &DecreasingSequence, a: &DecreasingSequence) -> (usize, f64, f64) {
    let len = a.len().max(b.len());
    let (mut sa, mut sb) = (0.0, 0.0);
    let mut worst = (0, f64::NEG_INFINITY);
    for j in 0..len {
        sa += a.0.get(j).copied().unwrap_or(0.0);
        sb += b.0.get(j).copied().unwrap_or(0.0);
        if sa - sb > worst.1 {
            worst = (j, sa - sb);
        }
    }
    if len == 0 {
        worst = (0, 0.0);
    }
    (worst.0, worst.1, sa - sb)
}

/// `a` is submajorized by `b`: every partial sum of `a` is at most that of `b` (+ tol).
pub fn submajorizes(b: &DecreasingSequence, a: &DecreasingSequence, tol: f64) -> Majorization {
    let (worst_index, deficit, total_gap) = partial_sum_gap(b, a);
    Majorization {
        holds: deficit <= tol,
        worst_index,
        deficit,
        total_gap,
    }
}

/// Submajorization together with equal totals (within `tol`).
pub fn majorizes(b: &DecreasingSequence, a: &DecreasingSequence, tol: f64) -> Majorization {
    let mut m = submajorizes(b, a, tol);
    m.holds = m.holds && m.total_gap.abs() <= tol;
    m
}

fn domain(name: &'static str, value: f64, ok: bool, text: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: text,
        })
    }
}

/// Weak-Schatten Cwikel constant for `p > 2`: `(130 p / (p - 2))^{1/2}`.
pub fn c_plus(p: f64) -> Result<f64> {
    domain("p", p, p > 2.0, "p > 2")?;
    Ok((130.0 * p / (p - 2.0)).sqrt())
}

/// Weak-Schatten Cwikel constant for `0 < p < 2`: `2^{1/p} (2 - p)^{-1/p}`.
pub fn c_minus(p: f64) -> Result<f64> {
    domain("p", p, p > 0.0 && p < 2.0, "0 < p < 2")?;
    Ok((2.0 / (2.0 - p)).powf(1.0 / p))
}

/// Weak-Hölder constant `p^{-1/q} q^{-1/p} (p+q)^{1/p+1/q}`.
pub fn gamma_holder(p: f64, q: f64) -> Result<f64> {
    domain("p", p, p > 0.0, "p > 0")?;
    domain("q", q, q > 0.0, "q > 0")?;
    let ln = -q.recip() * p.ln() - p.recip() * q.ln() + (p.recip() + q.recip()) * (p + q).ln();
    Ok(ln.exp())
}

/// Constant of the `L_{2,inf}` estimate reached from `p > 2` through weak
/// Hölder with `1/p + 1/q = 1/2`: `gamma(p, q) c_+(p)`, which equals
/// `2^{-1/p} p^{1/2} (p-2)^{1/p-1/2} c_+(p)`.
pub fn c_two(p: f64) -> Result<f64> {
    domain("p", p, p > 2.0, "p > 2")?;
    let q = 2.0 * p / (p - 2.0);
    Ok(gamma_holder(p, q)? * c_plus(p)?)
}

/// Closed form of the weak-Hölder factor in [`c_two`].
pub fn c_two_closed_form(p: f64) -> Result<f64> {
    domain("p", p, p > 2.0, "p > 2")?;
    Ok(2f64.powf(-1.0 / p) * p.sqrt() * (p - 2.0).powf(1.0 / p - 0.5) * c_plus(p)?)
}

/// The Lieb-Thirring constant bound
/// `gamma Gamma(p+1) Gamma(gamma) / Gamma(p+gamma+1) c_+(2p)^{2p} nu0`.
pub fn lt_bound(p: f64, gamma_exp: f64, n: usize, nu0: f64) -> Result<f64> {
    domain("p", p, p > 1.0, "p > 1")?;
    domain("gamma", gamma_exp, gamma_exp > 0.0, "gamma > 0")?;
    domain("nu0", nu0, nu0 > 0.0, "nu0 > 0")?;
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            domain: "n >= 1",
        });
    }
    let beta = gamma_exp * gamma(p + 1.0) * gamma(gamma_exp) / gamma(p + gamma_exp + 1.0);
    Ok(beta * c_plus(2.0 * p)?.powf(2.0 * p) * nu0)
}

/// Sobolev constant from a Lieb-Thirring constant:
/// `n/(n+2) ((n+2) L / 2)^{-2/n}`.
pub fn sobolev_k_from_l(n: usize, l: f64) -> Result<f64> {
    domain("n", n as f64, n >= 1, "n >= 1")?;
    domain("L", l, l > 0.0, "L > 0")?;
    let nf = n as f64;
    Ok(nf / (nf + 2.0) * ((nf + 2.0) * l / 2.0).powf(-2.0 / nf))
}

/// Cwikel constant `c(p, q)` entering CLR-type bounds: `c_+(2p)` for `p > 1`,
/// `c_2(2q)` for `p = 1`, `c_-(2p)` for `p < 1`.
pub fn clr_constant(p: f64, q: f64) -> Result<f64> {
    check_regime(p, q)?;
    if p > 1.0 {
        c_plus(2.0 * p)
    } else if p == 1.0 {
        c_two(2.0 * q)
    } else {
        c_minus(2.0 * p)
    }
}

/// `(p > 1, q = p)`, `(p = 1, q > 1)` or `(p < 1, q = 1)`.
pub fn check_regime(p: f64, q: f64) -> Result<()> {
    let ok = p > 0.0
        && p.is_finite()
        && q.is_finite()
        && ((p > 1.0 && q == p) || (p == 1.0 && q > 1.0) || (p < 1.0 && q == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::Regime { p, q })
    }
}
