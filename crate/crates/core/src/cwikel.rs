//! Exact singular values of `lambda(x) g(-i grad)` for finitely supported
//! symbols, and the Cwikel-type bounds they satisfy.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{norm_sq, FourierElement, Point};
use crate::check::{CheckRecord, Status};
use crate::error::{Error, Result};
use crate::lattice::nu0_bound;
use crate::linalg::{eigh, CMatrix, Vectors};
use crate::majorization::{
    c_minus, c_plus, c_two, check_regime, clr_constant, decreasing_rearrangement, schatten_norm, submajorizes,
    weak_quasinorm, DecreasingSequence,
};
use crate::spectra::{
    hermitian_eig, left_mult_matrix, lp_trace, multiplier_matrix, positive_negative_parts, power_symbol,
    trace_of_function, HermitianOperator, LatticeBasis, TraceEstimate,
};

pub const ANCHOR_HS: &str = "Hilbert-Schmidt equality for Cwikel operators";
pub const ANCHOR_MAJORIZATION: &str = "majorization of Cwikel singular values";
pub const ANCHOR_CWIKEL_PLUS: &str = "weak Schatten Cwikel estimate, p > 2";
pub const ANCHOR_CWIKEL_STRONG: &str = "Schatten Cwikel estimate";
pub const ANCHOR_CWIKEL_MINUS: &str = "weak Schatten Cwikel estimate, p < 2";
pub const ANCHOR_CWIKEL_TWO: &str = "weak L2 Cwikel estimate via weak Hölder";
pub const ANCHOR_SANDWICHED: &str = "sandwiched Cwikel estimate";

/// Label for empirical constant probes.
pub const PROBE_LABEL: &str = "observed lower bound on the best constant";

/// Relative-change threshold for trace estimates.
pub const TRACE_TOL: f64 = 1e-2;

/// A finitely supported symbol on `Z^n`.
pub type Symbol = BTreeMap<Point, Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `p >= 2`: Schatten bound, plus the weak bound when `p > 2`.
    Plus,
    /// `0 < p < 2`: both bounds with the `L_2` norm of `x`.
    Minus,
    /// `p > 2`: weak `L_2` bound for symbols dominated by `|k|^{-n/2}`.
    TwoViaHolder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SymbolEntry {
    k: Point,
    re: f64,
    #[serde(default)]
    im: f64,
}

/// Serde adapter for symbols as a list of `{k, re, im}` entries.
pub mod symbol_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(g: &Symbol, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<SymbolEntry> = g
            .iter()
            .map(|(k, c)| SymbolEntry {
                k: k.clone(),
                re: c.re,
                im: c.im,
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Symbol, D::Error> {
        let v = Vec::<SymbolEntry>::deserialize(d)?;
        let mut g = Symbol::new();
        for e in v {
            if g.insert(e.k.clone(), Complex64::new(e.re, e.im)).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate symbol point {:?}", e.k)));
            }
        }
        Ok(g)
    }
}

fn default_k_tau() -> usize {
    4
}

/// An operator `lambda(x) g(-i grad)` with its exponent and regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CwikelInstance {
    pub x: FourierElement,
    #[serde(with = "symbol_serde")]
    pub g: Symbol,
    pub p: f64,
    pub regime: Regime,
    /// Radius for `L_p` trace estimates of `x` when `p != 2`.
    #[serde(default = "default_k_tau")]
    pub k_tau: usize,
}

impl CwikelInstance {
    pub fn validate(&self) -> Result<()> {
        let n = self.x.dim();
        if let Some(k) = self.g.keys().find(|k| k.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: k.len(),
            });
        }
        if let Some((k, _)) = self.g.iter().find(|(_, c)| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Invalid(format!("non-finite symbol value at {k:?}")));
        }
        let p = self.p;
        let ok = p.is_finite()
            && match self.regime {
                Regime::Plus => p >= 2.0,
                Regime::Minus => p > 0.0 && p < 2.0,
                Regime::TwoViaHolder => p > 2.0,
            };
        if !ok {
            return Err(Error::Domain {
                name: "p",
                value: p,
                domain: "regime exponent range",
            });
        }
        if self.regime == Regime::TwoViaHolder {
            let half = n as f64 / 2.0;
            for (k, c) in &self.g {
                let r2 = norm_sq(k) as f64;
                let cap = if r2 == 0.0 { 0.0 } else { r2.powf(-half / 2.0) };
                if c.norm() > cap * (1.0 + 1e-12) {
                    return Err(Error::Invalid(format!("symbol value at {k:?} exceeds |k|^(-n/2)")));
                }
            }
        }
        Ok(())
    }
}

/// Rearranged moduli of the symbol values.
pub fn symbol_sequence(g: &Symbol) -> DecreasingSequence {
    decreasing_rearrangement(&g.values().copied().collect::<Vec<_>>())
}

/// Gram matrix `G_{ab} = conj(g_a) g_b <x U^{k_b}, x U^{k_a}>` over the
/// support of `g`, in key order. Its eigenvalues are the squared singular
/// values of `lambda(x) g(-i grad)`.
pub fn gram_matrix(x: &FourierElement, g: &Symbol) -> Result<HermitianOperator> {
    let theta = x.theta();
    let one = Complex64::new(1.0, 0.0);
    let cols: Vec<(Complex64, FourierElement)> = g
        .iter()
        .map(|(k, &c)| {
            if k.len() != x.dim() {
                return Err(Error::DimensionMismatch {
                    expected: x.dim(),
                    found: k.len(),
                });
            }
            Ok((c, x.mul(&FourierElement::monomial(theta.clone(), k.clone(), one))?))
        })
        .collect::<Result<_>>()?;
    let m = cols.len();
    let mut gram = CMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..=a {
            let ip = cols[b].1.inner(&cols[a].1)?;
            let v = cols[a].0.conj() * cols[b].0 * ip;
            gram[(a, b)] = v;
            gram[(b, a)] = v.conj();
        }
    }
    Ok(HermitianOperator::new(gram))
}

/// Singular values of `lambda(x) g(-i grad)`, nonincreasing, one per support point.
pub fn exact_singular_values(x: &FourierElement, g: &Symbol) -> Result<DecreasingSequence> {
    let gram = gram_matrix(x, g)?;
    let e = eigh(gram.matrix(), Vectors::None)?;
    Ok(DecreasingSequence::from_reals(
        e.values.iter().map(|v| v.max(0.0).sqrt()),
    ))
}

/// Dense compression of `lambda(x) g(-i grad)` on the box of `radius`;
/// exact whenever the box contains `supp x + supp g`.
pub fn dense_operator(x: &FourierElement, g: &Symbol, radius: usize) -> Result<CMatrix> {
    let basis = Arc::new(LatticeBasis::new(x.dim(), radius));
    let zero = Complex64::new(0.0, 0.0);
    let mult = multiplier_matrix(|k| g.get(k).copied().unwrap_or(zero), &basis);
    Ok(left_mult_matrix(x, &basis)?.compose(&mult).matrix)
}

/// `||lambda(x) g||_{L_2} == ||x||_2 ||g||_2`.
pub fn verify_hs_equality(id: &str, x: &FourierElement, g: &Symbol) -> Result<CheckRecord> {
    let gram = gram_matrix(x, g)?;
    let e = eigh(gram.matrix(), Vectors::None)?;
    let lhs = e.values.iter().sum::<f64>().max(0.0).sqrt();
    let rhs = x.hatlp_norm(2.0)? * schatten_norm(&symbol_sequence(g), 2.0)?;
    let tol = 1e-10 * rhs.max(f64::MIN_POSITIVE);
    Ok(CheckRecord::equal(format!("{id}/hs"), ANCHOR_HS, lhs, rhs, tol)
        .with("relative_error", if rhs > 0.0 { (lhs - rhs).abs() / rhs } else { lhs }))
}

/// `||x||_2^2 mu^2(g) ≺ mu^2(lambda(x) g)`: dominated partial sums and equal totals.
pub fn verify_majorization(id: &str, x: &FourierElement, g: &Symbol) -> Result<CheckRecord> {
    let mu = exact_singular_values(x, g)?.powf(2.0);
    let x2 = x.hatlp_norm(2.0)?.powi(2);
    let base = symbol_sequence(g).powf(2.0).scale(x2);
    let scale = base.sum().max(mu.sum()).max(f64::MIN_POSITIVE);
    let m = submajorizes(&mu, &base, 1e-9 * scale);
    let totals_ok = m.total_gap.abs() <= 1e-10 * scale;
    // lhs: worst partial-sum excess of the symbol side; rhs: 0.
    let mut rec = CheckRecord::upper(
        format!("{id}/majorization"),
        ANCHOR_MAJORIZATION,
        m.deficit,
        0.0,
        1e-9 * scale,
    )
    .with("worst_index", m.worst_index)
    .with("total_gap", m.total_gap)
    .with("totals_equal", totals_ok)
    .with("scale", scale);
    if rec.status == Status::Pass && !totals_ok {
        rec.status = Status::Fail;
        rec.margin = -m.total_gap.abs();
        rec.set("reason", "totals differ");
    }
    Ok(rec)
}

/// `||x||_{L_p}` with certification data.
#[derive(Debug, Clone, Copy)]
struct LpNorm {
    /// Lower bound for the norm (exact for `p = 2`).
    certified: f64,
    /// Best estimate.
    estimate: f64,
    converged: bool,
    trace: Option<TraceEstimate>,
}

fn lp_norm(x: &FourierElement, p: f64, k_tau: usize) -> Result<LpNorm> {
    if p == 2.0 {
        let v = x.hatlp_norm(2.0)?;
        return Ok(LpNorm {
            certified: v,
            estimate: v,
            converged: true,
            trace: None,
        });
    }
    let est = lp_trace(x, p, k_tau.max(x.support_radius()).max(1))?;
    // The box average never exceeds the trace for p >= 2.
    let certified = if p >= 2.0 { est.box_average.powf(1.0 / p) } else { 0.0 };
    Ok(LpNorm {
        certified,
        estimate: est.centered.max(0.0).powf(1.0 / p),
        converged: est.centered_converged(TRACE_TOL),
        trace: Some(est),
    })
}

/// Upper-bound record `lhs <= coef * norm` where `norm` is an `L_p` norm of
/// `x`: passes outright against the certified lower bound of the norm,
/// otherwise the estimate decides.
fn bound_record(id: String, anchor: &str, lhs: f64, coef: f64, norm: &LpNorm, tol: f64) -> CheckRecord {
    let certified_rhs = coef * norm.certified;
    let rhs = coef * norm.estimate;
    let slack = tol * rhs.max(f64::MIN_POSITIVE);
    let mut rec = CheckRecord::upper(id, anchor, lhs, rhs, slack)
        .with("certified_rhs", certified_rhs)
        .with("certified", lhs <= certified_rhs + slack);
    if let Some(t) = norm.trace {
        rec = rec
            .with("trace_centered", t.centered)
            .with("trace_change", t.centered_change)
            .with("k_tau", t.k_tau);
    }
    if lhs <= certified_rhs + slack {
        rec.status = Status::Pass;
        rec
    } else {
        rec.inconclusive_unless(norm.converged, "trace estimator not converged")
    }
}

/// All bounds of the instance's regime on the exact singular values.
pub fn verify_cwikel_bounds(id: &str, inst: &CwikelInstance, tol: f64) -> Result<Vec<CheckRecord>> {
    inst.validate()?;
    let mu = exact_singular_values(&inst.x, &inst.g)?;
    let gs = symbol_sequence(&inst.g);
    let p = inst.p;
    let mut out = Vec::new();
    let ratio = |rec: CheckRecord, norm_product: f64| {
        let probe = if norm_product > 0.0 {
            rec.lhs / norm_product
        } else {
            0.0
        };
        rec.with(PROBE_LABEL, probe).with("p", p)
    };
    match inst.regime {
        Regime::Plus => {
            let xn = lp_norm(&inst.x, p, inst.k_tau)?;
            let strong = schatten_norm(&mu, p)?;
            let gp = schatten_norm(&gs, p)?;
            let rec = bound_record(format!("{id}/strong/p={p}"), ANCHOR_CWIKEL_STRONG, strong, gp, &xn, tol);
            out.push(ratio(rec, xn.estimate * gp));
            if p > 2.0 {
                let weak = weak_quasinorm(&mu, p)?;
                let gw = weak_quasinorm(&gs, p)?;
                let c = c_plus(p)?;
                let rec = bound_record(format!("{id}/weak/p={p}"), ANCHOR_CWIKEL_PLUS, weak, c * gw, &xn, tol)
                    .with("constant", c);
                out.push(ratio(rec, xn.estimate * gw));
            }
        }
        Regime::Minus => {
            let x2 = inst.x.hatlp_norm(2.0)?;
            let strong = schatten_norm(&mu, p)?;
            let gp = schatten_norm(&gs, p)?;
            let rhs = x2 * gp;
            let rec = CheckRecord::upper(
                format!("{id}/strong/p={p}"),
                ANCHOR_CWIKEL_STRONG,
                strong,
                rhs,
                tol * rhs.max(f64::MIN_POSITIVE),
            );
            out.push(ratio(rec, rhs));
            let weak = weak_quasinorm(&mu, p)?;
            let gw = weak_quasinorm(&gs, p)?;
            let c = c_minus(p)?;
            let rhs = c * x2 * gw;
            let rec = CheckRecord::upper(
                format!("{id}/weak/p={p}"),
                ANCHOR_CWIKEL_MINUS,
                weak,
                rhs,
                tol * rhs.max(f64::MIN_POSITIVE),
            )
            .with("constant", c);
            out.push(ratio(rec, x2 * gw));
        }
        Regime::TwoViaHolder => {
            let xn = lp_norm(&inst.x, p, inst.k_tau)?;
            let weak = weak_quasinorm(&mu, 2.0)?;
            let c = c_two(p)?;
            let nu = nu0_bound(inst.x.dim()).sqrt();
            let rec = bound_record(format!("{id}/weak2/p={p}"), ANCHOR_CWIKEL_TWO, weak, c * nu, &xn, tol)
                .with("constant", c)
                .with("weak_norm_2_of_g", weak_quasinorm(&gs, 2.0)?);
            out.push(ratio(rec, xn.estimate * weak_quasinorm(&gs, 2.0)?));
        }
    }
    Ok(out)
}

/// Eigenvalues of the compression of `Delta^{-n/4p} lambda(V) Delta^{-n/4p}`
/// to the box of `radius`, by modulus.
pub fn sandwiched_singular_values(v: &FourierElement, p: f64, radius: usize) -> Result<DecreasingSequence> {
    let basis = Arc::new(LatticeBasis::new(v.dim(), radius));
    let symbol = power_symbol(v.dim() as f64 / (2.0 * p));
    let d: Vec<f64> = basis.points().iter().map(|k| symbol(k).re).collect();
    let a = crate::spectra::hermitian_compression(v, &basis)?.congruence_diag(&d);
    Ok(DecreasingSequence::from_reals(hermitian_eig(&a, false)?.eigenvalues))
}

/// Weak `L_{p,inf}` quasinorm of the sandwiched operator against
/// `[2^{1/p}] c(p,q)^2 nu0^{1/p} ||V||_{L_q}`, dropping `2^{1/p}` when
/// `V >= 0`. Compression only lowers singular values, and the box average
/// only lowers `||V||_{L_q}` for `q >= 1`, so a pass is rigorous.
pub fn verify_sandwiched_cwikel(
    id: &str,
    v: &FourierElement,
    p: f64,
    q: f64,
    radius: usize,
    k_tau: usize,
    tol: f64,
) -> Result<CheckRecord> {
    check_regime(p, q)?;
    let defect = v.self_adjoint_defect();
    if defect > 1e-12 * v.hatlp_norm(1.0)?.max(1.0) {
        return Err(Error::NotSelfAdjoint { defect });
    }
    let v = v.real_part();
    let mu = sandwiched_singular_values(&v, p, radius)?;
    let lhs = weak_quasinorm(&mu, p)?;
    let k_tau = k_tau.max(v.support_radius()).max(1);
    let negative = positive_negative_parts(&v, k_tau, 1.0)?;
    // V >= 0 when the compression of its negative part vanishes at every size.
    let positive = negative.box_average <= 1e-14 && negative.centered <= 1e-14 && is_nonnegative(&v, k_tau)?;
    let est = trace_of_function(&v, k_tau, move |t| t.abs().powf(q))?;
    let c = clr_constant(p, q)?;
    let factor = if positive { 1.0 } else { 2f64.powf(1.0 / p) };
    let coef = factor * c * c * nu0_bound(v.dim()).powf(1.0 / p);
    let rhs = coef * est.box_average.powf(1.0 / q);
    Ok(CheckRecord::upper(
        format!("{id}/sandwiched/p={p},q={q}"),
        ANCHOR_SANDWICHED,
        lhs,
        rhs,
        tol * rhs.max(f64::MIN_POSITIVE),
    )
    .with("constant", coef)
    .with("positive_case", positive)
    .with("radius", radius)
    .with("trace_box_average", est.box_average)
    .with("trace_centered", est.centered)
    .with("trace_change", est.box_change)
    .with(
        PROBE_LABEL,
        if est.centered > 0.0 {
            lhs / est.centered.powf(1.0 / q)
        } else {
            0.0
        },
    )
    .inconclusive_unless(est.box_converged(TRACE_TOL), "trace estimator not converged"))
}

fn is_nonnegative(v: &FourierElement, k_tau: usize) -> Result<bool> {
    let basis = Arc::new(LatticeBasis::new(v.dim(), k_tau));
    let h = crate::spectra::hermitian_compression(v, &basis)?;
    let s = hermitian_eig(&h, false)?;
    Ok(s.eigenvalues.first().copied().unwrap_or(0.0) >= -1e-12 * s.norm().max(1.0))
}
