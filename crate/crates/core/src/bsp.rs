//! Eigenvalue counting for truncated fractional Schrödinger operators
//! `H_V = Delta^{n/2p} + lambda(V)` and the Birman-Schwinger operators
//! attached to them.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{norm_sq, FourierElement};
use crate::check::{CheckRecord, Status, Tally};
use crate::error::{Error, Result};
use crate::lattice::nu0_bound;
use crate::linalg::{eigh, CMatrix, Vectors};
use crate::majorization::{check_regime, clr_constant, lt_bound, sobolev_k_from_l, weak_quasinorm, DecreasingSequence};
use crate::spectra::{
    hermitian_compression, hermitian_eig, positive_negative_parts, spectral_function, trace_of_function,
    HermitianOperator, LatticeBasis, Spectrum,
};

pub const ANCHOR_ABSTRACT_BSP: &str = "abstract Birman-Schwinger principle";
pub const ANCHOR_BORDERLINE_BSP: &str = "borderline Birman-Schwinger principle";
pub const ANCHOR_CLR: &str = "CLR inequality";
pub const ANCHOR_CLR_DOTTED: &str = "CLR inequality, zero-mean version";
pub const ANCHOR_SEMICLASSICAL: &str = "semiclassical CLR inequality";
pub const ANCHOR_LT: &str = "Lieb-Thirring inequality";
pub const ANCHOR_SOBOLEV: &str = "Sobolev inequality";

/// Relative guard band for counts near the threshold.
pub const COUNT_GUARD: f64 = 1e-9;
/// Minimal distance between a grid point and the spectrum of `H_V`.
pub const SPECTRAL_GUARD: f64 = 1e-6;
/// Relative-change threshold for trace estimates.
pub const TRACE_TOL: f64 = 1e-2;

/// Default grid `{-2^{-i} : i = 0..10}`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=10).map(|i| -(0.5f64).powi(i)).collect()
}

/// A fractional Schrödinger operator `Delta^{n/2p} + lambda(V)` with its
/// truncation radii and scan grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchrodingerInstance {
    pub p_exponent: f64,
    pub q_exponent: f64,
    pub potential: FourierElement,
    pub k_op: usize,
    pub k_tau: usize,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    #[serde(default)]
    pub h_grid: Vec<f64>,
}

impl SchrodingerInstance {
    pub fn new(potential: FourierElement, p: f64, q: f64, k_op: usize, k_tau: usize) -> Result<Self> {
        let inst = Self {
            p_exponent: p,
            q_exponent: q,
            potential,
            k_op,
            k_tau,
            lambda_grid: default_lambda_grid(),
            h_grid: vec![],
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        check_regime(self.p_exponent, self.q_exponent)?;
        let defect = self.potential.self_adjoint_defect();
        if defect > 1e-12 * self.potential.hatlp_norm(1.0)?.max(1.0) {
            return Err(Error::NotSelfAdjoint { defect });
        }
        if self.k_op == 0 || self.k_tau == 0 {
            return Err(Error::Invalid("truncation radii must be positive".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    pub fn basis(&self) -> Arc<LatticeBasis> {
        Arc::new(LatticeBasis::new(self.dim(), self.k_op))
    }

    /// Diagonal of `Delta^{n/2p}`: `|k|^{n/p}` in basis order.
    pub fn kinetic_diagonal(&self) -> Vec<f64> {
        let e = self.dim() as f64 / (2.0 * self.p_exponent);
        self.basis()
            .points()
            .iter()
            .map(|k| {
                let r2 = norm_sq(k) as f64;
                if r2 == 0.0 {
                    0.0
                } else {
                    r2.powf(e)
                }
            })
            .collect()
    }
}

pub fn build_h(inst: &SchrodingerInstance) -> HermitianOperator {
    HermitianOperator::from_real_diag(&inst.kinetic_diagonal())
}

/// Hermitian compression of `lambda(V)` on the operator box.
pub fn potential_matrix(inst: &SchrodingerInstance) -> Result<HermitianOperator> {
    hermitian_compression(&inst.potential, &inst.basis())
}

pub fn build_hv(inst: &SchrodingerInstance) -> Result<HermitianOperator> {
    inst.validate()?;
    Ok(build_h(inst).add(&potential_matrix(inst)?))
}

/// An eigenvalue count with its guard-band flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Count {
    pub count: usize,
    pub boundary_sensitive: bool,
}

fn guard(values: &[f64], t: f64) -> bool {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(t.abs());
    values
        .iter()
        .any(|v| (v - t).abs() <= COUNT_GUARD * scale.max(f64::MIN_POSITIVE))
}

/// Number of eigenvalues `< t` (ascending input).
pub fn count_below_values(values: &[f64], t: f64) -> Count {
    Count {
        count: values.iter().filter(|&&v| v < t).count(),
        boundary_sensitive: guard(values, t),
    }
}

/// Number of eigenvalues `> t`.
pub fn count_above_values(values: &[f64], t: f64) -> Count {
    Count {
        count: values.iter().filter(|&&v| v > t).count(),
        boundary_sensitive: guard(values, t),
    }
}

pub fn count_below(a: &HermitianOperator, t: f64) -> Result<Count> {
    Ok(count_below_values(&hermitian_eig(a, false)?.eigenvalues, t))
}

pub fn count_above(a: &HermitianOperator, t: f64) -> Result<Count> {
    Ok(count_above_values(&hermitian_eig(a, false)?.eigenvalues, t))
}

/// `dim(ker H ∩ ker V)` from the null space of `H^2 + V^2`.
fn joint_kernel_dim(h: &HermitianOperator, v: &HermitianOperator, cutoff: f64) -> Result<usize> {
    let s = h.matrix().gram().add(&v.matrix().gram());
    let e = eigh(&s, Vectors::None)?;
    Ok(e.values.iter().filter(|&&x| x <= cutoff * cutoff).count())
}

/// Strict count below 0 where `zero_modes` eigenvalues are known to vanish.
fn count_below_structural(values: &[f64], zero_modes: usize) -> Count {
    let plain = count_below_values(values, 0.0);
    if !plain.boundary_sensitive || zero_modes == 0 {
        return plain;
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let band = COUNT_GUARD * scale.max(f64::MIN_POSITIVE);
    let in_band = values.iter().filter(|v| v.abs() <= band).count();
    Count {
        count: values.iter().filter(|&&v| v < -band).count(),
        boundary_sensitive: in_band > zero_modes,
    }
}

/// `-(H - lambda)^{-1/2} V (H - lambda)^{-1/2}` for `H >= 0` and `lambda < 0`.
pub fn birman_schwinger_matrix(h: &HermitianOperator, v: &HermitianOperator, lambda: f64) -> Result<HermitianOperator> {
    if !(lambda < 0.0) {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            domain: "lambda < 0",
        });
    }
    let r = spectral_function(h, |t| (t - lambda).powf(-0.5))?;
    Ok(sandwich(&r, v).scale(-1.0))
}

/// `R V R` for Hermitian `R`.
fn sandwich(r: &HermitianOperator, v: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::new(r.matrix().matmul(v.matrix()).matmul(r.matrix()))
}

pub fn birman_schwinger_k(inst: &SchrodingerInstance, lambda: f64) -> Result<HermitianOperator> {
    if !(lambda < 0.0) {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            domain: "lambda < 0",
        });
    }
    let d: Vec<f64> = inst
        .kinetic_diagonal()
        .iter()
        .map(|h| (h - lambda).powf(-0.5))
        .collect();
    Ok(potential_matrix(inst)?.congruence_diag(&d).scale(-1.0))
}

/// Records produced by one verifier call.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CountingReport {
    pub records: Vec<CheckRecord>,
}

impl CountingReport {
    pub fn tally(&self) -> Tally {
        Tally::of(&self.records)
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }

    pub fn no_fail(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }
}

fn excerpt(values: &[f64], k: usize) -> serde_json::Value {
    json!(values.iter().take(k).copied().collect::<Vec<f64>>())
}

/// Check `N(H + V; lambda) == N^+(K_V(lambda); 1)` for every grid point.
///
/// Works on any Hermitian `H >= 0` and Hermitian `V` of the same size.
pub fn abstract_bsp_matrices(
    id: &str,
    h: &HermitianOperator,
    v: &HermitianOperator,
    grid: &[f64],
) -> Result<CountingReport> {
    let hv = hermitian_eig(&h.add(v), false)?.eigenvalues;
    let mut records = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let rid = format!("{id}/lambda={lambda}");
        let dist = hv.iter().map(|e| (e - lambda).abs()).fold(f64::INFINITY, f64::min);
        let below = count_below_values(&hv, lambda);
        if dist <= SPECTRAL_GUARD {
            records.push(
                CheckRecord::equal(rid, ANCHOR_ABSTRACT_BSP, below.count as f64, f64::NAN, 0.0)
                    .with("spectral_distance", dist)
                    .mark_boundary("grid point within the spectral guard of H_V"),
            );
            continue;
        }
        let k = birman_schwinger_matrix(h, v, lambda)?;
        let kv = hermitian_eig(&k, false)?.eigenvalues;
        let above = count_above_values(&kv, 1.0);
        let mut rec = CheckRecord::equal(rid, ANCHOR_ABSTRACT_BSP, below.count as f64, above.count as f64, 0.0)
            .with("lambda", lambda)
            .with("spectral_distance", dist)
            .with("hv_lowest", excerpt(&hv, 4))
            .with("k_top", excerpt(&kv.iter().rev().copied().collect::<Vec<_>>(), 4));
        if below.boundary_sensitive || above.boundary_sensitive {
            rec = rec.mark_boundary("eigenvalue inside the counting guard band");
        }
        records.push(rec);
    }
    Ok(CountingReport { records })
}

pub fn verify_abstract_bsp(id: &str, inst: &SchrodingerInstance) -> Result<CountingReport> {
    inst.validate()?;
    if let Some(&bad) = inst.lambda_grid.iter().find(|&&l| !(l < 0.0)) {
        return Err(Error::Domain {
            name: "lambda",
            value: bad,
            domain: "lambda < 0",
        });
    }
    let h = build_h(inst);
    let v = potential_matrix(inst)?;
    abstract_bsp_matrices(id, &h, &v, &inst.lambda_grid)
}

/// Both chains of the borderline principle for `H >= 0` with nontrivial
/// kernel and `V <= 0`, using the partial inverse `H^{-1/2}`.
pub fn borderline_bsp_matrices(
    id: &str,
    h: &HermitianOperator,
    v: &HermitianOperator,
    p: f64,
    tol: f64,
) -> Result<CountingReport> {
    let v_spec = hermitian_eig(v, false)?;
    let v_scale = v_spec.norm().max(f64::MIN_POSITIVE);
    let v_top = v_spec.eigenvalues.last().copied().unwrap_or(0.0);
    if v_top > 1e-10 * v_scale {
        return Err(Error::NotNonpositive { max_eigenvalue: v_top });
    }

    let h_eig = eigh(h.matrix(), Vectors::Full)?;
    let h_norm = h_eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cutoff = 1e-12 * h_norm.max(1.0);
    let kernel: Vec<usize> = (0..h_eig.values.len())
        .filter(|&i| h_eig.values[i].abs() <= cutoff)
        .collect();
    let vecs = h_eig.vectors.expect("vectors requested");
    let ker_dim = kernel.len();

    let r = spectral_function(h, |t| if t.abs() <= cutoff { 0.0 } else { t.powf(-0.5) })?;
    let k = sandwich(&r, v).scale(-1.0);
    let kv = hermitian_eig(&k, false)?.eigenvalues;
    let hv = hermitian_eig(&h.add(v), false)?.eigenvalues;

    // Pi_0 V Pi_0 restricted to ker H.
    let basis = CMatrix::from_fn(h.dim(), ker_dim, |i, j| vecs[(i, kernel[j])]);
    let pvp = basis.adjoint().matmul(v.matrix()).matmul(&basis);
    let pvp_vals = eigh(&pvp, Vectors::None)?.values;
    let n0 = pvp_vals.iter().filter(|&&x| x < -1e-12).count();
    let n0_tie = pvp_vals.iter().any(|&x| x.abs() <= 1e-12 && x != 0.0);

    // Vectors annihilated by both H and V are exact zero modes of H_V; a
    // guard band fully explained by them is not ambiguous.
    let joint = joint_kernel_dim(h, v, cutoff.max(1e-12 * v_scale))?;
    let n_minus = count_below_structural(&hv, joint);
    let n_plus = count_above_values(&kv, 1.0);
    let mu = DecreasingSequence::from_reals(kv.iter().copied());
    let weak = weak_quasinorm(&mu, p)?.powf(p);

    let boundary = n_minus.boundary_sensitive || n_plus.boundary_sensitive;
    let nm = n_minus.count as f64;
    let np = n_plus.count as f64;
    let diag = |rec: CheckRecord| {
        let rec = rec
            .with("n_minus_hv", n_minus.count)
            .with("n_plus_k", n_plus.count)
            .with("kernel_dim", ker_dim)
            .with("joint_kernel_dim", joint)
            .with("n_minus_pvp", n0)
            .with("pvp_tie", n0_tie)
            .with("weak_norm_p", weak)
            .with("p", p);
        if boundary {
            rec.mark_boundary("eigenvalue inside the counting guard band")
        } else {
            rec
        }
    };
    let weak_tol = tol * weak.max(1.0);
    let records = vec![
        diag(CheckRecord::upper(
            format!("{id}/sandwich-lower"),
            ANCHOR_BORDERLINE_BSP,
            np,
            nm,
            0.0,
        )),
        diag(CheckRecord::upper(
            format!("{id}/sandwich-upper"),
            ANCHOR_BORDERLINE_BSP,
            nm,
            np + ker_dim as f64,
            0.0,
        )),
        diag(CheckRecord::lower(
            format!("{id}/kernel-lower"),
            ANCHOR_BORDERLINE_BSP,
            nm - n0 as f64,
            0.0,
            0.0,
        )),
        diag(CheckRecord::upper(
            format!("{id}/weak-norm"),
            ANCHOR_BORDERLINE_BSP,
            nm - n0 as f64,
            weak,
            weak_tol,
        )),
    ];
    Ok(CountingReport { records })
}

pub fn verify_borderline_bsp(id: &str, inst: &SchrodingerInstance, tol: f64) -> Result<CountingReport> {
    inst.validate()?;
    let h = build_h(inst);
    let v = potential_matrix(inst)?;
    borderline_bsp_matrices(id, &h, &v, inst.p_exponent, tol)
}

/// `c(p,q)^{2p} nu0 tau[|V_-|^q]^{p/q}` with the box-average estimate, which
/// never exceeds the true trace because `t -> max(-t,0)^q` is convex.
fn clr_rhs(inst: &SchrodingerInstance) -> Result<(f64, f64, crate::spectra::TraceEstimate)> {
    let (p, q) = (inst.p_exponent, inst.q_exponent);
    let c = clr_constant(p, q)?;
    let nu0 = nu0_bound(inst.dim());
    let est = positive_negative_parts(&inst.potential, inst.k_tau, q)?;
    let coef = c.powf(2.0 * p) * nu0;
    Ok((coef, coef * est.box_average.powf(p / q), est))
}

fn trace_diag(rec: CheckRecord, est: &crate::spectra::TraceEstimate) -> CheckRecord {
    rec.with("trace_box_average", est.box_average)
        .with("trace_centered", est.centered)
        .with("trace_change", est.box_change)
        .with("trace_converged", est.box_converged(TRACE_TOL))
        .with("k_tau", est.k_tau)
        .inconclusive_unless(est.box_converged(TRACE_TOL), "trace estimator not converged")
}

/// Undotted and zero-mean CLR bounds on the truncation, plus the relation
/// between the two counts.
pub fn verify_clr(id: &str, inst: &SchrodingerInstance, tol: f64) -> Result<CountingReport> {
    let hv = build_hv(inst)?;
    let (coef, rhs, est) = clr_rhs(inst)?;
    let full = hermitian_eig(&hv, false)?.eigenvalues;
    let dotted = hermitian_eig(&hv.dotted(), false)?.eigenvalues;
    let n_full = count_below_values(&full, 0.0);
    let n_dot = count_below_values(&dotted, 0.0);
    let scale = tol * rhs.max(1.0);
    let mark = |rec: CheckRecord, c: Count| {
        let rec = rec
            .with("constant", coef)
            .with("p", inst.p_exponent)
            .with("q", inst.q_exponent)
            .with("count", c.count)
            .with(
                "lowest",
                excerpt(if c.count == n_full.count { &full } else { &dotted }, 4),
            );
        if c.boundary_sensitive {
            rec.mark_boundary("eigenvalue inside the counting guard band")
        } else {
            rec
        }
    };
    let undotted = CheckRecord::upper(
        format!("{id}/undotted"),
        ANCHOR_CLR,
        n_full.count as f64 - 1.0,
        rhs,
        scale,
    );
    let zero_mean = CheckRecord::upper(
        format!("{id}/dotted"),
        ANCHOR_CLR_DOTTED,
        n_dot.count as f64,
        rhs,
        scale,
    );
    let gap = n_full.count as f64 - n_dot.count as f64;
    let relation =
        CheckRecord::upper(format!("{id}/dotted-gap"), ANCHOR_CLR_DOTTED, gap, 1.0, 0.0).with("lower_ok", gap >= 0.0);
    let relation = if gap < 0.0 {
        CheckRecord::lower(format!("{id}/dotted-gap"), ANCHOR_CLR_DOTTED, gap, 0.0, 0.0)
    } else {
        relation
    };
    let boundary = n_full.boundary_sensitive || n_dot.boundary_sensitive;
    let relation = if boundary {
        relation.mark_boundary("eigenvalue inside the counting guard band")
    } else {
        relation
    };
    Ok(CountingReport {
        records: vec![
            trace_diag(mark(undotted, n_full), &est),
            trace_diag(mark(zero_mean, n_dot), &est),
            relation,
        ],
    })
}

/// Counts for `h^{n/p} H + lambda(V)` over the instance's `h_grid` against
/// the CLR bound with slack 1.
pub fn semiclassical_scan(id: &str, inst: &SchrodingerInstance, tol: f64) -> Result<CountingReport> {
    if inst.h_grid.is_empty() {
        return Err(Error::Invalid("empty h grid".into()));
    }
    if inst.h_grid.iter().any(|&h| !(h > 0.0)) || inst.h_grid.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Invalid("h grid must be positive and decreasing".into()));
    }
    inst.validate()?;
    let (coef, rhs1, est) = clr_rhs(inst)?;
    let n = inst.dim() as f64;
    let kin = inst.kinetic_diagonal();
    let v = potential_matrix(inst)?;
    let dim = kin.len();
    let unit_ball = std::f64::consts::PI.powf(n / 2.0) / statrs::function::gamma::gamma(n / 2.0 + 1.0);
    let weyl = positive_negative_parts(&inst.potential, inst.k_tau, inst.p_exponent)?;
    let mut records = Vec::new();
    for &h in &inst.h_grid {
        let scaled: Vec<f64> = kin.iter().map(|x| x * h.powf(n / inst.p_exponent)).collect();
        let op = HermitianOperator::from_real_diag(&scaled).add(&v);
        let vals = hermitian_eig(&op, false)?.eigenvalues;
        let c = count_below_values(&vals, 0.0);
        let rhs = rhs1 * h.powf(-n) + 1.0;
        let mut rec = CheckRecord::upper(
            format!("{id}/h={h}"),
            ANCHOR_SEMICLASSICAL,
            c.count as f64,
            rhs,
            tol * rhs,
        )
        .with("h", h)
        .with("constant", coef)
        .with("count_times_h_n", c.count as f64 * h.powf(n))
        .with("weyl_reference", unit_ball * weyl.centered);
        rec = trace_diag(rec, &est);
        if c.count + 1 >= dim {
            rec.status = Status::Inconclusive;
            rec.set("reason", "count saturates the truncation box");
        } else if c.boundary_sensitive {
            rec = rec.mark_boundary("eigenvalue inside the counting guard band");
        }
        records.push(rec);
    }
    Ok(CountingReport { records })
}

/// Riesz means of the zero-mean truncation against the Lieb-Thirring bound.
pub fn verify_lt(id: &str, inst: &SchrodingerInstance, gamma: f64, tol: f64) -> Result<CountingReport> {
    let p = inst.p_exponent;
    if !(p > 1.0) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            domain: "p > 1",
        });
    }
    let hv = build_hv(inst)?.dotted();
    let vals = hermitian_eig(&hv, false)?.eigenvalues;
    let lhs: f64 = vals.iter().filter(|&&x| x < 0.0).map(|x| (-x).powf(gamma)).sum();
    let l = lt_bound(p, gamma, inst.dim(), nu0_bound(inst.dim()))?;
    let est = positive_negative_parts(&inst.potential, inst.k_tau, p + gamma)?;
    let rhs = l * est.box_average;
    let rec = CheckRecord::upper(format!("{id}/gamma={gamma}"), ANCHOR_LT, lhs, rhs, tol * rhs.max(1.0))
        .with("gamma", gamma)
        .with("constant", l)
        .with("negative_count", vals.iter().filter(|&&x| x < 0.0).count())
        .with("lowest", excerpt(&vals, 4));
    Ok(CountingReport {
        records: vec![trace_diag(rec, &est)],
    })
}

/// Value of `L` used for the Sobolev constant in dimension `n`.
pub fn sobolev_constant(n: usize) -> Result<f64> {
    let l = lt_bound(n as f64 / 2.0, 1.0, n, nu0_bound(n))?;
    sobolev_k_from_l(n, l)
}

/// Kinetic energy of an orthonormal zero-mean family against the density
/// term `K_n tau[rho^{(n+2)/n}]`, `rho = sum u u*`.
///
/// `tau[rho^r]` is bounded above by `||rho||_inf^{r-1} tau[rho]` with
/// `||rho||_inf <= ||rho||_{l^1}`, which certifies the inequality outright
/// when it suffices; otherwise the centered trace estimate at `k_tau` decides.
pub fn verify_sobolev(id: &str, family: &[FourierElement], k_tau: usize, tol: f64) -> Result<CountingReport> {
    let first = family.first().ok_or_else(|| Error::Invalid("empty family".into()))?;
    let theta = first.theta().clone();
    let n = theta.dim();
    if n < 3 {
        return Err(Error::Domain {
            name: "n",
            value: n as f64,
            domain: "n >= 3",
        });
    }
    let mut worst: f64 = 0.0;
    for (i, u) in family.iter().enumerate() {
        if u.theta() != &theta {
            return Err(Error::ThetaMismatch);
        }
        let mean = u.trace().norm();
        if mean > 1e-10 {
            return Err(Error::NonzeroMean { index: i, mean });
        }
        for (j, w) in family.iter().enumerate() {
            let ip = u.mul(&w.adjoint())?.trace();
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((ip - Complex64::new(want, 0.0)).norm());
        }
    }
    if worst > 1e-10 {
        return Err(Error::NotOrthonormal { defect: worst });
    }
    let lhs: f64 = family.iter().map(FourierElement::gradient_energy).sum();
    let mut rho = FourierElement::zero(theta.clone());
    for u in family {
        rho = rho.add(&u.mul(&u.adjoint())?)?;
    }
    let rho = rho.real_part();
    let r = (n as f64 + 2.0) / n as f64;
    let k_n = sobolev_constant(n)?;
    let mass = rho.trace().re;
    let sup_bound = rho.hatlp_norm(1.0)?.min(
        family
            .iter()
            .map(|u| u.hatlp_norm(1.0).map(|x| x * x))
            .sum::<Result<f64>>()?,
    );
    let certified = k_n * sup_bound.powf(r - 1.0) * mass;
    let k_tau = k_tau.max(rho.support_radius());
    let est = trace_of_function(&rho, k_tau, move |t| t.max(0.0).powf(r))?;
    let rhs = k_n * est.centered;
    let slack = tol * lhs.max(1.0);
    let mut rec = CheckRecord::lower(format!("{id}/size={}", family.len()), ANCHOR_SOBOLEV, lhs, rhs, slack)
        .with("constant", k_n)
        .with("constant_exponent", -2.0 / n as f64)
        .with("certified_rhs", certified)
        .with("certified", lhs >= certified - slack)
        .with("trace_centered", est.centered)
        .with("trace_change", est.centered_change)
        .with("k_tau", est.k_tau)
        .with("family_size", family.len());
    if lhs >= certified - slack {
        rec.status = Status::Pass;
    } else {
        rec = rec.inconclusive_unless(est.centered_converged(TRACE_TOL), "trace estimator not converged");
    }
    Ok(CountingReport { records: vec![rec] })
}

/// Lowest eigenvalues of a matrix, for reports.
pub fn spectrum_excerpt(s: &Spectrum, k: usize) -> Vec<f64> {
    s.eigenvalues.iter().take(k).copied().collect()
}
