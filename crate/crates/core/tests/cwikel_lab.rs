//! Exact Cwikel singular values against dense oracles and the stated bounds.

use nctori::cwikel::*;
use nctori::majorization::{c_plus, schatten_norm, weak_quasinorm};
use nctori::sampling::{self, rng};
use nctori::spectra::{power_symbol, singular_values};
use nctori::{FourierElement, ThetaMatrix};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pair(seed: u64, i: u64, commutative: bool) -> (FourierElement, Symbol) {
    let mut r = rng(seed, i);
    let theta = if commutative {
        ThetaMatrix::zero(2)
    } else {
        sampling::random_theta(&mut r, 2)
    };
    let x = sampling::random_element(&mut r, &theta, 1);
    let g = sampling::random_symbol(&mut r, 2, 2);
    (x, g)
}

#[test]
fn gram_route_matches_dense_compressions() {
    for (i, commutative) in (0..16).map(|i| (i, i % 2 == 0)) {
        let (x, g) = pair(50, i, commutative);
        let exact = exact_singular_values(&x, &g).unwrap();
        for radius in [3usize, 4] {
            let dense = singular_values(&dense_operator(&x, &g, radius).unwrap()).unwrap();
            for (j, s) in dense.values.iter().enumerate() {
                let e = exact.values().get(j).copied().unwrap_or(0.0);
                if s.max(e) > dense.floor {
                    assert!((s * s - e * e).abs() < 1e-9, "radius {radius} index {j}: {s} vs {e}");
                }
            }
        }
    }
}

#[test]
fn gram_examples() {
    let th = ThetaMatrix::planar(0.77);
    let g: Symbol = [
        (vec![0, 1], c(2.0, 0.0)),
        (vec![3, -1], c(0.0, -0.5)),
        (vec![1, 1], c(1.0, 1.0)),
    ]
    .into_iter()
    .collect();
    let gram = gram_matrix(&FourierElement::one(th.clone()), &g).unwrap();
    let m = gram.matrix();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert_eq!(m[(i, j)].norm(), 0.0);
            }
        }
    }
    let x = FourierElement::monomial(th, vec![-2, 5], c(0.3, -0.4));
    let mu = exact_singular_values(&x, &g).unwrap();
    let base = symbol_sequence(&g);
    for (a, b) in mu.values().iter().zip(base.values()) {
        assert!((a - 0.5 * b).abs() < 1e-14);
    }
}

#[test]
fn hilbert_schmidt_examples() {
    let th = ThetaMatrix::planar(0.3);
    let (_, g) = pair(51, 0, false);
    let rec = verify_hs_equality("one", &FourierElement::one(th.clone()), &g).unwrap();
    let l2: f64 = g.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    assert!((rec.lhs - l2).abs() < 1e-12 && (rec.rhs - l2).abs() < 1e-12);
    let mut r = rng(51, 1);
    let x = sampling::random_element(&mut r, &th, 2);
    let single: Symbol = [(vec![2, -1], c(0.0, 1.5))].into_iter().collect();
    let rec = verify_hs_equality("single", &x, &single).unwrap();
    assert!(rec.is_pass());
    assert!((rec.rhs - 1.5 * x.hatlp_norm(2.0).unwrap()).abs() < 1e-12);
}

#[test]
fn majorization_equality_cases() {
    let th = ThetaMatrix::planar(0.55);
    let (_, g) = pair(52, 0, false);
    let rec = verify_majorization("one", &FourierElement::one(th.clone()), &g).unwrap();
    assert!(rec.is_pass() && rec.lhs.abs() < 1e-12);
    let x = FourierElement::monomial(th, vec![1, 1], c(-2.0, 0.0));
    let rec = verify_majorization("unit", &x, &g).unwrap();
    assert!(rec.is_pass() && rec.lhs.abs() < 1e-12);
}

#[test]
fn strong_bound_is_an_equality_for_scaled_unitaries() {
    let th = ThetaMatrix::planar(0.12);
    let (_, g) = pair(53, 0, false);
    for p in [2.0, 3.0, 4.0] {
        let inst = CwikelInstance {
            x: FourierElement::monomial(th.clone(), vec![1, 0], c(0.0, 2.0)),
            g: g.clone(),
            p,
            regime: Regime::Plus,
            k_tau: 3,
        };
        let recs = verify_cwikel_bounds("u", &inst, 1e-12).unwrap();
        assert!(recs.iter().all(|r| r.is_pass()));
        assert!((recs[0].diagnostics[PROBE_LABEL].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn power_symbol_pipeline_at_p3() {
    let gp = power_symbol(2.0 / 3.0);
    let mut g = Symbol::new();
    for a in -6i64..=6 {
        for b in -6i64..=6 {
            if (a, b) != (0, 0) {
                g.insert(vec![a, b], gp(&[a, b]));
            }
        }
    }
    for i in 0..4 {
        let mut r = rng(54, i);
        let th = sampling::random_theta(&mut r, 2);
        let x = sampling::random_element(&mut r, &th, 1);
        let inst = CwikelInstance {
            x,
            g: g.clone(),
            p: 3.0,
            regime: Regime::Plus,
            k_tau: 6,
        };
        let recs = verify_cwikel_bounds("gp", &inst, 1e-12).unwrap();
        assert!(recs.iter().all(|r| r.is_pass()));
        let weak = &recs[1];
        assert!((weak.diagnostics["constant"].as_f64().unwrap() - c_plus(3.0).unwrap()).abs() < 1e-12);
        assert!(weak.margin > 0.0);
    }
}

#[test]
fn minus_regime_bounds() {
    for i in 0..10 {
        let (x, g) = pair(55, i, false);
        for p in [0.5, 1.0, 1.5] {
            let inst = CwikelInstance {
                x: x.clone(),
                g: g.clone(),
                p,
                regime: Regime::Minus,
                k_tau: 3,
            };
            let recs = verify_cwikel_bounds("m", &inst, 1e-12).unwrap();
            assert!(recs.iter().all(|r| r.is_pass()), "{recs:?}");
            let mu = exact_singular_values(&x, &g).unwrap();
            let lhs = schatten_norm(&mu, p).unwrap();
            let rhs = x.hatlp_norm(2.0).unwrap() * schatten_norm(&symbol_sequence(&g), p).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}

#[test]
fn two_via_holder_regime() {
    let cap = power_symbol(1.0);
    for i in 0..10 {
        let mut r = rng(56, i);
        let th = sampling::random_theta(&mut r, 2);
        let x = sampling::random_element(&mut r, &th, 1);
        let g: Symbol = sampling::random_symbol(&mut r, 2, 3)
            .into_iter()
            .filter(|(k, _)| k.iter().any(|&v| v != 0))
            .map(|(k, v)| {
                let bound = cap(&k).re;
                let unit = if v.norm() > 0.0 { v / v.norm() } else { c(1.0, 0.0) };
                (k, unit * bound * 0.9)
            })
            .collect();
        let inst = CwikelInstance {
            x,
            g,
            p: 4.0,
            regime: Regime::TwoViaHolder,
            k_tau: 5,
        };
        let recs = verify_cwikel_bounds("two", &inst, 1e-12).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].is_pass());
    }
}

#[test]
fn sandwiched_examples() {
    let th = ThetaMatrix::planar(0.4);
    for (p, q) in [(2.0, 2.0), (1.0, 2.0), (0.5, 1.0)] {
        let one = FourierElement::one(th.clone());
        let mu = sandwiched_singular_values(&one, p, 4).unwrap();
        let want = nctori::lattice::weak_norm_gp(2, p, 4).unwrap();
        assert!((weak_quasinorm(&mu, p).unwrap() - want).abs() < 1e-10 * want);
        let rec = verify_sandwiched_cwikel("one", &one, p, q, 4, 3, 1e-12).unwrap();
        assert!(rec.is_pass());

        let mut r = rng(57, (p * 10.0) as u64);
        let pos = sampling::random_nonnegative(&mut r, &th, 1, 1.0);
        let rec = verify_sandwiched_cwikel("pos", &pos, p, q, 5, 5, 1e-12).unwrap();
        assert_eq!(rec.diagnostics["positive_case"], true);
        assert!(rec.is_pass());

        let v = sampling::random_self_adjoint(&mut r, &th, 2, 2.0, -0.3);
        let rec = verify_sandwiched_cwikel("general", &v, p, q, 5, 6, 1e-12).unwrap();
        assert_eq!(rec.diagnostics["positive_case"], false);
        assert!(rec.is_pass());
    }
    let one = FourierElement::one(th);
    assert!(verify_sandwiched_cwikel("bad", &one, 2.0, 3.0, 3, 3, 1e-12).is_err());
}

#[test]
fn instance_validation() {
    let th = ThetaMatrix::planar(0.4);
    let base = CwikelInstance {
        x: FourierElement::one(th),
        g: [(vec![1, 0], c(1.0, 0.0))].into_iter().collect(),
        p: 3.0,
        regime: Regime::Plus,
        k_tau: 3,
    };
    assert!(base.validate().is_ok());
    assert!(CwikelInstance { p: 1.5, ..base.clone() }.validate().is_err());
    assert!(CwikelInstance {
        regime: Regime::Minus,
        ..base.clone()
    }
    .validate()
    .is_err());
    let wrong_dim: Symbol = [(vec![1, 0, 0], c(1.0, 0.0))].into_iter().collect();
    assert!(CwikelInstance {
        g: wrong_dim,
        ..base.clone()
    }
    .validate()
    .is_err());
    let json = serde_json::to_string(&base).unwrap();
    let back: CwikelInstance = serde_json::from_str(&json).unwrap();
    assert_eq!(back, base);
    let dup = json.replace(
        r#""g":[{"k":[1,0],"re":1.0,"im":0.0}]"#,
        r#""g":[{"k":[1,0],"re":1.0,"im":0.0},{"k":[1,0],"re":2.0,"im":0.0}]"#,
    );
    assert_ne!(dup, json);
    assert!(serde_json::from_str::<CwikelInstance>(&dup).is_err());
}
