//! Lattice-point counts and the constant nu0.

use nctori::lattice::*;

#[test]
fn count_examples() {
    assert_eq!(count_nonzero_in_ball(2, 1.0).unwrap(), 4);
    assert_eq!(count_nonzero_in_ball(2, 2.0).unwrap(), 8);
    assert_eq!(count_nonzero_in_ball(3, 1.0).unwrap(), 6);
    assert!(count_nonzero_in_ball(3, 0.9).is_err());
}

#[test]
fn planar_constant() {
    let e = nu0_estimate(2, 1e4).unwrap();
    assert_eq!((e.value, e.argmax), (4.0, 1));
    assert_eq!(e.profile.jumps[0], (1, 4));
    assert!(e.profile.jumps.iter().all(|&(l, c)| ratio(2, l, c) <= 4.0));
}

#[test]
fn estimates_respect_closed_form_bounds() {
    for n in [2usize, 3] {
        let e = nu0_estimate(n, 400.0).unwrap();
        assert!(e.value <= nu0_bound(n));
    }
    assert!(nu0_estimate(3, 1e3).unwrap().value <= 26.0);
}

/// Brute-force count over the cube, independent of the shell enumeration.
fn brute(n: usize, lambda: i64) -> u64 {
    let r = (lambda as f64).sqrt() as i64;
    let side = (2 * r + 1) as usize;
    (0..side.pow(n as u32))
        .filter(|&idx| {
            let mut rest = idx;
            let mut s = 0;
            for _ in 0..n {
                let x = (rest % side) as i64 - r;
                rest /= side;
                s += x * x;
            }
            s > 0 && s <= lambda
        })
        .count() as u64
}

#[test]
fn profile_matches_brute_force() {
    for n in [1usize, 2, 3, 4] {
        let p = count_profile(n, 30.0).unwrap();
        for &(l, c) in &p.jumps {
            assert_eq!(c, brute(n, l as i64), "n={n} lambda={l}");
        }
    }
}

#[test]
fn weak_norm_of_power_symbol() {
    for p in [0.5, 1.0, 2.0, 4.0] {
        let w1 = weak_norm_gp(2, p, 1).unwrap();
        assert!(w1 >= 4f64.powf(1.0 / p) - 1e-12);
    }
    for n in [2usize, 3] {
        for p in [0.75, 1.0, 2.0, 3.0] {
            let mut prev = 0.0;
            for k in 1..=4usize {
                let w = weak_norm_gp(n, p, k).unwrap();
                assert!(w >= prev - 1e-12);
                let cap = nu0_estimate(n, (k * k * n) as f64).unwrap().value.powf(1.0 / p);
                assert!(w <= cap + 1e-12, "n={n} p={p} K={k}");
                prev = w;
            }
        }
    }
}
