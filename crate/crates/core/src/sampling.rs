//! Seeded generators for random elements, potentials, symbols and families.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{FourierElement, Point, ThetaMatrix};
use crate::spectra::LatticeBasis;

/// Independent deterministic stream `stream` under `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn box_points(n: usize, radius: usize) -> Vec<Point> {
    LatticeBasis::new(n, radius).points().to_vec()
}

/// Gaussian coefficients on a random nonempty subset of the box of `radius`.
pub fn random_element<R: Rng>(rng: &mut R, theta: &ThetaMatrix, radius: usize) -> FourierElement {
    let pts = box_points(theta.dim(), radius);
    let keep = rng.gen_range(1..=pts.len());
    let chosen: Vec<Point> = pts.choose_multiple(rng, keep).cloned().collect();
    let terms: Vec<(Point, Complex64)> = chosen.into_iter().map(|k| (k, complex_normal(rng))).collect();
    FourierElement::new(theta.clone(), terms).expect("dimensions agree")
}

/// Gaussian coefficients on every point of the box of `radius`.
pub fn random_dense_element<R: Rng>(rng: &mut R, theta: &ThetaMatrix, radius: usize) -> FourierElement {
    let terms: Vec<(Point, Complex64)> = box_points(theta.dim(), radius)
        .into_iter()
        .map(|k| (k, complex_normal(rng)))
        .collect();
    FourierElement::new(theta.clone(), terms).expect("dimensions agree")
}

/// A random self-adjoint element `(x + x*)/2` scaled by `scale`, shifted by `shift`.
pub fn random_self_adjoint<R: Rng>(
    rng: &mut R,
    theta: &ThetaMatrix,
    radius: usize,
    scale: f64,
    shift: f64,
) -> FourierElement {
    let x = random_element(rng, theta, radius).real_part();
    let s = FourierElement::scalar(theta.clone(), Complex64::new(shift, 0.0));
    x.scale(Complex64::new(scale, 0.0)).add(&s).expect("same torus")
}

/// `-y y*` for a random `y` scaled by `scale`; nonpositive by construction.
pub fn random_nonpositive<R: Rng>(rng: &mut R, theta: &ThetaMatrix, radius: usize, scale: f64) -> FourierElement {
    let y = random_element(rng, theta, radius).scale(Complex64::new(scale, 0.0));
    y.mul(&y.adjoint())
        .expect("same torus")
        .real_part()
        .scale(Complex64::new(-1.0, 0.0))
}

/// `y y*` for a random `y` scaled by `scale`; nonnegative by construction.
pub fn random_nonnegative<R: Rng>(rng: &mut R, theta: &ThetaMatrix, radius: usize, scale: f64) -> FourierElement {
    random_nonpositive(rng, theta, radius, scale).scale(Complex64::new(-1.0, 0.0))
}

/// Gaussian symbol on a random nonempty subset of the box of `radius`.
pub fn random_symbol<R: Rng>(rng: &mut R, n: usize, radius: usize) -> BTreeMap<Point, Complex64> {
    let pts = box_points(n, radius);
    let keep = rng.gen_range(1..=pts.len());
    pts.choose_multiple(rng, keep)
        .cloned()
        .map(|k| (k, complex_normal(rng)))
        .collect()
}

/// Random orthonormal family of zero-mean elements with support in the box
/// of `radius`, orthonormalized in the inner product `tau(u v*)`.
pub fn random_orthonormal_family<R: Rng>(
    rng: &mut R,
    theta: &ThetaMatrix,
    radius: usize,
    size: usize,
) -> Vec<FourierElement> {
    let pts: Vec<Point> = box_points(theta.dim(), radius).into_iter().skip(1).collect();
    assert!(size <= pts.len(), "box too small for the requested family");
    let mut vecs: Vec<Vec<Complex64>> = Vec::with_capacity(size);
    while vecs.len() < size {
        let mut v: Vec<Complex64> = (0..pts.len()).map(|_| complex_normal(rng)).collect();
        for _ in 0..2 {
            for u in &vecs {
                let proj: Complex64 = v.iter().zip(u).map(|(a, b)| a * b.conj()).sum();
                for (a, b) in v.iter_mut().zip(u) {
                    *a -= proj * b;
                }
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            vecs.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    vecs.into_iter()
        .map(|v| FourierElement::new(theta.clone(), pts.iter().cloned().zip(v)).expect("dimensions agree"))
        .collect()
}

/// Uniform antisymmetric theta with entries in `[0, 1)`.
pub fn random_theta<R: Rng>(rng: &mut R, n: usize) -> ThetaMatrix {
    let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.gen::<f64>()).collect();
    ThetaMatrix::from_upper(n, &upper).expect("valid size")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = rng(7, 1).gen();
        let b: u64 = rng(7, 1).gen();
        let c: u64 = rng(7, 2).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn structural_signs() {
        let mut r = rng(1, 0);
        let th = random_theta(&mut r, 2);
        let v = random_nonpositive(&mut r, &th, 1, 1.0);
        assert!(v.self_adjoint_defect() < 1e-12);
        assert!(v.trace().re < 0.0);
        let fam = random_orthonormal_family(&mut r, &ThetaMatrix::zero(3), 1, 4);
        for (i, u) in fam.iter().enumerate() {
            assert_eq!(u.trace(), Complex64::new(0.0, 0.0));
            for (j, w) in fam.iter().enumerate() {
                let ip = u.mul(&w.adjoint()).unwrap().trace();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }
}
