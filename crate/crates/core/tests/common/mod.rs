//! Independent oracles and corpus generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nctori::linalg::CMatrix;
use nctori::sampling;
use nctori::{FourierElement, ThetaMatrix};
use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

/// `U1 = S` (cyclic shift) and `U2 = C = diag(omega^j)` on `C^N`, so that
/// `C S = omega S C` with `omega = exp(2 pi i a / N)`.
pub fn shift(size: usize) -> CMatrix {
    CMatrix::from_fn(size, size, |i, j| {
        if i == (j + 1) % size {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn clock(size: usize, a: i64) -> CMatrix {
    let d: Vec<Complex64> = (0..size)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * (a * j as i64) as f64 / size as f64))
        .collect();
    CMatrix::from_diag(&d)
}

fn matrix_power(m: &CMatrix, inverse: &CMatrix, e: i64) -> CMatrix {
    let base = if e < 0 { inverse } else { m };
    let mut out = CMatrix::identity(m.rows());
    for _ in 0..e.unsigned_abs() {
        out = out.matmul(base);
    }
    out
}

/// `sum_k x_k S^{k_1} C^{k_2}` for a planar element.
pub fn clock_shift_image(x: &FourierElement, size: usize, a: i64) -> CMatrix {
    let s = shift(size);
    let c = clock(size, a);
    let (si, ci) = (s.adjoint(), c.adjoint());
    let mut out = CMatrix::zeros(size, size);
    for (k, coef) in x.coeffs() {
        let term = matrix_power(&s, &si, k[0]).matmul(&matrix_power(&c, &ci, k[1]));
        out = out.add(&term.scale(*coef));
    }
    out
}

pub fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).max_abs()
}

/// Values of a commutative planar element on the `m x m` grid
/// `t = 2 pi (i, j) / m`, via an inverse 2D FFT.
pub fn grid_values(x: &FourierElement, m: usize) -> Vec<Complex64> {
    let mut data = vec![Complex64::new(0.0, 0.0); m * m];
    for (k, c) in x.coeffs() {
        let i = k[0].rem_euclid(m as i64) as usize;
        let j = k[1].rem_euclid(m as i64) as usize;
        data[i * m + j] += c;
    }
    fft2(&mut data, m, true);
    data
}

/// Fourier coefficients from grid values (forward 2D FFT, normalized).
pub fn grid_coefficients(values: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut data = values.to_vec();
    fft2(&mut data, m, false);
    let norm = (m * m) as f64;
    data.iter().map(|v| v / norm).collect()
}

fn fft2(data: &mut [Complex64], m: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    };
    for row in data.chunks_mut(m) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..m {
        for i in 0..m {
            col[i] = data[i * m + j];
        }
        fft.process(&mut col);
        for i in 0..m {
            data[i * m + j] = col[i];
        }
    }
}

/// Coefficient of `k` in a grid coefficient array.
pub fn grid_coeff(coeffs: &[Complex64], m: usize, k: &[i64]) -> Complex64 {
    let i = k[0].rem_euclid(m as i64) as usize;
    let j = k[1].rem_euclid(m as i64) as usize;
    coeffs[i * m + j]
}

/// Midpoint-rule average of `|x(t)|^p` on an `m x m` grid; spectrally
/// accurate for smooth periodic integrands.
pub fn quadrature_lp(x: &FourierElement, p: f64, m: usize) -> f64 {
    let vals = grid_values(x, m);
    vals.iter().map(|v| v.norm().powf(p)).sum::<f64>() / (m * m) as f64
}

/// Planar theta `a / size`.
pub fn rational_theta(a: i64, size: usize) -> ThetaMatrix {
    ThetaMatrix::planar(a as f64 / size as f64)
}

/// A random element with small Gaussian coefficients in the box of `radius`.
pub fn element<R: Rng>(rng: &mut R, theta: &ThetaMatrix, radius: usize) -> FourierElement {
    sampling::random_element(rng, theta, radius)
}
