//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

/// Roots of `c[0] x^n + ... + c[n]` from companion-matrix eigenvalues, with a
/// Durand-Kerner fallback when the QR iteration does not converge.
pub fn polynomial_roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -c[j + 1] / c[0]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    if let Some(s) = Schur::try_new(m, f64::EPSILON, 1000) {
        return s.complex_eigenvalues().iter().copied().collect();
    }
    let p = |z: Complex64| {
        c.iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * z + k / c[0])
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..5000 {
        let prev = z.clone();
        for i in 0..n {
            let denom: Complex64 = (0..n).filter(|&j| j != i).map(|j| z[i] - z[j]).product();
            let step = p(z[i]) / denom;
            z[i] -= step;
        }
        if z
            .iter()
            .zip(&prev)
            .all(|(a, b)| (a - b).norm() <= 1e-15 * (1.0 + a.norm()))
        {
            break;
        }
    }
    z
}

/// Number of roots whose imaginary part is negligible.
pub fn real_root_count(c: &[f64]) -> usize {
    polynomial_roots(c)
        .iter()
        .filter(|z| z.im.abs() <= 1e-6 * z.norm().max(1.0))
        .count()
}

/// Discriminant of `a x^4 + b x^3 + c x^2 + d x + e`.
pub fn quartic_discriminant(k: [f64; 5]) -> f64 {
    let [a, b, c, d, e] = k;
    256.0 * a.powi(3) * e.powi(3) - 192.0 * a * a * b * d * e * e - 128.0 * a * a * c * c * e * e
        + 144.0 * a * a * c * d * d * e
        - 27.0 * a * a * d.powi(4)
        + 144.0 * a * b * b * c * e * e
        - 6.0 * a * b * b * d * d * e
        - 80.0 * a * b * c * c * d * e
        + 18.0 * a * b * c * d.powi(3)
        + 16.0 * a * c.powi(4) * e
        - 4.0 * a * c.powi(3) * d * d
        - 27.0 * b.powi(4) * e * e
        + 18.0 * b.powi(3) * c * d * e
        - 4.0 * b.powi(3) * d.powi(3)
        - 4.0 * b * b * c.powi(3) * e
        + b * b * c * c * d * d
}
