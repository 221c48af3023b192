use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Condition number of the scaled design matrix above which a fit is flagged.
pub const ILL_CONDITIONED: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFit {
    /// Monomial coefficients in `A`, constant term first.
    pub coefficients: Vec<f64>,
    /// All roots of the fitted polynomial.
    pub roots: Vec<Complex64>,
    /// Real roots in increasing order.
    pub real_roots: Vec<f64>,
    pub condition: f64,
    pub ill_conditioned: bool,
}

/// Least-squares polynomial fit `det(A) ~ sum c_k A^k`.
///
/// The fit is solved in `t = (A - c) / h` (samples centred and scaled to `[-1, 1]`),
/// then expanded back to monomials. Roots come from the companion matrix in `t`,
/// polished by Newton and mapped back.
pub fn det_curve_fit(a: &[f64], det: &[f64], degree: usize) -> Result<CurveFit> {
    if a.len() != det.len() {
        return Err(Error::InvalidParams(format!(
            "{} abscissae but {} values",
            a.len(),
            det.len()
        )));
    }
    if a.len() < degree + 1 {
        return Err(Error::InsufficientSamples {
            needed: degree + 1,
            got: a.len(),
        });
    }
    if a.iter().chain(det).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParams("samples must be finite".into()));
    }
    let lo = a.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c = 0.5 * (lo + hi);
    let h = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };

    let rows = a.len();
    let design = DMatrix::from_fn(rows, degree + 1, |i, k| ((a[i] - c) / h).powi(k as i32));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let b = svd
        .solve(&DVector::from_column_slice(det), smax * 1e-15)
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    let b: Vec<f64> = b.iter().copied().collect();

    // expand sum b_k ((A - c)/h)^k into powers of A
    let mut coefficients = vec![0.0; degree + 1];
    for (k, &bk) in b.iter().enumerate() {
        let scale = bk / h.powi(k as i32);
        let mut binom = 1.0;
        for j in 0..=k {
            // C(k, j) A^j (-c)^(k-j)
            coefficients[j] += scale * binom * (-c).powi((k - j) as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }

    let troots = poly_roots(&b);
    let roots: Vec<Complex64> = troots.iter().map(|t| t * h + c).collect();
    let mut real_roots: Vec<f64> = troots
        .iter()
        .filter(|t| t.im.abs() <= 1e-9 * (1.0 + t.re.abs()))
        .map(|t| c + h * polish(&b, t.re))
        .collect();
    real_roots.sort_by(f64::total_cmp);

    Ok(CurveFit {
        coefficients,
        roots,
        real_roots,
        condition,
        ill_conditioned: !(condition <= ILL_CONDITIONED),
    })
}

fn horner(p: &[f64], x: f64) -> (f64, f64) {
    let (mut v, mut d) = (0.0, 0.0);
    for &c in p.iter().rev() {
        d = d * x + v;
        v = v * x + c;
    }
    (v, d)
}

fn polish(p: &[f64], mut x: f64) -> f64 {
    for _ in 0..8 {
        let (v, d) = horner(p, x);
        if d == 0.0 {
            break;
        }
        let dx = v / d;
        x -= dx;
        if dx.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Roots of `sum p_k x^k` (ascending coefficients) via companion-matrix eigenvalues.
fn poly_roots(p: &[f64]) -> Vec<Complex64> {
    let big = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut deg = p.len().saturating_sub(1);
    while deg > 0 && p[deg].abs() <= 1e-14 * big {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = p[deg];
    let comp = DMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -p[deg - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    match Schur::try_new(comp, f64::EPSILON, 1000) {
        Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
        None => aberth(&p[..=deg]),
    }
}

/// Aberth-Ehrlich simultaneous iteration, used when the QR iteration stalls.
fn aberth(p: &[f64]) -> Vec<Complex64> {
    let deg = p.len() - 1;
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let (mut v, mut d) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for &c in p.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    };
    // Cauchy bound on root moduli
    let radius = 1.0 + p[..deg].iter().fold(0.0f64, |m, c| m.max((c / p[deg]).abs()));
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64;
            Complex64::from_polar(radius, t)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (1.0 - ratio * repulsion);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}
