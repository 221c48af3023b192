//! Linearization of the 4-d map at its fixed points.
//!
//! Every characteristic polynomial here is palindromic, `x^4 + a x^3 + b x^2 + a x + 1`,
//! so roots come in pairs `(lambda, 1/lambda)`. Substituting `s = x + 1/x` reduces the
//! quartic to `s^2 + a s + (b - 2) = 0` followed by `x^2 - s x + 1 = 0`, which is how
//! eigenvalues are computed: the reciprocal pairing holds by construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ModelParams;

/// Lower edge `(-2 + sqrt 2)/4` of the `A` interval on which all origin eigenvalues are real.
pub const ALL_REAL_LOWER: f64 = -0.146_446_609_406_726_24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPointKind {
    Origin,
    Nontrivial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    AllReal,
    TwoPairsComplex,
    /// Two real eigenvalues and one complex-conjugate pair.
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootTest {
    FourReal,
    NotFourReal,
    /// Parameters sit exactly on one of the boundary curves.
    Indeterminate,
}

/// `p(x) = x^4 + a x^3 + b x^2 + a x + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReciprocalQuartic {
    pub a: f64,
    pub b: f64,
}

impl ReciprocalQuartic {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Monic coefficients, highest degree first.
    pub fn coefficients(&self) -> [f64; 5] {
        [1.0, self.a, self.b, self.a, 1.0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        (((x + self.a) * x + self.b) * x + self.a) * x + 1.0
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        (((x + self.a) * x + self.b) * x + self.a) * x + 1.0
    }
}

pub fn characteristic_poly(params: ModelParams, at: FixedPointKind) -> Result<ReciprocalQuartic> {
    params.require_nnn()?;
    let a = 1.0 / params.a;
    match at {
        FixedPointKind::Origin => Ok(ReciprocalQuartic::new(a, -2.0 * a)),
        FixedPointKind::Nontrivial => {
            if params.epsilon * params.a >= 0.0 {
                return Err(Error::InvalidParams(
                    "nontrivial fixed points exist only for eps*A < 0".into(),
                ));
            }
            Ok(ReciprocalQuartic::new(a, -(6.0 + 2.0 * a)))
        }
    }
}

/// Four-real-roots criterion obtained from the Sturm sequence of `p`:
///
/// 1. `b < -2` and `|a| < sqrt((b+2)^2)/2`
/// 2. `b > 6` and `-sqrt((b+2)^2)/2 < a < -sqrt(4b - 8)`
/// 3. `b > 6` and `sqrt(4b - 8) < a < sqrt((b+2)^2)/2`
pub fn sturm_real_root_test(q: ReciprocalQuartic) -> RootTest {
    let ReciprocalQuartic { a, b } = q;
    let half = 0.5 * (4.0 + 4.0 * b + b * b).sqrt();
    let inner = if b >= 2.0 { (4.0 * b - 8.0).sqrt() } else { f64::NAN };
    let on_boundary = b == -2.0 || b == 6.0 || a.abs() == half || a.abs() == inner;
    if on_boundary {
        return RootTest::Indeterminate;
    }
    let c1 = b < -2.0 && -half < a && a < half;
    let c2 = b > 6.0 && -half < a && a < -inner;
    let c3 = b > 6.0 && inner < a && a < half;
    if c1 || c2 || c3 {
        RootTest::FourReal
    } else {
        RootTest::NotFourReal
    }
}

/// Closed-form discriminant of the characteristic polynomial.
pub fn discriminant(params: ModelParams, at: FixedPointKind) -> Result<f64> {
    params.require_nnn()?;
    let a = params.a;
    let a5 = a.powi(5);
    Ok(match at {
        FixedPointKind::Origin => {
            4.0 * (-2.0 - 31.0 * a - 144.0 * a * a - 176.0 * a.powi(3) + 64.0 * a5) / a5
        }
        FixedPointKind::Nontrivial => {
            16.0 * (1.0
                + 17.0 * a
                + 144.0 * a * a
                + 640.0 * a.powi(3)
                + 1536.0 * a.powi(4)
                + 1024.0 * a5)
                / a5
        }
    })
}

/// Eigenvalue type by interval of `A`.
pub fn classify_eigenvalues(a: f64, at: FixedPointKind) -> Result<Classification> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidParams("A must be finite and nonzero".into()));
    }
    Ok(match at {
        FixedPointKind::Origin => {
            if a < ALL_REAL_LOWER || a > 2.0 {
                Classification::TwoPairsComplex
            } else if a < 0.0 {
                Classification::AllReal
            } else {
                Classification::Mixed
            }
        }
        FixedPointKind::Nontrivial => {
            if a > -1.0 && a < 0.0 {
                Classification::Mixed
            } else {
                Classification::AllReal
            }
        }
    })
}

/// Eigenvalues ordered `(lambda1, lambda2, 1/lambda1, 1/lambda2)` with
/// `|lambda1| <= |lambda2| <= 1`, plus optional Vandermonde eigenvectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub eigenvalues: [Complex64; 4],
    pub classification: Classification,
    pub hyperbolic: bool,
    /// Unit-norm eigenvectors `w_i`, proportional to `(1, l_i, l_i^2, l_i^3)`.
    pub eigenvectors: Option<[[Complex64; 4]; 4]>,
}

impl EigenSystem {
    /// The two stable eigenvalues when they are real.
    pub fn stable_real(&self) -> Option<(f64, f64)> {
        let [l1, l2, ..] = self.eigenvalues;
        (self.hyperbolic && l1.im == 0.0 && l2.im == 0.0).then_some((l1.re, l2.re))
    }

    /// The two unstable eigenvalues when they are real.
    pub fn unstable_real(&self) -> Option<(f64, f64)> {
        let [_, _, l3, l4] = self.eigenvalues;
        (self.hyperbolic && l3.im == 0.0 && l4.im == 0.0).then_some((l3.re, l4.re))
    }

    pub fn product(&self) -> Complex64 {
        self.eigenvalues.iter().product()
    }
}

// Roots of z^2 - s z + 1 as (inner, outer) with |inner| <= 1 <= |outer|; inner is the
// exact reciprocal of outer.
fn reciprocal_pair(s: Complex64) -> (Complex64, Complex64) {
    let root = (s * s - 4.0).sqrt();
    let plus = (s + root) * 0.5;
    let minus = (s - root) * 0.5;
    let outer = if plus.norm() >= minus.norm() { plus } else { minus };
    (outer.inv(), outer)
}

pub fn solve_reciprocal_quartic(q: ReciprocalQuartic) -> EigenSystem {
    let ReciprocalQuartic { a, b } = q;
    let c = b - 2.0;
    let disc = a * a - 4.0 * c;
    // roots of s^2 + a s + c, each computed without cancellation
    let (s1, s2) = if disc >= 0.0 {
        let sq = disc.sqrt();
        let qq = -0.5 * (a + if a >= 0.0 { sq } else { -sq });
        if qq == 0.0 {
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (Complex64::new(qq, 0.0), Complex64::new(c / qq, 0.0))
        }
    } else {
        let sq = Complex64::new(0.0, (-disc).sqrt());
        ((-a + sq) * 0.5, (-a - sq) * 0.5)
    };
    let mut pairs = [reciprocal_pair(s1), reciprocal_pair(s2)];
    // exact real arithmetic when s is real and |s| >= 2
    for (p, s) in pairs.iter_mut().zip([s1, s2]) {
        if s.im == 0.0 && s.re.abs() >= 2.0 {
            let sr = s.re;
            let outer = 0.5 * (sr + sr.signum() * (sr * sr - 4.0).sqrt());
            *p = (Complex64::new(1.0 / outer, 0.0), Complex64::new(outer, 0.0));
        }
    }
    pairs.sort_by(|x, y| x.0.norm().total_cmp(&y.0.norm()));
    let [(l1, l3), (l2, l4)] = pairs;
    let eigenvalues = [l1, l2, l3, l4];

    let on_circle = |z: Complex64| (z.norm() - 1.0).abs() <= 1e-12;
    let hyperbolic = !eigenvalues.iter().any(|&z| on_circle(z));
    let n_real = eigenvalues.iter().filter(|z| z.im == 0.0).count();
    let classification = match n_real {
        4 => Classification::AllReal,
        0 => Classification::TwoPairsComplex,
        _ => Classification::Mixed,
    };
    EigenSystem {
        eigenvalues,
        classification,
        hyperbolic,
        eigenvectors: None,
    }
}

/// Unit-norm Vandermonde eigenvector `(1, l, l^2, l^3)/|.|`, first component positive real.
pub fn vandermonde_unit(lambda: Complex64) -> [Complex64; 4] {
    let one = Complex64::new(1.0, 0.0);
    let v = [one, lambda, lambda * lambda, lambda * lambda * lambda];
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.map(|c| c / norm)
}

/// Fills the eigenvectors of the origin's companion-form Jacobian.
pub fn eigenvectors_at_origin(params: ModelParams, es: &EigenSystem) -> Result<EigenSystem> {
    params.require_nnn()?;
    if !es.hyperbolic {
        return Err(Error::NonHyperbolic);
    }
    let mut out = es.clone();
    out.eigenvectors = Some(es.eigenvalues.map(vandermonde_unit));
    Ok(out)
}

/// Characteristic polynomial, eigenvalues and eigenvectors of the origin.
pub fn origin_eigensystem(params: ModelParams) -> Result<EigenSystem> {
    let q = characteristic_poly(params, FixedPointKind::Origin)?;
    let es = solve_reciprocal_quartic(q);
    if !es.hyperbolic {
        return Err(Error::NonHyperbolic);
    }
    eigenvectors_at_origin(params, &es)
}
