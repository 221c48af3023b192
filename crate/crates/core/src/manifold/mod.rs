//! Parametrizations of the stable and unstable manifolds of the origin.
//!
//! A [`ManifoldSeries`] is the truncated power series `P(u, v) = sum a^{nm} u^n v^m`
//! (total degree `n + m <= N`) solving `f(P(u, v)) = P(r1 u, r2 v)`, with `(r1, r2)` the
//! stable eigenvalues for the stable branch and their reciprocals for the unstable one.
//! The first-order blocks are the scaled eigenvectors `gamma_i w_i`; the scale factors
//! are a free gauge, fixed here by [`ScalingPolicy`].
//!
//! Since the map and its inverse are polynomial, both parametrizations are entire and
//! their coefficients decay faster than geometrically. The default gauge therefore
//! stretches the parameter plane until the unit box reaches far out along the manifold,
//! which is where the homoclinic intersections live.

mod io;
pub mod recursion;

pub use recursion::{
    block_residuals, cubic_convolution, solve_order_block, tri_index, tri_len, RESONANCE_TOL,
};

use nalgebra::{Matrix4x2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeMap, Map4, ModelParams, State4};
use crate::spectral::{self, Classification};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 80;

/// Default ratio between `|P|_inf` at the edge of the unit box (along each parameter axis)
/// and the amplitude scale `sqrt|eps A|`.
pub const DEFAULT_REACH_RATIO: f64 = 1e4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Stable,
    Unstable,
}

/// How the eigenvector scale factors `(gamma1, gamma2)` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ScalingPolicy {
    /// `gamma_i = kappa_i sqrt|eps A|`, with `kappa_i` found by bisection on a log scale so
    /// that `max |P(+-e_i)|_inf = ratio * sqrt|eps A|`. Both branches share the `kappa_i`
    /// of the stable branch, which makes `P^u = sigma5 o P^s` up to rounding.
    Reach { ratio: f64 },
    /// Explicit scale factors multiplying the unit eigenvectors.
    Fixed { gamma: [f64; 2] },
}

impl Default for ScalingPolicy {
    fn default() -> Self {
        ScalingPolicy::Reach {
            ratio: DEFAULT_REACH_RATIO,
        }
    }
}

/// Square `[-half_width, half_width]^2` in the parameter plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalBox {
    pub half_width: f64,
}

impl Default for EvalBox {
    fn default() -> Self {
        EvalBox { half_width: 1.0 }
    }
}

impl EvalBox {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        u.abs() <= self.half_width && v.abs() <= self.half_width
    }

    /// `points` equally spaced values across the box edge, endpoints included.
    pub fn ticks(&self, points: usize) -> Vec<f64> {
        if points <= 1 {
            vec![0.0]
        } else {
            (0..points)
                .map(|k| -self.half_width + 2.0 * self.half_width * k as f64 / (points - 1) as f64)
                .collect()
        }
    }

    /// `points x points` uniform grid including the corners.
    pub fn grid(&self, points: usize) -> Vec<(f64, f64)> {
        let ticks = self.ticks(points);
        ticks
            .iter()
            .flat_map(|&u| ticks.iter().map(move |&v| (u, v)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSeries {
    pub branch: Branch,
    pub order: usize,
    /// `(Lambda1, Lambda2)`: stable eigenvalues or their reciprocals.
    pub rates: [f64; 2],
    pub scale: [f64; 2],
    pub params: ModelParams,
    coeffs: Vec<[f64; 4]>,
}

impl ManifoldSeries {
    /// Coefficient block `(a1, a2, a3, a4)^{nm}`; zero beyond the truncation order.
    pub fn coeff(&self, n: usize, m: usize) -> [f64; 4] {
        if n + m > self.order {
            [0.0; 4]
        } else {
            self.coeffs[tri_index(n, m)]
        }
    }

    pub fn coefficients(&self) -> &[[f64; 4]] {
        &self.coeffs
    }

    /// Largest total degree whose block is not identically zero.
    pub fn top_nonzero_degree(&self) -> usize {
        (0..=self.order)
            .rev()
            .find(|&d| (0..=d).any(|n| self.coeff(n, d - n).iter().any(|&c| c != 0.0)))
            .unwrap_or(0)
    }

    fn powers(&self, x: f64) -> Vec<f64> {
        let mut p = vec![1.0; self.order + 1];
        for k in 1..=self.order {
            p[k] = p[k - 1] * x;
        }
        p
    }

    /// `P(u, v)`, summed from the highest total degree down.
    pub fn evaluate(&self, u: f64, v: f64) -> State4 {
        let (pu, pv) = (self.powers(u), self.powers(v));
        let mut acc = [0.0; 4];
        for d in (0..=self.order).rev() {
            for n in 0..=d {
                let m = d - n;
                let c = &self.coeffs[tri_index(n, m)];
                let mono = pu[n] * pv[m];
                for i in 0..4 {
                    acc[i] += c[i] * mono;
                }
            }
        }
        acc.into()
    }

    /// Term-wise derivative: columns `dP/du` and `dP/dv`.
    pub fn jacobian(&self, u: f64, v: f64) -> Matrix4x2<f64> {
        let (pu, pv) = (self.powers(u), self.powers(v));
        let mut du = [0.0; 4];
        let mut dv = [0.0; 4];
        for d in (1..=self.order).rev() {
            for n in 0..=d {
                let m = d - n;
                let c = &self.coeffs[tri_index(n, m)];
                let mu = if n > 0 { n as f64 * pu[n - 1] * pv[m] } else { 0.0 };
                let mv = if m > 0 { m as f64 * pu[n] * pv[m - 1] } else { 0.0 };
                for i in 0..4 {
                    du[i] += c[i] * mu;
                    dv[i] += c[i] * mv;
                }
            }
        }
        Matrix4x2::from_columns(&[Vector4::from(du), Vector4::from(dv)])
    }

    /// `|f(P(u, v)) - P(r1 u, r2 v)|` at a single parameter point.
    pub fn conjugacy_defect(&self, map: &Map4, u: f64, v: f64) -> f64 {
        let lhs = map.apply(self.evaluate(u, v));
        let rhs = self.evaluate(self.rates[0] * u, self.rates[1] * v);
        lhs.distance(rhs)
    }

    /// Maximum conjugacy defect over a `points x points` grid of `bx`.
    ///
    /// For the unstable branch the defect is taken at the preimages `(u/R1, v/R2)` of the
    /// grid points, so that both `P^u(u, v)` and `P^u(R1 u, R2 v)` are evaluated inside
    /// the box; the dilated points themselves lie far outside the series' useful domain.
    pub fn conjugacy_residual(&self, bx: EvalBox, points: usize) -> Result<f64> {
        let map = Map4::new(self.params)?;
        let pull = match self.branch {
            Branch::Stable => [1.0, 1.0],
            Branch::Unstable => [1.0 / self.rates[0], 1.0 / self.rates[1]],
        };
        Ok(bx
            .grid(points)
            .into_iter()
            .map(|(u, v)| self.conjugacy_defect(&map, u * pull[0], v * pull[1]))
            .fold(0.0, f64::max))
    }

    /// `max |f^-1(P(u, v)) - P(u/r1, v/r2)|` over the grid: the conjugacy for the inverse map.
    pub fn inverse_conjugacy_residual(&self, bx: EvalBox, points: usize) -> Result<f64> {
        let map = Map4::new(self.params)?;
        Ok(bx
            .grid(points)
            .into_iter()
            .map(|(u, v)| {
                let lhs = map.inverse(self.evaluate(u, v));
                lhs.distance(self.evaluate(u / self.rates[0], v / self.rates[1]))
            })
            .fold(0.0, f64::max))
    }

    /// The same manifold with parameters rescaled, `(u, v) -> (t1 u, t2 v)`.
    pub fn regauged(&self, t: [f64; 2]) -> ManifoldSeries {
        let mut out = self.clone();
        for d in 0..=self.order {
            for n in 0..=d {
                let m = d - n;
                let f = t[0].powi(n as i32) * t[1].powi(m as i32);
                for c in out.coeffs[tri_index(n, m)].iter_mut() {
                    *c *= f;
                }
            }
        }
        out.scale = [self.scale[0] * t[0], self.scale[1] * t[1]];
        out
    }
}

/// Stable eigenvalues of the origin, checked to be real and hyperbolic.
pub fn stable_rates(params: ModelParams) -> Result<(f64, f64)> {
    let q = spectral::characteristic_poly(params, spectral::FixedPointKind::Origin)?;
    let es = spectral::solve_reciprocal_quartic(q);
    if es.classification != Classification::AllReal {
        return Err(Error::NotAllReal(es.classification));
    }
    es.stable_real().ok_or(Error::NonHyperbolic)
}

fn unit_vandermonde(l: f64) -> [f64; 4] {
    let v = [1.0, l, l * l, l * l * l];
    let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.map(|c| c / n)
}

fn build(
    params: ModelParams,
    branch: Branch,
    order: usize,
    gamma: [f64; 2],
) -> Result<ManifoldSeries> {
    let (l1, l2) = stable_rates(params)?;
    let rates = match branch {
        Branch::Stable => [l1, l2],
        Branch::Unstable => [1.0 / l1, 1.0 / l2],
    };
    let first = [
        unit_vandermonde(rates[0]).map(|c| c * gamma[0]),
        unit_vandermonde(rates[1]).map(|c| c * gamma[1]),
    ];
    let coeffs = recursion::build_coefficients(
        params.epsilon * params.a,
        params.a,
        rates,
        first,
        order,
    )?;
    Ok(ManifoldSeries {
        branch,
        order,
        rates,
        scale: gamma,
        params,
        coeffs,
    })
}

// largest kappa with max |P(+-kappa e_dir)|_inf <= target, by bisection on ln kappa
fn reach_kappa(series: &ManifoldSeries, dir: usize, target: f64) -> Result<f64> {
    let reach = |kappa: f64| {
        let pts = if dir == 0 {
            [(kappa, 0.0), (-kappa, 0.0)]
        } else {
            [(0.0, kappa), (0.0, -kappa)]
        };
        pts.iter()
            .map(|&(u, v)| series.evaluate(u, v).norm_inf())
            .fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
    };
    let (mut lo, mut hi) = (1e-3f64.ln(), 1e6f64.ln());
    if !(reach(lo.exp()) <= target) {
        return Err(Error::Scaling(format!(
            "reach target {target:e} is below the linear regime"
        )));
    }
    if reach(hi.exp()) <= target {
        return Err(Error::Scaling(format!(
            "reach target {target:e} not attained along parameter axis {dir}"
        )));
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if reach(mid.exp()) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo.exp())
}

/// Eigenvector scale factors `(gamma1, gamma2)` selected by `policy`.
pub fn resolve_scale(params: ModelParams, order: usize, policy: ScalingPolicy) -> Result<[f64; 2]> {
    match policy {
        ScalingPolicy::Fixed { gamma } => {
            if gamma.iter().any(|g| !g.is_finite() || *g == 0.0) {
                return Err(Error::Scaling("fixed scale factors must be finite and nonzero".into()));
            }
            Ok(gamma)
        }
        ScalingPolicy::Reach { ratio } => {
            if !(ratio > 0.0) {
                return Err(Error::Scaling("reach ratio must be positive".into()));
            }
            let s = params.amplitude_scale();
            let natural = build(params, Branch::Stable, order, [s, s])?;
            let target = ratio * s;
            Ok([
                s * reach_kappa(&natural, 0, target)?,
                s * reach_kappa(&natural, 1, target)?,
            ])
        }
    }
}

/// Computes the order-`order` parametrization of one branch of the origin's manifolds.
pub fn compute_manifold(
    params: ModelParams,
    branch: Branch,
    order: usize,
    policy: ScalingPolicy,
) -> Result<ManifoldSeries> {
    Map4::new(params)?;
    if order == 0 {
        return Err(Error::InvalidParams("series order must be at least 1".into()));
    }
    let gamma = resolve_scale(params, order, policy)?;
    build(params, branch, order, gamma)
}

/// Both branches in the same gauge.
pub fn compute_pair(
    params: ModelParams,
    order: usize,
    policy: ScalingPolicy,
) -> Result<(ManifoldSeries, ManifoldSeries)> {
    Map4::new(params)?;
    if order == 0 {
        return Err(Error::InvalidParams("series order must be at least 1".into()));
    }
    let gamma = resolve_scale(params, order, policy)?;
    Ok((
        build(params, Branch::Unstable, order, gamma)?,
        build(params, Branch::Stable, order, gamma)?,
    ))
}
