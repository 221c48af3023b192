//! Intersections of the stable and unstable manifolds of the origin.
//!
//! A homoclinic point solves `G(q) = P^u(u1, v1) - P^s(u2, v2) = 0` with
//! `q = (u1, v1, u2, v2)`. Solutions are refined by damped Newton, filtered by residual
//! and by distance from the trivial intersection at the origin.

mod fit;
mod scan;

pub use fit::{det_curve_fit, CurveFit, ILL_CONDITIONED};
pub use scan::{
    scan_parameters, transversality_curve, write_curve_csv, CurvePoint, ScanCell, ScanOptions,
    ScanTable,
};

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{nonwandering_bound, ModelParams, State4, SymmetryId};
use crate::manifold::{EvalBox, ManifoldSeries};

/// Acceptance threshold on `|G|`.
pub const DEFAULT_THRESHOLD: f64 = 1e-10;
/// Candidates whose image point is this close to the origin are the trivial solution.
pub const MIN_POINT_NORM: f64 = 1e-6;
/// Solutions closer than this in image space are the same point.
pub const DEDUP_DISTANCE: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 50;
pub const MAX_HALVINGS: usize = 20;
pub const STEP_TOL: f64 = 1e-13;
/// Side of the default seed lattice.
pub const DEFAULT_SEEDS: usize = 21;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub threshold: f64,
    pub bx: EvalBox,
    pub max_iterations: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            threshold: DEFAULT_THRESHOLD,
            bx: EvalBox::default(),
            max_iterations: MAX_ITERATIONS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomoclinicSolution {
    pub u1: f64,
    pub v1: f64,
    pub u2: f64,
    pub v2: f64,
    /// Midpoint of `P^u(u1, v1)` and `P^s(u2, v2)`.
    pub point: State4,
    /// Euclidean norm of `P^u(u1, v1) - P^s(u2, v2)`.
    pub residual: f64,
    pub det: f64,
    pub params: ModelParams,
    pub series_order: usize,
}

impl HomoclinicSolution {
    pub fn parameters(&self) -> [f64; 4] {
        [self.u1, self.v1, self.u2, self.v2]
    }

    /// Whether the image point is fixed by `sigma5`, to `tol` per component.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let p = self.point;
        (p.x - p.w).abs() <= tol && (p.y - p.z).abs() <= tol
    }

    /// The solution mapped by `sigma4` (negation) or `sigma5` (reversal), with the residual
    /// recomputed from the series.
    pub fn reflect(
        &self,
        pu: &ManifoldSeries,
        ps: &ManifoldSeries,
        sym: SymmetryId,
    ) -> Result<HomoclinicSolution> {
        let q = match sym {
            SymmetryId::Sigma4 => [-self.u1, -self.v1, -self.u2, -self.v2],
            SymmetryId::Sigma5 => [self.u2, self.v2, self.u1, self.v1],
            other => {
                return Err(Error::InvalidParams(format!(
                    "{other:?} does not act on matching parameters"
                )))
            }
        };
        assemble(pu, ps, q)
    }
}

fn check_pair(pu: &ManifoldSeries, ps: &ManifoldSeries) -> Result<()> {
    if pu.params != ps.params || pu.order != ps.order {
        return Err(Error::ParamsMismatch);
    }
    Ok(())
}

fn mismatch(pu: &ManifoldSeries, ps: &ManifoldSeries, q: &Vector4<f64>) -> Vector4<f64> {
    pu.evaluate(q[0], q[1]).to_vector() - ps.evaluate(q[2], q[3]).to_vector()
}

fn match_jacobian(pu: &ManifoldSeries, ps: &ManifoldSeries, q: &Vector4<f64>) -> Matrix4<f64> {
    let ju = pu.jacobian(q[0], q[1]);
    let js = ps.jacobian(q[2], q[3]);
    let mut j = Matrix4::zeros();
    j.fixed_view_mut::<4, 2>(0, 0).copy_from(&ju);
    j.fixed_view_mut::<4, 2>(0, 2).copy_from(&(-js));
    j
}

/// Determinant of the matrix with rows `dP^u/du1, dP^u/dv1, dP^s/du2, dP^s/dv2`.
pub fn transversality_det(pu: &ManifoldSeries, ps: &ManifoldSeries, q: [f64; 4]) -> f64 {
    tangent_rows(pu, ps, q).determinant()
}

/// Transversality determinant with every row scaled to unit length; lies in `[-1, 1]`
/// and does not depend on the gauge magnitude.
pub fn normalized_transversality_det(pu: &ManifoldSeries, ps: &ManifoldSeries, q: [f64; 4]) -> f64 {
    let mut m = tangent_rows(pu, ps, q);
    for mut row in m.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 {
            row /= n;
        }
    }
    m.determinant()
}

fn tangent_rows(pu: &ManifoldSeries, ps: &ManifoldSeries, q: [f64; 4]) -> Matrix4<f64> {
    let ju = pu.jacobian(q[0], q[1]);
    let js = ps.jacobian(q[2], q[3]);
    Matrix4::from_rows(&[
        ju.column(0).transpose(),
        ju.column(1).transpose(),
        js.column(0).transpose(),
        js.column(1).transpose(),
    ])
}

fn assemble(pu: &ManifoldSeries, ps: &ManifoldSeries, q: [f64; 4]) -> Result<HomoclinicSolution> {
    let a = pu.evaluate(q[0], q[1]);
    let b = ps.evaluate(q[2], q[3]);
    let point = a.midpoint(b);
    Ok(HomoclinicSolution {
        u1: q[0],
        v1: q[1],
        u2: q[2],
        v2: q[3],
        point,
        residual: a.distance(b),
        det: transversality_det(pu, ps, q),
        params: ps.params,
        series_order: ps.order,
    })
}

/// Checks the acceptance filters on an assembled candidate.
fn accept(sol: HomoclinicSolution, threshold: f64) -> Result<HomoclinicSolution> {
    let norm = sol.point.norm();
    if !(norm > MIN_POINT_NORM) {
        return Err(Error::TrivialSolution { norm });
    }
    if !(sol.residual < threshold) {
        return Err(Error::ResidualTooLarge {
            residual: sol.residual,
            threshold,
        });
    }
    let bound = nonwandering_bound(sol.params, 4)?;
    if sol.point.norm_inf() > bound {
        return Err(Error::Divergence {
            step: 0,
            norm: sol.point.norm_inf(),
        });
    }
    Ok(sol)
}

/// Damped Newton on `G(q) = P^u(u1, v1) - P^s(u2, v2)`.
///
/// Each step is halved (at most [`MAX_HALVINGS`] times) until `|G|` decreases.
/// Converges when `|G| < threshold` and the step is below `STEP_TOL (1 + |q|)`, or when
/// `|G| < threshold` and no halving reduces it further.
pub fn newton_match(
    pu: &ManifoldSeries,
    ps: &ManifoldSeries,
    guess: [f64; 4],
    opts: &NewtonOptions,
) -> Result<HomoclinicSolution> {
    check_pair(pu, ps)?;
    let inside = |q: &Vector4<f64>| opts.bx.contains(q[0], q[1]) && opts.bx.contains(q[2], q[3]);
    let mut q = Vector4::from(guess);
    if !inside(&q) {
        return Err(Error::LeftBox { iteration: 0 });
    }
    let mut g = mismatch(pu, ps, &q);
    let mut gn = g.norm();
    for it in 0..opts.max_iterations {
        if gn == 0.0 {
            return accept(assemble(pu, ps, q.into())?, opts.threshold);
        }
        let j = match_jacobian(pu, ps, &q);
        let step = j
            .lu()
            .solve(&(-g))
            .filter(|s| s.iter().all(|c| c.is_finite()))
            .ok_or(Error::SingularJacobian { iteration: it })?;
        let mut t = 1.0;
        let mut improved = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = q + step * t;
            let gt = mismatch(pu, ps, &trial);
            let n = gt.norm();
            if n < gn {
                improved = Some((trial, gt, n));
                break;
            }
            t *= 0.5;
        }
        let Some((next, g_next, n_next)) = improved else {
            if gn < opts.threshold {
                return accept(assemble(pu, ps, q.into())?, opts.threshold);
            }
            return Err(Error::NoConvergence {
                iterations: it + 1,
                residual: gn,
            });
        };
        if !inside(&next) {
            return Err(Error::LeftBox { iteration: it + 1 });
        }
        let moved = (next - q).norm();
        q = next;
        g = g_next;
        gn = n_next;
        if gn < opts.threshold && moved < STEP_TOL * (1.0 + q.norm()) {
            return accept(assemble(pu, ps, q.into())?, opts.threshold);
        }
    }
    if gn < opts.threshold {
        return accept(assemble(pu, ps, q.into())?, opts.threshold);
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        residual: gn,
    })
}

/// Outcome of a search: accepted solutions plus the smallest `|G|` seen on any run.
#[derive(Clone, Debug, Default)]
pub(crate) struct SearchReport {
    pub solutions: Vec<HomoclinicSolution>,
    pub best_residual: Option<f64>,
}

impl SearchReport {
    fn note(&mut self, r: f64) {
        if r.is_finite() {
            self.best_residual = Some(self.best_residual.map_or(r, |b| b.min(r)));
        }
    }

    fn record(&mut self, outcome: Result<HomoclinicSolution>) {
        match outcome {
            Ok(sol) => {
                self.note(sol.residual);
                self.solutions.push(sol);
            }
            Err(Error::NoConvergence { residual, .. })
            | Err(Error::ResidualTooLarge { residual, .. }) => self.note(residual),
            Err(_) => {}
        }
    }
}

/// Sorts by residual and drops solutions within [`DEDUP_DISTANCE`] of a better one.
fn dedup(mut sols: Vec<HomoclinicSolution>) -> Vec<HomoclinicSolution> {
    sols.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let mut kept: Vec<HomoclinicSolution> = Vec::new();
    for s in sols {
        if kept.iter().all(|k| k.point.distance(s.point) > DEDUP_DISTANCE) {
            kept.push(s);
        }
    }
    kept
}

// Newton on H(u, v) = (P1 - P4, P2 - P3); returns the final (u, v) if |H| became tiny.
fn symmetric_newton(ps: &ManifoldSeries, seed: (f64, f64), bx: EvalBox) -> Option<(f64, f64)> {
    let h = |p: &Vector2<f64>| {
        let s = ps.evaluate(p[0], p[1]);
        Vector2::new(s.x - s.w, s.y - s.z)
    };
    let mut p = Vector2::new(seed.0, seed.1);
    let mut hp = h(&p);
    let mut hn = hp.norm();
    for _ in 0..MAX_ITERATIONS {
        if hn == 0.0 {
            break;
        }
        let j = ps.jacobian(p[0], p[1]);
        let jh = Matrix2::new(
            j[(0, 0)] - j[(3, 0)],
            j[(0, 1)] - j[(3, 1)],
            j[(1, 0)] - j[(2, 0)],
            j[(1, 1)] - j[(2, 1)],
        );
        let step = jh.lu().solve(&(-hp))?;
        let mut t = 1.0;
        let mut improved = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = p + step * t;
            let ht = h(&trial);
            if ht.norm() < hn {
                improved = Some((trial, ht));
                break;
            }
            t *= 0.5;
        }
        let (next, hnext) = improved?;
        if !bx.contains(next[0], next[1]) {
            return None;
        }
        let moved = (next - p).norm();
        p = next;
        hp = hnext;
        hn = hp.norm();
        if moved < STEP_TOL * (1.0 + p.norm()) {
            break;
        }
    }
    let scale = ps.params.amplitude_scale();
    (hn < 1e-6 * scale).then_some((p[0], p[1]))
}

pub(crate) fn symmetric_report(
    pu: &ManifoldSeries,
    ps: &ManifoldSeries,
    opts: &NewtonOptions,
    seeds: usize,
) -> Result<SearchReport> {
    check_pair(pu, ps)?;
    let ticks = opts.bx.ticks(seeds);
    let mut report = SearchReport::default();
    let mut roots: Vec<(f64, f64)> = Vec::new();
    for &u in &ticks {
        for &v in &ticks {
            // odd series: (-u, -v) gives the negated point
            if v < 0.0 || (v == 0.0 && u < 0.0) {
                continue;
            }
            if let Some(r) = symmetric_newton(ps, (u, v), opts.bx) {
                if !roots.iter().any(|o| (o.0 - r.0).abs() + (o.1 - r.1).abs() < 1e-12) {
                    roots.push(r);
                }
            }
        }
    }
    for (u, v) in roots {
        // cross-validate on the full system, seeded at the reduced root
        report.record(newton_match(pu, ps, [u, v, u, v], opts));
    }
    let negated: Vec<_> = report
        .solutions
        .iter()
        .filter_map(|s| s.reflect(pu, ps, SymmetryId::Sigma4).ok())
        .collect();
    for s in negated {
        report.record(accept(s, opts.threshold));
    }
    report.solutions = dedup(report.solutions);
    Ok(report)
}

/// Homoclinic points in `Fix(sigma5)`, found from the reduced system
/// `P^s_1 = P^s_4, P^s_2 = P^s_3` and confirmed by [`newton_match`].
pub fn symmetric_search(
    pu: &ManifoldSeries,
    ps: &ManifoldSeries,
    opts: &NewtonOptions,
    seeds: usize,
) -> Result<Vec<HomoclinicSolution>> {
    Ok(symmetric_report(pu, ps, opts, seeds)?.solutions)
}

pub(crate) fn multistart_report(
    pu: &ManifoldSeries,
    ps: &ManifoldSeries,
    opts: &NewtonOptions,
    seeds: usize,
) -> Result<SearchReport> {
    check_pair(pu, ps)?;
    let ticks = opts.bx.ticks(seeds);
    let mut report = SearchReport::default();
    for &u in &ticks {
        for &v in &ticks {
            if v < 0.0 || (v == 0.0 && u < 0.0) {
                continue;
            }
            report.record(newton_match(pu, ps, [u, v, u, v], opts));
        }
    }
    let base = dedup(std::mem::take(&mut report.solutions));
    let mut all = base.clone();
    for s in &base {
        for sym in [SymmetryId::Sigma4, SymmetryId::Sigma5] {
            if let Ok(r) = s.reflect(pu, ps, sym).and_then(|r| accept(r, opts.threshold)) {
                all.push(r);
            }
        }
        if let Ok(r) = s
            .reflect(pu, ps, SymmetryId::Sigma4)
            .and_then(|r| r.reflect(pu, ps, SymmetryId::Sigma5))
            .and_then(|r| accept(r, opts.threshold))
        {
            all.push(r);
        }
    }
    report.solutions = dedup(all);
    Ok(report)
}

/// Newton from a `seeds x seeds` lattice of symmetric guesses `(u, v, u, v)`, halved by
/// negation symmetry; results are closed under `sigma4` and `sigma5`, deduplicated in
/// image space and sorted by residual.
pub fn multistart_search(
    pu: &ManifoldSeries,
    ps: &ManifoldSeries,
    opts: &NewtonOptions,
    seeds: usize,
) -> Result<Vec<HomoclinicSolution>> {
    Ok(multistart_report(pu, ps, opts, seeds)?.solutions)
}
