use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    multistart_report, normalized_transversality_det, symmetric_report, HomoclinicSolution,
    NewtonOptions, DEFAULT_SEEDS,
};
use crate::error::{Error, Result};
use crate::lattice::csv_err;
use crate::lattice::ModelParams;
use crate::manifold::{compute_pair, ScalingPolicy, DEFAULT_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub order: usize,
    pub policy: ScalingPolicy,
    pub newton: NewtonOptions,
    pub seeds: usize,
    /// Worker threads; `None` uses the machine's parallelism.
    pub workers: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            order: DEFAULT_ORDER,
            policy: ScalingPolicy::default(),
            newton: NewtonOptions::default(),
            seeds: DEFAULT_SEEDS,
            workers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub epsilon: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub found: bool,
    /// Smallest matching residual reached by any Newton run, accepted or not.
    pub best_residual: Option<f64>,
    pub solution: Option<HomoclinicSolution>,
    /// Every distinct accepted homoclinic point, best first.
    pub solutions: Vec<HomoclinicSolution>,
    /// Failure that prevented the search, if any.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub order: usize,
    pub threshold: f64,
    pub cells: Vec<ScanCell>,
}

fn run_cell(epsilon: f64, a: f64, opts: &ScanOptions) -> ScanCell {
    let mut cell = ScanCell {
        epsilon,
        a,
        found: false,
        best_residual: None,
        solution: None,
        solutions: Vec::new(),
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let params = ModelParams::new(epsilon, a)?;
        let (pu, ps) = compute_pair(params, opts.order, opts.policy)?;
        let sym = symmetric_report(&pu, &ps, &opts.newton, opts.seeds)?;
        let multi = multistart_report(&pu, &ps, &opts.newton, opts.seeds)?;
        let best = [sym.best_residual, multi.best_residual]
            .into_iter()
            .flatten()
            .fold(None, |b: Option<f64>, r| Some(b.map_or(r, |b| b.min(r))));
        cell.best_residual = best;
        let mut all = sym.solutions;
        all.extend(multi.solutions);
        let all = super::dedup(all);
        // prefer the symmetric point, then the smallest residual
        cell.solution = all
            .iter()
            .find(|s| s.is_symmetric(1e-10 * (1.0 + s.point.norm_inf())))
            .or(all.first())
            .cloned();
        cell.found = cell.solution.is_some();
        cell.solutions = all;
        Ok(())
    })();
    if let Err(e) = outcome {
        cell.error = Some(e.to_string());
    }
    cell
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::InvalidParams("worker count must be positive".into()));
        }
        b = b.num_threads(w);
    }
    b.build().map_err(|e| Error::InvalidParams(e.to_string()))
}

/// Runs every `(epsilon, A)` cell, `epsilon` outermost. Cells run concurrently; the table
/// order and content do not depend on the worker count.
pub fn scan_parameters(eps: &[f64], a: &[f64], opts: &ScanOptions) -> Result<ScanTable> {
    if eps.is_empty() || a.is_empty() {
        return Err(Error::InvalidParams("scan grids must be nonempty".into()));
    }
    let grid: Vec<(f64, f64)> = eps
        .iter()
        .flat_map(|&e| a.iter().map(move |&x| (e, x)))
        .collect();
    let cells = pool(opts.workers)?.install(|| {
        grid.par_iter()
            .map(|&(e, x)| run_cell(e, x, opts))
            .collect::<Vec<_>>()
    });
    Ok(ScanTable {
        order: opts.order,
        threshold: opts.newton.threshold,
        cells,
    })
}

impl ScanTable {
    pub fn cell(&self, epsilon: f64, a: f64) -> Option<&ScanCell> {
        self.cells.iter().find(|c| c.epsilon == epsilon && c.a == a)
    }

    /// `epsilon,A,found,best_residual,det`; missing values are empty fields.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epsilon", "A", "found", "best_residual", "det"])
            .map_err(csv_err)?;
        for c in &self.cells {
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                c.epsilon.to_string(),
                c.a.to_string(),
                c.found.to_string(),
                opt(c.best_residual),
                opt(c.solution.as_ref().map(|s| s.det)),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "A")]
    pub a: f64,
    /// Raw determinant in the working gauge.
    pub det: Option<f64>,
    /// Determinant with unit-length rows.
    pub normalized_det: Option<f64>,
    pub error: Option<String>,
}

/// Transversality determinant of the symmetric homoclinic point along `A` at fixed `epsilon`.
pub fn transversality_curve(epsilon: f64, a: &[f64], opts: &ScanOptions) -> Result<Vec<CurvePoint>> {
    let eval = |x: f64| -> CurvePoint {
        let r = (|| -> Result<(f64, f64)> {
            let params = ModelParams::new(epsilon, x)?;
            let (pu, ps) = compute_pair(params, opts.order, opts.policy)?;
            let rep = symmetric_report(&pu, &ps, &opts.newton, opts.seeds)?;
            // the symmetric point with positive first coordinate fixes the sign convention
            let sol = rep
                .solutions
                .iter()
                .filter(|s| s.point.x > 0.0)
                .min_by(|p, q| p.point.norm().total_cmp(&q.point.norm()))
                .ok_or(Error::NoConvergence {
                    iterations: 0,
                    residual: rep.best_residual.unwrap_or(f64::NAN),
                })?;
            Ok((sol.det, normalized_transversality_det(&pu, &ps, sol.parameters())))
        })();
        match r {
            Ok((d, n)) => CurvePoint { a: x, det: Some(d), normalized_det: Some(n), error: None },
            Err(e) => CurvePoint { a: x, det: None, normalized_det: None, error: Some(e.to_string()) },
        }
    };
    Ok(pool(opts.workers)?.install(|| a.par_iter().map(|&x| eval(x)).collect()))
}

/// Two-column `A,det` CSV; rows without a determinant are skipped.
pub fn write_curve_csv<W: Write>(points: &[CurvePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["A", "det"]).map_err(csv_err)?;
    for p in points {
        if let Some(d) = p.det {
            w.write_record([p.a.to_string(), d.to_string()]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}
