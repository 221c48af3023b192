use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use dnls_core::homoclinic::{
    det_curve_fit, scan_parameters, symmetric_search, transversality_curve, write_curve_csv,
    NewtonOptions, ScanOptions, MAX_ITERATIONS,
};
use dnls_core::manifold::{compute_pair, EvalBox, ScalingPolicy};
use dnls_core::soliton::{build_profile, default_portrait_seeds, portrait_2d, write_portrait_csv, MAX_STEPS};
use dnls_core::spectral::{
    characteristic_poly, classify_eigenvalues, discriminant, eigenvectors_at_origin,
    solve_reciprocal_quartic, sturm_real_root_test, FixedPointKind,
};
use dnls_core::ModelParams;

use crate::config::{Command, RunConfig};
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Grid size per axis for conjugacy residuals.
const RESIDUAL_POINTS: usize = 41;

pub fn dispatch(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.command {
        Command::Eigen => eigen(cfg),
        Command::Manifold => manifold(cfg),
        Command::Homoclinic => homoclinic(cfg),
        Command::Scan => scan(cfg),
        Command::Transversality => transversality(cfg),
        Command::Soliton => soliton(cfg),
        Command::Portrait => portrait(cfg),
    }
}

fn io_err(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("cannot write {}: {e}", path.display()))
}

fn tag(e: f64, a: f64) -> String {
    format!("eps{e}_A{a}")
}

/// Writes `{"program", "version", "config", ...body}`.
fn write_json(cfg: &RunConfig, name: &str, body: Value) -> Result<PathBuf, CliError> {
    let path = cfg.out.join(name);
    let mut doc = json!({ "program": "dnls", "version": VERSION, "config": cfg });
    if let (Some(d), Value::Object(b)) = (doc.as_object_mut(), body) {
        d.extend(b);
    }
    let f = File::create(&path).map_err(|e| io_err(&path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| io_err(&path, e))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// CSV preceded by `#` comment lines carrying the version and the run config.
fn write_csv(
    cfg: &RunConfig,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> dnls_core::Result<()>,
) -> Result<PathBuf, CliError> {
    let path = cfg.out.join(name);
    let f = File::create(&path).map_err(|e| io_err(&path, e))?;
    let mut w = BufWriter::new(f);
    let conf = serde_json::to_string(cfg).map_err(|e| io_err(&path, e))?;
    writeln!(w, "# dnls {VERSION}\n# config: {conf}").map_err(|e| io_err(&path, e))?;
    body(&mut w)?;
    w.flush().map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn scan_options(cfg: &RunConfig, workers: Option<usize>) -> ScanOptions {
    ScanOptions {
        order: cfg.order,
        policy: ScalingPolicy::default(),
        newton: NewtonOptions {
            threshold: cfg.threshold,
            bx: EvalBox { half_width: cfg.half_width },
            max_iterations: MAX_ITERATIONS,
        },
        seeds: cfg.seeds,
        workers,
    }
}

fn eigen(cfg: &RunConfig) -> Result<(), CliError> {
    let mut results = Vec::new();
    for (e, a) in cfg.pairs() {
        let p = ModelParams::new(e, a)?;
        let mut entry = json!({ "epsilon": e, "A": a });
        for (key, at) in [("origin", FixedPointKind::Origin), ("nontrivial", FixedPointKind::Nontrivial)] {
            let q = match characteristic_poly(p, at) {
                Ok(q) => q,
                // nontrivial fixed points exist only for eps*A < 0
                Err(err) if at == FixedPointKind::Nontrivial => {
                    println!("eps={e} A={a} {key}: absent");
                    entry[key] = json!({ "exists": false, "reason": err.to_string() });
                    continue;
                }
                Err(err) => return Err(err.into()),
            };
            let mut es = solve_reciprocal_quartic(q);
            if at == FixedPointKind::Origin && es.hyperbolic {
                es = eigenvectors_at_origin(p, &es)?;
            }
            let class = classify_eigenvalues(a, at)?;
            println!("eps={e} A={a} {key}: {}", to_value(&class).as_str().unwrap_or("?"));
            entry[key] = json!({
                "exists": true,
                "polynomial": { "coefficients": q.coefficients(), "a": q.a, "b": q.b },
                "discriminant": discriminant(p, at)?,
                "classification": class,
                "sturm": sturm_real_root_test(q),
                "eigensystem": es,
            });
        }
        results.push(entry);
    }
    let path = write_json(cfg, "eigen.json", json!({ "results": results }))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn manifold(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.order == 1 {
        eprintln!("warning: order 1 gives the linear approximation only");
    }
    let bx = EvalBox { half_width: cfg.half_width };
    for (e, a) in cfg.pairs() {
        let p = ModelParams::new(e, a)?;
        let class = classify_eigenvalues(a, FixedPointKind::Origin)?;
        let (pu, ps) = compute_pair(p, cfg.order, ScalingPolicy::default()).map_err(|err| match err {
            dnls_core::Error::NotAllReal(_) => CliError::Config(format!(
                "A = {a}: origin eigenvalues are {}; the manifold series need all four real, \
                 i.e. A in [(-2+sqrt 2)/4, 0)",
                to_value(&class).as_str().unwrap_or("not all real")
            )),
            other => other.into(),
        })?;
        let ru = pu.conjugacy_residual(bx, RESIDUAL_POINTS)?;
        let rs = ps.conjugacy_residual(bx, RESIDUAL_POINTS)?;
        println!("eps={e} A={a} N={}: conjugacy residual stable {rs:e}, unstable {ru:e}", cfg.order);
        let path = write_json(
            cfg,
            &format!("manifold_{}.json", tag(e, a)),
            json!({
                "epsilon": e,
                "A": a,
                "conjugacy_residual": { "stable": rs, "unstable": ru, "grid": RESIDUAL_POINTS },
                "stable": ps,
                "unstable": pu,
            }),
        )?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn homoclinic(cfg: &RunConfig) -> Result<(), CliError> {
    let table = scan_parameters(&cfg.epsilon, &cfg.a, &scan_options(cfg, Some(1)))?;
    let mut missing = Vec::new();
    for c in &table.cells {
        match &c.solution {
            Some(s) => println!(
                "eps={} A={}: {} solutions; point ({:e}, {:e}, {:e}, {:e}) residual {:e} det {:e}",
                c.epsilon, c.a, c.solutions.len(), s.point.x, s.point.y, s.point.z, s.point.w,
                s.residual, s.det
            ),
            None => {
                println!("eps={} A={}: none", c.epsilon, c.a);
                missing.push(tag(c.epsilon, c.a));
            }
        }
    }
    let path = write_json(cfg, "homoclinic.json", json!({ "cells": table.cells }))?;
    println!("wrote {}", path.display());
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("no homoclinic point at {}", missing.join(", "))))
    }
}

fn scan(cfg: &RunConfig) -> Result<(), CliError> {
    let table = scan_parameters(&cfg.epsilon, &cfg.a, &scan_options(cfg, cfg.workers))?;
    let found = table.cells.iter().filter(|c| c.found).count();
    println!("found homoclinic points in {found}/{} cells", table.cells.len());
    let csv = write_csv(cfg, "scan.csv", |w| table.write_csv(w))?;
    let js = write_json(cfg, "scan.json", json!({ "table": table }))?;
    println!("wrote {}\nwrote {}", csv.display(), js.display());
    Ok(())
}

fn transversality(cfg: &RunConfig) -> Result<(), CliError> {
    let e = cfg.epsilon[0];
    let curve = transversality_curve(e, &cfg.a, &scan_options(cfg, cfg.workers.or(Some(1))))?;
    let (xs, ds): (Vec<f64>, Vec<f64>) = curve.iter().filter_map(|p| p.det.map(|d| (p.a, d))).unzip();
    if xs.is_empty() {
        return Err(CliError::Numerical(format!("no symmetric homoclinic point at eps={e}")));
    }
    let fit = match det_curve_fit(&xs, &ds, cfg.degree) {
        Ok(f) => json!(f),
        Err(err) => json!({ "error": err.to_string() }),
    };
    let min = ds.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
    println!("eps={e}: {}/{} points, min |det| {min:e}", xs.len(), curve.len());
    let csv = write_csv(cfg, "transversality.csv", |w| write_curve_csv(&curve, w))?;
    let js = write_json(cfg, "transversality.json", json!({ "points": curve, "fit": fit }))?;
    println!("wrote {}\nwrote {}", csv.display(), js.display());
    Ok(())
}

fn soliton(cfg: &RunConfig) -> Result<(), CliError> {
    let opts = scan_options(cfg, Some(1));
    for (e, a) in cfg.pairs() {
        let p = ModelParams::new(e, a)?;
        let (pu, ps) = compute_pair(p, cfg.order, opts.policy)?;
        let sols = symmetric_search(&pu, &ps, &opts.newton, cfg.seeds)?;
        let sol = sols
            .iter()
            .filter(|s| s.point.x > 0.0)
            .min_by(|p, q| p.point.norm().total_cmp(&q.point.norm()))
            .ok_or_else(|| CliError::Numerical(format!("no symmetric homoclinic point at eps={e} A={a}")))?;
        let prof = build_profile(sol, &pu, &ps, cfg.floor, MAX_STEPS)?;
        println!(
            "eps={e} A={a}: {} sites, peak {:e}, stationary residual {:e}, mirror defect {:e}",
            prof.samples.len(),
            prof.peak(),
            prof.residual_max,
            prof.mirror_defect()
        );
        let t = tag(e, a);
        let csv = write_csv(cfg, &format!("soliton_{t}.csv"), |w| prof.write_csv(w))?;
        let js = write_json(
            cfg,
            &format!("soliton_{t}.json"),
            json!({
                "solution": sol,
                "residual_max": prof.residual_max,
                "mirror_defect": prof.mirror_defect(),
                "peak": prof.peak(),
                "tail_decay": prof.tail_decay,
                "terminated_by_floor": prof.terminated_by_floor,
                "samples": prof.samples,
            }),
        )?;
        println!("wrote {}\nwrote {}", csv.display(), js.display());
    }
    Ok(())
}

fn portrait(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.a.iter().any(|&a| a != 0.0) {
        eprintln!("warning: the planar map has A = 0; --A is ignored");
    }
    let seeds = default_portrait_seeds();
    for &e in &cfg.epsilon {
        let orbits = portrait_2d(ModelParams::new(e, 0.0)?, &seeds, cfg.steps)?;
        let escaped = orbits.iter().filter(|o| o.escaped).count();
        println!("eps={e}: {escaped}/{} orbits escaped", orbits.len());
        let path = write_csv(cfg, &format!("portrait_eps{e}.csv"), |w| write_portrait_csv(&orbits, w))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
