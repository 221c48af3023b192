use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{csv_err, iterate_orbit, Direction, Map2, ModelParams, State2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PortraitOrbit {
    pub seed: State2,
    pub points: Vec<State2>,
    pub escaped: bool,
    pub escape_step: Option<usize>,
}

/// 80 seeds on 8 circles of radius `0.0125 k` around the origin, 10 angles each.
/// The same seeds serve every parameter value.
pub fn default_portrait_seeds() -> Vec<State2> {
    let mut seeds = Vec::with_capacity(80);
    for k in 1..=8 {
        let r = 0.0125 * k as f64;
        for j in 0..10 {
            let t = 2.0 * PI * (j as f64 + 0.5) / 10.0;
            seeds.push(State2::new(r * t.cos(), r * t.sin()));
        }
    }
    seeds
}

/// Forward orbits of the planar map from each seed, cut at escape.
pub fn portrait_2d(p: ModelParams, seeds: &[State2], steps: usize) -> Result<Vec<PortraitOrbit>> {
    let map = Map2::new(p)?;
    Ok(seeds
        .iter()
        .map(|&seed| {
            let o = iterate_orbit(&map, seed, steps, Direction::Forward);
            let escape_step = o.escape_step();
            let mut points = o.states;
            if seed == State2::ORIGIN {
                points.truncate(1);
            }
            PortraitOrbit {
                seed,
                points,
                escaped: o.escaped,
                escape_step,
            }
        })
        .collect())
}

/// Rows `orbit,step,x,y,escaped`.
pub fn write_portrait_csv<W: Write>(orbits: &[PortraitOrbit], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["orbit", "step", "x", "y", "escaped"]).map_err(csv_err)?;
    for (i, o) in orbits.iter().enumerate() {
        let last = o.points.len().saturating_sub(1);
        for (k, s) in o.points.iter().enumerate() {
            w.write_record([
                i.to_string(),
                k.to_string(),
                s.x.to_string(),
                s.y.to_string(),
                (o.escaped && k == last).to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}
