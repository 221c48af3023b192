//! Stationary lattice profiles read off homoclinic orbits.
//!
//! A state `(x, y, z, w)` of the 4-d map is four consecutive lattice amplitudes. The
//! orbit of a homoclinic point is generated through the manifold conjugacies,
//! `f^k(p) = P^s(r1^k u2, r2^k v2)` forwards and `f^-k(p) = P^u(u1 / R1^k, v1 / R2^k)`
//! backwards, so the unstable direction never amplifies rounding error.

mod portrait;

pub use portrait::{default_portrait_seeds, portrait_2d, write_portrait_csv, PortraitOrbit};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homoclinic::HomoclinicSolution;
use crate::lattice::{csv_err, LatticeMap, Map4, ModelParams, State4, ESCAPE_FACTOR};
use crate::manifold::ManifoldSeries;

pub const DEFAULT_FLOOR: f64 = 1e-14;
pub const MAX_STEPS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub n: i64,
    pub u: f64,
}

/// Geometric contraction per site in each tail, `|u_{n+1}| / |u_n|` to the right and
/// `|u_{n-1}| / |u_n|` to the left.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TailDecay {
    pub forward: Option<f64>,
    pub backward: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonProfile {
    pub params: ModelParams,
    /// Consecutive sites in increasing order. Site 0 is the second coordinate of the
    /// homoclinic point.
    pub samples: Vec<Sample>,
    pub residual_max: f64,
    pub tail_decay: TailDecay,
    pub forward_steps: usize,
    pub backward_steps: usize,
    /// False when either direction stopped at the step cap instead of the floor.
    pub terminated_by_floor: bool,
}

impl SolitonProfile {
    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.u).collect()
    }

    pub fn first_site(&self) -> i64 {
        self.samples.first().map_or(0, |s| s.n)
    }

    /// Amplitude at site `n`, zero outside the recorded window.
    pub fn at(&self, n: i64) -> f64 {
        let k = n - self.first_site();
        if k < 0 {
            return 0.0;
        }
        self.samples.get(k as usize).map_or(0.0, |s| s.u)
    }

    /// `max_n |u_n - u_{1-n}|`.
    pub fn mirror_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.u - self.at(1 - s.n)).abs())
            .fold(0.0, f64::max)
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|s| s.u.abs()).fold(0.0, f64::max)
    }

    /// The profile `-u_n`, also stationary.
    pub fn negated(&self) -> SolitonProfile {
        let mut out = self.clone();
        for s in &mut out.samples {
            s.u = -s.u;
        }
        out.residual_max = stationary_residual(&out.values(), out.params);
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "u_n"]).map_err(csv_err)?;
        for s in &self.samples {
            w.write_record([s.n.to_string(), s.u.to_string()]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `max_n |u_n^3 + eps (u_{n+1} - 2 u_n + u_{n-1} + A (u_{n+2} + u_{n-2}))|` over the
/// window, with zeros beyond both ends.
pub fn stationary_residual(u: &[f64], p: ModelParams) -> f64 {
    let at = |k: isize| -> f64 {
        if k < 0 {
            0.0
        } else {
            u.get(k as usize).copied().unwrap_or(0.0)
        }
    };
    (0..u.len() as isize)
        .map(|n| {
            let c = at(n);
            let lin = at(n + 1) - 2.0 * c + at(n - 1) + p.a * (at(n + 2) + at(n - 2));
            (c * c * c + p.epsilon * lin).abs()
        })
        .fold(0.0, f64::max)
}

// Least-squares slope of ln|u| against the site index, over amplitudes well below the
// peak (linear regime) and well above the floor.
fn decay_rate(tail: &[f64], peak: f64, floor: f64) -> Option<f64> {
    let hi = 1e-4 * peak;
    let lo = (1e4 * floor).max(1e-300);
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .enumerate()
        .filter(|(_, u)| u.abs() <= hi && u.abs() >= lo)
        .map(|(k, u)| (k as f64, u.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some((sxy / sxx).exp())
}

/// Builds the lattice profile of the orbit through `sol`.
///
/// The x coordinate of `f^k(point)` is site `k - 1`, so `point = (u_-1, u_0, u_1, u_2)`
/// and a point fixed by `sigma5` yields `u_n = u_{1-n}`. Each direction runs until
/// `|state|_inf < floor` or `max_steps`.
pub fn build_profile(
    sol: &HomoclinicSolution,
    pu: &ManifoldSeries,
    ps: &ManifoldSeries,
    floor: f64,
    max_steps: usize,
) -> Result<SolitonProfile> {
    if pu.params != sol.params || ps.params != sol.params {
        return Err(Error::ParamsMismatch);
    }
    if !(floor > 0.0) {
        return Err(Error::InvalidParams("floor must be positive".into()));
    }
    let limit = ESCAPE_FACTOR * Map4::new(sol.params)?.nonwandering_bound();
    let check = |s: State4, step: usize| -> Result<State4> {
        let n = s.norm_inf();
        if n <= limit {
            Ok(s)
        } else {
            Err(Error::Divergence { step, norm: n })
        }
    };

    let mut forward = vec![sol.point];
    let (mut u, mut v) = (sol.u2, sol.v2);
    let mut fwd_floor = false;
    for k in 1..=max_steps {
        u *= ps.rates[0];
        v *= ps.rates[1];
        let s = check(ps.evaluate(u, v), k)?;
        forward.push(s);
        if s.norm_inf() < floor {
            fwd_floor = true;
            break;
        }
    }
    let mut backward = Vec::new();
    let (mut u, mut v) = (sol.u1, sol.v1);
    let mut bwd_floor = false;
    for k in 1..=max_steps {
        u /= pu.rates[0];
        v /= pu.rates[1];
        let s = check(pu.evaluate(u, v), k)?;
        backward.push(s);
        if s.norm_inf() < floor {
            bwd_floor = true;
            break;
        }
    }

    // backward states f^-k(p), k = K..1, give sites -K-1..-2
    let mut values: Vec<f64> = backward.iter().rev().map(|s| s.x).collect();
    values.extend(forward.iter().map(|s| s.x));
    let last = forward.last().copied().unwrap_or(sol.point);
    values.extend([last.y, last.z, last.w]);
    let first = -(backward.len() as i64) - 1;
    let samples: Vec<Sample> = values
        .iter()
        .enumerate()
        .map(|(k, &u)| Sample {
            n: first + k as i64,
            u,
        })
        .collect();

    let peak = values.iter().map(|u| u.abs()).fold(0.0, f64::max);
    let imax = values
        .iter()
        .position(|u| u.abs() == peak)
        .unwrap_or(0);
    let right = &values[imax..];
    let left: Vec<f64> = values[..=imax].iter().rev().copied().collect();
    let tail_decay = TailDecay {
        forward: decay_rate(right, peak, floor),
        backward: decay_rate(&left, peak, floor),
    };

    Ok(SolitonProfile {
        params: sol.params,
        residual_max: stationary_residual(&values, sol.params),
        samples,
        tail_decay,
        forward_steps: forward.len() - 1,
        backward_steps: backward.len(),
        terminated_by_floor: fwd_floor && bwd_floor,
    })
}
