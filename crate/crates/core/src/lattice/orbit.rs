use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{LatticeMap, State2, State4};
use crate::error::Result;

/// Orbits are declared escaped once `|state|_inf` exceeds this multiple of the
/// non-wandering bound.
pub const ESCAPE_FACTOR: f64 = 10.0;

/// Default iteration horizon used when asking whether an orbit escapes.
pub const DEFAULT_HORIZON: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orbit<S> {
    /// `states[0]` is the starting point; the last state is the escaping one when
    /// `escaped` is set.
    pub states: Vec<S>,
    pub escaped: bool,
}

impl<S> Orbit<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Number of steps taken before escaping, if the orbit escaped.
    pub fn escape_step(&self) -> Option<usize> {
        self.escaped.then(|| self.states.len() - 1)
    }
}

/// Iterates `map` (or its inverse) `steps` times, stopping early once the orbit leaves
/// `ESCAPE_FACTOR` times the non-wandering box.
pub fn iterate_orbit<M: LatticeMap>(
    map: &M,
    start: M::State,
    steps: usize,
    direction: Direction,
) -> Orbit<M::State> {
    let limit = ESCAPE_FACTOR * map.nonwandering_bound();
    let mut states = Vec::with_capacity(steps.min(1 << 16) + 1);
    let mut s = start;
    states.push(s);
    let mut escaped = false;
    for _ in 0..steps {
        s = match direction {
            Direction::Forward => map.apply(s),
            Direction::Backward => map.inverse(s),
        };
        states.push(s);
        let n = M::norm_inf(s);
        // NaN counts as escaped
        if !(n <= limit) {
            escaped = true;
            break;
        }
    }
    Orbit { states, escaped }
}

/// Named coordinates of a phase-space point, used for CSV headers.
pub trait Coordinates: Copy {
    const NAMES: &'static [&'static str];
    fn coords(&self) -> Vec<f64>;
}

impl Coordinates for State2 {
    const NAMES: &'static [&'static str] = &["x", "y"];
    fn coords(&self) -> Vec<f64> {
        self.to_array().to_vec()
    }
}

impl Coordinates for State4 {
    const NAMES: &'static [&'static str] = &["x", "y", "z", "w"];
    fn coords(&self) -> Vec<f64> {
        self.to_array().to_vec()
    }
}

impl<S: Coordinates> Orbit<S> {
    /// Rows of `step, coordinates..., escaped`; the flag is set only on the escaping row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["step".to_string()];
        header.extend(S::NAMES.iter().map(|s| s.to_string()));
        header.push("escaped".into());
        wtr.write_record(&header).map_err(csv_err)?;
        let last = self.states.len().saturating_sub(1);
        for (k, s) in self.states.iter().enumerate() {
            let mut row = vec![k.to_string()];
            row.extend(s.coords().iter().map(|c| c.to_string()));
            row.push((self.escaped && k == last).to_string());
            wtr.write_record(&row).map_err(csv_err)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Io(std::io::Error::other(e))
}
