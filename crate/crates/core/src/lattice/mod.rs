//! Stationary-state maps of the lattice
//!
//! Setting `du_n/dt = 0` in
//!
//! ```text
//! i du_n/dt + |u_n|^2 u_n + eps (u_{n+1} - 2 u_n + u_{n-1} + A (u_{n+2} + u_{n-2})) = 0
//! ```
//!
//! turns the lattice equation into a recurrence. With `A = 0` the recurrence is a
//! planar generalized Henon map acting on `(u_{n-1}, u_n)`; with `A != 0` it is a
//! volume-preserving polynomial map of R^4 acting on `(u_{n-2}, u_{n-1}, u_n, u_{n+1})`.
//! Both maps are real-analytic with polynomial inverses and are only ever applied to
//! real states.

mod orbit;
mod symmetry;

pub(crate) use orbit::csv_err;
pub use orbit::{iterate_orbit, Direction, Orbit, DEFAULT_HORIZON, ESCAPE_FACTOR};
pub use symmetry::{apply_symmetry, PhaseState, SymmetryId, SymmetryKind};

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lattice parameters: coupling strength `epsilon` and next-nearest-neighbour weight `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub epsilon: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

impl ModelParams {
    /// Validates `epsilon != 0` and finiteness. `A` may be zero; the 4-d map checks it
    /// separately.
    pub fn new(epsilon: f64, a: f64) -> Result<Self> {
        if !epsilon.is_finite() || !a.is_finite() {
            return Err(Error::InvalidParams(format!(
                "parameters must be finite (epsilon = {epsilon}, A = {a})"
            )));
        }
        if epsilon == 0.0 {
            return Err(Error::InvalidParams("epsilon must be nonzero".into()));
        }
        Ok(Self { epsilon, a })
    }

    pub fn require_nnn(&self) -> Result<()> {
        if self.a == 0.0 {
            return Err(Error::InvalidParams(
                "A must be nonzero for the 4-d map".into(),
            ));
        }
        Ok(())
    }

    /// `sqrt(|eps A|)`, the amplitude scale of every nontrivial structure of the 4-d map.
    pub fn amplitude_scale(&self) -> f64 {
        (self.epsilon * self.a).abs().sqrt()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct State2 {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct State4 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl State2 {
    pub const ORIGIN: State2 = State2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn to_vector(self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_inf(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl State4 {
    pub const ORIGIN: State4 = State4 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
        w: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Self { x, y, z, w }
    }

    pub fn splat(c: f64) -> Self {
        Self::new(c, c, c, c)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.x, self.y, self.z, self.w)
    }

    pub fn norm(self) -> f64 {
        self.to_vector().norm()
    }

    pub fn norm_inf(self) -> f64 {
        self.to_vector().amax()
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    pub fn distance(self, other: State4) -> f64 {
        (self.to_vector() - other.to_vector()).norm()
    }

    pub fn midpoint(self, other: State4) -> State4 {
        ((self.to_vector() + other.to_vector()) * 0.5).into()
    }
}

impl From<[f64; 2]> for State2 {
    fn from(a: [f64; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

impl From<Vector2<f64>> for State2 {
    fn from(v: Vector2<f64>) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<[f64; 4]> for State4 {
    fn from(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl From<Vector4<f64>> for State4 {
    fn from(v: Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }
}

/// Common interface of the planar and the 4-d map, used by orbit iteration.
pub trait LatticeMap {
    type State: Copy;

    fn apply(&self, s: Self::State) -> Self::State;
    fn inverse(&self, s: Self::State) -> Self::State;
    fn norm_inf(s: Self::State) -> f64;
    fn nonwandering_bound(&self) -> f64;
}

/// The planar map `f0(x, y) = (y, -x + 2y - y^3/eps)`.
#[derive(Clone, Copy, Debug)]
pub struct Map2 {
    params: ModelParams,
    inv_eps: f64,
}

impl Map2 {
    pub fn new(params: ModelParams) -> Result<Self> {
        let params = ModelParams::new(params.epsilon, params.a)?;
        Ok(Self {
            params,
            inv_eps: 1.0 / params.epsilon,
        })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn jacobian(&self, s: State2) -> Matrix2<f64> {
        Matrix2::new(0.0, 1.0, -1.0, 2.0 - 3.0 * s.y * s.y * self.inv_eps)
    }

    /// `|f0(psi(s)) - psi(T(s))|` for the change of variables `psi(x, y) = (x + y, 2x + y)`
    /// that conjugates `f0` to `T(x, y) = (x - (2x+y)^3/eps, x + y + (2x+y)^3/eps)`.
    pub fn conjugacy_residual(&self, s: State2) -> f64 {
        let psi = |p: State2| State2::new(p.x + p.y, 2.0 * p.x + p.y);
        let c = (2.0 * s.x + s.y).powi(3) * self.inv_eps;
        let t = State2::new(s.x - c, s.x + s.y + c);
        let lhs = self.apply(psi(s));
        let rhs = psi(t);
        (lhs.to_vector() - rhs.to_vector()).norm()
    }
}

impl LatticeMap for Map2 {
    type State = State2;

    fn apply(&self, s: State2) -> State2 {
        State2::new(s.y, -s.x + 2.0 * s.y - s.y * s.y * s.y * self.inv_eps)
    }

    fn inverse(&self, s: State2) -> State2 {
        State2::new(2.0 * s.x - s.x * s.x * s.x * self.inv_eps - s.y, s.x)
    }

    fn norm_inf(s: State2) -> f64 {
        s.norm_inf()
    }

    /// Half-width `2 sqrt|eps|` of the square containing every non-wandering point.
    fn nonwandering_bound(&self) -> f64 {
        2.0 * self.params.epsilon.abs().sqrt()
    }
}

/// The 4-d map
/// `f(x, y, z, w) = (y, z, w, -x - y/A + 2z/A - z^3/(eps A) - w/A)`.
#[derive(Clone, Copy, Debug)]
pub struct Map4 {
    params: ModelParams,
    inv_a: f64,
    inv_eps_a: f64,
}

impl Map4 {
    pub fn new(params: ModelParams) -> Result<Self> {
        let params = ModelParams::new(params.epsilon, params.a)?;
        params.require_nnn()?;
        Ok(Self {
            params,
            inv_a: 1.0 / params.a,
            inv_eps_a: 1.0 / (params.epsilon * params.a),
        })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    /// Analytic Jacobian. Companion form: the only nontrivial row is the last one.
    pub fn jacobian(&self, s: State4) -> Matrix4<f64> {
        let ia = self.inv_a;
        #[rustfmt::skip]
        let j = Matrix4::new(
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            -1.0, -ia, 2.0 * ia - 3.0 * s.z * s.z * self.inv_eps_a, -ia,
        );
        j
    }

    /// Fixed points: the origin, plus `+-(c, c, c, c)` with `c = sqrt(-2 eps A)` when `eps A < 0`.
    pub fn fixed_points(&self) -> Vec<State4> {
        let mut points = vec![State4::ORIGIN];
        let ea = self.params.epsilon * self.params.a;
        if ea < 0.0 {
            let c = (-2.0 * ea).sqrt();
            points.push(State4::splat(c));
            points.push(State4::splat(-c));
        }
        points
    }
}

impl LatticeMap for Map4 {
    type State = State4;

    fn apply(&self, s: State4) -> State4 {
        let ia = self.inv_a;
        let last = -s.x - ia * s.y + 2.0 * ia * s.z - self.inv_eps_a * s.z * s.z * s.z - ia * s.w;
        State4::new(s.y, s.z, s.w, last)
    }

    fn inverse(&self, s: State4) -> State4 {
        let ia = self.inv_a;
        let first = -s.w - ia * s.x + 2.0 * ia * s.y - self.inv_eps_a * s.y * s.y * s.y - ia * s.z;
        State4::new(first, s.x, s.y, s.z)
    }

    fn norm_inf(s: State4) -> f64 {
        s.norm_inf()
    }

    /// Half-width `sqrt(|eps A| (2 + 4/|A|))` of the cube containing every non-wandering point.
    fn nonwandering_bound(&self) -> f64 {
        let ea = (self.params.epsilon * self.params.a).abs();
        (ea * (2.0 + 4.0 / self.params.a.abs())).sqrt()
    }
}

/// Dimension-dispatching form of the non-wandering bound.
pub fn nonwandering_bound(params: ModelParams, dim: usize) -> Result<f64> {
    match dim {
        2 => Ok(Map2::new(params)?.nonwandering_bound()),
        4 => Ok(Map4::new(params)?.nonwandering_bound()),
        _ => Err(Error::DimensionMismatch {
            expected: 4,
            found: dim,
        }),
    }
}
