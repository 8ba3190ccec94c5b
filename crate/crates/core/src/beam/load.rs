use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};

use super::config::{NODE_DOF, PHI};
use crate::error::{Error, Result};

/// Time amplitude `a(t)` multiplying the static force pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Amplitude {
    /// Linear rise to 1 at `peak`, linear decay to 0 at `end`, zero afterwards.
    Triangle { peak: f64, end: f64 },
    /// `a(t) = value` for `t ≥ 0`.
    Constant { value: f64 },
}

impl Default for Amplitude {
    fn default() -> Self {
        Amplitude::Triangle { peak: 0.5, end: 1.0 }
    }
}

impl Amplitude {
    /// `a(t)`, clamped to zero for `t < 0`.
    pub fn value(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match *self {
            Amplitude::Triangle { peak, end } => {
                if t <= peak {
                    t / peak
                } else if t < end {
                    (end - t) / (end - peak)
                } else {
                    0.0
                }
            }
            Amplitude::Constant { value } => value,
        }
    }

    /// Time after which `a` vanishes identically, if any.
    pub fn support_end(&self) -> Option<f64> {
        match *self {
            Amplitude::Triangle { end, .. } => Some(end),
            Amplitude::Constant { value } if value == 0.0 => Some(0.0),
            Amplitude::Constant { .. } => None,
        }
    }

    /// `∫₀^∞ a(t) dt` when finite.
    pub fn impulse(&self) -> Option<f64> {
        match *self {
            Amplitude::Triangle { end, .. } => Some(0.5 * end),
            Amplitude::Constant { value } if value == 0.0 => Some(0.0),
            Amplitude::Constant { .. } => None,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        match *self {
            Amplitude::Triangle { peak, end } if !(peak > 0.0 && end > peak && end.is_finite()) => {
                Err(format!("triangle amplitude needs 0 < peak < end (got peak {peak}, end {end})"))
            }
            Amplitude::Constant { value } if !value.is_finite() => {
                Err("constant amplitude must be finite".into())
            }
            _ => Ok(()),
        }
    }
}

/// Static force on one node (0-based index).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalForce {
    pub node: usize,
    pub force: Vector3<f64>,
}

/// Static nodal force pattern scaled by an amplitude.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadCase {
    pub forces: Vec<NodalForce>,
    pub amplitude: Amplitude,
}

impl LoadCase {
    pub fn new(forces: Vec<NodalForce>, amplitude: Amplitude) -> Self {
        Self { forces, amplitude }
    }

    /// No external loads at any time.
    pub fn none() -> Self {
        Self::default()
    }

    /// The benchmark pattern on the 21-node quarter arc: nodes 2–4 carry
    /// `(−10, 0, −20)`, nodes 8–14 carry `(7.5, −7.5, 15)` and nodes 18–20
    /// carry `(0, 10, −20)` (1-based numbering), with the triangular amplitude.
    pub fn arc_benchmark() -> Self {
        let mut forces = Vec::new();
        let mut add = |range: std::ops::RangeInclusive<usize>, f: Vector3<f64>| {
            for node in range {
                forces.push(NodalForce { node: node - 1, force: f });
            }
        };
        add(2..=4, Vector3::new(-10.0, 0.0, -20.0));
        add(8..=14, Vector3::new(7.5, -7.5, 15.0));
        add(18..=20, Vector3::new(0.0, 10.0, -20.0));
        Self::new(forces, Amplitude::default())
    }

    /// `Σ` of the static nodal forces.
    pub fn static_resultant(&self) -> Vector3<f64> {
        self.forces.iter().map(|f| f.force).sum()
    }

    pub fn check_nodes(&self, n_nodes: usize) -> Result<()> {
        match self.forces.iter().find(|f| f.node >= n_nodes) {
            Some(f) => Err(Error::InvalidInput(format!(
                "load on node {} but mesh has {n_nodes} nodes",
                f.node + 1
            ))),
            None => Ok(()),
        }
    }

    /// Global force vector `a(t) f` with zero director components.
    pub fn external_load(&self, n_nodes: usize, t: f64) -> DVector<f64> {
        let mut out = DVector::zeros(NODE_DOF * n_nodes);
        let a = self.amplitude.value(t);
        if a == 0.0 {
            return out;
        }
        for f in &self.forces {
            let mut blk = out.fixed_rows_mut::<3>(NODE_DOF * f.node + PHI);
            blk += a * f.force;
        }
        out
    }
}
