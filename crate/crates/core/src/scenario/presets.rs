//! The three quarter-arc benchmarks: linear (`ex1`), explicit quadratic
//! (`ex2`) and implicit quadratic (`ex3`) material.

use std::path::PathBuf;

use crate::beam::{Amplitude, Inertia, Plane};
use crate::constitutive::benchmark_stiffness;
use crate::error::{Error, Result};

use super::config::{
    ConstitutiveConfig, GeometryConfig, LawSelect, LoadsConfig, NodalLoadConfig, OutputConfig, ScenarioConfig, Shape,
    SolverConfig, TimeConfig, WeightsConfig,
};

pub const PRESET_NAMES: [&str; 3] = ["ex1", "ex2", "ex3"];

pub const DEFAULT_DT: f64 = 0.005;
pub const DEFAULT_T_END: f64 = 4.0;

/// Arc radius giving unit arc length for a quarter circle.
pub const ARC_RADIUS: f64 = 2.0 / std::f64::consts::PI;

/// Middle node of the 21-node arc (1-based), the one tabulated at `t = 4 s`.
pub const MIDDLE_NODE: usize = 11;

/// Loads of the benchmark in 1-based node groups.
pub fn arc_load_groups() -> Vec<NodalLoadConfig> {
    vec![
        NodalLoadConfig {
            nodes: vec![2, 3, 4],
            force: [-10.0, 0.0, -20.0],
        },
        NodalLoadConfig {
            nodes: (8..=14).collect(),
            force: [7.5, -7.5, 15.0],
        },
        NodalLoadConfig {
            nodes: vec![18, 19, 20],
            force: [0.0, 10.0, -20.0],
        },
    ]
}

fn constitutive(name: &str) -> Option<ConstitutiveConfig> {
    let a = benchmark_stiffness();
    let (law, b) = match name {
        "ex1" => (LawSelect::Linear, None),
        "ex2" => (LawSelect::ExplicitQuadratic, Some(a.map(|v| 0.6375 * v))),
        "ex3" => (LawSelect::ImplicitQuadratic, Some(a.map(|v| 0.015 / v))),
        _ => return None,
    };
    Some(ConstitutiveConfig {
        law,
        a: Some(a.into()),
        b: b.map(Into::into),
        data: None,
        mode: None,
        reference: None,
    })
}

/// Preset configuration; outputs go to `out/<name>` unless overridden.
pub fn preset(name: &str, dt: Option<f64>, t_end: Option<f64>, out_dir: Option<PathBuf>) -> Result<ScenarioConfig> {
    let constitutive = constitutive(name).ok_or_else(|| {
        Error::InvalidInput(format!("unknown preset '{name}' (expected one of {})", PRESET_NAMES.join(", ")))
    })?;
    Ok(ScenarioConfig {
        name: Some(name.to_string()),
        geometry: GeometryConfig {
            shape: Shape::QuarterArc,
            radius: Some(ARC_RADIUS),
            length: None,
            elements: 20,
            plane: Plane::Xy,
        },
        inertia: Inertia::principal(10.0, 20.0, 20.0),
        time: TimeConfig {
            t_start: 0.0,
            t_end: t_end.unwrap_or(DEFAULT_T_END),
            dt: dt.unwrap_or(DEFAULT_DT),
        },
        loads: LoadsConfig {
            amplitude: Amplitude::Triangle { peak: 0.5, end: 1.0 },
            nodal: arc_load_groups(),
        },
        constitutive,
        weights: WeightsConfig::default(),
        solver: SolverConfig::default(),
        output: OutputConfig {
            dir: out_dir.unwrap_or_else(|| PathBuf::from("out").join(name)),
            elements: vec![8],
        },
    })
}
