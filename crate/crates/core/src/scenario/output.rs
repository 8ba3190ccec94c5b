//! CSV streams, JSON run summary and failure report.
//!
//! Files written into the output directory:
//! - `trajectory.csv`: `t`, then per node `n{k}_phi_{x,y,z}`, `n{k}_d1_{x,y,z}`,
//!   `n{k}_d2_{x,y,z}`, `n{k}_d3_{x,y,z}` (1-based `k`).
//! - `elements.csv`: `t`, then per selected element `el{k}_e1..e6`, `el{k}_s1..s6`.
//! - `diagnostics.csv`: see [`DIAGNOSTICS_HEADER`].
//! - `summary.json` after a complete run, `failure.json` after a failed one.
//!
//! Numbers use 17 significant digits in scientific notation.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::beam::STRAIN_DIM;
use crate::dynamics::{Material, StepRecord, Trajectory};
use crate::error::{Error, Result};

use super::config::{OutputSpec, Scenario};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const ELEMENTS_FILE: &str = "elements.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const FAILURE_FILE: &str = "failure.json";

pub const DIAGNOSTICS_HEADER: [&str; 13] = [
    "t",
    "l_x",
    "l_y",
    "l_z",
    "j_minus_x",
    "j_minus_y",
    "j_minus_z",
    "j_plus_x",
    "j_plus_y",
    "j_plus_z",
    "g_inf",
    "newton_iterations",
    "final_residual",
];

/// Round-trip exact, locale-independent formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_header(n_nodes: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for k in 1..=n_nodes {
        for part in ["phi", "d1", "d2", "d3"] {
            for axis in ["x", "y", "z"] {
                h.push(format!("n{k}_{part}_{axis}"));
            }
        }
    }
    h
}

/// `elements` are 0-based; column names are 1-based.
pub fn elements_header(elements: &[usize]) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for &e in elements {
        for var in ["e", "s"] {
            for c in 1..=STRAIN_DIM {
                h.push(format!("el{}_{var}{c}", e + 1));
            }
        }
    }
    h
}

fn create_csv(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// Streams step records into the three CSV files, flushing after every row.
pub struct OutputWriter {
    dir: PathBuf,
    elements: Vec<usize>,
    trajectory: csv::Writer<File>,
    element_states: csv::Writer<File>,
    diagnostics: csv::Writer<File>,
}

impl OutputWriter {
    pub fn create(spec: &OutputSpec, n_nodes: usize) -> Result<Self> {
        std::fs::create_dir_all(&spec.dir).map_err(|e| Error::io(&spec.dir, e))?;
        let mut w = Self {
            dir: spec.dir.clone(),
            elements: spec.elements.clone(),
            trajectory: create_csv(&spec.dir.join(TRAJECTORY_FILE))?,
            element_states: create_csv(&spec.dir.join(ELEMENTS_FILE))?,
            diagnostics: create_csv(&spec.dir.join(DIAGNOSTICS_FILE))?,
        };
        w.trajectory.write_record(trajectory_header(n_nodes))?;
        w.element_states.write_record(elements_header(&spec.elements))?;
        w.diagnostics.write_record(DIAGNOSTICS_HEADER)?;
        w.flush()?;
        Ok(w)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn flush(&mut self) -> Result<()> {
        for (w, name) in [
            (&mut self.trajectory, TRAJECTORY_FILE),
            (&mut self.element_states, ELEMENTS_FILE),
            (&mut self.diagnostics, DIAGNOSTICS_FILE),
        ] {
            w.flush().map_err(|e| Error::io(self.dir.join(name), e))?;
        }
        Ok(())
    }

    pub fn write(&mut self, rec: &StepRecord) -> Result<()> {
        let t = fmt_f64(rec.time);
        let row: Vec<String> = std::iter::once(t.clone()).chain(rec.q.iter().map(|&v| fmt_f64(v))).collect();
        self.trajectory.write_record(&row)?;

        let mut row = vec![t.clone()];
        for &e in &self.elements {
            let r = STRAIN_DIM * e..STRAIN_DIM * (e + 1);
            row.extend(rec.e.as_slice()[r.clone()].iter().map(|&v| fmt_f64(v)));
            row.extend(rec.s.as_slice()[r].iter().map(|&v| fmt_f64(v)));
        }
        self.element_states.write_record(&row)?;

        let m = &rec.momenta;
        let mut row = vec![t];
        row.extend(
            m.l.iter()
                .chain(m.j_minus.iter())
                .chain(m.j_plus.iter())
                .chain(std::iter::once(&rec.constraint_violation))
                .map(|&v| fmt_f64(v)),
        );
        let (its, res) = rec.newton.as_ref().map_or((0, 0.0), |n| (n.iterations, n.final_residual));
        row.push(its.to_string());
        row.push(fmt_f64(res));
        self.diagnostics.write_record(&row)?;
        self.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryMomenta {
    pub time: f64,
    pub l: [f64; 3],
    pub j_minus: [f64; 3],
    pub j_plus: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub material: String,
    pub dt: f64,
    pub steps: usize,
    pub final_time: f64,
    /// Momenta of the last interval.
    pub stationary: StationaryMomenta,
    pub mean_newton_iterations: f64,
    pub max_newton_iterations: usize,
    pub max_final_residual: f64,
    pub max_constraint_violation: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureReport {
    pub scenario: String,
    pub message: String,
    pub step: Option<usize>,
    pub time: Option<f64>,
    pub steps_completed: usize,
    pub residual_history: Vec<f64>,
}

impl FailureReport {
    pub fn new(scenario: &str, error: &Error, steps_completed: usize) -> Self {
        let (step, time) = match error {
            Error::Step { step, time, .. } => (Some(*step), Some(*time)),
            _ => (None, None),
        };
        Self {
            scenario: scenario.to_string(),
            message: error.to_string(),
            step,
            time,
            steps_completed,
            residual_history: error.residual_history().map(<[f64]>::to_vec).unwrap_or_default(),
        }
    }
}

pub fn material_label(material: &Material) -> String {
    match material {
        Material::Manifold(law) => format!("{:?}", law.kind()),
        Material::Data { data, mode } => format!("data ({} points, {mode:?})", data.len()),
    }
}

pub fn summarize(scenario: &Scenario, trajectory: &Trajectory, wall_time_s: f64) -> RunSummary {
    let last = trajectory.last();
    let m = last.map(|r| r.momenta).unwrap_or_default();
    let newton = trajectory.records.iter().filter_map(|r| r.newton.as_ref());
    RunSummary {
        scenario: scenario.name.clone(),
        material: material_label(&scenario.simulation.material),
        dt: scenario.simulation.grid.dt(),
        steps: trajectory.len().saturating_sub(1),
        final_time: last.map_or(f64::NAN, |r| r.time),
        stationary: StationaryMomenta {
            time: last.map_or(f64::NAN, |r| r.time),
            l: m.l.into(),
            j_minus: m.j_minus.into(),
            j_plus: m.j_plus.into(),
        },
        mean_newton_iterations: trajectory.mean_iterations(),
        max_newton_iterations: newton.clone().map(|n| n.iterations).max().unwrap_or(0),
        max_final_residual: newton.map(|n| n.final_residual).fold(0.0, f64::max),
        max_constraint_violation: trajectory
            .records
            .iter()
            .map(|r| r.constraint_violation)
            .fold(0.0, f64::max),
        wall_time_s,
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(file, value)?;
    Ok(())
}

/// Runs the scenario while streaming all outputs. On a solver failure the
/// partial CSV files stay in place, `failure.json` is written and the error
/// is returned.
pub fn run_scenario(scenario: &Scenario) -> Result<(RunSummary, Trajectory)> {
    let sim = &scenario.simulation;
    let mut writer = OutputWriter::create(&scenario.output, sim.mesh.n_nodes())?;
    let _ = std::fs::remove_file(scenario.output.dir.join(FAILURE_FILE));
    let _ = std::fs::remove_file(scenario.output.dir.join(SUMMARY_FILE));
    let start = Instant::now();
    let outcome = sim.run(&mut |rec| writer.write(rec));
    let wall = start.elapsed().as_secs_f64();
    match outcome.error {
        None => {
            let summary = summarize(scenario, &outcome.trajectory, wall);
            write_json(&scenario.output.dir.join(SUMMARY_FILE), &summary)?;
            Ok((summary, outcome.trajectory))
        }
        Some(error) => {
            let completed = outcome.trajectory.len().saturating_sub(1);
            let report = FailureReport::new(&scenario.name, &error, completed);
            write_json(&scenario.output.dir.join(FAILURE_FILE), &report)?;
            Err(error)
        }
    }
}
