//! TOML scenario files.
//!
//! ```toml
//! name = "ex1"
//!
//! [geometry]
//! shape = "quarter_arc"      # or "straight" (along +z, needs `length`)
//! radius = 0.6366197723675814
//! elements = 20
//! plane = "xy"               # xy | yz | zx
//!
//! [inertia]
//! e00 = 10.0
//! e11 = 20.0
//! e22 = 20.0                 # e01, e02, e12 default to 0
//!
//! [time]
//! t_start = 0.0              # optional
//! t_end = 4.0
//! dt = 0.005
//!
//! [loads]
//! amplitude = { kind = "triangle", peak = 0.5, end = 1.0 }
//! [[loads.nodal]]
//! nodes = [2, 3, 4]          # 1-based
//! force = [-10.0, 0.0, -20.0]
//!
//! [constitutive]
//! law = "linear"             # explicit_quadratic | implicit_quadratic | data
//! a = [75.0, 75.0, 100.0, 100.0, 100.0, 200.0]
//! # b = [...]                # quadratic laws only
//! # data = "points.csv"      # law = "data"; relative to the config file
//! # mode = "shared"          # shared | coordinate_descent | exhaustive
//! # reference = { law = "linear", a = [...] }   # manifold compared by `dcnlp`
//!
//! [weights]
//! c_diag = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0]
//!
//! [solver]
//! tolerance = 1e-12
//! max_iterations = 25
//! backend = "banded"         # or "dense"
//! feasibility_tolerance = 1e-10
//!
//! [output]
//! dir = "out/ex1"            # relative to the working directory
//! elements = [8]             # 1-based elements for elements.csv; default all
//! ```
//!
//! For `implicit_quadratic`, `a` holds the stiffnesses `aⁱⁱ` and `b` the
//! compliance coefficients `b_iii`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::beam::{Amplitude, BeamMesh, Inertia, LoadCase, NodalForce, Plane, Vec6};
use crate::constitutive::{ConstitutiveLaw, LawKind, MeasurementDataSet};
use crate::dynamics::{Material, Simulation, TimeGrid};
use crate::error::{Error, Result};
use crate::linalg::Backend;
use crate::solver::{AssignmentMode, NewtonOptions, WeightMatrix, EXHAUSTIVE_MAX_ELEMENTS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub geometry: GeometryConfig,
    pub inertia: Inertia,
    pub time: TimeConfig,
    #[serde(default)]
    pub loads: LoadsConfig,
    pub constitutive: ConstitutiveConfig,
    #[serde(default)]
    pub weights: WeightsConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    QuarterArc,
    Straight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub shape: Shape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    pub elements: usize,
    #[serde(default)]
    pub plane: Plane,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default)]
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadsConfig {
    #[serde(default)]
    pub amplitude: Amplitude,
    #[serde(default)]
    pub nodal: Vec<NodalLoadConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodalLoadConfig {
    /// 1-based node numbers.
    pub nodes: Vec<usize>,
    pub force: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawSelect {
    Linear,
    ExplicitQuadratic,
    ImplicitQuadratic,
    Data,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstitutiveConfig {
    pub law: LawSelect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 6]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 6]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<AssignmentMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceLawConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceLawConfig {
    pub law: LawKind,
    pub a: [f64; 6],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 6]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub c_diag: [f64; 6],
}

impl Default for WeightsConfig {
    fn default() -> Self {
        Self { c_diag: [1.0; 6] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub backend: Backend,
    pub feasibility_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let n = NewtonOptions::default();
        Self {
            tolerance: n.tolerance,
            max_iterations: n.max_iterations,
            backend: n.backend,
            feasibility_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_output_dir")]
    pub dir: PathBuf,
    /// 1-based element numbers; empty writes every element.
    #[serde(default)]
    pub elements: Vec<usize>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_output_dir(),
            elements: Vec::new(),
        }
    }
}

/// Where a run writes its files.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// 0-based element indices.
    pub elements: Vec<usize>,
}

/// A validated, ready-to-run scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub simulation: Simulation,
    pub output: OutputSpec,
    /// Manifold the data-driven run is compared against by the DCNLP runner.
    pub reference: Option<ConstitutiveLaw>,
}

/// Parses a TOML scenario. Syntax errors, unknown keys and missing keys are
/// reported as [`Error::Config`]; semantic checks happen in [`ScenarioConfig::build`].
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// Reads, parses and builds a scenario file. Relative data paths are resolved
/// against the file's directory.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg = parse_scenario(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let fallback = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    cfg.build(Some(base), fallback)
}

fn check_positive(errors: &mut Vec<String>, what: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        errors.push(format!("{what} must be positive and finite (got {v})"));
    }
}

fn check_stiffness(errors: &mut Vec<String>, what: &str, a: &[f64; 6]) {
    for (i, v) in a.iter().enumerate() {
        check_positive(errors, &format!("{what}[{}]", i + 1), *v);
    }
}

fn check_finite(errors: &mut Vec<String>, what: &str, b: &[f64; 6]) {
    if b.iter().any(|v| !v.is_finite()) {
        errors.push(format!("{what} must be finite"));
    }
}

impl ScenarioConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    fn n_nodes(&self) -> usize {
        self.geometry.elements + 1
    }

    /// All semantic problems of the configuration (empty when valid).
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let g = &self.geometry;
        if g.elements == 0 {
            errors.push("geometry.elements must be at least 1".into());
        }
        match g.shape {
            Shape::QuarterArc => {
                match g.radius {
                    Some(r) => check_positive(&mut errors, "geometry.radius", r),
                    None => errors.push("geometry.radius is required for shape = \"quarter_arc\"".into()),
                }
                if g.length.is_some() {
                    errors.push("geometry.length is not used by shape = \"quarter_arc\"".into());
                }
            }
            Shape::Straight => {
                match g.length {
                    Some(l) => check_positive(&mut errors, "geometry.length", l),
                    None => errors.push("geometry.length is required for shape = \"straight\"".into()),
                }
                if g.radius.is_some() {
                    errors.push("geometry.radius is not used by shape = \"straight\"".into());
                }
            }
        }

        let inertia = &self.inertia;
        if !inertia.is_finite() {
            errors.push("inertia coefficients must be finite".into());
        } else {
            if !(inertia.e00 > 0.0) {
                errors.push(format!("inertia.e00 must be positive (got {})", inertia.e00));
            }
            if !inertia.is_psd() {
                errors.push("inertia coefficient matrix must be positive semidefinite".into());
            }
        }

        let t = &self.time;
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            errors.push(format!("time.dt must be positive and finite (got {})", t.dt));
        } else if !(t.t_end > t.t_start) {
            errors.push(format!(
                "time.t_end ({}) must be larger than time.t_start ({})",
                t.t_end, t.t_start
            ));
        } else if let Err(e) = TimeGrid::new(t.t_start, t.t_end, t.dt) {
            errors.push(format!("time: {}", e.to_string().trim_start_matches("invalid input: ")));
        }

        if let Err(e) = self.loads.amplitude.validate() {
            errors.push(format!("loads.amplitude: {e}"));
        }
        for (k, nl) in self.loads.nodal.iter().enumerate() {
            if nl.nodes.is_empty() {
                errors.push(format!("loads.nodal[{k}].nodes is empty"));
            }
            for &node in &nl.nodes {
                if node == 0 || (g.elements > 0 && node > self.n_nodes()) {
                    errors.push(format!(
                        "loads.nodal[{k}]: node {node} outside 1..={}",
                        self.n_nodes()
                    ));
                }
            }
            if nl.force.iter().any(|v| !v.is_finite()) {
                errors.push(format!("loads.nodal[{k}].force must be finite"));
            }
        }

        let c = &self.constitutive;
        match c.law {
            LawSelect::Data => {
                match &c.data {
                    None => errors.push("constitutive.data is required for law = \"data\"".into()),
                    Some(p) if p.as_os_str().is_empty() => errors.push("constitutive.data must not be empty".into()),
                    Some(_) => {}
                }
                if c.a.is_some() || c.b.is_some() {
                    errors.push("constitutive.a and constitutive.b are not used by law = \"data\"".into());
                }
                if c.mode == Some(AssignmentMode::Exhaustive) && g.elements > EXHAUSTIVE_MAX_ELEMENTS {
                    errors.push(format!(
                        "constitutive.mode = \"exhaustive\" is limited to {EXHAUSTIVE_MAX_ELEMENTS} elements"
                    ));
                }
                if let Some(r) = &c.reference {
                    check_stiffness(&mut errors, "constitutive.reference.a", &r.a);
                    match (r.law, &r.b) {
                        (LawKind::Linear, Some(_)) => {
                            errors.push("constitutive.reference.b is not used by the linear law".into())
                        }
                        (LawKind::Linear, None) => {}
                        (_, Some(b)) => check_finite(&mut errors, "constitutive.reference.b", b),
                        (_, None) => errors.push("constitutive.reference.b is required for quadratic laws".into()),
                    }
                }
            }
            law => {
                match &c.a {
                    Some(a) => check_stiffness(&mut errors, "constitutive.a", a),
                    None => errors.push("constitutive.a is required".into()),
                }
                match (law, &c.b) {
                    (LawSelect::Linear, Some(_)) => errors.push("constitutive.b is not used by the linear law".into()),
                    (LawSelect::Linear, None) => {}
                    (_, Some(b)) => check_finite(&mut errors, "constitutive.b", b),
                    (_, None) => errors.push("constitutive.b is required for quadratic laws".into()),
                }
                if c.data.is_some() || c.mode.is_some() || c.reference.is_some() {
                    errors.push("constitutive.data, mode and reference are only used by law = \"data\"".into());
                }
            }
        }

        check_stiffness(&mut errors, "weights.c_diag", &self.weights.c_diag);

        let s = &self.solver;
        check_positive(&mut errors, "solver.tolerance", s.tolerance);
        if s.max_iterations == 0 {
            errors.push("solver.max_iterations must be at least 1".into());
        }
        check_positive(&mut errors, "solver.feasibility_tolerance", s.feasibility_tolerance);

        if self.output.dir.as_os_str().is_empty() {
            errors.push("output.dir must not be empty".into());
        }
        for &e in &self.output.elements {
            if e == 0 || e > g.elements {
                errors.push(format!("output.elements: element {e} outside 1..={}", g.elements));
            }
        }
        errors
    }

    /// Validates and assembles the scenario. `base_dir` resolves relative
    /// data paths; `fallback_name` is used when the file has no `name`.
    pub fn build(&self, base_dir: Option<&Path>, fallback_name: &str) -> Result<Scenario> {
        let errors = self.validate();
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let g = &self.geometry;
        let mesh = match g.shape {
            Shape::QuarterArc => BeamMesh::quarter_arc(g.radius.unwrap_or_default(), g.elements, g.plane, self.inertia)?,
            Shape::Straight => BeamMesh::straight(g.length.unwrap_or_default(), g.elements, self.inertia)?,
        };
        let forces = self
            .loads
            .nodal
            .iter()
            .flat_map(|nl| {
                nl.nodes.iter().map(move |&node| NodalForce {
                    node: node - 1,
                    force: nl.force.into(),
                })
            })
            .collect();
        let loads = LoadCase::new(forces, self.loads.amplitude);

        let c = &self.constitutive;
        let six = |v: Option<[f64; 6]>| Vec6::from(v.unwrap_or_default());
        let (material, reference) = match c.law {
            LawSelect::Linear => (Material::Manifold(ConstitutiveLaw::linear(six(c.a))?), None),
            LawSelect::ExplicitQuadratic => (
                Material::Manifold(ConstitutiveLaw::explicit_quadratic(six(c.a), six(c.b))?),
                None,
            ),
            LawSelect::ImplicitQuadratic => (
                Material::Manifold(ConstitutiveLaw::implicit_quadratic(six(c.a), six(c.b))?),
                None,
            ),
            LawSelect::Data => {
                let rel = c.data.clone().unwrap_or_default();
                let path = match base_dir {
                    Some(base) if rel.is_relative() => base.join(&rel),
                    _ => rel,
                };
                // A missing or malformed data file is an input problem, not an I/O failure.
                let data = MeasurementDataSet::from_csv(&path)
                    .map_err(|e| Error::Validation(vec![format!("constitutive.data: {e}")]))?;
                let reference = c
                    .reference
                    .as_ref()
                    .map(|r| ConstitutiveLaw::new(r.law, Vec6::from(r.a), Vec6::from(r.b.unwrap_or_default())))
                    .transpose()?;
                (
                    Material::Data {
                        data,
                        mode: c.mode.unwrap_or_default(),
                    },
                    reference,
                )
            }
        };

        let simulation = Simulation {
            mesh,
            loads,
            grid: TimeGrid::new(self.time.t_start, self.time.t_end, self.time.dt)?,
            material,
            weights: WeightMatrix::diagonal(&self.weights.c_diag)?,
            options: NewtonOptions {
                tolerance: self.solver.tolerance,
                max_iterations: self.solver.max_iterations,
                backend: self.solver.backend,
            },
            feasibility_tol: self.solver.feasibility_tolerance,
        };
        Ok(Scenario {
            name: self.name.clone().unwrap_or_else(|| fallback_name.to_string()),
            simulation,
            output: OutputSpec {
                dir: self.output.dir.clone(),
                elements: if self.output.elements.is_empty() {
                    (0..g.elements).collect()
                } else {
                    self.output.elements.iter().map(|e| e - 1).collect()
                },
            },
            reference,
        })
    }
}
