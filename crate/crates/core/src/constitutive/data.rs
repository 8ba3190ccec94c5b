use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::law::{ConstitutiveLaw, LawKind, Manifold};
use crate::beam::Vec6;
use crate::error::{Error, Result};

/// One measured strain-stress pair `(ẽ, s̃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    pub strain: Vec6,
    pub stress: Vec6,
}

impl DataPoint {
    pub fn new(strain: Vec6, stress: Vec6) -> Self {
        Self { strain, stress }
    }

    fn is_finite(&self) -> bool {
        self.strain.iter().chain(self.stress.iter()).all(|v| v.is_finite())
    }
}

/// Finite, non-empty set of strain-stress measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDataSet {
    points: Vec<DataPoint>,
    label: String,
}

const CSV_HEADER: [&str; 12] = [
    "e1", "e2", "e3", "e4", "e5", "e6", "s1", "s2", "s3", "s4", "s5", "s6",
];

impl MeasurementDataSet {
    pub fn new(points: Vec<DataPoint>, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("measurement data set is empty".into()));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("data point {i} is not finite")));
        }
        Ok(Self {
            points,
            label: label.into(),
        })
    }

    /// Points `(ẽ, s(ẽ))` on the law's branch through the origin.
    pub fn on_law<'a>(
        law: &ConstitutiveLaw,
        strains: impl IntoIterator<Item = &'a Vec6>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let points = strains
            .into_iter()
            .map(|e| {
                law.stress(e)
                    .map(|s| DataPoint::new(*e, s))
                    .ok_or_else(|| Error::InvalidInput(format!("strain {e:?} has no stress on the law")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, label)
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Reads twelve numeric columns `ẽ₁..ẽ₆, s̃₁..s̃₆` after a header row.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
        let width = reader.headers()?.len();
        if width != 12 {
            return Err(Error::InvalidInput(format!(
                "{}: expected 12 columns, header has {width}",
                path.display()
            )));
        }
        let mut points = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let mut v = [0.0; 12];
            for (k, field) in record.iter().enumerate() {
                v[k] = field.parse().map_err(|_| {
                    Error::InvalidInput(format!(
                        "{}: row {} column {} is not a number: {field:?}",
                        path.display(),
                        line + 2,
                        k + 1
                    ))
                })?;
            }
            points.push(DataPoint::new(
                Vec6::from_column_slice(&v[..6]),
                Vec6::from_column_slice(&v[6..]),
            ));
        }
        Self::new(points, path.display().to_string())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record(CSV_HEADER)?;
        for p in &self.points {
            let row: Vec<String> = p.strain.iter().chain(p.stress.iter()).map(|v| format!("{v:.16e}")).collect();
            writer.write_record(&row)?;
        }
        writer.flush().map_err(|e| Error::io(path, e))
    }
}

/// Axis-aligned strain box for synthetic sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainBox {
    pub lower: Vec6,
    pub upper: Vec6,
}

impl StrainBox {
    pub fn new(lower: Vec6, upper: Vec6) -> Result<Self> {
        let bad = lower.iter().chain(upper.iter()).any(|v| !v.is_finite())
            || lower.iter().zip(upper.iter()).any(|(l, u)| l > u);
        if bad {
            return Err(Error::InvalidInput(format!(
                "degenerate strain box: lower {:?}, upper {:?}",
                lower.as_slice(),
                upper.as_slice()
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(Vec6::repeat(-half_width), Vec6::repeat(half_width))
    }

    /// Componentwise maximum of `|ě|` over the box.
    fn max_abs(&self) -> Vec6 {
        self.lower.abs().sup(&self.upper.abs())
    }
}

/// Uniform strains from the box mapped onto the law, then uniform noise in
/// `[−noise, noise]` added independently to every strain and stress entry.
pub fn sample_data_set(
    law: &ConstitutiveLaw,
    strain_box: &StrainBox,
    count: usize,
    noise: f64,
    seed: u64,
) -> Result<MeasurementDataSet> {
    if count == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidInput(format!("noise amplitude {noise} must be finite and non-negative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |lo: f64, hi: f64, rng: &mut ChaCha8Rng| if lo == hi { lo } else { rng.gen_range(lo..=hi) };
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let e = Vec6::from_fn(|i, _| draw(strain_box.lower[i], strain_box.upper[i], &mut rng));
        let s = law
            .stress(&e)
            .ok_or_else(|| Error::InvalidInput("strain box leaves the law's admissible branch".into()))?;
        let mut jitter = || if noise > 0.0 { rng.gen_range(-noise..=noise) } else { 0.0 };
        let de = Vec6::from_fn(|_, _| jitter());
        let ds = Vec6::from_fn(|_, _| jitter());
        points.push(DataPoint::new(e + de, s + ds));
    }
    MeasurementDataSet::new(
        points,
        format!("sampled {:?} law, {count} points, noise {noise:e}, seed {seed}", law.kind()),
    )
}

/// Upper bound of `‖h‖∞` on data produced by [`sample_data_set`] with the
/// same law, box and noise amplitude. For the linear law this is
/// `noise (1 + max aⁱⁱ)`.
pub fn noise_residual_bound(law: &ConstitutiveLaw, strain_box: &StrainBox, noise: f64) -> f64 {
    let (a, b) = (law.a(), law.b());
    let emax = strain_box.max_abs();
    let mut bound = 0.0_f64;
    for i in 0..6 {
        let per = match law.kind() {
            LawKind::Linear => noise * (1.0 + a[i]),
            LawKind::ExplicitQuadratic => {
                noise * (1.0 + a[i] + b[i].abs() * emax[i]) + 0.5 * b[i].abs() * noise * noise
            }
            LawKind::ImplicitQuadratic => {
                let mut smax = 0.0_f64;
                for x in [strain_box.lower[i], strain_box.upper[i]] {
                    let mut e = Vec6::zeros();
                    e[i] = x;
                    if let Some(s) = law.stress(&e) {
                        smax = smax.max(s[i].abs());
                    }
                }
                noise * (1.0 + 1.0 / a[i] + b[i].abs() * smax) + 0.5 * b[i].abs() * noise * noise
            }
        };
        bound = bound.max(per);
    }
    bound
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManifoldReport {
    pub max_residual: f64,
    pub epsilon: f64,
    pub passed: bool,
}

/// `max ‖h(ẽ, s̃)‖∞` over the data and whether it stays within `epsilon`.
pub fn validate_manifold(
    law: &dyn Manifold,
    data: &MeasurementDataSet,
    epsilon: f64,
) -> Result<ManifoldReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("accuracy {epsilon} must be positive")));
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("measurement data set is empty".into()));
    }
    let max_residual = data
        .points()
        .iter()
        .map(|p| law.residual(&p.strain, &p.stress).amax())
        .fold(0.0, f64::max);
    Ok(ManifoldReport {
        max_residual,
        epsilon,
        passed: max_residual <= epsilon,
    })
}
