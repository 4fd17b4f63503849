//! Scenario files: one TOML scenario per file.

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Spanned;

use caplab::geometry::{self, RadialConformalMetric, RadialProfile, SchwarzschildSpec, WarpedProductMetric};
use caplab::surface::{MeridianCurve, SampledCurve};

/// A configuration problem anchored to a line of the file when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{line}: {}", self.path.display(), self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MetricSpec {
    Schwarzschild {
        m: f64,
        r_min: Option<f64>,
    },
    /// Two-column `(r, u)` samples of the conformal factor.
    RadialProfile {
        file: PathBuf,
        #[serde(default = "default_tau")]
        tau: f64,
        r_b: Option<f64>,
    },
    /// Three-column `(r, f, h)` samples of `f^2 dr^2 + h^2 g_round`.
    Warped {
        file: PathBuf,
    },
}

fn default_tau() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundarySpec {
    Sphere {
        r0: f64,
    },
    Spheroid {
        equatorial: f64,
        polar: f64,
    },
    MuPolynomial {
        r0: f64,
        coeffs: Vec<f64>,
    },
    /// Two-column `(theta, r)` samples from pole to pole.
    Curve {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    /// `(n_x, n_theta)` cells of the meridian grid.
    pub grid: (usize, usize),
    /// Truncation radius as a multiple of the largest boundary radius.
    pub truncation_factor: f64,
    pub solver_tol: f64,
    pub estimate_grid_error: bool,
    pub estimate_truncation_error: bool,
    pub spread_factor: f64,
    /// Level sets used by the symmetrization task.
    pub thresholds: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        let fd = caplab::capacity::FdOptions::default();
        Self {
            grid: (128, 128),
            truncation_factor: 20.0,
            solver_tol: fd.solver_tol,
            estimate_grid_error: fd.estimate_grid_error,
            estimate_truncation_error: fd.estimate_truncation_error,
            spread_factor: fd.spread_factor,
            thresholds: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    /// Values of `c` for the level-set inequalities.
    pub c: Vec<f64>,
    /// Coefficient of `H` in the blowdown bounds.
    pub rigidity_c: f64,
    /// Accept coordinate spheres of a non-Schwarzschild metric as
    /// isoperimetric.
    pub assert_isoperimetric: bool,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self { c: vec![0.75], rigidity_c: 1.0, assert_isoperimetric: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueSpec {
    pub m: f64,
    pub m_prime: f64,
}

/// Log-spaced coordinate radii for the sweep; `start` and `stop` default
/// to `m/8` and `4m` for Schwarzschild.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_parameter")]
    pub parameter: SweepParameter,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    #[serde(default = "default_count")]
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    R0,
}

fn default_parameter() -> SweepParameter {
    SweepParameter::R0
}

fn default_count() -> usize {
    25
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { parameter: SweepParameter::R0, start: None, stop: None, count: 25 }
    }
}

pub const VERIFY_NAMES: &[&str] =
    &["identities", "lc1", "lc2", "bray-miao", "mass-capacity", "upper-bounds", "corollaries", "szego", "rigidity"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum Task {
    Capacity,
    Quasilocal,
    Symmetrize,
    Verify(String),
    Glue,
    Sweep,
}

impl Task {
    pub fn parse(s: &str) -> Result<Self, String> {
        Ok(match s {
            "capacity" => Task::Capacity,
            "quasilocal" => Task::Quasilocal,
            "symmetrize" => Task::Symmetrize,
            "glue" => Task::Glue,
            "sweep" | "sweep:r0" => Task::Sweep,
            _ => match s.strip_prefix("verify:") {
                Some(name) if VERIFY_NAMES.contains(&name) => Task::Verify(name.to_string()),
                Some(name) => {
                    return Err(format!("unknown verifier {name:?}; expected one of {}", VERIFY_NAMES.join(", ")))
                }
                None => return Err(format!("unknown task {s:?}")),
            },
        })
    }

    /// File-name stem: `verify:lc1` becomes `verify-lc1`.
    pub fn slug(&self) -> String {
        String::from(self.clone()).replace(':', "-")
    }
}

impl From<Task> for String {
    fn from(t: Task) -> String {
        match t {
            Task::Capacity => "capacity".into(),
            Task::Quasilocal => "quasilocal".into(),
            Task::Symmetrize => "symmetrize".into(),
            Task::Verify(n) => format!("verify:{n}"),
            Task::Glue => "glue".into(),
            Task::Sweep => "sweep:r0".into(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: Spanned<String>,
    tasks: Spanned<Vec<Spanned<String>>>,
    metric: Spanned<MetricSpec>,
    boundary: Spanned<BoundarySpec>,
    numerics: Option<Spanned<Numerics>>,
    verify: Option<Spanned<VerifySpec>>,
    glue: Option<Spanned<GlueSpec>>,
    sweep: Option<Spanned<SweepSpec>>,
}

/// A validated scenario. Relative file paths are resolved against the
/// directory of the scenario file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub id: String,
    pub tasks: Vec<Task>,
    pub metric: MetricSpec,
    pub boundary: BoundarySpec,
    pub numerics: Numerics,
    pub verify: VerifySpec,
    pub glue: Option<GlueSpec>,
    pub sweep: Option<SweepSpec>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// An absent table takes its defaults and anchors errors to the top.
fn split<T: Default>(v: Option<Spanned<T>>) -> (Range<usize>, T) {
    match v {
        Some(s) => (s.span(), s.into_inner()),
        None => (0..0, T::default()),
    }
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: path.to_path_buf(),
            line: None,
            message: e.to_string(),
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let err = |span: Option<Range<usize>>, message: String| ConfigError {
            path: path.to_path_buf(),
            line: span.map(|s| line_of(text, s)),
            message,
        };
        let raw: RawScenario = toml::from_str(text).map_err(|e| err(e.span(), e.message().to_string()))?;
        let at = |span: Range<usize>, message: String| err(Some(span), message);

        let id = raw.id.get_ref().trim().to_string();
        if id.is_empty() || id.contains(['/', '\\']) {
            return Err(at(raw.id.span(), "scenario id must be a non-empty name without path separators".into()));
        }
        let mut tasks = Vec::new();
        for t in raw.tasks.get_ref() {
            tasks.push(Task::parse(t.get_ref()).map_err(|m| at(t.span(), m))?);
        }
        if tasks.is_empty() {
            return Err(at(raw.tasks.span(), "at least one task is required".into()));
        }

        let metric_span = raw.metric.span();
        let metric = raw.metric.into_inner();
        match &metric {
            MetricSpec::Schwarzschild { m, r_min } => {
                let built = match r_min {
                    Some(r) => SchwarzschildSpec::with_r_min(*m, *r),
                    None => SchwarzschildSpec::new(*m),
                };
                built.map_err(|e| at(metric_span.clone(), e.to_string()))?;
            }
            MetricSpec::RadialProfile { tau, .. } => {
                if !(*tau > 0.5 && *tau <= 1.0) {
                    return Err(at(metric_span, format!("decay order tau = {tau} must lie in (1/2, 1]")));
                }
            }
            MetricSpec::Warped { .. } => {}
        }

        let boundary_span = raw.boundary.span();
        let boundary = raw.boundary.into_inner();
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(at(boundary_span.clone(), format!("{what} must be positive, got {v}")))
            }
        };
        match &boundary {
            BoundarySpec::Sphere { r0 } => positive(*r0, "r0")?,
            BoundarySpec::Spheroid { equatorial, polar } => {
                positive(*equatorial, "equatorial")?;
                positive(*polar, "polar")?;
            }
            BoundarySpec::MuPolynomial { r0, .. } => positive(*r0, "r0")?,
            BoundarySpec::Curve { .. } => {}
        }

        let (numerics_span, numerics) = split(raw.numerics);
        if numerics.grid.0 < 64 || numerics.grid.1 < 64 {
            return Err(at(numerics_span.clone(), format!("grid {:?} is below the 64 x 64 minimum", numerics.grid)));
        }
        if numerics.truncation_factor < 10.0 {
            return Err(at(numerics_span.clone(), "truncation_factor must be at least 10".into()));
        }
        if numerics.thresholds < 32 {
            return Err(at(numerics_span, "symmetrization needs at least 32 thresholds".into()));
        }

        let (verify_span, verify) = split(raw.verify);
        if let Some(c) = verify.c.iter().find(|c| !(**c > 0.5 && **c < 1.0)) {
            return Err(at(verify_span, format!("c = {c} must lie in (1/2, 1)")));
        }

        let glue = match raw.glue {
            Some(g) => {
                let spec = *g.get_ref();
                if !(spec.m_prime > 0.0 && spec.m > spec.m_prime) {
                    return Err(at(
                        g.span(),
                        format!("gluing needs m > m' > 0, got m = {}, m_prime = {}", spec.m, spec.m_prime),
                    ));
                }
                Some(spec)
            }
            None => None,
        };
        if tasks.contains(&Task::Glue) && glue.is_none() {
            return Err(at(raw.tasks.span(), "the glue task needs a [glue] table".into()));
        }

        let sweep = match raw.sweep {
            Some(s) => {
                let spec = *s.get_ref();
                let bad_range = matches!((spec.start, spec.stop), (Some(a), Some(b)) if !(a > 0.0 && b > a));
                if spec.count < 2 || bad_range {
                    return Err(at(s.span(), "sweep needs count >= 2 and 0 < start < stop".into()));
                }
                Some(spec)
            }
            None => None,
        };
        let schwarzschild = matches!(metric, MetricSpec::Schwarzschild { .. });
        if tasks.contains(&Task::Sweep) && !schwarzschild && sweep.is_none_or(|s| s.start.is_none() || s.stop.is_none())
        {
            return Err(at(raw.tasks.span(), "a sweep outside Schwarzschild needs [sweep] start and stop".into()));
        }
        if tasks.contains(&Task::Verify("identities".into())) && !schwarzschild {
            return Err(at(raw.tasks.span(), "verify:identities needs a Schwarzschild metric".into()));
        }

        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Scenario { id, tasks, metric, boundary, numerics, verify, glue, sweep, base_dir })
    }

    fn resolve(&self, file: &Path) -> PathBuf {
        if file.is_absolute() {
            file.to_path_buf()
        } else {
            self.base_dir.join(file)
        }
    }

    /// The Schwarzschild mass, when the metric is Schwarzschild.
    pub fn schwarzschild_mass(&self) -> Option<f64> {
        match self.metric {
            MetricSpec::Schwarzschild { m, .. } => Some(m),
            _ => None,
        }
    }

    pub fn build_metric(&self) -> caplab::Result<MetricModel> {
        Ok(match &self.metric {
            MetricSpec::Schwarzschild { m, r_min } => {
                let spec = match r_min {
                    Some(r) => SchwarzschildSpec::with_r_min(*m, *r)?,
                    None => SchwarzschildSpec::new(*m)?,
                };
                MetricModel::Conformal(spec.metric())
            }
            MetricSpec::RadialProfile { file, tau, r_b } => {
                let profile = geometry::read_profile_csv(&self.resolve(file))?;
                let start = r_b.unwrap_or(profile.r_first());
                MetricModel::Conformal(RadialConformalMetric::new(RadialProfile::Sampled(profile), start, *tau)?)
            }
            MetricSpec::Warped { file } => {
                let text = std::fs::read_to_string(self.resolve(file))?;
                MetricModel::Warped(geometry::parse_warped_csv(&text)?)
            }
        })
    }

    pub fn build_boundary(&self) -> caplab::Result<MeridianCurve> {
        let curve = match &self.boundary {
            BoundarySpec::Sphere { r0 } => MeridianCurve::sphere(*r0),
            BoundarySpec::Spheroid { equatorial, polar } => {
                MeridianCurve::Spheroid { equatorial: *equatorial, polar: *polar }
            }
            BoundarySpec::MuPolynomial { r0, coeffs } => {
                MeridianCurve::MuPolynomial { r0: *r0, coeffs: coeffs.clone() }
            }
            BoundarySpec::Curve { file } => {
                let text = std::fs::read_to_string(self.resolve(file))?;
                MeridianCurve::Samples(SampledCurve::parse_csv(&text)?)
            }
        };
        curve.validate()?;
        Ok(curve)
    }

    /// Radii of the `r0` sweep.
    pub fn sweep_radii(&self) -> Vec<f64> {
        let spec = self.sweep.unwrap_or_default();
        let m = self.schwarzschild_mass().unwrap_or(1.0);
        let start = spec.start.unwrap_or(0.25 * 0.5 * m);
        let stop = spec.stop.unwrap_or(8.0 * 0.5 * m);
        caplab::numerics::logspace(start, stop, spec.count)
    }
}

pub enum MetricModel {
    Conformal(RadialConformalMetric),
    Warped(WarpedProductMetric),
}

impl MetricModel {
    pub fn conformal(&self) -> caplab::Result<&RadialConformalMetric> {
        match self {
            MetricModel::Conformal(m) => Ok(m),
            MetricModel::Warped(_) => Err(caplab::Error::InvalidInput(
                "this task needs a conformally flat metric, not a warped product".into(),
            )),
        }
    }

    pub fn warped(&self) -> WarpedProductMetric {
        match self {
            MetricModel::Conformal(m) => m.clone().into(),
            MetricModel::Warped(w) => w.clone(),
        }
    }
}

/// Parses `NxM` into `(N, M)`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("grid {s:?} is not of the form NxM"))?;
    let n = a.trim().parse().map_err(|_| format!("bad grid size {a:?}"))?;
    let m = b.trim().parse().map_err(|_| format!("bad grid size {b:?}"))?;
    Ok((n, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
id = "demo"
tasks = ["capacity", "verify:lc1"]

[metric]
kind = "schwarzschild"
m = 2.0

[boundary]
kind = "sphere"
r0 = 1.0
"#;

    fn parse(text: &str) -> Result<Scenario, ConfigError> {
        Scenario::parse(text, Path::new("demo.toml"))
    }

    #[test]
    fn minimal_scenario() {
        let s = parse(GOOD).unwrap();
        assert_eq!(s.tasks, vec![Task::Capacity, Task::Verify("lc1".into())]);
        assert_eq!(s.numerics, Numerics::default());
        assert_eq!(s.schwarzschild_mass(), Some(2.0));
    }

    #[test]
    fn errors_point_at_lines() {
        let bad = GOOD.replace("\"verify:lc1\"", "\"verify:nope\"");
        let e = parse(&bad).unwrap_err();
        assert_eq!(e.line, Some(3), "{e}");

        let glue = format!("{}\n[glue]\nm = 1.0\nm_prime = 2.0\n", GOOD.replace("\"capacity\"", "\"glue\""));
        let e = parse(&glue).unwrap_err();
        assert!(e.message.contains("m > m'"), "{e}");
        assert_eq!(e.line, Some(13), "{e}");

        let typo = GOOD.replace("r0 = 1.0", "radius = 1.0");
        let e = parse(&typo).unwrap_err();
        assert!(e.line.is_some(), "{e}");
    }

    #[test]
    fn grid_flag() {
        assert_eq!(parse_grid("256x128").unwrap(), (256, 128));
        assert!(parse_grid("256").is_err());
    }
}
