//! Strict JSON run configurations.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::tolerances::Tolerances;
use crate::analysis::TestFunction;
use crate::grid::Grid;
use crate::source::{EnsembleSpec, PointSource, SourceSpec};
use crate::spectral::EvolutionSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    FreeGaussian,
    TwoSlitPure,
    TwoSlitMixed,
    NSlit,
    DiffusionCompare,
    TailExponent,
    DeltaLimit,
    PotentialWell,
    OracleCrosscheck,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 9] = [
        ScenarioKind::FreeGaussian,
        ScenarioKind::TwoSlitPure,
        ScenarioKind::TwoSlitMixed,
        ScenarioKind::NSlit,
        ScenarioKind::DiffusionCompare,
        ScenarioKind::TailExponent,
        ScenarioKind::DeltaLimit,
        ScenarioKind::PotentialWell,
        ScenarioKind::OracleCrosscheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::FreeGaussian => "free-gaussian",
            ScenarioKind::TwoSlitPure => "two-slit-pure",
            ScenarioKind::TwoSlitMixed => "two-slit-mixed",
            ScenarioKind::NSlit => "n-slit",
            ScenarioKind::DiffusionCompare => "diffusion-compare",
            ScenarioKind::TailExponent => "tail-exponent",
            ScenarioKind::DeltaLimit => "delta-limit",
            ScenarioKind::PotentialWell => "potential-well",
            ScenarioKind::OracleCrosscheck => "oracle-crosscheck",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioKind::FreeGaussian => "spectral spreading of a Gaussian packet against its closed form",
            ScenarioKind::TwoSlitPure => "coherent two-source pattern: decomposition, fringes, overlap",
            ScenarioKind::TwoSlitMixed => "incoherent two-source mixture against its coherent counterpart",
            ScenarioKind::NSlit => "coherent pattern of any number of sources and its decomposition",
            ScenarioKind::DiffusionCompare => "heat kernel against the continued free propagator",
            ScenarioKind::TailExponent => "far-field power-law decay of a single source for even s",
            ScenarioKind::DeltaLimit => "test-function functionals of a source as t -> 0",
            ScenarioKind::PotentialWell => "split-step evolution in a static potential",
            ScenarioKind::OracleCrosscheck => "propagator convolution against spectral evolution",
        }
    }

    /// Top-level config sections this scenario reads, besides `grid` and the common ones.
    fn sections(self) -> &'static [&'static str] {
        match self {
            ScenarioKind::FreeGaussian => &["gaussian", "evolution", "samples"],
            ScenarioKind::TwoSlitPure => &["sources", "evolution", "samples"],
            ScenarioKind::TwoSlitMixed => &["sources", "ensemble", "evolution", "samples"],
            ScenarioKind::NSlit => &["sources", "evolution", "samples"],
            ScenarioKind::DiffusionCompare => &["diffusion"],
            ScenarioKind::TailExponent => &["sources", "evolution", "tail"],
            ScenarioKind::DeltaLimit => &["sources", "evolution", "delta"],
            ScenarioKind::PotentialWell => &["gaussian", "evolution", "samples"],
            ScenarioKind::OracleCrosscheck => &["gaussian", "evolution", "samples"],
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianConfig {
    pub sigma0: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub p0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    /// `V(x) = m0 omega^2 (x - center)^2 / 2`.
    Harmonic {
        omega: f64,
        #[serde(default)]
        center: f64,
    },
    /// `V(x_j)` listed for every grid point.
    Tabulated { values: Vec<f64> },
}

impl PotentialConfig {
    pub fn sample(&self, grid: &Grid<f64>, m0: f64) -> Vec<f64> {
        match self {
            PotentialConfig::Harmonic { omega, center } => grid
                .positions()
                .into_iter()
                .map(|x| 0.5 * m0 * omega * omega * (x - center) * (x - center))
                .collect(),
            PotentialConfig::Tabulated { values } => values.clone(),
        }
    }
}

fn default_exponent() -> u32 {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    #[serde(default = "default_exponent")]
    pub s: u32,
    pub m0: f64,
    /// Final time.
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialConfig>,
    /// Extra times at which the state is written, besides `t`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub slices: Vec<f64>,
}

impl EvolutionConfig {
    pub fn spec(&self, grid: &Grid<f64>) -> EvolutionSpec<f64> {
        self.spec_until(grid, self.t)
    }

    pub fn spec_until(&self, grid: &Grid<f64>, t: f64) -> EvolutionSpec<f64> {
        let free = EvolutionSpec::free(self.s, self.m0, t);
        match (&self.potential, self.dt) {
            (Some(p), Some(dt)) => free.with_potential(p.sample(grid, self.m0), dt),
            _ => free,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionConfig {
    pub k: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailConfig {
    /// `[a, b]`, on one side of the origin.
    pub window: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaConfig {
    /// Decreasing evolution times.
    pub times: Vec<f64>,
    pub test_functions: Vec<TestFunction<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<SourceSpec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaussian: Option<GaussianConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<DiffusionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
    /// Number of Born-rule position samples drawn from the final density; 0 draws none.
    #[serde(default)]
    pub samples: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl fmt::Display) -> ConfigError {
    ConfigError::Validation {
        field: field.into(),
        message: message.to_string(),
    }
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

impl ScenarioConfig {
    pub fn grid(&self) -> Grid<f64> {
        Grid::new(self.grid.x_min, self.grid.x_max, self.grid.n).expect("validated config")
    }

    /// The mixture used by `two-slit-mixed`: the explicit ensemble, or one member per source.
    pub fn mixture(&self) -> Option<EnsembleSpec<f64>> {
        match (&self.ensemble, &self.sources) {
            (Some(e), _) => Some(e.clone()),
            (None, Some(s)) => Some(EnsembleSpec::incoherent(s)),
            _ => None,
        }
    }

    /// The coherent preparation: `sources`, or the ensemble's sources merged with weights
    /// `P_i w_ij`.
    pub fn coherent_sources(&self) -> Option<SourceSpec<f64>> {
        if let Some(s) = &self.sources {
            return Some(s.clone());
        }
        let e = self.ensemble.as_ref()?;
        let sigma = e.members.first()?.sources.sigma_reg;
        let points = e
            .members
            .iter()
            .flat_map(|m| {
                m.sources
                    .points
                    .iter()
                    .map(move |p| PointSource::new(p.x, m.probability * p.weight, p.phase))
            })
            .collect();
        Some(SourceSpec::new(points, sigma))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let kind = self.scenario;
        let grid = Grid::new(self.grid.x_min, self.grid.x_max, self.grid.n)
            .map_err(|e| invalid("grid", e))?;

        let present = [
            ("sources", self.sources.is_some()),
            ("ensemble", self.ensemble.is_some()),
            ("gaussian", self.gaussian.is_some()),
            ("evolution", self.evolution.is_some()),
            ("diffusion", self.diffusion.is_some()),
            ("tail", self.tail.is_some()),
            ("delta", self.delta.is_some()),
            ("samples", self.samples > 0),
        ];
        for (name, is_set) in present {
            if is_set && !kind.sections().contains(&name) {
                return Err(invalid(name, format!("not used by scenario {kind}")));
            }
        }
        let required: &[&str] = match kind {
            ScenarioKind::FreeGaussian | ScenarioKind::PotentialWell | ScenarioKind::OracleCrosscheck => {
                &["gaussian", "evolution"]
            }
            ScenarioKind::TwoSlitPure | ScenarioKind::NSlit => &["sources", "evolution"],
            ScenarioKind::TwoSlitMixed => &["evolution"],
            ScenarioKind::DiffusionCompare => &["diffusion"],
            ScenarioKind::TailExponent => &["sources", "evolution", "tail"],
            ScenarioKind::DeltaLimit => &["sources", "evolution", "delta"],
        };
        for name in required {
            if !present.iter().any(|(n, set)| n == name && *set) {
                return Err(invalid(*name, format!("required by scenario {kind}")));
            }
        }

        self.validate_tolerances()?;
        if let Some(s) = &self.sources {
            s.validate(&grid).map_err(|e| invalid("sources", e))?;
        }
        if let Some(e) = &self.ensemble {
            e.validate(&grid).map_err(|e| invalid("ensemble", e))?;
        }
        if let Some(g) = &self.gaussian {
            if !(g.sigma0 > 2.0 * grid.dx()) || !g.sigma0.is_finite() {
                return Err(invalid("gaussian.sigma0", format!("must exceed 2*dx = {}", 2.0 * grid.dx())));
            }
            if !grid.contains_strictly(g.x0) {
                return Err(invalid("gaussian.x0", "must lie inside the grid"));
            }
            if !g.p0.is_finite() || g.p0.abs() >= grid.nyquist() {
                return Err(invalid("gaussian.p0", format!("must be below the Nyquist momentum {}", grid.nyquist())));
            }
        }
        if let Some(ev) = &self.evolution {
            self.validate_evolution(ev, &grid)?;
        }
        match kind {
            ScenarioKind::TwoSlitPure => {
                let n = self.sources.as_ref().map_or(0, |s| s.len());
                if n != 2 {
                    return Err(invalid("sources.points", format!("two-slit-pure needs exactly 2 sources, got {n}")));
                }
            }
            ScenarioKind::NSlit => {
                if self.sources.as_ref().map_or(0, |s| s.len()) < 2 {
                    return Err(invalid("sources.points", "n-slit needs at least 2 sources"));
                }
            }
            ScenarioKind::TwoSlitMixed => self.validate_mixture()?,
            ScenarioKind::DiffusionCompare => {
                let d = self.diffusion.expect("checked above");
                if !(d.k > 0.0) || !d.k.is_finite() {
                    return Err(invalid("diffusion.k", "must be positive"));
                }
                if !(d.t > 0.0) || !d.t.is_finite() {
                    return Err(invalid("diffusion.t", "must be positive"));
                }
            }
            ScenarioKind::TailExponent => {
                let [a, b] = self.tail.expect("checked above").window;
                if !(a.is_finite() && b.is_finite()) || !(a.abs() < b.abs()) || a * b <= 0.0 {
                    return Err(invalid(
                        "tail.window",
                        "must be [a, b] with |a| < |b|, both on the same side of the origin",
                    ));
                }
                if a.min(b) < grid.x_min() || a.max(b) > grid.x(grid.len() - 1) {
                    return Err(invalid("tail.window", "leaves the grid"));
                }
            }
            ScenarioKind::DeltaLimit => {
                let d = self.delta.as_ref().expect("checked above");
                if self.sources.as_ref().map_or(0, |s| s.len()) != 1 {
                    return Err(invalid("sources.points", "delta-limit needs exactly 1 source"));
                }
                if d.times.is_empty() {
                    return Err(invalid("delta.times", "must not be empty"));
                }
                if d.times.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
                    return Err(invalid("delta.times", "every time must be positive"));
                }
                if d.times.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(invalid("delta.times", "must be strictly decreasing"));
                }
                if d.test_functions.is_empty() {
                    return Err(invalid("delta.test_functions", "must not be empty"));
                }
                for (i, chi) in d.test_functions.iter().enumerate() {
                    chi.validate().map_err(|e| invalid(format!("delta.test_functions[{i}]"), e))?;
                    let (lo, hi) = chi.support();
                    if *chi != TestFunction::Unit && (lo < grid.x_min() || hi > grid.x_max()) {
                        return Err(invalid(
                            format!("delta.test_functions[{i}]"),
                            "support leaves the grid",
                        ));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn validate_tolerances(&self) -> Result<(), ConfigError> {
        let value = serde_json::to_value(self.tolerances).expect("plain struct");
        for (name, v) in value.as_object().expect("struct serializes to an object") {
            match v.as_f64() {
                Some(x) if x >= 0.0 && x.is_finite() => {}
                _ => return Err(invalid(format!("tolerances.{name}"), "must be finite and >= 0")),
            }
        }
        Ok(())
    }

    fn validate_evolution(&self, ev: &EvolutionConfig, grid: &Grid<f64>) -> Result<(), ConfigError> {
        let kind = self.scenario;
        if ev.s < 2 || ev.s % 2 != 0 {
            return Err(invalid("evolution.s", format!("must be even and >= 2, got {}", ev.s)));
        }
        if !(ev.m0 > 0.0) || !ev.m0.is_finite() {
            return Err(invalid("evolution.m0", "must be positive"));
        }
        if !(ev.t >= 0.0) || !ev.t.is_finite() {
            return Err(invalid("evolution.t", "must be finite and >= 0"));
        }
        let wants_potential = kind == ScenarioKind::PotentialWell;
        match (&ev.potential, wants_potential) {
            (Some(_), false) => return Err(invalid("evolution.potential", format!("not used by scenario {kind}"))),
            (None, true) => return Err(invalid("evolution.potential", "required by scenario potential-well")),
            _ => {}
        }
        if ev.dt.is_some() && !wants_potential {
            return Err(invalid("evolution.dt", format!("not used by scenario {kind}")));
        }
        if let Some(PotentialConfig::Tabulated { values }) = &ev.potential {
            if values.len() != grid.len() {
                return Err(invalid(
                    "evolution.potential.values",
                    format!("has {} entries for a grid of {}", values.len(), grid.len()),
                ));
            }
        }
        if let Some(PotentialConfig::Harmonic { omega, center }) = &ev.potential {
            if !(*omega > 0.0) || !omega.is_finite() {
                return Err(invalid("evolution.potential.omega", "must be positive"));
            }
            if !center.is_finite() {
                return Err(invalid("evolution.potential.center", "must be finite"));
            }
        }
        ev.spec(grid).validate(grid).map_err(|e| invalid("evolution", e))?;

        let needs_schrodinger = matches!(
            kind,
            ScenarioKind::FreeGaussian
                | ScenarioKind::TwoSlitPure
                | ScenarioKind::TwoSlitMixed
                | ScenarioKind::OracleCrosscheck
        );
        if needs_schrodinger && ev.s != 2 {
            return Err(invalid("evolution.s", format!("scenario {kind} requires s = 2")));
        }
        let needs_positive_time = matches!(
            kind,
            ScenarioKind::TwoSlitPure
                | ScenarioKind::TwoSlitMixed
                | ScenarioKind::NSlit
                | ScenarioKind::TailExponent
                | ScenarioKind::OracleCrosscheck
                | ScenarioKind::PotentialWell
        );
        if needs_positive_time && !(ev.t > 0.0) {
            return Err(invalid("evolution.t", format!("scenario {kind} requires t > 0")));
        }
        if !ev.slices.is_empty() {
            if !matches!(kind, ScenarioKind::FreeGaussian | ScenarioKind::PotentialWell) {
                return Err(invalid("evolution.slices", format!("not used by scenario {kind}")));
            }
            for (i, &t) in ev.slices.iter().enumerate() {
                if !(t >= 0.0) || t > ev.t {
                    return Err(invalid(format!("evolution.slices[{i}]"), format!("must lie in [0, {}]", ev.t)));
                }
                if let Some(dt) = ev.dt {
                    let r = t / dt;
                    if (r - r.round()).abs() > 1e-9 * r.max(1.0) {
                        return Err(invalid(format!("evolution.slices[{i}]"), "must be a multiple of dt"));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_mixture(&self) -> Result<(), ConfigError> {
        match (&self.sources, &self.ensemble) {
            (Some(_), Some(_)) => {
                return Err(invalid("ensemble", "give either `sources` or `ensemble`, not both"))
            }
            (None, None) => return Err(invalid("sources", "two-slit-mixed needs `sources` or `ensemble`")),
            _ => {}
        }
        if let Some(e) = &self.ensemble {
            let sigma = e.members[0].sources.sigma_reg;
            if e.members.iter().any(|m| m.sources.sigma_reg != sigma) {
                return Err(invalid("ensemble.members", "all members must share sigma_reg"));
            }
        }
        let points = self.coherent_sources().expect("one of the two is set").len();
        if points != 2 {
            return Err(invalid("sources", format!("two-slit-mixed needs exactly 2 sources in total, got {points}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "scenario": "two-slit-pure",
        "grid": {"x_min": -50, "x_max": 50, "n": 4096},
        "sources": {
            "points": [{"x": -5, "weight": 0.5}, {"x": 5, "weight": 0.5}],
            "sigma_reg": 0.5
        },
        "evolution": {"m0": 1, "t": 2}
    }"#;

    #[test]
    fn minimal_two_slit_is_valid() {
        let c = parse_config_str(MINIMAL).unwrap();
        assert_eq!(c.scenario, ScenarioKind::TwoSlitPure);
        assert_eq!(c.evolution.as_ref().unwrap().s, 2);
        assert_eq!(c.tolerances, Tolerances::DEFAULT);
    }

    #[test]
    fn weight_sum_is_named() {
        let text = MINIMAL.replace(r#""x": 5, "weight": 0.5"#, r#""x": 5, "weight": 0.4"#);
        let e = parse_config_str(&text).unwrap_err();
        let msg = e.to_string();
        assert!(matches!(e, ConfigError::Validation { ref field, .. } if field == "sources"), "{msg}");
        assert!(msg.contains("weights sum to 0.9"), "{msg}");
    }

    #[test]
    fn unknown_key_is_cited() {
        let text = MINIMAL.replace("sigma_reg", "sigma_regg");
        let e = parse_config_str(&text).unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line, .. } if line > 1));
        assert!(e.to_string().contains("sigma_regg"), "{e}");
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_config_str("{\n  \"scenario\": \"n-slit\",\n  oops\n}").unwrap_err();
        match e {
            ConfigError::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unused_and_missing_sections_rejected() {
        let text = MINIMAL.replace(r#""evolution""#, r#""diffusion": {"k": 1, "t": 1}, "evolution""#);
        let e = parse_config_str(&text).unwrap_err();
        assert!(e.to_string().contains("`diffusion`"), "{e}");
        let text = MINIMAL.replace(r#""scenario": "two-slit-pure""#, r#""scenario": "free-gaussian""#);
        let e = parse_config_str(&text).unwrap_err();
        assert!(e.to_string().contains("`sources`"), "{e}");
    }

    #[test]
    fn tolerance_override_and_unknown_tolerance() {
        let text = MINIMAL.replace(r#""evolution""#, r#""tolerances": {"projection": 0.01}, "evolution""#);
        let c = parse_config_str(&text).unwrap();
        assert_eq!(c.tolerances.projection, 0.01);
        assert_eq!(c.tolerances.zero_integral, Tolerances::DEFAULT.zero_integral);
        let text = MINIMAL.replace(r#""evolution""#, r#""tolerances": {"projektion": 0.01}, "evolution""#);
        assert!(parse_config_str(&text).unwrap_err().to_string().contains("projektion"));
        let text = MINIMAL.replace(r#""evolution""#, r#""tolerances": {"projection": -1}, "evolution""#);
        assert!(parse_config_str(&text).unwrap_err().to_string().contains("tolerances.projection"));
    }

    #[test]
    fn mixture_merges_into_coherent_sources() {
        let text = r#"{
            "scenario": "two-slit-mixed",
            "grid": {"x_min": -50, "x_max": 50, "n": 4096},
            "ensemble": {"members": [
                {"probability": 0.25, "sources": {"points": [{"x": -5, "weight": 1}], "sigma_reg": 0.3}},
                {"probability": 0.75, "sources": {"points": [{"x": 5, "weight": 1, "phase": 1}], "sigma_reg": 0.3}}
            ]},
            "evolution": {"m0": 1, "t": 2}
        }"#;
        let c = parse_config_str(text).unwrap();
        let s = c.coherent_sources().unwrap();
        assert_eq!(s.points[1], PointSource::new(5.0, 0.75, 1.0));
    }
}
