//! TOML run configuration and space definition files.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use ckn_core::bernstein::{chain_constant, chain_quadrature};
use ckn_core::space::conjugate;
use ckn_core::{grid, DensitySegment, Geometry, PointedRadialSpace};
use serde::{Deserialize, Serialize};

use crate::builtins::Builtin;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Ckn,
    Sharp,
    Bernstein,
    Volume,
    Rigidity,
    Stability,
    Counterexample,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Ckn,
        Suite::Sharp,
        Suite::Bernstein,
        Suite::Volume,
        Suite::Rigidity,
        Suite::Stability,
        Suite::Counterexample,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Ckn => "ckn",
            Suite::Sharp => "sharp",
            Suite::Bernstein => "bernstein",
            Suite::Volume => "volume",
            Suite::Rigidity => "rigidity",
            Suite::Stability => "stability",
            Suite::Counterexample => "counterexample",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of the adaptive quadrature.
    pub quad_rel: f64,
    /// Chain margins, scaled R-derivatives and the stability inequality.
    pub check: f64,
    /// Relative agreement of the Fubini identities.
    pub fubini: f64,
    /// How far below `C + k` the sharp-constant estimate may dip.
    pub sharp: f64,
    /// Volume ratio monotonicity; the core default for the space when absent.
    pub volume: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { quad_rel: 1e-10, check: 1e-8, fubini: 1e-6, sharp: 1e-6, volume: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Highest `k` for the ckn and sharp suites.
    pub k_max: u32,
    /// Highest `k` of the chain tables.
    pub chain_k_max: u32,
    /// Random bumps per `(space, k)` in the ckn and stability suites.
    pub bumps: usize,
    pub p: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self { k_max: 3, chain_k_max: ckn_core::bernstein::DEFAULT_K_MAX, bumps: 20, p: 2.0 }
    }
}

/// Flip the expected verdict of some checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectOverride {
    pub space: String,
    pub suite: Suite,
    /// Exact check name; every check of the suite when absent.
    pub check: Option<String>,
    pub verdict: Expect,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SpaceEntry {
    /// A builtin name or a path to a space file, relative to the config.
    Name(String),
    Inline(SpaceDef),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spaces: Vec<SpaceEntry>,
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub seed: u64,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub settings: Settings,
    #[serde(default)]
    pub expect: Vec<ExpectOverride>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryDef {
    Radial,
    HalfLine,
    Euclidean(u32),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormDef {
    Power { coeff: f64, exponent: f64 },
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SegmentDef {
    pub lower: f64,
    /// Infinity when absent.
    pub upper: Option<f64>,
    #[serde(flatten)]
    pub form: FormDef,
}

/// Contents of a space file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDef {
    pub label: String,
    #[serde(default)]
    pub atom_mass: f64,
    pub dim_hint: Option<f64>,
    pub geometry: Option<GeometryDef>,
    /// Constant `C` to check against. Defaults to `dim_hint / p'`, then to the
    /// chain constant on the default lambda grid.
    pub constant: Option<f64>,
    pub segments: Vec<SegmentDef>,
}

impl SpaceDef {
    pub fn build(&self) -> Result<PointedRadialSpace> {
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let upper = s.upper.unwrap_or(f64::INFINITY);
            let seg = match &s.form {
                FormDef::Power { coeff, exponent } => DensitySegment::power(s.lower, upper, *coeff, *exponent),
                FormDef::Tabulated { radii, values } => {
                    if radii.first() != Some(&s.lower) || radii.last() != Some(&upper) {
                        return Err(LabError::Config(format!(
                            "space `{}`: a tabulated segment must list radii from `lower` to `upper`",
                            self.label
                        )));
                    }
                    DensitySegment::tabulated(radii.clone(), values.clone())
                }
            };
            segments.push(seg);
        }
        let wrap = |e: ckn_core::Error| LabError::Config(format!("space `{}`: {e}", self.label));
        let space = PointedRadialSpace::new(self.label.clone(), segments, self.atom_mass, self.dim_hint).map_err(wrap)?;
        match self.geometry {
            None | Some(GeometryDef::Radial) => Ok(space),
            Some(GeometryDef::HalfLine) => space.with_geometry(Geometry::HalfLine).map_err(wrap),
            Some(GeometryDef::Euclidean(dim)) => space.with_geometry(Geometry::Euclidean { dim }).map_err(wrap),
        }
    }
}

/// A space ready for the suites.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSpace {
    pub name: String,
    pub space: PointedRadialSpace,
    pub constant: f64,
    pub builtin: Option<Builtin>,
}

impl ResolvedSpace {
    pub fn from_builtin(b: Builtin, p: f64) -> Result<Self> {
        Ok(Self { name: b.name(), space: b.build()?, constant: b.constant(p), builtin: Some(b) })
    }

    pub fn from_def(def: &SpaceDef, p: f64) -> Result<Self> {
        let space = def.build()?;
        let constant = match (def.constant, def.dim_hint) {
            (Some(c), _) => c,
            (None, Some(n)) => n / conjugate(p),
            (None, None) => {
                let lams = grid::default_lambda_grid();
                chain_constant(&space, &lams, ckn_core::bernstein::DEFAULT_K_MAX, p, &chain_quadrature())
                    .map_err(|e| LabError::numeric(format!("chain constant of `{}`", def.label), e))?
            }
        };
        if !(constant.is_finite() && constant > 0.0) {
            return Err(LabError::Config(format!("space `{}`: constant must be positive, got {constant}", def.label)));
        }
        Ok(Self { name: def.label.clone(), space, constant, builtin: None })
    }
}

/// A validated config with every space built.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub spaces: Vec<ResolvedSpace>,
    /// Canonical order, no duplicates.
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub settings: Settings,
    pub expect: Vec<ExpectOverride>,
    pub out: Option<PathBuf>,
}

impl Plan {
    pub fn expectation(&self, space: &str, suite: Suite, check: &str, default: Expect) -> Expect {
        self.expect
            .iter()
            .rev()
            .find(|o| o.space == space && o.suite == suite && o.check.as_deref().is_none_or(|c| c == check))
            .map_or(default, |o| o.verdict)
    }
}

pub fn read_space_file(path: &Path) -> Result<SpaceDef> {
    let text = std::fs::read_to_string(path).map_err(|source| LabError::Read { path: path.into(), source })?;
    toml::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| LabError::Read { path: path.into(), source })?;
    parse_config(&text).map_err(|e| match e {
        LabError::Config(m) => LabError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(LabError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Validate `config` and build its spaces. Relative space paths resolve against `base`.
pub fn plan(config: &RunConfig, base: &Path) -> Result<Plan> {
    if config.spaces.is_empty() {
        return Err(LabError::Config("at least one space is required".into()));
    }
    if config.suites.is_empty() {
        return Err(LabError::Config("at least one suite is required".into()));
    }
    let t = &config.tolerances;
    positive("tolerances.quad_rel", t.quad_rel)?;
    positive("tolerances.check", t.check)?;
    positive("tolerances.fubini", t.fubini)?;
    positive("tolerances.sharp", t.sharp)?;
    if let Some(v) = t.volume {
        positive("tolerances.volume", v)?;
    }
    let s = &config.settings;
    if !(s.p.is_finite() && s.p > 1.0) {
        return Err(LabError::Config(format!("settings.p must lie in (1, inf), got {}", s.p)));
    }
    if s.k_max > 12 || s.chain_k_max > 12 {
        return Err(LabError::Config("settings.k_max and settings.chain_k_max are limited to 12".into()));
    }

    let mut spaces = Vec::new();
    for entry in &config.spaces {
        let resolved = match entry {
            SpaceEntry::Name(name) => match Builtin::parse(name) {
                Some(b) => ResolvedSpace::from_builtin(b?, s.p)?,
                None => ResolvedSpace::from_def(&read_space_file(&base.join(name))?, s.p)?,
            },
            SpaceEntry::Inline(def) => ResolvedSpace::from_def(def, s.p)?,
        };
        if spaces.iter().any(|r: &ResolvedSpace| r.name == resolved.name) {
            return Err(LabError::Config(format!("space `{}` listed twice", resolved.name)));
        }
        spaces.push(resolved);
    }

    let suites: Vec<Suite> = config.suites.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if suites.contains(&Suite::Counterexample) {
        if let Some(r) = spaces.iter().find(|r| !matches!(r.builtin, Some(Builtin::Counterexample { .. }))) {
            return Err(LabError::Config(format!(
                "the counterexample suite needs counterexample(n,M) spaces only, got `{}`",
                r.name
            )));
        }
    }
    for o in &config.expect {
        if !spaces.iter().any(|r| r.name == o.space) {
            return Err(LabError::Config(format!("expectation names unknown space `{}`", o.space)));
        }
    }
    Ok(Plan {
        spaces,
        suites,
        seed: config.seed,
        tolerances: config.tolerances.clone(),
        settings: config.settings.clone(),
        expect: config.expect.clone(),
        out: config.out.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = parse_config("spaces = [\"euclidean(2)\"]\nsuites = [\"ckn\", \"bernstein\"]").unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.tolerances, Tolerances::default());
        let p = plan(&c, Path::new(".")).unwrap();
        assert_eq!(p.spaces[0].constant, 1.0);
        assert_eq!(p.suites, vec![Suite::Ckn, Suite::Bernstein]);
    }

    #[test]
    fn suites_are_canonicalized() {
        let c = parse_config("spaces = [\"half_line\"]\nsuites = [\"volume\", \"ckn\", \"volume\"]").unwrap();
        assert_eq!(plan(&c, Path::new(".")).unwrap().suites, vec![Suite::Ckn, Suite::Volume]);
    }

    #[test]
    fn inline_space() {
        let text = r#"
suites = ["volume"]
[[spaces]]
label = "kinked"
dim_hint = 2.0
[[spaces.segments]]
lower = 0.0
upper = 1.0
form = "tabulated"
radii = [0.0, 0.5, 1.0]
values = [0.0, 1.0, 2.0]
[[spaces.segments]]
lower = 1.0
form = "power"
coeff = 2.0
exponent = 1.0
"#;
        let p = plan(&parse_config(text).unwrap(), Path::new(".")).unwrap();
        let s = &p.spaces[0];
        assert_eq!(s.name, "kinked");
        assert_eq!(s.constant, 1.0);
        assert!((s.space.ball_volume(2.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = Path::new(".");
        for text in [
            "spaces = []\nsuites = [\"ckn\"]",
            "spaces = [\"euclidean(2)\"]\nsuites = []",
            "spaces = [\"euclidean(2)\"]\nsuites = [\"nope\"]",
            "spaces = [\"euclidean(2)\"]\nsuites = [\"ckn\"]\nbogus = 1",
            "spaces = [\"euclidean(2)\"]\nsuites = [\"counterexample\"]",
            "spaces = [\"euclidean(2)\", \"euclidean(2)\"]\nsuites = [\"ckn\"]",
            "spaces = [\"euclidean(2)\"]\nsuites = [\"ckn\"]\n[tolerances]\ncheck = -1.0",
            "spaces = [\"no/such/file.toml\"]\nsuites = [\"ckn\"]",
            "spaces = [\"euclidean(2)\"]\nsuites = [\"ckn\"]\n[[expect]]\nspace = \"cone(1,2)\"\nsuite = \"ckn\"\nverdict = \"fail\"",
        ] {
            let err = parse_config(text).and_then(|c| plan(&c, base)).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
    }

    #[test]
    fn overrides_pick_last_match() {
        let text = r#"
spaces = ["counterexample(1,1)"]
suites = ["ckn"]
[[expect]]
space = "counterexample(1,1)"
suite = "ckn"
verdict = "fail"
[[expect]]
space = "counterexample(1,1)"
suite = "ckn"
check = "ckn k=1"
verdict = "pass"
"#;
        let p = plan(&parse_config(text).unwrap(), Path::new(".")).unwrap();
        assert_eq!(p.expectation("counterexample(1,1)", Suite::Ckn, "ckn k=0", Expect::Pass), Expect::Fail);
        assert_eq!(p.expectation("counterexample(1,1)", Suite::Ckn, "ckn k=1", Expect::Pass), Expect::Pass);
        assert_eq!(p.expectation("counterexample(1,1)", Suite::Volume, "x", Expect::Pass), Expect::Pass);
    }
}
