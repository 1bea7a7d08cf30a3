//! Run configs, suite orchestration and report files for `ckn-core`.

pub mod builtins;
pub mod config;
pub mod emit;
pub mod error;
pub mod suites;

use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{Expect, Plan, RunConfig, Suite};
pub use error::{LabError, Result};
use emit::{Chart, SCHEMA_VERSION};
use suites::{header, run_suite_on_space, Series, SpaceOutput, Verdict};

/// Environment variable holding the default output directory.
pub const OUT_ENV: &str = "CKN_LAB_OUT";
pub const DEFAULT_OUT: &str = "ckn-lab-out";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceSummary {
    pub name: String,
    pub constant: f64,
    pub atom_mass: f64,
    pub dim_hint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub ok: bool,
    pub checks: Vec<Verdict>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub seed: u64,
    pub tolerances: config::Tolerances,
    pub settings: config::Settings,
    pub spaces: Vec<SpaceSummary>,
    pub suites: Vec<SuiteSummary>,
    pub counterexample: Vec<serde_json::Value>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: Suite,
    pub outputs: Vec<SpaceOutput>,
}

impl SuiteResult {
    pub fn verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.outputs.iter().flat_map(|o| o.verdicts.iter())
    }
}

/// Results of every selected suite, in canonical suite order and config space order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResults {
    pub plan: Plan,
    pub suites: Vec<SuiteResult>,
}

impl RunResults {
    pub fn all_ok(&self) -> bool {
        self.suites.iter().flat_map(|s| s.verdicts()).all(|v| v.ok)
    }

    /// 0 when every check matched its expectation, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_ok() {
            0
        } else {
            1
        }
    }

    pub fn summary(&self) -> Summary {
        Summary {
            schema: SCHEMA_VERSION,
            seed: self.plan.seed,
            tolerances: self.plan.tolerances.clone(),
            settings: self.plan.settings.clone(),
            spaces: self
                .plan
                .spaces
                .iter()
                .map(|r| SpaceSummary {
                    name: r.name.clone(),
                    constant: r.constant,
                    atom_mass: r.space.atom_mass(),
                    dim_hint: r.space.dim_hint(),
                })
                .collect(),
            suites: self
                .suites
                .iter()
                .map(|s| SuiteSummary {
                    suite: s.suite,
                    ok: s.verdicts().all(|v| v.ok),
                    checks: s.verdicts().cloned().collect(),
                    notes: s.outputs.iter().flat_map(|o| o.notes.iter().cloned()).collect(),
                })
                .collect(),
            counterexample: self.suites.iter().flat_map(|s| s.outputs.iter().filter_map(|o| o.bundle.clone())).collect(),
            ok: self.all_ok(),
        }
    }
}

/// Run every suite of `plan` over its spaces. Spaces of one suite run on separate threads.
pub fn run_plan(plan: &Plan) -> Result<RunResults> {
    let mut suites = Vec::new();
    for &suite in &plan.suites {
        let outputs = std::thread::scope(|scope| {
            let handles: Vec<_> =
                plan.spaces.iter().map(|sp| scope.spawn(move || run_suite_on_space(plan, suite, sp))).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(LabError::Config("suite thread panicked".into()))))
                .collect::<Result<Vec<_>>>()
        })?;
        suites.push(SuiteResult { suite, outputs });
    }
    Ok(RunResults { plan: plan.clone(), suites })
}

fn chart_for(suite: Suite, series: Vec<Series>) -> Option<(&'static str, Chart)> {
    let (file, title, x, y, log_x) = match suite {
        Suite::Ckn => ("ckn_margin.svg", "relative CKN margin against k", "k", "margin / (C + k)", false),
        Suite::Bernstein => ("chain_margin.svg", "smallest relative chain margin against k", "k", "min over lambda of margin / S_k", false),
        Suite::Volume => ("volume_ratio.svg", "volume ratio against radius", "rho", "m(B_rho) / rho^(p' C)", true),
        _ => return None,
    };
    Some((file, Chart { title: title.into(), x_label: x.into(), y_label: y.into(), log_x, series }))
}

/// Write `<suite>.csv` for each suite, `summary.json` and the SVG charts into `dir`.
/// Returns the written paths in write order.
pub fn emit_reports(results: &RunResults, dir: &Path) -> Result<Vec<PathBuf>> {
    if results.suites.is_empty() {
        return Err(LabError::EmptyReport(dir.into()));
    }
    std::fs::create_dir_all(dir).map_err(|source| LabError::Io { path: dir.into(), source })?;
    let seed = results.plan.seed;
    let mut written = Vec::new();
    for s in &results.suites {
        let rows: Vec<Vec<String>> = s.outputs.iter().flat_map(|o| o.rows.iter().cloned()).collect();
        if !rows.is_empty() {
            let path = dir.join(format!("{}.csv", s.suite));
            emit::write_csv(&path, header(s.suite), &rows, seed)?;
            written.push(path);
        }
        let series: Vec<Series> = s.outputs.iter().flat_map(|o| o.series.iter().cloned()).collect();
        if let Some((file, chart)) = chart_for(s.suite, series) {
            if !chart.series.is_empty() {
                let path = dir.join(file);
                emit::write_svg(&path, &chart, seed)?;
                written.push(path);
            }
        }
    }
    let path = dir.join("summary.json");
    emit::write_json(&path, &results.summary())?;
    written.push(path);
    Ok(written)
}

/// Pick the output directory: explicit flag, then config, then environment, then the default.
pub fn output_dir(flag: Option<&Path>, config_out: Option<&Path>, base: &Path) -> PathBuf {
    if let Some(p) = flag {
        return p.into();
    }
    if let Some(p) = config_out {
        return base.join(p);
    }
    match std::env::var_os(OUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_OUT),
    }
}
