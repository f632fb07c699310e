//! Experiment runner behind the command-line tool.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::analysis::{run_experiment, AnalysisOptions, Structure};
use crate::diagnostics::Report;
use crate::error::{GcgError, Result};
use crate::io::{field_to_string, history_to_csv, read_text, write_text};
use crate::registry::{lookup, Problem};
use crate::solver::{gcg_solve, ArmijoParams, SolveStatus, SolverConfig, DEFAULT_MAX_BACKTRACKS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub fn exit_code(err: &GcgError) -> i32 {
    match err {
        GcgError::InvalidInput(_) | GcgError::UnknownProblem(_) | GcgError::Parse(_) => EXIT_USAGE,
        GcgError::Io { .. } => EXIT_IO,
        GcgError::DimensionMismatch { .. }
        | GcgError::NegativeGap { .. }
        | GcgError::LineSearchFailed { .. }
        | GcgError::Numerical(_) => EXIT_NUMERICAL,
    }
}

/// A partial configuration: one source (file or flags) before merging.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigLayer {
    pub problem: Option<String>,
    pub n: Option<usize>,
    pub nt: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub max_backtracks: Option<u32>,
    pub out_dir: Option<PathBuf>,
    pub track_errors: Option<bool>,
    pub diagnostics: Option<bool>,
    pub reference_tol: Option<f64>,
}

impl ConfigLayer {
    /// Values set in `top` win.
    pub fn overlay(self, top: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            problem: top.problem.or(self.problem),
            n: top.n.or(self.n),
            nt: top.nt.or(self.nt),
            tol: top.tol.or(self.tol),
            max_iter: top.max_iter.or(self.max_iter),
            alpha: top.alpha.or(self.alpha),
            gamma: top.gamma.or(self.gamma),
            max_backtracks: top.max_backtracks.or(self.max_backtracks),
            out_dir: top.out_dir.or(self.out_dir),
            track_errors: top.track_errors.or(self.track_errors),
            diagnostics: top.diagnostics.or(self.diagnostics),
            reference_tol: top.reference_tol.or(self.reference_tol),
        }
    }

    /// Flat `key = value` lines; `#` starts a comment. Keys match the long
    /// flag names, with `-` and `_` interchangeable.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| GcgError::Parse(format!("config line {}: expected key = value", no + 1)))?;
            let key = k.trim().replace('_', "-");
            let v = v.trim();
            let bad = || GcgError::Parse(format!("config line {}: bad value '{v}' for '{key}'", no + 1));
            match key.as_str() {
                "problem" => out.problem = Some(v.to_string()),
                "n" => out.n = Some(v.parse().map_err(|_| bad())?),
                "nt" => out.nt = Some(v.parse().map_err(|_| bad())?),
                "tol" => out.tol = Some(v.parse().map_err(|_| bad())?),
                "max-iter" => out.max_iter = Some(v.parse().map_err(|_| bad())?),
                "alpha" => out.alpha = Some(v.parse().map_err(|_| bad())?),
                "gamma" => out.gamma = Some(v.parse().map_err(|_| bad())?),
                "max-backtracks" => out.max_backtracks = Some(v.parse().map_err(|_| bad())?),
                "out-dir" => out.out_dir = Some(PathBuf::from(v)),
                "track-errors" => out.track_errors = Some(v.parse().map_err(|_| bad())?),
                "diagnostics" => out.diagnostics = Some(v.parse().map_err(|_| bad())?),
                "reference-tol" => out.reference_tol = Some(v.parse().map_err(|_| bad())?),
                _ => return Err(GcgError::Parse(format!("config line {}: unknown key '{key}'", no + 1))),
            }
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub n: usize,
    pub nt: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub max_backtracks: u32,
    pub out_dir: PathBuf,
    pub track_errors: bool,
    pub diagnostics: bool,
    /// Tighter tolerance for the reference run used by the diagnostics.
    pub reference_tol: Option<f64>,
}

impl RunConfig {
    /// Fills unset values with the defaults (`α = 0.5`, `γ = 0.99`,
    /// `tol = 1e-10`, `max_iter = 1000`, per-problem grid sizes).
    pub fn resolve(layer: ConfigLayer) -> Result<Self> {
        let problem = layer.problem.ok_or_else(|| GcgError::InvalidInput("no problem given".into()))?;
        let info = lookup(&problem)?;
        let n = layer.n.unwrap_or(info.default_n);
        let nt = layer.nt.unwrap_or(info.default_nt);
        let out_dir = layer.out_dir.unwrap_or_else(|| {
            let mut name = format!("{problem}-n{n}");
            if info.default_nt > 0 {
                name.push_str(&format!("-nt{nt}"));
            }
            Path::new("out").join(name)
        });
        let cfg = Self {
            problem,
            n,
            nt,
            tol: layer.tol.unwrap_or(1e-10),
            max_iter: layer.max_iter.unwrap_or(1000),
            alpha: layer.alpha.unwrap_or(0.5),
            gamma: layer.gamma.unwrap_or(0.99),
            max_backtracks: layer.max_backtracks.unwrap_or(DEFAULT_MAX_BACKTRACKS),
            out_dir,
            track_errors: layer.track_errors.unwrap_or(true),
            diagnostics: layer.diagnostics.unwrap_or(true),
            reference_tol: layer.reference_tol,
        };
        if cfg.reference_tol.is_some_and(|t| !(t > 0.0)) {
            return Err(GcgError::InvalidInput("reference tolerance must be positive".into()));
        }
        cfg.solver_config()?;
        Ok(cfg)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        SolverConfig::new(self.tol, self.max_iter, ArmijoParams::new(self.alpha, self.gamma, self.max_backtracks)?)
    }

    pub fn history_path(&self) -> PathBuf {
        self.out_dir.join("history.csv")
    }

    pub fn control_path(&self) -> PathBuf {
        self.out_dir.join("control.txt")
    }

    pub fn report_path(&self) -> PathBuf {
        self.out_dir.join("report.txt")
    }

    pub fn profile_path(&self) -> PathBuf {
        self.out_dir.join("profile.csv")
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: SolveStatus,
    pub iterations: usize,
    pub report: Report,
    pub written: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            SolveStatus::LineSearchFailed => EXIT_NUMERICAL,
            _ => EXIT_OK,
        }
    }
}

fn setup_report(cfg: &RunConfig) -> Report {
    let mut r = Report::new();
    r.push("problem", &cfg.problem);
    r.push("n", cfg.n);
    if lookup(&cfg.problem).map(|i| i.default_nt > 0).unwrap_or(false) {
        r.push("nt", cfg.nt);
    }
    r.push_f64("tol", cfg.tol);
    r.push("max_iter", cfg.max_iter);
    r.push_f64("alpha", cfg.alpha);
    r.push_f64("gamma", cfg.gamma);
    r
}

/// Solves, then writes the history CSV, the final control, the report and
/// (for parabolic problems with diagnostics) the time profile.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let problem = Problem::build(&cfg.problem, cfg.n, cfg.nt)?;
    let solver = cfg.solver_config()?;
    let mut report = setup_report(cfg);
    let mut written = Vec::new();
    let result = if cfg.diagnostics {
        let opts = AnalysisOptions {
            track_errors: cfg.track_errors,
            reference_tol: cfg.reference_tol,
            ..AnalysisOptions::default()
        };
        report.push_opt_f64("reference_tol", cfg.reference_tol);
        let exp = run_experiment(&problem, &solver, &opts)?;
        report.extend(exp.report());
        if let Structure::Parabolic { profile, .. } = &exp.analysis.structure {
            let mut s = String::from("m,t,u_norm,p_norm\n");
            for (m, (u, p)) in profile.u_norms.iter().zip(&profile.p_norms).enumerate() {
                s.push_str(&format!("{},{:?},{:?},{:?}\n", m, (m + 1) as f64 * profile.tau, u, p));
            }
            write_text(&cfg.profile_path(), &s)?;
            written.push(cfg.profile_path());
        }
        exp.result
    } else {
        let mut solver = solver;
        if cfg.track_errors {
            let first = gcg_solve(&problem, problem.zero_control(), &solver)?;
            solver = solver.with_reference(first.final_iterate);
        }
        let res = gcg_solve(&problem, problem.zero_control(), &solver)?;
        report.push("status", res.status);
        report.push("iterations", res.iterations());
        report.push_f64("final_j", res.final_record().j_value);
        report.push_f64("final_gap", res.final_record().gap);
        res
    };
    write_text(&cfg.history_path(), &history_to_csv(&result.history))?;
    write_text(&cfg.control_path(), &field_to_string(&result.final_iterate))?;
    write_text(&cfg.report_path(), &report.to_string())?;
    written.extend([cfg.history_path(), cfg.control_path(), cfg.report_path()]);
    Ok(RunOutcome { status: result.status, iterations: result.iterations(), report, written })
}

/// Runs independent configurations on up to `jobs` threads. Results come
/// back in input order.
pub fn run_batch(configs: &[RunConfig], jobs: usize) -> Vec<Result<RunOutcome>> {
    let jobs = jobs.clamp(1, configs.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<RunOutcome>>>> = configs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= configs.len() {
                    break;
                }
                let out = run(&configs[i]);
                *slots[i].lock().expect("slot lock") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every slot is filled"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = ConfigLayer::parse("problem = stadler-ex1\nn = 8\n# comment\nmax_iter = 5\ngamma=0.9\n").unwrap();
        let flags = ConfigLayer { n: Some(12), ..Default::default() };
        let cfg = RunConfig::resolve(ConfigLayer::default().overlay(file).overlay(flags)).unwrap();
        assert_eq!(cfg.n, 12);
        assert_eq!(cfg.max_iter, 5);
        assert_eq!(cfg.gamma, 0.9);
        assert_eq!(cfg.alpha, 0.5);
        assert_eq!(cfg.tol, 1e-10);
        assert_eq!(cfg.out_dir, Path::new("out/stadler-ex1-n12"));
    }

    #[test]
    fn config_errors() {
        assert!(ConfigLayer::parse("bogus = 1").is_err());
        assert!(ConfigLayer::parse("n = x").is_err());
        assert!(ConfigLayer::parse("just text").is_err());
        let unknown = RunConfig::resolve(ConfigLayer { problem: Some("nope".into()), ..Default::default() });
        assert_eq!(exit_code(&unknown.unwrap_err()), EXIT_USAGE);
        let bad_alpha =
            RunConfig::resolve(ConfigLayer { problem: Some("stadler-ex1".into()), alpha: Some(0.7), ..Default::default() });
        assert!(bad_alpha.is_err());
    }
}
