//! The three subcommands. Each builds the doubled space from the
//! configuration before touching the output directory.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use contactkit::flows::{FlowOptions, Tolerances};
use contactkit::invariant::{loop_svg, write_loop_csv, InvariantOptions, InvariantRun};
use contactkit::suites::{run_iterate, run_suite, CheckRecord, IterateRecord, Suite, SuiteContext};
use contactkit::weinstein::{cutoff_equation, double, make_model, CutoffSpec, DoubledSpace, RegularEquation};

use crate::config::{RunConfig, SourceEquation};
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub toolkit_version: String,
    pub config: RunConfig,
    pub all_pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub iterates: Vec<IterateRecord>,
    /// Wall-clock seconds; the only field that varies between identical runs.
    pub timing: BTreeMap<String, f64>,
}

impl Report {
    fn new(command: &str, config: &RunConfig) -> Self {
        Report {
            command: command.into(),
            toolkit_version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            all_pass: false,
            checks: Vec::new(),
            iterates: Vec::new(),
            timing: BTreeMap::new(),
        }
    }
}

fn space(cfg: &RunConfig) -> Result<DoubledSpace<f64>, CliError> {
    let model = make_model::<f64>(cfg.model.kind, cfg.model.n).map_err(|e| CliError::Config(e.to_string()))?;
    let spec = CutoffSpec::for_model(&model).map_err(|e| CliError::Config(e.to_string()))?;
    double(&model, cutoff_equation(&model, spec)).map_err(|e| CliError::Config(e.to_string()))
}

fn flow_options(cfg: &RunConfig) -> FlowOptions<f64> {
    FlowOptions::with_tol(Tolerances::new(cfg.tolerances.ode_rel, cfg.tolerances.ode_abs))
}

fn context(cfg: &RunConfig, ds: DoubledSpace<f64>) -> SuiteContext {
    let f0 = match cfg.f0 {
        SourceEquation::Shifted => RegularEquation::shifted(ds.model()),
        SourceEquation::Cutoff => ds.equation().clone(),
    };
    SuiteContext {
        ds,
        f0,
        samples: cfg.samples,
        seed: cfg.seed(),
        flow: flow_options(cfg),
        surface_tol: cfg.tolerances.surface,
        identity_tol: cfg.tolerances.identity,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn print_check(r: &CheckRecord) {
    let status = if r.passed() { "PASS" } else { "FAIL" };
    print!("{status} {:<26} max_residual={:.3e} threshold={:.1e} samples={}", r.name, r.max_residual, r.threshold, r.samples);
    if let Some(e) = &r.error {
        print!(" error=\"{e}\"");
    }
    println!();
}

fn run_checks(default: &[Suite], cfg: &RunConfig, command: &str) -> Result<Report, CliError> {
    let ctx = context(cfg, space(cfg)?);
    let suites: Vec<Suite> = if cfg.checks.is_empty() { default.to_vec() } else { cfg.checks.clone() };
    let mut report = Report::new(command, cfg);
    let start = Instant::now();
    for s in suites {
        let t = Instant::now();
        let rec = run_suite(s, &ctx);
        report.timing.insert(s.name().into(), t.elapsed().as_secs_f64());
        print_check(&rec);
        report.checks.push(rec);
    }
    report.timing.insert("total".into(), start.elapsed().as_secs_f64());
    report.all_pass = report.checks.iter().all(CheckRecord::passed);
    Ok(report)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let report = run_checks(&Suite::VERIFY, cfg, "verify")?;
    fs::create_dir_all(&cfg.output.dir)?;
    write_json(&cfg.output.dir.join("report.json"), &report)?;
    Ok(report)
}

pub fn cmd_double_equiv(cfg: &RunConfig) -> Result<Report, CliError> {
    let report = run_checks(&Suite::DOUBLE_EQUIV, cfg, "double-equiv")?;
    fs::create_dir_all(&cfg.output.dir)?;
    write_json(&cfg.output.dir.join("report.json"), &report)?;
    Ok(report)
}

fn write_loop_files(dir: &Path, run: &InvariantRun<f64>, plot: bool) -> Result<(), CliError> {
    let k = run.report.k;
    write_json(&dir.join(format!("winding_k{k}.json")), &run.report)?;
    let mut csv = BufWriter::new(fs::File::create(dir.join(format!("loop_k{k}.csv")))?);
    write_loop_csv(&mut csv, &run.matrix_loop)?;
    if plot {
        fs::write(dir.join(format!("loop_k{k}.svg")), loop_svg(&run.matrix_loop))?;
    }
    Ok(())
}

pub fn cmd_invariant(cfg: &RunConfig) -> Result<Report, CliError> {
    let ds = space(cfg)?;
    let opts = InvariantOptions { theta_samples: cfg.theta_samples, flow: flow_options(cfg), surface_tol: cfg.tolerances.surface, ..InvariantOptions::default() };
    let mut report = Report::new("invariant", cfg);
    fs::create_dir_all(&cfg.output.dir)?;
    let start = Instant::now();
    for &k in &cfg.k_list {
        let t = Instant::now();
        let (rec, run) = run_iterate(&ds, k, &opts);
        report.timing.insert(format!("k{k}"), t.elapsed().as_secs_f64());
        if let Some(run) = &run {
            write_loop_files(&cfg.output.dir, run, cfg.output.plot)?;
        }
        let status = if rec.passed() { "PASS" } else { "FAIL" };
        match (&rec.winding, &rec.error) {
            (Some(w), _) => println!("{status} k={k} winding={} phase_total={:.6} block={:.1e} row_modulation={:.1e} radial={:.1e}", w.winding, w.phase_total, w.block_residual, w.row_modulation_residual, w.radial_residual),
            (None, Some(e)) => println!("{status} k={k} error=\"{e}\""),
            (None, None) => println!("{status} k={k}"),
        }
        for f in &rec.failures {
            println!("     {f}");
        }
        report.iterates.push(rec);
    }
    report.timing.insert("total".into(), start.elapsed().as_secs_f64());
    report.all_pass = report.iterates.iter().all(IterateRecord::passed);
    write_json(&cfg.output.dir.join("report.json"), &report)?;
    Ok(report)
}
