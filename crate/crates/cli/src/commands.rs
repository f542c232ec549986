use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use polychan_core::config::{load_config, load_sweep};
use polychan_core::oracle::{assemble_pencil, hunt_spectrum, refinement_persistence, HuntReport};
use polychan_core::{
    asymptotic_eigenvalues, build_coefficients, solve_base_flow, stability_margin, BaseFlow,
    EigenFamily, Grid, LinearCoefficients, ModelParams, SignConvention, StabilityReport,
};
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::svg::emit_svg;
use crate::sweep::{run_sweep, SweepResult};
use crate::{read_text, write_text, CliError, CliResult};

const MAX_OUTER: usize = 60;
/// Residual tolerance of accepted oracle eigenpairs.
pub const HUNT_TOL: f64 = 1e-6;
pub const HUNT_MAX_ITER: usize = 300;
/// A spectrum run with the oracle fails when no seed is matched this close.
pub const MATCH_LIMIT: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(name = "polychan", version, about = "Base flows, spectrum asymptotics and stability margins for a heated MHD polymer channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the stationary flow and write its profiles.
    Baseflow(BaseflowArgs),
    /// Asymptotic eigenvalue family, optionally checked against the oracle.
    Spectrum(SpectrumArgs),
    /// Necessary stability condition in both integral forms.
    Margin(MarginArgs),
    /// Margin over one parameter axis with boundary bisection.
    Sweep(SweepArgs),
    /// Direct eigenvalue search near the asymptotic seeds, with a refinement check.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BaseflowArgs {
    /// JSON parameter document.
    #[arg(long)]
    pub config: PathBuf,
    /// Base-flow grid nodes (odd, >= 65).
    #[arg(long, default_value_t = 1025)]
    pub grid: usize,
    /// Base-flow convergence tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub base: BaseflowArgs,
    /// Streamwise wavenumber; defaults to `omega` of the configuration.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
    pub k_lo: i64,
    #[arg(long, default_value_t = 30, allow_negative_numbers = true)]
    pub k_hi: i64,
    /// Also search the discretized problem near every asymptotic eigenvalue.
    #[arg(long)]
    pub with_oracle: bool,
    /// Oracle grid nodes (odd, >= 129).
    #[arg(long, default_value_t = 801)]
    pub oracle_grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct MarginArgs {
    #[command(flatten)]
    pub base: BaseflowArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// JSON sweep specification.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 513)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
}

/// Dispatches a parsed command line. Returns the process exit code; failures
/// are reported on stderr.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Baseflow(a) => cmd_baseflow(a).map(|_| ()),
        Command::Spectrum(a) => cmd_spectrum(a).map(|_| ()),
        Command::Margin(a) => cmd_margin(a).map(|_| ()),
        Command::Sweep(a) => cmd_sweep(a).map(|_| ()),
        Command::Oracle(a) => cmd_oracle(a).map(|_| ()),
    };
    match outcome {
        Ok(()) => crate::EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_params(path: &Path) -> CliResult<ModelParams> {
    Ok(load_config(&read_text(path)?)?)
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn tolerances(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn finish(mut manifest: RunManifest, started: Instant, dir: &Path) -> CliResult<RunManifest> {
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    manifest.write(dir)?;
    Ok(manifest)
}

fn solve(params: &ModelParams, args: &BaseflowArgs) -> CliResult<BaseFlow> {
    let grid = Grid::new(args.grid)?;
    Ok(solve_base_flow(params, &grid, args.tol, MAX_OUTER)?)
}

pub fn cmd_baseflow(args: &BaseflowArgs) -> CliResult<RunManifest> {
    let started = Instant::now();
    let params = load_params(&args.config)?;
    let flow = solve(&params, args)?;
    ensure_dir(&args.out)?;
    let manifest = RunManifest::new(
        "baseflow",
        params.hash_hex(),
        vec![args.grid],
        tolerances(&[("base_flow", args.tol)]),
        vec!["baseflow.csv".into(), "baseflow_u.svg".into()],
    );
    write_text(&args.out.join("baseflow.csv"), &flow.to_csv(Some(&manifest.hash)))?;
    let points: Vec<(f64, f64)> = flow.grid.nodes().iter().copied().zip(flow.u_hat.iter().copied()).collect();
    let svg = emit_svg("Base-flow velocity", "y", "u", &points, &manifest.hash)?;
    write_text(&args.out.join("baseflow_u.svg"), &svg)?;
    finish(manifest, started, &args.out)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub n_nodes: usize,
    pub sign_convention: SignConvention,
    pub seeds: usize,
    pub matched: usize,
    pub matched_within_limit: usize,
    /// max over matched k of k·(relative distance).
    pub fitted_c: Option<f64>,
    pub median_relative_distance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub manifest_hash: String,
    pub omega: f64,
    pub k_lo: i64,
    pub k_hi: i64,
    pub a_phase: f64,
    pub b_drift: Complex64,
    pub re_lambda: f64,
    pub im_spacing: f64,
    pub oracle: Option<OracleSummary>,
    pub warnings: Vec<String>,
}

pub fn summarize_hunt(report: &HuntReport) -> OracleSummary {
    let mut fitted: Option<f64> = None;
    let mut distances = Vec::new();
    for e in report.matched() {
        if let Some(d) = e.relative_distance {
            distances.push(d);
            let c = d * (e.k.unsigned_abs().max(1)) as f64;
            fitted = Some(fitted.map_or(c, |f: f64| f.max(c)));
        }
    }
    distances.sort_by(f64::total_cmp);
    let median = (!distances.is_empty()).then(|| distances[distances.len() / 2]);
    OracleSummary {
        n_nodes: report.n_nodes,
        sign_convention: report.convention,
        seeds: report.entries.len(),
        matched: distances.len(),
        matched_within_limit: distances.iter().filter(|&&d| d <= MATCH_LIMIT).count(),
        fitted_c: fitted,
        median_relative_distance: median,
    }
}

struct Pipeline {
    params: ModelParams,
    omega: f64,
    coeffs: LinearCoefficients,
    family: EigenFamily,
}

fn spectrum_pipeline(args: &SpectrumArgs) -> CliResult<Pipeline> {
    let params = load_params(&args.base.config)?;
    let omega = args.omega.unwrap_or(params.omega);
    if !omega.is_finite() {
        return Err(CliError::Usage(format!("--omega must be finite, got {omega}")));
    }
    let flow = solve(&params, &args.base)?;
    let coeffs = build_coefficients(&flow, &params)?;
    let family = asymptotic_eigenvalues(&coeffs, omega, args.k_lo, args.k_hi)?;
    Ok(Pipeline {
        params,
        omega,
        coeffs,
        family,
    })
}

fn hunt(p: &Pipeline, n: usize) -> CliResult<HuntReport> {
    let pencil = assemble_pencil(&p.coeffs, &p.params, p.omega, n)?;
    Ok(hunt_spectrum(&pencil, &p.family, &SignConvention::ALL, HUNT_TOL, HUNT_MAX_ITER)?)
}

fn check_matched(summary: &OracleSummary) -> CliResult<()> {
    if summary.matched_within_limit == 0 {
        return Err(CliError::OracleUnmatched {
            limit: MATCH_LIMIT,
            tried: summary.seeds,
        });
    }
    Ok(())
}

/// Runs base flow → coefficients → asymptotics and writes `spectrum.csv` and
/// `spectrum.json`. With the oracle, also writes `oracle.csv`; a zero
/// wavenumber skips the oracle with a warning.
pub fn cmd_spectrum(args: &SpectrumArgs) -> CliResult<SpectrumSummary> {
    let started = Instant::now();
    let p = spectrum_pipeline(args)?;
    ensure_dir(&args.base.out)?;
    let mut warnings = Vec::new();
    let run_oracle = args.with_oracle && p.omega != 0.0;
    if args.with_oracle && !run_oracle {
        let w = "oracle skipped: the discretized problem needs omega != 0".to_string();
        eprintln!("warning: {w}");
        warnings.push(w);
    }
    let mut outputs = vec!["spectrum.csv".to_string(), "spectrum.json".to_string()];
    let mut grids = vec![args.base.grid];
    let mut tols = vec![("base_flow", args.base.tol)];
    if run_oracle {
        outputs.push("oracle.csv".into());
        grids.push(args.oracle_grid);
        tols.push(("oracle_residual", HUNT_TOL));
    }
    let mut hashed_params = p.params;
    hashed_params.omega = p.omega;
    let manifest = RunManifest::new("spectrum", hashed_params.hash_hex(), grids, tolerances(&tols), outputs);
    write_text(&args.base.out.join("spectrum.csv"), &p.family.to_csv(Some(&manifest.hash)))?;

    let mut oracle = None;
    if run_oracle {
        let report = hunt(&p, args.oracle_grid)?;
        write_text(&args.base.out.join("oracle.csv"), &report.to_csv(Some(&manifest.hash)))?;
        oracle = Some(summarize_hunt(&report));
    }
    let summary = SpectrumSummary {
        manifest_hash: manifest.hash.clone(),
        omega: p.omega,
        k_lo: args.k_lo,
        k_hi: args.k_hi,
        a_phase: p.family.a_phase,
        b_drift: p.family.b_drift,
        re_lambda: p.family.lambdas[0].re,
        im_spacing: p.family.spacing(),
        oracle,
        warnings,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    write_text(&args.base.out.join("spectrum.json"), &json)?;
    finish(manifest, started, &args.base.out)?;
    if let Some(o) = &summary.oracle {
        check_matched(o)?;
    }
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginSummary {
    pub manifest_hash: String,
    pub report: StabilityReport,
    pub forms_agree: bool,
}

/// Writes `margin.json` with both forms of the necessary stability
/// condition and prints a one-line verdict.
pub fn cmd_margin(args: &MarginArgs) -> CliResult<MarginSummary> {
    let started = Instant::now();
    let params = load_params(&args.base.config)?;
    let flow = solve(&params, &args.base)?;
    let coeffs = build_coefficients(&flow, &params)?;
    let report = stability_margin(&coeffs);
    ensure_dir(&args.base.out)?;
    let manifest = RunManifest::new(
        "margin",
        params.hash_hex(),
        vec![args.base.grid],
        tolerances(&[("base_flow", args.base.tol)]),
        vec!["margin.json".into()],
    );
    let summary = MarginSummary {
        manifest_hash: manifest.hash.clone(),
        report,
        forms_agree: report.forms_agree(),
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    write_text(&args.base.out.join("margin.json"), &json)?;
    println!(
        "margin_form_b={} margin_form_a={} classification={}",
        report.margin_form_b,
        report.margin_form_a,
        report.classification.name()
    );
    finish(manifest, started, &args.base.out)?;
    Ok(summary)
}

/// Writes `sweep.csv`, `sweep_boundaries.csv` and `sweep_margin.svg`.
/// Failed points become NaN rows; only a bad sweep document is an error.
pub fn cmd_sweep(args: &SweepArgs) -> CliResult<SweepResult> {
    let started = Instant::now();
    let spec = load_sweep(&read_text(&args.config)?)?;
    let grid = Grid::new(args.grid)?;
    if args.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let result = run_sweep(&spec, &grid, args.tol, args.jobs);
    ensure_dir(&args.out)?;
    let spec_hash = polychan_core::config::short_hash(
        format!("{}|{:?}|{:?}|{}", spec.axis, spec.axis_values(), spec.outputs, spec.fixed.hash_hex()).as_bytes(),
    );
    let manifest = RunManifest::new(
        "sweep",
        spec_hash,
        vec![args.grid],
        tolerances(&[("base_flow", args.tol), ("boundary", crate::sweep::BOUNDARY_TOL)]),
        vec!["sweep.csv".into(), "sweep_boundaries.csv".into(), "sweep_margin.svg".into()],
    );
    write_text(&args.out.join("sweep.csv"), &result.to_csv(&manifest.hash))?;
    write_text(&args.out.join("sweep_boundaries.csv"), &result.boundaries_csv(&manifest.hash))?;
    let points: Vec<(f64, f64)> = result
        .points
        .iter()
        .map(|p| (p.value, p.report.map_or(f64::NAN, |r| r.margin_form_b)))
        .collect();
    match emit_svg("Stability margin", &spec.axis, "margin", &points, &manifest.hash) {
        Ok(svg) => write_text(&args.out.join("sweep_margin.svg"), &svg)?,
        Err(e) => eprintln!("warning: {e}"),
    }
    finish(manifest, started, &args.out)?;
    Ok(result)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRun {
    pub coarse: OracleSummary,
    pub fine_nodes: usize,
    /// Per matched seed: whether the eigenvalue reappears on the refined grid.
    pub persistent: Vec<(i64, bool)>,
}

/// Hunts the spectrum on the oracle grid and re-finds every accepted
/// eigenvalue on the grid with twice the resolution. Writes `oracle.csv` and
/// `persistence.csv`.
pub fn cmd_oracle(args: &OracleArgs) -> CliResult<OracleRun> {
    let started = Instant::now();
    let a = &args.spectrum;
    let p = spectrum_pipeline(a)?;
    if p.omega == 0.0 {
        return Err(CliError::Usage("the oracle needs omega != 0".into()));
    }
    let report = hunt(&p, a.oracle_grid)?;
    let fine_n = 2 * a.oracle_grid - 1;
    let fine = assemble_pencil(&p.coeffs, &p.params, p.omega, fine_n)?;
    let matched: Vec<(i64, Complex64)> = report.matched().map(|e| (e.k, e.found.expect("matched"))).collect();
    let found: Vec<Complex64> = matched.iter().map(|m| m.1).collect();
    let coarse_h = 1.0 / (a.oracle_grid - 1) as f64;
    let persistence = refinement_persistence(coarse_h, &fine, &found, HUNT_TOL, HUNT_MAX_ITER);

    ensure_dir(&a.base.out)?;
    let mut hashed_params = p.params;
    hashed_params.omega = p.omega;
    let manifest = RunManifest::new(
        "oracle",
        hashed_params.hash_hex(),
        vec![a.base.grid, a.oracle_grid, fine_n],
        tolerances(&[("base_flow", a.base.tol), ("oracle_residual", HUNT_TOL)]),
        vec!["oracle.csv".into(), "persistence.csv".into()],
    );
    write_text(&a.base.out.join("oracle.csv"), &report.to_csv(Some(&manifest.hash)))?;
    let mut csv = format!("# manifest_hash={}\nk,re_lambda,im_lambda,re_lambda_fine,im_lambda_fine,persistent\n", manifest.hash);
    for ((k, l), (fine_l, ok)) in matched.iter().zip(&persistence) {
        let (fr, fi) = fine_l.map_or(("NaN".to_string(), "NaN".to_string()), |f| (f.re.to_string(), f.im.to_string()));
        csv.push_str(&format!("{k},{},{},{fr},{fi},{ok}\n", l.re, l.im));
    }
    write_text(&a.base.out.join("persistence.csv"), &csv)?;
    finish(manifest, started, &a.base.out)?;
    let coarse = summarize_hunt(&report);
    check_matched(&coarse)?;
    Ok(OracleRun {
        coarse,
        fine_nodes: fine_n,
        persistent: matched.iter().map(|m| m.0).zip(persistence.iter().map(|p| p.1)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{EXIT_INPUT, EXIT_OK, EXIT_ORACLE, EXIT_SOLVER};

    fn write_config(dir: &Path, name: &str, p: &ModelParams) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, p.to_json()).unwrap();
        path
    }

    fn run_args(args: &[&str]) -> i32 {
        let mut full = vec!["polychan"];
        full.extend_from_slice(args);
        run(Cli::parse_from(full))
    }

    fn data_rows(csv: &str) -> Vec<Vec<String>> {
        csv.lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect()
    }

    #[test]
    fn baseflow_main_case_writes_asymmetric_profile() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "main.json", &ModelParams::main_case());
        let out = dir.path().join("out");
        let code = run_args(&["baseflow", "--config", cfg.to_str().unwrap(), "--grid", "257", "--out", out.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
        let csv = std::fs::read_to_string(out.join("baseflow.csv")).unwrap();
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        let hash = manifest["hash"].as_str().unwrap();
        assert!(csv.contains(&format!("# manifest_hash={hash}")));
        assert!(std::fs::read_to_string(out.join("baseflow_u.svg")).unwrap().contains(hash));
        let u: Vec<f64> = data_rows(&csv).iter().map(|r| r[1].parse().unwrap()).collect();
        let n = u.len();
        let asym = (0..n).map(|i| (u[i] - u[n - 1 - i]).abs()).fold(0.0, f64::max);
        assert!(asym > 1e-3, "velocity looks symmetric: {asym}");
    }

    #[test]
    fn baseflow_rest_state_has_zero_velocity() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "rest.json", &ModelParams::rest_state());
        let out = dir.path().join("out");
        assert_eq!(run_args(&["baseflow", "--config", cfg.to_str().unwrap(), "--grid", "129", "--out", out.to_str().unwrap()]), EXIT_OK);
        let csv = std::fs::read_to_string(out.join("baseflow.csv")).unwrap();
        assert!(data_rows(&csv).iter().all(|r| r[1].parse::<f64>().unwrap().abs() < 1e-10));
    }

    #[test]
    fn invalid_config_exits_with_input_code() {
        let dir = tempfile::tempdir().unwrap();
        let bad = ModelParams { beta: 1.5, ..ModelParams::main_case() };
        let cfg = write_config(dir.path(), "bad.json", &bad);
        let args = BaseflowArgs { config: cfg, grid: 129, tol: 1e-10, out: dir.path().join("out") };
        let err = cmd_baseflow(&args).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_INPUT);
        assert!(err.to_string().contains("validation error in `beta`"));
        let missing = BaseflowArgs { config: dir.path().join("absent.json"), ..args };
        assert_eq!(cmd_baseflow(&missing).unwrap_err().exit_code(), EXIT_INPUT);
    }

    #[test]
    fn lost_branch_exits_with_solver_code() {
        let dir = tempfile::tempdir().unwrap();
        let strong = ModelParams { j_plus: -1.0, ..ModelParams::main_case() };
        let cfg = write_config(dir.path(), "strong.json", &strong);
        let out = dir.path().join("out");
        assert_eq!(run_args(&["baseflow", "--config", cfg.to_str().unwrap(), "--grid", "129", "--out", out.to_str().unwrap()]), EXIT_SOLVER);
    }

    #[test]
    fn exit_codes_follow_failure_class() {
        assert_eq!(CliError::OracleUnmatched { limit: 0.1, tried: 3 }.exit_code(), EXIT_ORACLE);
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_INPUT);
        assert_eq!(CliError::Core(polychan_core::Error::Parse("x".into())).exit_code(), EXIT_INPUT);
        let no_conv = polychan_core::Error::NoConvergence { stage: "s".into(), iterations: 1, residuals: BTreeMap::new() };
        assert_eq!(CliError::Core(no_conv).exit_code(), EXIT_SOLVER);
    }

    fn spectrum_args(dir: &Path, p: &ModelParams, omega: f64, with_oracle: bool, k: (i64, i64), oracle_grid: usize) -> SpectrumArgs {
        SpectrumArgs {
            base: BaseflowArgs {
                config: write_config(dir, "cfg.json", p),
                grid: 513,
                tol: 1e-10,
                out: dir.join("out"),
            },
            omega: Some(omega),
            k_lo: k.0,
            k_hi: k.1,
            with_oracle,
            oracle_grid,
        }
    }

    #[test]
    fn spectrum_without_oracle_has_constant_real_part() {
        let dir = tempfile::tempdir().unwrap();
        let args = spectrum_args(dir.path(), &ModelParams::main_case(), 1.0, false, (10, 30), 801);
        let summary = cmd_spectrum(&args).unwrap();
        assert!(summary.oracle.is_none());
        let csv = std::fs::read_to_string(args.base.out.join("spectrum.csv")).unwrap();
        let rows = data_rows(&csv);
        assert_eq!(rows.len(), 21);
        assert!(rows.iter().all(|r| r[2] == rows[0][2]));
        assert!(csv.contains(&summary.manifest_hash));
    }

    #[test]
    fn zero_wavenumber_skips_oracle_with_warning() {
        let dir = tempfile::tempdir().unwrap();
        let args = spectrum_args(dir.path(), &ModelParams::rest_state(), 0.0, true, (1, 5), 129);
        let summary = cmd_spectrum(&args).unwrap();
        assert!(summary.oracle.is_none());
        assert_eq!(summary.warnings.len(), 1);
        assert!(args.base.out.join("spectrum.csv").exists());
        assert!(!args.base.out.join("oracle.csv").exists());
    }

    #[test]
    fn spectrum_with_oracle_matches_seeds() {
        let dir = tempfile::tempdir().unwrap();
        let args = spectrum_args(dir.path(), &ModelParams::main_case(), 1.0, true, (10, 12), 201);
        let summary = cmd_spectrum(&args).unwrap();
        let oracle = summary.oracle.unwrap();
        assert_eq!(oracle.matched, 3);
        assert_eq!(oracle.sign_convention, SignConvention::Negated);
        let csv = std::fs::read_to_string(args.base.out.join("oracle.csv")).unwrap();
        assert_eq!(data_rows(&csv).len(), 3);
    }

    #[test]
    fn margin_of_rest_state_is_half() {
        let dir = tempfile::tempdir().unwrap();
        let args = MarginArgs {
            base: BaseflowArgs {
                config: write_config(dir.path(), "rest.json", &ModelParams::rest_state()),
                grid: 129,
                tol: 1e-10,
                out: dir.path().join("out"),
            },
        };
        let summary = cmd_margin(&args).unwrap();
        assert!((summary.report.margin_form_b - 0.5).abs() < 1e-12);
        assert!(summary.forms_agree);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(args.base.out.join("margin.json")).unwrap()).unwrap();
        assert_eq!(json["report"]["classification"], "violated");
    }

    #[test]
    fn sweep_output_is_independent_of_thread_count() {
        let dir = tempfile::tempdir().unwrap();
        let spec = serde_json::json!({
            "axis": "theta_bar",
            "lo": 0.0,
            "hi": 1.0,
            "count": 5,
            "fixed": serde_json::from_str::<serde_json::Value>(&ModelParams::main_case().to_json()).unwrap(),
            "outputs": ["margin", "A", "B", "re_lambda"]
        });
        let path = dir.path().join("sweep.json");
        std::fs::write(&path, spec.to_string()).unwrap();
        let mut bodies = Vec::new();
        for jobs in [1, 3] {
            let out = dir.path().join(format!("jobs{jobs}"));
            let args = SweepArgs { config: path.clone(), grid: 129, tol: 1e-10, out: out.clone(), jobs: Some(jobs) };
            cmd_sweep(&args).unwrap();
            bodies.push(std::fs::read_to_string(out.join("sweep.csv")).unwrap());
        }
        assert_eq!(bodies[0], bodies[1]);
        assert_eq!(data_rows(&bodies[0]).len(), 5);
    }

    #[test]
    fn malformed_sweep_spec_is_an_input_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.json");
        std::fs::write(&path, r#"{"axis": "nope", "values": [1.0]}"#).unwrap();
        let args = SweepArgs { config: path, grid: 129, tol: 1e-10, out: dir.path().join("out"), jobs: Some(1) };
        assert_eq!(cmd_sweep(&args).unwrap_err().exit_code(), EXIT_INPUT);
    }
}
