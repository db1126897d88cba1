//! Command-line driver: parses configs and flags, dispatches to the library,
//! and emits report JSON plus CSV artifacts.
//!
//! Exit codes: `0` everything verified, `1` a verification produced a
//! non-pass status (failed metric, nonconvex witness, unconverged run),
//! `2` usage or configuration error.  Outputs are a pure function of
//! `(config, seed)`: no timestamps or wall-clock numbers appear anywhere.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use orbitconv::config::DEFAULT_SEED;
use orbitconv::geom::Point;
use orbitconv::groups::{orbit, ActionConfig, GroupAction};
use orbitconv::report::{
    artifact_path, write_metrics_csv, write_points_csv, write_slopes_csv, Bound, Status,
    VerificationReport,
};
use orbitconv::sampling::mix_bytes;
use orbitconv::scenarios::{default_params, run_scenario, ScenarioParams, SCENARIO_IDS};
use orbitconv::submetry::{ascending_slope, convexity_detect, DetectParams, SaturatedSet, Verdict};
use orbitconv::{Error, Result};

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "ORBITCONV_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "orbitconv",
    version,
    about = "Numerical verification of convexity phenomena in orbit spaces",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a group orbit and write it as a CSV point cloud.
    Orbit(OrbitArgs),
    /// Estimate the ascending slope of a saturated-set distance function.
    Slope(SlopeArgs),
    /// Run the convexity detector on a saturated set.
    Detect(DetectArgs),
    /// Run a verification scenario; writes report JSON and CSV artifacts.
    Verify(VerifyArgs),
    /// Merge report JSON files into a summary CSV (exit 0 iff all pass).
    Report(ReportArgs),
}

#[derive(Args)]
struct OrbitArgs {
    /// Group action, e.g. `O2`, `SO3`, `S4`, `D10`, `C5`, `neg3`; reps via
    /// `SO3:conj` (conjugation on symmetric matrices), `O4:diag3` (three
    /// diagonal copies), `S3:perm`.
    #[arg(long)]
    action: String,
    /// Seed vector as comma-separated floats, e.g. `1,0.5,-2`.
    #[arg(long)]
    point: String,
    /// Sample budget for compact groups (finite orbits enumerate exactly).
    #[arg(long, default_value_t = 256)]
    budget: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory [default: $ORBITCONV_OUT_DIR or ./out].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SlopeArgs {
    #[arg(long)]
    action: String,
    /// Saturated set: `radial:LO,HI`, `fibers:P1;P2;…`, or
    /// `sublevel:LEVEL;U1;U2;…` (points as comma-separated floats).
    #[arg(long)]
    set: String,
    /// Probe point (must lie outside the set).
    #[arg(long)]
    point: String,
    /// Orbit budget for sublevel-set construction.
    #[arg(long, default_value_t = 256)]
    budget: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    action: String,
    #[arg(long)]
    set: String,
    #[arg(long, default_value_t = 60)]
    probes: usize,
    /// Midpoint pairs tested before slope probing.
    #[arg(long, default_value_t = 80)]
    pairs: usize,
    #[arg(long, default_value_t = 256)]
    budget: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scenario id; may come from the config file instead.
    scenario: Option<String>,
    /// JSON run config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated spectrum, e.g. `3,2,1`.
    #[arg(long)]
    eigenvalues: Option<String>,
    #[arg(long)]
    group: Option<String>,
    /// Comma-separated seed vector (empty string clears it).
    #[arg(long)]
    point: Option<String>,
    #[arg(long)]
    orbit_budget: Option<usize>,
    #[arg(long)]
    direction_budget: Option<usize>,
    #[arg(long)]
    pair_budget: Option<usize>,
    #[arg(long)]
    probe_budget: Option<usize>,
    #[arg(long)]
    membership_subset: Option<usize>,
    #[arg(long)]
    hull_tol: Option<f64>,
    #[arg(long)]
    exact_tol: Option<f64>,
    #[arg(long)]
    isometry_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Upper bound on worker threads (the deterministic pipeline currently
    /// uses one, so any bound >= 1 is satisfied).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

#[derive(Args)]
struct ReportArgs {
    /// Report JSON files to merge.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Write the summary CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// On-disk run configuration for `verify`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    scenario: Option<String>,
    #[serde(default)]
    params: ParamsPatch,
    /// Defaults to the crate-wide constant so bare configs reproduce.
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Partial override of [`ScenarioParams`]; the seed lives on [`RunConfig`].
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsPatch {
    n: Option<usize>,
    k: Option<usize>,
    eigenvalues: Option<Vec<f64>>,
    group: Option<String>,
    point: Option<Vec<f64>>,
    orbit_budget: Option<usize>,
    direction_budget: Option<usize>,
    pair_budget: Option<usize>,
    probe_budget: Option<usize>,
    membership_subset: Option<usize>,
    hull_tol: Option<f64>,
    exact_tol: Option<f64>,
    isometry_tol: Option<f64>,
}

impl ParamsPatch {
    fn apply(&self, p: &mut ScenarioParams) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { p.$field = v.clone(); })*
            };
        }
        take!(
            n,
            k,
            eigenvalues,
            group,
            point,
            orbit_budget,
            direction_budget,
            pair_budget,
            probe_budget,
            membership_subset,
            hull_tol,
            exact_tol,
            isometry_tol
        );
    }
}

pub fn run(args: &[String]) -> i32 {
    let mut argv = vec!["orbitconv".to_string()];
    argv.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Orbit(a) => cmd_orbit(&a),
        Command::Slope(a) => cmd_slope(&a),
        Command::Detect(a) => cmd_detect(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Report(a) => cmd_report(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

// --- input grammar ---------------------------------------------------------

fn parse_floats(text: &str) -> Result<Vec<f64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("expected a float, got '{s}'")))
        })
        .collect()
}

fn parse_point(text: &str) -> Result<Point> {
    Point::new(parse_floats(text)?)
}

/// `BASE[:MOD]` where BASE is a compact group spec and MOD is `conj`,
/// `perm`, or `diagK`.
fn parse_action(spec: &str, seed: u64) -> Result<Arc<GroupAction>> {
    let (base, modifier) = match spec.split_once(':') {
        Some((b, m)) => (b, Some(m)),
        None => (spec, None),
    };
    let mut cfg = ActionConfig::parse_compact(base)?;
    match modifier {
        None => {}
        Some("conj") => cfg = cfg.with_rep("conjugation-symmetric"),
        Some("perm") => cfg = cfg.with_rep("permutation-coordinates"),
        Some(m) if m.starts_with("diag") => {
            let copies: usize = m[4..]
                .parse()
                .map_err(|_| Error::Config(format!("bad copy count in '{spec}'")))?;
            cfg = cfg.with_rep("diagonal-copies").with_copies(copies);
        }
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown action modifier '{other}' (expected conj, perm, or diagK)"
            )))
        }
    }
    GroupAction::from_config(&cfg.with_seed(mix_bytes(seed, b"action-sampler")))
}

/// `radial:LO,HI` | `fibers:P1;P2;…` | `sublevel:LEVEL;U1;U2;…`.
fn parse_set(
    spec: &str,
    action: Arc<GroupAction>,
    orbit_budget: usize,
    seed: u64,
) -> Result<SaturatedSet> {
    let (kind, payload) = spec.split_once(':').ok_or_else(|| {
        Error::Config(format!(
            "set spec '{spec}' needs the form kind:payload (radial, fibers, sublevel)"
        ))
    })?;
    match kind {
        "radial" => {
            let bounds = parse_floats(payload)?;
            if bounds.len() != 2 {
                return Err(Error::Config(format!(
                    "radial set needs exactly LO,HI (got '{payload}')"
                )));
            }
            SaturatedSet::radial(action, bounds[0], bounds[1])
        }
        "fibers" => {
            let reps = payload
                .split(';')
                .map(parse_point)
                .collect::<Result<Vec<_>>>()?;
            SaturatedSet::fibers(action, reps)
        }
        "sublevel" => {
            let mut parts = payload.split(';');
            let level: f64 = parts
                .next()
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("sublevel needs a level in '{payload}'")))?;
            let dirs = parts.map(parse_point).collect::<Result<Vec<_>>>()?;
            SaturatedSet::basic_sublevel(action, &dirs, level, orbit_budget, seed)
        }
        other => Err(Error::Config(format!(
            "unknown set kind '{other}' (expected radial, fibers, or sublevel)"
        ))),
    }
}

fn resolve_out_dir(flag: &Option<PathBuf>, config: Option<&PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| config.cloned())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn report_json_path(dir: &Path, scenario_id: &str, seed: u64) -> PathBuf {
    dir.join(format!("{scenario_id}-seed{seed}-report.json"))
}

// --- subcommands -----------------------------------------------------------

fn cmd_orbit(args: &OrbitArgs) -> Result<i32> {
    let action = parse_action(&args.action, args.seed)?;
    let v = parse_point(&args.point)?;
    let cloud = orbit(&action, &v, args.budget, args.seed)?;
    let dir = resolve_out_dir(&args.out, None);
    prepare_dir(&dir)?;
    let path = artifact_path(&dir, "orbit", args.seed, "points");
    write_points_csv(cloud.cloud(), &path)?;
    println!("wrote {} ({} points)", path.display(), cloud.points().len());
    Ok(0)
}

fn cmd_slope(args: &SlopeArgs) -> Result<i32> {
    let action = parse_action(&args.action, args.seed)?;
    let set = parse_set(&args.set, action, args.budget, args.seed)?;
    let x = parse_point(&args.point)?;
    let estimate = ascending_slope(&set, &x, args.seed)?;
    let dir = resolve_out_dir(&args.out, None);
    prepare_dir(&dir)?;
    let path = artifact_path(&dir, "slope", args.seed, "table");
    write_slopes_csv(std::slice::from_ref(&estimate), &path)?;
    println!(
        "wrote {} (raw {}, clamped {})",
        path.display(),
        estimate.raw,
        estimate.clamped
    );
    Ok(0)
}

fn cmd_detect(args: &DetectArgs) -> Result<i32> {
    let action = parse_action(&args.action, args.seed)?;
    let set = parse_set(&args.set, action, args.budget, args.seed)?;
    let params = DetectParams {
        probes: args.probes,
        midpoint_pairs: args.pairs,
        seed: args.seed,
        ..DetectParams::default()
    };
    let outcome = convexity_detect(&set, &params)?;

    let mut report = VerificationReport::new("detect", args.seed);
    report.config = Some(serde_json::json!({
        "action": args.action,
        "set": set.descriptor(),
        "probes": args.probes,
        "pairs": args.pairs,
        "seed": args.seed,
    }));
    report.budget("probes", args.probes as u64);
    report.budget("midpoint_pairs", args.pairs as u64);
    report.metric("probes_used", outcome.probes_used as f64, Bound::None);
    report.metric("pairs_used", outcome.pairs_used as f64, Bound::None);
    report.metric("min_slope", outcome.min_slope, Bound::None);
    report.metric(
        "max_midpoint_violation",
        outcome.max_midpoint_violation,
        Bound::None,
    );
    if let Some(w) = &outcome.witness {
        report.metric("witness_violation", w.violation, Bound::None);
    }
    let verdict = serde_json::to_value(outcome.verdict)?;
    report.verdict = verdict.as_str().map(str::to_string);
    report.finalize(false);
    report.status = match outcome.verdict {
        Verdict::ConsistentWithConvex => Status::Pass,
        Verdict::NonconvexWitness => Status::Fail,
        Verdict::NoProbePoints => Status::Unconverged,
    };

    let dir = resolve_out_dir(&args.out, None);
    prepare_dir(&dir)?;
    let slopes_path = artifact_path(&dir, "detect", args.seed, "slopes");
    write_slopes_csv(&outcome.slopes, &slopes_path)?;
    report.artifacts.push(slopes_path.display().to_string());
    if let Some(w) = &outcome.witness {
        let cloud = orbitconv::geom::PointCloud::new(w.points.clone(), None)?;
        let wpath = artifact_path(&dir, "detect", args.seed, "witness");
        write_points_csv(&cloud, &wpath)?;
        report.artifacts.push(wpath.display().to_string());
    }
    let mpath = artifact_path(&dir, "detect", args.seed, "metrics");
    write_metrics_csv(&report, &mpath)?;
    report.artifacts.push(mpath.display().to_string());
    report.write_json(&report_json_path(&dir, "detect", args.seed))?;

    println!("{}", report.to_json()?);
    Ok(match report.status {
        Status::Pass => 0,
        _ => 1,
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            Some(
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };

    let scenario = args
        .scenario
        .clone()
        .or_else(|| config.as_ref().and_then(|c| c.scenario.clone()))
        .ok_or_else(|| {
            Error::Config(format!(
                "no scenario given (positional argument or config file); expected one of: {}",
                SCENARIO_IDS.join(", ")
            ))
        })?;

    // precedence: scenario defaults < config file < command-line flags
    let mut params = default_params(&scenario)?;
    if let Some(cfg) = &config {
        cfg.params.apply(&mut params);
        params.seed = cfg.seed;
    }
    let flags = ParamsPatch {
        n: args.n,
        k: args.k,
        eigenvalues: args.eigenvalues.as_deref().map(parse_floats).transpose()?,
        group: args.group.clone(),
        point: args.point.as_deref().map(parse_floats).transpose()?,
        orbit_budget: args.orbit_budget,
        direction_budget: args.direction_budget,
        pair_budget: args.pair_budget,
        probe_budget: args.probe_budget,
        membership_subset: args.membership_subset,
        hull_tol: args.hull_tol,
        exact_tol: args.exact_tol,
        isometry_tol: args.isometry_tol,
    };
    flags.apply(&mut params);
    if let Some(seed) = args.seed {
        params.seed = seed;
    }

    let dir = resolve_out_dir(
        &args.out,
        config.as_ref().and_then(|c| c.output_dir.as_ref()),
    );
    prepare_dir(&dir)?;
    let report = run_scenario(&scenario, &params, Some(&dir))?;
    report.write_json(&report_json_path(&dir, &scenario, params.seed))?;
    println!("{}", report.to_json()?);

    if report.status == Status::Pass {
        Ok(0)
    } else {
        let failing: Vec<String> = report
            .failing_metrics()
            .iter()
            .map(|m| m.name.clone())
            .collect();
        let status = serde_json::to_value(report.status)?;
        eprintln!(
            "verification did not pass (status {}): {}",
            status.as_str().unwrap_or("?"),
            if failing.is_empty() {
                "no failing metric; run was inconclusive at this budget".to_string()
            } else {
                failing.join(", ")
            }
        );
        Ok(1)
    }
}

fn cmd_report(args: &ReportArgs) -> Result<i32> {
    let mut rows = vec!["scenario_id,seed,status,verdict,failing_metrics".to_string()];
    let mut all_pass = true;
    for path in &args.files {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let report: VerificationReport = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        all_pass &= report.status == Status::Pass;
        let status = serde_json::to_value(report.status)?;
        let failing: Vec<&str> = report
            .failing_metrics()
            .iter()
            .map(|m| m.name.as_str())
            .collect();
        rows.push(format!(
            "{},{},{},{},{}",
            report.scenario_id,
            report.seed,
            status.as_str().unwrap_or("?"),
            report.verdict.as_deref().unwrap_or(""),
            failing.join(";")
        ));
    }
    let table = rows.join("\n") + "\n";
    match &args.out {
        Some(path) => {
            std::fs::write(path, &table)?;
            println!("wrote {}", path.display());
        }
        None => print!("{table}"),
    }
    Ok(if all_pass { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_grammar_accepts_modifiers() {
        assert_eq!(parse_action("S3", 1).unwrap().ambient_dim(), 3);
        assert_eq!(parse_action("SO3:conj", 1).unwrap().ambient_dim(), 6);
        assert_eq!(parse_action("O4:diag3", 1).unwrap().ambient_dim(), 12);
        assert_eq!(parse_action("S3:perm", 1).unwrap().ambient_dim(), 3);
        assert!(parse_action("S3:weird", 1).is_err());
        assert!(parse_action("X9", 1).is_err());
    }

    #[test]
    fn set_grammar_covers_all_kinds() {
        let a = parse_action("O2", 1).unwrap();
        assert!(parse_set("radial:0,1", Arc::clone(&a), 64, 1).is_ok());
        assert!(parse_set("radial:1", Arc::clone(&a), 64, 1).is_err());
        assert!(parse_set("fibers:1,0;0.5,0.5", Arc::clone(&a), 64, 1).is_ok());
        assert!(parse_set("sublevel:1.5;1,0;0,1", Arc::clone(&a), 64, 1).is_ok());
        assert!(parse_set("sublevel:;1,0", Arc::clone(&a), 64, 1).is_err());
        assert!(parse_set("blob:1,2", Arc::clone(&a), 64, 1).is_err());
        assert!(parse_set("radial", a, 64, 1).is_err());
    }

    #[test]
    fn float_lists_parse_and_reject() {
        assert_eq!(parse_floats("3,2,1").unwrap(), vec![3.0, 2.0, 1.0]);
        assert_eq!(parse_floats("").unwrap(), Vec::<f64>::new());
        assert!(parse_floats("1,x").is_err());
    }

    #[test]
    fn patch_overrides_only_given_fields() {
        let mut p = default_params("schur-horn").unwrap();
        let patch = ParamsPatch {
            n: Some(4),
            hull_tol: Some(0.1),
            ..ParamsPatch::default()
        };
        patch.apply(&mut p);
        assert_eq!(p.n, 4);
        assert_eq!(p.hull_tol, 0.1);
        assert_eq!(p.eigenvalues, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn run_config_rejects_unknown_keys() {
        let bad = r#"{"scenario": "schur-horn", "wall_clock": true}"#;
        assert!(serde_json::from_str::<RunConfig>(bad).is_err());
        let bad_params = r#"{"scenario": "schur-horn", "params": {"speed": 9}}"#;
        assert!(serde_json::from_str::<RunConfig>(bad_params).is_err());
        let good = r#"{"scenario": "schur-horn", "params": {"n": 3}, "seed": 5}"#;
        let cfg: RunConfig = serde_json::from_str(good).unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.params.n, Some(3));
    }
}
