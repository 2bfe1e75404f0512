use clap::{Args, Parser, Subcommand};
use scenario_gne::config::{LoadedConfig, Provenance};
use scenario_gne::equilibrium::uncoupled_invariants;
use scenario_gne::scenario::{run_certify, Certificate, CertifyOptions};
use scenario_gne::selftest::run_selftest;
use scenario_gne::svg::{Band, Chart, Series};
use scenario_gne::validation::{
    empirical_violation, grid_equilibrium_set, normalized_length_sweep, write_sweep_csv, SweepRow, ViolationReport,
};
use scenario_gne::GneError;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "scenario-gne", version, about = "A-posteriori robustness certificates for sampled-constraint GNEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample, solve and certify; prints the certificate as JSON.
    Certify(RunArgs),
    /// Normalized equilibrium-set length over a grid of sample sizes.
    SweepK(RunArgs),
    /// Certify, grid the equilibrium set and estimate violation frequencies.
    Validate(RunArgs),
    /// Run the built-in checks on the two-player example.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(Serialize)]
struct ViolationSummary<'a> {
    n_probes: usize,
    n_fresh: usize,
    set_violation: f64,
    max_frequency: f64,
    argmax_mu: Option<f64>,
    epsilon_bound: Option<f64>,
    certificate: &'a Certificate,
}

fn init_threads() {
    if let Ok(v) = std::env::var("SCENARIO_GNE_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size the worker pool: {e}");
                }
            }
            _ => log::warn!("ignoring SCENARIO_GNE_THREADS={v:?}"),
        }
    }
}

fn load(args: &RunArgs) -> Result<(LoadedConfig, PathBuf), GneError> {
    let mut loaded = LoadedConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        loaded.config.seed = seed;
    }
    let out = args.out.clone().unwrap_or_else(|| loaded.config.output_dir.clone());
    std::fs::create_dir_all(&out)?;
    Ok((loaded, out))
}

fn write_json<T: Serialize>(path: &Path, prov: &Provenance, body: &T) -> Result<String, GneError> {
    let text = serde_json::to_string_pretty(&Stamped { provenance: prov, body })?;
    std::fs::write(path, format!("{text}\n"))?;
    Ok(text)
}

fn options(loaded: &LoadedConfig) -> CertifyOptions {
    CertifyOptions {
        tol: loaded.config.tolerances,
        singleton_policy: loaded.config.singleton_policy,
    }
}

fn certify_step(loaded: &LoadedConfig) -> Result<(scenario_gne::scenario::ScenarioProgram, scenario_gne::equilibrium::EquilibriumInvariants, Certificate), GneError> {
    let c = &loaded.config;
    run_certify(&loaded.game, &c.sampler, c.k, c.beta, c.seed, &options(loaded))
}

fn cmd_certify(args: &RunArgs) -> Result<(), GneError> {
    let (loaded, out) = load(args)?;
    let (_, _, cert) = certify_step(&loaded)?;
    let text = write_json(&out.join("certificate.json"), &loaded.provenance(), &cert)?;
    println!("{text}");
    Ok(())
}

fn cmd_sweep(args: &RunArgs) -> Result<(), GneError> {
    let (loaded, out) = load(args)?;
    let c = &loaded.config;
    let tol = c.tolerances;
    let inv = uncoupled_invariants(&loaded.game, &tol)?;
    let mut grid = c.k_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let rows = normalized_length_sweep(&loaded.game, &inv, &c.sampler, &grid, c.trials, c.seed, &tol)?;
    let prov = loaded.provenance();

    let mut csv = Vec::new();
    csv.extend_from_slice(prov.csv_comment().as_bytes());
    csv.push(b'\n');
    write_sweep_csv(&mut csv, &rows)?;
    std::fs::write(out.join("sweep_k.csv"), &csv)?;
    write_json(&out.join("sweep_k.json"), &prov, &SweepDoc { rows: &rows })?;
    std::fs::write(out.join("sweep_k.svg"), sweep_chart(&rows, &prov).render())?;

    if args.json {
        println!("{}", serde_json::to_string_pretty(&Stamped { provenance: &prov, body: &SweepDoc { rows: &rows } })?);
    } else {
        for r in &rows {
            println!("K = {:>6}  mean = {:.6}  std = {:.6}", r.k, r.mean, r.std);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    rows: &'a [SweepRow],
}

fn sweep_chart(rows: &[SweepRow], prov: &Provenance) -> Chart {
    Chart {
        title: "Normalized size of the equilibrium set".into(),
        x_label: "K".into(),
        y_label: "|Omega_K| / |Omega_0|".into(),
        log_x: true,
        series: vec![Series {
            label: "mean".into(),
            points: rows.iter().map(|r| (r.k as f64, r.mean)).collect(),
            color: "#1f77b4",
            dashed: false,
        }],
        bands: vec![Band {
            points: rows.iter().map(|r| (r.k as f64, r.mean - r.std, r.mean + r.std)).collect(),
            color: "#1f77b4",
        }],
        comment: Some(prov.csv_comment().trim_start_matches("# ").to_string()),
    }
}

fn violation_chart(report: &ViolationReport, prov: &Provenance) -> Chart {
    let mut series = vec![Series {
        label: "empirical".into(),
        points: report.grid.iter().zip(&report.per_point).map(|(p, f)| (p.mu, *f)).collect(),
        color: "#1f77b4",
        dashed: false,
    }];
    if let Some(eps) = report.epsilon_bound {
        series.push(Series {
            label: "epsilon(s_K)".into(),
            points: vec![(0.0, eps), (1.0, eps)],
            color: "#d62728",
            dashed: true,
        });
    }
    Chart {
        title: "Theoretical and empirical violation probability".into(),
        x_label: "mu".into(),
        y_label: "violation probability".into(),
        series,
        comment: Some(prov.csv_comment().trim_start_matches("# ").to_string()),
        ..Default::default()
    }
}

fn cmd_validate(args: &RunArgs) -> Result<(), GneError> {
    let (loaded, out) = load(args)?;
    let c = &loaded.config;
    let tol = c.tolerances;
    let prov = loaded.provenance();
    let (prog, inv, cert) = certify_step(&loaded)?;
    write_json(&out.join("certificate.json"), &prov, &cert)?;
    let probes = grid_equilibrium_set(&loaded.game, &inv, &prog.combined, c.granularity, &tol)?;
    let mut report = empirical_violation(&probes, &c.sampler, c.n_fresh, c.seed, &tol)?;
    report.epsilon_bound = Some(cert.epsilon_sk);

    let mut csv = Vec::new();
    csv.extend_from_slice(prov.csv_comment().as_bytes());
    csv.push(b'\n');
    report.write_csv(&mut csv)?;
    std::fs::write(out.join("violation.csv"), &csv)?;
    let summary = ViolationSummary {
        n_probes: report.grid.len(),
        n_fresh: report.n_fresh,
        set_violation: report.set_violation,
        max_frequency: report.max_frequency(),
        argmax_mu: report.argmax_mu(),
        epsilon_bound: report.epsilon_bound,
        certificate: &cert,
    };
    let text = write_json(&out.join("violation.json"), &prov, &summary)?;
    std::fs::write(out.join("violation.svg"), violation_chart(&report, &prov).render())?;

    if args.json {
        println!("{text}");
    } else {
        println!(
            "s_K = {}  v_K = {}  epsilon(s_K) = {:.6}",
            cert.s_k, cert.v_k, cert.epsilon_sk
        );
        println!(
            "{} probes, {} fresh draws: max frequency {:.6}, set violation {:.6}",
            summary.n_probes, summary.n_fresh, summary.max_frequency, summary.set_violation
        );
    }
    Ok(())
}

fn cmd_selftest(seed: u64, json: bool) -> Result<bool, GneError> {
    let checks = run_selftest(seed);
    if json {
        println!("{}", serde_json::to_string_pretty(&checks)?);
    } else {
        for c in &checks {
            println!("{c}");
        }
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn report_error(e: &GneError, json: bool) -> ExitCode {
    let code = if e.is_numerical() { 1 } else { 2 };
    if json {
        let kind = if code == 1 { "numerical" } else { "config" };
        eprintln!("{}", serde_json::json!({ "error": kind, "message": e.to_string() }));
    } else {
        eprintln!("error: {e}");
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_threads();
    let cli = Cli::parse();
    let (result, json) = match &cli.command {
        Command::Certify(a) => (cmd_certify(a).map(|_| true), a.json),
        Command::SweepK(a) => (cmd_sweep(a).map(|_| true), a.json),
        Command::Validate(a) => (cmd_validate(a).map(|_| true), a.json),
        Command::Selftest { seed, json } => (cmd_selftest(*seed, *json), *json),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => report_error(&e, json),
    }
}
