use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gravkerr::analytic::{cr_bound_rs, cr_bound_rs_general_q, qfi_general_q, qfi_kerr};
use gravkerr::fock::{numeric_qfi, StepPolicy};
use gravkerr::interferometer::{
    monte_carlo_estimate, quadrature_bound_rs, sql_bound_rs, squeezed_lossy_bound, validity_metric,
    SqueezedProbe, LINEARIZATION_THRESHOLD,
};
use gravkerr::runner::feasibility::{
    chi_from_material, chi_from_single_photon_phase, nonlinear_regime, peak_power,
    report_improvement, y_tilde,
};
use gravkerr::runner::{run_sweep, write_csv, Config, SweepRow};
use gravkerr::{KerrVariant, Result};

#[derive(Parser)]
#[command(
    name = "gravkerr",
    version,
    about = "Schwarzschild-radius error bounds for a Kerr-nonlinear interferometer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON configuration; built-in desk-scale defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic and Fock-space QFI with respect to τ.
    Qfi {
        #[command(flatten)]
        common: Common,
        /// Evolution time; overrides probe.tau_s.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Error bounds on r_s at one operating point.
    Bound {
        #[command(flatten)]
        common: Common,
    },
    /// Photon-number × χ sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo check of the homodyne estimator.
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Material nonlinearity, pulse power and improvement estimates.
    Feasibility {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<Config> {
    match &common.config {
        Some(path) => Config::from_path(path),
        None => Ok(Config::default()),
    }
}

fn sink(out: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// Flat key/value records as JSON or two-column CSV.
fn emit(common: &Common, value: Value) -> Result<()> {
    let mut out = sink(common.out.as_ref())?;
    match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &value)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "key,value")?;
            if let Value::Object(map) = value {
                for (k, v) in map {
                    let cell = match v {
                        Value::Null => String::new(),
                        Value::String(s) => s,
                        Value::Number(n) => match n.as_f64() {
                            Some(x) if !n.is_u64() && !n.is_i64() => format!("{x:.16e}"),
                            _ => n.to_string(),
                        },
                        other => other.to_string(),
                    };
                    writeln!(out, "{k},{cell}")?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn qfi(common: &Common, tau: Option<f64>) -> Result<()> {
    let cfg = load(common)?;
    let probe = cfg.probe()?;
    let tau = tau.unwrap_or(cfg.probe.tau_s);
    let analytic = match probe.variant {
        KerrVariant::ShiftedQuadratic => qfi_kerr(&probe)?,
        KerrVariant::Monomial => qfi_general_q(&probe)?,
    };
    let numeric = numeric_qfi(&probe, tau, StepPolicy::default())?;
    let rel = if analytic.value == 0.0 {
        numeric.value.abs()
    } else {
        (numeric.value / analytic.value - 1.0).abs()
    };
    emit(
        common,
        json!({
            "photon_number": probe.photon_number(),
            "omega": probe.omega,
            "chi": probe.chi,
            "tau": tau,
            "analytic": analytic.value,
            "analytic_asymptotic": analytic.asymptotic,
            "numeric": numeric.value,
            "numeric_coarse": numeric.coarse,
            "numeric_refined": numeric.refined,
            "dtau": numeric.dtau,
            "cutoff": numeric.cutoff,
            "relative_difference": rel,
        }),
    )
}

fn bound(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let probe = cfg.probe()?;
    let g = cfg.geometry()?;
    let plan = cfg.plan();
    let m = plan.repetitions;
    let fisher = match probe.variant {
        KerrVariant::ShiftedQuadratic => cr_bound_rs(&probe, &g, m)?,
        KerrVariant::Monomial => cr_bound_rs_general_q(&probe, &g, m)?,
    };
    let metric = validity_metric(&probe, &g);
    let valid = metric <= cfg.sweep.validity_threshold;
    let quadrature = quadrature_bound_rs(&probe, &g, &plan)?;
    let n = probe.photon_number();
    let sq = SqueezedProbe::from_squeezed_photons(0.5 * n, 0.5 * n, cfg.sweep.squeezed_eps)?;
    emit(
        common,
        json!({
            "photon_number": n,
            "chi": probe.chi,
            "n_prime": g.n_prime,
            "delta": g.delta(),
            "y_tilde": y_tilde(&probe, g.n_prime).ok(),
            "bound_fisher": fisher.relative_error,
            "bound_quadrature": if valid { Some(quadrature.relative_error) } else { None },
            "bound_sql": sql_bound_rs(&probe, &g, m)?.relative_error,
            "bound_squeezed_lossy": squeezed_lossy_bound(&sq, &g, probe.omega, m)?.relative_error,
            "validity_metric": metric,
            "valid_flag": valid,
        }),
    )
}

fn sweep(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let spec = cfg.sweep_spec()?;
    let rows: Vec<SweepRow> = run_sweep(&spec)?;
    let out = sink(common.out.as_ref().or(spec.output.as_ref()))?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(&rows, out),
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &json!({ "spec": spec, "rows": rows }))?;
            writeln!(out)?;
            Ok(())
        }
    }
}

fn mc(common: &Common, trials: usize, seed: u64) -> Result<()> {
    let cfg = load(common)?;
    let stats = monte_carlo_estimate(&cfg.probe()?, &cfg.geometry()?, &cfg.plan(), trials, seed)?;
    let Value::Object(mut map) = serde_json::to_value(&stats)? else {
        unreachable!()
    };
    map.insert(
        "std_over_bound".into(),
        json!(stats.std_relative / stats.predicted_relative),
    );
    emit(common, Value::Object(map))
}

fn feasibility(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let f = &cfg.feasibility;
    let input = cfg.feasibility_input();
    let [phi_lo, phi_hi] = f.single_photon_phase_rad;
    let power = peak_power(
        f.photon_number,
        f.omega_rad_per_s,
        f.pulse_duration_s,
        f.repetition_rate_hz,
    )?;
    let probe = cfg.probe()?;
    let g = cfg.geometry()?;
    let y = y_tilde(&probe, g.n_prime)?;
    let improvement = report_improvement(&probe, &g, cfg.plan.repetitions)?;
    emit(
        common,
        json!({
            "chi_material": chi_from_material(&input)?,
            "chi_fibre_low": chi_from_single_photon_phase(phi_lo, f.fibre_length_m, f.fibre_index)?,
            "chi_fibre_high": chi_from_single_photon_phase(phi_hi, f.fibre_length_m, f.fibre_index)?,
            "peak_power_w": power.peak_w,
            "average_power_w": power.average_w,
            "y_tilde": y,
            "regime": nonlinear_regime(y),
            "improvement_over_sql": improvement.ratio,
            "bound_sql": improvement.sql,
            "bound_quadrature": improvement.quadrature,
            "linearization_threshold": LINEARIZATION_THRESHOLD,
        }),
    )
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Qfi { common, tau } => qfi(&common, tau),
        Command::Bound { common } => bound(&common),
        Command::Sweep { common } => sweep(&common),
        Command::Mc {
            common,
            trials,
            seed,
        } => mc(&common, trials, seed),
        Command::Feasibility { common } => feasibility(&common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gravkerr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
