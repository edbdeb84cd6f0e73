use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spdc_core::biphoton::{assemble_jsa, f_minus, JsaAxes, Route};
use spdc_core::config::{parse_scenario, Scenario};
use spdc_core::device::{self, rad_to_arcmin};
use spdc_core::grid::Axis;
use spdc_core::hom::{self, HomSetting};
use spdc_core::io;
use spdc_core::wigner::{self, snapped_omega_axis};
use spdc_core::Error;

/// Simulate biphoton states of transversely pumped waveguides.
#[derive(Debug, Parser)]
#[command(name = "spdc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Joint spectral amplitude on the (ω_s, ω_i) grid.
    Jsa {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Phase-matching amplitude f₋ on the ω₋ grid.
    Fminus {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Chronocyclic Wigner function of f₋; metrics go to stdout.
    Wigner {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        /// Write the frequency axis as wavelength-equivalent detuning (m).
        #[arg(long)]
        lambda_units: bool,
        #[arg(long)]
        tau_points: Option<usize>,
        #[arg(long)]
        omega_points: Option<usize>,
    },
    /// Hong-Ou-Mandel coincidence probability for one displacement.
    Hom {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        delay_ps: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        shift_rad_s: f64,
        /// Realize the displacement in the idler arm or on the pump.
        #[arg(long, value_enum, default_value_t = Via::Interferometer)]
        via: Via,
    },
    /// Reconstruct the Wigner function from pump-displaced HOM coincidences.
    Tomography {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 41)]
        tau_points: usize,
        #[arg(long, default_value_t = 41)]
        omega_points: usize,
        /// Writes PREFIX_reconstructed.csv, PREFIX_direct.csv and PREFIX_meta.txt.
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Parse a scenario and print derived quantities per beam.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Also print the fully resolved scenario.
        #[arg(long)]
        canonical: bool,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "finite")]
    route: Route,
    /// Overrides omega_minus_points of the scenario.
    #[arg(long)]
    omega_minus_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Via {
    Interferometer,
    Pump,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 4,
        e if e.is_config() => 2,
        _ => 3,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("SPDC_THREADS") else {
        return Ok(());
    };
    let threads: usize = match value.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(format!("SPDC_THREADS must be a positive integer, got `{value}`")),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("SPDC_THREADS: {e}"))
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let mut scenario = parse_scenario(&text).map_err(|e| match e {
        Error::Syntax { line, column, message } => Error::Syntax {
            line,
            column,
            message: format!("{message} ({})", path.display()),
        },
        Error::Semantic { key, message } => Error::Semantic {
            key,
            message: format!("{message} ({})", path.display()),
        },
        other => other,
    })?;
    if let Some(file) = &scenario.cavity_phase_file {
        let table_path = io::resolve_relative(path, file);
        let table = io::read_cavity_phase(&table_path)
            .map_err(|e| match e {
                Error::Io(err) => Error::Io(std::io::Error::new(err.kind(), format!("cavity_phase_file {}: {err}", table_path.display()))),
                other => other,
            })?;
        scenario.pulse.cavity_phase = Some(table);
    }
    Ok(scenario)
}

fn apply_common(scenario: &mut Scenario, common: &Common) -> Result<(), Failure> {
    if let Some(n) = common.omega_minus_points {
        check_points("--omega-minus-points", n)?;
        scenario.grids.omega_minus_points = n;
    }
    Ok(())
}

fn check_points(flag: &str, n: usize) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::Usage(format!("{flag} must be at least 2, got {n}")));
    }
    Ok(())
}

fn omega_minus_axis(scenario: &Scenario) -> Result<Axis, Error> {
    Axis::symmetric(scenario.grids.omega_minus_halfspan, scenario.grids.omega_minus_points)
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), num)
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Jsa { common, out } => {
            let mut s = load(&common.config)?;
            apply_common(&mut s, &common)?;
            let jsa = assemble_jsa(&s, common.route)?;
            io::write_atomic(&out, &io::jsa_csv(&jsa)?)?;
            Ok(format!("points = {}\nstep_rad_s = {}\n", jsa.axes.len(), num(jsa.axes.step())))
        }
        Command::Fminus { common, out } => {
            let mut s = load(&common.config)?;
            apply_common(&mut s, &common)?;
            let f = f_minus(&s.beams, &s.device, &omega_minus_axis(&s)?, common.route)?;
            io::write_atomic(&out, &io::complex_function_csv(&f, "omega_minus_rad_s")?)?;
            let peak = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            Ok(format!("points = {}\npeak_abs = {}\n", f.axis.len, num(peak)))
        }
        Command::Wigner {
            common,
            out,
            lambda_units,
            tau_points,
            omega_points,
        } => {
            let mut s = load(&common.config)?;
            apply_common(&mut s, &common)?;
            if let Some(n) = tau_points {
                check_points("--tau-points", n)?;
                s.grids.tau_points = n;
            }
            if let Some(n) = omega_points {
                check_points("--omega-points", n)?;
                s.grids.big_omega_points = n;
            }
            let fa = omega_minus_axis(&s)?;
            let f = f_minus(&s.beams, &s.device, &fa, common.route)?;
            let tau = Axis::symmetric(s.grids.tau_halfspan, s.grids.tau_points)?;
            let omega = snapped_omega_axis(&fa, 0.0, s.grids.big_omega_halfspan, s.grids.big_omega_points)?;
            let w = wigner::wigner_transform(&f, &tau, &omega)?;
            let (name, scale) = if lambda_units {
                ("lambda_m", device::detuning_to_lambda(1.0, &s.device))
            } else {
                ("omega_minus_rad_s", 1.0)
            };
            io::write_atomic(&out, &io::real_grid_csv(&w, name, scale)?)?;
            let m = wigner::wigner_metrics(&w)?;
            let mut summary = String::new();
            writeln!(summary, "max = {}", num(m.max_value)).unwrap();
            writeln!(summary, "min = {}", num(m.min_value)).unwrap();
            writeln!(summary, "peaks = {}", m.peaks.len()).unwrap();
            for (k, p) in m.peaks.iter().enumerate() {
                writeln!(summary, "peak_{k} = {} {} {}", num(p.tau), num(p.omega), num(p.value)).unwrap();
            }
            writeln!(summary, "tau_width_s = {}", opt(m.tau_width)).unwrap();
            writeln!(summary, "omega_width_rad_s = {}", opt(m.omega_width)).unwrap();
            writeln!(summary, "negativity_volume = {}", num(m.negativity_volume)).unwrap();
            writeln!(summary, "fringe_period_omega_rad_s = {}", opt(m.fringe_period_omega)).unwrap();
            writeln!(summary, "fringe_period_tau_s = {}", opt(m.fringe_period_tau)).unwrap();
            Ok(summary)
        }
        Command::Hom {
            common,
            delay_ps,
            shift_rad_s,
            via,
        } => {
            let mut s = load(&common.config)?;
            apply_common(&mut s, &common)?;
            let delay = delay_ps * 1e-12;
            let setting = HomSetting::interferometer(delay, shift_rad_s)?;
            let axes = JsaAxes::for_scenario(&s, shift_rad_s.abs())?;
            let p = match via {
                Via::Interferometer => {
                    let jsa = spdc_core::biphoton::assemble_jsa_from(&s.beams, &s.device, &s.pulse, &axes, common.route)?;
                    hom::hom_coincidence(&jsa, &setting)?
                }
                Via::Pump => hom::pump_engineered_coincidence(&s, &axes, common.route, delay, shift_rad_s)?,
            };
            Ok(format!("coincidence = {}\n", num(p)))
        }
        Command::Tomography {
            common,
            tau_points,
            omega_points,
            out_prefix,
        } => {
            check_points("--tau-points", tau_points)?;
            check_points("--omega-points", omega_points)?;
            let mut s = load(&common.config)?;
            apply_common(&mut s, &common)?;
            let fa = omega_minus_axis(&s)?;
            let tau = Axis::symmetric(s.grids.tau_halfspan, tau_points)?;
            let omega = snapped_omega_axis(&fa, 0.0, s.grids.big_omega_halfspan, omega_points)?;
            let r = hom::tomography_scan(&s, &tau, &omega, common.route)?;
            let reconstructed = io::real_grid_csv(&r.reconstructed, "omega_minus_rad_s", 1.0)?;
            let direct = io::real_grid_csv(&r.direct, "omega_minus_rad_s", 1.0)?;
            let meta = io::metadata_text(&[
                ("route".into(), format!("{:?}", common.route).to_lowercase()),
                ("tau_points".into(), tau_points.to_string()),
                ("omega_points".into(), omega_points.to_string()),
                ("affine_gain".into(), num(r.affine_gain)),
                ("tau_offset_s".into(), num(r.tau_offset)),
                ("omega_offset_rad_s".into(), num(r.omega_offset)),
                ("peak".into(), num(r.peak)),
                ("max_abs_error".into(), num(r.max_abs_error)),
                ("rms_error".into(), num(r.rms_error)),
                ("invalid_points".into(), r.invalid_count.to_string()),
            ]);
            let name = |suffix: &str| {
                let mut p = out_prefix.clone().into_os_string();
                p.push(suffix);
                PathBuf::from(p)
            };
            let outputs = [
                (name("_reconstructed.csv"), reconstructed),
                (name("_direct.csv"), direct),
                (name("_meta.txt"), meta.clone()),
            ];
            for (path, text) in &outputs {
                io::write_atomic(path, text)?;
            }
            Ok(meta)
        }
        Command::Validate { config, canonical } => {
            let s = load(&config)?;
            let mut out = String::new();
            let d = &s.device;
            writeln!(out, "theta_deg_arcmin = {}", rad_to_arcmin(d.theta_deg)).unwrap();
            writeln!(out, "k_deg_per_m = {}", num(d.k_deg())).unwrap();
            writeln!(out, "beams = {}", s.beams.len()).unwrap();
            for (k, b) in s.beams.iter().enumerate() {
                writeln!(out, "beam_{k}_spectral_width_rad_s = {}", num(b.spectral_width(d))).unwrap();
                writeln!(out, "beam_{k}_delay_s = {}", num(b.delay(d))).unwrap();
                writeln!(out, "beam_{k}_center_detuning_rad_s = {}", num(b.center_detuning(d))).unwrap();
            }
            if canonical {
                out.push('\n');
                out.push_str(&s.to_canonical_text());
            }
            Ok(out)
        }
    }
}
