//! `biphoton` command-line tool.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use biphoton::braun_twiss::{self, Arm, DetectorTuning};
use biphoton::experiment::{ExperimentFile, StateLiteral};
use biphoton::montecarlo::{self, CountRecord, ExperimentConfig, Observable};
use biphoton::qutrit::{BiphotonState, PolarizationMode, StandardState};
use biphoton::Error;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "biphoton", version, about = "Polarization qutrits of single-mode photon pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitudes, Poincaré pair, degree of polarization and Stokes vector.
    State {
        #[command(flatten)]
        state: StateArgs,
        /// Also evaluate the closed-form angle expressions.
        #[arg(long)]
        diagnose: bool,
    },
    /// Coincidence probabilities for an input and a detector tuning.
    Coincide {
        /// Named state (HV, RL, DD...), "modes A B", "A,B" or a JSON literal.
        #[arg(long)]
        input: String,
        /// Filter modes as "A,B", or a named state such as HV.
        #[arg(long)]
        tuned: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// The seven input/detected combinations of the reference table, as CSV.
    Table {
        /// Simulate counts instead of printing ideal probabilities.
        #[arg(long)]
        mc: bool,
        /// TOML file with a [montecarlo] section.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Coincidence observable: overlap2 or exact.
        #[arg(long)]
        observable: Option<String>,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Singles intensity over all analyzer settings of one arm, as CSV.
    Scan {
        /// Same forms as `coincide --input`.
        #[arg(long)]
        input: String,
        /// Detector arm, 1 or 2.
        #[arg(long, default_value_t = 1)]
        arm: u8,
        /// Polar-angle subdivisions; the azimuth gets twice as many.
        #[arg(long, default_value_t = 36)]
        steps: usize,
    },
    /// One simulated integration of an experiment file, as CSV.
    Mc {
        /// TOML experiment file.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct StateArgs {
    /// Named state: HV, RL, DDb, HH, VV, DD+, DbDb, RR, LL.
    #[arg(long)]
    named: Option<String>,
    /// theta1,phi1,theta2,phi2 in radians, or two mode names "A,B".
    #[arg(long)]
    modes: Option<String>,
    /// Amplitudes as "re,im;re,im;re,im".
    #[arg(long)]
    c: Option<String>,
    /// JSON state literal.
    #[arg(long)]
    literal: Option<String>,
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotNormalized { .. } | Error::ZeroState => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::State { state, diagnose } => cmd_state(&resolve_state_args(&state)?, diagnose),
        Command::Coincide { input, tuned, tol } => {
            cmd_coincide(&parse_input(&input)?, &parse_tuning(&tuned)?, tol)
        }
        Command::Table {
            mc,
            config,
            observable,
            seed,
        } => {
            let mut cfg = match config {
                Some(path) => load_table_config(&path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(o) = observable {
                cfg.observable = o.parse::<Observable>()?;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let rows = montecarlo::reproduce_table(&cfg, mc)?;
            Ok(montecarlo::table_csv(&rows))
        }
        Command::Scan { input, arm, steps } => cmd_scan(&parse_input(&input)?, Arm::from_index(arm)?, steps),
        Command::Mc { config, seed } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| usage(format!("{}: {e}", config.display())))?;
            let mut exp = ExperimentFile::from_toml(&text)?.resolve()?;
            if let Some(s) = seed {
                exp.config.seed = s;
            }
            let rec = montecarlo::run(&exp.input, &exp.tuning, &exp.config)?;
            Ok(format!("{}\n{}\n", CountRecord::CSV_HEADER, rec.csv_row()))
        }
    }
}

fn cmd_state(state: &BiphotonState, diagnose: bool) -> Result<String, Failure> {
    let pair = state.to_modes()?;
    let mut out = String::new();
    for (i, z) in state.amplitudes().iter().enumerate() {
        writeln!(out, "c{} = {:.9},{:.9}", i + 1, z.re, z.im).unwrap();
    }
    for (i, m) in [pair.first, pair.second].iter().enumerate() {
        writeln!(out, "photon{} theta={:.6} phi={:.6}{}", i + 1, m.theta, m.phi, mode_name(m)).unwrap();
    }
    writeln!(out, "global_phase = {:.6}", pair.global_phase).unwrap();
    writeln!(out, "P = {:.6}", state.degree_of_polarization()?).unwrap();
    let s = state.mean_stokes();
    writeln!(out, "stokes = {:.6},{:.6},{:.6}", s[0], s[1], s[2]).unwrap();
    if diagnose {
        let d = state.closed_form_angles();
        match (d.azimuths, d.polar_angles, d.discrepancy) {
            (Some(phi), Some(theta), Some(err)) => {
                writeln!(
                    out,
                    "closed_form phi={:.6},{:.6} theta={:.6},{:.6} discrepancy={:.3e}",
                    phi.0, phi.1, theta.0, theta.1, err
                )
                .unwrap();
                if err > 1e-6 {
                    eprintln!("warning: closed-form angles differ from the quadratic roots by {err:.3e} rad");
                }
            }
            _ => writeln!(out, "closed_form undefined").unwrap(),
        }
    }
    Ok(out)
}

fn cmd_coincide(input: &BiphotonState, tuning: &DetectorTuning, tol: f64) -> Result<String, Failure> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(usage("--tol must be positive"));
    }
    let r = braun_twiss::coincidence_probability(input, tuning);
    let closed = braun_twiss::pairing_probability(input, tuning)?;
    let orthogonal = braun_twiss::orthogonality_test(input, tuning, tol);
    let mut out = String::new();
    writeln!(out, "exact_probability = {:.9}", r.exact_probability).unwrap();
    writeln!(out, "pairing_probability = {:.9}", closed).unwrap();
    writeln!(out, "overlap_squared = {:.9}", r.overlap_squared).unwrap();
    writeln!(out, "same_arm_probability = {:.9}", r.same_arm_probability).unwrap();
    writeln!(out, "orthogonal: {}", if orthogonal { "yes" } else { "no" }).unwrap();
    Ok(out)
}

fn cmd_scan(input: &BiphotonState, arm: Arm, steps: usize) -> Result<String, Failure> {
    if steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    let points = braun_twiss::grid_scan(input, arm, steps);
    let grid = braun_twiss::summarize_scan(&points);
    let closed = braun_twiss::visibility_scan(input, arm);
    let mut out = String::from("theta,phi,intensity\n");
    for p in &points {
        writeln!(out, "{:.6},{:.6},{:.9}", p.theta, p.phi, p.intensity).unwrap();
    }
    writeln!(
        out,
        "# max={:.6} min={:.6} visibility={:.6} closed_form_visibility={:.6} P={:.6}",
        grid.max + 0.0,
        grid.min + 0.0,
        grid.visibility + 0.0,
        closed.visibility + 0.0,
        input.degree_of_polarization()?
    )
    .unwrap();
    Ok(out)
}

fn mode_name(m: &PolarizationMode) -> &'static str {
    use PolarizationMode as M;
    [(M::H, " (H)"), (M::V, " (V)"), (M::D, " (D)"), (M::D_BAR, " (Db)"), (M::R, " (R)"), (M::L, " (L)")]
        .iter()
        .find(|(k, _)| k.same_as(m))
        .map_or("", |(_, n)| n)
}

fn resolve_state_args(args: &StateArgs) -> Result<BiphotonState, Failure> {
    if let Some(name) = &args.named {
        return Ok(name.parse::<StandardState>()?.state());
    }
    if let Some(modes) = &args.modes {
        return parse_mode_list(modes);
    }
    if let Some(c) = &args.c {
        return parse_amplitudes(c);
    }
    if let Some(json) = &args.literal {
        return Ok(StateLiteral::from_json(json)?.resolve()?);
    }
    Err(usage("one of --named, --modes, --c, --literal is required"))
}

/// `theta1,phi1,theta2,phi2` or `A,B`.
fn parse_mode_list(text: &str) -> Result<BiphotonState, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let (u, v) = match parts.as_slice() {
        [a, b] => (a.parse::<PolarizationMode>()?, b.parse::<PolarizationMode>()?),
        [t1, p1, t2, p2] => {
            let num = |s: &str| s.parse::<f64>().map_err(|e| usage(format!("bad angle `{s}`: {e}")));
            (
                PolarizationMode::new(num(t1)?, num(p1)?),
                PolarizationMode::new(num(t2)?, num(p2)?),
            )
        }
        _ => return Err(usage(format!("expected two modes or four angles, got `{text}`"))),
    };
    Ok(BiphotonState::from_modes(&u, &v))
}

/// `re,im;re,im;re,im`.
fn parse_amplitudes(text: &str) -> Result<BiphotonState, Failure> {
    let rows: Vec<&str> = text.split(';').collect();
    if rows.len() != 3 {
        return Err(usage(format!("expected three `re,im` amplitudes, got `{text}`")));
    }
    let mut c = [[0.0; 2]; 3];
    for (slot, row) in c.iter_mut().zip(&rows) {
        let nums: Vec<f64> = row
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| usage(format!("bad amplitude `{row}`: {e}")))?;
        match nums.as_slice() {
            [re, im] => *slot = [*re, *im],
            [re] => *slot = [*re, 0.0],
            _ => return Err(usage(format!("bad amplitude `{row}`"))),
        }
    }
    let literal = StateLiteral {
        c: Some(c),
        ..Default::default()
    };
    Ok(literal.resolve()?)
}

/// Named state, `modes A B`, `A,B`, or a JSON literal.
fn parse_input(text: &str) -> Result<BiphotonState, Failure> {
    let t = text.trim();
    if t.starts_with('{') {
        return Ok(StateLiteral::from_json(t)?.resolve()?);
    }
    if let Some(rest) = t.strip_prefix("modes") {
        let names: Vec<&str> = rest.split_whitespace().collect();
        return parse_mode_list(&names.join(","));
    }
    if t.contains(',') {
        return parse_mode_list(t);
    }
    Ok(t.parse::<StandardState>()?.state())
}

fn parse_tuning(text: &str) -> Result<DetectorTuning, Failure> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once(',') {
        return Ok(DetectorTuning::new(a.parse()?, b.parse()?));
    }
    Ok(DetectorTuning::from_standard(t.parse::<StandardState>()?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableConfigFile {
    #[serde(default)]
    montecarlo: ExperimentConfig,
}

fn load_table_config(path: &PathBuf) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let file: TableConfigFile = toml::from_str(&text).map_err(|e| usage(e.message().to_string()))?;
    file.montecarlo.validate()?;
    Ok(file.montecarlo)
}
