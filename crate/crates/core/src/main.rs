//! Command-line surface: attack evaluation, threshold sweeps, Monte Carlo
//! runs, CSV emission and SVG rendering.
//!
//! Exit codes are a stable contract: 0 success, 1 usage/parse errors,
//! 2 domain violations, 3 I/O failures, 4 malformed input data.

use std::process::exit;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use cvqkd::{
    attack_report, parse_csv, plot::render_svg, run_simulation, threshold_unreachable,
    write_csv, AttackKind, ChannelParams, SimConfig, SweepSpec, VarianceConvention,
};

const EXIT_PARSE: i32 = 1;
const EXIT_DOMAIN: i32 = 2;
const EXIT_IO: i32 = 3;
const EXIT_MALFORMED: i32 = 4;

#[derive(Parser)]
#[command(
    name = "cvqkd",
    version,
    about = "Security analysis of coherent-state CV-QKD against Gaussian individual attacks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one attack against a channel
    Attack(AttackArgs),
    /// Sweep the security thresholds over excess noise and write a CSV
    Thresholds(ThresholdsArgs),
    /// Estimate the conditional variances by seeded protocol simulation
    Montecarlo(MontecarloArgs),
    /// Render a threshold CSV as a self-contained SVG figure
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Clone,
    Anticlone,
    Bma,
    Optimal,
}

impl KindArg {
    fn to_kind(self) -> AttackKind {
        match self {
            KindArg::Clone => AttackKind::Cloning,
            KindArg::Anticlone => AttackKind::Anticloning,
            KindArg::Bma => AttackKind::BellMeasurement,
            KindArg::Optimal => AttackKind::OptimalGaussian,
        }
    }

    fn flag_name(self) -> &'static str {
        match self {
            KindArg::Clone => "clone",
            KindArg::Anticlone => "anticlone",
            KindArg::Bma => "bma",
            KindArg::Optimal => "optimal",
        }
    }
}

#[derive(Args)]
struct AttackArgs {
    /// Attack strategy
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Line transmission η ∈ (0, 1]
    #[arg(long)]
    eta: f64,
    /// Excess noise δ (shot-noise units)
    #[arg(long)]
    delta: f64,
    /// Alice's modulation variance V_A
    #[arg(long)]
    va: f64,
    /// Emit a single-line key-sorted JSON object
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ThresholdsArgs {
    /// Alice's modulation variance V_A
    #[arg(long)]
    va: f64,
    #[arg(long)]
    delta_min: f64,
    #[arg(long)]
    delta_max: f64,
    /// Number of grid points (≥ 2)
    #[arg(long)]
    steps: usize,
    /// Output CSV path
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct MontecarloArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    va: f64,
    /// Protocol rounds (≥ 1000)
    #[arg(long)]
    samples: u64,
    /// RNG seed; identical seeds reproduce reports bit-exactly
    #[arg(long)]
    seed: u64,
    /// Emit a single-line key-sorted JSON object
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// Input threshold CSV
    #[arg(long = "in")]
    input: String,
    /// Output SVG path
    #[arg(long)]
    out: String,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                exit(0);
            }
            eprint!("{err}");
            exit(EXIT_PARSE);
        }
    };
    let code = match cli.command {
        Command::Attack(args) => cmd_attack(&args),
        Command::Thresholds(args) => cmd_thresholds(&args),
        Command::Montecarlo(args) => cmd_montecarlo(&args),
        Command::Plot(args) => cmd_plot(&args),
    };
    exit(code);
}

fn domain_error(err: cvqkd::Error) -> i32 {
    eprintln!("error: {err}");
    EXIT_DOMAIN
}

fn io_error(path: &str, err: std::io::Error) -> i32 {
    eprintln!("error: {path}: {err}");
    EXIT_IO
}

fn json_number(v: f64) -> Value {
    // Non-finite values (e.g. an unreachable threshold) have no JSON number.
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn print_json(entries: Vec<(String, Value)>) {
    let mut map = Map::new();
    for (key, value) in entries {
        map.insert(key, value);
    }
    // serde_json's default map is a BTreeMap, so keys serialize sorted.
    println!("{}", Value::Object(map));
}

fn entry(key: &str, value: Value) -> (String, Value) {
    (key.to_owned(), value)
}

fn cmd_attack(args: &AttackArgs) -> i32 {
    let channel = match ChannelParams::new(args.eta, args.delta, args.va) {
        Ok(c) => c,
        Err(e) => return domain_error(e),
    };
    let report = match attack_report(args.kind.to_kind(), &channel) {
        Ok(r) => r,
        Err(e) => return domain_error(e),
    };
    if args.json {
        print_json(vec![
            entry("kind", Value::from(args.kind.flag_name())),
            entry("eta", json_number(args.eta)),
            entry("delta", json_number(args.delta)),
            entry("v_a", json_number(args.va)),
            entry("theta", json_number(report.theta)),
            entry("v_ba_snu", json_number(report.v_ba)),
            entry("v_be_x_snu", json_number(report.v_be_x)),
            entry("v_be_p_snu", json_number(report.v_be_p)),
            entry("threshold_eta", json_number(report.threshold_eta)),
            entry("secure", Value::from(report.secure)),
        ]);
    } else {
        println!("attack:           {}", report.kind);
        println!("channel:          eta = {}, delta = {}, V_A = {}", args.eta, args.delta, args.va);
        println!("theta:            {:.6} rad", report.theta);
        println!("V(B|A)   [SNU]:   {:.6}", report.v_ba);
        println!("V(B|E)_x [SNU]:   {:.6}", report.v_be_x);
        println!("V(B|E)_p [SNU]:   {:.6}", report.v_be_p);
        if threshold_unreachable(report.threshold_eta) {
            println!(
                "threshold eta:    {:.6} (unreachable: channel cannot be secure at any transmission)",
                report.threshold_eta
            );
        } else {
            println!("threshold eta:    {:.6}", report.threshold_eta);
        }
        println!("secure:           {}", if report.secure { "yes" } else { "no" });
    }
    0
}

fn cmd_thresholds(args: &ThresholdsArgs) -> i32 {
    let spec = match SweepSpec::new(args.va, args.delta_min, args.delta_max, args.steps) {
        Ok(s) => s,
        Err(e) => return domain_error(e),
    };
    let curve = spec.run();
    let csv = write_csv(&curve);
    if let Err(e) = std::fs::write(&args.out, csv) {
        return io_error(&args.out, e);
    }
    println!("wrote {} rows to {}", curve.rows.len(), args.out);
    0
}

fn cmd_montecarlo(args: &MontecarloArgs) -> i32 {
    let channel = match ChannelParams::new(args.eta, args.delta, args.va) {
        Ok(c) => c,
        Err(e) => return domain_error(e),
    };
    let kind = args.kind.to_kind();
    let config = match SimConfig::new(channel, kind, args.samples, args.seed) {
        Ok(c) => c,
        Err(e) => return domain_error(e),
    };
    let empirical = match run_simulation(&config) {
        Ok(r) => r,
        Err(e) => return domain_error(e),
    };
    let analytic = match attack_report(kind, &channel) {
        Ok(r) => r,
        Err(e) => return domain_error(e),
    };

    // Everything below is in shot-noise units; the simulation reports
    // quadrature units internally.
    let to_snu = VarianceConvention::ShotNoiseUnits.from_quadrature();
    let rows = [
        ("v_ba", analytic.v_ba, empirical.v_ba_hat * to_snu, empirical.se_v_ba * to_snu),
        ("v_be_x", analytic.v_be_x, empirical.v_be_x_hat * to_snu, empirical.se_v_be_x * to_snu),
        ("v_be_p", analytic.v_be_p, empirical.v_be_p_hat * to_snu, empirical.se_v_be_p * to_snu),
    ];
    let z = |expected: f64, got: f64, se: f64| if se > 0.0 { (got - expected) / se } else { 0.0 };

    if args.json {
        let mut entries = vec![
            entry("kind", Value::from(args.kind.flag_name())),
            entry("eta", json_number(args.eta)),
            entry("delta", json_number(args.delta)),
            entry("v_a", json_number(args.va)),
            entry("samples", Value::from(empirical.samples)),
            entry("seed", Value::from(args.seed)),
            entry("sifted_x", Value::from(empirical.sifted_x)),
            entry("sifted_p", Value::from(empirical.sifted_p)),
        ];
        for (name, expected, got, se) in rows {
            // three keys per quantity: analytic, empirical, z-score
            entries.push((format!("{name}_snu"), json_number(expected)));
            entries.push((format!("{name}_snu_hat"), json_number(got)));
            entries.push((format!("{name}_z"), json_number(z(expected, got, se))));
        }
        print_json(entries);
    } else {
        println!("Monte Carlo: {} attack", analytic.kind);
        println!("channel:     eta = {}, delta = {}, V_A = {}", args.eta, args.delta, args.va);
        println!(
            "rounds:      {} (seed {}, sifted {} x / {} p)",
            empirical.samples, args.seed, empirical.sifted_x, empirical.sifted_p
        );
        println!("{:<14}{:>12}{:>12}{:>12}{:>9}", "quantity", "analytic", "empirical", "std.err", "z");
        for (name, expected, got, se) in rows {
            println!(
                "{:<14}{:>12.6}{:>12.6}{:>12.6}{:>9.2}",
                format!("{name} [SNU]"),
                expected,
                got,
                se,
                z(expected, got, se)
            );
        }
    }
    0
}

fn cmd_plot(args: &PlotArgs) -> i32 {
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => return io_error(&args.input, e),
    };
    let curve = match parse_csv(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.input);
            return EXIT_MALFORMED;
        }
    };
    let svg = render_svg(&curve);
    if let Err(e) = std::fs::write(&args.out, svg) {
        return io_error(&args.out, e);
    }
    println!("wrote {}", args.out);
    0
}
