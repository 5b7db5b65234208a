use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use majorana_teleport::config::{LoadedConfig, Postselect, RunConfig};
use majorana_teleport::kitaev::{spectrum, ChainKind, ChainSpec, Level, OffsetConvention};
use majorana_teleport::logical::six_braids;
use majorana_teleport::noise::{draw_rng, monte_carlo_teleport};
use majorana_teleport::report::run_experiment;
use majorana_teleport::state::{DensityMatrix, C64};
use majorana_teleport::teleport::{initial_state, InputState, TeleportProgram, INPUT_QUBIT};
use majorana_teleport::tomography::{expectations_from_state, fidelity, reconstruct};
use majorana_teleport::verify::verify_all;
use majorana_teleport::Error;

#[derive(Parser)]
#[command(name = "mzmtele", version, about = "Majorana zero mode braiding and teleportation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct RunArgs {
    /// JSON run configuration; the shipped default when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict the run to one input state (0, 1, +, -, +i, -i).
    #[arg(long)]
    input: Option<String>,
    /// ns, es or both.
    #[arg(long, value_parser = parse_postselect)]
    postselect: Option<Postselect>,
}

#[derive(Subcommand)]
enum Command {
    /// The six elementary braids of two chains and their logical gates.
    Braids,
    /// Eigenvalues of a single chain.
    Spectrum {
        #[arg(long, value_enum, default_value = "kitaev")]
        kind: Kind,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, value_enum, default_value = "raw")]
        convention: Convention,
    },
    /// Monte Carlo teleportation fidelities and report files.
    Teleport {
        #[command(flatten)]
        run: RunArgs,
        /// Report directory; overrides the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tomographic reconstruction of one teleported (or prepared) state.
    Tomo {
        #[command(flatten)]
        run: RunArgs,
        /// Simulated measurements per Pauli basis; exact expectations when omitted.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, value_enum, default_value = "output")]
        stage: Stage,
    },
    /// Runs the symbolic identity suite.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Kitaev,
    Trivial,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Raw,
    Shifted,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    /// The input qubit right after preparation.
    Input,
    /// The teleported qubit.
    Output,
}

fn parse_postselect(s: &str) -> Result<Postselect, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidNoise(_) | Error::Json(_) => Failure::Config(e.to_string()),
            e => Failure::Run(e.to_string()),
        }
    }
}

fn load(args: &RunArgs) -> Result<LoadedConfig, Failure> {
    let mut loaded = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::shipped(),
    };
    let c = &mut loaded.config;
    if let Some(d) = args.draws {
        c.draws = d;
    }
    if let Some(s) = args.seed {
        c.seed = s;
    }
    if let Some(i) = &args.input {
        c.inputs = vec![i.clone()];
    }
    if let Some(p) = args.postselect {
        c.postselect = p;
    }
    c.validate()?;
    Ok(loaded)
}

fn fmt_c(z: C64) -> String {
    let z = C64::new(z.re + 0.0, z.im + 0.0);
    format!("{:+.4}{:+.4}i", z.re, z.im)
}

fn print_matrix(m: &nalgebra::DMatrix<C64>, indent: &str) {
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| fmt_c(m[(r, c)])).collect();
        println!("{indent}[{}]", row.join("  "));
    }
}

fn cmd_braids() -> Result<(), Failure> {
    for row in six_braids(2)? {
        let (name, exp) = match &row.gate {
            Some(g) => (g.name(), g.exponential()),
            None => ("?".into(), "not a braid gate".into()),
        };
        println!("{}  {}  {}  {}", row.name, row.spin, name, exp);
        print_matrix(&row.action.matrix, "    ");
    }
    Ok(())
}

fn levels_line(levels: &[Level]) -> String {
    levels
        .iter()
        .map(|l| {
            let e = format!("{}", (l.energy * 1e9).round() / 1e9 + 0.0);
            if l.multiplicity > 1 {
                format!("{e} (\u{d7}{})", l.multiplicity)
            } else {
                e
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_spectrum(kind: Kind, n: usize, t: f64, convention: Convention) -> Result<(), Failure> {
    let kind = match kind {
        Kind::Kitaev => ChainKind::Kitaev,
        Kind::Trivial => ChainKind::Trivial,
    };
    let offset = match convention {
        Convention::Raw => OffsetConvention::Raw,
        Convention::Shifted => OffsetConvention::Shifted,
    };
    let spec = ChainSpec::new(n, t, kind, offset).map_err(|e| Failure::Config(e.to_string()))?;
    let levels = spectrum(&spec).map_err(|e| Failure::Config(e.to_string()))?;
    println!("energy,multiplicity");
    for l in &levels {
        println!("{:.9},{}", (l.energy * 1e9).round() / 1e9 + 0.0, l.multiplicity);
    }
    println!("{}", levels_line(&levels));
    Ok(())
}

fn cmd_teleport(args: &RunArgs, out: Option<PathBuf>) -> Result<(), Failure> {
    let loaded = load(args)?;
    let dir = out.unwrap_or_else(|| loaded.config.output_dir.clone());
    let run = run_experiment(&loaded)?;
    print!("{}", run.fidelity_csv());
    for p in run.write(&dir)? {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn print_tomography(label: &str, rho: &DensityMatrix, input: &InputState, shots: Option<u64>, seed: u64) -> Result<(), Failure> {
    let bloch = expectations_from_state(rho, shots, &mut draw_rng(seed, u64::MAX))?;
    let est = reconstruct(&bloch)?;
    println!("{label}");
    println!("  bloch ({:+.4}, {:+.4}, {:+.4})", bloch.x, bloch.y, bloch.z);
    print_matrix(est.matrix(), "  ");
    println!("  fidelity {:.6}", fidelity(&est, &input.ket())?);
    Ok(())
}

fn cmd_tomo(args: &RunArgs, shots: Option<u64>, stage: Stage) -> Result<(), Failure> {
    let loaded = load(args)?;
    let cfg = &loaded.config;
    for input in cfg.input_states()? {
        if stage == Stage::Input {
            let rho = initial_state(&input).reduced_density(&[INPUT_QUBIT])?;
            print_tomography(&format!("input {input}, prepared"), &rho, &input, shots, cfg.seed)?;
            continue;
        }
        let program = TeleportProgram::compile()?;
        let est = monte_carlo_teleport(&input, &program, &cfg.noise_params()?, cfg.draws, cfg.seed)?;
        if cfg.postselect.ns() {
            print_tomography(&format!("input {input}, ns"), &est.ns.mean_rho, &input, shots, cfg.seed)?;
        }
        if cfg.postselect.es() {
            print_tomography(&format!("input {input}, es"), &est.es.mean_rho, &input, shots, cfg.seed)?;
        }
    }
    Ok(())
}

fn cmd_verify() -> Result<bool, Failure> {
    let report = verify_all()?;
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        println!("{mark} [{}] {}: {}", c.group, c.name, c.detail);
    }
    println!("{} of {} identities verified", report.verified(), report.checks.len());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Braids => cmd_braids().map(|_| true),
        Command::Spectrum { kind, n, t, convention } => cmd_spectrum(kind, n, t, convention).map(|_| true),
        Command::Teleport { run, out } => cmd_teleport(&run, out).map(|_| true),
        Command::Tomo { run, shots, stage } => cmd_tomo(&run, shots, stage).map(|_| true),
        Command::Verify => cmd_verify(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
