use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bia_core::bounds::{
    downlink_cell_bound, optimal_preset_modes, sweep_bound, sweep_csv, uplink_cell_bound,
    BoundResult,
};
use bia_core::converse::{bound_for_cardinalities, build_converse_lp, solve_converse_lp};
use bia_core::model::validate_scheme;
use bia_core::synth::{golden_example, synthesize};
use bia_core::verifier::{monte_carlo, RankBackend};
use bia_core::{
    decimal, fraction, scheme_io, BiaError, BigRational, CellularConfig, Direction, SystemConfig,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bia", version, about = "Sum-DoF bounds and blind alignment schemes for MISO interference channels with preset-mode receivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Network {
    /// Antennas per transmitter
    #[arg(long = "M", value_name = "M")]
    antennas: usize,
    /// Preset modes per receiver
    #[arg(long = "N", value_name = "N")]
    modes: usize,
    /// Number of users
    #[arg(long = "K", value_name = "K")]
    users: usize,
}

impl Network {
    fn config(&self) -> Result<SystemConfig, Failure> {
        Ok(SystemConfig::new(self.antennas, self.modes, self.users)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Linear sum-DoF upper bound and the mode count attaining it
    Bound(BoundArgs),
    /// Bound for every mode count up to --n-max, as CSV
    Sweep {
        #[arg(long = "M", value_name = "M")]
        antennas: usize,
        #[arg(long = "K", value_name = "K")]
        users: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an alignment scheme meeting the bound
    Synth {
        #[arg(long = "M", value_name = "M", required_unless_present = "golden")]
        antennas: Option<usize>,
        #[arg(long = "N", value_name = "N", required_unless_present = "golden")]
        modes: Option<usize>,
        #[arg(long = "K", value_name = "K", required_unless_present = "golden")]
        users: Option<usize>,
        /// Emit a reference scheme (ex3 or ex4) instead
        #[arg(long, conflicts_with_all = ["antennas", "modes", "users"])]
        golden: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scheme document on random channels
    Verify {
        scheme: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, env = "BIA_SEED", default_value_t = 0)]
        seed: u64,
        /// Floating-point SVD ranks instead of exact elimination
        #[arg(long)]
        float: bool,
        /// Print the per-user table of the first trial
        #[arg(long)]
        details: bool,
    },
    /// Solve the converse linear program for a fixed alignment-set size
    Lp {
        #[command(flatten)]
        network: Network,
        #[arg(long = "n", value_name = "n")]
        n: usize,
        /// Write the program in LP text format
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Bound implied by a multiset of alignment-set cardinalities
    Efficiency {
        #[arg(long = "M", value_name = "M")]
        antennas: usize,
        #[arg(long = "K", value_name = "K")]
        users: usize,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        cardinalities: Vec<usize>,
    },
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long = "M", value_name = "M", required_unless_present = "uplink")]
    antennas: Option<usize>,
    #[arg(long = "N", value_name = "N")]
    modes: usize,
    /// Users (interference channel)
    #[arg(long = "K", value_name = "K", required_unless_present = "cell")]
    users: Option<usize>,
    /// Cellular network instead of an interference channel
    #[arg(long, requires = "direction")]
    cell: bool,
    #[arg(long, group = "direction", requires = "cell")]
    downlink: bool,
    #[arg(long, group = "direction", requires = "cell")]
    uplink: bool,
    /// Cells (downlink)
    #[arg(long = "G", value_name = "G", requires = "downlink")]
    cells: Option<usize>,
    /// Users per cell (downlink)
    #[arg(long, requires = "downlink")]
    per_cell_users: Option<usize>,
    /// Antenna counts of one cell's transmitters, e.g. 1,1; repeat per cell (uplink)
    #[arg(long, action = clap::ArgAction::Append, requires = "uplink")]
    cell_antennas: Vec<String>,
}

enum Failure {
    Core(BiaError),
    Usage(String),
    Verification,
}

impl From<BiaError> for Failure {
    fn from(e: BiaError) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Usage(_) => 2,
            Failure::Core(e) => match e {
                BiaError::Parse { .. } | BiaError::SchemaVersionMismatch { .. } => 2,
                BiaError::UnsupportedConfig { .. } | BiaError::NotIntegerCase { .. } => 4,
                _ => 3,
            },
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn bound_line(b: &BoundResult) -> String {
    format!(
        "n*={} bound={} (~{})\nbranch={}\n",
        b.n_star,
        fraction(b.bound),
        decimal(b.bound),
        b.branch.label()
    )
}

fn run_bound(args: BoundArgs) -> Result<String, Failure> {
    if !args.cell {
        let cfg = SystemConfig::new(args.antennas.unwrap_or(0), args.modes, args.users.unwrap_or(0))?;
        return Ok(bound_line(&optimal_preset_modes(cfg)?));
    }
    if args.downlink {
        let (Some(g), Some(k)) = (args.cells, args.per_cell_users) else {
            return Err(Failure::Usage("--downlink needs --G and --per-cell-users".into()));
        };
        let cfg = CellularConfig::new(g, k, args.antennas.unwrap_or(0), args.modes, Direction::Downlink)?;
        return Ok(bound_line(&downlink_cell_bound(cfg)?));
    }
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for raw in &args.cell_antennas {
        let cell = raw
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Usage(format!("bad --cell-antennas value `{raw}`: {e}")))?;
        cells.push(cell);
    }
    if cells.is_empty() {
        return Err(Failure::Usage("--uplink needs at least one --cell-antennas".into()));
    }
    Ok(bound_line(&uplink_cell_bound(&cells, args.modes)?))
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Bound(args) => run_bound(args),
        Command::Sweep {
            antennas,
            users,
            n_max,
            out,
        } => {
            SystemConfig::new(antennas, 1, users)?;
            let csv = sweep_csv(&sweep_bound(antennas, users, n_max)?);
            emit(&out, &csv)?;
            Ok(String::new())
        }
        Command::Synth {
            antennas,
            modes,
            users,
            golden,
            out,
        } => {
            let scheme = match golden {
                Some(name) => golden_example(&name)?,
                None => synthesize(SystemConfig::new(
                    antennas.unwrap_or(0),
                    modes.unwrap_or(0),
                    users.unwrap_or(0),
                )?)?,
            };
            emit(&out, &scheme_io::save(&scheme))?;
            Ok(String::new())
        }
        Command::Verify {
            scheme,
            trials,
            seed,
            float,
            details,
        } => {
            let scheme = scheme_io::load(&read(&scheme)?)?;
            let violations = validate_scheme(&scheme);
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("{}: {v}", v.code());
                }
                return Err(Failure::Core(BiaError::InvalidScheme(format!(
                    "{} structural violation(s)",
                    violations.len()
                ))));
            }
            let backend = if float { RankBackend::float() } else { RankBackend::Exact };
            let report = monte_carlo(&scheme, trials, seed, backend)?;
            let mut text = format!("{}\n", report.summary());
            if details {
                text.push_str(&report.trials[0].report.to_text());
            }
            for t in report.trials.iter().filter(|t| !t.report.passed) {
                let users: Vec<String> = t
                    .report
                    .per_user
                    .iter()
                    .filter(|u| !u.passed())
                    .map(|u| u.receiver.to_string())
                    .collect();
                text.push_str(&format!(
                    "trial {} seed {}: failing users {}\n",
                    t.trial,
                    t.seed,
                    users.join(",")
                ));
            }
            if report.all_passed() {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::Verification)
            }
        }
        Command::Lp { network, n, export } => {
            let cfg = network.config()?;
            let lp = build_converse_lp(cfg, n)?;
            if let Some(path) = &export {
                emit(&Some(path.clone()), &lp.to_lp_text())?;
            }
            let opt = solve_converse_lp(&lp)?;
            let closed = bia_core::bounds::ldof_function(cfg.antennas, cfg.users, n)?;
            let closed_big = BigRational::new((*closed.numer()).into(), (*closed.denom()).into());
            let gap = &opt - &closed_big;
            Ok(format!(
                "lp_opt={} closed_form={} gap={}\n",
                big_fraction(&opt),
                fraction(closed),
                big_fraction(&gap)
            ))
        }
        Command::Efficiency {
            antennas,
            users,
            cardinalities,
        } => {
            let value = bound_for_cardinalities(antennas, users, &cardinalities)?;
            Ok(format!("{} (~{})\n", fraction(value), decimal(value)))
        }
    }
}

fn big_fraction(r: &BigRational) -> String {
    if r.denom() == &1.into() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {}: {e}", e.code()),
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
