use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

use output::Format;

#[derive(Parser)]
#[command(name = "stabgap", version, about = "Stabilizer entropies and average magic gaps of subspace embeddings")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Host space `(d, n)` with an optional flavor override.
#[derive(Args, Clone, Debug)]
pub struct Space {
    /// Local dimension of each qudit.
    #[arg(long)]
    pub d: usize,
    /// Number of qudits.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// odd | even | multiqubit (default: inferred from d and n).
    #[arg(long)]
    pub flavor: Option<String>,
}

#[derive(Args, Clone, Copy, Debug)]
pub struct Mode {
    /// Exact computation.
    #[arg(long, conflicts_with = "mc")]
    pub exact: bool,
    /// Monte Carlo estimate.
    #[arg(long)]
    pub mc: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Stabilizer entropies of single states.
    #[command(subcommand)]
    Se(SeCmd),
    /// Intrinsic and extrinsic averages.
    #[command(subcommand)]
    Ase(AseCmd),
    /// Average gaps (extrinsic minus intrinsic).
    #[command(subcommand)]
    Gap(GapCmd),
    /// Analysis of an isotropic set and its codespace.
    Code(CodeArgs),
    /// Extremize the average over subspaces.
    #[command(subcommand)]
    Optimize(OptimizeCmd),
    /// Monte Carlo estimates, convergence curves and ensemble statistics.
    #[command(subcommand)]
    Mc(McCmd),
    /// Support on the orthogonal complement.
    #[command(subcommand)]
    Complement(ComplementCmd),
    /// Worked examples.
    #[command(subcommand)]
    Examples(ExamplesCmd),
}

#[derive(Subcommand)]
pub enum SeCmd {
    /// Entropies of a named, random or explicit state.
    State {
        #[command(flatten)]
        space: Space,
        /// zero | plus | t | h | strange | random
        #[arg(long, default_value = "zero", conflicts_with = "amplitudes")]
        state: String,
        /// JSON list of [re, im] amplitudes.
        #[arg(long)]
        amplitudes: Option<String>,
        /// Renyi orders to report besides the linear entropy.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Upper bound of the Renyi stabilizer entropy over all states.
    Bound {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
    },
}

#[derive(Subcommand)]
pub enum AseCmd {
    /// Haar average over the whole space.
    Intrinsic {
        #[command(flatten)]
        space: Space,
    },
    /// Average over the range of a projector read from JSON.
    Projector {
        file: PathBuf,
        #[command(flatten)]
        common: AseCommon,
    },
    /// Average over the range of an isometry read from JSON.
    Embedding {
        file: PathBuf,
        #[command(flatten)]
        common: AseCommon,
    },
}

#[derive(Args, Clone, Debug)]
pub struct AseCommon {
    /// Flavor of the intrinsic reference (default: single qudit of dimension d_S).
    #[arg(long)]
    pub small_flavor: Option<String>,
    #[command(flatten)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Subcommand)]
pub enum GapCmd {
    /// Gap of a stabilizer codespace.
    Code(CodeArgs),
    /// Gap of a projector read from JSON.
    Projector {
        file: PathBuf,
        #[command(flatten)]
        common: AseCommon,
    },
    /// Expected gap of a Haar-random subspace.
    Random {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        d_small: usize,
        #[arg(long)]
        small_flavor: Option<String>,
    },
}

#[derive(Args, Clone, Debug)]
pub struct CodeArgs {
    /// Built-in code: 422 or 412.
    #[arg(long, conflicts_with = "file")]
    pub builtin: Option<String>,
    /// Isotropic-set JSON.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub small_flavor: Option<String>,
}

#[derive(Subcommand)]
pub enum OptimizeCmd {
    /// Minimize or maximize over subspaces of one dimension.
    Extremize {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        d_small: usize,
        #[arg(long)]
        maximize: bool,
        #[command(flatten)]
        opt: OptArgs,
        /// Save the best embedding as JSON.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Minimum and maximum for a range of subspace dimensions.
    Sweep {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = 1)]
        from: usize,
        /// Last subspace dimension (default: host dimension).
        #[arg(long)]
        to: Option<usize>,
        #[command(flatten)]
        opt: OptArgs,
    },
}

#[derive(Args, Clone, Copy, Debug)]
pub struct OptArgs {
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 300)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub mode: Mode,
    /// Samples for the Monte Carlo objective.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Subcommand)]
pub enum McCmd {
    /// Estimate the average of a projector or embedding.
    Ase {
        #[arg(long, conflicts_with = "embedding", required_unless_present = "embedding")]
        projector: Option<PathBuf>,
        #[arg(long)]
        embedding: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Independent runs of `samples` each.
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Median squared error against the exact value as samples grow.
    Curve {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        d_small: usize,
        #[arg(long, value_delimiter = ',', default_value = "16,64,256,1024,4096")]
        grid: Vec<usize>,
        #[arg(long, default_value_t = 21)]
        repetitions: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Mean and spread of the average over Haar-random subspaces.
    Ensemble {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        d_small: usize,
        #[arg(long, default_value_t = 750)]
        subspaces: usize,
        #[command(flatten)]
        mode: Mode,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
pub enum ComplementCmd {
    /// Best complement vector for one state of the subspace.
    PerState {
        #[arg(long)]
        embedding: PathBuf,
        /// Subspace amplitudes as JSON [re, im] pairs (default: Haar random).
        #[arg(long)]
        amplitudes: Option<String>,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// One complement vector for the whole subspace.
    Fixed {
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
pub enum ExamplesCmd {
    /// Ground space of a frustration-free three-site model.
    Gss,
    /// Spin j as 2j symmetrized qubits against separable qubits.
    SymQubits {
        #[arg(long, default_value = "3")]
        max_spin: String,
        /// Also estimate the separable average by sampling.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 20000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Majorana stars of a spin state and the product-state round trip.
    Majorana {
        #[arg(long)]
        spin: String,
        #[arg(long)]
        amplitudes: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Spin-0 sector of identical spins on the faces of a polyhedron.
    Polyhedron {
        #[arg(long)]
        faces: usize,
        #[arg(long)]
        spin: String,
        #[command(flatten)]
        mode: Mode,
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Z_d gauge-invariant subspace.
    Gauge {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
    /// The [[4,2,2]] code and its [[4,1,2]] subcode.
    #[command(name = "422")]
    Code422,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let report = match cli.command {
        Command::Se(c) => commands::se(c),
        Command::Ase(c) => commands::ase(c),
        Command::Gap(c) => commands::gap(c),
        Command::Code(a) => commands::code(&a),
        Command::Optimize(c) => commands::optimize(c),
        Command::Mc(c) => commands::mc(c),
        Command::Complement(c) => commands::complement(c),
        Command::Examples(c) => commands::examples(c),
    };
    let text = match report {
        Ok(r) => r.render(cli.format),
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
