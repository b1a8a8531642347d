mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hcw_core::lower_bounds::GridVariant;

#[derive(Debug, Parser)]
#[command(name = "hcw", version, about = "Parameterized clique-width toolkit")]
pub struct Cli {
    /// Seed for randomized drivers (ChaCha8).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    /// Output format for graphs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph from a named family.
    Generate {
        #[arg(value_enum)]
        family: Family,
        sizes: Vec<usize>,
        /// Take this many disjoint copies.
        #[arg(long)]
        copies: Option<usize>,
        /// Edge survival probability for partial k-trees.
        #[arg(long, default_value_t = 0.7)]
        keep: f64,
        /// Write the witnessing decomposition of a partial k-tree here.
        #[arg(long)]
        td_out: Option<PathBuf>,
    },
    /// Strong product of two graphs.
    Product { left: PathBuf, right: PathBuf },
    /// r-th power of a graph.
    Power {
        graph: PathBuf,
        r: usize,
        #[arg(long)]
        reflexive: bool,
    },
    /// Build an expression with one of the constructions.
    Build {
        #[command(subcommand)]
        what: BuildCommand,
    },
    /// Convert between expressions and product embeddings.
    Convert {
        #[command(subcommand)]
        what: ConvertCommand,
    },
    /// Interpret a binary formula on a colored graph.
    Interpret {
        #[arg(long)]
        g: PathBuf,
        /// File with the formula as an s-expression.
        #[arg(long)]
        xi: PathBuf,
    },
    /// Synthesize an expression valued xi(G) for G inside Q ⊠ M.
    Synthesize(SynthesizeArgs),
    /// Search the deparameterized value for a bi-induced half-graph of order k.
    CheckStable {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
    /// Perturbations and the color lower-bound audit.
    LowerBound {
        #[command(subcommand)]
        what: LowerBoundCommand,
    },
    /// Leaf encoding of colors and factor-recovery formulas.
    Backwards {
        #[command(subcommand)]
        what: BackwardsCommand,
    },
    /// Evaluate an expression and compare its value with a graph.
    Verify {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        against: PathBuf,
        /// Parameter graph; defaults to the `.params.json` sidecar of the expression, then to
        /// the complete reflexive graph on the parameters used.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Graph vertex of each value vertex; defaults to the `.map.json` sidecar, then identity.
        #[arg(long)]
        vertex_map: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Path,
    Cycle,
    Grid2d,
    Grid3d,
    PinnedGrid,
    HalfGraph,
    PartialKTree,
}

#[derive(Debug, Subcommand)]
pub enum BuildCommand {
    /// Five-color expression for the a x b grid over a reflexive path.
    GridExpr { a: usize, b: usize },
    /// Expression for the n x n x n grid over a reflexive path.
    Grid3dExpr { n: usize },
    /// Expression over a reflexive path given by breadth-first layers of a connected graph.
    Layered {
        graph: PathBuf,
        #[arg(long)]
        params_out: Option<PathBuf>,
        #[arg(long)]
        map_out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConvertCommand {
    /// Value of an expression with its embedding into (params) ⊠ (deparameterized value).
    ExprToProduct {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        params: PathBuf,
    },
    /// Expression valued the induced subgraph of params ⊠ M, M given by an expression.
    ProductToExpr {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        m_expr: PathBuf,
    },
    /// Rewrite an expression over the reflexive r-th power of a path into one over a path.
    ContractPower {
        r: usize,
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        params_out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(long)]
    pub q: PathBuf,
    #[arg(long)]
    pub m: PathBuf,
    #[arg(long)]
    pub td: PathBuf,
    #[arg(long)]
    pub g: PathBuf,
    #[arg(long)]
    pub xi: PathBuf,
    #[arg(long)]
    pub r: usize,
    #[arg(long, default_value_t = 2)]
    pub q_type: usize,
    #[arg(long, default_value_t = 16)]
    pub r_sep_cap: usize,
    /// Where to write the report (stdout if absent).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum LowerBoundCommand {
    /// Run the lower-bound argument on one expression.
    Audit {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        perturbation: PathBuf,
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Grid vertex of each value vertex (identity if absent).
        #[arg(long)]
        vertex_map: Option<PathBuf>,
    },
    /// Apply a perturbation to a graph.
    Perturb {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        perturbation: PathBuf,
    },
    /// Random perturbation with k classes on the given number of vertices.
    RandomPerturbation {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        k: usize,
        /// Probability of flipping each pair of classes.
        #[arg(long, default_value_t = 0.5)]
        flip: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Grid3d,
    Pinned,
}

impl From<VariantArg> for GridVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Grid3d => GridVariant::Grid3d,
            VariantArg::Pinned => GridVariant::Pinned,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum BackwardsCommand {
    /// Add c(v)+1 pendant leaves to every vertex (colors 1..=k).
    EncodeColors {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        k: usize,
        /// Write the decoding formulas here, one per line.
        #[arg(long)]
        formulas: Option<PathBuf>,
    },
    /// Formulas recovering rows and columns of a colored strong product.
    FactorFormulas {
        #[arg(long)]
        c1: usize,
        #[arg(long)]
        c2: usize,
        #[arg(long)]
        universal_color: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
