//! `stackgrid` command-line tool.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stackgrid::output::{
    certificate_json, emit_off, emit_report, parse_input, parse_realize_document, realize_document, weights_document,
};
use stackgrid::pipeline::{bound_exponents, ceil_hundredths, run_pipeline, PipelineOptions};
use stackgrid::tree_model::{balance_weights, gen_lowerbound_graph, gen_tree, Gadget, LowerBoundKind, TreeShape};
use stackgrid::verifier::certify;

const EXIT_INVALID: u8 = 2;
const EXIT_UNCERTIFIED: u8 = 3;

#[derive(Parser)]
#[command(name = "stackgrid", version, about = "Integer realizations of stacked polytopes")]
struct Cli {
    /// Worker threads for verification.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a tree-representation or a lower-bound graph.
    Gen(GenArgs),
    /// Compute balanced face-weights of a tree.
    Balance(IoArgs),
    /// Realize a tree or graph with integer coordinates.
    Realize(RealizeArgs),
    /// Re-check a realization written by `realize`.
    Verify(IoArgs),
    /// Print the exponents of the coordinate bounds for d = 3..10.
    Stats,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Random,
    Serpentine,
    #[value(name = "balanced_rounds")]
    BalancedRounds,
    B3,
    Gamma,
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetArg {
    Serpentine,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Off,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "random")]
    shape: Shape,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Number of vertices; rounds for `balanced_rounds`; a multiple of 36 for
    /// `gamma`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shape of the trees glued into the faces of `gamma`.
    #[arg(long, value_enum, default_value = "serpentine")]
    gadget: GadgetArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IoArgs {
    /// Input file; standard input if omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RealizeArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Dimension for graph input without a `dim` field.
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

struct Failure {
    code: u8,
    message: String,
}

fn invalid(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.to_string(),
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<Vec<u8>, Failure> {
    match path {
        Some(p) => fs::read(p).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf).map_err(invalid)?;
            Ok(buf)
        }
    }
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    let res = match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    };
    res.map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })
}

fn gen(args: &GenArgs) -> Result<String, Failure> {
    let need_n = || args.n.ok_or_else(|| invalid("--n is required for this shape"));
    let tree_shape = match args.shape {
        Shape::Random => Some(TreeShape::Random),
        Shape::Serpentine => Some(TreeShape::Serpentine),
        Shape::BalancedRounds => Some(TreeShape::BalancedRounds),
        Shape::B3 | Shape::Gamma => None,
    };
    if let Some(shape) = tree_shape {
        let n = need_n()?;
        let size = match shape {
            TreeShape::BalancedRounds => n,
            _ => n
                .checked_sub(args.dim)
                .filter(|&k| k > 0)
                .ok_or_else(|| invalid(format!("--n must exceed the dimension {}", args.dim)))?,
        };
        let tree = gen_tree(shape, args.dim, size, args.seed).map_err(invalid)?;
        return Ok(format!("{}\n", tree.to_json()));
    }
    if args.dim != 3 {
        return Err(invalid("b3 and gamma are 3-dimensional"));
    }
    let (kind, n) = match args.shape {
        Shape::B3 => (LowerBoundKind::B3, 20),
        _ => (LowerBoundKind::Gamma, need_n()?),
    };
    let gadget = match args.gadget {
        GadgetArg::Serpentine => Gadget::Serpentine,
        GadgetArg::Random => Gadget::Random { seed: args.seed },
    };
    let t = gen_lowerbound_graph(kind, n, gadget).map_err(invalid)?;
    let faces: Vec<String> = t.faces.iter().map(|f| format!("[{},{},{}]", f[0], f[1], f[2])).collect();
    let graph = t.graph.to_json();
    Ok(format!(
        "{{\"dim\":3,{},\"faces\":[{}]}}\n",
        &graph[1..graph.len() - 1],
        faces.join(",")
    ))
}

fn verification_pool(threads: Option<usize>) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(1))
        .build()
        .expect("thread pool")
}

fn realize(args: &RealizeArgs, threads: Option<usize>) -> Result<(), Failure> {
    let input = parse_input(&read_input(&args.io.input)?, args.dim).map_err(invalid)?;
    // Only the certificate is computed in the verification pool.
    let run = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool")
        .install(|| run_pipeline(&input.tree, PipelineOptions::default()))
        .map_err(|e| Failure {
            code: EXIT_UNCERTIFIED,
            message: format!("stage {} failed: {e}", e.stage()),
        })?;
    let cert = verification_pool(threads).install(|| certify(run.realization(), &input.tree));
    let text = match args.format {
        Format::Json => realize_document(&run, input.labels.as_deref(), true),
        Format::Off => {
            eprint!("{}", emit_report(&run.report, true));
            emit_off(run.realization()).map_err(invalid)?
        }
    };
    write_output(&args.io.output, &text)?;
    if !cert.all_ok() {
        return Err(Failure {
            code: EXIT_UNCERTIFIED,
            message: format!("certificate failed: {}", certificate_json(&cert)),
        });
    }
    Ok(())
}

fn verify(args: &IoArgs, threads: Option<usize>) -> Result<(), Failure> {
    let (tree, r) = parse_realize_document(&read_input(&args.input)?).map_err(invalid)?;
    let cert = verification_pool(threads).install(|| certify(&r, &tree));
    write_output(&args.output, &format!("{}\n", certificate_json(&cert)))?;
    if cert.all_ok() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_UNCERTIFIED,
            message: "certificate failed".into(),
        })
    }
}

fn stats() -> String {
    let mut out = String::from("d\tnon-z exponent\tz exponent\n");
    for d in 3..=10 {
        let (a, b) = bound_exponents(d);
        out.push_str(&format!("{d}\t{}\t{}\n", ceil_hundredths(a), ceil_hundredths(b)));
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Gen(args) => write_output(&args.output, &gen(args)?),
        Command::Balance(args) => {
            let input = parse_input(&read_input(&args.input)?, 3).map_err(invalid)?;
            write_output(&args.output, &weights_document(&balance_weights(&input.tree)))
        }
        Command::Realize(args) => realize(args, cli.threads),
        Command::Verify(args) => verify(args, cli.threads),
        Command::Stats => write_output(&None, &stats()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("stackgrid: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
