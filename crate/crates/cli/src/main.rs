mod repl;

use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hornkit::logic::{builtin, load_rules, Logic};
use hornkit::session::script::Script;
use hornkit::session::solve::Equation;
use hornkit::session::{protocol, DEFAULT_DEPTH, DEFAULT_NODES};
use hornkit::tactic::Limits;
use hornkit::unify::UnifyOptions;

#[derive(Parser)]
#[command(name = "hornkit", version, about = "Interactive proof kernel for Horn-clause logics")]
struct Cli {
    /// Logic: a built-in name (bare, fol, ctt) or a rule file.
    #[arg(long, global = true, default_value = "fol")]
    logic: String,
    /// Unification depth bound.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH)]
    depth: u32,
    /// Search node bound for depth-first tactics.
    #[arg(long, global = true, default_value_t = DEFAULT_NODES)]
    nodes: usize,
    /// Print Skolem parameters in full.
    #[arg(long, global = true)]
    no_skolem_compress: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive prompt reading commands from standard input.
    Repl,
    /// Replay a proof script against a rule file.
    Check { rulefile: PathBuf, script: PathBuf },
    /// List the unifiers of two terms.
    Solve {
        lhs: String,
        rhs: String,
        /// Number of unifiers to print.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Serve the session protocol on localhost.
    Serve {
        #[arg(long, default_value_t = 7878)]
        port: u16,
    },
}

pub fn resolve_logic(arg: &str) -> Result<Logic, String> {
    if let Some(l) = builtin(arg) {
        return Ok(l);
    }
    let path = Path::new(arg);
    let src = std::fs::read_to_string(path).map_err(|e| format!("cannot read logic `{arg}`: {e}"))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
    load_rules(name, &src).map_err(|e| format!("{arg}: {e}"))
}

fn run(cli: Cli) -> Result<(), String> {
    let limits = Limits {
        unify: UnifyOptions::bounded(cli.depth),
        max_nodes: Some(cli.nodes),
    };
    let compress = !cli.no_skolem_compress;
    match cli.command {
        Command::Repl => {
            let logic = resolve_logic(&cli.logic)?;
            repl::run(logic, limits, compress).map_err(|e| e.to_string())
        }
        Command::Check { rulefile, script } => {
            let logic = resolve_logic(&rulefile.to_string_lossy())?;
            let src = std::fs::read_to_string(&script).map_err(|e| format!("{}: {e}", script.display()))?;
            let mut s = Script::parse(&src)
                .and_then(|sc| sc.replay(logic, limits))
                .map_err(|e| format!("{}: {e}", script.display()))?;
            s.compress = compress;
            print!("{}", s.show().map_err(|e| e.to_string())?);
            let done = s.goal().is_some_and(|g| g.is_theorem());
            println!("{}: {}", script.display(), if done { "proved" } else { "replayed, goals remain" });
            Ok(())
        }
        Command::Solve { lhs, rhs, count } => {
            let logic = resolve_logic(&cli.logic)?;
            let eq = Equation::parse(&logic.sig, &lhs, &rhs).map_err(|e| e.to_string())?;
            let (sols, more) = eq.page(limits.unify, 0, count).map_err(|e| e.to_string())?;
            for (k, s) in sols.iter().enumerate() {
                println!("unifier {}:\n{s}", k + 1);
            }
            if sols.is_empty() {
                println!("no unifiers");
            } else if more {
                println!("(more unifiers; raise --count)");
            }
            Ok(())
        }
        Command::Serve { port } => {
            let logic = resolve_logic(&cli.logic)?;
            let listener = TcpListener::bind(("127.0.0.1", port)).map_err(|e| e.to_string())?;
            let addr = listener.local_addr().map_err(|e| e.to_string())?;
            println!("listening on {addr}");
            protocol::serve(listener, logic, limits, compress).map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
