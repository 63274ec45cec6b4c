use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mgg::derivation::{derive, Selector};
use mgg::encoding::gasket_raster_with;
use mgg::grammar::{parse_grammar, GrammarFile};
use mgg::par::Exec;
use mgg::production::swap_census_with;
use mgg::report::{
    render_analysis, render_census, render_derivation, render_graph_encoding, render_production_encoding, Report,
};
use mgg::sequence::{
    coherence_with, g_congruence, image_report, initial_digraph_report, sequence_compatibility, Permutation,
};
use mgg::MggError;

/// Matrix graph grammar analyses.
#[derive(Parser)]
#[command(name = "mgg", version)]
struct Cli {
    /// Grammar file (needed by analyze, derive and encode).
    #[arg(short, long, global = true)]
    grammar: Option<PathBuf>,
    /// Run every kernel on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Static analysis of a rule sequence.
    Analyze {
        #[arg(long)]
        sequence: String,
        #[arg(long, value_enum)]
        check: Check,
        /// Permutation for the congruence check.
        #[arg(long, value_enum, default_value_t = Mode::Advance)]
        mode: Mode,
    },
    /// Apply a sequence to a host graph.
    Derive {
        #[arg(long)]
        host: String,
        #[arg(long)]
        sequence: String,
        /// `first`, `all` (list every match, apply the first) or a match index.
        #[arg(long, default_value = "first", value_parser = parse_select)]
        select: Select,
    },
    /// Dyadic encoding of a host graph or a production.
    Encode(EncodeTarget),
    /// Group all productions over a few nodes by their swap.
    Census {
        #[arg(long)]
        nodes: usize,
    },
    /// Write the Sierpinski raster as a plain PBM file.
    Gasket {
        #[arg(long)]
        bits: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct EncodeTarget {
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    production: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Coherence,
    Initial,
    Image,
    Compatibility,
    Congruence,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Advance,
    Delay,
}

#[derive(Clone, Copy)]
enum Select {
    First,
    All,
    Index(usize),
}

fn parse_select(text: &str) -> Result<Select, String> {
    match text {
        "first" => Ok(Select::First),
        "all" => Ok(Select::All),
        _ => text
            .parse()
            .map(Select::Index)
            .map_err(|_| format!("expected `first`, `all` or a match index, got `{text}`")),
    }
}

/// Outcome of a command: the report and whether it passed.
struct Outcome {
    report: Report,
    ok: bool,
}

fn load(path: Option<&PathBuf>) -> Result<GrammarFile, String> {
    let path = path.ok_or("this command needs --grammar FILE")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_grammar(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let fail = |e: MggError| e.to_string();
    match &cli.command {
        Command::Analyze { sequence, check, mode } => {
            let g = load(cli.grammar.as_ref())?;
            let s = g.sequence(sequence).map_err(fail)?;
            let analysis = match check {
                Check::Coherence => coherence_with(&s, exec),
                Check::Initial => initial_digraph_report(&s),
                Check::Image => image_report(&s),
                Check::Compatibility => sequence_compatibility(&s),
                Check::Congruence => {
                    let perm = match mode {
                        Mode::Advance => Permutation::Advance,
                        Mode::Delay => Permutation::Delay,
                    };
                    g_congruence(&s, perm).map_err(fail)?
                }
            };
            Ok(Outcome {
                ok: analysis.ok,
                report: render_analysis(&s, &analysis),
            })
        }
        Command::Derive { host, sequence, select } => {
            let g = load(cli.grammar.as_ref())?;
            let s = g.sequence(sequence).map_err(fail)?;
            let h = g.host(host).map_err(fail)?;
            let selector = match select {
                Select::First | Select::All => Selector::First,
                Select::Index(k) => Selector::Index(*k),
            };
            let steps: Vec<_> = s.rules.iter().map(|p| (p, selector.clone())).collect();
            let d = derive(h, &steps);
            Ok(Outcome {
                ok: d.completed(),
                report: render_derivation(host, h, &s, &d, matches!(select, Select::All)),
            })
        }
        Command::Encode(target) => {
            let g = load(cli.grammar.as_ref())?;
            let report = match (&target.graph, &target.production) {
                (Some(name), _) => render_graph_encoding(name, g.host(name).map_err(fail)?),
                (_, Some(name)) => render_production_encoding(g.production(name).map_err(fail)?),
                (None, None) => unreachable!("clap requires one target"),
            };
            Ok(Outcome { report, ok: true })
        }
        Command::Census { nodes } => {
            let census = swap_census_with(*nodes, exec).map_err(fail)?;
            Ok(Outcome {
                report: render_census(&census),
                ok: true,
            })
        }
        Command::Gasket { bits, out } => {
            let bitmap = gasket_raster_with(*bits, exec).map_err(fail)?;
            std::fs::write(out, bitmap.to_pbm()).map_err(|e| format!("{}: {e}", out.display()))?;
            let mut report = Report::new();
            report
                .field("command", "gasket")
                .field("bits", bits)
                .field("size", format!("{}x{}", bitmap.width(), bitmap.height()))
                .field("set pixels", bitmap.count_set())
                .field("out", out.display());
            Ok(Outcome { report, ok: true })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
