//! Command-line front end: realizability checking and synthesis, an
//! interactive play session against a synthesized strategy, and random
//! specification generation.
//!
//! Exit codes: 0 realizable, 1 unrealizable, 2 error. The verdict goes to
//! stdout; diagnostics go to stderr.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ltlf_synth::compose::{synthesize, ConjunctOrder, Mode, SynthOptions, Verdict};
use ltlf_synth::game::ChoiceOrder;
use ltlf_synth::gen::random_spec;
use ltlf_synth::ltlf::SynthesisSpec;
use ltlf_synth::strategy::MooreStrategy;
use ltlf_synth::Limits;

#[derive(Parser)]
#[command(name = "ltlf-synth", version, about = "LTLf reactive synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide realizability and synthesize a strategy.
    Synth(SynthArgs),
    /// Synthesize, then play interactively against the strategy.
    Play(SynthArgs),
    /// Generate a random specification (spec + partition files).
    Gen(GenArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Formula file (the whole file is one formula).
    spec: PathBuf,
    /// Partition file; defaults to the spec path with a `.part` extension.
    #[arg(long)]
    part: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Incremental)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = OrderArg::Given)]
    order: OrderArg,
    /// Skip the per-conjunct realizability pass.
    #[arg(long)]
    skip_precheck: bool,
    /// Keep winning regions unminimized.
    #[arg(long)]
    no_minimize: bool,
    /// Exhaustively verify the synthesized strategy.
    #[arg(long)]
    verify: bool,
    /// Write the synthesized strategy as DOT.
    #[arg(long, value_name = "PATH")]
    dot_strategy: Option<PathBuf>,
    /// Write the final winning-region DFA as DOT.
    #[arg(long, value_name = "PATH")]
    dot_dfa: Option<PathBuf>,
    /// State-count guard for all constructions.
    #[arg(long, value_name = "N")]
    max_states: Option<usize>,
    /// Print a machine-readable stats line.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    conjuncts: usize,
    /// Connective budget per conjunct.
    #[arg(long, default_value_t = 6)]
    size: usize,
    #[arg(long, default_value_t = 2)]
    inputs: usize,
    #[arg(long, default_value_t = 2)]
    outputs: usize,
    /// Output path prefix; writes `<out>.ltlf` and `<out>.part`.
    #[arg(long, value_name = "PREFIX")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Individual,
    Incremental,
    Monolithic,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Given,
    SizeAsc,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Synth(args) => run_synth(&args),
        Command::Play(args) => run_play(&args),
        Command::Gen(args) => run_gen(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_spec(args: &SynthArgs) -> Result<SynthesisSpec> {
    let part_path = args
        .part
        .clone()
        .unwrap_or_else(|| args.spec.with_extension("part"));
    let formula_text = fs::read_to_string(&args.spec)
        .with_context(|| format!("cannot read spec file '{}'", args.spec.display()))?;
    let partition_text = fs::read_to_string(&part_path)
        .with_context(|| format!("cannot read partition file '{}'", part_path.display()))?;
    SynthesisSpec::parse(formula_text.trim(), &partition_text)
        .map_err(|e| anyhow!("{e}"))
        .with_context(|| format!("invalid specification '{}'", args.spec.display()))
}

fn options(args: &SynthArgs) -> Result<SynthOptions> {
    let mut limits = Limits::default();
    if let Some(n) = args.max_states {
        if n == 0 {
            bail!("--max-states must be positive");
        }
        limits.max_states = n;
    }
    Ok(SynthOptions {
        mode: match args.mode {
            ModeArg::Individual => Mode::Individual,
            ModeArg::Incremental => Mode::Incremental,
            ModeArg::Monolithic => Mode::Monolithic,
        },
        order: match args.order {
            OrderArg::Given => ConjunctOrder::Given,
            OrderArg::SizeAsc => ConjunctOrder::SizeAsc,
        },
        skip_precheck: args.skip_precheck,
        no_minimize: args.no_minimize,
        verify: args.verify,
        limits,
        choice_order: ChoiceOrder::Ascending,
        debug_check_invariant: false,
    })
}

fn write_exports(args: &SynthArgs, verdict: &Verdict) -> Result<()> {
    if let Some(path) = &args.dot_strategy {
        match &verdict.strategy {
            Some(strategy) => fs::write(path, strategy.to_dot())
                .with_context(|| format!("cannot write '{}'", path.display()))?,
            None => eprintln!("note: no strategy to export (unrealizable)"),
        }
    }
    if let Some(path) = &args.dot_dfa {
        match &verdict.region {
            Some(region) => fs::write(path, region.to_dot())
                .with_context(|| format!("cannot write '{}'", path.display()))?,
            None => eprintln!("note: no winning region to export (unrealizable)"),
        }
    }
    Ok(())
}

fn run_synth(args: &SynthArgs) -> Result<ExitCode> {
    let spec = load_spec(args)?;
    let opts = options(args)?;
    let verdict = synthesize(&spec, &opts)?;
    println!(
        "{}",
        if verdict.realizable {
            "REALIZABLE"
        } else {
            "UNREALIZABLE"
        }
    );
    println!("provenance={}", verdict.provenance);
    if args.stats {
        println!("stats {}", verdict.stats);
    }
    write_exports(args, &verdict)?;
    Ok(ExitCode::from(if verdict.realizable { 0 } else { 1 }))
}

fn run_play(args: &SynthArgs) -> Result<ExitCode> {
    let spec = load_spec(args)?;
    let opts = options(args)?;
    let verdict = synthesize(&spec, &opts)?;
    if verdict.strategy.is_none() {
        println!("UNREALIZABLE");
        eprintln!("nothing to play: the specification is unrealizable");
        return Ok(ExitCode::from(1));
    }
    write_exports(args, &verdict)?;
    let strategy = verdict.strategy.expect("checked above");
    play_session(&strategy, std::io::stdin().lock(), &mut std::io::stdout())?;
    Ok(ExitCode::SUCCESS)
}

/// Terminal loop: print the agent's output (the agent moves first), read
/// one environment assignment per line (space-separated input names,
/// absent means false), announce HALT when the goal is reached.
fn play_session(strategy: &MooreStrategy, input: impl BufRead, out: &mut impl Write) -> Result<()> {
    let alphabet = strategy.alphabet().clone();
    let mut state = strategy.init();
    let mut lines = input.lines();
    loop {
        writeln!(out, "agent: {}", alphabet.fmt_y(strategy.output(state)))?;
        out.flush()?;
        let env_move = loop {
            eprint!("env> ");
            let Some(line) = lines.next() else {
                return Ok(()); // EOF ends the session
            };
            let line = line?;
            let line = line.trim();
            if line == "quit" {
                return Ok(());
            }
            match alphabet.parse_assignment(line, true) {
                Ok(letter) => break letter,
                Err(e) => eprintln!("{e}; inputs are: {}", alphabet.inputs().join(" ")),
            }
        };
        let step = strategy
            .step(state, env_move)
            .expect("session only steps non-halting states");
        if step.halted {
            writeln!(out, "HALT")?;
            out.flush()?;
            return Ok(());
        }
        state = step.next;
    }
}

fn run_gen(args: &GenArgs) -> Result<ExitCode> {
    if args.conjuncts == 0 || args.size == 0 || args.outputs == 0 {
        bail!("--conjuncts, --size and --outputs must be positive");
    }
    let generated = random_spec(
        args.seed,
        args.conjuncts,
        args.size,
        args.inputs,
        args.outputs,
    );
    let spec_path = with_added_extension(&args.out, "ltlf");
    let part_path = with_added_extension(&args.out, "part");
    fs::write(&spec_path, format!("{}\n", generated.formula))
        .with_context(|| format!("cannot write '{}'", spec_path.display()))?;
    fs::write(&part_path, &generated.partition)
        .with_context(|| format!("cannot write '{}'", part_path.display()))?;
    eprintln!("wrote {} and {}", spec_path.display(), part_path.display());
    Ok(ExitCode::SUCCESS)
}

fn with_added_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut path = prefix.to_path_buf();
    path.set_extension(ext);
    path
}
