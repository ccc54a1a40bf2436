//! `fmtlab`: command-line front end for the finite model theory workbench.

mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fmtlab_core::Error;

#[derive(Parser, Debug)]
#[command(name = "fmtlab", version, about = "Finite structures, homomorphisms, cores, games and the core model structure")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Args, Debug, Clone)]
pub struct Budget {
    /// Search-node limit for each homomorphism search or game.
    #[arg(long, default_value_t = 10_000_000)]
    pub node_limit: u64,
}

#[derive(Args, Debug, Clone)]
pub struct PoolArgs {
    /// The pool is every structure with at most this many elements.
    #[arg(long, default_value_t = 3)]
    pub pool_cap: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a structure file and print its canonical document.
    Validate { a: String },
    /// Product of two structures.
    Product { a: String, b: String },
    /// Coproduct (amalgamated over the constants) of two structures.
    Coproduct { a: String, b: String },
    /// Equalizer of two parallel morphisms.
    Equalizer { f: String, g: String },
    /// Coequalizer of two parallel morphisms.
    Coequalizer { f: String, g: String },
    /// Initial structure of a vocabulary.
    FreeTerm {
        #[arg(long, default_value = "graph")]
        vocab: String,
    },
    /// Terminal structure of a vocabulary.
    Top {
        #[arg(long, default_value = "graph")]
        vocab: String,
    },
    /// Expand by fresh constants naming a tuple.
    Expand {
        a: String,
        #[arg(long)]
        tuple: String,
    },
    /// Gaifman graph.
    Gaifman { a: String },
    /// Induced neighborhood of a tuple, with the tuple as constants.
    Neighborhood {
        a: String,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        tuple: String,
    },
    /// Tree-depth of the Gaifman graph, optionally over a set.
    Treedepth {
        a: String,
        #[arg(long)]
        over: Option<String>,
    },
    /// Search for a homomorphism.
    Hom {
        a: String,
        b: String,
        /// Pins `x=y,...`.
        #[arg(long)]
        pin: Option<String>,
        #[arg(long)]
        surjective: bool,
        #[arg(long)]
        injective: bool,
        /// List every homomorphism.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        budget: Budget,
    },
    /// Search for a retraction onto a set of elements.
    Retract {
        a: String,
        #[arg(long)]
        onto: String,
        #[command(flatten)]
        budget: Budget,
    },
    /// Core, optionally over a set of elements.
    Core {
        a: String,
        #[arg(long)]
        over: Option<String>,
    },
    /// Quotient a directory of structures by homomorphic equivalence.
    Poset {
        dir: String,
        #[arg(long)]
        over: Option<String>,
    },
    /// Evaluate a formula.
    Eval {
        a: String,
        formula: String,
        /// Free-variable assignment `x=a,...`.
        #[arg(long)]
        assign: Option<String>,
    },
    /// Quantifier rank.
    Qr { formula: String },
    /// Syntactic class.
    Classify { formula: String },
    /// Canonical structure of a primitive-positive sentence.
    CanonicalStructure {
        formula: String,
        /// Vocabulary; inferred from the formula when omitted.
        #[arg(long)]
        vocab: Option<String>,
    },
    /// Canonical primitive-positive formula of a structure.
    CanonicalSentence {
        c: String,
        #[arg(long)]
        over: Option<String>,
    },
    /// Bounded primitive-positive test family.
    PpTests {
        #[arg(long, default_value = "graph")]
        vocab: String,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        size_cap: usize,
    },
    /// Whether every bounded pp-test true in A holds in B.
    PreservesPp {
        a: String,
        b: String,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        over: Option<String>,
        #[arg(long, default_value_t = 3)]
        size_cap: usize,
    },
    /// Ehrenfeucht-Fraisse game.
    Ef {
        a: String,
        b: String,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        tuple_a: Option<String>,
        #[arg(long)]
        tuple_b: Option<String>,
        #[command(flatten)]
        budget: Budget,
    },
    /// k-homomorphism via the existential game.
    Khom {
        a: String,
        b: String,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        over: Option<String>,
    },
    /// k-core relative to a pool of small structures.
    Kcore {
        a: String,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        over: Option<String>,
        #[command(flatten)]
        pool: PoolArgs,
    },
    /// Hanf-style bijection between neighborhoods.
    Hanf {
        a: String,
        b: String,
        #[arg(short)]
        d: usize,
        #[arg(long, default_value = "iso")]
        equiv: String,
        #[arg(long)]
        tuple_a: Option<String>,
        #[arg(long)]
        tuple_b: Option<String>,
    },
    /// Premise of Gaifman locality.
    GaifmanCheck {
        a: String,
        b: String,
        #[arg(short)]
        d: usize,
        #[arg(long, default_value = "iso")]
        equiv: String,
        #[arg(long)]
        tuple_a: Option<String>,
        #[arg(long)]
        tuple_b: Option<String>,
    },
    /// Premise of weak locality for two tuples of one structure.
    WeakLocal {
        a: String,
        #[arg(long)]
        ta: String,
        #[arg(long)]
        tb: String,
        #[arg(short)]
        d: usize,
        #[arg(long, default_value = "iso")]
        equiv: String,
    },
    /// k-extendability relative to a pool.
    Extendable {
        a: String,
        #[arg(short)]
        k: usize,
        #[command(flatten)]
        pool: PoolArgs,
        /// Only require the shorter game on extensions, for nonempty structures.
        #[arg(long)]
        strict_paper_reading: bool,
    },
    /// Extendability, k-homomorphic and EF equivalence of two structures.
    Lemma29 {
        a: String,
        b: String,
        #[arg(short)]
        k: usize,
        #[command(flatten)]
        pool: PoolArgs,
    },
    /// Solve a lifting problem given four morphism files.
    Lift {
        #[arg(long)]
        i: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Weak equivalence, acyclic fibration, section and retraction flags.
    ClassifyMorphism { f: String },
    /// Left homotopy between parallel morphisms.
    Homotopic { f: String, g: String },
    /// Weak equivalence with k-homomorphically equivalent endpoints.
    WeakKEquivalence {
        f: String,
        #[arg(short)]
        k: usize,
    },
    /// Homotopy category of a directory of structures.
    HomotopyCategory {
        dir: String,
        #[arg(long)]
        over: Option<String>,
    },
    /// Game side against pp-test agreement for two structures.
    Theorem3 {
        n1: String,
        n2: String,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        size_cap: usize,
    },
    /// Exhaustive game-versus-pp-tests sweep.
    Theorem3Sweep {
        #[arg(long, default_value = "sigma1")]
        vocab: String,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Largest k; every k from 1 up to it is checked.
        #[arg(short)]
        k: usize,
        #[arg(long)]
        size_cap: Option<usize>,
    },
    /// Exhaustive cross-check over all small structures.
    Sweep {
        /// lemma28, theorem2, theorem3, lemma29, universal-properties, cores, ef, chandra-merlin.
        #[arg(long)]
        check: String,
        #[arg(long, default_value = "graph")]
        vocab: String,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Comma-separated k values.
        #[arg(short, default_value = "1,2")]
        k: String,
        #[arg(long)]
        size_cap: Option<usize>,
    },
}

fn exit_code(e: &Error) -> u8 {
    if e.is_budget() {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    match commands::run(&cli.command) {
        Ok(mut report) => {
            report.timing_ms = Some(start.elapsed().as_millis() as u64);
            let text = match cli.format {
                Format::Machine => report.to_machine(),
                Format::Text => commands::render_text(&report),
            };
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::from(match report.verdict_bool() {
                Some(false) => 1,
                _ => 0,
            })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
