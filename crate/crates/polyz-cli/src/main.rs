//! `polyz`: exact arithmetic and automorphism tools for poly-Z towers.
//!
//! Every subcommand works over a group chosen with `--group <preset>`
//! (`z`, `zxz`, `g2`, `b1`, `a0`, `a1`, `b0`) or `--presentation <file>`.
//! Word operands are accepted in text form (`g1^2*g3^-1`) or vector form
//! (`[2,0,-1]`); text output mirrors the form of the first word operand,
//! and `--json` switches to a single JSON object per run (schema
//! documented in `docs/cli-schema.json`, exponents rendered as decimal
//! strings). Exit codes: 0 success, 1 domain errors (not an automorphism,
//! failed verification, benchmark mismatch), 2 usage or parse errors.

mod commands;
mod context;
mod operands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "polyz",
    version,
    about = "Exact arithmetic and automorphism tools for poly-Z towers",
    after_help = "Word operands: text form g1^2*g3^-1 or vector form [2,0,-1].\n\
                  JSON envelope schema: docs/cli-schema.json."
)]
pub struct Cli {
    /// Built-in group preset: z, zxz, g2, b1, a0, a1, b0.
    #[arg(long, global = true, value_name = "PRESET")]
    group: Option<String>,

    /// Polycyclic presentation file defining the group.
    #[arg(long, global = true, value_name = "FILE", conflicts_with = "group")]
    presentation: Option<PathBuf>,

    /// Emit one JSON object instead of text output.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for the sampling subcommands (iso-verify, bench).
    #[arg(long, global = true, default_value_t = 0, value_name = "U64")]
    seed: u64,

    /// Sample count for iso-verify (default 1000) and bench (default 10000).
    #[arg(long, global = true, value_name = "N")]
    count: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Collect a word over the generators into normal form.
    Collect {
        /// Word to collect, e.g. "g2*g1" or "[0,1]".
        word: String,
    },
    /// Multiply two elements.
    Mul {
        x: String,
        y: String,
    },
    /// Invert an element.
    Inv {
        x: String,
    },
    /// Raise an element to an integer power.
    Pow {
        x: String,
        /// Exponent, any decimal integer.
        m: String,
    },
    /// Classify a generator-image matrix into the group's automorphism
    /// families (groups g2, b1, a0, a1, b0).
    AutClassify {
        /// Matrix as JSON rows, e.g. "[[1,0],[0,-1]]"; column c is the
        /// image of generator c+1.
        #[arg(long, value_name = "JSON")]
        matrix: String,
    },
    /// Compose two automorphisms: prints f∘g, the map applying g first.
    /// Operands are family text forms ("alpha(3)", "b1:beta(a=1; A=...)")
    /// or matrices.
    AutCompose {
        f: String,
        g: String,
    },
    /// Classify the conjugation x ↦ h·x·h⁻¹ by the given element.
    AutInner {
        element: String,
    },
    /// Outer class of an automorphism (family text form or matrix).
    OutClass {
        automorphism: String,
    },
    /// Build an isomorphism witness between twisted extensions of the
    /// group; prints the witness as JSON for `iso-verify`.
    IsoWitness {
        #[command(subcommand)]
        kind: WitnessCmd,
    },
    /// Check a witness produced by `iso-witness`: replays seeded
    /// multiplicativity and round-trip samples.
    IsoVerify {
        /// Witness JSON file; "-" or omitted reads standard input.
        witness: Option<String>,
    },
    /// Test whether an element is central.
    Central {
        word: String,
    },
    /// Compare a closed-form kernel against the generic engine on random
    /// inputs; result equality is asserted before any timing.
    Bench {
        /// Operation to benchmark.
        #[arg(value_parser = ["mul", "pow"])]
        op: String,
    },
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// Witness that twisting by ι_a∘α and by α give isomorphic extensions.
    InnerTwist {
        /// The twist automorphism α (family text form or matrix).
        alpha: String,
        /// The twisting element a.
        element: String,
    },
    /// Witness that twisting by α and by ψ∘α∘ψ⁻¹ give isomorphic
    /// extensions.
    Conjugation {
        /// The twist automorphism α (family text form or matrix).
        alpha: String,
        /// The conjugating automorphism ψ.
        psi: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
