use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use grouptrellis::cli::{
    cmd_analyze, cmd_aut, cmd_classcheck, cmd_encode, cmd_expand, cmd_track, cmd_validate,
    cmd_verify, ReportMode,
};
use grouptrellis::Chooser;

#[derive(Parser)]
#[command(
    name = "grouptrellis",
    about = "Analyze group trellis sections: chains, coset structure, encoders, and register-bank automorphisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum ChooserArg {
    #[default]
    Lex,
    Revlex,
}

impl From<ChooserArg> for Chooser {
    fn from(c: ChooserArg) -> Chooser {
        match c {
            ChooserArg::Lex => Chooser::Lex,
            ChooserArg::Revlex => Chooser::RevLex,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum ReportArg {
    #[default]
    Text,
    Machine,
}

impl From<ReportArg> for ReportMode {
    fn from(r: ReportArg) -> ReportMode {
        match r {
            ReportArg::Text => ReportMode::Text,
            ReportArg::Machine => ReportMode::Machine,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a section file and report its shape.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        report: ReportArg,
    },
    /// Full structural analysis: chains, matrices, granules, generators,
    /// and the register-bank automorphism counts.
    Analyze {
        file: PathBuf,
        /// Cap on enumerated automorphisms and brute-force graph size.
        #[arg(long, default_value_t = 10_000)]
        max_enum: u64,
        #[arg(long, value_enum, default_value_t)]
        report: ReportArg,
    },
    /// Drive the encoder: branch indices of inputs on stdin, one per
    /// line, branch outputs on stdout.
    Encode {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        basis_chooser: ChooserArg,
    },
    /// Recover the input sequence that reproduces a path: branch
    /// indices of the path on stdin, inputs on stdout.
    Track {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        basis_chooser: ChooserArg,
    },
    /// The register-bank automorphism count and, when small enough,
    /// the separating-permutation table per automorphism.
    Aut {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_enum: u64,
        #[arg(long, value_enum, default_value_t)]
        report: ReportArg,
    },
    /// Expand one element of a group along the chain in a group file.
    Expand { file: PathBuf, element: usize },
    /// Exhaustively verify the expansion-class group of a group file.
    Classcheck { file: PathBuf },
    /// Run the full verification suite against a section.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        basis_chooser: ChooserArg,
        /// Deliberately break the generator basis first (for testing
        /// the failure path).
        #[arg(long, default_value_t = false)]
        corrupt_basis: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out: Box<dyn Write> = Box::new(stdout.lock());
    let stdin = io::stdin();
    let code = match cli.command {
        Command::Validate { file, report } => cmd_validate(&file, report.into(), &mut out),
        Command::Analyze {
            file,
            max_enum,
            report,
        } => cmd_analyze(&file, max_enum, report.into(), &mut out),
        Command::Encode {
            file,
            basis_chooser,
        } => cmd_encode(&file, basis_chooser.into(), &mut stdin.lock(), &mut out),
        Command::Track {
            file,
            basis_chooser,
        } => cmd_track(&file, basis_chooser.into(), &mut stdin.lock(), &mut out),
        Command::Aut {
            file,
            max_enum,
            report,
        } => cmd_aut(&file, max_enum, report.into(), &mut out),
        Command::Expand { file, element } => cmd_expand(&file, element, &mut out),
        Command::Classcheck { file } => cmd_classcheck(&file, &mut out),
        Command::Verify {
            file,
            basis_chooser,
            corrupt_basis,
        } => cmd_verify(&file, basis_chooser.into(), corrupt_basis, &mut out),
    };
    drop(out);
    std::process::exit(code);
}
