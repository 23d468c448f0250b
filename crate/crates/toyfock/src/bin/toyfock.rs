//! Command-line surface for the toy Fock space calculus.
//!
//! Chaos elements travel as text files, one `<mask> <num>/<den>` term per
//! line; signed words as `[s;p]` strings; matrices as tab-separated rows.
//! Every command is deterministic given its arguments and seed.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use toyfock::chaos::{from_atoms, to_atoms, AtomVector, ChaosElement};
use toyfock::matrep::{word_to_matrix, DyadicMatrix};
use toyfock::operators::expr::OperatorExpr;
use toyfock::operators::{compose_table, PrimitiveKind};
use toyfock::rigged::{distance_to_stratum, dual_pair, nq_core, ProjectiveVector, RiggedVector};
use toyfock::signed::{embed, verify_embedding, EmbedSpec, SignedWord};
use toyfock::verify::{run_suite, DEFAULT_COUNT, DEFAULT_SEED, SUITES};

#[derive(Parser)]
#[command(
    name = "toyfock",
    about = "Exact operator calculus on the toy Fock space",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonOpts {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operator expression (e.g. "N@1", "D^101", "cN^d{c=001,d=101}",
    /// composed with '.') to a chaos file and print the result.
    Apply {
        /// Operator expression; in `a.b` the right factor acts first.
        expr: String,
        /// Chaos element file, `-` for stdin.
        input: PathBuf,
    },
    /// Run a verification suite and print its report.
    Verify {
        /// Suite name, or `all`.
        suite: String,
        /// Seed for the randomized instances.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Number of randomized instances.
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        count: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Realize a sign/commutativity spec as signed words.
    Embed {
        /// JSON file {"signs":[...],"comm":[[...]]}, `-` for stdin.
        spec: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print the matrix of a signed word at a given depth.
    Matrix {
        /// Word in `[s;p]` notation, optionally signed.
        word: String,
        /// Depth n; defaults to the word's own depth.
        #[arg(long, default_value_t = 0)]
        depth: u32,
    },
    /// Fast Walsh-Hadamard transform between coefficients and atom values.
    Fwht {
        /// `fwd` (chaos file -> atom values) or `inv` (atom values -> chaos).
        direction: FwhtDirection,
        /// Input file, `-` for stdin.
        input: PathBuf,
        /// Atom depth n (forward only; inferred from length on inverse).
        #[arg(long, default_value_t = 0)]
        depth: u32,
    },
    /// Print the 5x5 multiplication table of {N, R, D, D1, N1}.
    Table,
    /// Squared distance from a matrix to a lower stratum of the rigged system.
    Distance {
        /// Matrix file, `-` for stdin.
        input: PathBuf,
        /// Target stratum depth j.
        #[arg(long)]
        stratum: u32,
    },
    /// Strip principal quadruplings and print the NQ core.
    NqCore {
        /// Matrix file, `-` for stdin.
        input: PathBuf,
    },
    /// Duality pairing of a projective vector (top matrix) with a rigged
    /// class (representative matrix).
    Pair {
        /// Projective-side top matrix file.
        top: PathBuf,
        /// Inductive-side representative matrix file.
        core: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FwhtDirection {
    Fwd,
    Inv,
}

fn read_input(path: &PathBuf) -> Result<String, String> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))
    }
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Apply { expr, input } => {
            let parsed = OperatorExpr::parse(&expr).map_err(|e| e.to_string())?;
            let f = ChaosElement::parse(&read_input(&input)?).map_err(|e| e.to_string())?;
            let out = parsed.apply(&f).map_err(|e| e.to_string())?;
            print!("{}", out.render());
            Ok(true)
        }
        Command::Verify {
            suite,
            seed,
            count,
            common,
        } => {
            let names: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else if SUITES.contains(&suite.as_str()) {
                vec![suite.as_str()]
            } else {
                return Err(format!(
                    "unknown suite `{suite}`; available: {} or all",
                    SUITES.join(", ")
                ));
            };
            let mut all_pass = true;
            for name in names {
                let report = run_suite(name, seed, count).map_err(|e| e.to_string())?;
                match common.format {
                    Format::Text => print!("{}", report.render_text()),
                    Format::Json => println!("{}", report.render_json()),
                }
                eprintln!(
                    "{}: {} in {:?}",
                    name,
                    if report.passed() { "pass" } else { "FAIL" },
                    report.elapsed
                );
                all_pass &= report.passed();
            }
            Ok(all_pass)
        }
        Command::Embed { spec, common } => {
            let text = read_input(&spec)?;
            let spec: EmbedSpec =
                serde_json::from_str(&text).map_err(|e| format!("parsing spec: {e}"))?;
            let words = embed(&spec).map_err(|e| e.to_string())?;
            let check = verify_embedding(&words, &spec).map_err(|e| e.to_string())?;
            match common.format {
                Format::Text => {
                    for w in &words {
                        println!("{}", w.render());
                    }
                    println!("# verification");
                    println!("# sigma: {}", if check.sigma_ok { "ok" } else { "FAIL" });
                    println!("# comm: {}", if check.comm_ok { "ok" } else { "FAIL" });
                    println!("# basic: {}", if check.basic { "ok" } else { "FAIL" });
                }
                Format::Json => {
                    let value = serde_json::json!({
                        "words": words.iter().map(|w| w.render()).collect::<Vec<_>>(),
                        "verification": {
                            "sigma_ok": check.sigma_ok,
                            "comm_ok": check.comm_ok,
                            "basic": check.basic,
                        },
                    });
                    println!("{}", serde_json::to_string_pretty(&value).unwrap());
                }
            }
            Ok(check.ok())
        }
        Command::Matrix { word, depth } => {
            let w = SignedWord::parse(&word).map_err(|e| e.to_string())?;
            let n = if depth == 0 { w.depth() } else { depth };
            let m = word_to_matrix(&w, n).map_err(|e| e.to_string())?;
            print!("{}", m.render());
            Ok(true)
        }
        Command::Fwht {
            direction,
            input,
            depth,
        } => {
            let text = read_input(&input)?;
            match direction {
                FwhtDirection::Fwd => {
                    let f = ChaosElement::parse(&text).map_err(|e| e.to_string())?;
                    let n = if depth == 0 { f.depth() } else { depth };
                    let atoms = to_atoms(&f, n).map_err(|e| e.to_string())?;
                    print!("{}", atoms.render());
                }
                FwhtDirection::Inv => {
                    let atoms = AtomVector::parse(&text).map_err(|e| e.to_string())?;
                    print!("{}", from_atoms(&atoms).render());
                }
            }
            Ok(true)
        }
        Command::Table => {
            let kinds = PrimitiveKind::TABLE;
            print!("left\\right");
            for k in kinds {
                print!("\t{}", k.symbol());
            }
            println!();
            for left in kinds {
                print!("{}", left.symbol());
                for right in kinds {
                    let entry = compose_table(left, right).map_err(|e| e.to_string())?;
                    print!("\t{}", entry.symbol());
                }
                println!();
            }
            Ok(true)
        }
        Command::Distance { input, stratum } => {
            let m = DyadicMatrix::parse(&read_input(&input)?).map_err(|e| e.to_string())?;
            let dist = distance_to_stratum(&m, stratum).map_err(|e| e.to_string())?;
            println!("{}/{}", dist.numer(), dist.denom());
            Ok(true)
        }
        Command::NqCore { input } => {
            let m = DyadicMatrix::parse(&read_input(&input)?).map_err(|e| e.to_string())?;
            let (core, strips) = nq_core(&m);
            println!(
                "# stripped {strips} quadrupling level(s); core depth {}",
                core.depth()
            );
            print!("{}", core.render());
            Ok(true)
        }
        Command::Pair { top, core } => {
            let top = DyadicMatrix::parse(&read_input(&top)?).map_err(|e| e.to_string())?;
            let core = DyadicMatrix::parse(&read_input(&core)?).map_err(|e| e.to_string())?;
            let d = ProjectiveVector::new(top).map_err(|e| e.to_string())?;
            let v = RiggedVector::new(core).map_err(|e| e.to_string())?;
            let value = dual_pair(&d, &v).map_err(|e| e.to_string())?;
            println!("{}/{}", value.numer(), value.denom());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
