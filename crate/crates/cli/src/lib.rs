//! Argument parsing and command dispatch for the `transvect` binary.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use transvect::catalog::{build_entry, theorem_representatives, ENTRIES};
use transvect::conformal::{conformal_defect, solve_b2k, vectn_obstruction, SymbolDocument};
use transvect::densities::{is_invariant_by_oracle, MonomialBound};
use transvect::invariance::{
    default_grid, grid_triples, match_catalog, sweep, sweep_csv, SweepRow,
};
use transvect::opcore::OpDocument;
use transvect::{classify, report_tables, QuadExt, Rational, Scalar};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] transvect::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "transvect",
    version,
    about = "Invariant ternary differential operators on weighted densities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub output: Format,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for sampled sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel of the invariance system at one weight triple.
    Classify {
        #[arg(long)]
        order: usize,
        /// Three exact weights, e.g. `-2/3,-2/3,-2/3`; `sqrt21` is allowed.
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
        /// Exit with status 1 unless the kernel has this dimension.
        #[arg(long)]
        expect_dimension: Option<usize>,
    },
    /// Kernel dimensions over a weight grid.
    Sweep {
        #[arg(long)]
        order: usize,
        /// `default` or a comma-separated list of rationals.
        #[arg(long, default_value = "default", allow_hyphen_values = true)]
        grid: String,
        /// Only this many triples, drawn with `--seed`.
        #[arg(long)]
        sample: Option<usize>,
        /// Exit with status 1 unless every triple has this dimension.
        #[arg(long)]
        expect_dimension: Option<usize>,
    },
    /// Checks that a catalog entry is invariant.
    Verify {
        #[arg(long)]
        entry: String,
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        params: Option<String>,
    },
    /// Lists the catalog.
    Catalog,
    /// Conformally invariant symbols of degree `2k` in dimension `n`.
    Conformal(ConformalArgs),
    /// Checks that no nonzero symbol of positive degree survives all vector fields.
    Obstruction(ConformalArgs),
    /// Recomputes every dimension table and compares it with the golden file.
    Report,
}

#[derive(Debug, Args)]
pub struct ConformalArgs {
    #[arg(long, visible_alias = "k")]
    pub order: u32,
    #[arg(long)]
    pub n: Option<u32>,
    /// Signature `(p, q)` of the flat metric; only `p + q` matters.
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub weights: String,
}

impl ConformalArgs {
    fn dimension(&self) -> Result<u32, CliError> {
        let sig = match (self.p, self.q) {
            (Some(p), Some(q)) => Some(p + q),
            (None, None) => None,
            _ => return Err(CliError::Usage("--p and --q must be given together".into())),
        };
        let n = match (self.n, sig) {
            (Some(n), Some(s)) if n != s => {
                return Err(CliError::Usage(format!(
                    "--p + --q = {s} differs from --n {n}"
                )))
            }
            (Some(n), _) | (None, Some(n)) => n,
            (None, None) => return Err(CliError::Usage("give --n or --p and --q".into())),
        };
        if n == 0 {
            return Err(CliError::Usage("the dimension must be positive".into()));
        }
        Ok(n)
    }
}

/// What a successful run produced.
#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    /// False when a verification check failed (exit status 1).
    pub verified: bool,
}

fn parse_list<S: std::str::FromStr<Err = transvect::Error>>(
    text: &str,
) -> Result<Vec<S>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(CliError::Core))
        .collect()
}

fn triple<S: Clone>(v: Vec<S>) -> Result<[S; 3], CliError> {
    v.try_into()
        .map_err(|v: Vec<S>| CliError::Usage(format!("expected 3 weights, got {}", v.len())))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data");
    s.push('\n');
    s
}

fn unsupported(format: Format, command: &str) -> CliError {
    CliError::Usage(format!("{command} does not support --output {format:?}").to_lowercase())
}

#[derive(Serialize)]
struct Member {
    name: String,
    member: bool,
    degenerate: bool,
}

#[derive(Serialize)]
struct ClassifyDoc {
    order: usize,
    weights: Vec<String>,
    dimension: usize,
    generators_agree: bool,
    basis: Vec<OpDocument>,
    representatives: Vec<Member>,
    representatives_span: bool,
}

fn classify_doc<S: Scalar>(order: usize, weights: [S; 3]) -> Result<ClassifyDoc, CliError> {
    let c = classify(order, weights.clone());
    let reps = theorem_representatives(order, &weights)?;
    let verdict = match_catalog(&c.kernel, &reps)?;
    Ok(ClassifyDoc {
        order,
        weights: weights.iter().map(|w| w.to_string()).collect(),
        dimension: c.dimension(),
        generators_agree: c.generators_agree,
        basis: c.kernel.basis.iter().map(|b| b.to_document()).collect(),
        representatives: verdict
            .members
            .into_iter()
            .map(|m| Member {
                name: m.name,
                member: m.member,
                degenerate: m.degenerate,
            })
            .collect(),
        representatives_span: verdict.spans,
    })
}

fn run_classify(
    order: usize,
    weights: &str,
    expect: Option<usize>,
    format: Format,
) -> Result<Outcome, CliError> {
    let doc = if weights.contains("sqrt21") {
        classify_doc(order, triple(parse_list::<QuadExt>(weights)?)?)?
    } else {
        classify_doc(order, triple(parse_list::<Rational>(weights)?)?)?
    };
    let text = match format {
        Format::Json => json(&doc),
        Format::Text => {
            let mut t = String::new();
            writeln!(t, "order {} at ({})", doc.order, doc.weights.join(", ")).unwrap();
            writeln!(t, "kernel dimension: {}", doc.dimension).unwrap();
            writeln!(t, "generators agree: {}", doc.generators_agree).unwrap();
            for (i, b) in doc.basis.iter().enumerate() {
                let terms: Vec<String> = b
                    .coeffs
                    .iter()
                    .map(|c| format!("({}){:?}", c.val, c.idx))
                    .collect();
                writeln!(t, "basis {}: {}", i + 1, terms.join(" + ")).unwrap();
            }
            for m in &doc.representatives {
                writeln!(t, "representative {}: member {}", m.name, m.member).unwrap();
            }
            writeln!(
                t,
                "representatives span kernel: {}",
                doc.representatives_span
            )
            .unwrap();
            t
        }
        Format::Csv => return Err(unsupported(format, "classify")),
    };
    let mut verified = doc.representatives_span && doc.generators_agree;
    if let Some(e) = expect {
        verified &= e == doc.dimension;
    }
    Ok(Outcome { text, verified })
}

#[derive(Serialize)]
struct SweepDoc {
    order: usize,
    weights: [String; 3],
    dimension: usize,
    matched: Vec<String>,
}

fn run_sweep(
    order: usize,
    grid: &str,
    sample_size: Option<usize>,
    expect: Option<usize>,
    seed: u64,
    format: Format,
) -> Result<Outcome, CliError> {
    let values = if grid == "default" {
        default_grid()
    } else {
        parse_list::<Rational>(grid)?
    };
    let mut triples = grid_triples(&values);
    if let Some(n) = sample_size {
        if n > triples.len() {
            return Err(CliError::Usage(format!(
                "cannot sample {n} of {} triples",
                triples.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = sample(&mut rng, triples.len(), n).into_vec();
        picked.sort_unstable();
        triples = picked.into_iter().map(|i| triples[i].clone()).collect();
    }
    let rows = sweep(order, &triples)?;
    let text = match format {
        Format::Csv => sweep_csv(&rows),
        Format::Json => json(
            &rows
                .iter()
                .map(|r: &SweepRow| SweepDoc {
                    order: r.order,
                    weights: r.weights.clone().map(|w| w.to_string()),
                    dimension: r.dimension,
                    matched: r.matched.clone(),
                })
                .collect::<Vec<_>>(),
        ),
        Format::Text => {
            let mut counts = std::collections::BTreeMap::new();
            for r in &rows {
                *counts.entry(r.dimension).or_insert(0usize) += 1;
            }
            let mut t = format!("order {order}: {} weight triples\n", rows.len());
            for (dim, n) in counts {
                writeln!(t, "  dimension {dim}: {n}").unwrap();
            }
            t
        }
    };
    let verified = expect.is_none_or(|e| rows.iter().all(|r| r.dimension == e));
    Ok(Outcome { text, verified })
}

#[derive(Serialize)]
struct VerifyDoc {
    entry: String,
    weights: Vec<String>,
    order: usize,
    in_kernel: bool,
}

fn run_verify(
    entry: &str,
    weights: Option<&str>,
    params: Option<&str>,
    format: Format,
) -> Result<Outcome, CliError> {
    let w: Vec<QuadExt> = weights.map(parse_list).transpose()?.unwrap_or_default();
    let p: Vec<QuadExt> = params.map(parse_list).transpose()?.unwrap_or_default();
    let op = build_entry(entry, &w, &p)?;
    let in_kernel = if op.arity() == 3 {
        let ws = op.weights();
        classify(op.order(), [ws[0].clone(), ws[1].clone(), ws[2].clone()])
            .kernel
            .contains(&op)?
    } else {
        is_invariant_by_oracle(&op, MonomialBound::Tight)
    };
    let doc = VerifyDoc {
        entry: entry.to_string(),
        weights: op.weights().iter().map(|w| w.to_string()).collect(),
        order: op.order(),
        in_kernel,
    };
    let text = match format {
        Format::Json => json(&doc),
        Format::Text => format!(
            "{} of order {} at ({})\nin kernel: {}\n",
            doc.entry,
            doc.order,
            doc.weights.join(", "),
            doc.in_kernel
        ),
        Format::Csv => return Err(unsupported(format, "verify")),
    };
    Ok(Outcome {
        text,
        verified: in_kernel,
    })
}

fn run_catalog(format: Format) -> Result<Outcome, CliError> {
    let text = match format {
        Format::Json => json(&ENTRIES),
        Format::Text => {
            let mut t = String::new();
            for e in ENTRIES {
                writeln!(
                    t,
                    "{:<20} arity {} order {}  {}  ({})",
                    e.name, e.arity, e.order, e.weight_domain, e.source
                )
                .unwrap();
            }
            t
        }
        Format::Csv => {
            let mut t = String::from("name,arity,order,weight_domain,source\n");
            for e in ENTRIES {
                writeln!(
                    t,
                    "{},{},{},\"{}\",\"{}\"",
                    e.name, e.arity, e.order, e.weight_domain, e.source
                )
                .unwrap();
            }
            t
        }
    };
    Ok(Outcome {
        text,
        verified: true,
    })
}

#[derive(Serialize)]
struct ConformalDoc {
    k: u32,
    n: u32,
    weights: Vec<String>,
    dimension: usize,
    defects_vanish: bool,
    basis: Vec<SymbolDocument>,
}

fn run_conformal(args: &ConformalArgs, format: Format) -> Result<Outcome, CliError> {
    let n = args.dimension()?;
    let weights = triple(parse_list::<Rational>(&args.weights)?)?;
    let kernel = solve_b2k(args.order, n, weights.clone())?;
    let defects_vanish =
        args.order == 0 || kernel.basis.iter().all(|b| conformal_defect(b).is_zero());
    let doc = ConformalDoc {
        k: args.order,
        n,
        weights: weights.iter().map(|w| w.to_string()).collect(),
        dimension: kernel.dimension(),
        defects_vanish,
        basis: kernel.basis.iter().map(|b| b.to_document()).collect(),
    };
    let text = match format {
        Format::Json => json(&doc),
        Format::Text => {
            let mut t = format!(
                "degree {} symbols in dimension {} at ({})\nkernel dimension: {}\ndefects vanish: {}\n",
                2 * doc.k,
                doc.n,
                doc.weights.join(", "),
                doc.dimension,
                doc.defects_vanish
            );
            for (i, b) in doc.basis.iter().enumerate() {
                let terms: Vec<String> = b
                    .terms
                    .iter()
                    .map(|term| format!("({}){:?}", term.val, term.exp))
                    .collect();
                writeln!(t, "basis {}: {}", i + 1, terms.join(" + ")).unwrap();
            }
            t
        }
        Format::Csv => return Err(unsupported(format, "conformal")),
    };
    Ok(Outcome {
        text,
        verified: defects_vanish,
    })
}

#[derive(Serialize)]
struct ObstructionDoc {
    k: u32,
    n: u32,
    weights: Vec<String>,
    divergence_factor: String,
    symbols: usize,
    surviving: usize,
    consistent: bool,
}

fn run_obstruction(args: &ConformalArgs, format: Format) -> Result<Outcome, CliError> {
    let n = args.dimension()?;
    let weights = triple(parse_list::<Rational>(&args.weights)?)?;
    let kernel = solve_b2k(args.order, n, weights.clone())?;
    let verdicts: Vec<_> = kernel.basis.iter().map(vectn_obstruction).collect();
    let surviving = verdicts.iter().filter(|o| o.passes()).count();
    // Only the scalar symbol and the zero symbol may survive.
    let consistent = verdicts
        .iter()
        .all(|o| o.passes() == (args.order == 0 || o.degenerate));
    let factor = verdicts
        .first()
        .map(|o| o.factor.to_string())
        .unwrap_or_else(|| {
            Rational::new(2 * args.order as i64, n as i64)
                .expect("n > 0")
                .to_string()
        });
    let doc = ObstructionDoc {
        k: args.order,
        n,
        weights: weights.iter().map(|w| w.to_string()).collect(),
        divergence_factor: factor,
        symbols: verdicts.len(),
        surviving,
        consistent,
    };
    let text = match format {
        Format::Json => json(&doc),
        Format::Text => format!(
            "k = {}, n = {}: divergence factor {}\n{} of {} invariant symbols survive all vector fields\nconsistent: {}\n",
            doc.k, doc.n, doc.divergence_factor, doc.surviving, doc.symbols, doc.consistent
        ),
        Format::Csv => return Err(unsupported(format, "obstruction")),
    };
    Ok(Outcome {
        text,
        verified: consistent,
    })
}

fn run_report(format: Format) -> Result<Outcome, CliError> {
    let report = report_tables()?;
    let text = match format {
        Format::Json => json(&report),
        Format::Text => report.to_markdown(),
        Format::Csv => return Err(unsupported(format, "report")),
    };
    Ok(Outcome {
        verified: report.passed(),
        text,
    })
}

/// Caps the worker pool at `TRANSVECT_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TRANSVECT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "TRANSVECT_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let outcome = match &cli.command {
        Command::Classify {
            order,
            weights,
            expect_dimension,
        } => run_classify(*order, weights, *expect_dimension, cli.output)?,
        Command::Sweep {
            order,
            grid,
            sample,
            expect_dimension,
        } => run_sweep(
            *order,
            grid,
            *sample,
            *expect_dimension,
            cli.seed,
            cli.output,
        )?,
        Command::Verify {
            entry,
            weights,
            params,
        } => run_verify(entry, weights.as_deref(), params.as_deref(), cli.output)?,
        Command::Catalog => run_catalog(cli.output)?,
        Command::Conformal(args) => run_conformal(args, cli.output)?,
        Command::Obstruction(args) => run_obstruction(args, cli.output)?,
        Command::Report => run_report(cli.output)?,
    };
    if let Some(path) = &cli.out {
        std::fs::write(path, &outcome.text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("transvect").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn signature_must_match_dimension() {
        let cli = parse(&[
            "conformal",
            "--order",
            "1",
            "--n",
            "3",
            "--p",
            "1",
            "--q",
            "1",
            "--weights",
            "1,2,3",
        ]);
        assert!(matches!(run(&cli), Err(CliError::Usage(_))));
        let cli = parse(&[
            "conformal",
            "--order",
            "1",
            "--p",
            "2",
            "--q",
            "1",
            "--weights",
            "1,2,3",
        ]);
        assert!(run(&cli).unwrap().text.contains("dimension 3"));
    }

    #[test]
    fn decimals_are_rejected() {
        let cli = parse(&["classify", "--order", "1", "--weights", "0.5,1,1"]);
        let err = run(&cli).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn sampled_sweep_is_deterministic() {
        let cli = parse(&[
            "sweep", "--order", "2", "--sample", "5", "--seed", "11", "--output", "csv",
        ]);
        let a = run(&cli).unwrap().text;
        let b = run(&cli).unwrap().text;
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 6);
    }
}
