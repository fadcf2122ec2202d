use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sddrev::bench::{self, BenchConfig};
use sddrev::compile::{
    compile_cnf, compile_dnf, compile_formula, complete_dnf, parse_dimacs, parse_dnf, CnfInstance, DnfInstance,
    DEFAULT_TERM_CAP,
};
use sddrev::propcore::{
    check_postulates, models, parse_expr, Formula, ModelSet, OracleOperator, RevisionOperator, ORACLE_CAP,
};
use sddrev::revision::{revise, revise_dnf, ReviseOptions, RevisionMode, SddRevisionOperator};
use sddrev::sdd::{Sdd, SddManager};
use sddrev::vtree::Vtree;

/// Sentential decision diagrams and Dalal revision from the command line.
///
/// Reports go to stdout as `key=value` lines; diagnostics go to stderr.
/// Exit status is 0 on success, 1 on a domain error, 2 on a usage error.
#[derive(Parser)]
#[command(name = "sddrev", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a CNF, DNF or expression file and report size and model count.
    Compile {
        input: PathBuf,
        #[command(flatten)]
        inputs: InputOpts,
        /// Where to write the diagram.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the vtree the diagram is normalised for.
        #[arg(long)]
        vtree_out: Option<PathBuf>,
    },
    /// Revise a knowledge base by new information.
    Revise {
        kb: PathBuf,
        mu: PathBuf,
        #[command(flatten)]
        inputs: InputOpts,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Highest relaxation order to try.
        #[arg(long)]
        max_order: Option<usize>,
        /// What to do when no order up to the bound works.
        #[arg(long, value_enum, default_value_t = Fallback::Fail)]
        fallback: Fallback,
        /// Expand incomplete DNF terms over their missing variables.
        #[arg(long)]
        dnf_complete: bool,
    },
    /// Check the six revision postulates on one small instance.
    Check {
        kb: PathBuf,
        mu: PathBuf,
        #[command(flatten)]
        inputs: InputOpts,
        #[arg(long, value_enum, default_value_t = Operator::Sdd)]
        operator: Operator,
    },
    /// Run the random 3-CNF size experiment and emit a CSV summary.
    Bench(BenchArgs),
    /// Model count of a file.
    Mc {
        input: PathBuf,
        #[command(flatten)]
        inputs: InputOpts,
    },
    /// Whether two files denote the same function.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        inputs: InputOpts,
    },
}

#[derive(Args)]
struct InputOpts {
    /// `balanced`, `rightlinear`, or the path of a vtree file.
    #[arg(long, default_value = "balanced")]
    vtree: String,
    /// Input format; by default guessed from the extension or header.
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    format: Format,
    /// Variable count, when larger than what the inputs mention.
    #[arg(long)]
    vars: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    /// Variable counts, comma separated.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30])]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seconds allowed per pipeline and instance.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Clauses per formula; defaults to n/2.
    #[arg(long)]
    clauses: Option<usize>,
    #[arg(long, default_value_t = 3)]
    width: usize,
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Also reject pairs whose conjunction is satisfiable.
    #[arg(long)]
    require_conflict: bool,
    /// Summary CSV path; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Per-instance records as CSV.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Write a matplotlib script reading the summary CSV.
    #[arg(long)]
    plot_script: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Auto,
    Cnf,
    Dnf,
    Expr,
    Sdd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fallback {
    /// Exit with status 1.
    Fail,
    /// Keep the conjunction when it is consistent, otherwise the new
    /// information alone.
    ConjoinIfConsistent,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Operator {
    Sdd,
    Oracle,
    /// Returns the knowledge base unchanged; a negative control.
    Stubborn,
}

/// Invalid configuration, reported with exit status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A run that finished with a negative verdict already on stdout.
#[derive(Debug)]
struct Failed;

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("negative verdict")
    }
}

impl std::error::Error for Failed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<Failed>().is_some() => ExitCode::from(1),
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compile {
            input,
            inputs,
            output,
            vtree_out,
        } => {
            let src = Source::load(&input, inputs.format)?;
            let mut m = manager(&inputs, &[&src])?;
            let s = src.compile(&mut m)?;
            if let Some(p) = output {
                write(&p, &m.serialize(s))?;
            }
            if let Some(p) = vtree_out {
                write(&p, &m.vtree().serialize())?;
            }
            println!("size={} mc={}", m.size(s), m.model_count(s));
            Ok(())
        }
        Command::Revise {
            kb,
            mu,
            inputs,
            output,
            max_order,
            fallback,
            dnf_complete,
        } => {
            let kb = Source::load(&kb, inputs.format)?;
            let mu = Source::load(&mu, inputs.format)?;
            let mut m = manager(&inputs, &[&kb, &mu])?;
            let s = kb.compile(&mut m)?;
            let opts = ReviseOptions {
                max_order,
                ..Default::default()
            };
            let result = match &mu {
                Source::Dnf(d) => {
                    let d = if dnf_complete && !d.is_complete() {
                        complete_dnf(d, DEFAULT_TERM_CAP)?
                    } else {
                        d.clone()
                    };
                    revise_dnf(&mut m, s, &d, &opts)?
                }
                other => {
                    let s2 = other.compile(&mut m)?;
                    revise(&mut m, s, s2, &opts)?
                }
            };
            let out = match result.single() {
                Some(r) => Some((r, result.mode.to_string(), result.order)),
                None => match fallback {
                    Fallback::Fail => None,
                    Fallback::ConjoinIfConsistent => {
                        let s2 = mu.compile(&mut m)?;
                        let both = m.conjoin(s, s2)?;
                        let r = if m.is_false(both) { s2 } else { both };
                        Some((r, "Fallback".to_string(), None))
                    }
                },
            };
            let show = |k: Option<usize>| k.map_or("none".to_string(), |k| k.to_string());
            match out {
                Some((r, mode, k)) => {
                    if let Some(p) = output {
                        write(&p, &m.serialize(r))?;
                    }
                    println!("k={} mode={mode} size={} mc={}", show(k), m.size(r), m.model_count(r));
                    Ok(())
                }
                None => {
                    debug_assert_eq!(result.mode, RevisionMode::BoundExceeded);
                    println!("k=none mode={} size=none", result.mode);
                    eprintln!("no relaxation order up to the bound is consistent with the new information");
                    Err(Failed.into())
                }
            }
        }
        Command::Check {
            kb,
            mu,
            inputs,
            operator,
        } => {
            let kb = Source::load(&kb, inputs.format)?;
            let mu = Source::load(&mu, inputs.format)?;
            let n = width(&inputs, &[&kb, &mu])?;
            if n > ORACLE_CAP {
                return Err(sddrev::Error::Capacity {
                    what: "variables for the postulate check",
                    got: n,
                    limit: ORACLE_CAP,
                }
                .into());
            }
            let (psi, mu) = (kb.formula()?, mu.formula()?);
            let op: Box<dyn RevisionOperator> = match operator {
                Operator::Sdd => Box::new(SddRevisionOperator {
                    options: ReviseOptions::default(),
                }),
                Operator::Oracle => Box::new(OracleOperator),
                Operator::Stubborn => Box::new(Stubborn),
            };
            let report = check_postulates(op.as_ref(), &psi, &mu, n)?;
            for (p, ok) in &report.verdicts {
                println!("{p}={}", if *ok { "PASS" } else { "FAIL" });
            }
            if report.all_pass() {
                Ok(())
            } else {
                Err(Failed.into())
            }
        }
        Command::Bench(args) => run_bench(args),
        Command::Mc { input, inputs } => {
            let src = Source::load(&input, inputs.format)?;
            let mut m = manager(&inputs, &[&src])?;
            let s = src.compile(&mut m)?;
            println!("mc={}", m.model_count(s));
            Ok(())
        }
        Command::Equiv { a, b, inputs } => {
            let a = Source::load(&a, inputs.format)?;
            let b = Source::load(&b, inputs.format)?;
            let mut m = manager(&inputs, &[&a, &b])?;
            let (sa, sb) = (a.compile(&mut m)?, b.compile(&mut m)?);
            println!("equivalent={}", sa == sb);
            Ok(())
        }
    }
}

struct Stubborn;

impl RevisionOperator for Stubborn {
    fn revise(&self, psi: &Formula, _mu: &Formula, n: usize) -> sddrev::Result<ModelSet> {
        models(psi, n)
    }
}

fn run_bench(args: BenchArgs) -> Result<()> {
    if !args.timeout.is_finite() || args.timeout < 0.0 {
        return Err(UsageError(format!("timeout must be a non-negative number of seconds, got {}", args.timeout)).into());
    }
    let cfg = BenchConfig {
        ns: args.ns,
        reps: args.reps,
        clauses: args.clauses,
        width: args.width,
        timeout: Duration::from_secs_f64(args.timeout),
        seed: args.seed,
        order: args.order,
        require_conflict: args.require_conflict,
    };
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    let runs = bench::run(&cfg)?;
    let rejections: u64 = runs.iter().map(|r| r.rejections).sum();
    let disagree = runs.iter().filter(|r| r.ids_agree == Some(false)).count();
    eprintln!(
        "{} instances, {rejections} rejected draws, {disagree} pipeline disagreements",
        runs.len()
    );
    let records: Vec<_> = runs.into_iter().flat_map(|r| r.records).collect();
    if let Some(p) = &args.records {
        write(p, &records_csv(&records)?)?;
    }
    let csv = bench::to_csv(&bench::summarize(&records))?;
    match &args.output {
        Some(p) => write(p, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &args.plot_script {
        let target = args.output.as_deref().unwrap_or(Path::new("sizes.csv"));
        write(p, &bench::plot_script(&target.display().to_string()))?;
    }
    if disagree > 0 {
        bail!("{disagree} instances where the pipelines produced different diagrams");
    }
    Ok(())
}

fn records_csv(records: &[bench::BenchRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "seed", "pipeline", "size", "time_ms", "k", "timed_out", "skip"])?;
    let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.seed.to_string(),
            r.pipeline.to_string(),
            opt(r.size),
            format!("{:.3}", r.wall_time.as_secs_f64() * 1000.0),
            opt(r.k),
            r.timed_out.to_string(),
            r.skip.clone().unwrap_or_default(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

enum Source {
    Cnf(CnfInstance),
    Dnf(DnfInstance),
    Expr(Formula),
    Sdd(String),
}

impl Source {
    fn load(path: &Path, format: Format) -> Result<Source> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let format = match format {
            Format::Auto => guess(path, &text),
            f => f,
        };
        let ctx = || format!("in {}", path.display());
        Ok(match format {
            Format::Cnf => Source::Cnf(parse_dimacs(&text).with_context(ctx)?),
            Format::Dnf => Source::Dnf(parse_dnf(&text).with_context(ctx)?),
            Format::Expr => Source::Expr(parse_expr(&text).with_context(ctx)?),
            Format::Sdd | Format::Auto => Source::Sdd(text),
        })
    }

    /// Variables the input needs; `None` for a diagram, which takes the
    /// width of its vtree.
    fn width(&self) -> Option<usize> {
        match self {
            Source::Cnf(c) => Some(c.n),
            Source::Dnf(d) => Some(d.n),
            Source::Expr(f) => Some(f.max_var()),
            Source::Sdd(_) => None,
        }
    }

    fn compile(&self, m: &mut SddManager) -> Result<Sdd> {
        Ok(match self {
            Source::Cnf(c) => compile_cnf(m, c)?,
            Source::Dnf(d) => compile_dnf(m, d)?,
            Source::Expr(f) => compile_formula(m, f)?,
            Source::Sdd(text) => m.parse(text)?,
        })
    }

    fn formula(&self) -> Result<Formula> {
        Ok(match self {
            Source::Cnf(c) => c.to_formula(),
            Source::Dnf(d) => d.to_formula(),
            Source::Expr(f) => f.clone(),
            Source::Sdd(_) => bail!("diagram files are not accepted here; pass the source formula"),
        })
    }
}

fn guess(path: &Path, text: &str) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("cnf") => return Format::Cnf,
        Some("dnf") => return Format::Dnf,
        Some("sdd") => return Format::Sdd,
        _ => {}
    }
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('c') && !l.starts_with('#'));
    match first {
        Some(l) if l.starts_with("p cnf") => Format::Cnf,
        Some(l) if l.starts_with("p dnf") => Format::Dnf,
        Some(l) if l.starts_with("sdd ") => Format::Sdd,
        _ => Format::Expr,
    }
}

fn width(opts: &InputOpts, sources: &[&Source]) -> Result<usize> {
    let mut declared = sources.iter().filter_map(|s| match s {
        Source::Cnf(c) => Some(c.n),
        Source::Dnf(d) => Some(d.n),
        _ => None,
    });
    if let Some(first) = declared.next() {
        if let Some(other) = declared.find(|&n| n != first) {
            bail!("inputs declare {first} and {other} variables");
        }
    }
    let n = sources.iter().filter_map(|s| s.width()).max().unwrap_or(0);
    Ok(n.max(opts.vars.unwrap_or(0)).max(1))
}

fn manager(opts: &InputOpts, sources: &[&Source]) -> Result<SddManager> {
    let vtree = match opts.vtree.as_str() {
        "balanced" => Vtree::balanced(width(opts, sources)?)?,
        "rightlinear" | "right-linear" => Vtree::right_linear(width(opts, sources)?)?,
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read vtree {path}"))?;
            let v = Vtree::parse(&text).with_context(|| format!("in {path}"))?;
            let need = width(opts, sources)?;
            if need > v.var_count() {
                bail!("inputs need {need} variables but the vtree has {}", v.var_count());
            }
            v
        }
    };
    Ok(SddManager::new(vtree)?)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
