//! Random 3-CNF size experiment: revise inside the diagram versus compile
//! the revised formula, under the same balanced vtree.
//!
//! Instances are drawn with ChaCha8 (`rand_chacha`), seeded per instance
//! from the run seed, `n` and the repetition index, so the CSV does not
//! depend on thread scheduling or platform.

use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::compile::{compile_cnf, compile_formula, CnfInstance};
use crate::propcore::{semi_resolvent_formula, Formula, Literal, SignVector, Var};
use crate::revision::{resolvent_keys, revise_at_order};
use crate::sdd::{Sdd, SddManager};
use crate::vtree::Vtree;
use crate::{Error, Result};

/// Upper bound on draws per instance before it is reported as skipped.
pub const MAX_ATTEMPTS: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub ns: Vec<usize>,
    pub reps: usize,
    /// Clauses per formula; `None` means `n / 2`.
    pub clauses: Option<usize>,
    pub width: usize,
    pub timeout: Duration,
    pub seed: u64,
    pub order: usize,
    /// Also reject pairs where `ψ ∧ μ` is satisfiable.
    pub require_conflict: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            ns: (10..=30).step_by(2).collect(),
            reps: 100,
            clauses: None,
            width: 3,
            timeout: Duration::from_secs(60),
            seed: 0,
            order: 1,
            require_conflict: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::input("repetitions must be at least 1"));
        }
        if self.ns.is_empty() {
            return Err(Error::input("no variable counts given"));
        }
        for &n in &self.ns {
            if n == 0 || n > crate::sdd::MAX_VARS {
                return Err(Error::input(format!("n={n} outside 1..={}", crate::sdd::MAX_VARS)));
            }
            if self.width > n {
                return Err(Error::input(format!("clause width {} exceeds n={n}", self.width)));
            }
            if self.order == 0 || self.order > n {
                return Err(Error::input(format!("order {} outside 1..={n}", self.order)));
            }
        }
        if self.width == 0 {
            return Err(Error::input("clause width must be at least 1"));
        }
        Ok(())
    }

    pub fn clause_count(&self, n: usize) -> usize {
        self.clauses.unwrap_or(n / 2)
    }

    pub fn instance_seed(&self, n: usize, rep: usize) -> u64 {
        self.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(((n as u64) << 32) | rep as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pipeline {
    /// Compile `ψ` and `μ`, then revise inside the diagram.
    A,
    /// Build the revised formula, then compile it.
    B,
}

impl Pipeline {
    pub fn label(self) -> &'static str {
        match self {
            Pipeline::A => "compile+revise",
            Pipeline::B => "revise+compile",
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pipeline::A => "A",
            Pipeline::B => "B",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub n: usize,
    pub seed: u64,
    pub pipeline: Pipeline,
    pub size: Option<usize>,
    pub wall_time: Duration,
    pub k: Option<usize>,
    pub timed_out: bool,
    pub skip: Option<String>,
}

/// One instance: its records plus what was rejected on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRun {
    pub records: Vec<BenchRecord>,
    pub rejections: u64,
    /// Whether both pipelines produced the same canonical diagram; `None`
    /// when either side did not finish.
    pub ids_agree: Option<bool>,
}

/// `m` clauses of `width` distinct variables with uniform polarities.
pub fn random_cnf<R: Rng>(n: usize, m: usize, width: usize, rng: &mut R) -> Result<CnfInstance> {
    if width > n {
        return Err(Error::input(format!("clause width {width} exceeds {n} variables")));
    }
    let clauses = (0..m)
        .map(|_| {
            let mut vars = sample(rng, n, width).into_vec();
            vars.sort_unstable();
            vars.into_iter()
                .map(|v| Literal::new(Var::new(v + 1), rng.gen()))
                .collect()
        })
        .collect();
    Ok(CnfInstance { n, clauses })
}

/// Draws pairs `(ψ, μ)` until one passes the filter, then times both
/// pipelines on it.
pub fn run_instance(cfg: &BenchConfig, n: usize, seed: u64) -> Result<InstanceRun> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = cfg.clause_count(n);
    let mut rejections = 0;
    let skipped = |reason: String, rejections| InstanceRun {
        records: [Pipeline::A, Pipeline::B]
            .into_iter()
            .map(|pipeline| BenchRecord {
                n,
                seed,
                pipeline,
                size: None,
                wall_time: Duration::ZERO,
                k: None,
                timed_out: false,
                skip: Some(reason.clone()),
            })
            .collect(),
        rejections,
        ids_agree: None,
    };
    let (psi, mu) = loop {
        if rejections >= MAX_ATTEMPTS {
            return Ok(skipped(format!("no admissible pair in {MAX_ATTEMPTS} draws"), rejections));
        }
        let psi = random_cnf(n, clauses, cfg.width, &mut rng)?;
        let mu = random_cnf(n, clauses, cfg.width, &mut rng)?;
        match admissible(cfg, &psi, &mu) {
            Ok(true) => break (psi, mu),
            Ok(false) => rejections += 1,
            Err(Error::Interrupted) => return Ok(skipped("screening timed out".into(), rejections)),
            Err(e) => return Err(e),
        }
    };

    let (a, a_time) = timed(cfg.timeout, n, |m| {
        let s = compile_cnf(m, &psi)?;
        let s2 = compile_cnf(m, &mu)?;
        revise_at_order(m, s, s2, cfg.order)
    })?;
    let revised = revised_formula(&psi.to_formula(), n, cfg.order)?;
    let mu_f = mu.to_formula();
    let (b, b_time) = timed(cfg.timeout, n, |m| {
        compile_formula(m, &Formula::and(vec![revised.clone(), mu_f.clone()]))
    })?;

    let record = |pipeline, out: &Option<(SddManager, Sdd)>, wall_time| BenchRecord {
        n,
        seed,
        pipeline,
        size: out.as_ref().map(|(m, s)| m.size(*s)),
        wall_time,
        k: out.as_ref().map(|_| cfg.order),
        timed_out: out.is_none(),
        skip: None,
    };
    let records = vec![record(Pipeline::A, &a, a_time), record(Pipeline::B, &b, b_time)];
    let ids_agree = match (a, b) {
        (Some((mut ma, sa)), Some((mb, sb))) => Some(ma.import(&mb, sb)? == sa),
        _ => None,
    };
    Ok(InstanceRun {
        records,
        rejections,
        ids_agree,
    })
}

/// `μ ⊭ ψ`, and the order-`cfg.order` relaxation of `ψ` meets `μ`.
fn admissible(cfg: &BenchConfig, psi: &CnfInstance, mu: &CnfInstance) -> Result<bool> {
    let mut m = SddManager::new(Vtree::balanced(psi.n)?)?;
    m.set_deadline(Some(Instant::now() + cfg.timeout));
    let s = compile_cnf(&mut m, psi)?;
    let s2 = compile_cnf(&mut m, mu)?;
    let not_psi = m.negate(s);
    let escape = m.conjoin(s2, not_psi)?;
    if m.is_false(escape) {
        return Ok(false);
    }
    if cfg.require_conflict {
        let both = m.conjoin(s, s2)?;
        if !m.is_false(both) {
            return Ok(false);
        }
    }
    let revised = revise_at_order(&mut m, s, s2, cfg.order)?;
    Ok(!m.is_false(revised))
}

/// The disjunction of every order-`level` semi-resolvent of `f`.
fn revised_formula(f: &Formula, n: usize, level: usize) -> Result<Formula> {
    let parts = resolvent_keys(n, level)
        .map(|key| semi_resolvent_formula(f, key.vars(), &SignVector::new(key.signs().signs().to_vec())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Formula::or(parts))
}

fn timed(
    timeout: Duration,
    n: usize,
    run: impl FnOnce(&mut SddManager) -> Result<Sdd>,
) -> Result<(Option<(SddManager, Sdd)>, Duration)> {
    let mut m = SddManager::new(Vtree::balanced(n)?)?;
    let start = Instant::now();
    m.set_deadline(Some(start + timeout));
    let out = run(&mut m);
    let elapsed = start.elapsed();
    m.set_deadline(None);
    match out {
        Ok(s) => Ok((Some((m, s)), elapsed)),
        Err(Error::Interrupted) => Ok((None, elapsed)),
        Err(e) => Err(e),
    }
}

/// Every `(n, rep)` instance of the configuration, run in parallel and
/// returned in `(n, rep)` order.
pub fn run(cfg: &BenchConfig) -> Result<Vec<InstanceRun>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .ns
        .iter()
        .flat_map(|&n| (0..cfg.reps).map(move |rep| (n, rep)))
        .collect();
    jobs.par_iter()
        .map(|&(n, rep)| run_instance(cfg, n, cfg.instance_seed(n, rep)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub pipeline: Pipeline,
    pub mean_size: f64,
    pub std_size: f64,
    pub count: usize,
    pub timeouts: usize,
}

/// Mean and population standard deviation of the sizes per `(n, pipeline)`,
/// ignoring skipped and timed-out records.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, Pipeline)> = records
        .iter()
        .filter(|r| r.skip.is_none())
        .map(|r| (r.n, r.pipeline))
        .collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(n, pipeline)| {
            let group = records
                .iter()
                .filter(|r| r.n == n && r.pipeline == pipeline && r.skip.is_none());
            let timeouts = group.clone().filter(|r| r.timed_out).count();
            let sizes: Vec<f64> = group.filter_map(|r| r.size).map(|s| s as f64).collect();
            let count = sizes.len();
            let (mean, std) = if count == 0 {
                (f64::NAN, f64::NAN)
            } else {
                let mean = sizes.iter().sum::<f64>() / count as f64;
                let var = sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / count as f64;
                (mean, var.sqrt())
            };
            SummaryRow {
                n,
                pipeline,
                mean_size: mean,
                std_size: std,
                count,
                timeouts,
            }
        })
        .collect()
}

pub const CSV_HEADER: [&str; 6] = ["n", "pipeline", "mean_size", "std_size", "count", "timeouts"];

pub fn to_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::input(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.pipeline.to_string(),
            format!("{:.4}", r.mean_size),
            format!("{:.4}", r.std_size),
            r.count.to_string(),
            r.timeouts.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn parse_csv(text: &str) -> Result<Vec<SummaryRow>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let headers = rd.headers().map_err(|e| Error::input(format!("csv: {e}")))?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(Error::input(format!("unexpected csv header {headers:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        let field = |k: usize| rec.get(k).ok_or_else(|| Error::parse(line, "missing field"));
        let num = |k: usize| -> Result<f64> {
            field(k)?
                .parse()
                .map_err(|_| Error::parse(line, format!("bad number in column {}", CSV_HEADER[k])))
        };
        let pipeline = match field(1)? {
            "A" => Pipeline::A,
            "B" => Pipeline::B,
            other => return Err(Error::parse(line, format!("unknown pipeline '{other}'"))),
        };
        rows.push(SummaryRow {
            n: num(0)? as usize,
            pipeline,
            mean_size: num(2)?,
            std_size: num(3)?,
            count: num(4)? as usize,
            timeouts: num(5)? as usize,
        });
    }
    Ok(rows)
}

/// A matplotlib script plotting the summary CSV at `csv_path` with log-scale
/// sizes and standard-deviation error bars.
pub fn plot_script(csv_path: &str) -> String {
    format!(
        r#"import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open({csv_path:?})))
labels = {{"A": "{a}", "B": "{b}"}}
for tag in ("B", "A"):
    sel = [r for r in rows if r["pipeline"] == tag]
    xs = [int(r["n"]) for r in sel]
    ys = [float(r["mean_size"]) for r in sel]
    es = [float(r["std_size"]) for r in sel]
    plt.errorbar(xs, ys, yerr=es, marker="o", label=labels[tag])
plt.yscale("log")
plt.xlabel("n")
plt.ylabel("|S|")
plt.legend(loc="upper left")
plt.savefig("sizes.pdf")
"#,
        a = Pipeline::A.label(),
        b = Pipeline::B.label(),
    )
}
