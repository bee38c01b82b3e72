//! Batch verifier: loads model specs, runs identity suites, reports.
//!
//! Report JSON (`supercpn-report/1`):
//!
//! ```text
//! { "schema": "supercpn-report/1", "model": <name>,
//!   "records": [ { "check", "k", "lambda", "status", "failing", "leading", "error", "wall_ms" } ],
//!   "summary": { "pass", "fail", "error" } }
//! ```
//!
//! `k` and `lambda` are `null` for global checks; `lambda` is an exact
//! `[re, im]` pair. `failing`/`leading` name the first nonzero defect and its
//! lexicographically first nonzero jet coefficient. Records are sorted by
//! `(check, k, lambda)` so reports differ only in `wall_ms`.

pub mod examples;
pub mod spec;
pub mod suites;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Scalar;
use crate::error::{Error, Result};
use crate::model::ModelData;
use crate::Gq;

use spec::{complex_str, ComplexStr, ModelSpec, ResolvedSpec};
use suites::{plan, run_task, Suite, Task};

pub const REPORT_SCHEMA: &str = "supercpn-report/1";
pub const JOBS_ENV: &str = "SUPERCPN_JOBS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub check: String,
    pub k: Option<usize>,
    pub lambda: Option<ComplexStr>,
    pub status: Status,
    pub failing: Option<String>,
    pub leading: Option<String>,
    pub error: Option<String>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: String,
    pub model: String,
    pub records: Vec<Record>,
    pub summary: Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

impl Report {
    fn new(model: &str, records: Vec<Record>) -> Self {
        let mut summary = Summary::default();
        for r in &records {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Error => summary.error += 1,
            }
        }
        Report { schema: REPORT_SCHEMA.to_string(), model: model.to_string(), records, summary }
    }

    /// 2 if any check errored, else 1 if any failed, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.summary.error > 0 {
            2
        } else if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serialises");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = format!("model {}\n", self.model);
        let width = self.records.iter().map(|r| r.check.len()).max().unwrap_or(5).max(5);
        out.push_str(&format!("{:<width$}  {:>3}  {:<24}  {:<6}  {:>8}  detail\n", "check", "k", "lambda", "status", "ms"));
        for r in &self.records {
            let k = r.k.map_or("-".to_string(), |k| k.to_string());
            let lambda = r.lambda.as_ref().map_or("-".to_string(), |[re, im]| format!("{re} + {im}i"));
            let detail = match r.status {
                Status::Pass => String::new(),
                Status::Fail => format!(
                    "{}: {}",
                    r.failing.as_deref().unwrap_or("?"),
                    r.leading.as_deref().unwrap_or("nonzero")
                ),
                Status::Error => r.error.clone().unwrap_or_default(),
            };
            out.push_str(&format!(
                "{:<width$}  {k:>3}  {lambda:<24}  {:<6}  {:>8}  {detail}\n",
                r.check,
                r.status.label(),
                r.wall_ms
            ));
        }
        let s = &self.summary;
        out.push_str(&format!("{} passed, {} failed, {} errors\n", s.pass, s.fail, s.error));
        out
    }
}

fn record_for<S: Scalar>(task: &Task<S>, outcome: Result<Vec<suites::Finding>>, wall_ms: u64) -> Record {
    let lambda = task.lambda.as_ref().map(|l| complex_str(&l.value));
    let mut rec = Record {
        check: task.suite.name().to_string(),
        k: task.k,
        lambda,
        status: Status::Pass,
        failing: None,
        leading: None,
        error: None,
        wall_ms,
    };
    match outcome {
        Ok(findings) => {
            if let Some(f) = findings.into_iter().find(|f| f.leading.is_some()) {
                rec.status = Status::Fail;
                rec.failing = Some(f.name);
                rec.leading = f.leading;
            }
        }
        Err(e) => {
            rec.status = Status::Error;
            rec.error = Some(e.to_string());
        }
    }
    rec
}

fn run_one<S: Scalar>(model: &ModelData<S>, spec: &ResolvedSpec<S>, task: &Task<S>) -> Record {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| run_task(model, spec, task)))
        .unwrap_or_else(|p| Err(Error::Precondition(format!("internal panic: {}", panic_message(&p)))));
    record_for(task, outcome, start.elapsed().as_millis() as u64)
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown".into())
}

/// Parses a comma-separated check list; `None` uses the spec's own list.
pub fn select_suites(spec: &ModelSpec, checks: Option<&[String]>) -> Result<Vec<Suite>> {
    let names: &[String] = checks.unwrap_or(&spec.checks);
    names.iter().filter(|s| !s.trim().is_empty()).map(|s| Suite::parse(s)).collect()
}

/// Runs the selected suites on `jobs` worker threads.
///
/// Only an unknown check name is an `Err`; everything else, including a
/// spec that fails to resolve or build, becomes error records.
pub fn run_verify(spec: &ModelSpec, checks: Option<&[String]>, jobs: usize) -> Result<Report> {
    let suites = select_suites(spec, checks)?;
    let resolved = match spec.resolve::<Gq>() {
        Ok(r) => r,
        Err(e) => {
            let tasks: Vec<Task<Gq>> = suites.iter().map(|&suite| Task { suite, k: None, lambda: None }).collect();
            let records = tasks.iter().map(|t| record_for(t, Err(e.clone()), 0)).collect();
            return Ok(Report::new(&spec.name, records));
        }
    };
    let model = match ModelData::from_chain_unchecked(resolved.psis.clone(), resolved.epsilons.clone()) {
        Ok(m) => m,
        Err(e) => return Ok(failed_build(spec, &suites, &resolved.lambdas, &e)),
    };
    let tasks = plan(&suites, spec.n, &resolved.lambdas);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Parse(format!("worker pool: {e}")))?;
    let records = pool.install(|| tasks.par_iter().map(|t| run_one(&model, &resolved, t)).collect());
    Ok(Report::new(&spec.name, records))
}

fn failed_build<S: Scalar>(spec: &ModelSpec, suites: &[Suite], lambdas: &[S], e: &Error) -> Report {
    let records = plan(suites, spec.n, lambdas)
        .iter()
        .map(|t| record_for(t, Err(e.clone()), 0))
        .collect();
    Report::new(&spec.name, records)
}

#[derive(Parser, Debug)]
#[command(name = "supercpn", version, about = "Exact identity verifier for supersymmetric CP^(N-1) solutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run identity suites on a model spec.
    Verify {
        spec: PathBuf,
        /// Comma-separated suite names; defaults to the spec's list.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, env = JOBS_ENV)]
        jobs: Option<usize>,
    },
    /// Write a built-in model spec.
    Example {
        /// veronese_cp<n> (1..=8), eta_cp1 or negative_control.
        name: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Verify { spec, checks, format, jobs } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| Error::Parse(format!("{}: {e}", spec.display())))?;
            let spec = ModelSpec::parse(&text)?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let report = run_verify(&spec, checks.as_deref(), jobs)?;
            print!("{}", report.render(format));
            Ok(report.exit_code())
        }
        Command::Example { name, output } => {
            let spec = examples::example_spec(&name)?;
            std::fs::write(&output, spec.to_json()).map_err(|e| Error::Parse(format!("{}: {e}", output.display())))?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip_times(mut r: Report) -> String {
        for rec in &mut r.records {
            rec.wall_ms = 0;
        }
        r.render(Format::Json)
    }

    #[test]
    fn report_is_deterministic_across_job_counts() {
        let spec = examples::example_spec("veronese_cp1").unwrap();
        let checks: Vec<String> = ["chain", "el", "mc"].iter().map(|s| s.to_string()).collect();
        let a = run_verify(&spec, Some(&checks), 1).unwrap();
        let b = run_verify(&spec, Some(&checks), 4).unwrap();
        assert_eq!(a.exit_code(), 0);
        assert_eq!(strip_times(a), strip_times(b));
    }

    #[test]
    fn singular_body_is_an_error_record() {
        let mut spec = examples::example_spec("veronese_cp1").unwrap();
        spec.psi[0] = vec![vec![], vec![]];
        let r = run_verify(&spec, Some(&["el".to_string()]), 1).unwrap();
        assert_eq!(r.exit_code(), 2);
        assert!(r.records.iter().all(|rec| rec.status == Status::Error));
    }

    #[test]
    fn missing_reduction_block_and_unknown_checks() {
        let spec = examples::example_spec("veronese_cp1").unwrap();
        let r = run_verify(&spec, Some(&["reduction".to_string()]), 1).unwrap();
        assert_eq!(r.exit_code(), 2);
        assert!(run_verify(&spec, Some(&["nope".to_string()]), 1).is_err());
    }

    #[test]
    fn negative_control_fails_but_chain_passes() {
        let spec = examples::negative_control();
        let r = run_verify(&spec, None, 2).unwrap();
        assert_eq!(r.exit_code(), 1);
        let status = |c: &str| r.records.iter().filter(|x| x.check == c).map(|x| x.status).collect::<Vec<_>>();
        assert!(status("chain").iter().all(|s| *s == Status::Pass));
        for c in ["el", "conservation", "mc"] {
            assert!(status(c).contains(&Status::Fail), "{c}");
        }
        let text = r.render(Format::Text);
        assert!(text.contains("FAIL"));
    }
}
