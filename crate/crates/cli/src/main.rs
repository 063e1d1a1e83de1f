//! `ltl-decompose`: split a specification's system variables into
//! independent blocks.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ltl_decompose::decompose::{
    partition, verify_partition, AuditKind, AuditOptions, AuditOutcome, AuditReport, DecomposeError, PartitionResult,
    QueryRecord, VarOrder,
};
use ltl_decompose::engine::{Engine, ExternalSolver, Oracle, SatResult, DEFAULT_STATE_CAP};
use ltl_decompose::syntax::{parse_spec, Signature, Spec};
use ltl_decompose::trace::format_trace;
use serde_json::{json, Value};

const INPUT_ERROR: u8 = 1;
const ENGINE_FAILURE: u8 = 2;
const AUDIT_FAILURE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Order {
    Decl,
    Lex,
}

/// Partition the system variables of an LTL specification into
/// independent blocks.
#[derive(Debug, Parser)]
#[command(name = "ltl-decompose", version)]
struct Cli {
    /// Specification file (`env:` / `sys:` / `formula:`).
    input: PathBuf,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,

    /// Order in which variables are tried as seeds and candidates.
    #[arg(long, value_enum, default_value = "decl")]
    order: Order,

    /// `internal`, or `external:<command>` to run a solver per query.
    #[arg(long, default_value = "internal")]
    engine: String,

    /// Automaton state limit for the internal engine.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    state_cap: usize,

    /// Re-solve every block's dependence query and certificate.
    #[arg(long)]
    verify: bool,

    /// Also check that no nonempty proper subset of a block is independent.
    #[arg(long)]
    audit_minimality: bool,

    /// Write every query to `<input>.evidence.jsonl`.
    #[arg(long)]
    log_queries: bool,

    /// Print nothing on success; the exit code carries the result.
    #[arg(long, short)]
    quiet: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn oracle(cli: &Cli) -> Result<Box<dyn Oracle>, Failure> {
    if cli.engine == "internal" {
        return Ok(Box::new(Engine::with_state_cap(cli.state_cap)));
    }
    let Some(cmd) = cli.engine.strip_prefix("external:") else {
        return Err(Failure::new(
            INPUT_ERROR,
            format!("unknown engine `{}`; expected `internal` or `external:<command>`", cli.engine),
        ));
    };
    match ExternalSolver::from_command_line(cmd) {
        Some(solver) => Ok(Box::new(solver)),
        None => Err(Failure::new(INPUT_ERROR, "external engine needs a command")),
    }
}

fn evidence_path(input: &Path) -> PathBuf {
    let mut name = input.as_os_str().to_owned();
    name.push(".evidence.jsonl");
    PathBuf::from(name)
}

fn write_evidence(path: &Path, log: &[QueryRecord], sig: &Signature) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for q in log {
        let (verdict, witness) = match &q.result {
            SatResult::Unsat => ("unsat", Value::Null),
            SatResult::Sat(t) => ("sat", Value::String(format_trace(t, sig))),
        };
        let line = json!({
            "query": q.formula.to_string(),
            "verdict": verdict,
            "witness": witness,
            "millis": q.elapsed.as_secs_f64() * 1000.0,
        });
        writeln!(out, "{line}")?;
    }
    out.flush()
}

fn audit_summary(report: &AuditReport, kind: AuditKind) -> Value {
    let checks: Vec<_> = report.of_kind(kind.clone()).collect();
    let failures: Vec<Value> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| {
            let detail = match &c.outcome {
                AuditOutcome::Pass => Value::Null,
                AuditOutcome::Fail(Some(t)) => Value::String(t.to_string()),
                AuditOutcome::Fail(None) => Value::String("failed".into()),
                AuditOutcome::Error(e) => Value::String(format!("error: {e}")),
            };
            json!({ "block": c.block, "subset": c.subset, "detail": detail })
        })
        .collect();
    json!({
        "checks": checks.len(),
        "passed": failures.is_empty(),
        "failures": failures,
    })
}

fn audit_json(report: &AuditReport, minimality: bool) -> Value {
    let mut audits = serde_json::Map::new();
    audits.insert("certificate".into(), audit_summary(report, AuditKind::Certificate));
    audits.insert("soundness".into(), audit_summary(report, AuditKind::Soundness));
    if minimality {
        let mut m = audit_summary(report, AuditKind::Minimality);
        m["skipped"] = json!(report.skipped);
        audits.insert("minimality".into(), m);
    }
    Value::Object(audits)
}

fn decompose_failure(e: &DecomposeError) -> Failure {
    let code = match e {
        DecomposeError::Oracle { source, .. } if source.is_resource_failure() => ENGINE_FAILURE,
        _ => AUDIT_FAILURE,
    };
    Failure::new(code, e.to_string())
}

fn print_text(spec: &Spec, blocks: &[Vec<String>], result: &PartitionResult, audits: Option<&AuditReport>) {
    println!("env: {}", spec.env().join(" "));
    println!("sys: {}", spec.sys().join(" "));
    println!("blocks:");
    for b in blocks {
        println!("  {{{}}}", b.join(", "));
    }
    println!("queries: {}", result.query_count());
    if let Some(report) = audits {
        for kind in [AuditKind::Certificate, AuditKind::Soundness, AuditKind::Minimality] {
            let checks: Vec<_> = report.of_kind(kind.clone()).collect();
            if checks.is_empty() {
                continue;
            }
            let failed = checks.iter().filter(|c| !c.passed()).count();
            let verdict = if failed == 0 { "ok" } else { "FAILED" };
            println!("audit {kind:?}: {verdict} ({} checks, {failed} failed)", checks.len());
            for c in checks.iter().filter(|c| !c.passed()) {
                println!("  block {:?}, subset {:?}: {:?}", c.block, c.subset, c.outcome);
            }
        }
        for b in &report.skipped {
            println!("  minimality skipped for {{{}}}", b.join(", "));
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&cli.input)
        .map_err(|e| Failure::new(INPUT_ERROR, format!("{}: {e}", cli.input.display())))?;
    let spec = parse_spec(&text).map_err(|e| Failure::new(INPUT_ERROR, format!("{}:{e}", cli.input.display())))?;
    let oracle = oracle(cli)?;
    let order = match cli.order {
        Order::Decl => VarOrder::Declaration,
        Order::Lex => VarOrder::Lexicographic,
    };

    let evidence = cli.log_queries.then(|| evidence_path(&cli.input));
    let result = match partition(&spec, oracle.as_ref(), order) {
        Ok(r) => r,
        Err(e) => {
            if let Some(path) = &evidence {
                // keep what was answered before the failure
                let _ = write_evidence(path, e.partial_log(), &spec.signature);
            }
            return Err(decompose_failure(&e));
        }
    };
    if let Some(path) = &evidence {
        write_evidence(path, &result.query_log, &spec.signature)
            .map_err(|e| Failure::new(INPUT_ERROR, format!("{}: {e}", path.display())))?;
    }

    let audits = (cli.verify || cli.audit_minimality).then(|| {
        let options = AuditOptions {
            minimality: cli.audit_minimality,
            ..AuditOptions::default()
        };
        verify_partition(&spec, &result, oracle.as_ref(), options)
    });

    let blocks = result.canonical_blocks(&spec.signature);
    if !cli.quiet {
        match cli.format {
            Format::Text => print_text(&spec, &blocks, &result, audits.as_ref()),
            Format::Json => {
                let out = json!({
                    "env": spec.env(),
                    "sys": spec.sys(),
                    "blocks": blocks,
                    "queries": result.query_count(),
                    "audits": audits.as_ref().map_or(json!({}), |r| audit_json(r, cli.audit_minimality)),
                    "evidence_path": evidence.as_ref().map(|p| p.display().to_string()),
                });
                println!("{}", serde_json::to_string_pretty(&out).expect("JSON values serialize"));
            }
        }
    }

    if let Some(report) = &audits {
        let failed = report.checks.iter().any(|c| matches!(c.outcome, AuditOutcome::Fail(_)));
        let errored = report.checks.iter().any(|c| matches!(c.outcome, AuditOutcome::Error(_)));
        if failed {
            return Err(Failure::new(AUDIT_FAILURE, "audit failed"));
        }
        if errored {
            return Err(Failure::new(ENGINE_FAILURE, "audit could not be completed: solver failure"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(INPUT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ltl-decompose: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
