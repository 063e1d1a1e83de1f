//! `ltlsat`: decide one LTL formula read from stdin.
//!
//! Prints `UNSAT`, or `SAT` and a lasso trace on the next line. This is the
//! protocol `ltl-decompose --engine external:<command>` expects, so the
//! binary doubles as a reference external solver.

use std::io::Read;
use std::process::ExitCode;

use clap::Parser;
use ltl_decompose::engine::{Engine, EngineError, SatResult, DEFAULT_STATE_CAP};
use ltl_decompose::syntax::parse_formula;

#[derive(Debug, Parser)]
#[command(name = "ltlsat", version)]
struct Cli {
    #[arg(long, default_value_t = DEFAULT_STATE_CAP, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    state_cap: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut input = String::new();
    if let Err(e) = std::io::stdin().read_to_string(&mut input) {
        eprintln!("ltlsat: {e}");
        return ExitCode::from(1);
    }
    let f = match parse_formula(&input) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("ltlsat: {e}");
            return ExitCode::from(1);
        }
    };
    match Engine::with_state_cap(cli.state_cap).ltl_sat(&f) {
        Ok(SatResult::Unsat) => println!("UNSAT"),
        Ok(SatResult::Sat(t)) => println!("SAT\n{t}"),
        Err(e @ EngineError::StateLimit { .. }) => {
            eprintln!("ltlsat: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("ltlsat: {e}");
            return ExitCode::from(3);
        }
    }
    ExitCode::SUCCESS
}
