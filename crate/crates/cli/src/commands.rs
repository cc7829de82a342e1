//! Command dispatch. Exit codes: 0 success/Equal, 1 NotEqual,
//! 2 Unknown/fuel-exhausted/clipped, 64 parse or usage error.

use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};

use dlam::dmodel::{interp_eq, interpret, Budgets, InterpEntry};
use dlam::mrel::{check_axioms, Elem, GenParams, MSet};
use dlam::rewrite::{
    normalize_diff, normalize_res, taylor, taylor_eq, taylor_nf, theory_eq_diff, theory_eq_res,
    Fuel, TaylorBudget, Verdict,
};
use dlam::term::{SumMode, Var};
use dlam::translate::{to_diff, to_res};

use crate::syntax::{expand_lets, parse_diff, parse_res};

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Calculus {
    Diff,
    Res,
}

fn parse_let_binding(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((name, body)) if !name.trim().is_empty() => {
            Ok((name.trim().to_string(), body.to_string()))
        }
        _ => Err(format!("expected `name=term`, got `{s}`")),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "dlam",
    about = "Workbench for the differential lambda calculus and the resource calculus"
)]
pub struct Cli {
    /// Bind an abbreviation, expanded textually before parsing (repeatable).
    #[arg(long = "let", value_parser = parse_let_binding, global = true)]
    pub lets: Vec<(String, String)>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a term and print its canonical form.
    Parse {
        #[arg(long, value_enum, default_value_t = Calculus::Diff)]
        calculus: Calculus,
        /// Term text, or `-` for stdin.
        term: String,
    },
    /// Normalize a term (fuel-bounded).
    Reduce {
        #[arg(long, value_enum, default_value_t = Calculus::Diff)]
        calculus: Calculus,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        /// Apply eta-contraction at normal forms.
        #[arg(long)]
        eta: bool,
        term: String,
    },
    /// Bounded theory equality of two terms.
    Eq {
        #[arg(long, value_enum, default_value_t = Calculus::Diff)]
        calculus: Calculus,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        #[arg(long)]
        eta: bool,
        /// Collapse sum multiplicities before comparing.
        #[arg(long)]
        idempotent: bool,
        a: String,
        b: String,
    },
    /// Truncated Taylor expansion of a differential term.
    Taylor {
        /// Maximal expansion index per application node.
        #[arg(long, default_value_t = 4)]
        degree: u64,
        /// Maximal simple-term size retained.
        #[arg(long, default_value_t = 200)]
        cap: u64,
        /// Also reduce the expansion to its normal form.
        #[arg(long)]
        nf: bool,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        term: String,
    },
    /// Budget-relative Taylor equality.
    TaylorEq {
        #[arg(long, default_value_t = 4)]
        degree: u64,
        #[arg(long, default_value_t = 200)]
        cap: u64,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        a: String,
        b: String,
    },
    /// Budgeted interpretation in the relational model (JSON output).
    Interp {
        /// Comma-separated adequate variable list (may be empty).
        #[arg(long, default_value = "")]
        vars: String,
        /// Output entry size bound.
        #[arg(long, default_value_t = 8)]
        size: u64,
        /// Internal witness size bound.
        #[arg(long, default_value_t = 16)]
        witness: u64,
        /// Normalize before interpreting.
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        term: String,
    },
    /// Compare two budgeted interpretations.
    InterpEq {
        #[arg(long, default_value = "")]
        vars: String,
        #[arg(long, default_value_t = 8)]
        size: u64,
        #[arg(long, default_value_t = 16)]
        witness: u64,
        /// Normalize the left term before interpreting.
        #[arg(long)]
        normalize_left: bool,
        /// Normalize the right term before interpreting.
        #[arg(long)]
        normalize_right: bool,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        a: String,
        b: String,
    },
    /// Translate between the two calculi.
    Translate {
        /// Target calculus.
        #[arg(long, value_enum)]
        to: Calculus,
        term: String,
    },
    /// Run the categorical axiom laboratory and print the report.
    Axioms {
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximal atom-universe size.
        #[arg(long, default_value_t = 4)]
        atoms: u32,
        /// Maximal multiset size.
        #[arg(long, default_value_t = 3)]
        mset_size: u64,
        /// Maximal relation size in pairs.
        #[arg(long, default_value_t = 6)]
        rel_size: usize,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_EQUAL: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

fn read_term(text: &str) -> Result<String, String> {
    if text == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("cannot read stdin: {e}"))?;
        Ok(buf)
    } else {
        Ok(text.to_string())
    }
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Equal => EXIT_OK,
        Verdict::NotEqual => EXIT_NOT_EQUAL,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn parse_vars(text: &str) -> Result<Vec<Var>, String> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if !part.chars().next().unwrap().is_ascii_alphabetic()
            || !part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(format!("invalid variable name `{part}`"));
        }
        out.push(Var::new(part));
    }
    Ok(out)
}

fn mset_json(m: &MSet) -> serde_json::Value {
    serde_json::Value::Array(m.occurrences().into_iter().map(delem_json).collect())
}

fn delem_json(e: &Elem) -> serde_json::Value {
    match e {
        Elem::Seq(ms) => serde_json::Value::Array(ms.iter().map(mset_json).collect()),
        _ => unreachable!("interpretation values are elements of D"),
    }
}

fn entry_json(e: &InterpEntry) -> serde_json::Value {
    serde_json::json!({
        "ctx": e.ctx.iter().map(mset_json).collect::<Vec<_>>(),
        "val": delem_json(&e.val),
    })
}

/// Execute a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn run_inner(cli: &Cli) -> Result<i32, String> {
    let prep =
        |text: &str| -> Result<String, String> { Ok(expand_lets(&read_term(text)?, &cli.lets)) };
    let diff = |text: &str| -> Result<dlam::term::DiffSum, String> {
        parse_diff(&prep(text)?).map_err(|e| e.to_string())
    };
    let res = |text: &str| -> Result<dlam::res::ResSum, String> {
        parse_res(&prep(text)?).map_err(|e| e.to_string())
    };

    match &cli.command {
        Command::Parse { calculus, term } => {
            match calculus {
                Calculus::Diff => println!("{}", diff(term)?),
                Calculus::Res => println!("{}", res(term)?),
            }
            Ok(EXIT_OK)
        }
        Command::Reduce {
            calculus,
            fuel,
            eta,
            term,
        } => {
            let exhausted = match calculus {
                Calculus::Diff => {
                    let (nf, exhausted) = normalize_diff(&diff(term)?, Fuel(*fuel), *eta);
                    println!("{nf}");
                    exhausted
                }
                Calculus::Res => {
                    let (nf, exhausted) = normalize_res(&res(term)?, Fuel(*fuel), *eta);
                    println!("{nf}");
                    exhausted
                }
            };
            Ok(if exhausted { EXIT_UNKNOWN } else { EXIT_OK })
        }
        Command::Eq {
            calculus,
            fuel,
            eta,
            idempotent,
            a,
            b,
        } => {
            let mode = if *idempotent {
                SumMode::Idempotent
            } else {
                SumMode::Counted
            };
            let v = match calculus {
                Calculus::Diff => theory_eq_diff(&diff(a)?, &diff(b)?, Fuel(*fuel), *eta, mode),
                Calculus::Res => theory_eq_res(&res(a)?, &res(b)?, Fuel(*fuel), *eta, mode),
            };
            println!("{v:?}");
            Ok(verdict_exit(v))
        }
        Command::Taylor {
            degree,
            cap,
            nf,
            fuel,
            term,
        } => {
            let budget = TaylorBudget {
                degree: *degree,
                size_cap: *cap,
            };
            let (expansion, clipped) = taylor(&diff(term)?, &budget);
            if *nf {
                match taylor_nf(&expansion, Fuel(*fuel)) {
                    Ok(normal) => println!("{normal}"),
                    Err(dlam::rewrite::TaylorNfError::FuelExhausted) => {
                        eprintln!("error: {}", dlam::rewrite::TaylorNfError::FuelExhausted);
                        return Ok(EXIT_UNKNOWN);
                    }
                    Err(e) => return Err(e.to_string()),
                }
            } else {
                println!("{expansion}");
            }
            Ok(if clipped { EXIT_UNKNOWN } else { EXIT_OK })
        }
        Command::TaylorEq {
            degree,
            cap,
            fuel,
            a,
            b,
        } => {
            let budget = TaylorBudget {
                degree: *degree,
                size_cap: *cap,
            };
            let v = taylor_eq(&diff(a)?, &diff(b)?, &budget, Fuel(*fuel));
            println!("{v:?}");
            Ok(verdict_exit(v))
        }
        Command::Interp {
            vars,
            size,
            witness,
            normalize,
            fuel,
            term,
        } => {
            let vars = parse_vars(vars)?;
            let budgets = Budgets::new(*size, *witness);
            let out = interpret(&diff(term)?, &vars, &budgets, *normalize, Fuel(*fuel))
                .map_err(|e| e.to_string())?;
            let entries: Vec<_> = out.entries.iter().map(entry_json).collect();
            println!("{}", serde_json::Value::Array(entries));
            Ok(if out.clipped { EXIT_UNKNOWN } else { EXIT_OK })
        }
        Command::InterpEq {
            vars,
            size,
            witness,
            normalize_left,
            normalize_right,
            fuel,
            a,
            b,
        } => {
            let vars = parse_vars(vars)?;
            let budgets = Budgets::new(*size, *witness);
            let v = interp_eq(
                &diff(a)?,
                &diff(b)?,
                &vars,
                &budgets,
                *normalize_left,
                *normalize_right,
                Fuel(*fuel),
            )
            .map_err(|e| e.to_string())?;
            println!("{v:?}");
            Ok(verdict_exit(v))
        }
        Command::Translate { to, term } => {
            match to {
                Calculus::Res => println!("{}", to_res(&diff(term)?)),
                Calculus::Diff => println!("{}", to_diff(&res(term)?)),
            }
            Ok(EXIT_OK)
        }
        Command::Axioms {
            trials,
            seed,
            atoms,
            mset_size,
            rel_size,
        } => {
            let params = GenParams {
                atom_max: *atoms,
                mset_max: *mset_size,
                rel_max: *rel_size,
            };
            let report = check_axioms(*seed, *trials, &params);
            print!("{report}");
            Ok(if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_NOT_EQUAL
            })
        }
    }
}
