//! Command-line front end: expand, normalize, verify, enumerate covers, run
//! concrete checks, and export the rule catalog.
//!
//! Exit status: 0 on success or a verified equivalence, 1 on a verification
//! or concrete-check mismatch, 2 on usage errors, 3 on internal invariant
//! failures (step-bound exhaustion, a non-decreasing termination measure, or
//! an inexact complex).

use afcalc_core::calculus::{verify_chain_rule, VerificationReport};
use afcalc_core::concrete::{
    check_rule_concrete, parse_functor, Assignment, ConcreteError, DEFAULT_TRUNCATION,
};
use afcalc_core::grammar::{parse_term, print_term};
use afcalc_core::latex::{normal_form_latex, trace_latex};
use afcalc_core::rewrite::{
    enumerate_covers, normalize, rule_catalog, CoverError, Normalization, RewriteConfig,
    RewriteError, RuleId,
};
use afcalc_core::term::{canonicalize, Func, FunctorAtom, Term};
use clap::{Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "afcalc",
    about = "Symbolic cross-effect calculus of abelian functors with an exact \
             rational backend",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
    Latex,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Side {
    #[default]
    Lhs,
    Rhs,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Stage {
    /// Summands before the composition-pushing rules.
    Pre,
    /// The final atomic summands.
    #[default]
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the covers of {1..p} by pairwise distinct subsets.
    Covers {
        #[arg(short)]
        p: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Expand one side of the chain rule for F ∘ G.
    Expand {
        #[arg(long, value_enum, default_value_t)]
        side: Side,
        #[arg(long, default_value_t = 2)]
        order: u8,
        #[arg(long, value_enum, default_value_t)]
        stage: Stage,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Normalize a term given in the text grammar.
    Normalize {
        #[arg(long)]
        term: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Also print the rewrite trace.
        #[arg(long)]
        trace: bool,
    },
    /// Verify the chain rule at the given order for abstract F, G.
    Verify {
        #[arg(long, default_value_t = 2)]
        order: u8,
        /// Emit the summand pairing table.
        #[arg(long)]
        emit_pairing: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Disable rules (comma separated, e.g. `R5,R8a`) to watch the
        /// verification fail.
        #[arg(long, value_delimiter = ',')]
        disable: Vec<String>,
    },
    /// Check a rewrite rule on concrete polynomial functors.
    Concrete {
        /// Rule to check: R1, R2, R3, R5, R6 or R8a.
        #[arg(long)]
        rule: String,
        /// Interpretation of F: `id`, `constN`, `tensorN`, `symN`, sums with
        /// `+`, composition with `.`.
        #[arg(long, default_value = "tensor2")]
        outer: String,
        /// Interpretation of G.
        #[arg(long, default_value = "id + tensor2")]
        inner: String,
        /// Variable dimensions, e.g. `x=2,y=1`.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<String>,
        /// Truncation degree of the complexes.
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncate: usize,
    },
    /// Export the rule catalog.
    Rules {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn internal_error(msg: &str) -> ExitCode {
    eprintln!("internal invariant failure: {msg}");
    ExitCode::from(3)
}

fn config() -> RewriteConfig {
    let mut cfg = RewriteConfig::default();
    if let Ok(bound) = std::env::var("AFCALC_STEP_BOUND") {
        if let Ok(fuel) = bound.parse::<usize>() {
            cfg.fuel = fuel;
        }
    }
    cfg
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe instead of panicking mid-print.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Covers { p, format } => covers(p, format),
        Command::Expand {
            side,
            order,
            stage,
            format,
        } => expand(side, order, stage, format),
        Command::Normalize {
            term,
            format,
            trace,
        } => do_normalize(&term, format, trace),
        Command::Verify {
            order,
            emit_pairing,
            format,
            disable,
        } => verify(order, emit_pairing, format, &disable),
        Command::Concrete {
            rule,
            outer,
            inner,
            dims,
            truncate,
        } => concrete(&rule, &outer, &inner, &dims, truncate),
        Command::Rules { format } => rules(format),
    }
}

fn covers(p: usize, format: Format) -> ExitCode {
    match enumerate_covers(p) {
        Ok(covers) => {
            match format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&covers).unwrap())
                }
                _ => {
                    println!("{} covers of {{1..{p}}}:", covers.len());
                    for c in &covers {
                        let members: Vec<String> = c
                            .members
                            .iter()
                            .map(|m| {
                                if m.is_empty() {
                                    "{}".to_string()
                                } else {
                                    format!(
                                        "{{{}}}",
                                        m.iter()
                                            .map(usize::to_string)
                                            .collect::<Vec<_>>()
                                            .join(",")
                                    )
                                }
                            })
                            .collect();
                        println!("  {}", members.join(" "));
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(e @ CoverError::ZeroP) | Err(e @ CoverError::TooLarge(_)) => {
            usage_error(&e.to_string())
        }
    }
}

fn abstract_pair() -> (Func, Func) {
    (
        Func::atom(FunctorAtom::abstract_unary("F")),
        Func::atom(FunctorAtom::abstract_unary("G")),
    )
}

fn print_atoms(atoms: &[Term], format: Format) {
    match format {
        Format::Json => {
            let texts: Vec<String> = atoms.iter().map(print_term).collect();
            let doc = serde_json::json!({ "atoms": atoms, "text": texts });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Latex => {
            let nf = afcalc_core::rewrite::NormalForm {
                atoms: atoms.to_vec(),
                trace: Vec::new(),
            };
            print!("{}", normal_form_latex(&nf));
        }
        Format::Text => {
            for atom in atoms {
                println!("{}", print_term(atom));
            }
        }
    }
}

fn expand(side: Side, order: u8, stage: Stage, format: Format) -> ExitCode {
    if order == 0 || order > 2 {
        return usage_error("orders 1 and 2 are supported");
    }
    let (f, g) = abstract_pair();
    let result = afcalc_core::calculus::expand_sides(order, &f, &g, &config());
    let (lhs, rhs) = match result {
        Ok(sides) => sides,
        Err(e) => return internal_error(&e.to_string()),
    };
    let chosen: &Normalization = match side {
        Side::Lhs => &lhs,
        Side::Rhs => &rhs,
    };
    let atoms = match (side, stage) {
        (Side::Lhs, Stage::Pre) => chosen.pre_composition.clone().unwrap_or_default(),
        _ => chosen.nf.atoms.clone(),
    };
    print_atoms(&atoms, format);
    ExitCode::SUCCESS
}

fn do_normalize(input: &str, format: Format, with_trace: bool) -> ExitCode {
    let term = match parse_term(input) {
        Ok(t) => t,
        Err(e) => return usage_error(&format!("cannot parse term: {e}")),
    };
    match normalize(&term, &config()) {
        Ok(n) => {
            match format {
                Format::Json => {
                    let texts: Vec<String> = n.nf.atoms.iter().map(print_term).collect();
                    let mut doc = serde_json::json!({
                        "input": print_term(&canonicalize(&term)),
                        "atoms": n.nf.atoms,
                        "text": texts,
                        "steps": n.nf.trace.len(),
                    });
                    if with_trace {
                        doc["trace"] = serde_json::to_value(&n.nf.trace).unwrap();
                    }
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
                Format::Latex => {
                    if with_trace {
                        print!("{}", trace_latex(&n.nf.trace));
                    }
                    print!("{}", normal_form_latex(&n.nf));
                }
                Format::Text => {
                    if n.nf.atoms.is_empty() {
                        println!("0");
                    } else {
                        for atom in &n.nf.atoms {
                            println!("{}", print_term(atom));
                        }
                    }
                    if with_trace {
                        eprintln!("-- {} rewrite steps --", n.nf.trace.len());
                        for step in &n.nf.trace {
                            eprintln!(
                                "[{:?}] {}  ~>  {}",
                                step.rule,
                                print_term(&step.before),
                                print_term(&step.after)
                            );
                        }
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(RewriteError::FuelExhausted { fuel, pending, .. }) => internal_error(&format!(
            "step bound {fuel} exhausted with {pending} summands pending \
             (raise AFCALC_STEP_BOUND to continue)"
        )),
        Err(e @ RewriteError::MeasureViolation { .. }) => internal_error(&e.to_string()),
    }
}

fn pairing_table(report: &VerificationReport) -> String {
    let mut out = String::new();
    out.push_str("pairing (lhs summand -> rhs atoms, proof type):\n");
    for entry in &report.pairing {
        out.push_str(&format!(
            "  {:<4} -> {:<9} {:?}\n",
            entry.lhs,
            entry.rhs.join(" "),
            entry.proof_type
        ));
    }
    let sizes = afcalc_core::calculus::pairing_group_sizes(&report.pairing);
    out.push_str(&format!(
        "group sizes: Type1={} Type2={} Type3={} Type4={} Type5={}\n",
        sizes[0], sizes[1], sizes[2], sizes[3], sizes[4]
    ));
    out
}

fn verify(order: u8, emit_pairing: bool, format: Format, disable: &[String]) -> ExitCode {
    if order == 0 || order > 2 {
        return usage_error("orders 1 and 2 are supported");
    }
    let mut cfg = config();
    for name in disable {
        let rule = match name.as_str() {
            "R1" => RuleId::R1,
            "R2" => RuleId::R2,
            "R3" => RuleId::R3,
            "R4" => RuleId::R4,
            "R5" => RuleId::R5,
            "R6" => RuleId::R6,
            "R7a" => RuleId::R7a,
            "R7b" => RuleId::R7b,
            "R8a" => RuleId::R8a,
            "R8b" => RuleId::R8b,
            "R9" => RuleId::R9,
            other => return usage_error(&format!("unknown rule `{other}`")),
        };
        cfg.disabled.insert(rule);
    }
    let (f, g) = abstract_pair();
    let report = match verify_chain_rule(order, &f, &g, &cfg) {
        Ok(r) => r,
        Err(e) => return internal_error(&e.to_string()),
    };
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
        _ => {
            println!(
                "order {}: {} ({} lhs atoms, {} rhs atoms, {} pre-split summands)",
                report.order,
                match report.verdict {
                    afcalc_core::calculus::Verdict::Equal => "EQUAL",
                    afcalc_core::calculus::Verdict::Mismatch => "MISMATCH",
                },
                report.lhs_atoms.len(),
                report.rhs_atoms.len(),
                report.lhs_pre_split.len()
            );
            if emit_pairing && !report.pairing.is_empty() {
                print!("{}", pairing_table(&report));
            }
            if let Some((lhs_only, rhs_only)) = &report.diff {
                println!("only on the left:");
                for t in lhs_only {
                    println!("  {}", print_term(t));
                }
                println!("only on the right:");
                for t in rhs_only {
                    println!("  {}", print_term(t));
                }
            }
        }
    }
    match report.verdict {
        afcalc_core::calculus::Verdict::Equal => ExitCode::SUCCESS,
        afcalc_core::calculus::Verdict::Mismatch => ExitCode::from(1),
    }
}

type RuleInstance = (
    RuleId,
    &'static str,
    &'static str,
    Vec<(&'static str, usize)>,
);

/// Built-in instance for each concretely checkable rule.
fn rule_instance(rule: &str) -> Option<RuleInstance> {
    match rule {
        "R1" => Some((
            RuleId::R1,
            "cr2 F(x + y, z)",
            "cr2 F(x, z) + cr2 F(y, z) + cr3 F(x, y, z)",
            vec![("x", 1), ("y", 2), ("z", 1)],
        )),
        "R2" => Some((RuleId::R2, "cr2 F(0, x)", "0", vec![("x", 2)])),
        "R3" => Some((
            RuleId::R3,
            "cr2 (F o G)(x1, x2)",
            "",
            vec![("x1", 1), ("x2", 1)],
        )),
        "R5" => Some((
            RuleId::R5,
            "D1[x2] cr2 F(cr1 G(x2), cr2 G(x1, x2))",
            "0",
            vec![("x1", 1), ("x2", 1)],
        )),
        "R6" => Some((
            RuleId::R6,
            "cr2 F(y, G(x))",
            "cr2 F(y, G0) + cr2 F(y, cr1 G(x)) + cr3 F(y, G0, cr1 G(x))",
            vec![("x", 1), ("y", 2)],
        )),
        "R8a" => Some((RuleId::R8a, "D1[x] cr1 F(x)", "D1[x] F(x)", vec![("x", 2)])),
        _ => None,
    }
}

fn concrete(rule: &str, outer: &str, inner: &str, dims: &[String], truncate: usize) -> ExitCode {
    let (rule_id, lhs_text, rhs_text, default_dims) = match rule_instance(rule) {
        Some(i) => i,
        None => {
            println!(
                "rule {rule} has no directly evaluable instance (markers sit inside \
                 argument slots); reduce symbolically instead"
            );
            return ExitCode::SUCCESS;
        }
    };
    let f = match parse_functor(outer) {
        Ok(f) => f,
        Err(e) => return usage_error(&format!("outer functor: {e}")),
    };
    let g = match parse_functor(inner) {
        Ok(g) => g,
        Err(e) => return usage_error(&format!("inner functor: {e}")),
    };
    let mut asg = Assignment::default()
        .with_functor("F", f)
        .with_functor("G", g);
    for (var, d) in default_dims {
        asg = asg.with_dim(var, d);
    }
    for spec in dims {
        match spec.split_once('=') {
            Some((var, d)) => match d.parse::<usize>() {
                Ok(d) => asg = asg.with_dim(var.trim(), d),
                Err(_) => return usage_error(&format!("bad dimension `{spec}`")),
            },
            None => return usage_error(&format!("dimensions look like x=2, got `{spec}`")),
        }
    }
    let lhs = match parse_term(lhs_text) {
        Ok(t) => t,
        Err(e) => return internal_error(&e.to_string()),
    };
    let rhs = if rhs_text.is_empty() {
        // The right side of the cover expansion is the engine's normal form.
        match normalize(&lhs, &config()) {
            Ok(n) => n.nf.as_term(),
            Err(e) => return internal_error(&e.to_string()),
        }
    } else {
        match parse_term(rhs_text) {
            Ok(t) => t,
            Err(e) => return internal_error(&e.to_string()),
        }
    };
    match check_rule_concrete(rule_id, &lhs, &rhs, &asg, truncate) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            if !report.supported {
                println!("unsupported shape; not a failure");
                ExitCode::SUCCESS
            } else if report.equal {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ ConcreteError::NotIdempotent) => internal_error(&e.to_string()),
        Err(e) => usage_error(&e.to_string()),
    }
}

fn rules(format: Format) -> ExitCode {
    let catalog = rule_catalog();
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&catalog).unwrap()),
        _ => {
            for info in &catalog {
                println!("{:?}: {}", info.id, info.pattern);
                println!("    {}", info.citation);
            }
        }
    }
    ExitCode::SUCCESS
}
