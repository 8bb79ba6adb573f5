//! LaTeX emitter for terms, normal forms and traces.

use crate::rewrite::{NormalForm, TraceStep};
use crate::term::{Func, ObjectExpr, Term};

fn func_latex(f: &Func) -> String {
    match f {
        Func::Atom(a) => a.name.replace("bar", r"\bar "),
        Func::Compose(o, i) => format!("{} \\circ {}", func_latex(o), func_latex(i)),
    }
}

fn var_latex(v: &str) -> String {
    // The alias convention `vbar` renders as the decorated variable.
    if let Some(stem) = v.strip_suffix("bar") {
        if !stem.is_empty() {
            return format!("\\bar{{{}}}", var_latex(stem));
        }
    }
    if v.len() > 1 && v[1..].chars().all(|c| c.is_ascii_digit()) {
        format!("{}_{}", &v[..1], &v[1..])
    } else {
        v.to_string()
    }
}

fn obj_latex(o: &ObjectExpr) -> String {
    match o {
        ObjectExpr::Zero => "0".to_string(),
        ObjectExpr::Var(v) => var_latex(v),
        ObjectExpr::Sum(l, r) => format!("{} \\oplus {}", obj_latex(l), obj_latex(r)),
    }
}

/// Renders a term in the display style of the derivations.
pub fn term_latex(t: &Term) -> String {
    match t {
        Term::Zero => "0".to_string(),
        Term::Obj(o) => obj_latex(o),
        Term::ConstZero(f) => format!("{}(0)", func_latex(f)),
        Term::Apply { func, args } => {
            let args: Vec<String> = args.iter().map(term_latex).collect();
            format!("{}({})", func_latex(func), args.join(", "))
        }
        Term::Cross { n, func, args } => {
            let args: Vec<String> = args.iter().map(term_latex).collect();
            format!(
                "\\mathrm{{cr}}_{{{}}}{}({})",
                n,
                func_latex(func),
                args.join(", ")
            )
        }
        Term::Lin { var, body } => {
            let inner = term_latex(body);
            if matches!(**body, Term::Sum(_)) {
                format!("D_1^{{{}}}\\left({}\\right)", var_latex(var), inner)
            } else {
                format!("D_1^{{{}}}{}", var_latex(var), inner)
            }
        }
        Term::Sum(ts) => {
            let parts: Vec<String> = ts.iter().map(term_latex).collect();
            parts.join(" \\oplus ")
        }
        Term::Nabla {
            func,
            direction,
            basepoint,
        } => format!(
            "\\nabla {}({}; {})",
            func_latex(func),
            obj_latex(direction),
            obj_latex(basepoint)
        ),
        Term::Delta {
            order,
            func,
            directions,
            basepoint,
        } => {
            let dirs: Vec<String> = directions.iter().map(obj_latex).collect();
            format!(
                "\\Delta_{{{}}}{}({}; {})",
                order,
                func_latex(func),
                dirs.join(", "),
                obj_latex(basepoint)
            )
        }
    }
}

/// A normal form as an aligned direct sum, one summand per line.
pub fn normal_form_latex(nf: &NormalForm) -> String {
    let mut out = String::from("\\begin{align*}\n");
    for (i, atom) in nf.atoms.iter().enumerate() {
        let sep = if i == 0 { "  & " } else { "  & \\oplus " };
        out.push_str(sep);
        out.push_str(&term_latex(atom));
        out.push_str("\\\\\n");
    }
    out.push_str("\\end{align*}\n");
    out
}

/// A trace as a derivation: each step prints the rewritten summand and the
/// rule that justified it.
pub fn trace_latex(steps: &[TraceStep]) -> String {
    let mut out = String::from("\\begin{align*}\n");
    for step in steps {
        out.push_str(&format!(
            "  {} &\\simeq {} && \\text{{{:?}}}\\\\\n",
            term_latex(&step.before),
            term_latex(&step.after),
            step.rule
        ));
    }
    out.push_str("\\end{align*}\n");
    out
}
