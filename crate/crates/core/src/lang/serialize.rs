use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use crate::model::{MarkovModel, RateExpr, TransitionKind};

/// Shortest round-trip decimal; scientific notation outside `[1e-3, 1e15)`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && !(1e-3..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn quote(label: &str) -> String {
    let mut s = String::with_capacity(label.len() + 2);
    s.push('"');
    for c in label.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            '\t' => s.push_str("\\t"),
            c => s.push(c),
        }
    }
    s.push('"');
    s
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Ctx {
    AddLeft,
    AddRight,
    MulLeft,
    MulRight,
}

fn write_expr(out: &mut String, e: &RateExpr, ctx: Ctx) {
    match e {
        RateExpr::Constant(v) => out.push_str(&format_number(*v)),
        RateExpr::Param(name) => out.push_str(name),
        RateExpr::Sum(a, b) | RateExpr::Difference(a, b) => {
            let paren = ctx >= Ctx::AddRight;
            if paren {
                out.push('(');
            }
            write_expr(out, a, Ctx::AddLeft);
            out.push_str(if matches!(e, RateExpr::Sum(..)) { " + " } else { " - " });
            write_expr(out, b, Ctx::AddRight);
            if paren {
                out.push(')');
            }
        }
        RateExpr::Product(a, b) => {
            let paren = ctx == Ctx::MulRight;
            if paren {
                out.push('(');
            }
            write_expr(out, a, Ctx::MulLeft);
            out.push_str(" * ");
            write_expr(out, b, Ctx::MulRight);
            if paren {
                out.push(')');
            }
        }
    }
}

/// Renders a rate expression with the minimum parentheses that preserve its tree.
pub(crate) fn expr_to_string(e: &RateExpr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, Ctx::AddLeft);
    s
}

/// Canonical text form: params by name, states by id, transitions by `(from, to)`,
/// init by id. The initial distribution is always written explicitly.
pub fn serialize(model: &MarkovModel) -> String {
    let m = model.canonical();
    let mut out = String::new();
    for (name, value) in m.params.iter() {
        let cov = if m.coverage_params.contains(name) {
            " coverage"
        } else {
            ""
        };
        let _ = writeln!(out, "param {name} = {}{cov};", format_number(value));
    }
    if let Some(h) = m.horizon {
        let _ = writeln!(out, "option horizon = {};", format_number(h));
    }
    for s in &m.states {
        let _ = writeln!(
            out,
            "state {} {} class = {};",
            s.id,
            quote(&s.label),
            s.class.keyword()
        );
    }
    for t in &m.transitions {
        let _ = write!(out, "trans {} -> {} rate = {}", t.from, t.to, expr_to_string(&t.rate));
        if t.kind == TransitionKind::Repair {
            out.push_str(" kind = repair");
        }
        out.push_str(";\n");
    }
    for (id, p) in &m.initial {
        let _ = writeln!(out, "init {id} = {};", format_number(*p));
    }
    out
}
