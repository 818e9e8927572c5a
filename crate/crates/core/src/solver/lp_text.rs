//! Human-readable dump of a [`LinearProgram`] in CPLEX LP style, for
//! cross-checking compiled problems against external solvers.
use std::fmt::Write;

use super::{LinearProgram, VarKind};

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "_.[]".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn push_term(out: &mut String, first: bool, coef: f64, var: &str) {
    if coef < 0.0 {
        out.push_str(" - ");
    } else if !first {
        out.push_str(" + ");
    } else {
        out.push(' ');
    }
    let mag = coef.abs();
    if mag == 1.0 {
        out.push_str(var);
    } else {
        let _ = write!(out, "{mag} {var}");
    }
}

pub fn write_lp_text(problem: &LinearProgram) -> String {
    let names: Vec<String> = problem.vars().iter().map(|v| sanitize(&v.name)).collect();
    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    let mut first = true;
    for (v, name) in problem.vars().iter().zip(&names) {
        if v.cost != 0.0 {
            push_term(&mut out, first, v.cost, name);
            first = false;
        }
    }
    if first {
        out.push_str(" 0");
    }
    out.push_str("\nSubject To\n");
    for row in problem.rows() {
        let _ = write!(out, " {}:", sanitize(&row.name));
        let mut first = true;
        for &(id, coef) in &row.terms {
            if coef != 0.0 {
                push_term(&mut out, first, coef, &names[id.0]);
                first = false;
            }
        }
        if first {
            out.push_str(" 0");
        }
        let _ = writeln!(out, " {} {}", row.relation.symbol(), row.rhs);
    }
    out.push_str("Bounds\n");
    for (v, name) in problem.vars().iter().zip(&names) {
        if v.kind == VarKind::Binary {
            continue;
        }
        match (v.lower.is_finite(), v.upper.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " {name} free");
            }
            (true, true) => {
                let _ = writeln!(out, " {} <= {name} <= {}", v.lower, v.upper);
            }
            (true, false) => {
                let _ = writeln!(out, " {name} >= {}", v.lower);
            }
            (false, true) => {
                let _ = writeln!(out, " -inf <= {name} <= {}", v.upper);
            }
        }
    }
    let binaries: Vec<&String> = problem
        .vars()
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, n)| n)
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    out
}
