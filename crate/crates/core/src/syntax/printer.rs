use super::{AtomCall, Formula, Var};
use std::fmt::{self, Write};

// Precedence levels: quantifiers extend as far right as possible, so a
// quantified formula needs parentheses unless it is the rightmost operand.
const OR: u8 = 1;
const AND: u8 = 2;
const ATOM: u8 = 3;

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0, true)
    }
}

impl fmt::Display for AtomCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.name == "NE" && self.groups.iter().all(Vec::is_empty) && self.param.is_none() {
            return f.write_str("NE");
        }
        write!(f, "{}(", self.name)?;
        let mut first = true;
        if let Some(p) = self.param {
            write!(f, "{p}")?;
            first = false;
        }
        for (i, group) in self.groups.iter().enumerate() {
            if !first {
                f.write_str(if i == 2 { "|" } else { ";" })?;
            }
            first = false;
            write_vars(f, group)?;
        }
        f.write_char(')')
    }
}

fn write_vars(f: &mut impl Write, vars: &[Var]) -> fmt::Result {
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        f.write_str(v.as_str())?;
    }
    Ok(())
}

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula, min_prec: u8, rightmost: bool) -> fmt::Result {
    match phi {
        Formula::Top => f.write_str("T"),
        Formula::Bottom => f.write_str("F"),
        Formula::Rel { positive, name, args } => {
            if !positive {
                f.write_char('!')?;
            }
            write!(f, "{name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                write!(f, "{a}")?;
            }
            f.write_char(')')
        }
        Formula::Eq { positive, left, right } => {
            write!(f, "{left} {} {right}", if *positive { "=" } else { "!=" })
        }
        Formula::Dep(call) => write!(f, "{call}"),
        Formula::Possibly(body) => {
            f.write_str("poss(")?;
            write_formula(f, body, 0, true)?;
            f.write_char(')')
        }
        Formula::RestrictedBy(body, theta) => {
            f.write_str("restrict(")?;
            write_formula(f, body, 0, true)?;
            f.write_str(" ; ")?;
            write_formula(f, theta, 0, true)?;
            f.write_char(')')
        }
        Formula::Or(a, b) | Formula::And(a, b) => {
            let (prec, op) = if matches!(phi, Formula::Or(..)) { (OR, "\\/") } else { (AND, "/\\") };
            let parens = min_prec > prec;
            let inner_rightmost = parens || rightmost;
            if parens {
                f.write_char('(')?;
            }
            write_formula(f, a, prec, false)?;
            write!(f, " {op} ")?;
            write_formula(f, b, prec + 1, inner_rightmost)?;
            if parens {
                f.write_char(')')?;
            }
            Ok(())
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let q = if matches!(phi, Formula::Exists(..)) { 'E' } else { 'A' };
            let parens = !rightmost;
            if parens {
                f.write_char('(')?;
            }
            write!(f, "{q} {v}. ")?;
            if matches!(**body, Formula::Or(..) | Formula::And(..)) {
                f.write_char('(')?;
                write_formula(f, body, 0, true)?;
                f.write_char(')')?;
            } else {
                write_formula(f, body, ATOM, true)?;
            }
            if parens {
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn prints_quantifier_operands_with_minimal_parentheses() {
        let f = Formula::and(
            Formula::exists("v", Formula::and(Formula::rel("P", &["v"]), Formula::Top)),
            Formula::forall("v", Formula::restricted_by(Formula::atom(AtomCall::new("NE", vec![])), Formula::Top)),
        );
        assert_eq!(f.to_string(), "(E v. (P(v) /\\ T)) /\\ A v. restrict(NE ; T)");
    }

    #[test]
    fn prints_atom_groups() {
        let call = AtomCall::new("cindep", vec![vars(&["x"]), vars(&["y", "w"]), vars(&["z"])]);
        assert_eq!(call.to_string(), "cindep(x;y,w|z)");
        assert_eq!(AtomCall::with_param("big", 2, vec![vars(&["x"])]).to_string(), "big(2;x)");
        assert_eq!(AtomCall::new("NE", vec![]).to_string(), "NE");
    }

    #[test]
    fn right_nested_binary_keeps_parentheses() {
        let f = Formula::or(Formula::Top, Formula::or(Formula::Bottom, Formula::Top));
        assert_eq!(f.to_string(), "T \\/ (F \\/ T)");
        let g = Formula::and(Formula::or(Formula::Top, Formula::Bottom), Formula::Top);
        assert_eq!(g.to_string(), "(T \\/ F) /\\ T");
    }
}
