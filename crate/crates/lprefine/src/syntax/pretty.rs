//! Pretty-printing.  Output parses back to a structurally equal AST.

use super::ast::{CmpOp, Command, PCommand, Pred, Term};

/// Render a term with infix arithmetic and list sugar.
pub fn pretty_term(t: &Term) -> String {
    term_prec(t, 0)
}

fn term_prec(t: &Term, min: u8) -> String {
    match t {
        Term::Var(v) => v.clone(),
        Term::Fun(name, args) => match (name.as_str(), args.len()) {
            ("plus", 2) => wrap(
                format!("{} + {}", term_prec(&args[0], 1), term_prec(&args[1], 2)),
                1,
                min,
            ),
            ("minus", 2) => wrap(
                format!("{} - {}", term_prec(&args[0], 1), term_prec(&args[1], 2)),
                1,
                min,
            ),
            ("times", 2) => wrap(
                format!("{} * {}", term_prec(&args[0], 2), term_prec(&args[1], 3)),
                2,
                min,
            ),
            ("nil", 0) => "[]".to_string(),
            ("cons", 2) => pretty_list(t),
            (_, 0) => name.clone(),
            _ => {
                let parts: Vec<String> = args.iter().map(|a| term_prec(a, 0)).collect();
                format!("{}({})", name, parts.join(", "))
            }
        },
    }
}

fn wrap(s: String, prec: u8, min: u8) -> String {
    if prec < min {
        format!("({})", s)
    } else {
        s
    }
}

fn pretty_list(t: &Term) -> String {
    let mut elems = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Fun(name, args) if name == "cons" && args.len() == 2 => {
                elems.push(term_prec(&args[0], 0));
                cur = &args[1];
            }
            Term::Fun(name, args) if name == "nil" && args.is_empty() => {
                return format!("[{}]", elems.join(", "));
            }
            other => {
                return format!("[{} | {}]", elems.join(", "), term_prec(other, 0));
            }
        }
    }
}

/// Render a predicate.
pub fn pretty_pred(p: &Pred) -> String {
    pred_prec(p, 0)
}

// Precedence levels: iff 1, implies 2, or 3, and 4, unary 5; quantifiers
// print at level 0 (their body extends maximally, so any enclosing binary
// operator parenthesises them).
fn pred_prec(p: &Pred, min: u8) -> String {
    match p {
        Pred::True => "true".to_string(),
        Pred::False => "false".to_string(),
        Pred::Compare(op, l, r) => {
            format!("{} {} {}", pretty_term(l), cmp_text(*op), pretty_term(r))
        }
        Pred::Member(t, lo, hi) => format!(
            "{} in {}..{}",
            pretty_term(t),
            pretty_term(lo),
            pretty_term(hi)
        ),
        Pred::Not(q) => format!("not {}", pred_prec(q, 5)),
        Pred::And(l, r) => wrap(
            format!("{} /\\ {}", pred_prec(l, 5), pred_prec(r, 4)),
            4,
            min,
        ),
        Pred::Or(l, r) => wrap(
            format!("{} \\/ {}", pred_prec(l, 4), pred_prec(r, 3)),
            3,
            min,
        ),
        Pred::Implies(l, r) => wrap(
            format!("{} => {}", pred_prec(l, 3), pred_prec(r, 2)),
            2,
            min,
        ),
        Pred::Iff(l, r) => wrap(
            format!("{} <=> {}", pred_prec(l, 2), pred_prec(r, 2)),
            1,
            min,
        ),
        Pred::Exists(_, _) | Pred::Forall(_, _) => {
            let (kw, vars, body) = split_pred_binders(p);
            wrap(
                format!("{} {} . {}", kw, vars.join(", "), pred_prec(body, 0)),
                0,
                min,
            )
        }
        Pred::Def(q) => format!("def({})", pred_prec(q, 0)),
        Pred::User(name, args) => {
            let parts: Vec<String> = args.iter().map(pretty_term).collect();
            format!("{}({})", name, parts.join(", "))
        }
    }
}

fn cmp_text(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "=",
        CmpOp::Ne => "!=",
        CmpOp::Lt => "<",
        CmpOp::Le => "<=",
        CmpOp::Gt => ">",
        CmpOp::Ge => ">=",
    }
}

fn split_pred_binders(p: &Pred) -> (&'static str, Vec<String>, &Pred) {
    match p {
        Pred::Exists(v, body) => {
            let mut vars = vec![v.clone()];
            let mut cur: &Pred = body;
            while let Pred::Exists(v2, b2) = cur {
                vars.push(v2.clone());
                cur = b2;
            }
            ("exists", vars, cur)
        }
        Pred::Forall(v, body) => {
            let mut vars = vec![v.clone()];
            let mut cur: &Pred = body;
            while let Pred::Forall(v2, b2) = cur {
                vars.push(v2.clone());
                cur = b2;
            }
            ("forall", vars, cur)
        }
        _ => unreachable!(),
    }
}

/// Render a command.  `skip`, `fail` and `abort` sugar is restored.
pub fn pretty_command(c: &Command) -> String {
    cmd_prec(c, 0)
}

// Precedence: `\/` 1, `/\` 2, `,` 3, atoms 4; quantifiers level 0.
fn cmd_prec(c: &Command, min: u8) -> String {
    match c {
        Command::Spec(Pred::True) => "skip".to_string(),
        Command::Spec(Pred::False) => "fail".to_string(),
        Command::Assert(Pred::False) => "abort".to_string(),
        Command::Spec(p) => format!("<{}>", pretty_pred(p)),
        Command::Assert(p) => format!("{{{}}}", pretty_pred(p)),
        Command::POr(l, r) => wrap(
            format!("{} \\/ {}", cmd_prec(l, 2), cmd_prec(r, 1)),
            1,
            min,
        ),
        Command::PAnd(l, r) => wrap(
            format!("{} /\\ {}", cmd_prec(l, 3), cmd_prec(r, 2)),
            2,
            min,
        ),
        Command::SAnd(l, r) => wrap(format!("{}, {}", cmd_prec(l, 4), cmd_prec(r, 3)), 3, min),
        Command::Exists(_, _) | Command::Forall(_, _) => {
            let (kw, vars, body) = split_cmd_binders(c);
            wrap(
                format!("{} {} . {}", kw, vars.join(", "), cmd_prec(body, 0)),
                0,
                min,
            )
        }
        Command::Call(name, args) => {
            let parts: Vec<String> = args.iter().map(pretty_term).collect();
            format!("{}({})", name, parts.join(", "))
        }
    }
}

fn split_cmd_binders(c: &Command) -> (&'static str, Vec<String>, &Command) {
    match c {
        Command::Exists(v, body) => {
            let mut vars = vec![v.clone()];
            let mut cur: &Command = body;
            while let Command::Exists(v2, b2) = cur {
                vars.push(v2.clone());
                cur = b2;
            }
            ("exists", vars, cur)
        }
        Command::Forall(v, body) => {
            let mut vars = vec![v.clone()];
            let mut cur: &Command = body;
            while let Command::Forall(v2, b2) = cur {
                vars.push(v2.clone());
                cur = b2;
            }
            ("forall", vars, cur)
        }
        _ => unreachable!(),
    }
}

/// Render a parametrised command.
pub fn pretty_pcommand(pc: &PCommand) -> String {
    match pc {
        PCommand::Param(formals, body) => {
            format!("({} . {})", formals.join(", "), pretty_command(body))
        }
        PCommand::Rec(id, inner) => format!("re {} . {} er", id, pretty_pcommand(inner)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_command, parse_pred};

    fn round_trip_cmd(src: &str) {
        let c = parse_command(src).unwrap();
        let printed = pretty_command(&c);
        let again = parse_command(&printed).unwrap_or_else(|e| {
            panic!("re-parse of `{}` failed: {}", printed, e);
        });
        assert_eq!(c, again, "round trip through `{}`", printed);
    }

    #[test]
    fn round_trips() {
        round_trip_cmd("skip");
        round_trip_cmd("{X = 0}, <Y = 1>");
        round_trip_cmd("(<U = 0>, <V = 1>) \\/ (<U > 0>, exists U1, V1 . <U1 = U - 1>, f(U1, V1), <V = V1 * U>)");
        round_trip_cmd("forall X . <X = 0> /\\ <Y = 1>");
        round_trip_cmd("(exists X . <X = Y>) \\/ fail");
        round_trip_cmd("<P = [1, 2]>, <Q = [H | T]>");
        round_trip_cmd("<X in 1..N>, <len(P) < N>");
        round_trip_cmd("<U - 1 - 1 = 0>, <V = (A - B) * C>");
    }

    #[test]
    fn pred_round_trips() {
        for src in [
            "true",
            "X = 0 /\\ Y != 1",
            "nat(U) => (exists V . V = fact(U))",
            "psoln(P, N) <=> list(P)",
            "not (X = 0 \\/ Y = 0)",
            "def(Y = div(1, X))",
            "forall I . I in 1..N => not I = X",
        ] {
            let p = parse_pred(src).unwrap();
            let printed = pretty_pred(&p);
            let again = parse_pred(&printed).unwrap_or_else(|e| {
                panic!("re-parse of `{}` failed: {}", printed, e);
            });
            assert_eq!(p, again, "round trip through `{}`", printed);
        }
    }

    #[test]
    fn sugar_restored() {
        assert_eq!(pretty_command(&parse_command("<true>").unwrap()), "skip");
        assert_eq!(
            pretty_command(&parse_command("{X = 0}, <Y = 1>").unwrap()),
            "{X = 0}, <Y = 1>"
        );
    }
}
