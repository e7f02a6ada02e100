//! Concrete syntax: parsing, pretty-printing, free variables, associativity
//! normalization and the mutual-recursion encoding.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

use std::collections::BTreeSet;

use ast::{Command, PCommand, Pred, Term};

pub use parser::{parse_command, parse_derivation, parse_pred, parse_program};
pub use pretty::{pretty_command, pretty_pcommand, pretty_pred, pretty_term};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{line}:{col}: {msg}")]
    ParseError {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("variable `{var}` is free in the body of `{proc}` but is not a formal parameter")]
    FreeVarError { var: String, proc: String },
    #[error("duplicate formal parameter `{0}`")]
    DuplicateFormal(String),
    #[error("duplicate procedure `{0}`")]
    DuplicateProc(String),
    #[error("`{name}` expects {expected} arguments, got {got}")]
    ArityError {
        name: String,
        expected: usize,
        got: usize,
    },
}

/// Free variables of a term.
pub fn free_vars_term(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_term(t, &mut out);
    out
}

fn collect_term(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(v) => {
            out.insert(v.clone());
        }
        Term::Fun(_, args) => {
            for a in args {
                collect_term(a, out);
            }
        }
    }
}

/// Free variables of a predicate; quantifiers bind.
pub fn free_vars_pred(p: &Pred) -> BTreeSet<String> {
    match p {
        Pred::True | Pred::False => BTreeSet::new(),
        Pred::Compare(_, l, r) => {
            let mut s = free_vars_term(l);
            s.extend(free_vars_term(r));
            s
        }
        Pred::Member(t, lo, hi) => {
            let mut s = free_vars_term(t);
            s.extend(free_vars_term(lo));
            s.extend(free_vars_term(hi));
            s
        }
        Pred::Not(q) | Pred::Def(q) => free_vars_pred(q),
        Pred::And(l, r) | Pred::Or(l, r) | Pred::Implies(l, r) | Pred::Iff(l, r) => {
            let mut s = free_vars_pred(l);
            s.extend(free_vars_pred(r));
            s
        }
        Pred::Exists(v, body) | Pred::Forall(v, body) => {
            let mut s = free_vars_pred(body);
            s.remove(v);
            s
        }
        Pred::User(_, args) => {
            let mut s = BTreeSet::new();
            for a in args {
                collect_term(a, &mut s);
            }
            s
        }
    }
}

/// Free variables of a command; `exists`/`forall` bind, specs and
/// assumptions contribute their predicate's free variables, calls their
/// argument terms'.
pub fn free_vars_command(c: &Command) -> BTreeSet<String> {
    match c {
        Command::Spec(p) | Command::Assert(p) => free_vars_pred(p),
        Command::POr(l, r) | Command::PAnd(l, r) | Command::SAnd(l, r) => {
            let mut s = free_vars_command(l);
            s.extend(free_vars_command(r));
            s
        }
        Command::Exists(v, body) | Command::Forall(v, body) => {
            let mut s = free_vars_command(body);
            s.remove(v);
            s
        }
        Command::Call(_, args) => {
            let mut s = BTreeSet::new();
            for a in args {
                collect_term(a, &mut s);
            }
            s
        }
    }
}

/// Whether `v` occurs free in `c`.
pub fn var_free_in(v: &str, c: &Command) -> bool {
    free_vars_command(c).contains(v)
}

/// Normalize the associativity of the three binary command operators to
/// right-nested form, recursively.  The associativity laws justify treating
/// commands modulo this normal form.
pub fn normalize_command(c: &Command) -> Command {
    match c {
        Command::SAnd(_, _) => rebuild(collect_chain(c, ChainOp::Seq), ChainOp::Seq),
        Command::PAnd(_, _) => rebuild(collect_chain(c, ChainOp::And), ChainOp::And),
        Command::POr(_, _) => rebuild(collect_chain(c, ChainOp::Or), ChainOp::Or),
        Command::Exists(v, b) => Command::Exists(v.clone(), Box::new(normalize_command(b))),
        Command::Forall(v, b) => Command::Forall(v.clone(), Box::new(normalize_command(b))),
        Command::Spec(_) | Command::Assert(_) | Command::Call(_, _) => c.clone(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ChainOp {
    Seq,
    And,
    Or,
}

fn collect_chain(c: &Command, op: ChainOp) -> Vec<Command> {
    match (c, op) {
        (Command::SAnd(l, r), ChainOp::Seq)
        | (Command::PAnd(l, r), ChainOp::And)
        | (Command::POr(l, r), ChainOp::Or) => {
            let mut out = collect_chain(l, op);
            out.extend(collect_chain(r, op));
            out
        }
        _ => vec![normalize_command(c)],
    }
}

fn rebuild(mut parts: Vec<Command>, op: ChainOp) -> Command {
    let last = parts.pop().expect("chain is non-empty");
    parts.into_iter().rev().fold(last, |acc, c| match op {
        ChainOp::Seq => Command::sand(c, acc),
        ChainOp::And => Command::pand(c, acc),
        ChainOp::Or => Command::por(c, acc),
    })
}

/// Normalize a parametrised command's body.
pub fn normalize_pcommand(pc: &PCommand) -> PCommand {
    match pc {
        PCommand::Param(fs, c) => PCommand::Param(fs.clone(), normalize_command(c)),
        PCommand::Rec(id, inner) => PCommand::Rec(id.clone(), Box::new(normalize_pcommand(inner))),
    }
}

/// Encode a set of mutually recursive definitions as a single procedure.
///
/// The combined procedure takes a selector variable plus the concatenation
/// of every definition's formals; its body is a disjunction of selector
/// guards followed by the rewritten bodies.  A call `p_j(ts)` becomes a call
/// on the combined procedure with the selector set to `j+1`, `ts` in
/// definition `j`'s slots, and existentially-quantified placeholder
/// variables (the slot name suffixed `_u`, which the universe must declare)
/// in every other slot.
pub fn encode_mutual_recursion(
    defs: &[(String, PCommand)],
    combined: &str,
    selector: &str,
) -> Result<(String, PCommand), SyntaxError> {
    let mut names = Vec::new();
    let mut formals_of: Vec<Vec<String>> = Vec::new();
    let mut seen = BTreeSet::new();
    for (name, pc) in defs {
        let fs = match pc {
            PCommand::Param(fs, _) => fs.clone(),
            PCommand::Rec(_, _) => {
                return Err(SyntaxError::ParseError {
                    line: 0,
                    col: 0,
                    msg: format!("`{}`: mutual definitions must be parameter abstractions", name),
                })
            }
        };
        for f in &fs {
            if !seen.insert(f.clone()) {
                return Err(SyntaxError::DuplicateFormal(f.clone()));
            }
        }
        names.push(name.clone());
        formals_of.push(fs);
    }
    let mut body: Option<Command> = None;
    for (k, (_, pc)) in defs.iter().enumerate() {
        let ck = rewrite_calls(pc.body(), &names, &formals_of, combined, selector)?;
        let guard = Command::Spec(Pred::eq(
            Term::var(selector),
            Term::int(k as i64 + 1),
        ));
        let branch = Command::sand(guard, ck);
        body = Some(match body {
            None => branch,
            Some(b) => Command::por(b, branch),
        });
    }
    let mut formals = vec![selector.to_string()];
    for fs in &formals_of {
        formals.extend(fs.iter().cloned());
    }
    Ok((
        combined.to_string(),
        PCommand::Param(formals, body.expect("at least one definition")),
    ))
}

fn rewrite_calls(
    c: &Command,
    names: &[String],
    formals_of: &[Vec<String>],
    combined: &str,
    selector: &str,
) -> Result<Command, SyntaxError> {
    Ok(match c {
        Command::Call(id, args) => match names.iter().position(|n| n == id) {
            Some(j) => {
                if args.len() != formals_of[j].len() {
                    return Err(SyntaxError::ArityError {
                        name: id.clone(),
                        expected: formals_of[j].len(),
                        got: args.len(),
                    });
                }
                let mut new_args = vec![Term::int(j as i64 + 1)];
                let mut placeholders = Vec::new();
                for (m, fs) in formals_of.iter().enumerate() {
                    if m == j {
                        new_args.extend(args.iter().cloned());
                    } else {
                        for f in fs {
                            let fresh = format!("{}_u", f);
                            new_args.push(Term::var(&fresh));
                            placeholders.push(fresh);
                        }
                    }
                }
                let call = Command::Call(combined.to_string(), new_args);
                let _ = selector;
                placeholders
                    .into_iter()
                    .rev()
                    .fold(call, |acc, v| Command::Exists(v, Box::new(acc)))
            }
            None => c.clone(),
        },
        Command::Spec(_) | Command::Assert(_) => c.clone(),
        Command::POr(l, r) => Command::por(
            rewrite_calls(l, names, formals_of, combined, selector)?,
            rewrite_calls(r, names, formals_of, combined, selector)?,
        ),
        Command::PAnd(l, r) => Command::pand(
            rewrite_calls(l, names, formals_of, combined, selector)?,
            rewrite_calls(r, names, formals_of, combined, selector)?,
        ),
        Command::SAnd(l, r) => Command::sand(
            rewrite_calls(l, names, formals_of, combined, selector)?,
            rewrite_calls(r, names, formals_of, combined, selector)?,
        ),
        Command::Exists(v, b) => Command::Exists(
            v.clone(),
            Box::new(rewrite_calls(b, names, formals_of, combined, selector)?),
        ),
        Command::Forall(v, b) => Command::Forall(
            v.clone(),
            Box::new(rewrite_calls(b, names, formals_of, combined, selector)?),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ast::*;

    #[test]
    fn parse_simple_proc() {
        let p = parse_program("proc id = (V . <V = 0>);").unwrap();
        assert_eq!(
            p.procs[0].1,
            PCommand::Param(
                vec!["V".into()],
                Command::Spec(Pred::eq(Term::var("V"), Term::int(0)))
            )
        );
    }

    #[test]
    fn free_var_error() {
        let e = parse_program("proc p = (V . <W = 0>);").unwrap_err();
        assert!(matches!(e, SyntaxError::FreeVarError { var, .. } if var == "W"));
    }

    #[test]
    fn parse_factorial_shape() {
        let src = "proc f = re f . (U, V . \
                   (<U = 0>, <V = 1>) \\/ \
                   (<U > 0>, exists U1, V1 . <U1 = U - 1>, f(U1, V1), <V = V1 * U>)) er;";
        let p = parse_program(src).unwrap();
        let pc = p.proc("f").unwrap();
        assert!(matches!(pc, PCommand::Rec(id, _) if id == "f"));
        assert_eq!(pc.formals(), &["U".to_string(), "V".to_string()]);
        match pc.body() {
            Command::POr(_, r) => match r.as_ref() {
                Command::SAnd(g, rest) => {
                    assert_eq!(
                        **g,
                        Command::Spec(Pred::Compare(CmpOp::Gt, Term::var("U"), Term::int(0)))
                    );
                    assert!(matches!(rest.as_ref(), Command::Exists(v, _) if v == "U1"));
                }
                other => panic!("unexpected shape: {:?}", other),
            },
            other => panic!("unexpected shape: {:?}", other),
        }
    }

    #[test]
    fn spec_angle_disambiguation() {
        // `>` inside a spec is a comparison when a term follows, otherwise
        // the closing bracket.
        let c = parse_command("<U > 0>").unwrap();
        assert_eq!(
            c,
            Command::Spec(Pred::Compare(CmpOp::Gt, Term::var("U"), Term::int(0)))
        );
        let c = parse_command("<X > Y>, <X = 0>").unwrap();
        assert!(matches!(c, Command::SAnd(_, _)));
    }

    #[test]
    fn sugar_round_trip() {
        assert_eq!(parse_command("skip").unwrap(), Command::skip());
        assert_eq!(parse_command("fail").unwrap(), Command::fail());
        assert_eq!(parse_command("abort").unwrap(), Command::abort());
    }

    #[test]
    fn list_terms() {
        let c = parse_command("<P = [X | T]>").unwrap();
        assert_eq!(
            c,
            Command::Spec(Pred::eq(
                Term::var("P"),
                Term::cons(Term::var("X"), Term::var("T"))
            ))
        );
        let c = parse_command("<P = [1, 2]>").unwrap();
        assert_eq!(
            c,
            Command::Spec(Pred::eq(
                Term::var("P"),
                Term::cons(Term::int(1), Term::cons(Term::int(2), Term::nil()))
            ))
        );
    }

    #[test]
    fn free_vars_cases() {
        assert_eq!(
            free_vars_term(&Term::var("X")),
            ["X".to_string()].into_iter().collect()
        );
        let t = Term::Fun("f".into(), vec![Term::var("X"), Term::var("Y")]);
        assert_eq!(free_vars_term(&t).len(), 2);
        let c = Command::Exists(
            "X".into(),
            Box::new(Command::Spec(Pred::eq(Term::var("X"), Term::var("Y")))),
        );
        assert_eq!(
            free_vars_command(&c),
            ["Y".to_string()].into_iter().collect()
        );
    }

    #[test]
    fn normalization_right_associates() {
        let left = Command::sand(
            Command::sand(Command::skip(), Command::fail()),
            Command::abort(),
        );
        let right = Command::sand(
            Command::skip(),
            Command::sand(Command::fail(), Command::abort()),
        );
        assert_eq!(normalize_command(&left), right);
        assert_eq!(normalize_command(&right), right);
    }

    #[test]
    fn mutual_encoding_shape() {
        let even = PCommand::Param(
            vec!["X".into()],
            parse_command("<X = 0> \\/ (<X > 0>, odd(X - 1))").unwrap(),
        );
        let odd = PCommand::Param(
            vec!["Y".into()],
            parse_command("<Y = 1> \\/ (<Y > 1>, even(Y - 1))").unwrap(),
        );
        let (name, pc) = encode_mutual_recursion(
            &[("even".into(), even), ("odd".into(), odd)],
            "evenodd",
            "I",
        )
        .unwrap();
        assert_eq!(name, "evenodd");
        assert_eq!(
            pc.formals(),
            &["I".to_string(), "X".to_string(), "Y".to_string()]
        );
        // Body free vars are within formals plus encoded placeholders,
        // which are existentially bound.
        let fv = free_vars_command(pc.body());
        assert!(fv.iter().all(|v| ["I", "X", "Y"].contains(&v.as_str())));
    }

    #[test]
    fn parse_derivation_script() {
        let src = "target f;\n\
                   step pandtosand at [0];\n\
                   step equivspec at [1, 0] with Q = <V = 1>;\n\
                   step recintro with proc = f, variant = intlt(U);\n";
        let d = parse_derivation(src).unwrap();
        assert_eq!(d.target, "f");
        assert_eq!(d.steps.len(), 3);
        assert_eq!(d.steps[0].path, vec![0]);
        assert!(matches!(
            d.steps[1].params.get("Q"),
            Some(ParamValue::Pred(_))
        ));
        assert!(matches!(
            d.steps[2].params.get("variant"),
            Some(ParamValue::Variant(n, vs)) if n == "intlt" && vs == &vec!["U".to_string()]
        ));
    }

    #[test]
    fn parse_universe_block() {
        let src = "universe {\n\
                     values int 0..24;\n\
                     var U, U1 in 0..4;\n\
                     var V in 0..24;\n\
                     fun minus/2 builtin;\n\
                     fun g/1 { (0) -> 1; (1) -> 0; }\n\
                   }\n\
                   goal g0 = <U = 0>;";
        let p = parse_program(src).unwrap();
        assert_eq!(p.universe.len(), 6);
        assert!(p.goal("g0").is_some());
    }
}
