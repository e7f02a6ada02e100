//! Executability analysis and translation of the executable fragment to
//! Prolog.
//!
//! The translation is deterministic: clauses are split only at top-level
//! disjunctions, `is` goals are introduced for arithmetic-defining
//! equalities, and goals are ordered by a greedy left-to-right groundness
//! analysis that moves producers before consumers but otherwise preserves
//! source order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::syntax::ast::{CmpOp, Command, PCommand, Pred, Program, Term};
use crate::syntax::normalize_command;

/// Why a construct is not executable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    GeneralSpec,
    Assumption,
    UniversalQuantifier,
    ParallelConjunction,
    NonArithmeticSpec,
}

impl Reason {
    pub fn text(self) -> &'static str {
        match self {
            Reason::GeneralSpec => "general-spec",
            Reason::Assumption => "assumption",
            Reason::UniversalQuantifier => "universal-quantifier",
            Reason::ParallelConjunction => "parallel-conjunction",
            Reason::NonArithmeticSpec => "non-arithmetic-spec",
        }
    }
}

/// One offending construct: which procedure (or goal), where in its body,
/// and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub unit: String,
    pub path: Vec<usize>,
    pub reason: Reason,
}

#[derive(Debug, Clone, Default)]
pub struct ExecutabilityReport {
    pub violations: Vec<Violation>,
}

impl ExecutabilityReport {
    pub fn executable(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EmitError {
    #[error("program is not executable ({0} violations)")]
    NotExecutable(usize),
    #[error("no goal ordering grounds `{var}` before use in {unit}")]
    UnorderableDataflow { unit: String, var: String },
}

// ---------------------------------------------------------------------------
// Executability

const ARITH_FUNS: &[&str] = &["plus", "minus", "times", "div"];

fn term_executable(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Fun(name, args) => {
            (args.is_empty() && name.parse::<i64>().is_ok())
                || (name == "nil" && args.is_empty())
                || ((name == "cons" || ARITH_FUNS.contains(&name.as_str()))
                    && args.len() == 2
                    && args.iter().all(term_executable))
                || ((name == "abs" || name == "len")
                    && args.len() == 1
                    && term_executable(&args[0]))
        }
    }
}

fn spec_pred_reason(p: &Pred) -> Option<Reason> {
    match p {
        Pred::True | Pred::False => None,
        Pred::Compare(_, a, b) => {
            if term_executable(a) && term_executable(b) {
                None
            } else {
                Some(Reason::NonArithmeticSpec)
            }
        }
        Pred::And(a, b) => spec_pred_reason(a).or_else(|| spec_pred_reason(b)),
        Pred::Exists(..) | Pred::Forall(..) | Pred::User(..) => Some(Reason::GeneralSpec),
        Pred::Member(..)
        | Pred::Not(_)
        | Pred::Or(..)
        | Pred::Implies(..)
        | Pred::Iff(..)
        | Pred::Def(_) => Some(Reason::NonArithmeticSpec),
    }
}

fn check_command(unit: &str, c: &Command, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    let mut push = |reason, path: &Vec<usize>| {
        out.push(Violation {
            unit: unit.to_string(),
            path: path.clone(),
            reason,
        })
    };
    match c {
        Command::Spec(p) => {
            if let Some(r) = spec_pred_reason(p) {
                push(r, path);
            }
        }
        Command::Assert(_) => push(Reason::Assumption, path),
        Command::Forall(..) => push(Reason::UniversalQuantifier, path),
        Command::PAnd(..) => push(Reason::ParallelConjunction, path),
        Command::POr(l, r) | Command::SAnd(l, r) => {
            path.push(0);
            check_command(unit, l, path, out);
            path.pop();
            path.push(1);
            check_command(unit, r, path, out);
            path.pop();
        }
        Command::Exists(_, b) => {
            path.push(0);
            check_command(unit, b, path, out);
            path.pop();
        }
        Command::Call(_, args) => {
            if !args.iter().all(term_executable) {
                push(Reason::NonArithmeticSpec, path);
            }
        }
    }
}

/// Scan a whole program for non-executable constructs.
pub fn check_executable(p: &Program) -> ExecutabilityReport {
    let mut violations = Vec::new();
    for (name, pc) in &p.procs {
        check_command(name, pc.body(), &mut Vec::new(), &mut violations);
    }
    for (name, c) in &p.goals {
        check_command(name, c, &mut Vec::new(), &mut violations);
    }
    ExecutabilityReport { violations }
}

// ---------------------------------------------------------------------------
// Prolog representation

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PTerm {
    Var(String),
    Int(i64),
    Nil,
    Cons(Box<PTerm>, Box<PTerm>),
    Arith(&'static str, Box<PTerm>, Box<PTerm>),
}

impl PTerm {
    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            PTerm::Var(v) => {
                out.insert(v.clone());
            }
            PTerm::Cons(h, t) | PTerm::Arith(_, h, t) => {
                h.vars(out);
                t.vars(out);
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    /// `X = t` (unification).
    Unify(PTerm, PTerm),
    /// `X is expr`.
    Is(PTerm, PTerm),
    /// An arithmetic comparison such as `X =\= Y` or `M < N`.
    Cmp(&'static str, PTerm, PTerm),
    /// `length(L, N)`.
    Length(PTerm, PTerm),
    /// `abs(X, A)` per the two-goal absolute-value pattern.
    Abs(PTerm, PTerm),
    Call(String, Vec<PTerm>),
    True,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub name: String,
    pub args: Vec<PTerm>,
    pub body: Vec<Goal>,
}

#[derive(Debug, Clone, Default)]
pub struct PrologUnit {
    pub clauses: Vec<Clause>,
    pub entries: Vec<String>,
    /// Head variables occurring nowhere else, per clause index.
    pub singleton_warnings: Vec<(String, String)>,
}

// ---------------------------------------------------------------------------
// Lowering

struct Lowerer {
    used: BTreeSet<String>,
}

impl Lowerer {
    fn fresh(&mut self, base: String) -> String {
        if self.used.insert(base.clone()) {
            return base;
        }
        let mut n = 1;
        loop {
            let cand = format!("{}{}", base, n);
            if self.used.insert(cand.clone()) {
                return cand;
            }
            n += 1;
        }
    }

    /// A readable base name for the temporary holding a term's value:
    /// `minus(X, H)` becomes `XmH`, `plus(J, 1)` becomes `J1`,
    /// `abs(t)` becomes `Abs` followed by the inner name.
    fn temp_base(t: &Term) -> String {
        fn piece(t: &Term) -> String {
            match t {
                Term::Var(v) => v.clone(),
                Term::Fun(n, args) if args.is_empty() => n.clone(),
                Term::Fun(n, args) => {
                    let inner: Vec<String> = args.iter().map(piece).collect();
                    match (n.as_str(), inner.as_slice()) {
                        ("plus", [a, b]) if b.chars().all(|c| c.is_ascii_digit()) => {
                            format!("{}{}", a, b)
                        }
                        ("plus", [a, b]) => format!("{}p{}", a, b),
                        ("minus", [a, b]) => format!("{}m{}", a, b),
                        ("times", [a, b]) => format!("{}t{}", a, b),
                        ("div", [a, b]) => format!("{}d{}", a, b),
                        ("abs", [a]) => format!("Abs{}", a),
                        ("len", [a]) => format!("Len{}", a),
                        _ => inner.join(""),
                    }
                }
            }
        }
        let base = piece(t);
        let mut chars = base.chars();
        match chars.next() {
            Some(c) if c.is_ascii_uppercase() => base,
            Some(c) => format!("{}{}", c.to_ascii_uppercase(), chars.as_str()),
            None => "T".into(),
        }
    }

    /// Lower a term to a data term, extracting arithmetic into `is` goals.
    fn data_term(&mut self, t: &Term, temps: &mut Vec<Goal>) -> PTerm {
        match t {
            Term::Var(v) => {
                self.used.insert(v.clone());
                PTerm::Var(v.clone())
            }
            Term::Fun(n, args) if args.is_empty() && n == "nil" => PTerm::Nil,
            Term::Fun(n, args) if args.is_empty() => PTerm::Int(n.parse().unwrap_or(0)),
            Term::Fun(n, args) if n == "cons" => {
                let h = self.data_term(&args[0], temps);
                let t = self.data_term(&args[1], temps);
                PTerm::Cons(Box::new(h), Box::new(t))
            }
            _ => self.via_temp(t, temps),
        }
    }

    /// Lower a term to an arithmetic expression usable on the right of `is`
    /// or inside a comparison; `abs` and `len` are not evaluable there and
    /// go through temporaries.
    fn arith_expr(&mut self, t: &Term, temps: &mut Vec<Goal>) -> PTerm {
        match t {
            Term::Var(v) => {
                self.used.insert(v.clone());
                PTerm::Var(v.clone())
            }
            Term::Fun(n, args) if args.is_empty() => PTerm::Int(n.parse().unwrap_or(0)),
            Term::Fun(n, args) if ARITH_FUNS.contains(&n.as_str()) => {
                let op = match n.as_str() {
                    "plus" => "+",
                    "minus" => "-",
                    "times" => "*",
                    _ => "//",
                };
                let a = self.arith_expr(&args[0], temps);
                let b = self.arith_expr(&args[1], temps);
                PTerm::Arith(op, Box::new(a), Box::new(b))
            }
            _ => self.via_temp(t, temps),
        }
    }

    /// Bind a non-trivial term to a fresh variable via `is`, `abs` or
    /// `length`, returning the variable.
    fn via_temp(&mut self, t: &Term, temps: &mut Vec<Goal>) -> PTerm {
        match t {
            Term::Fun(n, args) if n == "abs" => {
                let inner = self.arith_or_temp(&args[0], temps);
                let v = PTerm::Var(self.fresh(Self::temp_base(t)));
                temps.push(Goal::Abs(inner, v.clone()));
                v
            }
            Term::Fun(n, args) if n == "len" => {
                let list = self.data_term(&args[0], temps);
                let v = PTerm::Var(self.fresh(Self::temp_base(t)));
                temps.push(Goal::Length(list, v.clone()));
                v
            }
            _ => {
                let expr = self.arith_expr(t, temps);
                if let PTerm::Var(_) = expr {
                    return expr;
                }
                let v = PTerm::Var(self.fresh(Self::temp_base(t)));
                temps.push(Goal::Is(v.clone(), expr));
                v
            }
        }
    }

    /// For `abs` arguments: a plain variable stays, anything else becomes a
    /// named temporary (the two-goal pattern `XmH is X - H, abs(XmH, AbsXmH)`).
    fn arith_or_temp(&mut self, t: &Term, temps: &mut Vec<Goal>) -> PTerm {
        match t {
            Term::Var(_) | Term::Fun(_, _) if matches!(t, Term::Var(_)) => {
                self.data_term(t, temps)
            }
            Term::Fun(n, args) if args.is_empty() => {
                PTerm::Int(n.parse().unwrap_or(0))
            }
            _ => self.via_temp(t, temps),
        }
    }

    fn is_list_pattern(t: &Term) -> bool {
        match t {
            Term::Fun(n, args) if n == "nil" && args.is_empty() => true,
            Term::Fun(n, args) if n == "cons" => args
                .iter()
                .all(|a| matches!(a, Term::Var(_)) || Self::is_list_pattern(a)),
            _ => false,
        }
    }

    fn compare(&mut self, op: CmpOp, a: &Term, b: &Term, out: &mut Vec<Goal>) {
        match op {
            CmpOp::Eq => {
                // length/2 directly when one side measures a list.
                if let Term::Fun(n, args) = a {
                    if n == "len" {
                        let mut temps = Vec::new();
                        let list = self.data_term(&args[0], &mut temps);
                        let r = self.data_term(b, &mut temps);
                        out.extend(temps);
                        out.push(Goal::Length(list, r));
                        return;
                    }
                }
                if let Term::Fun(n, args) = b {
                    if n == "len" {
                        let mut temps = Vec::new();
                        let list = self.data_term(&args[0], &mut temps);
                        let r = self.data_term(a, &mut temps);
                        out.extend(temps);
                        out.push(Goal::Length(list, r));
                        return;
                    }
                }
                // `V = e` with arithmetic on the right becomes `V is e`.
                let (var, expr) = match (a, b) {
                    (Term::Var(_), Term::Fun(n, args))
                        if !args.is_empty() && n != "cons" =>
                    {
                        (a, b)
                    }
                    (Term::Fun(n, args), Term::Var(_)) if !args.is_empty() && n != "cons" => {
                        (b, a)
                    }
                    _ => {
                        let mut temps = Vec::new();
                        let l = self.data_term(a, &mut temps);
                        let r = self.data_term(b, &mut temps);
                        out.extend(temps);
                        out.push(Goal::Unify(l, r));
                        return;
                    }
                };
                let mut temps = Vec::new();
                let v = self.data_term(var, &mut temps);
                if let Term::Fun(n, args) = expr {
                    if n == "abs" {
                        let inner = self.arith_or_temp(&args[0], &mut temps);
                        out.extend(temps);
                        out.push(Goal::Abs(inner, v));
                        return;
                    }
                }
                let e = self.arith_expr(expr, &mut temps);
                out.extend(temps);
                out.push(Goal::Is(v, e));
            }
            _ => {
                let text = match op {
                    CmpOp::Ne => "=\\=",
                    CmpOp::Lt => "<",
                    CmpOp::Le => "=<",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                    CmpOp::Eq => unreachable!(),
                };
                let mut temps = Vec::new();
                let l = self.via_operand(a, &mut temps);
                let r = self.via_operand(b, &mut temps);
                out.extend(temps);
                out.push(Goal::Cmp(text, l, r));
            }
        }
    }

    /// A comparison operand: variables and integers stay; `abs`/`len` and
    /// compound arithmetic go through temporaries.
    fn via_operand(&mut self, t: &Term, temps: &mut Vec<Goal>) -> PTerm {
        match t {
            Term::Var(_) => self.data_term(t, temps),
            Term::Fun(n, args) if args.is_empty() => PTerm::Int(n.parse().unwrap_or(0)),
            _ => self.via_temp(t, temps),
        }
    }

    fn lower_atom(&mut self, c: &Command, rec_id: Option<&str>, name: &str, out: &mut Vec<Goal>) {
        match c {
            Command::Spec(p) => self.lower_pred(p, out),
            Command::Call(id, args) => {
                let callee = if rec_id == Some(id.as_str()) {
                    name.to_string()
                } else {
                    id.clone()
                };
                let mut temps = Vec::new();
                let pargs = args
                    .iter()
                    .map(|a| {
                        if Self::is_list_pattern(a) || matches!(a, Term::Var(_)) || a.as_int().is_some() {
                            self.data_term(a, &mut temps)
                        } else {
                            self.via_temp(a, &mut temps)
                        }
                    })
                    .collect();
                out.extend(temps);
                out.push(Goal::Call(callee, pargs));
            }
            _ => unreachable!("non-atom survived flattening"),
        }
    }

    fn lower_pred(&mut self, p: &Pred, out: &mut Vec<Goal>) {
        match p {
            Pred::True => out.push(Goal::True),
            Pred::False => out.push(Goal::Fail),
            Pred::And(a, b) => {
                self.lower_pred(a, out);
                self.lower_pred(b, out);
            }
            Pred::Compare(op, a, b) => self.compare(*op, a, b, out),
            _ => unreachable!("non-executable predicate survived the check"),
        }
    }
}

/// Flatten a clause command into its atomic conjuncts, dropping existential
/// binders (their variables become implicit clause variables).
fn flatten_atoms(c: &Command, out: &mut Vec<Command>) {
    match c {
        Command::SAnd(l, r) => {
            flatten_atoms(l, out);
            flatten_atoms(r, out);
        }
        Command::Exists(_, b) => flatten_atoms(b, out),
        other => out.push(other.clone()),
    }
}

fn split_clauses(c: &Command, out: &mut Vec<Command>) {
    match c {
        Command::POr(l, r) => {
            split_clauses(l, out);
            split_clauses(r, out);
        }
        other => out.push(other.clone()),
    }
}

fn goal_var_flow(g: &Goal) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut needs = BTreeSet::new();
    let mut gives = BTreeSet::new();
    match g {
        Goal::Is(v, e) => {
            e.vars(&mut needs);
            v.vars(&mut gives);
        }
        Goal::Abs(a, r) => {
            a.vars(&mut needs);
            r.vars(&mut gives);
        }
        Goal::Cmp(_, a, b) => {
            a.vars(&mut needs);
            b.vars(&mut needs);
        }
        Goal::Unify(a, b) | Goal::Length(a, b) => {
            a.vars(&mut gives);
            b.vars(&mut gives);
        }
        Goal::Call(_, args) => {
            for a in args {
                a.vars(&mut gives);
            }
        }
        Goal::True | Goal::Fail => {}
    }
    (needs, gives)
}

/// Greedy dataflow ordering: repeatedly emit the first pending goal all of
/// whose required variables are ground.
fn order_goals(
    unit: &str,
    head_vars: &BTreeSet<String>,
    goals: Vec<Goal>,
) -> Result<Vec<Goal>, EmitError> {
    let mut ground = head_vars.clone();
    let mut pending = goals;
    let mut ordered = Vec::new();
    while !pending.is_empty() {
        let pos = pending.iter().position(|g| {
            let (needs, _) = goal_var_flow(g);
            needs.is_subset(&ground)
        });
        match pos {
            Some(i) => {
                let g = pending.remove(i);
                let (_, gives) = goal_var_flow(&g);
                ground.extend(gives);
                ordered.push(g);
            }
            None => {
                let (needs, _) = goal_var_flow(&pending[0]);
                let var = needs
                    .difference(&ground)
                    .next()
                    .cloned()
                    .unwrap_or_default();
                return Err(EmitError::UnorderableDataflow {
                    unit: unit.to_string(),
                    var,
                });
            }
        }
    }
    Ok(ordered)
}

fn lower_proc(name: &str, pc: &PCommand, unit: &mut PrologUnit) -> Result<(), EmitError> {
    let rec_id = match pc {
        PCommand::Rec(id, _) => Some(id.as_str()),
        PCommand::Param(..) => None,
    };
    let formals = pc.formals().to_vec();
    let body = normalize_command(pc.body());
    let mut branches = Vec::new();
    split_clauses(&body, &mut branches);
    for branch in branches {
        let mut atoms = Vec::new();
        flatten_atoms(&branch, &mut atoms);

        // Head folding: leading `<F = pattern>` goals on a formal fold the
        // list pattern into the head argument.
        let mut head_args: BTreeMap<String, Term> = BTreeMap::new();
        let mut rest = &atoms[..];
        while let Some(Command::Spec(Pred::Compare(CmpOp::Eq, Term::Var(f), pat))) = rest.first() {
            if formals.contains(f) && Lowerer::is_list_pattern(pat) && !head_args.contains_key(f) {
                head_args.insert(f.clone(), pat.clone());
                rest = &rest[1..];
            } else {
                break;
            }
        }

        let mut lw = Lowerer {
            used: BTreeSet::new(),
        };
        let mut temps = Vec::new();
        let args: Vec<PTerm> = formals
            .iter()
            .map(|f| match head_args.get(f) {
                Some(pat) => lw.data_term(pat, &mut temps),
                None => lw.data_term(&Term::var(f), &mut temps),
            })
            .collect();
        let mut head_vars = BTreeSet::new();
        for a in &args {
            a.vars(&mut head_vars);
        }
        let mut goals = temps;
        for atom in rest {
            lw.lower_atom(atom, rec_id, name, &mut goals);
        }
        let body = order_goals(name, &head_vars, goals)?;
        unit.clauses.push(Clause {
            name: name.to_string(),
            args,
            body,
        });
    }
    Ok(())
}

/// Rename head variables that occur only once to `_`, recording a warning.
fn anonymize_singletons(unit: &mut PrologUnit) {
    for clause in &mut unit.clauses {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut all = Vec::new();
        for a in &clause.args {
            let mut vs = BTreeSet::new();
            a.vars(&mut vs);
            all.extend(vs);
        }
        for g in &clause.body {
            let (needs, gives) = goal_var_flow(g);
            all.extend(needs);
            all.extend(gives);
        }
        for v in all {
            *counts.entry(v).or_insert(0) += 1;
        }
        fn subst(t: &mut PTerm, counts: &BTreeMap<String, usize>, hit: &mut Vec<String>) {
            match t {
                PTerm::Var(v) => {
                    if counts.get(v.as_str()) == Some(&1) {
                        hit.push(v.clone());
                        *v = "_".into();
                    }
                }
                PTerm::Cons(h, tl) => {
                    subst(h, counts, hit);
                    subst(tl, counts, hit);
                }
                _ => {}
            }
        }
        let mut hit = Vec::new();
        for a in &mut clause.args {
            subst(a, &counts, &mut hit);
        }
        for v in hit {
            unit.singleton_warnings.push((clause.name.clone(), v));
        }
    }
}

/// Translate an executable program to a Prolog unit.
pub fn emit_prolog(p: &Program) -> Result<PrologUnit, EmitError> {
    let report = check_executable(p);
    if !report.executable() {
        return Err(EmitError::NotExecutable(report.violations.len()));
    }
    let mut unit = PrologUnit::default();
    for (name, pc) in &p.procs {
        lower_proc(name, pc, &mut unit)?;
        unit.entries.push(name.clone());
    }
    anonymize_singletons(&mut unit);
    Ok(unit)
}

// ---------------------------------------------------------------------------
// Rendering

fn render_pterm(t: &PTerm, out: &mut String) {
    match t {
        PTerm::Var(v) => out.push_str(v),
        PTerm::Int(n) => {
            let _ = write!(out, "{}", n);
        }
        PTerm::Nil => out.push_str("[]"),
        PTerm::Cons(h, tl) => {
            out.push('[');
            render_pterm(h, out);
            out.push('|');
            render_pterm(tl, out);
            out.push(']');
        }
        PTerm::Arith(op, a, b) => {
            render_pterm(a, out);
            let _ = write!(out, " {} ", op);
            render_pterm(b, out);
        }
    }
}

fn render_goal(g: &Goal, out: &mut String) {
    match g {
        Goal::Unify(a, b) => {
            render_pterm(a, out);
            out.push_str(" = ");
            render_pterm(b, out);
        }
        Goal::Is(v, e) => {
            render_pterm(v, out);
            out.push_str(" is ");
            render_pterm(e, out);
        }
        Goal::Cmp(op, a, b) => {
            render_pterm(a, out);
            let _ = write!(out, " {} ", op);
            render_pterm(b, out);
        }
        Goal::Length(l, n) => {
            out.push_str("length(");
            render_pterm(l, out);
            out.push_str(", ");
            render_pterm(n, out);
            out.push(')');
        }
        Goal::Abs(a, r) => {
            out.push_str("abs(");
            render_pterm(a, out);
            out.push_str(", ");
            render_pterm(r, out);
            out.push(')');
        }
        Goal::Call(name, args) => {
            out.push_str(name);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    render_pterm(a, out);
                }
                out.push(')');
            }
        }
        Goal::True => out.push_str("true"),
        Goal::Fail => out.push_str("fail"),
    }
}

/// Deterministic text form: one clause per line, a blank line between
/// predicates.
pub fn render(u: &PrologUnit) -> String {
    let mut out = String::new();
    let mut last_name: Option<&str> = None;
    for clause in &u.clauses {
        if let Some(prev) = last_name {
            if prev != clause.name {
                out.push('\n');
            }
        }
        last_name = Some(&clause.name);
        out.push_str(&clause.name);
        if !clause.args.is_empty() {
            out.push('(');
            for (i, a) in clause.args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_pterm(a, &mut out);
            }
            out.push(')');
        }
        if !clause.body.is_empty() {
            out.push_str(" :- ");
            for (i, g) in clause.body.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_goal(g, &mut out);
            }
        }
        out.push_str(".\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn strip_ws(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    const FACT_REFINED: &str = r#"
        universe {
            values int 0..24;
            var U in 0..4; var U1 in 0..4;
            var V in 0..24; var V1 in 0..6;
            fun minus/2 builtin; fun times/2 builtin; fun fact/1 builtin;
        }
        proc f = re f . (U, V .
            (<U = 0>, <V = 1>)
            \/
            (<U > 0>, exists U1, V1 . <U1 = U - 1>, f(U1, V1), <V = V1 * U>)) er;
    "#;

    #[test]
    fn factorial_translation_is_exact() {
        let program = parse_program(FACT_REFINED).unwrap();
        assert!(check_executable(&program).executable());
        let unit = emit_prolog(&program).unwrap();
        let text = render(&unit);
        let expected = "f(U,V) :- U=0, V=1.\nf(U,V) :- U>0, U1 is U-1, f(U1,V1), V is V1*U.\n";
        assert_eq!(strip_ws(&text), strip_ws(expected), "got:\n{}", text);
    }

    #[test]
    fn rejects_each_nonexecutable_construct() {
        let cases = [
            ("proc g = (X . {X = 0});", Reason::Assumption),
            ("proc g = (X . forall Y . <X = Y>);", Reason::UniversalQuantifier),
            ("proc g = (X . <X = 0> /\\ <X = 0>);", Reason::ParallelConjunction),
            ("proc g = (X . <nat(X)>);", Reason::GeneralSpec),
            ("proc g = (X . <X in 0..1>);", Reason::NonArithmeticSpec),
        ];
        for (src, reason) in cases {
            let program = parse_program(&format!(
                "universe {{ values int 0..1; var X in 0..1; var Y in 0..1; }} {}",
                src
            ))
            .unwrap();
            let report = check_executable(&program);
            assert_eq!(
                report.violations.first().map(|v| v.reason),
                Some(reason),
                "{}",
                src
            );
            assert!(matches!(
                emit_prolog(&program),
                Err(EmitError::NotExecutable(_))
            ));
        }
    }

    #[test]
    fn unorderable_dataflow_is_reported() {
        let program = parse_program(
            r#"
            universe { values int 0..1; var V in 0..1; var X in 0..1; fun div/2 builtin; }
            proc h = (V . exists X . <V = div(1, X)>);
            "#,
        )
        .unwrap();
        match emit_prolog(&program) {
            Err(EmitError::UnorderableDataflow { var, .. }) => assert_eq!(var, "X"),
            other => panic!("expected UnorderableDataflow, got {:?}", other),
        }
    }

    #[test]
    fn head_folding_and_singletons() {
        let program = parse_program(
            r#"
            universe {
                values lists maxlen 2 over 1..2;
                var X in 1..2; var P in lists;
                var H in 1..2; var T in lists maxlen 1;
            }
            proc norowclash = re norowc . (X, P .
                <P = []>
                \/
                (exists H, T . <P = [H | T]>, <X != H>, norowc(X, T))) er;
            "#,
        )
        .unwrap();
        let unit = emit_prolog(&program).unwrap();
        let text = render(&unit);
        assert!(text.contains("norowclash(_, []).\n"), "{}", text);
        assert!(
            text.contains("norowclash(X, [H|T]) :- X =\\= H, norowclash(X, T)."),
            "{}",
            text
        );
        assert_eq!(unit.singleton_warnings, vec![("norowclash".into(), "X".into())]);
    }

    #[test]
    fn abs_uses_the_two_goal_pattern() {
        let program = parse_program(
            r#"
            universe {
                values int -2..4;
                values lists maxlen 2 over 1..2;
                var X in 1..2; var P in lists; var H in 1..2;
                var T in lists maxlen 1; var J in 1..3;
                fun minus/2 builtin; fun plus/2 builtin; fun abs/1 builtin;
            }
            proc nodiagAcc = re nod . (X, P, J .
                <P = []>
                \/
                (exists H, T . <P = [H | T]>, <J != abs(X - H)>, nod(X, T, J + 1))) er;
            "#,
        )
        .unwrap();
        let text = render(&emit_prolog(&program).unwrap());
        assert!(text.contains("nodiagAcc(_, [], _).\n"), "{}", text);
        assert!(
            text.contains("XmH is X - H, abs(XmH, AbsXmH), J =\\= AbsXmH, J1 is J + 1, nodiagAcc(X, T, J1)"),
            "{}",
            text
        );
    }

    #[test]
    fn length_goals_for_list_measures() {
        let program = parse_program(
            r#"
            universe {
                values lists maxlen 2 over 1..2;
                var N in 0..2; var P in lists; var S in lists;
                fun len/1 builtin;
            }
            proc done = (N, P, S . <len(P) = N>, <S = P>);
            proc more = (N, P, S . <len(P) < N>);
            "#,
        )
        .unwrap();
        let text = render(&emit_prolog(&program).unwrap());
        assert!(text.contains("done(N, P, S) :- length(P, N), S = P."), "{}", text);
        assert!(text.contains("more(N, P, _) :- length(P, LenP), LenP < N."), "{}", text);
    }

    #[test]
    fn ground_success_sets_agree_with_the_semantics() {
        // Enumerate ground queries f(u, v) over the finite universe and run
        // the emitted clauses as ground goals; the success set must match
        // the Succeed entries of the fixed-point execution.
        use crate::semantics::{fix, Env};
        use crate::universe::Universe;

        let program = parse_program(FACT_REFINED).unwrap();
        let unit = emit_prolog(&program).unwrap();
        let u = Universe::from_items(&program.universe).unwrap();
        let fr = fix(&u, &Env::new(), program.proc("f").unwrap()).unwrap();
        let var_u = u.var_id("U").unwrap();
        let var_v = u.var_id("V").unwrap();

        fn solve(unit: &PrologUnit, name: &str, args: &[i64], depth: usize) -> bool {
            if depth == 0 {
                return false;
            }
            unit.clauses.iter().filter(|c| c.name == name).any(|c| {
                let mut env: BTreeMap<String, i64> = BTreeMap::new();
                for (a, v) in c.args.iter().zip(args) {
                    match a {
                        PTerm::Var(x) if x != "_" => {
                            env.insert(x.clone(), *v);
                        }
                        _ => {}
                    }
                }
                fn ev(t: &PTerm, env: &BTreeMap<String, i64>) -> Option<i64> {
                    match t {
                        PTerm::Var(v) => env.get(v).copied(),
                        PTerm::Int(n) => Some(*n),
                        PTerm::Arith(op, a, b) => {
                            let (x, y) = (ev(a, env)?, ev(b, env)?);
                            Some(match *op {
                                "+" => x + y,
                                "-" => x - y,
                                "*" => x * y,
                                _ => x.checked_div(y)?,
                            })
                        }
                        _ => None,
                    }
                }
                c.body.iter().all(|g| match g {
                    Goal::Unify(a, b) => match (ev(a, &env), ev(b, &env)) {
                        (Some(x), Some(y)) => x == y,
                        _ => false,
                    },
                    Goal::Is(PTerm::Var(v), e) => match ev(e, &env) {
                        Some(x) => match env.get(v) {
                            Some(&bound) => bound == x,
                            None => {
                                env.insert(v.clone(), x);
                                true
                            }
                        },
                        None => false,
                    },
                    Goal::Cmp(op, a, b) => match (ev(a, &env), ev(b, &env)) {
                        (Some(x), Some(y)) => match *op {
                            "<" => x < y,
                            ">" => x > y,
                            "=<" => x <= y,
                            ">=" => x >= y,
                            _ => x != y,
                        },
                        _ => false,
                    },
                    Goal::Call(callee, cargs) => {
                        // Recursive calls may bind fresh variables; search
                        // the finite value space for witnesses.
                        let mut known = Vec::new();
                        let mut free = Vec::new();
                        for (i, a) in cargs.iter().enumerate() {
                            match ev(a, &env) {
                                Some(v) => known.push((i, v)),
                                None => free.push(i),
                            }
                        }
                        // At most one free variable occurs in this corpus.
                        if free.is_empty() {
                            let vals: Vec<i64> =
                                cargs.iter().map(|a| ev(a, &env).unwrap()).collect();
                            solve(unit, callee, &vals, depth - 1)
                        } else if free.len() == 1 {
                            (0..=24).any(|w| {
                                let mut vals = vec![0; cargs.len()];
                                for (i, v) in &known {
                                    vals[*i] = *v;
                                }
                                vals[free[0]] = w;
                                if solve(unit, callee, &vals, depth - 1) {
                                    if let PTerm::Var(x) = &cargs[free[0]] {
                                        env.insert(x.clone(), w);
                                    }
                                    true
                                } else {
                                    false
                                }
                            })
                        } else {
                            false
                        }
                    }
                    Goal::True => true,
                    _ => false,
                })
            })
        }

        for &uid in u.domain(var_u) {
            for &vid in u.domain(var_v) {
                let uu = u.as_int(uid).unwrap();
                let vv = u.as_int(vid).unwrap();
                let semantic = fr.pexec.status_at(&u, &[uid, vid]).unwrap();
                let prolog = solve(&unit, "f", &[uu, vv], 10);
                assert_eq!(
                    prolog,
                    semantic == crate::exec::Status::Succeed,
                    "f({}, {})",
                    uu,
                    vv
                );
            }
        }
    }
}
