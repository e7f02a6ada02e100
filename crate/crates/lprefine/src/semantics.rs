//! The semantic function from commands to executions, parametrised
//! executions for procedures, and least-fixed-point semantics for recursion
//! blocks.
//!
//! A command is evaluated over a space covering (at least) its free
//! variables.  Quantifiers extend the space with the bound variable, apply
//! the corresponding execution operator and return to the original space.
//! A procedure's meaning is an execution over the space of its formals;
//! calls evaluate their argument terms per caller binding and look the
//! status up in that table.  A call argument whose value falls outside the
//! formal's domain makes the call undefined at that binding, as does a call
//! on an identifier not bound in the environment.

use std::collections::{BTreeSet, HashMap};

use crate::exec::{
    broadcast, e_and, e_exists, e_forall, e_or, e_seq, from_assert, from_spec, refines,
    ExecError, Execution, Status,
};
use crate::syntax::ast::{Command, PCommand, Term};
use crate::syntax::free_vars_command;
use crate::universe::{BindCtx, Space, Universe, UniverseError, ValId, VarId};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SemError {
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("universe error: {0}")]
    Universe(#[from] UniverseError),
    #[error("`{name}` expects {expected} arguments, got {got}")]
    ArityError {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("fixed-point iterate {iteration} is not refined by its successor")]
    MonotonicityViolation { iteration: usize },
    #[error("recursion blocks nested deeper than {0}")]
    NestingTooDeep(usize),
}

/// Cap on directly nested recursion blocks.
pub const MAX_REC_NESTING: usize = 8;

/// The meaning of a parametrised command: a status table over the space of
/// its formals.  Applying it to argument terms reads the table at the
/// evaluated argument tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamExecution {
    /// Formal parameters in declaration order.
    pub formals: Vec<VarId>,
    /// Table over the formal space (axes sorted by variable id).
    pub table: Execution,
}

/// Environments map procedure identifiers to parametrised executions.
pub type Env = HashMap<String, ParamExecution>;

impl ParamExecution {
    /// The everywhere-undefined procedure over the given formals.
    pub fn pabort(u: &Universe, formals: Vec<VarId>) -> Result<ParamExecution, SemError> {
        let space = Space::over(u, formals.iter().copied())?;
        Ok(ParamExecution {
            formals,
            table: Execution::abort(space),
        })
    }

    /// Status at one evaluated argument tuple; `None` when some argument
    /// value is outside the corresponding formal's domain.
    pub fn status_at(&self, u: &Universe, argvals: &[ValId]) -> Option<Status> {
        debug_assert_eq!(argvals.len(), self.formals.len());
        let mut idx = 0usize;
        for (&f, &v) in self.formals.iter().zip(argvals) {
            let pos = u.domain_pos(f, v)?;
            idx += pos * self.table.space.stride_of(f).expect("formal axis");
        }
        Some(self.table.status[idx])
    }
}

/// The execution of a call on an already-elaborated parametrised command,
/// over an explicit caller space.
pub fn call_space_exec(
    u: &Universe,
    pe: &ParamExecution,
    args: &[Term],
    space: &Space,
) -> Result<Execution, SemError> {
    call_exec(u, pe, "(call)", args, space)
}

/// The execution of a call `id(ts)` over `space`, given the callee's table.
fn call_exec(
    u: &Universe,
    pe: &ParamExecution,
    name: &str,
    args: &[Term],
    space: &Space,
) -> Result<Execution, SemError> {
    if args.len() != pe.formals.len() {
        return Err(SemError::ArityError {
            name: name.to_string(),
            expected: pe.formals.len(),
            got: args.len(),
        });
    }
    let mut status = Vec::with_capacity(space.size);
    let mut vals = Vec::new();
    let mut argvals = Vec::with_capacity(args.len());
    for idx in 0..space.size {
        space.decode_vals(u, idx, &mut vals);
        let mut ctx = BindCtx::new(space, &vals);
        argvals.clear();
        let mut ok = true;
        for t in args {
            match u.eval_term(t, &mut ctx) {
                Some(v) => argvals.push(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let st = if ok {
            pe.status_at(u, &argvals).unwrap_or(Status::Undefined)
        } else {
            Status::Undefined
        };
        status.push(st);
    }
    Ok(Execution {
        space: space.clone(),
        status,
    })
}

/// Evaluate a command over an explicit space, which must cover its free
/// variables.
pub fn cexec_in(
    u: &Universe,
    env: &Env,
    c: &Command,
    space: &Space,
) -> Result<Execution, SemError> {
    match c {
        Command::Spec(p) => Ok(from_spec(u, space, p)),
        Command::Assert(p) => Ok(from_assert(u, space, p)),
        Command::POr(l, r) => Ok(e_or(
            &cexec_in(u, env, l, space)?,
            &cexec_in(u, env, r, space)?,
        )?),
        Command::PAnd(l, r) => Ok(e_and(
            &cexec_in(u, env, l, space)?,
            &cexec_in(u, env, r, space)?,
        )?),
        Command::SAnd(l, r) => Ok(e_seq(
            &cexec_in(u, env, l, space)?,
            &cexec_in(u, env, r, space)?,
        )?),
        Command::Exists(v, body) | Command::Forall(v, body) => {
            let vid = u.var_id(v)?;
            let inner_space = Space::over(
                u,
                space.vars.iter().copied().chain(std::iter::once(vid)),
            )?;
            let e = cexec_in(u, env, body, &inner_space)?;
            let q = if matches!(c, Command::Exists(_, _)) {
                e_exists(u, &e, vid)?
            } else {
                e_forall(u, &e, vid)?
            };
            // q is over the inner space minus v; replicate if v was already
            // an axis of the requested space.
            Ok(broadcast(&q, space)?)
        }
        Command::Call(id, args) => match env.get(id) {
            Some(pe) => call_exec(u, pe, id, args, space),
            // A call on an unbound identifier is abort.
            None => Ok(Execution::abort(space.clone())),
        },
    }
}

/// Evaluate a command over the space of its free variables.
pub fn cexec(u: &Universe, env: &Env, c: &Command) -> Result<Execution, SemError> {
    let space = command_space(u, c)?;
    cexec_in(u, env, c, &space)
}

/// The space of a command's free variables.
pub fn command_space(u: &Universe, c: &Command) -> Result<Space, SemError> {
    let mut vids = BTreeSet::new();
    for name in free_vars_command(c) {
        vids.insert(u.var_id(&name)?);
    }
    Ok(Space::over(u, vids)?)
}

/// The result of computing a fixed point: the converged table plus the
/// iterate chain that led to it (starting from the fully undefined table).
#[derive(Debug, Clone)]
pub struct FixResult {
    pub pexec: ParamExecution,
    pub iterates: Vec<Execution>,
}

/// The meaning of a parametrised command.
pub fn pexec(u: &Universe, env: &Env, pc: &PCommand) -> Result<ParamExecution, SemError> {
    pexec_depth(u, env, pc, 0)
}

fn pexec_depth(
    u: &Universe,
    env: &Env,
    pc: &PCommand,
    depth: usize,
) -> Result<ParamExecution, SemError> {
    match pc {
        PCommand::Param(formals, body) => {
            let mut vids = Vec::with_capacity(formals.len());
            for f in formals {
                vids.push(u.var_id(f)?);
            }
            let space = Space::over(u, vids.iter().copied())?;
            let table = cexec_in(u, env, body, &space)?;
            Ok(ParamExecution {
                formals: vids,
                table,
            })
        }
        PCommand::Rec(_, _) => Ok(fix_depth(u, env, pc, depth)?.pexec),
    }
}

/// Least fixed point of a recursion block, by chain iteration from the
/// everywhere-undefined table.
pub fn fix(u: &Universe, env: &Env, rec: &PCommand) -> Result<FixResult, SemError> {
    fix_depth(u, env, rec, 0)
}

fn fix_depth(
    u: &Universe,
    env: &Env,
    rec: &PCommand,
    depth: usize,
) -> Result<FixResult, SemError> {
    if depth >= MAX_REC_NESTING {
        return Err(SemError::NestingTooDeep(MAX_REC_NESTING));
    }
    let (id, inner) = match rec {
        PCommand::Rec(id, inner) => (id, inner.as_ref()),
        PCommand::Param(_, _) => {
            let pe = pexec_depth(u, env, rec, depth)?;
            let table = pe.table.clone();
            return Ok(FixResult {
                pexec: pe,
                iterates: vec![table],
            });
        }
    };
    let mut vids = Vec::new();
    for f in inner.formals() {
        vids.push(u.var_id(f)?);
    }
    let mut cur = ParamExecution::pabort(u, vids)?;
    let mut iterates = vec![cur.table.clone()];
    let mut iteration = 0usize;
    loop {
        let mut env2 = env.clone();
        env2.insert(id.clone(), cur.clone());
        let next = pexec_depth(u, &env2, inner, depth + 1)?;
        if !refines(&cur.table, &next.table)? {
            return Err(SemError::MonotonicityViolation { iteration });
        }
        let stable = next.table == cur.table;
        cur = next;
        if stable {
            return Ok(FixResult {
                pexec: cur,
                iterates,
            });
        }
        iterates.push(cur.table.clone());
        iteration += 1;
    }
}

/// Apply a parametrised command to argument terms, over `space`.
pub fn apply_pcmd(
    u: &Universe,
    env: &Env,
    pc: &PCommand,
    args: &[Term],
    space: &Space,
) -> Result<Execution, SemError> {
    let pe = pexec(u, env, pc)?;
    call_exec(u, &pe, "(anonymous)", args, space)
}

/// Build the environment of a program: procedures are elaborated in order,
/// each seeing the ones before it.
pub fn program_env(u: &Universe, procs: &[(String, PCommand)]) -> Result<Env, SemError> {
    let mut env = Env::new();
    for (name, pc) in procs {
        let pe = pexec(u, &env, pc)?;
        env.insert(name.clone(), pe);
    }
    Ok(env)
}

/// A variant relation for recursion introduction: `decides(old, new)` holds
/// when the recursive call's argument tuple `new` is strictly smaller than
/// `old` in the well-founded order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantRelation {
    /// Strict decrease of the integer in the given formal position.
    IntLt(usize),
    /// Bounded growth: the list in position `list` grows strictly while its
    /// length stays at most the integer bound in position `bound`.
    ListGrow { bound: usize, list: usize },
}

impl VariantRelation {
    pub fn decides(&self, u: &Universe, old: &[ValId], new: &[ValId]) -> bool {
        match *self {
            VariantRelation::IntLt(i) => match (u.as_int(old[i]), u.as_int(new[i])) {
                (Some(a), Some(b)) => b < a && b >= 0,
                _ => false,
            },
            VariantRelation::ListGrow { bound, list } => {
                let b = match u.as_int(old[bound]) {
                    Some(b) => b,
                    None => return false,
                };
                let lo = u.list_elems(old[list]).map(|e| e.len());
                let ln = u.list_elems(new[list]).map(|e| e.len());
                match (lo, ln) {
                    (Some(lo), Some(ln)) => ln > lo && (ln as i64) <= b,
                    _ => false,
                }
            }
        }
    }
}

/// Check well-foundedness of a variant over the formal space: the relation
/// graph on argument tuples must be acyclic.
pub fn check_wellfounded(
    u: &Universe,
    rel: &VariantRelation,
    space: &Space,
) -> Result<bool, SemError> {
    check_wellfounded_by(u, space, |old, new| rel.decides(u, old, new))
}

/// Acyclicity check for an arbitrary "strictly smaller" relation on the
/// tuples of a space.
pub fn check_wellfounded_by(
    u: &Universe,
    space: &Space,
    decides: impl Fn(&[ValId], &[ValId]) -> bool,
) -> Result<bool, SemError> {
    const MAX_NODES: usize = 10_000;
    if space.size > MAX_NODES {
        return Err(SemError::Universe(UniverseError::ConfigError {
            size: space.size,
            cap: MAX_NODES,
        }));
    }
    let mut tuples = Vec::with_capacity(space.size);
    for idx in 0..space.size {
        let mut vals = Vec::new();
        space.decode_vals(u, idx, &mut vals);
        tuples.push(vals);
    }
    // Three-colour DFS over the "strictly smaller" edges.
    #[derive(Clone, Copy, PartialEq)]
    enum Colour {
        White,
        Grey,
        Black,
    }
    let mut colour = vec![Colour::White; space.size];
    for start in 0..space.size {
        if colour[start] != Colour::White {
            continue;
        }
        // Iterative DFS with an explicit successor cursor.
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        colour[start] = Colour::Grey;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let mut advanced = false;
            while *next < space.size {
                let succ = *next;
                *next += 1;
                if decides(&tuples[node], &tuples[succ]) {
                    match colour[succ] {
                        Colour::Grey => return Ok(false),
                        Colour::White => {
                            colour[succ] = Colour::Grey;
                            stack.push((succ, 0));
                            advanced = true;
                            break;
                        }
                        Colour::Black => {}
                    }
                }
            }
            if !advanced && stack.last().map(|&(n, _)| n) == Some(node) {
                colour[node] = Colour::Black;
                stack.pop();
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ast::{DomainSpec, UniverseItem};
    use crate::syntax::{encode_mutual_recursion, parse_command, parse_program};

    fn xu() -> Universe {
        Universe::from_items(&[
            UniverseItem::ValuesInt(0, 2),
            UniverseItem::Var("X".into(), DomainSpec::IntRange(0, 2)),
        ])
        .unwrap()
    }

    fn rec(src: &str) -> PCommand {
        let p = parse_program(src).unwrap();
        p.procs[0].1.clone()
    }

    #[test]
    fn trivial_recursions() {
        let u = xu();
        let env = Env::new();
        // The trivial non-terminating recursion is pabort.
        let r = fix(&u, &env, &rec("proc p = re p . (X . p(X)) er;")).unwrap();
        assert!(r
            .pexec
            .table
            .status
            .iter()
            .all(|&s| s == Status::Undefined));
        assert_eq!(r.iterates.len(), 1);
        // The sequential variant fails off X=1 but never terminates on it.
        let r = fix(&u, &env, &rec("proc p = re p . (X . <X = 1>, p(X)) er;")).unwrap();
        let guarded_abort =
            pexec(&u, &env, &rec("proc q = (X . <X = 1>, abort);")).unwrap();
        assert_eq!(r.pexec.table, guarded_abort.table);
        // Both parallel-operator variants degenerate to pabort.
        for op in ["/\\", "\\/"] {
            let src = format!("proc p = re p . (X . <X = 1> {} p(X)) er;", op);
            let r = fix(&u, &env, &rec(&src)).unwrap();
            assert!(r
                .pexec
                .table
                .status
                .iter()
                .all(|&s| s == Status::Undefined));
        }
    }

    #[test]
    fn call_on_unbound_id_is_abort() {
        let u = xu();
        let env = Env::new();
        let c = parse_command("nowhere(X)").unwrap();
        let e = cexec(&u, &env, &c).unwrap();
        assert!(e.status.iter().all(|&s| s == Status::Undefined));
    }

    #[test]
    fn param_application() {
        let u = xu();
        let env = Env::new();
        let pc = rec("proc p = (X . <X = 0>);");
        let space = Space::full(&u).unwrap();
        // At the literal 0 the instance is true everywhere.
        let e = apply_pcmd(&u, &env, &pc, &[Term::int(0)], &space).unwrap();
        assert!(e.status.iter().all(|&s| s == Status::Succeed));
        // At X the instance succeeds exactly where X is 0.
        let e = apply_pcmd(&u, &env, &pc, &[Term::var("X")], &space).unwrap();
        assert_eq!(e.status, vec![Status::Succeed, Status::Fail, Status::Fail]);
        // An argument value outside the formal's domain is undefined, and
        // here 5 is not even a universe value.
        let e = apply_pcmd(&u, &env, &pc, &[Term::int(5)], &space).unwrap();
        assert!(e.status.iter().all(|&s| s == Status::Undefined));
    }

    #[test]
    fn environment_irrelevance_for_call_free() {
        let u = xu();
        let c = parse_command("<X = 1> \\/ {X = 0}").unwrap();
        let empty = Env::new();
        let mut env = Env::new();
        env.insert(
            "p".into(),
            ParamExecution::pabort(&u, vec![u.var_id("X").unwrap()]).unwrap(),
        );
        assert_eq!(
            cexec(&u, &empty, &c).unwrap(),
            cexec(&u, &env, &c).unwrap()
        );
    }

    #[test]
    fn fixed_point_equation_and_unfolding() {
        let u = Universe::from_items(&[
            UniverseItem::ValuesInt(0, 3),
            UniverseItem::Var("X".into(), DomainSpec::IntRange(0, 3)),
            UniverseItem::Var("X1".into(), DomainSpec::IntRange(0, 3)),
            UniverseItem::FunBuiltin("minus".into(), 2),
        ])
        .unwrap();
        let env = Env::new();
        // Count down to zero.
        let pc = rec(
            "proc down = re d . (X . <X = 0> \\/ (<X > 0>, exists X1 . <X1 = X - 1>, d(X1))) er;",
        );
        let r = fix(&u, &env, &pc).unwrap();
        // Terminates (and succeeds) everywhere.
        assert!(r.pexec.table.status.iter().all(|&s| s == Status::Succeed));
        // Unfolding consistency: interpreting the body with the block bound
        // to the fixed point reproduces the fixed point.
        let inner = match &pc {
            PCommand::Rec(id, inner) => {
                let mut env2 = env.clone();
                env2.insert(id.clone(), r.pexec.clone());
                pexec(&u, &env2, inner).unwrap()
            }
            _ => unreachable!(),
        };
        assert_eq!(inner.table, r.pexec.table);
        // The iterates form a chain whose join is the fixed point.
        let chain = crate::exec::ExecChain::new(
            r.iterates
                .iter()
                .cloned()
                .chain(std::iter::once(r.pexec.table.clone()))
                .collect(),
        )
        .unwrap();
        assert_eq!(crate::exec::chain_join(&chain), r.pexec.table);
    }

    #[test]
    fn mutual_recursion_agrees_with_direct() {
        let u = Universe::from_items(&[
            UniverseItem::ValuesInt(0, 3),
            UniverseItem::Var("I".into(), DomainSpec::IntRange(1, 2)),
            UniverseItem::Var("X".into(), DomainSpec::IntRange(0, 3)),
            UniverseItem::Var("Y".into(), DomainSpec::IntRange(0, 3)),
            UniverseItem::Var("X_u".into(), DomainSpec::IntRange(0, 3)),
            UniverseItem::Var("Y_u".into(), DomainSpec::IntRange(0, 3)),
            UniverseItem::FunBuiltin("minus".into(), 2),
        ])
        .unwrap();
        let even = PCommand::Param(
            vec!["X".into()],
            parse_command("<X = 0> \\/ (<X > 0>, odd(X - 1))").unwrap(),
        );
        let odd = PCommand::Param(
            vec!["Y".into()],
            parse_command("<Y = 1> \\/ (<Y > 1>, even(Y - 1))").unwrap(),
        );
        let (name, combined) = encode_mutual_recursion(
            &[("even".into(), even), ("odd".into(), odd)],
            "evenodd",
            "I",
        )
        .unwrap();
        let block = PCommand::Rec(name.clone(), Box::new(combined));
        let env = Env::new();
        let r = fix(&u, &env, &block).unwrap();
        let mut env2 = Env::new();
        env2.insert(name, r.pexec);
        let space = Space::over(&u, [u.var_id("X").unwrap(), u.var_id("Y").unwrap()]).unwrap();
        let call_even =
            parse_command("evenodd(1, X, Y)").unwrap();
        let e = cexec_in(&u, &env2, &call_even, &space).unwrap();
        // Succeeds exactly where X is even, independent of Y.
        let mut vals = Vec::new();
        for idx in 0..space.size {
            space.decode_vals(&u, idx, &mut vals);
            let x = u.as_int(vals[0]).unwrap();
            let want = if x % 2 == 0 {
                Status::Succeed
            } else {
                Status::Fail
            };
            assert_eq!(e.status[idx], want, "at X={}", x);
        }
    }

    #[test]
    fn variants_and_wellfoundedness() {
        let u = Universe::from_items(&[
            UniverseItem::ValuesInt(0, 9),
            UniverseItem::Var("U".into(), DomainSpec::IntRange(0, 9)),
        ])
        .unwrap();
        let space = Space::full(&u).unwrap();
        assert!(check_wellfounded(&u, &VariantRelation::IntLt(0), &space).unwrap());
        // Lists growing under a bound are well-founded too.
        let ul = Universe::from_items(&[
            UniverseItem::ValuesInt(0, 3),
            UniverseItem::ValuesLists {
                maxlen: 3,
                lo: 1,
                hi: 3,
            },
            UniverseItem::Var("N".into(), DomainSpec::IntRange(0, 3)),
            UniverseItem::Var("P".into(), DomainSpec::Lists(None)),
        ])
        .unwrap();
        let lspace = Space::full(&ul).unwrap();
        assert!(
            check_wellfounded(&ul, &VariantRelation::ListGrow { bound: 0, list: 1 }, &lspace)
                .unwrap()
        );
    }

    #[test]
    fn cyclic_variant_rejected() {
        let u = Universe::from_items(&[
            UniverseItem::ValuesInt(0, 2),
            UniverseItem::Var("X".into(), DomainSpec::IntRange(0, 2)),
        ])
        .unwrap();
        let space = Space::full(&u).unwrap();
        // Successor modulo 3 cycles, so it is not well-founded.
        let sucmod3 = |old: &[ValId], new: &[ValId]| {
            let a = u.as_int(old[0]).unwrap();
            let b = u.as_int(new[0]).unwrap();
            b == (a + 1) % 3
        };
        assert!(!check_wellfounded_by(&u, &space, sucmod3).unwrap());
        assert!(check_wellfounded(&u, &VariantRelation::IntLt(0), &space).unwrap());
    }
}
