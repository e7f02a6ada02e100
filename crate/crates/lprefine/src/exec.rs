//! Executions and their algebra.
//!
//! An execution is a partial function from states to states satisfying the
//! healthiness properties: its domain is the powerset of the individually
//! defined bindings, it can only discard bindings, and it keeps exactly the
//! bindings it preserves as singletons.  Those properties make an execution
//! fully determined by its action on singleton states, so the canonical
//! representation is one [`Status`] per binding of a [`Space`].  The
//! [`NaiveExecution`] set-of-pairs form is kept as an independent oracle.

use std::collections::BTreeSet;

use crate::universe::{BindCtx, PredValue, Space, Universe, UniverseError, VarId};
use crate::syntax::ast::Pred;

/// The action of an execution on one singleton state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    /// The singleton is outside the execution's domain.
    Undefined,
    /// The singleton maps to the empty state.
    Fail,
    /// The singleton maps to itself.
    Succeed,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("executions are over different spaces")]
    UniverseMismatch,
    #[error("not a refinement chain at position {0}")]
    NotAChain(usize),
    #[error("naive execution violates healthiness property ({0})")]
    NotHealthy(u8),
    #[error("space of {0} bindings is too large for the naive representation")]
    TooLarge(usize),
    #[error(transparent)]
    Universe(#[from] UniverseError),
}

/// An execution over a space: one status per binding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub space: Space,
    pub status: Vec<Status>,
}

impl Execution {
    pub fn constant(space: Space, st: Status) -> Execution {
        let n = space.size;
        Execution {
            space,
            status: vec![st; n],
        }
    }

    /// `skip`: the identity on states.
    pub fn skip(space: Space) -> Execution {
        Execution::constant(space, Status::Succeed)
    }

    /// `fail`: maps every state to the empty state.
    pub fn fail(space: Space) -> Execution {
        Execution::constant(space, Status::Fail)
    }

    /// `abort`: defined only on the empty state.
    pub fn abort(space: Space) -> Execution {
        Execution::constant(space, Status::Undefined)
    }

    fn same_space(&self, other: &Execution) -> Result<(), ExecError> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(ExecError::UniverseMismatch)
        }
    }

    /// Apply to a state (a set of binding indices).  `None` models the
    /// outside-domain outcome.
    pub fn apply(&self, s: &BTreeSet<usize>) -> Option<BTreeSet<usize>> {
        if s.iter().any(|&b| self.status[b] == Status::Undefined) {
            return None;
        }
        Some(
            s.iter()
                .copied()
                .filter(|&b| self.status[b] == Status::Succeed)
                .collect(),
        )
    }

    /// One line per binding, in enumeration order.
    pub fn dump(&self, u: &Universe) -> String {
        let mut out = String::new();
        let mut vals = Vec::new();
        for idx in 0..self.space.size {
            self.space.decode_vals(u, idx, &mut vals);
            let parts: Vec<String> = self
                .space
                .vars
                .iter()
                .zip(&vals)
                .map(|(&v, &val)| format!("{}={}", u.var_name(v), u.display_value(val)))
                .collect();
            let st = match self.status[idx] {
                Status::Undefined => "undefined",
                Status::Fail => "fail",
                Status::Succeed => "succeed",
            };
            out.push_str(&format!("{} -> {}\n", parts.join(" "), st));
        }
        out
    }
}

/// Execution of a specification `<P>`: defined where `P` is defined,
/// succeeding exactly where it holds.
pub fn from_spec(u: &Universe, space: &Space, p: &Pred) -> Execution {
    per_binding(u, space, |u, ctx| match u.eval_pred(p, ctx) {
        PredValue::True => Status::Succeed,
        PredValue::False => Status::Fail,
        PredValue::Undefined => Status::Undefined,
    })
}

/// Execution of an assumption `{A}`: the identity where `A` holds,
/// undefined elsewhere.
pub fn from_assert(u: &Universe, space: &Space, p: &Pred) -> Execution {
    per_binding(u, space, |u, ctx| match u.eval_pred(p, ctx) {
        PredValue::True => Status::Succeed,
        _ => Status::Undefined,
    })
}

fn per_binding(
    u: &Universe,
    space: &Space,
    f: impl Fn(&Universe, &mut BindCtx) -> Status,
) -> Execution {
    let mut status = Vec::with_capacity(space.size);
    let mut vals = Vec::new();
    for idx in 0..space.size {
        space.decode_vals(u, idx, &mut vals);
        let mut ctx = BindCtx::new(space, &vals);
        status.push(f(u, &mut ctx));
    }
    Execution {
        space: space.clone(),
        status,
    }
}

fn zip_with(
    e1: &Execution,
    e2: &Execution,
    f: impl Fn(Status, Status) -> Status,
) -> Result<Execution, ExecError> {
    e1.same_space(e2)?;
    Ok(Execution {
        space: e1.space.clone(),
        status: e1
            .status
            .iter()
            .zip(&e2.status)
            .map(|(&a, &b)| f(a, b))
            .collect(),
    })
}

/// Parallel conjunction: pointwise intersection of the induced functions.
pub fn e_and(e1: &Execution, e2: &Execution) -> Result<Execution, ExecError> {
    zip_with(e1, e2, |a, b| match (a, b) {
        (Status::Undefined, _) | (_, Status::Undefined) => Status::Undefined,
        (Status::Succeed, Status::Succeed) => Status::Succeed,
        _ => Status::Fail,
    })
}

/// Disjunction: pointwise union.
pub fn e_or(e1: &Execution, e2: &Execution) -> Result<Execution, ExecError> {
    zip_with(e1, e2, |a, b| match (a, b) {
        (Status::Undefined, _) | (_, Status::Undefined) => Status::Undefined,
        (Status::Fail, Status::Fail) => Status::Fail,
        _ => Status::Succeed,
    })
}

/// Sequential conjunction: function composition.  A failing first operand
/// short-circuits: the result is a defined failure regardless of the second.
pub fn e_seq(e1: &Execution, e2: &Execution) -> Result<Execution, ExecError> {
    zip_with(e1, e2, |a, b| match (a, b) {
        (Status::Undefined, _) => Status::Undefined,
        (Status::Fail, _) => Status::Fail,
        (Status::Succeed, b) => b,
    })
}

fn quant_combine(statuses: &[Status], forall: bool) -> Status {
    if statuses.contains(&Status::Undefined) {
        return Status::Undefined;
    }
    let holds = if forall {
        statuses.iter().all(|&s| s == Status::Succeed)
    } else {
        statuses.iter().any(|&s| s == Status::Succeed)
    };
    if holds {
        Status::Succeed
    } else {
        Status::Fail
    }
}

/// Existential quantification over `v`, which must be an axis of `e`'s
/// space.  The result is over the space without `v`: per remaining binding,
/// undefined if any instance of `v` is undefined, succeeding if some
/// instance succeeds.
pub fn e_exists(u: &Universe, e: &Execution, v: VarId) -> Result<Execution, ExecError> {
    e_quant(u, e, v, false)
}

/// Universal quantification over `v`: succeeds where every instance does.
pub fn e_forall(u: &Universe, e: &Execution, v: VarId) -> Result<Execution, ExecError> {
    e_quant(u, e, v, true)
}

fn e_quant(u: &Universe, e: &Execution, v: VarId, forall: bool) -> Result<Execution, ExecError> {
    let axis = e
        .space
        .pos(v)
        .ok_or(UniverseError::UnknownVar(u.var_name(v).to_string()))?;
    let stride = e.space.stride_of(v).expect("axis exists");
    let dim = e.space.dims[axis];
    let target = Space::over(u, e.space.vars.iter().copied().filter(|&w| w != v))?;
    let mut status = Vec::with_capacity(target.size);
    let mut tpos = Vec::new();
    let mut fiber = Vec::with_capacity(dim);
    for tidx in 0..target.size {
        target.decode(tidx, &mut tpos);
        // Rebuild the source index with v's axis at position 0 of its fiber.
        let mut base = 0usize;
        let mut ti = 0;
        for (i, &w) in e.space.vars.iter().enumerate() {
            if w == v {
                continue;
            }
            base += tpos[ti] * e.space.stride_of(w).expect("axis exists");
            let _ = i;
            ti += 1;
        }
        fiber.clear();
        for k in 0..dim {
            fiber.push(e.status[base + k * stride]);
        }
        status.push(quant_combine(&fiber, forall));
    }
    Ok(Execution {
        space: target,
        status,
    })
}

/// Replicate an execution over a larger space.  Every axis of `e`'s space
/// must be an axis of `target`; statuses are constant along the new axes.
pub fn broadcast(e: &Execution, target: &Space) -> Result<Execution, ExecError> {
    if e.space == *target {
        return Ok(e.clone());
    }
    // Map each source axis to its stride contribution from target positions.
    let mut pairs = Vec::with_capacity(e.space.vars.len());
    for &v in &e.space.vars {
        let tpos = target.pos(v).ok_or(ExecError::UniverseMismatch)?;
        let sstride = e.space.stride_of(v).expect("axis exists");
        pairs.push((tpos, sstride));
    }
    let mut status = Vec::with_capacity(target.size);
    let mut tposbuf = Vec::new();
    for tidx in 0..target.size {
        target.decode(tidx, &mut tposbuf);
        let sidx: usize = pairs.iter().map(|&(tp, ss)| tposbuf[tp] * ss).sum();
        status.push(e.status[sidx]);
    }
    Ok(Execution {
        space: target.clone(),
        status,
    })
}

/// Refinement: `e1 ⊑ e2` iff at every binding `e1` is undefined or agrees
/// with `e2`.
pub fn refines(e1: &Execution, e2: &Execution) -> Result<bool, ExecError> {
    e1.same_space(e2)?;
    Ok(e1
        .status
        .iter()
        .zip(&e2.status)
        .all(|(&a, &b)| a == Status::Undefined || a == b))
}

/// Greatest lower bound: the common status where both agree, undefined
/// elsewhere.
pub fn meet(e1: &Execution, e2: &Execution) -> Result<Execution, ExecError> {
    zip_with(e1, e2, |a, b| if a == b { a } else { Status::Undefined })
}

/// The outcome of a join: joins are partial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JoinResult {
    Joined(Execution),
    /// Some binding fails in one operand and succeeds in the other.
    Incompatible { binding: usize },
}

/// Least upper bound, when it exists: the more-defined status per binding.
pub fn join(e1: &Execution, e2: &Execution) -> Result<JoinResult, ExecError> {
    e1.same_space(e2)?;
    let mut status = Vec::with_capacity(e1.status.len());
    for (i, (&a, &b)) in e1.status.iter().zip(&e2.status).enumerate() {
        let s = match (a, b) {
            (Status::Undefined, x) | (x, Status::Undefined) => x,
            (x, y) if x == y => x,
            _ => return Ok(JoinResult::Incompatible { binding: i }),
        };
        status.push(s);
    }
    Ok(JoinResult::Joined(Execution {
        space: e1.space.clone(),
        status,
    }))
}

/// A refinement chain.  The last element repeats forever.
#[derive(Debug, Clone)]
pub struct ExecChain {
    pub elems: Vec<Execution>,
}

impl ExecChain {
    pub fn new(elems: Vec<Execution>) -> Result<ExecChain, ExecError> {
        assert!(!elems.is_empty(), "a chain has at least one element");
        for i in 0..elems.len() - 1 {
            if !refines(&elems[i], &elems[i + 1])? {
                return Err(ExecError::NotAChain(i));
            }
        }
        Ok(ExecChain { elems })
    }
}

/// Least upper bound of a chain: per binding, the first defined status.
pub fn chain_join(ch: &ExecChain) -> Execution {
    let space = ch.elems[0].space.clone();
    let mut status = vec![Status::Undefined; space.size];
    for (i, st) in status.iter_mut().enumerate() {
        for e in &ch.elems {
            if e.status[i] != Status::Undefined {
                *st = e.status[i];
                break;
            }
        }
    }
    Execution { space, status }
}

/// Direct set-of-pairs transcription of an execution, usable only over tiny
/// spaces.  States are bitmasks over the space's binding enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveExecution {
    pub n_bindings: usize,
    /// Sorted (state, image) pairs.
    pub pairs: Vec<(u64, u64)>,
}

impl NaiveExecution {
    pub fn apply(&self, s: u64) -> Option<u64> {
        self.pairs
            .iter()
            .find(|(dom, _)| *dom == s)
            .map(|&(_, img)| img)
    }

    /// Check the healthiness properties explicitly, returning the index of
    /// the first violated one.
    pub fn check_healthy(&self) -> Result<(), ExecError> {
        // Functionality of the pair set.
        for w in self.pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(ExecError::NotHealthy(1));
            }
        }
        // Property 2: e(s) ⊆ s.
        for &(s, img) in &self.pairs {
            if img & !s != 0 {
                return Err(ExecError::NotHealthy(2));
            }
        }
        // Property 1: dom e = ℙ{b | {b} ∈ dom e}.
        let mut singleton_dom: u64 = 0;
        for b in 0..self.n_bindings {
            if self.apply(1 << b).is_some() {
                singleton_dom |= 1 << b;
            }
        }
        let expected: usize = 1usize << singleton_dom.count_ones();
        if self.pairs.len() != expected {
            return Err(ExecError::NotHealthy(1));
        }
        for &(s, _) in &self.pairs {
            if s & !singleton_dom != 0 {
                return Err(ExecError::NotHealthy(1));
            }
        }
        // Property 3: e(s) = {b ∈ s | e({b}) = {b}}.
        for &(s, img) in &self.pairs {
            let mut want: u64 = 0;
            for b in 0..self.n_bindings {
                if s & (1 << b) != 0 && self.apply(1 << b) == Some(1 << b) {
                    want |= 1 << b;
                }
            }
            if img != want {
                return Err(ExecError::NotHealthy(3));
            }
        }
        Ok(())
    }
}

/// Expand an execution into the naive representation.
pub fn to_naive(e: &Execution) -> Result<NaiveExecution, ExecError> {
    let n = e.space.size;
    if n > 20 {
        return Err(ExecError::TooLarge(n));
    }
    let mut defined: u64 = 0;
    let mut succeed: u64 = 0;
    for (i, &st) in e.status.iter().enumerate() {
        if st != Status::Undefined {
            defined |= 1 << i;
        }
        if st == Status::Succeed {
            succeed |= 1 << i;
        }
    }
    // Enumerate every subset of the defined bindings.
    let mut pairs = Vec::new();
    let mut sub = defined;
    loop {
        pairs.push((sub, sub & succeed));
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & defined;
    }
    pairs.sort_unstable();
    Ok(NaiveExecution {
        n_bindings: n,
        pairs,
    })
}

/// Read statuses off singleton states, after checking healthiness.
pub fn from_naive(n: &NaiveExecution, space: &Space) -> Result<Execution, ExecError> {
    assert_eq!(n.n_bindings, space.size);
    n.check_healthy()?;
    let mut status = Vec::with_capacity(n.n_bindings);
    for b in 0..n.n_bindings {
        let st = match n.apply(1 << b) {
            None => Status::Undefined,
            Some(img) if img == 1 << b => Status::Succeed,
            Some(_) => Status::Fail,
        };
        status.push(st);
    }
    Ok(Execution {
        space: space.clone(),
        status,
    })
}
