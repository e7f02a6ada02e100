//! The refinement-law catalogue: rewrite rules over command and predicate
//! metavariables, obligation discharge, law application at a focus, and the
//! meta-verifier that hunts for counterexamples over enumerated commands.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec::Status;
use crate::semantics::{cexec_in, check_wellfounded, Env, SemError, VariantRelation};
use crate::syntax::ast::{Command, ParamValue, Pred, Term};
use crate::syntax::{
    free_vars_command, free_vars_pred, pretty_command, pretty_pred, var_free_in,
};
use crate::universe::{BindCtx, PredValue, Space, Universe, VarId};

// ---------------------------------------------------------------------------
// Patterns

/// A predicate pattern: a metavariable or a connective over sub-patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredPat {
    Meta(&'static str),
    And(Box<PredPat>, Box<PredPat>),
    Or(Box<PredPat>, Box<PredPat>),
    Exists(&'static str, Box<PredPat>),
    Forall(&'static str, Box<PredPat>),
}

/// A command pattern over command, predicate and variable metavariables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CmdPat {
    Meta(&'static str),
    Spec(PredPat),
    Assert(PredPat),
    POr(Box<CmdPat>, Box<CmdPat>),
    PAnd(Box<CmdPat>, Box<CmdPat>),
    SAnd(Box<CmdPat>, Box<CmdPat>),
    Exists(&'static str, Box<CmdPat>),
    Forall(&'static str, Box<CmdPat>),
}

// Short constructors, used heavily by the catalogue below.
fn cm(n: &'static str) -> CmdPat {
    CmdPat::Meta(n)
}
fn spec(p: PredPat) -> CmdPat {
    CmdPat::Spec(p)
}
fn assert(p: PredPat) -> CmdPat {
    CmdPat::Assert(p)
}
fn por(a: CmdPat, b: CmdPat) -> CmdPat {
    CmdPat::POr(Box::new(a), Box::new(b))
}
fn pand(a: CmdPat, b: CmdPat) -> CmdPat {
    CmdPat::PAnd(Box::new(a), Box::new(b))
}
fn sand(a: CmdPat, b: CmdPat) -> CmdPat {
    CmdPat::SAnd(Box::new(a), Box::new(b))
}
fn cex(x: &'static str, c: CmdPat) -> CmdPat {
    CmdPat::Exists(x, Box::new(c))
}
fn cfa(x: &'static str, c: CmdPat) -> CmdPat {
    CmdPat::Forall(x, Box::new(c))
}
fn pm(n: &'static str) -> PredPat {
    PredPat::Meta(n)
}
fn p_and(a: PredPat, b: PredPat) -> PredPat {
    PredPat::And(Box::new(a), Box::new(b))
}
fn p_or(a: PredPat, b: PredPat) -> PredPat {
    PredPat::Or(Box::new(a), Box::new(b))
}
fn p_ex(x: &'static str, p: PredPat) -> PredPat {
    PredPat::Exists(x, Box::new(p))
}
fn p_fa(x: &'static str, p: PredPat) -> PredPat {
    PredPat::Forall(x, Box::new(p))
}

/// Bindings for the metavariables of a law.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetaBind {
    pub cmds: BTreeMap<String, Command>,
    pub preds: BTreeMap<String, Pred>,
    pub vars: BTreeMap<String, String>,
}

impl MetaBind {
    fn bind_cmd(&mut self, name: &str, c: &Command) -> bool {
        match self.cmds.get(name) {
            Some(prev) => prev == c,
            None => {
                self.cmds.insert(name.to_string(), c.clone());
                true
            }
        }
    }

    fn bind_pred(&mut self, name: &str, p: &Pred) -> bool {
        match self.preds.get(name) {
            Some(prev) => prev == p,
            None => {
                self.preds.insert(name.to_string(), p.clone());
                true
            }
        }
    }

    fn bind_var(&mut self, name: &str, v: &str) -> bool {
        match self.vars.get(name) {
            Some(prev) => prev == v,
            None => {
                self.vars.insert(name.to_string(), v.to_string());
                true
            }
        }
    }
}

fn match_pred(pat: &PredPat, p: &Pred, bind: &mut MetaBind) -> bool {
    match (pat, p) {
        (PredPat::Meta(n), _) => bind.bind_pred(n, p),
        (PredPat::And(a, b), Pred::And(x, y)) => {
            match_pred(a, x, bind) && match_pred(b, y, bind)
        }
        (PredPat::Or(a, b), Pred::Or(x, y)) => match_pred(a, x, bind) && match_pred(b, y, bind),
        (PredPat::Exists(xm, a), Pred::Exists(v, q)) => {
            bind.bind_var(xm, v) && match_pred(a, q, bind)
        }
        (PredPat::Forall(xm, a), Pred::Forall(v, q)) => {
            bind.bind_var(xm, v) && match_pred(a, q, bind)
        }
        _ => false,
    }
}

fn match_cmd(pat: &CmdPat, c: &Command, bind: &mut MetaBind) -> bool {
    match (pat, c) {
        (CmdPat::Meta(n), _) => bind.bind_cmd(n, c),
        (CmdPat::Spec(p), Command::Spec(q)) => match_pred(p, q, bind),
        (CmdPat::Assert(p), Command::Assert(q)) => match_pred(p, q, bind),
        (CmdPat::POr(a, b), Command::POr(x, y)) => {
            match_cmd(a, x, bind) && match_cmd(b, y, bind)
        }
        (CmdPat::PAnd(a, b), Command::PAnd(x, y)) => {
            match_cmd(a, x, bind) && match_cmd(b, y, bind)
        }
        (CmdPat::SAnd(a, b), Command::SAnd(x, y)) => {
            match_cmd(a, x, bind) && match_cmd(b, y, bind)
        }
        (CmdPat::Exists(xm, a), Command::Exists(v, d)) => {
            bind.bind_var(xm, v) && match_cmd(a, d, bind)
        }
        (CmdPat::Forall(xm, a), Command::Forall(v, d)) => {
            bind.bind_var(xm, v) && match_cmd(a, d, bind)
        }
        _ => false,
    }
}

fn instantiate_pred(pat: &PredPat, bind: &MetaBind) -> Result<Pred, LawsError> {
    match pat {
        PredPat::Meta(n) => bind
            .preds
            .get(*n)
            .cloned()
            .ok_or_else(|| LawsError::AmbiguousMatch(format!("predicate {} unbound", n))),
        PredPat::And(a, b) => Ok(Pred::and(
            instantiate_pred(a, bind)?,
            instantiate_pred(b, bind)?,
        )),
        PredPat::Or(a, b) => Ok(Pred::or(
            instantiate_pred(a, bind)?,
            instantiate_pred(b, bind)?,
        )),
        PredPat::Exists(xm, a) => {
            let v = meta_var(bind, xm)?;
            Ok(Pred::Exists(v, Box::new(instantiate_pred(a, bind)?)))
        }
        PredPat::Forall(xm, a) => {
            let v = meta_var(bind, xm)?;
            Ok(Pred::Forall(v, Box::new(instantiate_pred(a, bind)?)))
        }
    }
}

fn meta_var(bind: &MetaBind, xm: &str) -> Result<String, LawsError> {
    bind.vars
        .get(xm)
        .cloned()
        .ok_or_else(|| LawsError::AmbiguousMatch(format!("variable {} unbound", xm)))
}

fn instantiate_cmd(pat: &CmdPat, bind: &MetaBind) -> Result<Command, LawsError> {
    match pat {
        CmdPat::Meta(n) => bind
            .cmds
            .get(*n)
            .cloned()
            .ok_or_else(|| LawsError::AmbiguousMatch(format!("command {} unbound", n))),
        CmdPat::Spec(p) => Ok(Command::Spec(instantiate_pred(p, bind)?)),
        CmdPat::Assert(p) => Ok(Command::Assert(instantiate_pred(p, bind)?)),
        CmdPat::POr(a, b) => Ok(Command::por(
            instantiate_cmd(a, bind)?,
            instantiate_cmd(b, bind)?,
        )),
        CmdPat::PAnd(a, b) => Ok(Command::pand(
            instantiate_cmd(a, bind)?,
            instantiate_cmd(b, bind)?,
        )),
        CmdPat::SAnd(a, b) => Ok(Command::sand(
            instantiate_cmd(a, bind)?,
            instantiate_cmd(b, bind)?,
        )),
        CmdPat::Exists(xm, a) => Ok(Command::Exists(
            meta_var(bind, xm)?,
            Box::new(instantiate_cmd(a, bind)?),
        )),
        CmdPat::Forall(xm, a) => Ok(Command::Forall(
            meta_var(bind, xm)?,
            Box::new(instantiate_cmd(a, bind)?),
        )),
    }
}

// ---------------------------------------------------------------------------
// Obligations

/// How an obligation template builds a predicate from bound metavariables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredForm {
    Meta(&'static str),
    /// `P <=> Q` for the named predicate metas.
    Iff(&'static str, &'static str),
    /// `P \/ Q`.
    Or(&'static str, &'static str),
    /// `def(P) <=> def(Q)`: the two predicates are defined at the same
    /// bindings.
    DefIff(&'static str, &'static str),
}

impl PredForm {
    fn build(&self, bind: &MetaBind) -> Result<Pred, LawsError> {
        let get = |n: &str| {
            bind.preds
                .get(n)
                .cloned()
                .ok_or_else(|| LawsError::AmbiguousMatch(format!("predicate {} unbound", n)))
        };
        Ok(match self {
            PredForm::Meta(n) => get(n)?,
            PredForm::Iff(p, q) => Pred::Iff(Box::new(get(p)?), Box::new(get(q)?)),
            PredForm::Or(p, q) => Pred::or(get(p)?, get(q)?),
            PredForm::DefIff(p, q) => Pred::Iff(
                Box::new(Pred::Def(Box::new(get(p)?))),
                Box::new(Pred::Def(Box::new(get(q)?))),
            ),
        })
    }
}

/// An uninstantiated proof obligation: in context Γ, the conjunction of
/// `hyps` entails `concl`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObligationTemplate {
    pub hyps: Vec<PredForm>,
    pub concl: PredForm,
}

/// An instantiated, dischargeable obligation.
#[derive(Debug, Clone, PartialEq)]
pub enum Obligation {
    /// At every binding where all of `context` and `hyp` are true, `concl`
    /// must be true.
    Entails {
        context: Vec<Pred>,
        hyp: Pred,
        concl: Pred,
    },
    /// `p` and `q` agree (defined and equal) wherever `context` holds.
    Equiv {
        context: Vec<Pred>,
        p: Pred,
        q: Pred,
    },
    /// The variant relation is acyclic over the formal space.
    WellFounded { rel: VariantRelation, space: Space },
    /// `before` is refined by `after` at every context-true binding.
    SemanticRefines {
        before: Command,
        after: Command,
        context: Vec<Pred>,
    },
}

/// Decide an obligation by finite enumeration over the universe.
pub fn discharge(ob: &Obligation, u: &Universe) -> Result<bool, SemError> {
    match ob {
        Obligation::Entails {
            context,
            hyp,
            concl,
        } => Ok(u.entails_hyp(context, hyp, concl)?),
        Obligation::Equiv { context, p, q } => {
            let iff = Pred::Iff(Box::new(p.clone()), Box::new(q.clone()));
            Ok(u.entails_hyp(context, &Pred::True, &iff)?)
        }
        Obligation::WellFounded { rel, space } => check_wellfounded(u, rel, space),
        Obligation::SemanticRefines {
            before,
            after,
            context,
        } => pointwise_refines(u, &Env::new(), before, after, context),
    }
}

/// Pointwise refinement in context: at every binding where all predicates of
/// `ctx` are true, `c1`'s status is undefined or equal to `c2`'s.
pub fn pointwise_refines(
    u: &Universe,
    env: &Env,
    c1: &Command,
    c2: &Command,
    ctx: &[Pred],
) -> Result<bool, SemError> {
    let space = joint_space(u, &[c1, c2], ctx)?;
    let e1 = cexec_in(u, env, c1, &space)?;
    let e2 = cexec_in(u, env, c2, &space)?;
    let mut vals = Vec::new();
    for idx in 0..space.size {
        space.decode_vals(u, idx, &mut vals);
        let mut b = BindCtx::new(&space, &vals);
        if ctx
            .iter()
            .all(|p| u.eval_pred(p, &mut b) == PredValue::True)
        {
            match (e1.status[idx], e2.status[idx]) {
                (Status::Undefined, _) => {}
                (a, b2) if a == b2 => {}
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

fn joint_space(u: &Universe, cmds: &[&Command], ctx: &[Pred]) -> Result<Space, SemError> {
    let mut vids: BTreeSet<VarId> = BTreeSet::new();
    for c in cmds {
        for name in free_vars_command(c) {
            vids.insert(u.var_id(&name)?);
        }
    }
    for p in ctx {
        for name in free_vars_pred(p) {
            vids.insert(u.var_id(&name)?);
        }
    }
    Ok(Space::over(u, vids)?)
}

// ---------------------------------------------------------------------------
// Laws

/// A syntactic side condition on a law instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideCond {
    /// The variable bound to the first meta must not occur free in the
    /// command bound to the second.
    NotFree(&'static str, &'static str),
}

/// A refinement (or equivalence) premise between two command metavariables,
/// optionally pointwise under an extra context predicate metavariable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Premise {
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub equivalence: bool,
    pub under: Option<&'static str>,
}

/// One law of the catalogue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Law {
    pub id: &'static str,
    /// `true` for `≈` laws, `false` for `⊑` laws.
    pub equivalence: bool,
    pub lhs: CmdPat,
    pub rhs: CmdPat,
    pub premises: Vec<Premise>,
    pub obligations: Vec<ObligationTemplate>,
    pub side_conditions: Vec<SideCond>,
    /// The claim is pointwise under the ambient context Γ rather than plain.
    pub uses_ctx: bool,
    /// Implemented as a built-in derivation procedure rather than a rewrite.
    pub builtin: bool,
}

impl Law {
    fn eqv(id: &'static str, lhs: CmdPat, rhs: CmdPat) -> Law {
        Law {
            id,
            equivalence: true,
            lhs,
            rhs,
            premises: Vec::new(),
            obligations: Vec::new(),
            side_conditions: Vec::new(),
            uses_ctx: false,
            builtin: false,
        }
    }

    fn refsto(id: &'static str, lhs: CmdPat, rhs: CmdPat) -> Law {
        Law {
            equivalence: false,
            ..Law::eqv(id, lhs, rhs)
        }
    }

    fn oblig(mut self, hyps: Vec<PredForm>, concl: PredForm) -> Law {
        self.obligations.push(ObligationTemplate { hyps, concl });
        self
    }

    fn premise(mut self, lhs: &'static str, rhs: &'static str, equivalence: bool) -> Law {
        self.premises.push(Premise {
            lhs,
            rhs,
            equivalence,
            under: None,
        });
        self
    }

    fn premise_under(mut self, lhs: &'static str, rhs: &'static str, under: &'static str) -> Law {
        self.premises.push(Premise {
            lhs,
            rhs,
            equivalence: false,
            under: Some(under),
        });
        self
    }

    fn side(mut self, sc: SideCond) -> Law {
        self.side_conditions.push(sc);
        self
    }

    fn in_ctx(mut self) -> Law {
        self.uses_ctx = true;
        self
    }

    fn builtin(id: &'static str) -> Law {
        Law {
            builtin: true,
            ..Law::refsto(id, cm("c1"), cm("c1"))
        }
    }

    /// The converse claim: right-hand side refines (or is equivalent to) the
    /// left.  Used by the meta-verifier's mutation self-test.
    pub fn reversed(&self) -> Law {
        let mut rev = self.clone();
        std::mem::swap(&mut rev.lhs, &mut rev.rhs);
        rev
    }
}

/// The full law catalogue.
pub fn catalogue() -> Vec<Law> {
    use PredForm as F;
    vec![
        // -- Algebraic ------------------------------------------------------
        Law::eqv("pandcommute", pand(cm("c1"), cm("c2")), pand(cm("c2"), cm("c1"))),
        Law::eqv(
            "pandassoc",
            pand(cm("c1"), pand(cm("c2"), cm("c3"))),
            pand(pand(cm("c1"), cm("c2")), cm("c3")),
        ),
        Law::eqv("pandidempotent", pand(cm("c1"), cm("c1")), cm("c1")),
        Law::eqv("porcommute", por(cm("c1"), cm("c2")), por(cm("c2"), cm("c1"))),
        Law::eqv(
            "porassoc",
            por(cm("c1"), por(cm("c2"), cm("c3"))),
            por(por(cm("c1"), cm("c2")), cm("c3")),
        ),
        Law::eqv("poridempotent", por(cm("c1"), cm("c1")), cm("c1")),
        Law::eqv(
            "sandassoc",
            sand(cm("c1"), sand(cm("c2"), cm("c3"))),
            sand(sand(cm("c1"), cm("c2")), cm("c3")),
        ),
        Law::eqv("sandidempotent", sand(cm("c1"), cm("c1")), cm("c1")),
        Law::eqv(
            "panddistrib",
            pand(cm("c1"), por(cm("c2"), cm("c3"))),
            por(pand(cm("c1"), cm("c2")), pand(cm("c1"), cm("c3"))),
        ),
        Law::eqv(
            "pordistrib",
            por(cm("c1"), pand(cm("c2"), cm("c3"))),
            pand(por(cm("c1"), cm("c2")), por(cm("c1"), cm("c3"))),
        ),
        Law::eqv(
            "leftsandoverpor",
            sand(cm("c1"), por(cm("c2"), cm("c3"))),
            por(sand(cm("c1"), cm("c2")), sand(cm("c1"), cm("c3"))),
        ),
        Law::eqv(
            "leftsandoverpand",
            sand(cm("c1"), pand(cm("c2"), cm("c3"))),
            pand(sand(cm("c1"), cm("c2")), sand(cm("c1"), cm("c3"))),
        ),
        Law::refsto(
            "pandoversand",
            pand(cm("c1"), sand(cm("c2"), cm("c3"))),
            sand(pand(cm("c1"), cm("c2")), cm("c3")),
        ),
        Law::eqv(
            "rightsandoverpor",
            sand(por(cm("c1"), cm("c2")), cm("c3")),
            por(sand(cm("c1"), cm("c3")), sand(cm("c2"), cm("c3"))),
        ),
        Law::eqv(
            "foralldistrib",
            cfa("X", pand(cm("c1"), cm("c2"))),
            pand(cfa("X", cm("c1")), cfa("X", cm("c2"))),
        ),
        Law::eqv(
            "existsdistrib",
            cex("X", por(cm("c1"), cm("c2"))),
            por(cex("X", cm("c1")), cex("X", cm("c2"))),
        ),
        Law::refsto("pandtosand", pand(cm("c1"), cm("c2")), sand(cm("c1"), cm("c2"))),
        Law::eqv(
            "extendscopeexistsoverpand",
            pand(cex("X", cm("c1")), cm("c2")),
            cex("X", pand(cm("c1"), cm("c2"))),
        )
        .side(SideCond::NotFree("X", "c2")),
        // -- The refinement relation ----------------------------------------
        Law::refsto("refstoreflex", cm("c1"), cm("c1")),
        Law::eqv("refeqreflex", cm("c1"), cm("c1")),
        Law::refsto("refstotrans", cm("c1"), cm("c3"))
            .premise("c1", "c2", false)
            .premise("c2", "c3", false),
        Law::eqv("refeqtrans", cm("c1"), cm("c3"))
            .premise("c1", "c2", true)
            .premise("c2", "c3", true),
        Law::eqv("refeqsymm", cm("c2"), cm("c1")).premise("c1", "c2", true),
        Law::eqv("refstoantisymm", cm("c1"), cm("c2"))
            .premise("c1", "c2", false)
            .premise("c2", "c1", false),
        Law::refsto("refeqstrongerrefsto", cm("c1"), cm("c2")).premise("c1", "c2", true),
        // -- Monotonicity -----------------------------------------------------
        Law::refsto("pandmono", pand(cm("c1"), cm("c3")), pand(cm("c2"), cm("c4")))
            .premise("c1", "c2", false)
            .premise("c3", "c4", false),
        Law::refsto("pormono", por(cm("c1"), cm("c3")), por(cm("c2"), cm("c4")))
            .premise("c1", "c2", false)
            .premise("c3", "c4", false),
        Law::refsto("sandmono", sand(cm("c1"), cm("c3")), sand(cm("c2"), cm("c4")))
            .premise("c1", "c2", false)
            .premise("c3", "c4", false),
        Law::refsto("existsmono", cex("X", cm("c1")), cex("X", cm("c2")))
            .premise("c1", "c2", false),
        Law::refsto("forallmono", cfa("X", cm("c1")), cfa("X", cm("c2")))
            .premise("c1", "c2", false),
        // -- Predicate lifting -------------------------------------------------
        Law::eqv(
            "liftpand",
            pand(spec(pm("P")), spec(pm("Q"))),
            spec(p_and(pm("P"), pm("Q"))),
        ),
        Law::eqv(
            "liftpor",
            por(spec(pm("P")), spec(pm("Q"))),
            spec(p_or(pm("P"), pm("Q"))),
        ),
        Law::eqv("liftexists", cex("X", spec(pm("P"))), spec(p_ex("X", pm("P")))),
        Law::eqv("liftforall", cfa("X", spec(pm("P"))), spec(p_fa("X", pm("P")))),
        // -- Specifications and assumptions -----------------------------------
        Law::refsto("weakenassumpt", assert(pm("A")), assert(pm("B")))
            .oblig(vec![F::Meta("A")], F::Meta("B")),
        Law::refsto("removeassumpt", sand(assert(pm("A")), cm("c1")), cm("c1")),
        Law::eqv(
            "combineassumpt",
            sand(assert(pm("A")), assert(pm("B"))),
            assert(p_and(pm("A"), pm("B"))),
        ),
        Law::eqv(
            "establishassumpt",
            spec(pm("P")),
            sand(spec(pm("P")), assert(pm("P"))),
        ),
        Law::eqv("equivspec", spec(pm("P")), spec(pm("Q")))
            .oblig(vec![], F::Iff("P", "Q")),
        Law::eqv(
            "assumptafterspec",
            spec(pm("P")),
            sand(spec(pm("P")), assert(pm("A"))),
        )
        .oblig(vec![F::Meta("P")], F::Meta("A")),
        // -- Context ----------------------------------------------------------
        Law::eqv("introduceassumpt", cm("c1"), sand(assert(pm("A")), cm("c1")))
            .oblig(vec![], F::Meta("A"))
            .in_ctx(),
        Law::eqv("introducespec", cm("c1"), pand(spec(pm("B")), cm("c1")))
            .oblig(vec![], F::Meta("B"))
            .in_ctx(),
        Law::refsto(
            "assumptincontext",
            sand(assert(pm("A")), cm("c1")),
            sand(assert(pm("A")), cm("c2")),
        )
        .premise_under("c1", "c2", "A")
        .in_ctx(),
        Law::refsto(
            "specincontext",
            sand(spec(pm("A")), cm("c1")),
            sand(spec(pm("A")), cm("c2")),
        )
        .premise_under("c1", "c2", "A")
        .in_ctx(),
        Law::eqv(
            "equivunderassumpt",
            sand(assert(pm("A")), spec(pm("P"))),
            sand(assert(pm("A")), spec(pm("Q"))),
        )
        .oblig(vec![F::Meta("A")], F::Iff("P", "Q"))
        .in_ctx(),
        Law::eqv(
            "useparallelspec",
            pand(spec(pm("I")), spec(pm("P"))),
            pand(spec(pm("I")), spec(pm("Q"))),
        )
        .oblig(vec![F::Meta("I")], F::Iff("P", "Q"))
        .oblig(vec![], F::DefIff("P", "Q"))
        .in_ctx(),
        Law::refsto(
            "caseanalysis",
            cm("c1"),
            por(sand(spec(pm("P")), cm("c1")), sand(spec(pm("Q")), cm("c1"))),
        )
        .oblig(vec![], F::Or("P", "Q"))
        .in_ctx(),
        // -- Built-in procedural laws ------------------------------------------
        Law::builtin("recursionintro"),
        Law::builtin("propertyoverlist"),
        Law::builtin("propertyoverlistindexed"),
    ]
}

/// Find a law by identifier.
pub fn lookup(id: &str) -> Result<Law, LawsError> {
    catalogue()
        .into_iter()
        .find(|l| l.id == id)
        .ok_or_else(|| LawsError::UnknownLaw(id.to_string()))
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LawsError {
    #[error("unknown law: {0}")]
    UnknownLaw(String),
    #[error("pattern mismatch: {0}")]
    MatchFailure(String),
    #[error("side condition failed: {0}")]
    SideConditionFailure(String),
    #[error("ambiguous match: {0}")]
    AmbiguousMatch(String),
    #[error(transparent)]
    Sem(#[from] SemError),
}

// ---------------------------------------------------------------------------
// Law application at a focus

/// The subcommand at `path`, where child 0/1 of a binary node are its left
/// and right operand and child 0 of a quantifier is its body.
pub fn subcommand_at<'a>(c: &'a Command, path: &[usize]) -> Result<&'a Command, LawsError> {
    let mut cur = c;
    for &step in path {
        cur = match (cur, step) {
            (Command::POr(l, _), 0) | (Command::PAnd(l, _), 0) | (Command::SAnd(l, _), 0) => l,
            (Command::POr(_, r), 1) | (Command::PAnd(_, r), 1) | (Command::SAnd(_, r), 1) => r,
            (Command::Exists(_, b), 0) | (Command::Forall(_, b), 0) => b,
            _ => {
                return Err(LawsError::MatchFailure(format!(
                    "path step {} does not address a subcommand of {}",
                    step,
                    pretty_command(cur)
                )))
            }
        };
    }
    Ok(cur)
}

fn replace_at(c: &Command, path: &[usize], new: Command) -> Result<Command, LawsError> {
    if path.is_empty() {
        return Ok(new);
    }
    let (step, rest) = (path[0], &path[1..]);
    let recur = |child: &Command| replace_at(child, rest, new.clone());
    Ok(match (c, step) {
        (Command::POr(l, r), 0) => Command::por(recur(l)?, (**r).clone()),
        (Command::POr(l, r), 1) => Command::por((**l).clone(), recur(r)?),
        (Command::PAnd(l, r), 0) => Command::pand(recur(l)?, (**r).clone()),
        (Command::PAnd(l, r), 1) => Command::pand((**l).clone(), recur(r)?),
        (Command::SAnd(l, r), 0) => Command::sand(recur(l)?, (**r).clone()),
        (Command::SAnd(l, r), 1) => Command::sand((**l).clone(), recur(r)?),
        (Command::Exists(v, b), 0) => Command::Exists(v.clone(), Box::new(recur(b)?)),
        (Command::Forall(v, b), 0) => Command::Forall(v.clone(), Box::new(recur(b)?)),
        _ => {
            return Err(LawsError::MatchFailure(format!(
                "path step {} does not address a subcommand of {}",
                step,
                pretty_command(c)
            )))
        }
    })
}

/// Predicates established by a left sibling of a sequential conjunction: the
/// specifications and assumptions of its flattened chain.  At any binding
/// where some element of the chain is not a succeeding spec or assumption,
/// the whole sequence is already failed or undefined, so assuming the
/// collected predicates there is harmless.
fn established_preds(c: &Command, out: &mut Vec<Pred>) {
    match c {
        Command::SAnd(l, r) => {
            established_preds(l, out);
            established_preds(r, out);
        }
        Command::Spec(p) | Command::Assert(p) => out.push(p.clone()),
        _ => {}
    }
}

/// The context at a focus: the ambient predicates plus those collected while
/// walking the path (assumptions and specifications sequentially to the left
/// of the focus).  Predicates mentioning a variable rebound by a quantifier
/// on the path are dropped when the quantifier is entered.
pub fn context_at(
    target: &Command,
    path: &[usize],
    outer: &[Pred],
) -> Result<Vec<Pred>, LawsError> {
    let mut ctx: Vec<Pred> = outer.to_vec();
    let mut cur = target;
    for &step in path {
        match (cur, step) {
            (Command::SAnd(l, r), 1) => {
                established_preds(l, &mut ctx);
                cur = r;
            }
            (Command::SAnd(l, _), 0) => cur = l,
            (Command::POr(l, _), 0) | (Command::PAnd(l, _), 0) => cur = l,
            (Command::POr(_, r), 1) | (Command::PAnd(_, r), 1) => cur = r,
            (Command::Exists(v, b), 0) | (Command::Forall(v, b), 0) => {
                ctx.retain(|p| !free_vars_pred(p).contains(v));
                cur = b;
            }
            _ => {
                return Err(LawsError::MatchFailure(format!(
                    "path step {} does not address a subcommand of {}",
                    step,
                    pretty_command(cur)
                )))
            }
        }
    }
    Ok(ctx)
}

fn params_to_bind(params: &BTreeMap<String, ParamValue>) -> MetaBind {
    let mut bind = MetaBind::default();
    for (k, v) in params {
        match v {
            ParamValue::Pred(p) => {
                bind.preds.insert(k.clone(), p.clone());
            }
            ParamValue::Cmd(c) => {
                bind.cmds.insert(k.clone(), c.clone());
            }
            ParamValue::Ident(name) => {
                bind.vars.insert(k.clone(), name.clone());
            }
            // Terms, variants and integers parametrise built-in derivation
            // steps, not rewrite laws.
            ParamValue::Terms(_) | ParamValue::Variant(_, _) | ParamValue::Int(_) => {}
        }
    }
    bind
}

fn cmd_pat_metas(pat: &CmdPat, cmds: &mut BTreeSet<&'static str>, preds: &mut BTreeSet<&'static str>, vars: &mut BTreeSet<&'static str>) {
    match pat {
        CmdPat::Meta(n) => {
            cmds.insert(n);
        }
        CmdPat::Spec(p) | CmdPat::Assert(p) => pred_pat_metas(p, preds, vars),
        CmdPat::POr(a, b) | CmdPat::PAnd(a, b) | CmdPat::SAnd(a, b) => {
            cmd_pat_metas(a, cmds, preds, vars);
            cmd_pat_metas(b, cmds, preds, vars);
        }
        CmdPat::Exists(x, a) | CmdPat::Forall(x, a) => {
            vars.insert(x);
            cmd_pat_metas(a, cmds, preds, vars);
        }
    }
}

fn pred_pat_metas(pat: &PredPat, preds: &mut BTreeSet<&'static str>, vars: &mut BTreeSet<&'static str>) {
    match pat {
        PredPat::Meta(n) => {
            preds.insert(n);
        }
        PredPat::And(a, b) | PredPat::Or(a, b) => {
            pred_pat_metas(a, preds, vars);
            pred_pat_metas(b, preds, vars);
        }
        PredPat::Exists(x, a) | PredPat::Forall(x, a) => {
            vars.insert(x);
            pred_pat_metas(a, preds, vars);
        }
    }
}

fn pred_form_metas(f: &PredForm, preds: &mut BTreeSet<&'static str>) {
    match f {
        PredForm::Meta(n) => {
            preds.insert(n);
        }
        PredForm::Iff(p, q) | PredForm::Or(p, q) | PredForm::DefIff(p, q) => {
            preds.insert(p);
            preds.insert(q);
        }
    }
}

/// All metavariables of a law, split by kind and sorted by name.
fn law_metas(law: &Law) -> (Vec<&'static str>, Vec<&'static str>, Vec<&'static str>) {
    let mut cmds = BTreeSet::new();
    let mut preds = BTreeSet::new();
    let mut vars = BTreeSet::new();
    cmd_pat_metas(&law.lhs, &mut cmds, &mut preds, &mut vars);
    cmd_pat_metas(&law.rhs, &mut cmds, &mut preds, &mut vars);
    for p in &law.premises {
        cmds.insert(p.lhs);
        cmds.insert(p.rhs);
        if let Some(a) = p.under {
            preds.insert(a);
        }
    }
    for ob in &law.obligations {
        for h in &ob.hyps {
            pred_form_metas(h, &mut preds);
        }
        pred_form_metas(&ob.concl, &mut preds);
    }
    (
        cmds.into_iter().collect(),
        preds.into_iter().collect(),
        vars.into_iter().collect(),
    )
}

/// Rewrite `target` at `focus` by `law`.  `params` supplies metavariable
/// bindings that the left-hand side does not force; `outer` is the ambient
/// context outside `target` (the context walk inside `target` is performed
/// here).  Returns the rewritten command and the instantiated obligations.
pub fn apply_law(
    law: &Law,
    target: &Command,
    focus: &[usize],
    params: &BTreeMap<String, ParamValue>,
    outer: &[Pred],
) -> Result<(Command, Vec<Obligation>), LawsError> {
    if law.builtin {
        return Err(LawsError::MatchFailure(format!(
            "{} is a built-in derivation step, not a rewrite law",
            law.id
        )));
    }
    if !law.premises.is_empty() {
        return Err(LawsError::MatchFailure(format!(
            "{} is a structural rule; it is applied implicitly by focusing",
            law.id
        )));
    }
    let focused = subcommand_at(target, focus)?;
    let ctx = context_at(target, focus, outer)?;
    let mut bind = params_to_bind(params);
    if !match_cmd(&law.lhs, focused, &mut bind) {
        return Err(LawsError::MatchFailure(format!(
            "{} does not match {}",
            law.id,
            pretty_command(focused)
        )));
    }
    // Every metavariable the rewrite or its obligations need must now be
    // bound; missing ones cannot be guessed.
    let (cmds, preds, vars) = law_metas(law);
    let mut missing = Vec::new();
    for n in cmds {
        if !bind.cmds.contains_key(n) {
            missing.push(n);
        }
    }
    for n in preds {
        if !bind.preds.contains_key(n) {
            missing.push(n);
        }
    }
    for n in vars {
        if !bind.vars.contains_key(n) {
            missing.push(n);
        }
    }
    if !missing.is_empty() {
        return Err(LawsError::AmbiguousMatch(format!(
            "{} leaves {} unbound; supply them as step parameters",
            law.id,
            missing.join(", ")
        )));
    }
    for sc in &law.side_conditions {
        let SideCond::NotFree(xm, cmeta) = sc;
        let v = meta_var(&bind, xm)?;
        let c = bind.cmds.get(*cmeta).expect("checked above");
        if var_free_in(&v, c) {
            return Err(LawsError::SideConditionFailure(format!(
                "{} requires {} not free in {}",
                law.id,
                v,
                pretty_command(c)
            )));
        }
    }
    let mut obligations = Vec::new();
    for tmpl in &law.obligations {
        let mut hyp = Pred::True;
        for (i, h) in tmpl.hyps.iter().enumerate() {
            let p = h.build(&bind)?;
            hyp = if i == 0 { p } else { Pred::and(hyp, p) };
        }
        obligations.push(Obligation::Entails {
            context: ctx.clone(),
            hyp,
            concl: tmpl.concl.build(&bind)?,
        });
    }
    let new_sub = instantiate_cmd(&law.rhs, &bind)?;
    let rewritten = replace_at(target, focus, new_sub)?;
    Ok((rewritten, obligations))
}

// ---------------------------------------------------------------------------
// The meta-verifier

/// Enumeration bounds for the meta-verifier.
#[derive(Debug, Clone)]
pub struct VerifyCfg {
    pub n_vars: usize,
    pub n_vals: i64,
    pub depth: usize,
    pub seed: u64,
    /// Instantiation spaces up to this size are enumerated exhaustively.
    pub exhaustive_limit: u128,
    /// Sample count above the exhaustive limit.
    pub samples: usize,
}

impl Default for VerifyCfg {
    fn default() -> VerifyCfg {
        VerifyCfg {
            n_vars: 3,
            n_vals: 2,
            depth: 2,
            seed: 0,
            exhaustive_limit: 1_000_000,
            samples: 100_000,
        }
    }
}

/// Generated instantiation material shared by all laws.
pub struct Pools {
    pub u: Universe,
    pub space: Space,
    pub cmds: Vec<Command>,
    pub execs: Vec<crate::exec::Execution>,
    pub preds: Vec<Pred>,
    /// Truth mask over the full space, per pool predicate.
    pub masks: Vec<Vec<bool>>,
    /// Indices into `preds` usable as ambient contexts Γ.
    pub ctxs: Vec<usize>,
    pub var_names: Vec<String>,
    /// Number of leaf commands at the front of `cmds` (used for shrinking).
    pub n_leaves: usize,
    /// Pool index pairs (i, j) with `cmds[i] ⊑ cmds[j]`.
    pub r_pairs: Vec<(usize, usize)>,
    /// Successor lists of the refinement relation.
    pub r_succ: Vec<Vec<usize>>,
    /// Pool index pairs with equivalent executions.
    pub e_pairs: Vec<(usize, usize)>,
}

/// Build the instantiation pools for a configuration.
pub fn build_pools(cfg: &VerifyCfg) -> Result<Pools, SemError> {
    use crate::syntax::ast::{CmpOp, DomainSpec, UniverseItem};
    let hi = (cfg.n_vals - 1).max(1);
    let mut items = vec![UniverseItem::ValuesInt(0, hi)];
    let mut var_names = Vec::new();
    for i in 0..cfg.n_vars.max(2) {
        let name = format!("V{}", i);
        items.push(UniverseItem::Var(
            name.clone(),
            DomainSpec::IntRange(0, cfg.n_vals - 1),
        ));
        var_names.push(name);
    }
    items.push(UniverseItem::FunBuiltin("div".into(), 2));
    let u = Universe::from_items(&items).map_err(SemError::Universe)?;
    let space = Space::full(&u).map_err(SemError::Universe)?;

    let v = |i: usize| Term::var(&var_names[i.min(var_names.len() - 1)]);
    let eq = |a: Term, b: Term| Pred::Compare(CmpOp::Eq, a, b);
    // Base predicates: comparisons over the declared variables, including a
    // partial one (division by a variable that can be zero).
    let mut base = vec![Pred::True, Pred::False];
    for i in 0..var_names.len().saturating_sub(1) {
        base.push(eq(v(i), v(i + 1)));
    }
    base.push(eq(v(0), Term::int(0)));
    base.push(eq(v(1), Term::Fun("div".into(), vec![Term::int(1), v(0)])));
    let ctxs: Vec<usize> = (0..base.len()).collect();
    // One connective level on top of the base comparisons.
    let mut preds = base.clone();
    preds.push(Pred::Not(Box::new(eq(v(0), Term::int(0)))));
    preds.push(Pred::or(eq(v(0), Term::int(0)), eq(v(0), v(1))));
    preds.push(Pred::and(eq(v(0), v(1)), eq(v(0), Term::int(0))));
    preds.push(Pred::Implies(
        Box::new(eq(v(0), Term::int(0))),
        Box::new(eq(v(0), v(1))),
    ));

    // Commands: specs and assumptions of the base predicates, then one level
    // of combinators over those leaves.
    let mut cmds: Vec<Command> = Vec::new();
    for p in &base {
        cmds.push(Command::Spec(p.clone()));
        cmds.push(Command::Assert(p.clone()));
    }
    let n_leaves = cmds.len();
    if cfg.depth >= 2 {
        // Operands for the top level: leaves at depth 2; at greater depths a
        // bounded slice of the depth-2 pool keeps the enumeration tractable.
        let mut operands: Vec<Command> = cmds.clone();
        for _ in 2..cfg.depth.min(3) {
            let mut level = Vec::new();
            for a in operands.iter().take(24) {
                for b in operands.iter().take(24) {
                    level.push(Command::pand(a.clone(), b.clone()));
                }
            }
            operands.extend(level.into_iter().take(24));
        }
        for a in &operands {
            for b in &operands {
                cmds.push(Command::pand(a.clone(), b.clone()));
                cmds.push(Command::por(a.clone(), b.clone()));
                cmds.push(Command::sand(a.clone(), b.clone()));
            }
        }
        for name in &var_names {
            for a in &operands {
                cmds.push(Command::Exists(name.clone(), Box::new(a.clone())));
                cmds.push(Command::Forall(name.clone(), Box::new(a.clone())));
            }
        }
    }

    let env = Env::new();
    let mut execs = Vec::with_capacity(cmds.len());
    for c in &cmds {
        execs.push(cexec_in(&u, &env, c, &space)?);
    }
    let mut masks = Vec::with_capacity(preds.len());
    let mut vals = Vec::new();
    for p in &preds {
        let mut mask = Vec::with_capacity(space.size);
        for idx in 0..space.size {
            space.decode_vals(&u, idx, &mut vals);
            let mut b = BindCtx::new(&space, &vals);
            mask.push(u.eval_pred(p, &mut b) == PredValue::True);
        }
        masks.push(mask);
    }

    let refines_at = |i: usize, j: usize| {
        execs[i]
            .status
            .iter()
            .zip(execs[j].status.iter())
            .all(|(&a, &b)| a == Status::Undefined || a == b)
    };
    let mut r_pairs = Vec::new();
    let mut r_succ = vec![Vec::new(); cmds.len()];
    let mut e_pairs = Vec::new();
    for i in 0..cmds.len() {
        for j in 0..cmds.len() {
            if refines_at(i, j) {
                r_pairs.push((i, j));
                r_succ[i].push(j);
                if execs[i].status == execs[j].status {
                    e_pairs.push((i, j));
                }
            }
        }
    }

    Ok(Pools {
        u,
        space,
        cmds,
        execs,
        preds,
        masks,
        ctxs,
        var_names,
        n_leaves,
        r_pairs,
        r_succ,
        e_pairs,
    })
}

/// A minimized violating instantiation.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub law: String,
    /// Metavariable assignments, rendered.
    pub assignment: Vec<(String, String)>,
    pub detail: String,
}

/// Per-law verification outcome.
#[derive(Debug, Clone)]
pub struct LawReport {
    pub id: String,
    pub instances: usize,
    pub counterexample: Option<Counterexample>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// One concrete assignment of pool indices to a law's metavariables.
#[derive(Debug, Clone)]
struct Assignment {
    cmd: Vec<usize>,
    pred: Vec<usize>,
    var: Vec<usize>,
    ctx: Option<usize>,
}

struct Metas {
    cmds: Vec<&'static str>,
    preds: Vec<&'static str>,
    vars: Vec<&'static str>,
}

impl Metas {
    fn of(law: &Law) -> Metas {
        let (cmds, preds, vars) = law_metas(law);
        Metas { cmds, preds, vars }
    }

    fn cmd_ix(&self, name: &str) -> usize {
        self.cmds.iter().position(|&n| n == name).expect("cmd meta")
    }

    fn pred_ix(&self, name: &str) -> usize {
        self.preds
            .iter()
            .position(|&n| n == name)
            .expect("pred meta")
    }

    fn to_bind(&self, pools: &Pools, asg: &Assignment) -> MetaBind {
        let mut bind = MetaBind::default();
        for (i, &n) in self.cmds.iter().enumerate() {
            bind.cmds.insert(n.to_string(), pools.cmds[asg.cmd[i]].clone());
        }
        for (i, &n) in self.preds.iter().enumerate() {
            bind.preds
                .insert(n.to_string(), pools.preds[asg.pred[i]].clone());
        }
        for (i, &n) in self.vars.iter().enumerate() {
            bind.vars
                .insert(n.to_string(), pools.var_names[asg.var[i]].clone());
        }
        bind
    }
}

enum Strategy {
    /// Independent product over the pools.
    Product,
    /// The two command metas range over the equivalence pairs.
    FromE,
    /// The two command metas range over the refinement pairs.
    FromR,
    /// Two independent refinement pairs (c1 ⊑ c2, c3 ⊑ c4).
    FromRxR,
    /// A chain c1 ⊑ c2 ⊑ c3 (or the equivalence analogue).
    Chain { equiv: bool },
    /// The premise is pointwise under Γ ∧ A and is checked per instance.
    CtxPremise,
}

fn strategy_for(law: &Law) -> Strategy {
    match law.id {
        "refstotrans" => Strategy::Chain { equiv: false },
        "refeqtrans" => Strategy::Chain { equiv: true },
        "refeqsymm" | "refstoantisymm" | "refeqstrongerrefsto" => Strategy::FromE,
        "pandmono" | "pormono" | "sandmono" => Strategy::FromRxR,
        "existsmono" | "forallmono" => Strategy::FromR,
        "assumptincontext" | "specincontext" => Strategy::CtxPremise,
        _ => Strategy::Product,
    }
}

enum Outcome {
    Vacuous,
    Pass,
    Fail(String),
}

/// Check one instance of a law.  `skip_premises` skips premise checks that
/// are already guaranteed by the generation strategy.
fn check_instance(
    law: &Law,
    pools: &Pools,
    metas: &Metas,
    asg: &Assignment,
    skip_premises: bool,
) -> Outcome {
    let bind = metas.to_bind(pools, asg);
    // Side conditions: a violated side condition makes the instance vacuous
    // (the law simply does not apply).
    for sc in &law.side_conditions {
        let SideCond::NotFree(xm, cmeta) = sc;
        let v = &bind.vars[*xm];
        if var_free_in(v, &bind.cmds[*cmeta]) {
            return Outcome::Vacuous;
        }
    }
    let ctx_mask = asg.ctx.map(|c| &pools.masks[c]);
    if !skip_premises {
        for prem in &law.premises {
            let el = &pools.execs[asg.cmd[metas.cmd_ix(prem.lhs)]];
            let er = &pools.execs[asg.cmd[metas.cmd_ix(prem.rhs)]];
            let under_mask = prem.under.map(|a| &pools.masks[asg.pred[metas.pred_ix(a)]]);
            for idx in 0..pools.space.size {
                if let Some(m) = ctx_mask {
                    if !m[idx] {
                        continue;
                    }
                }
                if let Some(m) = under_mask {
                    if !m[idx] {
                        continue;
                    }
                }
                let ok = match (el.status[idx], er.status[idx]) {
                    (Status::Undefined, _) => true,
                    (a, b) => {
                        a == b && (!prem.equivalence || true)
                    }
                };
                let ok = if prem.equivalence {
                    el.status[idx] == er.status[idx]
                } else {
                    ok
                };
                if !ok {
                    return Outcome::Vacuous;
                }
            }
        }
    }
    // Obligations.
    let ctx_preds: Vec<Pred> = asg
        .ctx
        .map(|c| vec![pools.preds[c].clone()])
        .unwrap_or_default();
    for tmpl in &law.obligations {
        let mut hyp = Pred::True;
        for (i, h) in tmpl.hyps.iter().enumerate() {
            let p = h.build(&bind).expect("verify metas bound");
            hyp = if i == 0 { p } else { Pred::and(hyp, p) };
        }
        let concl = tmpl.concl.build(&bind).expect("verify metas bound");
        match pools.u.entails_hyp(&ctx_preds, &hyp, &concl) {
            Ok(true) => {}
            Ok(false) => return Outcome::Vacuous,
            Err(_) => return Outcome::Vacuous,
        }
    }
    // The semantic claim.
    let env = Env::new();
    let lhs = instantiate_cmd(&law.lhs, &bind).expect("verify metas bound");
    let rhs = instantiate_cmd(&law.rhs, &bind).expect("verify metas bound");
    let el = match cexec_in(&pools.u, &env, &lhs, &pools.space) {
        Ok(e) => e,
        Err(e) => return Outcome::Fail(format!("lhs evaluation error: {}", e)),
    };
    let er = match cexec_in(&pools.u, &env, &rhs, &pools.space) {
        Ok(e) => e,
        Err(e) => return Outcome::Fail(format!("rhs evaluation error: {}", e)),
    };
    for idx in 0..pools.space.size {
        if let Some(m) = ctx_mask {
            if !m[idx] {
                continue;
            }
        }
        let (a, b) = (el.status[idx], er.status[idx]);
        let ok = if law.equivalence {
            a == b
        } else {
            a == Status::Undefined || a == b
        };
        if !ok {
            let mut vals = Vec::new();
            pools.space.decode_vals(&pools.u, idx, &mut vals);
            let binding: Vec<String> = pools
                .space
                .vars
                .iter()
                .zip(vals.iter())
                .map(|(&v, &val)| {
                    format!("{}={}", pools.u.var_name(v), pools.u.display_value(val))
                })
                .collect();
            return Outcome::Fail(format!(
                "at {}: lhs {:?}, rhs {:?}",
                binding.join(","),
                a,
                b
            ));
        }
    }
    Outcome::Pass
}

fn render_assignment(pools: &Pools, metas: &Metas, asg: &Assignment) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (i, &n) in metas.cmds.iter().enumerate() {
        out.push((n.to_string(), pretty_command(&pools.cmds[asg.cmd[i]])));
    }
    for (i, &n) in metas.preds.iter().enumerate() {
        out.push((n.to_string(), pretty_pred(&pools.preds[asg.pred[i]])));
    }
    for (i, &n) in metas.vars.iter().enumerate() {
        out.push((n.to_string(), pools.var_names[asg.var[i]].clone()));
    }
    if let Some(c) = asg.ctx {
        out.push(("context".to_string(), pretty_pred(&pools.preds[c])));
    }
    out
}

/// Greedy shrinking: replace command metas with leaf commands while the
/// instance keeps failing (premises and obligations still holding).
fn shrink(law: &Law, pools: &Pools, metas: &Metas, asg: &Assignment) -> Assignment {
    let mut best = asg.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for pos in 0..best.cmd.len() {
            if best.cmd[pos] < pools.n_leaves {
                continue;
            }
            for leaf in 0..pools.n_leaves {
                let mut cand = best.clone();
                cand.cmd[pos] = leaf;
                if matches!(check_instance(law, pools, metas, &cand, false), Outcome::Fail(_)) {
                    best = cand;
                    changed = true;
                    break;
                }
            }
        }
    }
    best
}

fn law_seed(cfg: &VerifyCfg, law: &Law) -> u64 {
    // Deterministic per-law seed, independent of catalogue position.
    law.id
        .bytes()
        .fold(cfg.seed ^ 0x9e37_79b9_7f4a_7c15, |h, b| {
            h.rotate_left(5) ^ (b as u64)
        })
}

/// Verify one law against shared pools.
pub fn verify_law_with(law: &Law, pools: &Pools, cfg: &VerifyCfg) -> LawReport {
    if law.builtin {
        return verify_builtin(law);
    }
    let metas = Metas::of(law);
    let strat = strategy_for(law);
    let nc = metas.cmds.len();
    let np = metas.preds.len();
    let nv = metas.vars.len();
    let n_cmds = pools.cmds.len() as u128;
    let n_preds = pools.preds.len() as u128;
    let n_vars = pools.var_names.len() as u128;
    let n_ctx = if law.uses_ctx {
        pools.ctxs.len() as u128
    } else {
        1
    };
    // Which command metas are constrained by the strategy, in premise order.
    let free_pred = n_preds.pow(np as u32);
    let free_var = n_vars.pow(nv as u32);

    let mut rng = ChaCha8Rng::seed_from_u64(law_seed(cfg, law));
    let mut instances = 0usize;
    let mut failure: Option<(Assignment, String)> = None;

    // Build one assignment; returns None when the constrained relation is
    // empty (nothing to check).
    let decode_free = |asg: &mut Assignment, mut rest: u128| {
        asg.pred.clear();
        for _ in 0..np {
            asg.pred.push((rest % n_preds) as usize);
            rest /= n_preds;
        }
        asg.var.clear();
        for _ in 0..nv {
            asg.var.push((rest % n_vars) as usize);
            rest /= n_vars;
        }
        asg.ctx = if law.uses_ctx {
            let c = (rest % n_ctx) as usize;
            Some(pools.ctxs[c])
        } else {
            None
        };
    };

    let total: u128;
    let gen: Box<dyn FnMut(&mut ChaCha8Rng, u128) -> Option<(Assignment, bool)>>;
    match strat {
        Strategy::Product => {
            total = n_cmds.pow(nc as u32) * free_pred * free_var * n_ctx;
            let nc_local = nc;
            gen = Box::new(move |_rng, i| {
                let mut asg = Assignment {
                    cmd: Vec::new(),
                    pred: Vec::new(),
                    var: Vec::new(),
                    ctx: None,
                };
                let mut rest = i;
                for _ in 0..nc_local {
                    asg.cmd.push((rest % n_cmds) as usize);
                    rest /= n_cmds;
                }
                decode_free(&mut asg, rest);
                Some((asg, false))
            });
        }
        Strategy::FromE | Strategy::FromR => {
            let pairs: &Vec<(usize, usize)> = if matches!(strat, Strategy::FromE) {
                &pools.e_pairs
            } else {
                &pools.r_pairs
            };
            total = pairs.len() as u128 * free_pred * free_var * n_ctx;
            // Premise order fixes which meta is the pair's left component.
            let (l_ix, r_ix) = premise_positions(law, &metas);
            gen = Box::new(move |_rng, i| {
                if pairs.is_empty() {
                    return None;
                }
                let pair = pairs[(i % pairs.len() as u128) as usize];
                let rest = i / pairs.len() as u128;
                let mut asg = Assignment {
                    cmd: vec![0; 2],
                    pred: Vec::new(),
                    var: Vec::new(),
                    ctx: None,
                };
                asg.cmd[l_ix] = pair.0;
                asg.cmd[r_ix] = pair.1;
                decode_free(&mut asg, rest);
                Some((asg, true))
            });
        }
        Strategy::FromRxR => {
            let pairs = &pools.r_pairs;
            total = (pairs.len() as u128).pow(2) * free_pred * free_var * n_ctx;
            let pos0 = premise_positions_nth(law, &metas, 0);
            let pos1 = premise_positions_nth(law, &metas, 1);
            gen = Box::new(move |_rng, i| {
                if pairs.is_empty() {
                    return None;
                }
                let n = pairs.len() as u128;
                let p0 = pairs[(i % n) as usize];
                let p1 = pairs[((i / n) % n) as usize];
                let rest = i / (n * n);
                let mut asg = Assignment {
                    cmd: vec![0; 4],
                    pred: Vec::new(),
                    var: Vec::new(),
                    ctx: None,
                };
                asg.cmd[pos0.0] = p0.0;
                asg.cmd[pos0.1] = p0.1;
                asg.cmd[pos1.0] = p1.0;
                asg.cmd[pos1.1] = p1.1;
                decode_free(&mut asg, rest);
                Some((asg, true))
            });
        }
        Strategy::Chain { equiv } => {
            let pairs: Vec<(usize, usize)> = if equiv {
                pools.e_pairs.clone()
            } else {
                pools.r_pairs.clone()
            };
            let succ: Vec<Vec<usize>> = if equiv {
                let mut s = vec![Vec::new(); pools.cmds.len()];
                for &(i, j) in &pools.e_pairs {
                    s[i].push(j);
                }
                s
            } else {
                pools.r_succ.clone()
            };
            let chain_count: u128 = pairs
                .iter()
                .map(|&(_, m)| succ[m].len() as u128)
                .sum();
            total = chain_count * free_pred * free_var * n_ctx;
            // Exhaustive enumeration materializes the triples; sampling
            // draws a pair then a successor of its middle element.
            let exhaustive = total <= cfg.exhaustive_limit;
            let triples: Vec<(usize, usize, usize)> = if exhaustive {
                let mut t = Vec::new();
                for &(a, m) in &pairs {
                    for &c in &succ[m] {
                        t.push((a, m, c));
                    }
                }
                t
            } else {
                Vec::new()
            };
            let ix1 = metas.cmd_ix("c1");
            let ix2 = metas.cmd_ix("c2");
            let ix3 = metas.cmd_ix("c3");
            gen = Box::new(move |rng, i| {
                let (a, m, c) = if exhaustive {
                    if triples.is_empty() {
                        return None;
                    }
                    triples[(i % triples.len() as u128) as usize]
                } else {
                    if pairs.is_empty() {
                        return None;
                    }
                    for _ in 0..64 {
                        let (a, m) = pairs[rng.gen_range(0..pairs.len())];
                        if !succ[m].is_empty() {
                            let c = succ[m][rng.gen_range(0..succ[m].len())];
                            let mut asg = Assignment {
                                cmd: vec![0; 3],
                                pred: Vec::new(),
                                var: Vec::new(),
                                ctx: None,
                            };
                            asg.cmd[ix1] = a;
                            asg.cmd[ix2] = m;
                            asg.cmd[ix3] = c;
                            decode_free(&mut asg, 0);
                            return Some((asg, true));
                        }
                    }
                    return None;
                };
                let rest = if exhaustive {
                    i / triples.len().max(1) as u128
                } else {
                    0
                };
                let mut asg = Assignment {
                    cmd: vec![0; 3],
                    pred: Vec::new(),
                    var: Vec::new(),
                    ctx: None,
                };
                asg.cmd[ix1] = a;
                asg.cmd[ix2] = m;
                asg.cmd[ix3] = c;
                decode_free(&mut asg, rest);
                Some((asg, true))
            });
        }
        Strategy::CtxPremise => {
            total = n_cmds.pow(nc as u32) * free_pred * free_var * n_ctx;
            let nc_local = nc;
            gen = Box::new(move |_rng, i| {
                let mut asg = Assignment {
                    cmd: Vec::new(),
                    pred: Vec::new(),
                    var: Vec::new(),
                    ctx: None,
                };
                let mut rest = i;
                for _ in 0..nc_local {
                    asg.cmd.push((rest % n_cmds) as usize);
                    rest /= n_cmds;
                }
                decode_free(&mut asg, rest);
                Some((asg, false))
            });
        }
    }
    let mut gen = gen;

    let exhaustive = total <= cfg.exhaustive_limit;
    let n_runs = if exhaustive {
        total as usize
    } else {
        cfg.samples
    };
    for step in 0..n_runs {
        let i = if exhaustive {
            step as u128
        } else {
            rng.gen_range(0..total.max(1))
        };
        let (asg, premises_guaranteed) = match gen(&mut rng, i) {
            Some(x) => x,
            None => break,
        };
        instances += 1;
        match check_instance(law, pools, &metas, &asg, premises_guaranteed) {
            Outcome::Vacuous | Outcome::Pass => {}
            Outcome::Fail(_) => {
                let small = shrink(law, pools, &metas, &asg);
                let detail = match check_instance(law, pools, &metas, &small, false) {
                    Outcome::Fail(d) => d,
                    _ => "shrunk instance no longer fails".to_string(),
                };
                failure = Some((small, detail));
                break;
            }
        }
    }

    LawReport {
        id: law.id.to_string(),
        instances,
        counterexample: failure.map(|(asg, detail)| Counterexample {
            law: law.id.to_string(),
            assignment: render_assignment(pools, &metas, &asg),
            detail,
        }),
    }
}

/// Positions of the sole premise's metas within the sorted command metas.
fn premise_positions(law: &Law, metas: &Metas) -> (usize, usize) {
    premise_positions_nth(law, metas, 0)
}

fn premise_positions_nth(law: &Law, metas: &Metas, n: usize) -> (usize, usize) {
    let p = &law.premises[n];
    (metas.cmd_ix(p.lhs), metas.cmd_ix(p.rhs))
}

/// Verify one law, building pools from the configuration.
pub fn verify_law(law: &Law, cfg: &VerifyCfg) -> Result<LawReport, SemError> {
    let pools = build_pools(cfg)?;
    Ok(verify_law_with(law, &pools, cfg))
}

/// Verify the whole catalogue (or the named subset).
pub fn verify_all(cfg: &VerifyCfg, only: Option<&[String]>) -> Result<Vec<LawReport>, SemError> {
    let pools = build_pools(cfg)?;
    let mut out = Vec::new();
    for law in catalogue() {
        if let Some(ids) = only {
            if !ids.iter().any(|i| i == law.id) {
                continue;
            }
        }
        out.push(verify_law_with(&law, &pools, cfg));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Built-in laws: canned semantic instances

/// The built-in laws manipulate recursion environments, so they are checked
/// against fixed semantic instances rather than enumerated patterns.
fn verify_builtin(law: &Law) -> LawReport {
    let result = match law.id {
        "recursionintro" => canned_recursionintro(),
        "propertyoverlist" => canned_propertyoverlist(false),
        "propertyoverlistindexed" => canned_propertyoverlist(true),
        other => Err(format!("no canned check for {}", other)),
    };
    match result {
        Ok(instances) => LawReport {
            id: law.id.to_string(),
            instances,
            counterexample: None,
        },
        Err(detail) => LawReport {
            id: law.id.to_string(),
            instances: 0,
            counterexample: Some(Counterexample {
                law: law.id.to_string(),
                assignment: Vec::new(),
                detail,
            }),
        },
    }
}

fn canned_recursionintro() -> Result<usize, String> {
    use crate::semantics::fix;
    use crate::syntax::ast::{DomainSpec, PCommand, UniverseItem};
    use crate::syntax::parse_command;
    let items = vec![
        UniverseItem::ValuesInt(0, 3),
        UniverseItem::Var("X".into(), DomainSpec::IntRange(0, 3)),
        UniverseItem::Var("X1".into(), DomainSpec::IntRange(0, 3)),
        UniverseItem::FunBuiltin("minus".into(), 2),
    ];
    let u = Universe::from_items(&items).map_err(|e| e.to_string())?;
    let body = parse_command("<X = 0> \\/ (<X > 0>, exists X1 . <X1 = X - 1>, p(X1))")
        .map_err(|e| e.to_string())?;
    let rec = PCommand::Rec(
        "p".into(),
        Box::new(PCommand::Param(vec!["X".into()], body)),
    );
    let env = Env::new();
    let fr = fix(&u, &env, &rec).map_err(|e| e.to_string())?;
    // The fixed point must satisfy the specification it was introduced for.
    let spec_cmd = Command::Spec(Pred::User("nat".into(), vec![Term::var("X")]));
    let space = Space::over(&u, [u.var_id("X").map_err(|e| e.to_string())?])
        .map_err(|e| e.to_string())?;
    let spec_exec = cexec_in(&u, &env, &spec_cmd, &space).map_err(|e| e.to_string())?;
    if !crate::exec::refines(&spec_exec, &fr.pexec.table).map_err(|e| e.to_string())? {
        return Err("specification not refined by the fixed point".into());
    }
    if fr.iterates.len() < 2 {
        return Err("fixed point converged without iterating".into());
    }
    // The variant must be well-founded over the formal space.
    let ok = check_wellfounded(&u, &VariantRelation::IntLt(0), &fr.pexec.table.space)
        .map_err(|e| e.to_string())?;
    if !ok {
        return Err("variant relation is not well-founded".into());
    }
    Ok(space.size)
}

fn canned_propertyoverlist(indexed: bool) -> Result<usize, String> {
    use crate::semantics::{call_space_exec, fix};
    use crate::syntax::ast::{DomainSpec, PCommand, UniverseItem};
    use crate::syntax::parse_command;
    // Differences like X - H can be negative, so the value set includes a
    // margin below zero.
    let mut items = vec![
        UniverseItem::ValuesInt(-2, 4),
        UniverseItem::ValuesLists {
            maxlen: 2,
            lo: 1,
            hi: 2,
        },
        UniverseItem::Var("X".into(), DomainSpec::IntRange(1, 2)),
        UniverseItem::Var("P".into(), DomainSpec::Lists(Some(2))),
        UniverseItem::Var("H".into(), DomainSpec::IntRange(1, 2)),
        UniverseItem::Var("T".into(), DomainSpec::Lists(Some(1))),
        UniverseItem::FunBuiltin("minus".into(), 2),
        UniverseItem::FunBuiltin("abs".into(), 1),
        UniverseItem::FunBuiltin("plus".into(), 2),
    ];
    if indexed {
        items.push(UniverseItem::Var("J".into(), DomainSpec::IntRange(1, 3)));
    }
    let u = Universe::from_items(&items).map_err(|e| e.to_string())?;
    let (formals, body_src, lhs_src, args): (Vec<String>, &str, &str, Vec<Term>) = if indexed {
        (
            vec!["X".into(), "P".into(), "J".into()],
            "<P = []> \\/ (exists H, T . <P = [H | T]>, <J != abs(X - H)>, p(X, T, J + 1))",
            "<list(P)> /\\ <notdiag(X, P)>",
            vec![Term::var("X"), Term::var("P"), Term::int(1)],
        )
    } else {
        (
            vec!["X".into(), "P".into()],
            "<P = []> \\/ (exists H, T . <P = [H | T]>, <X != H>, p(X, T))",
            "<list(P)> /\\ <notrow(X, P)>",
            vec![Term::var("X"), Term::var("P")],
        )
    };
    let body = parse_command(body_src).map_err(|e| e.to_string())?;
    let rec = PCommand::Rec("p".into(), Box::new(PCommand::Param(formals, body)));
    let env = Env::new();
    let fr = fix(&u, &env, &rec).map_err(|e| e.to_string())?;
    let lhs = parse_command(lhs_src).map_err(|e| e.to_string())?;
    let space = Space::over(
        &u,
        [
            u.var_id("X").map_err(|e| e.to_string())?,
            u.var_id("P").map_err(|e| e.to_string())?,
        ],
    )
    .map_err(|e| e.to_string())?;
    let lhs_exec = cexec_in(&u, &env, &lhs, &space).map_err(|e| e.to_string())?;
    let call_exec =
        call_space_exec(&u, &fr.pexec, &args, &space).map_err(|e| e.to_string())?;
    if !crate::exec::refines(&lhs_exec, &call_exec).map_err(|e| e.to_string())? {
        return Err(format!(
            "{} not refined by the recursive procedure",
            lhs_src
        ));
    }
    Ok(space.size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_command, parse_pred};
    use crate::syntax::ast::{DomainSpec, UniverseItem};

    #[test]
    fn catalogue_is_complete_and_stable() {
        let cat = catalogue();
        assert!(cat.len() >= 45, "only {} laws", cat.len());
        let mut ids: Vec<&str> = cat.iter().map(|l| l.id).collect();
        ids.sort_unstable();
        let before = ids.len();
        ids.dedup();
        assert_eq!(before, ids.len(), "duplicate law ids");
        for id in [
            "pandtosand",
            "pormono",
            "liftpand",
            "weakenassumpt",
            "equivspec",
            "assumptincontext",
            "specincontext",
            "caseanalysis",
            "recursionintro",
            "propertyoverlist",
            "propertyoverlistindexed",
        ] {
            assert!(cat.iter().any(|l| l.id == id), "missing {}", id);
        }
        let pts = lookup("pandtosand").unwrap();
        assert!(!pts.equivalence);
        assert!(pts.obligations.is_empty());
        assert_eq!(pts.lhs, pand(cm("c1"), cm("c2")));
        assert_eq!(pts.rhs, sand(cm("c1"), cm("c2")));
        let wa = lookup("weakenassumpt").unwrap();
        assert_eq!(wa.obligations.len(), 1);
        assert_eq!(wa.obligations[0].hyps, vec![PredForm::Meta("A")]);
        assert_eq!(wa.obligations[0].concl, PredForm::Meta("B"));
        let ca = lookup("caseanalysis").unwrap();
        assert!(ca.uses_ctx);
        assert_eq!(ca.obligations[0].concl, PredForm::Or("P", "Q"));
        assert!(matches!(lookup("nosuchlaw"), Err(LawsError::UnknownLaw(_))));
    }

    #[test]
    fn apply_pandtosand_at_root() {
        let law = lookup("pandtosand").unwrap();
        let target = parse_command("<X = 0> /\\ <Y = 1>").unwrap();
        let (out, obs) = apply_law(&law, &target, &[], &BTreeMap::new(), &[]).unwrap();
        assert_eq!(out, parse_command("<X = 0>, <Y = 1>").unwrap());
        assert!(obs.is_empty());
    }

    #[test]
    fn apply_equivspec_produces_obligation() {
        let items = vec![
            UniverseItem::ValuesInt(0, 2),
            UniverseItem::Var("U".into(), DomainSpec::IntRange(0, 2)),
            UniverseItem::Var("V".into(), DomainSpec::IntRange(0, 2)),
            UniverseItem::FunBuiltin("fact".into(), 1),
        ];
        let u = Universe::from_items(&items).unwrap();
        let law = lookup("equivspec").unwrap();
        let target = parse_command("<V = fact(U)>").unwrap();
        let mut params = BTreeMap::new();
        params.insert(
            "Q".to_string(),
            ParamValue::Pred(parse_pred("V = 1").unwrap()),
        );
        let ctx = vec![parse_pred("U = 0").unwrap()];
        let (out, obs) = apply_law(&law, &target, &[], &params, &ctx).unwrap();
        assert_eq!(out, parse_command("<V = 1>").unwrap());
        assert_eq!(obs.len(), 1);
        assert!(discharge(&obs[0], &u).unwrap());
        // Without the context the equivalence is not valid.
        let (_, obs2) = apply_law(&law, &target, &[], &params, &[]).unwrap();
        assert!(!discharge(&obs2[0], &u).unwrap());
    }

    #[test]
    fn apply_equivspec_without_param_is_ambiguous() {
        let law = lookup("equivspec").unwrap();
        let target = parse_command("<X = 0>").unwrap();
        match apply_law(&law, &target, &[], &BTreeMap::new(), &[]) {
            Err(LawsError::AmbiguousMatch(_)) => {}
            other => panic!("expected AmbiguousMatch, got {:?}", other),
        }
    }

    #[test]
    fn extendscope_freeness_side_condition() {
        let law = lookup("extendscopeexistsoverpand").unwrap();
        let ok = parse_command("(exists X . <X = Y>) /\\ <Y = 0>").unwrap();
        let (out, _) = apply_law(&law, &ok, &[], &BTreeMap::new(), &[]).unwrap();
        assert_eq!(
            out,
            parse_command("exists X . <X = Y> /\\ <Y = 0>").unwrap()
        );
        let bad = parse_command("(exists X . <X = Y>) /\\ <X = 0>").unwrap();
        match apply_law(&law, &bad, &[], &BTreeMap::new(), &[]) {
            Err(LawsError::SideConditionFailure(_)) => {}
            other => panic!("expected SideConditionFailure, got {:?}", other),
        }
    }

    #[test]
    fn context_walk_collects_left_sequential_predicates() {
        let target = parse_command("{A = 0}, (<B = 1>, (<C = 2> \\/ skip))").unwrap();
        let ctx = context_at(&target, &[1, 1, 0], &[]).unwrap();
        assert_eq!(
            ctx,
            vec![parse_pred("A = 0").unwrap(), parse_pred("B = 1").unwrap()]
        );
        // Entering a quantifier drops predicates about the rebound variable.
        let target2 = parse_command("<X = 0>, exists X . <X = 1>").unwrap();
        let ctx2 = context_at(&target2, &[1, 0], &[]).unwrap();
        assert!(ctx2.is_empty());
    }

    #[test]
    fn small_verify_all_passes() {
        let cfg = VerifyCfg {
            n_vars: 2,
            n_vals: 2,
            depth: 1,
            samples: 2_000,
            ..VerifyCfg::default()
        };
        let reports = verify_all(&cfg, None).unwrap();
        assert!(reports.len() >= 45);
        for r in &reports {
            assert!(
                r.passed(),
                "law {} failed: {:?}",
                r.id,
                r.counterexample
            );
        }
    }

    #[test]
    fn reversed_refinement_laws_have_counterexamples() {
        let cfg = VerifyCfg {
            n_vars: 2,
            n_vals: 2,
            depth: 1,
            samples: 5_000,
            ..VerifyCfg::default()
        };
        let pools = build_pools(&cfg).unwrap();
        for id in ["pandtosand", "pandoversand", "removeassumpt"] {
            let law = lookup(id).unwrap().reversed();
            let report = verify_law_with(&law, &pools, &cfg);
            assert!(
                !report.passed(),
                "reversed {} unexpectedly verified",
                id
            );
        }
        // The forward directions are fine at the same scale.
        for id in ["pandtosand", "pandoversand", "removeassumpt"] {
            let law = lookup(id).unwrap();
            assert!(verify_law_with(&law, &pools, &cfg).passed());
        }
    }

    #[test]
    fn shrinking_yields_leaf_counterexample() {
        let cfg = VerifyCfg {
            n_vars: 2,
            n_vals: 2,
            depth: 2,
            samples: 20_000,
            ..VerifyCfg::default()
        };
        let pools = build_pools(&cfg).unwrap();
        let law = lookup("pandtosand").unwrap().reversed();
        let report = verify_law_with(&law, &pools, &cfg);
        let cx = report.counterexample.expect("must fail");
        // Greedy shrinking reduces both commands to leaves.
        for (name, rendered) in &cx.assignment {
            if name.starts_with('c') {
                let c = parse_command(rendered).unwrap();
                assert!(
                    matches!(c, Command::Spec(_) | Command::Assert(_)),
                    "{} not shrunk: {}",
                    name,
                    rendered
                );
            }
        }
    }

    #[test]
    fn discharge_examples() {
        let items = vec![
            UniverseItem::ValuesInt(0, 1),
            UniverseItem::Var("X".into(), DomainSpec::IntRange(0, 1)),
        ];
        let u = Universe::from_items(&items).unwrap();
        let ob = Obligation::Entails {
            context: vec![],
            hyp: Pred::False,
            concl: parse_pred("X = 1").unwrap(),
        };
        assert!(discharge(&ob, &u).unwrap());
        let ob2 = Obligation::Equiv {
            context: vec![parse_pred("X = 0").unwrap()],
            p: parse_pred("X = 0").unwrap(),
            q: Pred::True,
        };
        assert!(discharge(&ob2, &u).unwrap());
    }

    #[test]
    fn builtin_laws_canned_checks() {
        for id in ["recursionintro", "propertyoverlist", "propertyoverlistindexed"] {
            let law = lookup(id).unwrap();
            let report = verify_builtin(&law);
            assert!(report.passed(), "{}: {:?}", id, report.counterexample);
        }
    }
}
