//! Finite semantic domains: values, per-variable domains, functor tables,
//! bindings, states and three-valued predicate evaluation.
//!
//! A [`Universe`] fixes a finite ordered value set, a list of declared
//! variables (each with a non-empty domain drawn from the value set), and a
//! table of functors.  Functors are partial: applying one outside its table
//! (division by zero, arithmetic overflowing the value range, a list cell
//! absent from the value set) yields an undefined result, which predicate
//! evaluation propagates strictly.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::syntax::ast::{CmpOp, DomainSpec, Pred, Term, UniverseItem};

/// Index of an interned value within a universe.
pub type ValId = u32;
/// Index of a declared variable within a universe.
pub type VarId = usize;

/// Default cap on the number of bindings any full enumeration may touch.
pub const DEFAULT_BINDING_CAP: usize = 10_000_000;

/// A ground value.  List and pair cells reference other interned values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Atom(String),
    Nil,
    Cons(ValId, ValId),
    Pair(ValId, ValId),
}

/// Three-valued predicate truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredValue {
    True,
    False,
    Undefined,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum UniverseError {
    #[error("enumeration of {size} bindings exceeds the configured cap of {cap}")]
    ConfigError { size: usize, cap: usize },
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("unknown functor `{0}`")]
    UnknownFunctor(String),
    #[error("functor `{functor}` expects {expected} arguments, got {got}")]
    ArityError {
        functor: String,
        expected: usize,
        got: usize,
    },
    #[error("term `{0}` is undefined on the given state")]
    UndefinedTerm(String),
    #[error("value {value} outside the domain of variable `{var}`")]
    DomainViolation { var: String, value: String },
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("value `{0}` is not in the universe's value set")]
    UnknownValue(String),
    #[error("duplicate declaration of variable `{0}`")]
    DuplicateVar(String),
    #[error("`{0}` is not a recognised builtin functor")]
    UnknownBuiltin(String),
    #[error("functor table row for `{0}` contains a non-ground term")]
    NonGroundRow(String),
}

/// Builtin functor implementations over the interned value set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Builtin {
    Plus,
    Minus,
    Times,
    Div,
    Abs,
    Suc,
    Fact,
    Len,
    ConsF,
    NilF,
}

impl Builtin {
    fn from_name(name: &str, arity: usize) -> Option<Builtin> {
        match (name, arity) {
            ("plus", 2) => Some(Builtin::Plus),
            ("minus", 2) => Some(Builtin::Minus),
            ("times", 2) => Some(Builtin::Times),
            ("div", 2) => Some(Builtin::Div),
            ("abs", 1) => Some(Builtin::Abs),
            ("suc", 1) => Some(Builtin::Suc),
            ("fact", 1) => Some(Builtin::Fact),
            ("len", 1) => Some(Builtin::Len),
            ("cons", 2) => Some(Builtin::ConsF),
            ("nil", 0) => Some(Builtin::NilF),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
enum FunImpl {
    Builtin(Builtin),
    Table(HashMap<Vec<ValId>, ValId>),
}

#[derive(Debug, Clone)]
struct Functor {
    arity: usize,
    imp: FunImpl,
}

#[derive(Debug, Clone)]
struct VarInfo {
    name: String,
    domain: Vec<ValId>,
    /// Position of each domain value within `domain`.
    dom_pos: HashMap<ValId, usize>,
}

/// A finite universe of discourse.
#[derive(Debug, Clone)]
pub struct Universe {
    values: Vec<Value>,
    value_ix: HashMap<Value, ValId>,
    vars: Vec<VarInfo>,
    var_ix: HashMap<String, VarId>,
    functors: HashMap<String, Functor>,
    pub cap: usize,
}

impl Universe {
    pub fn new() -> Universe {
        Universe {
            values: Vec::new(),
            value_ix: HashMap::new(),
            vars: Vec::new(),
            var_ix: HashMap::new(),
            functors: HashMap::new(),
            cap: DEFAULT_BINDING_CAP,
        }
    }

    /// Build a universe from the declaration items of a parsed program.
    pub fn from_items(items: &[UniverseItem]) -> Result<Universe, UniverseError> {
        let mut u = Universe::new();
        // First pass: value set.
        for item in items {
            match item {
                UniverseItem::ValuesInt(lo, hi) => {
                    for n in *lo..=*hi {
                        u.intern(Value::Int(n));
                    }
                }
                UniverseItem::ValuesLists { maxlen, lo, hi } => {
                    u.intern_lists(*maxlen, *lo, *hi);
                }
                UniverseItem::ValuesTerms {
                    depth,
                    atoms,
                    ranges,
                } => {
                    u.intern_terms(*depth, atoms, ranges);
                }
                _ => {}
            }
        }
        // Second pass: variables and functors.
        for item in items {
            match item {
                UniverseItem::Var(name, spec) => u.declare_var(name, spec)?,
                UniverseItem::FunBuiltin(name, arity) => {
                    let b = Builtin::from_name(name, *arity)
                        .ok_or_else(|| UniverseError::UnknownBuiltin(name.clone()))?;
                    u.functors.insert(
                        name.clone(),
                        Functor {
                            arity: *arity,
                            imp: FunImpl::Builtin(b),
                        },
                    );
                }
                UniverseItem::FunTable(name, arity, rows) => {
                    let mut table = HashMap::new();
                    for (args, result) in rows {
                        if args.len() != *arity {
                            return Err(UniverseError::ArityError {
                                functor: name.clone(),
                                expected: *arity,
                                got: args.len(),
                            });
                        }
                        let mut key = Vec::with_capacity(args.len());
                        for a in args {
                            key.push(
                                u.ground_value(a)
                                    .ok_or_else(|| UniverseError::NonGroundRow(name.clone()))?,
                            );
                        }
                        let v = u
                            .ground_value(result)
                            .ok_or_else(|| UniverseError::NonGroundRow(name.clone()))?;
                        table.insert(key, v);
                    }
                    u.functors.insert(
                        name.clone(),
                        Functor {
                            arity: *arity,
                            imp: FunImpl::Table(table),
                        },
                    );
                }
                _ => {}
            }
        }
        // List constructors are always available so list syntax works.
        u.functors.entry("cons".into()).or_insert(Functor {
            arity: 2,
            imp: FunImpl::Builtin(Builtin::ConsF),
        });
        u.functors.entry("nil".into()).or_insert(Functor {
            arity: 0,
            imp: FunImpl::Builtin(Builtin::NilF),
        });
        Ok(u)
    }

    /// Intern a value, returning its id.  Sub-values of lists/pairs must
    /// already be interned.
    pub fn intern(&mut self, v: Value) -> ValId {
        if let Some(&id) = self.value_ix.get(&v) {
            return id;
        }
        let id = self.values.len() as ValId;
        self.values.push(v.clone());
        self.value_ix.insert(v, id);
        id
    }

    fn intern_lists(&mut self, maxlen: usize, lo: i64, hi: i64) {
        let elems: Vec<ValId> = (lo..=hi).map(|n| self.intern(Value::Int(n))).collect();
        let mut level = vec![self.intern(Value::Nil)];
        for _ in 0..maxlen {
            let mut next = Vec::new();
            for &e in &elems {
                for &t in &level {
                    next.push(self.intern(Value::Cons(e, t)));
                }
            }
            level = next;
        }
    }

    fn intern_terms(&mut self, depth: usize, atoms: &[(String, usize)], ranges: &[(i64, i64)]) {
        let mut pool: Vec<ValId> = Vec::new();
        for (name, arity) in atoms {
            if *arity == 0 {
                let v = if name == "nil" {
                    Value::Nil
                } else {
                    Value::Atom(name.clone())
                };
                pool.push(self.intern(v));
            }
        }
        for (lo, hi) in ranges {
            for n in *lo..=*hi {
                pool.push(self.intern(Value::Int(n)));
            }
        }
        let make_cons = atoms.iter().any(|(n, a)| n == "cons" && *a == 2);
        let make_pair = atoms.iter().any(|(n, a)| n == "pair" && *a == 2);
        for _ in 1..depth {
            let snapshot = pool.clone();
            for &a in &snapshot {
                for &b in &snapshot {
                    if make_cons {
                        pool.push(self.intern(Value::Cons(a, b)));
                    }
                    if make_pair {
                        pool.push(self.intern(Value::Pair(a, b)));
                    }
                }
            }
            pool.sort_unstable();
            pool.dedup();
        }
    }

    fn declare_var(&mut self, name: &str, spec: &DomainSpec) -> Result<(), UniverseError> {
        if self.var_ix.contains_key(name) {
            return Err(UniverseError::DuplicateVar(name.to_string()));
        }
        let domain: Vec<ValId> = match spec {
            DomainSpec::IntRange(lo, hi) => {
                let mut d = Vec::new();
                for n in *lo..=*hi {
                    let id = self
                        .value_ix
                        .get(&Value::Int(n))
                        .copied()
                        .ok_or_else(|| UniverseError::UnknownValue(n.to_string()))?;
                    d.push(id);
                }
                d
            }
            DomainSpec::Lists(maxlen) => {
                let mut d = Vec::new();
                for (i, v) in self.values.iter().enumerate() {
                    if let Some(len) = self.list_len_of(v) {
                        if maxlen.map_or(true, |k| len <= k) {
                            d.push(i as ValId);
                        }
                    }
                }
                d
            }
            DomainSpec::AllValues => (0..self.values.len() as ValId).collect(),
        };
        if domain.is_empty() {
            return Err(UniverseError::EmptyDomain(name.to_string()));
        }
        let dom_pos = domain.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let id = self.vars.len();
        self.vars.push(VarInfo {
            name: name.to_string(),
            domain,
            dom_pos,
        });
        self.var_ix.insert(name.to_string(), id);
        Ok(())
    }

    fn list_len_of(&self, v: &Value) -> Option<usize> {
        match v {
            Value::Nil => Some(0),
            Value::Cons(_, t) => self.list_len_of(&self.values[*t as usize]).map(|n| n + 1),
            _ => None,
        }
    }

    /// Evaluate a ground term (no variables) to an interned value.
    pub fn ground_value(&self, t: &Term) -> Option<ValId> {
        match t {
            Term::Var(_) => None,
            Term::Fun(name, args) => {
                let mut vs = Vec::with_capacity(args.len());
                for a in args {
                    vs.push(self.ground_value(a)?);
                }
                self.apply_functor(name, &vs)
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_values(&self) -> usize {
        self.values.len()
    }

    pub fn var_id(&self, name: &str) -> Result<VarId, UniverseError> {
        self.var_ix
            .get(name)
            .copied()
            .ok_or_else(|| UniverseError::UnknownVar(name.to_string()))
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v].name
    }

    pub fn domain(&self, v: VarId) -> &[ValId] {
        &self.vars[v].domain
    }

    /// Position of a value within a variable's domain, if it belongs to it.
    pub fn domain_pos(&self, v: VarId, val: ValId) -> Option<usize> {
        self.vars[v].dom_pos.get(&val).copied()
    }

    pub fn value(&self, id: ValId) -> &Value {
        &self.values[id as usize]
    }

    pub fn value_id(&self, v: &Value) -> Option<ValId> {
        self.value_ix.get(v).copied()
    }

    pub fn int_id(&self, n: i64) -> Option<ValId> {
        self.value_id(&Value::Int(n))
    }

    pub fn as_int(&self, id: ValId) -> Option<i64> {
        match self.value(id) {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    /// Elements of a proper list value, head first; `None` for non-lists.
    pub fn list_elems(&self, id: ValId) -> Option<Vec<ValId>> {
        let mut out = Vec::new();
        let mut cur = id;
        loop {
            match self.value(cur) {
                Value::Nil => return Some(out),
                Value::Cons(h, t) => {
                    out.push(*h);
                    cur = *t;
                }
                _ => return None,
            }
        }
    }

    /// Render an interned value as source-style text.
    pub fn display_value(&self, id: ValId) -> String {
        match self.value(id) {
            Value::Int(n) => n.to_string(),
            Value::Atom(a) => a.clone(),
            Value::Nil => "[]".to_string(),
            Value::Cons(_, _) => match self.list_elems(id) {
                Some(elems) => {
                    let parts: Vec<String> =
                        elems.iter().map(|&e| self.display_value(e)).collect();
                    format!("[{}]", parts.join(","))
                }
                None => {
                    if let Value::Cons(h, t) = self.value(id) {
                        format!("[{}|{}]", self.display_value(*h), self.display_value(*t))
                    } else {
                        unreachable!()
                    }
                }
            },
            Value::Pair(a, b) => {
                format!("({},{})", self.display_value(*a), self.display_value(*b))
            }
        }
    }

    fn apply_builtin(&self, b: Builtin, args: &[ValId]) -> Option<ValId> {
        match b {
            Builtin::Plus => self.int_id(self.as_int(args[0])?.checked_add(self.as_int(args[1])?)?),
            Builtin::Minus => {
                self.int_id(self.as_int(args[0])?.checked_sub(self.as_int(args[1])?)?)
            }
            Builtin::Times => {
                self.int_id(self.as_int(args[0])?.checked_mul(self.as_int(args[1])?)?)
            }
            Builtin::Div => {
                let d = self.as_int(args[1])?;
                if d == 0 {
                    None
                } else {
                    self.int_id(self.as_int(args[0])? / d)
                }
            }
            Builtin::Abs => self.int_id(self.as_int(args[0])?.checked_abs()?),
            Builtin::Suc => self.int_id(self.as_int(args[0])?.checked_add(1)?),
            Builtin::Fact => {
                let n = self.as_int(args[0])?;
                if !(0..=20).contains(&n) {
                    return None;
                }
                let mut acc: i64 = 1;
                for k in 2..=n {
                    acc = acc.checked_mul(k)?;
                }
                self.int_id(acc)
            }
            Builtin::Len => {
                let n = self.list_elems(args[0])?.len();
                self.int_id(n as i64)
            }
            Builtin::ConsF => self.value_id(&Value::Cons(args[0], args[1])),
            Builtin::NilF => self.value_id(&Value::Nil),
        }
    }

    /// Apply a functor by name; `None` when the application is undefined
    /// (outside its table or the result is not in the value set).
    pub fn apply_functor(&self, name: &str, args: &[ValId]) -> Option<ValId> {
        if let Some(f) = self.functors.get(name) {
            if f.arity != args.len() {
                return None;
            }
            return match &f.imp {
                FunImpl::Builtin(b) => self.apply_builtin(*b, args),
                FunImpl::Table(t) => t.get(args).copied(),
            };
        }
        if args.is_empty() {
            // Unregistered arity-0 names are numerals or atoms.
            if let Ok(n) = name.parse::<i64>() {
                return self.int_id(n);
            }
            return self.value_id(&Value::Atom(name.to_string()));
        }
        None
    }

    /// Whether a functor name is registered (or denotes a literal).
    pub fn functor_arity(&self, name: &str) -> Option<usize> {
        self.functors.get(name).map(|f| f.arity)
    }
}

impl Default for Universe {
    fn default() -> Self {
        Universe::new()
    }
}

/// A sub-universe over a subset of the declared variables, enumerated in
/// mixed-radix order (first variable varies slowest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    /// Participating variables, in declaration order.
    pub vars: Vec<VarId>,
    pub dims: Vec<usize>,
    strides: Vec<usize>,
    pub size: usize,
}

impl Space {
    /// The space over a set of variables.  Errors when enumeration would
    /// exceed the universe's binding cap.
    pub fn over(u: &Universe, vars: impl IntoIterator<Item = VarId>) -> Result<Space, UniverseError> {
        let set: BTreeSet<VarId> = vars.into_iter().collect();
        let vars: Vec<VarId> = set.into_iter().collect();
        let dims: Vec<usize> = vars.iter().map(|&v| u.domain(v).len()).collect();
        let mut size: usize = 1;
        for &d in &dims {
            size = size.checked_mul(d).ok_or(UniverseError::ConfigError {
                size: usize::MAX,
                cap: u.cap,
            })?;
        }
        if size > u.cap {
            return Err(UniverseError::ConfigError { size, cap: u.cap });
        }
        let mut strides = vec![0usize; vars.len()];
        let mut acc = 1usize;
        for i in (0..vars.len()).rev() {
            strides[i] = acc;
            acc *= dims[i];
        }
        Ok(Space {
            vars,
            dims,
            strides,
            size,
        })
    }

    /// The space over every declared variable.
    pub fn full(u: &Universe) -> Result<Space, UniverseError> {
        Space::over(u, 0..u.n_vars())
    }

    /// Position of a variable within this space's axis list.
    pub fn pos(&self, v: VarId) -> Option<usize> {
        self.vars.binary_search(&v).ok()
    }

    /// Decode binding index `idx` into per-axis domain positions.
    pub fn decode(&self, idx: usize, out: &mut Vec<usize>) {
        out.clear();
        for i in 0..self.vars.len() {
            out.push((idx / self.strides[i]) % self.dims[i]);
        }
    }

    /// Decode binding index `idx` into values.
    pub fn decode_vals(&self, u: &Universe, idx: usize, out: &mut Vec<ValId>) {
        out.clear();
        for i in 0..self.vars.len() {
            let pos = (idx / self.strides[i]) % self.dims[i];
            out.push(u.domain(self.vars[i])[pos]);
        }
    }

    /// Binding index from per-axis domain positions.
    pub fn encode(&self, positions: &[usize]) -> usize {
        positions
            .iter()
            .zip(&self.strides)
            .map(|(p, s)| p * s)
            .sum()
    }

    /// The stride of the axis for variable `v`.
    pub fn stride_of(&self, v: VarId) -> Option<usize> {
        self.pos(v).map(|i| self.strides[i])
    }
}

/// A binding-in-progress: values for the variables of a space, plus a stack
/// of overrides for variables bound by quantifiers during evaluation.
pub struct BindCtx<'a> {
    pub space: &'a Space,
    pub vals: &'a [ValId],
    overrides: Vec<(VarId, ValId)>,
}

impl<'a> BindCtx<'a> {
    pub fn new(space: &'a Space, vals: &'a [ValId]) -> BindCtx<'a> {
        BindCtx {
            space,
            vals,
            overrides: Vec::new(),
        }
    }

    pub fn get(&self, v: VarId) -> Option<ValId> {
        for &(ov, oval) in self.overrides.iter().rev() {
            if ov == v {
                return Some(oval);
            }
        }
        self.space.pos(v).map(|i| self.vals[i])
    }

    pub fn push(&mut self, v: VarId, val: ValId) {
        self.overrides.push((v, val));
    }

    pub fn pop(&mut self) {
        self.overrides.pop();
    }
}

impl Universe {
    /// Evaluate a term at a binding; `None` is the undefined result.
    pub fn eval_term(&self, t: &Term, b: &mut BindCtx) -> Option<ValId> {
        match t {
            Term::Var(name) => {
                let vid = self.var_id(name).ok()?;
                b.get(vid)
            }
            Term::Fun(name, args) => {
                let mut vs = Vec::with_capacity(args.len());
                for a in args {
                    vs.push(self.eval_term(a, b)?);
                }
                self.apply_functor(name, &vs)
            }
        }
    }

    /// Three-valued predicate evaluation at a binding.  Undefinedness is
    /// strict: it propagates through every connective, and a quantified
    /// predicate is undefined if any instance of the bound variable is.
    pub fn eval_pred(&self, p: &Pred, b: &mut BindCtx) -> PredValue {
        use PredValue::*;
        match p {
            Pred::True => True,
            Pred::False => False,
            Pred::Compare(op, l, r) => {
                let (lv, rv) = match (self.eval_term(l, b), self.eval_term(r, b)) {
                    (Some(lv), Some(rv)) => (lv, rv),
                    _ => return Undefined,
                };
                let holds = match op {
                    CmpOp::Eq => lv == rv,
                    CmpOp::Ne => lv != rv,
                    _ => {
                        let (li, ri) = match (self.as_int(lv), self.as_int(rv)) {
                            (Some(li), Some(ri)) => (li, ri),
                            _ => return False,
                        };
                        match op {
                            CmpOp::Lt => li < ri,
                            CmpOp::Le => li <= ri,
                            CmpOp::Gt => li > ri,
                            CmpOp::Ge => li >= ri,
                            CmpOp::Eq | CmpOp::Ne => unreachable!(),
                        }
                    }
                };
                if holds {
                    True
                } else {
                    False
                }
            }
            Pred::Member(t, lo, hi) => {
                let (tv, lv, hv) = match (
                    self.eval_term(t, b),
                    self.eval_term(lo, b),
                    self.eval_term(hi, b),
                ) {
                    (Some(a), Some(c), Some(d)) => (a, c, d),
                    _ => return Undefined,
                };
                match (self.as_int(tv), self.as_int(lv), self.as_int(hv)) {
                    (Some(n), Some(l), Some(h)) => {
                        if l <= n && n <= h {
                            True
                        } else {
                            False
                        }
                    }
                    _ => False,
                }
            }
            Pred::Not(q) => match self.eval_pred(q, b) {
                True => False,
                False => True,
                Undefined => Undefined,
            },
            Pred::And(l, r) => match (self.eval_pred(l, b), self.eval_pred(r, b)) {
                (Undefined, _) | (_, Undefined) => Undefined,
                (True, True) => True,
                _ => False,
            },
            Pred::Or(l, r) => match (self.eval_pred(l, b), self.eval_pred(r, b)) {
                (Undefined, _) | (_, Undefined) => Undefined,
                (False, False) => False,
                _ => True,
            },
            Pred::Implies(l, r) => match (self.eval_pred(l, b), self.eval_pred(r, b)) {
                (Undefined, _) | (_, Undefined) => Undefined,
                (True, False) => False,
                _ => True,
            },
            Pred::Iff(l, r) => match (self.eval_pred(l, b), self.eval_pred(r, b)) {
                (Undefined, _) | (_, Undefined) => Undefined,
                (x, y) => {
                    if x == y {
                        True
                    } else {
                        False
                    }
                }
            },
            Pred::Exists(v, body) => self.eval_quant(v, body, b, false),
            Pred::Forall(v, body) => self.eval_quant(v, body, b, true),
            Pred::Def(q) => {
                if self.eval_pred(q, b) == Undefined {
                    False
                } else {
                    True
                }
            }
            Pred::User(name, args) => {
                let mut vs = Vec::with_capacity(args.len());
                for a in args {
                    match self.eval_term(a, b) {
                        Some(v) => vs.push(v),
                        None => return Undefined,
                    }
                }
                if self.eval_user_pred(name, &vs) {
                    True
                } else {
                    False
                }
            }
        }
    }

    fn eval_quant(&self, v: &str, body: &Pred, b: &mut BindCtx, forall: bool) -> PredValue {
        use PredValue::*;
        let vid = match self.var_id(v) {
            Ok(vid) => vid,
            Err(_) => return Undefined,
        };
        let mut any_true = false;
        let mut all_true = true;
        for i in 0..self.domain(vid).len() {
            let val = self.domain(vid)[i];
            b.push(vid, val);
            let r = self.eval_pred(body, b);
            b.pop();
            match r {
                Undefined => return Undefined,
                True => any_true = true,
                False => all_true = false,
            }
        }
        let holds = if forall { all_true } else { any_true };
        if holds {
            True
        } else {
            False
        }
    }

    /// The library predicates.  All of them are total: ill-shaped arguments
    /// make them false, never undefined.
    fn eval_user_pred(&self, name: &str, args: &[ValId]) -> bool {
        match (name, args) {
            ("nat", [x]) => matches!(self.as_int(*x), Some(n) if n >= 0),
            ("list", [l]) => self.list_elems(*l).is_some(),
            ("length", [l, n]) => match (self.list_elems(*l), self.as_int(*n)) {
                (Some(elems), Some(n)) => elems.len() as i64 == n,
                _ => false,
            },
            ("suffix", [p, s]) => {
                if self.list_elems(*p).is_none() || self.list_elems(*s).is_none() {
                    return false;
                }
                let mut cur = *s;
                loop {
                    if cur == *p {
                        return true;
                    }
                    match self.value(cur) {
                        Value::Cons(_, t) => cur = *t,
                        _ => return false,
                    }
                }
            }
            ("psoln", [s, n]) => {
                let (elems, n) = match (self.list_elems(*s), self.as_int(*n)) {
                    (Some(e), Some(n)) => (e, n),
                    _ => return false,
                };
                let mut xs = Vec::with_capacity(elems.len());
                for e in elems {
                    match self.as_int(e) {
                        Some(x) => xs.push(x),
                        None => return false,
                    }
                }
                for i in 0..xs.len() {
                    if !(1 <= xs[i] && xs[i] <= n) {
                        return false;
                    }
                    for j in i + 1..xs.len() {
                        if xs[i] == xs[j] || (j - i) as i64 == (xs[i] - xs[j]).abs() {
                            return false;
                        }
                    }
                }
                true
            }
            ("notrow", [h, t]) => match (self.as_int(*h), self.list_elems(*t)) {
                (Some(h), Some(elems)) => elems
                    .iter()
                    .all(|&e| matches!(self.as_int(e), Some(x) if x != h)),
                _ => false,
            },
            ("notdiag", [h, t]) => match (self.as_int(*h), self.list_elems(*t)) {
                (Some(h), Some(elems)) => elems.iter().enumerate().all(|(i, &e)| {
                    matches!(self.as_int(e), Some(x) if (i as i64 + 1) != (h - x).abs())
                }),
                _ => false,
            },
            ("fact", [u, v]) => match (self.as_int(*u), self.as_int(*v)) {
                (Some(u), Some(v)) => {
                    if !(0..=20).contains(&u) {
                        return false;
                    }
                    let mut acc: i64 = 1;
                    for k in 2..=u {
                        acc = match acc.checked_mul(k) {
                            Some(a) => a,
                            None => return false,
                        };
                    }
                    acc == v
                }
                _ => false,
            },
            _ => false,
        }
    }

    /// Whether a name (with arity) is one of the library predicates.
    pub fn is_user_pred(name: &str, arity: usize) -> bool {
        matches!(
            (name, arity),
            ("nat", 1)
                | ("list", 1)
                | ("length", 2)
                | ("suffix", 2)
                | ("psoln", 2)
                | ("notrow", 2)
                | ("notdiag", 2)
                | ("fact", 2)
        )
    }
}

/// A set of full bindings (states in the model).  A full binding lists one
/// value per declared variable, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    pub bindings: BTreeSet<Vec<ValId>>,
}

impl StateSet {
    pub fn empty() -> StateSet {
        StateSet {
            bindings: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl Universe {
    /// Every binding of the universe, as a state.
    pub fn all_bindings(&self) -> Result<StateSet, UniverseError> {
        let space = Space::full(self)?;
        let mut s = StateSet::empty();
        let mut vals = Vec::new();
        for idx in 0..space.size {
            space.decode_vals(self, idx, &mut vals);
            s.bindings.insert(vals.clone());
        }
        Ok(s)
    }

    /// Whether a term is defined at every binding of a state.
    pub fn term_defined(&self, t: &Term, s: &StateSet) -> Result<bool, UniverseError> {
        let space = Space::full(self)?;
        for b in &s.bindings {
            let mut ctx = BindCtx::new(&space, b);
            if self.eval_term(t, &mut ctx).is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Replace the value of `v` in every binding by the value of `t`.
    pub fn assign(&self, v: &str, t: &Term, s: &StateSet) -> Result<StateSet, UniverseError> {
        let vid = self.var_id(v)?;
        let space = Space::full(self)?;
        let mut out = StateSet::empty();
        for b in &s.bindings {
            let mut ctx = BindCtx::new(&space, b);
            let val = self
                .eval_term(t, &mut ctx)
                .ok_or_else(|| UniverseError::UndefinedTerm(format!("{:?}", t)))?;
            if self.domain_pos(vid, val).is_none() {
                return Err(UniverseError::DomainViolation {
                    var: v.to_string(),
                    value: self.display_value(val),
                });
            }
            let mut nb = b.clone();
            nb[vid] = val;
            out.bindings.insert(nb);
        }
        Ok(out)
    }

    /// Leave `v` completely unconstrained in every binding.
    pub fn unbind(&self, v: &str, s: &StateSet) -> Result<StateSet, UniverseError> {
        let vid = self.var_id(v)?;
        let mut out = StateSet::empty();
        for b in &s.bindings {
            for &x in self.domain(vid) {
                let mut nb = b.clone();
                nb[vid] = x;
                out.bindings.insert(nb);
            }
        }
        Ok(out)
    }

    /// The set of bindings at which `p` is true.
    pub fn pred_states(&self, p: &Pred) -> Result<StateSet, UniverseError> {
        let space = Space::full(self)?;
        let mut out = StateSet::empty();
        let mut vals = Vec::new();
        for idx in 0..space.size {
            space.decode_vals(self, idx, &mut vals);
            let mut ctx = BindCtx::new(&space, &vals);
            if self.eval_pred(p, &mut ctx) == PredValue::True {
                out.bindings.insert(vals.clone());
            }
        }
        Ok(out)
    }

    /// Whether every binding satisfying `p` also satisfies `q`.
    ///
    /// Computed over the joint free-variable space: predicate truth depends
    /// only on free variables, so this agrees with the full enumeration.
    pub fn entails(&self, p: &Pred, q: &Pred) -> Result<bool, UniverseError> {
        self.entails_hyp(&[], p, q)
    }

    /// Whether, at every binding where all of `ctx` and `hyp` are true, the
    /// conclusion is true.  An undefined conclusion at such a binding fails
    /// the entailment.
    pub fn entails_hyp(
        &self,
        ctx: &[Pred],
        hyp: &Pred,
        concl: &Pred,
    ) -> Result<bool, UniverseError> {
        let mut fv: BTreeSet<String> = crate::syntax::free_vars_pred(hyp);
        fv.extend(crate::syntax::free_vars_pred(concl));
        for c in ctx {
            fv.extend(crate::syntax::free_vars_pred(c));
        }
        let mut vids = BTreeSet::new();
        for name in &fv {
            vids.insert(self.var_id(name)?);
        }
        let space = Space::over(self, vids)?;
        let mut vals = Vec::new();
        for idx in 0..space.size {
            space.decode_vals(self, idx, &mut vals);
            let mut bctx = BindCtx::new(&space, &vals);
            let applicable = ctx
                .iter()
                .all(|c| self.eval_pred(c, &mut bctx) == PredValue::True)
                && self.eval_pred(hyp, &mut bctx) == PredValue::True;
            if applicable && self.eval_pred(concl, &mut bctx) != PredValue::True {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for PredValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredValue::True => write!(f, "true"),
            PredValue::False => write!(f, "false"),
            PredValue::Undefined => write!(f, "undefined"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ast::{CmpOp, Pred, Term};

    fn small() -> Universe {
        Universe::from_items(&[
            UniverseItem::ValuesInt(0, 1),
            UniverseItem::Var("X".into(), DomainSpec::IntRange(0, 1)),
            UniverseItem::Var("Y".into(), DomainSpec::IntRange(0, 1)),
            UniverseItem::FunBuiltin("div".into(), 2),
        ])
        .unwrap()
    }

    #[test]
    fn term_eval_basics() {
        let u = small();
        let space = Space::full(&u).unwrap();
        let vals = vec![u.int_id(0).unwrap(), u.int_id(1).unwrap()];
        let mut ctx = BindCtx::new(&space, &vals);
        assert_eq!(
            u.eval_term(&Term::var("X"), &mut ctx),
            Some(u.int_id(0).unwrap())
        );
        assert_eq!(u.eval_term(&Term::int(1), &mut ctx), u.int_id(1));
        // 2 is outside the value set, so the literal is undefined.
        assert_eq!(u.eval_term(&Term::int(2), &mut ctx), None);
        // div by zero is undefined.
        let d = Term::Fun("div".into(), vec![Term::int(1), Term::var("X")]);
        assert_eq!(u.eval_term(&d, &mut ctx), None);
    }

    #[test]
    fn pred_three_valued() {
        let u = small();
        let space = Space::full(&u).unwrap();
        let x0y1 = vec![u.int_id(0).unwrap(), u.int_id(1).unwrap()];
        let mut ctx = BindCtx::new(&space, &x0y1);
        let div = Term::Fun("div".into(), vec![Term::int(1), Term::var("X")]);
        let p = Pred::eq(Term::var("Y"), div);
        assert_eq!(u.eval_pred(&p, &mut ctx), PredValue::Undefined);
        // Strictness through conjunction with a false left operand.
        let q = Pred::and(Pred::False, p.clone());
        assert_eq!(u.eval_pred(&q, &mut ctx), PredValue::Undefined);
        // def recovers definedness as a total predicate.
        assert_eq!(
            u.eval_pred(&Pred::Def(Box::new(p)), &mut ctx),
            PredValue::False
        );
    }

    #[test]
    fn quantifier_strictness() {
        let u = small();
        let space = Space::full(&u).unwrap();
        let vals = vec![u.int_id(1).unwrap(), u.int_id(1).unwrap()];
        let mut ctx = BindCtx::new(&space, &vals);
        // exists X . X = Y holds (some instance matches).
        let p = Pred::Exists("X".into(), Box::new(Pred::eq(Term::var("X"), Term::var("Y"))));
        assert_eq!(u.eval_pred(&p, &mut ctx), PredValue::True);
        // exists X . Y = div(1, X) is undefined: the X=0 instance is.
        let div = Term::Fun("div".into(), vec![Term::int(1), Term::var("X")]);
        let q = Pred::Exists("X".into(), Box::new(Pred::eq(Term::var("Y"), div)));
        assert_eq!(u.eval_pred(&q, &mut ctx), PredValue::Undefined);
    }

    #[test]
    fn pred_states_and_entails() {
        let u = small();
        assert_eq!(u.pred_states(&Pred::True).unwrap().len(), 4);
        assert_eq!(u.pred_states(&Pred::False).unwrap().len(), 0);
        let xlty = Pred::Compare(CmpOp::Lt, Term::var("X"), Term::var("Y"));
        assert_eq!(u.pred_states(&xlty).unwrap().len(), 1);
        assert!(u.entails(&Pred::False, &xlty).unwrap());
        let x0 = Pred::eq(Term::var("X"), Term::int(0));
        let x1 = Pred::eq(Term::var("X"), Term::int(1));
        assert!(!u.entails(&x0, &x1).unwrap());
        assert!(u.entails(&xlty, &x0).unwrap());
    }

    #[test]
    fn assign_unbind() {
        let u = small();
        let all = u.all_bindings().unwrap();
        assert_eq!(all.len(), 4);
        let copied = u.assign("X", &Term::var("Y"), &all).unwrap();
        assert_eq!(copied.len(), 2);
        let back = u.unbind("X", &copied).unwrap();
        assert_eq!(back.len(), 4);
        // Idempotence of unbind.
        assert_eq!(u.unbind("X", &back).unwrap(), back);
        // Assigning an undefined term errors.
        let div = Term::Fun("div".into(), vec![Term::int(1), Term::var("X")]);
        assert!(matches!(
            u.assign("Y", &div, &all),
            Err(UniverseError::UndefinedTerm(_))
        ));
    }

    #[test]
    fn list_universe() {
        let u = Universe::from_items(&[
            UniverseItem::ValuesInt(-2, 4),
            UniverseItem::ValuesLists {
                maxlen: 3,
                lo: 1,
                hi: 3,
            },
            UniverseItem::Var("P".into(), DomainSpec::Lists(None)),
            UniverseItem::Var("N".into(), DomainSpec::IntRange(0, 3)),
        ])
        .unwrap();
        // 1 + 3 + 9 + 27 lists.
        let p = u.var_id("P").unwrap();
        assert_eq!(u.domain(p).len(), 40);
        // psoln examples: [1,3] is a partial solution for N=3, [1,2] is not.
        let n3 = u.int_id(3).unwrap();
        let one = u.int_id(1).unwrap();
        let two = u.int_id(2).unwrap();
        let three = u.int_id(3).unwrap();
        let nil = u.value_id(&Value::Nil).unwrap();
        let l3 = u.value_id(&Value::Cons(three, nil)).unwrap();
        let l13 = u.value_id(&Value::Cons(one, l3)).unwrap();
        let l2 = u.value_id(&Value::Cons(two, nil)).unwrap();
        let l12 = u.value_id(&Value::Cons(one, l2)).unwrap();
        assert!(u.eval_user_pred("psoln", &[l13, n3]));
        assert!(!u.eval_user_pred("psoln", &[l12, n3]));
        assert!(u.eval_user_pred("suffix", &[l3, l13]));
        assert!(!u.eval_user_pred("suffix", &[l2, l13]));
        assert!(u.eval_user_pred("length", &[l13, two]));
        assert_eq!(u.display_value(l13), "[1,3]");
    }

    #[test]
    fn cap_guardrail() {
        let mut u = small();
        u.cap = 3;
        assert!(matches!(
            Space::full(&u),
            Err(UniverseError::ConfigError { size: 4, cap: 3 })
        ));
    }
}
