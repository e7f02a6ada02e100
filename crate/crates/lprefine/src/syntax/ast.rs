//! Abstract syntax for terms, predicates, commands and programs.

/// A term: a variable reference or a functor application.  Integer literals
/// are arity-0 functor applications whose name is the numeral.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Fun(String, Vec<Term>),
}

impl Term {
    pub fn int(n: i64) -> Term {
        Term::Fun(n.to_string(), vec![])
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn nil() -> Term {
        Term::Fun("nil".into(), vec![])
    }

    pub fn cons(h: Term, t: Term) -> Term {
        Term::Fun("cons".into(), vec![h, t])
    }

    /// The numeral value when this term is an integer literal.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Fun(name, args) if args.is_empty() => name.parse().ok(),
            _ => None,
        }
    }
}

/// Comparison operators between terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn text(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// A three-valued predicate over the universe.
///
/// All connectives propagate undefinedness strictly: a predicate with an
/// undefined subterm at a binding is undefined there, and a quantified
/// predicate is undefined at a binding if any instance of the bound variable
/// makes the body undefined.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pred {
    True,
    False,
    /// `t1 op t2`; undefined when either side is undefined.
    Compare(CmpOp, Term, Term),
    /// `t in lo..hi`: membership of `t` in an inclusive integer range.
    Member(Term, Term, Term),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
    Implies(Box<Pred>, Box<Pred>),
    Iff(Box<Pred>, Box<Pred>),
    Exists(String, Box<Pred>),
    Forall(String, Box<Pred>),
    /// `def P`: true where `P` is defined (either true or false), false
    /// where `P` is undefined; always defined itself.
    Def(Box<Pred>),
    /// A library predicate such as `nat(X)` or `psoln(S, N)`.  These are
    /// total: ill-shaped arguments make them false, never undefined.
    User(String, Vec<Term>),
}

impl Pred {
    pub fn and(a: Pred, b: Pred) -> Pred {
        Pred::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Pred, b: Pred) -> Pred {
        Pred::Or(Box::new(a), Box::new(b))
    }

    pub fn eq(a: Term, b: Term) -> Pred {
        Pred::Compare(CmpOp::Eq, a, b)
    }
}

/// A wide-spectrum command.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    /// `<P>`: a specification.  Defined where `P` is defined; succeeds where
    /// `P` holds and fails elsewhere.
    Spec(Pred),
    /// `{A}`: an assumption.  Defined (and succeeding) where `A` holds.
    Assert(Pred),
    /// `c1 \/ c2`: parallel disjunction.
    POr(Box<Command>, Box<Command>),
    /// `c1 /\ c2`: parallel conjunction.
    PAnd(Box<Command>, Box<Command>),
    /// `c1 , c2`: sequential conjunction.
    SAnd(Box<Command>, Box<Command>),
    /// `exists V . c`
    Exists(String, Box<Command>),
    /// `forall V . c`
    Forall(String, Box<Command>),
    /// `p(t1, .., tn)`: a call on a parameterised command.
    Call(String, Vec<Term>),
}

impl Command {
    pub fn por(a: Command, b: Command) -> Command {
        Command::POr(Box::new(a), Box::new(b))
    }

    pub fn pand(a: Command, b: Command) -> Command {
        Command::PAnd(Box::new(a), Box::new(b))
    }

    pub fn sand(a: Command, b: Command) -> Command {
        Command::SAnd(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, c: Command) -> Command {
        Command::Exists(v.to_string(), Box::new(c))
    }

    /// `fail` is the specification of the everywhere-false predicate.
    pub fn fail() -> Command {
        Command::Spec(Pred::False)
    }

    /// `skip` is the specification of the everywhere-true predicate.
    pub fn skip() -> Command {
        Command::Spec(Pred::True)
    }

    /// `abort` is the assumption of the everywhere-false predicate: it is
    /// nowhere defined.
    pub fn abort() -> Command {
        Command::Assert(Pred::False)
    }
}

/// A parameterised command: a parameter abstraction or a recursion block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PCommand {
    /// `(V1, .., Vn . c)`
    Param(Vec<String>, Command),
    /// `re id . pc er`; calls on `id` inside `pc` are recursive.
    Rec(String, Box<PCommand>),
}

impl PCommand {
    /// The formal parameter list of the underlying abstraction.
    pub fn formals(&self) -> &[String] {
        match self {
            PCommand::Param(fs, _) => fs,
            PCommand::Rec(_, inner) => inner.formals(),
        }
    }

    /// The body of the underlying abstraction.
    pub fn body(&self) -> &Command {
        match self {
            PCommand::Param(_, c) => c,
            PCommand::Rec(_, inner) => inner.body(),
        }
    }

    /// Mutable access to the body of the underlying abstraction.
    pub fn body_mut(&mut self) -> &mut Command {
        match self {
            PCommand::Param(_, c) => c,
            PCommand::Rec(_, inner) => inner.body_mut(),
        }
    }
}

/// A value supplied for a law metavariable in a derivation step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamValue {
    Pred(Pred),
    Terms(Vec<Term>),
    Cmd(Command),
    Ident(String),
    /// A variant relation: name and the variables it observes.
    Variant(String, Vec<String>),
    Int(i64),
}

/// One step of a derivation script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub law: String,
    /// Apply an equivalence law right-to-left.
    pub rev: bool,
    pub path: Vec<usize>,
    pub params: std::collections::BTreeMap<String, ParamValue>,
}

/// Expected final program of a script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Cmd(Command),
    PCmd(PCommand),
}

/// A parsed derivation script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationScript {
    pub target: String,
    pub steps: Vec<Step>,
    pub expected: Option<Expected>,
}

/// How a declared variable ranges over the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainSpec {
    /// `var X in LO..HI`
    IntRange(i64, i64),
    /// `var P in lists [maxlen K]`; `None` uses the declared list depth.
    Lists(Option<usize>),
    /// `var X in values`: the whole value set.
    AllValues,
}

/// One clause of a `universe { .. }` block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniverseItem {
    /// `values int LO..HI;`
    ValuesInt(i64, i64),
    /// `values lists maxlen K over LO..HI;`
    ValuesLists { maxlen: usize, lo: i64, hi: i64 },
    /// `values terms depth D over { name/arity, .., LO..HI };`
    ValuesTerms {
        depth: usize,
        atoms: Vec<(String, usize)>,
        ranges: Vec<(i64, i64)>,
    },
    /// `var X in ..;`
    Var(String, DomainSpec),
    /// `fun name/arity builtin;`
    FunBuiltin(String, usize),
    /// `fun name/arity { (args) -> result; .. }`
    FunTable(String, usize, Vec<(Vec<Term>, Term)>),
}

/// A source program: universe declaration, named procedures and named goals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub universe: Vec<UniverseItem>,
    pub procs: Vec<(String, PCommand)>,
    pub goals: Vec<(String, Command)>,
}

impl Program {
    pub fn proc(&self, name: &str) -> Option<&PCommand> {
        self.procs.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn goal(&self, name: &str) -> Option<&Command> {
        self.goals.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }
}
