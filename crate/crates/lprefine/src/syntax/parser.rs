//! Recursive-descent parser for programs and derivation scripts.

use std::collections::BTreeMap;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::SyntaxError;
use crate::universe::Universe;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    pub fn new(src: &str) -> PResult<Parser> {
        let toks = lex(src).map_err(|e| SyntaxError::ParseError {
            line: e.line,
            col: e.col,
            msg: e.msg,
        })?;
        Ok(Parser { toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, off: usize) -> &Tok {
        let i = (self.pos + off).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos.min(self.toks.len() - 1)];
        Err(SyntaxError::ParseError {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: &Tok) -> PResult<()> {
        if self.peek() == tok {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected `{}`, found `{}`", tok, self.peek()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(format!("expected `{}`, found `{}`", kw, self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            t => self.err(format!("expected identifier, found `{}`", t)),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = if *self.peek() == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(if neg { -n } else { n })
            }
            t => self.err(format!("expected integer, found `{}`", t)),
        }
    }

    fn usize_lit(&mut self) -> PResult<usize> {
        let n = self.int()?;
        if n < 0 {
            return self.err("expected a non-negative integer");
        }
        Ok(n as usize)
    }

    // ----- terms -----

    fn starts_term(t: &Tok) -> bool {
        matches!(
            t,
            Tok::Ident(_) | Tok::Int(_) | Tok::LBracket | Tok::LParen | Tok::Minus
        )
    }

    pub fn term(&mut self) -> PResult<Term> {
        let mut t = self.term_mul()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    let r = self.term_mul()?;
                    t = Term::Fun("plus".into(), vec![t, r]);
                }
                Tok::Minus => {
                    self.next();
                    let r = self.term_mul()?;
                    t = Term::Fun("minus".into(), vec![t, r]);
                }
                _ => return Ok(t),
            }
        }
    }

    fn term_mul(&mut self) -> PResult<Term> {
        let mut t = self.term_prim()?;
        while *self.peek() == Tok::Star {
            self.next();
            let r = self.term_prim()?;
            t = Term::Fun("times".into(), vec![t, r]);
        }
        Ok(t)
    }

    fn term_prim(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(Term::int(n))
            }
            Tok::Minus => {
                self.next();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        self.next();
                        Ok(Term::int(-n))
                    }
                    _ => self.err("expected integer after unary `-`"),
                }
            }
            Tok::Ident(name) => {
                self.next();
                if *self.peek() == Tok::LParen {
                    self.next();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        args.push(self.term()?);
                        while *self.peek() == Tok::Comma {
                            self.next();
                            args.push(self.term()?);
                        }
                    }
                    self.expect(&Tok::RParen)?;
                    Ok(Term::Fun(name, args))
                } else {
                    // Lowercase-initial zero-arg names are functors/atoms;
                    // everything else is a variable reference.
                    if name.chars().next().is_some_and(|c| c.is_lowercase()) {
                        Ok(Term::Fun(name, vec![]))
                    } else {
                        Ok(Term::Var(name))
                    }
                }
            }
            Tok::LBracket => {
                self.next();
                self.list_tail()
            }
            Tok::LParen => {
                self.next();
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            t => self.err(format!("expected term, found `{}`", t)),
        }
    }

    fn list_tail(&mut self) -> PResult<Term> {
        if *self.peek() == Tok::RBracket {
            self.next();
            return Ok(Term::nil());
        }
        let mut elems = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.next();
            elems.push(self.term()?);
        }
        let tail = if *self.peek() == Tok::Bar {
            self.next();
            self.term()?
        } else {
            Term::nil()
        };
        self.expect(&Tok::RBracket)?;
        Ok(elems
            .into_iter()
            .rev()
            .fold(tail, |acc, e| Term::cons(e, acc)))
    }

    // ----- predicates -----

    pub fn pred(&mut self) -> PResult<Pred> {
        let l = self.pred_implies()?;
        if *self.peek() == Tok::Iff {
            self.next();
            let r = self.pred_implies()?;
            Ok(Pred::Iff(Box::new(l), Box::new(r)))
        } else {
            Ok(l)
        }
    }

    fn pred_implies(&mut self) -> PResult<Pred> {
        let l = self.pred_or()?;
        if *self.peek() == Tok::Implies {
            self.next();
            let r = self.pred_implies()?;
            Ok(Pred::Implies(Box::new(l), Box::new(r)))
        } else {
            Ok(l)
        }
    }

    fn pred_or(&mut self) -> PResult<Pred> {
        let l = self.pred_and()?;
        if *self.peek() == Tok::OrOp {
            self.next();
            let r = self.pred_or()?;
            Ok(Pred::Or(Box::new(l), Box::new(r)))
        } else {
            Ok(l)
        }
    }

    fn pred_and(&mut self) -> PResult<Pred> {
        let l = self.pred_unary()?;
        if *self.peek() == Tok::AndOp {
            self.next();
            let r = self.pred_and()?;
            Ok(Pred::And(Box::new(l), Box::new(r)))
        } else {
            Ok(l)
        }
    }

    fn pred_unary(&mut self) -> PResult<Pred> {
        if self.is_kw("not") {
            self.next();
            let p = self.pred_unary()?;
            return Ok(Pred::Not(Box::new(p)));
        }
        if self.is_kw("exists") || self.is_kw("forall") {
            let forall = self.is_kw("forall");
            self.next();
            let mut vars = vec![self.ident()?];
            while *self.peek() == Tok::Comma {
                self.next();
                vars.push(self.ident()?);
            }
            self.expect(&Tok::Dot)?;
            let body = self.pred()?;
            return Ok(vars.into_iter().rev().fold(body, |acc, v| {
                if forall {
                    Pred::Forall(v, Box::new(acc))
                } else {
                    Pred::Exists(v, Box::new(acc))
                }
            }));
        }
        self.pred_atom()
    }

    fn pred_atom(&mut self) -> PResult<Pred> {
        if self.is_kw("true") {
            self.next();
            return Ok(Pred::True);
        }
        if self.is_kw("false") {
            self.next();
            return Ok(Pred::False);
        }
        if self.is_kw("def") && *self.peek_at(1) == Tok::LParen {
            self.next();
            self.next();
            let p = self.pred()?;
            self.expect(&Tok::RParen)?;
            return Ok(Pred::Def(Box::new(p)));
        }
        // A parenthesised predicate, or a relational atom over terms.  Try
        // the predicate reading first and fall back to the term reading.
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            self.next();
            if let Ok(p) = self.pred() {
                if *self.peek() == Tok::RParen {
                    self.next();
                    return Ok(p);
                }
            }
            self.pos = save;
        }
        let lhs = self.term()?;
        let op = match self.peek() {
            Tok::Eq => Some(CmpOp::Eq),
            Tok::Ne => Some(CmpOp::Ne),
            Tok::Le => Some(CmpOp::Le),
            Tok::Ge => Some(CmpOp::Ge),
            Tok::LAngle => Some(CmpOp::Lt),
            // `>` closes a spec bracket unless a term follows it.
            Tok::RAngle if Self::starts_term(self.peek_at(1)) => Some(CmpOp::Gt),
            _ => None,
        };
        if let Some(op) = op {
            self.next();
            let rhs = self.term()?;
            return Ok(Pred::Compare(op, lhs, rhs));
        }
        if self.is_kw("in") {
            self.next();
            let lo = self.term()?;
            self.expect(&Tok::DotDot)?;
            let hi = self.term()?;
            return Ok(Pred::Member(lhs, lo, hi));
        }
        match lhs {
            Term::Fun(name, args) if !args.is_empty() => {
                if Universe::is_user_pred(&name, args.len()) {
                    Ok(Pred::User(name, args))
                } else {
                    self.err(format!("`{}` is not a library predicate", name))
                }
            }
            _ => self.err("expected a comparison, range membership or library predicate"),
        }
    }

    // ----- commands -----

    pub fn command(&mut self) -> PResult<Command> {
        let l = self.command_and()?;
        if *self.peek() == Tok::OrOp {
            self.next();
            let r = self.command()?;
            Ok(Command::por(l, r))
        } else {
            Ok(l)
        }
    }

    fn command_and(&mut self) -> PResult<Command> {
        let l = self.command_seq()?;
        if *self.peek() == Tok::AndOp {
            self.next();
            let r = self.command_and()?;
            Ok(Command::pand(l, r))
        } else {
            Ok(l)
        }
    }

    fn command_seq(&mut self) -> PResult<Command> {
        let l = self.command_prim()?;
        if *self.peek() == Tok::Comma {
            self.next();
            let r = self.command_seq()?;
            Ok(Command::sand(l, r))
        } else {
            Ok(l)
        }
    }

    fn command_prim(&mut self) -> PResult<Command> {
        if self.eat_kw("skip") {
            return Ok(Command::skip());
        }
        if self.eat_kw("fail") {
            return Ok(Command::fail());
        }
        if self.eat_kw("abort") {
            return Ok(Command::abort());
        }
        if self.is_kw("exists") || self.is_kw("forall") {
            let forall = self.is_kw("forall");
            self.next();
            let mut vars = vec![self.ident()?];
            while *self.peek() == Tok::Comma {
                self.next();
                vars.push(self.ident()?);
            }
            self.expect(&Tok::Dot)?;
            let body = self.command()?;
            return Ok(vars.into_iter().rev().fold(body, |acc, v| {
                if forall {
                    Command::Forall(v, Box::new(acc))
                } else {
                    Command::Exists(v, Box::new(acc))
                }
            }));
        }
        match self.peek().clone() {
            Tok::LAngle => {
                self.next();
                let p = self.pred()?;
                self.expect(&Tok::RAngle)?;
                Ok(Command::Spec(p))
            }
            Tok::LBrace => {
                self.next();
                let p = self.pred()?;
                self.expect(&Tok::RBrace)?;
                Ok(Command::Assert(p))
            }
            Tok::Ident(name) => {
                self.next();
                self.expect(&Tok::LParen)?;
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    args.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.next();
                        args.push(self.term()?);
                    }
                }
                self.expect(&Tok::RParen)?;
                Ok(Command::Call(name, args))
            }
            Tok::LParen => {
                self.next();
                let c = self.command()?;
                self.expect(&Tok::RParen)?;
                Ok(c)
            }
            t => self.err(format!("expected command, found `{}`", t)),
        }
    }

    /// Detect `( V1, .., Vn .` ahead, the start of a parameter abstraction.
    fn at_param(&self) -> bool {
        if *self.peek() != Tok::LParen {
            return false;
        }
        let mut off = 1;
        loop {
            match self.peek_at(off) {
                Tok::Ident(_) => {}
                _ => return false,
            }
            off += 1;
            match self.peek_at(off) {
                Tok::Dot => return true,
                Tok::Comma => off += 1,
                _ => return false,
            }
        }
    }

    pub fn pcommand(&mut self) -> PResult<PCommand> {
        if self.eat_kw("re") {
            let id = self.ident()?;
            self.expect(&Tok::Dot)?;
            let inner = self.pcommand()?;
            self.expect_kw("er")?;
            return Ok(PCommand::Rec(id, Box::new(inner)));
        }
        if !self.at_param() {
            return self.err("expected a parameter abstraction `(V1, .., Vn . c)`");
        }
        self.expect(&Tok::LParen)?;
        let mut formals = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.next();
            formals.push(self.ident()?);
        }
        self.expect(&Tok::Dot)?;
        let body = self.command()?;
        self.expect(&Tok::RParen)?;
        for i in 0..formals.len() {
            if formals[i + 1..].contains(&formals[i]) {
                return Err(SyntaxError::DuplicateFormal(formals[i].clone()));
            }
        }
        Ok(PCommand::Param(formals, body))
    }

    // ----- universe declarations -----

    fn universe_block(&mut self) -> PResult<Vec<UniverseItem>> {
        self.expect_kw("universe")?;
        self.expect(&Tok::LBrace)?;
        let mut items = Vec::new();
        while *self.peek() != Tok::RBrace {
            items.extend(self.universe_item()?);
        }
        self.expect(&Tok::RBrace)?;
        Ok(items)
    }

    fn universe_item(&mut self) -> PResult<Vec<UniverseItem>> {
        if self.eat_kw("values") {
            if self.eat_kw("int") {
                let lo = self.int()?;
                self.expect(&Tok::DotDot)?;
                let hi = self.int()?;
                self.expect(&Tok::Semi)?;
                return Ok(vec![UniverseItem::ValuesInt(lo, hi)]);
            }
            if self.eat_kw("lists") {
                self.expect_kw("maxlen")?;
                let maxlen = self.usize_lit()?;
                self.expect_kw("over")?;
                let lo = self.int()?;
                self.expect(&Tok::DotDot)?;
                let hi = self.int()?;
                self.expect(&Tok::Semi)?;
                return Ok(vec![UniverseItem::ValuesLists { maxlen, lo, hi }]);
            }
            if self.eat_kw("terms") {
                self.expect_kw("depth")?;
                let depth = self.usize_lit()?;
                self.expect_kw("over")?;
                self.expect(&Tok::LBrace)?;
                let mut atoms = Vec::new();
                let mut ranges = Vec::new();
                loop {
                    match self.peek().clone() {
                        Tok::Ident(name) => {
                            self.next();
                            self.expect(&Tok::Slash)?;
                            let arity = self.usize_lit()?;
                            atoms.push((name, arity));
                        }
                        _ => {
                            let lo = self.int()?;
                            self.expect(&Tok::DotDot)?;
                            let hi = self.int()?;
                            ranges.push((lo, hi));
                        }
                    }
                    if *self.peek() == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.expect(&Tok::RBrace)?;
                self.expect(&Tok::Semi)?;
                return Ok(vec![UniverseItem::ValuesTerms {
                    depth,
                    atoms,
                    ranges,
                }]);
            }
            return self.err("expected `int`, `lists` or `terms` after `values`");
        }
        if self.eat_kw("var") {
            let mut names = vec![self.ident()?];
            while *self.peek() == Tok::Comma {
                self.next();
                names.push(self.ident()?);
            }
            self.expect_kw("in")?;
            let spec = if self.eat_kw("lists") {
                if self.eat_kw("maxlen") {
                    DomainSpec::Lists(Some(self.usize_lit()?))
                } else {
                    DomainSpec::Lists(None)
                }
            } else if self.eat_kw("values") {
                DomainSpec::AllValues
            } else {
                let lo = self.int()?;
                self.expect(&Tok::DotDot)?;
                let hi = self.int()?;
                DomainSpec::IntRange(lo, hi)
            };
            self.expect(&Tok::Semi)?;
            return Ok(names
                .into_iter()
                .map(|n| UniverseItem::Var(n, spec.clone()))
                .collect());
        }
        if self.eat_kw("fun") {
            let name = self.ident()?;
            self.expect(&Tok::Slash)?;
            let arity = self.usize_lit()?;
            if self.eat_kw("builtin") {
                self.expect(&Tok::Semi)?;
                return Ok(vec![UniverseItem::FunBuiltin(name, arity)]);
            }
            self.expect(&Tok::LBrace)?;
            let mut rows = Vec::new();
            while *self.peek() != Tok::RBrace {
                self.expect(&Tok::LParen)?;
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    args.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.next();
                        args.push(self.term()?);
                    }
                }
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Arrow)?;
                let result = self.term()?;
                self.expect(&Tok::Semi)?;
                rows.push((args, result));
            }
            self.expect(&Tok::RBrace)?;
            return Ok(vec![UniverseItem::FunTable(name, arity, rows)]);
        }
        self.err("expected `values`, `var` or `fun` in universe block")
    }

    // ----- programs -----

    pub fn program(&mut self) -> PResult<Program> {
        let universe = if self.is_kw("universe") {
            self.universe_block()?
        } else {
            Vec::new()
        };
        let mut procs: Vec<(String, PCommand)> = Vec::new();
        let mut goals = Vec::new();
        loop {
            if self.eat_kw("proc") {
                let name = self.ident()?;
                if procs.iter().any(|(n, _)| *n == name) {
                    return Err(SyntaxError::DuplicateProc(name));
                }
                self.expect(&Tok::Eq)?;
                let pc = self.pcommand()?;
                self.expect(&Tok::Semi)?;
                let fv = super::free_vars_command(pc.body());
                for v in &fv {
                    if !pc.formals().contains(v) {
                        return Err(SyntaxError::FreeVarError {
                            var: v.clone(),
                            proc: name,
                        });
                    }
                }
                procs.push((name, pc));
            } else if self.eat_kw("goal") {
                let name = self.ident()?;
                self.expect(&Tok::Eq)?;
                let c = self.command()?;
                self.expect(&Tok::Semi)?;
                goals.push((name, c));
            } else if *self.peek() == Tok::Eof {
                break;
            } else {
                return self.err(format!(
                    "expected `proc`, `goal` or end of input, found `{}`",
                    self.peek()
                ));
            }
        }
        Ok(Program {
            universe,
            procs,
            goals,
        })
    }

    // ----- derivation scripts -----

    fn param_value(&mut self, key: &str) -> PResult<ParamValue> {
        match key {
            "P" | "Q" | "A" | "B" | "I" | "pred" => {
                self.expect(&Tok::LAngle)?;
                let p = self.pred()?;
                self.expect(&Tok::RAngle)?;
                Ok(ParamValue::Pred(p))
            }
            "args" => {
                self.expect(&Tok::LParen)?;
                let mut ts = Vec::new();
                if *self.peek() != Tok::RParen {
                    ts.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.next();
                        ts.push(self.term()?);
                    }
                }
                self.expect(&Tok::RParen)?;
                Ok(ParamValue::Terms(ts))
            }
            "c" | "cmd" => {
                self.expect(&Tok::LParen)?;
                let c = self.command()?;
                self.expect(&Tok::RParen)?;
                Ok(ParamValue::Cmd(c))
            }
            "proc" | "id" | "X" => Ok(ParamValue::Ident(self.ident()?)),
            "variant" => {
                let name = self.ident()?;
                self.expect(&Tok::LParen)?;
                let mut vars = vec![self.ident()?];
                while *self.peek() == Tok::Comma {
                    self.next();
                    vars.push(self.ident()?);
                }
                self.expect(&Tok::RParen)?;
                Ok(ParamValue::Variant(name, vars))
            }
            "start" => Ok(ParamValue::Int(self.int()?)),
            _ => self.err(format!("unknown step parameter `{}`", key)),
        }
    }

    pub fn derivation(&mut self) -> PResult<DerivationScript> {
        self.expect_kw("target")?;
        let target = self.ident()?;
        self.expect(&Tok::Semi)?;
        let mut steps = Vec::new();
        while self.eat_kw("step") {
            let law = self.ident()?;
            let rev = self.eat_kw("rev");
            let mut path = Vec::new();
            if self.eat_kw("at") {
                self.expect(&Tok::LBracket)?;
                if *self.peek() != Tok::RBracket {
                    path.push(self.usize_lit()?);
                    while *self.peek() == Tok::Comma {
                        self.next();
                        path.push(self.usize_lit()?);
                    }
                }
                self.expect(&Tok::RBracket)?;
            }
            let mut params = BTreeMap::new();
            if self.eat_kw("with") {
                loop {
                    let key = self.ident()?;
                    self.expect(&Tok::Eq)?;
                    let v = self.param_value(&key)?;
                    params.insert(key, v);
                    if *self.peek() == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.expect(&Tok::Semi)?;
            steps.push(Step {
                law,
                rev,
                path,
                params,
            });
        }
        let expected = if self.eat_kw("expect") {
            let e = if self.is_kw("re") || self.at_param() {
                Expected::PCmd(self.pcommand()?)
            } else {
                Expected::Cmd(self.command()?)
            };
            self.expect(&Tok::Semi)?;
            Some(e)
        } else {
            None
        };
        if *self.peek() != Tok::Eof {
            return self.err(format!("unexpected `{}`", self.peek()));
        }
        if steps.is_empty() {
            return self.err("derivation script has no steps");
        }
        Ok(DerivationScript {
            target,
            steps,
            expected,
        })
    }
}

/// Parse a `.wsl` program.
pub fn parse_program(src: &str) -> PResult<Program> {
    Parser::new(src)?.program()
}

/// Parse a `.wsd` derivation script.
pub fn parse_derivation(src: &str) -> PResult<DerivationScript> {
    Parser::new(src)?.derivation()
}

/// Parse a single command (used by tests and the book).
pub fn parse_command(src: &str) -> PResult<Command> {
    let mut p = Parser::new(src)?;
    let c = p.command()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected `{}`", p.peek()));
    }
    Ok(c)
}

/// Parse a single predicate.
pub fn parse_pred(src: &str) -> PResult<Pred> {
    let mut p = Parser::new(src)?;
    let q = p.pred()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected `{}`", p.peek()));
    }
    Ok(q)
}
