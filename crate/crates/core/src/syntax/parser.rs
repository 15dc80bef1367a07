//! Precedence-climbing parser producing a raw tree, followed by type
//! inference over type variables and conversion to de Bruijn terms.

use std::collections::{BTreeMap, HashMap};

use super::lexer::{Tok, Token};
use super::{ParseCtx, Syntax};
use crate::error::{Error, Result};
use crate::term::{Name, Term, Type, ALL, EQ};
use crate::theory::Fixity;

#[derive(Clone, Debug)]
pub(crate) enum Raw {
    Id(String, usize),
    SVar(String, u32, usize),
    App(Box<Raw>, Vec<Raw>, usize),
    /// `%` when `binder` is `None`.
    Bind {
        binder: Option<String>,
        vars: Vec<(String, Option<Type>, usize)>,
        body: Box<Raw>,
        pos: usize,
    },
    Annot(Box<Raw>, Type, usize),
}

pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    i: usize,
    syn: &'a Syntax,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Assoc {
    Left,
    Right,
    Non,
}

impl<'a> Parser<'a> {
    pub fn new(toks: &'a [Token], syn: &'a Syntax) -> Self {
        Parser { toks, i: 0, syn }
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.i + 1).min(self.toks.len() - 1)].tok
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    pub fn unexpected<T>(&self, what: &str) -> Result<T> {
        let t = self.peek();
        let found = match &t.tok {
            Tok::Ident(s) | Tok::Sym(s) => format!("'{s}'"),
            Tok::Var(n, 0) => format!("'?{n}'"),
            Tok::Var(n, i) => format!("'?{n}.{i}'"),
            Tok::Num(n) => n.to_string(),
            Tok::Str(_) => "a string".into(),
            Tok::Eof => "end of input".into(),
        };
        Err(Error::parse(t.pos, format!("expected {what}, found {found}")))
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if x == s)
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<usize> {
        if self.is_sym(s) {
            Ok(self.bump().pos)
        } else {
            self.unexpected(&format!("'{s}'"))
        }
    }

    pub fn expect_eof(&self) -> Result<()> {
        match self.peek().tok {
            Tok::Eof => Ok(()),
            _ => self.unexpected("end of input"),
        }
    }

    fn op_name(&self) -> Option<&str> {
        match &self.peek().tok {
            Tok::Ident(s) | Tok::Sym(s) => Some(s),
            _ => None,
        }
    }

    fn infix(&self) -> Option<(String, u32, Assoc)> {
        let name = self.op_name()?;
        let (p, a) = match self.syn.fixity(name)? {
            Fixity::Infixl(p) => (p, Assoc::Left),
            Fixity::Infixr(p) => (p, Assoc::Right),
            Fixity::Infix(p) => (p, Assoc::Non),
            _ => return None,
        };
        Some((name.to_string(), p, a))
    }

    pub fn term(&mut self, min: u32) -> Result<Raw> {
        let mut lhs = self.prefix()?;
        let mut last_non: Option<u32> = None;
        while let Some((op, p, assoc)) = self.infix() {
            if p < min {
                break;
            }
            if last_non == Some(p) && assoc == Assoc::Non {
                return Err(Error::parse(self.peek().pos, format!("operator '{op}' is not associative")));
            }
            let pos = self.bump().pos;
            let rhs = self.term(if assoc == Assoc::Right { p } else { p + 1 })?;
            lhs = Raw::App(Box::new(Raw::Id(op, pos)), vec![lhs, rhs], pos);
            last_non = (assoc == Assoc::Non).then_some(p);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Raw> {
        let pos = self.peek().pos;
        if self.is_sym("%") {
            self.bump();
            let vars = self.binder_vars()?;
            let body = self.term(0)?;
            return Ok(Raw::Bind { binder: None, vars, body: Box::new(body), pos });
        }
        if let Some(name) = self.op_name() {
            let is_binder = self.syn.fixity(name) == Some(Fixity::Binder);
            if is_binder && !matches!(self.peek2(), Tok::Sym(p) if p == "(") {
                let name = name.to_string();
                self.bump();
                let vars = self.binder_vars()?;
                let body = self.term(0)?;
                return Ok(Raw::Bind { binder: Some(name), vars, body: Box::new(body), pos });
            }
        }
        self.application()
    }

    fn binder_vars(&mut self) -> Result<Vec<(String, Option<Type>, usize)>> {
        let mut vars = Vec::new();
        while let Tok::Ident(x) = &self.peek().tok {
            let x = x.clone();
            let pos = self.bump().pos;
            let ty = if self.is_sym("::") {
                self.bump();
                Some(self.typ()?)
            } else {
                None
            };
            vars.push((x, ty, pos));
        }
        if vars.is_empty() {
            return self.unexpected("a bound variable");
        }
        self.expect_sym(".")?;
        Ok(vars)
    }

    fn application(&mut self) -> Result<Raw> {
        let pos = self.peek().pos;
        let mut t = self.atom()?;
        while self.is_sym("(") {
            self.bump();
            let mut args = vec![self.term(0)?];
            while self.is_sym(",") {
                self.bump();
                args.push(self.term(0)?);
            }
            self.expect_sym(")")?;
            t = Raw::App(Box::new(t), args, pos);
        }
        if self.is_sym("::") {
            let apos = self.bump().pos;
            let ty = self.typ()?;
            t = Raw::Annot(Box::new(t), ty, apos);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Raw> {
        let pos = self.peek().pos;
        match self.peek().tok.clone() {
            Tok::Sym(s) if s == "(" => {
                self.bump();
                let t = self.term(0)?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Var(n, i) => {
                self.bump();
                Ok(Raw::SVar(n, i, pos))
            }
            Tok::Ident(s) | Tok::Sym(s) if self.atom_name_ok(&s) => {
                self.bump();
                Ok(Raw::Id(s, pos))
            }
            _ => self.unexpected("a term"),
        }
    }

    fn atom_name_ok(&self, s: &str) -> bool {
        match self.syn.fixity(s) {
            Some(Fixity::Infixl(_) | Fixity::Infixr(_) | Fixity::Infix(_)) => false,
            // a bare binder is only meaningful when applied
            Some(Fixity::Binder) => matches!(self.peek2(), Tok::Sym(p) if p == "("),
            Some(Fixity::Prefix) => true,
            None => !super::lexer::FIXED_SYMBOLS.contains(&s) && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_'),
        }
    }

    pub fn typ(&mut self) -> Result<Type> {
        let dom = match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.bump();
                Type::base(&s)
            }
            Tok::Sym(s) if s == "(" => {
                self.bump();
                let t = self.typ()?;
                self.expect_sym(")")?;
                t
            }
            _ => return self.unexpected("a type"),
        };
        if self.is_sym("=>") {
            self.bump();
            Ok(Type::fun(dom, self.typ()?))
        } else {
            Ok(dom)
        }
    }
}

// ---------------------------------------------------------------------------
// type inference

#[derive(Clone, Debug, PartialEq, Eq)]
enum Ty {
    V(u32),
    B(Name),
    F(Box<Ty>, Box<Ty>),
}

impl Ty {
    fn of(t: &Type, poly: Option<&Ty>) -> Ty {
        match t {
            Type::Base(b) if &**b == "'a" && poly.is_some() => poly.unwrap().clone(),
            Type::Base(b) => Ty::B(b.clone()),
            Type::Fun(a, b) => Ty::F(Box::new(Ty::of(a, poly)), Box::new(Ty::of(b, poly))),
        }
    }
}

enum E {
    Const(Name, Ty),
    Free(Name, Ty),
    Var(Name, u32, Ty),
    Bound(u32),
    Abs(Name, Ty, Box<E>),
    App(Box<E>, Box<E>),
}

struct Infer<'a> {
    syn: &'a Syntax,
    subst: HashMap<u32, Ty>,
    next: u32,
    frees: BTreeMap<Name, Ty>,
    vars: BTreeMap<(Name, u32), Ty>,
    /// For error messages: variable -> name of what it types.
    origin: HashMap<u32, String>,
}

impl Infer<'_> {
    fn fresh(&mut self, what: &str) -> Ty {
        let v = self.next;
        self.next += 1;
        self.origin.insert(v, what.to_string());
        Ty::V(v)
    }

    fn shallow(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::V(v) = t {
            match self.subst.get(&v) {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: u32, t: &Ty) -> bool {
        match self.shallow(t) {
            Ty::V(w) => v == w,
            Ty::B(_) => false,
            Ty::F(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (a, b) {
            (Ty::V(v), Ty::V(w)) if v == w => true,
            (Ty::V(v), t) | (t, Ty::V(v)) => {
                if self.occurs(v, &t) {
                    return false;
                }
                self.subst.insert(v, t);
                true
            }
            (Ty::B(x), Ty::B(y)) => x == y,
            (Ty::F(a1, b1), Ty::F(a2, b2)) => self.unify(&a1, &a2) && self.unify(&b1, &b2),
            _ => false,
        }
    }

    fn zonk(&self, t: &Ty) -> std::result::Result<Type, u32> {
        match self.shallow(t) {
            Ty::V(v) => Err(v),
            Ty::B(b) => Ok(Type::Base(b)),
            Ty::F(a, b) => Ok(Type::fun(self.zonk(&a)?, self.zonk(&b)?)),
        }
    }

    fn show(&self, t: &Ty) -> String {
        match self.shallow(t) {
            Ty::V(v) => format!("'t{v}"),
            Ty::B(b) => b.to_string(),
            Ty::F(a, b) => {
                let a = match self.shallow(&a) {
                    f @ Ty::F(..) => format!("({})", self.show(&f)),
                    other => self.show(&other),
                };
                format!("{a} => {}", self.show(&b))
            }
        }
    }

    fn mismatch(&self, pos: usize, expected: &Ty, found: &Ty) -> Error {
        Error::IllTyped(format!(
            "type mismatch at offset {pos}: expected {}, found {}",
            self.show(expected),
            self.show(found)
        ))
    }

    fn ident(&mut self, name: &str, scope: &[(String, Ty)]) -> (E, Ty) {
        if let Some(k) = scope.iter().rev().position(|(n, _)| n == name) {
            let ty = scope[scope.len() - 1 - k].1.clone();
            return (E::Bound(k as u32), ty);
        }
        if let Some(decl) = self.syn.consts.get(name) {
            let ty = if name == ALL || name == EQ {
                let a = self.fresh(name);
                Ty::of(&decl.ty, Some(&a))
            } else {
                Ty::of(&decl.ty, None)
            };
            return (E::Const(name.into(), ty.clone()), ty);
        }
        let key: Name = name.into();
        let ty = match self.frees.get(&key) {
            Some(t) => t.clone(),
            None => {
                let t = self.fresh(name);
                self.frees.insert(key.clone(), t.clone());
                t
            }
        };
        (E::Free(key, ty.clone()), ty)
    }

    fn infer(&mut self, r: &Raw, scope: &mut Vec<(String, Ty)>) -> Result<(E, Ty)> {
        match r {
            Raw::Id(n, _) => Ok(self.ident(n, scope)),
            Raw::SVar(n, i, _) => {
                let key = (Name::from(n.as_str()), *i);
                let ty = match self.vars.get(&key) {
                    Some(t) => t.clone(),
                    None => {
                        let t = self.fresh(&if *i == 0 { format!("?{n}") } else { format!("?{n}.{i}") });
                        self.vars.insert(key.clone(), t.clone());
                        t
                    }
                };
                Ok((E::Var(key.0, *i, ty.clone()), ty))
            }
            Raw::App(f, args, pos) => {
                let (mut e, mut ft) = self.infer(f, scope)?;
                for a in args {
                    let (ea, at) = self.infer(a, scope)?;
                    let res = self.fresh("application");
                    let want = Ty::F(Box::new(at.clone()), Box::new(res.clone()));
                    if !self.unify(&ft, &want) {
                        let apos = raw_pos(a);
                        return Err(match self.shallow(&ft) {
                            Ty::F(dom, _) => self.mismatch(apos, &dom, &at),
                            other => Error::IllTyped(format!(
                                "at offset {pos}: {} is not a function",
                                self.show(&other)
                            )),
                        });
                    }
                    e = E::App(Box::new(e), Box::new(ea));
                    ft = res;
                }
                Ok((e, ft))
            }
            Raw::Annot(t, ty, pos) => {
                let (e, found) = self.infer(t, scope)?;
                let want = Ty::of(ty, None);
                if !self.unify(&found, &want) {
                    return Err(self.mismatch(*pos, &want, &found));
                }
                Ok((e, found))
            }
            Raw::Bind { binder, vars, body, pos } => {
                let depth = scope.len();
                let mut tys = Vec::new();
                for (x, ann, _) in vars {
                    let t = match ann {
                        Some(ty) => Ty::of(ty, None),
                        None => self.fresh(x),
                    };
                    tys.push(t.clone());
                    scope.push((x.clone(), t));
                }
                let res = self.infer(body, scope);
                scope.truncate(depth);
                let (mut e, mut ty) = res?;
                for ((x, _, _), xt) in vars.iter().zip(tys).rev() {
                    e = E::Abs(x.as_str().into(), xt.clone(), Box::new(e));
                    let lam = Ty::F(Box::new(xt), Box::new(ty));
                    ty = match binder {
                        None => lam,
                        Some(b) => {
                            let (c, bt) = self.ident(b, &[]);
                            let res = self.fresh(b);
                            if !self.unify(&bt, &Ty::F(Box::new(lam.clone()), Box::new(res.clone()))) {
                                return Err(match self.shallow(&bt) {
                                    Ty::F(dom, _) => self.mismatch(*pos, &dom, &lam),
                                    other => self.mismatch(*pos, &other, &lam),
                                });
                            }
                            e = E::App(Box::new(c), Box::new(e));
                            res
                        }
                    };
                }
                Ok((e, ty))
            }
        }
    }

    fn finish(&self, e: &E) -> Result<Term> {
        let z = |t: &Ty| {
            self.zonk(t).map_err(|v| {
                let what = self.origin.get(&v).cloned().unwrap_or_default();
                Error::IllTyped(format!("cannot infer the type of {what}; add a type annotation"))
            })
        };
        Ok(match e {
            E::Const(n, t) => Term::Const(n.clone(), z(t)?),
            E::Free(n, t) => Term::Free(n.clone(), z(t)?),
            E::Var(n, i, t) => Term::var(n, *i, z(t)?),
            E::Bound(i) => Term::Bound(*i),
            E::Abs(n, t, b) => Term::abs(n, z(t)?, self.finish(b)?),
            E::App(f, a) => Term::app(self.finish(f)?, self.finish(a)?),
        })
    }
}

fn raw_pos(r: &Raw) -> usize {
    match r {
        Raw::Id(_, p) | Raw::SVar(_, _, p) | Raw::App(_, _, p) | Raw::Annot(_, _, p) => *p,
        Raw::Bind { pos, .. } => *pos,
    }
}

/// Infer types for `raw`, optionally requiring the result type `want`.
pub(crate) fn elaborate(syn: &Syntax, raw: &Raw, ctx: &ParseCtx, want: Option<&Type>) -> Result<Term> {
    let mut inf = Infer {
        syn,
        subst: HashMap::new(),
        next: 0,
        frees: ctx.frees.iter().map(|(n, t)| (n.clone(), Ty::of(t, None))).collect(),
        vars: ctx.vars.iter().map(|(k, t)| (k.clone(), Ty::of(t, None))).collect(),
        origin: HashMap::new(),
    };
    let (e, ty) = inf.infer(raw, &mut Vec::new())?;
    if let Some(w) = want {
        let w = Ty::of(w, None);
        if !inf.unify(&ty, &w) {
            return Err(inf.mismatch(raw_pos(raw), &w, &ty));
        }
    }
    inf.finish(&e)
}
