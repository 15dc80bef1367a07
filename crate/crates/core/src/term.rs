//! Simply typed λ-terms with de Bruijn bound variables.
//!
//! Frees and schematic variables are named; schematics carry an index so a
//! whole theorem can be renamed apart by shifting indices. Terms stored in
//! theorems are β-normal and η-contracted (see [`norm`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Name = Arc<str>;

/// Meta-implication `==>`.
pub const IMP: &str = "==>";
/// Meta-quantifier `!!`, one constant per binder type.
pub const ALL: &str = "!!";
/// Meta-equality `==`, one constant per operand type.
pub const EQ: &str = "==";
/// The type of meta-formulae.
pub const PROP: &str = "prop";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Base(Name),
    Fun(Arc<Type>, Arc<Type>),
}

impl Type {
    pub fn base(name: &str) -> Type {
        Type::Base(name.into())
    }

    pub fn prop() -> Type {
        Type::base(PROP)
    }

    pub fn fun(dom: Type, cod: Type) -> Type {
        Type::Fun(Arc::new(dom), Arc::new(cod))
    }

    /// `σ₁ → … → σₙ → τ`
    pub fn curried(args: &[Type], res: Type) -> Type {
        args.iter().rev().fold(res, |acc, a| Type::fun(a.clone(), acc))
    }

    pub fn dest_fun(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Fun(a, b) => Some((a, b)),
            Type::Base(_) => None,
        }
    }

    /// Argument types and final (basic) result type.
    pub fn strip(&self) -> (Vec<Type>, Type) {
        let mut args = Vec::new();
        let mut t = self;
        while let Type::Fun(a, b) = t {
            args.push((**a).clone());
            t = b;
        }
        (args, t.clone())
    }

    pub fn is_prop(&self) -> bool {
        matches!(self, Type::Base(n) if &**n == PROP)
    }

    /// Names of all basic types occurring in this type.
    pub fn bases(&self, out: &mut BTreeSet<Name>) {
        match self {
            Type::Base(n) => {
                out.insert(n.clone());
            }
            Type::Fun(a, b) => {
                a.bases(out);
                b.bases(out);
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Base(n) => write!(f, "{n}"),
            Type::Fun(a, b) => {
                if a.dest_fun().is_some() {
                    write!(f, "({a}) => {b}")
                } else {
                    write!(f, "{a} => {b}")
                }
            }
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A schematic variable `?name.index : ty`. The type is part of its identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Name,
    pub index: u32,
    pub ty: Type,
}

impl Var {
    pub fn new(name: &str, index: u32, ty: Type) -> Var {
        Var { name: name.into(), index, ty }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "?{}", self.name)
        } else {
            write!(f, "?{}.{}", self.name, self.index)
        }
    }
}

#[derive(Clone)]
pub enum Term {
    Const(Name, Type),
    Free(Name, Type),
    Var(Var),
    /// de Bruijn index; 0 is the innermost enclosing abstraction.
    Bound(u32),
    /// The name is a display hint only.
    Abs(Name, Type, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
}

use Term::*;

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Const(a, s), Const(b, t)) | (Free(a, s), Free(b, t)) => a == b && s == t,
            (Var(v), Var(w)) => v == w,
            (Bound(i), Bound(j)) => i == j,
            (Abs(_, s, a), Abs(_, t, b)) => s == t && (Arc::ptr_eq(a, b) || a == b),
            (App(f, a), App(g, b)) => {
                (Arc::ptr_eq(f, g) || f == g) && (Arc::ptr_eq(a, b) || a == b)
            }
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match self {
            Const(n, t) => (0u8, n, t).hash(h),
            Free(n, t) => (1u8, n, t).hash(h),
            Var(v) => (2u8, v).hash(h),
            Bound(i) => (3u8, i).hash(h),
            Abs(_, t, b) => {
                4u8.hash(h);
                t.hash(h);
                b.hash(h);
            }
            App(f, a) => {
                5u8.hash(h);
                f.hash(h);
                a.hash(h);
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(n, _) => write!(f, "{n}"),
            Free(n, _) => write!(f, "{n}"),
            Var(v) => write!(f, "{v:?}"),
            Bound(i) => write!(f, "#{i}"),
            Abs(n, t, b) => write!(f, "(%{n}::{t}. {b:?})"),
            App(..) => {
                let (head, args) = self.strip_comb();
                write!(f, "{head:?}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a:?}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Term {
    pub fn constant(name: &str, ty: Type) -> Term {
        Const(name.into(), ty)
    }

    pub fn free(name: &str, ty: Type) -> Term {
        Free(name.into(), ty)
    }

    pub fn var(name: &str, index: u32, ty: Type) -> Term {
        Var(self::Var::new(name, index, ty))
    }

    pub fn abs(hint: &str, ty: Type, body: Term) -> Term {
        Abs(hint.into(), ty, Arc::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        App(Arc::new(f), Arc::new(a))
    }

    pub fn list_comb(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// Head and arguments of an application spine.
    pub fn strip_comb(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn head(&self) -> &Term {
        let mut t = self;
        while let App(f, _) = t {
            t = f;
        }
        t
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Var(_))
    }

    pub fn size(&self) -> usize {
        match self {
            Abs(_, _, b) => 1 + b.size(),
            App(f, a) => 1 + f.size() + a.size(),
            _ => 1,
        }
    }

    // Meta-logical connectives.

    pub fn imp(a: Term, b: Term) -> Term {
        let p = Type::prop();
        let c = Term::constant(IMP, Type::curried(&[p.clone(), p.clone()], p));
        Term::list_comb(c, [a, b])
    }

    pub fn list_imp(prems: impl IntoIterator<Item = Term>, concl: Term) -> Term {
        let prems: Vec<Term> = prems.into_iter().collect();
        prems.into_iter().rev().fold(concl, |acc, p| Term::imp(p, acc))
    }

    /// `!!x::ty. body`, where `body` refers to `x` as `Bound 0`.
    pub fn all(hint: &str, ty: Type, body: Term) -> Term {
        Term::app(Term::all_const(ty.clone()), Term::abs(hint, ty, body))
    }

    pub fn all_const(ty: Type) -> Term {
        Term::constant(ALL, Type::fun(Type::fun(ty, Type::prop()), Type::prop()))
    }

    pub fn equals(a: Term, b: Term, ty: Type) -> Term {
        Term::list_comb(Term::eq_const(ty), [a, b])
    }

    pub fn eq_const(ty: Type) -> Term {
        Term::constant(EQ, Type::curried(&[ty.clone(), ty], Type::prop()))
    }

    pub fn dest_imp(&self) -> Option<(&Term, &Term)> {
        match self.strip_comb() {
            (Const(n, _), args) if &**n == IMP && args.len() == 2 => Some((args[0], args[1])),
            _ => None,
        }
    }

    /// Premises and conclusion: `A₁ ==> … ==> Aₙ ==> B` gives `([A₁…Aₙ], B)`.
    pub fn strip_imp(&self) -> (Vec<&Term>, &Term) {
        let mut prems = Vec::new();
        let mut t = self;
        while let Some((a, b)) = t.dest_imp() {
            prems.push(a);
            t = b;
        }
        (prems, t)
    }

    /// Binder type and the quantified predicate of `!!(f)`.
    pub fn dest_all(&self) -> Option<(&Type, &Term)> {
        match self {
            App(c, f) => match &**c {
                Const(n, Type::Fun(dom, _)) if &**n == ALL => {
                    let (bty, _) = dom.dest_fun()?;
                    Some((bty, f))
                }
                _ => None,
            },
            _ => None,
        }
    }

    pub fn dest_eq(&self) -> Option<(&Term, &Term)> {
        match self.strip_comb() {
            (Const(n, _), args) if &**n == EQ && args.len() == 2 => Some((args[0], args[1])),
            _ => None,
        }
    }
}

/// Types of the enclosing binders, innermost last.
pub fn type_of(t: &Term, ctx: &[Type]) -> Result<Type> {
    let mut ctx = ctx.to_vec();
    type_of_in(t, &mut ctx)
}

fn type_of_in(t: &Term, ctx: &mut Vec<Type>) -> Result<Type> {
    match t {
        Const(_, ty) | Free(_, ty) => Ok(ty.clone()),
        Var(v) => Ok(v.ty.clone()),
        Bound(i) => {
            let i = *i as usize;
            if i < ctx.len() {
                Ok(ctx[ctx.len() - 1 - i].clone())
            } else {
                Err(Error::DanglingBound(i as u32))
            }
        }
        Abs(_, ty, body) => {
            ctx.push(ty.clone());
            let r = type_of_in(body, ctx);
            ctx.pop();
            Ok(Type::fun(ty.clone(), r?))
        }
        App(f, a) => {
            let fty = type_of_in(f, ctx)?;
            let aty = type_of_in(a, ctx)?;
            match fty.dest_fun() {
                Some((dom, cod)) if *dom == aty => Ok(cod.clone()),
                Some((dom, _)) => Err(Error::IllTyped(format!(
                    "argument {a:?} has type {aty}, expected {dom}"
                ))),
                None => Err(Error::IllTyped(format!("{f:?} of type {fty} applied to an argument"))),
            }
        }
    }
}

// de Bruijn plumbing.

/// Does any bound index `≥ lev` escape `t`?
pub fn has_loose_bounds(t: &Term) -> bool {
    loose_from(t, 0)
}

fn loose_from(t: &Term, lev: u32) -> bool {
    match t {
        Bound(i) => *i >= lev,
        Abs(_, _, b) => loose_from(b, lev + 1),
        App(f, a) => loose_from(f, lev) || loose_from(a, lev),
        _ => false,
    }
}

/// Does loose index `i` (relative to the root of `t`) occur?
pub fn loose_bound_occurs(t: &Term, i: u32) -> bool {
    match t {
        Bound(j) => *j == i,
        Abs(_, _, b) => loose_bound_occurs(b, i + 1),
        App(f, a) => loose_bound_occurs(f, i) || loose_bound_occurs(a, i),
        _ => false,
    }
}

/// All loose indices of `t`, relative to its root.
pub fn loose_bounds(t: &Term) -> BTreeSet<u32> {
    fn go(t: &Term, lev: u32, out: &mut BTreeSet<u32>) {
        match t {
            Bound(i) if *i >= lev => {
                out.insert(*i - lev);
            }
            Abs(_, _, b) => go(b, lev + 1, out),
            App(f, a) => {
                go(f, lev, out);
                go(a, lev, out);
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    go(t, 0, &mut out);
    out
}

/// Shift loose indices `≥ lev` by `inc`.
pub fn incr_bounds(t: &Term, inc: i64, lev: u32) -> Term {
    if inc == 0 || !loose_from(t, lev) {
        return t.clone();
    }
    match t {
        Bound(i) if *i >= lev => Bound((*i as i64 + inc) as u32),
        Abs(n, ty, b) => Abs(n.clone(), ty.clone(), Arc::new(incr_bounds(b, inc, lev + 1))),
        App(f, a) => Term::app(incr_bounds(f, inc, lev), incr_bounds(a, inc, lev)),
        _ => t.clone(),
    }
}

/// Rename loose indices through `f` (indices relative to the root of `t`).
pub fn map_loose_bounds(t: &Term, f: &dyn Fn(u32) -> u32) -> Term {
    fn go(t: &Term, lev: u32, f: &dyn Fn(u32) -> u32) -> Term {
        match t {
            Bound(i) if *i >= lev => Bound(f(*i - lev) + lev),
            Abs(n, ty, b) => Abs(n.clone(), ty.clone(), Arc::new(go(b, lev + 1, f))),
            App(a, b) => Term::app(go(a, lev, f), go(b, lev, f)),
            _ => t.clone(),
        }
    }
    go(t, 0, f)
}

/// `body[arg/0]`, lowering the remaining loose indices of `body`.
pub fn subst_bound(arg: &Term, body: &Term) -> Term {
    fn go(t: &Term, arg: &Term, lev: u32) -> Term {
        match t {
            Bound(i) if *i == lev => incr_bounds(arg, lev as i64, 0),
            Bound(i) if *i > lev => Bound(i - 1),
            Abs(n, ty, b) => Abs(n.clone(), ty.clone(), Arc::new(go(b, arg, lev + 1))),
            App(f, a) => Term::app(go(f, arg, lev), go(a, arg, lev)),
            _ => t.clone(),
        }
    }
    if !loose_from(body, 0) {
        return body.clone();
    }
    go(body, arg, 0)
}

/// β-normal form.
pub fn beta_norm(t: &Term) -> Term {
    match t {
        Abs(n, ty, b) => Abs(n.clone(), ty.clone(), Arc::new(beta_norm(b))),
        App(f, a) => {
            let f = beta_norm(f);
            let a = beta_norm(a);
            match f {
                Abs(_, _, body) => beta_norm(&subst_bound(&a, &body)),
                f => Term::app(f, a),
            }
        }
        _ => t.clone(),
    }
}

/// Contract every η-redex `λx. f x` (x not free in f), bottom-up.
pub fn eta_contract(t: &Term) -> Term {
    match t {
        Abs(n, ty, b) => {
            let b = eta_contract(b);
            if let App(f, a) = &b {
                if matches!(**a, Bound(0)) && !loose_bound_occurs(f, 0) {
                    return incr_bounds(f, -1, 0);
                }
            }
            Abs(n.clone(), ty.clone(), Arc::new(b))
        }
        App(f, a) => Term::app(eta_contract(f), eta_contract(a)),
        _ => t.clone(),
    }
}

/// β-normal, η-contracted form.
pub fn norm(t: &Term) -> Term {
    eta_contract(&beta_norm(t))
}

/// α-equivalence. With de Bruijn indices this is structural equality.
pub fn aconv(t: &Term, u: &Term) -> bool {
    t == u
}

/// Reduction order for [`reduce_step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    Innermost,
}

/// One β- or η-step, or `None` at a normal form.
pub fn reduce_step(t: &Term, strategy: Strategy) -> Option<Term> {
    fn root(t: &Term) -> Option<Term> {
        match t {
            App(f, a) => match &**f {
                Abs(_, _, body) => Some(subst_bound(a, body)),
                _ => None,
            },
            Abs(_, _, b) => match &**b {
                App(f, a) if matches!(**a, Bound(0)) && !loose_bound_occurs(f, 0) => {
                    Some(incr_bounds(f, -1, 0))
                }
                _ => None,
            },
            _ => None,
        }
    }
    fn inside(t: &Term, s: Strategy) -> Option<Term> {
        match t {
            Abs(n, ty, b) => reduce_step(b, s).map(|b| Abs(n.clone(), ty.clone(), Arc::new(b))),
            App(f, a) => match reduce_step(f, s) {
                Some(f) => Some(Term::app(f, (**a).clone())),
                None => reduce_step(a, s).map(|a| Term::app((**f).clone(), a)),
            },
            _ => None,
        }
    }
    match strategy {
        Strategy::LeftmostOutermost => root(t).or_else(|| inside(t, strategy)),
        Strategy::Innermost => inside(t, strategy).or_else(|| root(t)),
    }
}

/// Iterate [`reduce_step`] to a normal form; `None` if `max_steps` is exceeded.
pub fn reduce_with(t: &Term, strategy: Strategy, max_steps: usize) -> Option<Term> {
    let mut t = t.clone();
    for _ in 0..max_steps {
        match reduce_step(&t, strategy) {
            Some(u) => t = u,
            None => return Some(t),
        }
    }
    None
}

/// Body of `λv. t` with occurrences of `v` replaced by the new bound index.
pub fn abstract_body(v: &Term, t: &Term) -> Term {
    fn go(t: &Term, v: &Term, lev: u32) -> Term {
        if t == v {
            return Bound(lev);
        }
        match t {
            Abs(n, ty, b) => Abs(n.clone(), ty.clone(), Arc::new(go(b, v, lev + 1))),
            App(f, a) => Term::app(go(f, v, lev), go(a, v, lev)),
            _ => t.clone(),
        }
    }
    go(&incr_bounds(t, 1, 0), v, 0)
}

/// `λv. t`, binding every occurrence of the free `v`.
pub fn abstract_over(v: &Term, t: &Term) -> Result<Term> {
    match v {
        Free(name, ty) => Ok(Abs(name.clone(), ty.clone(), Arc::new(abstract_body(v, t)))),
        _ => Err(Error::NotAFree),
    }
}

/// Does `sub` occur in `t`? Occurrences under binders are compared as they stand.
pub fn occurs(sub: &Term, t: &Term) -> bool {
    if sub == t {
        return true;
    }
    match t {
        Abs(_, _, b) => occurs(sub, b),
        App(f, a) => occurs(sub, f) || occurs(sub, a),
        _ => false,
    }
}

/// Largest schematic index, or −1 if there are none.
pub fn max_index(t: &Term) -> i64 {
    match t {
        Var(v) => v.index as i64,
        Abs(_, _, b) => max_index(b),
        App(f, a) => max_index(f).max(max_index(a)),
        _ => -1,
    }
}

pub fn incr_indexes(t: &Term, k: u32) -> Term {
    if k == 0 {
        return t.clone();
    }
    map_vars(t, &mut |v| Some(Var(self::Var { index: v.index + k, ..v.clone() })))
}

/// Replace schematics for which `f` returns a term. No normalization.
pub fn map_vars(t: &Term, f: &mut dyn FnMut(&self::Var) -> Option<Term>) -> Term {
    match t {
        Var(v) => f(v).unwrap_or_else(|| t.clone()),
        Abs(n, ty, b) => Abs(n.clone(), ty.clone(), Arc::new(map_vars(b, f))),
        App(a, b) => Term::app(map_vars(a, f), map_vars(b, f)),
        _ => t.clone(),
    }
}

/// Replace free variables for which `f` returns a term. No normalization.
pub fn map_frees(t: &Term, f: &mut dyn FnMut(&Name, &Type) -> Option<Term>) -> Term {
    match t {
        Free(n, ty) => f(n, ty).unwrap_or_else(|| t.clone()),
        Abs(n, ty, b) => Abs(n.clone(), ty.clone(), Arc::new(map_frees(b, f))),
        App(a, b) => Term::app(map_frees(a, f), map_frees(b, f)),
        _ => t.clone(),
    }
}

pub fn vars(t: &Term) -> BTreeSet<self::Var> {
    fn go(t: &Term, out: &mut BTreeSet<self::Var>) {
        match t {
            Var(v) => {
                out.insert(v.clone());
            }
            Abs(_, _, b) => go(b, out),
            App(f, a) => {
                go(f, out);
                go(a, out);
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut out);
    out
}

/// Free variables in order of first occurrence.
pub fn frees(t: &Term) -> Vec<(Name, Type)> {
    fn go(t: &Term, out: &mut Vec<(Name, Type)>) {
        match t {
            Free(n, ty) => {
                if !out.iter().any(|(m, s)| m == n && s == ty) {
                    out.push((n.clone(), ty.clone()));
                }
            }
            Abs(_, _, b) => go(b, out),
            App(f, a) => {
                go(f, out);
                go(a, out);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}

pub fn has_vars(t: &Term) -> bool {
    match t {
        Var(_) => true,
        Abs(_, _, b) => has_vars(b),
        App(f, a) => has_vars(f) || has_vars(a),
        _ => false,
    }
}

pub fn free_occurs(name: &str, ty: &Type, t: &Term) -> bool {
    match t {
        Free(n, s) => &**n == name && s == ty,
        Abs(_, _, b) => free_occurs(name, ty, b),
        App(f, a) => free_occurs(name, ty, f) || free_occurs(name, ty, a),
        _ => false,
    }
}

/// Simultaneous substitution for schematic variables.
///
/// Images are closed (no loose bound indices) and have exactly the type of
/// their key; [`Subst::insert`] rejects anything else.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Subst(BTreeMap<self::Var, Term>);

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn insert(&mut self, v: self::Var, t: Term) -> Result<()> {
        let ty = type_of(&t, &[])?;
        if ty != v.ty {
            return Err(Error::IllTyped(format!(
                "{v:?} has type {} but its image has type {ty}",
                v.ty
            )));
        }
        self.0.insert(v, t);
        Ok(())
    }

    pub fn with(mut self, v: self::Var, t: Term) -> Result<Self> {
        self.insert(v, t)?;
        Ok(self)
    }

    pub fn get(&self, v: &self::Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&self::Var, &Term)> {
        self.0.iter()
    }

    /// Replace without normalizing.
    pub fn apply_raw(&self, t: &Term) -> Term {
        if self.0.is_empty() {
            return t.clone();
        }
        map_vars(t, &mut |v| self.0.get(v).cloned())
    }

    /// Capture-free replacement followed by normalization.
    pub fn apply(&self, t: &Term) -> Term {
        norm(&self.apply_raw(t))
    }
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

/// Checked application of a substitution: every image must match its key's type.
pub fn apply_subst(s: &Subst, t: &Term) -> Result<Term> {
    for (v, img) in s.iter() {
        let ty = type_of(img, &[])?;
        if ty != v.ty {
            return Err(Error::IllTyped(format!("image of {v:?} has type {ty}")));
        }
    }
    Ok(s.apply(t))
}
