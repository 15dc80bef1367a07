//! Higher-order unification by Huet's search.
//!
//! [`simpl`] breaks pairs down until only flex-rigid and flex-flex pairs
//! remain; [`match_step`] proposes imitation and projection bindings for one
//! flex-rigid pair. [`unify`] runs the search depth-first and lazily, so
//! callers can stop after the first unifier or enumerate all of them.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::term::{self, norm, type_of, Name, Subst, Term, Type, Var};

/// Default bound on MATCH steps along one search path.
pub const DEFAULT_DEPTH: usize = 20;

/// A triangular substitution plus a supply of fresh schematic indices.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Env {
    bindings: BTreeMap<Var, Term>,
    next_index: u32,
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.bindings.iter()).finish()
    }
}

impl Env {
    /// Fresh variables will be numbered from `next_index` upwards.
    pub fn new(next_index: u32) -> Env {
        Env { bindings: BTreeMap::new(), next_index }
    }

    /// An empty environment whose fresh indices avoid those of `terms`.
    pub fn above<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Env {
        let max = terms.into_iter().map(term::max_index).max().unwrap_or(-1);
        Env::new((max + 1) as u32)
    }

    pub fn next_index(&self) -> u32 {
        self.next_index
    }

    pub fn lookup(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    pub fn bind(&mut self, v: Var, t: Term) {
        debug_assert!(!self.bindings.contains_key(&v));
        debug_assert_eq!(type_of(&t, &[]).ok().as_ref(), Some(&v.ty));
        self.bindings.insert(v, t);
    }

    pub fn fresh_var(&mut self, name: &str, ty: Type) -> Var {
        let v = Var::new(name, self.next_index, ty);
        self.next_index += 1;
        v
    }

    /// Apply the bindings exhaustively and normalize.
    pub fn instantiate(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        norm(&self.inst_raw(t))
    }

    fn inst_raw(&self, t: &Term) -> Term {
        term::map_vars(t, &mut |v| self.bindings.get(v).map(|img| self.inst_raw(img)))
    }

    /// The bindings as an idempotent substitution.
    pub fn to_subst(&self) -> Subst {
        let mut s = Subst::new();
        for v in self.bindings.keys() {
            let img = self.instantiate(&Term::Var(v.clone()));
            s.insert(v.clone(), img).expect("environment bindings are well typed");
        }
        s
    }
}

/// `λctx. lhs =?= λctx. rhs`; `ctx` is innermost last.
#[derive(Clone, PartialEq, Eq)]
pub struct DisagreementPair {
    pub ctx: Vec<(Name, Type)>,
    pub lhs: Term,
    pub rhs: Term,
}

impl fmt::Debug for DisagreementPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (n, _) in &self.ctx {
            write!(f, "{n} ")?;
        }
        write!(f, "] {:?} =?= {:?}", self.lhs, self.rhs)
    }
}

impl DisagreementPair {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        DisagreementPair { ctx: Vec::new(), lhs, rhs }
    }

    pub fn in_ctx(ctx: Vec<(Name, Type)>, lhs: Term, rhs: Term) -> Self {
        DisagreementPair { ctx, lhs, rhs }
    }

    /// Both sides closed under the context binders, normalized.
    pub fn close(&self) -> DisagreementPair {
        let wrap = |t: &Term| {
            let t = self.ctx.iter().rev().fold(t.clone(), |b, (n, ty)| {
                Term::Abs(n.clone(), ty.clone(), Arc::new(b))
            });
            norm(&t)
        };
        DisagreementPair::new(wrap(&self.lhs), wrap(&self.rhs))
    }
}

/// One unifier together with the flex-flex pairs it leaves unsolved.
#[derive(Clone, Debug)]
pub struct UnifyResult {
    pub env: Env,
    /// Closed pairs `λx̄. l =?= λx̄. r` with an empty context.
    pub flexflex: Vec<DisagreementPair>,
}

enum Kind {
    Rigid,
    Flex,
}

fn kind(t: &Term) -> Kind {
    if t.head().is_var() {
        Kind::Flex
    } else {
        Kind::Rigid
    }
}

/// η-expand both sides to base type, moving the new binders into `ctx`.
fn expand(env: &Env, p: DisagreementPair) -> Option<DisagreementPair> {
    let mut lhs = env.instantiate(&p.lhs);
    let mut rhs = env.instantiate(&p.rhs);
    let mut ctx = p.ctx;
    let types: Vec<Type> = ctx.iter().map(|(_, t)| t.clone()).collect();
    let lt = type_of(&lhs, &types).ok()?;
    let rt = type_of(&rhs, &types).ok()?;
    if lt != rt {
        return None;
    }
    let mut ty = lt;
    while let Type::Fun(a, b) = ty {
        let hint = binder_hint(&lhs).or_else(|| binder_hint(&rhs)).unwrap_or_else(|| "x".into());
        lhs = open(&lhs);
        rhs = open(&rhs);
        ctx.push((hint, (*a).clone()));
        ty = (*b).clone();
    }
    Some(DisagreementPair { ctx, lhs, rhs })
}

fn binder_hint(t: &Term) -> Option<Name> {
    match t {
        Term::Abs(n, _, _) => Some(n.clone()),
        _ => None,
    }
}

/// The body of `t` applied to a new innermost bound variable.
fn open(t: &Term) -> Term {
    match t {
        Term::Abs(_, _, b) => (**b).clone(),
        _ => norm(&Term::app(term::incr_bounds(t, 1, 0), Term::Bound(0))),
    }
}

fn same_rigid_head(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Const(m, s), Term::Const(n, t)) | (Term::Free(m, s), Term::Free(n, t)) => {
            m == n && s == t
        }
        (Term::Bound(i), Term::Bound(j)) => i == j,
        _ => false,
    }
}

/// Does the bare variable `v` occur in `t` along a path of rigid heads only?
/// Then `v =?= t` has no unifier unless `t` is `v` itself.
pub fn occurs_rigidly(v: &Var, t: &Term) -> bool {
    let mut t = t;
    while let Term::Abs(_, _, b) = t {
        t = b;
    }
    let (head, args) = t.strip_comb();
    match head {
        Term::Var(w) => w == v && args.is_empty(),
        _ => args.into_iter().any(|a| occurs_rigidly(v, a)),
    }
}

/// If `flex` is `?F(b₁,…,bₙ)` with distinct bound `bᵢ`, `?F` absent from
/// `other` and every loose bound of `other` among the `bᵢ`, the most general
/// solution is `?F := λx̄. other`.
fn pattern_binding(flex: &Term, other: &Term, ctx: &[(Name, Type)]) -> Option<(Var, Term)> {
    let (head, args) = flex.strip_comb();
    let Term::Var(f) = head else { return None };
    let mut idx = Vec::with_capacity(args.len());
    for a in &args {
        match a {
            Term::Bound(i) if !idx.contains(i) => idx.push(*i),
            _ => return None,
        }
    }
    if term::vars(other).contains(f) {
        return None;
    }
    if !term::loose_bounds(other).iter().all(|i| idx.contains(i)) {
        return None;
    }
    let n = idx.len() as u32;
    let body = term::map_loose_bounds(other, &|i| {
        let pos = idx.iter().position(|j| *j == i).unwrap() as u32;
        n - 1 - pos
    });
    let lam = idx.iter().rev().fold(body, |b, i| {
        let (hint, ty) = &ctx[ctx.len() - 1 - *i as usize];
        Term::Abs(hint.clone(), ty.clone(), Arc::new(b))
    });
    Some((f.clone(), norm(&lam)))
}

/// Simplified pairs: flex-rigid (flex side on the left) and flex-flex.
#[derive(Clone, Debug, Default)]
pub struct Simplified {
    pub flex_rigid: Vec<DisagreementPair>,
    pub flex_flex: Vec<DisagreementPair>,
}

/// Decompose rigid-rigid pairs, solve pattern pairs outright and classify
/// the rest. `None` means there is no unifier.
pub fn simpl(env: &mut Env, pairs: Vec<DisagreementPair>) -> Option<Simplified> {
    let mut work: VecDeque<DisagreementPair> = pairs.into();
    let mut out = Simplified::default();
    while let Some(p) = work.pop_front() {
        let p = expand(env, p)?;
        if p.lhs == p.rhs {
            continue;
        }
        let solved = match (kind(&p.lhs), kind(&p.rhs)) {
            (Kind::Rigid, Kind::Rigid) => {
                let (h1, a1) = p.lhs.strip_comb();
                let (h2, a2) = p.rhs.strip_comb();
                if !same_rigid_head(h1, h2) || a1.len() != a2.len() {
                    return None;
                }
                for (a, b) in a1.into_iter().zip(a2) {
                    work.push_back(DisagreementPair::in_ctx(p.ctx.clone(), a.clone(), b.clone()));
                }
                None
            }
            (Kind::Flex, Kind::Rigid) | (Kind::Rigid, Kind::Flex) => {
                let (flex, rigid) = match kind(&p.lhs) {
                    Kind::Flex => (p.lhs, p.rhs),
                    Kind::Rigid => (p.rhs, p.lhs),
                };
                match pattern_binding(&flex, &rigid, &p.ctx) {
                    Some(b) => Some(b),
                    None => {
                        if let Term::Var(f) = &flex {
                            if occurs_rigidly(f, &rigid) {
                                return None;
                            }
                        }
                        out.flex_rigid.push(DisagreementPair::in_ctx(p.ctx, flex, rigid));
                        None
                    }
                }
            }
            (Kind::Flex, Kind::Flex) => {
                match pattern_binding(&p.lhs, &p.rhs, &p.ctx)
                    .or_else(|| pattern_binding(&p.rhs, &p.lhs, &p.ctx))
                {
                    Some(b) => Some(b),
                    None => {
                        out.flex_flex.push(p);
                        None
                    }
                }
            }
        };
        if let Some((v, t)) = solved {
            env.bind(v, t);
            work.extend(out.flex_rigid.drain(..));
            work.extend(out.flex_flex.drain(..));
        }
    }
    Some(out)
}

/// Candidate bindings for the head of a flex-rigid pair: imitation first
/// (unless the rigid head is bound), then each type-correct projection.
pub fn match_step(env: &Env, pair: &DisagreementPair) -> Vec<Env> {
    let Term::Var(f) = pair.lhs.head() else { return Vec::new() };
    let (rhead, _) = pair.rhs.strip_comb();
    let (ftys, fres) = f.ty.strip();
    let n = ftys.len() as u32;
    let mut out = Vec::new();

    // λx̄. h(?H₁(x̄), …, ?Hₘ(x̄)) for h with argument types `tys`
    let build = |env: &mut Env, h: Term, tys: &[Type]| {
        let bounds: Vec<Term> = (0..n).rev().map(Term::Bound).collect();
        let args: Vec<Term> = tys
            .iter()
            .map(|ty| {
                let h = env.fresh_var("h", Type::curried(&ftys, ty.clone()));
                Term::list_comb(Term::Var(h), bounds.clone())
            })
            .collect();
        let body = Term::list_comb(h, args);
        let lam = ftys.iter().enumerate().rev().fold(body, |b, (i, ty)| {
            Term::Abs(format!("x{}", i + 1).into(), ty.clone(), Arc::new(b))
        });
        norm(&lam)
    };

    if let Term::Const(_, ty) | Term::Free(_, ty) = rhead {
        let (tys, _) = ty.strip();
        let mut e = env.clone();
        let imit = build(&mut e, rhead.clone(), &tys);
        e.bind(f.clone(), imit);
        out.push(e);
    }
    for (i, ti) in ftys.iter().enumerate() {
        let (tys, res) = ti.strip();
        if res != fres {
            continue;
        }
        let mut e = env.clone();
        let proj = build(&mut e, Term::Bound(n - 1 - i as u32), &tys);
        e.bind(f.clone(), proj);
        out.push(e);
    }
    out
}

struct Node {
    env: Env,
    pairs: Vec<DisagreementPair>,
    steps: usize,
}

/// Lazy depth-first stream of unifiers.
pub struct Unifier {
    stack: Vec<Node>,
    depth: usize,
    depth_exceeded: bool,
}

impl Unifier {
    /// Whether some branch was cut off by the depth bound so far.
    pub fn depth_exceeded(&self) -> bool {
        self.depth_exceeded
    }
}

impl Iterator for Unifier {
    type Item = UnifyResult;

    fn next(&mut self) -> Option<UnifyResult> {
        while let Some(Node { mut env, pairs, steps }) = self.stack.pop() {
            let Some(s) = simpl(&mut env, pairs) else { continue };
            let Some(first) = s.flex_rigid.first() else {
                let flexflex = s.flex_flex.iter().map(|p| p.close()).collect();
                return Some(UnifyResult { env, flexflex });
            };
            if steps >= self.depth {
                self.depth_exceeded = true;
                continue;
            }
            let rest: Vec<DisagreementPair> =
                s.flex_rigid.iter().chain(s.flex_flex.iter()).cloned().collect();
            let children = match_step(&env, first);
            for e in children.into_iter().rev() {
                self.stack.push(Node { env: e, pairs: rest.clone(), steps: steps + 1 });
            }
        }
        None
    }
}

/// All unifiers of `pairs` extending `env`, searching at most `depth`
/// MATCH steps along any path.
pub fn unify(env: Env, pairs: Vec<DisagreementPair>, depth: usize) -> Unifier {
    Unifier { stack: vec![Node { env, pairs, steps: 0 }], depth, depth_exceeded: false }
}

/// Unify two closed terms.
pub fn unify_terms(t: &Term, u: &Term, depth: usize) -> Unifier {
    unify(Env::above([t, u]), vec![DisagreementPair::new(t.clone(), u.clone())], depth)
}
