//! Lifting and resolution, coded directly on top of the kernel's private
//! constructor. Both are checked against kernel-primitive derivations in
//! the test suite.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{self, Theorem};
use crate::term::{self, norm, Name, Term, Type, Var};
use crate::unify::{self, DisagreementPair, Env, DEFAULT_DEPTH};

/// One binder of a subgoal's prefix, outermost first. Assumptions are in
/// de Bruijn form relative to their own position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrefixItem {
    Param(Name, Type),
    Asm(Term),
}

/// A subgoal `!!x̄. Θ ==> C` split into its parts. Parameters appear as
/// free variables in `asms` and `concl`, named apart from the subgoal's
/// own free variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgoalView {
    pub params: Vec<(Name, Type)>,
    pub asms: Vec<Term>,
    pub concl: Term,
    prefix: Vec<PrefixItem>,
    body: Term,
}

impl SubgoalView {
    pub fn new(t: &Term) -> SubgoalView {
        let (prefix, body) = strip_prefix(t);
        let mut used: BTreeSet<Name> = term::frees(t).into_iter().map(|(n, _)| n).collect();
        let mut params: Vec<(Name, Type)> = Vec::new();
        let mut asms = Vec::new();
        // the innermost parameter is Bound 0, so substitute from the inside out
        let open = |t: &Term, params: &[(Name, Type)]| {
            params.iter().rev().fold(t.clone(), |t, (n, ty)| {
                term::subst_bound(&Term::Free(n.clone(), ty.clone()), &t)
            })
        };
        for item in &prefix {
            match item {
                PrefixItem::Param(h, ty) => {
                    let name = fresh_name(h, &used);
                    used.insert(name.clone());
                    params.push((name, ty.clone()));
                }
                PrefixItem::Asm(a) => asms.push(norm(&open(a, &params))),
            }
        }
        let concl = norm(&open(&body, &params));
        SubgoalView { params, asms, concl, prefix, body }
    }

    pub fn prefix(&self) -> &[PrefixItem] {
        &self.prefix
    }

    /// Conclusion in de Bruijn form, under all parameters.
    pub fn body(&self) -> &Term {
        &self.body
    }

    /// Reassemble the original subgoal.
    pub fn term(&self) -> Term {
        wrap_prefix(&self.prefix, self.body.clone())
    }

    /// Parameter binder context, outermost first.
    pub fn ctx(&self) -> Vec<(Name, Type)> {
        params_of(&self.prefix)
    }
}

/// `x`, `x1`, `x2`, … avoiding `used`.
pub fn fresh_name(hint: &str, used: &BTreeSet<Name>) -> Name {
    if !used.contains(hint) {
        return hint.into();
    }
    (1..).map(|i| format!("{hint}{i}")).find(|n| !used.contains(n.as_str())).unwrap().into()
}

/// Split `!!x. A ==> !!y. B ==> C` into its prefix and the conclusion.
pub fn strip_prefix(t: &Term) -> (Vec<PrefixItem>, Term) {
    let mut prefix = Vec::new();
    let mut t = t.clone();
    loop {
        if let Some((bty, f)) = t.dest_all() {
            let (hint, body) = match f {
                Term::Abs(h, _, b) => (h.clone(), (**b).clone()),
                _ => ("x".into(), Term::app(term::incr_bounds(f, 1, 0), Term::Bound(0))),
            };
            prefix.push(PrefixItem::Param(hint, bty.clone()));
            t = body;
        } else if let Some((a, b)) = t.dest_imp() {
            prefix.push(PrefixItem::Asm(a.clone()));
            t = b.clone();
        } else {
            return (prefix, t);
        }
    }
}

fn params_of(prefix: &[PrefixItem]) -> Vec<(Name, Type)> {
    prefix
        .iter()
        .filter_map(|p| match p {
            PrefixItem::Param(n, ty) => Some((n.clone(), ty.clone())),
            PrefixItem::Asm(_) => None,
        })
        .collect()
}

fn wrap_prefix(prefix: &[PrefixItem], body: Term) -> Term {
    let t = prefix.iter().rev().fold(body, |t, item| match item {
        PrefixItem::Param(h, ty) => Term::app(Term::all_const(ty.clone()), Term::Abs(h.clone(), ty.clone(), Arc::new(t))),
        PrefixItem::Asm(a) => Term::imp(a.clone(), t),
    });
    norm(&t)
}

/// Replace each schematic `?v : τ` of `t` (a term under the `k` prefix
/// parameters of types `ptys`) by `?v : σ̄ → τ` applied to the parameters.
fn lift_vars(t: &Term, ptys: &[Type]) -> Term {
    fn go(t: &Term, ptys: &[Type], depth: u32) -> Term {
        match t {
            Term::Var(v) => {
                let k = ptys.len() as u32;
                let lifted = Var { ty: Type::curried(ptys, v.ty.clone()), ..v.clone() };
                Term::list_comb(Term::Var(lifted), (0..k).map(|j| Term::Bound(k - 1 - j + depth)))
            }
            Term::Abs(h, ty, b) => Term::Abs(h.clone(), ty.clone(), Arc::new(go(b, ptys, depth + 1))),
            Term::App(f, a) => Term::app(go(f, ptys, depth), go(a, ptys, depth)),
            _ => t.clone(),
        }
    }
    if ptys.is_empty() {
        return t.clone();
    }
    go(t, ptys, 0)
}

/// Lift `rule` over a subgoal prefix: every premise and the conclusion gain
/// the prefix, and every schematic becomes a function of the parameters.
pub fn lift(rule: &Theorem, prefix: &[PrefixItem]) -> Theorem {
    if prefix.is_empty() {
        return rule.clone();
    }
    let ptys: Vec<Type> = params_of(prefix).into_iter().map(|(_, t)| t).collect();
    let (prems, concl) = rule.prop().strip_imp();
    let lifted = |t: &Term| wrap_prefix(prefix, lift_vars(t, &ptys));
    let prop = Term::list_imp(prems.iter().map(|p| lifted(p)), lifted(concl));
    // constraints become constraints on the lifted variables, for all parameters
    let ctx = params_of(prefix);
    let flexflex = rule
        .flexflex()
        .iter()
        .map(|p| {
            let lifted = DisagreementPair::in_ctx(
                ctx.clone(),
                lift_vars(&p.lhs, &ptys),
                lift_vars(&p.rhs, &ptys),
            );
            lifted.close()
        })
        .collect();
    Theorem::new_unchecked(rule.theory().clone(), rule.hyps().to_vec(), flexflex, norm(&prop))
}

/// `⊢ (Θ ==> φ₁) ==> … ==> (Θ ==> φ)`
pub fn lift_over_assumptions(rule: &Theorem, theta: &[Term]) -> Theorem {
    let prefix: Vec<PrefixItem> = theta.iter().map(|a| PrefixItem::Asm(norm(a))).collect();
    lift(rule, &prefix)
}

/// `⊢ (!!z̄. φ₁') ==> … ==> (!!z̄. φ')` with schematics applied to `z̄`.
pub fn lift_over_params(rule: &Theorem, params: &[(Name, Type)]) -> Theorem {
    let prefix: Vec<PrefixItem> =
        params.iter().map(|(n, ty)| PrefixItem::Param(n.clone(), ty.clone())).collect();
    lift(rule, &prefix)
}

/// Subgoals of a state: all premises of its proposition.
fn premises(state: &Theorem) -> (Vec<Term>, Term) {
    let (prems, concl) = state.prop().strip_imp();
    (prems.into_iter().cloned().collect(), concl.clone())
}

/// The first `n` premises of `t` and what remains.
fn split_premises(t: &Term, n: usize) -> (Vec<Term>, Term) {
    let mut prems = Vec::with_capacity(n);
    let mut t = t;
    for _ in 0..n {
        let (a, b) = t.dest_imp().expect("lifting preserves the premise count");
        prems.push(a.clone());
        t = b;
    }
    (prems, t.clone())
}

pub type ThmStream = Box<dyn Iterator<Item = Theorem> + Send>;

/// The state with subgoal `i` (1-based) replaced by `new`, instantiated by
/// a unifier.
fn rebuild(
    state: &Theorem,
    thy: &Arc<crate::theory::Theory>,
    hyps: &[Term],
    i: usize,
    new: &[Term],
    r: &unify::UnifyResult,
) -> Theorem {
    let (prems, concl) = premises(state);
    let mut out: Vec<Term> = Vec::with_capacity(prems.len() + new.len());
    out.extend(prems[..i - 1].iter().cloned());
    out.extend(new.iter().cloned());
    out.extend(prems[i..].iter().cloned());
    let prop = r.env.instantiate(&Term::list_imp(out, concl));
    let flexflex = r
        .flexflex
        .iter()
        .map(|p| DisagreementPair::new(r.env.instantiate(&p.lhs), r.env.instantiate(&p.rhs)))
        .filter(|p| p.lhs != p.rhs)
        .fold(Vec::new(), |acc, p| kernel::union_flexflex(&acc, &[p]));
    Theorem::new_unchecked(thy.clone(), hyps.to_vec(), flexflex, prop)
}

/// Resolve `rule` against subgoal `i` of `state`, lazily yielding one new
/// state per unifier.
pub fn resolve(rule: &Theorem, i: usize, state: &Theorem) -> Result<ThmStream> {
    resolve_with_depth(rule, i, state, DEFAULT_DEPTH)
}

pub fn resolve_with_depth(rule: &Theorem, i: usize, state: &Theorem, depth: usize) -> Result<ThmStream> {
    let (prems, _) = premises(state);
    if i == 0 || i > prems.len() {
        return Err(Error::NoSubgoal(i));
    }
    let thy = kernel::join(state.theory(), rule.theory())?;
    let shift = (state.max_index() + 1) as u32;
    let renamed = kernel::incr_indexes(rule, shift);
    let goal = &prems[i - 1];
    let (prefix, _) = strip_prefix(goal);
    let lifted = lift(&renamed, &prefix);
    // lifting over assumptions makes the conclusion an implication too,
    // so split by the rule's own premise count
    let nprems = rule.prop().strip_imp().0.len();
    let (new_prems, lifted_concl) = split_premises(lifted.prop(), nprems);

    let mut pairs = vec![DisagreementPair::new(lifted_concl, goal.clone())];
    pairs.extend(state.flexflex().iter().cloned());
    pairs.extend(lifted.flexflex().iter().cloned());
    let env = Env::new((state.max_index().max(lifted.max_index()) + 1) as u32);
    let hyps = kernel::union_hyps(state.hyps(), rule.hyps());
    let state = state.clone();
    Ok(Box::new(
        unify::unify(env, pairs, depth).map(move |r| rebuild(&state, &thy, &hyps, i, &new_prems, &r)),
    ))
}

/// Solve subgoal `i` by unifying its conclusion with one of its own
/// assumptions, trying them in order.
pub fn assumption(i: usize, state: &Theorem) -> Result<ThmStream> {
    assumption_with_depth(i, state, DEFAULT_DEPTH)
}

pub fn assumption_with_depth(i: usize, state: &Theorem, depth: usize) -> Result<ThmStream> {
    let (prems, _) = premises(state);
    if i == 0 || i > prems.len() {
        return Err(Error::NoSubgoal(i));
    }
    let (prefix, concl) = strip_prefix(&prems[i - 1]);
    let ctx = params_of(&prefix);
    let nparams = ctx.len();
    let mut candidates = Vec::new();
    let mut seen = 0;
    for item in &prefix {
        match item {
            PrefixItem::Param(..) => seen += 1,
            PrefixItem::Asm(a) => {
                let a = term::incr_bounds(a, (nparams - seen) as i64, 0);
                candidates.push(DisagreementPair::in_ctx(ctx.clone(), a, concl.clone()));
            }
        }
    }
    let state = state.clone();
    let flexflex = state.flexflex().to_vec();
    let next = (state.max_index() + 1) as u32;
    Ok(Box::new(candidates.into_iter().flat_map(move |pair| {
        let mut pairs = vec![pair];
        pairs.extend(flexflex.iter().cloned());
        let state = state.clone();
        unify::unify(Env::new(next), pairs, depth).map(move |r| {
            rebuild(&state, state.theory(), state.hyps(), i, &[], &r)
        })
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{assume, axiom, implies_intr};
    use crate::term::Subst;
    use crate::theory::Theory;

    fn form() -> Type {
        Type::base("form")
    }
    fn tr(a: Term) -> Term {
        Term::app(Term::constant("Tr", Type::fun(form(), Type::prop())), a)
    }
    fn bin(c: &str, a: Term, b: Term) -> Term {
        Term::list_comb(Term::constant(c, Type::curried(&[form(), form()], form())), [a, b])
    }
    fn f(n: &str) -> Term {
        Term::free(n, form())
    }

    #[test]
    fn subgoal_view_round_trip() {
        let z = Type::base("term");
        let p = Term::free("P", Type::fun(z.clone(), form()));
        let t = Term::all(
            "z",
            z.clone(),
            Term::imp(tr(Term::app(p.clone(), Term::Bound(0))), tr(Term::app(p.clone(), Term::Bound(0)))),
        );
        let v = SubgoalView::new(&t);
        assert_eq!(v.params.len(), 1);
        assert_eq!(v.asms.len(), 1);
        assert_eq!(v.term(), norm(&t));
        assert_eq!(v.concl, tr(Term::app(p, Term::free("z", z))));
    }

    #[test]
    fn empty_lifts_are_identity() {
        let thy = Theory::builtin("IPL").unwrap();
        let ax = axiom(&thy, "impI").unwrap();
        assert_eq!(lift_over_assumptions(&ax, &[]).prop(), ax.prop());
        assert_eq!(lift_over_params(&ax, &[]).prop(), ax.prop());
    }

    #[test]
    fn assumption_lift_of_impi() {
        let thy = Theory::builtin("IPL").unwrap();
        let ax = axiom(&thy, "impI").unwrap();
        let theta = tr(bin("&", f("A"), f("B")));
        let l = lift_over_assumptions(&ax, std::slice::from_ref(&theta));
        let a = Term::var("A", 0, form());
        let b = Term::var("B", 0, form());
        let expect = Term::imp(
            Term::imp(theta.clone(), Term::imp(tr(a.clone()), tr(b.clone()))),
            Term::imp(theta, tr(bin("-->", a, b))),
        );
        assert_eq!(l.prop(), &expect);
    }

    #[test]
    fn resolve_impi_on_initial_state() {
        let thy = Theory::builtin("IPL").unwrap();
        let goal = tr(bin("-->", bin("&", f("A"), f("B")), bin("-->", f("C"), bin("&", f("A"), f("C")))));
        let state = implies_intr(&goal, &assume(&thy, &goal).unwrap()).unwrap();
        let ax = axiom(&thy, "impI").unwrap();
        let out: Vec<_> = resolve(&ax, 1, &state).unwrap().collect();
        assert_eq!(out.len(), 1);
        let sub = Term::imp(
            tr(bin("&", f("A"), f("B"))),
            tr(bin("-->", f("C"), bin("&", f("A"), f("C")))),
        );
        assert_eq!(out[0].prop(), &Term::imp(sub, goal));
        assert!(matches!(resolve(&ax, 2, &state), Err(Error::NoSubgoal(2))));
    }

    #[test]
    fn assumption_closes_subgoal() {
        let thy = Theory::builtin("IPL").unwrap();
        let c = tr(f("C"));
        let goal = Term::imp(c.clone(), c.clone());
        let state = implies_intr(&goal, &assume(&thy, &goal).unwrap()).unwrap();
        // the state's only subgoal is C ==> C
        let out: Vec<_> = assumption(1, &state).unwrap().collect();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].prop(), &goal);
        let d = tr(f("D"));
        let g2 = Term::imp(c, d);
        let s2 = implies_intr(&g2, &assume(&thy, &g2).unwrap()).unwrap();
        assert_eq!(assumption(1, &s2).unwrap().count(), 0);
    }

    #[test]
    fn renaming_keeps_rule_variables_apart() {
        let thy = Theory::builtin("IPL").unwrap();
        let ax = axiom(&thy, "conjE1").unwrap();
        // a state that already mentions ?A.0 and ?B.0
        let conj = axiom(&thy, "conjI").unwrap();
        let s = Subst::new();
        let state = kernel::instantiate(&s, &conj).unwrap();
        let out: Vec<_> = resolve(&ax, 1, &state).unwrap().collect();
        assert!(!out.is_empty());
        for th in out {
            for v in term::vars(th.prop()) {
                assert!(v.index == 0 || v.index as i64 > state.max_index(), "{v:?}");
            }
        }
    }

    #[test]
    fn resolve_under_assumption_keeps_premises_apart() {
        let thy = Theory::builtin("IPL").unwrap();
        let h = tr(bin("&", f("A"), f("B")));
        let goal = Term::imp(h.clone(), tr(bin("&", f("B"), f("A"))));
        let state = implies_intr(&goal, &assume(&thy, &goal).unwrap()).unwrap();
        let ax = axiom(&thy, "conjI").unwrap();
        let out: Vec<_> = resolve(&ax, 1, &state).unwrap().collect();
        assert_eq!(out.len(), 1);
        let want = Term::list_imp([Term::imp(h.clone(), tr(f("B"))), Term::imp(h, tr(f("A")))], goal);
        assert_eq!(out[0].prop(), &want);
    }
}
