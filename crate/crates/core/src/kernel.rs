//! The trusted kernel. A [`Theorem`] can only be built by the functions in
//! this module (and by the lifting/resolution code in `rule`, which uses
//! the crate-private constructor).
//!
//! Invariants of every theorem: `prop` and the hypotheses are normal,
//! well-typed propositions of its theory; hypotheses contain no schematic
//! variables; flex-flex constraints are closed pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::term::{self, aconv, norm, type_of, Name, Subst, Term, Type, Var};
use crate::theory::Theory;
use crate::unify::DisagreementPair;

/// `hyps ⊢ prop`, subject to the flex-flex constraints `flexflex`.
#[derive(Clone)]
pub struct Theorem {
    thy: Arc<Theory>,
    hyps: Vec<Term>,
    flexflex: Vec<DisagreementPair>,
    prop: Term,
}

impl fmt::Debug for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ⊢ ", self.hyps)?;
        for p in &self.flexflex {
            write!(f, "{:?} == {:?} ==> ", p.lhs, p.rhs)?;
        }
        write!(f, "{:?}", self.prop)
    }
}

impl Theorem {
    pub(crate) fn new_unchecked(
        thy: Arc<Theory>,
        hyps: Vec<Term>,
        flexflex: Vec<DisagreementPair>,
        prop: Term,
    ) -> Theorem {
        let th = Theorem { thy, hyps, flexflex, prop };
        debug_assert_eq!(th.check_invariants(), Ok(()), "{th:?}");
        th
    }

    pub fn theory(&self) -> &Arc<Theory> {
        &self.thy
    }

    pub fn hyps(&self) -> &[Term] {
        &self.hyps
    }

    pub fn flexflex(&self) -> &[DisagreementPair] {
        &self.flexflex
    }

    pub fn prop(&self) -> &Term {
        &self.prop
    }

    /// Largest schematic index in the proposition and constraints.
    pub fn max_index(&self) -> i64 {
        self.flexflex
            .iter()
            .flat_map(|p| [&p.lhs, &p.rhs])
            .chain([&self.prop])
            .map(term::max_index)
            .max()
            .unwrap_or(-1)
    }

    /// Re-check every theorem invariant from scratch.
    pub fn check_invariants(&self) -> Result<()> {
        let prop_ok = |t: &Term| -> Result<()> {
            self.thy.check_prop(t)?;
            if norm(t) != *t {
                return Err(Error::Mismatch(format!("{t:?} is not normal")));
            }
            Ok(())
        };
        prop_ok(&self.prop)?;
        for h in &self.hyps {
            prop_ok(h)?;
            if term::has_vars(h) {
                return Err(Error::SchematicInHyp);
            }
        }
        for p in &self.flexflex {
            if !p.ctx.is_empty() {
                return Err(Error::Mismatch("open flex-flex pair".into()));
            }
            let l = self.thy.check_term(&p.lhs, &[])?;
            let r = self.thy.check_term(&p.rhs, &[])?;
            if l != r {
                return Err(Error::IllTyped("flex-flex pair sides differ in type".into()));
            }
        }
        Ok(())
    }
}

/// The theory of a theorem combining material from `a` and `b`.
pub(crate) fn join(a: &Arc<Theory>, b: &Arc<Theory>) -> Result<Arc<Theory>> {
    if Arc::ptr_eq(a, b) || a.descends_from(b.name()) {
        Ok(a.clone())
    } else if b.descends_from(a.name()) {
        Ok(b.clone())
    } else {
        Err(Error::TheoryMismatch(a.name().to_string(), b.name().to_string()))
    }
}

/// Union, keeping first occurrences in order.
pub(crate) fn union_hyps(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out = a.to_vec();
    for h in b {
        if !out.iter().any(|g| aconv(g, h)) {
            out.push(h.clone());
        }
    }
    out
}

pub(crate) fn union_flexflex(a: &[DisagreementPair], b: &[DisagreementPair]) -> Vec<DisagreementPair> {
    let mut out = a.to_vec();
    for p in b {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

fn check_free(x: &Term) -> Result<(&str, &Type)> {
    match x {
        Term::Free(n, ty) => Ok((n, ty)),
        _ => Err(Error::NotAFree),
    }
}

fn eigen_check(name: &str, ty: &Type, th: &Theorem) -> Result<()> {
    let in_hyps = th.hyps.iter().any(|h| term::free_occurs(name, ty, h));
    let in_ff = th
        .flexflex
        .iter()
        .any(|p| term::free_occurs(name, ty, &p.lhs) || term::free_occurs(name, ty, &p.rhs));
    if in_hyps || in_ff {
        Err(Error::EigenvariableViolation(name.to_string()))
    } else {
        Ok(())
    }
}

/// `φ ⊢ φ`
pub fn assume(thy: &Arc<Theory>, phi: &Term) -> Result<Theorem> {
    let phi = thy.check_prop(phi)?;
    if term::has_vars(&phi) {
        return Err(Error::SchematicInHyp);
    }
    Ok(Theorem { thy: thy.clone(), hyps: vec![phi.clone()], flexflex: Vec::new(), prop: phi })
}

/// Discharge `φ`: `Ψ − {φ} ⊢ φ ==> ψ`.
pub fn implies_intr(phi: &Term, th: &Theorem) -> Result<Theorem> {
    let phi = th.thy.check_prop(phi)?;
    let hyps = th.hyps.iter().filter(|h| !aconv(h, &phi)).cloned().collect();
    Ok(Theorem {
        thy: th.thy.clone(),
        hyps,
        flexflex: th.flexflex.clone(),
        prop: Term::imp(phi, th.prop.clone()),
    })
}

/// From `φ ==> ψ` and `φ`, infer `ψ`.
pub fn implies_elim(th_ab: &Theorem, th_a: &Theorem) -> Result<Theorem> {
    let (a, b) = th_ab.prop.dest_imp().ok_or(Error::NotImplication)?;
    if !aconv(a, &th_a.prop) {
        return Err(Error::PremiseMismatch);
    }
    Ok(Theorem {
        thy: join(&th_ab.thy, &th_a.thy)?,
        hyps: union_hyps(&th_ab.hyps, &th_a.hyps),
        flexflex: union_flexflex(&th_ab.flexflex, &th_a.flexflex),
        prop: b.clone(),
    })
}

/// Generalize over the free variable `x`, which must not occur in the
/// hypotheses or constraints.
pub fn forall_intr(x: &Term, th: &Theorem) -> Result<Theorem> {
    let (name, ty) = check_free(x)?;
    th.thy.check_term(x, &[])?;
    eigen_check(name, ty, th)?;
    let prop = norm(&Term::all(name, ty.clone(), term::abstract_body(x, &th.prop)));
    Ok(Theorem { prop, ..th.clone() })
}

/// Instantiate the outermost `!!` with `t`.
pub fn forall_elim(t: &Term, th: &Theorem) -> Result<Theorem> {
    let (bty, f) = th.prop.dest_all().ok_or(Error::NotQuantified)?;
    let ty = th.thy.check_term(t, &[])?;
    if ty != *bty {
        return Err(Error::IllTyped(format!("instance has type {ty}, binder has type {bty}")));
    }
    let prop = norm(&Term::app(f.clone(), t.clone()));
    Ok(Theorem { prop, ..th.clone() })
}

/// Apply `s` to the proposition and constraints. Hypotheses are schematic
/// free, so they are unaffected.
pub fn instantiate(s: &Subst, th: &Theorem) -> Result<Theorem> {
    for (v, img) in s.iter() {
        let ty = th.thy.check_term(img, &[])?;
        if ty != v.ty {
            return Err(Error::IllTyped(format!("image of {v:?} has type {ty}")));
        }
    }
    let flexflex = th
        .flexflex
        .iter()
        .map(|p| DisagreementPair::new(s.apply(&p.lhs), s.apply(&p.rhs)))
        .filter(|p| !aconv(&p.lhs, &p.rhs))
        .fold(Vec::new(), |acc, p| union_flexflex(&acc, &[p]));
    Ok(Theorem {
        thy: th.thy.clone(),
        hyps: th.hyps.clone(),
        flexflex,
        prop: s.apply(&th.prop),
    })
}

/// Rename every schematic `?v.i` to `?v.(i+k)`. An injective renaming is
/// an instance, so this is [`instantiate`] with a renaming substitution.
pub fn incr_indexes(th: &Theorem, k: u32) -> Theorem {
    if k == 0 {
        return th.clone();
    }
    let mut vars = term::vars(&th.prop);
    for p in &th.flexflex {
        vars.extend(term::vars(&p.lhs));
        vars.extend(term::vars(&p.rhs));
    }
    let mut s = Subst::new();
    for v in vars {
        let img = Term::Var(Var { index: v.index + k, ..v.clone() });
        s.insert(v, img).expect("renaming preserves types");
    }
    instantiate(&s, th).expect("renaming is well typed")
}

/// `⊢ a == a`
pub fn reflexive(thy: &Arc<Theory>, a: &Term) -> Result<Theorem> {
    let ty = thy.check_term(a, &[])?;
    let a = norm(a);
    Ok(Theorem {
        thy: thy.clone(),
        hyps: Vec::new(),
        flexflex: Vec::new(),
        prop: Term::equals(a.clone(), a, ty),
    })
}

fn dest_eq_typed(t: &Term) -> Result<(&Term, &Term, Type)> {
    let (a, b) = t.dest_eq().ok_or(Error::NotEquality)?;
    Ok((a, b, type_of(a, &[])?))
}

pub fn symmetric(th: &Theorem) -> Result<Theorem> {
    let (a, b, ty) = dest_eq_typed(&th.prop)?;
    Ok(Theorem { prop: Term::equals(b.clone(), a.clone(), ty), ..th.clone() })
}

pub fn transitive(th1: &Theorem, th2: &Theorem) -> Result<Theorem> {
    let (a, b, ty) = dest_eq_typed(&th1.prop)?;
    let (b2, c, _) = dest_eq_typed(&th2.prop)?;
    if !aconv(b, b2) {
        return Err(Error::MiddleMismatch);
    }
    Ok(Theorem {
        thy: join(&th1.thy, &th2.thy)?,
        hyps: union_hyps(&th1.hyps, &th2.hyps),
        flexflex: union_flexflex(&th1.flexflex, &th2.flexflex),
        prop: Term::equals(a.clone(), c.clone(), ty),
    })
}

/// From `a == b` infer `(%x. a) == (%x. b)`.
pub fn abstract_rule(x: &Term, th: &Theorem) -> Result<Theorem> {
    let (name, ty) = check_free(x)?;
    let (a, b, aty) = dest_eq_typed(&th.prop)?;
    eigen_check(name, ty, th)?;
    let lam = |t: &Term| Term::abs(name, ty.clone(), term::abstract_body(x, t));
    let prop = norm(&Term::equals(lam(a), lam(b), Type::fun(ty.clone(), aty)));
    Ok(Theorem { prop, ..th.clone() })
}

/// From `f == g` and `a == b` infer `f(a) == g(b)`.
pub fn combination(th1: &Theorem, th2: &Theorem) -> Result<Theorem> {
    let (f, g, fty) = dest_eq_typed(&th1.prop)?;
    let (a, b, aty) = dest_eq_typed(&th2.prop)?;
    let res = match fty.dest_fun() {
        Some((dom, cod)) if *dom == aty => cod.clone(),
        _ => return Err(Error::IllTyped(format!("cannot apply {fty} to {aty}"))),
    };
    let prop = norm(&Term::equals(
        Term::app(f.clone(), a.clone()),
        Term::app(g.clone(), b.clone()),
        res,
    ));
    Ok(Theorem {
        thy: join(&th1.thy, &th2.thy)?,
        hyps: union_hyps(&th1.hyps, &th2.hyps),
        flexflex: union_flexflex(&th1.flexflex, &th2.flexflex),
        prop,
    })
}

/// From `φ ⊢ ψ` and `ψ ⊢ φ` infer `⊢ φ == ψ`, discharging both.
pub fn equal_intr(th1: &Theorem, th2: &Theorem) -> Result<Theorem> {
    let phi = &th2.prop;
    let psi = &th1.prop;
    if !th1.hyps.iter().any(|h| aconv(h, phi)) || !th2.hyps.iter().any(|h| aconv(h, psi)) {
        return Err(Error::Mismatch("premises do not match crosswise".into()));
    }
    let h1: Vec<Term> = th1.hyps.iter().filter(|h| !aconv(h, phi)).cloned().collect();
    let h2: Vec<Term> = th2.hyps.iter().filter(|h| !aconv(h, psi)).cloned().collect();
    Ok(Theorem {
        thy: join(&th1.thy, &th2.thy)?,
        hyps: union_hyps(&h1, &h2),
        flexflex: union_flexflex(&th1.flexflex, &th2.flexflex),
        prop: Term::equals(phi.clone(), psi.clone(), Type::prop()),
    })
}

/// From `φ == ψ` and `φ` infer `ψ`.
pub fn equal_elim(th_eq: &Theorem, th: &Theorem) -> Result<Theorem> {
    let (phi, psi, ty) = dest_eq_typed(&th_eq.prop)?;
    if !ty.is_prop() {
        return Err(Error::Mismatch("not an equality of propositions".into()));
    }
    if !aconv(phi, &th.prop) {
        return Err(Error::Mismatch("left-hand side differs from the theorem".into()));
    }
    Ok(Theorem {
        thy: join(&th_eq.thy, &th.thy)?,
        hyps: union_hyps(&th_eq.hyps, &th.hyps),
        flexflex: union_flexflex(&th_eq.flexflex, &th.flexflex),
        prop: psi.clone(),
    })
}

/// `⊢ t == norm(t)`. Theorems are stored normalized, so both sides print
/// as the normal form.
pub fn beta_eta_conversion(thy: &Arc<Theory>, t: &Term) -> Result<Theorem> {
    let ty = thy.check_term(t, &[])?;
    Ok(Theorem {
        thy: thy.clone(),
        hyps: Vec::new(),
        flexflex: Vec::new(),
        prop: norm(&Term::equals(t.clone(), norm(t), ty)),
    })
}

/// The named axiom in schematic form.
pub fn axiom(thy: &Arc<Theory>, name: &str) -> Result<Theorem> {
    let prop = thy.axiom(name).ok_or_else(|| Error::UnknownAxiom(name.to_string()))?;
    Ok(Theorem { thy: thy.clone(), hyps: Vec::new(), flexflex: Vec::new(), prop: prop.clone() })
}

/// `⊢ K == a` for a defined constant `K`.
pub fn definition(thy: &Arc<Theory>, konst: &str) -> Result<Theorem> {
    let def = thy.def(konst).ok_or_else(|| Error::NoSuchDef(konst.to_string()))?;
    let decl = thy.const_decl(konst).expect("defined constants are declared");
    let k = Term::constant(konst, decl.ty.clone());
    Ok(Theorem {
        thy: thy.clone(),
        hyps: Vec::new(),
        flexflex: Vec::new(),
        prop: Term::equals(k, def.rhs.clone(), decl.ty.clone()),
    })
}

/// Turn every free variable into a schematic. Indices avoid schematics
/// already present with the same name and type.
pub fn varify(th: &Theorem) -> Result<Theorem> {
    if !th.hyps.is_empty() {
        return Err(Error::HasHypotheses);
    }
    let mut all_terms: Vec<&Term> = vec![&th.prop];
    for p in &th.flexflex {
        all_terms.push(&p.lhs);
        all_terms.push(&p.rhs);
    }
    let existing: BTreeSet<Var> = all_terms.iter().flat_map(|t| term::vars(t)).collect();
    let mut images: BTreeMap<(Name, Type), Term> = BTreeMap::new();
    for t in &all_terms {
        for (n, ty) in term::frees(t) {
            let mut index = 0;
            while existing.contains(&Var { name: n.clone(), index, ty: ty.clone() }) {
                index += 1;
            }
            images.insert((n.clone(), ty.clone()), Term::Var(Var { name: n, index, ty }));
        }
    }
    let rename = |t: &Term| {
        norm(&term::map_frees(t, &mut |n, ty| images.get(&(n.clone(), ty.clone())).cloned()))
    };
    let flexflex = th
        .flexflex
        .iter()
        .map(|p| DisagreementPair::new(rename(&p.lhs), rename(&p.rhs)))
        .collect();
    let prop = rename(&th.prop);
    Ok(Theorem { thy: th.thy.clone(), hyps: Vec::new(), flexflex, prop })
}
