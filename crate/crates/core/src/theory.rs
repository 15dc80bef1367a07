//! Object-logics as theories: basic types, typed constants with fixity,
//! named axioms and definitions, arranged in an inheritance graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::kernel::{self, Theorem};
use crate::term::{self, norm, type_of, Name, Term, Type, ALL, EQ, IMP, PROP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixity {
    Prefix,
    Infixl(u32),
    Infixr(u32),
    /// Non-associative.
    Infix(u32),
    Binder,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstDecl {
    /// For the polymorphic meta-constants `!!` and `==` this is a template
    /// over the placeholder base type `'a`.
    pub ty: Type,
    pub fixity: Fixity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: Name,
    pub konst: Name,
    /// Closed, normal right-hand side.
    pub rhs: Term,
}

/// New material for [`Theory::extend`].
#[derive(Clone, Debug, Default)]
pub struct Decls {
    pub types: Vec<String>,
    pub consts: Vec<(String, Type, Fixity)>,
    /// Propositions; outer `!!` binders and free variables become schematics.
    pub axioms: Vec<(String, Term)>,
    /// Named propositions of the form `K == a`.
    pub defs: Vec<(String, Term)>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Theory {
    name: Name,
    parents: Vec<Arc<Theory>>,
    types: Vec<Name>,
    consts: BTreeMap<Name, ConstDecl>,
    axioms: Vec<(Name, Term)>,
    defs: Vec<Definition>,
}

impl fmt::Debug for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Theory({})", self.name)
    }
}

fn poly() -> Type {
    Type::base("'a")
}

impl Theory {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parents(&self) -> &[Arc<Theory>] {
        &self.parents
    }

    /// This theory and its ancestors, each once, parents after children.
    pub fn ancestors(&self) -> Vec<&Theory> {
        let mut out: Vec<&Theory> = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if out.iter().any(|u| u.name == t.name) {
                continue;
            }
            out.push(t);
            for p in t.parents.iter().rev() {
                stack.push(p);
            }
        }
        out
    }

    /// Is a theory named `name` this theory or one of its ancestors?
    pub fn descends_from(&self, name: &str) -> bool {
        self.ancestors().iter().any(|t| &*t.name == name)
    }

    pub fn has_type(&self, name: &str) -> bool {
        self.ancestors().iter().any(|t| t.types.iter().any(|n| &**n == name))
    }

    pub fn const_decl(&self, name: &str) -> Option<&ConstDecl> {
        self.ancestors().into_iter().find_map(|t| t.consts.get(name))
    }

    /// All constants visible here, by name.
    pub fn consts(&self) -> BTreeMap<Name, ConstDecl> {
        let mut out = BTreeMap::new();
        for t in self.ancestors().into_iter().rev() {
            for (n, d) in &t.consts {
                out.insert(n.clone(), d.clone());
            }
        }
        out
    }

    /// Schematic form of an axiom.
    pub fn axiom(&self, name: &str) -> Option<&Term> {
        self.ancestors()
            .into_iter()
            .find_map(|t| t.axioms.iter().find(|(n, _)| &**n == name).map(|(_, p)| p))
    }

    /// Axioms in declaration order, ancestors first.
    pub fn axioms(&self) -> Vec<(Name, Term)> {
        let mut out = Vec::new();
        for t in self.ancestors().into_iter().rev() {
            out.extend(t.axioms.iter().cloned());
        }
        out
    }

    /// Axioms declared by this theory itself.
    pub fn own_axioms(&self) -> &[(Name, Term)] {
        &self.axioms
    }

    pub fn def(&self, konst: &str) -> Option<&Definition> {
        self.ancestors()
            .into_iter()
            .find_map(|t| t.defs.iter().find(|d| &*d.konst == konst))
    }

    pub fn defs(&self) -> Vec<Definition> {
        let mut out = Vec::new();
        for t in self.ancestors().into_iter().rev() {
            out.extend(t.defs.iter().cloned());
        }
        out
    }

    fn check_type(&self, ty: &Type) -> Result<()> {
        let mut bases = BTreeSet::new();
        ty.bases(&mut bases);
        match bases.into_iter().find(|b| !self.has_type(b)) {
            Some(b) => Err(Error::IllTyped(format!("undeclared type {b}"))),
            None => Ok(()),
        }
    }

    fn check_const(&self, name: &str, ty: &Type) -> Result<()> {
        self.check_type(ty)?;
        let ok = match name {
            ALL => matches!(ty.dest_fun(), Some((Type::Fun(_, p), q)) if p.is_prop() && q.is_prop()),
            EQ => match ty.dest_fun() {
                Some((s, rest)) => matches!(rest.dest_fun(), Some((s2, r)) if s2 == s && r.is_prop()),
                None => false,
            },
            _ => match self.const_decl(name) {
                Some(d) => d.ty == *ty,
                None => return Err(Error::IllTyped(format!("undeclared constant {name}"))),
            },
        };
        if ok {
            Ok(())
        } else {
            Err(Error::IllTyped(format!("constant {name} used at type {ty}")))
        }
    }

    /// Type of `t` in binder context `ctx`, checking every constant and
    /// type against this theory's signature.
    pub fn check_term(&self, t: &Term, ctx: &[Type]) -> Result<Type> {
        fn walk(thy: &Theory, t: &Term) -> Result<()> {
            match t {
                Term::Const(n, ty) => thy.check_const(n, ty),
                Term::Free(_, ty) => thy.check_type(ty),
                Term::Var(v) => thy.check_type(&v.ty),
                Term::Bound(_) => Ok(()),
                Term::Abs(_, ty, b) => {
                    thy.check_type(ty)?;
                    walk(thy, b)
                }
                Term::App(f, a) => {
                    walk(thy, f)?;
                    walk(thy, a)
                }
            }
        }
        walk(self, t)?;
        type_of(t, ctx)
    }

    /// A closed term of type `prop`, normalized.
    pub fn check_prop(&self, t: &Term) -> Result<Term> {
        let ty = self.check_term(t, &[])?;
        if !ty.is_prop() {
            return Err(Error::IllTyped(format!("expected a proposition, found type {ty}")));
        }
        Ok(norm(t))
    }

    pub fn extend(parent: &Arc<Theory>, name: &str, decls: Decls) -> Result<Arc<Theory>> {
        Theory::extend_many(name, vec![parent.clone()], decls)
    }

    /// A new theory inheriting from every parent. Ancestors shared between
    /// parents are identified by name.
    pub fn extend_many(name: &str, parents: Vec<Arc<Theory>>, decls: Decls) -> Result<Arc<Theory>> {
        let mut thy = Theory {
            name: name.into(),
            parents,
            types: Vec::new(),
            consts: BTreeMap::new(),
            axioms: Vec::new(),
            defs: Vec::new(),
        };
        if thy.parents.iter().any(|p| p.descends_from(name)) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        thy.check_inherited()?;

        for ty in decls.types {
            if thy.has_type(&ty) {
                return Err(Error::DuplicateName(ty));
            }
            thy.types.push(ty.into());
        }
        for (c, ty, fixity) in decls.consts {
            if thy.const_decl(&c).is_some() {
                return Err(Error::DuplicateName(c));
            }
            thy.check_type(&ty)?;
            thy.consts.insert(c.into(), ConstDecl { ty, fixity });
        }
        let mut fact_names: BTreeSet<Name> = thy
            .ancestors()
            .iter()
            .flat_map(|t| t.axioms.iter().map(|(n, _)| n.clone()).chain(t.defs.iter().map(|d| d.name.clone())))
            .collect();
        for (n, prop) in decls.axioms {
            if !fact_names.insert(n.as_str().into()) {
                return Err(Error::DuplicateName(n));
            }
            let ty = thy.check_term(&prop, &[]).map_err(|e| Error::IllTypedAxiom(n.clone(), e.to_string()))?;
            if !ty.is_prop() {
                return Err(Error::IllTypedAxiom(n, format!("has type {ty}, expected prop")));
            }
            thy.axioms.push((n.into(), schematic_form(&prop)));
        }
        for (n, prop) in decls.defs {
            if !fact_names.insert(n.as_str().into()) {
                return Err(Error::DuplicateName(n));
            }
            let def = thy.check_def(&n, &prop)?;
            thy.defs.push(def);
        }
        Ok(Arc::new(thy))
    }

    fn check_inherited(&self) -> Result<()> {
        let anc = self.ancestors();
        let mut types = BTreeSet::new();
        let mut consts = BTreeSet::new();
        let mut facts = BTreeSet::new();
        for t in &anc[1..] {
            for n in &t.types {
                if !types.insert(n.clone()) {
                    return Err(Error::DuplicateName(n.to_string()));
                }
            }
            for n in t.consts.keys() {
                if !consts.insert(n.clone()) {
                    return Err(Error::DuplicateName(n.to_string()));
                }
            }
            for n in t.axioms.iter().map(|(n, _)| n).chain(t.defs.iter().map(|d| &d.name)) {
                if !facts.insert(n.clone()) {
                    return Err(Error::DuplicateName(n.to_string()));
                }
            }
        }
        Ok(())
    }

    fn check_def(&self, name: &str, prop: &Term) -> Result<Definition> {
        let bad = |msg: &str| Error::BadDefinition(name.to_string(), msg.to_string());
        let ty = self.check_term(prop, &[]).map_err(|e| bad(&e.to_string()))?;
        if !ty.is_prop() {
            return Err(bad("not a proposition"));
        }
        let prop = norm(prop);
        let Some((lhs, rhs)) = prop.dest_eq() else {
            return Err(bad("expected K == a"));
        };
        let Term::Const(k, _) = lhs else {
            return Err(bad("left-hand side must be a constant"));
        };
        if matches!(&**k, IMP | ALL | EQ) {
            return Err(bad("cannot define a meta-constant"));
        }
        if self.def(k).is_some() {
            return Err(Error::DuplicateName(k.to_string()));
        }
        if !term::frees(rhs).is_empty() || term::has_vars(rhs) {
            return Err(bad("right-hand side must be closed"));
        }
        if term::occurs(lhs, rhs) {
            return Err(bad("definition is recursive"));
        }
        Ok(Definition { name: name.into(), konst: k.clone(), rhs: rhs.clone() })
    }

    fn root(name: &str, types: &[&str], consts: Vec<(&str, Type, Fixity)>) -> Theory {
        Theory {
            name: name.into(),
            parents: Vec::new(),
            types: types.iter().map(|&t| t.into()).collect(),
            consts: consts
                .into_iter()
                .map(|(n, ty, fixity)| (n.into(), ConstDecl { ty, fixity }))
                .collect(),
            axioms: Vec::new(),
            defs: Vec::new(),
        }
    }

    /// One of the shipped theories `Pure`, `IPL` or `IFOL`. Repeated calls
    /// return the same value.
    pub fn builtin(name: &str) -> Result<Arc<Theory>> {
        static PURE: OnceLock<Arc<Theory>> = OnceLock::new();
        static IPL: OnceLock<Arc<Theory>> = OnceLock::new();
        static IFOL: OnceLock<Arc<Theory>> = OnceLock::new();
        match name {
            "Pure" => Ok(PURE.get_or_init(build_pure).clone()),
            "IPL" => Ok(IPL.get_or_init(|| build_ipl(Theory::builtin("Pure").unwrap())).clone()),
            "IFOL" => Ok(IFOL.get_or_init(|| build_ifol(Theory::builtin("IPL").unwrap())).clone()),
            _ => Err(Error::UnknownTheory(name.to_string())),
        }
    }
}

/// Drop outer `!!` binders and turn every free variable into a schematic of
/// index 0.
pub fn schematic_form(t: &Term) -> Term {
    let mut t = norm(t);
    while let Some((bty, f)) = t.dest_all() {
        let (hint, body) = match f {
            Term::Abs(h, _, b) => (h.clone(), (**b).clone()),
            _ => ("x".into(), Term::app(term::incr_bounds(f, 1, 0), Term::Bound(0))),
        };
        let v = Term::var(&hint, 0, bty.clone());
        t = norm(&term::subst_bound(&v, &body));
    }
    norm(&term::map_frees(&t, &mut |n, ty| Some(Term::var(n, 0, ty.clone()))))
}

fn build_pure() -> Arc<Theory> {
    let p = Type::prop();
    let a = poly();
    Arc::new(Theory::root(
        "Pure",
        &[PROP],
        vec![
            (IMP, Type::curried(&[p.clone(), p.clone()], p.clone()), Fixity::Infixr(1)),
            (EQ, Type::curried(&[a.clone(), a.clone()], p.clone()), Fixity::Infix(2)),
            (ALL, Type::fun(Type::fun(a, p.clone()), p), Fixity::Binder),
        ],
    ))
}

fn ipl_signature() -> (Type, Term, Term, Term, Term, Term) {
    let form = Type::base("form");
    let bin = Type::curried(&[form.clone(), form.clone()], form.clone());
    (
        form.clone(),
        Term::constant("Tr", Type::fun(form.clone(), Type::prop())),
        Term::constant("&", bin.clone()),
        Term::constant("|", bin.clone()),
        Term::constant("-->", bin),
        Term::constant("False", form),
    )
}

fn build_ipl(pure: Arc<Theory>) -> Arc<Theory> {
    let (form, tr, conj, disj, imp, fls) = ipl_signature();
    let v = |n: &str| Term::var(n, 0, form.clone());
    let t = |x: Term| Term::app(tr.clone(), x);
    let op = |c: &Term, x: Term, y: Term| Term::list_comb(c.clone(), [x, y]);
    let (a, b, c) = (v("A"), v("B"), v("C"));
    let axioms = vec![
        ("conjI", Term::list_imp([t(a.clone()), t(b.clone())], t(op(&conj, a.clone(), b.clone())))),
        ("conjE1", Term::imp(t(op(&conj, a.clone(), b.clone())), t(a.clone()))),
        ("conjE2", Term::imp(t(op(&conj, a.clone(), b.clone())), t(b.clone()))),
        ("disjI1", Term::imp(t(a.clone()), t(op(&disj, a.clone(), b.clone())))),
        ("disjI2", Term::imp(t(b.clone()), t(op(&disj, a.clone(), b.clone())))),
        (
            "disjE",
            Term::list_imp(
                [
                    t(op(&disj, a.clone(), b.clone())),
                    Term::imp(t(a.clone()), t(c.clone())),
                    Term::imp(t(b.clone()), t(c.clone())),
                ],
                t(c.clone()),
            ),
        ),
        ("impI", Term::imp(Term::imp(t(a.clone()), t(b.clone())), t(op(&imp, a.clone(), b.clone())))),
        ("mp", Term::list_imp([t(op(&imp, a.clone(), b.clone())), t(a.clone())], t(b.clone()))),
        ("FalseE", Term::imp(t(fls.clone()), t(a.clone()))),
    ];
    let decls = Decls {
        types: vec!["form".into()],
        consts: vec![
            ("Tr".into(), Type::fun(form.clone(), Type::prop()), Fixity::Prefix),
            ("False".into(), form.clone(), Fixity::Prefix),
            ("&".into(), Type::curried(&[form.clone(), form.clone()], form.clone()), Fixity::Infixr(35)),
            ("|".into(), Type::curried(&[form.clone(), form.clone()], form.clone()), Fixity::Infixr(30)),
            ("-->".into(), Type::curried(&[form.clone(), form.clone()], form), Fixity::Infixr(25)),
        ],
        axioms: axioms.into_iter().map(|(n, p)| (n.to_string(), p)).collect(),
        defs: Vec::new(),
    };
    Theory::extend(&pure, "IPL", decls).expect("IPL is well formed")
}

fn build_ifol(ipl: Arc<Theory>) -> Arc<Theory> {
    let (form, tr, ..) = ipl_signature();
    let term_ty = Type::base("term");
    let pred = Type::fun(term_ty.clone(), form.clone());
    let quant = Type::fun(pred.clone(), form.clone());
    let all = Term::constant("ALL", quant.clone());
    let ex = Term::constant("EX", quant.clone());
    let eq = Term::constant("=", Type::curried(&[term_ty.clone(), term_ty.clone()], form.clone()));
    let t = |x: Term| Term::app(tr.clone(), x);
    let f = Term::var("F", 0, pred.clone());
    let y = Term::var("y", 0, term_ty.clone());
    let b = Term::var("B", 0, form.clone());
    let fx = Term::app(f.clone(), Term::Bound(0));
    let q = |c: &Term| Term::app(c.clone(), Term::abs("x", term_ty.clone(), fx.clone()));
    let axioms = vec![
        ("allI", Term::imp(Term::all("x", term_ty.clone(), t(fx.clone())), t(q(&all)))),
        ("spec", Term::imp(t(q(&all)), t(Term::app(f.clone(), y.clone())))),
        ("exI", Term::imp(t(Term::app(f.clone(), y.clone())), t(q(&ex)))),
        (
            "exE",
            Term::list_imp(
                [t(q(&ex)), Term::all("x", term_ty.clone(), Term::imp(t(fx.clone()), t(b.clone())))],
                t(b.clone()),
            ),
        ),
        ("refl", t(Term::list_comb(eq, [y.clone(), y]))),
    ];
    let decls = Decls {
        types: vec!["term".into()],
        consts: vec![
            ("ALL".into(), quant.clone(), Fixity::Binder),
            ("EX".into(), quant, Fixity::Binder),
            ("=".into(), Type::curried(&[term_ty.clone(), term_ty], form), Fixity::Infixl(50)),
        ],
        axioms: axioms.into_iter().map(|(n, p)| (n.to_string(), p)).collect(),
        defs: Vec::new(),
    };
    Theory::extend(&ipl, "IFOL", decls).expect("IFOL is well formed")
}

/// Body of `λk. t` where every literal occurrence of the closed `target`
/// becomes the new bound variable.
fn abstract_closed(target: &Term, t: &Term, hint: &str, ty: Type) -> Term {
    Term::abs(hint, ty, term::abstract_body(target, t))
}

/// Rewrite every occurrence of the defined constant `konst` in `th` by its
/// definition, through the kernel's equality rules.
pub fn unfold_def(thy: &Arc<Theory>, konst: &str, th: &Theorem) -> Result<Theorem> {
    let def = kernel::definition(thy, konst)?;
    let (k, _) = def.prop().dest_eq().expect("definitions are equations");
    let ty = type_of(k, &[])?;
    let lam = abstract_closed(k, th.prop(), konst, ty);
    let eq = kernel::combination(&kernel::reflexive(thy, &lam)?, &def)?;
    kernel::equal_elim(&eq, th)
}

/// Match `pat` (the body of a definiens under `n` binders) against `t`,
/// filling `inst` with the parameter instances, innermost first.
fn match_body(pat: &Term, t: &Term, n: u32, lev: u32, inst: &mut [Option<Term>]) -> bool {
    match (pat, t) {
        (Term::Bound(j), _) if *j >= lev && *j < lev + n => {
            if (0..lev).any(|i| term::loose_bound_occurs(t, i)) {
                return false;
            }
            let arg = term::incr_bounds(t, -(lev as i64), 0);
            let slot = &mut inst[(*j - lev) as usize];
            match slot {
                Some(prev) => *prev == arg,
                None => {
                    *slot = Some(arg);
                    true
                }
            }
        }
        (Term::Bound(j), Term::Bound(k)) => j == k,
        (Term::Abs(_, s, a), Term::Abs(_, u, b)) => s == u && match_body(a, b, n, lev + 1, inst),
        (Term::App(f, a), Term::App(g, b)) => {
            match_body(f, g, n, lev, inst) && match_body(a, b, n, lev, inst)
        }
        (Term::Const(..) | Term::Free(..) | Term::Var(_), _) => pat == t,
        _ => false,
    }
}

/// First closed subterm of `t` that is an instance of `λx̄. body`, with
/// the instances of `x̄` in application order.
fn find_instance(body: &Term, n: u32, t: &Term) -> Option<(Term, Vec<Term>)> {
    if !term::has_loose_bounds(t) {
        let mut inst = vec![None; n as usize];
        if match_body(body, t, n, 0, &mut inst) && inst.iter().all(Option::is_some) {
            let args = inst.into_iter().rev().map(Option::unwrap).collect();
            return Some((t.clone(), args));
        }
    }
    match t {
        Term::Abs(_, _, b) => find_instance(body, n, b),
        Term::App(f, a) => find_instance(body, n, f).or_else(|| find_instance(body, n, a)),
        _ => None,
    }
}

/// Replace instances of the definiens of `konst` in `th` by `konst` applied
/// to the matching arguments. Only definientia with a constant or free head
/// are folded under binders; otherwise only literal occurrences are.
pub fn fold_def(thy: &Arc<Theory>, konst: &str, th: &Theorem) -> Result<Theorem> {
    let def = kernel::definition(thy, konst)?;
    let (_, rhs) = def.prop().dest_eq().expect("definitions are equations");
    let mut body = rhs.clone();
    let mut n = 0;
    while let Term::Abs(_, _, b) = body {
        body = (*b).clone();
        n += 1;
    }
    let rigid = matches!(body.head(), Term::Const(..) | Term::Free(..));
    let mut th = th.clone();
    loop {
        let found = if rigid {
            find_instance(&body, n, th.prop())
        } else if term::occurs(rhs, th.prop()) {
            Some((rhs.clone(), Vec::new()))
        } else {
            None
        };
        let Some((target, args)) = found else { return Ok(th) };
        // ⊢ K(ā) == target
        let mut eq = def.clone();
        for a in &args {
            eq = kernel::combination(&eq, &kernel::reflexive(thy, a)?)?;
        }
        let ty = type_of(&target, &[])?;
        let lam = abstract_closed(&target, th.prop(), konst, ty);
        let step = kernel::combination(&kernel::reflexive(thy, &lam)?, &kernel::symmetric(&eq)?)?;
        th = kernel::equal_elim(&step, &th)?;
    }
}
