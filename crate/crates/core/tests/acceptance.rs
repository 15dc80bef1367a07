//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::*;
use metaproof::kernel::{self, Theorem};
use metaproof::rule::{lift_over_assumptions, lift_over_params};
use metaproof::syntax::{parse_prop, print_thm};
use metaproof::tactic::{finalize, initial_state, rtac, ProofState};
use metaproof::term::{self, aconv, norm, reduce_with, type_of, Strategy};
use metaproof::unify::{unify, unify_terms, DEFAULT_DEPTH};
use metaproof::{DisagreementPair, Env, Error, ParseCtx, Session, Subst, Term, Theory, Type, Var};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("golden trace: A & B --> C --> A & C by resolution and assumption", imp_conj_trace),
        ("derived rule: backwards conjunction elimination", derived_conj_rule),
        ("hypothetical rule: double negation entails excluded middle", hypothetical_rule),
        ("quantifier trace: ALL z. G(z) | H(z) from ALL z. G(z)", quantifier_trace),
        ("success/failure pair: ALL x. EX y. x = y vs EX y. ALL x. x = y", success_failure_pair),
        ("lifting column: five states for EX u. ALL x. EX v. ALL y. EX w. P", lifting_column),
        ("normalization property suite: 1000 random terms", normalization_suite),
        ("kernel hygiene suite: 500 adversarial constructions", hygiene_suite),
        ("unifier soundness suite: 500 first-order pairs", unifier_suite),
        ("lifting oracle: 100 rules lifted over assumptions", lifting_oracle),
        ("meta-proof correspondence for &I, -->I, EX I and EX E", figure_derivations),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(())) => println!("PASS {name}"),
            Ok(Err(msg)) => {
                failed += 1;
                println!("FAIL {name}: {msg}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

// Driving the session

struct Run {
    session: Session,
    id: u64,
    states: Vec<Theorem>,
}

impl Run {
    fn start(thy: &str, goal: &str, asms: &[&str]) -> Result<Run, String> {
        let mut session = Session::new();
        let asms: Vec<String> = asms.iter().map(|s| s.to_string()).collect();
        let v = session.goal(thy, goal, &asms).map_err(|e| e.to_string())?;
        let id = v["proofId"].as_u64().ok_or("no proofId")?;
        let states = vec![session.current(id).unwrap().thm().clone()];
        Ok(Run { session, id, states })
    }

    fn apply(&mut self, tac: &str) -> Result<Value, String> {
        let v = self.session.exec_text(&format!("apply {tac}")).expect("a command");
        if v["ok"] != Value::Bool(true) {
            return Err(format!("{tac}: {}", v["error"]));
        }
        self.states.push(self.state().thm().clone());
        Ok(v)
    }

    fn script(&mut self, tacs: &[&str]) -> Outcome {
        for t in tacs {
            self.apply(t)?;
        }
        Ok(())
    }

    fn state(&self) -> &ProofState {
        self.session.current(self.id).unwrap()
    }

    fn goal(&self) -> Term {
        self.state().goal().clone()
    }
}

fn expect_thm(th: &Theorem, thy: &Arc<Theory>, want: &str) -> Outcome {
    let w = parse_prop(thy, want, &ParseCtx::new()).map_err(|e| e.to_string())?;
    ensure!(th.hyps().is_empty(), "unexpected hypotheses in {th}");
    ensure!(th.flexflex().is_empty(), "unexpected constraints in {th}");
    ensure!(same_upto_vars(th.prop(), &w), "got {}, expected {want}", print_thm(th));
    th.check_invariants().map_err(|e| e.to_string())
}

// Criteria

fn imp_conj_trace() -> Outcome {
    let ipl = thy("IPL");
    let mut run = Run::start("IPL", "Tr(A & B --> C --> A & C)", &[])?;
    run.script(&[
        "resolve impI",
        "resolve impI",
        "resolve conjI",
        "assume 2",
        "resolve conjE1 where B := \"B\"",
        "assume 1",
    ])?;
    check_golden(&ipl, &run.goal(), &run.states, "imp_conj")?;
    let th = finalize(run.state()).map_err(|e| e.to_string())?;
    expect_thm(&th, &ipl, "Tr(?A & ?B --> (?C --> ?A & ?C))")?;

    // impI lifted over the assumption A & B
    let impi = kernel::axiom(&ipl, "impI").unwrap();
    let lifted = lift_over_assumptions(&impi, &[read(&ipl, "Tr(A & B)")]);
    let want = read(&ipl, "(Tr(A & B) ==> Tr(?A2) ==> Tr(?B2)) ==> Tr(A & B) ==> Tr(?A2 --> ?B2)");
    ensure!(same_upto_vars(lifted.prop(), &want), "lifted impI is {lifted}");
    Ok(())
}

fn derived_conj_rule() -> Outcome {
    let ipl = thy("IPL");
    let mut run = Run::start("IPL", "Tr(C)", &["Tr(A & B)", "Tr(A) ==> Tr(B) ==> Tr(C)"])?;
    run.script(&["resolve asm2", "resolve conjE1", "resolve asm1", "resolve conjE2", "resolve asm1"])?;
    check_golden(&ipl, &run.goal(), &run.states, "conj_elim_rule")?;
    let th = run.session.finish(run.id).map_err(|e| e.to_string())?;
    expect_thm(&th, &ipl, "Tr(?A & ?B) ==> (Tr(?A) ==> Tr(?B) ==> Tr(?C)) ==> Tr(?C)")
}

fn hypothetical_rule() -> Outcome {
    let ipl = thy("IPL");
    let dn = "!!A. Tr((A --> False) --> False) ==> Tr(A)";
    let mut run = Run::start("IPL", "Tr(B | (B --> False))", &[dn])?;
    run.script(&[
        "resolve asm1",
        "resolve impI",
        "resolve mp where A := \"B --> False\"",
        // (B --> False) --> False
        "resolve impI",
        "resolve mp where A := \"B | (B --> False)\"",
        "assume 1",
        "resolve disjI2",
        "assume 1",
        // B --> False
        "resolve impI",
        "resolve mp where A := \"B | (B --> False)\"",
        "assume 1",
        "resolve disjI1",
        "assume 1",
    ])?;
    ensure!(run.state().nsubgoals() == 0, "{} subgoals left", run.state().nsubgoals());
    let th = run.session.finish(run.id).map_err(|e| e.to_string())?;
    expect_thm(&th, &ipl, &format!("({dn}) ==> Tr(?B | (?B --> False))"))?;

    // generalize the conclusion: (!!A. ...) ==> (!!B. Tr(B | (B --> False)))
    let b = Term::free("B", form());
    let v = term::vars(th.prop()).into_iter().find(|v| v.ty == form()).ok_or("no ?B")?;
    let th = kernel::instantiate(&Subst::new().with(v, b.clone()).unwrap(), &th).map_err(|e| e.to_string())?;
    let dn_t = read(&ipl, dn);
    let body = kernel::implies_elim(&th, &kernel::assume(&ipl, &dn_t).unwrap()).map_err(|e| e.to_string())?;
    let gen = kernel::forall_intr(&b, &body).map_err(|e| e.to_string())?;
    let th = kernel::implies_intr(&dn_t, &gen).map_err(|e| e.to_string())?;
    let want = read(&ipl, &format!("({dn}) ==> (!!B. Tr(B | (B --> False)))"));
    ensure!(th.hyps().is_empty() && aconv(th.prop(), &want), "generalized form is {th}");
    Ok(())
}

fn quantifier_trace() -> Outcome {
    let ifol = thy("IFOL");
    let goal = read(&ifol, "Tr(ALL z. G(z) | H(z))");
    let hyp = parse_prop(&ifol, "Tr(ALL z. G(z))", &ParseCtx::from_terms([&goal])).unwrap();
    let ax = |n: &str| kernel::axiom(&ifol, n).unwrap();
    let step = |st: &ProofState, rule: Theorem| -> Result<ProofState, String> {
        let mut s = rtac(rule, 1).apply(st).map_err(|e| e.to_string())?;
        s.next().ok_or_else(|| "no unifier".to_string())
    };

    // spec used forwards on the hypothesis: [ALL z. G(z)] |- Tr(G(?y))
    let spec = ax("spec");
    let f = term::vars(spec.prop()).into_iter().find(|v| &*v.name == "F").unwrap();
    let g = Term::free("G", Type::fun(term_ty(), form()));
    let spec_g = kernel::instantiate(&Subst::new().with(f, g).unwrap(), &spec).unwrap();
    let fwd = kernel::implies_elim(&spec_g, &kernel::assume(&ifol, &hyp).unwrap()).map_err(|e| e.to_string())?;
    let want = parse_prop(&ifol, "Tr(G(?y))", &ParseCtx::from_terms([fwd.prop()])).unwrap();
    ensure!(same_upto_vars(fwd.prop(), &want), "forward step gave {fwd}");

    let s0 = initial_state(&ifol, &goal).unwrap();
    let s1 = step(&s0, ax("allI"))?;
    let s2 = step(&s1, ax("disjI1"))?;
    let s3 = step(&s2, fwd.clone())?;
    let states: Vec<Theorem> = [&s0, &s1, &s2, &s3].iter().map(|s| s.thm().clone()).collect();
    check_golden(&ifol, &goal, &states, "all_disj")?;

    let th = finalize(&s3).map_err(|e| e.to_string())?;
    ensure!(aconv(th.prop(), &goal), "final theorem {th}");
    ensure!(th.hyps().len() == 1 && aconv(&th.hyps()[0], &hyp), "hypotheses {:?}", th.hyps());
    th.check_invariants().map_err(|e| e.to_string())?;

    // the lifted rules used along the way
    let z = [("z".into(), term_ty())];
    let lifted = lift_over_params(&ax("disjI1"), &z);
    let want = read(&ifol, "(!!z::term. Tr(?G(z))) ==> (!!z::term. Tr(?G(z) | ?H(z)))");
    ensure!(same_upto_vars(lifted.prop(), &want), "lifted disjI1 is {lifted}");
    let lifted = lift_over_params(&ax("exI"), &z);
    let want = read(&ifol, "(!!z::term. Tr(?G(z, ?f(z)))) ==> (!!z::term. Tr(EX x. ?G(z, x)))");
    ensure!(same_upto_vars(lifted.prop(), &want), "lifted exI is {lifted}");
    let lifted = lift_over_params(&fwd, &z);
    let want = parse_prop(&ifol, "!!z::term. Tr(G(?f(z)))", &ParseCtx::from_terms([&goal])).unwrap();
    ensure!(same_upto_vars(lifted.prop(), &want), "lifted forward theorem is {lifted}");
    Ok(())
}

fn success_failure_pair() -> Outcome {
    let ifol = thy("IFOL");
    let mut run = Run::start("IFOL", "Tr(ALL x. EX y. x = y)", &[])?;
    run.script(&["resolve allI", "resolve exI"])?;

    // refl lifted over x against !!x. Tr(x = ?f(x)) sets ?f to %x. x
    let st = run.state().clone();
    let sub = st.subgoals()[0].clone();
    let fvar = term::vars(&sub).into_iter().next().ok_or("no unknown in the subgoal")?;
    let refl = kernel::incr_indexes(&kernel::axiom(&ifol, "refl").unwrap(), (st.thm().max_index() + 1) as u32);
    let lifted = lift_over_params(&refl, &[("x".into(), term_ty())]);
    let r = unify(Env::above([&sub, lifted.prop()]), vec![DisagreementPair::new(lifted.prop().clone(), sub.clone())], DEFAULT_DEPTH)
        .next()
        .ok_or("refl does not unify")?;
    let img = r.env.instantiate(&Term::Var(fvar));
    let id = Term::abs("x", term_ty(), Term::Bound(0));
    ensure!(aconv(&img, &id), "?f instantiated to {img:?}");

    run.apply("resolve refl")?;
    check_golden(&ifol, &run.goal(), &run.states, "all_ex_refl")?;
    let th = run.session.finish(run.id).map_err(|e| e.to_string())?;
    expect_thm(&th, &ifol, "Tr(ALL x. EX y. x = y)")?;

    let mut run = Run::start("IFOL", "Tr(EX y. ALL x. x = y)", &[])?;
    run.script(&["resolve exI", "resolve allI"])?;
    check_golden(&ifol, &run.goal(), &run.states, "ex_all_stuck")?;
    let before = run.state().thm().prop().clone();
    let refl = kernel::axiom(&ifol, "refl").unwrap();
    let mut stream = rtac(refl, 1).apply(run.state()).map_err(|e| e.to_string())?;
    ensure!(stream.next().is_none(), "refl unexpectedly solved the stuck subgoal");
    ensure!(run.apply("resolve refl").is_err(), "the session accepted refl");
    ensure!(run.state().thm().prop() == &before, "failed step changed the state");
    Ok(())
}

fn lifting_column() -> Outcome {
    let ifol = thy("IFOL");
    let mut run = Run::start("IFOL", "Tr(EX u. ALL x. EX v. ALL y. EX w. P(u, x, v, y, w))", &[])?;
    run.script(&["resolve exI", "resolve allI", "resolve exI", "resolve allI", "resolve exI"])?;
    check_golden(&ifol, &run.goal(), &run.states, "lifting_column")
}

fn normalization_suite() -> Outcome {
    let mut gen = TermGen::new(0x5eed_0001);
    let mut redexes = 0;
    for k in 0..1000 {
        let (t, ty) = gen.any(30);
        ensure!(t.size() <= 30, "case {k}: generator exceeded the size bound");
        let t_ty = type_of(&t, &[]).map_err(|e| format!("case {k}: generator produced {t:?}: {e}"))?;
        ensure!(t_ty == ty, "case {k}: generator type mismatch");
        let lo = reduce_with(&t, Strategy::LeftmostOutermost, 100_000).ok_or(format!("case {k}: no normal form"))?;
        let inn = reduce_with(&t, Strategy::Innermost, 100_000).ok_or(format!("case {k}: no normal form"))?;
        ensure!(aconv(&lo, &inn), "case {k}: strategies disagree on {t:?}: {lo:?} vs {inn:?}");
        let n = norm(&t);
        if n != t {
            redexes += 1;
        }
        ensure!(aconv(&n, &lo), "case {k}: norm {n:?} differs from reduction {lo:?}");
        ensure!(norm(&n) == n, "case {k}: norm is not idempotent on {t:?}");
        ensure!(type_of(&n, &[]).ok() == Some(ty.clone()), "case {k}: type not preserved by {t:?}");
    }
    ensure!(redexes >= 300, "only {redexes} of 1000 terms contained redexes");
    Ok(())
}

fn hygiene_suite() -> Outcome {
    let ifol = thy("IFOL");
    let mut gen = FormulaGen::new(0x5eed_0002);
    let pred = Term::free("G", Type::fun(term_ty(), form()));
    let mut accepted = Vec::new();
    let mut rejected = 0;

    for k in 0..500 {
        let x = Term::free(["x", "y"].choose(&mut gen.rng).unwrap(), term_ty());
        let phi = gen.tr(2);
        let gx = tr(Term::app(pred.clone(), x.clone()));
        let result: Result<Theorem, Error> = match k % 10 {
            // eigenvariable violations
            0 => {
                let h = kernel::assume(&ifol, &Term::imp(phi.clone(), gx.clone())).unwrap();
                kernel::forall_intr(&x, &h)
            }
            1 => {
                let h = kernel::assume(&ifol, &gx).unwrap();
                let th = kernel::implies_intr(&phi, &h).unwrap();
                kernel::forall_intr(&x, &th)
            }
            // type clashes
            2 => {
                let allth = kernel::forall_intr(&x, &kernel::reflexive(&ifol, &x).unwrap()).unwrap();
                kernel::forall_elim(&gen.formula(1), &allth)
            }
            3 => {
                let ill = Term::app(Term::constant("Tr", Type::fun(form(), Type::prop())), x.clone());
                kernel::assume(&ifol, &ill)
            }
            4 => {
                let conj = kernel::axiom(&ifol, "conjI").unwrap();
                let v = term::vars(conj.prop()).into_iter().next().unwrap();
                let mut s = Subst::new();
                match s.insert(v, x.clone()) {
                    Ok(()) => kernel::instantiate(&s, &conj),
                    Err(e) => Err(e),
                }
            }
            5 => {
                let a = kernel::reflexive(&ifol, &x).unwrap();
                let b = kernel::reflexive(&ifol, &gen.formula(1)).unwrap();
                kernel::transitive(&a, &b)
            }
            6 => {
                let th = kernel::assume(&ifol, &phi).unwrap();
                let other = gen.tr(2);
                let imp = kernel::assume(&ifol, &Term::imp(Term::imp(phi.clone(), phi.clone()), other)).unwrap();
                kernel::implies_elim(&imp, &th)
            }
            // schematic variables in hypotheses
            7 => {
                let v = Term::var("A", 0, form());
                let op = Term::constant("&", Type::curried(&[form(), form()], form()));
                kernel::assume(&ifol, &tr(Term::list_comb(op, [v, gen.formula(1)])))
            }
            // accepted constructions, checked below
            8 => {
                let h = kernel::assume(&ifol, &phi).unwrap();
                let th = kernel::implies_intr(&gx, &kernel::implies_intr(&phi, &h).unwrap()).unwrap();
                kernel::forall_intr(&x, &th).and_then(|t| kernel::forall_elim(&Term::free("c", term_ty()), &t))
            }
            _ => {
                let names = ["conjI", "mp", "disjE", "exE", "allI", "spec"];
                let th = kernel::axiom(&ifol, names.choose(&mut gen.rng).unwrap()).unwrap();
                let mut s = Subst::new();
                for v in term::vars(th.prop()) {
                    let img = if v.ty == form() { gen.formula(2) } else { Term::var(&v.name, v.index + 7, v.ty.clone()) };
                    s.insert(v, img).unwrap();
                }
                kernel::instantiate(&s, &th).and_then(|t| kernel::varify(&t))
            }
        };
        let should_fail = k % 10 < 8;
        match (result, should_fail) {
            (Ok(th), true) => return Err(format!("case {k}: accepted {th}")),
            (Ok(th), false) => accepted.push(th),
            (Err(e), true) => {
                let kind_ok = match k % 10 {
                    0 | 1 => matches!(e, Error::EigenvariableViolation(_)),
                    6 => matches!(e, Error::PremiseMismatch),
                    7 => matches!(e, Error::SchematicInHyp),
                    _ => true,
                };
                ensure!(kind_ok, "case {k}: unexpected error {e}");
                rejected += 1;
            }
            (Err(e), false) => return Err(format!("case {k}: rejected a valid construction: {e}")),
        }
    }
    for th in &accepted {
        th.check_invariants().map_err(|e| format!("invariant breach in {th}: {e}"))?;
    }
    ensure!(rejected == 400 && accepted.len() == 100, "{rejected} rejected, {} accepted", accepted.len());
    Ok(())
}

/// First-order terms for the reference unifier.
#[derive(Clone, Debug, PartialEq)]
enum Fo {
    V(usize),
    F(&'static str, Vec<Fo>),
}

const SIG: [(&str, usize); 4] = [("f", 2), ("g", 1), ("a", 0), ("b", 0)];

fn fo_gen(rng: &mut impl Rng, depth: usize) -> Fo {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.5) { Fo::V(rng.gen_range(0..3)) } else { Fo::F(["a", "b"][rng.gen_range(0..2)], vec![]) };
    }
    let (name, arity) = SIG[rng.gen_range(0..2)];
    Fo::F(name, (0..arity).map(|_| fo_gen(rng, depth - 1)).collect())
}

/// Replace some subterms by variables and some variables by terms.
fn fo_perturb(rng: &mut impl Rng, t: &Fo) -> Fo {
    if rng.gen_bool(0.15) {
        return Fo::V(rng.gen_range(0..3));
    }
    match t {
        Fo::V(_) if rng.gen_bool(0.5) => fo_gen(rng, 2),
        Fo::V(i) => Fo::V(*i),
        Fo::F(n, args) => Fo::F(n, args.iter().map(|a| fo_perturb(rng, a)).collect()),
    }
}

fn fo_walk(t: &Fo, s: &BTreeMap<usize, Fo>) -> Fo {
    match t {
        Fo::V(i) => match s.get(i) {
            Some(u) => fo_walk(u, s),
            None => t.clone(),
        },
        Fo::F(n, args) => Fo::F(n, args.iter().map(|a| fo_walk(a, s)).collect()),
    }
}

fn fo_occurs(i: usize, t: &Fo) -> bool {
    match t {
        Fo::V(j) => i == *j,
        Fo::F(_, args) => args.iter().any(|a| fo_occurs(i, a)),
    }
}

/// Robinson's algorithm.
fn robinson(t: &Fo, u: &Fo) -> Option<BTreeMap<usize, Fo>> {
    let mut s = BTreeMap::new();
    let mut todo = vec![(t.clone(), u.clone())];
    while let Some((a, b)) = todo.pop() {
        match (fo_walk(&a, &s), fo_walk(&b, &s)) {
            (Fo::V(i), Fo::V(j)) if i == j => {}
            (Fo::V(i), other) | (other, Fo::V(i)) => {
                if fo_occurs(i, &other) {
                    return None;
                }
                s.insert(i, other);
            }
            (Fo::F(m, xs), Fo::F(n, ys)) => {
                if m != n {
                    return None;
                }
                todo.extend(xs.into_iter().zip(ys));
            }
        }
    }
    Some(s)
}

fn fo_term(t: &Fo) -> Term {
    match t {
        Fo::V(i) => Term::var(["X", "Y", "Z"][*i], 0, term_ty()),
        Fo::F(n, args) => {
            let ty = Type::curried(&vec![term_ty(); args.len()], term_ty());
            Term::list_comb(Term::constant(n, ty), args.iter().map(fo_term))
        }
    }
}

fn unifier_suite() -> Outcome {
    let mut rng = rng(0x5eed_0003);
    let mut solvable = 0;
    for k in 0..500 {
        let t = fo_gen(&mut rng, 4);
        let u = if k % 2 == 0 { fo_perturb(&mut rng, &t) } else { fo_gen(&mut rng, 4) };
        let (tt, ut) = (fo_term(&t), fo_term(&u));
        let oracle = robinson(&t, &u);
        let mut results = unify_terms(&tt, &ut, DEFAULT_DEPTH);
        let first = results.next();
        ensure!(oracle.is_some() == first.is_some(), "case {k}: {tt:?} =?= {ut:?}: oracle {oracle:?}, unify {:?}", first.is_some());
        let (Some(sigma), Some(r)) = (oracle, first) else { continue };
        solvable += 1;
        let (a, b) = (r.env.instantiate(&tt), r.env.instantiate(&ut));
        ensure!(aconv(&a, &b) || !r.flexflex.is_empty(), "case {k}: unifier does not equate {a:?} and {b:?}");
        // both are most general, so they agree up to renaming
        let mgu = fo_term(&fo_walk(&t, &sigma));
        ensure!(same_upto_vars(&a, &mgu), "case {k}: {a:?} is not a variant of {mgu:?}");
        for r in results.take(3) {
            let (a, b) = (r.env.instantiate(&tt), r.env.instantiate(&ut));
            ensure!(aconv(&a, &b) || !r.flexflex.is_empty(), "case {k}: later unifier is unsound");
        }
    }
    ensure!((100..=450).contains(&solvable), "only {solvable} solvable pairs; the generator is unbalanced");
    Ok(())
}

/// The lifting construction by kernel primitives: assume `Θ ==> φi` for each
/// premise, derive each `φi` under `Θ`, apply the rule, then discharge.
fn lift_by_primitives(thy: &Arc<Theory>, rule: &Theorem, theta: &[Term]) -> Result<Theorem, Error> {
    let (prems, _) = rule.prop().strip_imp();
    let thetas: Vec<Theorem> = theta.iter().map(|t| kernel::assume(thy, t)).collect::<Result<_, _>>()?;
    let asms: Vec<Term> = prems.iter().map(|p| Term::list_imp(theta.to_vec(), (*p).clone())).collect();
    let mut th = rule.clone();
    for a in &asms {
        let mut p = kernel::assume(thy, a)?;
        for t in &thetas {
            p = kernel::implies_elim(&p, t)?;
        }
        th = kernel::implies_elim(&th, &p)?;
    }
    for t in theta.iter().rev() {
        th = kernel::implies_intr(t, &th)?;
    }
    for a in asms.iter().rev() {
        th = kernel::implies_intr(a, &th)?;
    }
    Ok(th)
}

fn lifting_oracle() -> Outcome {
    let ipl = thy("IPL");
    let mut gen = FormulaGen::new(0x5eed_0004);
    let names = ["conjI", "conjE1", "conjE2", "disjI1", "disjI2", "disjE", "impI", "mp", "FalseE"];
    for k in 0..100 {
        let name = names.choose(&mut gen.rng).unwrap();
        let ax = kernel::axiom(&ipl, name).unwrap();
        let mut s = Subst::new();
        for v in term::vars(ax.prop()) {
            s.insert(v, gen.formula(2)).unwrap();
        }
        let rule = kernel::instantiate(&s, &ax).unwrap();
        let n = gen.rng.gen_range(0..=3);
        let theta: Vec<Term> = (0..n).map(|_| gen.tr(2)).collect();
        let lifted = lift_over_assumptions(&rule, &theta);
        let derived = lift_by_primitives(&ipl, &rule, &theta).map_err(|e| format!("case {k}: {e}"))?;
        ensure!(derived.hyps().is_empty(), "case {k}: derivation left hypotheses");
        ensure!(aconv(lifted.prop(), derived.prop()), "case {k}: {lifted} vs {derived}");
        ensure!(lifted.hyps().is_empty(), "case {k}: lifting added hypotheses");
    }
    Ok(())
}

fn figure_derivations() -> Outcome {
    let ifol = thy("IFOL");
    let e = |r: Result<Theorem, Error>| r.map_err(|e| e.to_string());
    let c = Term::free("C", form());
    let d = Term::free("D", form());
    let inst = |name: &str, pairs: &[(&str, Term)]| -> Result<Theorem, String> {
        let ax = kernel::axiom(&ifol, name).unwrap();
        let mut s = Subst::new();
        for (n, t) in pairs {
            let v: Var = term::vars(ax.prop()).into_iter().find(|v| &*v.name == *n).ok_or(format!("{name} has no ?{n}"))?;
            s.insert(v, t.clone()).map_err(|e| e.to_string())?;
        }
        e(kernel::instantiate(&s, &ax))
    };
    let assume = |t: &Term| kernel::assume(&ifol, t).unwrap();
    let hyps_are = |th: &Theorem, want: &[Term]| {
        th.hyps().len() == want.len() && want.iter().all(|w| th.hyps().iter().any(|h| aconv(h, w)))
    };

    // &I: from Tr(C) and Tr(D) conclude Tr(C & D)
    let rule = inst("conjI", &[("A", c.clone()), ("B", d.clone())])?;
    let th = e(kernel::implies_elim(&rule, &assume(&tr(c.clone()))))?;
    let th = e(kernel::implies_elim(&th, &assume(&tr(d.clone()))))?;
    ensure!(aconv(th.prop(), &read(&ifol, "Tr(C & D)")), "&I gave {th}");
    ensure!(hyps_are(&th, &[tr(c.clone()), tr(d.clone())]), "&I hypotheses {:?}", th.hyps());

    // -->I: a proof of Tr(D) from Tr(C), discharged, gives Tr(C --> D)
    let rule = inst("impI", &[("A", c.clone()), ("B", d.clone())])?;
    let step = Term::imp(tr(c.clone()), tr(d.clone()));
    let body = e(kernel::implies_elim(&assume(&step), &assume(&tr(c.clone()))))?;
    let disch = e(kernel::implies_intr(&tr(c.clone()), &body))?;
    let th = e(kernel::implies_elim(&rule, &disch))?;
    ensure!(aconv(th.prop(), &read(&ifol, "Tr(C --> D)")), "-->I gave {th}");
    ensure!(hyps_are(&th, &[step]), "-->I hypotheses {:?}", th.hyps());

    // EX I: from Tr(G(u)) conclude Tr(EX x. G(x))
    let g = Term::free("G", Type::fun(term_ty(), form()));
    let u = Term::free("u", term_ty());
    let gu = tr(Term::app(g.clone(), u.clone()));
    let rule = inst("exI", &[("F", g.clone()), ("y", u.clone())])?;
    let th = e(kernel::implies_elim(&rule, &assume(&gu)))?;
    let ex_g = tr(Term::app(Term::constant("EX", Type::fun(Type::fun(term_ty(), form()), form())), g.clone()));
    ensure!(aconv(th.prop(), &ex_g), "EX I gave {th}");
    ensure!(hyps_are(&th, &[gu.clone()]), "EX I hypotheses {:?}", th.hyps());

    // EX E: from Tr(EX x. G(x)) and a proof of Tr(C) from Tr(G(y)) conclude Tr(C)
    let rule = inst("exE", &[("F", g.clone()), ("B", c.clone())])?;
    let y = Term::free("y", term_ty());
    let gy = tr(Term::app(g.clone(), y.clone()));
    let all_imp = parse_prop(&ifol, "Tr(ALL x. G(x) --> C)", &ParseCtx::from_terms([&gy])).unwrap();
    let spec = inst("spec", &[("F", parse_fun(&ifol, "%x. G(x) --> C", &gy)?), ("y", y.clone())])?;
    let g_imp_c = e(kernel::implies_elim(&spec, &assume(&all_imp)))?;
    let mp = inst("mp", &[("A", Term::app(g.clone(), y.clone())), ("B", c.clone())])?;
    let tc = e(kernel::implies_elim(&e(kernel::implies_elim(&mp, &g_imp_c))?, &assume(&gy)))?;
    let minor = e(kernel::forall_intr(&y, &e(kernel::implies_intr(&gy, &tc))?))?;
    // y may not be generalized while Tr(G(y)) is still assumed
    ensure!(kernel::forall_intr(&y, &tc).is_err(), "eigenvariable condition not enforced");
    let th = e(kernel::implies_elim(&e(kernel::implies_elim(&rule, &assume(&ex_g)))?, &minor))?;
    ensure!(aconv(th.prop(), &tr(c.clone())), "EX E gave {th}");
    ensure!(hyps_are(&th, &[ex_g, all_imp]), "EX E hypotheses {:?}", th.hyps());
    for t in [&th] {
        t.check_invariants().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn parse_fun(thy: &Arc<Theory>, src: &str, ctx: &Term) -> Result<Term, String> {
    let ty = Type::fun(term_ty(), form());
    metaproof::syntax::parse_term_as(thy, src, &ParseCtx::from_terms([ctx]), &ty).map(|t| norm(&t)).map_err(|e| e.to_string())
}
