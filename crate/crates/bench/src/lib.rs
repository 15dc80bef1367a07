//! Workloads shared by the benchmarks.

use std::sync::Arc;

use metaproof::kernel::axiom;
use metaproof::tactic::{assume_tac, finalize, initial_state, rtac, then_, Tactic};
use metaproof::{parse_prop, ParseCtx, Term, Theorem, Theory, Type};

pub fn theory(name: &str) -> Arc<Theory> {
    Theory::builtin(name).expect("builtin theory")
}

/// `(%x. f(x, x))((%x. f(x, x))(... a))`, `depth` redexes deep. The normal
/// form doubles in size with each level.
pub fn redex_tower(depth: usize) -> Term {
    let t = Type::base("term");
    let f = Term::free("f", Type::curried(&[t.clone(), t.clone()], t.clone()));
    let mut acc = Term::free("a", t.clone());
    for _ in 0..depth {
        let body = Term::list_comb(f.clone(), [Term::Bound(0), Term::Bound(0)]);
        acc = Term::app(Term::abs("x", t.clone(), body), acc);
    }
    acc
}

/// A first-order pair `g^n(?X) =?= g^n(h(a))` and a higher-order pattern pair.
pub fn unify_pairs(n: usize) -> Vec<(Term, Term)> {
    let t = Type::base("term");
    let g = Term::free("g", Type::fun(t.clone(), t.clone()));
    let h = Term::free("h", Type::fun(t.clone(), t.clone()));
    let nest = |x: Term| (0..n).fold(x, |acc, _| Term::app(g.clone(), acc));
    let fo = (nest(Term::var("X", 0, t.clone())), nest(Term::app(h, Term::free("a", t.clone()))));

    let ifol = theory("IFOL");
    let ctx = ParseCtx::new();
    let lhs = parse_prop(&ifol, "!!x::term. !!y::term. Tr(?F(x, y) & ?G(y))", &ctx).expect("pattern lhs");
    let rhs = parse_prop(&ifol, "!!x::term. !!y::term. Tr((x = y) & (EX z. y = z))", &ctx).expect("pattern rhs");
    vec![fo, (lhs, rhs)]
}

/// The tactic script proving `Tr(A & B --> C --> A & C)`.
pub fn imp_conj_script(thy: &Arc<Theory>) -> Tactic {
    let ax = |n: &str| axiom(thy, n).expect("axiom");
    let conje1 = ax("conjE1");
    [rtac(ax("impI"), 1), rtac(ax("impI"), 1), rtac(ax("conjI"), 1), assume_tac(2), rtac(conje1, 1), assume_tac(1)]
        .into_iter()
        .reduce(then_)
        .expect("nonempty script")
}

/// Run the script to a finished theorem.
pub fn prove_imp_conj(thy: &Arc<Theory>) -> Theorem {
    let goal = parse_prop(thy, "Tr(A & B --> C --> A & C)", &ParseCtx::new()).expect("goal");
    let st = initial_state(thy, &goal).expect("state");
    let done = imp_conj_script(thy).apply(&st).expect("script").next().expect("a proof");
    finalize(&done).expect("finished")
}
