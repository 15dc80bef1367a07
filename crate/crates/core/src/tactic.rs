//! Proof states and tactics. A tactic maps a state to a lazy stream of
//! successor states; the order of the stream is the order of backtracking.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{self, Theorem};
use crate::rule::{self, SubgoalView};
use crate::term::{Subst, Term, Var};
use crate::theory::Theory;
use crate::unify::DEFAULT_DEPTH;

pub const REPEAT_LIMIT: usize = 1000;

/// A theorem `G1 ==> … ==> Gn ==> goal` together with the number `n` of
/// subgoals still open.
#[derive(Clone)]
pub struct ProofState {
    thm: Theorem,
    goal: Term,
    nsubgoals: usize,
    depth: usize,
}

impl fmt::Debug for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProofState({} subgoals: {})", self.nsubgoals, self.thm)
    }
}

impl ProofState {
    /// The trivial state `goal ==> goal`.
    pub fn new(thy: &Arc<Theory>, goal: &Term) -> Result<ProofState> {
        let goal = thy.check_prop(goal)?;
        let prop = Term::imp(goal.clone(), goal.clone());
        let thm = Theorem::new_unchecked(thy.clone(), Vec::new(), Vec::new(), prop);
        Ok(ProofState { thm, goal, nsubgoals: 1, depth: DEFAULT_DEPTH })
    }

    /// Use `depth` as the unification bound for tactics run on this state
    /// and its successors.
    pub fn with_depth(mut self, depth: usize) -> ProofState {
        self.depth = depth;
        self
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn thm(&self) -> &Theorem {
        &self.thm
    }

    /// The goal as originally stated.
    pub fn goal(&self) -> &Term {
        &self.goal
    }

    pub fn nsubgoals(&self) -> usize {
        self.nsubgoals
    }

    pub fn subgoals(&self) -> Vec<&Term> {
        self.thm.prop().strip_imp().0.into_iter().take(self.nsubgoals).collect()
    }

    pub fn subgoal(&self, i: usize) -> Result<SubgoalView> {
        if i == 0 || i > self.nsubgoals {
            return Err(Error::NoSubgoal(i));
        }
        Ok(SubgoalView::new(self.subgoals()[i - 1]))
    }

    /// The goal as instantiated so far.
    pub fn conclusion(&self) -> Term {
        let (prems, concl) = self.thm.prop().strip_imp();
        Term::list_imp(prems[self.nsubgoals..].iter().map(|t| (*t).clone()).collect::<Vec<_>>(), concl.clone())
    }

    fn successor(&self, thm: Theorem, nsubgoals: usize) -> ProofState {
        ProofState { thm, goal: self.goal.clone(), nsubgoals, depth: self.depth }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.nsubgoals {
            Err(Error::NoSubgoal(i))
        } else {
            Ok(())
        }
    }
}

pub type StateStream = Box<dyn Iterator<Item = ProofState> + Send>;

type TacticFn = dyn Fn(&ProofState) -> Result<StateStream> + Send + Sync;

#[derive(Clone)]
pub struct Tactic(Arc<TacticFn>);

impl fmt::Debug for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Tactic")
    }
}

impl Tactic {
    pub fn new(f: impl Fn(&ProofState) -> Result<StateStream> + Send + Sync + 'static) -> Tactic {
        Tactic(Arc::new(f))
    }

    pub fn apply(&self, state: &ProofState) -> Result<StateStream> {
        (self.0)(state)
    }

    /// Apply inside a combinator, where an error just means no successors.
    fn stream(&self, state: &ProofState) -> StateStream {
        self.apply(state).unwrap_or_else(|_| Box::new(std::iter::empty()))
    }
}

pub fn initial_state(thy: &Arc<Theory>, goal: &Term) -> Result<ProofState> {
    ProofState::new(thy, goal)
}

/// Resolve each rule in turn against subgoal `i`.
pub fn resolve_tac(rules: Vec<Theorem>, i: usize) -> Tactic {
    Tactic::new(move |st| {
        st.check_index(i)?;
        let st = st.clone();
        let rules = rules.clone();
        let streams = rules.into_iter().map(move |r| {
            let n = st.nsubgoals - 1 + r.prop().strip_imp().0.len();
            let st = st.clone();
            let stream: StateStream = match rule::resolve_with_depth(&r, i, &st.thm, st.depth) {
                Ok(s) => Box::new(s.map(move |th| st.successor(th, n))),
                Err(_) => Box::new(std::iter::empty()),
            };
            stream
        });
        Ok(Box::new(streams.flatten()) as StateStream)
    })
}

pub fn rtac(rule: Theorem, i: usize) -> Tactic {
    resolve_tac(vec![rule], i)
}

/// Solve subgoal `i` with one of its assumptions.
pub fn assume_tac(i: usize) -> Tactic {
    Tactic::new(move |st| {
        st.check_index(i)?;
        let n = st.nsubgoals - 1;
        let s = st.clone();
        Ok(Box::new(rule::assumption_with_depth(i, &st.thm, st.depth)?.map(move |th| s.successor(th, n))) as StateStream)
    })
}

pub fn all_tac() -> Tactic {
    Tactic::new(|st| Ok(Box::new(std::iter::once(st.clone())) as StateStream))
}

pub fn no_tac() -> Tactic {
    Tactic::new(|_| Ok(Box::new(std::iter::empty()) as StateStream))
}

/// Every result of `t2` on every result of `t1`.
pub fn then_(t1: Tactic, t2: Tactic) -> Tactic {
    Tactic::new(move |st| {
        let t2 = t2.clone();
        Ok(Box::new(t1.apply(st)?.flat_map(move |s| t2.stream(&s))) as StateStream)
    })
}

/// The results of `t1`, or those of `t2` if `t1` has none.
pub fn orelse(t1: Tactic, t2: Tactic) -> Tactic {
    Tactic::new(move |st| {
        let mut first = t1.stream(st).peekable();
        if first.peek().is_some() {
            Ok(Box::new(first))
        } else {
            t2.apply(st)
        }
    })
}

/// `(t THEN repeat(t)) ORELSE all_tac`, explored depth first. Fails with
/// `RepeatLimit` if the first answer needs more than `REPEAT_LIMIT`
/// nested applications; later answers past the limit are dropped.
pub fn repeat(t: Tactic) -> Tactic {
    Tactic::new(move |st| {
        let overflow = Arc::new(AtomicBool::new(false));
        let mut it = Repeat { t: t.clone(), stack: Vec::new(), pending: Some(st.clone()), overflow: overflow.clone() };
        let first = it.next();
        if overflow.load(Ordering::Relaxed) {
            return Err(Error::RepeatLimit(REPEAT_LIMIT));
        }
        Ok(Box::new(first.into_iter().chain(it)) as StateStream)
    })
}

struct Repeat {
    t: Tactic,
    stack: Vec<StateStream>,
    pending: Option<ProofState>,
    overflow: Arc<AtomicBool>,
}

impl Iterator for Repeat {
    type Item = ProofState;

    fn next(&mut self) -> Option<ProofState> {
        loop {
            if self.overflow.load(Ordering::Relaxed) {
                return None;
            }
            if let Some(s) = self.pending.take() {
                let mut kids = self.t.stream(&s);
                match kids.next() {
                    None => return Some(s),
                    Some(k) => {
                        if self.stack.len() >= REPEAT_LIMIT {
                            self.overflow.store(true, Ordering::Relaxed);
                            return None;
                        }
                        self.stack.push(kids);
                        self.pending = Some(k);
                        continue;
                    }
                }
            }
            let top = self.stack.last_mut()?;
            match top.next() {
                Some(s) => self.pending = Some(s),
                None => {
                    self.stack.pop();
                }
            }
        }
    }
}

/// Instantiate away the remaining flex-flex pairs: both heads of each pair
/// become constant functions returning one fresh schematic.
fn smash_flexflex(th: &Theorem) -> Result<Theorem> {
    let mut th = th.clone();
    while let Some(p) = th.flexflex().first().cloned() {
        let next = (th.max_index() + 1) as u32;
        let heads = [&p.lhs, &p.rhs].map(|t| {
            let mut t = t;
            while let Term::Abs(_, _, b) = t {
                t = b;
            }
            match t.head() {
                Term::Var(v) => Some(v.clone()),
                _ => None,
            }
        });
        let [Some(f), Some(g)] = heads else {
            return Err(Error::UnresolvedFlexFlex);
        };
        let (_, res) = f.ty.strip();
        let h = Term::var("H", next, res.clone());
        let constant = |v: &Var| {
            let (doms, _) = v.ty.strip();
            doms.iter().rev().fold(h.clone(), |b, d| Term::abs("x", d.clone(), b))
        };
        let mut s = Subst::new();
        s.insert(f.clone(), constant(&f))?;
        if g != f {
            let (_, gres) = g.ty.strip();
            if gres != res {
                return Err(Error::UnresolvedFlexFlex);
            }
            s.insert(g.clone(), constant(&g))?;
        }
        let before = th.flexflex().len();
        th = kernel::instantiate(&s, &th)?;
        if th.flexflex().len() >= before && th.flexflex().first() == Some(&p) {
            return Err(Error::UnresolvedFlexFlex);
        }
    }
    Ok(th)
}

/// The proved goal as a theorem. Remaining flex-flex pairs are solved
/// trivially; free variables become schematic when there are no hypotheses.
pub fn finalize(st: &ProofState) -> Result<Theorem> {
    if st.nsubgoals > 0 {
        return Err(Error::SubgoalsRemain(st.nsubgoals));
    }
    let th = smash_flexflex(&st.thm)?;
    if th.hyps().is_empty() {
        kernel::varify(&th)
    } else {
        Ok(th)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::axiom;
    use crate::syntax::{print_term, read};
    use crate::term::aconv;

    fn ipl() -> Arc<Theory> {
        Theory::builtin("IPL").unwrap()
    }

    fn ax(n: &str) -> Theorem {
        axiom(&ipl(), n).unwrap()
    }

    fn first(t: &Tactic, st: &ProofState) -> ProofState {
        t.apply(st).unwrap().next().expect("tactic produced no state")
    }

    #[test]
    fn initial_state_shape() {
        let thy = ipl();
        let g = read(&thy, "Tr(A --> A)").unwrap();
        let st = initial_state(&thy, &g).unwrap();
        assert_eq!(st.nsubgoals(), 1);
        assert!(aconv(st.thm().prop(), &Term::imp(g.clone(), g)));
    }

    #[test]
    fn proves_identity() {
        let thy = ipl();
        let g = read(&thy, "Tr(A --> A)").unwrap();
        let st = initial_state(&thy, &g).unwrap();
        let st = first(&rtac(ax("impI"), 1), &st);
        assert_eq!(print_term(&thy, st.subgoals()[0]), "Tr(A) ==> Tr(A)");
        let st = first(&assume_tac(1), &st);
        assert_eq!(st.nsubgoals(), 0);
        let th = finalize(&st).unwrap();
        assert_eq!(print_term(&thy, th.prop()), "Tr(?A --> ?A)");
    }

    #[test]
    fn subgoal_index_checked() {
        let thy = ipl();
        let g = read(&thy, "Tr(A) ==> Tr(A)").unwrap();
        let st = initial_state(&thy, &g).unwrap();
        // the goal's own premise is not a subgoal
        assert!(matches!(assume_tac(2).apply(&st), Err(Error::NoSubgoal(2))));
        assert!(matches!(finalize(&st), Err(Error::SubgoalsRemain(1))));
    }

    #[test]
    fn combinators() {
        let thy = ipl();
        let g = read(&thy, "Tr(A & B --> B & A)").unwrap();
        let st = initial_state(&thy, &g).unwrap();
        let intro = repeat(resolve_tac(vec![ax("impI"), ax("conjI")], 1));
        let after = intro.apply(&st).unwrap().next().unwrap();
        assert_eq!(after.nsubgoals(), 2);
        let by = |r: &str| then_(rtac(ax(r), 1), assume_tac(1));
        let solve = orelse(assume_tac(1), orelse(by("conjE1"), by("conjE2")));
        let t = then_(intro, then_(solve.clone(), solve));
        let done = t.apply(&st).unwrap().next().expect("a proof");
        let th = finalize(&done).unwrap();
        assert_eq!(print_term(&thy, th.prop()), "Tr(?A & ?B --> ?B & ?A)");
        assert_eq!(no_tac().apply(&st).unwrap().count(), 0);
        assert_eq!(all_tac().apply(&st).unwrap().count(), 1);
    }

    #[test]
    fn repeat_limit() {
        let thy = ipl();
        // a tactic that always succeeds without progress
        let g = read(&thy, "Tr(A)").unwrap();
        let st = initial_state(&thy, &g).unwrap();
        let grow = Tactic::new(|s| {
            let s = s.clone();
            Ok(Box::new(std::iter::once(s)) as StateStream)
        });
        assert!(matches!(repeat(grow).apply(&st), Err(Error::RepeatLimit(REPEAT_LIMIT))));
    }
}
