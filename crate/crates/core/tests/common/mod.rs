//! Helpers shared by the integration tests: golden files, comparison up to
//! renaming of schematic variables, and seeded random generators.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use metaproof::syntax::{parse_prop, print_term, thm_term};
use metaproof::{ParseCtx, Term, Theorem, Theory, Type, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn thy(name: &str) -> Arc<Theory> {
    Theory::builtin(name).unwrap()
}

pub fn term_ty() -> Type {
    Type::base("term")
}

pub fn form() -> Type {
    Type::base("form")
}

pub fn read(thy: &Arc<Theory>, src: &str) -> Term {
    parse_prop(thy, src, &ParseCtx::new()).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// Equal up to a bijective renaming of schematic variables.
pub fn same_upto_vars(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, fwd: &mut HashMap<Var, Var>, bwd: &mut HashMap<Var, Var>) -> bool {
        match (a, b) {
            (Term::Var(v), Term::Var(w)) => {
                v.ty == w.ty
                    && fwd.entry(v.clone()).or_insert_with(|| w.clone()) == w
                    && bwd.entry(w.clone()).or_insert_with(|| v.clone()) == v
            }
            (Term::App(f, x), Term::App(g, y)) => go(f, g, fwd, bwd) && go(x, y, fwd, bwd),
            (Term::Abs(_, s, x), Term::Abs(_, t, y)) => s == t && go(x, y, fwd, bwd),
            _ => a == b,
        }
    }
    go(a, b, &mut HashMap::new(), &mut HashMap::new())
}

/// The non-comment lines of `tests/golden/NAME.txt`.
pub fn golden(name: &str) -> Vec<String> {
    let path = format!("{}/tests/golden/{name}.txt", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

/// Compare a sequence of state theorems against a golden file. Each line is
/// parsed with the types of the goal's free variables in scope.
pub fn check_golden(thy: &Arc<Theory>, goal: &Term, states: &[Theorem], name: &str) -> Result<(), String> {
    let lines = golden(name);
    if lines.len() != states.len() {
        return Err(format!("{name}: {} golden states, {} produced", lines.len(), states.len()));
    }
    let ctx = ParseCtx::from_terms([goal]);
    for (k, (line, st)) in lines.iter().zip(states).enumerate() {
        let want = parse_prop(thy, line, &ctx).map_err(|e| format!("{name}:{k}: {e}"))?;
        let got = thm_term(st);
        if !same_upto_vars(&got, &want) {
            return Err(format!("{name}: state {k} is\n  {}\nexpected\n  {line}", print_term(thy, &got)));
        }
    }
    Ok(())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random ground formulas of IPL/IFOL over a few free atoms.
pub struct FormulaGen {
    pub rng: ChaCha8Rng,
}

impl FormulaGen {
    pub fn new(seed: u64) -> Self {
        FormulaGen { rng: rng(seed) }
    }

    pub fn atom(&mut self) -> Term {
        let names = ["A", "B", "C", "D"];
        Term::free(names.choose(&mut self.rng).unwrap(), form())
    }

    /// A formula of type `form`, nested at most `depth` connectives deep.
    pub fn formula(&mut self, depth: usize) -> Term {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return if self.rng.gen_bool(0.1) { Term::constant("False", form()) } else { self.atom() };
        }
        let op = ["&", "|", "-->"].choose(&mut self.rng).unwrap();
        let c = Term::constant(op, Type::curried(&[form(), form()], form()));
        Term::list_comb(c, [self.formula(depth - 1), self.formula(depth - 1)])
    }

    pub fn tr(&mut self, depth: usize) -> Term {
        tr(self.formula(depth))
    }
}

pub fn tr(f: Term) -> Term {
    Term::app(Term::constant("Tr", Type::fun(form(), Type::prop())), f)
}

/// Random simply typed terms with plenty of beta and eta redexes.
pub struct TermGen {
    pub rng: ChaCha8Rng,
}

impl TermGen {
    pub fn new(seed: u64) -> Self {
        TermGen { rng: rng(seed) }
    }

    fn arg_types() -> Vec<Type> {
        vec![term_ty(), form(), Type::fun(term_ty(), form()), Type::fun(form(), form())]
    }

    fn leaf(&mut self, ty: &Type, ctx: &[Type]) -> Term {
        let bounds: Vec<u32> = ctx
            .iter()
            .enumerate()
            .filter(|(_, t)| *t == ty)
            .map(|(i, _)| (ctx.len() - 1 - i) as u32)
            .collect();
        if !bounds.is_empty() && self.rng.gen_bool(0.6) {
            return Term::Bound(*bounds.choose(&mut self.rng).unwrap());
        }
        let base = match ty {
            Type::Base(b) if &**b == "term" => "a",
            Type::Base(b) if &**b == "form" => "P",
            _ => "f",
        };
        let k = self.rng.gen_range(0..2);
        Term::free(&format!("{base}{k}"), ty.clone())
    }

    /// A closed term of type `ty` under bound-variable types `ctx`
    /// (innermost last), of roughly `size` nodes.
    pub fn term(&mut self, ty: &Type, ctx: &mut Vec<Type>, size: usize) -> Term {
        if size <= 1 {
            return self.leaf(ty, ctx);
        }
        let roll = self.rng.gen_range(0..10);
        if let (Some((dom, cod)), true) = (ty.dest_fun(), roll < 3) {
            let (dom, cod) = (dom.clone(), cod.clone());
            if self.rng.gen_bool(0.3) {
                // eta redex: %x. f(x)
                let f = self.term(ty, &mut ctx.clone(), size - 2);
                let f = metaproof::term::incr_bounds(&f, 1, 0);
                return Term::abs("x", dom, Term::app(f, Term::Bound(0)));
            }
            ctx.push(dom.clone());
            let body = self.term(&cod, ctx, size - 1);
            ctx.pop();
            return Term::abs("x", dom, body);
        }
        if roll < 8 {
            let s = Self::arg_types().choose(&mut self.rng).unwrap().clone();
            let left = self.rng.gen_range(1..size);
            let right = size - left;
            let f = if self.rng.gen_bool(0.5) {
                // beta redex: (%x. body)(arg)
                ctx.push(s.clone());
                let body = self.term(ty, ctx, left.saturating_sub(1).max(1));
                ctx.pop();
                Term::abs("x", s.clone(), body)
            } else {
                self.term(&Type::fun(s.clone(), ty.clone()), ctx, left)
            };
            let a = self.term(&s, ctx, right);
            return Term::app(f, a);
        }
        self.leaf(ty, ctx)
    }

    pub fn any(&mut self, max_size: usize) -> (Term, Type) {
        loop {
            let ty = Self::arg_types().choose(&mut self.rng).unwrap().clone();
            let size = self.rng.gen_range(1..=max_size);
            let t = self.term(&ty, &mut Vec::new(), size);
            if t.size() <= max_size {
                return (t, ty);
            }
        }
    }
}
