//! Concrete syntax: reading and printing types, terms, theorems and theory files.

pub mod lexer;
mod parser;
mod printer;
mod thy_file;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::Theorem;
use crate::term::{frees, type_of, vars, Name, Term, Type};
use crate::theory::{ConstDecl, Fixity, Theory};

pub use thy_file::{parse_theory, parse_theory_with};

/// The notation a theory induces: constants with their fixities and the
/// symbolic tokens the lexer must recognize.
#[derive(Clone, Debug)]
pub struct Syntax {
    consts: BTreeMap<Name, ConstDecl>,
    symbols: Vec<String>,
}

impl Syntax {
    pub fn new(thy: &Theory) -> Syntax {
        let consts = thy.consts();
        let symbols = consts
            .keys()
            .filter(|k| !k.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_'))
            .map(|k| k.to_string())
            .collect();
        Syntax { consts, symbols }
    }

    pub fn fixity(&self, name: &str) -> Option<Fixity> {
        self.consts.get(name).map(|d| d.fixity)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }
}

/// Types for free and schematic variables known before parsing, such as
/// those already present in a proof state.
#[derive(Clone, Debug, Default)]
pub struct ParseCtx {
    pub frees: BTreeMap<Name, Type>,
    pub vars: BTreeMap<(Name, u32), Type>,
}

impl ParseCtx {
    pub fn new() -> Self {
        Self::default()
    }

    /// Collect the variables of `terms`.
    pub fn from_terms<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Self {
        let mut ctx = ParseCtx::new();
        for t in terms {
            ctx.add(t);
        }
        ctx
    }

    pub fn add(&mut self, t: &Term) {
        for (n, ty) in frees(t) {
            self.frees.entry(n).or_insert(ty);
        }
        for v in vars(t) {
            self.vars.entry((v.name, v.index)).or_insert(v.ty);
        }
    }
}

fn parse_with(thy: &Theory, src: &str, ctx: &ParseCtx, want: Option<&Type>) -> Result<Term> {
    let syn = Syntax::new(thy);
    let toks = lexer::tokenize(src, syn.symbols(), false)?;
    let mut p = parser::Parser::new(&toks, &syn);
    let raw = p.term(0)?;
    p.expect_eof()?;
    let t = parser::elaborate(&syn, &raw, ctx, want)?;
    thy.check_term(&t, &[])?;
    Ok(t)
}

/// Parse a closed term. The result is type-checked against `thy` but not normalized.
pub fn parse_term(thy: &Theory, src: &str, ctx: &ParseCtx) -> Result<Term> {
    parse_with(thy, src, ctx, None)
}

/// Parse a term that must have type `ty`.
pub fn parse_term_as(thy: &Theory, src: &str, ctx: &ParseCtx, ty: &Type) -> Result<Term> {
    parse_with(thy, src, ctx, Some(ty))
}

/// Parse a proposition and normalize it.
pub fn parse_prop(thy: &Theory, src: &str, ctx: &ParseCtx) -> Result<Term> {
    let t = parse_with(thy, src, ctx, Some(&Type::prop()))?;
    thy.check_prop(&t)
}

pub fn parse_type(thy: &Theory, src: &str) -> Result<Type> {
    let syn = Syntax::new(thy);
    let toks = lexer::tokenize(src, syn.symbols(), false)?;
    let mut p = parser::Parser::new(&toks, &syn);
    let ty = p.typ()?;
    p.expect_eof()?;
    let mut bases = Default::default();
    ty.bases(&mut bases);
    if let Some(b) = bases.iter().find(|b| !thy.has_type(b)) {
        return Err(Error::IllTyped(format!("undeclared type {b}")));
    }
    Ok(ty)
}

pub fn print_term(thy: &Theory, t: &Term) -> String {
    let syn = Syntax::new(thy);
    printer::Printer::new(&syn, t).print(t)
}

pub fn print_type(ty: &Type) -> String {
    ty.to_string()
}

/// The proposition with each flex-flex pair as a leading `a == b` premise.
pub fn thm_term(th: &Theorem) -> Term {
    let eqs = th.flexflex().iter().map(|p| {
        let ty = type_of(&p.lhs, &[]).expect("flex-flex pairs are closed and well typed");
        Term::equals(p.lhs.clone(), p.rhs.clone(), ty)
    });
    Term::list_imp(eqs.collect::<Vec<_>>(), th.prop().clone())
}

pub fn print_thm(th: &Theorem) -> String {
    print_term(th.theory(), &thm_term(th))
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let thy = self.theory();
        if !self.hyps().is_empty() {
            let hs: Vec<String> = self.hyps().iter().map(|h| print_term(thy, h)).collect();
            write!(f, "[{}] ", hs.join(", "))?;
        }
        write!(f, "{}", print_thm(self))
    }
}

/// Shorthand used by tests and the session layer.
pub fn read(thy: &Arc<Theory>, src: &str) -> Result<Term> {
    parse_prop(thy, src, &ParseCtx::new())
}
