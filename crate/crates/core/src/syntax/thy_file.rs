//! Theory files:
//!
//! ```text
//! theory NAME [extends P1 P2 ...];
//! types T1 T2 ...;
//! consts NAME :: TYPE [infixl N | infixr N | infix N | binder]; ...
//! axioms NAME: "PROP"; ...
//! defs NAME: "K == a"; ...
//! [end]
//! ```

use std::sync::Arc;

use super::lexer::{tokenize, Tok};
use super::parser::Parser;
use super::{parse_prop, ParseCtx, Syntax};
use crate::error::{Error, Result};
use crate::term::Type;
use crate::theory::{Decls, Fixity, Theory};

const SECTIONS: &[&str] = &["types", "consts", "axioms", "defs", "end"];

/// Parse a theory whose parents are builtin theories.
pub fn parse_theory(src: &str) -> Result<Arc<Theory>> {
    parse_theory_with(src, &|name| Theory::builtin(name))
}

/// Parse a theory, looking parents up with `resolve`.
pub fn parse_theory_with(src: &str, resolve: &dyn Fn(&str) -> Result<Arc<Theory>>) -> Result<Arc<Theory>> {
    let toks = tokenize(src, &[], true)?;
    let empty = Syntax { consts: Default::default(), symbols: Vec::new() };
    let mut p = Parser::new(&toks, &empty);

    keyword(&mut p, "theory")?;
    let (name, _) = ident(&mut p)?;
    let mut parents = Vec::new();
    if is_keyword(&p, "extends") {
        p.bump();
        while let Tok::Ident(_) = p.peek().tok {
            let (n, pos) = ident(&mut p)?;
            parents.push(resolve(&n).map_err(|e| match e {
                Error::UnknownTheory(_) => Error::parse(pos, format!("unknown theory {n}")),
                e => e,
            })?);
        }
        if parents.is_empty() {
            return p.unexpected("a parent theory");
        }
    } else {
        parents.push(Theory::builtin("Pure")?);
    }
    p.expect_sym(";")?;

    let mut decls = Decls::default();
    let mut axioms = Vec::new();
    let mut defs = Vec::new();
    loop {
        let section = match &p.peek().tok {
            Tok::Eof => break,
            Tok::Ident(s) if SECTIONS.contains(&s.as_str()) => s.clone(),
            _ => return p.unexpected("a section keyword"),
        };
        p.bump();
        match section.as_str() {
            "end" => {
                p.expect_eof()?;
                break;
            }
            "types" => {
                while let Tok::Ident(s) = &p.peek().tok {
                    if SECTIONS.contains(&s.as_str()) {
                        break;
                    }
                    decls.types.push(ident(&mut p)?.0);
                }
                p.expect_sym(";")?;
            }
            "consts" => {
                while !at_section(&p) {
                    let c = const_name(&mut p)?;
                    p.expect_sym("::")?;
                    let ty = type_of_decl(&mut p)?;
                    let fixity = fixity(&mut p)?;
                    p.expect_sym(";")?;
                    decls.consts.push((c, ty, fixity));
                }
            }
            "axioms" | "defs" => {
                while !at_section(&p) {
                    let (n, _) = ident(&mut p)?;
                    p.expect_sym(":")?;
                    let t = p.peek().clone();
                    let Tok::Str(body) = t.tok else { return p.unexpected("a quoted proposition") };
                    p.bump();
                    p.expect_sym(";")?;
                    let entry = (n, body, t.pos + 1);
                    if section == "axioms" {
                        axioms.push(entry);
                    } else {
                        defs.push(entry);
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    // read propositions against the signature declared so far
    let sig = Theory::extend_many(&name, parents.clone(), Decls { types: decls.types.clone(), consts: decls.consts.clone(), ..Decls::default() })?;
    let read = |body: &str, offset: usize| {
        parse_prop(&sig, body, &ParseCtx::new()).map_err(|e| match e {
            Error::Parse { pos, msg } => Error::Parse { pos: pos + offset, msg },
            e => e,
        })
    };
    for (n, body, off) in axioms {
        decls.axioms.push((n, read(&body, off)?));
    }
    for (n, body, off) in defs {
        decls.defs.push((n, read(&body, off)?));
    }
    Theory::extend_many(&name, parents, decls)
}

fn is_keyword(p: &Parser, kw: &str) -> bool {
    matches!(&p.peek().tok, Tok::Ident(s) if s == kw)
}

fn keyword(p: &mut Parser, kw: &str) -> Result<()> {
    if is_keyword(p, kw) {
        p.bump();
        Ok(())
    } else {
        p.unexpected(&format!("'{kw}'"))
    }
}

fn at_section(p: &Parser) -> bool {
    match &p.peek().tok {
        Tok::Eof => true,
        Tok::Ident(s) => SECTIONS.contains(&s.as_str()),
        _ => false,
    }
}

fn ident(p: &mut Parser) -> Result<(String, usize)> {
    match p.peek().tok.clone() {
        Tok::Ident(s) => Ok((s, p.bump().pos)),
        _ => p.unexpected("a name"),
    }
}

fn const_name(p: &mut Parser) -> Result<String> {
    match p.peek().tok.clone() {
        Tok::Ident(s) | Tok::Str(s) if !s.is_empty() && !s.chars().any(char::is_whitespace) => {
            p.bump();
            Ok(s)
        }
        _ => p.unexpected("a constant name"),
    }
}

fn type_of_decl(p: &mut Parser) -> Result<Type> {
    if let Tok::Str(s) = p.peek().tok.clone() {
        let pos = p.bump().pos + 1;
        let toks = tokenize(&s, &[], false).map_err(|e| shift(e, pos))?;
        let empty = Syntax { consts: Default::default(), symbols: Vec::new() };
        let mut q = Parser::new(&toks, &empty);
        let ty = q.typ().map_err(|e| shift(e, pos))?;
        q.expect_eof().map_err(|e| shift(e, pos))?;
        return Ok(ty);
    }
    p.typ()
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos: pos + by, msg },
        e => e,
    }
}

fn fixity(p: &mut Parser) -> Result<Fixity> {
    let kw = match &p.peek().tok {
        Tok::Ident(s) if ["infixl", "infixr", "infix", "binder"].contains(&s.as_str()) => s.clone(),
        _ => return Ok(Fixity::Prefix),
    };
    p.bump();
    if kw == "binder" {
        return Ok(Fixity::Binder);
    }
    let Tok::Num(n) = p.peek().tok else { return p.unexpected("a precedence") };
    p.bump();
    Ok(match kw.as_str() {
        "infixl" => Fixity::Infixl(n),
        "infixr" => Fixity::Infixr(n),
        _ => Fixity::Infix(n),
    })
}
