//! Rendering terms with the fewest parentheses the parser needs.

use std::collections::BTreeSet;

use super::Syntax;
use crate::term::{frees, incr_bounds, Term, Type, ALL, EQ};
use crate::theory::Fixity;

pub(crate) struct Printer<'a> {
    syn: &'a Syntax,
    avoid: BTreeSet<String>,
}

const LETTERS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

/// `hint` if unused. A single-letter hint from `LETTERS` moves on to the
/// following letters; after that come `base1`, `base2`, … where `base` is
/// `hint` without trailing digits.
fn fresh(hint: &str, taken: impl Fn(&str) -> bool) -> String {
    let hint = if hint.starts_with(|c: char| c.is_ascii_alphabetic()) { hint } else { "x" };
    if !taken(hint) {
        return hint.to_string();
    }
    if let Some(k) = LETTERS.iter().position(|l| *l == hint) {
        if let Some(l) = LETTERS[k + 1..].iter().find(|l| !taken(l)) {
            return l.to_string();
        }
    }
    let base = hint.trim_end_matches(|c: char| c.is_ascii_digit());
    (1..).map(|k| format!("{base}{k}")).find(|c| !taken(c)).unwrap()
}

/// Does the type of bound variable `i` follow from some occurrence as an
/// argument of a head whose type is already known?
fn anchored(t: &Term, i: u32) -> bool {
    match t {
        Term::App(..) => {
            let (h, args) = t.strip_comb();
            let fixed = match h {
                Term::Const(c, _) => &**c != EQ && &**c != ALL,
                Term::Free(..) | Term::Var(_) => true,
                _ => false,
            };
            args.iter().any(|a| (fixed && matches!(a, Term::Bound(j) if *j == i)) || anchored(a, i))
                || anchored(h, i)
        }
        Term::Abs(_, _, b) => anchored(b, i + 1),
        _ => false,
    }
}

fn eta_expand(head: &Term, args: &[&Term], wanted: usize) -> Term {
    let ty = match head {
        Term::Const(_, ty) => ty.clone(),
        _ => unreachable!("only constants are expanded"),
    };
    let (doms, _) = ty.strip();
    let missing = wanted - args.len();
    let m = missing as u32;
    let mut body = head.clone();
    for a in args {
        body = Term::app(body, incr_bounds(a, m as i64, 0));
    }
    for k in (0..m).rev() {
        body = Term::app(body, Term::Bound(k));
    }
    let hints = ["x", "y"];
    for k in (0..missing).rev() {
        let d = &doms[args.len() + k];
        body = Term::abs(hints.get(k).copied().unwrap_or("z"), d.clone(), body);
    }
    body
}

impl<'a> Printer<'a> {
    pub fn new(syn: &'a Syntax, t: &Term) -> Self {
        let mut avoid: BTreeSet<String> = frees(t).into_iter().map(|(n, _)| n.to_string()).collect();
        avoid.extend(syn.consts.keys().map(|k| k.to_string()));
        Printer { syn, avoid }
    }

    pub fn print(&self, t: &Term) -> String {
        self.pp(t, &mut Vec::new(), 0, true)
    }

    fn pp(&self, t: &Term, names: &mut Vec<String>, prec: u32, rightmost: bool) -> String {
        if let Term::Abs(..) = t {
            return self.binder(None, t, names, rightmost);
        }
        let (head, args) = t.strip_comb();
        if let Term::Const(c, _) = head {
            match self.syn.fixity(c) {
                Some(Fixity::Infixl(p) | Fixity::Infixr(p) | Fixity::Infix(p)) => {
                    return self.infix(head, &args, p, names, prec, rightmost);
                }
                Some(Fixity::Binder) if args.len() <= 1 => {
                    return match args.first() {
                        Some(Term::Abs(..)) => self.binder(Some(c), t, names, rightmost),
                        Some(a) => {
                            let dom = head_dom(head);
                            let lam = Term::abs("x", dom, Term::app(incr_bounds(a, 1, 0), Term::Bound(0)));
                            self.pp(&Term::app(head.clone(), lam), names, prec, rightmost)
                        }
                        None => self.pp(&eta_expand(head, &[], 1), names, prec, rightmost),
                    };
                }
                _ => {}
            }
        }
        let mut s = self.atom(head, names);
        if !args.is_empty() {
            s.push('(');
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    s.push_str(", ");
                }
                s.push_str(&self.pp(a, names, 0, true));
            }
            s.push(')');
        }
        s
    }

    fn atom(&self, t: &Term, names: &mut Vec<String>) -> String {
        match t {
            Term::Const(n, _) | Term::Free(n, _) => n.to_string(),
            Term::Var(v) if v.index == 0 => format!("?{}", v.name),
            Term::Var(v) => format!("?{}.{}", v.name, v.index),
            Term::Bound(i) => match names.len().checked_sub(*i as usize + 1) {
                Some(k) => names[k].clone(),
                None => format!("#{i}"),
            },
            _ => format!("({})", self.pp(t, names, 0, true)),
        }
    }

    fn infix(
        &self,
        head: &Term,
        args: &[&Term],
        p: u32,
        names: &mut Vec<String>,
        prec: u32,
        rightmost: bool,
    ) -> String {
        if args.len() < 2 {
            return self.pp(&eta_expand(head, args, 2), names, prec, rightmost);
        }
        let Term::Const(op, _) = head else { unreachable!() };
        if args.len() > 2 {
            let inner = Term::list_comb(head.clone(), args[..2].iter().map(|a| (*a).clone()));
            let mut s = format!("({})(", self.pp(&inner, names, 0, true));
            for (k, a) in args[2..].iter().enumerate() {
                if k > 0 {
                    s.push_str(", ");
                }
                s.push_str(&self.pp(a, names, 0, true));
            }
            s.push(')');
            return s;
        }
        let paren = p < prec;
        let (lp, rp) = match self.syn.fixity(op) {
            Some(Fixity::Infixl(_)) => (p, p + 1),
            Some(Fixity::Infixr(_)) => (p + 1, p),
            _ => (p + 1, p + 1),
        };
        let l = self.pp(args[0], names, lp, false);
        let r = self.pp(args[1], names, rp, rightmost || paren);
        if paren {
            format!("({l} {op} {r})")
        } else {
            format!("{l} {op} {r}")
        }
    }

    /// `%x y. b` or `B x y. b`, merging directly nested binders of the same kind.
    fn binder(&self, b: Option<&str>, t: &Term, names: &mut Vec<String>, rightmost: bool) -> String {
        let mut vars: Vec<(&str, &Type)> = Vec::new();
        let mut cur = t;
        loop {
            let next = match (b, cur) {
                (None, Term::Abs(h, ty, body)) => Some((&**h, ty, &**body)),
                (Some(c), Term::App(f, a)) => match (&**f, &**a) {
                    (Term::Const(k, _), Term::Abs(h, ty, body)) if &**k == c => Some((&**h, ty, &**body)),
                    _ => None,
                },
                _ => None,
            };
            match next {
                Some((h, ty, body)) => {
                    vars.push((h, ty));
                    cur = body;
                }
                None => break,
            }
        }
        let depth = names.len();
        let n = vars.len() as u32;
        let mut head = String::from(b.unwrap_or("%"));
        for (k, (hint, ty)) in vars.iter().enumerate() {
            let name = fresh(hint, |c| self.avoid.contains(c) || names.iter().any(|m| m == c));
            let symbolic = !head.ends_with(|c: char| c.is_ascii_alphanumeric());
            if k > 0 || !symbolic {
                head.push(' ');
            }
            head.push_str(&name);
            if !anchored(cur, n - 1 - k as u32) {
                head.push_str("::");
                head.push_str(&ty.to_string());
            }
            names.push(name);
        }
        let body = self.pp(cur, names, 0, true);
        names.truncate(depth);
        if rightmost {
            format!("{head}. {body}")
        } else {
            format!("({head}. {body})")
        }
    }
}

fn head_dom(c: &Term) -> Type {
    match c {
        Term::Const(_, ty) => match ty.dest_fun().and_then(|(f, _)| f.dest_fun()) {
            Some((d, _)) => d.clone(),
            None => Type::prop(),
        },
        _ => Type::prop(),
    }
}
