use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `?name` or `?name.k`
    Var(String, u32),
    Sym(String),
    Num(u32),
    Str(String),
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    /// Byte offset into the source.
    pub pos: usize,
}

/// Punctuation every grammar needs, independent of any theory.
pub const FIXED_SYMBOLS: &[&str] = &["==>", "==", "=>", "::", "!!", "%", "(", ")", ",", ".", ";", ":"];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Split `src` into tokens. `symbols` are matched longest first; with
/// `theory_mode`, `(* … *)` comments and string literals are recognized.
pub fn tokenize(src: &str, symbols: &[String], theory_mode: bool) -> Result<Vec<Token>> {
    let mut syms: Vec<&str> = symbols.iter().map(String::as_str).chain(FIXED_SYMBOLS.iter().copied()).collect();
    syms.sort_by_key(|s| std::cmp::Reverse(s.len()));
    syms.dedup();

    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let c = src[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if theory_mode && src[i..].starts_with("(*") {
            match src[i + 2..].find("*)") {
                Some(end) => {
                    i += 2 + end + 2;
                    continue;
                }
                None => return Err(Error::parse(i, "unterminated comment")),
            }
        }
        if theory_mode && c == '"' {
            match src[i + 1..].find('"') {
                Some(end) => {
                    out.push(Token { tok: Tok::Str(src[i + 1..i + 1 + end].to_string()), pos: i });
                    i += end + 2;
                    continue;
                }
                None => return Err(Error::parse(i, "unterminated string")),
            }
        }
        if is_ident_start(c) {
            let start = i;
            while i < src.len() && is_ident_char(bytes[i] as char) {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), pos: start });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < src.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i].parse().map_err(|_| Error::parse(start, "number too large"))?;
            out.push(Token { tok: Tok::Num(n), pos: start });
            continue;
        }
        if c == '?' {
            let start = i;
            i += 1;
            if i >= src.len() || !is_ident_start(bytes[i] as char) {
                return Err(Error::parse(start, "expected a name after ?"));
            }
            let ns = i;
            while i < src.len() && is_ident_char(bytes[i] as char) {
                i += 1;
            }
            let name = src[ns..i].to_string();
            let mut index = 0;
            if i + 1 < src.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                let ds = i;
                while i < src.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                index = src[ds..i].parse().map_err(|_| Error::parse(ds, "index too large"))?;
            }
            out.push(Token { tok: Tok::Var(name, index), pos: start });
            continue;
        }
        match syms.iter().find(|s| src[i..].starts_with(**s)) {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s.to_string()), pos: i });
                i += s.len();
            }
            None => return Err(Error::parse(i, format!("unexpected character {c:?}"))),
        }
    }
    out.push(Token { tok: Tok::Eof, pos: src.len() });
    Ok(out)
}
