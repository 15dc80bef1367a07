//! Interactive driver: a command interpreter over JSON values, with a
//! small line-oriented text syntax on top, proof histories and a store of
//! named theorems.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::kernel::{self, Theorem};
use crate::rule::SubgoalView;
use crate::syntax::{self, parse_prop, parse_term_as, print_term, thm_term, ParseCtx};
use crate::tactic::{self, ProofState, StateStream, Tactic};
use crate::term::{vars, Subst, Term};
use crate::theory::Theory;
use crate::unify::DEFAULT_DEPTH;

/// A tactic as named in a request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TacticSpec {
    Resolve { rules: Vec<String>, subgoal: usize, inst: Vec<(String, String)> },
    Assume { subgoal: usize },
    Then(Vec<TacticSpec>),
    OrElse(Vec<TacticSpec>),
    Repeat(Box<TacticSpec>),
    All,
    No,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadRequest(msg.into())
}

fn subgoal_field(obj: &Map<String, Value>) -> Result<usize> {
    match obj.get("subgoal") {
        None => Ok(1),
        Some(v) => v.as_u64().map(|n| n as usize).ok_or_else(|| bad("subgoal must be a number")),
    }
}

impl TacticSpec {
    /// Either a JSON object such as `{"resolve": ["allI"], "subgoal": 1}`
    /// or a string in the text syntax.
    pub fn from_json(v: &Value) -> Result<TacticSpec> {
        if let Some(s) = v.as_str() {
            return TacticSpec::parse(s);
        }
        let obj = v.as_object().ok_or_else(|| bad("tactic must be an object or a string"))?;
        if let Some(r) = obj.get("resolve") {
            let rules = match r {
                Value::String(s) => vec![s.clone()],
                Value::Array(xs) => xs
                    .iter()
                    .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("rule names must be strings")))
                    .collect::<Result<_>>()?,
                _ => return Err(bad("resolve expects a rule name or a list of them")),
            };
            let mut inst = Vec::new();
            if let Some(m) = obj.get("inst") {
                let m = m.as_object().ok_or_else(|| bad("inst must be an object"))?;
                for (k, t) in m {
                    let t = t.as_str().ok_or_else(|| bad("inst values must be strings"))?;
                    inst.push((k.clone(), t.to_string()));
                }
            }
            return Ok(TacticSpec::Resolve { rules, subgoal: subgoal_field(obj)?, inst });
        }
        if let Some(a) = obj.get("assume") {
            let subgoal = match a.as_u64() {
                Some(n) => n as usize,
                None => subgoal_field(obj)?,
            };
            return Ok(TacticSpec::Assume { subgoal });
        }
        let list = |key: &str| -> Result<Option<Vec<TacticSpec>>> {
            match obj.get(key) {
                None => Ok(None),
                Some(Value::Array(xs)) if !xs.is_empty() => Ok(Some(xs.iter().map(TacticSpec::from_json).collect::<Result<_>>()?)),
                Some(_) => Err(bad(format!("{key} expects a nonempty list of tactics"))),
            }
        };
        if let Some(ts) = list("then")? {
            return Ok(TacticSpec::Then(ts));
        }
        if let Some(ts) = list("orelse")? {
            return Ok(TacticSpec::OrElse(ts));
        }
        if let Some(t) = obj.get("repeat") {
            return Ok(TacticSpec::Repeat(Box::new(TacticSpec::from_json(t)?)));
        }
        if obj.contains_key("all_tac") {
            return Ok(TacticSpec::All);
        }
        if obj.contains_key("no_tac") {
            return Ok(TacticSpec::No);
        }
        Err(bad("unknown tactic"))
    }

    /// Text syntax:
    ///
    /// ```text
    /// tac  ::= seq ("ORELSE" seq)*
    /// seq  ::= rep ("THEN" rep)*
    /// rep  ::= "repeat" rep | atom
    /// atom ::= "resolve" NAME+ [N] ["where" VAR ":=" "TERM" ("and" VAR ":=" "TERM")*]
    ///        | "assume" [N] | "all_tac" | "no_tac" | "(" tac ")"
    /// ```
    pub fn parse(src: &str) -> Result<TacticSpec> {
        let toks = tactic_tokens(src)?;
        let mut p = TacParser { toks, i: 0, len: src.len() };
        let t = p.alt()?;
        match p.toks.get(p.i) {
            None => Ok(t),
            Some((_, pos)) => Err(Error::parse(*pos, "unexpected text after tactic")),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TacticSpec::Resolve { rules, subgoal, inst } => {
                let mut o = json!({ "resolve": rules, "subgoal": subgoal });
                if !inst.is_empty() {
                    let m: Map<String, Value> = inst.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
                    o["inst"] = Value::Object(m);
                }
                o
            }
            TacticSpec::Assume { subgoal } => json!({ "assume": subgoal }),
            TacticSpec::Then(ts) => json!({ "then": ts.iter().map(TacticSpec::to_json).collect::<Vec<_>>() }),
            TacticSpec::OrElse(ts) => json!({ "orelse": ts.iter().map(TacticSpec::to_json).collect::<Vec<_>>() }),
            TacticSpec::Repeat(t) => json!({ "repeat": t.to_json() }),
            TacticSpec::All => json!({ "all_tac": true }),
            TacticSpec::No => json!({ "no_tac": true }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum TTok {
    Word(String),
    Num(usize),
    Quoted(String),
    Open,
    Close,
}

fn tactic_tokens(src: &str) -> Result<Vec<(TTok, usize)>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' || c == ')' {
            chars.next();
            out.push((if c == '(' { TTok::Open } else { TTok::Close }, i));
        } else if c == '"' {
            chars.next();
            let start = i + 1;
            let end = loop {
                match chars.next() {
                    Some((j, '"')) => break j,
                    Some(_) => {}
                    None => return Err(Error::parse(i, "unterminated quotation")),
                }
            };
            out.push((TTok::Quoted(src[start..end].to_string()), i));
        } else {
            let start = i;
            let mut end = src.len();
            while let Some(&(j, d)) = chars.peek() {
                if d.is_whitespace() || d == '(' || d == ')' || d == '"' {
                    end = j;
                    break;
                }
                chars.next();
            }
            let w = &src[start..end];
            out.push((w.parse().map(TTok::Num).unwrap_or_else(|_| TTok::Word(w.to_string())), start));
        }
    }
    Ok(out)
}

struct TacParser {
    toks: Vec<(TTok, usize)>,
    i: usize,
    len: usize,
}

impl TacParser {
    fn peek(&self) -> Option<&TTok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.len, |(_, p)| *p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(TTok::Word(x)) if x == w)
    }

    fn alt(&mut self) -> Result<TacticSpec> {
        let mut ts = vec![self.seq()?];
        while self.is_word("ORELSE") {
            self.i += 1;
            ts.push(self.seq()?);
        }
        Ok(if ts.len() == 1 { ts.pop().unwrap() } else { TacticSpec::OrElse(ts) })
    }

    fn seq(&mut self) -> Result<TacticSpec> {
        let mut ts = vec![self.rep()?];
        while self.is_word("THEN") {
            self.i += 1;
            ts.push(self.rep()?);
        }
        Ok(if ts.len() == 1 { ts.pop().unwrap() } else { TacticSpec::Then(ts) })
    }

    fn rep(&mut self) -> Result<TacticSpec> {
        if self.is_word("repeat") {
            self.i += 1;
            return Ok(TacticSpec::Repeat(Box::new(self.rep()?)));
        }
        self.atom()
    }

    fn number(&mut self) -> usize {
        match self.peek() {
            Some(TTok::Num(n)) => {
                let n = *n;
                self.i += 1;
                n
            }
            _ => 1,
        }
    }

    fn atom(&mut self) -> Result<TacticSpec> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(TTok::Open) => {
                self.i += 1;
                let t = self.alt()?;
                match self.peek() {
                    Some(TTok::Close) => {
                        self.i += 1;
                        Ok(t)
                    }
                    _ => Err(Error::parse(self.pos(), "expected ')'")),
                }
            }
            Some(TTok::Word(w)) if w == "assume" => {
                self.i += 1;
                Ok(TacticSpec::Assume { subgoal: self.number() })
            }
            Some(TTok::Word(w)) if w == "all_tac" => {
                self.i += 1;
                Ok(TacticSpec::All)
            }
            Some(TTok::Word(w)) if w == "no_tac" => {
                self.i += 1;
                Ok(TacticSpec::No)
            }
            Some(TTok::Word(w)) if w == "resolve" => {
                self.i += 1;
                let mut rules = Vec::new();
                while let Some(TTok::Word(r)) = self.peek() {
                    if ["THEN", "ORELSE", "where", "repeat"].contains(&r.as_str()) {
                        break;
                    }
                    rules.push(r.clone());
                    self.i += 1;
                }
                if rules.is_empty() {
                    return Err(Error::parse(self.pos(), "expected a rule name"));
                }
                let subgoal = self.number();
                let mut inst = Vec::new();
                if self.is_word("where") {
                    loop {
                        self.i += 1;
                        let vpos = self.pos();
                        let Some(TTok::Word(v)) = self.peek().cloned() else {
                            return Err(Error::parse(vpos, "expected a variable"));
                        };
                        self.i += 1;
                        if !self.is_word(":=") {
                            return Err(Error::parse(self.pos(), "expected ':='"));
                        }
                        self.i += 1;
                        let Some(TTok::Quoted(t)) = self.peek().cloned() else {
                            return Err(Error::parse(self.pos(), "expected a quoted term"));
                        };
                        self.i += 1;
                        inst.push((v, t));
                        if !self.is_word("and") {
                            break;
                        }
                    }
                }
                Ok(TacticSpec::Resolve { rules, subgoal, inst })
            }
            _ => Err(Error::parse(pos, "expected a tactic")),
        }
    }
}

struct Frame {
    state: ProofState,
    /// Remaining alternatives of the tactic that produced `state`.
    pending: Option<StateStream>,
}

struct Proof {
    thy: Arc<Theory>,
    /// Named assumptions, as theorems with their outer `!!` made schematic.
    asms: Vec<(String, Term, Theorem)>,
    stack: Vec<Frame>,
}

/// Loaded theories, stored theorems and open proofs.
pub struct Session {
    theories: BTreeMap<String, Arc<Theory>>,
    theorems: BTreeMap<String, Theorem>,
    proofs: BTreeMap<u64, Proof>,
    next_id: u64,
    depth: usize,
    last_proof: Option<u64>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({ "ok": false, "error": e.to_string() });
    if let Error::Parse { pos, .. } = e {
        v["pos"] = json!(pos);
    }
    v
}

impl Session {
    pub fn new() -> Session {
        let mut theories = BTreeMap::new();
        for n in ["Pure", "IPL", "IFOL"] {
            theories.insert(n.to_string(), Theory::builtin(n).expect("builtin theory"));
        }
        Session { theories, theorems: BTreeMap::new(), proofs: BTreeMap::new(), next_id: 1, depth: DEFAULT_DEPTH, last_proof: None }
    }

    pub fn with_depth(mut self, depth: usize) -> Session {
        self.depth = depth;
        self
    }

    /// A session whose unification depth is taken from `METAPROOF_DEPTH`
    /// when that is set to a number.
    pub fn from_env() -> Session {
        let depth = std::env::var("METAPROOF_DEPTH").ok().and_then(|d| d.parse().ok()).unwrap_or(DEFAULT_DEPTH);
        Session::new().with_depth(depth)
    }

    pub fn theory(&self, name: &str) -> Result<Arc<Theory>> {
        self.theories.get(name).cloned().ok_or_else(|| Error::UnknownTheory(name.to_string()))
    }

    pub fn theorem(&self, name: &str) -> Option<&Theorem> {
        self.theorems.get(name)
    }

    /// Execute one JSON-encoded request and return the JSON response text.
    pub fn exec_json(&mut self, line: &str) -> String {
        let resp = match serde_json::from_str::<Value>(line) {
            Ok(v) => self.exec(&v),
            Err(_) => json!({ "ok": false, "error": "parse" }),
        };
        resp.to_string()
    }

    /// Execute one request. Failures are reported in the response.
    pub fn exec(&mut self, cmd: &Value) -> Value {
        self.dispatch(cmd).unwrap_or_else(|e| error_json(&e))
    }

    fn dispatch(&mut self, cmd: &Value) -> Result<Value> {
        let obj = cmd.as_object().ok_or_else(|| bad("request must be an object"))?;
        let name = obj.get("cmd").and_then(Value::as_str).ok_or_else(|| bad("missing cmd"))?;
        let str_field = |k: &str| obj.get(k).and_then(Value::as_str).ok_or_else(|| bad(format!("missing {k}")));
        let id_field = || -> Result<u64> {
            match obj.get("proofId") {
                Some(v) => v.as_u64().ok_or_else(|| bad("proofId must be a number")),
                None => self.last_proof.ok_or_else(|| bad("missing proofId")),
            }
        };
        match name {
            "load_theory" => {
                let text = match (obj.get("text").and_then(Value::as_str), obj.get("path").and_then(Value::as_str)) {
                    (Some(t), _) => t.to_string(),
                    (None, Some(p)) => std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{p}: {e}")))?,
                    _ => return Err(bad("load_theory needs path or text")),
                };
                self.load_theory(&text)
            }
            "goal" => {
                let thy = str_field("thy")?.to_string();
                let prop = str_field("prop")?.to_string();
                let asms = match obj.get("asms") {
                    None => Vec::new(),
                    Some(Value::Array(xs)) => xs
                        .iter()
                        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("asms must be strings")))
                        .collect::<Result<_>>()?,
                    Some(_) => return Err(bad("asms must be a list")),
                };
                self.goal(&thy, &prop, &asms)
            }
            "apply" => {
                let id = id_field()?;
                let spec = TacticSpec::from_json(obj.get("tactic").ok_or_else(|| bad("missing tactic"))?)?;
                self.apply(id, &spec)
            }
            "back" => self.back(id_field()?),
            "undo" => self.undo(id_field()?),
            "state" => {
                let id = id_field()?;
                self.state_response(id)
            }
            "qed" => self.qed(id_field()?, str_field("name")?),
            "list_rules" => {
                let thy = match obj.get("thy").and_then(Value::as_str) {
                    Some(t) => t.to_string(),
                    None => self.proof(id_field()?)?.thy.name().to_string(),
                };
                let id = obj.get("proofId").and_then(Value::as_u64);
                self.list_rules(&thy, id)
            }
            other => Err(bad(format!("unknown command {other}"))),
        }
    }

    fn proof(&self, id: u64) -> Result<&Proof> {
        self.proofs.get(&id).ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    fn proof_mut(&mut self, id: u64) -> Result<&mut Proof> {
        self.proofs.get_mut(&id).ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn load_theory(&mut self, text: &str) -> Result<Value> {
        let known = self.theories.clone();
        let thy = syntax::parse_theory_with(text, &|n| {
            known.get(n).cloned().ok_or_else(|| Error::UnknownTheory(n.to_string()))
        })?;
        if self.theories.contains_key(thy.name()) {
            return Err(Error::DuplicateName(thy.name().to_string()));
        }
        let axioms: Vec<String> = thy.own_axioms().iter().map(|(n, _)| n.to_string()).collect();
        self.theories.insert(thy.name().to_string(), thy.clone());
        Ok(json!({ "ok": true, "theory": thy.name(), "axioms": axioms }))
    }

    pub fn goal(&mut self, thy: &str, prop: &str, asms: &[String]) -> Result<Value> {
        let thy = self.theory(thy)?;
        let goal = parse_prop(&thy, prop, &ParseCtx::new())?;
        let mut ctx = ParseCtx::from_terms([&goal]);
        let mut named = Vec::new();
        for (k, a) in asms.iter().enumerate() {
            let t = parse_prop(&thy, a, &ctx)?;
            ctx.add(&t);
            let th = schematic_asm(&kernel::assume(&thy, &t)?)?;
            named.push((format!("asm{}", k + 1), t, th));
        }
        let state = tactic::initial_state(&thy, &goal)?.with_depth(self.depth);
        let id = self.next_id;
        self.next_id += 1;
        self.proofs.insert(id, Proof { thy, asms: named, stack: vec![Frame { state, pending: None }] });
        self.last_proof = Some(id);
        self.state_response(id)
    }

    fn lookup_rule(&self, proof: &Proof, name: &str) -> Result<Theorem> {
        if let Some((_, _, th)) = proof.asms.iter().find(|(n, _, _)| n == name) {
            return Ok(th.clone());
        }
        if let Some(th) = self.theorems.get(name) {
            return Ok(th.clone());
        }
        kernel::axiom(&proof.thy, name)
    }

    fn build(&self, proof: &Proof, state: &ProofState, spec: &TacticSpec) -> Result<Tactic> {
        Ok(match spec {
            TacticSpec::Resolve { rules, subgoal, inst } => {
                let mut ths = Vec::new();
                for r in rules {
                    let th = self.lookup_rule(proof, r)?;
                    ths.push(if inst.is_empty() { th } else { instantiate_rule(&th, inst, state)? });
                }
                tactic::resolve_tac(ths, *subgoal)
            }
            TacticSpec::Assume { subgoal } => tactic::assume_tac(*subgoal),
            TacticSpec::Then(ts) => {
                let mut it = ts.iter();
                let first = self.build(proof, state, it.next().expect("nonempty"))?;
                it.try_fold(first, |acc, t| Ok::<_, Error>(tactic::then_(acc, self.build(proof, state, t)?)))?
            }
            TacticSpec::OrElse(ts) => {
                let mut it = ts.iter();
                let first = self.build(proof, state, it.next().expect("nonempty"))?;
                it.try_fold(first, |acc, t| Ok::<_, Error>(tactic::orelse(acc, self.build(proof, state, t)?)))?
            }
            TacticSpec::Repeat(t) => tactic::repeat(self.build(proof, state, t)?),
            TacticSpec::All => tactic::all_tac(),
            TacticSpec::No => tactic::no_tac(),
        })
    }

    pub fn apply(&mut self, id: u64, spec: &TacticSpec) -> Result<Value> {
        let proof = self.proof(id)?;
        let top = &proof.stack.last().expect("stack is never empty").state;
        let tac = self.build(proof, top, spec)?;
        let mut stream = tac.apply(top)?;
        let Some(next) = stream.next() else {
            return Err(Error::TacticFailed("no unifier; the state is unchanged".into()));
        };
        self.proof_mut(id)?.stack.push(Frame { state: next, pending: Some(stream) });
        self.state_response(id)
    }

    pub fn back(&mut self, id: u64) -> Result<Value> {
        let proof = self.proof_mut(id)?;
        let frame = proof.stack.last_mut().expect("stack is never empty");
        let next = frame.pending.as_mut().and_then(|s| s.next()).ok_or(Error::NoMoreAlternatives)?;
        frame.state = next;
        self.state_response(id)
    }

    pub fn undo(&mut self, id: u64) -> Result<Value> {
        let proof = self.proof_mut(id)?;
        if proof.stack.len() <= 1 {
            return Err(Error::NothingToUndo);
        }
        proof.stack.pop();
        self.state_response(id)
    }

    pub fn current(&self, id: u64) -> Result<&ProofState> {
        Ok(&self.proof(id)?.stack.last().expect("stack is never empty").state)
    }

    /// Finish proof `id`: the goal with its assumptions discharged, and
    /// free variables made schematic.
    pub fn finish(&self, id: u64) -> Result<Theorem> {
        let proof = self.proof(id)?;
        let st = self.current(id)?;
        let mut th = tactic::finalize(st)?;
        if !proof.asms.is_empty() {
            for (_, a, _) in proof.asms.iter().rev() {
                th = kernel::implies_intr(a, &th)?;
            }
            th = kernel::varify(&th)?;
        }
        Ok(th)
    }

    pub fn qed(&mut self, id: u64, name: &str) -> Result<Value> {
        let thy = self.proof(id)?.thy.clone();
        if self.theorems.contains_key(name) || thy.axiom(name).is_some() {
            return Err(Error::DuplicateName(name.to_string()));
        }
        let th = self.finish(id)?;
        let text = syntax::print_thm(&th);
        self.theorems.insert(name.to_string(), th);
        Ok(json!({ "ok": true, "proofId": id, "name": name, "thm": text }))
    }

    pub fn list_rules(&self, thy: &str, proof: Option<u64>) -> Result<Value> {
        let t = self.theory(thy)?;
        let mut rules = Vec::new();
        for anc in t.ancestors().into_iter().rev() {
            for (n, p) in anc.own_axioms() {
                rules.push(json!({ "name": &**n, "theory": anc.name(), "kind": "axiom", "text": print_term(&t, p) }));
            }
        }
        for (n, th) in &self.theorems {
            if t.descends_from(th.theory().name()) {
                rules.push(json!({ "name": n, "theory": th.theory().name(), "kind": "theorem", "text": syntax::print_thm(th) }));
            }
        }
        if let Some(id) = proof {
            for (n, _, th) in &self.proof(id)?.asms {
                rules.push(json!({ "name": n, "theory": thy, "kind": "assumption", "text": syntax::print_thm(th) }));
            }
        }
        Ok(json!({ "ok": true, "theory": thy, "rules": rules }))
    }

    fn state_response(&self, id: u64) -> Result<Value> {
        Ok(json!({ "ok": true, "proofId": id, "state": render_state(self.current(id)?) }))
    }

    /// Execute one line of the text command syntax, or a JSON request if
    /// the line starts with `{`. Blank lines and `#` comments give `None`.
    pub fn exec_text(&mut self, line: &str) -> Option<Value> {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        if line.starts_with('{') {
            return Some(match serde_json::from_str::<Value>(line) {
                Ok(v) => self.exec(&v),
                Err(_) => json!({ "ok": false, "error": "parse" }),
            });
        }
        Some(self.text_command(line).unwrap_or_else(|e| error_json(&e)))
    }

    fn text_command(&mut self, line: &str) -> Result<Value> {
        let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let id = || self.last_proof.ok_or_else(|| bad("no active proof"));
        match word {
            "load" | "load_theory" => self.exec_checked(json!({ "cmd": "load_theory", "path": rest })),
            "goal" => {
                let (thy, body) = rest.split_once(char::is_whitespace).ok_or_else(|| bad("usage: goal THY PROP [assuming ASM; ...]"))?;
                let (prop, asms) = match body.split_once(" assuming ") {
                    Some((p, a)) => (p, a.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()),
                    None => (body, Vec::new()),
                };
                self.goal(thy, prop.trim(), &asms)
            }
            "apply" => {
                let spec = TacticSpec::parse(rest)?;
                self.apply(id()?, &spec)
            }
            "back" => self.back(id()?),
            "undo" => self.undo(id()?),
            "state" => self.state_response(id()?),
            "qed" => self.qed(id()?, rest),
            "rules" | "list_rules" => {
                if rest.is_empty() {
                    let id = id()?;
                    let thy = self.proof(id)?.thy.name().to_string();
                    self.list_rules(&thy, Some(id))
                } else {
                    self.list_rules(rest, None)
                }
            }
            other => Err(bad(format!("unknown command {other}"))),
        }
    }

    fn exec_checked(&mut self, v: Value) -> Result<Value> {
        self.dispatch(&v)
    }
}

/// Strip outer `!!` from an assumed proposition so it can serve as a rule.
fn schematic_asm(th: &Theorem) -> Result<Theorem> {
    let mut th = th.clone();
    while let Some((ty, f)) = th.prop().dest_all() {
        let hint = match f {
            Term::Abs(h, _, _) => h.to_string(),
            _ => "x".to_string(),
        };
        let v = Term::var(&hint, (th.max_index() + 1).max(0) as u32, ty.clone());
        th = kernel::forall_elim(&v, &th)?;
    }
    Ok(th)
}

/// Instantiate schematic variables of `th` named like `B`, `?B` or `?B.2`
/// with terms read in the context of `state`.
fn instantiate_rule(th: &Theorem, inst: &[(String, String)], state: &ProofState) -> Result<Theorem> {
    let thy = th.theory().clone();
    let mut ctx = ParseCtx::from_terms([state.thm().prop()]);
    ctx.add(th.prop());
    let mut s = Subst::new();
    for (k, src) in inst {
        let k = k.trim_start_matches('?');
        let (name, index) = match k.rsplit_once('.') {
            Some((n, i)) if i.chars().all(|c| c.is_ascii_digit()) => (n, i.parse().unwrap_or(0)),
            _ => (k, 0),
        };
        let v = vars(th.prop())
            .into_iter()
            .find(|v| &*v.name == name && v.index == index)
            .ok_or_else(|| bad(format!("rule has no variable ?{k}")))?;
        let t = parse_term_as(&thy, src, &ctx, &v.ty)?;
        s.insert(v, t)?;
    }
    kernel::instantiate(&s, th)
}

/// The structured and printed form of a proof state.
pub fn render_state(st: &ProofState) -> Value {
    let thy = st.thm().theory();
    let subgoals: Vec<Value> = st
        .subgoals()
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let v = SubgoalView::new(g);
            json!({
                "index": k + 1,
                "text": print_term(thy, g),
                "params": v.params.iter().map(|(n, ty)| json!({ "name": &**n, "type": ty.to_string() })).collect::<Vec<_>>(),
                "asms": v.asms.iter().map(|a| print_term(thy, a)).collect::<Vec<_>>(),
                "concl": print_term(thy, &v.concl),
            })
        })
        .collect();
    let flexflex: Vec<String> = st
        .thm()
        .flexflex()
        .iter()
        .map(|p| {
            let ty = crate::term::type_of(&p.lhs, &[]).expect("closed flex-flex pair");
            print_term(thy, &Term::equals(p.lhs.clone(), p.rhs.clone(), ty))
        })
        .collect();
    json!({
        "theory": thy.name(),
        "goal": print_term(thy, st.goal()),
        "conclusion": print_term(thy, &st.conclusion()),
        "text": print_term(thy, &thm_term(st.thm())),
        "nsubgoals": st.nsubgoals(),
        "subgoals": subgoals,
        "flexflex": flexflex,
    })
}
