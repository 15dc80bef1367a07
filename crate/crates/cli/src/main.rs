//! `metaproof`: an interactive prover front end.
//!
//! Without a mode flag, reads one request per line from stdin (JSON objects
//! or text commands) and writes one JSON response per line.

use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::{Arc, Mutex};

use axum::extract::State;
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::IntoResponse;
use axum::routing::post;
use axum::Router;
use clap::Parser;
use metaproof::Session;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "metaproof", version, about = "An LCF-style prover for a higher-order meta-logic")]
struct Args {
    /// Serve the JSON protocol over HTTP on 127.0.0.1:PORT
    #[arg(long, value_name = "PORT")]
    serve: Option<u16>,

    /// Interactive prompt with human-readable output
    #[arg(long, conflicts_with = "serve")]
    repl: bool,

    /// Load a theory file before anything else (repeatable)
    #[arg(long, value_name = "FILE")]
    load: Vec<PathBuf>,

    /// Run a script of commands, one per line; stops at the first failure
    #[arg(long, value_name = "SCRIPT")]
    run: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut session = Session::from_env();

    for path in &args.load {
        let resp = session.exec(&json!({ "cmd": "load_theory", "path": path }));
        if !is_ok(&resp) {
            eprintln!("{}: {}", path.display(), resp["error"].as_str().unwrap_or("load failed"));
            return ExitCode::FAILURE;
        }
    }

    if let Some(script) = &args.run {
        if let Err(code) = run_script(&mut session, script) {
            return code;
        }
    }

    if let Some(port) = args.serve {
        return serve(session, port);
    }
    if args.repl {
        return repl(&mut session);
    }
    if args.run.is_none() {
        return line_mode(&mut session);
    }
    ExitCode::SUCCESS
}

fn is_ok(v: &Value) -> bool {
    v["ok"] == Value::Bool(true)
}

fn run_script(session: &mut Session, path: &PathBuf) -> Result<(), ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::FAILURE
    })?;
    for (n, line) in text.lines().enumerate() {
        let Some(resp) = session.exec_text(line) else { continue };
        println!("{resp}");
        if !is_ok(&resp) {
            eprintln!("{}:{}: {}", path.display(), n + 1, resp["error"].as_str().unwrap_or("failed"));
            return Err(ExitCode::FAILURE);
        }
    }
    Ok(())
}

fn line_mode(session: &mut Session) -> ExitCode {
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        if let Some(resp) = session.exec_text(&line) {
            if writeln!(out, "{resp}").and_then(|_| out.flush()).is_err() {
                break;
            }
        }
    }
    ExitCode::SUCCESS
}

fn repl(session: &mut Session) -> ExitCode {
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        print!("> ");
        let _ = io::stdout().flush();
        let Some(Ok(line)) = lines.next() else { break };
        let line = line.trim();
        if line == "quit" || line == "exit" {
            break;
        }
        if let Some(resp) = session.exec_text(line) {
            println!("{}", render(&resp));
        }
    }
    ExitCode::SUCCESS
}

/// Human-readable form of a response.
fn render(v: &Value) -> String {
    if !is_ok(v) {
        let mut s = format!("error: {}", v["error"].as_str().unwrap_or("?"));
        if let Some(p) = v["pos"].as_u64() {
            s.push_str(&format!(" (at offset {p})"));
        }
        return s;
    }
    if let Some(st) = v.get("state") {
        let mut s = format!("{}\n", st["conclusion"].as_str().unwrap_or(""));
        let subgoals = st["subgoals"].as_array().map(Vec::as_slice).unwrap_or(&[]);
        if subgoals.is_empty() {
            s.push_str("No subgoals!");
        }
        for g in subgoals {
            s.push_str(&format!(" {}. {}\n", g["index"], g["text"].as_str().unwrap_or("")));
        }
        for c in st["flexflex"].as_array().into_iter().flatten() {
            s.push_str(&format!(" flex-flex: {}\n", c.as_str().unwrap_or("")));
        }
        return s.trim_end().to_string();
    }
    if let Some(thm) = v["thm"].as_str() {
        return format!("{}: {thm}", v["name"].as_str().unwrap_or(""));
    }
    if let Some(rules) = v["rules"].as_array() {
        return rules
            .iter()
            .map(|r| format!("{} ({}): {}", r["name"].as_str().unwrap_or(""), r["kind"].as_str().unwrap_or(""), r["text"].as_str().unwrap_or("")))
            .collect::<Vec<_>>()
            .join("\n");
    }
    if let Some(thy) = v["theory"].as_str() {
        return format!("theory {thy} loaded");
    }
    v.to_string()
}

type Shared = Arc<Mutex<Session>>;

fn serve(session: Session, port: u16) -> ExitCode {
    let rt = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("cannot start runtime: {e}");
            return ExitCode::FAILURE;
        }
    };
    let state: Shared = Arc::new(Mutex::new(session));
    let app = Router::new()
        .route("/", post(handle).options(preflight))
        .route("/api", post(handle).options(preflight))
        .with_state(state);
    rt.block_on(async move {
        let listener = match tokio::net::TcpListener::bind(("127.0.0.1", port)).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("cannot bind port {port}: {e}");
                return ExitCode::FAILURE;
            }
        };
        eprintln!("listening on http://127.0.0.1:{}", listener.local_addr().map(|a| a.port()).unwrap_or(port));
        match axum::serve(listener, app).await {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("server error: {e}");
                ExitCode::FAILURE
            }
        }
    })
}

fn cors() -> HeaderMap {
    let mut h = HeaderMap::new();
    h.insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    h.insert(header::ACCESS_CONTROL_ALLOW_METHODS, HeaderValue::from_static("POST, OPTIONS"));
    h.insert(header::ACCESS_CONTROL_ALLOW_HEADERS, HeaderValue::from_static("content-type"));
    h
}

async fn handle(State(session): State<Shared>, body: String) -> impl IntoResponse {
    // one lock for the whole command keeps requests in arrival order
    let resp = match session.lock() {
        Ok(mut s) => s.exec_json(&body),
        Err(_) => json!({ "ok": false, "error": "session poisoned" }).to_string(),
    };
    let mut h = cors();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    (StatusCode::OK, h, resp)
}

async fn preflight() -> impl IntoResponse {
    (StatusCode::NO_CONTENT, cors())
}
