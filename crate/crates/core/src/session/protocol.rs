//! The session protocol: length-prefixed JSON messages over TCP.
//!
//! Each message is a 4-byte big-endian length followed by that many bytes
//! of UTF-8 JSON. Every request gets exactly one response; see
//! `docs/protocol.md` for the message catalogue.

use std::io::{self, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::{json, Map, Value};

use super::solve::Equation;
use super::{Session, SessionError};
use crate::logic::{builtin, load_rules, Logic, BUILTIN};
use crate::tactic::Limits;
use crate::term::{vars_of, Term};

pub const PROTOCOL_VERSION: u64 = 1;
/// Largest accepted message body.
pub const MAX_FRAME: usize = 16 << 20;

const DEFAULT_CAP: usize = 5;
const DEFAULT_PAGE_SIZE: usize = 5;

pub fn write_frame(w: &mut impl Write, v: &Value) -> io::Result<()> {
    let body = serde_json::to_vec(v)?;
    let len = u32::try_from(body.len()).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "message too large"))?;
    w.write_all(&len.to_be_bytes())?;
    w.write_all(&body)?;
    w.flush()
}

/// A frame's body, or `None` at a clean end of stream.
pub fn read_frame(r: &mut impl Read) -> io::Result<Option<Vec<u8>>> {
    let mut len = [0u8; 4];
    match r.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    let len = u32::from_be_bytes(len) as usize;
    if len > MAX_FRAME {
        io::copy(&mut r.take(len as u64), &mut io::sink())?;
        return Err(io::Error::new(io::ErrorKind::InvalidData, format!("message of {len} bytes exceeds the limit")));
    }
    let mut body = vec![0; len];
    r.read_exact(&mut body)?;
    Ok(Some(body))
}

/// Send one request and wait for its response.
pub fn request(stream: &mut TcpStream, req: &Value) -> io::Result<Value> {
    write_frame(stream, req)?;
    let body = read_frame(stream)?.ok_or_else(|| io::Error::new(io::ErrorKind::UnexpectedEof, "connection closed"))?;
    serde_json::from_slice(&body).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

/// Why a request could not be answered.
struct Failure {
    kind: String,
    message: String,
}

impl From<SessionError> for Failure {
    fn from(e: SessionError) -> Failure {
        Failure {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

fn bad_request(msg: impl Into<String>) -> Failure {
    Failure {
        kind: "BadRequest".into(),
        message: msg.into(),
    }
}

fn error_response(id: Option<&Value>, f: Failure) -> Value {
    let mut m = Map::new();
    if let Some(id) = id {
        m.insert("id".into(), id.clone());
    }
    m.insert("ok".into(), false.into());
    m.insert("error".into(), json!({ "kind": f.kind, "message": f.message }));
    Value::Object(m)
}

/// Answer a malformed frame.
pub fn malformed(msg: &str) -> Value {
    error_response(None, bad_request(msg))
}

/// Structural form of a term.
pub fn term_tree(t: &Term) -> Value {
    match t {
        Term::Const(n, a) => json!({ "kind": "const", "name": n.as_ref(), "arity": a.to_string() }),
        Term::Var(v, a) => json!({ "kind": "var", "name": v.to_string(), "arity": a.to_string() }),
        Term::Bound(i) => json!({ "kind": "bound", "index": i }),
        Term::Abs(h, a, b) => json!({ "kind": "abs", "hint": h.as_ref(), "arity": a.to_string(), "body": term_tree(b) }),
        Term::App(..) => {
            let (head, args) = t.strip_app();
            json!({ "kind": "app", "head": term_tree(head), "args": args.into_iter().map(term_tree).collect::<Vec<_>>() })
        }
        Term::Param(p) => json!({
            "kind": "param",
            "base": p.base.as_ref(),
            "subs": p.subs.iter().map(term_tree).collect::<Vec<_>>(),
            "arity": p.arity.to_string(),
        }),
    }
}

fn logic_summary(l: &Logic) -> Value {
    json!({
        "name": l.name,
        "rules": l.rules.keys().collect::<Vec<_>>(),
        "tactics": l.tactics.keys().collect::<Vec<_>>(),
    })
}

fn str_field<'a>(req: &'a Value, key: &str) -> Result<&'a str, Failure> {
    req.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| bad_request(format!("missing string field `{key}`")))
}

fn opt_index(req: &Value, key: &str) -> Result<Option<usize>, Failure> {
    match req.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|n| Some(n as usize))
            .ok_or_else(|| bad_request(format!("field `{key}` must be a non-negative integer"))),
    }
}

fn index(req: &Value, key: &str) -> Result<usize, Failure> {
    opt_index(req, key)?.ok_or_else(|| bad_request(format!("missing integer field `{key}`")))
}

/// The full state record.
pub fn state(s: &mut Session) -> Value {
    let logic = s.logic.name.clone();
    let Some(goal) = s.goal().cloned() else {
        return json!({
            "logic": logic, "goal": null, "conclusion": null, "subgoals": [],
            "constraints": [], "legend": [], "history": [], "done": false,
        });
    };
    let view = s.view().expect("a goal is present");
    let subgoals: Vec<Value> = goal
        .premises
        .iter()
        .zip(&view.subgoals)
        .enumerate()
        .map(|(k, (p, text))| json!({ "index": k + 1, "text": text, "tree": term_tree(p) }))
        .collect();
    let legend: Vec<Value> = view
        .legend
        .iter()
        .map(|l| {
            let (label, def) = l.split_once(" = ").unwrap_or((l.as_str(), ""));
            json!({ "label": label, "definition": def })
        })
        .collect();
    let flags = s.history_flags();
    let history: Vec<Value> = flags
        .into_iter()
        .enumerate()
        .map(|(k, (command, more))| {
            let before = &s.history()[k].before;
            let after = s.history().get(k + 1).map(|n| &n.before).unwrap_or(&goal);
            let now = after.vars();
            let instantiated: Vec<String> = before
                .vars()
                .into_iter()
                .filter(|(v, _)| !now.contains_key(v))
                .map(|(v, _)| v.to_string())
                .collect();
            json!({ "step": k + 1, "command": command, "more": more, "instantiated": instantiated })
        })
        .collect();
    json!({
        "logic": logic,
        "goal": s.goal_text(),
        "conclusion": view.conclusion,
        "subgoals": subgoals,
        "constraints": view.constraints,
        "legend": legend,
        "history": history,
        "done": goal.is_theorem(),
    })
}

fn dispatch(s: &mut Session, cmd: &str, req: &Value) -> Result<Value, Failure> {
    match cmd {
        "hello" => Ok(json!({
            "protocol": PROTOCOL_VERSION,
            "server": "hornkit",
            "version": env!("CARGO_PKG_VERSION"),
        })),
        "list-logics" => Ok(json!({
            "builtin": BUILTIN,
            "current": logic_summary(&s.logic),
        })),
        "load-rules" => {
            let logic = match (req.get("logic").and_then(Value::as_str), req.get("source").and_then(Value::as_str)) {
                (Some(name), None) => builtin(name).ok_or_else(|| SessionError::UnknownLogic(name.to_string()))?,
                (None, Some(src)) => {
                    let name = req.get("name").and_then(Value::as_str).unwrap_or("custom");
                    load_rules(name, src).map_err(SessionError::from)?
                }
                _ => return Err(bad_request("give exactly one of `logic` or `source`")),
            };
            s.set_logic(logic);
            Ok(logic_summary(&s.logic))
        }
        "new-goal" => {
            s.new_goal(str_field(req, "goal")?)?;
            Ok(state(s))
        }
        "state" => Ok(state(s)),
        "applicable-rules" => {
            let goal = index(req, "goal")?;
            let cap = opt_index(req, "cap")?.unwrap_or(DEFAULT_CAP).max(1);
            let rules: Vec<Value> = s
                .applicable_rules(goal, cap)?
                .into_iter()
                .map(|(name, count)| json!({ "name": name, "count": count, "capped": count >= cap }))
                .collect();
            Ok(json!({ "goal": goal, "rules": rules }))
        }
        "apply" => {
            s.apply(str_field(req, "tactic")?)?;
            Ok(state(s))
        }
        "backtrack" => {
            s.backtrack(index(req, "step")?)?;
            Ok(state(s))
        }
        "undo" => {
            s.undo()?;
            Ok(state(s))
        }
        "qed" => {
            let thm = s.qed()?;
            Ok(json!({
                "conclusion": s.logic.print(&thm.conclusion),
                "tree": term_tree(&thm.conclusion),
            }))
        }
        "solve" => {
            let (lhs, rhs) = (str_field(req, "lhs")?, str_field(req, "rhs")?);
            let page = opt_index(req, "page")?.unwrap_or(0);
            let size = opt_index(req, "size")?.unwrap_or(DEFAULT_PAGE_SIZE).max(1);
            let sig = match req.get("logic").and_then(Value::as_str) {
                Some(name) => builtin(name).ok_or_else(|| SessionError::UnknownLogic(name.to_string()))?.sig,
                None => s.logic.sig.clone(),
            };
            let eq = Equation::parse(&sig, lhs, rhs).map_err(SessionError::from)?;
            let (sols, more) = eq
                .page(s.limits.unify, page, size)
                .map_err(|e| SessionError::Search(e.into()))?;
            let vars: Vec<String> = vars_of(&eq.lhs)
                .into_keys()
                .chain(vars_of(&eq.rhs).into_keys())
                .map(|v| v.to_string())
                .collect();
            let unifiers: Vec<Value> = sols
                .into_iter()
                .map(|u| {
                    let bindings: Vec<Value> =
                        u.bindings.into_iter().map(|(v, t)| json!({ "var": v, "value": t })).collect();
                    json!({ "bindings": bindings, "constraints": u.constraints })
                })
                .collect();
            Ok(json!({ "page": page, "size": size, "vars": vars, "unifiers": unifiers, "more": more }))
        }
        "set-options" => {
            if let Some(d) = opt_index(req, "depth")? {
                s.limits.unify.max_depth = Some(d as u32);
            }
            if let Some(n) = opt_index(req, "nodes")? {
                s.limits.max_nodes = Some(n);
            }
            if let Some(c) = req.get("compress") {
                s.compress = c.as_bool().ok_or_else(|| bad_request("`compress` must be a boolean"))?;
            }
            Ok(json!({
                "depth": s.limits.unify.max_depth,
                "nodes": s.limits.max_nodes,
                "compress": s.compress,
            }))
        }
        other => Err(bad_request(format!("unknown command `{other}`"))),
    }
}

/// Answer one request. Never fails: every problem becomes an error record.
pub fn handle(s: &mut Session, req: &Value) -> Value {
    let id = req.get("id");
    let Some(cmd) = req.get("cmd").and_then(Value::as_str) else {
        return error_response(id, bad_request("missing string field `cmd`"));
    };
    let out = catch_unwind(AssertUnwindSafe(|| dispatch(s, cmd, req)));
    let result = match out {
        Ok(r) => r,
        Err(_) => Err(Failure {
            kind: "InternalError".into(),
            message: format!("internal error while handling `{cmd}`"),
        }),
    };
    match result {
        Ok(v) => {
            let mut m = Map::new();
            if let Some(id) = id {
                m.insert("id".into(), id.clone());
            }
            m.insert("ok".into(), true.into());
            m.insert("result".into(), v);
            Value::Object(m)
        }
        Err(f) => error_response(id, f),
    }
}

/// Answer one raw frame.
pub fn handle_bytes(s: &mut Session, body: &[u8]) -> Value {
    match serde_json::from_slice::<Value>(body) {
        Ok(v) if v.is_object() => handle(s, &v),
        Ok(_) => malformed("a request is a JSON object"),
        Err(e) => malformed(&format!("invalid JSON: {e}")),
    }
}

/// Serve one connection until the peer closes it.
pub fn serve_connection(mut stream: TcpStream, logic: Logic, limits: Limits, compress: bool) -> io::Result<()> {
    let mut s = Session::new(logic, limits);
    s.compress = compress;
    loop {
        let reply = match read_frame(&mut stream) {
            Ok(None) => return Ok(()),
            Ok(Some(body)) => handle_bytes(&mut s, &body),
            Err(e) if e.kind() == io::ErrorKind::InvalidData => malformed(&e.to_string()),
            Err(e) => return Err(e),
        };
        write_frame(&mut stream, &reply)?;
    }
}

/// Accept connections forever, one session and thread per connection.
pub fn serve(listener: TcpListener, logic: Logic, limits: Limits, compress: bool) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let logic = logic.clone();
        std::thread::spawn(move || {
            let _ = serve_connection(stream, logic, limits, compress);
        });
    }
    Ok(())
}
