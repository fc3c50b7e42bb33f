//! Text format of update streams.
//!
//! ```text
//! dsg <n> [rank <r>]
//! + u v [w ...]     insert
//! - u v [w ...]     delete
//! qv                value query
//! qs                subgraph query
//! ```
//!
//! `#` starts a comment anywhere on a line; blank lines are ignored.

use dyn_densest::Vertex;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Insert,
    Delete,
    QueryValue,
    QuerySubgraph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateEvent {
    pub kind: EventKind,
    /// Endpoints for updates, empty for queries.
    pub endpoints: Vec<Vertex>,
    /// 1-based source line.
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stream {
    pub n: u32,
    /// Present for hypergraph streams.
    pub rank: Option<u32>,
    pub events: Vec<UpdateEvent>,
}

impl Stream {
    pub fn max_arity(&self) -> usize {
        self.rank.map_or(2, |r| r as usize)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, msg: msg.into() }
}

fn parse_header(line: usize, tokens: &[&str]) -> Result<(u32, Option<u32>), ParseError> {
    let number = |s: &str, what: &str| s.parse::<u32>().map_err(|_| err(line, format!("invalid {what} `{s}`")));
    match tokens {
        ["dsg", n] => Ok((number(n, "vertex count")?, None)),
        ["dsg", n, "rank", r] => Ok((number(n, "vertex count")?, Some(number(r, "rank")?))),
        _ => Err(err(line, "expected header `dsg <n> [rank <r>]`")),
    }
    .and_then(|(n, r)| {
        if n == 0 {
            return Err(err(line, "vertex count must be at least 1"));
        }
        if let Some(r) = r {
            if r < 2 {
                return Err(err(line, "rank must be at least 2"));
            }
        }
        Ok((n, r))
    })
}

pub fn parse_stream(text: &str) -> Result<Stream, ParseError> {
    let mut header: Option<(u32, Option<u32>)> = None;
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let Some((n, rank)) = header else {
            header = Some(parse_header(line, &tokens)?);
            continue;
        };
        let kind = match tokens[0] {
            "+" => EventKind::Insert,
            "-" => EventKind::Delete,
            "qv" => EventKind::QueryValue,
            "qs" => EventKind::QuerySubgraph,
            other => return Err(err(line, format!("unknown event `{other}`"))),
        };
        let args = &tokens[1..];
        if matches!(kind, EventKind::QueryValue | EventKind::QuerySubgraph) {
            if !args.is_empty() {
                return Err(err(line, "queries take no arguments"));
            }
            events.push(UpdateEvent {
                kind,
                endpoints: Vec::new(),
                line,
            });
            continue;
        }
        let max = rank.unwrap_or(2) as usize;
        if args.len() < 2 || args.len() > max {
            let want = if max == 2 {
                "2".to_string()
            } else {
                format!("2..={max}")
            };
            return Err(err(line, format!("expected {want} endpoints, got {}", args.len())));
        }
        let mut endpoints = Vec::with_capacity(args.len());
        for a in args {
            let v: Vertex = a.parse().map_err(|_| err(line, format!("invalid vertex `{a}`")))?;
            if v >= n {
                return Err(err(line, format!("vertex {v} out of range for n = {n}")));
            }
            if endpoints.contains(&v) {
                return Err(err(line, format!("endpoint {v} repeated")));
            }
            endpoints.push(v);
        }
        events.push(UpdateEvent { kind, endpoints, line });
    }
    let (n, rank) = header.ok_or_else(|| err(1, "missing header `dsg <n> [rank <r>]`"))?;
    Ok(Stream { n, rank, events })
}
