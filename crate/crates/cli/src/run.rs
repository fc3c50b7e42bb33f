//! Drives a maintainer over a parsed stream.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use dyn_densest::bounds::{additive_slack, default_threshold, to_big};
use dyn_densest::density::combined_cap;
use dyn_densest::{oracle, Config, Counters, DensityEstimator, HyperId, HypergraphMaintainer, Mode, Rational, Vertex};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::stream::{EventKind, Stream};

/// Constant of the additive term `c·ln n/(ε·k)` used by `--verify`.
pub const VERIFY_C_ADD: u64 = 4;
/// Largest vertex count checked by subset enumeration; flow is used above it.
pub const BRUTE_FORCE_MAX_N: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Amortized,
    #[value(name = "worstcase")]
    WorstCase,
    Combined,
    Hypergraph,
}

/// Overrides on top of the defaults derived from `n`, the rank and ε.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub mode: Option<RunMode>,
    pub eps: Option<Rational>,
    pub alpha: Option<Rational>,
    pub budget_c: Option<u64>,
    pub dup_k: Option<u64>,
    pub threshold_t: Option<u64>,
    pub verify: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Value(Rational),
    Subgraph { vertices: Vec<Vertex>, density: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub mode: RunMode,
    pub n: u32,
    pub rank: Option<u32>,
    pub eps: String,
    pub alpha: String,
    pub budget_c: u64,
    pub dup_k: u64,
    pub threshold_t: Option<u64>,
    pub truncation_cap: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub config: ConfigEcho,
    pub events: u64,
    pub inserts: u64,
    pub deletes: u64,
    pub queries: u64,
    pub arcs_processed: u64,
    pub flips: u64,
    pub label_resets: u64,
    pub max_op_iterations: u64,
    pub max_depth: u64,
    pub verified_events: u64,
    pub verified_queries: u64,
    pub wall_time_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub answers: Vec<Answer>,
    pub metrics: Metrics,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("event {index} (line {line}): {source}")]
    Event {
        index: usize,
        line: usize,
        source: dyn_densest::Error,
    },
    #[error("verification failed at event {index} (line {line}): {detail}")]
    Verification { index: usize, line: usize, detail: String },
}

fn ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl RunReport {
    /// Line-oriented output: one `value` line per value query, `subgraph` and
    /// `density` lines per subgraph query, then the `metrics` line.
    pub fn render(&self, metrics_only: bool) -> String {
        let mut out = String::new();
        if !metrics_only {
            for a in &self.answers {
                match a {
                    Answer::Value(v) => writeln!(out, "value {}", ratio(v)).unwrap(),
                    Answer::Subgraph { vertices, density } => {
                        out.push_str("subgraph");
                        for v in vertices {
                            write!(out, " {v}").unwrap();
                        }
                        out.push('\n');
                        writeln!(out, "density {}", ratio(density)).unwrap();
                    }
                }
            }
        }
        let json = serde_json::to_string(&self.metrics).expect("metrics serialize");
        writeln!(out, "metrics {json}").unwrap();
        out
    }
}

enum Engine {
    Graph(Box<DensityEstimator>),
    Hyper {
        m: Box<HypergraphMaintainer>,
        /// Live handles per sorted endpoint set, most recent last.
        live: HashMap<Vec<Vertex>, Vec<HyperId>>,
    },
}

impl Engine {
    fn counters(&self) -> Counters {
        match self {
            Engine::Graph(e) => e.counters(),
            Engine::Hyper { m, .. } => m.counters().clone(),
        }
    }

    fn apply(&mut self, kind: EventKind, ends: &[Vertex]) -> dyn_densest::Result<()> {
        match self {
            Engine::Graph(e) => match kind {
                EventKind::Insert => e.insert_edge(ends[0], ends[1]).map(drop),
                EventKind::Delete => e.delete_edge(ends[0], ends[1]).map(drop),
                _ => Ok(()),
            },
            Engine::Hyper { m, live } => {
                let mut key = ends.to_vec();
                key.sort_unstable();
                match kind {
                    EventKind::Insert => {
                        let (id, _) = m.insert_hyperedge(ends)?;
                        live.entry(key).or_default().push(id);
                        Ok(())
                    }
                    EventKind::Delete => {
                        let missing = || dyn_densest::Error::InvalidHyperedge(format!("{ends:?} is not present"));
                        let handles = live.get_mut(&key).ok_or_else(missing)?;
                        let id = *handles.last().expect("empty handle lists are removed");
                        m.delete_hyperedge(id)?;
                        handles.pop();
                        if handles.is_empty() {
                            live.remove(&key);
                        }
                        Ok(())
                    }
                    _ => Ok(()),
                }
            }
        }
    }

    fn value(&self) -> Rational {
        match self {
            Engine::Graph(e) => e.density_value(),
            Engine::Hyper { m, .. } => m.density_value(),
        }
    }

    fn subgraph(&self) -> (Vec<Vertex>, Rational) {
        let (set, d) = match self {
            Engine::Graph(e) => {
                let s = e.densest_subgraph();
                let d = if s.is_empty() {
                    None
                } else {
                    Some(e.subgraph_density(&s))
                };
                (s, d)
            }
            Engine::Hyper { m, .. } => {
                let s = m.densest_subgraph();
                let d = if s.is_empty() {
                    None
                } else {
                    Some(m.subgraph_density(&s))
                };
                (s, d)
            }
        };
        let d = d
            .map(|r| r.expect("extracted vertices are in range"))
            .unwrap_or_else(|| Rational::from_integer(0));
        (set, d)
    }

    fn check_invariants(&self) -> Result<(), String> {
        match self {
            Engine::Graph(e) => e.check_invariants(),
            Engine::Hyper { m, .. } => m.check_invariants(),
        }
        .map_err(|v| v.to_string())
    }
}

fn build_config(stream: &Stream, mode: RunMode, opts: &RunOptions) -> Result<Config, RunError> {
    let eps = opts
        .eps
        .unwrap_or_else(|| Rational::new(Config::DEFAULT_EPS.0, Config::DEFAULT_EPS.1));
    let mut config = match mode {
        RunMode::Hypergraph => Config::hypergraph(stream.n, stream.max_arity() as u32, eps),
        _ => Config::with_eps(stream.n, eps),
    };
    if let Some(a) = opts.alpha {
        config = config.alpha(a);
    }
    if let Some(c) = opts.budget_c {
        config = config.budget_c(c);
    }
    if let Some(k) = opts.dup_k {
        config = config.dup_k(k);
    }
    config = config.threshold(opts.threshold_t);
    config.validate().map_err(|e| RunError::Usage(e.to_string()))?;
    Ok(config)
}

fn build_engine(stream: &Stream, mode: RunMode, config: &Config) -> dyn_densest::Result<Engine> {
    let graph = |m| DensityEstimator::new(m, config.clone()).map(|e| Engine::Graph(Box::new(e)));
    match mode {
        RunMode::Amortized => graph(Mode::Amortized),
        RunMode::WorstCase => graph(Mode::WorstCase),
        RunMode::Combined => graph(Mode::Combined),
        RunMode::Hypergraph => {
            let rank = stream.max_arity() as u32;
            let m = match config.threshold_t {
                Some(t) => HypergraphMaintainer::with_threshold(
                    config.clone(),
                    rank,
                    combined_cap(&config.eps, config.dup_k, t),
                )?,
                None => HypergraphMaintainer::new(config.clone(), rank)?,
            };
            Ok(Engine::Hyper {
                m: Box::new(m),
                live: HashMap::new(),
            })
        }
    }
}

/// Hypergraph streams default to the hypergraph maintainer, graph streams to
/// the worst-case one.
pub fn resolve_mode(stream: &Stream, requested: Option<RunMode>) -> Result<RunMode, RunError> {
    let mode = requested.unwrap_or(if stream.rank.is_some() {
        RunMode::Hypergraph
    } else {
        RunMode::WorstCase
    });
    if mode != RunMode::Hypergraph && stream.max_arity() > 2 {
        return Err(RunError::Usage(format!(
            "mode {mode:?} needs a graph stream, the header declares rank {}",
            stream.max_arity()
        )));
    }
    Ok(mode)
}

pub fn run(stream: &Stream, opts: &RunOptions) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let mode = resolve_mode(stream, opts.mode)?;
    if matches!(mode, RunMode::Amortized | RunMode::WorstCase) && opts.threshold_t.is_some() {
        return Err(RunError::Usage(
            "--threshold-t only applies to combined and hypergraph modes".into(),
        ));
    }
    let config = build_config(stream, mode, opts)?;
    let mut engine = build_engine(stream, mode, &config).map_err(|e| RunError::Usage(e.to_string()))?;
    let mut verifier = opts.verify.then(|| Verifier::new(&config, mode));

    let mut answers = Vec::new();
    let (mut inserts, mut deletes, mut queries) = (0, 0, 0);
    for (index, ev) in stream.events.iter().enumerate() {
        let fail = |detail: String| RunError::Verification {
            index,
            line: ev.line,
            detail,
        };
        match ev.kind {
            EventKind::Insert | EventKind::Delete => {
                engine.apply(ev.kind, &ev.endpoints).map_err(|source| RunError::Event {
                    index,
                    line: ev.line,
                    source,
                })?;
                if ev.kind == EventKind::Insert {
                    inserts += 1;
                } else {
                    deletes += 1;
                }
            }
            EventKind::QueryValue => {
                queries += 1;
                answers.push(Answer::Value(engine.value()));
            }
            EventKind::QuerySubgraph => {
                queries += 1;
                let (vertices, density) = engine.subgraph();
                answers.push(Answer::Subgraph { vertices, density });
            }
        }
        if let Some(v) = verifier.as_mut() {
            engine.check_invariants().map_err(fail)?;
            v.events += 1;
            if matches!(ev.kind, EventKind::QueryValue | EventKind::QuerySubgraph) {
                v.check_query(&engine).map_err(fail)?;
            }
        }
    }

    let c = engine.counters();
    let truncation_cap = match &engine {
        Engine::Graph(e) => e.truncation_cap(),
        Engine::Hyper { m, .. } => m.cap(),
    };
    let (verified_events, verified_queries) = verifier.map_or((0, 0), |v| (v.events, v.queries));
    let metrics = Metrics {
        config: ConfigEcho {
            mode,
            n: config.n,
            rank: (mode == RunMode::Hypergraph).then(|| stream.max_arity() as u32),
            eps: ratio(&config.eps),
            alpha: ratio(&config.alpha),
            budget_c: config.budget_c,
            dup_k: config.dup_k,
            threshold_t: config.threshold_t,
            truncation_cap,
        },
        events: stream.events.len() as u64,
        inserts,
        deletes,
        queries,
        arcs_processed: c.arcs_processed,
        flips: c.flips,
        label_resets: c.label_resets,
        max_op_iterations: c.max_op_iterations,
        max_depth: c.max_depth,
        verified_events,
        verified_queries,
        wall_time_us: start.elapsed().as_micros() as u64,
    };
    Ok(RunReport { answers, metrics })
}

/// Oracle co-run for `--verify`.
struct Verifier {
    config: Config,
    mode: RunMode,
    events: u64,
    queries: u64,
}

impl Verifier {
    fn new(config: &Config, mode: RunMode) -> Self {
        Verifier {
            config: config.clone(),
            mode,
            events: 0,
            queries: 0,
        }
    }

    fn opt(&self, engine: &Engine) -> Result<Option<Rational>, String> {
        let n = self.config.n;
        let r = match engine {
            Engine::Graph(e) => {
                let mut edges = Vec::new();
                for (u, v, c) in e.edges() {
                    edges.extend(std::iter::repeat_n((u, v), c as usize));
                }
                edges.sort_unstable();
                if n <= BRUTE_FORCE_MAX_N {
                    oracle::exact_density_bruteforce(n, &edges)
                } else {
                    oracle::exact_density_flow(n, &edges)
                }
            }
            Engine::Hyper { m, .. } => {
                if n as usize > oracle::HYPER_BRUTE_FORCE_MAX_N {
                    return Ok(None);
                }
                let edges: Vec<Vec<Vertex>> = m.hyperedges().map(|(_, e)| e.to_vec()).collect();
                oracle::exact_hyper_density(n, &edges)
            }
        };
        r.map(|o| Some(o.opt_density)).map_err(|e| e.to_string())
    }

    /// `OPT ≤ value ≤ (1+ε)·OPT + add` and `density(extracted) ≥ (1−ε)·OPT − add`.
    fn check_query(&mut self, engine: &Engine) -> Result<(), String> {
        let Some(opt) = self.opt(engine)? else {
            return Ok(());
        };
        self.queries += 1;
        let value = engine.value();
        let (set, extracted) = engine.subgraph();
        let mut k = self.config.dup_k;
        let mut check_upper = true;
        match engine {
            Engine::Graph(e) if e.uses_fallback() => {
                let t = e
                    .config()
                    .threshold_t
                    .unwrap_or_else(|| default_threshold(self.config.n, &self.config.eps));
                if opt < Rational::from_integer(t as i64) {
                    return Err(format!("truncated answer rejected although OPT {opt} < T {t}"));
                }
                k = 1;
            }
            Engine::Hyper { m, .. } if m.cap().is_some() => {
                // the truncated value is only meaningful below the threshold
                let t = self.config.threshold_t.expect("cap implies threshold");
                check_upper = opt <= Rational::from_integer(t as i64);
            }
            _ => {}
        }
        let big = to_big;
        let one = BigRational::from_integer(BigInt::from(1));
        let e = big(&self.config.eps);
        let add = additive_slack(VERIFY_C_ADD, self.config.n, &self.config.eps, k);
        let (v, o) = (big(&value), big(&opt));
        if check_upper {
            let upper = (&one + &e) * &o + &add;
            if v < o || v > upper {
                return Err(format!(
                    "{:?} value {} outside [OPT {}, {}]",
                    self.mode,
                    ratio(&value),
                    ratio(&opt),
                    upper
                ));
            }
        }
        let lower = (&one - &e) * &o - &add;
        if big(&extracted) < lower {
            return Err(format!(
                "extracted set {set:?} has density {} below {} (OPT {})",
                ratio(&extracted),
                lower,
                ratio(&opt)
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::parse_stream;

    fn pile(n: usize) -> Stream {
        let mut text = String::from("dsg 2\n");
        for _ in 0..n {
            text.push_str("+ 0 1\n");
        }
        parse_stream(&text).unwrap()
    }

    #[test]
    fn verifier_rejects_value_above_bracket() {
        // k = 1 answers 13 for 25 parallel edges, OPT = 25/2; a verifier
        // expecting k = 10^6 and ε = 1/1000 allows at most about 12.51.
        let stream = pile(25);
        let loose = Config::with_eps(2, Rational::new(1, 4)).dup_k(1);
        let mut engine = build_engine(&stream, RunMode::WorstCase, &loose).unwrap();
        for ev in &stream.events {
            engine.apply(ev.kind, &ev.endpoints).unwrap();
        }
        assert_eq!(engine.value(), Rational::from_integer(13));
        let strict = Config::with_eps(2, Rational::new(1, 1000)).dup_k(1_000_000);
        let err = Verifier::new(&strict, RunMode::WorstCase)
            .check_query(&engine)
            .unwrap_err();
        assert!(err.contains("outside"), "{err}");
        assert!(Verifier::new(&loose, RunMode::WorstCase).check_query(&engine).is_ok());
    }

    #[test]
    fn hypergraph_delete_removes_latest_copy() {
        let stream = parse_stream("dsg 4 rank 3\n+ 0 1 2\n+ 2 1 0\n- 1 0 2\n- 0 1 2\n").unwrap();
        let config = build_config(&stream, RunMode::Hypergraph, &RunOptions::default()).unwrap();
        let mut engine = build_engine(&stream, RunMode::Hypergraph, &config).unwrap();
        for ev in &stream.events[..3] {
            engine.apply(ev.kind, &ev.endpoints).unwrap();
        }
        let Engine::Hyper { m, live } = &engine else {
            unreachable!()
        };
        assert_eq!(m.edge_count(), 1);
        assert_eq!(live[&vec![0, 1, 2]], vec![0]);
        engine.apply(EventKind::Delete, &[0, 1, 2]).unwrap();
        assert!(engine.apply(EventKind::Delete, &[0, 1, 2]).is_err());
    }

    #[test]
    fn graph_modes_reject_ranked_streams() {
        let stream = parse_stream("dsg 4 rank 3\n+ 0 1 2\n").unwrap();
        assert!(matches!(resolve_mode(&stream, None), Ok(RunMode::Hypergraph)));
        assert!(matches!(
            resolve_mode(&stream, Some(RunMode::Combined)),
            Err(RunError::Usage(_))
        ));
        let graph = parse_stream("dsg 4\n+ 0 1\n").unwrap();
        assert!(matches!(resolve_mode(&graph, None), Ok(RunMode::WorstCase)));
    }
}
