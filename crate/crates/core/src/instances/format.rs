//! Line-oriented text format for instances.
//!
//! A document starts with `type <kind>`; every other line is a keyword
//! followed by whitespace-separated values. Blank lines and lines starting
//! with `#` are ignored.
//!
//! ```text
//! type graph            n <count> / edge <u> <v> ...
//! type weighted-graph   n <count> / weights <w_0> .. <w_n-1> / edge <u> <v> ...
//! type metric           n <count> / row <d_i0> .. <d_in-1> (n rows) / demands <p> ...
//! type set-system       universe <count> / set <e> ... (one per set) /
//!                       costs <c_0> .. (optional) / cover <e> ...
//! type submodular       universe <count> / resource <e> ... / agent <e>:<w> ...
//! type terminal-pairs   points <count> / pair <u> <v> ...
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use super::{
    Graph, IResult, InstanceError, MetricInstance, SetSystem, SubmodularInstance, TerminalPairs,
    WeightedGraph,
};

/// Largest count accepted for `n`, `universe` or `points` in a document.
pub const MAX_DECLARED_SIZE: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Graph(Graph),
    WeightedGraph(WeightedGraph),
    Metric(MetricInstance),
    SetSystem(SetSystem),
    Submodular(SubmodularInstance),
    TerminalPairs(TerminalPairs),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Graph(_) => "graph",
            Instance::WeightedGraph(_) => "weighted-graph",
            Instance::Metric(_) => "metric",
            Instance::SetSystem(_) => "set-system",
            Instance::Submodular(_) => "submodular",
            Instance::TerminalPairs(_) => "terminal-pairs",
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Instance::Graph(g) => write_graph(g),
            Instance::WeightedGraph(g) => write_weighted_graph(g),
            Instance::Metric(m) => write_metric(m),
            Instance::SetSystem(s) => write_set_system(s),
            Instance::Submodular(s) => write_submodular(s),
            Instance::TerminalPairs(p) => write_terminal_pairs(p),
        }
    }
}

struct Line<'a> {
    number: usize,
    key: &'a str,
    values: Vec<&'a str>,
}

fn err(line: usize, field: &str, message: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                return None;
            }
            let mut parts = t.split_whitespace();
            let key = parts.next()?;
            Some(Line {
                number: i + 1,
                key,
                values: parts.collect(),
            })
        })
        .collect()
}

fn number<T: FromStr>(line: &Line, field: &str, token: &str) -> IResult<T> {
    token
        .parse()
        .map_err(|_| err(line.number, field, format!("cannot parse `{token}`")))
}

fn numbers<T: FromStr>(line: &Line, field: &str) -> IResult<Vec<T>> {
    line.values.iter().map(|t| number(line, field, t)).collect()
}

fn single<T: FromStr>(line: &Line, field: &str) -> IResult<T> {
    match line.values.as_slice() {
        [t] => number(line, field, t),
        _ => Err(err(line.number, field, "expected exactly one value")),
    }
}

fn size(line: &Line, field: &str) -> IResult<usize> {
    let n: usize = single(line, field)?;
    if n > MAX_DECLARED_SIZE {
        return Err(err(
            line.number,
            field,
            format!("{n} exceeds the limit {MAX_DECLARED_SIZE}"),
        ));
    }
    Ok(n)
}

fn pair(line: &Line, field: &str) -> IResult<(usize, usize)> {
    match line.values.as_slice() {
        [a, b] => Ok((number(line, field, a)?, number(line, field, b)?)),
        _ => Err(err(line.number, field, "expected two values")),
    }
}

/// Header check; returns the body lines.
fn body<'a>(text: &'a str, kind: &str) -> IResult<Vec<Line<'a>>> {
    let mut all = lines(text);
    if all.is_empty() {
        return Err(err(1, "type", "empty document"));
    }
    let head = all.remove(0);
    if head.key != "type" {
        return Err(err(
            head.number,
            "type",
            "document must start with a `type` line",
        ));
    }
    match head.values.as_slice() {
        [k] if *k == kind => Ok(all),
        [k] => Err(err(
            head.number,
            "type",
            format!("expected `{kind}`, found `{k}`"),
        )),
        _ => Err(err(head.number, "type", "expected exactly one value")),
    }
}

fn set_once<T>(slot: &mut Option<T>, value: T, line: &Line) -> IResult<()> {
    if slot.is_some() {
        return Err(err(line.number, line.key, "given more than once"));
    }
    *slot = Some(value);
    Ok(())
}

fn required<T>(slot: Option<T>, field: &str, last_line: usize) -> IResult<T> {
    slot.ok_or_else(|| err(last_line, field, "missing"))
}

fn unknown(line: &Line) -> InstanceError {
    err(line.number, line.key, "unknown keyword")
}

fn last_line(text: &str) -> usize {
    text.lines().count().max(1)
}

/// Attaches the line of the constructor call to an invariant error, so the
/// field path survives and the position is still reported.
fn at_end(e: InstanceError, line: usize) -> InstanceError {
    match e {
        InstanceError::Invariant { field, message } => InstanceError::Parse {
            line,
            field,
            message,
        },
        other => other,
    }
}

pub fn parse_graph(text: &str) -> IResult<Graph> {
    let mut n = None;
    let mut edges = Vec::new();
    for line in body(text, "graph")? {
        match line.key {
            "n" => set_once(&mut n, size(&line, "n")?, &line)?,
            "edge" => edges.push(pair(&line, "edge")?),
            _ => return Err(unknown(&line)),
        }
    }
    let end = last_line(text);
    Graph::new(required(n, "n", end)?, edges).map_err(|e| at_end(e, end))
}

pub fn parse_weighted_graph(text: &str) -> IResult<WeightedGraph> {
    let mut n = None;
    let mut weights = None;
    let mut edges = Vec::new();
    for line in body(text, "weighted-graph")? {
        match line.key {
            "n" => set_once(&mut n, size(&line, "n")?, &line)?,
            "weights" => set_once(&mut weights, numbers::<f64>(&line, "weights")?, &line)?,
            "edge" => edges.push(pair(&line, "edge")?),
            _ => return Err(unknown(&line)),
        }
    }
    let end = last_line(text);
    let g = Graph::new(required(n, "n", end)?, edges).map_err(|e| at_end(e, end))?;
    WeightedGraph::new(g, required(weights, "weights", end)?).map_err(|e| at_end(e, end))
}

pub fn parse_metric(text: &str) -> IResult<MetricInstance> {
    let mut n = None;
    let mut rows = Vec::new();
    let mut demands = None;
    for line in body(text, "metric")? {
        match line.key {
            "n" => set_once(&mut n, size(&line, "n")?, &line)?,
            "row" => {
                let row = numbers::<f64>(&line, "row")?;
                if let Some(n) = n {
                    if row.len() != n {
                        return Err(err(line.number, "row", format!("expected {n} entries")));
                    }
                    if rows.len() == n {
                        return Err(err(line.number, "row", "more rows than points"));
                    }
                }
                rows.push(row);
            }
            "demands" => set_once(&mut demands, numbers::<usize>(&line, "demands")?, &line)?,
            _ => return Err(unknown(&line)),
        }
    }
    let end = last_line(text);
    let n = required(n, "n", end)?;
    if rows.len() != n {
        return Err(err(
            end,
            "row",
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    MetricInstance::new(rows, demands.unwrap_or_default()).map_err(|e| at_end(e, end))
}

pub fn parse_set_system(text: &str) -> IResult<SetSystem> {
    let mut universe = None;
    let mut sets = Vec::new();
    let mut costs = None;
    let mut cover = None;
    for line in body(text, "set-system")? {
        match line.key {
            "universe" => set_once(&mut universe, size(&line, "universe")?, &line)?,
            "set" => sets.push(numbers::<usize>(&line, "set")?),
            "costs" => set_once(&mut costs, numbers::<f64>(&line, "costs")?, &line)?,
            "cover" => set_once(&mut cover, numbers::<usize>(&line, "cover")?, &line)?,
            _ => return Err(unknown(&line)),
        }
    }
    let end = last_line(text);
    SetSystem::new(
        required(universe, "universe", end)?,
        sets,
        costs,
        cover.unwrap_or_default(),
    )
    .map_err(|e| at_end(e, end))
}

pub fn parse_submodular(text: &str) -> IResult<SubmodularInstance> {
    let mut universe = None;
    let mut resources = Vec::new();
    let mut agents = Vec::new();
    for line in body(text, "submodular")? {
        match line.key {
            "universe" => set_once(&mut universe, size(&line, "universe")?, &line)?,
            "resource" => resources.push(numbers::<usize>(&line, "resource")?),
            "agent" => {
                let mut targets = Vec::new();
                for tok in &line.values {
                    let (e, w) = tok.split_once(':').ok_or_else(|| {
                        err(
                            line.number,
                            "agent",
                            format!("`{tok}` is not <element>:<weight>"),
                        )
                    })?;
                    targets.push((number(&line, "agent", e)?, number(&line, "agent", w)?));
                }
                agents.push(targets);
            }
            _ => return Err(unknown(&line)),
        }
    }
    let end = last_line(text);
    SubmodularInstance::new(required(universe, "universe", end)?, resources, agents)
        .map_err(|e| at_end(e, end))
}

pub fn parse_terminal_pairs(text: &str) -> IResult<TerminalPairs> {
    let mut points = None;
    let mut pairs = Vec::new();
    for line in body(text, "terminal-pairs")? {
        match line.key {
            "points" => set_once(&mut points, size(&line, "points")?, &line)?,
            "pair" => pairs.push(pair(&line, "pair")?),
            _ => return Err(unknown(&line)),
        }
    }
    let end = last_line(text);
    TerminalPairs::new(required(points, "points", end)?, pairs).map_err(|e| at_end(e, end))
}

/// Parses any instance, dispatching on the `type` line.
pub fn parse_instance(text: &str) -> IResult<Instance> {
    let first = lines(text)
        .into_iter()
        .next()
        .ok_or_else(|| err(1, "type", "empty document"))?;
    if first.key != "type" || first.values.len() != 1 {
        return Err(err(
            first.number,
            "type",
            "document must start with `type <kind>`",
        ));
    }
    match first.values[0] {
        "graph" => parse_graph(text).map(Instance::Graph),
        "weighted-graph" => parse_weighted_graph(text).map(Instance::WeightedGraph),
        "metric" => parse_metric(text).map(Instance::Metric),
        "set-system" => parse_set_system(text).map(Instance::SetSystem),
        "submodular" => parse_submodular(text).map(Instance::Submodular),
        "terminal-pairs" => parse_terminal_pairs(text).map(Instance::TerminalPairs),
        other => Err(err(
            first.number,
            "type",
            format!("unknown instance type `{other}`"),
        )),
    }
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let mut s = String::new();
    for x in items {
        let _ = write!(s, " {x}");
    }
    s
}

fn write_edges(out: &mut String, g: &Graph) {
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "edge {u} {v}");
    }
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("type graph\nn {}\n", g.n());
    write_edges(&mut out, g);
    out
}

pub fn write_weighted_graph(g: &WeightedGraph) -> String {
    let mut out = format!(
        "type weighted-graph\nn {}\nweights{}\n",
        g.graph().n(),
        join(g.weights())
    );
    write_edges(&mut out, g.graph());
    out
}

pub fn write_metric(m: &MetricInstance) -> String {
    let mut out = format!("type metric\nn {}\n", m.n());
    for i in 0..m.n() {
        let _ = writeln!(out, "row{}", join(m.row(i)));
    }
    let _ = writeln!(out, "demands{}", join(m.demands()));
    out
}

pub fn write_set_system(s: &SetSystem) -> String {
    let mut out = format!("type set-system\nuniverse {}\n", s.universe());
    for set in s.sets() {
        let _ = writeln!(out, "set{}", join(set));
    }
    if let Some(c) = s.costs() {
        let _ = writeln!(out, "costs{}", join(c));
    }
    let _ = writeln!(out, "cover{}", join(s.cover()));
    out
}

pub fn write_submodular(s: &SubmodularInstance) -> String {
    let mut out = format!("type submodular\nuniverse {}\n", s.universe());
    for r in s.resources() {
        let _ = writeln!(out, "resource{}", join(r));
    }
    for a in s.agents() {
        let _ = writeln!(
            out,
            "agent{}",
            join(a.targets().iter().map(|(e, w)| format!("{e}:{w}")))
        );
    }
    out
}

pub fn write_terminal_pairs(p: &TerminalPairs) -> String {
    let mut out = format!("type terminal-pairs\npoints {}\n", p.points());
    for &(u, v) in p.pairs() {
        let _ = writeln!(out, "pair {u} {v}");
    }
    out
}
