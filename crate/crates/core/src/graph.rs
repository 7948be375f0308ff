//! Weighted undirected graphs and their adjacency-matrix Hamiltonians.
//!
//! A graph doubles as the Hamiltonian of a continuous-time quantum walk: the
//! walker's amplitudes evolve under `exp(-i G t)` where `G` is the real
//! symmetric adjacency matrix. Absent edges carry weight zero; present edges
//! always carry a strictly positive weight.

use std::fmt;

use ndarray::Array2;

use crate::error::{parse_err, Error, Result};
use crate::format;
use crate::scalar::Real;

/// Index of a vertex within a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub a: VertexId,
    pub b: VertexId,
    pub weight: T,
}

impl<T> Edge<T> {
    /// The endpoints ordered so that the smaller index comes first.
    pub fn key(&self) -> (usize, usize) {
        let (a, b) = (self.a.0, self.b.0);
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Vertex set `0..vertex_count` plus a set of positively weighted edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<T> {
    vertex_count: usize,
    edges: Vec<Edge<T>>,
}

impl<T: Real> WeightedGraph<T> {
    pub fn empty(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            edges: Vec::new(),
        }
    }

    /// Builds a graph, rejecting self-loops, duplicate pairs, out-of-range
    /// endpoints and non-positive (or non-finite) weights.
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut graph = Self::empty(vertex_count);
        for (a, b, w) in edges {
            graph.add_edge(a, b, w)?;
        }
        Ok(graph)
    }

    pub fn add_edge(&mut self, a: usize, b: usize, weight: T) -> Result<()> {
        for v in [a, b] {
            if v >= self.vertex_count {
                return Err(Error::InvalidVertex {
                    vertex: v,
                    vertex_count: self.vertex_count,
                });
            }
        }
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
        }
        if !(weight > T::zero()) || !weight.is_finite() {
            return Err(Error::InvalidGraph(format!(
                "edge ({a}, {b}) has non-positive weight {weight}"
            )));
        }
        let edge = Edge {
            a: VertexId(a),
            b: VertexId(b),
            weight,
        };
        if self.edges.iter().any(|e| e.key() == edge.key()) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
        }
        self.edges.push(edge);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn weight(&self, a: usize, b: usize) -> T {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges
            .iter()
            .find(|e| e.key() == key)
            .map_or(T::zero(), |e| e.weight)
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.0 < self.vertex_count {
            Ok(())
        } else {
            Err(Error::InvalidVertex {
                vertex: v.0,
                vertex_count: self.vertex_count,
            })
        }
    }

    /// Real symmetric adjacency matrix; `M[i][j] = w_ij`, zero off the edge set.
    pub fn adjacency_matrix(&self) -> Array2<T> {
        let n = self.vertex_count;
        let mut m = Array2::zeros((n, n));
        for e in &self.edges {
            m[[e.a.0, e.b.0]] = e.weight;
            m[[e.b.0, e.a.0]] = e.weight;
        }
        m
    }

    /// Union of two graphs on the same vertex set. Shared pairs are rejected.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.vertex_count != other.vertex_count {
            return Err(Error::DimensionMismatch {
                expected: self.vertex_count,
                found: other.vertex_count,
            });
        }
        let mut out = self.clone();
        for e in &other.edges {
            out.add_edge(e.a.0, e.b.0, e.weight)?;
        }
        Ok(out)
    }

    /// Connected components, each sorted ascending, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count;
        let mut adjacency = vec![Vec::new(); n];
        for e in &self.edges {
            adjacency[e.a.0].push(e.b.0);
            adjacency[e.b.0].push(e.a.0);
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in &adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Serializes in the line-oriented exchange format:
    /// `vertices <n>` followed by one `edge <i> <j> <w>` per edge.
    pub fn to_exchange(&self) -> String {
        let mut out = format!("vertices {}\n", self.vertex_count);
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} {} {}\n",
                e.a,
                e.b,
                format::exact(e.weight)
            ));
        }
        out
    }

    /// Parses the exchange format. Unknown directives are rejected; see
    /// [`parse_exchange_lines`] for callers that layer extra directives on top.
    pub fn from_exchange(text: &str) -> Result<Self> {
        let mut graph = None;
        parse_exchange_lines(text, &mut graph, |line, tokens| {
            Err(parse_err(
                line,
                format!("unknown directive `{}`", tokens[0]),
            ))
        })?;
        graph.ok_or_else(|| parse_err(1, "missing `vertices` header"))
    }
}

/// Drives the exchange-format parser. `vertices` and `edge` lines populate
/// `graph`; every other non-empty line is handed to `extra`. Trailing tokens
/// after an edge's weight (e.g. a `set g` annotation) are passed to `extra`
/// as well, prefixed with `edge-annotation`.
pub(crate) fn parse_exchange_lines<T, F>(
    text: &str,
    graph: &mut Option<WeightedGraph<T>>,
    mut extra: F,
) -> Result<()>
where
    T: Real,
    F: FnMut(usize, &[&str]) -> Result<()>,
{
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = format::strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens[0] {
            "vertices" => {
                if graph.is_some() {
                    return Err(parse_err(line, "duplicate `vertices` header"));
                }
                if tokens.len() != 2 {
                    return Err(parse_err(line, "expected `vertices <n>`"));
                }
                *graph = Some(WeightedGraph::empty(format::parse_index(tokens[1], line)?));
            }
            "edge" => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| parse_err(line, "`edge` before `vertices` header"))?;
                if tokens.len() < 4 {
                    return Err(parse_err(line, "expected `edge <i> <j> <w>`"));
                }
                let a = format::parse_index(tokens[1], line)?;
                let b = format::parse_index(tokens[2], line)?;
                let w = format::parse_real(tokens[3], line)?;
                g.add_edge(a, b, w)
                    .map_err(|e| parse_err(line, e.to_string()))?;
                if tokens.len() > 4 {
                    let mut annotated = vec!["edge-annotation", tokens[1], tokens[2]];
                    annotated.extend_from_slice(&tokens[4..]);
                    extra(line, &annotated)?;
                }
            }
            _ => extra(line, &tokens)?,
        }
    }
    Ok(())
}

/// Path on `m + 1` vertices with weights `scale * sqrt(j (m + 1 - j))`,
/// `j = 1..=m`. With unit scale the end-to-end transfer is perfect at
/// `t = pi/2` and carries the phase `(-i)^m`; scaling by `1/sqrt(m)` moves the
/// transfer time to `sqrt(m) pi / 2` and makes the end weights unity.
pub fn christandl_chain<T: Real>(m: usize, scale: T) -> Result<WeightedGraph<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "chain needs at least one segment".into(),
        ));
    }
    if !(scale > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "chain scale must be positive, got {scale}"
        )));
    }
    let edges = (1..=m).map(|j| {
        let w = T::count(j * (m + 1 - j)).sqrt() * scale;
        (j - 1, j, w)
    });
    WeightedGraph::new(m + 1, edges)
}
