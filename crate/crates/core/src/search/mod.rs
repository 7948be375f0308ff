//! Multi-start simplex search for edge weights that make a fixed topology
//! realize a target port matrix at a target time.

mod nelder_mead;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::format;
use crate::graph::{self, VertexId, WeightedGraph};
use crate::logical::unitarity_error;
use crate::scalar::{Real, C};
use crate::widgets::{port_response, Widget};

pub use nelder_mead::{minimize, Minimum, SimplexParams};

/// Default box for every free weight.
pub const DEFAULT_BOUNDS: (f64, f64) = (0.01, 8.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SearchProblem<T> {
    /// Topology; free edges carry a placeholder weight.
    template: WeightedGraph<T>,
    /// `(edge index in template, parameter index)`.
    free: Vec<(usize, usize)>,
    parameter_names: Vec<String>,
    bounds: Vec<(T, T)>,
    ports: Vec<VertexId>,
    target_time: T,
    target: Array2<C<T>>,
}

impl<T: Real> SearchProblem<T> {
    /// `free` lists `(a, b, parameter name)`; edges sharing a name share a
    /// weight. Missing free edges are added to `template`.
    pub fn new(
        mut template: WeightedGraph<T>,
        free: &[(usize, usize, String)],
        ports: Vec<VertexId>,
        target_time: T,
        target: Array2<C<T>>,
    ) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut free_idx = Vec::with_capacity(free.len());
        for (a, b, name) in free {
            if template.weight(*a, *b) == T::zero() {
                template.add_edge(*a, *b, T::one())?;
            }
            let key = if a < b { (*a, *b) } else { (*b, *a) };
            let edge = template
                .edges()
                .iter()
                .position(|e| e.key() == key)
                .expect("edge just ensured");
            if free_idx.iter().any(|&(e, _)| e == edge) {
                return Err(Error::InvalidArgument(format!(
                    "edge {a}-{b} marked free twice"
                )));
            }
            let param = match names.iter().position(|n| n == name) {
                Some(p) => p,
                None => {
                    names.push(name.clone());
                    names.len() - 1
                }
            };
            free_idx.push((edge, param));
        }
        if names.is_empty() {
            return Err(Error::InvalidArgument(
                "search problem has no free weights".into(),
            ));
        }
        for &p in &ports {
            template.check_vertex(p)?;
        }
        if ports.len() < 2 || (1..ports.len()).any(|i| ports[..i].contains(&ports[i])) {
            return Err(Error::InvalidArgument(
                "need at least two distinct ports".into(),
            ));
        }
        if target.dim() != (ports.len(), ports.len()) {
            return Err(Error::DimensionMismatch {
                expected: ports.len(),
                found: target.nrows(),
            });
        }
        let err = unitarity_error(&target);
        if !(err <= T::lit(1e-10)) {
            return Err(Error::InvalidArgument(format!(
                "target matrix is not unitary (error {err:e})"
            )));
        }
        if !(target_time > T::zero()) || !target_time.is_finite() {
            return Err(Error::InvalidArgument(
                "target time must be positive".into(),
            ));
        }
        let bounds = vec![(T::lit(DEFAULT_BOUNDS.0), T::lit(DEFAULT_BOUNDS.1)); names.len()];
        Ok(Self {
            template,
            free: free_idx,
            parameter_names: names,
            bounds,
            ports,
            target_time,
            target,
        })
    }

    pub fn with_bounds(mut self, lo: T, hi: T) -> Result<Self> {
        self.bounds = vec![check_bounds(lo, hi)?; self.parameter_count()];
        Ok(self)
    }

    pub fn with_parameter_bounds(mut self, parameter: usize, lo: T, hi: T) -> Result<Self> {
        let n = self.parameter_count();
        let slot = self.bounds.get_mut(parameter).ok_or(Error::InvalidVertex {
            vertex: parameter,
            vertex_count: n,
        })?;
        *slot = check_bounds(lo, hi)?;
        Ok(self)
    }

    pub fn parameter_count(&self) -> usize {
        self.parameter_names.len()
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.parameter_names
    }

    pub fn bounds(&self) -> &[(T, T)] {
        &self.bounds
    }

    pub fn ports(&self) -> &[VertexId] {
        &self.ports
    }

    pub fn target_time(&self) -> T {
        self.target_time
    }

    pub fn target(&self) -> &Array2<C<T>> {
        &self.target
    }

    /// The topology with the free weights set to `weights`.
    pub fn graph_for(&self, weights: &[T]) -> Result<WeightedGraph<T>> {
        if weights.len() != self.parameter_count() {
            return Err(Error::DimensionMismatch {
                expected: self.parameter_count(),
                found: weights.len(),
            });
        }
        let mut edges: Vec<(usize, usize, T)> = self
            .template
            .edges()
            .iter()
            .map(|e| (e.a.index(), e.b.index(), e.weight))
            .collect();
        for &(edge, param) in &self.free {
            edges[edge].2 = weights[param];
        }
        WeightedGraph::new(self.template.vertex_count(), edges)
    }

    pub fn widget_for(&self, name: &str, weights: &[T]) -> Result<Widget<T>> {
        Widget::new(
            name,
            self.graph_for(weights)?,
            self.ports.clone(),
            self.target_time,
            self.target.clone(),
        )
    }

    /// Problem file: the graph exchange format plus `free <i> <j> [name]`,
    /// `port <v>`, `target-time <t>`, `target <entries>` and an optional
    /// `bounds <lo> <hi>`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut g = None;
        let mut free = Vec::new();
        let mut ports = Vec::new();
        let mut time = None;
        let mut target = None;
        let mut bounds = None;
        let mut first_line = None;
        graph::parse_exchange_lines(text, &mut g, |line, tokens| {
            first_line.get_or_insert(line);
            match tokens[0] {
                "free" if tokens.len() == 3 || tokens.len() == 4 => {
                    let a = format::parse_index(tokens[1], line)?;
                    let b = format::parse_index(tokens[2], line)?;
                    let name = tokens
                        .get(3)
                        .map_or_else(|| format!("{a}-{b}"), |s| s.to_string());
                    free.push((a, b, name, line));
                }
                "port" if tokens.len() == 2 => {
                    ports.push(VertexId(format::parse_index(tokens[1], line)?))
                }
                "target-time" if tokens.len() == 2 => {
                    time = Some(format::parse_real::<T>(tokens[1], line)?)
                }
                "target" => target = Some(format::parse_square_matrix::<T>(&tokens[1..], line)?),
                "bounds" if tokens.len() == 3 => {
                    bounds = Some((
                        format::parse_real::<T>(tokens[1], line)?,
                        format::parse_real::<T>(tokens[2], line)?,
                        line,
                    ))
                }
                "edge-annotation" => {
                    return Err(parse_err(line, "unexpected trailing tokens on `edge` line"))
                }
                other => return Err(parse_err(line, format!("unexpected `{other}` line"))),
            }
            Ok(())
        })?;
        let mut template = g.ok_or_else(|| parse_err(1, "missing `vertices` header"))?;
        let last = text.lines().count().max(1);
        for (a, b, _, line) in &free {
            if template.weight(*a, *b) == T::zero() {
                template
                    .add_edge(*a, *b, T::one())
                    .map_err(|e| parse_err(*line, e.to_string()))?;
            }
        }
        let time = time.ok_or_else(|| parse_err(last, "missing `target-time` line"))?;
        let target = target.ok_or_else(|| parse_err(last, "missing `target` line"))?;
        let free: Vec<(usize, usize, String)> =
            free.into_iter().map(|(a, b, n, _)| (a, b, n)).collect();
        let problem = Self::new(template, &free, ports, time, target)
            .map_err(|e| parse_err(last, e.to_string()))?;
        match bounds {
            Some((lo, hi, line)) => problem
                .with_bounds(lo, hi)
                .map_err(|e| parse_err(line, e.to_string())),
            None => Ok(problem),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = self.template.to_exchange();
        for &(edge, param) in &self.free {
            let e = &self.template.edges()[edge];
            out.push_str(&format!(
                "free {} {} {}\n",
                e.a, e.b, self.parameter_names[param]
            ));
        }
        for p in &self.ports {
            out.push_str(&format!("port {p}\n"));
        }
        out.push_str(&format!(
            "target-time {}\n",
            format::exact(self.target_time)
        ));
        let cells: Vec<String> = self
            .target
            .iter()
            .map(|z| format::complex(*z, 17))
            .collect();
        out.push_str(&format!("target {}\n", cells.join(" ")));
        let (lo, hi) = self.bounds[0];
        if self.bounds.iter().all(|&b| b == (lo, hi)) {
            out.push_str(&format!(
                "bounds {} {}\n",
                format::exact(lo),
                format::exact(hi)
            ));
        }
        out
    }
}

fn check_bounds<T: Real>(lo: T, hi: T) -> Result<(T, T)> {
    if lo > T::zero() && hi > lo && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err(Error::InvalidArgument(format!(
            "bounds must satisfy 0 < lo < hi < inf, got ({lo}, {hi})"
        )))
    }
}

/// Port matrix and leakage of the problem graph at `weights`.
pub fn evaluate<T: Real>(weights: &[T], problem: &SearchProblem<T>) -> Result<(Array2<C<T>>, T)> {
    let g = problem.graph_for(weights)?;
    let r = port_response(&g, problem.ports(), problem.target_time())?;
    Ok((r.matrix, r.leakage))
}

/// `||P - target||_F^2 + leakage`, where `P` is the simulated port matrix
/// and `leakage` the largest off-port probability. Infinite if the weights
/// do not form a valid graph.
pub fn objective<T: Real>(weights: &[T], problem: &SearchProblem<T>) -> T {
    match evaluate(weights, problem) {
        Ok((p, leakage)) => {
            let dist: T = p
                .iter()
                .zip(problem.target())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            dist + leakage
        }
        Err(_) => T::infinity(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig<T> {
    pub restarts: usize,
    pub max_iters: usize,
    /// Success threshold on the objective.
    pub tol: T,
    /// Simplex diameter at which a restart stops.
    pub diameter_tol: T,
    pub seed: u64,
    pub simplex: SimplexParams<T>,
}

impl<T: Real> Default for SearchConfig<T> {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 10_000,
            tol: T::lit(1e-8),
            diameter_tol: T::lit(1e-12),
            seed: 0,
            simplex: SimplexParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<T> {
    /// One entry per free parameter.
    pub weights: Vec<T>,
    pub objective: T,
    pub achieved_port_matrix: Array2<C<T>>,
    pub leakage: T,
    pub restarts_used: usize,
    /// Restart that produced `weights`.
    pub best_restart: usize,
    pub seed: u64,
    /// `objective < tol`.
    pub converged: bool,
}

/// Runs `config.restarts` simplex descents from uniform random starts and
/// keeps the lowest objective (earliest restart on ties). A result with
/// `converged == false` is the best failure.
pub fn search<T: Real>(
    problem: &SearchProblem<T>,
    config: &SearchConfig<T>,
) -> Result<SearchResult<T>> {
    if config.restarts == 0 {
        return Err(Error::InvalidArgument(
            "at least one restart is required".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(usize, Minimum<T>)> = None;
    for restart in 0..config.restarts {
        let x0: Vec<T> = problem
            .bounds()
            .iter()
            .map(|&(lo, hi)| T::lit(rng.gen_range(lo.to_f64_lossy()..=hi.to_f64_lossy())))
            .collect();
        let m = minimize(
            |w| objective(w, problem),
            &x0,
            problem.bounds(),
            &config.simplex,
            config.max_iters,
            config.diameter_tol,
            T::zero(),
        );
        if best.as_ref().is_none_or(|(_, b)| m.value < b.value) {
            best = Some((restart, m));
        }
    }
    let (best_restart, m) = best.expect("at least one restart");
    let (achieved_port_matrix, leakage) = evaluate(&m.x, problem)?;
    Ok(SearchResult {
        objective: m.value,
        converged: m.value < config.tol,
        weights: m.x,
        achieved_port_matrix,
        leakage,
        restarts_used: config.restarts,
        best_restart,
        seed: config.seed,
    })
}
