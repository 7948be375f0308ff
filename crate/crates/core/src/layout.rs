//! Rail layouts and the switching schedule that drives them.
//!
//! `N` qubits use `2^N` rails; rail `r` carries the basis state whose binary
//! expansion is `r`, qubit 0 being the most significant bit. A round starts
//! at column `c`:
//!
//! * horizontal stage: one widget per rail between columns `c` and `c + 1`,
//!   followed by a dashed transport step to `c + 2`;
//! * vertical stage `k` (`k = 0..N`): one rotation widget per rail pair
//!   differing in qubit `k`, attached at column `c + 2 + k`, followed by a
//!   transport step to `c + 3 + k` that is dotted for even `k` and dashed for
//!   odd `k`.
//!
//! A round therefore spans `2(N + 1)` switched phases and `N + 2` columns.
//! Vertices are numbered column by column: the rail vertices of a column in
//! rail order, then the interior vertices of widgets anchored at it.

use std::fmt;

use crate::error::{parse_err, Error, Result};
use crate::format;
use crate::graph::WeightedGraph;
use crate::scalar::Real;
use crate::widgets::{horizontal_time, transport_time, vertical_time, Widget, WidgetSet};

/// One of the three switched transport edge sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransportSet {
    /// Solid `g`: widget attachments.
    Solid,
    /// Dashed `r`.
    Dashed,
    /// Dotted `b`.
    Dotted,
}

impl TransportSet {
    pub const ALL: [TransportSet; 3] = [
        TransportSet::Solid,
        TransportSet::Dashed,
        TransportSet::Dotted,
    ];

    pub fn letter(self) -> &'static str {
        match self {
            TransportSet::Solid => "g",
            TransportSet::Dashed => "r",
            TransportSet::Dotted => "b",
        }
    }

    pub fn from_letter(s: &str) -> Option<Self> {
        match s {
            "g" => Some(TransportSet::Solid),
            "r" => Some(TransportSet::Dashed),
            "b" => Some(TransportSet::Dotted),
            _ => None,
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TransportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HorizontalChoice {
    Identity,
    Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerticalChoice {
    /// Basis-changing rotation widget.
    Rotate,
    /// Rotation widget with the middle edge removed: a uniform `-1`.
    Skip,
}

/// Widget choices for one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundSpec {
    /// One entry per rail (`2^N`).
    pub horizontal: Vec<HorizontalChoice>,
    /// One entry per qubit (`N`).
    pub vertical: Vec<VerticalChoice>,
}

impl RoundSpec {
    /// Identity widgets everywhere and no rotations.
    pub fn idle(n_qubits: usize) -> Self {
        Self {
            horizontal: vec![HorizontalChoice::Identity; 1 << n_qubits],
            vertical: vec![VerticalChoice::Skip; n_qubits],
        }
    }

    fn check(&self, n_qubits: usize) -> Result<()> {
        if self.horizontal.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                found: self.horizontal.len(),
            });
        }
        if self.vertical.len() != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: self.vertical.len(),
            });
        }
        Ok(())
    }
}

/// What a layout vertex is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexLabel {
    Rail {
        rail: usize,
        column: usize,
    },
    /// Interior vertex `index` of the horizontal widget on `rail` leaving `column`.
    HorizontalInterior {
        rail: usize,
        column: usize,
        index: usize,
    },
    /// Interior vertex `index` of the vertical widget joining `top` and `top | bit(qubit)`.
    VerticalInterior {
        qubit: usize,
        top: usize,
        column: usize,
        index: usize,
    },
}

/// Membership of a layout edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    /// Widget interior, always on.
    Static,
    Switched(TransportSet),
}

impl EdgeClass {
    pub fn name(self) -> &'static str {
        match self {
            EdgeClass::Static => "static",
            EdgeClass::Switched(s) => s.letter(),
        }
    }
}

/// The full computational graph of a depth-`D` circuit on `N` qubits.
#[derive(Debug, Clone)]
pub struct RailLayout<T> {
    n_qubits: usize,
    rounds: Vec<RoundSpec>,
    labels: Vec<VertexLabel>,
    /// `rail_vertex[column][rail]`.
    rail_vertex: Vec<Vec<usize>>,
    static_edges: WeightedGraph<T>,
    edge_sets: [WeightedGraph<T>; 3],
}

enum Placement {
    Horizontal {
        rail: usize,
        column: usize,
        choice: HorizontalChoice,
    },
    Vertical {
        qubit: usize,
        top: usize,
        column: usize,
        choice: VerticalChoice,
    },
}

impl<T: Real> RailLayout<T> {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_rails(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn rounds(&self) -> &[RoundSpec] {
        &self.rounds
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn columns(&self) -> usize {
        self.rail_vertex.len()
    }

    pub fn output_column(&self) -> usize {
        self.columns() - 1
    }

    pub fn rail_vertex(&self, column: usize, rail: usize) -> usize {
        self.rail_vertex[column][rail]
    }

    /// Rail vertices of `column`, indexed by rail.
    pub fn column_vertices(&self, column: usize) -> &[usize] {
        &self.rail_vertex[column]
    }

    pub fn input_vertices(&self) -> &[usize] {
        &self.rail_vertex[0]
    }

    pub fn output_vertices(&self) -> &[usize] {
        &self.rail_vertex[self.output_column()]
    }

    pub fn static_edges(&self) -> &WeightedGraph<T> {
        &self.static_edges
    }

    pub fn edge_set(&self, set: TransportSet) -> &WeightedGraph<T> {
        &self.edge_sets[set.slot()]
    }

    /// Number of switched phases needed to traverse the layout.
    pub fn depth(&self) -> usize {
        graph_depth(self.rounds.len(), self.n_qubits)
    }

    /// Column a walker on the rails occupies after phase `phase` (0-based)
    /// of the layout's schedule.
    pub fn expected_column(&self, phase: usize) -> usize {
        let per_round = 2 * (self.n_qubits + 1);
        let (round, within) = (phase / per_round, phase % per_round);
        round * (self.n_qubits + 2) + within / 2 + 1 + within % 2
    }

    /// Widget interiors plus the edges of `set`; the other two sets are off.
    pub fn active_hamiltonian(&self, set: TransportSet) -> WeightedGraph<T> {
        self.static_edges
            .union(&self.edge_sets[set.slot()])
            .expect("edge classes are disjoint by construction")
    }

    /// Layout in the graph exchange format, each edge annotated with its class.
    pub fn to_exchange(&self) -> String {
        let mut out = format!(
            "# layout qubits {} rounds {} columns {}\nvertices {}\n",
            self.n_qubits,
            self.rounds.len(),
            self.columns(),
            self.vertex_count()
        );
        let classes = std::iter::once((EdgeClass::Static, &self.static_edges)).chain(
            TransportSet::ALL
                .iter()
                .map(|&s| (EdgeClass::Switched(s), &self.edge_sets[s.slot()])),
        );
        for (class, graph) in classes {
            for e in graph.edges() {
                out.push_str(&format!(
                    "edge {} {} {} set {}\n",
                    e.a,
                    e.b,
                    format::exact(e.weight),
                    class.name()
                ));
            }
        }
        out
    }
}

/// Assembles the layout from the standard widget set.
pub fn build_layout<T: Real>(n_qubits: usize, rounds: &[RoundSpec]) -> Result<RailLayout<T>> {
    build_layout_with(n_qubits, rounds, &WidgetSet::standard())
}

/// Assembles the layout from a caller-supplied widget set.
pub fn build_layout_with<T: Real>(
    n_qubits: usize,
    rounds: &[RoundSpec],
    widgets: &WidgetSet<T>,
) -> Result<RailLayout<T>> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument(
            "a layout needs at least one qubit".into(),
        ));
    }
    if n_qubits > 16 {
        return Err(Error::InvalidArgument(format!(
            "{n_qubits} qubits is beyond desk scale"
        )));
    }
    for r in rounds {
        r.check(n_qubits)?;
    }
    let n_rails = 1usize << n_qubits;
    let columns = rounds.len() * (n_qubits + 2) + 1;

    // placements anchored at each column
    let mut anchored: Vec<Vec<Placement>> = (0..columns).map(|_| Vec::new()).collect();
    for (d, round) in rounds.iter().enumerate() {
        let base = d * (n_qubits + 2);
        for (rail, &choice) in round.horizontal.iter().enumerate() {
            anchored[base].push(Placement::Horizontal {
                rail,
                column: base,
                choice,
            });
        }
        for (qubit, &choice) in round.vertical.iter().enumerate() {
            let column = base + 2 + qubit;
            let mask = qubit_mask(n_qubits, qubit);
            for top in (0..n_rails).filter(|r| r & mask == 0) {
                anchored[column].push(Placement::Vertical {
                    qubit,
                    top,
                    column,
                    choice,
                });
            }
        }
    }

    let widget_for = |p: &Placement| -> &Widget<T> {
        match p {
            Placement::Horizontal {
                choice: HorizontalChoice::Identity,
                ..
            } => &widgets.identity,
            Placement::Horizontal {
                choice: HorizontalChoice::Phase,
                ..
            } => &widgets.phase,
            Placement::Vertical {
                choice: VerticalChoice::Rotate,
                ..
            } => &widgets.rotation,
            Placement::Vertical {
                choice: VerticalChoice::Skip,
                ..
            } => &widgets.rotation_off,
        }
    };

    // pass 1: number the vertices
    let mut labels = Vec::new();
    let mut rail_vertex = Vec::with_capacity(columns);
    let mut interior_start: Vec<Vec<usize>> = Vec::with_capacity(columns);
    for (column, placements) in anchored.iter().enumerate() {
        rail_vertex.push(
            (0..n_rails)
                .map(|rail| {
                    labels.push(VertexLabel::Rail { rail, column });
                    labels.len() - 1
                })
                .collect::<Vec<_>>(),
        );
        let mut starts = Vec::with_capacity(placements.len());
        for p in placements {
            starts.push(labels.len());
            for index in 0..widget_for(p).interior().len() {
                labels.push(match *p {
                    Placement::Horizontal { rail, column, .. } => VertexLabel::HorizontalInterior {
                        rail,
                        column,
                        index,
                    },
                    Placement::Vertical {
                        qubit, top, column, ..
                    } => VertexLabel::VerticalInterior {
                        qubit,
                        top,
                        column,
                        index,
                    },
                });
            }
        }
        interior_start.push(starts);
    }

    // pass 2: edges
    let n = labels.len();
    let mut static_edges = WeightedGraph::empty(n);
    let mut edge_sets = [
        WeightedGraph::empty(n),
        WeightedGraph::empty(n),
        WeightedGraph::empty(n),
    ];
    for (column, placements) in anchored.iter().enumerate() {
        for (p, &start) in placements.iter().zip(&interior_start[column]) {
            let w = widget_for(p);
            let port_targets = match *p {
                Placement::Horizontal { rail, column, .. } => {
                    [rail_vertex[column][rail], rail_vertex[column + 1][rail]]
                }
                Placement::Vertical {
                    qubit, top, column, ..
                } => {
                    let bottom = top | qubit_mask(n_qubits, qubit);
                    [rail_vertex[column][top], rail_vertex[column][bottom]]
                }
            };
            let interior = w.interior();
            let map = |v: usize| -> usize {
                if let Some(k) = w.ports().iter().position(|p| p.index() == v) {
                    port_targets[k]
                } else {
                    start
                        + interior
                            .iter()
                            .position(|&i| i == v)
                            .expect("interior vertex")
                }
            };
            for (k, e) in w.graph().edges().iter().enumerate() {
                let (a, b) = (map(e.a.index()), map(e.b.index()));
                let target = if w.is_attachment(k) {
                    &mut edge_sets[TransportSet::Solid.slot()]
                } else {
                    &mut static_edges
                };
                target.add_edge(a, b, e.weight)?;
            }
        }
    }
    for d in 0..rounds.len() {
        let base = d * (n_qubits + 2);
        let mut steps = vec![(base + 1, TransportSet::Dashed)];
        for k in 0..n_qubits {
            let set = if k % 2 == 0 {
                TransportSet::Dotted
            } else {
                TransportSet::Dashed
            };
            steps.push((base + 2 + k, set));
        }
        for (from, set) in steps {
            for (&a, &b) in rail_vertex[from].iter().zip(&rail_vertex[from + 1]) {
                edge_sets[set.slot()].add_edge(a, b, T::one())?;
            }
        }
    }

    Ok(RailLayout {
        n_qubits,
        rounds: rounds.to_vec(),
        labels,
        rail_vertex,
        static_edges,
        edge_sets,
    })
}

/// Bit of rail index `r` that encodes `qubit` (qubit 0 is most significant).
pub fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// One switched phase: a transport set held on for `duration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase<T> {
    pub set: TransportSet,
    pub duration: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule<T> {
    pub phases: Vec<Phase<T>>,
}

impl<T: Real> Schedule<T> {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn total_duration(&self) -> T {
        self.phases.iter().map(|p| p.duration).sum()
    }

    pub fn sets(&self) -> Vec<TransportSet> {
        self.phases.iter().map(|p| p.set).collect()
    }

    /// Phases from `offset` on.
    pub fn suffix(&self, offset: usize) -> Schedule<T> {
        Schedule {
            phases: self.phases.get(offset..).unwrap_or(&[]).to_vec(),
        }
    }

    /// `phase <set> <duration>` per line.
    pub fn to_text(&self) -> String {
        self.phases
            .iter()
            .map(|p| format!("phase {} {}\n", p.set, format::exact(p.duration)))
            .collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut phases = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = format::strip_comment(raw);
            if body.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens.len() != 3 || tokens[0] != "phase" {
                return Err(parse_err(line, "expected `phase <g|r|b> <duration>`"));
            }
            let set = TransportSet::from_letter(tokens[1])
                .ok_or_else(|| parse_err(line, format!("unknown transport set `{}`", tokens[1])))?;
            let duration = format::parse_real(tokens[2], line)?;
            phases.push(Phase { set, duration });
        }
        Ok(Self { phases })
    }
}

/// `D` rounds of `S_h, S_v^(b), S_v^(r), ...` with `N` alternating vertical
/// sequences; `S_h = (g, t_h), (r, t_m)` and `S_v^(j) = (g, t_v), (j, t_m)`.
pub fn build_schedule<T: Real>(n_qubits: usize, n_rounds: usize) -> Result<Schedule<T>> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument(
            "a schedule needs at least one qubit".into(),
        ));
    }
    let mut phases = Vec::with_capacity(graph_depth(n_rounds, n_qubits));
    for _ in 0..n_rounds {
        phases.push(Phase {
            set: TransportSet::Solid,
            duration: horizontal_time(),
        });
        phases.push(Phase {
            set: TransportSet::Dashed,
            duration: transport_time(),
        });
        for k in 0..n_qubits {
            let set = if k % 2 == 0 {
                TransportSet::Dotted
            } else {
                TransportSet::Dashed
            };
            phases.push(Phase {
                set: TransportSet::Solid,
                duration: vertical_time(),
            });
            phases.push(Phase {
                set,
                duration: transport_time(),
            });
        }
    }
    Ok(Schedule { phases })
}

/// Duration of one round: `t_h + t_m + N (t_v + t_m)`.
pub fn round_duration<T: Real>(n_qubits: usize) -> T {
    horizontal_time::<T>()
        + transport_time::<T>()
        + T::count(n_qubits) * (vertical_time::<T>() + transport_time::<T>())
}

/// Total number of switched phases, `2 D (N + 1)`.
pub fn graph_depth(n_rounds: usize, n_qubits: usize) -> usize {
    2 * n_rounds * (n_qubits + 1)
}

/// Phases a new walker waits behind the previous one.
///
/// With an odd number of vertical sequences the set pattern is
/// `g, r, g, b` repeated, so a walker may start every 4 phases regardless of
/// `N`. For even `N` this fails with [`Error::PipelineOffset`] carrying the
/// one-round fallback `2(N + 1)`.
pub fn pipeline_offset(n_qubits: usize) -> Result<usize> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument(
            "pipelining needs at least one qubit".into(),
        ));
    }
    if n_qubits % 2 == 1 {
        Ok(4)
    } else {
        Err(Error::PipelineOffset {
            reason: format!("N = {n_qubits} is even, so the round is not 4-phase periodic"),
            fallback: 2 * (n_qubits + 1),
        })
    }
}

/// [`pipeline_offset`] or, when unavailable, its one-round fallback.
pub fn pipeline_offset_or_fallback(n_qubits: usize) -> Result<usize> {
    match pipeline_offset(n_qubits) {
        Err(Error::PipelineOffset { fallback, .. }) => Ok(fallback),
        other => other,
    }
}
