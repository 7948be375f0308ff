//! Discontinuous quantum walk simulation.
//!
//! A single walker hops along rails of vertices, one rail per computational
//! basis state. Three transport edge sets are switched on one at a time while
//! small widget graphs stay in place; each switched phase is an exact
//! continuous-time evolution under the active adjacency matrix.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the bottom of this file fix the scalar to `f64`.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod format;
pub mod graph;
pub mod layout;
pub mod logical;
pub mod scalar;
pub mod search;
pub mod spectrum;
pub mod state;
pub mod widgets;
pub mod xy;

pub use engine::{
    leakage_profile, measure_and_eject, run_pipelined, run_walk, Measurement, MeasurementStatus,
    RunResult, SimulationTrace, Snapshot, Tolerances, WalkEngine,
};
pub use error::{Error, Result};
pub use graph::{christandl_chain, Edge, VertexId, WeightedGraph};
pub use layout::{
    build_layout, build_layout_with, build_schedule, graph_depth, pipeline_offset,
    pipeline_offset_or_fallback, EdgeClass, HorizontalChoice, Phase, RailLayout, RoundSpec,
    Schedule, TransportSet, VertexLabel, VerticalChoice,
};
pub use logical::{
    compile, extract_logical_unitary, fidelity_up_to_global_phase, ideal_unitary, synthesize_su2,
    Diagonal, Layer, LogicalCircuit, NativeGate,
};
pub use scalar::{Real, C};
pub use search::{objective, search, SearchConfig, SearchProblem, SearchResult};
pub use spectrum::{symmetric_eigen, Spectrum, SymmetricEigen};
pub use state::{evolve, evolve_with, transfer_amplitude, StateVector};
pub use widgets::{
    identity_widget, phase_widget, phase_widget_with, port_response, rotation_widget,
    stepped_pst_line, transport_edge, widget_port_matrix, PortResponse, SteppedLine, Widget,
    WidgetSet,
};
pub use xy::xy_single_excitation_block;

pub type Graph = WeightedGraph<f64>;
pub type State = StateVector<f64>;
pub type Widget64 = Widget<f64>;
pub type Layout = RailLayout<f64>;
pub type Schedule64 = Schedule<f64>;
