//! Widget catalog: small weighted graphs spliced into the rails.
//!
//! Every widget is stored together with its port vertices. For horizontal
//! widgets the ports are the left and right rail vertices; for vertical ones
//! they are the rail vertices on the `|0>` (top) and `|1>` (bottom) rails of
//! a pair. Edges touching exactly one port are attachment edges: in a layout
//! they belong to the solid transport set and are switched, while all other
//! widget edges stay on permanently.

use ndarray::Array2;

use crate::error::{parse_err, Error, Result};
use crate::format;
use crate::graph::{self, VertexId, WeightedGraph};
use crate::scalar::{cplx, Real, C};
use crate::spectrum::Spectrum;
use crate::state::{evolve_with, StateVector};

/// Traversal time shared by all horizontal widgets.
pub fn horizontal_time<T: Real>() -> T {
    T::PI()
}

/// Traversal time shared by all vertical widgets; equal to the horizontal one.
pub fn vertical_time<T: Real>() -> T {
    T::PI()
}

/// Duration of a bare transport step.
pub fn transport_time<T: Real>() -> T {
    T::FRAC_PI_2()
}

/// `sqrt(3/2)`: inner weights of the identity widget.
pub fn mu_identity<T: Real>() -> T {
    (T::lit(3.0) / T::lit(2.0)).sqrt()
}

/// Phase-widget weights `(mu_1, mu_2, mu_3) = (5 sqrt 3 / 8, 15/8, 21/8)`.
pub fn mu_phase<T: Real>() -> (T, T, T) {
    (
        T::lit(5.0) * T::lit(3.0).sqrt() / T::lit(8.0),
        T::lit(15.0) / T::lit(8.0),
        T::lit(21.0) / T::lit(8.0),
    )
}

/// `2 sqrt 3`: inner weight of the basis-changing rotation widget.
pub fn mu_rotation<T: Real>() -> T {
    T::lit(2.0) * T::lit(3.0).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Widget<T> {
    pub name: String,
    graph: WeightedGraph<T>,
    ports: Vec<VertexId>,
    attachment: Vec<bool>,
    traversal_time: T,
    ideal: Array2<C<T>>,
}

/// Port-restricted response of a widget after its traversal time.
#[derive(Debug, Clone)]
pub struct PortResponse<T> {
    /// `matrix[[a, b]] = <port_a| exp(-i H t) |port_b>`.
    pub matrix: Array2<C<T>>,
    /// Largest probability left off the ports over all port inputs.
    pub leakage: T,
}

impl<T: Real> Widget<T> {
    pub fn new(
        name: impl Into<String>,
        graph: WeightedGraph<T>,
        ports: Vec<VertexId>,
        traversal_time: T,
        ideal: Array2<C<T>>,
    ) -> Result<Self> {
        if ports.len() < 2 {
            return Err(Error::InvalidArgument(
                "a widget needs at least two ports".into(),
            ));
        }
        for &p in &ports {
            graph.check_vertex(p)?;
        }
        if ideal.dim() != (ports.len(), ports.len()) {
            return Err(Error::DimensionMismatch {
                expected: ports.len(),
                found: ideal.nrows(),
            });
        }
        if !(traversal_time > T::zero()) {
            return Err(Error::InvalidArgument(
                "traversal time must be positive".into(),
            ));
        }
        let is_port = |v: VertexId| ports.contains(&v);
        let attachment = graph
            .edges()
            .iter()
            .map(|e| is_port(e.a) != is_port(e.b))
            .collect();
        Ok(Self {
            name: name.into(),
            graph,
            ports,
            attachment,
            traversal_time,
            ideal,
        })
    }

    pub fn graph(&self) -> &WeightedGraph<T> {
        &self.graph
    }

    pub fn ports(&self) -> &[VertexId] {
        &self.ports
    }

    /// Whether edge `k` of [`Self::graph`] attaches the widget to a port.
    pub fn is_attachment(&self, k: usize) -> bool {
        self.attachment[k]
    }

    pub fn traversal_time(&self) -> T {
        self.traversal_time
    }

    pub fn ideal_port_matrix(&self) -> &Array2<C<T>> {
        &self.ideal
    }

    /// Vertices that are not ports, in ascending order.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.graph.vertex_count())
            .filter(|v| !self.ports.contains(&VertexId(*v)))
            .collect()
    }

    pub fn to_exchange(&self) -> String {
        let mut out = format!(
            "# widget {}\nvertices {}\n",
            self.name,
            self.graph.vertex_count()
        );
        for (k, e) in self.graph.edges().iter().enumerate() {
            let set = if self.attachment[k] { "g" } else { "static" };
            out.push_str(&format!(
                "edge {} {} {} set {set}\n",
                e.a,
                e.b,
                format::exact(e.weight)
            ));
        }
        for p in &self.ports {
            out.push_str(&format!("port {p}\n"));
        }
        out.push_str(&format!("time {}\n", format::exact(self.traversal_time)));
        let ideal: Vec<String> = self.ideal.iter().map(|z| format::complex(*z, 17)).collect();
        out.push_str(&format!("ideal {}\n", ideal.join(" ")));
        out
    }

    /// Parses [`Self::to_exchange`] output. Without an `ideal` line the
    /// simulated port matrix is taken as the ideal.
    pub fn from_exchange(name: &str, text: &str) -> Result<Self> {
        let mut g = None;
        let mut ports = Vec::new();
        let mut time = None;
        let mut ideal = None;
        graph::parse_exchange_lines(text, &mut g, |line, tokens| {
            match tokens[0] {
                "edge-annotation" => {}
                "port" if tokens.len() == 2 => {
                    ports.push(VertexId(format::parse_index(tokens[1], line)?))
                }
                "time" if tokens.len() == 2 => {
                    time = Some(format::parse_real::<T>(tokens[1], line)?)
                }
                "ideal" => ideal = Some(format::parse_square_matrix::<T>(&tokens[1..], line)?),
                other => return Err(parse_err(line, format!("unexpected `{other}` line"))),
            }
            Ok(())
        })?;
        let graph = g.ok_or_else(|| parse_err(1, "missing `vertices` header"))?;
        let time = time.ok_or_else(|| parse_err(1, "missing `time` line"))?;
        let ideal = match ideal {
            Some(m) => m,
            None => port_response(&graph, &ports, time)?.matrix,
        };
        Self::new(name, graph, ports, time, ideal)
    }
}

/// Evolves each port basis state for time `t` and projects onto the ports.
pub fn port_response<T: Real>(
    graph: &WeightedGraph<T>,
    ports: &[VertexId],
    t: T,
) -> Result<PortResponse<T>> {
    for &p in ports {
        graph.check_vertex(p)?;
    }
    let spectrum = Spectrum::of(graph)?;
    let k = ports.len();
    let mut matrix = Array2::from_elem((k, k), cplx(T::zero(), T::zero()));
    let mut leakage = T::zero();
    for (col, &p) in ports.iter().enumerate() {
        let psi = StateVector::basis(graph.vertex_count(), p.index())?;
        let out = evolve_with(&spectrum, &psi, t)?;
        for (row, &q) in ports.iter().enumerate() {
            matrix[[row, col]] = out[q.index()];
        }
        let off: T = (0..graph.vertex_count())
            .filter(|v| !ports.contains(&VertexId(*v)))
            .map(|v| out.probability(v))
            .sum();
        leakage = leakage.max(off);
    }
    Ok(PortResponse { matrix, leakage })
}

/// Simulated port matrix of a widget at its traversal time.
pub fn widget_port_matrix<T: Real>(w: &Widget<T>) -> Result<PortResponse<T>> {
    port_response(&w.graph, &w.ports, w.traversal_time)
}

fn swap_with<T: Real>(z: C<T>) -> Array2<C<T>> {
    let zero = cplx(T::zero(), T::zero());
    ndarray::array![[zero, z], [z, zero]]
}

/// Path `v_l - 1 - 2 - 3 - v_r` with weights `(1, mu_I, mu_I, 1)`: the
/// four-segment chain rescaled to unit end weights. Transfers with phase +1.
pub fn identity_widget<T: Real>() -> Widget<T> {
    let mu = mu_identity::<T>();
    let g = WeightedGraph::new(
        5,
        [(0, 1, T::one()), (1, 2, mu), (2, 3, mu), (3, 4, T::one())],
    )
    .expect("static widget graph");
    Widget::new(
        "identity",
        g,
        vec![VertexId(0), VertexId(4)],
        horizontal_time(),
        swap_with(cplx(T::one(), T::zero())),
    )
    .expect("static widget")
}

/// Weighted square `1-2-3-4` between unit attachments `v_l - 1` and
/// `4 - v_r`, with `w_12 = w_34 = mu_1`, `w_14 = mu_2`, `w_23 = mu_3`.
/// Vertex order: `v_l = 0`, square `1..=4`, `v_r = 5`.
pub fn phase_widget_with<T: Real>(mu1: T, mu2: T, mu3: T) -> Result<Widget<T>> {
    let g = WeightedGraph::new(
        6,
        [
            (0, 1, T::one()),
            (1, 2, mu1),
            (3, 4, mu1),
            (1, 4, mu2),
            (2, 3, mu3),
            (4, 5, T::one()),
        ],
    )?;
    Widget::new(
        "phase",
        g,
        vec![VertexId(0), VertexId(5)],
        horizontal_time(),
        swap_with(cplx(T::zero(), T::one())),
    )
}

/// The phase widget at its published weights: transfers `v_l -> i v_r` in time pi.
pub fn phase_widget<T: Real>() -> Widget<T> {
    let (m1, m2, m3) = mu_phase::<T>();
    phase_widget_with(m1, m2, m3).expect("static widget")
}

/// Path `v_t - 1 - 2 - v_b` with weights `(1, mu_R, 1)`; `mu_R = 0` drops
/// the middle edge. Vertex order: `v_t = 0`, `1`, `2`, `v_b = 3`.
///
/// The widget leaves nothing inside at `t = pi` exactly when
/// `sqrt(mu_R^2 + 4)` is an even integer `2m`, and then acts on the ports as
/// `(-1)^m [[cos(mu_R pi/2), -i sin(mu_R pi/2)], [.., ..]]`. That expression
/// (with `m` rounded) is recorded as the ideal port matrix.
pub fn rotation_widget<T: Real>(mu_r: T) -> Result<Widget<T>> {
    if !(mu_r >= T::zero()) || !mu_r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "mu_R must be non-negative, got {mu_r}"
        )));
    }
    let mut g = WeightedGraph::empty(4);
    g.add_edge(0, 1, T::one())?;
    if mu_r > T::zero() {
        g.add_edge(1, 2, mu_r)?;
    }
    g.add_edge(2, 3, T::one())?;

    let m = ((mu_r * mu_r + T::lit(4.0)).sqrt() / T::lit(2.0)).round();
    let sign = if m.to_f64_lossy() as i64 % 2 == 0 {
        T::one()
    } else {
        -T::one()
    };
    let half = mu_r * T::PI() / T::lit(2.0);
    let diag = cplx(sign * half.cos(), T::zero());
    let off = cplx(T::zero(), -sign * half.sin());
    let ideal = ndarray::array![[diag, off], [off, diag]];
    let name = if mu_r > T::zero() {
        "rotation"
    } else {
        "rotation-off"
    };
    Widget::new(
        name,
        g,
        vec![VertexId(0), VertexId(3)],
        vertical_time(),
        ideal,
    )
}

/// A single unit edge, both endpoints ports: transfers with phase `-i` in pi/2.
pub fn transport_edge<T: Real>() -> Widget<T> {
    let g = WeightedGraph::new(2, [(0, 1, T::one())]).expect("static widget graph");
    Widget::new(
        "transport",
        g,
        vec![VertexId(0), VertexId(1)],
        transport_time(),
        swap_with(cplx(T::zero(), -T::one())),
    )
    .expect("static widget")
}

/// The widgets a rail layout is assembled from.
#[derive(Debug, Clone)]
pub struct WidgetSet<T> {
    pub identity: Widget<T>,
    pub phase: Widget<T>,
    pub rotation: Widget<T>,
    pub rotation_off: Widget<T>,
}

impl<T: Real> WidgetSet<T> {
    pub fn standard() -> Self {
        Self {
            identity: identity_widget(),
            phase: phase_widget(),
            rotation: rotation_widget(mu_rotation()).expect("static widget"),
            rotation_off: rotation_widget(T::zero()).expect("static widget"),
        }
    }

    pub fn all(&self) -> [&Widget<T>; 4] {
        [
            &self.identity,
            &self.phase,
            &self.rotation,
            &self.rotation_off,
        ]
    }
}

impl<T: Real> Default for WidgetSet<T> {
    fn default() -> Self {
        Self::standard()
    }
}

/// Every cataloged widget, transport edge included.
pub fn catalog<T: Real>() -> Vec<Widget<T>> {
    let set = WidgetSet::<T>::standard();
    vec![
        set.identity,
        set.phase,
        set.rotation,
        set.rotation_off,
        transport_edge(),
    ]
}

/// A unit-weight path split into two alternately switched edge sets.
#[derive(Debug, Clone)]
pub struct SteppedLine<T> {
    /// Edges `(0,1), (2,3), ...`.
    pub solid: WeightedGraph<T>,
    /// Edges `(1,2), (3,4), ...`.
    pub dashed: WeightedGraph<T>,
    pub step_time: T,
}

/// Path on `m + 1` vertices whose edges alternate between the solid and the
/// dashed set. Enabling the two sets alternately for pi/2 each, starting
/// with solid, moves a walker from vertex 0 to vertex `m` with phase `(-i)^m`.
pub fn stepped_pst_line<T: Real>(m: usize) -> Result<SteppedLine<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "stepped line needs at least one segment".into(),
        ));
    }
    let mut solid = WeightedGraph::empty(m + 1);
    let mut dashed = WeightedGraph::empty(m + 1);
    for j in 0..m {
        let target = if j % 2 == 0 { &mut solid } else { &mut dashed };
        target.add_edge(j, j + 1, T::one())?;
    }
    Ok(SteppedLine {
        solid,
        dashed,
        step_time: transport_time(),
    })
}

impl<T: Real> SteppedLine<T> {
    pub fn segments(&self) -> usize {
        self.solid.vertex_count() - 1
    }

    /// Runs `segments()` alternating phases from `|v_0>`.
    pub fn run(&self) -> Result<StateVector<T>> {
        let solid = Spectrum::of(&self.solid)?;
        let dashed = Spectrum::of(&self.dashed)?;
        let mut psi = StateVector::basis(self.solid.vertex_count(), 0)?;
        for step in 0..self.segments() {
            let s = if step % 2 == 0 { &solid } else { &dashed };
            psi = evolve_with(s, &psi, self.step_time)?;
        }
        Ok(psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_diff(a: &Array2<C<f64>>, b: &Array2<C<f64>>) -> f64 {
        a.iter()
            .zip(b.iter())
            .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    fn is_unitary(m: &Array2<C<f64>>, tol: f64) -> bool {
        let adj = m.t().mapv(|z| z.conj());
        let prod = adj.dot(m);
        max_diff(&prod, &Array2::eye(m.nrows())) < tol
    }

    #[test]
    fn identity_widget_transfers_with_unit_phase() {
        let w = identity_widget::<f64>();
        let r = widget_port_matrix(&w).unwrap();
        assert!((r.matrix[[1, 0]] - C::new(1.0, 0.0)).norm() < 1e-10);
        assert!((r.matrix[[0, 1]] - C::new(1.0, 0.0)).norm() < 1e-10);
        assert!(r.leakage < 1e-10);
        assert!(max_diff(&r.matrix, w.ideal_port_matrix()) < 1e-10);
    }

    #[test]
    fn phase_widget_transfers_with_i() {
        let w = phase_widget::<f64>();
        let r = widget_port_matrix(&w).unwrap();
        assert!((r.matrix[[1, 0]] - C::new(0.0, 1.0)).norm() < 1e-10);
        // mirror direction
        assert!((r.matrix[[0, 1]] - C::new(0.0, 1.0)).norm() < 1e-10);
        assert!(r.leakage < 1e-10);
    }

    #[test]
    fn rotation_widget_port_matrices() {
        let w = rotation_widget::<f64>(mu_rotation()).unwrap();
        let r = widget_port_matrix(&w).unwrap();
        let a = 3f64.sqrt() * PI;
        let expected = ndarray::array![
            [C::new(a.cos(), 0.0), C::new(0.0, -a.sin())],
            [C::new(0.0, -a.sin()), C::new(a.cos(), 0.0)]
        ];
        assert!(max_diff(&r.matrix, &expected) < 1e-10);
        assert!(max_diff(w.ideal_port_matrix(), &expected) < 1e-12);
        assert!(r.leakage < 1e-10);
        assert!(is_unitary(&r.matrix, 1e-12));

        let off = rotation_widget::<f64>(0.0).unwrap();
        let r = widget_port_matrix(&off).unwrap();
        let minus_one = Array2::eye(2).mapv(|x: C<f64>| -x);
        assert!(max_diff(&r.matrix, &minus_one) < 1e-12);
        assert!(max_diff(off.ideal_port_matrix(), &minus_one) < 1e-15);
        assert!(rotation_widget::<f64>(-1.0).is_err());
    }

    #[test]
    fn transport_edge_closed_forms() {
        let w = transport_edge::<f64>();
        let s = Spectrum::of(w.graph()).unwrap();
        let psi = StateVector::basis(2, 0).unwrap();
        let half = evolve_with(&s, &psi, PI / 2.0).unwrap();
        assert!((half[1] - C::new(0.0, -1.0)).norm() < 1e-12);
        let full = evolve_with(&s, &psi, PI).unwrap();
        assert!((full[0] - C::new(-1.0, 0.0)).norm() < 1e-12);
        let quarter = evolve_with(&s, &psi, PI / 4.0).unwrap();
        let c = (PI / 4.0).cos();
        assert!((quarter[0] - C::new(c, 0.0)).norm() < 1e-12);
        assert!((quarter[1] - C::new(0.0, -c)).norm() < 1e-12);
    }

    #[test]
    fn catalog_invariants() {
        for w in catalog::<f64>() {
            let r = widget_port_matrix(&w).unwrap();
            assert!(
                max_diff(&r.matrix, w.ideal_port_matrix()) < 1e-10,
                "{}",
                w.name
            );
            assert!(r.leakage < 1e-10, "{}", w.name);
            assert!(is_unitary(w.ideal_port_matrix(), 1e-12), "{}", w.name);
            // undirected graphs give symmetric port matrices
            assert!(
                max_diff(&r.matrix, &r.matrix.t().to_owned()) < 1e-12,
                "{}",
                w.name
            );
        }
        assert_eq!(horizontal_time::<f64>(), vertical_time::<f64>());
        assert_eq!(transport_time::<f64>(), PI / 2.0);
    }

    #[test]
    fn attachment_flags() {
        let w = identity_widget::<f64>();
        let flags: Vec<bool> = (0..4).map(|k| w.is_attachment(k)).collect();
        assert_eq!(flags, [true, false, false, true]);
        let t = transport_edge::<f64>();
        assert!(!t.is_attachment(0));
        assert_eq!(w.interior(), vec![1, 2, 3]);
    }

    #[test]
    fn exchange_roundtrip() {
        for w in catalog::<f64>() {
            let back = Widget::from_exchange(&w.name, &w.to_exchange()).unwrap();
            assert_eq!(back, w);
        }
        let text = "vertices 2\nedge 0 1 1\nport 0\nport 1\ntime 1.5707963267948966\n";
        let w = Widget::<f64>::from_exchange("edge", text).unwrap();
        assert!((w.ideal_port_matrix()[[1, 0]] - C::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn stepped_lines() {
        for (m, expected) in [
            (1, C::new(0.0, -1.0)),
            (3, C::new(0.0, 1.0)),
            (4, C::new(1.0, 0.0)),
        ] {
            let line = stepped_pst_line::<f64>(m).unwrap();
            let out = line.run().unwrap();
            assert!((out[m] - expected).norm() < 1e-12, "M={m}");
        }
        let one = stepped_pst_line::<f64>(1).unwrap();
        assert_eq!(one.solid.edges().len(), 1);
        assert_eq!(one.dashed.edges().len(), 0);
        assert!(stepped_pst_line::<f64>(0).is_err());
    }

    #[test]
    fn single_precision_widgets() {
        let r = widget_port_matrix(&phase_widget::<f32>()).unwrap();
        assert!((r.matrix[[1, 0]] - C::new(0.0f32, 1.0)).norm() < 1e-4);
        assert!(r.leakage < 1e-4);
    }
}
