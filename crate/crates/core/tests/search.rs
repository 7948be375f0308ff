use discowalk::search::{evaluate, objective, search, SearchConfig, SearchProblem};
use discowalk::widgets::{
    identity_widget, mu_identity, mu_phase, mu_rotation, phase_widget, rotation_widget,
};
use discowalk::{widget_port_matrix, VertexId, WeightedGraph};
use std::f64::consts::PI;

fn square(tied: bool) -> SearchProblem<f64> {
    let template = WeightedGraph::new(6, [(0, 1, 1.0), (4, 5, 1.0)]).unwrap();
    let other = if tied { "mu1" } else { "mu1b" };
    let free = [
        (1, 2, "mu1".to_string()),
        (3, 4, other.to_string()),
        (1, 4, "mu2".to_string()),
        (2, 3, "mu3".to_string()),
    ];
    SearchProblem::new(
        template,
        &free,
        vec![VertexId(0), VertexId(5)],
        PI,
        phase_widget::<f64>().ideal_port_matrix().clone(),
    )
    .unwrap()
}

#[test]
fn published_weights_are_exact_solutions() {
    let (a, b, c) = mu_phase::<f64>();
    assert!(objective(&[a, b, c], &square(true)) < 1e-10);

    let id = identity_widget::<f64>();
    let p = SearchProblem::new(
        WeightedGraph::new(5, [(0, 1, 1.0), (3, 4, 1.0)]).unwrap(),
        &[(1, 2, "mu".into()), (2, 3, "mu".into())],
        vec![VertexId(0), VertexId(4)],
        PI,
        id.ideal_port_matrix().clone(),
    )
    .unwrap();
    assert!(objective(&[mu_identity()], &p) < 1e-10);

    let r = rotation_widget::<f64>(mu_rotation()).unwrap();
    let p = SearchProblem::new(
        WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap(),
        &[(1, 2, "mu".into())],
        vec![VertexId(0), VertexId(3)],
        PI,
        r.ideal_port_matrix().clone(),
    )
    .unwrap();
    assert!(objective(&[mu_rotation()], &p) < 1e-10);
}

#[test]
fn square_search_finds_a_phase_widget() {
    for tied in [true, false] {
        let problem = square(tied);
        let result = search(&problem, &SearchConfig::default()).unwrap();
        assert!(result.objective < 1e-6);
        assert!((objective(&result.weights, &problem) - result.objective).abs() < 1e-12);
        let w = problem.widget_for("found", &result.weights).unwrap();
        let resp = widget_port_matrix(&w).unwrap();
        assert!(resp.leakage < 1e-4);
        let dist = resp
            .matrix
            .iter()
            .zip(w.ideal_port_matrix())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(dist < 1e-4);
    }
}

#[test]
fn narrow_bounds_recover_the_published_square() {
    let problem = square(true).with_bounds(0.5, 3.0).unwrap();
    let result = search(&problem, &SearchConfig::default()).unwrap();
    let (a, b, c) = mu_phase::<f64>();
    for (found, known) in result.weights.iter().zip([a, b, c]) {
        assert!((found - known).abs() < 1e-6);
    }
}

#[test]
fn search_is_seed_deterministic() {
    let problem = square(true);
    let cfg = SearchConfig {
        restarts: 4,
        seed: 17,
        ..SearchConfig::default()
    };
    assert_eq!(
        search(&problem, &cfg).unwrap(),
        search(&problem, &cfg).unwrap()
    );
    let other = search(&problem, &SearchConfig { seed: 18, ..cfg }).unwrap();
    assert_eq!(other.seed, 18);
}

#[test]
fn objective_is_nonnegative_everywhere() {
    let problem = square(true);
    for i in 0..20 {
        let x = 0.1 + 0.37 * i as f64;
        let w = [x, 8.0 - x * 0.9, 0.05 + x * 0.5];
        let v = objective(&w, &problem);
        assert!(v >= 0.0);
        let (_, leak) = evaluate(&w, &problem).unwrap();
        assert!(leak <= v + 1e-15);
    }
}
