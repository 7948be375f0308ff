//! Bounded Nelder-Mead simplex minimization.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexParams<T> {
    pub reflection: T,
    pub expansion: T,
    pub contraction: T,
    pub shrink: T,
    /// Edge length of the initial simplex, relative to the bound width.
    pub initial_step: T,
}

impl<T: Real> Default for SimplexParams<T> {
    fn default() -> Self {
        Self {
            reflection: T::one(),
            expansion: T::lit(2.0),
            contraction: T::lit(0.5),
            shrink: T::lit(0.5),
            initial_step: T::lit(0.05),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    /// True if the simplex collapsed below the diameter tolerance.
    pub converged: bool,
}

/// Minimizes `f` over the box `bounds` starting from `x0`. Trial points are
/// clamped into the box. Stops when the simplex diameter falls below
/// `diameter_tol`, the best value falls below `value_tol`, or after
/// `max_iters` iterations.
pub fn minimize<T: Real, F: FnMut(&[T]) -> T>(
    mut f: F,
    x0: &[T],
    bounds: &[(T, T)],
    params: &SimplexParams<T>,
    max_iters: usize,
    diameter_tol: T,
    value_tol: T,
) -> Minimum<T> {
    let n = x0.len();
    let clamp = |x: &mut Vec<T>| {
        for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *v = v.max(lo).min(hi);
        }
    };
    let mut eval = |x: &[T]| {
        let v = f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };

    let mut start = x0.to_vec();
    clamp(&mut start);
    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
    simplex.push((start.clone(), eval(&start)));
    for i in 0..n {
        let (lo, hi) = bounds[i];
        let step = params.initial_step * (hi - lo);
        let mut p = start.clone();
        // Step away from whichever bound is closer.
        p[i] = if p[i] + step <= hi {
            p[i] + step
        } else {
            p[i] - step
        };
        clamp(&mut p);
        let v = eval(&p);
        simplex.push((p, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("values are not NaN"));
        if simplex[0].1 < value_tol || diameter(&simplex) < diameter_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let worst = simplex[n].clone();
        let mut centroid = vec![T::zero(); n];
        for (p, _) in &simplex[..n] {
            for (c, &x) in centroid.iter_mut().zip(p) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= T::count(n);
        }
        let along = |t: T| {
            let mut p: Vec<T> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(&c, &w)| c + t * (c - w))
                .collect();
            clamp(&mut p);
            p
        };

        let reflected = along(params.reflection);
        let fr = eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(params.reflection * params.expansion);
            let fe = eval(&expanded);
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst.1 {
            let p = along(params.reflection * params.contraction);
            let v = eval(&p);
            (p, v)
        } else {
            let p = along(-params.contraction);
            let v = eval(&p);
            (p, v)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let mut p: Vec<T> = best
                .iter()
                .zip(&entry.0)
                .map(|(&b, &x)| b + params.shrink * (x - b))
                .collect();
            clamp(&mut p);
            let v = eval(&p);
            *entry = (p, v);
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("values are not NaN"));
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        iterations,
        converged,
    }
}

fn diameter<T: Real>(simplex: &[(Vec<T>, T)]) -> T {
    let mut d = T::zero();
    for (i, (a, _)) in simplex.iter().enumerate() {
        for (b, _) in &simplex[i + 1..] {
            let dist = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| (x - y) * (x - y))
                .sum::<T>()
                .sqrt();
            d = d.max(dist);
        }
    }
    d
}
