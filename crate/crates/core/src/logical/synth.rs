//! Exhaustive single-qubit word search over `{S, X}`, with `S = sqrt(Z)` and
//! `X = R_X(2 sqrt(3) pi)`.

use std::fmt;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::{cplx, Real, C};

use super::{identity, native_rx, sqrt_z};

pub const MAX_WORD_DEPTH: usize = 20;

/// Ties within this distance go to the earlier word.
const TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    S,
    X,
}

impl Generator {
    pub const ALL: [Generator; 2] = [Generator::S, Generator::X];

    pub fn matrix<T: Real>(self) -> Array2<C<T>> {
        match self {
            Generator::S => sqrt_z(),
            Generator::X => native_rx(),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::S => "S",
            Generator::X => "X",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis<T> {
    /// Operator product, leftmost factor applied last.
    pub word: Vec<Generator>,
    pub distance: T,
    pub matrix: Array2<C<T>>,
}

impl<T> Synthesis<T> {
    /// The word as a string such as `SXSSS`; the empty word prints as `I`.
    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            "I".into()
        } else {
            self.word.iter().map(|g| g.to_string()).collect()
        }
    }
}

pub fn word_matrix<T: Real>(word: &[Generator]) -> Array2<C<T>> {
    word.iter().fold(identity(2), |acc, g| acc.dot(&g.matrix()))
}

/// `sqrt(1 - |tr(U^dagger V)| / 2)` for 2x2 unitaries, evaluated as half the
/// Frobenius distance after phase alignment to avoid cancellation near 0.
pub fn su2_distance<T: Real>(u: &Array2<C<T>>, v: &Array2<C<T>>) -> T {
    let tr = u
        .iter()
        .zip(v.iter())
        .fold(cplx(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
    let n = tr.norm();
    if !(n > T::lit(1e-3)) {
        return (T::one() - n / T::lit(2.0)).max(T::zero()).sqrt();
    }
    let phase = tr / n;
    let sq: T = u
        .iter()
        .zip(v.iter())
        .map(|(a, b)| (a * phase - b).norm_sqr())
        .sum();
    sq.sqrt() / T::lit(2.0)
}

/// Enumerates words by increasing length, and lexicographically within a
/// length, keeping the first word that beats the best distance so far.
pub fn synthesize_su2<T: Real>(target: &Array2<C<T>>, max_depth: usize) -> Result<Synthesis<T>> {
    if target.dim() != (2, 2) {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: target.len(),
        });
    }
    if max_depth > MAX_WORD_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "max_depth {max_depth} exceeds the limit of {MAX_WORD_DEPTH}"
        )));
    }
    let gens = [Generator::S.matrix::<T>(), Generator::X.matrix::<T>()];
    let id = identity::<T>(2);
    let mut best = Synthesis {
        word: Vec::new(),
        distance: su2_distance(&id, target),
        matrix: id.clone(),
    };
    let tie = T::lit(TIE);
    let mut word = Vec::with_capacity(max_depth);
    for len in 1..=max_depth {
        visit(&gens, target, &id, len, &mut word, &mut best, tie);
    }
    Ok(best)
}

fn visit<T: Real>(
    gens: &[Array2<C<T>>; 2],
    target: &Array2<C<T>>,
    prefix: &Array2<C<T>>,
    remaining: usize,
    word: &mut Vec<Generator>,
    best: &mut Synthesis<T>,
    tie: T,
) {
    if remaining == 0 {
        let d = su2_distance(prefix, target);
        if d < best.distance - tie {
            best.word = word.clone();
            best.distance = d;
            best.matrix = prefix.clone();
        }
        return;
    }
    for (g, m) in Generator::ALL.iter().zip(gens) {
        word.push(*g);
        visit(gens, target, &prefix.dot(m), remaining - 1, word, best, tie);
        word.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logical::{hadamard, ry};

    #[test]
    fn generator_in_set() {
        let s = synthesize_su2(&sqrt_z::<f64>(), 1).unwrap();
        assert_eq!(s.word, vec![Generator::S]);
        assert!(s.distance < 1e-12);
        assert_eq!(s.word_string(), "S");
    }

    #[test]
    fn identity_is_the_empty_word() {
        let s = synthesize_su2(&identity::<f64>(2), 6).unwrap();
        assert!(s.word.is_empty());
        assert_eq!(s.word_string(), "I");
        assert_eq!(s.distance, 0.0);
    }

    #[test]
    fn ry_needs_five_letters() {
        let target = ry(2.0 * 3f64.sqrt() * std::f64::consts::PI);
        let short = synthesize_su2(&target, 4).unwrap();
        assert!(short.distance > 1e-3);
        let s = synthesize_su2(&target, 5).unwrap();
        assert!(s.distance < 1e-9);
        assert_eq!(s.word_string(), "SXSSS");
    }

    #[test]
    fn distance_is_monotone_and_phase_blind() {
        let h = hadamard::<f64>();
        let mut last = f64::INFINITY;
        for depth in 0..=10 {
            let d = synthesize_su2(&h, depth).unwrap().distance;
            assert!(d <= last);
            last = d;
        }
        let u = native_rx::<f64>();
        let shifted = u.mapv(|z| z * C::from_polar(1.0, 2.1));
        assert!(su2_distance(&u, &shifted) < 1e-15);
        assert!(
            (su2_distance(&sqrt_z::<f64>(), &identity(2)) - (1.0 - 0.5f64.sqrt()).sqrt()).abs()
                < 1e-15
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(synthesize_su2(&identity::<f64>(4), 2).is_err());
        assert!(synthesize_su2(&identity::<f64>(2), 21).is_err());
    }
}
