//! Small dense linear algebra over `Q`, used for explicit homology
//! representatives in a single grading.

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Row-reduces `m` in place to reduced row echelon form and returns the pivot
/// columns.
pub fn rref(m: &mut Matrix, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip().unwrap();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..cols {
                    if !m[row][c].is_zero() {
                        let delta = &f * &m[row][c];
                        m[r][c] -= &delta;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Basis of the null space of `m` (`rows x cols`).
pub fn kernel(m: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut a = m.clone();
    let pivots = rref(&mut a, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&a[r][f];
            }
            v
        })
        .collect()
}

/// Incrementally maintained echelon basis of a subspace.
struct Span {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Span {
    fn new() -> Self {
        Span { rows: Vec::new() }
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &(&f * y);
                    }
                }
            }
        }
        v
    }

    /// Adds `v`; returns false if it was already in the span.
    fn insert(&mut self, v: &[Rational]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip().unwrap();
        for x in r.iter_mut() {
            *x = &*x * &inv;
        }
        self.rows.push((p, r));
        true
    }
}

/// Scales `v` so that its first nonzero coefficient is 1.
pub fn normalize(v: &mut [Rational]) {
    if let Some(p) = v.iter().position(|x| !x.is_zero()) {
        let inv = v[p].recip().unwrap();
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
    }
}

/// Representatives of `ker(d_out) / im(d_in)` on a space of dimension `dim`.
/// `d_out` is given as rows over the space; `image` lists image vectors of the
/// incoming differential.
///
/// The representatives span `ker(d_out)` intersected with the orthogonal
/// complement of the image. Over `Q` this is a complement of the image inside
/// the kernel, and unlike a pivot-based choice it does not depend on which
/// boundaries happen to be reduced first.
pub fn homology_representatives(d_out: &Matrix, image: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let mut rows = d_out.clone();
    rows.extend(image.iter().cloned());
    let mut reps = kernel(&rows, dim);
    for v in reps.iter_mut() {
        normalize(v);
    }
    reps
}

/// Whether `v` lies in the span of `vectors`.
pub fn in_span(vectors: &[Vec<Rational>], v: &[Rational]) -> bool {
    let mut span = Span::new();
    for w in vectors {
        span.insert(w);
    }
    span.reduce(v).iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = vec![vec![q(1), q(1), q(1)]];
        let k = kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot = v.iter().fold(Rational::zero(), |acc, x| acc + x);
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn quotient_by_image() {
        // d_out = 0 on Q^2, image spanned by (1, 1): one class left
        let reps = homology_representatives(&vec![], &[vec![q(1), q(1)]], 2);
        assert_eq!(reps.len(), 1);
        assert!(!in_span(&[vec![q(1), q(1)]], &reps[0]));
        assert!(in_span(&[vec![q(2), q(2)]], &[q(-3), q(-3)]));
    }
}
