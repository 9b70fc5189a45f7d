//! Exact rational linear algebra: rank and column-space membership.

use num_traits::{One, Zero};

use crate::ranking::Rational;

/// Rank of a set of row vectors.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..cols {
            let v = &m[r][j] * &inv;
            m[r][j] = v;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    if !m[r][j].is_zero() {
                        let v = &m[r][j] * &f;
                        m[i][j] -= v;
                    }
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Span of a fixed list of generator columns in `Q^dim`.
///
/// Stores `E` with `E·G` in reduced row echelon form, so solving `G c = t`
/// for any target is one matrix-vector product.
#[derive(Clone, Debug)]
pub struct ColumnSpace {
    dim: usize,
    generators: usize,
    transform: Vec<Vec<Rational>>,
    /// `pivots[r]` is the generator index of the pivot in row `r`.
    pivots: Vec<usize>,
}

impl ColumnSpace {
    /// `columns[g]` is the g-th generator, each of length `dim`.
    pub fn new(dim: usize, columns: &[Vec<Rational>]) -> Self {
        let ngen = columns.len();
        // work[row] = [G row | E row]
        let mut work: Vec<Vec<Rational>> = (0..dim)
            .map(|i| {
                let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
                row.extend((0..dim).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        let width = ngen + dim;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ngen {
            if r == dim {
                break;
            }
            let Some(p) = (r..dim).find(|&i| !work[i][c].is_zero()) else {
                continue;
            };
            work.swap(r, p);
            let inv = work[r][c].recip();
            for j in 0..width {
                if !work[r][j].is_zero() {
                    let v = &work[r][j] * &inv;
                    work[r][j] = v;
                }
            }
            let pivot_row = work[r].clone();
            for (i, row) in work.iter_mut().enumerate() {
                if i != r && !row[c].is_zero() {
                    let f = row[c].clone();
                    for j in 0..width {
                        if !pivot_row[j].is_zero() {
                            row[j] -= &pivot_row[j] * &f;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let transform = work.into_iter().map(|row| row[ngen..].to_vec()).collect();
        Self {
            dim,
            generators: ngen,
            transform,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, target: &[Rational]) -> Vec<Rational> {
        assert_eq!(target.len(), self.dim, "target length");
        self.transform
            .iter()
            .map(|row| {
                let mut acc = Rational::zero();
                for (e, t) in row.iter().zip(target) {
                    if !e.is_zero() && !t.is_zero() {
                        acc += e * t;
                    }
                }
                acc
            })
            .collect()
    }

    /// Coordinates of `target` modulo the span: a linear map whose kernel is
    /// exactly the span.
    pub fn residual(&self, target: &[Rational]) -> Vec<Rational> {
        self.apply(target).split_off(self.rank())
    }

    pub fn contains(&self, target: &[Rational]) -> bool {
        self.residual(target).iter().all(Zero::is_zero)
    }

    /// Coefficients `c` over all generators with `G c = target`, zero on
    /// non-pivot generators; `None` when the target is outside the span.
    pub fn solve(&self, target: &[Rational]) -> Option<Vec<Rational>> {
        let u = self.apply(target);
        if u[self.rank()..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut coeffs = vec![Rational::zero(); self.generators];
        for (row, &g) in self.pivots.iter().enumerate() {
            coeffs[g] = u[row].clone();
        }
        Some(coeffs)
    }
}
