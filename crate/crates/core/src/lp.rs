//! Exact rational simplex for polytopes cut out of the probability simplex by
//! homogeneous inequalities `a·p <= 0`.
//!
//! The only question asked is which inequalities hold with equality on the
//! whole polytope (its implicit equalities). Those fix the affine hull and
//! hence the dimension.

use num_traits::{One, Signed, Zero};

use crate::linalg;
use crate::ranking::Rational;

/// `{p in R^dim : p >= 0, 1·p = 1, row·p <= 0 for every row}`.
#[derive(Clone, Debug)]
pub struct SimplexPolytope {
    dim: usize,
    rows: Vec<Vec<Rational>>,
}

/// Implicit-equality structure of a nonempty polytope.
#[derive(Clone, Debug)]
pub struct FaceInfo {
    pub dimension: usize,
    /// Indices into the constraint rows that are tight everywhere.
    pub implicit_rows: Vec<usize>,
    /// Coordinates that vanish everywhere.
    pub zero_coordinates: Vec<usize>,
    /// A point in the relative interior.
    pub interior_point: Vec<Rational>,
}

impl SimplexPolytope {
    pub fn new(dim: usize, rows: Vec<Vec<Rational>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == dim));
        Self { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// `None` when the polytope is empty.
    pub fn analyze(&self) -> Option<FaceInfo> {
        let n = self.dim;
        let k = self.rows.len();
        let mut tab = Tableau::new(n, &self.rows);
        if !tab.phase_one() {
            return None;
        }
        // Candidate "slack" variables: p_j for coordinates, s_k for rows.
        let mut open: Vec<usize> = (0..n).chain(n..n + k).collect();
        let mut points: Vec<Vec<Rational>> = Vec::new();
        loop {
            let mut objective = vec![Rational::zero(); tab.cols];
            for &v in &open {
                objective[v] = Rational::one();
            }
            let value = tab.maximize(&objective);
            let x = tab.solution();
            points.push(x[..n].to_vec());
            if value.is_zero() {
                break;
            }
            open.retain(|&v| x[v].is_zero());
        }
        let weight = Rational::new(1.into(), (points.len() as i64).into());
        let mut interior = vec![Rational::zero(); n];
        for pt in &points {
            for (acc, v) in interior.iter_mut().zip(pt) {
                *acc += v * &weight;
            }
        }

        let zero_coordinates: Vec<usize> = open.iter().copied().filter(|&v| v < n).collect();
        let implicit_rows: Vec<usize> = open.iter().copied().filter(|&v| v >= n).map(|v| v - n).collect();

        let mut equalities: Vec<Vec<Rational>> = vec![vec![Rational::one(); n]];
        for &j in &zero_coordinates {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            equalities.push(e);
        }
        for &r in &implicit_rows {
            equalities.push(self.rows[r].clone());
        }
        let dimension = n - linalg::rank(&equalities);
        Some(FaceInfo {
            dimension,
            implicit_rows,
            zero_coordinates,
            interior_point: interior,
        })
    }
}

/// Dense tableau. Columns: `p` (n), row slacks `s` (k), one artificial.
/// Rows: k inequality rows `a·p + s = 0`, then `1·p + art = 1`.
struct Tableau {
    n: usize,
    k: usize,
    cols: usize,
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    artificial: usize,
}

impl Tableau {
    fn new(n: usize, rows: &[Vec<Rational>]) -> Self {
        let k = rows.len();
        let cols = n + k + 1;
        let artificial = n + k;
        let mut a = Vec::with_capacity(k + 1);
        let mut rhs = Vec::with_capacity(k + 1);
        let mut basis = Vec::with_capacity(k + 1);
        for (i, row) in rows.iter().enumerate() {
            let mut t = vec![Rational::zero(); cols];
            t[..n].clone_from_slice(row);
            t[n + i] = Rational::one();
            a.push(t);
            rhs.push(Rational::zero());
            basis.push(n + i);
        }
        let mut sum = vec![Rational::zero(); cols];
        for v in sum.iter_mut().take(n) {
            *v = Rational::one();
        }
        sum[artificial] = Rational::one();
        a.push(sum);
        rhs.push(Rational::one());
        basis.push(artificial);
        Self {
            n,
            k,
            cols,
            a,
            rhs,
            basis,
            artificial,
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.a[row][col].recip();
        let nz: Vec<usize> = (0..self.cols).filter(|&j| !self.a[row][j].is_zero()).collect();
        for &j in &nz {
            let v = &self.a[row][j] * &inv;
            self.a[row][j] = v;
        }
        self.rhs[row] = &self.rhs[row] * &inv;
        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.a.len() {
            if i == row || self.a[i][col].is_zero() {
                continue;
            }
            let f = self.a[i][col].clone();
            for &j in &nz {
                let d = &pivot_row[j] * &f;
                self.a[i][j] -= d;
            }
            if !pivot_rhs.is_zero() {
                let d = &pivot_rhs * &f;
                self.rhs[i] -= d;
            }
        }
        self.basis[row] = col;
    }

    /// Primal simplex with Bland's rule; `allowed` masks entering columns.
    /// Returns the optimal objective value. The polytope is bounded, so the
    /// LP always has an optimum.
    fn run(&mut self, objective: &[Rational], allowed: &[bool]) -> Rational {
        loop {
            // reduced cost d_j = c_j - sum_i c_B(i) a_ij
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut d = objective[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !objective[b].is_zero() && !self.a[i][j].is_zero() {
                        d -= &objective[b] * &self.a[i][j];
                    }
                }
                if d.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                let mut value = Rational::zero();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !objective[b].is_zero() {
                        value += &objective[b] * &self.rhs[i];
                    }
                }
                return value;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                if self.a[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.a[i][col];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let (row, _) = leave.expect("bounded LP");
            self.pivot(row, col);
        }
    }

    /// Drives the artificial variable to zero; false when infeasible.
    fn phase_one(&mut self) -> bool {
        let mut objective = vec![Rational::zero(); self.cols];
        objective[self.artificial] = -Rational::one();
        let allowed = vec![true; self.cols];
        let value = self.run(&objective, &allowed);
        if !value.is_zero() {
            return false;
        }
        if let Some(row) = self.basis.iter().position(|&b| b == self.artificial) {
            // Basic at zero: swap it out for any usable column.
            if let Some(col) = (0..self.n + self.k).find(|&j| !self.a[row][j].is_zero()) {
                self.pivot(row, col);
            } else {
                self.a.remove(row);
                self.rhs.remove(row);
                self.basis.remove(row);
            }
        }
        for row in self.a.iter_mut() {
            row[self.artificial] = Rational::zero();
        }
        true
    }

    fn maximize(&mut self, objective: &[Rational]) -> Rational {
        let mut allowed = vec![true; self.cols];
        allowed[self.artificial] = false;
        self.run(objective, &allowed)
    }

    fn solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        x
    }
}
