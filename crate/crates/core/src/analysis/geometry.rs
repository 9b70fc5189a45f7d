//! Exact cell geometry via rational LPs.

use std::collections::HashMap;

use num_traits::Zero;

use crate::game::GameSpec;
use crate::lp::{FaceInfo, SimplexPolytope};
use crate::ranking::{eval_measure, Loss, MeasureKind, MeasureSpec, Rational};

/// Loss rows used for geometry. DCG cells are those of the sum loss: with a
/// strictly increasing rank weight an action is optimal exactly when the
/// expected relevances are sorted along it, whatever the weight values.
pub fn geometry_rows(game: &GameSpec) -> Vec<Vec<Rational>> {
    if let Some(rows) = game.loss.exact_rows() {
        return rows.to_vec();
    }
    debug_assert_eq!(game.measure.kind, MeasureKind::NegDcg);
    game.actions
        .iter()
        .map(|sigma| {
            game.outcomes
                .iter()
                .map(|r| match eval_measure(MeasureSpec::sl(), sigma, r) {
                    Ok(Loss::Exact(x)) => x,
                    _ => unreachable!("sum loss is exact"),
                })
                .collect()
        })
        .collect()
}

/// Actions grouped by identical loss vector.
#[derive(Clone, Debug)]
pub struct LossGroups {
    pub rows: Vec<Vec<Rational>>,
    pub group_of: Vec<usize>,
    pub members: Vec<Vec<usize>>,
}

impl LossGroups {
    pub fn new(rows: &[Vec<Rational>]) -> Self {
        let mut index: HashMap<&[Rational], usize> = HashMap::new();
        let mut distinct = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut group_of = Vec::with_capacity(rows.len());
        for (a, row) in rows.iter().enumerate() {
            let g = *index.entry(row.as_slice()).or_insert_with(|| {
                distinct.push(row.clone());
                members.push(Vec::new());
                distinct.len() - 1
            });
            members[g].push(a);
            group_of.push(g);
        }
        Self {
            rows: distinct,
            group_of,
            members,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn diff(&self, a: usize, b: usize) -> Vec<Rational> {
        self.rows[a].iter().zip(&self.rows[b]).map(|(x, y)| x - y).collect()
    }

    /// Facet inequalities `(l_g - l_h)·p <= 0` of group `g`'s cell.
    pub fn cell_rows(&self, g: usize) -> Vec<Vec<Rational>> {
        (0..self.len()).filter(|&h| h != g).map(|h| self.diff(g, h)).collect()
    }

    pub fn cell(&self, g: usize) -> SimplexPolytope {
        SimplexPolytope::new(self.rows[g].len(), self.cell_rows(g))
    }

    pub fn intersection(&self, g: usize, h: usize) -> SimplexPolytope {
        let mut rows = self.cell_rows(g);
        rows.extend(self.cell_rows(h));
        SimplexPolytope::new(self.rows[g].len(), rows)
    }

    /// Whether `point` lies in group `h`'s cell given it lies in `g`'s.
    pub fn point_in_cell(&self, point: &[Rational], g: usize, h: usize) -> bool {
        let mut acc = Rational::zero();
        for ((x, y), p) in self.rows[h].iter().zip(&self.rows[g]).zip(point) {
            if !p.is_zero() {
                acc += (x - y) * p;
            }
        }
        acc.is_zero()
    }
}

/// Exact dimension and relative-interior point of every group's cell.
pub fn group_faces(groups: &LossGroups) -> Vec<Option<FaceInfo>> {
    use rayon::prelude::*;
    (0..groups.len()).into_par_iter().map(|g| groups.cell(g).analyze()).collect()
}

/// Dimension of a face, `-1` when empty.
pub fn dimension_of(face: &Option<FaceInfo>) -> i64 {
    face.as_ref().map_or(-1, |f| f.dimension as i64)
}

/// Groups whose cells contain `face`, read off a relative-interior point:
/// a linear function nonnegative on a convex set and zero at a relative
/// interior point vanishes on all of it.
pub fn containing_groups(groups: &LossGroups, anchor: usize, face: &FaceInfo) -> Vec<usize> {
    (0..groups.len())
        .filter(|&h| groups.point_in_cell(&face.interior_point, anchor, h))
        .collect()
}
