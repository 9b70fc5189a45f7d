//! Combinatorial characterizations of neighbors and neighborhood sets for the
//! ranking games. These are the fast path; the LP geometry checks them.

use std::collections::BTreeSet;

use crate::game::GameSpec;
use crate::ranking::{MeasureKind, Permutation};

/// `a` and `b` differ by swapping two objects at consecutive ranks.
pub fn is_adjacent_transposition(a: &Permutation, b: &Permutation) -> bool {
    let diff: Vec<usize> = (0..a.len()).filter(|&r| a.object_at(r) != b.object_at(r)).collect();
    diff.len() == 2
        && diff[1] == diff[0] + 1
        && a.object_at(diff[0]) == b.object_at(diff[1])
        && a.object_at(diff[1]) == b.object_at(diff[0])
}

/// Objects placed in the top `n` ranks.
pub fn top_set(sigma: &Permutation, n: usize) -> BTreeSet<usize> {
    (0..n).map(|r| sigma.object_at(r)).collect()
}

/// Top-n sets differ by exactly one object in each direction.
pub fn is_single_cross_swap(a: &Permutation, b: &Permutation, n: usize) -> bool {
    let ta = top_set(a, n);
    let tb = top_set(b, n);
    ta.difference(&tb).count() == 1
}

pub fn are_neighbors(game: &GameSpec, i: usize, j: usize) -> bool {
    let (a, b) = (&game.actions[i], &game.actions[j]);
    match game.measure.kind {
        MeasureKind::NegPn => is_single_cross_swap(a, b, game.measure.cutoff()),
        _ => is_adjacent_transposition(a, b),
    }
}

pub fn neighbors(game: &GameSpec) -> Vec<(usize, usize)> {
    let n = game.num_actions();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if are_neighbors(game, i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// `{i, j}` for strictly monotone measures; for precision@n every action
/// sharing a top set with `i` or `j`.
pub fn neighborhood(game: &GameSpec, i: usize, j: usize) -> Vec<usize> {
    match game.measure.kind {
        MeasureKind::NegPn => {
            let n = game.measure.cutoff();
            let ti = top_set(&game.actions[i], n);
            let tj = top_set(&game.actions[j], n);
            (0..game.num_actions())
                .filter(|&k| {
                    let tk = top_set(&game.actions[k], n);
                    tk == ti || tk == tj
                })
                .collect()
        }
        _ => vec![i.min(j), i.max(j)],
    }
}

/// Every action's cell is full dimensional for these measures.
pub fn cell_dimension(game: &GameSpec) -> i64 {
    game.num_outcomes() as i64 - 1
}
