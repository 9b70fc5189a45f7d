//! The finite partial-monitoring game of a ranking measure with top-k feedback.
//!
//! Actions are all `m!` rankings in lexicographic order, outcomes are all
//! `2^m` relevance vectors in index order, and feedback symbols are the `2^k`
//! binary tuples in counting order (first revealed object most significant).

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ranking::{eval_measure, loss_f64, rat, Loss, MeasureSpec, Permutation, Rational, RelevanceVector};

/// Largest `m` for which the explicit `m! x 2^m` matrices are built by default.
pub const DEFAULT_MAX_OBJECTS: usize = 6;

#[derive(Clone, Debug)]
pub enum LossMatrix {
    Exact(Vec<Vec<Rational>>),
    Approx(Vec<Vec<f64>>),
}

impl LossMatrix {
    pub fn get_f64(&self, action: usize, outcome: usize) -> f64 {
        match self {
            LossMatrix::Exact(rows) => Loss::Exact(rows[action][outcome].clone()).to_f64(),
            LossMatrix::Approx(rows) => rows[action][outcome],
        }
    }

    pub fn get(&self, action: usize, outcome: usize) -> Loss {
        match self {
            LossMatrix::Exact(rows) => Loss::Exact(rows[action][outcome].clone()),
            LossMatrix::Approx(rows) => Loss::Approx(rows[action][outcome]),
        }
    }

    pub fn exact_rows(&self) -> Option<&[Vec<Rational>]> {
        match self {
            LossMatrix::Exact(rows) => Some(rows),
            LossMatrix::Approx(_) => None,
        }
    }
}

/// Feedback symbol index for every (action, outcome).
#[derive(Clone, Debug)]
pub struct FeedbackMatrix {
    k: usize,
    symbols: Vec<Vec<usize>>,
}

impl FeedbackMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn symbol(&self, action: usize, outcome: usize) -> usize {
        self.symbols[action][outcome]
    }

    /// The revealed relevances `(R(sigma(1)), ..., R(sigma(k)))`.
    pub fn tuple(&self, action: usize, outcome: usize) -> Vec<u8> {
        symbol_bits(self.symbols[action][outcome], self.k)
    }

    pub fn row(&self, action: usize) -> &[usize] {
        &self.symbols[action]
    }
}

/// Bits of symbol `s` for depth `k`, most significant first.
pub fn symbol_bits(s: usize, k: usize) -> Vec<u8> {
    (0..k).map(|i| ((s >> (k - 1 - i)) & 1) as u8).collect()
}

pub fn symbol_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Top-k feedback of ranking `sigma` on relevance bits, as a symbol index.
pub fn feedback_symbol(sigma: &Permutation, bits: &[u8], k: usize) -> usize {
    (0..k).fold(0, |acc, r| (acc << 1) | bits[sigma.object_at(r)] as usize)
}

/// `2^k x 2^m` 0/1 matrix; entry `(l, l')` is 1 iff outcome `l'` yields symbol `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignalMatrix {
    rows: Vec<Vec<u8>>,
}

impl SignalMatrix {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn entry(&self, symbol: usize, outcome: usize) -> u8 {
        self.rows[symbol][outcome]
    }

    /// Columns of the transpose, i.e. the rows, as rational vectors.
    pub fn rows_rational(&self) -> Vec<Vec<Rational>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&x| rat(x as i64)).collect())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct GameSpec {
    pub measure: MeasureSpec,
    pub m: usize,
    pub k: usize,
    pub actions: Vec<Permutation>,
    pub outcomes: Vec<RelevanceVector>,
    pub loss: LossMatrix,
    pub feedback: FeedbackMatrix,
}

pub fn build_game(measure: MeasureSpec, m: usize, k: usize) -> Result<GameSpec> {
    build_game_with_cap(measure, m, k, DEFAULT_MAX_OBJECTS)
}

pub fn build_game_with_cap(measure: MeasureSpec, m: usize, k: usize, cap: usize) -> Result<GameSpec> {
    if m > cap {
        return Err(Error::SizeCap { m, cap });
    }
    if k < 1 || k > m {
        return Err(Error::InvalidDepth { m, k });
    }
    measure.validate(m)?;
    let actions = Permutation::all(m);
    let outcomes = RelevanceVector::all(m);

    let loss = if measure.is_exact() {
        let rows = actions
            .iter()
            .map(|sigma| {
                outcomes
                    .iter()
                    .map(|r| match eval_measure(measure, sigma, r) {
                        Ok(Loss::Exact(x)) => Ok(x),
                        Ok(Loss::Approx(_)) => unreachable!("exact measure"),
                        Err(e) => Err(e),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        LossMatrix::Exact(rows)
    } else {
        LossMatrix::Approx(
            actions
                .iter()
                .map(|sigma| outcomes.iter().map(|r| loss_f64(measure, sigma, r.bits())).collect())
                .collect(),
        )
    };

    let symbols = actions
        .iter()
        .map(|sigma| outcomes.iter().map(|r| feedback_symbol(sigma, r.bits(), k)).collect())
        .collect();

    Ok(GameSpec {
        measure,
        m,
        k,
        actions,
        outcomes,
        loss,
        feedback: FeedbackMatrix { k, symbols },
    })
}

impl GameSpec {
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn num_symbols(&self) -> usize {
        1 << self.k
    }

    pub fn check_action(&self, index: usize) -> Result<()> {
        if index >= self.actions.len() {
            return Err(Error::ActionIndex {
                index,
                count: self.actions.len(),
            });
        }
        Ok(())
    }

    pub fn action_index(&self, sigma: &Permutation) -> Option<usize> {
        self.actions.binary_search(sigma).ok()
    }

    pub fn signal_matrix(&self, action: usize) -> Result<SignalMatrix> {
        signal_matrix(self, action)
    }

    /// `l_i - l_j` exactly, when the measure is exact.
    pub fn exact_loss_diff(&self, i: usize, j: usize) -> Option<Vec<Rational>> {
        let rows = self.loss.exact_rows()?;
        Some(rows[i].iter().zip(&rows[j]).map(|(a, b)| a - b).collect())
    }

    /// Decomposition `l_i - l_j = sum_r f^s(r) d_r` with
    /// `d_r(R) = R(sigma_i(r)) - R(sigma_j(r))`; zero components are skipped.
    pub fn rank_components(&self, i: usize, j: usize) -> Vec<(usize, Vec<Rational>)> {
        let (si, sj) = (&self.actions[i], &self.actions[j]);
        (0..self.m)
            .filter(|&r| si.object_at(r) != sj.object_at(r))
            .map(|r| {
                let d = self
                    .outcomes
                    .iter()
                    .map(|o| rat(o.get(si.object_at(r)) as i64 - o.get(sj.object_at(r)) as i64))
                    .collect();
                (r, d)
            })
            .filter(|(_, d): &(usize, Vec<Rational>)| d.iter().any(|x| !x.is_zero()))
            .collect()
    }
}

pub fn signal_matrix(game: &GameSpec, action: usize) -> Result<SignalMatrix> {
    game.check_action(action)?;
    let mut rows = vec![vec![0u8; game.num_outcomes()]; game.num_symbols()];
    for (outcome, &s) in game.feedback.row(action).iter().enumerate() {
        rows[s][outcome] = 1;
    }
    Ok(SignalMatrix { rows })
}
