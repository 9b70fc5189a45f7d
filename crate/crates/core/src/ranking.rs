//! Rankings, binary relevance vectors and the ranking measures.
//!
//! Objects and ranks are 0-based internally. `Display` and the `*_one_based`
//! helpers use the 1-based convention of the CLI and reports.

use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// A ranking: `rank_to_object[r]` is the object placed at rank `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    rank_to_object: Vec<usize>,
    object_to_rank: Vec<usize>,
}

impl Permutation {
    pub fn new(rank_to_object: Vec<usize>) -> Result<Self> {
        let m = rank_to_object.len();
        let mut object_to_rank = vec![usize::MAX; m];
        for (rank, &obj) in rank_to_object.iter().enumerate() {
            if obj >= m {
                return Err(Error::InvalidPermutation {
                    m,
                    detail: format!("object {} out of range", obj + 1),
                });
            }
            if object_to_rank[obj] != usize::MAX {
                return Err(Error::InvalidPermutation {
                    m,
                    detail: format!("object {} repeated", obj + 1),
                });
            }
            object_to_rank[obj] = rank;
        }
        Ok(Self {
            rank_to_object,
            object_to_rank,
        })
    }

    /// Builds from 1-based object labels, e.g. `[2, 1, 3]` puts object 2 first.
    pub fn from_one_based(objects: &[usize]) -> Result<Self> {
        let m = objects.len();
        let zero_based = objects
            .iter()
            .map(|&o| {
                o.checked_sub(1).ok_or_else(|| Error::InvalidPermutation {
                    m,
                    detail: "object 0 is not a valid 1-based label".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero_based)
    }

    pub fn identity(m: usize) -> Self {
        let ids: Vec<usize> = (0..m).collect();
        Self {
            rank_to_object: ids.clone(),
            object_to_rank: ids,
        }
    }

    /// All `m!` permutations in lexicographic order of `rank_to_object`.
    pub fn all(m: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(m);
        let mut used = vec![false; m];
        fn rec(m: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if current.len() == m {
                out.push(Permutation::new(current.clone()).expect("valid by construction"));
                return;
            }
            for obj in 0..m {
                if !used[obj] {
                    used[obj] = true;
                    current.push(obj);
                    rec(m, current, used, out);
                    current.pop();
                    used[obj] = false;
                }
            }
        }
        rec(m, &mut current, &mut used, &mut out);
        out
    }

    pub fn len(&self) -> usize {
        self.rank_to_object.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank_to_object.is_empty()
    }

    pub fn object_at(&self, rank: usize) -> usize {
        self.rank_to_object[rank]
    }

    pub fn rank_of(&self, object: usize) -> usize {
        self.object_to_rank[object]
    }

    pub fn rank_to_object(&self) -> &[usize] {
        &self.rank_to_object
    }

    pub fn object_to_rank(&self) -> &[usize] {
        &self.object_to_rank
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.rank_to_object.iter().map(|o| o + 1).collect()
    }

    /// Ranks objects by descending score, ties to the lower object index.
    pub fn sorted_by_scores(scores: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        Self::new(order).expect("sort of 0..m is a permutation")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.rank_to_object.iter().map(|o| (o + 1).to_string()).collect();
        write!(f, "({})", labels.join(","))
    }
}

/// Binary relevance vector. `index` reads the bits as a binary numeral with
/// object 1 as the most significant bit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelevanceVector {
    bits: Vec<u8>,
    index: usize,
}

impl RelevanceVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        let mut index = 0usize;
        for &b in &bits {
            if b > 1 {
                return Err(Error::InvalidRelevance(b));
            }
            index = (index << 1) | b as usize;
        }
        Ok(Self { bits, index })
    }

    pub fn from_index(m: usize, index: usize) -> Result<Self> {
        if m >= usize::BITS as usize || index >> m != 0 {
            return Err(Error::OutcomeIndex { m, index });
        }
        let bits = (0..m).map(|i| ((index >> (m - 1 - i)) & 1) as u8).collect();
        Ok(Self { bits, index })
    }

    /// All `2^m` outcomes in index order.
    pub fn all(m: usize) -> Vec<RelevanceVector> {
        (0..1usize << m)
            .map(|i| Self::from_index(m, i).expect("index in range"))
            .collect()
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            bits: vec![0; m],
            index: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, object: usize) -> u8 {
        self.bits[object]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn bitstring(&self) -> String {
        self.bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// Pairwise loss.
    Pl,
    /// Sum loss.
    Sl,
    /// Negated discounted cumulative gain.
    NegDcg,
    /// Negated precision at n.
    NegPn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl MeasureSpec {
    pub fn pl() -> Self {
        Self { kind: MeasureKind::Pl, n: None }
    }

    pub fn sl() -> Self {
        Self { kind: MeasureKind::Sl, n: None }
    }

    pub fn dcg() -> Self {
        Self { kind: MeasureKind::NegDcg, n: None }
    }

    pub fn pn(n: usize) -> Self {
        Self { kind: MeasureKind::NegPn, n: Some(n) }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        match (self.kind, self.n) {
            (MeasureKind::NegPn, Some(n)) if (1..=m).contains(&n) => Ok(()),
            (MeasureKind::NegPn, Some(n)) => Err(Error::InvalidMeasure(format!(
                "precision cutoff n = {n} must satisfy 1 <= n <= m = {m}"
            ))),
            (MeasureKind::NegPn, None) => Err(Error::InvalidMeasure("precision@n requires a cutoff n".into())),
            (_, Some(_)) => Err(Error::InvalidMeasure("only precision@n takes a cutoff".into())),
            _ => Ok(()),
        }
    }

    /// Whether losses are exact rationals (everything except DCG).
    pub fn is_exact(&self) -> bool {
        self.kind != MeasureKind::NegDcg
    }

    pub fn cutoff(&self) -> usize {
        self.n.unwrap_or(0)
    }

    /// Short name used on the command line and in reports.
    pub fn name(&self) -> &'static str {
        match self.kind {
            MeasureKind::Pl => "pl",
            MeasureKind::Sl => "sl",
            MeasureKind::NegDcg => "dcg",
            MeasureKind::NegPn => "pn",
        }
    }

    /// The scalar weight `f^s(rank)` for a 0-based rank as a float.
    /// Pairwise loss has none.
    pub fn rank_weight_f64(&self, rank: usize) -> Option<f64> {
        match self.kind {
            MeasureKind::Pl => None,
            MeasureKind::Sl => Some((rank + 1) as f64),
            MeasureKind::NegDcg => Some(-1.0 / ((rank + 2) as f64).log2()),
            MeasureKind::NegPn => Some(if rank < self.cutoff() { -1.0 } else { 0.0 }),
        }
    }

    pub fn rank_weight(&self, rank: usize) -> Result<Loss> {
        match self.kind {
            MeasureKind::Pl => Err(Error::NoLinearForm),
            MeasureKind::Sl => Ok(Loss::Exact(rat(rank as i64 + 1))),
            MeasureKind::NegDcg => Ok(Loss::Approx(self.rank_weight_f64(rank).unwrap())),
            MeasureKind::NegPn => Ok(Loss::Exact(rat(if rank < self.cutoff() { -1 } else { 0 }))),
        }
    }

    /// `f^s` over all ranks as floats.
    pub fn rank_weights_f64(&self, m: usize) -> Option<Vec<f64>> {
        (0..m).map(|r| self.rank_weight_f64(r)).collect()
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.n {
            Some(n) => write!(f, "{}@{}", self.name(), n),
            None => write!(f, "{}", self.name()),
        }
    }
}

/// A loss value: exact for PL, SL and P@n; a float for DCG.
#[derive(Clone, Debug, PartialEq)]
pub enum Loss {
    Exact(Rational),
    Approx(f64),
}

impl Loss {
    pub fn to_f64(&self) -> f64 {
        match self {
            Loss::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Loss::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Loss::Exact(r) => Some(r),
            Loss::Approx(_) => None,
        }
    }

    /// Fixed-precision rational: exact values pass through, floats are
    /// rounded to the nearest multiple of `1/denominator`.
    pub fn to_fixed(&self, denominator: i64) -> Rational {
        match self {
            Loss::Exact(r) => r.clone(),
            Loss::Approx(x) => {
                Rational::new(((x * denominator as f64).round() as i64).into(), denominator.into())
            }
        }
    }

    /// Equality, with floats compared at 1e-12.
    pub fn approx_eq(&self, other: &Loss) -> bool {
        match (self, other) {
            (Loss::Exact(a), Loss::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= 1e-12,
        }
    }
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Loss::Exact(r) => write!(f, "{r}"),
            Loss::Approx(x) => write!(f, "{x}"),
        }
    }
}

fn check_dims(sigma: &Permutation, r: &RelevanceVector) -> Result<()> {
    if sigma.len() != r.len() {
        return Err(Error::DimensionMismatch {
            expected: sigma.len(),
            actual: r.len(),
        });
    }
    Ok(())
}

fn pairwise_count(sigma: &Permutation, r: &RelevanceVector) -> i64 {
    let m = sigma.len();
    let mut count = 0;
    for i in 0..m {
        for j in 0..m {
            if sigma.rank_of(i) < sigma.rank_of(j) && r.get(i) < r.get(j) {
                count += 1;
            }
        }
    }
    count
}

/// Loss of ranking `sigma` against relevance `r`.
pub fn eval_measure(spec: MeasureSpec, sigma: &Permutation, r: &RelevanceVector) -> Result<Loss> {
    check_dims(sigma, r)?;
    spec.validate(sigma.len())?;
    Ok(match spec.kind {
        MeasureKind::Pl => Loss::Exact(rat(pairwise_count(sigma, r))),
        MeasureKind::NegDcg => Loss::Approx(loss_f64(spec, sigma, r.bits())),
        MeasureKind::Sl | MeasureKind::NegPn => {
            let mut total = Rational::zero();
            for obj in 0..r.len() {
                if r.get(obj) == 1 {
                    if let Loss::Exact(w) = spec.rank_weight(sigma.rank_of(obj))? {
                        total += w;
                    }
                }
            }
            Loss::Exact(total)
        }
    })
}

/// Float loss on raw bits; the simulation hot path. Dimensions are not checked.
pub fn loss_f64(spec: MeasureSpec, sigma: &Permutation, bits: &[u8]) -> f64 {
    match spec.kind {
        MeasureKind::Pl => {
            let m = sigma.len();
            let mut count = 0u32;
            for ra in 0..m {
                for rb in ra + 1..m {
                    if bits[sigma.object_at(ra)] < bits[sigma.object_at(rb)] {
                        count += 1;
                    }
                }
            }
            count as f64
        }
        _ => bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(obj, _)| spec.rank_weight_f64(sigma.rank_of(obj)).unwrap())
            .sum(),
    }
}

/// The linear form `f(sigma)` with `f(sigma)·R = loss` for every `R`.
pub fn f_vector(spec: MeasureSpec, sigma: &Permutation) -> Result<Vec<Loss>> {
    spec.validate(sigma.len())?;
    (0..sigma.len()).map(|obj| spec.rank_weight(sigma.rank_of(obj))).collect()
}

/// Running sufficient statistics of a relevance sequence: per-object
/// relevance counts, plus pairwise counts for the pairwise loss.
#[derive(Clone, Debug)]
pub struct CumulativeStats {
    m: usize,
    rounds: usize,
    counts: Vec<u64>,
    /// `pair[i*m + j]` counts rounds with `R(i) < R(j)`.
    pair: Vec<u64>,
}

impl CumulativeStats {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            rounds: 0,
            counts: vec![0; m],
            pair: vec![0; m * m],
        }
    }

    pub fn push(&mut self, bits: &[u8]) {
        self.rounds += 1;
        for (c, &b) in self.counts.iter_mut().zip(bits) {
            *c += b as u64;
        }
        for i in 0..self.m {
            if bits[i] == 0 {
                for j in 0..self.m {
                    if bits[j] == 1 {
                        self.pair[i * self.m + j] += 1;
                    }
                }
            }
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Hindsight-optimal ranking: objects by descending count, ties to the
    /// lower index. Optimal for every measure in scope; for the pairwise
    /// loss through its equal regret with the sum loss.
    pub fn best_ranking(&self) -> Permutation {
        let scores: Vec<f64> = self.counts.iter().map(|&c| c as f64).collect();
        Permutation::sorted_by_scores(&scores)
    }

    /// Total loss of a fixed ranking over the rounds seen so far.
    pub fn total_loss_f64(&self, spec: MeasureSpec, sigma: &Permutation) -> f64 {
        match spec.kind {
            MeasureKind::Pl => {
                let mut total = 0u64;
                for i in 0..self.m {
                    for j in 0..self.m {
                        if sigma.rank_of(i) < sigma.rank_of(j) {
                            total += self.pair[i * self.m + j];
                        }
                    }
                }
                total as f64
            }
            _ => (0..self.m)
                .map(|obj| spec.rank_weight_f64(sigma.rank_of(obj)).unwrap() * self.counts[obj] as f64)
                .sum(),
        }
    }

    pub fn best_total_f64(&self, spec: MeasureSpec) -> (Permutation, f64) {
        let best = self.best_ranking();
        let total = self.total_loss_f64(spec, &best);
        (best, total)
    }
}

/// Best fixed ranking in hindsight and its total loss.
pub fn hindsight_best(spec: MeasureSpec, sequence: &[RelevanceVector]) -> Result<(Permutation, Loss)> {
    let first = sequence.first().ok_or(Error::EmptySequence)?;
    let m = first.len();
    spec.validate(m)?;
    let mut stats = CumulativeStats::new(m);
    for r in sequence {
        if r.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: r.len(),
            });
        }
        stats.push(r.bits());
    }
    let best = stats.best_ranking();
    let total = if spec.is_exact() {
        let mut sum = Rational::zero();
        for r in sequence {
            if let Loss::Exact(l) = eval_measure(spec, &best, r)? {
                sum += l;
            }
        }
        Loss::Exact(sum)
    } else {
        Loss::Approx(stats.total_loss_f64(spec, &best))
    };
    Ok((best, total))
}
