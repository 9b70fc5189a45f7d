//! Global and local observability by exact column-space membership, and the
//! conversion of certificates into estimator functions.

use std::collections::{BTreeMap, HashSet};

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::linalg::ColumnSpace;
use crate::ranking::{MeasureKind, Rational};

/// Tolerance for the float-weighted DCG identities.
pub const DCG_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservabilityKind {
    Global,
    Local,
}

/// Scalar multiplying one term of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum TermWeight {
    Unit,
    /// The DCG rank weight `f^s(rank)` (0-based rank).
    RankWeight { rank: usize, value: f64 },
}

impl TermWeight {
    pub fn value(&self) -> f64 {
        match self {
            TermWeight::Unit => 1.0,
            TermWeight::RankWeight { value, .. } => *value,
        }
    }
}

/// Coefficients over each contributing action's feedback symbols whose
/// signal-weighted sum is the term's target vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateTerm {
    pub weight: TermWeight,
    #[serde(serialize_with = "ser_coeffs")]
    pub coefficients: BTreeMap<usize, Vec<Rational>>,
}

fn ser_coeffs<S: serde::Serializer>(
    coeffs: &BTreeMap<usize, Vec<Rational>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(coeffs.len()))?;
    for (action, c) in coeffs {
        let strs: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        map.serialize_entry(&action.to_string(), &strs)?;
    }
    map.end()
}

/// `l_i - l_j = sum over terms of weight * sum_a S_a^T c_a`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservabilityCertificate {
    pub pair: (usize, usize),
    pub kind: ObservabilityKind,
    pub terms: Vec<CertificateTerm>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Observability {
    Observable(ObservabilityCertificate),
    NotObservable,
}

impl Observability {
    pub fn is_observable(&self) -> bool {
        matches!(self, Observability::Observable(_))
    }

    pub fn certificate(&self) -> Option<&ObservabilityCertificate> {
        match self {
            Observability::Observable(c) => Some(c),
            Observability::NotObservable => None,
        }
    }
}

/// Span of the transposed signal matrices of a set of actions.
pub struct SignalSpan {
    /// `(action, symbol)` of each generator column.
    generators: Vec<(usize, usize)>,
    space: ColumnSpace,
}

impl SignalSpan {
    pub fn new(game: &GameSpec, actions: &[usize]) -> Self {
        let mut generators = Vec::new();
        let mut columns = Vec::new();
        // Many actions share signal rows (same revealed objects); keep one copy.
        let mut seen: HashSet<Vec<Rational>> = HashSet::new();
        for &a in actions {
            let mut cols = vec![vec![Rational::zero(); game.num_outcomes()]; game.num_symbols()];
            for (o, &s) in game.feedback.row(a).iter().enumerate() {
                cols[s][o] = Rational::from_integer(1.into());
            }
            for (s, col) in cols.into_iter().enumerate() {
                if col.iter().any(|x| !x.is_zero()) && seen.insert(col.clone()) {
                    generators.push((a, s));
                    columns.push(col);
                }
            }
        }
        let space = ColumnSpace::new(game.num_outcomes(), &columns);
        Self { generators, space }
    }

    pub fn contains(&self, target: &[Rational]) -> bool {
        self.space.contains(target)
    }

    pub fn residual(&self, target: &[Rational]) -> Vec<Rational> {
        self.space.residual(target)
    }

    /// Per-action symbol coefficients; actions with all-zero coefficients are omitted.
    pub fn express(&self, game: &GameSpec, target: &[Rational]) -> Option<BTreeMap<usize, Vec<Rational>>> {
        let c = self.space.solve(target)?;
        let mut out: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
        for ((a, s), coef) in self.generators.iter().zip(c) {
            if !coef.is_zero() {
                out.entry(*a).or_insert_with(|| vec![Rational::zero(); game.num_symbols()])[*s] = coef;
            }
        }
        Some(out)
    }
}

/// Membership of `l_i - l_j` in the span, with a certificate when it holds.
pub fn check_in_span(
    game: &GameSpec,
    span: &SignalSpan,
    i: usize,
    j: usize,
    kind: ObservabilityKind,
) -> Result<Observability> {
    if let Some(target) = game.exact_loss_diff(i, j) {
        return Ok(match span.express(game, &target) {
            Some(coefficients) => Observability::Observable(ObservabilityCertificate {
                pair: (i, j),
                kind,
                terms: vec![CertificateTerm {
                    weight: TermWeight::Unit,
                    coefficients,
                }],
            }),
            None => Observability::NotObservable,
        });
    }

    // DCG: l_i - l_j = sum_r w_r d_r with exact d_r. The residual map is
    // linear, so membership is the float residual of the weighted sum.
    let weights = game
        .measure
        .rank_weights_f64(game.m)
        .ok_or_else(|| Error::InvalidMeasure("measure has no rank weights".into()))?;
    let comps = game.rank_components(i, j);
    let mut residual: Vec<f64> = Vec::new();
    for (r, d) in &comps {
        let res = span.residual(d);
        if residual.is_empty() {
            residual = vec![0.0; res.len()];
        }
        for (acc, x) in residual.iter_mut().zip(&res) {
            *acc += weights[*r] * x.to_f64().unwrap_or(f64::NAN);
        }
    }
    if residual.iter().any(|x| x.abs() > DCG_TOLERANCE) {
        return Ok(Observability::NotObservable);
    }
    let mut terms = Vec::with_capacity(comps.len());
    for (r, d) in &comps {
        let coefficients = span.express(game, d).ok_or_else(|| {
            Error::InvalidCertificate(format!(
                "rank-{} component cancels only in combination; no per-rank certificate",
                r + 1
            ))
        })?;
        terms.push(CertificateTerm {
            weight: TermWeight::RankWeight {
                rank: *r,
                value: weights[*r],
            },
            coefficients,
        });
    }
    Ok(Observability::Observable(ObservabilityCertificate {
        pair: (i, j),
        kind,
        terms,
    }))
}

impl ObservabilityCertificate {
    /// Re-derives `l_i - l_j` from the coefficients and the game's signal
    /// matrices. Exact games must match with zero residual; DCG terms match
    /// their rank components exactly and the weighted total to 1e-12.
    pub fn verify(&self, game: &GameSpec, allowed: Option<&[usize]>) -> Result<()> {
        let (i, j) = self.pair;
        let nout = game.num_outcomes();
        if let Some(allowed) = allowed {
            for term in &self.terms {
                if let Some(a) = term.coefficients.keys().find(|a| !allowed.contains(a)) {
                    return Err(Error::InvalidCertificate(format!(
                        "action {a} outside the neighborhood set"
                    )));
                }
            }
        }
        let assemble = |coeffs: &BTreeMap<usize, Vec<Rational>>| -> Vec<Rational> {
            let mut sum = vec![Rational::zero(); nout];
            for (&a, c) in coeffs {
                for (o, acc) in sum.iter_mut().enumerate() {
                    let s = game.feedback.symbol(a, o);
                    if !c[s].is_zero() {
                        *acc += &c[s];
                    }
                }
            }
            sum
        };
        match game.exact_loss_diff(i, j) {
            Some(target) => {
                let [term] = self.terms.as_slice() else {
                    return Err(Error::InvalidCertificate("exact games use one unit term".into()));
                };
                if assemble(&term.coefficients) != target {
                    return Err(Error::InvalidCertificate("nonzero residual".into()));
                }
            }
            None => {
                let comps: BTreeMap<usize, Vec<Rational>> = game.rank_components(i, j).into_iter().collect();
                let mut total = vec![0.0; nout];
                for term in &self.terms {
                    let TermWeight::RankWeight { rank, value } = term.weight else {
                        return Err(Error::InvalidCertificate("DCG terms carry rank weights".into()));
                    };
                    let got = assemble(&term.coefficients);
                    let want = comps
                        .get(&rank)
                        .cloned()
                        .unwrap_or_else(|| vec![Rational::zero(); nout]);
                    if got != want {
                        return Err(Error::InvalidCertificate(format!("rank {} component mismatch", rank + 1)));
                    }
                    for (t, g) in total.iter_mut().zip(&got) {
                        *t += value * g.to_f64().unwrap_or(f64::NAN);
                    }
                }
                for (o, t) in total.iter().enumerate() {
                    let want = game.loss.get_f64(i, o) - game.loss.get_f64(j, o);
                    if (t - want).abs() > DCG_TOLERANCE {
                        return Err(Error::InvalidCertificate(format!("residual {} at outcome {o}", t - want)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Estimator function `v(action, symbol)` with
/// `sum_a v(a, H[a][o]) = l_i[o] - l_j[o]` for every outcome `o`.
#[derive(Clone, Debug, PartialEq)]
pub enum EstimatorValues {
    Exact(BTreeMap<usize, Vec<Rational>>),
    Approx(BTreeMap<usize, Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorFunction {
    pub pair: (usize, usize),
    pub values: EstimatorValues,
}

impl EstimatorFunction {
    pub fn value_f64(&self, action: usize, symbol: usize) -> f64 {
        match &self.values {
            EstimatorValues::Exact(v) => v.get(&action).map_or(0.0, |c| c[symbol].to_f64().unwrap_or(f64::NAN)),
            EstimatorValues::Approx(v) => v.get(&action).map_or(0.0, |c| c[symbol]),
        }
    }

    pub fn support(&self) -> Vec<usize> {
        match &self.values {
            EstimatorValues::Exact(v) => v.keys().copied().collect(),
            EstimatorValues::Approx(v) => v.keys().copied().collect(),
        }
    }

    /// Checks the defining identity on every outcome.
    pub fn satisfies_identity(&self, game: &GameSpec) -> bool {
        let (i, j) = self.pair;
        match (&self.values, game.loss.exact_rows()) {
            (EstimatorValues::Exact(v), Some(rows)) => (0..game.num_outcomes()).all(|o| {
                let mut sum = Rational::zero();
                for (&a, c) in v {
                    sum += &c[game.feedback.symbol(a, o)];
                }
                sum == &rows[i][o] - &rows[j][o]
            }),
            _ => (0..game.num_outcomes()).all(|o| {
                let sum: f64 = self
                    .support()
                    .iter()
                    .map(|&a| self.value_f64(a, game.feedback.symbol(a, o)))
                    .sum();
                (sum - (game.loss.get_f64(i, o) - game.loss.get_f64(j, o))).abs() <= DCG_TOLERANCE
            }),
        }
    }
}

/// `v(sigma_a, s_l) = c_{a,l}`: observing `H[a][o]` is observing `S_a e_o`.
pub fn certificate_to_function(cert: &ObservabilityCertificate, game: &GameSpec) -> EstimatorFunction {
    let pair = cert.pair;
    if game.measure.kind != MeasureKind::NegDcg {
        let mut values: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
        for term in &cert.terms {
            for (&a, c) in &term.coefficients {
                let slot = values
                    .entry(a)
                    .or_insert_with(|| vec![Rational::zero(); game.num_symbols()]);
                for (acc, x) in slot.iter_mut().zip(c) {
                    *acc += x;
                }
            }
        }
        return EstimatorFunction {
            pair,
            values: EstimatorValues::Exact(values),
        };
    }
    let mut values: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for term in &cert.terms {
        let w = term.weight.value();
        for (&a, c) in &term.coefficients {
            let slot = values.entry(a).or_insert_with(|| vec![0.0; game.num_symbols()]);
            for (acc, x) in slot.iter_mut().zip(c) {
                *acc += w * x.to_f64().unwrap_or(f64::NAN);
            }
        }
    }
    EstimatorFunction {
        pair,
        values: EstimatorValues::Approx(values),
    }
}
