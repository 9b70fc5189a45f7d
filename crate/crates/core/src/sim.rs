//! Oblivious adversaries, the game loop with regret accounting, and sweeps
//! with log-log slope fits.

use std::fmt::Write as _;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{make_baseline, BaselineKind};
use crate::error::{Error, Result};
use crate::game::feedback_symbol;
use crate::nw2::{LearnerConfig, Nw2Learner};
use crate::ranking::{loss_f64, CumulativeStats, MeasureKind, MeasureSpec, Permutation, RelevanceVector};

/// A ranking to play plus the learner's own label for it (written to traces).
#[derive(Clone, Debug)]
pub struct Selection {
    pub ranking: Permutation,
    pub label: usize,
}

/// A learner sees only the top-k relevances of the ranking it played.
pub trait Learner {
    fn select(&mut self) -> Result<Selection>;
    fn observe(&mut self, feedback: &[u8]) -> Result<()>;
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn select(&mut self) -> Result<Selection> {
        (**self).select()
    }

    fn observe(&mut self, feedback: &[u8]) -> Result<()> {
        (**self).observe(feedback)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversarySpec {
    IidBernoulli {
        p: Vec<f64>,
    },
    /// `p_before` for rounds `< switch_round` (0-based), `p_after` from then on.
    Switching {
        p_before: Vec<f64>,
        p_after: Vec<f64>,
        switch_round: usize,
    },
    FixedSequence {
        sequence: Vec<Vec<u8>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Every object relevant with probability 1/2.
    Uniform,
    /// `p_i = 0.8 - 0.15 (i - 1)`, floored at 0.1.
    Gap,
    /// `(0.9, 0.5 + eps, 0.5 - eps, 0.1, ...)` with `eps = T^(-1/3)`.
    HardSl,
}

impl Preset {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "uniform" => Some(Preset::Uniform),
            "gap" => Some(Preset::Gap),
            "hard-sl" => Some(Preset::HardSl),
            _ => None,
        }
    }

    pub fn probabilities(self, m: usize, horizon: usize) -> Vec<f64> {
        match self {
            Preset::Uniform => vec![0.5; m],
            Preset::Gap => (0..m).map(|i| (0.8 - 0.15 * i as f64).max(0.1)).collect(),
            Preset::HardSl => {
                let eps = (horizon.max(1) as f64).powf(-1.0 / 3.0);
                let mut p = vec![0.9, 0.5 + eps, 0.5 - eps];
                p.resize(m.max(3), 0.1);
                p.truncate(m);
                p
            }
        }
    }
}

/// A preset (resolved per horizon) or an explicit specification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AdversarySource {
    Preset { preset: Preset },
    Spec(AdversarySpec),
}

impl AdversarySource {
    pub fn resolve(&self, m: usize, horizon: usize) -> AdversarySpec {
        match self {
            AdversarySource::Preset { preset } => AdversarySpec::IidBernoulli {
                p: preset.probabilities(m, horizon),
            },
            AdversarySource::Spec(s) => s.clone(),
        }
    }
}

fn check_probs(p: &[f64], m: usize) -> Result<()> {
    if p.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: p.len(),
        });
    }
    match p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        Some(&bad) => Err(Error::Probability(bad)),
        None => Ok(()),
    }
}

fn draw<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> RelevanceVector {
    let bits = p.iter().map(|&pi| u8::from(rng.gen::<f64>() < pi)).collect();
    RelevanceVector::new(bits).expect("binary by construction")
}

/// The whole outcome sequence, drawn before any learner acts.
pub fn generate_outcomes<R: Rng + ?Sized>(
    spec: &AdversarySpec,
    m: usize,
    horizon: usize,
    rng: &mut R,
) -> Result<Vec<RelevanceVector>> {
    match spec {
        AdversarySpec::IidBernoulli { p } => {
            check_probs(p, m)?;
            Ok((0..horizon).map(|_| draw(p, rng)).collect())
        }
        AdversarySpec::Switching {
            p_before,
            p_after,
            switch_round,
        } => {
            check_probs(p_before, m)?;
            check_probs(p_after, m)?;
            Ok((0..horizon)
                .map(|t| draw(if t < *switch_round { p_before } else { p_after }, rng))
                .collect())
        }
        AdversarySpec::FixedSequence { sequence } => {
            if sequence.len() < horizon {
                return Err(Error::InvalidAdversary(format!(
                    "fixed sequence has {} rounds, horizon is {horizon}",
                    sequence.len()
                )));
            }
            sequence[..horizon]
                .iter()
                .map(|bits| {
                    if bits.len() != m {
                        return Err(Error::DimensionMismatch {
                            expected: m,
                            actual: bits.len(),
                        });
                    }
                    RelevanceVector::new(bits.clone())
                })
                .collect()
        }
    }
}

/// SHA-256 of the outcome bits, for obliviousness checks.
pub fn outcomes_digest(outcomes: &[RelevanceVector]) -> String {
    let mut h = Sha256::new();
    for r in outcomes {
        h.update(r.bits());
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub label: usize,
    pub loss: f64,
    /// Revealed bits as a symbol index, first revealed object most significant.
    pub feedback: usize,
    pub cum_regret: f64,
}

#[derive(Clone, Debug)]
pub struct RegretTrace {
    pub measure: MeasureSpec,
    pub m: usize,
    pub k: usize,
    pub rows: Vec<TraceRow>,
    pub learner_loss: f64,
    pub comparator: Permutation,
    pub comparator_loss: f64,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.learner_loss - self.comparator_loss
    }

    /// `t,sampled_class,realized_loss,feedback_bit,cum_regret`, no preamble.
    pub fn csv_body(&self) -> String {
        let mut out = String::from("t,sampled_class,realized_loss,feedback_bit,cum_regret\n");
        for r in &self.rows {
            let bits: String = crate::game::symbol_bits(r.feedback, self.k)
                .iter()
                .map(|b| char::from(b'0' + b))
                .collect();
            let _ = writeln!(out, "{},{},{},{},{}", r.t, r.label, r.loss, bits, r.cum_regret);
        }
        out
    }
}

/// Runs the learner over the outcomes. Losses use the full relevance vector;
/// the learner receives only the top-k bits.
pub fn play_game<L: Learner + ?Sized>(
    learner: &mut L,
    measure: MeasureSpec,
    m: usize,
    k: usize,
    outcomes: &[RelevanceVector],
) -> Result<RegretTrace> {
    measure.validate(m)?;
    if k == 0 || k > m {
        return Err(Error::InvalidDepth { m, k });
    }
    let mut stats = CumulativeStats::new(m);
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut total = 0.0;
    let mut feedback = vec![0u8; k];
    for (t, r) in outcomes.iter().enumerate() {
        if r.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: r.len(),
            });
        }
        let sel = learner.select()?;
        if sel.ranking.len() != m {
            return Err(Error::InvalidAction(format!("ranking of length {} for m = {m}", sel.ranking.len())));
        }
        for (rank, slot) in feedback.iter_mut().enumerate() {
            *slot = r.get(sel.ranking.object_at(rank));
        }
        learner.observe(&feedback)?;
        let loss = loss_f64(measure, &sel.ranking, r.bits());
        total += loss;
        stats.push(r.bits());
        let (_, best) = stats.best_total_f64(measure);
        rows.push(TraceRow {
            t: t + 1,
            label: sel.label,
            loss,
            feedback: feedback_symbol(&sel.ranking, r.bits(), k),
            cum_regret: total - best,
        });
    }
    let (comparator, comparator_loss) = stats.best_total_f64(measure);
    Ok(RegretTrace {
        measure,
        m,
        k,
        rows,
        learner_loss: total,
        comparator,
        comparator_loss,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Nw2,
    ExploreExploit,
    FullInfoFtl,
}

impl LearnerKind {
    /// NW2 for precision@n under top-1 feedback, FTL under full feedback,
    /// explore-then-commit otherwise.
    pub fn default_for(measure: MeasureSpec, m: usize, k: usize) -> Self {
        if measure.kind == MeasureKind::NegPn && k == 1 && measure.cutoff() < m {
            LearnerKind::Nw2
        } else if k == m {
            LearnerKind::FullInfoFtl
        } else {
            LearnerKind::ExploreExploit
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub measure: MeasureSpec,
    pub m: usize,
    pub k: usize,
    pub learner: LearnerKind,
    pub adversary: AdversarySource,
    pub horizon: usize,
    pub reps: usize,
    pub seed: u64,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub exploration: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.measure.validate(self.m)?;
        if self.k == 0 || self.k > self.m {
            return Err(Error::InvalidDepth { m: self.m, k: self.k });
        }
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if self.learner == LearnerKind::Nw2 && (self.measure.kind != MeasureKind::NegPn || self.k != 1) {
            return Err(Error::InvalidParameter(
                "the NW2 learner runs precision@n with top-1 feedback".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// First line of every output file.
    pub fn preamble(&self) -> String {
        format!("# fingerprint={} config={}\n", self.fingerprint(), self.to_json())
    }

    fn make_learner(&self, horizon: usize, seed: u64) -> Result<Box<dyn Learner + Send>> {
        match self.learner {
            LearnerKind::Nw2 => Ok(Box::new(Nw2Learner::new(&LearnerConfig {
                m: self.m,
                n: self.measure.cutoff(),
                horizon,
                eta: self.eta,
                gamma: self.gamma,
                seed,
            })?)),
            LearnerKind::ExploreExploit => make_baseline(
                BaselineKind::ExploreExploit,
                self.measure,
                self.m,
                self.k,
                horizon,
                self.exploration,
            ),
            LearnerKind::FullInfoFtl => {
                make_baseline(BaselineKind::FullInfoFtl, self.measure, self.m, self.k, horizon, None)
            }
        }
    }

    /// One episode on stream `stream` of the master seed: the outcome
    /// sequence and the learner seed both derive from it.
    pub fn run_episode(&self, horizon: usize, stream: u64) -> Result<RegretTrace> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let learner_seed = rng.next_u64();
        let outcomes = generate_outcomes(&self.adversary.resolve(self.m, horizon), self.m, horizon, &mut rng)?;
        let mut learner = self.make_learner(horizon, learner_seed)?;
        play_game(&mut learner, self.measure, self.m, self.k, &outcomes)
    }
}

/// `horizon / 2^j` for `j = 6..=0`, positive and strictly increasing.
pub fn sweep_grid(horizon: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = (0..=6).rev().map(|j| horizon >> j).filter(|&t| t > 0).collect();
    grid.dedup();
    grid
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub horizon: usize,
    pub mean_regret: f64,
    pub stderr: f64,
    pub reps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points_used: usize,
}

/// Least squares of `ln y` on `ln x`; points with `y <= 0` are dropped.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerFit> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| {
            let keep = *y > 0.0 && *x > 0.0;
            if !keep {
                log::warn!("dropping non-positive point ({x}, {y}) from the log-log fit");
            }
            keep
        })
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if used.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need two positive points for a slope, have {}",
            used.len()
        )));
    }
    let n = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = used.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = used.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(PowerFit {
        slope,
        intercept,
        r2,
        points_used: used.len(),
    })
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub points: Vec<SweepPoint>,
    pub fit: PowerFit,
}

impl SweepResult {
    pub fn csv_body(&self) -> String {
        let mut out = String::from("T,mean_regret,stderr,reps\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{},{}", p.horizon, p.mean_regret, p.stderr, p.reps);
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "slope": self.fit.slope,
            "intercept": self.fit.intercept,
            "r2": self.fit.r2,
            "points_used": self.fit.points_used,
            "fingerprint": self.config.fingerprint(),
            "config": self.config,
        })
    }
}

pub fn run_sweep_on_grid(config: &ExperimentConfig, grid: &[usize]) -> Result<SweepResult> {
    config.validate()?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("sweep grid must be strictly increasing".into()));
    }
    let reps = config.reps;
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..reps).map(move |r| (g, r))).collect();
    let regrets = jobs
        .par_iter()
        .map(|&(g, r)| {
            config
                .run_episode(grid[g], (g * reps + r) as u64)
                .map(|t| t.final_regret())
        })
        .collect::<Result<Vec<f64>>>()?;
    let points: Vec<SweepPoint> = grid
        .iter()
        .enumerate()
        .map(|(g, &horizon)| {
            let xs = &regrets[g * reps..(g + 1) * reps];
            let mean = xs.iter().sum::<f64>() / reps as f64;
            let stderr = if reps > 1 {
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
                (var / reps as f64).sqrt()
            } else {
                0.0
            };
            SweepPoint {
                horizon,
                mean_regret: mean,
                stderr,
                reps,
            }
        })
        .collect();
    let fit = fit_power_law(&points.iter().map(|p| (p.horizon as f64, p.mean_regret)).collect::<Vec<_>>())?;
    Ok(SweepResult {
        config: config.clone(),
        points,
        fit,
    })
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep_on_grid(config, &sweep_grid(config.horizon))
}
