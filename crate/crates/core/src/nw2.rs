//! Neighborhood-watch learner on the reduced precision@n game with top-1
//! feedback.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::{mix_and_sample, stationarity_residual, stationary_distribution};
use crate::ranking::{MeasureSpec, RelevanceVector};
use crate::reduction::{all_tables, build_reduced_game, build_v_table, compute_v, ReducedGame};
use crate::sim::{play_game, Learner, RegretTrace, Selection};

#[derive(Clone, Debug, Serialize)]
pub struct LearnerConfig {
    pub m: usize,
    pub n: usize,
    pub horizon: usize,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub seed: u64,
}

impl LearnerConfig {
    pub fn new(m: usize, n: usize, horizon: usize, seed: u64) -> Self {
        Self {
            m,
            n,
            horizon,
            eta: None,
            gamma: None,
            seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Params {
    pub eta: f64,
    pub gamma: f64,
    /// `|𝒞|`
    pub k: usize,
    pub v: f64,
}

/// Defaults `eta = sqrt(ln K / T) / V` and `gamma = eta K V`, either overridable.
pub fn resolve_params(config: &LearnerConfig, k: usize, v: f64) -> Result<Params> {
    if config.horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    let ln_k = (k as f64).ln();
    let eta = config
        .eta
        .unwrap_or_else(|| (ln_k / config.horizon as f64).sqrt() / v);
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    let gamma = config.gamma.unwrap_or(eta * k as f64 * v);
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    if gamma >= 1.0 {
        let kv = k as f64 * v;
        return Err(Error::GammaTooLarge {
            gamma,
            horizon: config.horizon,
            min_horizon: (kv * kv * ln_k).floor() as usize + 1,
        });
    }
    Ok(Params { eta, gamma, k, v })
}

/// One nonzero entry of `v^{ak}`: reduced action and its two coefficients.
type Support = Vec<(usize, [f64; 2])>;

#[derive(Clone)]
pub struct Nw2Learner {
    game: ReducedGame,
    params: Params,
    rng: ChaCha8Rng,
    /// `N_k ∩ 𝒜` as classes, including `k` itself.
    in_neighbors: Vec<Vec<usize>>,
    /// `v^{ak}` support, indexed like `in_neighbors`.
    tables: Vec<Vec<Support>>,
    /// `cum_z[k][a]`, dense over classes.
    cum_z: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
    p_tilde: Vec<f64>,
    p: Vec<f64>,
    pending: Option<usize>,
    round: usize,
    max_residual: f64,
}

impl Nw2Learner {
    pub fn new(config: &LearnerConfig) -> Result<Self> {
        let game = build_reduced_game(config.m, config.n)?;
        let v = compute_v(&all_tables(&game));
        let v = num_traits::ToPrimitive::to_f64(&v).unwrap_or(1.0).max(f64::MIN_POSITIVE);
        let params = resolve_params(config, game.num_actions(), v)?;
        let classes = game.num_classes();
        let mut in_neighbors = Vec::with_capacity(classes);
        let mut tables = Vec::with_capacity(classes);
        for k in 0..classes {
            let mut nb = game.class_neighbors[k].clone();
            nb.push(k);
            nb.sort_unstable();
            let supports = nb
                .iter()
                .map(|&a| {
                    let t = build_v_table(&game, a, k).expect("neighbors");
                    t.support
                        .keys()
                        .map(|&b| (b, [t.value_f64(b, 0), t.value_f64(b, 1)]))
                        .collect()
                })
                .collect();
            in_neighbors.push(nb);
            tables.push(supports);
        }
        let ka = game.num_actions();
        Ok(Self {
            cum_z: vec![vec![0.0; classes]; classes],
            q: Vec::new(),
            p_tilde: vec![0.0; ka],
            p: vec![1.0 / ka as f64; ka],
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            game,
            params,
            in_neighbors,
            tables,
            pending: None,
            round: 0,
            max_residual: 0.0,
        })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn game(&self) -> &ReducedGame {
        &self.game
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn q(&self) -> &[Vec<f64>] {
        &self.q
    }

    pub fn p_tilde(&self) -> &[f64] {
        &self.p_tilde
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn cum_z(&self, k: usize, a: usize) -> f64 {
        self.cum_z[k][a]
    }

    pub fn set_cum_z(&mut self, k: usize, a: usize, value: f64) {
        self.cum_z[k][a] = value;
    }

    /// Largest stationarity residual seen over all rounds so far.
    pub fn max_stationarity_residual(&self) -> f64 {
        self.max_residual
    }

    /// Exponential weights on representative rows, uniform over `𝒜` on the others.
    pub fn compute_q(&self) -> Vec<Vec<f64>> {
        compute_q(&self.game, &self.in_neighbors, &self.cum_z, self.params.eta)
    }

    /// Adds `Z^ - beta` to every `cum_z[k][a]` after playing `action` and seeing `symbol`.
    pub fn update_estimates(&mut self, action: usize, symbol: usize) {
        let eta_v2 = self.params.eta * self.params.v * self.params.v;
        let pa = self.p[action];
        for k in 0..self.game.num_classes() {
            let pk = self.p_tilde[self.game.representative(k)];
            if pk == 0.0 {
                continue;
            }
            let pk2 = pk * pk;
            let own: f64 = self.game.class_actions(k).map(|b| pk2 / self.p[b]).sum();
            for (idx, &a) in self.in_neighbors[k].iter().enumerate() {
                let coeff = self.tables[k][idx]
                    .iter()
                    .find(|(b, _)| *b == action)
                    .map_or(0.0, |(_, c)| c[symbol]);
                let z_hat = pk * coeff / pa;
                let mut beta_sum = own;
                if a != k {
                    beta_sum += self.game.class_actions(a).map(|b| pk2 / self.p[b]).sum::<f64>();
                }
                self.cum_z[k][a] += z_hat - eta_v2 * beta_sum;
            }
        }
    }
}

pub fn compute_q(game: &ReducedGame, in_neighbors: &[Vec<usize>], cum_z: &[Vec<f64>], eta: f64) -> Vec<Vec<f64>> {
    let ka = game.num_actions();
    let reps = game.representatives();
    let uniform = 1.0 / reps.len() as f64;
    let mut q = vec![vec![0.0; ka]; ka];
    for (row, out) in q.iter_mut().enumerate() {
        if game.is_representative(row) {
            let k = game.actions[row].class;
            let scores: Vec<f64> = in_neighbors[k].iter().map(|&a| -eta * cum_z[k][a]).collect();
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
            let total: f64 = w.iter().sum();
            for (&a, wi) in in_neighbors[k].iter().zip(w) {
                out[game.representative(a)] = wi / total;
            }
        } else {
            for &r in &reps {
                out[r] = uniform;
            }
        }
    }
    q
}

impl Learner for Nw2Learner {
    fn select(&mut self) -> Result<Selection> {
        self.q = self.compute_q();
        self.p_tilde = stationary_distribution(&self.q)?;
        self.max_residual = self.max_residual.max(stationarity_residual(&self.q, &self.p_tilde));
        let (p, action) = mix_and_sample(&self.p_tilde, self.params.gamma, &mut self.rng)?;
        self.p = p;
        self.pending = Some(action);
        Ok(Selection {
            ranking: self.game.ranking(action),
            label: action,
        })
    }

    fn observe(&mut self, feedback: &[u8]) -> Result<()> {
        let action = self
            .pending
            .take()
            .ok_or_else(|| Error::InvalidAction("observe called before select".into()))?;
        let [bit] = feedback else {
            return Err(Error::InvalidParameter(format!(
                "expected one feedback bit, got {}",
                feedback.len()
            )));
        };
        self.update_estimates(action, *bit as usize);
        self.round += 1;
        Ok(())
    }
}

/// Plays the learner against a fixed outcome sequence (length = horizon).
pub fn run_episode(config: &LearnerConfig, outcomes: &[RelevanceVector]) -> Result<(RegretTrace, f64)> {
    let mut learner = Nw2Learner::new(config)?;
    let trace = play_game(&mut learner, MeasureSpec::pn(config.n), config.m, 1, outcomes)?;
    Ok((trace, learner.max_stationarity_residual()))
}
