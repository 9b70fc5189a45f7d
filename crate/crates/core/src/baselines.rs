//! Comparison learners: explore-then-commit for any feedback depth, and
//! follow-the-leader under full feedback.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::{CumulativeStats, MeasureSpec, Permutation};
use crate::sim::{Learner, Selection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    ExploreExploit,
    FullInfoFtl,
}

/// Default exploration length `ceil(T^(2/3))`.
pub fn default_exploration(horizon: usize) -> usize {
    let e = (horizon as f64).powf(2.0 / 3.0).ceil() as usize;
    // guard the float cube root against landing one above an exact power
    let e = if e > 1 && (e - 1).pow(3) >= horizon.pow(2) { e - 1 } else { e };
    e.min(horizon)
}

/// Position of a ranking in the lexicographic order of all rankings.
pub fn lex_index(sigma: &Permutation) -> usize {
    let m = sigma.len();
    let mut used = vec![false; m];
    let mut index = 0;
    let mut fact: usize = (1..m).product();
    for r in 0..m {
        let obj = sigma.object_at(r);
        let smaller = (0..obj).filter(|&o| !used[o]).count();
        index += smaller * fact;
        used[obj] = true;
        if r + 1 < m {
            fact /= m - 1 - r;
        }
    }
    index
}

/// Round-robin exploration, then commits to the ranking sorted by empirical relevance means.
#[derive(Clone, Debug)]
pub struct ExploreExploit {
    m: usize,
    k: usize,
    exploration: usize,
    t: usize,
    relevant: Vec<u64>,
    observed: Vec<u64>,
    committed: Option<Permutation>,
    last: Option<Permutation>,
}

impl ExploreExploit {
    pub fn new(m: usize, k: usize, exploration: usize, horizon: usize) -> Result<Self> {
        if k == 0 || k > m {
            return Err(Error::InvalidDepth { m, k });
        }
        if exploration > horizon {
            return Err(Error::InvalidParameter(format!(
                "exploration rounds {exploration} exceed the horizon {horizon}"
            )));
        }
        Ok(Self {
            m,
            k,
            exploration,
            t: 0,
            relevant: vec![0; m],
            observed: vec![0; m],
            committed: None,
            last: None,
        })
    }

    pub fn exploring(&self) -> bool {
        self.t < self.exploration
    }

    /// Times each object has been in an observed slot.
    pub fn observation_counts(&self) -> &[u64] {
        &self.observed
    }

    pub fn committed(&self) -> Option<&Permutation> {
        self.committed.as_ref()
    }

    fn commit(&self) -> Permutation {
        let means: Vec<f64> = self
            .relevant
            .iter()
            .zip(&self.observed)
            .map(|(&r, &o)| if o == 0 { 0.0 } else { r as f64 / o as f64 })
            .collect();
        Permutation::sorted_by_scores(&means)
    }
}

impl Learner for ExploreExploit {
    fn select(&mut self) -> Result<Selection> {
        let sigma = if self.exploring() {
            // rotate by k so the observed slots sweep the objects cyclically
            let shift = self.t * self.k;
            Permutation::new((0..self.m).map(|r| (shift + r) % self.m).collect())?
        } else {
            if self.committed.is_none() {
                self.committed = Some(self.commit());
            }
            self.committed.clone().expect("set above")
        };
        self.last = Some(sigma.clone());
        Ok(Selection {
            label: lex_index(&sigma),
            ranking: sigma,
        })
    }

    fn observe(&mut self, feedback: &[u8]) -> Result<()> {
        let sigma = self
            .last
            .take()
            .ok_or_else(|| Error::InvalidAction("observe called before select".into()))?;
        if feedback.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                actual: feedback.len(),
            });
        }
        if self.exploring() {
            for (r, &bit) in feedback.iter().enumerate() {
                let obj = sigma.object_at(r);
                self.observed[obj] += 1;
                self.relevant[obj] += bit as u64;
            }
        }
        self.t += 1;
        Ok(())
    }
}

/// Plays the hindsight-best ranking of the observed prefix.
#[derive(Clone, Debug)]
pub struct FullInfoFtl {
    stats: CumulativeStats,
    last: Option<Permutation>,
}

impl FullInfoFtl {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if k != m {
            return Err(Error::FullInfoRequiresFullFeedback { m, k });
        }
        Ok(Self {
            stats: CumulativeStats::new(m),
            last: None,
        })
    }
}

impl Learner for FullInfoFtl {
    fn select(&mut self) -> Result<Selection> {
        let sigma = self.stats.best_ranking();
        self.last = Some(sigma.clone());
        Ok(Selection {
            label: lex_index(&sigma),
            ranking: sigma,
        })
    }

    fn observe(&mut self, feedback: &[u8]) -> Result<()> {
        let sigma = self
            .last
            .take()
            .ok_or_else(|| Error::InvalidAction("observe called before select".into()))?;
        let mut bits = vec![0u8; sigma.len()];
        for (r, &b) in feedback.iter().enumerate() {
            bits[sigma.object_at(r)] = b;
        }
        self.stats.push(&bits);
        Ok(())
    }
}

/// Builds a baseline for `measure`; `exploration` overrides the default length.
pub fn make_baseline(
    kind: BaselineKind,
    measure: MeasureSpec,
    m: usize,
    k: usize,
    horizon: usize,
    exploration: Option<usize>,
) -> Result<Box<dyn Learner + Send>> {
    measure.validate(m)?;
    Ok(match kind {
        BaselineKind::ExploreExploit => Box::new(ExploreExploit::new(
            m,
            k,
            exploration.unwrap_or_else(|| default_exploration(horizon)),
            horizon,
        )?),
        BaselineKind::FullInfoFtl => Box::new(FullInfoFtl::new(m, k)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exploration_length() {
        assert_eq!(default_exploration(1000), 100);
        assert_eq!(default_exploration(1 << 15), 1 << 10);
        assert_eq!(default_exploration(1 << 14), 646);
        assert_eq!(default_exploration(1), 1);
    }

    #[test]
    fn lex_indices() {
        let all = Permutation::all(4);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(lex_index(p), i);
        }
    }

    #[test]
    fn coverage_during_exploration() {
        let (m, k, e) = (5, 2, 103);
        let mut l = ExploreExploit::new(m, k, e, 200).unwrap();
        for _ in 0..e {
            l.select().unwrap();
            l.observe(&vec![1; k]).unwrap();
        }
        let floor = (e * k / m) as u64;
        assert!(l.observation_counts().iter().all(|&c| c >= floor));
    }

    #[test]
    fn ftl_requires_full_feedback() {
        assert!(matches!(FullInfoFtl::new(3, 2), Err(Error::FullInfoRequiresFullFeedback { .. })));
    }
}
