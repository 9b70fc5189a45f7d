//! Reduced precision@n game under top-1 feedback: actions are identified by
//! their top-n set and the object shown first.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::analysis::{EstimatorFunction, EstimatorValues};
use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::ranking::{rat, MeasureKind, Permutation, Rational};

/// An n-subset of the objects (0-based, ascending).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionClass {
    top_set: Vec<usize>,
}

impl ActionClass {
    pub fn new(mut top_set: Vec<usize>) -> Self {
        top_set.sort_unstable();
        Self { top_set }
    }

    pub fn top_set(&self) -> &[usize] {
        &self.top_set
    }

    pub fn contains(&self, object: usize) -> bool {
        self.top_set.binary_search(&object).is_ok()
    }

    pub fn complement(&self, m: usize) -> Vec<usize> {
        (0..m).filter(|&o| !self.contains(o)).collect()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.top_set.iter().map(|o| o + 1).collect()
    }
}

impl fmt::Display for ActionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.one_based().iter().join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReducedAction {
    pub class: usize,
    pub top_object: usize,
}

/// `𝒞`, `𝒜`, `𝒟` and the class neighbor graph.
///
/// `𝒞` is ordered class-major with top objects ascending, so the
/// representative of class `c` (smallest top object) is `c * n`.
#[derive(Clone, Debug)]
pub struct ReducedGame {
    pub m: usize,
    pub n: usize,
    pub classes: Vec<ActionClass>,
    pub actions: Vec<ReducedAction>,
    /// Neighbor classes of each class, ascending.
    pub class_neighbors: Vec<Vec<usize>>,
}

pub fn build_reduced_game(m: usize, n: usize) -> Result<ReducedGame> {
    if n == 0 || n >= m {
        return Err(Error::InvalidCutoff { m, n });
    }
    let classes: Vec<ActionClass> = (0..m).combinations(n).map(ActionClass::new).collect();
    let actions = classes
        .iter()
        .enumerate()
        .flat_map(|(c, class)| {
            class
                .top_set
                .iter()
                .map(move |&top_object| ReducedAction { class: c, top_object })
        })
        .collect();
    let class_neighbors = (0..classes.len())
        .map(|c| {
            (0..classes.len())
                .filter(|&d| swap_pair_of(&classes[c], &classes[d]).is_some())
                .collect()
        })
        .collect();
    Ok(ReducedGame {
        m,
        n,
        classes,
        actions,
        class_neighbors,
    })
}

/// `(a, b)` with `A_c \ A_d = {a}` and `A_d \ A_c = {b}`.
fn swap_pair_of(c: &ActionClass, d: &ActionClass) -> Option<(usize, usize)> {
    let only_c: Vec<usize> = c.top_set.iter().copied().filter(|&o| !d.contains(o)).collect();
    let only_d: Vec<usize> = d.top_set.iter().copied().filter(|&o| !c.contains(o)).collect();
    match (only_c.as_slice(), only_d.as_slice()) {
        ([a], [b]) => Some((*a, *b)),
        _ => None,
    }
}

impl ReducedGame {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// `|𝒞|`
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn representative(&self, class: usize) -> usize {
        class * self.n
    }

    pub fn representatives(&self) -> Vec<usize> {
        (0..self.num_classes()).map(|c| self.representative(c)).collect()
    }

    pub fn is_representative(&self, action: usize) -> bool {
        action % self.n == 0
    }

    /// Index in `𝒞` of `(class, top_object)`.
    pub fn action_index(&self, class: usize, top_object: usize) -> Option<usize> {
        let pos = self.classes[class].top_set.binary_search(&top_object).ok()?;
        Some(class * self.n + pos)
    }

    pub fn class_actions(&self, class: usize) -> std::ops::Range<usize> {
        class * self.n..(class + 1) * self.n
    }

    pub fn swap_pair(&self, c: usize, d: usize) -> Option<(usize, usize)> {
        swap_pair_of(&self.classes[c], &self.classes[d])
    }

    pub fn are_neighbors(&self, c: usize, d: usize) -> bool {
        self.class_neighbors[c].binary_search(&d).is_ok()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.num_classes())
            .flat_map(|c| self.class_neighbors[c].iter().filter(move |&&d| d > c).map(move |&d| (c, d)))
            .collect()
    }

    /// A full ranking realizing the reduced action: the top object, the rest
    /// of the top set ascending, then the complement ascending.
    pub fn ranking(&self, action: usize) -> Permutation {
        let ra = self.actions[action];
        let class = &self.classes[ra.class];
        let mut order = vec![ra.top_object];
        order.extend(class.top_set.iter().copied().filter(|&o| o != ra.top_object));
        order.extend(class.complement(self.m));
        Permutation::new(order).expect("valid by construction")
    }

    /// Negated precision@n of the class on relevance bits.
    pub fn class_loss(&self, class: usize, bits: &[u8]) -> i64 {
        -(self.classes[class].top_set.iter().map(|&o| bits[o] as i64).sum::<i64>())
    }

    pub fn loss(&self, action: usize, bits: &[u8]) -> i64 {
        self.class_loss(self.actions[action].class, bits)
    }

    /// Top-1 feedback symbol.
    pub fn feedback(&self, action: usize, bits: &[u8]) -> usize {
        bits[self.actions[action].top_object] as usize
    }

    /// Index of the class with the given top set, if any.
    pub fn class_of_set(&self, set: &[usize]) -> Option<usize> {
        let key = ActionClass::new(set.to_vec());
        self.classes.binary_search(&key).ok()
    }

    /// Whether the class graph is connected (breadth-first search).
    pub fn is_connected(&self) -> bool {
        let k = self.num_classes();
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for &d in &self.class_neighbors[c] {
                if !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// `v^{cd}`: coefficients per reduced action for symbols 0 and 1, with
/// `sum_b v(b, R(top_b)) = L_c(R) - L_d(R)` for every outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorTable {
    pub class_c: usize,
    pub class_d: usize,
    pub swap_pair: Option<(usize, usize)>,
    pub support: BTreeMap<usize, [Rational; 2]>,
}

pub fn build_v_table(game: &ReducedGame, c: usize, d: usize) -> Result<EstimatorTable> {
    let k = game.num_classes();
    for x in [c, d] {
        if x >= k {
            return Err(Error::ActionIndex { index: x, count: k });
        }
    }
    if c == d {
        return Ok(EstimatorTable {
            class_c: c,
            class_d: d,
            swap_pair: None,
            support: BTreeMap::new(),
        });
    }
    let (a, b) = game.swap_pair(c, d).ok_or(Error::NotNeighbors(c, d))?;
    // L_c - L_d = R(b) - R(a): read R(a) from (c, top a) and R(b) from (d, top b).
    let mut support = BTreeMap::new();
    support.insert(
        game.action_index(c, a).expect("a in A_c"),
        [Rational::zero(), -Rational::one()],
    );
    support.insert(game.action_index(d, b).expect("b in A_d"), [Rational::zero(), Rational::one()]);
    Ok(EstimatorTable {
        class_c: c,
        class_d: d,
        swap_pair: Some((a, b)),
        support,
    })
}

impl EstimatorTable {
    pub fn value(&self, action: usize, symbol: usize) -> Rational {
        self.support
            .get(&action)
            .map_or_else(Rational::zero, |v| v[symbol].clone())
    }

    pub fn value_f64(&self, action: usize, symbol: usize) -> f64 {
        self.support
            .get(&action)
            .map_or(0.0, |v| v[symbol].to_f64().unwrap_or(f64::NAN))
    }

    pub fn sup_norm(&self) -> Rational {
        self.support
            .values()
            .flat_map(|v| v.iter())
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Checks the defining identity on all `2^m` outcomes in exact arithmetic.
    pub fn satisfies_identity(&self, game: &ReducedGame) -> bool {
        (0..1usize << game.m).all(|idx| {
            let bits: Vec<u8> = (0..game.m).map(|i| ((idx >> (game.m - 1 - i)) & 1) as u8).collect();
            let mut sum = Rational::zero();
            for (&b, coeffs) in &self.support {
                sum += &coeffs[game.feedback(b, &bits)];
            }
            sum == rat(game.class_loss(self.class_c, &bits) - game.class_loss(self.class_d, &bits))
        })
    }

    /// The same table on the unreduced game: each reduced action becomes the
    /// ranking [`ReducedGame::ranking`] picks for it.
    pub fn lift(&self, reduced: &ReducedGame, full: &GameSpec) -> Result<EstimatorFunction> {
        check_full_game(reduced, full)?;
        let index = |action: usize| {
            full.action_index(&reduced.ranking(action))
                .expect("full game has every ranking")
        };
        let values = self
            .support
            .iter()
            .map(|(&b, coeffs)| (index(b), coeffs.to_vec()))
            .collect();
        Ok(EstimatorFunction {
            pair: (
                index(reduced.representative(self.class_c)),
                index(reduced.representative(self.class_d)),
            ),
            values: EstimatorValues::Exact(values),
        })
    }
}

fn check_full_game(reduced: &ReducedGame, full: &GameSpec) -> Result<()> {
    if full.measure.kind != MeasureKind::NegPn || full.measure.cutoff() != reduced.n || full.m != reduced.m || full.k != 1 {
        return Err(Error::InvalidParameter(format!(
            "expected the precision@{} game on {} objects with top-1 feedback",
            reduced.n, reduced.m
        )));
    }
    Ok(())
}

/// Tables for every ordered neighbor pair `(c, d)`.
pub fn all_tables(game: &ReducedGame) -> Vec<EstimatorTable> {
    let mut out = Vec::new();
    for c in 0..game.num_classes() {
        for &d in &game.class_neighbors[c] {
            out.push(build_v_table(game, c, d).expect("neighbors by construction"));
        }
    }
    out
}

/// `V = max ||v^{cd}||_inf`.
pub fn compute_v(tables: &[EstimatorTable]) -> Rational {
    tables.iter().map(EstimatorTable::sup_norm).max().unwrap_or_else(Rational::zero)
}

#[derive(Clone, Debug, Serialize)]
pub struct PairGap {
    pub class_c: Vec<usize>,
    pub class_d: Vec<usize>,
    /// Expected relevances at the reference point of `c`'s cell: 1 on `A_c`, 1/2 elsewhere.
    #[serde(serialize_with = "ser_rationals")]
    pub reference_relevance: Vec<Rational>,
    /// Expected loss of `d` minus that of `c` at the reference point.
    #[serde(serialize_with = "ser_rational")]
    pub gap: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub m: usize,
    pub n: usize,
    pub pairs: Vec<PairGap>,
    pub inverse_epsilon: usize,
}

impl GapReport {
    pub fn min_gap(&self) -> Option<&Rational> {
        self.pairs.iter().map(|p| &p.gap).min()
    }
}

pub fn gap_report(game: &ReducedGame) -> GapReport {
    let half = Rational::new(1.into(), 2.into());
    let mut pairs = Vec::new();
    for c in 0..game.num_classes() {
        let point: Vec<Rational> = (0..game.m)
            .map(|o| if game.classes[c].contains(o) { Rational::one() } else { half.clone() })
            .collect();
        let expected = |class: usize| -> Rational {
            -game.classes[class]
                .top_set
                .iter()
                .fold(Rational::zero(), |acc, &o| acc + &point[o])
        };
        for &d in &game.class_neighbors[c] {
            pairs.push(PairGap {
                class_c: game.classes[c].one_based(),
                class_d: game.classes[d].one_based(),
                gap: expected(d) - expected(c),
                reference_relevance: point.clone(),
            });
        }
    }
    GapReport {
        m: game.m,
        n: game.n,
        pairs,
        inverse_epsilon: 4 * game.m,
    }
}

fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_rationals<S: serde::Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

#[derive(Serialize)]
struct TableEntryJson {
    top_object: usize,
    class: Vec<usize>,
    coeff_s0: String,
    coeff_s1: String,
}

#[derive(Serialize)]
struct TableJson {
    class_c: Vec<usize>,
    class_d: Vec<usize>,
    swap_pair: Option<(usize, usize)>,
    entries: Vec<TableEntryJson>,
}

/// One table per unordered neighbor pair, objects 1-based.
pub fn tables_json(game: &ReducedGame) -> serde_json::Value {
    let tables: Vec<TableJson> = game
        .edges()
        .into_iter()
        .map(|(c, d)| {
            let t = build_v_table(game, c, d).expect("edge");
            TableJson {
                class_c: game.classes[c].one_based(),
                class_d: game.classes[d].one_based(),
                swap_pair: t.swap_pair.map(|(a, b)| (a + 1, b + 1)),
                entries: t
                    .support
                    .iter()
                    .map(|(&b, v)| {
                        let ra = game.actions[b];
                        TableEntryJson {
                            top_object: ra.top_object + 1,
                            class: game.classes[ra.class].one_based(),
                            coeff_s0: v[0].to_string(),
                            coeff_s1: v[1].to_string(),
                        }
                    })
                    .collect(),
            }
        })
        .collect();
    serde_json::json!({
        "m": game.m,
        "n": game.n,
        "v": compute_v(&all_tables(game)).to_string(),
        "tables": tables,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::build_game;
    use crate::ranking::MeasureSpec;

    #[test]
    fn sizes() {
        let g = build_reduced_game(3, 1).unwrap();
        assert_eq!((g.num_classes(), g.num_actions(), g.representatives().len()), (3, 3, 3));
        assert!(g.class_neighbors.iter().all(|nb| nb.len() == 2));

        let g = build_reduced_game(4, 2).unwrap();
        assert_eq!((g.num_classes(), g.num_actions()), (6, 12));
        assert!(g.class_neighbors.iter().all(|nb| nb.len() == 4));
        assert_eq!(g.edges().len(), 12);

        let g = build_reduced_game(2, 1).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);

        assert!(matches!(build_reduced_game(3, 3), Err(Error::InvalidCutoff { .. })));
        assert!(matches!(build_reduced_game(3, 0), Err(Error::InvalidCutoff { .. })));
    }

    #[test]
    fn table_example() {
        let g = build_reduced_game(3, 1).unwrap();
        let t = build_v_table(&g, 0, 1).unwrap();
        assert_eq!(t.value(0, 1), rat(-1));
        assert_eq!(t.value(1, 1), rat(1));
        assert_eq!(t.value(0, 0), rat(0));
        assert_eq!(t.value(2, 1), rat(0));
        assert!(t.satisfies_identity(&g));
        // R = (1,0,0): only the c-entry fires
        assert_eq!(t.value(0, 1) + t.value(1, 0), rat(-1));
        assert!(build_v_table(&g, 1, 1).unwrap().support.is_empty());
        assert_eq!(compute_v(&all_tables(&g)), rat(1));
    }

    #[test]
    fn non_neighbors_rejected() {
        let g = build_reduced_game(4, 2).unwrap();
        let c = g.class_of_set(&[0, 1]).unwrap();
        let d = g.class_of_set(&[2, 3]).unwrap();
        assert!(matches!(build_v_table(&g, c, d), Err(Error::NotNeighbors(..))));
    }

    #[test]
    fn lifted_table_holds_on_full_game() {
        let g = build_reduced_game(4, 2).unwrap();
        let full = build_game(MeasureSpec::pn(2), 4, 1).unwrap();
        for t in all_tables(&g) {
            let f = t.lift(&g, &full).unwrap();
            assert!(f.satisfies_identity(&full));
        }
    }

    #[test]
    fn gaps() {
        let g = build_reduced_game(3, 1).unwrap();
        let r = gap_report(&g);
        let half = Rational::new(1.into(), 2.into());
        assert!(r.pairs.iter().all(|p| p.gap == half));
        assert_eq!(r.pairs[0].reference_relevance, vec![rat(1), half.clone(), half]);
        assert_eq!(gap_report(&build_reduced_game(5, 2).unwrap()).inverse_epsilon, 20);
    }
}
