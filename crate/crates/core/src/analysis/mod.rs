//! Cell decomposition, action classification, neighbors and observability
//! for the ranking games.

pub mod closed_form;
pub mod geometry;
pub mod observability;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::ranking::{MeasureKind, Rational};

use geometry::{containing_groups, dimension_of, geometry_rows, group_faces, LossGroups};
pub use observability::{
    certificate_to_function, check_in_span, CertificateTerm, EstimatorFunction, EstimatorValues, Observability,
    ObservabilityCertificate, ObservabilityKind, SignalSpan, TermWeight,
};

/// Largest `m` at which `Auto` runs the exact LP geometry.
pub const EXACT_LP_MAX_OBJECTS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionLabel {
    Dominated,
    Degenerate,
    ParetoOptimal,
}

#[derive(Clone, Debug)]
pub struct CellDescription {
    pub action_index: usize,
    /// Rows `d` with `d·p <= 0` on the simplex.
    pub facet_inequalities: Vec<Vec<Rational>>,
    /// `-1` when the cell is empty.
    pub dimension: i64,
}

#[derive(Clone, Debug)]
pub struct ActionClassification {
    pub labels: Vec<ActionLabel>,
    /// Actions partitioned by equal loss vectors, in order of first member.
    pub duplicate_groups: Vec<Vec<usize>>,
}

impl ActionClassification {
    pub fn pareto_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == ActionLabel::ParetoOptimal).count()
    }

    pub fn is_pareto(&self, action: usize) -> bool {
        self.labels[action] == ActionLabel::ParetoOptimal
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Trivial,
    Easy,
    Hard,
    Hopeless,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Trivial => "trivial",
            Regime::Easy => "easy",
            Regime::Hard => "hard",
            Regime::Hopeless => "hopeless",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeighborMethod {
    /// Rational LP over every cell and pairwise intersection.
    Exact,
    /// Combinatorial predicates for the ranking measures.
    ClosedForm,
    /// `Exact` up to [`EXACT_LP_MAX_OBJECTS`], `ClosedForm` above.
    Auto,
}

impl NeighborMethod {
    fn resolve(self, game: &GameSpec) -> NeighborMethod {
        match self {
            NeighborMethod::Auto if game.m <= EXACT_LP_MAX_OBJECTS => NeighborMethod::Exact,
            NeighborMethod::Auto => NeighborMethod::ClosedForm,
            other => other,
        }
    }
}

fn groups_of(game: &GameSpec) -> LossGroups {
    LossGroups::new(&geometry_rows(game))
}

pub fn describe_cell(game: &GameSpec, action: usize) -> Result<CellDescription> {
    game.check_action(action)?;
    let groups = groups_of(game);
    let g = groups.group_of[action];
    let cell = groups.cell(g);
    Ok(CellDescription {
        action_index: action,
        dimension: dimension_of(&cell.analyze()),
        facet_inequalities: cell.rows().to_vec(),
    })
}

/// Dimension of the action's cell by exact LP.
pub fn cell_dimension(game: &GameSpec, action: usize) -> Result<i64> {
    Ok(describe_cell(game, action)?.dimension)
}

/// Groups with full-dimensional cells. Two distinct loss vectors cannot
/// share a full-dimensional cell, so these are exactly the Pareto groups.
fn label_groups(groups: &LossGroups, full: i64) -> Vec<ActionLabel> {
    group_faces(groups)
        .iter()
        .map(|f| match dimension_of(f) {
            -1 => ActionLabel::Dominated,
            d if d == full => ActionLabel::ParetoOptimal,
            _ => ActionLabel::Degenerate,
        })
        .collect()
}

pub fn classify_actions(game: &GameSpec) -> ActionClassification {
    let groups = groups_of(game);
    let group_labels = label_groups(&groups, game.num_outcomes() as i64 - 1);
    ActionClassification {
        labels: groups.group_of.iter().map(|&g| group_labels[g]).collect(),
        duplicate_groups: groups.members.clone(),
    }
}

/// Neighbor structure at the level of duplicate groups.
#[derive(Clone, Debug)]
pub struct GameStructure {
    pub classification: ActionClassification,
    /// `group_of[action]`
    pub group_of: Vec<usize>,
    /// Neighboring group pairs `(g, h)` with `g < h`, and the groups whose
    /// cells contain `C_g ∩ C_h`.
    pub neighbor_groups: Vec<((usize, usize), Vec<usize>)>,
}

impl GameStructure {
    pub fn compute(game: &GameSpec, method: NeighborMethod) -> Self {
        let groups = groups_of(game);
        let full = game.num_outcomes() as i64 - 1;
        match method.resolve(game) {
            NeighborMethod::Exact => {
                let labels = label_groups(&groups, full);
                let pareto: Vec<usize> = (0..groups.len())
                    .filter(|&g| labels[g] == ActionLabel::ParetoOptimal)
                    .collect();
                let pairs: Vec<(usize, usize)> = pareto
                    .iter()
                    .flat_map(|&g| pareto.iter().filter(move |&&h| h > g).map(move |&h| (g, h)))
                    .collect();
                let neighbor_groups = pairs
                    .par_iter()
                    .filter_map(|&(g, h)| {
                        // C_g ∩ C_h = C_g ∩ {(l_h - l_g)·p <= 0}
                        let mut rows = groups.cell_rows(g);
                        rows.push(groups.rows[h].iter().zip(&groups.rows[g]).map(|(a, b)| a - b).collect());
                        let face = crate::lp::SimplexPolytope::new(groups.rows[g].len(), rows).analyze()?;
                        if face.dimension as i64 != full - 1 {
                            return None;
                        }
                        let containing: Vec<usize> = containing_groups(&groups, g, &face)
                            .into_iter()
                            .filter(|&c| labels[c] == ActionLabel::ParetoOptimal)
                            .collect();
                        Some(((g, h), containing))
                    })
                    .collect();
                Self {
                    classification: ActionClassification {
                        labels: groups.group_of.iter().map(|&g| labels[g]).collect(),
                        duplicate_groups: groups.members.clone(),
                    },
                    group_of: groups.group_of,
                    neighbor_groups,
                }
            }
            _ => {
                let mut seen = BTreeSet::new();
                for (i, j) in closed_form::neighbors(game) {
                    let (g, h) = (groups.group_of[i], groups.group_of[j]);
                    seen.insert((g.min(h), g.max(h)));
                }
                Self {
                    classification: ActionClassification {
                        labels: vec![ActionLabel::ParetoOptimal; game.num_actions()],
                        duplicate_groups: groups.members.clone(),
                    },
                    group_of: groups.group_of,
                    neighbor_groups: seen.into_iter().map(|(g, h)| ((g, h), vec![g, h])).collect(),
                }
            }
        }
    }

    pub fn members(&self, g: usize) -> &[usize] {
        &self.classification.duplicate_groups[g]
    }

    /// Unordered action pairs `(i, j)`, `i < j`, that are neighbors.
    pub fn neighbor_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for ((g, h), _) in &self.neighbor_groups {
            for &a in self.members(*g) {
                for &b in self.members(*h) {
                    out.push((a.min(b), a.max(b)));
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn group_pair(&self, i: usize, j: usize) -> Option<usize> {
        let (g, h) = (self.group_of[i], self.group_of[j]);
        let key = (g.min(h), g.max(h));
        self.neighbor_groups.iter().position(|(p, _)| *p == key)
    }

    pub fn are_neighbors(&self, i: usize, j: usize) -> bool {
        self.group_pair(i, j).is_some()
    }

    /// `N⁺_{i,j}` as sorted action indices.
    pub fn neighborhood(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        let idx = self.group_pair(i, j).ok_or(Error::NotNeighbors(i, j))?;
        let mut out: Vec<usize> = self.neighbor_groups[idx]
            .1
            .iter()
            .flat_map(|&g| self.members(g).iter().copied())
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    fn neighborhood_of_group_pair(&self, idx: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.neighbor_groups[idx]
            .1
            .iter()
            .flat_map(|&g| self.members(g).iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Neighboring action pairs by closed form.
pub fn find_neighbors(game: &GameSpec) -> Vec<(usize, usize)> {
    closed_form::neighbors(game)
}

/// Neighboring action pairs by exact LP.
pub fn find_neighbors_exact(game: &GameSpec) -> Vec<(usize, usize)> {
    GameStructure::compute(game, NeighborMethod::Exact).neighbor_pairs()
}

pub fn neighborhood_action_set(game: &GameSpec, i: usize, j: usize) -> Result<Vec<usize>> {
    game.check_action(i)?;
    game.check_action(j)?;
    if !closed_form::are_neighbors(game, i, j) {
        return Err(Error::NotNeighbors(i, j));
    }
    Ok(closed_form::neighborhood(game, i, j))
}

pub fn neighborhood_action_set_exact(game: &GameSpec, i: usize, j: usize) -> Result<Vec<usize>> {
    game.check_action(i)?;
    game.check_action(j)?;
    GameStructure::compute(game, NeighborMethod::Exact).neighborhood(i, j)
}

/// Membership of `l_i - l_j` in the signal span of all actions (global) or of
/// `N⁺_{i,j}` (local, closed-form neighborhood).
pub fn check_observability(game: &GameSpec, i: usize, j: usize, kind: ObservabilityKind) -> Result<Observability> {
    game.check_action(i)?;
    game.check_action(j)?;
    let actions = match kind {
        ObservabilityKind::Global => (0..game.num_actions()).collect(),
        ObservabilityKind::Local => neighborhood_action_set(game, i, j)?,
    };
    check_in_span(game, &SignalSpan::new(game, &actions), i, j, kind)
}

/// Outcome of the full observability sweep over a game.
#[derive(Clone, Debug)]
pub struct ObservabilitySummary {
    pub structure: GameStructure,
    pub global: bool,
    /// One representative certificate per distinct loss vector, against group 0's.
    pub global_certificates: Vec<ObservabilityCertificate>,
    /// Per neighboring group pair, on representative actions.
    pub local: Vec<((usize, usize), Observability)>,
}

impl ObservabilitySummary {
    pub fn local_holds(&self) -> bool {
        self.local.iter().all(|(_, o)| o.is_observable())
    }

    pub fn failing_pairs(&self) -> Vec<(usize, usize)> {
        self.local
            .iter()
            .filter(|(_, o)| !o.is_observable())
            .map(|(p, _)| *p)
            .collect()
    }

    /// Distinct nondominated loss vectors.
    pub fn nondominated_groups(&self) -> usize {
        self.structure
            .classification
            .duplicate_groups
            .iter()
            .filter(|members| self.structure.classification.labels[members[0]] != ActionLabel::Dominated)
            .count()
    }

    pub fn regime(&self) -> Regime {
        if self.nondominated_groups() <= 1 {
            Regime::Trivial
        } else if self.local_holds() {
            Regime::Easy
        } else if self.global {
            Regime::Hard
        } else {
            Regime::Hopeless
        }
    }
}

pub fn analyze_observability(game: &GameSpec, method: NeighborMethod) -> Result<ObservabilitySummary> {
    let structure = GameStructure::compute(game, method);
    let groups = &structure.classification.duplicate_groups;

    // l_i - l_j ∈ W for all pairs iff l_g - l_0 ∈ W for every group g.
    let all: Vec<usize> = (0..game.num_actions()).collect();
    let global_span = SignalSpan::new(game, &all);
    let reference = groups[0][0];
    let mut global = true;
    let mut global_certificates = Vec::new();
    for members in groups.iter().skip(1) {
        match check_in_span(game, &global_span, members[0], reference, ObservabilityKind::Global)? {
            Observability::Observable(c) => global_certificates.push(c),
            Observability::NotObservable => {
                global = false;
                break;
            }
        }
    }

    let local = (0..structure.neighbor_groups.len())
        .into_par_iter()
        .map(|idx| {
            let ((g, h), _) = structure.neighbor_groups[idx];
            let (i, j) = (groups[g][0], groups[h][0]);
            let span = SignalSpan::new(game, &structure.neighborhood_of_group_pair(idx));
            check_in_span(game, &span, i, j, ObservabilityKind::Local).map(|o| ((i, j), o))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ObservabilitySummary {
        structure,
        global,
        global_certificates,
        local,
    })
}

pub fn classify_game(game: &GameSpec) -> Result<Regime> {
    Ok(analyze_observability(game, NeighborMethod::Auto)?.regime())
}

/// Pair of rankings in a report, one-based.
#[derive(Clone, Debug, Serialize)]
pub struct PairLabel {
    pub i: usize,
    pub j: usize,
    pub sigma_i: Vec<usize>,
    pub sigma_j: Vec<usize>,
}

impl PairLabel {
    pub fn new(game: &GameSpec, (i, j): (usize, usize)) -> Self {
        Self {
            i,
            j,
            sigma_i: game.actions[i].to_one_based(),
            sigma_j: game.actions[j].to_one_based(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub measure: String,
    pub m: usize,
    pub k: usize,
    pub regime: Regime,
    pub global_observable: bool,
    pub local_observable: bool,
    pub pareto_count: usize,
    pub duplicate_group_sizes: Vec<usize>,
    pub neighbor_count: usize,
    pub failing_pairs: Vec<PairLabel>,
    pub certificate_files: Vec<String>,
}

impl AnalysisReport {
    pub fn new(game: &GameSpec, summary: &ObservabilitySummary) -> Self {
        let mut sizes: Vec<usize> = summary
            .structure
            .classification
            .duplicate_groups
            .iter()
            .map(Vec::len)
            .collect();
        sizes.sort_unstable();
        sizes.dedup();
        Self {
            measure: game.measure.to_string(),
            m: game.m,
            k: game.k,
            regime: summary.regime(),
            global_observable: summary.global,
            local_observable: summary.local_holds(),
            pareto_count: summary.structure.classification.pareto_count(),
            duplicate_group_sizes: sizes,
            neighbor_count: summary.structure.neighbor_pairs().len(),
            failing_pairs: summary.failing_pairs().into_iter().map(|p| PairLabel::new(game, p)).collect(),
            certificate_files: Vec::new(),
        }
    }
}

#[derive(Serialize)]
struct CertificateDump<'a> {
    measure: String,
    m: usize,
    k: usize,
    global: &'a [ObservabilityCertificate],
    local: Vec<&'a ObservabilityCertificate>,
}

/// Writes the certificates of a summary as JSON; returns the path.
pub fn write_certificates(game: &GameSpec, summary: &ObservabilitySummary, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let dump = CertificateDump {
        measure: game.measure.to_string(),
        m: game.m,
        k: game.k,
        global: &summary.global_certificates,
        local: summary.local.iter().filter_map(|(_, o)| o.certificate()).collect(),
    };
    let path = dir.join("certificates.json");
    std::fs::write(&path, serde_json::to_string_pretty(&dump)?)?;
    Ok(path)
}

fn outcome_header(game: &GameSpec) -> String {
    let cols: Vec<String> = game.outcomes.iter().map(|o| o.bitstring()).collect();
    cols.join(",")
}

/// `L` as CSV: header of outcome bitstrings, one row per action.
pub fn loss_csv(game: &GameSpec) -> String {
    let mut out = outcome_header(game);
    out.push('\n');
    for a in 0..game.num_actions() {
        let row: Vec<String> = (0..game.num_outcomes())
            .map(|o| match game.measure.kind {
                MeasureKind::NegDcg => format!("{:.17}", game.loss.get_f64(a, o)),
                _ => game.loss.get(a, o).to_string(),
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// `H` as CSV; entries are the revealed bit tuples.
pub fn feedback_csv(game: &GameSpec) -> String {
    let mut out = outcome_header(game);
    out.push('\n');
    for a in 0..game.num_actions() {
        let row: Vec<String> = (0..game.num_outcomes())
            .map(|o| game.feedback.tuple(a, o).iter().map(|b| b.to_string()).collect())
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn signal_csv(game: &GameSpec, action: usize) -> Result<String> {
    let s = game.signal_matrix(action)?;
    let mut out = outcome_header(game);
    out.push('\n');
    for row in s.rows() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    Ok(out)
}

/// Writes `L.csv`, `H.csv` and `signals/S_<action>.csv` under `dir`.
pub fn dump_matrices(game: &GameSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    let sdir = dir.join("signals");
    std::fs::create_dir_all(&sdir)?;
    let mut paths = vec![dir.join("L.csv"), dir.join("H.csv")];
    std::fs::write(&paths[0], loss_csv(game))?;
    std::fs::write(&paths[1], feedback_csv(game))?;
    for a in 0..game.num_actions() {
        let p = sdir.join(format!("S_{a}.csv"));
        std::fs::write(&p, signal_csv(game, a)?)?;
        paths.push(p);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::build_game;
    use crate::ranking::{MeasureSpec, Permutation};

    fn idx(game: &GameSpec, xs: &[usize]) -> usize {
        game.action_index(&Permutation::from_one_based(xs).unwrap()).unwrap()
    }

    #[test]
    fn cell_dimensions() {
        let g = build_game(MeasureSpec::sl(), 3, 1).unwrap();
        for a in 0..g.num_actions() {
            assert_eq!(cell_dimension(&g, a).unwrap(), 7);
        }
        let g = build_game(MeasureSpec::pn(1), 3, 1).unwrap();
        assert_eq!(cell_dimension(&g, 0).unwrap(), 7);
        let g = build_game(MeasureSpec::sl(), 1, 1).unwrap();
        assert_eq!(cell_dimension(&g, 0).unwrap(), 1);
    }

    #[test]
    fn sl_neighbors_small() {
        let g = build_game(MeasureSpec::sl(), 3, 1).unwrap();
        let s = GameStructure::compute(&g, NeighborMethod::Exact);
        let id = idx(&g, &[1, 2, 3]);
        assert!(s.are_neighbors(id, idx(&g, &[2, 1, 3])));
        assert!(s.are_neighbors(id, idx(&g, &[1, 3, 2])));
        assert!(!s.are_neighbors(id, idx(&g, &[3, 2, 1])));
        assert_eq!(s.neighbor_pairs(), find_neighbors(&g));
        let (i, j) = (id, idx(&g, &[2, 1, 3]));
        assert_eq!(s.neighborhood(i, j).unwrap(), vec![i.min(j), i.max(j)]);
    }

    #[test]
    fn pn_neighborhood_is_duplicate_union() {
        let g = build_game(MeasureSpec::pn(1), 3, 1).unwrap();
        let (i, j) = (idx(&g, &[1, 2, 3]), idx(&g, &[2, 1, 3]));
        assert_eq!(neighborhood_action_set_exact(&g, i, j).unwrap().len(), 4);
        assert_eq!(neighborhood_action_set(&g, i, j).unwrap().len(), 4);
        let g = build_game(MeasureSpec::pn(2), 4, 1).unwrap();
        let (i, j) = (idx(&g, &[1, 2, 3, 4]), idx(&g, &[1, 3, 2, 4]));
        assert_eq!(neighborhood_action_set_exact(&g, i, j).unwrap().len(), 8);
    }

    #[test]
    fn not_neighbors_error() {
        let g = build_game(MeasureSpec::sl(), 3, 1).unwrap();
        let (i, j) = (idx(&g, &[1, 2, 3]), idx(&g, &[3, 2, 1]));
        assert!(matches!(neighborhood_action_set(&g, i, j), Err(Error::NotNeighbors(..))));
    }

    #[test]
    fn observability_examples() {
        let g = build_game(MeasureSpec::sl(), 3, 1).unwrap();
        let (i, j) = (idx(&g, &[1, 2, 3]), idx(&g, &[1, 3, 2]));
        assert!(!check_observability(&g, i, j, ObservabilityKind::Local).unwrap().is_observable());
        let cert = check_observability(&g, i, j, ObservabilityKind::Global).unwrap();
        cert.certificate().unwrap().verify(&g, None).unwrap();

        let g = build_game(MeasureSpec::sl(), 3, 2).unwrap();
        for (i, j) in find_neighbors(&g) {
            let o = check_observability(&g, i, j, ObservabilityKind::Local).unwrap();
            let nb = neighborhood_action_set(&g, i, j).unwrap();
            let c = o.certificate().unwrap();
            c.verify(&g, Some(&nb)).unwrap();
            let f = certificate_to_function(c, &g);
            assert!(f.satisfies_identity(&g));
        }
    }

    #[test]
    fn regimes() {
        let cases = [
            (MeasureSpec::sl(), 3, 1, Regime::Hard),
            (MeasureSpec::sl(), 3, 2, Regime::Easy),
            (MeasureSpec::pn(1), 3, 1, Regime::Easy),
            (MeasureSpec::dcg(), 3, 1, Regime::Hard),
            (MeasureSpec::dcg(), 3, 2, Regime::Easy),
            (MeasureSpec::pl(), 3, 1, Regime::Hard),
            (MeasureSpec::sl(), 1, 1, Regime::Trivial),
            (MeasureSpec::pn(3), 3, 1, Regime::Trivial),
        ];
        for (spec, m, k, want) in cases {
            let g = build_game(spec, m, k).unwrap();
            assert_eq!(classify_game(&g).unwrap(), want, "{spec} m={m} k={k}");
        }
    }

    #[test]
    fn csv_dumps() {
        let g = build_game(MeasureSpec::sl(), 2, 1).unwrap();
        assert_eq!(loss_csv(&g), "00,01,10,11\n0,2,1,3\n0,1,2,3\n");
        assert_eq!(feedback_csv(&g).lines().nth(1).unwrap(), "0,0,1,1");
        assert_eq!(signal_csv(&g, 0).unwrap().lines().nth(1).unwrap(), "1,1,0,0");
    }
}
