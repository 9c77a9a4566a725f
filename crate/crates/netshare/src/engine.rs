//! Strategy profiles, optimal routings, exact pure-Nash-equilibrium testing
//! and enumeration, best-response dynamics, and price-of-anarchy reports.

use crate::cost::{CostTable, GameInstance};
use crate::graph::{EdgeId, Path};
use crate::protocol::Protocol;
use crate::rat::Rat;

pub const DEFAULT_PATH_CAP: usize = 100_000;
pub const DEFAULT_PROFILE_CAP: usize = 10_000_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("operation requires a symmetric instance")]
    NotSymmetric,
    #[error("sink unreachable from source")]
    Unreachable,
    #[error("path or profile enumeration exceeded cap of {0}")]
    PathExplosion(usize),
    #[error("invalid profile: {0}")]
    BadProfile(String),
}

impl From<crate::graph::GraphError> for EngineError {
    fn from(e: crate::graph::GraphError) -> Self {
        match e {
            crate::graph::GraphError::PathExplosion(c) => EngineError::PathExplosion(c),
            other => EngineError::BadProfile(other.to_string()),
        }
    }
}

/// One path per player, indexed like the instance's player list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StrategyProfile {
    paths: Vec<Path>,
}

impl StrategyProfile {
    pub fn new(instance: &GameInstance, paths: Vec<Path>) -> Result<Self, EngineError> {
        if paths.len() != instance.player_count() {
            return Err(EngineError::BadProfile(format!(
                "{} paths for {} players",
                paths.len(),
                instance.player_count()
            )));
        }
        for (i, p) in paths.iter().enumerate() {
            let (s, t) = instance.players[i];
            if p.source() != s || p.sink() != t {
                return Err(EngineError::BadProfile(format!(
                    "path for player {} runs {}->{}, expected {}->{}",
                    i,
                    p.source(),
                    p.sink(),
                    s,
                    t
                )));
            }
        }
        Ok(StrategyProfile { paths })
    }

    pub fn path(&self, i: usize) -> &Path {
        &self.paths[i]
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn player_count(&self) -> usize {
        self.paths.len()
    }

    pub fn load_vector(&self, edge_count: usize) -> Vec<usize> {
        let mut l = vec![0; edge_count];
        for p in &self.paths {
            for &e in p.edges() {
                l[e] += 1;
            }
        }
        l
    }

    pub fn load(&self, e: EdgeId) -> usize {
        self.paths.iter().filter(|p| p.contains(e)).count()
    }

    pub fn with_deviation(&self, player: usize, path: Path) -> StrategyProfile {
        let mut paths = self.paths.clone();
        paths[player] = path;
        StrategyProfile { paths }
    }
}

/// Social cost of a profile under the given tables: sum_e c_e(l_e). +inf
/// propagates (capacitated edges over capacity).
pub fn profile_cost(profile: &StrategyProfile, tables: &[CostTable]) -> Rat {
    profile
        .load_vector(tables.len())
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0)
        .map(|(e, &l)| tables[e].get(l).clone())
        .sum()
}

/// The consistently tie-broken optimal single s-t path per total load.
/// Computed once per instance; every protocol reads the same table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptTable {
    paths: Vec<Path>,
}

impl OptTable {
    pub fn max_load(&self) -> usize {
        self.paths.len()
    }

    /// OPT(l), 1-based load.
    pub fn path(&self, load: usize) -> &Path {
        &self.paths[load - 1]
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn contains(&self, e: EdgeId, load: usize) -> bool {
        self.path(load).contains(e)
    }

    /// Cost of OPT(l) under the instance tables at uniform load l.
    pub fn cost(&self, instance: &GameInstance, load: usize) -> Rat {
        self.path(load)
            .edges()
            .iter()
            .map(|&e| instance.cost(e).get(load).clone())
            .sum()
    }
}

/// Minimum-cost s-t path for every load 1..=max_load, ties broken by the
/// lexicographically smallest edge-id sequence. `max_load` is caller-supplied
/// because lower-bound instances care about loads far below their formal
/// player universe.
pub fn opt_path_table(instance: &GameInstance, max_load: usize) -> Result<OptTable, EngineError> {
    if !instance.is_symmetric() {
        return Err(EngineError::NotSymmetric);
    }
    let (s, t) = instance.players[0];
    let all = instance.graph.enumerate_paths(s, t, DEFAULT_PATH_CAP)?;
    if all.is_empty() {
        return Err(EngineError::Unreachable);
    }
    let mut paths = Vec::with_capacity(max_load);
    for load in 1..=max_load {
        let mut best: Option<(&Path, Rat)> = None;
        for p in &all {
            let cost: Rat = p
                .edges()
                .iter()
                .map(|&e| instance.cost(e).get(load).clone())
                .sum();
            // strict improvement only: the lex-first minimum survives ties
            match &best {
                Some((_, c)) if cost >= *c => {}
                _ => best = Some((p, cost)),
            }
        }
        paths.push(best.expect("at least one path").0.clone());
    }
    Ok(OptTable { paths })
}

fn strategy_spaces(
    instance: &GameInstance,
    cap: usize,
) -> Result<Vec<Vec<Path>>, EngineError> {
    let mut spaces: Vec<Vec<Path>> = Vec::with_capacity(instance.player_count());
    for &(s, t) in &instance.players {
        // symmetric players share the same list; reuse the previous one
        if let Some(prev) = instance
            .players
            .iter()
            .position(|&p| p == (s, t))
            .filter(|&j| j < spaces.len())
        {
            spaces.push(spaces[prev].clone());
            continue;
        }
        let paths = instance.graph.enumerate_paths(s, t, cap)?;
        if paths.is_empty() {
            return Err(EngineError::Unreachable);
        }
        spaces.push(paths);
    }
    Ok(spaces)
}

fn decode_profile(spaces: &[Vec<Path>], mut idx: usize) -> Vec<Path> {
    // mixed-radix, least significant digit = last player, so ascending idx
    // walks profiles in lexicographic order
    let mut out = vec![None; spaces.len()];
    for (i, space) in spaces.iter().enumerate().rev() {
        out[i] = Some(space[idx % space.len()].clone());
        idx /= space.len();
    }
    out.into_iter().map(Option::unwrap).collect()
}

/// Exact minimizer of social cost over all profiles, lexicographically first
/// among ties.
pub fn brute_force_optimum(
    instance: &GameInstance,
    cap: usize,
) -> Result<(StrategyProfile, Rat), EngineError> {
    brute_force_with_tables(instance, instance.costs(), cap)
}

fn brute_force_with_tables(
    instance: &GameInstance,
    tables: &[CostTable],
    cap: usize,
) -> Result<(StrategyProfile, Rat), EngineError> {
    let spaces = strategy_spaces(instance, cap)?;
    let total: usize = spaces
        .iter()
        .map(|s| s.len())
        .try_fold(1usize, |a, b| a.checked_mul(b))
        .filter(|&t| t <= cap)
        .ok_or(EngineError::PathExplosion(cap))?;
    let mut best: Option<(StrategyProfile, Rat)> = None;
    for idx in 0..total {
        let profile = StrategyProfile {
            paths: decode_profile(&spaces, idx),
        };
        let cost = profile_cost(&profile, tables);
        match &best {
            Some((_, c)) if cost >= *c => {}
            _ => best = Some((profile, cost)),
        }
    }
    Ok(best.expect("non-empty profile space"))
}

/// An improving unilateral deviation found by `is_nash`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub player: usize,
    pub better: Path,
    pub old_total: Rat,
    pub new_total: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashCheck {
    pub is_nash: bool,
    pub witness: Option<Witness>,
    /// Exact equalities between the share totals of distinct candidate paths;
    /// certified runs require zero.
    pub tie_hits: usize,
}

/// Test a profile for pure Nash equilibrium: no player has a strictly
/// improving path deviation. On failure the witness is the lowest-index
/// improving player with their best improving path (lexicographically first
/// among equal-cost improvements). Every candidate total is compared exactly;
/// equalities between distinct paths are counted as tie-detector hits.
pub fn is_nash(
    instance: &GameInstance,
    protocol: &Protocol,
    profile: &StrategyProfile,
    path_cap: usize,
) -> Result<NashCheck, EngineError> {
    let mut tie_hits = 0;
    let mut witness: Option<Witness> = None;
    for i in 0..profile.player_count() {
        let (s, t) = instance.players[i];
        let candidates = instance.graph.enumerate_paths(s, t, path_cap)?;
        let others = users_excluding(instance, profile, i);
        let current = protocol.path_total(instance, &others, i, profile.path(i));
        let mut best: Option<(&Path, Rat)> = None;
        for p in &candidates {
            let total = protocol.path_total(instance, &others, i, p);
            if total == current && p != profile.path(i) {
                tie_hits += 1;
            }
            if total < current {
                match &best {
                    Some((_, b)) if total >= *b => {}
                    _ => best = Some((p, total)),
                }
            }
        }
        if let Some((p, total)) = best {
            if witness.is_none() {
                witness = Some(Witness {
                    player: i,
                    better: p.clone(),
                    old_total: current.clone(),
                    new_total: total,
                });
            }
        }
    }
    Ok(NashCheck {
        is_nash: witness.is_none(),
        witness,
        tie_hits,
    })
}

/// Users per edge with player `i` removed, in ascending player index.
fn users_excluding(
    instance: &GameInstance,
    profile: &StrategyProfile,
    i: usize,
) -> Vec<Vec<usize>> {
    let mut users = vec![Vec::new(); instance.graph.edge_count()];
    for j in 0..profile.player_count() {
        if j == i {
            continue;
        }
        for &e in profile.path(j).edges() {
            users[e].push(j);
        }
    }
    users
}

/// All pure Nash equilibria in lexicographic profile order, plus the total
/// tie-detector hit count across every deviation comparison.
pub fn enumerate_pne(
    instance: &GameInstance,
    protocol: &Protocol,
    profile_cap: usize,
    path_cap: usize,
) -> Result<(Vec<StrategyProfile>, usize), EngineError> {
    let spaces = strategy_spaces(instance, path_cap)?;
    let total: usize = spaces
        .iter()
        .map(|s| s.len())
        .try_fold(1usize, |a, b| a.checked_mul(b))
        .filter(|&t| t <= profile_cap)
        .ok_or(EngineError::PathExplosion(profile_cap))?;
    let mut pne = Vec::new();
    let mut tie_hits = 0;
    for idx in 0..total {
        let profile = StrategyProfile {
            paths: decode_profile(&spaces, idx),
        };
        let check = is_nash(instance, protocol, &profile, path_cap)?;
        tie_hits += check.tie_hits;
        if check.is_nash {
            pne.push(profile);
        }
    }
    Ok((pne, tie_hits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrdStatus {
    Converged,
    MaxIters,
    Cycle,
}

/// Best-response dynamics: repeatedly apply the `is_nash` witness (lowest
/// improving player, best path). Stops at a PNE, after `max_iters` steps, or
/// on revisiting a profile.
pub fn best_response_dynamics(
    instance: &GameInstance,
    protocol: &Protocol,
    start: StrategyProfile,
    max_iters: usize,
    path_cap: usize,
) -> Result<(StrategyProfile, BrdStatus, Vec<Witness>), EngineError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut current = start;
    let mut trace = Vec::new();
    seen.insert(current.paths.clone());
    for _ in 0..max_iters {
        let check = is_nash(instance, protocol, &current, path_cap)?;
        match check.witness {
            None => return Ok((current, BrdStatus::Converged, trace)),
            Some(w) => {
                current = current.with_deviation(w.player, w.better.clone());
                trace.push(w);
                if !seen.insert(current.paths.clone()) {
                    return Ok((current, BrdStatus::Cycle, trace));
                }
            }
        }
    }
    let check = is_nash(instance, protocol, &current, path_cap)?;
    let status = if check.is_nash {
        BrdStatus::Converged
    } else {
        BrdStatus::MaxIters
    };
    Ok((current, status, trace))
}

/// Full price-of-anarchy analysis for one instance and protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub protocol: String,
    pub pne: Vec<StrategyProfile>,
    /// Worst equilibrium cost under the overcharged tables when the protocol
    /// overcharges, under the instance tables otherwise. None when no PNE.
    pub worst_eq_cost: Option<Rat>,
    pub best_eq_cost: Option<Rat>,
    /// Always computed on the original (pre-perturbation) tables.
    pub opt_cost: Rat,
    pub opt_profile: StrategyProfile,
    pub poa: Option<Rat>,
    pub no_equilibrium: bool,
    pub tie_detector_hits: usize,
    /// Total perturbation increment, when the instance was perturbed.
    pub eps1: Option<Rat>,
    /// NWA leader-share slack sum_e eps_e(0), when applicable.
    pub eps2: Option<Rat>,
}

pub fn poa_report(
    instance: &GameInstance,
    protocol: &Protocol,
    profile_cap: usize,
    path_cap: usize,
) -> Result<AnalysisReport, EngineError> {
    let (pne, tie_hits) = enumerate_pne(instance, protocol, profile_cap, path_cap)?;
    let eval_tables = protocol.eval_tables(instance);
    let mut worst: Option<Rat> = None;
    let mut best: Option<Rat> = None;
    for p in &pne {
        let c = profile_cost(p, eval_tables);
        if worst.as_ref().map_or(true, |w| c > *w) {
            worst = Some(c.clone());
        }
        if best.as_ref().map_or(true, |b| c < *b) {
            best = Some(c);
        }
    }
    let (opt_profile, opt_cost) =
        brute_force_with_tables(instance, instance.original_costs(), profile_cap)?;
    let poa = worst.as_ref().map(|w| w / &opt_cost);
    Ok(AnalysisReport {
        protocol: protocol.name().to_string(),
        no_equilibrium: pne.is_empty(),
        pne,
        worst_eq_cost: worst,
        best_eq_cost: best,
        opt_cost,
        opt_profile,
        poa,
        tie_detector_hits: tie_hits,
        eps1: instance.perturbation.as_ref().map(|p| p.eps1.clone()),
        eps2: protocol.eps2(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{CostTable, GameInstance};
    use crate::graph::Graph;

    fn two_parallel_unit(players: usize) -> GameInstance {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 0, 1)]).unwrap();
        let c = || CostTable::constant(Rat::one(), players.max(2));
        GameInstance::new(g, vec![c(), c()], vec![(0, 1); players], players.max(2)).unwrap()
    }

    fn profile_on(instance: &GameInstance, edges: &[EdgeId]) -> StrategyProfile {
        let paths = edges
            .iter()
            .map(|&e| Path::from_edges(vec![e], &instance.graph).unwrap())
            .collect();
        StrategyProfile::new(instance, paths).unwrap()
    }

    #[test]
    fn load_vector_counts() {
        let inst = two_parallel_unit(2);
        let p = profile_on(&inst, &[0, 0]);
        assert_eq!(p.load_vector(2), vec![2, 0]);
        let p = profile_on(&inst, &[0, 1]);
        assert_eq!(p.load_vector(2), vec![1, 1]);
    }

    #[test]
    fn profile_cost_shared_edge() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1)]).unwrap();
        let c = CostTable::new(vec![Rat::zero(), Rat::one(), Rat::ratio(3, 2)]).unwrap();
        let inst = GameInstance::new(g, vec![c], vec![(0, 1), (0, 1)], 2).unwrap();
        let p = profile_on(&inst, &[0, 0]);
        assert_eq!(profile_cost(&p, inst.costs()), Rat::ratio(3, 2));
    }

    #[test]
    fn profile_cost_capacitated_inf() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1)]).unwrap();
        let c = CostTable::capacitated(Rat::one(), 1, 2);
        let inst = GameInstance::new(g, vec![c], vec![(0, 1), (0, 1)], 2).unwrap();
        assert_eq!(
            profile_cost(&profile_on(&inst, &[0, 0]), inst.costs()),
            Rat::Inf
        );
    }

    #[test]
    fn opt_table_crossover_and_ties() {
        // e0 linear, e1 constant 2: OPT(1)=e0, OPT(2)=e0 (lex tie), OPT(3)=e1
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 0, 1)]).unwrap();
        let c0 = CostTable::from_ints(&[0, 1, 2, 3]).unwrap();
        let c1 = CostTable::from_ints(&[0, 2, 2, 2]).unwrap();
        let inst = GameInstance::new(g, vec![c0, c1], vec![(0, 1); 3], 3).unwrap();
        let opt = opt_path_table(&inst, 3).unwrap();
        assert_eq!(opt.path(1).edges(), &[0]);
        assert_eq!(opt.path(2).edges(), &[0]);
        assert_eq!(opt.path(3).edges(), &[1]);
    }

    #[test]
    fn opt_table_single_path() {
        let g = Graph::new(vec![0, 1, 2], vec![(0, 0, 1), (1, 1, 2)]).unwrap();
        let c = || CostTable::from_ints(&[0, 1, 2]).unwrap();
        let inst = GameInstance::new(g, vec![c(), c()], vec![(0, 2), (0, 2)], 2).unwrap();
        let opt = opt_path_table(&inst, 2).unwrap();
        for l in 1..=2 {
            assert_eq!(opt.path(l).edges(), &[0, 1]);
        }
    }

    #[test]
    fn opt_table_rejects_asymmetric() {
        let g = Graph::new(vec![0, 1, 2], vec![(0, 0, 2), (1, 1, 2)]).unwrap();
        let c = || CostTable::from_ints(&[0, 1, 1]).unwrap();
        let inst = GameInstance::new(g, vec![c(), c()], vec![(0, 2), (1, 2)], 2).unwrap();
        assert_eq!(opt_path_table(&inst, 2), Err(EngineError::NotSymmetric));
    }

    #[test]
    fn brute_force_single_player_shortest_path() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 0, 1)]).unwrap();
        let c0 = CostTable::from_ints(&[0, 3]).unwrap();
        let c1 = CostTable::from_ints(&[0, 2]).unwrap();
        let inst = GameInstance::new(g, vec![c0, c1], vec![(0, 1)], 1).unwrap();
        let (p, cost) = brute_force_optimum(&inst, 1000).unwrap();
        assert_eq!(p.path(0).edges(), &[1]);
        assert_eq!(cost, Rat::int(2));
    }

    #[test]
    fn brute_force_shares_concave_edge() {
        // concave sharing: both players on one edge beats splitting
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 0, 1)]).unwrap();
        let c = || CostTable::from_ints(&[0, 2, 3]).unwrap();
        let inst = GameInstance::new(g, vec![c(), c()], vec![(0, 1); 2], 2).unwrap();
        let (p, cost) = brute_force_optimum(&inst, 1000).unwrap();
        assert_eq!(cost, Rat::int(3));
        assert_eq!(p.path(0).edges(), &[0]); // lex-first minimizer
        assert_eq!(p.path(1).edges(), &[0]);
    }

    #[test]
    fn nash_equal_split_parallel_edges() {
        let inst = two_parallel_unit(2);
        let proto = Protocol::EqualSplit;
        let both = profile_on(&inst, &[0, 0]);
        assert!(is_nash(&inst, &proto, &both, 100).unwrap().is_nash);
        let split = profile_on(&inst, &[0, 1]);
        let check = is_nash(&inst, &proto, &split, 100).unwrap();
        assert!(!check.is_nash);
        let w = check.witness.unwrap();
        assert_eq!(w.player, 0);
        assert_eq!(w.old_total, Rat::one());
        assert_eq!(w.new_total, Rat::ratio(1, 2));
    }

    #[test]
    fn nash_single_strategy_vacuous() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1)]).unwrap();
        let c = CostTable::from_ints(&[0, 1, 1]).unwrap();
        let inst = GameInstance::new(g, vec![c], vec![(0, 1); 2], 2).unwrap();
        let p = profile_on(&inst, &[0, 0]);
        assert!(is_nash(&inst, &Protocol::EqualSplit, &p, 100)
            .unwrap()
            .is_nash);
    }

    #[test]
    fn enumerate_pne_parallel_edges() {
        let inst = two_parallel_unit(2);
        let (pne, _) = enumerate_pne(&inst, &Protocol::EqualSplit, 1000, 100).unwrap();
        assert_eq!(pne.len(), 2);
        assert_eq!(pne[0], profile_on(&inst, &[0, 0]));
        assert_eq!(pne[1], profile_on(&inst, &[1, 1]));
    }

    #[test]
    fn brd_converges_in_one_step() {
        let inst = two_parallel_unit(2);
        let split = profile_on(&inst, &[0, 1]);
        let (end, status, trace) =
            best_response_dynamics(&inst, &Protocol::EqualSplit, split, 100, 100).unwrap();
        assert_eq!(status, BrdStatus::Converged);
        assert_eq!(trace.len(), 1);
        // the lowest-index improving player (0) joins player 1 on edge 1
        assert_eq!(end, profile_on(&inst, &[1, 1]));
    }

    #[test]
    fn brd_at_pne_trace_empty() {
        let inst = two_parallel_unit(2);
        let both = profile_on(&inst, &[0, 0]);
        let (_, status, trace) =
            best_response_dynamics(&inst, &Protocol::EqualSplit, both, 100, 100).unwrap();
        assert_eq!(status, BrdStatus::Converged);
        assert!(trace.is_empty());
    }

    #[test]
    fn report_on_parallel_edges() {
        let inst = two_parallel_unit(2);
        let report = poa_report(&inst, &Protocol::EqualSplit, 1000, 100).unwrap();
        assert_eq!(report.opt_cost, Rat::one());
        assert_eq!(report.worst_eq_cost, Some(Rat::one()));
        assert_eq!(report.poa, Some(Rat::one()));
        assert!(!report.no_equilibrium);
    }

    #[test]
    fn determinism() {
        let inst = two_parallel_unit(3);
        let a = poa_report(&inst, &Protocol::EqualSplit, 10_000, 100).unwrap();
        let b = poa_report(&inst, &Protocol::EqualSplit, 10_000, 100).unwrap();
        assert_eq!(a, b);
    }
}
