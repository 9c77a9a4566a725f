//! Load-indexed edge cost tables over exact rationals, shape classification,
//! the decimal tie-breaking perturbation, and the strictification transform.

use crate::graph::{EdgeId, Graph, VertexId};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use std::collections::BTreeMap;

/// Cost table c(0..n_max) for one edge. c(0) = 0 and c is non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable {
    values: Vec<Rat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ShapeFlags {
    pub concave: bool,
    pub strictly_concave: bool,
    pub convex: bool,
    pub constant: bool,
    pub capacitated: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CostError {
    #[error("malformed cost table: {0}")]
    MalformedTable(String),
    #[error("operation requires finite costs but the table contains +inf")]
    InfiniteCost,
    #[error("cost table is not concave")]
    NotConcave,
    #[error("eps must be positive")]
    InvalidEps,
    #[error("cost table has c(1) = 0")]
    ZeroUnitCost,
    #[error("player {0} cannot reach sink {2} from source {1}")]
    UnreachablePlayer(usize, VertexId, VertexId),
    #[error("instance must have between 1 and n_max players, got {0} with n_max {1}")]
    BadPlayerCount(usize, usize),
    #[error("cost table for edge {0} has length {1}, expected n_max + 1 = {2}")]
    TableLength(EdgeId, usize, usize),
    #[error("instance has {0} cost tables for {1} edges")]
    TableCount(usize, usize),
}

impl CostTable {
    pub fn new(values: Vec<Rat>) -> Result<Self, CostError> {
        if values.len() < 2 {
            return Err(CostError::MalformedTable(
                "table needs c(0) and at least c(1)".into(),
            ));
        }
        if !values[0].is_zero() {
            return Err(CostError::MalformedTable("c(0) must be 0".into()));
        }
        for w in values.windows(2) {
            if w[1] < w[0] {
                return Err(CostError::MalformedTable("values must be non-decreasing".into()));
            }
        }
        Ok(CostTable { values })
    }

    /// For derived tables that need not be monotone (e.g. overcharged costs,
    /// where the load-1 value is doubled and may exceed the load-2 value).
    /// Still requires c(0) = 0.
    pub(crate) fn new_unchecked(values: Vec<Rat>) -> Self {
        debug_assert!(values.len() >= 2 && values[0].is_zero());
        CostTable { values }
    }

    pub fn from_ints(values: &[i64]) -> Result<Self, CostError> {
        CostTable::new(values.iter().map(|&v| Rat::int(v)).collect())
    }

    /// Constant table: 0 at load 0, `c` for every load >= 1.
    pub fn constant(c: Rat, n_max: usize) -> Self {
        let mut values = vec![Rat::zero()];
        values.extend(std::iter::repeat(c).take(n_max));
        CostTable { values }
    }

    /// Constant up to `cap` users, +inf beyond.
    pub fn capacitated(c: Rat, cap: usize, n_max: usize) -> Self {
        let mut values = vec![Rat::zero()];
        for load in 1..=n_max {
            values.push(if load <= cap { c.clone() } else { Rat::Inf });
        }
        CostTable { values }
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, load: usize) -> &Rat {
        &self.values[load]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(Rat::is_finite)
    }

    /// Shape flags from the marginals c(l) - c(l-1) over l = 1..n_max.
    /// Any +inf entry sets `capacitated` and disables the curvature flags.
    pub fn classify(&self) -> ShapeFlags {
        let mut flags = ShapeFlags::default();
        flags.constant = self.values[1..].iter().all(|v| *v == self.values[1]);
        if !self.is_finite() {
            flags.capacitated = true;
            return flags;
        }
        let marginals: Vec<Rat> = self
            .values
            .windows(2)
            .map(|w| &w[1] - &w[0])
            .collect();
        flags.concave = marginals.windows(2).all(|m| m[1] <= m[0]);
        flags.strictly_concave = marginals.windows(2).all(|m| m[1] < m[0]);
        flags.convex = marginals.windows(2).all(|m| m[1] >= m[0]);
        flags
    }

    pub fn scale(&self, factor: &Rat) -> CostTable {
        CostTable {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Transform a weakly concave table into a strictly concave one that is never
/// more than (1 + eps) times the original: c'(l) = c(l) + eps*c(1)*(1 - 2^-l).
pub fn strictify_concave(cost: &CostTable, eps: &Rat) -> Result<CostTable, CostError> {
    if !cost.is_finite() {
        return Err(CostError::InfiniteCost);
    }
    if !cost.classify().concave {
        return Err(CostError::NotConcave);
    }
    if eps.is_zero() || eps.is_negative() || eps.is_infinite() {
        return Err(CostError::InvalidEps);
    }
    if cost.get(1).is_zero() {
        return Err(CostError::ZeroUnitCost);
    }
    let delta = eps * cost.get(1);
    let mut values = vec![Rat::zero()];
    for load in 1..=cost.n_max() {
        let bump = &delta * &(Rat::one() - Rat::ratio(1, 1i64 << load.min(62)));
        values.push(cost.get(load) + &bump);
    }
    let out = CostTable { values };
    debug_assert!(out.classify().strictly_concave);
    Ok(out)
}

/// A network cost-sharing game instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    pub graph: Graph,
    costs: Vec<CostTable>,
    pub players: Vec<(VertexId, VertexId)>,
    pub n_max: usize,
    pub perturbation: Option<PerturbRecord>,
    pub metadata: BTreeMap<String, String>,
}

impl GameInstance {
    pub fn new(
        graph: Graph,
        costs: Vec<CostTable>,
        players: Vec<(VertexId, VertexId)>,
        n_max: usize,
    ) -> Result<Self, CostError> {
        if costs.len() != graph.edge_count() {
            return Err(CostError::TableCount(costs.len(), graph.edge_count()));
        }
        for (e, t) in costs.iter().enumerate() {
            if t.n_max() != n_max {
                return Err(CostError::TableLength(e, t.values.len(), n_max + 1));
            }
        }
        if players.is_empty() || players.len() > n_max {
            return Err(CostError::BadPlayerCount(players.len(), n_max));
        }
        for (i, &(s, t)) in players.iter().enumerate() {
            let reachable = graph
                .enumerate_paths(s, t, 1)
                .map(|p| !p.is_empty())
                .unwrap_or(true); // hitting the cap means at least one path exists
            if !reachable {
                return Err(CostError::UnreachablePlayer(i, s, t));
            }
        }
        Ok(GameInstance {
            graph,
            costs,
            players,
            n_max,
            perturbation: None,
            metadata: BTreeMap::new(),
        })
    }

    pub fn cost(&self, e: EdgeId) -> &CostTable {
        &self.costs[e]
    }

    pub fn costs(&self) -> &[CostTable] {
        &self.costs
    }

    /// Cost tables before any tie-breaking perturbation; the original tables
    /// are the reference point for optimal-cost comparisons.
    pub fn original_costs(&self) -> &[CostTable] {
        match &self.perturbation {
            Some(p) => &p.original,
            None => &self.costs,
        }
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.players.iter().all(|p| *p == self.players[0])
    }

    pub fn is_multicast(&self) -> bool {
        self.players.iter().all(|&(_, t)| t == self.players[0].1)
    }

    pub fn all_finite(&self) -> bool {
        self.costs.iter().all(CostTable::is_finite)
    }

    /// Same game with `k` copies of the first player's terminal pair; used to
    /// study a symmetric instance under different active player counts.
    pub fn with_player_count(&self, k: usize) -> Result<GameInstance, CostError> {
        if k == 0 || k > self.n_max {
            return Err(CostError::BadPlayerCount(k, self.n_max));
        }
        let mut out = self.clone();
        out.players = vec![self.players[0]; k];
        Ok(out)
    }
}

/// Parameters of an applied tie-breaking perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbRecord {
    pub r: u32,
    /// lcm(1..n_max-1): divisible by every possible load-minus-one divisor.
    pub k: BigInt,
    /// Decimal window width per edge; wide enough that per-edge fingerprints
    /// cannot interact.
    pub w: u32,
    pub original: Vec<CostTable>,
    /// Total increment: sum over edges of the max per-load cost increase.
    pub eps1: Rat,
}

fn lcm_upto(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc = acc.lcm(&BigInt::from(i));
    }
    acc
}

fn decimal_digits(n: &BigInt) -> u32 {
    n.to_string().trim_start_matches('-').len() as u32
}

/// Tie-breaking perturbation: round every cost up to the 10^-r grid, then give
/// edge i (1-based by edge id) the uniform increment K * 10^-(r + W*i) at
/// every load >= 1, where K = lcm(1..n_max-1) and W = digits(2*K*n_max) + 1.
/// K keeps the per-load share kernel values on a fixed decimal grid while the
/// per-edge windows stay disjoint, so share sums over distinct edge sets
/// cannot collide. The total increment per edge is below 10^-r.
pub fn perturb_for_ties(instance: &GameInstance, r: u32) -> Result<GameInstance, CostError> {
    if !instance.all_finite() {
        return Err(CostError::InfiniteCost);
    }
    let k = lcm_upto(instance.n_max.saturating_sub(1));
    let w = decimal_digits(&(BigInt::from(2) * &k * BigInt::from(instance.n_max))) + 1;
    let mut new_costs = Vec::with_capacity(instance.costs.len());
    let mut eps1 = Rat::zero();
    for (e, table) in instance.costs.iter().enumerate() {
        let i = (e + 1) as u32;
        let increment = Rat::from_big(num_rational::BigRational::new(
            k.clone(),
            BigInt::from(10u32).pow(r + w * i),
        ));
        let mut values = vec![Rat::zero()];
        let mut max_delta = Rat::zero();
        for load in 1..=instance.n_max {
            let rounded = table.get(load).ceil_to_decimal(r);
            let perturbed = rounded + increment.clone();
            let delta = &perturbed - table.get(load);
            if delta > max_delta {
                max_delta = delta;
            }
            values.push(perturbed);
        }
        eps1 += max_delta;
        new_costs.push(CostTable { values });
    }
    let mut out = instance.clone();
    out.perturbation = Some(PerturbRecord {
        r,
        k,
        w,
        original: std::mem::replace(&mut out.costs, new_costs),
        eps1,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn classify_linear() {
        let c = CostTable::from_ints(&[0, 1, 2, 3]).unwrap();
        let f = c.classify();
        assert!(f.concave && f.convex && !f.strictly_concave && !f.constant);
    }

    #[test]
    fn classify_one_step() {
        let c = CostTable::from_ints(&[0, 2, 2, 2]).unwrap();
        let f = c.classify();
        assert!(f.concave && !f.convex && f.constant);
    }

    #[test]
    fn classify_quadratic() {
        let c = CostTable::from_ints(&[0, 1, 4, 9]).unwrap();
        let f = c.classify();
        assert!(f.convex && !f.concave);
    }

    #[test]
    fn classify_capacitated() {
        let c = CostTable::capacitated(Rat::one(), 1, 3);
        let f = c.classify();
        assert!(f.capacitated && !f.concave && !f.convex);
    }

    #[test]
    fn classify_scale_invariant() {
        let c = CostTable::from_ints(&[0, 5, 8, 9]).unwrap();
        let scaled = c.scale(&Rat::ratio(7, 3));
        assert_eq!(c.classify(), scaled.classify());
    }

    #[test]
    fn malformed_tables_rejected() {
        assert!(matches!(
            CostTable::from_ints(&[1, 2]),
            Err(CostError::MalformedTable(_))
        ));
        assert!(matches!(
            CostTable::from_ints(&[0, 3, 2]),
            Err(CostError::MalformedTable(_))
        ));
    }

    fn single_edge_instance(table: CostTable, n_max: usize) -> GameInstance {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1)]).unwrap();
        GameInstance::new(g, vec![table], vec![(0, 1); n_max.min(2)], n_max).unwrap()
    }

    #[test]
    fn perturb_example_from_formula() {
        // r=3, n_max=2 => K=1, W=2; edge 1 increment 10^-5
        let c = CostTable::new(vec![Rat::zero(), "1234/10000".parse().unwrap(), Rat::int(1)])
            .unwrap();
        let inst = single_edge_instance(c, 2);
        let p = perturb_for_ties(&inst, 3).unwrap();
        let rec = p.perturbation.as_ref().unwrap();
        assert_eq!(rec.k, BigInt::from(1));
        assert_eq!(rec.w, 2);
        assert_eq!(*p.cost(0).get(1), "12401/100000".parse().unwrap());
    }

    #[test]
    fn perturb_distinct_edges_distinct_tables() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 0, 1)]).unwrap();
        let c = CostTable::from_ints(&[0, 1, 1]).unwrap();
        let inst = GameInstance::new(g, vec![c.clone(), c], vec![(0, 1), (0, 1)], 2).unwrap();
        let p = perturb_for_ties(&inst, 4).unwrap();
        for load in 1..=2 {
            assert_ne!(p.cost(0).get(load), p.cost(1).get(load));
        }
    }

    #[test]
    fn perturb_total_increment_bounded() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 0, 1), (2, 0, 1)]).unwrap();
        let c = || CostTable::new(vec![Rat::zero(), Rat::ratio(1, 3), Rat::ratio(1, 2)]).unwrap();
        let inst = GameInstance::new(g, vec![c(), c(), c()], vec![(0, 1), (0, 1)], 2).unwrap();
        let p = perturb_for_ties(&inst, 5).unwrap();
        let eps1 = &p.perturbation.as_ref().unwrap().eps1;
        assert!(*eps1 <= Rat::int(3) * Rat::pow10_neg(5));
    }

    #[test]
    fn perturb_rejects_infinite() {
        let inst = single_edge_instance(CostTable::capacitated(Rat::one(), 1, 2), 2);
        assert_eq!(perturb_for_ties(&inst, 3), Err(CostError::InfiniteCost));
    }

    #[test]
    fn strictify_linear() {
        let c = CostTable::from_ints(&[0, 1, 2]).unwrap();
        let out = strictify_concave(&c, &Rat::ratio(1, 10)).unwrap();
        let f = out.classify();
        assert!(f.strictly_concave);
        for load in 1..=2 {
            assert!(out.get(load) >= c.get(load));
            assert!(*out.get(load) <= c.get(load) * &Rat::ratio(11, 10));
        }
    }

    #[test]
    fn strictify_rejects_bad_inputs() {
        let convex = CostTable::from_ints(&[0, 1, 4]).unwrap();
        assert_eq!(
            strictify_concave(&convex, &Rat::one()),
            Err(CostError::NotConcave)
        );
        let lin = CostTable::from_ints(&[0, 1, 2]).unwrap();
        assert_eq!(
            strictify_concave(&lin, &Rat::zero()),
            Err(CostError::InvalidEps)
        );
    }

    #[test]
    fn instance_validation() {
        let g = Graph::new(vec![0, 1, 2], vec![(0, 0, 1)]).unwrap();
        let c = CostTable::from_ints(&[0, 1]).unwrap();
        let err = GameInstance::new(g, vec![c], vec![(0, 2)], 1).unwrap_err();
        assert!(matches!(err, CostError::UnreachablePlayer(0, 0, 2)));
    }

    #[test]
    fn symmetric_and_multicast_flags() {
        let g = Graph::new(vec![0, 1, 2], vec![(0, 0, 2), (1, 1, 2)]).unwrap();
        let c = || CostTable::from_ints(&[0, 1, 1]).unwrap();
        let sym =
            GameInstance::new(g.clone(), vec![c(), c()], vec![(0, 2), (0, 2)], 2).unwrap();
        assert!(sym.is_symmetric() && sym.is_multicast());
        let multi = GameInstance::new(g, vec![c(), c()], vec![(0, 2), (1, 2)], 2).unwrap();
        assert!(!multi.is_symmetric() && multi.is_multicast());
    }
}
