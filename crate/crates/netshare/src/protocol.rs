//! Cost-sharing rules: equal-split, incremental, generic leader-based,
//! static-share, the series-parallel protocol, and Never-Walk-Alone with its
//! overcharged cost tables.
//!
//! A protocol context carries only data derived from (graph, costs, n_max) —
//! never from the active player set — so every rule here is resource-aware.

use crate::cost::{CostTable, GameInstance};
use crate::engine::{OptTable, StrategyProfile};
use crate::graph::EdgeId;
use crate::rat::Rat;
use crate::sp::SPAnnotations;
use std::collections::BTreeMap;

/// Cost shares xi_{ie} for one fixed profile. Players are indexed by their
/// position in the instance's player list; absent entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareMatrix {
    per_player: Vec<BTreeMap<EdgeId, Rat>>,
}

impl ShareMatrix {
    fn new(players: usize) -> Self {
        ShareMatrix {
            per_player: vec![BTreeMap::new(); players],
        }
    }

    fn set(&mut self, player: usize, e: EdgeId, v: Rat) {
        self.per_player[player].insert(e, v);
    }

    pub fn share(&self, player: usize, e: EdgeId) -> Rat {
        self.per_player[player]
            .get(&e)
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn player_total(&self, player: usize) -> Rat {
        self.per_player[player].values().cloned().sum()
    }

    pub fn edge_total(&self, e: EdgeId) -> Rat {
        self.per_player
            .iter()
            .filter_map(|m| m.get(&e).cloned())
            .sum()
    }

    pub fn player_count(&self) -> usize {
        self.per_player.len()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("protocol requires a symmetric instance")]
    NotSymmetric,
    #[error("protocol requires concave costs; edge {0} is not concave")]
    NotConcave(EdgeId),
    #[error("protocol requires finite costs")]
    InfiniteCost,
    #[error("epsilon is undefined: some edge has c(1) = 0")]
    ZeroUnitCost,
    #[error("static share for edge {0} exceeds its cost at optimal load {1}")]
    ShareExceedsCost(EdgeId, usize),
    #[error("share rule for edge {0} exceeds the edge cost at load {1}")]
    RuleExceedsCost(EdgeId, usize),
}

/// Highest-priority user of an edge: the minimum player index (the global
/// ordering is ascending player index throughout).
pub fn leader(profile: &StrategyProfile, e: EdgeId) -> Option<usize> {
    (0..profile.player_count()).find(|&i| profile.path(i).contains(e))
}

fn users_per_edge(profile: &StrategyProfile, m: usize) -> Vec<Vec<usize>> {
    let mut users = vec![Vec::new(); m];
    for i in 0..profile.player_count() {
        for &e in profile.path(i).edges() {
            users[e].push(i);
        }
    }
    users
}

/// Shapley baseline: each user of an edge pays c_e(l)/l. A +inf cost yields
/// +inf shares, which is legal (capacitated lower-bound instances rely on it).
pub fn equal_split_shares(instance: &GameInstance, profile: &StrategyProfile) -> ShareMatrix {
    let mut xi = ShareMatrix::new(profile.player_count());
    for (e, users) in users_per_edge(profile, instance.graph.edge_count())
        .into_iter()
        .enumerate()
    {
        let l = users.len();
        if l == 0 {
            continue;
        }
        let each = match instance.cost(e).get(l) {
            Rat::Inf => Rat::Inf,
            c => c / &Rat::int(l as i64),
        };
        for i in users {
            xi.set(i, e, each.clone());
        }
    }
    xi
}

/// Incremental (Moulin) shares: player i pays their marginal contribution
/// given only the users preceding them in the global ordering. The sum over an
/// edge's users telescopes to c_e(l).
pub fn incremental_shares(instance: &GameInstance, profile: &StrategyProfile) -> ShareMatrix {
    let mut xi = ShareMatrix::new(profile.player_count());
    for (e, users) in users_per_edge(profile, instance.graph.edge_count())
        .into_iter()
        .enumerate()
    {
        let c = instance.cost(e);
        // users are already in ascending index order, i.e. priority order
        for (prior, &i) in users.iter().enumerate() {
            xi.set(i, e, c.get(prior + 1) - c.get(prior));
        }
    }
    xi
}

/// A leader-based rule: per edge, the charge psi_e(l) <= c_e(l) the leader
/// pays at load l; loads are indexed 1..n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderShareRule {
    psi: Vec<Vec<Rat>>,
}

impl LeaderShareRule {
    pub fn new(psi: Vec<Vec<Rat>>, instance: &GameInstance) -> Result<Self, ProtocolError> {
        for (e, table) in psi.iter().enumerate() {
            for (idx, v) in table.iter().enumerate() {
                if v > instance.cost(e).get(idx + 1) {
                    return Err(ProtocolError::RuleExceedsCost(e, idx + 1));
                }
            }
        }
        Ok(LeaderShareRule { psi })
    }

    pub fn charge(&self, e: EdgeId, load: usize) -> &Rat {
        &self.psi[e][load - 1]
    }
}

/// Generic leader-based shares: the leader pays psi_e(l), every other user
/// pays an equal part of the remainder (c_e(l) - psi_e(l)) / (l - 1).
pub fn leader_based_shares(
    instance: &GameInstance,
    profile: &StrategyProfile,
    rule: &LeaderShareRule,
) -> ShareMatrix {
    let mut xi = ShareMatrix::new(profile.player_count());
    for (e, users) in users_per_edge(profile, instance.graph.edge_count())
        .into_iter()
        .enumerate()
    {
        let l = users.len();
        if l == 0 {
            continue;
        }
        let psi = rule.charge(e, l).clone();
        let rest = if l == 1 {
            Rat::zero()
        } else {
            &(instance.cost(e).get(l) - &psi) / &Rat::int((l - 1) as i64)
        };
        for (pos, &i) in users.iter().enumerate() {
            xi.set(i, e, if pos == 0 { psi.clone() } else { rest.clone() });
        }
    }
    xi
}

/// Static-share rule: a single value psi_e per edge, charged to the leader
/// whenever the edge lies on the optimal path for its current load; off the
/// optimal path the leader pays the full edge cost.
pub fn static_share_rule(
    instance: &GameInstance,
    opt: &OptTable,
    psi: &BTreeMap<EdgeId, Rat>,
) -> Result<LeaderShareRule, ProtocolError> {
    let mut tables = Vec::with_capacity(instance.graph.edge_count());
    for e in 0..instance.graph.edge_count() {
        let share = psi.get(&e).cloned().unwrap_or_else(Rat::zero);
        let mut table = Vec::with_capacity(opt.max_load());
        for l in 1..=opt.max_load() {
            if opt.contains(e, l) {
                if share > *instance.cost(e).get(l) {
                    return Err(ProtocolError::ShareExceedsCost(e, l));
                }
                table.push(share.clone());
            } else {
                table.push(instance.cost(e).get(l).clone());
            }
        }
        tables.push(table);
    }
    LeaderShareRule::new(tables, instance)
}

/// The series-parallel protocol: on edges off the optimal path for their load
/// the leader pays the whole cost and everyone else pays zero; on optimal
/// edges the leader pays psi_e and the others split the remainder evenly.
pub fn spg_protocol_shares(
    instance: &GameInstance,
    profile: &StrategyProfile,
    ann: &SPAnnotations,
    opt: &OptTable,
) -> ShareMatrix {
    let mut xi = ShareMatrix::new(profile.player_count());
    for (e, users) in users_per_edge(profile, instance.graph.edge_count())
        .into_iter()
        .enumerate()
    {
        let l = users.len();
        if l == 0 {
            continue;
        }
        let c = instance.cost(e).get(l);
        let (lead, rest) = if !opt.contains(e, l) {
            (c.clone(), Rat::zero())
        } else {
            let psi = ann.psi_e[&e].clone();
            let rest = if l == 1 {
                Rat::zero()
            } else {
                &(c - &psi) / &Rat::int((l - 1) as i64)
            };
            (psi, rest)
        };
        for (pos, &i) in users.iter().enumerate() {
            xi.set(i, e, if pos == 0 { lead.clone() } else { rest.clone() });
        }
    }
    xi
}

/// Static data of the Never-Walk-Alone protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct NwaContext {
    pub opt: OptTable,
    /// Path-independent edge weights.
    pub w: Vec<u64>,
    /// C > 2 * sum_e c_e(n_max); fixed as that bound plus one.
    pub big_c: Rat,
    /// eps < min_e c_e(1) / sum_e w_e; fixed at half the bound.
    pub eps: Rat,
    /// Overcharged tables c-hat, one per edge.
    pub chat: Vec<CostTable>,
}

impl NwaContext {
    /// eps_e(x) = (w_e * C - x) * eps / C: the leader's vanishing share.
    pub fn eps_e(&self, e: EdgeId, x: &Rat) -> Rat {
        &(&(&Rat::int(self.w[e] as i64) * &self.big_c) - x) * &(&self.eps / &self.big_c)
    }

    /// zeta_e(l): the flat per-user charge before the leader discount.
    pub fn zeta(&self, instance: &GameInstance, e: EdgeId, l: usize) -> Rat {
        let c = instance.cost(e).get(l);
        if l == 1 || !self.opt.contains(e, l) {
            Rat::int(2) * c.clone()
        } else {
            c / &Rat::int((l - 1) as i64)
        }
    }

    /// eps_2 = sum_e eps_e(0), the total leader-share slack in the price of
    /// anarchy bound.
    pub fn eps2(&self) -> Rat {
        (0..self.w.len()).map(|e| self.eps_e(e, &Rat::zero())).sum()
    }
}

/// Build the NWA context: weights, optimal-path table at full load, the
/// constants C and eps, and the overcharged tables. Requires a symmetric
/// instance with finite concave costs and positive unit costs.
pub fn nwa_context(instance: &GameInstance) -> Result<NwaContext, ProtocolError> {
    if !instance.is_symmetric() {
        return Err(ProtocolError::NotSymmetric);
    }
    if !instance.all_finite() {
        return Err(ProtocolError::InfiniteCost);
    }
    for (e, t) in instance.costs().iter().enumerate() {
        if !t.classify().concave {
            return Err(ProtocolError::NotConcave(e));
        }
    }
    let min_unit = instance
        .costs()
        .iter()
        .map(|t| t.get(1).clone())
        .min()
        .expect("instance has edges");
    if min_unit.is_zero() {
        return Err(ProtocolError::ZeroUnitCost);
    }
    let weights = instance
        .graph
        .assign_weights()
        .expect("instance graph is a DAG");
    let opt = crate::engine::opt_path_table(instance, instance.n_max)
        .expect("symmetric finite instance has an optimal path table");
    let total_full: Rat = instance
        .costs()
        .iter()
        .map(|t| t.get(instance.n_max).clone())
        .sum();
    let big_c = Rat::int(2) * total_full + Rat::one();
    let w_sum: i64 = weights.w.iter().map(|&w| w as i64).sum();
    let eps = &min_unit / &Rat::int(2 * w_sum);
    let mut ctx = NwaContext {
        opt,
        w: weights.w,
        big_c,
        eps,
        chat: Vec::new(),
    };
    let mut chat = Vec::with_capacity(instance.graph.edge_count());
    for e in 0..instance.graph.edge_count() {
        let c = instance.cost(e);
        let mut values = vec![Rat::zero()];
        for l in 1..=instance.n_max {
            let v = if l == 1 {
                Rat::int(2) * c.get(1).clone()
            } else if !ctx.opt.contains(e, l) {
                let zeta = Rat::int(2) * c.get(l).clone();
                Rat::int(2 * (l as i64 - 1)) * c.get(l).clone() + ctx.eps_e(e, &zeta)
            } else {
                let zeta = c.get(l) / &Rat::int((l - 1) as i64);
                c.get(l) + &ctx.eps_e(e, &zeta)
            };
            debug_assert!(v >= *c.get(l), "overcharged cost below original");
            values.push(v);
        }
        // c-hat need not be monotone: the doubled load-1 value can exceed the
        // lightly overcharged load-2 value on optimal edges
        chat.push(CostTable::new_unchecked(values));
    }
    ctx.chat = chat;
    Ok(ctx)
}

/// NWA shares for a profile: non-leaders and sole users pay zeta_e, a leader
/// with company pays eps_e(zeta_e). Per edge the shares sum to c-hat exactly.
pub fn nwa_shares(
    ctx: &NwaContext,
    instance: &GameInstance,
    profile: &StrategyProfile,
) -> ShareMatrix {
    let mut xi = ShareMatrix::new(profile.player_count());
    for (e, users) in users_per_edge(profile, instance.graph.edge_count())
        .into_iter()
        .enumerate()
    {
        let l = users.len();
        if l == 0 {
            continue;
        }
        let zeta = ctx.zeta(instance, e, l);
        for (pos, &i) in users.iter().enumerate() {
            let v = if pos == 0 && l > 1 {
                ctx.eps_e(e, &zeta)
            } else {
                zeta.clone()
            };
            xi.set(i, e, v);
        }
        debug_assert_eq!(xi.edge_total(e), *ctx.chat[e].get(l));
    }
    xi
}

/// A protocol with its precomputed context, as consumed by the equilibrium
/// engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Protocol {
    EqualSplit,
    Incremental,
    LeaderBased(LeaderShareRule),
    Spg { ann: SPAnnotations, opt: OptTable },
    Nwa(NwaContext),
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::EqualSplit => "equal-split",
            Protocol::Incremental => "incremental",
            Protocol::LeaderBased(_) => "leader-based",
            Protocol::Spg { .. } => "spg",
            Protocol::Nwa(_) => "nwa",
        }
    }

    /// Whether equilibrium costs are measured on inflated tables.
    pub fn overcharging(&self) -> bool {
        matches!(self, Protocol::Nwa(_))
    }

    /// Tables equilibrium costs are evaluated on: c-hat for NWA, the instance
    /// tables otherwise.
    pub fn eval_tables<'a>(&'a self, instance: &'a GameInstance) -> &'a [CostTable] {
        match self {
            Protocol::Nwa(ctx) => &ctx.chat,
            _ => instance.costs(),
        }
    }

    pub fn eps2(&self) -> Option<Rat> {
        match self {
            Protocol::Nwa(ctx) => Some(ctx.eps2()),
            _ => None,
        }
    }

    pub fn shares(&self, instance: &GameInstance, profile: &StrategyProfile) -> ShareMatrix {
        match self {
            Protocol::EqualSplit => equal_split_shares(instance, profile),
            Protocol::Incremental => incremental_shares(instance, profile),
            Protocol::LeaderBased(rule) => leader_based_shares(instance, profile, rule),
            Protocol::Spg { ann, opt } => spg_protocol_shares(instance, profile, ann, opt),
            Protocol::Nwa(ctx) => nwa_shares(ctx, instance, profile),
        }
    }

    /// Player i's total share when routing on `path` while everyone else is
    /// fixed: `others[e]` lists the other users of each edge in ascending
    /// index. Avoids building the whole share matrix per deviation.
    pub fn path_total(
        &self,
        instance: &GameInstance,
        others: &[Vec<usize>],
        i: usize,
        path: &crate::graph::Path,
    ) -> Rat {
        let mut total = Rat::zero();
        for &e in path.edges() {
            let l = others[e].len() + 1;
            let is_leader = others[e].first().map_or(true, |&j| j > i);
            let c = instance.cost(e).get(l);
            let share = match self {
                Protocol::EqualSplit => c / &Rat::int(l as i64),
                Protocol::Incremental => {
                    let prior = others[e].iter().filter(|&&j| j < i).count();
                    let next = instance.cost(e).get(prior + 1);
                    if next.is_infinite() {
                        Rat::Inf
                    } else {
                        next - instance.cost(e).get(prior)
                    }
                }
                Protocol::LeaderBased(rule) => {
                    if is_leader {
                        rule.charge(e, l).clone()
                    } else {
                        &(c - rule.charge(e, l)) / &Rat::int((l - 1) as i64)
                    }
                }
                Protocol::Spg { ann, opt } => {
                    if !opt.contains(e, l) {
                        if is_leader {
                            c.clone()
                        } else {
                            Rat::zero()
                        }
                    } else if is_leader {
                        ann.psi_e[&e].clone()
                    } else {
                        &(c - &ann.psi_e[&e]) / &Rat::int((l - 1) as i64)
                    }
                }
                Protocol::Nwa(ctx) => {
                    let zeta = ctx.zeta(instance, e, l);
                    if is_leader && l > 1 {
                        ctx.eps_e(e, &zeta)
                    } else {
                        zeta
                    }
                }
            };
            total += share;
        }
        total
    }
}
