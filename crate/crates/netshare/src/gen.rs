//! Instance generators: the lower-bound networks used by the theory
//! (multicast hub, capacitated ladders, the overcharging Braess graph, the
//! static-share Braess variant) and seeded random families for property tests.
//!
//! Edge-id layouts are fixed and documented per generator so that fact checks
//! can reference edges by id.

use crate::cost::{CostTable, GameInstance};
use crate::graph::{Graph, VertexId};
use crate::rat::{sqrt_approx, Rat};
use crate::sp::SpDesc;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenError {
    #[error("k must be at least 6, got {0}")]
    KTooSmall(usize),
    #[error("n must be at least {1}, got {0}")]
    NTooSmall(usize, usize),
    #[error("bad parameter: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Concave,
    StrictlyConcave,
    Convex,
    Constant,
}

impl std::str::FromStr for Shape {
    type Err = GenError;
    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "concave" => Ok(Shape::Concave),
            "strictly-concave" => Ok(Shape::StrictlyConcave),
            "convex" => Ok(Shape::Convex),
            "constant" => Ok(Shape::Constant),
            other => Err(GenError::BadParams(format!("unknown shape {:?}", other))),
        }
    }
}

/// Multicast hub network: sources s_1..s_n, sink t, hub v. Each s_i has a
/// direct constant-1 edge to t and a free edge to v; the hub edge (v,t) costs
/// `c`. Vertex ids: t=0, v=1, s_i=1+i. Edge ids: 2(i-1) = (s_i,t),
/// 2(i-1)+1 = (s_i,v) for i=1..n, then 2n = (v,t).
pub fn gen_multicast_const_lb(n: usize, c: Rat) -> Result<GameInstance, GenError> {
    if n < 1 {
        return Err(GenError::NTooSmall(n, 1));
    }
    let mut vertices: Vec<VertexId> = vec![0, 1];
    vertices.extend((1..=n).map(|i| (1 + i) as VertexId));
    let mut edges = Vec::new();
    let mut costs = Vec::new();
    for i in 1..=n {
        let s_i = (1 + i) as VertexId;
        edges.push((edges.len(), s_i, 0));
        costs.push(CostTable::constant(Rat::one(), n));
        edges.push((edges.len(), s_i, 1));
        costs.push(CostTable::constant(Rat::zero(), n));
    }
    edges.push((edges.len(), 1, 0));
    costs.push(CostTable::constant(c, n));
    let graph = Graph::new(vertices, edges).expect("hub layout is a DAG");
    let players = (1..=n).map(|i| ((1 + i) as VertexId, 0)).collect();
    let mut inst = GameInstance::new(graph, costs, players, n)
        .expect("hub instance is well-formed");
    inst.metadata.insert("family".into(), "multicast-const-lb".into());
    Ok(inst)
}

/// Capacitated zig-zag ladder (all edges +inf at load 2). Vertex ids: s=0,
/// t=1, v_i=1+i, u_i=n+1+i. Edge ids: 0 = (s,t) cost 1; 1..n = (s,v_i) cost 0;
/// n+1..2n = (v_i,u_i) cost 1; 2n+1..3n = (u_i,t) cost 0; 3n+1..4n-1 =
/// (v_i,u_{i-1}) cost 0 for i=2..n. Generated with the full universe of n+1
/// players; use `with_player_count` for smaller active sets.
pub fn gen_dag_convex_lb(n: usize) -> Result<GameInstance, GenError> {
    if n < 2 {
        return Err(GenError::NTooSmall(n, 2));
    }
    let n_max = n + 1;
    let v_i = |i: usize| (1 + i) as VertexId;
    let u_i = |i: usize| (n + 1 + i) as VertexId;
    let mut vertices: Vec<VertexId> = vec![0, 1];
    vertices.extend((1..=n).map(v_i));
    vertices.extend((1..=n).map(u_i));
    let mut edges = Vec::new();
    let mut costs = Vec::new();
    let push = |edges: &mut Vec<_>, costs: &mut Vec<_>, tail, head, unit: i64| {
        edges.push((edges.len(), tail, head));
        costs.push(CostTable::capacitated(Rat::int(unit), 1, n_max));
    };
    push(&mut edges, &mut costs, 0, 1, 1);
    for i in 1..=n {
        push(&mut edges, &mut costs, 0, v_i(i), 0);
    }
    for i in 1..=n {
        push(&mut edges, &mut costs, v_i(i), u_i(i), 1);
    }
    for i in 1..=n {
        push(&mut edges, &mut costs, u_i(i), 1, 0);
    }
    for i in 2..=n {
        push(&mut edges, &mut costs, v_i(i), u_i(i - 1), 0);
    }
    let graph = Graph::new(vertices, edges).expect("ladder is a DAG");
    let mut inst = GameInstance::new(graph, costs, vec![(0, 1); n_max], n_max)
        .expect("ladder instance is well-formed");
    inst.metadata.insert("family".into(), "dag-convex-lb".into());
    Ok(inst)
}

/// Braess graph for the overcharging lower bound, q = (sqrt(33)-1)/8
/// approximated within 10^-digits; all edges +inf at load 2. Vertex ids:
/// s=0, v=1, u=2, t=3. Edge ids: 0=(s,v) q; 1=(s,u) 0; 2=(v,t) 0; 3=(u,t) q;
/// 4=(u,v) 0; 5=(s,t) 1. Universe of 3 players.
pub fn gen_overcharge_lb(digits: u32) -> Result<GameInstance, GenError> {
    if digits < 6 {
        return Err(GenError::BadParams("digits must be at least 6".into()));
    }
    let q = &(sqrt_approx(33, digits) - Rat::one()) / &Rat::int(8);
    let n_max = 3;
    let layout: [(VertexId, VertexId, Rat); 6] = [
        (0, 1, q.clone()),
        (0, 2, Rat::zero()),
        (1, 3, Rat::zero()),
        (2, 3, q.clone()),
        (2, 1, Rat::zero()),
        (0, 3, Rat::one()),
    ];
    let mut edges = Vec::new();
    let mut costs = Vec::new();
    for (tail, head, c) in layout {
        edges.push((edges.len(), tail, head));
        costs.push(CostTable::capacitated(c, 1, n_max));
    }
    let graph = Graph::new(vec![0, 1, 2, 3], edges).expect("Braess graph is a DAG");
    let mut inst = GameInstance::new(graph, costs, vec![(0, 3); 3], n_max)
        .expect("Braess instance is well-formed");
    inst.metadata.insert("family".into(), "overcharge-lb".into());
    inst.metadata.insert("q".into(), q.to_string());
    inst.metadata.insert("q_digits".into(), digits.to_string());
    Ok(inst)
}

/// Braess variant with r = 2^k parallel (s,u) edges for the static-share
/// lower bound. Vertex ids: s=0, v=1, u=2, t=3. Edge ids: 0 = (s,v) with
/// cost min(l,k); 1..r = e_j with c_j(l) = l/(j k^2) + H_{j-1}/k + eps_j and
/// eps_j = j*10^-(2k+4); r+1 = (v,u) cost 0; r+2 = (u,t) cost 2k;
/// r+3 = (v,t) cost l.
///
/// The formal player universe is r^2 k^2 players, far beyond what the tables
/// need to expose: the optimal-path regimes stabilize at lstar, the first
/// load where c_r exceeds k. Tables stop at n_max = lstar + k, with the
/// conceptual universe recorded in metadata.
pub fn gen_static_share_lb(k: usize) -> Result<GameInstance, GenError> {
    if k < 6 {
        return Err(GenError::KTooSmall(k));
    }
    let r = 1usize << k;
    let kk = Rat::int((k * k) as i64);
    let eps_unit = Rat::pow10_neg((2 * k + 4) as u32);
    // harmonic numbers H_0..H_{r-1}
    let mut harmonic = Vec::with_capacity(r);
    let mut h = Rat::zero();
    harmonic.push(h.clone());
    for j in 1..r {
        h += Rat::ratio(1, j as i64);
        harmonic.push(h.clone());
    }
    // lstar = min l with c_r(l) > k, i.e. l > r k^2 (k - H_{r-1}/k - eps_r)
    let base_r =
        &harmonic[r - 1] / &Rat::int(k as i64) + Rat::int(r as i64) * eps_unit.clone();
    let threshold = Rat::int((r * k * k) as i64) * (Rat::int(k as i64) - base_r);
    let lstar = {
        let t = threshold.as_finite().expect("finite threshold");
        let floor = t.floor().to_integer();
        use num_traits::ToPrimitive;
        floor.to_usize().expect("lstar fits in usize") + 1
    };
    let n_max = lstar + k;
    let mut edges = Vec::new();
    let mut costs = Vec::new();
    // c_0 on (s,v): l capped at k
    edges.push((0, 0u32, 1u32));
    let mut c0 = vec![Rat::zero()];
    for l in 1..=n_max {
        c0.push(Rat::int(l.min(k) as i64));
    }
    costs.push(CostTable::new(c0).expect("c_0 well-formed"));
    // e_j on (s,u)
    for j in 1..=r {
        edges.push((edges.len(), 0, 2));
        let slope = Rat::one() / (Rat::int(j as i64) * kk.clone());
        let base = &harmonic[j - 1] / &Rat::int(k as i64)
            + Rat::int(j as i64) * eps_unit.clone();
        let mut table = Vec::with_capacity(n_max + 1);
        table.push(Rat::zero());
        let mut v = base + slope.clone();
        for _ in 1..=n_max {
            table.push(v.clone());
            v += slope.clone();
        }
        costs.push(CostTable::new(table).expect("c_j well-formed"));
    }
    // (v,u) free, (u,t) constant 2k, (v,t) linear
    edges.push((edges.len(), 1, 2));
    costs.push(CostTable::constant(Rat::zero(), n_max));
    edges.push((edges.len(), 2, 3));
    costs.push(CostTable::constant(Rat::int(2 * k as i64), n_max));
    edges.push((edges.len(), 1, 3));
    let mut vt = vec![Rat::zero()];
    vt.extend((1..=n_max).map(|l| Rat::int(l as i64)));
    costs.push(CostTable::new(vt).expect("vt well-formed"));
    let graph = Graph::new(vec![0, 1, 2, 3], edges).expect("Braess variant is a DAG");
    let mut inst = GameInstance::new(graph, costs, vec![(0, 3)], n_max)
        .expect("static-share instance is well-formed");
    inst.metadata.insert("family".into(), "static-share-lb".into());
    inst.metadata.insert("k".into(), k.to_string());
    inst.metadata.insert("r".into(), r.to_string());
    inst.metadata.insert("lstar".into(), lstar.to_string());
    inst.metadata
        .insert("universe".into(), (r * r * k * k).to_string());
    Ok(inst)
}

/// Two-source capacitated ladder (all edges +inf at load 2); the (s_2,t) edge
/// costs sqrt(n). Vertex ids: t=0, s_1=1, s_2=2, v_i=2+i, u_i=n+2+i. Edge
/// ids: 0 = (s_2,t) sqrt(n); 1 = (s_2,v_1) 0; 2..n = (s_1,v_i) 0 for i=2..n;
/// n+1..2n = (v_i,u_i) 1; 2n+1..3n = (u_i,t) 0; 3n+1..4n-1 = (v_i,u_{i-1}) 0
/// for i=2..n. Players: index 0 from s_2, 1..n-1 from s_1, n from s_2.
pub fn gen_multicast_convex_lb(n: usize) -> Result<GameInstance, GenError> {
    if n < 4 {
        return Err(GenError::NTooSmall(n, 4));
    }
    let root = sqrt_approx(n as u64, 12);
    let n_max = n + 1;
    let v_i = |i: usize| (2 + i) as VertexId;
    let u_i = |i: usize| (n + 2 + i) as VertexId;
    let mut vertices: Vec<VertexId> = vec![0, 1, 2];
    vertices.extend((1..=n).map(v_i));
    vertices.extend((1..=n).map(u_i));
    let mut edges = Vec::new();
    let mut costs = Vec::new();
    let push = |edges: &mut Vec<_>, costs: &mut Vec<_>, tail, head, c: Rat| {
        edges.push((edges.len(), tail, head));
        costs.push(CostTable::capacitated(c, 1, n_max));
    };
    push(&mut edges, &mut costs, 2, 0, root.clone());
    push(&mut edges, &mut costs, 2, v_i(1), Rat::zero());
    for i in 2..=n {
        push(&mut edges, &mut costs, 1, v_i(i), Rat::zero());
    }
    for i in 1..=n {
        push(&mut edges, &mut costs, v_i(i), u_i(i), Rat::one());
    }
    for i in 1..=n {
        push(&mut edges, &mut costs, u_i(i), 0, Rat::zero());
    }
    for i in 2..=n {
        push(&mut edges, &mut costs, v_i(i), u_i(i - 1), Rat::zero());
    }
    let graph = Graph::new(vertices, edges).expect("two-source ladder is a DAG");
    let mut players = vec![(2, 0)];
    players.extend(vec![(1, 0); n - 1]);
    players.push((2, 0));
    let mut inst = GameInstance::new(graph, costs, players, n_max)
        .expect("two-source instance is well-formed");
    inst.metadata
        .insert("family".into(), "multicast-convex-lb".into());
    inst.metadata.insert("sqrt_n".into(), root.to_string());
    Ok(inst)
}

fn random_table(rng: &mut ChaCha8Rng, shape: Shape, n_max: usize) -> CostTable {
    let mut marginals: Vec<i64> = Vec::with_capacity(n_max);
    match shape {
        Shape::StrictlyConcave => {
            // distinct descending marginals; the largest is >= n_max + 1 >= 2
            // so unit costs stay >= 2
            let mut pool: Vec<i64> = (1..=50).collect();
            for _ in 0..n_max {
                let idx = rng.gen_range(0..pool.len());
                marginals.push(pool.swap_remove(idx));
            }
            marginals.sort_unstable_by(|a, b| b.cmp(a));
        }
        Shape::Concave => {
            for _ in 0..n_max {
                marginals.push(rng.gen_range(2..=50));
            }
            marginals.sort_unstable_by(|a, b| b.cmp(a));
        }
        Shape::Convex => {
            for _ in 0..n_max {
                marginals.push(rng.gen_range(1..=20));
            }
            marginals.sort_unstable();
        }
        Shape::Constant => {
            marginals.push(rng.gen_range(1..=20));
            marginals.extend(std::iter::repeat(0).take(n_max - 1));
        }
    }
    let mut values = vec![0i64];
    for m in marginals {
        values.push(values.last().unwrap() + m);
    }
    CostTable::from_ints(&values).expect("generated table is well-formed")
}

/// Seeded random symmetric DAG instance: <= `max_vertices` vertices,
/// <= `max_edges` edges, s = 0, t = last vertex, at most `max_paths` s-t
/// paths (resampled otherwise), costs drawn per shape.
pub fn random_dag_instance(
    seed: u64,
    max_vertices: usize,
    max_edges: usize,
    players: usize,
    shape: Shape,
    max_paths: usize,
) -> GameInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v = rng.gen_range(3..=max_vertices.max(3)) as VertexId;
        let vertices: Vec<VertexId> = (0..v).collect();
        let mut edges: Vec<(usize, VertexId, VertexId)> = Vec::new();
        // backbone: a monotone s-t path through a random vertex subset
        let mut backbone = vec![0];
        for mid in 1..v - 1 {
            if rng.gen_bool(0.7) {
                backbone.push(mid);
            }
        }
        backbone.push(v - 1);
        for w in backbone.windows(2) {
            edges.push((edges.len(), w[0], w[1]));
        }
        let target = rng.gen_range(edges.len()..=max_edges.max(edges.len()));
        while edges.len() < target {
            let a = rng.gen_range(0..v - 1);
            let b = rng.gen_range(a + 1..v);
            edges.push((edges.len(), a, b));
        }
        let graph = Graph::new(vertices, edges).expect("forward edges form a DAG");
        match graph.enumerate_paths(0, v - 1, max_paths) {
            Ok(paths) if !paths.is_empty() => {}
            _ => continue, // unreachable or too many paths: resample
        }
        let costs = (0..graph.edge_count())
            .map(|_| random_table(&mut rng, shape, players))
            .collect();
        let mut inst =
            GameInstance::new(graph, costs, vec![(0, v - 1); players], players)
                .expect("random instance is well-formed");
        inst.metadata.insert("family".into(), "random-dag".into());
        inst.metadata.insert("seed".into(), seed.to_string());
        return inst;
    }
}

fn random_sp_desc(
    rng: &mut ChaCha8Rng,
    budget: usize,
    src: VertexId,
    sink: VertexId,
    next_vertex: &mut VertexId,
    edges: &mut Vec<(usize, VertexId, VertexId)>,
) -> SpDesc {
    if budget == 1 {
        edges.push((edges.len(), src, sink));
        return SpDesc::Edge(edges.len() - 1);
    }
    let left = rng.gen_range(1..budget);
    if rng.gen_bool(0.5) {
        let mid = *next_vertex;
        *next_vertex += 1;
        let a = random_sp_desc(rng, left, src, mid, next_vertex, edges);
        let b = random_sp_desc(rng, budget - left, mid, sink, next_vertex, edges);
        SpDesc::series(a, b)
    } else {
        let a = random_sp_desc(rng, left, src, sink, next_vertex, edges);
        let b = random_sp_desc(rng, budget - left, src, sink, next_vertex, edges);
        SpDesc::parallel(a, b)
    }
}

fn sp_path_count(desc: &SpDesc) -> usize {
    match desc {
        SpDesc::Edge(_) => 1,
        SpDesc::Series(a, b) => sp_path_count(a) * sp_path_count(b),
        SpDesc::Parallel(a, b) => sp_path_count(a) + sp_path_count(b),
    }
}

/// Seeded random series-parallel instance with its composition tree:
/// 2 <= edges <= `max_edges`, at most `max_paths` s-t paths, terminals
/// s = 0, t = 1.
pub fn random_spg_instance(
    seed: u64,
    max_edges: usize,
    players: usize,
    shape: Shape,
    max_paths: usize,
) -> (GameInstance, SpDesc) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let budget = rng.gen_range(2..=max_edges.max(2));
        let mut next_vertex: VertexId = 2;
        let mut edges = Vec::new();
        let desc = random_sp_desc(&mut rng, budget, 0, 1, &mut next_vertex, &mut edges);
        if sp_path_count(&desc) > max_paths {
            continue;
        }
        let vertices: Vec<VertexId> = (0..next_vertex).collect();
        let graph = Graph::new(vertices, edges).expect("SP rendering is a DAG");
        let costs = (0..graph.edge_count())
            .map(|_| random_table(&mut rng, shape, players))
            .collect();
        let mut inst = GameInstance::new(graph, costs, vec![(0, 1); players], players)
            .expect("random SPG is well-formed");
        inst.metadata.insert("family".into(), "random-spg".into());
        inst.metadata.insert("seed".into(), seed.to_string());
        return (inst, desc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{brute_force_optimum, profile_cost, StrategyProfile};
    use crate::graph::Path;
    use crate::sp::parse_sp_tree;

    #[test]
    fn multicast_const_shape() {
        let inst = gen_multicast_const_lb(5, Rat::one()).unwrap();
        assert_eq!(inst.graph.vertices().len(), 7);
        assert_eq!(inst.graph.edge_count(), 11);
        assert!(inst.is_multicast() && !inst.is_symmetric());
        let (_, opt) = brute_force_optimum(&inst, 1_000_000).unwrap();
        assert_eq!(opt, Rat::one());
        // all-direct profile costs n
        let direct = StrategyProfile::new(
            &inst,
            (0..5)
                .map(|i| Path::from_edges(vec![2 * i], &inst.graph).unwrap())
                .collect(),
        )
        .unwrap();
        assert_eq!(profile_cost(&direct, inst.costs()), Rat::int(5));
    }

    #[test]
    fn multicast_const_single_player() {
        let inst = gen_multicast_const_lb(1, Rat::ratio(1, 2)).unwrap();
        let (_, opt) = brute_force_optimum(&inst, 1000).unwrap();
        assert_eq!(opt, Rat::ratio(1, 2));
        let inst = gen_multicast_const_lb(1, Rat::int(3)).unwrap();
        let (_, opt) = brute_force_optimum(&inst, 1000).unwrap();
        assert_eq!(opt, Rat::one());
    }

    #[test]
    fn dag_convex_lb_optima() {
        let inst = gen_dag_convex_lb(3).unwrap();
        let (_, opt4) = brute_force_optimum(&inst, 10_000_000).unwrap();
        assert_eq!(opt4, Rat::int(4)); // n+1 players pay n+1
        let three = inst.with_player_count(3).unwrap();
        let (_, opt3) = brute_force_optimum(&three, 1_000_000).unwrap();
        assert_eq!(opt3, Rat::one());
    }

    #[test]
    fn dag_convex_lb_straight_profile() {
        let n = 3;
        let inst = gen_dag_convex_lb(n).unwrap().with_player_count(n).unwrap();
        // player i on s -> v_{i+1} -> u_{i+1} -> t
        let paths = (0..n)
            .map(|i| {
                Path::from_edges(
                    vec![1 + i, n + 1 + i, 2 * n + 1 + i],
                    &inst.graph,
                )
                .unwrap()
            })
            .collect();
        let straight = StrategyProfile::new(&inst, paths).unwrap();
        assert_eq!(profile_cost(&straight, inst.costs()), Rat::int(n as i64));
    }

    #[test]
    fn overcharge_lb_optima() {
        let inst = gen_overcharge_lb(12).unwrap();
        let q: Rat = inst.metadata["q"].parse().unwrap();
        let (_, opt3) = brute_force_optimum(&inst, 100_000).unwrap();
        assert_eq!(opt3, Rat::int(2) * q.clone() + Rat::one());
        let two = inst.with_player_count(2).unwrap();
        let (_, opt2) = brute_force_optimum(&two, 10_000).unwrap();
        assert_eq!(opt2, Rat::one());
        // ratio identity (q+2)/(2q+1) = 2q, exact for sqrt(33)
        let lhs = &(&q + &Rat::int(2)) / &(Rat::int(2) * q.clone() + Rat::one());
        let diff = (lhs - Rat::int(2) * q).abs();
        assert!(diff < Rat::pow10_neg(9));
    }

    #[test]
    fn static_share_lb_small_checks() {
        let inst = gen_static_share_lb(6).unwrap();
        let k = 6i64;
        assert_eq!(inst.graph.edge_count(), 64 + 4);
        // c_1(l) = l/36 + eps_1 (H_0 = 0)
        let c1 = inst.cost(1);
        let eps1 = Rat::pow10_neg(16);
        assert_eq!(*c1.get(1), Rat::ratio(1, 36) + eps1.clone());
        assert_eq!(*c1.get(72), Rat::int(2) + eps1);
        // c_j < c_{j+1} for l <= (j+1)k, spot-checked at j=3, l=24
        assert!(inst.cost(3).get(24) < inst.cost(4).get(24));
        // lstar: c_r first exceeds k
        let lstar: usize = inst.metadata["lstar"].parse().unwrap();
        let cr = inst.cost(64);
        assert!(*cr.get(lstar) > Rat::int(k));
        assert!(*cr.get(lstar - 1) <= Rat::int(k));
    }

    #[test]
    fn static_share_lb_rejects_small_k() {
        assert_eq!(gen_static_share_lb(5), Err(GenError::KTooSmall(5)));
    }

    #[test]
    fn multicast_convex_lb_optima() {
        let n = 4;
        let inst = gen_multicast_convex_lb(n).unwrap();
        let root: Rat = inst.metadata["sqrt_n"].parse().unwrap();
        assert_eq!(root, Rat::int(2)); // exact for a perfect square
        let (_, opt5) = brute_force_optimum(&inst, 10_000_000).unwrap();
        assert_eq!(opt5, Rat::int(n as i64) + root);
        // single s_2 player: optimum 1 via s_2 v_1 u_1 t
        let solo = GameInstance::new(
            inst.graph.clone(),
            inst.costs().to_vec(),
            vec![(2, 0)],
            inst.n_max,
        )
        .unwrap();
        let (_, opt1) = brute_force_optimum(&solo, 1000).unwrap();
        assert_eq!(opt1, Rat::one());
    }

    #[test]
    fn multicast_convex_lb_described_profile() {
        let n = 4;
        let inst = gen_multicast_convex_lb(n).unwrap();
        // drop the last (s_2) player: player 0 on s_2 v_1 u_1 t, player i on
        // s_1 v_{i+1} u_{i+1} t
        let smaller = GameInstance::new(
            inst.graph.clone(),
            inst.costs().to_vec(),
            inst.players[..n].to_vec(),
            inst.n_max,
        )
        .unwrap();
        let mut paths = vec![Path::from_edges(vec![1, n + 1, 2 * n + 1], &inst.graph).unwrap()];
        for i in 1..n {
            paths.push(
                Path::from_edges(
                    vec![1 + i, n + 1 + i, 2 * n + 1 + i],
                    &inst.graph,
                )
                .unwrap(),
            );
        }
        let profile = StrategyProfile::new(&smaller, paths).unwrap();
        assert!(profile_cost(&profile, smaller.costs()) >= Rat::int(n as i64));
    }

    #[test]
    fn random_dag_deterministic_and_shaped() {
        let a = random_dag_instance(42, 6, 10, 3, Shape::StrictlyConcave, 8);
        let b = random_dag_instance(42, 6, 10, 3, Shape::StrictlyConcave, 8);
        assert_eq!(a, b);
        for t in a.costs() {
            assert!(t.classify().strictly_concave);
            assert!(*t.get(1) >= Rat::int(2));
        }
        let c = random_dag_instance(43, 6, 10, 3, Shape::StrictlyConcave, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn random_spg_valid_tree() {
        for seed in 0..5 {
            let (inst, desc) = random_spg_instance(seed, 12, 4, Shape::Convex, 6);
            let tree = parse_sp_tree(&inst.graph, &desc).unwrap();
            let root = tree.node(tree.root());
            assert_eq!((root.source, root.sink), (0, 1));
            for t in inst.costs() {
                assert!(t.classify().convex);
            }
        }
    }
}
