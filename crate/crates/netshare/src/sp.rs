//! Series-parallel composition trees and the per-component quantities used by
//! the SPG share rule: phi (cheapest connection cost per load), lstar (least
//! total load at which the optimal path enters the component), and psi (the
//! component's leader charge).

use crate::cost::GameInstance;
use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::rat::Rat;
use std::collections::BTreeMap;

/// Structural description of a composition tree, as carried by instance files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpDesc {
    Edge(EdgeId),
    Series(Box<SpDesc>, Box<SpDesc>),
    Parallel(Box<SpDesc>, Box<SpDesc>),
}

impl SpDesc {
    pub fn series(a: SpDesc, b: SpDesc) -> SpDesc {
        SpDesc::Series(Box::new(a), Box::new(b))
    }

    pub fn parallel(a: SpDesc, b: SpDesc) -> SpDesc {
        SpDesc::Parallel(Box::new(a), Box::new(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpKind {
    Leaf(EdgeId),
    Series(usize, usize),
    Parallel(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpNode {
    pub kind: SpKind,
    pub source: VertexId,
    pub sink: VertexId,
}

/// A validated binary series-parallel composition tree over the edges of one
/// graph. Nodes live in an arena; children precede their parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SPTree {
    nodes: Vec<SpNode>,
    root: usize,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SpError {
    #[error("unknown edge id {0} in tree description")]
    UnknownEdge(EdgeId),
    #[error("series glue mismatch: left sink {0} != right source {1}")]
    SeriesMismatch(VertexId, VertexId),
    #[error("parallel terminal mismatch: ({0},{1}) vs ({2},{3})")]
    ParallelMismatch(VertexId, VertexId, VertexId, VertexId),
    #[error("edge {0} referenced {1} times; each edge must appear exactly once")]
    EdgeCoverage(EdgeId, usize),
}

impl SPTree {
    pub fn nodes(&self) -> &[SpNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, i: usize) -> &SpNode {
        &self.nodes[i]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Edge ids in the subtree rooted at `i`.
    pub fn edges_under(&self, i: usize) -> Vec<EdgeId> {
        match self.nodes[i].kind {
            SpKind::Leaf(e) => vec![e],
            SpKind::Series(a, b) | SpKind::Parallel(a, b) => {
                let mut out = self.edges_under(a);
                out.extend(self.edges_under(b));
                out
            }
        }
    }
}

/// Build and validate a composition tree against a graph. Every edge of the
/// graph must be referenced exactly once, series children must glue at a shared
/// vertex, and parallel children must share both terminals.
pub fn parse_sp_tree(graph: &Graph, desc: &SpDesc) -> Result<SPTree, SpError> {
    let mut nodes = Vec::new();
    let mut counts = vec![0usize; graph.edge_count()];
    let root = build(graph, desc, &mut nodes, &mut counts)?;
    for (e, &n) in counts.iter().enumerate() {
        if n != 1 {
            return Err(SpError::EdgeCoverage(e, n));
        }
    }
    Ok(SPTree { nodes, root })
}

fn build(
    graph: &Graph,
    desc: &SpDesc,
    nodes: &mut Vec<SpNode>,
    counts: &mut [usize],
) -> Result<usize, SpError> {
    let node = match desc {
        SpDesc::Edge(e) => {
            let edge = graph
                .edges()
                .get(*e)
                .ok_or(SpError::UnknownEdge(*e))?;
            counts[*e] += 1;
            SpNode {
                kind: SpKind::Leaf(*e),
                source: edge.tail,
                sink: edge.head,
            }
        }
        SpDesc::Series(a, b) => {
            let l = build(graph, a, nodes, counts)?;
            let r = build(graph, b, nodes, counts)?;
            if nodes[l].sink != nodes[r].source {
                return Err(SpError::SeriesMismatch(nodes[l].sink, nodes[r].source));
            }
            SpNode {
                kind: SpKind::Series(l, r),
                source: nodes[l].source,
                sink: nodes[r].sink,
            }
        }
        SpDesc::Parallel(a, b) => {
            let l = build(graph, a, nodes, counts)?;
            let r = build(graph, b, nodes, counts)?;
            if (nodes[l].source, nodes[l].sink) != (nodes[r].source, nodes[r].sink) {
                return Err(SpError::ParallelMismatch(
                    nodes[l].source,
                    nodes[l].sink,
                    nodes[r].source,
                    nodes[r].sink,
                ));
            }
            SpNode {
                kind: SpKind::Parallel(l, r),
                source: nodes[l].source,
                sink: nodes[l].sink,
            }
        }
    };
    nodes.push(node);
    Ok(nodes.len() - 1)
}

/// Per-node annotations: phi table, lstar (None = the optimum never enters the
/// component), and psi value; plus the per-edge psi map read off the leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct SPAnnotations {
    pub phi: Vec<Vec<Rat>>,
    pub lstar: Vec<Option<usize>>,
    pub psi: Vec<Rat>,
    pub psi_e: BTreeMap<EdgeId, Rat>,
    /// Diagnostics: e.g. both series sub-cases holding at once.
    pub warnings: Vec<String>,
}

/// phi per node: Leaf = the edge's cost table, Series = pointwise sum,
/// Parallel = pointwise min. phi at the root is the cheapest single-path cost
/// per load.
pub fn compute_phi(tree: &SPTree, instance: &GameInstance) -> Vec<Vec<Rat>> {
    let mut phi: Vec<Vec<Rat>> = vec![Vec::new(); tree.node_count()];
    for (i, node) in tree.nodes().iter().enumerate() {
        phi[i] = match node.kind {
            SpKind::Leaf(e) => instance.cost(e).values().to_vec(),
            SpKind::Series(a, b) => phi[a]
                .iter()
                .zip(&phi[b])
                .map(|(x, y)| x + y)
                .collect(),
            SpKind::Parallel(a, b) => phi[a]
                .iter()
                .zip(&phi[b])
                .map(|(x, y)| x.clone().min(y.clone()))
                .collect(),
        };
    }
    phi
}

/// lstar per node: the least total load l (1-based index into `opt_paths`)
/// whose optimal path uses an edge of the component; None if no load does.
pub fn compute_lstar(tree: &SPTree, opt_paths: &[Path]) -> Vec<Option<usize>> {
    (0..tree.node_count())
        .map(|i| {
            let edges = tree.edges_under(i);
            opt_paths
                .iter()
                .position(|p| edges.iter().any(|&e| p.contains(e)))
                .map(|pos| pos + 1)
        })
        .collect()
}

/// psi per node, top-down. The root gets phi_root(1). Parallel children both
/// inherit the parent value. Series children split by the three sub-cases,
/// evaluated in order: clamp the first child to phi(1) if the proportional
/// share would exceed it, then symmetrically for the second child, else split
/// proportionally to phi at the parent's lstar. Components the optimum never
/// enters split proportionally at full load.
pub fn compute_psi(
    tree: &SPTree,
    phi: &[Vec<Rat>],
    lstar: &[Option<usize>],
    n_max: usize,
) -> (Vec<Rat>, BTreeMap<EdgeId, Rat>, Vec<String>) {
    let mut psi: Vec<Rat> = vec![Rat::zero(); tree.node_count()];
    let mut warnings = Vec::new();
    psi[tree.root()] = phi[tree.root()][1].clone();
    // children precede parents in the arena, so walk indices downward
    for i in (0..tree.node_count()).rev() {
        match tree.node(i).kind {
            SpKind::Leaf(_) => {}
            SpKind::Parallel(a, b) => {
                psi[a] = psi[i].clone();
                psi[b] = psi[i].clone();
            }
            SpKind::Series(a, b) => {
                let l = lstar[i].unwrap_or(n_max);
                let total = &phi[i][l];
                let frac = |child: usize| -> Rat {
                    if total.is_zero() {
                        psi[i].clone() / Rat::int(2)
                    } else {
                        &(&psi[i] * &phi[child][l]) / total
                    }
                };
                let (pa, pb);
                let a_fires = phi[a][1] < frac(a);
                let b_fires = phi[b][1] < frac(b);
                if a_fires && b_fires {
                    warnings.push(format!(
                        "series node {}: both clamp sub-cases hold; using the first",
                        i
                    ));
                }
                if a_fires {
                    pa = phi[a][1].clone();
                    pb = &psi[i] - &pa;
                } else if b_fires {
                    pb = phi[b][1].clone();
                    pa = &psi[i] - &pb;
                } else {
                    pa = frac(a);
                    pb = &psi[i] - &pa;
                }
                psi[a] = pa;
                psi[b] = pb;
            }
        }
    }
    let psi_e = tree
        .nodes()
        .iter()
        .enumerate()
        .filter_map(|(i, n)| match n.kind {
            SpKind::Leaf(e) => Some((e, psi[i].clone())),
            _ => None,
        })
        .collect();
    (psi, psi_e, warnings)
}

/// Full annotation pass: phi, lstar, psi in one call.
pub fn annotate(tree: &SPTree, instance: &GameInstance, opt_paths: &[Path]) -> SPAnnotations {
    let phi = compute_phi(tree, instance);
    let lstar = compute_lstar(tree, opt_paths);
    let (psi, psi_e, warnings) = compute_psi(tree, &phi, &lstar, instance.n_max);
    SPAnnotations {
        phi,
        lstar,
        psi,
        psi_e,
        warnings,
    }
}

/// Check every annotation invariant; returns human-readable violations.
/// Empty result means all hold (exact rational comparisons).
pub fn check_invariants(tree: &SPTree, ann: &SPAnnotations, n_max: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for (i, node) in tree.nodes().iter().enumerate() {
        let phi = &ann.phi[i];
        if !phi[0].is_zero() {
            bad.push(format!("node {}: phi(0) != 0", i));
        }
        if phi.windows(2).any(|w| w[1] < w[0]) {
            bad.push(format!("node {}: phi not non-decreasing", i));
        }
        if ann.psi[i] > phi[1] {
            bad.push(format!("node {}: psi > phi(1)", i));
        }
        if ann.lstar[i] == Some(1) && ann.psi[i] != phi[1] {
            bad.push(format!("node {}: lstar = 1 but psi != phi(1)", i));
        }
        if let Some(ls) = ann.lstar[i] {
            for l in ls.max(2)..=n_max {
                if !(ann.psi[i] > &phi[l] / &Rat::int(l as i64)) {
                    bad.push(format!("node {}: psi <= phi({})/{}", i, l, l));
                }
            }
        }
        match node.kind {
            SpKind::Leaf(_) => {}
            SpKind::Series(a, b) => {
                if &ann.psi[a] + &ann.psi[b] != ann.psi[i] {
                    bad.push(format!("series node {}: child psis do not sum", i));
                }
                for l in 0..phi.len() {
                    if &ann.phi[a][l] + &ann.phi[b][l] != phi[l] {
                        bad.push(format!("series node {}: phi mismatch at load {}", i, l));
                    }
                }
                if let Some(ls) = ann.lstar[i] {
                    if ann.lstar[a] != Some(ls) || ann.lstar[b] != Some(ls) {
                        bad.push(format!("series node {}: child lstar differs", i));
                    }
                }
            }
            SpKind::Parallel(a, b) => {
                if ann.psi[a] != ann.psi[i] || ann.psi[b] != ann.psi[i] {
                    bad.push(format!("parallel node {}: child psi differs", i));
                }
                for l in 0..phi.len() {
                    let m = ann.phi[a][l].clone().min(ann.phi[b][l].clone());
                    if m != phi[l] {
                        bad.push(format!("parallel node {}: phi mismatch at load {}", i, l));
                    }
                }
                if let Some(ls) = ann.lstar[i] {
                    for &c in &[a, b] {
                        if let Some(lc) = ann.lstar[c] {
                            if ls > lc {
                                bad.push(format!(
                                    "parallel node {}: lstar exceeds child's",
                                    i
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{CostTable, GameInstance};
    use crate::graph::Graph;

    fn series_ab() -> (Graph, GameInstance, SPTree) {
        // s=0 -a-> m=1 -b-> t=2, c_a=(0,4,6), c_b=(0,2,3)
        let g = Graph::new(vec![0, 1, 2], vec![(0, 0, 1), (1, 1, 2)]).unwrap();
        let ca = CostTable::from_ints(&[0, 4, 6]).unwrap();
        let cb = CostTable::from_ints(&[0, 2, 3]).unwrap();
        let inst = GameInstance::new(g.clone(), vec![ca, cb], vec![(0, 2), (0, 2)], 2).unwrap();
        let tree =
            parse_sp_tree(&g, &SpDesc::series(SpDesc::Edge(0), SpDesc::Edge(1))).unwrap();
        (g, inst, tree)
    }

    fn parallel_linear_constant() -> (Graph, GameInstance, SPTree) {
        // e0: c(l) = l, e1: constant 2, n_max = 3
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 0, 1)]).unwrap();
        let c0 = CostTable::from_ints(&[0, 1, 2, 3]).unwrap();
        let c1 = CostTable::from_ints(&[0, 2, 2, 2]).unwrap();
        let inst =
            GameInstance::new(g.clone(), vec![c0, c1], vec![(0, 1), (0, 1), (0, 1)], 3).unwrap();
        let tree =
            parse_sp_tree(&g, &SpDesc::parallel(SpDesc::Edge(0), SpDesc::Edge(1))).unwrap();
        (g, inst, tree)
    }

    #[test]
    fn parse_leaf() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1)]).unwrap();
        let t = parse_sp_tree(&g, &SpDesc::Edge(0)).unwrap();
        let root = t.node(t.root());
        assert_eq!((root.source, root.sink), (0, 1));
    }

    #[test]
    fn parse_parallel_terminals() {
        let (_, _, t) = parallel_linear_constant();
        let root = t.node(t.root());
        assert_eq!((root.source, root.sink), (0, 1));
    }

    #[test]
    fn parse_series_mismatch() {
        // s->a and b->t with a != b
        let g = Graph::new(vec![0, 1, 2, 3], vec![(0, 0, 1), (1, 2, 3)]).unwrap();
        assert_eq!(
            parse_sp_tree(&g, &SpDesc::series(SpDesc::Edge(0), SpDesc::Edge(1))),
            Err(SpError::SeriesMismatch(1, 2))
        );
    }

    #[test]
    fn parse_edge_coverage() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 0, 1)]).unwrap();
        assert_eq!(
            parse_sp_tree(&g, &SpDesc::parallel(SpDesc::Edge(0), SpDesc::Edge(0))),
            Err(SpError::EdgeCoverage(0, 2))
        );
    }

    #[test]
    fn phi_series_sum() {
        let (_, inst, tree) = series_ab();
        let phi = compute_phi(&tree, &inst);
        assert_eq!(
            phi[tree.root()],
            vec![Rat::zero(), Rat::int(6), Rat::int(9)]
        );
    }

    #[test]
    fn phi_parallel_min() {
        let (_, inst, tree) = parallel_linear_constant();
        let phi = compute_phi(&tree, &inst);
        assert_eq!(
            phi[tree.root()],
            vec![Rat::zero(), Rat::int(1), Rat::int(2), Rat::int(2)]
        );
    }

    #[test]
    fn phi_leaf_is_cost() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1)]).unwrap();
        let c = CostTable::from_ints(&[0, 3, 5]).unwrap();
        let inst = GameInstance::new(g.clone(), vec![c.clone()], vec![(0, 1)], 2).unwrap();
        let tree = parse_sp_tree(&g, &SpDesc::Edge(0)).unwrap();
        assert_eq!(compute_phi(&tree, &inst)[0], c.values().to_vec());
    }

    #[test]
    fn lstar_parallel_example() {
        // OPT(1) = e0 (1 < 2), OPT(2) = e0 (lex tie-break on 2 = 2), OPT(3) = e1
        let (g, _, tree) = parallel_linear_constant();
        let p0 = Path::from_edges(vec![0], &g).unwrap();
        let p1 = Path::from_edges(vec![1], &g).unwrap();
        let opt = vec![p0.clone(), p0, p1];
        let lstar = compute_lstar(&tree, &opt);
        assert_eq!(lstar[tree.root()], Some(1));
        // leaf node order: e0 at 0, e1 at 1
        assert_eq!(lstar[0], Some(1));
        assert_eq!(lstar[1], Some(3));
    }

    #[test]
    fn lstar_never() {
        let (g, _, tree) = parallel_linear_constant();
        let p0 = Path::from_edges(vec![0], &g).unwrap();
        let lstar = compute_lstar(&tree, &[p0.clone(), p0.clone(), p0]);
        assert_eq!(lstar[1], None);
    }

    #[test]
    fn psi_series_proportional() {
        let (g, inst, tree) = series_ab();
        let phi = compute_phi(&tree, &inst);
        let path = Path::from_edges(vec![0, 1], &g).unwrap();
        let lstar = compute_lstar(&tree, &[path.clone(), path]);
        let (psi, psi_e, warnings) = compute_psi(&tree, &phi, &lstar, 2);
        assert_eq!(psi[tree.root()], Rat::int(6));
        assert_eq!(psi_e[&0], Rat::int(4));
        assert_eq!(psi_e[&1], Rat::int(2));
        assert!(warnings.is_empty());
    }

    #[test]
    fn psi_parallel_copies() {
        let (g, inst, tree) = parallel_linear_constant();
        let ann = annotate(
            &tree,
            &inst,
            &[
                Path::from_edges(vec![0], &g).unwrap(),
                Path::from_edges(vec![0], &g).unwrap(),
                Path::from_edges(vec![1], &g).unwrap(),
            ],
        );
        assert_eq!(ann.psi[tree.root()], Rat::int(1));
        assert_eq!(ann.psi_e[&0], Rat::int(1));
        assert_eq!(ann.psi_e[&1], Rat::int(1));
    }

    #[test]
    fn psi_opt1_leaf_gets_unit_cost() {
        let (g, inst, tree) = series_ab();
        let path = Path::from_edges(vec![0, 1], &g).unwrap();
        let ann = annotate(&tree, &inst, &[path.clone(), path]);
        // every edge on OPT(1): psi at the root equals phi_root(1) and
        // the leaf values sum along the path
        let total: Rat = ann.psi_e.values().cloned().sum();
        assert_eq!(total, ann.psi[tree.root()]);
    }

    #[test]
    fn invariants_hold_on_examples() {
        let (g, inst, tree) = series_ab();
        let path = Path::from_edges(vec![0, 1], &g).unwrap();
        let ann = annotate(&tree, &inst, &[path.clone(), path]);
        assert_eq!(check_invariants(&tree, &ann, 2), Vec::<String>::new());
    }
}
