//! Directed acyclic multigraphs, topological ordering, path enumeration, and
//! the path-independent edge weight assignment used by the overcharging
//! protocol.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;

pub type VertexId = u32;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

/// A directed acyclic multigraph. Parallel edges are allowed; edge ids are
/// dense `0..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    /// Outgoing edge ids per vertex, ascending.
    out_edges: BTreeMap<VertexId, Vec<EdgeId>>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph contains a directed cycle")]
    CycleDetected,
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("edge ids must be dense 0..m, got {0} at position {1}")]
    NonDenseEdgeIds(EdgeId, usize),
    #[error("path enumeration exceeded cap of {0}")]
    PathExplosion(usize),
}

impl Graph {
    pub fn new(
        vertices: Vec<VertexId>,
        edges: Vec<(EdgeId, VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for &v in &vertices {
            if !seen.insert(v) {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        let mut es = Vec::with_capacity(edges.len());
        for (pos, (id, tail, head)) in edges.into_iter().enumerate() {
            if id != pos {
                return Err(GraphError::NonDenseEdgeIds(id, pos));
            }
            if !seen.contains(&tail) {
                return Err(GraphError::UnknownVertex(tail));
            }
            if !seen.contains(&head) {
                return Err(GraphError::UnknownVertex(head));
            }
            es.push(Edge { id, tail, head });
        }
        let mut out_edges: BTreeMap<VertexId, Vec<EdgeId>> =
            vertices.iter().map(|&v| (v, Vec::new())).collect();
        for e in &es {
            out_edges.get_mut(&e.tail).unwrap().push(e.id);
        }
        Ok(Graph {
            vertices,
            edges: es,
            out_edges,
        })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        self.out_edges.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.out_edges.contains_key(&v)
    }

    /// Kahn's algorithm; ties among ready vertices broken by ascending vertex
    /// id, so the ordering is deterministic.
    pub fn topo_sort(&self) -> Result<Vec<VertexId>, GraphError> {
        let mut in_deg: BTreeMap<VertexId, usize> =
            self.vertices.iter().map(|&v| (v, 0)).collect();
        for e in &self.edges {
            *in_deg.get_mut(&e.head).unwrap() += 1;
        }
        let mut ready: BinaryHeap<Reverse<VertexId>> = in_deg
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&v, _)| Reverse(v))
            .collect();
        let mut order = Vec::with_capacity(self.vertices.len());
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &eid in self.out_edges(v) {
                let head = self.edges[eid].head;
                let d = in_deg.get_mut(&head).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(Reverse(head));
                }
            }
        }
        if order.len() != self.vertices.len() {
            return Err(GraphError::CycleDetected);
        }
        Ok(order)
    }

    /// Weight assignment with path-independent sums: omega_v is the 0-based
    /// topological index, w_e = omega_head - omega_tail > 0. Any u-to-v path
    /// then has weight sum omega_v - omega_u.
    pub fn assign_weights(&self) -> Result<WeightAssignment, GraphError> {
        let order = self.topo_sort()?;
        let omega: BTreeMap<VertexId, u64> = order
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u64))
            .collect();
        let w = self
            .edges
            .iter()
            .map(|e| omega[&e.head] - omega[&e.tail])
            .collect();
        Ok(WeightAssignment { omega, w })
    }

    /// All simple source-to-sink paths in deterministic order: depth-first
    /// with neighbors visited by ascending edge id, which yields
    /// lexicographic edge-id order.
    pub fn enumerate_paths(
        &self,
        source: VertexId,
        sink: VertexId,
        cap: usize,
    ) -> Result<Vec<Path>, GraphError> {
        if !self.has_vertex(source) {
            return Err(GraphError::UnknownVertex(source));
        }
        if !self.has_vertex(sink) {
            return Err(GraphError::UnknownVertex(sink));
        }
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.dfs_paths(source, sink, &mut stack, &mut out, cap)?;
        Ok(out)
    }

    fn dfs_paths(
        &self,
        at: VertexId,
        sink: VertexId,
        stack: &mut Vec<EdgeId>,
        out: &mut Vec<Path>,
        cap: usize,
    ) -> Result<(), GraphError> {
        if at == sink {
            if out.len() >= cap {
                return Err(GraphError::PathExplosion(cap));
            }
            out.push(Path::from_edges(stack.clone(), self).expect("stack is a valid path"));
            return Ok(());
        }
        for &eid in self.out_edges(at) {
            stack.push(eid);
            self.dfs_paths(self.edges[eid].head, sink, stack, out, cap)?;
            stack.pop();
        }
        Ok(())
    }
}

/// Integer edge weights with path-independent sums (see
/// [`Graph::assign_weights`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightAssignment {
    pub omega: BTreeMap<VertexId, u64>,
    pub w: Vec<u64>,
}

impl WeightAssignment {
    pub fn edge_weight(&self, e: EdgeId) -> u64 {
        self.w[e]
    }
}

/// A simple directed path, stored as its ordered edge-id sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    edges: Vec<EdgeId>,
    source: VertexId,
    sink: VertexId,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PathError {
    #[error("empty edge sequence")]
    Empty,
    #[error("edges {0} and {1} do not share a vertex")]
    Disconnected(EdgeId, EdgeId),
    #[error("path repeats vertex {0}")]
    RepeatedVertex(VertexId),
}

impl Path {
    pub fn from_edges(edges: Vec<EdgeId>, graph: &Graph) -> Result<Self, PathError> {
        let first = *edges.first().ok_or(PathError::Empty)?;
        let source = graph.edge(first).tail;
        let mut at = source;
        let mut visited = BTreeSet::new();
        visited.insert(at);
        let mut prev: Option<EdgeId> = None;
        for &eid in &edges {
            let e = graph.edge(eid);
            if e.tail != at {
                return Err(PathError::Disconnected(prev.unwrap_or(eid), eid));
            }
            at = e.head;
            if !visited.insert(at) {
                return Err(PathError::RepeatedVertex(at));
            }
            prev = Some(eid);
        }
        Ok(Path {
            edges,
            source,
            sink: at,
        })
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Graph {
        // s=0, a=1, b=2, t=3 with s->a, s->b, a->t, b->t
        Graph::new(vec![0, 1, 2, 3], vec![(0, 0, 1), (1, 0, 2), (2, 1, 3), (3, 2, 3)]).unwrap()
    }

    #[test]
    fn topo_single_edge() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1)]).unwrap();
        assert_eq!(g.topo_sort().unwrap(), vec![0, 1]);
    }

    #[test]
    fn topo_diamond_id_tiebreak() {
        assert_eq!(diamond().topo_sort().unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn topo_cycle_detected() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 1, 0)]).unwrap();
        assert_eq!(g.topo_sort(), Err(GraphError::CycleDetected));
    }

    #[test]
    fn weights_single_edge() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1)]).unwrap();
        let wa = g.assign_weights().unwrap();
        assert_eq!(wa.omega[&0], 0);
        assert_eq!(wa.omega[&1], 1);
        assert_eq!(wa.edge_weight(0), 1);
    }

    #[test]
    fn weights_diamond() {
        let wa = diamond().assign_weights().unwrap();
        assert_eq!(wa.omega[&0], 0);
        assert_eq!(wa.omega[&1], 1);
        assert_eq!(wa.omega[&2], 2);
        assert_eq!(wa.omega[&3], 3);
        assert_eq!(wa.w, vec![1, 2, 2, 1]);
        // both s-t paths sum to 3
        assert_eq!(wa.w[0] + wa.w[2], 3);
        assert_eq!(wa.w[1] + wa.w[3], 3);
    }

    #[test]
    fn weights_shortcut_path_independent() {
        // s=0 -> a=1 -> t=2 plus shortcut s->t
        let g = Graph::new(vec![0, 1, 2], vec![(0, 0, 1), (1, 1, 2), (2, 0, 2)]).unwrap();
        let wa = g.assign_weights().unwrap();
        assert_eq!(wa.edge_weight(2), wa.edge_weight(0) + wa.edge_weight(1));
        assert_eq!(wa.edge_weight(2), 2);
    }

    #[test]
    fn paths_parallel_edges() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 0, 1)]).unwrap();
        let paths = g.enumerate_paths(0, 1, 100).unwrap();
        assert_eq!(
            paths.iter().map(|p| p.edges().to_vec()).collect::<Vec<_>>(),
            vec![vec![0], vec![1]]
        );
    }

    #[test]
    fn paths_braess_skeleton() {
        // s=0, u=1, v=2, t=3: s->u, s->v, v->u, u->t, v->t
        let g = Graph::new(
            vec![0, 1, 2, 3],
            vec![(0, 0, 1), (1, 0, 2), (2, 2, 1), (3, 1, 3), (4, 2, 3)],
        )
        .unwrap();
        let paths = g.enumerate_paths(0, 3, 100).unwrap();
        assert_eq!(
            paths.iter().map(|p| p.edges().to_vec()).collect::<Vec<_>>(),
            vec![vec![0, 3], vec![1, 2, 3], vec![1, 4]]
        );
    }

    #[test]
    fn paths_unreachable() {
        let g = Graph::new(vec![0, 1, 2], vec![(0, 0, 1)]).unwrap();
        assert!(g.enumerate_paths(0, 2, 100).unwrap().is_empty());
    }

    #[test]
    fn paths_cap_enforced() {
        let g = Graph::new(vec![0, 1], vec![(0, 0, 1), (1, 0, 1), (2, 0, 1)]).unwrap();
        assert_eq!(
            g.enumerate_paths(0, 1, 2),
            Err(GraphError::PathExplosion(2))
        );
    }

    #[test]
    fn path_validation() {
        let g = diamond();
        assert!(Path::from_edges(vec![0, 2], &g).is_ok());
        assert_eq!(
            Path::from_edges(vec![0, 3], &g),
            Err(PathError::Disconnected(0, 3))
        );
        assert_eq!(Path::from_edges(vec![], &g), Err(PathError::Empty));
    }
}
