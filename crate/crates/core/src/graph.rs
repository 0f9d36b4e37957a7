//! Pose-graphs and their weighted variants.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::geometry::{Pose2, RelativePose2};
use crate::info::InfoMatrix;

pub type VertexId = usize;

/// Ids at or above this offset belong to hallucinated vertices.
pub const HALLUCINATED_ID_OFFSET: VertexId = 1_000_000;

pub fn is_hallucinated(id: VertexId) -> bool {
    id >= HALLUCINATED_ID_OFFSET
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Odometry,
    LoopClosure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub kind: EdgeKind,
    pub measurement: RelativePose2,
    pub info: InfoMatrix,
}

impl Edge {
    fn key(&self) -> (VertexId, VertexId, EdgeKind) {
        (self.from.min(self.to), self.from.max(self.to), self.kind)
    }
}

/// Vertices are SE(2) poses; edges are relative constraints with information.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PoseGraph {
    vertices: Vec<(VertexId, Pose2)>,
    edges: Vec<Edge>,
    index: HashMap<VertexId, usize>,
    edge_keys: HashSet<(VertexId, VertexId, EdgeKind)>,
}

impl PoseGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: VertexId, pose: Pose2) -> Result<()> {
        if self.index.contains_key(&id) {
            return Err(Error::invalid(format!("duplicate vertex id {id}")));
        }
        self.index.insert(id, self.vertices.len());
        self.vertices.push((id, pose));
        Ok(())
    }

    pub fn add_edge(&mut self, edge: Edge) -> Result<()> {
        if edge.from == edge.to {
            return Err(Error::invalid(format!("self-loop on vertex {}", edge.from)));
        }
        for id in [edge.from, edge.to] {
            if !self.index.contains_key(&id) {
                return Err(Error::invalid(format!("edge references unknown vertex {id}")));
            }
        }
        if !self.edge_keys.insert(edge.key()) {
            return Err(Error::invalid(format!(
                "duplicate {:?} edge between {} and {}",
                edge.kind, edge.from, edge.to
            )));
        }
        self.edges.push(edge);
        Ok(())
    }

    /// Adds an edge whose measurement is derived from the current vertex estimates.
    pub fn connect(
        &mut self,
        from: VertexId,
        to: VertexId,
        kind: EdgeKind,
        info: InfoMatrix,
    ) -> Result<()> {
        let (a, b) = match (self.pose(from), self.pose(to)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::invalid("edge references unknown vertex")),
        };
        self.add_edge(Edge {
            from,
            to,
            kind,
            measurement: a.between(&b),
            info,
        })
    }

    pub fn vertices(&self) -> &[(VertexId, Pose2)] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Position of a vertex id in insertion order.
    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn pose(&self, id: VertexId) -> Option<Pose2> {
        self.index_of(id).map(|i| self.vertices[i].1)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId, kind: EdgeKind) -> bool {
        self.edge_keys.contains(&(a.min(b), a.max(b), kind))
    }

    pub fn last_vertex(&self) -> Option<(VertexId, Pose2)> {
        self.vertices.last().copied()
    }

    /// Breadth-first connectivity check; graphs with fewer than two vertices
    /// are trivially connected.
    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n < 2 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            let (i, k) = (self.index[&e.from], self.index[&e.to]);
            adj[i].push(k);
            adj[k].push(i);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }
}

/// A pose-graph with a nonnegative scalar weight per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPoseGraph {
    base: PoseGraph,
    weights: Vec<f64>,
}

impl WeightedPoseGraph {
    pub fn new(base: PoseGraph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != base.num_edges() {
            return Err(Error::invalid(format!(
                "{} weights for {} edges",
                weights.len(),
                base.num_edges()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::invalid(format!("edge weight {w} is not a finite nonnegative value")));
        }
        Ok(Self { base, weights })
    }

    /// Every edge weighted 1.
    pub fn unit(base: PoseGraph) -> Self {
        let weights = vec![1.0; base.num_edges()];
        Self { base, weights }
    }

    pub fn base(&self) -> &PoseGraph {
        &self.base
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_vertices(&self) -> usize {
        self.base.num_vertices()
    }

    pub fn weighted_edges(&self) -> impl Iterator<Item = (&Edge, f64)> {
        self.base.edges().iter().zip(self.weights.iter().copied())
    }

    pub fn into_parts(self) -> (PoseGraph, Vec<f64>) {
        (self.base, self.weights)
    }
}
