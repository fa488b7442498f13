use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub type NodeId = usize;

/// Undirected simple graph with sorted neighbor lists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Adjacency {
    neighbors: BTreeMap<NodeId, Vec<NodeId>>,
}

impl Adjacency {
    pub fn with_nodes(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        Self {
            neighbors: nodes.into_iter().map(|n| (n, Vec::new())).collect(),
        }
    }

    /// Adds the undirected edge `a`–`b`, creating missing endpoints.
    /// Self-loops and duplicates are ignored.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId) {
        if a == b {
            return;
        }
        for (x, y) in [(a, b), (b, a)] {
            let list = self.neighbors.entry(x).or_default();
            if let Err(pos) = list.binary_search(&y) {
                list.insert(pos, y);
            }
        }
    }

    pub fn from_edges(nodes: impl IntoIterator<Item = NodeId>, edges: &[(NodeId, NodeId)]) -> Self {
        let mut g = Self::with_nodes(nodes);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.neighbors.contains_key(&node)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.neighbors.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.values().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        self.neighbors.get(&node).map_or(&[], Vec::as_slice)
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.neighbors(node).len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Subgraph induced by the nodes for which `keep` holds.
    pub fn induced(&self, keep: impl Fn(NodeId) -> bool) -> Self {
        let kept: BTreeSet<NodeId> = self.nodes().filter(|&n| keep(n)).collect();
        Self {
            neighbors: kept
                .iter()
                .map(|&n| {
                    let list = self
                        .neighbors(n)
                        .iter()
                        .copied()
                        .filter(|m| kept.contains(m))
                        .collect();
                    (n, list)
                })
                .collect(),
        }
    }

    /// Breadth-first hop counts from `source`; unreachable nodes are absent.
    pub fn hop_counts(&self, source: NodeId) -> BTreeMap<NodeId, u32> {
        let mut dist = BTreeMap::new();
        if !self.contains(source) {
            return dist;
        }
        dist.insert(source, 0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            for &v in self.neighbors(u) {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(v) {
                    e.insert(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}
