//! Physical network topologies: directed multigraphs of nodes and fiber
//! links, JSON load/save, and the two bundled reference topologies.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::TopologyError;

const SIX_NODE_JSON: &str = include_str!("data/six_node.json");
const COST239_JSON: &str = include_str!("data/cost239.json");

/// A directed fiber link. `length_km` is informational; shortest-path
/// ranking defaults to hop count.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: usize,
    pub src: usize,
    pub dst: usize,
    pub length_km: f64,
}

#[derive(Debug, Clone)]
pub struct Topology {
    pub name: String,
    nodes: Vec<String>,
    links: Vec<Link>,
    node_index: HashMap<String, usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.nodes == other.nodes && self.links == other.links
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct LinkDoc {
    a: String,
    b: String,
    #[serde(default)]
    length_km: f64,
    #[serde(default)]
    directed: bool,
    #[serde(default)]
    parallel: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct TopologyDoc {
    name: String,
    nodes: Vec<String>,
    links: Vec<LinkDoc>,
}

impl Topology {
    pub fn new(name: &str, nodes: Vec<String>) -> Result<Self, TopologyError> {
        let mut node_index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if node_index.insert(n.clone(), i).is_some() {
                return Err(TopologyError::DuplicateNode(n.clone()));
            }
        }
        let n = nodes.len();
        Ok(Topology {
            name: name.to_string(),
            nodes,
            links: Vec::new(),
            node_index,
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
        })
    }

    pub fn add_link(
        &mut self,
        src: usize,
        dst: usize,
        length_km: f64,
        allow_parallel: bool,
    ) -> Result<usize, TopologyError> {
        let id = self.links.len();
        if src == dst {
            return Err(TopologyError::SelfLoop {
                link: id,
                node: self.nodes[src].clone(),
            });
        }
        if length_km < 0.0 {
            return Err(TopologyError::NegativeLength { link: id, length_km });
        }
        if !allow_parallel
            && self.links.iter().any(|l| l.src == src && l.dst == dst)
        {
            return Err(TopologyError::DuplicateLink {
                src: self.nodes[src].clone(),
                dst: self.nodes[dst].clone(),
            });
        }
        self.links.push(Link { id, src, dst, length_km });
        self.out_adj[src].push(id);
        self.in_adj[dst].push(id);
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: usize) -> Option<&Link> {
        self.links.get(id)
    }

    pub fn node_name(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    pub fn node_id(&self, name: &str) -> Result<usize, TopologyError> {
        self.node_index
            .get(name)
            .copied()
            .ok_or_else(|| TopologyError::UnknownNode(name.to_string()))
    }

    /// Outgoing link ids of a node, in link-id order.
    pub fn out_links(&self, node: usize) -> &[usize] {
        &self.out_adj[node]
    }

    pub fn in_links(&self, node: usize) -> &[usize] {
        &self.in_adj[node]
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_adj[node].len()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_adj[node].len()
    }

    pub fn save(&self) -> String {
        let doc = TopologyDoc {
            name: self.name.clone(),
            nodes: self.nodes.clone(),
            links: self
                .links
                .iter()
                .map(|l| LinkDoc {
                    a: self.nodes[l.src].clone(),
                    b: self.nodes[l.dst].clone(),
                    length_km: l.length_km,
                    directed: true,
                    parallel: true,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("topology serialization cannot fail")
    }
}

/// Parse a topology document. Undirected entries (the default) expand into
/// two directed links, a->b first.
pub fn load_topology(text: &str) -> Result<Topology, TopologyError> {
    let doc: TopologyDoc = serde_json::from_str(text)?;
    let mut topo = Topology::new(&doc.name, doc.nodes)?;
    for (i, l) in doc.links.iter().enumerate() {
        let a = topo
            .node_index
            .get(&l.a)
            .copied()
            .ok_or_else(|| TopologyError::DanglingEndpoint { link: i, node: l.a.clone() })?;
        let b = topo
            .node_index
            .get(&l.b)
            .copied()
            .ok_or_else(|| TopologyError::DanglingEndpoint { link: i, node: l.b.clone() })?;
        topo.add_link(a, b, l.length_km, l.parallel)?;
        if !l.directed {
            topo.add_link(b, a, l.length_km, l.parallel)?;
        }
    }
    Ok(topo)
}

/// Bundled topologies. `six_node` is a 6-node ring 1-2-3-4-5-6-1 with
/// chords 1-4 and 2-5; `cost239` is the standard 11-node, 26-link
/// pan-European reference graph.
pub fn builtin_topology(name: &str) -> Result<Topology, TopologyError> {
    let text = match name {
        "six_node" => SIX_NODE_JSON,
        "cost239" => COST239_JSON,
        other => return Err(TopologyError::UnknownBuiltin(other.to_string())),
    };
    load_topology(text)
}

/// A simple directed path, stored as the ordered link-id sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub links: Vec<usize>,
    pub src: usize,
    pub dst: usize,
}

impl Path {
    /// Build a path from a link sequence, checking chaining and simplicity.
    pub fn new(topo: &Topology, links: Vec<usize>) -> Result<Self, TopologyError> {
        if links.is_empty() {
            return Err(TopologyError::InvalidPath("empty link sequence".into()));
        }
        let mut seen_nodes = Vec::new();
        let first = topo
            .link(links[0])
            .ok_or_else(|| TopologyError::InvalidPath(format!("unknown link id {}", links[0])))?;
        seen_nodes.push(first.src);
        let mut at = first.src;
        for &lid in &links {
            let l = topo
                .link(lid)
                .ok_or_else(|| TopologyError::InvalidPath(format!("unknown link id {lid}")))?;
            if l.src != at {
                return Err(TopologyError::InvalidPath(format!(
                    "link {lid} does not start where the previous link ended"
                )));
            }
            at = l.dst;
            if seen_nodes.contains(&at) {
                return Err(TopologyError::InvalidPath(format!(
                    "node {at} repeats (path must be simple)"
                )));
            }
            seen_nodes.push(at);
        }
        Ok(Path { links, src: first.src, dst: at })
    }

    pub fn hop_count(&self) -> usize {
        self.links.len()
    }

    pub fn total_length_km(&self, topo: &Topology) -> f64 {
        self.links.iter().map(|&l| topo.links[l].length_km).sum()
    }
}
