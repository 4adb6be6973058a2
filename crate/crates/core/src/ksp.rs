//! Path services: Yen's k-shortest-paths and exhaustive simple-path
//! enumeration, both under one canonical total order so that every solver
//! sees the same deterministic path ranking.
//!
//! Canonical order: hop count, then total length_km, then the link-id
//! sequence lexicographically. The order is strict and total over simple
//! paths, and it is prefix-monotone (appending a link preserves the
//! relative order of two partial paths ending at the same node), which is
//! what makes the best-first searches below exact.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, BTreeSet, HashSet};

use crate::error::TopologyError;
use crate::topology::{Path, Topology};

fn cmp_by_key(topo: &Topology, a: &[usize], b: &[usize]) -> Ordering {
    let hops = a.len().cmp(&b.len());
    if hops != Ordering::Equal {
        return hops;
    }
    let la: f64 = a.iter().map(|&l| topo.links()[l].length_km).sum();
    let lb: f64 = b.iter().map(|&l| topo.links()[l].length_km).sum();
    // lengths are finite and nonnegative by construction
    match la.partial_cmp(&lb).unwrap() {
        Ordering::Equal => a.cmp(b),
        o => o,
    }
}

/// Compare two paths under the canonical order.
pub fn cmp_paths(topo: &Topology, a: &Path, b: &Path) -> Ordering {
    cmp_by_key(topo, &a.links, &b.links)
}

struct HeapEntry {
    key: (usize, f64),
    links: Vec<usize>,
    at: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we want the smallest key first
        let hops = other.key.0.cmp(&self.key.0);
        if hops != Ordering::Equal {
            return hops;
        }
        match other.key.1.partial_cmp(&self.key.1).unwrap() {
            Ordering::Equal => other.links.cmp(&self.links),
            o => o,
        }
    }
}

/// Best-first search for the canonical-minimum simple path src -> dst,
/// avoiding `banned_links` and `banned_nodes`. Exponential in the worst
/// case but exact; intended for the small graphs this crate targets.
fn min_simple_path(
    topo: &Topology,
    src: usize,
    dst: usize,
    banned_links: &HashSet<usize>,
    banned_nodes: &HashSet<usize>,
) -> Option<Vec<usize>> {
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry { key: (0, 0.0), links: Vec::new(), at: src });
    while let Some(entry) = heap.pop() {
        if entry.at == dst {
            return Some(entry.links);
        }
        for &lid in topo.out_links(entry.at) {
            if banned_links.contains(&lid) {
                continue;
            }
            let link = &topo.links()[lid];
            if link.dst == src || banned_nodes.contains(&link.dst) {
                continue;
            }
            // simplicity: the new head must not already be on the path
            let revisits = entry
                .links
                .iter()
                .any(|&l| topo.links()[l].src == link.dst || topo.links()[l].dst == link.dst);
            if revisits {
                continue;
            }
            let mut links = entry.links.clone();
            links.push(lid);
            heap.push(HeapEntry {
                key: (links.len(), entry.key.1 + link.length_km),
                links,
                at: link.dst,
            });
        }
    }
    None
}

/// Yen's algorithm: up to `k` distinct simple paths in canonical order.
/// Returns fewer if the graph has fewer, `NoPath` if dst is unreachable.
pub fn yen_k_shortest_paths(
    topo: &Topology,
    src: usize,
    dst: usize,
    k: usize,
) -> Result<Vec<Path>, TopologyError> {
    assert!(src != dst, "src and dst must differ");
    assert!(k >= 1);
    let first = min_simple_path(topo, src, dst, &HashSet::new(), &HashSet::new())
        .ok_or_else(|| TopologyError::NoPath {
            src: topo.node_name(src).to_string(),
            dst: topo.node_name(dst).to_string(),
        })?;
    let mut accepted: Vec<Vec<usize>> = vec![first];
    // candidates ordered by links only; real ordering re-applied when popping
    let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();

    while accepted.len() < k {
        let prev = accepted.last().unwrap().clone();
        for spur_idx in 0..prev.len() {
            let root = &prev[..spur_idx];
            let spur_node = if spur_idx == 0 {
                src
            } else {
                topo.links()[prev[spur_idx - 1]].dst
            };
            let mut banned_links = HashSet::new();
            for p in accepted.iter() {
                if p.len() > spur_idx && &p[..spur_idx] == root {
                    banned_links.insert(p[spur_idx]);
                }
            }
            let mut banned_nodes: HashSet<usize> = HashSet::new();
            for &lid in root {
                banned_nodes.insert(topo.links()[lid].src);
            }
            banned_nodes.remove(&spur_node);
            if let Some(spur) =
                min_simple_path(topo, spur_node, dst, &banned_links, &banned_nodes)
            {
                let mut full = root.to_vec();
                full.extend(spur);
                if !accepted.contains(&full) {
                    candidates.insert(full);
                }
            }
        }
        let Some(best) = candidates
            .iter()
            .min_by(|a, b| cmp_by_key(topo, a, b))
            .cloned()
        else {
            break;
        };
        candidates.remove(&best);
        accepted.push(best);
    }

    accepted
        .into_iter()
        .map(|links| Path::new(topo, links))
        .collect()
}

/// All simple paths src -> dst in canonical order, truncated at `cap`.
/// The boolean reports whether truncation occurred.
pub fn enumerate_simple_paths(
    topo: &Topology,
    src: usize,
    dst: usize,
    cap: usize,
) -> (Vec<Path>, bool) {
    assert!(src != dst, "src and dst must differ");
    assert!(cap >= 1);
    let mut all: Vec<Vec<usize>> = Vec::new();
    let mut visited = vec![false; topo.node_count()];
    visited[src] = true;
    let mut stack: Vec<usize> = Vec::new();
    dfs(topo, src, dst, &mut visited, &mut stack, &mut all);
    all.sort_by(|a, b| cmp_by_key(topo, a, b));
    let truncated = all.len() > cap;
    all.truncate(cap);
    let paths = all
        .into_iter()
        .map(|links| Path::new(topo, links).expect("DFS produces valid simple paths"))
        .collect();
    (paths, truncated)
}

fn dfs(
    topo: &Topology,
    at: usize,
    dst: usize,
    visited: &mut [bool],
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    for &lid in topo.out_links(at) {
        let next = topo.links()[lid].dst;
        if visited[next] {
            continue;
        }
        stack.push(lid);
        if next == dst {
            out.push(stack.clone());
        } else {
            visited[next] = true;
            dfs(topo, next, dst, visited, stack, out);
            visited[next] = false;
        }
        stack.pop();
    }
}
