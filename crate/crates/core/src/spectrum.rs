//! Spectrum-domain primitives: grids, contiguous channels, per-link
//! availability vectors, first-fit search, the two solution metrics, and
//! the full feasibility validator.
//!
//! Slice indices are 1-based throughout, so "index of the last used slice"
//! of an empty network is 0 and is directly comparable to the used-slice
//! count.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::SpectrumError;
use crate::topology::{Path, Topology};
use crate::traffic::TrafficMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    pub slot_count: usize,
    pub slot_width_ghz: f64,
}

impl SpectrumGrid {
    /// Flex-grid default: 80 slices of 12.5 GHz.
    pub fn rsa_default() -> Self {
        SpectrumGrid { slot_count: 80, slot_width_ghz: 12.5 }
    }

    /// Fixed-grid default: 40 wavelengths of 50 GHz.
    pub fn rwa_default() -> Self {
        SpectrumGrid { slot_count: 40, slot_width_ghz: 50.0 }
    }
}

/// A block of `width` contiguous slices starting at 1-based `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Channel {
    pub start: usize,
    pub width: usize,
}

impl Channel {
    pub fn end(&self) -> usize {
        self.start + self.width - 1
    }

    pub fn fits(&self, grid: &SpectrumGrid) -> bool {
        self.start >= 1 && self.width >= 1 && self.end() <= grid.slot_count
    }

    pub fn contains(&self, slice: usize) -> bool {
        self.start <= slice && slice <= self.end()
    }
}

/// Per-link slice availability: bit i (1-based slice i) is true iff free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvailabilityVector {
    free: Vec<bool>,
}

impl AvailabilityVector {
    pub fn all_free(slot_count: usize) -> Self {
        AvailabilityVector { free: vec![true; slot_count] }
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn is_free(&self, slice: usize) -> bool {
        self.free[slice - 1]
    }

    pub fn set_free(&mut self, slice: usize, free: bool) {
        self.free[slice - 1] = free;
    }

    /// Elementwise AND: a slice is free on a path iff free on every link.
    pub fn and_with(&mut self, other: &AvailabilityVector) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.free.iter_mut().zip(&other.free) {
            *a = *a && *b;
        }
    }

    /// 1-based index of the highest occupied slice, 0 if none.
    pub fn last_used_index(&self) -> usize {
        self.free
            .iter()
            .rposition(|&f| !f)
            .map_or(0, |i| i + 1)
    }

    pub fn occupied_slices(&self) -> impl Iterator<Item = usize> + '_ {
        self.free
            .iter()
            .enumerate()
            .filter(|(_, &f)| !f)
            .map(|(i, _)| i + 1)
    }

    pub fn from_bits(free: Vec<bool>) -> Self {
        AvailabilityVector { free }
    }
}

/// Lowest 1-based start slice of a fully free run of `width` slices.
pub fn first_fit_channel(avail: &AvailabilityVector, width: usize) -> Option<usize> {
    assert!(width >= 1);
    let n = avail.len();
    let mut run = 0usize;
    for s in 1..=n {
        if avail.is_free(s) {
            run += 1;
            if run == width {
                return Some(s + 1 - width);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// One routed demand: the link sequence it uses and its channel. Stored in
/// raw form so that invalid documents can be loaded and then validated.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteEntry {
    pub links: Vec<usize>,
    pub channel: Channel,
}

/// A (possibly partial) solution: per-demand routes plus the derived
/// per-link occupancy fold.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumAssignment {
    pub grid: SpectrumGrid,
    routes: BTreeMap<usize, RouteEntry>,
    occupancy: BTreeMap<usize, AvailabilityVector>,
}

impl SpectrumAssignment {
    pub fn new(grid: SpectrumGrid) -> Self {
        SpectrumAssignment { grid, routes: BTreeMap::new(), occupancy: BTreeMap::new() }
    }

    pub fn routes(&self) -> &BTreeMap<usize, RouteEntry> {
        &self.routes
    }

    pub fn route(&self, demand: usize) -> Option<&RouteEntry> {
        self.routes.get(&demand)
    }

    pub fn demand_count(&self) -> usize {
        self.routes.len()
    }

    /// Availability of one link (all free if nothing routed over it).
    pub fn link_availability(&self, link: usize) -> AvailabilityVector {
        self.occupancy
            .get(&link)
            .cloned()
            .unwrap_or_else(|| AvailabilityVector::all_free(self.grid.slot_count))
    }

    /// AND of the availability vectors of every link on the path.
    pub fn path_availability(&self, links: &[usize]) -> AvailabilityVector {
        let mut acc = AvailabilityVector::all_free(self.grid.slot_count);
        for l in links {
            if let Some(v) = self.occupancy.get(l) {
                acc.and_with(v);
            }
        }
        acc
    }

    /// Route a demand, enforcing grid fit and the non-overlap constraint.
    pub fn place(
        &mut self,
        demand: usize,
        path: &Path,
        channel: Channel,
    ) -> Result<(), SpectrumError> {
        if self.routes.contains_key(&demand) {
            return Err(SpectrumError::DuplicateRoute(demand));
        }
        if !channel.fits(&self.grid) {
            return Err(SpectrumError::ChannelOutsideGrid {
                start: channel.start,
                end: channel.end(),
                slots: self.grid.slot_count,
            });
        }
        for &l in &path.links {
            if let Some(v) = self.occupancy.get(&l) {
                for s in channel.start..=channel.end() {
                    if !v.is_free(s) {
                        return Err(SpectrumError::SliceCollision { link: l, slice: s });
                    }
                }
            }
        }
        for &l in &path.links {
            let v = self
                .occupancy
                .entry(l)
                .or_insert_with(|| AvailabilityVector::all_free(self.grid.slot_count));
            for s in channel.start..=channel.end() {
                v.set_free(s, false);
            }
        }
        self.routes.insert(demand, RouteEntry { links: path.links.clone(), channel });
        Ok(())
    }

    /// Undo a `place`. Safe because `place` never overlaps channels.
    pub fn unplace(&mut self, demand: usize) {
        if let Some(entry) = self.routes.remove(&demand) {
            for l in &entry.links {
                if let Some(v) = self.occupancy.get_mut(l) {
                    for s in entry.channel.start..=entry.channel.end() {
                        v.set_free(s, true);
                    }
                }
            }
        }
    }

    /// Insert a route without feasibility checks; occupancy records the
    /// union of all routes. Used by the document loader so that invalid
    /// assignments can still be inspected by the validator.
    pub fn insert_unchecked(&mut self, demand: usize, links: Vec<usize>, channel: Channel) {
        for &l in &links {
            let v = self
                .occupancy
                .entry(l)
                .or_insert_with(|| AvailabilityVector::all_free(self.grid.slot_count));
            for s in channel.start..=channel.end().min(self.grid.slot_count) {
                if s >= 1 {
                    v.set_free(s, false);
                }
            }
        }
        self.routes.insert(demand, RouteEntry { links, channel });
    }

    /// Heuristic fitness F: the highest occupied slice index over all
    /// links, 0 for an empty assignment.
    pub fn fitness(&self) -> usize {
        self.occupancy
            .values()
            .map(|v| v.last_used_index())
            .max()
            .unwrap_or(0)
    }

    /// MILP objective: the number of distinct slice indices occupied on at
    /// least one link.
    pub fn used_slice_count(&self) -> usize {
        self.used_slice_mask().iter().filter(|&&u| u).count()
    }

    /// Network-wide slice usage, index 0 = slice 1.
    pub fn used_slice_mask(&self) -> Vec<bool> {
        let mut used = vec![false; self.grid.slot_count];
        for v in self.occupancy.values() {
            for s in v.occupied_slices() {
                used[s - 1] = true;
            }
        }
        used
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RouteDoc {
    demand: usize,
    links: Vec<usize>,
    start: usize,
    width: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct AssignmentDoc {
    grid: SpectrumGrid,
    routes: Vec<RouteDoc>,
}

pub fn save_assignment(asg: &SpectrumAssignment) -> String {
    let doc = AssignmentDoc {
        grid: asg.grid,
        routes: asg
            .routes
            .iter()
            .map(|(&demand, e)| RouteDoc {
                demand,
                links: e.links.clone(),
                start: e.channel.start,
                width: e.channel.width,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("assignment serialization cannot fail")
}

pub fn load_assignment(text: &str) -> Result<SpectrumAssignment, SpectrumError> {
    let doc: AssignmentDoc = serde_json::from_str(text)?;
    let mut asg = SpectrumAssignment::new(doc.grid);
    for r in doc.routes {
        asg.insert_unchecked(r.demand, r.links, Channel { start: r.start, width: r.width });
    }
    Ok(asg)
}

/// One feasibility violation. An empty list means the assignment satisfies
/// the full constraint system of the optimization model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnservedDemand { demand: usize },
    UnknownDemand { demand: usize },
    WrongChannelWidth { demand: usize, expected: usize, got: usize },
    ChannelOutsideGrid { demand: usize, start: usize, width: usize },
    BrokenPath { demand: usize, reason: String },
    EndpointMismatch { demand: usize },
    SliceCollision { link: usize, slice: usize, demands: (usize, usize) },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::UnservedDemand { demand } => write!(f, "demand {demand} is not served"),
            Violation::UnknownDemand { demand } => {
                write!(f, "route for demand {demand} which is not in the traffic matrix")
            }
            Violation::WrongChannelWidth { demand, expected, got } => write!(
                f,
                "demand {demand} needs a channel of width {expected}, got {got}"
            ),
            Violation::ChannelOutsideGrid { demand, start, width } => write!(
                f,
                "demand {demand} channel [{start}, {}] falls outside the grid",
                start + width - 1
            ),
            Violation::BrokenPath { demand, reason } => {
                write!(f, "demand {demand} path is invalid: {reason}")
            }
            Violation::EndpointMismatch { demand } => {
                write!(f, "demand {demand} path endpoints do not match the demand")
            }
            Violation::SliceCollision { link, slice, demands } => write!(
                f,
                "slice {slice} on link {link} carries demands {} and {}",
                demands.0, demands.1
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check an assignment against the complete constraint system: one channel
/// of exactly n_d contiguous slices per demand, carried unchanged (same
/// channel) along a valid simple path from s(d) to r(d), with no slice on
/// any link used by two demands.
pub fn validate_assignment(
    topo: &Topology,
    tm: &TrafficMatrix,
    asg: &SpectrumAssignment,
) -> ValidationReport {
    let mut violations = Vec::new();
    let demand_ids: std::collections::BTreeSet<usize> =
        tm.demands.iter().map(|d| d.id).collect();

    for d in &tm.demands {
        if !asg.routes().contains_key(&d.id) {
            violations.push(Violation::UnservedDemand { demand: d.id });
        }
    }

    // per-(link, slice) usage for collision detection
    let mut usage: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();

    for (&id, entry) in asg.routes() {
        let Some(demand) = tm.demands.iter().find(|d| d.id == id) else {
            if !demand_ids.contains(&id) {
                violations.push(Violation::UnknownDemand { demand: id });
            }
            continue;
        };
        if entry.channel.width != demand.slices as usize {
            violations.push(Violation::WrongChannelWidth {
                demand: id,
                expected: demand.slices as usize,
                got: entry.channel.width,
            });
        }
        if !entry.channel.fits(&asg.grid) {
            violations.push(Violation::ChannelOutsideGrid {
                demand: id,
                start: entry.channel.start,
                width: entry.channel.width,
            });
        }
        match Path::new(topo, entry.links.clone()) {
            Ok(path) => {
                if path.src != demand.src || path.dst != demand.dst {
                    violations.push(Violation::EndpointMismatch { demand: id });
                }
            }
            Err(e) => {
                violations.push(Violation::BrokenPath { demand: id, reason: e.to_string() });
            }
        }
        for &l in &entry.links {
            if topo.link(l).is_none() {
                continue; // already reported as a broken path
            }
            for s in entry.channel.start..=entry.channel.end() {
                usage.entry((l, s)).or_default().push(id);
            }
        }
    }

    for ((link, slice), users) in &usage {
        if users.len() > 1 {
            violations.push(Violation::SliceCollision {
                link: *link,
                slice: *slice,
                demands: (users[0], users[1]),
            });
        }
    }

    ValidationReport { violations }
}
