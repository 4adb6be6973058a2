//! Exact optimization for RSA/RWA: a depth-first branch-and-bound over
//! per-demand (path, channel) choices, a brute-force oracle for tiny
//! instances, combinatorial lower bounds, and LP-format model emission.
//!
//! Two facts keep the search space finite and the pruning sound:
//!
//! 1. Simple paths suffice. Removing a cycle from any routed demand frees
//!    spectrum and keeps every other constraint satisfied, so some optimal
//!    solution routes every demand on a simple path. The search therefore
//!    branches over enumerated simple paths only.
//!
//! 2. Slice compaction. Take any feasible solution and relabel the k used
//!    slice indices s_1 < ... < s_k to 1..k. Every channel occupies
//!    consecutive integers that are all used, so they map to consecutive
//!    relabeled indices: the result is feasible, uses slices 1..k exactly,
//!    and has the same objective. Any solution strictly better than the
//!    incumbent U thus has an equivalent inside slices [1, U-1], so the
//!    search only opens channels ending at or below U-1.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::heuristics::{msf_solve, MsfConfig};
use crate::ksp::enumerate_simple_paths;
use crate::spectrum::{Channel, SpectrumAssignment, SpectrumGrid};
use crate::topology::{Path, Topology};
use crate::traffic::{to_rwa_demands, TrafficMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    /// Objective proven optimal.
    Optimal,
    /// A feasible solution and a valid lower bound, optimality unproven.
    FeasibleBound,
    /// Proven infeasible over the full (untruncated) search space.
    Infeasible,
    /// Limits hit before any feasible solution was found.
    TimedOut,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub wall_time_s: f64,
    /// Total number of candidate paths across demands.
    pub path_space: usize,
    /// True if any demand's path list was cut off at the cap.
    pub truncated: bool,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub objective: Option<usize>,
    pub lower_bound: usize,
    pub solution: Option<SpectrumAssignment>,
    pub stats: SearchStats,
}

impl SolveOutcome {
    /// JSON view of everything except the witness solution (which is
    /// saved separately in the assignment format).
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            status: &'a SolveStatus,
            objective: Option<usize>,
            lower_bound: usize,
            stats: &'a SearchStats,
        }
        serde_json::to_string_pretty(&Doc {
            status: &self.status,
            objective: self.objective,
            lower_bound: self.lower_bound,
            stats: &self.stats,
        })
        .expect("outcome serialization cannot fail")
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverLimits {
    pub time_limit_s: f64,
    pub node_limit: u64,
    pub path_cap: usize,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits { time_limit_s: 60.0, node_limit: 50_000_000, path_cap: 1000 }
    }
}

struct SearchCtx<'a> {
    demands: Vec<(usize, usize)>, // (demand id, width) in branch order
    paths: Vec<Vec<Path>>,        // indexed by demand id
    grid: SpectrumGrid,
    limits: &'a SolverLimits,
    started: Instant,
    nodes: u64,
    aborted: bool,
    // per-slice count of (link, slice) occupancies, index 0 = slice 1
    slice_load: Vec<u32>,
    used_count: usize,
    incumbent: Option<(SpectrumAssignment, usize)>,
    lower_bound: usize,
}

impl SearchCtx<'_> {
    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.nodes >= self.limits.node_limit
            || (self.nodes % 1024 == 0
                && self.started.elapsed().as_secs_f64() > self.limits.time_limit_s)
        {
            self.aborted = true;
        }
        self.aborted
    }

    fn proven_optimal(&self) -> bool {
        matches!(&self.incumbent, Some((_, obj)) if *obj == self.lower_bound)
    }

    fn dfs(&mut self, depth: usize, asg: &mut SpectrumAssignment) {
        if self.proven_optimal() || self.out_of_budget() {
            return;
        }
        let ub = self.incumbent.as_ref().map(|(_, o)| *o);
        if depth == self.demands.len() {
            debug_assert!(ub.is_none_or(|u| self.used_count < u));
            self.incumbent = Some((asg.clone(), self.used_count));
            return;
        }
        let (id, width) = self.demands[depth];
        // compaction dominance: a solution beating the incumbent fits
        // entirely below it
        let max_end = match ub {
            Some(u) => (u - 1).min(self.grid.slot_count),
            None => self.grid.slot_count,
        };
        if max_end < width {
            return;
        }
        let path_list = std::mem::take(&mut self.paths[id]);
        'paths: for path in &path_list {
            for start in 1..=(max_end - width + 1) {
                if self.proven_optimal() || self.out_of_budget() {
                    break 'paths;
                }
                self.nodes += 1;
                // recheck the bound: the incumbent may have improved
                let cur_ub = self.incumbent.as_ref().map(|(_, o)| *o);
                if cur_ub.is_some_and(|u| start + width - 1 > u.saturating_sub(1)) {
                    break;
                }
                let newly_used = (start..start + width)
                    .filter(|&s| self.slice_load[s - 1] == 0)
                    .count();
                if cur_ub.is_some_and(|u| self.used_count + newly_used >= u) {
                    continue;
                }
                if asg.place(id, path, Channel { start, width }).is_err() {
                    continue; // collision on some link of the path
                }
                for s in start..start + width {
                    self.slice_load[s - 1] += path.links.len() as u32;
                }
                self.used_count += newly_used;
                self.dfs(depth + 1, asg);
                asg.unplace(id);
                for s in start..start + width {
                    self.slice_load[s - 1] -= path.links.len() as u32;
                }
                self.used_count -= newly_used;
            }
        }
        self.paths[id] = path_list;
    }
}

/// Branch order: descending slice count, ascending demand id.
fn branch_order(tm: &TrafficMatrix) -> Vec<(usize, usize)> {
    let mut order: Vec<(usize, usize)> = tm
        .demands
        .iter()
        .map(|d| (d.id, d.slices as usize))
        .collect();
    order.sort_by_key(|&(id, w)| (std::cmp::Reverse(w), id));
    order
}

fn solve_exact_inner(
    topo: &Topology,
    tm: &TrafficMatrix,
    grid: SpectrumGrid,
    limits: &SolverLimits,
    extra_incumbent: Option<&SpectrumAssignment>,
) -> SolveOutcome {
    let started = Instant::now();
    let lb = lower_bound(topo, tm);

    let mut paths: Vec<Vec<Path>> = vec![Vec::new(); tm.demands.len()];
    let mut truncated = false;
    let mut path_space = 0;
    let mut unreachable = false;
    for d in &tm.demands {
        let (list, trunc) = enumerate_simple_paths(topo, d.src, d.dst, limits.path_cap);
        truncated |= trunc;
        path_space += list.len();
        if list.is_empty() {
            unreachable = true;
        }
        paths[d.id] = list;
    }
    let stats = |nodes, truncated| SearchStats {
        nodes,
        wall_time_s: started.elapsed().as_secs_f64(),
        path_space,
        truncated,
    };
    if unreachable {
        return SolveOutcome {
            status: SolveStatus::Infeasible,
            objective: None,
            lower_bound: lb,
            solution: None,
            stats: stats(0, truncated),
        };
    }
    if tm.demands.is_empty() {
        return SolveOutcome {
            status: SolveStatus::Optimal,
            objective: Some(0),
            lower_bound: 0,
            solution: Some(SpectrumAssignment::new(grid)),
            stats: stats(0, truncated),
        };
    }

    // warm start from the deterministic heuristic
    let mut incumbent: Option<(SpectrumAssignment, usize)> = None;
    if let Ok(asg) = msf_solve(topo, tm, &MsfConfig { k_paths: 3, grid }) {
        let obj = asg.used_slice_count();
        incumbent = Some((asg, obj));
    }
    if let Some(extra) = extra_incumbent {
        let obj = extra.used_slice_count();
        if incumbent.as_ref().is_none_or(|(_, o)| obj < *o) {
            incumbent = Some((extra.clone(), obj));
        }
    }

    let mut ctx = SearchCtx {
        demands: branch_order(tm),
        paths,
        grid,
        limits,
        started,
        nodes: 0,
        aborted: false,
        slice_load: vec![0; grid.slot_count],
        used_count: 0,
        incumbent,
        lower_bound: lb,
    };
    if !ctx.proven_optimal() {
        let mut asg = SpectrumAssignment::new(grid);
        ctx.dfs(0, &mut asg);
    }

    let stats = stats(ctx.nodes, truncated);
    match (ctx.incumbent, ctx.aborted) {
        (Some((solution, objective)), aborted) => {
            let optimal = objective == lb || (!aborted && !truncated);
            SolveOutcome {
                status: if optimal { SolveStatus::Optimal } else { SolveStatus::FeasibleBound },
                objective: Some(objective),
                lower_bound: if optimal { objective } else { lb },
                solution: Some(solution),
                stats,
            }
        }
        (None, false) if !truncated => SolveOutcome {
            status: SolveStatus::Infeasible,
            objective: None,
            lower_bound: lb,
            solution: None,
            stats,
        },
        (None, _) => SolveOutcome {
            status: SolveStatus::TimedOut,
            objective: None,
            lower_bound: lb,
            solution: None,
            stats,
        },
    }
}

/// Minimize the number of network-wide used slices for the elastic-grid
/// problem. Anytime: returns the best incumbent and a valid bound when
/// limits are hit.
pub fn solve_rsa_exact(
    topo: &Topology,
    tm: &TrafficMatrix,
    grid: SpectrumGrid,
    limits: &SolverLimits,
) -> SolveOutcome {
    solve_exact_inner(topo, tm, grid, limits, None)
}

/// Fixed-grid variant: every demand takes one 50 GHz wavelength; the
/// objective is the number of used wavelengths.
pub fn solve_rwa_exact(topo: &Topology, tm: &TrafficMatrix, limits: &SolverLimits) -> SolveOutcome {
    solve_exact_inner(topo, &to_rwa_demands(tm), SpectrumGrid::rwa_default(), limits, None)
}

/// RWA variant accepting an extra starting incumbent (e.g. a GA solution)
/// on top of the built-in heuristic warm start.
pub fn solve_rwa_exact_warm(
    topo: &Topology,
    tm: &TrafficMatrix,
    limits: &SolverLimits,
    warm: Option<&SpectrumAssignment>,
) -> SolveOutcome {
    solve_exact_inner(topo, &to_rwa_demands(tm), SpectrumGrid::rwa_default(), limits, warm)
}

/// Product cap above which the brute-force oracle refuses to run.
pub const ORACLE_COMBO_CAP: u128 = 50_000_000;

/// Exhaustively enumerate every (path, channel) combination and return the
/// true minimum used-slice count, `None` if no feasible assignment exists.
/// Only for tiny instances; aborts if the combination count exceeds
/// [`ORACLE_COMBO_CAP`].
pub fn brute_force_oracle(
    topo: &Topology,
    tm: &TrafficMatrix,
    grid: SpectrumGrid,
) -> Result<Option<usize>, SolveError> {
    let mut paths: Vec<Vec<Path>> = Vec::new();
    let mut combos: u128 = 1;
    for d in &tm.demands {
        let (list, truncated) = enumerate_simple_paths(topo, d.src, d.dst, 1_000_000);
        assert!(!truncated, "oracle requires the full path space");
        if list.is_empty() || (d.slices as usize) > grid.slot_count {
            return Ok(None);
        }
        let starts = grid.slot_count - d.slices as usize + 1;
        combos = combos.saturating_mul((list.len() * starts) as u128);
        paths.push(list);
    }
    if combos > ORACLE_COMBO_CAP {
        return Err(SolveError::OracleTooLarge { combinations: combos, cap: ORACLE_COMBO_CAP });
    }

    fn recurse(
        tm: &TrafficMatrix,
        paths: &[Vec<Path>],
        grid: &SpectrumGrid,
        idx: usize,
        asg: &mut SpectrumAssignment,
        best: &mut Option<usize>,
    ) {
        if idx == tm.demands.len() {
            let obj = asg.used_slice_count();
            if best.is_none_or(|b| obj < b) {
                *best = Some(obj);
            }
            return;
        }
        let d = &tm.demands[idx];
        let width = d.slices as usize;
        for path in &paths[idx] {
            for start in 1..=(grid.slot_count - width + 1) {
                if asg.place(d.id, path, Channel { start, width }).is_ok() {
                    recurse(tm, paths, grid, idx + 1, asg, best);
                    asg.unplace(d.id);
                }
            }
        }
    }

    let mut best = None;
    let mut asg = SpectrumAssignment::new(grid);
    recurse(tm, &paths, &grid, 0, &mut asg, &mut best);
    Ok(best)
}

fn min_hops(topo: &Topology, src: usize, dst: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; topo.node_count()];
    dist[src] = 0;
    let mut queue = std::collections::VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        if v == dst {
            return Some(dist[v]);
        }
        for &lid in topo.out_links(v) {
            let next = topo.links()[lid].dst;
            if dist[next] == usize::MAX {
                dist[next] = dist[v] + 1;
                queue.push_back(next);
            }
        }
    }
    None
}

/// Cut-set pressure of one node subset S: slices of demands leaving
/// (entering) S divided by the outgoing (incoming) cut capacity. Every
/// crossing demand puts its n_d slices on at least one cut arc, and each
/// cut arc can carry at most one copy of every network-wide used slice.
fn cut_bound(topo: &Topology, tm: &TrafficMatrix, subset: &[usize]) -> usize {
    let mut in_set = vec![false; topo.node_count()];
    for &v in subset {
        in_set[v] = true;
    }
    let mut out_cut = 0usize;
    let mut in_cut = 0usize;
    for l in topo.links() {
        match (in_set[l.src], in_set[l.dst]) {
            (true, false) => out_cut += 1,
            (false, true) => in_cut += 1,
            _ => {}
        }
    }
    let mut out_sum = 0usize;
    let mut in_sum = 0usize;
    for d in &tm.demands {
        match (in_set[d.src], in_set[d.dst]) {
            (true, false) => out_sum += d.slices as usize,
            (false, true) => in_sum += d.slices as usize,
            _ => {}
        }
    }
    let mut bound = 0;
    if out_sum > 0 && out_cut > 0 {
        bound = out_sum.div_ceil(out_cut);
    }
    if in_sum > 0 && in_cut > 0 {
        bound = bound.max(in_sum.div_ceil(in_cut));
    }
    bound
}

/// A value provably at or below the optimal used-slice count: the max of
/// (a) the widest demand, (b) cut-set pressure over all node subsets of
/// size 1 to 3 (crossing slices over cut capacity), and (c) total
/// slice-hops over the link count (every demand occupies n_d slices on at
/// least its min-hop number of links, and one network-wide used slice
/// accounts for at most |E| link-slices).
pub fn lower_bound(topo: &Topology, tm: &TrafficMatrix) -> usize {
    let mut bound = tm.max_slices() as usize;
    let n = topo.node_count();
    for a in 0..n {
        bound = bound.max(cut_bound(topo, tm, &[a]));
        for b in a + 1..n {
            bound = bound.max(cut_bound(topo, tm, &[a, b]));
            for c in b + 1..n {
                bound = bound.max(cut_bound(topo, tm, &[a, b, c]));
            }
        }
    }
    if topo.link_count() > 0 {
        let slice_hops: usize = tm
            .demands
            .iter()
            .filter_map(|d| min_hops(topo, d.src, d.dst).map(|h| h * d.slices as usize))
            .sum();
        bound = bound.max(slice_hops.div_ceil(topo.link_count()));
    }
    bound
}

fn push_term(out: &mut String, line: &mut String, term: &str) {
    if line.len() + term.len() > 200 {
        out.push_str(line);
        out.push('\n');
        line.clear();
        line.push(' ');
    }
    line.push_str(term);
}

fn flush_line(out: &mut String, line: &mut String) {
    out.push_str(line);
    out.push('\n');
    line.clear();
    line.push(' ');
}

/// Emit the full binary model in industry-standard LP file format, with
/// variable and constraint counts in a header comment. Channels are named
/// by their 1-based start slice.
pub fn emit_lp(topo: &Topology, tm: &TrafficMatrix, grid: SpectrumGrid) -> String {
    let slots = grid.slot_count;
    let links = topo.links();
    let channels: Vec<Vec<usize>> = tm
        .demands
        .iter()
        .map(|d| {
            let w = d.slices as usize;
            if w > slots { Vec::new() } else { (1..=slots - w + 1).collect() }
        })
        .collect();

    let n_alpha: usize = channels.iter().map(|c| c.len()).sum();
    let n_x = n_alpha * links.len();
    let n_gamma = links.len() * slots;
    let n_delta = slots;
    let n_flow: usize = channels.iter().map(|c| c.len() * topo.node_count()).sum();
    let n_constraints = tm.demands.len() + n_flow + n_gamma + slots;

    let mut out = String::new();
    out.push_str(&format!(
        "\\ RSA model: topology {} (|V|={}, |E|={}), {} demands, |S|={}\n",
        topo.name,
        topo.node_count(),
        links.len(),
        tm.demands.len(),
        slots
    ));
    out.push_str(&format!(
        "\\ variables: x={} alpha={} gamma={} delta={} (total {})\n",
        n_x,
        n_alpha,
        n_gamma,
        n_delta,
        n_x + n_alpha + n_gamma + n_delta
    ));
    out.push_str(&format!("\\ constraints: {n_constraints}\n"));

    let mut line = String::from(" ");
    out.push_str("Minimize\n");
    line.push_str("obj:");
    for s in 1..=slots {
        push_term(&mut out, &mut line, &format!(" + delta_s{s}"));
    }
    flush_line(&mut out, &mut line);

    out.push_str("Subject To\n");
    for (d, chans) in tm.demands.iter().zip(&channels) {
        line.clear();
        line.push_str(&format!(" chan_d{}:", d.id));
        if chans.is_empty() {
            // no channel fits this demand: force infeasibility explicitly
            line.push_str(" 0 delta_s1 = 1");
        } else {
            for &c in chans {
                push_term(&mut out, &mut line, &format!(" + alpha_d{}_c{}", d.id, c));
            }
            line.push_str(" = 1");
        }
        flush_line(&mut out, &mut line);
    }

    for (d, chans) in tm.demands.iter().zip(&channels) {
        for &c in chans {
            for v in 0..topo.node_count() {
                line.clear();
                line.push_str(&format!(" flow_d{}_c{}_v{}:", d.id, c, v));
                for &e in topo.out_links(v) {
                    push_term(&mut out, &mut line, &format!(" + x_d{}_e{}_c{}", d.id, e, c));
                }
                for &e in topo.in_links(v) {
                    push_term(&mut out, &mut line, &format!(" - x_d{}_e{}_c{}", d.id, e, c));
                }
                if v == d.src {
                    push_term(&mut out, &mut line, &format!(" - alpha_d{}_c{}", d.id, c));
                } else if v == d.dst {
                    push_term(&mut out, &mut line, &format!(" + alpha_d{}_c{}", d.id, c));
                }
                line.push_str(" = 0");
                flush_line(&mut out, &mut line);
            }
        }
    }

    for e in 0..links.len() {
        for s in 1..=slots {
            line.clear();
            line.push_str(&format!(" uniq_e{e}_s{s}:"));
            for (d, chans) in tm.demands.iter().zip(&channels) {
                let w = d.slices as usize;
                for &c in chans {
                    if c <= s && s <= c + w - 1 {
                        push_term(&mut out, &mut line, &format!(" + x_d{}_e{}_c{}", d.id, e, c));
                    }
                }
            }
            line.push_str(&format!(" - gamma_e{e}_s{s} = 0"));
            flush_line(&mut out, &mut line);
        }
    }

    for s in 1..=slots {
        line.clear();
        line.push_str(&format!(" netuse_s{s}:"));
        for e in 0..links.len() {
            push_term(&mut out, &mut line, &format!(" + gamma_e{e}_s{s}"));
        }
        line.push_str(&format!(" - {} delta_s{s} <= 0", links.len()));
        flush_line(&mut out, &mut line);
    }

    out.push_str("Binary\n");
    line.clear();
    line.push(' ');
    for (d, chans) in tm.demands.iter().zip(&channels) {
        for &c in chans {
            push_term(&mut out, &mut line, &format!(" alpha_d{}_c{}", d.id, c));
            for e in 0..links.len() {
                push_term(&mut out, &mut line, &format!(" x_d{}_e{}_c{}", d.id, e, c));
            }
        }
    }
    for e in 0..links.len() {
        for s in 1..=slots {
            push_term(&mut out, &mut line, &format!(" gamma_e{e}_s{s}"));
        }
    }
    for s in 1..=slots {
        push_term(&mut out, &mut line, &format!(" delta_s{s}"));
    }
    flush_line(&mut out, &mut line);
    out.push_str("End\n");
    out
}
