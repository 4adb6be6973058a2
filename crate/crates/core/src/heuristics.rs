//! The two reference heuristics: Most Slices First for RSA, and a genetic
//! algorithm over demand serving orders decoded by first-fit for RWA.

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::ksp::yen_k_shortest_paths;
use crate::rng::Rng;
use crate::spectrum::{first_fit_channel, Channel, SpectrumAssignment, SpectrumGrid};
use crate::topology::{Path, Topology};
use crate::traffic::TrafficMatrix;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MsfConfig {
    pub k_paths: usize,
    pub grid: SpectrumGrid,
}

impl Default for MsfConfig {
    fn default() -> Self {
        MsfConfig { k_paths: 3, grid: SpectrumGrid::rsa_default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaConfig {
    pub k_paths: usize,
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub elitism: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            k_paths: 10,
            population: 50,
            generations: 200,
            tournament_size: 3,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            elitism: 2,
            seed: 0,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<(), SolveError> {
        if self.population == 0 {
            return Err(SolveError::InvalidConfig("population must be >= 1".into()));
        }
        if self.elitism >= self.population {
            return Err(SolveError::InvalidConfig("elitism must be < population".into()));
        }
        if self.tournament_size == 0 || self.tournament_size > self.population {
            return Err(SolveError::InvalidConfig(
                "tournament_size must be in 1..=population".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(0.0..=1.0).contains(&self.mutation_rate)
        {
            return Err(SolveError::InvalidConfig("rates must be in [0, 1]".into()));
        }
        Ok(())
    }
}

/// A serving order: a permutation of the demand ids of one matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering(pub Vec<usize>);

impl Ordering {
    pub fn identity(tm: &TrafficMatrix) -> Self {
        Ordering(tm.demands.iter().map(|d| d.id).collect())
    }

    /// Descending slice count, ascending id on ties (the MSF order).
    pub fn most_slices_first(tm: &TrafficMatrix) -> Self {
        let mut ids: Vec<usize> = tm.demands.iter().map(|d| d.id).collect();
        ids.sort_by_key(|&id| {
            let d = tm.demands.iter().find(|d| d.id == id).unwrap();
            (std::cmp::Reverse(d.slices), d.id)
        });
        Ordering(ids)
    }

    pub fn is_permutation_of(&self, tm: &TrafficMatrix) -> bool {
        let mut seen: Vec<usize> = self.0.clone();
        seen.sort_unstable();
        let mut ids: Vec<usize> = tm.demands.iter().map(|d| d.id).collect();
        ids.sort_unstable();
        seen == ids
    }
}

fn candidate_paths(
    topo: &Topology,
    tm: &TrafficMatrix,
    k: usize,
) -> Result<Vec<Vec<Path>>, SolveError> {
    let mut cache: std::collections::HashMap<(usize, usize), Vec<Path>> =
        std::collections::HashMap::new();
    let mut out = Vec::with_capacity(tm.demands.len());
    for d in &tm.demands {
        let paths = match cache.entry((d.src, d.dst)) {
            std::collections::hash_map::Entry::Occupied(e) => e.get().clone(),
            std::collections::hash_map::Entry::Vacant(e) => {
                let p = yen_k_shortest_paths(topo, d.src, d.dst, k)?;
                e.insert(p.clone());
                p
            }
        };
        out.push(paths);
    }
    Ok(out)
}

/// Serve one demand: first-fit every candidate path and take the placement
/// with the lowest starting slice, breaking ties by path rank.
fn serve_first_fit(
    asg: &mut SpectrumAssignment,
    demand: usize,
    width: usize,
    paths: &[Path],
) -> Result<(), SolveError> {
    let mut best: Option<(usize, usize)> = None; // (start, path rank)
    for (rank, p) in paths.iter().enumerate() {
        let avail = asg.path_availability(&p.links);
        if let Some(start) = first_fit_channel(&avail, width) {
            if best.is_none_or(|(s, _)| start < s) {
                best = Some((start, rank));
            }
        }
    }
    let Some((start, rank)) = best else {
        return Err(SolveError::CapacityExhausted { demand });
    };
    asg.place(demand, &paths[rank], Channel { start, width })?;
    Ok(())
}

/// Most Slices First: demands in descending slice order, each served on
/// the candidate path whose first fit starts lowest. Deterministic.
pub fn msf_solve(
    topo: &Topology,
    tm: &TrafficMatrix,
    cfg: &MsfConfig,
) -> Result<SpectrumAssignment, SolveError> {
    let paths = candidate_paths(topo, tm, cfg.k_paths)?;
    let order = Ordering::most_slices_first(tm);
    let mut asg = SpectrumAssignment::new(cfg.grid);
    for &id in &order.0 {
        let d = tm.demands.iter().find(|d| d.id == id).unwrap();
        serve_first_fit(&mut asg, id, d.slices as usize, &paths[id])?;
    }
    Ok(asg)
}

/// First-fit wavelength assignment in a fixed serving order. Expects a
/// matrix already converted to one wavelength per demand.
pub fn first_fit_rwa(
    topo: &Topology,
    tm: &TrafficMatrix,
    order: &Ordering,
    k_paths: usize,
    grid: SpectrumGrid,
) -> Result<SpectrumAssignment, SolveError> {
    if tm.demands.iter().any(|d| d.slices != 1) {
        return Err(SolveError::InvalidConfig(
            "first_fit_rwa expects unit-width demands (apply to_rwa_demands first)".into(),
        ));
    }
    if !order.is_permutation_of(tm) {
        return Err(SolveError::InvalidConfig("order is not a permutation of the demand ids".into()));
    }
    let paths = candidate_paths(topo, tm, k_paths)?;
    decode_order(&order, &paths, grid)
}

fn decode_order(
    order: &Ordering,
    paths: &[Vec<Path>],
    grid: SpectrumGrid,
) -> Result<SpectrumAssignment, SolveError> {
    let mut asg = SpectrumAssignment::new(grid);
    for &id in &order.0 {
        serve_first_fit(&mut asg, id, 1, &paths[id])?;
    }
    Ok(asg)
}

/// One entry of the GA progress log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationStat {
    pub generation: usize,
    pub best_fitness: usize,
}

pub fn generation_log_csv(log: &[GenerationStat]) -> String {
    let mut out = String::from("generation,best_fitness\n");
    for g in log {
        out.push_str(&format!("{},{}\n", g.generation, g.best_fitness));
    }
    out
}

struct Genome {
    order: Ordering,
    fitness: usize,
}

/// Order crossover (OX1): copy a random segment of parent a, fill the rest
/// in parent-b order.
fn order_crossover(rng: &mut Rng, a: &[usize], b: &[usize]) -> Vec<usize> {
    let n = a.len();
    if n < 2 {
        return a.to_vec();
    }
    let i = rng.next_below(n as u64) as usize;
    let j = rng.next_below(n as u64) as usize;
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    let mut child = vec![usize::MAX; n];
    child[lo..=hi].copy_from_slice(&a[lo..=hi]);
    let mut fill = b.iter().filter(|id| !a[lo..=hi].contains(id));
    for slot in child.iter_mut() {
        if *slot == usize::MAX {
            *slot = *fill.next().expect("OX1 fill exhausted");
        }
    }
    child
}

/// Genetic search for a good serving order, decoded by first-fit RWA.
/// Fitness is the wavelength count of the decoded assignment. Elitism
/// makes the per-generation best-fitness log non-increasing.
pub fn ga_rwa_solve(
    topo: &Topology,
    tm: &TrafficMatrix,
    cfg: &GaConfig,
) -> Result<(SpectrumAssignment, Vec<GenerationStat>), SolveError> {
    cfg.validate()?;
    if tm.demands.iter().any(|d| d.slices != 1) {
        return Err(SolveError::InvalidConfig(
            "ga_rwa_solve expects unit-width demands (apply to_rwa_demands first)".into(),
        ));
    }
    let grid = SpectrumGrid::rwa_default();
    let mut rng = Rng::seed_from(cfg.seed);
    // paths are order-independent; computing them per decode dominates runtime
    let paths = candidate_paths(topo, tm, cfg.k_paths)?;

    let decode = |order: &Ordering| -> Result<usize, SolveError> {
        Ok(decode_order(order, &paths, grid)?.used_slice_count())
    };

    // initial population: identity, the MSF-style order, then random perms
    let mut population: Vec<Genome> = Vec::with_capacity(cfg.population);
    let push = |order: Ordering, population: &mut Vec<Genome>| -> Result<(), SolveError> {
        let fitness = decode(&order)?;
        population.push(Genome { order, fitness });
        Ok(())
    };
    push(Ordering::identity(tm), &mut population)?;
    if population.len() < cfg.population {
        push(Ordering::most_slices_first(tm), &mut population)?;
    }
    while population.len() < cfg.population {
        let mut ids = Ordering::identity(tm).0;
        rng.shuffle(&mut ids);
        push(Ordering(ids), &mut population)?;
    }

    let best_index = |pop: &[Genome]| {
        (0..pop.len())
            .min_by_key(|&i| (pop[i].fitness, i))
            .unwrap()
    };

    let mut log = Vec::with_capacity(cfg.generations + 1);
    log.push(GenerationStat {
        generation: 0,
        best_fitness: population[best_index(&population)].fitness,
    });

    for generation in 1..=cfg.generations {
        let mut ranked: Vec<usize> = (0..population.len()).collect();
        ranked.sort_by_key(|&i| (population[i].fitness, i));

        let mut next: Vec<Genome> = Vec::with_capacity(cfg.population);
        for &i in ranked.iter().take(cfg.elitism) {
            next.push(Genome {
                order: population[i].order.clone(),
                fitness: population[i].fitness,
            });
        }
        while next.len() < cfg.population {
            let tournament = |rng: &mut Rng| {
                let mut best: Option<usize> = None;
                for _ in 0..cfg.tournament_size {
                    let i = rng.next_below(cfg.population as u64) as usize;
                    if best.is_none_or(|b: usize| {
                        (population[i].fitness, i) < (population[b].fitness, b)
                    }) {
                        best = Some(i);
                    }
                }
                best.unwrap()
            };
            let pa = tournament(&mut rng);
            let pb = tournament(&mut rng);
            let mut child = if rng.next_f64() < cfg.crossover_rate {
                order_crossover(&mut rng, &population[pa].order.0, &population[pb].order.0)
            } else {
                population[pa].order.0.clone()
            };
            if rng.next_f64() < cfg.mutation_rate && child.len() >= 2 {
                let i = rng.next_below(child.len() as u64) as usize;
                let j = rng.next_below(child.len() as u64) as usize;
                child.swap(i, j);
            }
            let order = Ordering(child);
            let fitness = decode(&order)?;
            next.push(Genome { order, fitness });
        }
        population = next;
        log.push(GenerationStat {
            generation,
            best_fitness: population[best_index(&population)].fitness,
        });
    }

    let best = best_index(&population);
    let asg = decode_order(&population[best].order, &paths, grid)?;
    Ok((asg, log))
}
