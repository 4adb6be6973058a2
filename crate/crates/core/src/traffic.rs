//! Traffic demand sets: seeded random generation, the 25 Gbps per slice
//! rate mapping, the RWA (one wavelength per demand) view, and CSV I/O.

use crate::error::TrafficError;
use crate::rng::Rng;
use crate::topology::Topology;

pub const GBPS_PER_SLICE: f64 = 25.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Demand {
    pub id: usize,
    pub src: usize,
    pub dst: usize,
    pub slices: u32,
    pub rate_gbps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficMatrix {
    pub demands: Vec<Demand>,
    pub seed: u64,
    pub label: String,
}

impl TrafficMatrix {
    pub fn total_slices(&self) -> u64 {
        self.demands.iter().map(|d| d.slices as u64).sum()
    }

    pub fn max_slices(&self) -> u32 {
        self.demands.iter().map(|d| d.slices).max().unwrap_or(0)
    }
}

/// Draw `n_demands` random demands: an ordered pair of distinct nodes,
/// uniform over all such pairs, and a slice count uniform in
/// [slice_min, slice_max]. Repeated pairs are allowed. The draw order per
/// demand is: src, dst (over the remaining n-1 nodes), slices.
pub fn generate_traffic(
    topo: &Topology,
    n_demands: usize,
    slice_min: u32,
    slice_max: u32,
    seed: u64,
) -> Result<TrafficMatrix, TrafficError> {
    if slice_min < 1 || slice_min > slice_max {
        return Err(TrafficError::InvalidRange { min: slice_min, max: slice_max });
    }
    let n = topo.node_count() as u64;
    if n < 2 {
        return Err(TrafficError::TooFewNodes);
    }
    let mut rng = Rng::seed_from(seed);
    let mut demands = Vec::with_capacity(n_demands);
    for id in 0..n_demands {
        let src = rng.next_below(n) as usize;
        let mut dst = rng.next_below(n - 1) as usize;
        if dst >= src {
            dst += 1;
        }
        let slices = rng.range_inclusive(slice_min as u64, slice_max as u64) as u32;
        demands.push(Demand {
            id,
            src,
            dst,
            slices,
            rate_gbps: GBPS_PER_SLICE * slices as f64,
        });
    }
    Ok(TrafficMatrix {
        demands,
        seed,
        label: format!("{}-{}x{}..{}-s{}", topo.name, n_demands, slice_min, slice_max, seed),
    })
}

/// Convert a rate in Gbps to a slice count (25 Gbps per 12.5 GHz slice
/// under QPSK). The rate must be a positive multiple of 25.
pub fn rate_to_slices(rate_gbps: f64) -> Result<u32, TrafficError> {
    let q = rate_gbps / GBPS_PER_SLICE;
    let rounded = q.round();
    if rate_gbps <= 0.0 || (q - rounded).abs() > 1e-9 || rounded < 1.0 {
        return Err(TrafficError::NotRateMultiple(rate_gbps));
    }
    Ok(rounded as u32)
}

/// The fixed-grid WDM view of a traffic matrix: every demand occupies one
/// 50 GHz wavelength regardless of rate. Idempotent.
pub fn to_rwa_demands(tm: &TrafficMatrix) -> TrafficMatrix {
    TrafficMatrix {
        demands: tm
            .demands
            .iter()
            .map(|d| Demand { slices: 1, ..d.clone() })
            .collect(),
        seed: tm.seed,
        label: format!("{}-rwa", tm.label.trim_end_matches("-rwa")),
    }
}

pub const TRAFFIC_CSV_HEADER: &str = "id,src,dst,slices,rate_gbps";

pub fn save_traffic(topo: &Topology, tm: &TrafficMatrix) -> String {
    let mut out = String::from(TRAFFIC_CSV_HEADER);
    out.push('\n');
    for d in &tm.demands {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            d.id,
            topo.node_name(d.src),
            topo.node_name(d.dst),
            d.slices,
            d.rate_gbps
        ));
    }
    out
}

pub fn load_traffic(topo: &Topology, text: &str) -> Result<TrafficMatrix, TrafficError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TRAFFIC_CSV_HEADER => {}
        _ => {
            return Err(TrafficError::Csv {
                line: 1,
                msg: format!("missing header {TRAFFIC_CSV_HEADER:?}"),
            })
        }
    }
    let mut demands = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(TrafficError::Csv { line, msg: format!("expected 5 fields, got {}", fields.len()) });
        }
        let id: usize = fields[0]
            .parse()
            .map_err(|e| TrafficError::Csv { line, msg: format!("bad id: {e}") })?;
        let src = topo
            .node_id(fields[1])
            .map_err(|_| TrafficError::UnknownNode { line, node: fields[1].to_string() })?;
        let dst = topo
            .node_id(fields[2])
            .map_err(|_| TrafficError::UnknownNode { line, node: fields[2].to_string() })?;
        let slices: u32 = fields[3]
            .parse()
            .map_err(|e| TrafficError::Csv { line, msg: format!("bad slices: {e}") })?;
        if slices == 0 {
            return Err(TrafficError::Csv { line, msg: "slices must be >= 1".into() });
        }
        if src == dst {
            return Err(TrafficError::Csv { line, msg: "src and dst must differ".into() });
        }
        let rate_gbps: f64 = fields[4]
            .parse()
            .map_err(|e| TrafficError::Csv { line, msg: format!("bad rate: {e}") })?;
        if demands.len() != id {
            return Err(TrafficError::Csv { line, msg: format!("ids must be dense, expected {}", demands.len()) });
        }
        demands.push(Demand { id, src, dst, slices, rate_gbps });
    }
    Ok(TrafficMatrix { demands, seed: 0, label: String::from("loaded") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::builtin_topology;

    #[test]
    fn generation_respects_range_and_count() {
        let topo = builtin_topology("six_node").unwrap();
        let tm = generate_traffic(&topo, 8, 1, 4, 7).unwrap();
        assert_eq!(tm.demands.len(), 8);
        for d in &tm.demands {
            assert!((1..=4).contains(&d.slices));
            assert_ne!(d.src, d.dst);
            assert_eq!(d.rate_gbps, 25.0 * d.slices as f64);
        }
    }

    #[test]
    fn degenerate_range_is_constant() {
        let topo = builtin_topology("six_node").unwrap();
        let tm = generate_traffic(&topo, 5, 2, 2, 99).unwrap();
        assert!(tm.demands.iter().all(|d| d.slices == 2));
    }

    #[test]
    fn generation_is_deterministic() {
        let topo = builtin_topology("cost239").unwrap();
        let a = generate_traffic(&topo, 45, 1, 4, 123).unwrap();
        let b = generate_traffic(&topo, 45, 1, 4, 123).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_range_rejected() {
        let topo = builtin_topology("six_node").unwrap();
        assert!(generate_traffic(&topo, 3, 4, 1, 0).is_err());
        assert!(generate_traffic(&topo, 3, 0, 2, 0).is_err());
    }

    #[test]
    fn rate_mapping() {
        assert_eq!(rate_to_slices(25.0).unwrap(), 1);
        assert_eq!(rate_to_slices(100.0).unwrap(), 4);
        assert!(rate_to_slices(30.0).is_err());
        assert!(rate_to_slices(0.0).is_err());
    }

    #[test]
    fn rwa_view_is_idempotent_and_preserves_endpoints() {
        let topo = builtin_topology("cost239").unwrap();
        let tm = generate_traffic(&topo, 45, 1, 4, 5).unwrap();
        let rwa = to_rwa_demands(&tm);
        assert_eq!(rwa.demands.len(), 45);
        assert_eq!(rwa.total_slices(), 45);
        for (a, b) in tm.demands.iter().zip(&rwa.demands) {
            assert_eq!((a.id, a.src, a.dst), (b.id, b.src, b.dst));
            assert_eq!(b.slices, 1);
        }
        assert_eq!(to_rwa_demands(&rwa).demands, rwa.demands);
    }

    #[test]
    fn csv_round_trip() {
        let topo = builtin_topology("six_node").unwrap();
        let tm = generate_traffic(&topo, 8, 1, 4, 7).unwrap();
        let text = save_traffic(&topo, &tm);
        let back = load_traffic(&topo, &text).unwrap();
        assert_eq!(back.demands, tm.demands);
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let topo = builtin_topology("six_node").unwrap();
        let header = TRAFFIC_CSV_HEADER;
        assert!(load_traffic(&topo, &format!("{header}\n0,1,2,0,25")).is_err());
        assert!(load_traffic(&topo, &format!("{header}\n0,1,X,2,50")).is_err());
        assert!(load_traffic(&topo, "nope\n").is_err());
    }
}
