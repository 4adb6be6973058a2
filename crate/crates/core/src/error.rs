use thiserror::Error;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("failed to parse topology document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("link {link} references unknown node {node:?}")]
    DanglingEndpoint { link: usize, node: String },
    #[error("link {link} is a self-loop on node {node:?}")]
    SelfLoop { link: usize, node: String },
    #[error("duplicate node identifier {0:?}")]
    DuplicateNode(String),
    #[error("duplicate directed link {src:?} -> {dst:?} (set parallel=true to allow)")]
    DuplicateLink { src: String, dst: String },
    #[error("link {link} has negative length {length_km}")]
    NegativeLength { link: usize, length_km: f64 },
    #[error("unknown builtin topology {0:?} (known: six_node, cost239)")]
    UnknownBuiltin(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("no path from {src:?} to {dst:?}")]
    NoPath { src: String, dst: String },
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("invalid slice range [{min}, {max}]")]
    InvalidRange { min: u32, max: u32 },
    #[error("topology needs at least 2 nodes to generate traffic")]
    TooFewNodes,
    #[error("rate {0} Gbps is not a positive multiple of 25")]
    NotRateMultiple(f64),
    #[error("traffic CSV line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("traffic CSV line {line}: unknown node {node:?}")]
    UnknownNode { line: usize, node: String },
}

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("channel [{start}, {end}] does not fit a grid of {slots} slots")]
    ChannelOutsideGrid { start: usize, end: usize, slots: usize },
    #[error("slice collision on link {link} at slice {slice}")]
    SliceCollision { link: usize, slice: usize },
    #[error("unknown link id {0}")]
    UnknownLink(usize),
    #[error("demand {0} already routed")]
    DuplicateRoute(usize),
    #[error("failed to parse assignment document: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("demand {demand} fits on none of its candidate paths (capacity exhausted)")]
    CapacityExhausted { demand: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("instance too large for brute force: {combinations} combinations exceed cap {cap}")]
    OracleTooLarge { combinations: u128, cap: u128 },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}
