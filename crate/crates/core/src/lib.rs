//! Routing and spectrum assignment (RSA) and routing and wavelength
//! assignment (RWA) for optical network planning: exact branch-and-bound
//! and reference heuristics (Most Slices First, GA-ordered first-fit),
//! plus a benchmark harness that audits heuristic optimality gaps across
//! problem scales and exposes distortion in heuristic-vs-heuristic
//! comparisons.

pub mod bench;
pub mod error;
pub mod exact;
pub mod heuristics;
pub mod ksp;
pub mod rng;
pub mod spectrum;
pub mod topology;
pub mod traffic;

pub use error::{SolveError, SpectrumError, TopologyError, TrafficError};
pub use exact::{
    brute_force_oracle, emit_lp, lower_bound, solve_rsa_exact, solve_rwa_exact,
    solve_rwa_exact_warm, SolveOutcome, SolveStatus, SolverLimits,
};
pub use heuristics::{
    first_fit_rwa, ga_rwa_solve, msf_solve, GaConfig, GenerationStat, MsfConfig, Ordering,
};
pub use ksp::{cmp_paths, enumerate_simple_paths, yen_k_shortest_paths};
pub use rng::Rng;
pub use spectrum::{
    first_fit_channel, load_assignment, save_assignment, validate_assignment, AvailabilityVector,
    Channel, SpectrumAssignment, SpectrumGrid, ValidationReport, Violation,
};
pub use topology::{builtin_topology, load_topology, Link, Path, Topology};
pub use traffic::{
    generate_traffic, load_traffic, rate_to_slices, save_traffic, to_rwa_demands, Demand,
    TrafficMatrix,
};
