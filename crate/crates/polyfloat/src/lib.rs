//! Random polytopes, floating bodies and log-concave measures.
//!
//! The crate constructs the deterministic approximant bodies of a
//! log-concave probability measure (floating polytope, density level set,
//! Radon body), samples random polytopes from the supported density classes,
//! measures Hausdorff / logarithmic-Hausdorff / Banach-Mazur-bound distances
//! between bodies represented by per-direction scalars on sphere nets, and
//! ships a seeded Monte Carlo experiment harness that exercises the
//! convergence behavior of all of the above at desk scale.
//!
//! Start with the runnable examples: `cargo run --release --example <name>`
//! for `nets`, `bodies_and_distances`, `densities`, `floating_bodies`,
//! `random_polytopes`, `universal_measure` and `experiment_sweep`.

pub mod body;
pub mod density;
pub mod experiment;
pub mod float;
pub mod json;
pub mod net;
pub mod numeric;
pub mod sampler;
pub mod universal;
