//! Logical-level toolchain for magic state distillation factories hosted in a
//! single bivariate bicycle (BB) code block.
//!
//! The pipeline mirrors how a factory is designed:
//!
//! 1. [`protocol`] — triorthogonal distillation protocols: verification,
//!    exhaustive fault enumeration, and the working-row footprint.
//! 2. [`bbcode`] / [`native`] — BB code construction, shift automorphisms and
//!    the LPU-native measurement set.
//! 3. [`compiler`] — logical qubit mapping, masking, TSP rotation scheduling,
//!    injection gadget expansion and dual-track pairing.
//! 4. [`compressor`] — triorthogonality-preserving footprint compression with
//!    qubit recycling.
//! 5. [`simulator`] / [`resources`] — exact density-matrix evaluation under
//!    the four-source noise model, a union-bound estimator, and space-time
//!    resource accounting.
//!
//! With the default `parallel` feature the heavy inner loops (fault
//! enumeration, annealing restarts, sweeps) run on rayon; disabling the
//! feature yields a bit-identical sequential build.

pub mod bbcode;
pub mod compiler;
pub mod compressor;
pub mod dm;
pub mod error;
pub mod exec;
pub mod gf2;
pub mod native;
pub mod noise;
pub mod pauli;
pub mod protocol;
pub mod resources;
pub mod schedule;
pub mod simulator;
pub mod statevec;
pub mod tsp;

pub use error::{Error, Result};
