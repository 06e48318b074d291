//! Galerkin simulation of the one-dimensional Landau–Lifshitz equation with
//! Neumann ends, under affine and applied-field proportional feedback, with
//! the linearized closed loops and Lyapunov diagnostics.

pub mod batch;
pub mod config;
pub mod diagnostics;
pub mod discretization;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod integrator;
pub mod output;
pub mod plot;
pub mod presets;
pub mod reference;
pub mod report;
pub mod sampling;
pub mod scenario;
pub mod tridiag;
pub mod vec3;
pub mod verify;
