//! Pseudospectral solver for the incompressible Navier–Stokes equations in
//! the stress-free channel `(0,1)^3`, periodic horizontally, together with a
//! diagnostics engine for the vertical-pressure-derivative regularity
//! criterion and a numerical laboratory for the functional inequalities the
//! regularity argument relies on.

pub mod field;
pub mod calculus;
pub mod norms;
pub mod solver;
pub mod monitor;
pub mod inequality;
pub mod cli;
