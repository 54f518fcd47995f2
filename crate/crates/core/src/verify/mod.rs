//! Independent checks of computed solutions.

pub mod fixtures;
pub mod galerkin;
pub mod quadrature;
pub mod residual;
