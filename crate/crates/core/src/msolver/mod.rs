//! Finite-difference solver for the Dirichlet problem `M[u] = 0`.

mod continuation;
mod diagnostics;
mod field;
mod grid;
mod linear;
mod newton;
mod operator;

pub use continuation::{continuity_solve, ContinuationParams, ContinuationPath, ContinuationStatus, ContinuationStep};
pub use diagnostics::{diagnostics, max_principle, ComparisonCheck, Diagnostics, GradientBoundCheck, MaxPrincipleCheck, MAX_PRINCIPLE_TOL};
pub use field::{FieldMeta, ScalarField};
pub use grid::{AnnularSector, ArmEnd, Cut, InteriorNode, MaskedGrid, NodeKind, Rectangle, Region, EAST, NORTH, SOUTH, WEST};
pub use linear::{bicgstab, LinearMethod};
pub use newton::{gradient_stats, laplace_guess, newton_solve, GradientStats, NewtonParams, SolveReport};
pub use operator::{flux, regular_operator, Problem};

#[cfg(test)]
mod tests;
