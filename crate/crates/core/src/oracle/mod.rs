//! Direct eigenvalue solver for the discretized linear stability problem.

pub mod band;
pub mod eigen;
pub mod pencil;

pub use eigen::{
    divergence_diag, hunt_spectrum, refinement_persistence, shift_invert_eigen,
    shift_invert_robust, EigenPair, HuntEntry, HuntReport,
};
pub use pencil::{assemble_pencil, Pencil};
