//! Equations of motion and the adaptive integrator shared by every model.

mod integrator;
mod models;
mod tableau;
mod trajectory;

pub use integrator::{
    integrate, IntegrateOptions, OdeSystem, Sampling, TimeReversed, DEFAULT_SAMPLES_PER_PERIOD,
    MIN_SAMPLES_PER_PERIOD,
};
pub use models::*;
pub use trajectory::{format_number, PhaseSpaceState, Trajectory, TrajectoryMeta};
