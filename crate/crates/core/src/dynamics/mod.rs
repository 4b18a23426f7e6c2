//! Time evolution: noisy finite pulse sequences, single-realization limit
//! trajectories, the averaged master equation and closed-form special cases.

mod analytic;
mod continuous;
mod finite;
mod lindblad;
mod model;

pub use analytic::{averaged_pulse, ideal_reference, noisy_pulse, phase_damped_solution};
pub use continuous::{
    continuous_trajectory, continuous_trajectory_strided, refine_steps, SplitStepIntegrator, StepRefinement,
};
pub use finite::{propagate_finite_pulses, FinitePulseEvolution};
pub use lindblad::{
    averaged_lindblad, averaged_lindblad_with, lindblad_superoperator, LindbladMethod, LindbladPropagator,
    SUPEROPERATOR_DIM_CAP,
};
pub use model::{validate_density, NoiseModel, ReferenceCache, Scenario, TrajectoryResult, WienerRecord};
