//! Fourier-side coefficient dynamics: the exact propagator, the forced
//! coefficient response, ODE residuals and resonance/multiplier probes.

mod probe;
mod propagator;

pub use probe::{
    log_radii, multiplier_probe, resonance_locus, MultiplierProbeReport, MultiplierSeries, RayProbe, ResonanceLocus,
    LIMIT_MISMATCH_TOL,
};
pub use propagator::{
    coefficient_rhs, forced_multiplier, forced_propagator_matrix, ode_residual, propagate, propagate_forced,
    propagator_matrix, removable_limit, PropagatorMatrix, SpectralCoefficients, Wave, REMOVABLE_THRESHOLD,
};
