//! Successive substitution through the map that freezes coefficients at a
//! candidate trajectory, with the invariant-set checks, a continuity probe
//! and a two-solution energy experiment.

mod iterate;
mod map;
mod membership;
mod probe;
mod triple;
mod uniqueness;

pub use iterate::{
    check_initial_data, iterate, iterate_from, Converged, FixedPointSettings, IterationRecord,
};
pub use map::{coupled_residual, momentum_forcing, picard_map, CoupledResidual, MapOutput, MapSettings};
pub use membership::{
    check_membership, size_budgets, velocity_usage, BudgetConstants, BudgetSizing, Budgets,
    MembershipReport,
};
pub use probe::{continuity_probe, perturb, smooth_direction, ProbeReport, ProbeRow};
pub use triple::{energy_weights, IterTriple, YDistance};
pub use uniqueness::{
    delta_threshold, difference_energy, fit_c12, uniqueness_experiment, GronwallLedger,
    GronwallRow,
};
