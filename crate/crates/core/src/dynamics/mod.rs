//! Numerical side: integration, return maps, closed orbits and limit cycles.

mod bautin;
mod escape;
mod integrator;
mod section;
mod slide;

pub use bautin::{
    bautin_base_point, bautin_search, stage1_scheme, stage2_scheme, BautinAttempt, BautinOptions,
    BautinReport, BautinStage,
};
pub use escape::{escape_witness, EscapeWitness};
pub use integrator::{
    converges_to_origin, integrate, orbit_fate, Convergence, DenseStep, FnField,
    IntegrationFailure, IntegratorOptions, Method, OrbitFate, OrbitalField, PlanarField, Reversed,
    Sample, SlowScaledField, Termination, Trajectory, SLOW_SCALE_GAP,
};
pub use section::{
    find_limit_cycles, geometric_seeds, orbit_closed, orbit_closed_within, poincare_return,
    rotation_sign, successive_returns, CycleStability, LimitCycle, LimitCycleReport, Section,
    SectionCrossing, SeedDisplacement,
};
pub use slide::{scheme_fate, SchemeFate, SLIDE_RESUME_GAP};
