//! Damped evolution `u_tt + Lu + Lu_t = 0` driven by the logarithmic operator
//! `L = log(I − Δ)`: exact per-mode evolution, radial integrals of the symbol,
//! the large-time profile, a spectral solver, and rate/band checks.

// `!(x > 0.0)` is the NaN-rejecting form of `x <= 0.0`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod modes;
pub mod multiplier;
pub mod profile;
pub mod quadrature;
pub mod solver;
pub mod special;

pub use asymptotics::{
    energy_rate_sweep, fit_rate, last_decade_variation, profile_error_sweep,
    riemann_lebesgue_check, verify_sandwich, NormSample, RateFit, RateSweep, SandwichClaim,
    SandwichOptions, SandwichReport, SandwichRow, SweepBackend,
};
pub use error::{Error, Result};
pub use modes::{
    check_energy_identity, check_pointwise_estimates, energy_density, mode_evaluate, ode_oracle,
    EnergyDensity, FundamentalPair, ModeClosedForm, PointwiseCheck,
};
pub use multiplier::{roots_at, symbol_at, Regime, RootPair, SymbolPoint};
pub use profile::{
    decomposition_bounds, frequency_norms, phi_at, profile_error, DataFamily, DataPair,
    InitialDatum, ProfileErrorReport,
};
pub use quadrature::{integrate, IntegralKind, IntegralSpec, QuadratureResult, Tolerance};
pub use solver::{evolve, norms, Evolver, Field, GridSpec, Snapshot, Space};

pub use num_complex::Complex64;
