//! Physical constants (SI, 2018 CODATA / exact SI definitions).

/// Planck constant h (J·s), exact.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Reduced Planck constant ħ = h / 2π (J·s).
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);

/// Boltzmann constant k_B (J/K), exact.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Vacuum permittivity ε₀ (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Bohr magneton μ_B (J/T).
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
