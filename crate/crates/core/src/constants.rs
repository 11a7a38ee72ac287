//! Physical constants (CODATA 2018, SI units).

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant [J s].
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant [J / K].
pub const K_B: f64 = 1.380_649e-23;
/// Vacuum permeability [H / m].
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Speed of light in vacuum [m / s].
pub const C_LIGHT: f64 = 299_792_458.0;
/// Free-space wave impedance [ohm].
pub const ETA_0: f64 = MU_0 * C_LIGHT;
/// Superconducting flux quantum h / 2e [Wb].
pub const PHI_0: f64 = 2.067_833_848e-15;
