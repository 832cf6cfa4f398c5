//! Physical constants (SI, CODATA 2018 exact values).

/// Speed of light in vacuum (m/s). Exact by definition of the metre.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Planck constant (J·s). Exact since the 2019 SI revision.
pub const PLANCK_J_S: f64 = 6.626_070_15e-34;

/// Boltzmann constant (J/K). Exact since the 2019 SI revision.
pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;

/// c expressed in nm·THz, so that ν[THz] = C_NM_THZ / λ[nm].
pub const C_NM_THZ: f64 = SPEED_OF_LIGHT_M_PER_S * 1e-3;
