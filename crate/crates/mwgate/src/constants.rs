//! Physical constants used by the device models.

/// Magnetic flux quantum h/2e in webers.
pub const FLUX_QUANTUM: f64 = 2.067_833_848e-15;

/// Default characteristic impedance of the feed line in ohms.
pub const DEFAULT_Z0: f64 = 50.0;
