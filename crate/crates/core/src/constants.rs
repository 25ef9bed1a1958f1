//! Physical constants and unit systems.
//!
//! Every operation that touches dimensional quantities takes a
//! [`PhysicalConstants`] argument, so desk-scale runs can use natural units
//! (`hbar = c = 1`) while the relativistic checks use CODATA values.

/// Reduced Planck constant, J s (CODATA 2018).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light, m/s (exact).
pub const C_SI: f64 = 2.997_924_58e8;
/// Newton constant, m^3 kg^-1 s^-2 (CODATA 2018).
pub const G_SI: f64 = 6.674_30e-11;
/// Electron mass, kg (CODATA 2018).
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;
/// Bohr radius, m (CODATA 2018).
pub const BOHR_RADIUS_SI: f64 = 5.291_772_109_03e-11;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub g_newton: f64,
}

impl PhysicalConstants {
    /// Natural units: hbar = c = G = 1.
    pub fn natural() -> Self {
        Self { hbar: 1.0, c: 1.0, g_newton: 1.0 }
    }

    pub fn si() -> Self {
        Self { hbar: HBAR_SI, c: C_SI, g_newton: G_SI }
    }

    /// l_P = sqrt(hbar G / c^3)
    pub fn planck_length(&self) -> f64 {
        (self.hbar * self.g_newton / self.c.powi(3)).sqrt()
    }

    /// m_P = sqrt(hbar c / G)
    pub fn planck_mass(&self) -> f64 {
        (self.hbar * self.c / self.g_newton).sqrt()
    }

    /// E_P = m_P c^2
    pub fn planck_energy(&self) -> f64 {
        self.planck_mass() * self.c * self.c
    }

    /// D_P = m_P / l_P^3
    pub fn planck_density(&self) -> f64 {
        self.planck_mass() / self.planck_length().powi(3)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::natural()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planck_scale_si_magnitudes() {
        let c = PhysicalConstants::si();
        // Known magnitudes: l_P ~ 1.616e-35 m, m_P ~ 2.176e-8 kg.
        assert!((c.planck_length() / 1.616_255e-35 - 1.0).abs() < 1e-4);
        assert!((c.planck_mass() / 2.176_434e-8 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn natural_units_are_unity() {
        let c = PhysicalConstants::natural();
        assert_eq!(c.planck_length(), 1.0);
        assert_eq!(c.planck_mass(), 1.0);
        assert_eq!(c.planck_energy(), 1.0);
        assert_eq!(c.planck_density(), 1.0);
    }
}
