//! Unit conversions. Lengths are nm, energies eV, temperatures kelvin;
//! a frequency ξ is always carried as the energy ħξ in eV.

/// ħc in eV·nm (CODATA).
pub const HBAR_C: f64 = 197.326_980_4;

/// Boltzmann constant in eV/K (CODATA).
pub const K_BOLTZMANN: f64 = 8.617_333e-5;

/// Thermal wavelength λ_T = ħc/(kB T) in nm.
pub fn thermal_wavelength(temperature: f64) -> f64 {
    HBAR_C / (K_BOLTZMANN * temperature)
}

/// Matsubara frequency ħξ_n = 2π n kB T in eV.
pub fn matsubara_frequency(n: u32, temperature: f64) -> f64 {
    2.0 * std::f64::consts::PI * f64::from(n) * K_BOLTZMANN * temperature
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_matsubara_at_room_temperature() {
        // 2π × kB·300 K = 2π × 0.0258520 eV
        let xi1 = matsubara_frequency(1, 300.0);
        assert!((xi1 - 2.0 * std::f64::consts::PI * 0.025_852_0).abs() < 2e-6);
        assert!((xi1 - 0.1624).abs() < 1e-3);
    }

    #[test]
    fn thermal_wavelength_300k_is_7p6_microns() {
        let lt = thermal_wavelength(300.0);
        assert!((lt / 1000.0 - 7.6).abs() < 0.1, "λ_300K = {lt} nm");
    }
}
