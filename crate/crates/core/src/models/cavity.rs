//! Analytic Fabry-Perot design formulas.
//!
//! These work in SI units: `g = sqrt(|mu_eg|^2 omega / (2 hbar eps0 V))`,
//! `kappa = pi c / (2 l F)`, `F ~ pi/(1-R)` for `R >= 99%`,
//! `kappa = pi c / (Q lambda)`, and the single-atom cooperativity
//! `C = g^2/(kappa Gamma)`. The atom-detection cost estimate is
//! `M = S^2/(eta C^3)` scattering events.

use super::{CavityGeometry, ModelError};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant in J s (2018 CODATA).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity in F/m (2018 CODATA).
pub const EPSILON_0: f64 = 8.854_187_8128e-12;

/// Atom-cavity coupling rate in rad/s from the dipole moment, transition
/// frequency and mode volume.
pub fn coupling_g(geom: &CavityGeometry) -> Result<f64, ModelError> {
    geom.validate()?;
    let mu = geom.dipole.ok_or(ModelError::MissingField("dipole"))?;
    let omega = geom.frequency.ok_or(ModelError::MissingField("frequency"))?;
    let volume = geom.mode_volume.ok_or(ModelError::MissingField("mode_volume"))?;
    Ok((mu * mu * omega / (2.0 * HBAR * EPSILON_0 * volume)).sqrt())
}

/// Cavity field decay rate `kappa = pi c / (2 l F)` in rad/s.
pub fn kappa_from_finesse(length: f64, finesse: f64) -> Result<f64, ModelError> {
    if length <= 0.0 || finesse <= 0.0 {
        return Err(ModelError::OutOfRange("length and finesse must be positive".into()));
    }
    Ok(std::f64::consts::PI * SPEED_OF_LIGHT / (2.0 * length * finesse))
}

/// Finesse from mirror reflectivity, `F ~ pi/(1-R)`, valid for `R >= 99%`.
pub fn finesse_from_reflectivity(r: f64) -> Result<f64, ModelError> {
    if !(0.99..1.0).contains(&r) {
        return Err(ModelError::OutOfRange(format!(
            "reflectivity {r} outside the approximation's validity range [0.99, 1)"
        )));
    }
    Ok(std::f64::consts::PI / (1.0 - r))
}

/// Cavity field decay rate from the quality factor, `kappa = pi c/(Q lambda)`.
pub fn kappa_from_q(q: f64, wavelength: f64) -> Result<f64, ModelError> {
    if q <= 0.0 || wavelength <= 0.0 {
        return Err(ModelError::OutOfRange("Q and wavelength must be positive".into()));
    }
    Ok(std::f64::consts::PI * SPEED_OF_LIGHT / (q * wavelength))
}

/// Single-atom cooperativity `C = g^2/(kappa Gamma)`.
pub fn cooperativity(g: f64, kappa: f64, gamma: f64) -> Result<f64, ModelError> {
    if g <= 0.0 || kappa <= 0.0 || gamma <= 0.0 {
        return Err(ModelError::OutOfRange("g, kappa, gamma must be positive".into()));
    }
    Ok(g * g / (kappa * gamma))
}

/// Expected number of scattering events to detect a single atom at
/// signal-to-noise `S` with detection efficiency `eta`: `M = S^2/(eta C^3)`.
///
/// Derived for `C >> 1`; returns a warning string alongside the value when
/// `C < 10`.
pub fn scattering_count(
    s: f64,
    eta: f64,
    c: f64,
) -> Result<(f64, Option<String>), ModelError> {
    if s <= 0.0 {
        return Err(ModelError::OutOfRange("signal-to-noise must be positive".into()));
    }
    if eta <= 0.0 || eta > 1.0 {
        return Err(ModelError::OutOfRange(format!("eta = {eta} not in (0, 1]")));
    }
    if c <= 0.0 {
        return Err(ModelError::OutOfRange("cooperativity must be positive".into()));
    }
    let warning = (c < 10.0)
        .then(|| format!("scattering_count: C = {c} is below the large-C validity regime (C >= 10)"));
    Ok((s * s / (eta * c * c * c), warning))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_from_finesse_hand_value() {
        // l = 125 um, F = 5000: pi * 299792458 / (2 * 1.25e-4 * 5000)
        let k = kappa_from_finesse(125e-6, 5000.0).unwrap();
        assert!((k - 7.534_606_269_235_413e8).abs() / k < 1e-12);
        // doubling the finesse halves kappa
        let k2 = kappa_from_finesse(125e-6, 10_000.0).unwrap();
        assert!((k2 - k / 2.0).abs() / k < 1e-12);
    }

    #[test]
    fn finesse_hand_values_and_range_guard() {
        assert!((finesse_from_reflectivity(0.999).unwrap() - 3141.592653589793).abs() < 1e-9);
        assert!((finesse_from_reflectivity(0.99).unwrap() - 314.1592653589793).abs() < 1e-10);
        assert!(finesse_from_reflectivity(0.5).is_err());
        assert!(finesse_from_reflectivity(1.0).is_err());
    }

    #[test]
    fn kappa_from_q_hand_value() {
        let k = kappa_from_q(1e6, 780e-9).unwrap();
        assert!((k - 1.207_468_953_403_111e9).abs() / k < 1e-12);
        let k2 = kappa_from_q(2e6, 780e-9).unwrap();
        assert!((k2 - k / 2.0).abs() / k < 1e-12);
    }

    #[test]
    fn finesse_q_kappa_cross_identity() {
        // kappa_from_finesse(l, F) == kappa_from_q(Q, lambda) with Q = 2 l F / lambda
        for (l, f, lam) in [(125e-6, 5000.0, 780e-9), (180e-6, 35_000.0, 852e-9)] {
            let q = 2.0 * l * f / lam;
            let a = kappa_from_finesse(l, f).unwrap();
            let b = kappa_from_q(q, lam).unwrap();
            assert!((a - b).abs() / a < 1e-9);
        }
    }

    #[test]
    fn microcavity_quality_inequality() {
        // the etched-silicon microcavity: F > 5000 gives Q > 1e6 at l = 125 um,
        // lambda = 780 nm
        let q = 2.0 * 125e-6 * 5000.0 / 780e-9;
        assert!(q > 1e6);
    }

    #[test]
    fn coupling_g_hand_value_and_scaling() {
        let geom = CavityGeometry {
            length: 125e-6,
            reflectivity: None,
            finesse: Some(5000.0),
            wavelength: 780e-9,
            mode_volume: Some(1e-15),
            dipole: Some(1.0e-29),
            frequency: Some(2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / 780e-9),
        };
        let g = coupling_g(&geom).unwrap();
        assert!((g - 3.596_048_505_606_651e8).abs() / g < 1e-12);

        // doubling V divides g by sqrt(2)
        let mut geom2 = geom.clone();
        geom2.mode_volume = Some(2e-15);
        let g2 = coupling_g(&geom2).unwrap();
        assert!((g2 - g / 2f64.sqrt()).abs() / g < 1e-12);

        // doubling the dipole doubles g
        let mut geom3 = geom.clone();
        geom3.dipole = Some(2.0e-29);
        let g3 = coupling_g(&geom3).unwrap();
        assert!((g3 - 2.0 * g).abs() / g < 1e-12);

        // missing field
        let mut geom4 = geom;
        geom4.mode_volume = None;
        assert!(coupling_g(&geom4).is_err());
    }

    #[test]
    fn cooperativity_values() {
        assert!((cooperativity(1.0, 0.05, 0.08).unwrap() - 250.0).abs() < 1e-12);
        assert!((cooperativity(1.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let c1 = cooperativity(1.0, 0.3, 0.7).unwrap();
        let c2 = cooperativity(2.0, 0.3, 0.7).unwrap();
        assert!((c2 - 4.0 * c1).abs() / c2 < 1e-12);
    }

    #[test]
    fn scattering_count_hand_values() {
        let (m, w) = scattering_count(10.0, 1.0, 10.0).unwrap();
        assert!((m - 0.1).abs() < 1e-15);
        assert!(w.is_none());
        let (m, _) = scattering_count(10.0, 0.01, 10.0).unwrap();
        assert!((m - 10.0).abs() < 1e-12);
        // detection-efficiency ordering at fixed S and C
        for c in [10.0, 30.0, 100.0, 1000.0] {
            let m1 = scattering_count(10.0, 1.0, c).unwrap().0;
            let m01 = scattering_count(10.0, 0.1, c).unwrap().0;
            let m001 = scattering_count(10.0, 0.01, c).unwrap().0;
            assert!(m001 > m01 && m01 > m1);
        }
        // warning below C = 10, error at eta = 0
        assert!(scattering_count(10.0, 1.0, 5.0).unwrap().1.is_some());
        assert!(scattering_count(10.0, 0.0, 100.0).is_err());
    }
}
