//! Relativistic single-particle and virtual-photon relations.
//!
//! Everything is dimensionless per the unit scheme in [`crate::units`]:
//! speeds in c, momenta in m_e c, energies in m_e c², lengths in r_C.

use crate::error::{Error, Result};
use crate::units::UnitSystem;

/// Electron state on the orbit: v/c, p/(m_e c) and the Lorentz factor.
/// Constructed from speed or momentum so that p = v·Γ holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    speed: f64,
    momentum: f64,
    lorentz_factor: f64,
}

impl ParticleState {
    pub fn from_speed(speed: f64) -> Result<Self> {
        let momentum = momentum_from_speed(speed)?;
        let lorentz_factor = 1.0 / (1.0 - speed * speed).sqrt();
        Ok(ParticleState {
            speed,
            momentum,
            lorentz_factor,
        })
    }

    pub fn from_momentum(momentum: f64) -> Result<Self> {
        let speed = speed_from_momentum(momentum)?;
        // Γ = sqrt(1 + p²) exactly, avoiding the 1 − v² subtraction
        let lorentz_factor = (1.0 + momentum * momentum).sqrt();
        Ok(ParticleState {
            speed,
            momentum,
            lorentz_factor,
        })
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn momentum(&self) -> f64 {
        self.momentum
    }

    pub fn lorentz_factor(&self) -> f64 {
        self.lorentz_factor
    }
}

/// Virtual-photon 4-momentum bundle satisfying ε² = m² + p² (dimensionless
/// dispersion relation). `inertial_mass` is also the inverse screening
/// length of the potential the photon mediates, in 1/r_C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonState {
    energy: f64,
    momentum: f64,
    inertial_mass: f64,
}

impl PhotonState {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn momentum(&self) -> f64 {
        self.momentum
    }

    pub fn inertial_mass(&self) -> f64 {
        self.inertial_mass
    }
}

/// p = v/√(1 − v²); strictly increasing on [0, 1).
pub fn momentum_from_speed(speed: f64) -> Result<f64> {
    if !speed.is_finite() || !(0.0..1.0).contains(&speed) {
        return Err(Error::InvalidField {
            field: "speed",
            value: speed,
            reason: "must lie in [0, 1)",
        });
    }
    Ok(speed / (1.0 - speed * speed).sqrt())
}

/// Exact inverse of [`momentum_from_speed`]: v = p/√(1 + p²).
pub fn speed_from_momentum(momentum: f64) -> Result<f64> {
    if !momentum.is_finite() || momentum < 0.0 {
        return Err(Error::InvalidField {
            field: "momentum",
            value: momentum,
            reason: "must be non-negative",
        });
    }
    Ok(momentum / (1.0 + momentum * momentum).sqrt())
}

/// Orbit radius from the Coulomb orbit equation α/r = p·v, in r_C units.
pub fn orbit_radius(state: &ParticleState, units: &UnitSystem) -> Result<f64> {
    if state.speed == 0.0 {
        return Err(Error::InvalidField {
            field: "speed",
            value: 0.0,
            reason: "orbit radius is undefined at zero speed",
        });
    }
    Ok(units.alpha() / (state.momentum * state.speed))
}

/// Builds a [`PhotonState`] from energy and 3-momentum, assigning the
/// inertial mass m = √(ε² − p²). Spacelike input (ε < p) is rejected: the
/// bound-state photons here are timelike, with ε ≫ p.
pub fn photon_from_energy_and_momentum(energy: f64, momentum: f64) -> Result<PhotonState> {
    if !energy.is_finite() || energy < 0.0 {
        return Err(Error::InvalidField {
            field: "energy",
            value: energy,
            reason: "must be non-negative",
        });
    }
    if !momentum.is_finite() || momentum < 0.0 {
        return Err(Error::InvalidField {
            field: "momentum",
            value: momentum,
            reason: "must be non-negative",
        });
    }
    if energy < momentum {
        return Err(Error::Domain {
            op: "photon_from_energy_and_momentum",
            reason: format!(
                "energy {energy} < momentum {momentum}: spacelike virtual photons \
                 (imaginary inertial mass) are outside the bound-state regime"
            ),
        });
    }
    let inertial_mass = ((energy - momentum) * (energy + momentum)).sqrt();
    Ok(PhotonState {
        energy,
        momentum,
        inertial_mass,
    })
}

/// Screened Coulomb potential φ(r) = (α/r)·e^(−m·r) mediated by a photon of
/// inertial mass m (Gaussian convention, so m = 0 gives exactly α/r).
pub fn yukawa_potential(separation: f64, photon_mass: f64, units: &UnitSystem) -> Result<f64> {
    if !separation.is_finite() || separation <= 0.0 {
        return Err(Error::InvalidField {
            field: "separation",
            value: separation,
            reason: "must be positive",
        });
    }
    if !photon_mass.is_finite() || photon_mass < 0.0 {
        return Err(Error::InvalidField {
            field: "photon_mass",
            value: photon_mass,
            reason: "must be non-negative",
        });
    }
    Ok(units.alpha() / separation * (-photon_mass * separation).exp())
}

/// Action carried by one virtual-photon period: S = ħω·T with T = 2π/ω,
/// i.e. exactly one quantum h independent of frequency. The frequency only
/// gates the domain; the product cancels algebraically.
pub fn photon_action_quantum(frequency: f64) -> Result<f64> {
    if !frequency.is_finite() || frequency <= 0.0 {
        return Err(Error::InvalidField {
            field: "frequency",
            value: frequency,
            reason: "must be positive",
        });
    }
    Ok(1.0)
}

#[cfg(test)]
// reference constants below are frozen 60-digit oracle evaluations
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn momentum_from_speed_examples() {
        assert_eq!(momentum_from_speed(0.0).unwrap(), 0.0);
        // 60-digit reference for the Table-1 speed
        let p = momentum_from_speed(0.9407).unwrap();
        assert_relative_eq!(p, 2.77296631791402908, max_relative = 1e-13);
        assert!((p / 2.772 - 1.0).abs() < 5e-3);
        // nonrelativistic limit p ≈ v
        assert_relative_eq!(
            momentum_from_speed(0.0073).unwrap(),
            0.0073,
            max_relative = 1e-4
        );
        assert!(momentum_from_speed(1.0).is_err());
        assert!(momentum_from_speed(-0.1).is_err());
        assert!(momentum_from_speed(f64::NAN).is_err());
    }

    #[test]
    fn speed_from_momentum_examples() {
        assert_eq!(speed_from_momentum(0.0).unwrap(), 0.0);
        let v = speed_from_momentum(2.772).unwrap();
        assert_relative_eq!(v, 0.94066225663641143083, max_relative = 1e-13);
        assert!((v / 0.9407 - 1.0).abs() < 5e-3);
        assert!(speed_from_momentum(-1.0).is_err());
        // approaches 1 monotonically (beyond p ~ 1/sqrt(eps) the quotient
        // rounds to 1.0 exactly, so stop short of that)
        let mut last = 0.0;
        for p in [1.0, 10.0, 100.0, 1e4, 1e7] {
            let v = speed_from_momentum(p).unwrap();
            assert!(v > last && v < 1.0);
            last = v;
        }
    }

    #[test]
    fn round_trip_speed_momentum() {
        for v in [1e-9, 0.0073, 0.5, 0.9407, 1.0 - 1e-9] {
            let back = speed_from_momentum(momentum_from_speed(v).unwrap()).unwrap();
            assert_relative_eq!(back, v, max_relative = 1e-12);
        }
    }

    #[test]
    fn orbit_radius_bohr_case() {
        let u = UnitSystem::default();
        let alpha = u.alpha();
        let state = ParticleState::from_speed(alpha).unwrap();
        let r = orbit_radius(&state, &u).unwrap();
        // ≈ 137 r_C ≈ 5.3e-9 cm (nonrelativistic Bohr orbit)
        assert!((r - 1.0 / alpha).abs() / (1.0 / alpha) < 1e-4);
        assert!((u.length_to_cm(r).unwrap() / 5.3e-9 - 1.0).abs() < 0.02);
    }

    #[test]
    fn orbit_radius_relativistic_case() {
        let u = UnitSystem::default();
        let state = ParticleState::from_speed(0.9407).unwrap();
        let r = orbit_radius(&state, &u).unwrap();
        assert_relative_eq!(r, 0.002797496753000126369, max_relative = 1e-12);
        // Table-1 radius within 2%
        assert!((u.length_to_cm(r).unwrap() / 1.06e-13 - 1.0).abs() < 0.02);
    }

    #[test]
    fn orbit_radius_unit_case_and_error() {
        let u = UnitSystem::default();
        // v with p·v = α lands on r = 1 r_C
        let alpha = u.alpha();
        let s = 0.5 * (-alpha * alpha + alpha * (alpha * alpha + 4.0).sqrt());
        let state = ParticleState::from_speed(s.sqrt()).unwrap();
        assert_relative_eq!(orbit_radius(&state, &u).unwrap(), 1.0, max_relative = 1e-10);

        let rest = ParticleState::from_speed(0.0).unwrap();
        assert!(orbit_radius(&rest, &u).is_err());
    }

    #[test]
    fn particle_state_invariants() {
        for v in [0.1, 0.9407, 0.999] {
            let st = ParticleState::from_speed(v).unwrap();
            assert_relative_eq!(
                st.momentum(),
                st.speed() * st.lorentz_factor(),
                max_relative = 1e-14
            );
            assert!(st.lorentz_factor() >= 1.0);
        }
        let st = ParticleState::from_momentum(2.772).unwrap();
        assert_relative_eq!(
            st.momentum(),
            st.speed() * st.lorentz_factor(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn photon_construction() {
        let ph = photon_from_energy_and_momentum(340.0, 0.0).unwrap();
        assert_eq!(ph.inertial_mass(), 340.0);
        let ph = photon_from_energy_and_momentum(1.0, 1.0).unwrap();
        assert_eq!(ph.inertial_mass(), 0.0);
        let ph = photon_from_energy_and_momentum(5.0, 3.0).unwrap();
        assert_relative_eq!(ph.inertial_mass(), 4.0, max_relative = 1e-15);
        assert!(photon_from_energy_and_momentum(1.0, 2.0).is_err());
        assert!(photon_from_energy_and_momentum(-1.0, 0.0).is_err());
    }

    #[test]
    fn yukawa_reduces_to_coulomb_at_zero_mass() {
        let u = UnitSystem::default();
        for r in [0.01, 1.0, 137.0] {
            assert_eq!(yukawa_potential(r, 0.0, &u).unwrap(), u.alpha() / r);
        }
    }

    #[test]
    fn yukawa_screening_scale() {
        let u = UnitSystem::default();
        // one screening length out: φ = α·340·e⁻¹
        let phi = yukawa_potential(1.0 / 340.0, 340.0, &u).unwrap();
        assert_relative_eq!(phi, 0.91274563497652476128, max_relative = 1e-12);
        // decays to nothing far outside
        assert_eq!(yukawa_potential(10.0, 340.0, &u).unwrap(), 0.0);
        assert!(yukawa_potential(0.0, 1.0, &u).is_err());
        assert!(yukawa_potential(1.0, -1.0, &u).is_err());
    }

    #[test]
    fn action_quantum_is_frequency_independent() {
        assert_eq!(photon_action_quantum(1.0).unwrap(), 1.0);
        assert_eq!(photon_action_quantum(1e15).unwrap(), 1.0);
        assert_eq!(photon_action_quantum(1e-6).unwrap(), 1.0);
        assert!(photon_action_quantum(0.0).is_err());
        assert!(photon_action_quantum(-2.0).is_err());
    }
}
