//! Self-consistent bound states of an electron in the Coulomb field of a
//! proton under recoil-corrected uncertainty relations.
//!
//! The usual quantization condition p·r = ħ gains a recoil coefficient
//! β ≤ 1 once the virtual photons mediating the binding are energetic
//! enough for Compton recoil to matter: p·r = βħ, with β the Klein-Nishina
//! suppression of the total scattering cross section at the photon energy
//! γ = ħω/(m_e c²). Closing the system with the orbit equation
//! e²/r = p·v yields exactly two solutions: the nonrelativistic Bohr state
//! (β ≈ 1, r ≈ 5.3e-9 cm, binding 13.6 eV) and a relativistic state
//! (β ≈ 0.0077, r ≈ 1.1e-13 cm, binding 0.67 MeV) whose derived
//! parameters are compared against measured neutron properties.
//!
//! Internally everything is dimensionless: speeds in c, momenta in m_e c,
//! energies in m_e c², lengths in the reduced electron Compton length,
//! angular momenta in ħ. [`units::UnitSystem`] anchors the conversions.
//!
//! Modules:
//! - [`units`]: constants and the CGS/eV conversion boundary
//! - [`kleinnishina`]: the suppression factor ζ(γ) and its derivative
//! - [`kinematics`]: relativistic particle/photon relations, screened
//!   Coulomb potential
//! - [`solver`]: the self-consistency equation, both roots, curve sweeps
//! - [`report`]: derived parameter table, uncertainty products, reference
//!   deviations
//! - [`cli`]: command-line front end with deterministic CSV/JSON output

pub mod cli;
pub mod error;
pub mod kinematics;
pub mod kleinnishina;
pub mod report;
pub mod solver;
pub mod units;

pub use error::{Error, Result};
pub use kleinnishina::{zeta, PhotonEnergyRatio};
pub use report::{derive_parameters, DerivedReport, ReferenceSet};
pub use solver::{find_bound_states, BoundStateSolution, BranchLabel};
pub use units::{UnitOverrides, UnitSystem};
