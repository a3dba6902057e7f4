//! Self-consistent bound-state solver.
//!
//! In dimensionless units the orbit equation reads α/r = p·v and the
//! recoil-corrected quantization condition reads p·r = β, where β is the
//! Klein-Nishina suppression evaluated at the virtual-photon energy
//! γ = p·v/β. Eliminating p and r leaves one scalar equation on β ∈ (α, 1]:
//!
//! ```text
//! F(β) = β − ζ( α² / (β³ √(1 − (α/β)²)) )
//! ```
//!
//! With physical constants F changes sign exactly twice: the
//! nonrelativistic (Bohr) root just below β = 1 where v = α/β ≈ α, and the
//! relativistic root near β ≈ 0.0078 where v ≈ 0.94. Roots are bracketed on
//! a logarithmic grid and refined by bisection with inverse-quadratic
//! acceleration. All operations are pure; curve sweeps run in fixed grid
//! order so identical inputs give bit-identical outputs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kinematics::{photon_from_energy_and_momentum, ParticleState, PhotonState};
use crate::kleinnishina::{zeta_raw, PhotonEnergyRatio};
use crate::units::UnitSystem;

/// Grid resolution of the default sign-change scan over β.
pub const DEFAULT_GRID_POINTS: usize = 2048;
/// Default tolerance on |F(β)| at convergence.
pub const DEFAULT_RESIDUAL_TOLERANCE: f64 = 1e-12;
/// Default minimum meaningful bracket width during refinement.
pub const DEFAULT_BRACKET_TOLERANCE: f64 = 1e-12;
/// Iteration cap for a single bracket refinement.
const MAX_REFINE_ITERATIONS: usize = 200;
/// β is searched above α·(1 + guard): at β = α the electron speed α/β
/// reaches c and the square root in γ(β) turns imaginary.
const BETA_DOMAIN_GUARD: f64 = 1e-9;
/// Default grid resolution for [`figure1_curve`] and [`figure2_curves`].
pub const DEFAULT_CURVE_SAMPLES: usize = 512;

/// Which of the two bound-state branches a solution belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchLabel {
    Nonrelativistic,
    Relativistic,
}

impl BranchLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BranchLabel::Nonrelativistic => "nonrelativistic",
            BranchLabel::Relativistic => "relativistic",
        }
    }
}

impl std::fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The recoil coefficient β together with the photon energy ratio γ it was
/// solved against; β = ζ(γ) to solver tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoilFactor {
    beta: f64,
    gamma_at_solution: PhotonEnergyRatio,
}

impl RecoilFactor {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma_at_solution(&self) -> PhotonEnergyRatio {
        self.gamma_at_solution
    }
}

/// One root of the self-consistent system, with solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStateSolution {
    recoil: RecoilFactor,
    particle: ParticleState,
    radius: f64,
    photon: PhotonState,
    branch: BranchLabel,
    residual: f64,
    iterations: usize,
}

impl BoundStateSolution {
    pub fn recoil(&self) -> RecoilFactor {
        self.recoil
    }

    pub fn beta(&self) -> f64 {
        self.recoil.beta
    }

    pub fn particle(&self) -> ParticleState {
        self.particle
    }

    /// Orbit radius in r_C units.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn photon(&self) -> PhotonState {
        self.photon
    }

    pub fn branch(&self) -> BranchLabel {
        self.branch
    }

    /// |F(β)| at convergence.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Checks the three faces of the solution — v = α/β, p·r = β and
    /// α/r = p·v — against `tol` relative, plus the photon closure.
    pub fn validate(&self, units: &UnitSystem, tol: f64) -> Result<()> {
        let alpha = units.alpha();
        let beta = self.recoil.beta;
        let v = self.particle.speed();
        let p = self.particle.momentum();
        let checks = [
            ("v = alpha/beta", v, alpha / beta),
            ("p*r = beta", p * self.radius, beta),
            ("alpha/r = p*v", alpha / self.radius, p * v),
            (
                "photon energy = p*v/beta",
                self.photon.energy(),
                p * v / beta,
            ),
        ];
        for (name, got, want) in checks {
            if (got - want).abs() > tol * want.abs() {
                return Err(Error::Domain {
                    op: "BoundStateSolution::validate",
                    reason: format!("{name} violated: {got} vs {want}"),
                });
            }
        }
        Ok(())
    }
}

/// One grid point of a curve sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    /// Grid value: r/r_C for the β(r) curve, p/(m_e c) for the radius curves.
    pub abscissa: f64,
    /// Curve name → value at this abscissa.
    pub values: BTreeMap<String, f64>,
    /// Whether every value at this abscissa met its defining equation.
    pub converged: bool,
}

fn gamma_of_beta(beta: f64, alpha: f64) -> f64 {
    let v = alpha / beta;
    alpha * alpha / (beta * beta * beta * (1.0 - v * v).sqrt())
}

fn residual_unchecked(beta: f64, alpha: f64) -> f64 {
    beta - zeta_raw(gamma_of_beta(beta, alpha))
}

/// F(β) of the module equation. Rejects β outside (α, 1]: at or below α the
/// implied speed α/β would reach c.
pub fn consistency_residual(beta: f64, units: &UnitSystem) -> Result<f64> {
    let alpha = units.alpha();
    if !beta.is_finite() || beta <= alpha {
        return Err(Error::InvalidField {
            field: "beta",
            value: beta,
            reason: "must exceed alpha (speed alpha/beta would reach c)",
        });
    }
    if beta > 1.0 {
        return Err(Error::InvalidField {
            field: "beta",
            value: beta,
            reason: "must not exceed 1",
        });
    }
    Ok(residual_unchecked(beta, alpha))
}

#[derive(Debug)]
struct Refined {
    root: f64,
    residual: f64,
    iterations: usize,
}

/// Derivative-free bracketing refinement: bisection with inverse-quadratic
/// (Brent-style) acceleration. Iterates until |f| < `f_tol`; `x_tol` only
/// floors the step size. Errs if the bracket collapses to machine width or
/// the iteration cap is hit before the residual tolerance is met.
fn refine_bracket<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    f_tol: f64,
    x_tol: f64,
    op: &'static str,
) -> Result<Refined> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(Refined {
            root: a,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Refined {
            root: b,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Domain {
            op,
            reason: format!("no sign change on [{a:e}, {b:e}]"),
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=MAX_REFINE_ITERATIONS {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        if fb.abs() < f_tol {
            return Ok(Refined {
                root: b,
                residual: fb.abs(),
                iterations: iter,
            });
        }
        // Step floor: never smaller than machine width, never so large that a
        // forced step would leave the residual above f_tol for O(1) slopes.
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol.min(f_tol);
        let xm = 0.5 * (c - b);
        if xm.abs() <= 2.0 * f64::EPSILON * b.abs() + 1e-300 {
            // bracket exhausted below machine resolution without meeting f_tol
            return Err(Error::NoConvergence {
                op,
                iterations: iter,
                lo: b.min(c),
                hi: b.max(c),
                residual: fb.abs(),
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation (secant when only two points)
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let r0 = fa / fc;
                let r1 = fb / fc;
                p = s * (2.0 * xm * r0 * (r0 - r1) - (b - a) * (r1 - 1.0));
                q = (r0 - 1.0) * (r1 - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
    }
    Err(Error::NoConvergence {
        op,
        iterations: MAX_REFINE_ITERATIONS,
        lo: b.min(c),
        hi: b.max(c),
        residual: fb.abs(),
    })
}

/// Logarithmic grid with exact endpoints.
fn log_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    debug_assert!(n >= 2 && min > 0.0 && min < max);
    let (ln_min, ln_max) = (min.ln(), max.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                min
            } else if i == n - 1 {
                max
            } else {
                (ln_min + (ln_max - ln_min) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Tuning knobs of the root scan; see the module defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub grid_points: usize,
    pub residual_tolerance: f64,
    pub bracket_tolerance: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            grid_points: DEFAULT_GRID_POINTS,
            residual_tolerance: DEFAULT_RESIDUAL_TOLERANCE,
            bracket_tolerance: DEFAULT_BRACKET_TOLERANCE,
        }
    }
}

fn solution_from_refined(
    beta: f64,
    residual: f64,
    iterations: usize,
    branch: BranchLabel,
    units: &UnitSystem,
) -> Result<BoundStateSolution> {
    let alpha = units.alpha();
    let particle = ParticleState::from_speed(alpha / beta)?;
    let pv = particle.momentum() * particle.speed();
    let radius = alpha / pv;
    let gamma = pv / beta;
    // photon 3-momentum taken as 0, so inertial mass = energy
    let photon = photon_from_energy_and_momentum(gamma, 0.0)?;
    Ok(BoundStateSolution {
        recoil: RecoilFactor {
            beta,
            gamma_at_solution: PhotonEnergyRatio::new(gamma)?,
        },
        particle,
        radius,
        photon,
        branch,
        residual,
        iterations,
    })
}

/// Reconstructs the full solution record from a recoil factor β, e.g. one
/// parsed back from emitted output. The residual is re-evaluated; the
/// iteration count is zero.
pub fn solution_from_recoil(
    beta: f64,
    branch: BranchLabel,
    units: &UnitSystem,
) -> Result<BoundStateSolution> {
    let residual = consistency_residual(beta, units)?.abs();
    solution_from_refined(beta, residual, 0, branch, units)
}

/// Scans F over a logarithmic β grid on (α, 1], refines every sign change
/// and returns the solutions sorted by β descending (nonrelativistic
/// first). Exactly two roots exist for the default constants; an empty list
/// means no sign change was detected at this resolution.
pub fn find_bound_states(
    units: &UnitSystem,
    grid_points: usize,
    tolerance: f64,
) -> Result<Vec<BoundStateSolution>> {
    find_bound_states_with(
        units,
        &SolverSettings {
            grid_points,
            residual_tolerance: tolerance,
            ..Default::default()
        },
    )
}

/// [`find_bound_states`] with explicit bracket-width control.
pub fn find_bound_states_with(
    units: &UnitSystem,
    settings: &SolverSettings,
) -> Result<Vec<BoundStateSolution>> {
    if settings.grid_points < 100 {
        return Err(Error::Domain {
            op: "find_bound_states",
            reason: format!(
                "grid_points must be at least 100 (got {})",
                settings.grid_points
            ),
        });
    }
    let tol = settings.residual_tolerance;
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::Domain {
            op: "find_bound_states",
            reason: format!("tolerance must lie in (0, 1e-6] (got {tol:e})"),
        });
    }
    if !(settings.bracket_tolerance > 0.0 && settings.bracket_tolerance.is_finite()) {
        return Err(Error::Domain {
            op: "find_bound_states",
            reason: format!(
                "bracket tolerance must be positive (got {:e})",
                settings.bracket_tolerance
            ),
        });
    }

    let alpha = units.alpha();
    let f = |b: f64| residual_unchecked(b, alpha);
    let grid = log_grid(alpha * (1.0 + BETA_DOMAIN_GUARD), 1.0, settings.grid_points);

    let mut refined: Vec<Refined> = Vec::new();
    let mut prev = grid[0];
    let mut f_prev = f(prev);
    for &b in &grid[1..] {
        let fb = f(b);
        if f_prev == 0.0 {
            refined.push(Refined {
                root: prev,
                residual: 0.0,
                iterations: 0,
            });
        } else if f_prev.signum() != fb.signum() {
            refined.push(refine_bracket(
                f,
                prev,
                b,
                tol,
                settings.bracket_tolerance,
                "find_bound_states",
            )?);
        }
        prev = b;
        f_prev = fb;
    }

    refined.sort_by(|x, y| y.root.total_cmp(&x.root));
    refined
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let branch = if i == 0 {
                BranchLabel::Nonrelativistic
            } else {
                BranchLabel::Relativistic
            };
            solution_from_refined(r.root, r.residual, r.iterations, branch, units)
        })
        .collect()
}

/// The unique v ∈ (0, 1) with v²/√(1 − v²) = α/r, found by bracketed
/// bisection; the left side is strictly increasing from 0 to ∞.
pub fn speed_from_orbit_equation(radius: f64, units: &UnitSystem) -> Result<f64> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidField {
            field: "radius",
            value: radius,
            reason: "must be positive",
        });
    }
    let target = units.alpha() / radius;
    let g = |v: f64| v * v / (1.0 - v * v).sqrt() - target;
    let mut lo = 0.0;
    let mut hi = 1.0 - f64::EPSILON;
    if g(hi) < 0.0 {
        // solvable in exact arithmetic but v would sit closer to 1 than
        // doubles can represent
        return Err(Error::Domain {
            op: "speed_from_orbit_equation",
            reason: format!("radius {radius:e} puts the speed within one ulp of c"),
        });
    }
    let mut g_lo = -target;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

struct FixedPoint {
    beta: f64,
    gamma: f64,
}

/// Solves the recoil closure β = ζ(u/β) for β ∈ (0, 1] at fixed u = p·v.
/// g(1) = 1 − ζ(u) ≥ 0; the lower end of the bracket is found by halving.
/// The no-bracket error carries a placeholder radius for [`beta_of_radius`]
/// to fill in.
fn recoil_fixed_point(pv: f64) -> Result<FixedPoint> {
    debug_assert!(pv > 0.0 && pv.is_finite());
    let g = |b: f64| b - zeta_raw(pv / b);
    let g_one = g(1.0);
    if g_one == 0.0 {
        // zero-energy photons: no recoil suppression at all
        return Ok(FixedPoint {
            beta: 1.0,
            gamma: pv,
        });
    }
    let mut hi = 1.0;
    let mut lo = 0.5;
    loop {
        let g_lo = g(lo);
        if g_lo == 0.0 {
            return Ok(FixedPoint {
                beta: lo,
                gamma: pv / lo,
            });
        }
        if g_lo < 0.0 {
            break;
        }
        hi = lo;
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::RecoilNoBracket {
                radius: f64::NAN,
                beta_floor: lo,
            });
        }
    }
    let refined = refine_bracket(
        g,
        lo,
        hi,
        DEFAULT_RESIDUAL_TOLERANCE,
        DEFAULT_BRACKET_TOLERANCE,
        "recoil_fixed_point",
    )?;
    Ok(FixedPoint {
        beta: refined.root,
        gamma: pv / refined.root,
    })
}

/// β(r): the recoil factor at orbit radius r, with p·v = α/r fixed by the
/// orbit equation.
pub fn beta_of_radius(radius: f64, units: &UnitSystem) -> Result<RecoilFactor> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidField {
            field: "radius",
            value: radius,
            reason: "must be positive",
        });
    }
    let fp = recoil_fixed_point(units.alpha() / radius).map_err(|e| match e {
        Error::RecoilNoBracket { beta_floor, .. } => Error::RecoilNoBracket { radius, beta_floor },
        other => other,
    })?;
    Ok(RecoilFactor {
        beta: fp.beta,
        gamma_at_solution: PhotonEnergyRatio::new(fp.gamma)?,
    })
}

fn validate_grid(min: f64, max: f64, samples: usize, op: &'static str) -> Result<()> {
    if !min.is_finite() || !max.is_finite() || min <= 0.0 || min >= max {
        return Err(Error::Domain {
            op,
            reason: format!("grid requires 0 < min < max (got [{min:e}, {max:e}])"),
        });
    }
    if samples < 2 {
        return Err(Error::Domain {
            op,
            reason: format!("grid requires at least 2 samples (got {samples})"),
        });
    }
    Ok(())
}

/// β(r) sampled on a logarithmic radius grid. Fixed-point failures mark the
/// sample `converged = false` (value NaN) instead of aborting the sweep.
pub fn figure1_curve(
    r_min: f64,
    r_max: f64,
    samples: usize,
    units: &UnitSystem,
) -> Result<Vec<CurveSample>> {
    validate_grid(r_min, r_max, samples, "figure1_curve")?;
    Ok(log_grid(r_min, r_max, samples)
        .into_iter()
        .map(|r| {
            let (beta, converged) = match beta_of_radius(r, units) {
                Ok(rf) => (rf.beta(), true),
                Err(_) => (f64::NAN, false),
            };
            CurveSample {
                abscissa: r,
                values: BTreeMap::from([("beta".to_string(), beta)]),
                converged,
            }
        })
        .collect())
}

/// The three radius-vs-momentum curves: orbit radius α/(p·v), the
/// unsuppressed position uncertainty 1/p, and the recoil-corrected
/// uncertainty β(p)/p with β solved from β = ζ(p·v/β) per sample.
pub fn figure2_curves(
    p_min: f64,
    p_max: f64,
    samples: usize,
    units: &UnitSystem,
) -> Result<Vec<CurveSample>> {
    validate_grid(p_min, p_max, samples, "figure2_curves")?;
    let alpha = units.alpha();
    Ok(log_grid(p_min, p_max, samples)
        .into_iter()
        .map(|p| {
            let v = p / (1.0 + p * p).sqrt();
            let pv = p * v;
            let r_orbit = alpha / pv;
            let dr_beta1 = 1.0 / p;
            let (dr_recoil, converged) = match recoil_fixed_point(pv) {
                Ok(fp) => (fp.beta / p, true),
                Err(_) => (f64::NAN, false),
            };
            CurveSample {
                abscissa: p,
                values: BTreeMap::from([
                    ("r_orbit".to_string(), r_orbit),
                    ("dr_beta1".to_string(), dr_beta1),
                    ("dr_recoil".to_string(), dr_recoil),
                ]),
                converged,
            }
        })
        .collect())
}

/// Abscissas where two named curves cross, linearly interpolated between
/// bracketing samples. Non-converged samples break the interpolation chain.
pub fn curve_intersections(samples: &[CurveSample], curve_a: &str, curve_b: &str) -> Vec<f64> {
    let mut crossings = Vec::new();
    let diff = |s: &CurveSample| -> Option<f64> {
        if !s.converged {
            return None;
        }
        let a = *s.values.get(curve_a)?;
        let b = *s.values.get(curve_b)?;
        (a.is_finite() && b.is_finite()).then_some(a - b)
    };
    for pair in samples.windows(2) {
        let (Some(d0), Some(d1)) = (diff(&pair[0]), diff(&pair[1])) else {
            continue;
        };
        if d0 == 0.0 {
            crossings.push(pair[0].abscissa);
        } else if d0.signum() != d1.signum() {
            let t = d0 / (d0 - d1);
            crossings.push(pair[0].abscissa + t * (pair[1].abscissa - pair[0].abscissa));
        }
    }
    crossings
}

#[cfg(test)]
// reference constants below are frozen 60-digit oracle evaluations
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // 60-digit references for the defaults (CODATA alpha).
    const BETA_NONREL: f64 = 0.999893475164703629412324646076;
    const BETA_REL: f64 = 0.00775334220089127758108168453095;

    fn units() -> UnitSystem {
        UnitSystem::default()
    }

    #[test]
    fn residual_spot_values() {
        let u = units();
        // γ(1) ≈ α² is tiny, ζ ≈ 1 − 2α², so F(1) ≈ +2α²
        assert_relative_eq!(
            consistency_residual(1.0, &u).unwrap(),
            1.064908004e-4,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            consistency_residual(0.5, &u).unwrap(),
            -0.4991488305,
            max_relative = 1e-9
        );
        // the book value of the relativistic root is a near-zero of F
        assert_relative_eq!(
            consistency_residual(0.007744, &u).unwrap(),
            7.676293596e-5,
            max_relative = 1e-8
        );
        assert!(consistency_residual(0.007744, &u).unwrap().abs() <= 1e-3);
    }

    #[test]
    fn residual_rejects_out_of_domain_beta() {
        let u = units();
        assert!(consistency_residual(u.alpha(), &u).is_err());
        assert!(consistency_residual(u.alpha() * 0.5, &u).is_err());
        assert!(consistency_residual(1.0 + 1e-12, &u).is_err());
        assert!(consistency_residual(f64::NAN, &u).is_err());
    }

    #[test]
    fn finds_both_roots_with_defaults() {
        let u = units();
        let sols = find_bound_states(&u, DEFAULT_GRID_POINTS, 1e-12).unwrap();
        assert_eq!(sols.len(), 2);

        let nonrel = &sols[0];
        assert_eq!(nonrel.branch(), BranchLabel::Nonrelativistic);
        assert!(nonrel.beta() >= 0.9997 && nonrel.beta() < 1.0);
        assert!((nonrel.beta() - BETA_NONREL).abs() < 1e-10);

        let rel = &sols[1];
        assert_eq!(rel.branch(), BranchLabel::Relativistic);
        assert!((rel.beta() - 0.00774).abs() < 1e-4);
        assert_relative_eq!(rel.beta(), BETA_REL, max_relative = 1e-9);

        assert!(sols[0].beta() > sols[1].beta());
        for s in &sols {
            assert!(s.residual() <= 1e-12);
            s.validate(&u, 1e-10).unwrap();
        }
    }

    #[test]
    fn nonrelativistic_root_is_the_bohr_state() {
        let u = units();
        let sols = find_bound_states(&u, 1024, 1e-12).unwrap();
        let bohr = &sols[0];
        assert_relative_eq!(bohr.particle().speed(), 0.0073, max_relative = 1e-3);
        assert_relative_eq!(bohr.radius(), 137.0, max_relative = 1e-3);
    }

    #[test]
    fn relativistic_root_matches_references() {
        let u = units();
        let sols = find_bound_states(&u, DEFAULT_GRID_POINTS, 1e-12).unwrap();
        let rel = &sols[1];
        assert_relative_eq!(
            rel.particle().speed(),
            0.94118799096228981665,
            max_relative = 1e-8
        );
        assert_relative_eq!(rel.radius(), 0.0027834240845548573167, max_relative = 1e-8);
        assert_relative_eq!(
            rel.photon().energy(),
            338.14034885482084879,
            max_relative = 1e-7
        );
        assert_eq!(rel.photon().momentum(), 0.0);
        assert_eq!(rel.photon().energy(), rel.photon().inertial_mass());
    }

    #[test]
    fn solver_rejects_bad_settings() {
        let u = units();
        assert!(find_bound_states(&u, 99, 1e-12).is_err());
        assert!(find_bound_states(&u, 1000, 0.0).is_err());
        assert!(find_bound_states(&u, 1000, 1e-5).is_err());
    }

    #[test]
    fn solution_from_recoil_round_trips() {
        let u = units();
        let sols = find_bound_states(&u, DEFAULT_GRID_POINTS, 1e-12).unwrap();
        for s in &sols {
            let rebuilt = solution_from_recoil(s.beta(), s.branch(), &u).unwrap();
            assert_eq!(rebuilt.beta(), s.beta());
            assert_eq!(rebuilt.radius(), s.radius());
            assert_eq!(rebuilt.branch(), s.branch());
        }
    }

    #[test]
    fn orbit_speed_bohr_identity() {
        let u = units();
        let alpha = u.alpha();
        let v = speed_from_orbit_equation(1.0 / alpha, &u).unwrap();
        // The exact solution of v²/√(1−v²) = α² is v = α(1 − α²/4 + ...),
        // a relative α²/4 ≈ 1.3e-5 below α itself.
        assert_relative_eq!(v, 0.007297255421469487080856823, epsilon = 1e-11);
        assert!((v - alpha).abs() / alpha < 2e-5);
    }

    #[test]
    fn orbit_speed_relativistic_and_limits() {
        let u = units();
        let v = speed_from_orbit_equation(0.0028, &u).unwrap();
        assert_relative_eq!(v, 0.94061311333992242493, epsilon = 1e-11);
        assert!((v / 0.9407 - 1.0).abs() < 5e-3);
        // large radius → slow orbit
        assert!(speed_from_orbit_equation(1e9, &u).unwrap() < 1e-4);
        assert!(speed_from_orbit_equation(0.0, &u).is_err());
        assert!(speed_from_orbit_equation(-1.0, &u).is_err());
    }

    #[test]
    fn orbit_speed_matches_closed_form() {
        // independent oracle: v² = (−t² + t√(t²+4))/2 with t = α/r
        let u = units();
        for r in [1e-3, 0.0028, 1.0, 137.0, 1e4] {
            let t = u.alpha() / r;
            let closed = (0.5 * (-t * t + t * (t * t + 4.0).sqrt())).sqrt();
            let v = speed_from_orbit_equation(r, &u).unwrap();
            assert_relative_eq!(v, closed, epsilon = 1e-10, max_relative = 1e-9);
        }
    }

    #[test]
    fn beta_of_radius_reference_points() {
        let u = units();
        // Bohr radius: recoil is a 1e-4 effect
        let rf = beta_of_radius(1.0 / u.alpha(), &u).unwrap();
        assert!((rf.beta() - 0.9998935006940936829).abs() < 1e-10);
        assert!(rf.beta() < 1.0 && 1.0 - rf.beta() < 2e-4);
        // the fixed-point slope is ~0.15 near the relativistic root, so
        // the 1e-12 residual stop allows ~7e-12 in β
        let rf = beta_of_radius(0.0028, &u).unwrap();
        assert_relative_eq!(
            rf.beta(),
            0.008026667154411357404995774,
            max_relative = 1e-8
        );
        // huge radius → Thomson regime
        assert!(beta_of_radius(1e9, &u).unwrap().beta() > 0.999999);
        assert!(beta_of_radius(0.0, &u).is_err());
    }

    #[test]
    fn beta_of_radius_reports_the_underflow_region() {
        // For u = α/r beyond ~280 the closure β = ζ(u/β) has its root
        // below the smallest positive double (β* ~ 2u·e^(−8u/3)), so the
        // bracket scan must give up and say where it stopped.
        let u = units();
        match beta_of_radius(1e-5, &u) {
            Err(Error::RecoilNoBracket { radius, beta_floor }) => {
                assert_eq!(radius, 1e-5);
                assert!(beta_floor < 1e-299);
            }
            other => panic!("expected RecoilNoBracket, got {other:?}"),
        }
    }

    #[test]
    fn sweeps_flag_failed_samples_without_aborting() {
        let u = units();
        // radii small enough that the recoil root underflows
        let curve = figure1_curve(1e-5, 1e3, 32, &u).unwrap();
        assert!(curve.iter().any(|s| !s.converged));
        assert!(curve.iter().any(|s| s.converged));
        for s in curve.iter().filter(|s| !s.converged) {
            assert!(s.values["beta"].is_nan());
        }
        // same at the large-momentum end of the radius curves
        let curves = figure2_curves(1e-3, 1e3, 32, &u).unwrap();
        assert!(curves.iter().any(|s| !s.converged));
        assert!(curves.iter().all(|s| s.values["r_orbit"].is_finite()));
    }

    #[test]
    fn beta_of_radius_closes_the_loop_at_solutions() {
        let u = units();
        for s in find_bound_states(&u, DEFAULT_GRID_POINTS, 1e-12).unwrap() {
            let rf = beta_of_radius(s.radius(), &u).unwrap();
            assert_relative_eq!(rf.beta(), s.beta(), max_relative = 1e-6);
        }
    }

    #[test]
    fn figure1_grid_and_endpoints() {
        let u = units();
        let curve = figure1_curve(1e-3, 1e3, 64, &u).unwrap();
        assert_eq!(curve.len(), 64);
        assert_eq!(curve[0].abscissa, 1e-3);
        assert_eq!(curve[63].abscissa, 1e3);
        assert!(curve.iter().all(|s| s.converged));
        assert!(curve[63].values["beta"] > 0.99);
        // β below 0.01 at the small-radius end of the plotted range
        let near = figure1_curve(2.8e-3, 1.0, 8, &u).unwrap();
        assert!(near[0].values["beta"] < 0.01);
        // monotone nondecreasing in r
        for w in curve.windows(2) {
            assert!(w[1].values["beta"] >= w[0].values["beta"]);
        }
    }

    #[test]
    fn figure1_first_sample_at_bohr_radius() {
        let u = units();
        let curve = figure1_curve(
            u.bohr_radius_cm() / u.electron_compton_length_cm(),
            1e3,
            2,
            &u,
        )
        .unwrap();
        assert!((curve[0].values["beta"] - 1.0).abs() < 2e-4);
    }

    #[test]
    fn figure_grids_reject_degenerate_ranges() {
        let u = units();
        assert!(figure1_curve(1.0, 1.0, 8, &u).is_err());
        assert!(figure1_curve(0.0, 1.0, 8, &u).is_err());
        assert!(figure1_curve(1.0, 2.0, 1, &u).is_err());
        assert!(figure2_curves(2.0, 2.0, 8, &u).is_err());
        assert!(figure2_curves(1e-3, 10.0, 0, &u).is_err());
    }

    #[test]
    fn figure2_curve_shapes() {
        let u = units();
        let curves = figure2_curves(1e-3, 10.0, 128, &u).unwrap();
        assert!(curves.iter().all(|s| s.converged));
        for s in &curves {
            let p = s.abscissa;
            assert_relative_eq!(s.values["dr_beta1"], 1.0 / p, max_relative = 1e-14);
            assert!(s.values["dr_recoil"] <= s.values["dr_beta1"]);
        }
    }

    #[test]
    fn figure2_intersections_recover_both_roots() {
        let u = units();
        let sols = find_bound_states(&u, DEFAULT_GRID_POINTS, 1e-12).unwrap();
        let curves = figure2_curves(1e-3, 10.0, DEFAULT_CURVE_SAMPLES, &u).unwrap();

        // curve 1 × curve 2 marks the Bohr solution (β = 1 branch)
        let bohr = curve_intersections(&curves, "r_orbit", "dr_beta1");
        assert_eq!(bohr.len(), 1);
        assert_relative_eq!(bohr[0], sols[0].particle().momentum(), max_relative = 1e-2);

        // curve 1 × curve 3 marks both self-consistent solutions
        let both = curve_intersections(&curves, "r_orbit", "dr_recoil");
        assert_eq!(both.len(), 2);
        assert_relative_eq!(both[0], sols[0].particle().momentum(), max_relative = 1e-2);
        assert_relative_eq!(both[1], sols[1].particle().momentum(), max_relative = 1e-2);
    }

    #[test]
    fn refine_bracket_on_cubic() {
        let refined = refine_bracket(|x| x * x * x - 0.5, 0.0, 1.0, 1e-14, 1e-12, "test").unwrap();
        assert_relative_eq!(refined.root, 0.5f64.powf(1.0 / 3.0), max_relative = 1e-12);
        assert!(refined.iterations < 30);
        assert!(refine_bracket(|x| x + 1.0, 0.0, 1.0, 1e-12, 1e-12, "test").is_err());
    }

    #[test]
    fn refine_bracket_reports_unreachable_residuals() {
        // a sign step with no zero: the bracket collapses to machine width
        // and the residual never meets the tolerance
        let step = |x: f64| if x < 0.5 { -1e-6 } else { 1e-6 };
        match refine_bracket(step, 0.0, 1.0, 1e-12, 1e-12, "test") {
            Err(Error::NoConvergence { residual, .. }) => {
                assert!((residual - 1e-6).abs() < 1e-18);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
