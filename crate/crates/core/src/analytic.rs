//! Second-order fidelity formulas, the f₁/f₂/f₃ comparison curves, the relative-error
//! fidelity F″, and quadratic-coefficient extraction from exact fidelities.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::qmath::{embed, gate_fidelity, rotation, Unitary, Vec3, C64};
use crate::schemes::{
    decompose_bright, loop_distortion, phi_b_of, single_loop_errored, single_loop_ideal,
    single_shot_errored, single_shot_ideal, two_loop_errored, two_loop_errored_relative,
    two_loop_ideal, RabiError, SingleLoopPath, SingleShotPath, TwoLoopPath,
};

const PI2: f64 = PI * PI;

/// The qubit gate R(ϑ, m⃗) = exp(iϑ m⃗·σ⃗) with ϑ ∈ [0, π/2].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetGate {
    theta_gate: f64,
    axis: [f64; 3],
}

impl TargetGate {
    pub fn new(theta_gate: f64, axis: Vec3) -> Result<Self> {
        let theta_gate = check_gate_angle(theta_gate)?;
        let norm = axis.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain {
                name: "|axis|",
                value: norm,
                range: "1 ± 1e-12",
            });
        }
        Ok(Self {
            theta_gate,
            axis: [axis.x, axis.y, axis.z],
        })
    }

    /// Normalises `axis` first; fails on a zero or non-finite axis.
    pub fn normalized(theta_gate: f64, axis: Vec3) -> Result<Self> {
        let norm = axis.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidInput(
                "rotation axis must be a nonzero vector".into(),
            ));
        }
        Self::new(theta_gate, axis / norm)
    }

    pub fn theta_gate(&self) -> f64 {
        self.theta_gate
    }

    pub fn axis(&self) -> Vec3 {
        Vec3::from(self.axis)
    }

    /// |e⟩⟨e| + R(ϑ, m⃗).
    pub fn unitary(&self) -> Unitary {
        Unitary::assume(embed(
            &rotation(self.theta_gate, &self.axis()),
            C64::new(1.0, 0.0),
        ))
    }
}

fn check_gate_angle(theta_gate: f64) -> Result<f64> {
    check_range(
        "theta_gate",
        theta_gate,
        -1e-12,
        FRAC_PI_2 + 1e-12,
        "[0, π/2]",
    )
    .map(|v| v.clamp(0.0, FRAC_PI_2))
}

/// f₁ = 2 − 2cos(ϑ/2), the two-loop error weight at φ_b = π.
pub fn f1(theta_gate: f64) -> Result<f64> {
    let t = check_gate_angle(theta_gate)?;
    Ok(2.0 - 2.0 * (0.5 * t).cos())
}

/// f₂ = (1 − cos 2ϑ)/2, the single-loop multiple-pulse error weight.
pub fn f2(theta_gate: f64) -> Result<f64> {
    let t = check_gate_angle(theta_gate)?;
    Ok(0.5 * (1.0 - (2.0 * t).cos()))
}

/// f₃ = 16ϑ²(1 − ϑ/π)²/π², the single-shot error weight.
pub fn f3(theta_gate: f64) -> Result<f64> {
    let t = check_gate_angle(theta_gate)?;
    let u = t * (1.0 - t / PI);
    Ok(16.0 * u * u / PI2)
}

/// F = 1 − (2/3)(1 + cos(η/2) cos φ_b) π² ε².
pub fn fid2_two_loop(eta: f64, phi_b: f64, epsilon: f64) -> f64 {
    1.0 - two_loop_coefficient((0.5 * eta).cos() * phi_b.cos()) * epsilon * epsilon
}

fn two_loop_coefficient(cos_product: f64) -> f64 {
    2.0 / 3.0 * (1.0 + cos_product) * PI2
}

/// F̃ = 1 − (1/6)[1 + cos(φ − φ′)] π² ε².
pub fn fid2_single_loop(phase_diff: f64, epsilon: f64) -> f64 {
    1.0 - single_loop_coefficient(phase_diff) * epsilon * epsilon
}

fn single_loop_coefficient(phase_diff: f64) -> f64 {
    (1.0 + phase_diff.cos()) * PI2 / 6.0
}

/// F̂ = 1 − (1/3) π² ε² cos⁴γ.
pub fn fid2_single_shot(gamma: f64, epsilon: f64) -> f64 {
    1.0 - single_shot_coefficient(gamma) * epsilon * epsilon
}

fn single_shot_coefficient(gamma: f64) -> f64 {
    let c2 = gamma.cos().powi(2);
    PI2 * c2 * c2 / 3.0
}

/// Intermediate quantities of the relative-error fidelity F″ = 1 − y²/3 − π²z²/3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeErrorBreakdown {
    /// θ₁ − θ′₁.
    pub theta11: f64,
    /// θ₂ − θ′₂.
    pub theta22: f64,
    /// ψ₂ − ψ₁.
    pub psi21: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Bloch angle between the distorted bright states |b′₁⟩ and |b′₂⟩.
    pub eta_prime: f64,
    /// Decomposition phase of the distorted bright states; `None` when η′ = π.
    pub phi_b: Option<f64>,
    pub y: f64,
    pub z: f64,
}

/// F″ for unequal Rabi errors, with η′ and φ_b taken from the distorted bright states.
pub fn fid2_relative(path: &TwoLoopPath, error: &RabiError) -> (RelativeErrorBreakdown, f64) {
    let (l1, l2) = (&path.loop1, &path.loop2);
    let d1 = loop_distortion(l1, error);
    let d2 = loop_distortion(l2, error);
    let theta11 = l1.theta() - d1.theta_prime;
    let theta22 = l2.theta() - d2.theta_prime;
    let psi21 = l2.psi() - l1.psi();

    let (b1, dk1) = crate::schemes::bright_dark(d1.theta_prime.clamp(0.0, PI), l1.psi())
        .expect("distorted polar angle lies in [0, π]");
    let (b2, _) = crate::schemes::bright_dark(d2.theta_prime.clamp(0.0, PI), l2.psi())
        .expect("distorted polar angle lies in [0, π]");
    let dec = decompose_bright(&b1, &dk1, l1.phi(), &b2, l2.phi());

    let y2 =
        (theta11 * theta11 + theta22 * theta22 - 2.0 * theta11 * theta22 * psi21.cos()).max(0.0);
    let z2 =
        (d1.delta * d1.delta + d2.delta * d2.delta + 2.0 * d1.delta * d2.delta * dec.cos_product())
            .max(0.0);
    let breakdown = RelativeErrorBreakdown {
        theta11,
        theta22,
        psi21,
        delta1: d1.delta,
        delta2: d2.delta,
        eta_prime: dec.eta,
        phi_b: dec.phi_b,
        y: y2.sqrt(),
        z: z2.sqrt(),
    };
    (breakdown, 1.0 - y2 / 3.0 - PI2 * z2 / 3.0)
}

/// ∂F″/∂κ at κ = 0: −(2/3)(1 + cos(η/2) cos φ_b)(cos θ₁ + cos θ₂) π² ε.
///
/// At φ_b = π this is −(2/3)(1 − cos(η/2))(cos θ₁ + cos θ₂) π² ε, which vanishes on
/// balanced paths cos θ₁ + cos θ₂ = 0.
pub fn df_dkappa_at_zero(path: &TwoLoopPath, epsilon: f64) -> f64 {
    let dec = phi_b_of(path);
    let balance = path.loop1.theta().cos() + path.loop2.theta().cos();
    -2.0 / 3.0 * (1.0 + dec.cos_product()) * balance * PI2 * epsilon
}

/// Fit of F(ε) ≈ 1 − c·ε².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticFit {
    pub coefficient: f64,
    /// Slope of (1 − F)/ε² in ε; absorbs the cubic term when samples come in ±ε pairs.
    pub odd_slope: f64,
    /// RMS residual of (1 − F)/ε² about the fitted line.
    pub residual: f64,
}

/// Least squares of (1 − F)/ε² = c + b·ε over the samples.
///
/// Symmetric ±ε sampling makes c exactly the mean of the even part, cancelling the
/// odd orders.
pub fn extract_quadratic_coefficient(samples: &[(f64, f64)]) -> Result<QuadraticFit> {
    if samples.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    for &(eps, f) in samples {
        if !(eps.is_finite() && eps != 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample epsilon {eps} must be finite and nonzero"
            )));
        }
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "sample fidelity {f} outside (0, 1]"
            )));
        }
    }
    let n = samples.len() as f64;
    let points: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(eps, f)| (eps, (1.0 - f) / (eps * eps)))
        .collect();
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let scale: f64 = points.iter().map(|p| p.0 * p.0).sum::<f64>() / n;
    if sxx <= 1e-12 * scale * n {
        return Err(Error::InvalidInput(
            "sample epsilons are (nearly) all equal; fit is ill-conditioned".into(),
        ));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = (points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(QuadraticFit {
        coefficient: intercept,
        odd_slope: slope,
        residual,
    })
}

/// Probe errors used to extract quadratic coefficients from exact propagation.
pub const PROBE_EPSILONS: [f64; 4] = [1e-3, -1e-3, 1e-4, -1e-4];

/// A path in one of the three schemes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum GatePath {
    TwoLoop(TwoLoopPath),
    SingleLoop(SingleLoopPath),
    SingleShot(SingleShotPath),
}

impl GatePath {
    pub fn name(&self) -> &'static str {
        match self {
            GatePath::TwoLoop(_) => "two-loop",
            GatePath::SingleLoop(_) => "single-loop",
            GatePath::SingleShot(_) => "single-shot",
        }
    }

    pub fn ideal(&self) -> Unitary {
        match self {
            GatePath::TwoLoop(p) => two_loop_ideal(p),
            GatePath::SingleLoop(p) => single_loop_ideal(p),
            GatePath::SingleShot(p) => single_shot_ideal(p),
        }
    }

    /// Exact error-affected gate; κ ≠ 0 is only accepted for the two-loop scheme.
    pub fn errored(&self, error: &RabiError) -> Result<Unitary> {
        match self {
            GatePath::TwoLoop(p) if error.kappa() != 0.0 => Ok(two_loop_errored_relative(p, error)),
            GatePath::TwoLoop(p) => two_loop_errored(p, error),
            GatePath::SingleLoop(p) => single_loop_errored(p, error),
            GatePath::SingleShot(p) => single_shot_errored(p, error),
        }
    }

    pub fn exact_fidelity(&self, error: &RabiError) -> Result<f64> {
        Ok(gate_fidelity(&self.ideal(), &self.errored(error)?))
    }

    /// Second-order prediction; F″ for two-loop paths with κ ≠ 0.
    pub fn analytic_fidelity(&self, error: &RabiError) -> Result<f64> {
        match self {
            GatePath::TwoLoop(p) if error.kappa() != 0.0 => Ok(fid2_relative(p, error).1),
            _ => {
                if error.kappa() != 0.0 {
                    return Err(Error::Domain {
                        name: "kappa",
                        value: error.kappa(),
                        range: "0 for single-loop and single-shot paths",
                    });
                }
                Ok(1.0 - self.analytic_coefficient() * error.epsilon().powi(2))
            }
        }
    }

    /// c in F = 1 − c ε² under a common error.
    pub fn analytic_coefficient(&self) -> f64 {
        match self {
            GatePath::TwoLoop(p) => two_loop_coefficient(phi_b_of(p).cos_product()),
            GatePath::SingleLoop(p) => single_loop_coefficient(p.phase_difference()),
            GatePath::SingleShot(p) => single_shot_coefficient(p.gamma()),
        }
    }

    /// Quadratic coefficient fitted to exact fidelities at [`PROBE_EPSILONS`].
    pub fn exact_coefficient(&self) -> Result<QuadraticFit> {
        let samples = PROBE_EPSILONS
            .iter()
            .map(|&eps| Ok((eps, self.exact_fidelity(&RabiError::common(eps)?)?)))
            .collect::<Result<Vec<_>>>()?;
        extract_quadratic_coefficient(&samples)
    }

    pub fn report(&self, error: &RabiError) -> Result<FidelityReport> {
        Ok(FidelityReport {
            exact: self.exact_fidelity(error)?,
            analytic2: self.analytic_fidelity(error)?,
            quad_coeff_exact: self.exact_coefficient()?.coefficient,
            quad_coeff_analytic: self.analytic_coefficient(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityReport {
    pub exact: f64,
    pub analytic2: f64,
    pub quad_coeff_exact: f64,
    pub quad_coeff_analytic: f64,
}

impl FidelityReport {
    pub fn gap(&self) -> f64 {
        (self.exact - self.analytic2).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::LoopParams;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn comparison_curves_at_endpoints() {
        for f in [f1, f2, f3] {
            assert_eq!(f(0.0).unwrap(), 0.0);
        }
        assert!((f1(FRAC_PI_2).unwrap() - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        assert!((f2(FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!((f3(FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn comparison_curves_domain() {
        assert!(f1(-0.1).is_err());
        assert!(f2(2.0).is_err());
        assert!(f3(f64::NAN).is_err());
    }

    #[test]
    fn two_loop_formula_values() {
        assert_eq!(fid2_two_loop(1.0, 2.0, 0.0), 1.0);
        assert!((fid2_two_loop(FRAC_PI_2, PI, 1e-2) - 0.999_807_283_986_569_9).abs() < 1e-15);
        assert!((fid2_two_loop(FRAC_PI_2, 0.0, 1e-2) - 0.998_876_768_759_951_5).abs() < 1e-15);
    }

    #[test]
    fn single_loop_and_shot_formula_values() {
        assert_eq!(fid2_single_loop(0.3, 0.0), 1.0);
        assert!((fid2_single_loop(PI, 0.05) - 1.0).abs() < 1e-16);
        assert!((fid2_single_loop(0.0, 1e-2) - 0.999_671_013_186_630_3).abs() < 1e-15);
        assert!((fid2_single_shot(FRAC_PI_2, 0.05) - 1.0).abs() < 1e-15);
        assert!((fid2_single_shot(0.0, 1e-2) - 0.999_671_013_186_630_3).abs() < 1e-15);
    }

    #[test]
    fn single_shot_formula_in_gate_angle() {
        for k in 0..=100 {
            let t = FRAC_PI_2 * k as f64 / 100.0;
            let gamma = (1.0 - 2.0 * t / PI).asin();
            let eps = 3e-2;
            let via_angle = 1.0 - 16.0 / 3.0 * t * t * (1.0 - t / PI).powi(2) * eps * eps;
            assert!((fid2_single_shot(gamma, eps) - via_angle).abs() < 1e-14);
        }
    }

    fn fixture_path() -> TwoLoopPath {
        // θ₁ = π/3, θ₂ = π/2, ψ₂₁ = π/2 gives η = π/2; φ₂ set so that φ_b = π.
        let l1 = LoopParams::new(FRAC_PI_3, 0.0, 0.0).unwrap();
        let l2 = LoopParams::new(FRAC_PI_2, FRAC_PI_2, 0.0).unwrap();
        let overlap = l1.bright().inner(&l2.bright()).arg();
        TwoLoopPath::new(l1, l2.with_phi(PI - overlap).unwrap())
    }

    #[test]
    fn dkappa_fixture_value() {
        let path = fixture_path();
        let dec = phi_b_of(&path);
        assert!((dec.eta - FRAC_PI_2).abs() < 1e-12);
        assert!((dec.phi_b.unwrap() - PI).abs() < 1e-12);
        let d = df_dkappa_at_zero(&path, 1e-2);
        let expected = -2.0 / 3.0 * (1.0 - FRAC_PI_4.cos()) * 0.5 * PI * PI * 1e-2;
        assert!((d - expected).abs() < 1e-15);
        assert!((d + 9.6358e-3).abs() < 5e-8);
        assert!((df_dkappa_at_zero(&path, -1e-2) + d).abs() < 1e-18);
    }

    #[test]
    fn dkappa_vanishes_on_equator() {
        let l1 = LoopParams::new(FRAC_PI_2, 0.3, 0.0).unwrap();
        let l2 = LoopParams::new(FRAC_PI_2, 1.9, 2.0).unwrap();
        assert!(df_dkappa_at_zero(&TwoLoopPath::new(l1, l2), 0.05).abs() < 1e-15);
    }

    #[test]
    fn relative_without_kappa() {
        let path = fixture_path();
        let (b, f) = fid2_relative(&path, &RabiError::common(2e-2).unwrap());
        assert!(b.y.abs() < 1e-15);
        let expected = f1(FRAC_PI_2).unwrap() * PI * PI * 4e-4 / 3.0;
        assert!((PI * PI * b.z * b.z / 3.0 - expected).abs() < 1e-15);
        assert!((1.0 - f - expected).abs() < 1e-15);
        let (_, f0) = fid2_relative(&path, &RabiError::none());
        assert_eq!(f0, 1.0);
    }

    #[test]
    fn quadratic_fit_synthetic() {
        let samples: Vec<_> = [0.1, -0.1, 0.05, -0.05, 0.01, -0.01]
            .iter()
            .map(|&e: &f64| (e, 1.0 - 2.0 * e * e))
            .collect();
        let fit = extract_quadratic_coefficient(&samples).unwrap();
        assert!((fit.coefficient - 2.0).abs() < 1e-10);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn quadratic_fit_cancels_cubic_with_pairs() {
        let samples: Vec<_> = [0.1, -0.1, 0.05, -0.05]
            .iter()
            .map(|&e: &f64| (e, 1.0 - 2.0 * e * e - 0.7 * e * e * e))
            .collect();
        let fit = extract_quadratic_coefficient(&samples).unwrap();
        assert!((fit.coefficient - 2.0).abs() < 1e-10);
        assert!((fit.odd_slope - 0.7).abs() < 1e-9);
    }

    #[test]
    fn quadratic_fit_rejects_bad_sets() {
        assert!(extract_quadratic_coefficient(&[(0.1, 0.9), (0.1, 0.9), (0.1, 0.9)]).is_err());
        assert!(extract_quadratic_coefficient(&[(0.1, 0.9), (-0.1, 0.9)]).is_err());
        assert!(extract_quadratic_coefficient(&[(0.1, 0.9), (-0.1, 1.2), (0.2, 0.9)]).is_err());
        assert!(extract_quadratic_coefficient(&[(0.0, 1.0), (-0.1, 0.9), (0.2, 0.9)]).is_err());
    }

    #[test]
    fn target_gate_validation() {
        assert!(TargetGate::new(0.5, Vec3::new(1.0, 1.0, 0.0)).is_err());
        assert!(TargetGate::new(2.0, Vec3::z()).is_err());
        let t = TargetGate::normalized(0.5, Vec3::new(1.0, 1.0, 0.0)).unwrap();
        assert!((t.axis().norm() - 1.0).abs() < 1e-15);
        assert!(TargetGate::normalized(0.5, Vec3::zeros()).is_err());
    }
}
