//! Ideal and error-affected gates for the two-loop, single-loop multiple-pulse and
//! single-shot realisations, plus the bright/dark geometry of the laser parameters.
//!
//! Pulse areas are imposed exactly: π per two-loop loop, π/2 per single-loop segment
//! and ΩT = π for the single-shot pulse. Time-resolved propagation of the same
//! Hamiltonians lives in [`crate::oracle`].

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::qmath::{
    cis, embed, expm, pauli_dot, wrap_angle, HermitianGenerator, Ket, Operator, Unitary, Vec3, C64,
};

/// Slack allowed on closed polar ranges before a value counts as out of range.
const RANGE_SLACK: f64 = 1e-12;

fn polar(name: &'static str, value: f64) -> Result<f64> {
    check_range(name, value, -RANGE_SLACK, PI + RANGE_SLACK, "[0, π]").map(|v| v.clamp(0.0, PI))
}

fn azimuth(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(wrap_angle(value))
    } else {
        Err(Error::Domain {
            name,
            value,
            range: "finite angles",
        })
    }
}

/// |b⟩ = cos(θ/2)|0⟩ + sin(θ/2)e^{iψ}|1⟩ and |d⟩ = sin(θ/2)|0⟩ − cos(θ/2)e^{iψ}|1⟩.
pub fn bright_dark(theta: f64, psi: f64) -> Result<(Ket, Ket)> {
    let theta = polar("theta", theta)?;
    Ok(bright_dark_unchecked(theta, psi))
}

fn bright_dark_unchecked(theta: f64, psi: f64) -> (Ket, Ket) {
    let (s, c) = (0.5 * theta).sin_cos();
    let p = cis(psi);
    (
        Ket::qubit(C64::new(c, 0.0), p * s),
        Ket::qubit(C64::new(s, 0.0), -p * c),
    )
}

/// n⃗ = (sin θ cos ψ, sin θ sin ψ, cos θ); satisfies |b⟩⟨b| − |d⟩⟨d| = n⃗·σ⃗.
pub fn bloch_vector(theta: f64, psi: f64) -> Result<Vec3> {
    let theta = polar("theta", theta)?;
    Ok(bloch_unchecked(theta, psi))
}

fn bloch_unchecked(theta: f64, psi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Laser parameters of one resonant pulse pair: ratio angle θ, relative phase ψ and
/// total phase φ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopParams {
    theta: f64,
    psi: f64,
    phi: f64,
}

impl LoopParams {
    pub fn new(theta: f64, psi: f64, phi: f64) -> Result<Self> {
        Ok(Self {
            theta: polar("theta", theta)?,
            psi: azimuth("psi", psi)?,
            phi: azimuth("phi", phi)?,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn with_phi(self, phi: f64) -> Result<Self> {
        Self::new(self.theta, self.psi, phi)
    }

    pub fn bright(&self) -> Ket {
        bright_dark_unchecked(self.theta, self.psi).0
    }

    pub fn dark(&self) -> Ket {
        bright_dark_unchecked(self.theta, self.psi).1
    }

    pub fn bloch(&self) -> Vec3 {
        bloch_unchecked(self.theta, self.psi)
    }

    /// e^{iφ}|b⟩⟨e| + h.c.
    pub fn generator(&self) -> HermitianGenerator {
        HermitianGenerator::coupling(&self.bright(), self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLoopPath {
    pub loop1: LoopParams,
    pub loop2: LoopParams,
}

impl TwoLoopPath {
    pub fn new(loop1: LoopParams, loop2: LoopParams) -> Self {
        Self { loop1, loop2 }
    }

    /// Both total phases shifted by the same offset.
    pub fn phase_shifted(&self, offset: f64) -> Result<Self> {
        Ok(Self {
            loop1: self.loop1.with_phi(self.loop1.phi + offset)?,
            loop2: self.loop2.with_phi(self.loop2.phi + offset)?,
        })
    }
}

/// One bright state driven in two π/2 segments with total phases φ and φ′.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleLoopPath {
    theta: f64,
    psi: f64,
    phi: f64,
    phi_prime: f64,
}

impl SingleLoopPath {
    pub fn new(theta: f64, psi: f64, phi: f64, phi_prime: f64) -> Result<Self> {
        Ok(Self {
            theta: polar("theta", theta)?,
            psi: azimuth("psi", psi)?,
            phi: azimuth("phi", phi)?,
            phi_prime: azimuth("phi_prime", phi_prime)?,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn phi_prime(&self) -> f64 {
        self.phi_prime
    }

    /// φ − φ′.
    pub fn phase_difference(&self) -> f64 {
        self.phi - self.phi_prime
    }

    pub fn bright(&self) -> Ket {
        bright_dark_unchecked(self.theta, self.psi).0
    }

    pub fn dark(&self) -> Ket {
        bright_dark_unchecked(self.theta, self.psi).1
    }

    pub fn first_generator(&self) -> HermitianGenerator {
        HermitianGenerator::coupling(&self.bright(), self.phi)
    }

    pub fn second_generator(&self) -> HermitianGenerator {
        HermitianGenerator::coupling(&self.bright(), self.phi_prime)
    }

    pub fn phase_shifted(&self, offset: f64) -> Result<Self> {
        Self::new(
            self.theta,
            self.psi,
            self.phi + offset,
            self.phi_prime + offset,
        )
    }
}

/// Off-resonant square pulse: Δ = −2Ω sin γ, Ω₀ = Ω cos α cos γ, Ω₁ = Ω sin α cos γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleShotPath {
    alpha: f64,
    beta0: f64,
    beta1: f64,
    gamma: f64,
}

/// Physical drive parameters of a single-shot pulse for a given scale Ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleShotDrive {
    pub detuning: f64,
    pub rabi0: f64,
    pub rabi1: f64,
    pub beta0: f64,
    pub beta1: f64,
}

impl SingleShotPath {
    pub fn new(alpha: f64, beta0: f64, beta1: f64, gamma: f64) -> Result<Self> {
        Ok(Self {
            alpha: check_range(
                "alpha",
                alpha,
                -RANGE_SLACK,
                FRAC_PI_2 + RANGE_SLACK,
                "[0, π/2]",
            )?
            .clamp(0.0, FRAC_PI_2),
            beta0: azimuth("beta0", beta0)?,
            beta1: azimuth("beta1", beta1)?,
            gamma: check_range(
                "gamma",
                gamma,
                -FRAC_PI_2 - RANGE_SLACK,
                FRAC_PI_2 + RANGE_SLACK,
                "[-π/2, π/2]",
            )?
            .clamp(-FRAC_PI_2, FRAC_PI_2),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// |b⟩ = cos α e^{iβ₀}|0⟩ + sin α e^{iβ₁}|1⟩.
    pub fn bright(&self) -> Ket {
        let (s, c) = self.alpha.sin_cos();
        Ket::qubit(cis(self.beta0) * c, cis(self.beta1) * s)
    }

    pub fn dark(&self) -> Ket {
        let (s, c) = self.alpha.sin_cos();
        Ket::qubit(cis(self.beta0) * s, -cis(self.beta1) * c)
    }

    /// ζ = π − π sin γ.
    pub fn zeta(&self) -> f64 {
        PI - PI * self.gamma.sin()
    }

    pub fn drive(&self, omega: f64) -> SingleShotDrive {
        let (sg, cg) = self.gamma.sin_cos();
        let (sa, ca) = self.alpha.sin_cos();
        SingleShotDrive {
            detuning: -2.0 * omega * sg,
            rabi0: omega * ca * cg,
            rabi1: omega * sa * cg,
            beta0: self.beta0,
            beta1: self.beta1,
        }
    }
}

/// Systematic Rabi-frequency error: ε₀ = ε + κ on |0⟩↔|e⟩ and ε₁ = ε − κ on |1⟩↔|e⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiError {
    epsilon: f64,
    kappa: f64,
}

impl RabiError {
    /// Largest |ε| and |κ| accepted.
    pub const BOUND: f64 = 0.1;

    pub fn new(epsilon: f64, kappa: f64) -> Result<Self> {
        Ok(Self {
            epsilon: check_range("epsilon", epsilon, -Self::BOUND, Self::BOUND, "[-0.1, 0.1]")?,
            kappa: check_range("kappa", kappa, -Self::BOUND, Self::BOUND, "[-0.1, 0.1]")?,
        })
    }

    pub fn common(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }

    pub fn none() -> Self {
        Self {
            epsilon: 0.0,
            kappa: 0.0,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eps0(&self) -> f64 {
        self.epsilon + self.kappa
    }

    pub fn eps1(&self) -> f64 {
        self.epsilon - self.kappa
    }

    fn require_common(&self, scheme: &'static str) -> Result<()> {
        if self.kappa == 0.0 {
            Ok(())
        } else {
            Err(Error::Domain {
                name: scheme,
                value: self.kappa,
                range: "kappa = 0 (common-error model only)",
            })
        }
    }
}

/// U_ν = −|e⟩⟨e| − n⃗_ν·σ⃗, the π-area loop with bright-state Bloch vector n⃗_ν.
pub fn loop_gate(params: &LoopParams) -> Unitary {
    Unitary::assume(embed(&(-pauli_dot(&params.bloch())), C64::new(-1.0, 0.0)))
}

/// U = U₂U₁; its qubit block is n⃗₁·n⃗₂ − i(n⃗₁×n⃗₂)·σ⃗ and it does not depend on φ₁, φ₂.
pub fn two_loop_ideal(path: &TwoLoopPath) -> Unitary {
    loop_gate(&path.loop2) * loop_gate(&path.loop1)
}

/// U′ = U₂ e^{−iεπG₂} e^{−iεπG₁} U₁ under a common error ε (κ must be zero).
pub fn two_loop_errored(path: &TwoLoopPath, error: &RabiError) -> Result<Unitary> {
    error.require_common("two_loop_errored")?;
    let eps_pi = error.epsilon * PI;
    let e1 = expm(&path.loop1.generator(), eps_pi);
    let e2 = expm(&path.loop2.generator(), eps_pi);
    Ok(loop_gate(&path.loop2) * e2 * e1 * loop_gate(&path.loop1))
}

/// How unequal Rabi errors distort one loop: the drive becomes (1+δ)·(e^{iφ}|b′⟩⟨e| + h.c.)
/// with tan(θ′/2) = tan(θ/2)(1+ε₁)/(1+ε₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopDistortion {
    pub theta_prime: f64,
    pub delta: f64,
}

pub fn loop_distortion(params: &LoopParams, error: &RabiError) -> LoopDistortion {
    let (s, c) = (0.5 * params.theta).sin_cos();
    let a0 = (1.0 + error.eps0()) * c;
    let a1 = (1.0 + error.eps1()) * s;
    LoopDistortion {
        theta_prime: 2.0 * a1.atan2(a0),
        delta: a0.hypot(a1) - 1.0,
    }
}

fn distorted_loop(params: &LoopParams, error: &RabiError) -> (LoopParams, f64) {
    let d = loop_distortion(params, error);
    let distorted = LoopParams {
        theta: d.theta_prime.clamp(0.0, PI),
        psi: params.psi,
        phi: params.phi,
    };
    (distorted, d.delta)
}

/// U″ for independent errors on the two Rabi frequencies, from the distorted drive
/// exp(−iπ(1+δ_ν)G′_ν) of each loop.
pub fn two_loop_errored_relative(path: &TwoLoopPath, error: &RabiError) -> Unitary {
    let evolve = |params: &LoopParams| {
        let (distorted, delta) = distorted_loop(params, error);
        expm(&distorted.generator(), PI * (1.0 + delta))
    };
    evolve(&path.loop2) * evolve(&path.loop1)
}

/// The same U″ in factored form U₂′ e^{−iδ₂πG′₂} e^{−iδ₁πG′₁} U₁′ with
/// U_ν′ = −|e⟩⟨e| − |b′_ν⟩⟨b′_ν| + |d′_ν⟩⟨d′_ν|.
pub fn two_loop_errored_relative_factored(path: &TwoLoopPath, error: &RabiError) -> Unitary {
    let (l1, d1) = distorted_loop(&path.loop1, error);
    let (l2, d2) = distorted_loop(&path.loop2, error);
    let e1 = expm(&l1.generator(), d1 * PI);
    let e2 = expm(&l2.generator(), d2 * PI);
    loop_gate(&l2) * e2 * e1 * loop_gate(&l1)
}

/// Ũ = U_φ′ U_φ, each segment a π/2-area pulse.
pub fn single_loop_ideal(path: &SingleLoopPath) -> Unitary {
    expm(&path.second_generator(), FRAC_PI_2) * expm(&path.first_generator(), FRAC_PI_2)
}

/// Ũ′ = U_φ′ e^{−iεπG_φ′/2} e^{−iεπG_φ/2} U_φ under a common error ε.
pub fn single_loop_errored(path: &SingleLoopPath, error: &RabiError) -> Result<Unitary> {
    error.require_common("single_loop_errored")?;
    let g1 = path.first_generator();
    let g2 = path.second_generator();
    let half = error.epsilon * FRAC_PI_2;
    Ok(expm(&g2, FRAC_PI_2) * expm(&g2, half) * expm(&g1, half) * expm(&g1, FRAC_PI_2))
}

/// Ĥ′/Ω = 2 sin γ |e⟩⟨e| + (1+ε) cos γ (|b⟩⟨e| + |e⟩⟨b|); the error leaves Δ untouched.
pub fn single_shot_generator(path: &SingleShotPath, epsilon: f64) -> HermitianGenerator {
    let (sg, cg) = path.gamma.sin_cos();
    let b = path.bright();
    let k = (1.0 + epsilon) * cg;
    HermitianGenerator::lambda([b.amplitude(0) * k, b.amplitude(1) * k], 2.0 * sg)
}

/// Û = e^{iζ}(|e⟩⟨e| + |b⟩⟨b|) + |d⟩⟨d| with ζ = π − π sin γ.
pub fn single_shot_ideal(path: &SingleShotPath) -> Unitary {
    let active = Ket::excited().projector() + path.bright().projector();
    Unitary::assume(active * cis(path.zeta()) + path.dark().projector())
}

/// exp(−iπĤ′/Ω) evaluated through [`expm`]; equals [`single_shot_ideal`] at ε = 0 and
/// [`single_shot_errored`] otherwise.
pub fn single_shot_from_generator(path: &SingleShotPath, error: &RabiError) -> Unitary {
    expm(&single_shot_generator(path, error.epsilon), PI)
}

/// λ = [(1+ε)² cos²γ + sin²γ]^{1/2}.
pub fn single_shot_lambda(path: &SingleShotPath, epsilon: f64) -> f64 {
    let (sg, cg) = path.gamma.sin_cos();
    ((1.0 + epsilon) * cg).hypot(sg)
}

/// σ_ε = [(1+ε) cos γ (|b⟩⟨e| + |e⟩⟨b|) + sin γ (|e⟩⟨e| − |b⟩⟨b|)] / λ.
pub fn sigma_epsilon(path: &SingleShotPath, epsilon: f64) -> Operator {
    let (sg, cg) = path.gamma.sin_cos();
    let lambda = single_shot_lambda(path, epsilon);
    let b = path.bright();
    let e = Ket::excited();
    let flip = b.outer(&e) + e.outer(&b);
    let z = e.projector() - b.projector();
    (flip * C64::new((1.0 + epsilon) * cg, 0.0) + z * C64::new(sg, 0.0)) / C64::new(lambda, 0.0)
}

/// Û′ = e^{−iπ sin γ (|e⟩⟨e|+|b⟩⟨b|)} e^{−iλπσ_ε} on span{b, e}, plus |d⟩⟨d|.
pub fn single_shot_errored(path: &SingleShotPath, error: &RabiError) -> Result<Unitary> {
    error.require_common("single_shot_errored")?;
    let eps = error.epsilon;
    let lambda = single_shot_lambda(path, eps);
    let active = Ket::excited().projector() + path.bright().projector();
    let (s, c) = (lambda * PI).sin_cos();
    let rotation = active * C64::new(c, 0.0) - sigma_epsilon(path, eps) * C64::new(0.0, s);
    let op = rotation * cis(-PI * path.gamma.sin()) + path.dark().projector();
    Ok(Unitary::assume(op))
}

/// Decomposition e^{iφ₂}|b₂⟩ = cos(η/2) e^{i(φ_b+φ₁)}|b₁⟩ + sin(η/2) e^{iφ_d}|d₁⟩.
///
/// `phi_b` is `None` when ⟨b₁|b₂⟩ vanishes (η = π) and `phi_d` is `None` when
/// ⟨d₁|b₂⟩ vanishes (η = 0); neither phase is defined there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrightDecomposition {
    pub eta: f64,
    pub phi_b: Option<f64>,
    pub phi_d: Option<f64>,
    /// e^{i(φ₂−φ₁)}⟨b₁|b₂⟩ = cos(η/2) e^{iφ_b}; well defined even when `phi_b` is not.
    #[serde(skip)]
    pub weighted_overlap: C64,
}

impl BrightDecomposition {
    pub fn is_degenerate(&self) -> bool {
        self.phi_b.is_none()
    }

    /// cos(η/2) cos φ_b.
    pub fn cos_product(&self) -> f64 {
        self.weighted_overlap.re
    }

    /// Rebuilds e^{iφ₂}|b₂⟩ from the decomposition in the basis {e^{iφ₁}|b₁⟩, |d₁⟩}.
    pub fn reconstruct(&self, b1: &Ket, d1: &Ket, phi1: f64) -> Ket {
        let (s, c) = (0.5 * self.eta).sin_cos();
        let along = self
            .phi_b
            .map_or(C64::new(0.0, 0.0), |pb| cis(pb + phi1) * c);
        let across = self.phi_d.map_or(C64::new(0.0, 0.0), |pd| cis(pd) * s);
        b1.scaled(along).add(&d1.scaled(across))
    }
}

/// Threshold on |⟨b₁|b₂⟩| and |⟨d₁|b₂⟩| below which the matching phase is undefined.
const DEGENERACY_TOL: f64 = 1e-12;

pub fn decompose_bright(b1: &Ket, d1: &Ket, phi1: f64, b2: &Ket, phi2: f64) -> BrightDecomposition {
    let along = b1.inner(b2);
    let across = d1.inner(b2);
    let weighted_overlap = along * cis(phi2 - phi1);
    BrightDecomposition {
        eta: 2.0 * across.norm().atan2(along.norm()),
        phi_b: (along.norm() > DEGENERACY_TOL).then(|| wrap_angle(weighted_overlap.arg())),
        phi_d: (across.norm() > DEGENERACY_TOL).then(|| wrap_angle(phi2 + across.arg())),
        weighted_overlap,
    }
}

/// (η, φ_b, φ_d) of a two-loop path with respect to loop 1's bright and dark states.
pub fn phi_b_of(path: &TwoLoopPath) -> BrightDecomposition {
    let l1 = &path.loop1;
    let l2 = &path.loop2;
    decompose_bright(&l1.bright(), &l1.dark(), l1.phi, &l2.bright(), l2.phi)
}
