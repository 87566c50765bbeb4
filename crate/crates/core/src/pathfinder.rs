//! Parameters that realise a target gate R(ϑ, m⃗) in each scheme, including the robust
//! two-loop choice φ_b = π with balanced loops cos θ₁ + cos θ₂ = 0.
//!
//! Every map from scheme parameters to (ϑ, m⃗) lives here:
//!
//! * two-loop: ϑ is the angle between n⃗₁ and n⃗₂, and n⃗₂ × n⃗₁ = sin ϑ m⃗;
//! * single-loop: φ − φ′ = π − 2ϑ, m⃗ is the bright-state Bloch vector;
//! * single-shot: sin γ = 1 − 2ϑ/π, m⃗ is the bright-state Bloch vector.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::analytic::TargetGate;
use crate::error::{Error, Result};
use crate::qmath::{wrap_angle, Unitary, Vec3, C64, STRUCTURAL_TOL};
use crate::schemes::{LoopParams, SingleLoopPath, SingleShotPath, TwoLoopPath};

/// Which of the two balanced loop pairs to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Plus,
    Minus,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Plus => 1.0,
            Orientation::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathConstraints {
    /// Decomposition phase to impose; `None` leaves φ₂ = φ₁ = 0.
    pub force_phi_b: Option<f64>,
    /// Impose cos θ₁ + cos θ₂ = 0.
    pub force_balanced: bool,
    pub orientation: Orientation,
}

impl Default for PathConstraints {
    fn default() -> Self {
        Self {
            force_phi_b: Some(PI),
            force_balanced: true,
            orientation: Orientation::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLoopSolution {
    pub path: TwoLoopPath,
    /// ϑ = 0: both loops share one Bloch vector and the rotation axis carries no meaning.
    pub degenerate: bool,
}

fn polar_coordinates(n: &Vec3) -> (f64, f64) {
    let theta = n.x.hypot(n.y).atan2(n.z);
    let psi = if n.x == 0.0 && n.y == 0.0 {
        0.0
    } else {
        wrap_angle(n.y.atan2(n.x))
    };
    (theta, psi)
}

/// Two-loop path with Bloch vectors on the great circle ⊥ m⃗, separated by ϑ.
///
/// The circle is parameterised as u(t) = cos t p̂ + sin t q̂ with p̂ its highest point
/// and q̂ = m⃗ × p̂, so u(t₂) × u(t₁) = sin(t₁ − t₂) m⃗ and u_z(t) = p_z cos t. Balanced
/// loops take t = π/2 ∓ ϑ/2 (or the mirror pair at −π/2); otherwise n⃗₁ = p̂. For m⃗ = ±ẑ
/// the circle is the equator and n⃗₁ = x̂.
pub fn solve_two_loop(target: &TargetGate, constraints: &PathConstraints) -> TwoLoopSolution {
    let m = target.axis();
    let theta_gate = target.theta_gate();

    let up = Vec3::z() - m * m.z;
    let polar_axis = up.norm() < 1e-12;
    let p = if polar_axis {
        Vec3::x()
    } else {
        up.normalize()
    };
    let q = m.cross(&p);
    let on_circle = |t: f64| p * t.cos() + q * t.sin();

    let (t1, t2) = if constraints.force_balanced && !polar_axis {
        let centre = constraints.orientation.sign() * FRAC_PI_2;
        (centre + 0.5 * theta_gate, centre - 0.5 * theta_gate)
    } else {
        (0.0, -theta_gate)
    };

    let (theta1, psi1) = polar_coordinates(&on_circle(t1));
    let (theta2, psi2) = polar_coordinates(&on_circle(t2));
    let loop1 = LoopParams::new(theta1, psi1, 0.0).expect("polar angle from atan2 lies in [0, π]");
    let mut loop2 =
        LoopParams::new(theta2, psi2, 0.0).expect("polar angle from atan2 lies in [0, π]");
    if let Some(phi_b) = constraints.force_phi_b {
        let overlap = loop1.bright().inner(&loop2.bright());
        loop2 = loop2.with_phi(phi_b - overlap.arg()).expect("finite phase");
    }
    TwoLoopSolution {
        path: TwoLoopPath::new(loop1, loop2),
        degenerate: theta_gate == 0.0,
    }
}

/// Single-loop path: bright state along m⃗, φ − φ′ = π − 2ϑ with φ′ = 0.
pub fn solve_single_loop(target: &TargetGate) -> SingleLoopPath {
    let (theta, psi) = polar_coordinates(&target.axis());
    SingleLoopPath::new(theta, psi, PI - 2.0 * target.theta_gate(), 0.0)
        .expect("angles derived from a valid target")
}

/// Single-shot path: sin γ = 1 − 2ϑ/π, bright state along m⃗ with β₀ = 0.
pub fn solve_single_shot(target: &TargetGate) -> SingleShotPath {
    let (theta, psi) = polar_coordinates(&target.axis());
    let gamma = (1.0 - 2.0 * target.theta_gate() / PI)
        .clamp(-1.0, 1.0)
        .asin();
    SingleShotPath::new(0.5 * theta, 0.0, psi, gamma).expect("angles derived from a valid target")
}

/// The qubit rotation implemented by a block-diagonal gate, up to global phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasuredRotation {
    /// ϑ ∈ [0, π/2].
    pub theta_gate: f64,
    /// `None` when ϑ vanishes.
    pub axis: Option<[f64; 3]>,
}

impl MeasuredRotation {
    pub fn axis(&self) -> Option<Vec3> {
        self.axis.map(Vec3::from)
    }
}

/// Reads (ϑ, m⃗) off the qubit block Q = e^{iχ}(cos ϑ + i sin ϑ m⃗·σ⃗).
///
/// R(ϑ, m⃗) and R(π − ϑ, −m⃗) differ by a sign, so ϑ is reported in [0, π/2]; at exactly
/// ϑ = π/2 the axis is defined only up to sign.
pub fn measure_rotation(gate: &Unitary) -> Result<MeasuredRotation> {
    let leak = gate.off_block_magnitude();
    if leak > STRUCTURAL_TOL {
        return Err(Error::Contract(format!(
            "gate couples the qubit block to |e> (magnitude {leak:e})"
        )));
    }
    let q = gate.qubit_block();
    let chi = 0.5 * q.determinant().arg();
    let mut r = q * C64::from_polar(1.0, -chi);
    if (r[(0, 0)] + r[(1, 1)]).re < 0.0 {
        r = -r;
    }
    let cos = 0.5 * (r[(0, 0)] + r[(1, 1)]).re;
    // R = [[c + i s_z, i s_x + s_y], [i s_x − s_y, c − i s_z]]
    let s = Vec3::new(
        0.5 * (r[(0, 1)] + r[(1, 0)]).im,
        0.5 * (r[(0, 1)] - r[(1, 0)]).re,
        0.5 * (r[(0, 0)] - r[(1, 1)]).im,
    );
    let sin = s.norm();
    let theta_gate = sin.atan2(cos);
    let axis = (sin > 1e-15).then(|| {
        let m = s / sin;
        [m.x, m.y, m.z]
    });
    Ok(MeasuredRotation { theta_gate, axis })
}
