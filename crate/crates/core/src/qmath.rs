//! Exact linear algebra on the three-level space spanned by |0⟩, |1⟩, |e⟩.
//!
//! The basis order is fixed to (|0⟩, |1⟩, |e⟩) throughout the crate: indices 0
//! and 1 form the qubit block, index 2 is the ancillary excited state.

use std::f64::consts::TAU;
use std::ops::Mul;

use nalgebra::{Complex, Matrix2, Matrix3, Vector3};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
/// A general 3×3 complex matrix in the (|0⟩, |1⟩, |e⟩) basis.
pub type Operator = Matrix3<C64>;
/// A 2×2 complex matrix on the qubit block.
pub type QubitOperator = Matrix2<C64>;
pub type Vec3 = Vector3<f64>;

/// Index of |e⟩.
pub const EXCITED: usize = 2;

/// Tolerance for algebraic identities (unitarity of closed forms, exact reductions).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for structural checks (block shape, unitarity of stepped products).
pub const STRUCTURAL_TOL: f64 = 1e-10;

#[inline]
pub fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

#[inline]
fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Reduce an angle to [0, 2π).
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Largest entry modulus.
pub fn max_entry(op: &Operator) -> f64 {
    op.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A state vector over (|0⟩, |1⟩, |e⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket(Vector3<C64>);

impl Ket {
    pub fn new(a0: C64, a1: C64, ae: C64) -> Self {
        Self(Vector3::new(a0, a1, ae))
    }

    /// A state in the qubit subspace.
    pub fn qubit(a0: C64, a1: C64) -> Self {
        Self::new(a0, a1, C64::new(0.0, 0.0))
    }

    pub fn excited() -> Self {
        Self::new(real(0.0), real(0.0), real(1.0))
    }

    pub fn amplitudes(&self) -> &Vector3<C64> {
        &self.0
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.0[i]
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.0.norm_squared() - 1.0).abs() <= tol
    }

    pub fn scaled(&self, s: C64) -> Ket {
        Ket(self.0 * s)
    }

    pub fn add(&self, other: &Ket) -> Ket {
        Ket(self.0 + other.0)
    }

    /// |self⟩⟨other|.
    pub fn outer(&self, other: &Ket) -> Operator {
        self.0 * other.0.adjoint()
    }

    /// |self⟩⟨self|.
    pub fn projector(&self) -> Operator {
        self.outer(self)
    }
}

/// n⃗·σ⃗ on the qubit block.
pub fn pauli_dot(n: &Vec3) -> QubitOperator {
    Matrix2::new(
        real(n.z),
        C64::new(n.x, -n.y),
        C64::new(n.x, n.y),
        real(-n.z),
    )
}

/// R(ϑ, m⃗) = exp(iϑ m⃗·σ⃗) = cos ϑ I + i sin ϑ m⃗·σ⃗.
pub fn rotation(theta_gate: f64, axis: &Vec3) -> QubitOperator {
    QubitOperator::identity() * real(theta_gate.cos())
        + pauli_dot(axis) * C64::new(0.0, theta_gate.sin())
}

/// Block-diagonal operator with `qubit` on the qubit block and `excited` on ⟨e|·|e⟩.
pub fn embed(qubit: &QubitOperator, excited: C64) -> Operator {
    let mut op = Operator::zeros();
    op.fixed_view_mut::<2, 2>(0, 0).copy_from(qubit);
    op[(EXCITED, EXCITED)] = excited;
    op
}

fn unitarity_defect(op: &Operator) -> f64 {
    max_entry(&(op.adjoint() * op - Operator::identity()))
}

/// A 3×3 unitary over (|0⟩, |1⟩, |e⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary(Operator);

impl Unitary {
    pub fn identity() -> Self {
        Self(Operator::identity())
    }

    /// Accepts `op` if U†U = I entrywise within [`STRUCTURAL_TOL`].
    pub fn try_new(op: Operator) -> Result<Self> {
        if op.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Contract("matrix has non-finite entries".into()));
        }
        let defect = unitarity_defect(&op);
        if defect <= STRUCTURAL_TOL {
            Ok(Self(op))
        } else {
            Err(Error::Contract(format!(
                "matrix is not unitary (max |U†U - I| = {defect:e})"
            )))
        }
    }

    /// For closed-form constructions that are unitary by algebra.
    pub(crate) fn assume(op: Operator) -> Self {
        debug_assert!(unitarity_defect(&op) <= 1e-9, "closed form lost unitarity");
        Self(op)
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// max |U†U − I| over entries.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }

    pub fn qubit_block(&self) -> QubitOperator {
        self.0.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Largest modulus among the entries coupling the qubit block to |e⟩.
    pub fn off_block_magnitude(&self) -> f64 {
        (0..2)
            .flat_map(|i| [self.0[(i, EXCITED)], self.0[(EXCITED, i)]])
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise max modulus of the difference.
    pub fn distance(&self, other: &Unitary) -> f64 {
        max_entry(&(self.0 - other.0))
    }
}

impl Mul for Unitary {
    type Output = Unitary;
    fn mul(self, rhs: Unitary) -> Unitary {
        Unitary(self.0 * rhs.0)
    }
}

impl Mul<&Unitary> for &Unitary {
    type Output = Unitary;
    fn mul(self, rhs: &Unitary) -> Unitary {
        Unitary(self.0 * rhs.0)
    }
}

/// A Hermitian operator; the time-independent structure multiplying a pulse envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianGenerator(Operator);

/// The Λ-form decomposition H = a|e⟩⟨e| + |w⟩⟨e| + |e⟩⟨w| with |w⟩ in the qubit block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaParts {
    pub coupling: [C64; 2],
    pub excited_energy: f64,
}

impl HermitianGenerator {
    pub fn try_new(op: Operator) -> Result<Self> {
        let skew = max_entry(&(op - op.adjoint()));
        if !skew.is_finite() || skew > ALGEBRAIC_TOL {
            return Err(Error::Contract(format!(
                "generator is not Hermitian (max |H - H†| = {skew:e})"
            )));
        }
        Ok(Self((op + op.adjoint()) * real(0.5)))
    }

    /// a|e⟩⟨e| + |w⟩⟨e| + |e⟩⟨w| with w = (w₀, w₁, 0).
    pub fn lambda(coupling: [C64; 2], excited_energy: f64) -> Self {
        let mut op = Operator::zeros();
        for (i, w) in coupling.iter().enumerate() {
            op[(i, EXCITED)] = *w;
            op[(EXCITED, i)] = w.conj();
        }
        op[(EXCITED, EXCITED)] = real(excited_energy);
        Self(op)
    }

    /// e^{iφ}|b⟩⟨e| + e^{−iφ}|e⟩⟨b| for a qubit-subspace state |b⟩.
    pub fn coupling(bright: &Ket, phase: f64) -> Self {
        let p = cis(phase);
        Self::lambda([bright.amplitude(0) * p, bright.amplitude(1) * p], 0.0)
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0 * real(s))
    }

    /// Returns the Λ-form parts when the qubit block vanishes.
    pub fn lambda_parts(&self) -> Option<LambdaParts> {
        let scale = max_entry(&self.0).max(1.0);
        let qubit_block = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| self.0[(i, j)].norm())
            .fold(0.0, f64::max);
        if qubit_block > 1e-15 * scale {
            return None;
        }
        Some(LambdaParts {
            coupling: [self.0[(0, EXCITED)], self.0[(1, EXCITED)]],
            excited_energy: self.0[(EXCITED, EXCITED)].re,
        })
    }
}

/// exp(−i·angle·H), dispatching to the Λ closed form when it applies and to the
/// eigendecomposition otherwise.
///
/// Panics if `angle` is not finite.
pub fn expm(generator: &HermitianGenerator, angle: f64) -> Unitary {
    assert!(angle.is_finite(), "expm angle must be finite, got {angle}");
    expm_lambda(generator, angle).unwrap_or_else(|| expm_eigen(generator, angle))
}

/// Closed form on the {bright, e} two-level block; `None` if `generator` is not of Λ form.
///
/// With r = |w| and Λ = (a²/4 + r²)^{1/2}, the block restricted to span{ŵ, e} is
/// a/2 + K with K² = Λ², so exp(−iθH) = e^{−iθa/2}(cos θΛ − i sin(θΛ)/Λ · K) there and
/// the identity on the dark complement.
pub fn expm_lambda(generator: &HermitianGenerator, angle: f64) -> Option<Unitary> {
    let LambdaParts {
        coupling: w,
        excited_energy: a,
    } = generator.lambda_parts()?;
    let r = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    let big_lambda = (0.25 * a * a + r * r).sqrt();
    let phase = cis(-0.5 * angle * a);
    let cos = (angle * big_lambda).cos();
    let sinc = if big_lambda == 0.0 {
        angle
    } else {
        (angle * big_lambda).sin() / big_lambda
    };

    let mut op = Operator::identity();
    if r > 0.0 {
        let bright_factor = phase * C64::new(cos, 0.5 * a * sinc) - real(1.0);
        let w_hat = [w[0] / r, w[1] / r];
        for i in 0..2 {
            for j in 0..2 {
                op[(i, j)] += bright_factor * w_hat[i] * w_hat[j].conj();
            }
        }
    }
    let off = phase * C64::new(0.0, -sinc);
    for i in 0..2 {
        op[(i, EXCITED)] = off * w[i];
        op[(EXCITED, i)] = off * w[i].conj();
    }
    op[(EXCITED, EXCITED)] = phase * C64::new(cos, -0.5 * a * sinc);
    Some(Unitary::assume(op))
}

/// exp(−i·angle·H) = V diag(e^{−i·angle·λₖ}) V† from the Hermitian eigendecomposition.
pub fn expm_eigen(generator: &HermitianGenerator, angle: f64) -> Unitary {
    let eig = generator.0.symmetric_eigen();
    let phases = Operator::from_diagonal(&eig.eigenvalues.map(|lam| cis(-angle * lam)));
    let v = eig.eigenvectors;
    Unitary::assume(v * phases * v.adjoint())
}

/// |Tr(V†V_e)| / Tr(V†V); the denominator is 3 for unitaries on this space.
pub fn gate_fidelity(ideal: &Unitary, errored: &Unitary) -> f64 {
    let overlap = (ideal.0.adjoint() * errored.0).trace().norm();
    (overlap / 3.0).min(1.0)
}

/// min over χ of max-entry |a_q − e^{iχ} b_q| on the qubit blocks.
///
/// Both operators must be block diagonal with respect to qubit ⊕ {|e⟩} within
/// [`STRUCTURAL_TOL`].
pub fn projective_distance_qubit(a: &Unitary, b: &Unitary) -> Result<f64> {
    for (name, u) in [("first", a), ("second", b)] {
        let leak = u.off_block_magnitude();
        if leak > STRUCTURAL_TOL {
            return Err(Error::Contract(format!(
                "{name} operator couples the qubit block to |e> (magnitude {leak:e})"
            )));
        }
    }
    let qa = a.qubit_block();
    let qb = b.qubit_block();
    let cost = |chi: f64| {
        let p = cis(chi);
        qa.iter()
            .zip(qb.iter())
            .map(|(x, y)| (x - p * y).norm())
            .fold(0.0, f64::max)
    };

    // Least-squares phase is exact whenever the blocks agree up to phase; the grid
    // and golden-section refinement cover the general max-norm minimisation.
    let overlap: C64 = qb.iter().zip(qa.iter()).map(|(y, x)| y.conj() * x).sum();
    let mut best_chi = if overlap.norm() > 0.0 {
        overlap.arg()
    } else {
        0.0
    };
    let mut best = cost(best_chi);
    const GRID: usize = 720;
    let step = TAU / GRID as f64;
    for k in 0..GRID {
        let chi = k as f64 * step;
        let v = cost(chi);
        if v < best {
            best = v;
            best_chi = chi;
        }
    }
    let (mut lo, mut hi) = (best_chi - step, best_chi + step);
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let m1 = hi - golden * (hi - lo);
        let m2 = lo + golden * (hi - lo);
        if cost(m1) < cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok(best.min(cost(0.5 * (lo + hi))))
}
