//! Time-stepped propagation of pulse schedules, used to check the closed-form gates.
//!
//! Each segment drives a fixed Hermitian structure G with a real envelope Ω(t), so
//! H(t) = Ω(t) G. The propagator is built step by step as a product of truncated Taylor
//! series of exp(−iΩ(t_k) G Δt), independent of the closed-form exponentials.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{cis, expm, HermitianGenerator, Operator, Unitary, C64};
use crate::schemes::{LoopParams, RabiError, SingleLoopPath, SingleShotPath, TwoLoopPath};

/// Minimum steps per segment accepted by [`propagate`].
pub const MIN_STEPS: usize = 100;

const CALIBRATION_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseShape {
    Square,
    SineSquared,
    /// Gaussian with σ = T/6, truncated to [0, T].
    Gaussian,
}

impl PulseShape {
    /// Unnormalised profile at s = t/T ∈ [0, 1].
    fn profile(self, s: f64) -> f64 {
        match self {
            PulseShape::Square => 1.0,
            PulseShape::SineSquared => (PI * s).sin().powi(2),
            PulseShape::Gaussian => {
                let x = (s - 0.5) * 6.0;
                (-0.5 * x * x).exp()
            }
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            w * f(a + i as f64 * h)
        })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// Ω(t) = amplitude · profile(t/T) on [0, T], zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseEnvelope {
    shape: PulseShape,
    duration: f64,
    amplitude: f64,
}

impl PulseEnvelope {
    /// Scales the amplitude so that ∫Ω dt equals `target_area`.
    pub fn calibrated(shape: PulseShape, duration: f64, target_area: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Domain {
                name: "duration",
                value: duration,
                range: "(0, inf)",
            });
        }
        if !target_area.is_finite() {
            return Err(Error::InvalidInput("pulse area must be finite".into()));
        }
        let unit_area = simpson(|s| shape.profile(s), 0.0, 1.0, CALIBRATION_INTERVALS) * duration;
        let envelope = Self {
            shape,
            duration,
            amplitude: target_area / unit_area,
        };
        let check = envelope.area();
        if (check - target_area).abs() > 1e-10 * target_area.abs().max(1.0) {
            return Err(Error::Contract(format!(
                "calibrated area {check} misses target {target_area}"
            )));
        }
        Ok(envelope)
    }

    pub fn shape(&self) -> PulseShape {
        self.shape
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn value(&self, t: f64) -> f64 {
        if (0.0..=self.duration).contains(&t) {
            self.amplitude * self.shape.profile(t / self.duration)
        } else {
            0.0
        }
    }

    /// ∫Ω dt by composite Simpson on a finer grid than the calibration.
    pub fn area(&self) -> f64 {
        simpson(
            |t| self.value(t),
            0.0,
            self.duration,
            2 * CALIBRATION_INTERVALS,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub envelope: PulseEnvelope,
    pub generator: HermitianGenerator,
}

/// Segments applied in order; the first segment acts first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub segments: Vec<Segment>,
}

impl Schedule {
    pub fn push(&mut self, envelope: PulseEnvelope, generator: HermitianGenerator) {
        self.segments.push(Segment {
            envelope,
            generator,
        });
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.envelope.duration()).sum()
    }

    /// Π exp(−i A_k G_k) with A_k the calibrated pulse areas.
    pub fn reference(&self) -> Unitary {
        self.segments.iter().fold(Unitary::identity(), |acc, s| {
            expm(&s.generator, s.envelope.area()) * acc
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation {
    pub unitary: Unitary,
    /// Set when the schedule had no segments; the unitary is then the identity.
    pub empty_schedule: bool,
}

const TAYLOR_MAX: usize = 24;

/// exp(−iaG) by Taylor series with precomputed powers, stopping once terms fall below
/// machine precision relative to the identity.
struct TaylorStepper {
    powers: Vec<Operator>,
    norm: f64,
}

impl TaylorStepper {
    fn new(g: &Operator) -> Self {
        let mut powers = Vec::with_capacity(TAYLOR_MAX + 1);
        powers.push(Operator::identity());
        for k in 1..=TAYLOR_MAX {
            let next = powers[k - 1] * g;
            powers.push(next);
        }
        let norm = g.iter().map(|z| z.norm()).sum::<f64>();
        Self { powers, norm }
    }

    fn step(&self, a: f64) -> Result<Operator> {
        let mut out = self.powers[0];
        let mut coeff = C64::new(1.0, 0.0);
        let mut bound = 1.0;
        let x = C64::new(0.0, -a);
        for (k, power) in self.powers.iter().enumerate().skip(1) {
            coeff *= x / k as f64;
            out += power * coeff;
            bound *= self.norm * a.abs() / k as f64;
            if bound < 1e-18 {
                return Ok(out);
            }
        }
        Err(Error::InvalidInput(format!(
            "step area {a:e} too large for the Taylor stepper; use more steps"
        )))
    }
}

/// Midpoint-sampled product of per-step exponentials, `steps` per segment.
pub fn propagate(schedule: &Schedule, steps: usize) -> Result<Propagation> {
    if steps < MIN_STEPS {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_STEPS} steps per segment, got {steps}"
        )));
    }
    let mut u = Operator::identity();
    for segment in &schedule.segments {
        let stepper = TaylorStepper::new(segment.generator.matrix());
        let dt = segment.envelope.duration() / steps as f64;
        for k in 0..steps {
            let t = (k as f64 + 0.5) * dt;
            u = stepper.step(segment.envelope.value(t) * dt)? * u;
        }
    }
    Ok(Propagation {
        unitary: Unitary::try_new(u)?,
        empty_schedule: schedule.segments.is_empty(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub steps: usize,
    pub err_n: f64,
    pub err_2n: f64,
    /// log₂(err_n / err_2n); `None` when err_2n is already at roundoff.
    pub order: Option<f64>,
}

/// Errors against [`Schedule::reference`] at n and 2n steps.
pub fn convergence_order(schedule: &Schedule, steps: usize) -> Result<ConvergenceStudy> {
    let reference = schedule.reference();
    let err_n = propagate(schedule, steps)?.unitary.distance(&reference);
    let err_2n = propagate(schedule, 2 * steps)?.unitary.distance(&reference);
    let order = (err_2n >= 1e-13).then(|| (err_n / err_2n).log2());
    Ok(ConvergenceStudy {
        steps,
        err_n,
        err_2n,
        order,
    })
}

/// e^{iφ}[(1+ε₀)cos(θ/2)|0⟩ + (1+ε₁)sin(θ/2)e^{iψ}|1⟩]⟨e| + h.c., from the raw Rabi
/// frequencies of the two legs.
fn loop_drive(params: &LoopParams, error: &RabiError) -> HermitianGenerator {
    let (s, c) = (0.5 * params.theta()).sin_cos();
    let p = cis(params.phi());
    HermitianGenerator::lambda(
        [
            p * (1.0 + error.eps0()) * c,
            p * cis(params.psi()) * (1.0 + error.eps1()) * s,
        ],
        0.0,
    )
}

/// Two π-area loops; errors scale the Rabi frequencies of each leg.
pub fn two_loop_schedule(
    path: &TwoLoopPath,
    error: &RabiError,
    shape: PulseShape,
) -> Result<Schedule> {
    let mut schedule = Schedule::default();
    for params in [&path.loop1, &path.loop2] {
        schedule.push(
            PulseEnvelope::calibrated(shape, 1.0, PI)?,
            loop_drive(params, error),
        );
    }
    Ok(schedule)
}

/// Two π/2-area segments with phases φ then φ′.
pub fn single_loop_schedule(
    path: &SingleLoopPath,
    error: &RabiError,
    shape: PulseShape,
) -> Result<Schedule> {
    let mut schedule = Schedule::default();
    for phi in [path.phi(), path.phi_prime()] {
        let params = LoopParams::new(path.theta(), path.psi(), phi)?;
        schedule.push(
            PulseEnvelope::calibrated(shape, 1.0, FRAC_PI_2)?,
            loop_drive(&params, error),
        );
    }
    Ok(schedule)
}

/// One π-area pulse. Detuning and Rabi frequencies share the envelope, so the ratio
/// Δ/Ω (and γ) stays fixed for shaped pulses.
///
/// The excited-state energy is −Δ in the rotating frame.
pub fn single_shot_schedule(
    path: &SingleShotPath,
    error: &RabiError,
    shape: PulseShape,
) -> Result<Schedule> {
    let drive = path.drive(1.0);
    let generator = HermitianGenerator::lambda(
        [
            cis(drive.beta0) * (1.0 + error.eps0()) * drive.rabi0,
            cis(drive.beta1) * (1.0 + error.eps1()) * drive.rabi1,
        ],
        -drive.detuning,
    );
    let mut schedule = Schedule::default();
    schedule.push(PulseEnvelope::calibrated(shape, 1.0, PI)?, generator);
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{
        single_loop_errored, single_shot_errored, single_shot_ideal, two_loop_errored,
        two_loop_errored_relative,
    };

    #[test]
    fn calibration_hits_area() {
        for shape in [
            PulseShape::Square,
            PulseShape::SineSquared,
            PulseShape::Gaussian,
        ] {
            let env = PulseEnvelope::calibrated(shape, 2.5, PI).unwrap();
            assert!((env.area() - PI).abs() < 1e-10, "{shape:?}");
        }
        let sin2 = PulseEnvelope::calibrated(PulseShape::SineSquared, 1.0, PI).unwrap();
        assert!((sin2.amplitude() - 2.0 * PI).abs() < 1e-12);
        assert_eq!(sin2.value(-0.1), 0.0);
        assert!(PulseEnvelope::calibrated(PulseShape::Square, 0.0, PI).is_err());
    }

    #[test]
    fn empty_schedule_is_identity() {
        let p = propagate(&Schedule::default(), MIN_STEPS).unwrap();
        assert!(p.empty_schedule);
        assert_eq!(p.unitary, Unitary::identity());
    }

    #[test]
    fn too_few_steps_rejected() {
        assert!(propagate(&Schedule::default(), 10).is_err());
    }

    #[test]
    fn square_loop_matches_closed_form() {
        let l1 = LoopParams::new(1.0, 0.3, 0.0).unwrap();
        let l2 = LoopParams::new(2.0, 1.1, 0.7).unwrap();
        let path = TwoLoopPath::new(l1, l2);
        let err = RabiError::common(0.02).unwrap();
        for shape in [PulseShape::Square, PulseShape::SineSquared] {
            let s = two_loop_schedule(&path, &err, shape).unwrap();
            let u = propagate(&s, 2000).unwrap().unitary;
            assert!(u.distance(&two_loop_errored(&path, &err).unwrap()) < 1e-11);
        }
        let rel = RabiError::new(0.01, -0.03).unwrap();
        let s = two_loop_schedule(&path, &rel, PulseShape::Square).unwrap();
        let u = propagate(&s, 2000).unwrap().unitary;
        assert!(u.distance(&two_loop_errored_relative(&path, &rel)) < 1e-11);
    }

    #[test]
    fn other_schemes_match_closed_form() {
        let err = RabiError::common(-0.05).unwrap();
        let sl = SingleLoopPath::new(0.9, 2.0, 1.3, 0.2).unwrap();
        let s = single_loop_schedule(&sl, &err, PulseShape::SineSquared).unwrap();
        let u = propagate(&s, 1000).unwrap().unitary;
        assert!(u.distance(&single_loop_errored(&sl, &err).unwrap()) < 1e-11);

        let ss = SingleShotPath::new(0.4, 0.2, 1.7, -0.6).unwrap();
        let s = single_shot_schedule(&ss, &err, PulseShape::Square).unwrap();
        let u = propagate(&s, 1000).unwrap().unitary;
        assert!(u.distance(&single_shot_errored(&ss, &err).unwrap()) < 1e-11);
        let s = single_shot_schedule(&ss, &RabiError::none(), PulseShape::SineSquared).unwrap();
        let u = propagate(&s, 1000).unwrap().unitary;
        assert!(u.distance(&single_shot_ideal(&ss)) < 1e-11);
    }

    #[test]
    fn gaussian_converges_at_second_order() {
        let l = LoopParams::new(0.8, 0.0, 0.0).unwrap();
        let path = TwoLoopPath::new(l, l);
        let s = two_loop_schedule(&path, &RabiError::none(), PulseShape::Gaussian).unwrap();
        let study = convergence_order(&s, 200).unwrap();
        let order = study.order.unwrap();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn midpoint_is_exact_for_sine_squared() {
        let l = LoopParams::new(0.8, 0.0, 0.0).unwrap();
        let path = TwoLoopPath::new(l, l);
        let s = two_loop_schedule(&path, &RabiError::none(), PulseShape::SineSquared).unwrap();
        let study = convergence_order(&s, 200).unwrap();
        assert!(study.order.is_none());
        assert!(study.err_n < 1e-12);
    }

    #[test]
    fn envelope_shape_does_not_matter_at_equal_area() {
        let path = TwoLoopPath::new(
            LoopParams::new(0.4, 1.0, 0.2).unwrap(),
            LoopParams::new(2.5, 3.0, 4.0).unwrap(),
        );
        let err = RabiError::new(0.07, 0.03).unwrap();
        let square = two_loop_schedule(&path, &err, PulseShape::Square).unwrap();
        let smooth = two_loop_schedule(&path, &err, PulseShape::SineSquared).unwrap();
        let a = propagate(&square, 5000).unwrap().unitary;
        let b = propagate(&smooth, 5000).unwrap().unitary;
        assert!(a.distance(&b) < 1e-8);
    }

    #[test]
    fn doubling_steps_cuts_gaussian_error() {
        let ss = SingleShotPath::new(0.3, 0.0, 1.0, 0.4).unwrap();
        let s = single_shot_schedule(&ss, &RabiError::none(), PulseShape::Gaussian).unwrap();
        let study = convergence_order(&s, 1000).unwrap();
        assert!(study.err_n / study.err_2n >= 3.0, "{study:?}");
    }
}
