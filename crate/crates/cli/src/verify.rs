//! The acceptance suite behind `holonomic verify`.
//!
//! Each criterion returns a list of metrics with their bounds; a criterion passes when
//! every metric is within bound. Random draws come from a ChaCha8 stream seeded with
//! `seed + id`, so a criterion's inputs do not depend on which others ran.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, TAU};
use std::fmt::Write as _;
use std::time::Instant;

use holonomic::analytic::{fid2_relative, GatePath, TargetGate};
use holonomic::oracle::{
    propagate, single_loop_schedule, single_shot_schedule, two_loop_schedule, PulseShape,
};
use holonomic::pathfinder::{
    measure_rotation, solve_single_loop, solve_single_shot, solve_two_loop, Orientation,
    PathConstraints,
};
use holonomic::qmath::{gate_fidelity, projective_distance_qubit, Vec3};
use holonomic::schemes::{
    phi_b_of, two_loop_errored, two_loop_errored_relative, two_loop_ideal, LoopParams, RabiError,
    SingleLoopPath, SingleShotPath, TwoLoopPath,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{figure1_rows, Curves};
use crate::format::general;
use crate::Level;

pub const DEFAULT_SEED: u64 = 20_250_611;

/// Bound on |F_exact − F″| / (|ε| + |κ|)³ over the relative-error grid.
pub const RELATIVE_CUBIC_CONSTANT: f64 = 10.0;

/// Step used for ∂F″/∂κ by central differences.
pub const KAPPA_STEP: f64 = 1e-5;

pub const CRITERIA: [(u8, &str); 8] = [
    (1, "figure1 curves: dominance, monotonicity, endpoints"),
    (2, "two-loop quadratic coefficient vs f1"),
    (3, "single-loop and single-shot coefficients vs f2, f3"),
    (4, "phi_b optimality scan"),
    (5, "relative-error fidelity consistency"),
    (6, "kappa optimality of balanced paths"),
    (7, "time-stepped oracle vs closed forms"),
    (8, "structural invariants"),
];

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub level: Level,
    pub seed: u64,
    pub curves: Curves,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            level: Level::Fast,
            seed: DEFAULT_SEED,
            curves: Curves::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub label: String,
    pub value: f64,
    pub required: String,
    pub ok: bool,
}

impl Metric {
    pub fn at_most(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            label: label.into(),
            value,
            required: format!("<= {}", general(limit, 6)),
            ok: value <= limit,
        }
    }

    pub fn above(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            label: label.into(),
            value,
            required: format!("> {}", general(limit, 6)),
            ok: value > limit,
        }
    }

    pub fn exactly(label: impl Into<String>, value: f64, expected: f64) -> Self {
        Self {
            label: label.into(),
            value,
            required: format!("= {}", general(expected, 6)),
            ok: value == expected,
        }
    }

    /// A count that must be zero.
    pub fn none(label: impl Into<String>, count: usize) -> Self {
        Self {
            label: label.into(),
            value: count as f64,
            required: "= 0".into(),
            ok: count == 0,
        }
    }

    fn render(&self) -> String {
        let mark = if self.ok { "" } else { "  <-- FAIL" };
        format!(
            "{} = {} (required {}){mark}",
            self.label,
            general(self.value, 6),
            self.required
        )
    }
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub metrics: Vec<Metric>,
    /// Set when the criterion could not be evaluated at all.
    pub error: Option<String>,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.metrics.iter().all(|m| m.ok)
    }

    /// `[PASS] 1 name: metric; metric; ...`
    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let body = match &self.error {
            Some(e) => format!("error: {e}"),
            None => self
                .metrics
                .iter()
                .map(Metric::render)
                .collect::<Vec<_>>()
                .join("; "),
        };
        format!(
            "[{status}] {} {} ({:.2} s): {body}",
            self.id, self.name, self.seconds
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub level: Level,
    pub seed: u64,
    pub outcomes: Vec<CriterionOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CriterionOutcome::passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "verify level={} seed={}\n",
            match self.level {
                Level::Fast => "fast",
                Level::Full => "full",
            },
            self.seed
        );
        for outcome in &self.outcomes {
            let _ = writeln!(out, "{}", outcome.line());
        }
        let passed = self.outcomes.iter().filter(|o| o.passed()).count();
        let _ = writeln!(out, "{passed}/{} criteria passed", self.outcomes.len());
        out
    }

    pub fn failure_summary(&self) -> String {
        self.outcomes
            .iter()
            .filter(|o| !o.passed())
            .map(|o| {
                let failing: Vec<&str> = o
                    .metrics
                    .iter()
                    .filter(|m| !m.ok)
                    .map(|m| m.label.as_str())
                    .collect();
                let what = o.error.clone().unwrap_or_else(|| failing.join(", "));
                format!("criterion {} ({}): {what}", o.id, o.name)
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn run(opts: &VerifyOptions) -> VerifyReport {
    VerifyReport {
        level: opts.level,
        seed: opts.seed,
        outcomes: CRITERIA
            .iter()
            .map(|&(id, _)| criterion(id, opts))
            .collect(),
    }
}

/// Runs one criterion by number (1 to 8).
pub fn criterion(id: u8, opts: &VerifyOptions) -> CriterionOutcome {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .unwrap_or_else(|| panic!("no criterion {id}"));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(u64::from(id)));
    let start = Instant::now();
    let result = match id {
        1 => figure1(opts),
        2 => two_loop_coefficients(opts),
        3 => other_coefficients(opts),
        4 => phi_b_scan(),
        5 => relative_consistency(&mut rng),
        6 => kappa_optimality(opts),
        7 => oracle_equivalence(opts, &mut rng),
        _ => structural(opts, &mut rng),
    };
    let seconds = start.elapsed().as_secs_f64();
    let runtime_limit = match (id, opts.level) {
        (1, _) => Some(1.0),
        (2, _) => Some(5.0),
        (7, Level::Full) => Some(120.0),
        _ => None,
    };
    let (metrics, error) = match result {
        Ok(mut metrics) => {
            if let Some(limit) = runtime_limit {
                metrics.push(Metric::at_most("runtime s", seconds, limit));
            }
            (metrics, None)
        }
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    CriterionOutcome {
        id,
        name,
        metrics,
        error,
        seconds,
    }
}

type Outcome = Result<Vec<Metric>, Box<dyn std::error::Error>>;

const GATE_ANGLES: [f64; 4] = [FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2];

fn axes(level: Level) -> Vec<Vec3> {
    let mut axes = vec![Vec3::z(), Vec3::x(), Vec3::new(1.0, 1.0, 1.0).normalize()];
    if level == Level::Full {
        axes.extend([
            Vec3::y(),
            -Vec3::z(),
            Vec3::new(-0.3, 0.5, 0.81).normalize(),
            Vec3::new(0.7, -0.1, -0.2).normalize(),
        ]);
    }
    axes
}

fn pi2_over_3() -> f64 {
    PI * PI / 3.0
}

fn figure1(opts: &VerifyOptions) -> Outcome {
    let rows = figure1_rows(101, &opts.curves)?;
    let mut margin = f64::INFINITY;
    let mut dominance_violations = 0;
    let mut monotone_violations = 0;
    for (i, row) in rows.iter().enumerate() {
        let [theta, f1, f2, f3] = *row;
        if theta > 0.0 {
            let m = (f2 - f1).min(f3 - f1);
            margin = margin.min(m);
            if m <= 0.0 {
                dominance_violations += 1;
            }
        }
        if i > 0 && (1..4).any(|c| row[c] <= rows[i - 1][c]) {
            monotone_violations += 1;
        }
    }
    let first = rows[0];
    let last = rows[rows.len() - 1];
    let endpoint = [
        first[1].abs(),
        first[2].abs(),
        first[3].abs(),
        (last[1] - (2.0 - 2f64.sqrt())).abs(),
        (last[2] - 1.0).abs(),
        (last[3] - 1.0).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(vec![
        Metric::none(
            "dominance violations (f1 >= f2 or f1 >= f3)",
            dominance_violations,
        ),
        Metric::above("dominance min margin", margin, 0.0),
        Metric::none("non-increasing steps", monotone_violations),
        Metric::at_most("endpoint error", endpoint, 1e-12),
    ])
}

fn relative_gap(fitted: f64, predicted: f64) -> f64 {
    (fitted / predicted - 1.0).abs()
}

fn two_loop_coefficients(opts: &VerifyOptions) -> Outcome {
    let mut worst: f64 = 0.0;
    for &theta in &GATE_ANGLES {
        let predicted = (opts.curves.f1)(theta)? * pi2_over_3();
        for axis in axes(opts.level) {
            let target = TargetGate::new(theta, axis)?;
            for balanced in [true, false] {
                let constraints = PathConstraints {
                    force_balanced: balanced,
                    ..Default::default()
                };
                let path = solve_two_loop(&target, &constraints).path;
                let fit = GatePath::TwoLoop(path).exact_coefficient()?;
                worst = worst.max(relative_gap(fit.coefficient, predicted));
            }
        }
    }
    Ok(vec![Metric::at_most(
        "max relative gap to f1*pi^2/3",
        worst,
        1e-3,
    )])
}

fn other_coefficients(opts: &VerifyOptions) -> Outcome {
    let (mut loop_gap, mut shot_gap) = (0.0f64, 0.0f64);
    for &theta in &GATE_ANGLES {
        let p2 = (opts.curves.f2)(theta)? * pi2_over_3();
        let p3 = (opts.curves.f3)(theta)? * pi2_over_3();
        for axis in axes(opts.level) {
            let target = TargetGate::new(theta, axis)?;
            let sl = GatePath::SingleLoop(solve_single_loop(&target)).exact_coefficient()?;
            let ss = GatePath::SingleShot(solve_single_shot(&target)).exact_coefficient()?;
            loop_gap = loop_gap.max(relative_gap(sl.coefficient, p2));
            shot_gap = shot_gap.max(relative_gap(ss.coefficient, p3));
        }
    }
    Ok(vec![
        Metric::at_most("single-loop max relative gap to f2*pi^2/3", loop_gap, 1e-3),
        Metric::at_most("single-shot max relative gap to f3*pi^2/3", shot_gap, 1e-3),
    ])
}

/// Two-loop path with loop 1 fixed and φ₂ chosen to give decomposition phase `phi_b`.
fn with_phi_b(path: &TwoLoopPath, phi_b: f64) -> holonomic::Result<TwoLoopPath> {
    let overlap = path.loop1.bright().inner(&path.loop2.bright());
    Ok(TwoLoopPath::new(
        path.loop1,
        path.loop2
            .with_phi(path.loop1.phi() + phi_b - overlap.arg())?,
    ))
}

fn phi_b_scan() -> Outcome {
    const POINTS: usize = 360;
    let error = RabiError::common(1e-2)?;
    let mut worst_offset = 0usize;
    let mut worst_margin = f64::INFINITY;
    for axis in [Vec3::z(), Vec3::new(0.6, 0.0, 0.8)] {
        let target = TargetGate::new(FRAC_PI_4, axis)?;
        let base = solve_two_loop(&target, &PathConstraints::default()).path;
        let mut best = (0, f64::INFINITY);
        for k in 0..POINTS {
            let phi_b = TAU * k as f64 / POINTS as f64;
            let infidelity =
                1.0 - GatePath::TwoLoop(with_phi_b(&base, phi_b)?).exact_fidelity(&error)?;
            if infidelity < best.1 {
                best = (k, infidelity);
            }
        }
        let offset = best
            .0
            .abs_diff(POINTS / 2)
            .min(POINTS - best.0.abs_diff(POINTS / 2));
        worst_offset = worst_offset.max(offset);

        let at_zero = GatePath::TwoLoop(with_phi_b(&base, 0.0)?)
            .exact_coefficient()?
            .coefficient;
        let sl = GatePath::SingleLoop(solve_single_loop(&target))
            .exact_coefficient()?
            .coefficient;
        let ss = GatePath::SingleShot(solve_single_shot(&target))
            .exact_coefficient()?
            .coefficient;
        worst_margin = worst_margin.min(at_zero - sl.max(ss));
    }
    Ok(vec![
        Metric::at_most(
            "argmin distance from pi (grid steps)",
            worst_offset as f64,
            1.0,
        ),
        Metric::above(
            "c(phi_b=0) - max(c_single_loop, c_single_shot)",
            worst_margin,
            0.0,
        ),
    ])
}

fn random_loop(rng: &mut ChaCha8Rng) -> LoopParams {
    LoopParams::new(
        rng.random_range(0.0..=PI),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    )
    .expect("sampled inside the domain")
}

fn random_two_loop(rng: &mut ChaCha8Rng) -> TwoLoopPath {
    TwoLoopPath::new(random_loop(rng), random_loop(rng))
}

fn random_single_loop(rng: &mut ChaCha8Rng) -> SingleLoopPath {
    SingleLoopPath::new(
        rng.random_range(0.0..=PI),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    )
    .expect("sampled inside the domain")
}

fn random_single_shot(rng: &mut ChaCha8Rng) -> SingleShotPath {
    SingleShotPath::new(
        rng.random_range(0.0..=FRAC_PI_2),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
        rng.random_range(-FRAC_PI_2..=FRAC_PI_2),
    )
    .expect("sampled inside the domain")
}

fn random_error(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-RabiError::BOUND..=RabiError::BOUND)
}

fn random_target(rng: &mut ChaCha8Rng) -> holonomic::Result<TargetGate> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let az: f64 = rng.random_range(0.0..TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    TargetGate::normalized(
        rng.random_range(0.0..=FRAC_PI_2),
        Vec3::new(r * az.cos(), r * az.sin(), z),
    )
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn relative_consistency(rng: &mut ChaCha8Rng) -> Outcome {
    let bound = RabiError::BOUND;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_reduction: f64 = 0.0;
    let mut points = 0usize;
    for _ in 0..10 {
        let path = random_two_loop(rng);
        let ideal = two_loop_ideal(&path);
        for eps in linspace(-bound, bound, 10) {
            for kappa in linspace(-bound, bound, 10) {
                let error = RabiError::new(eps, kappa)?;
                let exact = gate_fidelity(&ideal, &two_loop_errored_relative(&path, &error));
                let (_, predicted) = fid2_relative(&path, &error);
                let scale = (eps.abs() + kappa.abs()).powi(3);
                worst_ratio = worst_ratio.max((exact - predicted).abs() / scale);
                points += 1;
            }
            let common = RabiError::common(eps)?;
            let (_, reduced) = fid2_relative(&path, &common);
            let plain = GatePath::TwoLoop(path).analytic_fidelity(&common)?;
            let gate_gap = two_loop_errored_relative(&path, &common)
                .distance(&two_loop_errored(&path, &common)?);
            worst_reduction = worst_reduction.max((reduced - plain).abs()).max(gate_gap);
        }
    }
    Ok(vec![
        Metric::exactly("grid points", points as f64, 1000.0),
        Metric::at_most(
            "max |F_exact - F''| / (|eps|+|kappa|)^3",
            worst_ratio,
            RELATIVE_CUBIC_CONSTANT,
        ),
        Metric::at_most("kappa=0 reduction gap", worst_reduction, 1e-12),
    ])
}

/// Central difference of the exact F″ in κ at κ = 0.
pub fn dkappa_finite_difference(path: &TwoLoopPath, epsilon: f64) -> holonomic::Result<f64> {
    let ideal = two_loop_ideal(path);
    let f = |kappa: f64| -> holonomic::Result<f64> {
        let error = RabiError::new(epsilon, kappa)?;
        Ok(gate_fidelity(
            &ideal,
            &two_loop_errored_relative(path, &error),
        ))
    };
    Ok((f(KAPPA_STEP)? - f(-KAPPA_STEP)?) / (2.0 * KAPPA_STEP))
}

/// θ₁ = π/3, θ₂ = π/2, ψ₂ − ψ₁ = π/2 (so η = π/2), φ_b = π.
pub fn unbalanced_fixture() -> holonomic::Result<TwoLoopPath> {
    let path = TwoLoopPath::new(
        LoopParams::new(PI / 3.0, 0.0, 0.0)?,
        LoopParams::new(FRAC_PI_2, FRAC_PI_2, 0.0)?,
    );
    with_phi_b(&path, PI)
}

fn kappa_optimality(opts: &VerifyOptions) -> Outcome {
    let eps = 1e-2;
    let mut worst: f64 = 0.0;
    for &theta in &GATE_ANGLES {
        for axis in axes(opts.level) {
            let target = TargetGate::new(theta, axis)?;
            for orientation in [Orientation::Plus, Orientation::Minus] {
                let constraints = PathConstraints {
                    orientation,
                    ..Default::default()
                };
                let path = solve_two_loop(&target, &constraints).path;
                worst = worst.max(dkappa_finite_difference(&path, eps)?.abs());
            }
        }
    }
    let fixture = unbalanced_fixture()?;
    let fd = dkappa_finite_difference(&fixture, eps)?;
    let eta = phi_b_of(&fixture).eta;
    Ok(vec![
        Metric::at_most("balanced max |dF''/dkappa|", worst, 1e-8),
        Metric::at_most(
            "fixture |dF''/dkappa + 9.6358e-3|",
            (fd + 9.6358e-3).abs(),
            1e-5,
        ),
        Metric::at_most("fixture |eta - pi/2|", (eta - FRAC_PI_2).abs(), 1e-12),
    ])
}

fn oracle_equivalence(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Outcome {
    let (points, steps) = match opts.level {
        Level::Fast => (4, 10_000),
        Level::Full => (100, 100_000),
    };
    let shapes = [PulseShape::Square, PulseShape::SineSquared];
    let mut worst = [0.0f64; 3];
    for _ in 0..points {
        let tl = random_two_loop(rng);
        let tl_error = RabiError::new(random_error(rng), random_error(rng))?;
        let sl = random_single_loop(rng);
        let ss = random_single_shot(rng);
        let common = RabiError::common(random_error(rng))?;
        for shape in shapes {
            let cases = [
                (
                    two_loop_schedule(&tl, &tl_error, shape)?,
                    GatePath::TwoLoop(tl).errored(&tl_error)?,
                ),
                (
                    single_loop_schedule(&sl, &common, shape)?,
                    GatePath::SingleLoop(sl).errored(&common)?,
                ),
                (
                    single_shot_schedule(&ss, &common, shape)?,
                    GatePath::SingleShot(ss).errored(&common)?,
                ),
            ];
            for (slot, (schedule, closed)) in worst.iter_mut().zip(cases) {
                let stepped = propagate(&schedule, steps)?.unitary;
                *slot = slot.max(stepped.distance(&closed));
            }
        }
    }
    Ok(vec![
        Metric::at_most(
            format!("two-loop max |U_steps - U| ({steps} steps)"),
            worst[0],
            1e-8,
        ),
        Metric::at_most(
            format!("single-loop max |U_steps - U| ({steps} steps)"),
            worst[1],
            1e-8,
        ),
        Metric::at_most(
            format!("single-shot max |U_steps - U| ({steps} steps)"),
            worst[2],
            1e-8,
        ),
    ])
}

fn structural(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Outcome {
    let samples = match opts.level {
        Level::Fast => 200,
        Level::Full => 2000,
    };
    let mut unitarity: f64 = 0.0;
    let mut reduction: f64 = 0.0;
    let mut gauge: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for _ in 0..samples {
        let tl = random_two_loop(rng);
        let sl = random_single_loop(rng);
        let paths = [
            GatePath::TwoLoop(tl),
            GatePath::SingleLoop(sl),
            GatePath::SingleShot(random_single_shot(rng)),
        ];
        let common = RabiError::common(random_error(rng))?;
        let relative = RabiError::new(random_error(rng), random_error(rng))?;
        for path in &paths {
            let ideal = path.ideal();
            unitarity = unitarity
                .max(ideal.unitarity_defect())
                .max(path.errored(&common)?.unitarity_defect());
            reduction = reduction.max(path.errored(&RabiError::none())?.distance(&ideal));
        }
        unitarity = unitarity.max(two_loop_errored_relative(&tl, &relative).unitarity_defect());

        let shift = rng.random_range(0.0..TAU);
        let shifted = [
            GatePath::TwoLoop(tl.phase_shifted(shift)?),
            GatePath::SingleLoop(sl.phase_shifted(shift)?),
        ];
        for (path, moved) in paths.iter().zip(&shifted) {
            let change = path.exact_fidelity(&common)? - moved.exact_fidelity(&common)?;
            gauge = gauge.max(change.abs());
        }

        let target = random_target(rng)?;
        let reference = target.unitary();
        let solutions = [
            GatePath::TwoLoop(solve_two_loop(&target, &PathConstraints::default()).path),
            GatePath::SingleLoop(solve_single_loop(&target)),
            GatePath::SingleShot(solve_single_shot(&target)),
        ];
        for solution in &solutions {
            let built = solution.ideal();
            round_trip = round_trip.max(projective_distance_qubit(&built, &reference)?);
            let measured = measure_rotation(&built)?;
            round_trip = round_trip.max((measured.theta_gate - target.theta_gate()).abs());
        }
    }
    Ok(vec![
        Metric::at_most("max unitarity defect", unitarity, 1e-12),
        Metric::at_most("max zero-error distance to ideal", reduction, 1e-13),
        Metric::at_most("max fidelity change under phase shift", gauge, 1e-13),
        Metric::at_most("max round-trip error", round_trip, 1e-10),
    ])
}
