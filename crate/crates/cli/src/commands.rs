use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use holonomic::analytic::{f1, f2, f3, GatePath, TargetGate};
use holonomic::pathfinder::{
    solve_single_loop, solve_single_shot, solve_two_loop, PathConstraints, TwoLoopSolution,
};
use holonomic::qmath::Vec3;
use holonomic::schemes::{
    phi_b_of, LoopParams, RabiError, SingleLoopPath, SingleShotPath, TwoLoopPath,
};
use serde::Serialize;

use crate::format::general;
use crate::{CliError, Scheme, SweepArgs, TargetArgs};

/// The three comparison curves; swappable so the verification suite can be fed a
/// deliberately wrong curve.
#[derive(Debug, Clone, Copy)]
pub struct Curves {
    pub f1: fn(f64) -> holonomic::Result<f64>,
    pub f2: fn(f64) -> holonomic::Result<f64>,
    pub f3: fn(f64) -> holonomic::Result<f64>,
}

impl Default for Curves {
    fn default() -> Self {
        Self { f1, f2, f3 }
    }
}

/// Writes `content` to `out`, or hands it back for stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, content: &str) -> Result<String, CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, content).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            Ok(String::new())
        }
        None => Ok(content.to_string()),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

/// Rows (ϑ, f1, f2, f3) with ϑ uniform on [0, π/2].
pub fn figure1_rows(samples: usize, curves: &Curves) -> Result<Vec<[f64; 4]>, CliError> {
    if samples < 2 {
        return Err(CliError::Usage(format!(
            "--samples must be at least 2, got {samples}"
        )));
    }
    (0..samples)
        .map(|i| {
            let theta = if i + 1 == samples {
                FRAC_PI_2
            } else {
                FRAC_PI_2 * i as f64 / (samples - 1) as f64
            };
            Ok([
                theta,
                (curves.f1)(theta)?,
                (curves.f2)(theta)?,
                (curves.f3)(theta)?,
            ])
        })
        .collect()
}

pub fn figure1_csv(samples: usize, curves: &Curves) -> Result<String, CliError> {
    let mut csv = String::from("theta,f1,f2,f3\n");
    for row in figure1_rows(samples, curves)? {
        let cells: Vec<String> = row.iter().map(|&v| general(v, 15)).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    Ok(csv)
}

fn target_gate(args: &TargetArgs) -> Result<TargetGate, CliError> {
    let theta = args
        .theta_gate
        .ok_or_else(|| CliError::Usage("--theta-gate is required".into()))?;
    let [x, y, z] = args.axis.0[..] else {
        return Err(CliError::Usage(format!(
            "--axis needs three components, got {}",
            args.axis.0.len()
        )));
    };
    Ok(TargetGate::normalized(theta * PI, Vec3::new(x, y, z))?)
}

fn constraints(args: &TargetArgs) -> PathConstraints {
    PathConstraints {
        force_phi_b: Some(args.phi_b * PI),
        force_balanced: args.balanced,
        ..Default::default()
    }
}

fn path_from_params(scheme: Scheme, raw: &[f64]) -> Result<GatePath, CliError> {
    let p: Vec<f64> = raw.iter().map(|v| v * PI).collect();
    let expected = match scheme {
        Scheme::TwoLoop => 6,
        Scheme::SingleLoop | Scheme::SingleShot => 4,
    };
    if p.len() != expected {
        return Err(CliError::Usage(format!(
            "--params for this scheme takes {expected} values, got {}",
            p.len()
        )));
    }
    Ok(match scheme {
        Scheme::TwoLoop => GatePath::TwoLoop(TwoLoopPath::new(
            LoopParams::new(p[0], p[1], p[2])?,
            LoopParams::new(p[3], p[4], p[5])?,
        )),
        Scheme::SingleLoop => GatePath::SingleLoop(SingleLoopPath::new(p[0], p[1], p[2], p[3])?),
        Scheme::SingleShot => GatePath::SingleShot(SingleShotPath::new(p[0], p[1], p[2], p[3])?),
    })
}

pub fn sweep_path(args: &SweepArgs) -> Result<GatePath, CliError> {
    if let Some(params) = &args.params {
        return path_from_params(args.scheme, &params.0);
    }
    let target = target_gate(&args.target)?;
    Ok(match args.scheme {
        Scheme::TwoLoop => {
            GatePath::TwoLoop(solve_two_loop(&target, &constraints(&args.target)).path)
        }
        Scheme::SingleLoop => GatePath::SingleLoop(solve_single_loop(&target)),
        Scheme::SingleShot => GatePath::SingleShot(solve_single_shot(&target)),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub scheme: &'static str,
    /// Path angles in radians.
    pub params: serde_json::Value,
    pub epsilon: f64,
    pub kappa: f64,
    pub fidelity_exact: f64,
    pub fidelity_analytic2: f64,
    pub abs_gap: f64,
}

fn path_params(path: &GatePath) -> serde_json::Value {
    let value = match path {
        GatePath::TwoLoop(p) => serde_json::to_value(p),
        GatePath::SingleLoop(p) => serde_json::to_value(p),
        GatePath::SingleShot(p) => serde_json::to_value(p),
    };
    value.expect("path types serialise")
}

/// One record per (ε, κ), ε varying slowest.
pub fn sweep(args: &SweepArgs) -> Result<Vec<SweepRecord>, CliError> {
    if args.scheme != Scheme::TwoLoop && args.kappa.0.iter().any(|&k| k != 0.0) {
        return Err(CliError::Usage(
            "--kappa other than 0 is only defined for the two-loop scheme".into(),
        ));
    }
    let path = sweep_path(args)?;
    let params = path_params(&path);
    let mut records = Vec::with_capacity(args.epsilon.0.len() * args.kappa.0.len());
    for &epsilon in &args.epsilon.0 {
        for &kappa in &args.kappa.0 {
            let error = RabiError::new(epsilon, kappa)?;
            let exact = path.exact_fidelity(&error)?;
            let analytic = path.analytic_fidelity(&error)?;
            records.push(SweepRecord {
                scheme: path.name(),
                params: params.clone(),
                epsilon,
                kappa,
                fidelity_exact: exact,
                fidelity_analytic2: analytic,
                abs_gap: (exact - analytic).abs(),
            });
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetEcho {
    pub theta_gate: f64,
    pub axis: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoLoopReport {
    pub path: TwoLoopPath,
    pub eta: f64,
    pub phi_b: Option<f64>,
    pub cos_sum: f64,
    pub degenerate: bool,
    pub note: Option<&'static str>,
}

/// Quadratic coefficients c in F ≈ 1 − cε².
#[derive(Debug, Clone, Serialize)]
pub struct Coefficients {
    pub two_loop: f64,
    pub single_loop: f64,
    pub single_shot: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    pub target: TargetEcho,
    pub two_loop: TwoLoopReport,
    pub single_loop: SingleLoopPath,
    pub single_shot: SingleShotPath,
    pub coefficients: Coefficients,
}

pub fn optimize(args: &TargetArgs) -> Result<OptimizeReport, CliError> {
    let target = target_gate(args)?;
    let TwoLoopSolution { path, degenerate } = solve_two_loop(&target, &constraints(args));
    let dec = phi_b_of(&path);
    let single_loop = solve_single_loop(&target);
    let single_shot = solve_single_shot(&target);
    let axis = target.axis();
    Ok(OptimizeReport {
        target: TargetEcho {
            theta_gate: target.theta_gate(),
            axis: [axis.x, axis.y, axis.z],
        },
        two_loop: TwoLoopReport {
            path,
            eta: dec.eta,
            phi_b: dec.phi_b,
            cos_sum: path.loop1.theta().cos() + path.loop2.theta().cos(),
            degenerate,
            note: degenerate.then_some(
                "identity target: both loops coincide and the rotation axis is not realised",
            ),
        },
        single_loop,
        single_shot,
        coefficients: Coefficients {
            two_loop: GatePath::TwoLoop(path).analytic_coefficient(),
            single_loop: GatePath::SingleLoop(single_loop).analytic_coefficient(),
            single_shot: GatePath::SingleShot(single_shot).analytic_coefficient(),
        },
    })
}
