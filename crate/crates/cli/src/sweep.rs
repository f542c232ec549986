//! Parameter sweeps of the stability margin with sign-change bisection.
//!
//! Each axis value runs its own base-flow → coefficients → margin pipeline,
//! so points are independent and the output does not depend on how many
//! threads evaluate them.

use std::fmt::Write;

use num_complex::Complex64;
use polychan_core::asymptotics::{drift_integral, Classification};
use polychan_core::config::{SweepOutput, SweepSpec};
use polychan_core::{build_coefficients, solve_base_flow, stability_margin, Grid, StabilityReport};
use rayon::prelude::*;

/// Axis resolution at which boundary bisection stops.
pub const BOUNDARY_TOL: f64 = 1e-6;
const MAX_OUTER: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub report: Option<StabilityReport>,
    pub b_drift: Option<Complex64>,
    /// Name of the failure for points without a converged base flow.
    pub error: Option<&'static str>,
}

impl SweepPoint {
    pub fn classification(&self) -> Option<Classification> {
        self.report.map(|r| r.classification)
    }
}

/// Sign change of the margin located between two axis values.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    pub lo: f64,
    pub hi: f64,
    pub below: Classification,
    pub above: Classification,
    /// Empty when bisection reached [`BOUNDARY_TOL`]; otherwise the failure
    /// that stopped it.
    pub status: String,
}

impl Boundary {
    pub fn location(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: String,
    pub outputs: Vec<SweepOutput>,
    pub points: Vec<SweepPoint>,
    pub boundaries: Vec<Boundary>,
}

pub fn evaluate_point(spec: &SweepSpec, value: f64, grid: &Grid, tol: f64) -> SweepPoint {
    let run = || -> polychan_core::Result<(StabilityReport, Complex64)> {
        let params = spec.fixed.with(&spec.axis, value)?;
        params.validate()?;
        let flow = solve_base_flow(&params, grid, tol, MAX_OUTER)?;
        let coeffs = build_coefficients(&flow, &params)?;
        Ok((stability_margin(&coeffs), drift_integral(&coeffs, params.omega)))
    };
    match run() {
        Ok((report, b)) => SweepPoint {
            value,
            report: Some(report),
            b_drift: Some(b),
            error: None,
        },
        Err(e) => SweepPoint {
            value,
            report: None,
            b_drift: None,
            error: Some(e.kind()),
        },
    }
}

fn bisect(spec: &SweepSpec, a: &SweepPoint, b: &SweepPoint, grid: &Grid, tol: f64) -> Boundary {
    let below = a.classification().expect("bisection starts from converged points");
    let above = b.classification().expect("bisection starts from converged points");
    let (mut lo, mut hi) = (a.value, b.value);
    let mut status = String::new();
    while hi - lo >= BOUNDARY_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = evaluate_point(spec, mid, grid, tol);
        match p.classification() {
            Some(c) if c == below => lo = mid,
            Some(_) => hi = mid,
            None => {
                status = p.error.unwrap_or("unknown").to_string();
                break;
            }
        }
    }
    Boundary {
        lo,
        hi,
        below,
        above,
        status,
    }
}

/// Evaluates every axis value and bisects each sign change of the margin
/// between neighbouring converged points. `jobs` sets the worker count
/// (`None` uses all cores).
pub fn run_sweep(spec: &SweepSpec, grid: &Grid, tol: f64, jobs: Option<usize>) -> SweepResult {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .expect("thread pool builds");
    let values = spec.axis_values();
    pool.install(|| {
        let points: Vec<SweepPoint> =
            values.par_iter().map(|&v| evaluate_point(spec, v, grid, tol)).collect();
        let pairs: Vec<(usize, usize)> = (1..points.len())
            .filter(|&i| {
                matches!(
                    (points[i - 1].classification(), points[i].classification()),
                    (Some(a), Some(b)) if a != b
                )
            })
            .map(|i| (i - 1, i))
            .collect();
        let boundaries = pairs
            .par_iter()
            .map(|&(i, j)| bisect(spec, &points[i], &points[j], grid, tol))
            .collect();
        SweepResult {
            axis: spec.axis.clone(),
            outputs: spec.outputs.clone(),
            points,
            boundaries,
        }
    })
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| x.to_string())
}

impl SweepResult {
    fn wants(&self, o: SweepOutput) -> bool {
        self.outputs.contains(&o)
    }

    /// One row per axis value, in ascending axis order. Margin columns and
    /// A_phase are always present; B and the branch real part on request.
    pub fn to_csv(&self, manifest_hash: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# manifest_hash={manifest_hash}");
        let _ = writeln!(s, "# axis={}", self.axis);
        let mut header = format!("{},margin_form_a,margin_form_b,classification,discrepancy,a_phase", self.axis);
        if self.wants(SweepOutput::BDrift) {
            header.push_str(",re_b,im_b");
        }
        if self.wants(SweepOutput::ReLambda) {
            header.push_str(",re_lambda");
        }
        header.push_str(",status");
        let _ = writeln!(s, "{header}");
        for p in &self.points {
            let r = p.report;
            let mut row = format!(
                "{},{},{},{},{},{}",
                p.value,
                num(r.map(|r| r.margin_form_a)),
                num(r.map(|r| r.margin_form_b)),
                r.map_or("NaN", |r| r.classification.name()),
                num(r.map(|r| r.discrepancy)),
                num(r.map(|r| r.a_phase)),
            );
            if self.wants(SweepOutput::BDrift) {
                let _ = write!(row, ",{},{}", num(p.b_drift.map(|b| b.re)), num(p.b_drift.map(|b| b.im)));
            }
            if self.wants(SweepOutput::ReLambda) {
                let re = match (p.b_drift, r) {
                    (Some(b), Some(r)) => Some(b.re / r.a_phase),
                    _ => None,
                };
                let _ = write!(row, ",{}", num(re));
            }
            let _ = writeln!(s, "{row},{}", p.error.unwrap_or("ok"));
        }
        s
    }

    pub fn boundaries_csv(&self, manifest_hash: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# manifest_hash={manifest_hash}");
        let _ = writeln!(s, "# axis={}", self.axis);
        s.push_str("lo,hi,boundary,below,above,status\n");
        for b in &self.boundaries {
            let status = if b.status.is_empty() { "ok" } else { &b.status };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                b.lo,
                b.hi,
                b.location(),
                b.below.name(),
                b.above.name(),
                status
            );
        }
        s
    }
}
