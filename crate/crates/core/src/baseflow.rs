//! Stationary Poiseuille-type flow between the electrode walls.
//!
//! The stationary system reduces to one scalar unknown, the integration
//! constant `C̄` of the streamwise momentum balance: for a trial `C̄` the
//! stress `â₁₂` follows pointwise from `Ẑ â₁₂ = R(y, C̄)`, the normal stresses
//! from the closure algebra, the velocity by quadrature of the shear-rate law
//! from the lower wall, and temperature and induction by Green's-function
//! double quadrature with their Dirichlet data. A relaxed Picard loop makes
//! those consistent; a safeguarded secant on `C̄` then enforces no-slip on the
//! upper wall.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::config::{Grid, ModelParams};
use crate::error::{Error, Result};
use crate::numerics::{
    cumulative_simpson, derivative4, dirichlet_double_integral, second_derivative4, sup_diff,
    sup_norm,
};

/// Temperature-dependent relaxation factors at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationTerms {
    /// J(Z) = exp(Ē_A (Z − 1)/Z).
    pub j_of_z: f64,
    /// τ̄₀ = 1/(Z J(Z)).
    pub tau0_bar: f64,
    /// χ̂₀* = 1/τ̄₀ = Z J(Z).
    pub chi0_star: f64,
}

pub fn relaxation_time_terms(z: f64, e_a_bar: f64) -> Result<RelaxationTerms> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("temperature Z must be positive, got {z}")));
    }
    let j_of_z = (e_a_bar * (z - 1.0) / z).exp();
    let chi0_star = z * j_of_z;
    Ok(RelaxationTerms {
        j_of_z,
        tau0_bar: 1.0 / chi0_star,
        chi0_star,
    })
}

/// dχ̂₀*/dZ = J(Z)(1 + Ē_A/Z).
pub fn chi0_star_dz(z: f64, e_a_bar: f64) -> f64 {
    (e_a_bar * (z - 1.0) / z).exp() * (1.0 + e_a_bar / z)
}

const CLOSURE_MAX_NEWTON: usize = 50;
const CLOSURE_RESIDUAL_TOL: f64 = 1e-12;

/// Residuals of the closure algebra at (a11, a22) for shear stress squared `g`:
/// index 0 is the a22 equation, index 1 the a11 equation.
pub fn closure_residuals(a11: f64, a22: f64, g: f64, params: &ModelParams) -> [f64; 2] {
    let inv_w = 1.0 / params.w;
    let k = inv_w + params.k_bar() / 3.0 * (a11 + a22);
    let a2 = inv_w + a22;
    [
        k * a22 + params.beta * (g + a22 * a22),
        k * a11 + params.beta * (g + a11 * a11) - 2.0 * g * k / a2,
    ]
}

fn closure_newton(g: f64, params: &ModelParams, seed: (f64, f64)) -> Option<(f64, f64)> {
    let inv_w = 1.0 / params.w;
    let c = params.k_bar() / 3.0;
    let beta = params.beta;
    let (mut a11, mut a22) = seed;
    for _ in 0..CLOSURE_MAX_NEWTON {
        let a2 = inv_w + a22;
        if !(a2 > 0.0) {
            return None;
        }
        let k = inv_w + c * (a11 + a22);
        let f = closure_residuals(a11, a22, g, params);
        let j11 = c * a22;
        let j12 = c * a22 + k + 2.0 * beta * a22;
        let j21 = c * a11 + k + 2.0 * beta * a11 - 2.0 * g * c / a2;
        let j22 = c * a11 - 2.0 * g * c / a2 + 2.0 * g * k / (a2 * a2);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        // rows: (j11, j12) for the a22 equation, (j21, j22) for the a11 equation
        let d11 = (f[0] * j22 - f[1] * j12) / det;
        let d22 = (j11 * f[1] - j21 * f[0]) / det;
        a11 -= d11;
        a22 -= d22;
        if !(a11.is_finite() && a22.is_finite()) {
            return None;
        }
        let scale = 1.0 + a11.abs() + a22.abs();
        if d11.abs().max(d22.abs()) <= 4.0 * f64::EPSILON * scale {
            break;
        }
    }
    let r = closure_residuals(a11, a22, g, params);
    let ok = r[0].abs().max(r[1].abs()) < CLOSURE_RESIDUAL_TOL && inv_w + a22 > 0.0;
    ok.then_some((a11, a22))
}

/// Solves the closure algebra for (â₁₁, â₂₂) given ĝ = â₁₂², by Newton from
/// `seed`. If the seed does not converge, continues in ĝ from the origin so
/// the returned root stays on the branch that vanishes with ĝ.
pub fn closure_solve(g: f64, params: &ModelParams, seed: (f64, f64)) -> Result<(f64, f64)> {
    if !(g >= 0.0) || !g.is_finite() {
        return Err(Error::Domain(format!("closure needs finite g >= 0, got {g}")));
    }
    if g == 0.0 {
        return Ok((0.0, 0.0));
    }
    if let Some(root) = closure_newton(g, params, seed) {
        return Ok(root);
    }
    for steps in [8usize, 64, 512] {
        let mut state = (0.0, 0.0);
        let mut ok = true;
        for s in 1..=steps {
            match closure_newton(g * s as f64 / steps as f64, params, state) {
                Some(next) => state = next,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(state);
        }
    }
    Err(Error::BranchLoss {
        y: None,
        reason: format!("closure Newton lost the physical branch at g = {g:e}"),
    })
}

/// Tunables of the base-flow iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseFlowOptions {
    pub tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Initial under-relaxation factor for temperature and induction.
    pub relaxation: f64,
}

impl Default for BaseFlowOptions {
    fn default() -> Self {
        BaseFlowOptions {
            tol: 1e-10,
            max_outer: 60,
            max_inner: 2000,
            relaxation: 0.5,
        }
    }
}

/// Converged stationary flow on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseFlow {
    pub grid: Grid,
    pub params: ModelParams,
    pub u_hat: Vec<f64>,
    pub a11_hat: Vec<f64>,
    pub a12_hat: Vec<f64>,
    pub a22_hat: Vec<f64>,
    pub z_hat: Vec<f64>,
    pub l_hat: Vec<f64>,
    pub p_hat: Vec<f64>,
    /// Constant vertical field perturbation, equal to λ̂.
    pub m_hat: f64,
    pub c_bar: f64,
    /// Solver-side consistency residuals (sup norms), keyed by equation name.
    pub residuals: BTreeMap<String, f64>,
    pub outer_iterations: usize,
    pub inner_sweeps: usize,
}

/// Right-hand side of the integrated streamwise momentum balance,
/// R(y, C̄) = −(1 + λ̂) Re σ_m (L̂ + J⁺) + D̂ (1/2 − y) + C̄.
pub fn stress_potential(params: &ModelParams, y: f64, l: f64, c_bar: f64) -> f64 {
    -(1.0 + params.lambda_hat) * params.re * params.sigma_m * (l + params.j_plus)
        + params.d_hat() * (0.5 - y)
        + c_bar
}

/// Pointwise state derived from (Ẑ, L̂) at fixed C̄.
struct Kinematics {
    a11: Vec<f64>,
    a12: Vec<f64>,
    a22: Vec<f64>,
    du: Vec<f64>,
    u: Vec<f64>,
}

struct Solver<'a> {
    params: &'a ModelParams,
    grid: &'a Grid,
    opts: BaseFlowOptions,
    sweeps: usize,
}

impl Solver<'_> {
    fn kinematics(&self, c_bar: f64, z: &[f64], l: &[f64]) -> Result<Kinematics> {
        let p = self.params;
        let y = self.grid.nodes();
        let n = y.len();
        let mut a11 = vec![0.0; n];
        let mut a12 = vec![0.0; n];
        let mut a22 = vec![0.0; n];
        let mut du = vec![0.0; n];
        let mut seed = (0.0, 0.0);
        let inv_w = 1.0 / p.w;
        let kk = p.k_bar() / 3.0;
        for i in 0..n {
            let relax = relaxation_time_terms(z[i], p.e_a_bar)?;
            let s = stress_potential(p, y[i], l[i], c_bar) / z[i];
            let (b11, b22) = closure_solve(s * s, p, seed).map_err(|e| match e {
                Error::BranchLoss { reason, .. } => Error::BranchLoss { y: Some(y[i]), reason },
                other => other,
            })?;
            seed = (b11, b22);
            let k_tilde = inv_w + (kk + p.beta) * (b11 + b22);
            a11[i] = b11;
            a12[i] = s;
            a22[i] = b22;
            du[i] = relax.chi0_star * k_tilde * s / (inv_w + b22);
        }
        let u = cumulative_simpson(&du, self.grid.h());
        Ok(Kinematics { a11, a12, a22, du, u })
    }

    fn heat_source(&self, z: &[f64], l: &[f64], k: &Kinematics) -> Vec<f64> {
        let p = self.params;
        let mag = p.a_m * p.sigma_m * (1.0 + p.lambda_hat);
        (0..z.len())
            .map(|i| -(p.a_r * z[i] * k.a12[i] + mag * l[i]) * k.du[i])
            .collect()
    }

    fn updated_profiles(&self, z: &[f64], l: &[f64], k: &Kinematics) -> (Vec<f64>, Vec<f64>) {
        let p = self.params;
        let h = self.grid.h();
        let z_new =
            dirichlet_double_integral(&self.heat_source(z, l, k), h, 1.0 + p.theta_bar, 1.0);
        let induction: Vec<f64> =
            k.du.iter().map(|d| -(1.0 + p.lambda_hat) * d / p.b_m).collect();
        let l_new = dirichlet_double_integral(&induction, h, -p.j_minus, -p.j_plus);
        (z_new, l_new)
    }

    /// Relaxed Picard iteration on (Ẑ, L̂) at fixed C̄, starting from `state`.
    fn inner(&mut self, c_bar: f64, state: &mut (Vec<f64>, Vec<f64>)) -> Result<Kinematics> {
        let inner_tol = (0.01 * self.opts.tol).max(1e-14);
        let mut gamma = self.opts.relaxation;
        let mut last_change = f64::INFINITY;
        let mut decreasing = 0usize;
        for _ in 0..self.opts.max_inner {
            self.sweeps += 1;
            let (z, l) = (&state.0, &state.1);
            let kin = self.kinematics(c_bar, z, l)?;
            let (z_new, l_new) = self.updated_profiles(z, l, &kin);
            let change = sup_diff(&z_new, z).max(sup_diff(&l_new, l));
            if !change.is_finite() || change > 1e12 {
                break;
            }
            if change < inner_tol {
                state.0 = z_new;
                state.1 = l_new;
                return self.kinematics(c_bar, &state.0, &state.1);
            }
            if change < last_change {
                decreasing += 1;
                if decreasing >= 5 {
                    gamma = 1.0;
                }
            } else {
                decreasing = 0;
                gamma = self.opts.relaxation;
            }
            last_change = change;
            for (zi, zn) in state.0.iter_mut().zip(&z_new) {
                *zi += gamma * (zn - *zi);
            }
            for (li, ln) in state.1.iter_mut().zip(&l_new) {
                *li += gamma * (ln - *li);
            }
            if let Some(i) = state.0.iter().position(|&v| !(v > 0.0)) {
                return Err(Error::Domain(format!(
                    "temperature iterate left the positive range at y = {:.6}",
                    self.grid.nodes()[i]
                )));
            }
        }
        let mut residuals = BTreeMap::new();
        residuals.insert("picard_change".to_string(), last_change);
        Err(Error::NoConvergence {
            stage: format!("inner Picard loop (C = {c_bar})"),
            iterations: self.opts.max_inner,
            residuals,
        })
    }
}

struct Evaluation {
    c: f64,
    f: f64,
}

/// Solves the stationary problem with default iteration settings and the
/// given tolerance and outer budget.
pub fn solve_base_flow(
    params: &ModelParams,
    grid: &Grid,
    tol: f64,
    max_outer: usize,
) -> Result<BaseFlow> {
    let opts = BaseFlowOptions {
        tol,
        max_outer,
        ..BaseFlowOptions::default()
    };
    solve_base_flow_with(params, grid, &opts)
}

pub fn solve_base_flow_with(
    params: &ModelParams,
    grid: &Grid,
    opts: &BaseFlowOptions,
) -> Result<BaseFlow> {
    params.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::validation("tol", "must be > 0"));
    }
    if !(opts.relaxation > 0.0 && opts.relaxation <= 1.0) {
        return Err(Error::validation("relaxation", "must lie in (0, 1]"));
    }
    let y = grid.nodes();
    let mut solver = Solver {
        params,
        grid,
        opts: *opts,
        sweeps: 0,
    };
    let initial = (
        y.iter().map(|&t| 1.0 + params.theta_bar * (0.5 - t)).collect::<Vec<_>>(),
        y.iter()
            .map(|&t| -params.j_minus + (params.j_minus - params.j_plus) * (t + 0.5))
            .collect::<Vec<_>>(),
    );
    let mut warm = initial.clone();
    let mut outer_iterations = 0usize;

    // u(1/2) as a function of C̄; warm-started from the last successful solve.
    let mut evaluate = |c: f64, warm: &mut (Vec<f64>, Vec<f64>)| -> Result<(f64, Kinematics)> {
        let mut state = warm.clone();
        let kin = solver.inner(c, &mut state)?;
        *warm = state;
        Ok((*kin.u.last().expect("non-empty grid"), kin))
    };

    let root_tol = opts.tol;
    let (f0, kin0) = evaluate(0.0, &mut warm)?;
    outer_iterations += 1;
    let (c_bar, kin) = if f0.abs() < root_tol {
        (0.0, kin0)
    } else {
        let scale = 1.0_f64
            .max(params.d_hat().abs())
            .max(
                params.sigma_m
                    * params.re
                    * (1.0 + params.lambda_hat).abs()
                    * (params.j_plus.abs() + params.j_minus.abs()),
            );
        let origin = Evaluation { c: 0.0, f: f0 };
        let (mut lo, mut hi) =
            bracket(&mut evaluate, &mut warm, &origin, scale, &mut outer_iterations)?;
        // safeguarded secant inside the bracket [lo, hi] with f(lo) f(hi) < 0
        let mut prev = Evaluation { c: lo.c, f: lo.f };
        let mut cur = Evaluation { c: hi.c, f: hi.f };
        let mut last_kin = None;
        for _ in 0..opts.max_outer {
            let mut c_next = cur.c - cur.f * (cur.c - prev.c) / (cur.f - prev.f);
            let (a, b) = (lo.c.min(hi.c), lo.c.max(hi.c));
            let width = b - a;
            if !c_next.is_finite() || c_next <= a + 1e-3 * width || c_next >= b - 1e-3 * width {
                c_next = 0.5 * (lo.c + hi.c);
            }
            let (f_next, kin_next) = match evaluate(c_next, &mut warm) {
                Ok(v) => v,
                Err(e) => {
                    // fall back to bisection once; a failure there is final
                    let mid = 0.5 * (lo.c + hi.c);
                    if mid == c_next {
                        return Err(e);
                    }
                    c_next = mid;
                    evaluate(c_next, &mut warm)?
                }
            };
            outer_iterations += 1;
            let next = Evaluation { c: c_next, f: f_next };
            if f_next.abs() < root_tol {
                last_kin = Some((c_next, kin_next));
                break;
            }
            if (f_next < 0.0) == (lo.f < 0.0) {
                lo = Evaluation { c: next.c, f: next.f };
            } else {
                hi = Evaluation { c: next.c, f: next.f };
            }
            prev = cur;
            cur = next;
            if (hi.c - lo.c).abs() <= 4.0 * f64::EPSILON * (1.0 + cur.c.abs()) {
                last_kin = Some((c_next, kin_next));
                break;
            }
        }
        match last_kin {
            Some(v) => v,
            None => {
                let mut residuals = BTreeMap::new();
                residuals.insert("upper_wall_velocity".to_string(), cur.f.abs());
                return Err(Error::NoConvergence {
                    stage: "outer secant on C".to_string(),
                    iterations: opts.max_outer,
                    residuals,
                });
            }
        }
    };

    let (z, l) = warm;
    let residuals = consistency_residuals(&solver, c_bar, &z, &l, &kin);
    let p_hat = pressure_profile(params, grid, &z, &l, &kin.a22);
    Ok(BaseFlow {
        grid: grid.clone(),
        params: *params,
        u_hat: kin.u,
        a11_hat: kin.a11,
        a12_hat: kin.a12,
        a22_hat: kin.a22,
        z_hat: z,
        l_hat: l,
        p_hat,
        m_hat: params.lambda_hat,
        c_bar,
        residuals,
        outer_iterations,
        inner_sweeps: solver.sweeps,
    })
}

/// Expands outward from C̄ = 0 until u(1/2) changes sign. Failed evaluations
/// (lost branch, no convergence) pull the trial point back toward the origin.
fn bracket<F>(
    evaluate: &mut F,
    warm: &mut (Vec<f64>, Vec<f64>),
    origin: &Evaluation,
    scale: f64,
    count: &mut usize,
) -> Result<(Evaluation, Evaluation)>
where
    F: FnMut(f64, &mut (Vec<f64>, Vec<f64>)) -> Result<(f64, Kinematics)>,
{
    let preferred = if origin.f > 0.0 { -1.0 } else { 1.0 };
    let mut widest = 0.0_f64;
    for direction in [preferred, -preferred] {
        let mut inner = Evaluation { c: origin.c, f: origin.f };
        let mut step = 2.0 * scale;
        let mut doublings = 0;
        let mut retreats = 0;
        while doublings <= 8 && retreats <= 40 {
            let c = inner.c + direction * step;
            widest = widest.max(c.abs());
            *count += 1;
            match evaluate(c, warm) {
                Ok((f, _)) => {
                    if (f < 0.0) != (origin.f < 0.0) || f == 0.0 {
                        return Ok((inner, Evaluation { c, f }));
                    }
                    inner = Evaluation { c, f };
                    step *= 2.0;
                    doublings += 1;
                }
                Err(_) => {
                    step *= 0.5;
                    retreats += 1;
                }
            }
        }
    }
    Err(Error::BracketFailure {
        lo: -widest,
        hi: widest,
    })
}

/// Stationary vertical momentum, anchored at P̂(0) = 0.
fn pressure_profile(
    params: &ModelParams,
    grid: &Grid,
    z: &[f64],
    l: &[f64],
    a22: &[f64],
) -> Vec<f64> {
    let buoyancy: Vec<f64> = z.iter().map(|zi| params.gr * (zi - 1.0)).collect();
    let integral = cumulative_simpson(&buoyancy, grid.h());
    let mid = grid.mid_index();
    let q_mid = params.sigma_m * l[mid] * l[mid] / 2.0 - z[mid] * a22[mid] / params.re;
    (0..z.len())
        .map(|i| {
            let q = q_mid + integral[i] - integral[mid];
            q - params.sigma_m * l[i] * l[i] / 2.0 + z[i] * a22[i] / params.re
        })
        .collect()
}

fn consistency_residuals(
    solver: &Solver,
    c_bar: f64,
    z: &[f64],
    l: &[f64],
    kin: &Kinematics,
) -> BTreeMap<String, f64> {
    let p = solver.params;
    let y = solver.grid.nodes();
    let mut out = BTreeMap::new();
    let identity: Vec<f64> = (0..y.len())
        .map(|i| z[i] * kin.a12[i] - stress_potential(p, y[i], l[i], c_bar))
        .collect();
    out.insert("stress_identity".to_string(), sup_norm(&identity));
    let (mut c22, mut c11) = (0.0_f64, 0.0_f64);
    for i in 0..y.len() {
        let r = closure_residuals(kin.a11[i], kin.a22[i], kin.a12[i].powi(2), p);
        c22 = c22.max(r[0].abs());
        c11 = c11.max(r[1].abs());
    }
    out.insert("closure_a22".to_string(), c22);
    out.insert("closure_a11".to_string(), c11);
    out.insert(
        "upper_wall_velocity".to_string(),
        kin.u.last().copied().unwrap_or(0.0).abs(),
    );
    let (z_new, l_new) = solver.updated_profiles(z, l, kin);
    out.insert("heat".to_string(), sup_diff(&z_new, z));
    out.insert("induction".to_string(), sup_diff(&l_new, l));
    out
}

impl BaseFlow {
    pub fn n_nodes(&self) -> usize {
        self.grid.n_nodes()
    }

    /// CSV with a `#` comment header carrying C̄, the solver residuals, the
    /// parameter hash and, when given, the run manifest hash.
    pub fn to_csv(&self, manifest_hash: Option<&str>) -> String {
        let mut out = String::new();
        out.push_str("# polychan base flow\n");
        if let Some(h) = manifest_hash {
            let _ = writeln!(out, "# manifest_hash={h}");
        }
        let _ = writeln!(out, "# params_hash={}", self.params.hash_hex());
        let _ = writeln!(out, "# n_nodes={}", self.n_nodes());
        let _ = writeln!(out, "# C_bar={}", self.c_bar);
        let _ = writeln!(out, "# M_hat={}", self.m_hat);
        for (name, value) in &self.residuals {
            let _ = writeln!(out, "# residual.{name}={value:e}");
        }
        out.push_str("y,u,a11,a12,a22,Z,L,P\n");
        for i in 0..self.n_nodes() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.grid.nodes()[i],
                self.u_hat[i],
                self.a11_hat[i],
                self.a12_hat[i],
                self.a22_hat[i],
                self.z_hat[i],
                self.l_hat[i],
                self.p_hat[i]
            );
        }
        out
    }
}

/// Independent check of a flow: substitutes the profiles into each
/// stationary equation with fourth-order centered differences on interior
/// nodes (two nodes away from each wall). Pointwise equations are checked on
/// every node.
pub fn base_flow_residuals(flow: &BaseFlow, params: &ModelParams) -> BTreeMap<String, f64> {
    let p = params;
    let n = flow.n_nodes();
    let h = flow.grid.h();
    let y = flow.grid.nodes();
    let (z, l, u) = (&flow.z_hat, &flow.l_hat, &flow.u_hat);
    let (a11, a12, a22) = (&flow.a11_hat, &flow.a12_hat, &flow.a22_hat);
    let one_lambda = 1.0 + p.lambda_hat;
    let inv_w = 1.0 / p.w;

    let flux: Vec<f64> = (0..n)
        .map(|i| z[i] * a12[i] + one_lambda * p.sigma_m * p.re * l[i])
        .collect();
    let vertical: Vec<f64> = (0..n)
        .map(|i| flow.p_hat[i] + p.sigma_m * l[i] * l[i] / 2.0 - z[i] * a22[i] / p.re)
        .collect();
    let d_flux = derivative4(&flux, h);
    let d_vertical = derivative4(&vertical, h);
    let du = derivative4(u, h);
    let d2z = second_derivative4(&minus_chord(z), h);
    let d2l = second_derivative4(&minus_chord(l), h);

    let mut res: BTreeMap<String, f64> = BTreeMap::new();
    let mut put = |name: &str, v: f64| {
        let e = res.entry(name.to_string()).or_insert(0.0);
        *e = e.max(v.abs());
    };
    for i in 2..n - 2 {
        put("momentum_x", d_flux[i] + p.d_hat());
        put("momentum_y", d_vertical[i] - p.gr * (z[i] - 1.0));
        let chi = z[i] * (p.e_a_bar * (z[i] - 1.0) / z[i]).exp();
        let k_tilde = inv_w + (p.k_bar() / 3.0 + p.beta) * (a11[i] + a22[i]);
        put("shear_rate", du[i] - chi * k_tilde * a12[i] / (inv_w + a22[i]));
        put(
            "heat",
            d2z[i] + (p.a_r * z[i] * a12[i] + p.a_m * p.sigma_m * one_lambda * l[i]) * du[i],
        );
        put("induction", p.b_m * d2l[i] + one_lambda * du[i]);
    }
    for i in 0..n {
        let r = closure_residuals(a11[i], a22[i], a12[i] * a12[i], p);
        put("closure_a22", r[0]);
        put("closure_a11", r[1]);
        put(
            "stress_identity",
            z[i] * a12[i] - stress_potential(p, y[i], l[i], flow.c_bar),
        );
    }
    put("no_slip_lower", u[0]);
    put("no_slip_upper", u[n - 1]);
    res
}

/// Profile minus the straight line through its wall values; same second
/// derivative, smaller magnitude, so less cancellation in the stencil.
fn minus_chord(f: &[f64]) -> Vec<f64> {
    let m = (f.len() - 1) as f64;
    let (a, b) = (f[0], f[f.len() - 1]);
    f.iter()
        .enumerate()
        .map(|(i, v)| v - (a + (b - a) * i as f64 / m))
        .collect()
}

/// Names of the residuals that discretize a differential equation (as
/// opposed to pointwise algebraic identities).
pub const DIFFERENTIAL_RESIDUALS: [&str; 5] =
    ["momentum_x", "momentum_y", "shear_rate", "heat", "induction"];
