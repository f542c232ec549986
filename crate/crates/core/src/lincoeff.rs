//! Coefficient profiles of the linearized problem around a stationary flow.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::baseflow::{chi0_star_dz, BaseFlow};
use crate::config::{Grid, ModelParams};
use crate::error::{Error, Result};
use crate::numerics::{derivative4, second_derivative4};

/// Per-node profiles of every coefficient entering the perturbation
/// equations. Stress-like quantities with an `alpha` prefix are scaled by
/// 1/Re; the `r` prefixed relaxation entries use the unscaled stresses.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCoefficients {
    pub grid: Grid,
    pub params: ModelParams,
    pub alpha11: Vec<f64>,
    pub alpha12: Vec<f64>,
    pub alpha22: Vec<f64>,
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub alpha11_prime: Vec<f64>,
    pub alpha12_prime: Vec<f64>,
    pub alpha22_prime: Vec<f64>,
    pub chi0_star: Vec<f64>,
    /// dχ̂₀*/dZ along the profile.
    pub chi0_star_dz: Vec<f64>,
    pub k_i_hat: Vec<f64>,
    pub k_tilde_i_hat: Vec<f64>,
    pub r33: Vec<f64>,
    pub r34: Vec<f64>,
    pub r35: Vec<f64>,
    pub r43: Vec<f64>,
    pub r44: Vec<f64>,
    pub r45: Vec<f64>,
    pub r53: Vec<f64>,
    pub r54: Vec<f64>,
    pub r55: Vec<f64>,
    pub r11: Vec<f64>,
    pub r12: Vec<f64>,
    pub a11_hat: Vec<f64>,
    pub a12_hat: Vec<f64>,
    pub a22_hat: Vec<f64>,
    pub u_hat: Vec<f64>,
    pub u_hat_prime: Vec<f64>,
    pub z_hat: Vec<f64>,
    pub z_hat_prime: Vec<f64>,
    pub l_hat: Vec<f64>,
    pub l_hat_prime: Vec<f64>,
    pub l_hat_second: Vec<f64>,
    /// 1/√(Ẑα̂₂).
    pub inv_sqrt_z_alpha2: Vec<f64>,
    /// (√(Ẑ/α̂₂))′.
    pub sqrt_ratio_prime: Vec<f64>,
    /// α₀ = (â₁₂A_rẐ/Pr + A_mσ_mL̂(1+λ̂)/Pr)/α̂₂.
    pub alpha0: Vec<f64>,
    /// ω-free part of d₁₁ (its real part for every ω).
    pub d11_real_part: Vec<f64>,
    pub d22_real_part: Vec<f64>,
}

pub fn build_coefficients(flow: &BaseFlow, params: &ModelParams) -> Result<LinearCoefficients> {
    let n = flow.n_nodes();
    let profiles = [
        &flow.u_hat, &flow.a11_hat, &flow.a12_hat, &flow.a22_hat, &flow.z_hat, &flow.l_hat,
    ];
    if profiles.iter().any(|v| v.len() != n) {
        return Err(Error::Assembly("base-flow profiles do not match the grid".into()));
    }
    let p = params;
    let h = flow.grid.h();
    let y = flow.grid.nodes();
    let re = p.re;
    let inv_w = 1.0 / p.w;
    let kk = p.k_bar() / 3.0;
    let kappa_sq = p.kappa_sq();

    let scaled = |v: &[f64]| v.iter().map(|a| a / re).collect::<Vec<_>>();
    let alpha11 = scaled(&flow.a11_hat);
    let alpha12 = scaled(&flow.a12_hat);
    let alpha22 = scaled(&flow.a22_hat);
    let alpha1: Vec<f64> = alpha11.iter().map(|a| a + kappa_sq).collect();
    let alpha2: Vec<f64> = alpha22.iter().map(|a| a + kappa_sq).collect();

    let (mut min_alpha2, mut at) = (f64::INFINITY, 0.0);
    for (a, &yy) in alpha2.iter().zip(y) {
        if *a < min_alpha2 {
            min_alpha2 = *a;
            at = yy;
        }
    }
    if !(min_alpha2 > 0.0) {
        return Err(Error::SingularTransform { min_alpha2, y: at });
    }
    if flow.z_hat.iter().any(|&z| !(z > 0.0)) {
        return Err(Error::Domain("base temperature must stay positive".into()));
    }

    let z = &flow.z_hat;
    let (a11, a12, a22) = (&flow.a11_hat, &flow.a12_hat, &flow.a22_hat);
    let u_hat_prime = derivative4(&flow.u_hat, h);
    let chi: Vec<f64> =
        z.iter().map(|&zi| zi * (p.e_a_bar * (zi - 1.0) / zi).exp()).collect();
    let chi_dz: Vec<f64> = z.iter().map(|&zi| chi0_star_dz(zi, p.e_a_bar)).collect();
    let k_i: Vec<f64> = (0..n).map(|i| inv_w + kk * (a11[i] + a22[i])).collect();
    let k_t: Vec<f64> = (0..n).map(|i| k_i[i] + p.beta * (a11[i] + a22[i])).collect();

    let map = |f: &dyn Fn(usize) -> f64| (0..n).map(f).collect::<Vec<f64>>();
    let r33 = map(&|i| chi[i] * (k_i[i] + a11[i] * (kk + 2.0 * p.beta)));
    let r34 = map(&|i| -2.0 * u_hat_prime[i] + 2.0 * p.beta * a12[i] * chi[i]);
    let r35 = map(&|i| kk * a11[i] * chi[i]);
    let r43 = map(&|i| a12[i] * chi[i] * (kk + p.beta));
    let r44 = map(&|i| chi[i] * k_t[i]);
    let r45 = map(&|i| -u_hat_prime[i] + a12[i] * chi[i] * (kk + p.beta));
    let r53 = map(&|i| chi[i] * a22[i] * kk);
    let r54 = map(&|i| 2.0 * p.beta * a12[i] * chi[i]);
    let r55 = map(&|i| chi[i] * (k_i[i] + a22[i] * (kk + 2.0 * p.beta)));
    let r11 = map(&|i| chi_dz[i] * 2.0 * alpha12[i] * alpha12[i] * k_t[i] / alpha2[i]);
    let r12 = map(&|i| chi_dz[i] * alpha12[i] * k_t[i]);

    let inv_sqrt = map(&|i| 1.0 / (z[i] * alpha2[i]).sqrt());
    let sqrt_ratio = map(&|i| (z[i] / alpha2[i]).sqrt());
    let sqrt_ratio_prime = derivative4(&sqrt_ratio, h);
    let z_hat_prime = derivative4(z, h);
    let one_lambda = 1.0 + p.lambda_hat;
    let alpha0 = map(&|i| {
        (a12[i] * p.a_r * z[i] / p.pr + p.a_m * p.sigma_m * flow.l_hat[i] * one_lambda / p.pr)
            / alpha2[i]
    });

    // ω-free parts of the two diagonal entries
    let common = map(&|i| {
        -inv_sqrt[i] * (0.5 * z_hat_prime[i] / sqrt_ratio[i] + 0.5 * alpha2[i] * sqrt_ratio_prime[i])
            - 0.5 * alpha12[i] * p.pr * alpha0[i] / sqrt_ratio[i]
            - p.sigma_m / (2.0 * p.b_m) * one_lambda * one_lambda * inv_sqrt[i]
    });
    let drift = map(&|i| r43[i] * alpha12[i] / alpha2[i] + r44[i] / 2.0);
    let d11_real_part = map(&|i| common[i] - inv_sqrt[i] * drift[i]);
    let d22_real_part = map(&|i| common[i] + inv_sqrt[i] * drift[i]);

    let coeffs = LinearCoefficients {
        grid: flow.grid.clone(),
        params: *p,
        alpha11_prime: derivative4(&alpha11, h),
        alpha12_prime: derivative4(&alpha12, h),
        alpha22_prime: derivative4(&alpha22, h),
        alpha11,
        alpha12,
        alpha22,
        alpha1,
        alpha2,
        chi0_star: chi,
        chi0_star_dz: chi_dz,
        k_i_hat: k_i,
        k_tilde_i_hat: k_t,
        r33,
        r34,
        r35,
        r43,
        r44,
        r45,
        r53,
        r54,
        r55,
        r11,
        r12,
        a11_hat: a11.clone(),
        a12_hat: a12.clone(),
        a22_hat: a22.clone(),
        u_hat: flow.u_hat.clone(),
        u_hat_prime,
        z_hat: z.clone(),
        z_hat_prime,
        l_hat: flow.l_hat.clone(),
        l_hat_prime: derivative4(&flow.l_hat, h),
        l_hat_second: second_derivative4(&flow.l_hat, h),
        inv_sqrt_z_alpha2: inv_sqrt,
        sqrt_ratio_prime,
        alpha0,
        d11_real_part,
        d22_real_part,
    };
    coeffs.check_definitions()?;
    Ok(coeffs)
}

impl LinearCoefficients {
    pub fn n_nodes(&self) -> usize {
        self.grid.n_nodes()
    }

    /// Recomputes R₄₃, R₄₄ and α̂ᵢ by a second path and compares.
    fn check_definitions(&self) -> Result<()> {
        let p = &self.params;
        let kk = p.k_bar() / 3.0;
        for i in 0..self.n_nodes() {
            let r44 = self.chi0_star[i] * self.k_tilde_i_hat[i];
            let r43 = self.a12_hat[i] * self.chi0_star[i] * (kk + p.beta);
            let a1 = (self.a11_hat[i] + 1.0 / p.w) / p.re;
            let a2 = (self.a22_hat[i] + 1.0 / p.w) / p.re;
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
            if !(close(r44, self.r44[i])
                && close(r43, self.r43[i])
                && close(a1, self.alpha1[i])
                && close(a2, self.alpha2[i]))
            {
                return Err(Error::Assembly(format!(
                    "coefficient definitions disagree at node {i}"
                )));
            }
        }
        Ok(())
    }

    /// R₄₃α̂₁₂/α̂₂ + R₄₄/2, the integrand weight shared by the drift and the
    /// stability margin.
    pub fn drift_weight(&self, i: usize) -> f64 {
        self.r43[i] * self.alpha12[i] / self.alpha2[i] + self.r44[i] / 2.0
    }

    /// Writes all coefficient profiles as CSV.
    pub fn to_csv(&self, manifest_hash: Option<&str>) -> String {
        let columns: [(&str, &Vec<f64>); 27] = [
            ("alpha11", &self.alpha11),
            ("alpha12", &self.alpha12),
            ("alpha22", &self.alpha22),
            ("alpha1", &self.alpha1),
            ("alpha2", &self.alpha2),
            ("chi0_star", &self.chi0_star),
            ("chi0_star_dz", &self.chi0_star_dz),
            ("K_I_hat", &self.k_i_hat),
            ("K_tilde_I_hat", &self.k_tilde_i_hat),
            ("R33", &self.r33),
            ("R34", &self.r34),
            ("R35", &self.r35),
            ("R43", &self.r43),
            ("R44", &self.r44),
            ("R45", &self.r45),
            ("R53", &self.r53),
            ("R54", &self.r54),
            ("R55", &self.r55),
            ("r11", &self.r11),
            ("r12", &self.r12),
            ("u_hat", &self.u_hat),
            ("u_hat_prime", &self.u_hat_prime),
            ("Z_hat", &self.z_hat),
            ("Z_hat_prime", &self.z_hat_prime),
            ("L_hat", &self.l_hat),
            ("d11_real_part", &self.d11_real_part),
            ("d22_real_part", &self.d22_real_part),
        ];
        let mut out = String::new();
        if let Some(h) = manifest_hash {
            let _ = writeln!(out, "# manifest_hash={h}");
        }
        let _ = writeln!(out, "# params_hash={}", self.params.hash_hex());
        out.push('y');
        for (name, _) in &columns {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for i in 0..self.n_nodes() {
            out.push_str(&self.grid.nodes()[i].to_string());
            for (_, col) in &columns {
                let _ = write!(out, ",{}", col[i]);
            }
            out.push('\n');
        }
        out
    }
}

/// Diagonal entries d₁₁(y), d₂₂(y) of the transformed first-order system at
/// streamwise wavenumber ω. Both share the same ω-dependent imaginary part.
pub fn d_diagonals(coeffs: &LinearCoefficients, omega: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = coeffs.n_nodes();
    let mut d11 = Vec::with_capacity(n);
    let mut d22 = Vec::with_capacity(n);
    for i in 0..n {
        let s = coeffs.inv_sqrt_z_alpha2[i];
        let ratio = (coeffs.z_hat[i] / coeffs.alpha2[i]).sqrt();
        let im = -s * omega * (coeffs.u_hat[i] + coeffs.alpha12[i] * ratio);
        d11.push(Complex64::new(coeffs.d11_real_part[i], im));
        d22.push(Complex64::new(coeffs.d22_real_part[i], im));
    }
    (d11, d22)
}
