//! Large-|λ| eigenvalue asymptotics, the necessary stability condition and
//! the leading-order dispersion relation.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lincoeff::{d_diagonals, LinearCoefficients};
use crate::numerics::simpson;

/// ∫ 1/√(Ẑα̂₂) dξ over the channel.
pub fn phase_integral(coeffs: &LinearCoefficients) -> f64 {
    simpson(&coeffs.inv_sqrt_z_alpha2, coeffs.grid.h())
}

/// ∫ (1/√(Ẑα̂₂)) (iωû + R₄₃α̂₁₂/α̂₂ + R₄₄/2) dξ. The real part does not
/// depend on ω, and is computed from the real integrand alone so it is
/// bit-identical across ω.
pub fn drift_integral(coeffs: &LinearCoefficients, omega: f64) -> Complex64 {
    let n = coeffs.n_nodes();
    let h = coeffs.grid.h();
    let s = &coeffs.inv_sqrt_z_alpha2;
    let re: Vec<f64> = (0..n).map(|i| s[i] * coeffs.drift_weight(i)).collect();
    let im: Vec<f64> = (0..n).map(|i| s[i] * omega * coeffs.u_hat[i]).collect();
    Complex64::new(simpson(&re, h), simpson(&im, h))
}

/// How a printed asymptotic eigenvalue maps onto the spectrum of the
/// discretized problem. The printed formula leaves the sign of the drift
/// and the orientation of the ansatz open; the oracle picks one empirically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    AsPrinted,
    Conjugate,
    Negated,
    NegatedConjugate,
}

impl SignConvention {
    pub const ALL: [SignConvention; 4] = [
        SignConvention::AsPrinted,
        SignConvention::Conjugate,
        SignConvention::Negated,
        SignConvention::NegatedConjugate,
    ];

    pub fn apply(self, lambda: Complex64) -> Complex64 {
        match self {
            SignConvention::AsPrinted => lambda,
            SignConvention::Conjugate => lambda.conj(),
            SignConvention::Negated => -lambda,
            SignConvention::NegatedConjugate => -lambda.conj(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SignConvention::AsPrinted => "as_printed",
            SignConvention::Conjugate => "conjugate",
            SignConvention::Negated => "negated",
            SignConvention::NegatedConjugate => "negated_conjugate",
        }
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// λ_k = (B + kπi)/A for a range of branch indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenFamily {
    pub omega: f64,
    pub k_list: Vec<i64>,
    pub lambdas: Vec<Complex64>,
    pub a_phase: f64,
    pub b_drift: Complex64,
}

impl EigenFamily {
    /// Im-spacing π/A between consecutive branches.
    pub fn spacing(&self) -> f64 {
        PI / self.a_phase
    }

    /// One CSV row per branch: omega,k,re_lambda,im_lambda.
    pub fn to_csv(&self, manifest_hash: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(h) = manifest_hash {
            out.push_str(&format!("# manifest_hash={h}\n"));
        }
        out.push_str(&format!("# A_phase={}\n# B_drift={},{}\n", self.a_phase, self.b_drift.re, self.b_drift.im));
        out.push_str("omega,k,re_lambda,im_lambda\n");
        for (k, l) in self.k_list.iter().zip(&self.lambdas) {
            out.push_str(&format!("{},{},{},{}\n", self.omega, k, l.re, l.im));
        }
        out
    }
}

pub fn asymptotic_eigenvalues(
    coeffs: &LinearCoefficients,
    omega: f64,
    k_lo: i64,
    k_hi: i64,
) -> Result<EigenFamily> {
    if k_lo > k_hi {
        return Err(Error::validation("k_range", format!("empty range {k_lo}..={k_hi}")));
    }
    let a = phase_integral(coeffs);
    if !(a > 0.0) {
        return Err(Error::Domain(format!("phase integral must be positive, got {a}")));
    }
    let b = drift_integral(coeffs, omega);
    let re = b.re / a;
    let k_list: Vec<i64> = (k_lo..=k_hi).collect();
    let lambdas = k_list
        .iter()
        .map(|&k| Complex64::new(re, (b.im + k as f64 * PI) / a))
        .collect();
    Ok(EigenFamily {
        omega,
        k_list,
        lambdas,
        a_phase: a,
        b_drift: b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    NecessaryConditionMet,
    Violated,
}

impl Classification {
    pub fn from_margin(margin: f64) -> Self {
        if margin > 0.0 {
            Classification::Violated
        } else {
            Classification::NecessaryConditionMet
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Classification::NecessaryConditionMet => "necessary-condition-met",
            Classification::Violated => "violated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    /// A⁻¹ ∫ (1/√(Ẑα̂₂)) (R₄₃α̂₁₂/α̂₂ + R₄₄/2) dξ.
    pub margin_form_a: f64,
    /// ∫ (χ̂₀*/√(Ẑα̂₂)) (â₁₁(k̄/3 + β) + 1/(2W)) dξ.
    pub margin_form_b: f64,
    pub a_phase: f64,
    pub classification: Classification,
    pub classification_form_a: Classification,
    /// |margin_form_a − margin_form_b/A|, both on the per-unit-phase scale.
    pub discrepancy: f64,
}

impl StabilityReport {
    pub fn forms_agree(&self) -> bool {
        self.classification == self.classification_form_a
    }
}

pub fn stability_margin(coeffs: &LinearCoefficients) -> StabilityReport {
    let p = &coeffs.params;
    let n = coeffs.n_nodes();
    let h = coeffs.grid.h();
    let s = &coeffs.inv_sqrt_z_alpha2;
    let a = phase_integral(coeffs);
    let form_a_integrand: Vec<f64> = (0..n).map(|i| s[i] * coeffs.drift_weight(i)).collect();
    let margin_form_a = simpson(&form_a_integrand, h) / a;
    let weight = p.k_bar() / 3.0 + p.beta;
    let form_b_integrand: Vec<f64> = (0..n)
        .map(|i| coeffs.chi0_star[i] * s[i] * (coeffs.a11_hat[i] * weight + 0.5 / p.w))
        .collect();
    let margin_form_b = simpson(&form_b_integrand, h);
    StabilityReport {
        margin_form_a,
        margin_form_b,
        a_phase: a,
        classification: Classification::from_margin(margin_form_b),
        classification_form_a: Classification::from_margin(margin_form_a),
        discrepancy: (margin_form_a - margin_form_b / a).abs(),
    }
}

/// Integrals of d₁₁ and d₂₂ across the channel at wavenumber ω.
pub fn diagonal_integrals(coeffs: &LinearCoefficients, omega: f64) -> (Complex64, Complex64) {
    let (d11, d22) = d_diagonals(coeffs, omega);
    let h = coeffs.grid.h();
    let integrate = |d: &[Complex64]| {
        let re: Vec<f64> = d.iter().map(|z| z.re).collect();
        let im: Vec<f64> = d.iter().map(|z| z.im).collect();
        Complex64::new(simpson(&re, h), simpson(&im, h))
    };
    (integrate(&d11), integrate(&d22))
}

/// F(λ) = exp(λA + ∫d₁₁) − exp(−λA + ∫d₂₂), scaled by the larger of the two
/// exponentials so it stays representable for large |Re λ|.
pub fn dispersion_residual(coeffs: &LinearCoefficients, omega: f64, lambda: Complex64) -> Complex64 {
    let a = phase_integral(coeffs);
    let (i11, i22) = diagonal_integrals(coeffs, omega);
    let e1 = lambda * a + i11;
    let e2 = -lambda * a + i22;
    let m = e1.re.max(e2.re);
    (e1 - m).exp() - (e2 - m).exp()
}

/// Roots of the dispersion relation, λ = (∫(d₂₂ − d₁₁)/2 + kπi)/A.
pub fn dispersion_roots(coeffs: &LinearCoefficients, omega: f64, k_lo: i64, k_hi: i64) -> Vec<Complex64> {
    let a = phase_integral(coeffs);
    let (i11, i22) = diagonal_integrals(coeffs, omega);
    let half = (i22 - i11) / 2.0;
    (k_lo..=k_hi)
        .map(|k| (half + Complex64::new(0.0, k as f64 * PI)) / a)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseflow::solve_base_flow;
    use crate::config::{Grid, ModelParams};
    use crate::lincoeff::build_coefficients;

    fn coeffs_for(p: &ModelParams, n: usize) -> LinearCoefficients {
        let flow = solve_base_flow(p, &Grid::new(n).unwrap(), 1e-11, 60).unwrap();
        build_coefficients(&flow, p).unwrap()
    }

    #[test]
    fn rest_state_phase_integral() {
        assert!((phase_integral(&coeffs_for(&ModelParams::rest_state(), 129)) - 1.0).abs() < 1e-12);
        for (w, re) in [(2.0, 3.0), (0.5, 8.0)] {
            let p = ModelParams { w, re, ..ModelParams::rest_state() };
            let a = phase_integral(&coeffs_for(&p, 129));
            assert!((a - (w * re).sqrt()).abs() < 1e-11, "{a}");
        }
    }

    #[test]
    fn rest_state_eigenvalues() {
        let c = coeffs_for(&ModelParams::rest_state(), 129);
        let fam = asymptotic_eigenvalues(&c, 0.0, 0, 2).unwrap();
        for (k, l) in fam.k_list.iter().zip(&fam.lambdas) {
            assert!((l - Complex64::new(0.5, *k as f64 * PI)).norm() < 1e-10);
        }
    }

    #[test]
    fn family_structure() {
        let c = coeffs_for(&ModelParams::main_case(), 257);
        let f1 = asymptotic_eigenvalues(&c, 1.0, -3, 12).unwrap();
        let f5 = asymptotic_eigenvalues(&c, 5.0, -3, 12).unwrap();
        for w in f1.lambdas.windows(2) {
            let ulp = 4.0 * f64::EPSILON * w[1].im.abs().max(1.0);
            assert!(((w[1].im - w[0].im) - f1.spacing()).abs() <= ulp);
            assert_eq!(w[0].re, w[1].re);
        }
        assert_eq!(f1.lambdas[0].re, f5.lambdas[0].re);
        assert!(asymptotic_eigenvalues(&c, 1.0, 3, 2).is_err());
    }

    #[test]
    fn rest_state_margins() {
        for (w, re) in [(1.0, 1.0), (2.0, 3.0), (0.25, 4.0)] {
            let p = ModelParams { w, re, ..ModelParams::rest_state() };
            let r = stability_margin(&coeffs_for(&p, 129));
            assert!((r.margin_form_b - 0.5 * (re / w).sqrt()).abs() < 1e-10);
            assert!((r.margin_form_a * r.a_phase - (w * re).sqrt() / (2.0 * w)).abs() < 1e-10);
            assert_eq!(r.classification, Classification::Violated);
            assert!(r.forms_agree());
        }
    }

    #[test]
    fn dispersion_roots_are_zeros_and_periodic() {
        let p = ModelParams { sigma_m: 0.0, ..ModelParams::rest_state() };
        let c = coeffs_for(&p, 129);
        let a = phase_integral(&c);
        for root in dispersion_roots(&c, 0.0, 0, 3) {
            assert!(dispersion_residual(&c, 0.0, root).norm() < 1e-12);
            let shifted = root + Complex64::new(0.0, 2.0 * PI / a);
            assert!(dispersion_residual(&c, 0.0, shifted).norm() < 1e-12);
            let off = root + Complex64::new(0.0, PI / (2.0 * a));
            assert!(dispersion_residual(&c, 0.0, off).norm() > 0.5);
        }
        let roots = dispersion_roots(&c, 0.0, 0, 0);
        assert!((roots[0] - Complex64::new(0.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn dispersion_is_stable_for_large_real_part() {
        let c = coeffs_for(&ModelParams::main_case(), 129);
        let f = dispersion_residual(&c, 1.0, Complex64::new(800.0, 3.0));
        assert!(f.norm().is_finite() && (f.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sign_conventions() {
        let l = Complex64::new(1.0, 2.0);
        assert_eq!(SignConvention::AsPrinted.apply(l), l);
        assert_eq!(SignConvention::Conjugate.apply(l), Complex64::new(1.0, -2.0));
        assert_eq!(SignConvention::Negated.apply(l), Complex64::new(-1.0, -2.0));
        assert_eq!(SignConvention::NegatedConjugate.apply(l), Complex64::new(-1.0, 2.0));
    }
}
