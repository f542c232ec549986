//! Dimensionless parameter set, grid, sweep specification and their JSON
//! ingestion.
//!
//! Physics parameters have no defaults: a document missing any of them is
//! rejected, as is any key that does not name a field.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// The dimensionless groups of the model. JSON keys match the field renames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Reynolds number.
    #[serde(rename = "Re")]
    pub re: f64,
    /// Weissenberg number.
    #[serde(rename = "W")]
    pub w: f64,
    /// Grasshoff number (Ra/Pr).
    #[serde(rename = "Gr")]
    pub gr: f64,
    /// Prandtl number.
    #[serde(rename = "Pr")]
    pub pr: f64,
    /// Thermal work coefficient.
    #[serde(rename = "A_r")]
    pub a_r: f64,
    /// Magnetothermal work coefficient.
    #[serde(rename = "A_m")]
    pub a_m: f64,
    pub beta: f64,
    /// Phenomenological coefficient k (k̄ = k − β).
    pub k_phen: f64,
    /// Magnetic pressure coefficient.
    pub sigma_m: f64,
    /// Inverse magnetic Reynolds number.
    pub b_m: f64,
    /// Activation energy scaled by the room temperature.
    #[serde(rename = "E_A_bar")]
    pub e_a_bar: f64,
    /// Temperature drop at the lower wall (relative).
    pub theta_bar: f64,
    #[serde(rename = "J_plus")]
    pub j_plus: f64,
    #[serde(rename = "J_minus")]
    pub j_minus: f64,
    /// Constant vertical field perturbation M̂.
    pub lambda_hat: f64,
    /// Streamwise pressure drop.
    #[serde(rename = "A_hat")]
    pub a_hat: f64,
    /// Streamwise wavenumber of the perturbation.
    pub omega: f64,
}

/// Names of every field as it appears in configuration documents.
pub const FIELD_NAMES: [&str; 17] = [
    "Re", "W", "Gr", "Pr", "A_r", "A_m", "beta", "k_phen", "sigma_m", "b_m", "E_A_bar",
    "theta_bar", "J_plus", "J_minus", "lambda_hat", "A_hat", "omega",
];

impl ModelParams {
    /// Parameters of the main case of the stationary computations. The
    /// document does not fix k, Gr, Pr or ω; they are set to k = β, Gr = 1,
    /// Pr = 1, ω = 1 here.
    pub fn main_case() -> Self {
        ModelParams {
            re: 1.0,
            w: 1.0,
            gr: 1.0,
            pr: 1.0,
            a_r: 1.0,
            a_m: 1.0,
            beta: 0.5,
            k_phen: 0.5,
            sigma_m: 1.0,
            b_m: 1.0,
            e_a_bar: 1.0,
            theta_bar: 1.0,
            j_plus: 2.0,
            j_minus: 1.0,
            lambda_hat: 1.0,
            a_hat: 1.0,
            omega: 1.0,
        }
    }

    /// No pressure drop, equal currents, no temperature drop.
    pub fn rest_state() -> Self {
        ModelParams {
            a_hat: 0.0,
            theta_bar: 0.0,
            j_minus: 2.0,
            ..Self::main_case()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for name in FIELD_NAMES {
            let v = self.get(name).expect("field table is complete");
            if !v.is_finite() {
                return Err(Error::validation(name, format!("must be finite, got {v}")));
            }
        }
        let positive = [("Re", self.re), ("W", self.w), ("Pr", self.pr), ("b_m", self.b_m)];
        for (name, v) in positive {
            if v <= 0.0 {
                return Err(Error::validation(name, format!("must be > 0, got {v}")));
            }
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::validation("beta", format!("must lie in (0, 1), got {}", self.beta)));
        }
        if self.sigma_m < 0.0 {
            return Err(Error::validation("sigma_m", format!("must be >= 0, got {}", self.sigma_m)));
        }
        if 1.0 + self.theta_bar <= 0.0 {
            return Err(Error::validation(
                "theta_bar",
                format!("1 + theta_bar must be > 0, got theta_bar = {}", self.theta_bar),
            ));
        }
        Ok(())
    }

    /// k̄ = k − β.
    pub fn k_bar(&self) -> f64 {
        self.k_phen - self.beta
    }

    /// κ² = 1/(W·Re).
    pub fn kappa_sq(&self) -> f64 {
        1.0 / (self.w * self.re)
    }

    /// D̂ = Re·Â.
    pub fn d_hat(&self) -> f64 {
        self.re * self.a_hat
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "Re" => self.re,
            "W" => self.w,
            "Gr" => self.gr,
            "Pr" => self.pr,
            "A_r" => self.a_r,
            "A_m" => self.a_m,
            "beta" => self.beta,
            "k_phen" => self.k_phen,
            "sigma_m" => self.sigma_m,
            "b_m" => self.b_m,
            "E_A_bar" => self.e_a_bar,
            "theta_bar" => self.theta_bar,
            "J_plus" => self.j_plus,
            "J_minus" => self.j_minus,
            "lambda_hat" => self.lambda_hat,
            "A_hat" => self.a_hat,
            "omega" => self.omega,
            _ => return None,
        })
    }

    /// Copy with one named field replaced. Does not validate.
    pub fn with(&self, name: &str, value: f64) -> Result<Self> {
        let mut p = *self;
        let slot = match name {
            "Re" => &mut p.re,
            "W" => &mut p.w,
            "Gr" => &mut p.gr,
            "Pr" => &mut p.pr,
            "A_r" => &mut p.a_r,
            "A_m" => &mut p.a_m,
            "beta" => &mut p.beta,
            "k_phen" => &mut p.k_phen,
            "sigma_m" => &mut p.sigma_m,
            "b_m" => &mut p.b_m,
            "E_A_bar" => &mut p.e_a_bar,
            "theta_bar" => &mut p.theta_bar,
            "J_plus" => &mut p.j_plus,
            "J_minus" => &mut p.j_minus,
            "lambda_hat" => &mut p.lambda_hat,
            "A_hat" => &mut p.a_hat,
            "omega" => &mut p.omega,
            other => return Err(Error::validation("axis", format!("unknown parameter `{other}`"))),
        };
        *slot = value;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }

    /// First 16 hex digits of SHA-256 over the compact JSON form.
    pub fn hash_hex(&self) -> String {
        let compact = serde_json::to_string(self).expect("plain struct serializes");
        short_hash(compact.as_bytes())
    }
}

/// First 16 hex digits of the SHA-256 digest of `bytes`.
pub fn short_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Parses and validates a JSON configuration document.
pub fn load_config(text: &str) -> Result<ModelParams> {
    let params: ModelParams =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    params.validate()?;
    Ok(params)
}

/// (k̄, κ²) for a parameter set.
pub fn derived(params: &ModelParams) -> (f64, f64) {
    (params.k_bar(), params.kappa_sq())
}

/// Uniform partition of [−1/2, 1/2] with an odd node count.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
}

pub const MIN_GRID_NODES: usize = 65;

impl Grid {
    pub fn new(n_nodes: usize) -> Result<Self> {
        if n_nodes < MIN_GRID_NODES || n_nodes % 2 == 0 {
            return Err(Error::validation(
                "grid",
                format!("node count must be odd and >= {MIN_GRID_NODES}, got {n_nodes}"),
            ));
        }
        Ok(Self::uniform(n_nodes))
    }

    /// Uniform grid without the production size floor; still odd.
    pub(crate) fn uniform(n_nodes: usize) -> Self {
        assert!(n_nodes >= 3 && n_nodes % 2 == 1);
        let h = 1.0 / (n_nodes - 1) as f64;
        let mut nodes: Vec<f64> = (0..n_nodes).map(|i| -0.5 + i as f64 * h).collect();
        nodes[n_nodes - 1] = 0.5;
        Grid { nodes }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.nodes.len() - 1) as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Index of the node at y = 0.
    pub fn mid_index(&self) -> usize {
        (self.nodes.len() - 1) / 2
    }
}

/// Axis values of a sweep: explicit list or evenly spaced range.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepValues {
    List(Vec<f64>),
    Range { lo: f64, hi: f64, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepOutput {
    #[serde(rename = "margin")]
    Margin,
    #[serde(rename = "A")]
    APhase,
    #[serde(rename = "B")]
    BDrift,
    #[serde(rename = "re_lambda")]
    ReLambda,
}

/// On-disk form; exactly one of `values` or (`lo`, `hi`, `count`) is given.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepDocument {
    axis: String,
    values: Option<Vec<f64>>,
    lo: Option<f64>,
    hi: Option<f64>,
    count: Option<usize>,
    fixed: ModelParams,
    outputs: Option<Vec<SweepOutput>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: String,
    pub values: SweepValues,
    pub fixed: ModelParams,
    pub outputs: Vec<SweepOutput>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.fixed.get(&self.axis).is_none() {
            return Err(Error::validation("axis", format!("`{}` is not a parameter", self.axis)));
        }
        match &self.values {
            SweepValues::List(values) => {
                if values.is_empty() {
                    return Err(Error::validation("values", "must not be empty"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::validation("values", "must be finite"));
                }
            }
            SweepValues::Range { lo, hi, count } => {
                if *count < 2 {
                    return Err(Error::validation("count", format!("must be >= 2, got {count}")));
                }
                if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
                    return Err(Error::validation("lo", "range needs finite lo < hi"));
                }
            }
        }
        Ok(())
    }

    /// Axis values in ascending order.
    pub fn axis_values(&self) -> Vec<f64> {
        let mut v = match &self.values {
            SweepValues::List(values) => values.clone(),
            SweepValues::Range { lo, hi, count } => (0..*count)
                .map(|i| lo + (hi - lo) * i as f64 / (*count - 1) as f64)
                .collect(),
        };
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }
}

pub fn load_sweep(text: &str) -> Result<SweepSpec> {
    let doc: SweepDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let values = match (doc.values, doc.lo, doc.hi, doc.count) {
        (Some(v), None, None, None) => SweepValues::List(v),
        (None, Some(lo), Some(hi), Some(count)) => SweepValues::Range { lo, hi, count },
        _ => {
            return Err(Error::Parse(
                "sweep needs either `values` or all of `lo`, `hi`, `count`".to_string(),
            ))
        }
    };
    let spec = SweepSpec {
        axis: doc.axis,
        values,
        fixed: doc.fixed,
        outputs: doc.outputs.unwrap_or_else(|| vec![SweepOutput::Margin, SweepOutput::APhase]),
    };
    spec.validate()?;
    Ok(spec)
}
