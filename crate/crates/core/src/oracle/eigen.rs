//! Shift-and-invert inverse iteration on the discretized pencil and the
//! seeded search for the large-|λ| branch.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotics::{EigenFamily, SignConvention};
use crate::error::{Error, Result};
use crate::oracle::pencil::{index, Pencil, U, V};

/// Threshold on the divergence diagnostic for accepting a mode.
pub const DIVERGENCE_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: Complex64,
    /// Unit-norm eigenvector, phase fixed so its largest entry is real
    /// and positive.
    pub q: Vec<Complex64>,
    /// ‖Nq − λMq‖ / ‖q‖.
    pub residual: f64,
    /// max|iωu + v′| / max(|u|, |v|) over interior nodes; zero for pencils
    /// without the field layout.
    pub divergence_diag: f64,
    pub iterations: usize,
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize(x: &mut [Complex64]) {
    let s = norm(x);
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
}

/// Least-squares eigenvalue estimate for a fixed vector, and its residual.
fn rayleigh(pencil: &Pencil, x: &[Complex64]) -> (Complex64, f64) {
    let mx = pencil.m_mat.matvec(x);
    let nx = pencil.n_mat.matvec(x);
    let lambda = dot(&mx, &nx) / dot(&mx, &mx);
    let r: Vec<Complex64> = nx.iter().zip(&mx).map(|(a, b)| a - lambda * b).collect();
    (lambda, norm(&r) / norm(x))
}

/// max|iωu + δv| / max(|u|, |v|) over interior nodes, with the centered
/// difference used by the assembly.
pub fn divergence_diag(pencil: &Pencil, q: &[Complex64]) -> f64 {
    if !pencil.is_field_layout() {
        return 0.0;
    }
    let n = pencil.n_nodes;
    let iw = Complex64::new(0.0, pencil.omega);
    let mut div = 0.0_f64;
    for i in 1..n - 1 {
        let d = iw * q[index(i, U)]
            + (q[index(i + 1, V)] - q[index(i - 1, V)]) / (2.0 * pencil.h);
        div = div.max(d.norm());
    }
    let scale = (0..n)
        .map(|i| q[index(i, U)].norm().max(q[index(i, V)].norm()))
        .fold(0.0, f64::max);
    if scale > 0.0 {
        div / scale
    } else {
        0.0
    }
}

fn fix_phase(q: &mut [Complex64]) {
    let mut best = 0usize;
    let mut mag = 0.0;
    for (i, v) in q.iter().enumerate() {
        if v.norm() > mag * (1.0 + 1e-12) {
            mag = v.norm();
            best = i;
        }
    }
    if mag > 0.0 {
        let phase = q[best].conj() / mag;
        q.iter_mut().for_each(|v| *v *= phase);
    }
}

/// Inverse iteration on (N − σM)⁻¹M. Converges to the finite eigenvalue
/// closest to σ; eigenvalues at infinity (λ-free rows) map to zero and are
/// never selected. After every `reshift_every` steps without convergence the
/// shift moves to the current estimate.
pub fn shift_invert_eigen(
    pencil: &Pencil,
    sigma: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair> {
    const RESHIFT_EVERY: usize = 30;
    let size = pencil.size();
    let mut shift = sigma;
    let mut lu = pencil.n_mat.factor(shift, &pencil.m_mat)?;
    // deterministic start vector with no special symmetry
    let mut x: Vec<Complex64> = (0..size)
        .map(|i| Complex64::new(1.0 + 0.37 * ((i % 7) as f64), 0.21 * ((i % 5) as f64) - 0.4))
        .collect();
    normalize(&mut x);
    let mut last = (Complex64::new(f64::NAN, 0.0), f64::INFINITY);
    for it in 1..=max_iter {
        let mut y = lu.solve(&pencil.m_mat.matvec(&x));
        normalize(&mut y);
        if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::FactorizationSingular { pivot: 0 });
        }
        x = y;
        let (lambda, residual) = rayleigh(pencil, &x);
        last = (lambda, residual);
        if residual < tol {
            fix_phase(&mut x);
            let divergence_diag = divergence_diag(pencil, &x);
            return Ok(EigenPair {
                lambda,
                q: x,
                residual,
                divergence_diag,
                iterations: it,
            });
        }
        if it % RESHIFT_EVERY == 0 && lambda.re.is_finite() && lambda.im.is_finite() {
            // keep the new shift off the eigenvalue itself
            let nudged = lambda + (lambda - shift) * 1e-3;
            if let Ok(next) = pencil.n_mat.factor(nudged, &pencil.m_mat) {
                shift = nudged;
                lu = next;
            }
        }
    }
    let mut residuals = BTreeMap::new();
    residuals.insert("eigen_residual".to_string(), last.1);
    Err(Error::NoConvergence {
        stage: format!("shift-invert iteration at sigma = {sigma}"),
        iterations: max_iter,
        residuals,
    })
}

/// Runs [`shift_invert_eigen`], nudging σ off an exact eigenvalue if the
/// factorization is singular.
pub fn shift_invert_robust(
    pencil: &Pencil,
    sigma: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair> {
    let mut s = sigma;
    for _ in 0..3 {
        match shift_invert_eigen(pencil, s, tol, max_iter) {
            Err(Error::FactorizationSingular { .. }) => {
                s += Complex64::new(1e-7, 1e-7) * (1.0 + s.norm());
            }
            other => return other,
        }
    }
    shift_invert_eigen(pencil, s, tol, max_iter)
}

/// Outcome of the search started from one seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HuntEntry {
    pub k: i64,
    /// The seed after applying the sign convention.
    pub seed: Complex64,
    pub found: Option<Complex64>,
    pub residual: Option<f64>,
    pub divergence_diag: Option<f64>,
    /// |found − seed| / |seed|.
    pub relative_distance: Option<f64>,
    /// Why the seed has no accepted eigenvalue (error kind or filter).
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConventionScore {
    pub convention: SignConvention,
    pub matched: usize,
    pub median_relative_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HuntReport {
    pub convention: SignConvention,
    pub n_nodes: usize,
    pub entries: Vec<HuntEntry>,
    pub scores: Vec<ConventionScore>,
}

impl HuntReport {
    pub fn matched(&self) -> impl Iterator<Item = &HuntEntry> {
        self.entries.iter().filter(|e| e.found.is_some())
    }

    /// CSV rows: k_seed, seed, found, residual, divergence_diag, grid n.
    pub fn to_csv(&self, manifest_hash: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(h) = manifest_hash {
            out.push_str(&format!("# manifest_hash={h}\n"));
        }
        out.push_str(&format!("# sign_convention={}\n", self.convention));
        out.push_str("k_seed,re_lambda_seed,im_lambda_seed,re_lambda_found,im_lambda_found,residual,divergence_diag,grid_n\n");
        let opt = |v: Option<f64>| v.map_or_else(|| "NaN".to_string(), |x| x.to_string());
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                e.k,
                e.seed.re,
                e.seed.im,
                opt(e.found.map(|l| l.re)),
                opt(e.found.map(|l| l.im)),
                opt(e.residual),
                opt(e.divergence_diag),
                self.n_nodes
            ));
        }
        out
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::INFINITY;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn search(pencil: &Pencil, family: &EigenFamily, conv: SignConvention, tol: f64, max_iter: usize) -> Vec<HuntEntry> {
    family
        .k_list
        .iter()
        .zip(&family.lambdas)
        .map(|(&k, &lambda)| {
            let seed = conv.apply(lambda);
            let mut entry = HuntEntry {
                k,
                seed,
                found: None,
                residual: None,
                divergence_diag: None,
                relative_distance: None,
                note: None,
            };
            match shift_invert_robust(pencil, seed, tol, max_iter) {
                Ok(pair) => {
                    entry.residual = Some(pair.residual);
                    entry.divergence_diag = Some(pair.divergence_diag);
                    if pair.divergence_diag < DIVERGENCE_LIMIT {
                        entry.found = Some(pair.lambda);
                        entry.relative_distance = Some((pair.lambda - seed).norm() / seed.norm().max(f64::MIN_POSITIVE));
                    } else {
                        entry.note = Some("divergence filter".to_string());
                    }
                }
                Err(e) => entry.note = Some(e.kind().to_string()),
            }
            entry
        })
        .collect()
}

/// Searches the pencil near every seed under each candidate sign convention,
/// keeps the convention whose accepted eigenvalues lie closest to their seeds
/// (median relative distance, more matches breaking ties), then drops
/// entries that landed on an eigenvalue already claimed by a closer seed.
pub fn hunt_spectrum(
    pencil: &Pencil,
    family: &EigenFamily,
    conventions: &[SignConvention],
    tol: f64,
    max_iter: usize,
) -> Result<HuntReport> {
    if conventions.is_empty() {
        return Err(Error::validation("conventions", "at least one sign convention is needed"));
    }
    let mut best: Option<(Vec<HuntEntry>, ConventionScore)> = None;
    let mut scores = Vec::new();
    for &conv in conventions {
        let entries = search(pencil, family, conv, tol, max_iter);
        let distances: Vec<f64> = entries.iter().filter_map(|e| e.relative_distance).collect();
        let score = ConventionScore {
            convention: conv,
            matched: distances.len(),
            median_relative_distance: median(distances),
        };
        let better = best.as_ref().map_or(true, |(_, b)| {
            score.median_relative_distance < b.median_relative_distance
                || (score.median_relative_distance == b.median_relative_distance
                    && score.matched > b.matched)
        });
        scores.push(score.clone());
        if better {
            best = Some((entries, score));
        }
    }
    let (mut entries, chosen) = best.expect("at least one convention ran");
    let convention = chosen.convention;
    dedupe(&mut entries, tol);
    Ok(HuntReport {
        convention,
        n_nodes: pencil.n_nodes,
        entries,
        scores,
    })
}

/// Keeps one entry per distinct eigenvalue: the one whose seed is closest.
fn dedupe(entries: &mut [HuntEntry], tol: f64) {
    let count = entries.len();
    for a in 0..count {
        for b in 0..count {
            if a == b {
                continue;
            }
            let (Some(la), Some(lb)) = (entries[a].found, entries[b].found) else {
                continue;
            };
            let same = (la - lb).norm() <= tol.max(1e-9) * la.norm().max(1.0) * 1e3;
            let a_closer = entries[a].relative_distance < entries[b].relative_distance
                || (entries[a].relative_distance == entries[b].relative_distance && a < b);
            if same && a_closer {
                let e = &mut entries[b];
                e.found = None;
                e.relative_distance = None;
                e.note = Some("duplicate".to_string());
            }
        }
    }
}

/// Checks that each found eigenvalue reappears on a finer pencil: the fine
/// pencil is searched from the coarse eigenvalue and the move must satisfy
/// |Δλ| ≤ 10·h²·max(1, |λ|)³, the scale of second-order dispersion error
/// for an oscillatory mode.
pub fn refinement_persistence(
    coarse_h: f64,
    fine: &Pencil,
    found: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Vec<(Option<Complex64>, bool)> {
    found
        .iter()
        .map(|&l| match shift_invert_robust(fine, l, tol, max_iter) {
            Ok(pair) => {
                let bound = 10.0 * coarse_h * coarse_h * l.norm().max(1.0).powi(3);
                (Some(pair.lambda), (pair.lambda - l).norm() <= bound)
            }
            Err(_) => (None, false),
        })
        .collect()
}
