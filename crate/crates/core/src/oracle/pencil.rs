//! Finite-difference discretization of the linearized problem as a banded
//! generalized eigenproblem λ·M q = N q.
//!
//! Unknowns are interleaved per node, `q[9·i + f]`. Velocity, pressure-like
//! Ω, temperature and the two field perturbations live on the nodes; the
//! three stress components live on the midpoints i + 1/2 (slot `i`, with the
//! slot of the last node unused). Stress rows are algebraic in the stresses,
//! so this staggering couples neighbouring velocities compactly and keeps
//! odd and even nodes from decoupling.
//!
//! The Ω row at an interior node is the discrete divergence of the two
//! momentum rows (without their λ terms), and at the walls it is the normal
//! momentum balance itself. Any eigenpair with λ ≠ 0 is therefore
//! divergence-free in the discrete sense at every interior node.

use num_complex::Complex64;

use crate::config::ModelParams;
use crate::error::{Error, Result};
use crate::lincoeff::LinearCoefficients;
use crate::numerics::interpolate_cubic;
use crate::oracle::band::BandMatrix;

pub const FIELDS: usize = 9;
pub const U: usize = 0;
pub const V: usize = 1;
pub const A11: usize = 2;
pub const A12: usize = 3;
pub const A22: usize = 4;
pub const OMEGA: usize = 5;
pub const Z: usize = 6;
pub const L: usize = 7;
pub const M: usize = 8;

pub const FIELD_NAMES: [&str; FIELDS] = ["u", "v", "a11", "a12", "a22", "Omega", "Z", "L", "M"];

/// Declared half-bandwidth of both matrices.
pub const HALF_BANDWIDTH: usize = 3 * FIELDS - 1;

pub const MIN_PENCIL_NODES: usize = 129;

/// Coefficient values at one location.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Coef {
    pub u: f64,
    pub up: f64,
    pub z: f64,
    pub zp: f64,
    pub a11h: f64,
    pub a12h: f64,
    pub a22h: f64,
    pub al11: f64,
    pub al12: f64,
    pub al22: f64,
    pub al11p: f64,
    pub al12p: f64,
    pub al22p: f64,
    pub al1: f64,
    pub al2: f64,
    pub l: f64,
    pub lp: f64,
    pub r33: f64,
    pub r34: f64,
    pub r35: f64,
    pub r43: f64,
    pub r44: f64,
    pub r45: f64,
    pub r53: f64,
    pub r54: f64,
    pub r55: f64,
    pub r11: f64,
    pub r12: f64,
}

/// Interpolates every coefficient profile at `y`.
pub(crate) fn sample(c: &LinearCoefficients, y: f64) -> Coef {
    let h = c.grid.h();
    let at = |v: &[f64]| interpolate_cubic(v, -0.5, h, y);
    Coef {
        u: at(&c.u_hat),
        up: at(&c.u_hat_prime),
        z: at(&c.z_hat),
        zp: at(&c.z_hat_prime),
        a11h: at(&c.a11_hat),
        a12h: at(&c.a12_hat),
        a22h: at(&c.a22_hat),
        al11: at(&c.alpha11),
        al12: at(&c.alpha12),
        al22: at(&c.alpha22),
        al11p: at(&c.alpha11_prime),
        al12p: at(&c.alpha12_prime),
        al22p: at(&c.alpha22_prime),
        al1: at(&c.alpha1),
        al2: at(&c.alpha2),
        l: at(&c.l_hat),
        lp: at(&c.l_hat_prime),
        r33: at(&c.r33),
        r34: at(&c.r34),
        r35: at(&c.r35),
        r43: at(&c.r43),
        r44: at(&c.r44),
        r45: at(&c.r45),
        r53: at(&c.r53),
        r54: at(&c.r54),
        r55: at(&c.r55),
        r11: at(&c.r11),
        r12: at(&c.r12),
    }
}

/// Discretized pencil λ·M q = N q.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub n_nodes: usize,
    pub omega: f64,
    pub h: f64,
    pub bandwidth: usize,
    pub m_mat: BandMatrix,
    pub n_mat: BandMatrix,
    /// Rows imposing boundary data: Dirichlet rows, the wall Ω rows and the
    /// unused stress slots of the last node.
    pub bc_rows: Vec<usize>,
    /// Interior Ω rows.
    pub poisson_rows: Vec<usize>,
}

pub fn index(node: usize, field: usize) -> usize {
    FIELDS * node + field
}

type Expr = Vec<(usize, Complex64)>;

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn push(e: &mut Expr, col: usize, v: Complex64) {
    if v != Complex64::new(0.0, 0.0) {
        e.push((col, v));
    }
}

fn scaled(e: &Expr, s: Complex64) -> Expr {
    e.iter().map(|&(c, v)| (c, v * s)).collect()
}

struct Assembler {
    n: usize,
    h: f64,
    omega: f64,
    p: ModelParams,
    nodes: Vec<Coef>,
    mids: Vec<Coef>,
}

impl Assembler {
    fn iw(&self) -> Complex64 {
        Complex64::new(0.0, self.omega)
    }

    /// First derivative of a nodal field at node i (one-sided at the walls).
    fn d1(&self, e: &mut Expr, i: usize, field: usize, s: Complex64) {
        let (n, h) = (self.n, self.h);
        if i == 0 {
            push(e, index(0, field), s * (-1.5 / h));
            push(e, index(1, field), s * (2.0 / h));
            push(e, index(2, field), s * (-0.5 / h));
        } else if i == n - 1 {
            push(e, index(n - 1, field), s * (1.5 / h));
            push(e, index(n - 2, field), s * (-2.0 / h));
            push(e, index(n - 3, field), s * (0.5 / h));
        } else {
            push(e, index(i + 1, field), s * (0.5 / h));
            push(e, index(i - 1, field), s * (-0.5 / h));
        }
    }

    /// (f'' − ω² f) at an interior node.
    fn laplacian(&self, e: &mut Expr, i: usize, field: usize, s: Complex64) {
        let h2 = self.h * self.h;
        push(e, index(i - 1, field), s / h2);
        push(e, index(i + 1, field), s / h2);
        push(e, index(i, field), s * (-2.0 / h2 - self.omega * self.omega));
    }

    /// Stress component interpolated to node i (extrapolated at the walls).
    fn stress_at_node(&self, e: &mut Expr, i: usize, field: usize, s: Complex64) {
        let n = self.n;
        if i == 0 {
            push(e, index(0, field), s * 1.5);
            push(e, index(1, field), s * -0.5);
        } else if i == n - 1 {
            push(e, index(n - 2, field), s * 1.5);
            push(e, index(n - 3, field), s * -0.5);
        } else {
            push(e, index(i - 1, field), s * 0.5);
            push(e, index(i, field), s * 0.5);
        }
    }

    /// Streamwise momentum without the λ term, at interior node i.
    fn momentum_x(&self, i: usize) -> Expr {
        let (c, h, iw) = (&self.nodes[i], self.h, self.iw());
        let p = &self.p;
        let mag = p.sigma_m * (1.0 + p.lambda_hat);
        let (below, above) = (&self.mids[i - 1], &self.mids[i]);
        let (prev, next) = (&self.nodes[i - 1], &self.nodes[i + 1]);
        let mut e = Expr::new();
        push(&mut e, index(i, U), iw * c.u);
        push(&mut e, index(i, V), re(c.up));
        push(&mut e, index(i, OMEGA), iw);
        self.stress_at_node(&mut e, i, A11, -iw * c.z);
        self.stress_at_node(&mut e, i, A22, iw * c.z);
        push(&mut e, index(i, A12), re(-above.z / h));
        push(&mut e, index(i - 1, A12), re(below.z / h));
        push(&mut e, index(i, Z), iw * (c.al22 - c.al11));
        push(&mut e, index(i + 1, Z), re(-next.al12 / (2.0 * h)));
        push(&mut e, index(i - 1, Z), re(prev.al12 / (2.0 * h)));
        push(&mut e, index(i, M), iw * mag - p.sigma_m * c.lp);
        self.d1(&mut e, i, L, re(-mag));
        e
    }

    /// Normal momentum without the λ term, at any node.
    fn momentum_y(&self, i: usize) -> Expr {
        let (c, iw) = (&self.nodes[i], self.iw());
        let p = &self.p;
        let mut e = Expr::new();
        push(&mut e, index(i, V), iw * c.u);
        self.d1(&mut e, i, OMEGA, re(1.0));
        self.stress_at_node(&mut e, i, A12, -iw * c.z);
        push(&mut e, index(i, Z), -iw * c.al12 - p.gr);
        push(&mut e, index(i, M), -iw * p.sigma_m * c.l);
        self.d1(&mut e, i, L, re(p.sigma_m * c.l));
        push(&mut e, index(i, L), re(p.sigma_m * c.lp));
        e
    }

    fn poisson(&self, i: usize) -> Expr {
        let mut e = scaled(&self.momentum_x(i), self.iw());
        let inv = 1.0 / (2.0 * self.h);
        e.extend(scaled(&self.momentum_y(i + 1), re(inv)));
        e.extend(scaled(&self.momentum_y(i - 1), re(-inv)));
        e
    }

    /// Midpoint average and compact derivative of a nodal field.
    fn mid_value(&self, e: &mut Expr, j: usize, field: usize, s: Complex64) {
        push(e, index(j, field), s * 0.5);
        push(e, index(j + 1, field), s * 0.5);
    }

    fn mid_slope(&self, e: &mut Expr, j: usize, field: usize, s: Complex64) {
        push(e, index(j + 1, field), s / self.h);
        push(e, index(j, field), -s / self.h);
    }

    /// Stress rows (without λ) at midpoint j, for stress field `f`.
    fn stress(&self, j: usize, f: usize) -> Expr {
        let (c, iw) = (&self.mids[j], self.iw());
        let mut e = Expr::new();
        push(&mut e, index(j, f), iw * c.u);
        let (r3, r4, r5) = match f {
            A11 => {
                self.mid_value(&mut e, j, U, -2.0 * c.al1 * iw);
                self.mid_slope(&mut e, j, U, re(-2.0 * c.al12));
                self.mid_value(&mut e, j, V, re(c.al11p));
                self.mid_value(&mut e, j, Z, re(c.r11));
                (c.r33, c.r34, c.r35)
            }
            A12 => {
                self.mid_value(&mut e, j, V, -c.al1 * iw);
                self.mid_slope(&mut e, j, U, re(-c.al2));
                self.mid_value(&mut e, j, V, re(c.al12p));
                self.mid_value(&mut e, j, Z, re(c.r12));
                (c.r43, c.r44, c.r45)
            }
            _ => {
                self.mid_value(&mut e, j, V, -2.0 * c.al12 * iw);
                self.mid_slope(&mut e, j, V, re(-2.0 * c.al2));
                self.mid_value(&mut e, j, V, re(c.al22p));
                (c.r53, c.r54, c.r55)
            }
        };
        push(&mut e, index(j, A11), re(r3));
        push(&mut e, index(j, A12), re(r4));
        push(&mut e, index(j, A22), re(r5));
        e
    }

    fn heat(&self, i: usize) -> Expr {
        let (c, iw, p) = (&self.nodes[i], self.iw(), &self.p);
        let one_l = 1.0 + p.lambda_hat;
        let ar = p.a_r / p.pr;
        let am = p.a_m * p.sigma_m / p.pr;
        let mut e = Expr::new();
        push(&mut e, index(i, Z), iw * c.u - ar * c.up * c.a12h);
        push(&mut e, index(i, V), re(c.zp));
        self.laplacian(&mut e, i, Z, re(-1.0 / p.pr));
        push(&mut e, index(i, U), -(ar * c.z * c.a11h + am * c.l * c.l) * iw);
        push(&mut e, index(i, V), -(ar * c.z * c.a12h + am * c.l * one_l) * iw);
        self.d1(&mut e, i, U, re(-(ar * c.z * c.a12h + am * c.l * one_l)));
        self.d1(&mut e, i, V, re(-(ar * c.z * c.a22h + am * one_l * one_l)));
        self.stress_at_node(&mut e, i, A12, re(-ar * c.z * c.up * p.re));
        push(&mut e, index(i, L), re(-am * c.up * one_l));
        push(&mut e, index(i, M), re(-am * c.up * c.l));
        e
    }

    fn induction_l(&self, i: usize) -> Expr {
        let (c, iw, p) = (&self.nodes[i], self.iw(), &self.p);
        let mut e = Expr::new();
        push(&mut e, index(i, L), iw * c.u);
        push(&mut e, index(i, V), re(c.lp));
        push(&mut e, index(i, U), -iw * c.l);
        self.d1(&mut e, i, U, re(-(1.0 + p.lambda_hat)));
        push(&mut e, index(i, M), re(-c.up));
        self.laplacian(&mut e, i, L, re(-p.b_m));
        e
    }

    fn induction_m(&self, i: usize) -> Expr {
        let (c, iw, p) = (&self.nodes[i], self.iw(), &self.p);
        let mut e = Expr::new();
        push(&mut e, index(i, M), iw * c.u);
        push(&mut e, index(i, V), -iw * c.l);
        self.d1(&mut e, i, V, re(-(1.0 + p.lambda_hat)));
        self.laplacian(&mut e, i, M, re(-p.b_m));
        e
    }
}

/// Assembles the pencil on `n` nodes (odd, ≥ 129) for wavenumber ω ≠ 0.
/// Coefficient profiles are resampled from their own grid with four-point
/// Lagrange interpolation.
pub fn assemble_pencil(
    coeffs: &LinearCoefficients,
    params: &ModelParams,
    omega: f64,
    n: usize,
) -> Result<Pencil> {
    assemble_pencil_unchecked(coeffs, params, omega, n, MIN_PENCIL_NODES)
}

pub(crate) fn assemble_pencil_unchecked(
    coeffs: &LinearCoefficients,
    params: &ModelParams,
    omega: f64,
    n: usize,
    min_nodes: usize,
) -> Result<Pencil> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "the pencil needs a finite nonzero wavenumber, got omega = {omega}"
        )));
    }
    if n < min_nodes || n % 2 == 0 {
        return Err(Error::validation("grid", format!("pencil needs an odd node count >= {min_nodes}, got {n}")));
    }
    let nc = coeffs.n_nodes();
    let profiles: [&Vec<f64>; 12] = [
        &coeffs.u_hat, &coeffs.u_hat_prime, &coeffs.z_hat, &coeffs.z_hat_prime, &coeffs.alpha11,
        &coeffs.alpha12, &coeffs.alpha22, &coeffs.l_hat, &coeffs.l_hat_prime, &coeffs.r44,
        &coeffs.r11, &coeffs.r12,
    ];
    if nc < 4 || profiles.iter().any(|v| v.len() != nc) {
        return Err(Error::Assembly("coefficient profiles are missing nodes".into()));
    }
    let h = 1.0 / (n - 1) as f64;
    let asm = Assembler {
        n,
        h,
        omega,
        p: *params,
        nodes: (0..n).map(|i| sample(coeffs, -0.5 + i as f64 * h)).collect(),
        mids: (0..n - 1).map(|j| sample(coeffs, -0.5 + (j as f64 + 0.5) * h)).collect(),
    };

    let size = FIELDS * n;
    let bw = HALF_BANDWIDTH;
    let mut n_mat = BandMatrix::zeros(size, bw, bw);
    let mut m_mat = BandMatrix::zeros(size, bw, bw);
    let mut bc_rows = Vec::new();
    let mut poisson_rows = Vec::new();
    let one = re(1.0);

    let mut put = |row: usize, expr: Expr, with_lambda: bool| -> Result<()> {
        for (col, v) in expr {
            n_mat.add(row, col, -v)?;
        }
        if with_lambda {
            m_mat.add(row, row, one)?;
        }
        Ok(())
    };

    for i in 0..n {
        let wall = i == 0 || i == n - 1;
        for f in [U, V, Z, L, M] {
            let row = index(i, f);
            if wall {
                put(row, vec![(row, -one)], false)?;
                bc_rows.push(row);
            }
        }
        let omega_row = index(i, OMEGA);
        if wall {
            put(omega_row, asm.momentum_y(i), false)?;
            bc_rows.push(omega_row);
        } else {
            put(index(i, U), asm.momentum_x(i), true)?;
            put(index(i, V), asm.momentum_y(i), true)?;
            put(omega_row, asm.poisson(i), false)?;
            poisson_rows.push(omega_row);
            put(index(i, Z), asm.heat(i), true)?;
            put(index(i, L), asm.induction_l(i), true)?;
            put(index(i, M), asm.induction_m(i), true)?;
        }
        for f in [A11, A12, A22] {
            let row = index(i, f);
            if i == n - 1 {
                put(row, vec![(row, -one)], false)?;
                bc_rows.push(row);
            } else {
                put(row, asm.stress(i, f), true)?;
            }
        }
    }
    bc_rows.sort_unstable();
    Ok(Pencil {
        n_nodes: n,
        omega,
        h,
        bandwidth: bw,
        m_mat,
        n_mat,
        bc_rows,
        poisson_rows,
    })
}

impl Pencil {
    pub fn size(&self) -> usize {
        self.n_mat.n()
    }

    /// Builds a pencil from dense matrices (small test problems).
    pub fn from_dense(m: &[Vec<f64>], n: &[Vec<f64>]) -> Pencil {
        let size = m.len();
        let bw = size.saturating_sub(1);
        let mut m_mat = BandMatrix::zeros(size, bw, bw);
        let mut n_mat = BandMatrix::zeros(size, bw, bw);
        for i in 0..size {
            for j in 0..size {
                m_mat.add(i, j, re(m[i][j])).expect("dense pencil fits its band");
                n_mat.add(i, j, re(n[i][j])).expect("dense pencil fits its band");
            }
        }
        Pencil {
            n_nodes: size,
            omega: 0.0,
            h: 0.0,
            bandwidth: bw,
            m_mat,
            n_mat,
            bc_rows: Vec::new(),
            poisson_rows: Vec::new(),
        }
    }

    /// Whether this pencil carries the interleaved field layout.
    pub fn is_field_layout(&self) -> bool {
        self.h > 0.0 && self.size() == FIELDS * self.n_nodes
    }

    /// Values of one field from a stacked vector (nodes, or midpoints for
    /// the stresses).
    pub fn field(&self, q: &[Complex64], field: usize) -> Vec<Complex64> {
        let count = if matches!(field, A11 | A12 | A22) {
            self.n_nodes - 1
        } else {
            self.n_nodes
        };
        (0..count).map(|i| q[index(i, field)]).collect()
    }

    /// Rows whose M entries are all zero.
    pub fn lambda_free_rows(&self) -> Vec<usize> {
        (0..self.size())
            .filter(|&r| self.m_mat.row_range(r).all(|c| self.m_mat.get(r, c).norm() == 0.0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseflow::{solve_base_flow, BaseFlow};
    use crate::config::Grid;
    use crate::lincoeff::build_coefficients;

    fn main_coeffs(n: usize) -> (LinearCoefficients, ModelParams) {
        let p = ModelParams::main_case();
        let flow = solve_base_flow(&p, &Grid::new(n).unwrap(), 1e-11, 60).unwrap();
        (build_coefficients(&flow, &p).unwrap(), p)
    }

    #[test]
    fn zero_wavenumber_rejected() {
        let (c, p) = main_coeffs(129);
        assert!(matches!(assemble_pencil(&c, &p, 0.0, 129), Err(Error::Domain(_))));
        assert!(assemble_pencil(&c, &p, 1.0, 128).is_err());
        assert!(assemble_pencil(&c, &p, 1.0, 65).is_err());
    }

    #[test]
    fn structure_and_lambda_free_rows() {
        let (c, p) = main_coeffs(129);
        let pen = assemble_pencil(&c, &p, 1.0, 129).unwrap();
        assert_eq!(pen.size(), 9 * 129);
        let mut expected: Vec<usize> = pen.bc_rows.iter().chain(&pen.poisson_rows).copied().collect();
        expected.sort_unstable();
        assert_eq!(pen.lambda_free_rows(), expected);
        assert_eq!(pen.n_mat.max_outside(pen.bandwidth, pen.bandwidth), 0.0);
        assert_eq!(pen.m_mat.max_outside(0, 0), 0.0);
    }

    #[test]
    fn zero_profiles_give_pure_stencils() {
        let p = ModelParams {
            a_r: 0.0,
            a_m: 0.0,
            sigma_m: 0.0,
            gr: 0.0,
            ..ModelParams::rest_state()
        };
        let grid = Grid::new(129).unwrap();
        let n = grid.n_nodes();
        let flow = BaseFlow {
            grid: grid.clone(),
            params: p,
            u_hat: vec![0.0; n],
            a11_hat: vec![0.0; n],
            a12_hat: vec![0.0; n],
            a22_hat: vec![0.0; n],
            z_hat: vec![1.0; n],
            l_hat: vec![0.0; n],
            p_hat: vec![0.0; n],
            m_hat: 0.0,
            c_bar: 0.0,
            residuals: Default::default(),
            outer_iterations: 0,
            inner_sweeps: 0,
        };
        let c = build_coefficients(&flow, &p).unwrap();
        let pen = assemble_pencil(&c, &p, 1.0, 129).unwrap();
        let h = pen.h;
        // heat row at an interior node is the scaled Dirichlet Laplacian
        let row = index(10, Z);
        let expect = [(index(9, Z), 1.0 / (h * h)), (index(11, Z), 1.0 / (h * h)), (index(10, Z), -2.0 / (h * h) - 1.0)];
        for (col, v) in expect {
            assert!((pen.n_mat.get(row, col) - re(v / p.pr)).norm() < 1e-9 * v.abs());
        }
        let nonzero = pen.n_mat.row_range(row).filter(|&j| pen.n_mat.get(row, j).norm() > 0.0).count();
        assert_eq!(nonzero, 3);
        assert_eq!(pen.n_mat.max_outside(pen.bandwidth, pen.bandwidth), 0.0);
    }
}
