//! Continuous operators of the linearized problem, evaluated by hand on a
//! smooth manufactured field and compared with the assembled pencil rows.

use num_complex::Complex64;
use polychan_core::numerics::interpolate_cubic;
use polychan_core::oracle::assemble_pencil;
use polychan_core::oracle::pencil::{index, A11, A12, A22, FIELDS, L, M, OMEGA, U, V, Z};
use polychan_core::{LinearCoefficients, ModelParams};

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// q_f(y) = a_f·exp(s_f·y), with value, first and second derivative.
struct Manufactured {
    amp: [C; FIELDS],
    rate: [C; FIELDS],
}

impl Manufactured {
    fn new() -> Self {
        let mut amp = [c(0.0, 0.0); FIELDS];
        let mut rate = [c(0.0, 0.0); FIELDS];
        for f in 0..FIELDS {
            amp[f] = c(1.0 + 0.1 * f as f64, 0.3 - 0.05 * f as f64);
            rate[f] = c(0.7 - 0.2 * f as f64, 1.3 + 0.4 * f as f64);
        }
        Manufactured { amp, rate }
    }
    fn d(&self, f: usize, y: f64, order: i32) -> C {
        self.amp[f] * (self.rate[f] * y).exp() * self.rate[f].powi(order)
    }
}

/// Continuous coefficient values at y, by the same four-point resampling the
/// assembly uses.
struct Profiles<'a> {
    c: &'a LinearCoefficients,
}

impl Profiles<'_> {
    fn at(&self, v: &[f64], y: f64) -> f64 {
        interpolate_cubic(v, -0.5, self.c.grid.h(), y)
    }
}

/// Continuous right-hand sides written from the model equations: each row
/// reads λ·q_f = −op_f(q).
fn op_momentum_x(pr: &Profiles, p: &ModelParams, w: f64, q: &Manufactured, y: f64) -> C {
    let k = pr.c;
    let iw = c(0.0, w);
    let (u, up, z, zp) = (pr.at(&k.u_hat, y), pr.at(&k.u_hat_prime, y), pr.at(&k.z_hat, y), pr.at(&k.z_hat_prime, y));
    let (a11, a12, a22, a12p) = (pr.at(&k.alpha11, y), pr.at(&k.alpha12, y), pr.at(&k.alpha22, y), pr.at(&k.alpha12_prime, y));
    let lp = pr.at(&k.l_hat_prime, y);
    let mag = p.sigma_m * (1.0 + p.lambda_hat);
    let v = |f| q.d(f, y, 0);
    let d = |f| q.d(f, y, 1);
    iw * u * v(U) + up * v(V) + iw * v(OMEGA) - iw * z * v(A11) + iw * z * v(A22)
        - (zp * v(A12) + z * d(A12))
        + iw * (a22 - a11) * v(Z)
        - (a12p * v(Z) + a12 * d(Z))
        + (iw * mag - p.sigma_m * lp) * v(M)
        - mag * d(L)
}

fn op_momentum_y(pr: &Profiles, p: &ModelParams, w: f64, q: &Manufactured, y: f64) -> C {
    let k = pr.c;
    let iw = c(0.0, w);
    let (u, z, a12) = (pr.at(&k.u_hat, y), pr.at(&k.z_hat, y), pr.at(&k.alpha12, y));
    let (l, lp) = (pr.at(&k.l_hat, y), pr.at(&k.l_hat_prime, y));
    let v = |f| q.d(f, y, 0);
    let d = |f| q.d(f, y, 1);
    iw * u * v(V) + d(OMEGA) - iw * z * v(A12) + (-iw * a12 - p.gr) * v(Z) - iw * p.sigma_m * l * v(M)
        + p.sigma_m * l * d(L)
        + p.sigma_m * lp * v(L)
}

/// y-derivative of the normal momentum operator, differentiated by hand.
fn op_momentum_y_prime(pr: &Profiles, p: &ModelParams, w: f64, q: &Manufactured, y: f64) -> C {
    let k = pr.c;
    let iw = c(0.0, w);
    let (u, up, z, zp) = (pr.at(&k.u_hat, y), pr.at(&k.u_hat_prime, y), pr.at(&k.z_hat, y), pr.at(&k.z_hat_prime, y));
    let (a12, a12p) = (pr.at(&k.alpha12, y), pr.at(&k.alpha12_prime, y));
    let (l, lp, lpp) = (pr.at(&k.l_hat, y), pr.at(&k.l_hat_prime, y), pr.at(&k.l_hat_second, y));
    let s = p.sigma_m;
    let v = |f| q.d(f, y, 0);
    let d = |f| q.d(f, y, 1);
    let dd = |f| q.d(f, y, 2);
    iw * (up * v(V) + u * d(V)) + dd(OMEGA) - iw * (zp * v(A12) + z * d(A12)) - iw * a12p * v(Z)
        + (-iw * a12 - p.gr) * d(Z)
        - iw * s * (lp * v(M) + l * d(M))
        + s * (lp * d(L) + l * dd(L))
        + s * (lpp * v(L) + lp * d(L))
}

fn op_stress(pr: &Profiles, w: f64, q: &Manufactured, y: f64, f: usize) -> C {
    let k = pr.c;
    let iw = c(0.0, w);
    let u = pr.at(&k.u_hat, y);
    let (al1, al2, al12) = (pr.at(&k.alpha1, y), pr.at(&k.alpha2, y), pr.at(&k.alpha12, y));
    let v = |f| q.d(f, y, 0);
    let d = |f| q.d(f, y, 1);
    let mut out = iw * u * v(f);
    let r = match f {
        A11 => {
            out += -2.0 * al1 * iw * v(U) - 2.0 * al12 * d(U) + pr.at(&k.alpha11_prime, y) * v(V) + pr.at(&k.r11, y) * v(Z);
            [&k.r33, &k.r34, &k.r35]
        }
        A12 => {
            out += -al1 * iw * v(V) - al2 * d(U) + pr.at(&k.alpha12_prime, y) * v(V) + pr.at(&k.r12, y) * v(Z);
            [&k.r43, &k.r44, &k.r45]
        }
        _ => {
            out += -2.0 * al12 * iw * v(V) - 2.0 * al2 * d(V) + pr.at(&k.alpha22_prime, y) * v(V);
            [&k.r53, &k.r54, &k.r55]
        }
    };
    out + pr.at(r[0], y) * v(A11) + pr.at(r[1], y) * v(A12) + pr.at(r[2], y) * v(A22)
}

fn op_heat(pr: &Profiles, p: &ModelParams, w: f64, q: &Manufactured, y: f64) -> C {
    let k = pr.c;
    let iw = c(0.0, w);
    let (u, up, z, zp) = (pr.at(&k.u_hat, y), pr.at(&k.u_hat_prime, y), pr.at(&k.z_hat, y), pr.at(&k.z_hat_prime, y));
    let (a11h, a12h, a22h, l) = (pr.at(&k.a11_hat, y), pr.at(&k.a12_hat, y), pr.at(&k.a22_hat, y), pr.at(&k.l_hat, y));
    let one_l = 1.0 + p.lambda_hat;
    let ar = p.a_r / p.pr;
    let am = p.a_m * p.sigma_m / p.pr;
    let v = |f| q.d(f, y, 0);
    let d = |f| q.d(f, y, 1);
    let dd = |f| q.d(f, y, 2);
    (iw * u - ar * up * a12h) * v(Z) + zp * v(V) - (dd(Z) - w * w * v(Z)) / p.pr
        - (ar * z * a11h + am * l * l) * iw * v(U)
        - (ar * z * a12h + am * l * one_l) * iw * v(V)
        - (ar * z * a12h + am * l * one_l) * d(U)
        - (ar * z * a22h + am * one_l * one_l) * d(V)
        - ar * z * up * p.re * v(A12)
        - am * up * one_l * v(L)
        - am * up * l * v(M)
}

fn op_induction_l(pr: &Profiles, p: &ModelParams, w: f64, q: &Manufactured, y: f64) -> C {
    let k = pr.c;
    let iw = c(0.0, w);
    let (u, up, l, lp) = (pr.at(&k.u_hat, y), pr.at(&k.u_hat_prime, y), pr.at(&k.l_hat, y), pr.at(&k.l_hat_prime, y));
    let v = |f| q.d(f, y, 0);
    let d = |f| q.d(f, y, 1);
    iw * u * v(L) + lp * v(V) - iw * l * v(U) - (1.0 + p.lambda_hat) * d(U) - up * v(M)
        - p.b_m * (q.d(L, y, 2) - w * w * v(L))
}

fn op_induction_m(pr: &Profiles, p: &ModelParams, w: f64, q: &Manufactured, y: f64) -> C {
    let k = pr.c;
    let iw = c(0.0, w);
    let (u, l) = (pr.at(&k.u_hat, y), pr.at(&k.l_hat, y));
    let v = |f| q.d(f, y, 0);
    iw * u * v(M) - iw * l * v(V) - (1.0 + p.lambda_hat) * q.d(V, y, 1)
        - p.b_m * (q.d(M, y, 2) - w * w * v(M))
}

/// Largest mismatch between the assembled residual N q − λ₀ M q and the
/// continuous one, per row group.
#[derive(Debug, Default, Clone, Copy)]
pub struct Errors {
    pub dynamic: f64,
    pub stress: f64,
    pub poisson_interior: f64,
    pub poisson_near_wall: f64,
    pub wall: f64,
}

pub fn manufactured_errors(coeffs: &LinearCoefficients, p: &ModelParams, n: usize) -> Errors {
    let w = 1.3;
    let lambda0 = c(-0.4, 2.1);
    let pen = assemble_pencil(coeffs, p, w, n).unwrap();
    let q = Manufactured::new();
    let h = pen.h;
    let y_node = |i: usize| -0.5 + i as f64 * h;
    let mut x = vec![c(0.0, 0.0); pen.size()];
    for i in 0..n {
        for f in [U, V, OMEGA, Z, L, M] {
            x[index(i, f)] = q.d(f, y_node(i), 0);
        }
        if i + 1 < n {
            for f in [A11, A12, A22] {
                x[index(i, f)] = q.d(f, y_node(i) + 0.5 * h, 0);
            }
        }
    }
    let nq = pen.n_mat.matvec(&x);
    let mq = pen.m_mat.matvec(&x);
    let discrete = |row: usize| nq[row] - lambda0 * mq[row];
    let pr = Profiles { c: coeffs };
    let mut e = Errors::default();
    let bump = |slot: &mut f64, a: C, b: C| *slot = slot.max((a - b).norm());
    for i in 1..n - 1 {
        let y = y_node(i);
        let dynamic = [
            (U, op_momentum_x(&pr, p, w, &q, y)),
            (V, op_momentum_y(&pr, p, w, &q, y)),
            (Z, op_heat(&pr, p, w, &q, y)),
            (L, op_induction_l(&pr, p, w, &q, y)),
            (M, op_induction_m(&pr, p, w, &q, y)),
        ];
        for (f, op) in dynamic {
            bump(&mut e.dynamic, discrete(index(i, f)), -op - lambda0 * q.d(f, y, 0));
        }
        let poisson = c(0.0, w) * op_momentum_x(&pr, p, w, &q, y) + op_momentum_y_prime(&pr, p, w, &q, y);
        let slot = if i == 1 || i == n - 2 { &mut e.poisson_near_wall } else { &mut e.poisson_interior };
        bump(slot, discrete(index(i, OMEGA)), -poisson);
    }
    for j in 0..n - 1 {
        let y = y_node(j) + 0.5 * h;
        for f in [A11, A12, A22] {
            bump(&mut e.stress, discrete(index(j, f)), -op_stress(&pr, w, &q, y, f) - lambda0 * q.d(f, y, 0));
        }
    }
    for i in [0, n - 1] {
        let y = y_node(i);
        bump(&mut e.wall, discrete(index(i, OMEGA)), -op_momentum_y(&pr, p, w, &q, y));
        for f in [U, V, Z, L, M] {
            bump(&mut e.wall, discrete(index(i, f)), q.d(f, y, 0));
        }
    }
    e
}
