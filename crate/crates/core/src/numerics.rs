//! Quadrature, finite-difference and interpolation kernels on uniform grids.
//!
//! Every integral in the crate goes through composite Simpson. Cumulative
//! integrals use composite Simpson at even nodes; odd nodes add a four-point
//! cubic partial-interval rule to the preceding even node, so the odd/even
//! mismatch is one order above the Simpson error.

/// Composite Simpson over the full sample vector. Requires an odd count ≥ 3.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    assert!(n >= 3 && n % 2 == 1, "composite Simpson needs an odd node count >= 3");
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in (1..n - 1).step_by(2) {
        odd += f[i];
    }
    for i in (2..n - 1).step_by(2) {
        even += f[i];
    }
    h / 3.0 * (f[0] + f[n - 1] + 4.0 * odd + 2.0 * even)
}

/// Cumulative integral from the first node, sampled at every node. The
/// running sum over even nodes is compensated so rounding does not grow with
/// the node count.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3 && n % 2 == 1, "cumulative Simpson needs an odd node count >= 3");
    let mut out = vec![0.0; n];
    let (mut sum, mut carry) = (0.0_f64, 0.0_f64);
    for i in (2..n).step_by(2) {
        let term = h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
        let t = sum + term;
        carry += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        out[i] = sum + carry;
    }
    for i in (1..n).step_by(2) {
        out[i] = out[i - 1]
            + if n < 5 {
                h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1])
            } else if i == 1 {
                h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
            } else {
                h / 24.0 * (-f[i - 2] + 13.0 * f[i - 1] + 13.0 * f[i] - f[i + 1])
            };
    }
    out
}

/// Solves w'' = g on the uniform grid with Dirichlet data w(first) = left,
/// w(last) = right, through the Green's-function form (two nested cumulative
/// passes, no linear solve).
pub fn dirichlet_double_integral(g: &[f64], h: f64, left: f64, right: f64) -> Vec<f64> {
    let inner = cumulative_simpson(g, h);
    let outer = cumulative_simpson(&inner, h);
    let n = g.len();
    let length = h * (n - 1) as f64;
    let slope = (right - left - outer[n - 1]) / length;
    (0..n)
        .map(|i| left + slope * (i as f64 * h) + outer[i])
        .collect()
}

/// Fourth-order first derivative: centered five-point stencil inside,
/// one-sided five-point stencils on the two nodes nearest each wall.
pub fn derivative4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "fourth-order differences need at least 5 nodes");
    let mut d = vec![0.0; n];
    let c = 1.0 / (12.0 * h);
    d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for i in 2..n - 2 {
        d[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    }
    let m = n - 1;
    d[m] = -c * (-25.0 * f[m] + 48.0 * f[m - 1] - 36.0 * f[m - 2] + 16.0 * f[m - 3] - 3.0 * f[m - 4]);
    d[m - 1] =
        -c * (-3.0 * f[m] - 10.0 * f[m - 1] + 18.0 * f[m - 2] - 6.0 * f[m - 3] + f[m - 4]);
    d
}

/// Fourth-order second derivative, one-sided six-point stencils at the walls.
pub fn second_derivative4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 6, "fourth-order second differences need at least 6 nodes");
    let mut d = vec![0.0; n];
    let c = 1.0 / (12.0 * h * h);
    let one_sided0 = |g: &dyn Fn(usize) -> f64| {
        c * (45.0 * g(0) - 154.0 * g(1) + 214.0 * g(2) - 156.0 * g(3) + 61.0 * g(4) - 10.0 * g(5))
    };
    let one_sided1 = |g: &dyn Fn(usize) -> f64| {
        c * (10.0 * g(0) - 15.0 * g(1) - 4.0 * g(2) + 14.0 * g(3) - 6.0 * g(4) + g(5))
    };
    let m = n - 1;
    d[0] = one_sided0(&|k| f[k]);
    d[1] = one_sided1(&|k| f[k]);
    d[m] = one_sided0(&|k| f[m - k]);
    d[m - 1] = one_sided1(&|k| f[m - k]);
    for i in 2..n - 2 {
        d[i] = c * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]);
    }
    d
}

/// Four-point Lagrange interpolation from a uniform grid on [x0, x0 + (n-1)h].
/// Evaluating exactly at a node returns that node's value.
pub fn interpolate_cubic(f: &[f64], x0: f64, h: f64, x: f64) -> f64 {
    let n = f.len();
    assert!(n >= 4);
    let t = (x - x0) / h;
    let mut start = t.floor() as isize - 1;
    start = start.clamp(0, n as isize - 4);
    let start = start as usize;
    let mut acc = 0.0;
    for j in 0..4 {
        let xj = (start + j) as f64;
        let mut w = 1.0;
        for m in 0..4 {
            if m != j {
                let xm = (start + m) as f64;
                w *= (t - xm) / (xj - xm);
            }
        }
        acc += w * f[start + j];
    }
    acc
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> (Vec<f64>, f64) {
        let h = 1.0 / (n - 1) as f64;
        ((0..n).map(|i| -0.5 + i as f64 * h).collect(), h)
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let (y, h) = grid(11);
        let f: Vec<f64> = y.iter().map(|&x| 1.0 + 2.0 * x - 3.0 * x * x + 4.0 * x * x * x).collect();
        // ∫_{-1/2}^{1/2} (1 + 2x - 3x² + 4x³) dx = 1 - 1/4
        assert!((simpson(&f, h) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn cumulative_simpson_is_exact_for_cubics_at_every_node() {
        let (y, h) = grid(9);
        let f: Vec<f64> = y.iter().map(|&x| x * x * x + 3.0 * x * x - x + 2.0).collect();
        let c = cumulative_simpson(&f, h);
        for (i, &x) in y.iter().enumerate() {
            let exact = |t: f64| t.powi(4) / 4.0 + t * t * t - 0.5 * t * t + 2.0 * t;
            assert!((c[i] - (exact(x) - exact(-0.5))).abs() < 1e-14, "node {i}");
        }
    }

    #[test]
    fn double_integral_recovers_polynomial_with_dirichlet_data() {
        let (y, h) = grid(21);
        // w = y^3 + y, w'' = 6y
        let g: Vec<f64> = y.iter().map(|&x| 6.0 * x).collect();
        let w = dirichlet_double_integral(&g, h, -0.625, 0.625);
        for (i, &x) in y.iter().enumerate() {
            assert!((w[i] - (x * x * x + x)).abs() < 1e-13);
        }
    }

    #[test]
    fn fourth_order_derivatives_converge() {
        let err = |n: usize| {
            let (y, h) = grid(n);
            let f: Vec<f64> = y.iter().map(|&x| (2.0 * x).sin()).collect();
            let d1 = derivative4(&f, h);
            let d2 = second_derivative4(&f, h);
            let e1 = y.iter().zip(&d1).map(|(&x, d)| (d - 2.0 * (2.0 * x).cos()).abs()).fold(0.0, f64::max);
            let e2 = y.iter().zip(&d2).map(|(&x, d)| (d + 4.0 * (2.0 * x).sin()).abs()).fold(0.0, f64::max);
            (e1, e2)
        };
        let (a1, a2) = err(33);
        let (b1, b2) = err(65);
        assert!(a1 / b1 > 12.0, "first derivative ratio {}", a1 / b1);
        assert!(a2 / b2 > 10.0, "second derivative ratio {}", a2 / b2);
    }

    #[test]
    fn cubic_interpolation_hits_nodes_and_cubics() {
        let (y, h) = grid(17);
        let f: Vec<f64> = y.iter().map(|&x| x * x * x - x).collect();
        assert_eq!(interpolate_cubic(&f, -0.5, h, y[5]), f[5]);
        let x = 0.123;
        assert!((interpolate_cubic(&f, -0.5, h, x) - (x * x * x - x)).abs() < 1e-14);
        let x = 0.499;
        assert!((interpolate_cubic(&f, -0.5, h, x) - (x * x * x - x)).abs() < 1e-14);
    }
}
