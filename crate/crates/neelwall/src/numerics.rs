//! Small numerical building blocks shared across the crate: finite
//! differences, quadrature, adaptive integration, and least squares.

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut s = 0.5 * (values[0] + values[n - 1]);
    for v in &values[1..n - 1] {
        s += v;
    }
    s * dx
}

/// First derivative, second order: centered in the interior, one-sided at the
/// two boundary nodes.
pub fn d1(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "need at least 3 nodes to differentiate");
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    }
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
    out
}

/// Second derivative, second order: centered in the interior, one-sided at
/// the two boundary nodes.
pub fn d2(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 4, "need at least 4 nodes for a second derivative");
    let dx2 = dx * dx;
    let mut out = vec![0.0; n];
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dx2;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / dx2;
    }
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / dx2;
    out
}

/// First derivative, fourth order in the interior (falls back to the
/// second-order stencils within two nodes of the boundary).
pub fn d1_fourth(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = d1(f, dx);
    if n >= 5 {
        for i in 2..n - 2 {
            out[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * dx);
        }
    }
    out
}

/// Ordinary least squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    assert!(x.len() >= 2, "need at least two points for a line fit");
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LineFit { slope, intercept, r_squared }
}

/// Adaptive Simpson integration with an absolute error target.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Positions where the nodal sequence `f` crosses `level` transversally,
/// linearly interpolated between nodes. Nodes exactly on the level are
/// treated as crossings when the neighbours straddle it.
pub fn level_crossings(x: &[f64], f: &[f64], level: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..f.len() - 1 {
        let a = f[i] - level;
        let b = f[i + 1] - level;
        if a == 0.0 {
            // counted via the previous interval unless it starts the array
            if i == 0 && b != 0.0 {
                out.push(x[0]);
            }
            continue;
        }
        if a * b < 0.0 {
            let t = a / (a - b);
            out.push(x[i] + t * (x[i + 1] - x[i]));
        } else if b == 0.0 {
            let past_end = i + 2 >= f.len();
            let c = if past_end { 0.0 } else { f[i + 2] - level };
            if a * c < 0.0 || (past_end && a != 0.0) {
                out.push(x[i + 1]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trapezoid_integrates_parabola() {
        let n = 2001;
        let dx = 2.0 / (n as f64 - 1.0);
        let vals: Vec<f64> = (0..n).map(|i| (-1.0 + i as f64 * dx).powi(2)).collect();
        assert_relative_eq!(trapezoid(&vals, dx), 2.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn derivatives_are_second_order() {
        let check = |n: usize| -> (f64, f64) {
            let dx = 2.0 / (n as f64 - 1.0);
            let f: Vec<f64> = (0..n).map(|i| (-1.0 + i as f64 * dx).sin()).collect();
            let d1f = d1(&f, dx);
            let d2f = d2(&f, dx);
            let mut e1: f64 = 0.0;
            let mut e2: f64 = 0.0;
            for i in 0..n {
                let x: f64 = -1.0 + i as f64 * dx;
                e1 = e1.max((d1f[i] - x.cos()).abs());
                e2 = e2.max((d2f[i] + x.sin()).abs());
            }
            (e1, e2)
        };
        let (a1, a2) = check(101);
        let (b1, b2) = check(201);
        assert!(a1 / b1 > 3.4, "first derivative not second order: {a1} vs {b1}");
        assert!(a2 / b2 > 3.4, "second derivative not second order: {a2} vs {b2}");
    }

    #[test]
    fn fourth_order_derivative_beats_second_order() {
        let n = 401;
        let dx = 2.0 / (n as f64 - 1.0);
        let f: Vec<f64> = (0..n).map(|i| (3.0 * (-1.0 + i as f64 * dx)).sin()).collect();
        let d2nd = d1(&f, dx);
        let d4th = d1_fourth(&f, dx);
        let mut e2: f64 = 0.0;
        let mut e4: f64 = 0.0;
        for i in 10..n - 10 {
            let x: f64 = -1.0 + i as f64 * dx;
            let exact = 3.0 * (3.0 * x).cos();
            e2 = e2.max((d2nd[i] - exact).abs());
            e4 = e4.max((d4th[i] - exact).abs());
        }
        assert!(e4 < e2 / 50.0, "fourth order {e4} vs second order {e2}");
    }

    #[test]
    fn simpson_matches_closed_forms() {
        let gauss = adaptive_simpson(&|t: f64| (-t * t).exp(), -8.0, 8.0, 1e-12);
        assert_relative_eq!(gauss, std::f64::consts::PI.sqrt(), epsilon = 1e-10);
        let log2 = adaptive_simpson(&|t: f64| 1.0 / t, 1.0, 2.0, 1e-12);
        assert_relative_eq!(log2, std::f64::consts::LN_2, epsilon = 1e-10);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|&t| 3.0 - 2.0 * t).collect();
        let fit = linear_fit(&x, &y);
        assert_relative_eq!(fit.slope, -2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, 3.0, epsilon = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn crossings_of_a_sine() {
        let n = 1001;
        let dx = 10.0 / (n as f64 - 1.0);
        let x: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();
        let f: Vec<f64> = x.iter().map(|&t| t.sin()).collect();
        let c = level_crossings(&x, &f, 0.0);
        // sin crosses zero at pi, 2pi, 3pi inside (0, 10); the endpoint x = 0
        // starts exactly on the level
        let interior: Vec<f64> = c.into_iter().filter(|&t| t > 0.5).collect();
        assert_eq!(interior.len(), 3);
        for (i, t) in interior.iter().enumerate() {
            assert_relative_eq!(*t, (i as f64 + 1.0) * std::f64::consts::PI, epsilon = 1e-4);
        }
    }
}
