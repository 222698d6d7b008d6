//! The nonlocal calculus on the boundary line of the upper half plane.
//!
//! The Dirichlet-to-Neumann operator of the half plane acts in Fourier as
//! multiplication by `-|xi|`; equivalently it is the principal-value kernel
//! `(1/pi) pv-int (f(t) - f(x)) / (t - x)^2 dt`. Both routes are implemented
//! and cross-validated. The induced quadratic form is the homogeneous `H^1/2`
//! seminorm, computed spectrally, by the symmetric double integral, and (as a
//! third, independent check) by the Dirichlet energy of the harmonic
//! extension on a truncated strip.

use crate::error::{Error, Result};
use crate::numerics::{d1, d2};
use crate::profile::Grid;
use rustfft::{num_complex::Complex, Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Default zero-padding ratio for spectral transforms. Padding pushes the
/// periodic images of the data apart; their residual interaction through the
/// `1/x^2` kernel scales like `(pad * 2L)^-2`.
pub const DEFAULT_PAD_FACTOR: usize = 4;

fn next_pow2(n: usize) -> usize {
    let mut m = 1;
    while m < n {
        m <<= 1;
    }
    m
}

/// Zero-padded FFT plan bound to a grid: ring length, frequency array, and
/// cached transform objects.
pub struct SpectralPlan {
    grid: Grid,
    pad_factor: usize,
    m: usize,
    xi: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl SpectralPlan {
    pub fn new(grid: Grid, pad_factor: usize) -> Result<SpectralPlan> {
        if pad_factor < 2 {
            return Err(Error::Precondition(format!(
                "pad factor must be at least 2, got {pad_factor}"
            )));
        }
        let m = next_pow2(grid.n() * pad_factor);
        let dx = grid.dx();
        let xi = (0..m)
            .map(|k| {
                let kk = if k <= m / 2 { k as i64 } else { k as i64 - m as i64 };
                2.0 * PI * kk as f64 / (m as f64 * dx)
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(SpectralPlan {
            grid,
            pad_factor,
            m,
            xi,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn pad_factor(&self) -> usize {
        self.pad_factor
    }

    /// Ring length (number of spectral nodes).
    pub fn ring_len(&self) -> usize {
        self.m
    }

    /// Signed frequencies of the padded ring.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    fn forward(&self, f: &[f64]) -> Vec<Complex<f64>> {
        assert_eq!(f.len(), self.grid.n(), "operand length must match the plan's grid");
        let mut buf = vec![Complex::new(0.0, 0.0); self.m];
        for (b, &v) in buf.iter_mut().zip(f) {
            b.re = v;
        }
        self.fwd.process(&mut buf);
        buf
    }

    /// Apply a real Fourier multiplier and restrict back to the grid.
    pub fn apply_multiplier<F: Fn(f64) -> f64>(&self, f: &[f64], mult: F) -> Vec<f64> {
        let mut spec = self.forward(f);
        for (s, &xi) in spec.iter_mut().zip(&self.xi) {
            let m = mult(xi);
            s.re *= m;
            s.im *= m;
        }
        self.inv.process(&mut spec);
        let scale = 1.0 / self.m as f64;
        spec[..self.grid.n()].iter().map(|c| c.re * scale).collect()
    }

    /// The seminorm square `int |xi| |Ff|^2 dxi` of the zero-extended operand.
    pub fn seminorm_sq(&self, f: &[f64]) -> f64 {
        let spec = self.forward(f);
        let dx = self.grid.dx();
        let mut s = 0.0;
        for (c, &xi) in spec.iter().zip(&self.xi) {
            s += xi.abs() * (c.re * c.re + c.im * c.im);
        }
        s * dx / self.m as f64
    }
}

fn warn_if_not_decaying(f: &[f64], what: &str) {
    let max = f.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if max > 0.0 {
        let edge = f[0].abs().max(f[f.len() - 1].abs());
        if edge > 1e-6 * max {
            log::warn!("{what}: operand does not decay at the grid ends (edge/max = {:.2e})", edge / max);
        }
    }
}

/// Dirichlet-to-Neumann operator by the spectral route: multiplier `-|xi|`
/// on the zero-padded ring.
pub fn lambda_fourier(plan: &SpectralPlan, f: &[f64]) -> Vec<f64> {
    warn_if_not_decaying(f, "lambda_fourier");
    plan.apply_multiplier(f, |xi| -xi.abs())
}

/// Dirichlet-to-Neumann operator by the principal-value kernel: midpoint
/// quadrature off the diagonal, a curvature correction `f'' dx / (2 pi)` for
/// the singular cell, and analytic closure of the constant tails.
pub fn lambda_pv(grid: &Grid, f: &[f64]) -> Vec<f64> {
    let n = grid.n();
    assert_eq!(f.len(), n);
    let dx = grid.dx();
    let l = grid.l();
    let fpp = d2(f, dx);
    let xs = grid.xs();
    let edge = l + 0.5 * dx;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let xi = xs[i];
        let fi = f[i];
        let mut s = 0.0;
        for j in 0..n {
            if j != i {
                let d = xs[j] - xi;
                s += (f[j] - fi) / (d * d);
            }
        }
        s *= dx;
        s += (f[0] - fi) / (edge + xi);
        s += (f[n - 1] - fi) / (edge - xi);
        out[i] = s / PI + fpp[i] * dx / (2.0 * PI);
    }
    out
}

/// Squared homogeneous `H^1/2` seminorm (spectral route).
pub fn h_half_norm_sq(plan: &SpectralPlan, f: &[f64]) -> f64 {
    plan.seminorm_sq(f)
}

/// `H^1/2` inner product by polarization of the spectral seminorm.
pub fn h_half_inner(plan: &SpectralPlan, f: &[f64], g: &[f64]) -> f64 {
    let n = f.len();
    assert_eq!(g.len(), n);
    let plus: Vec<f64> = (0..n).map(|i| f[i] + g[i]).collect();
    let minus: Vec<f64> = (0..n).map(|i| f[i] - g[i]).collect();
    0.25 * (plan.seminorm_sq(&plus) - plan.seminorm_sq(&minus))
}

/// `H^1/2` inner product by the symmetric double integral
/// `(1/2pi) int int (f(s)-f(t))(g(s)-g(t)) / (s-t)^2 ds dt`, with the diagonal
/// cells contributing `f' g' dx^2` and constant tails closed analytically.
/// Operands whose two boundary values differ make the tail-by-tail part
/// diverge; that piece is skipped with a warning.
pub fn h_half_inner_gagliardo(grid: &Grid, f: &[f64], g: &[f64]) -> f64 {
    let n = grid.n();
    assert_eq!(f.len(), n);
    assert_eq!(g.len(), n);
    let dx = grid.dx();
    let l = grid.l();
    let xs = grid.xs();
    let fp = d1(f, dx);
    let gp = d1(g, dx);
    let df_ends = f[n - 1] - f[0];
    let dg_ends = g[n - 1] - g[0];
    if df_ends.abs() > 1e-9 && dg_ends.abs() > 1e-9 {
        log::warn!(
            "h_half_inner_gagliardo: boundary values differ on both operands; the divergent tail pair is skipped"
        );
    }
    let mut core = 0.0;
    for i in 0..n {
        for j in 0..i {
            let d = xs[i] - xs[j];
            core += (f[i] - f[j]) * (g[i] - g[j]) / (d * d);
        }
    }
    core *= 2.0; // symmetric off-diagonal pairs
    core *= dx * dx;
    let mut diag = 0.0;
    for i in 0..n {
        diag += fp[i] * gp[i];
    }
    diag *= dx * dx;
    // one grid variable, one tail variable; the (s, t) symmetry doubles it
    let edge = l + 0.5 * dx;
    let mut tails = 0.0;
    for i in 0..n {
        tails += (f[n - 1] - f[i]) * (g[n - 1] - g[i]) / (edge - xs[i]);
        tails += (f[0] - f[i]) * (g[0] - g[i]) / (edge + xs[i]);
    }
    tails *= 2.0 * dx;
    (core + diag + tails) / (2.0 * PI)
}

/// Harmonic extension of grid data to a list of heights above the boundary.
#[derive(Debug, Clone)]
pub struct HalfPlaneField {
    pub xs: Vec<f64>,
    pub levels: Vec<f64>,
    /// `values[level_index][node_index]`
    pub values: Vec<Vec<f64>>,
}

/// Poisson integral of the piecewise-linear interpolant of `f`, with the
/// constant tails beyond the grid closed by the arctangent antiderivative.
/// Exact for affine data, so constants extend to constants at every height.
pub fn harmonic_extension_v(grid: &Grid, f: &[f64], x2_levels: &[f64]) -> Result<HalfPlaneField> {
    let n = grid.n();
    assert_eq!(f.len(), n);
    if x2_levels.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::Precondition("extension heights must be positive".into()));
    }
    let xs = grid.xs();
    let l = grid.l();
    let mut values = Vec::with_capacity(x2_levels.len());
    for &y in x2_levels {
        let mut row = vec![0.0; n];
        for (idx, &x) in xs.iter().enumerate() {
            // node-wise antiderivatives shared by adjacent cells
            let at: Vec<f64> = xs.iter().map(|&t| ((t - x) / y).atan()).collect();
            let lg: Vec<f64> = xs.iter().map(|&t| ((t - x) * (t - x) + y * y).ln()).collect();
            let mut v = 0.0;
            for j in 0..n - 1 {
                let b = (f[j + 1] - f[j]) / (xs[j + 1] - xs[j]);
                let a0 = f[j] - b * (xs[j] - x);
                v += a0 * (at[j + 1] - at[j]) + 0.5 * y * b * (lg[j + 1] - lg[j]);
            }
            v += f[0] * (at[0] + PI / 2.0);
            v += f[n - 1] * (PI / 2.0 - at[n - 1]);
            row[idx] = v / PI;
        }
        let _ = l;
        values.push(row);
    }
    Ok(HalfPlaneField { xs, levels: x2_levels.to_vec(), values })
}

/// Spectral route for the same extension: multiplier `exp(-|xi| x2)`.
pub fn harmonic_extension_spectral(plan: &SpectralPlan, f: &[f64], x2_levels: &[f64]) -> Result<HalfPlaneField> {
    if x2_levels.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::Precondition("extension heights must be positive".into()));
    }
    let values = x2_levels
        .iter()
        .map(|&y| plan.apply_multiplier(f, |xi| (-xi.abs() * y).exp()))
        .collect();
    Ok(HalfPlaneField { xs: plan.grid().xs(), levels: x2_levels.to_vec(), values })
}

/// Sine transform `S_k = sum_j f_j sin(pi j k / (nd + 1))`, `j, k = 1..nd`,
/// computed through a complex FFT of the odd extension.
struct DstPlan {
    nd: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl DstPlan {
    fn new(nd: usize) -> DstPlan {
        let mut planner = FftPlanner::new();
        DstPlan { nd, fft: planner.plan_fft_forward(2 * (nd + 1)) }
    }

    fn transform(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.nd);
        let m2 = 2 * (self.nd + 1);
        let mut buf = vec![Complex::new(0.0, 0.0); m2];
        for j in 0..self.nd {
            buf[j + 1].re = f[j];
            buf[m2 - 1 - j].re = -f[j];
        }
        self.fft.process(&mut buf);
        (1..=self.nd).map(|k| -0.5 * buf[k].im).collect()
    }
}

/// Dirichlet energy of the five-point finite-difference harmonic extension on
/// the truncated strip `[-L, L] x [0, x2_max]`, with the boundary data on the
/// bottom edge and zero on the other three sides. Solved exactly by a sine
/// expansion in the horizontal direction (one three-term recurrence per mode),
/// so there is no iteration to converge.
///
/// For data that decays inside the strip this approximates the squared
/// `H^1/2` seminorm; the stray term of the energy functional is half of it.
pub fn stray_energy_pde(grid: &Grid, f: &[f64], x2_max: f64, n2: usize) -> Result<f64> {
    let n = grid.n();
    assert_eq!(f.len(), n);
    if !(x2_max > 0.0) || n2 < 8 {
        return Err(Error::Precondition(format!(
            "need a positive strip height and at least 8 vertical intervals, got {x2_max}, {n2}"
        )));
    }
    warn_if_not_decaying(f, "stray_energy_pde");
    let dx = grid.dx();
    let dy = x2_max / n2 as f64;
    let nd = n - 2;
    let dst = DstPlan::new(nd);
    let coeff = dst.transform(&f[1..n - 1]);
    // vertical decay rate per mode of the five-point stencil
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n2 + 1);
    rows.push(f.to_vec());
    let rates: Vec<f64> = (1..=nd)
        .map(|k| {
            let lam = (2.0 - 2.0 * (PI * k as f64 / (nd as f64 + 1.0)).cos()) / (dx * dx);
            let beta = 2.0 + lam * dy * dy;
            let mu = 0.5 * (beta + (beta * beta - 4.0).sqrt());
            1.0 / mu
        })
        .collect();
    let norm = 2.0 / (nd as f64 + 1.0);
    for j in 1..=n2 {
        let mut ck = vec![0.0; nd];
        for k in 0..nd {
            let r = rates[k];
            let denom = 1.0 - r.powi(2 * n2 as i32);
            let decays = r.powi(j as i32) * (1.0 - r.powi(2 * (n2 - j) as i32));
            ck[k] = coeff[k] * decays / denom;
        }
        let interior = dst.transform(&ck);
        let mut row = vec![0.0; n];
        for (i, v) in interior.into_iter().enumerate() {
            row[i + 1] = v * norm;
        }
        rows.push(row);
    }
    // trapezoid-weighted sum of squared edge differences
    let mut energy = 0.0;
    for (j, row) in rows.iter().enumerate() {
        let w = if j == 0 || j == n2 { 0.5 } else { 1.0 };
        let mut s = 0.0;
        for i in 0..n - 1 {
            let d = row[i + 1] - row[i];
            s += d * d;
        }
        energy += w * s * dy / dx;
    }
    for j in 0..n2 {
        let mut s = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let d = rows[j + 1][i] - rows[j][i];
            s += w * d * d;
        }
        energy += s * dx / dy;
    }
    Ok(energy)
}
