//! The energy functional and its first variation.
//!
//! `E(phi) = 1/2 int (phi')^2 + int W(phi) + 1/2 |cos phi - k|^2_{H^1/2}`.
//!
//! Each term is discretized so that the whole is an exact function of the
//! nodal values with an exact gradient: the exchange term as the piecewise
//! linear Dirichlet sum, the well term by the trapezoid rule, and the stray
//! term through the plan's padded transform. The Euler-Lagrange residual
//! returned by [`el_residual`] is that exact gradient divided by `dx`, so
//! descent on it cannot stall against quadrature mismatch.

use crate::anisotropy::potential;
use crate::error::{Error, Result};
use crate::halfline::{h_half_norm_sq, lambda_fourier, SpectralPlan};
use crate::numerics::{d1_fourth, trapezoid};
use crate::profile::{AnisotropyParams, Profile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub exchange: f64,
    pub anisotropy: f64,
    pub stray: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(exchange: f64, anisotropy: f64, stray: f64) -> EnergyBreakdown {
        EnergyBreakdown { exchange, anisotropy, stray, total: exchange + anisotropy + stray }
    }
}

fn check_plan(plan: &SpectralPlan, profile: &Profile) -> Result<()> {
    if *plan.grid() != *profile.grid() {
        return Err(Error::Precondition(
            "the spectral plan was built for a different grid".into(),
        ));
    }
    Ok(())
}

/// Exchange part as the Dirichlet sum of the piecewise linear interpolant.
pub(crate) fn exchange_p1(phi: &[f64], dx: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..phi.len() - 1 {
        let d = phi[i + 1] - phi[i];
        s += d * d;
    }
    0.5 * s / dx
}

/// Full energy breakdown of a profile.
pub fn energy(plan: &SpectralPlan, profile: &Profile, params: &AnisotropyParams) -> Result<EnergyBreakdown> {
    check_plan(plan, profile)?;
    let dx = profile.grid().dx();
    let phi = profile.phi();
    let exchange = exchange_p1(phi, dx);
    let w: Vec<f64> = phi.iter().map(|&p| potential(params, p).w).collect();
    let anisotropy = trapezoid(&w, dx);
    let excess = profile.excess_m1(params);
    let stray = 0.5 * h_half_norm_sq(plan, &excess);
    Ok(EnergyBreakdown::new(exchange, anisotropy, stray))
}

/// Euler-Lagrange residual
/// `r = -phi'' + (h - cos phi + L(cos phi - k)) sin phi`,
/// zero at the pinned endpoints. Interior entries are exactly the gradient
/// of [`energy`] with respect to the nodal values, divided by `dx`.
pub fn el_residual(plan: &SpectralPlan, profile: &Profile, params: &AnisotropyParams) -> Result<Vec<f64>> {
    check_plan(plan, profile)?;
    let n = profile.grid().n();
    let dx = profile.grid().dx();
    let phi = profile.phi();
    let h = params.h();
    let excess = profile.excess_m1(params);
    let lam = lambda_fourier(plan, &excess);
    let mut r = vec![0.0; n];
    for i in 1..n - 1 {
        let lap = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (dx * dx);
        let (s, c) = phi[i].sin_cos();
        r[i] = -lap + (h - c + lam[i]) * s;
    }
    Ok(r)
}

/// Largest absolute residual entry.
pub fn residual_sup(r: &[f64]) -> f64 {
    r.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

/// Energy breakdown with the exchange part reconstructed from the first
/// component `m1 = cos phi` alone, through `(m1')^2 / (1 - m1^2)`.
///
/// A diagnostic route: it must agree with the phase-variable form wherever
/// the reconstruction is well posed. Fails when some interior node sits on
/// `m1 = +-1`, where the quotient degenerates.
pub fn energy_m1_form(plan: &SpectralPlan, profile: &Profile, params: &AnisotropyParams) -> Result<EnergyBreakdown> {
    check_plan(plan, profile)?;
    let dx = profile.grid().dx();
    let phi = profile.phi();
    let n = phi.len();
    let m1: Vec<f64> = phi.iter().map(|p| p.cos()).collect();
    for (i, &v) in m1.iter().enumerate().take(n - 1).skip(1) {
        if v.abs() >= 1.0 - 1e-8 {
            return Err(Error::Precondition(format!(
                "m1 = {v} at interior node {i}: the first-component form degenerates on the axis"
            )));
        }
    }
    let m1p = d1_fourth(&m1, dx);
    let integrand: Vec<f64> = m1
        .iter()
        .zip(&m1p)
        .map(|(&v, &vp)| vp * vp / (1.0 - v * v))
        .collect();
    let exchange = 0.5 * trapezoid(&integrand, dx);
    let w: Vec<f64> = phi.iter().map(|&p| potential(params, p).w).collect();
    let anisotropy = trapezoid(&w, dx);
    let excess = profile.excess_m1(params);
    let stray = 0.5 * h_half_norm_sq(plan, &excess);
    Ok(EnergyBreakdown::new(exchange, anisotropy, stray))
}
