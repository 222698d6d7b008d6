//! Energy minimization over profiles with pinned ends.
//!
//! The scheme is preconditioned gradient descent: the Euler-Lagrange residual
//! is the exact gradient of the discrete energy, it is smoothed by inverting
//! `I - Laplacian` with pinned ends (a tridiagonal solve, which caps the
//! stiffness of the exchange term while respecting the boundary), and the
//! step size adapts by Armijo backtracking. The pinned endpoints make the
//! winding number an exact invariant of the flow.
//!
//! Profiles whose boundary lifts average to a multiple of `pi` admit the odd
//! symmetry `phi(-x) = 2 pi n - phi(x)`; [`symmetrize`] projects onto it,
//! which removes the slow translational drift mode.

use crate::energy::{el_residual, energy, residual_sup, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::halfline::{SpectralPlan, DEFAULT_PAD_FACTOR};
use crate::numerics::{d1, level_crossings};
use crate::profile::{
    boundary_lifts, initial_guess, AnisotropyParams, Degree, Grid, GuessStyle, Profile,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct MinimizeConfig {
    pub max_iters: usize,
    /// Stop once the residual sup norm falls below this.
    pub grad_tol: f64,
    pub dt_init: f64,
    pub dt_max: f64,
    /// Armijo acceptance fraction.
    pub armijo: f64,
    /// Project onto the odd symmetry every this many accepted steps
    /// (0 = never). Ignored for profiles that do not qualify.
    pub symmetrize_every: usize,
    pub pad_factor: usize,
}

impl Default for MinimizeConfig {
    fn default() -> MinimizeConfig {
        MinimizeConfig {
            max_iters: 20_000,
            grad_tol: 1e-6,
            dt_init: 0.5,
            dt_max: 2.0,
            armijo: 0.1,
            symmetrize_every: 0,
            pad_factor: DEFAULT_PAD_FACTOR,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeReport {
    pub profile: Profile,
    pub energy: EnergyBreakdown,
    pub residual_sup: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solve `(I - d^2/dx^2) g = r` with `g = 0` at both ends (Thomas pass).
/// Symmetric positive definite on the pinned subspace, so the preconditioned
/// Hessian keeps real nonnegative eigenvalues of moderate size.
fn precondition_dirichlet(r: &[f64], dx: f64) -> Vec<f64> {
    let n = r.len();
    let m = n - 2;
    let diag = 1.0 + 2.0 / (dx * dx);
    let off = -1.0 / (dx * dx);
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut denom = diag;
    c[0] = off / denom;
    d[0] = r[1] / denom;
    for i in 1..m {
        denom = diag - off * c[i - 1];
        c[i] = off / denom;
        d[i] = (r[i + 1] - off * d[i - 1]) / denom;
    }
    let mut g = vec![0.0; n];
    g[m] = d[m - 1];
    for i in (0..m - 1).rev() {
        g[i + 1] = d[i] - c[i] * g[i + 2];
    }
    g
}

fn symmetry_qualifies(profile: &Profile) -> bool {
    let half_sum = 0.5 * (profile.ell_minus() + profile.ell_plus());
    (half_sum / PI - (half_sum / PI).round()).abs() < 1e-9
}

/// Project a profile onto the odd symmetry `phi(-x) = 2 c - phi(x)` about
/// its central passage. The axis level `c = (ell_- + ell_+) / 2` must be a
/// multiple of `pi`, otherwise the symmetry would not preserve the well
/// structure. Of the three symmetric candidates (averaged, right half
/// mirrored, left half mirrored) the lowest-energy one is returned, and
/// never one that raises the energy measurably.
pub fn symmetrize(plan: &SpectralPlan, profile: &Profile, params: &AnisotropyParams) -> Result<Profile> {
    let half_sum = 0.5 * (profile.ell_minus() + profile.ell_plus());
    let n_mid = (half_sum / PI).round();
    if (half_sum / PI - n_mid).abs() > 1e-9 {
        return Err(Error::Degree(format!(
            "no odd symmetry is compatible with lifts {} and {}: their mean {half_sum} is not a multiple of pi",
            profile.ell_minus(),
            profile.ell_plus()
        )));
    }
    let level = n_mid * PI;
    let grid = *profile.grid();
    let xs = grid.xs();
    let crossings = level_crossings(&xs, profile.phi(), level);
    if crossings.is_empty() {
        return Err(Error::Precondition(format!(
            "the profile never passes through the symmetry level {level}"
        )));
    }
    let center = crossings[(crossings.len() - 1) / 2];

    // recenter by resampling at shifted nodes (lifts extend constantly)
    let shifted = if center.abs() < 1e-9 * grid.dx() {
        profile.clone()
    } else {
        let at: Vec<f64> = xs.iter().map(|&x| x + center).collect();
        let q = crate::profile::interp_linear(profile, &at);
        profile.with_phi(q)?
    };

    let n = grid.n();
    let psi = shifted.phi();
    let rev = |i: usize| n - 1 - i;
    let averaged: Vec<f64> = (0..n)
        .map(|i| level + 0.5 * (psi[i] - psi[rev(i)]))
        .collect();
    let right: Vec<f64> = (0..n)
        .map(|i| {
            if 2 * i >= n - 1 {
                psi[i]
            } else {
                2.0 * level - psi[rev(i)]
            }
        })
        .collect();
    let left: Vec<f64> = (0..n)
        .map(|i| {
            if 2 * i <= n - 1 {
                psi[i]
            } else {
                2.0 * level - psi[rev(i)]
            }
        })
        .collect();

    let e_in = energy(plan, profile, params)?.total;
    let mut best: Option<(f64, Profile)> = None;
    for cand in [averaged, right, left] {
        let q = shifted.with_phi(cand)?;
        let e = energy(plan, &q, params)?.total;
        if best.as_ref().map_or(true, |(eb, _)| e < *eb) {
            best = Some((e, q));
        }
    }
    let (e_best, q_best) = best.unwrap();
    if e_best > e_in + 1e-12 {
        return Ok(profile.clone());
    }
    Ok(q_best)
}

/// Positions of the wall cores: local maxima of `|phi'|` above half the
/// global maximum, merged when closer than five grid cells.
pub fn wall_centers(profile: &Profile) -> Vec<f64> {
    let grid = profile.grid();
    let dx = grid.dx();
    let slope = d1(profile.phi(), dx);
    let mag: Vec<f64> = slope.iter().map(|v| v.abs()).collect();
    let peak = mag.iter().fold(0.0f64, |a, &b| a.max(b));
    if peak == 0.0 {
        return Vec::new();
    }
    let mut centers: Vec<(f64, f64)> = Vec::new();
    for i in 1..mag.len() - 1 {
        if mag[i] >= mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] > 0.5 * peak {
            let x = grid.x(i);
            match centers.last() {
                Some(&(xl, ml)) if (x - xl).abs() < 5.0 * dx => {
                    if mag[i] > ml {
                        *centers.last_mut().unwrap() = (x, mag[i]);
                    }
                }
                _ => centers.push((x, mag[i])),
            }
        }
    }
    centers.into_iter().map(|(x, _)| x).collect()
}

/// Distance between the outermost wall cores (zero for fewer than two).
pub fn wall_separation(profile: &Profile) -> f64 {
    let c = wall_centers(profile);
    if c.len() < 2 {
        0.0
    } else {
        c[c.len() - 1] - c[0]
    }
}

/// Preconditioned descent from the given initial profile.
pub fn minimize(
    plan: &SpectralPlan,
    start: &Profile,
    params: &AnisotropyParams,
    config: &MinimizeConfig,
) -> Result<MinimizeReport> {
    let grid = *start.grid();
    let dx = grid.dx();
    let mut profile = start.clone();
    let mut e = energy(plan, &profile, params)?;
    if !e.total.is_finite() {
        return Err(Error::NonFinite("initial energy"));
    }
    let mut dt = config.dt_init;
    let do_symmetrize = config.symmetrize_every > 0 && symmetry_qualifies(&profile);
    let mut converged = false;
    let mut res_sup = f64::INFINITY;
    let mut iter = 0;
    'descent: while iter < config.max_iters {
        iter += 1;
        let r = el_residual(plan, &profile, params)?;
        res_sup = residual_sup(&r);
        if !res_sup.is_finite() {
            return Err(Error::NonFinite("residual"));
        }
        if res_sup < config.grad_tol {
            converged = true;
            break;
        }
        let dir = precondition_dirichlet(&r, dx);
        let decrease: f64 = r.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>() * dx;
        loop {
            let trial: Vec<f64> = profile
                .phi()
                .iter()
                .zip(&dir)
                .map(|(&p, &g)| p - dt * g)
                .collect();
            let q = profile.with_phi(trial)?;
            let e_trial = energy(plan, &q, params)?;
            if e_trial.total <= e.total - config.armijo * dt * decrease {
                profile = q;
                e = e_trial;
                dt = (dt * 1.05).min(config.dt_max);
                break;
            }
            dt *= 0.5;
            if dt < 1e-13 {
                // the remaining decrease per step is below the resolution of
                // the energy itself; hand over to the fixed-step finisher
                break 'descent;
            }
        }
        if do_symmetrize && iter % config.symmetrize_every == 0 {
            // transients may not pass through the axis level yet; skip then
            if let Ok(sym) = symmetrize(plan, &profile, params) {
                let e_sym = energy(plan, &sym, params)?;
                if e_sym.total <= e.total + 1e-12 {
                    profile = sym;
                    e = e_sym;
                }
            }
        }
    }
    if !converged && res_sup >= config.grad_tol {
        // Finishing phase: plain preconditioned iteration with a step below
        // the preconditioned spectral bound (the symbol is at most about
        // `h + 2` since `|W''| <= h + 1`). Near the minimum this contracts
        // without needing energy comparisons, which are noise-limited here.
        let dt_fix = (1.5 / (params.h() + 3.0)).min(0.45);
        let budget = (config.max_iters.saturating_sub(iter)).clamp(500, 4000);
        let snapshot = profile.clone();
        let e_before = e.total;
        for _ in 0..budget {
            iter += 1;
            let r = el_residual(plan, &profile, params)?;
            res_sup = residual_sup(&r);
            if !res_sup.is_finite() {
                return Err(Error::NonFinite("residual"));
            }
            if res_sup < config.grad_tol {
                converged = true;
                break;
            }
            let dir = precondition_dirichlet(&r, dx);
            let trial: Vec<f64> = profile
                .phi()
                .iter()
                .zip(&dir)
                .map(|(&p, &g)| p - dt_fix * g)
                .collect();
            profile = profile.with_phi(trial)?;
        }
        e = energy(plan, &profile, params)?;
        if e.total > e_before + 1e-9 {
            profile = snapshot;
            e = energy(plan, &profile, params)?;
            let r = el_residual(plan, &profile, params)?;
            res_sup = residual_sup(&r);
            converged = res_sup < config.grad_tol;
        }
    }
    if converged && do_symmetrize {
        if let Ok(sym) = symmetrize(plan, &profile, params) {
            let e_sym = energy(plan, &sym, params)?;
            if e_sym.total <= e.total + 1e-12 {
                let r = el_residual(plan, &sym, params)?;
                let rs = residual_sup(&r);
                if rs <= res_sup.max(config.grad_tol) {
                    profile = sym;
                    e = e_sym;
                    res_sup = rs;
                }
            }
        }
    }
    Ok(MinimizeReport { profile, energy: e, residual_sup: res_sup, iterations: iter, converged })
}

fn wall_count(params: &AnisotropyParams, ell_minus: f64, ell_plus: f64) -> usize {
    let (lo, hi) = if ell_minus <= ell_plus { (ell_minus, ell_plus) } else { (ell_plus, ell_minus) };
    params.wells_in(lo + 1e-9, hi - 1e-9).len() + 1
}

/// Build the pool of initial guesses for a degree: the affine ramp plus
/// stacked-wall profiles over a ladder of separations.
fn candidate_starts(
    grid: Grid,
    params: &AnisotropyParams,
    d: Degree,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Profile>> {
    let (lm, lp) = boundary_lifts(params, d)?;
    let walls = wall_count(params, lm, lp);
    let width = if params.h() > 1.0 {
        (1.0 / (params.h() - 1.0).sqrt()).clamp(0.3, 3.0)
    } else {
        1.0
    };
    let mut starts = vec![initial_guess(grid, params, d, &GuessStyle::LinearRamp)?];
    if walls == 1 {
        starts.push(initial_guess(
            grid,
            params,
            d,
            &GuessStyle::StackedWalls { centers: vec![0.0], widths: vec![width] },
        )?);
    } else {
        for sep in [1.5, 3.0, 5.0, 8.0, 12.0, 18.0, 27.0, 40.0, 60.0] {
            let jitter = 1.0 + 0.03 * rng.gen_range(-1.0..1.0);
            let sep = sep * jitter;
            let extent = sep * (walls - 1) as f64;
            if extent > 1.7 * grid.l() {
                continue;
            }
            let centers: Vec<f64> = (0..walls)
                .map(|j| sep * (j as f64 - 0.5 * (walls - 1) as f64))
                .collect();
            starts.push(initial_guess(
                grid,
                params,
                d,
                &GuessStyle::StackedWalls { centers, widths: vec![width; walls] },
            )?);
        }
    }
    Ok(starts)
}

/// Minimize from the best of the candidate starts: rank the pool by energy,
/// relax the leaders briefly, then polish the winner to full tolerance.
pub fn minimize_from_best_start(
    plan: &SpectralPlan,
    params: &AnisotropyParams,
    d: Degree,
    config: &MinimizeConfig,
    seed: u64,
) -> Result<MinimizeReport> {
    let grid = *plan.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = candidate_starts(grid, params, d, &mut rng)?;
    let mut ranked: Vec<(f64, Profile)> = Vec::with_capacity(starts.len());
    for s in starts {
        let e = energy(plan, &s, params)?;
        ranked.push((e.total, s));
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    ranked.truncate(3);

    let presolve = MinimizeConfig {
        max_iters: config.max_iters.min(400),
        grad_tol: (config.grad_tol * 100.0).max(1e-4),
        ..config.clone()
    };
    let mut best: Option<MinimizeReport> = None;
    let mut warm_iters = 0;
    for (_, s) in &ranked {
        let rep = minimize(plan, s, params, &presolve)?;
        warm_iters += rep.iterations;
        if best.as_ref().map_or(true, |b| rep.energy.total < b.energy.total) {
            best = Some(rep);
        }
    }
    let warm = best.expect("the candidate pool is never empty");
    let mut report = minimize(plan, &warm.profile, params, config)?;
    report.iterations += warm_iters;
    Ok(report)
}

/// One row of a parameter scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub h: f64,
    pub d: f64,
    pub l: f64,
    pub n: usize,
    pub energy: EnergyBreakdown,
    pub residual: f64,
    pub converged: bool,
    pub separation: f64,
}

impl ScanRow {
    pub fn csv_header() -> &'static str {
        "h,d,L,N,total,exchange,aniso,stray,residual,converged,separation"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e},{},{:.6}",
            self.h,
            self.d,
            self.l,
            self.n,
            self.energy.total,
            self.energy.exchange,
            self.energy.anisotropy,
            self.energy.stray,
            self.residual,
            self.converged,
            self.separation
        )
    }
}

/// Cartesian scan specification.
#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub hs: Vec<f64>,
    pub degrees: Vec<f64>,
    pub ls: Vec<f64>,
    pub ns: Vec<usize>,
}

/// Minimize on every admissible cell of the grid `hs x degrees x ls x ns`,
/// in parallel, in deterministic row order. Inadmissible degree and
/// anisotropy combinations are skipped.
pub fn scan(spec: &ScanSpec, config: &MinimizeConfig, seed: u64) -> Result<Vec<ScanRow>> {
    let mut cells = Vec::new();
    for &h in &spec.hs {
        for &dv in &spec.degrees {
            for &l in &spec.ls {
                for &n in &spec.ns {
                    cells.push((h, dv, l, n));
                }
            }
        }
    }
    let rows: Result<Vec<Option<ScanRow>>> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(h, dv, l, n))| -> Result<Option<ScanRow>> {
            let params = AnisotropyParams::new(h)?;
            let d = Degree::new(dv);
            if !d.is_admissible(&params, 1e-9) || dv == 0.0 {
                return Ok(None);
            }
            let grid = Grid::new(n, l)?;
            let plan = SpectralPlan::new(grid, config.pad_factor)?;
            let cell_seed = seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let rep = minimize_from_best_start(&plan, &params, d, config, cell_seed)?;
            Ok(Some(ScanRow {
                h,
                d: dv,
                l,
                n,
                energy: rep.energy,
                residual: rep.residual_sup,
                converged: rep.converged,
                separation: wall_separation(&rep.profile),
            }))
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

/// One row of a domain-growth probe.
#[derive(Debug, Clone)]
pub struct DichotomyRow {
    pub l: f64,
    pub n: usize,
    pub energy: EnergyBreakdown,
    pub separation: f64,
    pub centers: Vec<f64>,
    pub converged: bool,
    pub residual: f64,
}

/// Minimize one degree over a growing family of domains, recording how the
/// wall cores arrange themselves: bounded separation indicates a compact
/// minimizer, growing separation indicates splitting into parts that drift
/// apart.
pub fn dichotomy_probe(
    params: &AnisotropyParams,
    d: Degree,
    ls: &[f64],
    n: usize,
    config: &MinimizeConfig,
    seed: u64,
) -> Result<Vec<DichotomyRow>> {
    let rows: Result<Vec<DichotomyRow>> = ls
        .par_iter()
        .enumerate()
        .map(|(idx, &l)| -> Result<DichotomyRow> {
            let grid = Grid::new(n, l)?;
            let plan = SpectralPlan::new(grid, config.pad_factor)?;
            let cell_seed = seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let rep = minimize_from_best_start(&plan, params, d, config, cell_seed)?;
            Ok(DichotomyRow {
                l,
                n,
                energy: rep.energy,
                separation: wall_separation(&rep.profile),
                centers: wall_centers(&rep.profile),
                converged: rep.converged,
                residual: rep.residual_sup,
            })
        })
        .collect();
    rows
}
