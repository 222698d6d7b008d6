//! Grids, anisotropy parameters, phase-lift profiles, and their file formats.
//!
//! A profile stores the phase lift `phi` of a unit-circle map on a symmetric
//! uniform grid over `[-L, L]`. The boundary values are pinned to well phases
//! of the anisotropy potential, so the winding number carried by the profile
//! is fixed by construction.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const TWO_PI: f64 = 2.0 * PI;

/// Tolerance for accepting a boundary phase as a well phase.
pub const WELL_PHASE_TOL: f64 = 1e-9;

/// Uniform symmetric grid: `n` nodes spanning `[-l, l]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    l: f64,
}

impl Grid {
    pub fn new(n: usize, l: f64) -> Result<Grid> {
        if n < 16 {
            return Err(Error::Grid(format!("need at least 16 nodes, got {n}")));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Grid(format!("half-length must be positive, got {l}")));
        }
        Ok(Grid { n, l })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / (self.n as f64 - 1.0)
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// Anisotropy strength `h >= 0`, `h != 1`, with the derived constants
/// `k = min(h, 1)` and `alpha = arccos(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropyParams {
    h: f64,
    k: f64,
    alpha: f64,
}

impl AnisotropyParams {
    pub fn new(h: f64) -> Result<AnisotropyParams> {
        if !h.is_finite() || h < 0.0 {
            return Err(Error::Anisotropy(format!("h must be finite and nonnegative, got {h}")));
        }
        if (h - 1.0).abs() < 1e-12 {
            return Err(Error::Anisotropy("h = 1 is the degenerate case; not supported".into()));
        }
        let k = h.min(1.0);
        Ok(AnisotropyParams { h, k, alpha: k.acos() })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Well phases are `2*pi*n + alpha` and `2*pi*n - alpha`. For `h > 1`
    /// (`alpha = 0`) the two families coincide at multiples of `2*pi`.
    pub fn nearest_well(&self, phase: f64) -> f64 {
        let base = TWO_PI * (phase / TWO_PI).round();
        let mut best = base + self.alpha;
        for cand in [
            base - self.alpha,
            base + self.alpha,
            base - TWO_PI + self.alpha,
            base + TWO_PI - self.alpha,
        ] {
            if (cand - phase).abs() < (best - phase).abs() {
                best = cand;
            }
        }
        best
    }

    pub fn is_well(&self, phase: f64, tol: f64) -> bool {
        (self.nearest_well(phase) - phase).abs() <= tol
    }

    /// All well phases in the closed interval `[lo, hi]`, ascending.
    pub fn wells_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let n_lo = ((lo - self.alpha) / TWO_PI).floor() as i64 - 1;
        let n_hi = ((hi + self.alpha) / TWO_PI).ceil() as i64 + 1;
        for n in n_lo..=n_hi {
            let base = TWO_PI * n as f64;
            if self.alpha == 0.0 {
                out.push(base);
            } else {
                out.push(base - self.alpha);
                out.push(base + self.alpha);
            }
        }
        out.retain(|w| *w >= lo - 1e-12 && *w <= hi + 1e-12);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

/// Winding number of a profile: the boundary phase difference in units of
/// `2*pi`. Admissible values lie in `Z + {0, +alpha/pi, -alpha/pi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degree(f64);

/// Which coset of the integers a winding number belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeClass {
    /// `d = n`
    Integer(i64),
    /// `d = n + alpha/pi`
    PlusAlpha(i64),
    /// `d = n - alpha/pi`
    MinusAlpha(i64),
}

impl Degree {
    pub fn new(value: f64) -> Degree {
        Degree(value)
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Classify against the admissible set for the given parameters, within
    /// `tol`. For `h > 1` every admissible degree is an integer.
    pub fn classify(&self, params: &AnisotropyParams, tol: f64) -> Option<DegreeClass> {
        let d = self.0;
        let near_int = |v: f64| (v - v.round()).abs() <= tol;
        if near_int(d) {
            return Some(DegreeClass::Integer(d.round() as i64));
        }
        let r = params.alpha() / PI;
        if near_int(d - r) {
            return Some(DegreeClass::PlusAlpha((d - r).round() as i64));
        }
        if near_int(d + r) {
            return Some(DegreeClass::MinusAlpha((d + r).round() as i64));
        }
        None
    }

    pub fn is_admissible(&self, params: &AnisotropyParams, tol: f64) -> bool {
        self.classify(params, tol).is_some()
    }
}

/// A phase lift sampled on a grid, with boundary values pinned to wells.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Grid,
    phi: Vec<f64>,
    ell_minus: f64,
    ell_plus: f64,
}

impl Profile {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn ell_minus(&self) -> f64 {
        self.ell_minus
    }

    pub fn ell_plus(&self) -> f64 {
        self.ell_plus
    }

    /// In-plane component `cos(phi) - k`, the quantity whose nonlocal energy
    /// the stray-field term measures.
    pub fn excess_m1(&self, params: &AnisotropyParams) -> Vec<f64> {
        self.phi.iter().map(|p| p.cos() - params.k()).collect()
    }

    /// Same grid and boundary lifts, new interior values.
    pub fn with_phi(&self, phi: Vec<f64>) -> Result<Profile> {
        Profile::assemble(self.grid, phi, self.ell_minus, self.ell_plus)
    }

    /// Construct without well-phase validation; boundary values are still
    /// overwritten and the array checked for length and finiteness.
    pub(crate) fn assemble(grid: Grid, mut phi: Vec<f64>, ell_minus: f64, ell_plus: f64) -> Result<Profile> {
        if phi.len() != grid.n() {
            return Err(Error::Grid(format!(
                "phase array has {} values but the grid has {} nodes",
                phi.len(),
                grid.n()
            )));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("profile phases"));
        }
        let n = grid.n();
        phi[0] = ell_minus;
        phi[n - 1] = ell_plus;
        Ok(Profile { grid, phi, ell_minus, ell_plus })
    }
}

/// Validate boundary phases against the well set, snap them to the exact
/// well values, and pin the endpoint nodes.
pub fn make_profile(
    grid: Grid,
    params: &AnisotropyParams,
    phi: Vec<f64>,
    ell_minus: f64,
    ell_plus: f64,
) -> Result<Profile> {
    let snap = |phase: f64| -> Result<f64> {
        let w = params.nearest_well(phase);
        let offset = (w - phase).abs();
        if offset > WELL_PHASE_TOL {
            return Err(Error::WellPhase { phase, h: params.h(), offset });
        }
        Ok(w)
    };
    let lm = snap(ell_minus)?;
    let lp = snap(ell_plus)?;
    Profile::assemble(grid, phi, lm, lp)
}

/// Winding number from the pinned boundary lifts, cross-checked against the
/// telescoped sum of nodal increments.
pub fn degree(p: &Profile) -> Result<Degree> {
    let d = (p.ell_plus() - p.ell_minus()) / TWO_PI;
    // Kahan summation keeps the telescoping check meaningful at 1e-12.
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for w in p.phi().windows(2) {
        let y = (w[1] - w[0]) - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    let d_sum = sum / TWO_PI;
    if (d - d_sum).abs() > 1e-12 {
        return Err(Error::Degree(format!(
            "boundary lifts give {d} but the nodal increments telescope to {d_sum}"
        )));
    }
    Ok(Degree::new(d))
}

/// Initial guess shapes for the minimizer.
#[derive(Debug, Clone)]
pub enum GuessStyle {
    /// Affine interpolation between the boundary lifts.
    LinearRamp,
    /// Arctangent phase steps, one per inter-well gap of the well ladder,
    /// centered at the given positions.
    StackedWalls { centers: Vec<f64>, widths: Vec<f64> },
}

/// Boundary lift convention for a requested winding number: the profile
/// starts in the well adjacent to zero that makes the target reachable.
pub fn boundary_lifts(params: &AnisotropyParams, d: Degree) -> Result<(f64, f64)> {
    let class = d
        .classify(params, 1e-9)
        .ok_or_else(|| Error::Degree(format!("{} is not admissible for h = {}", d.value(), params.h())))?;
    let a = params.alpha();
    let (lm, lp) = match class {
        DegreeClass::Integer(n) => {
            if params.h() > 1.0 {
                (0.0, TWO_PI * n as f64)
            } else {
                (-a, TWO_PI * n as f64 - a)
            }
        }
        DegreeClass::PlusAlpha(n) => (-a, TWO_PI * n as f64 + a),
        DegreeClass::MinusAlpha(n) => (a, TWO_PI * n as f64 - a),
    };
    Ok((lm, lp))
}

/// Build an initial profile with the requested winding number.
pub fn initial_guess(grid: Grid, params: &AnisotropyParams, d: Degree, style: &GuessStyle) -> Result<Profile> {
    let (lm, lp) = boundary_lifts(params, d)?;
    let n = grid.n();
    let phi = match style {
        GuessStyle::LinearRamp => (0..n)
            .map(|i| lm + (lp - lm) * i as f64 / (n as f64 - 1.0))
            .collect::<Vec<f64>>(),
        GuessStyle::StackedWalls { centers, widths } => {
            let (lo, hi) = if lm <= lp { (lm, lp) } else { (lp, lm) };
            let wells = params.wells_in(lo - 1e-9, hi + 1e-9);
            let n_steps = wells.len().saturating_sub(1);
            if centers.len() != n_steps {
                return Err(Error::Degree(format!(
                    "winding {} needs {} wall centers (one per inter-well gap), got {}",
                    d.value(),
                    n_steps,
                    centers.len()
                )));
            }
            if widths.len() != centers.len() || widths.iter().any(|w| !(*w > 0.0)) {
                return Err(Error::Precondition("need one positive width per wall center".into()));
            }
            // steps in traversal order (descending profiles walk the ladder top-down)
            let mut steps: Vec<f64> = wells.windows(2).map(|w| w[1] - w[0]).collect();
            if lm > lp {
                steps.reverse();
                for s in &mut steps {
                    *s = -*s;
                }
            }
            // each step is renormalized to reach its limits exactly at the
            // domain ends, else pinning would cut a cliff into the slow
            // arctangent tails
            let l = grid.l();
            (0..n)
                .map(|i| {
                    let x = grid.x(i);
                    let mut v = lm;
                    for (j, (&c, &w)) in centers.iter().zip(widths.iter()).enumerate() {
                        let lo = ((-l - c) / w).atan();
                        let hi = ((l - c) / w).atan();
                        v += steps[j] * (((x - c) / w).atan() - lo) / (hi - lo);
                    }
                    v
                })
                .collect()
        }
    };
    make_profile(grid, params, phi, lm, lp)
}

/// Linear interpolation onto a new grid covering at least the old domain;
/// outside the old domain the profile continues at its boundary lifts.
pub fn resample(p: &Profile, new_grid: Grid) -> Result<Profile> {
    if new_grid.l() < p.grid().l() - 1e-12 {
        return Err(Error::Grid(format!(
            "resample target must cover the source domain: {} < {}",
            new_grid.l(),
            p.grid().l()
        )));
    }
    let phi = interp_linear(p, &new_grid.xs());
    Profile::assemble(new_grid, phi, p.ell_minus(), p.ell_plus())
}

/// Sample a profile at arbitrary positions: linear between nodes, constant
/// boundary lifts outside the domain.
pub(crate) fn interp_linear(p: &Profile, at: &[f64]) -> Vec<f64> {
    let g = p.grid();
    let (l, dx, n) = (g.l(), g.dx(), g.n());
    let phi = p.phi();
    at.iter()
        .map(|&x| {
            if x <= -l {
                p.ell_minus()
            } else if x >= l {
                p.ell_plus()
            } else {
                let s = (x + l) / dx;
                let i = (s.floor() as usize).min(n - 2);
                let t = s - i as f64;
                phi[i] * (1.0 - t) + phi[i + 1] * t
            }
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct ProfileFile {
    version: u32,
    h: f64,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "N")]
    n: usize,
    ell_minus: f64,
    ell_plus: f64,
    phi: Vec<f64>,
}

/// JSON formatter that writes every float with 17 significant digits, enough
/// to round-trip any f64 exactly.
struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Write a profile (with its anisotropy strength) as JSON.
pub fn write_profile<P: AsRef<Path>>(p: &Profile, params: &AnisotropyParams, path: P) -> Result<()> {
    let file = ProfileFile {
        version: 1,
        h: params.h(),
        l: p.grid().l(),
        n: p.grid().n(),
        ell_minus: p.ell_minus(),
        ell_plus: p.ell_plus(),
        phi: p.phi().to_vec(),
    };
    let out = std::fs::File::create(path)?;
    let mut ser = serde_json::Serializer::with_formatter(BufWriter::new(out), SigFigFormatter);
    file.serialize(&mut ser)
        .map_err(|e| Error::Format(format!("profile serialization failed: {e}")))?;
    Ok(())
}

/// Read a JSON profile along with its anisotropy strength.
pub fn read_profile<P: AsRef<Path>>(path: P) -> Result<(Profile, AnisotropyParams)> {
    let data = std::fs::read_to_string(path)?;
    let file: ProfileFile =
        serde_json::from_str(&data).map_err(|e| Error::Format(format!("profile parse failed: {e}")))?;
    if file.version != 1 {
        return Err(Error::Format(format!("unsupported profile version {}", file.version)));
    }
    if file.phi.len() != file.n {
        return Err(Error::Format(format!(
            "header says N = {} but the phase array has {} values",
            file.n,
            file.phi.len()
        )));
    }
    let params = AnisotropyParams::new(file.h)?;
    let grid = Grid::new(file.n, file.l)?;
    let p = make_profile(grid, &params, file.phi, file.ell_minus, file.ell_plus)?;
    Ok((p, params))
}

/// Export as two-column CSV with a mandatory `x,phi` header.
pub fn write_profile_csv<P: AsRef<Path>>(p: &Profile, path: P) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x,phi")?;
    for i in 0..p.grid().n() {
        writeln!(w, "{:.16e},{:.16e}", p.grid().x(i), p.phi()[i])?;
    }
    Ok(())
}

/// Import the CSV format; the grid is reconstructed from the `x` column and
/// the boundary lifts are taken from the first and last rows.
pub fn read_profile_csv<P: AsRef<Path>>(path: P, params: &AnisotropyParams) -> Result<Profile> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut xs = Vec::new();
    let mut phis = Vec::new();
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty profile file".into()))??;
    if header.trim() != "x,phi" {
        return Err(Error::Format(format!("expected header 'x,phi', got '{}'", header.trim())));
    }
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let x: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Format(format!("bad x value on row {}", idx + 2)))?;
        let phi: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Format(format!("bad phi value on row {}", idx + 2)))?;
        xs.push(x);
        phis.push(phi);
    }
    let n = xs.len();
    if n < 16 {
        return Err(Error::Format(format!("need at least 16 rows, got {n}")));
    }
    let l = xs[n - 1];
    if (xs[0] + l).abs() > 1e-9 * l.abs().max(1.0) {
        return Err(Error::Format("x column must span a symmetric interval [-L, L]".into()));
    }
    let dx = 2.0 * l / (n as f64 - 1.0);
    for (i, &x) in xs.iter().enumerate() {
        if (x - (-l + i as f64 * dx)).abs() > 1e-9 * l.max(1.0) {
            return Err(Error::Format(format!("x column is not uniformly spaced near row {}", i + 2)));
        }
    }
    let grid = Grid::new(n, l)?;
    let (lm, lp) = (phis[0], phis[n - 1]);
    make_profile(grid, params, phis, lm, lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn grid_rejects_degenerate_inputs() {
        assert!(Grid::new(8, 10.0).is_err());
        assert!(Grid::new(64, 0.0).is_err());
        assert!(Grid::new(64, -3.0).is_err());
        let g = Grid::new(64, 10.0).unwrap();
        assert_relative_eq!(g.dx(), 20.0 / 63.0);
        assert_relative_eq!(g.x(0), -10.0);
        assert_relative_eq!(g.x(63), 10.0);
    }

    #[test]
    fn params_reject_h_one_and_negative() {
        assert!(AnisotropyParams::new(1.0).is_err());
        assert!(AnisotropyParams::new(-0.1).is_err());
        let p = AnisotropyParams::new(0.5).unwrap();
        assert_relative_eq!(p.k(), 0.5);
        assert_relative_eq!(p.alpha(), (0.5f64).acos());
        let q = AnisotropyParams::new(2.0).unwrap();
        assert_relative_eq!(q.k(), 1.0);
        assert_relative_eq!(q.alpha(), 0.0);
    }

    #[test]
    fn well_snap_accepts_and_rejects() {
        let params = AnisotropyParams::new(0.5).unwrap();
        let a = params.alpha();
        let grid = Grid::new(32, 10.0).unwrap();
        let phi = vec![0.0; 32];
        // within tolerance: snapped
        let p = make_profile(grid, &params, phi.clone(), -a + 5e-10, a - 5e-10).unwrap();
        assert_eq!(p.ell_minus(), -a);
        assert_eq!(p.ell_plus(), a);
        // outside tolerance: rejected
        let err = make_profile(grid, &params, phi, -a + 1e-6, a).unwrap_err();
        assert!(matches!(err, Error::WellPhase { .. }));
    }

    #[test]
    fn degree_classification_spans_the_admissible_set() {
        let params = AnisotropyParams::new(0.5).unwrap();
        let r = params.alpha() / PI;
        assert_eq!(Degree::new(2.0).classify(&params, 1e-9), Some(DegreeClass::Integer(2)));
        assert_eq!(Degree::new(r).classify(&params, 1e-9), Some(DegreeClass::PlusAlpha(0)));
        assert_eq!(Degree::new(1.0 - r).classify(&params, 1e-9), Some(DegreeClass::MinusAlpha(1)));
        assert_eq!(Degree::new(0.4).classify(&params, 1e-9), None);
        let h2 = AnisotropyParams::new(2.0).unwrap();
        assert_eq!(Degree::new(3.0).classify(&h2, 1e-9), Some(DegreeClass::Integer(3)));
        assert_eq!(Degree::new(0.25).classify(&h2, 1e-9), None);
    }

    #[test]
    fn ramp_guess_carries_the_requested_winding() {
        let params = AnisotropyParams::new(0.5).unwrap();
        let grid = Grid::new(257, 20.0).unwrap();
        for d in [
            params.alpha() / PI,
            1.0 - params.alpha() / PI,
            1.0,
            2.0 - params.alpha() / PI,
            -1.0,
        ] {
            let p = initial_guess(grid, &params, Degree::new(d), &GuessStyle::LinearRamp).unwrap();
            let got = degree(&p).unwrap().value();
            assert_relative_eq!(got, d, epsilon = 1e-12);
        }
    }

    #[test]
    fn stacked_walls_need_one_center_per_gap() {
        let params = AnisotropyParams::new(0.9).unwrap();
        let grid = Grid::new(513, 30.0).unwrap();
        let d = Degree::new(2.0 - params.alpha() / PI);
        // the ladder alpha -> 2pi-alpha -> 2pi+alpha -> 4pi-alpha has three gaps
        let style = GuessStyle::StackedWalls { centers: vec![-10.0, 0.0, 10.0], widths: vec![1.0; 3] };
        let p = initial_guess(grid, &params, d, &style).unwrap();
        assert_relative_eq!(degree(&p).unwrap().value(), d.value(), epsilon = 1e-12);

        let wrong = GuessStyle::StackedWalls { centers: vec![0.0], widths: vec![1.0] };
        assert!(initial_guess(grid, &params, d, &wrong).is_err());
    }

    #[test]
    fn inadmissible_degree_is_rejected() {
        let params = AnisotropyParams::new(2.0).unwrap();
        let grid = Grid::new(64, 10.0).unwrap();
        let err = initial_guess(grid, &params, Degree::new(0.5), &GuessStyle::LinearRamp);
        assert!(err.is_err());
    }

    #[test]
    fn resample_preserves_winding_and_refuses_to_shrink() {
        let params = AnisotropyParams::new(2.0).unwrap();
        let grid = Grid::new(129, 15.0).unwrap();
        let p = initial_guess(grid, &params, Degree::new(1.0), &GuessStyle::LinearRamp).unwrap();
        let fine = resample(&p, Grid::new(1025, 20.0).unwrap()).unwrap();
        assert_relative_eq!(degree(&fine).unwrap().value(), 1.0, epsilon = 1e-12);
        assert_eq!(fine.phi()[0], p.ell_minus());
        assert!(resample(&p, Grid::new(129, 10.0).unwrap()).is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let params = AnisotropyParams::new(0.5).unwrap();
        let grid = Grid::new(64, 12.0).unwrap();
        let d = Degree::new(params.alpha() / PI);
        let p = initial_guess(grid, &params, d, &GuessStyle::LinearRamp).unwrap();
        let dir = std::env::temp_dir().join("neelwall-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.json");
        write_profile(&p, &params, &path).unwrap();
        let (q, qparams) = read_profile(&path).unwrap();
        assert_eq!(qparams.h(), params.h());
        assert_eq!(q.grid().n(), p.grid().n());
        for (a, b) in p.phi().iter().zip(q.phi()) {
            assert_eq!(a, b, "round trip must be bit-exact");
        }
    }

    #[test]
    fn csv_round_trip_and_header_enforcement() {
        let params = AnisotropyParams::new(2.0).unwrap();
        let grid = Grid::new(64, 12.0).unwrap();
        let p = initial_guess(grid, &params, Degree::new(1.0), &GuessStyle::LinearRamp).unwrap();
        let dir = std::env::temp_dir().join("neelwall-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.csv");
        write_profile_csv(&p, &path).unwrap();
        let q = read_profile_csv(&path, &params).unwrap();
        for (a, b) in p.phi().iter().zip(q.phi()) {
            assert_eq!(a, b);
        }
        std::fs::write(&path, "a,b\n0,0\n").unwrap();
        assert!(read_profile_csv(&path, &params).is_err());
    }

    #[test]
    fn truncated_json_is_a_parse_error() {
        let params = AnisotropyParams::new(0.5).unwrap();
        let grid = Grid::new(64, 12.0).unwrap();
        let d = Degree::new(params.alpha() / PI);
        let p = initial_guess(grid, &params, d, &GuessStyle::LinearRamp).unwrap();
        let dir = std::env::temp_dir().join("neelwall-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("truncated.json");
        write_profile(&p, &params, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(read_profile(&path), Err(Error::Format(_))));
    }

    #[test]
    fn mismatched_length_in_json_is_rejected() {
        let dir = std::env::temp_dir().join("neelwall-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("badlen.json");
        let mut phi = vec![0.0; 20];
        let a = (0.5f64).acos();
        phi[0] = -a;
        let body = serde_json::json!({
            "version": 1, "h": 0.5, "L": 10.0, "N": 32,
            "ell_minus": -a, "ell_plus": -a, "phi": phi,
        });
        std::fs::write(&path, serde_json::to_string(&body).unwrap()).unwrap();
        assert!(matches!(read_profile(&path), Err(Error::Format(_))));
    }

    proptest! {
        #[test]
        fn prop_degree_matches_construction(
            class in 0usize..3,
            n in -3i64..4,
            h in prop_oneof![Just(0.0), Just(0.3), Just(0.7), Just(2.0), Just(5.0)],
        ) {
            let params = AnisotropyParams::new(h).unwrap();
            let r = params.alpha() / PI;
            let d = match class {
                0 => n as f64,
                1 => n as f64 + r,
                _ => n as f64 - r,
            };
            let grid = Grid::new(128, 25.0).unwrap();
            let p = initial_guess(grid, &params, Degree::new(d), &GuessStyle::LinearRamp).unwrap();
            let got = degree(&p).unwrap().value();
            prop_assert!((got - d).abs() < 1e-12);
        }

        #[test]
        fn prop_json_round_trip(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let params = AnisotropyParams::new(0.5).unwrap();
            let grid = Grid::new(48, 10.0).unwrap();
            let a = params.alpha();
            let phi: Vec<f64> = (0..48).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let p = make_profile(grid, &params, phi, -a, 2.0 * PI - a).unwrap();
            let dir = std::env::temp_dir().join("neelwall-io-test");
            std::fs::create_dir_all(&dir).unwrap();
            let path = dir.join(format!("prop-{seed}.json"));
            write_profile(&p, &params, &path).unwrap();
            let (q, _) = read_profile(&path).unwrap();
            std::fs::remove_file(&path).ok();
            prop_assert_eq!(p.phi(), q.phi());
        }
    }
}
