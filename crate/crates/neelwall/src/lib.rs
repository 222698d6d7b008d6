//! Transition profiles for a nonlocal wall energy on the line.
//!
//! The crate studies maps `m = (cos phi, sin phi)` from the real line to the
//! unit circle that connect prescribed easy directions at the two ends. Their
//! energy has three parts: exchange `1/2 int (phi')^2`, a local anisotropy
//! well `int W(phi)`, and a stray-field term, half the squared homogeneous
//! `H^1/2` seminorm of the first component's excess over its value at
//! infinity. The winding between the ends is quantized up to the two
//! fractional offsets set by the anisotropy strength, and the central
//! question is which windings minimize the energy and what the minimizers
//! look like.
//!
//! Modules, roughly bottom-up:
//!
//! * [`profile`] - grids, anisotropy parameters, lifted profiles, winding
//!   bookkeeping, initial guesses, file formats.
//! * [`anisotropy`] - the potential well, its derivative, and a certified
//!   quadratic growth constant.
//! * [`halfline`] - the nonlocal calculus: Dirichlet-to-Neumann operator,
//!   `H^1/2` forms, harmonic extension, a strip Poisson solver.
//! * [`energy`] - the energy functional, its breakdown, and the
//!   Euler-Lagrange residual.
//! * [`minimizer`] - preconditioned gradient descent, symmetrization,
//!   parameter scans, and splitting probes.
//! * [`constructions`] - the comparison-profile toolbox: reflection,
//!   conjugation, localization, gluing, splitting.
//! * [`analysis`] - tail fits, growth studies, and pointwise operator bounds.
//! * [`green`] - the fundamental solution of the linearized operator.
//! * [`local_model`] - the purely local system: explicit heteroclinics and a
//!   connection-existence probe.
//! * [`verify`] - the named end-to-end checks wired into the command line.

pub mod analysis;
pub mod anisotropy;
pub mod constructions;
pub mod energy;
pub mod error;
pub mod green;
pub mod halfline;
pub mod local_model;
pub mod minimizer;
pub mod numerics;
pub mod profile;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(ch_model, "../book/src/model.md");
    chapter!(ch_operators, "../book/src/operators.md");
    chapter!(ch_energy, "../book/src/energy.md");
    chapter!(ch_minimization, "../book/src/minimization.md");
    chapter!(ch_constructions, "../book/src/constructions.md");
    chapter!(ch_local_model, "../book/src/local-model.md");
    chapter!(ch_green, "../book/src/green-function.md");
    chapter!(ch_landscape, "../book/src/landscape.md");
    chapter!(ch_cli, "../book/src/cli.md");
}
