//! Coupling chaotic maps built from a unit transform, and what the paper-free
//! world calls applications: a hybrid chaos/LCG pseudo-random generator, a
//! confusion/bit-plane-flip/diffusion image cipher, and a quantitative
//! security-audit battery.
//!
//! The core construction iterates
//!
//! ```text
//! x' = f((F1(r, x) + F2(1 - r, x)) mod 1)
//! ```
//!
//! where `F1`, `F2` are classic one-dimensional seed maps (logistic, tent,
//! sine) coupled through a shared normalized parameter `r`, and `f` is a unit
//! transform function mapping `[0,1]` onto itself. Piecewise-linear unit
//! transforms of constant slope 2/4/8 give the type-I/II/III couplings; the
//! type-III variants drive the generator and the cipher.

pub mod audit;
pub mod chaos;
pub mod cipher;
mod error;
pub mod image;
pub mod maps;
pub mod rng;

pub use error::{Error, Result};
pub use image::{ColorImage, ImageBuffer};
pub use maps::{Map1D, MapSpec, Orbit, SeedMapKind, SeedSystem, UtfKind};
pub use rng::{Cbprng, LcgState, MapChoice};
