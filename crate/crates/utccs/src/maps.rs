//! Seed maps, unit transform functions, and the coupled-map step.
//!
//! All state lives on the unit interval. A coupled map is built from two seed
//! maps whose normalized parameters are tied together (`r` and `1-r`), an
//! outer unit transform, and a mod-1 reduction between the two:
//! `x' = f((F1(r,x) + F2(1-r,x)) mod 1)`.
//!
//! Conventions, fixed here once and relied on everywhere downstream:
//! * `mod 1` maps an exact 1.0 (or 2.0) to 0.0, so orbit states stay in
//!   `[0, 1)`. The reduction is always applied, even for seed maps that can
//!   never leave `[0, 1]`.
//! * A unit transform may return exactly 1.0 (e.g. the slope-2 tent at 0.5);
//!   the coupled step wraps that to 0.0 under the same convention.
//! * The tent map at exactly 0.5 takes its second branch.
//! * Everything is 64-bit IEEE floating point.

use crate::error::{Error, Result};

/// The three classic one-dimensional seed maps, parameters normalized to [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeedMapKind {
    /// `4 r x (1-x)`
    Logistic,
    /// `2 r x` below 0.5, `2 r (1-x)` from 0.5 up
    Tent,
    /// `r sin(pi x)`
    Sine,
}

impl SeedMapKind {
    /// Evaluate the seed map. Callers guarantee `r, x` in `[0,1]`.
    #[inline]
    pub fn eval(self, r: f64, x: f64) -> f64 {
        let v = match self {
            SeedMapKind::Logistic => 4.0 * r * (x * (1.0 - x)),
            SeedMapKind::Tent => {
                if x < 0.5 {
                    2.0 * r * x
                } else {
                    2.0 * r * (1.0 - x)
                }
            }
            SeedMapKind::Sine => r * (std::f64::consts::PI * x).sin(),
        };
        // x(1-x) can round one ulp above 0.25 near the peak; keep the range post.
        v.min(1.0)
    }

    /// Analytic derivative with respect to `x`, or `None` at a breakpoint.
    #[inline]
    pub fn deriv(self, r: f64, x: f64) -> Option<f64> {
        match self {
            SeedMapKind::Logistic => Some(4.0 * r * (1.0 - 2.0 * x)),
            SeedMapKind::Tent => {
                if x == 0.5 {
                    None
                } else if x < 0.5 {
                    Some(2.0 * r)
                } else {
                    Some(-2.0 * r)
                }
            }
            SeedMapKind::Sine => {
                Some(r * std::f64::consts::PI * (std::f64::consts::PI * x).cos())
            }
        }
    }
}

/// Unit transform functions: surjections of [0,1] onto itself.
///
/// The first five are closed-form elementary functions; the three tent
/// variants are piecewise linear with constant slope magnitude 2, 4 and 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UtfKind {
    Identity,
    /// `2^x - 1`
    Exp2,
    /// `log2(1 + x)`
    Log2,
    /// `sin(pi x)`
    SinePi,
    /// `(2/pi) asin(x)`
    ArcsinNorm,
    TentSlope2,
    TentSlope4,
    TentSlope8,
}

impl UtfKind {
    /// All eight kinds, in declaration order.
    pub const ALL: [UtfKind; 8] = [
        UtfKind::Identity,
        UtfKind::Exp2,
        UtfKind::Log2,
        UtfKind::SinePi,
        UtfKind::ArcsinNorm,
        UtfKind::TentSlope2,
        UtfKind::TentSlope4,
        UtfKind::TentSlope8,
    ];

    /// Evaluate on `[0,1]`; the result stays in `[0,1]` (closed).
    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            UtfKind::Identity => x,
            UtfKind::Exp2 => x.exp2() - 1.0,
            UtfKind::Log2 => (1.0 + x).log2(),
            UtfKind::SinePi => (std::f64::consts::PI * x).sin(),
            UtfKind::ArcsinNorm => x.asin() * 2.0 / std::f64::consts::PI,
            UtfKind::TentSlope2 => {
                if x < 0.5 {
                    2.0 * x
                } else {
                    2.0 - 2.0 * x
                }
            }
            UtfKind::TentSlope4 => {
                if x < 0.25 {
                    4.0 * x
                } else if x < 0.5 {
                    2.0 - 4.0 * x
                } else if x < 0.75 {
                    4.0 * x - 2.0
                } else {
                    4.0 - 4.0 * x
                }
            }
            UtfKind::TentSlope8 => {
                if x < 0.125 {
                    8.0 * x
                } else if x < 0.25 {
                    2.0 - 8.0 * x
                } else if x < 0.375 {
                    8.0 * x - 2.0
                } else if x < 0.5 {
                    4.0 - 8.0 * x
                } else if x < 0.625 {
                    8.0 * x - 4.0
                } else if x < 0.75 {
                    6.0 - 8.0 * x
                } else if x < 0.875 {
                    8.0 * x - 6.0
                } else {
                    8.0 - 8.0 * x
                }
            }
        }
    }

    /// Derivative, or `None` at a fold point (or at `x = 1` for the arcsine,
    /// where it diverges).
    #[inline]
    pub fn deriv(self, x: f64) -> Option<f64> {
        use std::f64::consts::{LN_2, PI};
        match self {
            UtfKind::Identity => Some(1.0),
            UtfKind::Exp2 => Some(LN_2 * x.exp2()),
            UtfKind::Log2 => Some(1.0 / ((1.0 + x) * LN_2)),
            UtfKind::SinePi => Some(PI * (PI * x).cos()),
            UtfKind::ArcsinNorm => {
                if x >= 1.0 {
                    None
                } else {
                    Some(2.0 / (PI * (1.0 - x * x).sqrt()))
                }
            }
            UtfKind::TentSlope2 => tent_slope_deriv(x, 2),
            UtfKind::TentSlope4 => tent_slope_deriv(x, 4),
            UtfKind::TentSlope8 => tent_slope_deriv(x, 8),
        }
    }
}

#[inline]
fn tent_slope_deriv(x: f64, folds: u32) -> Option<f64> {
    let c = folds as f64;
    let scaled = x * c;
    // Interior fold points are non-differentiable.
    if scaled == scaled.floor() && x > 0.0 && x < 1.0 {
        return None;
    }
    let branch = (scaled.floor() as i64).min(folds as i64 - 1);
    Some(if branch % 2 == 0 { c } else { -c })
}

fn check_range(what: &'static str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v.is_finite() && (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: v,
            lo,
            hi,
        })
    }
}

/// Seed-map evaluation with domain checking: `r, x` in `[0,1]`.
pub fn eval_seed_map(kind: SeedMapKind, r: f64, x: f64) -> Result<f64> {
    check_range("r", r, 0.0, 1.0)?;
    check_range("x", x, 0.0, 1.0)?;
    Ok(kind.eval(r, x))
}

/// Unit-transform evaluation with domain checking: `x` in `[0,1]`.
pub fn eval_utf(kind: UtfKind, x: f64) -> Result<f64> {
    check_range("x", x, 0.0, 1.0)?;
    Ok(kind.eval(x))
}

/// Fractional-part reduction with the exact-integer convention: 1.0 -> 0.0.
#[inline]
fn frac_unit(s: f64) -> f64 {
    let f = s - s.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

#[inline]
fn wrap_unit(v: f64) -> f64 {
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

/// Anything that iterates on the unit interval and can report the log
/// magnitude of its local derivative. The Lyapunov, bifurcation, cobweb and
/// entropy machinery is generic over this, so bare seed maps and coupled
/// maps go through the same estimators.
pub trait Map1D {
    /// One iteration; input and output in `[0, 1)`.
    fn step(&self, x: f64) -> f64;

    /// `ln |F'(x)|`, or `None` where the derivative is undefined or zero
    /// (breakpoints, fold points, exact mod-1 wraps). Such points are
    /// measure-zero and get skipped by the Lyapunov average.
    fn log_abs_deriv(&self, x: f64) -> Option<f64>;
}

/// A fully parameterized coupled chaotic map: two seed maps tied through a
/// shared normalized parameter, an outer unit transform, and mod-1 reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSpec {
    pub seed_a: SeedMapKind,
    pub seed_b: SeedMapKind,
    pub utf: UtfKind,
    pub r: f64,
}

impl MapSpec {
    /// Build a spec, validating `r` in `[0,1]`. Equal seed kinds are accepted.
    pub fn new(seed_a: SeedMapKind, seed_b: SeedMapKind, utf: UtfKind, r: f64) -> Result<Self> {
        check_range("r", r, 0.0, 1.0)?;
        Ok(MapSpec {
            seed_a,
            seed_b,
            utf,
            r,
        })
    }

    /// Logistic-sine coupling.
    pub fn lscm(utf: UtfKind, r: f64) -> Self {
        Self::new(SeedMapKind::Logistic, SeedMapKind::Sine, utf, r).expect("r in [0,1]")
    }

    /// Tent-logistic coupling.
    pub fn tlcm(utf: UtfKind, r: f64) -> Self {
        Self::new(SeedMapKind::Tent, SeedMapKind::Logistic, utf, r).expect("r in [0,1]")
    }

    /// Sine-tent coupling.
    pub fn stcm(utf: UtfKind, r: f64) -> Self {
        Self::new(SeedMapKind::Sine, SeedMapKind::Tent, utf, r).expect("r in [0,1]")
    }

    /// The raw coupled sum before the unit transform: `(F1 + F2) mod 1`.
    #[inline]
    pub(crate) fn sigma(&self, x: f64) -> f64 {
        frac_unit(self.seed_a.eval(self.r, x) + self.seed_b.eval(1.0 - self.r, x))
    }
}

impl Map1D for MapSpec {
    #[inline]
    fn step(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        wrap_unit(self.utf.eval(self.sigma(x)))
    }

    fn log_abs_deriv(&self, x: f64) -> Option<f64> {
        let s = self.seed_a.eval(self.r, x) + self.seed_b.eval(1.0 - self.r, x);
        // An exact integer sum sits on the mod-1 discontinuity.
        if s > 0.0 && s == s.floor() {
            return None;
        }
        let d1 = self.seed_a.deriv(self.r, x)?;
        let d2 = self.seed_b.deriv(1.0 - self.r, x)?;
        let df = self.utf.deriv(frac_unit(s))?;
        let total = (d1 + d2) * df;
        if total == 0.0 {
            None
        } else {
            Some(total.abs().ln())
        }
    }
}

/// A bare seed map run as a dynamical system of its own, with the same
/// wrap-to-`[0,1)` convention as the coupled maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedSystem {
    pub kind: SeedMapKind,
    pub r: f64,
}

impl SeedSystem {
    pub fn new(kind: SeedMapKind, r: f64) -> Result<Self> {
        check_range("r", r, 0.0, 1.0)?;
        Ok(SeedSystem { kind, r })
    }
}

impl Map1D for SeedSystem {
    #[inline]
    fn step(&self, x: f64) -> f64 {
        wrap_unit(self.kind.eval(self.r, x))
    }

    fn log_abs_deriv(&self, x: f64) -> Option<f64> {
        let d = self.kind.deriv(self.r, x)?;
        if d == 0.0 {
            None
        } else {
            Some(d.abs().ln())
        }
    }
}

/// One coupled-map step with domain checking; result in `[0, 1)`.
pub fn couple_step(spec: &MapSpec, x: f64) -> Result<f64> {
    check_range("x", x, 0.0, 1.0)?;
    Ok(spec.step(x))
}

/// A finite trajectory. Fully determined by the map, `x0`, the requested
/// length and the number of leading iterates dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub x0: f64,
    pub states: Vec<f64>,
    pub transient_discard: usize,
}

/// Iterate a map from `x0`, drop `transient_discard` leading iterates, then
/// record `length` states.
pub fn iterate_orbit<M: Map1D>(
    map: &M,
    x0: f64,
    length: usize,
    transient_discard: usize,
) -> Result<Orbit> {
    if length == 0 {
        return Err(Error::EmptyOrbit);
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::Domain {
            what: "x0",
            value: x0,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let mut x = x0;
    for _ in 0..transient_discard {
        x = map.step(x);
    }
    let mut states = Vec::with_capacity(length);
    for _ in 0..length {
        x = map.step(x);
        states.push(x);
    }
    Ok(Orbit {
        x0,
        states,
        transient_discard,
    })
}
