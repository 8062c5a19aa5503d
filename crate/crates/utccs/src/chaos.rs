//! Chaos quantification: Lyapunov exponents, bifurcation and cobweb data,
//! sample entropy, and the CSV emission the plotting tooling consumes.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maps::{iterate_orbit, Map1D};

/// Default transient dropped before averaging the Lyapunov sum.
pub const LE_DEFAULT_DISCARD: usize = 1_000;
/// Default number of iterates averaged by the Lyapunov estimator.
pub const LE_DEFAULT_ITERATIONS: usize = 10_000;

/// Outcome of a Lyapunov-exponent estimate, in nats per iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovResult {
    pub lambda: f64,
    pub iterations: usize,
    pub transient_discard: usize,
    /// Iterates skipped because the orbit landed exactly on a breakpoint,
    /// fold point, mod-1 wrap, or zero-derivative point. The divisor is
    /// reduced accordingly; the average is an almost-everywhere quantity.
    pub skipped: usize,
}

/// Estimate the Lyapunov exponent as the orbit average of `ln |F'(x)|`.
///
/// Iterates where the derivative is undefined or zero are skipped and the
/// divisor decremented; they form a measure-zero set, but floating-point
/// orbits do occasionally hit them (and can even be absorbed by the exact
/// fixed point at 0, which every seed map and unit transform shares).
pub fn lyapunov_exponent<M: Map1D>(
    map: &M,
    x0: f64,
    iterations: usize,
    transient_discard: usize,
) -> Result<LyapunovResult> {
    if iterations == 0 {
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
    let mut total = 0.0;
    let mut used = 0usize;
    for _ in 0..iterations {
        if let Some(l) = map.log_abs_deriv(x) {
            total += l;
            used += 1;
        }
        x = map.step(x);
    }
    if used == 0 {
        // Entire orbit sat on singular points; report NaN rather than 0/0.
        return Ok(LyapunovResult {
            lambda: f64::NAN,
            iterations,
            transient_discard,
            skipped: iterations,
        });
    }
    Ok(LyapunovResult {
        lambda: total / used as f64,
        iterations,
        transient_discard,
        skipped: iterations - used,
    })
}

/// Lyapunov exponent at every point of an `r` grid; points run in parallel.
pub fn lyapunov_sweep<M, F>(
    family: F,
    r_grid: &[f64],
    x0: f64,
    iterations: usize,
    transient_discard: usize,
) -> Result<Vec<(f64, f64)>>
where
    M: Map1D,
    F: Fn(f64) -> M + Sync,
{
    r_grid
        .par_iter()
        .map(|&r| {
            lyapunov_exponent(&family(r), x0, iterations, transient_discard)
                .map(|res| (r, res.lambda))
        })
        .collect()
}

/// Evenly spaced grid over `[0,1]` with `points` entries.
pub fn unit_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .collect()
}

/// Post-transient states recorded per grid parameter, for bifurcation plots.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationSeries {
    pub r_grid: Vec<f64>,
    pub points_per_r: usize,
    /// One vector of `points_per_r` states per grid point, same order as `r_grid`.
    pub samples: Vec<Vec<f64>>,
    pub x0: f64,
}

/// Defaults for bifurcation sweeps: 500-point grid, 500 dropped, 200 kept, x0 = 0.1.
pub const BIF_DEFAULT_GRID: usize = 500;
pub const BIF_DEFAULT_DISCARD: usize = 500;
pub const BIF_DEFAULT_KEEP: usize = 200;
pub const DEFAULT_X0: f64 = 0.1;

/// Record `keep` post-transient states for each `r` in the grid.
pub fn bifurcation_data<M, F>(
    family: F,
    r_grid: &[f64],
    x0: f64,
    discard: usize,
    keep: usize,
) -> Result<BifurcationSeries>
where
    M: Map1D,
    F: Fn(f64) -> M + Sync,
{
    if keep == 0 {
        return Err(Error::EmptyOrbit);
    }
    let samples: Vec<Vec<f64>> = r_grid
        .par_iter()
        .map(|&r| iterate_orbit(&family(r), x0, keep, discard).map(|o| o.states))
        .collect::<Result<_>>()?;
    Ok(BifurcationSeries {
        r_grid: r_grid.to_vec(),
        points_per_r: keep,
        samples,
        x0,
    })
}

/// Line segments tracing an orbit against the diagonal: vertical from
/// `(x_i, x_i)` to `(x_i, x_{i+1})`, then horizontal to `(x_{i+1}, x_{i+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CobwebTrace {
    /// `2 * steps` segments, strictly alternating vertical/horizontal.
    pub segments: Vec<((f64, f64), (f64, f64))>,
    pub steps: usize,
}

pub fn cobweb_data<M: Map1D>(map: &M, x0: f64, steps: usize) -> Result<CobwebTrace> {
    if steps == 0 {
        return Err(Error::EmptyOrbit);
    }
    let mut segments = Vec::with_capacity(2 * steps);
    let mut x = x0;
    for _ in 0..steps {
        let next = map.step(x);
        segments.push(((x, x), (x, next)));
        segments.push(((x, next), (next, next)));
        x = next;
    }
    Ok(CobwebTrace { segments, steps })
}

/// Sample-entropy outcome. `value` is `-ln(A/B)` for template matches of
/// length `m+1` over length `m` under the Chebyshev distance, self-matches
/// excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleEntropyResult {
    pub value: f64,
    /// Set when no (m+1)-length template pair matched (A = 0); `value` is
    /// then positive infinity.
    pub no_long_matches: bool,
    pub embedding_dim: usize,
    pub tolerance: f64,
    pub series_len: usize,
}

/// Default sample-entropy parameters: template length 2, tolerance
/// 0.2 x standard deviation, 5000-point series.
pub const SE_DEFAULT_M: usize = 2;
pub const SE_DEFAULT_LEN: usize = 5_000;
pub const SE_TOLERANCE_FACTOR: f64 = 0.2;

/// Sample entropy of a series with explicit tolerance.
///
/// Uses the standard convention: both template lengths are counted over the
/// first `n - m` start positions, pairs `i < j`, matches are Chebyshev
/// distance strictly below `tolerance`.
pub fn sample_entropy(series: &[f64], embedding_dim: usize, tolerance: f64) -> Result<SampleEntropyResult> {
    let n = series.len();
    if n < 100 {
        return Err(Error::SeriesTooShort { len: n, min: 100 });
    }
    if !(tolerance > 0.0) {
        return Err(Error::NonPositiveTolerance(tolerance));
    }
    let m = embedding_dim;
    let nt = n - m;
    let mut matches_m = 0u64;
    let mut matches_m1 = 0u64;
    for i in 0..nt.saturating_sub(1) {
        for j in (i + 1)..nt {
            let mut ok = true;
            for t in 0..m {
                if (series[i + t] - series[j + t]).abs() >= tolerance {
                    ok = false;
                    break;
                }
            }
            if ok {
                matches_m += 1;
                if (series[i + m] - series[j + m]).abs() < tolerance {
                    matches_m1 += 1;
                }
            }
        }
    }
    if matches_m1 == 0 {
        return Ok(SampleEntropyResult {
            value: f64::INFINITY,
            no_long_matches: true,
            embedding_dim: m,
            tolerance,
            series_len: n,
        });
    }
    Ok(SampleEntropyResult {
        value: -((matches_m1 as f64 / matches_m as f64).ln()),
        no_long_matches: false,
        embedding_dim: m,
        tolerance,
        series_len: n,
    })
}

/// Sample entropy of a map's orbit with the default parameters
/// (m = 2, tolerance = 0.2 x series standard deviation). A constant series
/// has entropy zero by convention.
pub fn orbit_sample_entropy<M: Map1D>(map: &M, x0: f64, len: usize) -> Result<f64> {
    let orbit = iterate_orbit(map, x0, len, 0)?;
    let series = &orbit.states;
    let mean = series.iter().sum::<f64>() / len as f64;
    let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / len as f64;
    let sd = var.sqrt();
    if sd == 0.0 {
        return Ok(0.0);
    }
    Ok(sample_entropy(series, SE_DEFAULT_M, SE_TOLERANCE_FACTOR * sd)?.value)
}

/// Sample entropy at every point of an `r` grid; points run in parallel.
pub fn sample_entropy_sweep<M, F>(family: F, r_grid: &[f64], x0: f64, len: usize) -> Result<Vec<(f64, f64)>>
where
    M: Map1D,
    F: Fn(f64) -> M + Sync,
{
    r_grid
        .par_iter()
        .map(|&r| orbit_sample_entropy(&family(r), x0, len).map(|se| (r, se)))
        .collect()
}

/// Write a two-column curve as CSV: `r,lambda` rows for Lyapunov sweeps.
pub fn write_le_csv<W: Write>(rows: &[(f64, f64)], w: &mut W) -> Result<()> {
    write_curve_csv("r,lambda", rows, w)
}

/// `r,se` rows for sample-entropy sweeps.
pub fn write_se_csv<W: Write>(rows: &[(f64, f64)], w: &mut W) -> Result<()> {
    write_curve_csv("r,se", rows, w)
}

fn write_curve_csv<W: Write>(header: &str, rows: &[(f64, f64)], w: &mut W) -> Result<()> {
    writeln!(w, "{header}")?;
    for (r, v) in rows {
        writeln!(w, "{r},{v}")?;
    }
    Ok(())
}

/// One `r,x` row per kept sample.
pub fn write_bifurcation_csv<W: Write>(series: &BifurcationSeries, w: &mut W) -> Result<()> {
    writeln!(w, "r,x")?;
    for (r, states) in series.r_grid.iter().zip(&series.samples) {
        for x in states {
            writeln!(w, "{r},{x}")?;
        }
    }
    Ok(())
}

/// One `x1,y1,x2,y2` row per segment.
pub fn write_cobweb_csv<W: Write>(trace: &CobwebTrace, w: &mut W) -> Result<()> {
    writeln!(w, "x1,y1,x2,y2")?;
    for ((x1, y1), (x2, y2)) in &trace.segments {
        writeln!(w, "{x1},{y1},{x2},{y2}")?;
    }
    Ok(())
}
