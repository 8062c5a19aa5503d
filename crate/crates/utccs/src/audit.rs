//! Security-analysis battery: histogram uniformity, differential metrics,
//! adjacent-pixel correlation, key-sensitivity sweeps, and data-loss
//! robustness. Every sampled quantity takes an explicit RNG seed so reports
//! are reproducible byte for byte.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cipher::{decrypt, encrypt, KeyName, KeySet};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;

/// Critical value of the chi-square distribution, 255 degrees of freedom,
/// significance 0.05. A uniform 256-bin histogram should fall below it.
pub const CHI2_CRITICAL_0_05: f64 = 293.2478;
/// Same at significance 0.01.
pub const CHI2_CRITICAL_0_01: f64 = 310.457;

/// One-sided lower critical values for the pixel-change rate, percent,
/// for 256x256 8-bit images at significance 0.05 / 0.01 / 0.001.
pub const NPCR_CRITICAL: [(f64, f64); 3] =
    [(0.05, 99.5693), (0.01, 99.5527), (0.001, 99.5341)];

/// Two-sided acceptance intervals for the average changing intensity,
/// percent, at significance 0.05 / 0.01 / 0.001.
pub const UACI_CRITICAL: [(f64, (f64, f64)); 3] = [
    (0.05, (33.2824, 33.6447)),
    (0.01, (33.2255, 33.7016)),
    (0.001, (33.1594, 33.7677)),
];

/// Mean squared error below this counts as a recovered image in
/// key-sensitivity sweeps; wrong-key decryptions of 8-bit content sit around
/// 1e4, correct ones at 0.
pub const MSE_NOISE_FLOOR: f64 = 1000.0;

/// Chi-square uniformity test over the 256 gray levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi2Report {
    pub statistic: f64,
    pub dof: u32,
    pub critical_0_05: f64,
    pub pass: bool,
    /// Fewer than 256 pixels: expected bin counts below 1, take with salt.
    pub low_sample: bool,
}

/// `chi2 = sum (f_i - f_e)^2 / f_e` with `f_e = MN/256`.
pub fn chi2_uniformity(img: &ImageBuffer) -> Chi2Report {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let fe = img.len() as f64 / 256.0;
    let statistic: f64 = hist
        .iter()
        .map(|&f| {
            let d = f as f64 - fe;
            d * d / fe
        })
        .sum();
    Chi2Report {
        statistic,
        dof: 255,
        critical_0_05: CHI2_CRITICAL_0_05,
        pass: statistic < CHI2_CRITICAL_0_05,
        low_sample: img.len() < 256,
    }
}

/// Pixel-change rate and average changing intensity between two same-sized
/// images, as percentages.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    pub npcr: f64,
    pub uaci: f64,
    pub trials: usize,
    /// `(npcr, uaci)` per trial when produced by a multi-trial run.
    pub per_trial: Vec<(f64, f64)>,
}

impl DiffReport {
    /// Mean NPCR clears the one-sided critical value at the given significance.
    pub fn npcr_passes(&self, alpha: f64) -> Option<bool> {
        NPCR_CRITICAL
            .iter()
            .find(|(a, _)| *a == alpha)
            .map(|(_, crit)| self.npcr > *crit)
    }

    /// Mean UACI lies inside the two-sided interval at the given significance.
    pub fn uaci_passes(&self, alpha: f64) -> Option<bool> {
        UACI_CRITICAL
            .iter()
            .find(|(a, _)| *a == alpha)
            .map(|(_, (lo, hi))| (*lo..=*hi).contains(&self.uaci))
    }
}

/// NPCR and UACI of one image pair.
pub fn npcr_uaci(c1: &ImageBuffer, c2: &ImageBuffer) -> Result<DiffReport> {
    c1.same_dimensions(c2)?;
    let n = c1.len() as f64;
    let mut changed = 0u64;
    let mut abs_sum = 0u64;
    for (&a, &b) in c1.pixels().iter().zip(c2.pixels()) {
        if a != b {
            changed += 1;
        }
        abs_sum += (a as i64 - b as i64).unsigned_abs();
    }
    let npcr = 100.0 * (changed as f64) / n;
    let uaci = 100.0 * (abs_sum as f64) / (255.0 * n);
    Ok(DiffReport {
        npcr,
        uaci,
        trials: 1,
        per_trial: vec![(npcr, uaci)],
    })
}

/// Repeated one-bit-change experiment: each trial flips one uniformly chosen
/// bit of one uniformly chosen pixel, encrypts both images under the same
/// keys, and measures NPCR/UACI between the ciphers. Means over all trials
/// are reported against the hard-coded critical values.
pub fn diff_attack_trial(
    img: &ImageBuffer,
    keys: &KeySet,
    trials: usize,
    seed: u64,
) -> Result<DiffReport> {
    if trials == 0 {
        return Err(Error::EmptyOrbit);
    }
    let base = encrypt(img, keys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flips: Vec<(usize, u8)> = (0..trials)
        .map(|_| (rng.gen_range(0..img.len()), rng.gen_range(0..8u8)))
        .collect();
    let per_trial: Vec<(f64, f64)> = flips
        .par_iter()
        .map(|&(pos, bit)| {
            let mut altered = img.clone();
            altered.pixels_mut()[pos] ^= 1 << bit;
            let c2 = encrypt(&altered, keys)?;
            let d = npcr_uaci(&base, &c2)?;
            Ok((d.npcr, d.uaci))
        })
        .collect::<Result<_>>()?;
    let npcr = per_trial.iter().map(|t| t.0).sum::<f64>() / trials as f64;
    let uaci = per_trial.iter().map(|t| t.1).sum::<f64>() / trials as f64;
    Ok(DiffReport {
        npcr,
        uaci,
        trials,
        per_trial,
    })
}

/// Which adjacency a correlation sample uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Direction {
    pub const ALL: [Direction; 3] =
        [Direction::Horizontal, Direction::Vertical, Direction::Diagonal];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
            Direction::Diagonal => "diagonal",
        }
    }
}

/// Pearson correlation over sampled adjacent-pixel pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrReport {
    pub direction: Direction,
    pub cc: f64,
    pub pairs: usize,
}

/// Default number of adjacent pairs sampled by the correlation test.
pub const CORR_DEFAULT_PAIRS: usize = 5_000;

/// Sample `pairs` distinct adjacent-pixel pairs along `direction` (seeded,
/// without replacement) and compute their Pearson coefficient.
pub fn correlation(
    img: &ImageBuffer,
    direction: Direction,
    pairs: usize,
    seed: u64,
) -> Result<CorrReport> {
    let (rows, cols) = (img.rows(), img.cols());
    let (span_r, span_c, dr, dc) = match direction {
        Direction::Horizontal => (rows, cols.saturating_sub(1), 0usize, 1usize),
        Direction::Vertical => (rows.saturating_sub(1), cols, 1, 0),
        Direction::Diagonal => (rows.saturating_sub(1), cols.saturating_sub(1), 1, 1),
    };
    let available = span_r * span_c;
    if pairs == 0 || pairs > available {
        return Err(Error::NotEnoughPairs {
            requested: pairs,
            available,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, available, pairs);
    let mut xs = Vec::with_capacity(pairs);
    let mut ys = Vec::with_capacity(pairs);
    for p in picks {
        let i = p / span_c;
        let j = p % span_c;
        xs.push(img.get(i, j) as f64);
        ys.push(img.get(i + dr, j + dc) as f64);
    }
    let n = pairs as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantImage);
    }
    Ok(CorrReport {
        direction,
        cc: sxy / (sxx * syy).sqrt(),
        pairs,
    })
}

/// Mean squared pixel difference.
pub fn mse(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    a.same_dimensions(b)?;
    let sum: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    Ok(sum / a.len() as f64)
}

/// MSE between the original and a wrong-key decryption, per perturbation size.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub key_name: KeyName,
    /// Perturbation exponents `e`, for `alpha = 2^-e`.
    pub exponents: Vec<u32>,
    pub alphas: Vec<f64>,
    pub mses: Vec<f64>,
    /// Perturbation pushed the key outside (0,1); the point was skipped.
    pub skipped: Vec<bool>,
    /// Largest `e` whose MSE still clears the noise floor; the key is
    /// sensitive to changes down to `2^-threshold`.
    pub threshold_exponent: Option<u32>,
}

/// Sweep one key: encrypt once under `keys`, then decrypt with the named key
/// perturbed by `+2^-e` for each exponent in `exponents`, recording MSE
/// against the original image.
pub fn key_sensitivity(
    img: &ImageBuffer,
    keys: &KeySet,
    key_name: KeyName,
    exponents: std::ops::RangeInclusive<u32>,
) -> Result<SensitivityCurve> {
    let cipher = encrypt(img, keys)?;
    let exps: Vec<u32> = exponents.collect();
    let results: Vec<(f64, f64, bool)> = exps
        .par_iter()
        .map(|&e| {
            let alpha = 2f64.powi(-(e as i32));
            match keys.with_key(key_name, keys.get(key_name) + alpha) {
                Ok(perturbed) => {
                    let rec = decrypt(&cipher, &perturbed)?;
                    Ok((alpha, mse(img, &rec)?, false))
                }
                Err(_) => Ok((alpha, f64::NAN, true)),
            }
        })
        .collect::<Result<_>>()?;
    let threshold_exponent = exps
        .iter()
        .zip(&results)
        .filter(|(_, (_, m, skipped))| !skipped && *m >= MSE_NOISE_FLOOR)
        .map(|(&e, _)| e)
        .max();
    Ok(SensitivityCurve {
        key_name,
        exponents: exps,
        alphas: results.iter().map(|r| r.0).collect(),
        mses: results.iter().map(|r| r.1).collect(),
        skipped: results.iter().map(|r| r.2).collect(),
        threshold_exponent,
    })
}

/// Outcome of a data-loss experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct DataLossReport {
    pub damaged_cipher: ImageBuffer,
    pub recovered: ImageBuffer,
    pub mse: f64,
    /// Zeroed region as (top row, left col, height, width).
    pub region: (usize, usize, usize, usize),
    pub fraction: f64,
}

/// Zero a contiguous rectangle of the cipher covering roughly `fraction` of
/// the pixels (anchored at `anchor`, top-left by default), decrypt with the
/// correct keys, and report the MSE against the original.
pub fn data_loss(
    img: &ImageBuffer,
    keys: &KeySet,
    fraction: f64,
    anchor: (usize, usize),
) -> Result<DataLossReport> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::BadFraction(fraction));
    }
    let (rows, cols) = (img.rows(), img.cols());
    // Aspect-preserving rectangle: h/M = w/N = sqrt(fraction), clamped to fit.
    let h = ((rows as f64 * fraction.sqrt()).round() as usize).clamp(1, rows);
    let w = (((fraction * (rows * cols) as f64) / h as f64).round() as usize).clamp(1, cols);
    let (i0, j0) = anchor;
    let h = h.min(rows - i0.min(rows - 1));
    let w = w.min(cols - j0.min(cols - 1));
    let mut damaged = encrypt(img, keys)?;
    for i in i0..i0 + h {
        for j in j0..j0 + w {
            damaged.set(i, j, 0);
        }
    }
    let recovered = decrypt(&damaged, keys)?;
    let err = mse(img, &recovered)?;
    Ok(DataLossReport {
        damaged_cipher: damaged,
        recovered,
        mse: err,
        region: (i0, j0, h, w),
        fraction: (h * w) as f64 / (rows * cols) as f64,
    })
}

/// Knobs for the full battery.
#[derive(Debug, Clone, Copy)]
pub struct AuditConfig {
    pub trials: usize,
    pub pairs: usize,
    pub seed: u64,
    pub exponent_lo: u32,
    pub exponent_hi: u32,
    pub fractions: [f64; 2],
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            trials: 20,
            pairs: CORR_DEFAULT_PAIRS,
            seed: 1,
            exponent_lo: 40,
            exponent_hi: 60,
            fractions: [0.25, 0.5],
        }
    }
}

/// Everything the `audit all` command reports.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub config: AuditConfig,
    pub plain_chi2: Chi2Report,
    pub cipher_chi2: Chi2Report,
    pub diff: DiffReport,
    pub plain_corr: Vec<CorrReport>,
    pub cipher_corr: Vec<CorrReport>,
    pub key_sensitivity: Vec<SensitivityCurve>,
    pub data_loss: Vec<DataLossReport>,
}

/// Run the whole battery on one image under one key set.
pub fn run_full_audit(img: &ImageBuffer, keys: &KeySet, config: AuditConfig) -> Result<AuditReport> {
    let cipher = encrypt(img, keys)?;
    let plain_chi2 = chi2_uniformity(img);
    let cipher_chi2 = chi2_uniformity(&cipher);
    let diff = diff_attack_trial(img, keys, config.trials, config.seed)?;
    let corr_of = |im: &ImageBuffer| -> Result<Vec<CorrReport>> {
        Direction::ALL
            .iter()
            .map(|&d| correlation(im, d, config.pairs, config.seed))
            .collect()
    };
    let plain_corr = corr_of(img)?;
    let cipher_corr = corr_of(&cipher)?;
    let key_sens = KeyName::ALL
        .iter()
        .map(|&k| key_sensitivity(img, keys, k, config.exponent_lo..=config.exponent_hi))
        .collect::<Result<Vec<_>>>()?;
    let losses = config
        .fractions
        .iter()
        .map(|&f| data_loss(img, keys, f, (0, 0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AuditReport {
        config,
        plain_chi2,
        cipher_chi2,
        diff,
        plain_corr,
        cipher_corr,
        key_sensitivity: key_sens,
        data_loss: losses,
    })
}

impl AuditReport {
    /// Human-readable summary.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "security audit (sampling seed = {})", self.config.seed)?;
        writeln!(w)?;
        writeln!(
            w,
            "histogram chi-square (255 dof, critical {CHI2_CRITICAL_0_05} at alpha=0.05)"
        )?;
        writeln!(
            w,
            "  plain:  {:>12.4}  {}",
            self.plain_chi2.statistic,
            if self.plain_chi2.pass { "uniform" } else { "non-uniform" }
        )?;
        writeln!(
            w,
            "  cipher: {:>12.4}  {}",
            self.cipher_chi2.statistic,
            if self.cipher_chi2.pass { "PASS" } else { "FAIL" }
        )?;
        writeln!(w)?;
        writeln!(
            w,
            "differential metrics, {} one-bit-change trials",
            self.diff.trials
        )?;
        writeln!(w, "  mean NPCR = {:.4}%", self.diff.npcr)?;
        for (alpha, crit) in NPCR_CRITICAL {
            writeln!(
                w,
                "    alpha={alpha}: critical {crit}%  {}",
                if self.diff.npcr > crit { "PASS" } else { "FAIL" }
            )?;
        }
        writeln!(w, "  mean UACI = {:.4}%", self.diff.uaci)?;
        for (alpha, (lo, hi)) in UACI_CRITICAL {
            writeln!(
                w,
                "    alpha={alpha}: interval [{lo}%, {hi}%]  {}",
                if (lo..=hi).contains(&self.diff.uaci) { "PASS" } else { "FAIL" }
            )?;
        }
        writeln!(w)?;
        writeln!(w, "adjacent-pixel correlation ({} pairs)", self.config.pairs)?;
        for (p, c) in self.plain_corr.iter().zip(&self.cipher_corr) {
            writeln!(
                w,
                "  {:<10} plain {:+.6}  cipher {:+.6}  {}",
                p.direction.as_str(),
                p.cc,
                c.cc,
                if c.cc.abs() < 0.02 { "PASS" } else { "FAIL" }
            )?;
        }
        writeln!(w)?;
        writeln!(
            w,
            "key sensitivity (wrong decryption when MSE >= {MSE_NOISE_FLOOR})"
        )?;
        for s in &self.key_sensitivity {
            match s.threshold_exponent {
                Some(e) => writeln!(w, "  {:<3} sensitive down to 2^-{e}", s.key_name.as_str())?,
                None => writeln!(w, "  {:<3} no sensitivity found in range", s.key_name.as_str())?,
            }
        }
        writeln!(w)?;
        writeln!(w, "data-loss robustness")?;
        for d in &self.data_loss {
            writeln!(
                w,
                "  {:.0}% region zeroed -> recovered MSE {:.1}",
                d.fraction * 100.0,
                d.mse
            )?;
        }
        Ok(())
    }

    /// Flat CSV: one `section,name,value` row per scalar.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "section,name,value")?;
        writeln!(w, "meta,seed,{}", self.config.seed)?;
        writeln!(w, "chi2,plain,{}", self.plain_chi2.statistic)?;
        writeln!(w, "chi2,cipher,{}", self.cipher_chi2.statistic)?;
        writeln!(w, "chi2,critical_0.05,{CHI2_CRITICAL_0_05}")?;
        writeln!(w, "diff,npcr_mean,{}", self.diff.npcr)?;
        writeln!(w, "diff,uaci_mean,{}", self.diff.uaci)?;
        for (i, (n, u)) in self.diff.per_trial.iter().enumerate() {
            writeln!(w, "diff,trial{i}_npcr,{n}")?;
            writeln!(w, "diff,trial{i}_uaci,{u}")?;
        }
        for (p, c) in self.plain_corr.iter().zip(&self.cipher_corr) {
            writeln!(w, "corr,plain_{},{}", p.direction.as_str(), p.cc)?;
            writeln!(w, "corr,cipher_{},{}", c.direction.as_str(), c.cc)?;
        }
        for s in &self.key_sensitivity {
            for ((e, m), skip) in s.exponents.iter().zip(&s.mses).zip(&s.skipped) {
                if !skip {
                    writeln!(w, "keysens,{}_2^-{e},{m}", s.key_name.as_str())?;
                }
            }
            if let Some(e) = s.threshold_exponent {
                writeln!(w, "keysens,{}_threshold,{e}", s.key_name.as_str())?;
            }
        }
        for d in &self.data_loss {
            writeln!(w, "dataloss,mse_at_{:.2},{}", d.fraction, d.mse)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn demo_keys() -> KeySet {
        KeySet::new(0.4584, 0.6541, 0.3619, 0.4508, 0.5874, 0.7391).unwrap()
    }

    #[test]
    fn chi2_uniform_is_zero() {
        let mut px = Vec::with_capacity(256 * 256);
        for v in 0..256 {
            px.extend(std::iter::repeat(v as u8).take(256));
        }
        let img = ImageBuffer::from_pixels(256, 256, px).unwrap();
        let rep = chi2_uniformity(&img);
        assert_eq!(rep.statistic, 0.0);
        assert!(rep.pass);
        assert!(!rep.low_sample);
    }

    #[test]
    fn chi2_constant_image_closed_form() {
        // All pixels in one bin: (MN - fe)^2/fe + 255 fe = 16_711_680 for 256x256.
        let img = ImageBuffer::filled(256, 256, 0).unwrap();
        let rep = chi2_uniformity(&img);
        assert_eq!(rep.statistic, 16_711_680.0);
        assert!(!rep.pass);
    }

    #[test]
    fn chi2_low_sample_flagged() {
        let img = ImageBuffer::filled(4, 4, 7).unwrap();
        assert!(chi2_uniformity(&img).low_sample);
    }

    #[test]
    fn npcr_uaci_trivial_pairs() {
        let a = ImageBuffer::filled(8, 8, 37).unwrap();
        let d = npcr_uaci(&a, &a).unwrap();
        assert_eq!((d.npcr, d.uaci), (0.0, 0.0));

        let black = ImageBuffer::filled(8, 8, 0).unwrap();
        let white = ImageBuffer::filled(8, 8, 255).unwrap();
        let d = npcr_uaci(&black, &white).unwrap();
        assert_eq!((d.npcr, d.uaci), (100.0, 100.0));

        let b = ImageBuffer::filled(8, 9, 0).unwrap();
        assert!(npcr_uaci(&a, &b).is_err());
    }

    #[test]
    fn npcr_uaci_matches_brute_force_on_4x4() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let a: Vec<u8> = (0..16).map(|_| rng.gen()).collect();
            let b: Vec<u8> = (0..16).map(|_| rng.gen()).collect();
            let ia = ImageBuffer::from_pixels(4, 4, a.clone()).unwrap();
            let ib = ImageBuffer::from_pixels(4, 4, b.clone()).unwrap();
            let d = npcr_uaci(&ia, &ib).unwrap();
            // Exhaustive per-pixel recomputation.
            let mut cnt = 0u64;
            let mut sum = 0u64;
            for i in 0..16 {
                if a[i] != b[i] {
                    cnt += 1;
                }
                sum += (a[i] as i64 - b[i] as i64).unsigned_abs();
            }
            assert_eq!(d.npcr, 100.0 * (cnt as f64) / 16.0);
            assert_eq!(d.uaci, 100.0 * (sum as f64) / (255.0 * 16.0));
        }
    }

    #[test]
    fn npcr_uaci_symmetric_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let a = ImageBuffer::from_pixels(8, 8, (0..64).map(|_| rng.gen()).collect()).unwrap();
        let b = ImageBuffer::from_pixels(8, 8, (0..64).map(|_| rng.gen()).collect()).unwrap();
        let ab = npcr_uaci(&a, &b).unwrap();
        let ba = npcr_uaci(&b, &a).unwrap();
        assert_eq!((ab.npcr, ab.uaci), (ba.npcr, ba.uaci));
        assert!(ab.uaci <= ab.npcr);
    }

    #[test]
    fn diff_attack_single_pixel_image() {
        let img = ImageBuffer::filled(1, 1, 42).unwrap();
        let d = diff_attack_trial(&img, &demo_keys(), 1, 3).unwrap();
        assert!(d.npcr == 0.0 || d.npcr == 100.0);
    }

    #[test]
    fn correlation_gradient_is_linear() {
        let mut px = Vec::new();
        for _row in 0..64 {
            for j in 0..64 {
                px.push((j * 4) as u8);
            }
        }
        let img = ImageBuffer::from_pixels(64, 64, px).unwrap();
        let cc = correlation(&img, Direction::Horizontal, 1000, 1).unwrap().cc;
        assert!(cc > 0.999, "{cc}");
    }

    #[test]
    fn correlation_constant_image_errors() {
        let img = ImageBuffer::filled(32, 32, 9).unwrap();
        assert!(matches!(
            correlation(&img, Direction::Vertical, 100, 1),
            Err(Error::ConstantImage)
        ));
    }

    #[test]
    fn correlation_pair_budget_checked() {
        let img = ImageBuffer::filled(4, 4, 0).unwrap();
        assert!(matches!(
            correlation(&img, Direction::Horizontal, 100, 1),
            Err(Error::NotEnoughPairs { .. })
        ));
    }

    #[test]
    fn correlation_affine_invariance() {
        // Rescaling pixel values rescales BOTH pair coordinates, so the
        // coefficient is invariant for negative slopes too (the two sign
        // flips cancel); a one-sided flip is not expressible here.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let base: Vec<u8> = (0..4096).map(|_| rng.gen_range(0..50u8)).collect();
        let img = ImageBuffer::from_pixels(64, 64, base.clone()).unwrap();
        let scaled =
            ImageBuffer::from_pixels(64, 64, base.iter().map(|&v| v * 4 + 10).collect()).unwrap();
        let flipped =
            ImageBuffer::from_pixels(64, 64, base.iter().map(|&v| 200 - v * 2).collect()).unwrap();
        let c0 = correlation(&img, Direction::Diagonal, 2000, 5).unwrap().cc;
        let c1 = correlation(&scaled, Direction::Diagonal, 2000, 5).unwrap().cc;
        let c2 = correlation(&flipped, Direction::Diagonal, 2000, 5).unwrap().cc;
        assert!((c0 - c1).abs() < 1e-12, "{c0} vs {c1}");
        assert!((c0 - c2).abs() < 1e-12, "{c0} vs {c2}");
    }

    #[test]
    fn correlation_magnitude_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let img =
            ImageBuffer::from_pixels(64, 64, (0..4096).map(|_| rng.gen()).collect()).unwrap();
        for d in Direction::ALL {
            let cc = correlation(&img, d, 2000, 7).unwrap().cc;
            assert!(cc.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn mse_zero_iff_equal() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let img =
            ImageBuffer::from_pixels(16, 16, (0..256).map(|_| rng.gen()).collect()).unwrap();
        assert_eq!(mse(&img, &img).unwrap(), 0.0);
    }

    #[test]
    fn key_sensitivity_unperturbed_key_recovers() {
        // Exponent far beyond float resolution: key + 2^-80 == key, MSE 0.
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let img =
            ImageBuffer::from_pixels(16, 16, (0..256).map(|_| rng.gen()).collect()).unwrap();
        let curve = key_sensitivity(&img, &demo_keys(), KeyName::X1, 80..=80).unwrap();
        assert_eq!(curve.mses[0], 0.0);
        assert_eq!(curve.threshold_exponent, None);
    }

    #[test]
    fn key_sensitivity_coarse_perturbation_garbles() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let img =
            ImageBuffer::from_pixels(32, 32, (0..1024).map(|_| rng.gen()).collect()).unwrap();
        for key in [KeyName::X1, KeyName::R3] {
            let curve = key_sensitivity(&img, &demo_keys(), key, 40..=40).unwrap();
            assert!(curve.mses[0] >= MSE_NOISE_FLOOR, "{key:?}: {}", curve.mses[0]);
        }
    }

    #[test]
    fn key_sensitivity_skips_escaping_perturbations() {
        let keys = KeySet::new(0.9999999999999999, 0.5, 0.5, 0.5, 0.5, 0.5).unwrap();
        let img = ImageBuffer::filled(8, 8, 100).unwrap();
        // 2^-4 pushes x1 above 1; the point must be skipped, not fatal.
        let curve = key_sensitivity(&img, &keys, KeyName::X1, 4..=4).unwrap();
        assert!(curve.skipped[0]);
    }

    #[test]
    fn data_loss_monotone_in_fraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let img =
            ImageBuffer::from_pixels(64, 64, (0..4096).map(|_| rng.gen_range(40..90u8)).collect())
                .unwrap();
        let keys = demo_keys();
        let small = data_loss(&img, &keys, 0.01, (0, 0)).unwrap();
        let quarter = data_loss(&img, &keys, 0.25, (0, 0)).unwrap();
        let half = data_loss(&img, &keys, 0.5, (0, 0)).unwrap();
        assert!(small.mse < quarter.mse);
        assert!(quarter.mse < half.mse);
        assert!(data_loss(&img, &keys, 0.0, (0, 0)).is_err());
        assert!(data_loss(&img, &keys, 1.0, (0, 0)).is_err());
    }

    #[test]
    fn data_loss_region_covers_requested_fraction() {
        let img = ImageBuffer::filled(64, 64, 50).unwrap();
        let rep = data_loss(&img, &demo_keys(), 0.25, (0, 0)).unwrap();
        assert!((rep.fraction - 0.25).abs() < 0.02, "{}", rep.fraction);
        let (_, _, h, w) = rep.region;
        assert_eq!((h, w), (32, 32));
    }

    #[test]
    fn data_loss_damage_recovers_noise_not_structure() {
        // Pixels that decrypt wrong should look closer to uniform noise than
        // the original content at those positions.
        let mut px = Vec::new();
        for i in 0..64 {
            for j in 0..64 {
                px.push((((i + j) / 2) % 64 + 60) as u8);
            }
        }
        let img = ImageBuffer::from_pixels(64, 64, px).unwrap();
        let rep = data_loss(&img, &demo_keys(), 0.25, (0, 0)).unwrap();
        let mut wrong_recovered = Vec::new();
        let mut wrong_original = Vec::new();
        for (&r, &o) in rep.recovered.pixels().iter().zip(img.pixels()) {
            if r != o {
                wrong_recovered.push(r);
                wrong_original.push(o);
            }
        }
        assert!(!wrong_recovered.is_empty());
        let chi = |vals: &[u8]| {
            let mut hist = [0f64; 256];
            for &v in vals {
                hist[v as usize] += 1.0;
            }
            let fe = vals.len() as f64 / 256.0;
            hist.iter().map(|f| (f - fe) * (f - fe) / fe).sum::<f64>()
        };
        assert!(chi(&wrong_recovered) < chi(&wrong_original));
    }

    #[test]
    fn report_writers_produce_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let img =
            ImageBuffer::from_pixels(32, 32, (0..1024).map(|_| rng.gen_range(10..200u8)).collect())
                .unwrap();
        let cfg = AuditConfig {
            trials: 2,
            pairs: 200,
            seed: 1,
            exponent_lo: 50,
            exponent_hi: 52,
            fractions: [0.25, 0.5],
        };
        let report = run_full_audit(&img, &demo_keys(), cfg).unwrap();
        let mut text = Vec::new();
        report.write_text(&mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        assert!(text.contains("chi-square"));
        assert!(text.contains("NPCR"));
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("section,name,value\n"));
        assert!(csv.contains("keysens,x1_threshold"));
    }
}
