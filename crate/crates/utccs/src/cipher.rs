//! Image encryption: sequential-swap confusion, bit-plane flip, and a
//! two-pass (forward + reverse) diffusion, plus the exact inverses.
//!
//! Pipeline: `diffuse(bitplane_flip(confuse(P)))`, with the three stages
//! keyed by (x1,r1), nothing, and (x3,r3) respectively; the confusion plan
//! uses (x1,r1) and (x2,r2). Decryption applies the inverses in reverse
//! order. Color images are channel-stacked to one tall grayscale buffer
//! before encryption.

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::rng::{Cbprng, MapChoice};

/// The six secret keys, each strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeySet {
    pub x1: f64,
    pub r1: f64,
    pub x2: f64,
    pub r2: f64,
    pub x3: f64,
    pub r3: f64,
}

fn check_key(what: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::KeyRange { what, value: v })
    }
}

impl KeySet {
    pub fn new(x1: f64, r1: f64, x2: f64, r2: f64, x3: f64, r3: f64) -> Result<Self> {
        Ok(KeySet {
            x1: check_key("x1", x1)?,
            r1: check_key("r1", r1)?,
            x2: check_key("x2", x2)?,
            r2: check_key("r2", r2)?,
            x3: check_key("x3", x3)?,
            r3: check_key("r3", r3)?,
        })
    }

    /// Parse a key file: six decimal values, one per line, in the order
    /// x1 r1 x2 r2 x3 r3. Values are read at full 64-bit precision.
    pub fn from_text(text: &str) -> Result<Self> {
        let vals: Vec<f64> = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::MalformedKeys(format!("bad number {tok:?}")))
            })
            .collect::<Result<_>>()?;
        if vals.len() != 6 {
            return Err(Error::MalformedKeys(format!(
                "expected 6 values, found {}",
                vals.len()
            )));
        }
        KeySet::new(vals[0], vals[1], vals[2], vals[3], vals[4], vals[5])
    }

    pub fn get(&self, name: KeyName) -> f64 {
        match name {
            KeyName::X1 => self.x1,
            KeyName::R1 => self.r1,
            KeyName::X2 => self.x2,
            KeyName::R2 => self.r2,
            KeyName::X3 => self.x3,
            KeyName::R3 => self.r3,
        }
    }

    /// A copy with one key replaced; fails if the value leaves (0, 1).
    pub fn with_key(&self, name: KeyName, value: f64) -> Result<Self> {
        let mut k = *self;
        let slot = match name {
            KeyName::X1 => &mut k.x1,
            KeyName::R1 => &mut k.r1,
            KeyName::X2 => &mut k.x2,
            KeyName::R2 => &mut k.r2,
            KeyName::X3 => &mut k.x3,
            KeyName::R3 => &mut k.r3,
        };
        *slot = check_key(name.as_str(), value)?;
        Ok(k)
    }
}

/// Names the six keys, for sensitivity sweeps and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyName {
    X1,
    R1,
    X2,
    R2,
    X3,
    R3,
}

impl KeyName {
    pub const ALL: [KeyName; 6] = [
        KeyName::X1,
        KeyName::R1,
        KeyName::X2,
        KeyName::R2,
        KeyName::X3,
        KeyName::R3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            KeyName::X1 => "x1",
            KeyName::R1 => "r1",
            KeyName::X2 => "x2",
            KeyName::R2 => "r2",
            KeyName::X3 => "x3",
            KeyName::R3 => "r3",
        }
    }
}

/// Two key-derived index matrices driving the swap sequence. Entries are
/// 1-based: `h1` in `[1, M]`, `h2` in `[1, N]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationPlan {
    rows: usize,
    cols: usize,
    h1: Vec<u32>,
    h2: Vec<u32>,
}

impl PermutationPlan {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn h1(&self) -> &[u32] {
        &self.h1
    }

    pub fn h2(&self) -> &[u32] {
        &self.h2
    }
}

/// Derive the swap-target matrices: `h1` from the logistic-sine generator
/// keyed (x1, r1) reduced mod M, `h2` from the tent-logistic generator keyed
/// (x2, r2) reduced mod N, both shifted to 1-based coordinates, row-major.
pub fn derive_permutation(keys: &KeySet, rows: usize, cols: usize) -> Result<PermutationPlan> {
    if rows == 0 || cols == 0 {
        return Err(Error::BadDimensions(rows, cols));
    }
    let mut g1 = Cbprng::new(MapChoice::Lscm, keys.x1, keys.r1, 32)?;
    let mut g2 = Cbprng::new(MapChoice::Tlcm, keys.x2, keys.r2, 32)?;
    let h1 = g1
        .fill_matrix(rows, cols, rows as u64)?
        .into_iter()
        .map(|w| w as u32 + 1)
        .collect();
    let h2 = g2
        .fill_matrix(rows, cols, cols as u64)?
        .into_iter()
        .map(|w| w as u32 + 1)
        .collect();
    Ok(PermutationPlan {
        rows,
        cols,
        h1,
        h2,
    })
}

fn check_plan(img: &ImageBuffer, plan: &PermutationPlan) -> Result<()> {
    if img.rows() != plan.rows || img.cols() != plan.cols {
        return Err(Error::DimensionMismatch(
            img.rows(),
            img.cols(),
            plan.rows,
            plan.cols,
        ));
    }
    Ok(())
}

/// Scramble pixel positions: every pixel `(i, j)`, visited top-down and
/// left-to-right, is exchanged with `(h1(i,j), h2(i,j))`. The output is a
/// permutation of the input pixels.
pub fn confuse(img: &ImageBuffer, plan: &PermutationPlan) -> Result<ImageBuffer> {
    check_plan(img, plan)?;
    let mut px = img.pixels().to_vec();
    let cols = plan.cols;
    for idx in 0..px.len() {
        let target = (plan.h1[idx] as usize - 1) * cols + (plan.h2[idx] as usize - 1);
        px.swap(idx, target);
    }
    img.with_pixels(px)
}

/// Exact inverse of `confuse`: replays the identical swap list in reverse order.
pub fn unconfuse(img: &ImageBuffer, plan: &PermutationPlan) -> Result<ImageBuffer> {
    check_plan(img, plan)?;
    let mut px = img.pixels().to_vec();
    let cols = plan.cols;
    for idx in (0..px.len()).rev() {
        let target = (plan.h1[idx] as usize - 1) * cols + (plan.h2[idx] as usize - 1);
        px.swap(idx, target);
    }
    img.with_pixels(px)
}

/// Per-plane mirror: the image is split into 8 bit planes by bit position;
/// even-indexed planes flip vertically, odd-indexed planes flip horizontally,
/// and the planes merge back. An involution.
pub fn bitplane_flip(img: &ImageBuffer) -> ImageBuffer {
    let (rows, cols) = (img.rows(), img.cols());
    let mut out = vec![0u8; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            let vert = img.get(rows - 1 - i, j);
            let horz = img.get(i, cols - 1 - j);
            // Even bits come from the vertical mirror, odd bits from the horizontal.
            out[i * cols + j] = (vert & 0b0101_0101) | (horz & 0b1010_1010);
        }
    }
    img.with_pixels(out).expect("same dimensions")
}

/// Reverse the full fixed 8-bit pattern: 1 -> 128, 6 -> 96.
#[inline]
pub fn bit_reverse8(v: u8) -> u8 {
    v.reverse_bits()
}

/// Minimal-width bit reversal: reverse the binary digits of the value with
/// no leading zeros, so 6 = 110b -> 011b = 3, and 0 -> 0. This (not the
/// fixed-width form) is the diffusion chain's function: a bit permutation is
/// XOR-linear and would let a one-bit plaintext change ride through the
/// forward pass as a one-bit difference forever, visibly capping the
/// pixel-change rate of the cipher.
#[inline]
pub fn bit_reverse_min(v: u8) -> u8 {
    if v == 0 {
        0
    } else {
        v.reverse_bits() >> v.leading_zeros()
    }
}

/// Forward-then-reverse diffusion over a flattened pixel sequence with an
/// explicit keystream `u` of `2 * len` bytes. Exposed for testing the
/// chaining arithmetic against hand-computed vectors.
pub fn diffuse_with_stream(pixels: &[u8], u: &[u8]) -> Vec<u8> {
    let n = pixels.len();
    assert_eq!(u.len(), 2 * n);
    let mut g = vec![0u8; n];
    g[0] = pixels[0] ^ u[0];
    for i in 1..n {
        g[i] = pixels[i] ^ u[i] ^ bit_reverse_min(g[i - 1]);
    }
    let mut q = vec![0u8; n];
    if n == 1 {
        // The reverse pass is anchored on the first diffused pixel; with a
        // single pixel that anchor would fold the value onto itself and lose
        // a bit, so the boundary term is zero instead.
        q[0] = g[0] ^ u[1];
    } else {
        q[n - 1] = g[n - 1].wrapping_add(g[0]) ^ u[2 * n - 1];
        for i in (0..n - 1).rev() {
            q[i] = g[i].wrapping_add(q[i + 1]) ^ u[i + n];
        }
    }
    q
}

/// Inverse of `diffuse_with_stream` under the same keystream.
pub fn undiffuse_with_stream(cipher: &[u8], u: &[u8]) -> Vec<u8> {
    let n = cipher.len();
    assert_eq!(u.len(), 2 * n);
    let mut g = vec![0u8; n];
    if n == 1 {
        g[0] = cipher[0] ^ u[1];
    } else {
        for i in 0..n - 1 {
            g[i] = (cipher[i] ^ u[i + n]).wrapping_sub(cipher[i + 1]);
        }
        g[n - 1] = (cipher[n - 1] ^ u[2 * n - 1]).wrapping_sub(g[0]);
    }
    let mut s = vec![0u8; n];
    s[0] = g[0] ^ u[0];
    for i in 1..n {
        s[i] = g[i] ^ u[i] ^ bit_reverse_min(g[i - 1]);
    }
    s
}

fn diffusion_stream(len: usize, x3: f64, r3: f64) -> Result<Vec<u8>> {
    check_key("x3", x3)?;
    check_key("r3", r3)?;
    let mut gen = Cbprng::new(MapChoice::Stcm, x3, r3, 32)?;
    Ok(gen
        .fill_matrix(2 * len, 1, 256)?
        .into_iter()
        .map(|w| w as u8)
        .collect())
}

/// Two-pass diffusion keyed by (x3, r3): the keystream is the sine-tent
/// generator's word sequence reduced mod 256, 2MN entries.
pub fn diffuse(img: &ImageBuffer, x3: f64, r3: f64) -> Result<ImageBuffer> {
    let u = diffusion_stream(img.len(), x3, r3)?;
    img.with_pixels(diffuse_with_stream(img.pixels(), &u))
}

/// Exact inverse of `diffuse`.
pub fn undiffuse(img: &ImageBuffer, x3: f64, r3: f64) -> Result<ImageBuffer> {
    let u = diffusion_stream(img.len(), x3, r3)?;
    img.with_pixels(undiffuse_with_stream(img.pixels(), &u))
}

/// Full encryption: confusion, bit-plane flip, diffusion.
pub fn encrypt(img: &ImageBuffer, keys: &KeySet) -> Result<ImageBuffer> {
    let plan = derive_permutation(keys, img.rows(), img.cols())?;
    diffuse(&bitplane_flip(&confuse(img, &plan)?), keys.x3, keys.r3)
}

/// Full decryption: un-diffusion, bit-plane flip, un-confusion.
pub fn decrypt(img: &ImageBuffer, keys: &KeySet) -> Result<ImageBuffer> {
    let plan = derive_permutation(keys, img.rows(), img.cols())?;
    unconfuse(&bitplane_flip(&undiffuse(img, keys.x3, keys.r3)?), &plan)
}
