//! 8-bit image buffers and binary PGM (P5) / PPM (P6) reading and writing.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Row-major matrix of 8-bit pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
}

impl ImageBuffer {
    /// Wrap row-major pixel data; `pixels.len()` must equal `rows * cols`,
    /// and the image must be non-empty.
    pub fn from_pixels(rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 || pixels.len() != rows * cols {
            return Err(Error::BadDimensions(rows, cols));
        }
        Ok(ImageBuffer { rows, cols, pixels })
    }

    /// A constant-valued image.
    pub fn filled(rows: usize, cols: usize, value: u8) -> Result<Self> {
        Self::from_pixels(rows, cols, vec![value; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Total pixel count.
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.cols + col] = value;
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    /// Same dimensions, new pixel data.
    pub fn with_pixels(&self, pixels: Vec<u8>) -> Result<Self> {
        Self::from_pixels(self.rows, self.cols, pixels)
    }

    pub fn same_dimensions(&self, other: &ImageBuffer) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        Ok(())
    }
}

/// Three same-sized channels, R, G, B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    pub channels: [ImageBuffer; 3],
}

impl ColorImage {
    pub fn new(r: ImageBuffer, g: ImageBuffer, b: ImageBuffer) -> Result<Self> {
        r.same_dimensions(&g)?;
        r.same_dimensions(&b)?;
        Ok(ColorImage {
            channels: [r, g, b],
        })
    }

    pub fn rows(&self) -> usize {
        self.channels[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.channels[0].cols()
    }
}

/// Stack the three channels vertically (R on top, then G, then B) into one
/// `3M x N` grayscale buffer, the form the cipher operates on.
pub fn flatten_color(color: &ColorImage) -> ImageBuffer {
    let rows = color.rows();
    let cols = color.cols();
    let mut pixels = Vec::with_capacity(3 * rows * cols);
    for ch in &color.channels {
        pixels.extend_from_slice(ch.pixels());
    }
    ImageBuffer::from_pixels(3 * rows, cols, pixels).expect("channels validated")
}

/// Split a `3M x N` stacked buffer back into its three channels.
pub fn split_color(flat: &ImageBuffer) -> Result<ColorImage> {
    if flat.rows() % 3 != 0 {
        return Err(Error::BadDimensions(flat.rows(), flat.cols()));
    }
    let rows = flat.rows() / 3;
    let cols = flat.cols();
    let n = rows * cols;
    let mk = |i: usize| {
        ImageBuffer::from_pixels(rows, cols, flat.pixels()[i * n..(i + 1) * n].to_vec())
    };
    Ok(ColorImage {
        channels: [mk(0)?, mk(1)?, mk(2)?],
    })
}

/// A decoded image file: grayscale (P5) or color (P6).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pnm {
    Gray(ImageBuffer),
    Color(ColorImage),
}

impl Pnm {
    /// Grayscale view the cipher operates on: color images are channel-stacked.
    pub fn to_flat(&self) -> ImageBuffer {
        match self {
            Pnm::Gray(img) => img.clone(),
            Pnm::Color(c) => flatten_color(c),
        }
    }
}

fn bad(format: &'static str, reason: impl Into<String>) -> Error {
    Error::MalformedImage {
        format,
        reason: reason.into(),
    }
}

/// Read the next whitespace-delimited ASCII token, skipping `#` comments.
fn next_token(data: &[u8], pos: &mut usize, format: &'static str) -> Result<String> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(bad(format, "unexpected end of header"));
    }
    Ok(String::from_utf8_lossy(&data[start..*pos]).into_owned())
}

fn parse_dim(tok: &str, format: &'static str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| bad(format, format!("bad header field {tok:?}")))
}

/// Decode binary PGM (P5) or PPM (P6) bytes, 8-bit, maxval 255.
pub fn decode_pnm(data: &[u8]) -> Result<Pnm> {
    let mut pos = 0usize;
    let magic = next_token(data, &mut pos, "PNM")?;
    let (format, channels): (&'static str, usize) = match magic.as_str() {
        "P5" => ("PGM", 1),
        "P6" => ("PPM", 3),
        other => return Err(bad("PNM", format!("unsupported magic {other:?}"))),
    };
    let cols = parse_dim(&next_token(data, &mut pos, format)?, format)?;
    let rows = parse_dim(&next_token(data, &mut pos, format)?, format)?;
    let maxval = parse_dim(&next_token(data, &mut pos, format)?, format)?;
    if maxval != 255 {
        return Err(bad(format, format!("maxval {maxval} unsupported, want 255")));
    }
    if rows == 0 || cols == 0 {
        return Err(bad(format, "zero dimension"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= data.len() || !data[pos].is_ascii_whitespace() {
        return Err(bad(format, "missing raster separator"));
    }
    pos += 1;
    let need = rows * cols * channels;
    let raster = &data[pos..];
    if raster.len() < need {
        return Err(bad(
            format,
            format!("raster truncated: {} < {need}", raster.len()),
        ));
    }
    let raster = &raster[..need];
    if channels == 1 {
        Ok(Pnm::Gray(ImageBuffer::from_pixels(
            rows,
            cols,
            raster.to_vec(),
        )?))
    } else {
        let mut r = Vec::with_capacity(rows * cols);
        let mut g = Vec::with_capacity(rows * cols);
        let mut b = Vec::with_capacity(rows * cols);
        for px in raster.chunks_exact(3) {
            r.push(px[0]);
            g.push(px[1]);
            b.push(px[2]);
        }
        Ok(Pnm::Color(ColorImage::new(
            ImageBuffer::from_pixels(rows, cols, r)?,
            ImageBuffer::from_pixels(rows, cols, g)?,
            ImageBuffer::from_pixels(rows, cols, b)?,
        )?))
    }
}

/// Read a PGM/PPM file.
pub fn read_pnm(path: impl AsRef<Path>) -> Result<Pnm> {
    let mut data = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut data)?;
    decode_pnm(&data)
}

/// Encode a grayscale image as binary PGM (P5), maxval 255.
pub fn write_pgm<W: Write>(img: &ImageBuffer, w: &mut W) -> Result<()> {
    write!(w, "P5\n{} {}\n255\n", img.cols(), img.rows())?;
    w.write_all(img.pixels())?;
    Ok(())
}

/// Encode a color image as binary PPM (P6), maxval 255.
pub fn write_ppm<W: Write>(color: &ColorImage, w: &mut W) -> Result<()> {
    write!(w, "P6\n{} {}\n255\n", color.cols(), color.rows())?;
    let [r, g, b] = &color.channels;
    for i in 0..r.len() {
        w.write_all(&[r.pixels()[i], g.pixels()[i], b.pixels()[i]])?;
    }
    Ok(())
}

/// Write a decoded image back in its natural format.
pub fn write_pnm<W: Write>(img: &Pnm, w: &mut W) -> Result<()> {
    match img {
        Pnm::Gray(g) => write_pgm(g, w),
        Pnm::Color(c) => write_ppm(c, w),
    }
}
