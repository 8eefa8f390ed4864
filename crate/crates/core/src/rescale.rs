//! Block upsampling and downsampling of grayscale images.
//!
//! Upsampling by `b` replicates each pixel into a `b×b` block, which scales ℓ2
//! distances by exactly `b`, ℓ0 by `b²`, and leaves ℓ∞ unchanged.
//! Downsampling averages blocks and contracts ℓ2 distances by at least `1/b`.
//!
//! # File formats
//!
//! * CSV: one image row per line, comma-separated pixel values.
//! * Binary: 8-byte magic `ADVIMG01`, `u32` LE height, `u32` LE width
//!   (16-byte header), then `height·width` little-endian `f64` pixels, row-major.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 8] = b"ADVIMG01";

/// A row-major grayscale image with pixels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Invalid("image dimensions must be positive".into()));
        }
        if height * width != pixels.len() {
            return Err(Error::Invalid(format!(
                "{height}x{width} image needs {} pixels, got {}",
                height * width,
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::domain(format!("pixel value {bad} outside [0, 1]")));
        }
        Ok(ImageGrid {
            height,
            width,
            pixels,
        })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Mutable pixel access for building perturbations; values are not re-validated.
    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Invalid(format!("bad pixel value {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Invalid("ragged CSV image".into()));
        }
        Self::new(height, width, rows.concat())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.pixels.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|p| format!("{p:?}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..8] != BINARY_MAGIC {
            return Err(Error::Invalid("bad image magic".into()));
        }
        let height = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let width = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let mut buf = vec![0u8; height * width * 8];
        r.read_exact(&mut buf)?;
        let pixels = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(height, width, pixels)
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&(self.height as u32).to_le_bytes())?;
        w.write_all(&(self.width as u32).to_le_bytes())?;
        for p in &self.pixels {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }
}

fn check_factor(b: usize) -> Result<()> {
    if b == 0 {
        Err(Error::domain("block factor b must be >= 1"))
    } else {
        Ok(())
    }
}

/// Replaces each pixel with a `b×b` block of identical pixels.
pub fn upsample(img: &ImageGrid, b: usize) -> Result<ImageGrid> {
    check_factor(b)?;
    let (h, w) = (img.height * b, img.width * b);
    let mut pixels = Vec::with_capacity(h * w);
    for row in 0..h {
        let src = &img.pixels[(row / b) * img.width..(row / b + 1) * img.width];
        for &p in src {
            pixels.extend(std::iter::repeat_n(p, b));
        }
    }
    Ok(ImageGrid {
        height: h,
        width: w,
        pixels,
    })
}

/// Averages `b×b` blocks.
pub fn downsample(img: &ImageGrid, b: usize) -> Result<ImageGrid> {
    check_factor(b)?;
    if !img.height.is_multiple_of(b) || !img.width.is_multiple_of(b) {
        return Err(Error::Invalid(format!(
            "{}x{} image is not divisible into {b}x{b} blocks",
            img.height, img.width
        )));
    }
    let (h, w) = (img.height / b, img.width / b);
    let k = (b * b) as f64;
    let mut pixels = Vec::with_capacity(h * w);
    for br in 0..h {
        for bc in 0..w {
            let first = img.get(br * b, bc * b);
            // shifted mean: exact for constant blocks
            let mut dev = 0.0;
            for r in br * b..(br + 1) * b {
                for c in bc * b..(bc + 1) * b {
                    dev += img.get(r, c) - first;
                }
            }
            pixels.push((first + dev / k).clamp(0.0, 1.0));
        }
    }
    Ok(ImageGrid {
        height: h,
        width: w,
        pixels,
    })
}

fn diff(a: &ImageGrid, b: &ImageGrid) -> Result<Vec<f64>> {
    if a.height != b.height || a.width != b.width {
        return Err(Error::Invalid(format!(
            "image shapes differ: {}x{} vs {}x{}",
            a.height, a.width, b.height, b.width
        )));
    }
    Ok(a.pixels.iter().zip(&b.pixels).map(|(x, y)| x - y).collect())
}

pub fn l2_distance(a: &ImageGrid, b: &ImageGrid) -> Result<f64> {
    Ok(diff(a, b)?.iter().map(|d| d * d).sum::<f64>().sqrt())
}

pub fn l0_distance(a: &ImageGrid, b: &ImageGrid) -> Result<usize> {
    Ok(diff(a, b)?.iter().filter(|d| **d != 0.0).count())
}

pub fn linf_distance(a: &ImageGrid, b: &ImageGrid) -> Result<f64> {
    Ok(diff(a, b)?.iter().fold(0.0, |m, d| m.max(d.abs())))
}

/// Outcome of checking the scaling laws on one image pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LawViolation {
    pub law: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

/// Checks the ℓ2 equality, ℓ0/ℓ∞ laws, the downsampling contraction and the
/// round trip for one pair at factor `b`. `rel_tol` applies to the ℓ2 equality
/// and the contraction inequality.
pub fn check_laws(
    x: &ImageGrid,
    y: &ImageGrid,
    b: usize,
    rel_tol: f64,
) -> Result<Vec<LawViolation>> {
    check_laws_with(x, y, b, rel_tol, upsample)
}

/// [`check_laws`] with a substitute upsampler, for exercising the checker itself.
pub fn check_laws_with<F>(
    x: &ImageGrid,
    y: &ImageGrid,
    b: usize,
    rel_tol: f64,
    up: F,
) -> Result<Vec<LawViolation>>
where
    F: Fn(&ImageGrid, usize) -> Result<ImageGrid>,
{
    let mut out = Vec::new();
    let (ux, uy) = (up(x, b)?, up(y, b)?);
    let d = l2_distance(x, y)?;
    let du = l2_distance(&ux, &uy)?;
    if (du - b as f64 * d).abs() > rel_tol * (b as f64 * d).max(f64::MIN_POSITIVE) {
        out.push(LawViolation {
            law: "l2 upsample scaling",
            lhs: du,
            rhs: b as f64 * d,
        });
    }
    let (l0, l0u) = (l0_distance(x, y)?, l0_distance(&ux, &uy)?);
    if l0u != l0 * b * b {
        out.push(LawViolation {
            law: "l0 upsample scaling",
            lhs: l0u as f64,
            rhs: (l0 * b * b) as f64,
        });
    }
    let (li, liu) = (linf_distance(x, y)?, linf_distance(&ux, &uy)?);
    if li != liu {
        out.push(LawViolation {
            law: "linf upsample invariance",
            lhs: liu,
            rhs: li,
        });
    }
    if x.height.is_multiple_of(b) && x.width.is_multiple_of(b) {
        let dd = l2_distance(&downsample(x, b)?, &downsample(y, b)?)?;
        if dd > d / b as f64 * (1.0 + rel_tol) {
            out.push(LawViolation {
                law: "l2 downsample contraction",
                lhs: dd,
                rhs: d / b as f64,
            });
        }
    }
    if downsample(&ux, b)? != *x {
        out.push(LawViolation {
            law: "round trip",
            lhs: 1.0,
            rhs: 0.0,
        });
    }
    Ok(out)
}
