use std::path::Path;

use crate::error::{Error, Result};

/// Row-major grayscale image with intensities normalized to `[0, 1]`.
///
/// Pixel `(u, v)` is column `u`, row `v`; its center sits at the integer
/// coordinate, so a feature centered on that pixel reports position `(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

/// Sample depth used when writing PGM files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    fn max_value(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension);
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} samples for a {width}x{height} image",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidImage(format!("intensity {bad} outside [0, 1]")));
        }
        Ok(Image { width, height, data })
    }

    /// Black image. Panics on a zero dimension.
    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    /// Constant image; `value` is clamped into `[0, 1]`.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Image {
            width,
            height,
            data: vec![value.clamp(0.0, 1.0); width * height],
        }
    }

    /// Builds an image by evaluating `f(u, v)` at every pixel; results are
    /// clamped into `[0, 1]` and NaN maps to 0.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                data.push(clamp_unit(f(u, v)));
            }
        }
        Image { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[v * self.width + u]
    }

    /// Sets a pixel, clamping the value into `[0, 1]`.
    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        self.data[v * self.width + u] = clamp_unit(value);
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.width..(v + 1) * self.width]
    }

    /// Copies the `w x h` rectangle whose top-left pixel is `(x, y)`.
    pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> Result<Image> {
        if w == 0 || h == 0 {
            return Err(Error::ZeroDimension);
        }
        if x + w > self.width || y + h > self.height {
            return Err(Error::InvalidImage(format!(
                "crop {w}x{h}+{x}+{y} exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(w * h);
        for v in y..y + h {
            data.extend_from_slice(&self.row(v)[x..x + w]);
        }
        Ok(Image {
            width: w,
            height: h,
            data,
        })
    }

    /// Content shifted by an integer `(du, dv)`; vacated pixels are zero.
    pub fn shifted(&self, du: i64, dv: i64) -> Image {
        let (w, h) = (self.width as i64, self.height as i64);
        Image::from_fn(self.width, self.height, |u, v| {
            let (su, sv) = (u as i64 - du, v as i64 - dv);
            if (0..w).contains(&su) && (0..h).contains(&sv) {
                self.get(su as usize, sv as usize)
            } else {
                0.0
            }
        })
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, encode_pgm(self, depth)).map_err(|e| Error::io(path, e))
    }
}

#[inline]
fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// Reads a grayscale raster. Binary PGM (`P5`, 8 or 16 bit) and grayscale
/// PNG are supported; samples are divided by the format's maximum value.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P5") {
        return decode_pgm(&bytes).map_err(|e| match e {
            Error::Parse(reason) => Error::UnsupportedFormat {
                path: path.to_owned(),
                reason,
            },
            other => other,
        });
    }
    if bytes.starts_with(b"\x89PNG") {
        return decode_png(&bytes).map_err(|reason| Error::UnsupportedFormat {
            path: path.to_owned(),
            reason,
        });
    }
    Err(Error::UnsupportedFormat {
        path: path.to_owned(),
        reason: "expected binary PGM (P5) or PNG".into(),
    })
}

fn decode_png(bytes: &[u8]) -> std::result::Result<Image, String> {
    use image::DynamicImage;
    let img =
        image::load_from_memory_with_format(bytes, image::ImageFormat::Png).map_err(|e| e.to_string())?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err("zero-dimension image".into());
    }
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(|s| s as f64 / 255.0).collect(),
        DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(|s| s as f64 / 65535.0).collect(),
        other => return Err(format!("not a grayscale PNG ({:?})", other.color())),
    };
    Image::new(w, h, data).map_err(|e| e.to_string())
}

/// Parses an in-memory binary PGM.
pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0;
    let magic = next_token(bytes, &mut pos).ok_or_else(|| Error::Parse("empty PGM".into()))?;
    if magic != b"P5" {
        return Err(Error::Parse("PGM magic must be P5".into()));
    }
    let mut header = [0usize; 3];
    for (slot, name) in header.iter_mut().zip(["width", "height", "maxval"]) {
        let tok = next_token(bytes, &mut pos)
            .ok_or_else(|| Error::Parse(format!("PGM header ends before {name}")))?;
        *slot = std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad PGM {name}")))?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 {
        return Err(Error::ZeroDimension);
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse(format!("PGM maxval {maxval} out of range")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let bytes_per_sample = if maxval > 255 { 2 } else { 1 };
    let n = width * height;
    let raster = bytes
        .get(pos..pos + n * bytes_per_sample)
        .ok_or_else(|| Error::Parse("PGM raster is truncated".into()))?;
    let scale = 1.0 / maxval as f64;
    let data: Vec<f64> = if bytes_per_sample == 1 {
        raster.iter().map(|&s| (s as f64 * scale).min(1.0)).collect()
    } else {
        raster
            .chunks_exact(2)
            .map(|c| (u16::from_be_bytes([c[0], c[1]]) as f64 * scale).min(1.0))
            .collect()
    };
    Image::new(width, height, data)
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| &bytes[start..*pos])
}

/// Serializes to binary PGM, rounding each intensity to the nearest sample.
pub fn encode_pgm(img: &Image, depth: BitDepth) -> Vec<u8> {
    let maxval = depth.max_value();
    let mut out = format!("P5\n{} {}\n{}\n", img.width, img.height, maxval).into_bytes();
    for &x in &img.data {
        let s = (x * maxval as f64).round() as u32;
        match depth {
            BitDepth::Eight => out.push(s as u8),
            BitDepth::Sixteen => out.extend_from_slice(&(s as u16).to_be_bytes()),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pgm8(w: usize, h: usize, samples: &[u8]) -> Vec<u8> {
        let mut b = format!("P5\n{w} {h}\n255\n").into_bytes();
        b.extend_from_slice(samples);
        b
    }

    #[test]
    fn normalizes_8bit_samples() {
        let img = decode_pgm(&pgm8(2, 2, &[0, 255, 128, 64])).unwrap();
        assert_eq!(img.data(), &[0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0]);
    }

    #[test]
    fn single_zero_pixel() {
        let img = decode_pgm(&pgm8(1, 1, &[0])).unwrap();
        assert_eq!(img.data(), &[0.0]);
    }

    #[test]
    fn sixteen_bit_max_is_one() {
        let mut b = b"P5 1 2 65535\n".to_vec();
        b.extend_from_slice(&[0xff, 0xff, 0x80, 0x00]);
        let img = decode_pgm(&b).unwrap();
        assert_eq!(img.get(0, 0), 1.0);
        assert_eq!(img.get(0, 1), 32768.0 / 65535.0);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut b = b"P5\n# made by hand\n1 1\n# max\n255\n".to_vec();
        b.push(255);
        assert_eq!(decode_pgm(&b).unwrap().data(), &[1.0]);
    }

    #[test]
    fn rejects_zero_dimension_and_truncation() {
        assert!(matches!(decode_pgm(b"P5 0 4 255\n"), Err(Error::ZeroDimension)));
        assert!(matches!(decode_pgm(&pgm8(2, 2, &[1, 2])), Err(Error::Parse(_))));
        assert!(matches!(decode_pgm(b"P2 1 1 255\n0"), Err(Error::Parse(_))));
    }

    #[test]
    fn load_reports_unsupported_and_missing() {
        let dir = tempfile::tempdir().unwrap();
        let txt = dir.path().join("a.txt");
        std::fs::write(&txt, "hello").unwrap();
        assert!(matches!(load_image(&txt), Err(Error::UnsupportedFormat { .. })));
        let missing = dir.path().join("missing.pgm");
        let err = load_image(&missing).unwrap_err();
        assert!(err.to_string().contains("missing.pgm"));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn pgm_and_png_round_trip() {
        let img = Image::from_fn(5, 3, |u, v| (u * 3 + v) as f64 / 20.0);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.pgm");
        img.write_pgm(&p, BitDepth::Sixteen).unwrap();
        let back = load_image(&p).unwrap();
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 0.5 / 65535.0);
        }

        let raw: Vec<u8> = img.data().iter().map(|x| (x * 255.0).round() as u8).collect();
        let buf = image::GrayImage::from_raw(5, 3, raw.clone()).unwrap();
        let png = dir.path().join("x.png");
        buf.save(&png).unwrap();
        let back = load_image(&png).unwrap();
        let expect: Vec<f64> = raw.iter().map(|&s| s as f64 / 255.0).collect();
        assert_eq!(back.data(), &expect[..]);
    }

    #[test]
    fn new_validates_range_and_length() {
        assert!(Image::new(2, 1, vec![0.0]).is_err());
        assert!(Image::new(1, 1, vec![1.5]).is_err());
        assert!(Image::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn crop_and_shift() {
        let img = Image::from_fn(4, 4, |u, v| (u + 4 * v) as f64 / 16.0);
        let c = img.crop(1, 2, 2, 2).unwrap();
        assert_eq!(c.data(), &[9.0 / 16.0, 10.0 / 16.0, 13.0 / 16.0, 14.0 / 16.0]);
        assert!(img.crop(3, 3, 2, 1).is_err());
        let s = img.shifted(1, 0);
        assert_eq!(s.get(0, 0), 0.0);
        assert_eq!(s.get(1, 0), img.get(0, 0));
    }
}
