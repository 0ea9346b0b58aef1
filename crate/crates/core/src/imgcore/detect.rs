use std::fmt::Write as _;
use std::path::Path;

use super::Image;
use crate::error::{Error, Result};

/// One detected particle image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature2D {
    /// Subpixel column position.
    pub u: f64,
    /// Subpixel row position.
    pub v: f64,
    pub peak: f64,
    /// Summed raw intensity of the component.
    pub mass: f64,
    pub pixel_count: usize,
}

impl Feature2D {
    pub fn position(&self) -> (f64, f64) {
        (self.u, self.v)
    }
}

/// Thresholded blob detection.
///
/// Pixels brighter than `threshold` are grouped into 8-connected components.
/// Components whose size lies in `min_pixels..=max_pixels` become features
/// positioned at the centroid weighted by `intensity - threshold`. The result
/// is sorted by descending mass, ties by ascending `(v, u)`.
pub fn detect_features(img: &Image, threshold: f64, min_pixels: usize, max_pixels: usize) -> Vec<Feature2D> {
    let (w, h) = (img.width(), img.height());
    let data = img.data();
    let mut visited = vec![false; w * h];
    let mut stack = Vec::new();
    let mut features = Vec::new();

    for start in 0..w * h {
        if visited[start] || data[start] <= threshold {
            continue;
        }
        visited[start] = true;
        stack.push(start);
        // Moments are accumulated relative to the seed pixel.
        let (u0, v0) = ((start % w) as f64, (start / w) as f64);

        let (mut sw, mut su, mut sv) = (0.0, 0.0, 0.0);
        let (mut mass, mut peak, mut count) = (0.0, 0.0f64, 0usize);
        while let Some(idx) = stack.pop() {
            let (u, v) = (idx % w, idx / w);
            let value = data[idx];
            let weight = (value - threshold).max(0.0);
            sw += weight;
            su += weight * (u as f64 - u0);
            sv += weight * (v as f64 - v0);
            mass += value;
            peak = peak.max(value);
            count += 1;

            for nv in v.saturating_sub(1)..=(v + 1).min(h - 1) {
                for nu in u.saturating_sub(1)..=(u + 1).min(w - 1) {
                    let n = nv * w + nu;
                    if !visited[n] && data[n] > threshold {
                        visited[n] = true;
                        stack.push(n);
                    }
                }
            }
        }

        if count < min_pixels || count > max_pixels || sw <= 0.0 {
            continue;
        }
        features.push(Feature2D {
            u: u0 + su / sw,
            v: v0 + sv / sw,
            peak,
            mass,
            pixel_count: count,
        });
    }

    features.sort_by(|a, b| {
        b.mass
            .total_cmp(&a.mass)
            .then(a.v.total_cmp(&b.v))
            .then(a.u.total_cmp(&b.u))
    });
    features
}

/// Writes `id,u,v,peak,mass,pixels` with six decimals.
pub fn write_features_csv(path: impl AsRef<Path>, features: &[Feature2D]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("id,u,v,peak,mass,pixels\n");
    for (id, f) in features.iter().enumerate() {
        let _ = writeln!(
            out,
            "{id},{:.6},{:.6},{:.6},{:.6},{}",
            f.u, f.v, f.peak, f.mass, f.pixel_count
        );
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a feature CSV as written by [`write_features_csv`]. Rows are
/// returned in file order; the `id` column is ignored.
pub fn read_features_csv(path: impl AsRef<Path>) -> Result<Vec<Feature2D>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "id,u,v,peak,mass,pixels" => {}
        _ => {
            return Err(Error::Parse(format!(
                "{}: missing feature CSV header",
                path.display()
            )))
        }
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("{}:{}: bad feature row", path.display(), lineno + 2));
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 6 {
            return Err(bad());
        }
        let num = |i: usize| cols[i].parse::<f64>().map_err(|_| bad());
        out.push(Feature2D {
            u: num(1)?,
            v: num(2)?,
            peak: num(3)?,
            mass: num(4)?,
            pixel_count: cols[5].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}
