use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::similarity::{cosine_to_unit, Similarity};
use crate::error::{Error, Result};
use crate::imgcore::{BitDepth, Image};

/// Similarity for every tested placement of a template.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    /// Offset of the first tested placement (column 0, row 0 of the map).
    pub origin: (i64, i64),
    pub stride: usize,
    pub cols: usize,
    pub rows: usize,
    pub values: Vec<f64>,
}

impl ScoreMap {
    pub fn offset_at(&self, col: usize, row: usize) -> (i64, i64) {
        (
            self.origin.0 + (col * self.stride) as i64,
            self.origin.1 + (row * self.stride) as i64,
        )
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// The map as an image, one pixel per tested placement.
    pub fn to_image(&self) -> Image {
        Image::from_fn(self.cols, self.rows, |c, r| self.get(c, r))
    }

    pub fn write_heatmap(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_image().write_pgm(path, BitDepth::Eight)
    }

    /// Shifts every offset by `delta`.
    fn translated(mut self, delta: (i64, i64)) -> Self {
        self.origin = (self.origin.0 + delta.0, self.origin.1 + delta.1);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    /// Top-left placement of the template inside the search image.
    pub offset: (i64, i64),
    pub score: f64,
    pub score_map: ScoreMap,
}

/// Inclusive range of template placements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub du_min: i64,
    pub du_max: i64,
    pub dv_min: i64,
    pub dv_max: i64,
}

impl SearchWindow {
    fn contains(&self, (du, dv): (i64, i64)) -> bool {
        (self.du_min..=self.du_max).contains(&du) && (self.dv_min..=self.dv_max).contains(&dv)
    }

    fn on_boundary(&self, (du, dv): (i64, i64)) -> bool {
        du == self.du_min || du == self.du_max || dv == self.dv_min || dv == self.dv_max
    }

    fn shifted(&self, d: (i64, i64)) -> SearchWindow {
        SearchWindow {
            du_min: self.du_min + d.0,
            du_max: self.du_max + d.0,
            dv_min: self.dv_min + d.1,
            dv_max: self.dv_max + d.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchOptions {
    pub stride: usize,
    pub window: Option<SearchWindow>,
    pub similarity: Similarity,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            stride: 1,
            window: None,
            similarity: Similarity::Cosine,
        }
    }
}

/// Exhaustive template search with normalized cosine similarity.
pub fn template_match(template: &Image, search: &Image, stride: usize) -> Result<MatchResult> {
    template_match_in(
        template,
        search,
        &MatchOptions {
            stride,
            ..Default::default()
        },
    )
}

/// Template search restricted to an optional window of placements. The
/// best placement wins; ties go to the smallest `dv`, then the smallest `du`.
/// Placements whose clipping has zero norm score 0.5 (orthogonal).
pub fn template_match_in(template: &Image, search: &Image, opts: &MatchOptions) -> Result<MatchResult> {
    let (tw, th) = (template.width(), template.height());
    let (sw, sh) = (search.width(), search.height());
    if tw > sw || th > sh {
        return Err(Error::TemplateTooLarge { tw, th, sw, sh });
    }
    if opts.stride == 0 {
        return Err(Error::Config("stride must be at least 1".into()));
    }
    let full = SearchWindow {
        du_min: 0,
        du_max: (sw - tw) as i64,
        dv_min: 0,
        dv_max: (sh - th) as i64,
    };
    let win = match opts.window {
        None => full,
        Some(w) => SearchWindow {
            du_min: w.du_min.max(full.du_min),
            du_max: w.du_max.min(full.du_max),
            dv_min: w.dv_min.max(full.dv_min),
            dv_max: w.dv_max.min(full.dv_max),
        },
    };
    if win.du_min > win.du_max || win.dv_min > win.dv_max {
        return Err(Error::Config(
            "search window does not overlap the search image".into(),
        ));
    }

    let n = (tw * th) as f64;
    let t_sum: f64 = template.data().iter().sum();
    let t_mean = match opts.similarity {
        Similarity::Cosine => 0.0,
        Similarity::ZeroMeanCosine => t_sum / n,
    };
    let t_norm2: f64 = template.data().iter().map(|x| (x - t_mean).powi(2)).sum();
    if t_norm2 == 0.0 {
        return Err(Error::DegenerateTemplate);
    }

    let stride = opts.stride;
    let cols = ((win.du_max - win.du_min) as usize) / stride + 1;
    let rows = ((win.dv_max - win.dv_min) as usize) / stride + 1;

    let score_at = |du: usize, dv: usize| -> f64 {
        let (mut dot, mut sum, mut sum2) = (0.0, 0.0, 0.0);
        for r in 0..th {
            let trow = template.row(r);
            let srow = &search.row(dv + r)[du..du + tw];
            for (&t, &s) in trow.iter().zip(srow) {
                dot += (t - t_mean) * s;
                sum += s;
                sum2 += s * s;
            }
        }
        let s_norm2 = match opts.similarity {
            Similarity::Cosine => sum2,
            Similarity::ZeroMeanCosine => (sum2 - sum * sum / n).max(0.0),
        };
        if s_norm2 <= 0.0 {
            0.5
        } else {
            cosine_to_unit(dot, t_norm2, s_norm2)
        }
    };

    let values: Vec<f64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|row| {
            let dv = win.dv_min as usize + row * stride;
            (0..cols).map(move |col| score_at(win.du_min as usize + col * stride, dv))
        })
        .collect();

    let mut best = 0;
    for (i, &s) in values.iter().enumerate() {
        if s > values[best] {
            best = i;
        }
    }
    let score_map = ScoreMap {
        origin: (win.du_min, win.dv_min),
        stride,
        cols,
        rows,
        values,
    };
    Ok(MatchResult {
        offset: score_map.offset_at(best % cols, best / cols),
        score: score_map.values[best],
        score_map,
    })
}

/// Rectangle of the right image used as the template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClipRegion {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl ClipRegion {
    /// Left edge strip of the frame: a quarter of the width, at most 256 px,
    /// with an eighth of the height trimmed from top and bottom to leave room
    /// for vertical shifts.
    pub fn default_for(width: usize, height: usize) -> Self {
        let margin = height / 8;
        ClipRegion {
            x: 0,
            y: margin,
            width: (width / 4).clamp(1, 256),
            height: height - 2 * margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetOptions {
    /// Template clipping of the right image; `None` selects
    /// [`ClipRegion::default_for`].
    pub clip: Option<ClipRegion>,
    /// Allowed mosaic offsets.
    pub window: Option<SearchWindow>,
    pub stride: usize,
    pub similarity: Similarity,
    /// Best scores below this value produce a warning.
    pub min_score: f64,
}

impl Default for OffsetOptions {
    fn default() -> Self {
        OffsetOptions {
            clip: None,
            window: None,
            stride: 1,
            similarity: Similarity::Cosine,
            min_score: 0.9,
        }
    }
}

/// Result of registering the right image onto the left one.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetEstimate {
    /// Mosaic offset: right pixel `(u, v)` lands on left pixel `(u + du, v + dv)`.
    pub offset: (i64, i64),
    pub score: f64,
    /// Scores indexed by mosaic offset.
    pub score_map: ScoreMap,
    pub clip: ClipRegion,
    pub warnings: Vec<String>,
}

/// Finds the integer translation placing `right` into `left`'s frame by
/// matching a clipping of `right` against `left`.
pub fn estimate_offset(left: &Image, right: &Image, opts: &OffsetOptions) -> Result<OffsetEstimate> {
    let clip = opts
        .clip
        .unwrap_or_else(|| ClipRegion::default_for(right.width(), right.height()));
    let template = right.crop(clip.x, clip.y, clip.width, clip.height)?;
    let to_placement = (clip.x as i64, clip.y as i64);
    let m = template_match_in(
        &template,
        left,
        &MatchOptions {
            stride: opts.stride,
            window: opts.window.map(|w| w.shifted(to_placement)),
            similarity: opts.similarity,
        },
    )?;
    let offset = (m.offset.0 - to_placement.0, m.offset.1 - to_placement.1);
    let mut warnings = Vec::new();
    if let Some(w) = opts.window {
        if !w.contains(offset) || w.on_boundary(offset) {
            warnings.push(format!(
                "best offset ({}, {}) lies on the edge of the search window; the true offset may be outside it",
                offset.0, offset.1
            ));
        }
    }
    if m.score < opts.min_score {
        warnings.push(format!(
            "best similarity {:.4} is below {}; the registration is unreliable",
            m.score, opts.min_score
        ));
    }
    Ok(OffsetEstimate {
        offset,
        score: m.score,
        score_map: m.score_map.translated((-to_placement.0, -to_placement.1)),
        clip,
        warnings,
    })
}
