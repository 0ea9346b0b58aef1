use crate::imgcore::Image;

/// Canvas position of the left image's top-left pixel in the mosaic built
/// by [`combine_images`].
pub fn mosaic_origin(offset: (i64, i64)) -> (usize, usize) {
    ((-offset.0).max(0) as usize, (-offset.1).max(0) as usize)
}

/// Overlays `right`, translated by `offset`, onto `left`. The canvas is the
/// bounding box of both frames; overlapping pixels take the brighter value
/// and uncovered pixels are black.
pub fn combine_images(left: &Image, right: &Image, offset: (i64, i64)) -> Image {
    let (du, dv) = offset;
    let (lw, lh) = (left.width() as i64, left.height() as i64);
    let (rw, rh) = (right.width() as i64, right.height() as i64);
    let x0 = du.min(0);
    let y0 = dv.min(0);
    let x1 = lw.max(du + rw);
    let y1 = lh.max(dv + rh);
    let sample = |img: &Image, w: i64, h: i64, u: i64, v: i64| {
        ((0..w).contains(&u) && (0..h).contains(&v)).then(|| img.get(u as usize, v as usize))
    };
    Image::from_fn((x1 - x0) as usize, (y1 - y0) as usize, |cu, cv| {
        let (u, v) = (cu as i64 + x0, cv as i64 + y0);
        let a = sample(left, lw, lh, u, v);
        let b = sample(right, rw, rh, u - du, v - dv);
        match (a, b) {
            (Some(a), Some(b)) => a.max(b),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => 0.0,
        }
    })
}
