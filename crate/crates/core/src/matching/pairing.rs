use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imgcore::Feature2D;

/// A feature of camera 1 matched to a feature of camera 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub cam1: usize,
    pub cam2: usize,
    /// Position in camera 1.
    pub p1: (f64, f64),
    /// Position in camera 2 (its own frame).
    pub p2: (f64, f64),
    /// Midpoint of the two features in the left image's frame.
    pub mosaic: (f64, f64),
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceSet {
    pub pairs: Vec<Correspondence>,
    pub offset: (i64, i64),
    pub tolerance_px: f64,
}

impl CorrespondenceSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Greedy global nearest-neighbour pairing in the left image's frame.
///
/// Camera-2 features are moved by `offset`; candidate pairs within `tol`
/// are taken in ascending distance (ties: lower camera-1 index, then lower
/// camera-2 index), each feature being used at most once.
pub fn pair_correspondences(
    f1: &[Feature2D],
    f2: &[Feature2D],
    offset: (i64, i64),
    tol: f64,
) -> Result<CorrespondenceSet> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!(
            "pairing tolerance must be positive, got {tol}"
        )));
    }
    let (du, dv) = (offset.0 as f64, offset.1 as f64);
    let moved: Vec<(f64, f64)> = f2.iter().map(|f| (f.u + du, f.v + dv)).collect();

    let mut candidates = Vec::new();
    for (i, a) in f1.iter().enumerate() {
        for (j, b) in moved.iter().enumerate() {
            let (ex, ey) = (b.0 - a.u, b.1 - a.v);
            if ex.abs() > tol || ey.abs() > tol {
                continue;
            }
            let d = ex.hypot(ey);
            if d <= tol {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut used1 = vec![false; f1.len()];
    let mut used2 = vec![false; f2.len()];
    let mut pairs = Vec::new();
    for (d, i, j) in candidates {
        if used1[i] || used2[j] {
            continue;
        }
        used1[i] = true;
        used2[j] = true;
        let (a, b) = (&f1[i], moved[j]);
        pairs.push(Correspondence {
            cam1: i,
            cam2: j,
            p1: (a.u, a.v),
            p2: (f2[j].u, f2[j].v),
            mosaic: (0.5 * (a.u + b.0), 0.5 * (a.v + b.1)),
            distance: d,
        });
    }
    Ok(CorrespondenceSet {
        pairs,
        offset,
        tolerance_px: tol,
    })
}

const HEADER: &str = "pair_id,cam1_id,u1,v1,cam2_id,u2,v2,mosaic_u,mosaic_v";

pub fn write_correspondences_csv(path: impl AsRef<Path>, set: &CorrespondenceSet) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("{HEADER}\n");
    for (k, p) in set.pairs.iter().enumerate() {
        let _ = writeln!(
            out,
            "{k},{},{:.6},{:.6},{},{:.6},{:.6},{:.6},{:.6}",
            p.cam1, p.p1.0, p.p1.1, p.cam2, p.p2.0, p.p2.1, p.mosaic.0, p.mosaic.1
        );
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads pairs written by [`write_correspondences_csv`]. The file does not
/// record the offset or tolerance, so the caller supplies them.
pub fn read_correspondences_csv(
    path: impl AsRef<Path>,
    offset: (i64, i64),
    tolerance_px: f64,
) -> Result<CorrespondenceSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(HEADER) {
        return Err(Error::Parse(format!(
            "{}: missing correspondence CSV header",
            path.display()
        )));
    }
    let mut pairs = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("{}:{}: bad correspondence row", path.display(), n + 2));
        let c: Vec<&str> = line.split(',').map(str::trim).collect();
        if c.len() != 9 {
            return Err(bad());
        }
        let f = |i: usize| c[i].parse::<f64>().map_err(|_| bad());
        let idx = |i: usize| c[i].parse::<usize>().map_err(|_| bad());
        let p1 = (f(2)?, f(3)?);
        let p2 = (f(5)?, f(6)?);
        let moved = (p2.0 + offset.0 as f64, p2.1 + offset.1 as f64);
        pairs.push(Correspondence {
            cam1: idx(1)?,
            cam2: idx(4)?,
            p1,
            p2,
            mosaic: (f(7)?, f(8)?),
            distance: (moved.0 - p1.0).hypot(moved.1 - p1.1),
        });
    }
    Ok(CorrespondenceSet {
        pairs,
        offset,
        tolerance_px,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn feat(u: f64, v: f64) -> Feature2D {
        Feature2D {
            u,
            v,
            peak: 1.0,
            mass: 1.0,
            pixel_count: 1,
        }
    }

    #[test]
    fn coincident_after_offset() {
        let s = pair_correspondences(&[feat(100.0, 100.0)], &[feat(90.0, 100.0)], (10, 0), 1.0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s.pairs[0].cam1, s.pairs[0].cam2), (0, 0));
        assert_eq!(s.pairs[0].distance, 0.0);
        assert_eq!(s.pairs[0].mosaic, (100.0, 100.0));
    }

    #[test]
    fn tolerance_cutoff() {
        let s = pair_correspondences(&[feat(100.0, 100.0)], &[feat(89.0, 100.0)], (10, 0), 0.5).unwrap();
        assert!(s.is_empty());
        assert!(pair_correspondences(&[], &[], (0, 0), 0.0).is_err());
    }

    #[test]
    fn greedy_takes_closest_first() {
        // f2[0] is 0.2 from f1[1] and 0.5 from f1[0]; f1[0] must fall back to f2[1].
        let f1 = [feat(0.0, 0.0), feat(0.7, 0.0)];
        let f2 = [feat(0.5, 0.0), feat(-0.8, 0.0)];
        let s = pair_correspondences(&f1, &f2, (0, 0), 1.0).unwrap();
        let got: Vec<_> = s.pairs.iter().map(|p| (p.cam1, p.cam2)).collect();
        assert_eq!(got, vec![(1, 0), (0, 1)]);
    }

    #[test]
    fn equal_distances_prefer_lower_camera1_index() {
        let f1 = [feat(-1.0, 0.0), feat(1.0, 0.0)];
        let f2 = [feat(0.0, 0.0)];
        let s = pair_correspondences(&f1, &f2, (0, 0), 2.0).unwrap();
        assert_eq!(s.pairs[0].cam1, 0);
    }

    #[test]
    fn csv_round_trip() {
        let f1 = [feat(10.0, 20.0), feat(30.5, 40.25)];
        let f2 = [feat(25.5, 35.25), feat(5.0, 15.0)];
        let s = pair_correspondences(&f1, &f2, (5, 5), 1.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pairs.csv");
        write_correspondences_csv(&p, &s).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("pair_id,cam1_id,u1,v1,cam2_id,u2,v2,mosaic_u,mosaic_v\n0,0,10.000000,20.000000,1,5.000000,15.000000,10.000000,20.000000\n"));
        assert_eq!(read_correspondences_csv(&p, (5, 5), 1.0).unwrap(), s);
    }

    proptest! {
        #[test]
        fn pairs_are_injective_within_tolerance_and_symmetric(
            a in prop::collection::vec((0.0f64..50.0, 0.0f64..50.0), 0..30),
            b in prop::collection::vec((0.0f64..50.0, 0.0f64..50.0), 0..30),
            du in -5i64..5, dv in -5i64..5,
            tol in 0.5f64..4.0,
        ) {
            let f1: Vec<_> = a.iter().map(|&(u, v)| feat(u, v)).collect();
            let f2: Vec<_> = b.iter().map(|&(u, v)| feat(u, v)).collect();
            let s = pair_correspondences(&f1, &f2, (du, dv), tol).unwrap();
            let mut seen1 = std::collections::HashSet::new();
            let mut seen2 = std::collections::HashSet::new();
            for p in &s.pairs {
                prop_assert!(seen1.insert(p.cam1) && seen2.insert(p.cam2));
                prop_assert!(p.distance <= tol);
            }
            let back = pair_correspondences(&f2, &f1, (-du, -dv), tol).unwrap();
            let mut fwd: Vec<_> = s.pairs.iter().map(|p| (p.cam1, p.cam2)).collect();
            let mut rev: Vec<_> = back.pairs.iter().map(|p| (p.cam2, p.cam1)).collect();
            fwd.sort();
            rev.sort();
            prop_assert_eq!(fwd, rev);
        }
    }
}
