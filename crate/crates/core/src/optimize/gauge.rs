//! Similarity alignment of point sets and rank statistics, used to compare
//! reconstructions (defined up to an in-plane similarity) with ground truth.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geometry::WorldPoint;

/// `x -> scale * rotation * x + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl SimilarityTransform {
    pub fn identity() -> Self {
        SimilarityTransform {
            scale: 1.0,
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn apply(&self, p: &WorldPoint) -> WorldPoint {
        WorldPoint::from(self.scale * (self.rotation * p.coords) + self.translation)
    }
}

/// Least-squares similarity mapping `recovered` onto `truth` (Umeyama's
/// closed form), and the RMS distance after alignment.
pub fn gauge_align(recovered: &[WorldPoint], truth: &[WorldPoint]) -> Result<(SimilarityTransform, f64)> {
    if recovered.len() != truth.len() {
        return Err(Error::LengthMismatch(format!(
            "{} recovered points vs {} true points",
            recovered.len(),
            truth.len()
        )));
    }
    if recovered.len() < 3 {
        return Err(Error::RankDeficient);
    }
    let n = recovered.len() as f64;
    let mean = |pts: &[WorldPoint]| pts.iter().fold(Vector3::zeros(), |a, p| a + p.coords) / n;
    let (mu_src, mu_dst) = (mean(recovered), mean(truth));

    let mut cov = Matrix3::zeros();
    let mut src_cov = Matrix3::zeros();
    let mut src_var = 0.0;
    for (s, d) in recovered.iter().zip(truth) {
        let (a, b) = (s.coords - mu_src, d.coords - mu_dst);
        cov += b * a.transpose();
        src_cov += a * a.transpose();
        src_var += a.norm_squared();
    }
    cov /= n;
    src_var /= n;

    // Collinear or coincident sources leave the rotation undetermined.
    let mut spread = src_cov.symmetric_eigenvalues().as_slice().to_vec();
    spread.sort_by(|a, b| b.total_cmp(a));
    if !(spread[0] > 0.0) || spread[1] <= 1e-10 * spread[0] {
        return Err(Error::RankDeficient);
    }

    let svd = cov.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut sign = Matrix3::identity();
    if (u.determinant() * v_t.determinant()) < 0.0 {
        sign[(2, 2)] = -1.0;
    }
    let rotation = u * sign * v_t;
    let trace: f64 = (0..3).map(|k| svd.singular_values[k] * sign[(k, k)]).sum();
    let scale = trace / src_var;
    let translation = mu_dst - scale * rotation * mu_src;
    let transform = SimilarityTransform {
        scale,
        rotation,
        translation,
    };

    let sq: f64 = recovered
        .iter()
        .zip(truth)
        .map(|(s, d)| (transform.apply(s) - d).norm_squared())
        .sum();
    Ok((transform, (sq / n).sqrt()))
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut r = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Tied values share their average rank.
        let avg = 0.5 * (i + j) as f64 + 1.0;
        for &k in &order[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; NaN when either input is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spearman inputs differ in length");
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    cov / (va * vb).sqrt()
}
