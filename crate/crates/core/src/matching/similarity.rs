use crate::error::{Error, Result};

/// Similarity measure used by template matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Similarity {
    /// `(1 + cos) / 2` of the raw intensity vectors.
    #[default]
    Cosine,
    /// The same measure after subtracting each vector's mean. Insensitive
    /// to a constant background, which biases plain cosine towards 1.
    ZeroMeanCosine,
}

/// `(1 + a.b / (|a| |b|)) / 2`, in `[0, 1]`.
pub fn normalized_cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    similarity(a, b, Similarity::Cosine)
}

pub fn similarity(a: &[f64], b: &[f64], kind: Similarity) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::LengthMismatch(format!(
            "similarity of vectors with lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (ma, mb) = match kind {
        Similarity::Cosine => (0.0, 0.0),
        Similarity::ZeroMeanCosine => (mean(a), mean(b)),
    };
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x - ma, y - mb);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateTemplate);
    }
    Ok(cosine_to_unit(dot, na, nb))
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

#[inline]
pub(crate) fn cosine_to_unit(dot: f64, norm2_a: f64, norm2_b: f64) -> f64 {
    (0.5 * (1.0 + dot / (norm2_a * norm2_b).sqrt())).clamp(0.0, 1.0)
}
