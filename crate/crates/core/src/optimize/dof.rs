/// Scalar unknowns and residual equations of the sheet problem with `m`
/// cameras and `n` particles seen by all of them, with one focal length per
/// camera and the sheet in canonical position.
///
/// Unknowns: one scale per observation (`n m`), nine camera parameters
/// (`f, cx, cy`, three angles, three translations) per camera, three
/// coordinates per particle. Equations: three rows per observation.
pub fn count_dof(m: usize, n: usize) -> (usize, usize) {
    (n * m + 9 * m + 3 * n, 3 * n * m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        assert_eq!(count_dof(2, 18), (108, 108));
        assert_eq!(count_dof(3, 9), (81, 81));
        assert_eq!(count_dof(4, 8), (92, 96));
        assert_eq!(count_dof(5, 7), (101, 105));
    }

    #[test]
    fn forty_eight_pairs() {
        assert_eq!(count_dof(2, 48), (258, 288));
    }
}
