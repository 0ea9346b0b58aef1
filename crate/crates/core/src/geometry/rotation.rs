use nalgebra::Matrix3;

fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

fn rot_y(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

fn rot_z(g: f64) -> Matrix3<f64> {
    let (s, c) = g.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn drot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(0.0, 0.0, 0.0, 0.0, -s, -c, 0.0, c, -s)
}

fn drot_y(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(-s, 0.0, c, 0.0, 0.0, 0.0, -c, 0.0, -s)
}

fn drot_z(g: f64) -> Matrix3<f64> {
    let (s, c) = g.sin_cos();
    Matrix3::new(-s, -c, 0.0, c, -s, 0.0, 0.0, 0.0, 0.0)
}

/// `Rz(gamma) * Ry(beta) * Rx(alpha)`.
pub fn rotation_from_euler(alpha: f64, beta: f64, gamma: f64) -> Matrix3<f64> {
    rot_z(gamma) * rot_y(beta) * rot_x(alpha)
}

/// Partial derivatives of [`rotation_from_euler`] with respect to
/// `alpha`, `beta` and `gamma`.
pub fn rotation_derivatives(alpha: f64, beta: f64, gamma: f64) -> [Matrix3<f64>; 3] {
    let (rx, ry, rz) = (rot_x(alpha), rot_y(beta), rot_z(gamma));
    [
        rz * ry * drot_x(alpha),
        rz * drot_y(beta) * rx,
        drot_z(gamma) * ry * rx,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_angles_give_identity() {
        assert_eq!(rotation_from_euler(0.0, 0.0, 0.0), Matrix3::identity());
    }

    #[test]
    fn half_turn_about_x() {
        let r = rotation_from_euler(PI, 0.0, 0.0);
        let expect = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, -1.0));
        assert!((r - expect).amax() < 1e-15);
    }

    #[test]
    fn composed_matches_hand_multiplication() {
        // Elementary matrices written out independently of the helpers above.
        let (a, b, g) = (0.1f64, 0.2f64, 0.3f64);
        let rx = [[1.0, 0.0, 0.0], [0.0, a.cos(), -a.sin()], [0.0, a.sin(), a.cos()]];
        let ry = [[b.cos(), 0.0, b.sin()], [0.0, 1.0, 0.0], [-b.sin(), 0.0, b.cos()]];
        let rz = [[g.cos(), -g.sin(), 0.0], [g.sin(), g.cos(), 0.0], [0.0, 0.0, 1.0]];
        let mul = |p: [[f64; 3]; 3], q: [[f64; 3]; 3]| {
            let mut o = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        o[i][j] += p[i][k] * q[k][j];
                    }
                }
            }
            o
        };
        let expect = mul(mul(rz, ry), rx);
        let r = rotation_from_euler(a, b, g);
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[(i, j)] - expect[i][j]).abs() < 1e-15);
            }
        }
        assert!((r * r.transpose() - Matrix3::identity()).amax() < 1e-12);
        assert!((r.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let e = [0.3, -0.7, 1.1];
        let d = rotation_derivatives(e[0], e[1], e[2]);
        let h = 1e-6;
        for k in 0..3 {
            let mut p = e;
            let mut m = e;
            p[k] += h;
            m[k] -= h;
            let fd =
                (rotation_from_euler(p[0], p[1], p[2]) - rotation_from_euler(m[0], m[1], m[2])) / (2.0 * h);
            assert!((fd - d[k]).amax() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn always_special_orthogonal(a in -10.0f64..10.0, b in -10.0f64..10.0, g in -10.0f64..10.0) {
            let r = rotation_from_euler(a, b, g);
            prop_assert!((r.transpose() * r - Matrix3::identity()).amax() < 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() <= 1e-12);
        }
    }
}
