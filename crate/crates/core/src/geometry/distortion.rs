use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rational radial (`k1..k6`) plus tangential (`p1`, `p2`) lens distortion.
/// All-zero coefficients are the identity map.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
    pub p1: f64,
    pub p2: f64,
}

const SINGULAR_DENOMINATOR: f64 = 1e-12;

impl Distortion {
    pub fn is_zero(&self) -> bool {
        self.to_array().iter().all(|&c| c == 0.0)
    }

    /// `[k1, k2, k3, k4, k5, k6, p1, p2]`.
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.k1, self.k2, self.k3, self.k4, self.k5, self.k6, self.p1, self.p2,
        ]
    }

    pub fn from_array(c: [f64; 8]) -> Self {
        Distortion {
            k1: c[0],
            k2: c[1],
            k3: c[2],
            k4: c[3],
            k5: c[4],
            k6: c[5],
            p1: c[6],
            p2: c[7],
        }
    }

    fn radial_parts(&self, r2: f64) -> (f64, f64) {
        let (r4, r6) = (r2 * r2, r2 * r2 * r2);
        let num = 1.0 + self.k1 * r2 + self.k2 * r4 + self.k3 * r6;
        let den = 1.0 + self.k4 * r2 + self.k5 * r4 + self.k6 * r6;
        (num, den)
    }
}

/// Distorts normalized image coordinates.
pub fn apply_distortion(xn: (f64, f64), d: &Distortion) -> Result<(f64, f64)> {
    let (x, y) = xn;
    let r2 = x * x + y * y;
    let (num, den) = d.radial_parts(r2);
    if den.abs() <= SINGULAR_DENOMINATOR {
        return Err(Error::SingularDistortion(den));
    }
    let rho = num / den;
    Ok((
        x * rho + 2.0 * d.p1 * x * y + d.p2 * (r2 + 2.0 * x * x),
        y * rho + d.p1 * (r2 + 2.0 * y * y) + 2.0 * d.p2 * x * y,
    ))
}

/// Jacobians of [`apply_distortion`]: with respect to the input coordinates
/// (2x2) and with respect to the eight coefficients in
/// [`Distortion::to_array`] order (two rows of eight).
pub fn distortion_jacobian(xn: (f64, f64), d: &Distortion) -> Result<(Matrix2<f64>, [[f64; 8]; 2])> {
    let (x, y) = xn;
    let r2 = x * x + y * y;
    let (r4, r6) = (r2 * r2, r2 * r2 * r2);
    let (num, den) = d.radial_parts(r2);
    if den.abs() <= SINGULAR_DENOMINATOR {
        return Err(Error::SingularDistortion(den));
    }
    let rho = num / den;
    let dnum = d.k1 + 2.0 * d.k2 * r2 + 3.0 * d.k3 * r4;
    let dden = d.k4 + 2.0 * d.k5 * r2 + 3.0 * d.k6 * r4;
    // d rho / d r^2
    let drho = (dnum * den - num * dden) / (den * den);

    let wrt_point = Matrix2::new(
        rho + 2.0 * x * x * drho + 2.0 * d.p1 * y + 6.0 * d.p2 * x,
        2.0 * x * y * drho + 2.0 * d.p1 * x + 2.0 * d.p2 * y,
        2.0 * x * y * drho + 2.0 * d.p1 * x + 2.0 * d.p2 * y,
        rho + 2.0 * y * y * drho + 6.0 * d.p1 * y + 2.0 * d.p2 * x,
    );

    let drho_dk = [
        r2 / den,
        r4 / den,
        r6 / den,
        -num * r2 / (den * den),
        -num * r4 / (den * den),
        -num * r6 / (den * den),
    ];
    let mut wrt_coeffs = [[0.0; 8]; 2];
    for k in 0..6 {
        wrt_coeffs[0][k] = x * drho_dk[k];
        wrt_coeffs[1][k] = y * drho_dk[k];
    }
    wrt_coeffs[0][6] = 2.0 * x * y;
    wrt_coeffs[0][7] = r2 + 2.0 * x * x;
    wrt_coeffs[1][6] = r2 + 2.0 * y * y;
    wrt_coeffs[1][7] = 2.0 * x * y;
    Ok((wrt_point, wrt_coeffs))
}
