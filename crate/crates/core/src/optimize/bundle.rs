//! Joint estimation of cameras and particle positions with the particles
//! confined to the plane `z = 0` or the slab `lower <= z <= upper`.
//!
//! Every observation of particle `j` in camera `i` contributes the residual
//!
//! ```text
//! (p_ij; 1) - (1 / s_ij) * C_i [R_i | t_i] (x_j; 1)
//! ```
//!
//! with the per-observation scale `s_ij = exp(sigma_ij)` as an unknown. With
//! lens distortion active the camera-frame point is distorted in normalized
//! coordinates first, which leaves the residual unchanged for zero
//! coefficients. When scales are eliminated the residual is the plain pixel
//! difference after perspective division.
//!
//! Gauge: the first camera's pose is held at its initial value and so is the
//! `x` coordinate of the first particle. Plane particles carry `(x, y)` only;
//! sheet particles carry `(x, y, w)` with `z = mid + half * sin(w)`, so both
//! constraints hold exactly for every parameter vector.

use nalgebra::{DMatrix, DVector, Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, NllsProblem, SolverOptions};
use super::result::{reprojection_rms, ReconstructionResult};
use crate::error::{Error, Result};
use crate::geometry::{
    apply_distortion, distortion_jacobian, rotation_derivatives, CameraParams, Distortion, WorldPoint,
    MIN_DEPTH,
};
use crate::matching::CorrespondenceSet;

/// Minimum number of correspondences for the plane problem.
pub const MIN_PLANE_PAIRS: usize = 5;

/// Number of parameters fixed to remove the gauge freedom: six for the first
/// camera's pose and one for the first particle's `x`.
pub const GAUGE_DIMENSION: usize = 7;

/// Laser sheet `lower <= normal . x <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SheetModel {
    pub normal: Vector3<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl SheetModel {
    /// Sheet of thickness `depth` centered on `z = 0`.
    pub fn canonical(depth: f64) -> Self {
        SheetModel {
            normal: Vector3::z(),
            lower: -depth / 2.0,
            upper: depth / 2.0,
        }
    }

    pub fn depth(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower <= self.upper) || !self.lower.is_finite() || !self.upper.is_finite() {
            return Err(Error::Config(format!(
                "sheet bounds must satisfy lower <= upper (got {} and {})",
                self.lower, self.upper
            )));
        }
        if (self.normal.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Config("sheet normal must have unit length".into()));
        }
        Ok(())
    }

    fn is_canonical(&self) -> bool {
        self.normal == Vector3::z()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceConstraint {
    Plane,
    Sheet { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundleOptions {
    /// One focal length per camera (`fx = fy`).
    pub square_pixels: bool,
    /// Estimate the eight distortion coefficients of every camera.
    pub fit_distortion: bool,
    /// Replace the explicit scales by perspective division.
    pub eliminate_scales: bool,
    /// Weight of the third residual row `1 - z / s`, in multiples of the
    /// camera's initial focal length.
    pub scale_row_weight: f64,
}

impl Default for BundleOptions {
    fn default() -> Self {
        BundleOptions {
            square_pixels: true,
            fit_distortion: false,
            eliminate_scales: false,
            scale_row_weight: 1.0,
        }
    }
}

/// Starting point for a bundle solve.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialGuess {
    pub cameras: Vec<CameraParams>,
    pub points: Vec<WorldPoint>,
    /// Scales indexed `[camera][particle]`; `None` uses the camera-frame depth
    /// of each initial point, which zeroes the third residual row.
    pub scales: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone)]
struct Layout {
    cameras: usize,
    particles: usize,
    camera_offsets: Vec<usize>,
    point_offsets: Vec<usize>,
    scale_offset: Option<usize>,
    len: usize,
}

/// A plane- or sheet-constrained bundle problem.
#[derive(Debug, Clone)]
pub struct BundleProblem {
    constraint: SurfaceConstraint,
    options: BundleOptions,
    /// `[particle][camera]` pixel positions.
    observations: Vec<Vec<(f64, f64)>>,
    /// Source of every value that is not a free parameter.
    base_cameras: Vec<CameraParams>,
    anchor_x: f64,
    row_weights: Vec<f64>,
    layout: Layout,
    init: DVector<f64>,
}

impl BundleProblem {
    pub fn new(
        observations: Vec<Vec<(f64, f64)>>,
        constraint: SurfaceConstraint,
        init: &InitialGuess,
        options: BundleOptions,
    ) -> Result<Self> {
        let n = observations.len();
        let m = init.cameras.len();
        if m < 2 {
            return Err(Error::UnderDetermined(format!(
                "need at least 2 cameras, got {m}"
            )));
        }
        if n == 0 {
            return Err(Error::UnderDetermined("no particles".into()));
        }
        if let Some(j) = observations.iter().position(|o| o.len() != m) {
            return Err(Error::LengthMismatch(format!(
                "particle {j} has {} observations for {m} cameras",
                observations[j].len()
            )));
        }
        if init.points.len() != n {
            return Err(Error::LengthMismatch(format!(
                "{} initial points for {n} particles",
                init.points.len()
            )));
        }
        if observations
            .iter()
            .flatten()
            .any(|p| !p.0.is_finite() || !p.1.is_finite())
        {
            return Err(Error::Config("observations must be finite".into()));
        }
        for cam in &init.cameras {
            cam.intrinsics.validate()?;
        }
        if !(options.scale_row_weight > 0.0 && options.scale_row_weight.is_finite()) {
            return Err(Error::Config("scale row weight must be positive".into()));
        }
        if let SurfaceConstraint::Sheet { lower, upper } = constraint {
            if !(lower <= upper) {
                return Err(Error::Config("sheet lower bound exceeds upper bound".into()));
            }
        }

        let intr_len = if options.square_pixels { 3 } else { 4 };
        let dist_len = if options.fit_distortion { 8 } else { 0 };
        let point_len = match constraint {
            SurfaceConstraint::Plane => 2,
            SurfaceConstraint::Sheet { .. } => 3,
        };
        let mut offset = 0;
        let mut camera_offsets = Vec::with_capacity(m);
        for i in 0..m {
            camera_offsets.push(offset);
            offset += intr_len + if i == 0 { 0 } else { 6 } + dist_len;
        }
        let mut point_offsets = Vec::with_capacity(n);
        for j in 0..n {
            point_offsets.push(offset);
            offset += if j == 0 { point_len - 1 } else { point_len };
        }
        let scale_offset = (!options.eliminate_scales).then_some(offset);
        if scale_offset.is_some() {
            offset += n * m;
        }
        let layout = Layout {
            cameras: m,
            particles: n,
            camera_offsets,
            point_offsets,
            scale_offset,
            len: offset,
        };

        let mut problem = BundleProblem {
            constraint,
            options,
            observations,
            base_cameras: init.cameras.clone(),
            anchor_x: init.points[0].x,
            row_weights: init
                .cameras
                .iter()
                .map(|c| options.scale_row_weight * 0.5 * (c.intrinsics.fx + c.intrinsics.fy))
                .collect(),
            layout,
            init: DVector::zeros(0),
        };
        problem.init = problem.pack(init)?;
        Ok(problem)
    }

    pub fn num_cameras(&self) -> usize {
        self.layout.cameras
    }

    pub fn num_particles(&self) -> usize {
        self.layout.particles
    }

    pub fn observations(&self) -> &[Vec<(f64, f64)>] {
        &self.observations
    }

    pub fn options(&self) -> BundleOptions {
        self.options
    }

    pub fn constraint(&self) -> SurfaceConstraint {
        self.constraint
    }

    /// Packed initial parameter vector.
    pub fn initial_parameters(&self) -> &DVector<f64> {
        &self.init
    }

    fn rows_per_observation(&self) -> usize {
        if self.options.eliminate_scales {
            2
        } else {
            3
        }
    }

    fn distortion_active(&self) -> bool {
        self.options.fit_distortion || self.base_cameras.iter().any(|c| !c.distortion.is_zero())
    }

    fn sheet_mid_half(&self) -> (f64, f64) {
        match self.constraint {
            SurfaceConstraint::Plane => (0.0, 0.0),
            SurfaceConstraint::Sheet { lower, upper } => (0.5 * (lower + upper), 0.5 * (upper - lower)),
        }
    }

    fn pack(&self, init: &InitialGuess) -> Result<DVector<f64>> {
        let mut x = DVector::zeros(self.layout.len);
        for (i, cam) in init.cameras.iter().enumerate() {
            let mut o = self.layout.camera_offsets[i];
            let k = &cam.intrinsics;
            if self.options.square_pixels {
                x[o] = 0.5 * (k.fx + k.fy);
                o += 1;
            } else {
                x[o] = k.fx;
                x[o + 1] = k.fy;
                o += 2;
            }
            x[o] = k.cx;
            x[o + 1] = k.cy;
            o += 2;
            if i > 0 {
                for a in 0..3 {
                    x[o + a] = cam.pose.euler[a];
                    x[o + 3 + a] = cam.pose.t[a];
                }
                o += 6;
            }
            if self.options.fit_distortion {
                for (a, c) in cam.distortion.to_array().iter().enumerate() {
                    x[o + a] = *c;
                }
            }
        }
        let (mid, half) = self.sheet_mid_half();
        for (j, p) in init.points.iter().enumerate() {
            let mut o = self.layout.point_offsets[j];
            if j > 0 {
                x[o] = p.x;
                o += 1;
            }
            x[o] = p.y;
            if let SurfaceConstraint::Sheet { .. } = self.constraint {
                x[o + 1] = if half > 0.0 {
                    ((p.z - mid) / half).clamp(-1.0, 1.0).asin()
                } else {
                    0.0
                };
            }
        }
        // Depths at the packed (constrained) initial point.
        let (cameras, points, _) = self.unpack_with_scales(&x, false);
        for (j, p) in points.iter().enumerate() {
            for (i, cam) in cameras.iter().enumerate() {
                let z = cam.to_camera_frame(p).z;
                if !(z > MIN_DEPTH) {
                    return Err(Error::BehindCamera(z));
                }
                if let Some(so) = self.layout.scale_offset {
                    let s = match &init.scales {
                        Some(s) => s.get(i).and_then(|row| row.get(j)).copied().ok_or_else(|| {
                            Error::LengthMismatch("initial scales have the wrong shape".into())
                        })?,
                        None => z,
                    };
                    if !(s > 0.0) {
                        return Err(Error::Config(format!("initial scale {s} must be positive")));
                    }
                    x[so + j * self.layout.cameras + i] = s.ln();
                }
            }
        }
        Ok(x)
    }

    /// Cameras, points, and scales indexed `[camera][particle]`. Without
    /// explicit scales the camera-frame depths are reported instead.
    pub fn unpack(&self, x: &DVector<f64>) -> (Vec<CameraParams>, Vec<WorldPoint>, Vec<Vec<f64>>) {
        self.unpack_with_scales(x, true)
    }

    fn unpack_with_scales(
        &self,
        x: &DVector<f64>,
        with_scales: bool,
    ) -> (Vec<CameraParams>, Vec<WorldPoint>, Vec<Vec<f64>>) {
        let m = self.layout.cameras;
        let mut cameras = self.base_cameras.clone();
        for (i, cam) in cameras.iter_mut().enumerate() {
            let mut o = self.layout.camera_offsets[i];
            if self.options.square_pixels {
                cam.intrinsics.fx = x[o];
                cam.intrinsics.fy = x[o];
                o += 1;
            } else {
                cam.intrinsics.fx = x[o];
                cam.intrinsics.fy = x[o + 1];
                o += 2;
            }
            cam.intrinsics.cx = x[o];
            cam.intrinsics.cy = x[o + 1];
            o += 2;
            if i > 0 {
                cam.pose.euler = [x[o], x[o + 1], x[o + 2]];
                cam.pose.t = Vector3::new(x[o + 3], x[o + 4], x[o + 5]);
                o += 6;
            }
            if self.options.fit_distortion {
                let mut c = [0.0; 8];
                c.copy_from_slice(&x.as_slice()[o..o + 8]);
                cam.distortion = Distortion::from_array(c);
            }
        }
        let points: Vec<WorldPoint> = (0..self.layout.particles).map(|j| self.point(x, j)).collect();
        let mut scales = Vec::new();
        if with_scales {
            scales = vec![vec![0.0; self.layout.particles]; m];
            for (j, p) in points.iter().enumerate() {
                for (i, cam) in cameras.iter().enumerate() {
                    scales[i][j] = match self.layout.scale_offset {
                        Some(so) => x[so + j * m + i].exp(),
                        None => cam.to_camera_frame(p).z,
                    };
                }
            }
        }
        (cameras, points, scales)
    }

    fn point_params(&self, x: &DVector<f64>, j: usize) -> (f64, f64, f64) {
        let mut o = self.layout.point_offsets[j];
        let px = if j == 0 {
            self.anchor_x
        } else {
            o += 1;
            x[o - 1]
        };
        let py = x[o];
        let w = match self.constraint {
            SurfaceConstraint::Plane => 0.0,
            SurfaceConstraint::Sheet { .. } => x[o + 1],
        };
        (px, py, w)
    }

    fn point(&self, x: &DVector<f64>, j: usize) -> WorldPoint {
        let (px, py, w) = self.point_params(x, j);
        let z = match self.constraint {
            SurfaceConstraint::Plane => 0.0,
            SurfaceConstraint::Sheet { .. } => {
                let (mid, half) = self.sheet_mid_half();
                mid + half * w.sin()
            }
        };
        Point3::new(px, py, z)
    }

    fn evaluate(&self, x: &DVector<f64>, mut jac: Option<&mut DMatrix<f64>>) -> DVector<f64> {
        let m = self.layout.cameras;
        let k = self.rows_per_observation();
        let (cameras, points, _) = self.unpack_with_scales(x, false);
        let rotations: Vec<Matrix3<f64>> = cameras.iter().map(|c| c.pose.rotation()).collect();
        let rot_derivs: Vec<[Matrix3<f64>; 3]> = cameras
            .iter()
            .map(|c| {
                let [a, b, g] = c.pose.euler;
                rotation_derivatives(a, b, g)
            })
            .collect();
        let active = self.distortion_active();
        let (_, half) = self.sheet_mid_half();
        let mut r = DVector::zeros(self.layout.particles * m * k);

        for (j, obs) in self.observations.iter().enumerate() {
            let p = &points[j];
            for (i, cam) in cameras.iter().enumerate() {
                let row = (j * m + i) * k;
                let xc = rotations[i] * p.coords + cam.pose.t;
                let sigma = self.layout.scale_offset.map(|so| x[so + j * m + i]);
                let mut e = eval_observation(cam, &xc, sigma, obs[i], active);
                if sigma.is_some() {
                    e.weight_third_row(self.row_weights[i]);
                }
                for a in 0..k {
                    r[row + a] = e.r[a];
                }
                let Some(jac) = jac.as_deref_mut() else { continue };

                // Camera block.
                let mut o = self.layout.camera_offsets[i];
                for a in 0..k {
                    if self.options.square_pixels {
                        jac[(row + a, o)] = e.d_intr[a][0] + e.d_intr[a][1];
                    } else {
                        jac[(row + a, o)] = e.d_intr[a][0];
                        jac[(row + a, o + 1)] = e.d_intr[a][1];
                    }
                }
                o += if self.options.square_pixels { 1 } else { 2 };
                for a in 0..k {
                    jac[(row + a, o)] = e.d_intr[a][2];
                    jac[(row + a, o + 1)] = e.d_intr[a][3];
                }
                o += 2;
                if i > 0 {
                    for (q, d_r) in rot_derivs[i].iter().enumerate() {
                        let dx = d_r * p.coords;
                        for a in 0..k {
                            jac[(row + a, o + q)] = dot3(&e.d_xc[a], &dx);
                        }
                    }
                    for q in 0..3 {
                        for a in 0..k {
                            jac[(row + a, o + 3 + q)] = e.d_xc[a][q];
                        }
                    }
                    o += 6;
                }
                if self.options.fit_distortion {
                    for q in 0..8 {
                        for a in 0..k {
                            jac[(row + a, o + q)] = e.d_dist[a][q];
                        }
                    }
                }

                // Particle block.
                let rot = &rotations[i];
                let mut o = self.layout.point_offsets[j];
                let mut dirs: Vec<Vector3<f64>> = Vec::with_capacity(3);
                if j > 0 {
                    dirs.push(rot.column(0).into());
                }
                dirs.push(rot.column(1).into());
                if let SurfaceConstraint::Sheet { .. } = self.constraint {
                    let (_, _, w) = self.point_params(x, j);
                    dirs.push(rot.column(2) * (half * w.cos()));
                }
                for d in &dirs {
                    for a in 0..k {
                        jac[(row + a, o)] = dot3(&e.d_xc[a], d);
                    }
                    o += 1;
                }

                if let Some(so) = self.layout.scale_offset {
                    for a in 0..k {
                        jac[(row + a, so + j * m + i)] = e.d_sigma[a];
                    }
                }
            }
        }
        r
    }

    /// Solves from the packed initial vector.
    pub fn solve(&self, opts: &SolverOptions) -> Result<ReconstructionResult> {
        let (x, report) = levenberg_marquardt(self, self.init.clone(), opts)?;
        let (cameras, points, scales) = self.unpack(&x);
        let rms_px = reprojection_rms(&cameras, &points, &self.observations);
        Ok(ReconstructionResult {
            cameras,
            scales,
            points,
            rms_px,
            report,
        })
    }
}

fn dot3(a: &[f64; 3], b: &Vector3<f64>) -> f64 {
    a[0] * b.x + a[1] * b.y + a[2] * b.z
}

/// Residual rows of one observation and their partial derivatives.
struct ObservationEval {
    r: [f64; 3],
    /// With respect to the camera-frame point.
    d_xc: [[f64; 3]; 3],
    /// With respect to `sigma = ln s`.
    d_sigma: [f64; 3],
    /// With respect to `fx, fy, cx, cy`.
    d_intr: [[f64; 4]; 3],
    d_dist: [[f64; 8]; 3],
}

impl ObservationEval {
    fn weight_third_row(&mut self, w: f64) {
        self.r[2] *= w;
        self.d_sigma[2] *= w;
        self.d_xc[2].iter_mut().for_each(|d| *d *= w);
        self.d_intr[2].iter_mut().for_each(|d| *d *= w);
        self.d_dist[2].iter_mut().for_each(|d| *d *= w);
    }
}

fn eval_observation(
    cam: &CameraParams,
    xc: &Vector3<f64>,
    sigma: Option<f64>,
    p: (f64, f64),
    distortion_active: bool,
) -> ObservationEval {
    let k = &cam.intrinsics;
    let (x, y, z) = (xc.x, xc.y, xc.z);
    let mut e = ObservationEval {
        r: [0.0; 3],
        d_xc: [[0.0; 3]; 3],
        d_sigma: [0.0; 3],
        d_intr: [[0.0; 4]; 3],
        d_dist: [[0.0; 8]; 3],
    };

    if let (Some(sigma), false) = (sigma, distortion_active) {
        // Homogeneous form without any division by depth.
        let inv_s = (-sigma).exp();
        let (um, vm, wm) = (
            (k.fx * x + k.cx * z) * inv_s,
            (k.fy * y + k.cy * z) * inv_s,
            z * inv_s,
        );
        e.r = [p.0 - um, p.1 - vm, 1.0 - wm];
        e.d_xc = [
            [-k.fx * inv_s, 0.0, -k.cx * inv_s],
            [0.0, -k.fy * inv_s, -k.cy * inv_s],
            [0.0, 0.0, -inv_s],
        ];
        e.d_sigma = [um, vm, wm];
        e.d_intr[0] = [-x * inv_s, 0.0, -z * inv_s, 0.0];
        e.d_intr[1] = [0.0, -y * inv_s, 0.0, -z * inv_s];
        return e;
    }

    let q = (x / z, y / z);
    let (m, jd, jk) = if distortion_active {
        match (
            apply_distortion(q, &cam.distortion),
            distortion_jacobian(q, &cam.distortion),
        ) {
            (Ok(m), Ok((jd, jk))) => (m, jd, jk),
            _ => {
                e.r = [f64::NAN; 3];
                return e;
            }
        }
    } else {
        (q, nalgebra::Matrix2::identity(), [[0.0; 8]; 2])
    };
    // d q / d xc
    let dq = [[1.0 / z, 0.0, -x / (z * z)], [0.0, 1.0 / z, -y / (z * z)]];
    let mut dm = [[0.0; 3]; 2];
    for a in 0..2 {
        for c in 0..3 {
            dm[a][c] = jd[(a, 0)] * dq[0][c] + jd[(a, 1)] * dq[1][c];
        }
    }
    let big_u = k.fx * m.0 + k.cx;
    let big_v = k.fy * m.1 + k.cy;

    match sigma {
        Some(sigma) => {
            let inv_s = (-sigma).exp();
            let a = z * inv_s;
            e.r = [p.0 - a * big_u, p.1 - a * big_v, 1.0 - a];
            for c in 0..3 {
                let da = if c == 2 { inv_s } else { 0.0 };
                e.d_xc[0][c] = -(big_u * da + a * k.fx * dm[0][c]);
                e.d_xc[1][c] = -(big_v * da + a * k.fy * dm[1][c]);
                e.d_xc[2][c] = -da;
            }
            e.d_sigma = [a * big_u, a * big_v, a];
            e.d_intr[0] = [-a * m.0, 0.0, -a, 0.0];
            e.d_intr[1] = [0.0, -a * m.1, 0.0, -a];
            for q in 0..8 {
                e.d_dist[0][q] = -a * k.fx * jk[0][q];
                e.d_dist[1][q] = -a * k.fy * jk[1][q];
            }
        }
        None => {
            if !(z > MIN_DEPTH) {
                e.r = [f64::NAN; 3];
                return e;
            }
            e.r = [p.0 - big_u, p.1 - big_v, 0.0];
            for c in 0..3 {
                e.d_xc[0][c] = -k.fx * dm[0][c];
                e.d_xc[1][c] = -k.fy * dm[1][c];
            }
            e.d_intr[0] = [-m.0, 0.0, -1.0, 0.0];
            e.d_intr[1] = [0.0, -m.1, 0.0, -1.0];
            for q in 0..8 {
                e.d_dist[0][q] = -k.fx * jk[0][q];
                e.d_dist[1][q] = -k.fy * jk[1][q];
            }
        }
    }
    e
}

impl NllsProblem for BundleProblem {
    fn num_params(&self) -> usize {
        self.layout.len
    }

    fn num_residuals(&self) -> usize {
        self.layout.particles * self.layout.cameras * self.rows_per_observation()
    }

    fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        self.evaluate(x, None)
    }

    fn jacobian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        let mut jac = DMatrix::zeros(self.num_residuals(), self.num_params());
        self.evaluate(x, Some(&mut jac));
        Some(jac)
    }
}

/// Two-camera plane problem from paired features.
pub fn build_plane_problem(
    pairs: &CorrespondenceSet,
    init: &InitialGuess,
    options: BundleOptions,
) -> Result<BundleProblem> {
    if pairs.len() < MIN_PLANE_PAIRS {
        return Err(Error::UnderDetermined(format!(
            "the plane problem needs at least {MIN_PLANE_PAIRS} corresponding pairs, got {}",
            pairs.len()
        )));
    }
    if init.cameras.len() != 2 {
        return Err(Error::LengthMismatch(format!(
            "paired features need exactly 2 cameras, got {}",
            init.cameras.len()
        )));
    }
    let obs = pairs.pairs.iter().map(|p| vec![p.p1, p.p2]).collect();
    BundleProblem::new(obs, SurfaceConstraint::Plane, init, options)
}

/// Sheet problem for `n` particles each observed by all `m` cameras;
/// `observations[j][i]` is particle `j` in camera `i`.
pub fn build_sheet_problem(
    observations: Vec<Vec<(f64, f64)>>,
    sheet: &SheetModel,
    init: &InitialGuess,
    options: BundleOptions,
) -> Result<BundleProblem> {
    sheet.validate()?;
    if !sheet.is_canonical() {
        return Err(Error::Config(
            "the sheet problem works in the canonical frame; the sheet normal must be +z".into(),
        ));
    }
    let problem = BundleProblem::new(
        observations,
        SurfaceConstraint::Sheet {
            lower: sheet.lower,
            upper: sheet.upper,
        },
        init,
        options,
    )?;
    let (unknowns, equations) = (problem.num_params() + GAUGE_DIMENSION, problem.num_residuals());
    // equations >= unknowns - gauge
    if equations + GAUGE_DIMENSION < unknowns {
        return Err(Error::UnderDetermined(format!(
            "{} cameras and {} particles give {unknowns} unknowns but only {equations} equations",
            problem.num_cameras(),
            problem.num_particles()
        )));
    }
    Ok(problem)
}
