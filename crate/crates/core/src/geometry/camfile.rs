//! Plain-text camera parameter files.
//!
//! One `key = value` pair per line (`:` or whitespace also separate), `#`
//! starts a comment. Keys: `fx fy cx cy alpha beta gamma tx ty tz k1..k6 p1 p2`.
//! Intrinsics are required; pose and distortion default to zero.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::camera::{CameraIntrinsics, CameraParams, CameraPose};
use super::distortion::Distortion;
use crate::error::{Error, Result};

const KEYS: [&str; 18] = [
    "fx", "fy", "cx", "cy", "alpha", "beta", "gamma", "tx", "ty", "tz", "k1", "k2", "k3", "k4", "k5", "k6",
    "p1", "p2",
];

/// Flat record with the same keys as the text format; used for JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraRecord {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
    pub p1: f64,
    pub p2: f64,
}

impl CameraRecord {
    fn values(&self) -> [f64; 18] {
        [
            self.fx, self.fy, self.cx, self.cy, self.alpha, self.beta, self.gamma, self.tx, self.ty, self.tz,
            self.k1, self.k2, self.k3, self.k4, self.k5, self.k6, self.p1, self.p2,
        ]
    }

    fn from_values(v: [f64; 18]) -> Self {
        CameraRecord {
            fx: v[0],
            fy: v[1],
            cx: v[2],
            cy: v[3],
            alpha: v[4],
            beta: v[5],
            gamma: v[6],
            tx: v[7],
            ty: v[8],
            tz: v[9],
            k1: v[10],
            k2: v[11],
            k3: v[12],
            k4: v[13],
            k5: v[14],
            k6: v[15],
            p1: v[16],
            p2: v[17],
        }
    }
}

impl From<&CameraParams> for CameraRecord {
    fn from(c: &CameraParams) -> Self {
        let k = &c.intrinsics;
        let d = c.distortion.to_array();
        let mut v = [0.0; 18];
        v[..4].copy_from_slice(&[k.fx, k.fy, k.cx, k.cy]);
        v[4..7].copy_from_slice(&c.pose.euler);
        v[7..10].copy_from_slice(c.pose.t.as_slice());
        v[10..].copy_from_slice(&d);
        CameraRecord::from_values(v)
    }
}

impl From<&CameraRecord> for CameraParams {
    fn from(r: &CameraRecord) -> Self {
        let v = r.values();
        let mut d = [0.0; 8];
        d.copy_from_slice(&v[10..]);
        CameraParams {
            intrinsics: CameraIntrinsics {
                fx: v[0],
                fy: v[1],
                cx: v[2],
                cy: v[3],
            },
            pose: CameraPose {
                euler: [v[4], v[5], v[6]],
                t: Vector3::new(v[7], v[8], v[9]),
            },
            distortion: Distortion::from_array(d),
        }
    }
}

/// Parses the text format.
pub fn parse_camera(text: &str) -> Result<CameraParams> {
    let mut values: [Option<f64>; 18] = [None; 18];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(['=', ':'])
            .or_else(|| line.split_once(char::is_whitespace))
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        let idx = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::Parse(format!("line {}: unknown key `{key}`", lineno + 1)))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: `{}` is not a number", lineno + 1, value.trim())))?;
        if !value.is_finite() {
            return Err(Error::Parse(format!("line {}: non-finite value", lineno + 1)));
        }
        if values[idx].replace(value).is_some() {
            return Err(Error::Parse(format!(
                "line {}: duplicate key `{key}`",
                lineno + 1
            )));
        }
    }
    for (k, v) in KEYS.iter().zip(&values).take(4) {
        if v.is_none() {
            return Err(Error::Parse(format!("missing required key `{k}`")));
        }
    }
    let record = CameraRecord::from_values(values.map(|v| v.unwrap_or(0.0)));
    let cam = CameraParams::from(&record);
    cam.intrinsics.validate()?;
    Ok(cam)
}

pub fn read_camera_file(path: impl AsRef<Path>) -> Result<CameraParams> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_camera(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn format_camera(cam: &CameraParams) -> String {
    let mut out = String::new();
    for (k, v) in KEYS.iter().zip(CameraRecord::from(cam).values()) {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

pub fn write_camera_file(path: impl AsRef<Path>, cam: &CameraParams) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_camera(cam)).map_err(|e| Error::io(path, e))
}
