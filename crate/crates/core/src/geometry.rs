//! The forward light cone, the tube domain over it, and the two quadratic
//! forms everything else is built from.
//!
//! The cone is `{(y', y_n) : y_n > |y'|}` with the Lorentz quadratic
//! `g(y) = y_n^2 - |y'|^2`; the tube is `R^n + i·cone`. The holomorphic
//! quadratic `Q(z) = z_1^2 + ... + z_{n-1}^2 - z_n^2` satisfies
//! `Q(iy) = g(y)`, which every `TubePoint` re-checks at construction.
//!
//! Dimension 1 is rejected outright: the cone degenerates to a half-line
//! there and the operators live in a different regime.

use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("point outside the open cone: y_n = {height} does not exceed |y'| = {spatial_norm}")]
    OutsideCone { height: f64, spatial_norm: f64 },
    #[error("real and imaginary parts have different dimensions ({re} vs {im})")]
    DimensionMismatch { re: usize, im: usize },
    #[error("Q(iy) = {q} disagrees with g(y) = {g} beyond 8 machine epsilons")]
    SelfTestFailed { q: f64, g: f64 },
}

/// Strict cone membership: `y_n > |y'|` with all coordinates finite.
///
/// Boundary points are excluded because `g` vanishes there and the kernels
/// carry negative powers of it. Slices shorter than 2 are never in a cone.
pub fn in_cone(y: &[f64]) -> bool {
    if y.len() < 2 || y.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let (spatial, height) = y.split_at(y.len() - 1);
    let norm = spatial.iter().map(|v| v * v).sum::<f64>().sqrt();
    height[0] > norm
}

/// A point of the open forward light cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConePoint {
    coords: Vec<f64>,
}

impl ConePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.len() < 2 {
            return Err(GeometryError::DimensionTooSmall(coords.len()));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if !in_cone(&coords) {
            let (spatial, height) = coords.split_at(coords.len() - 1);
            return Err(GeometryError::OutsideCone {
                height: height[0],
                spatial_norm: spatial.iter().map(|v| v * v).sum::<f64>().sqrt(),
            });
        }
        Ok(Self { coords })
    }

    /// The on-axis point `(0', h)`, the standard probe location.
    pub fn on_axis(n: usize, h: f64) -> Result<Self, GeometryError> {
        let mut coords = vec![0.0; n];
        if let Some(last) = coords.last_mut() {
            *last = h;
        }
        Self::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn spatial(&self) -> &[f64] {
        &self.coords[..self.coords.len() - 1]
    }

    pub fn height(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    /// `g(y) = y_n^2 - |y'|^2`, strictly positive on the open cone.
    pub fn g(&self) -> f64 {
        g_of_slice(&self.coords)
    }

    /// Dilation by `t > 0`; the cone is invariant under it.
    pub fn scaled(&self, t: f64) -> Result<Self, GeometryError> {
        Self::new(self.coords.iter().map(|v| v * t).collect())
    }
}

impl<'de> Deserialize<'de> for ConePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            coords: Vec<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        ConePoint::new(raw.coords).map_err(de::Error::custom)
    }
}

pub(crate) fn g_of_slice(y: &[f64]) -> f64 {
    let (spatial, height) = y.split_at(y.len() - 1);
    height[0] * height[0] - spatial.iter().map(|v| v * v).sum::<f64>()
}

/// The Lorentz quadratic `g(y) = y_n^2 - |y'|^2` of a cone point.
pub fn g_form(y: &ConePoint) -> f64 {
    y.g()
}

/// The holomorphic quadratic `Q(z) = z_1^2 + ... + z_{n-1}^2 - z_n^2`,
/// defined on all of `C^n`. For `z = iy` it equals `g(y)`.
pub fn q_form(z: &[Complex64]) -> Complex64 {
    let (body, last) = z.split_at(z.len() - 1);
    body.iter().map(|v| v * v).sum::<Complex64>() - last[0] * last[0]
}

/// A point `z = x + iy` of the tube domain over the cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubePoint {
    re: Vec<f64>,
    im: ConePoint,
}

impl TubePoint {
    pub fn new(re: Vec<f64>, im: ConePoint) -> Result<Self, GeometryError> {
        if re.len() != im.dim() {
            return Err(GeometryError::DimensionMismatch {
                re: re.len(),
                im: im.dim(),
            });
        }
        if re.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let point = Self { re, im };
        point.self_test()?;
        Ok(point)
    }

    /// `z = iy` with zero real part.
    pub fn purely_imaginary(im: ConePoint) -> Self {
        let re = vec![0.0; im.dim()];
        // self-test cannot fail for finite y
        Self { re, im }
    }

    /// The standard probe `i(0', h)`.
    pub fn on_axis(n: usize, h: f64) -> Result<Self, GeometryError> {
        Ok(Self::purely_imaginary(ConePoint::on_axis(n, h)?))
    }

    // Construction self-test: Q(iy) must reproduce g(y). The two sides
    // differ only in summation order, so 8 eps of the point's squared
    // magnitude bounds the gap.
    fn self_test(&self) -> Result<(), GeometryError> {
        let z: Vec<Complex64> = self
            .im
            .coords()
            .iter()
            .map(|&y| Complex64::new(0.0, y))
            .collect();
        let q = q_form(&z);
        let g = self.im.g();
        let magnitude = self.im.coords().iter().map(|v| v * v).sum::<f64>();
        let tol = 8.0 * f64::EPSILON * magnitude.max(f64::MIN_POSITIVE);
        if (q.re - g).abs() > tol || q.im.abs() > tol {
            return Err(GeometryError::SelfTestFailed { q: q.re, g });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }

    pub fn re(&self) -> &[f64] {
        &self.re
    }

    pub fn im(&self) -> &ConePoint {
        &self.im
    }

    pub fn component(&self, j: usize) -> Complex64 {
        Complex64::new(self.re[j], self.im.coords()[j])
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|j| self.component(j)).collect()
    }

    /// Translation by a real vector; leaves the imaginary part untouched.
    pub fn translated(&self, shift: &[f64]) -> Result<Self, GeometryError> {
        if shift.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                re: shift.len(),
                im: self.dim(),
            });
        }
        let re = self
            .re
            .iter()
            .zip(shift)
            .map(|(a, b)| a + b)
            .collect::<Vec<_>>();
        Self::new(re, self.im.clone())
    }

    /// Dilation `z -> t z` for `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self, GeometryError> {
        Self::new(
            self.re.iter().map(|v| v * t).collect(),
            self.im.scaled(t)?,
        )
    }
}

impl<'de> Deserialize<'de> for TubePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            re: Vec<f64>,
            im: ConePoint,
        }
        let raw = Raw::deserialize(deserializer)?;
        TubePoint::new(raw.re, raw.im).map_err(de::Error::custom)
    }
}

/// `Q(z - conj(u))` for tube points `z`, `u`.
///
/// The difference has imaginary part `Im z + Im u`, a cone point, so the
/// value stays off the closed negative real axis.
pub fn q_diff(z: &TubePoint, u: &TubePoint) -> Complex64 {
    debug_assert_eq!(z.dim(), u.dim());
    let n = z.dim();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..n - 1 {
        let v = Complex64::new(z.re()[j] - u.re()[j], z.im().coords()[j] + u.im().coords()[j]);
        sum += v * v;
    }
    let v = Complex64::new(
        z.re()[n - 1] - u.re()[n - 1],
        z.im().coords()[n - 1] + u.im().coords()[n - 1],
    );
    sum - v * v
}

/// `Q(z + i(0', h))`, the apex-shifted form used by the power-law test
/// families. Equal in modulus to `q_diff(z, i(0', h))`.
pub fn q_apex_shift(z: &TubePoint, h: f64) -> Complex64 {
    let n = z.dim();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..n - 1 {
        let v = z.component(j);
        sum += v * v;
    }
    let v = z.component(n - 1) + Complex64::new(0.0, h);
    sum - v * v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cone2(y1: f64, y2: f64) -> ConePoint {
        ConePoint::new(vec![y1, y2]).unwrap()
    }

    #[test]
    fn g_form_examples() {
        assert_eq!(cone2(0.0, 1.0).g(), 1.0);
        assert_eq!(cone2(3.0, 5.0).g(), 16.0);
        assert_eq!(ConePoint::new(vec![1.0, 1.0, 2.0]).unwrap().g(), 2.0);
    }

    #[test]
    fn q_form_examples() {
        let i = Complex64::i();
        let q = q_form(&[Complex64::new(0.0, 0.0), i]);
        assert_eq!(q, Complex64::new(1.0, 0.0));
        let q = q_form(&[Complex64::new(1.0, 0.0), i]);
        assert_eq!(q, Complex64::new(2.0, 0.0));
        let q = q_form(&[i, i, 2.0 * i]);
        assert_eq!(q, Complex64::new(2.0, 0.0));
    }

    #[test]
    fn in_cone_examples() {
        assert!(in_cone(&[0.0, 1.0]));
        assert!(!in_cone(&[1.0, 1.0]));
        assert!(!in_cone(&[2.0, -3.0]));
        assert!(!in_cone(&[1.0]));
        assert!(!in_cone(&[0.0, f64::NAN]));
    }

    #[test]
    fn rejects_degenerate_dimensions_and_boundary() {
        assert!(matches!(
            ConePoint::new(vec![1.0]),
            Err(GeometryError::DimensionTooSmall(1))
        ));
        assert!(matches!(
            ConePoint::new(vec![1.0, 1.0]),
            Err(GeometryError::OutsideCone { .. })
        ));
    }

    #[test]
    fn tube_point_dimension_mismatch() {
        let y = cone2(0.0, 1.0);
        assert!(matches!(
            TubePoint::new(vec![0.0, 0.0, 0.0], y),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn q_diff_on_axis() {
        // z = u = i(0,1): z - conj(u) = i(0,2), Q = 4
        let z = TubePoint::on_axis(2, 1.0).unwrap();
        let q = q_diff(&z, &z);
        assert!((q - Complex64::new(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn q_apex_shift_matches_q_diff_against_apex_probe() {
        // conj(i(0', h)) = -i(0', h), so z - conj(i(0', h)) = z + i(0', h).
        let z = TubePoint::new(vec![0.4, -1.3], cone2(0.2, 0.9)).unwrap();
        let shift = TubePoint::on_axis(2, 1.7).unwrap();
        let a = q_apex_shift(&z, 1.7);
        let b = q_diff(&z, &shift);
        assert!((a - b).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn q_of_iy_matches_g(y1 in -100.0f64..100.0, t in 1e-6f64..100.0) {
            let y2 = y1.abs() + t;
            let y = cone2(y1, y2);
            let z: Vec<Complex64> = y.coords().iter().map(|&v| Complex64::new(0.0, v)).collect();
            let q = q_form(&z);
            let g = y.g();
            let scale = (y1 * y1 + y2 * y2).max(f64::MIN_POSITIVE);
            prop_assert!((q.re - g).abs() <= 8.0 * f64::EPSILON * scale);
            prop_assert!(q.im.abs() <= 8.0 * f64::EPSILON * scale);
        }

        #[test]
        fn g_is_two_homogeneous(y1 in -10.0f64..10.0, t in 1e-3f64..10.0, d in 0.01f64..100.0) {
            let y = cone2(y1, y1.abs() + t);
            let scaled = y.scaled(d).unwrap();
            let lhs = scaled.g();
            let rhs = d * d * y.g();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1e-300));
        }

        #[test]
        fn q_diff_is_translation_covariant(
            x1 in -5.0f64..5.0, x2 in -5.0f64..5.0,
            u1 in -5.0f64..5.0, u2 in -5.0f64..5.0,
            s1 in -5.0f64..5.0, s2 in -5.0f64..5.0,
        ) {
            let z = TubePoint::new(vec![x1, x2], cone2(0.3, 1.2)).unwrap();
            let u = TubePoint::new(vec![u1, u2], cone2(-0.5, 2.0)).unwrap();
            let shift = [s1, s2];
            let a = q_diff(&z, &u);
            let b = q_diff(&z.translated(&shift).unwrap(), &u.translated(&shift).unwrap());
            prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
        }
    }
}
