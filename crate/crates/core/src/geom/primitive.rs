//! Exact reference geometry with closed-form distance functions.
//!
//! Infinite hyperplanes (lines in 2D) cannot be meshed; spheres admit exact
//! distances that make them useful both as references and as oracles.

use crate::error::GeomError;

use super::complex::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticPrimitive<const D: usize> {
    /// The boundary of a half-space: a line in 2D, a plane in 3D.
    /// Points satisfy `normal . p == offset`; `normal` has unit length.
    Hyperplane { normal: Point<D>, offset: f64 },
    /// Sphere of radius `radius` around `center`. `solid` selects whether the
    /// set is the closed ball (distance 0 inside) or the spherical shell.
    Sphere { center: Point<D>, radius: f64, solid: bool },
}

impl<const D: usize> AnalyticPrimitive<D> {
    pub fn hyperplane(normal: Point<D>, offset: f64) -> Result<Self, GeomError> {
        let n = normal.norm();
        if n == 0.0 {
            return Err(GeomError::ZeroNormal);
        }
        Ok(Self::Hyperplane { normal: normal / n, offset: offset / n })
    }

    pub fn solid_sphere(center: Point<D>, radius: f64) -> Result<Self, GeomError> {
        if radius <= 0.0 {
            return Err(GeomError::NonPositiveRadius(radius));
        }
        Ok(Self::Sphere { center, radius, solid: true })
    }

    pub fn sphere_surface(center: Point<D>, radius: f64) -> Result<Self, GeomError> {
        if radius <= 0.0 {
            return Err(GeomError::NonPositiveRadius(radius));
        }
        Ok(Self::Sphere { center, radius, solid: false })
    }

    /// Shortest distance from `p` to the set.
    pub fn distance(&self, p: Point<D>) -> f64 {
        match self {
            AnalyticPrimitive::Hyperplane { normal, offset } => (normal.dot(&p) - offset).abs(),
            AnalyticPrimitive::Sphere { center, radius, solid: true } => {
                ((p - center).norm() - radius).max(0.0)
            }
            AnalyticPrimitive::Sphere { center, radius, solid: false } => {
                ((p - center).norm() - radius).abs()
            }
        }
    }

    pub fn translate(&self, v: Point<D>) -> Self {
        match *self {
            AnalyticPrimitive::Hyperplane { normal, offset } => {
                AnalyticPrimitive::Hyperplane { normal, offset: offset + normal.dot(&v) }
            }
            AnalyticPrimitive::Sphere { center, radius, solid } => {
                AnalyticPrimitive::Sphere { center: center + v, radius, solid }
            }
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        match *self {
            AnalyticPrimitive::Hyperplane { normal, offset } => {
                AnalyticPrimitive::Hyperplane { normal, offset: offset * s }
            }
            AnalyticPrimitive::Sphere { center, radius, solid } => {
                AnalyticPrimitive::Sphere { center: center * s, radius: radius * s, solid }
            }
        }
    }
}
