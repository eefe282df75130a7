//! Axis-aligned observation windows.

use nalgebra::SVector;

use crate::error::GeomError;

use super::complex::Point;

/// Axis-aligned box, `lower < upper` componentwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<const D: usize> {
    lower: Point<D>,
    upper: Point<D>,
}

impl<const D: usize> Window<D> {
    pub fn new(lower: Point<D>, upper: Point<D>) -> Result<Self, GeomError> {
        for axis in 0..D {
            if !(lower[axis] < upper[axis]) {
                return Err(GeomError::InvalidWindow {
                    axis,
                    lower: lower[axis],
                    upper: upper[axis],
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// Cube of the given side length centered at `center`.
    pub fn cube(center: Point<D>, side: f64) -> Result<Self, GeomError> {
        let h = SVector::<f64, D>::repeat(side / 2.0);
        Self::new(center - h, center + h)
    }

    pub fn lower(&self) -> Point<D> {
        self.lower
    }

    pub fn upper(&self) -> Point<D> {
        self.upper
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..D).map(|a| self.side(a)).product()
    }

    /// Closed-box membership.
    pub fn contains_point(&self, p: Point<D>) -> bool {
        (0..D).all(|a| self.lower[a] <= p[a] && p[a] <= self.upper[a])
    }

    pub fn contains_box(&self, lo: Point<D>, hi: Point<D>) -> bool {
        (0..D).all(|a| self.lower[a] <= lo[a] && hi[a] <= self.upper[a])
    }

    pub fn contains_window(&self, other: &Window<D>) -> bool {
        self.contains_box(other.lower, other.upper)
    }

    pub fn dilate(&self, r: f64) -> Result<Self, GeomError> {
        let v = SVector::<f64, D>::repeat(r);
        Self::new(self.lower - v, self.upper + v)
    }

    /// Smallest per-axis slack between this window and an enclosing one.
    /// Negative when `outer` does not contain `self`.
    pub fn margin_within(&self, outer: &Window<D>) -> f64 {
        (0..D)
            .map(|a| (self.lower[a] - outer.lower[a]).min(outer.upper[a] - self.upper[a]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn translate(&self, v: Point<D>) -> Self {
        Self { lower: self.lower + v, upper: self.upper + v }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { lower: self.lower * s, upper: self.upper * s }
    }

    pub fn center(&self) -> Point<D> {
        (self.lower + self.upper) * 0.5
    }
}
