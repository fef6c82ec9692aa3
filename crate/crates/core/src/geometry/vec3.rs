//! Ambient 3-vectors whose components are jets.

use std::ops::{Add, Neg, Sub};

use nalgebra::{Matrix3, Vector3};

use crate::jets::{JetError, MultiJet, Var};

/// A triple of [`MultiJet`]s: an ambient vector field expanded about a chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3J(pub [MultiJet; 3]);

impl Vec3J {
    pub fn new(x: MultiJet, y: MultiJet, z: MultiJet) -> Self {
        Vec3J([x, y, z])
    }

    pub fn constant(x: &Vector3<f64>, order: usize) -> Self {
        Vec3J([
            MultiJet::constant(x[0], order),
            MultiJet::constant(x[1], order),
            MultiJet::constant(x[2], order),
        ])
    }

    pub fn zero(order: usize) -> Self {
        Vec3J([MultiJet::zero(order); 3])
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|c| c.order()).min().unwrap_or(0)
    }

    pub fn value(&self) -> Vector3<f64> {
        Vector3::new(self.0[0].value(), self.0[1].value(), self.0[2].value())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Vec3J(self.0.map(|c| c.truncate(order)))
    }

    pub fn derivative(&self, which: Var) -> Result<Self, JetError> {
        Ok(Vec3J([
            self.0[0].derivative(which)?,
            self.0[1].derivative(which)?,
            self.0[2].derivative(which)?,
        ]))
    }

    pub fn dot(&self, b: &Vec3J) -> MultiJet {
        self.0[0] * b.0[0] + self.0[1] * b.0[1] + self.0[2] * b.0[2]
    }

    pub fn cross(&self, b: &Vec3J) -> Vec3J {
        let a = &self.0;
        let b = &b.0;
        Vec3J([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    /// `det(self, b, c)`.
    pub fn det(&self, b: &Vec3J, c: &Vec3J) -> MultiJet {
        self.dot(&b.cross(c))
    }

    pub fn scale(&self, s: f64) -> Vec3J {
        Vec3J(self.0.map(|c| c.scale(s)))
    }

    pub fn scale_jet(&self, s: &MultiJet) -> Vec3J {
        Vec3J(self.0.map(|c| c * *s))
    }

    pub fn div_jet(&self, s: &MultiJet) -> Result<Vec3J, JetError> {
        let r = s.recip()?;
        Ok(self.scale_jet(&r))
    }

    pub fn norm_sq(&self) -> MultiJet {
        self.dot(self)
    }

    pub fn norm(&self) -> Result<MultiJet, JetError> {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Result<Vec3J, JetError> {
        self.div_jet(&self.norm()?)
    }

    /// `T·x` for a constant matrix.
    pub fn linear_map(&self, t: &Matrix3<f64>) -> Vec3J {
        let k = self.order();
        let mut out = [MultiJet::zero(k); 3];
        for (r, o) in out.iter_mut().enumerate() {
            for c in 0..3 {
                *o += self.0[c].scale(t[(r, c)]);
            }
        }
        Vec3J(out)
    }

    pub fn add_const(&self, b: &Vector3<f64>) -> Vec3J {
        Vec3J([self.0[0] + b[0], self.0[1] + b[1], self.0[2] + b[2]])
    }
}

impl Add for Vec3J {
    type Output = Vec3J;
    fn add(self, b: Vec3J) -> Vec3J {
        Vec3J([self.0[0] + b.0[0], self.0[1] + b.0[1], self.0[2] + b.0[2]])
    }
}

impl Sub for Vec3J {
    type Output = Vec3J;
    fn sub(self, b: Vec3J) -> Vec3J {
        Vec3J([self.0[0] - b.0[0], self.0[1] - b.0[1], self.0[2] - b.0[2]])
    }
}

impl Neg for Vec3J {
    type Output = Vec3J;
    fn neg(self) -> Vec3J {
        Vec3J(self.0.map(|c| -c))
    }
}
