//! Numerical laboratory for reconstructing complex polynomial dynamics
//! from real-orbit data: exceptional-polynomial classification, entropy
//! of pushed-forward equilibrium measures, mirrored pairs and their
//! breaking times, the reconstruction map and its one-sided inverse, and
//! certified sector dynamics for the Cantor example family.

pub mod cantor;
pub mod classify;
pub mod error;
pub mod green;
pub mod io;
pub mod measure;
pub mod mirror;
pub mod poly;
pub mod recon;
mod roots;

pub use classify::{classify, Classification, ExceptionalKind};
pub use error::{Error, Result};
pub use poly::{ComplexPolynomial, Orbit};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle in the z-plane, used as a search/seeding region.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    /// Square centered at the origin with the given half-width.
    pub fn centered_square(half: f64) -> Self {
        Self::new(-half, half, -half, half)
    }

    /// Square covering the filled Julia set via the escape radius.
    pub fn escape_square(p: &ComplexPolynomial) -> Self {
        Self::centered_square(p.escape_radius())
    }

    /// Padded bounding box of a point cloud.
    pub fn bounding(points: &[Complex64], pad: f64) -> Self {
        let mut r = Self::new(
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for z in points {
            r.re_min = r.re_min.min(z.re);
            r.re_max = r.re_max.max(z.re);
            r.im_min = r.im_min.min(z.im);
            r.im_max = r.im_max.max(z.im);
        }
        Self::new(r.re_min - pad, r.re_max + pad, r.im_min - pad, r.im_max + pad)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn size(&self) -> f64 {
        (self.re_max - self.re_min).max(self.im_max - self.im_min)
    }
}
