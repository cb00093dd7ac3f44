//! 2x2 Jones calculus in the (H, V) basis.

use std::ops::{Add, Mul};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

pub type JonesVector = Vector2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesMatrix(pub Matrix2<Complex64>);

impl JonesMatrix {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self(Matrix2::new(a, b, c, d))
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    /// Half-wave-plate reflection `[[cos phi, sin phi], [sin phi, -cos phi]]`.
    ///
    /// Maps `H` onto the linear polarization at angle `phi`.
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::from_real(c, s, s, -c)
    }

    /// `H <-> V` exchange.
    pub fn flip() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0 * factor)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn det(&self) -> Complex64 {
        self.0.determinant()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn apply(&self, v: &JonesVector) -> JonesVector {
        self.0 * v
    }

    /// Largest entry of `|U^dagger U - 1|`.
    pub fn unitarity_error(&self) -> f64 {
        let m = self.0.adjoint() * self.0 - Matrix2::identity();
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> [f64; 2] {
        let sv = self.0.singular_values();
        let (a, b) = (sv[0], sv[1]);
        if a >= b {
            [a, b]
        } else {
            [b, a]
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for JonesMatrix {
    type Output = JonesMatrix;

    fn mul(self, rhs: JonesMatrix) -> JonesMatrix {
        JonesMatrix(self.0 * rhs.0)
    }
}

impl Add for JonesMatrix {
    type Output = JonesMatrix;

    fn add(self, rhs: JonesMatrix) -> JonesMatrix {
        JonesMatrix(self.0 + rhs.0)
    }
}

/// Linear polarizer along angle `theta`: `theta . v`.
pub fn analyze(theta: f64, v: &JonesVector) -> Complex64 {
    let (s, c) = theta.sin_cos();
    v[0] * c + v[1] * s
}

pub fn horizontal() -> JonesVector {
    JonesVector::new(ONE, ZERO)
}
