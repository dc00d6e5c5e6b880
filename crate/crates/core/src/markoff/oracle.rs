//! Independent trace computation through an explicit `SL(2, R)`
//! representation, used to check the tree recursion.

use crate::farey::Slope;

use super::SurfacePoint;

/// A real 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse of a unit-determinant matrix.
    pub fn inverse(&self) -> Mat2 {
        Mat2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }
}

/// Generators `A`, `B` with `tr A = x1`, `tr B = x2`, `tr AB = x3`.
#[derive(Clone, Copy, Debug)]
pub struct FrickeRepresentation {
    pub a: Mat2,
    pub b: Mat2,
}

impl FrickeRepresentation {
    /// `A = diag(lambda, 1/lambda)` with `lambda + 1/lambda = x1`; the
    /// diagonal of `B` is fixed by the two trace conditions and the
    /// off-diagonal by `det B = 1`.
    pub fn new(pt: &SurfacePoint) -> FrickeRepresentation {
        let [x1, x2, x3] = pt.traces();
        let lambda = (x1 + (x1 * x1 - 4.0).sqrt()) / 2.0;
        let inv = 1.0 / lambda;
        let a = Mat2 {
            a: lambda,
            b: 0.0,
            c: 0.0,
            d: inv,
        };
        // a11 + a22 = x2, lambda a11 + a22 / lambda = x3
        let b11 = (x3 - x2 * inv) / (lambda - inv);
        let b22 = x2 - b11;
        let b = Mat2 {
            a: b11,
            b: 1.0,
            c: b11 * b22 - 1.0,
            d: b22,
        };
        FrickeRepresentation { a, b }
    }

    /// Trace of the Christoffel word for `s`, with `A^-1` in place of `A`
    /// for negative slopes.
    pub fn trace_of(&self, s: &Slope) -> f64 {
        let a = if s.p() < 0 { self.a.inverse() } else { self.a };
        christoffel_word(s.p().unsigned_abs(), s.q().unsigned_abs())
            .into_iter()
            .fold(Mat2::IDENTITY, |acc, is_b| {
                acc.mul(if is_b { &self.b } else { &a })
            })
            .trace()
    }

    pub fn commutator(&self) -> Mat2 {
        self.a
            .mul(&self.b)
            .mul(&self.a.inverse())
            .mul(&self.b.inverse())
    }
}

/// Lower Christoffel word with `p` letters `A` (false) and `q` letters `B`
/// (true); for coprime `(p, q)` it represents the simple curve of that class.
pub fn christoffel_word(p: u64, q: u64) -> Vec<bool> {
    let n = p + q;
    (1..=n)
        .map(|i| (i as u128 * q as u128) / n as u128 > ((i - 1) as u128 * q as u128) / n as u128)
        .collect()
}

pub fn fricke_oracle(pt: &SurfacePoint, s: &Slope) -> f64 {
    FrickeRepresentation::new(pt).trace_of(s)
}

/// `tr(A B A^-1 B^-1)`, which should equal `kappa - 2 = -2 cosh(l_delta/2)`.
pub fn commutator_trace(pt: &SurfacePoint) -> f64 {
    FrickeRepresentation::new(pt).commutator().trace()
}
