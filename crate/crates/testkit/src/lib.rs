//! Extended-precision arithmetic for test oracles.
//!
//! Double-double ("dd") numbers store an unevaluated sum of two f64s,
//! giving ~31 significant digits. The polynomial evaluation here is
//! deliberately naive term-by-term summation so it shares no code path
//! with the library it checks.

use num_complex::Complex64;

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn abs(self) -> f64 {
        self.to_f64().abs()
    }
}

/// Complex number with double-double real and imaginary parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub fn from_c64(z: Complex64) -> Self {
        DdComplex {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(self, other: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.add(other.re),
            im: self.im.add(other.im),
        }
    }

    pub fn sub(self, other: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.sub(other.re),
            im: self.im.sub(other.im),
        }
    }

    pub fn mul(self, other: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.mul(other.re).sub(self.im.mul(other.im)),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    pub fn norm(self) -> f64 {
        self.to_c64().norm()
    }
}

/// Term-by-term evaluation of sum a_k z^k at double-double precision.
/// Coefficients in ascending degree.
pub fn eval_termwise(coeffs: &[Complex64], z: Complex64) -> DdComplex {
    let zdd = DdComplex::from_c64(z);
    let mut acc = DdComplex::default();
    let mut power = DdComplex {
        re: Dd::from_f64(1.0),
        im: Dd::from_f64(0.0),
    };
    for &a in coeffs {
        acc = acc.add(DdComplex::from_c64(a).mul(power));
        power = power.mul(zdd);
    }
    acc
}

/// n-fold iteration of the polynomial at double-double precision.
pub fn iterate_dd(coeffs: &[Complex64], z: Complex64, n: usize) -> DdComplex {
    let mut cur = DdComplex::from_c64(z);
    for _ in 0..n {
        // Horner in dd; stability is irrelevant at this precision.
        let mut acc = DdComplex::default();
        for &a in coeffs.iter().rev() {
            acc = acc.mul(cur).add(DdComplex::from_c64(a));
        }
        cur = acc;
    }
    cur
}

/// Direct high-precision divided difference (P^n(z) - P^n(w)) / (z - w).
/// Returns None when z == w exactly.
pub fn divided_difference_direct(
    coeffs: &[Complex64],
    z: Complex64,
    w: Complex64,
    n: usize,
) -> Option<Complex64> {
    if z == w {
        return None;
    }
    let num = iterate_dd(coeffs, z, n).sub(iterate_dd(coeffs, w, n));
    let den = DdComplex::from_c64(z).sub(DdComplex::from_c64(w));
    // dd division via one Newton refinement of the f64 quotient.
    let q0 = num.to_c64() / den.to_c64();
    let q0dd = DdComplex::from_c64(q0);
    let resid = num.sub(q0dd.mul(den));
    let corr = resid.to_c64() / den.to_c64();
    Some(q0 + corr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_mul_is_exactish() {
        let a = Dd::from_f64(1.0 + 1e-16).mul(Dd::from_f64(1.0 - 1e-16));
        // (1+e)(1-e) = 1 - e^2; hi captures 1, lo the -1e-32 tail
        assert_eq!(a.hi, 1.0);
        assert!(a.lo.abs() < 2e-32);
    }

    #[test]
    fn termwise_matches_hand_value() {
        // z^2 - 1 at 2 -> 3
        let coeffs = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let v = eval_termwise(&coeffs, Complex64::new(2.0, 0.0)).to_c64();
        assert_eq!(v, Complex64::new(3.0, 0.0));
    }

    #[test]
    fn divided_difference_of_square() {
        // P = z^2: R_1(z, w) = z + w
        let coeffs = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let z = Complex64::new(1.25, -0.5);
        let w = Complex64::new(-0.75, 2.0);
        let r = divided_difference_direct(&coeffs, z, w, 1).unwrap();
        assert!((r - (z + w)).norm() < 1e-14);
    }
}
