//! Complex polynomial arithmetic and iteration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degree-d polynomial over complex coefficients, stored in ascending
/// degree: coeffs[k] multiplies z^k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

/// Forward orbit z, P(z), ..., truncated at the first point whose modulus
/// exceeds the escape radius.
#[derive(Clone, Debug)]
pub struct Orbit {
    /// Orbit points actually computed, starting with z itself.
    pub points: Vec<Complex64>,
    /// Index of the first point with modulus above the escape radius.
    pub escaped: Option<usize>,
}

impl Orbit {
    /// P^n(z) when the whole orbit stayed inside the escape radius.
    pub fn value(&self) -> Option<Complex64> {
        if self.escaped.is_none() {
            self.points.last().copied()
        } else {
            None
        }
    }
}

impl ComplexPolynomial {
    /// Builds a polynomial from ascending-degree coefficients. Trailing
    /// exact zeros are trimmed; the leading coefficient must carry real
    /// weight relative to the rest.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("empty coefficient list".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidPolynomial(
                "non-finite coefficient".into(),
            ));
        }
        let maxc = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if maxc == 0.0 {
            return Err(Error::InvalidPolynomial("zero polynomial".into()));
        }
        let lead = coeffs.last().unwrap().norm();
        if coeffs.len() > 1 && lead <= 1e-12 * maxc {
            return Err(Error::InvalidPolynomial(format!(
                "leading coefficient {lead:.3e} negligible against scale {maxc:.3e}"
            )));
        }
        Ok(Self { coeffs })
    }

    /// Convenience constructor from (re, im) pairs in ascending degree.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    /// Requires degree >= 2, the standing assumption of the dynamical
    /// operations.
    pub fn require_dynamical(&self) -> Result<()> {
        if self.degree() < 2 {
            return Err(Error::InvalidPolynomial(format!(
                "degree {} < 2",
                self.degree()
            )));
        }
        Ok(())
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    pub fn derivative(&self) -> ComplexPolynomial {
        if self.coeffs.len() == 1 {
            return ComplexPolynomial {
                coeffs: vec![Complex64::new(0.0, 0.0)],
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &a)| a * k as f64)
            .collect();
        ComplexPolynomial { coeffs }
    }

    /// n-fold iteration with escape detection. The orbit always contains
    /// z itself; iteration stops once a point's modulus exceeds
    /// `escape_radius` (that point is included and flagged).
    pub fn iterate(&self, z: Complex64, n: usize, escape_radius: f64) -> Orbit {
        let mut points = Vec::with_capacity(n + 1);
        points.push(z);
        if z.norm() > escape_radius {
            return Orbit {
                points,
                escaped: Some(0),
            };
        }
        let mut cur = z;
        for k in 1..=n {
            cur = self.eval(cur);
            points.push(cur);
            if !cur.re.is_finite() || !cur.im.is_finite() || cur.norm() > escape_radius {
                return Orbit {
                    points,
                    escaped: Some(k),
                };
            }
        }
        Orbit {
            points,
            escaped: None,
        }
    }

    /// Radius beyond which |P(z)| >= 2|z|, so orbits escape monotonically.
    pub fn escape_radius(&self) -> f64 {
        let d = self.degree();
        let lead = self.leading().norm();
        let tail: f64 = self.coeffs[..d].iter().map(|c| c.norm()).sum();
        let r1 = 2.0 * tail / lead;
        let r2 = (4.0 / lead).powf(1.0 / (d.max(2) - 1) as f64);
        1.0_f64.max(r1).max(r2)
    }

    /// Conjugation by the rotation z -> e^{i phi} z:
    /// P_phi(z) = e^{i phi} P(z e^{-i phi}), i.e. a_k -> a_k e^{i(1-k)phi}.
    pub fn rotate_conjugate(&self, phi: f64) -> ComplexPolynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &a)| a * Complex64::from_polar(1.0, (1.0 - k as f64) * phi))
            .collect();
        ComplexPolynomial { coeffs }
    }

    /// Coefficient product, used to compose iterates symbolically.
    pub fn mul(&self, other: &ComplexPolynomial) -> ComplexPolynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial { coeffs: out }
    }

    /// P(Q(z)) as a coefficient list (Horner over polynomials).
    pub fn compose(&self, inner: &ComplexPolynomial) -> ComplexPolynomial {
        let mut acc = ComplexPolynomial {
            coeffs: vec![*self.coeffs.last().unwrap()],
        };
        for &a in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(inner);
            acc.coeffs[0] += a;
        }
        acc
    }

    /// Coefficients of P^n. Errors when the resulting degree would exceed
    /// `max_degree`.
    pub fn iterate_poly(&self, n: usize, max_degree: usize) -> Result<ComplexPolynomial> {
        if self.degree().pow(n as u32) > max_degree {
            return Err(Error::InvalidInput(format!(
                "degree {}^{} exceeds cap {}",
                self.degree(),
                n,
                max_degree
            )));
        }
        let mut acc = ComplexPolynomial {
            coeffs: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        };
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use reorbit_testkit::eval_termwise;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square() -> ComplexPolynomial {
        ComplexPolynomial::from_pairs(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]).unwrap()
    }

    fn basilica() -> ComplexPolynomial {
        ComplexPolynomial::from_pairs(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]).unwrap()
    }

    #[test]
    fn eval_zero_case() {
        assert_eq!(square().eval(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn eval_hand_value() {
        assert_eq!(basilica().eval(c(2.0, 0.0)), c(3.0, 0.0));
    }

    #[test]
    fn eval_matches_termwise_oracle_at_scale() {
        // i z^2 - e^{i pi/sqrt(5)} 1e4 at 1+i, cross-checked against
        // independent term-by-term summation at extended precision.
        let shift = Complex64::from_polar(1e4, std::f64::consts::PI / 5.0_f64.sqrt());
        let p = ComplexPolynomial::new(vec![-shift, c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        let z = c(1.0, 1.0);
        let got = p.eval(z);
        let want = eval_termwise(p.coeffs(), z).to_c64();
        assert!((got - want).norm() <= 1e-13 * want.norm());
    }

    #[test]
    fn derivative_examples() {
        let d = basilica().derivative();
        assert_eq!(d.coeffs(), &[c(0.0, 0.0), c(2.0, 0.0)]);
        let cubic =
            ComplexPolynomial::from_pairs(&[(0.0, 0.0), (0.0, 1.0), (0.0, 0.0), (1.0, 0.0)])
                .unwrap();
        let dc = cubic.derivative();
        assert_eq!(dc.coeffs(), &[c(0.0, 1.0), c(0.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn second_derivative_degree_bookkeeping() {
        for d in 2..6 {
            let mut coeffs = vec![c(0.0, 0.0); d + 1];
            coeffs[d] = c(1.0, 0.0);
            let p = ComplexPolynomial::new(coeffs).unwrap();
            assert_eq!(p.derivative().derivative().degree(), d - 2);
        }
    }

    #[test]
    fn iterate_fixed_point_and_powers() {
        let orb = square().iterate(c(1.0, 0.0), 5, 1e12);
        assert_eq!(orb.value(), Some(c(1.0, 0.0)));
        let orb = square().iterate(c(2.0, 0.0), 3, 1e12);
        assert_eq!(orb.value(), Some(c(256.0, 0.0)));
        assert_eq!(orb.points.len(), 4);
    }

    #[test]
    fn iterate_escape_marker() {
        let orb = square().iterate(c(2.0, 0.0), 3, 10.0);
        assert_eq!(orb.escaped, Some(2));
        assert_eq!(orb.points.len(), 3); // 2, 4, 16
    }

    #[test]
    fn chebyshev_conjugate_stays_on_segment() {
        // -i z^2 - 2i conjugates t -> t^2 - 2 on i[-2, 2].
        let p = ComplexPolynomial::from_pairs(&[(0.0, -2.0), (0.0, 0.0), (0.0, -1.0)]).unwrap();
        let orb = p.iterate(c(0.0, 1.0), 4, 1e12);
        for pt in &orb.points {
            assert!(pt.re.abs() < 1e-12);
            assert!(pt.im.abs() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn rotate_conjugate_examples() {
        let p = square();
        let same = p.rotate_conjugate(0.0);
        assert_eq!(same.coeffs(), p.coeffs());

        // z^2 under phi = pi/2 becomes -i z^2
        let rot = p.rotate_conjugate(std::f64::consts::FRAC_PI_2);
        assert!((rot.coeffs()[2] - c(0.0, -1.0)).norm() < 1e-15);

        // group property
        let p2 = ComplexPolynomial::from_pairs(&[(0.3, -0.2), (0.0, 1.0), (1.0, 0.5)]).unwrap();
        let back = p2.rotate_conjugate(0.77).rotate_conjugate(-0.77);
        for (a, b) in back.coeffs().iter().zip(p2.coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn escape_radius_guarantees_growth() {
        for p in [square(), basilica()] {
            let r = p.escape_radius();
            for k in 0..32 {
                let z = Complex64::from_polar(r * 1.001, k as f64 * 0.196);
                assert!(p.eval(z).norm() >= 2.0 * z.norm() * 0.999);
            }
        }
    }

    #[test]
    fn compose_and_iterate_poly() {
        let p = basilica();
        let p2 = p.iterate_poly(2, 64).unwrap();
        for k in 0..10 {
            let z = c(0.1 * k as f64, 0.05 * k as f64);
            let direct = p.eval(p.eval(z));
            assert!((p2.eval(z) - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
        }
        assert_eq!(p2.degree(), 4);
        assert!(p.iterate_poly(30, 1000).is_err());
    }

    #[test]
    fn rejects_degenerate_leading_coefficient() {
        assert!(ComplexPolynomial::from_pairs(&[(1.0, 0.0), (0.0, 0.0), (1e-15, 0.0)]).is_err());
        assert!(ComplexPolynomial::new(vec![]).is_err());
    }
}
