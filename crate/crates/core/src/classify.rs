//! Exceptional-polynomial classification.
//!
//! A polynomial is strongly exceptional when it maps some vertical line
//! {Re z = a} into itself. Writing P(a + it) = sum_j c_j(a) (it)^j, that
//! holds iff Re(i^j c_j(a)) = 0 for every j >= 1 and Re(P(a)) = a. Each
//! condition is a real polynomial in a, so the test is a common-real-root
//! computation. The weak variant is a literal coefficient test.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::poly::ComplexPolynomial;

/// Reality checks are relative to coefficient magnitudes; exact reality
/// of floating-point inputs is not decidable. Documented knob.
pub const REALITY_TOL: f64 = 1e-10;
/// Clustering tolerance for common real roots of the line conditions.
pub const ROOT_CLUSTER_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExceptionalKind {
    StronglyExceptional,
    WeaklyExceptional,
    NonExceptional,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub kind: ExceptionalKind,
    /// Abscissas a of invariant vertical lines {Re z = a}; nonempty
    /// exactly for the strongly exceptional case.
    pub invariant_lines: Vec<f64>,
    /// Whether the Julia set lies inside the invariant line. Filled by a
    /// sampling pass (`julia_in_line`), never by `classify` itself.
    pub julia_in_line: Option<bool>,
    /// The weak-exceptionality definition assumes no z^{d-1} term; this
    /// flags inputs where that term is present and the literal test was
    /// applied anyway.
    pub a_dm1_nonzero: bool,
}

fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0_f64;
    for j in 0..k.min(n - k) {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// Coefficients (in a) of g_j(a) = Re(i^j c_j(a)), c_j = P^{(j)}/j!.
fn line_condition_poly(coeffs: &[Complex64], j: usize) -> Vec<f64> {
    let d = coeffs.len() - 1;
    (0..=d - j)
        .map(|t| (i_pow(j as i64) * binomial(j + t, j) * coeffs[j + t]).re)
        .collect()
}

fn poly_eval_real(coeffs: &[f64], a: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * a + c)
}

fn poly_scale_real(coeffs: &[f64], a: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(t, c)| c.abs() * a.abs().powi(t as i32))
        .sum()
}

/// Real roots of a real-coefficient polynomial, via the complex solver.
pub(crate) fn real_roots_of(coeffs: &[f64], zero_tol: f64) -> Vec<f64> {
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].abs() <= zero_tol {
        hi -= 1;
    }
    if hi <= 1 {
        return Vec::new(); // constant (or numerically zero) polynomial
    }
    let p = match ComplexPolynomial::new(
        coeffs[..hi].iter().map(|&c| Complex64::new(c, 0.0)).collect(),
    ) {
        Ok(p) => p,
        Err(_) => return Vec::new(),
    };
    let mut out: Vec<f64> = match p.roots() {
        Ok(roots) => roots
            .into_iter()
            .filter(|r| r.im.abs() <= ROOT_CLUSTER_TOL * (1.0 + r.re.abs()))
            .map(|r| r.re)
            .collect(),
        Err(_) => Vec::new(),
    };
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup_by(|x, y| (*x - *y).abs() <= ROOT_CLUSTER_TOL * (1.0 + y.abs()));
    out
}

/// Classifies P as strongly/weakly/non-exceptional. Requires degree >= 2.
pub fn classify(p: &ComplexPolynomial) -> Result<Classification> {
    p.require_dynamical()?;
    let coeffs = p.coeffs();
    let d = p.degree();
    let maxc = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);

    // Strong test: candidate abscissas from the first non-vanishing
    // condition polynomial, then verification against all of them.
    let conditions: Vec<Vec<f64>> = (1..=d).map(|j| line_condition_poly(coeffs, j)).collect();
    let poly_is_zero = |g: &[f64]| g.iter().all(|c| c.abs() <= REALITY_TOL * maxc);

    let candidates: Vec<f64> = match conditions.iter().find(|g| !poly_is_zero(g)) {
        Some(g) => real_roots_of(g, REALITY_TOL * maxc),
        None => {
            // All Re(i^j c_j) vanish identically: any abscissa fixed by
            // Re(P(a)) = a gives an invariant line.
            let mut h: Vec<f64> = (0..=d).map(|t| coeffs[t].re).collect();
            h[1] -= 1.0;
            real_roots_of(&h, REALITY_TOL * maxc)
        }
    };

    let mut lines = Vec::new();
    'cand: for &a in &candidates {
        for g in &conditions {
            let scale = poly_scale_real(g, a).max(maxc).max(1.0);
            if poly_eval_real(g, a).abs() > ROOT_CLUSTER_TOL * scale {
                continue 'cand;
            }
        }
        // fixed-line condition Re(P(a)) = a
        let g0: Vec<f64> = (0..=d).map(|t| coeffs[t].re).collect();
        let scale = poly_scale_real(&g0, a).max(a.abs()).max(1.0);
        if (poly_eval_real(&g0, a) - a).abs() > ROOT_CLUSTER_TOL * scale {
            continue;
        }
        lines.push(a);
    }

    let a_dm1_nonzero = coeffs[d - 1].norm() > REALITY_TOL * maxc;

    if !lines.is_empty() {
        return Ok(Classification {
            kind: ExceptionalKind::StronglyExceptional,
            invariant_lines: lines,
            julia_in_line: None,
            a_dm1_nonzero,
        });
    }

    // Weak test: a_d i^{d-1} real, some a_k i^{k-1} (k <= d-2) not real.
    let is_real = |z: Complex64| z.im.abs() <= REALITY_TOL * maxc;
    let lead_real = is_real(coeffs[d] * i_pow(d as i64 - 1));
    let low_nonreal = (0..=d - 2).any(|k| !is_real(coeffs[k] * i_pow(k as i64 - 1)));
    let kind = if lead_real && low_nonreal {
        ExceptionalKind::WeaklyExceptional
    } else {
        ExceptionalKind::NonExceptional
    };

    Ok(Classification {
        kind,
        invariant_lines: Vec::new(),
        julia_in_line: None,
        a_dm1_nonzero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pairs: &[(f64, f64)]) -> ComplexPolynomial {
        ComplexPolynomial::from_pairs(pairs).unwrap()
    }

    #[test]
    fn i_z_squared_is_strong_at_zero() {
        let c = classify(&poly(&[(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)])).unwrap();
        assert_eq!(c.kind, ExceptionalKind::StronglyExceptional);
        assert_eq!(c.invariant_lines.len(), 1);
        assert!(c.invariant_lines[0].abs() < 1e-10);
    }

    #[test]
    fn chebyshev_conjugate_is_strong_at_zero() {
        let c = classify(&poly(&[(0.0, -2.0), (0.0, 0.0), (0.0, -1.0)])).unwrap();
        assert_eq!(c.kind, ExceptionalKind::StronglyExceptional);
        assert!(c.invariant_lines[0].abs() < 1e-10);
    }

    #[test]
    fn cubic_with_iz_term_is_weak() {
        let c = classify(&poly(&[(0.0, 0.0), (0.0, 1.0), (0.0, 0.0), (1.0, 0.0)])).unwrap();
        assert_eq!(c.kind, ExceptionalKind::WeaklyExceptional);
        assert!(c.invariant_lines.is_empty());
    }

    #[test]
    fn basilica_is_non_exceptional() {
        let c = classify(&poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)])).unwrap();
        assert_eq!(c.kind, ExceptionalKind::NonExceptional);
    }

    #[test]
    fn complex_leading_quadratic_is_non_exceptional() {
        let c = classify(&poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 1.0)])).unwrap();
        assert_eq!(c.kind, ExceptionalKind::NonExceptional);
    }

    #[test]
    fn rotation_consistency_at_pi() {
        // Strong exceptionality at abscissa 0 survives conjugation by pi
        // (the line Re z = 0 maps to itself).
        let p = poly(&[(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)]);
        for phi in [0.0, std::f64::consts::PI] {
            let c = classify(&p.rotate_conjugate(phi)).unwrap();
            assert_eq!(c.kind, ExceptionalKind::StronglyExceptional);
            assert!(c.invariant_lines[0].abs() < 1e-9);
        }
    }

    #[test]
    fn flags_d_minus_one_term() {
        // z^3 + z^2 + iz: the weak definition assumes no z^{d-1} term.
        let c = classify(&poly(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 0.0)])).unwrap();
        assert!(c.a_dm1_nonzero);
        assert_eq!(c.kind, ExceptionalKind::WeaklyExceptional);
    }

    #[test]
    fn degree_one_rejected() {
        let p = ComplexPolynomial::from_pairs(&[(1.0, 0.0), (2.0, 0.0)]).unwrap();
        assert!(classify(&p).is_err());
    }
}
