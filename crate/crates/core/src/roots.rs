//! All-roots solver: closed forms for low degree, Aberth-Ehrlich
//! simultaneous iteration otherwise, with a randomized Durand-Kerner
//! restart as the fallback for stuck configurations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::ComplexPolynomial;

const SOLVE_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 200;
const RESIDUAL_REL: f64 = 1e-10;

impl ComplexPolynomial {
    /// All d solutions of P(w) = target, multiplicities as clustered
    /// roots. Every returned root is residual-checked against
    /// `RESIDUAL_REL` times the evaluation scale.
    pub fn roots_of(&self, target: Complex64) -> Result<Vec<Complex64>> {
        if self.degree() < 1 {
            return Err(Error::InvalidInput(
                "roots of a constant polynomial".into(),
            ));
        }
        let mut coeffs = self.coeffs().to_vec();
        coeffs[0] -= target;
        let mut roots = all_roots(&coeffs)?;
        let check_scale = |w: Complex64| -> f64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a.norm() * w.norm().powi(k as i32))
                .sum::<f64>()
                + target.norm()
        };
        for &w in &roots {
            let resid = (self.eval(w) - target).norm();
            if !resid.is_finite() || resid > RESIDUAL_REL * check_scale(w).max(1e-300) {
                return Err(Error::NonConvergence(format!(
                    "residual {resid:.3e} at root ({}, {})",
                    w.re, w.im
                )));
            }
        }
        roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        Ok(roots)
    }

    /// Roots of P itself.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        self.roots_of(Complex64::new(0.0, 0.0))
    }
}

fn all_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    // Strip negligible leading coefficients left by arithmetic.
    let maxc = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut hi = coeffs.len();
    while hi > 1 && coeffs[hi - 1].norm() <= 1e-14 * maxc {
        hi -= 1;
    }
    let mut work = coeffs[..hi].to_vec();
    if work.len() < 2 {
        return Err(Error::InvalidInput("degenerate polynomial".into()));
    }

    // Exact zero roots deflate for free.
    let mut roots = Vec::new();
    while work.len() > 1 && work[0] == Complex64::new(0.0, 0.0) {
        roots.push(Complex64::new(0.0, 0.0));
        work.remove(0);
    }

    let d = work.len() - 1;
    match d {
        0 => {}
        1 => roots.push(-work[0] / work[1]),
        2 => roots.extend(quadratic_roots(work[0], work[1], work[2])),
        _ if is_binomial(&work) => roots.extend(binomial_roots(&work)),
        _ => {
            let found = aberth(&work, 0.41)
                .or_else(|| aberth(&work, 1.13))
                .or_else(|| durand_kerner(&work, 2.71))
                .or_else(|| durand_kerner(&work, 0.097))
                .ok_or_else(|| {
                    Error::NonConvergence(format!("degree-{d} solve stalled after {MAX_SWEEPS} sweeps"))
                })?;
            roots.extend(found);
        }
    }
    Ok(roots)
}

/// Numerically stable quadratic formula (largest-magnitude branch first,
/// second root via the product).
fn quadratic_roots(c0: Complex64, c1: Complex64, c2: Complex64) -> Vec<Complex64> {
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
        -(c1 + disc) / 2.0
    } else {
        -(c1 - disc) / 2.0
    };
    if q.norm() == 0.0 {
        // c1 = 0 and c0 = 0 handled earlier; here both roots vanish.
        return vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    }
    vec![q / c2, c0 / q]
}

fn is_binomial(coeffs: &[Complex64]) -> bool {
    coeffs[1..coeffs.len() - 1]
        .iter()
        .all(|c| *c == Complex64::new(0.0, 0.0))
}

/// d-th roots of -a_0/a_d.
fn binomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let w = -coeffs[0] / coeffs[d];
    let r = w.norm().powf(1.0 / d as f64);
    let base = w.arg() / d as f64;
    (0..d)
        .map(|k| Complex64::from_polar(r, base + 2.0 * std::f64::consts::PI * k as f64 / d as f64))
        .collect()
}

/// Fujiwara upper bound on root moduli.
fn root_bound(coeffs: &[Complex64]) -> f64 {
    let d = coeffs.len() - 1;
    let an = coeffs[d].norm();
    let mut m = 0.0_f64;
    for k in 0..d {
        let t = (coeffs[k].norm() / an).powf(1.0 / (d - k) as f64);
        m = m.max(t);
    }
    2.0 * m.max(1e-8)
}

fn eval_pair(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    // Horner for p and p' in one pass.
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Magnitude of the evaluation, term by term: the natural backward-error
/// scale at z.
fn eval_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let m = z.norm();
    let mut pow = 1.0;
    let mut acc = 0.0;
    for a in coeffs {
        acc += a.norm() * pow;
        pow *= m;
    }
    acc
}

/// Residual at the rounding floor counts as converged; clustered multiple
/// roots never drive the Aberth correction below 1e-12.
fn at_rounding_floor(coeffs: &[Complex64], z: Complex64, p: Complex64) -> bool {
    p.norm() <= 8.0 * f64::EPSILON * eval_scale(coeffs, z)
}

fn initial_guesses(coeffs: &[Complex64], angle_offset: f64) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let r = root_bound(coeffs) * 0.7;
    (0..d)
        .map(|j| {
            Complex64::from_polar(
                r * (0.8 + 0.4 * (j % 3) as f64 / 3.0),
                angle_offset + 2.0 * std::f64::consts::PI * j as f64 / d as f64,
            )
        })
        .collect()
}

fn aberth(coeffs: &[Complex64], angle_offset: f64) -> Option<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let mut z = initial_guesses(coeffs, angle_offset);
    for _ in 0..MAX_SWEEPS {
        let mut worst = 0.0_f64;
        for j in 0..d {
            let (p, dp) = eval_pair(coeffs, z[j]);
            if at_rounding_floor(coeffs, z[j], p) {
                continue;
            }
            let w = if dp.norm() > 0.0 {
                p / dp
            } else {
                Complex64::new(1e-8, 1e-8)
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 0..d {
                if k != j {
                    let diff = z[j] - z[k];
                    if diff.norm() < 1e-300 {
                        continue;
                    }
                    sum += 1.0 / diff;
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * sum;
            let corr = if denom.norm() > 1e-300 { w / denom } else { w };
            if !corr.re.is_finite() || !corr.im.is_finite() {
                return None;
            }
            z[j] -= corr;
            worst = worst.max(corr.norm() / z[j].norm().max(1.0));
        }
        if worst <= SOLVE_TOL {
            polish(coeffs, &mut z);
            return Some(z);
        }
    }
    None
}

fn durand_kerner(coeffs: &[Complex64], angle_offset: f64) -> Option<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let an = coeffs[d];
    let mut z = initial_guesses(coeffs, angle_offset);
    for _ in 0..2 * MAX_SWEEPS {
        let mut worst = 0.0_f64;
        for j in 0..d {
            let (p, _) = eval_pair(coeffs, z[j]);
            if at_rounding_floor(coeffs, z[j], p) {
                continue;
            }
            let mut denom = an;
            for k in 0..d {
                if k != j {
                    denom *= z[j] - z[k];
                }
            }
            if denom.norm() < 1e-300 {
                z[j] += Complex64::new(1e-6, 1e-6);
                worst = 1.0;
                continue;
            }
            let corr = p / denom;
            if !corr.re.is_finite() || !corr.im.is_finite() {
                return None;
            }
            z[j] -= corr;
            worst = worst.max(corr.norm() / z[j].norm().max(1.0));
        }
        if worst <= SOLVE_TOL {
            polish(coeffs, &mut z);
            return Some(z);
        }
    }
    None
}

fn polish(coeffs: &[Complex64], roots: &mut [Complex64]) {
    for z in roots.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = eval_pair(coeffs, *z);
            if dp.norm() > 1e-300 {
                let step = p / dp;
                if step.norm() < 1e-3 * z.norm().max(1.0) {
                    *z -= step;
                }
            }
        }
    }
}
