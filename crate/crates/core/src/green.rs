//! Green's function of the basin of infinity, equipotential level curves,
//! and inverse-iteration sampling of the Julia set.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::ComplexPolynomial;

/// Point on an equipotential {G = log R}.
#[derive(Clone, Debug)]
pub struct LevelCurvePoint {
    pub z: Complex64,
    pub green_value: f64,
    /// Ray parameter used to land the point, in [0, 2pi).
    pub angle: f64,
}

const GREEN_ESCAPE: f64 = 1e12;
const GREEN_MAX_ITER: usize = 512;

/// Green's function G(z) = lim d^{-n} log |P^n(z)|, zero on the filled
/// Julia set. Once the orbit passes 1e12 the remaining tail is the
/// geometric series of log|a_d| corrections, accurate to ~1e-12 relative.
pub fn green_value(p: &ComplexPolynomial, z: Complex64) -> f64 {
    let d = p.degree() as f64;
    let lead_log = p.leading().norm().ln();
    let mut cur = z;
    let mut scale = 1.0_f64;
    for _ in 0..GREEN_MAX_ITER {
        let m = cur.norm();
        if !m.is_finite() {
            return f64::INFINITY;
        }
        if m > GREEN_ESCAPE {
            return scale * (m.ln() + lead_log / (d - 1.0));
        }
        cur = p.eval(cur);
        scale /= d;
    }
    0.0
}

/// Anchor point for ray parametrizations: the centroid -a_{d-1}/(d a_d).
pub fn inner_anchor(p: &ComplexPolynomial) -> Complex64 {
    let d = p.degree();
    -p.coeffs()[d - 1] / (d as f64 * p.leading())
}

/// Samples the level curve {G = log R} at `samples` monotone angles by
/// bisection along rays from the anchor. Errors with `RadiusTooSmall`
/// when the curve cannot be certified outside the escape radius.
pub fn level_curve(
    p: &ComplexPolynomial,
    r: f64,
    samples: usize,
) -> Result<Vec<LevelCurvePoint>> {
    p.require_dynamical()?;
    if samples == 0 {
        return Err(Error::InvalidInput("samples = 0".into()));
    }
    let target = r.ln();
    if !(target > 0.0) {
        return Err(Error::RadiusTooSmall {
            radius: r,
            detail: "log R must be positive".into(),
        });
    }
    let anchor = inner_anchor(p);
    let t_esc = p.escape_radius() + anchor.norm();

    let points: Vec<Result<LevelCurvePoint>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
            let dir = Complex64::from_polar(1.0, angle);
            let at = |t: f64| anchor + t * dir;
            let g_esc = green_value(p, at(t_esc));
            if g_esc > target {
                return Err(Error::RadiusTooSmall {
                    radius: r,
                    detail: format!(
                        "curve dips inside the escape radius at angle {angle:.4} (G = {g_esc:.4} > log R = {target:.4})"
                    ),
                });
            }
            let mut lo = t_esc;
            let mut hi = t_esc.max(1.0) * 2.0;
            let mut guard = 0;
            while green_value(p, at(hi)) < target {
                hi *= 2.0;
                guard += 1;
                if guard > 200 {
                    return Err(Error::NonConvergence(
                        "level bracket expansion stalled".into(),
                    ));
                }
            }
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if green_value(p, at(mid)) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let z = at(0.5 * (lo + hi));
            Ok(LevelCurvePoint {
                z,
                green_value: green_value(p, z),
                angle,
            })
        })
        .collect();
    points.into_iter().collect()
}

/// Deterministic start for backward orbits: a fixed off-axis point
/// outside the filled Julia set (hence non-exceptional).
pub fn backward_start(p: &ComplexPolynomial) -> Complex64 {
    inner_anchor(p) + Complex64::from_polar(1.5 * p.escape_radius() + 1.0, 0.731)
}

/// Endpoints of `n` independent random backward orbits of length `depth`.
/// Chain i draws from a dedicated ChaCha stream, so results are stable
/// under any parallel schedule.
pub(crate) fn backward_endpoints(
    p: &ComplexPolynomial,
    n: usize,
    depth: usize,
    seed: u64,
) -> Result<Vec<Complex64>> {
    p.require_dynamical()?;
    let start = backward_start(p);
    let results: Vec<Result<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut z = start;
            for _ in 0..depth {
                let pre = p.roots_of(z)?;
                z = pre[rng.gen_range(0..pre.len())];
            }
            Ok(z)
        })
        .collect();
    results.into_iter().collect()
}

/// Points kept per backward chain after burn-in. Long tails keep the
/// root-solve budget low, and a kept tail is forward-closed except at its
/// head (P of a kept point is its chain predecessor).
const CHAIN_TAIL: usize = 256;

/// Inverse-iteration approximation of the Julia set: random backward
/// orbits from a generic starting point, discarding the first `depth`
/// burn-in steps of each.
pub fn sample_julia(
    p: &ComplexPolynomial,
    n_points: usize,
    depth: usize,
    seed: u64,
) -> Result<Vec<Complex64>> {
    p.require_dynamical()?;
    if depth < 20 {
        return Err(Error::InvalidInput(format!(
            "depth {depth} < 20: burn-in too short"
        )));
    }
    let start = backward_start(p);
    let n_chains = n_points.div_ceil(CHAIN_TAIL);
    let chains: Vec<Result<Vec<Complex64>>> = (0..n_chains)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let tail = CHAIN_TAIL.min(n_points - ci * CHAIN_TAIL);
            let mut kept = Vec::with_capacity(tail);
            let mut z = start;
            for step in 0..depth + tail {
                let pre = p.roots_of(z)?;
                z = pre[rng.gen_range(0..pre.len())];
                if step >= depth {
                    kept.push(z);
                }
            }
            Ok(kept)
        })
        .collect();
    let mut out = Vec::with_capacity(n_points);
    for chain in chains {
        out.extend(chain?);
    }
    Ok(out)
}

/// Whether the sampled Julia set lies inside the vertical line
/// {Re z = a}, at tolerance 1e-6.
pub fn julia_in_line(
    p: &ComplexPolynomial,
    a: f64,
    n_points: usize,
    depth: usize,
    seed: u64,
) -> Result<bool> {
    let samples = sample_julia(p, n_points, depth, seed)?;
    let max_dev = samples
        .iter()
        .map(|z| (z.re - a).abs())
        .fold(0.0, f64::max);
    Ok(max_dev < 1e-6)
}
