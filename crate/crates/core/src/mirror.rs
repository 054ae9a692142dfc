//! Divided-difference machinery, numerical sampling of the mirrored
//! variety, pair dynamics, near-infinity asymptotics, and periodic-point
//! mirror scans.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, ExceptionalKind};
use crate::error::{Error, Result};
use crate::poly::ComplexPolynomial;
use crate::recon::{self, break_time, mirror_test, MirrorPair};
use crate::Region;

/// A point of the pair space C^2. Unlike MirrorPair, diagonal points are
/// allowed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPoint {
    pub z: Complex64,
    pub w: Complex64,
}

/// Sampled points of the mirrored variety, truncated at the equations
/// Q_0 .. Q_{max_n}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarietySample {
    pub points: Vec<PairPoint>,
    pub max_n: usize,
    /// Every point satisfies |Q_0| <= residual and |Q_n| <= residual *
    /// max(1, |R_n|) for 1 <= n <= max_n.
    pub residual: f64,
}

/// Switch to the chain-rule derivative product once the arguments are
/// this close (relative).
const DIAGONAL_SWITCH: f64 = 1e-8;

/// Horner deflation of P at u: returns b with
/// (P(v) - P(u)) / (v - u) = sum_{j>=1} b[j] v^{j-1}, which is exact at
/// v = u where it equals P'(u). b[0] is P(u).
fn deflate_at(p: &ComplexPolynomial, u: Complex64) -> Vec<Complex64> {
    let c = p.coeffs();
    let d = p.degree();
    let mut b = vec![Complex64::new(0.0, 0.0); d + 1];
    b[d] = c[d];
    for j in (0..d).rev() {
        b[j] = c[j] + u * b[j + 1];
    }
    b
}

/// Stable one-step divided difference (P(z) - P(w)) / (z - w).
fn r1(p: &ComplexPolynomial, z: Complex64, w: Complex64) -> Complex64 {
    let b = deflate_at(p, w);
    // evaluate sum_{j>=1} b[j] z^{j-1} by Horner
    let mut acc = Complex64::new(0.0, 0.0);
    for &bj in b[1..].iter().rev() {
        acc = acc * z + bj;
    }
    acc
}

/// Divided difference R_n with P^n(z) - P^n(w) = (z - w) R_n(z, w),
/// computed as the orbit product of stable one-step factors. Near the
/// diagonal the factors degenerate to the chain-rule derivative product.
pub fn divided_difference(
    p: &ComplexPolynomial,
    n: usize,
    z: Complex64,
    w: Complex64,
) -> Complex64 {
    let near_diagonal = (z - w).norm() < DIAGONAL_SWITCH * 1.0_f64.max(z.norm()).max(w.norm());
    let dp = p.derivative();
    let mut acc = Complex64::new(1.0, 0.0);
    let mut a = z;
    let mut b = w;
    for _ in 0..n {
        acc *= if near_diagonal {
            dp.eval(a)
        } else {
            r1(p, a, b)
        };
        a = p.eval(a);
        b = p.eval(b);
    }
    acc
}

/// Q_0 = Re(z - w); Q_n = Im(R_n(z, w)) for n >= 1. The common zero set
/// over all n cuts out the mirrored variety.
pub fn q_n(p: &ComplexPolynomial, n: usize, z: Complex64, w: Complex64) -> f64 {
    if n == 0 {
        (z - w).re
    } else {
        divided_difference(p, n, z, w).im
    }
}

/// Minimal-norm Gauss-Newton refinement onto {Q_0 = 0, Q_1 = 0}: two real
/// equations in the four real unknowns (z, w). Returns a refined pair or
/// None when the iteration fails to reach the residual floor.
pub(crate) fn newton_q01(
    p: &ComplexPolynomial,
    z0: Complex64,
    w0: Complex64,
    steps: usize,
) -> Option<PairPoint> {
    let mut z = z0;
    let mut w = w0;
    let f_norm = |z: Complex64, w: Complex64| {
        let q0 = (z - w).re;
        let q1 = r1(p, z, w).im;
        (q0 * q0 + q1 * q1).sqrt()
    };
    let dp = p.derivative();
    let mut cur = f_norm(z, w);
    for _ in 0..steps {
        let scale = 1.0_f64.max(z.norm()).max(w.norm()).max(r1(p, z, w).norm());
        if cur <= 1e-13 * scale {
            return Some(PairPoint { z, w });
        }
        // rows of the 2x4 Jacobian
        let dz = {
            // d/dz R_1(z, w): derivative of the deflated-at-w polynomial
            let b = deflate_at(p, w);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &bj) in b.iter().enumerate().skip(2).rev() {
                let _ = j;
                acc = acc * z + bj * ((j - 1) as f64);
            }
            acc
        };
        let dw = {
            let b = deflate_at(p, z);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &bj) in b.iter().enumerate().skip(2).rev() {
                let _ = j;
                acc = acc * w + bj * ((j - 1) as f64);
            }
            acc
        };
        let _ = &dp;
        let j0 = [1.0, 0.0, -1.0, 0.0];
        let j1 = [dz.im, dz.re, dw.im, dw.re];
        let f = [(z - w).re, r1(p, z, w).im];

        // step = J^T (J J^T)^{-1} f
        let a11: f64 = j0.iter().map(|v| v * v).sum();
        let a12: f64 = j0.iter().zip(&j1).map(|(u, v)| u * v).sum();
        let a22: f64 = j1.iter().map(|v| v * v).sum();
        let det = a11 * a22 - a12 * a12;
        if det.abs() < 1e-300 {
            return None;
        }
        let l0 = (a22 * f[0] - a12 * f[1]) / det;
        let l1 = (-a12 * f[0] + a11 * f[1]) / det;
        let step: Vec<f64> = (0..4).map(|i| j0[i] * l0 + j1[i] * l1).collect();

        // damped update
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..10 {
            let zt = z - Complex64::new(step[0] * lambda, step[1] * lambda);
            let wt = w - Complex64::new(step[2] * lambda, step[3] * lambda);
            let ft = f_norm(zt, wt);
            if ft < cur {
                z = zt;
                w = wt;
                cur = ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    let scale = 1.0_f64.max(z.norm()).max(w.norm()).max(r1(p, z, w).norm());
    if cur <= 1e-13 * scale {
        Some(PairPoint { z, w })
    } else {
        None
    }
}

/// Residual bound enforced on sampled variety points.
pub const VARIETY_RESIDUAL: f64 = 1e-8;

/// Grid-seeds the four-real-dimensional pair space over region x region,
/// Gauss-Newton-refines onto {Q_0 = 0, Q_1 = 0}, and keeps points whose
/// higher mirror equations Q_n (n <= max_n) also vanish. Off-diagonal
/// survivors are re-validated by the real-orbit mirror test.
pub fn sample_variety(
    p: &ComplexPolynomial,
    max_n: usize,
    region: Region,
    grid: usize,
    refine_steps: usize,
) -> Result<VarietySample> {
    p.require_dynamical()?;
    if grid < 2 {
        return Err(Error::InvalidInput("grid must be >= 2".into()));
    }
    let axis: Vec<f64> = (0..grid)
        .map(|i| (i as f64 + 0.5) / grid as f64)
        .collect();
    let coord = |t: f64, lo: f64, hi: f64| lo + t * (hi - lo);

    let n_seeds = grid * grid * grid * grid;
    let refined: Vec<Option<PairPoint>> = (0..n_seeds)
        .into_par_iter()
        .map(|idx| {
            let i = idx % grid;
            let j = (idx / grid) % grid;
            let k = (idx / (grid * grid)) % grid;
            let l = idx / (grid * grid * grid);
            let z = Complex64::new(
                coord(axis[i], region.re_min, region.re_max),
                coord(axis[j], region.im_min, region.im_max),
            );
            let w = Complex64::new(
                coord(axis[k], region.re_min, region.re_max),
                coord(axis[l], region.im_min, region.im_max),
            );
            newton_q01(p, z, w, refine_steps)
        })
        .collect();

    let mut points: Vec<PairPoint> = Vec::new();
    'next: for pair in refined.into_iter().flatten() {
        if !region.contains(pair.z) || !region.contains(pair.w) {
            continue;
        }
        if q_n(p, 0, pair.z, pair.w).abs() > VARIETY_RESIDUAL {
            continue;
        }
        for n in 1..=max_n {
            let rn = divided_difference(p, n, pair.z, pair.w);
            if !rn.im.is_finite() || rn.im.abs() > VARIETY_RESIDUAL * 1.0_f64.max(rn.norm()) {
                continue 'next;
            }
        }
        let sep = (pair.z - pair.w).norm();
        let scale = 1.0_f64.max(pair.z.norm()).max(pair.w.norm());
        if sep > DIAGONAL_SWITCH * scale
            && !mirror_test(p, pair.z, pair.w, max_n, VARIETY_RESIDUAL * 10.0)
        {
            continue;
        }
        points.push(pair);
    }

    points.sort_by(|a, b| {
        (a.z.re, a.z.im, a.w.re, a.w.im)
            .partial_cmp(&(b.z.re, b.z.im, b.w.re, b.w.im))
            .unwrap()
    });
    let merge = 1e-6 * region.size();
    points.dedup_by(|a, b| (a.z - b.z).norm() <= merge && (a.w - b.w).norm() <= merge);

    Ok(VarietySample {
        points,
        max_n,
        residual: VARIETY_RESIDUAL,
    })
}

/// Critical points of P, plus any sampled variety points near the
/// diagonal that are not near a critical point (reported, not asserted).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub critical_points: Vec<Complex64>,
    pub non_critical_diagonal_points: Vec<PairPoint>,
}

pub fn diagonal_intersection(
    p: &ComplexPolynomial,
    variety: &VarietySample,
    tol: f64,
) -> Result<DiagonalReport> {
    let mut critical_points = p.derivative().roots()?;
    critical_points.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let anomalies = variety
        .points
        .iter()
        .filter(|pp| {
            let scale = 1.0_f64.max(pp.z.norm()).max(pp.w.norm());
            if (pp.z - pp.w).norm() > tol * scale {
                return false;
            }
            let mid = (pp.z + pp.w) / 2.0;
            critical_points
                .iter()
                .all(|c| (mid - c).norm() > 10.0 * tol * scale)
        })
        .copied()
        .collect();
    Ok(DiagonalReport {
        critical_points,
        non_critical_diagonal_points: anomalies,
    })
}

/// Component-wise n-fold iteration of the pair dynamics.
pub fn psi_iterate(p: &ComplexPolynomial, pair: PairPoint, n: usize) -> PairPoint {
    let mut z = pair.z;
    let mut w = pair.w;
    for _ in 0..n {
        z = p.eval(z);
        w = p.eval(w);
    }
    PairPoint { z, w }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusCheck {
    pub radius: f64,
    pub pair_count: usize,
    pub max_deviation: f64,
    pub min_deviation: f64,
    pub all_break_at_one: bool,
}

/// Near-infinity mirror asymptotics: every mirror pair found on the level
/// curve satisfies w = conj(z) + O(1), and breaks at time 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub per_radius: Vec<RadiusCheck>,
    /// Fitted uniform bound on |w - conj(z)| across the swept radii.
    pub fitted_bound: f64,
}

/// Checks the near-infinity asymptotics of mirrored pairs over a sweep of
/// level-curve radii. Errors with PrematureRadius when the deviation
/// |w - conj(z)| grows materially between consecutive radii (the sweep
/// has not reached the asymptotic regime).
pub fn asymptotic_mirror_check(
    p: &ComplexPolynomial,
    radii: &[f64],
    grid: usize,
    tol: f64,
) -> Result<AsymptoticReport> {
    let cls = classify(p)?;
    if cls.kind != ExceptionalKind::NonExceptional {
        return Err(Error::InvalidInput(
            "asymptotic mirror check requires a non-exceptional polynomial".into(),
        ));
    }
    if p.leading().im.abs() <= 1e-12 * p.leading().norm() {
        return Err(Error::InvalidInput(
            "asymptotic mirror check requires a non-real leading coefficient".into(),
        ));
    }
    let mut per_radius = Vec::new();
    for &r in radii {
        let pairs = recon::find_mirrors_on_level_curve(p, r, grid, 2, tol)?;
        let mut max_dev = 0.0_f64;
        let mut min_dev = f64::INFINITY;
        let mut all_break = !pairs.is_empty();
        for mp in &pairs {
            let dev = (mp.w - mp.z.conj()).norm();
            max_dev = max_dev.max(dev);
            min_dev = min_dev.min(dev);
            if mp.break_time != Some(1) {
                all_break = false;
            }
        }
        per_radius.push(RadiusCheck {
            radius: r,
            pair_count: pairs.len(),
            max_deviation: max_dev,
            min_deviation: if min_dev.is_finite() { min_dev } else { 0.0 },
            all_break_at_one: all_break,
        });
    }
    for win in per_radius.windows(2) {
        let bound = 3.0 * win[0].max_deviation.max(1.0);
        if win[1].max_deviation > bound {
            return Err(Error::PrematureRadius {
                radius: win[1].radius,
                deviation: win[1].max_deviation,
                bound,
            });
        }
    }
    let fitted_bound = per_radius
        .iter()
        .map(|rc| rc.max_deviation)
        .fold(0.0, f64::max);
    Ok(AsymptoticReport {
        per_radius,
        fitted_bound,
    })
}

/// All periodic points of period <= period_max, via the roots of
/// P^n(z) - z, paired with their minimal period.
pub fn periodic_points(
    p: &ComplexPolynomial,
    period_max: usize,
) -> Result<Vec<(Complex64, usize)>> {
    p.require_dynamical()?;
    let d = p.degree();
    if period_max as f64 * (d as f64).powi(period_max as i32) > 1e6 {
        return Err(Error::InvalidInput(format!(
            "root count cap exceeded: {period_max} * {d}^{period_max} > 1e6"
        )));
    }
    let mut found: Vec<(Complex64, usize)> = Vec::new();
    for n in 1..=period_max {
        let mut iter = p.iterate_poly(n, 1_000_000)?.coeffs().to_vec();
        iter[1] -= Complex64::new(1.0, 0.0);
        let q = ComplexPolynomial::new(iter)?;
        for root in q.roots()? {
            let scale = 1.0_f64.max(root.norm());
            if !found.iter().any(|(z, _)| (z - root).norm() <= 1e-8 * scale) {
                found.push((root, n));
            }
        }
    }
    found.sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap());
    Ok(found)
}

/// Pairs of distinct periodic points whose full orbits have matching real
/// parts at all times. Expected empty for generic polynomials.
pub fn periodic_mirror_scan(
    p: &ComplexPolynomial,
    period_max: usize,
    tol: f64,
) -> Result<Vec<MirrorPair>> {
    let pts = periodic_points(p, period_max)?;
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (z, pz) = pts[i];
            let (w, pw) = pts[j];
            let horizon = pz * pw; // a multiple of the pair's joint period
            if mirror_test(p, z, w, horizon, tol) {
                out.push(MirrorPair {
                    z,
                    w,
                    prefix_len: horizon,
                    break_time: break_time(p, z, w, horizon, tol),
                    tol,
                });
            }
        }
    }
    recon::sort_pairs(&mut out);
    Ok(out)
}

/// Observed local dimensions of a 4D point cloud by principal-component
/// analysis of k-nearest-neighbor patches: the count of singular values
/// within a factor 10 of the largest.
pub fn local_dimension(points: &[PairPoint], k_neighbors: usize) -> Vec<usize> {
    let as4 = |pp: &PairPoint| [pp.z.re, pp.z.im, pp.w.re, pp.w.im];
    points
        .iter()
        .map(|pp| {
            let me = as4(pp);
            let mut dists: Vec<(f64, usize)> = points
                .iter()
                .enumerate()
                .map(|(j, q)| {
                    let v = as4(q);
                    let d2: f64 = (0..4).map(|i| (v[i] - me[i]).powi(2)).sum();
                    (d2, j)
                })
                .collect();
            dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let neigh: Vec<[f64; 4]> = dists
                .iter()
                .take(k_neighbors.min(points.len()))
                .map(|&(_, j)| as4(&points[j]))
                .collect();
            let mut mean = [0.0; 4];
            for v in &neigh {
                for i in 0..4 {
                    mean[i] += v[i];
                }
            }
            for m in &mut mean {
                *m /= neigh.len() as f64;
            }
            let mut cov = [[0.0_f64; 4]; 4];
            for v in &neigh {
                for i in 0..4 {
                    for j in 0..4 {
                        cov[i][j] += (v[i] - mean[i]) * (v[j] - mean[j]);
                    }
                }
            }
            let eig = jacobi_eigenvalues(&mut cov);
            let smax = eig.iter().cloned().fold(0.0, f64::max).sqrt();
            if smax == 0.0 {
                return 0;
            }
            eig.iter().filter(|&&l| l.max(0.0).sqrt() >= smax / 10.0).count()
        })
        .collect()
}

/// Eigenvalues of a symmetric 4x4 matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(a: &mut [[f64; 4]; 4]) -> [f64; 4] {
    for _ in 0..32 {
        let mut off = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-28 {
            break;
        }
        for pi in 0..4 {
            for qi in pi + 1..4 {
                if a[pi][qi].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[qi][qi] - a[pi][pi]) / a[pi][qi];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let akp = a[k][pi];
                    let akq = a[k][qi];
                    a[k][pi] = c * akp - s * akq;
                    a[k][qi] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let apk = a[pi][k];
                    let aqk = a[qi][k];
                    a[pi][k] = c * apk - s * aqk;
                    a[qi][k] = s * apk + c * aqk;
                }
            }
        }
    }
    [a[0][0], a[1][1], a[2][2], a[3][3]]
}
