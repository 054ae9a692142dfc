//! The real-orbit reconstruction map, mirror detection, break times, the
//! empirical window/breaking constants, and the one-sided inverse of the
//! reconstruction map.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::level_curve;
use crate::mirror;
use crate::poly::ComplexPolynomial;
use crate::Region;

/// Orbits blow past this before f64 arithmetic degrades.
pub(crate) const OVERFLOW_BOUND: f64 = 1e150;

/// Window of real parts (Re z, Re P(z), ..., Re P^N(z)).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealOrbitVector {
    pub window: Vec<f64>,
    /// Provenance only; never consulted by the inverse map.
    pub origin_hint: Option<Complex64>,
}

impl RealOrbitVector {
    pub fn n(&self) -> usize {
        self.window.len() - 1
    }
}

/// Sup metric on windows, the module's only distance.
pub fn rho(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// A pair with matching real-orbit prefix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MirrorPair {
    pub z: Complex64,
    pub w: Complex64,
    /// Depth to which the real-orbit agreement was verified.
    pub prefix_len: usize,
    /// Least n with P^n(z) = P^n(w) within tolerance, when one exists.
    pub break_time: Option<usize>,
    pub tol: f64,
}

/// Real parts of the orbit z, P(z), ..., P^{len-1}(z).
pub(crate) fn real_trace(p: &ComplexPolynomial, z: Complex64, len: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(len);
    let mut cur = z;
    for k in 0..len {
        if !cur.re.is_finite() || !cur.im.is_finite() || cur.norm() > OVERFLOW_BOUND {
            return Err(Error::Escaped { step: k });
        }
        out.push(cur.re);
        cur = p.eval(cur);
    }
    Ok(out)
}

/// The reconstruction map: window[k] = Re(P^k(z)) for k = 0..=N.
pub fn phi(p: &ComplexPolynomial, z: Complex64, n: usize) -> Result<RealOrbitVector> {
    if n < 1 {
        return Err(Error::InvalidInput("window length N must be >= 1".into()));
    }
    Ok(RealOrbitVector {
        window: real_trace(p, z, n + 1)?,
        origin_hint: Some(z),
    })
}

/// The induced shift on windows: phi(P, z) -> phi(P, P(z)). The first N
/// entries of the result equal the last N entries of the input exactly
/// (both come from one orbit computation). Errors with WitnessMismatch
/// when the witness does not reproduce the window, i.e. the shift is
/// being evaluated off the reconstruction image.
pub fn shift(
    p: &ComplexPolynomial,
    x: &RealOrbitVector,
    z_witness: Complex64,
    tol: f64,
) -> Result<RealOrbitVector> {
    let n = x.n();
    let ext = phi(p, z_witness, n + 1)?;
    let dist = rho(&ext.window[..=n], &x.window);
    let scale = x.window.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if dist > tol * scale {
        return Err(Error::WitnessMismatch {
            distance: dist,
            tol: tol * scale,
        });
    }
    Ok(RealOrbitVector {
        window: ext.window[1..].to_vec(),
        origin_hint: Some(p.eval(z_witness)),
    })
}

fn beyond_compare(z: Complex64) -> bool {
    !z.re.is_finite() || !z.im.is_finite() || z.norm() > OVERFLOW_BOUND
}

/// Whether |Re P^k(z) - Re P^k(w)| <= tol * scale_k for all k <= k_max,
/// with scale_k = max(1, |P^k z|, |P^k w|). Once the two orbits coincide
/// within tolerance they agree forever, so the test short-circuits true.
/// If both orbits blow past the overflow bound at the same step the
/// prefix verified so far stands (escaping conjugate pairs stay paired);
/// one-sided blowup fails. Diagonal input is rejected as false.
pub fn mirror_test(
    p: &ComplexPolynomial,
    z: Complex64,
    w: Complex64,
    k_max: usize,
    tol: f64,
) -> bool {
    if z == w {
        return false;
    }
    let mut a = z;
    let mut b = w;
    for _ in 0..=k_max {
        match (beyond_compare(a), beyond_compare(b)) {
            (true, true) => return true,
            (false, false) => {}
            _ => return false,
        }
        let scale = 1.0_f64.max(a.norm()).max(b.norm());
        if (a.re - b.re).abs() > tol * scale {
            return false;
        }
        if (a - b).norm() <= tol * scale {
            return true;
        }
        a = p.eval(a);
        b = p.eval(b);
    }
    true
}

/// Largest k <= k_max with real-orbit agreement at every step up to k.
pub fn agreement_prefix(
    p: &ComplexPolynomial,
    z: Complex64,
    w: Complex64,
    k_max: usize,
    tol: f64,
) -> usize {
    let mut a = z;
    let mut b = w;
    let mut prefix = 0;
    for k in 0..=k_max {
        match (beyond_compare(a), beyond_compare(b)) {
            (true, true) => return k_max,
            (false, false) => {}
            _ => break,
        }
        let scale = 1.0_f64.max(a.norm()).max(b.norm());
        if (a.re - b.re).abs() > tol * scale {
            break;
        }
        prefix = k;
        if (a - b).norm() <= tol * scale {
            return k_max;
        }
        a = p.eval(a);
        b = p.eval(b);
    }
    prefix
}

/// Least n <= max_k with P^n(z) = P^n(w) within tol * scale, if any.
pub fn break_time(
    p: &ComplexPolynomial,
    z: Complex64,
    w: Complex64,
    max_k: usize,
    tol: f64,
) -> Option<usize> {
    let mut a = z;
    let mut b = w;
    for k in 0..=max_k {
        // no break is observable once the orbits outgrow comparison
        if beyond_compare(a) || beyond_compare(b) {
            return None;
        }
        let scale = 1.0_f64.max(a.norm()).max(b.norm());
        if (a - b).norm() <= tol * scale {
            return Some(k);
        }
        a = p.eval(a);
        b = p.eval(b);
    }
    None
}

fn canonical(z: Complex64, w: Complex64) -> (Complex64, Complex64) {
    if (z.re, z.im) <= (w.re, w.im) {
        (z, w)
    } else {
        (w, z)
    }
}

/// Sorts pairs lexicographically so output is schedule-independent.
pub(crate) fn sort_pairs(pairs: &mut [MirrorPair]) {
    pairs.sort_by(|a, b| {
        (a.z.re, a.z.im, a.w.re, a.w.im)
            .partial_cmp(&(b.z.re, b.z.im, b.w.re, b.w.im))
            .unwrap()
    });
}

/// Reorders `cur` so entry j is the unclaimed point nearest prev[j];
/// tracks preimage branches across neighboring curve samples.
fn match_branches(prev: &[Complex64], cur: &[Complex64]) -> Vec<Complex64> {
    let mut used = vec![false; cur.len()];
    let mut out = Vec::with_capacity(cur.len());
    for &p in prev {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, &c) in cur.iter().enumerate() {
            if !used[j] {
                let d = (p - c).norm();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
        }
        used[best] = true;
        out.push(cur[best]);
    }
    out
}

/// Walks the equipotential {G = log R}, follows the d preimage branches
/// of the moving target, and bisects every sign change of
/// Re(z_j) - Re(z_k) down to a mirror pair. Each returned pair consists
/// of two preimages of one target point, so its mirror breaks at time 1.
pub fn find_mirrors_on_level_curve(
    p: &ComplexPolynomial,
    r: f64,
    grid: usize,
    k_prefix: usize,
    tol: f64,
) -> Result<Vec<MirrorPair>> {
    p.require_dynamical()?;
    let curve = level_curve(p, r, grid)?;
    let d = p.degree();
    let step = 2.0 * std::f64::consts::PI / grid as f64;
    let anchor = crate::green::inner_anchor(p);

    let mut pairs: Vec<MirrorPair> = Vec::new();
    let mut prev = p.roots_of(curve[0].z)?;
    for i in 1..=grid {
        let angle_lo = (i - 1) as f64 * step;
        let angle_hi = i as f64 * step;
        let raw = p.roots_of(curve[i % grid].z)?;
        let cur = match_branches(&prev, &raw);
        for a_idx in 0..d {
            for b_idx in a_idx + 1..d {
                let f_lo = prev[a_idx].re - prev[b_idx].re;
                let f_hi = cur[a_idx].re - cur[b_idx].re;
                if f_lo == 0.0 || f_lo * f_hi >= 0.0 {
                    continue;
                }
                // bisect the crossing angle
                let mut lo = angle_lo;
                let mut hi = angle_hi;
                let mut lo_set = prev.clone();
                let mut za = prev[a_idx];
                let mut zb = prev[b_idx];
                let mut f_lo_cur = f_lo;
                for _ in 0..64 {
                    let mid = 0.5 * (lo + hi);
                    let t = level_point_at_angle(p, r, mid, anchor)?;
                    let mid_set = match_branches(&lo_set, &p.roots_of(t)?);
                    za = mid_set[a_idx];
                    zb = mid_set[b_idx];
                    let f_mid = za.re - zb.re;
                    let scale = 1.0_f64.max(za.norm()).max(zb.norm());
                    if f_mid.abs() <= 0.01 * tol * scale {
                        break;
                    }
                    if f_mid * f_lo_cur < 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        lo_set = mid_set;
                        f_lo_cur = f_mid;
                    }
                }
                let scale = 1.0_f64.max(za.norm()).max(zb.norm());
                if (za - zb).norm() <= 10.0 * tol * scale {
                    continue; // branches collided at a critical point
                }
                if !mirror_test(p, za, zb, k_prefix, tol) {
                    continue;
                }
                let img_scale = 1.0_f64.max(p.eval(za).norm());
                let bt = if (p.eval(za) - p.eval(zb)).norm() <= tol * img_scale {
                    Some(1)
                } else {
                    break_time(p, za, zb, k_prefix, tol)
                };
                let (z, w) = canonical(za, zb);
                pairs.push(MirrorPair {
                    z,
                    w,
                    prefix_len: agreement_prefix(p, z, w, k_prefix, tol),
                    break_time: bt,
                    tol,
                });
            }
        }
        prev = cur;
    }

    // dedup crossings found from both sides of a grid node
    sort_pairs(&mut pairs);
    pairs.dedup_by(|a, b| {
        let s = 1.0_f64.max(a.z.norm());
        (a.z - b.z).norm() <= 1e-6 * s && (a.w - b.w).norm() <= 1e-6 * s
    });
    Ok(pairs)
}

/// Level point at one angle (used by the crossing bisection).
fn level_point_at_angle(
    p: &ComplexPolynomial,
    r: f64,
    angle: f64,
    anchor: Complex64,
) -> Result<Complex64> {
    let target = r.ln();
    let t_esc = p.escape_radius() + anchor.norm();
    let dir = Complex64::from_polar(1.0, angle);
    let at = |t: f64| anchor + t * dir;
    if crate::green::green_value(p, at(t_esc)) > target {
        return Err(Error::RadiusTooSmall {
            radius: r,
            detail: format!("curve inside escape radius at angle {angle:.4}"),
        });
    }
    let mut lo = t_esc;
    let mut hi = t_esc.max(1.0) * 2.0;
    let mut guard = 0;
    while crate::green::green_value(p, at(hi)) < target {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::NonConvergence("level bracket stalled".into()));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if crate::green::green_value(p, at(mid)) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(at(0.5 * (lo + hi)))
}

/// Empirical window-length estimate: smallest N-hat in a doubling scan
/// such that every sampled pair agreeing on a prefix of length N-hat also
/// agrees up to 2 N-hat.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NEstimate {
    pub n_hat: usize,
    pub cap: usize,
    pub pool_size: usize,
    pub matched_at_n: usize,
    /// (candidate N, counterexample count) for each rejected candidate.
    pub rejections: Vec<(usize, usize)>,
}

/// Candidate near-mirror pairs from all sources: level curves, pair-space
/// refinement on the first two mirror equations, conjugate guesses, and
/// low-period periodic points.
pub fn gather_mirror_sources(
    p: &ComplexPolynomial,
    pair_samples: usize,
    max_k: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<MirrorPair>> {
    p.require_dynamical()?;
    let mut raw: Vec<(Complex64, Complex64)> = Vec::new();

    let esc = p.escape_radius();
    for r in [1e3 * esc.max(1.0), 1e5 * esc.max(1.0)] {
        let grid = (pair_samples / 2).clamp(64, 512);
        for mp in find_mirrors_on_level_curve(p, r, grid, max_k.min(4), tol)? {
            raw.push((mp.z, mp.w));
        }
    }

    // Random searches are anchored to the Julia set: orbits there neither
    // escape nor get absorbed by attracting cycles, so prefix agreement
    // and break detection stay meaningful.
    let anchors = crate::green::sample_julia(p, pair_samples.max(8), 30, seed)?;
    let jitter = 0.05 * Region::bounding(&anchors, 0.0).size().max(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xA11CE);
    for i in 0..pair_samples {
        let z = anchors[i % anchors.len()];
        // conjugate guess: exact mirrors for real-coefficient P
        raw.push((z, z.conj()));
        // random prefix-matching search: refine (z, w) onto the first two
        // mirror equations from jittered Julia seeds
        let w0 = anchors[rng.gen_range(0..anchors.len())]
            + Complex64::new(
                rng.gen_range(-jitter..jitter),
                rng.gen_range(-jitter..jitter),
            );
        if let Some(pair) = mirror::newton_q01(p, z, w0, 40) {
            raw.push((pair.z, pair.w));
        }
    }

    if p.degree() <= 6 {
        for mp in mirror::periodic_mirror_scan(p, 2, tol)? {
            raw.push((mp.z, mp.w));
        }
    }

    let mut out: Vec<MirrorPair> = Vec::new();
    for (z, w) in raw {
        if z == w || !mirror_test(p, z, w, 1, tol.max(1e-8)) {
            continue;
        }
        let (z, w) = canonical(z, w);
        out.push(MirrorPair {
            z,
            w,
            prefix_len: agreement_prefix(p, z, w, max_k, tol.max(1e-8)),
            break_time: break_time(p, z, w, max_k, tol),
            tol,
        });
    }
    sort_pairs(&mut out);
    out.dedup_by(|a, b| {
        let s = 1.0_f64.max(a.z.norm());
        (a.z - b.z).norm() <= 1e-9 * s && (a.w - b.w).norm() <= 1e-9 * s
    });
    Ok(out)
}

/// Doubling scan for the window length, starting at 1; the cap floor is
/// d^2 + 2d + 2.
pub fn estimate_n(
    p: &ComplexPolynomial,
    pair_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<NEstimate> {
    let d = p.degree();
    let n0 = d * d + 2 * d + 2;
    let cap = (2 * n0).max(64);
    let pool = gather_mirror_sources(p, pair_samples, cap, tol, seed)?;

    let mut rejections = Vec::new();
    let mut n_hat = 1;
    loop {
        let matched: Vec<&MirrorPair> = pool
            .iter()
            .filter(|mp| mirror_test(p, mp.z, mp.w, n_hat, tol))
            .collect();
        let counterexamples = matched
            .iter()
            .filter(|mp| !mirror_test(p, mp.z, mp.w, 2 * n_hat, tol))
            .count();
        if counterexamples == 0 {
            return Ok(NEstimate {
                n_hat,
                cap,
                pool_size: pool.len(),
                matched_at_n: matched.len(),
                rejections,
            });
        }
        rejections.push((n_hat, counterexamples));
        n_hat *= 2;
        if n_hat > cap {
            return Err(Error::Unstable(format!(
                "no window length <= {cap} stabilized over {} pairs",
                pool.len()
            )));
        }
    }
}

/// Break-time survey over mirror sources.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MEstimate {
    /// Max observed break time over all broken pairs (0 when none broke).
    pub m_hat: usize,
    /// Pairs with no break within the scan horizon; expected empty for
    /// generic polynomials.
    pub unbroken: Vec<MirrorPair>,
    pub broken_count: usize,
}

pub fn estimate_m(
    p: &ComplexPolynomial,
    sources: &[MirrorPair],
    max_k: usize,
    tol: f64,
) -> MEstimate {
    let mut m_hat = 0;
    let mut broken_count = 0;
    let mut unbroken = Vec::new();
    for mp in sources {
        match break_time(p, mp.z, mp.w, max_k, tol) {
            Some(bt) => {
                m_hat = m_hat.max(bt);
                broken_count += 1;
            }
            None => unbroken.push(mp.clone()),
        }
    }
    sort_pairs(&mut unbroken);
    MEstimate {
        m_hat,
        unbroken,
        broken_count,
    }
}

/// One-sided inverse of the reconstruction map: finds every z in the
/// search region with phi(P, z, N) = x and returns the common value
/// P^M(z). The first window equation Re z = x_0 is linear, so candidates
/// are the real roots of the second window equation restricted to that
/// vertical line, then filtered by the full window residual and
/// clustered; the clusters must agree at P^M.
pub fn tau(
    p: &ComplexPolynomial,
    x: &RealOrbitVector,
    m_steps: usize,
    region: Region,
    tol: f64,
) -> Result<Complex64> {
    p.require_dynamical()?;
    let n = x.n();
    if m_steps > n {
        return Err(Error::InvalidInput(format!(
            "M = {m_steps} exceeds window length N = {n}"
        )));
    }
    let x0 = x.window[0];
    if x0 < region.re_min - 1e-9 || x0 > region.re_max + 1e-9 {
        return Err(Error::NoPreimage);
    }

    // Taylor-shift P to x0; along the line z = x0 + iy the second window
    // equation reads g(y) = sum_j Re(c_j i^j) y^j - x_1 = 0.
    let d = p.degree();
    let mut c = p.coeffs().to_vec();
    let shift_pt = Complex64::new(x0, 0.0);
    for i in 0..=d {
        for k in (i..d).rev() {
            let carry = c[k + 1] * shift_pt;
            c[k] += carry;
        }
    }
    let i_pow = |j: usize| match j % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let mut g: Vec<f64> = (0..=d).map(|j| (c[j] * i_pow(j)).re).collect();
    g[0] -= x.window[1];

    let coeff_scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max).max(x.window[1].abs());
    let degenerate = g.iter().all(|v| v.abs() <= 1e-12 * coeff_scale.max(1.0));

    let candidates: Vec<f64> = if degenerate {
        // the whole line satisfies the first two equations; sample it
        let k = 512;
        (0..=k)
            .map(|i| region.im_min + (region.im_max - region.im_min) * i as f64 / k as f64)
            .collect()
    } else {
        crate::classify::real_roots_of(&g, 1e-13 * coeff_scale.max(1.0))
            .into_iter()
            .filter(|y| *y >= region.im_min - 1e-9 && *y <= region.im_max + 1e-9)
            .collect()
    };

    // full-window filter
    let scale = x.window.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut solutions: Vec<Complex64> = Vec::new();
    for y in candidates {
        let z = Complex64::new(x0, y);
        if let Ok(trace) = real_trace(p, z, n + 1) {
            if rho(&trace, &x.window) <= tol * scale {
                solutions.push(z);
            }
        }
    }
    if solutions.is_empty() {
        return Err(Error::NoPreimage);
    }

    // cluster along the line
    solutions.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
    let cluster_radius = 1e-6 * region.size();
    let mut clusters: Vec<Complex64> = vec![solutions[0]];
    for z in &solutions[1..] {
        if (z - clusters.last().unwrap()).norm() > cluster_radius {
            clusters.push(*z);
        }
    }

    let values: Vec<Complex64> = clusters
        .iter()
        .map(|&z| {
            let orbit = p.iterate(z, m_steps, OVERFLOW_BOUND);
            *orbit.points.last().unwrap()
        })
        .collect();
    let vscale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut spread = 0.0_f64;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            spread = spread.max((values[i] - values[j]).norm());
        }
    }
    if spread > tol * vscale {
        return Err(Error::AmbiguousImage {
            clusters: clusters.len(),
            spread,
        });
    }
    Ok(values[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square() -> ComplexPolynomial {
        ComplexPolynomial::from_pairs(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]).unwrap()
    }

    fn basilica() -> ComplexPolynomial {
        ComplexPolynomial::from_pairs(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]).unwrap()
    }

    fn chebyshev_conjugate() -> ComplexPolynomial {
        ComplexPolynomial::from_pairs(&[(0.0, -2.0), (0.0, 0.0), (0.0, -1.0)]).unwrap()
    }

    #[test]
    fn phi_of_i_under_square() {
        let x = phi(&square(), c(0.0, 1.0), 2).unwrap();
        assert_eq!(x.window, vec![0.0, -1.0, 1.0]);
    }

    #[test]
    fn phi_on_invariant_line_is_zero_window() {
        let x = phi(&chebyshev_conjugate(), c(0.0, 1.3), 3).unwrap();
        assert_eq!(x.window, vec![0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn shift_drops_first_coordinate_exactly() {
        let p = square();
        let z = c(0.0, 1.0);
        let x = phi(&p, z, 2).unwrap();
        let shifted = shift(&p, &x, z, 1e-10).unwrap();
        assert_eq!(shifted.window, vec![-1.0, 1.0, 1.0]);

        // exactness against the longer window
        let long = phi(&p, c(0.37, -0.81), 5).unwrap();
        let xs = RealOrbitVector {
            window: long.window[..5].to_vec(),
            origin_hint: None,
        };
        let s = shift(&p, &xs, c(0.37, -0.81), 1e-10).unwrap();
        assert_eq!(s.window, long.window[1..6].to_vec());
    }

    #[test]
    fn shift_rejects_bad_witness() {
        let p = square();
        let x = phi(&p, c(0.0, 1.0), 2).unwrap();
        let err = shift(&p, &x, c(0.5, 0.5), 1e-10).unwrap_err();
        assert!(matches!(err, Error::WitnessMismatch { .. }));
    }

    #[test]
    fn shift_fixes_dirac_window() {
        let p = chebyshev_conjugate();
        let z = c(0.0, 0.9);
        let x = phi(&p, z, 4).unwrap();
        let s = shift(&p, &x, z, 1e-10).unwrap();
        assert_eq!(s.window, vec![0.0; 5]);
    }

    #[test]
    fn conjugate_mirrors_under_real_polynomial() {
        let p = basilica();
        // Julia points: the orbit neither escapes nor falls into the real
        // attracting cycle, so the pairing is exact at every step.
        for z in crate::green::sample_julia(&p, 64, 40, 3).unwrap() {
            if z.im.abs() < 1e-3 {
                continue;
            }
            assert!(mirror_test(&p, z, z.conj(), 50, 1e-10));
        }
        // interior points merge into the real cycle: still mirrors
        assert!(mirror_test(&p, c(0.1, 0.2), c(0.1, -0.2), 50, 1e-10));
    }

    #[test]
    fn diagonal_rejected() {
        let z = c(0.3, 0.4);
        assert!(!mirror_test(&square(), z, z, 5, 1e-10));
    }

    #[test]
    fn reflection_is_not_a_mirror_for_iz2() {
        let p = ComplexPolynomial::from_pairs(&[(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)]).unwrap();
        let theta = 0.7;
        let z = Complex64::from_polar(1.0, theta);
        let w = -z.conj();
        assert!(!mirror_test(&p, z, w, 0, 1e-10));
    }

    #[test]
    fn level_curve_mirrors_of_square_are_imaginary() {
        let p = square();
        let pairs = find_mirrors_on_level_curve(&p, 100.0, 64, 4, 1e-9).unwrap();
        assert!(!pairs.is_empty());
        for mp in &pairs {
            // preimages of the negative real axis: +/- i sqrt(R)
            assert!(mp.z.re.abs() < 1e-6 * mp.z.norm().max(1.0));
            assert!((mp.z + mp.w).norm() < 1e-6 * mp.z.norm().max(1.0));
            assert_eq!(mp.break_time, Some(1));
        }
    }

    #[test]
    fn level_curve_pair_count_stable_under_grid_doubling() {
        let p = ComplexPolynomial::from_pairs(&[(1.0, 0.0), (0.0, 0.0), (1.0, 1.0)]).unwrap();
        let a = find_mirrors_on_level_curve(&p, 1000.0, 96, 4, 1e-9).unwrap();
        let b = find_mirrors_on_level_curve(&p, 1000.0, 192, 4, 1e-9).unwrap();
        assert!(a.len() >= p.degree() - 1);
        assert_eq!(a.len(), b.len());
    }

    #[test]
    fn break_times() {
        let p = basilica();
        // conjugate mirrors of Julia points never break (orbit never real)
        let mut checked = 0;
        for z in crate::green::sample_julia(&p, 64, 40, 9).unwrap() {
            if z.im.abs() < 1e-2 {
                continue;
            }
            assert_eq!(break_time(&p, z, z.conj(), 50, 1e-10), None);
            checked += 1;
        }
        assert!(checked > 10);

        // fixed-point mirrors of the perturbed family never break
        let eps = 0.04_f64;
        let e = Complex64::from_polar(1.0, 0.7);
        let pf = ComplexPolynomial::new(vec![e * eps, c(1.0, 0.0), e]).unwrap();
        let zf = c(0.0, eps.sqrt());
        assert_eq!(break_time(&pf, zf, -zf, 50, 1e-10), None);
        assert!(mirror_test(&pf, zf, -zf, 50, 1e-10));
    }

    #[test]
    fn estimate_n_on_square_is_one() {
        let est = estimate_n(&square(), 32, 1e-8, 5).unwrap();
        assert_eq!(est.n_hat, 1);
        assert!(est.pool_size > 0);
    }

    #[test]
    fn estimate_m_accounts_unbroken_conjugates() {
        let p = basilica();
        let sources = gather_mirror_sources(&p, 24, 32, 1e-9, 5).unwrap();
        let est = estimate_m(&p, &sources, 32, 1e-9);
        assert!(!est.unbroken.is_empty()); // conjugate mirrors
        assert!(est.broken_count > 0); // level-curve pairs break at 1
    }

    #[test]
    fn tau_recovers_common_image_of_square() {
        let p = square();
        let x = phi(&p, c(0.0, 1.0), 4).unwrap();
        let v = tau(&p, &x, 1, Region::centered_square(3.0), 1e-8).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn tau_flags_collapsed_line_as_ambiguous() {
        let p = chebyshev_conjugate();
        let x = phi(&p, c(0.0, 1.0), 4).unwrap();
        let err = tau(&p, &x, 1, Region::centered_square(3.0), 1e-8).unwrap_err();
        assert!(matches!(err, Error::AmbiguousImage { .. }));
    }

    /// The certified Cantor-family quadratic: no mirrors at all, so tau
    /// round trips are unambiguous.
    fn cantor_quadratic() -> ComplexPolynomial {
        let shift = Complex64::from_polar(1e4, std::f64::consts::PI / 5.0_f64.sqrt());
        ComplexPolynomial::new(vec![-shift, c(0.0, 0.0), c(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn tau_round_trip_on_cantor_quadratic() {
        let p = cantor_quadratic();
        let samples = crate::green::sample_julia(&p, 40, 30, 77).unwrap();
        let region = Region::bounding(&samples, 5.0);
        for &z in &samples {
            let x = phi(&p, z, 4).unwrap();
            let v = tau(&p, &x, 1, region, 1e-8).unwrap();
            let want = p.eval(z);
            let err = (v - want).norm();
            assert!(err < 1e-6 * want.norm().max(1.0), "round trip off by {err:e}");
        }
    }

    #[test]
    fn tau_determinism() {
        let p = cantor_quadratic();
        let z = crate::green::sample_julia(&p, 1, 30, 5).unwrap()[0];
        let x = phi(&p, z, 4).unwrap();
        let region = Region::centered_square(120.0);
        let a = tau(&p, &x, 1, region, 1e-8).unwrap();
        let b = tau(&p, &x, 1, region, 1e-8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tau_flags_real_polynomial_conjugate_ambiguity() {
        // For a real polynomial the conjugate of any solution is another
        // solution with a different P-image: genuinely non-generic.
        let p = basilica();
        let x = phi(&p, c(0.3, 0.4), 6).unwrap();
        let err = tau(&p, &x, 1, Region::centered_square(2.0), 1e-7).unwrap_err();
        assert!(matches!(err, Error::AmbiguousImage { .. }));
    }
}
