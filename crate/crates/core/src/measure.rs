//! Equilibrium-measure sampling, pushforward to real-orbit windows, and
//! entropy estimation via Bowen balls and box partitions.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::backward_endpoints;
use crate::poly::ComplexPolynomial;
use crate::recon::{phi, real_trace, RealOrbitVector};

/// Weighted point cloud approximating the equilibrium measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureSample {
    pub points: Vec<Complex64>,
    /// Nonnegative, sums to 1 (uniform for the built-in sampler).
    pub weights: Vec<f64>,
    pub meta: SamplerMeta,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SamplerMeta {
    pub depth: usize,
    pub seed: u64,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntropyMethod {
    BowenBall,
    Partition,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// Nats.
    pub value: f64,
    pub n_range: (usize, usize),
    pub epsilon: f64,
    pub stderr: f64,
    pub method: EntropyMethod,
}

/// Reference points averaged over in the Bowen-ball estimator.
const REF_COUNT: usize = 64;
/// Below this ball population the estimate is starved.
const BALL_FLOOR: usize = 50;

/// Independent random backward orbits of length `depth`, uniform branch
/// choice at every step; endpoints approximate the equilibrium measure.
pub fn sample_equilibrium(
    p: &ComplexPolynomial,
    n_samples: usize,
    depth: usize,
    seed: u64,
) -> Result<MeasureSample> {
    if depth < 30 {
        return Err(Error::InvalidInput(format!(
            "depth {depth} < 30: equilibrium burn-in too short"
        )));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples = 0".into()));
    }
    let points = backward_endpoints(p, n_samples, depth, seed)?;
    let w = 1.0 / n_samples as f64;
    Ok(MeasureSample {
        weights: vec![w; points.len()],
        points,
        meta: SamplerMeta {
            depth,
            seed,
            count: n_samples,
        },
    })
}

/// Applies the reconstruction map pointwise. Equilibrium samples live on
/// a bounded set, so an escaping orbit is a hard error here.
pub fn pushforward(
    p: &ComplexPolynomial,
    m: &MeasureSample,
    n: usize,
) -> Result<Vec<RealOrbitVector>> {
    let rows: Vec<Result<RealOrbitVector>> = m
        .points
        .par_iter()
        .map(|&z| phi(p, z, n))
        .collect();
    rows.into_iter().collect()
}

/// Max over window coordinates of the coordinate range: the diameter of
/// the pushforward support in the sup metric.
pub fn window_diameter(windows: &[RealOrbitVector]) -> f64 {
    if windows.is_empty() {
        return 0.0;
    }
    let len = windows[0].window.len();
    (0..len)
        .map(|i| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for w in windows {
                lo = lo.min(w.window[i]);
                hi = hi.max(w.window[i]);
            }
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Flat row-major real-orbit traces of length `len` for every point.
fn traces(p: &ComplexPolynomial, points: &[Complex64], len: usize) -> Result<Vec<f64>> {
    let rows: Vec<Result<Vec<f64>>> = points
        .par_iter()
        .map(|&z| real_trace(p, z, len))
        .collect();
    let mut flat = Vec::with_capacity(points.len() * len);
    for r in rows {
        flat.extend(r?);
    }
    Ok(flat)
}

/// Bowen-ball entropy: for reference points x drawn from the sample, the
/// empirical mass of the (n, eps)-ball around the window orbit of x is
/// fitted against n. The sup over neighborhood scales becomes the max of
/// the per-epsilon slopes over the swept grid (starved scales excluded),
/// so the estimate is a lower bound in spirit.
pub fn bowen_entropy(
    p: &ComplexPolynomial,
    m: &MeasureSample,
    n_window: usize,
    n_range: (usize, usize),
    eps_list: &[f64],
) -> Result<EntropyEstimate> {
    let (n_lo, n_hi) = n_range;
    if n_lo < 1 || n_hi <= n_lo {
        return Err(Error::InvalidInput(format!(
            "bad n_range ({n_lo}, {n_hi})"
        )));
    }
    if eps_list.is_empty() {
        return Err(Error::InvalidInput("empty epsilon sweep".into()));
    }
    let total = m.points.len();
    if total < 2 * BALL_FLOOR {
        return Err(Error::InsufficientSamples {
            have: total,
            need: 2 * BALL_FLOOR,
            context: "bowen_entropy sample count".into(),
        });
    }
    let len = n_hi + n_window;
    let tr = traces(p, &m.points, len)?;
    let refs: Vec<usize> = (0..REF_COUNT).map(|i| i * total / REF_COUNT).collect();

    struct EpsStat {
        eps: f64,
        slope: f64,
        stderr: f64,
    }

    let mut stats: Vec<EpsStat> = Vec::new();
    for &eps in eps_list {
        // per-reference slopes from exact integer ball counts; each fit
        // stops at the depth where its ball drops below the floor
        let slopes: Vec<Option<f64>> = refs
            .par_iter()
            .map(|&ri| {
                let rref = &tr[ri * len..(ri + 1) * len];
                let mut counts = vec![0usize; n_hi + 1];
                for wi in 0..total {
                    if wi == ri {
                        continue;
                    }
                    let row = &tr[wi * len..(wi + 1) * len];
                    let mut horizon = 0;
                    while horizon < len && (row[horizon] - rref[horizon]).abs() < eps {
                        horizon += 1;
                    }
                    // ball at depth n needs n + n_window shadowed entries
                    if horizon >= n_window {
                        let reach = (horizon - n_window).min(n_hi);
                        for n in n_lo..=reach {
                            counts[n] += 1;
                        }
                    }
                }
                let mut fit_hi = n_lo;
                while fit_hi < n_hi && counts[fit_hi + 1] >= BALL_FLOOR {
                    fit_hi += 1;
                }
                if fit_hi < n_lo + 2 || counts[n_lo] < BALL_FLOOR {
                    return None;
                }
                let pts: Vec<(f64, f64)> = (n_lo..=fit_hi)
                    .map(|n| {
                        (
                            n as f64,
                            -((counts[n] as f64) / ((total - 1) as f64)).ln(),
                        )
                    })
                    .collect();
                Some(ls_slope(&pts))
            })
            .collect();

        let ok: Vec<f64> = slopes.iter().flatten().copied().collect();
        if ok.len() * 4 < refs.len() || ok.len() < 4 {
            continue; // starved epsilon
        }
        let mean = ok.iter().sum::<f64>() / ok.len() as f64;
        let var = ok.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / ok.len() as f64;
        stats.push(EpsStat {
            eps,
            slope: mean,
            stderr: (var / ok.len() as f64).sqrt(),
        });
    }

    if stats.is_empty() {
        return Err(Error::InsufficientSamples {
            have: total,
            need: BALL_FLOOR,
            context: "every epsilon in the sweep starved its balls".into(),
        });
    }

    let chosen = if stats.len() == 1 {
        &stats[0]
    } else {
        // plateau: adjacent pair with the closest slopes, smaller member
        let mut best = 0;
        let mut best_gap = f64::INFINITY;
        for i in 0..stats.len() - 1 {
            let gap = (stats[i].slope - stats[i + 1].slope).abs();
            if gap < best_gap {
                best_gap = gap;
                best = i;
            }
        }
        if stats[best].slope <= stats[best + 1].slope {
            &stats[best]
        } else {
            &stats[best + 1]
        }
    };

    Ok(EntropyEstimate {
        value: chosen.slope.max(0.0),
        n_range,
        epsilon: chosen.eps,
        stderr: chosen.stderr,
        method: EntropyMethod::BowenBall,
    })
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Empirical cell-mass entropies H_1..H_n of the box-partition coding:
/// each sample's window itinerary is interned progressively; cells are
/// boxes of the given side centered on the lattice.
pub fn partition_curve(
    p: &ComplexPolynomial,
    m: &MeasureSample,
    n_window: usize,
    box_size: f64,
    n_max: usize,
) -> Result<(Vec<f64>, Vec<usize>)> {
    if box_size <= 0.0 {
        return Err(Error::InvalidInput("box_size must be positive".into()));
    }
    if n_max < 1 {
        return Err(Error::InvalidInput("n_max must be >= 1".into()));
    }
    let total = m.points.len();
    let len = n_max + n_window;
    let tr = traces(p, &m.points, len)?;

    // box id per (sample, time): round-to-nearest lattice of side box_size
    let mut box_ids: HashMap<Vec<i64>, u32> = HashMap::new();
    let mut cell_of = vec![0u32; total * n_max];
    for wi in 0..total {
        let row = &tr[wi * len..(wi + 1) * len];
        for t in 0..n_max {
            let key: Vec<i64> = (0..=n_window)
                .map(|j| (row[t + j] / box_size).round() as i64)
                .collect();
            let next = box_ids.len() as u32;
            let id = *box_ids.entry(key).or_insert(next);
            cell_of[wi * n_max + t] = id;
        }
    }

    // progressive itinerary classes
    let mut class = vec![0u32; total];
    let mut h = Vec::with_capacity(n_max);
    let mut class_counts = Vec::with_capacity(n_max);
    for t in 0..n_max {
        let mut intern: HashMap<(u32, u32), u32> = HashMap::new();
        for wi in 0..total {
            let key = (class[wi], cell_of[wi * n_max + t]);
            let next = intern.len() as u32;
            class[wi] = *intern.entry(key).or_insert(next);
        }
        let mut mass: HashMap<u32, usize> = HashMap::new();
        for &c in &class {
            *mass.entry(c).or_insert(0) += 1;
        }
        let mut ent = 0.0;
        for &cnt in mass.values() {
            let q = cnt as f64 / total as f64;
            ent -= q * q.ln();
        }
        h.push(ent);
        class_counts.push(mass.len());
    }
    Ok((h, class_counts))
}

/// Partition entropy: the slope of H_n over n on the linear regime (cells
/// still populated on average by at least BALL_FLOOR samples).
pub fn partition_entropy(
    p: &ComplexPolynomial,
    m: &MeasureSample,
    n_window: usize,
    box_size: f64,
    n_max: usize,
) -> Result<EntropyEstimate> {
    let (h, classes) = partition_curve(p, m, n_window, box_size, n_max)?;
    let total = m.points.len();

    if *h.last().unwrap() == 0.0 {
        // a single occupied cell at every depth
        return Ok(EntropyEstimate {
            value: 0.0,
            n_range: (1, n_max),
            epsilon: box_size,
            stderr: 0.0,
            method: EntropyMethod::Partition,
        });
    }

    let mut t_end = 0;
    for (t, &c) in classes.iter().enumerate() {
        if c * BALL_FLOOR <= total {
            t_end = t + 1; // depth index is 1-based
        }
    }
    if t_end < 2 {
        return Err(Error::InsufficientSamples {
            have: total,
            need: BALL_FLOOR * classes[0],
            context: "partition cells starved before a linear regime formed".into(),
        });
    }
    let pts: Vec<(f64, f64)> = (1..=t_end).map(|t| (t as f64, h[t - 1])).collect();
    let slope = ls_slope(&pts);
    // residual-based slope standard error
    let nf = pts.len() as f64;
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (ybar + slope * (p.0 - xbar))).powi(2))
        .sum();
    let stderr = if pts.len() > 2 && sxx > 0.0 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };

    Ok(EntropyEstimate {
        value: slope.max(0.0),
        n_range: (1, t_end),
        epsilon: box_size,
        stderr,
        method: EntropyMethod::Partition,
    })
}

/// Two-sample Kolmogorov-Smirnov distance with values quantized at the
/// given resolution (so numerically degenerate clouds compare equal).
pub fn ks_distance(a: &[f64], b: &[f64], resolution: f64) -> f64 {
    let snap = |x: f64| {
        if resolution > 0.0 {
            (x / resolution).round() * resolution
        } else {
            x
        }
    };
    let mut xa: Vec<f64> = a.iter().map(|&x| snap(x)).collect();
    let mut xb: Vec<f64> = b.iter().map(|&x| snap(x)).collect();
    xa.sort_by(|u, v| u.total_cmp(v));
    xb.sort_by(|u, v| u.total_cmp(v));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let t = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= t {
            i += 1;
        }
        while j < xb.len() && xb[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Discrepancy between the pushforward of the sample and the pushforward
/// of its P-image: the max over window coordinates of the KS distance.
/// Small values support invariance of the pushed-forward measure.
pub fn invariance_check(p: &ComplexPolynomial, m: &MeasureSample, n_window: usize) -> Result<f64> {
    let base = pushforward(p, m, n_window)?;
    let mapped = MeasureSample {
        points: m.points.iter().map(|&z| p.eval(z)).collect(),
        weights: m.weights.clone(),
        meta: m.meta,
    };
    let fwd = pushforward(p, &mapped, n_window)?;

    let scale = window_diameter(&base).max(window_diameter(&fwd)).max(1.0);
    let resolution = 1e-12 * scale;
    let mut worst = 0.0_f64;
    for i in 0..=n_window {
        let a: Vec<f64> = base.iter().map(|w| w.window[i]).collect();
        let b: Vec<f64> = fwd.iter().map(|w| w.window[i]).collect();
        worst = worst.max(ks_distance(&a, &b, resolution));
    }
    Ok(worst)
}

/// Weighted empirical mass of the band {|Re z - a| < tol}.
pub fn line_mass(m: &MeasureSample, a: f64, tol: f64) -> f64 {
    m.points
        .iter()
        .zip(&m.weights)
        .filter(|(z, _)| (z.re - a).abs() < tol)
        .map(|(_, w)| w)
        .sum()
}

/// Shadow-ball division report: masses of the nested sets obtained by
/// shadowing the reference orbit from time l to n (equal in measure to
/// the paper-style balls by invariance, and exactly nested empirically).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BPrimeReport {
    /// masses[l], l = 0..=n; nondecreasing in l by construction.
    pub masses: Vec<f64>,
    pub counts: Vec<usize>,
    /// (l, masses[l-1] / masses[l]) for l = n down to 1.
    pub ratios: Vec<(usize, f64)>,
    /// Fraction of l-steps achieving ratio <= 1/d + slack.
    pub fraction_within: f64,
    /// masses[0] <= 2 masses[n] d^{-0.8 n}.
    pub decay_ok: bool,
}

pub fn bprime_division_check(
    p: &ComplexPolynomial,
    m: &MeasureSample,
    z_ref: Complex64,
    n_window: usize,
    n: usize,
    eps: f64,
    slack: f64,
) -> Result<BPrimeReport> {
    if n < 1 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let total = m.points.len();
    let len = n + n_window + 1;
    let rref = real_trace(p, z_ref, len)?;
    let tr = traces(p, &m.points, len)?;

    // last failing time per sample; membership in the level-l set means
    // no failure at any time >= l
    let mut counts = vec![0usize; n + 1];
    for wi in 0..total {
        let row = &tr[wi * len..(wi + 1) * len];
        let mut last_fail: isize = -1;
        for t in 0..len {
            if (row[t] - rref[t]).abs() >= eps {
                last_fail = t as isize;
            }
        }
        let from = (last_fail + 1).max(0) as usize;
        if from <= n {
            for l in from..=n {
                counts[l] += 1;
            }
        }
    }
    if counts[n] < BALL_FLOOR {
        return Err(Error::InsufficientSamples {
            have: counts[n],
            need: BALL_FLOOR,
            context: "largest shadow ball underpopulated".into(),
        });
    }

    let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let d = p.degree() as f64;
    let mut ratios = Vec::with_capacity(n);
    let mut within = 0;
    for l in (1..=n).rev() {
        let ratio = if masses[l] > 0.0 {
            masses[l - 1] / masses[l]
        } else {
            0.0
        };
        if ratio <= 1.0 / d + slack {
            within += 1;
        }
        ratios.push((l, ratio));
    }
    let decay_ok = masses[0] <= 2.0 * masses[n] * d.powf(-0.8 * n as f64);

    Ok(BPrimeReport {
        masses,
        counts,
        ratios,
        fraction_within: within as f64 / n as f64,
        decay_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn equilibrium_of_square_has_uniform_angles() {
        let m = sample_equilibrium(&square(), 30_000, 40, 11).unwrap();
        assert!((m.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // KS of angles against the uniform law on [0, 2pi)
        let mut angles: Vec<f64> = m
            .points
            .iter()
            .map(|z| z.arg().rem_euclid(2.0 * std::f64::consts::PI))
            .collect();
        angles.sort_by(|a, b| a.total_cmp(b));
        let n = angles.len() as f64;
        let mut ks = 0.0_f64;
        for (i, &a) in angles.iter().enumerate() {
            let cdf = a / (2.0 * std::f64::consts::PI);
            ks = ks.max((cdf - i as f64 / n).abs());
            ks = ks.max((cdf - (i + 1) as f64 / n).abs());
        }
        assert!(ks < 0.015, "KS = {ks}");
    }

    #[test]
    fn equilibrium_of_chebyshev_conjugate_is_arcsine() {
        let m = sample_equilibrium(&chebyshev_conjugate(), 30_000, 40, 11).unwrap();
        let mut ys: Vec<f64> = m.points.iter().map(|z| z.im).collect();
        ys.sort_by(|a, b| a.total_cmp(b));
        let n = ys.len() as f64;
        let mut ks = 0.0_f64;
        for (i, &y) in ys.iter().enumerate() {
            let cdf = (y / 2.0).clamp(-1.0, 1.0).asin() / std::f64::consts::PI + 0.5;
            ks = ks.max((cdf - i as f64 / n).abs());
            ks = ks.max((cdf - (i + 1) as f64 / n).abs());
        }
        assert!(ks < 0.02, "KS = {ks}");
    }

    #[test]
    fn pushforward_preserves_cardinality_and_projects_arcsine() {
        let p = square();
        let m = sample_equilibrium(&p, 20_000, 40, 3).unwrap();
        let windows = pushforward(&p, &m, 3).unwrap();
        assert_eq!(windows.len(), m.points.len());
        // first coordinates distribute as Re of the uniform circle law
        let mut xs: Vec<f64> = windows.iter().map(|w| w.window[0]).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        let n = xs.len() as f64;
        let mut ks = 0.0_f64;
        for (i, &x) in xs.iter().enumerate() {
            let cdf = 1.0 - x.clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
            ks = ks.max((cdf - i as f64 / n).abs());
            ks = ks.max((cdf - (i + 1) as f64 / n).abs());
        }
        assert!(ks < 0.02, "KS = {ks}");
    }

    #[test]
    fn dirac_case_pushforward_is_degenerate() {
        let p = chebyshev_conjugate();
        let m = sample_equilibrium(&p, 2000, 60, 5).unwrap();
        let windows = pushforward(&p, &m, 4).unwrap();
        let mut worst = 0.0_f64;
        for w in &windows {
            for v in &w.window {
                worst = worst.max(v.abs());
            }
        }
        assert!(worst < 1e-8, "max coordinate {worst:e}");
        // sample variance of every coordinate
        for i in 0..=4 {
            let mean: f64 =
                windows.iter().map(|w| w.window[i]).sum::<f64>() / windows.len() as f64;
            let var: f64 = windows
                .iter()
                .map(|w| (w.window[i] - mean).powi(2))
                .sum::<f64>()
                / windows.len() as f64;
            assert!(var < 1e-16);
        }
    }

    #[test]
    fn bowen_entropy_of_basilica_targets_log_two() {
        let p = basilica();
        let m = sample_equilibrium(&p, 40_000, 50, 23).unwrap();
        let windows = pushforward(&p, &m, 1).unwrap();
        let diam = window_diameter(&windows);
        let eps: Vec<f64> = [0.02, 0.05, 0.1].iter().map(|f| f * diam).collect();
        let est = bowen_entropy(&p, &m, 1, (3, 8), &eps).unwrap();
        assert!(
            est.value > 0.55 && est.value < 0.83,
            "estimate {} (target log 2)",
            est.value
        );
    }

    #[test]
    fn entropy_of_dirac_case_vanishes() {
        let p = chebyshev_conjugate();
        let m = sample_equilibrium(&p, 5000, 60, 5).unwrap();
        let bowen = bowen_entropy(&p, &m, 2, (2, 6), &[0.05, 0.1]).unwrap();
        assert!(bowen.value < 0.05);
        let part = partition_entropy(&p, &m, 2, 0.1, 8).unwrap();
        assert_eq!(part.value, 0.0);
        assert_eq!(part.stderr, 0.0);
    }

    #[test]
    fn partition_entropy_of_basilica_in_band() {
        let p = basilica();
        let m = sample_equilibrium(&p, 40_000, 50, 29).unwrap();
        for box_size in [0.05, 0.1, 0.2] {
            let est = partition_entropy(&p, &m, 1, box_size, 12).unwrap();
            assert!(
                est.value > 0.5 && est.value < 0.9,
                "box {box_size}: estimate {}",
                est.value
            );
        }
    }

    #[test]
    fn partition_curve_monotone() {
        let p = basilica();
        let m = sample_equilibrium(&p, 8000, 40, 31).unwrap();
        let (h, _) = partition_curve(&p, &m, 1, 0.1, 10).unwrap();
        for t in 1..h.len() {
            assert!(h[t] >= h[t - 1] - 1e-12);
        }
    }

    #[test]
    fn invariance_holds_for_equilibrium_and_fails_for_disk() {
        let p = basilica();
        let m = sample_equilibrium(&p, 20_000, 45, 7).unwrap();
        let stat = invariance_check(&p, &m, 2).unwrap();
        assert!(stat < 0.05, "equilibrium discrepancy {stat}");

        // deliberately wrong measure: uniform on a disk
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<Complex64> = (0..20_000)
            .map(|_| {
                let r = rng.gen_range(0.0_f64..1.0).sqrt() * 1.2;
                let t = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                Complex64::from_polar(r, t)
            })
            .collect();
        let wrong = MeasureSample {
            weights: vec![1.0 / pts.len() as f64; pts.len()],
            points: pts,
            meta: SamplerMeta {
                depth: 0,
                seed: 9,
                count: 20_000,
            },
        };
        let stat = invariance_check(&p, &wrong, 2).unwrap();
        assert!(stat > 0.1, "disk discrepancy {stat}");
    }

    #[test]
    fn dirac_invariance_is_exactly_zero_at_resolution() {
        let p = chebyshev_conjugate();
        let m = sample_equilibrium(&p, 3000, 60, 13).unwrap();
        let stat = invariance_check(&p, &m, 2).unwrap();
        assert!(stat <= 1e-12, "stat {stat}");
    }

    #[test]
    fn line_mass_cases() {
        // iz^2: the unit circle meets {Re z = 0} in two points
        let iz2 = ComplexPolynomial::from_pairs(&[(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)]).unwrap();
        let m = sample_equilibrium(&iz2, 20_000, 40, 3).unwrap();
        assert!(line_mass(&m, 0.0, 0.05) < 0.05);
        assert_eq!(line_mass(&m, 0.0, 0.0), 0.0);

        let p = chebyshev_conjugate();
        let m = sample_equilibrium(&p, 5000, 60, 3).unwrap();
        assert!(line_mass(&m, 0.0, 1e-6) > 0.999);
    }

    #[test]
    fn bprime_masses_nested_and_divided() {
        let p = basilica();
        let m = sample_equilibrium(&p, 40_000, 50, 17).unwrap();
        let z_ref = m.points[7];
        let windows = pushforward(&p, &m, 1).unwrap();
        let eps = 0.1 * window_diameter(&windows);
        let rep = bprime_division_check(&p, &m, z_ref, 1, 6, eps, 0.15).unwrap();
        for l in 1..rep.masses.len() {
            assert!(rep.masses[l - 1] <= rep.masses[l]);
        }
        assert!(rep.fraction_within >= 0.8, "fraction {}", rep.fraction_within);
        assert!(rep.decay_ok);
    }

    #[test]
    fn starved_balls_error() {
        let p = basilica();
        let m = sample_equilibrium(&p, 200, 40, 3).unwrap();
        let err = bowen_entropy(&p, &m, 1, (3, 10), &[1e-7]).unwrap_err();
        assert!(matches!(err, Error::InsufficientSamples { .. }));
    }
}
