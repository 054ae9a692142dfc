use reorbit::measure::*;
use reorbit::poly::ComplexPolynomial;

fn main() {
    // basilica at acceptance scale across seeds
    let p = ComplexPolynomial::from_pairs(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]).unwrap();
    for seed in [1u64, 2, 3, 23, 99] {
        let m = sample_equilibrium(&p, 200_000, 60, seed).unwrap();
        let windows = pushforward(&p, &m, 1).unwrap();
        let diam = window_diameter(&windows);
        let eps: Vec<f64> = [0.02, 0.05, 0.1].iter().map(|f| f * diam).collect();
        match bowen_entropy(&p, &m, 1, (4, 12), &eps) {
            Ok(e) => println!("basilica seed {seed}: {:.4} +- {:.4} (eps {:.3})", e.value, e.stderr, e.epsilon),
            Err(e) => println!("basilica seed {seed}: ERR {e}"),
        }
    }
    // iz^2
    let iz2 = ComplexPolynomial::from_pairs(&[(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)]).unwrap();
    let m = sample_equilibrium(&iz2, 200_000, 60, 5).unwrap();
    let windows = pushforward(&iz2, &m, 1).unwrap();
    let diam = window_diameter(&windows);
    let eps: Vec<f64> = [0.02, 0.05, 0.1].iter().map(|f| f * diam).collect();
    match bowen_entropy(&iz2, &m, 1, (4, 12), &eps) {
        Ok(e) => println!("iz2: {:.4} +- {:.4} (eps {:.3})", e.value, e.stderr, e.epsilon),
        Err(e) => println!("iz2: ERR {e}"),
    }
    // cantor cubic d=3
    let shift = num_complex::Complex64::from_polar(1e4, std::f64::consts::PI / 5.0_f64.sqrt());
    let c3 = ComplexPolynomial::new(vec![-shift, 0.0.into(), 0.0.into(), num_complex::Complex64::new(0.0, 1.0)]).unwrap();
    let m = sample_equilibrium(&c3, 200_000, 40, 5).unwrap();
    let windows = pushforward(&c3, &m, 2).unwrap();
    let diam = window_diameter(&windows);
    let eps: Vec<f64> = [0.02, 0.05, 0.1].iter().map(|f| f * diam).collect();
    for nr in [(2usize, 6usize), (2, 5), (3, 7)] {
        match bowen_entropy(&c3, &m, 2, nr, &eps) {
            Ok(e) => println!("cubic n{:?}: {:.4} +- {:.4} (eps {:.3})", nr, e.value, e.stderr, e.epsilon),
            Err(e) => println!("cubic n{:?}: ERR {e}", nr),
        }
    }
}
