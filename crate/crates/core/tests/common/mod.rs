#![allow(dead_code)]

use std::sync::Arc;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use wavelet_wasserstein::measures::{Density, DiscreteMeasure, SampledDensity};
use wavelet_wasserstein::quadrature::Quadrature;
use wavelet_wasserstein::wavelet::{cascade_evaluate, Generator, WaveletSystem};

const CASCADE_DEPTH: u32 = 12;

/// `mu = g+ / C`, `nu = g- / C` for `g = sum coef * psi_{j,k}`, where
/// `C = ∫ g+ = ∫ g-`. Returns `(mu, nu, C)`.
pub fn wavelet_part_pair(wavelet: &str, terms: &[(i32, i64, f64)]) -> (Density, Density, f64) {
    let system = WaveletSystem::build(wavelet).unwrap();
    let psi: Arc<SampledDensity> =
        Arc::new(cascade_evaluate(&system, Generator::Wavelet, CASCADE_DEPTH).unwrap());
    let support = system.support_length() as f64;
    let terms: Vec<(f64, f64, f64)> = terms
        .iter()
        .map(|&(j, k, coef)| ((j as f64).exp2(), k as f64, coef))
        .collect();

    // knots of every interpolated term, so quadrature sees the kinks
    let mut breaks = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(scale, k, _) in &terms {
        lo = lo.min(k / scale);
        hi = hi.max((k + support) / scale);
        let knots = (support as usize) << CASCADE_DEPTH;
        breaks.extend((0..=knots).map(|i| (k + i as f64 * psi.spacing) / scale));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let g = Arc::new(move |x: f64| {
        terms
            .iter()
            .map(|&(scale, k, coef)| coef * scale.sqrt() * psi.eval_linear(scale * x - k))
            .sum::<f64>()
    });
    let positive = g.clone();
    let mass = Quadrature::default()
        .integrate_with_breaks(move |x| positive(x).max(0.0), &breaks)
        .value;
    let (gp, gm) = (g.clone(), g);
    let mu = Density::normalized_with_breaks(lo, hi, move |x| gp(x).max(0.0), breaks.clone()).unwrap();
    let nu = Density::normalized_with_breaks(lo, hi, move |x| (-gm(x)).max(0.0), breaks).unwrap();
    (mu, nu, mass)
}

/// A uniform or bump density with support inside `[0, width]`.
pub fn random_density(rng: &mut impl Rng, width: f64) -> Density {
    let len = rng.gen_range(0.05 * width..0.5 * width);
    let lo = rng.gen_range(0.0..width - len);
    if rng.gen_bool(0.5) {
        Density::uniform(lo, lo + len).unwrap()
    } else {
        Density::bump(lo + len / 2.0, len / 2.0).unwrap()
    }
}

/// Dense LP formulation solved by an independent simplex implementation.
pub fn lp_oracle(mu: &DiscreteMeasure, nu: &DiscreteMeasure, s: f64) -> f64 {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<_>> = mu
        .positions()
        .iter()
        .map(|x| {
            nu.positions()
                .iter()
                .map(|y| lp.add_var((x - y).abs().powf(s), (0.0, f64::INFINITY)))
                .collect()
        })
        .collect();
    for (i, w) in mu.weights().iter().enumerate() {
        lp.add_constraint(vars[i].iter().map(|&v| (v, 1.0)), ComparisonOp::Eq, *w);
    }
    for (j, w) in nu.weights().iter().enumerate() {
        lp.add_constraint(vars.iter().map(|row| (row[j], 1.0)), ComparisonOp::Eq, *w);
    }
    lp.solve().expect("feasible").objective()
}

/// Atoms at distinct random positions in `[-2, 2]` with random masses.
pub fn random_measure(rng: &mut impl Rng, atoms: usize) -> DiscreteMeasure {
    let mut xs: Vec<f64> = (0..atoms).map(|_| rng.gen_range(-2.0..2.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let ws = xs.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    DiscreteMeasure::from_masses(xs, ws).unwrap()
}
