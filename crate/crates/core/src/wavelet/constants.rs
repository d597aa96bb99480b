//! Numeric estimates of the Hölder-characterization constants
//! `a11 = 1 / inf_r ∫|x - r|^s |phi|`, `a12 = 1 / inf_r ∫|x - r|^s |psi|` and
//! `a13 = 1 / ‖phi‖_L1`.

use crate::error::{check_exponent, Result};

use super::{cascade_evaluate, Generator, WaveletSystem};

const DEPTH: u32 = 12;
const CANDIDATES: usize = 4096;
/// Grid search runs on every `COARSE_STRIDE`-th sample; the golden-section
/// refinement uses the full grid.
const COARSE_STRIDE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderConstants {
    pub a11: f64,
    pub a12: f64,
    pub a13: f64,
}

fn moment(abs_values: &[f64], spacing: f64, stride: usize, r: f64, s: f64) -> f64 {
    let mut acc = 0.0;
    for (i, &v) in abs_values.iter().enumerate().step_by(stride) {
        if v != 0.0 {
            let d = (i as f64 * spacing - r).abs();
            acc += if s == 1.0 { d * v } else { d.powf(s) * v };
        }
    }
    acc * spacing * stride as f64
}

/// `inf_r ∫ |x - r|^s |f(x)| dx` for samples of `f` on `[0, support]`.
fn min_moment(abs_values: &[f64], spacing: f64, support: f64, s: f64) -> f64 {
    let step = support / (CANDIDATES - 1) as f64;
    let (best, _) = (0..CANDIDATES)
        .map(|c| (c, moment(abs_values, spacing, COARSE_STRIDE, c as f64 * step, s)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");

    let objective = |r: f64| moment(abs_values, spacing, 1, r, s);
    // the coarse objective can misplace the minimum by up to a coarse cell
    let reach = 2.0 * step.max(COARSE_STRIDE as f64 * spacing);
    let center = best as f64 * step;
    let mut lo = (center - reach).max(0.0);
    let mut hi = (center + reach).min(support);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = objective(x2);
        }
    }
    f1.min(f2).min(objective(0.5 * (lo + hi)))
}

pub fn estimate_constants(system: &WaveletSystem, s: f64) -> Result<HolderConstants> {
    check_exponent(s)?;
    let phi = cascade_evaluate(system, Generator::Scaling, DEPTH)?;
    let psi = cascade_evaluate(system, Generator::Wavelet, DEPTH)?;
    let abs_phi: Vec<f64> = phi.values.iter().map(|v| v.abs()).collect();
    let abs_psi: Vec<f64> = psi.values.iter().map(|v| v.abs()).collect();
    let support = system.support_length() as f64;

    let l1_phi = abs_phi.iter().sum::<f64>() * phi.spacing;
    Ok(HolderConstants {
        a11: 1.0 / min_moment(&abs_phi, phi.spacing, support, s),
        a12: 1.0 / min_moment(&abs_psi, psi.spacing, support, s),
        a13: 1.0 / l1_phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn haar_at_s_one() {
        let haar = WaveletSystem::build("haar").unwrap();
        let c = estimate_constants(&haar, 1.0).unwrap();
        assert!((c.a13 - 1.0).abs() < 1e-12);
        assert!((c.a11 - 4.0).abs() < 1e-6, "{}", c.a11);
        assert!((c.a12 - 4.0).abs() < 1e-6, "{}", c.a12);
    }

    #[test]
    fn haar_closed_form_for_fractional_s() {
        // inf_r ∫_0^1 |x - r|^s dx = 2 (1/2)^(s+1) / (s+1), attained at r = 1/2
        let haar = WaveletSystem::build("haar").unwrap();
        let s = 0.5;
        let c = estimate_constants(&haar, s).unwrap();
        let exact = 2.0 * 0.5f64.powf(s + 1.0) / (s + 1.0);
        assert!((1.0 / c.a11 - exact).abs() < 1e-4, "{} vs {exact}", 1.0 / c.a11);
    }

    #[test]
    fn smooth_wavelet_constants_are_finite_and_ordered() {
        let w = WaveletSystem::build("db4").unwrap();
        let c = estimate_constants(&w, 0.5).unwrap();
        assert!(c.a11.is_finite() && c.a12.is_finite());
        // ‖phi‖_L1 >= ∫phi = 1
        assert!(c.a13 <= 1.0 && c.a13 > 0.5);
    }

    #[test]
    fn exponent_is_validated() {
        let haar = WaveletSystem::build("haar").unwrap();
        assert!(matches!(estimate_constants(&haar, 0.0), Err(Error::InvalidExponent(_))));
        assert!(matches!(estimate_constants(&haar, 1.5), Err(Error::InvalidExponent(_))));
    }
}
