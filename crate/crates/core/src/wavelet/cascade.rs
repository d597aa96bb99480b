use crate::error::{Error, Result};
use crate::measures::SampledDensity;

use super::WaveletSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Scaling,
    Wavelet,
}

/// Values of `phi` at the integers `0..=L-1`, normalized so they sum to one.
///
/// They form the eigenvector for eigenvalue 1 of `M[i][j] = sqrt(2) g[2i - j]`
/// restricted to the interior integers; column sums of `M` equal one, so power
/// iteration preserves the normalization.
fn integer_values(g: &[f64]) -> Vec<f64> {
    let len = g.len();
    let mut values = vec![0.0; len];
    if len == 2 {
        values[0] = 1.0;
        return values;
    }
    let interior = len - 2;
    let tap = |i: usize, j: usize| -> f64 {
        let idx = 2 * i as i64 - j as i64;
        if (0..len as i64).contains(&idx) {
            std::f64::consts::SQRT_2 * g[idx as usize]
        } else {
            0.0
        }
    };
    let mut v = vec![1.0 / interior as f64; interior];
    for _ in 0..10_000 {
        let next: Vec<f64> = (1..=interior)
            .map(|i| (1..=interior).map(|j| tap(i, j) * v[j - 1]).sum())
            .collect();
        let total: f64 = next.iter().sum();
        let next: Vec<f64> = next.iter().map(|x| x / total).collect();
        let change = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if change < 1e-17 {
            break;
        }
    }
    values[1..=interior].copy_from_slice(&v);
    values
}

/// `phi` on the grid `i / 2^depth`, `i = 0..=(L-1) 2^depth`.
fn scaling_on_grid(g: &[f64], depth: u32) -> Vec<f64> {
    let mut values = integer_values(g);
    let support = g.len() - 1;
    for r in 0..depth {
        let step = 1usize << r;
        let next_len = support * (step << 1) + 1;
        let mut next = vec![0.0; next_len];
        for (i, slot) in next.iter_mut().enumerate() {
            if i % 2 == 0 {
                *slot = values[i / 2];
                continue;
            }
            // phi(i / 2^(r+1)) = sqrt2 sum_n g[n] phi(i / 2^r - n)
            let mut acc = 0.0;
            for (n, &gn) in g.iter().enumerate() {
                let shift = n * step;
                if shift > i {
                    break;
                }
                if let Some(&v) = values.get(i - shift) {
                    acc += gn * v;
                }
            }
            *slot = std::f64::consts::SQRT_2 * acc;
        }
        values = next;
    }
    values
}

/// Evaluates `phi` or `psi` on the dyadic grid of spacing `2^-depth` over
/// `[0, L-1]` by iterating the two-scale relation.
///
/// Samples represent left-closed cells, so `SampledDensity::integral` (a
/// left Riemann sum) is exact for the Haar system.
pub fn cascade_evaluate(
    system: &WaveletSystem,
    which: Generator,
    depth: u32,
) -> Result<SampledDensity> {
    if !(1..=24).contains(&depth) {
        return Err(Error::InvalidLevels(format!(
            "cascade depth must be in 1..=24, got {depth}"
        )));
    }
    let phi = scaling_on_grid(system.g(), depth);
    let values = match which {
        Generator::Scaling => phi,
        Generator::Wavelet => {
            let h = system.h();
            let step = 1usize << depth;
            (0..phi.len())
                .map(|i| {
                    // psi(i / 2^d) = sqrt2 sum_n h[n] phi((2i - n 2^d) / 2^d)
                    let mut acc = 0.0;
                    for (n, &hn) in h.iter().enumerate() {
                        let shift = n * step;
                        if shift > 2 * i {
                            break;
                        }
                        if let Some(&v) = phi.get(2 * i - shift) {
                            acc += hn * v;
                        }
                    }
                    std::f64::consts::SQRT_2 * acc
                })
                .collect()
        }
    };
    Ok(SampledDensity {
        origin: 0.0,
        spacing: (-(depth as f64)).exp2(),
        values,
        scale_factor_applied: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_scaling_is_box() {
        let haar = WaveletSystem::build("haar").unwrap();
        let phi = cascade_evaluate(&haar, Generator::Scaling, 3).unwrap();
        assert_eq!(phi.values.len(), 9);
        assert!(phi.values[..8].iter().all(|&v| (v - 1.0).abs() < 1e-14));
        assert_eq!(phi.values[8], 0.0);
    }

    #[test]
    fn haar_wavelet_is_step() {
        let haar = WaveletSystem::build("haar").unwrap();
        let psi = cascade_evaluate(&haar, Generator::Wavelet, 3).unwrap();
        assert!(psi.values[..4].iter().all(|&v| (v - 1.0).abs() < 1e-14));
        assert!(psi.values[4..8].iter().all(|&v| (v + 1.0).abs() < 1e-14));
    }

    #[test]
    fn integrals_at_depth_twelve() {
        for name in ["db2", "db4", "db10", "db20"] {
            let w = WaveletSystem::build(name).unwrap();
            let phi = cascade_evaluate(&w, Generator::Scaling, 12).unwrap();
            let psi = cascade_evaluate(&w, Generator::Wavelet, 12).unwrap();
            assert!((phi.integral() - 1.0).abs() < 1e-6, "{name}");
            assert!(psi.integral().abs() < 1e-6, "{name}");
        }
    }

    #[test]
    fn consecutive_depths_agree_on_shared_points() {
        // refinement fixed point: depth 11 values are the even samples of depth 12
        let w = WaveletSystem::build("db10").unwrap();
        let coarse = cascade_evaluate(&w, Generator::Scaling, 11).unwrap();
        let fine = cascade_evaluate(&w, Generator::Scaling, 12).unwrap();
        for (i, v) in coarse.values.iter().enumerate() {
            assert!((v - fine.values[2 * i]).abs() < 1e-12);
        }
        assert!((coarse.integral() - fine.integral()).abs() < 1e-6);
    }

    #[test]
    fn unit_l2_norm() {
        let w = WaveletSystem::build("db4").unwrap();
        for which in [Generator::Scaling, Generator::Wavelet] {
            let f = cascade_evaluate(&w, which, 12).unwrap();
            let norm: f64 = f.values.iter().map(|v| v * v).sum::<f64>() * f.spacing;
            assert!((norm - 1.0).abs() < 1e-4, "{which:?}: {norm}");
        }
    }

    #[test]
    fn depth_zero_is_rejected() {
        let w = WaveletSystem::build("db2").unwrap();
        assert!(cascade_evaluate(&w, Generator::Scaling, 0).is_err());
    }
}
