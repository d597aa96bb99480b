//! Orthonormal compactly supported wavelet systems on the line.
//!
//! A system is fixed by its scaling filter `g`:
//! `phi(x) = sqrt(2) * sum_n g[n] phi(2x - n)` with `phi` supported on `[0, L-1]`,
//! and the wavelet filter is the quadrature mirror `h[n] = (-1)^n g[L-1-n]`,
//! so `psi(x) = sqrt(2) * sum_n h[n] phi(2x - n)` shares the same support.

mod cascade;
mod constants;
mod dwt;
mod filters;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{Error, Result};

pub use cascade::{cascade_evaluate, Generator};
pub use constants::{estimate_constants, HolderConstants};
pub use dwt::{decompose_call_count, dwt_decompose, dwt_reconstruct, CoefficientPyramid, Mode};

/// Tolerance for the filter identities checked at construction.
const FILTER_TOL: f64 = 1e-12;

/// Names accepted by [`WaveletSystem::build`].
pub const CATALOG: [&str; 20] = [
    "haar", "db2", "db3", "db4", "db5", "db6", "db7", "db8", "db9", "db10", "db11", "db12",
    "db13", "db14", "db15", "db16", "db17", "db18", "db19", "db20",
];

#[derive(Clone, PartialEq)]
pub struct WaveletSystem {
    name: String,
    g: Vec<f64>,
    h: Vec<f64>,
}

impl fmt::Debug for WaveletSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveletSystem")
            .field("name", &self.name)
            .field("taps", &self.g.len())
            .finish()
    }
}

impl WaveletSystem {
    /// Looks up a catalog system (`haar`, `db2` … `db20`).
    pub fn build(name: &str) -> Result<Self> {
        let key = name.trim().to_ascii_lowercase();
        let g: &[f64] = match key.as_str() {
            "haar" => &[FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            "db2" => &filters::DB2,
            "db3" => &filters::DB3,
            "db4" => &filters::DB4,
            "db5" => &filters::DB5,
            "db6" => &filters::DB6,
            "db7" => &filters::DB7,
            "db8" => &filters::DB8,
            "db9" => &filters::DB9,
            "db10" => &filters::DB10,
            "db11" => &filters::DB11,
            "db12" => &filters::DB12,
            "db13" => &filters::DB13,
            "db14" => &filters::DB14,
            "db15" => &filters::DB15,
            "db16" => &filters::DB16,
            "db17" => &filters::DB17,
            "db18" => &filters::DB18,
            "db19" => &filters::DB19,
            "db20" => &filters::DB20,
            _ => return Err(Error::UnknownWavelet(name.to_string())),
        };
        Self::from_scaling_filter(&key, g.to_vec())
    }

    /// Builds a system from an arbitrary scaling filter, rejecting filters that
    /// do not generate an orthonormal system.
    pub fn from_scaling_filter(name: &str, g: Vec<f64>) -> Result<Self> {
        let len = g.len();
        if len < 2 || !len.is_multiple_of(2) {
            return Err(Error::InvalidFilter(format!(
                "filter length {len} must be even and at least 2"
            )));
        }
        let h = (0..len)
            .map(|n| if n % 2 == 0 { g[len - 1 - n] } else { -g[len - 1 - n] })
            .collect();
        let system = Self {
            name: name.to_string(),
            g,
            h,
        };
        system.check_identities(FILTER_TOL)?;
        Ok(system)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Low-pass (scaling) filter.
    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// High-pass (wavelet) filter.
    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn filter_len(&self) -> usize {
        self.g.len()
    }

    /// Length of `supp(phi)` and `supp(psi)` in units of translation (`L - 1`).
    pub fn support_length(&self) -> usize {
        self.g.len() - 1
    }

    /// Verifies the four filter identities: `sum g = sqrt 2`, `sum h = 0`,
    /// double-shift orthonormality of `g`, and the quadrature-mirror relation.
    pub fn check_identities(&self, tol: f64) -> Result<()> {
        let len = self.g.len();
        let fail = |what: String| Err(Error::InvalidFilter(format!("{}: {what}", self.name)));

        let sum_g: f64 = self.g.iter().sum();
        if (sum_g - std::f64::consts::SQRT_2).abs() > tol {
            return fail(format!("sum of g is {sum_g}"));
        }
        let sum_h: f64 = self.h.iter().sum();
        if sum_h.abs() > tol {
            return fail(format!("sum of h is {sum_h}"));
        }
        for m in 0..len / 2 {
            let dot: f64 = (0..len - 2 * m).map(|k| self.g[k] * self.g[k + 2 * m]).sum();
            let expected = if m == 0 { 1.0 } else { 0.0 };
            if (dot - expected).abs() > tol {
                return fail(format!("shift-{m} autocorrelation is {dot}"));
            }
        }
        for k in 0..len {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            if (self.h[k] - sign * self.g[len - 1 - k]).abs() > tol {
                return fail(format!("mirror relation broken at tap {k}"));
            }
        }
        Ok(())
    }
}
