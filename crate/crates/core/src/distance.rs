//! Wavelet s-Wasserstein distances between densities on `[0, 2^-j0]`.
//!
//! Every formulation follows the same pipeline: sample `p - q` on the dyadic
//! grid of level `j0 + M`, decompose in zero mode, and take a weighted `l1`
//! norm of the coefficients. The new formulation decomposes `M` levels and
//! sums details from `j0` upward; the original and alternative formulations
//! decompose down to level 0 and add `C0` times the level-0 approximation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{check_exponent, Error, Result};
use crate::measures::{sample_difference_for_dwt, Density};
use crate::wavelet::{dwt_decompose, CoefficientPyramid, Mode, WaveletSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    New,
    Original,
    Alternative,
}

impl Formulation {
    pub fn as_str(self) -> &'static str {
        match self {
            Formulation::New => "new",
            Formulation::Original => "original",
            Formulation::Alternative => "alternative",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "new" => Ok(Formulation::New),
            "original" => Ok(Formulation::Original),
            "alternative" => Ok(Formulation::Alternative),
            other => Err(Error::Parse(format!(
                "unknown formulation `{other}` (expected new, original or alternative)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceConfig {
    pub s: f64,
    /// Lowest detail level.
    pub j0: i32,
    /// Number of decomposition levels; the grid has `2^levels` samples.
    pub levels: u32,
    pub wavelet: String,
    pub formulation: Formulation,
    pub c0: f64,
    pub c1: f64,
}

impl DistanceConfig {
    /// Uses the conventional constants of each formulation: `C0 = 0, C1 = 1`
    /// for the original and `C0 = 3^s, C1 = 1` for the alternative.
    pub fn new(s: f64, j0: i32, levels: u32, wavelet: &str, formulation: Formulation) -> Self {
        let c0 = match formulation {
            Formulation::Alternative => 3f64.powf(s),
            _ => 0.0,
        };
        DistanceConfig {
            s,
            j0,
            levels,
            wavelet: wavelet.to_string(),
            formulation,
            c0,
            c1: 1.0,
        }
    }

    pub fn with_constants(mut self, c0: f64, c1: f64) -> Self {
        self.c0 = c0;
        self.c1 = c1;
        self
    }

    pub fn with_s(mut self, s: f64) -> Self {
        if self.formulation == Formulation::Alternative && self.c0 == 3f64.powf(self.s) {
            self.c0 = 3f64.powf(s);
        }
        self.s = s;
        self
    }

    pub fn mode(&self) -> Mode {
        Mode::Zero
    }

    /// Finest level of the sampling grid.
    pub fn top_level(&self) -> i32 {
        self.j0 + self.levels as i32
    }

    /// Checks the invariants and builds the wavelet system.
    pub fn validate(&self) -> Result<WaveletSystem> {
        check_exponent(self.s)?;
        if !(1..=30).contains(&self.levels) {
            return Err(Error::InvalidConfig(format!(
                "levels must be in 1..=30, got {}",
                self.levels
            )));
        }
        if self.j0 < 0 && self.levels as i64 <= -(self.j0 as i64) {
            return Err(Error::InvalidConfig(format!(
                "levels = {} must exceed -j0 = {}",
                self.levels, -self.j0
            )));
        }
        match self.formulation {
            Formulation::New => {}
            Formulation::Original => {
                if self.c0 != 0.0 || self.c1 != 1.0 {
                    return Err(Error::InvalidConfig(format!(
                        "the original formulation uses C0 = 0, C1 = 1 (got {}, {})",
                        self.c0, self.c1
                    )));
                }
            }
            Formulation::Alternative => {
                if !(self.c0 > 0.0 && self.c0.is_finite() && self.c1 > 0.0 && self.c1.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "the alternative formulation needs C0 > 0 and C1 > 0 (got {}, {})",
                        self.c0, self.c1
                    )));
                }
            }
        }
        if self.formulation != Formulation::New && self.top_level() <= 0 {
            return Err(Error::InvalidConfig(format!(
                "j0 + levels = {} must be positive to decompose down to level 0",
                self.top_level()
            )));
        }
        WaveletSystem::build(&self.wavelet)
    }

    /// Levels the pipeline decomposes: `M` for the new formulation, down to
    /// level 0 otherwise.
    pub(crate) fn decomposition_levels(&self) -> usize {
        match self.formulation {
            Formulation::New => self.levels as usize,
            _ => self.top_level() as usize,
        }
    }
}

/// Weight `2^(-j (s + 1/2))` of a level-`j` detail coefficient.
pub fn level_weight(j: i32, s: f64) -> f64 {
    (-(j as f64) * (s + 0.5)).exp2()
}

/// Decomposes the sampled difference `p - q` as the configured formulation
/// requires. The result depends on `s` only through the formulation, so one
/// pyramid can be scored for several exponents.
pub fn difference_pyramid(p: &Density, q: &Density, cfg: &DistanceConfig) -> Result<CoefficientPyramid> {
    let system = cfg.validate()?;
    let sampled = sample_difference_for_dwt(p, q, cfg.j0, cfg.levels)?;
    dwt_decompose(
        &sampled.values,
        cfg.top_level(),
        &system,
        cfg.decomposition_levels(),
        cfg.mode(),
    )
}

/// Weighted coefficient norm of a pyramid from [`difference_pyramid`].
pub fn score_pyramid(pyramid: &CoefficientPyramid, cfg: &DistanceConfig) -> f64 {
    let details = pyramid.weighted_detail_l1(|j| level_weight(j, cfg.s));
    match cfg.formulation {
        Formulation::New => details,
        _ => {
            let approx: f64 = pyramid.approx.iter().map(|v| v.abs()).sum();
            cfg.c0 * approx + cfg.c1 * details
        }
    }
}

pub fn distance_new(p: &Density, q: &Density, cfg: &DistanceConfig) -> Result<f64> {
    if cfg.formulation != Formulation::New {
        return Err(Error::InvalidConfig(format!(
            "distance_new called with the {} formulation",
            cfg.formulation
        )));
    }
    Ok(score_pyramid(&difference_pyramid(p, q, cfg)?, cfg))
}

pub fn distance_original(p: &Density, q: &Density, cfg: &DistanceConfig) -> Result<f64> {
    if cfg.formulation == Formulation::New {
        return Err(Error::InvalidConfig(
            "distance_original needs the original or alternative formulation".into(),
        ));
    }
    Ok(score_pyramid(&difference_pyramid(p, q, cfg)?, cfg))
}

/// The configured formulation's distance.
pub fn distance(p: &Density, q: &Density, cfg: &DistanceConfig) -> Result<f64> {
    Ok(score_pyramid(&difference_pyramid(p, q, cfg)?, cfg))
}

/// Symmetric matrix of pairwise distances; each pair is its own pipeline run.
pub fn distance_matrix(ps: &[Density], cfg: &DistanceConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let n = ps.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| {
            distance(&ps[i], &ps[j], cfg).map_err(|e| Error::Pair {
                i,
                j,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut matrix = vec![vec![0.0; n]; n];
    for (&(i, j), d) in pairs.iter().zip(values) {
        matrix[i][j] = d;
        matrix[j][i] = d;
    }
    Ok(matrix)
}
