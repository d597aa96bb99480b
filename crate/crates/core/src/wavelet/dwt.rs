//! Decimated discrete wavelet transform.
//!
//! One analysis step maps approximation coefficients at level `j` to level `j-1`:
//!
//! ```text
//! A[j-1][k] = sum_l A[j][l] g[l - 2k]
//! D[j-1][k] = sum_l A[j][l] h[l - 2k]
//! ```
//!
//! In zero mode the signal is extended by zeros and every translation `k` with a
//! possibly nonzero coefficient is emitted. Arrays carry the absolute
//! translation index of their first element, so the output at each level is
//! exactly the coefficient sequence of the zero-extended input and translating
//! the input by `2^m` samples translates level-`(j-m)` coefficients by one.
//! For an array starting at an even translation this yields
//! `floor((N + L - 1) / 2)` coefficients; odd starts may need one more.
//!
//! Periodic mode wraps the signal and halves the length exactly.

use std::cell::Cell;

use crate::error::{Error, Result};

use super::WaveletSystem;

thread_local! {
    static DECOMPOSE_CALLS: Cell<usize> = const { Cell::new(0) };
}

/// Number of [`dwt_decompose`] calls made on the current thread so far.
pub fn decompose_call_count() -> usize {
    DECOMPOSE_CALLS.with(Cell::get)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Zero,
    Periodic,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Zero => "zero",
            Mode::Periodic => "periodic",
        }
    }
}

/// Output of a multi-level decomposition.
///
/// `details[i]` holds level `j0 + i`, so `details[0]` is the coarsest detail
/// band and the last entry sits one level below the input.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPyramid {
    pub j0: i32,
    pub mode: Mode,
    /// Length of the signal that was decomposed.
    pub signal_len: usize,
    pub approx: Vec<f64>,
    pub approx_offset: i64,
    pub details: Vec<Vec<f64>>,
    pub detail_offsets: Vec<i64>,
}

impl CoefficientPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Level of `details[i]`.
    pub fn detail_level(&self, i: usize) -> i32 {
        self.j0 + i as i32
    }

    /// Iterates `(level, translation, value)` over every detail coefficient.
    pub fn detail_entries(&self) -> impl Iterator<Item = (i32, i64, f64)> + '_ {
        self.details
            .iter()
            .zip(&self.detail_offsets)
            .enumerate()
            .flat_map(move |(i, (band, &offset))| {
                let level = self.detail_level(i);
                band.iter()
                    .enumerate()
                    .map(move |(k, &v)| (level, offset + k as i64, v))
            })
    }

    /// `sum_j weight(j) * sum_k |D[j][k]|` over all detail bands.
    pub fn weighted_detail_l1(&self, weight: impl Fn(i32) -> f64) -> f64 {
        self.details
            .iter()
            .enumerate()
            .map(|(i, band)| weight(self.detail_level(i)) * band.iter().map(|v| v.abs()).sum::<f64>())
            .sum()
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

/// Translation range `(offset, len)` produced by one zero-mode step.
fn zero_step_shape(offset: i64, len: usize, filter_len: usize) -> (i64, usize) {
    let lo = div_ceil(offset - filter_len as i64 + 1, 2);
    let hi = div_floor(offset + len as i64 - 1, 2);
    (lo, (hi - lo + 1) as usize)
}

fn analyze_zero(x: &[f64], offset: i64, filter: &[f64], out_offset: i64, out: &mut [f64]) {
    let n = x.len() as i64;
    let taps = filter.len() as i64;
    for (i, slot) in out.iter_mut().enumerate() {
        let k = out_offset + i as i64;
        // input element index e = 2k + t - offset must lie in [0, n)
        let start = 2 * k - offset;
        let t_lo = (-start).max(0);
        let t_hi = (n - start).min(taps);
        let mut acc = 0.0;
        for t in t_lo..t_hi {
            acc += filter[t as usize] * x[(start + t) as usize];
        }
        *slot = acc;
    }
}

fn analyze_periodic(x: &[f64], filter: &[f64], out: &mut [f64]) {
    let n = x.len();
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (t, &f) in filter.iter().enumerate() {
            acc += f * x[(2 * k + t) % n];
        }
        *slot = acc;
    }
}

/// Decomposes `input`, taken as approximation coefficients at level `j_in`
/// with translations `0..input.len()`, through `num_levels` analysis steps.
pub fn dwt_decompose(
    input: &[f64],
    j_in: i32,
    system: &WaveletSystem,
    num_levels: usize,
    mode: Mode,
) -> Result<CoefficientPyramid> {
    DECOMPOSE_CALLS.with(|c| c.set(c.get() + 1));
    if input.is_empty() {
        return Err(Error::EmptyInput);
    }
    if num_levels < 1 {
        return Err(Error::InvalidLevels("at least one level is required".into()));
    }
    if mode == Mode::Periodic && !input.len().is_multiple_of(1usize << num_levels.min(63)) {
        return Err(Error::InvalidLevels(format!(
            "periodic mode needs a length divisible by 2^{num_levels}, got {}",
            input.len()
        )));
    }

    let g = system.g();
    let h = system.h();
    let mut current = input.to_vec();
    let mut offset = 0i64;
    let mut details = Vec::with_capacity(num_levels);
    let mut detail_offsets = Vec::with_capacity(num_levels);

    for _ in 0..num_levels {
        let (next_offset, next_len) = match mode {
            Mode::Zero => zero_step_shape(offset, current.len(), g.len()),
            Mode::Periodic => (0, current.len() / 2),
        };
        let mut approx = vec![0.0; next_len];
        let mut detail = vec![0.0; next_len];
        match mode {
            Mode::Zero => {
                analyze_zero(&current, offset, g, next_offset, &mut approx);
                analyze_zero(&current, offset, h, next_offset, &mut detail);
            }
            Mode::Periodic => {
                analyze_periodic(&current, g, &mut approx);
                analyze_periodic(&current, h, &mut detail);
            }
        }
        details.push(detail);
        detail_offsets.push(next_offset);
        current = approx;
        offset = next_offset;
    }
    details.reverse();
    detail_offsets.reverse();

    Ok(CoefficientPyramid {
        j0: j_in - num_levels as i32,
        mode,
        signal_len: input.len(),
        approx: current,
        approx_offset: offset,
        details,
        detail_offsets,
    })
}

/// Expected `(offset, len)` of every level, finest first, starting from the input.
fn level_shapes(pyramid: &CoefficientPyramid, filter_len: usize) -> Vec<(i64, usize)> {
    let mut shapes = vec![(0i64, pyramid.signal_len)];
    for _ in 0..pyramid.levels() {
        let (offset, len) = *shapes.last().expect("non-empty");
        shapes.push(match pyramid.mode {
            Mode::Zero => zero_step_shape(offset, len, filter_len),
            Mode::Periodic => (0, len / 2),
        });
    }
    shapes
}

/// Inverts [`dwt_decompose`].
pub fn dwt_reconstruct(pyramid: &CoefficientPyramid, system: &WaveletSystem) -> Result<Vec<f64>> {
    let levels = pyramid.levels();
    if levels == 0 || pyramid.signal_len == 0 {
        return Err(Error::ShapeMismatch("pyramid has no levels".into()));
    }
    if pyramid.detail_offsets.len() != levels {
        return Err(Error::ShapeMismatch("one offset per detail band is required".into()));
    }
    let shapes = level_shapes(pyramid, system.filter_len());
    let (coarse_offset, coarse_len) = shapes[levels];
    if pyramid.approx.len() != coarse_len || pyramid.approx_offset != coarse_offset {
        return Err(Error::ShapeMismatch(format!(
            "approximation band has {} coefficients at offset {}, expected {coarse_len} at {coarse_offset}",
            pyramid.approx.len(),
            pyramid.approx_offset
        )));
    }
    for (i, band) in pyramid.details.iter().enumerate() {
        let (offset, len) = shapes[levels - i];
        if band.len() != len || pyramid.detail_offsets[i] != offset {
            return Err(Error::ShapeMismatch(format!(
                "detail band {i} has {} coefficients at offset {}, expected {len} at {offset}",
                band.len(),
                pyramid.detail_offsets[i]
            )));
        }
    }

    let g = system.g();
    let h = system.h();
    let mut current = pyramid.approx.clone();
    let mut current_offset = pyramid.approx_offset;
    for (i, detail) in pyramid.details.iter().enumerate() {
        let (target_offset, target_len) = shapes[levels - i - 1];
        let mut out = vec![0.0; target_len];
        match pyramid.mode {
            Mode::Zero => {
                for (idx, (&a, &d)) in current.iter().zip(detail).enumerate() {
                    let base = 2 * (current_offset + idx as i64) - target_offset;
                    for t in 0..g.len() {
                        let e = base + t as i64;
                        if e >= 0 && (e as usize) < target_len {
                            out[e as usize] += a * g[t] + d * h[t];
                        }
                    }
                }
            }
            Mode::Periodic => {
                for (k, (&a, &d)) in current.iter().zip(detail).enumerate() {
                    for t in 0..g.len() {
                        out[(2 * k + t) % target_len] += a * g[t] + d * h[t];
                    }
                }
            }
        }
        current = out;
        current_offset = target_offset;
    }
    Ok(current)
}
