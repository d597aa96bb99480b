//! Wavelet linearized optimal transport: a density becomes the sparse vector
//! of its detail coefficients, and the weighted `l1` distance between two
//! vectors equals the new wavelet distance between the densities.
//!
//! Text format: a header `wlot <wavelet> <j0> <M>` followed by one
//! `j k value` line per stored coefficient, values with 17 significant digits
//! so they parse back bit-exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::distance::{level_weight, DistanceConfig};
use crate::error::{check_exponent, Error, Result};
use crate::measures::{sample_for_dwt, Density};
use crate::wavelet::{dwt_decompose, Mode};

#[derive(Debug, Clone, PartialEq)]
pub struct WlotVector {
    wavelet: String,
    j0: i32,
    levels: u32,
    mode: Mode,
    /// Nonzero coefficients keyed by `(level, absolute translation)`.
    entries: BTreeMap<(i32, i64), f64>,
}

impl WlotVector {
    /// Identifies every parameter that changes what a coefficient means.
    pub fn fingerprint(&self) -> String {
        format!(
            "{}/j0={}/M={}/{}",
            self.wavelet,
            self.j0,
            self.levels,
            self.mode.as_str()
        )
    }

    pub fn wavelet(&self) -> &str {
        &self.wavelet
    }

    pub fn j0(&self) -> i32 {
        self.j0
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn entries(&self) -> &BTreeMap<(i32, i64), f64> {
        &self.entries
    }

    pub fn get(&self, j: i32, k: i64) -> f64 {
        self.entries.get(&(j, k)).copied().unwrap_or(0.0)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Number of stored entries at each level, `j0 ..= j0 + M - 1`.
    pub fn nonzeros_per_level(&self) -> BTreeMap<i32, usize> {
        let mut counts: BTreeMap<i32, usize> =
            (self.j0..self.j0 + self.levels as i32).map(|j| (j, 0)).collect();
        for &(j, _) in self.entries.keys() {
            *counts.entry(j).or_default() += 1;
        }
        counts
    }

    /// Drops entries with magnitude below `eps`. Lossy: distances computed
    /// from pruned vectors no longer match the wavelet distance exactly.
    pub fn prune(&self, eps: f64) -> WlotVector {
        WlotVector {
            entries: self
                .entries
                .iter()
                .filter(|(_, v)| v.abs() >= eps)
                .map(|(&key, &v)| (key, v))
                .collect(),
            ..self.clone()
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("wlot {} {} {}\n", self.wavelet, self.j0, self.levels);
        for (&(j, k), v) in &self.entries {
            writeln!(out, "{j} {k} {v:.16e}").expect("writing to a String");
        }
        out
    }

    pub fn parse(text: &str) -> Result<WlotVector> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty wlot file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [tag, wavelet, j0, levels] = fields[..] else {
            return Err(Error::Parse(format!("bad header `{header}`")));
        };
        if tag != "wlot" {
            return Err(Error::Parse(format!("bad header `{header}`")));
        }
        let j0: i32 = parse_field(j0, 1)?;
        let levels: u32 = parse_field(levels, 1)?;
        let mut entries = BTreeMap::new();
        for (index, line) in lines {
            let line_no = index + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [j, k, value] = fields[..] else {
                return Err(Error::Parse(format!("line {line_no}: expected `j k value`")));
            };
            let j: i32 = parse_field(j, line_no)?;
            if j < j0 || j >= j0 + levels as i32 {
                return Err(Error::Parse(format!(
                    "line {line_no}: level {j} outside {j0}..{}",
                    j0 + levels as i32
                )));
            }
            entries.insert((j, parse_field(k, line_no)?), parse_field(value, line_no)?);
        }
        Ok(WlotVector {
            wavelet: wavelet.to_string(),
            j0,
            levels,
            mode: Mode::Zero,
            entries,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<WlotVector> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}

fn parse_field<T: std::str::FromStr>(field: &str, line_no: usize) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::Parse(format!("line {line_no}: cannot parse `{field}`")))
}

/// Detail coefficients of `p` itself, levels `j0 ..= j0 + M - 1`.
pub fn embed(p: &Density, cfg: &DistanceConfig) -> Result<WlotVector> {
    let system = cfg.validate()?;
    let sampled = sample_for_dwt(p, cfg.j0, cfg.levels)?;
    let pyramid = dwt_decompose(
        &sampled.values,
        cfg.top_level(),
        &system,
        cfg.levels as usize,
        cfg.mode(),
    )?;
    Ok(WlotVector {
        wavelet: cfg.wavelet.clone(),
        j0: cfg.j0,
        levels: cfg.levels,
        mode: cfg.mode(),
        entries: pyramid
            .detail_entries()
            .filter(|&(_, _, v)| v != 0.0)
            .map(|(j, k, v)| ((j, k), v))
            .collect(),
    })
}

/// `sum 2^(-j (s + 1/2)) |u - v|` over the union of stored keys.
pub fn wlot_distance(u: &WlotVector, v: &WlotVector, s: f64) -> Result<f64> {
    check_exponent(s)?;
    if u.fingerprint() != v.fingerprint() {
        return Err(Error::ConfigMismatch {
            left: u.fingerprint(),
            right: v.fingerprint(),
        });
    }
    let mut total = 0.0;
    let mut level = i32::MIN;
    let mut weight = 0.0;
    let mut add = |j: i32, diff: f64| {
        if j != level {
            level = j;
            weight = level_weight(j, s);
        }
        total += weight * diff.abs();
    };
    let mut left = u.entries.iter().peekable();
    let mut right = v.entries.iter().peekable();
    loop {
        match (left.peek(), right.peek()) {
            (Some((ka, a)), Some((kb, b))) => match ka.cmp(kb) {
                std::cmp::Ordering::Less => {
                    add(ka.0, **a);
                    left.next();
                }
                std::cmp::Ordering::Greater => {
                    add(kb.0, **b);
                    right.next();
                }
                std::cmp::Ordering::Equal => {
                    add(ka.0, **a - **b);
                    left.next();
                    right.next();
                }
            },
            (Some((ka, a)), None) => {
                add(ka.0, **a);
                left.next();
            }
            (None, Some((kb, b))) => {
                add(kb.0, **b);
                right.next();
            }
            (None, None) => break,
        }
    }
    Ok(total)
}

/// Embeds each density once, in order, on the calling thread.
pub fn embed_all(ps: &[Density], cfg: &DistanceConfig) -> Result<Vec<WlotVector>> {
    ps.iter().map(|p| embed(p, cfg)).collect()
}

/// Pairwise [`wlot_distance`] matrix of already embedded vectors.
pub fn pairwise_distances(vectors: &[WlotVector], s: f64) -> Result<Vec<Vec<f64>>> {
    let n = vectors.len();
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Ok(0.0)
                    } else {
                        let (a, b) = if i < j { (i, j) } else { (j, i) };
                        wlot_distance(&vectors[a], &vectors[b], s).map_err(|e| Error::Pair {
                            i: a,
                            j: b,
                            source: Box::new(e),
                        })
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows)
}
