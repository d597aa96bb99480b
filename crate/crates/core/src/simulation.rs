//! Translation and dilation experiments: wavelet distances against exact
//! transport costs between a base density and its transforms.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::distance::{difference_pyramid, score_pyramid, DistanceConfig, Formulation};
use crate::error::{check_exponent, Error, Result};
use crate::measures::{discretize, Density};
use crate::ot::exact_ws;

/// Domain of the discretized measures handed to the exact solver.
pub const EXACT_DOMAIN: (f64, f64) = (0.0, 3.0);

pub const CSV_HEADER: &str =
    "family,formulation,wavelet,s,j0,M,param,wavelet_value,exact_value,norm_constant,normalized_value";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    UniformTranslate,
    UniformDilate,
    BumpTranslate,
    BumpDilate,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::UniformTranslate,
        Family::UniformDilate,
        Family::BumpTranslate,
        Family::BumpDilate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::UniformTranslate => "uniform_translate",
            Family::UniformDilate => "uniform_dilate",
            Family::BumpTranslate => "bump_translate",
            Family::BumpDilate => "bump_dilate",
        }
    }

    pub fn is_translation(self) -> bool {
        matches!(self, Family::UniformTranslate | Family::BumpTranslate)
    }

    /// Parameter at which the transform is the identity.
    pub fn identity_param(self) -> f64 {
        if self.is_translation() {
            0.0
        } else {
            1.0
        }
    }

    pub fn default_range(self) -> (f64, f64) {
        if self.is_translation() {
            (0.0, 2.0)
        } else {
            (0.5, 1.5)
        }
    }

    pub fn default_j0(self) -> i32 {
        if self.is_translation() {
            -11
        } else {
            -9
        }
    }

    pub fn base(self) -> Result<Density> {
        match self {
            Family::UniformTranslate => Density::uniform(0.0, 1.0),
            Family::UniformDilate => Density::uniform(1.0, 2.0),
            Family::BumpTranslate => Density::bump(0.5, 0.5),
            Family::BumpDilate => Density::bump(1.5, 0.5),
        }
    }

    /// Base density translated by `param`, or dilated by `param` about 3/2.
    pub fn transformed(self, param: f64) -> Result<Density> {
        let base = self.base()?;
        if self.is_translation() {
            Ok(base.translate(param))
        } else {
            base.dilate(param, 1.5)
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown family `{s}` (expected uniform_translate, uniform_dilate, bump_translate or bump_dilate)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub family: Family,
    pub count: usize,
    pub param_range: (f64, f64),
    pub s_values: Vec<f64>,
    /// Distance settings; its `s` is replaced by each entry of `s_values`.
    pub cfg: DistanceConfig,
    pub exact_grid_points: usize,
}

impl SimulationSpec {
    /// 20 parameters over the family's usual range, `s = 1, 1/2, 1/4`, db10
    /// with `M = 18`, and a 1000-point exact grid.
    pub fn new(family: Family, formulation: Formulation) -> Self {
        SimulationSpec {
            family,
            count: 20,
            param_range: family.default_range(),
            s_values: vec![1.0, 0.5, 0.25],
            cfg: DistanceConfig::new(1.0, family.default_j0(), 18, "db10", formulation),
            exact_grid_points: 1000,
        }
    }

    /// `count` evenly spaced values including both ends of the range.
    pub fn params(&self) -> Vec<f64> {
        let (lo, hi) = self.param_range;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { hi } else { lo + (hi - lo) * i as f64 / last })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidConfig(format!(
                "at least two parameter values are required, got {}",
                self.count
            )));
        }
        let (lo, hi) = self.param_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig(format!("bad parameter range [{lo}, {hi}]")));
        }
        if !self.family.is_translation() && lo <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "dilation factors must be positive, got range [{lo}, {hi}]"
            )));
        }
        if self.s_values.is_empty() {
            return Err(Error::InvalidConfig("no exponents given".into()));
        }
        for &s in &self.s_values {
            check_exponent(s)?;
            self.cfg_for(s).validate()?;
        }
        if self.exact_grid_points < 2 {
            return Err(Error::InvalidConfig(format!(
                "the exact grid needs at least two points, got {}",
                self.exact_grid_points
            )));
        }
        Ok(())
    }

    fn cfg_for(&self, s: f64) -> DistanceConfig {
        self.cfg.clone().with_s(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRow {
    pub family: Family,
    pub formulation: Formulation,
    pub wavelet: String,
    pub s: f64,
    pub j0: i32,
    pub levels: u32,
    pub param: f64,
    pub wavelet_value: f64,
    pub exact_value: f64,
    pub norm_constant: f64,
    pub normalized_value: f64,
}

/// Computes every `(s, param)` row, ordered by `s` as listed in the spec and
/// then by parameter. Each `s` gets its own fitted normalization constant.
pub fn run_simulation(spec: &SimulationSpec) -> Result<Vec<SimulationRow>> {
    spec.validate()?;
    let base = spec.family.base()?;
    let base_atoms = discretize(&base, EXACT_DOMAIN, spec.exact_grid_points)?;
    let params = spec.params();

    // one pyramid per parameter serves every s
    let per_param: Vec<Vec<(f64, f64)>> = params
        .par_iter()
        .map(|&param| {
            let row_error = |s: f64| {
                move |e: Error| Error::Row {
                    param,
                    s,
                    source: Box::new(e),
                }
            };
            let first_s = spec.s_values[0];
            let moved = spec.family.transformed(param).map_err(row_error(first_s))?;
            let pyramid =
                difference_pyramid(&base, &moved, &spec.cfg_for(first_s)).map_err(row_error(first_s))?;
            let moved_atoms =
                discretize(&moved, EXACT_DOMAIN, spec.exact_grid_points).map_err(row_error(first_s))?;
            spec.s_values
                .iter()
                .map(|&s| {
                    let wavelet_value = score_pyramid(&pyramid, &spec.cfg_for(s));
                    let (exact_value, _) = exact_ws(&base_atoms, &moved_atoms, s).map_err(row_error(s))?;
                    Ok((wavelet_value, exact_value))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(params.len() * spec.s_values.len());
    for (si, &s) in spec.s_values.iter().enumerate() {
        let group_start = rows.len();
        for (pi, &param) in params.iter().enumerate() {
            let (wavelet_value, exact_value) = per_param[pi][si];
            rows.push(SimulationRow {
                family: spec.family,
                formulation: spec.cfg.formulation,
                wavelet: spec.cfg.wavelet.clone(),
                s,
                j0: spec.cfg.j0,
                levels: spec.cfg.levels,
                param,
                wavelet_value,
                exact_value,
                norm_constant: f64::NAN,
                normalized_value: f64::NAN,
            });
        }
        let group = &mut rows[group_start..];
        let c = fit_normalization(group)?;
        for row in group {
            row.norm_constant = c;
            row.normalized_value = c * row.wavelet_value;
        }
    }
    Ok(rows)
}

/// Least-squares `c` minimizing `sum (c w - e)^2`, skipping rows whose
/// parameter lies within 10% of the range width of the identity transform,
/// where both distances vanish and their ratio is ill-conditioned.
pub fn fit_normalization(rows: &[SimulationRow]) -> Result<f64> {
    if rows.iter().all(|r| r.wavelet_value == 0.0) {
        return Err(Error::DegenerateFit);
    }
    let lo = rows.iter().map(|r| r.param).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.param).fold(f64::NEG_INFINITY, f64::max);
    let margin = 0.1 * (hi - lo);
    let identity = rows[0].family.identity_param();
    let kept: Vec<&SimulationRow> = rows
        .iter()
        .filter(|r| (r.param - identity).abs() > margin)
        .collect();
    let kept = if kept.is_empty() { rows.iter().collect() } else { kept };
    let (num, den) = kept.iter().fold((0.0, 0.0), |(num, den), r| {
        (num + r.wavelet_value * r.exact_value, den + r.wavelet_value * r.wavelet_value)
    });
    if den == 0.0 {
        return Err(Error::DegenerateFit);
    }
    Ok(num / den)
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed,
/// scientific notation for exponents below -4 or above 11.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exponent) = sci.split_once('e').expect("scientific notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-4..12).contains(&exponent) {
        let decimals = (11 - exponent) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exponent.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv(rows: &[SimulationRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.family,
            r.formulation,
            r.wavelet,
            format_g12(r.s),
            r.j0,
            r.levels,
            format_g12(r.param),
            format_g12(r.wavelet_value),
            format_g12(r.exact_value),
            format_g12(r.norm_constant),
            format_g12(r.normalized_value),
        )?;
    }
    out.flush()
}

pub fn emit_csv(rows: &[SimulationRow], path: &Path) -> Result<()> {
    let io_error = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_error)?;
    write_csv(rows, std::io::BufWriter::new(file)).map_err(io_error)
}
