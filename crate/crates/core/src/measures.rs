//! Probability densities on the line, their dyadic sampling for the wavelet
//! transform, and point-mass discretizations for the exact solver.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Allowed deviation of a density's mass from one.
pub const MASS_TOL: f64 = 1e-8;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A probability density with compact support `[lo, hi]`.
///
/// Densities are immutable; `translate` and `dilate` wrap the evaluator.
#[derive(Clone)]
pub struct Density {
    lo: f64,
    hi: f64,
    eval: Evaluator,
    /// Points where the density may jump or kink, used to seed quadrature.
    breaks: Vec<f64>,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Density[{}, {}]", self.lo, self.hi)
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidInterval(format!("[{lo}, {hi}]")))
    }
}

/// `∫_{-1}^{1} exp(-1 / (1 - t^2)) dt`.
fn bump_integral() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        Quadrature::with_tolerance(0.0, 1e-13)
            .integrate(bump_profile, -1.0, 1.0)
            .value
    })
}

fn bump_profile(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

impl Density {
    /// Uniform density on `[lo, hi)`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        check_interval(lo, hi)?;
        let height = 1.0 / (hi - lo);
        Ok(Self {
            lo,
            hi,
            eval: Arc::new(move |x| if x >= lo && x < hi { height } else { 0.0 }),
            breaks: vec![],
        })
    }

    /// Smooth bump `C exp(-1 / (1 - ((x - center) / half_width)^2))`, unit mass.
    pub fn bump(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite() && center.is_finite()) {
            return Err(Error::InvalidInterval(format!(
                "bump half-width must be positive, got {half_width}"
            )));
        }
        let scale = 1.0 / (half_width * bump_integral());
        Ok(Self {
            lo: center - half_width,
            hi: center + half_width,
            eval: Arc::new(move |x| scale * bump_profile((x - center) / half_width)),
            breaks: vec![],
        })
    }

    /// Wraps an arbitrary evaluator that vanishes outside `[lo, hi]`; rejects
    /// it unless its mass is one within [`MASS_TOL`].
    pub fn from_fn<F>(lo: f64, hi: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_interval(lo, hi)?;
        let density = Self::wrap(lo, hi, f);
        let mass = density.mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::NotNormalized(mass));
        }
        Ok(density)
    }

    /// Divides a nonnegative integrable function by its mass.
    pub fn normalized<F>(lo: f64, hi: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::normalized_with_breaks(lo, hi, f, vec![])
    }

    pub fn normalized_with_breaks<F>(lo: f64, hi: f64, f: F, breaks: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_interval(lo, hi)?;
        let raw = Self {
            breaks,
            ..Self::wrap(lo, hi, f)
        };
        let mass = raw.mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::NotNormalized(mass));
        }
        let inner = raw.eval.clone();
        Ok(Self {
            eval: Arc::new(move |x| inner(x) / mass),
            ..raw
        })
    }

    fn wrap<F>(lo: f64, hi: f64, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            lo,
            hi,
            eval: Arc::new(move |x| if x >= lo && x <= hi { f(x) } else { 0.0 }),
            breaks: vec![],
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// `∫ p` by adaptive Gauss–Kronrod quadrature.
    pub fn mass(&self) -> f64 {
        let mut breaks = vec![self.lo];
        breaks.extend(self.breaks.iter().copied().filter(|&b| b > self.lo && b < self.hi));
        breaks.push(self.hi);
        breaks.sort_by(f64::total_cmp);
        let eval = self.eval.clone();
        Quadrature::with_tolerance(1e-12, 1e-11)
            .integrate_with_breaks(move |x| eval(x), &breaks)
            .value
    }

    /// `x ↦ p(x - shift)`.
    pub fn translate(&self, shift: f64) -> Density {
        let inner = self.eval.clone();
        Density {
            lo: self.lo + shift,
            hi: self.hi + shift,
            eval: Arc::new(move |x| inner(x - shift)),
            breaks: self.breaks.iter().map(|b| b + shift).collect(),
        }
    }

    /// `x ↦ p(about + (x - about) / factor) / factor`, which keeps unit mass.
    pub fn dilate(&self, factor: f64, about: f64) -> Result<Density> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidInterval(format!(
                "dilation factor must be positive, got {factor}"
            )));
        }
        if factor == 1.0 {
            return Ok(self.clone());
        }
        let inner = self.eval.clone();
        let map = move |x: f64| about + factor * (x - about);
        Ok(Density {
            lo: map(self.lo),
            hi: map(self.hi),
            eval: Arc::new(move |x| inner(about + (x - about) / factor) / factor),
            breaks: self.breaks.iter().map(|&b| map(b)).collect(),
        })
    }
}

/// Function values on a uniform grid `origin + k * spacing`.
///
/// When produced by [`sample_for_dwt`] the values are scaled by
/// `2^(-(j0+M)/2)` and approximate the approximation coefficients at level
/// `j0 + M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDensity {
    pub origin: f64,
    pub spacing: f64,
    pub values: Vec<f64>,
    pub scale_factor_applied: bool,
}

impl SampledDensity {
    pub fn grid_point(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.spacing
    }

    /// Left Riemann sum of the (unscaled) samples.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing
    }

    /// Piecewise-linear interpolation; zero outside the grid.
    pub fn eval_linear(&self, x: f64) -> f64 {
        let t = (x - self.origin) / self.spacing;
        if t < 0.0 || !t.is_finite() {
            return 0.0;
        }
        let i = t.floor() as usize;
        let frac = t - i as f64;
        match (self.values.get(i), self.values.get(i + 1)) {
            (Some(&a), Some(&b)) => a + frac * (b - a),
            (Some(&a), None) if frac == 0.0 => a,
            _ => 0.0,
        }
    }
}

fn check_dyadic_domain(d: &Density, j0: i32, levels: u32) -> Result<f64> {
    if !(1..=30).contains(&levels) {
        return Err(Error::InvalidGrid(format!(
            "number of levels must be in 1..=30, got {levels}"
        )));
    }
    let limit = (-(j0 as f64)).exp2();
    let (lo, hi) = d.support();
    let slack = 1e-12 * limit.max(1.0);
    if lo < -slack || hi > limit + slack {
        return Err(Error::DomainOverflow { lo, hi, limit });
    }
    Ok(limit)
}

/// Samples `d` at `2^-(j0+M) k`, `k = 0 .. 2^M - 1`, times `2^-(j0+M)/2`.
pub fn sample_for_dwt(d: &Density, j0: i32, levels: u32) -> Result<SampledDensity> {
    check_dyadic_domain(d, j0, levels)?;
    Ok(sample_with(j0, levels, |x| d.eval(x)))
}

/// Samples `p - q` on the same grid as [`sample_for_dwt`].
pub fn sample_difference_for_dwt(
    p: &Density,
    q: &Density,
    j0: i32,
    levels: u32,
) -> Result<SampledDensity> {
    check_dyadic_domain(p, j0, levels)?;
    check_dyadic_domain(q, j0, levels)?;
    Ok(sample_with(j0, levels, |x| p.eval(x) - q.eval(x)))
}

fn sample_with(j0: i32, levels: u32, f: impl Fn(f64) -> f64) -> SampledDensity {
    let top = j0 + levels as i32;
    let spacing = (-(top as f64)).exp2();
    let scale = (-(top as f64) / 2.0).exp2();
    let values = (0..1usize << levels)
        .map(|k| scale * f(k as f64 * spacing))
        .collect();
    SampledDensity {
        origin: 0.0,
        spacing,
        values,
        scale_factor_applied: true,
    }
}

/// Weighted point masses with strictly increasing positions and unit mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    positions: Vec<f64>,
    weights: Vec<f64>,
}

pub(crate) const WEIGHT_SUM_TOL: f64 = 1e-12;

impl DiscreteMeasure {
    pub fn new(positions: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let m = Self::unchecked_mass(positions, weights)?;
        let total = m.total_mass();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(m)
    }

    /// Rescales nonnegative masses to sum to one.
    pub fn from_masses(positions: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        let m = Self::unchecked_mass(positions, masses)?;
        let total = m.total_mass();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidMeasure(format!("total mass is {total}")));
        }
        Ok(Self {
            weights: m.weights.iter().map(|w| w / total).collect(),
            ..m
        })
    }

    /// A single atom of mass one.
    pub fn dirac(x: f64) -> Self {
        Self {
            positions: vec![x],
            weights: vec![1.0],
        }
    }

    fn unchecked_mass(positions: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if positions.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} positions but {} weights",
                positions.len(),
                weights.len()
            )));
        }
        if positions.iter().any(|x| !x.is_finite()) || positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMeasure("positions must be finite and strictly increasing".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidMeasure("weights must be finite and nonnegative".into()));
        }
        Ok(Self { positions, weights })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn translate(&self, shift: f64) -> Self {
        Self {
            positions: self.positions.iter().map(|x| x + shift).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// Point masses on `num_points` evenly spaced nodes of `[lo, hi]` (endpoints
/// included) with weights proportional to the density, renormalized.
pub fn discretize(d: &Density, domain: (f64, f64), num_points: usize) -> Result<DiscreteMeasure> {
    if num_points < 2 {
        return Err(Error::InvalidGrid(format!(
            "at least two grid points are required, got {num_points}"
        )));
    }
    let (lo, hi) = domain;
    check_interval(lo, hi).map_err(|_| Error::InvalidGrid(format!("domain [{lo}, {hi}]")))?;
    let step = (hi - lo) / (num_points - 1) as f64;
    let positions: Vec<f64> = (0..num_points).map(|i| lo + i as f64 * step).collect();
    let masses: Vec<f64> = positions.iter().map(|&x| d.eval(x)).collect();
    if masses.iter().all(|&m| m == 0.0) {
        return Err(Error::InvalidGrid("density vanishes at every grid point".into()));
    }
    DiscreteMeasure::from_masses(positions, masses)
}
