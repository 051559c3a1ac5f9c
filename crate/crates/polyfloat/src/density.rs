//! Log-concave density models in one and several dimensions.
//!
//! One-dimensional densities expose the exact cumulative machinery used by
//! the Gnedenko analysis: the distribution function J, the convex function
//! u = -log(1 - J), quantiles by monotone bisection and the interval
//! probability (1-a/n)^n - (1-b/n)^n for the sample maximum.
//!
//! Multivariate densities expose directional tails μ{<x,θ> >= t}, directional
//! quantiles and hyperplane (Radon) values through per-class backends:
//! closed form where available, then radial reduction, then convolution
//! quadrature for products along general directions, then adaptive cubature
//! for general densities in dimension <= 3. Numerical derivatives are never
//! used: Radon values always come from a backend's direct marginal formula.

use crate::numeric::{
    bisect_decreasing, dot, integrate_real_line, integrate_to_infinity, ln_integral_log_concave,
    nelder_mead, norm, sphere_surface,
};
use serde::{Deserialize, Serialize};
use special::Error as Erf;
use special::Gamma;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::sync::{Arc, OnceLock};

#[derive(Debug, Clone, thiserror::Error)]
pub enum DensityError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported density/backend combination: {0}")]
    UnsupportedDensity(String),
    #[error("parameter regime violation: {0}")]
    ParameterRegime(String),
    #[error("out of proven domain: {0}")]
    OutOfDomain(String),
    #[error(transparent)]
    Numeric(#[from] crate::numeric::NumericError),
}

/// `∫_t^∞ e^{-s^p} ds`, with full relative accuracy deep in the tail.
pub fn exp_power_upper_integral(p: f64, t: f64) -> f64 {
    ln_exp_power_upper_integral(p, t).exp()
}

/// `log ∫_t^∞ e^{-s^p} ds`, finite far beyond f64 tail underflow.
pub fn ln_exp_power_upper_integral(p: f64, t: f64) -> f64 {
    let t0 = t.max(0.0);
    let scale = (1.0 / (p * t0.max(1.0).powf(p - 1.0))).min(1.0);
    let ln_right = ln_integral_log_concave(|s| -s.powf(p), t0, f64::INFINITY, t0, scale);
    if t >= 0.0 {
        ln_right
    } else {
        // add the finite piece [t, 0]
        let left = ln_integral_log_concave(|s| -(-s).powf(p), t, 0.0, t, scale);
        stable_ln_add(ln_right, left)
    }
}

/// log(e^a + e^b) without overflow.
fn stable_ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if !hi.is_finite() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// One-dimensional non-vanishing log-concave models, plus the compactly
/// supported uniform density used by convex floating bodies.
#[derive(Debug, Clone)]
pub enum Density1D {
    /// Standard normal.
    Gaussian,
    /// Density `e^{-|t|^p} / (2 half_mass)`; `half_mass` is computed
    /// numerically at construction.
    ExpPower { p: f64, half_mass: f64 },
    /// Uniform on `[a, b]`.
    Uniform { a: f64, b: f64 },
}

impl Density1D {
    pub fn gaussian() -> Density1D {
        Density1D::Gaussian
    }

    pub fn exp_power(p: f64) -> Result<Density1D, DensityError> {
        if !(p >= 1.0) {
            return Err(DensityError::InvalidParameter(format!(
                "exponential power requires p >= 1, got {p}"
            )));
        }
        Ok(Density1D::ExpPower {
            p,
            half_mass: exp_power_upper_integral(p, 0.0),
        })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Density1D, DensityError> {
        if !(b > a) {
            return Err(DensityError::InvalidParameter("uniform needs b > a".into()));
        }
        Ok(Density1D::Uniform { a, b })
    }

    pub fn pdf(&self, t: f64) -> f64 {
        match self {
            Density1D::Gaussian => (-0.5 * t * t).exp() / (2.0 * PI).sqrt(),
            Density1D::ExpPower { p, half_mass } => {
                (-t.abs().powf(*p)).exp() / (2.0 * half_mass)
            }
            Density1D::Uniform { a, b } => {
                if t >= *a && t <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
        }
    }

    /// Log density, `-inf` outside the support.
    pub fn ln_pdf(&self, t: f64) -> f64 {
        match self {
            Density1D::Gaussian => -0.5 * t * t - 0.5 * (2.0 * PI).ln(),
            Density1D::ExpPower { p, half_mass } => {
                -t.abs().powf(*p) - (2.0 * half_mass).ln()
            }
            Density1D::Uniform { a, b } => {
                if t >= *a && t <= *b {
                    -(b - a).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Support interval (infinite for the non-vanishing models).
    pub fn support(&self) -> (f64, f64) {
        match self {
            Density1D::Uniform { a, b } => (*a, *b),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Log upper tail, finite beyond f64 underflow of the tail itself.
    pub fn ln_tail(&self, t: f64) -> f64 {
        match self {
            Density1D::Gaussian => (0.5 * (t * FRAC_1_SQRT_2).compl_error()).ln(),
            Density1D::ExpPower { p, half_mass } => {
                if t >= 0.0 {
                    ln_exp_power_upper_integral(*p, t) - (2.0 * half_mass).ln()
                } else {
                    let upper =
                        ln_exp_power_upper_integral(*p, -t) - (2.0 * half_mass).ln();
                    (-upper.exp()).ln_1p()
                }
            }
            Density1D::Uniform { a, b } => {
                if t <= *a {
                    0.0
                } else if t >= *b {
                    f64::NEG_INFINITY
                } else {
                    ((b - t) / (b - a)).ln()
                }
            }
        }
    }

    /// Upper tail `1 - J(t)`, computed directly for precision.
    pub fn tail(&self, t: f64) -> f64 {
        match self {
            Density1D::Gaussian => 0.5 * (t * FRAC_1_SQRT_2).compl_error(),
            Density1D::ExpPower { .. } => self.ln_tail(t).exp(),
            Density1D::Uniform { a, b } => {
                if t <= *a {
                    1.0
                } else if t >= *b {
                    0.0
                } else {
                    (b - t) / (b - a)
                }
            }
        }
    }

    /// Cumulative distribution function J.
    pub fn cdf(&self, t: f64) -> f64 {
        1.0 - self.tail(t)
    }

    /// `u(t) = -log(1 - J(t))`, evaluated in log space where the tail would
    /// underflow.
    pub fn u(&self, t: f64) -> f64 {
        -self.ln_tail(t)
    }

    pub fn mean(&self) -> f64 {
        match self {
            Density1D::Gaussian | Density1D::ExpPower { .. } => 0.0,
            Density1D::Uniform { a, b } => 0.5 * (a + b),
        }
    }

    fn scale_hint(&self) -> f64 {
        match self {
            Density1D::Gaussian => 1.0,
            Density1D::ExpPower { .. } => 1.0,
            Density1D::Uniform { a, b } => 0.5 * (b - a),
        }
    }

    /// Quantile by monotone bisection on the tail, terminating at an interval
    /// of width 1e-12 times the interquartile range.
    pub fn quantile(&self, q: f64) -> Result<f64, DensityError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(DensityError::InvalidParameter(format!(
                "quantile level must lie in (0,1), got {q}"
            )));
        }
        if let Density1D::Uniform { a, b } = self {
            return Ok(a + q * (b - a));
        }
        let rough = |level: f64| {
            bisect_decreasing(|t| self.tail(t), level, self.mean(), self.scale_hint(), 1e-8)
        };
        let iqr = (rough(0.25)? - rough(0.75)?).abs().max(1e-6);
        Ok(bisect_decreasing(
            |t| self.tail(t),
            1.0 - q,
            self.mean(),
            self.scale_hint(),
            1e-12 * iqr,
        )?)
    }

    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Density1D::Gaussian => rng.sample(rand_distr::StandardNormal),
            Density1D::ExpPower { p, .. } => {
                let gamma = rand_distr::Gamma::new(1.0 / p, 1.0).expect("valid gamma shape");
                let g: f64 = rng.sample(gamma);
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                sign * g.powf(1.0 / p)
            }
            Density1D::Uniform { a, b } => a + (b - a) * rng.gen::<f64>(),
        }
    }
}

/// Max convexity violation `-(u(t_{i-1}) - 2 u(t_i) + u(t_{i+1}))` of
/// `u = -log(1-J)` over the interior points of `grid`.
pub fn u_convexity_report(density: &Density1D, grid: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for w in grid.windows(3) {
        let second = density.u(w[0]) - 2.0 * density.u(w[1]) + density.u(w[2]);
        worst = worst.max(-second);
    }
    worst
}

/// Quantile interval for the sample maximum: `[J^{-1}(1-b/n), J^{-1}(1-a/n)]`
/// with `a = (log n)^{-q}`, `b = q log n`, together with the exact
/// containment probability and the convexity-transfer ratio bound.
#[derive(Debug, Clone)]
pub struct GnedenkoInterval {
    pub a: f64,
    pub b: f64,
    pub lo: f64,
    pub hi: f64,
    pub prob: f64,
    /// `(log b - log a) / (log n - log b - 1)`; infinite when the denominator
    /// is not positive (n below the regime where the bound is meaningful).
    pub ratio_bound: f64,
}

/// Exact probability that all n draws miss both tails:
/// `(1 - a/n)^n - (1 - b/n)^n`.
pub fn gnedenko_probability(a: f64, b: f64, n: u64) -> f64 {
    let n_f = n as f64;
    (1.0 - a / n_f).powi(n as i32) - (1.0 - b / n_f).powi(n as i32)
}

pub fn gnedenko_interval(
    density: &Density1D,
    n: u64,
    q: f64,
) -> Result<GnedenkoInterval, DensityError> {
    if n < 3 {
        return Err(DensityError::InvalidParameter("need n >= 3".into()));
    }
    if !(q > 0.0) {
        return Err(DensityError::InvalidParameter("need q > 0".into()));
    }
    let log_n = (n as f64).ln();
    let a = log_n.powf(-q);
    let b = q * log_n;
    if a >= 1.0 {
        return Err(DensityError::ParameterRegime(format!(
            "a = (log n)^-q = {a} >= 1; n too small for q = {q}"
        )));
    }
    if b >= n as f64 {
        return Err(DensityError::ParameterRegime(format!(
            "b = q log n = {b} >= n = {n}"
        )));
    }
    let lo = density.quantile(1.0 - b / n as f64)?;
    let hi = density.quantile(1.0 - a / n as f64)?;
    let denom = log_n - b.ln() - 1.0;
    Ok(GnedenkoInterval {
        a,
        b,
        lo,
        hi,
        prob: gnedenko_probability(a, b, n),
        ratio_bound: if denom > 0.0 {
            (b.ln() - a.ln()) / denom
        } else {
            f64::INFINITY
        },
    })
}

/// Bracket `(2p-1)^{-1} t^{1-p} e^{-t^p} <= ∫_t^∞ e^{-s^p} ds <= p^{-1} t^{1-p} e^{-t^p}`,
/// valid for `t >= 1`.
pub fn tail_bracket(p: f64, t: f64) -> Result<(f64, f64), DensityError> {
    if !(p >= 1.0) {
        return Err(DensityError::InvalidParameter(format!("need p >= 1, got {p}")));
    }
    if !(t >= 1.0) {
        return Err(DensityError::OutOfDomain(format!(
            "the sandwich bound is proven for t >= 1 only, got {t}"
        )));
    }
    let core = t.powf(1.0 - p) * (-t.powf(p)).exp();
    Ok((core / (2.0 * p - 1.0), core / p))
}

#[derive(Clone)]
enum NdKind {
    Gaussian,
    SchechtmanZinn { p: f64, c1: f64 },
    Radial { p: f64, scale: f64, log_amp: f64 },
    Product { coords: Arc<Vec<Density1D>> },
    General {
        neg_log: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        mode: Vec<f64>,
        log_mass: f64,
    },
}

/// A log-concave probability density on R^dim.
#[derive(Clone)]
pub struct DensityND {
    dim: usize,
    kind: NdKind,
}

impl fmt::Debug for DensityND {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityND(dim={}, class={})", self.dim, self.class_name())
    }
}

impl DensityND {
    pub fn standard_gaussian(dim: usize) -> DensityND {
        DensityND {
            dim,
            kind: NdKind::Gaussian,
        }
    }

    /// Density `c1^d e^{-||x||_p^p}` with the one-dimensional normalizer `c1`
    /// computed numerically, never assumed.
    pub fn schechtman_zinn(p: f64, dim: usize) -> Result<DensityND, DensityError> {
        if !(p >= 1.0) {
            return Err(DensityError::InvalidParameter(format!("need p >= 1, got {p}")));
        }
        let c1 = 1.0 / (2.0 * exp_power_upper_integral(p, 0.0));
        Ok(DensityND {
            dim,
            kind: NdKind::SchechtmanZinn { p, c1 },
        })
    }

    /// Radial density `C e^{-(||x||/scale)^p}` with C chosen so the mass is 1.
    pub fn radial_exp_power(p: f64, scale: f64, dim: usize) -> Result<DensityND, DensityError> {
        if !(p >= 1.0) || !(scale > 0.0) || dim < 1 {
            return Err(DensityError::InvalidParameter(
                "radial class needs p >= 1, scale > 0, dim >= 1".into(),
            ));
        }
        let d_over_p = dim as f64 / p;
        let log_amp =
            (p / (sphere_surface(dim - 1) * scale.powi(dim as i32) * Gamma::gamma(d_over_p))).ln();
        Ok(DensityND {
            dim,
            kind: NdKind::Radial { p, scale, log_amp },
        })
    }

    pub fn product(coords: Vec<Density1D>) -> Result<DensityND, DensityError> {
        if coords.is_empty() {
            return Err(DensityError::InvalidParameter("empty product".into()));
        }
        Ok(DensityND {
            dim: coords.len(),
            kind: NdKind::Product {
                coords: Arc::new(coords),
            },
        })
    }

    /// General log-concave density `e^{-g(x)} / Z` for a caller-supplied
    /// convex `g` with a finite starting point; `dim <= 3`. The mode is
    /// polished by downhill search from the supplied point and the mass Z is
    /// integrated numerically unless the caller asserts `normalized`.
    pub fn general<G>(
        dim: usize,
        neg_log: G,
        mode_hint: &[f64],
        normalized: bool,
    ) -> Result<DensityND, DensityError>
    where
        G: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 || dim > 3 {
            return Err(DensityError::UnsupportedDensity(format!(
                "general class supports dim 1..=3, got {dim}"
            )));
        }
        if mode_hint.len() != dim || !neg_log(mode_hint).is_finite() {
            return Err(DensityError::InvalidParameter(
                "mode hint must have the right dimension and finite g".into(),
            ));
        }
        let g = Arc::new(neg_log);
        let (mode, _) = nelder_mead(|x| g(x), mode_hint, 0.5, 600);
        let log_mass = if normalized {
            0.0
        } else {
            let gc = g.clone();
            let mass = match dim {
                1 => integrate_real_line(|t| (-gc(&[t])).exp(), mode[0], 1.0, 1e-10),
                2 => integrate_real_line(
                    |x| {
                        let gc = gc.clone();
                        integrate_real_line(move |y| (-gc(&[x, y])).exp(), mode[1], 1.0, 1e-9)
                    },
                    mode[0],
                    1.0,
                    1e-9,
                ),
                _ => {
                    let m1 = mode[1];
                    let m2 = mode[2];
                    integrate_real_line(
                        |x| {
                            let gc = gc.clone();
                            integrate_real_line(
                                move |y| {
                                    let gc = gc.clone();
                                    integrate_real_line(
                                        move |z| (-gc(&[x, y, z])).exp(),
                                        m2,
                                        1.0,
                                        1e-8,
                                    )
                                },
                                m1,
                                1.0,
                                1e-8,
                            )
                        },
                        mode[0],
                        1.0,
                        1e-8,
                    )
                }
            };
            mass.ln()
        };
        Ok(DensityND {
            dim,
            kind: NdKind::General {
                neg_log: g,
                mode,
                log_mass,
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class_name(&self) -> &'static str {
        match &self.kind {
            NdKind::Gaussian => "gaussian",
            NdKind::SchechtmanZinn { .. } => "sz",
            NdKind::Radial { .. } => "radial",
            NdKind::Product { .. } => "product",
            NdKind::General { .. } => "general",
        }
    }

    /// The numerically computed Schechtman-Zinn 1-D normalizer, if any.
    pub fn sz_normalizer(&self) -> Option<f64> {
        match &self.kind {
            NdKind::SchechtmanZinn { c1, .. } => Some(*c1),
            _ => None,
        }
    }

    pub fn sz_p(&self) -> Option<f64> {
        match &self.kind {
            NdKind::SchechtmanZinn { p, .. } => Some(*p),
            _ => None,
        }
    }

    pub fn radial_params(&self) -> Option<(f64, f64)> {
        match &self.kind {
            NdKind::Radial { p, scale, .. } => Some((*p, *scale)),
            _ => None,
        }
    }

    pub fn product_coords(&self) -> Option<Vec<Density1D>> {
        match &self.kind {
            NdKind::Product { coords } => Some(coords.as_ref().clone()),
            _ => None,
        }
    }

    /// Negative log density without normalization, where available.
    pub fn neg_log_unnormalized(&self, x: &[f64]) -> f64 {
        match &self.kind {
            NdKind::General { neg_log, .. } => neg_log(x),
            _ => -self.log_density(x),
        }
    }

    pub fn mode(&self) -> Vec<f64> {
        match &self.kind {
            NdKind::General { mode, .. } => mode.clone(),
            NdKind::Product { coords } => coords
                .iter()
                .map(|c| match c {
                    Density1D::Uniform { a, b } => 0.5 * (a + b),
                    _ => 0.0,
                })
                .collect(),
            _ => vec![0.0; self.dim],
        }
    }

    /// Directional tails do not depend on the direction for these classes.
    pub fn is_isotropic(&self) -> bool {
        match &self.kind {
            NdKind::Gaussian | NdKind::Radial { .. } => true,
            NdKind::SchechtmanZinn { p, .. } => (*p - 2.0).abs() < 1e-14,
            _ => false,
        }
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        match &self.kind {
            NdKind::Gaussian => {
                -0.5 * dot(x, x) - 0.5 * self.dim as f64 * (2.0 * PI).ln()
            }
            NdKind::SchechtmanZinn { p, c1 } => {
                let s: f64 = x.iter().map(|v| v.abs().powf(*p)).sum();
                self.dim as f64 * c1.ln() - s
            }
            NdKind::Radial { p, scale, log_amp } => log_amp - (norm(x) / scale).powf(*p),
            NdKind::Product { coords } => x
                .iter()
                .zip(coords.iter())
                .map(|(v, c)| c.pdf(*v).ln())
                .sum(),
            NdKind::General {
                neg_log, log_mass, ..
            } => -neg_log(x) - log_mass,
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }

    /// Marginal model of `<x, θ>`: tail, density (Radon value) and quantile.
    pub fn marginal(&self, theta: &[f64]) -> Result<Marginal, DensityError> {
        if theta.len() != self.dim {
            return Err(DensityError::InvalidParameter("direction has wrong dimension".into()));
        }
        let r = norm(theta);
        if !(r > 0.0) {
            return Err(DensityError::InvalidParameter("direction must be nonzero".into()));
        }
        let unit: Vec<f64> = theta.iter().map(|v| v / r).collect();
        let backend = match &self.kind {
            NdKind::Gaussian => MarginalBackend::GaussianLine { sigma: 1.0 },
            NdKind::SchechtmanZinn { p, c1: _ } if (*p - 2.0).abs() < 1e-14 => {
                MarginalBackend::GaussianLine {
                    sigma: FRAC_1_SQRT_2,
                }
            }
            NdKind::SchechtmanZinn { p, .. } => {
                let coords: Vec<Density1D> =
                    (0..self.dim).map(|_| Density1D::exp_power(*p)).collect::<Result<_, _>>()?;
                weighted_sum_backend(&unit, &coords)?
            }
            NdKind::Product { coords } => weighted_sum_backend(&unit, coords)?,
            NdKind::Radial { p, scale, log_amp } => {
                if self.dim == 1 {
                    MarginalBackend::Radial1D {
                        p: *p,
                        scale: *scale,
                        log_amp: *log_amp,
                    }
                } else {
                    MarginalBackend::RadialReduction {
                        p: *p,
                        scale: *scale,
                        log_amp: *log_amp,
                        dim: self.dim,
                    }
                }
            }
            NdKind::General {
                neg_log,
                mode,
                log_mass,
            } => MarginalBackend::Cubature {
                neg_log: neg_log.clone(),
                basis: complete_basis(&unit),
                dim: self.dim,
                mode_t: dot(mode, &unit),
                log_mass: *log_mass,
            },
        };
        Ok(Marginal {
            theta: unit,
            backend,
            scale: OnceLock::new(),
        })
    }

    /// μ{x : <x, θ> >= t}.
    pub fn tail(&self, theta: &[f64], t: f64) -> Result<f64, DensityError> {
        Ok(self.marginal(theta)?.tail(t))
    }

    /// t with tail(θ, t) = 1 - q.
    pub fn quantile(&self, theta: &[f64], q: f64) -> Result<f64, DensityError> {
        self.marginal(theta)?.quantile(q)
    }

    /// Radon value of the hyperplane `<x, θ> = t`: the marginal density at t.
    pub fn radon(&self, theta: &[f64], t: f64) -> Result<f64, DensityError> {
        Ok(self.marginal(theta)?.density(t))
    }
}

fn weighted_sum_backend(
    unit: &[f64],
    coords: &[Density1D],
) -> Result<MarginalBackend, DensityError> {
    let mut comps: Vec<(f64, Density1D)> = unit
        .iter()
        .zip(coords.iter())
        .filter(|(w, _)| w.abs() > 1e-14)
        .map(|(w, c)| (*w, c.clone()))
        .collect();
    if comps.is_empty() {
        return Err(DensityError::InvalidParameter("direction must be nonzero".into()));
    }
    // all-Gaussian sums collapse to a closed form
    if comps.iter().all(|(_, c)| matches!(c, Density1D::Gaussian)) {
        let sigma = comps.iter().map(|(w, _)| w * w).sum::<f64>().sqrt();
        return Ok(MarginalBackend::GaussianLine { sigma });
    }
    comps.sort_by(|a, b| b.0.abs().partial_cmp(&a.0.abs()).unwrap());
    if comps.len() == 1 {
        let (w, c) = comps.pop().unwrap();
        return Ok(MarginalBackend::Coordinate { w, coord: c });
    }
    Ok(MarginalBackend::WeightedSum { comps })
}

/// Orthonormal completion of a unit vector to a basis; returns the
/// complementary vectors flattened.
fn complete_basis(unit: &[f64]) -> Vec<f64> {
    let dim = unit.len();
    let mut basis: Vec<Vec<f64>> = vec![unit.to_vec()];
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut cand = vec![0.0; dim];
        cand[i] = 1.0;
        for b in &basis {
            let c = dot(&cand, b);
            for (x, y) in cand.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let r = norm(&cand);
        if r > 1e-8 {
            for x in cand.iter_mut() {
                *x /= r;
            }
            basis.push(cand);
        }
    }
    basis[1..].concat()
}

enum MarginalBackend {
    GaussianLine {
        sigma: f64,
    },
    Coordinate {
        w: f64,
        coord: Density1D,
    },
    WeightedSum {
        comps: Vec<(f64, Density1D)>,
    },
    Radial1D {
        p: f64,
        scale: f64,
        log_amp: f64,
    },
    RadialReduction {
        p: f64,
        scale: f64,
        log_amp: f64,
        dim: usize,
    },
    Cubature {
        neg_log: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        basis: Vec<f64>,
        dim: usize,
        mode_t: f64,
        log_mass: f64,
    },
}

/// Directional marginal of a [`DensityND`]: a one-dimensional log-concave
/// model with tail, density and quantile evaluations.
pub struct Marginal {
    theta: Vec<f64>,
    backend: MarginalBackend,
    scale: OnceLock<f64>,
}

impl Marginal {
    pub fn direction(&self) -> &[f64] {
        &self.theta
    }

    pub fn backend_name(&self) -> &'static str {
        match &self.backend {
            MarginalBackend::GaussianLine { .. } | MarginalBackend::Coordinate { .. } => {
                "closed-form"
            }
            MarginalBackend::WeightedSum { .. } => "convolution-quadrature",
            MarginalBackend::Radial1D { .. } | MarginalBackend::RadialReduction { .. } => {
                "radial-reduction"
            }
            MarginalBackend::Cubature { .. } => "cubature",
        }
    }

    /// Marginal density at t (equals the Radon value of the hyperplane).
    pub fn density(&self, t: f64) -> f64 {
        match &self.backend {
            MarginalBackend::GaussianLine { sigma } => {
                (-0.5 * (t / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
            }
            MarginalBackend::Coordinate { w, coord } => coord.pdf(t / w) / w.abs(),
            MarginalBackend::WeightedSum { comps } => weighted_sum_density(comps, t),
            MarginalBackend::Radial1D { p, scale, log_amp } => {
                (log_amp - (t.abs() / scale).powf(*p)).exp()
            }
            MarginalBackend::RadialReduction {
                p,
                scale,
                log_amp,
                dim,
            } => radial_marginal_density(*p, *scale, *log_amp, *dim, t),
            MarginalBackend::Cubature {
                neg_log,
                basis,
                dim,
                log_mass,
                ..
            } => cubature_marginal_density(neg_log, &self.theta, basis, *dim, t) * (-log_mass).exp(),
        }
    }

    /// Upper tail `P(<x, θ> >= t)`.
    pub fn tail(&self, t: f64) -> f64 {
        match &self.backend {
            MarginalBackend::GaussianLine { sigma } => {
                0.5 * (t / (sigma * SQRT_2)).compl_error()
            }
            MarginalBackend::Coordinate { w, coord } => {
                if *w > 0.0 {
                    coord.tail(t / w)
                } else {
                    coord.cdf(t / w)
                }
            }
            MarginalBackend::WeightedSum { comps } => weighted_sum_tail(comps, t),
            MarginalBackend::Radial1D { p, scale, .. } => {
                let d = Density1D::ExpPower {
                    p: *p,
                    half_mass: exp_power_upper_integral(*p, 0.0),
                };
                d.tail(t / scale)
            }
            MarginalBackend::RadialReduction {
                p,
                scale,
                log_amp,
                dim,
            } => {
                if t < 0.0 {
                    1.0 - radial_marginal_tail(*p, *scale, *log_amp, *dim, -t)
                } else {
                    radial_marginal_tail(*p, *scale, *log_amp, *dim, t)
                }
            }
            MarginalBackend::Cubature {
                neg_log,
                basis,
                dim,
                mode_t,
                log_mass,
            } => {
                let f = |s: f64| cubature_marginal_density(neg_log, &self.theta, basis, *dim, s);
                let z = (-log_mass).exp();
                if t >= *mode_t {
                    z * integrate_to_infinity(f, t, 1.0, 1e-9)
                } else {
                    1.0 - z * integrate_to_infinity(|u| f(t - u), 0.0, 1.0, 1e-9)
                }
            }
        }
    }

    fn scale_estimate(&self) -> f64 {
        *self.scale.get_or_init(|| {
            let q = |level: f64| {
                bisect_decreasing(|t| self.tail(t), level, 0.0, 1.0, 1e-6).unwrap_or(0.0)
            };
            (q(0.25) - q(0.75)).abs().max(1e-6)
        })
    }

    /// t with tail(t) = 1 - q, by monotone bisection to 1e-12 of scale.
    pub fn quantile(&self, q: f64) -> Result<f64, DensityError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(DensityError::InvalidParameter(format!(
                "quantile level must lie in (0,1), got {q}"
            )));
        }
        let scale = self.scale_estimate();
        Ok(bisect_decreasing(
            |t| self.tail(t),
            1.0 - q,
            0.0,
            scale.max(1.0),
            1e-12 * scale,
        )?)
    }
}

/// Log tail of a weighted sum of independent coordinates, by nested
/// log-concave quadrature: the innermost factor is a closed-form coordinate
/// tail, every outer level integrates `pdf_k(y) · tail_rest(t - w_k y)`.
fn ln_weighted_sum_tail(comps: &[(f64, Density1D)], t: f64) -> f64 {
    if comps.len() == 1 {
        let (w, c) = &comps[0];
        return if *w > 0.0 {
            c.ln_tail(t / w)
        } else {
            c.cdf(t / w).ln()
        };
    }
    let (w, c) = &comps[comps.len() - 1];
    let rest = &comps[..comps.len() - 1];
    let (lo, hi) = c.support();
    ln_integral_log_concave(
        |y| c.ln_pdf(y) + ln_weighted_sum_tail(rest, t - w * y),
        lo,
        hi,
        c.mean(),
        c.scale_hint(),
    )
}

fn weighted_sum_tail(comps: &[(f64, Density1D)], t: f64) -> f64 {
    ln_weighted_sum_tail(comps, t).exp().clamp(0.0, 1.0)
}

fn ln_weighted_sum_density(comps: &[(f64, Density1D)], t: f64) -> f64 {
    if comps.len() == 1 {
        let (w, c) = &comps[0];
        return c.ln_pdf(t / w) - w.abs().ln();
    }
    let (w, c) = &comps[comps.len() - 1];
    let rest = &comps[..comps.len() - 1];
    let (lo, hi) = c.support();
    ln_integral_log_concave(
        |y| c.ln_pdf(y) + ln_weighted_sum_density(rest, t - w * y),
        lo,
        hi,
        c.mean(),
        c.scale_hint(),
    )
}

fn weighted_sum_density(comps: &[(f64, Density1D)], t: f64) -> f64 {
    ln_weighted_sum_density(comps, t).exp()
}

/// Radial reduction: `f_θ(s) = σ_{d-2} ∫_0^∞ r^{d-2} φ(√(s²+r²)) dr`.
fn ln_radial_marginal_density(p: f64, scale: f64, log_amp: f64, dim: usize, s: f64) -> f64 {
    let sigma = sphere_surface(dim - 2);
    let m = (dim - 2) as f64;
    sigma.ln()
        + ln_integral_log_concave(
            |r| {
                let rad = (s * s + r * r).sqrt();
                let radial_term = if m > 0.0 { m * r.ln() } else { 0.0 };
                radial_term + log_amp - (rad / scale).powf(p)
            },
            0.0,
            f64::INFINITY,
            0.5 * scale,
            scale,
        )
}

fn radial_marginal_density(p: f64, scale: f64, log_amp: f64, dim: usize, s: f64) -> f64 {
    ln_radial_marginal_density(p, scale, log_amp, dim, s).exp()
}

fn radial_marginal_tail(p: f64, scale: f64, log_amp: f64, dim: usize, t: f64) -> f64 {
    ln_integral_log_concave(
        |s| ln_radial_marginal_density(p, scale, log_amp, dim, s),
        t,
        f64::INFINITY,
        t,
        scale,
    )
    .exp()
}

/// Hyperplane integral of a general density over `<x, θ> = t`.
fn cubature_marginal_density(
    neg_log: &Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    theta: &[f64],
    basis: &[f64],
    dim: usize,
    t: f64,
) -> f64 {
    match dim {
        1 => (-neg_log(&[t * theta[0]])).exp(),
        2 => {
            let b = &basis[0..2];
            integrate_real_line(
                |y| {
                    let x = [t * theta[0] + y * b[0], t * theta[1] + y * b[1]];
                    (-neg_log(&x)).exp()
                },
                0.0,
                1.0,
                1e-10,
            )
        }
        _ => {
            let b1 = &basis[0..3];
            let b2 = &basis[3..6];
            integrate_real_line(
                |y| {
                    integrate_real_line(
                        |z| {
                            let x = [
                                t * theta[0] + y * b1[0] + z * b2[0],
                                t * theta[1] + y * b1[1] + z * b2[1],
                                t * theta[2] + y * b1[2] + z * b2[2],
                            ];
                            (-neg_log(&x)).exp()
                        },
                        0.0,
                        1.0,
                        1e-9,
                    )
                },
                0.0,
                1.0,
                1e-9,
            )
        }
    }
}

/// Density specification as it appears in experiment config JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DensitySpec {
    Gaussian { dim: usize },
    Sz { p: f64, dim: usize },
    Radial { p: f64, scale: f64, dim: usize },
    Product { coords: Vec<CoordSpec> },
    General {},
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoordSpec {
    Gaussian {},
    ExpPower { p: f64 },
    Uniform { a: f64, b: f64 },
}

impl DensitySpec {
    pub fn build(&self) -> Result<DensityND, DensityError> {
        match self {
            DensitySpec::Gaussian { dim } => Ok(DensityND::standard_gaussian(*dim)),
            DensitySpec::Sz { p, dim } => DensityND::schechtman_zinn(*p, *dim),
            DensitySpec::Radial { p, scale, dim } => DensityND::radial_exp_power(*p, *scale, *dim),
            DensitySpec::Product { coords } => {
                let cs: Result<Vec<Density1D>, DensityError> = coords
                    .iter()
                    .map(|c| match c {
                        CoordSpec::Gaussian {} => Ok(Density1D::gaussian()),
                        CoordSpec::ExpPower { p } => Density1D::exp_power(*p),
                        CoordSpec::Uniform { a, b } => Density1D::uniform(*a, *b),
                    })
                    .collect();
                DensityND::product(cs?)
            }
            DensitySpec::General {} => Err(DensityError::UnsupportedDensity(
                "general densities carry callables and cannot be built from config".into(),
            )),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DensitySpec::Gaussian { dim }
            | DensitySpec::Sz { dim, .. }
            | DensitySpec::Radial { dim, .. } => *dim,
            DensitySpec::Product { coords } => coords.len(),
            DensitySpec::General {} => 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAUSS_Q99: f64 = 2.3263478740408408; // Φ^{-1}(0.99)

    fn quadrature_gaussian_tail(t: f64) -> f64 {
        integrate_to_infinity(
            |s| (-0.5 * s * s).exp() / (2.0 * PI).sqrt(),
            t,
            1.0,
            1e-13,
        )
    }

    #[test]
    fn gaussian_tail_matches_quadrature_oracle() {
        let g = Density1D::gaussian();
        for t in [-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 4.0] {
            let closed = g.tail(t);
            let quad = if t >= 0.0 {
                quadrature_gaussian_tail(t)
            } else {
                1.0 - quadrature_gaussian_tail(-t)
            };
            assert!((closed - quad).abs() < 1e-11, "t={t}: {closed} vs {quad}");
        }
        assert_eq!(g.tail(0.0), 0.5);
    }

    #[test]
    fn gaussian_quantiles() {
        let g = Density1D::gaussian();
        assert!(g.quantile(0.5).unwrap().abs() < 1e-9);
        let q = g.quantile(0.99).unwrap();
        assert!((q - GAUSS_Q99).abs() < 1e-9, "q = {q}");
    }

    #[test]
    fn exp_power_one_has_closed_laplace_tail() {
        let d = Density1D::exp_power(1.0).unwrap();
        for t in [0.0, 0.5, 1.0, 3.0, 10.0] {
            assert!((d.tail(t) - 0.5 * (-t).exp()).abs() < 1e-12);
        }
        // q = 1 - 1/n gives log(n/2) exactly
        let q = d.quantile(1.0 - 1.0 / 100.0).unwrap();
        assert!((q - 50.0_f64.ln()).abs() < 1e-9, "q = {q}");
    }

    #[test]
    fn exp_power_normalizer_matches_gamma_closed_form() {
        for p in [1.0, 1.5, 2.0, 4.0] {
            let numeric = exp_power_upper_integral(p, 0.0);
            let closed = Gamma::gamma(1.0 / p) / p;
            assert!(
                (numeric - closed).abs() < 1e-11,
                "p={p}: {numeric} vs {closed}"
            );
        }
    }

    #[test]
    fn tail_bracket_contains_quadrature_integral() {
        for &p in &[1.0, 1.5, 2.0, 4.0] {
            for &t in &[1.0, 1.5, 2.0, 3.0] {
                let (lo, hi) = tail_bracket(p, t).unwrap();
                let integral = exp_power_upper_integral(p, t);
                let slack = 1e-12 * integral;
                assert!(
                    lo <= integral + slack && integral <= hi + slack,
                    "p={p} t={t}: {lo} <= {integral} <= {hi}"
                );
            }
        }
        // p = 1 at t = 1 is exactly e^{-1} on all three sides
        let (lo, hi) = tail_bracket(1.0, 1.0).unwrap();
        assert!((lo - (-1.0f64).exp()).abs() < 1e-12);
        assert!((hi - (-1.0f64).exp()).abs() < 1e-12);
        assert!((exp_power_upper_integral(1.0, 1.0) - (-1.0f64).exp()).abs() < 1e-12);
        // p = 2, t = 1 reference values
        let (lo, hi) = tail_bracket(2.0, 1.0).unwrap();
        assert!((lo - 0.122626).abs() < 1e-5 && (hi - 0.183940).abs() < 1e-5);
        assert!((exp_power_upper_integral(2.0, 1.0) - 0.139403).abs() < 1e-5);
        assert!(tail_bracket(2.0, 0.5).is_err());
        assert!(tail_bracket(0.5, 2.0).is_err());
    }

    #[test]
    fn u_is_convex_for_builtins() {
        let grid: Vec<f64> = (0..1000).map(|i| -5.0 + 10.0 * i as f64 / 999.0).collect();
        assert!(u_convexity_report(&Density1D::gaussian(), &grid) <= 1e-6);
        let ep1_grid: Vec<f64> = (0..1000).map(|i| -4.0 + 8.0 * i as f64 / 999.0).collect();
        assert!(u_convexity_report(&Density1D::exp_power(1.0).unwrap(), &ep1_grid) <= 1e-6);
        let ep4_grid: Vec<f64> = (0..1000).map(|i| -2.5 + 5.0 * i as f64 / 999.0).collect();
        assert!(u_convexity_report(&Density1D::exp_power(4.0).unwrap(), &ep4_grid) <= 1e-6);
    }

    #[test]
    fn u_of_laplace_is_linear_on_the_right_half_line() {
        let d = Density1D::exp_power(1.0).unwrap();
        for t in [0.1, 0.5, 1.0, 2.0] {
            assert!((d.u(t) - (t + 2.0f64.ln())).abs() < 1e-10);
        }
    }

    #[test]
    fn gnedenko_interval_reference_values() {
        let iv = gnedenko_interval(&Density1D::gaussian(), 100, 1.0).unwrap();
        assert!((iv.a - 1.0 / 100.0f64.ln()).abs() < 1e-15);
        assert!((iv.b - 100.0f64.ln()).abs() < 1e-15);
        assert!((iv.prob - 0.7957).abs() < 2e-4, "prob = {}", iv.prob);
        assert!(iv.prob >= 1.0 - iv.a - (-iv.b).exp());
        assert!(iv.lo < iv.hi);
        // degenerate a = b collapses the probability to zero
        assert_eq!(gnedenko_probability(0.3, 0.3, 50), 0.0);
        // displayed floor holds across densities and sizes
        for n in [10u64, 100, 10_000] {
            for q in [0.5, 1.0, 2.0] {
                if let Ok(iv) = gnedenko_interval(&Density1D::exp_power(1.0).unwrap(), n, q) {
                    assert!(iv.prob >= 1.0 - iv.a - (-iv.b).exp() - 1e-12);
                }
            }
        }
    }

    #[test]
    fn gnedenko_interval_rejects_bad_regimes() {
        // b = q log n >= n
        assert!(matches!(
            gnedenko_interval(&Density1D::gaussian(), 3, 10.0),
            Err(DensityError::ParameterRegime(_))
        ));
    }

    #[test]
    fn nd_gaussian_tail_and_quantile() {
        let d = DensityND::standard_gaussian(2);
        let theta = [1.0, 0.0];
        assert_eq!(d.tail(&theta, 0.0).unwrap(), 0.5);
        let diag = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        assert!((d.tail(&diag, GAUSS_Q99).unwrap() - 0.01).abs() < 1e-12);
        let q = d.quantile(&diag, 0.99).unwrap();
        assert!((q - GAUSS_Q99).abs() < 1e-9);
    }

    #[test]
    fn sz_total_mass_is_one_sided() {
        let d = DensityND::schechtman_zinn(1.0, 2).unwrap();
        assert!(d.tail(&[1.0, 0.0], -40.0).unwrap() > 1.0 - 1e-12);
        let c1 = d.sz_normalizer().unwrap();
        assert!((c1 - 0.5).abs() < 1e-10, "c1 = {c1}");
    }

    #[test]
    fn gaussian_radon_is_the_standard_marginal() {
        let d = DensityND::standard_gaussian(2);
        for t in [-1.0, 0.0, 0.7, 2.0] {
            let r = d.radon(&[1.0, 0.0], t).unwrap();
            let expect = (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
            assert!((r - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn radial_radon_is_unimodal_at_zero() {
        let d = DensityND::radial_exp_power(2.0, SQRT_2, 2).unwrap();
        let r0 = d.radon(&[0.6, 0.8], 0.0).unwrap();
        let r1 = d.radon(&[0.6, 0.8], 1.0).unwrap();
        assert!(r0 >= r1);
    }

    #[test]
    fn sz1_radon_matches_exact_convolution() {
        let d = DensityND::schechtman_zinn(1.0, 2).unwrap();
        let c1 = d.sz_normalizer().unwrap();
        for t in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            let r = d.radon(&[1.0, 0.0], t).unwrap();
            let expect = 2.0 * c1 * c1 * (-t.abs()).exp();
            assert!((r - expect).abs() < 1e-9, "t={t}: {r} vs {expect}");
        }
    }

    #[test]
    fn radial_and_product_gaussians_agree() {
        // standard gaussian as radial profile e^{-(r/√2)^2} and as product of
        // 1-D gaussians; tails must coincide within 1e-8
        let radial = DensityND::radial_exp_power(2.0, SQRT_2, 2).unwrap();
        let product =
            DensityND::product(vec![Density1D::gaussian(), Density1D::gaussian()]).unwrap();
        let closed = DensityND::standard_gaussian(2);
        let theta = [0.6, 0.8];
        for t in [0.0, 0.5, 1.5, 3.0] {
            let a = radial.tail(&theta, t).unwrap();
            let b = product.tail(&theta, t).unwrap();
            let c = closed.tail(&theta, t).unwrap();
            assert!((a - c).abs() < 1e-8, "radial {a} vs closed {c} at t={t}");
            assert!((b - c).abs() < 1e-12, "product {b} vs closed {c} at t={t}");
        }
    }

    #[test]
    fn mixed_product_sum_matches_gaussian_closed_form() {
        // θ1·N(0,1) + θ2·EP(2) where EP(2) = N(0, 1/2): variance θ1² + θ2²/2
        let product = DensityND::product(vec![
            Density1D::gaussian(),
            Density1D::exp_power(2.0).unwrap(),
        ])
        .unwrap();
        let theta = [0.6, 0.8];
        let sigma = (0.36 + 0.64 / 2.0_f64).sqrt();
        for t in [0.0, 0.3, 1.0, 2.5] {
            let got = product.tail(&theta, t).unwrap();
            let expect = 0.5 * (t / (sigma * SQRT_2)).compl_error();
            assert!((got - expect).abs() < 1e-10, "t={t}: {got} vs {expect}");
        }
    }

    #[test]
    fn general_class_reproduces_gaussian_tails() {
        let d = DensityND::general(
            2,
            |x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1]) + (2.0 * PI).ln(),
            &[0.1, -0.2],
            true,
        )
        .unwrap();
        let closed = DensityND::standard_gaussian(2);
        let theta = [0.8, -0.6];
        for t in [0.0, 1.0, 2.0] {
            let a = d.tail(&theta, t).unwrap();
            let b = closed.tail(&theta, t).unwrap();
            assert!((a - b).abs() < 1e-7, "t={t}: {a} vs {b}");
        }
        assert!(DensityND::general(4, |_: &[f64]| 0.0, &[0.0; 4], true).is_err());
    }

    #[test]
    fn centroid_half_space_mass_is_at_least_inverse_e() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let densities = [
            DensityND::standard_gaussian(2),
            DensityND::schechtman_zinn(1.5, 2).unwrap(),
            DensityND::radial_exp_power(3.0, 1.0, 2).unwrap(),
        ];
        for d in &densities {
            for _ in 0..20 {
                let a: f64 = rng.gen::<f64>() * 2.0 * PI;
                // centroid of all built-ins is the origin
                let tail = d.tail(&[a.cos(), a.sin()], 0.0).unwrap();
                assert!(tail >= (-1.0f64).exp() - 1e-9, "tail {tail}");
            }
        }
    }

    #[test]
    fn gaussian_quantile_growth() {
        let g = Density1D::gaussian();
        for n in [1_000u64, 10_000, 100_000, 1_000_000] {
            let q = g.quantile(1.0 - 1.0 / n as f64).unwrap();
            assert!(q >= (n as f64).ln().sqrt(), "n={n}: {q}");
        }
    }

    #[test]
    fn marginal_log_concavity_across_backends() {
        let cases: Vec<(DensityND, Vec<f64>)> = vec![
            (DensityND::standard_gaussian(2), vec![0.6, 0.8]),
            (
                DensityND::schechtman_zinn(1.0, 2).unwrap(),
                vec![0.6, 0.8],
            ),
            (
                DensityND::radial_exp_power(2.0, SQRT_2, 2).unwrap(),
                vec![1.0, 0.0],
            ),
        ];
        for (d, theta) in &cases {
            let m = d.marginal(theta).unwrap();
            let grid: Vec<f64> = (0..60).map(|i| -2.5 + 5.0 * i as f64 / 59.0).collect();
            let neg_log: Vec<f64> = grid.iter().map(|t| -m.density(*t).ln()).collect();
            for w in neg_log.windows(3) {
                let second = w[0] - 2.0 * w[1] + w[2];
                assert!(second >= -1e-6, "backend {}", m.backend_name());
            }
            // tails decrease from 1 to 0
            assert!(m.tail(-30.0) > 0.999_999);
            assert!(m.tail(30.0) < 1e-6);
        }
    }

    #[test]
    fn tail_decay_shape_matches_p() {
        // difference ratios of u = -log tail cancel additive constants, so
        // [u(4t)-u(2t)]/[u(2t)-u(t)] -> 2^p for tails of shape e^{-c t^p}
        for (p, t0) in [(1.5, 2.0), (2.0, 2.0), (4.0, 1.3)] {
            let d = DensityND::schechtman_zinn(p, 2).unwrap();
            let m = d.marginal(&[0.6, 0.8]).unwrap();
            let u = |t: f64| -m.tail(t).ln();
            let (u1, u2, u3) = (u(t0), u(2.0 * t0), u(4.0 * t0));
            let power = ((u3 - u2) / (u2 - u1)).ln() / 2.0f64.ln();
            assert!(power >= p - 0.25, "p={p}: power {power}");
            // fitted two-parameter envelope c1 t^{1-p} e^{-c2 t^p} through the
            // endpoints stays above the measured tail in between
            let c2 = (u2 - u1 - (p - 1.0) * 2.0f64.ln())
                / ((2.0 * t0).powf(p) - t0.powf(p));
            let ln_c1 = -u1 + (p - 1.0) * t0.ln() + c2 * t0.powf(p);
            for i in 1..8 {
                let t = t0 * (1.0 + i as f64 / 8.0);
                let envelope = (ln_c1 + (1.0 - p) * t.ln() - c2 * t.powf(p)).exp();
                assert!(
                    m.tail(t) <= 1.1 * envelope,
                    "p={p} t={t}: tail {} above fitted envelope {envelope}",
                    m.tail(t)
                );
            }
        }
    }

    #[test]
    fn density_spec_round_trip() {
        let spec = DensitySpec::Sz { p: 1.5, dim: 2 };
        let text = serde_json::to_string(&spec).unwrap();
        let back: DensitySpec = serde_json::from_str(&text).unwrap();
        let d = back.build().unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.class_name(), "sz");
    }
}
