//! Deterministic approximant bodies of a log-concave measure: the floating
//! polytope (directional quantile body), the density level-set body, the
//! Radon body (hyperplane-integral level set), the convex floating body of a
//! planar polygon, and the outer-mass function ζ.
//!
//! The floating body itself is always represented by its net over-
//! approximation: one half-space of mass δ per net direction. The gap to the
//! exact body is controlled by the net parameter, which callers budget
//! explicitly.

use crate::body::{BodyError, RadialBody, SupportBody};
use crate::density::{DensityError, DensityND};
use crate::net::DirectionNet;
use crate::numeric::{bisect_decreasing, dot};
use crate::sampler::{sample, SampleSet, SamplerError};
use std::sync::Arc;

#[derive(Debug, Clone, thiserror::Error)]
pub enum FloatError {
    #[error("delta = {0} must lie in (0, e^{{-1}}) for a non-empty floating body")]
    PossiblyEmpty(f64),
    #[error("delta = {delta} is not below the density peak {peak}; level set is empty")]
    EmptyLevelSet { delta: f64, peak: f64 },
    #[error("delta = {delta} exceeds a central Radon value {central}; slab is empty")]
    DeltaTooLarge { delta: f64, central: f64 },
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Net floating polytope: intersection over net directions ω of the
/// half-spaces `<x, ω> <= J_ω^{-1}(1-δ)`.
#[derive(Debug, Clone)]
pub struct FloatingPolytope {
    pub body: SupportBody,
    pub delta: f64,
}

/// Density super-level set `{f >= δ}` as radial roots about the mode.
#[derive(Debug, Clone)]
pub struct LevelSetBody {
    pub body: RadialBody,
    pub delta: f64,
}

/// Radon body: per direction, the largest t with hyperplane integral >= δ.
#[derive(Debug, Clone)]
pub struct RadonBody {
    pub body: SupportBody,
    pub delta: f64,
}

const E_INV: f64 = 0.36787944117144233;

/// Builds the floating polytope F_δ^N about the density mode.
pub fn floating_polytope(
    density: &DensityND,
    net: &Arc<DirectionNet>,
    delta: f64,
) -> Result<FloatingPolytope, FloatError> {
    if !(delta > 0.0 && delta < E_INV) {
        return Err(FloatError::PossiblyEmpty(delta));
    }
    let mode = density.mode();
    let k = net.len();
    let mut h = vec![0.0; k];
    if density.is_isotropic() {
        // all directional marginals coincide; one quantile serves every
        // direction (the mode of these classes is the origin)
        let q = density.quantile(net.direction(0), 1.0 - delta)?;
        h.fill(q);
    } else {
        for (hi, w) in h.iter_mut().zip(net.iter()) {
            let q = density.quantile(w, 1.0 - delta)?;
            *hi = q - dot(&mode, w);
        }
    }
    Ok(FloatingPolytope {
        body: SupportBody::new(net.clone(), mode, h)?,
        delta,
    })
}

/// Builds the level-set body D_δ = {f >= δ} by bracketed radial bisection
/// about the mode, to 1e-9 relative accuracy.
pub fn level_set_body(
    density: &DensityND,
    net: &Arc<DirectionNet>,
    delta: f64,
) -> Result<LevelSetBody, FloatError> {
    let mode = density.mode();
    let peak = density.density(&mode);
    if !(delta > 0.0 && delta < peak) {
        return Err(FloatError::EmptyLevelSet { delta, peak });
    }
    let log_target = delta.ln();
    let mut rho = Vec::with_capacity(net.len());
    for w in net.iter() {
        let log_f = |r: f64| {
            let y: Vec<f64> = mode.iter().zip(w).map(|(m, wi)| m + r * wi).collect();
            density.log_density(&y)
        };
        let rough =
            bisect_decreasing(&log_f, log_target, 0.0, 1.0, 1e-6).map_err(DensityError::from)?;
        let tol = 1e-9 * rough.abs().max(1e-12);
        let root = if tol < 1e-6 {
            bisect_decreasing(&log_f, log_target, (rough - 1e-5).max(0.0), 4e-5, tol)
                .unwrap_or(rough)
        } else {
            rough
        };
        rho.push(root.max(1e-300));
    }
    Ok(LevelSetBody {
        body: RadialBody::new(net.clone(), mode, rho)?,
        delta,
    })
}

/// Builds the Radon body R_δ from one slab per net direction: the upper root
/// of `Rf(H_{ω,t}) = δ` beyond the marginal mode, symmetrized over ±ω pairs
/// by the net itself.
pub fn radon_body(
    density: &DensityND,
    net: &Arc<DirectionNet>,
    delta: f64,
) -> Result<RadonBody, FloatError> {
    let mode = density.mode();
    let k = net.len();
    let mut h = vec![0.0; k];
    if density.is_isotropic() {
        let m = density.marginal(net.direction(0))?;
        let t = radon_upper_root(&m, dot(&mode, net.direction(0)), delta)?;
        h.fill(t);
    } else {
        for (hi, w) in h.iter_mut().zip(net.iter()) {
            let m = density.marginal(w)?;
            let t_mode = dot(&mode, w);
            *hi = radon_upper_root(&m, t_mode, delta)? - t_mode;
        }
    }
    Ok(RadonBody {
        body: SupportBody::new(net.clone(), mode, h)?,
        delta,
    })
}

fn radon_upper_root(
    m: &crate::density::Marginal,
    t_mode: f64,
    delta: f64,
) -> Result<f64, FloatError> {
    let central = m.density(t_mode);
    if !(delta > 0.0 && delta < central) {
        return Err(FloatError::DeltaTooLarge { delta, central });
    }
    let f = |t: f64| m.density(t_mode + t.max(0.0));
    let rough = bisect_decreasing(f, delta, 0.0, 1.0, 1e-6).map_err(DensityError::from)?;
    let tol = 1e-9 * rough.abs().max(1e-9);
    let root =
        bisect_decreasing(f, delta, (rough - 10.0 * tol).max(0.0), 20.0 * tol, tol).unwrap_or(rough);
    Ok(t_mode + root)
}

/// Shoelace area of a polygon given as vertex pairs in order.
pub fn polygon_area(vertices: &[(f64, f64)]) -> f64 {
    let n = vertices.len();
    let mut a = 0.0;
    for i in 0..n {
        let (x1, y1) = vertices[i];
        let (x2, y2) = vertices[(i + 1) % n];
        a += x1 * y2 - x2 * y1;
    }
    0.5 * a.abs()
}

/// Area centroid of a simple polygon.
pub fn polygon_centroid(vertices: &[(f64, f64)]) -> (f64, f64) {
    let n = vertices.len();
    let mut a = 0.0;
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let (x1, y1) = vertices[i];
        let (x2, y2) = vertices[(i + 1) % n];
        let w = x1 * y2 - x2 * y1;
        a += w;
        cx += (x1 + x2) * w;
        cy += (y1 + y2) * w;
    }
    (cx / (3.0 * a), cy / (3.0 * a))
}

fn is_convex(vertices: &[(f64, f64)]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    let mut sign = 0.0_f64;
    for i in 0..n {
        let o = vertices[i];
        let a = vertices[(i + 1) % n];
        let b = vertices[(i + 2) % n];
        let c = (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
        if c.abs() > 1e-15 {
            if sign != 0.0 && c.signum() != sign {
                return false;
            }
            sign = c.signum();
        }
    }
    true
}

/// Clips a convex polygon with the half-plane `<x, ω> <= t` (Sutherland-
/// Hodgman step).
fn clip_below(vertices: &[(f64, f64)], omega: &[f64], t: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(vertices.len() + 2);
    let n = vertices.len();
    for i in 0..n {
        let cur = vertices[i];
        let nxt = vertices[(i + 1) % n];
        let dc = omega[0] * cur.0 + omega[1] * cur.1 - t;
        let dn = omega[0] * nxt.0 + omega[1] * nxt.1 - t;
        if dc <= 0.0 {
            out.push(cur);
        }
        if (dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0) {
            let s = dc / (dc - dn);
            out.push((cur.0 + s * (nxt.0 - cur.0), cur.1 + s * (nxt.1 - cur.1)));
        }
    }
    out
}

/// Cap area of the polygon beyond the line `<x, ω> = t`.
fn cap_area(vertices: &[(f64, f64)], omega: &[f64], t: f64) -> f64 {
    let neg = [-omega[0], -omega[1]];
    let cap = clip_below(vertices, &neg, -t);
    if cap.len() < 3 {
        0.0
    } else {
        polygon_area(&cap)
    }
}

/// Convex floating body K_λ of the uniform measure on a convex polygon:
/// per net direction, the support line cutting off exactly λ of the area,
/// found by exact polygon clipping and monotone bisection. Support values
/// are taken about the polygon centroid.
pub fn convex_floating_body_2d(
    vertices: &[(f64, f64)],
    net: &Arc<DirectionNet>,
    lambda: f64,
) -> Result<SupportBody, FloatError> {
    if net.dim() != 2 {
        return Err(FloatError::InvalidParameter("planar net required".into()));
    }
    if !(lambda > 0.0 && lambda < 0.5) {
        return Err(FloatError::InvalidParameter(format!(
            "lambda must lie in (0, 1/2), got {lambda}"
        )));
    }
    if !is_convex(vertices) {
        return Err(FloatError::InvalidPolygon(
            "vertices do not describe a simple convex polygon".into(),
        ));
    }
    let total = polygon_area(vertices);
    if total <= 0.0 {
        return Err(FloatError::InvalidPolygon("degenerate polygon".into()));
    }
    let centroid = polygon_centroid(vertices);
    let target = lambda * total;
    let mut h = vec![0.0; net.len()];
    let diam = {
        let mut d = 0.0_f64;
        for a in vertices {
            for b in vertices {
                d = d.max(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt());
            }
        }
        d
    };
    for (hi, w) in h.iter_mut().zip(net.iter()) {
        let lo = vertices
            .iter()
            .map(|v| w[0] * v.0 + w[1] * v.1)
            .fold(f64::INFINITY, f64::min);
        let hi_t = vertices
            .iter()
            .map(|v| w[0] * v.0 + w[1] * v.1)
            .fold(f64::NEG_INFINITY, f64::max);
        // cap area decreases from the full area to 0 as t sweeps lo -> hi
        let mut a = lo;
        let mut b = hi_t;
        while b - a > 1e-12 * diam {
            let mid = 0.5 * (a + b);
            if cap_area(vertices, w, mid) >= target {
                a = mid;
            } else {
                b = mid;
            }
        }
        let t = 0.5 * (a + b);
        *hi = t - (w[0] * centroid.0 + w[1] * centroid.1);
    }
    Ok(SupportBody::new(
        net.clone(),
        vec![centroid.0, centroid.1],
        h,
    )?)
}

/// Floating polytope of an empirical measure: per direction, the empirical
/// (1-δ)-quantile of the projections about `center`, with a 99% order-
/// statistic confidence half-width per direction.
pub fn floating_polytope_monte_carlo(
    samples: &SampleSet,
    net: &Arc<DirectionNet>,
    delta: f64,
    center: &[f64],
) -> Result<(SupportBody, Vec<f64>), FloatError> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(FloatError::InvalidParameter("delta must lie in (0, 1/2)".into()));
    }
    let n = samples.n;
    let dim = samples.dim;
    if net.dim() != dim {
        return Err(FloatError::InvalidParameter("net/sample dimension mismatch".into()));
    }
    let mut h = vec![0.0; net.len()];
    let mut ci = vec![0.0; net.len()];
    let rank_spread = (2.5758 * (n as f64 * delta * (1.0 - delta)).sqrt()).ceil() as usize;
    let mut proj = vec![0.0f64; n];
    for (j, w) in net.iter().enumerate() {
        for (pr, p) in proj.iter_mut().zip(samples.points.chunks_exact(dim)) {
            *pr = p
                .iter()
                .zip(w.iter().zip(center))
                .map(|(x, (wi, c))| wi * (x - c))
                .sum();
        }
        proj.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let k = ((n as f64) * (1.0 - delta)).ceil() as usize - 1;
        h[j] = proj[k.min(n - 1)];
        let lo = proj[k.saturating_sub(rank_spread)];
        let hi = proj[(k + rank_spread).min(n - 1)];
        ci[j] = 0.5 * (hi - lo);
    }
    Ok((
        SupportBody::new(net.clone(), center.to_vec(), h)?,
        ci,
    ))
}

/// Monte Carlo estimate of ζ(ε) = μ{f < ε} with a 99% binomial CI.
pub fn zeta(
    density: &DensityND,
    epsilon: f64,
    samples_n: usize,
    seed: u64,
) -> Result<(f64, f64), FloatError> {
    let s = sample(density, samples_n, seed)?;
    let mut hits = 0usize;
    for p in s.points.chunks_exact(s.dim) {
        if density.density(p) < epsilon {
            hits += 1;
        }
    }
    let est = hits as f64 / samples_n as f64;
    let ci = 2.5758 * (est * (1.0 - est) / samples_n as f64).sqrt();
    Ok((est, ci))
}
