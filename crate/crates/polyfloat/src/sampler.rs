//! Reproducible samplers for the supported density classes and extraction of
//! random polytopes from samples.
//!
//! Every sample set is a pure function of `(density, n, seed)`: regenerating
//! with the same arguments reproduces the points bit-exactly. Parallel
//! experiment trials derive independent seeds with [`derive_stream_seed`].

use crate::body::{BodyError, SupportBody};
use crate::density::{Density1D, DensityND, DensityError};
use crate::net::DirectionNet;
use crate::numeric::dot;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Debug, Clone, thiserror::Error)]
pub enum SamplerError {
    #[error("unsupported density class for sampling: {0}")]
    UnsupportedDensity(String),
    #[error("degenerate hull: {0}")]
    DegenerateHull(String),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Body(#[from] BodyError),
}

/// An i.i.d. sample, points stored flat with `dim` coordinates per point.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub dim: usize,
    pub n: usize,
    pub seed: u64,
    pub points: Vec<f64>,
    /// Human-readable description of the generating density.
    pub density_desc: String,
}

impl SampleSet {
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn from_points(dim: usize, seed: u64, points: Vec<f64>, desc: &str) -> SampleSet {
        SampleSet {
            dim,
            n: points.len() / dim,
            seed,
            points,
            density_desc: desc.to_string(),
        }
    }

    /// Mean of the sample, the default polytope center.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for p in self.points.chunks_exact(self.dim) {
            for (mi, pi) in m.iter_mut().zip(p) {
                *mi += pi;
            }
        }
        for mi in m.iter_mut() {
            *mi /= self.n as f64;
        }
        m
    }
}

/// Mixes a master seed and a trial index into an independent stream seed.
pub fn derive_stream_seed(master_seed: u64, trial_index: u64) -> u64 {
    // splitmix64 over the concatenated words
    let mut z = master_seed
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(trial_index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Draws `n` i.i.d. points from the density. Supported classes: gaussian,
/// sz(p) (gamma transform of the coordinates), radial exponential-power
/// (uniform direction times a gamma-transformed radius) and products of the
/// built-in one-dimensional models. General densities are sampled by the
/// universal-measure rejection sampler, not here.
pub fn sample(density: &DensityND, n: usize, seed: u64) -> Result<SampleSet, SamplerError> {
    if n == 0 {
        return Err(SamplerError::UnsupportedDensity("need n >= 1".into()));
    }
    let dim = density.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![0.0; n * dim];
    match density.class_name() {
        "gaussian" => {
            for v in points.iter_mut() {
                *v = rng.sample(rand_distr::StandardNormal);
            }
        }
        "sz" => {
            let p = density_sz_p(density)?;
            let gamma = rand_distr::Gamma::new(1.0 / p, 1.0).expect("valid gamma shape");
            for v in points.iter_mut() {
                let g: f64 = rng.sample(gamma);
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                *v = sign * g.powf(1.0 / p);
            }
        }
        "radial" => {
            let (p, scale) = density_radial_params(density)?;
            // radius density ∝ r^{d-1} e^{-(r/scale)^p}; substituting
            // v = (r/scale)^p gives v ~ Gamma(d/p), so r = scale v^{1/p}
            let gamma = rand_distr::Gamma::new(dim as f64 / p, 1.0).expect("valid gamma shape");
            let mut dir = vec![0.0; dim];
            for i in 0..n {
                let v: f64 = rng.sample(gamma);
                let r = scale * v.powf(1.0 / p);
                random_unit(&mut rng, &mut dir);
                for (out, d) in points[i * dim..(i + 1) * dim].iter_mut().zip(&dir) {
                    *out = r * d;
                }
            }
        }
        "product" => {
            let coords = density_product_coords(density)?;
            for i in 0..n {
                for (j, c) in coords.iter().enumerate() {
                    points[i * dim + j] = c.sample(&mut rng);
                }
            }
        }
        other => {
            return Err(SamplerError::UnsupportedDensity(format!(
                "class {other} has no direct sampler"
            )))
        }
    }
    Ok(SampleSet {
        dim,
        n,
        seed,
        points,
        density_desc: format!("{density:?}"),
    })
}

fn density_sz_p(density: &DensityND) -> Result<f64, SamplerError> {
    density
        .sz_p()
        .ok_or_else(|| SamplerError::UnsupportedDensity("not a Schechtman-Zinn density".into()))
}

fn density_radial_params(density: &DensityND) -> Result<(f64, f64), SamplerError> {
    density
        .radial_params()
        .ok_or_else(|| SamplerError::UnsupportedDensity("not a radial density".into()))
}

fn density_product_coords(density: &DensityND) -> Result<Vec<Density1D>, SamplerError> {
    density
        .product_coords()
        .ok_or_else(|| SamplerError::UnsupportedDensity("not a product density".into()))
}

fn random_unit<R: Rng>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut s = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample::<f64, _>(rand_distr::StandardNormal);
            s += *v * *v;
        }
        if s > 1e-12 {
            let r = s.sqrt();
            for v in out.iter_mut() {
                *v /= r;
            }
            return;
        }
    }
}

/// Support body of the convex hull of the sample about the sample mean.
///
/// In the plane an exact monotone-chain hull prefilters the points; in three
/// dimensions points strictly inside a safe inner ball are discarded. Either
/// way the support values over the net equal the brute-force maxima exactly:
/// discarded points have norm below the smallest kept support value, so they
/// cannot touch any face.
pub fn random_polytope(
    samples: &SampleSet,
    net: &Arc<DirectionNet>,
) -> Result<SupportBody, SamplerError> {
    let dim = samples.dim;
    if net.dim() != dim {
        return Err(SamplerError::UnsupportedDensity(
            "net dimension does not match the sample".into(),
        ));
    }
    if samples.n < dim + 1 {
        return Err(SamplerError::DegenerateHull(format!(
            "need at least d+1 = {} points, got {}",
            dim + 1,
            samples.n
        )));
    }
    let center = samples.mean();
    let body = match dim {
        2 => {
            let hull = convex_hull_2d(&samples.points);
            let mut flat = Vec::with_capacity(hull.len() * 2);
            for &(x, y) in &hull {
                flat.push(x);
                flat.push(y);
            }
            SupportBody::of_points(&flat, net.clone(), center)?
        }
        3 => {
            let kept = radius_prefilter(samples, &center, net);
            SupportBody::of_points(&kept, net.clone(), center)?
        }
        _ => SupportBody::of_points(&samples.points, net.clone(), center)?,
    };
    let hmax = body
        .support_values()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if !(hmax > 0.0) {
        return Err(SamplerError::DegenerateHull(
            "all points coincide; hull has empty interior".into(),
        ));
    }
    Ok(body)
}

/// Keeps points outside 0.99 times the smallest net-directional maximum of a
/// subsample. The subsample minimum is a per-direction lower bound of the
/// full minimum, so discards satisfy |x - c| < T <= min_ω h(ω) and cannot
/// touch any face: their gauge against the final body is <= 1.
fn radius_prefilter(samples: &SampleSet, center: &[f64], net: &Arc<DirectionNet>) -> Vec<f64> {
    let dim = samples.dim;
    let probe = 2048.min(samples.n);
    let mut h_sub = vec![f64::NEG_INFINITY; net.len()];
    let mut shifted = vec![0.0; dim];
    for i in 0..probe {
        for (sj, (x, c)) in shifted.iter_mut().zip(samples.point(i).iter().zip(center)) {
            *sj = x - c;
        }
        for (hj, w) in h_sub.iter_mut().zip(net.iter()) {
            let v = dot(&shifted, w);
            if v > *hj {
                *hj = v;
            }
        }
    }
    let h_min = h_sub.iter().cloned().fold(f64::INFINITY, f64::min);
    if !h_min.is_finite() || h_min <= 0.0 {
        return samples.points.clone();
    }
    let threshold = 0.99 * h_min;
    let t2 = threshold * threshold;
    let mut kept = Vec::new();
    for p in samples.points.chunks_exact(dim) {
        let r2: f64 = p
            .iter()
            .zip(center)
            .map(|(x, c)| (x - c) * (x - c))
            .sum();
        if r2 >= t2 {
            kept.extend_from_slice(p);
        }
    }
    if kept.is_empty() {
        samples.points.clone()
    } else {
        kept
    }
}

/// Brute-force support over every point, for prefilter verification.
pub fn support_brute_force(
    samples: &SampleSet,
    net: &Arc<DirectionNet>,
) -> Result<SupportBody, SamplerError> {
    Ok(SupportBody::of_points(
        &samples.points,
        net.clone(),
        samples.mean(),
    )?)
}

/// Andrew's monotone-chain convex hull; collinear points are dropped and ties
/// are broken lexicographically.
pub fn convex_hull_2d(points: &[f64]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Exact vertex count of the planar hull.
pub fn vertex_count_2d(samples: &SampleSet) -> Result<usize, SamplerError> {
    if samples.dim != 2 {
        return Err(SamplerError::UnsupportedDensity("vertex counts are planar".into()));
    }
    if samples.n < 3 {
        return Err(SamplerError::DegenerateHull("need at least 3 points".into()));
    }
    Ok(convex_hull_2d(&samples.points).len())
}

/// Monte Carlo estimate of a directional tail with a 99% binomial CI; the
/// last-resort backend when no quadrature route exists.
pub fn monte_carlo_tail(
    density: &DensityND,
    theta: &[f64],
    t: f64,
    n: usize,
    seed: u64,
) -> Result<(f64, f64), SamplerError> {
    let s = sample(density, n, seed)?;
    let mut hits = 0usize;
    for p in s.points.chunks_exact(s.dim) {
        if dot(p, theta) >= t {
            hits += 1;
        }
    }
    let est = hits as f64 / n as f64;
    let ci = 2.5758 * (est * (1.0 - est) / n as f64).sqrt();
    Ok((est, ci))
}
