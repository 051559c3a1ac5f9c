//! ε-nets of unit directions on the sphere S^{d-1}.
//!
//! A net is a finite direction set that is ε-separated (pairwise Euclidean
//! distance > ε) and ε-covering (every unit vector lies within ε of a net
//! member). Nets carry a probe-measured covering radius and back every
//! support-function representation in this crate: bodies are stored per net
//! direction and distances are suprema over net (plus probe) directions.

use crate::json;
use crate::numeric::{dot, norm};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use special::Error as ErfError;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone, thiserror::Error)]
pub enum NetError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("net construction failure: {0}")]
    ConstructionFailure(String),
}

/// A validated ε-net on S^{dim-1}.
///
/// Directions are stored flat, `dim` coordinates per entry. For `dim == 2`
/// the construction is the uniform angular net (sorted by angle); for
/// `dim >= 3` it is a greedy maximal-separation selection from a
/// low-discrepancy candidate pool. Immutable after construction.
#[derive(Debug)]
pub struct DirectionNet {
    dim: usize,
    eps: f64,
    seed: u64,
    directions: Vec<f64>,
    covering_radius: f64,
    probes: OnceLock<Vec<f64>>,
}

/// Number of random probes used to measure the covering radius.
pub const COVERING_PROBES: usize = 10_000;

impl DirectionNet {
    /// Builds the net for `(dim, eps, seed)`. Deterministic in its arguments.
    pub fn build(dim: usize, eps: f64, seed: u64) -> Result<Self, NetError> {
        if dim < 1 {
            return Err(NetError::InvalidParameter("dim must be >= 1".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(NetError::InvalidParameter(format!(
                "eps must lie in (0,1), got {eps}"
            )));
        }
        let directions = match dim {
            1 => vec![-1.0, 1.0],
            2 => angular_net(eps),
            _ => greedy_net(dim, eps, seed)?,
        };
        Self::from_parts(dim, eps, seed, directions)
    }

    /// Wraps an explicit direction list, validating every net invariant.
    /// Accepts `eps` up to and including 1.
    pub fn from_directions(
        dim: usize,
        eps: f64,
        seed: u64,
        directions: Vec<f64>,
    ) -> Result<Self, NetError> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(NetError::InvalidParameter(format!(
                "eps must lie in (0,1], got {eps}"
            )));
        }
        Self::from_parts(dim, eps, seed, directions)
    }

    fn from_parts(dim: usize, eps: f64, seed: u64, directions: Vec<f64>) -> Result<Self, NetError> {
        if directions.is_empty() || directions.len() % dim != 0 {
            return Err(NetError::InvalidParameter(
                "direction buffer length must be a positive multiple of dim".into(),
            ));
        }
        let mut net = DirectionNet {
            dim,
            eps,
            seed,
            directions,
            covering_radius: 0.0,
            probes: OnceLock::new(),
        };
        net.covering_radius = if dim == 1 {
            0.0
        } else {
            net.measure_covering(COVERING_PROBES, seed ^ 0x9e3779b97f4a7c15)
        };
        net.validate()?;
        Ok(net)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn covering_radius(&self) -> f64 {
        self.covering_radius
    }

    pub fn len(&self) -> usize {
        self.directions.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.directions.chunks_exact(self.dim)
    }

    /// `max_{ω∈N} <x, ω>`; sandwiched between `(1-eps)|x|` and `|x|`.
    pub fn functional(&self, x: &[f64]) -> f64 {
        self.iter()
            .map(|w| dot(x, w))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the net member closest to `theta` plus the chord distance.
    pub fn nearest(&self, theta: &[f64]) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (i, w) in self.iter().enumerate() {
            let d2: f64 = w.iter().zip(theta).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < best.1 {
                best = (i, d2);
            }
        }
        (best.0, best.1.sqrt())
    }

    /// Greedy series expansion of a unit vector over the net:
    /// `theta = ω_{i0} + Σ_j ε_j ω_{ij} + r` with `0 <= ε_j <= eps^j` and
    /// `|r| <= eps^{k+1}`. Stops early when the residual vanishes.
    pub fn series_decompose(&self, theta: &[f64], k: usize) -> SeriesTerms {
        let (i0, _) = self.nearest(theta);
        let mut indices = vec![i0];
        let mut coefficients = Vec::new();
        let mut residual: Vec<f64> = theta
            .iter()
            .zip(self.direction(i0))
            .map(|(t, w)| t - w)
            .collect();
        for _ in 0..k {
            let r = norm(&residual);
            if r == 0.0 {
                break;
            }
            let unit: Vec<f64> = residual.iter().map(|v| v / r).collect();
            let (idx, _) = self.nearest(&unit);
            indices.push(idx);
            coefficients.push(r);
            for (res, w) in residual.iter_mut().zip(self.direction(idx)) {
                *res -= r * w;
            }
        }
        SeriesTerms {
            indices,
            coefficients,
            residual_norm: norm(&residual),
        }
    }

    /// Checks every stored invariant: unit norms, strict pairwise separation,
    /// the volumetric cardinality bound and the measured covering radius.
    pub fn validate(&self) -> Result<(), NetError> {
        for w in self.iter() {
            if (norm(w) - 1.0).abs() > 1e-12 {
                return Err(NetError::ConstructionFailure(format!(
                    "direction is not unit length: |w| = {}",
                    norm(w)
                )));
            }
        }
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = chord(self.direction(i), self.direction(j));
                if d <= self.eps {
                    return Err(NetError::ConstructionFailure(format!(
                        "directions {i} and {j} are only {d} apart (eps = {})",
                        self.eps
                    )));
                }
            }
        }
        let bound = (3.0 / self.eps).powi(self.dim as i32);
        if (n as f64) > bound {
            return Err(NetError::ConstructionFailure(format!(
                "cardinality {n} exceeds (3/eps)^d = {bound}"
            )));
        }
        if self.covering_radius > self.eps {
            return Err(NetError::ConstructionFailure(format!(
                "measured covering radius {} exceeds eps {}; candidate pool too small",
                self.covering_radius, self.eps
            )));
        }
        Ok(())
    }

    /// Measures the covering radius against `n_probes` random unit probes.
    pub fn measure_covering(&self, n_probes: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0_f64;
        let mut probe = vec![0.0; self.dim];
        for _ in 0..n_probes {
            random_unit(&mut rng, &mut probe);
            let (_, d) = self.nearest(&probe);
            worst = worst.max(d);
        }
        worst
    }

    /// Probe directions for gauge-ratio suprema: the net directions followed
    /// by four times as many random unit probes, derived from the net seed.
    pub fn probe_directions(&self) -> &[f64] {
        self.probes.get_or_init(|| {
            let mut out = self.directions.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x517cc1b727220a95);
            let mut probe = vec![0.0; self.dim];
            for _ in 0..4 * self.len() {
                random_unit(&mut rng, &mut probe);
                out.extend_from_slice(&probe);
            }
            out
        })
    }

    /// Identity fingerprint used to detect representation mismatches.
    pub fn fingerprint(&self) -> (usize, u64, u64, usize) {
        (self.dim, self.eps.to_bits(), self.seed, self.len())
    }

    pub fn to_json(&self) -> String {
        let doc = NetJson {
            dim: self.dim,
            eps: self.eps,
            seed: self.seed,
            covering_radius: self.covering_radius,
            directions: self.iter().map(|w| w.to_vec()).collect(),
        };
        json::to_string_g17(&doc).expect("net serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, NetError> {
        let doc: NetJson = serde_json::from_str(text)
            .map_err(|e| NetError::InvalidParameter(format!("bad net json: {e}")))?;
        let flat: Vec<f64> = doc.directions.into_iter().flatten().collect();
        let net = Self::from_directions(doc.dim, doc.eps, doc.seed, flat)?;
        Ok(net)
    }
}

/// Result of [`DirectionNet::series_decompose`]: `indices[0]` is the base net
/// member and `coefficients[j]` multiplies `indices[j+1]`.
#[derive(Debug, Clone)]
pub struct SeriesTerms {
    pub indices: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
}

#[derive(Serialize, Deserialize)]
struct NetJson {
    dim: usize,
    eps: f64,
    seed: u64,
    covering_radius: f64,
    directions: Vec<Vec<f64>>,
}

fn chord(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Uniform angular net: the smallest count k with 2 sin(π/(2k)) <= eps.
fn angular_net(eps: f64) -> Vec<f64> {
    let k = ((std::f64::consts::PI / (2.0 * (eps / 2.0).asin())).ceil() as usize).max(3);
    let mut dirs = Vec::with_capacity(2 * k);
    for j in 0..k {
        let a = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
        dirs.push(a.cos());
        dirs.push(a.sin());
    }
    dirs
}

/// Greedy maximal ε-separation over a low-discrepancy candidate pool.
fn greedy_net(dim: usize, eps: f64, seed: u64) -> Result<Vec<f64>, NetError> {
    let bound = (3.0 / eps).powi(dim as i32);
    let pool_size = (50.0 * bound).max(1e5).min(1e7) as usize;

    // Kronecker sequence driven by the generalized plastic constant, mapped
    // to the sphere through per-coordinate normal quantiles.
    let phi = plastic_constant(dim);
    let alphas: Vec<f64> = (1..=dim).map(|i| (1.0 / phi.powi(i as i32)).fract()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();

    let mut selected: Vec<f64> = Vec::new();
    let mut candidate = vec![0.0; dim];
    for k in 0..pool_size {
        let mut degenerate = false;
        for i in 0..dim {
            let u = (offsets[i] + (k as f64 + 1.0) * alphas[i]).fract();
            let u = u.clamp(1e-12, 1.0 - 1e-12);
            candidate[i] = std::f64::consts::SQRT_2 * (2.0 * u - 1.0).inv_error();
            if !candidate[i].is_finite() {
                degenerate = true;
            }
        }
        let r = norm(&candidate);
        if degenerate || r < 1e-9 {
            continue;
        }
        for c in candidate.iter_mut() {
            *c /= r;
        }
        let separated = selected
            .chunks_exact(dim)
            .all(|w| chord(w, &candidate) > eps);
        if separated {
            selected.extend_from_slice(&candidate);
        }
    }
    if selected.is_empty() {
        return Err(NetError::ConstructionFailure("empty candidate pool".into()));
    }
    // Close covering gaps the finite pool left behind: an uncovered point is
    // more than eps from every member, so adding it preserves the packing.
    // First a dense low-discrepancy sweep, then random batches until three
    // consecutive batches find no gap.
    let sweep = (20.0 * pool_size as f64).min(4e6) as usize;
    let mut sweep_offsets = offsets.clone();
    for o in sweep_offsets.iter_mut() {
        *o = (*o + 0.5).fract();
    }
    for k in 0..sweep {
        let mut degenerate = false;
        for i in 0..dim {
            let u = (sweep_offsets[i] + (k as f64 + 1.0) * alphas[i]).fract();
            let u = u.clamp(1e-12, 1.0 - 1e-12);
            candidate[i] = std::f64::consts::SQRT_2 * (2.0 * u - 1.0).inv_error();
            if !candidate[i].is_finite() {
                degenerate = true;
            }
        }
        let r = norm(&candidate);
        if degenerate || r < 1e-9 {
            continue;
        }
        for c in candidate.iter_mut() {
            *c /= r;
        }
        if selected.chunks_exact(dim).all(|w| chord(w, &candidate) > eps) {
            selected.extend_from_slice(&candidate);
        }
    }
    let mut probe_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2545f4914f6cdd1d);
    let mut probe = vec![0.0; dim];
    let mut clean_rounds = 0;
    for _ in 0..400 {
        let mut added = 0usize;
        for _ in 0..2 * COVERING_PROBES {
            random_unit(&mut probe_rng, &mut probe);
            let covered = selected.chunks_exact(dim).any(|w| chord(w, &probe) <= eps);
            if !covered {
                selected.extend_from_slice(&probe);
                added += 1;
            }
        }
        if added == 0 {
            clean_rounds += 1;
            if clean_rounds >= 3 {
                break;
            }
        } else {
            clean_rounds = 0;
        }
    }
    Ok(selected)
}

/// Positive root of x^{d+1} = x + 1 (golden ratio for d = 1).
fn plastic_constant(dim: usize) -> f64 {
    let p = dim as f64 + 1.0;
    let mut x = 1.5_f64;
    for _ in 0..64 {
        x = (x + 1.0).powf(1.0 / p);
    }
    x
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

type NetKey = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<NetKey, Arc<DirectionNet>>> {
    static CACHE: OnceLock<Mutex<HashMap<NetKey, Arc<DirectionNet>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Nets are generated once per `(dim, eps, seed)` and shared by identity.
pub fn cached_net(dim: usize, eps: f64, seed: u64) -> Result<Arc<DirectionNet>, NetError> {
    let key = (dim, eps.to_bits(), seed);
    if let Some(net) = cache().lock().expect("net cache lock").get(&key) {
        return Ok(net.clone());
    }
    let net = Arc::new(DirectionNet::build(dim, eps, seed)?);
    cache()
        .lock()
        .expect("net cache lock")
        .insert(key, net.clone());
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_net_is_the_two_signs() {
        let net = DirectionNet::build(1, 0.5, 0).unwrap();
        assert_eq!(net.len(), 2);
        let mut vals: Vec<f64> = net.iter().map(|w| w[0]).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(vals, vec![-1.0, 1.0]);
        assert_eq!(net.covering_radius(), 0.0);
    }

    #[test]
    fn planar_net_at_eps_tenth_has_32_directions() {
        let net = DirectionNet::build(2, 0.1, 0).unwrap();
        assert_eq!(net.len(), 32);
        // closed-form chords of the uniform angular net
        let sep = 2.0 * (std::f64::consts::PI / 32.0).sin();
        let cov = 2.0 * (std::f64::consts::PI / 64.0).sin();
        assert!(sep > 0.1 && (sep - 0.19603).abs() < 1e-4);
        assert!(net.covering_radius() <= cov + 1e-12);
        assert!(net.covering_radius() > cov - 1e-3);
    }

    #[test]
    fn four_axis_directions_are_a_valid_eps_one_net() {
        let dirs = vec![1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0];
        let net = DirectionNet::from_directions(2, 1.0, 7, dirs).unwrap();
        assert_eq!(net.len(), 4);
        let cov_exact = (2.0_f64 - std::f64::consts::SQRT_2).sqrt();
        assert!(net.covering_radius() <= 1.0);
        assert!((net.covering_radius() - cov_exact).abs() < 2e-3);
        assert!(4.0 <= (3.0_f64 / 1.0).powi(2));
    }

    #[test]
    fn build_rejects_eps_outside_open_interval() {
        assert!(DirectionNet::build(2, 1.0, 0).is_err());
        assert!(DirectionNet::build(2, 0.0, 0).is_err());
    }

    #[test]
    fn series_of_a_net_member_is_exact() {
        let net = DirectionNet::build(2, 0.1, 0).unwrap();
        let theta = net.direction(5).to_vec();
        let s = net.series_decompose(&theta, 4);
        assert_eq!(s.indices, vec![5]);
        assert!(s.coefficients.is_empty());
        assert_eq!(s.residual_norm, 0.0);
    }

    #[test]
    fn series_residual_decays_geometrically() {
        let net = DirectionNet::build(2, 0.1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut theta = vec![0.0; 2];
        for _ in 0..100 {
            random_unit(&mut rng, &mut theta);
            for k in 0..=5usize {
                let s = net.series_decompose(&theta, k);
                assert!(
                    s.residual_norm <= 0.1f64.powi(k as i32 + 1) + 1e-15,
                    "k = {k}: residual {}",
                    s.residual_norm
                );
                for (j, c) in s.coefficients.iter().enumerate() {
                    assert!(*c <= 0.1f64.powi(j as i32 + 1) + 1e-15);
                }
            }
        }
        let s3 = net.series_decompose(&[0.6, 0.8], 3);
        assert!(s3.residual_norm <= 1e-4);
    }

    #[test]
    fn functional_sandwich_holds() {
        let net = DirectionNet::build(2, 0.1, 0).unwrap();
        assert_eq!(net.functional(&[0.0, 0.0]), 0.0);
        let w = net.direction(3).to_vec();
        assert!((net.functional(&w) - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x = vec![0.0; 2];
        for _ in 0..1000 {
            random_unit(&mut rng, &mut x);
            let scale: f64 = 5.0 * rng.gen::<f64>() + 1e-3;
            let v: Vec<f64> = x.iter().map(|t| t * scale).collect();
            let f = net.functional(&v);
            assert!(f <= scale + 1e-12);
            assert!(f >= (1.0 - 0.1) * scale - 1e-12);
        }
        let y = [3.0, 4.0];
        let f = net.functional(&y);
        assert!((4.5..=5.0 + 1e-12).contains(&f));
    }

    #[test]
    fn greedy_three_dimensional_net_meets_all_invariants() {
        let net = DirectionNet::build(3, 0.3, 42).unwrap();
        net.validate().unwrap();
        assert!((net.len() as f64) <= (3.0f64 / 0.3).powi(3));
        let cov = net.measure_covering(10_000, 99);
        assert!(cov <= 0.3, "covering {cov}");
    }

    #[test]
    fn json_round_trip_is_exact() {
        let net = DirectionNet::build(2, 0.37, 5).unwrap();
        let text = net.to_json();
        let back = DirectionNet::from_json(&text).unwrap();
        assert_eq!(net.fingerprint(), back.fingerprint());
        for (a, b) in net.iter().zip(back.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn cached_nets_share_identity() {
        let a = cached_net(2, 0.2, 1).unwrap();
        let b = cached_net(2, 0.2, 1).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
