//! Convex bodies represented by per-direction scalars on a shared net.
//!
//! A [`SupportBody`] stores support values h(ω) = sup_{x∈K} <x-center, ω> and
//! represents the H-rep intersection of the corresponding half-spaces; a
//! [`RadialBody`] stores radial values and represents the hull of
//! `center + rho(ω)·ω`. Gauges, polars and the three distances (Hausdorff,
//! logarithmic Hausdorff, Banach-Mazur upper bound) all reduce to arithmetic
//! over the net, plus random probe directions for gauge-ratio suprema.
//!
//! Every distance inherits the multiplicative net uncertainty `(1-eps)^{-1}`;
//! callers choose `eps` so that this factor is small against the effect they
//! measure.

use crate::json;
use crate::net::DirectionNet;
use crate::numeric::{dot, nelder_mead, norm};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, thiserror::Error)]
pub enum BodyError {
    #[error("bodies use incompatible net representations")]
    NetMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("center is not interior: some support value is <= 0")]
    CenterNotInterior,
    #[error("polar requires the body to be centered at the origin")]
    PolarRequiresOrigin,
    #[error("point is not interior to both bodies")]
    PointNotInterior,
    #[error("no common interior point found")]
    DisjointInteriors,
    #[error("net error: {0}")]
    Net(#[from] crate::net::NetError),
}

/// H-rep body: intersection over net directions of half-spaces
/// `<x - center, ω> <= h(ω)`.
#[derive(Debug, Clone)]
pub struct SupportBody {
    net: Arc<DirectionNet>,
    center: Vec<f64>,
    h: Vec<f64>,
}

/// V-rep companion: hull of the points `center + rho(ω)·ω`, `rho(ω) > 0`.
#[derive(Debug, Clone)]
pub struct RadialBody {
    net: Arc<DirectionNet>,
    center: Vec<f64>,
    rho: Vec<f64>,
}

impl SupportBody {
    pub fn new(
        net: Arc<DirectionNet>,
        center: Vec<f64>,
        h: Vec<f64>,
    ) -> Result<Self, BodyError> {
        if center.len() != net.dim() || h.len() != net.len() {
            return Err(BodyError::InvalidParameter(
                "center/support dimensions do not match the net".into(),
            ));
        }
        Ok(SupportBody { net, center, h })
    }

    /// Circumscribed net polytope of a point cloud: h(ω) = max_i <p_i - center, ω>.
    pub fn of_points(
        points: &[f64],
        net: Arc<DirectionNet>,
        center: Vec<f64>,
    ) -> Result<Self, BodyError> {
        let dim = net.dim();
        if points.is_empty() || points.len() % dim != 0 {
            return Err(BodyError::InvalidParameter(
                "point buffer must hold at least one point".into(),
            ));
        }
        if center.len() != dim {
            return Err(BodyError::InvalidParameter("center has wrong dimension".into()));
        }
        let mut h = vec![f64::NEG_INFINITY; net.len()];
        let mut shifted = vec![0.0; dim];
        for p in points.chunks_exact(dim) {
            for i in 0..dim {
                shifted[i] = p[i] - center[i];
            }
            for (hi, w) in h.iter_mut().zip(net.iter()) {
                let v = dot(&shifted, w);
                if v > *hi {
                    *hi = v;
                }
            }
        }
        Ok(SupportBody { net, center, h })
    }

    pub fn net(&self) -> &Arc<DirectionNet> {
        &self.net
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn support_values(&self) -> &[f64] {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.net.dim()
    }

    /// Same body expressed about a different center.
    pub fn recentered(&self, new_center: &[f64]) -> SupportBody {
        let h = self
            .h
            .iter()
            .zip(self.net.iter())
            .map(|(hi, w)| {
                let shift: f64 = w
                    .iter()
                    .zip(self.center.iter().zip(new_center))
                    .map(|(wi, (c, nc))| wi * (c - nc))
                    .sum();
                hi + shift
            })
            .collect();
        SupportBody {
            net: self.net.clone(),
            center: new_center.to_vec(),
            h,
        }
    }

    /// Body scaled by `s > 0` about its center.
    pub fn scaled(&self, s: f64) -> SupportBody {
        SupportBody {
            net: self.net.clone(),
            center: self.center.clone(),
            h: self.h.iter().map(|v| v * s).collect(),
        }
    }

    /// Exact Minkowski functional of the represented H-rep body about its
    /// center: max_ω <x - center, ω> / h(ω).
    pub fn gauge(&self, x: &[f64]) -> Result<f64, BodyError> {
        let offsets = OffsetView::about(self, &self.center)?;
        Ok(offsets.gauge_shifted(&sub(x, &self.center)))
    }

    /// Largest ball about the center inside the represented body: min h(ω).
    pub fn inradius(&self) -> f64 {
        self.h.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Rigorous enclosing radius about the center: max h(ω) / (1 - eps).
    pub fn circumradius_upper(&self) -> f64 {
        let hmax = self.h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hmax / (1.0 - self.net.eps())
    }

    /// Polar body (reciprocal support values) about the origin.
    pub fn polar(&self) -> Result<RadialBody, BodyError> {
        if norm(&self.center) > 1e-12 {
            return Err(BodyError::PolarRequiresOrigin);
        }
        if self.h.iter().any(|&v| v <= 0.0) {
            return Err(BodyError::CenterNotInterior);
        }
        Ok(RadialBody {
            net: self.net.clone(),
            center: self.center.clone(),
            rho: self.h.iter().map(|v| 1.0 / v).collect(),
        })
    }

    /// Upper bound for the dual functional sup_{z∈K} <z, y> via the greedy
    /// series expansion of y over the net. Requires eps < 1.
    pub fn dual_norm_upper(&self, y: &[f64], terms: usize) -> f64 {
        let r = norm(y);
        if r == 0.0 {
            return 0.0;
        }
        let unit: Vec<f64> = y.iter().map(|v| v / r).collect();
        let s = self.net.series_decompose(&unit, terms);
        let mut total = self.h[s.indices[0]];
        for (c, idx) in s.coefficients.iter().zip(s.indices.iter().skip(1)) {
            total += c * self.h[*idx];
        }
        total += s.residual_norm * self.circumradius_upper();
        r * total
    }

    pub fn to_json(&self) -> String {
        self.to_json_with(None, None)
    }

    /// Body JSON with optional construction metadata attached.
    pub fn to_json_with(&self, delta: Option<f64>, density_ref: Option<&str>) -> String {
        json::to_string_g17(&BodyJson {
            net: NetRef {
                dim: self.net.dim(),
                eps: self.net.eps(),
                seed: self.net.seed(),
            },
            center: self.center.clone(),
            kind: "support".into(),
            values: self.h.clone(),
            delta,
            density_ref: density_ref.map(|s| s.to_string()),
        })
        .expect("body serializes")
    }
}

impl RadialBody {
    pub fn new(
        net: Arc<DirectionNet>,
        center: Vec<f64>,
        rho: Vec<f64>,
    ) -> Result<Self, BodyError> {
        if center.len() != net.dim() || rho.len() != net.len() {
            return Err(BodyError::InvalidParameter(
                "center/radial dimensions do not match the net".into(),
            ));
        }
        if rho.iter().any(|&v| v <= 0.0) {
            return Err(BodyError::InvalidParameter("radial values must be positive".into()));
        }
        Ok(RadialBody { net, center, rho })
    }

    pub fn net(&self) -> &Arc<DirectionNet> {
        &self.net
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radial_values(&self) -> &[f64] {
        &self.rho
    }

    /// Reciprocal involution; the double polar restores the stored support
    /// values exactly.
    pub fn polar(&self) -> Result<SupportBody, BodyError> {
        if norm(&self.center) > 1e-12 {
            return Err(BodyError::PolarRequiresOrigin);
        }
        Ok(SupportBody {
            net: self.net.clone(),
            center: self.center.clone(),
            h: self.rho.iter().map(|v| 1.0 / v).collect(),
        })
    }

    /// Exact support values of the stored vertex set on the same net.
    pub fn to_support(&self) -> SupportBody {
        let k = self.net.len();
        let mut h = vec![f64::NEG_INFINITY; k];
        for (j, w) in self.net.iter().enumerate() {
            for (rho, v) in self.rho.iter().zip(self.net.iter()) {
                let s = rho * dot(v, w);
                if s > h[j] {
                    h[j] = s;
                }
            }
        }
        SupportBody {
            net: self.net.clone(),
            center: self.center.clone(),
            h,
        }
    }

    pub fn to_json(&self) -> String {
        self.to_json_with(None, None)
    }

    pub fn to_json_with(&self, delta: Option<f64>, density_ref: Option<&str>) -> String {
        json::to_string_g17(&BodyJson {
            net: NetRef {
                dim: self.net.dim(),
                eps: self.net.eps(),
                seed: self.net.seed(),
            },
            center: self.center.clone(),
            kind: "radial".into(),
            values: self.rho.clone(),
            delta,
            density_ref: density_ref.map(|s| s.to_string()),
        })
        .expect("body serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct NetRef {
    dim: usize,
    eps: f64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct BodyJson {
    net: NetRef,
    center: Vec<f64>,
    kind: String,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density_ref: Option<String>,
}

/// Either body kind, as stored in body JSON files.
pub enum AnyBody {
    Support(SupportBody),
    Radial(RadialBody),
}

impl AnyBody {
    pub fn from_json(text: &str) -> Result<AnyBody, BodyError> {
        let doc: BodyJson = serde_json::from_str(text)
            .map_err(|e| BodyError::InvalidParameter(format!("bad body json: {e}")))?;
        let net = crate::net::cached_net(doc.net.dim, doc.net.eps, doc.net.seed)?;
        match doc.kind.as_str() {
            "support" => Ok(AnyBody::Support(SupportBody::new(net, doc.center, doc.values)?)),
            "radial" => Ok(AnyBody::Radial(RadialBody::new(net, doc.center, doc.values)?)),
            other => Err(BodyError::InvalidParameter(format!("unknown body kind {other}"))),
        }
    }

    pub fn into_support(self) -> SupportBody {
        match self {
            AnyBody::Support(b) => b,
            AnyBody::Radial(r) => r.to_support(),
        }
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn same_net(a: &SupportBody, b: &SupportBody) -> Result<(), BodyError> {
    if Arc::ptr_eq(&a.net, &b.net) || a.net.fingerprint() == b.net.fingerprint() {
        Ok(())
    } else {
        Err(BodyError::NetMismatch)
    }
}

/// Support offsets of a body about an arbitrary reference point, used for
/// gauge evaluation. Fails unless the point is interior (all offsets > 0).
struct OffsetView<'a> {
    net: &'a DirectionNet,
    offsets: Vec<f64>,
}

impl<'a> OffsetView<'a> {
    fn about(body: &'a SupportBody, x: &[f64]) -> Result<Self, BodyError> {
        let mut offsets = Vec::with_capacity(body.h.len());
        for (hi, w) in body.h.iter().zip(body.net.iter()) {
            let shift: f64 = w
                .iter()
                .zip(body.center.iter().zip(x))
                .map(|(wi, (c, xi))| wi * (c - xi))
                .sum();
            let o = hi + shift;
            if o <= 0.0 {
                return Err(BodyError::PointNotInterior);
            }
            offsets.push(o);
        }
        Ok(OffsetView {
            net: &body.net,
            offsets,
        })
    }

    /// Gauge of `x + v` about `x` given offsets about `x`.
    fn gauge_shifted(&self, v: &[f64]) -> f64 {
        let mut best = 0.0_f64;
        for (o, w) in self.offsets.iter().zip(self.net.iter()) {
            let g = dot(v, w) / o;
            if g > best {
                best = g;
            }
        }
        best
    }
}

/// Hausdorff distance on the shared net: max_ω |h_K(ω) - h_L(ω)| after
/// translating `l` to the center of `k`.
pub fn hausdorff_distance(k: &SupportBody, l: &SupportBody) -> Result<f64, BodyError> {
    same_net(k, l)?;
    let l = l.recentered(&k.center);
    Ok(k.h
        .iter()
        .zip(&l.h)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Logarithmic Hausdorff distance about a fixed point: the supremum over
/// probe directions of the gauge ratio between the two bodies.
pub fn log_hausdorff_about(
    k: &SupportBody,
    l: &SupportBody,
    x: &[f64],
) -> Result<f64, BodyError> {
    same_net(k, l)?;
    let vk = OffsetView::about(k, x).map_err(|_| BodyError::PointNotInterior)?;
    let vl = OffsetView::about(l, x).map_err(|_| BodyError::PointNotInterior)?;
    let dim = k.dim();
    let mut lambda = 1.0_f64;
    for theta in k.net.probe_directions().chunks_exact(dim) {
        let gk = vk.gauge_shifted(theta);
        let gl = vl.gauge_shifted(theta);
        if gk <= 0.0 || gl <= 0.0 {
            continue;
        }
        let r = gk / gl;
        lambda = lambda.max(r).max(1.0 / r);
    }
    Ok(lambda)
}

/// Best-found logarithmic Hausdorff distance: the infimum over interior
/// points is approximated by multi-start downhill simplex from the two body
/// centers and their midpoint. The result is always >= 1 and never exceeds
/// the about-point value at any start.
pub fn log_hausdorff(
    k: &SupportBody,
    l: &SupportBody,
) -> Result<(f64, Vec<f64>), BodyError> {
    same_net(k, l)?;
    let mid: Vec<f64> = k
        .center
        .iter()
        .zip(&l.center)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let mut starts = vec![k.center.clone(), l.center.clone(), mid];
    starts.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() < 1e-12));

    let scale = 0.1 * k.inradius().min(l.inradius()).abs().max(1e-6);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in &starts {
        if log_hausdorff_about(k, l, start).is_err() {
            continue;
        }
        let objective = |x: &[f64]| log_hausdorff_about(k, l, x).unwrap_or(f64::INFINITY);
        let (point, value) = nelder_mead(objective, start, scale, 400);
        if value.is_finite() && best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, point));
        }
    }
    best.ok_or(BodyError::DisjointInteriors)
}

/// Banach-Mazur upper bound `d_BM <= d_L^2`.
pub fn bm_upper(k: &SupportBody, l: &SupportBody) -> Result<f64, BodyError> {
    let (lambda, _) = log_hausdorff(k, l)?;
    Ok(lambda * lambda)
}

/// Exhaustive center scan for planar validation of [`log_hausdorff`].
/// Scans an axis-aligned grid of `resolution`^2 candidate centers inside the
/// bounding box of the two centers inflated by both inradii.
pub fn log_hausdorff_grid_2d(
    k: &SupportBody,
    l: &SupportBody,
    resolution: usize,
) -> Result<(f64, Vec<f64>), BodyError> {
    if k.dim() != 2 {
        return Err(BodyError::InvalidParameter("grid oracle is planar only".into()));
    }
    same_net(k, l)?;
    let r = k.inradius().max(l.inradius());
    let lo = [
        k.center[0].min(l.center[0]) - r,
        k.center[1].min(l.center[1]) - r,
    ];
    let hi = [
        k.center[0].max(l.center[0]) + r,
        k.center[1].max(l.center[1]) + r,
    ];
    let mut best: Option<(f64, Vec<f64>)> = None;
    for i in 0..resolution {
        for j in 0..resolution {
            let x = [
                lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / resolution as f64,
                lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / resolution as f64,
            ];
            if let Ok(v) = log_hausdorff_about(k, l, &x) {
                if best.as_ref().map_or(true, |(b, _)| v < *b) {
                    best = Some((v, x.to_vec()));
                }
            }
        }
    }
    best.ok_or(BodyError::DisjointInteriors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::cached_net;

    fn unit_ball(net: &Arc<DirectionNet>, r: f64) -> SupportBody {
        SupportBody::new(net.clone(), vec![0.0; net.dim()], vec![r; net.len()]).unwrap()
    }

    fn square(net: &Arc<DirectionNet>) -> SupportBody {
        let h = net.iter().map(|w| w[0].abs() + w[1].abs()).collect();
        SupportBody::new(net.clone(), vec![0.0, 0.0], h).unwrap()
    }

    #[test]
    fn support_of_single_point_about_itself_is_zero() {
        let net = cached_net(2, 0.1, 0).unwrap();
        let b = SupportBody::of_points(&[0.3, -0.7], net, vec![0.3, -0.7]).unwrap();
        assert!(b.support_values().iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn support_of_cross_polytope() {
        let net = cached_net(2, 0.1, 0).unwrap();
        let pts = [1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0];
        let b = SupportBody::of_points(&pts, net.clone(), vec![0.0, 0.0]).unwrap();
        for (h, w) in b.support_values().iter().zip(net.iter()) {
            assert!((h - w[0].abs().max(w[1].abs())).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_point_list_is_rejected() {
        let net = cached_net(2, 0.1, 0).unwrap();
        assert!(matches!(
            SupportBody::of_points(&[], net, vec![0.0, 0.0]),
            Err(BodyError::InvalidParameter(_))
        ));
    }

    #[test]
    fn gauge_of_center_is_zero_and_ball_gauge_is_sandwiched() {
        let net = cached_net(2, 0.1, 0).unwrap();
        let ball = unit_ball(&net, 1.0);
        assert_eq!(ball.gauge(&[0.0, 0.0]).unwrap(), 0.0);
        let g = ball.gauge(&[2.0 * 0.6, 2.0 * 0.8]).unwrap();
        assert!((1.8..=2.0 + 1e-12).contains(&g), "gauge {g}");
    }

    #[test]
    fn gauge_of_square_along_diagonal_is_exact() {
        let net = cached_net(2, 0.1, 0).unwrap();
        let sq = square(&net);
        let g = sq.gauge(&[2.0, 2.0]).unwrap();
        assert!((g - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gauge_requires_interior_center() {
        let net = cached_net(2, 0.1, 0).unwrap();
        let mut h = vec![1.0; net.len()];
        h[3] = -0.1;
        let b = SupportBody::new(net, vec![0.0, 0.0], h).unwrap();
        assert!(matches!(b.gauge(&[0.5, 0.0]), Err(BodyError::PointNotInterior)));
    }

    #[test]
    fn polar_is_a_reciprocal_involution() {
        let net = cached_net(2, 0.1, 0).unwrap();
        let ball = unit_ball(&net, 2.5);
        let p = ball.polar().unwrap();
        assert!(p.radial_values().iter().all(|&v| (v - 0.4).abs() < 1e-15));
        let back = p.polar().unwrap();
        assert_eq!(back.support_values(), ball.support_values());
    }

    #[test]
    fn polar_of_square_is_the_cross_polytope() {
        let net = cached_net(2, 0.1, 0).unwrap();
        let sq = square(&net);
        let p = sq.polar().unwrap();
        // net direction 0 is e1, direction 4 is the diagonal (45 degrees)
        assert!((p.radial_values()[0] - 1.0).abs() < 1e-12);
        let diag = p.radial_values()[4];
        assert!((diag - 1.0 / std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn polar_requires_origin_center() {
        let net = cached_net(2, 0.1, 0).unwrap();
        let b = SupportBody::new(net, vec![0.5, 0.0], vec![1.0; 32]).unwrap();
        assert!(matches!(b.polar(), Err(BodyError::PolarRequiresOrigin)));
    }

    #[test]
    fn hausdorff_trivials_and_square_vs_disk() {
        let net = cached_net(2, 0.02, 0).unwrap();
        let ball = unit_ball(&net, 1.0);
        let ball2 = unit_ball(&net, 2.0);
        assert_eq!(hausdorff_distance(&ball, &ball).unwrap(), 0.0);
        assert!((hausdorff_distance(&ball, &ball2).unwrap() - 1.0).abs() < 1e-15);
        let sq = square(&net);
        let d = hausdorff_distance(&sq, &ball).unwrap();
        assert!(
            (d - (std::f64::consts::SQRT_2 - 1.0)).abs() < 2e-4,
            "square/disk support gap {d}"
        );
    }

    #[test]
    fn hausdorff_translates_to_a_common_center() {
        let net = cached_net(2, 0.05, 0).unwrap();
        let ball = unit_ball(&net, 1.0);
        let shifted = ball.recentered(&[0.3, -0.2]);
        assert!(hausdorff_distance(&ball, &shifted).unwrap() < 1e-14);
    }

    #[test]
    fn log_hausdorff_about_trivials() {
        let net = cached_net(2, 0.05, 0).unwrap();
        let b1 = unit_ball(&net, 1.0);
        let b2 = unit_ball(&net, 2.0);
        assert!((log_hausdorff_about(&b1, &b1, &[0.1, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((log_hausdorff_about(&b1, &b2, &[0.0, 0.0]).unwrap() - 2.0).abs() < 1e-12);
        let sq = square(&net);
        let lam = log_hausdorff_about(&sq, &b1, &[0.0, 0.0]).unwrap();
        assert!((lam - std::f64::consts::SQRT_2).abs() < 5e-3, "lambda {lam}");
    }

    #[test]
    fn log_hausdorff_search_never_beats_its_starts() {
        let net = cached_net(2, 0.05, 0).unwrap();
        let a = unit_ball(&net, 1.0);
        let b = unit_ball(&net, 1.0).recentered(&[-0.5, 0.0]);
        // recentered returns the same geometric body; build a translated one instead
        let mut h = vec![0.0; net.len()];
        for (hi, w) in h.iter_mut().zip(net.iter()) {
            *hi = 1.0 + 0.5 * w[0];
        }
        let translated = SupportBody::new(net.clone(), vec![0.0, 0.0], h).unwrap();
        drop(b);
        let (lam, _) = log_hausdorff(&a, &translated).unwrap();
        for start in [[0.0, 0.0], [0.25, 0.0]] {
            let about = log_hausdorff_about(&a, &translated, &start).unwrap();
            assert!(lam <= about + 1e-9);
        }
        assert!(lam >= 1.0);
        let (same, _) = log_hausdorff(&a, &a).unwrap();
        assert!((same - 1.0).abs() < 1e-12);
    }

    #[test]
    fn off_center_rectangle_prefers_an_interior_witness() {
        let net = cached_net(2, 0.05, 0).unwrap();
        // K = [0,2] x [-1,1] about its centroid (1, 0)
        let h: Vec<f64> = net.iter().map(|w| w[0].abs() + w[1].abs()).collect();
        let rect = SupportBody::new(net.clone(), vec![1.0, 0.0], h).unwrap();
        let disk = unit_ball(&net, 1.0);
        let (lam, witness) = log_hausdorff(&rect, &disk).unwrap();
        let (oracle, _) = log_hausdorff_grid_2d(&rect, &disk, 60).unwrap();
        assert!(lam <= oracle * 1.02 + 1e-9, "search {lam} vs grid {oracle}");
        assert!(witness[0] > 0.3, "witness {witness:?}");
    }

    #[test]
    fn bm_upper_is_the_square_of_log_hausdorff() {
        let net = cached_net(2, 0.02, 0).unwrap();
        let b1 = unit_ball(&net, 1.0);
        let b2 = unit_ball(&net, 2.0);
        assert!((bm_upper(&b1, &b1).unwrap() - 1.0).abs() < 1e-12);
        // loose by design: the true Banach-Mazur distance of two balls is 1
        assert!((bm_upper(&b1, &b2).unwrap() - 4.0).abs() < 1e-9);
        let sq = square(&net);
        let bm = bm_upper(&sq, &b1).unwrap();
        assert!((bm - 2.0).abs() < 0.05, "bm {bm}");
    }

    #[test]
    fn dual_norm_upper_dominates_point_suprema() {
        use rand::{Rng, SeedableRng};
        let net = cached_net(2, 0.1, 0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let pts: Vec<f64> = (0..200).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let body = SupportBody::of_points(&pts, net.clone(), vec![0.0, 0.0]).unwrap();
        for _ in 0..200 {
            let y = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            let upper = body.dual_norm_upper(&y, 8);
            let exact_pts = pts
                .chunks_exact(2)
                .map(|p| p[0] * y[0] + p[1] * y[1])
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(upper + 1e-12 >= exact_pts, "upper {upper} < max point {exact_pts}");
            let x = [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
            let g = body.gauge(&x).unwrap();
            let lhs = x[0] * y[0] + x[1] * y[1];
            assert!(lhs <= g * upper + 1e-12, "duality violated: {lhs} > {g} * {upper}");
        }
    }

    #[test]
    fn body_json_round_trip() {
        let net = cached_net(2, 0.1, 0).unwrap();
        let b = unit_ball(&net, 1.5);
        let text = b.to_json();
        match AnyBody::from_json(&text).unwrap() {
            AnyBody::Support(back) => {
                assert_eq!(back.support_values(), b.support_values());
                assert_eq!(back.center(), b.center());
            }
            _ => panic!("expected support body"),
        }
    }
}
