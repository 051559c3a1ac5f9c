//! Shared numerical kernels: adaptive quadrature, bracketed bisection and a
//! small Nelder-Mead minimizer. Everything here is deterministic.

use special::Gamma;

/// Absolute tolerance used by default for one-dimensional quadrature.
pub const QUAD_TOL: f64 = 1e-10;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    // second disjunct: f64 cannot resolve the requested tolerance further
    if depth == 0
        || delta.abs() <= 15.0 * tol
        || delta.abs() <= 1e-14 * (left.abs() + right.abs())
    {
        left + right + delta / 15.0
    } else {
        adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson integration of `f` over the finite interval `[a, b]`
/// to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    adapt(&f, a, b, fa, fm, fb, whole, tol.max(1e-300), 48)
}

/// Integral of a non-negative, eventually decaying integrand over `[a, ∞)`.
///
/// Works through windows of doubling width starting at `width0`, refining each
/// window to a tolerance proportional to the running total, and stops once two
/// consecutive windows contribute less than `rel_tol` of the total.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, width0: f64, rel_tol: f64) -> f64 {
    let mut total = 0.0_f64;
    let mut lo = a;
    let mut w = width0.max(1e-8);
    let mut quiet = 0;
    for _ in 0..120 {
        let hi = lo + w;
        let rough = simpson(f(lo), f(0.5 * (lo + hi)), f(hi), w).abs();
        let tol = (rel_tol * total.abs().max(rough))
            .max(1e-15 * rough)
            .max(1e-300)
            * 0.25;
        let piece = integrate(&f, lo, hi, tol);
        total += piece;
        if piece.abs() <= rel_tol * total.abs().max(1e-300) {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        w *= 2.0;
    }
    total
}

/// Two-sided improper integral over the whole real line, split at `center`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, center: f64, width0: f64, rel_tol: f64) -> f64 {
    let right = integrate_to_infinity(&f, center, width0, rel_tol);
    let left = integrate_to_infinity(|t| f(2.0 * center - t), center, width0, rel_tol);
    left + right
}

// Gauss-Legendre nodes and weights on [-1, 1].
const GL7_X: [f64; 7] = [
    -0.9491079123427585,
    -0.7415311855993945,
    -0.4058451513773972,
    0.0,
    0.4058451513773972,
    0.7415311855993945,
    0.9491079123427585,
];
const GL7_W: [f64; 7] = [
    0.1294849661688697,
    0.2797053914892766,
    0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892766,
    0.1294849661688697,
];
const GL15_X: [f64; 15] = [
    -0.9879925180204854,
    -0.9372733924007060,
    -0.8482065834104272,
    -0.7244177313601701,
    -0.5709721726085388,
    -0.3941513470775634,
    -0.2011940939974345,
    0.0,
    0.2011940939974345,
    0.3941513470775634,
    0.5709721726085388,
    0.7244177313601701,
    0.8482065834104272,
    0.9372733924007060,
    0.9879925180204854,
];
const GL15_W: [f64; 15] = [
    0.0307532419961173,
    0.0703660474881081,
    0.1071592204671719,
    0.1395706779261543,
    0.1662692058169939,
    0.1861610000155622,
    0.1984314853271116,
    0.2025782419255613,
    0.1984314853271116,
    0.1861610000155622,
    0.1662692058169939,
    0.1395706779261543,
    0.1071592204671719,
    0.0703660474881081,
    0.0307532419961173,
];

fn gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, xs: &[f64], ws: &[f64]) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    xs.iter()
        .zip(ws)
        .map(|(x, w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}

/// `tol_rate` is an error budget per unit width, so the total error is
/// bounded by `tol_rate * (b - a)`. Panels whose GL7/GL15 disagreement is at
/// the f64 noise floor of the integrand are accepted as converged.
fn gl_adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol_rate: f64, depth: u32) -> f64 {
    let coarse = gl(f, a, b, &GL7_X, &GL7_W);
    let fine = gl(f, a, b, &GL15_X, &GL15_W);
    let err = (fine - coarse).abs();
    if depth == 0 || err <= tol_rate * (b - a) || err <= 4e-14 * fine.abs() {
        fine
    } else {
        let m = 0.5 * (a + b);
        gl_adapt(f, a, m, tol_rate, depth - 1) + gl_adapt(f, m, b, tol_rate, depth - 1)
    }
}

/// `log ∫_{lo}^{hi} exp(ln_f(y)) dy` for a log-concave integrand, evaluated
/// stably in log space: the peak is located first, the effective support is
/// bracketed at 45 nats below the peak, and the normalized integrand is
/// integrated by adaptive Gauss-Legendre panels.
///
/// `lo`/`hi` may be infinite. Returns `-inf` when the integrand vanishes.
pub fn ln_integral_log_concave<F: Fn(f64) -> f64>(
    ln_f: F,
    lo: f64,
    hi: f64,
    peak_hint: f64,
    scale_hint: f64,
) -> f64 {
    let step = scale_hint.max(1e-10);
    let clamp = |y: f64| y.clamp(lo.max(-1e300), hi.min(1e300))
        ;
    let mut y0 = clamp(peak_hint);
    if !ln_f(y0).is_finite() {
        // walk toward the support if the hint fell outside it
        let mut found = false;
        for k in 1..200 {
            let s = step * (1.15f64).powi(k);
            for cand in [clamp(peak_hint + s), clamp(peak_hint - s)] {
                if ln_f(cand).is_finite() {
                    y0 = cand;
                    found = true;
                    break;
                }
            }
            if found {
                break;
            }
        }
        if !found {
            return f64::NEG_INFINITY;
        }
    }
    // climb to a bracket around the maximum
    let mut a = y0;
    let mut b = y0;
    let mut s = step;
    while clamp(b + s) > b && ln_f(clamp(b + s)) > ln_f(b) {
        b = clamp(b + s);
        s *= 2.0;
    }
    s = step;
    while clamp(a - s) < a && ln_f(clamp(a - s)) > ln_f(a) {
        a = clamp(a - s);
        s *= 2.0;
    }
    // golden-section refinement of the peak
    let phi = 0.6180339887498949;
    let (mut ga, mut gb) = (a, b);
    for _ in 0..60 {
        if gb - ga < 1e-9 * (1.0 + ga.abs().max(gb.abs())) {
            break;
        }
        let x1 = gb - phi * (gb - ga);
        let x2 = ga + phi * (gb - ga);
        if ln_f(x1) >= ln_f(x2) {
            gb = x2;
        } else {
            ga = x1;
        }
    }
    let peak = 0.5 * (ga + gb);
    let m = ln_f(peak);
    if !m.is_finite() {
        return f64::NEG_INFINITY;
    }
    // effective support: 45 nats below the peak on each side
    let drop = 45.0;
    let extend = |dir: f64| -> f64 {
        let mut prev = peak;
        let mut s = step;
        for _ in 0..400 {
            let cand = clamp(peak + dir * s);
            if (cand - peak).abs() <= (prev - peak).abs() {
                return prev; // hit the boundary
            }
            if !(ln_f(cand) > m - drop) {
                return cand;
            }
            prev = cand;
            s *= 1.7;
        }
        prev
    };
    let right = extend(1.0);
    let left = extend(-1.0);
    if !(right > left) {
        return f64::NEG_INFINITY;
    }
    let g = |y: f64| {
        let v = ln_f(y) - m;
        if v.is_finite() {
            v.exp()
        } else {
            0.0
        }
    };
    // coarse estimate fixes the adaptive tolerance scale
    let mut coarse = 0.0;
    for k in 0..8 {
        let x0 = left + (right - left) * k as f64 / 8.0;
        let x1 = left + (right - left) * (k + 1) as f64 / 8.0;
        coarse += gl(&g, x0, x1, &GL7_X, &GL7_W);
    }
    let tol_rate = 1e-13 * coarse.abs().max(1e-30) / (right - left);
    let integral = gl_adapt(&g, left, peak, tol_rate, 26)
        + gl_adapt(&g, peak, right, tol_rate, 26);
    m + integral.max(0.0).ln()
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum NumericError {
    #[error("failed to bracket a root: {0}")]
    NoBracket(&'static str),
}

/// Finds `x` with `f(x) = target` for a non-increasing `f`, expanding a
/// bracket around `start` and bisecting to interval width `tol_x`.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    start: f64,
    step0: f64,
    tol_x: f64,
) -> Result<f64, NumericError> {
    let mut lo;
    let mut hi;
    let mut step = step0.max(1e-12);
    if f(start) >= target {
        lo = start;
        hi = start + step;
        let mut tries = 0;
        while f(hi) > target {
            lo = hi;
            step *= 2.0;
            hi += step;
            tries += 1;
            if tries > 400 {
                return Err(NumericError::NoBracket("expansion to the right failed"));
            }
        }
    } else {
        hi = start;
        lo = start - step;
        let mut tries = 0;
        while f(lo) < target {
            hi = lo;
            step *= 2.0;
            lo -= step;
            tries += 1;
            if tries > 400 {
                return Err(NumericError::NoBracket("expansion to the left failed"));
            }
        }
    }
    while hi - lo > tol_x {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Downhill simplex minimization. Returns the best point and value found.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    scale: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let d = start.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    pts.push(start.to_vec());
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] += scale;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();

    let order = |pts: &mut Vec<Vec<f64>>, vals: &mut Vec<f64>| {
        let mut idx: Vec<usize> = (0..pts.len()).collect();
        idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(std::cmp::Ordering::Equal));
        *pts = idx.iter().map(|&i| pts[i].clone()).collect();
        *vals = idx.iter().map(|&i| vals[i]).collect();
    };

    for _ in 0..max_iter {
        order(&mut pts, &mut vals);
        let spread = vals[d] - vals[0];
        if spread.abs() <= 1e-12 * (1.0 + vals[0].abs()) {
            break;
        }
        // centroid of all but the worst
        let mut cen = vec![0.0; d];
        for p in pts.iter().take(d) {
            for (c, x) in cen.iter_mut().zip(p) {
                *c += x / d as f64;
            }
        }
        let worst = pts[d].clone();
        let refl: Vec<f64> = cen.iter().zip(&worst).map(|(c, w)| 2.0 * c - w).collect();
        let fr = f(&refl);
        if fr < vals[0] {
            let exp: Vec<f64> = cen.iter().zip(&worst).map(|(c, w)| 3.0 * c - 2.0 * w).collect();
            let fe = f(&exp);
            if fe < fr {
                pts[d] = exp;
                vals[d] = fe;
            } else {
                pts[d] = refl;
                vals[d] = fr;
            }
        } else if fr < vals[d - 1] {
            pts[d] = refl;
            vals[d] = fr;
        } else {
            let con: Vec<f64> = cen.iter().zip(&worst).map(|(c, w)| 0.5 * (c + w)).collect();
            let fc = f(&con);
            if fc < vals[d] {
                pts[d] = con;
                vals[d] = fc;
            } else {
                // shrink toward the best vertex
                for i in 1..=d {
                    let best = pts[0].clone();
                    for (x, b) in pts[i].iter_mut().zip(&best) {
                        *x = 0.5 * (*x + b);
                    }
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }
    order(&mut pts, &mut vals);
    (pts[0].clone(), vals[0])
}

/// Surface measure of the unit sphere `S^m` in `R^{m+1}`.
pub fn sphere_surface(m: usize) -> f64 {
    let k = (m as f64 + 1.0) / 2.0;
    2.0 * std::f64::consts::PI.powf(k) / Gamma::gamma(k)
}

/// Formats a float as a JSON/CSV-safe decimal with 17 significant digits.
pub fn g17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Euclidean norm.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = integrate(|t| 3.0 * t * t, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_mass_on_the_line() {
        let v = integrate_real_line(
            |t| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            0.0,
            1.0,
            1e-12,
        );
        assert!((v - 1.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn deep_exponential_tail_keeps_relative_accuracy() {
        let t = 30.0;
        let v = integrate_to_infinity(|s| (-(s - t)).exp(), t, 1.0, 1e-12) * (-t).exp();
        assert!((v / (-t).exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_hits_target_on_decreasing_function() {
        let x = bisect_decreasing(|t| (-t).exp(), 0.25, 0.0, 1.0, 1e-13).unwrap();
        assert!((x - (4.0f64).ln()).abs() < 1e-11);
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (p, v) = nelder_mead(|x| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2), &[0.0, 0.0], 0.5, 400);
        assert!(v < 1e-15);
        assert!((p[0] - 1.0).abs() < 1e-6 && (p[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn sphere_surface_known_values() {
        assert!((sphere_surface(0) - 2.0).abs() < 1e-12);
        assert!((sphere_surface(1) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((sphere_surface(2) - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
