//! The universal measure: a concave body-valued map over a family of shapes,
//! its gauge, the induced log-concave density, and rejection sampling.
//!
//! Run with `cargo run --release --example universal_measure`.

use polyfloat::net::cached_net;
use polyfloat::universal::{
    alpha, bm_density_check, level_set_identity_check, standard_family, KappaMap, StandardShape,
    UniversalDensity,
};
use std::sync::Arc;

fn main() {
    let net = cached_net(2, 0.05, 0).unwrap();
    let family = standard_family(
        &net,
        &[StandardShape::Square, StandardShape::Disk, StandardShape::Triangle],
    )
    .unwrap();
    let kappa = Arc::new(KappaMap::new(family));

    // the coefficient schedule walks through the family: near t = 2^{2n^2}
    // the n-th body dominates the Minkowski sum
    for n in 1..=3usize {
        let t = 2f64.powi(2 * (n * n) as i32);
        let dominance = kappa.dominance_numerator(n).unwrap() / alpha(n, t);
        let bm = bm_density_check(&kappa, n).unwrap();
        println!(
            "n={n}: t = 2^{:<2} dominance ratio {:.4} (bound {:.2}), bm_upper to K_{n} = {:.4}",
            2 * n * n,
            dominance,
            2f64.powi(-(n as i32) + 2),
            bm
        );
    }

    // the gauge g is convex; membership in kappa(t) is exactly {g <= t}
    let g = kappa.g_eval(&[4.0, 0.0]).unwrap();
    println!("g((4,0)) = {g:.6}  (alpha_1 saturates at t = 4; the disk and triangle terms finish the climb)");

    // the density 2^{-g(cx)} with c normalizing the mass; its level sets at
    // heights 2^{-n} are exactly the rescaled kappa bodies
    let u = UniversalDensity::new(kappa.clone()).unwrap();
    println!("normalizing scale c = {:.6}", u.scale());
    for n in [1u32, 2, 3] {
        let d = level_set_identity_check(&u, n).unwrap();
        println!("level-set identity at 2^-{n}: d_L = {d:.5}");
    }

    // rejection sampling against the exponential envelope
    let s = u.sample(20_000, 99).unwrap();
    let mean_norm = s
        .points
        .chunks_exact(2)
        .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
        .sum::<f64>()
        / s.n as f64;
    println!("sampled {} points, mean norm {:.4}", s.n, mean_norm);
}
