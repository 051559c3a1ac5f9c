//! The three deterministic approximant bodies of a log-concave measure, the
//! convex floating body of a polygon, and the outer-mass function.
//!
//! Run with `cargo run --release --example floating_bodies`.

use polyfloat::body::log_hausdorff;
use polyfloat::density::DensityND;
use polyfloat::float::{
    convex_floating_body_2d, floating_polytope, level_set_body, radon_body, zeta,
};
use polyfloat::net::cached_net;

fn main() {
    let net = cached_net(2, 0.02, 0).unwrap();
    let sz2 = DensityND::schechtman_zinn(2.0, 2).unwrap();

    // floating polytope, level-set body and Radon body shrink together as
    // delta decreases, and their mutual distances tend to 1
    println!("delta      F radius   D radius   R radius   d_L(F,D)  d_L(F,R)");
    for delta in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
        let f = floating_polytope(&sz2, &net, delta).unwrap();
        let d = level_set_body(&sz2, &net, delta).unwrap();
        let r = radon_body(&sz2, &net, delta).unwrap();
        let (fd, _) = log_hausdorff(&f.body, &d.body.to_support()).unwrap();
        let (fr, _) = log_hausdorff(&f.body, &r.body).unwrap();
        println!(
            "{delta:8.0e}   {:.5}    {:.5}    {:.5}    {:.5}   {:.5}",
            f.body.support_values()[0],
            d.body.radial_values()[0],
            r.body.support_values()[0],
            fd,
            fr
        );
    }

    // the convex floating body of the unit square: cap lines cutting off
    // exactly lambda of the area, by polygon clipping and bisection
    let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let k_lambda = convex_floating_body_2d(&square, &net, 0.01).unwrap();
    println!(
        "\nunit square floating body at lambda 0.01: support along e1 = {:.6} (exact 0.49)",
        k_lambda.support_values()[0]
    );

    // outer mass zeta(eps) = mu{f < eps} by Monte Carlo with a 99% CI
    let gauss = DensityND::standard_gaussian(2);
    for eps in [1e-2, 1e-3] {
        let (est, ci) = zeta(&gauss, eps, 400_000, 11).unwrap();
        println!(
            "zeta({eps:.0e}) = {est:.5} +- {ci:.5}   (planar gaussian: exactly 2 pi eps = {:.5})",
            2.0 * std::f64::consts::PI * eps
        );
    }
}
