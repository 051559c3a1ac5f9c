//! Log-concave density models: directional tails, quantiles, Radon values,
//! the Gnedenko interval for the sample maximum, and the tail sandwich.
//!
//! Run with `cargo run --release --example densities`.

use polyfloat::density::{
    exp_power_upper_integral, gnedenko_interval, tail_bracket, u_convexity_report, Density1D,
    DensityND,
};

fn main() {
    // directional tails dispatch to per-class backends
    let gauss = DensityND::standard_gaussian(2);
    let sz1 = DensityND::schechtman_zinn(1.0, 2).unwrap();
    let radial = DensityND::radial_exp_power(2.0, std::f64::consts::SQRT_2, 2).unwrap();
    let theta = [0.6, 0.8];
    for (name, d) in [("gaussian", &gauss), ("sz p=1", &sz1), ("radial", &radial)] {
        let m = d.marginal(&theta).unwrap();
        println!(
            "{name:9} backend {:22} tail(1.5) = {:.9}  radon(1.5) = {:.9}",
            m.backend_name(),
            m.tail(1.5),
            m.density(1.5)
        );
    }

    // quantiles by monotone bisection; the Laplace case is closed form
    let laplace = Density1D::exp_power(1.0).unwrap();
    println!(
        "laplace quantile(1 - 1/100) = {:.9} (log 50 = {:.9})",
        laplace.quantile(0.99).unwrap(),
        50.0f64.ln()
    );

    // the quantile interval for the maximum of n draws, with its exact
    // containment probability (1 - a/n)^n - (1 - b/n)^n
    let iv = gnedenko_interval(&Density1D::gaussian(), 100, 1.0).unwrap();
    println!(
        "gnedenko interval n=100, q=1: [{:.4}, {:.4}], prob {:.4} >= {:.4}",
        iv.lo,
        iv.hi,
        iv.prob,
        1.0 - iv.a - (-iv.b).exp()
    );

    // sandwich bracket for the exponential-power upper integral
    for (p, t) in [(2.0, 1.0), (4.0, 1.5)] {
        let (lo, hi) = tail_bracket(p, t).unwrap();
        let exact = exp_power_upper_integral(p, t);
        println!("p={p} t={t}: {lo:.6e} <= {exact:.6e} <= {hi:.6e}");
    }

    // u = -log(1 - J) is convex for every built-in model
    let grid: Vec<f64> = (0..1000).map(|i| -5.0 + 10.0 * i as f64 / 999.0).collect();
    println!(
        "u convexity violation (gaussian): {:.2e}",
        u_convexity_report(&Density1D::gaussian(), &grid)
    );

    // the Schechtman-Zinn normalizer is always computed numerically
    println!(
        "sz p=1 one-dimensional normalizer: {:.12} (1/2 exactly in the limit)",
        sz1.sz_normalizer().unwrap()
    );
}
