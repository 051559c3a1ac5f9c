//! Random polytopes: reproducible sampling, hull support extraction, vertex
//! counts and the concentration of directional maxima.
//!
//! Run with `cargo run --release --example random_polytopes`.

use polyfloat::body::log_hausdorff;
use polyfloat::density::{gnedenko_interval, Density1D, DensityND};
use polyfloat::float::floating_polytope;
use polyfloat::net::cached_net;
use polyfloat::sampler::{derive_stream_seed, random_polytope, sample, vertex_count_2d};

fn main() {
    let density = DensityND::standard_gaussian(2);
    let n = 100_000;

    // sampling is bit-exact reproducible per (density, n, seed)
    let s1 = sample(&density, n, 7).unwrap();
    let s2 = sample(&density, n, 7).unwrap();
    assert_eq!(s1.points, s2.points);
    println!("sample of {n} gaussian points reproduces bit-exactly at seed 7");

    // the random polytope tracks the floating polytope of mass 1/n
    let eps = 1.0 / (n as f64).ln();
    let net = cached_net(2, eps, 0).unwrap();
    let poly = random_polytope(&s1, &net).unwrap();
    let floating = floating_polytope(&density, &net, 1.0 / n as f64).unwrap();
    let (lam, _) = log_hausdorff(&poly, &floating.body).unwrap();
    println!(
        "d_L(P_n, F_1/n) = {:.5} at n = {n}  (radius of F: {:.4})",
        lam,
        floating.body.support_values()[0]
    );

    // directional maxima land in the Gnedenko interval with the exact
    // probability (1-a/n)^n - (1-b/n)^n
    let iv = gnedenko_interval(&Density1D::gaussian(), n as u64, 1.0).unwrap();
    let trials = 200;
    let mut contained = 0;
    for t in 0..trials {
        let s = sample(&density, n, derive_stream_seed(5, t)).unwrap();
        let mx = s
            .points
            .chunks_exact(2)
            .map(|p| p[0])
            .fold(f64::NEG_INFINITY, f64::max)
            ;
        if mx >= iv.lo && mx <= iv.hi {
            contained += 1;
        }
    }
    println!(
        "directional max in [{:.3}, {:.3}]: {}/{} trials (exact prob {:.4})",
        iv.lo,
        iv.hi,
        contained,
        trials,
        iv.prob
    );

    // hull vertex counts grow like sqrt(log n) for the planar gaussian
    for (m, seed) in [(10_000usize, 3u64), (1_000_000, 4)] {
        let s = sample(&density, m, seed).unwrap();
        println!("f0(P_n) at n = {m}: {} vertices", vertex_count_2d(&s).unwrap());
    }
}
