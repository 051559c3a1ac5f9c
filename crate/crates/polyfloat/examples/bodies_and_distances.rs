//! Convex bodies as per-direction support values: gauges, polars and the
//! three distances.
//!
//! Run with `cargo run --release --example bodies_and_distances`.

use polyfloat::body::{
    bm_upper, hausdorff_distance, log_hausdorff, log_hausdorff_about, log_hausdorff_grid_2d,
    SupportBody,
};
use polyfloat::net::cached_net;

fn main() {
    let net = cached_net(2, 0.02, 0).unwrap();

    // the square [-1,1]^2 and the unit disk, both about the origin
    let square = SupportBody::new(
        net.clone(),
        vec![0.0, 0.0],
        net.iter().map(|w| w[0].abs() + w[1].abs()).collect(),
    )
    .unwrap();
    let disk = SupportBody::new(net.clone(), vec![0.0, 0.0], vec![1.0; net.len()]).unwrap();

    // gauges are exact Minkowski functionals of the represented H-rep body
    println!("gauge of (2,2) in the square: {:.6}", square.gauge(&[2.0, 2.0]).unwrap());
    println!("gauge of (0.6,0.8) in the disk: {:.6}", disk.gauge(&[0.6, 0.8]).unwrap());

    // the polar of the square approximates the cross-polytope
    let polar = square.polar().unwrap();
    println!(
        "square polar radial values: e1 -> {:.4}, diagonal -> {:.4}",
        polar.radial_values()[0],
        polar.radial_values()[net.len() / 8]
    );

    // support-function distances on the shared net
    println!(
        "d_H(square, disk) = {:.5}   (sqrt(2) - 1 = {:.5})",
        hausdorff_distance(&square, &disk).unwrap(),
        std::f64::consts::SQRT_2 - 1.0
    );
    println!(
        "d_L(square, disk, 0) = {:.5}   (sqrt(2) = {:.5})",
        log_hausdorff_about(&square, &disk, &[0.0, 0.0]).unwrap(),
        std::f64::consts::SQRT_2
    );
    println!(
        "bm_upper(square, disk) = {:.5}   (upper bound; the true Banach-Mazur distance is sqrt(2))",
        bm_upper(&square, &disk).unwrap()
    );

    // the infimum over centers matters for asymmetric configurations: an
    // off-center rectangle against the unit disk prefers a witness point
    // strictly inside the overlap
    let rect = SupportBody::new(
        net.clone(),
        vec![1.0, 0.0],
        net.iter().map(|w| w[0].abs() + w[1].abs()).collect(),
    )
    .unwrap();
    let (lam, witness) = log_hausdorff(&rect, &disk).unwrap();
    let (grid_lam, grid_witness) = log_hausdorff_grid_2d(&rect, &disk, 60).unwrap();
    println!(
        "rectangle vs disk: search {:.5} at ({:.3},{:.3}); grid oracle {:.5} at ({:.3},{:.3})",
        lam, witness[0], witness[1], grid_lam, grid_witness[0], grid_witness[1]
    );
}
