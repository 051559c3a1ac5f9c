//! Sphere nets: construction, validation, series expansion and the net
//! functional.
//!
//! Run with `cargo run --release --example nets`.

use polyfloat::net::{cached_net, DirectionNet};

fn main() {
    // planar nets are uniform angular grids; the covering radius is measured
    // against random probes and always stays below eps
    let net2 = cached_net(2, 0.1, 0).unwrap();
    println!(
        "planar net at eps 0.1: {} directions, covering radius {:.5}",
        net2.len(),
        net2.covering_radius()
    );

    // three-dimensional nets come from greedy maximal separation over a
    // low-discrepancy candidate pool, then covering gaps are closed
    let net3 = cached_net(3, 0.3, 42).unwrap();
    println!(
        "spatial net at eps 0.3: {} directions (bound {}), covering radius {:.5}",
        net3.len(),
        (3.0f64 / 0.3).powi(3) as u64,
        net3.covering_radius()
    );
    net3.validate().expect("all invariants hold");

    // every unit vector expands as omega_0 + sum_j eps_j omega_j with
    // geometrically decaying coefficients
    let theta = [0.6, 0.8];
    for k in 0..=4 {
        let s = net2.series_decompose(&theta, k);
        println!(
            "series k={k}: {} terms, residual {:.2e} (bound {:.2e})",
            s.indices.len(),
            s.residual_norm,
            0.1f64.powi(k as i32 + 1)
        );
    }

    // the net functional max <x, omega> sandwiches the Euclidean norm
    let x = [3.0, 4.0];
    println!(
        "net functional of (3,4): {:.4} in [(1-eps)|x|, |x|] = [4.5, 5.0]",
        net2.functional(&x)
    );

    // nets serialize with 17 significant digits and round-trip exactly
    let json = net2.to_json();
    let back = DirectionNet::from_json(&json).unwrap();
    assert_eq!(back.fingerprint(), net2.fingerprint());
    println!("json round trip: {} bytes, fingerprint preserved", json.len());
}
