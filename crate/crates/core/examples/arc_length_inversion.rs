//! Arc length, its inverse, and how far the chord distance strays from the
//! geodesic between neighboring turns of the spiral.

use std::f64::consts::PI;

use qd_suite::environments::spiral::{arc_length_from_origin, invert_arc_length, spiral_geodesic_distance, spiral_point};
use qd_suite::metric::euclidean_distance;

fn main() -> qd_suite::Result<()> {
    let a = 0.01;
    let total = arc_length_from_origin(30.0 * PI, a);
    println!("S(0, 30 pi) = {total:.6}");

    for frac in [0.01, 0.25, 0.5, 0.75, 1.0] {
        let s = frac * total;
        let t = invert_arc_length(s, a)?;
        println!(
            "s = {s:>9.4}  ->  t = {t:>8.4} ({:>5.2} pi), round trip error {:.1e}",
            t / PI,
            (arc_length_from_origin(t, a) - s).abs()
        );
    }

    // Same angle one full turn apart: close in the plane, far along the curve.
    println!("\n   t      chord   geodesic");
    for t in [5.0, 20.0, 60.0] {
        let (p, q) = (spiral_point(t, a)?, spiral_point(t + 2.0 * PI, a)?);
        println!(
            "{t:>5.1}  {:>8.4}  {:>8.4}",
            euclidean_distance(&p, &q)?,
            spiral_geodesic_distance(t, t + 2.0 * PI, a)?
        );
    }
    Ok(())
}
