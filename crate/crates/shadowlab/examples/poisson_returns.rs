//! Near-returns under perturbed dynamics: around the golden rotation,
//! perturbed by a constant method at distance d, every small ball contains
//! a point whose trajectory comes back close to it — at times governed by
//! the continued-fraction structure of the angle.

use shadowlab::ergodic::poisson_return;
use shadowlab::methods::Method;
use shadowlab::space::Point;
use shadowlab::systems::rotation;
use shadowlab::Result;

fn main() -> Result<()> {
    let alpha = 0.6180339887; // ≈ 1/φ: the hardest angle to approximate
    let f = rotation(alpha)?;

    // The exact rotation returns near the identity exactly at Fibonacci
    // times: |q·α| mod 1 is small only for denominators q of the continued
    // fraction convergents.
    println!("golden rotation: distance of x_n to x_0 at Fibonacci times");
    let orbit = f.orbit(&Point(vec![0.0]), 0, 60)?;
    for q in [5i64, 8, 13, 21, 34, 55] {
        let p = orbit.point_at(q).unwrap();
        println!(
            "  n = {q:>2}: dist = {:.6}",
            f.space().dist(p, orbit.point_at(0).unwrap())?
        );
    }

    // Perturb the rotation into a method and ask for a return witness in a
    // ball: a grid point whose perturbed trajectory re-enters within tol.
    let d = 1e-3;
    let m = Method::constant(f.clone(), rotation(alpha + d)?, d)?;
    for (center, tol) in [(0.2, 1e-2), (0.5, 1e-3), (0.8, 1e-4)] {
        let witness = poisson_return(&m, &Point(vec![center]), 0.05, 100_000, tol, 64)?;
        match witness {
            Some(w) => println!(
                "ball around {center}, tol {tol:>6}: witness {:.6} returns at n = {} (dist {:.2e})",
                w.point.coords()[0],
                w.time,
                w.distance
            ),
            None => println!("ball around {center}, tol {tol}: no witness within horizon"),
        }
    }
    Ok(())
}
