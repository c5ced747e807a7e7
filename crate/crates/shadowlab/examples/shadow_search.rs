//! Searching for the best-shadowing trajectory of a method when no
//! hyperbolic tracer applies: seeded grid search plus local refinement
//! over initial points, scored by sup-distance to the exact orbit.

use shadowlab::methods::Method;
use shadowlab::shadowing::{best_shadow, SearchConfig};
use shadowlab::space::Point;
use shadowlab::systems::degenerate_circle_line;
use shadowlab::Result;

fn main() -> Result<()> {
    // The degenerate map has a circle of fixed points at v = 0; a drift of
    // size δ along that circle cannot be shadowed well by any trajectory,
    // which is exactly what the search should discover.
    let f = degenerate_circle_line(0.5)?;
    let x0 = Point(vec![0.3, 0.0]);
    let orbit = f.orbit(&x0, 0, 60)?;

    let cfg = SearchConfig {
        horizon: 60,
        resolution: 64,
        levels: 3,
        shrink: 8.0,
        use_tracer_seed: true, // ignored: this map carries no hyperbolic data
    };

    for delta in [1e-3, 1e-2] {
        let m = Method::drift(f.clone(), delta, 0)?;
        let report = best_shadow(&orbit, &m, &cfg)?;
        println!("{}:", report.method_descriptor);
        println!("  best initial point  = {:?}", report.best_initial.coords());
        println!("  sup distance        = {:.6e}", report.sup_distance);
        println!("  refinement levels   = {}", report.refinement_levels);
        println!(
            "  (drift sweeps {:.3} over the window; the best trajectory centers it)",
            60.0 * delta
        );
    }

    // Against the exact method the search returns the orbit itself.
    let exact = Method::exact(f.clone());
    let report = best_shadow(&orbit, &exact, &cfg)?;
    println!(
        "exact method: sup distance = {:.1e} from initial {:?}",
        report.sup_distance,
        report.best_initial.coords()
    );
    Ok(())
}
