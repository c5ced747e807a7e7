//! Tour of the compact spaces and the map catalog: metrics, orbits, and
//! the hyperbolic data attached to linear toral automorphisms.

use shadowlab::space::{Point, Space};
use shadowlab::systems::{degenerate_circle_line, doubling, rotation, toral_auto};
use shadowlab::Result;

fn main() -> Result<()> {
    // The circle [0,1) with the wrap-around metric.
    let circle = Space::circle();
    let a = Point(vec![0.1]);
    let b = Point(vec![0.9]);
    println!(
        "circle: dist(0.1, 0.9) = {} (wraps), diameter = {}",
        circle.dist(&a, &b)?,
        circle.diameter()
    );

    // The 2-torus, and a box chart with truncation at the boundary.
    let torus = Space::torus(2)?;
    println!("torus diameter = {} (= √2/2)", torus.diameter());
    let chart = Space::square_chart(1.0)?;
    println!("chart [0,1]² diameter = {}", chart.diameter());

    // Rotation by the golden mean: every orbit equidistributes.
    let golden = rotation(0.6180339887)?;
    let orbit = golden.orbit(&Point(vec![0.0]), 0, 5)?;
    println!("\n{} orbit of 0:", golden.name());
    for (k, p) in orbit.iter_indexed() {
        println!("  x_{k} = {:.10}", p.coords()[0]);
    }

    // Doubling map: expanding, not invertible.
    let two_x = doubling();
    println!(
        "\n{}: invertible = {}, Lipschitz bound = {}",
        two_x.name(),
        two_x.invertible(),
        two_x.lipschitz_bound()
    );

    // The standard hyperbolic automorphism of the torus.
    let cat = toral_auto([[2, 1], [1, 1]])?;
    let hyp = cat.hyperbolic_data().expect("linear toral maps carry hyperbolic data");
    println!(
        "\n{}: λ_u = {:.6}, λ_s = {:.6}, tracing constant C = {:.6} (= √5)",
        cat.name(),
        hyp.lambda_u,
        hyp.lambda_s,
        hyp.tracing_constant()
    );
    let p = Point(vec![0.2, 0.4]);
    let fp = cat.eval(&cat.eval(&p)?)?;
    println!(
        "(0.2, 0.4) has period 2: f²(p) = ({}, {})",
        fp.coords()[0],
        fp.coords()[1]
    );

    // A degenerate (non-hyperbolic) map: an attracting circle of fixed
    // points at v = 0 and a repelling one at v = 1/2.
    let degenerate = degenerate_circle_line(0.5)?;
    let on_circle = Point(vec![0.3, 0.0]);
    println!(
        "\n{}: (0.3, 0) is fixed: image = {:?}",
        degenerate.name(),
        degenerate.eval(&on_circle)?.coords()
    );
    Ok(())
}
