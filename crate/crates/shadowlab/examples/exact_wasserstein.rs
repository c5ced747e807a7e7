//! Exact Wasserstein-1 distances between discrete measures: closed forms
//! for Dirac measures, assignment for equal weights, min-cost flow in
//! general, and quantization to keep instances tractable.

use shadowlab::space::{Point, Space};
use shadowlab::systems::toral_auto;
use shadowlab::transport::{quantization_radius, w1, DiscreteMeasure};
use shadowlab::Result;

fn main() -> Result<()> {
    let circle = Space::circle();

    // Dirac measures: W₁ is just the ground distance.
    let da = DiscreteMeasure::dirac(&circle, Point(vec![0.1]))?;
    let db = DiscreteMeasure::dirac(&circle, Point(vec![0.9]))?;
    println!("W1(δ_0.1, δ_0.9) = {} (= wrap distance 0.2)", w1(&circle, &da, &db)?);

    // Splitting mass: half of the mass must travel.
    let uniform2 = DiscreteMeasure::new(
        &circle,
        vec![Point(vec![0.0]), Point(vec![0.5])],
        vec![0.5, 0.5],
    )?;
    println!(
        "W1(δ_0, ½δ_0 + ½δ_½) = {} (= ½ · ½ diameter)",
        w1(&circle, &DiscreteMeasure::dirac(&circle, Point(vec![0.0]))?, &uniform2)?
    );

    // Empirical measures of two orbits of the toral automorphism.
    let cat = toral_auto([[2, 1], [1, 1]])?;
    let torus = cat.space().clone();
    let t1 = cat.orbit(&Point(vec![0.123, 0.456]), 0, 400)?;
    let t2 = cat.orbit(&Point(vec![0.789, 0.012]), 0, 400)?;
    let m1 = DiscreteMeasure::empirical(&torus, &t1, 0, 400)?;
    let m2 = DiscreteMeasure::empirical(&torus, &t2, 0, 400)?;
    println!(
        "\nW1 between two 400-point empirical orbit measures = {:.6}",
        w1(&torus, &m1, &m2)?
    );
    println!("(both approximate Lebesgue, so the distance is sampling noise)");

    // Quantization: snap atoms to a shared lattice. Distances move by at
    // most twice the quantization radius, and shared cells then cancel.
    let q = 45;
    let r = quantization_radius(&torus, q)?;
    let q1 = m1.quantize(&torus, q)?;
    let q2 = m2.quantize(&torus, q)?;
    println!(
        "quantized to a {q}×{q} lattice: {} and {} atoms, radius = {:.5}",
        q1.len(),
        q2.len(),
        r
    );
    let dq = w1(&torus, &q1, &q2)?;
    println!("W1 after quantization = {dq:.6} (within 2·radius of the original)");
    Ok(())
}
