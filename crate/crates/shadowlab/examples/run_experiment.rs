//! Driving the experiment harness from code: resolve a config, run an
//! experiment, and inspect the report programmatically (the `shadowlab`
//! binary wraps exactly this flow).

use shadowlab::harness::{self, ExperimentConfig, ExperimentKind, ResolvedConfig};
use shadowlab::Result;

fn main() -> Result<()> {
    // Sparse JSON configs override defaults field by field.
    let raw = ExperimentConfig::from_json(
        r#"{
            "experiment": "poisson",
            "seed": 7,
            "samples": 3,
            "horizon": 20000,
            "tolerance": 0.005
        }"#,
    )?;
    let cfg = ResolvedConfig::resolve(ExperimentKind::Poisson, &raw)?;
    println!("resolved config hash = {}", cfg.hash());

    let report = harness::run(ExperimentKind::Poisson, &cfg)?;
    print!("{}", report.summary());

    println!("\nscalars:");
    for (k, v) in &report.scalars {
        println!("  {k} = {v}");
    }
    for (name, table) in &report.tables {
        println!("\ntable {name:?} ({} rows):", table.rows.len());
        print!("{}", table.to_csv());
    }
    Ok(())
}
