//! Decide whether a Galton-Watson law admits a reversible root measure.
//!
//! Run with `cargo run --example check_spec [SPEC.json]`; without an
//! argument it checks the bundled two-label law and a broken variant.

use mtgw::checker::{self, ConditionIi};
use mtgw::{format, GWSpec};

fn report(name: &str, nu: &GWSpec) -> Result<(), mtgw::Error> {
    let r = checker::check(nu)?;
    println!("{name}: passed = {}", r.passed);
    if let Some(failed) = r.failed {
        println!("  first failing condition: {failed}");
    }
    if let ConditionIi::Violation { cycle, product } = &r.condition_ii {
        let walk: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
        println!("  cycle {} has product {product}", walk.join(" -> "));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    if let Some(path) = std::env::args().nth(1) {
        let nu = format::parse_spec(&std::fs::read_to_string(&path)?)?;
        report(&path, &nu)?;
        return Ok(());
    }
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/");
    for name in ["two_label.json", "two_label_unbalanced.json"] {
        let nu = format::parse_spec(&std::fs::read_to_string(format!("{data}{name}"))?)?;
        report(name, &nu)?;
    }
    Ok(())
}
