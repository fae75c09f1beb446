//! Build the reversible measure of a law and confirm detailed balance.

use mtgw::constructor::{construct_mu, flow_pair, verify_reversibility};
use mtgw::{format, instances, SupportClass};

fn main() -> Result<(), mtgw::Error> {
    let nu = instances::two_label_nu();
    let mu = construct_mu(&nu)?;
    for i in 1..=mu.n() {
        println!("mu({i}) = {}", mu.root_prob(i));
        for (c, p) in mu.neighbor_dist(i).iter() {
            println!("  mu_{i}{c} = {p}");
        }
    }

    let report = verify_reversibility(&mu);
    println!("detailed balance on {} class pairs: {}", report.checked_pairs, report.passed());

    // one flow pair by hand: N_1(1,1) -> N_2(1,1) and back
    let a = SupportClass::new(1, "(1,1)".parse()?);
    let b = SupportClass::new(2, "(1,1)".parse()?);
    let (forward, backward) = flow_pair(&mu, &a, &b);
    println!("flow {a} -> {b}: {forward}, reverse: {backward}");

    print!("{}", format::MeasureFile { measure: mu, verification: None }.emit()?);
    Ok(())
}
