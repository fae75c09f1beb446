//! Laws where a child's offspring does not depend on its parent's label:
//! offspring counts must be multinomial and the label chain reversible.

use mtgw::instances::{single_type, three_label_plain, three_label_plain_with};
use mtgw::norelabel::{check_plain_cycles, construct_from_gw, construct_mu_plain, PlainCycles};
use mtgw::Rational;

fn main() -> Result<(), mtgw::Error> {
    let spec = three_label_plain();
    let mu = construct_mu_plain(&spec)?;
    for i in 1..=3 {
        println!("mu({i}) = {}, degree law {:?}", mu.root_prob(i), mu.neighbor_dist(i).degrees());
    }

    let skewed = three_label_plain_with(Rational::new(1, 3), Rational::new(2, 3));
    match check_plain_cycles(&skewed).cycles {
        PlainCycles::Pass => println!("skewed spec passes"),
        PlainCycles::Violation { cycle, product } => {
            println!("skewed spec fails on label cycle {cycle:?} with product {product}")
        }
    }

    // the same check starting from a plain-mode law
    let mu = construct_from_gw(&spec.to_gw()?)?;
    println!("from the plain law: mu(1) = {}", mu.root_prob(1));

    // a single type: the root gets one extra neighbor
    let p = [Rational::new(1, 4), Rational::new(1, 2), Rational::new(1, 4)];
    let mu = mtgw::constructor::construct_mu(&single_type(&p))?;
    for (c, q) in mu.neighbor_dist(1).iter() {
        println!("root degree {}: {q}", c.total());
    }
    Ok(())
}
