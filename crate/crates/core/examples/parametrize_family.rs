//! Sweep the two-parameter family of reversible measures with a fixed
//! support template.

use mtgw::instances::{two_label_parameters, two_label_template};
use mtgw::parametrizer::parametrize;
use mtgw::{constructor, Rational};

fn main() -> Result<(), mtgw::Error> {
    let template = two_label_template();
    println!("free parameters: {}", template.dimension()?);
    println!("{:>5} {:>5} {:>10} {:>12} {:>12}", "s", "t", "mu(1)", "nu21(2,0)", "nu22(0,2)");
    for s in [1, 2, 3] {
        for t in [1, 2, 3] {
            let (s, t) = (Rational::new(s, 4), Rational::new(t, 4));
            let mu = parametrize(&template, &two_label_parameters(&s, &t))?;
            assert!(constructor::verify_reversibility(&mu).passed());
            let nu = mu.descendants();
            println!(
                "{:>5} {:>5} {:>10} {:>12} {:>12}",
                s.to_string(),
                t.to_string(),
                mu.root_prob(1).to_string(),
                nu.prob(2, 1, &"(2,0)".parse()?).to_string(),
                nu.prob(2, 2, &"(0,2)".parse()?).to_string(),
            );
        }
    }
    Ok(())
}
