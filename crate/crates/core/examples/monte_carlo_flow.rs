//! Compare sampled one-step flows and the mass-transport identity with
//! their exact values.

use mtgw::{constructor, instances, simulator, SupportClass};

fn main() -> Result<(), mtgw::Error> {
    let mu = constructor::construct_mu(&instances::two_label_nu())?;
    let a = SupportClass::new(1, "(1,1)".parse()?);
    let b = SupportClass::new(2, "(1,1)".parse()?);
    let (forward, backward) = simulator::estimate_flow(&mu, &a, &b, 100_000, 42)?;
    for (name, e) in [("forward", &forward), ("backward", &backward)] {
        println!(
            "{name}: {:.5} +- {:.5} (exact {:.5}, z = {:+.2})",
            e.mean,
            e.std_error,
            e.reference,
            e.z_score()
        );
    }

    let (out, back) = simulator::mtp_check(&mu, 1, 2, 100_000, 42)?;
    println!("transport 1 -> 2: {:.5} vs {:.5}", out.mean, out.reference);
    println!("transport 2 -> 1: {:.5} vs {:.5}", back.mean, back.reference);

    let tree = simulator::sample_tree(&mu, 3, 7)?;
    let path = simulator::walk(&tree, 3, 7)?;
    let labels: Vec<_> = path.iter().map(|&v| tree.label(v)).collect();
    println!("sampled {} vertices; walk labels {labels:?}", tree.len());
    Ok(())
}
