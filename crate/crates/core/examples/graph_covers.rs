//! Universal covers of small graphs as deterministic labeled trees.

use mtgw::constructor::verify_reversibility;
use mtgw::covers::{self, FiniteGraph};

fn main() -> Result<(), mtgw::Error> {
    let graphs = [
        ("triangle", FiniteGraph::cycle(3)),
        ("path P3", FiniteGraph::path(3)),
        ("star K13", FiniteGraph::complete_bipartite(1, 3)),
        ("K23", FiniteGraph::complete_bipartite(2, 3)),
    ];
    for (name, g) in &graphs {
        let labels = covers::label_vertices(g)?;
        let mu = covers::lift_measure(g, &labels)?;
        let root: Vec<String> = (1..=mu.n()).map(|i| mu.root_prob(i).to_string()).collect();
        println!(
            "{name}: labels {:?}, root law [{}], balanced: {}",
            labels.labels(),
            root.join(", "),
            verify_reversibility(&mu).passed()
        );
    }

    let star = &graphs[2].1;
    print!("{}", covers::pair_digraph(star, &covers::label_vertices(star)?)?.to_dot());
    Ok(())
}
