//! Random instances and independent oracles shared by the integration
//! tests and the acceptance suite.

#![allow(dead_code)]

use std::collections::BTreeSet;

use mtgw::covers::FiniteGraph;
use mtgw::norelabel::PlainSpec;
use mtgw::parametrizer::{parametrize, ParameterAssignment, SupportTemplate};
use mtgw::{GWSpec, Label, OffspringVector, Rational, RootMeasure, SupportClass};
use rand::Rng;

pub fn v(c: &[u32]) -> OffspringVector {
    OffspringVector::new(c.to_vec())
}

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Random positive integers normalized to a probability vector.
pub fn random_simplex<R: Rng>(rng: &mut R, k: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| Rational::new(x, total)).collect()
}

/// A rational strictly inside (0, 1) with denominator at most 50.
pub fn random_unit<R: Rng>(rng: &mut R) -> Rational {
    let d = rng.gen_range(2..=50);
    Rational::new(rng.gen_range(1..d), d)
}

/// A template passing validation with `n ≤ 4` labels and at most six
/// classes, by rejection sampling.
pub fn random_template<R: Rng>(rng: &mut R) -> SupportTemplate {
    loop {
        let n = rng.gen_range(1..=4);
        let mut classes = BTreeSet::new();
        for label in 1..=n {
            let budget = 6 - (n - label) - classes.len();
            let k = rng.gen_range(1..=budget.min(2));
            while classes.iter().filter(|c: &&SupportClass| c.label == label).count() < k {
                let counts: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
                if counts.iter().sum::<u32>() > 0 {
                    classes.insert(SupportClass::new(label, OffspringVector::new(counts)));
                }
            }
        }
        let template = SupportTemplate::new(n, classes);
        if template.validate().is_ok() {
            return template;
        }
    }
}

pub fn random_weights<R: Rng>(rng: &mut R, template: &SupportTemplate) -> ParameterAssignment {
    let mut weights = Vec::new();
    for label in 1..=template.n() {
        let classes: Vec<_> = template.classes().iter().filter(|c| c.label == label).cloned().collect();
        let probs = random_simplex(rng, classes.len());
        weights.extend(classes.into_iter().zip(probs));
    }
    ParameterAssignment::new(weights)
}

pub struct PairInstance {
    pub template: SupportTemplate,
    pub params: ParameterAssignment,
    pub mu: RootMeasure,
}

/// Reversible pair-mode measures from random templates and weights. When
/// the label graph has a cycle, the root-label ratios are consistent only
/// for special weights, so such draws are usually discarded.
pub fn pair_corpus<R: Rng>(rng: &mut R, count: usize) -> Vec<PairInstance> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let template = random_template(rng);
        let params = random_weights(rng, &template);
        match parametrize(&template, &params) {
            Ok(mu) => out.push(PairInstance { template, params, mu }),
            Err(mtgw::Error::InconsistentRatios) => continue,
            Err(e) => panic!("valid template and weights rejected: {e}"),
        }
    }
    out
}

/// A plain-mode spec satisfying the cycle condition: `p_{i,j} = w_{ij}/Σ_k w_{ik}`
/// for a symmetric `w` whose support graph is connected.
#[allow(clippy::needless_range_loop)]
pub fn random_plain<R: Rng>(rng: &mut R, max_n: usize) -> PlainSpec {
    let n = rng.gen_range(1..=max_n);
    let mut w = vec![vec![0i64; n]; n];
    for b in 1..n {
        let a = rng.gen_range(0..b);
        let x = rng.gen_range(1..=4);
        w[a][b] = x;
        w[b][a] = x;
    }
    for a in 0..n {
        for b in a..n {
            if rng.gen_bool(0.3) {
                let x = rng.gen_range(1..=4);
                w[a][b] = x;
                w[b][a] = x;
            }
        }
    }
    let params = if n == 1 {
        vec![vec![Rational::one()]]
    } else {
        w.iter()
            .map(|row| {
                let total: i64 = row.iter().sum();
                row.iter().map(|&x| Rational::new(x, total)).collect()
            })
            .collect()
    };
    let degree_dist = (0..n)
        .map(|_| {
            let lowest = if n == 1 { 0 } else { 1 };
            let degrees: Vec<u32> = (lowest..=3).filter(|_| rng.gen_bool(0.5)).collect();
            let degrees = if degrees.is_empty() { vec![rng.gen_range(1..=3)] } else { degrees };
            let probs = random_simplex(rng, degrees.len());
            degrees.into_iter().zip(probs).collect()
        })
        .collect();
    PlainSpec::new(n, degree_dist, params).expect("valid plain spec")
}

/// A connected simple graph on 2 to `max_vertices` vertices.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize) -> FiniteGraph {
    let k = rng.gen_range(2..=max_vertices);
    let mut edges: Vec<(usize, usize)> = (1..k).map(|b| (rng.gen_range(0..b), b)).collect();
    for a in 0..k {
        for b in a + 1..k {
            if rng.gen_bool(0.2) {
                edges.push((a, b));
            }
        }
    }
    FiniteGraph::new(k, edges).expect("valid graph")
}

/// Checks the exact flow identity
/// `μ(i)μ_i(c)ν_{i,j}(d_i)c_j/|c| = μ(j)μ_j(d)ν_{j,i}(c_j)d_i/|d|`
/// for every ordered pair of support classes with `c_j, d_i > 0`, and that
/// every vertex the identity refers to has positive mass on both sides.
/// Written directly from the definitions, without the crate's verifier.
pub fn detailed_balance(mu: &RootMeasure) -> Result<usize, String> {
    let nu = mu.descendants();
    let n = mu.n();
    let minus = |c: &OffspringVector, k: Label| {
        let mut counts = c.counts().to_vec();
        counts[k - 1] -= 1;
        OffspringVector::new(counts)
    };
    let mut classes = Vec::new();
    for i in 1..=n {
        for (c, p) in mu.neighbor_dist(i).iter() {
            classes.push((i, c.clone(), mu.root_prob(i) * p));
        }
    }
    let mut pairs = 0;
    for (i, c, mass_c) in &classes {
        for (j, d, mass_d) in &classes {
            if c.get(*j) == 0 || d.get(*i) == 0 {
                continue;
            }
            pairs += 1;
            let lhs = mass_c * nu.prob(*i, *j, &minus(d, *i)) * Rational::new(c.get(*j).into(), c.total().into());
            let rhs = mass_d * nu.prob(*j, *i, &minus(c, *j)) * Rational::new(d.get(*i).into(), d.total().into());
            if lhs != rhs {
                return Err(format!("{i}:{c} <-> {j}:{d}: {lhs} != {rhs}"));
            }
            if lhs.is_zero() {
                return Err(format!("{i}:{c} <-> {j}:{d}: zero flow between support classes"));
            }
        }
    }
    Ok(pairs)
}

/// `h(i,c)/h(j,d)` for adjacent balance-graph nodes, from the definition.
pub fn balance_ratio(nu: &GWSpec, u: &SupportClass, w: &SupportClass) -> Rational {
    let (i, c) = (u.label, &u.vector);
    let (j, d) = (w.label, &w.vector);
    let minus = |x: &OffspringVector, k: Label| {
        let mut counts = x.counts().to_vec();
        counts[k - 1] -= 1;
        OffspringVector::new(counts)
    };
    let num = nu.prob(j, i, &minus(c, j)) * Rational::from(d.get(i)) * Rational::from(c.total());
    let den = nu.prob(i, j, &minus(d, i)) * Rational::from(c.get(j)) * Rational::from(d.total());
    num / den
}

/// Product of balance ratios along a closed walk.
pub fn replay_cycle(nu: &GWSpec, cycle: &[SupportClass]) -> Rational {
    cycle.windows(2).map(|w| balance_ratio(nu, &w[0], &w[1])).product()
}
