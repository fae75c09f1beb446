//! Seeded Monte Carlo checks: sample truncated trees from `μ`, walk on
//! them, and compare empirical flows with their exact values.
//!
//! Trial `t` of a run with seed `s` draws from ChaCha8 keyed by
//! `seed_from_u64(s)` on stream `t`, so results do not depend on how trials
//! are spread over threads. Statistics are reduced in trial order.

use std::collections::BTreeMap;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructor::flow_pair;
use crate::dist::Distribution;
use crate::error::Error;
use crate::model::RootMeasure;
use crate::rational::Rational;
use crate::vector::{Label, OffspringVector, SupportClass};

pub const GENERATOR: &str = "ChaCha8Rng::seed_from_u64(seed), stream = trial index";

/// Number of standard errors within which an estimate counts as agreeing.
pub const AGREEMENT_THRESHOLD: f64 = 4.0;

/// A rooted labeled tree truncated at `max_depth`. Vertex 0 is the root;
/// children are stored in ascending label order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTree {
    labels: Vec<Label>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    max_depth: usize,
}

impl LabeledTree {
    fn with_root(label: Label, max_depth: usize) -> Self {
        LabeledTree {
            labels: vec![label],
            parent: vec![None],
            children: vec![Vec::new()],
            depth: vec![0],
            max_depth,
        }
    }

    fn add_child(&mut self, parent: usize, label: Label) -> usize {
        let v = self.labels.len();
        self.labels.push(label);
        self.parent.push(Some(parent));
        self.children.push(Vec::new());
        self.depth.push(self.depth[parent] + 1);
        self.children[parent].push(v);
        v
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Parent first, then children. Complete only below `max_depth`.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.parent[v].into_iter().chain(self.children[v].iter().copied()).collect()
    }

    /// Label counts of the neighbors of `v`.
    pub fn neighbor_vector(&self, v: usize, n: usize) -> OffspringVector {
        OffspringVector::from_labels(n, self.neighbors(v).into_iter().map(|u| self.labels[u]))
    }
}

struct Table {
    vectors: Vec<OffspringVector>,
    index: WeightedIndex<f64>,
}

impl Table {
    fn new(dist: &Distribution) -> Self {
        let (vectors, weights): (Vec<_>, Vec<_>) =
            dist.iter().map(|(c, p)| (c.clone(), p.to_f64())).unzip();
        Table { vectors, index: WeightedIndex::new(weights).expect("positive weights") }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> &OffspringVector {
        &self.vectors[self.index.sample(rng)]
    }
}

/// Floating-point sampling tables for a measure, built once per run.
pub struct Sampler {
    n: usize,
    root: WeightedIndex<f64>,
    neighbors: Vec<Table>,
    offspring: BTreeMap<(Label, Label), Table>,
}

impl Sampler {
    /// Fails if a vertex that can occur has no offspring law.
    pub fn new(mu: &RootMeasure) -> Result<Self, Error> {
        let n = mu.n();
        let nu = mu.descendants();
        let root = WeightedIndex::new((1..=n).map(|i| mu.root_prob(i).to_f64())).expect("positive weights");
        let neighbors: Vec<Table> = (1..=n).map(|i| Table::new(mu.neighbor_dist(i))).collect();
        let mut offspring = BTreeMap::new();
        for parent in 1..=n {
            for child in 1..=n {
                if let Some(dist) = nu.law(parent, child) {
                    offspring.insert((parent, child), Table::new(dist));
                }
            }
        }
        for class in mu.support() {
            for k in class.vector.support() {
                if !offspring.contains_key(&(class.label, k)) {
                    return Err(Error::InvalidMeasure(format!(
                        "root {class} has a neighbor labeled {k} but ({},{k}) has no offspring law",
                        class.label
                    )));
                }
            }
        }
        Ok(Sampler { n, root, neighbors, offspring })
    }

    /// Samples a tree truncated at `depth`: root label and neighbors from
    /// `μ`, then independent descendant subtrees from `ν`.
    pub fn sample<R: Rng>(&self, depth: usize, rng: &mut R) -> Result<LabeledTree, Error> {
        if depth == 0 {
            return Err(Error::InvalidDepth);
        }
        let root_label = self.root.sample(rng) + 1;
        let mut tree = LabeledTree::with_root(root_label, depth);
        let mut frontier = Vec::new();
        for k in self.neighbors[root_label - 1].draw(rng).expand() {
            frontier.push(tree.add_child(0, k));
        }
        for _ in 1..depth {
            let mut next = Vec::new();
            for v in frontier {
                let parent = tree.parent(v).expect("non-root");
                let key = (tree.label(parent), tree.label(v));
                let table = self.offspring.get(&key).ok_or_else(|| {
                    Error::InvalidMeasure(format!("no offspring law for ({},{})", key.0, key.1))
                })?;
                for k in table.draw(rng).expand() {
                    next.push(tree.add_child(v, k));
                }
            }
            frontier = next;
        }
        Ok(tree)
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn sample_tree(mu: &RootMeasure, depth: usize, seed: u64) -> Result<LabeledTree, Error> {
    Sampler::new(mu)?.sample(depth, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Simple random walk from the root. The walker cannot leave the sampled
/// part of the tree as long as `steps <= max_depth`.
pub fn walk(tree: &LabeledTree, steps: usize, seed: u64) -> Result<Vec<usize>, Error> {
    walk_with(tree, steps, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn walk_with<R: Rng>(tree: &LabeledTree, steps: usize, rng: &mut R) -> Result<Vec<usize>, Error> {
    if steps > tree.max_depth() {
        return Err(Error::TruncationExceeded { steps, depth: tree.max_depth() });
    }
    let mut path = vec![tree.root()];
    let mut at = tree.root();
    for _ in 0..steps {
        let nbrs = tree.neighbors(at);
        at = nbrs[rng.gen_range(0..nbrs.len())];
        path.push(at);
    }
    Ok(path)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√trials`.
    pub std_error: f64,
    pub reference: Rational,
    pub trials: u64,
    pub seed: u64,
    pub generator: String,
}

impl FlowEstimate {
    fn from_samples(samples: &[f64], reference: Rational, seed: u64) -> Self {
        let trials = samples.len();
        let mean = samples.iter().sum::<f64>() / trials as f64;
        let var = if trials > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
        } else {
            0.0
        };
        FlowEstimate {
            mean,
            std_error: (var / trials as f64).sqrt(),
            reference,
            trials: trials as u64,
            seed,
            generator: GENERATOR.to_string(),
        }
    }

    /// Distance from the reference in standard errors.
    pub fn z_score(&self) -> f64 {
        let diff = self.mean - self.reference.to_f64();
        if self.std_error == 0.0 {
            if diff.abs() < 1e-12 { 0.0 } else { f64::INFINITY }
        } else {
            diff / self.std_error
        }
    }

    /// Whether the estimate lies within `k` standard errors of the reference.
    pub fn agrees_within(&self, k: f64) -> bool {
        self.z_score().abs() <= k
    }

    pub fn agrees(&self) -> bool {
        self.agrees_within(AGREEMENT_THRESHOLD)
    }
}

/// Runs `trials` independent trials in parallel, each producing a fixed
/// number of observations, and returns them column-wise in trial order.
fn run_trials<F>(trials: u64, seed: u64, width: usize, trial: F) -> Result<Vec<Vec<f64>>, Error>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Vec<f64>, Error> + Sync,
{
    let rows: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| trial(&mut trial_rng(seed, t)))
        .collect::<Result<_, _>>()?;
    Ok((0..width).map(|k| rows.iter().map(|row| row[k]).collect()).collect())
}

/// Empirical one-step flows `N_i(c) → N_j(d)` and back, with their exact
/// values `μ(i)μ_i(c)ν_{i,j}(d_i)c_j/|c|` and
/// `μ(j)μ_j(d)ν_{j,i}(c_j)d_i/|d|`.
pub fn estimate_flow(
    mu: &RootMeasure,
    from: &SupportClass,
    to: &SupportClass,
    trials: u64,
    seed: u64,
) -> Result<(FlowEstimate, FlowEstimate), Error> {
    for class in [from, to] {
        if !mu.contains(class) {
            return Err(Error::ClassNotInSupport(class.clone()));
        }
    }
    if !from.vector.has(to.label) || !to.vector.has(from.label) {
        return Err(Error::NotAdjacentClasses { from: from.clone(), to: to.clone() });
    }
    let sampler = Sampler::new(mu)?;
    let n = mu.n();
    let in_class = |tree: &LabeledTree, v: usize, class: &SupportClass| {
        tree.label(v) == class.label && tree.neighbor_vector(v, n) == class.vector
    };
    let columns = run_trials(trials, seed, 2, |rng| {
        let tree = sampler.sample(2, rng)?;
        let path = walk_with(&tree, 1, rng)?;
        let (start, end) = (path[0], path[1]);
        let forward = in_class(&tree, start, from) && in_class(&tree, end, to);
        let backward = in_class(&tree, start, to) && in_class(&tree, end, from);
        Ok(vec![f64::from(u8::from(forward)), f64::from(u8::from(backward))])
    })?;
    let (fwd_ref, back_ref) = flow_pair(mu, from, to);
    Ok((
        FlowEstimate::from_samples(&columns[0], fwd_ref, seed),
        FlowEstimate::from_samples(&columns[1], back_ref, seed),
    ))
}

/// `Ẑ = E_μ[1/deg(root)] = Σ_{i,c} μ(i)μ_i(c)/|c|`.
pub fn inverse_degree_mass(mu: &RootMeasure) -> Rational {
    mu.support()
        .iter()
        .map(|class| mu.class_mass(class) * Rational::new(1, i64::from(class.vector.total())))
        .sum()
}

/// `E_μ̂[1{root labeled i} · #neighbors labeled j]` under `μ̂ ∝ μ/deg`.
pub fn transport_reference(mu: &RootMeasure, i: Label, j: Label) -> Rational {
    let sum: Rational = mu
        .neighbor_dist(i)
        .iter()
        .map(|(c, p)| mu.root_prob(i) * p * Rational::new(i64::from(c.get(j)), i64::from(c.total())))
        .sum();
    sum / inverse_degree_mass(mu)
}

/// Mass transport between labels `i` and `j` under the degree-biased
/// measure, estimated by weighting samples from `μ` with `1/deg(root)`.
/// The two exact references agree when `μ` is reversible.
pub fn mtp_check(
    mu: &RootMeasure,
    i: Label,
    j: Label,
    trials: u64,
    seed: u64,
) -> Result<(FlowEstimate, FlowEstimate), Error> {
    let n = mu.n();
    for label in [i, j] {
        if !(1..=n).contains(&label) {
            return Err(Error::LabelOutOfRange { label, n });
        }
    }
    let sampler = Sampler::new(mu)?;
    let z = inverse_degree_mass(mu).to_f64();
    let columns = run_trials(trials, seed, 2, |rng| {
        let tree = sampler.sample(1, rng)?;
        let root = tree.root();
        let c = tree.neighbor_vector(root, n);
        let weight = 1.0 / (f64::from(c.total()) * z);
        let label = tree.label(root);
        let send = if label == i { f64::from(c.get(j)) * weight } else { 0.0 };
        let receive = if label == j { f64::from(c.get(i)) * weight } else { 0.0 };
        Ok(vec![send, receive])
    })?;
    Ok((
        FlowEstimate::from_samples(&columns[0], transport_reference(mu, i, j), seed),
        FlowEstimate::from_samples(&columns[1], transport_reference(mu, j, i), seed),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructor::construct_mu;
    use crate::covers::{cover_measure, FiniteGraph};
    use crate::testutil::{example_nu, r, v};

    fn example_mu() -> RootMeasure {
        construct_mu(&example_nu()).unwrap()
    }

    fn triangle() -> RootMeasure {
        cover_measure(&FiniteGraph::complete(3)).unwrap()
    }

    #[test]
    fn triangle_ball_is_deterministic() {
        let tree = sample_tree(&triangle(), 3, 7).unwrap();
        assert_eq!(tree.len(), 1 + 2 + 2 + 2);
        for vtx in 0..tree.len() {
            if tree.depth(vtx) < 3 {
                assert_eq!(tree.neighbors(vtx).len(), 2);
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let mu = example_mu();
        assert_eq!(sample_tree(&mu, 4, 11).unwrap(), sample_tree(&mu, 4, 11).unwrap());
        assert!(matches!(sample_tree(&mu, 0, 1), Err(Error::InvalidDepth)));
    }

    #[test]
    fn sampled_vertices_respect_supports() {
        let mu = example_mu();
        let nu = mu.descendants();
        for seed in 0..50 {
            let tree = sample_tree(&mu, 3, seed).unwrap();
            let root = tree.root();
            assert!(mu.neighbor_dist(tree.label(root)).contains(&tree.neighbor_vector(root, 2)));
            for vtx in 1..tree.len() {
                if tree.depth(vtx) < 3 {
                    let parent = tree.label(tree.parent(vtx).unwrap());
                    let kids = OffspringVector::from_labels(2, tree.children(vtx).iter().map(|&u| tree.label(u)));
                    assert!(nu.has_mass(parent, tree.label(vtx), &kids));
                }
            }
        }
    }

    #[test]
    fn walk_edge_cases() {
        let tree = sample_tree(&example_mu(), 2, 3).unwrap();
        assert_eq!(walk(&tree, 0, 5).unwrap(), vec![0]);
        assert!(matches!(walk(&tree, 3, 5), Err(Error::TruncationExceeded { steps: 3, depth: 2 })));
        let path = walk(&tree, 2, 5).unwrap();
        assert_eq!(path.len(), 3);
        assert!(tree.neighbors(path[0]).contains(&path[1]));
        assert!(tree.neighbors(path[1]).contains(&path[2]));

        let tri = sample_tree(&triangle(), 2, 0).unwrap();
        for seed in 0..20 {
            let path = walk(&tri, 2, seed).unwrap();
            assert_eq!(tri.label(path[2]), 1);
        }
    }

    #[test]
    fn triangle_flow_is_one() {
        let mu = triangle();
        let c = SupportClass::new(1, v(&[2]));
        let (fwd, back) = estimate_flow(&mu, &c, &c, 200, 1).unwrap();
        assert_eq!(fwd.reference, Rational::one());
        assert_eq!(fwd.mean, 1.0);
        assert_eq!(fwd.std_error, 0.0);
        assert!(fwd.agrees() && back.agrees());
    }

    #[test]
    fn flow_preconditions() {
        let mu = example_mu();
        let missing = SupportClass::new(1, v(&[5, 5]));
        let a = SupportClass::new(1, v(&[1, 1]));
        let d = SupportClass::new(2, v(&[0, 3]));
        assert!(matches!(estimate_flow(&mu, &missing, &a, 10, 0), Err(Error::ClassNotInSupport(_))));
        assert!(matches!(estimate_flow(&mu, &a, &d, 10, 0), Err(Error::NotAdjacentClasses { .. })));
    }

    #[test]
    fn estimates_do_not_depend_on_thread_count() {
        let mu = example_mu();
        let a1 = SupportClass::new(1, v(&[1, 1]));
        let a2 = SupportClass::new(2, v(&[1, 1]));
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one = single.install(|| estimate_flow(&mu, &a1, &a2, 2000, 9).unwrap());
        let many = estimate_flow(&mu, &a1, &a2, 2000, 9).unwrap();
        assert_eq!(one, many);
        assert_eq!(one.0.reference, r(3, 32));
    }

    #[test]
    fn transport_references() {
        let mu = example_mu();
        let z = inverse_degree_mass(&mu);
        // μ(1)(1/2·1/2 + 1/2·1/3) + μ(2)(1/2·1/3 + 1/2·1/2)
        assert_eq!(z, r(3, 8) * r(5, 12) + r(5, 8) * r(5, 12));
        assert_eq!(transport_reference(&mu, 1, 2), r(3, 8) * r(5, 12) / &z);
        assert_eq!(transport_reference(&mu, 1, 2), transport_reference(&mu, 2, 1));

        let swapped = mu.with_root(vec![r(5, 8), r(3, 8)]).unwrap();
        assert_ne!(transport_reference(&swapped, 1, 2), transport_reference(&swapped, 2, 1));
    }
}
