//! Existence test for a reversible `μ` with `μ ∼ ν` when Galton–Watson
//! types are (parent label, own label) pairs.
//!
//! Three checks run in order: strong connectivity of the type graph, the
//! support closure condition (condition (i) below), and cycle consistency
//! (condition (ii)) on the balance graph.
//!
//! The balance graph has one node per support class `(i, c)` with
//! `c ∈ F_i`, and an edge between `(i, c)` and `(j, d)` whenever `c_j > 0`
//! and `d_i > 0`. Writing `h(i, c) = μ(i) μ_i(c)`, detailed balance says
//!
//! ```text
//! h(i,c) / h(j,d) = ν_{j,i}(c_j) · d_i · |c|  /  ( ν_{i,j}(d_i) · c_j · |d| )
//! ```
//!
//! so a reversible `μ` exists iff these edge ratios admit consistent node
//! potentials, i.e. every cycle multiplies to one.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::Error;
use crate::model::{GWSpec, Mode, TypeKey};
use crate::potential::{self, RatioEdge};
use crate::rational::Rational;
use crate::vector::{Label, OffspringVector, SupportClass};

impl Serialize for TypeKey {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Connectivity {
    Pass,
    /// `to` cannot be reached from `from`.
    Unreachable { from: TypeKey, to: TypeKey },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConditionI {
    Pass,
    /// `ν_{j,i}(c_j) > 0` and `c_k > 0` but `ν_{k,i}(c_k) = 0`.
    Counterexample { i: Label, j: Label, k: Label, c: OffspringVector },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConditionIi {
    Pass,
    /// Closed walk in the balance graph whose ratio product is not one.
    Violation { cycle: Vec<SupportClass>, product: Rational },
    /// Not evaluated because condition (i) failed.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub mode: Mode,
    pub strongly_connected: bool,
    pub strong_connectivity: Connectivity,
    /// Labels `i` with `F_i` empty, i.e. labels that could never sit at the root.
    pub missing_labels: Vec<Label>,
    pub condition_i: ConditionI,
    pub condition_ii: ConditionIi,
    pub connected_support: bool,
    pub passed: bool,
    pub failed: Option<&'static str>,
}

impl CheckReport {
    fn finish(mut self) -> Self {
        self.failed = self.compute_first_failure();
        self.passed = self.failed.is_none();
        self
    }

    fn compute_first_failure(&self) -> Option<&'static str> {
        if !self.strongly_connected {
            Some("strong_connectivity")
        } else if !self.missing_labels.is_empty() {
            Some("missing_labels")
        } else if self.condition_i != ConditionI::Pass {
            Some("condition_i")
        } else if self.condition_ii != ConditionIi::Pass {
            Some("condition_ii")
        } else if !self.connected_support {
            Some("connected_support")
        } else {
            None
        }
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        self.failed
    }
}

fn require_pair(nu: &GWSpec) -> Result<(), Error> {
    match nu.mode() {
        Mode::Pair => Ok(()),
        mode => Err(Error::WrongMode { mode }),
    }
}

/// Every type must reach every other type through the directed graph
/// `t -> t.child(k)` for `k ∈ A(ν_t)`.
pub fn check_strong_connectivity(nu: &GWSpec) -> Result<Connectivity, Error> {
    if nu.is_empty() {
        return Err(Error::EmptySpec);
    }
    let types: Vec<TypeKey> = nu.types().collect();
    let index: BTreeMap<TypeKey, usize> = types.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let succ: Vec<Vec<usize>> = types
        .iter()
        .map(|t| {
            nu.get(t)
                .expect("listed type")
                .active_labels()
                .into_iter()
                .map(|k| index[&t.child(k)])
                .collect()
        })
        .collect();

    for (from, _) in types.iter().enumerate() {
        let mut seen = vec![false; types.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &w in &succ[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if let Some(to) = seen.iter().position(|s| !s) {
            return Ok(Connectivity::Unreachable { from: types[from], to: types[to] });
        }
    }
    Ok(Connectivity::Pass)
}

/// For all `i, j, k` and `c` with `ν_{j,i}(c_j) > 0` and `c_k > 0`, requires
/// `ν_{k,i}(c_k) > 0`. Iterates `i`, then `j`, then stored vectors in
/// order, then `k`, and reports the first failure.
pub fn check_condition_i(nu: &GWSpec) -> ConditionI {
    let n = nu.n();
    for i in 1..=n {
        for j in 1..=n {
            let Some(dist) = nu.law(j, i) else { continue };
            for e in dist.vectors() {
                let c = e.increment(j).expect("label in range");
                for k in c.support().collect::<Vec<_>>() {
                    let reduced = c.decrement(k).expect("positive coordinate");
                    if !nu.has_mass(k, i, &reduced) {
                        return ConditionI::Counterexample { i, j, k, c };
                    }
                }
            }
        }
    }
    ConditionI::Pass
}

/// Required value of `h(u) / h(v)` for adjacent classes `u = (i,c)`,
/// `v = (j,d)`; `Ok(None)` when they are not adjacent.
pub fn edge_ratio(
    nu: &GWSpec,
    u: &SupportClass,
    v: &SupportClass,
) -> Result<Option<Rational>, Error> {
    let (i, c) = (u.label, &u.vector);
    let (j, d) = (v.label, &v.vector);
    if !c.has(j) || !d.has(i) {
        return Ok(None);
    }
    let c_j = c.decrement(j)?;
    let d_i = d.decrement(i)?;
    let nu_ji = nu.law(j, i).and_then(|l| l.get(&c_j)).ok_or_else(|| Error::MissingNuTerm {
        parent: j,
        child: i,
        vector: c_j.clone(),
    })?;
    let nu_ij = nu.law(i, j).and_then(|l| l.get(&d_i)).ok_or_else(|| Error::MissingNuTerm {
        parent: i,
        child: j,
        vector: d_i.clone(),
    })?;
    let num = nu_ji * Rational::from(d.get(i) * c.total());
    let den = nu_ij * Rational::from(c.get(j) * d.total());
    Ok(Some(num / den))
}

#[derive(Clone, Debug)]
pub struct BalanceGraph {
    nodes: Vec<SupportClass>,
    index: BTreeMap<SupportClass, usize>,
    edges: Vec<RatioEdge>,
}

/// Nodes are the classes `(i, c)` with `c ∈ F_i`, sorted; edges join
/// distinct adjacent classes and are listed in lexicographic node order.
pub fn build_balance_graph(nu: &GWSpec) -> Result<BalanceGraph, Error> {
    require_pair(nu)?;
    let nodes: Vec<SupportClass> = (1..=nu.n())
        .flat_map(|i| {
            nu.candidate_support(i)
                .into_iter()
                .map(move |c| SupportClass::new(i, c))
        })
        .collect();
    let index = nodes.iter().enumerate().map(|(k, c)| (c.clone(), k)).collect();
    let mut edges = Vec::new();
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            if let Some(ratio) = edge_ratio(nu, &nodes[a], &nodes[b])? {
                edges.push(RatioEdge { a, b, ratio });
            }
        }
    }
    Ok(BalanceGraph { nodes, index, edges })
}

/// Outcome of the cycle-consistency check on a balance graph.
#[derive(Clone, Debug)]
pub struct Consistency {
    pub condition: ConditionIi,
    pub connected: bool,
    /// `h(i,c)` up to a per-component factor; present when the check passed.
    pub potentials: Option<Vec<Rational>>,
}

impl BalanceGraph {
    pub fn nodes(&self) -> &[SupportClass] {
        &self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v, h(u)/h(v))`.
    pub fn edges(&self) -> impl Iterator<Item = (&SupportClass, &SupportClass, &Rational)> {
        self.edges
            .iter()
            .map(|e| (&self.nodes[e.a], &self.nodes[e.b], &e.ratio))
    }

    pub fn node_index(&self, class: &SupportClass) -> Option<usize> {
        self.index.get(class).copied()
    }

    /// Oriented ratio `h(u)/h(v)` if `u` and `v` are joined by an edge.
    pub fn ratio(&self, u: &SupportClass, v: &SupportClass) -> Option<Rational> {
        let (a, b) = (self.node_index(u)?, self.node_index(v)?);
        self.edges.iter().find_map(|e| {
            if (e.a, e.b) == (a, b) {
                Some(e.ratio.clone())
            } else if (e.a, e.b) == (b, a) {
                Some(e.ratio.recip())
            } else {
                None
            }
        })
    }

    /// Product of oriented ratios along consecutive nodes of `walk`.
    /// `None` if some consecutive pair is not an edge.
    pub fn walk_product(&self, walk: &[SupportClass]) -> Option<Rational> {
        walk.windows(2)
            .map(|w| self.ratio(&w[0], &w[1]))
            .try_fold(Rational::one(), |acc, r| r.map(|r| acc * r))
    }

    /// Neighbors of the node at `idx`, as node indices.
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.a == idx {
                    Some(e.b)
                } else if e.b == idx {
                    Some(e.a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn consistency(&self) -> Consistency {
        match potential::solve(self.nodes.len(), &self.edges) {
            Ok(p) => Consistency {
                condition: ConditionIi::Pass,
                connected: p.is_connected(),
                potentials: Some(p.values),
            },
            Err(v) => {
                let mut seen = BTreeSet::new();
                let mut stack = vec![0usize];
                while let Some(u) = stack.pop() {
                    if self.nodes.is_empty() || !seen.insert(u) {
                        continue;
                    }
                    stack.extend(self.neighbors(u));
                }
                Consistency {
                    condition: ConditionIi::Violation {
                        cycle: v.nodes.iter().map(|&k| self.nodes[k].clone()).collect(),
                        product: v.product,
                    },
                    connected: seen.len() == self.nodes.len(),
                    potentials: None,
                }
            }
        }
    }
}

/// Condition (ii) together with connectivity of the balance graph.
pub fn check_condition_ii(nu: &GWSpec) -> Result<(ConditionIi, bool), Error> {
    let graph = build_balance_graph(nu)?;
    let c = graph.consistency();
    Ok((c.condition, c.connected))
}

/// Runs every check and collects the outcomes. Condition (ii) is skipped
/// when condition (i) fails, since the balance graph would be missing
/// required `ν` terms.
pub fn check(nu: &GWSpec) -> Result<CheckReport, Error> {
    check_with_graph(nu).map(|(report, _)| report)
}

pub(crate) fn check_with_graph(
    nu: &GWSpec,
) -> Result<(CheckReport, Option<(BalanceGraph, Consistency)>), Error> {
    require_pair(nu)?;
    let strong_connectivity = check_strong_connectivity(nu)?;
    let missing_labels = (1..=nu.n())
        .filter(|&i| nu.candidate_support(i).is_empty())
        .collect();
    let condition_i = check_condition_i(nu);
    let (condition_ii, connected_support, graph) = if condition_i == ConditionI::Pass {
        let graph = build_balance_graph(nu)?;
        let consistency = graph.consistency();
        (consistency.condition.clone(), consistency.connected, Some((graph, consistency)))
    } else {
        (ConditionIi::Skipped, false, None)
    };
    let report = CheckReport {
        mode: Mode::Pair,
        strongly_connected: strong_connectivity == Connectivity::Pass,
        strong_connectivity,
        missing_labels,
        condition_i,
        condition_ii,
        connected_support,
        passed: false,
        failed: None,
    }
    .finish();
    Ok((report, graph))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::testutil::{example_nu, r, v};

    fn example_with(key: (Label, Label), dist: Distribution) -> GWSpec {
        let nu = example_nu();
        GWSpec::pair(
            2,
            nu.iter().map(|(k, d)| match *k {
                TypeKey::Pair(i, j) if (i, j) == key => ((i, j), dist.clone()),
                TypeKey::Pair(i, j) => ((i, j), d.clone()),
                TypeKey::Plain(_) => unreachable!(),
            }),
        )
        .unwrap()
    }

    #[test]
    fn strong_connectivity_examples() {
        assert_eq!(check_strong_connectivity(&example_nu()).unwrap(), Connectivity::Pass);

        let single = GWSpec::pair(2, [((1, 1), Distribution::point_mass(v(&[1, 0])))]).unwrap();
        assert_eq!(check_strong_connectivity(&single).unwrap(), Connectivity::Pass);

        // two self-contained pair types
        let split = GWSpec::pair(2, [
            ((1, 1), Distribution::point_mass(v(&[1, 0]))),
            ((2, 2), Distribution::point_mass(v(&[0, 1]))),
        ])
        .unwrap();
        assert_eq!(
            check_strong_connectivity(&split).unwrap(),
            Connectivity::Unreachable { from: TypeKey::Pair(1, 1), to: TypeKey::Pair(2, 2) }
        );

        let empty = GWSpec::pair(2, []).unwrap();
        assert!(matches!(check_strong_connectivity(&empty), Err(Error::EmptySpec)));
    }

    #[test]
    fn condition_i_examples() {
        assert_eq!(check_condition_i(&example_nu()), ConditionI::Pass);

        let broken = example_with((2, 1), Distribution::point_mass(v(&[2, 0])));
        assert_eq!(
            check_condition_i(&broken),
            ConditionI::Counterexample { i: 1, j: 1, k: 2, c: v(&[1, 1]) }
        );

        // single-label vectors only: nothing to swap
        let forced = GWSpec::pair(1, [((1, 1), Distribution::new(1, [(v(&[0]), r(1, 2)), (v(&[3]), r(1, 2))]).unwrap())]).unwrap();
        assert_eq!(check_condition_i(&forced), ConditionI::Pass);
    }

    #[test]
    fn balance_graph_of_running_example() {
        let g = build_balance_graph(&example_nu()).unwrap();
        let a = |i| SupportClass::new(i, v(&[1, 1]));
        let b = SupportClass::new(1, v(&[2, 1]));
        let d = SupportClass::new(2, v(&[0, 3]));
        assert_eq!(g.nodes(), &[a(1), b.clone(), d.clone(), a(2)]);
        // brute-force adjacency from the edge rule over distinct pairs
        let mut expected = 0;
        for (x, u) in g.nodes().iter().enumerate() {
            for w in &g.nodes()[x + 1..] {
                if u.vector.has(w.label) && w.vector.has(u.label) {
                    expected += 1;
                    assert!(g.ratio(u, w).is_some());
                }
            }
        }
        assert_eq!(g.edge_count(), expected);
        assert!(g.ratio(&a(1), &b).is_some());
        assert!(g.ratio(&b, &d).is_none());
        // all four classes end up with equal h within a label
        assert_eq!(g.ratio(&a(1), &b).unwrap(), Rational::one());
    }

    #[test]
    fn single_type_ratio_is_one_for_equal_weights() {
        let nu = GWSpec::pair(1, [((1, 1), Distribution::new(1, [(v(&[1]), r(1, 2)), (v(&[2]), r(1, 2))]).unwrap())]).unwrap();
        let g = build_balance_graph(&nu).unwrap();
        assert_eq!(g.nodes().len(), 2);
        assert_eq!(g.edge_count(), 1);
        let (u, w, ratio) = g.edges().next().unwrap();
        assert_eq!((u.vector.clone(), w.vector.clone()), (v(&[2]), v(&[3])));
        // [p1 · 3 · 2] / [p2 · 2 · 3]
        assert_eq!(ratio, &Rational::one());
    }

    #[test]
    fn edge_ratio_antisymmetry() {
        let g = build_balance_graph(&example_nu()).unwrap();
        for (u, w, ratio) in g.edges() {
            assert_eq!(ratio * &g.ratio(w, u).unwrap(), Rational::one());
        }
    }

    #[test]
    fn condition_ii_examples() {
        let (cond, connected) = check_condition_ii(&example_nu()).unwrap();
        assert_eq!(cond, ConditionIi::Pass);
        assert!(connected);

        let nu11 = Distribution::new(2, [(v(&[0, 1]), r(1, 2)), (v(&[1, 1]), r(1, 2))]).unwrap();
        let perturbed = example_with((1, 1), nu11);
        let graph = build_balance_graph(&perturbed).unwrap();
        let (cond, _) = check_condition_ii(&perturbed).unwrap();
        let ConditionIi::Violation { cycle, product } = cond else { panic!("expected violation") };
        assert_ne!(product, Rational::one());
        assert_eq!(graph.walk_product(&cycle), Some(product));
        // via the direct edge, h(1,a)/h(1,b) = ν11(0,1)·2·2 / (ν11(1,1)·1·3) = 4/3
        let a = SupportClass::new(1, v(&[1, 1]));
        let b = SupportClass::new(1, v(&[2, 1]));
        assert_eq!(graph.ratio(&a, &b), Some(r(4, 3)));
    }

    #[test]
    fn tree_shaped_balance_graph_passes() {
        // one class per label: the balance graph is a single edge
        let nu = GWSpec::pair(2, [
            ((1, 2), Distribution::point_mass(v(&[0, 0]))),
            ((2, 1), Distribution::point_mass(v(&[0, 0]))),
        ])
        .unwrap();
        let (cond, connected) = check_condition_ii(&nu).unwrap();
        assert_eq!(cond, ConditionIi::Pass);
        assert!(connected);
    }

    #[test]
    fn full_report() {
        let report = check(&example_nu()).unwrap();
        assert!(report.passed);
        assert_eq!(report.first_failure(), None);

        let broken = example_with((2, 1), Distribution::point_mass(v(&[2, 0])));
        let report = check(&broken).unwrap();
        assert_eq!(report.first_failure(), Some("condition_i"));
        assert_eq!(report.condition_ii, ConditionIi::Skipped);
    }
}
