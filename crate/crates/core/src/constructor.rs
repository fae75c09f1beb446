//! Construction of the unique reversible `μ ∼ ν` and an exact detailed
//! balance verifier.

use serde::Serialize;

use crate::checker;
use crate::error::Error;
use crate::model::{GWSpec, Mode, RootMeasure};
use crate::rational::Rational;
use crate::dist::Distribution;
use crate::vector::{Label, OffspringVector, SupportClass};

/// Builds the reversible root measure for `ν`.
///
/// The balance-graph potentials are `h(i,c) = μ(i) μ_i(c)` up to a common
/// factor, so `μ_i(c) = h(i,c) / Σ_{c'} h(i,c')` and
/// `μ(i) = Σ_c h(i,c) / Σ_{i',c'} h(i',c')`.
pub fn construct_mu(nu: &GWSpec) -> Result<RootMeasure, Error> {
    let (report, graph) = checker::check_with_graph(nu)?;
    if !report.passed {
        if report.first_failure() == Some("connected_support") {
            return Err(Error::DisconnectedBalanceGraph);
        }
        return Err(Error::ChecksNotPassed(Box::new(report)));
    }
    let (graph, consistency) = graph.expect("graph is built when checks pass");
    let h = consistency.potentials.expect("potentials exist when checks pass");

    let n = nu.n();
    let mut label_mass = vec![Rational::zero(); n];
    for (class, weight) in graph.nodes().iter().zip(&h) {
        label_mass[class.label - 1] = &label_mass[class.label - 1] + weight;
    }
    let total: Rational = label_mass.iter().sum();

    let mut neighbors = Vec::with_capacity(n);
    for i in 1..=n {
        let entries = graph
            .nodes()
            .iter()
            .zip(&h)
            .filter(|(class, _)| class.label == i)
            .map(|(class, weight)| (class.vector.clone(), weight / &label_mass[i - 1]));
        neighbors.push(Distribution::new(n, entries)?);
    }
    let root = label_mass.iter().map(|m| m / &total).collect();
    RootMeasure::new(root, neighbors, nu.clone())
}

/// Failure of the exact flow identity
/// `μ(i)μ_i(c)ν_{i,j}(d_i)c_j/|c| = μ(j)μ_j(d)ν_{j,i}(c_j)d_i/|d|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceViolation {
    pub from: SupportClass,
    pub to: SupportClass,
    pub lhs: Rational,
    pub rhs: Rational,
}

/// Failure of the support correspondence between `μ_i` and `ν_{j,i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportViolation {
    /// `μ_i(c) > 0`, `c_j > 0`, but `ν_{j,i}(c_j) = 0`.
    MissingDescendantMass { class: SupportClass, parent: Label },
    /// `ν_{j,i}(e) > 0` but `μ_i(e^j) = 0`.
    MissingRootMass { label: Label, parent: Label, vector: OffspringVector },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReversibilityReport {
    pub checked_pairs: usize,
    pub balance: Vec<BalanceViolation>,
    pub support: Vec<SupportViolation>,
}

impl ReversibilityReport {
    pub fn passed(&self) -> bool {
        self.balance.is_empty() && self.support.is_empty()
    }
}

/// Both sides of the flow identity for adjacent classes `from = (i,c)`,
/// `to = (j,d)`: the `μ`-mass moving from `N_i(c)` to `N_j(d)` in one step,
/// and back.
pub fn flow_pair(mu: &RootMeasure, from: &SupportClass, to: &SupportClass) -> (Rational, Rational) {
    let nu = mu.descendants();
    let (i, c) = (from.label, &from.vector);
    let (j, d) = (to.label, &to.vector);
    let forward = mu.class_mass(from)
        * nu.prob(i, j, &d.decrement(i).expect("d_i > 0"))
        * Rational::new(i64::from(c.get(j)), i64::from(c.total()));
    let backward = mu.class_mass(to)
        * nu.prob(j, i, &c.decrement(j).expect("c_j > 0"))
        * Rational::new(i64::from(d.get(i)), i64::from(d.total()));
    (forward, backward)
}

/// Checks the flow identity for every pair of distinct adjacent support
/// classes, plus the support correspondence it presumes. In plain mode
/// `ν_{i,j}` is read as `ν_j`.
pub fn verify_reversibility(mu: &RootMeasure) -> ReversibilityReport {
    let nu = mu.descendants();
    let n = mu.n();
    let support = mu.support();
    let mut report = ReversibilityReport::default();

    for (idx, u) in support.iter().enumerate() {
        for w in &support[idx + 1..] {
            if !u.vector.has(w.label) || !w.vector.has(u.label) {
                continue;
            }
            report.checked_pairs += 1;
            let (lhs, rhs) = flow_pair(mu, u, w);
            if lhs != rhs {
                report.balance.push(BalanceViolation { from: u.clone(), to: w.clone(), lhs, rhs });
            }
        }
    }

    for class in &support {
        for j in class.vector.support() {
            let reduced = class.vector.decrement(j).expect("positive coordinate");
            if !nu.has_mass(j, class.label, &reduced) {
                report.support.push(SupportViolation::MissingDescendantMass {
                    class: class.clone(),
                    parent: j,
                });
            }
        }
    }

    for i in 1..=n {
        for j in 1..=n {
            let relevant = match nu.mode() {
                Mode::Pair => true,
                Mode::Plain => {
                    nu.law(i, j).is_some_and(|d| d.active_labels().contains(&i))
                        || mu.neighbor_dist(j).active_labels().contains(&i)
                }
            };
            let Some(dist) = nu.law(j, i).filter(|_| relevant) else { continue };
            for e in dist.vectors() {
                let c = e.increment(j).expect("label in range");
                if !mu.neighbor_dist(i).contains(&c) {
                    report.support.push(SupportViolation::MissingRootMass {
                        label: i,
                        parent: j,
                        vector: e.clone(),
                    });
                }
            }
        }
    }
    report
}
