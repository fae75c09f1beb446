//! Every reversible `μ ∼ ν` with strongly connected `ν` is fixed by its
//! support `M` (a set of classes `(i, c)`) and the neighbor laws `μ'_i` on
//! it. From those, `ν` and the root law follow:
//!
//! - `ν_{i,j}(d_i) ∝ μ'_j(d) · d_i / |d|` over `(j, d) ∈ M` with `d_i > 0`,
//! - `μ(i) / μ(j) = μ'_j(d) ν_{j,i}(e_j) (d_i/|d|) / (μ'_i(e) ν_{i,j}(d_i) (e_j/|e|))`
//!   for `(j,d), (i,e) ∈ M` with `d_i, e_j > 0`.
//!
//! The family for a fixed `M` is an affine set of dimension `|M| - n`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::dist::Distribution;
use crate::error::Error;
use crate::model::{GWSpec, RootMeasure};
use crate::potential::{self, RatioEdge};
use crate::rational::Rational;
use crate::vector::{Label, SupportClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportTemplate {
    n: usize,
    classes: BTreeSet<SupportClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum TemplateFailure {
    /// A class is malformed: bad label, wrong length, or no neighbors.
    Malformed { class: SupportClass },
    /// Label `label` has no class at all.
    EmptyLabel { label: Label },
    /// Some `(i, c)` has `c_j > 0` but no `(j, d)` has `d_i > 0`.
    Symmetry { i: Label, j: Label },
    /// No chain of classes leads from label `from` to label `to`.
    Connectivity { from: Label, to: Label },
}

impl fmt::Display for TemplateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateFailure::Malformed { class } => write!(f, "malformed class {class}"),
            TemplateFailure::EmptyLabel { label } => write!(f, "label {label} has no class"),
            TemplateFailure::Symmetry { i, j } => write!(
                f,
                "a class of label {i} has a neighbor labeled {j}, but no class of label {j} has a neighbor labeled {i}"
            ),
            TemplateFailure::Connectivity { from, to } => {
                write!(f, "label {to} cannot be reached from label {from}")
            }
        }
    }
}

impl SupportTemplate {
    pub fn new(n: usize, classes: impl IntoIterator<Item = SupportClass>) -> Self {
        SupportTemplate { n, classes: classes.into_iter().collect() }
    }

    /// The support of `μ` as a template.
    pub fn from_measure(mu: &RootMeasure) -> Self {
        Self::new(mu.n(), mu.support())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> &BTreeSet<SupportClass> {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn of_label(&self, i: Label) -> impl Iterator<Item = &SupportClass> {
        self.classes.iter().filter(move |c| c.label == i)
    }

    /// Checks class well-formedness, the neighbor symmetry condition
    /// `(∃(i,c)∈M: c_j>0) ⇔ (∃(j,d)∈M: d_i>0)`, and that every label reaches
    /// every other through a chain `i_1, ..., i_k` in which each interior
    /// label `i_s` has a class with both `i_{s-1}` and `i_{s+1}` neighbors.
    pub fn validate(&self) -> Result<(), TemplateFailure> {
        let n = self.n;
        for class in &self.classes {
            if !(1..=n).contains(&class.label) || class.vector.len() != n || class.vector.total() == 0 {
                return Err(TemplateFailure::Malformed { class: class.clone() });
            }
        }
        for i in 1..=n {
            if self.of_label(i).next().is_none() {
                return Err(TemplateFailure::EmptyLabel { label: i });
            }
        }
        let adjacent = |i: Label, j: Label| self.of_label(i).any(|c| c.vector.has(j));
        for i in 1..=n {
            for j in 1..=n {
                if adjacent(i, j) && !adjacent(j, i) {
                    return Err(TemplateFailure::Symmetry { i, j });
                }
            }
        }

        // BFS over steps (a -> b); (a -> b) continues to (b -> c) when some
        // class of label b has both a and c neighbors.
        for from in 1..=n {
            let mut reached = BTreeSet::from([from]);
            let mut seen = BTreeSet::new();
            let mut queue: VecDeque<(Label, Label)> = (1..=n)
                .filter(|&b| adjacent(from, b))
                .map(|b| (from, b))
                .collect();
            while let Some((a, b)) = queue.pop_front() {
                if !seen.insert((a, b)) {
                    continue;
                }
                reached.insert(b);
                for c in 1..=n {
                    if self.of_label(b).any(|d| d.vector.has(a) && d.vector.has(c)) {
                        queue.push_back((b, c));
                    }
                }
            }
            if let Some(to) = (1..=n).find(|l| !reached.contains(l)) {
                return Err(TemplateFailure::Connectivity { from, to });
            }
        }
        Ok(())
    }

    /// `|M| - n`.
    pub fn dimension(&self) -> Result<usize, Error> {
        self.validate().map_err(Error::InvalidTemplate)?;
        Ok(self.classes.len() - self.n)
    }
}

/// The free weights `μ'_i(c)` on a template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterAssignment {
    weights: BTreeMap<SupportClass, Rational>,
}

impl ParameterAssignment {
    pub fn new(weights: impl IntoIterator<Item = (SupportClass, Rational)>) -> Self {
        ParameterAssignment { weights: weights.into_iter().collect() }
    }

    /// Reads `μ'` off an existing measure.
    pub fn from_measure(mu: &RootMeasure) -> Self {
        Self::new(mu.support().into_iter().map(|class| {
            let p = mu.neighbor_dist(class.label).prob(&class.vector);
            (class, p)
        }))
    }

    pub fn weights(&self) -> &BTreeMap<SupportClass, Rational> {
        &self.weights
    }

    pub fn weight(&self, class: &SupportClass) -> Rational {
        self.weights.get(class).cloned().unwrap_or_else(Rational::zero)
    }

    /// Weights must be positive exactly on `M` and sum to one per label.
    pub fn validate(&self, template: &SupportTemplate) -> Result<(), Error> {
        for (class, p) in &self.weights {
            if !template.classes.contains(class) {
                return Err(Error::InvalidParameters(format!("{class} is not in the template")));
            }
            if !p.is_positive() || !p.is_probability() {
                return Err(Error::InvalidParameters(format!("weight of {class} is {p}")));
            }
        }
        if let Some(class) = template.classes.iter().find(|c| !self.weights.contains_key(c)) {
            return Err(Error::InvalidParameters(format!("no weight for {class}")));
        }
        for i in 1..=template.n {
            let total: Rational = template.of_label(i).map(|c| &self.weights[c]).sum();
            if !total.is_one() {
                return Err(Error::InvalidParameters(format!(
                    "weights of label {i} sum to {total}"
                )));
            }
        }
        Ok(())
    }
}

/// Solves for the descendant law: for each `(i,j)`,
/// `ν_{i,j}(d_i) ∝ μ'_j(d) d_i / |d|` over `(j,d) ∈ M` with `d_i > 0`,
/// normalized to one.
pub fn solve_nu(template: &SupportTemplate, params: &ParameterAssignment) -> Result<GWSpec, Error> {
    params.validate(template)?;
    let n = template.n;
    let mut laws = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            let targets: Vec<_> = template
                .of_label(j)
                .filter(|d| d.vector.has(i))
                .map(|d| {
                    let w = params.weight(d)
                        * Rational::new(i64::from(d.vector.get(i)), i64::from(d.vector.total()));
                    (d.vector.decrement(i).expect("d_i > 0"), w)
                })
                .collect();
            if targets.is_empty() {
                continue;
            }
            let total: Rational = targets.iter().map(|(_, w)| w).sum();
            let dist = Distribution::new(n, targets.into_iter().map(|(e, w)| (e, w / &total)))?;
            laws.push(((i, j), dist));
        }
    }
    GWSpec::pair(n, laws).map_err(|err| match err {
        Error::MissingType { child: crate::model::TypeKey::Pair(p, c), .. } => {
            Error::NoAdmissibleTarget { parent: p, child: c }
        }
        other => other,
    })
}

/// Solves for the root law from the ratio equations over every admissible
/// `(d, e)` choice. Any inconsistency means the inputs were not valid.
pub fn solve_root(
    template: &SupportTemplate,
    params: &ParameterAssignment,
    nu: &GWSpec,
) -> Result<Vec<Rational>, Error> {
    let n = template.n;
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            for d in template.of_label(j).filter(|d| d.vector.has(i)) {
                for e in template.of_label(i).filter(|e| e.vector.has(j)) {
                    let (dv, ev) = (&d.vector, &e.vector);
                    let num = params.weight(d)
                        * nu.prob(j, i, &ev.decrement(j)?)
                        * Rational::new(i64::from(dv.get(i)), i64::from(dv.total()));
                    let den = params.weight(e)
                        * nu.prob(i, j, &dv.decrement(i)?)
                        * Rational::new(i64::from(ev.get(j)), i64::from(ev.total()));
                    if den.is_zero() || num.is_zero() {
                        return Err(Error::InconsistentRatios);
                    }
                    // μ(i)/μ(j)
                    edges.push(RatioEdge { a: i - 1, b: j - 1, ratio: num / den });
                }
            }
        }
    }
    let potentials = potential::solve(n, &edges).map_err(|_| Error::InconsistentRatios)?;
    if !potentials.is_connected() {
        return Err(Error::InconsistentRatios);
    }
    let total: Rational = potentials.values.iter().sum();
    Ok(potentials.values.iter().map(|p| p / &total).collect())
}

/// Assembles the full measure: `μ_i = μ'_i`, descendants from
/// [`solve_nu`], root law from [`solve_root`].
///
/// If the label graph has a cycle, the weights must make the label chain
/// `P(i→j) = Σ_c μ'_i(c) c_j/|c|` reversible; otherwise the root ratios
/// disagree and this returns [`Error::InconsistentRatios`].
pub fn parametrize(template: &SupportTemplate, params: &ParameterAssignment) -> Result<RootMeasure, Error> {
    template.validate().map_err(Error::InvalidTemplate)?;
    let nu = solve_nu(template, params)?;
    let root = solve_root(template, params, &nu)?;
    let n = template.n;
    let neighbors = (1..=n)
        .map(|i| {
            Distribution::new(
                n,
                template.of_label(i).map(|c| (c.vector.clone(), params.weight(c))),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    RootMeasure::new(root, neighbors, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker;
    use crate::constructor;
    use crate::instances::{two_label_nu, two_label_parameters, two_label_template};
    use crate::testutil::{r, v};

    fn class(i: Label, c: &[u32]) -> SupportClass {
        SupportClass::new(i, v(c))
    }

    #[test]
    fn validate_examples() {
        assert_eq!(two_label_template().validate(), Ok(()));

        let split = SupportTemplate::new(2, [class(1, &[1, 0]), class(2, &[0, 1])]);
        assert_eq!(split.validate(), Err(TemplateFailure::Connectivity { from: 1, to: 2 }));

        let lopsided = SupportTemplate::new(2, [class(1, &[0, 1]), class(2, &[0, 1])]);
        assert_eq!(lopsided.validate(), Err(TemplateFailure::Symmetry { i: 1, j: 2 }));

        let missing = SupportTemplate::new(2, [class(1, &[0, 1])]);
        assert_eq!(missing.validate(), Err(TemplateFailure::EmptyLabel { label: 2 }));
    }

    #[test]
    fn chain_needs_interior_class_with_both_neighbors() {
        // label 2 touches 1 and 3 but never both at once
        let m = SupportTemplate::new(3, [
            class(1, &[0, 1, 0]),
            class(2, &[1, 0, 0]),
            class(2, &[0, 0, 1]),
            class(3, &[0, 1, 0]),
        ]);
        assert_eq!(m.validate(), Err(TemplateFailure::Connectivity { from: 1, to: 3 }));
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(two_label_template().dimension().unwrap(), 2);
        let one_each = SupportTemplate::new(2, [class(1, &[1, 1]), class(2, &[1, 1])]);
        assert_eq!(one_each.dimension().unwrap(), 0);
        let seven = SupportTemplate::new(3, [
            class(1, &[1, 1, 1]),
            class(1, &[2, 1, 1]),
            class(1, &[0, 1, 1]),
            class(2, &[1, 1, 1]),
            class(2, &[1, 0, 1]),
            class(3, &[1, 1, 1]),
            class(3, &[1, 1, 0]),
        ]);
        assert_eq!(seven.dimension().unwrap(), 4);
    }

    #[test]
    fn half_half_recovers_running_example() {
        let half = r(1, 2);
        let params = two_label_parameters(&half, &half);
        let nu = solve_nu(&two_label_template(), &params).unwrap();
        assert_eq!(nu, two_label_nu());
        assert_eq!(nu.prob(1, 1, &v(&[0, 1])), r(3, 7));
        assert_eq!(nu.law(1, 2).unwrap(), &Distribution::point_mass(v(&[0, 1])));
        let root = solve_root(&two_label_template(), &params, &nu).unwrap();
        assert_eq!(root, vec![r(3, 8), r(5, 8)]);
    }

    #[test]
    fn third_for_label_one() {
        let s = r(1, 3);
        let params = two_label_parameters(&s, &r(1, 2));
        let nu = solve_nu(&two_label_template(), &params).unwrap();
        // 3s/(4-s) and (4-4s)/(4-s) at s = 1/3
        assert_eq!(nu.prob(1, 1, &v(&[0, 1])), r(3, 11));
        assert_eq!(nu.prob(1, 1, &v(&[1, 1])), r(8, 11));
    }

    /// Closed forms obtained by solving the proportionality equations on
    /// the two-label template by hand: with μ'_1(1,1)=s, μ'_2(1,1)=t,
    /// ν_{1,1}(0,1) = 3s/(4-s), ν_{2,1}(2,0) = 2(1-s)/(2+s),
    /// ν_{2,2}(0,2) = 2(1-t)/(2-t), μ(1) = 3t/(2+s+3t).
    #[test]
    fn two_label_closed_forms() {
        let one = Rational::one();
        let two = Rational::from_integer(2);
        let three = Rational::from_integer(3);
        let four = Rational::from_integer(4);
        for (s, t) in [(r(1, 3), r(2, 5)), (r(7, 8), r(1, 9)), (r(1, 2), r(1, 2)), (r(5, 11), r(10, 11))] {
            let params = two_label_parameters(&s, &t);
            let mu = parametrize(&two_label_template(), &params).unwrap();
            let nu = mu.descendants();
            assert_eq!(nu.prob(1, 1, &v(&[0, 1])), &three * &s / (&four - &s));
            assert_eq!(nu.prob(2, 1, &v(&[2, 0])), &two * (&one - &s) / (&two + &s));
            assert_eq!(nu.prob(2, 2, &v(&[0, 2])), &two * (&one - &t) / (&two - &t));
            assert_eq!(mu.root_prob(1), &(&three * &t / (&two + &s + &three * &t)));
            assert!(constructor::verify_reversibility(&mu).passed());
        }
    }

    #[test]
    fn single_label_root_is_one() {
        let m = SupportTemplate::new(1, [class(1, &[1]), class(1, &[4])]);
        let params = ParameterAssignment::new([(class(1, &[1]), r(1, 5)), (class(1, &[4]), r(4, 5))]);
        let mu = parametrize(&m, &params).unwrap();
        assert_eq!(mu.root_prob(1), &Rational::one());
    }

    #[test]
    fn unique_target_gets_probability_one() {
        let params = two_label_parameters(&r(1, 4), &r(3, 4));
        let nu = solve_nu(&two_label_template(), &params).unwrap();
        assert_eq!(nu.law(1, 2).unwrap(), &Distribution::point_mass(v(&[0, 1])));
    }

    #[test]
    fn bad_parameters() {
        let m = two_label_template();
        let mut w: BTreeMap<_, _> = two_label_parameters(&r(1, 2), &r(1, 2)).weights().clone();
        w.insert(class(1, &[1, 1]), r(1, 3));
        assert!(matches!(
            solve_nu(&m, &ParameterAssignment::new(w.clone())),
            Err(Error::InvalidParameters(_))
        ));
        w.insert(class(1, &[3, 3]), r(1, 6));
        assert!(solve_nu(&m, &ParameterAssignment::new(w)).is_err());
    }

    #[test]
    fn unvalidated_template_reports_missing_target() {
        // ν_{2,1} puts a label-2 child under label 1, but no class of
        // label 2 has a label-1 neighbor
        let m = SupportTemplate::new(2, [class(1, &[0, 2]), class(2, &[0, 1])]);
        assert!(m.validate().is_err());
        let params = ParameterAssignment::new([(class(1, &[0, 2]), Rational::one()), (class(2, &[0, 1]), Rational::one())]);
        assert!(matches!(
            solve_nu(&m, &params),
            Err(Error::NoAdmissibleTarget { parent: 1, child: 2 })
        ));
    }

    #[test]
    fn label_cycle_can_make_root_ratios_inconsistent() {
        // each pair fixes μ(i)/μ(j) = E_j[d_i/|d|] / E_i[c_j/|c|]; around the
        // cycle 1-2-3 these ratios multiply to 41·14/(17·42) ≠ 1
        let m = SupportTemplate::new(
            3,
            [
                class(1, &[1, 1, 1]),
                class(2, &[0, 1, 2]),
                class(2, &[2, 1, 1]),
                class(3, &[1, 2, 0]),
                class(3, &[2, 1, 1]),
            ],
        );
        assert!(m.validate().is_ok());
        let params = ParameterAssignment::new([
            (class(1, &[1, 1, 1]), Rational::one()),
            (class(2, &[0, 1, 2]), r(1, 3)),
            (class(2, &[2, 1, 1]), r(2, 3)),
            (class(3, &[1, 2, 0]), r(4, 7)),
            (class(3, &[2, 1, 1]), r(3, 7)),
        ]);
        assert!(solve_nu(&m, &params).is_ok());
        assert!(matches!(parametrize(&m, &params), Err(Error::InconsistentRatios)));
    }

    #[test]
    fn solved_nu_passes_the_checker() {
        let params = two_label_parameters(&r(2, 7), &r(5, 9));
        let nu = solve_nu(&two_label_template(), &params).unwrap();
        assert!(checker::check(&nu).unwrap().passed);
    }
}
