//! The two measures the crate works with: the Galton–Watson law `ν` of the
//! descendant subtrees, and the measure `μ` on rooted labeled trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::Error;
use crate::rational::Rational;
use crate::vector::{Label, OffspringVector, SupportClass};

/// How a vertex's Galton–Watson type is read off the labeled tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Type is the ordered pair (parent label, own label).
    Pair,
    /// Type is the vertex's own label.
    Plain,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Pair => f.write_str("pair"),
            Mode::Plain => f.write_str("plain"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeKey {
    Pair(Label, Label),
    Plain(Label),
}

impl TypeKey {
    /// Label of a vertex of this type.
    pub fn label(&self) -> Label {
        match *self {
            TypeKey::Pair(_, j) => j,
            TypeKey::Plain(i) => i,
        }
    }

    /// Type of a child labeled `child` under a vertex of this type.
    pub fn child(&self, child: Label) -> TypeKey {
        match *self {
            TypeKey::Pair(_, j) => TypeKey::Pair(j, child),
            TypeKey::Plain(_) => TypeKey::Plain(child),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            TypeKey::Pair(..) => Mode::Pair,
            TypeKey::Plain(_) => Mode::Plain,
        }
    }
}

impl fmt::Display for TypeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeKey::Pair(i, j) => write!(f, "({i},{j})"),
            TypeKey::Plain(i) => write!(f, "{i}"),
        }
    }
}

/// A multi-type Galton–Watson law with finitely supported offspring
/// distributions, one per type.
///
/// Construction enforces closure: every type that can be produced as a
/// child has its own offspring distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GWSpec {
    n: usize,
    mode: Mode,
    offspring: BTreeMap<TypeKey, Distribution>,
}

impl GWSpec {
    pub fn pair(
        n: usize,
        entries: impl IntoIterator<Item = ((Label, Label), Distribution)>,
    ) -> Result<Self, Error> {
        Self::build(
            n,
            Mode::Pair,
            entries.into_iter().map(|((i, j), d)| (TypeKey::Pair(i, j), d)),
        )
    }

    pub fn plain(
        n: usize,
        entries: impl IntoIterator<Item = (Label, Distribution)>,
    ) -> Result<Self, Error> {
        Self::build(
            n,
            Mode::Plain,
            entries.into_iter().map(|(i, d)| (TypeKey::Plain(i), d)),
        )
    }

    pub fn build(
        n: usize,
        mode: Mode,
        entries: impl IntoIterator<Item = (TypeKey, Distribution)>,
    ) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidSpec("n must be positive".into()));
        }
        let in_range = |l: Label| (1..=n).contains(&l);
        let mut offspring = BTreeMap::new();
        for (key, dist) in entries {
            if key.mode() != mode {
                return Err(Error::InvalidSpec(format!("type {key} in {mode} mode spec")));
            }
            let labels_ok = match key {
                TypeKey::Pair(i, j) => in_range(i) && in_range(j),
                TypeKey::Plain(i) => in_range(i),
            };
            if !labels_ok {
                return Err(Error::InvalidSpec(format!("type {key} outside [{n}]")));
            }
            if dist.n() != n {
                return Err(Error::InvalidSpec(format!(
                    "type {key} has vectors of length {}, expected {n}",
                    dist.n()
                )));
            }
            if offspring.insert(key, dist).is_some() {
                return Err(Error::InvalidSpec(format!("duplicate type {key}")));
            }
        }
        for (key, dist) in &offspring {
            for k in dist.active_labels() {
                let child = key.child(k);
                if !offspring.contains_key(&child) {
                    return Err(Error::MissingType { parent: *key, child });
                }
            }
        }
        Ok(GWSpec { n, mode, offspring })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_empty(&self) -> bool {
        self.offspring.is_empty()
    }

    pub fn types(&self) -> impl Iterator<Item = TypeKey> + '_ {
        self.offspring.keys().copied()
    }

    pub fn get(&self, key: &TypeKey) -> Option<&Distribution> {
        self.offspring.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TypeKey, &Distribution)> {
        self.offspring.iter()
    }

    /// Offspring law of a vertex labeled `child` whose parent is labeled
    /// `parent`. In plain mode the parent is ignored.
    pub fn law(&self, parent: Label, child: Label) -> Option<&Distribution> {
        match self.mode {
            Mode::Pair => self.offspring.get(&TypeKey::Pair(parent, child)),
            Mode::Plain => self.offspring.get(&TypeKey::Plain(child)),
        }
    }

    /// `ν_{parent,child}(c)`, zero when absent.
    pub fn prob(&self, parent: Label, child: Label, c: &OffspringVector) -> Rational {
        self.law(parent, child)
            .map(|d| d.prob(c))
            .unwrap_or_else(Rational::zero)
    }

    pub fn has_mass(&self, parent: Label, child: Label, c: &OffspringVector) -> bool {
        self.law(parent, child).is_some_and(|d| d.contains(c))
    }

    /// `F_i`: neighbor vectors `c` of an `i`-labeled root for which some
    /// `j` has `ν_{j,i}(c_j) > 0`.
    pub fn candidate_support(&self, i: Label) -> BTreeSet<OffspringVector> {
        let mut out = BTreeSet::new();
        for j in 1..=self.n {
            if let Some(dist) = self.law(j, i) {
                for e in dist.vectors() {
                    out.insert(e.increment(j).expect("label in range"));
                }
            }
        }
        out
    }
}

/// A measure `μ` on rooted labeled trees with `μ ∼ ν`: root label law,
/// per-label neighbor-vector laws, and the descendant law `ν`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootMeasure {
    root: Vec<Rational>,
    neighbors: Vec<Distribution>,
    descendants: GWSpec,
}

impl RootMeasure {
    /// `root[i-1] = μ(i)`, `neighbors[i-1] = μ_i`.
    pub fn new(
        root: Vec<Rational>,
        neighbors: Vec<Distribution>,
        descendants: GWSpec,
    ) -> Result<Self, Error> {
        let n = descendants.n();
        if root.len() != n || neighbors.len() != n {
            return Err(Error::InvalidMeasure(format!(
                "expected {n} root probabilities and neighbor laws, got {} and {}",
                root.len(),
                neighbors.len()
            )));
        }
        for (idx, p) in root.iter().enumerate() {
            if !p.is_positive() || !p.is_probability() {
                return Err(Error::InvalidMeasure(format!(
                    "root probability of label {} is {p}",
                    idx + 1
                )));
            }
        }
        let total: Rational = root.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!(
                "root probabilities sum to {total}"
            )));
        }
        for (idx, dist) in neighbors.iter().enumerate() {
            if dist.n() != n {
                return Err(Error::InvalidMeasure(format!(
                    "neighbor law of label {} has wrong vector length",
                    idx + 1
                )));
            }
            if let Some(c) = dist.vectors().find(|c| c.total() == 0) {
                return Err(Error::InvalidMeasure(format!(
                    "neighbor law of label {} gives the root no neighbors ({c})",
                    idx + 1
                )));
            }
        }
        Ok(RootMeasure { root, neighbors, descendants })
    }

    pub fn n(&self) -> usize {
        self.root.len()
    }

    /// `μ(i)`.
    pub fn root_prob(&self, i: Label) -> &Rational {
        &self.root[i - 1]
    }

    /// `μ_i`.
    pub fn neighbor_dist(&self, i: Label) -> &Distribution {
        &self.neighbors[i - 1]
    }

    pub fn descendants(&self) -> &GWSpec {
        &self.descendants
    }

    /// `μ(N_i(c)) = μ(i) μ_i(c)`.
    pub fn class_mass(&self, class: &SupportClass) -> Rational {
        self.root_prob(class.label) * self.neighbor_dist(class.label).prob(&class.vector)
    }

    pub fn contains(&self, class: &SupportClass) -> bool {
        (1..=self.n()).contains(&class.label)
            && self.neighbor_dist(class.label).contains(&class.vector)
    }

    /// All support classes, sorted by label then vector.
    pub fn support(&self) -> Vec<SupportClass> {
        (1..=self.n())
            .flat_map(|i| {
                self.neighbor_dist(i)
                    .vectors()
                    .map(move |c| SupportClass::new(i, c.clone()))
            })
            .collect()
    }

    /// The same measure with a different root-label law. Used to build
    /// deliberately broken measures in tests.
    pub fn with_root(&self, root: Vec<Rational>) -> Result<Self, Error> {
        RootMeasure::new(root, self.neighbors.clone(), self.descendants.clone())
    }
}
