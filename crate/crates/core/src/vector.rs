use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Vertex labels are 1-based, ranging over `1..=n`.
pub type Label = usize;

/// Counts of neighbors (or children) per label: `counts[j - 1]` is the
/// number carrying label `j`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OffspringVector(Vec<u32>);

impl OffspringVector {
    pub fn new(counts: Vec<u32>) -> Self {
        OffspringVector(counts)
    }

    pub fn zeros(n: usize) -> Self {
        OffspringVector(vec![0; n])
    }

    /// The vector with a single `1` at `label`.
    pub fn unit(n: usize, label: Label) -> Self {
        let mut v = Self::zeros(n);
        v.0[label - 1] = 1;
        v
    }

    /// Counts the labels in `labels` (each in `1..=n`).
    pub fn from_labels(n: usize, labels: impl IntoIterator<Item = Label>) -> Self {
        let mut v = Self::zeros(n);
        for l in labels {
            v.0[l - 1] += 1;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    /// `c_j`. Panics if `label` is outside `1..=len`.
    pub fn get(&self, label: Label) -> u32 {
        self.0[label - 1]
    }

    pub fn has(&self, label: Label) -> bool {
        self.get(label) > 0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    fn check_label(&self, label: Label) -> Result<(), Error> {
        if label == 0 || label > self.0.len() {
            Err(Error::LabelOutOfRange { label, n: self.0.len() })
        } else {
            Ok(())
        }
    }

    /// `c_j`: one fewer at `label`.
    pub fn decrement(&self, label: Label) -> Result<Self, Error> {
        self.check_label(label)?;
        if self.0[label - 1] == 0 {
            return Err(Error::CoordinateUnderflow { label });
        }
        let mut v = self.clone();
        v.0[label - 1] -= 1;
        Ok(v)
    }

    /// `c^k`: one more at `label`.
    pub fn increment(&self, label: Label) -> Result<Self, Error> {
        self.check_label(label)?;
        let mut v = self.clone();
        v.0[label - 1] += 1;
        Ok(v)
    }

    /// `c_j^k`, i.e. `increment(decrement(c, j), k)`.
    pub fn swap(&self, from: Label, to: Label) -> Result<Self, Error> {
        self.decrement(from)?.increment(to)
    }

    /// Labels with positive count, ascending.
    pub fn support(&self) -> impl Iterator<Item = Label> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| i + 1)
    }

    /// Each label repeated by its count, ascending.
    pub fn expand(&self) -> Vec<Label> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i + 1, c as usize))
            .collect()
    }
}

impl fmt::Display for OffspringVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (idx, c) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for OffspringVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `(c1,...,cn)`; the parentheses are optional.
impl FromStr for OffspringVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(inner);
        let counts = inner
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("invalid vector {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OffspringVector(counts))
    }
}

/// A label together with a neighbor vector: the class of rooted trees whose
/// root carries `label` and has `vector` neighbors.
/// Serialized in the selector syntax `label:(c1,...,cn)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SupportClass {
    pub label: Label,
    pub vector: OffspringVector,
}

impl SupportClass {
    pub fn new(label: Label, vector: OffspringVector) -> Self {
        SupportClass { label, vector }
    }
}

impl fmt::Display for SupportClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.label, self.vector)
    }
}

impl fmt::Debug for SupportClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<SupportClass> for String {
    fn from(value: SupportClass) -> Self {
        value.to_string()
    }
}

impl TryFrom<String> for SupportClass {
    type Error = Error;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

/// Parses the selector syntax `label:(c1,...,cn)`.
impl FromStr for SupportClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (label, vector) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("invalid class selector {s:?}")))?;
        let label = label
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid class selector {s:?}")))?;
        Ok(SupportClass::new(label, vector.parse()?))
    }
}
