//! Small worked instances, handy for experiments and used throughout the
//! tests and runnable examples.

use crate::dist::Distribution;
use crate::model::GWSpec;
use crate::norelabel::PlainSpec;
use crate::parametrizer::{ParameterAssignment, SupportTemplate};
use crate::rational::Rational;
use crate::vector::{OffspringVector, SupportClass};

fn v(c: &[u32]) -> OffspringVector {
    OffspringVector::new(c.to_vec())
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Two labels, pair types. The reversible root measure has neighbor
/// vectors `(1,1), (2,1)` for label 1 and `(0,3), (1,1)` for label 2, each
/// with probability 1/2, and root law `(3/8, 5/8)`.
pub fn two_label_nu() -> GWSpec {
    let d = |entries: &[(&[u32], Rational)]| {
        Distribution::new(2, entries.iter().map(|(c, p)| (v(c), p.clone()))).expect("valid")
    };
    GWSpec::pair(2, [
        ((1, 1), d(&[(&[0, 1], r(3, 7)), (&[1, 1], r(4, 7))])),
        ((2, 1), d(&[(&[1, 0], r(3, 5)), (&[2, 0], r(2, 5))])),
        ((2, 2), d(&[(&[0, 2], r(2, 3)), (&[1, 0], r(1, 3))])),
        ((1, 2), d(&[(&[0, 1], r(1, 1))])),
    ])
    .expect("valid spec")
}

/// Support template `{1:(1,1), 1:(2,1), 2:(0,3), 2:(1,1)}`.
pub fn two_label_template() -> SupportTemplate {
    SupportTemplate::new(2, [
        SupportClass::new(1, v(&[1, 1])),
        SupportClass::new(1, v(&[2, 1])),
        SupportClass::new(2, v(&[0, 3])),
        SupportClass::new(2, v(&[1, 1])),
    ])
}

/// Weights on [`two_label_template`]: `μ'_1(1,1) = s`, `μ'_1(2,1) = 1-s`,
/// `μ'_2(1,1) = t`, `μ'_2(0,3) = 1-t`. Requires `s, t ∈ (0,1)`.
pub fn two_label_parameters(s: &Rational, t: &Rational) -> ParameterAssignment {
    let one = Rational::one();
    ParameterAssignment::new([
        (SupportClass::new(1, v(&[1, 1])), s.clone()),
        (SupportClass::new(1, v(&[2, 1])), &one - s),
        (SupportClass::new(2, v(&[1, 1])), t.clone()),
        (SupportClass::new(2, v(&[0, 3])), &one - t),
    ])
}

/// Three labels without relabeling. Label 1 has 1 or 2 children with equal
/// probability and neighbor parameters `(1/3, 1/3, 1/3)`; labels 2 and 3
/// always have 4 children with parameters `(1/2, 0, 1/2)` and
/// `(1/2, 1/2, 0)`.
pub fn three_label_plain() -> PlainSpec {
    three_label_plain_with(r(1, 2), r(1, 2))
}

/// As [`three_label_plain`] with `p_{3,1}`, `p_{3,2}` supplied.
pub fn three_label_plain_with(p31: Rational, p32: Rational) -> PlainSpec {
    let third = r(1, 3);
    let half = r(1, 2);
    PlainSpec::new(
        3,
        vec![
            vec![(1, half.clone()), (2, half.clone())],
            vec![(4, Rational::one())],
            vec![(4, Rational::one())],
        ],
        vec![
            vec![third.clone(), third.clone(), third],
            vec![half.clone(), Rational::zero(), half],
            vec![p31, p32, Rational::zero()],
        ],
    )
    .expect("valid plain spec")
}

/// Single label with offspring law `probs[k] = P(k children)`.
pub fn single_type(probs: &[Rational]) -> GWSpec {
    let dist = Distribution::new(
        1,
        probs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_positive())
            .map(|(k, p)| (v(&[k as u32]), p.clone())),
    )
    .expect("valid offspring law");
    GWSpec::pair(1, [((1, 1), dist)]).expect("valid spec")
}
