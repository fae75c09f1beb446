//! Reversible measures for simple random walk on labeled rooted trees whose
//! descendant subtrees are multi-type Galton–Watson trees.
//!
//! Given a Galton–Watson law `ν` (finite support, exact rational
//! probabilities) the crate can
//!
//! - decide whether a reversible `μ` with `μ ∼ ν` exists ([`checker`]),
//! - build it and verify detailed balance exactly ([`constructor`]),
//! - parametrize every such `μ` by a support template and free weights
//!   ([`parametrizer`]),
//! - handle the regime without relabeling, where offspring laws must be
//!   multinomial ([`norelabel`]),
//! - lift finite graphs to deterministic instances ([`covers`]),
//! - and check flows and mass transport by seeded Monte Carlo
//!   ([`simulator`]).
//!
//! Labels are 1-based. All probabilities are [`Rational`]s.
//!
//! ```
//! use mtgw::{checker, constructor, instances, Rational};
//!
//! let nu = instances::two_label_nu();
//! assert!(checker::check(&nu).unwrap().passed);
//! let mu = constructor::construct_mu(&nu).unwrap();
//! assert_eq!(mu.root_prob(1), &Rational::new(3, 8));
//! assert!(constructor::verify_reversibility(&mu).passed());
//! ```

pub mod checker;
pub mod cli;
pub mod constructor;
pub mod covers;
pub mod dist;
pub mod error;
pub mod format;
pub mod instances;
pub mod model;
pub mod norelabel;
pub mod parametrizer;
mod potential;
pub mod rational;
pub mod simulator;
pub mod vector;

#[cfg(test)]
mod testutil;

pub use dist::Distribution;
pub use error::Error;
pub use model::{GWSpec, Mode, RootMeasure, TypeKey};
pub use rational::Rational;
pub use vector::{Label, OffspringVector, SupportClass};
