use crate::model::GWSpec;
use crate::rational::Rational;
use crate::vector::OffspringVector;

pub fn v(c: &[u32]) -> OffspringVector {
    OffspringVector::new(c.to_vec())
}

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn example_nu() -> GWSpec {
    crate::instances::two_label_nu()
}
