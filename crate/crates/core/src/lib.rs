//! Unit signatures, square classes of units and 2-ranks of class groups of
//! real quadratic fields, together with an analyzer for extensions of finite
//! abelian 2-groups.

pub mod abelian2;
pub mod arith;
pub mod cli;
pub mod form_class;
pub mod json;
pub mod quadfield;
pub mod selftest;
pub mod unit_type;

pub use quadfield::{fundamental_unit, QuadInt, QuadNumber, QuadraticField, UnitRecord};
