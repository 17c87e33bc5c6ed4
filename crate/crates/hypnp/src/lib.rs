//! Hodge and Newton polygons of hypergeometric exponential sums over finite
//! fields.

pub mod acceptance;
pub mod charsum;
pub mod error;
pub mod field;
pub mod frobenius;
pub mod hodge;
pub mod padic;
pub mod params;
pub mod polygon;
pub mod polytope;
pub mod report;
pub mod scalar;
pub mod snf;

use num_bigint::BigInt;
use num_rational::Ratio;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational scalar used throughout the public API.
pub type Rational = Ratio<BigInt>;
/// Machine-word rational scalar for hot loops with small denominators.
pub type SmallRational = Ratio<i64>;

pub type HypParams = params::HypParams<Rational>;
pub type Polygon = polygon::Polygon<Rational>;
pub type OrbitHodgePolygon = hodge::OrbitHodgePolygon<Rational>;
pub type BasisExponent = polytope::BasisExponent<Rational>;

pub use params::CharParams;
