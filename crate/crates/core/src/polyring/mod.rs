//! Sparse multivariate polynomials and rational functions over F_p.

mod extfield;
mod gcd;
mod modgcd;
mod modulus;
mod monomial;
mod poly;
mod rational;

pub(crate) use extfield::{Elem, ExtField, PointEvaluator, ZERO};
pub use gcd::poly_gcd;
pub(crate) use gcd::{certainly_coprime, gcd};
pub use modulus::PrimeModulus;
pub use monomial::Monomial;
pub use poly::Polynomial;
pub use rational::RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("{0} is not a prime below 65536")]
    NonPrimeModulus(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("not a p-th power: term with exponents {exponents:?}")]
    NotAPthPower { exponents: Vec<u32> },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
}
