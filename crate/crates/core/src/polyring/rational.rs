use std::fmt;

use super::gcd::gcd;
use super::{PolyError, Polynomial, PrimeModulus};

/// Reduced fraction num/den over F_p[vars] with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn zero(p: PrimeModulus) -> Self {
        RationalFunction {
            num: Polynomial::zero(p),
            den: Polynomial::one(p),
        }
    }

    pub fn one(p: PrimeModulus) -> Self {
        Self::from_poly(Polynomial::one(p))
    }

    pub fn constant(p: PrimeModulus, c: u32) -> Self {
        Self::from_poly(Polynomial::constant(p, c))
    }

    pub fn from_poly(num: Polynomial) -> Self {
        let den = Polynomial::one(num.modulus());
        RationalFunction { num, den }
    }

    /// Reduce num/den to lowest terms with a monic denominator.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, PolyError> {
        if num.modulus() != den.modulus() {
            return Err(PolyError::ModulusMismatch(
                num.modulus().get(),
                den.modulus().get(),
            ));
        }
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Polynomial, den: Polynomial) -> Self {
        let p = num.modulus();
        if num.is_zero() {
            return Self::zero(p);
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Self::with_monic_den(num, den)
    }

    fn with_monic_den(num: Polynomial, den: Polynomial) -> Self {
        let lc = den.leading_coeff();
        if lc == 1 {
            RationalFunction { num, den }
        } else {
            let inv = num.modulus().inv(lc);
            RationalFunction {
                num: num.scale(inv),
                den: den.scale(inv),
            }
        }
    }

    #[inline]
    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    #[inline]
    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.num.modulus()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            return Self::normalize(self.num.add(&other.num), self.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d1).add(&other.num.mul(&b1));
        if num.is_zero() {
            return Self::zero(self.modulus());
        }
        let den = self.den.mul(&d1);
        if g.is_one() {
            return Self::with_monic_den(num, den);
        }
        let h = gcd(&num, &g);
        if h.is_one() {
            Self::with_monic_den(num, den)
        } else {
            Self::with_monic_den(
                num.div_exact(&h).expect("gcd divides"),
                den.div_exact(&h).expect("gcd divides"),
            )
        }
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.modulus());
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = other.den.div_exact(&g1).expect("gcd divides");
        let c = other.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        Self::with_monic_den(a.mul(&c), b.mul(&d))
    }

    pub fn scale(&self, c: u32) -> Self {
        if c.is_multiple_of(self.modulus().get()) {
            return Self::zero(self.modulus());
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(Self::with_monic_den(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, PolyError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: u32) -> Self {
        // Powers of coprime polynomials stay coprime; no gcd needed.
        Self::with_monic_den(self.num.pow(k), self.den.pow(k))
    }

    /// x^p; stays reduced since Frobenius is an injective ring map.
    pub fn frobenius(&self) -> Self {
        RationalFunction {
            num: self.num.frobenius(),
            den: self.den.frobenius(),
        }
    }

    pub fn pth_root(&self) -> Result<Self, PolyError> {
        Ok(RationalFunction {
            num: self.num.pth_root()?,
            den: self.den.pth_root()?,
        })
    }

    pub fn render<S: AsRef<str>>(&self, names: &[S]) -> String {
        if self.den.is_one() {
            self.num.render(names)
        } else {
            format!("({})/({})", self.num.render(names), self.den.render(names))
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: [&str; 0] = [];
        write!(f, "{}", self.render(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::Monomial;

    #[test]
    fn normalize_examples() {
        let p = PrimeModulus::new(2).unwrap();
        let t = Polynomial::var(p, 0);
        let one = Polynomial::one(p);
        let r = RationalFunction::new(t.mul(&t).add(&t), t.clone()).unwrap();
        assert_eq!(r, RationalFunction::from_poly(t.add(&one)));
        let r = RationalFunction::new(t.pow(2), t.pow(3)).unwrap();
        assert_eq!(r.numerator(), &one);
        assert_eq!(r.denominator(), &t);
        assert!(matches!(
            RationalFunction::new(t.clone(), Polynomial::zero(p)),
            Err(PolyError::ZeroDenominator)
        ));
    }

    #[test]
    fn monic_denominator() {
        let p = PrimeModulus::new(5).unwrap();
        let t = Polynomial::var(p, 0);
        let r = RationalFunction::new(Polynomial::one(p), t.scale(3)).unwrap();
        assert_eq!(r.denominator().leading_coeff(), 1);
        assert_eq!(r.numerator(), &Polynomial::constant(p, 2));
    }

    #[test]
    fn field_ops() {
        let p = PrimeModulus::new(3).unwrap();
        let t = Polynomial::var(p, 0);
        let u = Polynomial::var(p, 1);
        let a = RationalFunction::new(t.add(&u), t.mul(&u)).unwrap();
        let b = RationalFunction::new(u.clone(), t.add(&Polynomial::one(p))).unwrap();
        let s = a.add(&b).sub(&b);
        assert_eq!(s, a);
        let q = a.mul(&b).div(&b).unwrap();
        assert_eq!(q, a);
        assert!(a.mul(&a.inv().unwrap()).is_one());
        let m = Polynomial::term(p, Monomial::from_exponents(&[0, 3]), 1);
        assert_eq!(
            RationalFunction::from_poly(u.clone()).frobenius(),
            RationalFunction::from_poly(m)
        );
    }
}
