//! Exact scalars and dense univariate polynomials over them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision fraction, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational `{0}`: expected `p/q` or an integer")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, `"-p/q"` or a bare integer.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

/// Canonical `p/q` rendering, `q` omitted when it is 1.
pub fn render_rational(r: &Rational) -> String {
    r.to_string()
}

/// Dense polynomial in `x`; `coeffs[i]` is the coefficient of `x^i`.
///
/// The zero polynomial has no stored coefficients, and no other polynomial
/// stores a trailing zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate `x`.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Returns the value if this is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Horner evaluation at `a`.
    pub fn eval(&self, a: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * a + c)
    }

    /// `q(x) = p(x + c)`.
    pub fn shift(&self, c: &Rational) -> Self {
        let linear = Polynomial::new(vec![c.clone(), Rational::one()]);
        self.compose(&linear)
    }

    /// `q(x) = p(-x)`.
    pub fn negate_arg(&self) -> Self {
        Polynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// `p(q(x))`.
    pub fn compose(&self, inner: &Polynomial) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::zero(), |acc, c| &(&acc * inner) + &Polynomial::constant(c.clone()))
    }

    /// JSON-facing form: coefficient strings, lowest degree first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(render_rational).collect()
    }
}

/// `x(x-1)...(x-n+1)`, the constant 1 for `n = 0`.
pub fn falling_factorial_poly(n: usize) -> Polynomial {
    (0..n).fold(Polynomial::one(), |acc, j| {
        &acc * &Polynomial::new(vec![int(-(j as i64)), Rational::one()])
    })
}

/// `C(x, n) = (x)_n / n!`.
pub fn binomial_poly(n: usize) -> Polynomial {
    falling_factorial_poly(n).scale(&factorial(n).recip())
}

pub fn factorial(n: usize) -> Rational {
    from_bigint((1..=n).fold(BigInt::one(), |acc, j| acc * j))
}

pub fn poly_eval(p: &Polynomial, a: &Rational) -> Rational {
    p.eval(a)
}

pub fn poly_shift(p: &Polynomial, c: &Rational) -> Polynomial {
    p.shift(c)
}

pub fn poly_negate_arg(p: &Polynomial) -> Polynomial {
    p.negate_arg()
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.to_strings())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                if mag.is_integer() || i == 0 {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "({mag})")?;
                }
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Zero for Polynomial {
    fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Polynomial {
    fn one() -> Self {
        Polynomial::constant(Rational::one())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-20i64..20, 1i64..12).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(arb_rational(), 0..7).prop_map(Polynomial::new)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Polynomial::from_ints(&[2, -3, 1]).eval(&int(1)), int(0));
        assert_eq!(Polynomial::zero().eval(&rat(7, 3)), int(0));
        assert_eq!(Polynomial::from_ints(&[0, 2, -3, 1]).eval(&int(5)), int(60));
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial_poly(0), Polynomial::one());
        assert_eq!(falling_factorial_poly(3), Polynomial::from_ints(&[0, 2, -3, 1]));
        assert_eq!(falling_factorial_poly(2).eval(&rat(1, 2)), rat(-1, 4));
    }

    #[test]
    fn binomial_poly_examples() {
        assert_eq!(binomial_poly(0), Polynomial::one());
        assert_eq!(
            binomial_poly(2),
            Polynomial::new(vec![int(0), rat(-1, 2), rat(1, 2)])
        );
        assert_eq!(binomial_poly(2).eval(&int(4)), int(6));
    }

    #[test]
    fn shift_examples() {
        let x2 = Polynomial::from_ints(&[0, 0, 1]);
        assert_eq!(x2.shift(&int(0)), x2);
        assert_eq!(
            Polynomial::x().shift(&rat(-1, 2)),
            Polynomial::new(vec![rat(-1, 2), int(1)])
        );
        assert_eq!(x2.shift(&int(1)), Polynomial::from_ints(&[1, 2, 1]));
    }

    #[test]
    fn negate_arg_examples() {
        assert_eq!(Polynomial::from_ints(&[5]).negate_arg(), Polynomial::from_ints(&[5]));
        assert_eq!(Polynomial::x().negate_arg(), Polynomial::from_ints(&[0, -1]));
        assert_eq!(
            Polynomial::from_ints(&[0, -3, 1]).negate_arg(),
            Polynomial::from_ints(&[0, 3, 1])
        );
    }

    #[test]
    fn zero_polynomial_is_empty() {
        assert!(Polynomial::from_ints(&[0, 0, 0]).coeffs().is_empty());
        assert_eq!(Polynomial::zero().degree(), None);
        assert_eq!(Polynomial::from_ints(&[3]).degree(), Some(0));
    }

    #[test]
    fn rational_rendering() {
        assert_eq!(render_rational(&rat(-3, 4)), "-3/4");
        assert_eq!(render_rational(&rat(14, 2)), "7");
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational(" 5 ").unwrap(), int(5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn falling_factorial_counts_arrangements() {
        for m in 0..=10usize {
            for n in 0..=m {
                let brute: i64 = ((m - n + 1)..=m).map(|v| v as i64).product();
                assert_eq!(falling_factorial_poly(n).eval(&int(m as i64)), int(brute));
            }
        }
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(Polynomial::from_ints(&[0, 2, -3, 1]).to_string(), "x^3 - 3x^2 + 2x");
        assert_eq!(Polynomial::new(vec![rat(-1, 2), int(1)]).to_string(), "x - 1/2");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }

    proptest! {
        #[test]
        fn rational_field_laws(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert!(num_integer::Integer::gcd(a.numer(), a.denom()).is_one());
            prop_assert!(a.denom().is_positive());
        }

        #[test]
        fn negate_arg_is_involution(p in arb_poly()) {
            prop_assert_eq!(p.negate_arg().negate_arg(), p);
        }

        #[test]
        fn shift_round_trips(p in arb_poly(), c in arb_rational()) {
            prop_assert_eq!(p.shift(&c).shift(&-&c), p);
        }

        #[test]
        fn eval_is_multiplicative(p in arb_poly(), q in arb_poly(), a in arb_rational()) {
            prop_assert_eq!((&p * &q).eval(&a), p.eval(&a) * q.eval(&a));
        }

        #[test]
        fn degree_is_additive(p in arb_poly(), q in arb_poly()) {
            if let (Some(dp), Some(dq)) = (p.degree(), q.degree()) {
                prop_assert_eq!((&p * &q).degree(), Some(dp + dq));
            }
        }
    }
}
