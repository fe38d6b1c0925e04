//! Truncated formal power series in `t` over an exact coefficient ring.
//!
//! A series of order `N` carries `c_0..c_N` and all arithmetic is exact modulo
//! `t^(N+1)`. Sequences given by exponential generating functions are stored
//! with ordinary coefficients `c_n = a_n / n!`; [`TruncatedSeries::egf_coefficient`]
//! recovers `a_n`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::ring::{binomial_poly, factorial, Polynomial, Rational};

/// Commutative ring usable as a series coefficient.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: Rational) -> Self;

    fn scale(&self, r: &Rational) -> Self;

    /// Multiplicative inverse when this element is a unit of the ring.
    fn unit_inverse(&self) -> Option<Self>;
}

impl Coeff for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }

    fn scale(&self, r: &Rational) -> Self {
        self * r
    }

    fn unit_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

impl Coeff for Polynomial {
    fn from_rational(r: Rational) -> Self {
        Polynomial::constant(r)
    }

    fn scale(&self, r: &Rational) -> Self {
        Polynomial::scale(self, r)
    }

    /// Only nonzero constants are units in `Q[x]`.
    fn unit_inverse(&self) -> Option<Self> {
        match self.as_constant() {
            Some(c) if !c.is_zero() => Some(Polynomial::constant(c.recip())),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("constant term is not invertible")]
    NotInvertible,
    #[error("inner series of a composition must have zero constant term")]
    NonZeroConstantTerm,
    #[error("coefficient {index} requested beyond truncation order {order}")]
    BeyondTruncation { index: usize, order: usize },
}

pub type Result<T, E = SeriesError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<R> {
    coeffs: Vec<R>,
}

impl<R: Coeff> TruncatedSeries<R> {
    /// Builds a series of order `order`, padding or cutting `coeffs` to length `order + 1`.
    pub fn new(mut coeffs: Vec<R>, order: usize) -> Self {
        coeffs.resize(order + 1, R::zero());
        TruncatedSeries { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> R) -> Self {
        TruncatedSeries {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(R::one(), order)
    }

    pub fn constant(c: R, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// The series `t`.
    pub fn variable(order: usize) -> Self {
        Self::new(vec![R::zero(), R::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&R> {
        self.coeffs.get(n)
    }

    pub fn constant_term(&self) -> &R {
        &self.coeffs[0]
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() + b.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() - b.clone()))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&R, &R) -> R) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn negate(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &R) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.scale(r)).collect(),
        }
    }

    /// Cauchy product modulo `t^(N+1)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let order = self.order();
        let mut out = vec![R::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=order - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = std::mem::replace(&mut out[i + j], R::zero()) + a.clone() * b.clone();
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// `g` with `f g = 1`, via `g_n = -(1/c_0) sum_{i=1..n} c_i g_{n-i}`.
    pub fn invert(&self) -> Result<Self> {
        let inv0 = self.coeffs[0].unit_inverse().ok_or(SeriesError::NotInvertible)?;
        let mut g: Vec<R> = Vec::with_capacity(self.coeffs.len());
        g.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let acc = (1..=n).fold(R::zero(), |acc, i| acc + self.coeffs[i].clone() * g[n - i].clone());
            g.push(-(inv0.clone() * acc));
        }
        Ok(TruncatedSeries { coeffs: g })
    }

    /// `f^k` by repeated squaring; `f^0` is the unit series.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// `f^k` for any integer `k`, inverting first when negative.
    pub fn pow_signed(&self, k: i64) -> Result<Self> {
        let exponent = u32::try_from(k.unsigned_abs()).expect("exponent out of range");
        if k < 0 {
            Ok(self.invert()?.pow(exponent))
        } else {
            Ok(self.pow(exponent))
        }
    }

    /// `f(g(t))` by Horner's rule over the series ring.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonZeroConstantTerm);
        }
        let order = self.order();
        Ok(self.coeffs.iter().rev().fold(Self::zero(order), |acc, c| {
            let mut next = acc.mul_unchecked(inner);
            next.coeffs[0] = std::mem::replace(&mut next.coeffs[0], R::zero()) + c.clone();
            next
        }))
    }

    /// `n! c_n`, the `n`-th coefficient read as an exponential generating function.
    pub fn egf_coefficient(&self, n: usize) -> Result<R> {
        let c = self.coeffs.get(n).ok_or(SeriesError::BeyondTruncation {
            index: n,
            order: self.order(),
        })?;
        Ok(c.scale(&factorial(n)))
    }

    /// All EGF coefficients `a_0..a_N`.
    pub fn egf_coefficients(&self) -> Vec<R> {
        (0..=self.order())
            .map(|n| self.coeffs[n].scale(&factorial(n)))
            .collect()
    }

    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S) -> TruncatedSeries<S> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Reads the coefficients as EGF values: `c_n = a_n / n!`.
    pub fn from_egf(values: Vec<R>, order: usize) -> Self {
        let mut s = Self::new(values, order);
        for (n, c) in s.coeffs.iter_mut().enumerate() {
            *c = c.scale(&factorial(n).recip());
        }
        s
    }
}

impl TruncatedSeries<Rational> {
    /// Constant-coefficient embedding into `Q[x][[t]]`.
    pub fn lift(&self) -> TruncatedSeries<Polynomial> {
        self.map(|c| Polynomial::constant(c.clone()))
    }
}

/// `e^t - 1`.
pub fn exp_minus_one(order: usize) -> TruncatedSeries<Rational> {
    TruncatedSeries::from_fn(order, |n| {
        if n == 0 {
            Rational::zero()
        } else {
            factorial(n).recip()
        }
    })
}

/// `e^t`.
pub fn exp_series(order: usize) -> TruncatedSeries<Rational> {
    TruncatedSeries::from_fn(order, |n| factorial(n).recip())
}

/// `e^(x t)` with coefficients `x^n / n!` in `Q[x]`.
pub fn exp_x_series(order: usize) -> TruncatedSeries<Polynomial> {
    TruncatedSeries::from_fn(order, |n| {
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = factorial(n).recip();
        Polynomial::new(coeffs)
    })
}

/// `(1 + t)^a = sum_n C(a, n) t^n` where `C(a, n) = (a)_n / n!` is evaluated in the coefficient ring.
pub fn binomial_series<R: Coeff>(exponent: &R, order: usize) -> TruncatedSeries<R> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = R::one();
    for n in 0..=order {
        if n > 0 {
            let shifted = exponent.clone() - R::from_rational(Rational::from_integer((n as i64 - 1).into()));
            c = (c * shifted).scale(&Rational::from_integer((n as i64).into()).recip());
        }
        coeffs.push(c.clone());
    }
    TruncatedSeries { coeffs }
}

/// `(1 + t)^x` over `Q[x]`, built directly from the binomial polynomials.
pub fn binomial_x_series(order: usize) -> TruncatedSeries<Polynomial> {
    TruncatedSeries::from_fn(order, binomial_poly)
}

/// `2 / (2 + t)`.
pub fn changhee_kernel(order: usize) -> TruncatedSeries<Rational> {
    let two = Rational::from_integer(2.into());
    let denom = TruncatedSeries::new(vec![two.clone(), Rational::one()], order);
    denom
        .invert()
        .expect("2 + t has invertible constant term")
        .scale(&two)
}

/// `2 / (e^t + 1)`.
pub fn euler_kernel(order: usize) -> TruncatedSeries<Rational> {
    let two = Rational::from_integer(2.into());
    exp_series(order)
        .add(&TruncatedSeries::one(order))
        .and_then(|s| s.invert())
        .expect("e^t + 1 has constant term 2")
        .scale(&two)
}
