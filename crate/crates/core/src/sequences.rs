//! Higher-order Euler and Changhee families.
//!
//! Every family has a closed form used for computation, and at least one
//! independent route (series extraction or a Stirling bridge) used to certify it.
//! The order `k` is a positive integer throughout.
//!
//! | family            | exponential generating function        |
//! |-------------------|----------------------------------------|
//! | Euler numbers     | `(2/(e^t+1))^k`                        |
//! | Euler polynomials | `(2/(e^t+1))^k e^(xt)`                 |
//! | Changhee, 1st     | `(2/(2+t))^k`, `(2/(2+t))^k (1+t)^x`   |
//! | Changhee, 2nd     | `(2/(2+t))^k (1+t)^k`, `... (1+t)^(x+k)` |

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::combinatorics::{binomial, multinomial, StirlingTables};
use crate::powerseries::{
    binomial_series, binomial_x_series, changhee_kernel, euler_kernel, exp_x_series,
    TruncatedSeries,
};
use crate::ring::{binomial_poly, factorial, from_bigint, int, render_rational, Polynomial, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    EulerNumber,
    EulerPoly,
    Changhee1Number,
    Changhee1Poly,
    Changhee2Number,
    Changhee2Poly,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::EulerNumber,
        Family::EulerPoly,
        Family::Changhee1Number,
        Family::Changhee1Poly,
        Family::Changhee2Number,
        Family::Changhee2Poly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::EulerNumber => "euler-number",
            Family::EulerPoly => "euler-poly",
            Family::Changhee1Number => "changhee1-number",
            Family::Changhee1Poly => "changhee1-poly",
            Family::Changhee2Number => "changhee2-number",
            Family::Changhee2Poly => "changhee2-poly",
        }
    }

    pub fn is_polynomial(self) -> bool {
        matches!(
            self,
            Family::EulerPoly | Family::Changhee1Poly | Family::Changhee2Poly
        )
    }

    /// The number family obtained by setting `x = 0`.
    pub fn number_family(self) -> Family {
        match self {
            Family::EulerPoly => Family::EulerNumber,
            Family::Changhee1Poly => Family::Changhee1Number,
            Family::Changhee2Poly => Family::Changhee2Number,
            f => f,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown family `{0}`; expected one of euler-number, euler-poly, changhee1-number, changhee1-poly, changhee2-number, changhee2-poly")]
pub struct UnknownFamily(pub String);

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| UnknownFamily(s.to_string()))
    }
}

/// A sequence entry: a rational for number families, a polynomial in `x` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Number(Rational),
    Poly(Polynomial),
}

impl Value {
    /// Adds the constant 1.
    pub fn bumped(&self) -> Value {
        match self {
            Value::Number(r) => Value::Number(r + Rational::one()),
            Value::Poly(p) => Value::Poly(p + &Polynomial::one()),
        }
    }

    /// Rational string, or a JSON-style array of coefficient strings.
    pub fn render(&self) -> String {
        match self {
            Value::Number(r) => render_rational(r),
            Value::Poly(p) => serde_json::to_string(&p.to_strings()).expect("strings serialize"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(r) => write!(f, "{r}"),
            Value::Poly(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Number(r) => serializer.serialize_str(&render_rational(r)),
            Value::Poly(p) => p.to_strings().serialize(serializer),
        }
    }
}

/// Values of one family at one order for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceTable {
    pub family: Family,
    pub k: u32,
    pub values: Vec<Value>,
}

impl SequenceTable {
    pub fn compute(family: Family, k: u32, n_max: usize) -> Self {
        let values = match family {
            Family::EulerNumber => euler_numbers(n_max, k).into_iter().map(Value::Number).collect(),
            Family::EulerPoly => euler_polys(n_max, k).into_iter().map(Value::Poly).collect(),
            Family::Changhee1Number => (0..=n_max)
                .map(|n| Value::Number(changhee1_number(n, k)))
                .collect(),
            Family::Changhee1Poly => (0..=n_max).map(|n| Value::Poly(changhee1_poly(n, k))).collect(),
            Family::Changhee2Number => (0..=n_max)
                .map(|n| Value::Number(changhee2_number(n, k)))
                .collect(),
            Family::Changhee2Poly => (0..=n_max).map(|n| Value::Poly(changhee2_poly(n, k))).collect(),
        };
        SequenceTable { family, k, values }
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "value"]).expect("in-memory write");
        for (n, v) in self.values.iter().enumerate() {
            w.write_record([n.to_string(), v.render()]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

impl Serialize for SequenceTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SequenceTable", 3)?;
        s.serialize_field("family", self.family.name())?;
        s.serialize_field("k", &self.k)?;
        s.serialize_field("values", &self.values)?;
        s.end()
    }
}

fn check_order(k: u32) {
    assert!(k >= 1, "order k must be a positive integer");
}

fn minus_half_pow(n: usize) -> Rational {
    let half = Rational::new((-1).into(), 2.into());
    num_traits::pow(half, n)
}

/// `E_0^(k)..E_n_max^(k)` from `(2/(e^t+1))^k`.
pub fn euler_numbers(n_max: usize, k: u32) -> Vec<Rational> {
    check_order(k);
    euler_kernel(n_max).pow(k).egf_coefficients()
}

pub fn euler_number(n: usize, k: u32) -> Rational {
    euler_numbers(n, k).pop().expect("nonempty")
}

/// `E_n^(k)(x)` for `n = 0..=n_max` from `(2/(e^t+1))^k e^(xt)` over `Q[x]`.
pub fn euler_polys(n_max: usize, k: u32) -> Vec<Polynomial> {
    check_order(k);
    euler_kernel(n_max)
        .pow(k)
        .lift()
        .mul(&exp_x_series(n_max))
        .expect("equal orders")
        .egf_coefficients()
}

pub fn euler_poly(n: usize, k: u32) -> Polynomial {
    euler_polys(n, k).pop().expect("nonempty")
}

/// `E_n^(k)(x) = sum_j C(n, j) E_j^(k) x^(n-j)`, the Appell expansion.
pub fn euler_poly_via_appell(n: usize, k: u32) -> Polynomial {
    let numbers = euler_numbers(n, k);
    let mut coeffs = vec![Rational::zero(); n + 1];
    for (j, e) in numbers.iter().enumerate() {
        coeffs[n - j] = from_bigint(binomial(n as i64, j)) * e;
    }
    Polynomial::new(coeffs)
}

/// The `k`-fold fermionic moment of `(x_1 + ... + x_k)^n`, which is `E_n^(k)`.
pub fn fermionic_moment(n: usize, k: u32) -> Rational {
    euler_number(n, k)
}

/// Closed form `Ch_n^(k) = (-1/2)^n n! C(n+k-1, n)`.
pub fn changhee1_number(n: usize, k: u32) -> Rational {
    check_order(k);
    minus_half_pow(n) * factorial(n) * from_bigint(binomial((n + k as usize - 1) as i64, n))
}

/// `sum_l s(n, l) E_l^(k)`.
pub fn changhee1_number_via_euler(n: usize, k: u32, stirling: &StirlingTables) -> Rational {
    let euler = euler_numbers(n, k);
    (0..=n).map(|l| stirling.s1(n, l) * &euler[l]).sum()
}

/// Multinomial convolution of `k` copies of the order-1 sequence.
pub fn changhee1_number_via_convolution(n: usize, k: u32) -> Rational {
    check_order(k);
    let base: Vec<Rational> = (0..=n).map(|j| changhee1_number(j, 1)).collect();
    convolve_compositions(n, k as usize, &base)
}

/// `sum over l_1 + ... + l_k = n of multinomial(n; l) base[l_1] ... base[l_k]`.
pub fn convolve_compositions(n: usize, parts: usize, base: &[Rational]) -> Rational {
    fn go(
        remaining: usize,
        slots: usize,
        chosen: &mut Vec<usize>,
        n: usize,
        base: &[Rational],
        total: &mut Rational,
    ) {
        if slots == 1 {
            chosen.push(remaining);
            let coeff = from_bigint(multinomial(n, chosen).expect("parts sum to n"));
            let product = chosen.iter().fold(coeff, |acc, &l| acc * &base[l]);
            *total += product;
            chosen.pop();
            return;
        }
        for first in 0..=remaining {
            chosen.push(first);
            go(remaining - first, slots - 1, chosen, n, base, total);
            chosen.pop();
        }
    }
    let mut total = Rational::zero();
    go(n, parts, &mut Vec::with_capacity(parts), n, base, &mut total);
    total
}

/// `n!` times the `t^n` coefficient of `(2/(2+t))^k`.
pub fn changhee1_number_via_series(n: usize, k: u32) -> Rational {
    check_order(k);
    changhee_kernel(n).pow(k).egf_coefficient(n).expect("n within order")
}

/// `(-1/2)^n sum_l s(n, l) (k+n-1)^l`.
pub fn changhee1_number_via_stirling_power(n: usize, k: u32, stirling: &StirlingTables) -> Rational {
    let base = int((k as usize + n) as i64 - 1);
    let sum: Rational = (0..=n)
        .map(|l| stirling.s1(n, l) * num_traits::pow(base.clone(), l))
        .sum();
    minus_half_pow(n) * sum
}

/// `Ch_n^(k)(x) = sum_m C(x, m) n!/(n-m)! Ch_(n-m)^(k)`.
pub fn changhee1_poly(n: usize, k: u32) -> Polynomial {
    check_order(k);
    (0..=n).fold(Polynomial::zero(), |acc, m| {
        let weight = factorial(n) / factorial(n - m) * changhee1_number(n - m, k);
        &acc + &binomial_poly(m).scale(&weight)
    })
}

/// EGF coefficients of `(2/(2+t))^k (1+t)^x`.
pub fn changhee1_polys_via_series(n_max: usize, k: u32) -> Vec<Polynomial> {
    check_order(k);
    changhee_kernel(n_max)
        .pow(k)
        .lift()
        .mul(&binomial_x_series(n_max))
        .expect("equal orders")
        .egf_coefficients()
}

/// `Ch^_n^(k) = sum_m m! C(k, m) C(n, m) Ch_(n-m)^(k)`; terms with `m > k` vanish.
pub fn changhee2_number(n: usize, k: u32) -> Rational {
    check_order(k);
    (0..=n.min(k as usize))
        .map(|m| {
            factorial(m)
                * from_bigint(binomial(k as i64, m) * binomial(n as i64, m))
                * changhee1_number(n - m, k)
        })
        .sum()
}

/// `sum_l (-1)^l s(n, l) E_l^(k)`.
pub fn changhee2_number_via_euler(n: usize, k: u32, stirling: &StirlingTables) -> Rational {
    let euler = euler_numbers(n, k);
    (0..=n)
        .map(|l| {
            let term = stirling.s1(n, l) * &euler[l];
            if l % 2 == 1 {
                -term
            } else {
                term
            }
        })
        .sum()
}

/// `n!` times the `t^n` coefficient of `(2/(2+t))^k (1+t)^k`.
pub fn changhee2_number_via_series(n: usize, k: u32) -> Rational {
    check_order(k);
    let one_plus_t = TruncatedSeries::new(vec![Rational::one(), Rational::one()], n);
    changhee_kernel(n)
        .pow(k)
        .mul(&one_plus_t.pow(k))
        .expect("equal orders")
        .egf_coefficient(n)
        .expect("n within order")
}

/// `Ch^_n^(k)(x) = sum_m m! C(x+k, m) C(n, m) Ch_(n-m)^(k)`.
pub fn changhee2_poly(n: usize, k: u32) -> Polynomial {
    check_order(k);
    let shift = int(k as i64);
    (0..=n).fold(Polynomial::zero(), |acc, m| {
        let weight = factorial(m) * from_bigint(binomial(n as i64, m)) * changhee1_number(n - m, k);
        &acc + &binomial_poly(m).shift(&shift).scale(&weight)
    })
}

/// EGF coefficients of `(1+t)^(x+k) (2/(2+t))^k`.
pub fn changhee2_polys_via_series(n_max: usize, k: u32) -> Vec<Polynomial> {
    check_order(k);
    let exponent = Polynomial::new(vec![int(k as i64), Rational::one()]);
    binomial_series(&exponent, n_max)
        .mul(&changhee_kernel(n_max).pow(k).lift())
        .expect("equal orders")
        .egf_coefficients()
}
