//! Stirling triangles, generalized binomials, multinomials and factorial products.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ring::{from_bigint, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StirlingKind {
    /// Signed, so that `(x)_n = sum_l s(n, l) x^l`.
    FirstSigned,
    Second,
}

/// Triangle of Stirling numbers for `0 <= l <= n <= max_n`, built once and read-only afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StirlingTriangle {
    kind: StirlingKind,
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTriangle {
    pub fn new(kind: StirlingKind, max_n: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![BigInt::one()]);
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let at = |l: usize| prev.get(l).cloned().unwrap_or_default();
            let row = (0..=n)
                .map(|l| {
                    let diag = if l == 0 { BigInt::zero() } else { at(l - 1) };
                    match kind {
                        StirlingKind::FirstSigned => diag - BigInt::from(n - 1) * at(l),
                        StirlingKind::Second => diag + BigInt::from(l) * at(l),
                    }
                })
                .collect();
            rows.push(row);
        }
        StirlingTriangle { kind, rows }
    }

    pub fn kind(&self) -> StirlingKind {
        self.kind
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// Entry `(n, l)`; zero when `l > n`. Panics if `n` exceeds the precomputed bound.
    pub fn get(&self, n: usize, l: usize) -> BigInt {
        assert!(
            n <= self.max_n(),
            "Stirling index {n} beyond precomputed bound {}",
            self.max_n()
        );
        self.rows[n].get(l).cloned().unwrap_or_default()
    }

    pub fn get_rational(&self, n: usize, l: usize) -> Rational {
        from_bigint(self.get(n, l))
    }

    pub fn row(&self, n: usize) -> &[BigInt] {
        &self.rows[n]
    }
}

/// Both triangles, sized together.
#[derive(Debug, Clone)]
pub struct StirlingTables {
    pub first: StirlingTriangle,
    pub second: StirlingTriangle,
}

impl StirlingTables {
    pub fn new(max_n: usize) -> Self {
        StirlingTables {
            first: StirlingTriangle::new(StirlingKind::FirstSigned, max_n),
            second: StirlingTriangle::new(StirlingKind::Second, max_n),
        }
    }

    /// Signed Stirling number of the first kind `s(n, l)`.
    pub fn s1(&self, n: usize, l: usize) -> Rational {
        self.first.get_rational(n, l)
    }

    /// Stirling number of the second kind `S(n, l)`.
    pub fn s2(&self, n: usize, l: usize) -> Rational {
        self.second.get_rational(n, l)
    }

    pub fn max_n(&self) -> usize {
        self.first.max_n()
    }
}

pub fn stirling_first_signed(n: usize, l: usize) -> BigInt {
    if l > n {
        return BigInt::zero();
    }
    StirlingTriangle::new(StirlingKind::FirstSigned, n).get(n, l)
}

/// `S(l, n)`: partitions of an `l`-set into `n` blocks.
pub fn stirling_second(l: usize, n: usize) -> BigInt {
    if n > l {
        return BigInt::zero();
    }
    StirlingTriangle::new(StirlingKind::Second, l).get(l, n)
}

/// `C(n, m) = (n)_m / m!` for any integer `n`.
pub fn binomial(n: i64, m: usize) -> BigInt {
    if n >= 0 && (n as u64) < m as u64 {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..m {
        acc *= BigInt::from(n) - BigInt::from(j);
        acc /= BigInt::from(j + 1);
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parts {parts:?} sum to {sum}, not {n}")]
pub struct MalformedComposition {
    pub n: usize,
    pub parts: Vec<usize>,
    pub sum: usize,
}

/// `n! / (l_1! ... l_k!)`.
pub fn multinomial(n: usize, parts: &[usize]) -> Result<BigInt, MalformedComposition> {
    let sum: usize = parts.iter().sum();
    if sum != n {
        return Err(MalformedComposition {
            n,
            parts: parts.to_vec(),
            sum,
        });
    }
    // product of binomials C(l_1 + ... + l_i, l_i) stays integral at every step
    let mut acc = BigInt::one();
    let mut running = 0usize;
    for &p in parts {
        running += p;
        acc *= binomial(running as i64, p);
    }
    Ok(acc)
}

/// `a (a+1) ... (a+n-1)`.
pub fn rising_factorial(a: &Rational, n: usize) -> Rational {
    (0..n).fold(Rational::one(), |acc, j| acc * (a + from_bigint(BigInt::from(j))))
}
