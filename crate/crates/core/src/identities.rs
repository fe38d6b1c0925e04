//! Exact verification of the Changhee/Euler/Stirling identities over a finite grid.
//!
//! A [`Harness`] precomputes the Stirling triangles and the six sequence tables
//! for every order `1..=k_max`, then each checker compares a table-backed side
//! against an independently assembled side for every grid cell. Comparisons are
//! exact; polynomial identities are compared coefficient-wise, with a pointwise
//! evaluation at a few rationals run alongside as a consistency check.
//!
//! Tables can be perturbed in place ([`Harness::perturb`]) to confirm the
//! checkers actually notice wrong values.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::combinatorics::{binomial, StirlingTables};
use crate::powerseries::{
    binomial_series, binomial_x_series, changhee_kernel, euler_kernel, exp_minus_one,
    TruncatedSeries,
};
use crate::ring::{
    binomial_poly, factorial, falling_factorial_poly, from_bigint, int, rat, Polynomial, Rational,
};
use crate::sequences::{convolve_compositions, Family, SequenceTable, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    Thm1,
    Thm2,
    Thm3,
    Cor4,
    Thm5,
    Thm6,
    Thm7,
    Thm8,
    Thm9,
    Thm10,
    Thm11,
    Eq11,
    Eq13,
    Eq16,
    Eq22,
    Eq28,
    Eq31,
    Eq37,
    Eq40,
}

impl IdentityId {
    pub const ALL: [IdentityId; 19] = [
        IdentityId::Thm1,
        IdentityId::Thm2,
        IdentityId::Thm3,
        IdentityId::Cor4,
        IdentityId::Thm5,
        IdentityId::Thm6,
        IdentityId::Thm7,
        IdentityId::Thm8,
        IdentityId::Thm9,
        IdentityId::Thm10,
        IdentityId::Thm11,
        IdentityId::Eq11,
        IdentityId::Eq13,
        IdentityId::Eq16,
        IdentityId::Eq22,
        IdentityId::Eq28,
        IdentityId::Eq31,
        IdentityId::Eq37,
        IdentityId::Eq40,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::Thm1 => "thm1",
            IdentityId::Thm2 => "thm2",
            IdentityId::Thm3 => "thm3",
            IdentityId::Cor4 => "cor4",
            IdentityId::Thm5 => "thm5",
            IdentityId::Thm6 => "thm6",
            IdentityId::Thm7 => "thm7",
            IdentityId::Thm8 => "thm8",
            IdentityId::Thm9 => "thm9",
            IdentityId::Thm10 => "thm10",
            IdentityId::Thm11 => "thm11",
            IdentityId::Eq11 => "eq11",
            IdentityId::Eq13 => "eq13",
            IdentityId::Eq16 => "eq16",
            IdentityId::Eq22 => "eq22",
            IdentityId::Eq28 => "eq28",
            IdentityId::Eq31 => "eq31",
            IdentityId::Eq37 => "eq37",
            IdentityId::Eq40 => "eq40",
        }
    }

    /// Human-readable statement of what the checker compares.
    pub fn statement(self) -> &'static str {
        match self {
            IdentityId::Thm1 => "Ch_n^(k) = (-1/2)^n sum_l s(n,l) (k+n-1)^l",
            IdentityId::Thm2 => "Ch_n^(k) = sum_l s(n,l) E_l^(k)",
            IdentityId::Thm3 => "E_m^(k) = sum_n Ch_n^(k) S(m,n); (2/(2+t))^k at t = e^t-1",
            IdentityId::Cor4 => "Ch_n^(k)(x) = sum_l s(n,l) E_l^(k)(x)",
            IdentityId::Thm5 => "E_m^(k)(x) = sum_n Ch_n^(k)(x) S(m,n); series substitution t = e^t-1",
            IdentityId::Thm6 => "Ch^_n^(k) = sum_m m! C(k,m) C(n,m) Ch_(n-m)^(k)",
            IdentityId::Thm7 => "E_m^(k)(k) = sum_n Ch^_n^(k) S(m,n); series substitution t = e^t-1",
            IdentityId::Thm8 => "Ch^_n^(k)(x) = sum_m m! C(x+k,m) C(n,m) Ch_(n-m)^(k) = EGF of (1+t)^(x+k) (2/(2+t))^k",
            IdentityId::Thm9 => "E_m^(k)(x+k) = sum_n Ch^_n^(k)(x) S(m,n); series substitution t = e^t-1",
            IdentityId::Thm10 => "(-1)^n Ch^_n^(k)(x)/n! = sum_(m>=1) C(n-1,n-m)/m! Ch_m^(k)(-x)",
            IdentityId::Thm11 => "(-1)^n Ch_n^(k)(x)/n! = sum_(m>=1) C(n-1,n-m)/m! Ch^_m^(k)(-x)",
            IdentityId::Eq11 => "Ch_n^(k) = sum multinomial(n; l_1..l_k) Ch_(l_1) ... Ch_(l_k)",
            IdentityId::Eq13 => "2^n Ch_n^(k) = (-1)^n n! C(n+k-1,n) = (-1)^n (k+n-1)_n",
            IdentityId::Eq16 => "Ch_n^(k) = sum_l s(n,l) (fermionic moment of order l)",
            IdentityId::Eq22 => "Ch_n^(k)(x) = sum_m C(x,n-m) n!/m! Ch_m^(k) = EGF of (2/(2+t))^k (1+t)^x",
            IdentityId::Eq28 => "Ch^_n^(k) = sum_l (-1)^l s(n,l) E_l^(k)",
            IdentityId::Eq31 => "Ch^_n^(k) = EGF of (2/(2+t))^k (1+t)^k",
            IdentityId::Eq37 => "Ch^_n^(k)(x) = sum_l s(n,l) (-1)^l E_l^(k)(-x)",
            IdentityId::Eq40 => "(-1)^n Ch^_n^(k)(x)/n! = sum_(m>=0) C(n-1,n-m)/m! Ch_m^(k)(-x)",
        }
    }

    /// Smallest grid index the identity is stated for.
    pub fn min_n(self) -> usize {
        match self {
            IdentityId::Thm10 | IdentityId::Thm11 | IdentityId::Eq40 => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown identity id `{0}`")]
pub struct UnknownIdentity(pub String);

impl FromStr for IdentityId {
    type Err = UnknownIdentity;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase();
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == norm)
            .ok_or_else(|| UnknownIdentity(s.to_string()))
    }
}

/// Parses `"all"` or a comma-separated list of ids, keeping the canonical order.
pub fn parse_ids(spec: &str) -> Result<Vec<IdentityId>, UnknownIdentity> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(IdentityId::ALL.to_vec());
    }
    let mut ids = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<IdentityId>, _>>()?;
    ids.sort();
    ids.dedup();
    Ok(ids)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub n_max: usize,
    pub k_max: u32,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { n_max: 12, k_max: 6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// First grid cell where the two sides disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: usize,
    pub k: u32,
    pub lhs: Value,
    pub rhs: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub id: IdentityId,
    pub grid: Grid,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Number of grid comparisons made.
    pub comparisons: usize,
    /// Whether every polynomial comparison gave the same answer pointwise as coefficient-wise.
    pub pointwise_consistent: bool,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl Serialize for IdentityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("IdentityReport", 4)?;
        s.serialize_field("id", self.id.as_str())?;
        s.serialize_field("verdict", &self.verdict)?;
        s.serialize_field("grid", &self.grid)?;
        s.serialize_field("witness", &self.witness)?;
        s.end()
    }
}

pub fn reports_to_json(reports: &[IdentityReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

pub fn reports_to_csv(reports: &[IdentityReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "verdict", "n_max", "k_max", "witness_n", "witness_k", "lhs", "rhs"])
        .expect("in-memory write");
    for r in reports {
        let (n, k, lhs, rhs) = match &r.witness {
            Some(w) => (w.n.to_string(), w.k.to_string(), w.lhs.render(), w.rhs.render()),
            None => Default::default(),
        };
        w.write_record([
            r.id.as_str().to_string(),
            r.verdict.as_str().to_string(),
            r.grid.n_max.to_string(),
            r.grid.k_max.to_string(),
            n,
            k,
            lhs,
            rhs,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("k_max must be at least 1")]
    EmptyOrderRange,
    #[error("truncation order {truncation} is below n_max {n_max}")]
    TruncationTooSmall { truncation: usize, n_max: usize },
    #[error("no {family} table entry at k = {k}, n = {n}")]
    OutOfGrid { family: Family, k: u32, n: usize },
}

/// One grid comparison: index, left side, right side.
type Comparison = (usize, Value, Value);

/// Sample points for the pointwise cross-check of polynomial identities.
fn sample_points() -> [Rational; 5] {
    [int(0), int(1), rat(-1, 2), rat(2, 3), int(5)]
}

#[derive(Clone)]
pub struct Harness {
    grid: Grid,
    truncation: usize,
    stirling: StirlingTables,
    tables: BTreeMap<(Family, u32), SequenceTable>,
}

impl Harness {
    /// Precomputes every table for the grid. `truncation` defaults to `n_max + 4` when `None`.
    pub fn new(grid: Grid, truncation: Option<usize>) -> Result<Self, HarnessError> {
        if grid.k_max == 0 {
            return Err(HarnessError::EmptyOrderRange);
        }
        let truncation = truncation.unwrap_or(grid.n_max + 4);
        if truncation < grid.n_max {
            return Err(HarnessError::TruncationTooSmall {
                truncation,
                n_max: grid.n_max,
            });
        }
        let keys: Vec<(Family, u32)> = Family::ALL
            .into_iter()
            .flat_map(|f| (1..=grid.k_max).map(move |k| (f, k)))
            .collect();
        let tables = keys
            .into_par_iter()
            .map(|(f, k)| ((f, k), SequenceTable::compute(f, k, grid.n_max)))
            .collect();
        Ok(Harness {
            grid,
            truncation,
            stirling: StirlingTables::new(grid.n_max),
            tables,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn table(&self, family: Family, k: u32) -> Option<&SequenceTable> {
        self.tables.get(&(family, k))
    }

    /// Adds 1 to one table entry.
    pub fn perturb(&mut self, family: Family, k: u32, n: usize) -> Result<(), HarnessError> {
        let slot = self
            .tables
            .get_mut(&(family, k))
            .and_then(|t| t.values.get_mut(n))
            .ok_or(HarnessError::OutOfGrid { family, k, n })?;
        *slot = slot.bumped();
        Ok(())
    }

    fn number(&self, family: Family, k: u32, n: usize) -> &Rational {
        match &self.tables[&(family, k)].values[n] {
            Value::Number(r) => r,
            Value::Poly(_) => unreachable!("{family} holds numbers"),
        }
    }

    fn poly(&self, family: Family, k: u32, n: usize) -> &Polynomial {
        match &self.tables[&(family, k)].values[n] {
            Value::Poly(p) => p,
            Value::Number(_) => unreachable!("{family} holds polynomials"),
        }
    }

    fn ch1(&self, k: u32, n: usize) -> &Rational {
        self.number(Family::Changhee1Number, k, n)
    }

    fn ch2(&self, k: u32, n: usize) -> &Rational {
        self.number(Family::Changhee2Number, k, n)
    }

    fn euler(&self, k: u32, n: usize) -> &Rational {
        self.number(Family::EulerNumber, k, n)
    }

    fn ch1_poly(&self, k: u32, n: usize) -> &Polynomial {
        self.poly(Family::Changhee1Poly, k, n)
    }

    fn ch2_poly(&self, k: u32, n: usize) -> &Polynomial {
        self.poly(Family::Changhee2Poly, k, n)
    }

    fn euler_poly(&self, k: u32, n: usize) -> &Polynomial {
        self.poly(Family::EulerPoly, k, n)
    }

    fn indices(&self, id: IdentityId) -> std::ops::RangeInclusive<usize> {
        id.min_n()..=self.grid.n_max
    }

    /// Runs a batch of checkers in parallel; the result keeps the order of `ids`.
    pub fn verify_all(&self, ids: &[IdentityId]) -> Vec<IdentityReport> {
        ids.par_iter().map(|&id| self.verify(id)).collect()
    }

    pub fn verify(&self, id: IdentityId) -> IdentityReport {
        self.run(id, |k| self.comparisons(id, k))
    }

    /// Walks `k = 1..=k_max` in order and stops at the first disagreement.
    fn run(&self, id: IdentityId, pairs_for: impl Fn(u32) -> Vec<Comparison>) -> IdentityReport {
        let mut comparisons = 0;
        let mut pointwise_consistent = true;
        for k in 1..=self.grid.k_max {
            for (n, lhs, rhs) in pairs_for(k) {
                comparisons += 1;
                let equal = lhs == rhs;
                if let (Value::Poly(a), Value::Poly(b)) = (&lhs, &rhs) {
                    let pointwise = sample_points().iter().all(|s| a.eval(s) == b.eval(s));
                    // pointwise agreement is necessary for equality
                    if equal && !pointwise {
                        pointwise_consistent = false;
                    }
                }
                if !equal {
                    return IdentityReport {
                        id,
                        grid: self.grid,
                        verdict: Verdict::Fail,
                        witness: Some(Witness { n, k, lhs, rhs }),
                        comparisons,
                        pointwise_consistent,
                    };
                }
            }
        }
        IdentityReport {
            id,
            grid: self.grid,
            verdict: Verdict::Pass,
            witness: None,
            comparisons,
            pointwise_consistent,
        }
    }

    fn comparisons(&self, id: IdentityId, k: u32) -> Vec<Comparison> {
        let st = &self.stirling;
        let n_max = self.grid.n_max;
        let big_n = self.truncation;
        let num = |r: Rational| Value::Number(r);
        let poly = |p: Polynomial| Value::Poly(p);
        let kernel = || changhee_kernel(big_n).pow(k);
        let mut out = Vec::new();
        match id {
            IdentityId::Thm1 => {
                let base = int(k as i64 - 1);
                for n in self.indices(id) {
                    let power = &base + int(n as i64);
                    let sum: Rational = (0..=n)
                        .map(|l| st.s1(n, l) * num_traits::pow(power.clone(), l))
                        .sum();
                    let rhs = num_traits::pow(rat(-1, 2), n) * sum;
                    out.push((n, num(self.ch1(k, n).clone()), num(rhs)));
                }
            }
            IdentityId::Eq13 => {
                for n in self.indices(id) {
                    let sign = if n % 2 == 0 { int(1) } else { int(-1) };
                    let lhs = num_traits::pow(int(2), n) * self.ch1(k, n);
                    let by_binomial = &sign
                        * factorial(n)
                        * from_bigint(binomial((n + k as usize - 1) as i64, n));
                    let by_falling =
                        &sign * falling_factorial_poly(n).eval(&int((n + k as usize - 1) as i64));
                    out.push((n, num(lhs.clone()), num(by_binomial)));
                    out.push((n, num(lhs), num(by_falling)));
                }
            }
            IdentityId::Thm2 => {
                for n in self.indices(id) {
                    let rhs: Rational = (0..=n).map(|l| st.s1(n, l) * self.euler(k, l)).sum();
                    out.push((n, num(self.ch1(k, n).clone()), num(rhs)));
                }
            }
            IdentityId::Eq16 => {
                let moments = euler_kernel(big_n).pow(k).egf_coefficients();
                for n in self.indices(id) {
                    let rhs: Rational = (0..=n).map(|l| st.s1(n, l) * &moments[l]).sum();
                    out.push((n, num(self.ch1(k, n).clone()), num(rhs)));
                }
            }
            IdentityId::Eq11 => {
                let base: Vec<Rational> = (0..=n_max).map(|j| self.ch1(1, j).clone()).collect();
                for n in self.indices(id) {
                    let rhs = convolve_compositions(n, k as usize, &base);
                    out.push((n, num(self.ch1(k, n).clone()), num(rhs)));
                }
            }
            IdentityId::Thm3 => {
                let substituted = kernel()
                    .compose(&exp_minus_one(big_n))
                    .expect("inner series has zero constant term")
                    .egf_coefficients();
                for m in self.indices(id) {
                    let lhs = self.euler(k, m);
                    let rhs: Rational = (0..=m).map(|n| self.ch1(k, n) * st.s2(m, n)).sum();
                    out.push((m, num(lhs.clone()), num(rhs)));
                    out.push((m, num(lhs.clone()), num(substituted[m].clone())));
                }
            }
            IdentityId::Cor4 => {
                for n in self.indices(id) {
                    let rhs = (0..=n).fold(Polynomial::zero(), |acc, l| {
                        &acc + &self.euler_poly(k, l).scale(&st.s1(n, l))
                    });
                    out.push((n, poly(self.ch1_poly(k, n).clone()), poly(rhs)));
                }
            }
            IdentityId::Thm5 => {
                let generating = kernel().lift().mul(&binomial_x_series(big_n)).expect("equal orders");
                let substituted = generating
                    .compose(&exp_minus_one(big_n).lift())
                    .expect("inner series has zero constant term")
                    .egf_coefficients();
                for m in self.indices(id) {
                    let lhs = self.euler_poly(k, m);
                    let rhs = (0..=m).fold(Polynomial::zero(), |acc, n| {
                        &acc + &self.ch1_poly(k, n).scale(&st.s2(m, n))
                    });
                    out.push((m, poly(lhs.clone()), poly(rhs)));
                    out.push((m, poly(lhs.clone()), poly(substituted[m].clone())));
                }
            }
            IdentityId::Eq22 => {
                let series = kernel()
                    .lift()
                    .mul(&binomial_x_series(big_n))
                    .expect("equal orders")
                    .egf_coefficients();
                for n in self.indices(id) {
                    let lhs = self.ch1_poly(k, n);
                    let rhs = (0..=n).fold(Polynomial::zero(), |acc, m| {
                        let weight = factorial(n) / factorial(m) * self.ch1(k, m);
                        &acc + &binomial_poly(n - m).scale(&weight)
                    });
                    out.push((n, poly(lhs.clone()), poly(rhs)));
                    out.push((n, poly(lhs.clone()), poly(series[n].clone())));
                }
            }
            IdentityId::Thm6 => {
                for n in self.indices(id) {
                    let rhs: Rational = (0..=n)
                        .map(|m| {
                            factorial(m)
                                * from_bigint(binomial(k as i64, m) * binomial(n as i64, m))
                                * self.ch1(k, n - m)
                        })
                        .sum();
                    out.push((n, num(self.ch2(k, n).clone()), num(rhs)));
                }
            }
            IdentityId::Eq28 => {
                for n in self.indices(id) {
                    let rhs: Rational = (0..=n)
                        .map(|l| {
                            let term = st.s1(n, l) * self.euler(k, l);
                            if l % 2 == 1 {
                                -term
                            } else {
                                term
                            }
                        })
                        .sum();
                    out.push((n, num(self.ch2(k, n).clone()), num(rhs)));
                }
            }
            IdentityId::Eq31 => {
                let one_plus_t = TruncatedSeries::new(vec![Rational::one(), Rational::one()], big_n);
                let series = kernel()
                    .mul(&one_plus_t.pow(k))
                    .expect("equal orders")
                    .egf_coefficients();
                for n in self.indices(id) {
                    out.push((n, num(self.ch2(k, n).clone()), num(series[n].clone())));
                }
            }
            IdentityId::Thm7 => {
                let one_plus_t = TruncatedSeries::new(vec![Rational::one(), Rational::one()], big_n);
                let substituted = kernel()
                    .mul(&one_plus_t.pow(k))
                    .expect("equal orders")
                    .compose(&exp_minus_one(big_n))
                    .expect("inner series has zero constant term")
                    .egf_coefficients();
                let at_k = int(k as i64);
                for m in self.indices(id) {
                    let lhs = self.euler_poly(k, m).eval(&at_k);
                    let rhs: Rational = (0..=m).map(|n| self.ch2(k, n) * st.s2(m, n)).sum();
                    out.push((m, num(lhs.clone()), num(rhs)));
                    out.push((m, num(lhs), num(substituted[m].clone())));
                }
            }
            IdentityId::Thm8 => {
                let series = self.second_kind_poly_series(k).egf_coefficients();
                let shift = int(k as i64);
                for n in self.indices(id) {
                    let lhs = self.ch2_poly(k, n);
                    let sum = (0..=n).fold(Polynomial::zero(), |acc, m| {
                        let weight = factorial(m)
                            * from_bigint(binomial(n as i64, m))
                            * self.ch1(k, n - m);
                        &acc + &binomial_poly(m).shift(&shift).scale(&weight)
                    });
                    out.push((n, poly(lhs.clone()), poly(sum)));
                    out.push((n, poly(lhs.clone()), poly(series[n].clone())));
                }
            }
            IdentityId::Thm9 => {
                let substituted = self
                    .second_kind_poly_series(k)
                    .compose(&exp_minus_one(big_n).lift())
                    .expect("inner series has zero constant term")
                    .egf_coefficients();
                let shift = int(k as i64);
                for m in self.indices(id) {
                    let lhs = self.euler_poly(k, m).shift(&shift);
                    let rhs = (0..=m).fold(Polynomial::zero(), |acc, n| {
                        &acc + &self.ch2_poly(k, n).scale(&st.s2(m, n))
                    });
                    out.push((m, poly(lhs.clone()), poly(rhs)));
                    out.push((m, poly(lhs), poly(substituted[m].clone())));
                }
            }
            IdentityId::Eq37 => {
                for n in self.indices(id) {
                    let rhs = (0..=n).fold(Polynomial::zero(), |acc, l| {
                        let c = if l % 2 == 1 { -st.s1(n, l) } else { st.s1(n, l) };
                        &acc + &self.euler_poly(k, l).negate_arg().scale(&c)
                    });
                    out.push((n, poly(self.ch2_poly(k, n).clone()), poly(rhs)));
                }
            }
            IdentityId::Thm10 | IdentityId::Eq40 => {
                let first_m = if id == IdentityId::Thm10 { 1 } else { 0 };
                for n in self.indices(id) {
                    let lhs = self.ch2_poly(k, n).scale(&signed_inverse_factorial(n));
                    let rhs = inversion_sum(n, first_m, |m| self.ch1_poly(k, m).negate_arg());
                    out.push((n, poly(lhs), poly(rhs)));
                    if id == IdentityId::Thm10 {
                        // dropped m = 0 term: C(n-1, n) vanishes for n >= 1
                        out.push((n, num(from_bigint(binomial(n as i64 - 1, n))), num(Rational::zero())));
                    }
                }
            }
            IdentityId::Thm11 => {
                for n in self.indices(id) {
                    let lhs = self.ch1_poly(k, n).scale(&signed_inverse_factorial(n));
                    let rhs = inversion_sum(n, 1, |m| self.ch2_poly(k, m).negate_arg());
                    out.push((n, poly(lhs), poly(rhs)));
                }
            }
        }
        out
    }

    /// `(1+t)^(x+k) (2/(2+t))^k` over `Q[x]`.
    fn second_kind_poly_series(&self, k: u32) -> TruncatedSeries<Polynomial> {
        let exponent = Polynomial::new(vec![int(k as i64), Rational::one()]);
        binomial_series(&exponent, self.truncation)
            .mul(&changhee_kernel(self.truncation).pow(k).lift())
            .expect("equal orders")
    }
}

/// `(-1)^n / n!`.
fn signed_inverse_factorial(n: usize) -> Rational {
    let r = factorial(n).recip();
    if n % 2 == 1 {
        -r
    } else {
        r
    }
}

/// `sum_(m = first..=n) C(n-1, n-m)/m! term(m)`.
fn inversion_sum(n: usize, first: usize, term: impl Fn(usize) -> Polynomial) -> Polynomial {
    (first..=n).fold(Polynomial::zero(), |acc, m| {
        let c = from_bigint(binomial(n as i64 - 1, n - m)) / factorial(m);
        if c.is_zero() {
            return acc;
        }
        &acc + &term(m).scale(&c)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Harness {
        Harness::new(Grid { n_max: 6, k_max: 3 }, None).unwrap()
    }

    #[test]
    fn every_identity_passes_on_a_small_grid() {
        let h = small();
        for r in h.verify_all(&IdentityId::ALL) {
            assert!(r.passed(), "{} failed: {:?}", r.id, r.witness);
            assert!(r.witness.is_none());
            assert!(r.pointwise_consistent);
            assert!(r.comparisons > 0, "{}", r.id);
        }
    }

    #[test]
    fn degenerate_grid_passes() {
        let h = Harness::new(Grid { n_max: 0, k_max: 1 }, None).unwrap();
        let r = h.verify(IdentityId::Thm1);
        assert!(r.passed());
        assert_eq!(r.comparisons, 1);
        // n >= 1 identities have nothing to compare
        assert!(h.verify(IdentityId::Thm10).passed());
        assert_eq!(h.verify(IdentityId::Thm11).comparisons, 0);
    }

    #[test]
    fn dropping_the_power_of_minus_half_fails_at_n1() {
        let h = small();
        let st = &h.stirling;
        let report = h.run(IdentityId::Thm1, |k| {
            (0..=h.grid.n_max)
                .map(|n| {
                    let base = int((k as usize + n) as i64 - 1);
                    let rhs: Rational = (0..=n)
                        .map(|l| st.s1(n, l) * num_traits::pow(base.clone(), l))
                        .sum();
                    (n, Value::Number(h.ch1(k, n).clone()), Value::Number(rhs))
                })
                .collect()
        });
        assert_eq!(report.verdict, Verdict::Fail);
        let w = report.witness.unwrap();
        assert_eq!((w.n, w.k), (1, 1));
        assert_eq!(w.lhs, Value::Number(rat(-1, 2)));
        assert_eq!(w.rhs, Value::Number(int(1)));
    }

    #[test]
    fn worked_cells() {
        let h = Harness::new(Grid { n_max: 2, k_max: 1 }, None).unwrap();
        let cells = h.comparisons(IdentityId::Thm2, 1);
        assert_eq!(cells[2], (2, Value::Number(rat(1, 2)), Value::Number(rat(1, 2))));
        let cells = h.comparisons(IdentityId::Thm3, 1);
        assert_eq!(cells[2].2, Value::Number(rat(-1, 2)));
        let cells = h.comparisons(IdentityId::Cor4, 1);
        let x_minus_half = Polynomial::new(vec![rat(-1, 2), int(1)]);
        assert_eq!(cells[1].1, Value::Poly(x_minus_half.clone()));
        assert_eq!(cells[1].2, Value::Poly(x_minus_half));
        let cells = h.comparisons(IdentityId::Thm7, 1);
        assert_eq!(cells[2], (1, Value::Number(rat(1, 2)), Value::Number(rat(1, 2))));
        let cells = h.comparisons(IdentityId::Thm10, 1);
        let neg = Polynomial::new(vec![rat(-1, 2), int(-1)]);
        assert_eq!(cells[0], (1, Value::Poly(neg.clone()), Value::Poly(neg)));
        let cells = h.comparisons(IdentityId::Thm11, 1);
        let rhs = Polynomial::new(vec![rat(1, 2), int(-1)]);
        assert_eq!(cells[0], (1, Value::Poly(rhs.clone()), Value::Poly(rhs)));
    }

    #[test]
    fn perturbation_is_caught_at_or_before_the_index() {
        for family in Family::ALL {
            for n in [0usize, 3, 6] {
                let mut h = small();
                h.perturb(family, 2, n).unwrap();
                let failing: Vec<_> = h
                    .verify_all(&IdentityId::ALL)
                    .into_iter()
                    .filter(|r| !r.passed())
                    .collect();
                assert!(!failing.is_empty(), "{family} n={n} went unnoticed");
                for r in failing {
                    let w = r.witness.unwrap();
                    assert!(w.n <= n, "{} flagged n={} after perturbing {family} n={n}", r.id, w.n);
                }
            }
        }
    }

    #[test]
    fn perturb_outside_the_grid_is_an_error() {
        let mut h = small();
        assert!(h.perturb(Family::EulerNumber, 9, 0).is_err());
        assert!(h.perturb(Family::EulerNumber, 1, 7).is_err());
    }

    #[test]
    fn harness_rejects_bad_configuration() {
        assert_eq!(
            Harness::new(Grid { n_max: 4, k_max: 0 }, None).err(),
            Some(HarnessError::EmptyOrderRange)
        );
        assert_eq!(
            Harness::new(Grid { n_max: 8, k_max: 2 }, Some(5)).err(),
            Some(HarnessError::TruncationTooSmall { truncation: 5, n_max: 8 })
        );
    }

    #[test]
    fn id_parsing() {
        assert_eq!(parse_ids("all").unwrap().len(), 19);
        assert_eq!(
            parse_ids("thm3, cor4,thm1,thm3").unwrap(),
            vec![IdentityId::Thm1, IdentityId::Thm3, IdentityId::Cor4]
        );
        assert_eq!(parse_ids("thm4").unwrap_err(), UnknownIdentity("thm4".into()));
        for id in IdentityId::ALL {
            assert_eq!(id.as_str().parse::<IdentityId>().unwrap(), id);
        }
    }

    #[test]
    fn report_json_shape() {
        let h = Harness::new(Grid { n_max: 1, k_max: 1 }, None).unwrap();
        let r = h.verify(IdentityId::Thm1);
        let v: serde_json::Value = serde_json::from_str(&reports_to_json(&[r])).unwrap();
        assert_eq!(
            v,
            serde_json::json!([{"id": "thm1", "verdict": "pass", "grid": {"n_max": 1, "k_max": 1}, "witness": null}])
        );
        let mut h = h;
        h.perturb(Family::Changhee1Number, 1, 1).unwrap();
        let r = h.verify(IdentityId::Thm1);
        let v: serde_json::Value = serde_json::from_str(&reports_to_json(std::slice::from_ref(&r))).unwrap();
        assert_eq!(
            v[0]["witness"],
            serde_json::json!({"n": 1, "k": 1, "lhs": "1/2", "rhs": "-1/2"})
        );
        assert_eq!(
            reports_to_csv(&[r]),
            "id,verdict,n_max,k_max,witness_n,witness_k,lhs,rhs\nthm1,fail,1,1,1,1,1/2,-1/2\n"
        );
    }
}
