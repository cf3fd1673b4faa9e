//! Exact coefficient extraction for the generating-function moment formulas.
//!
//! For both composition families the `k`-th summand of the maximum-part
//! formulas is `[z^n]` of "all strings" minus "strings whose zero runs are
//! shorter than `k`", i.e. the number of strings with longest zero run at
//! least `k`. Summing over `k` gives `E[Y]`, and weighting by `2k - 1` gives
//! `E[Y^2]`. The summands vanish for `k > n`, so the sums stop at `k = n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ensemble::Family;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("divisor has a zero constant term")]
    ZeroConstantTerm,
    #[error("moments are only defined for n >= 1")]
    EmptyLength,
}

/// `d_n`: `d_0 = 0`, `d_1 = 1`, `d_n = d_{n-1} + d_{n-2}`.
pub fn fibonacci_d(n: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// Power series `c_0 + c_1 z + ... + c_D z^D`, exact modulo `z^(D+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    /// Pads with zeros or truncates `coeffs` to degree bound `degree`.
    pub fn new(mut coeffs: Vec<BigRational>, degree: usize) -> Self {
        coeffs.resize(degree + 1, BigRational::zero());
        TruncatedSeries { coeffs }
    }

    pub fn from_integers(coeffs: &[i64], degree: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(), degree)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, m: usize) -> &BigRational {
        &self.coeffs[m]
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree().min(other.degree());
        let coeffs = (0..=d).map(|m| &self.coeffs[m] + &other.coeffs[m]).collect();
        TruncatedSeries { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let d = self.degree().min(other.degree());
        let coeffs = (0..=d).map(|m| &self.coeffs[m] - &other.coeffs[m]).collect();
        TruncatedSeries { coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.degree().min(other.degree());
        let coeffs = (0..=d)
            .map(|m| {
                (0..=m)
                    .filter(|&i| !self.coeffs[i].is_zero() && !other.coeffs[m - i].is_zero())
                    .map(|i| &self.coeffs[i] * &other.coeffs[m - i])
                    .sum()
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    /// Long division; the divisor needs a non-zero constant term.
    pub fn div(&self, divisor: &Self) -> Result<Self, SeriesError> {
        let lead = &divisor.coeffs[0];
        if lead.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let d = self.degree().min(divisor.degree());
        let mut out: Vec<BigRational> = Vec::with_capacity(d + 1);
        for m in 0..=d {
            let mut acc = self.coeffs[m].clone();
            for i in 1..=m {
                acc -= &divisor.coeffs[i] * &out[m - i];
            }
            out.push(acc / lead);
        }
        Ok(TruncatedSeries { coeffs: out })
    }
}

/// `P(z) / Q(z)` with `Q(0) = 1`, expanded through the linear recurrence
/// `c_m = p_m - sum_{i >= 1} q_i c_{m-i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunctionExtractor {
    numerator: Vec<BigRational>,
    denominator: Vec<BigRational>,
}

impl RationalFunctionExtractor {
    /// Normalises both polynomials so that the denominator's constant term
    /// is one.
    pub fn new(numerator: Vec<BigRational>, denominator: Vec<BigRational>) -> Result<Self, SeriesError> {
        let lead = denominator.first().cloned().unwrap_or_default();
        if lead.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        Ok(RationalFunctionExtractor {
            numerator: numerator.into_iter().map(|c| c / &lead).collect(),
            denominator: denominator.into_iter().map(|c| c / &lead).collect(),
        })
    }

    pub fn from_integers(numerator: &[i64], denominator: &[i64]) -> Result<Self, SeriesError> {
        let conv = |p: &[i64]| p.iter().map(|&c| BigRational::from_integer(c.into())).collect();
        Self::new(conv(numerator), conv(denominator))
    }

    pub fn numerator(&self) -> &[BigRational] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[BigRational] {
        &self.denominator
    }

    /// Coefficients `c_0..=c_degree`.
    pub fn expand(&self, degree: usize) -> Vec<BigRational> {
        let taps: Vec<(usize, &BigRational)> = self
            .denominator
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, q)| !q.is_zero())
            .collect();
        let mut out: Vec<BigRational> = Vec::with_capacity(degree + 1);
        for m in 0..=degree {
            let mut c = self.numerator.get(m).cloned().unwrap_or_default();
            for &(i, q) in &taps {
                if i > m {
                    break;
                }
                c -= q * &out[m - i];
            }
            out.push(c);
        }
        out
    }

    pub fn coefficient(&self, n: usize) -> BigRational {
        self.expand(n).pop().unwrap_or_default()
    }

    /// The same expansion by generic series division.
    pub fn divide_series(&self, degree: usize) -> TruncatedSeries {
        let p = TruncatedSeries::new(self.numerator.clone(), degree);
        let q = TruncatedSeries::new(self.denominator.clone(), degree);
        p.div(&q).expect("normalised denominator")
    }
}

/// Sparse integer polynomial as `(power, coefficient)` pairs.
type Sparse = Vec<(usize, i64)>;

fn sparse(terms: &[(usize, i64)]) -> Sparse {
    let mut merged: Vec<(usize, i64)> = Vec::new();
    for &(pow, c) in terms {
        match merged.iter_mut().find(|(p, _)| *p == pow) {
            Some(entry) => entry.1 += c,
            None => merged.push((pow, c)),
        }
    }
    merged.retain(|&(_, c)| c != 0);
    merged.sort_unstable();
    merged
}

/// Integer expansion of `num / den` with `den(0) = 1`.
fn expand_integer(num: &Sparse, den: &Sparse, degree: usize) -> Vec<BigInt> {
    debug_assert_eq!(den.first(), Some(&(0, 1)));
    let taps = &den[1..];
    let mut out: Vec<BigInt> = Vec::with_capacity(degree + 1);
    for m in 0..=degree {
        let mut c = BigInt::zero();
        if let Some(&(_, p)) = num.iter().find(|(pow, _)| *pow == m) {
            c += p;
        }
        for &(i, q) in taps {
            if i > m {
                break;
            }
            c -= &out[m - i] * q;
        }
        out.push(c);
    }
    out
}

/// The "all strings" generating function of a family.
fn all_strings(family: Family) -> (Sparse, Sparse) {
    match family {
        Family::Unrestricted => (sparse(&[(0, 1)]), sparse(&[(0, 1), (1, -2)])),
        Family::OneFree => (sparse(&[(0, 1), (2, -1)]), sparse(&[(0, 1), (1, -1), (2, -1)])),
    }
}

/// Generating function of the strings whose zero runs are all shorter than
/// `k`.
fn short_runs(family: Family, k: usize) -> (Sparse, Sparse) {
    match family {
        Family::Unrestricted => (
            sparse(&[(0, 1), (k, -1)]),
            sparse(&[(0, 1), (1, -2), (k + 1, 1)]),
        ),
        Family::OneFree => (
            sparse(&[(0, 1), (2, -1), (k, -1), (k + 1, 1)]),
            sparse(&[(0, 1), (1, -1), (2, -1), (k + 1, 1)]),
        ),
    }
}

fn to_extractor((num, den): (Sparse, Sparse)) -> RationalFunctionExtractor {
    let dense = |s: &Sparse| {
        let len = s.last().map_or(1, |&(p, _)| p + 1);
        let mut v = vec![0i64; len];
        for &(p, c) in s {
            v[p] = c;
        }
        v
    };
    RationalFunctionExtractor::from_integers(&dense(&num), &dense(&den)).expect("unit constant term")
}

/// `[z^m]` of the `k`-th summand of the maximum-part formula, as a rational
/// function: all strings minus strings with runs shorter than `k`.
pub fn max_part_summand(family: Family, k: usize) -> (RationalFunctionExtractor, RationalFunctionExtractor) {
    (to_extractor(all_strings(family)), to_extractor(short_runs(family, k)))
}

/// The `(P, Q)` pairs for the mean and raw second moment of the number of
/// ones in pinned solus strings: `z^3 / (1 - z - z^2)^2` and
/// `z^3 (1 - z + z^2) / (1 - z - z^2)^3`.
pub fn one_free_parts_functions() -> (RationalFunctionExtractor, RationalFunctionExtractor) {
    let mean = RationalFunctionExtractor::from_integers(&[0, 0, 0, 1], &[1, -2, -1, 2, 1]).unwrap();
    let second = RationalFunctionExtractor::from_integers(
        &[0, 0, 0, 1, -1, 1],
        &[1, -3, 0, 5, 0, -3, -1],
    )
    .unwrap();
    (mean, second)
}

/// Number of strings of length `n` in the family's ensemble.
pub fn family_size(family: Family, n: usize) -> BigInt {
    match family {
        Family::Unrestricted => BigInt::one() << n,
        Family::OneFree => fibonacci_d(n),
    }
}

/// Exact mean and variance of the longest zero run (maximum part minus one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxPartMoments {
    pub n: usize,
    pub mu: BigRational,
    pub sigma2: BigRational,
}

/// Numerators `sum_k [z^m] summand_k` and `sum_k (2k-1) [z^m] summand_k`
/// for `m = 0..=n_max`, each `k`-sum stopping at `k = m`.
pub fn run_tail_numerators(family: Family, n_max: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    let (num, den) = all_strings(family);
    let all = expand_integer(&num, &den, n_max);
    let mut first = vec![BigInt::zero(); n_max + 1];
    let mut second = vec![BigInt::zero(); n_max + 1];
    for k in 1..=n_max {
        let (num, den) = short_runs(family, k);
        let short = expand_integer(&num, &den, n_max);
        let weight = 2 * k - 1;
        for m in k..=n_max {
            let tail = &all[m] - &short[m];
            second[m] += &tail * weight;
            first[m] += tail;
        }
    }
    (first, second)
}

/// Moments of the longest zero run for every `n` in `1..=n_max`.
pub fn max_part_moments_up_to(family: Family, n_max: usize) -> Vec<MaxPartMoments> {
    let (first, second) = run_tail_numerators(family, n_max);
    (1..=n_max)
        .map(|n| {
            let size = family_size(family, n);
            let mu = BigRational::new(first[n].clone(), size.clone());
            let sigma2 = BigRational::new(second[n].clone(), size) - &mu * &mu;
            MaxPartMoments { n, mu, sigma2 }
        })
        .collect()
}

pub fn max_part_moments(family: Family, n: usize) -> Result<MaxPartMoments, SeriesError> {
    if n == 0 {
        return Err(SeriesError::EmptyLength);
    }
    Ok(max_part_moments_up_to(family, n).pop().expect("n >= 1"))
}

/// Exact mean and variance of the number of ones (number of parts minus one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartsMoments {
    pub n: usize,
    pub m: BigRational,
    pub s2: BigRational,
}

pub fn parts_moments(family: Family, n: usize) -> Result<PartsMoments, SeriesError> {
    if n == 0 {
        return Err(SeriesError::EmptyLength);
    }
    let (m, s2) = match family {
        Family::Unrestricted => (
            BigRational::new(n.into(), 2.into()),
            BigRational::new(n.into(), 4.into()),
        ),
        Family::OneFree => {
            let (mean, second) = one_free_parts_functions();
            let size = BigRational::from_integer(fibonacci_d(n));
            let m = mean.coefficient(n) / &size;
            let s2 = second.coefficient(n) / &size - &m * &m;
            (m, s2)
        }
    };
    Ok(PartsMoments { n, m, s2 })
}
