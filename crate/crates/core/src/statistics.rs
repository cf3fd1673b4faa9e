//! Moments, covariance and correlation of (number of ones, longest zero run),
//! and through the waiting-time bijection of (number of parts, maximum part).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::count_tables::{self, TableError, DEFAULT_RECURSION_CAP};
use crate::ensemble::{Ensemble, Family};
use crate::gap_counts::gap_moment_sums;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("variance of the {which} is zero for {ensemble} strings of length {n}")]
    DegenerateVariance {
        ensemble: Ensemble,
        n: usize,
        which: &'static str,
    },
    #[error("no {ensemble} strings of length {n}")]
    EmptyEnsemble { ensemble: Ensemble, n: usize },
    #[error("composition size must be at least 1")]
    ZeroCompositionSize,
    #[error("at least one decimal digit is required")]
    NoDigits,
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Unnormalised sums over all strings of one ensemble and length, with
/// `X` the number of ones and `Y` the longest zero run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSums {
    pub n: usize,
    pub total: BigInt,
    pub sum_ones: BigInt,
    pub sum_ones_sq: BigInt,
    pub sum_run: BigInt,
    pub sum_run_sq: BigInt,
    /// Numerator of `E[XY]`.
    pub sum_ones_run: BigInt,
}

impl MomentSums {
    pub fn empty(n: usize) -> Self {
        MomentSums {
            n,
            total: BigInt::zero(),
            sum_ones: BigInt::zero(),
            sum_ones_sq: BigInt::zero(),
            sum_run: BigInt::zero(),
            sum_run_sq: BigInt::zero(),
            sum_ones_run: BigInt::zero(),
        }
    }

    /// Adds the strings with `ones` ones whose counts by longest run are
    /// `row[y]`.
    pub fn add_row(&mut self, ones: usize, row: &[BigInt]) {
        let mut count = BigInt::zero();
        let mut run = BigInt::zero();
        let mut run_sq = BigInt::zero();
        for (y, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            count += c;
            if y > 0 {
                run += c * y;
                run_sq += c * (y * y);
            }
        }
        if count.is_zero() {
            return;
        }
        self.sum_ones += &count * ones;
        self.sum_ones_sq += &count * (ones * ones);
        self.sum_ones_run += &run * ones;
        self.total += count;
        self.sum_run += run;
        self.sum_run_sq += run_sq;
    }

    pub fn merge(&mut self, other: &MomentSums) {
        self.total += &other.total;
        self.sum_ones += &other.sum_ones;
        self.sum_ones_sq += &other.sum_ones_sq;
        self.sum_run += &other.sum_run;
        self.sum_run_sq += &other.sum_run_sq;
        self.sum_ones_run += &other.sum_ones_run;
    }

    /// Numerator of `E[(number of parts)(maximum part)]` for compositions of
    /// `n + 1`, i.e. of `E[(X + 1)(Y + 1)]`.
    pub fn composition_numerator(&self) -> BigInt {
        &self.sum_ones_run + &self.sum_ones + &self.sum_run + &self.total
    }

    pub fn summary(&self, ensemble: Ensemble) -> Result<MomentSummary, StatsError> {
        if self.total.is_zero() {
            return Err(StatsError::EmptyEnsemble { ensemble, n: self.n });
        }
        let size = self.total.clone();
        let ratio = |num: &BigInt| BigRational::new(num.clone(), size.clone());
        let m = ratio(&self.sum_ones);
        let mu = ratio(&self.sum_run);
        let s2 = ratio(&self.sum_ones_sq) - &m * &m;
        let sigma2 = ratio(&self.sum_run_sq) - &mu * &mu;
        let covariance = ratio(&self.sum_ones_run) - &m * &mu;
        Ok(MomentSummary {
            ensemble,
            n: self.n,
            size,
            m,
            s2,
            mu,
            sigma2,
            exy_numerator: self.sum_ones_run.clone(),
            exy_composition_numerator: self.composition_numerator(),
            covariance,
        })
    }
}

/// Exact moments of one ensemble at one length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSummary {
    pub ensemble: Ensemble,
    pub n: usize,
    pub size: BigInt,
    /// Mean number of ones.
    pub m: BigRational,
    /// Variance of the number of ones.
    pub s2: BigRational,
    /// Mean longest zero run.
    pub mu: BigRational,
    /// Variance of the longest zero run.
    pub sigma2: BigRational,
    pub exy_numerator: BigInt,
    pub exy_composition_numerator: BigInt,
    pub covariance: BigRational,
}

impl MomentSummary {
    /// `E[(parts)(max part)] - E[parts] E[max part]`, computed from the
    /// composition-side numerator. Always equal to [`Self::covariance`].
    pub fn composition_covariance(&self) -> BigRational {
        let one = BigRational::one();
        BigRational::new(self.exy_composition_numerator.clone(), self.size.clone())
            - (&one + &self.m) * (&one + &self.mu)
    }

    /// Correlation rounded half-to-even to `digits` decimal places.
    pub fn correlation(&self, digits: usize) -> Result<String, StatsError> {
        self.check_variances()?;
        signed_sqrt_ratio_decimal(&self.covariance, &(&self.s2 * &self.sigma2), digits)
    }

    fn check_variances(&self) -> Result<(), StatsError> {
        let degenerate = |which| StatsError::DegenerateVariance {
            ensemble: self.ensemble,
            n: self.n,
            which,
        };
        if self.s2.is_zero() {
            return Err(degenerate("number of ones"));
        }
        if self.sigma2.is_zero() {
            return Err(degenerate("longest zero run"));
        }
        Ok(())
    }
}

/// Renders `c / sqrt(v)` for `v > 0` with `digits` decimal places, rounded
/// half-to-even. Exact: the square root is taken on integers scaled by
/// `10^(2 digits)` and ties are detected by comparing squares.
pub fn signed_sqrt_ratio_decimal(
    c: &BigRational,
    v: &BigRational,
    digits: usize,
) -> Result<String, StatsError> {
    if digits == 0 {
        return Err(StatsError::NoDigits);
    }
    assert!(v.is_positive(), "variance product must be positive");
    let r = c * c / v;
    let (p, q) = (r.numer().clone(), r.denom().clone());
    let scale = BigInt::from(10u32).pow(2 * digits as u32);
    let scaled = &p * &scale;
    let mut root = (&scaled / &q).sqrt();
    // compare sqrt(r) 10^d against root + 1/2 via 4 r 10^(2d) vs (2 root + 1)^2
    let lhs = scaled * 4u32;
    let half_up: BigInt = &root * 2u32 + 1u32;
    let rhs = &half_up * &half_up * &q;
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => root += 1u32,
        std::cmp::Ordering::Equal if root.bit(0) => root += 1u32,
        _ => {}
    }
    let mut text = root.to_string();
    if text.len() <= digits {
        text = format!("{}{}", "0".repeat(digits + 1 - text.len()), text);
    }
    let split = text.len() - digits;
    let sign = if c.is_negative() { "-" } else { "" };
    Ok(format!("{sign}{}.{}", &text[..split], &text[split..]))
}

/// Which counting path produces the moment sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Recursion,
    Gap,
    /// Recursion up to the crossover length, gap counts above it.
    Auto,
}

/// Routing between the recursion and gap-count paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engine {
    pub method: Method,
    pub crossover: usize,
    pub recursion_cap: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            method: Method::Auto,
            crossover: DEFAULT_RECURSION_CAP,
            recursion_cap: DEFAULT_RECURSION_CAP,
        }
    }
}

impl Engine {
    pub fn with_method(method: Method) -> Self {
        Engine {
            method,
            ..Engine::default()
        }
    }

    fn uses_recursion(&self, n: usize) -> bool {
        match self.method {
            Method::Recursion => true,
            Method::Gap => false,
            Method::Auto => n <= self.crossover.min(self.recursion_cap),
        }
    }

    /// The path actually taken for length `n`.
    pub fn resolve(&self, n: usize) -> Method {
        if self.uses_recursion(n) {
            Method::Recursion
        } else {
            Method::Gap
        }
    }

    pub fn moment_sums(&self, ensemble: Ensemble, n: usize) -> Result<MomentSums, StatsError> {
        Ok(self.moment_sums_many(ensemble, &[n])?.remove(0))
    }

    /// Moment sums for several lengths, in the order given. Lengths routed
    /// to the recursion share a single sweep.
    pub fn moment_sums_many(
        &self,
        ensemble: Ensemble,
        ns: &[usize],
    ) -> Result<Vec<MomentSums>, StatsError> {
        let recursion_max = ns.iter().copied().filter(|&n| self.uses_recursion(n)).max();
        let mut swept: BTreeMap<usize, MomentSums> = BTreeMap::new();
        if let Some(n_max) = recursion_max {
            let all = count_tables::moment_sums_up_to(ensemble, n_max, self.recursion_cap)?;
            for s in all {
                if ns.contains(&s.n) {
                    swept.insert(s.n, s);
                }
            }
        }
        Ok(ns
            .iter()
            .map(|&n| match swept.get(&n) {
                Some(s) => s.clone(),
                None => gap_moment_sums(ensemble, n),
            })
            .collect())
    }

    pub fn summary(&self, ensemble: Ensemble, n: usize) -> Result<MomentSummary, StatsError> {
        self.moment_sums(ensemble, n)?.summary(ensemble)
    }
}

/// Numerator of `E[(number of ones)(longest zero run)]`; the denominator is
/// the ensemble size.
pub fn exy_numerator_bitstring(ensemble: Ensemble, n: usize) -> Result<BigInt, StatsError> {
    Ok(Engine::default().moment_sums(ensemble, n)?.sum_ones_run)
}

/// Numerator of `E[(number of parts)(maximum part)]` over compositions of
/// `total` in the family.
pub fn exy_numerator_composition(family: Family, total: usize) -> Result<BigInt, StatsError> {
    if total == 0 {
        return Err(StatsError::ZeroCompositionSize);
    }
    Ok(Engine::default()
        .moment_sums(family.ensemble(), total - 1)?
        .composition_numerator())
}

pub fn covariance(ensemble: Ensemble, n: usize) -> Result<BigRational, StatsError> {
    Ok(Engine::default().summary(ensemble, n)?.covariance)
}

pub fn correlation(ensemble: Ensemble, n: usize, digits: usize) -> Result<String, StatsError> {
    Engine::default().summary(ensemble, n)?.correlation(digits)
}

/// One row of the correlation tables: the composition families first
/// (unconstrained, pinned solus), then pinned and solus strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrelationRow {
    pub n: usize,
    pub values: Vec<(Ensemble, String)>,
}

impl CorrelationRow {
    pub fn get(&self, ensemble: Ensemble) -> Option<&str> {
        self.values
            .iter()
            .find(|(e, _)| *e == ensemble)
            .map(|(_, v)| v.as_str())
    }
}

/// Correlations for the requested ensembles at each length, rows in the
/// order of `ns`.
pub fn correlation_rows(
    engine: &Engine,
    ensembles: &[Ensemble],
    ns: &[usize],
    digits: usize,
) -> Result<Vec<CorrelationRow>, StatsError> {
    let mut columns = Vec::with_capacity(ensembles.len());
    for &e in ensembles {
        let sums = engine.moment_sums_many(e, ns)?;
        let values = sums
            .iter()
            .map(|s| s.summary(e)?.correlation(digits))
            .collect::<Result<Vec<_>, _>>()?;
        columns.push(values);
    }
    Ok(ns
        .iter()
        .enumerate()
        .map(|(i, &n)| CorrelationRow {
            n,
            values: ensembles
                .iter()
                .zip(&columns)
                .map(|(&e, col)| (e, col[i].clone()))
                .collect(),
        })
        .collect())
}

pub fn table_row(n: usize, digits: usize) -> Result<CorrelationRow, StatsError> {
    Ok(correlation_rows(&Engine::default(), &Ensemble::ALL, &[n], digits)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_moment_sums;
    use proptest::prelude::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn published_numerator_sequences() {
        let u: Vec<_> = (1..=10)
            .map(|n| exy_numerator_bitstring(Ensemble::Unconstrained, n).unwrap())
            .collect();
        let expect: Vec<BigInt> = [0, 2, 11, 40, 122, 338, 881, 2202, 5337, 12634]
            .iter()
            .map(|&v| BigInt::from(v))
            .collect();
        assert_eq!(u, expect);
        assert_eq!(exy_numerator_bitstring(Ensemble::PinnedSolus, 3).unwrap(), BigInt::from(1));
        assert_eq!(exy_numerator_composition(Family::Unrestricted, 5).unwrap(), BigInt::from(115));
        assert_eq!(exy_numerator_composition(Family::OneFree, 7).unwrap(), BigInt::from(70));
        assert_eq!(exy_numerator_composition(Family::OneFree, 1).unwrap(), BigInt::zero());
        assert_eq!(
            exy_numerator_composition(Family::OneFree, 0),
            Err(StatsError::ZeroCompositionSize)
        );
    }

    #[test]
    fn covariance_examples() {
        assert_eq!(covariance(Ensemble::Unconstrained, 4).unwrap(), rat(-7, 8));
        assert_eq!(covariance(Ensemble::PinnedSolus, 6).unwrap(), rat(-13, 16));
        assert_eq!(covariance(Ensemble::Unconstrained, 1).unwrap(), rat(-1, 4));
        // 40/16 - 2 (27/16) = 115/16 - 3 (43/16)
        assert_eq!(
            rat(40, 16) - rat(2, 1) * rat(27, 16),
            rat(115, 16) - rat(3, 1) * rat(43, 16)
        );
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(correlation(Ensemble::Unconstrained, 4, 6).unwrap(), "-0.890799");
        assert_eq!(correlation(Ensemble::PinnedSolus, 6, 6).unwrap(), "-0.945611");
        assert_eq!(correlation(Ensemble::Pinned, 100, 6).unwrap(), "-0.445112");
        assert_eq!(correlation(Ensemble::Solus, 100, 6).unwrap(), "-0.525562");
    }

    #[test]
    fn correlation_at_three_from_enumeration() {
        let s = brute_moment_sums(Ensemble::Unconstrained, 3).unwrap().summary(Ensemble::Unconstrained).unwrap();
        // 8 strings: m = 3/2, s2 = 3/4, mu = 11/8, sigma2 = 47/64, cov = 11/8 - 33/16
        assert_eq!(s.m, rat(3, 2));
        assert_eq!(s.s2, rat(3, 4));
        assert_eq!(s.mu, rat(11, 8));
        assert_eq!(s.sigma2, rat(47, 64));
        assert_eq!(s.covariance, rat(-11, 16));
        // -11/16 / sqrt(3/4 * 71/64) = -0.8717...
        let r = -11.0 / 16.0 / (0.75f64 * 47.0 / 64.0).sqrt();
        assert_eq!(s.correlation(6).unwrap(), format!("{r:.6}"));
        let row = table_row(3, 6).unwrap();
        assert_eq!(row.get(Ensemble::Unconstrained), Some(format!("{r:.6}").as_str()));
    }

    #[test]
    fn degenerate_variance() {
        let err = Engine::default().summary(Ensemble::PinnedSolus, 2).unwrap().correlation(6);
        assert!(matches!(err, Err(StatsError::DegenerateVariance { .. })));
        assert!(matches!(
            Engine::default().summary(Ensemble::Pinned, 0),
            Err(StatsError::EmptyEnsemble { .. })
        ));
    }

    #[test]
    fn rounding_is_half_even_and_exact() {
        let one = rat(1, 1);
        // c / sqrt(v) = 0.0625 exactly -> ties at 3 digits
        assert_eq!(signed_sqrt_ratio_decimal(&rat(1, 16), &one, 3).unwrap(), "0.062");
        assert_eq!(signed_sqrt_ratio_decimal(&rat(3, 16), &one, 3).unwrap(), "0.188");
        assert_eq!(signed_sqrt_ratio_decimal(&rat(-1, 2), &rat(1, 4), 2).unwrap(), "-1.00");
        assert_eq!(signed_sqrt_ratio_decimal(&rat(1, 3), &one, 4).unwrap(), "0.3333");
        assert_eq!(signed_sqrt_ratio_decimal(&rat(-2, 3), &one, 1).unwrap(), "-0.7");
        assert_eq!(signed_sqrt_ratio_decimal(&rat(1, 1), &rat(2, 1), 8).unwrap(), "0.70710678");
        assert_eq!(signed_sqrt_ratio_decimal(&one, &one, 0), Err(StatsError::NoDigits));
    }

    #[test]
    fn both_formulations_agree() {
        for e in Ensemble::ALL {
            for n in 1..=40 {
                let s = Engine::default().summary(e, n).unwrap();
                assert_eq!(s.covariance, s.composition_covariance(), "{e} n={n}");
            }
        }
    }

    #[test]
    fn routes_agree_and_batching_is_transparent() {
        let rec = Engine::with_method(Method::Recursion);
        let gap = Engine::with_method(Method::Gap);
        let ns = [5, 40, 17, 80];
        for e in Ensemble::ALL {
            let a = rec.moment_sums_many(e, &ns).unwrap();
            let b = gap.moment_sums_many(e, &ns).unwrap();
            assert_eq!(a, b);
            for (s, &n) in a.iter().zip(&ns) {
                assert_eq!(s.n, n);
            }
        }
        let capped = Engine {
            recursion_cap: 10,
            ..Engine::with_method(Method::Recursion)
        };
        assert!(matches!(capped.moment_sums(Ensemble::Unconstrained, 11), Err(StatsError::Table(_))));
        assert_eq!(Engine::default().resolve(600), Method::Recursion);
        assert_eq!(Engine::default().resolve(601), Method::Gap);
    }

    proptest! {
        #[test]
        fn rendered_correlation_is_close_to_float(n in 3usize..60, e in 0usize..4) {
            let ensemble = Ensemble::ALL[e];
            let Ok(s) = Engine::default().summary(ensemble, n) else { return Ok(()); };
            let Ok(text) = s.correlation(9) else { return Ok(()); };
            let value: f64 = text.parse().unwrap();
            let f = |r: &BigRational| r.numer().to_string().parse::<f64>().unwrap() / r.denom().to_string().parse::<f64>().unwrap();
            let float = f(&s.covariance) / (f(&s.s2) * f(&s.sigma2)).sqrt();
            prop_assert!((value - float).abs() < 1e-8);
            prop_assert!((-1.0..=0.0).contains(&value));
        }
    }
}
