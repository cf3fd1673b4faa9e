//! Large-`n` predictions for the maximum part and the conjecture probe
//! `q(n) = rho(n) ln(n + 1)^(5/2)`.
//!
//! The predictions are for the maximum part of a composition of `n`; the
//! longest zero run of the corresponding string is one less. The one-free
//! predictions are conjectural and are labelled as such wherever they are
//! reported.

use num_rational::BigRational;
use serde::Serialize;

use crate::ensemble::{Ensemble, Family};
use crate::real::Real;
use crate::statistics::{Engine, StatsError};

/// Decimal places of the exact correlation that feed the probe.
const PROBE_RHO_DIGITS: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AsymptoticsError {
    #[error("the mean prediction needs n >= 2, got {0}")]
    TooSmall(usize),
    #[error("the probe needs n >= 3, got {0}")]
    ProbeTooShort(usize),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Whether a prediction is a theorem or only conjectured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Proved,
    Conjectured,
}

impl Status {
    pub fn of(family: Family) -> Self {
        if family.asymptotics_conjectural() {
            Status::Conjectured
        } else {
            Status::Proved
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::Conjectured => "conjectured",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticConstants {
    pub gamma: Real,
    pub ln2: Real,
    pub phi: Real,
    pub pi: Real,
}

impl Default for AsymptoticConstants {
    fn default() -> Self {
        AsymptoticConstants {
            gamma: Real::euler_gamma(),
            ln2: Real::ln2(),
            phi: Real::phi(),
            pi: Real::pi(),
        }
    }
}

impl AsymptoticConstants {
    /// Log base of the family's growth: `ln 2` or `ln phi`.
    pub fn log_base(&self, family: Family) -> Real {
        match family {
            Family::Unrestricted => self.ln2.clone(),
            Family::OneFree => self.phi.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub value: Real,
    pub status: Status,
}

/// `ln n / ln 2 + gamma / ln 2 - 1/2`, or `ln n / ln phi + gamma / ln phi - 1`
/// for one-free compositions of `n`.
pub fn predicted_max_mean(family: Family, n: usize) -> Result<Prediction, AsymptoticsError> {
    if n < 2 {
        return Err(AsymptoticsError::TooSmall(n));
    }
    let c = AsymptoticConstants::default();
    let base = c.log_base(family);
    let offset = match family {
        Family::Unrestricted => Real::parse("0.5").unwrap(),
        Family::OneFree => Real::one(),
    };
    let value = (Real::from_i64(n as i64).ln() + &c.gamma) / &base - offset;
    Ok(Prediction {
        value,
        status: Status::of(family),
    })
}

/// `1/12 + pi^2 / (6 ln^2 b)` with `b = 2` or `phi`.
pub fn predicted_max_var(family: Family) -> Prediction {
    let c = AsymptoticConstants::default();
    let base = c.log_base(family);
    let value = Real::one() / Real::from_i64(12)
        + c.pi.powi(2) / (Real::from_i64(6) * base.powi(2));
    Prediction {
        value,
        status: Status::of(family),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbePoint {
    pub n: usize,
    /// Correlation as an exact decimal string with 60 places.
    pub rho: String,
    pub q: Real,
}

/// `q = rho(n) ln(n + 1)^exponent`.
pub fn probe_value(rho: &Real, n: usize, exponent: &Real) -> Real {
    rho * &Real::from_i64(n as i64 + 1).ln().powf(exponent)
}

pub fn default_exponent() -> Real {
    Real::parse("2.5").unwrap()
}

/// Probe values for `ns`, in the given order.
pub fn conjecture_probe(
    engine: &Engine,
    ensemble: Ensemble,
    ns: &[usize],
    exponent: &Real,
) -> Result<Vec<ProbePoint>, AsymptoticsError> {
    if let Some(&n) = ns.iter().find(|&&n| n < 3) {
        return Err(AsymptoticsError::ProbeTooShort(n));
    }
    let sums = engine.moment_sums_many(ensemble, ns)?;
    let mut out = Vec::with_capacity(ns.len());
    for s in sums {
        let rho = s.summary(ensemble)?.correlation(PROBE_RHO_DIGITS)?;
        out.push(probe_from_rho(s.n, rho, exponent));
    }
    Ok(out)
}

pub fn probe_from_rho(n: usize, rho: String, exponent: &Real) -> ProbePoint {
    let q = probe_value(&Real::parse(&rho).expect("decimal correlation"), n, exponent);
    ProbePoint { n, rho, q }
}

/// Exact mean and variance of the maximum part over compositions of
/// `total`, beside the predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticComparison {
    pub total: usize,
    pub exact_mean: BigRational,
    pub exact_var: BigRational,
    pub predicted_mean: Real,
    pub predicted_var: Real,
    pub status: Status,
}

impl AsymptoticComparison {
    pub fn mean_residual(&self) -> Real {
        Real::from_rational(&self.exact_mean) - &self.predicted_mean
    }

    pub fn var_residual(&self) -> Real {
        Real::from_rational(&self.exact_var) - &self.predicted_var
    }
}

/// Comparisons for every composition size in `totals` (each `>= 2`).
pub fn compare(family: Family, totals: &[usize]) -> Result<Vec<AsymptoticComparison>, AsymptoticsError> {
    if let Some(&t) = totals.iter().find(|&&t| t < 2) {
        return Err(AsymptoticsError::TooSmall(t));
    }
    let top = totals.iter().copied().max().unwrap_or(2);
    let moments = crate::series::max_part_moments_up_to(family, top - 1);
    let var = predicted_max_var(family);
    totals
        .iter()
        .map(|&total| {
            let m = &moments[total - 2];
            Ok(AsymptoticComparison {
                total,
                exact_mean: &m.mu + BigRational::from_integer(1.into()),
                exact_var: m.sigma2.clone(),
                predicted_mean: predicted_max_mean(family, total)?.value,
                predicted_var: var.value.clone(),
                status: var.status,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Real, b: &Real, tol: f64) -> bool {
        (a - b).abs().to_f64() < tol
    }

    #[test]
    fn trivial_means() {
        let c = AsymptoticConstants::default();
        let half = Real::parse("0.5").unwrap();
        let at2 = predicted_max_mean(Family::Unrestricted, 2).unwrap();
        assert!(close(&at2.value, &(Real::one() + &c.gamma / &c.ln2 - &half), 1e-70));
        let at1024 = predicted_max_mean(Family::Unrestricted, 1024).unwrap();
        assert!(close(&at1024.value, &(Real::from_i64(10) + &c.gamma / &c.ln2 - &half), 1e-70));
        assert_eq!(at1024.status, Status::Proved);
        assert_eq!(predicted_max_mean(Family::OneFree, 50).unwrap().status, Status::Conjectured);
        assert_eq!(predicted_max_mean(Family::Unrestricted, 1), Err(AsymptoticsError::TooSmall(1)));
    }

    #[test]
    fn variance_constants() {
        let u = predicted_max_var(Family::Unrestricted).value;
        let f = predicted_max_var(Family::OneFree).value;
        assert!(f > u);
        let expect_u = 1.0 / 12.0 + std::f64::consts::PI.powi(2) / (6.0 * 2f64.ln().powi(2));
        assert!((u.to_f64() - expect_u).abs() < 1e-12);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let expect_f = 1.0 / 12.0 + std::f64::consts::PI.powi(2) / (6.0 * phi.ln().powi(2));
        assert!((f.to_f64() - expect_f).abs() < 1e-12);
    }

    #[test]
    fn mean_prediction_near_exact_at_1000() {
        let cmp = compare(Family::Unrestricted, &[1000]).unwrap().remove(0);
        assert!(cmp.mean_residual().abs().to_f64() < 0.02);
    }

    #[test]
    fn mean_residual_small_and_variance_residual_shrinking() {
        let totals: Vec<usize> = (500..=1400).step_by(100).collect();
        let rows = compare(Family::Unrestricted, &totals).unwrap();
        let mut last = f64::INFINITY;
        for r in &rows {
            assert!(r.mean_residual().abs().to_f64() < 0.005, "mean at {}", r.total);
            let v = r.var_residual().to_f64();
            assert!(v < 0.0 && v.abs() < 0.08 && v.abs() < last, "var at {}: {v}", r.total);
            last = v.abs();
        }
    }

    #[test]
    fn probe_matches_published_construction() {
        let engine = Engine::default();
        let e = default_exponent();
        let p = conjecture_probe(&engine, Ensemble::Unconstrained, &[100], &e).unwrap();
        let rho = crate::real::decimal_to_rational(&p[0].rho).unwrap();
        assert_eq!(crate::real::round_fixed(&rho, 6), "-0.441772");
        let expect = -0.441772 * 101f64.ln().powf(2.5);
        assert!((p[0].q.to_f64() - expect).abs() < 1e-6 * 101f64.ln().powf(2.5));
        assert!(conjecture_probe(&engine, Ensemble::Solus, &[], &e).unwrap().is_empty());
        assert_eq!(
            conjecture_probe(&engine, Ensemble::Solus, &[2], &e),
            Err(AsymptoticsError::ProbeTooShort(2))
        );
    }

    #[test]
    fn probe_is_negative_for_small_lengths() {
        let engine = Engine::default();
        let ns: Vec<usize> = (3..=60).collect();
        for e in Ensemble::ALL {
            let ns: Vec<usize> = ns.iter().copied().filter(|&n| n >= 5).collect();
            for p in conjecture_probe(&engine, e, &ns, &default_exponent()).unwrap() {
                assert!(p.q.is_negative(), "{e} n={}", p.n);
            }
        }
    }
}
