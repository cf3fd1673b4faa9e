//! Sequence transformations for extrapolating slowly convergent sequences.
//!
//! Samples are indexed by increasing integers `n`; Richardson and Levin work
//! in a transformed variable `t(n)` that tends to zero, by default
//! `t = 1 / ln(n + 1)`.

use serde::Serialize;

use crate::asymptotics::probe_value;
use crate::ensemble::Ensemble;
use crate::real::Real;
use crate::statistics::{Engine, StatsError};

/// Points needed by [`estimate_c`].
pub const MIN_ESTIMATE_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AccelerationError {
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("abscissae must be strictly increasing")]
    NotIncreasing,
    #[error("{abscissae} abscissae but {values} values")]
    LengthMismatch { abscissae: usize, values: usize },
    #[error("sample contains a non-finite value")]
    NotFinite,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Variable {
    /// `t = 1 / ln(n + 1)`.
    InverseLog,
    /// `t = 1 / (n + 1)`.
    Reciprocal,
}

impl Variable {
    pub fn at(self, n: u64) -> Real {
        let np1 = Real::from_i64(n as i64 + 1);
        match self {
            Variable::InverseLog => Real::one() / np1.ln(),
            Variable::Reciprocal => Real::one() / np1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    Richardson,
    WynnEpsilon,
    LevinU,
}

impl Transform {
    pub const ALL: [Transform; 3] = [Transform::Richardson, Transform::WynnEpsilon, Transform::LevinU];

    pub fn name(self) -> &'static str {
        match self {
            Transform::Richardson => "richardson",
            Transform::WynnEpsilon => "wynn-epsilon",
            Transform::LevinU => "levin-u",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSample {
    ns: Vec<u64>,
    values: Vec<Real>,
}

impl SequenceSample {
    pub fn new(ns: Vec<u64>, values: Vec<Real>) -> Result<Self, AccelerationError> {
        if ns.len() != values.len() {
            return Err(AccelerationError::LengthMismatch {
                abscissae: ns.len(),
                values: values.len(),
            });
        }
        if ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AccelerationError::NotIncreasing);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AccelerationError::NotFinite);
        }
        Ok(SequenceSample { ns, values })
    }

    /// Terms indexed `1, 2, 3, ...`.
    pub fn from_terms(values: Vec<Real>) -> Self {
        let ns = (1..=values.len() as u64).collect();
        SequenceSample { ns, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ns(&self) -> &[u64] {
        &self.ns
    }

    pub fn values(&self) -> &[Real] {
        &self.values
    }

    pub fn abscissae(&self, variable: Variable) -> Vec<Real> {
        self.ns.iter().map(|&n| variable.at(n)).collect()
    }

    fn require(&self, needed: usize) -> Result<(), AccelerationError> {
        if self.len() < needed {
            Err(AccelerationError::InsufficientPoints {
                needed,
                got: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub transform: Transform,
    pub value: Real,
    /// Distance between the two most refined tableau entries.
    pub error_estimate: Real,
    pub tableau: Vec<Vec<Real>>,
}

/// Polynomial extrapolation to `t = 0` through the last `order + 1` points
/// (Neville). Column `j` of the tableau holds the degree-`j` extrapolants.
pub fn richardson(
    sample: &SequenceSample,
    order: usize,
    variable: Variable,
) -> Result<Extrapolation, AccelerationError> {
    sample.require(order + 1)?;
    let start = sample.len() - order - 1;
    let t: Vec<Real> = sample.abscissae(variable)[start..].to_vec();
    let mut tableau = vec![sample.values[start..].to_vec()];
    for j in 1..=order {
        let prev = &tableau[j - 1];
        let col: Vec<Real> = (0..prev.len() - 1)
            .map(|i| {
                // p_{i..i+j}(0) from p_{i+1..i+j}(0) and p_{i..i+j-1}(0)
                &prev[i + 1] + &(&t[i + j] * &(&prev[i + 1] - &prev[i]) / (&t[i] - &t[i + j]))
            })
            .collect();
        tableau.push(col);
    }
    finish(Transform::Richardson, tableau, |tab| {
        let last = tab.last().unwrap()[0].clone();
        let err = match tab.len() {
            1 if sample.len() > 1 => {
                (&sample.values[sample.len() - 1] - &sample.values[sample.len() - 2]).abs()
            }
            1 => Real::zero(),
            k => (&last - tab[k - 2].last().unwrap()).abs(),
        };
        (last, err)
    })
}

fn finish(
    transform: Transform,
    tableau: Vec<Vec<Real>>,
    pick: impl FnOnce(&[Vec<Real>]) -> (Real, Real),
) -> Result<Extrapolation, AccelerationError> {
    let (value, error_estimate) = pick(&tableau);
    if !value.is_finite() {
        return Err(AccelerationError::NotFinite);
    }
    Ok(Extrapolation {
        transform,
        value,
        error_estimate,
        tableau,
    })
}

/// Wynn's epsilon algorithm. Only the even columns are kept in the tableau.
/// A vanishing difference means the sequence has already converged, and the
/// entry above it is returned.
pub fn wynn_epsilon(sample: &SequenceSample) -> Result<Extrapolation, AccelerationError> {
    sample.require(1)?;
    let mut prev: Vec<Real> = vec![Real::zero(); sample.len() + 1];
    let mut cur: Vec<Real> = sample.values.clone();
    let mut even = vec![cur.clone()];
    let mut odd_column = true;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = &cur[i + 1] - &cur[i];
            if diff.is_zero() {
                let converged = if odd_column { cur[i + 1].clone() } else { prev[i + 1].clone() };
                let mut tableau = even;
                tableau.push(vec![converged.clone()]);
                return finish(Transform::WynnEpsilon, tableau, |_| (converged, Real::zero()));
            }
            next.push(&prev[i + 1] + &(Real::one() / diff));
        }
        prev = cur;
        cur = next;
        if !odd_column {
            even.push(cur.clone());
        }
        odd_column = !odd_column;
    }
    finish(Transform::WynnEpsilon, even, |tab| {
        let last = tab.last().unwrap().last().unwrap().clone();
        let err = if tab.len() > 1 {
            (&last - tab[tab.len() - 2].last().unwrap()).abs()
        } else if sample.len() > 1 {
            (&sample.values[sample.len() - 1] - &sample.values[sample.len() - 2]).abs()
        } else {
            Real::zero()
        };
        (last, err)
    })
}

/// Levin's u transformation on the last `order + 2` points, with remainder
/// estimate `w_i = t_i (S_i - S_{i-1}) / (t_i - t_{i-1})`, i.e. `t dS/dt`.
/// For `t = 1 / (n + 1)` and `order = len - 2` this is the classical `u`
/// transform. The model `S_i = S + w_i (c_0 + ... + c_order t_i^order)` is
/// solved with divided differences; column `k` of the tableau uses `k + 1`
/// consecutive remainder estimates.
pub fn levin_u(
    sample: &SequenceSample,
    order: usize,
    variable: Variable,
) -> Result<Extrapolation, AccelerationError> {
    sample.require(order + 2)?;
    let start = sample.len() - order - 2;
    let s = &sample.values[start..];
    let t = sample.abscissae(variable)[start..].to_vec();
    let mut omega = Vec::with_capacity(s.len() - 1);
    for i in 1..s.len() {
        let delta = &s[i] - &s[i - 1];
        if delta.is_zero() {
            // exact from here on
            let v = s[i].clone();
            return finish(Transform::LevinU, vec![s[..=i].to_vec()], |_| (v, Real::zero()));
        }
        omega.push(&t[i] * &delta / (&t[i] - &t[i - 1]));
    }
    let pts = &t[1..];
    let mut num: Vec<Real> = s[1..].iter().zip(&omega).map(|(v, w)| v / w).collect();
    let mut den: Vec<Real> = omega.iter().map(|w| Real::one() / w).collect();
    let mut tableau = vec![s[1..].to_vec()];
    for k in 1..pts.len() {
        num = (0..num.len() - 1)
            .map(|i| (&num[i + 1] - &num[i]) / (&pts[i + k] - &pts[i]))
            .collect();
        den = (0..den.len() - 1)
            .map(|i| (&den[i + 1] - &den[i]) / (&pts[i + k] - &pts[i]))
            .collect();
        tableau.push(num.iter().zip(&den).map(|(a, b)| a / b).collect());
    }
    finish(Transform::LevinU, tableau, |tab| {
        let last = tab.last().unwrap()[0].clone();
        let err = if tab.len() > 1 {
            (&last - tab[tab.len() - 2].last().unwrap()).abs()
        } else {
            Real::zero()
        };
        (last, err)
    })
}

/// How [`estimate_limit`] applies each transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateConfig {
    pub richardson_order: usize,
    pub levin_order: usize,
    pub variable: Variable,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            richardson_order: 2,
            levin_order: 2,
            variable: Variable::InverseLog,
        }
    }
}

pub fn apply(
    transform: Transform,
    sample: &SequenceSample,
    config: &EstimateConfig,
) -> Result<Extrapolation, AccelerationError> {
    match transform {
        Transform::Richardson => richardson(sample, config.richardson_order, config.variable),
        Transform::WynnEpsilon => wynn_epsilon(sample),
        Transform::LevinU => levin_u(sample, config.levin_order, config.variable),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    /// Median over the transforms.
    pub median: Real,
    /// Largest pairwise distance between the transforms.
    pub spread: Real,
    pub estimates: Vec<Extrapolation>,
}

impl LimitEstimate {
    pub fn is_negative(&self) -> bool {
        self.median.is_negative()
    }
}

/// Every transform applied to the sample; at least
/// [`MIN_ESTIMATE_POINTS`] points are required.
pub fn estimate_limit(sample: &SequenceSample, config: &EstimateConfig) -> Result<LimitEstimate, AccelerationError> {
    sample.require(MIN_ESTIMATE_POINTS)?;
    let estimates = Transform::ALL
        .iter()
        .map(|&t| apply(t, sample, config))
        .collect::<Result<Vec<_>, _>>()?;
    let mut values: Vec<Real> = estimates.iter().map(|e| e.value.clone()).collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let median = if values.len() % 2 == 1 {
        values[values.len() / 2].clone()
    } else {
        let k = values.len() / 2;
        (&values[k - 1] + &values[k]) / Real::from_i64(2)
    };
    let spread = &values[values.len() - 1] - &values[0];
    Ok(LimitEstimate {
        median,
        spread,
        estimates,
    })
}

/// Probe sequence `rho(n) ln(n + 1)^exponent` built from decimal
/// correlations.
pub fn probe_sample(ns: &[u64], rhos: &[Real], exponent: &Real) -> Result<SequenceSample, AccelerationError> {
    let q = ns
        .iter()
        .zip(rhos)
        .map(|(&n, r)| probe_value(r, n as usize, exponent))
        .collect();
    SequenceSample::new(ns.to_vec(), q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEstimate {
    pub exponent: Real,
    pub estimate: LimitEstimate,
}

/// Extrapolated constant of the conjectured `rho ~ C ln(N)^(-exponent)`,
/// together with the estimates at `exponent -/+ 0.25`. Conjecture
/// conditional; not a ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct CEstimate {
    pub central: ConstantEstimate,
    pub sensitivity: Vec<ConstantEstimate>,
}

pub fn estimate_c_from_rho(
    ns: &[u64],
    rhos: &[Real],
    exponent: &Real,
    config: &EstimateConfig,
) -> Result<CEstimate, AccelerationError> {
    let quarter = Real::parse("0.25").unwrap();
    let at = |e: Real| -> Result<ConstantEstimate, AccelerationError> {
        let sample = probe_sample(ns, rhos, &e)?;
        Ok(ConstantEstimate {
            estimate: estimate_limit(&sample, config)?,
            exponent: e,
        })
    };
    Ok(CEstimate {
        central: at(exponent.clone())?,
        sensitivity: vec![at(exponent - &quarter)?, at(exponent + &quarter)?],
    })
}

pub fn estimate_c(
    engine: &Engine,
    ensemble: Ensemble,
    ns: &[usize],
    exponent: &Real,
    config: &EstimateConfig,
) -> Result<CEstimate, AccelerationError> {
    if ns.len() < MIN_ESTIMATE_POINTS {
        return Err(AccelerationError::InsufficientPoints {
            needed: MIN_ESTIMATE_POINTS,
            got: ns.len(),
        });
    }
    let sums = engine.moment_sums_many(ensemble, ns)?;
    let rhos = sums
        .iter()
        .map(|s| {
            let text = s.summary(ensemble)?.correlation(60)?;
            Ok(Real::parse(&text).expect("decimal correlation"))
        })
        .collect::<Result<Vec<_>, StatsError>>()?;
    let ns: Vec<u64> = ns.iter().map(|&n| n as u64).collect();
    estimate_c_from_rho(&ns, &rhos, exponent, config)
}
