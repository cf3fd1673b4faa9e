//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines reach stdout; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use compcov::acceleration::{self, EstimateConfig, SequenceSample, Transform, Variable};
use compcov::asymptotics::{predicted_max_mean, predicted_max_var};
use compcov::cli::verify;
use compcov::count_tables::{moment_sums_up_to, DEFAULT_RECURSION_CAP};
use compcov::gap_counts::gap_moment_sums;
use compcov::real::Real;
use compcov::series::{max_part_moments_up_to, parts_moments};
use compcov::statistics::{exy_numerator_bitstring, exy_numerator_composition, Engine, Method};
use compcov::{Ensemble, ExactRational, Family, MomentSummary};

const TABLE_NS: [usize; 14] = [100, 200, 300, 400, 500, 600, 700, 800, 900, 1000, 1100, 1200, 1300, 1400];

// (n, unconstrained, pinned solus)
const TABLE_1: [(usize, &str, &str); 14] = [
    (100, "-0.441772", "-0.530911"),
    (200, "-0.361888", "-0.439875"),
    (300, "-0.319761", "-0.391011"),
    (400, "-0.292051", "-0.358533"),
    (500, "-0.271797", "-0.334641"),
    (600, "-0.256049", "-0.315973"),
    (700, "-0.243295", "-0.300791"),
    (800, "-0.232656", "-0.288084"),
    (900, "-0.223581", "-0.277216"),
    (1000, "-0.215704", "-0.267762"),
    (1100, "-0.208773", "-0.259428"),
    (1200, "-0.202606", "-0.251998"),
    (1300, "-0.197066", "-0.245313"),
    (1400, "-0.192050", "-0.239249"),
];

// (n, pinned, solus)
const TABLE_2: [(usize, &str, &str); 14] = [
    (100, "-0.445112", "-0.525562"),
    (200, "-0.363340", "-0.437637"),
    (300, "-0.320638", "-0.389680"),
    (400, "-0.292661", "-0.357617"),
    (500, "-0.272255", "-0.333956"),
    (600, "-0.256411", "-0.315434"),
    (700, "-0.243592", "-0.300351"),
    (800, "-0.232906", "-0.287715"),
    (900, "-0.223795", "-0.276900"),
    (1000, "-0.215891", "-0.267488"),
    (1100, "-0.208938", "-0.259187"),
    (1200, "-0.202753", "-0.251783"),
    (1300, "-0.197198", "-0.245119"),
    (1400, "-0.192170", "-0.239074"),
];

type Outcome = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Outcome);

/// Exact summaries for every ensemble at the table lengths, by gap counts.
fn table_summaries() -> &'static BTreeMap<Ensemble, Vec<MomentSummary>> {
    static CELL: OnceLock<BTreeMap<Ensemble, Vec<MomentSummary>>> = OnceLock::new();
    CELL.get_or_init(|| {
        let engine = Engine::with_method(Method::Gap);
        Ensemble::ALL
            .iter()
            .map(|&e| {
                let sums = engine.moment_sums_many(e, &TABLE_NS).expect("gap path");
                (e, sums.iter().map(|s| s.summary(e).expect("non-degenerate")).collect())
            })
            .collect()
    })
}

fn compare_table(rows: &[(usize, &str, &str)], cols: [Ensemble; 2]) -> Outcome {
    let summaries = table_summaries();
    let mut bad = Vec::new();
    for (i, &(n, a, b)) in rows.iter().enumerate() {
        for (e, published) in cols.iter().zip([a, b]) {
            let got = summaries[e][i].correlation(6).map_err(|e| e.to_string())?;
            if got != published {
                bad.push(format!("{e} n={n}: {got} != {published}"));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{} of {} values match", rows.len() * 2, rows.len() * 2))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_1() -> Outcome {
    compare_table(&TABLE_1, [Ensemble::Unconstrained, Ensemble::PinnedSolus])
}

fn criterion_2() -> Outcome {
    compare_table(&TABLE_2, [Ensemble::Pinned, Ensemble::Solus])
}

fn criterion_3() -> Outcome {
    let cases: [(Family, [(usize, &str); 4]); 2] = [
        (
            Family::Unrestricted,
            [(5, "-0.890799"), (11, "-0.752444"), (21, "-0.654958"), (51, "-0.530128")],
        ),
        (
            Family::OneFree,
            [(7, "-0.945611"), (11, "-0.860467"), (21, "-0.763395"), (51, "-0.629068")],
        ),
    ];
    let engine = Engine::default();
    let mut bad = Vec::new();
    for (family, list) in cases {
        for (total, published) in list {
            let got = engine
                .summary(family.ensemble(), total - 1)
                .and_then(|s| s.correlation(6))
                .map_err(|e| e.to_string())?;
            if got != published {
                bad.push(format!("{family} N={total}: {got} != {published}"));
            }
        }
    }
    if bad.is_empty() {
        Ok("8 of 8 values match".into())
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_4() -> Outcome {
    let u_bits = [0, 2, 11, 40, 122, 338, 881, 2202, 5337, 12634];
    let u_comp = [1, 4, 14, 42, 115, 296, 732, 1757, 4125, 9516];
    let ps_bits = [0, 0, 1, 4, 10, 26, 54, 118, 230, 458, 864, 1632];
    let f_comp = [0, 2, 3, 8, 17, 34, 70, 131, 255, 466, 868, 1565];
    let err = |e: compcov::StatsError| e.to_string();
    let mut bad = Vec::new();
    let mut terms = 0;
    let mut check = |name: &str, published: &[i64], got: Vec<compcov::ExactInteger>| {
        terms += published.len();
        let expect: Vec<compcov::ExactInteger> = published.iter().map(|&v| v.into()).collect();
        if got != expect {
            bad.push(format!("{name}: {got:?}"));
        }
    };
    check(
        "bitstring unconstrained",
        &u_bits,
        (1..=10).map(|n| exy_numerator_bitstring(Ensemble::Unconstrained, n)).collect::<Result<_, _>>().map_err(err)?,
    );
    check(
        "composition unrestricted",
        &u_comp,
        (1..=10).map(|t| exy_numerator_composition(Family::Unrestricted, t)).collect::<Result<_, _>>().map_err(err)?,
    );
    check(
        "bitstring pinned solus",
        &ps_bits,
        (1..=12).map(|n| exy_numerator_bitstring(Ensemble::PinnedSolus, n)).collect::<Result<_, _>>().map_err(err)?,
    );
    check(
        "composition one-free",
        &f_comp,
        (1..=12).map(|t| exy_numerator_composition(Family::OneFree, t)).collect::<Result<_, _>>().map_err(err)?,
    );
    if bad.is_empty() {
        Ok(format!("4 sequences, {terms} terms"))
    } else {
        Err(bad.join("; "))
    }
}

fn rat(p: i64, q: i64) -> ExactRational {
    ExactRational::new(p.into(), q.into())
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    let cases = [
        (Family::Unrestricted, 4, [rat(2, 1), rat(1, 1), rat(27, 16), rat(247, 256)], rat(-7, 8)),
        (Family::OneFree, 6, [rat(5, 4), rat(7, 16), rat(13, 4), rat(27, 16)], rat(-13, 16)),
    ];
    for (family, n, expect, cov) in cases {
        let parts = parts_moments(family, n).map_err(|e| e.to_string())?;
        let maxes = max_part_moments_up_to(family, n).pop().unwrap();
        let from_series = [parts.m, parts.s2, maxes.mu, maxes.sigma2];
        let s = Engine::default().summary(family.ensemble(), n).map_err(|e| e.to_string())?;
        let from_tables = [s.m.clone(), s.s2.clone(), s.mu.clone(), s.sigma2.clone()];
        if from_series != expect || from_tables != expect {
            bad.push(format!("{family} n={n}: series {from_series:?}, tables {from_tables:?}"));
        }
        if s.covariance != cov || s.composition_covariance() != cov {
            bad.push(format!("{family} N={}: covariance {}", n + 1, s.covariance));
        }
    }
    if bad.is_empty() {
        Ok("both moment quadruples and both covariances exact".into())
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let report = verify(14).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !report.ok() {
        return Err(format!("{:?}", report.mismatches));
    }
    if elapsed > Duration::from_secs(120) {
        return Err(format!("took {elapsed:.1?}"));
    }
    Ok(format!("{} in {elapsed:.1?}", report.summary()))
}

fn criterion_7() -> Outcome {
    const TOP: usize = 300;
    let mut bad = Vec::new();
    for e in Ensemble::ALL {
        let swept = moment_sums_up_to(e, TOP, DEFAULT_RECURSION_CAP).map_err(|e| e.to_string())?;
        for (n, sums) in swept.iter().enumerate() {
            if gap_moment_sums(e, n) != *sums {
                bad.push(format!("{e} n={n}"));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("4 ensembles × n = 0..={TOP}, all six numerators"))
    } else {
        Err(bad.join(", "))
    }
}

/// The prediction is for the maximum part of a composition of `n`, so it is
/// compared with `1 + E[longest run]` over strings of length `n - 1`.
fn criterion_8() -> Outcome {
    let family = Family::Unrestricted;
    let moments = max_part_moments_up_to(family, 1400);
    let var = predicted_max_var(family).value;
    let (mut worst_mean, mut worst_literal, mut worst_var) = (0f64, 0f64, 0f64);
    let mut var_at = 0;
    for n in 500..=1400 {
        let m = &moments[n - 2];
        let mean = predicted_max_mean(family, n).map_err(|e| e.to_string())?.value;
        let run = Real::from_rational(&m.mu);
        worst_mean = worst_mean.max((&(&run + &Real::one()) - &mean).abs().to_f64());
        worst_literal = worst_literal.max((&run - &mean).abs().to_f64());
        let v = (&Real::from_rational(&m.sigma2) - &var).abs().to_f64();
        if v > worst_var {
            worst_var = v;
            var_at = n;
        }
    }
    let detail = format!(
        "max |mean residual| {worst_mean:.6} (maximum part; {worst_literal:.3} if read as the longest run), \
         max |variance residual| {worst_var:.6} at n={var_at}, bound 0.02"
    );
    if worst_mean < 0.02 && worst_var < 0.02 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9() -> Outcome {
    let summaries = table_summaries();
    let config = EstimateConfig::default();
    let exponent = Real::parse("2.5").unwrap();
    let ns: Vec<u64> = TABLE_NS.iter().map(|&n| n as u64).collect();
    let mut notes = Vec::new();
    let mut bad = Vec::new();
    for e in Ensemble::ALL {
        let rhos: Vec<Real> = summaries[&e]
            .iter()
            .map(|s| Real::parse(&s.correlation(60).unwrap()).unwrap())
            .collect();
        let sample = acceleration::probe_sample(&ns, &rhos, &exponent).map_err(|e| e.to_string())?;
        if let Some(i) = sample.values().iter().position(|q| !q.is_negative()) {
            bad.push(format!("{e}: q({}) >= 0", ns[i]));
        }
        if rhos.windows(2).any(|w| w[1].abs() >= w[0].abs()) {
            bad.push(format!("{e}: |rho| not strictly decreasing"));
        }
        let est = acceleration::estimate_c_from_rho(&ns, &rhos, &exponent, &config).map_err(|e| e.to_string())?;
        if !est.central.estimate.is_negative() {
            bad.push(format!("{e}: median {}", est.central.estimate.median.to_fixed(6)));
        }
        notes.push(format!(
            "{e} C~{} (spread {})",
            est.central.estimate.median.to_fixed(3),
            est.central.estimate.spread.to_fixed(3)
        ));
    }
    if bad.is_empty() {
        Ok(format!("q < 0, |rho| decreasing; extrapolated, conjecture-conditional: {}", notes.join(", ")))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_10() -> Outcome {
    let mut sum = Real::zero();
    let partial: Vec<Real> = (0..12)
        .map(|k| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            sum = &sum + &(Real::from_i64(sign) / Real::from_i64(k + 1));
            sum.clone()
        })
        .collect();
    let eps = acceleration::wynn_epsilon(&SequenceSample::from_terms(partial)).map_err(|e| e.to_string())?;
    let ln2_err = (&eps.value - &Real::ln2()).abs().to_f64();
    if ln2_err >= 1e-8 {
        return Err(format!("epsilon error {ln2_err:e}"));
    }
    let c = Real::parse("-0.123456789").unwrap();
    let constant = SequenceSample::new((100..=1400).step_by(100).collect(), vec![c.clone(); 14]).unwrap();
    let config = EstimateConfig::default();
    for t in Transform::ALL {
        let v = acceleration::apply(t, &constant, &config).map_err(|e| e.to_string())?.value;
        if v != c {
            return Err(format!("{} not exact on constants", t.name()));
        }
    }
    let line: Vec<Real> = (100..=1400)
        .step_by(100)
        .map(|n| Real::from_i64(-30) + Real::from_i64(50) * Variable::InverseLog.at(n))
        .collect();
    let line = SequenceSample::new((100..=1400).step_by(100).collect(), line).unwrap();
    let rich = acceleration::richardson(&line, 1, Variable::InverseLog).map_err(|e| e.to_string())?;
    let lin_err = (&rich.value + &Real::from_i64(30)).abs().to_f64();
    if lin_err > 1e-60 {
        return Err(format!("Richardson off by {lin_err:e} on linear data"));
    }
    Ok(format!("ln 2 to {ln2_err:.1e}; constants exact; linear-in-t exact to {lin_err:.0e}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "table 1 regression", criterion_1),
        (2, "table 2 regression", criterion_2),
        (3, "small-N correlation lists", criterion_3),
        (4, "numerator sequences", criterion_4),
        (5, "exact rational spot checks", criterion_5),
        (6, "oracle equivalence n <= 14", criterion_6),
        (7, "recursion and gap counts agree n <= 300", criterion_7),
        (8, "asymptotic residuals 500 <= n <= 1400", criterion_8),
        (9, "conjecture probe", criterion_9),
        (10, "acceleration kernels", criterion_10),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2}: {name} [{secs:.1}s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2}: {name} [{secs:.1}s] {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
