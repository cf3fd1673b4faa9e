//! Cross-check of every counting path against exhaustive enumeration.

use std::collections::HashSet;

use crate::count_tables::{build_table, moment_sums_up_to, DEFAULT_RECURSION_CAP};
use crate::ensemble::{Ensemble, Family};
use crate::gap_counts::{gap_moment_sums, gap_table};
use crate::oracle::{
    brute_moment_sums, brute_table, composition_to_string, compositions, string_to_composition, BitString,
    OracleError, ORACLE_CAP,
};
use crate::series::{max_part_moments_up_to, parts_moments};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub check: &'static str,
    pub ensemble: Ensemble,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub max_n: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "OK: {} ensembles × {} lengths × {{table, moments, bijection}}",
            Ensemble::ALL.len(),
            self.max_n
        )
    }
}

/// Lengths `1..=max_n` for all four ensembles.
pub fn verify(max_n: usize) -> Result<VerifyReport, OracleError> {
    if max_n > ORACLE_CAP {
        return Err(OracleError::CapExceeded { n: max_n, cap: ORACLE_CAP });
    }
    let mut report = VerifyReport { max_n, mismatches: Vec::new() };
    for e in Ensemble::ALL {
        let swept = moment_sums_up_to(e, max_n, DEFAULT_RECURSION_CAP).expect("below recursion cap");
        let family = Family::ALL.into_iter().find(|f| f.ensemble() == e);
        let series = family.map(|f| max_part_moments_up_to(f, max_n));
        for n in 1..=max_n {
            let mut fail = |check| report.mismatches.push(Mismatch { check, ensemble: e, n });
            let brute = brute_table(e, n)?;
            if build_table(e, n).expect("below recursion cap") != brute || gap_table(e, n) != brute {
                fail("table");
            }
            let sums = brute_moment_sums(e, n)?;
            let moments_ok = swept[n] == sums && gap_moment_sums(e, n) == sums && brute.moment_sums() == sums;
            let series_ok = match (family, &series) {
                (Some(f), Some(s)) => match sums.summary(e) {
                    Ok(exact) => {
                        let pm = parts_moments(f, n).expect("n >= 1");
                        s[n - 1].mu == exact.mu && s[n - 1].sigma2 == exact.sigma2 && pm.m == exact.m && pm.s2 == exact.s2
                    }
                    Err(_) => false,
                },
                _ => true,
            };
            if !moments_ok || !series_ok {
                fail("moments");
            }
            if !bijection_ok(e, n)? {
                fail("bijection");
            }
        }
    }
    Ok(report)
}

/// Round trip and statistic shift for every member; for the two composition
/// families, the image is exactly the family's compositions of `n + 1`.
fn bijection_ok(e: Ensemble, n: usize) -> Result<bool, OracleError> {
    let mut image = HashSet::new();
    for mask in 0..1u64 << n {
        let b = BitString::from_mask(mask, n);
        if !e.admits(b.bits()) {
            continue;
        }
        let c = string_to_composition(&b);
        if composition_to_string(&c) != b
            || c.total() != n + 1
            || c.num_parts() != b.ones() + 1
            || c.max_part() != b.longest_zero_run() + 1
        {
            return Ok(false);
        }
        image.insert(c);
    }
    let expected: Option<HashSet<_>> = match e {
        Ensemble::Unconstrained => Some(compositions(n + 1)?.into_iter().collect()),
        Ensemble::PinnedSolus => Some(compositions(n + 1)?.into_iter().filter(|c| c.is_one_free()).collect()),
        _ => None,
    };
    Ok(expected.is_none_or(|set| set == image))
}
