//! Brute-force ground truth for small lengths: exhaustive enumeration of
//! bitstrings and compositions, and the waiting-time bijection between them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::count_tables::JointCountTable;
use crate::ensemble::Ensemble;
use crate::statistics::{MomentSums, MomentSummary, StatsError};

/// Largest length the oracle will enumerate.
pub const ORACLE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("oracle enumeration is capped at n = {cap}, got n = {n}")]
    CapExceeded { n: usize, cap: usize },
    #[error("invalid bit `{0}`; expected 0 or 1")]
    InvalidBit(char),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    /// The `len`-bit string whose first bit is the most significant bit of
    /// `mask`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        BitString {
            bits: (0..len).rev().map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn zeros(&self) -> usize {
        self.len() - self.ones()
    }

    pub fn longest_zero_run(&self) -> usize {
        self.bits
            .split(|&b| b)
            .map(|run| run.len())
            .max()
            .unwrap_or(0)
    }

    pub fn is_pinned(&self) -> bool {
        matches!((self.bits.first(), self.bits.last()), (Some(false), Some(false)))
    }

    pub fn is_solus(&self) -> bool {
        !self.bits.windows(2).any(|w| w[0] && w[1])
    }
}

impl FromStr for BitString {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(OracleError::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString::new)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// An ordered sequence of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    /// Returns `None` if `parts` is empty or contains a zero.
    pub fn new(parts: Vec<usize>) -> Option<Self> {
        if parts.is_empty() || parts.contains(&0) {
            None
        } else {
            Some(Composition { parts })
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The integer being composed.
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn max_part(&self) -> usize {
        self.parts.iter().copied().max().unwrap_or(0)
    }

    pub fn is_one_free(&self) -> bool {
        self.parts.iter().all(|&p| p >= 2)
    }
}

/// Maps `b` to the composition of `b.len() + 1` whose parts are the waiting
/// times between consecutive `1`s of `b` followed by an extra `1`.
pub fn string_to_composition(b: &BitString) -> Composition {
    let mut parts = Vec::with_capacity(b.ones() + 1);
    let mut wait = 0;
    for &bit in b.bits().iter().chain(std::iter::once(&true)) {
        wait += 1;
        if bit {
            parts.push(wait);
            wait = 0;
        }
    }
    Composition { parts }
}

/// Inverse of [`string_to_composition`].
pub fn composition_to_string(c: &Composition) -> BitString {
    let mut bits = Vec::with_capacity(c.total());
    for &part in c.parts() {
        bits.extend(std::iter::repeat_n(false, part - 1));
        bits.push(true);
    }
    bits.pop();
    BitString::new(bits)
}

/// All `2^(total - 1)` compositions of `total`, by increasing bit mask of
/// the corresponding string.
pub fn compositions(total: usize) -> Result<Vec<Composition>, OracleError> {
    if total == 0 {
        return Ok(Vec::new());
    }
    let n = total - 1;
    check_cap(n)?;
    Ok((0..1u64 << n)
        .map(|mask| string_to_composition(&BitString::from_mask(mask, n)))
        .collect())
}

fn check_cap(n: usize) -> Result<(), OracleError> {
    if n > ORACLE_CAP {
        Err(OracleError::CapExceeded { n, cap: ORACLE_CAP })
    } else {
        Ok(())
    }
}

/// Calls `visit(ones, longest_zero_run)` for each ensemble member of length
/// `n`, in lexicographic order.
fn for_each_member(ensemble: Ensemble, n: usize, mut visit: impl FnMut(usize, usize)) {
    let full: u64 = (1u64 << n) - 1;
    for mask in 0..=full {
        if ensemble.is_pinned() && (n == 0 || mask & 1 == 1 || mask >> (n - 1) & 1 == 1) {
            continue;
        }
        if ensemble.is_solus() && mask & (mask >> 1) != 0 {
            continue;
        }
        let mut zeros = !mask & full;
        let mut run = 0;
        while zeros != 0 {
            zeros &= zeros << 1;
            run += 1;
        }
        visit(mask.count_ones() as usize, run);
    }
}

/// The joint count table by exhaustive enumeration.
pub fn brute_table(ensemble: Ensemble, n: usize) -> Result<JointCountTable, OracleError> {
    check_cap(n)?;
    let mut counts = vec![vec![0u64; n + 1]; n + 1];
    for_each_member(ensemble, n, |ones, run| counts[n - ones][run] += 1);
    let mut table = JointCountTable::zeroed(ensemble, n);
    for (x, row) in counts.iter().enumerate() {
        for (y, &c) in row.iter().enumerate().take(x + 1) {
            table.set(x, y, BigInt::from(c));
        }
    }
    Ok(table)
}

/// Raw moment sums by direct summation over strings.
pub fn brute_moment_sums(ensemble: Ensemble, n: usize) -> Result<MomentSums, OracleError> {
    check_cap(n)?;
    let mut acc = [0u128; 6];
    for_each_member(ensemble, n, |ones, run| {
        let (x, y) = (ones as u128, run as u128);
        acc[0] += 1;
        acc[1] += x;
        acc[2] += x * x;
        acc[3] += y;
        acc[4] += y * y;
        acc[5] += x * y;
    });
    Ok(MomentSums {
        n,
        total: acc[0].into(),
        sum_ones: acc[1].into(),
        sum_ones_sq: acc[2].into(),
        sum_run: acc[3].into(),
        sum_run_sq: acc[4].into(),
        sum_ones_run: acc[5].into(),
    })
}

#[derive(Debug, thiserror::Error)]
pub enum BruteMomentsError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Exact moments by direct summation.
pub fn brute_moments(ensemble: Ensemble, n: usize) -> Result<MomentSummary, BruteMomentsError> {
    Ok(brute_moment_sums(ensemble, n)?.summary(ensemble)?)
}
