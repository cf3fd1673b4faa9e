//! Closed-form counts by inclusion–exclusion over the zero runs ("gaps").
//!
//! A string with `p` ones has `p + 1` gaps `g_0, ..., g_p` (the zero runs
//! before, between and after the ones) summing to `x = n - p`. Pinned strings
//! force `g_0, g_p >= 1`; solus strings force every interior gap `>= 1`.
//! Shifting the forced gaps down by one leaves `free` variables in `[0, y]`
//! and `forced` variables in `[0, y - 1]` summing to `x - forced`, whose
//! number is the coefficient of `z^(x - forced)` in
//!
//! ```text
//! (1 - z^(y+1))^free (1 - z^y)^forced / (1 - z)^(free + forced)
//! ```
//!
//! One of the two groups always has at most two members, so the double
//! inclusion–exclusion sum has O(x / y) terms.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::count_tables::JointCountTable;
use crate::ensemble::Ensemble;
use crate::statistics::MomentSums;

/// Lower bounds on the zero runs of strings with a fixed number of ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapProfile {
    ensemble: Ensemble,
    ones: usize,
    free: usize,
    forced: usize,
}

impl GapProfile {
    pub fn new(ensemble: Ensemble, ones: usize) -> Self {
        let (free, forced) = match (ensemble, ones) {
            (Ensemble::Unconstrained, p) => (p + 1, 0),
            (Ensemble::Pinned, 0) => (0, 1),
            (Ensemble::Pinned, p) => (p - 1, 2),
            (Ensemble::Solus, 0) => (1, 0),
            (Ensemble::Solus, p) => (2, p - 1),
            (Ensemble::PinnedSolus, p) => (0, p + 1),
        };
        GapProfile {
            ensemble,
            ones,
            free,
            forced,
        }
    }

    pub fn ensemble(&self) -> Ensemble {
        self.ensemble
    }

    pub fn ones(&self) -> usize {
        self.ones
    }

    /// Gaps allowed to be empty.
    pub fn free(&self) -> usize {
        self.free
    }

    /// Gaps required to hold at least one zero.
    pub fn forced(&self) -> usize {
        self.forced
    }

    /// Per-gap lower bounds `l_0, ..., l_p`.
    pub fn lower_bounds(&self) -> Vec<u8> {
        let p = self.ones;
        (0..=p)
            .map(|j| {
                let end = j == 0 || j == p;
                let interior = j > 0 && j < p;
                u8::from((end && self.ensemble.is_pinned()) || (interior && self.ensemble.is_solus()))
            })
            .collect()
    }
}

/// `C(m, k)`, zero when `m < 0`, `k < 0` or `k > m`.
pub fn binomial(m: i64, k: i64) -> BigInt {
    if m < 0 || k < 0 || k > m {
        return BigInt::zero();
    }
    let k = k.min(m - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= m - i;
        acc /= i + 1;
    }
    acc
}

/// Immutable Pascal triangle `C(m, k)` for `0 <= k <= m <= m_max`.
#[derive(Debug, Clone)]
pub struct Binomials {
    rows: Vec<Vec<BigInt>>,
}

impl Binomials {
    pub fn new(m_max: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(m_max + 1);
        for m in 0..=m_max {
            let mut row = Vec::with_capacity(m + 1);
            row.push(BigInt::one());
            for k in 1..m {
                let prev = &rows[m - 1];
                row.push(&prev[k - 1] + &prev[k]);
            }
            if m > 0 {
                row.push(BigInt::one());
            }
            rows.push(row);
        }
        Binomials { rows }
    }

    pub fn m_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(m, k)` with the zero conventions of [`binomial`].
    ///
    /// # Panics
    ///
    /// If `0 <= k <= m` and `m` exceeds the table size.
    pub fn get(&self, m: i64, k: i64) -> BigInt {
        if m < 0 || k < 0 || k > m {
            return BigInt::zero();
        }
        self.rows[m as usize][k as usize].clone()
    }
}

fn at_most_with(
    binom: &impl Fn(i64, i64) -> BigInt,
    profile: &GapProfile,
    zeros: usize,
    y: i64,
) -> BigInt {
    if y < 0 {
        return BigInt::zero();
    }
    let (a, b) = (profile.free as i64, profile.forced as i64);
    let m = zeros as i64 - b;
    if m < 0 {
        return BigInt::zero();
    }
    let vars = a + b;
    let mut total = BigInt::zero();
    for k in 0..=a {
        let after_free = m - k * (y + 1);
        if after_free < 0 {
            break;
        }
        for j in 0..=b {
            let t = after_free - j * y;
            if t < 0 {
                break;
            }
            let term = binom(a, k) * binom(b, j) * binom(t + vars - 1, vars - 1);
            if (k + j) % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
    }
    total
}

/// Number of ensemble strings of length `n` with exactly `p` ones whose
/// longest zero run is at most `y`.
pub fn count_at_most(ensemble: Ensemble, n: usize, p: usize, y: usize) -> BigInt {
    if p > n {
        return BigInt::zero();
    }
    let profile = GapProfile::new(ensemble, p);
    at_most_with(&binomial, &profile, n - p, y as i64)
}

/// Number of ensemble strings of length `n` with `x` zeros and longest zero
/// run exactly `y`.
pub fn joint_count(ensemble: Ensemble, n: usize, x: usize, y: usize) -> BigInt {
    if x > n || y > x {
        return BigInt::zero();
    }
    let p = n - x;
    count_at_most(ensemble, n, p, y) - count_at_most_signed(ensemble, n, p, y as i64 - 1)
}

fn count_at_most_signed(ensemble: Ensemble, n: usize, p: usize, y: i64) -> BigInt {
    if y < 0 {
        BigInt::zero()
    } else {
        count_at_most(ensemble, n, p, y as usize)
    }
}

/// The whole joint table from gap counts, sharing one Pascal triangle.
pub fn gap_table(ensemble: Ensemble, n: usize) -> JointCountTable {
    let binomials = Binomials::new(n + 1);
    let binom = |m: i64, k: i64| binomials.get(m, k);
    let mut table = JointCountTable::zeroed(ensemble, n);
    for x in 0..=n {
        let profile = GapProfile::new(ensemble, n - x);
        let mut below = BigInt::zero();
        for y in 0..=x {
            let upto = at_most_with(&binom, &profile, x, y as i64);
            table.set(x, y, &upto - &below);
            below = upto;
        }
    }
    table
}

/// `C(t + p, p)` for `t = 0..=len`.
fn binomial_column(p: usize, len: usize) -> Vec<BigInt> {
    let mut col = Vec::with_capacity(len + 1);
    let mut cur = BigInt::one();
    col.push(cur.clone());
    for t in 1..=len {
        cur *= t + p;
        cur /= t;
        col.push(cur.clone());
    }
    col
}

/// `C(m, k)` for `k = 0..=k_max`.
fn binomial_row(m: usize, k_max: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(k_max + 1);
    let mut cur = BigInt::one();
    row.push(cur.clone());
    for k in 1..=k_max.min(m) {
        cur *= m - k + 1;
        cur /= k;
        row.push(cur.clone());
    }
    row
}

/// Contribution to the moment sums of the strings with exactly `p` ones.
///
/// With `A(y)` the number of such strings with longest run at most `y` and
/// `N = A(x)`, the run moments are `sum_y y c(y) = sum_{y<x} (N - A(y))` and
/// `sum_y y^2 c(y) = sum_{y<x} (2y + 1)(N - A(y))`. Summing the
/// inclusion–exclusion expansion of `A(y)` over `y` term by term turns each
/// `(k, j)` term into a strided sum over a single binomial column.
fn ones_layer_sums(ensemble: Ensemble, n: usize, p: usize) -> MomentSums {
    let mut sums = MomentSums::empty(n);
    let x = n - p;
    let profile = GapProfile::new(ensemble, p);
    let (a, b) = (profile.free, profile.forced);
    if x < b {
        return sums;
    }
    let m = x - b;
    let col = binomial_column(p, m);
    let strings = col[m].clone();

    let (big, small, big_is_free) = if a >= b { (a, b, true) } else { (b, a, false) };
    let small_row = binomial_row(small, small);
    let big_row = binomial_row(big, big.min(m + b));

    // sum over r = y + 1 in 1..=x of A(y) and of (2r - 1) A(y)
    let mut sum_a = BigInt::zero();
    let mut sum_wa = BigInt::zero();
    for (kb, big_coef) in big_row.iter().enumerate() {
        for (ks, small_coef) in small_row.iter().enumerate() {
            let (k, j) = if big_is_free { (kb, ks) } else { (ks, kb) };
            let stride = k + j;
            let offset = m + j;
            let (s0, s1) = if stride == 0 {
                (&col[m] * x, &col[m] * (x * x))
            } else {
                let r_max = x.min(offset / stride);
                if r_max == 0 {
                    continue;
                }
                let mut suffix = BigInt::zero();
                let mut weighted = BigInt::zero();
                for r in (1..=r_max).rev() {
                    suffix += &col[offset - stride * r];
                    weighted += &suffix;
                }
                let s1 = (weighted << 1) - &suffix;
                (suffix, s1)
            };
            let mut term0 = s0 * big_coef;
            let mut term1 = s1 * big_coef;
            if ks > 0 {
                term0 *= small_coef;
                term1 *= small_coef;
            }
            if stride % 2 == 0 {
                sum_a += term0;
                sum_wa += term1;
            } else {
                sum_a -= term0;
                sum_wa -= term1;
            }
        }
    }

    let run = &strings * x - sum_a;
    let run_sq = &strings * (x * x) - sum_wa;
    sums.sum_ones = &strings * p;
    sums.sum_ones_sq = &strings * (p * p);
    sums.sum_ones_run = &run * p;
    sums.sum_run = run;
    sums.sum_run_sq = run_sq;
    sums.total = strings;
    sums
}

/// Raw moment sums for one ensemble and length, without building the table.
/// Runs in O(n^2 log n) big-integer additions; the work is split across
/// the number of ones.
pub fn gap_moment_sums(ensemble: Ensemble, n: usize) -> MomentSums {
    (0..=n)
        .into_par_iter()
        .map(|p| ones_layer_sums(ensemble, n, p))
        .reduce(
            || MomentSums::empty(n),
            |mut acc, part| {
                acc.merge(&part);
                acc
            },
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count_tables::{build_tables_up_to, ensemble_size, DEFAULT_RECURSION_CAP};
    use crate::oracle::{brute_moment_sums, brute_table};

    #[test]
    fn count_at_most_examples() {
        assert_eq!(count_at_most(Ensemble::Unconstrained, 2, 1, 1), BigInt::from(2));
        for n in 0..10 {
            assert_eq!(count_at_most(Ensemble::Unconstrained, n, n, 0), BigInt::one());
        }
        assert_eq!(count_at_most(Ensemble::PinnedSolus, 3, 1, 1), BigInt::one());
    }

    #[test]
    fn joint_count_examples() {
        assert_eq!(joint_count(Ensemble::Unconstrained, 3, 2, 2), BigInt::from(2));
        for n in 0..12 {
            assert_eq!(joint_count(Ensemble::Unconstrained, n, n, n), BigInt::one());
        }
        assert_eq!(joint_count(Ensemble::PinnedSolus, 3, 3, 3), BigInt::one());
    }

    #[test]
    fn profile_bounds() {
        assert_eq!(GapProfile::new(Ensemble::Pinned, 3).lower_bounds(), vec![1, 0, 0, 1]);
        assert_eq!(GapProfile::new(Ensemble::Solus, 3).lower_bounds(), vec![0, 1, 1, 0]);
        assert_eq!(GapProfile::new(Ensemble::PinnedSolus, 2).lower_bounds(), vec![1, 1, 1]);
        assert_eq!(GapProfile::new(Ensemble::Pinned, 0).lower_bounds(), vec![1]);
        for e in Ensemble::ALL {
            for p in 0..8 {
                let g = GapProfile::new(e, p);
                let forced = g.lower_bounds().iter().filter(|&&l| l == 1).count();
                assert_eq!(forced, g.forced());
                assert_eq!(g.free() + g.forced(), p + 1);
                assert!(g.free().min(g.forced()) <= 2);
            }
        }
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert!(binomial(-1, 0).is_zero());
        assert!(binomial(3, 4).is_zero());
        assert!(binomial(3, -1).is_zero());
        let t = Binomials::new(30);
        for m in -2..=30 {
            for k in -2..=32 {
                assert_eq!(t.get(m, k), binomial(m, k), "C({m},{k})");
            }
        }
    }

    #[test]
    fn gap_tables_match_brute_force() {
        for e in Ensemble::ALL {
            for n in 0..=16 {
                assert_eq!(gap_table(e, n), brute_table(e, n).unwrap(), "{e} n={n}");
            }
        }
    }

    #[test]
    fn gap_tables_match_recursion_up_to_200() {
        for e in Ensemble::ALL {
            let tables = build_tables_up_to(e, 200, DEFAULT_RECURSION_CAP).unwrap();
            for (n, table) in tables.iter().enumerate() {
                assert_eq!(&gap_table(e, n), table, "{e} n={n}");
            }
        }
    }

    #[test]
    fn at_most_is_monotone_and_saturates() {
        for e in Ensemble::ALL {
            for n in 0..=30 {
                let mut total = BigInt::zero();
                for p in 0..=n {
                    let mut prev = BigInt::zero();
                    for y in 0..=n {
                        let cur = count_at_most(e, n, p, y);
                        assert!(cur >= prev, "{e} n={n} p={p} y={y}");
                        prev = cur;
                    }
                    total += prev;
                }
                assert_eq!(total, ensemble_size(e, n), "{e} n={n}");
            }
        }
    }

    #[test]
    fn unconstrained_rows_sum_to_binomials() {
        for n in 0..=40usize {
            for x in 0..=n {
                let row: BigInt = (0..=x).map(|y| joint_count(Ensemble::Unconstrained, n, x, y)).sum();
                assert_eq!(row, binomial(n as i64, x as i64));
            }
        }
    }

    #[test]
    fn fast_moment_sums_match_brute_force() {
        for e in Ensemble::ALL {
            for n in 0..=18 {
                assert_eq!(gap_moment_sums(e, n), brute_moment_sums(e, n).unwrap(), "{e} n={n}");
            }
        }
    }

    #[test]
    fn fast_moment_sums_match_table_sums() {
        for e in Ensemble::ALL {
            for n in [25, 64, 97, 150] {
                assert_eq!(gap_moment_sums(e, n), gap_table(e, n).moment_sums(), "{e} n={n}");
            }
        }
    }
}
