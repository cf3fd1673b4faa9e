//! Joint count tables `counts(x, y)`: the number of strings of length `n` in an
//! ensemble with exactly `x` zeros whose longest run of zeros is exactly `y`.
//!
//! The tables are produced by the first-`1` decomposition recurrence
//!
//! ```text
//! H(n, x, y) = sum_{i=kappa}^{y-1} H(n-i-1, x-i, y) + sum_{j=0}^{y} H(n-y-1, x-y, j)
//! ```
//!
//! Every term on the right has exactly one fewer `1` than the left, so the
//! computation sweeps layers indexed by the number of ones `p = n - x`; a
//! layer only depends on its predecessor. Layer 0 holds the all-zero strings,
//! layer 1 is filled from [`lambda`], and layers `p >= 2` use the recurrence
//! with prefix sums along `x` (for the `i`-sum) and along `y` (for the
//! `j`-sum), so each entry costs O(1) big-integer additions.
//!
//! Solus strings do not satisfy the recurrence directly. They are split by
//! their first bit: a solus string is either empty or starts with `0`
//! ("zero-led"), or it is `1` followed by a zero-led string. Zero-led solus
//! strings obey the `kappa = 1` recurrence.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ensemble::Ensemble;
use crate::series::fibonacci_d;
use crate::statistics::MomentSums;

/// Largest length the recursion path accepts unless a caller overrides it.
pub const DEFAULT_RECURSION_CAP: usize = 600;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("n = {n} exceeds the recursion cap of {cap}; use the gap-count method")]
    CapExceeded { n: usize, cap: usize },
}

/// Exact counts for one ensemble and length, indexed by `(x, y)` with
/// `0 <= y <= x <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointCountTable {
    ensemble: Ensemble,
    n: usize,
    rows: Vec<Vec<BigInt>>,
}

impl JointCountTable {
    pub fn zeroed(ensemble: Ensemble, n: usize) -> Self {
        let rows = (0..=n).map(|x| vec![BigInt::zero(); x + 1]).collect();
        JointCountTable { ensemble, n, rows }
    }

    /// Rebuilds a table from its rows; `None` unless row `x` has `x + 1`
    /// entries for every `x <= n`.
    pub fn from_rows(ensemble: Ensemble, n: usize, rows: Vec<Vec<BigInt>>) -> Option<Self> {
        let shaped = rows.len() == n + 1 && rows.iter().enumerate().all(|(x, r)| r.len() == x + 1);
        shaped.then_some(JointCountTable { ensemble, n, rows })
    }

    pub fn ensemble(&self) -> Ensemble {
        self.ensemble
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The count at `(x, y)`, or `None` outside the triangle.
    pub fn get(&self, x: usize, y: usize) -> Option<&BigInt> {
        self.rows.get(x).and_then(|row| row.get(y))
    }

    /// The count at `(x, y)`; zero outside the triangle.
    pub fn count(&self, x: usize, y: usize) -> BigInt {
        self.get(x, y).cloned().unwrap_or_default()
    }

    pub(crate) fn set(&mut self, x: usize, y: usize, value: BigInt) {
        self.rows[x][y] = value;
    }

    pub(crate) fn set_row(&mut self, x: usize, row: Vec<BigInt>) {
        debug_assert_eq!(row.len(), x + 1);
        self.rows[x] = row;
    }

    pub fn row(&self, x: usize) -> &[BigInt] {
        &self.rows[x]
    }

    /// Non-zero entries as `(x, y, count)`, ordered by `x` then `y`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.rows.iter().enumerate().flat_map(|(x, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(y, c)| (x, y, c))
        })
    }

    pub fn total(&self) -> BigInt {
        self.rows.iter().flatten().sum()
    }

    /// Number of strings with exactly `x` zeros.
    pub fn zeros_marginal(&self, x: usize) -> BigInt {
        self.rows[x].iter().sum()
    }

    pub fn moment_sums(&self) -> MomentSums {
        let mut sums = MomentSums::empty(self.n);
        for (x, row) in self.rows.iter().enumerate() {
            sums.add_row(self.n - x, row);
        }
        sums
    }
}

/// Number of strings of length `n` in the ensemble.
pub fn ensemble_size(ensemble: Ensemble, n: usize) -> BigInt {
    match ensemble {
        Ensemble::Unconstrained => BigInt::one() << n,
        Ensemble::PinnedSolus => fibonacci_d(n),
        Ensemble::Solus => fibonacci_d(n + 2),
        Ensemble::Pinned => match n {
            0 => BigInt::zero(),
            1 => BigInt::one(),
            _ => BigInt::one() << (n - 2),
        },
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1).div_euclid(b)
}

/// Support indicator for `counts(x, y)`.
///
/// For the unconstrained and pinned solus ensembles this is the published
/// indicator `floor(n / (n - x + 1)) <= y <= x` (respectively `... <= y < x`
/// or `x = y = n`). For pinned and solus strings it is the exact support,
/// derived from the gap structure: with `p = n - x` ones, pinned strings need
/// both end gaps non-empty and solus strings need every interior gap
/// non-empty. The smallest attainable longest run is `ceil(x / (p + 1))`,
/// which equals `floor(n / (p + 1))` whenever `x > 0`.
pub fn epsilon(ensemble: Ensemble, n: i64, x: i64, y: i64) -> u8 {
    if !(0 <= y && y <= x && x <= n) {
        return 0;
    }
    let ones = n - x;
    let min_run = n / (ones + 1);
    let hit = match ensemble {
        Ensemble::Unconstrained => min_run <= y,
        Ensemble::PinnedSolus => (min_run <= y && y < x) || (x == n && y == n),
        Ensemble::Pinned => {
            if ones == 0 {
                y == n && n >= 1
            } else {
                y >= 1 && ceil_div(x, ones + 1) <= y && y < x
            }
        }
        Ensemble::Solus => match ones {
            0 => y == n,
            1 => min_run <= y,
            _ => x >= ones - 1 && y >= 1 && ceil_div(x, ones + 1) <= y && y <= x - (ones - 2),
        },
    };
    u8::from(hit)
}

/// Number of strings `0^a 1 0^b` with `a + b = n - 1`, `a >= lead_min`,
/// `b >= trail_min` and `max(a, b) = y`.
fn single_one_count(n: i64, y: i64, lead_min: i64, trail_min: i64) -> u8 {
    if n < 1 || y < 0 || y > n - 1 {
        return 0;
    }
    let rest = n - 1 - y;
    let lead_is_max = y >= lead_min && rest >= trail_min && rest <= y;
    let trail_is_max = y >= trail_min && rest >= lead_min && rest <= y;
    let both = lead_is_max && trail_is_max && rest == y;
    u8::from(lead_is_max) + u8::from(trail_is_max) - u8::from(both)
}

/// Count of strings with a single `1` (so `x = n - 1` zeros) whose longest
/// zero run is `y`.
///
/// Unconstrained and solus strings allow the `1` anywhere; pinned strings
/// keep it off both ends, which removes the `y = n - 1` strings.
pub fn lambda(ensemble: Ensemble, n: i64, y: i64) -> u8 {
    let edge = i64::from(ensemble.is_pinned());
    single_one_count(n, y, edge, edge)
}

/// Strings handled by one run of the layered recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Unconstrained,
    Pinned,
    PinnedSolus,
    /// Solus strings that are empty or start with `0`.
    ZeroLed,
}

impl Kind {
    fn kappa(self) -> usize {
        match self {
            Kind::Unconstrained | Kind::Pinned => 0,
            Kind::PinnedSolus | Kind::ZeroLed => 1,
        }
    }

    fn lead_min(self) -> i64 {
        match self {
            Kind::Unconstrained => 0,
            _ => 1,
        }
    }

    fn trail_min(self) -> i64 {
        match self {
            Kind::Pinned | Kind::PinnedSolus => 1,
            _ => 0,
        }
    }

    fn admits_empty(self) -> bool {
        matches!(self, Kind::Unconstrained | Kind::ZeroLed)
    }

    /// Whether the all-ones strings with two or more ones belong to the kind.
    fn admits_all_ones(self) -> bool {
        matches!(self, Kind::Unconstrained)
    }

    fn gate(self) -> Option<Ensemble> {
        match self {
            Kind::Unconstrained => Some(Ensemble::Unconstrained),
            Kind::Pinned => Some(Ensemble::Pinned),
            Kind::PinnedSolus => Some(Ensemble::PinnedSolus),
            Kind::ZeroLed => None,
        }
    }
}

/// One layer: `rows[x][y]` for strings with a fixed number of ones.
type Layer = Vec<Vec<BigInt>>;

fn first_layer(kind: Kind, x_max: usize) -> Layer {
    (0..=x_max)
        .map(|x| {
            let mut row = vec![BigInt::zero(); x + 1];
            if x > 0 || kind.admits_empty() {
                row[x] = BigInt::one();
            }
            row
        })
        .collect()
}

fn second_layer(kind: Kind, x_max: usize) -> Layer {
    (0..=x_max)
        .map(|x| {
            let n = x as i64 + 1;
            (0..=x)
                .map(|y| BigInt::from(single_one_count(n, y as i64, kind.lead_min(), kind.trail_min())))
                .collect()
        })
        .collect()
}

/// Applies the recurrence to obtain layer `p` (`p >= 2`) from layer `p - 1`.
fn next_layer(kind: Kind, prev: &Layer, p: usize, x_max: usize) -> Layer {
    let kappa = kind.kappa();
    // along_x[y][x' - y] = sum of prev[x''][y] for y <= x'' <= x'
    let along_x: Vec<Vec<BigInt>> = (0..prev.len())
        .map(|y| {
            let mut acc = BigInt::zero();
            (y..prev.len())
                .map(|xp| {
                    acc += &prev[xp][y];
                    acc.clone()
                })
                .collect()
        })
        .collect();
    // along_y[x'][j] = sum of prev[x'][j''] for j'' <= j
    let along_y: Vec<Vec<BigInt>> = prev
        .iter()
        .map(|row| {
            let mut acc = BigInt::zero();
            row.iter()
                .map(|c| {
                    acc += c;
                    acc.clone()
                })
                .collect()
        })
        .collect();

    let mut layer = Vec::with_capacity(x_max + 1);
    for x in 0..=x_max {
        let mut row = vec![BigInt::zero(); x + 1];
        if x == 0 {
            if kind.admits_all_ones() {
                row[0] = BigInt::one();
            }
            layer.push(row);
            continue;
        }
        let n = (p + x) as i64;
        for (y, slot) in row.iter_mut().enumerate().skip(1) {
            if let Some(e) = kind.gate() {
                if epsilon(e, n, x as i64, y as i64) == 0 {
                    continue;
                }
            }
            let mut value = BigInt::zero();
            // i-sum: prev[x'][y] for x' in [max(x - y + 1, y), x - kappa]
            if x >= kappa {
                let hi = x - kappa;
                let lo = (x + 1 - y).max(y);
                if hi >= lo {
                    value += &along_x[y][hi - y];
                    if lo > y {
                        value -= &along_x[y][lo - 1 - y];
                    }
                }
            }
            // j-sum: prev[x - y][j] for j <= min(y, x - y)
            let rest = x - y;
            value += &along_y[rest][y.min(rest)];
            *slot = value;
        }
        layer.push(row);
    }
    layer
}

/// Runs the layered recurrence for `kind` and hands every layer to `visit`
/// together with its number of ones. Layer `p` covers `x <= n_max - p`.
fn sweep_kind(kind: Kind, n_max: usize, mut visit: impl FnMut(usize, &Layer)) {
    let mut prev = first_layer(kind, n_max);
    visit(0, &prev);
    if n_max == 0 {
        return;
    }
    let mut cur = second_layer(kind, n_max - 1);
    visit(1, &cur);
    for p in 2..=n_max {
        let next = next_layer(kind, &cur, p, n_max - p);
        prev = std::mem::replace(&mut cur, next);
        visit(p, &cur);
    }
    drop(prev);
}

/// Calls `visit(p, x, row)` for every row of every table with length at most
/// `n_max`; `row[y]` is the count with `p` ones, `x` zeros and longest zero
/// run `y`, and the table length is `p + x`.
fn sweep_rows(ensemble: Ensemble, n_max: usize, mut visit: impl FnMut(usize, usize, &[BigInt])) {
    let kind = match ensemble {
        Ensemble::Unconstrained => Kind::Unconstrained,
        Ensemble::Pinned => Kind::Pinned,
        Ensemble::PinnedSolus => Kind::PinnedSolus,
        Ensemble::Solus => {
            // solus = zero-led with p ones, plus "1" + zero-led with p - 1 ones
            let mut previous: Option<Layer> = None;
            sweep_kind(Kind::ZeroLed, n_max, |p, layer| {
                for (x, row) in layer.iter().enumerate() {
                    match &previous {
                        Some(prev) => {
                            let merged: Vec<BigInt> =
                                row.iter().zip(&prev[x]).map(|(a, b)| a + b).collect();
                            visit(p, x, &merged);
                        }
                        None => visit(p, x, row),
                    }
                }
                previous = Some(layer.clone());
            });
            return;
        }
    };
    sweep_kind(kind, n_max, |p, layer| {
        for (x, row) in layer.iter().enumerate() {
            visit(p, x, row);
        }
    });
}

fn check_cap(n: usize, cap: usize) -> Result<(), TableError> {
    if n > cap {
        Err(TableError::CapExceeded { n, cap })
    } else {
        Ok(())
    }
}

/// Exact table for one ensemble and length, using the default cap.
pub fn build_table(ensemble: Ensemble, n: usize) -> Result<JointCountTable, TableError> {
    build_table_capped(ensemble, n, DEFAULT_RECURSION_CAP)
}

pub fn build_table_capped(
    ensemble: Ensemble,
    n: usize,
    cap: usize,
) -> Result<JointCountTable, TableError> {
    check_cap(n, cap)?;
    let mut table = JointCountTable::zeroed(ensemble, n);
    sweep_rows(ensemble, n, |p, x, row| {
        if p + x == n {
            table.set_row(x, row.to_vec());
        }
    });
    Ok(table)
}

/// Tables for every length `0..=n_max` from a single sweep.
pub fn build_tables_up_to(
    ensemble: Ensemble,
    n_max: usize,
    cap: usize,
) -> Result<Vec<JointCountTable>, TableError> {
    check_cap(n_max, cap)?;
    let mut tables: Vec<JointCountTable> = (0..=n_max)
        .map(|n| JointCountTable::zeroed(ensemble, n))
        .collect();
    sweep_rows(ensemble, n_max, |p, x, row| {
        tables[p + x].set_row(x, row.to_vec());
    });
    Ok(tables)
}

/// Moment sums for every length `0..=n_max` from a single sweep, without
/// materialising the tables.
pub fn moment_sums_up_to(
    ensemble: Ensemble,
    n_max: usize,
    cap: usize,
) -> Result<Vec<MomentSums>, TableError> {
    check_cap(n_max, cap)?;
    let mut sums: Vec<MomentSums> = (0..=n_max).map(MomentSums::empty).collect();
    sweep_rows(ensemble, n_max, |p, x, row| {
        sums[p + x].add_row(p, row);
    });
    Ok(sums)
}
