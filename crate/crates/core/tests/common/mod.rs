//! Step-by-step reference model of both sorters, written directly against
//! integer bits with plain vectors. It shares no code with the library's
//! bit matrix or state table and serves as the oracle for frozen values and
//! property tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleRun {
    pub order: Vec<(u64, usize)>,
    pub cr: u64,
    pub re: u64,
    pub sr: u64,
    pub sl: u64,
    pub stall: u64,
    pub iteration_cr: Vec<u64>,
}

fn bit(v: u64, c: u32) -> bool {
    (v >> c) & 1 == 1
}

/// Reads `column` for `rows` and, on a mixed column, drops the 1-rows.
/// Returns whether the column was mixed.
fn read_and_exclude(values: &[u64], rows: &mut Vec<usize>, column: u32) -> bool {
    let ones = rows.iter().filter(|&&r| bit(values[r], column)).count();
    let mixed = ones > 0 && ones < rows.len();
    if mixed {
        rows.retain(|&r| !bit(values[r], column));
    }
    mixed
}

pub fn oracle_baseline(values: &[u64], width: u32) -> OracleRun {
    let n = values.len();
    let mut sorted = vec![false; n];
    let mut run = OracleRun::default();
    for _ in 0..n {
        let mut rows: Vec<usize> = (0..n).filter(|&r| !sorted[r]).collect();
        for c in (0..width).rev() {
            run.cr += 1;
            if read_and_exclude(values, &mut rows, c) {
                run.re += 1;
            }
        }
        let r = rows[0];
        sorted[r] = true;
        run.order.push((values[r], r));
        run.iteration_cr.push(u64::from(width));
    }
    run
}

pub fn oracle_skip(values: &[u64], width: u32, k: usize) -> OracleRun {
    let n = values.len();
    let mut sorted = vec![false; n];
    // (column, rows before exclusion), oldest first.
    let mut table: Vec<(u32, Vec<usize>)> = Vec::new();
    let mut run = OracleRun::default();
    while run.order.len() < n {
        let mut resume = None;
        while let Some((c, rows)) = table.last() {
            let live: Vec<usize> = rows.iter().copied().filter(|&r| !sorted[r]).collect();
            if live.is_empty() {
                table.pop();
            } else {
                resume = Some((*c, live));
                break;
            }
        }
        let (start, mut rows, from_msb) = match resume {
            Some((c, live)) => {
                run.sl += 1;
                (c, live, false)
            }
            None => (width - 1, (0..n).filter(|&r| !sorted[r]).collect(), true),
        };
        let mut crs = 0;
        for c in (0..=start).rev() {
            crs += 1;
            let before = rows.clone();
            if read_and_exclude(values, &mut rows, c) {
                run.re += 1;
                if from_msb && k > 0 {
                    run.sr += 1;
                    table.push((c, before));
                    if table.len() > k {
                        table.remove(0);
                    }
                }
            }
        }
        run.cr += crs;
        run.iteration_cr.push(crs);
        run.stall += rows.len() as u64 - 1;
        for r in rows {
            sorted[r] = true;
            run.order.push((values[r], r));
        }
    }
    run
}

pub fn reference_sort(values: &[u64]) -> Vec<(u64, usize)> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by_key(|&i| (values[i], i));
    idx.into_iter().map(|i| (values[i], i)).collect()
}

#[derive(Clone, Debug)]
pub struct Case {
    pub values: Vec<u64>,
    pub width: u32,
    pub k: usize,
    pub banks: usize,
    pub forced_duplicates: bool,
}

/// The randomized case mix: N in [1, 256], w in [1, 32], k in [0, 4],
/// C in {1, 2, 4} dividing N, forced duplicates in about 40% of cases.
pub fn random_cases(count: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=256usize);
            let width = rng.random_range(1..=32u32);
            let k = rng.random_range(0..=4usize);
            let divisors: Vec<usize> = [1, 2, 4].into_iter().filter(|c| n % c == 0).collect();
            let banks = divisors[rng.random_range(0..divisors.len())];
            let max = (1u64 << width) - 1;
            let forced_duplicates = rng.random_bool(0.4);
            let mut values: Vec<u64> = (0..n).map(|_| rng.random_range(0..=max)).collect();
            if forced_duplicates && n > 1 {
                let pool: Vec<u64> = values[..rng.random_range(1..=n.div_ceil(4))].to_vec();
                for v in values.iter_mut() {
                    if rng.random_bool(0.6) {
                        *v = pool[rng.random_range(0..pool.len())];
                    }
                }
            }
            Case {
                values,
                width,
                k,
                banks,
                forced_duplicates,
            }
        })
        .collect()
}

pub fn has_duplicates(values: &[u64]) -> bool {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.windows(2).any(|w| w[0] == w[1])
}
