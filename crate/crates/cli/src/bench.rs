//! Parameter sweeps and their CSV form.

use std::fmt;
use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use memsort::datasets::{generate, DatasetKind, DatasetParams, DatasetSpec};
use memsort::{reference_order, sort_baseline, sort_multibank, sort_skip, BitMatrix, OpCounters, SortOptions};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

pub const CSV_HEADER: &str = "dist,n,w,k,banks,seed,cr,re,sr,sl,stall,cycles,baseline_cycles,speedup";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedField {
    Seed(u64),
    /// Row averaged over several seeds.
    Mean,
}

impl fmt::Display for SeedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedField::Seed(s) => write!(f, "{s}"),
            SeedField::Mean => f.write_str("mean"),
        }
    }
}

impl Serialize for SeedField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SeedField::Seed(seed) => s.serialize_u64(*seed),
            SeedField::Mean => s.serialize_str("mean"),
        }
    }
}

/// One result row. Counter fields are `f64` so seed-averaged rows can carry
/// fractional means.
#[derive(Clone, Debug, Serialize)]
pub struct BenchResult {
    pub dist: String,
    pub n: usize,
    pub w: u32,
    pub k: Option<usize>,
    pub banks: usize,
    pub seed: Option<SeedField>,
    #[serde(serialize_with = "count")]
    pub cr: f64,
    #[serde(serialize_with = "count")]
    pub re: f64,
    #[serde(serialize_with = "count")]
    pub sr: f64,
    #[serde(serialize_with = "count")]
    pub sl: f64,
    #[serde(serialize_with = "count")]
    pub stall: f64,
    #[serde(serialize_with = "count")]
    pub cycles: f64,
    #[serde(serialize_with = "count")]
    pub baseline_cycles: f64,
    pub speedup: f64,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Identifies one run.
#[derive(Clone, Debug)]
pub struct RunKey {
    pub dist: String,
    pub n: usize,
    pub w: u32,
    pub k: Option<usize>,
    pub banks: usize,
    pub seed: Option<SeedField>,
}

impl BenchResult {
    pub fn measured(key: RunKey, c: &OpCounters, cycles: u64, baseline_cycles: u64, wall_time: Duration) -> Self {
        let RunKey {
            dist,
            n,
            w,
            k,
            banks,
            seed,
        } = key;
        BenchResult {
            dist,
            n,
            w,
            k,
            banks,
            seed,
            cr: c.cr as f64,
            re: c.re as f64,
            sr: c.sr as f64,
            sl: c.sl as f64,
            stall: c.stall as f64,
            cycles: cycles as f64,
            baseline_cycles: baseline_cycles as f64,
            speedup: baseline_cycles as f64 / cycles as f64,
            wall_time,
        }
    }

    pub fn csv_line(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            self.dist.clone(),
            self.n.to_string(),
            self.w.to_string(),
            opt(self.k.map(|k| k.to_string())),
            self.banks.to_string(),
            opt(self.seed.map(|s| s.to_string())),
            num(self.cr),
            num(self.re),
            num(self.sr),
            num(self.sl),
            num(self.stall),
            num(self.cycles),
            num(self.baseline_cycles),
            format!("{:.4}", self.speedup),
        ]
        .join(",")
    }
}

/// Whole counts serialize as integers, means as floats.
fn count<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.fract() == 0.0 && *x >= 0.0 && *x < u64::MAX as f64 {
        s.serialize_u64(*x as u64)
    } else {
        s.serialize_f64(*x)
    }
}

fn num(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.3}")
    }
}

pub fn to_csv(rows: &[BenchResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug)]
pub struct Sweep {
    pub dists: Vec<DatasetKind>,
    pub n: usize,
    pub w: u32,
    pub ks: Vec<usize>,
    pub banks: Vec<usize>,
    pub seeds: Vec<u64>,
    pub params: DatasetParams,
    pub opts: SortOptions,
    pub per_seed: bool,
}

impl Sweep {
    pub fn validate(&self) -> Result<()> {
        if self.dists.is_empty() || self.ks.is_empty() || self.banks.is_empty() || self.seeds.is_empty() {
            bail!("every sweep dimension needs at least one value");
        }
        if let Some(c) = self.banks.iter().find(|&&c| c == 0 || !self.n.is_multiple_of(c)) {
            bail!("bank count {c} does not divide n = {}", self.n);
        }
        Ok(())
    }
}

/// `(dist index, k index, banks index, seed, row)`.
type KeyedRow = (usize, usize, usize, u64, BenchResult);

/// Runs every (dist, k, banks, seed) combination. Output order follows the
/// sweep key (dist as listed, k, banks, seed) no matter how the runs were
/// scheduled. Any sorter output that differs from the reference sort is an
/// error.
pub fn run_sweep(sweep: &Sweep) -> Result<Vec<BenchResult>> {
    sweep.validate()?;
    let jobs: Vec<(usize, u64)> = (0..sweep.dists.len())
        .flat_map(|d| sweep.seeds.iter().map(move |&s| (d, s)))
        .collect();

    let per_job: Vec<Vec<KeyedRow>> = jobs
        .par_iter()
        .map(|&(d, seed)| run_job(sweep, d, seed))
        .collect::<Result<_>>()?;

    let mut keyed: Vec<_> = per_job.into_iter().flatten().collect();
    keyed.sort_by_key(|(d, k, c, s, _)| (*d, *k, *c, *s));

    if sweep.per_seed {
        return Ok(keyed.into_iter().map(|(.., r)| r).collect());
    }

    let seeds = sweep.seeds.len();
    Ok(keyed
        .chunks(seeds)
        .map(|group| average(group.iter().map(|(.., r)| r)))
        .collect())
}

fn run_job(sweep: &Sweep, dist_idx: usize, seed: u64) -> Result<Vec<KeyedRow>> {
    let kind = sweep.dists[dist_idx];
    let spec = DatasetSpec {
        kind,
        n: sweep.n,
        width: sweep.w,
        seed,
        params: sweep.params.clone(),
    };
    let values = generate(&spec)?;
    let m = BitMatrix::build(&values, sweep.w)?;
    let expected = reference_order(&values);

    let base = sort_baseline(&m, &sweep.opts);
    if base.order != expected {
        bail!("baseline output differs from reference sort ({kind}, seed {seed})");
    }

    let mut rows = Vec::with_capacity(sweep.ks.len() * sweep.banks.len());
    for (ki, &k) in sweep.ks.iter().enumerate() {
        for (ci, &banks) in sweep.banks.iter().enumerate() {
            let start = Instant::now();
            let outcome = if banks == 1 {
                sort_skip(&m, k, &sweep.opts)
            } else {
                sort_multibank(&m, k, banks, &sweep.opts)?.outcome
            };
            let wall_time = start.elapsed();
            if outcome.order != expected {
                bail!("column-skipping output differs from reference sort ({kind}, k={k}, banks={banks}, seed {seed})");
            }
            let key = RunKey {
                dist: kind.name().to_owned(),
                n: sweep.n,
                w: sweep.w,
                k: Some(k),
                banks,
                seed: Some(SeedField::Seed(seed)),
            };
            let row = BenchResult::measured(key, &outcome.counters, outcome.cycles, base.cycles, wall_time);
            rows.push((dist_idx, ki, ci, seed, row));
        }
    }
    Ok(rows)
}

/// Arithmetic mean of the counters and cycles; speedup is recomputed from
/// the mean cycles.
fn average<'a>(rows: impl Iterator<Item = &'a BenchResult>) -> BenchResult {
    let rows: Vec<&BenchResult> = rows.collect();
    let count = rows.len() as f64;
    let mean = |f: fn(&BenchResult) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / count;
    let first = rows[0];
    let cycles = mean(|r| r.cycles);
    let baseline_cycles = mean(|r| r.baseline_cycles);
    BenchResult {
        dist: first.dist.clone(),
        n: first.n,
        w: first.w,
        k: first.k,
        banks: first.banks,
        seed: Some(if rows.len() == 1 {
            first.seed.unwrap_or(SeedField::Mean)
        } else {
            SeedField::Mean
        }),
        cr: mean(|r| r.cr),
        re: mean(|r| r.re),
        sr: mean(|r| r.sr),
        sl: mean(|r| r.sl),
        stall: mean(|r| r.stall),
        cycles,
        baseline_cycles,
        speedup: baseline_cycles / cycles,
        wall_time: rows.iter().map(|r| r.wall_time).sum(),
    }
}
