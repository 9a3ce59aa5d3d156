//! Baseline bit-traversal sorter and the column-skipping sorter.

use std::fmt;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::bit_memory::{exclude_ones, BitMatrix, ColumnClass, RowMask};
use crate::state_table::{StateRecord, StateTable};
use crate::trace::TraceEvent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    /// Full MSB→LSB traversal every iteration, one row emitted per iteration.
    Baseline,
    /// Column skipping with a `k`-entry state table.
    Skip { k: usize },
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Baseline => f.write_str("baseline"),
            Algorithm::Skip { k } => write!(f, "skip(k={k})"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpCounters {
    pub cr: u64,
    pub re: u64,
    pub sr: u64,
    pub sl: u64,
    pub stall: u64,
    pub iterations: u64,
}

impl AddAssign for OpCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.cr += rhs.cr;
        self.re += rhs.re;
        self.sr += rhs.sr;
        self.sl += rhs.sl;
        self.stall += rhs.stall;
        self.iterations += rhs.iterations;
    }
}

/// Optional per-operation energy coefficients, in whatever unit the caller
/// supplies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    pub per_cr: f64,
    pub per_re: f64,
    pub per_sr: f64,
    pub per_sl: f64,
    pub per_stall: f64,
}

impl EnergyModel {
    pub fn energy(&self, c: &OpCounters) -> f64 {
        self.per_cr * c.cr as f64
            + self.per_re * c.re as f64
            + self.per_sr * c.sr as f64
            + self.per_sl * c.sl as f64
            + self.per_stall * c.stall as f64
    }
}

/// Cycle weights per operation. The defaults charge one cycle per column
/// read and per stall; RE and SL overlap with reads.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub cycles_per_cr: u64,
    pub cycles_per_stall: u64,
    pub cycles_per_sl: u64,
    pub cycles_per_re: u64,
    pub energy: Option<EnergyModel>,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            cycles_per_cr: 1,
            cycles_per_stall: 1,
            cycles_per_sl: 0,
            cycles_per_re: 0,
            energy: None,
        }
    }
}

impl CostModel {
    pub fn cycles(&self, c: &OpCounters) -> u64 {
        cycles(c, self)
    }

    pub fn energy(&self, c: &OpCounters) -> Option<f64> {
        self.energy.map(|e| e.energy(c))
    }
}

/// Weighted sum of the counters under `cost`.
pub fn cycles(c: &OpCounters, cost: &CostModel) -> u64 {
    c.cr * cost.cycles_per_cr + c.stall * cost.cycles_per_stall + c.sl * cost.cycles_per_sl + c.re * cost.cycles_per_re
}

#[derive(Clone, Debug, Default)]
pub struct SortOptions {
    pub cost: CostModel,
    pub trace: bool,
}

impl SortOptions {
    pub fn traced() -> Self {
        SortOptions {
            cost: CostModel::default(),
            trace: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SortOutcome {
    /// `(value, original row)` in emission order.
    pub order: Vec<(u64, usize)>,
    pub counters: OpCounters,
    /// Column reads issued by each min-search iteration.
    pub iteration_cr: Vec<u64>,
    pub trace: Option<Vec<TraceEvent>>,
    pub cycles: u64,
}

impl SortOutcome {
    pub fn sorted_values(&self) -> Vec<u64> {
        self.order.iter().map(|&(v, _)| v).collect()
    }
}

/// Software reference: ascending by value, ties by original index.
pub fn reference_order(values: &[u64]) -> Vec<(u64, usize)> {
    let mut order: Vec<(u64, usize)> = values.iter().copied().zip(0..).collect();
    order.sort_unstable();
    order
}

pub(crate) struct Tracer(Option<Vec<TraceEvent>>);

impl Tracer {
    pub(crate) fn new(enabled: bool) -> Self {
        Tracer(enabled.then(Vec::new))
    }

    pub(crate) fn push(&mut self, event: impl FnOnce() -> TraceEvent) {
        if let Some(events) = &mut self.0 {
            events.push(event());
        }
    }

    pub(crate) fn into_inner(self) -> Option<Vec<TraceEvent>> {
        self.0
    }
}

/// Prior-art sorter: `N` iterations, each a full `w`-column traversal over
/// all unsorted rows, emitting the lowest-indexed surviving row.
pub fn sort_baseline(m: &BitMatrix, opts: &SortOptions) -> SortOutcome {
    let n = m.n_rows();
    let mut sorted = RowMask::empty(n);
    let mut counters = OpCounters::default();
    let mut tracer = Tracer::new(opts.trace);
    let mut order = Vec::with_capacity(n);
    let mut iteration_cr = Vec::with_capacity(n);

    for _ in 0..n {
        let mut mask = m.all_rows().difference(&sorted);
        for column in (0..=m.msb()).rev() {
            let read = m.column_read(&mask, column).expect("column in range");
            counters.cr += 1;
            tracer.push(|| TraceEvent::column_read(column));
            if read.class == ColumnClass::Mixed {
                counters.re += 1;
                tracer.push(|| TraceEvent::row_exclusion(column, &read.ones));
                mask = exclude_ones(&mask, &read);
            }
        }
        let row = mask.first().expect("an unsorted row always survives");
        tracer.push(|| TraceEvent::emit(row));
        sorted.insert(row);
        order.push((m.value(row), row));
        counters.iterations += 1;
        iteration_cr.push(u64::from(m.width()));
    }

    SortOutcome {
        order,
        cycles: cycles(&counters, &opts.cost),
        counters,
        iteration_cr,
        trace: tracer.into_inner(),
    }
}

#[derive(Clone, Debug)]
pub struct IterationResult {
    /// Rows left in the mask after the last column: all hold the minimum.
    pub min_rows: RowMask,
    pub counters: OpCounters,
}

/// One min-search traversal from `start_col` down to column 0.
///
/// Every column in range is read, even when the mask is already a
/// singleton. MIXED columns trigger an exclusion and, in MSB-started
/// iterations, a state record of the pre-exclusion mask.
pub fn min_search_iteration(
    m: &BitMatrix,
    mask: RowMask,
    start_col: u32,
    table: &mut StateTable,
    started_from_msb: bool,
) -> IterationResult {
    let mut tracer = Tracer::new(false);
    traverse(m, mask, start_col, table, started_from_msb, &mut tracer)
}

pub(crate) fn traverse(
    m: &BitMatrix,
    mut mask: RowMask,
    start_col: u32,
    table: &mut StateTable,
    started_from_msb: bool,
    tracer: &mut Tracer,
) -> IterationResult {
    debug_assert!(!mask.is_empty());
    let mut counters = OpCounters::default();
    for column in (0..=start_col).rev() {
        let read = m.column_read(&mask, column).expect("column in range");
        counters.cr += 1;
        tracer.push(|| TraceEvent::column_read(column));
        if read.class != ColumnClass::Mixed {
            continue;
        }
        counters.re += 1;
        tracer.push(|| TraceEvent::row_exclusion(column, &read.ones));
        let rec = StateRecord {
            column,
            mask_before_exclusion: mask.clone(),
        };
        if table.record(rec, started_from_msb) {
            counters.sr += 1;
            tracer.push(|| TraceEvent::state_record(column, &mask));
        }
        mask = exclude_ones(&mask, &read);
    }
    IterationResult {
        min_rows: mask,
        counters,
    }
}

/// Column-skipping sorter with a `k`-entry state table.
pub fn sort_skip(m: &BitMatrix, k: usize, opts: &SortOptions) -> SortOutcome {
    let n = m.n_rows();
    let mut sorted = RowMask::empty(n);
    let mut table = StateTable::new(k);
    let mut counters = OpCounters::default();
    let mut tracer = Tracer::new(opts.trace);
    let mut order = Vec::with_capacity(n);
    let mut iteration_cr = Vec::new();

    while order.len() < n {
        let (mask, start, from_msb) = match table.load_most_recent(&sorted) {
            Some(state) => {
                counters.sl += 1;
                tracer.push(|| TraceEvent::state_load(state.column, &state.effective_mask));
                (state.effective_mask, state.column, false)
            }
            None => (m.all_rows().difference(&sorted), m.msb(), true),
        };

        let it = traverse(m, mask, start, &mut table, from_msb, &mut tracer);
        counters += it.counters;
        counters.iterations += 1;
        iteration_cr.push(it.counters.cr);

        // Repetitions drain through the row processor one per cycle.
        for (j, row) in it.min_rows.rows().enumerate() {
            if j > 0 {
                counters.stall += 1;
                tracer.push(TraceEvent::stall);
            }
            tracer.push(|| TraceEvent::emit(row));
            sorted.insert(row);
            order.push((m.value(row), row));
        }
    }

    SortOutcome {
        order,
        cycles: cycles(&counters, &opts.cost),
        counters,
        iteration_cr,
        trace: tracer.into_inner(),
    }
}

/// Runs `algorithm` on `m`.
pub fn run(m: &BitMatrix, algorithm: Algorithm, opts: &SortOptions) -> SortOutcome {
    match algorithm {
        Algorithm::Baseline => sort_baseline(m, opts),
        Algorithm::Skip { k } => sort_skip(m, k, opts),
    }
}
