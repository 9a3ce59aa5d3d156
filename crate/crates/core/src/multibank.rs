//! Multi-bank manager: `C` sub-sorters over contiguous row ranges that run
//! the column-skipping algorithm as one sorter.
//!
//! Every column step is bulk-synchronous. Each bank reads its own slice and
//! reports local signals; the manager ORs the has-zero/has-one bits into a
//! global judgement so RE and SR fire in every bank or in none, and ORs the
//! CR and SL enables. Each bank keeps its own record masks, but pushes and
//! pops are global, so the table columns stay identical across banks.

use std::ops::Range;

use crate::bit_memory::{BitMatrix, ColumnClass, RowMask};
use crate::error::{Error, Result};
use crate::sorter::{cycles, OpCounters, SortOptions, SortOutcome, Tracer};
use crate::state_table::{StateRecord, StateTable};
use crate::trace::{Enables, TraceEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BankPartition {
    n: usize,
    bank_count: usize,
}

impl BankPartition {
    pub fn new(n: usize, bank_count: usize) -> Result<Self> {
        if bank_count == 0 || !n.is_multiple_of(bank_count) {
            return Err(Error::BankMismatch { banks: bank_count, n });
        }
        Ok(BankPartition { n, bank_count })
    }

    pub fn bank_count(&self) -> usize {
        self.bank_count
    }

    /// Rows per bank (sub-sorter length).
    pub fn bank_len(&self) -> usize {
        self.n / self.bank_count
    }

    pub fn range(&self, bank: usize) -> Range<usize> {
        let len = self.bank_len();
        bank * len..(bank + 1) * len
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.bank_count).map(|b| self.range(b))
    }

    /// `(bank, local row)` of a global row.
    pub fn locate(&self, row: usize) -> (usize, usize) {
        (row / self.bank_len(), row % self.bank_len())
    }

    pub fn global(&self, bank: usize, local: usize) -> usize {
        bank * self.bank_len() + local
    }
}

/// Signals one sub-sorter raises toward the manager for the current step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BankSignals {
    pub has_zero: bool,
    pub has_one: bool,
    /// The candidate record still has unsorted rows in this bank.
    pub record_valid: bool,
    /// The bank is in an MSB-started iteration with a non-zero table.
    pub recording_armed: bool,
    pub en: Enables,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyncBundle {
    pub locals: Vec<BankSignals>,
    pub has_zero: bool,
    pub has_one: bool,
    pub class: ColumnClass,
    pub record_valid: bool,
    pub en_sync: Enables,
}

/// Combines per-bank signals into the synchronized operation bits.
pub fn combine_signals(locals: &[BankSignals]) -> SyncBundle {
    let any = |f: fn(&BankSignals) -> bool| locals.iter().any(f);
    let has_zero = any(|s| s.has_zero);
    let has_one = any(|s| s.has_one);
    let class = ColumnClass::from_presence(has_zero, has_one);
    let mixed = class == ColumnClass::Mixed;
    let record_valid = any(|s| s.record_valid);
    let en_sync = Enables {
        cen: any(|s| s.en.cen),
        ren: mixed,
        sen: mixed && any(|s| s.recording_armed),
        len: any(|s| s.en.len),
    };
    SyncBundle {
        locals: locals.to_vec(),
        has_zero,
        has_one,
        class,
        record_valid,
        en_sync,
    }
}

/// Emission order for the rows holding the minimum: bank index first, then
/// local row. `min_rows[b]` is bank `b`'s surviving local mask.
pub fn select_output(min_rows: &[RowMask]) -> Vec<(usize, usize)> {
    min_rows
        .iter()
        .enumerate()
        .flat_map(|(b, mask)| mask.rows().map(move |r| (b, r)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct MultiBankOutcome {
    /// Global view; counters and trace are those of the synchronized sorter.
    pub outcome: SortOutcome,
    /// Local operation counts per bank. Every bank takes part in every
    /// synchronized CR, SR and SL; `re` counts steps where the bank actually
    /// disabled wordlines and `stall` counts drain cycles spent on its rows.
    pub per_bank: Vec<OpCounters>,
    pub partition: BankPartition,
}

struct Bank {
    matrix: BitMatrix,
    mask: RowMask,
    sorted: RowMask,
    table: StateTable,
    counters: OpCounters,
}

impl Bank {
    fn unsorted(&self) -> RowMask {
        self.matrix.all_rows().difference(&self.sorted)
    }
}

/// Column-skipping sort of `m` over `banks` synchronized sub-sorters.
pub fn sort_multibank(m: &BitMatrix, k: usize, banks: usize, opts: &SortOptions) -> Result<MultiBankOutcome> {
    let partition = BankPartition::new(m.n_rows(), banks)?;
    let mut banks: Vec<Bank> = partition
        .ranges()
        .map(|range| {
            let matrix = BitMatrix::build(&m.values()[range], m.width())?;
            let rows = matrix.n_rows();
            Ok(Bank {
                matrix,
                mask: RowMask::empty(rows),
                sorted: RowMask::empty(rows),
                table: StateTable::new(k),
                counters: OpCounters::default(),
            })
        })
        .collect::<Result<_>>()?;

    let n = m.n_rows();
    let to_global = |per_bank: &[RowMask]| {
        RowMask::from_rows(
            n,
            per_bank
                .iter()
                .enumerate()
                .flat_map(|(b, mask)| mask.rows().map(move |r| partition.global(b, r))),
        )
    };

    let mut counters = OpCounters::default();
    let mut tracer = Tracer::new(opts.trace);
    let mut order = Vec::with_capacity(n);
    let mut iteration_cr = Vec::new();

    while order.len() < n {
        // SL: walk the table heads until some bank still has live rows in
        // the candidate record.
        let mut loaded = None;
        while let Some(column) = banks[0].table.most_recent().map(|r| r.column) {
            let effective: Vec<RowMask> = banks
                .iter()
                .map(|b| {
                    let head = b.table.most_recent().expect("tables are lock-step");
                    debug_assert_eq!(head.column, column);
                    head.mask_before_exclusion.difference(&b.sorted)
                })
                .collect();
            let signals: Vec<BankSignals> = effective
                .iter()
                .map(|e| BankSignals {
                    record_valid: !e.is_empty(),
                    en: Enables {
                        len: !e.is_empty(),
                        ..Enables::default()
                    },
                    ..BankSignals::default()
                })
                .collect();
            if combine_signals(&signals).en_sync.len {
                loaded = Some((column, effective));
                break;
            }
            for b in &mut banks {
                b.table.discard_most_recent();
            }
        }

        let (start, from_msb) = match loaded {
            Some((column, effective)) => {
                counters.sl += 1;
                tracer.push(|| TraceEvent::state_load(column, &to_global(&effective)));
                for (b, eff) in banks.iter_mut().zip(effective) {
                    b.counters.sl += 1;
                    b.mask = eff;
                }
                (column, false)
            }
            None => {
                for b in &mut banks {
                    b.mask = b.unsorted();
                }
                (m.msb(), true)
            }
        };

        let mut iter_cr = 0;
        for column in (0..=start).rev() {
            let reads: Vec<_> = banks
                .iter_mut()
                .map(|b| {
                    b.counters.cr += 1;
                    b.matrix.column_read(&b.mask, column).expect("column in range")
                })
                .collect();
            let signals: Vec<BankSignals> = reads
                .iter()
                .map(|r| BankSignals {
                    has_zero: !r.zeros.is_empty(),
                    has_one: !r.ones.is_empty(),
                    record_valid: false,
                    recording_armed: from_msb && k > 0,
                    en: Enables {
                        cen: true,
                        ren: r.class == ColumnClass::Mixed,
                        ..Enables::default()
                    },
                })
                .collect();
            let sync = combine_signals(&signals);
            debug_assert!(sync.en_sync.cen);
            iter_cr += 1;
            tracer.push(|| TraceEvent::column_read(column));

            if !sync.en_sync.ren {
                continue;
            }
            counters.re += 1;
            tracer.push(|| {
                let ones: Vec<RowMask> = reads.iter().map(|r| r.ones.clone()).collect();
                TraceEvent::row_exclusion(column, &to_global(&ones))
            });
            if sync.en_sync.sen {
                counters.sr += 1;
                tracer.push(|| {
                    let masks: Vec<RowMask> = banks.iter().map(|b| b.mask.clone()).collect();
                    TraceEvent::state_record(column, &to_global(&masks))
                });
            }
            for (b, read) in banks.iter_mut().zip(&reads) {
                if sync.en_sync.sen {
                    let rec = StateRecord {
                        column,
                        mask_before_exclusion: b.mask.clone(),
                    };
                    b.table.record(rec, true);
                    b.counters.sr += 1;
                }
                if !read.ones.is_empty() {
                    b.counters.re += 1;
                    b.mask = b.mask.difference(&read.ones);
                }
            }
        }
        counters.cr += iter_cr;
        counters.iterations += 1;
        iteration_cr.push(iter_cr);

        let min_rows: Vec<RowMask> = banks.iter().map(|b| b.mask.clone()).collect();
        for (j, (bank, local)) in select_output(&min_rows).into_iter().enumerate() {
            let row = partition.global(bank, local);
            if j > 0 {
                counters.stall += 1;
                banks[bank].counters.stall += 1;
                tracer.push(TraceEvent::stall);
            }
            tracer.push(|| TraceEvent::emit(row).with_bank(bank));
            banks[bank].sorted.insert(local);
            order.push((m.value(row), row));
        }
        for b in &mut banks {
            b.counters.iterations += 1;
        }
        debug_assert!(banks.iter().all(|b| b.table.columns() == banks[0].table.columns()));
    }

    Ok(MultiBankOutcome {
        outcome: SortOutcome {
            order,
            cycles: cycles(&counters, &opts.cost),
            counters,
            iteration_cr,
            trace: tracer.into_inner(),
        },
        per_bank: banks.into_iter().map(|b| b.counters).collect(),
        partition,
    })
}
