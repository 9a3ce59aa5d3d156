//! Functional and cycle-cost model of memristive in-memory sorting.
//!
//! Elements are stored bit-serially in a modeled 1T1R array
//! ([`bit_memory`]). The min of the active rows is found by reading columns
//! from the MSB down and excluding rows that read 1 on mixed columns.
//! [`sorter::sort_baseline`] repeats the full traversal once per element;
//! [`sorter::sort_skip`] keeps a small table of earlier exclusion states
//! ([`state_table`]) and resumes from them instead. [`multibank`] runs the
//! same algorithm over several synchronized banks.

pub mod bit_memory;
pub mod datasets;
pub mod error;
pub mod multibank;
pub mod sorter;
pub mod state_table;
pub mod trace;

pub use bit_memory::{exclude_ones, BitMatrix, ColumnClass, ColumnReadResult, RowMask};
pub use error::{Error, Result};
pub use multibank::{sort_multibank, BankPartition, MultiBankOutcome};
pub use sorter::{
    cycles, reference_order, sort_baseline, sort_skip, Algorithm, CostModel, OpCounters, SortOptions, SortOutcome,
};
pub use state_table::{LoadedState, StateRecord, StateTable};
pub use trace::{verify_trace, TraceEvent, Verdict};
