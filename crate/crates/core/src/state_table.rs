//! The state controller's k-entry table of row-exclusion states.
//!
//! A record holds the column at which a MIXED read happened together with the
//! row mask as it was *before* the exclusion at that column. Resuming from a
//! record re-reads that column, so the resumed traversal costs `column + 1`
//! reads. Records are invalidated lazily: at load time the sorted rows are
//! subtracted and a record with nothing left is popped for good.

use std::collections::VecDeque;

use crate::bit_memory::RowMask;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateRecord {
    pub column: u32,
    pub mask_before_exclusion: RowMask,
}

/// Result of a successful state load.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedState {
    pub column: u32,
    pub effective_mask: RowMask,
}

#[derive(Clone, Debug, Default)]
pub struct StateTable {
    capacity: usize,
    /// Oldest first.
    entries: VecDeque<StateRecord>,
}

impl StateTable {
    pub fn new(capacity: usize) -> Self {
        StateTable {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries, oldest first.
    pub fn entries(&self) -> impl Iterator<Item = &StateRecord> {
        self.entries.iter()
    }

    pub fn columns(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.column).collect()
    }

    /// State recording (SR). Only iterations that started at the MSB may
    /// record; the oldest entry is evicted when the table overflows.
    /// Returns whether the record was stored.
    ///
    /// A bank of a multi-bank sorter records in lock-step with its peers and
    /// may store an empty local mask; a standalone sorter never does.
    pub fn record(&mut self, rec: StateRecord, iteration_started_from_msb: bool) -> bool {
        if !iteration_started_from_msb || self.capacity == 0 {
            return false;
        }
        self.entries.push_back(rec);
        if self.entries.len() > self.capacity {
            self.entries.pop_front();
        }
        true
    }

    pub fn most_recent(&self) -> Option<&StateRecord> {
        self.entries.back()
    }

    pub fn discard_most_recent(&mut self) -> Option<StateRecord> {
        self.entries.pop_back()
    }

    /// State loading (SL). Walks from the most recent entry, permanently
    /// dropping entries whose rows are all sorted; the first live entry is
    /// returned and kept in the table.
    pub fn load_most_recent(&mut self, sorted_rows: &RowMask) -> Option<LoadedState> {
        while let Some(rec) = self.entries.back() {
            let effective_mask = rec.mask_before_exclusion.difference(sorted_rows);
            if !effective_mask.is_empty() {
                return Some(LoadedState {
                    column: rec.column,
                    effective_mask,
                });
            }
            self.entries.pop_back();
        }
        None
    }
}
