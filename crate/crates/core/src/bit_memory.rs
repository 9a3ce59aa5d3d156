//! Bit-level model of the 1T1R array.
//!
//! Each element occupies one row; column `c` holds bit `c` of every element,
//! so column `width - 1` is the MSB. Columns are stored as row bitsets which
//! makes a masked column read two set intersections.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub const MAX_WIDTH: u32 = 64;

/// Set of active rows (wordlines that are still enabled).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RowMask(FixedBitSet);

impl RowMask {
    pub fn empty(n_rows: usize) -> Self {
        RowMask(FixedBitSet::with_capacity(n_rows))
    }

    pub fn full(n_rows: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n_rows);
        bits.insert_range(..);
        RowMask(bits)
    }

    /// Builds a mask over `n_rows` rows. Panics if a row is out of range.
    pub fn from_rows(n_rows: usize, rows: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = RowMask::empty(n_rows);
        for r in rows {
            mask.insert(r);
        }
        mask
    }

    /// Number of rows this mask ranges over (not the number of active rows).
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn count(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, row: usize) -> bool {
        self.0.contains(row)
    }

    pub fn insert(&mut self, row: usize) {
        assert!(row < self.0.len(), "row {row} outside mask of {} rows", self.0.len());
        self.0.insert(row);
    }

    pub fn remove(&mut self, row: usize) {
        self.0.set(row, false);
    }

    /// Lowest active row.
    pub fn first(&self) -> Option<usize> {
        self.0.minimum()
    }

    /// Active rows in ascending order.
    pub fn rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn difference(&self, other: &RowMask) -> RowMask {
        let mut out = self.0.clone();
        out.difference_with(&other.0);
        RowMask(out)
    }

    pub fn intersection(&self, other: &RowMask) -> RowMask {
        let mut out = self.0.clone();
        out.intersect_with(&other.0);
        RowMask(out)
    }

    pub fn union_with(&mut self, other: &RowMask) {
        self.0.union_with(&other.0);
    }

    pub fn is_disjoint(&self, other: &RowMask) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &RowMask) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.rows().collect()
    }
}

impl fmt::Debug for RowMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.rows()).finish()
    }
}

/// Outcome of reading one column under a mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColumnClass {
    AllZero,
    AllOne,
    Mixed,
    Empty,
}

impl ColumnClass {
    pub fn from_presence(has_zero: bool, has_one: bool) -> Self {
        match (has_zero, has_one) {
            (true, true) => ColumnClass::Mixed,
            (true, false) => ColumnClass::AllZero,
            (false, true) => ColumnClass::AllOne,
            (false, false) => ColumnClass::Empty,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnReadResult {
    pub column: u32,
    pub ones: RowMask,
    pub zeros: RowMask,
    pub class: ColumnClass,
}

#[derive(Clone, Debug)]
pub struct BitMatrix {
    width: u32,
    /// `columns[c]` has row `r` set iff bit `c` of element `r` is 1.
    columns: Vec<FixedBitSet>,
    values: Vec<u64>,
}

impl BitMatrix {
    /// Loads `values` into an `n × width` array, row order preserved.
    pub fn build(values: &[u64], width: u32) -> Result<Self> {
        if !(1..=MAX_WIDTH).contains(&width) {
            return Err(Error::WidthOutOfRange(width));
        }
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| !fits_in(v, width)) {
            return Err(Error::ValueOverflow { index, value, width });
        }

        let n = values.len();
        let columns = (0..width)
            .map(|c| {
                let mut col = FixedBitSet::with_capacity(n);
                for (r, &v) in values.iter().enumerate() {
                    col.set(r, (v >> c) & 1 == 1);
                }
                col
            })
            .collect();

        Ok(BitMatrix {
            width,
            columns,
            values: values.to_vec(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn msb(&self) -> u32 {
        self.width - 1
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn value(&self, row: usize) -> u64 {
        self.values[row]
    }

    pub fn bit(&self, row: usize, column: u32) -> bool {
        self.columns[column as usize].contains(row)
    }

    /// Reassembles row `row` from the bit grid.
    pub fn decode_row(&self, row: usize) -> u64 {
        (0..self.width).fold(0u64, |acc, c| acc | (u64::from(self.bit(row, c)) << c))
    }

    /// Row as a bit string, MSB first.
    pub fn row_bits(&self, row: usize) -> String {
        (0..self.width)
            .rev()
            .map(|c| if self.bit(row, c) { '1' } else { '0' })
            .collect()
    }

    pub fn all_rows(&self) -> RowMask {
        RowMask::full(self.n_rows())
    }

    /// Reads column `column` for the rows in `mask`. Pure: the caller owns
    /// the CR counter.
    pub fn column_read(&self, mask: &RowMask, column: u32) -> Result<ColumnReadResult> {
        if column >= self.width {
            return Err(Error::ColumnOutOfRange {
                column,
                width: self.width,
            });
        }
        let col = &self.columns[column as usize];
        let mut ones = mask.0.clone();
        ones.intersect_with(col);
        let mut zeros = mask.0.clone();
        zeros.difference_with(col);
        let ones = RowMask(ones);
        let zeros = RowMask(zeros);
        let class = ColumnClass::from_presence(!zeros.is_empty(), !ones.is_empty());
        Ok(ColumnReadResult {
            column,
            ones,
            zeros,
            class,
        })
    }
}

/// Row exclusion: disables every wordline that read a 1.
pub fn exclude_ones(mask: &RowMask, read: &ColumnReadResult) -> RowMask {
    mask.difference(&read.ones)
}

pub(crate) fn fits_in(value: u64, width: u32) -> bool {
    width >= 64 || value >> width == 0
}
