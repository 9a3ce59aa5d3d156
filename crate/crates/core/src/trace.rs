//! Operation trace: events, the line-oriented text form, and a replay
//! checker that validates a trace against the sorter state machine.
//!
//! Text form, one event per line, five whitespace-separated fields:
//!
//! ```text
//! KIND COLUMN ROWS ENABLES BANK
//! CR   3      -    c---    -
//! RE   1      2    -r--    -
//! EMIT -      0    ----    0
//! ```
//!
//! `ROWS` is a comma-separated list of row indexes, `ENABLES` is the
//! `cen/ren/sen/len` vector with `-` for a low signal, and `-` marks an
//! absent field.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bit_memory::{exclude_ones, BitMatrix, ColumnClass, RowMask};
use crate::error::{Error, Result};
use crate::sorter::Algorithm;
use crate::state_table::{StateRecord, StateTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Cr,
    Re,
    Sr,
    Sl,
    Stall,
    Emit,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Cr => "CR",
            EventKind::Re => "RE",
            EventKind::Sr => "SR",
            EventKind::Sl => "SL",
            EventKind::Stall => "STALL",
            EventKind::Emit => "EMIT",
        }
    }

    /// The enable vector the near-memory controller raises for this event.
    pub fn enables(self) -> Enables {
        let mut en = Enables::default();
        match self {
            EventKind::Cr => en.cen = true,
            EventKind::Re => en.ren = true,
            EventKind::Sr => en.sen = true,
            EventKind::Sl => en.len = true,
            EventKind::Stall | EventKind::Emit => {}
        }
        en
    }
}

impl FromStr for EventKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "CR" => EventKind::Cr,
            "RE" => EventKind::Re,
            "SR" => EventKind::Sr,
            "SL" => EventKind::Sl,
            "STALL" => EventKind::Stall,
            "EMIT" => EventKind::Emit,
            other => return Err(Error::MalformedTrace(format!("unknown event kind {other:?}"))),
        })
    }
}

/// Column update, row update, state record and state load enables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Enables {
    pub cen: bool,
    pub ren: bool,
    pub sen: bool,
    pub len: bool,
}

impl fmt::Display for Enables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = |on, c| if on { c } else { '-' };
        write!(
            f,
            "{}{}{}{}",
            flag(self.cen, 'c'),
            flag(self.ren, 'r'),
            flag(self.sen, 's'),
            flag(self.len, 'l')
        )
    }
}

impl FromStr for Enables {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let b = s.as_bytes();
        if b.len() != 4 {
            return Err(Error::MalformedTrace(format!("bad enable field {s:?}")));
        }
        let flag = |i: usize, c: u8| match b[i] {
            x if x == c => Ok(true),
            b'-' => Ok(false),
            _ => Err(Error::MalformedTrace(format!("bad enable field {s:?}"))),
        };
        Ok(Enables {
            cen: flag(0, b'c')?,
            ren: flag(1, b'r')?,
            sen: flag(2, b's')?,
            len: flag(3, b'l')?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub column: Option<u32>,
    pub rows: Option<Vec<usize>>,
    pub enables: Enables,
    /// Owning bank for multi-bank runs; `None` for synchronized or
    /// single-bank events.
    pub bank: Option<usize>,
}

impl TraceEvent {
    fn new(kind: EventKind, column: Option<u32>, rows: Option<Vec<usize>>) -> Self {
        TraceEvent {
            kind,
            column,
            rows,
            enables: kind.enables(),
            bank: None,
        }
    }

    pub fn column_read(column: u32) -> Self {
        Self::new(EventKind::Cr, Some(column), None)
    }

    pub fn row_exclusion(column: u32, excluded: &RowMask) -> Self {
        Self::new(EventKind::Re, Some(column), Some(excluded.to_vec()))
    }

    pub fn state_record(column: u32, mask: &RowMask) -> Self {
        Self::new(EventKind::Sr, Some(column), Some(mask.to_vec()))
    }

    pub fn state_load(column: u32, effective: &RowMask) -> Self {
        Self::new(EventKind::Sl, Some(column), Some(effective.to_vec()))
    }

    pub fn stall() -> Self {
        Self::new(EventKind::Stall, None, None)
    }

    pub fn emit(row: usize) -> Self {
        Self::new(EventKind::Emit, None, Some(vec![row]))
    }

    pub fn with_bank(mut self, bank: usize) -> Self {
        self.bank = Some(bank);
        self
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.as_str())?;
        match self.column {
            Some(c) => write!(f, " {c}")?,
            None => f.write_str(" -")?,
        }
        match &self.rows {
            Some(rows) if !rows.is_empty() => {
                f.write_str(" ")?;
                for (i, r) in rows.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{r}")?;
                }
            }
            _ => f.write_str(" -")?,
        }
        write!(f, " {}", self.enables)?;
        match self.bank {
            Some(b) => write!(f, " {b}"),
            None => f.write_str(" -"),
        }
    }
}

impl FromStr for TraceEvent {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [kind, column, rows, enables, bank] = fields[..] else {
            return Err(Error::MalformedTrace(format!(
                "expected 5 fields, found {} in {line:?}",
                fields.len()
            )));
        };
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::MalformedTrace(format!("bad number {s:?} in {line:?}")))
        };
        let column = match column {
            "-" => None,
            c => Some(num(c)? as u32),
        };
        let rows = match rows {
            "-" => None,
            list => Some(list.split(',').map(num).collect::<Result<Vec<_>>>()?),
        };
        let bank = match bank {
            "-" => None,
            b => Some(num(b)?),
        };
        Ok(TraceEvent {
            kind: kind.parse()?,
            column,
            rows,
            enables: enables.parse()?,
            bank,
        })
    }
}

pub fn write_trace(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

/// Parses the text form; blank lines and `#` comments are skipped.
pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.parse().map_err(|e| match e {
                Error::MalformedTrace(msg) => Error::MalformedTrace(format!("line {}: {msg}", i + 1)),
                other => other,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Index of the offending event; equal to the trace length when the
    /// trace ends before the state machine does.
    pub index: usize,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event {}: {}", self.index, self.reason)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Violation(Violation),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

/// Replays `trace` against the sorter rules for `algorithm` on `m`.
///
/// The state machine is deterministic, so the replay demands one exact
/// event at every step and reports the first event that differs, with a
/// reason naming the broken rule. Structurally invalid events (a CR without
/// a column, rows outside the array) are `MalformedTrace` errors.
pub fn verify_trace(trace: &[TraceEvent], m: &BitMatrix, algorithm: Algorithm) -> Result<Verdict> {
    check_shape(trace, m.n_rows())?;
    let mut replay = Replay { trace, pos: 0, m };
    Ok(match replay.run(algorithm) {
        Ok(()) => Verdict::Ok,
        Err(v) => Verdict::Violation(v),
    })
}

fn check_shape(trace: &[TraceEvent], n_rows: usize) -> Result<()> {
    for (i, e) in trace.iter().enumerate() {
        let bad = |what: &str| {
            Err(Error::MalformedTrace(format!(
                "event {i} ({}): {what}",
                e.kind.as_str()
            )))
        };
        let needs_column = !matches!(e.kind, EventKind::Stall | EventKind::Emit);
        if needs_column != e.column.is_some() {
            return bad(if needs_column {
                "missing column"
            } else {
                "unexpected column"
            });
        }
        match (e.kind, &e.rows) {
            (EventKind::Re | EventKind::Sr | EventKind::Sl, None) => return bad("missing rows"),
            (EventKind::Cr | EventKind::Stall, Some(_)) => return bad("unexpected rows"),
            (EventKind::Emit, rows) if rows.as_ref().is_none_or(|r| r.len() != 1) => {
                return bad("EMIT must carry exactly one row")
            }
            _ => {}
        }
        if let Some(rows) = &e.rows {
            if let Some(r) = rows.iter().find(|&&r| r >= n_rows) {
                return bad(&format!("row {r} outside array of {n_rows} rows"));
            }
        }
    }
    Ok(())
}

struct Replay<'a> {
    trace: &'a [TraceEvent],
    pos: usize,
    m: &'a BitMatrix,
}

type Step = std::result::Result<(), Violation>;

impl<'a> Replay<'a> {
    fn violation(&self, reason: impl Into<String>) -> Violation {
        Violation {
            index: self.pos,
            reason: reason.into(),
        }
    }

    fn peek(&self) -> Option<&'a TraceEvent> {
        self.trace.get(self.pos)
    }

    /// Consumes the next event, which must have kind `kind`. `context`
    /// explains what the state machine was doing when a different event
    /// shows up.
    fn take(&mut self, kind: EventKind, context: &str) -> std::result::Result<&'a TraceEvent, Violation> {
        let Some(e) = self.peek() else {
            return Err(self.violation(format!("trace ended; expected {} ({context})", kind.as_str())));
        };
        if e.kind != kind {
            return Err(self.violation(format!(
                "found {} but expected {} ({context})",
                e.kind.as_str(),
                kind.as_str()
            )));
        }
        if e.enables != kind.enables() {
            return Err(self.violation(format!(
                "enable flags {} inconsistent with {}",
                e.enables,
                kind.as_str()
            )));
        }
        self.pos += 1;
        Ok(e)
    }

    fn expect_rows(&self, e: &TraceEvent, want: &RowMask, what: &str) -> Step {
        let got = e.rows.as_deref().unwrap_or_default();
        if !got.iter().copied().eq(want.rows()) {
            return Err(Violation {
                index: self.pos - 1,
                reason: format!("{what}: rows {got:?} but state machine has {:?}", want.to_vec()),
            });
        }
        Ok(())
    }

    fn run(&mut self, algorithm: Algorithm) -> Step {
        let n = self.m.n_rows();
        let mut sorted = RowMask::empty(n);
        let (k, baseline) = match algorithm {
            Algorithm::Baseline => (0, true),
            Algorithm::Skip { k } => (k, false),
        };
        let mut table = StateTable::new(k);

        while sorted.count() < n {
            let unsorted = self.m.all_rows().difference(&sorted);
            let loaded = if baseline {
                None
            } else {
                table.load_most_recent(&sorted)
            };
            let (mut mask, start, from_msb) = match loaded {
                Some(state) => {
                    let e = self.take(EventKind::Sl, "a live state record must be loaded")?;
                    if e.column != Some(state.column) {
                        return Err(Violation {
                            index: self.pos - 1,
                            reason: format!(
                                "SL column {:?} but most recent live record is at column {}",
                                e.column, state.column
                            ),
                        });
                    }
                    self.expect_rows(e, &state.effective_mask, "SL effective mask")?;
                    (state.effective_mask, state.column, false)
                }
                None => {
                    if self.peek().is_some_and(|e| e.kind == EventKind::Sl) {
                        return Err(self.violation("SL with no live state record"));
                    }
                    (unsorted, self.m.msb(), true)
                }
            };

            for column in (0..=start).rev() {
                if let Some(e) = self.peek() {
                    match e.kind {
                        EventKind::Stall => return Err(self.violation("STALL before the traversal reached column 0")),
                        EventKind::Emit => return Err(self.violation("EMIT before the traversal reached column 0")),
                        _ => {}
                    }
                }
                let e = self.take(EventKind::Cr, "column traversal")?;
                if e.column != Some(column) {
                    return Err(Violation {
                        index: self.pos - 1,
                        reason: format!("CR at column {:?} out of sequence, expected {column}", e.column),
                    });
                }
                let read = self.m.column_read(&mask, column).expect("column in range");
                if read.class == ColumnClass::Mixed {
                    let e = self.take(EventKind::Re, "MIXED column requires row exclusion")?;
                    self.expect_rows(e, &read.ones, "RE excluded rows")?;
                    if !baseline && from_msb && k > 0 {
                        let e = self.take(EventKind::Sr, "MIXED column in an MSB-started iteration is recorded")?;
                        self.expect_rows(e, &mask, "SR mask")?;
                        table.record(
                            StateRecord {
                                column,
                                mask_before_exclusion: mask.clone(),
                            },
                            true,
                        );
                    } else if self.peek().is_some_and(|e| e.kind == EventKind::Sr) {
                        let why = if baseline {
                            "SR in a baseline trace"
                        } else if !from_msb {
                            "SR during a resumed iteration"
                        } else {
                            "SR with a zero-capacity state table"
                        };
                        return Err(self.violation(why));
                    }
                    mask = exclude_ones(&mask, &read);
                } else if let Some(e) = self.peek() {
                    match e.kind {
                        EventKind::Re => return Err(self.violation(format!("RE on a {:?} column", read.class))),
                        EventKind::Sr => return Err(self.violation(format!("SR on a {:?} column", read.class))),
                        _ => {}
                    }
                }
            }

            let emitted: Vec<usize> = if baseline {
                mask.first().into_iter().collect()
            } else {
                mask.to_vec()
            };
            for (j, &row) in emitted.iter().enumerate() {
                if j > 0 {
                    if self.peek().is_some_and(|e| e.kind == EventKind::Cr) {
                        return Err(self.violation("CR during a repetition stall"));
                    }
                    self.take(EventKind::Stall, "repetition drain")?;
                }
                let e = self.take(EventKind::Emit, "minimum found")?;
                if e.rows.as_deref() != Some(&[row][..]) {
                    return Err(Violation {
                        index: self.pos - 1,
                        reason: format!("EMIT of row {:?}, expected row {row}", e.rows),
                    });
                }
                sorted.insert(row);
            }
        }

        if self.pos < self.trace.len() {
            return Err(self.violation("events after every row was emitted"));
        }
        Ok(())
    }
}
