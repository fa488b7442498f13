//! Discretized offset → area-fraction curve for one ring.

use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};
use crate::geometry::{area_fractions, AreaFractions, RingModelParams};

/// Default table step as a fraction of the radio range.
pub const DEFAULT_STEP_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    pub offset: f64,
    pub fractions: AreaFractions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffsetTable {
    ring: u32,
    radio_range: f64,
    delta_offset: f64,
    entries: Vec<TableEntry>,
}

/// Number of grid offsets `k·step` that fall strictly below `range`.
fn entry_count(range: f64, step: f64) -> usize {
    let q = range / step;
    let rounded = q.round();
    let count = if (q - rounded).abs() <= 1e-9 * q { rounded } else { q.ceil() };
    let mut count = count as usize;
    while count > 1 && (count - 1) as f64 * step >= range {
        count -= 1;
    }
    count
}

pub fn build_offset_table(params: &RingModelParams, delta_offset: f64) -> Result<OffsetTable> {
    let range = params.radio_range();
    if !(delta_offset.is_finite() && delta_offset > 0.0 && delta_offset < range) {
        return Err(invalid(format!(
            "table step must lie in (0, {range}), got {delta_offset}"
        )));
    }
    let entries = (0..entry_count(range, delta_offset))
        .map(|k| {
            let offset = k as f64 * delta_offset;
            area_fractions(params, offset).map(|fractions| TableEntry { offset, fractions })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OffsetTable {
        ring: params.ring(),
        radio_range: range,
        delta_offset,
        entries,
    })
}

/// Outcome of [`OffsetTable::check_invariants`]; empty `violations` means
/// the table is sound.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableCheck {
    pub entries: usize,
    pub max_sum_error: f64,
    pub violations: Vec<String>,
}

impl TableCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl OffsetTable {
    /// Assembles a table from raw parts, validating shape but not the
    /// geometric invariants (see [`OffsetTable::check_invariants`]).
    pub fn from_entries(
        ring: u32,
        radio_range: f64,
        delta_offset: f64,
        entries: Vec<TableEntry>,
    ) -> Result<Self> {
        RingModelParams::new(radio_range, ring)?;
        if !(delta_offset.is_finite() && delta_offset > 0.0) {
            return Err(invalid(format!("table step must be positive, got {delta_offset}")));
        }
        if entries.is_empty() {
            return Err(Error::EmptyTable);
        }
        if entries.windows(2).any(|w| w[1].offset <= w[0].offset) {
            return Err(Error::MalformedTable("offsets not strictly increasing".into()));
        }
        Ok(Self {
            ring,
            radio_range,
            delta_offset,
            entries,
        })
    }

    pub fn ring(&self) -> u32 {
        self.ring
    }

    pub fn radio_range(&self) -> f64 {
        self.radio_range
    }

    pub fn delta_offset(&self) -> f64 {
        self.delta_offset
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest gap between consecutive offsets, including the gap from the
    /// last offset up to the ring's outer edge `R`.
    pub fn min_spacing(&self) -> f64 {
        let last = self.entries.last().map_or(0.0, |e| e.offset);
        self.entries
            .windows(2)
            .map(|w| w[1].offset - w[0].offset)
            .fold(self.radio_range - last, f64::min)
    }

    pub fn check_invariants(&self) -> TableCheck {
        let mut check = TableCheck {
            entries: self.entries.len(),
            ..TableCheck::default()
        };
        let v = &mut check.violations;
        let step_tol = 1e-9 * self.delta_offset.max(1.0);
        for (k, e) in self.entries.iter().enumerate() {
            let f = &e.fractions;
            let sum_err = (f.sum() - 1.0).abs();
            check.max_sum_error = check.max_sum_error.max(sum_err);
            if sum_err > 1e-9 {
                v.push(format!("entry {k} (offset {}): fractions sum to {}", e.offset, f.sum()));
            }
            if f.inner < 0.0 || f.same < 0.0 || f.outer < 0.0 {
                v.push(format!("entry {k} (offset {}): negative fraction", e.offset));
            }
            if f.same.is_nan() || f.same <= 0.0 {
                v.push(format!("entry {k} (offset {}): own-ring share is not positive", e.offset));
            }
            if !(0.0..self.radio_range).contains(&e.offset) {
                v.push(format!("entry {k}: offset {} outside [0, R)", e.offset));
            }
        }
        for (k, w) in self.entries.windows(2).enumerate() {
            let step = w[1].offset - w[0].offset;
            if (step - self.delta_offset).abs() > step_tol {
                v.push(format!("entries {k}-{}: step {step} != {}", k + 1, self.delta_offset));
            }
            if w[1].fractions.inner > w[0].fractions.inner {
                v.push(format!("entries {k}-{}: inner share increases", k + 1));
            }
            if w[1].fractions.outer < w[0].fractions.outer {
                v.push(format!("entries {k}-{}: outer share decreases", k + 1));
            }
        }
        if let Some(first) = self.entries.first() {
            if first.offset != 0.0 {
                v.push(format!("first offset is {}, not 0", first.offset));
            }
            if first.fractions.outer.abs() > 1e-6 {
                v.push(format!("outer share at offset 0 is {}", first.fractions.outer));
            }
        }
        check
    }

    /// Writes the table as CSV preceded by a `# n=.. R=.. delta=..` line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# n={} R={} delta={}",
            self.ring, self.radio_range, self.delta_offset
        )?;
        writeln!(out, "offset,frac_a,frac_b,frac_c")?;
        for e in &self.entries {
            let f = &e.fractions;
            writeln!(out, "{},{},{},{}", e.offset, f.inner, f.same, f.outer)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let mut meta = String::new();
        input.read_line(&mut meta)?;
        let (ring, radio_range, delta_offset) = parse_metadata(&meta)?;
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["offset", "frac_a", "frac_b", "frac_c"] {
            return Err(Error::MalformedTable(format!("unexpected header {headers:?}")));
        }
        let mut entries = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                record[i]
                    .parse::<f64>()
                    .map_err(|e| Error::MalformedTable(format!("{:?}: {e}", &record[i])))
            };
            entries.push(TableEntry {
                offset: field(0)?,
                fractions: AreaFractions::new(field(1)?, field(2)?, field(3)?),
            });
        }
        Self::from_entries(ring, radio_range, delta_offset, entries)
    }
}

fn parse_metadata(line: &str) -> Result<(u32, f64, f64)> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::MalformedTable("missing `# n=.. R=.. delta=..` line".into()))?;
    let (mut ring, mut range, mut delta) = (None, None, None);
    for item in body.split_whitespace() {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::MalformedTable(format!("bad metadata item {item:?}")))?;
        let bad = |e: &dyn std::fmt::Display| Error::MalformedTable(format!("{key}: {e}"));
        match key {
            "n" => ring = Some(value.parse::<u32>().map_err(|e| bad(&e))?),
            "R" => range = Some(value.parse::<f64>().map_err(|e| bad(&e))?),
            "delta" => delta = Some(value.parse::<f64>().map_err(|e| bad(&e))?),
            _ => return Err(Error::MalformedTable(format!("unknown metadata key {key:?}"))),
        }
    }
    match (ring, range, delta) {
        (Some(n), Some(r), Some(d)) => Ok((n, r, d)),
        _ => Err(Error::MalformedTable("metadata needs n, R and delta".into())),
    }
}

/// Per-ring tables `1..=max_ring`; deeper rings reuse the last table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSet {
    tables: Vec<OffsetTable>,
}

impl TableSet {
    pub fn build(radio_range: f64, max_ring: u32, delta_offset: f64) -> Result<Self> {
        if max_ring < 1 {
            return Err(invalid("table set needs at least ring 1"));
        }
        let tables = (1..=max_ring)
            .map(|n| build_offset_table(&RingModelParams::new(radio_range, n)?, delta_offset))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { tables })
    }

    /// Wraps tables for consecutive rings starting at 1.
    pub fn from_tables(mut tables: Vec<OffsetTable>) -> Result<Self> {
        tables.sort_by_key(|t| t.ring());
        if tables.is_empty() {
            return Err(Error::EmptyTable);
        }
        for (i, t) in tables.iter().enumerate() {
            if t.ring() as usize != i + 1 {
                return Err(invalid(format!("table set is missing ring {}", i + 1)));
            }
        }
        Ok(Self { tables })
    }

    pub fn for_ring(&self, ring: u32) -> &OffsetTable {
        let idx = (ring.max(1) as usize - 1).min(self.tables.len() - 1);
        &self.tables[idx]
    }

    pub fn max_ring(&self) -> u32 {
        self.tables.len() as u32
    }

    pub fn tables(&self) -> &[OffsetTable] {
        &self.tables
    }
}
