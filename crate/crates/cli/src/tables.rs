use std::fs;
use std::io::BufReader;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use ringvcs_core::geometry::RingModelParams;
use ringvcs_core::table::{build_offset_table, OffsetTable, TableCheck};

use crate::error::{config, HarnessError, IoContext, Result};

pub fn table_file_name(ring: u32) -> String {
    format!("table_n{ring}.csv")
}

/// Writes `table_n{n}.csv` into `out` for every ring in `rings`.
pub fn build_tables(
    rings: RangeInclusive<u32>,
    radio_range: f64,
    delta_offset: f64,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    if rings.is_empty() {
        return Err(config("empty ring range"));
    }
    fs::create_dir_all(out).at(out)?;
    let mut written = Vec::new();
    for ring in rings {
        let params = RingModelParams::new(radio_range, ring)?;
        let table = build_offset_table(&params, delta_offset)?;
        let mut buf = Vec::new();
        table.write_csv(&mut buf)?;
        let path = out.join(table_file_name(ring));
        fs::write(&path, buf).at(&path)?;
        written.push(path);
    }
    Ok(written)
}

pub fn inspect_table(path: &Path) -> Result<TableCheck> {
    let file = fs::File::open(path).at(path)?;
    let table = OffsetTable::read_csv(BufReader::new(file))?;
    Ok(table.check_invariants())
}

/// Human-readable report; `Err` when the table violates an invariant.
pub fn inspect_report(path: &Path) -> Result<String> {
    let check = inspect_table(path)?;
    let head = format!(
        "{}: {} entries, max |sum-1| = {}",
        path.display(),
        check.entries,
        check.max_sum_error
    );
    if check.passed() {
        Ok(format!("{head}, monotonicity and conservation OK"))
    } else {
        Err(HarnessError::TableCheck(format!(
            "{head}; {}",
            check.violations.join("; ")
        )))
    }
}
