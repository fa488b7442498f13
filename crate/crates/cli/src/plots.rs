//! Gnuplot data and script for collisions-versus-degree figures.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ringvcs_core::collisions::expected_collisions;

use crate::campaign::AGGREGATE_FILE;
use crate::error::{config, HarnessError, IoContext, Result};

pub const MODEL_DIRS: [&str; 2] = ["freespace", "shadowing"];
pub const THEORY_FILE: &str = "theory.dat";
pub const SCRIPT_FILE: &str = "collisions.gp";
/// The analytic curve covers neighborhood sizes `2..=THEORY_MAX_K`.
pub const THEORY_MAX_K: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotFiles {
    pub series: Vec<PathBuf>,
    pub theory: PathBuf,
    pub script: PathBuf,
}

/// One row of an aggregate CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub degree: usize,
    pub samples: u64,
    pub mean: f64,
    pub ci95: f64,
}

pub fn read_aggregate(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut rdr = csv::Reader::from_path(path).at(path)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.at(path)?;
        let bad = |what: &str| config(format!("{}: bad {what} in {:?}", path.display(), record));
        let field = |i: usize| record.get(i).ok_or_else(|| bad("row"));
        rows.push(AggregateRow {
            degree: field(0)?.parse().map_err(|_| bad("degree"))?,
            samples: field(1)?.parse().map_err(|_| bad("samples"))?,
            mean: field(2)?.parse().map_err(|_| bad("mean"))?,
            ci95: field(3)?.parse().map_err(|_| bad("ci95"))?,
        });
    }
    Ok(rows)
}

/// `k  E[X]` for every `k` in `2..=max_k`.
pub fn theory_series(max_k: u64) -> Vec<(u64, f64)> {
    (2..=max_k)
        .map(|k| (k, expected_collisions(k).expect("k >= 2")))
        .collect()
}

/// Reads `<dir>/<model>/aggregate.csv` for each model that has one and
/// writes `.dat` files plus a gnuplot script under `<dir>/plots/`.
pub fn emit_plots(dir: &Path) -> Result<PlotFiles> {
    let present: Vec<(&str, PathBuf)> = MODEL_DIRS
        .iter()
        .map(|m| (*m, dir.join(m).join(AGGREGATE_FILE)))
        .filter(|(_, p)| p.is_file())
        .collect();
    if present.is_empty() {
        return Err(HarnessError::MissingData(
            MODEL_DIRS.iter().map(|m| dir.join(m).join(AGGREGATE_FILE)).collect(),
        ));
    }
    let out = dir.join("plots");
    fs::create_dir_all(&out).at(&out)?;

    let mut series = Vec::new();
    for (model, path) in &present {
        let mut text = String::from("# degree mean_collisions ci95_half_width samples\n");
        for r in read_aggregate(path)? {
            writeln!(text, "{} {} {} {}", r.degree, r.mean, r.ci95, r.samples).unwrap();
        }
        let dat = out.join(format!("{model}.dat"));
        fs::write(&dat, text).at(&dat)?;
        series.push(dat);
    }

    let mut text = String::from("# k expected_collisions\n");
    for (k, e) in theory_series(THEORY_MAX_K) {
        writeln!(text, "{k} {e}").unwrap();
    }
    let theory = out.join(THEORY_FILE);
    fs::write(&theory, text).at(&theory)?;

    let mut script = String::from(
        "set xlabel \"node degree\"\n\
         set ylabel \"mean coordinate collisions seen\"\n\
         set key top left\n\
         set grid\n\
         plot ",
    );
    let curves: Vec<String> = present
        .iter()
        .map(|(m, _)| format!("\"{m}.dat\" using 1:2:3 with yerrorlines title \"{m}\""))
        .chain(std::iter::once(format!(
            "\"{THEORY_FILE}\" using 1:2 with lines dashtype 2 title \"E[X] = (k-1)/(k+1)\""
        )))
        .collect();
    script.push_str(&curves.join(", \\\n     "));
    script.push('\n');
    let script_path = out.join(SCRIPT_FILE);
    fs::write(&script_path, script).at(&script_path)?;

    Ok(PlotFiles {
        series,
        theory,
        script: script_path,
    })
}
