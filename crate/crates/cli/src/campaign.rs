use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use ringvcs_core::collisions::CollisionStats;
use ringvcs_core::sim::{run_pipeline, PropagationModel};
use ringvcs_core::table::TableSet;

use crate::error::{IoContext, Result};
use crate::plan::{model_name, ExperimentPlan};

pub const AGGREGATE_FILE: &str = "aggregate.csv";

pub fn node_dump_name(count: usize, replicate: u32) -> String {
    format!("nodes_n{count}_r{replicate}.csv")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelSummary {
    pub runs: u32,
    pub aggregate: CollisionStats,
    pub per_count: BTreeMap<usize, CollisionStats>,
    /// Sensors the initialization never reached, summed over runs.
    pub uninitialized: u64,
    pub aggregate_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub model: PropagationModel,
    pub count: usize,
    pub replicate: u32,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CampaignSummary {
    pub models: BTreeMap<&'static str, ModelSummary>,
    pub failures: Vec<RunFailure>,
}

struct RunOutput {
    stats: CollisionStats,
    uninitialized: u64,
}

fn run_one(
    plan: &ExperimentPlan,
    tables: &TableSet,
    model: PropagationModel,
    count: usize,
    replicate: u32,
    dir: &Path,
) -> Result<RunOutput> {
    let result = run_pipeline(&plan.run_config(model, count, replicate), tables)?;
    let mut buf = Vec::new();
    result.write_node_dump(&mut buf)?;
    let path = dir.join(node_dump_name(count, replicate));
    fs::write(&path, buf).at(&path)?;
    Ok(RunOutput {
        stats: result.collisions.stats,
        uninitialized: result.outcome.uninitialized_sensors().count() as u64,
    })
}

/// Runs every `(model, count, replicate)` of the plan, writing one node dump
/// per run and one `aggregate.csv` per model under `out_dir/<model>/`.
///
/// Runs execute in parallel; results are merged in plan order, so outputs
/// depend on the plan alone. A failing run is recorded in the summary and
/// the campaign goes on.
pub fn run_campaign(plan: &ExperimentPlan) -> Result<CampaignSummary> {
    plan.validate()?;
    let tables = TableSet::build(plan.propagation.range, plan.max_ring, plan.delta_offset)?;
    let mut jobs = Vec::new();
    for &model in &plan.models {
        let dir = plan.out_dir.join(model_name(model));
        fs::create_dir_all(&dir).at(&dir)?;
        for &count in &plan.counts {
            for replicate in 0..plan.replicates {
                jobs.push((model, count, replicate, dir.clone()));
            }
        }
    }
    let outputs: Vec<Result<RunOutput>> = jobs
        .par_iter()
        .map(|(model, count, rep, dir)| run_one(plan, &tables, *model, *count, *rep, dir))
        .collect();

    let mut summary = CampaignSummary::default();
    for ((model, count, replicate, _), output) in jobs.into_iter().zip(outputs) {
        let entry = summary.models.entry(model_name(model)).or_default();
        match output {
            Ok(out) => {
                entry.runs += 1;
                entry.aggregate.merge(&out.stats);
                entry.per_count.entry(count).or_default().merge(&out.stats);
                entry.uninitialized += out.uninitialized;
            }
            Err(e) => summary.failures.push(RunFailure {
                model,
                count,
                replicate,
                reason: e.to_string(),
            }),
        }
    }
    for (name, model) in summary.models.iter_mut() {
        let path = plan.out_dir.join(name).join(AGGREGATE_FILE);
        let mut buf = Vec::new();
        model.aggregate.write_csv(&mut buf)?;
        fs::write(&path, buf).at(&path)?;
        model.aggregate_path = path;
    }
    Ok(summary)
}
