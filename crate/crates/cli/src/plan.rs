//! Experiment plans: flat `key = value` files whose keys mirror the CLI
//! flags, with command-line values taking precedence.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;

use ringvcs_core::collisions::Equality;
use ringvcs_core::sim::{
    Field, Point, PropagationConfig, PropagationModel, ProtocolConfig, ProtocolMode, RunConfig,
    SeedTriple,
};

use crate::error::{config, Result};

/// Runs per count are indexed below this, and counts must stay below it,
/// so that `base·10⁶ + count·10³ + replicate` never repeats.
pub const SEED_RADIX: u64 = 1000;

pub fn run_seed(base_seed: u64, count: usize, replicate: u32) -> u64 {
    base_seed * SEED_RADIX * SEED_RADIX + count as u64 * SEED_RADIX + u64::from(replicate)
}

/// Node counts: `N`, `A,B,C` or `FROM..TO:STEP` (inclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCounts(pub Vec<usize>);

impl FromStr for NodeCounts {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
        if let Some((from, rest)) = s.split_once("..") {
            let (to, step) = rest.split_once(':').unwrap_or((rest, "1"));
            let (from, to, step) = (num(from)?, num(to)?, num(step)?);
            if step == 0 || to < from {
                return Err(format!("bad range {s:?}"));
            }
            return Ok(Self((from..=to).step_by(step).collect()));
        }
        s.split(',').map(num).collect::<std::result::Result<_, _>>().map(Self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    FreeSpace,
    Shadowing,
    Both,
}

impl ModelChoice {
    pub fn models(self) -> Vec<PropagationModel> {
        match self {
            ModelChoice::FreeSpace => vec![PropagationModel::FreeSpace],
            ModelChoice::Shadowing => vec![PropagationModel::LogNormalShadowing],
            ModelChoice::Both => vec![PropagationModel::FreeSpace, PropagationModel::LogNormalShadowing],
        }
    }
}

impl FromStr for ModelChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "freespace" => Ok(Self::FreeSpace),
            "shadowing" => Ok(Self::Shadowing),
            "both" | "freespace,shadowing" | "shadowing,freespace" => Ok(Self::Both),
            other => Err(format!("unknown model {other:?} (freespace|shadowing|both)")),
        }
    }
}

pub fn model_name(model: PropagationModel) -> &'static str {
    match model {
        PropagationModel::FreeSpace => "freespace",
        PropagationModel::LogNormalShadowing => "shadowing",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeChoice(pub ProtocolMode);

impl FromStr for ModeChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "wave" => Ok(Self(ProtocolMode::WaveIdealized)),
            "contention" => Ok(Self(ProtocolMode::Contention)),
            other => Err(format!("unknown mode {other:?} (wave|contention)")),
        }
    }
}

/// Campaign parameters. Every flag can also appear as `key = value` in a
/// plan file, using the flag name without dashes (`sink-x = 25`).
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct PlanArgs {
    /// Sensor counts: N, A,B,C or FROM..TO:STEP [default: 200]
    #[arg(long)]
    pub nodes: Option<NodeCounts>,
    /// Field width [default: 50]
    #[arg(long)]
    pub width: Option<f64>,
    /// Field height [default: 50]
    #[arg(long)]
    pub height: Option<f64>,
    /// Sink x coordinate [default: width/2]
    #[arg(long = "sink-x")]
    pub sink_x: Option<f64>,
    /// Sink y coordinate [default: height/2]
    #[arg(long = "sink-y")]
    pub sink_y: Option<f64>,
    /// Radio range R [default: 10]
    #[arg(long)]
    pub range: Option<f64>,
    /// Propagation model: freespace, shadowing or both [default: freespace]
    #[arg(long)]
    pub model: Option<ModelChoice>,
    /// Path-loss exponent for shadowing [default: 3]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Shadowing standard deviation in dB [default: 4]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Protocol mode: wave or contention [default: wave]
    #[arg(long)]
    pub mode: Option<ModeChoice>,
    /// Slots per contention period [default: 64]
    #[arg(long)]
    pub slots: Option<u32>,
    /// Base seed; run seed = base·10⁶ + count·10³ + replicate [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replicates per node count, at most 1000 [default: 1]
    #[arg(long)]
    pub replicates: Option<u32>,
    /// Offset table step [default: 0.01·range]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Deepest ring with its own offset table [default: 10]
    #[arg(long = "max-ring")]
    pub max_ring: Option<u32>,
    /// Compare coordinates after rounding to this many decimals [default: exact]
    #[arg(long)]
    pub digits: Option<u32>,
    /// Output directory [default: results]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| config(format!("{key} = {value:?}: {e}")))
}

impl PlanArgs {
    /// Parses a flat `key = value` file; `#` starts a comment.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut a = PlanArgs::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "nodes" => a.nodes = Some(parse_value(key, value)?),
                "width" => a.width = Some(parse_value(key, value)?),
                "height" => a.height = Some(parse_value(key, value)?),
                "sink-x" => a.sink_x = Some(parse_value(key, value)?),
                "sink-y" => a.sink_y = Some(parse_value(key, value)?),
                "range" => a.range = Some(parse_value(key, value)?),
                "model" => a.model = Some(parse_value(key, value)?),
                "eta" => a.eta = Some(parse_value(key, value)?),
                "sigma" => a.sigma = Some(parse_value(key, value)?),
                "mode" => a.mode = Some(parse_value(key, value)?),
                "slots" => a.slots = Some(parse_value(key, value)?),
                "seed" => a.seed = Some(parse_value(key, value)?),
                "replicates" => a.replicates = Some(parse_value(key, value)?),
                "delta" => a.delta = Some(parse_value(key, value)?),
                "max-ring" => a.max_ring = Some(parse_value(key, value)?),
                "digits" => a.digits = Some(parse_value(key, value)?),
                "out" => a.out = Some(PathBuf::from(value)),
                other => {
                    return Err(config(format!("line {}: unknown key {other:?}", lineno + 1)))
                }
            }
        }
        Ok(a)
    }

    /// Values set in `self` win over those in `base`.
    pub fn over(self, base: PlanArgs) -> PlanArgs {
        PlanArgs {
            nodes: self.nodes.or(base.nodes),
            width: self.width.or(base.width),
            height: self.height.or(base.height),
            sink_x: self.sink_x.or(base.sink_x),
            sink_y: self.sink_y.or(base.sink_y),
            range: self.range.or(base.range),
            model: self.model.or(base.model),
            eta: self.eta.or(base.eta),
            sigma: self.sigma.or(base.sigma),
            mode: self.mode.or(base.mode),
            slots: self.slots.or(base.slots),
            seed: self.seed.or(base.seed),
            replicates: self.replicates.or(base.replicates),
            delta: self.delta.or(base.delta),
            max_ring: self.max_ring.or(base.max_ring),
            digits: self.digits.or(base.digits),
            out: self.out.or(base.out),
        }
    }

    pub fn into_plan(self) -> Result<ExperimentPlan> {
        let width = self.width.unwrap_or(50.0);
        let height = self.height.unwrap_or(50.0);
        let field = Field::new(width, height)?;
        let range = self.range.unwrap_or(10.0);
        let mut propagation = PropagationConfig::free_space(range);
        propagation.path_loss_exponent = self.eta.unwrap_or(propagation.path_loss_exponent);
        propagation.shadowing_sigma_db = self.sigma.unwrap_or(propagation.shadowing_sigma_db);
        let protocol = ProtocolConfig {
            mode: self.mode.map_or(ProtocolMode::WaveIdealized, |m| m.0),
            slots: self.slots.unwrap_or(ProtocolConfig::default().slots),
            ..ProtocolConfig::default()
        };
        let plan = ExperimentPlan {
            counts: self.nodes.map_or_else(|| vec![200], |n| n.0),
            replicates: self.replicates.unwrap_or(1),
            models: self.model.unwrap_or(ModelChoice::FreeSpace).models(),
            field,
            sink: Point::new(
                self.sink_x.unwrap_or(width / 2.0),
                self.sink_y.unwrap_or(height / 2.0),
            ),
            propagation,
            protocol,
            delta_offset: self.delta.unwrap_or(0.01 * range),
            max_ring: self.max_ring.unwrap_or(10),
            equality: self.digits.map_or(Equality::Exact, Equality::Digits),
            base_seed: self.seed.unwrap_or(1),
            out_dir: self.out.unwrap_or_else(|| PathBuf::from("results")),
        };
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub counts: Vec<usize>,
    pub replicates: u32,
    pub models: Vec<PropagationModel>,
    pub field: Field,
    pub sink: Point,
    /// Model-independent link parameters; `model` is set per run.
    pub propagation: PropagationConfig,
    pub protocol: ProtocolConfig,
    pub delta_offset: f64,
    pub max_ring: u32,
    pub equality: Equality,
    pub base_seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.counts.is_empty() {
            return Err(config("at least one node count is required"));
        }
        if let Some(c) = self.counts.iter().find(|&&c| c == 0 || c as u64 >= SEED_RADIX) {
            return Err(config(format!("node count {c} outside 1..{SEED_RADIX}")));
        }
        if self.replicates == 0 || u64::from(self.replicates) > SEED_RADIX {
            return Err(config(format!("replicates must lie in 1..={SEED_RADIX}")));
        }
        if self.models.is_empty() {
            return Err(config("at least one propagation model is required"));
        }
        if !self.field.contains(&self.sink) {
            return Err(config("sink lies outside the field"));
        }
        if self.max_ring == 0 {
            return Err(config("max-ring must be at least 1"));
        }
        self.propagation.validate()?;
        self.protocol.validate()?;
        Ok(())
    }

    pub fn run_config(&self, model: PropagationModel, count: usize, replicate: u32) -> RunConfig {
        RunConfig {
            sensors: count,
            field: self.field,
            sink: self.sink,
            propagation: PropagationConfig {
                model,
                ..self.propagation
            },
            protocol: self.protocol,
            equality: self.equality,
            seeds: SeedTriple::uniform(run_seed(self.base_seed, count, replicate)),
        }
    }
}
