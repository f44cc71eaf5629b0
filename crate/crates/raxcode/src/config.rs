//! JSON experiment configuration.
//!
//! Relative paths are resolved against the directory holding the config.

use std::fs;
use std::path::{Path, PathBuf};

use raxcode_core::simulator::{Condition, DEFAULT_MEMORY_BUDGET};
use raxcode_core::{
    Channel, GridProfile, InputDistribution, OperationRegion, OptimizerConfig, RatePoint, RateProfile, UserGrid,
};
use serde::Deserialize;

use crate::channel_file::load_channel;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DistSpec {
    Named(String),
    Probs(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub rate: f64,
    #[serde(default)]
    pub dist: Option<DistSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub grid_rates: Vec<f64>,
    pub cells: Vec<Vec<PointSpec>>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    pub grid_points_rho: Option<usize>,
    pub grid_points_s: Option<usize>,
    pub refine_iters: Option<usize>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionSpec {
    pub rates: Vec<usize>,
    #[serde(default)]
    pub messages: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threshold_offset: f64,
    #[serde(default)]
    pub conditions: Option<Vec<ConditionSpec>>,
    #[serde(default)]
    pub memory_budget: Option<u128>,
    #[serde(default)]
    pub exact: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub user: usize,
    #[serde(default)]
    pub class: usize,
    pub rates: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub channel_path: PathBuf,
    #[serde(default)]
    pub rates: Option<Vec<Vec<PointSpec>>>,
    #[serde(default)]
    pub rates_path: Option<PathBuf>,
    #[serde(default)]
    pub grid: Option<Vec<GridSpec>>,
    pub region: Vec<Vec<usize>>,
    #[serde(default)]
    pub optimizer: OptimizerSpec,
    #[serde(default)]
    pub n: Vec<u64>,
    #[serde(default)]
    pub simulation: Option<SimulationSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub format: Format,
}

/// Settings for the `simulate` command after validation.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub trials: u64,
    pub seed: u64,
    pub threshold_offset: f64,
    pub conditions: Vec<Condition>,
    pub memory_budget: u128,
    pub exact: bool,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub channel: Channel,
    pub profile: RateProfile,
    pub grid: Option<GridProfile>,
    pub region: OperationRegion,
    pub optimizer: OptimizerConfig,
    pub n: Vec<u64>,
    pub simulation: Option<Simulation>,
    pub sweep: Option<SweepSpec>,
    pub format: Format,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn dist(spec: &Option<DistSpec>, size: usize, user: usize) -> CliResult<InputDistribution> {
    match spec {
        None => Ok(InputDistribution::uniform(size)),
        Some(DistSpec::Named(name)) if name == "uniform" => Ok(InputDistribution::uniform(size)),
        Some(DistSpec::Named(name)) => Err(config_err(format!("user {}: unknown distribution `{name}`", user + 1))),
        Some(DistSpec::Probs(p)) => {
            if p.len() != size {
                return Err(config_err(format!(
                    "user {}: distribution has {} entries, input alphabet has {size}",
                    user + 1,
                    p.len()
                )));
            }
            Ok(InputDistribution::new(p.clone())?)
        }
    }
}

fn points(specs: &[PointSpec], size: usize, user: usize) -> CliResult<Vec<RatePoint>> {
    specs
        .iter()
        .map(|p| Ok(RatePoint::new(p.rate, dist(&p.dist, size, user)?)))
        .collect()
}

impl Experiment {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read(path)?;
        let raw: RawConfig =
            serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_raw(raw, base)
    }

    pub fn from_raw(raw: RawConfig, base: &Path) -> CliResult<Self> {
        let channel_path = base.join(&raw.channel_path);
        let file = fs::File::open(&channel_path).map_err(|source| CliError::Read {
            path: channel_path.clone(),
            source,
        })?;
        let channel =
            load_channel(file).map_err(|e| config_err(format!("{}: {e}", channel_path.display())))?;
        let users = channel.num_users();
        let sizes = channel.input_sizes().to_vec();

        let rates = match (raw.rates, raw.rates_path) {
            (Some(_), Some(_)) => return Err(config_err("give either `rates` or `rates_path`, not both")),
            (Some(r), None) => Some(r),
            (None, Some(p)) => {
                let p = base.join(p);
                let text = read(&p)?;
                Some(serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", p.display())))?)
            }
            (None, None) => None,
        };

        let (profile, grid) = match (rates, raw.grid) {
            (Some(_), Some(_)) => return Err(config_err("give either rates or a grid, not both")),
            (None, None) => return Err(config_err("missing rates")),
            (Some(r), None) => {
                if r.len() != users {
                    return Err(config_err(format!("rates for {} users, channel has {users}", r.len())));
                }
                let users_pts = r
                    .iter()
                    .enumerate()
                    .map(|(k, specs)| points(specs, sizes[k], k))
                    .collect::<CliResult<Vec<_>>>()?;
                (RateProfile::new(users_pts)?, None)
            }
            (None, Some(g)) => {
                if g.len() != users {
                    return Err(config_err(format!("grid for {} users, channel has {users}", g.len())));
                }
                let mut ug = Vec::with_capacity(users);
                for (k, spec) in g.iter().enumerate() {
                    let cells = spec
                        .cells
                        .iter()
                        .map(|c| points(c, sizes[k], k))
                        .collect::<CliResult<Vec<_>>>()?;
                    ug.push(UserGrid {
                        grid_rates: spec.grid_rates.clone(),
                        cells,
                    });
                }
                let grid = GridProfile::new(ug)?;
                (grid.flatten()?.0, Some(grid))
            }
        };
        profile.check_channel(&channel)?;
        let region = OperationRegion::new(raw.region, &profile)?;

        let defaults = OptimizerConfig::default();
        let optimizer = OptimizerConfig {
            grid_points_rho: raw.optimizer.grid_points_rho.unwrap_or(defaults.grid_points_rho),
            grid_points_s: raw.optimizer.grid_points_s.unwrap_or(defaults.grid_points_s),
            refine_iters: raw.optimizer.refine_iters.unwrap_or(defaults.refine_iters),
            epsilon: raw.optimizer.epsilon.unwrap_or(defaults.epsilon),
        };
        optimizer.validate()?;

        if raw.n.contains(&0) {
            return Err(config_err("block lengths must be positive"));
        }

        let simulation = match raw.simulation {
            None => None,
            Some(s) => {
                if s.trials == 0 {
                    return Err(config_err("simulation needs at least one trial"));
                }
                if s.threshold_offset.is_nan() {
                    return Err(config_err("threshold offset is NaN"));
                }
                let conditions = match s.conditions {
                    None => profile.all_vectors().into_iter().map(Condition::first_message).collect(),
                    Some(cs) => cs
                        .into_iter()
                        .map(|c| {
                            if c.rates.len() != users {
                                return Err(config_err(format!("condition {:?} needs {users} rate indices", c.rates)));
                            }
                            for (k, &i) in c.rates.iter().enumerate() {
                                if i >= profile.user(k).len() {
                                    return Err(config_err(format!("condition {:?}: rate index out of range", c.rates)));
                                }
                            }
                            let messages = c.messages.unwrap_or_else(|| vec![0; users]);
                            if messages.len() != users {
                                return Err(config_err(format!("condition {:?} needs {users} messages", c.rates)));
                            }
                            Ok(Condition { rates: c.rates, messages })
                        })
                        .collect::<CliResult<Vec<_>>>()?,
                };
                Some(Simulation {
                    trials: s.trials,
                    seed: s.seed,
                    threshold_offset: s.threshold_offset,
                    conditions,
                    memory_budget: s.memory_budget.unwrap_or(DEFAULT_MEMORY_BUDGET),
                    exact: s.exact,
                })
            }
        };

        if let Some(sw) = &raw.sweep {
            if sw.user >= users || sw.class >= profile.user(sw.user).len() {
                return Err(config_err("sweep names a rate class that does not exist"));
            }
            if sw.rates.is_empty() {
                return Err(config_err("sweep needs at least one rate"));
            }
        }

        Ok(Self {
            channel,
            profile,
            grid,
            region,
            optimizer,
            n: raw.n,
            simulation,
            sweep: raw.sweep,
            format: raw.format,
        })
    }
}
