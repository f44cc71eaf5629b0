use std::ops::Range;

use rayon::prelude::*;

use raxcode_core::bounds::Bound;
use raxcode_core::channel::vector_violations;
use raxcode_core::exponents::ExponentTable;
use raxcode_core::simulator::{
    exact_ensemble_error, mix, Scenario, SimOutcome, ThresholdTable, ENUMERATION_LIMIT,
};
use raxcode_core::{OperationRegion, RatePoint, RateProfile};

use crate::config::{Experiment, Simulation};
use crate::error::{CliError, CliResult};
use crate::output::{join, Cell, Table};

/// Trials per parallel work item.
const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Region,
    Exponent,
    Bound,
    Simulate,
    Sweep,
}

pub const REGION_COLUMNS: &[&str] = &["rate_indices", "rates", "in_region", "achievable", "violated_subsets"];
pub const EXPONENT_COLUMNS: &[&str] = &["kind", "subset", "cond", "other", "value", "rho", "s"];
pub const BOUND_COLUMNS: &[&str] = &[
    "variant",
    "n",
    "log_p_es_upper",
    "p_es_upper",
    "trivial",
    "dominating_branch",
    "collision_vacuous",
];
pub const SIMULATE_COLUMNS: &[&str] = &[
    "n",
    "rate_indices",
    "rates",
    "messages",
    "in_region",
    "error_kind",
    "trials",
    "errors",
    "freq",
    "wilson_radius",
    "exact_p",
    "p_es_upper",
    "log_p_es_upper",
    "within_bound",
];
pub const SWEEP_COLUMNS: &[&str] = &["rate", "n", "es_lower", "log_p_es_upper", "p_es_upper", "trivial"];

pub fn execute(cmd: Command, exp: &Experiment) -> CliResult<Table> {
    match cmd {
        Command::Region => region(exp),
        Command::Exponent => exponent(exp),
        Command::Bound => bound(exp),
        Command::Simulate => simulate(exp),
        Command::Sweep => sweep(exp),
    }
}

fn rates_text(profile: &RateProfile, v: &[usize]) -> String {
    join(profile.rates(v).iter().map(|&r| crate::output::float_text(r)))
}

fn require_n(exp: &Experiment) -> CliResult<&[u64]> {
    if exp.n.is_empty() {
        return Err(CliError::Config("this command needs a nonempty `n` list".into()));
    }
    Ok(&exp.n)
}

fn region(exp: &Experiment) -> CliResult<Table> {
    let mut t = Table::new("region", REGION_COLUMNS);
    for v in exp.profile.all_vectors() {
        let violations = vector_violations(&exp.channel, &exp.profile, &v)?;
        t.push(vec![
            Cell::Text(join(&v)),
            Cell::Text(rates_text(&exp.profile, &v)),
            Cell::Bool(exp.region.contains(&v)),
            Cell::Bool(violations.is_empty()),
            Cell::Text(join(violations.iter().map(|x| x.subset))),
        ]);
    }
    Ok(t)
}

fn exponent_table(exp: &Experiment) -> CliResult<ExponentTable> {
    Ok(match &exp.grid {
        Some(g) => ExponentTable::for_grid(&exp.channel, g, &exp.region, &exp.optimizer)?,
        None => ExponentTable::for_region(&exp.channel, &exp.profile, &exp.region, &exp.optimizer)?,
    })
}

fn exponent(exp: &Experiment) -> CliResult<Table> {
    let table = exponent_table(exp)?;
    let mut t = Table::new("exponent", EXPONENT_COLUMNS);
    for (k, r) in table.iter() {
        t.push(vec![
            Cell::Text(k.kind.as_str().into()),
            Cell::Text(k.subset.to_string()),
            Cell::Text(join(&k.cond)),
            Cell::Text(join(&k.other)),
            Cell::Float(r.value),
            Cell::Float(r.rho_star),
            Cell::Float(r.s_star),
        ]);
    }
    let es = table.es_lower()?;
    t.push(vec![
        Cell::Text("Es".into()),
        Cell::Text(es.witness.subset.to_string()),
        Cell::Text(join(&es.witness.cond)),
        Cell::Text(join(&es.witness.other)),
        Cell::Float(es.value),
        Cell::Float(es.result.rho_star),
        Cell::Float(es.result.s_star),
    ]);
    Ok(t)
}

fn prepare_bound(exp: &Experiment, profile: &RateProfile, region: &OperationRegion) -> CliResult<(&'static str, Bound)> {
    let ch = &exp.channel;
    Ok(match (&exp.grid, ch.num_users()) {
        (Some(g), _) => ("standard", Bound::standard(ch, g, region, &exp.optimizer)?),
        (None, 1) => ("single", Bound::single(ch, profile, region, &exp.optimizer)?),
        (None, _) => ("multi", Bound::multi(ch, profile, region, &exp.optimizer)?),
    })
}

fn bound(exp: &Experiment) -> CliResult<Table> {
    let ns = require_n(exp)?;
    let (variant, b) = prepare_bound(exp, &exp.profile, &exp.region)?;
    let mut t = Table::new("bound", BOUND_COLUMNS);
    for &n in ns {
        let r = b.evaluate(n)?;
        t.push(vec![
            Cell::Text(variant.into()),
            Cell::Int(n),
            Cell::Float(r.log_p_es_upper),
            Cell::Float(r.p_es_upper),
            Cell::Bool(r.trivial),
            Cell::Text(r.dominating_branch().as_str().into()),
            Cell::Bool(r.collision_vacuous),
        ]);
    }
    Ok(t)
}

/// Error count over `trials` trials, split into fixed chunks so the sum does
/// not depend on the number of threads.
pub fn parallel_errors(sc: &Scenario<'_>, trials: u64, seed: u64) -> CliResult<u64> {
    let chunks: Vec<Range<u64>> = (0..trials.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(trials))
        .collect();
    let counts: Vec<u64> = chunks
        .into_par_iter()
        .map(|r| sc.run_range(seed, r))
        .collect::<Result<_, _>>()?;
    Ok(counts.iter().sum())
}

/// Seed of one (length, condition) cell of a simulation.
pub fn cell_seed(base: u64, n: u64, condition: usize) -> u64 {
    mix(mix(base, n), condition as u64)
}

fn simulate(exp: &Experiment) -> CliResult<Table> {
    let ns = require_n(exp)?;
    let sim: &Simulation = exp
        .simulation
        .as_ref()
        .ok_or_else(|| CliError::Config("`simulate` needs a `simulation` section".into()))?;
    let ch = &exp.channel;
    let thresholds = ThresholdTable::optimized(ch, &exp.profile, &exp.region, &exp.optimizer, sim.threshold_offset)?;
    let bound = if ch.num_users() == 1 {
        Bound::single(ch, &exp.profile, &exp.region, &exp.optimizer)?
    } else {
        Bound::multi(ch, &exp.profile, &exp.region, &exp.optimizer)?
    };
    let mut t = Table::new("simulate", SIMULATE_COLUMNS);
    for &n in ns {
        let b = bound.evaluate(n)?;
        let len = usize::try_from(n).map_err(|_| CliError::Config(format!("block length {n} too large")))?;
        for (ci, cond) in sim.conditions.iter().enumerate() {
            let sc = Scenario::new(ch, &exp.profile, &exp.region, &thresholds, len, cond.clone(), sim.memory_budget)?;
            let errors = parallel_errors(&sc, sim.trials, cell_seed(sim.seed, n, ci))?;
            let out: SimOutcome = sc.outcome(sim.trials, errors);
            let exact = if sim.exact {
                Cell::Float(exact_ensemble_error(&sc, ENUMERATION_LIMIT)?)
            } else {
                Cell::Missing
            };
            t.push(vec![
                Cell::Int(n),
                Cell::Text(join(&cond.rates)),
                Cell::Text(rates_text(&exp.profile, &cond.rates)),
                Cell::Text(join(&cond.messages)),
                Cell::Bool(out.in_region),
                Cell::Text(out.kind.as_str().into()),
                Cell::Int(out.trials),
                Cell::Int(out.errors),
                Cell::Float(out.freq),
                Cell::Float(out.wilson_radius_95),
                exact,
                Cell::Float(b.p_es_upper),
                Cell::Float(b.log_p_es_upper),
                Cell::Bool(out.freq <= b.p_es_upper + 3.0 * out.wilson_radius_95),
            ]);
        }
    }
    Ok(t)
}

fn sweep(exp: &Experiment) -> CliResult<Table> {
    let ns = require_n(exp)?;
    let sw = exp
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("`sweep` needs a `sweep` section".into()))?;
    if exp.grid.is_some() {
        return Err(CliError::Config("`sweep` works on rate menus, not grids".into()));
    }
    let mut t = Table::new("sweep", SWEEP_COLUMNS);
    for &rate in &sw.rates {
        let mut users: Vec<Vec<RatePoint>> =
            (0..exp.profile.num_users()).map(|k| exp.profile.user(k).to_vec()).collect();
        users[sw.user][sw.class].rate = rate;
        let profile = RateProfile::new(users)
            .map_err(|e| CliError::Config(format!("sweep rate {rate}: {e}")))?;
        let region = OperationRegion::new(exp.region.members().to_vec(), &profile)?;
        let (_, b) = prepare_bound(exp, &profile, &region)?;
        let es = b.table().es_lower()?;
        for &n in ns {
            let r = b.evaluate(n)?;
            t.push(vec![
                Cell::Float(rate),
                Cell::Int(n),
                Cell::Float(es.value),
                Cell::Float(r.log_p_es_upper),
                Cell::Float(r.p_es_upper),
                Cell::Bool(r.trivial),
            ]);
        }
    }
    Ok(t)
}
