//! Experiment runner: seeded training loops over the problem zoo, with
//! per-seed metric records and CSV/SVG artifacts.
//!
//! Each run owns three private RNG streams (init, data, test) derived from
//! its seed. The loop always evaluates gradients at the raw iterate; the
//! averaged iterate is a passive read-out whose test error is recorded next
//! to the raw one.

pub mod config;
pub mod presets;
pub mod report;

pub use config::{ConfigError, ExperimentConfig, OptimizerKind, ProblemKind};
pub use presets::{preset, preset_summary, PRESET_NAMES};

use crate::optim::{adam_step, sgd_step, AdamState, Averager, HyperParams, LrSchedule, OptimError};
use crate::params::ParamVector;
use crate::problems::{
    HeatProblem, PolyRegression, StochasticProblem, SupervisedProblem, TestSet,
};
use crate::rng::{seeded_stream, DATA_STREAM, INIT_STREAM, TEST_STREAM};
use rayon::prelude::*;
use std::time::Instant;

/// One evaluation-cadence row. All numeric fields are finite; a run that
/// produces a non-finite value stops and is marked failed instead.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRow {
    pub step: u64,
    pub train_loss: f64,
    pub test_error_raw: f64,
    pub test_error_averaged: f64,
    pub lr: f64,
    pub wallclock_ms: f64,
}

/// Everything one (config, seed) run produced.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub seed: u64,
    pub config_hash: u64,
    pub version: String,
    pub failed: bool,
    pub rows: Vec<EvalRow>,
}

pub fn build_problem(kind: ProblemKind) -> Box<dyn StochasticProblem> {
    match kind {
        ProblemKind::PolyRegression => Box::new(PolyRegression::new()),
        ProblemKind::CubicSupervised => Box::new(SupervisedProblem::cubic()),
        ProblemKind::GaussSupervised => Box::new(SupervisedProblem::gauss_density()),
        ProblemKind::HeatDkm => Box::new(HeatProblem::new()),
    }
}

/// Runs every seed of the config, in parallel, against one shared problem
/// instance. Records come back in seed order regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Vec<RunRecord> {
    cfg.validate().expect("config must be validated before running");
    let problem = build_problem(cfg.problem);
    cfg.seeds.par_iter().map(|&seed| run_single(problem.as_ref(), cfg, seed)).collect()
}

/// One seeded training run. Public so tests can drive instrumented problems
/// through the exact production loop.
pub fn run_single(problem: &dyn StochasticProblem, cfg: &ExperimentConfig, seed: u64) -> RunRecord {
    let start = Instant::now();
    let mut init_rng = seeded_stream(seed, INIT_STREAM);
    let mut data_rng = seeded_stream(seed, DATA_STREAM);
    let mut test_rng = seeded_stream(seed, TEST_STREAM);
    let test_set = problem.test_set(cfg.test_points, &mut test_rng);
    let init = problem.init_params(&mut init_rng);

    let hp = HyperParams { batch_size: cfg.batch_size, ..HyperParams::default() };
    let mut opt = OptState::new(cfg.optimizer, init.clone());
    let mut averager = Averager::new(cfg.averager, &init);

    let mut record = RunRecord {
        seed,
        config_hash: report::config_hash(cfg),
        version: env!("CARGO_PKG_VERSION").to_string(),
        failed: false,
        rows: Vec::with_capacity((cfg.steps / cfg.eval_every + 1) as usize),
    };

    // Step-0 baseline: peek the first batch on a cloned stream so the real
    // data stream still hands batch 1 to step 1.
    let (loss0, _) = problem.sample_loss_grad(&init, cfg.batch_size, &mut data_rng.clone());
    if !push_row(&mut record, problem, &test_set, &cfg.schedule, 0, loss0, &init, averager.averaged(&init), &start) {
        return record;
    }

    for n in 1..=cfg.steps {
        let (loss, grad) = problem.sample_loss_grad(opt.params(), cfg.batch_size, &mut data_rng);
        if !loss.is_finite()
            || opt.step(&hp, &cfg.schedule, n, &grad).is_err()
            || averager.update(opt.params(), n).is_err()
        {
            record.failed = true;
            break;
        }
        if n % cfg.eval_every == 0 {
            let raw = opt.params();
            let averaged = averager.averaged(raw);
            if !push_row(&mut record, problem, &test_set, &cfg.schedule, n, loss, raw, averaged, &start) {
                break;
            }
        }
    }
    record
}

#[allow(clippy::too_many_arguments)]
fn push_row(
    record: &mut RunRecord,
    problem: &dyn StochasticProblem,
    test_set: &TestSet,
    schedule: &LrSchedule,
    step: u64,
    train_loss: f64,
    raw: &ParamVector,
    averaged: &ParamVector,
    start: &Instant,
) -> bool {
    let test_error_raw = problem.test_error(raw, test_set);
    // the identity averager hands back the raw vector itself; skip the
    // duplicate evaluation in that case
    let test_error_averaged = if std::ptr::eq(raw, averaged) {
        test_error_raw
    } else {
        problem.test_error(averaged, test_set)
    };
    let lr = schedule.at(step.max(1));
    if !(train_loss.is_finite() && test_error_raw.is_finite() && test_error_averaged.is_finite()) {
        record.failed = true;
        return false;
    }
    record.rows.push(EvalRow {
        step,
        train_loss,
        test_error_raw,
        test_error_averaged,
        lr,
        wallclock_ms: start.elapsed().as_secs_f64() * 1000.0,
    });
    true
}

enum OptState {
    Adam(AdamState),
    Sgd(ParamVector),
}

impl OptState {
    fn new(kind: OptimizerKind, init: ParamVector) -> Self {
        match kind {
            OptimizerKind::Adam => OptState::Adam(AdamState::new(init)),
            OptimizerKind::Sgd => OptState::Sgd(init),
        }
    }

    fn params(&self) -> &ParamVector {
        match self {
            OptState::Adam(state) => state.params(),
            OptState::Sgd(params) => params,
        }
    }

    fn step(
        &mut self,
        hp: &HyperParams,
        schedule: &LrSchedule,
        n: u64,
        grad: &ParamVector,
    ) -> Result<(), OptimError> {
        match self {
            OptState::Adam(state) => adam_step(state, hp, schedule, grad),
            OptState::Sgd(params) => sgd_step(params, schedule, n, grad),
        }
    }
}
