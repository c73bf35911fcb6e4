//! Named experiment presets.
//!
//! The base presets carry each problem's published batch size and learning
//! rate. The `_desk` variants shrink the heavy runs for a laptop CPU by
//! cutting the batch to 1/8 (heat) or 1/4 (supervised), the step count to
//! roughly 1/3, and the seed count from 5 to 3, leaving everything else
//! untouched.

use super::config::{ExperimentConfig, ProblemKind};
use crate::optim::LrSchedule;

pub const PRESET_NAMES: [&str; 9] = [
    "poly_regression",
    "cubic_supervised",
    "gauss_supervised",
    "heat_dkm",
    "heat_dkm_poly",
    "cubic_supervised_desk",
    "gauss_supervised_desk",
    "heat_dkm_desk",
    "heat_dkm_poly_desk",
];

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let cfg = match name {
        "poly_regression" => ExperimentConfig::defaults_for(ProblemKind::PolyRegression),
        "cubic_supervised" => ExperimentConfig::defaults_for(ProblemKind::CubicSupervised),
        "gauss_supervised" => ExperimentConfig::defaults_for(ProblemKind::GaussSupervised),
        "heat_dkm" => ExperimentConfig::defaults_for(ProblemKind::HeatDkm),
        "heat_dkm_poly" => {
            let mut cfg = ExperimentConfig::defaults_for(ProblemKind::HeatDkm);
            cfg.schedule = LrSchedule::poly_decay(5e-3, 0.25);
            cfg
        }
        "cubic_supervised_desk" => {
            let mut cfg = ExperimentConfig::defaults_for(ProblemKind::CubicSupervised);
            cfg.batch_size = 64;
            cfg.steps = 3000;
            cfg.seeds = vec![0, 1, 2];
            cfg
        }
        "gauss_supervised_desk" => {
            let mut cfg = ExperimentConfig::defaults_for(ProblemKind::GaussSupervised);
            cfg.batch_size = 64;
            cfg.steps = 3000;
            cfg.seeds = vec![0, 1, 2];
            cfg
        }
        "heat_dkm_desk" => desk_heat(LrSchedule::constant(5e-4)),
        "heat_dkm_poly_desk" => desk_heat(LrSchedule::poly_decay(5e-3, 0.25)),
        _ => return None,
    };
    debug_assert!(cfg.validate().is_ok());
    Some(cfg)
}

fn desk_heat(schedule: LrSchedule) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::defaults_for(ProblemKind::HeatDkm);
    cfg.schedule = schedule;
    cfg.batch_size = 256;
    cfg.steps = 10_000;
    cfg.eval_every = 500;
    cfg.seeds = vec![0, 1, 2];
    cfg
}

/// One-line summary for `list-presets`.
pub fn preset_summary(name: &str) -> Option<String> {
    let cfg = preset(name)?;
    Some(format!(
        "{name}: problem={} optimizer={} schedule={} batch={} steps={} seeds={} eval_every={}",
        cfg.problem.name(),
        cfg.optimizer.name(),
        super::config::schedule_text(&cfg.schedule),
        cfg.batch_size,
        cfg.steps,
        cfg.seeds.len(),
        cfg.eval_every,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::AveragerSpec;
    use crate::harness::config::OptimizerKind;

    #[test]
    fn all_presets_exist_and_validate() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            cfg.validate().unwrap();
            assert_eq!(cfg.optimizer, OptimizerKind::Adam);
            assert_eq!(cfg.averager, AveragerSpec::None);
            assert!(preset_summary(name).unwrap().starts_with(name));
        }
        assert!(preset("does_not_exist").is_none());
    }

    #[test]
    fn published_hyperparameters() {
        let poly = preset("poly_regression").unwrap();
        assert_eq!(poly.batch_size, 64);
        assert_eq!(poly.schedule, LrSchedule::constant(1e-2));

        let cubic = preset("cubic_supervised").unwrap();
        assert_eq!(cubic.batch_size, 256);
        assert_eq!(cubic.schedule, LrSchedule::constant(1e-2));

        let gauss = preset("gauss_supervised").unwrap();
        assert_eq!(gauss.batch_size, 256);
        assert_eq!(gauss.schedule, LrSchedule::constant(1e-3));

        let heat = preset("heat_dkm").unwrap();
        assert_eq!(heat.batch_size, 2048);
        assert_eq!(heat.schedule, LrSchedule::constant(5e-4));

        let heat_poly = preset("heat_dkm_poly").unwrap();
        assert_eq!(heat_poly.schedule, LrSchedule::poly_decay(5e-3, 0.25));
    }

    #[test]
    fn desk_variants_scale_down_but_keep_rates() {
        let full = preset("heat_dkm").unwrap();
        let desk = preset("heat_dkm_desk").unwrap();
        assert_eq!(desk.schedule, full.schedule);
        assert_eq!(desk.batch_size, full.batch_size / 8);
        assert_eq!(desk.steps, 10_000);
        assert_eq!(desk.eval_every, 500);
        assert_eq!(desk.seeds.len(), 3);
        assert_eq!(desk.test_points, full.test_points);

        let cubic_desk = preset("cubic_supervised_desk").unwrap();
        assert_eq!(cubic_desk.batch_size, 64);
        assert_eq!(cubic_desk.schedule, LrSchedule::constant(1e-2));
    }
}
