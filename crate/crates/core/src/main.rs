use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use avgadam::harness::report::{strip_wallclock_column, write_outputs};
use avgadam::harness::{
    self, preset, preset_summary, ExperimentConfig, RunRecord, PRESET_NAMES,
};

#[derive(Parser)]
#[command(
    name = "avgadam",
    version,
    about = "Benchmark Adam and SGD with post-hoc iterate averaging on stochastic problems with analytic ground truth"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write per-seed CSVs, an SVG learning curve,
    /// and a metadata sidecar
    Run(RunArgs),
    /// List the built-in experiment presets
    ListPresets,
    /// Exercise a handful of fast numerical invariants and exit nonzero on
    /// any mismatch
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment file in key = value form
    #[arg(long, value_name = "PATH", conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment name (see list-presets)
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Comma-separated seed list overriding the config
    #[arg(long, value_name = "S0,S1,...")]
    seed: Option<String>,
    /// Output directory overriding the config
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let code = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::ListPresets => cmd_list_presets(),
        Command::Selftest => cmd_selftest(),
    };
    ExitCode::from(code)
}

fn cmd_run(args: RunArgs) -> u8 {
    let mut cfg = match base_config(&args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return 1;
        }
    };
    if let Some(list) = &args.seed {
        match parse_seed_list(list) {
            Ok(seeds) => cfg.seeds = seeds,
            Err(msg) => {
                eprintln!("config error: {msg}");
                return 1;
            }
        }
    }
    if let Some(dir) = args.out {
        cfg.out_dir = dir;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("config error: {e}");
        return 1;
    }

    println!(
        "running {} ({} steps, batch {}, seeds {:?})",
        harness::report::experiment_slug(&cfg),
        cfg.steps,
        cfg.batch_size,
        cfg.seeds
    );
    let records = harness::run_experiment(&cfg);
    let paths = match write_outputs(&cfg, &records) {
        Ok(paths) => paths,
        Err(e) => {
            eprintln!("write error: {e}");
            return 1;
        }
    };
    for rec in &records {
        println!("  {}", describe_record(rec));
    }
    println!("wrote {} CSV file(s) to {}", paths.csv_paths.len(), cfg.out_dir.display());
    println!("wrote {}", paths.svg_path.display());
    println!("wrote {}", paths.meta_path.display());
    if records.iter().any(|r| r.failed) {
        eprintln!("one or more seeds failed");
        2
    } else {
        0
    }
}

fn base_config(args: &RunArgs) -> Result<ExperimentConfig, String> {
    match (&args.config, &args.preset) {
        (Some(path), None) => ExperimentConfig::load(path).map_err(|e| e.to_string()),
        (None, Some(name)) => preset(name).ok_or_else(|| {
            format!("unknown preset `{name}`; valid names: {}", PRESET_NAMES.join(", "))
        }),
        _ => Err("pass exactly one of --config or --preset".into()),
    }
}

fn parse_seed_list(list: &str) -> Result<Vec<u64>, String> {
    list.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| format!("bad seed `{}`", t.trim())))
        .collect()
}

fn describe_record(rec: &RunRecord) -> String {
    let tail = match rec.rows.last() {
        Some(row) => format!(
            "step {}: train loss {:.6e}, test error {:.6e} raw / {:.6e} averaged",
            row.step, row.train_loss, row.test_error_raw, row.test_error_averaged
        ),
        None => "no evaluations recorded".to_string(),
    };
    if rec.failed {
        format!("seed {}: FAILED (non-finite value); last {tail}", rec.seed)
    } else {
        format!("seed {}: ok; {tail}", rec.seed)
    }
}

fn cmd_list_presets() -> u8 {
    for name in PRESET_NAMES {
        println!("{}", preset_summary(name).expect("every listed preset resolves"));
    }
    0
}

fn cmd_selftest() -> u8 {
    let checks: [(&str, fn() -> Result<(), String>); 5] = [
        ("adam first step matches closed form", selftest_adam_first_step),
        ("grouped average matches sliding window at boundaries", selftest_grouped_vs_window),
        ("backprop matches central differences", selftest_backprop_fd),
        ("zero-coefficient fit distance is sqrt(1/2)", selftest_poly_distance),
        ("rerun reproduces CSV bytes", selftest_csv_determinism),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("selftest {name}: PASS"),
            Err(msg) => {
                println!("selftest {name}: FAIL ({msg})");
                failures += 1;
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} selftest(s) failed");
        2
    } else {
        0
    }
}

fn selftest_adam_first_step() -> Result<(), String> {
    use avgadam::optim::{adam_step, AdamState, HyperParams, LrSchedule};
    use avgadam::ParamVector;

    let theta0 = [1.0, -2.0];
    let g = [3.0, -0.5];
    let hp = HyperParams::new(0.9, 0.999, 1e-8, 1);
    let sched = LrSchedule::constant(0.001);
    let mut state = AdamState::new(ParamVector::from_vec(theta0.to_vec()));
    adam_step(&mut state, &hp, &sched, &ParamVector::from_vec(g.to_vec()))
        .map_err(|e| e.to_string())?;
    // with zero moments, both bias corrections cancel on the first step:
    // theta - gamma * g / (eps + |g|)
    for i in 0..2 {
        let expect = theta0[i] - 0.001 * g[i] / (1e-8 + g[i].abs());
        let got = state.params()[i];
        if (got - expect).abs() > 1e-15 {
            return Err(format!("coordinate {i}: got {got}, expected {expect}"));
        }
    }
    Ok(())
}

fn selftest_grouped_vs_window() -> Result<(), String> {
    use avgadam::optim::{Averager, AveragerSpec};
    use avgadam::ParamVector;

    let (groups, group_size) = (2usize, 3usize);
    let stream = |n: u64| {
        ParamVector::from_vec(vec![(n as f64).sin(), (2.0 * n as f64).cos(), 0.1 * n as f64])
    };
    let init = stream(0);
    let mut grouped = Averager::new(
        AveragerSpec::Grouped { groups, group_size },
        &init,
    );
    let mut window = Averager::new(
        AveragerSpec::Partial { window: groups * group_size },
        &init,
    );
    for n in 1..=30u64 {
        let raw = stream(n);
        grouped.update(&raw, n).map_err(|e| e.to_string())?;
        window.update(&raw, n).map_err(|e| e.to_string())?;
        if n % group_size as u64 == 0 {
            let a = grouped.averaged(&raw);
            let b = window.averaged(&raw);
            for i in 0..raw.len() {
                if (a[i] - b[i]).abs() > 1e-12 {
                    return Err(format!("step {n}, coordinate {i}: {} vs {}", a[i], b[i]));
                }
            }
        }
    }
    Ok(())
}

fn selftest_backprop_fd() -> Result<(), String> {
    use avgadam::nn::{backward, forward, Activation, Matrix, MlpSpec};
    use avgadam::ParamVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let spec = MlpSpec::new(vec![3, 6, 1], Activation::Gelu);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut params = avgadam::nn::init_params(&spec, &mut rng);
    let batch = Matrix::from_vec(4, 3, (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let targets: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let loss_of = |p: &ParamVector| {
        let preds = avgadam::nn::predict(&spec, p, &batch);
        let mut acc = 0.0;
        for j in 0..4 {
            let d = preds.row(j)[0] - targets[j];
            acc += d * d;
        }
        acc / 4.0
    };
    let (preds, tape) = forward(&spec, &params, &batch);
    let mut og = Matrix::zeros(4, 1);
    for j in 0..4 {
        og.row_mut(j)[0] = 2.0 / 4.0 * (preds.row(j)[0] - targets[j]);
    }
    let analytic = backward(&spec, &params, tape, &og);

    let h = 1e-5;
    for k in (0..spec.param_count()).step_by(5) {
        let orig = params[k];
        params[k] = orig + h;
        let up = loss_of(&params);
        params[k] = orig - h;
        let down = loss_of(&params);
        params[k] = orig;
        let numeric = (up - down) / (2.0 * h);
        let rel = (numeric - analytic[k]).abs()
            / (numeric.abs() + analytic[k].abs()).max(1e-8);
        if rel > 1e-6 {
            return Err(format!(
                "coordinate {k}: numeric {numeric}, analytic {}",
                analytic[k]
            ));
        }
    }
    Ok(())
}

fn selftest_poly_distance() -> Result<(), String> {
    use avgadam::problems::poly::PolyRegression;
    use avgadam::ParamVector;

    let problem = PolyRegression::new();
    let zero = ParamVector::zeros(26);
    let got = problem.l2_distance(&zero);
    let expect = 0.5f64.sqrt();
    if (got - expect).abs() > 1e-12 {
        return Err(format!("got {got}, expected {expect}"));
    }
    Ok(())
}

fn selftest_csv_determinism() -> Result<(), String> {
    use avgadam::harness::report::csv_string;
    use avgadam::harness::{run_experiment, ProblemKind};

    let mut cfg = ExperimentConfig::defaults_for(ProblemKind::PolyRegression);
    cfg.steps = 10;
    cfg.eval_every = 5;
    cfg.seeds = vec![0];
    cfg.test_points = 8;
    let a = run_experiment(&cfg);
    let b = run_experiment(&cfg);
    let a = strip_wallclock_column(&csv_string(&a[0]));
    let b = strip_wallclock_column(&csv_string(&b[0]));
    if a != b {
        return Err("reruns disagree".into());
    }
    Ok(())
}
