//! CSV, SVG, and metadata artifacts for finished runs.

use super::config::{averager_slug, averager_text, schedule_text, ExperimentConfig, ProblemKind};
use super::{EvalRow, RunRecord};
use std::fmt::Write as _;
use std::path::PathBuf;

pub const CSV_HEADER: &str = "step,train_loss,test_error_raw,test_error_averaged,lr,wallclock_ms";

/// One run as CSV: the fixed header plus one row per evaluation step.
/// Floats print in shortest round-trip form, so parsing recovers the exact
/// values.
pub fn csv_string(record: &RunRecord) -> String {
    let mut s = String::with_capacity(64 * (record.rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for row in &record.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            row.step,
            row.train_loss,
            row.test_error_raw,
            row.test_error_averaged,
            row.lr,
            row.wallclock_ms
        );
    }
    s
}

pub fn parse_csv(text: &str) -> Result<Vec<EvalRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(format!("bad header: {other:?}")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(format!("row {}: expected 6 fields, got {}", i + 1, fields.len()));
        }
        let field = |k: usize| -> Result<f64, String> {
            fields[k].parse().map_err(|_| format!("row {}: bad number `{}`", i + 1, fields[k]))
        };
        rows.push(EvalRow {
            step: fields[0].parse().map_err(|_| format!("row {}: bad step", i + 1))?,
            train_loss: field(1)?,
            test_error_raw: field(2)?,
            test_error_averaged: field(3)?,
            lr: field(4)?,
            wallclock_ms: field(5)?,
        });
    }
    Ok(rows)
}

/// Comparison view of a CSV with the informative-only wallclock column
/// removed; two deterministic reruns must agree on this view byte for byte.
pub fn strip_wallclock_column(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

/// FNV-1a over the canonical identity text: every field that changes the
/// numbers (problem, optimizer, averager, schedule, batch, steps, cadence,
/// test set size), excluding the seed list and output directory.
pub fn config_hash(cfg: &ExperimentConfig) -> u64 {
    fnv1a64(identity_text(cfg).as_bytes())
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// The hashed part of the config, itself a loadable config file.
pub fn identity_text(cfg: &ExperimentConfig) -> String {
    format!(
        "problem = {}\noptimizer = {}\naverager = {}\nschedule = {}\nbatch_size = {}\nsteps = {}\neval_every = {}\ntest_points = {}\n",
        cfg.problem.name(),
        cfg.optimizer.name(),
        averager_text(cfg.averager),
        schedule_text(&cfg.schedule),
        cfg.batch_size,
        cfg.steps,
        cfg.eval_every,
        cfg.test_points,
    )
}

pub fn experiment_slug(cfg: &ExperimentConfig) -> String {
    format!("{}_{}_{}", cfg.problem.name(), cfg.optimizer.name(), averager_slug(cfg.averager))
}

fn metric_description(problem: ProblemKind) -> &'static str {
    match problem {
        ProblemKind::PolyRegression => {
            "L2 distance to sin(pi*x) under the uniform law on [-1,1], via 256-node Gauss-Legendre quadrature, noise-free"
        }
        ProblemKind::CubicSupervised | ProblemKind::GaussSupervised => {
            "relative L2 error against the noise-free target on test_points inputs drawn once per seed from the test stream"
        }
        ProblemKind::HeatDkm => {
            "relative L2 error against the closed-form solution |x|^2 + 2*d*T on test_points inputs drawn once per seed from the test stream"
        }
    }
}

/// Human-readable sidecar describing the experiment and per-seed outcomes.
pub fn meta_string(cfg: &ExperimentConfig, records: &[RunRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# experiment metadata");
    let version = records.first().map_or(env!("CARGO_PKG_VERSION"), |r| r.version.as_str());
    let _ = writeln!(s, "version = {version}");
    let _ = writeln!(s, "config_hash = {:016x}", config_hash(cfg));
    let _ = writeln!(s, "test_metric = {}", metric_description(cfg.problem));
    let _ = writeln!(s, "columns = {CSV_HEADER}");
    s.push_str(&identity_text(cfg));
    let seeds: Vec<String> = cfg.seeds.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(s, "seeds = {}", seeds.join(","));
    let _ = writeln!(s, "out_dir = {}", cfg.out_dir.display());
    let _ = writeln!(s, "# per-seed outcomes");
    for rec in records {
        let status = if rec.failed { "FAILED" } else { "ok" };
        let _ = writeln!(s, "seed {} = {status} ({} rows)", rec.seed, rec.rows.len());
    }
    s
}

/// Log-scale learning curves: median across the healthy seeds of the raw
/// and averaged test errors, one polyline each.
pub fn svg_string(cfg: &ExperimentConfig, records: &[RunRecord]) -> String {
    assert!(!records.is_empty(), "need at least one run to plot");
    let healthy: Vec<&RunRecord> = records.iter().filter(|r| !r.failed).collect();

    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const LEFT: f64 = 72.0;
    const RIGHT: f64 = 780.0;
    const TOP: f64 = 42.0;
    const BOTTOM: f64 = 455.0;

    let mut series: Vec<(String, &str, Vec<(u64, f64)>)> = Vec::new();
    if !healthy.is_empty() {
        let steps: Vec<u64> = healthy[0].rows.iter().map(|r| r.step).collect();
        let median_of = |pick: &dyn Fn(&EvalRow) -> f64| -> Vec<(u64, f64)> {
            steps
                .iter()
                .enumerate()
                .map(|(i, &step)| {
                    let mut vals: Vec<f64> = healthy.iter().map(|r| pick(&r.rows[i])).collect();
                    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let m = vals.len();
                    let med = if m % 2 == 1 {
                        vals[m / 2]
                    } else {
                        0.5 * (vals[m / 2 - 1] + vals[m / 2])
                    };
                    (step, med)
                })
                .collect()
        };
        series.push((
            format!("{} raw", cfg.optimizer.name()),
            "#d62728",
            median_of(&|r: &EvalRow| r.test_error_raw),
        ));
        series.push((
            format!("{}+{}", cfg.optimizer.name(), averager_slug(cfg.averager)),
            "#1f77b4",
            median_of(&|r: &EvalRow| r.test_error_averaged),
        ));
    }

    // log-decade y range over everything plotted
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, _, pts) in &series {
        for &(_, v) in pts {
            let lv = v.max(1e-16).log10();
            lo = lo.min(lv);
            hi = hi.max(lv);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = -1.0;
        hi = 1.0;
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    let hi = if hi <= lo { lo + 1.0 } else { hi };
    let max_step = series
        .iter()
        .flat_map(|(_, _, pts)| pts.iter().map(|&(s, _)| s))
        .max()
        .unwrap_or(1)
        .max(1);

    let x_of = |step: u64| LEFT + (step as f64 / max_step as f64) * (RIGHT - LEFT);
    let y_of = |v: f64| {
        let lv = v.max(1e-16).log10();
        BOTTOM - (lv - lo) / (hi - lo) * (BOTTOM - TOP)
    };

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"13\">"
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{LEFT}\" y=\"24\" font-size=\"15\">{}</text>",
        xml_escape(&format!("{}: median test error across {} seed(s)", experiment_slug(cfg), healthy.len()))
    );

    // y grid and labels, one per decade
    let mut d = lo;
    while d <= hi + 0.5 {
        let y = y_of(10f64.powf(d));
        let _ = writeln!(
            s,
            "<line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{RIGHT}\" y2=\"{y:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>"
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">1e{}</text>",
            LEFT - 8.0,
            y + 4.0,
            d as i64
        );
        d += 1.0;
    }
    // x axis ticks
    for i in 0..=4u64 {
        let step = max_step * i / 4;
        let x = x_of(step);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{BOTTOM}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#999999\" stroke-width=\"1\"/>",
            BOTTOM + 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{step}</text>",
            BOTTOM + 20.0
        );
    }
    let _ = writeln!(
        s,
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"#333333\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"#333333\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">step</text>",
        0.5 * (LEFT + RIGHT),
        H - 8.0
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{:.2}\" transform=\"rotate(-90 18 {:.2})\" text-anchor=\"middle\">test error</text>",
        0.5 * (TOP + BOTTOM),
        0.5 * (TOP + BOTTOM)
    );

    for (i, (label, color, pts)) in series.iter().enumerate() {
        let mut points = String::new();
        for &(step, v) in pts {
            let _ = write!(points, "{:.2},{:.2} ", x_of(step), y_of(v));
        }
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            points.trim_end()
        );
        let ly = TOP + 18.0 * i as f64 + 8.0;
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            RIGHT - 190.0,
            RIGHT - 160.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            RIGHT - 152.0,
            ly + 4.0,
            xml_escape(label)
        );
    }
    if healthy.is_empty() {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">all runs failed</text>",
            0.5 * (LEFT + RIGHT),
            0.5 * (TOP + BOTTOM)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub struct OutputPaths {
    pub csv_paths: Vec<PathBuf>,
    pub svg_path: PathBuf,
    pub meta_path: PathBuf,
}

/// Writes one CSV per seed plus the experiment SVG and metadata sidecar,
/// after all runs have finished. Filenames carry the config hash so
/// different experiments never collide in one directory.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    records: &[RunRecord],
) -> std::io::Result<OutputPaths> {
    assert!(!records.is_empty(), "need at least one run to report");
    std::fs::create_dir_all(&cfg.out_dir)?;
    let base = format!("{}_{:016x}", experiment_slug(cfg), config_hash(cfg));
    let mut csv_paths = Vec::with_capacity(records.len());
    for rec in records {
        let path = cfg.out_dir.join(format!("{base}_seed{}.csv", rec.seed));
        std::fs::write(&path, csv_string(rec))?;
        csv_paths.push(path);
    }
    let svg_path = cfg.out_dir.join(format!("{base}.svg"));
    std::fs::write(&svg_path, svg_string(cfg, records))?;
    let meta_path = cfg.out_dir.join(format!("{base}.meta.txt"));
    std::fs::write(&meta_path, meta_string(cfg, records))?;
    Ok(OutputPaths { csv_paths, svg_path, meta_path })
}
