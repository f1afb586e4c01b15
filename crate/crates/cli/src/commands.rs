use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc::sync_channel;
use std::sync::Mutex;
use std::thread;

use anyhow::{bail, Context, Result};
use maxsketch::calibrate::{calibrate, CalibrationParams};
use maxsketch::estimators::norm_moment_with;
use maxsketch::{
    distance, k_for_criterion, k_for_norm, k_for_point, norm_median, point_query, EstimatorKind,
    MaxStableSketch, MomentRange, NormEstimate, SizingParams, SketchConfig, StreamItem,
};
use serde_json::json;

use crate::input::RecordReader;
use crate::{
    BuildArgs, CalibrateArgs, Cli, Command, DistanceArgs, EstimateArgs, Estimator, EstimatorArgs,
    Goal, MergeArgs, PointArgs, SizeArgs, What,
};

const BATCH: usize = 4096;

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let json = cli.json;
    match cli.command {
        Command::Build(args) => cmd_build(&args, json, out, err),
        Command::Merge(args) => cmd_merge(&args, json, out),
        Command::Estimate(args) => cmd_estimate(&args, json, out),
        Command::Distance(args) => cmd_distance(&args, json, out),
        Command::Point(args) => cmd_point(&args, json, out),
        Command::Size(args) => cmd_size(&args, json, out),
        Command::Calibrate(args) => cmd_calibrate(&args, json, out, err),
    }
}

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    match path {
        None => Ok(Box::new(BufReader::new(io::stdin().lock()))),
        Some(p) if is_stdio(p) => Ok(Box::new(BufReader::new(io::stdin().lock()))),
        Some(p) => {
            let f = File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            Ok(Box::new(BufReader::with_capacity(1 << 16, f)))
        }
    }
}

fn write_sketch(path: &Path, sketch: &MaxStableSketch) -> Result<()> {
    let bytes = sketch.to_bytes();
    if is_stdio(path) {
        io::stdout().lock().write_all(&bytes)?;
        Ok(())
    } else {
        fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
    }
}

pub fn read_sketch(path: &Path) -> Result<MaxStableSketch> {
    let bytes = if is_stdio(path) {
        let mut buf = Vec::new();
        io::stdin().lock().read_to_end(&mut buf)?;
        buf
    } else {
        fs::read(path).with_context(|| format!("cannot read {}", path.display()))?
    };
    MaxStableSketch::from_bytes(&bytes).with_context(|| format!("{}", path.display()))
}

fn read_compatible(paths: &[PathBuf]) -> Result<Vec<MaxStableSketch>> {
    let mut sketches: Vec<MaxStableSketch> = Vec::with_capacity(paths.len());
    for p in paths {
        let s = read_sketch(p)?;
        if let Some(first) = sketches.first() {
            first
                .config()
                .ensure_compatible(s.config())
                .with_context(|| format!("{} does not match {}", p.display(), paths[0].display()))?;
        }
        sketches.push(s);
    }
    Ok(sketches)
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct BuildStats {
    pub items: u64,
    /// Repeated indices seen, when duplicate tracking is on.
    pub duplicates: Option<u64>,
}

/// Builds a sketch from a record stream. Memory is O(K · workers) plus one
/// bounded queue of parsed batches, independent of the number of records
/// (duplicate tracking, when enabled, adds one entry per distinct index).
pub fn build_from_reader<R: BufRead>(
    reader: R,
    config: SketchConfig,
    workers: usize,
    check_duplicates: bool,
) -> Result<(MaxStableSketch, BuildStats)> {
    let mut records = RecordReader::new(reader);
    let mut seen = check_duplicates.then(HashSet::new);
    let mut stats = BuildStats {
        items: 0,
        duplicates: check_duplicates.then_some(0),
    };
    let mut note = |item: &StreamItem, stats: &mut BuildStats| {
        stats.items += 1;
        if let Some(seen) = seen.as_mut() {
            if !seen.insert(item.index) {
                *stats.duplicates.as_mut().unwrap() += 1;
            }
        }
    };

    if workers <= 1 {
        let mut sketch = MaxStableSketch::new(config);
        while let Some(item) = records.next_record()? {
            note(&item, &mut stats);
            sketch.update(item)?;
        }
        return Ok((sketch, stats));
    }

    let (tx, rx) = sync_channel::<Vec<StreamItem>>(2 * workers);
    let rx = Mutex::new(rx);
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                let rx = &rx;
                scope.spawn(move || {
                    let mut sketch = MaxStableSketch::new(config);
                    loop {
                        let batch = match rx.lock().expect("queue lock").recv() {
                            Ok(b) => b,
                            Err(_) => break,
                        };
                        for item in batch {
                            sketch.update(item).expect("records are validated on parse");
                        }
                    }
                    sketch
                })
            })
            .collect();

        let produced = (|| -> Result<()> {
            let mut batch = Vec::with_capacity(BATCH);
            while let Some(item) = records.next_record()? {
                note(&item, &mut stats);
                batch.push(item);
                if batch.len() == BATCH {
                    tx.send(std::mem::replace(&mut batch, Vec::with_capacity(BATCH)))?;
                }
            }
            if !batch.is_empty() {
                tx.send(batch)?;
            }
            Ok(())
        })();
        drop(tx);

        let mut merged = MaxStableSketch::new(config);
        for h in handles {
            merged.merge_from(&h.join().expect("worker panicked"))?;
        }
        produced.map(|()| (merged, stats))
    })
}

fn cmd_build(args: &BuildArgs, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let config = SketchConfig::new(args.alpha, args.k, args.seed)?;
    if args.workers == 0 {
        bail!("--workers must be at least 1");
    }
    let reader = open_input(args.input.as_deref())?;
    let (sketch, stats) = build_from_reader(reader, config, args.workers, args.check_duplicates)?;
    if let Some(d) = stats.duplicates.filter(|&d| d > 0) {
        writeln!(
            err,
            "note: {d} repeated index occurrence(s) merged with max semantics"
        )?;
    }
    write_sketch(&args.out, &sketch)?;
    if json && !is_stdio(&args.out) {
        let mut obj = json!({
            "command": "build",
            "items": stats.items,
            "alpha": config.alpha(),
            "k": config.k(),
            "seed": config.master_seed(),
            "out": args.out.display().to_string(),
        });
        if let Some(d) = stats.duplicates {
            obj["duplicates"] = json!(d);
        }
        writeln!(out, "{obj}")?;
    }
    Ok(())
}

fn cmd_merge(args: &MergeArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let sketches = read_compatible(&args.inputs)?;
    let mut merged = sketches[0].clone();
    for s in &sketches[1..] {
        merged.merge_from(s)?;
    }
    write_sketch(&args.out, &merged)?;
    if json && !is_stdio(&args.out) {
        writeln!(
            out,
            "{}",
            json!({"command": "merge", "inputs": sketches.len(), "out": args.out.display().to_string()})
        )?;
    }
    Ok(())
}

fn kind_for(args: &EstimatorArgs, alpha: f64) -> EstimatorKind {
    match args.estimator {
        Estimator::Median => EstimatorKind::Median,
        Estimator::Moment => EstimatorKind::Moment {
            r: args.r.unwrap_or(alpha / 4.0),
        },
    }
}

fn range_for(args: &EstimatorArgs) -> MomentRange {
    if args.extended_r {
        MomentRange::Extended
    } else {
        MomentRange::Guaranteed
    }
}

fn estimate(sketch: &MaxStableSketch, args: &EstimatorArgs) -> Result<NormEstimate> {
    match kind_for(args, sketch.alpha()) {
        EstimatorKind::Median => Ok(norm_median(sketch)),
        EstimatorKind::Moment { r } => Ok(norm_moment_with(sketch, r, range_for(args))?),
    }
}

fn cmd_estimate(args: &EstimateArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let sketches = read_compatible(&args.sketches)?;
    let what = match args.what {
        What::Norm if sketches.len() != 1 => {
            bail!("--what norm takes exactly one sketch; use --what dominance for several")
        }
        What::Norm => "norm",
        What::Dominance => "dominance",
    };
    let mut joint = sketches[0].clone();
    for s in &sketches[1..] {
        joint.merge_from(s)?;
    }
    let est = estimate(&joint, &args.estimator)?;
    if json {
        writeln!(
            out,
            "{}",
            json!({
                "what": what,
                "estimator": est.kind.to_string(),
                "value": est.value,
                "k": est.k_used,
                "sketches": sketches.len(),
            })
        )?;
    } else {
        writeln!(out, "{}", est.value)?;
    }
    Ok(())
}

fn cmd_distance(args: &DistanceArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let sketches = read_compatible(&[args.a.clone(), args.b.clone()])?;
    let (a, b) = (&sketches[0], &sketches[1]);
    let kind = kind_for(&args.estimator, a.alpha());
    let d = if let (EstimatorKind::Moment { r }, MomentRange::Extended) = (kind, range_for(&args.estimator)) {
        // Same identity as `distance`, routed through the extended-range estimator.
        let alpha = a.alpha();
        let joint = a.merge(b)?;
        let p = |s: &MaxStableSketch| -> Result<f64> {
            Ok(norm_moment_with(s, r, MomentRange::Extended)?.value.powf(alpha))
        };
        maxsketch::DistanceEstimate {
            raw: 2.0 * p(&joint)? - p(a)? - p(b)?,
            kind,
        }
    } else {
        distance(a, b, kind)?
    };
    if json {
        writeln!(
            out,
            "{}",
            json!({"estimator": kind.to_string(), "raw": d.raw, "clamped": d.clamped()})
        )?;
    } else {
        writeln!(out, "raw\t{}\nclamped\t{}", d.raw, d.clamped())?;
    }
    Ok(())
}

fn cmd_point(args: &PointArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let sketch = read_sketch(&args.sketch)?;
    let r = point_query(&sketch, args.index, args.tolerance)?;
    if json {
        writeln!(
            out,
            "{}",
            json!({
                "index": args.index,
                "estimate": r.estimate,
                "criterion": r.criterion_met,
                "criterion_available": r.criterion_available(),
                "g1": r.g_head.0,
                "g2": r.g_head.1,
                "tolerance": r.tolerance,
            })
        )?;
    } else {
        writeln!(out, "estimate\t{}\ncriterion\t{}", r.estimate, r.criterion_met)?;
        if !r.criterion_available() {
            writeln!(out, "note\tcriterion needs k >= 2")?;
        }
    }
    Ok(())
}

fn cmd_size(args: &SizeArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let need_alpha = || {
        args.alpha
            .with_context(|| "--alpha is required for this goal".to_string())
    };
    let (goal, k) = match args.goal {
        Goal::Norm => (
            "norm",
            k_for_norm(&SizingParams::new(args.epsilon, args.delta, args.c)?),
        ),
        Goal::Point => ("point", k_for_point(args.epsilon, args.delta, need_alpha()?)?),
        Goal::Criterion => {
            let alpha = need_alpha()?;
            let theta = args.theta.unwrap_or(alpha);
            (
                "criterion",
                k_for_criterion(args.epsilon, args.delta, theta, alpha)?,
            )
        }
    };
    if json {
        writeln!(out, "{}", json!({"goal": goal, "k": k}))?;
    } else {
        writeln!(out, "{k}")?;
    }
    Ok(())
}

fn cmd_calibrate(
    args: &CalibrateArgs,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let kind = match args.estimator {
        Estimator::Median => EstimatorKind::Median,
        Estimator::Moment => EstimatorKind::Moment {
            r: args.r.unwrap_or(args.alpha / 4.0),
        },
    };
    let params = CalibrationParams {
        signal_len: args.signal_len,
        rng_seed: args.rng_seed,
        k_max: args.k_max,
        ..CalibrationParams::new(args.alpha, kind, args.epsilon, args.delta, args.trials)
    };
    let cal = calibrate(&params)?;
    for w in &cal.warnings {
        writeln!(err, "warning: {w}")?;
    }
    if json {
        writeln!(
            out,
            "{}",
            json!({
                "alpha": args.alpha,
                "estimator": kind.to_string(),
                "epsilon": args.epsilon,
                "delta": args.delta,
                "trials": cal.trials,
                "k": cal.k,
                "c": cal.c,
                "c_low": cal.c_band.0,
                "c_high": cal.c_band.1,
                "coverage": cal.coverage,
            })
        )?;
    } else {
        let fmt = |c: Option<f64>| c.map_or("n/a".to_string(), |c| format!("{c:.4}"));
        writeln!(
            out,
            "C\t{}\nK\t{}\ncoverage\t{:.4}\nband\t[{}, {}]",
            fmt(cal.c),
            cal.k.map_or("n/a".to_string(), |k| k.to_string()),
            cal.coverage,
            fmt(cal.c_band.0),
            fmt(cal.c_band.1),
        )?;
    }
    Ok(())
}
