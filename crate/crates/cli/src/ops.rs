//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use webfps::corpus::write_corpus;
use webfps::dom::FeatureManifest;
use webfps::model::{
    cross_validate, read_samples_csv, write_samples_csv, CvOptions, ModelConfig, ModelRegistry,
    TrainingSample,
};
use webfps::pipeline::{FeatureTransform, ImportanceReport};
use webfps::platform::{
    default_event_rates, generate_training_grid, true_fps_clean, PageWorkload, PlatformSpec,
};
use webfps::sched::{
    compute_metrics, generate_trace, run_session, Governor, PageLibrary, RateProfile,
    SessionConfig, SessionPage, SessionReport,
};
use webfps::search::SearchMode;

use crate::util::{
    extract_corpus, fmt_f64, parse_f64_list, resolve_corpus, resolve_gesture, resolve_platform,
    write_run_manifest,
};
use crate::{CommonArgs, TrainArgs};

impl TrainArgs {
    fn to_config(&self, seed: u64) -> ModelConfig {
        ModelConfig {
            hidden_layers: self.layers,
            hidden_width: self.width,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch,
            seed,
            ..ModelConfig::default()
        }
    }
}

pub fn gen_corpus(out: &Path, count: usize, seed: u64) -> Result<()> {
    let ids = write_corpus(out, count, seed)?;
    write_run_manifest(out, "gen-corpus", seed, &serde_json::json!({ "count": count }))?;
    println!("wrote {} pages to {}", ids.len(), out.display());
    Ok(())
}

fn load_manifest(path: Option<&Path>) -> Result<FeatureManifest> {
    match path {
        Some(p) => Ok(FeatureManifest::from_file(p)?),
        None => Ok(FeatureManifest::default_manifest()),
    }
}

pub fn extract(corpus: Option<&Path>, out: &Path, manifest_path: Option<&Path>) -> Result<()> {
    let manifest = load_manifest(manifest_path)?;
    let corpus = resolve_corpus(corpus)?;
    let rows = extract_corpus(&corpus, &manifest)?;
    if let Some(dir) = out.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(out)?);
    writeln!(w, "# manifest_version={}", manifest.version)?;
    writeln!(w, "page_id,{}", manifest.feature_names().join(","))?;
    for (id, values) in &rows {
        let vals: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{id},{}", vals.join(","))?;
    }
    w.flush()?;
    println!("extracted {} pages -> {}", rows.len(), out.display());
    Ok(())
}

/// Projects corpus rows into workloads + principal components under a
/// fitted transform.
fn project_pages(
    rows: &[(String, Vec<f64>)],
    manifest: &FeatureManifest,
    platform: &PlatformSpec,
    transform: &FeatureTransform,
) -> Result<Vec<(PageWorkload, Vec<f64>)>> {
    let weights = platform.complexity_weights();
    rows.iter()
        .map(|(id, raw)| {
            let rawv = webfps::dom::RawFeatureVector {
                values: raw.clone(),
                manifest_version: manifest.version.clone(),
            };
            let wl = PageWorkload::from_features(id, &rawv, manifest, &weights)?;
            let pcs = transform.project(raw)?;
            Ok((wl, pcs))
        })
        .collect()
}

pub fn gen_data(common: &CommonArgs, pages: usize) -> Result<()> {
    let manifest = FeatureManifest::default_manifest();
    let platform = resolve_platform(&common.platform)?;
    let gesture = resolve_gesture(&common.gesture)?;
    let corpus = resolve_corpus(common.corpus.as_deref())?;
    let mut rows = extract_corpus(&corpus, &manifest)?;
    if pages > 0 {
        if rows.len() < pages {
            bail!("corpus has {} pages, --pages asked for {pages}", rows.len());
        }
        rows.truncate(pages);
    }

    let raw: Vec<Vec<f64>> = rows.iter().map(|(_, r)| r.clone()).collect();
    let transform = FeatureTransform::fit(&raw, &manifest.version, 0.95, 49)?;
    let projected = project_pages(&rows, &manifest, &platform, &transform)?;
    let samples = generate_training_grid(
        &projected,
        &default_event_rates(),
        &platform,
        gesture,
        common.seed,
    );

    fs::create_dir_all(&common.out)?;
    transform.save(common.out.join("transform.json"))?;
    let csv_path = common.out.join(format!("train-{}.csv", gesture.name()));
    let mut w = BufWriter::new(File::create(&csv_path)?);
    write_samples_csv(&samples, &mut w)?;
    w.flush()?;
    write_run_manifest(&common.out, "gen-data", common.seed, common)?;
    println!(
        "{} samples ({} pages x {} rates x {} settings) -> {}",
        samples.len(),
        projected.len(),
        default_event_rates().len(),
        platform.settings().len(),
        csv_path.display()
    );
    Ok(())
}

pub fn train_cmd(data: &Path, transform: &Path, out: &Path, seed: u64, targs: &TrainArgs) -> Result<()> {
    let transform = FeatureTransform::load(transform)?;
    let samples = read_samples_csv(BufReader::new(
        File::open(data).with_context(|| format!("opening {}", data.display()))?,
    ))?;
    let mut by_gesture: BTreeMap<_, Vec<TrainingSample>> = BTreeMap::new();
    for s in samples {
        by_gesture.entry(s.gesture).or_default().push(s);
    }
    let cfg = targs.to_config(seed);
    let mut registry = ModelRegistry::new();
    for (gesture, group) in &by_gesture {
        let model = webfps::model::train(group, &cfg, &transform.manifest_version)?;
        println!(
            "{}: {} samples, final train loss {:.6}",
            gesture.name(),
            group.len(),
            model.final_train_loss.unwrap_or(f64::NAN)
        );
        registry.insert(model)?;
    }
    if let Some(dir) = out.parent() {
        fs::create_dir_all(dir)?;
    }
    registry.save(out)?;
    if let Some(dir) = out.parent() {
        write_run_manifest(dir, "train", seed, targs)?;
    }
    println!("models -> {}", out.display());
    Ok(())
}

pub fn eval_cmd(
    common: &CommonArgs,
    folds: usize,
    pages: usize,
    with_linear: bool,
    targs: &TrainArgs,
) -> Result<()> {
    let manifest = FeatureManifest::default_manifest();
    let platform = resolve_platform(&common.platform)?;
    let gesture = resolve_gesture(&common.gesture)?;
    let corpus = resolve_corpus(common.corpus.as_deref())?;
    let mut rows = extract_corpus(&corpus, &manifest)?;
    if pages > 0 && rows.len() > pages {
        rows.truncate(pages);
    }

    let mut opts = CvOptions::new(gesture, default_event_rates(), common.seed);
    opts.folds = folds;
    opts.with_linear = with_linear;
    let cfg = targs.to_config(common.seed);
    let reports = cross_validate(&rows, &manifest, &platform, &cfg, &opts)?;

    fs::create_dir_all(&common.out)?;
    let mut w = BufWriter::new(File::create(common.out.join("cv-folds.csv"))?);
    writeln!(
        w,
        "fold,n_train_pages,n_valid_pages,n_components,mean_error,geometric_mean_error,linear_mean_error"
    )?;
    for r in &reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.fold,
            r.n_train_pages,
            r.n_valid_pages,
            r.n_components,
            fmt_f64(r.mean_error),
            fmt_f64(r.geometric_mean_error),
            r.linear_mean_error.map(fmt_f64).unwrap_or_default()
        )?;
    }
    w.flush()?;
    write_run_manifest(&common.out, "eval", common.seed, common)?;

    let mean = reports.iter().map(|r| r.mean_error).sum::<f64>() / reports.len() as f64;
    println!("mean CV relative error: {:.4}", mean);
    if with_linear {
        let lmean = reports
            .iter()
            .filter_map(|r| r.linear_mean_error)
            .sum::<f64>()
            / reports.len() as f64;
        println!("mean CV relative error (least squares): {:.4}", lmean);
    }
    Ok(())
}

/// Default simulated users: 20 FPS floors evenly spaced over [20, 45].
pub fn default_fps_floors() -> Vec<f64> {
    (0..20).map(|i| 20.0 + 25.0 * i as f64 / 19.0).collect()
}

/// QoS of a window FPS trace against a floor (mean normalized deficit).
fn qos_of(window_fps: &[f64], fps_min: f64) -> f64 {
    if window_fps.is_empty() {
        return 0.0;
    }
    window_fps
        .iter()
        .map(|&f| (fps_min - f).max(0.0) / fps_min)
        .sum::<f64>()
        / window_fps.len() as f64
}

#[derive(Serialize)]
struct SessionRow<'a> {
    page: &'a str,
    user: usize,
    fps_min: f64,
    rate_px_s: f64,
    governor: &'a str,
    energy_j: f64,
    qos_violation: f64,
    reconfigurations: usize,
    setting_histogram: &'a [u64],
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    common: &CommonArgs,
    model: &Path,
    transform: &Path,
    fps_min: Option<&str>,
    governors: Option<&str>,
    search_mode: &str,
    fps_margin: f64,
    duration_ms: f64,
) -> Result<()> {
    let manifest = FeatureManifest::default_manifest();
    let platform = resolve_platform(&common.platform)?;
    let gesture = resolve_gesture(&common.gesture)?;
    let corpus = resolve_corpus(common.corpus.as_deref())?;
    let rows = extract_corpus(&corpus, &manifest)?;
    let registry = ModelRegistry::load(model)?;
    let transform = FeatureTransform::load(transform)?;

    let search_mode = match search_mode {
        "literal" => SearchMode::Literal,
        "min-feasible" => SearchMode::MinFeasible,
        other => bail!("unknown search mode '{other}' (literal|min-feasible)"),
    };
    let users: Vec<f64> = match fps_min {
        Some(s) => parse_f64_list(s)?,
        None => default_fps_floors(),
    };
    let governors: Vec<Governor> = match governors {
        Some(s) => s
            .split(',')
            .map(|t| Governor::from_name(t.trim()).with_context(|| format!("unknown governor '{t}'")))
            .collect::<Result<_>>()?,
        None => Governor::ALL.to_vec(),
    };
    let rates = default_event_rates();

    // page library with complexities
    let weights = platform.complexity_weights();
    let mut library = PageLibrary::new();
    let mut page_ids = Vec::new();
    for (id, raw) in &rows {
        let rawv = webfps::dom::RawFeatureVector {
            values: raw.clone(),
            manifest_version: manifest.version.clone(),
        };
        let wl = PageWorkload::from_features(id, &rawv, &manifest, &weights)?;
        library.add(SessionPage {
            id: id.clone(),
            raw: raw.clone(),
            complexity: wl.complexity,
        });
        page_ids.push(id.clone());
    }

    fs::create_dir_all(&common.out)?;
    let mut agg = BufWriter::new(File::create(common.out.join("aggregate.csv"))?);
    writeln!(
        agg,
        "page,user,fps_min,rate_px_s,governor,energy_j,qos_violation,energy_reduction,reconfigurations"
    )?;
    let mut jsonl: BTreeMap<&str, BufWriter<File>> = BTreeMap::new();
    for g in &governors {
        jsonl.insert(
            g.name(),
            BufWriter::new(File::create(common.out.join(format!("sessions-{}.jsonl", g.name())))?),
        );
    }

    let mk_cfg = |gov: Governor, floor: f64| {
        let mut cfg = SessionConfig::new(gov);
        cfg.fps_min = floor;
        cfg.search_mode = search_mode;
        cfg.fps_margin = fps_margin;
        cfg
    };

    let mut sessions = 0usize;
    for page in &page_ids {
        for &rate in &rates {
            let trace = generate_trace(
                page,
                gesture,
                duration_ms,
                100.0,
                RateProfile::Constant(rate),
                0.0,
                common.seed,
            )?;
            // the utilization-driven governors don't see fps_min, so one
            // run serves every user; QoS is rescored per floor
            let mut shared: BTreeMap<&str, SessionReport> = BTreeMap::new();
            for gov in [Governor::Interactive, Governor::Ondemand] {
                if governors.contains(&gov) {
                    let rep = run_session(&trace, &mk_cfg(gov, 30.0), &platform, &registry, &transform, &library)?;
                    shared.insert(gov.name(), rep);
                }
            }
            let baseline = shared.get("interactive").cloned();

            for (user, &floor) in users.iter().enumerate() {
                for gov in &governors {
                    let rep = match gov {
                        Governor::Interactive | Governor::Ondemand => {
                            let mut rep = shared[gov.name()].clone();
                            rep.fps_min = floor;
                            rep.qos_violation = qos_of(&rep.window_fps, floor);
                            rep
                        }
                        _ => run_session(&trace, &mk_cfg(*gov, floor), &platform, &registry, &transform, &library)?,
                    };
                    let reduction = match &baseline {
                        Some(b) if b.total_energy_j > 0.0 => compute_metrics(&rep, b)?.energy_reduction,
                        _ => 0.0,
                    };
                    writeln!(
                        agg,
                        "{page},{user},{},{},{},{},{},{},{}",
                        fmt_f64(floor),
                        fmt_f64(rate),
                        gov.name(),
                        fmt_f64(rep.total_energy_j),
                        fmt_f64(rep.qos_violation),
                        fmt_f64(reduction),
                        rep.reconfigurations
                    )?;
                    let row = SessionRow {
                        page,
                        user,
                        fps_min: floor,
                        rate_px_s: rate,
                        governor: gov.name(),
                        energy_j: rep.total_energy_j,
                        qos_violation: rep.qos_violation,
                        reconfigurations: rep.reconfigurations,
                        setting_histogram: &rep.setting_histogram,
                    };
                    writeln!(jsonl.get_mut(gov.name()).unwrap(), "{}", serde_json::to_string(&row)?)?;
                    sessions += 1;
                }
            }
        }
    }
    agg.flush()?;
    for (_, mut w) in jsonl {
        w.flush()?;
    }
    write_run_manifest(&common.out, "simulate", common.seed, common)?;
    println!(
        "{sessions} sessions ({} pages x {} users x {} rates x {} governors) -> {}",
        page_ids.len(),
        users.len(),
        rates.len(),
        governors.len(),
        common.out.display()
    );
    Ok(())
}

pub fn report(sessions: &Path, out: &Path, corpus: Option<&Path>, platform: &str) -> Result<()> {
    let agg_path = sessions.join("aggregate.csv");
    if !agg_path.exists() {
        bail!("no aggregate.csv under {}; run simulate first", sessions.display());
    }
    let reader = BufReader::new(File::open(&agg_path)?);
    let mut lines = reader.lines();
    let header = lines.next().context("aggregate.csv is empty")??;
    let cols: Vec<&str> = header.split(',').collect();
    let col = |name: &str| -> Result<usize> {
        cols.iter()
            .position(|c| *c == name)
            .with_context(|| format!("aggregate.csv lacks column {name}"))
    };
    let (c_gov, c_energy, c_qos, c_red) = (
        col("governor")?,
        col("energy_j")?,
        col("qos_violation")?,
        col("energy_reduction")?,
    );

    #[derive(Default)]
    struct Acc {
        n: usize,
        energy: f64,
        qos: f64,
        reduction: f64,
        qos_values: Vec<f64>,
    }
    let mut accs: BTreeMap<String, Acc> = BTreeMap::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let acc = accs.entry(f[c_gov].to_string()).or_default();
        acc.n += 1;
        acc.energy += f[c_energy].parse::<f64>()?;
        let q = f[c_qos].parse::<f64>()?;
        acc.qos += q;
        acc.qos_values.push(q);
        acc.reduction += f[c_red].parse::<f64>()?;
    }
    if accs.is_empty() {
        bail!("aggregate.csv has no session rows");
    }

    fs::create_dir_all(out)?;
    let mut w = BufWriter::new(File::create(out.join("energy-summary.csv"))?);
    writeln!(w, "governor,sessions,mean_energy_j,mean_energy_reduction")?;
    for (gov, a) in &accs {
        writeln!(
            w,
            "{gov},{},{},{}",
            a.n,
            fmt_f64(a.energy / a.n as f64),
            fmt_f64(a.reduction / a.n as f64)
        )?;
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(out.join("qos-summary.csv"))?);
    writeln!(w, "governor,sessions,mean_qos_violation,p95_qos_violation")?;
    for (gov, a) in accs.iter_mut() {
        a.qos_values.sort_by(f64::total_cmp);
        let p95 = a.qos_values[((a.qos_values.len() - 1) as f64 * 0.95) as usize];
        writeln!(w, "{gov},{},{},{}", a.n, fmt_f64(a.qos / a.n as f64), fmt_f64(p95))?;
    }
    w.flush()?;

    // per-governor setting histograms from the session JSONL files
    let mut w = BufWriter::new(File::create(out.join("setting-histogram.csv"))?);
    writeln!(w, "governor,setting_index,windows")?;
    for gov in accs.keys() {
        let path = sessions.join(format!("sessions-{gov}.jsonl"));
        if !path.exists() {
            continue;
        }
        let mut hist: Vec<u64> = Vec::new();
        for line in BufReader::new(File::open(&path)?).lines() {
            let v: serde_json::Value = serde_json::from_str(&line?)?;
            if let Some(arr) = v["setting_histogram"].as_array() {
                if hist.len() < arr.len() {
                    hist.resize(arr.len(), 0);
                }
                for (i, x) in arr.iter().enumerate() {
                    hist[i] += x.as_u64().unwrap_or(0);
                }
            }
        }
        for (i, count) in hist.iter().enumerate() {
            writeln!(w, "{gov},{i},{count}")?;
        }
    }
    w.flush()?;

    // feature importance needs the corpus; optional
    if let Some(corpus) = corpus {
        let manifest = FeatureManifest::default_manifest();
        let platform = resolve_platform(platform)?;
        let rows = extract_corpus(corpus, &manifest)?;
        let raw: Vec<Vec<f64>> = rows.iter().map(|(_, r)| r.clone()).collect();
        let transform = FeatureTransform::fit(&raw, &manifest.version, 0.95, 49)?;
        let weights = platform.complexity_weights();
        let s = platform.max_setting();
        let targets: Vec<f64> = rows
            .iter()
            .map(|(id, r)| {
                let rawv = webfps::dom::RawFeatureVector {
                    values: r.clone(),
                    manifest_version: manifest.version.clone(),
                };
                let wl = PageWorkload::from_features(id, &rawv, &manifest, &weights)?;
                Ok(true_fps_clean(&wl, 2000.0, &s, &platform))
            })
            .collect::<Result<_>>()?;
        let imp = ImportanceReport::compute(&transform, &raw, &targets, manifest.feature_names())?;
        let mut w = BufWriter::new(File::create(out.join("importance.csv"))?);
        writeln!(w, "feature,varimax_contribution,gain_ratio")?;
        for i in 0..imp.feature_names.len() {
            writeln!(
                w,
                "{},{},{}",
                imp.feature_names[i],
                fmt_f64(imp.varimax_contribution[i]),
                fmt_f64(imp.gain_ratio[i])
            )?;
        }
        w.flush()?;
    }
    println!("reports -> {}", out.display());
    Ok(())
}

pub fn layer_sweep(common: &CommonArgs, layers: &str, pages: usize, targs: &TrainArgs) -> Result<()> {
    let manifest = FeatureManifest::default_manifest();
    let platform = resolve_platform(&common.platform)?;
    let gesture = resolve_gesture(&common.gesture)?;
    let corpus = resolve_corpus(common.corpus.as_deref())?;
    let mut rows = extract_corpus(&corpus, &manifest)?;
    if pages > 0 && rows.len() > pages {
        rows.truncate(pages);
    }
    let layer_counts: Vec<usize> = layers
        .split(',')
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad layer count '{t}'")))
        .collect::<Result<_>>()?;
    if layer_counts.iter().any(|&l| l < 1) {
        bail!("layer counts must be >= 1");
    }

    let opts = CvOptions::new(gesture, default_event_rates(), common.seed);
    fs::create_dir_all(&common.out)?;
    let mut w = BufWriter::new(File::create(common.out.join("layer-sweep.csv"))?);
    writeln!(w, "layers,mean_error")?;
    for &l in &layer_counts {
        let cfg = ModelConfig {
            hidden_layers: l,
            ..targs.to_config(common.seed)
        };
        let reports = cross_validate(&rows, &manifest, &platform, &cfg, &opts)?;
        let mean = reports.iter().map(|r| r.mean_error).sum::<f64>() / reports.len() as f64;
        writeln!(w, "{l},{}", fmt_f64(mean))?;
        println!("layers={l}: mean CV error {mean:.4}");
    }
    w.flush()?;
    write_run_manifest(&common.out, "layer-sweep", common.seed, common)?;
    Ok(())
}
