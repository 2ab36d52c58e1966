//! Shared plumbing: corpus/platform resolution, feature extraction, and
//! run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};
use webfps::corpus::corpus_pages;
use webfps::dom::{extract_features, DocumentLoader, FeatureManifest};
use webfps::platform::{load_platform_spec, Gesture, PlatformSpec};

pub const CORPUS_ENV: &str = "WEBFPS_CORPUS";

/// --corpus flag, falling back to $WEBFPS_CORPUS.
pub fn resolve_corpus(flag: Option<&Path>) -> Result<PathBuf> {
    if let Some(p) = flag {
        return Ok(p.to_path_buf());
    }
    match std::env::var_os(CORPUS_ENV) {
        Some(v) => Ok(PathBuf::from(v)),
        None => bail!("no corpus: pass --corpus or set ${CORPUS_ENV}"),
    }
}

/// "jetson-tx2" / "odroid-xu3" or a spec file path.
pub fn resolve_platform(name: &str) -> Result<PlatformSpec> {
    let spec = match name {
        "jetson-tx2" => PlatformSpec::jetson_tx2_like(),
        "odroid-xu3" => PlatformSpec::odroid_xu3_like(),
        path => load_platform_spec(path).with_context(|| format!("loading platform spec {path}"))?,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn resolve_gesture(name: &str) -> Result<Gesture> {
    Gesture::from_name(name).with_context(|| format!("unknown gesture '{name}' (scroll|pinch)"))
}

/// Extracts every page in the corpus: (page id, raw feature vector),
/// sorted by id.
pub fn extract_corpus(dir: &Path, manifest: &FeatureManifest) -> Result<Vec<(String, Vec<f64>)>> {
    let paths = corpus_pages(dir).with_context(|| format!("reading corpus dir {}", dir.display()))?;
    if paths.is_empty() {
        bail!("corpus {} contains no .html pages", dir.display());
    }
    let loader = DocumentLoader::new();
    let mut out = Vec::with_capacity(paths.len());
    for p in &paths {
        let doc = loader.load(p).with_context(|| format!("loading {}", p.display()))?;
        let id = p
            .file_stem()
            .and_then(|s| s.to_str())
            .context("page file name not UTF-8")?
            .to_string();
        out.push((id, extract_features(&doc, manifest).values));
    }
    Ok(out)
}

/// Writes run-manifest-{command}.json next to the artifacts: the seed,
/// the echoed config, and a hash making runs auditable.
pub fn write_run_manifest(out_dir: &Path, command: &str, seed: u64, config: &impl serde::Serialize) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let config_json = serde_json::to_string(config)?;
    let hash = Sha256::digest(config_json.as_bytes());
    let manifest = serde_json::json!({
        "command": command,
        "seed": seed,
        "config": serde_json::from_str::<serde_json::Value>(&config_json)?,
        "config_sha256": format!("{hash:x}"),
    });
    fs::write(
        out_dir.join(format!("run-manifest-{command}.json")),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

/// Fixed-notation float for CSV artifacts: full precision, stable text.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.12e}")
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number '{t}'")))
        .collect()
}
