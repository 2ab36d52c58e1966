//! Raw web-feature vectors: counts per manifest vocabulary plus the DOM
//! node count, tree depth, CSS rule count, and page size.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{parse_css, Element, HtmlDocument, Node, SelectorPattern};
use crate::error::{Error, Result};

/// Reserved vocabulary entry that aggregates items absent from a manifest.
pub const OTHER_SLOT: &str = "other";

/// Ordered vocabularies defining the raw feature dimension. Tag,
/// attribute, and CSS-property vocabularies must carry an `other` slot;
/// the selector vocabulary is the closed set of 8 pattern categories.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FeatureManifest {
    pub version: String,
    pub tag_vocab: Vec<String>,
    pub attr_vocab: Vec<String>,
    pub css_property_vocab: Vec<String>,
    pub selector_pattern_vocab: Vec<String>,
}

impl FeatureManifest {
    /// The manifest shipped with the toolkit: HTML5 tag set, curated
    /// attribute set, common CSS properties, 8 selector categories.
    pub fn default_manifest() -> Self {
        let m: FeatureManifest =
            serde_json::from_str(include_str!("../../data/manifest.json")).expect("bundled manifest");
        m.validate().expect("bundled manifest valid");
        m
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let m: FeatureManifest = serde_json::from_str(&text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, vocab) in [
            ("tag_vocab", &self.tag_vocab),
            ("attr_vocab", &self.attr_vocab),
            ("css_property_vocab", &self.css_property_vocab),
        ] {
            if !vocab.iter().any(|v| v == OTHER_SLOT) {
                return Err(Error::invalid(
                    "manifest",
                    format!("{name} is missing the reserved '{OTHER_SLOT}' slot"),
                ));
            }
            let mut seen = std::collections::HashSet::new();
            for v in vocab {
                if !seen.insert(v) {
                    return Err(Error::invalid("manifest", format!("duplicate {name} entry {v}")));
                }
            }
        }
        if self.selector_pattern_vocab.is_empty() {
            return Err(Error::invalid("manifest", "empty selector_pattern_vocab"));
        }
        for s in &self.selector_pattern_vocab {
            if SelectorPattern::from_name(s).is_none() {
                return Err(Error::invalid(
                    "manifest",
                    format!("unknown selector pattern category {s}"),
                ));
            }
        }
        Ok(())
    }

    /// Total feature dimension: node count, depth, CSS rule count, the
    /// four vocabularies, and page size.
    pub fn dimension(&self) -> usize {
        3 + self.tag_vocab.len()
            + self.attr_vocab.len()
            + self.css_property_vocab.len()
            + self.selector_pattern_vocab.len()
            + 1
    }

    /// Column names aligned to the feature vector layout.
    pub fn feature_names(&self) -> Vec<String> {
        let mut names = vec![
            "dom_nodes".to_string(),
            "tree_depth".to_string(),
            "css_rules".to_string(),
        ];
        names.extend(self.tag_vocab.iter().map(|t| format!("tag:{t}")));
        names.extend(self.attr_vocab.iter().map(|a| format!("attr:{a}")));
        names.extend(self.css_property_vocab.iter().map(|p| format!("css:{p}")));
        names.extend(
            self.selector_pattern_vocab
                .iter()
                .map(|s| format!("selector:{s}")),
        );
        names.push("size_kb".to_string());
        names
    }
}

/// A raw feature vector aligned to a manifest.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RawFeatureVector {
    pub values: Vec<f64>,
    pub manifest_version: String,
}

/// Counts document features under a manifest. Items absent from a
/// vocabulary are aggregated into its `other` slot.
pub fn extract_features(doc: &HtmlDocument, manifest: &FeatureManifest) -> RawFeatureVector {
    let mut tag_counts: HashMap<&str, f64> = HashMap::new();
    let mut attr_counts: HashMap<&str, f64> = HashMap::new();
    let mut element_count = 0usize;

    fn walk<'a>(
        node: &'a Node,
        tags: &mut HashMap<&'a str, f64>,
        attrs: &mut HashMap<&'a str, f64>,
        count: &mut usize,
    ) {
        if let Node::Element(Element { tag, attrs: a, children }) = node {
            *count += 1;
            *tags.entry(tag.as_str()).or_insert(0.0) += 1.0;
            for (k, _) in a {
                *attrs.entry(k.as_str()).or_insert(0.0) += 1.0;
            }
            for c in children {
                walk(c, tags, attrs, count);
            }
        }
    }
    for root in &doc.roots {
        walk(root, &mut tag_counts, &mut attr_counts, &mut element_count);
    }

    let css = parse_css(&doc.css_text);

    let mut values = Vec::with_capacity(manifest.dimension());
    values.push(element_count as f64);
    values.push(doc.depth() as f64);
    values.push(css.rule_count as f64);
    values.extend(bucketize(&manifest.tag_vocab, &tag_counts));
    values.extend(bucketize(&manifest.attr_vocab, &attr_counts));
    let prop_counts: HashMap<&str, f64> = css
        .property_counts
        .iter()
        .map(|(k, v)| (k.as_str(), *v as f64))
        .collect();
    values.extend(bucketize(&manifest.css_property_vocab, &prop_counts));
    for name in &manifest.selector_pattern_vocab {
        let pat = SelectorPattern::from_name(name).expect("validated manifest");
        values.push(css.selector_counts.get(&pat).copied().unwrap_or(0) as f64);
    }
    values.push(doc.byte_size_kb);

    RawFeatureVector {
        values,
        manifest_version: manifest.version.clone(),
    }
}

/// Maps observed counts onto vocabulary slots, routing unknown items into
/// the `other` slot so the slot sum equals the observed total.
fn bucketize(vocab: &[String], counts: &HashMap<&str, f64>) -> Vec<f64> {
    let mut out = vec![0.0; vocab.len()];
    let mut other = 0.0;
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(vocab.len());
    for (i, v) in vocab.iter().enumerate() {
        index.insert(v.as_str(), i);
    }
    for (item, n) in counts {
        match index.get(item) {
            Some(&i) => out[i] += n,
            None => other += n,
        }
    }
    if let Some(&i) = index.get(OTHER_SLOT) {
        out[i] += other;
    }
    out
}
