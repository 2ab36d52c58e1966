//! Tolerant HTML/CSS parsing and raw web-feature extraction.
//!
//! The parser is a small error-recovering tree builder, not a full HTML5
//! implementation: unknown tags are kept verbatim, unclosed tags are
//! auto-closed at parent boundaries, and no scripting or layout happens.
//! Feature extraction counts element nodes, tree depth, per-tag and
//! per-attribute occurrences, CSS rules/properties/selector patterns, and
//! the page size in kilobytes.

mod css;
mod features;
mod parser;

pub use css::{classify_selector, parse_css, CssStats, SelectorPattern};
pub use features::{extract_features, FeatureManifest, RawFeatureVector, OTHER_SLOT};
pub use parser::{parse_document, DocumentLoader};

/// A parsed HTML document: top-level element nodes plus the CSS text
/// gathered from `<style>` blocks and resolved `<link rel="stylesheet">`s.
#[derive(Debug, Clone, PartialEq)]
pub struct HtmlDocument {
    pub roots: Vec<Node>,
    pub css_text: String,
    /// Total page size (markup plus resolved stylesheets) in kilobytes.
    pub byte_size_kb: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Element(Element),
    Text(String),
    Comment(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub tag: String,
    pub attrs: Vec<(String, Option<String>)>,
    pub children: Vec<Node>,
}

impl HtmlDocument {
    /// Number of element nodes (text and comment nodes are not counted).
    pub fn element_count(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::Element(e) => 1 + e.children.iter().map(walk).sum::<usize>(),
                _ => 0,
            }
        }
        self.roots.iter().map(walk).sum()
    }

    /// Longest root-to-leaf element path (html -> body -> p counts as 3).
    pub fn depth(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::Element(e) => 1 + e.children.iter().map(walk).max().unwrap_or(0),
                _ => 0,
            }
        }
        self.roots.iter().map(walk).max().unwrap_or(0)
    }

    /// Re-serializes the tree to markup. Recovery normalizations applied
    /// during parsing are preserved, so parse(serialize(parse(x))) counts
    /// the same features as parse(x).
    pub fn to_html(&self) -> String {
        let mut out = String::new();
        for n in &self.roots {
            serialize_node(n, &mut out);
        }
        out
    }
}

fn serialize_node(n: &Node, out: &mut String) {
    match n {
        Node::Text(t) => out.push_str(t),
        Node::Comment(c) => {
            out.push_str("<!--");
            out.push_str(c);
            out.push_str("-->");
        }
        Node::Element(e) => {
            out.push('<');
            out.push_str(&e.tag);
            for (k, v) in &e.attrs {
                out.push(' ');
                out.push_str(k);
                if let Some(v) = v {
                    out.push_str("=\"");
                    out.push_str(&v.replace('"', "&quot;"));
                    out.push('"');
                }
            }
            out.push('>');
            if parser::is_void_tag(&e.tag) {
                return;
            }
            for c in &e.children {
                serialize_node(c, out);
            }
            out.push_str("</");
            out.push_str(&e.tag);
            out.push('>');
        }
    }
}

/// Relative change in element-node count, with the old document as base:
/// |nodes(new) - nodes(old)| / max(1, nodes(old)).
pub fn dom_change_ratio(old: &HtmlDocument, new: &HtmlDocument) -> f64 {
    node_change_ratio(old.element_count() as f64, new.element_count() as f64)
}

/// Same ratio on bare element counts, for callers that only kept the
/// extracted feature values.
pub fn node_change_ratio(old_nodes: f64, new_nodes: f64) -> f64 {
    (new_nodes - old_nodes).abs() / old_nodes.max(1.0)
}
