//! Minimal CSS rule scanner: counts rules, declared property names, and
//! selector-pattern categories. No cascade, no value parsing.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Selector-pattern categories a selector is classified into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorPattern {
    Type,
    Class,
    Id,
    Descendant,
    Child,
    Pseudo,
    Attribute,
    Universal,
}

impl SelectorPattern {
    pub const ALL: [SelectorPattern; 8] = [
        SelectorPattern::Type,
        SelectorPattern::Class,
        SelectorPattern::Id,
        SelectorPattern::Descendant,
        SelectorPattern::Child,
        SelectorPattern::Pseudo,
        SelectorPattern::Attribute,
        SelectorPattern::Universal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelectorPattern::Type => "type",
            SelectorPattern::Class => "class",
            SelectorPattern::Id => "id",
            SelectorPattern::Descendant => "descendant",
            SelectorPattern::Child => "child",
            SelectorPattern::Pseudo => "pseudo",
            SelectorPattern::Attribute => "attribute",
            SelectorPattern::Universal => "universal",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|p| p.name() == name)
    }
}

/// Classifies a single (comma-free) selector. Combinators take priority
/// over simple-selector markers, so `.a > .b` is `child`, not `class`.
pub fn classify_selector(sel: &str) -> SelectorPattern {
    let s = sel.trim();
    if s == "*" {
        return SelectorPattern::Universal;
    }
    if s.contains('>') {
        return SelectorPattern::Child;
    }
    if s.contains(char::is_whitespace) {
        return SelectorPattern::Descendant;
    }
    if s.contains(':') {
        return SelectorPattern::Pseudo;
    }
    if s.contains('[') {
        return SelectorPattern::Attribute;
    }
    if s.contains('#') {
        return SelectorPattern::Id;
    }
    if s.contains('.') {
        return SelectorPattern::Class;
    }
    SelectorPattern::Type
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CssStats {
    /// Number of style rules (selector group + declaration block).
    pub rule_count: usize,
    /// Occurrences per declared property name (lowercased).
    pub property_counts: HashMap<String, usize>,
    /// Occurrences per selector-pattern category, one per comma-separated
    /// selector.
    pub selector_counts: HashMap<SelectorPattern, usize>,
}

/// Scans stylesheet text. `@media` blocks are descended into; other
/// at-rules are skipped wholesale.
pub fn parse_css(css: &str) -> CssStats {
    let mut stats = CssStats::default();
    scan(&strip_comments(css), &mut stats);
    stats
}

fn strip_comments(css: &str) -> String {
    let mut out = String::with_capacity(css.len());
    let mut rest = css;
    while let Some(start) = rest.find("/*") {
        out.push_str(&rest[..start]);
        match rest[start + 2..].find("*/") {
            Some(end) => rest = &rest[start + 2 + end + 2..],
            None => return out,
        }
    }
    out.push_str(rest);
    out
}

fn scan(css: &str, stats: &mut CssStats) {
    let mut i = 0;
    let bytes = css.as_bytes();
    while i < bytes.len() {
        let Some(brace) = css[i..].find(['{', ';']).map(|p| i + p) else {
            break;
        };
        let head = css[i..brace].trim();
        if bytes[brace] == b';' {
            // blockless at-rule (@import, @charset) or stray semicolon
            i = brace + 1;
            continue;
        }
        let block_end = matching_brace(css, brace);
        if head.starts_with('@') {
            let keyword = head.split_whitespace().next().unwrap_or("");
            if keyword == "@media" || keyword == "@supports" {
                scan(&css[brace + 1..block_end], stats);
            }
            // other at-rules (@keyframes, @font-face, ...) skipped
        } else if !head.is_empty() {
            stats.rule_count += 1;
            for sel in head.split(',') {
                if !sel.trim().is_empty() {
                    *stats
                        .selector_counts
                        .entry(classify_selector(sel))
                        .or_insert(0) += 1;
                }
            }
            for decl in css[brace + 1..block_end].split(';') {
                if let Some(colon) = decl.find(':') {
                    let prop = decl[..colon].trim().to_ascii_lowercase();
                    if !prop.is_empty() {
                        *stats.property_counts.entry(prop).or_insert(0) += 1;
                    }
                }
            }
        }
        i = (block_end + 1).min(css.len());
    }
}

fn matching_brace(css: &str, open: usize) -> usize {
    let mut depth = 0usize;
    for (off, b) in css[open..].bytes().enumerate() {
        match b {
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return open + off;
                }
            }
            _ => {}
        }
    }
    css.len()
}
