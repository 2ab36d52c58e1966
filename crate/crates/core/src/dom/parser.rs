//! Error-recovering HTML tree builder.
//!
//! Recovery rules: stray end tags are dropped, an end tag for an open
//! ancestor auto-closes everything above it, void elements never open a
//! scope, and `<script>`/`<style>` bodies are consumed as raw text.

use std::fs;
use std::path::{Path, PathBuf};

use super::{Element, HtmlDocument, Node};

const VOID_TAGS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source",
    "track", "wbr",
];

pub(crate) fn is_void_tag(tag: &str) -> bool {
    VOID_TAGS.contains(&tag)
}

/// Parses markup with no stylesheet resolution; `<link rel="stylesheet">`
/// references are ignored.
pub fn parse_document(html_text: &str) -> HtmlDocument {
    DocumentLoader::default().parse(html_text)
}

/// Parser handle carrying an optional local directory for resolving
/// linked stylesheets (offline corpus layout: .html files with sibling
/// .css files).
#[derive(Debug, Default, Clone)]
pub struct DocumentLoader {
    css_dir: Option<PathBuf>,
}

impl DocumentLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_css_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            css_dir: Some(dir.into()),
        }
    }

    /// Reads and parses an HTML file, resolving linked stylesheets from
    /// the file's own directory unless a css_dir was given.
    pub fn load(&self, path: impl AsRef<Path>) -> std::io::Result<HtmlDocument> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let loader = match (&self.css_dir, path.parent()) {
            (Some(_), _) => self.clone(),
            (None, Some(dir)) => Self::with_css_dir(dir),
            (None, None) => self.clone(),
        };
        Ok(loader.parse(&text))
    }

    pub fn parse(&self, html_text: &str) -> HtmlDocument {
        let mut tb = TreeBuilder {
            stack: Vec::new(),
            roots: Vec::new(),
            css: String::new(),
            linked_bytes: 0,
            loader: self,
        };
        tb.run(html_text);
        let byte_size_kb = (html_text.len() + tb.linked_bytes) as f64 / 1024.0;
        HtmlDocument {
            roots: tb.roots,
            css_text: tb.css,
            byte_size_kb,
        }
    }
}

struct TreeBuilder<'a> {
    stack: Vec<Element>,
    roots: Vec<Node>,
    css: String,
    linked_bytes: usize,
    loader: &'a DocumentLoader,
}

impl TreeBuilder<'_> {
    fn run(&mut self, input: &str) {
        let bytes = input.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] == b'<' {
                if input[i..].starts_with("<!--") {
                    let end = input[i + 4..].find("-->").map(|p| i + 4 + p);
                    let (text, next) = match end {
                        Some(e) => (&input[i + 4..e], e + 3),
                        None => (&input[i + 4..], bytes.len()),
                    };
                    self.append(Node::Comment(text.to_string()));
                    i = next;
                } else if input[i..].starts_with("<!") || input[i..].starts_with("<?") {
                    // doctype / processing instruction: skip to '>'
                    i = input[i..].find('>').map(|p| i + p + 1).unwrap_or(bytes.len());
                } else if input[i..].starts_with("</") {
                    let end = input[i..].find('>').map(|p| i + p).unwrap_or(bytes.len());
                    let name = input[i + 2..end].trim().to_ascii_lowercase();
                    self.close_tag(&name);
                    i = (end + 1).min(bytes.len());
                } else if bytes.get(i + 1).is_some_and(|c| c.is_ascii_alphabetic()) {
                    i = self.open_tag(input, i);
                } else {
                    // stray '<' treated as text
                    self.append_text("<");
                    i += 1;
                }
            } else {
                let next = input[i..].find('<').map(|p| i + p).unwrap_or(bytes.len());
                let text = &input[i..next];
                if !text.trim().is_empty() {
                    self.append_text(text);
                }
                i = next;
            }
        }
        // auto-close everything left open
        while let Some(e) = self.stack.pop() {
            self.attach(e);
        }
    }

    fn open_tag(&mut self, input: &str, start: usize) -> usize {
        let end = input[start..]
            .find('>')
            .map(|p| start + p)
            .unwrap_or(input.len());
        let inner = &input[start + 1..end];
        let self_closing = inner.ends_with('/');
        let inner = inner.trim_end_matches('/');
        let (name, rest) = match inner.find(|c: char| c.is_whitespace()) {
            Some(p) => (&inner[..p], &inner[p..]),
            None => (inner, ""),
        };
        let tag = name.to_ascii_lowercase();
        let attrs = parse_attrs(rest);
        let mut next = (end + 1).min(input.len());

        if tag == "script" || tag == "style" {
            let close = format!("</{tag}");
            let body_end = input[next..]
                .to_ascii_lowercase()
                .find(&close)
                .map(|p| next + p)
                .unwrap_or(input.len());
            let body = &input[next..body_end];
            let mut el = Element {
                tag: tag.clone(),
                attrs,
                children: Vec::new(),
            };
            if !body.is_empty() {
                el.children.push(Node::Text(body.to_string()));
            }
            if tag == "style" {
                self.css.push_str(body);
                self.css.push('\n');
            }
            self.attach(el);
            next = input[body_end..]
                .find('>')
                .map(|p| body_end + p + 1)
                .unwrap_or(input.len());
            return next;
        }

        if tag == "link" {
            self.resolve_stylesheet(&attrs);
        }

        let el = Element {
            tag: tag.clone(),
            attrs,
            children: Vec::new(),
        };
        if self_closing || is_void_tag(&tag) {
            self.attach(el);
        } else {
            self.stack.push(el);
        }
        next
    }

    fn close_tag(&mut self, name: &str) {
        if let Some(pos) = self.stack.iter().rposition(|e| e.tag == name) {
            // pop children opened after the match: auto-close at parent boundary
            while self.stack.len() > pos {
                let e = self.stack.pop().unwrap();
                self.attach(e);
            }
        }
        // no match: stray end tag, dropped
    }

    fn resolve_stylesheet(&mut self, attrs: &[(String, Option<String>)]) {
        let is_sheet = attrs.iter().any(|(k, v)| {
            k == "rel"
                && v.as_deref()
                    .is_some_and(|v| v.eq_ignore_ascii_case("stylesheet"))
        });
        if !is_sheet {
            return;
        }
        let Some(dir) = &self.loader.css_dir else {
            return;
        };
        let Some(href) = attrs
            .iter()
            .find(|(k, _)| k == "href")
            .and_then(|(_, v)| v.as_deref())
        else {
            return;
        };
        // only plain relative references resolve in the offline corpus
        if href.contains("://") || href.starts_with('/') {
            return;
        }
        if let Ok(text) = fs::read_to_string(dir.join(href)) {
            self.linked_bytes += text.len();
            self.css.push_str(&text);
            self.css.push('\n');
        }
    }

    fn append_text(&mut self, text: &str) {
        self.append(Node::Text(text.to_string()));
    }

    fn append(&mut self, node: Node) {
        match self.stack.last_mut() {
            Some(parent) => parent.children.push(node),
            None => self.roots.push(node),
        }
    }

    fn attach(&mut self, el: Element) {
        self.append(Node::Element(el));
    }
}

fn parse_attrs(mut rest: &str) -> Vec<(String, Option<String>)> {
    let mut attrs = Vec::new();
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let name_end = rest
            .find(|c: char| c.is_whitespace() || c == '=')
            .unwrap_or(rest.len());
        let name = rest[..name_end].to_ascii_lowercase();
        rest = rest[name_end..].trim_start();
        if name.is_empty() {
            break;
        }
        if let Some(stripped) = rest.strip_prefix('=') {
            let stripped = stripped.trim_start();
            let (value, tail) = if let Some(q) = stripped.strip_prefix('"') {
                match q.find('"') {
                    Some(p) => (q[..p].to_string(), &q[p + 1..]),
                    None => (q.to_string(), ""),
                }
            } else if let Some(q) = stripped.strip_prefix('\'') {
                match q.find('\'') {
                    Some(p) => (q[..p].to_string(), &q[p + 1..]),
                    None => (q.to_string(), ""),
                }
            } else {
                let p = stripped
                    .find(|c: char| c.is_whitespace())
                    .unwrap_or(stripped.len());
                (stripped[..p].to_string(), &stripped[p..])
            };
            attrs.push((name, Some(value)));
            rest = tail;
        } else {
            attrs.push((name, None));
        }
    }
    attrs
}
