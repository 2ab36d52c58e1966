//! Synthetic page corpus: deterministic generator producing offline
//! HTML/CSS page pairs spanning a wide rendering-complexity range, plus
//! the fixed news-site-style anchor page the platform oracle is
//! calibrated against.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::rng::substream;

const WORDS: &[&str] = &[
    "render", "layout", "frame", "scroll", "pixel", "style", "cascade", "node", "template",
    "widget", "banner", "column", "article", "summary", "caption", "gesture", "viewport",
    "thread", "raster", "composite", "teaser", "byline", "masthead", "ticker", "sidebar",
];

const CSS_PROPERTIES: &[(&str, &str)] = &[
    ("color", "#333"),
    ("margin", "4px"),
    ("padding", "8px 12px"),
    ("font-size", "14px"),
    ("display", "block"),
    ("width", "100%"),
    ("height", "auto"),
    ("background-color", "#fafafa"),
    ("border", "1px solid #ddd"),
    ("position", "relative"),
    ("float", "left"),
    ("text-align", "center"),
    ("line-height", "1.5"),
    ("font-weight", "bold"),
    ("overflow", "hidden"),
    ("z-index", "10"),
    ("opacity", "0.9"),
    ("max-width", "960px"),
];

fn lorem(rng: &mut impl Rng, words: usize) -> String {
    (0..words)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn css_rules(rng: &mut impl Rng, count: usize) -> String {
    let mut out = String::new();
    for i in 0..count {
        let selector = match rng.gen_range(0..8) {
            0 => format!(".{}-{}", WORDS.choose(rng).unwrap(), i % 40),
            1 => format!("#{}-{}", WORDS.choose(rng).unwrap(), i),
            2 => "div p".to_string(),
            3 => "ul > li".to_string(),
            4 => "a:hover".to_string(),
            5 => "[href]".to_string(),
            6 => "*".to_string(),
            _ => ["div", "p", "span", "a", "section", "img", "table"]
                .choose(rng)
                .unwrap()
                .to_string(),
        };
        out.push_str(&selector);
        out.push_str(" { ");
        for _ in 0..rng.gen_range(1..5usize) {
            let (prop, val) = CSS_PROPERTIES.choose(rng).unwrap();
            out.push_str(prop);
            out.push_str(": ");
            out.push_str(val);
            out.push_str("; ");
        }
        out.push_str("}\n");
    }
    out
}

/// One synthetic page: HTML body plus its stylesheet text. Pages are
/// deterministic in (idx, seed) and span roughly two orders of magnitude
/// in element count, capped so every page stays renderable at 30 FPS on
/// the bundled platforms' top settings.
pub fn page_html(idx: usize, seed: u64) -> (String, String) {
    let mut rng = substream(seed, &format!("corpus/page{idx}"));
    // scale factor sweeps small landing pages to heavy news fronts
    let scale = 0.05 + 0.95 * (idx as f64 / 99.0).min(1.0);
    let n_sections = (1.0 + 28.0 * scale) as usize;
    let paras_per = rng.gen_range((3 + (12.0 * scale) as usize)..=(6 + (32.0 * scale) as usize));
    let imgs_per = rng.gen_range((2.0 * scale) as usize..=(1 + (10.0 * scale) as usize));
    let list_items = rng.gen_range(0..=6usize);
    let n_rules = (10.0 + 700.0 * scale * rng.gen_range(0.5..1.0)) as usize;

    let css_name = format!("page-{idx:03}.css");
    let mut html = String::new();
    html.push_str("<!DOCTYPE html>\n<html>\n<head>\n");
    html.push_str(&format!("<title>{}</title>\n", lorem(&mut rng, 3)));
    html.push_str(&format!("<link rel=\"stylesheet\" href=\"{css_name}\">\n"));
    html.push_str("<meta charset=\"utf-8\">\n</head>\n<body>\n");
    html.push_str("<header class=\"masthead\"><nav>\n");
    for i in 0..rng.gen_range(3..12usize) {
        html.push_str(&format!("<a href=\"/{}-{i}\">{}</a>\n", WORDS[i % WORDS.len()], lorem(&mut rng, 2)));
    }
    html.push_str("</nav></header>\n");
    for s in 0..n_sections {
        html.push_str(&format!("<section id=\"s{s}\" class=\"{}\">\n", WORDS[s % WORDS.len()]));
        html.push_str(&format!("<h2>{}</h2>\n", lorem(&mut rng, 4)));
        for i in 0..imgs_per {
            html.push_str(&format!("<img src=\"img-{s}-{i}.png\" alt=\"{}\">\n", lorem(&mut rng, 2)));
        }
        for p in 0..paras_per {
            let extra = match p % 4 {
                0 => format!("<span class=\"byline\">{}</span>", lorem(&mut rng, 3)),
                1 => format!("<a href=\"#s{s}\">{}</a>", lorem(&mut rng, 2)),
                _ => String::new(),
            };
            let n_words = rng.gen_range(8..40usize);
            html.push_str(&format!("<p>{} {extra}</p>\n", lorem(&mut rng, n_words)));
        }
        if list_items > 0 {
            html.push_str("<ul>\n");
            for _ in 0..list_items {
                html.push_str(&format!("<li>{}</li>\n", lorem(&mut rng, 4)));
            }
            html.push_str("</ul>\n");
        }
        html.push_str("</section>\n");
    }
    html.push_str("<footer><custom-widget data-kind=\"ticker\"></custom-widget></footer>\n");
    html.push_str("</body>\n</html>\n");

    let css = css_rules(&mut rng, n_rules);
    (html, css)
}

/// The calibration anchor: a heavy news-front-style page with a fixed
/// element budget (many images, deep sections, a large stylesheet). The
/// bundled platform coefficients are tuned so this page renders at
/// 31 ± 1 FPS on the Jetson-like little cluster at 1.5 GHz.
pub fn anchor_html() -> (String, String) {
    let mut rng = substream(20260826, "corpus/anchor");
    let mut html = String::new();
    html.push_str("<!DOCTYPE html>\n<html>\n<head>\n<title>anchor news front</title>\n");
    html.push_str("<link rel=\"stylesheet\" href=\"cnn-anchor.css\">\n</head>\n<body>\n");
    html.push_str("<header class=\"masthead\"><nav>\n");
    for i in 0..20 {
        html.push_str(&format!("<a href=\"/desk-{i}\">{}</a>\n", lorem(&mut rng, 2)));
    }
    html.push_str("</nav></header>\n");
    for s in 0..25 {
        html.push_str(&format!("<section id=\"s{s}\" class=\"desk\">\n<h2>{}</h2>\n", lorem(&mut rng, 5)));
        for i in 0..12 {
            html.push_str(&format!("<img src=\"wire-{s}-{i}.jpg\" alt=\"{}\">\n", lorem(&mut rng, 2)));
        }
        for p in 0..40 {
            let extra = if p % 3 == 0 {
                format!("<span class=\"byline\">{}</span>", lorem(&mut rng, 3))
            } else {
                String::new()
            };
            html.push_str(&format!("<p>{} {extra}</p>\n", lorem(&mut rng, 20)));
        }
        html.push_str("<ul>\n");
        for _ in 0..8 {
            html.push_str(&format!("<li><a href=\"#s{s}\">{}</a></li>\n", lorem(&mut rng, 4)));
        }
        html.push_str("</ul>\n</section>\n");
    }
    html.push_str("</body>\n</html>\n");
    let css = css_rules(&mut rng, 900);
    (html, css)
}

/// Writes `n` page pairs (page-000.html/.css ...) into `dir`, returning
/// the page ids in index order.
pub fn write_corpus(dir: impl AsRef<Path>, n: usize, seed: u64) -> Result<Vec<String>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut ids = Vec::with_capacity(n);
    for idx in 0..n {
        let (html, css) = page_html(idx, seed);
        let id = format!("page-{idx:03}");
        fs::write(dir.join(format!("{id}.html")), html)?;
        fs::write(dir.join(format!("{id}.css")), css)?;
        ids.push(id);
    }
    Ok(ids)
}

/// HTML files in a corpus directory, sorted by file name.
pub fn corpus_pages(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir.as_ref())? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "html") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}
