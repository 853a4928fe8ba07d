//! JSON and static HTML renderings of [`SummaryStats`].
//!
//! The HTML page is self-contained: inline CSS and inline SVG, no scripts,
//! no links. Every number drawn on the page is repeated in a `data-*`
//! attribute so it can be read back without parsing the charts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;

use crate::error::StoreError;
use crate::store::{EventStore, SummaryFilter, SummaryStats};

const MAX_RADIUS: f64 = 40.0;
const BAR_WIDTH: f64 = 400.0;
const BAR_HEIGHT: f64 = 18.0;
const MONTH_HEIGHT: f64 = 120.0;

#[derive(Serialize)]
struct SpeciesCount<'a> {
    species: &'a str,
    events: u64,
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    total_events: u64,
    total_arrests: u64,
    distinct_species: u64,
    per_country: &'a std::collections::BTreeMap<String, u64>,
    per_month: std::collections::BTreeMap<String, u64>,
    top_species: Vec<SpeciesCount<'a>>,
}

pub fn month_key(year: i32, month: u32) -> String {
    format!("{year:04}-{month:02}")
}

/// Pretty-printed JSON with a fixed key order.
pub fn emit_json(stats: &SummaryStats) -> String {
    let doc = JsonSummary {
        total_events: stats.total_events,
        total_arrests: stats.total_arrests,
        distinct_species: stats.distinct_species,
        per_country: &stats.per_country,
        per_month: stats
            .per_month
            .iter()
            .map(|(&(y, m), &n)| (month_key(y, m), n))
            .collect(),
        top_species: stats
            .top_species
            .iter()
            .map(|(species, events)| SpeciesCount {
                species,
                events: *events,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    text.push('\n');
    text
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Bubble radius for `count` when the largest species has `max` events.
pub fn bubble_radius(count: u64, max: u64) -> f64 {
    if max == 0 {
        0.0
    } else {
        MAX_RADIUS * (count as f64 / max as f64).sqrt()
    }
}

fn counters(out: &mut String, stats: &SummaryStats) {
    out.push_str("<section class=\"counters\">\n");
    for (metric, label, value) in [
        ("total_events", "events", stats.total_events),
        ("total_arrests", "arrests", stats.total_arrests),
        ("distinct_species", "species", stats.distinct_species),
    ] {
        let _ = writeln!(
            out,
            "<div class=\"counter\" data-metric=\"{metric}\" data-value=\"{value}\"><span class=\"n\">{value}</span> {label}</div>"
        );
    }
    out.push_str("</section>\n");
}

fn bubbles(out: &mut String, stats: &SummaryStats) {
    let max = stats.top_species.iter().map(|s| s.1).max().unwrap_or(0);
    let height = 2.0 * MAX_RADIUS + 30.0;
    let mut x = 0.0;
    let mut shapes = String::new();
    for (species, count) in &stats.top_species {
        let r = bubble_radius(*count, max);
        let cx = x + MAX_RADIUS;
        let _ = writeln!(
            shapes,
            "<g class=\"bubble\" data-species=\"{s}\" data-count=\"{count}\" data-radius=\"{r:.6}\">\
             <circle cx=\"{cx:.1}\" cy=\"{cy:.1}\" r=\"{r:.6}\"/>\
             <text x=\"{cx:.1}\" y=\"{ty:.1}\" text-anchor=\"middle\">{s} ({count})</text></g>",
            s = escape(species),
            cy = MAX_RADIUS,
            ty = 2.0 * MAX_RADIUS + 20.0,
        );
        x += 2.0 * MAX_RADIUS + 10.0;
    }
    let _ = writeln!(
        out,
        "<section class=\"species\">\n<h2>Events by species</h2>\n\
         <svg width=\"{w:.0}\" height=\"{height:.0}\" role=\"img\">\n{shapes}</svg>\n</section>",
        w = x.max(1.0),
    );
}

fn bars(out: &mut String, stats: &SummaryStats) {
    let mut rows: Vec<(&String, u64)> = stats.per_country.iter().map(|(c, n)| (c, *n)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let max = rows.first().map_or(0, |r| r.1);
    let mut shapes = String::new();
    for (i, (country, count)) in rows.iter().enumerate() {
        let y = i as f64 * (BAR_HEIGHT + 6.0);
        let w = if max == 0 {
            0.0
        } else {
            BAR_WIDTH * *count as f64 / max as f64
        };
        let _ = writeln!(
            shapes,
            "<g class=\"bar\" data-country=\"{c}\" data-count=\"{count}\">\
             <text x=\"0\" y=\"{ty:.1}\">{c}</text>\
             <rect x=\"160\" y=\"{y:.1}\" width=\"{w:.2}\" height=\"{BAR_HEIGHT}\"/>\
             <text x=\"{tx:.2}\" y=\"{ty:.1}\">{count}</text></g>",
            c = escape(country),
            ty = y + BAR_HEIGHT - 4.0,
            tx = 166.0 + w,
        );
    }
    let _ = writeln!(
        out,
        "<section class=\"countries\">\n<h2>Events by country</h2>\n\
         <svg width=\"{w:.0}\" height=\"{h:.0}\" role=\"img\">\n{shapes}</svg>\n</section>",
        w = 160.0 + BAR_WIDTH + 50.0,
        h = (rows.len() as f64 * (BAR_HEIGHT + 6.0)).max(1.0),
    );
}

fn months(out: &mut String, stats: &SummaryStats) {
    let max = stats.per_month.values().copied().max().unwrap_or(0);
    let step = 28.0;
    let mut shapes = String::new();
    for (i, (&(year, month), &count)) in stats.per_month.iter().enumerate() {
        let h = if max == 0 {
            0.0
        } else {
            MONTH_HEIGHT * count as f64 / max as f64
        };
        let x = i as f64 * step;
        let _ = writeln!(
            shapes,
            "<g class=\"month\" data-month=\"{key}\" data-count=\"{count}\">\
             <rect x=\"{x:.1}\" y=\"{y:.2}\" width=\"20\" height=\"{h:.2}\"/>\
             <text x=\"{x:.1}\" y=\"{ly:.1}\" transform=\"rotate(45 {x:.1} {ly:.1})\">{key} ({count})</text></g>",
            key = month_key(year, month),
            y = MONTH_HEIGHT - h,
            ly = MONTH_HEIGHT + 12.0,
        );
    }
    let _ = writeln!(
        out,
        "<section class=\"months\">\n<h2>Events by month</h2>\n\
         <svg width=\"{w:.0}\" height=\"{h:.0}\" role=\"img\">\n{shapes}</svg>\n</section>",
        w = (stats.per_month.len() as f64 * step + 80.0).max(1.0),
        h = MONTH_HEIGHT + 80.0,
    );
}

const STYLE: &str = "body{font-family:sans-serif;margin:2em;color:#222}\
.counters{display:flex;gap:2em}.counter{font-size:1.2em}.counter .n{font-size:2em;font-weight:bold;display:block}\
circle{fill:#6a9f58;fill-opacity:.7}.bar rect{fill:#4e79a7}.month rect{fill:#e15759}\
svg text{font-size:11px}";

fn page(stats: &SummaryStats, footer: Option<&str>) -> String {
    let mut out = String::from("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(
        out,
        "<title>Wildlife trafficking events</title>\n<style>{STYLE}</style>\n</head>\n<body>"
    );
    out.push_str("<h1>Wildlife trafficking events</h1>\n");
    counters(&mut out, stats);
    bubbles(&mut out, stats);
    bars(&mut out, stats);
    months(&mut out, stats);
    if let Some(footer) = footer {
        let _ = writeln!(out, "<footer>{}</footer>", escape(footer));
    }
    out.push_str("</body>\n</html>\n");
    out
}

pub fn emit_html(stats: &SummaryStats) -> String {
    page(stats, None)
}

#[derive(Debug, Clone)]
pub struct RenderedReport {
    pub json_text: String,
    pub html_text: String,
    pub generated_at: DateTime<Utc>,
    pub store_version: String,
}

impl RenderedReport {
    pub fn render(stats: &SummaryStats, store_version: &str, generated_at: DateTime<Utc>) -> Self {
        let footer = format!(
            "Generated {} from store {}",
            generated_at.to_rfc3339_opts(SecondsFormat::Secs, true),
            store_version
        );
        Self {
            json_text: emit_json(stats),
            html_text: page(stats, Some(&footer)),
            generated_at,
            store_version: store_version.to_string(),
        }
    }

    /// Summarizes the whole store as of now.
    pub fn from_store(store: &EventStore) -> Result<Self, StoreError> {
        let stats = store.summarize(&SummaryFilter::default())?;
        Ok(Self::render(&stats, &store.content_hash()?, Utc::now()))
    }

    /// Writes `summary.json` and `dashboard.html` into `dir`, creating it.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("summary.json"), &self.json_text)?;
        fs::write(dir.join("dashboard.html"), &self.html_text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn stats() -> SummaryStats {
        SummaryStats {
            total_events: 5,
            total_arrests: 4,
            distinct_species: 2,
            per_country: BTreeMap::from([("togo".into(), 1), ("gabon".into(), 3), ("benin".into(), 1)]),
            per_month: BTreeMap::from([((2021, 4), 4), ((2020, 12), 1)]),
            top_species: vec![("leopard".into(), 4), ("elephant".into(), 1)],
        }
    }

    #[test]
    fn json_shape() {
        let empty = emit_json(&SummaryStats::default());
        let v: serde_json::Value = serde_json::from_str(&empty).unwrap();
        assert_eq!(v["total_events"], 0);
        assert!(v["per_country"].as_object().unwrap().is_empty());

        let text = emit_json(&stats());
        assert_eq!(text, emit_json(&stats()));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["total_events"], 5);
        assert_eq!(v["total_arrests"], 4);
        assert_eq!(v["per_month"]["2020-12"], 1);
        assert_eq!(v["top_species"][0]["species"], "leopard");
        let keys = [
            "total_events",
            "total_arrests",
            "distinct_species",
            "per_country",
            "per_month",
            "top_species",
        ];
        let positions: Vec<_> = keys.iter().map(|k| text.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_page() {
        let html = emit_html(&SummaryStats::default());
        assert!(html.contains("data-metric=\"total_events\" data-value=\"0\""));
        assert!(!html.contains("<circle"));
    }

    #[test]
    fn sqrt_bubbles() {
        assert_eq!(bubble_radius(4, 4), 2.0 * bubble_radius(1, 4));
        let html = emit_html(&stats());
        assert!(html.contains(&format!(
            "data-species=\"leopard\" data-count=\"4\" data-radius=\"{:.6}\"",
            MAX_RADIUS
        )));
        assert!(html.contains(&format!(
            "data-species=\"elephant\" data-count=\"1\" data-radius=\"{:.6}\"",
            MAX_RADIUS / 2.0
        )));
    }

    #[test]
    fn bars_sorted_by_count() {
        let html = emit_html(&stats());
        let at = |c: &str| html.find(&format!("data-country=\"{c}\"")).unwrap();
        assert!(at("gabon") < at("benin") && at("benin") < at("togo"));
        assert_eq!(html.matches("class=\"bar\"").count(), 3);
    }

    #[test]
    fn no_links_and_escaped() {
        let mut s = stats();
        s.per_country.insert("<script>".into(), 1);
        let report = RenderedReport::render(&s, "abc", Utc::now());
        for html in [&report.html_text, &emit_html(&s)] {
            assert!(!html.contains("http") && !html.contains("<script>") && !html.contains("href"));
        }
    }
}
