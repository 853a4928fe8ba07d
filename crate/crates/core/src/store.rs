//! Relational event store and CSV interchange.
//!
//! Two tables: `reports` (one row per brief) and `events` (one row per
//! extracted event, foreign-keyed to its report). Re-ingesting a report
//! replaces its events. Weights are stored at milligram resolution (six
//! decimal places in kilograms) so the CSV export reads back exactly.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rusqlite::{params, Connection, OptionalExtension};
use sha2::{Digest, Sha256};

use crate::assemble::TraffickingEvent;
use crate::corpus::ReportDocument;
use crate::error::StoreError;
use crate::measure::{format_kg, ArrestCount, Quantity, Weight};

pub const CSV_HEADER: [&str; 9] = [
    "report_id",
    "year",
    "month",
    "country",
    "species",
    "product",
    "quantity",
    "weight_kg",
    "arrest_count",
];

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS reports (
    report_id   TEXT PRIMARY KEY NOT NULL,
    year        INTEGER NOT NULL,
    month       INTEGER NOT NULL CHECK (month BETWEEN 1 AND 12),
    source_path TEXT
);
CREATE TABLE IF NOT EXISTS events (
    event_id       TEXT PRIMARY KEY NOT NULL,
    report_id      TEXT NOT NULL REFERENCES reports(report_id),
    sentence_index INTEGER NOT NULL,
    country        TEXT,
    species        TEXT,
    product        TEXT,
    quantity       INTEGER CHECK (quantity >= 1),
    weight_kg      REAL CHECK (weight_kg > 0),
    arrest_count   INTEGER CHECK (arrest_count >= 0)
);
CREATE INDEX IF NOT EXISTS events_by_report ON events(report_id, sentence_index);
";

/// Rounds to six decimal places, never below one milligram.
pub fn quantize_kg(value_kg: f64) -> f64 {
    let q = (value_kg * 1e6).round() / 1e6;
    if q > 0.0 {
        q
    } else {
        1e-6
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportMeta {
    pub report_id: String,
    pub year: i32,
    pub month: u32,
    pub source_path: Option<String>,
}

impl From<&ReportDocument> for ReportMeta {
    fn from(doc: &ReportDocument) -> Self {
        Self {
            report_id: doc.report_id.clone(),
            year: doc.year,
            month: doc.month,
            source_path: doc.source_path.as_ref().map(|p| p.display().to_string()),
        }
    }
}

/// Restricts [`EventStore::summarize`] to a country and/or year range.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SummaryFilter {
    pub country: Option<String>,
    pub year_from: Option<i32>,
    pub year_to: Option<i32>,
}

impl SummaryFilter {
    pub fn year(year: i32) -> Self {
        Self {
            year_from: Some(year),
            year_to: Some(year),
            ..Self::default()
        }
    }

    pub fn matches(&self, event: &TraffickingEvent) -> bool {
        self.country.as_ref().is_none_or(|c| event.country.as_ref() == Some(c))
            && self.year_from.is_none_or(|y| event.year >= y)
            && self.year_to.is_none_or(|y| event.year <= y)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SummaryStats {
    pub total_events: u64,
    /// Sum of arrest counts, with missing counts as zero.
    pub total_arrests: u64,
    pub distinct_species: u64,
    pub per_country: BTreeMap<String, u64>,
    pub per_month: BTreeMap<(i32, u32), u64>,
    /// Descending by count, ties alphabetical.
    pub top_species: Vec<(String, u64)>,
}

/// Aggregates in memory by a single pass over `events`.
pub fn summarize_events<'a>(
    events: impl IntoIterator<Item = &'a TraffickingEvent>,
    filter: &SummaryFilter,
) -> SummaryStats {
    let mut stats = SummaryStats::default();
    let mut species: BTreeMap<String, u64> = BTreeMap::new();
    for event in events.into_iter().filter(|e| filter.matches(e)) {
        stats.total_events += 1;
        stats.total_arrests += u64::from(event.arrest_count.map_or(0, |a| a.0));
        if let Some(country) = &event.country {
            *stats.per_country.entry(country.clone()).or_default() += 1;
        }
        *stats.per_month.entry((event.year, event.month)).or_default() += 1;
        if let Some(s) = &event.species {
            *species.entry(s.clone()).or_default() += 1;
        }
    }
    stats.distinct_species = species.len() as u64;
    stats.top_species = species.into_iter().collect();
    stats
        .top_species
        .sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    stats
}

pub struct EventStore {
    conn: Connection,
}

impl EventStore {
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        Self::init(Connection::open(path)?)
    }

    pub fn open_in_memory() -> Result<Self, StoreError> {
        Self::init(Connection::open_in_memory()?)
    }

    fn init(conn: Connection) -> Result<Self, StoreError> {
        conn.pragma_update(None, "foreign_keys", true)?;
        conn.execute_batch(SCHEMA)?;
        Ok(Self { conn })
    }

    /// Inserts or updates a report row.
    pub fn register_report(&mut self, meta: &ReportMeta) -> Result<(), StoreError> {
        register(&self.conn, meta)
    }

    /// Replaces the events of every report mentioned in `events`. All reports
    /// must already be registered.
    pub fn ingest(&mut self, events: &[TraffickingEvent]) -> Result<usize, StoreError> {
        let tx = self.conn.transaction()?;
        let mut report_ids: Vec<&str> = events.iter().map(|e| e.report_id.as_str()).collect();
        report_ids.sort_unstable();
        report_ids.dedup();
        for id in &report_ids {
            tx.execute("DELETE FROM events WHERE report_id = ?1", [id])?;
        }
        let inserted = insert_events(&tx, events)?;
        tx.commit()?;
        Ok(inserted)
    }

    /// Registers one report and replaces its events, even when `events` is
    /// empty.
    pub fn ingest_report(&mut self, meta: &ReportMeta, events: &[TraffickingEvent]) -> Result<usize, StoreError> {
        if let Some(other) = events.iter().find(|e| e.report_id != meta.report_id) {
            return Err(StoreError::Schema(format!(
                "event for report `{}` passed with report `{}`",
                other.report_id, meta.report_id
            )));
        }
        let tx = self.conn.transaction()?;
        register(&tx, meta)?;
        tx.execute("DELETE FROM events WHERE report_id = ?1", [&meta.report_id])?;
        let inserted = insert_events(&tx, events)?;
        tx.commit()?;
        Ok(inserted)
    }

    pub fn reports(&self) -> Result<Vec<ReportMeta>, StoreError> {
        let mut stmt = self
            .conn
            .prepare("SELECT report_id, year, month, source_path FROM reports ORDER BY report_id")?;
        let rows = stmt.query_map([], |r| {
            Ok(ReportMeta {
                report_id: r.get(0)?,
                year: r.get(1)?,
                month: r.get(2)?,
                source_path: r.get(3)?,
            })
        })?;
        Ok(rows.collect::<Result<_, _>>()?)
    }

    pub fn event_count(&self) -> Result<usize, StoreError> {
        let n: i64 = self.conn.query_row("SELECT COUNT(*) FROM events", [], |r| r.get(0))?;
        Ok(n as usize)
    }

    /// All events in export order: report, sentence, insertion.
    pub fn events(&self) -> Result<Vec<TraffickingEvent>, StoreError> {
        let mut stmt = self.conn.prepare(
            "SELECT e.report_id, r.year, r.month, e.country, e.species, e.product,
                    e.quantity, e.weight_kg, e.arrest_count, e.sentence_index
             FROM events e JOIN reports r ON r.report_id = e.report_id
             ORDER BY e.report_id, e.sentence_index, e.event_id",
        )?;
        let rows = stmt.query_map([], |r| {
            let quantity: Option<u32> = r.get(6)?;
            let weight: Option<f64> = r.get(7)?;
            let arrests: Option<u32> = r.get(8)?;
            let sentence_index: i64 = r.get(9)?;
            Ok(TraffickingEvent {
                report_id: r.get(0)?,
                year: r.get(1)?,
                month: r.get(2)?,
                country: r.get(3)?,
                species: r.get(4)?,
                product: r.get(5)?,
                quantity: quantity.and_then(Quantity::new),
                weight: weight.map(Weight::from_kg),
                arrest_count: arrests.map(ArrestCount),
                sentence_index: sentence_index as usize,
            })
        })?;
        Ok(rows.collect::<Result<_, _>>()?)
    }

    pub fn export_csv<W: Write>(&self, out: W) -> Result<(), StoreError> {
        write_csv(&self.events()?, out)
    }

    pub fn export_csv_path(&self, path: &Path) -> Result<(), StoreError> {
        let file = File::create(path).map_err(|source| StoreError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.export_csv(file)
    }

    /// SHA-256 over the CSV export, hex encoded.
    pub fn content_hash(&self) -> Result<String, StoreError> {
        let mut buf = Vec::new();
        self.export_csv(&mut buf)?;
        Ok(Sha256::digest(&buf).iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Aggregates computed in SQL over the filtered rows.
    pub fn summarize(&self, filter: &SummaryFilter) -> Result<SummaryStats, StoreError> {
        let from = "FROM events e JOIN reports r ON r.report_id = e.report_id
                    WHERE (?1 IS NULL OR e.country = ?1)
                      AND (?2 IS NULL OR r.year >= ?2)
                      AND (?3 IS NULL OR r.year <= ?3)";
        let args = params![filter.country, filter.year_from, filter.year_to];
        let (total_events, total_arrests, distinct_species): (i64, i64, i64) = self.conn.query_row(
            &format!(
                "SELECT COUNT(*), COALESCE(SUM(COALESCE(e.arrest_count, 0)), 0),
                        COUNT(DISTINCT e.species) {from}"
            ),
            args,
            |r| Ok((r.get(0)?, r.get(1)?, r.get(2)?)),
        )?;

        let mut per_country = BTreeMap::new();
        let mut stmt = self.conn.prepare(&format!(
            "SELECT e.country, COUNT(*) {from} AND e.country IS NOT NULL GROUP BY e.country"
        ))?;
        for row in stmt.query_map(args, |r| Ok((r.get::<_, String>(0)?, r.get::<_, i64>(1)?)))? {
            let (country, n) = row?;
            per_country.insert(country, n as u64);
        }

        let mut per_month = BTreeMap::new();
        let mut stmt = self.conn.prepare(&format!(
            "SELECT r.year, r.month, COUNT(*) {from} GROUP BY r.year, r.month"
        ))?;
        for row in stmt.query_map(args, |r| {
            Ok((r.get::<_, i32>(0)?, r.get::<_, u32>(1)?, r.get::<_, i64>(2)?))
        })? {
            let (year, month, n) = row?;
            per_month.insert((year, month), n as u64);
        }

        let mut stmt = self.conn.prepare(&format!(
            "SELECT e.species, COUNT(*) AS n {from} AND e.species IS NOT NULL
             GROUP BY e.species ORDER BY n DESC, e.species ASC"
        ))?;
        let top_species = stmt
            .query_map(args, |r| Ok((r.get::<_, String>(0)?, r.get::<_, i64>(1)? as u64)))?
            .collect::<Result<Vec<_>, _>>()?;

        Ok(SummaryStats {
            total_events: total_events as u64,
            total_arrests: total_arrests as u64,
            distinct_species: distinct_species as u64,
            per_country,
            per_month,
            top_species,
        })
    }
}

fn register(conn: &Connection, meta: &ReportMeta) -> Result<(), StoreError> {
    if !(1..=12).contains(&meta.month) {
        return Err(StoreError::Schema(format!(
            "report `{}` has month {} outside 1-12",
            meta.report_id, meta.month
        )));
    }
    conn.execute(
        "INSERT INTO reports (report_id, year, month, source_path) VALUES (?1, ?2, ?3, ?4)
         ON CONFLICT(report_id) DO UPDATE SET year = ?2, month = ?3, source_path = ?4",
        params![meta.report_id, meta.year, meta.month, meta.source_path],
    )?;
    Ok(())
}

fn insert_events(conn: &Connection, events: &[TraffickingEvent]) -> Result<usize, StoreError> {
    let mut ordinals: BTreeMap<&str, usize> = BTreeMap::new();
    let mut lookup = conn.prepare("SELECT year, month FROM reports WHERE report_id = ?1")?;
    let mut insert = conn.prepare(
        "INSERT INTO events (event_id, report_id, sentence_index, country, species, product,
                             quantity, weight_kg, arrest_count)
         VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9)",
    )?;
    for event in events {
        let registered: Option<(i32, u32)> = lookup
            .query_row([&event.report_id], |r| Ok((r.get(0)?, r.get(1)?)))
            .optional()?;
        match registered {
            None => {
                return Err(StoreError::Schema(format!(
                    "event references unknown report `{}`",
                    event.report_id
                )))
            }
            Some(date) if date != (event.year, event.month) => {
                return Err(StoreError::Schema(format!(
                    "event dated {}-{:02} but report `{}` is {}-{:02}",
                    event.year, event.month, event.report_id, date.0, date.1
                )))
            }
            Some(_) => {}
        }
        if event.species.is_none() && event.product.is_none() && event.arrest_count.is_none() {
            return Err(StoreError::Schema(format!(
                "event in `{}` has no species, product or arrest count",
                event.report_id
            )));
        }
        let ordinal = ordinals.entry(&event.report_id).or_default();
        *ordinal += 1;
        insert.execute(params![
            format!("{}#{:06}", event.report_id, ordinal),
            event.report_id,
            event.sentence_index as i64,
            event.country,
            event.species,
            event.product,
            event.quantity.map(Quantity::get),
            event.weight.as_ref().map(|w| quantize_kg(w.value_kg)),
            event.arrest_count.map(|a| a.0),
        ])?;
    }
    Ok(events.len())
}

fn csv_row(event: &TraffickingEvent) -> [String; 9] {
    let opt = |v: &Option<String>| v.clone().unwrap_or_default();
    [
        event.report_id.clone(),
        event.year.to_string(),
        event.month.to_string(),
        opt(&event.country),
        opt(&event.species),
        opt(&event.product),
        event.quantity.map(|q| q.get().to_string()).unwrap_or_default(),
        event.weight.as_ref().map(|w| format_kg(w.value_kg)).unwrap_or_default(),
        event.arrest_count.map(|a| a.0.to_string()).unwrap_or_default(),
    ]
}

/// Writes events in the interchange format, in the order given.
pub fn write_csv<W: Write>(events: &[TraffickingEvent], out: W) -> Result<(), StoreError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for event in events {
        writer.write_record(csv_row(event))?;
    }
    writer.flush().map_err(|e| StoreError::Csv(e.into()))?;
    Ok(())
}

/// Parses the interchange format. `sentence_index` is not part of the file,
/// so each event gets its row position within its report instead.
pub fn import_csv<R: Read>(input: R) -> Result<Vec<TraffickingEvent>, StoreError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    let header = match records.next() {
        None => {
            return Err(StoreError::Header {
                expected: CSV_HEADER.join(","),
                found: String::new(),
            })
        }
        Some(record) => record?,
    };
    if header.iter().ne(CSV_HEADER) {
        return Err(StoreError::Header {
            expected: CSV_HEADER.join(","),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut positions: BTreeMap<String, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for (i, record) in records.enumerate() {
        let record = record?;
        let row = i + 2;
        out.push(parse_row(&record, row, &mut positions)?);
    }
    Ok(out)
}

pub fn import_csv_path(path: &Path) -> Result<Vec<TraffickingEvent>, StoreError> {
    let file = File::open(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    import_csv(file)
}

fn parse_row(
    record: &csv::StringRecord,
    row: usize,
    positions: &mut BTreeMap<String, usize>,
) -> Result<TraffickingEvent, StoreError> {
    let bad = |message: String| StoreError::Row { row, message };
    if record.len() != CSV_HEADER.len() {
        return Err(bad(format!(
            "expected {} fields, found {}",
            CSV_HEADER.len(),
            record.len()
        )));
    }
    fn optional<T: std::str::FromStr>(value: &str, column: &str, row: usize) -> Result<Option<T>, StoreError> {
        if value.is_empty() {
            return Ok(None);
        }
        value.parse().map(Some).map_err(|_| StoreError::Row {
            row,
            message: format!("{column}: cannot parse `{value}`"),
        })
    }
    let text = |i: usize| (!record[i].is_empty()).then(|| record[i].to_string());

    let report_id = record[0].to_string();
    if report_id.is_empty() {
        return Err(bad("report_id is empty".into()));
    }
    let year: i32 = optional(&record[1], "year", row)?.ok_or_else(|| bad("year is empty".into()))?;
    let month: u32 = optional(&record[2], "month", row)?.ok_or_else(|| bad("month is empty".into()))?;
    if !(1..=12).contains(&month) {
        return Err(bad(format!("month {month} outside 1-12")));
    }
    let quantity = match optional::<u32>(&record[6], "quantity", row)? {
        Some(q) => Some(Quantity::new(q).ok_or_else(|| bad("quantity must be at least 1".into()))?),
        None => None,
    };
    let weight = match optional::<f64>(&record[7], "weight_kg", row)? {
        Some(w) if w.is_finite() && w > 0.0 => Some(Weight::from_kg(w)),
        Some(w) => return Err(bad(format!("weight_kg must be positive, found {w}"))),
        None => None,
    };
    let arrest_count = optional::<u32>(&record[8], "arrest_count", row)?.map(ArrestCount);
    if record[4].is_empty() && record[5].is_empty() && arrest_count.is_none() {
        return Err(bad("event needs a species, product or arrest count".into()));
    }
    let position = positions.entry(report_id.clone()).or_default();
    let sentence_index = *position;
    *position += 1;
    Ok(TraffickingEvent {
        report_id,
        year,
        month,
        country: text(3),
        species: text(4),
        product: text(5),
        quantity,
        weight,
        arrest_count,
        sentence_index,
    })
}
