//! Gazetteer term lists: loading, validation and plural expansion.
//!
//! A lexicon file is CSV with the header `surface,label,canonical`. Lines
//! starting with `#` are comments. The canonical column may be omitted, in
//! which case it defaults to the lowercased surface.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::tokenize;
use crate::error::LexiconError;
use crate::inflect::{pluralize, singularize_rules};

pub const LEXICON_HEADER: [&str; 3] = ["surface", "label", "canonical"];

pub const SHIPPED_ANIMALS: &str = include_str!("../data/animals.csv");
pub const SHIPPED_PRODUCTS: &str = include_str!("../data/products.csv");
pub const SHIPPED_COUNTRIES: &str = include_str!("../data/countries.csv");

/// Entity labels. Gazetteer rows may only use the first three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Label {
    Animal,
    Product,
    Country,
    Cardinal,
    Weight,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Animal => "ANIMAL",
            Label::Product => "PRODUCT",
            Label::Country => "COUNTRY",
            Label::Cardinal => "CARDINAL",
            Label::Weight => "WEIGHT",
        }
    }

    pub fn is_gazetteer(self) -> bool {
        matches!(self, Label::Animal | Label::Product | Label::Country)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ANIMAL" => Ok(Label::Animal),
            "PRODUCT" => Ok(Label::Product),
            "COUNTRY" => Ok(Label::Country),
            "CARDINAL" => Ok(Label::Cardinal),
            "WEIGHT" => Ok(Label::Weight),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub surface: String,
    pub label: Label,
    pub canonical: String,
}

/// Immutable surface → (label, canonical) map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, (Label, String)>,
    version: String,
}

/// Case-folded token sequence of a surface, joined by single spaces. Both
/// lexicon keys and matcher input go through this so they agree on token
/// boundaries.
pub fn surface_key(surface: &str) -> String {
    tokenize(surface)
        .into_iter()
        .map(|t| t.lower)
        .collect::<Vec<_>>()
        .join(" ")
}

impl Lexicon {
    pub fn empty() -> Self {
        LexiconBuilder::default().build().expect("empty lexicon is valid")
    }

    /// Animals, products and countries shipped with the crate.
    pub fn shipped() -> Self {
        let mut builder = LexiconBuilder::default();
        for (text, origin) in [
            (SHIPPED_ANIMALS, "animals.csv"),
            (SHIPPED_PRODUCTS, "products.csv"),
            (SHIPPED_COUNTRIES, "countries.csv"),
        ] {
            builder.add_source(text, origin).expect("shipped lexicon parses");
        }
        builder.build().expect("shipped lexicon is consistent")
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, LexiconError> {
        let mut builder = LexiconBuilder::default();
        builder.add_source(text, origin)?;
        builder.build()
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        Self::load_all(&[path])
    }

    /// Loads several files into one lexicon; conflicts across files are
    /// reported like conflicts within one file.
    pub fn load_all<P: AsRef<Path>>(paths: &[P]) -> Result<Self, LexiconError> {
        let mut builder = LexiconBuilder::default();
        for path in paths {
            builder.add_file(path.as_ref())?;
        }
        builder.build()
    }

    pub fn get(&self, surface: &str) -> Option<(Label, &str)> {
        self.entries
            .get(&surface_key(surface))
            .map(|(label, canonical)| (*label, canonical.as_str()))
    }

    /// Iterates `(case-folded surface, label, canonical)` in surface order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, Label, &str)> {
        self.entries
            .iter()
            .map(|(surface, (label, canonical))| (surface.as_str(), *label, canonical.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Distinct canonicals carrying `label`, sorted.
    pub fn canonicals(&self, label: Label) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .entries
            .values()
            .filter(|(l, _)| *l == label)
            .map(|(_, c)| c.as_str())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn count_by_label(&self) -> BTreeMap<Label, usize> {
        let mut out = BTreeMap::new();
        for (label, _) in self.entries.values() {
            *out.entry(*label).or_default() += 1;
        }
        out
    }
}

/// Canonical form of a surface: the lexicon's canonical when the surface is
/// known, otherwise the rule-based singular.
pub fn singularize(surface: &str, lexicon: &Lexicon) -> String {
    match lexicon.get(surface) {
        Some((_, canonical)) => canonical.to_string(),
        None => singularize_rules(surface),
    }
}

#[derive(Debug, Clone)]
struct Provenance {
    label: Label,
    canonical: String,
    origin: String,
}

/// Accumulates rows from one or more sources and validates them together.
#[derive(Debug, Default)]
pub struct LexiconBuilder {
    rows: Vec<(LexiconEntry, String)>,
    problems: Vec<String>,
}

impl LexiconBuilder {
    pub fn add_file(&mut self, path: &Path) -> Result<&mut Self, LexiconError> {
        let bytes = fs::read(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8(bytes).map_err(|e| LexiconError::Format {
            origin: path.display().to_string(),
            message: format!("invalid UTF-8 at byte {}", e.utf8_error().valid_up_to()),
        })?;
        self.add_source(&text, &path.display().to_string())
    }

    /// Parses CSV text. Structural problems fail immediately; row-level
    /// problems are collected and reported by [`build`](Self::build).
    pub fn add_source(&mut self, text: &str, origin: &str) -> Result<&mut Self, LexiconError> {
        let format = |message: String| LexiconError::Format {
            origin: origin.to_string(),
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = reader.records();
        match records.next() {
            None => return Ok(self),
            Some(Err(e)) => return Err(format(e.to_string())),
            Some(Ok(header)) => {
                let fields: Vec<&str> = header.iter().collect();
                if fields != LEXICON_HEADER {
                    return Err(format(format!(
                        "expected header `{}`, found `{}`",
                        LEXICON_HEADER.join(","),
                        fields.join(",")
                    )));
                }
            }
        }
        for record in records {
            let record = record.map_err(|e| format(e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            let at = format!("{origin}:{line}");
            if record.iter().all(str::is_empty) {
                continue;
            }
            if record.len() < 2 || record.len() > 3 {
                self.problems
                    .push(format!("{at}: expected 2 or 3 fields, found {}", record.len()));
                continue;
            }
            let surface = &record[0];
            if surface_key(surface).is_empty() {
                self.problems.push(format!("{at}: empty surface"));
                continue;
            }
            let label = match record[1].parse::<Label>() {
                Ok(label) if label.is_gazetteer() => label,
                Ok(label) => {
                    self.problems
                        .push(format!("{at}: label {label} is not allowed in a lexicon"));
                    continue;
                }
                Err(e) => {
                    self.problems.push(format!("{at}: {e}"));
                    continue;
                }
            };
            let canonical = match record.get(2).filter(|c| !c.is_empty()) {
                Some(c) => c.to_lowercase(),
                None => surface.to_lowercase(),
            };
            self.rows.push((
                LexiconEntry {
                    surface: surface.to_string(),
                    label,
                    canonical,
                },
                at,
            ));
        }
        Ok(self)
    }

    pub fn build(self) -> Result<Lexicon, LexiconError> {
        let mut problems = self.problems;
        let mut seen: BTreeMap<String, Provenance> = BTreeMap::new();
        let mut insert = |key: String, prov: Provenance, problems: &mut Vec<String>| match seen.get(&key) {
            Some(prev) if prev.label == prov.label && prev.canonical == prov.canonical => {}
            Some(prev) => problems.push(format!(
                "surface `{key}` is {} `{}` at {} but {} `{}` at {}",
                prev.label, prev.canonical, prev.origin, prov.label, prov.canonical, prov.origin
            )),
            None => {
                seen.insert(key, prov);
            }
        };
        // Explicit rows first so a conflict always names the written row
        // before any generated plural.
        for (entry, at) in &self.rows {
            insert(
                surface_key(&entry.surface),
                Provenance {
                    label: entry.label,
                    canonical: entry.canonical.clone(),
                    origin: at.clone(),
                },
                &mut problems,
            );
        }
        for (entry, at) in &self.rows {
            // A row that spells out the plural of its canonical is not
            // pluralized again.
            let spelled_plural = surface_key(&entry.surface) != surface_key(&entry.canonical)
                && surface_key(&entry.surface) == surface_key(&pluralize(&entry.canonical));
            if entry.label == Label::Country || spelled_plural {
                continue;
            }
            let plural = pluralize(&entry.surface.to_lowercase());
            let key = surface_key(&plural);
            if key == surface_key(&entry.surface) {
                continue;
            }
            insert(
                key,
                Provenance {
                    label: entry.label,
                    canonical: entry.canonical.clone(),
                    origin: format!("plural of {at}"),
                },
                &mut problems,
            );
        }
        if !problems.is_empty() {
            return Err(LexiconError::Validation(problems));
        }
        let entries: BTreeMap<String, (Label, String)> =
            seen.into_iter().map(|(k, p)| (k, (p.label, p.canonical))).collect();
        let mut hasher = Sha256::new();
        for (surface, (label, canonical)) in &entries {
            hasher.update(format!("{surface}\t{label}\t{canonical}\n").as_bytes());
        }
        let digest = hasher.finalize();
        let version = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        Ok(Lexicon { entries, version })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "surface,label,canonical\n";

    #[test]
    fn plurals_added_for_countable_entries() {
        let text = format!("{HEADER}elephant,ANIMAL\nivory,PRODUCT\nGabon,COUNTRY\n");
        let lex = Lexicon::parse(&text, "t").unwrap();
        // elephant, elephants, ivory (mass noun), gabon (countries are not pluralized)
        assert_eq!(lex.len(), 4);
        assert_eq!(lex.get("Elephants"), Some((Label::Animal, "elephant")));
        assert_eq!(lex.get("IVORY"), Some((Label::Product, "ivory")));
        assert_eq!(lex.get("gabon"), Some((Label::Country, "gabon")));
        assert_eq!(lex.get("gabons"), None);
    }

    #[test]
    fn conflicting_duplicate_lists_both_rows() {
        let text = format!("{HEADER}tusk,PRODUCT\ntusk,ANIMAL\n");
        match Lexicon::parse(&text, "t.csv") {
            Err(LexiconError::Validation(problems)) => {
                assert_eq!(problems.len(), 2, "{problems:?}"); // tusk and tusks
                assert!(problems[0].contains("t.csv:2"), "{}", problems[0]);
                assert!(problems[0].contains("t.csv:3"), "{}", problems[0]);
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn consistent_duplicates_are_fine() {
        let text = format!("{HEADER}tusk,PRODUCT\nTusks,PRODUCT,tusk\n");
        let lex = Lexicon::parse(&text, "t").unwrap();
        assert_eq!(lex.len(), 2);
    }

    #[test]
    fn unknown_and_disallowed_labels() {
        let text = format!("{HEADER}tusk,BODYPART\nfive,CARDINAL\n");
        match Lexicon::parse(&text, "t") {
            Err(LexiconError::Validation(problems)) => assert_eq!(problems.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_inputs() {
        assert!(Lexicon::parse("", "t").unwrap().is_empty());
        assert!(Lexicon::parse(HEADER, "t").unwrap().is_empty());
        assert!(Lexicon::parse("# only a comment\n", "t").unwrap().is_empty());
        assert!(matches!(
            Lexicon::parse("name,kind\nx,ANIMAL\n", "t"),
            Err(LexiconError::Format { .. })
        ));
    }

    #[test]
    fn comments_whitespace_and_canonical_defaults() {
        let text =
            format!("# 2 entries\n{HEADER}# animals\n  Sea Turtle , animal ,\nIvory Coast,COUNTRY,Côte d'Ivoire\n");
        let lex = Lexicon::parse(&text, "t").unwrap();
        assert_eq!(lex.get("sea  turtles"), Some((Label::Animal, "sea turtle")));
        assert_eq!(lex.get("ivory coast"), Some((Label::Country, "côte d'ivoire")));
    }

    #[test]
    fn version_is_content_hash() {
        let a = Lexicon::parse(&format!("{HEADER}elephant,ANIMAL\n"), "a").unwrap();
        let b = Lexicon::parse(&format!("# other\n{HEADER}Elephant,ANIMAL\n"), "b").unwrap();
        let c = Lexicon::parse(&format!("{HEADER}lion,ANIMAL\n"), "c").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.version().len(), 16);
        assert_ne!(a.version(), c.version());
    }

    #[test]
    fn singularize_prefers_lexicon() {
        let lex = Lexicon::parse(&format!("{HEADER}tusk,PRODUCT\nteeth,PRODUCT,tooth\n"), "t").unwrap();
        assert_eq!(singularize("tusks", &lex), "tusk");
        assert_eq!(singularize("Teeth", &lex), "tooth");
        assert_eq!(singularize("geese", &lex), "goose");
        assert_eq!(singularize("pangolin", &lex), "pangolin");
    }

    #[test]
    fn shipped_lists_load() {
        let lex = Lexicon::shipped();
        let counts = lex.count_by_label();
        assert!(counts[&Label::Animal] > 400);
        assert_eq!(lex.canonicals(Label::Product).len(), 9);
        for country in [
            "cameroon",
            "congo",
            "gabon",
            "togo",
            "senegal",
            "benin",
            "côte d'ivoire",
            "burkina faso",
            "uganda",
        ] {
            assert!(lex.canonicals(Label::Country).contains(&country), "{country}");
        }
        assert_eq!(lex.get("sea turtles"), Some((Label::Animal, "sea turtle")));
        assert_eq!(lex.get("Côte d’Ivoire"), Some((Label::Country, "côte d'ivoire")));
    }
}
