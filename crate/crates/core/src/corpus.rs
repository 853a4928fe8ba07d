//! Loading plain-text briefs and splitting them into paragraphs, sentences
//! and tokens.
//!
//! All offsets are byte offsets into the document's `raw_text`, so
//! `&raw_text[start..end]` is always a valid slice on a char boundary.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CorpusError;

/// Abbreviations that never end a sentence, compared case-insensitively.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &["Mr.", "Dr.", "No.", "kg.", "e.g.", "i.e."];

const TERMINATORS: &[char] = &['.', '!', '?'];
const CLOSERS: &[char] = &['"', '\'', '\u{201d}', '\u{2019}', ')', ']', '\u{bb}'];
const OPENERS: &[char] = &['"', '\'', '\u{201c}', '\u{2018}', '(', '[', '\u{ab}'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub start_char: usize,
    pub end_char: usize,
    pub text: String,
    pub lower: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceSpan {
    pub start_char: usize,
    pub end_char: usize,
    pub tokens: Vec<Token>,
}

impl SentenceSpan {
    pub fn text<'a>(&self, raw_text: &'a str) -> &'a str {
        &raw_text[self.start_char..self.end_char]
    }
}

/// One monthly brief.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub report_id: String,
    pub year: i32,
    pub month: u32,
    pub raw_text: String,
    pub sentences: Vec<SentenceSpan>,
    /// `(start, end)` byte ranges of blank-line separated paragraphs.
    pub paragraphs: Vec<(usize, usize)>,
    pub source_path: Option<PathBuf>,
}

impl ReportDocument {
    /// Builds a document from text that has already been read.
    pub fn from_text(
        report_id: impl Into<String>,
        year: i32,
        month: u32,
        raw_text: impl Into<String>,
        abbreviations: &Abbreviations,
    ) -> Result<Self, CorpusError> {
        let report_id = report_id.into();
        if !(1..=12).contains(&month) {
            return Err(CorpusError::Naming {
                name: report_id,
                reason: format!("month {month} outside 1-12"),
            });
        }
        let raw_text = raw_text.into();
        let paragraphs = paragraph_bounds(&raw_text);
        let sentences = segment_paragraphs(&raw_text, &paragraphs, abbreviations);
        Ok(Self {
            report_id,
            year,
            month,
            raw_text,
            sentences,
            paragraphs,
            source_path: None,
        })
    }

    /// Index into `paragraphs` of the paragraph holding sentence `sentence_index`.
    pub fn paragraph_of(&self, sentence_index: usize) -> Option<usize> {
        let sentence = self.sentences.get(sentence_index)?;
        self.paragraphs
            .iter()
            .position(|&(start, end)| start <= sentence.start_char && sentence.end_char <= end)
    }

    pub fn sentence_text(&self, sentence_index: usize) -> &str {
        self.sentences[sentence_index].text(&self.raw_text)
    }
}

/// Report identity parsed from a `<source>-<YYYY>-<MM>` file stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportName {
    pub report_id: String,
    pub source: String,
    pub year: i32,
    pub month: u32,
}

/// Parses a brief's file name, e.g. `eagle-2021-04.txt`.
pub fn parse_report_name(file_name: &str) -> Result<ReportName, CorpusError> {
    let naming = |reason: &str| CorpusError::Naming {
        name: file_name.to_string(),
        reason: reason.to_string(),
    };
    let stem = file_name
        .strip_suffix(".txt")
        .ok_or_else(|| naming("expected a .txt extension"))?;
    let mut parts = stem.rsplitn(3, '-');
    let (month, year, source) = match (parts.next(), parts.next(), parts.next()) {
        (Some(m), Some(y), Some(s)) => (m, y, s),
        _ => return Err(naming("expected <source>-<YYYY>-<MM>.txt")),
    };
    if source.is_empty() {
        return Err(naming("empty source prefix"));
    }
    if year.len() != 4 || !year.bytes().all(|b| b.is_ascii_digit()) {
        return Err(naming("year must be four digits"));
    }
    if month.len() != 2 || !month.bytes().all(|b| b.is_ascii_digit()) {
        return Err(naming("month must be two digits"));
    }
    let year: i32 = year.parse().map_err(|_| naming("bad year"))?;
    let month: u32 = month.parse().map_err(|_| naming("bad month"))?;
    if !(1..=12).contains(&month) {
        return Err(naming(&format!("month {month} outside 1-12")));
    }
    Ok(ReportName {
        report_id: stem.to_string(),
        source: source.to_string(),
        year,
        month,
    })
}

/// Loads a brief with the default abbreviation list.
pub fn load_report(path: &Path) -> Result<ReportDocument, CorpusError> {
    load_report_with(path, &Abbreviations::default())
}

pub fn load_report_with(path: &Path, abbreviations: &Abbreviations) -> Result<ReportDocument, CorpusError> {
    let file_name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CorpusError::Naming {
            name: path.display().to_string(),
            reason: "file name is not valid UTF-8".into(),
        })?;
    let name = parse_report_name(file_name)?;
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8(bytes).map_err(|e| CorpusError::Encoding {
        path: path.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })?;
    let mut doc = ReportDocument::from_text(name.report_id, name.year, name.month, text, abbreviations)?;
    doc.source_path = Some(path.to_path_buf());
    Ok(doc)
}

/// Case-insensitive set of sentence-internal abbreviations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abbreviations {
    set: HashSet<String>,
}

impl Default for Abbreviations {
    fn default() -> Self {
        Self::new(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl Abbreviations {
    pub fn new<'a>(items: impl IntoIterator<Item = &'a str>) -> Self {
        Self {
            set: items
                .into_iter()
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_lowercase)
                .collect(),
        }
    }

    pub fn empty() -> Self {
        Self { set: HashSet::new() }
    }

    /// One abbreviation per line; blank lines are skipped.
    pub fn parse(text: &str) -> Self {
        Self::new(text.lines())
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let bytes = fs::read(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8(bytes).map_err(|e| CorpusError::Encoding {
            path: path.to_path_buf(),
            offset: e.utf8_error().valid_up_to(),
        })?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.set.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

/// Paragraphs are maximal runs of non-blank lines. Each range runs from the
/// first byte of its first line to the end of its last line, excluding the
/// line terminator.
pub fn paragraph_bounds(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    let mut line_start = 0;
    for line in text.split_inclusive('\n') {
        let content = line.trim_end_matches(['\n', '\r']);
        let line_end = line_start + content.len();
        if content.trim().is_empty() {
            if let Some(p) = current.take() {
                out.push(p);
            }
        } else {
            match current.as_mut() {
                Some(p) => p.1 = line_end,
                None => current = Some((line_start, line_end)),
            }
        }
        line_start += line.len();
    }
    out.extend(current);
    out
}

/// Splits text into sentences with the default abbreviation list.
pub fn segment_sentences(text: &str) -> Vec<SentenceSpan> {
    segment_sentences_with(text, &Abbreviations::default())
}

/// Splits text into sentences. Blank lines always end a sentence.
pub fn segment_sentences_with(text: &str, abbreviations: &Abbreviations) -> Vec<SentenceSpan> {
    segment_paragraphs(text, &paragraph_bounds(text), abbreviations)
}

fn segment_paragraphs(text: &str, paragraphs: &[(usize, usize)], abbreviations: &Abbreviations) -> Vec<SentenceSpan> {
    let mut out = Vec::new();
    for &(start, end) in paragraphs {
        for (s, e) in sentence_bounds(text, start, end, abbreviations) {
            out.push(SentenceSpan {
                start_char: s,
                end_char: e,
                tokens: tokenize_at(&text[s..e], s),
            });
        }
    }
    out
}

fn sentence_bounds(text: &str, start: usize, end: usize, abbreviations: &Abbreviations) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut sentence_start: Option<usize> = None;
    let mut pos = start;
    while pos < end {
        let c = text[pos..end].chars().next().expect("pos < end");
        let next = pos + c.len_utf8();
        if sentence_start.is_none() && !c.is_whitespace() {
            sentence_start = Some(pos);
        }
        if !TERMINATORS.contains(&c) {
            pos = next;
            continue;
        }
        let mut stop = next;
        for d in text[next..end].chars() {
            if TERMINATORS.contains(&d) || CLOSERS.contains(&d) {
                stop += d.len_utf8();
            } else {
                break;
            }
        }
        let rest = &text[stop..end];
        let boundary = match rest.chars().next() {
            None => true,
            Some(w) if w.is_whitespace() => match rest.trim_start().trim_start_matches(OPENERS).chars().next() {
                None => true,
                Some(u) => u.is_uppercase(),
            },
            Some(_) => false,
        };
        let abbreviated = c == '.' && stop == next && abbreviations.contains(word_ending_at(text, start, next));
        if boundary && !abbreviated {
            if let Some(s) = sentence_start.take() {
                out.push((s, stop));
            }
        }
        pos = stop;
    }
    if let Some(s) = sentence_start {
        let tail = text[s..end].trim_end();
        out.push((s, s + tail.len()));
    }
    out
}

/// The whitespace-delimited word ending at `end`, minus leading punctuation.
fn word_ending_at(text: &str, floor: usize, end: usize) -> &str {
    let slice = &text[floor..end];
    let begin = slice
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_whitespace())
        .map_or(0, |(i, c)| i + c.len_utf8());
    slice[begin..].trim_start_matches(|c: char| !c.is_alphanumeric())
}

/// Tokenizes `text` with offsets starting at zero.
pub fn tokenize(text: &str) -> Vec<Token> {
    tokenize_at(text, 0)
}

/// Tokenizes `text`, a slice that begins at byte `base` of its document.
///
/// Tokens are maximal alphanumeric runs. A hyphen between two letters joins
/// the runs ("twenty-five"), as does `,` or `.` between two digits ("1,200",
/// "2.5"). Every other non-whitespace character is its own token.
pub fn tokenize_at(text: &str, base: usize) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        if c.is_alphanumeric() {
            loop {
                while j < chars.len() && chars[j].1.is_alphanumeric() {
                    j += 1;
                }
                if j + 1 < chars.len() {
                    let (prev, sep, after) = (chars[j - 1].1, chars[j].1, chars[j + 1].1);
                    let letter_join = sep == '-' && prev.is_alphabetic() && after.is_alphabetic();
                    let digit_join = (sep == ',' || sep == '.') && prev.is_ascii_digit() && after.is_ascii_digit();
                    if letter_join || digit_join {
                        j += 1;
                        continue;
                    }
                }
                break;
            }
        }
        let end = chars.get(j).map_or(text.len(), |&(o, _)| o);
        let slice = &text[start..end];
        tokens.push(Token {
            start_char: base + start,
            end_char: base + end,
            text: slice.to_string(),
            lower: slice.to_lowercase(),
        });
        i = j;
    }
    tokens
}
