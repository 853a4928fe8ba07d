//! Gazetteer matching over token sequences.
//!
//! The lexicon is compiled into a trie keyed by case-folded tokens. Matching
//! walks the trie from each token position and keeps the longest terminal
//! reached; a match consumes its tokens, so the scan yields leftmost-longest,
//! non-overlapping spans aligned to token boundaries.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{ReportDocument, Token};
use crate::lexicon::{Label, Lexicon};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start_char: usize,
    pub end_char: usize,
    pub text: String,
    pub label: Label,
    /// Lexicon canonical for gazetteer labels, the normalized number otherwise.
    pub canonical: String,
}

impl EntitySpan {
    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.start_char < other.end_char && other.start_char < self.end_char
    }
}

#[derive(Debug, Clone, Default)]
struct Node {
    children: HashMap<String, usize>,
    terminal: Option<(Label, String)>,
}

/// Token-level trie compiled from a [`Lexicon`].
#[derive(Debug, Clone)]
pub struct CompiledMatcher {
    nodes: Vec<Node>,
    lexicon_version: String,
}

/// A match over token indices `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenMatch {
    pub start: usize,
    pub end: usize,
    pub label: Label,
    pub canonical: String,
}

pub fn compile(lexicon: &Lexicon) -> CompiledMatcher {
    let mut nodes = vec![Node::default()];
    for (surface, label, canonical) in lexicon.iter() {
        let mut at = 0;
        for word in surface.split(' ') {
            at = match nodes[at].children.get(word) {
                Some(&next) => next,
                None => {
                    nodes.push(Node::default());
                    let next = nodes.len() - 1;
                    nodes[at].children.insert(word.to_string(), next);
                    next
                }
            };
        }
        nodes[at].terminal = Some((label, canonical.to_string()));
    }
    CompiledMatcher {
        nodes,
        lexicon_version: lexicon.version().to_string(),
    }
}

impl CompiledMatcher {
    pub fn lexicon_version(&self) -> &str {
        &self.lexicon_version
    }

    /// Longest lexicon phrase starting at `tokens[0]`, as (length, label, canonical).
    fn longest_at(&self, tokens: &[Token]) -> Option<(usize, &(Label, String))> {
        let mut at = 0;
        let mut best = None;
        for (i, token) in tokens.iter().enumerate() {
            match self.nodes[at].children.get(&token.lower) {
                Some(&next) => at = next,
                None => break,
            }
            if let Some(terminal) = &self.nodes[at].terminal {
                best = Some((i + 1, terminal));
            }
        }
        best
    }

    /// Leftmost-longest matches over one token sequence.
    pub fn find_in_tokens(&self, tokens: &[Token]) -> Vec<TokenMatch> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match self.longest_at(&tokens[i..]) {
                Some((len, (label, canonical))) => {
                    out.push(TokenMatch {
                        start: i,
                        end: i + len,
                        label: *label,
                        canonical: canonical.clone(),
                    });
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }
}

/// Gazetteer spans for every sentence of `doc`, sorted by offset. Phrases
/// never cross a sentence boundary.
pub fn find_entities(doc: &ReportDocument, matcher: &CompiledMatcher) -> Vec<EntitySpan> {
    let mut out = Vec::new();
    for sentence in &doc.sentences {
        let tokens = &sentence.tokens;
        for m in matcher.find_in_tokens(tokens) {
            let (start, end) = (tokens[m.start].start_char, tokens[m.end - 1].end_char);
            out.push(EntitySpan {
                start_char: start,
                end_char: end,
                text: doc.raw_text[start..end].to_string(),
                label: m.label,
                canonical: m.canonical,
            });
        }
    }
    out
}

/// Merges gazetteer and numeric spans. Where they overlap the gazetteer
/// span is kept.
pub fn annotate(lexical: Vec<EntitySpan>, numeric: Vec<EntitySpan>) -> Vec<EntitySpan> {
    let kept: Vec<EntitySpan> = numeric
        .into_iter()
        .filter(|n| !lexical.iter().any(|l| l.overlaps(n)))
        .collect();
    let mut out = lexical;
    out.extend(kept);
    out.sort_by_key(|s| (s.start_char, s.end_char));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Abbreviations;

    fn lexicon(rows: &str) -> Lexicon {
        Lexicon::parse(&format!("surface,label,canonical\n{rows}"), "test").unwrap()
    }

    fn doc(text: &str) -> ReportDocument {
        ReportDocument::from_text("eagle-2021-04", 2021, 4, text, &Abbreviations::default()).unwrap()
    }

    fn found(rows: &str, text: &str) -> Vec<(String, Label, String)> {
        let matcher = compile(&lexicon(rows));
        find_entities(&doc(text), &matcher)
            .into_iter()
            .map(|s| (s.text, s.label, s.canonical))
            .collect()
    }

    fn span(start: usize, end: usize, label: Label) -> EntitySpan {
        EntitySpan {
            start_char: start,
            end_char: end,
            text: String::new(),
            label,
            canonical: String::new(),
        }
    }

    #[test]
    fn empty_lexicon_matches_nothing() {
        assert!(found("", "an elephant and some ivory").is_empty());
    }

    #[test]
    fn case_insensitive() {
        let hits = found("elephant,ANIMAL\n", "Elephant ELEPHANT elephant elephants");
        assert_eq!(hits.len(), 4);
        assert!(hits.iter().all(|(_, l, c)| *l == Label::Animal && c == "elephant"));
    }

    #[test]
    fn longest_phrase_wins() {
        let hits = found("turtle,ANIMAL\nsea turtle,ANIMAL\n", "a sea turtle shell and a turtle");
        assert_eq!(
            hits,
            [
                ("sea turtle".into(), Label::Animal, "sea turtle".into()),
                ("turtle".into(), Label::Animal, "turtle".into())
            ]
        );
    }

    #[test]
    fn adjacent_labels() {
        let hits = found("elephant,ANIMAL\nivory,PRODUCT\n", "seized elephant ivory");
        assert_eq!(
            hits,
            [
                ("elephant".into(), Label::Animal, "elephant".into()),
                ("ivory".into(), Label::Product, "ivory".into())
            ]
        );
    }

    #[test]
    fn token_aligned_only() {
        assert!(found("scale,PRODUCT\n", "the trade escalates").is_empty());
        assert!(found("sea turtle,ANIMAL\n", "sea-turtle").is_empty());
    }

    #[test]
    fn matches_stop_at_sentence_boundaries() {
        assert!(found("sea turtle,ANIMAL\n", "Out at sea. Turtle found.").is_empty());
    }

    #[test]
    fn country_beats_contained_product() {
        let hits = found(
            "ivory,PRODUCT\nIvory Coast,COUNTRY,côte d'ivoire\n",
            "ivory from Ivory Coast",
        );
        assert_eq!(hits[0].1, Label::Product);
        assert_eq!(hits[1], ("Ivory Coast".into(), Label::Country, "côte d'ivoire".into()));
    }

    #[test]
    fn empty_text() {
        assert!(found("elephant,ANIMAL\n", "").is_empty());
    }

    #[test]
    fn annotate_precedence() {
        let merged = annotate(vec![], vec![span(0, 1, Label::Cardinal)]);
        assert_eq!(merged, [span(0, 1, Label::Cardinal)]);

        let merged = annotate(vec![span(2, 8, Label::Animal)], vec![span(0, 4, Label::Cardinal)]);
        assert_eq!(merged, [span(2, 8, Label::Animal)]);

        let merged = annotate(
            vec![span(10, 14, Label::Animal)],
            vec![span(0, 2, Label::Cardinal), span(20, 25, Label::Weight)],
        );
        assert_eq!(
            merged,
            [
                span(0, 2, Label::Cardinal),
                span(10, 14, Label::Animal),
                span(20, 25, Label::Weight)
            ]
        );
    }
}
