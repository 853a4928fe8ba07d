//! Groups entity spans into trafficking events, one sentence at a time.
//!
//! Per sentence:
//!
//! 1. Only sentences with an ANIMAL or PRODUCT span, or an arrest mention,
//!    produce events.
//! 2. Each PRODUCT pairs with the nearest unpaired ANIMAL to its left within
//!    `pairing_window` tokens. Every ANIMAL yields one event (with its paired
//!    product, if any) and every unpaired PRODUCT yields one event.
//! 3. A CARDINAL ending within `quantity_window` tokens before an event's
//!    span is its quantity. Each CARDINAL is used once.
//! 4. Each WEIGHT goes to the closest event that has no weight yet (ties go
//!    left).
//! 5. The sentence's arrest count is copied to all its events. A sentence
//!    with an arrest count but no ANIMAL or PRODUCT yields one event.
//! 6. Country is the closest COUNTRY in the sentence, else the first COUNTRY
//!    in the paragraph.
//! 7. Year and month come from the report.

use serde::{Deserialize, Serialize};

use crate::config::HeuristicConfig;
use crate::corpus::{ReportDocument, SentenceSpan};
use crate::lexicon::Label;
use crate::measure::{detect_arrest_count_with, find_weights, ArrestCount, Quantity, Weight};
use crate::ruler::EntitySpan;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraffickingEvent {
    pub report_id: String,
    pub year: i32,
    pub month: u32,
    pub country: Option<String>,
    pub species: Option<String>,
    pub product: Option<String>,
    pub quantity: Option<Quantity>,
    pub weight: Option<Weight>,
    pub arrest_count: Option<ArrestCount>,
    /// Sentence the event was built from.
    pub sentence_index: usize,
}

impl TraffickingEvent {
    pub fn new(report_id: impl Into<String>, year: i32, month: u32) -> Self {
        Self {
            report_id: report_id.into(),
            year,
            month,
            country: None,
            species: None,
            product: None,
            quantity: None,
            weight: None,
            arrest_count: None,
            sentence_index: 0,
        }
    }
}

/// A span resolved to token indices `[start, end)` within its sentence.
#[derive(Debug, Clone)]
struct Located<'a> {
    span: &'a EntitySpan,
    start: usize,
    end: usize,
}

impl Located<'_> {
    /// Tokens from the end of `self` to the start of `later`; adjacent spans are 1 apart.
    fn gap_to(&self, later: &Located<'_>) -> Option<usize> {
        (self.end <= later.start).then(|| later.start - (self.end - 1))
    }

    fn distance(&self, other: &Located<'_>) -> usize {
        self.gap_to(other).or_else(|| other.gap_to(self)).unwrap_or(0)
    }
}

fn locate<'a>(sentence: &SentenceSpan, span: &'a EntitySpan) -> Option<Located<'a>> {
    let tokens = &sentence.tokens;
    let start = tokens.iter().position(|t| t.start_char >= span.start_char)?;
    let end = tokens.iter().rposition(|t| t.end_char <= span.end_char)? + 1;
    (start < end).then_some(Located { span, start, end })
}

struct Draft<'a> {
    parts: Vec<Located<'a>>,
    quantity: Option<Quantity>,
    weight: Option<Weight>,
}

impl Draft<'_> {
    fn anchor(&self) -> usize {
        self.parts.iter().map(|p| p.start).min().unwrap_or(0)
    }

    fn distance(&self, other: &Located<'_>) -> usize {
        self.parts.iter().map(|p| p.distance(other)).min().unwrap_or(usize::MAX)
    }

    fn canonical(&self, label: Label) -> Option<String> {
        self.parts
            .iter()
            .find(|p| p.span.label == label)
            .map(|p| p.span.canonical.clone())
    }
}

/// Builds events from a document and its merged, sorted, non-overlapping spans.
pub fn assemble(doc: &ReportDocument, spans: &[EntitySpan], config: &HeuristicConfig) -> Vec<TraffickingEvent> {
    let paragraph_country: Vec<Option<&EntitySpan>> = doc
        .paragraphs
        .iter()
        .map(|&(start, end)| {
            spans
                .iter()
                .find(|s| s.label == Label::Country && start <= s.start_char && s.end_char <= end)
        })
        .collect();

    let mut events = Vec::new();
    for (index, sentence) in doc.sentences.iter().enumerate() {
        let located: Vec<Located> = spans
            .iter()
            .filter(|s| sentence.start_char <= s.start_char && s.end_char <= sentence.end_char)
            .filter_map(|s| locate(sentence, s))
            .collect();
        let of = |label: Label| located.iter().filter(move |l| l.span.label == label);

        let arrests = detect_arrest_count_with(&sentence.tokens, config.arrest_rule());
        let animals: Vec<&Located> = of(Label::Animal).collect();
        let products: Vec<&Located> = of(Label::Product).collect();
        if animals.is_empty() && products.is_empty() && arrests.is_none() {
            continue;
        }

        // Pairing.
        let mut paired_with: Vec<Option<usize>> = vec![None; animals.len()];
        let mut unpaired_products = Vec::new();
        for (pi, product) in products.iter().enumerate() {
            let pick = animals
                .iter()
                .enumerate()
                .filter(|(i, _)| paired_with[*i].is_none())
                .filter_map(|(i, a)| a.gap_to(product).map(|gap| (i, a.end, gap)))
                .filter(|&(_, _, gap)| gap <= config.pairing_window)
                .max_by_key(|&(_, end, _)| end);
            match pick {
                Some((i, _, _)) => paired_with[i] = Some(pi),
                None => unpaired_products.push(*product),
            }
        }
        let mut drafts: Vec<Draft> = animals
            .iter()
            .enumerate()
            .map(|(i, animal)| {
                let mut parts = vec![(*animal).clone()];
                if let Some(p) = paired_with[i] {
                    parts.push(products[p].clone());
                }
                Draft {
                    parts,
                    quantity: None,
                    weight: None,
                }
            })
            .chain(unpaired_products.iter().map(|p| Draft {
                parts: vec![(*p).clone()],
                quantity: None,
                weight: None,
            }))
            .collect();
        drafts.sort_by_key(Draft::anchor);
        if drafts.is_empty() {
            drafts.push(Draft {
                parts: Vec::new(),
                quantity: None,
                weight: None,
            });
        }

        // Quantity.
        let cardinals: Vec<&Located> = of(Label::Cardinal).collect();
        let mut cardinal_used = vec![false; cardinals.len()];
        for draft in &mut drafts {
            for part in &draft.parts {
                let pick = cardinals
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !cardinal_used[*i])
                    .filter_map(|(i, c)| c.gap_to(part).map(|gap| (i, c.end, gap)))
                    .filter(|&(_, _, gap)| gap <= config.quantity_window)
                    .max_by_key(|&(_, end, _)| end);
                if let Some((i, _, _)) = pick {
                    let value = cardinals[i].span.canonical.parse::<u32>().ok().and_then(Quantity::new);
                    if let Some(quantity) = value {
                        cardinal_used[i] = true;
                        draft.quantity = Some(quantity);
                        break;
                    }
                }
            }
        }

        // Weight.
        let parsed_weights = find_weights(&sentence.tokens);
        for weight in of(Label::Weight) {
            let value = parsed_weights
                .iter()
                .find(|m| m.start == weight.start && m.end == weight.end)
                .map(|m| m.weight.clone())
                .or_else(|| weight.span.canonical.parse().ok().map(Weight::from_kg));
            let Some(value) = value else { continue };
            let target = drafts
                .iter_mut()
                .filter(|d| d.weight.is_none())
                .min_by_key(|d| d.distance(weight));
            if let Some(draft) = target {
                draft.weight = Some(value);
            }
        }

        // Country.
        let countries: Vec<&Located> = of(Label::Country).collect();
        let fallback = doc
            .paragraph_of(index)
            .and_then(|p| paragraph_country[p])
            .map(|s| s.canonical.clone());

        for draft in drafts {
            let country = countries
                .iter()
                .min_by_key(|c| if draft.parts.is_empty() { 0 } else { draft.distance(c) })
                .map(|c| c.span.canonical.clone())
                .or_else(|| fallback.clone());
            events.push(TraffickingEvent {
                report_id: doc.report_id.clone(),
                year: doc.year,
                month: doc.month,
                country,
                species: draft.canonical(Label::Animal),
                product: draft.canonical(Label::Product),
                quantity: draft.quantity,
                weight: draft.weight,
                arrest_count: arrests,
                sentence_index: index,
            });
        }
    }
    events
}
