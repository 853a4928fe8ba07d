//! Cardinal numbers, weights and arrest counts.

use serde::{Deserialize, Serialize};

use crate::corpus::{SentenceSpan, Token};
use crate::lexicon::Label;
use crate::ruler::EntitySpan;

/// Largest value [`parse_number`] recognizes.
pub const MAX_NUMBER: u32 = 999_999;

pub const ARREST_LEXEMES: &[&str] = &["arrest", "arrested", "arrests", "apprehended", "detained", "jailed"];

/// Item count attached to an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Quantity(u32);

impl Quantity {
    pub fn new(value: u32) -> Option<Self> {
        (value >= 1).then_some(Self(value))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Persons arrested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArrestCount(pub u32);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub value_kg: f64,
    pub original_value: f64,
    pub original_unit: String,
}

impl Weight {
    /// A weight already expressed in kilograms.
    pub fn from_kg(value_kg: f64) -> Self {
        Self {
            value_kg,
            original_value: value_kg,
            original_unit: "kg".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scale {
    Times(f64),
    Per(f64),
}

impl Scale {
    fn apply(self, value: f64) -> f64 {
        match self {
            Scale::Times(f) => value * f,
            Scale::Per(d) => value / d,
        }
    }
}

const POUND_KG: f64 = 0.45359237;

fn unit_scale(unit: &str) -> Option<Scale> {
    Some(match unit {
        "kg" | "kgs" | "kilogram" | "kilograms" | "kilogramme" | "kilogrammes" | "kilo" | "kilos" => Scale::Times(1.0),
        "t" | "ton" | "tons" | "tonne" | "tonnes" => Scale::Times(1000.0),
        // Division by 1000 is correctly rounded; multiplying by 0.001 is not.
        "g" | "gram" | "grams" | "gramme" | "grammes" => Scale::Per(1000.0),
        "lb" | "lbs" | "pound" | "pounds" => Scale::Times(POUND_KG),
        _ => return None,
    })
}

fn unit_value(word: &str) -> Option<u32> {
    Some(match word {
        "zero" => 0,
        "one" => 1,
        "two" => 2,
        "three" => 3,
        "four" => 4,
        "five" => 5,
        "six" => 6,
        "seven" => 7,
        "eight" => 8,
        "nine" => 9,
        _ => return None,
    })
}

fn teen_value(word: &str) -> Option<u32> {
    Some(match word {
        "ten" => 10,
        "eleven" => 11,
        "twelve" => 12,
        "thirteen" => 13,
        "fourteen" => 14,
        "fifteen" => 15,
        "sixteen" => 16,
        "seventeen" => 17,
        "eighteen" => 18,
        "nineteen" => 19,
        _ => return None,
    })
}

fn tens_value(word: &str) -> Option<u32> {
    Some(match word {
        "twenty" => 20,
        "thirty" => 30,
        "forty" => 40,
        "fifty" => 50,
        "sixty" => 60,
        "seventy" => 70,
        "eighty" => 80,
        "ninety" => 90,
        _ => return None,
    })
}

fn nonzero_unit(word: &str) -> Option<u32> {
    unit_value(word).filter(|&v| v > 0)
}

/// Digit strings, optionally grouped by commas in threes ("1,200").
fn parse_digits(text: &str) -> Option<u32> {
    let mut groups = text.split(',');
    let first = groups.next()?;
    let all_digits = |g: &str| !g.is_empty() && g.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(first) {
        return None;
    }
    let mut digits = first.to_string();
    let mut grouped = false;
    for group in groups {
        if group.len() != 3 || !all_digits(group) {
            return None;
        }
        grouped = true;
        digits.push_str(group);
    }
    if grouped && first.len() > 3 {
        return None;
    }
    if digits.len() > 7 {
        return None;
    }
    digits.parse::<u32>().ok().filter(|&v| v <= MAX_NUMBER)
}

/// 0..=99 spelled with words.
fn below_hundred(tokens: &[Token]) -> Option<(u32, usize)> {
    let word = tokens.first()?.lower.as_str();
    if let Some((tens, unit)) = word.split_once('-') {
        return Some((tens_value(tens)? + nonzero_unit(unit)?, 1));
    }
    if let Some(tens) = tens_value(word) {
        return match tokens.get(1).and_then(|t| nonzero_unit(&t.lower)) {
            Some(unit) => Some((tens + unit, 2)),
            None => Some((tens, 1)),
        };
    }
    teen_value(word).or_else(|| unit_value(word)).map(|v| (v, 1))
}

/// Nonzero remainder after "hundred" or "thousand", with an optional "and".
fn remainder(tokens: &[Token], allow_hundreds: bool) -> Option<(u32, usize)> {
    let skip = usize::from(tokens.first().is_some_and(|t| t.lower == "and"));
    let rest = &tokens[skip..];
    let parsed = if allow_hundreds {
        below_thousand(rest)
    } else {
        below_hundred(rest)
    };
    parsed.filter(|&(v, _)| v > 0).map(|(v, n)| (v, n + skip))
}

/// 0..=999 spelled with words.
fn below_thousand(tokens: &[Token]) -> Option<(u32, usize)> {
    let first = tokens.first()?;
    if let Some(unit) = nonzero_unit(&first.lower) {
        if tokens.get(1).is_some_and(|t| t.lower == "hundred") {
            let base = unit * 100;
            return Some(match remainder(&tokens[2..], false) {
                Some((v, n)) => (base + v, 2 + n),
                None => (base, 2),
            });
        }
    }
    below_hundred(tokens)
}

/// Parses a number at the start of `tokens`, returning its value and the
/// number of tokens consumed.
///
/// Accepts digit strings ("12", "1,200") and English number words up to
/// 999,999 ("twenty-five", "three hundred and two", "ten thousand").
pub fn parse_number(tokens: &[Token]) -> Option<(u32, usize)> {
    let first = tokens.first()?;
    if first.lower.starts_with(|c: char| c.is_ascii_digit()) {
        return parse_digits(&first.lower).map(|v| (v, 1));
    }
    let (value, used) = below_thousand(tokens)?;
    if value > 0 && tokens.get(used).is_some_and(|t| t.lower == "thousand") {
        let base = value * 1000;
        let used = used + 1;
        return Some(match remainder(&tokens[used..], true) {
            Some((v, n)) => (base + v, used + n),
            None => (base, used),
        });
    }
    Some((value, used))
}

/// Decimal literal such as "2.5" or "1,200".
fn parse_decimal(text: &str) -> Option<f64> {
    let (int_part, frac) = match text.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (text, None),
    };
    let int_value = parse_digits(int_part)?;
    match frac {
        None => Some(f64::from(int_value)),
        Some(f) if !f.is_empty() && f.bytes().all(|b| b.is_ascii_digit()) => format!("{int_value}.{f}").parse().ok(),
        Some(_) => None,
    }
}

/// Number at `tokens[0]` for weight purposes: decimals or integer words.
fn measure_number(tokens: &[Token]) -> Option<(f64, usize)> {
    let first = tokens.first()?;
    if first.lower.starts_with(|c: char| c.is_ascii_digit()) {
        return parse_decimal(&first.lower).map(|v| (v, 1));
    }
    parse_number(tokens).map(|(v, n)| (f64::from(v), n))
}

/// A weight expression over token indices `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatch {
    pub start: usize,
    pub end: usize,
    pub weight: Weight,
}

fn weight_from(value: f64, unit: &str) -> Option<Weight> {
    let scale = unit_scale(unit)?;
    let value_kg = scale.apply(value);
    (value_kg > 0.0 && value_kg.is_finite()).then(|| Weight {
        value_kg,
        original_value: value,
        original_unit: unit.to_string(),
    })
}

/// Splits a fused token like "513kg" into number and unit.
fn fused_weight(word: &str) -> Option<Weight> {
    let split = word.find(|c: char| c.is_alphabetic())?;
    let (number, unit) = word.split_at(split);
    weight_from(parse_decimal(number)?, unit)
}

/// Weight expressions in a token sequence, left to right, non-overlapping.
pub fn find_weights(tokens: &[Token]) -> Vec<WeightMatch> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if let Some(weight) = fused_weight(&tokens[i].lower) {
            out.push(WeightMatch {
                start: i,
                end: i + 1,
                weight,
            });
            i += 1;
            continue;
        }
        if let Some((value, used)) = measure_number(&tokens[i..]) {
            let mut j = i + used;
            if tokens.get(j).is_some_and(|t| t.lower == "metric") {
                j += 1;
            }
            if let Some(weight) = tokens.get(j).and_then(|t| weight_from(value, &t.lower)) {
                out.push(WeightMatch {
                    start: i,
                    end: j + 1,
                    weight,
                });
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Renders kilograms with at most six decimals and no trailing zeros.
pub fn format_kg(value_kg: f64) -> String {
    let text = format!("{value_kg:.6}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    if text == "-0" {
        "0".into()
    } else {
        text.to_string()
    }
}

fn span_over(tokens: &[Token], start: usize, end: usize, text: &str, label: Label, canonical: String) -> EntitySpan {
    let (s, e) = (tokens[start].start_char, tokens[end - 1].end_char);
    EntitySpan {
        start_char: s,
        end_char: e,
        text: text[s..e].to_string(),
        label,
        canonical,
    }
}

/// WEIGHT spans in a sentence. `text` is the document text the sentence's
/// offsets refer to.
pub fn parse_weights(sentence: &SentenceSpan, text: &str) -> Vec<(EntitySpan, Weight)> {
    find_weights(&sentence.tokens)
        .into_iter()
        .map(|m| {
            let span = span_over(
                &sentence.tokens,
                m.start,
                m.end,
                text,
                Label::Weight,
                format_kg(m.weight.value_kg),
            );
            (span, m.weight)
        })
        .collect()
}

/// Integer numbers as token ranges `(start, end, value)`, left to right.
pub fn find_numbers(tokens: &[Token]) -> Vec<(usize, usize, u32)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        match parse_number(&tokens[i..]) {
            Some((value, used)) => {
                out.push((i, i + used, value));
                i += used;
            }
            None => i += 1,
        }
    }
    out
}

/// WEIGHT spans plus CARDINAL spans for numbers outside any weight, sorted.
pub fn numeric_spans(sentence: &SentenceSpan, text: &str) -> Vec<EntitySpan> {
    let tokens = &sentence.tokens;
    let weights = find_weights(tokens);
    let inside_weight = |i: usize| weights.iter().any(|w| w.start <= i && i < w.end);
    let mut out: Vec<EntitySpan> = weights
        .iter()
        .map(|m| {
            span_over(
                tokens,
                m.start,
                m.end,
                text,
                Label::Weight,
                format_kg(m.weight.value_kg),
            )
        })
        .collect();
    for (start, end, value) in find_numbers(tokens) {
        if (start..end).any(inside_weight) {
            continue;
        }
        out.push(span_over(tokens, start, end, text, Label::Cardinal, value.to_string()));
    }
    out.sort_by_key(|s| s.start_char);
    out
}

/// Tuning for [`detect_arrest_count_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrestRule {
    /// Maximum token distance between a number and the arrest lexeme.
    pub window: usize,
    /// Count used when a lexeme has no number nearby.
    pub default_count: u32,
}

impl Default for ArrestRule {
    fn default() -> Self {
        Self {
            window: 5,
            default_count: 1,
        }
    }
}

pub fn detect_arrest_count(sentence: &SentenceSpan) -> Option<ArrestCount> {
    detect_arrest_count_with(&sentence.tokens, ArrestRule::default())
}

fn looks_like_year(tokens: &[Token], start: usize, end: usize, value: u32) -> bool {
    end - start == 1 && tokens[start].lower.bytes().all(|b| b.is_ascii_digit()) && (1900..=2099).contains(&value)
}

/// Arrest count for a sentence's tokens.
///
/// For each arrest lexeme in order, the closest number ending before it
/// within `window` tokens wins; failing that, the closest one after it.
/// Numbers inside weight expressions and four-digit years are skipped. A
/// lexeme with no usable number yields `default_count`.
pub fn detect_arrest_count_with(tokens: &[Token], rule: ArrestRule) -> Option<ArrestCount> {
    let lexemes: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| ARREST_LEXEMES.contains(&t.lower.as_str()))
        .map(|(i, _)| i)
        .collect();
    if lexemes.is_empty() {
        return None;
    }
    let weights = find_weights(tokens);
    let numbers: Vec<(usize, usize, u32)> = find_numbers(tokens)
        .into_iter()
        .filter(|&(s, e, v)| !weights.iter().any(|w| s < w.end && w.start < e) && !looks_like_year(tokens, s, e, v))
        .collect();
    for &lexeme in &lexemes {
        let left = numbers
            .iter()
            .filter(|&&(_, e, _)| e <= lexeme && lexeme - (e - 1) <= rule.window)
            .max_by_key(|&&(_, e, _)| e);
        let right = numbers
            .iter()
            .filter(|&&(s, _, _)| s > lexeme && s - lexeme <= rule.window)
            .min_by_key(|&&(s, _, _)| s);
        if let Some(&(_, _, value)) = left.or(right) {
            return Some(ArrestCount(value));
        }
    }
    Some(ArrestCount(rule.default_count))
}
