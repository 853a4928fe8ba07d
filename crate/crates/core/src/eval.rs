//! Scoring extracted events against gold annotations.
//!
//! Within each report, predicted and gold events are matched one-to-one by
//! a greedy pass over eligible pairs, highest field-agreement score first.
//! A matched prediction is fully correct when all six fields agree and
//! partially correct otherwise; an unmatched prediction is unrelated and an
//! unmatched gold event is undetected.

use std::collections::BTreeMap;
use std::fmt;

use crate::assemble::TraffickingEvent;
use crate::error::EvalError;

/// Gold annotations share the event record and CSV format.
pub type GoldEvent = TraffickingEvent;

pub const WEIGHT_TOLERANCE_KG: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    ArrestCount,
    Country,
    Species,
    Product,
    Quantity,
    Weight,
}

impl Field {
    pub const ALL: [Field; 6] = [
        Field::ArrestCount,
        Field::Country,
        Field::Species,
        Field::Product,
        Field::Quantity,
        Field::Weight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Field::ArrestCount => "arrest_count",
            Field::Country => "country",
            Field::Species => "species",
            Field::Product => "product",
            Field::Quantity => "quantity",
            Field::Weight => "weight_kg",
        }
    }

    pub fn agree(self, a: &TraffickingEvent, b: &TraffickingEvent) -> bool {
        match self {
            Field::ArrestCount => a.arrest_count == b.arrest_count,
            Field::Country => text_agree(a.country.as_deref(), b.country.as_deref()),
            Field::Species => text_agree(a.species.as_deref(), b.species.as_deref()),
            Field::Product => text_agree(a.product.as_deref(), b.product.as_deref()),
            Field::Quantity => a.quantity == b.quantity,
            Field::Weight => field_agree(
                a.weight.as_ref().map(|w| w.value_kg),
                b.weight.as_ref().map(|w| w.value_kg),
            ),
        }
    }
}

/// Weights in kilograms; equal within [`WEIGHT_TOLERANCE_KG`].
pub fn field_agree(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= WEIGHT_TOLERANCE_KG,
        _ => false,
    }
}

fn text_agree(a: Option<&str>, b: Option<&str>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x.trim().to_lowercase() == y.trim().to_lowercase(),
        _ => false,
    }
}

fn present_agree(a: Option<&str>, b: Option<&str>) -> bool {
    a.is_some() && text_agree(a, b)
}

fn arrest_only(e: &TraffickingEvent) -> bool {
    e.species.is_none() && e.product.is_none() && e.arrest_count.is_some()
}

/// Which predicted/gold pairs may be matched at all.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Eligibility {
    /// Species or product present on both sides and equal. Two events
    /// with neither are eligible when their arrest counts agree.
    #[default]
    SpeciesOrProduct,
    /// Any pair with at least one agreeing field.
    AnyField,
}

impl Eligibility {
    fn allows(self, p: &TraffickingEvent, g: &TraffickingEvent, score: usize) -> bool {
        match self {
            Eligibility::SpeciesOrProduct => {
                present_agree(p.species.as_deref(), g.species.as_deref())
                    || present_agree(p.product.as_deref(), g.product.as_deref())
                    || (arrest_only(p) && arrest_only(g) && p.arrest_count == g.arrest_count)
            }
            Eligibility::AnyField => score > 0,
        }
    }
}

/// Number of agreeing fields, 0 to 6.
pub fn score(p: &TraffickingEvent, g: &TraffickingEvent) -> usize {
    Field::ALL.iter().filter(|f| f.agree(p, g)).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalOutcome {
    FullyCorrect,
    PartiallyCorrect,
    Unrelated,
    Undetected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportMatch {
    /// (predicted index, gold index, score), in the order they were chosen.
    pub pairs: Vec<(usize, usize, usize)>,
    /// One of the first three outcomes per prediction.
    pub predicted: Vec<EvalOutcome>,
    /// Matched prediction per gold event; `None` means undetected.
    pub gold: Vec<Option<usize>>,
}

/// Matches the events of a single report.
pub fn match_events(
    predicted: &[TraffickingEvent],
    gold: &[GoldEvent],
    eligibility: Eligibility,
) -> Result<ReportMatch, EvalError> {
    let mut ids: Vec<&str> = predicted.iter().chain(gold).map(|e| e.report_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() > 1 {
        return Err(EvalError::MixedReports(ids.into_iter().map(String::from).collect()));
    }

    let mut candidates = Vec::new();
    for (pi, p) in predicted.iter().enumerate() {
        for (gi, g) in gold.iter().enumerate() {
            let s = score(p, g);
            if eligibility.allows(p, g, s) {
                candidates.push((pi, gi, s));
            }
        }
    }
    candidates.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));

    let mut result = ReportMatch {
        pairs: Vec::new(),
        predicted: vec![EvalOutcome::Unrelated; predicted.len()],
        gold: vec![None; gold.len()],
    };
    let mut used = vec![false; predicted.len()];
    for (pi, gi, s) in candidates {
        if used[pi] || result.gold[gi].is_some() {
            continue;
        }
        used[pi] = true;
        result.gold[gi] = Some(pi);
        result.pairs.push((pi, gi, s));
        result.predicted[pi] = if s == Field::ALL.len() {
            EvalOutcome::FullyCorrect
        } else {
            EvalOutcome::PartiallyCorrect
        };
    }
    Ok(result)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalReport {
    pub fully_correct: u64,
    pub partially_correct: u64,
    pub unrelated: u64,
    pub undetected: u64,
    pub detected_gold: u64,
    pub total_gold: u64,
    /// Per field, the number of matched pairs agreeing on it.
    pub field_agreement: BTreeMap<Field, u64>,
}

impl EvalReport {
    /// Builds a report from outcome totals alone. Only requires
    /// `undetected <= total_gold`, so totals from a many-to-one matching
    /// are accepted too.
    pub fn from_counts(
        fully_correct: u64,
        partially_correct: u64,
        unrelated: u64,
        undetected: u64,
        total_gold: u64,
    ) -> Result<Self, EvalError> {
        if undetected > total_gold {
            return Err(EvalError::Counts(format!(
                "undetected {undetected} exceeds total gold {total_gold}"
            )));
        }
        Ok(Self {
            fully_correct,
            partially_correct,
            unrelated,
            undetected,
            detected_gold: total_gold - undetected,
            total_gold,
            field_agreement: BTreeMap::new(),
        })
    }

    pub fn predictions(&self) -> u64 {
        self.fully_correct + self.partially_correct + self.unrelated
    }

    /// `detected_gold / total_gold`, or 0 with no gold events.
    pub fn detection_rate(&self) -> f64 {
        if self.total_gold == 0 {
            0.0
        } else {
            self.detected_gold as f64 / self.total_gold as f64
        }
    }

    fn add(&mut self, predicted: &[TraffickingEvent], gold: &[GoldEvent], m: &ReportMatch) {
        for outcome in &m.predicted {
            match outcome {
                EvalOutcome::FullyCorrect => self.fully_correct += 1,
                EvalOutcome::PartiallyCorrect => self.partially_correct += 1,
                _ => self.unrelated += 1,
            }
        }
        self.total_gold += gold.len() as u64;
        let detected = m.gold.iter().filter(|g| g.is_some()).count() as u64;
        self.detected_gold += detected;
        self.undetected += gold.len() as u64 - detected;
        for &(pi, gi, _) in &m.pairs {
            for field in Field::ALL {
                if field.agree(&predicted[pi], &gold[gi]) {
                    *self.field_agreement.entry(field).or_default() += 1;
                }
            }
        }
    }

    /// The machine-readable `key: value` form, one pair per line.
    pub fn to_key_value(&self) -> String {
        let mut out = format!(
            "fully_correct: {}\npartially_correct: {}\nunrelated: {}\nundetected: {}\n\
             detected_gold: {}\ntotal_gold: {}\npredictions: {}\ndetection_rate: {:.6}\n",
            self.fully_correct,
            self.partially_correct,
            self.unrelated,
            self.undetected,
            self.detected_gold,
            self.total_gold,
            self.predictions(),
            self.detection_rate(),
        );
        for field in Field::ALL {
            let n = self.field_agreement.get(&field).copied().unwrap_or(0);
            out.push_str(&format!("agree_{}: {n}\n", field.as_str()));
        }
        out
    }
}

impl fmt::Display for EvalReport {
    /// `fully=.. partial=.. unrelated=.. undetected=.. total_gold=..`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fully={} partial={} unrelated={} undetected={} total_gold={}",
            self.fully_correct, self.partially_correct, self.unrelated, self.undetected, self.total_gold
        )
    }
}

/// Scores a whole corpus, matching within each report id.
pub fn evaluate(predicted: &[TraffickingEvent], gold: &[GoldEvent], eligibility: Eligibility) -> EvalReport {
    let mut groups: BTreeMap<&str, (Vec<TraffickingEvent>, Vec<GoldEvent>)> = BTreeMap::new();
    for p in predicted {
        groups.entry(&p.report_id).or_default().0.push(p.clone());
    }
    for g in gold {
        groups.entry(&g.report_id).or_default().1.push(g.clone());
    }
    let mut report = EvalReport::default();
    for (p, g) in groups.values() {
        let m = match_events(p, g, eligibility).expect("grouped by report id");
        report.add(p, g, &m);
    }
    report
}
