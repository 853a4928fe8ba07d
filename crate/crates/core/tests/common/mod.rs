#![allow(dead_code)]

use proptest::prelude::*;

use tusk::store::ReportMeta;
use tusk::{ArrestCount, Quantity, TraffickingEvent, Weight};

fn text() -> impl Strategy<Value = Option<String>> {
    prop::option::of(prop_oneof![
        Just("elephant".to_string()),
        Just("grey parrot".to_string()),
        Just("côte d'ivoire".to_string()),
        Just("a, \"quoted\" value".to_string()),
        "[a-z][a-z ]{0,11}",
    ])
}

pub fn reports() -> impl Strategy<Value = Vec<ReportMeta>> {
    prop::collection::vec((1990i32..2030, 1u32..=12), 1..4).prop_map(|dates| {
        dates
            .into_iter()
            .enumerate()
            .map(|(i, (year, month))| ReportMeta {
                report_id: format!("r{i}-{year}-{month:02}"),
                year,
                month,
                source_path: None,
            })
            .collect()
    })
}

fn event(reports: Vec<ReportMeta>) -> impl Strategy<Value = TraffickingEvent> {
    (
        0..reports.len(),
        text(),
        text(),
        text(),
        prop::option::of(1u32..1_000_000),
        prop::option::of(1e-6f64..1e7),
        prop::option::of(0u32..1000),
        0usize..50,
    )
        .prop_map(
            move |(r, country, species, product, quantity, weight, arrests, sentence)| {
                let meta = &reports[r];
                let mut e = TraffickingEvent::new(meta.report_id.clone(), meta.year, meta.month);
                e.country = country;
                e.species = species;
                e.product = product;
                e.quantity = quantity.and_then(Quantity::new);
                e.weight = weight.map(Weight::from_kg);
                e.arrest_count = arrests.map(ArrestCount);
                if e.species.is_none() && e.product.is_none() && e.arrest_count.is_none() {
                    e.arrest_count = Some(ArrestCount(0));
                }
                e.sentence_index = sentence;
                e
            },
        )
}

/// Registered reports plus events referencing them.
pub fn event_set() -> impl Strategy<Value = (Vec<ReportMeta>, Vec<TraffickingEvent>)> {
    reports().prop_flat_map(|reports| {
        let events = prop::collection::vec(event(reports.clone()), 0..25);
        (Just(reports), events)
    })
}

/// Field-by-field comparison of the exported columns.
pub fn same_fields(a: &TraffickingEvent, b: &TraffickingEvent, tolerance: f64) -> bool {
    let weight = match (&a.weight, &b.weight) {
        (None, None) => true,
        (Some(x), Some(y)) => (x.value_kg - y.value_kg).abs() <= tolerance,
        _ => false,
    };
    a.report_id == b.report_id
        && a.year == b.year
        && a.month == b.month
        && a.country == b.country
        && a.species == b.species
        && a.product == b.product
        && a.quantity == b.quantity
        && a.arrest_count == b.arrest_count
        && weight
}
