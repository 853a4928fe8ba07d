mod common;

use proptest::prelude::*;

use tusk::store::{import_csv, quantize_kg, summarize_events, write_csv};
use tusk::{EventStore, SummaryFilter};

fn exported(store: &EventStore) -> Vec<u8> {
    let mut buf = Vec::new();
    store.export_csv(&mut buf).unwrap();
    buf
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn export_import_is_identity((reports, events) in common::event_set()) {
        let mut store = EventStore::open_in_memory().unwrap();
        for meta in &reports {
            store.register_report(meta).unwrap();
        }
        store.ingest(&events).unwrap();
        let stored = store.events().unwrap();
        prop_assert_eq!(stored.len(), events.len());

        let bytes = exported(&store);
        let imported = import_csv(bytes.as_slice()).unwrap();
        prop_assert_eq!(imported.len(), stored.len());
        for (a, b) in stored.iter().zip(&imported) {
            prop_assert!(common::same_fields(a, b, 1e-9), "{:?} vs {:?}", a, b);
        }

        let mut again = Vec::new();
        write_csv(&imported, &mut again).unwrap();
        prop_assert_eq!(again, bytes);
    }

    #[test]
    fn stored_weights_are_quantized_originals((reports, events) in common::event_set()) {
        let mut store = EventStore::open_in_memory().unwrap();
        for meta in &reports {
            store.register_report(meta).unwrap();
        }
        store.ingest(&events).unwrap();
        let mut expected = events.clone();
        expected.sort_by(|a, b| (&a.report_id, a.sentence_index).cmp(&(&b.report_id, b.sentence_index)));
        for e in &mut expected {
            if let Some(w) = &mut e.weight {
                w.value_kg = quantize_kg(w.value_kg);
            }
        }
        let stored = store.events().unwrap();
        for (a, b) in expected.iter().zip(&stored) {
            prop_assert!(common::same_fields(a, b, 0.0));
        }
    }

    #[test]
    fn repeated_ingest_is_idempotent((reports, events) in common::event_set(), times in 2usize..4) {
        let mut store = EventStore::open_in_memory().unwrap();
        for meta in &reports {
            store.register_report(meta).unwrap();
        }
        store.ingest(&events).unwrap();
        let once = exported(&store);
        for _ in 1..times {
            store.ingest(&events).unwrap();
        }
        prop_assert_eq!(exported(&store), once);
    }

    #[test]
    fn sql_summary_matches_scan(
        (reports, events) in common::event_set(),
        year in prop::option::of(1990i32..2030),
        use_country in any::<bool>(),
    ) {
        let mut store = EventStore::open_in_memory().unwrap();
        for meta in &reports {
            store.register_report(meta).unwrap();
        }
        store.ingest(&events).unwrap();
        let country = if use_country { events.iter().find_map(|e| e.country.clone()) } else { None };
        let filter = SummaryFilter { country, year_from: year, year_to: year.map(|y| y + 5) };
        let stored = store.events().unwrap();
        prop_assert_eq!(store.summarize(&filter).unwrap(), summarize_events(&stored, &filter));
    }
}
