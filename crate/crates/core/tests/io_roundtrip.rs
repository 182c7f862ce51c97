use pointdata::io::{
    parse_metadata, parse_metadata_document, parse_point_table, parse_pooled_table, write_metadata,
    write_metadata_full, write_point_table, write_pooled_table, FormatDialect, FormatError,
};
use pointdata::model::{Column, Decimal, LocCondition, PointFields, PointRecord};
use pointdata::reference::{self, nyu_campaign, usc_campaign};
use pointdata::validation::{pool, CompatPolicy};
use proptest::prelude::*;

fn dialects() -> [FormatDialect; 2] {
    [FormatDialect::csv(), FormatDialect::json()]
}

#[test]
fn fixture_points_round_trip_exactly() {
    for (text, n) in [
        (reference::NYU_POINTS_CSV, 6),
        (reference::USC_POINTS_CSV, 6),
    ] {
        let parsed = parse_point_table(text.as_bytes(), &FormatDialect::csv()).unwrap();
        assert_eq!(parsed.len(), n);
        let written = write_point_table(&parsed, &FormatDialect::csv());
        assert_eq!(String::from_utf8(written.clone()).unwrap(), text);
        assert_eq!(
            parse_point_table(&written, &FormatDialect::csv()).unwrap(),
            parsed
        );

        for dialect in dialects() {
            let out = write_point_table(&parsed, &dialect);
            let again = parse_point_table(&out, &dialect).unwrap();
            assert_eq!(again, parsed);
            assert_eq!(write_point_table(&again, &dialect), out);
        }
    }
}

#[test]
fn fixture_metadata_round_trips_exactly() {
    for text in [reference::NYU_META_CSV, reference::USC_META_CSV] {
        let csv = FormatDialect::csv();
        let meta = parse_metadata(text.as_bytes(), &csv).unwrap();
        for dialect in dialects() {
            for bytes in [
                write_metadata(&meta, &dialect),
                write_metadata_full(&meta, &dialect),
            ] {
                let back = parse_metadata(&bytes, &dialect).unwrap();
                assert_eq!(back, meta);
                assert_eq!(
                    write_metadata(&back, &dialect),
                    write_metadata(&meta, &dialect)
                );
            }
        }
    }
}

#[test]
fn published_row_labels_parse_to_canonical_metadata() {
    let csv = FormatDialect::csv();
    for (table, canonical) in [
        (reference::NYU_TABLE_META_CSV, reference::NYU_META_CSV),
        (reference::USC_TABLE_META_CSV, reference::USC_META_CSV),
    ] {
        let from_labels = parse_metadata_document(table.as_bytes(), &csv).unwrap();
        let from_keys = parse_metadata_document(canonical.as_bytes(), &csv).unwrap();
        assert_eq!(from_labels.metadata, from_keys.metadata);
        assert_eq!(from_labels.campaign_id, None);
    }
}

#[test]
fn pooled_table_round_trip_keeps_provenance() {
    let pooled = pool(
        vec![nyu_campaign(), usc_campaign()],
        &CompatPolicy::default(),
        false,
    )
    .unwrap();
    for dialect in dialects() {
        let bytes = write_pooled_table(&pooled, &dialect);
        let rows = parse_pooled_table(&bytes, &dialect).unwrap();
        assert_eq!(rows.len(), 12);
        let ids: Vec<&str> = rows.iter().map(|(_, id)| id.as_str()).collect();
        assert_eq!(ids.iter().filter(|id| **id == "nyu-umi-142").count(), 6);
        assert_eq!(ids.iter().filter(|id| **id == "usc-umi-145").count(), 6);
        let points: Vec<PointRecord> = rows.into_iter().map(|(p, _)| p).collect();
        assert_eq!(points, reference::fixture_points());
    }
}

#[test]
fn header_errors_name_the_column() {
    let text = reference::NYU_POINTS_CSV.replacen("pl_db", "pathloss", 1);
    match parse_point_table(text.as_bytes(), &FormatDialect::csv()) {
        Err(FormatError::HeaderMismatch { .. }) => {}
        other => panic!("expected HeaderMismatch, got {other:?}"),
    }
    let err = parse_point_table(text.as_bytes(), &FormatDialect::csv()).unwrap_err();
    assert!(
        err.to_string().contains("pathloss") || err.to_string().contains("pl_db"),
        "{err}"
    );
}

fn decimal(max_int: i64, places: u32) -> impl Strategy<Value = Decimal> {
    (0..max_int, 0..10i64.pow(places))
        .prop_map(move |(i, f)| Decimal::new(i * 10i64.pow(places) + f, places).normalize())
}

fn positive(max_int: i64, places: u32) -> impl Strategy<Value = Decimal> {
    decimal(max_int, places).prop_map(|d| if d.is_zero() { Decimal::ONE } else { d })
}

fn point() -> impl Strategy<Value = PointRecord> {
    (
        positive(300, 3),
        "[A-Z]{1,3}[0-9]{1,3}",
        "[A-Z]{1,3}[0-9]{1,3}",
        prop::bool::ANY,
        positive(500, 2),
        positive(200, 1),
        prop::collection::vec(decimal(90, 4), 10),
    )
        .prop_map(|(f, tx, rx, los, d, pl, stats)| {
            let loc = if los {
                LocCondition::Los
            } else {
                LocCondition::Nlos
            };
            let mut fields = PointFields::zeroed(f, tx, rx, loc, d, pl);
            for (column, value) in Column::numeric().skip(3).zip(stats) {
                fields.set(column, value);
            }
            PointRecord::new(fields).unwrap()
        })
}

proptest! {
    #[test]
    fn points_round_trip_in_both_dialects(points in prop::collection::vec(point(), 0..12)) {
        for dialect in dialects() {
            let bytes = write_point_table(&points, &dialect);
            let back = parse_point_table(&bytes, &dialect).unwrap();
            prop_assert_eq!(&back, &points);
            prop_assert_eq!(write_point_table(&back, &dialect), bytes);
        }
    }

    #[test]
    fn missing_token_choice_does_not_change_values(token in "[A-Za-z?]{1,4}") {
        let meta = reference::usc_campaign().metadata().clone();
        let dialect = FormatDialect::csv().with_missing_token(&token).unwrap();
        let back = parse_metadata(&write_metadata_full(&meta, &dialect), &dialect).unwrap();
        prop_assert_eq!(back, meta);
    }
}
