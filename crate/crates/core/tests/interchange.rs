mod common;

use common::{fixture, grid, grid_entries};
use macc_core::construct::{cyclic, general, lift};
use macc_core::format::{self, Document};
use macc_core::verify::{check_delivery_array, metrics};
use macc_core::{Condition, DeliveryArray, Entry, Error, NetworkParams};
use proptest::prelude::*;

fn seven_user_pair() -> DeliveryArray {
    let Document::Caching(c) = format::deserialize(&fixture("cyclic_7_2_2_3_caching.txt")).unwrap() else {
        panic!("fixture is not a caching document");
    };
    DeliveryArray::new(c.into(), 3, 3, grid_entries(&grid("cyclic_7_2_2_3_delivery.grid"))).unwrap()
}

#[test]
fn documents_round_trip_byte_for_byte() {
    let params = NetworkParams::new(9, 2, 2, 2).unwrap();
    let c = general::build_caching_array_i(&params).unwrap();
    let d = general::build_delivery_array_i(&c, &params).unwrap();
    let epda = lift::load_epda(&fixture("epda_5_2_20_8_15.txt")).unwrap();
    let docs = [Document::Caching(c), Document::Delivery(d), Document::Epda(epda), Document::Delivery(seven_user_pair())];
    for doc in docs {
        let text = format::serialize(&doc);
        let back = format::deserialize(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(format::serialize(&back), text);
    }
}

#[test]
fn duplicated_integer_in_a_row_is_reported_as_d2() {
    let d = seven_user_pair();
    let text = format::serialize_delivery(&d);
    // Row 1 reads `* 2 * * 3 1 *`; a 2 in its first cell repeats that integer.
    let tampered = d.with_entry(1, 1, Entry::Int(2));
    let doc = format::serialize_delivery(&tampered);
    assert_ne!(doc, text);
    match format::deserialize(&doc) {
        Err(Error::Violations(v)) => assert!(v.iter().any(|v| v.condition == Condition::D2), "{v:?}"),
        other => panic!("expected violations, got {other:?}"),
    }
    let lenient = format::parse_lenient(&doc).unwrap();
    assert!(matches!(lenient, Document::Delivery(_)));
}

#[test]
fn edited_caching_section_breaks_the_digest() {
    let text = format::serialize_delivery(&seven_user_pair());
    // Move one star in the caching section but keep the old digest line.
    let edited = text.replacen("* . . * . . .", "* . . . * . .", 1);
    assert_ne!(edited, text);
    let err = format::parse_lenient(&edited).unwrap_err();
    assert!(err.to_string().contains("caching-sha256 mismatch"), "{err}");
}

#[test]
fn metrics_serialize_to_json() {
    let params = NetworkParams::new(7, 2, 2, 3).unwrap();
    let d = cyclic::build_delivery_array_case_a(&params).unwrap();
    let m = metrics(d.caching(), &d, &params).unwrap();
    let json = serde_json::to_value(&m).unwrap();
    assert_eq!(json["ndt"], "3/7");
    assert_eq!(json["optimal"], true);
}

proptest! {
    #[test]
    fn any_single_cell_change_is_caught(row in 1usize..=7, col in 1usize..=7, value in 0u32..=3) {
        let d = seven_user_pair();
        let entry = if value == 0 { Entry::Star } else { Entry::Int(value) };
        prop_assume!(d.get(row, col) != entry);
        let mutated = d.with_entry(row, col, entry);
        let violations = check_delivery_array(d.caching(), &mutated, 3).unwrap();
        prop_assert!(!violations.is_empty());
    }
}
