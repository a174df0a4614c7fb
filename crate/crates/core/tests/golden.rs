//! Generated traces compared byte for byte against checked-in files.

use healsim::profiles::{generate_synthetic, named_trace, FailureTrace, TraceLength};

#[test]
fn grid5000_short_seed_7() {
    let trace = named_trace("grid5000", TraceLength::Short, 7).unwrap();
    assert_eq!(trace.to_csv(), include_str!("data/grid5000_short_7.csv"));
}

#[test]
fn synthetic_ten_by_three() {
    let trace = generate_synthetic(10, 3, 60.0, 1).unwrap();
    assert_eq!(trace.to_csv(), include_str!("data/synthetic_10x3.csv"));
}

#[test]
fn golden_files_parse_back() {
    for text in [include_str!("data/grid5000_short_7.csv"), include_str!("data/synthetic_10x3.csv")] {
        let trace = FailureTrace::from_csv(text).unwrap();
        assert_eq!(trace.to_csv(), text);
        assert_eq!(trace.density(), trace.entries.len());
    }
}
