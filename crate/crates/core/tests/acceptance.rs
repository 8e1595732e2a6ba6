//! Runs every acceptance criterion and prints one line per criterion.

use weylbox::acceptance::{format_line, run_suite, Suite, COUNT};

#[test]
fn all_criteria() {
    let outcomes = run_suite(Suite::Full);
    assert_eq!(outcomes.len() as u32, COUNT);
    for o in &outcomes {
        println!("{}", format_line(o));
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
