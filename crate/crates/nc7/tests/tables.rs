//! Exact reproduction of the displayed coefficient tables.

mod support;

#[test]
fn hauptmodul_tables_reproduce_exactly() {
    support::check_hauptmodul_tables();
}

#[test]
fn g2_tables_reproduce_exactly() {
    support::check_g2_tables();
}
