//! Pattern census over optimal pairs of type X spreads. Pass a row count to
//! limit the first spread; with no argument every type X spread is used,
//! which takes a few minutes on one core.

use pg42::doubling::{format_counts, x_spread_count, xx_census_rows};

fn main() {
    let rows = std::env::args().nth(1).map(|a| a.parse::<usize>().expect("row count"));
    let census = xx_census_rows(rows.or(Some(100)));
    println!("rows {} of {}", rows.unwrap_or(100), x_spread_count());
    println!("pairs {} planes {}", census.pairs, census.planes);
    for (k, n) in &census.histogram {
        println!("{} meets_a9={} holes={} count={n}", format_counts(k.counts), k.meets_a9, k.holes);
    }
    println!(
        "(3,2,2,1): {}  (3,3,3,1): {}  violations: {}",
        census.eliminated_count(),
        census.open_pattern_count(),
        census.violation_count
    );
}
