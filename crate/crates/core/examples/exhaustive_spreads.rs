//! Counts every size-9 spread of PG(4,2) by type, then samples a few with a
//! fixed seed.

use std::collections::BTreeMap;
use std::time::Instant;

use pg42::spread::{all_spreads, find_maximal_spreads, SearchMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let start = Instant::now();
    let all = all_spreads();
    let mut by_type = BTreeMap::new();
    for s in all {
        *by_type.entry(s.classify()?.kind()).or_insert(0u64) += 1;
    }
    println!("{} spreads in {:.1?}: {by_type:?}", all.len(), start.elapsed());
    for s in find_maximal_spreads(&SearchMode::Sample { count: 3, seed: 2024 })? {
        println!("{}  {}", s.classify()?.kind(), pg42::io::format_spread(&s));
    }
    Ok(())
}
