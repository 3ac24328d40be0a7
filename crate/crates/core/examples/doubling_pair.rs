//! Validates a spread pair as a doubling code and prints the pattern of
//! every dual plane against the first spread's reguli.

use pg42::doubling::{intersection_pattern, validate_doubling, DoublingCode, Verdict};
use pg42::reference::REFERENCE_PAIRS;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (s1, s2) = REFERENCE_PAIRS[0].spreads()?;
    let code = DoublingCode::new(s1.clone(), s2.clone())?;
    println!("size {} minimum distance {}", code.size(), code.min_distance());
    for (j, b) in code.planes.iter().enumerate() {
        println!("B{} {}", j + 1, intersection_pattern(b, &s1)?);
    }
    // a spread paired with itself is rejected with a containment witness
    match validate_doubling(&s1, &s1) {
        Verdict::Invalid { line, plane } => println!("S1 with itself: line a{} lies in B{}", line + 1, plane + 1),
        Verdict::Optimal => println!("S1 with itself is optimal"),
    }
    Ok(())
}
