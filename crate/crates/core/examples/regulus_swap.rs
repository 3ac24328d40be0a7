//! Swaps each regulus of a type X spread for its opposite and shows how the
//! type changes.

use pg42::reference::REFERENCE_PAIRS;
use pg42::spread::opposite_regulus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (s1, _) = REFERENCE_PAIRS[0].spreads()?;
    for r in s1.reguli()? {
        let opp = opposite_regulus(&r.regulus);
        let swapped = s1.swap_regulus(r.positions)?;
        let lines: Vec<String> = opp.lines().iter().map(|l| l.to_compact()).collect();
        println!("{} -> {}  new type {}", r.name(), lines.join(" "), swapped.classify()?.kind());
    }
    Ok(())
}
