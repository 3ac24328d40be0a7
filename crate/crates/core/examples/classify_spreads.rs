//! Parses spreads in compact notation and prints type, holes and reguli.

use pg42::io::parse_spreads;
use pg42::spread::SpreadType;

const INPUT: &str = "
# type X, common line in position 9
{1,25,125},{15,24,3u},{14,23,5u},{145,234,4u},{12,345,u},{124,34,123},{2,35,235},{245,3,1u},{135,4,2u}
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let file = parse_spreads(INPUT)?;
    for s in &file.spreads {
        let holes: Vec<String> = s.holes().points().iter().map(|p| p.to_compact()).collect();
        let reguli: Vec<String> = s.reguli()?.iter().map(|r| r.name()).collect();
        match s.classify()? {
            SpreadType::X { common_line } => println!("type X, common line {}", s.line(common_line)),
            other => println!("type {}", other.kind()),
        }
        println!("holes {}  reguli {}", holes.join(" "), reguli.join(" "));
        // swapping any regulus for its opposite gives another spread
        let r = &s.reguli()?[0];
        let swapped = s.swap_regulus(r.positions)?;
        println!("after swapping {}: type {}", r.name(), swapped.classify()?.kind());
    }
    Ok(())
}
