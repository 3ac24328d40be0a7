//! Builds the order-6 collineation group, its good orbits and the codes of
//! every variant, and reports the spread types found.

use pg42::constructions::{cps_build, cps_group, cps_orbits, cps_report, CpsVariant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = cps_group()?;
    for m in &g {
        println!("{m}");
    }
    let o = cps_orbits();
    println!(
        "good line orbits {:?} good plane orbits {:?}",
        o.good_line_orbits, o.good_plane_orbits
    );
    for v in CpsVariant::ALL {
        for out in cps_build(v)?.iter().take(2) {
            let r = cps_report(out)?;
            println!(
                "{v}: types {}/{} dual regulus {} record {}",
                r.s1_type,
                r.s2_type,
                r.dual_regulus,
                serde_json::to_string(&out.config.record())?
            );
        }
    }
    Ok(())
}
