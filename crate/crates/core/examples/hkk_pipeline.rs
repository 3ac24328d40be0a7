//! Shortens the lifted Gabidulin code at the first valid configuration and
//! checks the resulting doubling code.

use pg42::constructions::{build_lifted_gabidulin, hkk_build, hkk_pattern_check, HkkSearch};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = build_lifted_gabidulin();
    println!(
        "lifted Gabidulin code: {} planes, minimum distance {}",
        g.codewords.len(),
        g.min_distance()
    );
    let (outs, stats) = hkk_build(&HkkSearch::First)?;
    let o = &outs[0];
    println!("config {}", serde_json::to_string(&o.config.record())?);
    let r = hkk_pattern_check(&o.code, &o.config)?;
    println!("types {}/{} a9 common line: {}", r.s1_type, r.s2_type, r.a9_is_common_line);
    println!("B9 {}", r.b9.map(|b| b.to_string()).unwrap_or_default());
    for (j, p) in r.others.iter().enumerate() {
        println!("B{} {p}", j + 1);
    }
    println!("regulus free: {}  passed: {}  stats {stats:?}", r.regulus_free, r.passed());
    Ok(())
}
