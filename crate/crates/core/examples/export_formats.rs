//! Writes a spread file, JSON exports and a run manifest to a temporary
//! directory.

use pg42::doubling::DoublingCode;
use pg42::io::{code_json, format_spread_file, spread_json, write_atomic, RunManifest};
use pg42::reference::REFERENCE_PAIRS;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let (s1, s2) = REFERENCE_PAIRS[4].spreads()?;
    let text = format_spread_file([(&s1, Some("S1".to_string())), (&s2, Some("S2".to_string()))]);
    let json = serde_json::to_vec_pretty(&(spread_json(&s1)?, code_json(&DoublingCode::new(s1.clone(), s2.clone())?)))?;
    let mut manifest = RunManifest::new("export_formats", vec![], None);
    for (name, bytes) in [("pair.spreads", text.as_bytes()), ("pair.json", json.as_slice())] {
        write_atomic(&dir.path().join(name), bytes)?;
        manifest.record_output(name, bytes);
    }
    println!("{text}");
    println!("{}", serde_json::to_string_pretty(&manifest)?);
    Ok(())
}
