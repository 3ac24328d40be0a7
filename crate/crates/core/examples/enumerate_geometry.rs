//! Subspace counts of PG(4,2) and a few lines with their orthogonal planes.

use pg42::gf2geom::pg42;

fn main() {
    let t = pg42();
    println!(
        "points {} lines {} planes {} solids {}",
        t.points.len(),
        t.lines.len(),
        t.planes.len(),
        t.solids.len()
    );
    for (id, line) in t.lines.iter().enumerate().take(5) {
        let perp = line.dual();
        println!("line {id:3} {line:<14} basis {:?}  dual plane {}", line.basis_strings(), perp);
    }
    let g = pg42::spread::disjointness_graph();
    println!(
        "disjointness graph: {} vertices, {} edges, degree {}",
        g.node_count(),
        g.edge_count(),
        g.degree(0)
    );
}
