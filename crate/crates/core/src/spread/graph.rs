use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::gf2geom::pg42;

use super::{LineSet, Spread, SpreadError, SPREAD_SIZE};

/// Lines of PG(4,2) as nodes, with an edge whenever two lines are disjoint.
/// Node numbers are the canonical line IDs.
#[derive(Debug)]
pub struct DisjointnessGraph {
    adj: Vec<LineSet>,
}

impl DisjointnessGraph {
    fn build() -> Self {
        let lines = &pg42().lines;
        let adj = lines
            .iter()
            .map(|a| lines.iter().enumerate().filter(|(_, b)| a.is_disjoint(b)).map(|(j, _)| j).collect())
            .collect();
        Self { adj }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbors(&self, a: usize) -> LineSet {
        self.adj[a]
    }

    pub fn degree(&self, a: usize) -> u32 {
        self.adj[a].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.len() as usize).sum::<usize>() / 2
    }
}

pub fn disjointness_graph() -> &'static DisjointnessGraph {
    static GRAPH: OnceLock<DisjointnessGraph> = OnceLock::new();
    GRAPH.get_or_init(DisjointnessGraph::build)
}

/// How `find_maximal_spreads` walks the search tree.
#[derive(Clone, Debug)]
pub enum SearchMode {
    /// Every size-9 spread exactly once, branching on lines in ID order.
    Exhaustive,
    /// Every size-9 spread exactly once, branching on the seed's lines first,
    /// so the seed itself is the first spread emitted.
    Seeded(Spread),
    /// `count` distinct spreads, each the first hit of a search over a fresh
    /// random line order.
    Sample { count: usize, seed: u64 },
}

/// Clique search on a relabelled copy of the graph: position `i` stands for
/// line `order[i]`, and candidate sets only ever hold later positions, so
/// each 9-clique is found once.
struct Walker {
    adj: Vec<LineSet>,
    order: Vec<u8>,
}

impl Walker {
    fn new(order: Vec<u8>) -> Self {
        let g = disjointness_graph();
        let adj = order
            .iter()
            .map(|&a| {
                (0..order.len())
                    .filter(|&j| g.has_edge(usize::from(a), usize::from(order[j])))
                    .collect()
            })
            .collect();
        Self { adj, order }
    }

    fn later_neighbors(&self, v: usize) -> LineSet {
        let mut s = self.adj[v];
        for i in 0..=v {
            s.remove(i);
        }
        s
    }

    fn walk<F>(&self, clique: &mut [u8; SPREAD_SIZE], depth: usize, mut cand: LineSet, emit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&Spread) -> ControlFlow<()>,
    {
        if depth == SPREAD_SIZE {
            return emit(&Spread::from_ids(*clique));
        }
        let need = (SPREAD_SIZE - depth) as u32;
        while let Some(v) = cand.pop_first() {
            if cand.len() + 1 < need {
                break;
            }
            clique[depth] = self.order[v];
            self.walk(clique, depth + 1, cand & self.adj[v], emit)?;
        }
        ControlFlow::Continue(())
    }

    fn walk_root<F>(&self, root: usize, emit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&Spread) -> ControlFlow<()>,
    {
        let mut clique = [0u8; SPREAD_SIZE];
        clique[0] = self.order[root];
        self.walk(&mut clique, 1, self.later_neighbors(root), emit)
    }

    fn walk_all<F>(&self, emit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&Spread) -> ControlFlow<()>,
    {
        for root in 0..self.order.len() {
            self.walk_root(root, emit)?;
        }
        ControlFlow::Continue(())
    }
}

fn identity_order() -> Vec<u8> {
    (0..pg42().lines.len() as u8).collect()
}

/// Streams spreads to `emit` until it breaks or the search is exhausted.
pub fn for_each_spread<F>(mode: &SearchMode, mut emit: F) -> Result<(), SpreadError>
where
    F: FnMut(&Spread) -> ControlFlow<()>,
{
    match mode {
        SearchMode::Exhaustive => {
            let _ = Walker::new(identity_order()).walk_all(&mut emit);
        }
        SearchMode::Seeded(seed) => {
            // any 9 pairwise disjoint lines are maximal
            let lines: Vec<_> = seed.lines().copied().collect();
            Spread::new(&lines)?;
            let mut order: Vec<u8> = seed.line_ids().to_vec();
            order.extend(identity_order().into_iter().filter(|i| !seed.line_ids().contains(i)));
            let _ = Walker::new(order).walk_all(&mut emit);
        }
        SearchMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut seen = HashSet::new();
            let mut attempts = 0usize;
            while seen.len() < *count && attempts < count.saturating_mul(64).max(64) {
                attempts += 1;
                let mut order = identity_order();
                order.shuffle(&mut rng);
                let walker = Walker::new(order);
                let mut first = None;
                let _ = walker.walk_all(&mut |s: &Spread| {
                    first = Some(s.clone());
                    ControlFlow::Break(())
                });
                if let Some(s) = first {
                    if seen.insert(s.id()) && emit(&s).is_break() {
                        break;
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn find_maximal_spreads(mode: &SearchMode) -> Result<Vec<Spread>, SpreadError> {
    if let SearchMode::Exhaustive = mode {
        return Ok(all_spreads().to_vec());
    }
    let mut out = Vec::new();
    for_each_spread(mode, |s| {
        out.push(s.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

fn exhaustive_parallel() -> Vec<Spread> {
    let walker = Walker::new(identity_order());
    let per_root: Vec<Vec<Spread>> = (0..walker.order.len())
        .into_par_iter()
        .map(|root| {
            let mut found = Vec::new();
            let _ = walker.walk_root(root, &mut |s: &Spread| {
                found.push(s.clone());
                ControlFlow::Continue(())
            });
            found
        })
        .collect();
    per_root.into_iter().flatten().collect()
}

/// Every size-9 spread of PG(4,2) in exhaustive search order, computed once
/// with the root branching split across threads.
pub fn all_spreads() -> &'static [Spread] {
    static ALL: OnceLock<Vec<Spread>> = OnceLock::new();
    ALL.get_or_init(exhaustive_parallel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spread::tests::reference_s1;

    #[test]
    fn graph_shape() {
        let g = disjointness_graph();
        assert_eq!(g.node_count(), 155);
        for a in 0..155 {
            assert!(!g.has_edge(a, a));
            // brute-force count of lines disjoint from line a
            let lines = &pg42().lines;
            let brute = lines.iter().filter(|b| b.point_mask() & lines[a].point_mask() == 0).count();
            assert_eq!(g.degree(a) as usize, brute);
            // 155 lines minus the 3 * 14 + 1 lines meeting a fixed line
            assert_eq!(brute, 112);
        }
        assert_eq!(g.edge_count(), 155 * 112 / 2);
    }

    #[test]
    fn seeded_search_emits_seed_first() {
        let seed = reference_s1();
        let mut first = None;
        for_each_spread(&SearchMode::Seeded(seed.clone()), |s| {
            first = Some(s.clone());
            ControlFlow::Break(())
        })
        .unwrap();
        let first = first.unwrap();
        assert_eq!(first, seed);
        assert_eq!(first.line_ids(), seed.line_ids());
    }

    #[test]
    fn sampling_is_deterministic_and_distinct() {
        let a = find_maximal_spreads(&SearchMode::Sample { count: 5, seed: 7 }).unwrap();
        let b = find_maximal_spreads(&SearchMode::Sample { count: 5, seed: 7 }).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(
            a.iter().map(|s| s.line_ids()).collect::<Vec<_>>(),
            b.iter().map(|s| s.line_ids()).collect::<Vec<_>>()
        );
        let ids: HashSet<_> = a.iter().map(|s| s.id()).collect();
        assert_eq!(ids.len(), 5);
        for s in &a {
            assert_eq!(s.holes().len(), 4);
        }
    }
}
