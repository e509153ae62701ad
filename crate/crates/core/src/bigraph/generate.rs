use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BipartiteGraph, Dart, Digraph, GenParams, Graph};
use crate::error::{Error, Result};

/// Largest part size accepted by operations indexed by subsets of Y.
pub const MAX_SUBSET_PART: usize = 20;

// Independent ChaCha streams per purpose. Each edge index consumes exactly one
// 64-bit word, so the draw for edge `k` sits at word position `2k` of its
// stream regardless of how many other edges were generated.
const EDGE_STREAM: u64 = 0x6564_6765;
const ORIENT_STREAM: u64 = 0x6f72_6965;

fn keyed_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[inline]
fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Samples `G(n1, n2, p)`: every pair `(x, y)` is an edge independently with
/// probability `p`. Edge index `x * n2 + (y - n1)` keys the draw.
pub fn gen_random_bipartite(params: &GenParams) -> Result<BipartiteGraph> {
    params.validate()?;
    let GenParams {
        n1, n2, p, seed, ..
    } = *params;
    let mut rng = keyed_stream(seed, EDGE_STREAM);
    let mut edges = Vec::new();
    for x in 0..n1 {
        for y in 0..n2 {
            if unit_interval(rng.next_u64()) < p {
                edges.push((x, n1 + y));
            }
        }
    }
    BipartiteGraph::new(n1, n2, edges)
}

/// Orients every edge by a fair coin keyed on `(seed, edge id)`. Arc `k` of
/// the result is the orientation of edge `k`.
pub fn orient_randomly(g: &Graph, seed: u64) -> Digraph {
    let mut rng = keyed_stream(seed, ORIENT_STREAM);
    let mut arcs = Vec::with_capacity(g.m());
    let mut darts = Vec::with_capacity(g.m());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let backward = rng.next_u64() >> 63 == 1;
        arcs.push(if backward { (v, u) } else { (u, v) });
        darts.push(Dart::new(e, backward));
    }
    Digraph::build(g.n(), arcs, Some(darts))
}

/// X-vertices grouped by exact neighbourhood. Neighbourhoods are bitmasks
/// over Y: bit `j` stands for vertex `n1 + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeClasses {
    n2: usize,
    classes: Vec<Vec<usize>>,
}

impl DegreeClasses {
    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Class of X-vertices whose neighbourhood is exactly `mask`.
    pub fn class(&self, mask: u32) -> &[usize] {
        &self.classes[mask as usize]
    }

    /// `(mask, members)` for every class, including empty ones.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &[usize])> {
        self.classes
            .iter()
            .enumerate()
            .map(|(m, c)| (m as u32, c.as_slice()))
    }

    pub fn total(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }
}

fn subset_guard(n2: usize) -> Result<()> {
    if n2 > MAX_SUBSET_PART {
        return Err(Error::ResourceGuard {
            what: format!("2^n2 subsets with n2 = {n2}"),
            limit: MAX_SUBSET_PART as u64,
        });
    }
    Ok(())
}

pub fn degree_class_partition(g: &BipartiteGraph) -> Result<DegreeClasses> {
    let n2 = g.n2();
    subset_guard(n2)?;
    let mut classes = vec![Vec::new(); 1 << n2];
    for x in g.x_vertices() {
        let mask = g
            .graph()
            .neighbors(x)
            .fold(0u32, |m, y| m | 1 << (y - g.n1()));
        classes[mask as usize].push(x);
    }
    Ok(DegreeClasses { n2, classes })
}

/// The deterministic graph in which, for every `Y' ⊆ Y` with `|Y'| = m`,
/// exactly `floor(p^m (1-p)^(n2-m) n1)` X-vertices have neighbourhood `Y'`.
/// Classes are laid out in ascending mask order; X-vertices left over by the
/// rounding are appended as isolated vertices and counted in
/// [`BipartiteGraph::padding`].
pub fn standard_graph(n1: usize, n2: usize, p: f64) -> Result<BipartiteGraph> {
    subset_guard(n2)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("p = {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    let mut next_x = 0usize;
    for mask in 0u32..(1 << n2) {
        let m = mask.count_ones() as i32;
        let expected = p.powi(m) * (1.0 - p).powi(n2 as i32 - m) * n1 as f64;
        // Products such as 0.25 * 8 can land a hair under the integer.
        let size = (expected + 1e-9).floor() as usize;
        for _ in 0..size {
            for j in 0..n2 {
                if mask >> j & 1 == 1 {
                    edges.push((next_x, n1 + j));
                }
            }
            next_x += 1;
        }
    }
    if next_x > n1 {
        return Err(Error::Internal(format!(
            "standard graph class sizes sum to {next_x} > n1 = {n1}"
        )));
    }
    Ok(BipartiteGraph::new(n1, n2, edges)?.with_padding(n1 - next_x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n1: usize, n2: usize, p: f64, seed: u64) -> GenParams {
        GenParams::new(n1, n2, p, seed, 1).unwrap()
    }

    #[test]
    fn degenerate_probabilities() {
        let full = gen_random_bipartite(&params(3, 3, 1.0, 17)).unwrap();
        assert_eq!(full.edge_count(), 9);
        let empty = gen_random_bipartite(&params(5, 5, 0.0, 17)).unwrap();
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn generation_is_reproducible() {
        let a = gen_random_bipartite(&params(30, 20, 0.3, 5)).unwrap();
        let b = gen_random_bipartite(&params(30, 20, 0.3, 5)).unwrap();
        let c = gen_random_bipartite(&params(30, 20, 0.3, 6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn orientation_covers_each_edge_once() {
        let g = BipartiteGraph::complete(2, 2);
        let d = orient_randomly(g.graph(), 3);
        assert_eq!(d.arc_count(), 4);
        for (k, &(u, v)) in d.arcs().iter().enumerate() {
            assert_eq!(g.graph().edge_between(u, v), Some(k));
            let dart = d.dart(k).unwrap();
            assert_eq!((g.graph().tail(dart), g.graph().head(dart)), (u, v));
        }
        let empty = orient_randomly(&Graph::empty(4), 3);
        assert_eq!(empty.arc_count(), 0);
    }

    #[test]
    fn standard_graph_small_cases() {
        let s = standard_graph(8, 2, 0.5).unwrap();
        let classes = degree_class_partition(&s).unwrap();
        for mask in 0..4 {
            assert_eq!(classes.class(mask).len(), 2);
        }
        // 0 + 2 + 2 + 2 * 2 edges.
        assert_eq!(s.edge_count(), 8);
        assert_eq!(s.padding(), 0);

        let none = standard_graph(10, 3, 0.0).unwrap();
        assert_eq!(none.edge_count(), 0);
        assert_eq!(degree_class_partition(&none).unwrap().class(0).len(), 10);

        let all = standard_graph(16, 2, 1.0).unwrap();
        assert_eq!(all.edge_count(), 32);
    }

    #[test]
    fn standard_graph_pads_with_isolated_vertices() {
        // 0.3^m 0.7^(2-m) * 10 = 4.9, 2.1, 2.1, 0.9 -> 4 + 2 + 2 + 0 = 8.
        let s = standard_graph(10, 2, 0.3).unwrap();
        assert_eq!(s.padding(), 2);
        assert_eq!(s.n1(), 10);
        assert_eq!(s.graph().degree(8), 0);
        assert_eq!(s.graph().degree(9), 0);
    }

    #[test]
    fn subset_guard_fires() {
        assert!(matches!(
            standard_graph(10, 21, 0.5),
            Err(Error::ResourceGuard { .. })
        ));
        let g = BipartiteGraph::new(21, 21, []).unwrap();
        assert!(degree_class_partition(&g).is_err());
    }

    #[test]
    fn degree_classes_simple() {
        let k33 = BipartiteGraph::complete(3, 3);
        let c = degree_class_partition(&k33).unwrap();
        assert_eq!(c.class(0b111), &[0, 1, 2]);
        assert_eq!(c.total(), 3);
        let empty = BipartiteGraph::new(4, 2, []).unwrap();
        assert_eq!(degree_class_partition(&empty).unwrap().class(0).len(), 4);
    }
}
