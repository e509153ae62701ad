//! Graph and digraph data model.
//!
//! Vertices are plain indices. A bipartite graph on `n1 + n2` vertices uses
//! labels `0..n1` for the part X and `n1..n1 + n2` for the part Y, and every
//! module relies on that convention.
//!
//! Each undirected edge `e = {u, v}` with `u < v` owns two darts: `2e` runs
//! `u -> v` and `2e + 1` runs `v -> u`. Darts are the "arcs" that face
//! tracing and the trail machinery operate on.

mod generate;
mod io;

use std::fmt;

pub use generate::{
    degree_class_partition, gen_random_bipartite, orient_randomly, standard_graph, DegreeClasses,
    MAX_SUBSET_PART,
};
pub use io::{read_bipartite, read_digraph, write_bipartite, write_digraph};

use crate::error::{Error, Result};

/// One side of an undirected edge, i.e. the edge traversed in one direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart(pub usize);

impl Dart {
    pub fn new(edge: usize, backward: bool) -> Self {
        Dart(2 * edge + usize::from(backward))
    }

    #[inline]
    pub fn edge(self) -> usize {
        self.0 >> 1
    }

    #[inline]
    pub fn is_backward(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn reversed(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

/// Simple undirected graph with edges stored in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// Darts leaving each vertex, ascending by dart id.
    out: Vec<Vec<Dart>>,
}

/// Connected components of a graph.
#[derive(Clone, Debug)]
pub struct Components {
    /// Component id per vertex.
    pub of_vertex: Vec<usize>,
    /// Vertex count per component.
    pub vertices: Vec<usize>,
    /// Edge count per component.
    pub edges: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.vertices.len()
    }

    /// A component is a tree when it has exactly one edge fewer than vertices.
    pub fn is_tree(&self, c: usize) -> bool {
        self.edges[c] + 1 == self.vertices[c]
    }
}

impl Graph {
    /// Builds a simple graph. Edge endpoints are normalised to `u < v` and the
    /// edge list is sorted, so edge ids are canonical for a given edge set.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Validation(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("loop at vertex {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted(n, list))
    }

    fn from_sorted(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut out = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            out[u].push(Dart::new(e, false));
            out[v].push(Dart::new(e, true));
        }
        Graph { n, edges, out }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_sorted(n, edges)
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`; requires `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("cycle needs n >= 3, got {n}")));
        }
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    #[inline]
    pub fn tail(&self, d: Dart) -> usize {
        let (u, v) = self.edges[d.edge()];
        if d.is_backward() {
            v
        } else {
            u
        }
    }

    #[inline]
    pub fn head(&self, d: Dart) -> usize {
        self.tail(d.reversed())
    }

    pub fn dart_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..self.dart_count()).map(Dart)
    }

    /// Darts leaving `v`, ascending.
    pub fn darts_from(&self, v: usize) -> &[Dart] {
        &self.out[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].iter().map(move |&d| self.head(d))
    }

    /// Edge id joining `u` and `v`, if any.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Dart running `u -> v`, if the edge exists.
    pub fn dart_between(&self, u: usize, v: usize) -> Option<Dart> {
        self.edge_between(u, v).map(|e| Dart::new(e, u > v))
    }

    pub fn components(&self) -> Components {
        let mut of_vertex = vec![usize::MAX; self.n];
        let mut vertices = Vec::new();
        let mut stack = Vec::new();
        for s in 0..self.n {
            if of_vertex[s] != usize::MAX {
                continue;
            }
            let c = vertices.len();
            let mut size = 0;
            of_vertex[s] = c;
            stack.push(s);
            while let Some(v) = stack.pop() {
                size += 1;
                for w in self.neighbors(v) {
                    if of_vertex[w] == usize::MAX {
                        of_vertex[w] = c;
                        stack.push(w);
                    }
                }
            }
            vertices.push(size);
        }
        let mut edges = vec![0; vertices.len()];
        for &(u, _) in &self.edges {
            edges[of_vertex[u]] += 1;
        }
        Components {
            of_vertex,
            vertices,
            edges,
        }
    }

    /// Copy of the graph with edge `e` deleted (remaining edge ids shift down).
    pub fn without_edge(&self, e: usize) -> Self {
        let mut edges = self.edges.clone();
        edges.remove(e);
        Self::from_sorted(self.n, edges)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Self {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        Self::from_sorted(self.n + other.n, edges)
    }
}

/// Bipartite graph on `X = 0..n1` and `Y = n1..n1 + n2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    n1: usize,
    n2: usize,
    graph: Graph,
    /// Trailing X-vertices added only to pad the part to `n1` (standard graphs).
    padding: usize,
}

impl BipartiteGraph {
    /// `edges` are `(x, y)` pairs in global labels; each must join X to Y.
    pub fn new(
        n1: usize,
        n2: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let n = n1 + n2;
        let mut list = Vec::new();
        for (a, b) in edges {
            let (x, y) = (a.min(b), a.max(b));
            if x >= n1 || y < n1 || y >= n {
                return Err(Error::Validation(format!(
                    "edge ({a}, {b}) does not join X = 0..{n1} to Y = {n1}..{n}"
                )));
            }
            list.push((x, y));
        }
        Ok(BipartiteGraph {
            n1,
            n2,
            graph: Graph::new(n, list)?,
            padding: 0,
        })
    }

    pub fn complete(n1: usize, n2: usize) -> Self {
        let edges: Vec<_> = (0..n1)
            .flat_map(|x| (n1..n1 + n2).map(move |y| (x, y)))
            .collect();
        BipartiteGraph {
            n1,
            n2,
            graph: Graph::from_sorted(n1 + n2, edges),
            padding: 0,
        }
    }

    pub(crate) fn with_padding(mut self, padding: usize) -> Self {
        self.padding = padding;
        self
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn edge_count(&self) -> usize {
        self.graph.m()
    }

    /// Number of trailing isolated X-vertices that only pad `|X|` up to `n1`.
    pub fn padding(&self) -> usize {
        self.padding
    }

    pub fn x_vertices(&self) -> std::ops::Range<usize> {
        0..self.n1
    }

    pub fn y_vertices(&self) -> std::ops::Range<usize> {
        self.n1..self.n1 + self.n2
    }

    pub fn is_x(&self, v: usize) -> bool {
        v < self.n1
    }
}

/// Directed graph. When produced by [`orient_randomly`], arc `k` is the
/// orientation of edge `k` of the source graph and `dart(k)` names it.
#[derive(Clone, Debug)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
    /// `(head, arc)` per tail, ascending by head.
    out: Vec<Vec<(usize, usize)>>,
    /// `(tail, arc)` per head, ascending by tail.
    inc: Vec<Vec<(usize, usize)>>,
    darts: Option<Vec<Dart>>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.arcs == other.arcs
    }
}

impl Eq for Digraph {}

impl Digraph {
    pub fn new(n: usize, arcs: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &arcs {
            if u >= n || v >= n {
                return Err(Error::Validation(format!(
                    "arc ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("loop at vertex {u}")));
            }
        }
        let mut sorted = arcs.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!(
                "duplicate arc ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::build(n, arcs, None))
    }

    pub(crate) fn build(n: usize, arcs: Vec<(usize, usize)>, darts: Option<Vec<Dart>>) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (k, &(u, v)) in arcs.iter().enumerate() {
            out[u].push((v, k));
            inc[v].push((u, k));
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_unstable();
        }
        Digraph {
            n,
            arcs,
            out,
            inc,
            darts,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn arc(&self, k: usize) -> (usize, usize) {
        self.arcs[k]
    }

    /// `(head, arc id)` pairs leaving `v`.
    pub fn out_arcs(&self, v: usize) -> &[(usize, usize)] {
        &self.out[v]
    }

    /// `(tail, arc id)` pairs entering `v`.
    pub fn in_arcs(&self, v: usize) -> &[(usize, usize)] {
        &self.inc[v]
    }

    pub fn arc_between(&self, u: usize, v: usize) -> Option<usize> {
        let list = &self.out[u];
        list.binary_search_by_key(&v, |&(h, _)| h)
            .ok()
            .map(|i| list[i].1)
    }

    /// Dart of the source graph represented by arc `k` (orientations only).
    pub fn dart(&self, k: usize) -> Option<Dart> {
        self.darts.as_ref().map(|d| d[k])
    }

    pub fn is_orientation(&self) -> bool {
        self.darts.is_some()
    }

    /// `D^{-1}`: every arc reversed, arc ids preserved.
    pub fn reverse(&self) -> Digraph {
        let arcs = self.arcs.iter().map(|&(u, v)| (v, u)).collect();
        let darts = self
            .darts
            .as_ref()
            .map(|d| d.iter().map(|x| x.reversed()).collect());
        Digraph::build(self.n, arcs, darts)
    }
}

/// Parameters of `G(n1, n2, p)` plus the trail half-length `i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub n1: usize,
    pub n2: usize,
    pub p: f64,
    pub seed: u64,
    pub i: usize,
}

impl GenParams {
    pub fn new(n1: usize, n2: usize, p: f64, seed: u64, i: usize) -> Result<Self> {
        let params = GenParams { n1, n2, p, seed, i };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n2 < 1 || self.n1 < self.n2 {
            return Err(Error::InvalidParams(format!(
                "need n1 >= n2 >= 1, got n1 = {}, n2 = {}",
                self.n1, self.n2
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParams(format!(
                "p = {} outside [0, 1]",
                self.p
            )));
        }
        if self.i < 1 {
            return Err(Error::InvalidParams("i must be >= 1".into()));
        }
        Ok(())
    }
}
