//! Independent reference implementations and generators shared by the
//! integration tests. Nothing here calls the library's own search code.

#![allow(dead_code)]

use std::collections::HashSet;

use bigenus::bigraph::orient_randomly;
use bigenus::blossom::{assemble_rotation, make_blossom_free};
use bigenus::trails::{
    build_trail_hypergraph, find_disjoint_mirror_matching, find_matching, Strategy,
};
use bigenus::{Dart, Graph, RotationSystem};
use rand::seq::SliceRandom;
use rand::Rng;

/// Uniform simple graph on `n` vertices with `m` edges (capped at C(n, 2)).
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, m: usize) -> Graph {
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(rng);
    pairs.truncate(m);
    Graph::new(n, pairs).unwrap()
}

/// Random labelled tree on `n >= 1` vertices (random recursive tree).
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Graph {
    Graph::new(n, (1..n).map(|v| (rng.gen_range(0..v), v))).unwrap()
}

/// Component id per vertex by union-find.
pub fn component_ids(g: &Graph) -> Vec<usize> {
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..g.n()).collect();
    for &(u, v) in g.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    (0..g.n()).map(|v| find(&mut parent, v)).collect()
}

/// Whether `trail` is an orbit of the face permutation of `rot`, checked
/// step by step without going through the face tracer.
pub fn is_face(rot: &RotationSystem, trail: &[Dart]) -> bool {
    (0..trail.len()).all(|j| rot.face_next(trail[j]) == trail[(j + 1) % trail.len()])
}

/// Number of closed trails of length `2j`, `2 <= j <= i`, counted as distinct
/// dart cycles up to rotation and reversal via an explicit canonical set.
pub fn brute_short_trails(g: &Graph, i: usize) -> u64 {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for len in (4..=2 * i).step_by(2) {
        for start in g.darts() {
            let mut path = vec![start];
            walk(g, len, &mut path, &mut seen);
        }
    }
    seen.len() as u64
}

fn walk(g: &Graph, len: usize, path: &mut Vec<Dart>, seen: &mut HashSet<Vec<usize>>) {
    let at = g.head(*path.last().unwrap());
    if path.len() == len {
        if at == g.tail(path[0]) {
            seen.insert(canonical_undirected(path));
        }
        return;
    }
    for &d in g.darts_from(at) {
        if path.iter().all(|p| p.edge() != d.edge()) {
            path.push(d);
            walk(g, len, path, seen);
            path.pop();
        }
    }
}

fn canonical_undirected(cycle: &[Dart]) -> Vec<usize> {
    let fwd: Vec<usize> = cycle.iter().map(|d| d.0).collect();
    let bwd: Vec<usize> = cycle.iter().rev().map(|d| d.reversed().0).collect();
    let mut best: Option<Vec<usize>> = None;
    for seq in [fwd, bwd] {
        for s in 0..seq.len() {
            let rot: Vec<usize> = seq[s..].iter().chain(&seq[..s]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// Whether the digraph on `0..n` with these arcs has a directed cycle,
/// decided by petgraph.
pub fn has_directed_cycle(n: usize, arcs: &[(usize, usize)]) -> bool {
    let mut dg = petgraph::graph::DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| dg.add_node(())).collect();
    for &(a, b) in arcs {
        dg.add_edge(nodes[a], nodes[b], ());
    }
    petgraph::algo::is_cyclic_directed(&dg)
}

/// Passage digraph over darts: `rev(d_in) -> d_out` for every consecutive
/// pair of every trail. A cycle among darts leaving one vertex is a blossom.
pub fn passage_arcs(family: &[Vec<Dart>]) -> Vec<(usize, usize)> {
    let mut arcs = Vec::new();
    for t in family {
        for j in 0..t.len() {
            arcs.push((t[j].reversed().0, t[(j + 1) % t.len()].0));
        }
    }
    arcs
}

/// The estimator's trail stage, spelled out: matched trails of `D` and of
/// `D^{-1}` (minus reverses), then the blossom-free survivors and the
/// assembled rotation.
pub struct PipelineRun {
    pub family: Vec<Vec<Dart>>,
    pub kept: Vec<Vec<Dart>>,
    pub rotation: RotationSystem,
}

pub fn pipeline(g: &Graph, i: usize, seed: u64) -> PipelineRun {
    let d = orient_randomly(g, seed);
    let d_rev = d.reverse();
    let h = build_trail_hypergraph(&d, i, None).unwrap();
    let h_rev = build_trail_hypergraph(&d_rev, i, None).unwrap();
    let m = find_matching(&h, Strategy::GreedyRandom, seed);
    let m_trails = m.trails(&h);
    let mirror =
        find_disjoint_mirror_matching(&h_rev, &m_trails, Strategy::GreedyRandom, seed ^ 0x5eed);
    let mut family: Vec<Vec<Dart>> = m_trails.iter().map(|t| t.darts(&d).unwrap()).collect();
    family.extend(
        mirror
            .trails(&h_rev)
            .iter()
            .map(|t| t.darts(&d_rev).unwrap()),
    );
    let split = make_blossom_free(g, &family).unwrap();
    let kept: Vec<Vec<Dart>> = split.kept.iter().map(|&t| family[t].clone()).collect();
    let rotation = assemble_rotation(g, &kept).unwrap();
    PipelineRun {
        family,
        kept,
        rotation,
    }
}
