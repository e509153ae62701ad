//! Closed trails in digraphs and the trail hypergraph built from them.
//!
//! The hypergraph has the arcs of a digraph `D` as vertices and the directed
//! closed trails of length `2i + 2` as hyperedges. Arc-disjoint hyperedge
//! sets (matchings) are the prescribed faces of the embedding pipeline.
//!
//! Trails may revisit vertices but never arcs. A trail is stored in
//! canonical form: the cyclic rotation that starts at its least arc id.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bigraph::{Dart, Digraph, Graph};
use crate::embedding::canonical_rotation;
use crate::error::{Error, Result};

/// A directed closed trail: a cyclic sequence of distinct arc ids of some
/// digraph where each arc ends where the next begins.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedTrail {
    arcs: Vec<usize>,
}

impl ClosedTrail {
    /// Validates against `d` and canonicalises the rotation.
    pub fn new(d: &Digraph, arcs: &[usize]) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::Validation("empty trail".into()));
        }
        let mut seen = HashSet::new();
        for (j, &a) in arcs.iter().enumerate() {
            if a >= d.arc_count() {
                return Err(Error::Validation(format!("arc {a} not in digraph")));
            }
            if !seen.insert(a) {
                return Err(Error::Validation(format!("arc {a} repeated in trail")));
            }
            let next = arcs[(j + 1) % arcs.len()];
            if d.arc(a).1 != d.arc(next).0 {
                return Err(Error::Validation(format!(
                    "arcs {a} and {next} are not consecutive"
                )));
            }
        }
        Ok(ClosedTrail {
            arcs: canonical_rotation(arcs),
        })
    }

    fn from_canonical(arcs: Vec<usize>) -> Self {
        ClosedTrail { arcs }
    }

    pub fn arcs(&self) -> &[usize] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// The same arcs walked backwards, i.e. this trail as seen in `D^{-1}`.
    pub fn reversed(&self) -> ClosedTrail {
        let rev: Vec<usize> = self.arcs.iter().rev().copied().collect();
        ClosedTrail {
            arcs: canonical_rotation(&rev),
        }
    }

    /// Tail vertices in walk order.
    pub fn vertices(&self, d: &Digraph) -> Vec<usize> {
        self.arcs.iter().map(|&a| d.arc(a).0).collect()
    }

    /// Darts of the underlying graph; `None` unless `d` is an orientation.
    pub fn darts(&self, d: &Digraph) -> Option<Vec<Dart>> {
        self.arcs.iter().map(|&a| d.dart(a)).collect()
    }
}

/// Result of an enumeration, flagged when the cap cut it short.
#[derive(Clone, Debug)]
pub struct TrailEnumeration {
    pub trails: Vec<ClosedTrail>,
    pub truncated: bool,
}

struct TrailSearch<'a> {
    d: &'a Digraph,
    len: usize,
    cap: usize,
    path: Vec<usize>,
    out: Vec<ClosedTrail>,
    truncated: bool,
}

impl TrailSearch<'_> {
    /// Extends the current path (first arc is the least arc of the trail).
    fn extend(&mut self, at: usize) {
        if self.truncated {
            return;
        }
        let first = self.path[0];
        let home = self.d.arc(first).0;
        if self.path.len() + 1 == self.len {
            if let Some(a) = self.d.arc_between(at, home) {
                if a > first && !self.path.contains(&a) {
                    if self.out.len() == self.cap {
                        self.truncated = true;
                        return;
                    }
                    let mut arcs = self.path.clone();
                    arcs.push(a);
                    self.out.push(ClosedTrail::from_canonical(arcs));
                }
            }
            return;
        }
        for &(next, a) in self.d.out_arcs(at) {
            if a > first && !self.path.contains(&a) {
                self.path.push(a);
                self.extend(next);
                self.path.pop();
                if self.truncated {
                    return;
                }
            }
        }
    }
}

/// All closed trails of length `2i + 2` in `d`, one per rotation class, in
/// ascending canonical order. At most `cap` trails are returned; hitting the
/// cap sets `truncated`.
pub fn enumerate_closed_trails(
    d: &Digraph,
    i: usize,
    cap: Option<usize>,
) -> Result<TrailEnumeration> {
    if i < 1 {
        return Err(Error::InvalidParams("i must be >= 1".into()));
    }
    let mut search = TrailSearch {
        d,
        len: 2 * i + 2,
        cap: cap.unwrap_or(usize::MAX),
        path: Vec::with_capacity(2 * i + 2),
        out: Vec::new(),
        truncated: false,
    };
    for first in 0..d.arc_count() {
        search.path.clear();
        search.path.push(first);
        search.extend(d.arc(first).1);
        if search.truncated {
            break;
        }
    }
    Ok(TrailEnumeration {
        trails: search.out,
        truncated: search.truncated,
    })
}

/// Number of directed paths (no repeated vertex) of length `2i + 1` from `b`
/// to `a`.
pub fn rho(d: &Digraph, b: usize, a: usize, i: usize) -> u64 {
    fn walk(d: &Digraph, at: usize, target: usize, left: usize, path: &mut Vec<usize>) -> u64 {
        if left == 0 {
            return u64::from(at == target);
        }
        let mut total = 0;
        for &(next, _) in d.out_arcs(at) {
            if path.contains(&next) || (next == target && left > 1) {
                continue;
            }
            path.push(next);
            total += walk(d, next, target, left - 1, path);
            path.pop();
        }
        total
    }
    if a >= d.n() || b >= d.n() || a == b {
        return 0;
    }
    let mut path = vec![b];
    walk(d, b, a, 2 * i + 1, &mut path)
}

/// `d`-uniform hypergraph on vertices `0..n_vertices`.
#[derive(Clone, Debug)]
pub struct TrailHypergraph {
    n_vertices: usize,
    uniformity: usize,
    members: Vec<usize>,
    incidence: Vec<Vec<usize>>,
    truncated: bool,
}

impl TrailHypergraph {
    /// Hypergraph from explicit hyperedges (each of size `uniformity`, with
    /// distinct members).
    pub fn from_edges(n_vertices: usize, uniformity: usize, edges: &[Vec<usize>]) -> Result<Self> {
        let mut members = Vec::with_capacity(edges.len() * uniformity);
        for e in edges {
            if e.len() != uniformity {
                return Err(Error::Validation(format!(
                    "hyperedge of size {} in a {uniformity}-uniform hypergraph",
                    e.len()
                )));
            }
            let distinct: HashSet<_> = e.iter().collect();
            if distinct.len() != e.len() || e.iter().any(|&v| v >= n_vertices) {
                return Err(Error::Validation(
                    "hyperedge members must be distinct vertices".into(),
                ));
            }
            members.extend_from_slice(e);
        }
        Ok(Self::assemble(n_vertices, uniformity, members, false))
    }

    fn assemble(
        n_vertices: usize,
        uniformity: usize,
        members: Vec<usize>,
        truncated: bool,
    ) -> Self {
        let mut incidence = vec![Vec::new(); n_vertices];
        for (h, chunk) in members.chunks(uniformity.max(1)).enumerate() {
            for &v in chunk {
                incidence[v].push(h);
            }
        }
        TrailHypergraph {
            n_vertices,
            uniformity,
            members,
            incidence,
            truncated,
        }
    }

    /// `N`, the number of vertices (arcs of the host digraph).
    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// `d = 2i + 2`.
    pub fn uniformity(&self) -> usize {
        self.uniformity
    }

    pub fn edge_count(&self) -> usize {
        self.members.len().checked_div(self.uniformity).unwrap_or(0)
    }

    pub fn edge(&self, h: usize) -> &[usize] {
        &self.members[h * self.uniformity..(h + 1) * self.uniformity]
    }

    /// Hyperedge `h` as a trail (hypergraphs built from digraphs only).
    pub fn trail(&self, h: usize) -> ClosedTrail {
        ClosedTrail::from_canonical(self.edge(h).to_vec())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n_vertices == 0 {
            return 0.0;
        }
        (self.members.len()) as f64 / self.n_vertices as f64
    }
}

pub fn build_trail_hypergraph(
    d: &Digraph,
    i: usize,
    cap: Option<usize>,
) -> Result<TrailHypergraph> {
    let TrailEnumeration { trails, truncated } = enumerate_closed_trails(d, i, cap)?;
    let len = 2 * i + 2;
    let mut members = Vec::with_capacity(trails.len() * len);
    for t in &trails {
        members.extend_from_slice(t.arcs());
    }
    Ok(TrailHypergraph::assemble(
        d.arc_count(),
        len,
        members,
        truncated,
    ))
}

/// `n1^i n2^i (p/2)^(2i+1)`, the typical number of closed `(2i+2)`-trails
/// through one arc of a random orientation of `G(n1, n2, p)`.
pub fn theoretical_delta(n1: usize, n2: usize, p: f64, i: usize) -> f64 {
    let i = i as i32;
    (n1 as f64).powi(i) * (n2 as f64).powi(i) * (p / 2.0).powi(2 * i + 1)
}

/// Pairs sampled for the codegree check when the exact count is too costly.
pub const CODEGREE_SAMPLE_PAIRS: u64 = 100_000;
/// Vertex count up to which codegrees are always computed exactly.
pub const CODEGREE_EXACT_VERTICES: usize = 2000;
/// Work budget (`|E| d^2`) for the exact codegree computation on larger
/// hypergraphs.
pub const CODEGREE_EXACT_WORK: usize = 100_000_000;

/// Empirical status of the three hypergraph-matching conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub delta: f64,
    pub target_degree: f64,
    pub n_vertices: usize,
    /// Vertices with degree in `[(1-δ)Δ, (1+δ)Δ]`.
    pub in_band: usize,
    pub in_band_fraction: f64,
    /// Condition (1): at least `(1-δ)N` vertices are in band.
    pub degree_condition: bool,
    pub max_codegree: usize,
    pub codegree_exact: bool,
    pub pairs_sampled: u64,
    /// Condition (2): every codegree is below `δΔ`.
    pub codegree_condition: bool,
    /// Hyperedges touching a vertex of degree above `(1+δ)Δ`.
    pub heavy_hyperedges: usize,
    /// Condition (3): at most `δNΔ` such hyperedges.
    pub heavy_condition: bool,
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "delta={}", self.delta)?;
        writeln!(f, "target_degree={}", self.target_degree)?;
        writeln!(f, "n_vertices={}", self.n_vertices)?;
        writeln!(f, "in_band={}", self.in_band)?;
        writeln!(f, "in_band_fraction={:.6}", self.in_band_fraction)?;
        writeln!(f, "condition1={}", self.degree_condition)?;
        writeln!(f, "max_codegree={}", self.max_codegree)?;
        writeln!(f, "codegree_exact={}", self.codegree_exact)?;
        writeln!(f, "pairs_sampled={}", self.pairs_sampled)?;
        writeln!(f, "condition2={}", self.codegree_condition)?;
        writeln!(f, "heavy_hyperedges={}", self.heavy_hyperedges)?;
        write!(f, "condition3={}", self.heavy_condition)
    }
}

fn exact_max_codegree(h: &TrailHypergraph) -> usize {
    let mut counter = vec![0usize; h.n_vertices];
    let mut touched = Vec::new();
    let mut best = 0;
    for u in 0..h.n_vertices {
        for &e in h.incident(u) {
            for &v in h.edge(e) {
                if v > u {
                    if counter[v] == 0 {
                        touched.push(v);
                    }
                    counter[v] += 1;
                }
            }
        }
        for v in touched.drain(..) {
            best = best.max(counter[v]);
            counter[v] = 0;
        }
    }
    best
}

fn sampled_max_codegree(h: &TrailHypergraph, seed: u64) -> usize {
    let n = h.n_vertices;
    if n < 2 {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..CODEGREE_SAMPLE_PAIRS {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        // Incidence lists are ascending, so a merge counts the overlap.
        let (a, b) = (h.incident(u), h.incident(v));
        let (mut x, mut y, mut common) = (0, 0, 0);
        while x < a.len() && y < b.len() {
            match a[x].cmp(&b[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    common += 1;
                    x += 1;
                    y += 1;
                }
            }
        }
        best = best.max(common);
    }
    best
}

/// Measures the three degree/codegree conditions for a target degree `Δ`.
/// `seed` drives the codegree sample when the exact count is out of budget.
pub fn check_matching_conditions(
    h: &TrailHypergraph,
    delta: f64,
    target_degree: f64,
    seed: u64,
) -> Result<ConditionReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!(
            "delta = {delta} outside (0, 1)"
        )));
    }
    if target_degree.is_nan() || target_degree <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "target degree {target_degree} must be positive"
        )));
    }
    let n = h.n_vertices;
    let lo = (1.0 - delta) * target_degree;
    let hi = (1.0 + delta) * target_degree;
    let in_band = (0..n)
        .filter(|&v| (lo..=hi).contains(&(h.degree(v) as f64)))
        .count();
    let in_band_fraction = if n == 0 {
        1.0
    } else {
        in_band as f64 / n as f64
    };

    let work = h.members.len().saturating_mul(h.uniformity);
    let codegree_exact = n <= CODEGREE_EXACT_VERTICES || work <= CODEGREE_EXACT_WORK;
    let (max_codegree, pairs_sampled) = if codegree_exact {
        (exact_max_codegree(h), 0)
    } else {
        (sampled_max_codegree(h, seed), CODEGREE_SAMPLE_PAIRS)
    };

    let heavy_hyperedges = (0..h.edge_count())
        .filter(|&e| h.edge(e).iter().any(|&v| h.degree(v) as f64 > hi))
        .count();

    Ok(ConditionReport {
        delta,
        target_degree,
        n_vertices: n,
        in_band,
        in_band_fraction,
        degree_condition: in_band as f64 >= (1.0 - delta) * n as f64,
        max_codegree,
        codegree_exact,
        pairs_sampled,
        codegree_condition: (max_codegree as f64) < delta * target_degree,
        heavy_hyperedges,
        heavy_condition: heavy_hyperedges as f64 <= delta * n as f64 * target_degree,
    })
}

/// How to grow a matching.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Strategy {
    /// Scan hyperedges in uniformly random order, keeping every one that is
    /// still disjoint from the matching.
    GreedyRandom,
    /// Rounds of independent random bites of roughly `bite` of the live
    /// degree, dropping bites that collide, then a greedy finish.
    Nibble { bite: f64 },
}

impl Strategy {
    pub const DEFAULT_BITE: f64 = 0.1;

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::GreedyRandom => "greedy",
            Strategy::Nibble { .. } => "nibble",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" | "greedy-random" => Ok(Strategy::GreedyRandom),
            "nibble" => Ok(Strategy::Nibble {
                bite: Strategy::DEFAULT_BITE,
            }),
            other => Err(Error::InvalidParams(format!(
                "unknown strategy {other:?} (expected greedy or nibble)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MatchingReport {
    /// Chosen hyperedge ids, in selection order.
    pub edges: Vec<usize>,
    /// `d |M| / N`.
    pub coverage: f64,
    pub conditions: Option<ConditionReport>,
}

impl MatchingReport {
    fn new(h: &TrailHypergraph, edges: Vec<usize>) -> Self {
        let coverage = if h.n_vertices == 0 {
            0.0
        } else {
            (h.uniformity * edges.len()) as f64 / h.n_vertices as f64
        };
        MatchingReport {
            edges,
            coverage,
            conditions: None,
        }
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn trails(&self, h: &TrailHypergraph) -> Vec<ClosedTrail> {
        self.edges.iter().map(|&e| h.trail(e)).collect()
    }

    /// `key=value` lines.
    pub fn write_text<W: Write>(&self, h: &TrailHypergraph, mut w: W) -> Result<()> {
        writeln!(w, "n_vertices={}", h.n_vertices())?;
        writeln!(w, "uniformity={}", h.uniformity())?;
        writeln!(w, "hyperedges={}", h.edge_count())?;
        writeln!(w, "truncated={}", h.truncated())?;
        writeln!(w, "matching_size={}", self.size())?;
        writeln!(w, "coverage={:.6}", self.coverage)?;
        if let Some(c) = &self.conditions {
            writeln!(w, "{c}")?;
        }
        Ok(())
    }
}

/// Shared matching engine. `allowed` filters hyperedges up front; `accept`
/// gets the last word on each candidate that is disjoint from the matching
/// (a rejection is final).
pub(crate) fn grow_matching(
    h: &TrailHypergraph,
    allowed: impl Fn(usize) -> bool,
    strategy: Strategy,
    seed: u64,
    accept: &mut dyn FnMut(&[usize]) -> bool,
) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut covered = vec![false; h.n_vertices];
    let mut live: Vec<usize> = (0..h.edge_count()).filter(|&e| allowed(e)).collect();
    let mut chosen = Vec::new();

    let mut try_take = |e: usize, covered: &mut Vec<bool>, chosen: &mut Vec<usize>| -> bool {
        let arcs = h.edge(e);
        if arcs.iter().any(|&v| covered[v]) || !accept(arcs) {
            return false;
        }
        for &v in arcs {
            covered[v] = true;
        }
        chosen.push(e);
        true
    };

    if let Strategy::Nibble { bite } = strategy {
        let bite = bite.clamp(1e-6, 1.0);
        let max_rounds = (20.0 / bite).ceil() as usize;
        let mut uses = vec![0u32; h.n_vertices];
        let mut stalls = 0;
        for _ in 0..max_rounds {
            live.retain(|&e| h.edge(e).iter().all(|&v| !covered[v]));
            if live.is_empty() {
                break;
            }
            let mut live_degree = vec![0u32; h.n_vertices];
            for &e in &live {
                for &v in h.edge(e) {
                    live_degree[v] += 1;
                }
            }
            let active = live_degree.iter().filter(|&&x| x > 0).count().max(1);
            let mean = (live.len() * h.uniformity) as f64 / active as f64;
            let q = (bite / mean).min(0.5);
            let mut bitten: Vec<usize> = live.iter().copied().filter(|_| rng.gen_bool(q)).collect();
            for &e in &bitten {
                for &v in h.edge(e) {
                    uses[v] += 1;
                }
            }
            let clean: Vec<usize> = bitten
                .iter()
                .copied()
                .filter(|&e| h.edge(e).iter().all(|&v| uses[v] == 1))
                .collect();
            for &e in &bitten {
                for &v in h.edge(e) {
                    uses[v] = 0;
                }
            }
            bitten.clear();
            let before = chosen.len();
            let mut rejected = HashSet::new();
            for e in clean {
                if !try_take(e, &mut covered, &mut chosen) {
                    rejected.insert(e);
                }
            }
            if !rejected.is_empty() {
                live.retain(|e| !rejected.contains(e));
            }
            if chosen.len() == before {
                stalls += 1;
                if stalls >= 3 {
                    break;
                }
            } else {
                stalls = 0;
            }
        }
    }

    live.shuffle(&mut rng);
    for e in live {
        try_take(e, &mut covered, &mut chosen);
    }
    chosen
}

/// An arc-disjoint set of hyperedges. Deterministic given `seed`.
pub fn find_matching(h: &TrailHypergraph, strategy: Strategy, seed: u64) -> MatchingReport {
    let edges = grow_matching(h, |_| true, strategy, seed, &mut |_| true);
    MatchingReport::new(h, edges)
}

/// Matching in the hypergraph of `D^{-1}` that avoids every reversed trail of
/// `m` (a matching in the hypergraph of `D`).
pub fn find_disjoint_mirror_matching(
    h_rev: &TrailHypergraph,
    m: &[ClosedTrail],
    strategy: Strategy,
    seed: u64,
) -> MatchingReport {
    find_disjoint_mirror_matching_with(h_rev, m, strategy, seed, &mut |_| true)
}

/// As [`find_disjoint_mirror_matching`], with a caller veto on candidates.
pub fn find_disjoint_mirror_matching_with(
    h_rev: &TrailHypergraph,
    m: &[ClosedTrail],
    strategy: Strategy,
    seed: u64,
    accept: &mut dyn FnMut(&[usize]) -> bool,
) -> MatchingReport {
    let forbidden: HashSet<ClosedTrail> = m.iter().map(ClosedTrail::reversed).collect();
    let allowed = |e: usize| forbidden.is_empty() || !forbidden.contains(&h_rev.trail(e));
    let edges = grow_matching(h_rev, allowed, strategy, seed, accept);
    MatchingReport::new(h_rev, edges)
}

/// Writes one trail per line as `u->v v->w ...`.
pub fn write_trails<W: Write>(d: &Digraph, trails: &[ClosedTrail], mut w: W) -> Result<()> {
    for t in trails {
        let tokens: Vec<String> = t
            .arcs()
            .iter()
            .map(|&a| {
                let (u, v) = d.arc(a);
                format!("{u}->{v}")
            })
            .collect();
        writeln!(w, "{}", tokens.join(" "))?;
    }
    Ok(())
}

/// Default DFS step budget for [`count_short_closed_trails`].
pub const SHORT_TRAIL_STEP_CAP: u64 = 200_000_000;

/// Closed trails of `g` of each even length `4..=2i`, attributed to their
/// least edge. Each undirected closed trail (up to rotation and reversal) is
/// counted once: the walk starts on its least edge, traversed low to high.
pub(crate) fn short_closed_trails_by_edge(g: &Graph, i: usize, step_cap: u64) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; g.m()];
    if i < 2 {
        return Ok(counts);
    }
    let max_len = 2 * i;
    let mut used = vec![false; g.m()];
    let mut steps = 0u64;

    struct Walk<'a> {
        g: &'a Graph,
        used: &'a mut [bool],
        steps: &'a mut u64,
        step_cap: u64,
        first: usize,
        home: usize,
        max_len: usize,
        found: u64,
    }

    impl Walk<'_> {
        fn go(&mut self, at: usize, len: usize) -> Result<()> {
            *self.steps += 1;
            if *self.steps > self.step_cap {
                return Err(Error::ResourceGuard {
                    what: "short closed-trail DFS steps".into(),
                    limit: self.step_cap,
                });
            }
            if at == self.home && len >= 4 && len.is_multiple_of(2) {
                self.found += 1;
            }
            if len == self.max_len {
                return Ok(());
            }
            for &d in self.g.darts_from(at) {
                let e = d.edge();
                if e > self.first && !self.used[e] {
                    self.used[e] = true;
                    self.go(self.g.head(d), len + 1)?;
                    self.used[e] = false;
                }
            }
            Ok(())
        }
    }

    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let mut walk = Walk {
            g,
            used: &mut used,
            steps: &mut steps,
            step_cap,
            first: e,
            home: u,
            max_len,
            found: 0,
        };
        walk.go(v, 1)?;
        counts[e] = walk.found;
    }
    Ok(counts)
}

/// Number of closed trails of length `2j`, `2 <= j <= i`, in `g`.
pub fn count_short_closed_trails(g: &Graph, i: usize) -> Result<u64> {
    Ok(short_closed_trails_by_edge(g, i, SHORT_TRAIL_STEP_CAP)?
        .iter()
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::{orient_randomly, BipartiteGraph};

    /// x1 = 0, x2 = 1, y1 = 2, y2 = 3; x1 -> y1 -> x2 -> y2 -> x1.
    fn directed_c4() -> Digraph {
        Digraph::new(4, vec![(0, 2), (2, 1), (1, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn directed_four_cycle() {
        let d = directed_c4();
        let e = enumerate_closed_trails(&d, 1, None).unwrap();
        assert_eq!(e.trails.len(), 1);
        assert!(!e.truncated);
        assert_eq!(rho(&d, 2, 0, 1), 1);
        let h = build_trail_hypergraph(&d, 1, None).unwrap();
        assert_eq!((h.n_vertices(), h.edge_count()), (4, 1));
        assert!((0..4).all(|v| h.degree(v) == 1));
    }

    #[test]
    fn one_way_orientation_has_no_trails() {
        let g = BipartiteGraph::complete(3, 3);
        let arcs = g.graph().edges().to_vec();
        let d = Digraph::new(6, arcs).unwrap();
        for i in 1..=3 {
            assert!(enumerate_closed_trails(&d, i, None)
                .unwrap()
                .trails
                .is_empty());
        }
        let h = build_trail_hypergraph(&d, 1, None).unwrap();
        assert_eq!((h.n_vertices(), h.edge_count()), (9, 0));
        assert_eq!(rho(&Digraph::new(3, vec![]).unwrap(), 0, 1, 1), 0);
    }

    #[test]
    fn cap_truncates_and_flags() {
        let g = BipartiteGraph::complete(6, 6);
        let d = orient_randomly(g.graph(), 9);
        let all = enumerate_closed_trails(&d, 1, None).unwrap();
        assert!(all.trails.len() > 2);
        let some = enumerate_closed_trails(&d, 1, Some(2)).unwrap();
        assert!(some.truncated);
        assert_eq!(some.trails, all.trails[..2]);
    }

    #[test]
    fn trail_validation_and_reversal() {
        let d = directed_c4();
        let t = ClosedTrail::new(&d, &[2, 3, 0, 1]).unwrap();
        assert_eq!(t.arcs(), &[0, 1, 2, 3]);
        assert_eq!(t.reversed().arcs(), &[0, 3, 2, 1]);
        assert!(ClosedTrail::new(&d, &[0, 2]).is_err());
        assert!(ClosedTrail::new(&d, &[0, 1, 2, 3, 0, 1, 2, 3]).is_err());
    }

    #[test]
    fn theoretical_delta_values() {
        assert!((theoretical_delta(100, 100, 0.5, 1) - 156.25).abs() < 1e-9);
        assert!((theoretical_delta(50, 50, 0.4, 2) - 2000.0).abs() < 1e-6);
        assert_eq!(theoretical_delta(30, 20, 0.0, 3), 0.0);
    }

    #[test]
    fn conditions_on_trivial_hypergraphs() {
        let h = build_trail_hypergraph(&directed_c4(), 1, None).unwrap();
        let r = check_matching_conditions(&h, 0.5, 1.0, 0).unwrap();
        assert_eq!(r.in_band_fraction, 1.0);
        assert!(r.degree_condition);

        let empty = TrailHypergraph::from_edges(5, 4, &[]).unwrap();
        let r = check_matching_conditions(&empty, 0.5, 1.0, 0).unwrap();
        assert_eq!(r.max_codegree, 0);
        assert_eq!(r.heavy_hyperedges, 0);
        assert!(check_matching_conditions(&empty, 1.5, 1.0, 0).is_err());
        assert!(check_matching_conditions(&empty, 0.5, 0.0, 0).is_err());
    }

    #[test]
    fn sampled_codegree_never_exceeds_exact() {
        let g = BipartiteGraph::complete(5, 5);
        let d = orient_randomly(g.graph(), 4);
        let h = build_trail_hypergraph(&d, 1, None).unwrap();
        assert!(sampled_max_codegree(&h, 1) <= exact_max_codegree(&h));
    }

    #[test]
    fn tiny_matchings() {
        let single = TrailHypergraph::from_edges(4, 4, &[vec![0, 1, 2, 3]]).unwrap();
        for strategy in [Strategy::GreedyRandom, Strategy::Nibble { bite: 0.1 }] {
            let m = find_matching(&single, strategy, 1);
            assert_eq!(m.size(), 1);
            assert_eq!(m.coverage, 1.0);
        }
        let clash =
            TrailHypergraph::from_edges(7, 4, &[vec![0, 1, 2, 3], vec![3, 4, 5, 6]]).unwrap();
        for strategy in [Strategy::GreedyRandom, Strategy::Nibble { bite: 0.5 }] {
            assert_eq!(find_matching(&clash, strategy, 5).size(), 1);
        }
    }

    #[test]
    fn mirror_matching_excludes_reverses() {
        let d = directed_c4();
        let h = build_trail_hypergraph(&d, 1, None).unwrap();
        let h_rev = build_trail_hypergraph(&d.reverse(), 1, None).unwrap();
        let none = find_disjoint_mirror_matching(&h_rev, &[], Strategy::GreedyRandom, 0);
        assert_eq!(none.size(), 1);
        let m = find_matching(&h, Strategy::GreedyRandom, 0);
        let mirror =
            find_disjoint_mirror_matching(&h_rev, &m.trails(&h), Strategy::GreedyRandom, 0);
        assert_eq!(mirror.size(), 0);
    }

    #[test]
    fn short_trails_in_small_graphs() {
        let k33 = BipartiteGraph::complete(3, 3);
        assert_eq!(count_short_closed_trails(k33.graph(), 1).unwrap(), 0);
        assert_eq!(count_short_closed_trails(k33.graph(), 2).unwrap(), 9);
        // Two 4-cycles sharing one vertex: two 4-trails plus the figure
        // eight, which can be walked in two essentially different ways.
        let bowtie = Graph::new(
            7,
            [
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 0),
                (0, 4),
                (4, 5),
                (5, 6),
                (6, 0),
            ],
        )
        .unwrap();
        assert_eq!(count_short_closed_trails(&bowtie, 2).unwrap(), 2);
        assert_eq!(count_short_closed_trails(&bowtie, 4).unwrap(), 4);
    }

    #[test]
    fn short_trail_guard() {
        let g = BipartiteGraph::complete(6, 6);
        assert!(short_closed_trails_by_edge(g.graph(), 4, 1000).is_err());
    }
}
