//! Rotation systems, face tracing and the genus of an embedding.
//!
//! A rotation system is stored as a successor map on darts: `next(d)` is the
//! dart that follows `d` in the cyclic order around `tail(d)`. Faces are the
//! orbits of
//!
//! ```text
//! face_next(u -> v) = next(v -> u)
//! ```
//!
//! i.e. after arriving at `v` along `uv`, leave along the edge that follows
//! `vu` in the rotation at `v`. Every module uses this one convention.
//!
//! Genus is computed per connected component with Euler's formula and summed;
//! isolated vertices contribute nothing.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bigraph::{Dart, Graph};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    next: Vec<Dart>,
}

impl RotationSystem {
    /// Rotation listing the darts at every vertex in ascending order.
    pub fn least_label(g: &Graph) -> Self {
        let orders = (0..g.n())
            .map(|v| g.darts_from(v).to_vec())
            .collect::<Vec<_>>();
        Self::from_dart_orders_unchecked(g, &orders)
    }

    /// Uniformly random rotation system.
    pub fn random<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Self {
        let orders = (0..g.n())
            .map(|v| {
                let mut darts = g.darts_from(v).to_vec();
                darts.shuffle(rng);
                darts
            })
            .collect::<Vec<_>>();
        Self::from_dart_orders_unchecked(g, &orders)
    }

    /// `orders[v]` lists the darts leaving `v` in cyclic order.
    pub fn from_dart_orders(g: &Graph, orders: &[Vec<Dart>]) -> Result<Self> {
        if orders.len() != g.n() {
            return Err(Error::Validation(format!(
                "rotation lists {} vertices, graph has {}",
                orders.len(),
                g.n()
            )));
        }
        for (v, order) in orders.iter().enumerate() {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted.as_slice() != g.darts_from(v) {
                return Err(Error::Validation(format!(
                    "rotation at vertex {v} is not a permutation of its incident edges"
                )));
            }
        }
        Ok(Self::from_dart_orders_unchecked(g, orders))
    }

    pub(crate) fn from_dart_orders_unchecked(g: &Graph, orders: &[Vec<Dart>]) -> Self {
        let mut next = vec![Dart(usize::MAX); g.dart_count()];
        for order in orders {
            for (j, &d) in order.iter().enumerate() {
                next[d.0] = order[(j + 1) % order.len()];
            }
        }
        RotationSystem { next }
    }

    /// Builds from a raw successor map, validating it.
    pub fn from_successors(g: &Graph, next: Vec<Dart>) -> Result<Self> {
        let rot = RotationSystem { next };
        rot.validate(g)?;
        Ok(rot)
    }

    #[inline]
    pub fn next(&self, d: Dart) -> Dart {
        self.next[d.0]
    }

    /// Successor of dart `d` along its face.
    #[inline]
    pub fn face_next(&self, d: Dart) -> Dart {
        self.next[d.reversed().0]
    }

    /// Cyclic order at `v`, starting from its least dart.
    pub fn order_at(&self, g: &Graph, v: usize) -> Vec<Dart> {
        let Some(&start) = g.darts_from(v).first() else {
            return Vec::new();
        };
        let mut order = vec![start];
        let mut d = self.next(start);
        while d != start && order.len() <= g.degree(v) {
            order.push(d);
            d = self.next(d);
        }
        order
    }

    /// Checks that the rotation at every vertex is one cycle through exactly
    /// the darts leaving that vertex.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.next.len() != g.dart_count() {
            return Err(Error::Validation(format!(
                "rotation covers {} darts, graph has {}",
                self.next.len(),
                g.dart_count()
            )));
        }
        for v in 0..g.n() {
            let darts = g.darts_from(v);
            let Some(&start) = darts.first() else {
                continue;
            };
            let mut seen = 0;
            let mut d = start;
            loop {
                if d.0 >= self.next.len() || g.tail(d) != v {
                    return Err(Error::Validation(format!(
                        "rotation at vertex {v} leaves the vertex"
                    )));
                }
                seen += 1;
                d = self.next[d.0];
                if d == start || seen > darts.len() {
                    break;
                }
            }
            if seen != darts.len() || d != start {
                return Err(Error::Validation(format!(
                    "rotation at vertex {v} is not a single cycle over its {} edges",
                    darts.len()
                )));
            }
        }
        Ok(())
    }
}

/// Faces of an embedding, each a cyclic dart sequence starting at its least
/// dart; faces are sorted by that dart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceSet {
    faces: Vec<Vec<Dart>>,
    edge_count: usize,
}

impl FaceSet {
    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.faces.iter().map(Vec::len)
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Whether `trail` (a cyclic dart sequence) is one of the faces.
    pub fn contains_cycle(&self, trail: &[Dart]) -> bool {
        let canon = canonical_rotation(trail);
        self.faces
            .binary_search_by(|f| f.as_slice().cmp(canon.as_slice()))
            .is_ok()
    }
}

/// Rotates a cyclic sequence so that its least element comes first.
pub fn canonical_rotation<T: Ord + Copy>(seq: &[T]) -> Vec<T> {
    let Some(start) = (0..seq.len()).min_by_key(|&j| seq[j]) else {
        return Vec::new();
    };
    seq[start..].iter().chain(&seq[..start]).copied().collect()
}

pub fn trace_faces(g: &Graph, rot: &RotationSystem) -> Result<FaceSet> {
    rot.validate(g)?;
    let mut seen = vec![false; g.dart_count()];
    let mut faces = Vec::new();
    // Ascending start darts give faces already in canonical form and order.
    for start in g.darts() {
        if seen[start.0] {
            continue;
        }
        let mut face = Vec::new();
        let mut d = start;
        while !seen[d.0] {
            seen[d.0] = true;
            face.push(d);
            d = rot.face_next(d);
        }
        if d != start {
            return Err(Error::Internal("face orbit did not close".into()));
        }
        faces.push(face);
    }
    Ok(FaceSet {
        faces,
        edge_count: g.m(),
    })
}

/// Genus of each component from its face count; isolated vertices give 0.
pub fn genus_from_faces(g: &Graph, faces: &FaceSet) -> Result<u64> {
    let comps = g.components();
    let mut face_count = vec![0usize; comps.count()];
    for face in faces.faces() {
        face_count[comps.of_vertex[g.tail(face[0])]] += 1;
    }
    let mut total = 0u64;
    for (c, &faces_c) in face_count.iter().enumerate() {
        if comps.edges[c] == 0 {
            continue;
        }
        let twice = 2 + comps.edges[c] as i64 - comps.vertices[c] as i64 - faces_c as i64;
        if twice < 0 || twice % 2 != 0 {
            return Err(Error::Internal(format!(
                "component {c}: 2 - n + e - f = {twice} is not a non-negative even number"
            )));
        }
        total += (twice / 2) as u64;
    }
    Ok(total)
}

pub fn genus_of_embedding(g: &Graph, rot: &RotationSystem) -> Result<u64> {
    genus_from_faces(g, &trace_faces(g, rot)?)
}

pub fn face_length_histogram(faces: &FaceSet) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for len in faces.lengths() {
        *hist.entry(len).or_insert(0) += 1;
    }
    hist
}

#[derive(Clone, Debug, PartialEq)]
pub struct NearKgonReport {
    pub holds: bool,
    /// `k * f_k`.
    pub covered: usize,
    /// `2 (1 - eps) |E|`.
    pub threshold: f64,
    pub histogram: BTreeMap<usize, usize>,
}

/// Tests `k f_k(rot) >= 2 (1 - eps) |E|`.
pub fn is_near_kgon(g: &Graph, rot: &RotationSystem, k: usize, eps: f64) -> Result<NearKgonReport> {
    if k < 3 {
        return Err(Error::InvalidParams(format!("k = {k} must be at least 3")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!("eps = {eps} outside (0, 1)")));
    }
    let histogram = face_length_histogram(&trace_faces(g, rot)?);
    let covered = k * histogram.get(&k).copied().unwrap_or(0);
    let threshold = 2.0 * (1.0 - eps) * g.m() as f64;
    Ok(NearKgonReport {
        holds: covered as f64 >= threshold,
        covered,
        threshold,
        histogram,
    })
}

/// Writes `v: a-b c-d ...` per vertex, edges named by endpoints (low first)
/// in cyclic order starting from the least dart.
pub fn write_rotation<W: Write>(g: &Graph, rot: &RotationSystem, mut w: W) -> Result<()> {
    for v in 0..g.n() {
        write!(w, "{v}:")?;
        for d in rot.order_at(g, v) {
            let (a, b) = g.endpoints(d.edge());
            write!(w, " {a}-{b}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_rotation<R: BufRead>(g: &Graph, r: R) -> Result<RotationSystem> {
    let mut orders = vec![Vec::new(); g.n()];
    let mut listed = vec![false; g.n()];
    for (idx, line) in r.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: line_no, msg };
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| bad("expected `v: edges...`".into()))?;
        let v: usize = head
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad vertex {head:?}")))?;
        if v >= g.n() || listed[v] {
            return Err(bad(format!("vertex {v} out of range or repeated")));
        }
        listed[v] = true;
        for tok in rest.split_whitespace() {
            let (a, b) = tok
                .split_once('-')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
                .ok_or_else(|| bad(format!("bad edge token {tok:?}")))?;
            let other = match (a == v, b == v) {
                (true, false) => b,
                (false, true) => a,
                _ => return Err(bad(format!("edge {tok} is not incident with {v}"))),
            };
            let d = g
                .dart_between(v, other)
                .ok_or_else(|| bad(format!("edge {tok} is not in the graph")))?;
            orders[v].push(d);
        }
    }
    RotationSystem::from_dart_orders(g, &orders)
}

/// One face per line as `u->v v->w ...`.
pub fn write_faces<W: Write>(g: &Graph, faces: &FaceSet, mut w: W) -> Result<()> {
    for face in faces.faces() {
        let tokens: Vec<String> = face
            .iter()
            .map(|&d| format!("{}->{}", g.tail(d), g.head(d)))
            .collect();
        writeln!(w, "{}", tokens.join(" "))?;
    }
    Ok(())
}
