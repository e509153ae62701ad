//! Blossoms in families of arc-disjoint closed trails, and the rotation
//! system that realises a blossom-free family as faces.
//!
//! Every passage `u -> v -> w` of a trail through `v` demands that edge `vw`
//! follows edge `vu` in the rotation at `v`. At a fixed centre these demands
//! form the *tip digraph*: one auxiliary arc from tip `u` to tip `w` per
//! passage. Arc-disjointness makes it a partial injection, so its components
//! are paths and cycles, and a cycle is exactly a blossom centred at `v`.
//! With no cycles anywhere, the paths at each vertex can be chained into one
//! cyclic order, which gives the rotation.

use std::fmt;
use std::io::Write;

use crate::bigraph::{Dart, Graph};
use crate::embedding::{canonical_rotation, trace_faces, RotationSystem};
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Passage `index` of trail `trail`: the dart `trail[index]` enters the
/// centre and `trail[index + 1]` (cyclically) leaves it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Passage {
    pub trail: usize,
    pub index: usize,
}

/// Auxiliary arc of a tip digraph; tips are vertex ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TipArc {
    pub from_tip: usize,
    pub to_tip: usize,
    pub passage: Passage,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TipDigraph {
    pub center: usize,
    pub arcs: Vec<TipArc>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blossom {
    pub center: usize,
    /// Passages around the auxiliary cycle, in cycle order.
    pub passages: Vec<Passage>,
    /// `l >= 3`, or `l = 2` with the two trails not mutually reverse.
    pub simple: bool,
}

impl Blossom {
    pub fn length(&self) -> usize {
        self.passages.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlossomReport {
    pub blossoms: Vec<Blossom>,
}

impl BlossomReport {
    pub fn is_blossom_free(&self) -> bool {
        self.blossoms.is_empty()
    }

    pub fn simple_count(&self) -> usize {
        self.blossoms.iter().filter(|b| b.simple).count()
    }
}

impl fmt::Display for BlossomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "blossoms={}", self.blossoms.len())?;
        write!(f, "simple={}", self.simple_count())?;
        for b in &self.blossoms {
            let passages: Vec<String> = b
                .passages
                .iter()
                .map(|p| format!("{}:{}", p.trail, p.index))
                .collect();
            write!(
                f,
                "\nblossom center={} length={} simple={} passages={}",
                b.center,
                b.length(),
                b.simple,
                passages.join(",")
            )?;
        }
        Ok(())
    }
}

/// Checks that every trail is a closed dart walk in `g` and that no dart is
/// used twice across the family.
pub fn validate_family(g: &Graph, family: &[Vec<Dart>]) -> Result<()> {
    let mut used = vec![false; g.dart_count()];
    for (t, trail) in family.iter().enumerate() {
        if trail.is_empty() {
            return Err(Error::Validation(format!("trail {t} is empty")));
        }
        for (j, &d) in trail.iter().enumerate() {
            if d.0 >= g.dart_count() {
                return Err(Error::Validation(format!(
                    "trail {t}: dart {d} not in graph"
                )));
            }
            if used[d.0] {
                return Err(Error::Validation(format!(
                    "family is not arc-disjoint: dart {}->{} reused by trail {t}",
                    g.tail(d),
                    g.head(d)
                )));
            }
            used[d.0] = true;
            let next = trail[(j + 1) % trail.len()];
            if next.0 >= g.dart_count() || g.head(d) != g.tail(next) {
                return Err(Error::Validation(format!(
                    "trail {t} is not a closed walk at position {j}"
                )));
            }
        }
    }
    Ok(())
}

/// Passages of the family through each vertex: `(rotation source, rotation
/// target, passage)` where source is the dart back along the incoming edge.
fn passages(family: &[Vec<Dart>]) -> impl Iterator<Item = (Dart, Dart, Passage)> + '_ {
    family.iter().enumerate().flat_map(|(t, trail)| {
        (0..trail.len()).map(move |j| {
            let d_in = trail[j];
            let d_out = trail[(j + 1) % trail.len()];
            (d_in.reversed(), d_out, Passage { trail: t, index: j })
        })
    })
}

pub fn tip_digraph(g: &Graph, family: &[Vec<Dart>], center: usize) -> TipDigraph {
    let arcs = passages(family)
        .filter(|&(from, _, _)| g.tail(from) == center)
        .map(|(from, to, passage)| TipArc {
            from_tip: g.head(from),
            to_tip: g.head(to),
            passage,
        })
        .collect();
    TipDigraph { center, arcs }
}

fn reverse_trail(trail: &[Dart]) -> Vec<Dart> {
    trail.iter().rev().map(|d| d.reversed()).collect()
}

fn mutually_reverse(a: &[Dart], b: &[Dart]) -> bool {
    a.len() == b.len() && canonical_rotation(&reverse_trail(a)) == canonical_rotation(b)
}

/// Every blossom of the family, one per auxiliary cycle. Since tip digraphs
/// are partial injections their cycles are disjoint, so this lists all of
/// them.
pub fn find_blossoms(g: &Graph, family: &[Vec<Dart>]) -> Result<BlossomReport> {
    validate_family(g, family)?;
    let n = g.dart_count();
    let mut succ = vec![NONE; n];
    let mut label = vec![Passage { trail: 0, index: 0 }; n];
    let mut has_pred = vec![false; n];
    for (from, to, passage) in passages(family) {
        succ[from.0] = to.0;
        label[from.0] = passage;
        has_pred[to.0] = true;
    }
    // Walk every path from its head first; whatever is left lies on cycles.
    let mut seen = vec![false; n];
    for (start, &pred) in has_pred.iter().enumerate() {
        if pred {
            continue;
        }
        let mut d = start;
        while d != NONE && !seen[d] {
            seen[d] = true;
            d = succ[d];
        }
    }
    let mut blossoms = Vec::new();
    for start in 0..n {
        if seen[start] || succ[start] == NONE {
            continue;
        }
        let mut cycle = Vec::new();
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            cycle.push(label[d]);
            d = succ[d];
        }
        let simple = match cycle.len() {
            0 | 1 => false,
            2 => !mutually_reverse(&family[cycle[0].trail], &family[cycle[1].trail]),
            _ => true,
        };
        blossoms.push(Blossom {
            center: g.tail(Dart(start)),
            passages: cycle,
            simple,
        });
    }
    blossoms.sort_by_key(|b| (b.center, b.passages[0]));
    Ok(BlossomReport { blossoms })
}

/// Outcome of a link attempt in a [`PartialRotation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkError {
    /// The source already has a successor or the target a predecessor.
    Conflict,
    /// The link would close a cycle (a blossom).
    Cycle,
}

/// Partial rotation built from trail passages: a set of vertex-disjoint
/// chains of darts at each vertex. Endpoints of every chain point at each
/// other through `other_end`, so closing a cycle is detected in O(1).
#[derive(Clone, Debug)]
pub struct PartialRotation {
    succ: Vec<usize>,
    pred: Vec<usize>,
    other_end: Vec<usize>,
    undo: Vec<(u8, usize, usize)>,
}

impl PartialRotation {
    pub fn new(g: &Graph) -> Self {
        let n = g.dart_count();
        PartialRotation {
            succ: vec![NONE; n],
            pred: vec![NONE; n],
            other_end: (0..n).collect(),
            undo: Vec::new(),
        }
    }

    fn set(&mut self, which: u8, idx: usize, value: usize) {
        let slot = match which {
            0 => &mut self.succ[idx],
            1 => &mut self.pred[idx],
            _ => &mut self.other_end[idx],
        };
        self.undo.push((which, idx, *slot));
        *slot = value;
    }

    /// Demands that `to` follows `from` (both leave the same vertex).
    pub fn link(&mut self, from: Dart, to: Dart) -> std::result::Result<(), LinkError> {
        let (a, b) = (from.0, to.0);
        if self.succ[a] != NONE || self.pred[b] != NONE {
            return Err(LinkError::Conflict);
        }
        let chain_head = self.other_end[a];
        if chain_head == b {
            return Err(LinkError::Cycle);
        }
        let chain_tail = self.other_end[b];
        self.set(0, a, b);
        self.set(1, b, a);
        self.set(2, chain_head, chain_tail);
        self.set(2, chain_tail, chain_head);
        Ok(())
    }

    /// Adds every passage of `trail`, or none of them.
    pub fn insert_trail(&mut self, trail: &[Dart]) -> std::result::Result<(), LinkError> {
        self.undo.clear();
        for j in 0..trail.len() {
            let from = trail[j].reversed();
            let to = trail[(j + 1) % trail.len()];
            if let Err(e) = self.link(from, to) {
                while let Some((which, idx, old)) = self.undo.pop() {
                    match which {
                        0 => self.succ[idx] = old,
                        1 => self.pred[idx] = old,
                        _ => self.other_end[idx] = old,
                    }
                }
                return Err(e);
            }
        }
        self.undo.clear();
        Ok(())
    }

    /// Closes the chains at each vertex into one cycle, ordering chains by
    /// their least dart.
    pub fn complete(&self, g: &Graph) -> Result<RotationSystem> {
        let mut next = vec![Dart(NONE); g.dart_count()];
        for v in 0..g.n() {
            let mut chains: Vec<(usize, usize, usize)> = Vec::new();
            for &head in g.darts_from(v) {
                if self.pred[head.0] != NONE {
                    continue;
                }
                let mut least = head.0;
                let mut d = head.0;
                while self.succ[d] != NONE {
                    next[d] = Dart(self.succ[d]);
                    d = self.succ[d];
                    least = least.min(d);
                }
                chains.push((least, head.0, d));
            }
            chains.sort_unstable();
            for k in 0..chains.len() {
                let tail = chains[k].2;
                let head = chains[(k + 1) % chains.len()].1;
                next[tail] = Dart(head);
            }
        }
        if next.iter().any(|d| d.0 == NONE) {
            return Err(Error::Internal(
                "partial rotation contains a cycle at completion".into(),
            ));
        }
        RotationSystem::from_successors(g, next)
            .map_err(|e| Error::Internal(format!("completed rotation is invalid: {e}")))
    }
}

/// Result of [`make_blossom_free`]: indices into the input family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlossomFreeSplit {
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
}

/// Greedy feedback-arc removal: trails are inserted in family order and a
/// trail is dropped when one of its passages would close an auxiliary cycle.
pub fn make_blossom_free(g: &Graph, family: &[Vec<Dart>]) -> Result<BlossomFreeSplit> {
    validate_family(g, family)?;
    let mut partial = PartialRotation::new(g);
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for (t, trail) in family.iter().enumerate() {
        match partial.insert_trail(trail) {
            Ok(()) => kept.push(t),
            Err(LinkError::Cycle) => removed.push(t),
            Err(LinkError::Conflict) => {
                return Err(Error::Internal(
                    "passage conflict in a validated arc-disjoint family".into(),
                ))
            }
        }
    }
    Ok(BlossomFreeSplit { kept, removed })
}

/// A rotation system in which every trail of the blossom-free family is a
/// face. Unconstrained positions are filled by chaining in least-dart order.
pub fn assemble_rotation(g: &Graph, family: &[Vec<Dart>]) -> Result<RotationSystem> {
    let report = find_blossoms(g, family)?;
    if let Some(b) = report.blossoms.first() {
        return Err(Error::Validation(format!(
            "family has {} blossom(s), e.g. length {} at vertex {}",
            report.blossoms.len(),
            b.length(),
            b.center
        )));
    }
    let mut partial = PartialRotation::new(g);
    for trail in family {
        partial
            .insert_trail(trail)
            .map_err(|e| Error::Internal(format!("validated family failed to insert: {e:?}")))?;
    }
    let rot = partial.complete(g)?;
    let faces = trace_faces(g, &rot)?;
    if let Some(t) = family.iter().position(|t| !faces.contains_cycle(t)) {
        return Err(Error::Internal(format!(
            "trail {t} is not a face of the assembled rotation"
        )));
    }
    Ok(rot)
}

/// Writes the report as `key=value` lines.
pub fn write_blossom_report<W: Write>(report: &BlossomReport, mut w: W) -> Result<()> {
    writeln!(w, "{report}")?;
    Ok(())
}
