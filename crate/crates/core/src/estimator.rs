//! End-to-end genus estimation, Euler-type lower bounds, the closed-form
//! predictions for each density regime, and the reduction used when one
//! side of the bipartition is small.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use crate::bigraph::{orient_randomly, BipartiteGraph, Dart, Graph};
use crate::blossom::{assemble_rotation, make_blossom_free, PartialRotation};
use crate::embedding::{
    face_length_histogram, genus_from_faces, is_near_kgon, trace_faces, NearKgonReport,
    RotationSystem,
};
use crate::error::{Error, Result};
use crate::trails::{
    build_trail_hypergraph, check_matching_conditions, find_disjoint_mirror_matching_with,
    find_matching, short_closed_trails_by_edge, theoretical_delta, ConditionReport, Strategy,
    SHORT_TRAIL_STEP_CAP,
};

/// Version of the CSV layout produced by [`GenusEstimate::csv_row`].
pub const CSV_SCHEMA: u32 = 1;

/// Width, as a multiplicative factor on `p`, of the band around a regime
/// boundary inside which a classification is flagged critical.
pub const CRITICAL_FACTOR: f64 = 3.0;

/// Default cap on enumerated trails per hypergraph.
pub const DEFAULT_TRAIL_CAP: usize = 2_000_000;

/// Largest `i` for which the refined bound uses `i` as given. Beyond it,
/// faces of length `<= 2i` need not be closed trails, so `i` is clamped.
pub const REFINED_MAX_I: usize = 4;

/// Which asymptotic formula governs `(n1, n2, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `p >> n2^{-2/3}`: near 4-gon embeddings.
    Dense4gon,
    /// `(n1 n2)^{-i/(2i+1)} << p << (n1 n2)^{-(i-1)/(2i-1)}`.
    Balanced(usize),
    /// Small `n2`, `p >> n1^{-1/3}`.
    SmallPartA,
    /// Small `n2`, `n1^{-1/2} << p << n1^{-1/3}`.
    SmallPartB,
    /// Small `n2`, `p << n1^{-1/2}`.
    SmallPartC,
    /// `p <= (n1 n2)^{-1/2}` with both parts large; no formula applies.
    Sparse,
}

impl Regime {
    /// Trail half-length the pipeline should use.
    pub fn trail_i(&self) -> usize {
        match *self {
            Regime::Balanced(i) => i,
            _ => 1,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Dense4gon => write!(f, "dense-4gon"),
            Regime::Balanced(i) => write!(f, "balanced-i({i})"),
            Regime::SmallPartA => write!(f, "small-part-a"),
            Regime::SmallPartB => write!(f, "small-part-b"),
            Regime::SmallPartC => write!(f, "small-part-c"),
            Regime::Sparse => write!(f, "sparse"),
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense-4gon" | "dense" => Ok(Regime::Dense4gon),
            "small-part-a" => Ok(Regime::SmallPartA),
            "small-part-b" => Ok(Regime::SmallPartB),
            "small-part-c" => Ok(Regime::SmallPartC),
            "sparse" => Ok(Regime::Sparse),
            _ => s
                .strip_prefix("balanced-i(")
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| s.strip_prefix("balanced-"))
                .and_then(|i| i.parse().ok())
                .filter(|&i: &usize| i >= 1)
                .map(Regime::Balanced)
                .ok_or_else(|| Error::InvalidParams(format!("unknown regime {s:?}"))),
        }
    }
}

/// A regime plus whether `p` sits within [`CRITICAL_FACTOR`] of one of the
/// boundaries of its window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeInfo {
    pub regime: Regime,
    pub critical: bool,
}

impl fmt::Display for RegimeInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.critical {
            write!(f, "{} (critical-window)", self.regime)
        } else {
            write!(f, "{}", self.regime)
        }
    }
}

/// `n2` up to which the bipartite graph counts as having a small part,
/// provided `n1 >= SMALL_PART_RATIO * n2`.
pub const SMALL_PART_MAX: usize = 20;
pub const SMALL_PART_RATIO: usize = 100;

fn near(p: f64, boundary: f64) -> bool {
    boundary > 0.0 && p < boundary * CRITICAL_FACTOR && p > boundary / CRITICAL_FACTOR
}

pub fn regime_classify(n1: usize, n2: usize, p: f64) -> Result<RegimeInfo> {
    if n2 == 0 || n1 < n2 {
        return Err(Error::InvalidParams(format!(
            "need n1 >= n2 >= 1, got {n1}, {n2}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("p = {p} outside [0, 1]")));
    }
    let (f1, f2) = (n1 as f64, n2 as f64);
    if n2 <= SMALL_PART_MAX && n1 >= SMALL_PART_RATIO * n2 {
        let (b3, b2) = (f1.powf(-1.0 / 3.0), f1.powf(-0.5));
        let regime = if p >= b3 {
            Regime::SmallPartA
        } else if p >= b2 {
            Regime::SmallPartB
        } else {
            Regime::SmallPartC
        };
        return Ok(RegimeInfo {
            regime,
            critical: near(p, b3) || near(p, b2),
        });
    }
    let dense = f2.powf(-2.0 / 3.0);
    if p >= dense {
        return Ok(RegimeInfo {
            regime: Regime::Dense4gon,
            critical: near(p, dense),
        });
    }
    let big_n = f1 * f2;
    if p == 0.0 || p <= big_n.powf(-0.5) {
        return Ok(RegimeInfo {
            regime: Regime::Sparse,
            critical: near(p, big_n.powf(-0.5)),
        });
    }
    let a = -p.ln() / big_n.ln();
    // Window i is ((i-1)/(2i-1), i/(2i+1)) in the exponent a.
    let mut i = 1usize;
    while a >= i as f64 / (2 * i + 1) as f64 {
        i += 1;
    }
    let lower = big_n.powf(-(i as f64) / (2 * i + 1) as f64);
    let upper = big_n.powf(-((i - 1) as f64) / (2 * i - 1) as f64);
    Ok(RegimeInfo {
        regime: Regime::Balanced(i),
        critical: near(p, lower) || (i > 1 && near(p, upper)),
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `sum_{i=2}^{n2-1} (i-1)/(i+1) C(n2-1, i) (-p)^i`.
pub fn psi(p: f64, n2: usize) -> f64 {
    (2..n2)
        .map(|i| (i - 1) as f64 / (i + 1) as f64 * binomial(n2 - 1, i) * (-p).powi(i as i32))
        .sum()
}

fn complete_graph_genera(m: usize) -> (u64, u64) {
    if m <= 4 {
        return (0, 0);
    }
    let num = ((m - 3) * (m - 4)) as u64;
    let orientable = num.div_ceil(12);
    let nonorientable = if m == 7 { 3 } else { num.div_ceil(6) };
    (orientable, nonorientable)
}

/// Orientable genus predicted by the regime's formula.
pub fn predicted_genus(n1: usize, n2: usize, p: f64, regime: Regime) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("p = {p} outside [0, 1]")));
    }
    let pnn = p * n1 as f64 * n2 as f64;
    Ok(match regime {
        Regime::Dense4gon => pnn / 4.0,
        Regime::Balanced(0) => {
            return Err(Error::InvalidParams("balanced regime needs i >= 1".into()))
        }
        Regime::Balanced(i) => i as f64 / (2 * i + 2) as f64 * pnn,
        Regime::SmallPartA => {
            if n2 < 2 {
                return Err(Error::InvalidParams(
                    "small-part formula needs n2 >= 2".into(),
                ));
            }
            pnn * psi(p, n2) / 4.0
        }
        Regime::SmallPartB => complete_graph_genera(n2).0 as f64,
        Regime::SmallPartC | Regime::Sparse => 0.0,
    })
}

/// Non-orientable genus predicted by the regime's formula.
pub fn predicted_nonorientable_genus(n1: usize, n2: usize, p: f64, regime: Regime) -> Result<f64> {
    match regime {
        Regime::SmallPartB => Ok(complete_graph_genera(n2).1 as f64),
        _ => Ok(2.0 * predicted_genus(n1, n2, p, regime)?),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoteCheck {
    /// `n1 n2 p Psi(p, n2) / 4`.
    pub exact: f64,
    /// `n1 p^3 C(n2, 3) / 4`.
    pub asymptote: f64,
}

impl AsymptoteCheck {
    /// `exact / asymptote`, undefined when both vanish.
    pub fn ratio(&self) -> Option<f64> {
        (self.asymptote != 0.0).then(|| self.exact / self.asymptote)
    }
}

pub fn small_p_asymptote_check(n1: usize, n2: usize, p: f64) -> AsymptoteCheck {
    AsymptoteCheck {
        exact: n1 as f64 * n2 as f64 * p * psi(p, n2) / 4.0,
        asymptote: n1 as f64 * p.powi(3) * binomial(n2, 3) / 4.0,
    }
}

/// The graph left after repeatedly deleting edges at vertices of degree 1.
/// Vertex ids are preserved; genus is unchanged.
pub fn prune_leaves(g: &Graph) -> Graph {
    let mut degree: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; g.m()];
    let mut stack: Vec<usize> = (0..g.n()).filter(|&v| degree[v] == 1).collect();
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let d = *g
            .darts_from(v)
            .iter()
            .find(|d| alive[d.edge()])
            .expect("degree 1 vertex has a live edge");
        alive[d.edge()] = false;
        degree[v] = 0;
        let u = g.head(d);
        degree[u] -= 1;
        if degree[u] == 1 {
            stack.push(u);
        }
    }
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(e, _)| alive[e])
        .map(|(_, &uv)| uv);
    Graph::new(g.n(), edges).expect("subgraph of a valid graph")
}

fn ceil_div(num: i128, den: i128) -> i128 {
    -((-num).div_euclid(den))
}

/// Sums `f(n_c, e_c, w_c)` clamped at zero over components that have
/// edges, where `w_c` totals `weight` over the component's edges.
fn per_component(g: &Graph, weight: &[u64], f: impl Fn(i128, i128, i128) -> i128) -> u64 {
    let comps = g.components();
    let mut w = vec![0i128; comps.count()];
    for (e, &(u, _)) in g.edges().iter().enumerate() {
        w[comps.of_vertex[u]] += weight.get(e).copied().unwrap_or(0) as i128;
    }
    (0..comps.count())
        .filter(|&c| comps.edges[c] > 0)
        .map(|c| f(comps.vertices[c] as i128, comps.edges[c] as i128, w[c]).max(0) as u64)
        .sum()
}

fn check_face_len(min_face_len: usize) -> Result<()> {
    if min_face_len < 3 {
        return Err(Error::InvalidParams(format!(
            "min_face_len = {min_face_len} < 3"
        )));
    }
    Ok(())
}

/// `sum_c ceil(e_c (1/2 - 1/m) - (n_c - 2)/2)` over components of the graph
/// with leaves pruned, where `m` is the shortest possible face length.
pub fn euler_lower_bound(g: &Graph, min_face_len: usize) -> Result<u64> {
    check_face_len(min_face_len)?;
    let core = prune_leaves(g);
    let m = min_face_len as i128;
    Ok(per_component(&core, &[], |n, e, _| {
        ceil_div(e * (m - 2) - m * (n - 2), 2 * m)
    }))
}

/// `sum_c ceil(e_c (1 - 2/m) - n_c + 2)`: Euler's formula for non-orientable
/// surfaces on the leaf-pruned graph.
pub fn nonorientable_euler_bound(g: &Graph, min_face_len: usize) -> Result<u64> {
    check_face_len(min_face_len)?;
    let core = prune_leaves(g);
    let m = min_face_len as i128;
    Ok(per_component(&core, &[], |n, e, _| {
        ceil_div(e * (m - 2) - m * (n - 2), m)
    }))
}

/// Lower bound for bipartite graphs that charges faces shorter than `2i + 2`
/// against the closed trails of length `<= 2i`:
/// `ceil((i e - 2(i-1) C - (i+1)(n-2)) / (2i+2))` per component.
///
/// Computed on the leaf-pruned graph, where every face of length at most 8
/// is a closed trail and so each short trail bounds at most two faces; `i`
/// is clamped to [`REFINED_MAX_I`] to stay in that range.
pub fn refined_lower_bound(g: &Graph, i: usize) -> Result<u64> {
    refined_lower_bound_capped(g, i, SHORT_TRAIL_STEP_CAP)
}

pub fn refined_lower_bound_capped(g: &Graph, i: usize, step_cap: u64) -> Result<u64> {
    if i < 1 {
        return Err(Error::InvalidParams("i must be >= 1".into()));
    }
    let i = i.min(REFINED_MAX_I);
    let core = prune_leaves(g);
    let by_edge = short_closed_trails_by_edge(&core, i, step_cap)?;
    let i = i as i128;
    Ok(per_component(&core, &by_edge, |n, e, short| {
        ceil_div(i * e - 2 * (i - 1) * short - (i + 1) * (n - 2), 2 * i + 2)
    }))
}

/// Pipeline knobs.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateConfig {
    pub strategy: Strategy,
    pub seed: u64,
    /// Cap on trails per hypergraph; `None` means unlimited.
    pub trail_cap: Option<usize>,
    /// Edge probability for the prediction; defaults to `|E| / (n1 n2)`.
    pub p: Option<f64>,
    /// Band used for the near-`(2i+2)`-gon diagnostic.
    pub eps: f64,
    /// Also measure the hypergraph degree/codegree conditions.
    pub check_conditions: bool,
    /// Reject mirror trails that would close a blossom with those already
    /// chosen, instead of only discarding blossoms afterwards. On by
    /// default: it keeps more prescribed faces.
    pub blossom_aware_mirror: bool,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            strategy: Strategy::GreedyRandom,
            seed: 0,
            trail_cap: Some(DEFAULT_TRAIL_CAP),
            p: None,
            eps: 0.15,
            check_conditions: false,
            blossom_aware_mirror: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub hyperedges: usize,
    pub mirror_hyperedges: usize,
    pub matching_size: usize,
    pub mirror_matching_size: usize,
    /// `d |M| / N` for the matching in `D`.
    pub coverage: f64,
    pub mirror_coverage: f64,
    pub blossoms_removed: usize,
    pub prescribed_faces: usize,
    pub faces: usize,
    pub face_histogram: BTreeMap<usize, usize>,
    pub near_kgon: Option<NearKgonReport>,
    pub conditions: Option<ConditionReport>,
    /// The trail cap cut an enumeration short; `upper` is then omitted.
    pub truncated: bool,
    /// Why the refined bound is missing, if it is.
    pub refined_note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenusEstimate {
    pub n1: usize,
    pub n2: usize,
    pub p: f64,
    pub i: usize,
    pub seed: u64,
    pub edges: usize,
    pub lower: u64,
    pub euler_bound: u64,
    pub refined_bound: Option<u64>,
    /// Genus of the constructed embedding.
    pub upper: Option<u64>,
    pub prediction: f64,
    pub regime: RegimeInfo,
    pub diagnostics: Diagnostics,
}

impl GenusEstimate {
    /// Column names; `p_spec` is how `p` was requested (a literal or an
    /// exponent form), `p` its value.
    pub fn csv_header() -> &'static str {
        "schema,n1,n2,p_spec,p,i,seed,edges,lower,upper,prediction,coverage,blossoms_removed,regime,critical,status"
    }

    pub fn csv_row(&self) -> String {
        self.csv_row_with_spec(&self.p.to_string())
    }

    pub fn csv_row_with_spec(&self, p_spec: &str) -> String {
        let upper = self.upper.map(|u| u.to_string()).unwrap_or_default();
        let status = if self.diagnostics.truncated {
            "truncated"
        } else {
            "ok"
        };
        format!(
            "{CSV_SCHEMA},{},{},{},{},{},{},{},{},{},{:.4},{:.6},{},{},{},{}",
            self.n1,
            self.n2,
            csv_field(p_spec),
            self.p,
            self.i,
            self.seed,
            self.edges,
            self.lower,
            upper,
            self.prediction,
            self.diagnostics.coverage,
            self.diagnostics.blossoms_removed,
            self.regime.regime,
            self.regime.critical,
            status
        )
    }

    /// A row for a run that failed before producing an estimate.
    pub fn csv_error_row(
        n1: usize,
        n2: usize,
        p_spec: &str,
        p: f64,
        i: usize,
        seed: u64,
        err: &Error,
    ) -> String {
        format!(
            "{CSV_SCHEMA},{n1},{n2},{},{p},{i},{seed},,,,,,,,,{}",
            csv_field(p_spec),
            csv_field(&format!("error: {err}"))
        )
    }

    /// Non-orientable genus bounds implied by this estimate.
    pub fn nonorientable_bounds(&self, g: &Graph) -> Result<(u64, Option<u64>)> {
        nonorientable_bounds(g, self)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{self}")?;
        Ok(())
    }
}

impl fmt::Display for GenusEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.diagnostics;
        writeln!(
            f,
            "n1={} n2={} p={} i={} seed={}",
            self.n1, self.n2, self.p, self.i, self.seed
        )?;
        writeln!(f, "edges={}", self.edges)?;
        writeln!(f, "regime={}", self.regime)?;
        writeln!(f, "prediction={:.4}", self.prediction)?;
        writeln!(f, "lower={}", self.lower)?;
        writeln!(f, "euler_bound={}", self.euler_bound)?;
        match (self.refined_bound, &d.refined_note) {
            (Some(r), _) => writeln!(f, "refined_bound={r}")?,
            (None, Some(note)) => writeln!(f, "refined_bound=none ({note})")?,
            (None, None) => writeln!(f, "refined_bound=none")?,
        }
        match self.upper {
            Some(u) => writeln!(f, "upper={u}")?,
            None => writeln!(f, "upper=none (trail enumeration truncated)")?,
        }
        writeln!(
            f,
            "hyperedges={} mirror_hyperedges={}",
            d.hyperedges, d.mirror_hyperedges
        )?;
        writeln!(
            f,
            "matching={} mirror_matching={} coverage={:.4} mirror_coverage={:.4}",
            d.matching_size, d.mirror_matching_size, d.coverage, d.mirror_coverage
        )?;
        writeln!(
            f,
            "blossoms_removed={} prescribed_faces={} faces={}",
            d.blossoms_removed, d.prescribed_faces, d.faces
        )?;
        let hist: Vec<String> = d
            .face_histogram
            .iter()
            .map(|(l, c)| format!("{l}:{c}"))
            .collect();
        write!(f, "face_histogram={}", hist.join(","))?;
        if let Some(k) = &d.near_kgon {
            write!(
                f,
                "\nnear_kgon={} covered={} threshold={:.2}",
                k.holds, k.covered, k.threshold
            )?;
        }
        if let Some(c) = &d.conditions {
            write!(f, "\n{c}")?;
        }
        Ok(())
    }
}

/// Commas and line breaks would break the fixed column layout.
fn csv_field(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Orient at random, match closed `(2i+2)`-trails in `D` and in `D^{-1}`,
/// drop blossoms, assemble the rotation and read off its genus.
pub fn estimate_genus(
    g: &BipartiteGraph,
    i: usize,
    config: &EstimateConfig,
) -> Result<GenusEstimate> {
    estimate_genus_with_rotation(g, i, config).map(|(e, _)| e)
}

/// As [`estimate_genus`], also returning the constructed rotation system
/// (absent when the trail cap truncated enumeration).
pub fn estimate_genus_with_rotation(
    g: &BipartiteGraph,
    i: usize,
    config: &EstimateConfig,
) -> Result<(GenusEstimate, Option<RotationSystem>)> {
    if i < 1 {
        return Err(Error::InvalidParams("i must be >= 1".into()));
    }
    let graph = g.graph();
    let (n1, n2) = (g.n1(), g.n2());
    let p = match config.p {
        Some(p) => p,
        None if n1 * n2 == 0 => 0.0,
        None => graph.m() as f64 / (n1 * n2) as f64,
    };
    let regime = regime_classify(n1, n2, p)?;
    let prediction = predicted_genus(n1, n2, p, regime.regime)?;

    let euler_bound = euler_lower_bound(graph, 4)?;
    let mut diagnostics = Diagnostics::default();
    let refined_bound = match refined_lower_bound(graph, i) {
        Ok(b) => Some(b),
        Err(e) if e.is_guard() => {
            diagnostics.refined_note = Some(e.to_string());
            None
        }
        Err(e) => return Err(e),
    };
    let lower = euler_bound.max(refined_bound.unwrap_or(0));

    let d = orient_randomly(graph, config.seed);
    let d_rev = d.reverse();
    let h = build_trail_hypergraph(&d, i, config.trail_cap)?;
    let h_rev = build_trail_hypergraph(&d_rev, i, config.trail_cap)?;
    diagnostics.hyperedges = h.edge_count();
    diagnostics.mirror_hyperedges = h_rev.edge_count();
    diagnostics.truncated = h.truncated() || h_rev.truncated();
    let mut estimate = GenusEstimate {
        n1,
        n2,
        p,
        i,
        seed: config.seed,
        edges: graph.m(),
        lower,
        euler_bound,
        refined_bound,
        upper: None,
        prediction,
        regime,
        diagnostics,
    };
    if estimate.diagnostics.truncated {
        return Ok((estimate, None));
    }
    let diagnostics = &mut estimate.diagnostics;

    let mut matching = find_matching(&h, config.strategy, mix(config.seed, 1));
    if config.check_conditions {
        let delta = theoretical_delta(n1, n2, p, i);
        if delta > 0.0 {
            matching.conditions = Some(check_matching_conditions(
                &h,
                0.2,
                delta,
                mix(config.seed, 3),
            )?);
        }
    }
    let m = matching.trails(&h);
    let to_darts =
        |trail: &crate::trails::ClosedTrail, dg: &crate::bigraph::Digraph| -> Result<Vec<Dart>> {
            trail
                .darts(dg)
                .ok_or_else(|| Error::Internal("oriented digraph lost its dart map".into()))
        };
    let mut family: Vec<Vec<Dart>> = m.iter().map(|t| to_darts(t, &d)).collect::<Result<_>>()?;

    let mirror = if config.blossom_aware_mirror {
        let mut partial = PartialRotation::new(graph);
        for t in &family {
            partial
                .insert_trail(t)
                .map_err(|e| Error::Internal(format!("matching trail failed to insert: {e:?}")))?;
        }
        let mut veto = |arcs: &[usize]| {
            let darts: Vec<Dart> = arcs
                .iter()
                .map(|&a| d_rev.dart(a).expect("orientation"))
                .collect();
            partial.insert_trail(&darts).is_ok()
        };
        find_disjoint_mirror_matching_with(
            &h_rev,
            &m,
            config.strategy,
            mix(config.seed, 2),
            &mut veto,
        )
    } else {
        find_disjoint_mirror_matching_with(
            &h_rev,
            &m,
            config.strategy,
            mix(config.seed, 2),
            &mut |_| true,
        )
    };
    for t in mirror.trails(&h_rev) {
        family.push(to_darts(&t, &d_rev)?);
    }
    diagnostics.matching_size = matching.size();
    diagnostics.mirror_matching_size = mirror.size();
    diagnostics.coverage = matching.coverage;
    diagnostics.mirror_coverage = mirror.coverage;
    diagnostics.conditions = matching.conditions.take();

    let split = make_blossom_free(graph, &family)?;
    diagnostics.blossoms_removed = split.removed.len();
    let kept: Vec<Vec<Dart>> = split.kept.iter().map(|&t| family[t].clone()).collect();
    diagnostics.prescribed_faces = kept.len();
    let rot = assemble_rotation(graph, &kept)?;
    let faces = trace_faces(graph, &rot)?;
    diagnostics.faces = faces.len();
    diagnostics.face_histogram = face_length_histogram(&faces);
    if graph.m() > 0 && config.eps > 0.0 && config.eps < 1.0 {
        diagnostics.near_kgon = Some(is_near_kgon(graph, &rot, 2 * i + 2, config.eps)?);
    }
    let genus = genus_from_faces(graph, &faces)?;
    if genus < lower {
        return Err(Error::Internal(format!(
            "embedding genus {genus} below lower bound {lower}"
        )));
    }
    estimate.upper = Some(genus);
    Ok((estimate, Some(rot)))
}

/// `(lower, upper)` for the non-orientable genus: Euler's bound with faces of
/// length at least 4, and `2 g + 1` from the orientable embedding.
pub fn nonorientable_bounds(g: &Graph, est: &GenusEstimate) -> Result<(u64, Option<u64>)> {
    let lower = nonorientable_euler_bound(g, 4)?;
    Ok((lower, est.upper.map(|u| 2 * u + 1)))
}

/// Small-part reduction: X-vertices of degree at most 1 are deleted, those of
/// degree 2 are grouped by their Y-pair, and the rest are kept verbatim.
/// Y-vertices are numbered `0..n2` locally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedGraph {
    pub n1: usize,
    pub n2: usize,
    /// X-vertices of degree at most 1.
    pub deleted: Vec<usize>,
    /// Degree-2 X-vertices keyed by their Y-pair `(a, b)`, `a < b`.
    pub parallel: BTreeMap<(usize, usize), Vec<usize>>,
    /// X-vertices of degree at least 3 with their local Y-neighbours.
    pub kept: Vec<(usize, Vec<usize>)>,
}

impl ReducedGraph {
    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        self.parallel.get(&key).map_or(0, Vec::len)
    }

    /// Simple graph on `0..n2` with an edge for every populated Y-pair.
    pub fn y_graph(&self) -> Graph {
        Graph::new(self.n2, self.parallel.keys().copied()).expect("pairs are distinct and ordered")
    }

    /// Y-vertices touched by a populated pair or by a kept X-vertex.
    pub fn support(&self) -> Vec<usize> {
        let mut on = vec![false; self.n2];
        for &(a, b) in self.parallel.keys() {
            on[a] = true;
            on[b] = true;
        }
        for (_, ys) in &self.kept {
            for &y in ys {
                on[y] = true;
            }
        }
        (0..self.n2).filter(|&y| on[y]).collect()
    }

    /// Support of the Y-graph alone is a clique.
    pub fn is_complete_on_support(&self) -> bool {
        let s = self.support();
        self.parallel.len() == s.len() * s.len().saturating_sub(1) / 2
    }

    pub fn max_x_degree_deleted(&self) -> bool {
        self.parallel.is_empty() && self.kept.is_empty()
    }

    /// Additive slack between the genus of [`Self::core_graph`] and that of
    /// the original graph: `C(n2, 2)`.
    pub fn slack(&self) -> u64 {
        (self.n2 * self.n2.saturating_sub(1) / 2) as u64
    }

    /// Y plus the kept X-vertices; Y-vertex `y` is vertex `y`, kept vertex
    /// `k` is vertex `n2 + k`.
    pub fn core_graph(&self) -> Graph {
        let mut edges = Vec::new();
        for (k, (_, ys)) in self.kept.iter().enumerate() {
            edges.extend(ys.iter().map(|&y| (y, self.n2 + k)));
        }
        Graph::new(self.n2 + self.kept.len(), edges).expect("bipartite edges are simple")
    }

    /// [`Self::core_graph`] plus one subdividing vertex per populated Y-pair;
    /// a subgraph of the original graph.
    pub fn support_graph(&self) -> Graph {
        let core = self.core_graph();
        let base = core.n();
        let mut edges = core.edges().to_vec();
        for (j, &(a, b)) in self.parallel.keys().enumerate() {
            edges.push((a, base + j));
            edges.push((b, base + j));
        }
        Graph::new(base + self.parallel.len(), edges).expect("subdivision edges are simple")
    }
}

pub fn reduce_small_part(g: &BipartiteGraph) -> Result<ReducedGraph> {
    if g.n2() > SMALL_PART_MAX {
        return Err(Error::ResourceGuard {
            what: format!("small-part reduction with n2 = {}", g.n2()),
            limit: SMALL_PART_MAX as u64,
        });
    }
    let mut reduced = ReducedGraph {
        n1: g.n1(),
        n2: g.n2(),
        deleted: Vec::new(),
        parallel: BTreeMap::new(),
        kept: Vec::new(),
    };
    for x in g.x_vertices() {
        let ys: Vec<usize> = g.graph().neighbors(x).map(|y| y - g.n1()).collect();
        match ys.len() {
            0 | 1 => reduced.deleted.push(x),
            2 => reduced
                .parallel
                .entry((ys[0].min(ys[1]), ys[0].max(ys[1])))
                .or_default()
                .push(x),
            _ => reduced.kept.push((x, ys)),
        }
    }
    Ok(reduced)
}

/// `(g, g~)` of a subdivided complete graph on the support of `r`; errors if
/// a degree-3 X-vertex survived or the Y-graph is not complete.
pub fn small_part_exact_genus(r: &ReducedGraph) -> Result<(u64, u64)> {
    if !r.kept.is_empty() {
        return Err(Error::Validation(format!(
            "{} X-vertices of degree >= 3 remain; use the general estimator",
            r.kept.len()
        )));
    }
    if !r.is_complete_on_support() {
        return Err(Error::Validation(
            "Y-graph is not complete on its support".into(),
        ));
    }
    Ok(complete_graph_genera(r.support().len()))
}
