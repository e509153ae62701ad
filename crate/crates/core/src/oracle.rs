//! Ground-truth genus for small graphs.
//!
//! [`exact_genus`] enumerates every rotation system with the first dart at
//! each vertex fixed, so a vertex of degree `d` contributes `(d-1)!` cyclic
//! orders. Components are searched independently since genus is additive
//! over them. [`heuristic_genus_upper`] hill-climbs over adjacent swaps.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bigraph::{Dart, Graph};
use crate::embedding::{genus_of_embedding, RotationSystem};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBudget {
    /// Most rotation systems the exhaustive search may visit.
    pub max_rotations: u64,
    /// Wall-clock limit for either search.
    pub max_seconds: f64,
    pub restarts: usize,
    /// Hill-climbing moves per restart; `None` scales with the graph.
    pub steps_per_restart: Option<usize>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_rotations: 10_000_000,
            max_seconds: 600.0,
            restarts: 20,
            steps_per_restart: None,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_rotations == 0 || self.restarts == 0 || self.steps_per_restart == Some(0) {
            return Err(Error::InvalidParams(
                "search budgets must be positive".into(),
            ));
        }
        if self.max_seconds.is_nan() || self.max_seconds <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "max_seconds = {} must be positive",
                self.max_seconds
            )));
        }
        Ok(())
    }

    fn deadline(&self) -> Instant {
        Instant::now() + Duration::from_secs_f64(self.max_seconds.min(1e9))
    }

    fn time_guard(&self) -> Error {
        Error::ResourceGuard {
            what: "oracle wall-clock seconds".into(),
            limit: self.max_seconds.ceil() as u64,
        }
    }
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).fold(1u128, |acc, x| acc.saturating_mul(x))
}

/// Number of rotation systems, `prod_v (deg(v) - 1)!` (saturating).
pub fn rotation_count(g: &Graph) -> u128 {
    (0..g.n())
        .filter(|&v| g.degree(v) > 0)
        .fold(1u128, |acc, v| {
            acc.saturating_mul(factorial(g.degree(v) - 1))
        })
}

/// Rotation systems the exhaustive search visits: components are searched
/// independently, so this is `sum_c prod_{v in c} (deg(v) - 1)!` over
/// components with edges.
pub fn search_size(g: &Graph) -> u128 {
    let comps = g.components();
    let mut per = vec![1u128; comps.count()];
    for v in 0..g.n() {
        let d = g.degree(v);
        if d > 0 {
            let c = comps.of_vertex[v];
            per[c] = per[c].saturating_mul(factorial(d - 1));
        }
    }
    (0..comps.count())
        .filter(|&c| comps.edges[c] > 0)
        .map(|c| per[c])
        .fold(0u128, |a, b| a.saturating_add(b))
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

fn is_bipartite(g: &Graph, vertices: &[usize]) -> bool {
    let mut side = vec![u8::MAX; g.n()];
    for &s in vertices {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for u in g.neighbors(v) {
                if side[u] == u8::MAX {
                    side[u] = 1 - side[v];
                    stack.push(u);
                } else if side[u] == side[v] {
                    return false;
                }
            }
        }
    }
    true
}

/// Search space of one connected component.
struct Component {
    darts: Vec<usize>,
    n: i64,
    e: i64,
    lower: i64,
    /// Per vertex with a choice: every cyclic order as `(dart, successor)`.
    orders: Vec<Vec<Vec<(usize, usize)>>>,
    total: u64,
}

impl Component {
    fn new(g: &Graph, vertices: &[usize]) -> Self {
        let mut darts = Vec::new();
        let mut orders = Vec::new();
        let mut total = 1u64;
        let mut e2 = 0i64;
        for &v in vertices {
            let out: Vec<usize> = g.darts_from(v).iter().map(|d| d.0).collect();
            darts.extend(&out);
            e2 += out.len() as i64;
            if out.len() < 3 {
                continue;
            }
            let mut perm: Vec<usize> = (1..out.len()).collect();
            let mut list = Vec::new();
            loop {
                let cyc: Vec<usize> = std::iter::once(out[0])
                    .chain(perm.iter().map(|&k| out[k]))
                    .collect();
                list.push(
                    (0..cyc.len())
                        .map(|j| (cyc[j], cyc[(j + 1) % cyc.len()]))
                        .collect(),
                );
                if !next_permutation(&mut perm) {
                    break;
                }
            }
            total = total.saturating_mul(list.len() as u64);
            orders.push(list);
        }
        let (n, e) = (vertices.len() as i64, e2 / 2);
        let m = if is_bipartite(g, vertices) { 4 } else { 3 };
        let lower = if e < n {
            0
        } else {
            (-(-(e * (m - 2) - m * (n - 2))).div_euclid(2 * m)).max(0)
        };
        Component {
            darts,
            n,
            e,
            lower,
            orders,
            total,
        }
    }

    fn genus(&self, faces: i64) -> i64 {
        (2 - self.n + self.e - faces) / 2
    }

    fn apply(&self, next: &mut [usize], digit: usize, choice: usize) {
        for &(d, s) in &self.orders[digit][choice] {
            next[d] = s;
        }
    }

    fn count_faces(&self, next: &[usize], seen: &mut [u64], stamp: u64) -> i64 {
        let mut faces = 0;
        for &start in &self.darts {
            if seen[start] == stamp {
                continue;
            }
            faces += 1;
            let mut d = start;
            while seen[d] != stamp {
                seen[d] = stamp;
                d = next[d ^ 1];
            }
        }
        faces
    }

    /// Best `(faces, index)` over `start..end`, stopping past `hit` once a
    /// lower-bound embedding is known at that index.
    fn scan(
        &self,
        base: &[usize],
        start: u64,
        end: u64,
        hit: &AtomicU64,
        deadline: Instant,
    ) -> Result<(i64, u64)> {
        let mut next = base.to_vec();
        let mut digits = vec![0usize; self.orders.len()];
        let mut rest = start;
        for (k, list) in self.orders.iter().enumerate() {
            digits[k] = (rest % list.len() as u64) as usize;
            rest /= list.len() as u64;
            self.apply(&mut next, k, digits[k]);
        }
        let mut seen = vec![0u64; base.len()];
        let target_faces = 2 - self.n + self.e - 2 * self.lower;
        let mut best = (i64::MIN, start);
        for idx in start..end {
            if idx & 0xfff == 0 && Instant::now() > deadline {
                return Err(Error::ResourceGuard {
                    what: "oracle wall-clock seconds".into(),
                    limit: 0,
                });
            }
            if idx > hit.load(Ordering::Relaxed) {
                break;
            }
            let f = self.count_faces(&next, &mut seen, idx + 1);
            if f > best.0 {
                best = (f, idx);
                if f == target_faces {
                    hit.fetch_min(idx, Ordering::Relaxed);
                    break;
                }
            }
            for (k, digit) in digits.iter_mut().enumerate() {
                *digit += 1;
                if *digit == self.orders[k].len() {
                    *digit = 0;
                    self.apply(&mut next, k, 0);
                } else {
                    self.apply(&mut next, k, *digit);
                    break;
                }
            }
        }
        Ok(best)
    }

    fn write_choice(&self, next: &mut [usize], mut idx: u64) {
        for (k, list) in self.orders.iter().enumerate() {
            self.apply(next, k, (idx % list.len() as u64) as usize);
            idx /= list.len() as u64;
        }
    }
}

/// Exact genus with a minimum-genus rotation system as witness.
pub fn exact_genus_with_witness(g: &Graph, budget: &SearchBudget) -> Result<(u64, RotationSystem)> {
    budget.validate()?;
    let needed = search_size(g);
    if needed > budget.max_rotations as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: budget.max_rotations,
        });
    }
    let deadline = budget.deadline();
    let least = RotationSystem::least_label(g);
    let mut next: Vec<usize> = (0..g.dart_count()).map(|d| least.next(Dart(d)).0).collect();
    let comps = g.components();
    let mut members = vec![Vec::new(); comps.count()];
    for v in 0..g.n() {
        members[comps.of_vertex[v]].push(v);
    }
    let mut genus = 0u64;
    for (c, vertices) in members.iter().enumerate() {
        if comps.edges[c] == 0 || comps.is_tree(c) {
            continue;
        }
        let comp = Component::new(g, vertices);
        let hit = AtomicU64::new(u64::MAX);
        let workers = rayon::current_num_threads() as u64 * 8;
        let chunk = (comp.total / workers).max(4096);
        let starts: Vec<u64> = (0..comp.total).step_by(chunk as usize).collect();
        let results: Vec<(i64, u64)> = starts
            .par_iter()
            .map(|&s| comp.scan(&next, s, (s + chunk).min(comp.total), &hit, deadline))
            .collect::<Result<_>>()
            .map_err(|_| budget.time_guard())?;
        let (faces, idx) = results
            .into_iter()
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
            .ok_or_else(|| Error::Internal("empty search space".into()))?;
        comp.write_choice(&mut next, idx);
        let gc = comp.genus(faces);
        if gc < comp.lower {
            return Err(Error::Internal(format!(
                "genus {gc} below Euler bound {}",
                comp.lower
            )));
        }
        genus += gc as u64;
    }
    let rot = RotationSystem::from_successors(g, next.into_iter().map(Dart).collect())?;
    debug_assert_eq!(genus_of_embedding(g, &rot).ok(), Some(genus));
    Ok((genus, rot))
}

/// Minimum genus over all rotation systems. Refuses with
/// [`Error::BudgetExceeded`] rather than guessing when the space is too big.
pub fn exact_genus(g: &Graph, budget: &SearchBudget) -> Result<u64> {
    exact_genus_with_witness(g, budget).map(|(genus, _)| genus)
}

/// Best genus found by hill climbing from random rotations, with the
/// rotation achieving it. Moves swap two cyclically adjacent darts at one
/// vertex; equal-genus moves are accepted to cross plateaus.
pub fn heuristic_genus_upper(
    g: &Graph,
    budget: &SearchBudget,
    seed: u64,
) -> Result<(u64, RotationSystem)> {
    budget.validate()?;
    let deadline = budget.deadline();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choice: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) >= 3).collect();
    let target = crate::estimator::euler_lower_bound(g, 3)?;
    let steps = budget
        .steps_per_restart
        .unwrap_or_else(|| (200 * g.dart_count()).max(2000));

    let mut best: Option<(u64, RotationSystem)> = None;
    for _ in 0..budget.restarts {
        let mut orders: Vec<Vec<Dart>> = (0..g.n())
            .map(|v| {
                let mut o = g.darts_from(v).to_vec();
                o.shuffle(&mut rng);
                o
            })
            .collect();
        let mut rot = RotationSystem::from_dart_orders_unchecked(g, &orders);
        let mut current = genus_of_embedding(g, &rot)?;
        for step in 0..steps {
            if current <= target || choice.is_empty() {
                break;
            }
            if step & 0xff == 0 && Instant::now() > deadline {
                break;
            }
            let v = choice[rng.gen_range(0..choice.len())];
            let k = rng.gen_range(0..orders[v].len());
            let k2 = (k + 1) % orders[v].len();
            orders[v].swap(k, k2);
            let candidate = RotationSystem::from_dart_orders_unchecked(g, &orders);
            let genus = genus_of_embedding(g, &candidate)?;
            if genus <= current {
                current = genus;
                rot = candidate;
            } else {
                orders[v].swap(k, k2);
            }
        }
        if best.as_ref().is_none_or(|(b, _)| current < *b) {
            best = Some((current, rot));
        }
        if current <= target || Instant::now() > deadline {
            break;
        }
    }
    best.ok_or_else(|| Error::Internal("no restart ran".into()))
}

/// Graph families with a known genus formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaKind {
    /// `K_n`: `ceil((n-3)(n-4)/12)`.
    Complete(usize),
    /// `K_{m,n}`: `ceil((m-2)(n-2)/4)`, from the literature on quadrilateral
    /// embeddings rather than derived here.
    CompleteBipartite(usize, usize),
}

impl std::str::FromStr for FormulaKind {
    type Err = Error;

    /// `complete:7` or `complete-bipartite:4,4`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("unknown formula kind {s:?}"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<usize> = args
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (kind, nums.as_slice()) {
            ("complete", &[n]) => Ok(FormulaKind::Complete(n)),
            ("complete-bipartite", &[m, n]) => Ok(FormulaKind::CompleteBipartite(m, n)),
            _ => Err(bad()),
        }
    }
}

pub fn genus_formula_reference(kind: FormulaKind) -> Result<u64> {
    match kind {
        FormulaKind::Complete(0)
        | FormulaKind::CompleteBipartite(0, _)
        | FormulaKind::CompleteBipartite(_, 0) => Err(Error::InvalidParams(
            "formula needs non-empty vertex sets".into(),
        )),
        FormulaKind::Complete(n) if n <= 4 => Ok(0),
        FormulaKind::Complete(n) => Ok((((n - 3) * (n - 4)) as u64).div_ceil(12)),
        FormulaKind::CompleteBipartite(m, n) if m <= 2 || n <= 2 => Ok(0),
        FormulaKind::CompleteBipartite(m, n) => Ok((((m - 2) * (n - 2)) as u64).div_ceil(4)),
    }
}
