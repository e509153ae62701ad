//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts; tolerances are fixed and not tuned to the observed numbers.
//!
//! Run with `cargo test -p bigenus --test acceptance -- --nocapture` to see
//! the lines.

mod common;

use std::time::{Duration, Instant};

use bigenus::bigraph::{gen_random_bipartite, orient_randomly};
use bigenus::blossom::{find_blossoms, make_blossom_free, tip_digraph};
use bigenus::embedding::trace_faces;
use bigenus::estimator::{
    estimate_genus, prune_leaves, psi, reduce_small_part, small_p_asymptote_check,
    small_part_exact_genus,
};
use bigenus::oracle::{
    exact_genus, genus_formula_reference, rotation_count, FormulaKind, SearchBudget,
};
use bigenus::trails::{count_short_closed_trails, enumerate_closed_trails};
use bigenus::{BipartiteGraph, Dart, EstimateConfig, GenParams, Graph, RotationSystem};
use common::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(criterion: u32, ok: bool, detail: &str) {
    println!(
        "{} criterion {criterion}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn bipartite(n1: usize, n2: usize, p: f64, seed: u64) -> BipartiteGraph {
    gen_random_bipartite(&GenParams::new(n1, n2, p, seed, 1).unwrap()).unwrap()
}

#[test]
fn criterion_1_oracle_ground_truth() {
    let budget = SearchBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();

    for k in 0..50 {
        let n = 1 + k % 12;
        let t = random_tree(&mut rng, n);
        if exact_genus(&t, &budget).unwrap() != 0 {
            failures.push(format!("tree #{k} on {n} vertices"));
        }
    }
    for n in 3..=12 {
        if exact_genus(&Graph::cycle(n).unwrap(), &budget).unwrap() != 0 {
            failures.push(format!("C{n}"));
        }
    }

    let timed = |g: &Graph| {
        let t = Instant::now();
        let genus = exact_genus(g, &budget).unwrap();
        (genus, t.elapsed())
    };
    let k33 = BipartiteGraph::complete(3, 3).graph().clone();
    let k5 = Graph::complete(5);
    let k44 = BipartiteGraph::complete(4, 4).graph().clone();
    let (g33, t33) = timed(&k33);
    let (g5, t5) = timed(&k5);
    let (g44, t44) = timed(&k44);
    let m = 5u64;
    let k5_closed_form = ((m - 3) * (m - 4)).div_ceil(12);

    let checks = [
        (rotation_count(&k33) == 64, "K3,3 has 64 rotation systems"),
        (g33 == 1, "K3,3 genus 1"),
        (t33 < Duration::from_secs(1), "K3,3 under 1 s"),
        (rotation_count(&k5) == 7776, "K5 has 7776 rotation systems"),
        (g5 == 1, "K5 genus 1"),
        (g5 == k5_closed_form, "K5 matches the closed form"),
        (
            genus_formula_reference(FormulaKind::Complete(5)).unwrap() == g5,
            "K5 matches the formula table",
        ),
        (t5 < Duration::from_secs(1), "K5 under 1 s"),
        (
            rotation_count(&k44) == 1_679_616,
            "K4,4 has 6^8 rotation systems",
        ),
        (g44 == 1, "K4,4 genus 1"),
        (t44 < Duration::from_secs(120), "K4,4 under 2 min"),
    ];
    failures.extend(
        checks
            .iter()
            .filter(|(ok, _)| !ok)
            .map(|(_, what)| what.to_string()),
    );
    verdict(
        1,
        failures.is_empty(),
        &format!(
            "trees/cycles 0, K3,3={g33} ({t33:?}), K5={g5} ({t5:?}), K4,4={g44} ({t44:?}); failures {failures:?}"
        ),
    );
}

#[test]
fn criterion_2_face_tracing_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0usize;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=9);
        let m = rng.gen_range(0..=12);
        let g = random_graph(&mut rng, n, m);
        let rot = RotationSystem::random(&g, &mut rng);
        let faces = trace_faces(&g, &rot).unwrap();

        let mut hits = vec![0usize; g.dart_count()];
        for face in faces.faces() {
            for d in face {
                hits[d.0] += 1;
            }
        }
        let total: usize = faces.lengths().sum();
        if hits.iter().any(|&h| h != 1) || total != 2 * g.m() {
            violations += 1;
            continue;
        }

        let comp = component_ids(&g);
        let mut n_c = vec![0i64; g.n()];
        let mut e_c = vec![0i64; g.n()];
        let mut f_c = vec![0i64; g.n()];
        for v in 0..g.n() {
            n_c[comp[v]] += 1;
        }
        for &(u, _) in g.edges() {
            e_c[comp[u]] += 1;
        }
        for face in faces.faces() {
            f_c[comp[g.tail(face[0])]] += 1;
        }
        let mut genus = 0i64;
        for c in 0..g.n() {
            if e_c[c] == 0 {
                continue;
            }
            let twice = 2 - n_c[c] + e_c[c] - f_c[c];
            if twice < 0 || twice % 2 != 0 {
                violations += 1;
            }
            genus += twice / 2;
        }
        if bigenus::embedding::genus_of_embedding(&g, &rot).unwrap() as i64 != genus {
            violations += 1;
        }
    }
    verdict(
        2,
        violations == 0,
        &format!("1000 random embeddings, {violations} violations"),
    );
}

#[test]
fn criterion_3_realization() {
    let sizes = [20usize, 40, 80];
    let probs = [0.3, 0.5];
    let mut violations = 0usize;
    let mut trails_checked = 0usize;
    for run in 0..200u64 {
        let combo = (run % 6) as usize;
        let (n, p) = (sizes[combo / 2], probs[combo % 2]);
        let seed = run / 6;
        let g = bipartite(n, n, p, seed);
        let out = pipeline(g.graph(), 1, seed);
        let faces = trace_faces(g.graph(), &out.rotation).unwrap();
        for t in &out.kept {
            trails_checked += 1;
            if !is_face(&out.rotation, t) || !faces.contains_cycle(t) {
                violations += 1;
            }
        }
    }
    verdict(
        3,
        violations == 0,
        &format!("200 runs, {trails_checked} surviving trails, {violations} not traced as faces"),
    );
}

#[test]
fn criterion_4_dense_band() {
    let start = Instant::now();
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    for seed in 0..10 {
        let g = bipartite(80, 80, 0.5, seed);
        let cfg = EstimateConfig {
            seed,
            p: Some(0.5),
            ..EstimateConfig::default()
        };
        let est = estimate_genus(&g, 1, &cfg).unwrap();
        lowers.push(est.lower);
        uppers.push(est.upper.expect("no truncation at this size"));
    }
    let elapsed = start.elapsed();
    let lower_ok = lowers.iter().all(|&l| l >= 680);
    let upper_hits = uppers.iter().filter(|&&u| u <= 1000).count();
    let ok = lower_ok && upper_hits >= 8 && elapsed < Duration::from_secs(600);
    verdict(
        4,
        ok,
        &format!("lower {lowers:?} (>= 680 each), upper {uppers:?} ({upper_hits}/10 <= 1000), {elapsed:?}"),
    );
}

#[test]
fn criterion_5_matching_quality() {
    let mut coverages = Vec::new();
    let mut in_band = Vec::new();
    for seed in 0..10 {
        let g = bipartite(80, 80, 0.5, seed);
        let cfg = EstimateConfig {
            seed,
            p: Some(0.5),
            check_conditions: true,
            ..EstimateConfig::default()
        };
        let est = estimate_genus(&g, 1, &cfg).unwrap();
        let cond = est.diagnostics.conditions.expect("conditions requested");
        assert!((cond.delta - 0.2).abs() < 1e-12);
        coverages.push(est.diagnostics.coverage);
        in_band.push(cond.in_band_fraction);
    }
    let coverage_ok = coverages.iter().all(|&c| c >= 0.75);
    let band_ok = in_band.iter().all(|&f| f >= 0.9);
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    verdict(
        5,
        coverage_ok && band_ok,
        &format!(
            "coverage [{}] (>= 0.75: {coverage_ok}); arcs within (1 +- 0.2) Delta [{}] (>= 0.9: {band_ok})",
            fmt(&coverages),
            fmt(&in_band)
        ),
    );
}

#[test]
fn criterion_6_psi_formulas() {
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let p = k as f64 / 21.0;
        let expected = p * p / 3.0;
        worst = worst.max(((psi(p, 3) - expected) / expected).abs());
    }
    let exact = psi(0.5, 4);
    let ratio = small_p_asymptote_check(1_000_000, 6, 0.01).ratio().unwrap();
    let ok = worst <= 1e-12 && exact == 0.1875 && (ratio - 1.0).abs() <= 0.05;
    verdict(
        6,
        ok,
        &format!(
            "psi(p,3) worst rel err {worst:.1e}, psi(0.5,4) = {exact}, asymptote ratio {ratio:.4}"
        ),
    );
}

#[test]
fn criterion_7_small_part_regimes() {
    let start = Instant::now();
    let n1 = 100_000usize;
    let budget = SearchBudget::default();

    let p_b = (n1 as f64).powf(-0.4);
    let mut b_hits = 0;
    let mut b_notes = Vec::new();
    for seed in 0..10 {
        let g = bipartite(n1, 5, p_b, seed);
        let r = reduce_small_part(&g).unwrap();
        let k5 = r.support().len() == 5 && r.is_complete_on_support();
        let genera = small_part_exact_genus(&r).ok();
        if k5 && r.kept.is_empty() && genera == Some((1, 1)) {
            b_hits += 1;
        }
        b_notes.push(format!("s{seed}:K5={k5},deg3+={}", r.kept.len()));
    }

    let p_c = (n1 as f64).powf(-0.6);
    let mut c_hits = 0;
    let mut c_notes = Vec::new();
    for seed in 0..10 {
        let g = bipartite(n1, 5, p_c, seed);
        let max_x = g
            .x_vertices()
            .map(|x| g.graph().degree(x))
            .max()
            .unwrap_or(0);
        let genus = exact_genus(&prune_leaves(g.graph()), &budget).unwrap();
        if max_x <= 1 && genus == 0 {
            c_hits += 1;
        }
        c_notes.push(format!("s{seed}:maxdeg={max_x},g={genus}"));
    }
    let elapsed = start.elapsed();
    let ok = b_hits >= 9 && c_hits >= 9 && elapsed < Duration::from_secs(120);
    verdict(
        7,
        ok,
        &format!(
            "p=n1^-0.4: {b_hits}/10 [{}]; p=n1^-0.6: {c_hits}/10 [{}]; {elapsed:?}",
            b_notes.join(" "),
            c_notes.join(" ")
        ),
    );
}

#[test]
fn criterion_8_short_trail_counter() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = Vec::new();
    let mut total = 0u64;
    for k in 0..100 {
        let n = rng.gen_range(4..=10);
        let m = rng.gen_range(0..=20);
        let g = random_graph(&mut rng, n, m);
        let i = 1 + k % 3;
        let got = count_short_closed_trails(&g, i).unwrap();
        let want = brute_short_trails(&g, i);
        total += want;
        if got != want {
            mismatches.push((k, got, want));
        }
    }
    verdict(
        8,
        mismatches.is_empty(),
        &format!("100 graphs, {total} trails in total, mismatches {mismatches:?}"),
    );
}

/// Darts of a walk given by its vertex sequence (closed implicitly).
fn walk_darts(g: &Graph, vs: &[usize]) -> Vec<Dart> {
    (0..vs.len())
        .map(|j| g.dart_between(vs[j], vs[(j + 1) % vs.len()]).unwrap())
        .collect()
}

fn random_family(rng: &mut ChaCha8Rng) -> (Graph, Vec<Vec<Dart>>) {
    let n = rng.gen_range(3..=8);
    let p = rng.gen_range(0.3..0.95);
    let g = bipartite(n, n, p, rng.gen());
    let graph = g.graph().clone();
    let d = orient_randomly(&graph, rng.gen());
    let d_rev = d.reverse();
    let i = rng.gen_range(1..=2);
    let mut pool: Vec<Vec<Dart>> = Vec::new();
    for dg in [&d, &d_rev] {
        let found = enumerate_closed_trails(dg, i, Some(5000)).unwrap();
        pool.extend(found.trails.iter().map(|t| t.darts(dg).unwrap()));
    }
    pool.shuffle(rng);
    let mut used = vec![false; graph.dart_count()];
    let mut family = Vec::new();
    for t in pool {
        if t.iter().all(|d| !used[d.0]) {
            for d in &t {
                used[d.0] = true;
            }
            family.push(t);
        }
    }
    (graph, family)
}

#[test]
fn criterion_9_blossom_machinery() {
    let mut problems = Vec::new();

    // v = 0, a = 1, b = 2, u = 3, w = 4.
    let g = Graph::new(5, [(0, 2), (2, 3), (3, 1), (1, 0), (1, 4), (4, 2)]).unwrap();
    let c1 = walk_darts(&g, &[0, 2, 3, 1]);
    let c2 = walk_darts(&g, &[0, 1, 4, 2]);
    let report = find_blossoms(&g, &[c1, c2]).unwrap();
    let at_v: Vec<_> = report.blossoms.iter().filter(|b| b.center == 0).collect();
    if !(at_v.len() == 1 && at_v[0].length() == 2 && at_v[0].simple) {
        problems.push(format!("simple length-2 blossom misreported: {report}"));
    }

    let c4 = Graph::cycle(4).unwrap();
    let t = walk_darts(&c4, &[0, 1, 2, 3]);
    let t_rev: Vec<Dart> = t.iter().rev().map(|d| d.reversed()).collect();
    let pair = [t, t_rev];
    let report = find_blossoms(&c4, &pair).unwrap();
    let centers: Vec<usize> = report.blossoms.iter().map(|b| b.center).collect();
    if centers != [0, 1, 2, 3] || report.blossoms.iter().any(|b| b.simple || b.length() != 2) {
        problems.push(format!("T with its reverse misreported: {report}"));
    }
    if make_blossom_free(&c4, &pair).unwrap().removed.len() != 1 {
        problems.push("T with its reverse should lose exactly one trail".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0usize;
    let mut removed_total = 0usize;
    let mut with_blossoms = 0usize;
    for _ in 0..500 {
        let (g, family) = random_family(&mut rng);
        if !find_blossoms(&g, &family).unwrap().is_blossom_free() {
            with_blossoms += 1;
        }
        let split = make_blossom_free(&g, &family).unwrap();
        removed_total += split.removed.len();
        let kept: Vec<Vec<Dart>> = split.kept.iter().map(|&t| family[t].clone()).collect();
        let clean = find_blossoms(&g, &kept).unwrap().is_blossom_free();
        let acyclic = !has_directed_cycle(g.dart_count(), &passage_arcs(&kept));
        let tips_acyclic = (0..g.n()).all(|v| {
            let tips = tip_digraph(&g, &kept, v);
            let arcs: Vec<(usize, usize)> =
                tips.arcs.iter().map(|a| (a.from_tip, a.to_tip)).collect();
            !has_directed_cycle(g.n(), &arcs)
        });
        if !(clean && acyclic && tips_acyclic)
            || split.kept.len() + split.removed.len() != family.len()
        {
            violations += 1;
        }
    }
    if violations > 0 {
        problems.push(format!(
            "{violations} of 500 cleaned families still had blossoms"
        ));
    }
    verdict(
        9,
        problems.is_empty(),
        &format!(
            "constructed instances classified; 500 families ({with_blossoms} with blossoms, {removed_total} trails removed), problems {problems:?}"
        ),
    );
}
