//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

#[path = "../../chartforge/tests/common/mod.rs"]
mod common;

use chartforge::catalog::{builtin, builtin_keys, contains_template, figure, nine_graphs};
use chartforge::chart::{build_chart, isomorphic, Chart};
use chartforge::features::gamma_components;
use chartforge::moves::{apply, apply_with_inverse, builtin_templates, find_sites, seed_charts};
use chartforge::regions::{complementary_disks, feelers, find_lenses};
use chartforge::template::{brute_ro_equivalent, realize, ro_canonical, GraphTemplate};
use chartforge::verify::*;
use chartforge::{Dir, VertexKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

const CATALOG_SECS: f64 = 1.0;
const ENUMERATE_SECS: f64 = 60.0;
const PIPELINE_SECS: f64 = 60.0;
const W_TOTAL: usize = 7;
const IO_CASES: usize = 10_000;
const IO_MAX_UNKNOWNS: usize = 12;
const MIN_MOVES: usize = 1_000;
const MAX_VERTICES: usize = 12;

type Outcome = Result<String, String>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn root() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

// 1
fn catalog_fidelity() -> Outcome {
    let start = Instant::now();
    let mut ts: Vec<(String, GraphTemplate)> = Vec::new();
    for (dir, n) in [("fig2", 2), ("fig13", 7), ("fig14", 4), ("fig29", 4)] {
        let f = figure(dir);
        ensure(f.len() == n, || {
            format!("{dir} has {} templates, want {n}", f.len())
        })?;
        ts.extend(f);
    }
    for (k, t) in &ts {
        t.validate().map_err(|e| format!("{k}: {e}"))?;
    }
    let forms: Vec<String> = ts
        .iter()
        .map(|(_, t)| ro_canonical(t).canonical_form)
        .collect();
    let mut pairs = 0;
    for i in 0..ts.len() {
        for j in 0..ts.len() {
            let brute = brute_ro_equivalent(&ts[i].1, &ts[j].1);
            ensure(brute == (forms[i] == forms[j]), || {
                format!("{} vs {}: brute {brute}", ts[i].0, ts[j].0)
            })?;
            ensure(brute == (i == j), || {
                format!("{} and {} are RO-equivalent", ts[i].0, ts[j].0)
            })?;
            pairs += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < CATALOG_SECS, || format!("took {secs:.3} s"))?;
    Ok(format!(
        "{} templates, {pairs} ordered pairs, {secs:.3} s < {CATALOG_SECS} s",
        ts.len()
    ))
}

// 2
fn lemma71() -> Outcome {
    let start = Instant::now();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = chartforge_cli::run_with(
        [
            "chartforge",
            "--json",
            "enumerate",
            "--w",
            "5",
            "--preset",
            "paper",
        ],
        &mut out,
        &mut err,
    );
    let secs = start.elapsed().as_secs_f64();
    ensure(code == 0, || {
        format!("exit {code}: {}", String::from_utf8_lossy(&err))
    })?;
    let v: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let got: Vec<String> = v["classes"]
        .as_array()
        .ok_or("no classes")?
        .iter()
        .map(|c| c["canonical_form"].as_str().unwrap_or("").to_string())
        .collect();
    let got_set: BTreeSet<String> = got.iter().cloned().collect();
    let want: BTreeSet<String> = nine_graphs()
        .iter()
        .map(|(_, t)| ro_canonical(t).canonical_form)
        .collect();
    ensure(got.len() == 9 && got_set.len() == 9, || {
        format!("{} classes", got.len())
    })?;
    ensure(got_set == want, || {
        "classes differ from Fig. 2 and Fig. 13".into()
    })?;
    ensure(secs < ENUMERATE_SECS, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "9 classes = Fig. 2 + Fig. 13 from {} raw configurations, {secs:.1} s < {ENUMERATE_SECS} s",
        v["raw"]
    ))
}

// 3
fn orientation_splits() -> Outcome {
    let rules = builtin_rulebase();
    let reduced = |g: &GraphTemplate| ro_canonical(&reduce(g).0).canonical_form;
    let g = enumerate_orientations(&builtin("fig13/g").map_err(|e| e.to_string())?, &rules);
    let g_forms: BTreeSet<String> = g.classes.iter().map(|c| c.canonical_form.clone()).collect();
    let fig29: BTreeSet<String> = figure("fig29").iter().map(|(_, t)| reduced(t)).collect();
    ensure(g.classes.len() == 4, || {
        format!("13(g): {} classes", g.classes.len())
    })?;
    ensure(g_forms == fig29, || {
        "13(g) classes differ from Fig. 29".into()
    })?;

    let f = enumerate_orientations(&builtin("fig13/f").map_err(|e| e.to_string())?, &rules);
    let f_forms: BTreeSet<String> = f.classes.iter().map(|c| c.canonical_form.clone()).collect();
    ensure(f.classes.len() == 3, || {
        format!("13(f): {} classes", f.classes.len())
    })?;
    // each pseudo chart of Fig. 23 lies in one class; 23(b) and 23(c) share
    // an orientation, and the third class is the one of Fig. 23(e)
    let fig23: BTreeSet<String> = figure("fig23").iter().map(|(_, t)| reduced(t)).collect();
    ensure(fig23.is_subset(&f_forms), || {
        "a Fig. 23 pseudo chart is in no class".into()
    })?;
    let mut cover = fig23.clone();
    cover.insert(reduced(
        &builtin("extra/fig23e").map_err(|e| e.to_string())?,
    ));
    ensure(cover == f_forms, || {
        "13(f) classes not covered by Fig. 23 (a)-(c), (e)".into()
    })?;
    for en in [&g, &f] {
        let n: usize = en.classes.iter().map(|c| c.orbit).sum::<usize>()
            + en.pruned.iter().map(|(c, _)| c.orbit).sum::<usize>();
        ensure(n == en.raw, || format!("orbit sizes {n} != raw {}", en.raw))?;
    }
    Ok(format!(
        "13(g): 4 classes = Fig. 29(a)-(d); 13(f): 3 classes holding Fig. 23(a), (b)/(c) (same orientation, terminal in D1 or D2) and (e); raw {} and {}",
        g.raw, f.raw
    ))
}

// 4
fn pipeline() -> Outcome {
    let start = Instant::now();
    let rules = builtin_rulebase();
    let rep = pipeline_with(&rules, W_TOTAL).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(rep.survivors() == ["fig2/a", "fig2/b"], || {
        format!("survivors {:?}", rep.survivors())
    })?;
    ensure(rep.excluded().len() == 7, || {
        format!("excluded {:?}", rep.excluded())
    })?;
    let want = [
        ("fig13/a", "7.4"),
        ("fig13/b", "8.2"),
        ("fig13/c", "7.5"),
        ("fig13/d", "9.1"),
        ("fig13/e", "11.2"),
        ("fig13/f", "12.2"),
        ("fig13/g", "14.5"),
    ];
    for (key, lemma) in want {
        let c = rep
            .candidates
            .iter()
            .find(|c| c.candidate == key)
            .ok_or(format!("{key} missing"))?;
        let l = c.lemma.clone().unwrap_or_default();
        ensure(l.ends_with(lemma), || {
            format!("{key} cites {l:?}, want {lemma}")
        })?;
        ensure(!c.rule_chain.is_empty(), || {
            format!("{key} has an empty rule chain")
        })?;
    }
    let sums = |key: &str| -> Vec<(String, usize)> {
        rep.candidates
            .iter()
            .filter(|c| c.candidate == key)
            .flat_map(|c| c.branches.iter())
            .filter_map(|b| match &b.outcome {
                chartforge::verify::Outcome::Arithmetic { text, sum, .. } => {
                    Some((text.clone(), *sum))
                }
                _ => None,
            })
            .collect()
    };
    for (key, lit) in [("fig13/a", "5 + 1 + 2"), ("fig13/c", "5 + 1 + 1 + 1")] {
        ensure(
            sums(key)
                .iter()
                .any(|(t, s)| t.contains(lit) && *s > W_TOTAL),
            || format!("{key} has no {lit} > {W_TOTAL}"),
        )?;
    }
    check_report(&rep, &rules)?;
    ensure(secs < PIPELINE_SECS, || format!("took {secs:.1} s"))?;
    Ok(format!("7 excluded (7.4, 8.2, 7.5, 9.1, 11.2, 12.2, 14.5), fig2/a and fig2/b survive, sums 5+1+2 and 5+1+1+1 > 7, re-check clean, {secs:.2} s"))
}

// 5
fn balance_oracle(inn: usize, out: usize, n: usize) -> bool {
    (0u32..1 << n).any(|s| {
        let plus = s.count_ones() as usize;
        inn + plus == out + (n - plus)
    })
}

fn io_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut feasible = 0;
    for _ in 0..IO_CASES {
        let n = rng.gen_range(0..=IO_MAX_UNKNOWNS);
        let w = rng.gen_range(0..=n);
        let (inn, out) = (rng.gen_range(0..16), rng.gen_range(0..16));
        let got = io_balance(inn, out, w, n - w);
        ensure(got == balance_oracle(inn, out, n), || {
            format!("io_balance({inn}, {out}, {w}, {}) = {got}", n - w)
        })?;
        feasible += got as usize;
    }
    let a = |dir, t| BoundaryArc {
        dir,
        may_be_terminal: t,
    };
    let fig19 = min_interior_whites(&[
        a(Dir::Out, true),
        a(Dir::Out, false),
        a(Dir::In, true),
        a(Dir::Out, false),
    ]);
    let d4 = min_interior_whites(&[a(Dir::Out, false); 3]);
    ensure(fig19 == 1, || format!("worked example gives {fig19}"))?;
    ensure(d4 == 2, || format!("Fig. 23(a) D4 gives {d4}"))?;
    Ok(format!("{IO_CASES} random specs with <= {IO_MAX_UNKNOWNS} unknowns agree ({feasible} feasible); worked example 1, Fig. 23(a) D4 2"))
}

// 6
fn recount(c: &Chart) -> [i64; 4] {
    let net = common::Net::new(c);
    let ss = common::strands(&net);
    let free = ss
        .iter()
        .filter(|s| {
            s.end_vertices(&net).is_some_and(|(a, b)| {
                net.kind(a) == VertexKind::Black && net.kind(b) == VertexKind::Black
            })
        })
        .count();
    let hoops = ss
        .iter()
        .filter(|s| {
            s.ends.is_none()
                && s.darts
                    .iter()
                    .all(|&d| net.kind(net.vtx(d)) == VertexKind::Phantom)
        })
        .count();
    let count = |k| c.vertices.iter().filter(|v| v.kind == k).count() as i64;
    [
        count(VertexKind::White),
        free as i64,
        hoops as i64,
        count(VertexKind::Crossing),
    ]
}

fn move_soundness(audit: &mut common::Audit) -> Outcome {
    let ts = builtin_templates();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut applied = 0;
    let mut used = BTreeSet::new();
    for round in 0..3 {
        for (name, seed) in seed_charts() {
            audit.see(&name, &seed);
            let mut c = seed;
            for _ in 0..60 {
                let t = &ts[rng.gen_range(0..ts.len())];
                let sites = find_sites(&c, t);
                if sites.is_empty() {
                    continue;
                }
                let s = &sites[rng.gen_range(0..sites.len())];
                let (r, inv) =
                    apply_with_inverse(&c, s).map_err(|e| format!("{} on {name}: {e}", t.name))?;
                ensure(r.validate().ok, || {
                    format!("{} left an invalid chart", t.name)
                })?;
                let (before, after) = (recount(&c), recount(&r));
                let declared = [
                    t.effect.w,
                    t.effect.free,
                    t.effect.hoops,
                    t.effect.crossings,
                ];
                for (i, want) in declared.into_iter().enumerate() {
                    if let Some(d) = want {
                        ensure(after[i] - before[i] == d, || {
                            format!("{} changed field {i} by {}", t.name, after[i] - before[i])
                        })?;
                    }
                }
                let back = apply(&r, &inv).map_err(|e| format!("inverse of {}: {e}", t.name))?;
                ensure(isomorphic(&back, &c), || {
                    format!("{} is not undone by {}", t.name, inv.template.name)
                })?;
                audit.see(&t.name, &r);
                audit.see(&inv.template.name, &back);
                applied += 1;
                used.insert(t.name.clone());
                if r.visible_vertices() < 40 {
                    c = r;
                }
            }
        }
        if round == 0 && applied >= MIN_MOVES {
            break;
        }
    }
    ensure(applied >= MIN_MOVES, || {
        format!("only {applied} applications")
    })?;
    ensure(used.len() == ts.len(), || {
        format!("templates used: {used:?}")
    })?;
    Ok(format!("{applied} applications >= {MIN_MOVES}, all {} templates, deltas exact, inverses isomorphic", ts.len()))
}

// 7
fn detectors() -> Outcome {
    let cs = common::corpus();
    ensure(
        cs.iter().all(|c| c.visible_vertices() <= MAX_VERTICES),
        || "corpus chart too large".into(),
    )?;
    let (mut lenses, mut disks, mut hits, mut yes, mut no) = (0, 0, 0, 0, 0);
    let mut pool: Vec<GraphTemplate> = Vec::new();
    for k in builtin_keys() {
        let t = builtin(k).map_err(|e| e.to_string())?;
        pool.extend([t.reflect(), t.reverse_all(), t.unoriented(), t]);
    }
    for (i, c) in cs.iter().enumerate() {
        let faces = c.faces();
        for m in 1..c.n - 1 {
            let got: BTreeSet<common::LensKey> = find_lenses(c, m)
                .iter()
                .map(|l| {
                    let darts = l
                        .disk
                        .chart_faces
                        .iter()
                        .flat_map(|&f| faces.orbits[f].iter().copied())
                        .collect();
                    let (mut e1, mut e2) = (l.e1.edges.clone(), l.e2.edges.clone());
                    e1.sort();
                    e2.sort();
                    (darts, e1, e2)
                })
                .collect();
            let want = common::lenses(c, m);
            ensure(got == want, || {
                format!("lenses differ on corpus chart {i}, m={m}")
            })?;
            lenses += want.len();
        }
        for m in 1..c.n {
            for comp in gamma_components(c, m).map_err(|e| e.to_string())? {
                let Ok(ds) = complementary_disks(c, &comp) else {
                    continue;
                };
                for d in ds {
                    let got: BTreeSet<Vec<usize>> = feelers(c, &d)
                        .iter()
                        .map(|s| {
                            let mut e = s.edges.clone();
                            e.sort();
                            e.dedup();
                            e
                        })
                        .collect();
                    let want = common::feelers(c, m, d.boundary[0]);
                    ensure(got == want, || {
                        format!("feelers differ on corpus chart {i}, disk {}", d.id)
                    })?;
                    disks += 1;
                    hits += want.len();
                }
            }
            let mut local: Vec<GraphTemplate> = Vec::new();
            if i % 5 == 0 {
                for v in (0..c.vertices.len()).filter(|&v| c.vertices[v].kind == VertexKind::White)
                {
                    if c.real_rot(v).iter().any(|&d| c.label(d) == m) {
                        let t = common::gamma_template(c, m, v, false);
                        local.extend([t.reflect(), t.unoriented(), t]);
                        break;
                    }
                }
            }
            for t in pool.iter().chain(local.iter()) {
                let got = contains_template(c, m, t);
                ensure(got.is_some() == common::contains(c, m, t), || {
                    format!("containment differs on corpus chart {i}, m={m}, {}", t.name)
                })?;
                match got {
                    Some(map) => {
                        common::check_embedding(c, m, t, &map)?;
                        yes += 1;
                    }
                    None => no += 1,
                }
            }
        }
    }
    ensure(lenses > 0 && hits > 0 && yes > 0, || {
        "oracles never fired".into()
    })?;
    Ok(format!("{} charts <= {MAX_VERTICES} vertices: {lenses} lenses, {disks} disks with {hits} feelers, {yes} embeddings and {no} misses agree", cs.len()))
}

// 8
fn invariants(audit: &mut common::Audit) -> Outcome {
    for (i, c) in common::corpus().iter().enumerate() {
        audit.see(&format!("corpus {i}"), c);
        audit.see(&format!("corpus {i} reflected"), &c.reflect());
    }
    for k in builtin_keys() {
        let t = builtin(k).map_err(|e| e.to_string())?;
        if !t.is_oriented() {
            continue;
        }
        let bws: Vec<String> = t
            .vertices
            .iter()
            .filter(|v| v.bw)
            .map(|v| v.id.clone())
            .collect();
        for mask in 0..1u32 << bws.len() {
            let sec: HashMap<String, usize> = bws
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), (mask >> i & 1) as usize))
                .collect();
            audit.see(k, &realize(&t, &sec).map_err(|e| format!("{k}: {e}"))?);
        }
    }
    for (_, t) in nine_graphs() {
        for c in enumerate_orientations(&t, &[]).classes {
            let bws: Vec<String> = c
                .representative
                .vertices
                .iter()
                .filter(|v| v.bw)
                .map(|v| v.id.clone())
                .collect();
            let sec: HashMap<String, usize> = bws.into_iter().map(|s| (s, 0)).collect();
            audit.see(
                &t.name,
                &realize(&c.representative, &sec).map_err(|e| e.to_string())?,
            );
        }
    }
    for e in std::fs::read_dir(root().join("catalog/charts")).map_err(|e| e.to_string())? {
        let p = e.map_err(|e| e.to_string())?.path();
        let text = std::fs::read_to_string(&p).map_err(|e| e.to_string())?;
        audit.see(
            &p.display().to_string(),
            &build_chart(&text).map_err(|e| e.to_string())?,
        );
    }
    audit.see("empty", &Chart::empty(3));
    ensure(audit.failures.is_empty(), || audit.failures.join("; "))?;
    Ok(format!(
        "{} charts satisfy V - E + F = 1 + C and round-trip byte-identically",
        audit.checked
    ))
}

fn main() {
    let mut audit = common::Audit::default();
    let checks: Vec<(usize, Box<dyn FnOnce(&mut common::Audit) -> Outcome>)> = vec![
        (1, Box::new(|_| catalog_fidelity())),
        (2, Box::new(|_| lemma71())),
        (3, Box::new(|_| orientation_splits())),
        (4, Box::new(|_| pipeline())),
        (5, Box::new(|_| io_oracle())),
        (6, Box::new(move_soundness)),
        (7, Box::new(|_| detectors())),
        (8, Box::new(invariants)),
    ];
    let mut failed = 0;
    for (n, check) in checks {
        let r = catch_unwind(AssertUnwindSafe(|| check(&mut audit))).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match r {
            Ok(detail) => println!("criterion {n}: PASS  {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL  {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
