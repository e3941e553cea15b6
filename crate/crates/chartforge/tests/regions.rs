mod common;

use chartforge::catalog::builtin;
use chartforge::features::{gamma_components, StrandClass};
use chartforge::regions::*;
use chartforge::template::realize;
use chartforge::verify::enumerate_orientations;
use chartforge::{Chart, VertexKind};
use std::collections::{BTreeSet, HashMap};

/// Every terminal placement of the first orientation class of a catalog graph.
fn placements(key: &str) -> Vec<Chart> {
    let t = builtin(key).unwrap();
    let rep = enumerate_orientations(&t, &[]).classes[0]
        .representative
        .clone();
    let bws: Vec<String> = rep
        .vertices
        .iter()
        .filter(|v| v.bw)
        .map(|v| v.id.clone())
        .collect();
    (0..1u32 << bws.len())
        .map(|mask| {
            let sec: HashMap<String, usize> = bws
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), ((mask >> i) & 1) as usize))
                .collect();
            realize(&rep, &sec).unwrap()
        })
        .collect()
}

fn disks(c: &Chart) -> Vec<DiskRegion> {
    let comps = gamma_components(c, 1).unwrap();
    assert_eq!(comps.len(), 1);
    complementary_disks(c, &comps[0]).unwrap()
}

fn angles(c: &Chart) -> Vec<usize> {
    let mut a: Vec<usize> = disks(c).iter().map(|d| d.angled_k).collect();
    a.sort();
    a
}

#[test]
fn angled_counts_of_catalog_graphs() {
    for (key, want) in [
        ("fig13/a", vec![2, 5, 5]),
        ("fig13/b", vec![3, 4, 5]),
        ("fig13/f", vec![3, 3, 4, 4]),
        ("fig13/g", vec![2, 2, 3, 5]),
    ] {
        for c in placements(key) {
            assert_eq!(angles(&c), want, "{key}");
        }
    }
}

#[test]
fn fig13a_terminals_crowd_a_five_angled_disk() {
    for c in placements("fig13/a") {
        let ds = disks(&c);
        let counts: Vec<usize> = ds
            .iter()
            .filter(|d| d.angled_k == 5)
            .map(|d| feelers(&c, d).len())
            .collect();
        assert_eq!(counts.iter().sum::<usize>(), 3);
        assert!(counts.iter().any(|&k| k >= 2));
        assert!(ds.iter().all(|d| is_special(&c, d)));
    }
}

#[test]
fn fig13g_two_angled_disks_are_bounded_by_parallel_pairs() {
    let c = &placements("fig13/g")[0];
    let mut bounds: Vec<BTreeSet<String>> = disks(c)
        .iter()
        .filter(|d| d.angled_k == 2)
        .map(|d| {
            d.boundary
                .iter()
                .map(|&x| c.edges[c.edge_of(x).unwrap()].id.clone())
                .collect()
        })
        .collect();
    bounds.sort();
    let want: Vec<BTreeSet<String>> = vec![
        ["e1", "e2"].iter().map(|s| s.to_string()).collect(),
        ["e6", "e7"].iter().map(|s| s.to_string()).collect(),
    ];
    assert_eq!(bounds, want);
}

#[test]
fn disks_tile_the_sphere() {
    for c in common::corpus() {
        let faces = c.faces();
        for m in 1..c.n {
            for comp in gamma_components(c, m).unwrap() {
                let Ok(ds) = complementary_disks(c, &comp) else {
                    continue;
                };
                if ds.is_empty() {
                    continue;
                }
                let mut all: Vec<usize> = ds
                    .iter()
                    .flat_map(|d| d.chart_faces.iter().copied())
                    .collect();
                all.sort();
                let n = all.len();
                all.dedup();
                assert_eq!(n, all.len(), "disks overlap");
                assert_eq!(n, faces.count(), "disks miss a face");
                // angled counts add up to the number of (white, disk) incidences
                let net = common::Net::new(c);
                let sum: usize = ds.iter().map(|d| d.angled_k).sum();
                let mut incid = BTreeSet::new();
                for (i, d) in ds.iter().enumerate() {
                    for &x in &d.boundary {
                        if net.kind(net.vtx(x)) == VertexKind::White {
                            incid.insert((i, net.vtx(x)));
                        }
                    }
                }
                assert_eq!(sum, incid.len());
            }
        }
    }
}

#[test]
fn local_complexity_by_direct_count() {
    let mut nonzero = 0;
    for c in common::corpus() {
        let net = common::Net::new(c);
        for m in 1..c.n {
            for comp in gamma_components(c, m).unwrap() {
                let Ok(ds) = complementary_disks(c, &comp) else {
                    continue;
                };
                for d in ds {
                    let region: BTreeSet<usize> = d.chart_faces.iter().copied().collect();
                    let on: BTreeSet<usize> = d.boundary.iter().map(|&x| net.vtx(x)).collect();
                    let w_int = (0..c.vertices.len())
                        .filter(|&v| net.kind(v) == VertexKind::White && !on.contains(&v))
                        .filter(|&v| region.contains(&net.face[c.vertices[v].rot[0]]))
                        .count();
                    let xs: BTreeSet<usize> = d
                        .boundary
                        .iter()
                        .flat_map(|&x| [net.vtx(x), net.vtx(net.other(x))])
                        .filter(|&v| net.kind(v) == VertexKind::Crossing)
                        .collect();
                    let lc = local_complexity(c, &d);
                    assert_eq!((lc.w_int, lc.c_boundary), (w_int, xs.len()));
                    if lc.w_int + lc.c_boundary > 0 {
                        nonzero += 1;
                    }
                }
            }
        }
    }
    assert!(nonzero > 50);
}

#[test]
fn specialness_follows_feelers() {
    // a single face of the reduced component has its internal strands on
    // its boundary, so only terminal edges can reach in
    let (mut special, mut plain) = (0, 0);
    for c in common::corpus() {
        for m in 1..c.n {
            for comp in gamma_components(c, m).unwrap() {
                let Ok(ds) = complementary_disks(c, &comp) else {
                    continue;
                };
                for d in ds {
                    let fs = feelers(c, &d);
                    let want = fs.iter().all(|s| s.class == StrandClass::Terminal);
                    assert_eq!(is_special(c, &d), want);
                    if want {
                        special += 1;
                    } else {
                        plain += 1;
                    }
                    let rep = disk_report(c, &d);
                    assert_eq!(rep.feelers, fs.len());
                    assert_eq!(rep.special, want);
                }
            }
        }
    }
    assert!(
        special > 1000 && plain == 0,
        "{special} special, {plain} not"
    );
}

#[test]
fn merged_disks_can_hold_internal_feelers() {
    let mut plain = 0;
    for c in placements("fig13/a")
        .iter()
        .chain(placements("fig13/b").iter())
    {
        let comp = &gamma_components(c, 1).unwrap()[0];
        let n = complementary_disks(c, comp).unwrap().len();
        for i in 0..n {
            for j in i + 1..n {
                let u = union_region(c, comp, &[i, j]);
                let fs = feelers(c, &u);
                let want = fs.iter().all(|s| s.class == StrandClass::Terminal);
                assert_eq!(is_special(c, &u), want);
                if fs.iter().any(|s| s.class == StrandClass::Internal) {
                    plain += 1;
                }
            }
        }
    }
    assert!(plain > 0);
}

#[test]
fn empty_local_complexity() {
    let c = &placements("fig13/a")[0];
    let d = disks(c).into_iter().find(|d| d.angled_k == 2).unwrap();
    assert_eq!(
        local_complexity(c, &d),
        LocalComplexity {
            w_int: 0,
            c_boundary: 0
        }
    );
}
