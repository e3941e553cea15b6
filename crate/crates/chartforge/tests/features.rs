mod common;

use chartforge::chart::build_chart;
use chartforge::features::*;
use chartforge::moves::seed_charts;
use chartforge::VertexKind;

const STAR: &str = "chart n=4
white w darts=w.0,w.1,w.2,w.3,w.4,w.5
black b0 darts=b0.0
black b1 darts=b1.0
black b2 darts=b2.0
black b3 darts=b3.0
black b4 darts=b4.0
black b5 darts=b5.0
edge e0 label=2 tail=b0.0 head=w.0
edge e1 label=3 tail=b1.0 head=w.1
edge e2 label=2 tail=b2.0 head=w.2
edge e3 label=3 tail=w.3 head=b3.0
edge e4 label=2 tail=w.4 head=b4.0
edge e5 label=3 tail=w.5 head=b5.0
infinity face(b0.0)
";

/// The label-2 arcs at positions 4 and 0 closed up into a loop around
/// the terminal edge at position 5.
const LOOPED: &str = "chart n=4
white w darts=w.0,w.1,w.2,w.3,w.4,w.5
black b1 darts=b1.0
black b2 darts=b2.0
black b3 darts=b3.0
black b5 darts=b5.0
edge l label=2 tail=w.4 head=w.0
edge e1 label=3 tail=b1.0 head=w.1
edge e2 label=2 tail=b2.0 head=w.2
edge e3 label=3 tail=w.3 head=b3.0
edge e5 label=3 tail=w.5 head=b5.0
infinity face(b1.0)
";

fn seed(name: &str) -> chartforge::Chart {
    seed_charts()
        .into_iter()
        .find(|(n, _)| n == name)
        .unwrap()
        .1
}

#[test]
fn classes_on_small_charts() {
    let hoop =
        build_chart("chart n=3\nphantom p darts=p.o,p.i\nedge h label=2 tail=p.o head=p.i\n")
            .unwrap();
    let ss = all_strands(&hoop);
    assert_eq!(ss.len(), 1);
    assert_eq!(ss[0].class, StrandClass::Hoop);

    let star = build_chart(STAR).unwrap();
    let ss = all_strands(&star);
    assert_eq!(ss.len(), 6);
    assert!(ss.iter().all(|s| s.class == StrandClass::Terminal));

    let looped = build_chart(LOOPED).unwrap();
    assert!(looped.validate().ok, "{:?}", looped.validate().violations);
    let l = all_strands(&looped)
        .into_iter()
        .find(|s| s.label == 2 && s.edges.len() == 1 && s.class == StrandClass::Loop);
    assert!(l.is_some());

    let free = build_chart(
        "chart n=3\nblack a darts=a.0\nblack b darts=b.0\nedge f label=1 tail=a.0 head=b.0\n",
    )
    .unwrap();
    assert_eq!(all_strands(&free)[0].class, StrandClass::Free);
}

#[test]
fn classes_match_endpoints_in_corpus() {
    let mut rings = 0;
    for c in common::corpus() {
        let net = common::Net::new(c);
        let mine = common::strands(&net);
        let theirs = all_strands(c);
        assert_eq!(mine.len(), theirs.len());
        for s in &theirs {
            let o = mine.iter().find(|o| o.darts.contains(&s.darts[0])).unwrap();
            let mut a = s.edges.clone();
            a.sort();
            assert_eq!(a, o.edge_set());
            let kinds = o
                .end_vertices(&net)
                .map(|(x, y)| (net.kind(x), net.kind(y)));
            let crossings = o
                .darts
                .iter()
                .any(|&d| net.kind(net.vtx(d)) == VertexKind::Crossing);
            let want = match kinds {
                None if crossings => StrandClass::Ring,
                None => StrandClass::Hoop,
                Some((VertexKind::Black, VertexKind::Black)) => StrandClass::Free,
                Some((VertexKind::Black, _)) | Some((_, VertexKind::Black)) => {
                    StrandClass::Terminal
                }
                Some(_) if o.end_vertices(&net).is_some_and(|(x, y)| x == y) => StrandClass::Loop,
                Some(_) => StrandClass::Internal,
            };
            assert_eq!(s.class, want);
            if want == StrandClass::Ring {
                rings += 1;
            }
        }
    }
    assert!(rings > 0);
}

#[test]
fn middle_arcs() {
    let star = build_chart(STAR).unwrap();
    let w = star.vertex_by_id("w").unwrap();
    let rr = star.real_rot(w);
    let mids: Vec<bool> = rr.iter().map(|&d| dart_is_middle(&star, d)).collect();
    assert_eq!(mids, vec![false, true, false, false, true, false]);
    for c in common::corpus() {
        let net = common::Net::new(c);
        for (v, vx) in c.vertices.iter().enumerate() {
            if vx.kind != VertexKind::White {
                continue;
            }
            let r = c.real_rot(v);
            assert_eq!(r.iter().filter(|&&d| dart_is_middle(c, d)).count(), 2);
            for &d in &r {
                assert_eq!(dart_is_middle(c, d), net.middle(d));
            }
        }
    }
}

#[test]
fn flanks() {
    let star = build_chart(STAR).unwrap();
    let w = star.vertex_by_id("w").unwrap();
    let e0 = strand_of_dart(&star, star.dart_by_id("w.0").unwrap());
    let (a, b) = flank_edges(&star, w, &e0).unwrap();
    assert_eq!(star.edges[a.edges[0]].id, "e5");
    assert_eq!(star.edges[b.edges[0]].id, "e1");
    let r = star.reflect();
    let (ra, rb) = flank_edges(&r, w, &strand_of_dart(&r, r.dart_by_id("w.0").unwrap())).unwrap();
    assert_eq!(r.edges[ra.edges[0]].id, "e1");
    assert_eq!(r.edges[rb.edges[0]].id, "e5");

    // a loop around one terminal edge flanks it from both sides
    let looped = build_chart(LOOPED).unwrap();
    let w = looped.vertex_by_id("w").unwrap();
    let e5 = strand_of_dart(&looped, looped.dart_by_id("w.5").unwrap());
    let (a, b) = flank_edges(&looped, w, &e5).unwrap();
    assert_eq!(a.edges, b.edges);
    assert_eq!(a.class, StrandClass::Loop);
}

#[test]
fn bw_vertices_of_the_nine_graphs() {
    for key in ["fig13/d", "fig13/e", "fig13/f", "fig13/g"] {
        let c = seed(&format!("{key}#0"));
        assert_eq!(bw_vertices(&c, 1).len(), 1, "{key}");
    }
    for key in ["fig2/a", "fig2/b"] {
        let c = seed(&format!("{key}#0"));
        assert_eq!(bw_vertices(&c, 1).len(), 3, "{key}");
    }
    let looped = build_chart(LOOPED).unwrap();
    assert!(bw_vertices(&looped, 2).len() == 1);
    let hoop =
        build_chart("chart n=3\nphantom p darts=p.o,p.i\nedge h label=2 tail=p.o head=p.i\n")
            .unwrap();
    assert!(bw_vertices(&hoop, 2).is_empty());
}

#[test]
fn gamma_components_count_whites() {
    let c = seed("fig13/g#0");
    let comps = gamma_components(&c, 1).unwrap();
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0].white_count(), 5);
    let two = build_chart(
        "chart n=3\nphantom p darts=p.o,p.i\nphantom q darts=q.o,q.i\nedge h label=1 tail=p.o head=p.i\nedge k label=1 tail=q.o head=q.i\nplace q in face(p.o)\n",
    )
    .unwrap();
    assert!(two.validate().ok);
    let comps = gamma_components(&two, 1).unwrap();
    assert_eq!(comps.len(), 2);
    assert!(comps.iter().all(|g| g.white_count() == 0));
}

#[test]
fn handshake_at_whites() {
    for c in common::corpus() {
        for m in 1..c.n {
            let whites = chartforge::chart::gamma(c, m).unwrap().whites.len();
            let ends: usize = strands(c, m)
                .unwrap()
                .iter()
                .filter_map(|s| s.ends)
                .flat_map(|e| e.into_iter())
                .filter(|&d| c.kind_of(d) == VertexKind::White)
                .count();
            assert_eq!(ends, 3 * whites);
        }
    }
}

#[test]
fn report_serializes() {
    let c = seed("fig2/a#0");
    let r = feature_report(&c);
    let j = serde_json::to_value(&r).unwrap();
    assert!(j["strands"].as_array().unwrap().len() > 5);
}
