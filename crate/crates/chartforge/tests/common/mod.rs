//! Shared fixtures and brute-force oracles for the integration tests.
//!
//! The oracles read only the raw chart tables (rotations, edges, tethers) and
//! recompute everything else from scratch.
#![allow(dead_code)]

use chartforge::chart::{build_chart, Chart, Link};
use chartforge::template::{GraphTemplate, TDart, TEdge, TKind, TVertex};
use chartforge::{Dir, VertexKind};
use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

/// Raw view of a chart with positions precomputed.
pub struct Net<'a> {
    pub c: &'a Chart,
    pos: Vec<usize>,
    pub face: Vec<usize>,
    pub nfaces: usize,
}

impl<'a> Net<'a> {
    pub fn new(c: &'a Chart) -> Net<'a> {
        let mut pos = vec![0; c.darts.len()];
        for v in &c.vertices {
            for (i, &d) in v.rot.iter().enumerate() {
                pos[d] = i;
            }
        }
        let mut net = Net {
            c,
            pos,
            face: vec![usize::MAX; c.darts.len()],
            nfaces: 0,
        };
        for s in 0..c.darts.len() {
            if net.face[s] != usize::MAX {
                continue;
            }
            let mut d = s;
            while net.face[d] == usize::MAX {
                net.face[d] = net.nfaces;
                d = net.succ(net.other(d));
            }
            net.nfaces += 1;
        }
        net
    }

    pub fn other(&self, d: usize) -> usize {
        match self.c.darts[d].link {
            Link::Edge(e) => {
                let ed = &self.c.edges[e];
                if ed.tail == d {
                    ed.head
                } else {
                    ed.tail
                }
            }
            Link::Tether(t) => {
                let [a, b] = self.c.tethers[t];
                if a == d {
                    b
                } else {
                    a
                }
            }
        }
    }

    pub fn succ(&self, d: usize) -> usize {
        let r = &self.c.vertices[self.c.darts[d].vertex].rot;
        r[(self.pos[d] + 1) % r.len()]
    }

    pub fn real(&self, d: usize) -> bool {
        matches!(self.c.darts[d].link, Link::Edge(_))
    }

    pub fn edge(&self, d: usize) -> usize {
        match self.c.darts[d].link {
            Link::Edge(e) => e,
            Link::Tether(_) => panic!("tether dart"),
        }
    }

    pub fn label(&self, d: usize) -> u32 {
        self.c.edges[self.edge(d)].label
    }

    pub fn outward(&self, d: usize) -> bool {
        self.c.edges[self.edge(d)].tail == d
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.c.vertices[v].kind
    }

    pub fn vtx(&self, d: usize) -> usize {
        self.c.darts[d].vertex
    }

    pub fn real_rot(&self, v: usize) -> Vec<usize> {
        self.c.vertices[v]
            .rot
            .iter()
            .copied()
            .filter(|&d| self.real(d))
            .collect()
    }

    /// Middle arc: same direction as both rotation neighbours at a white.
    pub fn middle(&self, d: usize) -> bool {
        let v = self.vtx(d);
        if self.kind(v) != VertexKind::White {
            return false;
        }
        let r = self.real_rot(v);
        let p = r.iter().position(|&x| x == d).unwrap();
        let k = r.len();
        let o = self.outward(d);
        self.outward(r[(p + 1) % k]) == o && self.outward(r[(p + k - 1) % k]) == o
    }

    /// Faces reachable from `start` without crossing a barrier dart.
    pub fn flood(&self, start: usize, barrier: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut adj: Vec<Vec<usize>> = vec![vec![]; self.nfaces];
        for d in 0..self.c.darts.len() {
            let t = self.other(d);
            if !barrier.contains(&d) && !barrier.contains(&t) {
                adj[self.face[d]].push(self.face[t]);
            }
        }
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            for &g in &adj[f] {
                if seen.insert(g) {
                    stack.push(g);
                }
            }
        }
        seen
    }

    /// Darts lying on a set of faces.
    pub fn darts_of(&self, faces: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.c.darts.len())
            .filter(|d| faces.contains(&self.face[*d]))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct OStrand {
    pub label: u32,
    /// Dart pairs along the strand, in walking order.
    pub darts: Vec<usize>,
    pub edges: Vec<usize>,
    /// First and last dart when the strand has endpoints.
    pub ends: Option<(usize, usize)>,
}

impl OStrand {
    pub fn end_vertices(&self, net: &Net) -> Option<(usize, usize)> {
        self.ends.map(|(a, b)| (net.vtx(a), net.vtx(b)))
    }
    pub fn touches_black(&self, net: &Net) -> bool {
        self.end_vertices(net).is_some_and(|(a, b)| {
            net.kind(a) == VertexKind::Black || net.kind(b) == VertexKind::Black
        })
    }
    pub fn internal(&self, net: &Net) -> bool {
        self.end_vertices(net).is_some_and(|(a, b)| {
            net.kind(a) == VertexKind::White && net.kind(b) == VertexKind::White
        })
    }
    pub fn terminal(&self, net: &Net) -> bool {
        self.end_vertices(net).is_some_and(|(a, b)| {
            (net.kind(a) == VertexKind::Black) != (net.kind(b) == VertexKind::Black)
        })
    }
    pub fn edge_set(&self) -> Vec<usize> {
        let mut e = self.edges.clone();
        e.sort();
        e.dedup();
        e
    }
}

fn straight(net: &Net, d: usize) -> Option<usize> {
    let v = net.vtx(d);
    let r = net.real_rot(v);
    let p = r.iter().position(|&x| x == d).unwrap();
    match net.kind(v) {
        VertexKind::Crossing => Some(r[(p + 2) % 4]),
        VertexKind::Phantom => Some(r[(p + 1) % 2]),
        _ => None,
    }
}

/// Strands found by walking through crossings and phantoms.
pub fn strands(net: &Net) -> Vec<OStrand> {
    let c = net.c;
    let mut used = vec![false; c.darts.len()];
    let mut out = Vec::new();
    let trace = |start: usize, used: &mut Vec<bool>| {
        let mut darts = vec![];
        let mut d = start;
        loop {
            let t = net.other(d);
            darts.push(d);
            darts.push(t);
            used[d] = true;
            used[t] = true;
            match straight(net, t) {
                Some(x) if x == start => return (darts, true),
                Some(x) => d = x,
                None => return (darts, false),
            }
        }
    };
    for v in 0..c.vertices.len() {
        if !matches!(net.kind(v), VertexKind::White | VertexKind::Black) {
            continue;
        }
        for d in net.real_rot(v) {
            if used[d] {
                continue;
            }
            let (darts, _) = trace(d, &mut used);
            let ends = Some((darts[0], *darts.last().unwrap()));
            out.push(mk(net, darts, ends));
        }
    }
    for d in 0..c.darts.len() {
        if used[d] || !net.real(d) {
            continue;
        }
        let (darts, closed) = trace(d, &mut used);
        assert!(closed);
        out.push(mk(net, darts, None));
    }
    out
}

fn mk(net: &Net, darts: Vec<usize>, ends: Option<(usize, usize)>) -> OStrand {
    let edges = darts.chunks(2).map(|p| net.edge(p[0])).collect();
    OStrand {
        label: net.label(darts[0]),
        darts,
        edges,
        ends,
    }
}

// ---------------------------------------------------------------------------
// invariants

/// Euler relation with C real components, and byte-identical text round trip.
pub fn check_invariants(c: &Chart) -> Result<(), String> {
    let net = Net::new(c);
    let v = c.vertices.len() as i64;
    let e = c.edges.len() as i64;
    let f = if c.darts.is_empty() {
        1
    } else {
        net.nfaces as i64
    };
    let mut parent: Vec<usize> = (0..c.vertices.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for ed in &c.edges {
        let (a, b) = (
            find(&mut parent, net.vtx(ed.tail)),
            find(&mut parent, net.vtx(ed.head)),
        );
        parent[a] = b;
    }
    let comps = (0..c.vertices.len())
        .filter(|&x| find(&mut parent, x) == x)
        .count() as i64;
    if v - e + f != 1 + comps {
        return Err(format!("V - E + F = {v} - {e} + {f} but C = {comps}"));
    }
    let text = c.to_text();
    let back = build_chart(&text).map_err(|err| format!("reparse failed: {err}"))?;
    if back.to_text() != text {
        return Err("text round trip is not byte-identical".into());
    }
    Ok(())
}

/// Tallies invariant checks so a test can report how many charts it saw.
#[derive(Default)]
pub struct Audit {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Audit {
    pub fn see(&mut self, what: &str, c: &Chart) {
        self.checked += 1;
        if let Err(e) = check_invariants(c) {
            if self.failures.len() < 10 {
                self.failures.push(format!("{what}: {e}"));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// corpus

pub const PAIR_12: &str = "chart n=4
black a darts=a.0
black b darts=b.0
black c darts=c.0
black d darts=d.0
edge f label=1 tail=a.0 head=b.0
edge g label=2 tail=c.0 head=d.0
place face(c.0) in face(a.0)
infinity face(a.0)
";

pub const PAIR_13: &str = "chart n=4
black a darts=a.0
black b darts=b.0
black c darts=c.0
black d darts=d.0
edge f label=1 tail=a.0 head=b.0
edge g label=3 tail=c.0 head=d.0
place face(c.0) in face(a.0)
infinity face(a.0)
";

pub const HOOP_EDGE: &str = "chart n=4
phantom p darts=p.o,p.i
black a darts=a.0
black b darts=b.0
edge h label=2 tail=p.o head=p.i
edge f label=1 tail=a.0 head=b.0
place face(a.0) in face(p.o)
infinity face(p.o)
";

/// Charts reachable by a few moves from small seeds, at most 12 visible vertices.
pub fn corpus() -> &'static [Chart] {
    static CORPUS: OnceLock<Vec<Chart>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let ts = chartforge::moves::builtin_templates();
        let mut out = Vec::new();
        for (text, limit) in [(PAIR_12, 1500), (PAIR_13, 500), (HOOP_EDGE, 400)] {
            let seed = build_chart(text).expect("seed parses");
            out.extend(chartforge::moves::explore(&[seed], &ts, 4, 12, limit));
        }
        out
    })
}

// ---------------------------------------------------------------------------
// lens oracle

/// Lenses as (dart set of the disk's faces, e1 edges, e2 edges).
pub type LensKey = (BTreeSet<usize>, Vec<usize>, Vec<usize>);

pub fn lenses(c: &Chart, m: u32) -> BTreeSet<LensKey> {
    let net = Net::new(c);
    let ss = strands(&net);
    let mut out = BTreeSet::new();
    for s1 in ss.iter().filter(|s| s.label == m && s.internal(&net)) {
        for s2 in ss.iter().filter(|s| s.label == m + 1 && s.internal(&net)) {
            let (e1a, e1b) = s1.ends.unwrap();
            let (e2a, e2b) = s2.ends.unwrap();
            let (v1a, v1b) = (net.vtx(e1a), net.vtx(e1b));
            let (v2a, v2b) = (net.vtx(e2a), net.vtx(e2b));
            if v1a == v1b {
                continue;
            }
            let same = (v1a == v2a && v1b == v2b) || (v1a == v2b && v1b == v2a);
            if !same {
                continue;
            }
            let ends = [e1a, e1b, e2a, e2b];
            let m1 = [net.middle(e1a), net.middle(e1b)];
            let m2 = [net.middle(e2a), net.middle(e2b)];
            let cond_i = !m1.iter().chain(&m2).any(|&x| x);
            let cond_ii = (m1[0] && m1[1]) || (m2[0] && m2[1]);
            if !cond_i && !cond_ii {
                continue;
            }
            let barrier: BTreeSet<usize> = s1.darts.iter().chain(&s2.darts).copied().collect();
            let mut sides: Vec<BTreeSet<usize>> = Vec::new();
            for &d in &barrier {
                let side = net.flood(net.face[d], &barrier);
                if !sides.contains(&side) {
                    sides.push(side);
                }
            }
            for side in sides {
                let intruder = [v1a, v1b]
                    .iter()
                    .flat_map(|&w| net.real_rot(w))
                    .any(|d| !ends.contains(&d) && side.contains(&net.face[d]));
                if !intruder {
                    out.insert((net.darts_of(&side), s1.edge_set(), s2.edge_set()));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// feeler oracle

/// Darts of the label-m component through `v`, terminal strands dropped.
pub fn reduced_component_darts(net: &Net, m: u32, v: usize) -> BTreeSet<usize> {
    let ss: Vec<OStrand> = strands(net).into_iter().filter(|s| s.label == m).collect();
    // union vertices along strands
    let mut comp: BTreeSet<usize> = BTreeSet::from([v]);
    loop {
        let before = comp.len();
        for s in &ss {
            let vs: BTreeSet<usize> = s.darts.iter().map(|&d| net.vtx(d)).collect();
            if vs.iter().any(|x| comp.contains(x)) {
                comp.extend(vs);
            }
        }
        if comp.len() == before {
            break;
        }
    }
    ss.iter()
        .filter(|s| !s.terminal(net) && comp.contains(&net.vtx(s.darts[0])))
        .flat_map(|s| s.darts.iter().copied())
        .collect()
}

/// Feelers of the region on the right of `dart`, cut out by the reduced
/// label-m component through that dart, as sorted edge lists.
pub fn feelers(c: &Chart, m: u32, dart: usize) -> BTreeSet<Vec<usize>> {
    let net = Net::new(c);
    let g = reduced_component_darts(&net, m, net.vtx(dart));
    let region = net.flood(net.face[dart], &g);
    let whites: BTreeSet<usize> = g
        .iter()
        .filter(|&&d| region.contains(&net.face[d]) && net.kind(net.vtx(d)) == VertexKind::White)
        .map(|&d| net.vtx(d))
        .collect();
    let mut out = BTreeSet::new();
    for s in strands(&net).iter().filter(|s| s.label == m) {
        let Some((a, b)) = s.ends else { continue };
        let reaches = [a, b].iter().any(|&x| {
            whites.contains(&net.vtx(x)) && !g.contains(&x) && region.contains(&net.face[x])
        });
        if reaches {
            out.insert(s.edge_set());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// containment oracle

/// Label-m graph of the component through chart vertex `v`: whites and blacks
/// with the end darts of its strands in rotation order. `reduced` drops
/// terminal strands and their blacks and marks their whites BW.
pub fn gamma_template(c: &Chart, m: u32, v: usize, reduced: bool) -> GraphTemplate {
    let net = Net::new(c);
    let ss: Vec<OStrand> = strands(&net)
        .into_iter()
        .filter(|s| s.label == m && s.ends.is_some())
        .collect();
    let mut comp: BTreeSet<usize> = BTreeSet::from([v]);
    loop {
        let before = comp.len();
        for s in &ss {
            let (a, b) = s.end_vertices(&net).unwrap();
            if comp.contains(&a) || comp.contains(&b) {
                comp.insert(a);
                comp.insert(b);
            }
        }
        if comp.len() == before {
            break;
        }
    }
    let kept: Vec<&OStrand> = ss
        .iter()
        .filter(|s| {
            comp.contains(&s.end_vertices(&net).unwrap().0) && !(reduced && s.touches_black(&net))
        })
        .collect();
    let mut bw = BTreeSet::new();
    if reduced {
        for s in ss
            .iter()
            .filter(|s| s.terminal(&net) && comp.contains(&s.end_vertices(&net).unwrap().0))
        {
            let (a, b) = s.end_vertices(&net).unwrap();
            bw.extend(
                [a, b]
                    .into_iter()
                    .filter(|&x| net.kind(x) == VertexKind::White),
            );
        }
    }
    let ends: BTreeSet<usize> = kept
        .iter()
        .flat_map(|s| [s.ends.unwrap().0, s.ends.unwrap().1])
        .collect();
    let mut t = GraphTemplate {
        name: "oracle".into(),
        vertices: vec![],
        darts: vec![],
        edges: vec![],
        disks: vec![],
    };
    let mut tdart: HashMap<usize, usize> = HashMap::new();
    for &x in &comp {
        let kind = match net.kind(x) {
            VertexKind::White => TKind::White,
            VertexKind::Black if !reduced => TKind::Black,
            _ => continue,
        };
        let vi = t.vertices.len();
        let mut rot = vec![];
        for d in net.real_rot(x) {
            if ends.contains(&d) {
                tdart.insert(d, t.darts.len());
                rot.push(t.darts.len());
                let dir = if net.outward(d) { Dir::Out } else { Dir::In };
                t.darts.push(TDart {
                    id: c.darts[d].id.clone(),
                    vertex: vi,
                    edge: usize::MAX,
                    dir: Some(dir),
                });
            }
        }
        t.vertices.push(TVertex {
            id: c.vertices[x].id.clone(),
            kind,
            bw: bw.contains(&x),
            rot,
        });
    }
    for s in kept {
        let (a, b) = s.ends.unwrap();
        let (ta, tb) = (tdart[&a], tdart[&b]);
        let ei = t.edges.len();
        t.darts[ta].edge = ei;
        t.darts[tb].edge = ei;
        t.edges.push(TEdge {
            id: c.edges[s.edges[0]].id.clone(),
            darts: [ta, tb],
        });
    }
    t
}

fn partner(t: &GraphTemplate, d: usize) -> usize {
    let [a, b] = t.edges[t.darts[d].edge].darts;
    if a == d {
        b
    } else {
        a
    }
}

/// Backtracking search for an embedding of `p` onto `g` (same size), over
/// vertex bijections, rotation offsets, mirror and global reversal.
pub fn template_iso(p: &GraphTemplate, g: &GraphTemplate, check_dirs: bool) -> bool {
    if p.vertices.len() != g.vertices.len() || p.darts.len() != g.darts.len() {
        return false;
    }
    if p.vertices.is_empty() {
        return true;
    }
    // BFS order over p so that each vertex after the first has a placed neighbour
    let mut order = vec![0];
    let mut placed = vec![false; p.vertices.len()];
    placed[0] = true;
    let mut i = 0;
    while i < order.len() {
        for &d in &p.vertices[order[i]].rot {
            let u = p.darts[partner(p, d)].vertex;
            if !placed[u] {
                placed[u] = true;
                order.push(u);
            }
        }
        i += 1;
    }
    if order.len() != p.vertices.len() {
        return false;
    }
    for mirror in [false, true] {
        for reverse in [false, true] {
            if reverse && !check_dirs {
                continue;
            }
            let mut dmap = vec![usize::MAX; p.darts.len()];
            let mut vused = vec![false; g.vertices.len()];
            if extend(
                p, g, &order, 0, mirror, reverse, check_dirs, &mut dmap, &mut vused,
            ) {
                return true;
            }
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn extend(
    p: &GraphTemplate,
    g: &GraphTemplate,
    order: &[usize],
    k: usize,
    mirror: bool,
    reverse: bool,
    check_dirs: bool,
    dmap: &mut Vec<usize>,
    vused: &mut Vec<bool>,
) -> bool {
    if k == order.len() {
        return true;
    }
    let pv = &p.vertices[order[k]];
    for gi in 0..g.vertices.len() {
        let gv = &g.vertices[gi];
        if vused[gi] || gv.kind != pv.kind || gv.bw != pv.bw || gv.rot.len() != pv.rot.len() {
            continue;
        }
        let deg = pv.rot.len();
        for off in 0..deg.max(1) {
            let img = |i: usize| {
                if mirror {
                    gv.rot[(off + deg - i) % deg]
                } else {
                    gv.rot[(off + i) % deg]
                }
            };
            let mut ok = true;
            for i in 0..deg {
                let (pd, gd) = (pv.rot[i], img(i));
                if check_dirs {
                    if let Some(want) = p.darts[pd].dir {
                        let got = g.darts[gd].dir.map(|x| if reverse { x.flip() } else { x });
                        if got != Some(want) {
                            ok = false;
                        }
                    }
                }
            }
            if !ok {
                continue;
            }
            for i in 0..deg {
                dmap[pv.rot[i]] = img(i);
            }
            // every pattern edge with both ends placed must land on a graph edge
            let consistent = (0..deg).all(|i| {
                let pd = pv.rot[i];
                let q = partner(p, pd);
                dmap[q] == usize::MAX || partner(g, dmap[pd]) == dmap[q]
            });
            let distinct = {
                let imgs: BTreeSet<usize> = (0..deg).map(img).collect();
                imgs.len() == deg
            };
            if consistent && distinct {
                vused[gi] = true;
                if extend(p, g, order, k + 1, mirror, reverse, check_dirs, dmap, vused) {
                    return true;
                }
                vused[gi] = false;
            }
            for i in 0..deg {
                dmap[pv.rot[i]] = usize::MAX;
            }
        }
    }
    false
}

/// Whether some label-m component of `c` matches `t` by the containment rule.
pub fn contains(c: &Chart, m: u32, t: &GraphTemplate) -> bool {
    let reduced = t.blacks() == 0 && t.vertices.iter().any(|v| v.bw);
    let check_dirs = t.darts.iter().any(|d| d.dir.is_some());
    let net = Net::new(c);
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for v in 0..c.vertices.len() {
        if !matches!(net.kind(v), VertexKind::White | VertexKind::Black) || seen.contains(&v) {
            continue;
        }
        if !net.real_rot(v).iter().any(|&d| net.label(d) == m) {
            continue;
        }
        let full = gamma_template(c, m, v, false);
        for tv in &full.vertices {
            seen.insert(c.vertex_by_id(&tv.id).unwrap());
        }
        let g = if reduced {
            gamma_template(c, m, v, true)
        } else {
            full
        };
        if template_iso(t, &g, check_dirs) {
            return true;
        }
    }
    false
}

/// A returned template-dart -> chart-dart map must respect rotations
/// (up to one global mirror) and pair strand ends like the template's edges.
pub fn check_embedding(c: &Chart, m: u32, t: &GraphTemplate, map: &[usize]) -> Result<(), String> {
    let net = Net::new(c);
    if map.len() != t.darts.len() {
        return Err("map has the wrong length".into());
    }
    let ss: Vec<OStrand> = strands(&net)
        .into_iter()
        .filter(|s| s.label == m && s.ends.is_some())
        .collect();
    let other_end: HashMap<usize, usize> = ss
        .iter()
        .flat_map(|s| {
            let (a, b) = s.ends.unwrap();
            [(a, b), (b, a)]
        })
        .collect();
    for e in &t.edges {
        let [a, b] = e.darts;
        if other_end.get(&map[a]) != Some(&map[b]) {
            return Err(format!("edge {} does not land on one strand", e.id));
        }
    }
    let mut senses = BTreeSet::new();
    for v in &t.vertices {
        let k = v.rot.len();
        if k < 3 {
            continue;
        }
        let imgs: Vec<usize> = v.rot.iter().map(|&d| map[d]).collect();
        let cv = net.vtx(imgs[0]);
        let r: Vec<usize> = net
            .real_rot(cv)
            .into_iter()
            .filter(|d| imgs.contains(d))
            .collect();
        let p0 = r.iter().position(|&x| x == imgs[0]).unwrap();
        let fwd = (0..k).all(|i| r[(p0 + i) % k] == imgs[i]);
        let bwd = (0..k).all(|i| r[(p0 + k - i) % k] == imgs[i]);
        match (fwd, bwd) {
            (true, _) => senses.insert(false),
            (_, true) => senses.insert(true),
            _ => return Err(format!("rotation at {} is scrambled", v.id)),
        };
    }
    if senses.len() > 1 {
        return Err("some vertices are mirrored and others are not".into());
    }
    Ok(())
}
