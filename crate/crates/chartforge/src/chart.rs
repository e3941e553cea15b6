//! Charts as labeled oriented combinatorial maps on the 2-sphere.
//!
//! Every vertex carries a counterclockwise rotation of darts. An edge owns two
//! darts, the tail (outward at its vertex) and the head (inward). A closed edge
//! without vertices hangs on a single phantom vertex. Disconnected pieces are
//! joined by invisible tethers, one per placement, so the whole sphere is one
//! connected map and its faces are exactly the complementary domains.

use crate::error::{parse_err, Error, Result};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Dir {
    In,
    Out,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::In => Dir::Out,
            Dir::Out => Dir::In,
        }
    }
    pub fn sign(self) -> i32 {
        match self {
            Dir::In => 1,
            Dir::Out => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VertexKind {
    Black,
    Crossing,
    White,
    Phantom,
}

impl VertexKind {
    pub fn degree(self) -> usize {
        match self {
            VertexKind::Black => 1,
            VertexKind::Crossing => 4,
            VertexKind::White => 6,
            VertexKind::Phantom => 2,
        }
    }
    fn keyword(self) -> &'static str {
        match self {
            VertexKind::Black => "black",
            VertexKind::Crossing => "cross",
            VertexKind::White => "white",
            VertexKind::Phantom => "phantom",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Link {
    Edge(usize),
    Tether(usize),
}

#[derive(Clone, Debug)]
pub struct Dart {
    pub id: String,
    pub vertex: usize,
    pub link: Link,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
    /// Counterclockwise, tethers included.
    pub rot: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub id: String,
    pub label: u32,
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub n: u32,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub darts: Vec<Dart>,
    pub tethers: Vec<[usize; 2]>,
    /// A real dart on the infinity face; `None` only for the empty chart.
    pub infinity: Option<usize>,
}

/// Face orbits of the full map.
#[derive(Clone, Debug)]
pub struct Faces {
    pub orbits: Vec<Vec<usize>>,
    pub face_of: Vec<usize>,
}

impl Faces {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub rule: String,
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }
    pub fn has(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

fn violation(rule: &str, location: impl Into<String>, message: impl Into<String>) -> Violation {
    Violation {
        rule: rule.to_string(),
        location: location.into(),
        message: message.into(),
    }
}

impl Chart {
    pub fn empty(n: u32) -> Chart {
        Chart {
            n,
            vertices: vec![],
            edges: vec![],
            darts: vec![],
            tethers: vec![],
            infinity: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_real(&self, d: usize) -> bool {
        matches!(self.darts[d].link, Link::Edge(_))
    }

    pub fn edge_of(&self, d: usize) -> Option<usize> {
        match self.darts[d].link {
            Link::Edge(e) => Some(e),
            Link::Tether(_) => None,
        }
    }

    /// Label of a real dart.
    pub fn label(&self, d: usize) -> u32 {
        self.edges[self.edge_of(d).expect("tether has no label")].label
    }

    /// Direction of a real dart relative to its vertex.
    pub fn dir(&self, d: usize) -> Dir {
        let e = self.edge_of(d).expect("tether has no direction");
        if self.edges[e].tail == d {
            Dir::Out
        } else {
            Dir::In
        }
    }

    pub fn twin(&self, d: usize) -> usize {
        match self.darts[d].link {
            Link::Edge(e) => {
                let ed = &self.edges[e];
                if ed.tail == d {
                    ed.head
                } else {
                    ed.tail
                }
            }
            Link::Tether(t) => {
                let [a, b] = self.tethers[t];
                if a == d {
                    b
                } else {
                    a
                }
            }
        }
    }

    pub fn vertex_of(&self, d: usize) -> usize {
        self.darts[d].vertex
    }

    pub fn kind_of(&self, d: usize) -> VertexKind {
        self.vertices[self.darts[d].vertex].kind
    }

    fn rot_pos(&self, d: usize) -> usize {
        let v = &self.vertices[self.darts[d].vertex];
        v.rot
            .iter()
            .position(|&x| x == d)
            .expect("dart missing from its rotation")
    }

    /// Counterclockwise successor at the dart's vertex (tethers included).
    pub fn next_at(&self, d: usize) -> usize {
        let v = &self.vertices[self.darts[d].vertex];
        let p = self.rot_pos(d);
        v.rot[(p + 1) % v.rot.len()]
    }

    pub fn prev_at(&self, d: usize) -> usize {
        let v = &self.vertices[self.darts[d].vertex];
        let p = self.rot_pos(d);
        v.rot[(p + v.rot.len() - 1) % v.rot.len()]
    }

    pub fn next_real_at(&self, d: usize) -> usize {
        let mut x = self.next_at(d);
        while !self.is_real(x) {
            x = self.next_at(x);
        }
        x
    }

    pub fn prev_real_at(&self, d: usize) -> usize {
        let mut x = self.prev_at(d);
        while !self.is_real(x) {
            x = self.prev_at(x);
        }
        x
    }

    /// Real darts of a vertex, counterclockwise.
    pub fn real_rot(&self, v: usize) -> Vec<usize> {
        self.vertices[v]
            .rot
            .iter()
            .copied()
            .filter(|&d| self.is_real(d))
            .collect()
    }

    /// Face permutation: the face on the right of `d` continues with this dart.
    pub fn face_next(&self, d: usize) -> usize {
        self.next_at(self.twin(d))
    }

    pub fn faces(&self) -> Faces {
        let mut face_of = vec![usize::MAX; self.darts.len()];
        let mut orbits = Vec::new();
        for s in 0..self.darts.len() {
            if face_of[s] != usize::MAX {
                continue;
            }
            let idx = orbits.len();
            let mut orbit = Vec::new();
            let mut d = s;
            loop {
                face_of[d] = idx;
                orbit.push(d);
                d = self.face_next(d);
                if d == s {
                    break;
                }
            }
            orbits.push(orbit);
        }
        Faces { orbits, face_of }
    }

    /// Number of faces on the sphere (the empty chart has one).
    pub fn face_count(&self) -> usize {
        if self.darts.is_empty() {
            1
        } else {
            self.faces().count()
        }
    }

    /// Connected components through real edges, as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(self.darts[e.tail].vertex, self.darts[e.head].vertex);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.vertices.len() {
            groups.entry(uf.find(v)).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn component_index(&self) -> Vec<usize> {
        let comps = self.components();
        let mut idx = vec![0; self.vertices.len()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                idx[v] = i;
            }
        }
        idx
    }

    /// Vertex count excluding phantoms.
    pub fn visible_vertices(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.kind != VertexKind::Phantom)
            .count()
    }

    pub fn white_count(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.kind == VertexKind::White)
            .count()
    }

    pub fn crossing_count(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.kind == VertexKind::Crossing)
            .count()
    }

    pub fn hoop_count(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.kind == VertexKind::Phantom)
            .count()
    }

    pub fn vertex_by_id(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn dart_by_id(&self, id: &str) -> Option<usize> {
        self.darts
            .iter()
            .position(|d| d.id == id && matches!(d.link, Link::Edge(_)))
    }

    pub fn edge_by_id(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Face index holding the infinity point.
    pub fn infinity_face(&self, faces: &Faces) -> Option<usize> {
        self.infinity.map(|d| faces.face_of[d])
    }

    /// Reverse every rotation: the mirror image on the sphere.
    pub fn reflect(&self) -> Chart {
        let mut c = self.clone();
        for v in &mut c.vertices {
            v.rot.reverse();
        }
        // the region right of d lies left of d in the mirror, i.e. right of its twin
        c.infinity = self.infinity.map(|d| self.twin(d));
        c
    }

    /// Reverse the orientation of every edge.
    pub fn reverse_orientation(&self) -> Chart {
        let mut c = self.clone();
        for e in &mut c.edges {
            std::mem::swap(&mut e.tail, &mut e.head);
        }
        c
    }

    pub fn validate(&self) -> ValidationReport {
        ValidationReport::from_violations(self.violations())
    }

    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        // structure: each dart in exactly one rotation position and one link
        let mut seen = vec![0usize; self.darts.len()];
        for (vi, v) in self.vertices.iter().enumerate() {
            for &d in &v.rot {
                if d >= self.darts.len() {
                    out.push(violation(
                        "face-closure",
                        &v.id,
                        "rotation names a missing dart",
                    ));
                    continue;
                }
                seen[d] += 1;
                if self.darts[d].vertex != vi {
                    out.push(violation(
                        "face-closure",
                        &v.id,
                        format!("dart {} listed at the wrong vertex", self.darts[d].id),
                    ));
                }
            }
        }
        let mut linked = vec![0usize; self.darts.len()];
        for (i, e) in self.edges.iter().enumerate() {
            for d in [e.tail, e.head] {
                if d < self.darts.len() {
                    linked[d] += 1;
                    if self.darts[d].link != Link::Edge(i) {
                        out.push(violation(
                            "face-closure",
                            &e.id,
                            "edge dart links elsewhere",
                        ));
                    }
                }
            }
            if e.tail == e.head {
                out.push(violation("face-closure", &e.id, "edge uses one dart twice"));
            }
        }
        for (i, t) in self.tethers.iter().enumerate() {
            for &d in t {
                if d < self.darts.len() {
                    linked[d] += 1;
                    if self.darts[d].link != Link::Tether(i) {
                        out.push(violation(
                            "face-closure",
                            format!("tether {i}"),
                            "tether dart links elsewhere",
                        ));
                    }
                }
            }
        }
        for d in 0..self.darts.len() {
            if seen[d] != 1 || linked[d] != 1 {
                out.push(violation(
                    "face-closure",
                    &self.darts[d].id,
                    "dart is not in exactly one rotation and one edge",
                ));
            }
        }
        if !out.is_empty() {
            return out;
        }

        for v in &self.vertices {
            let rr: Vec<usize> = v.rot.iter().copied().filter(|&d| self.is_real(d)).collect();
            if rr.len() != v.kind.degree() {
                out.push(violation(
                    "i-degree",
                    &v.id,
                    format!("{} vertex has degree {}", v.kind.keyword(), rr.len()),
                ));
                continue;
            }
            match v.kind {
                VertexKind::White => {
                    let labels: Vec<u32> = rr.iter().map(|&d| self.label(d)).collect();
                    let (a, b) = (labels[0], labels[1]);
                    let alt = a.abs_diff(b) == 1
                        && (0..6).all(|i| labels[i] == if i % 2 == 0 { a } else { b });
                    if !alt {
                        out.push(violation(
                            "iii-white",
                            &v.id,
                            format!("labels {labels:?} do not alternate i, i+1"),
                        ));
                    }
                    let dirs: Vec<Dir> = rr.iter().map(|&d| self.dir(d)).collect();
                    if inward_block_start(&dirs).is_none() {
                        out.push(violation(
                            "iii-white",
                            &v.id,
                            "no three consecutive inward arcs opposite three outward",
                        ));
                    }
                }
                VertexKind::Crossing => {
                    for k in 0..2 {
                        let (x, y) = (rr[k], rr[k + 2]);
                        if self.label(x) != self.label(y) {
                            out.push(violation(
                                "iv-crossing",
                                &v.id,
                                "diagonal darts have different labels",
                            ));
                        }
                        if self.dir(x) == self.dir(y) {
                            out.push(violation(
                                "iv-crossing",
                                &v.id,
                                "diagonal is not oriented coherently",
                            ));
                        }
                    }
                    let (i, j) = (self.label(rr[0]), self.label(rr[1]));
                    if i.abs_diff(j) <= 1 {
                        out.push(violation(
                            "iv-crossing",
                            &v.id,
                            format!("diagonal labels {i} and {j} differ by at most one"),
                        ));
                    }
                }
                VertexKind::Phantom => {
                    if self.edge_of(rr[0]) != self.edge_of(rr[1]) {
                        out.push(violation(
                            "phantom",
                            &v.id,
                            "phantom must carry one closed edge",
                        ));
                    }
                }
                VertexKind::Black => {}
            }
        }
        for e in &self.edges {
            if e.label < 1 || e.label + 1 > self.n {
                out.push(violation(
                    "ii-label",
                    &e.id,
                    format!("label {} not in 1..{}", e.label, self.n.saturating_sub(1)),
                ));
            }
            if self.kind_of(e.tail) == VertexKind::Phantom
                || self.kind_of(e.head) == VertexKind::Phantom
            {
                if self.darts[e.tail].vertex != self.darts[e.head].vertex {
                    out.push(violation("phantom", &e.id, "edge leaves a phantom vertex"));
                }
            }
        }

        // placement tree
        let comps = self.components();
        let cidx = self.component_index();
        let c = comps.len();
        let mut uf = UnionFind::new(c);
        for (i, t) in self.tethers.iter().enumerate() {
            let (a, b) = (cidx[self.darts[t[0]].vertex], cidx[self.darts[t[1]].vertex]);
            if a == b || !uf.union(a, b) {
                out.push(violation(
                    "placement",
                    format!("tether {i}"),
                    "placement tree has a cycle",
                ));
            }
        }
        if c > 0 && self.tethers.len() + 1 != c {
            out.push(violation(
                "placement",
                "chart",
                format!("{} components but {} placements", c, self.tethers.len()),
            ));
        }

        // Euler over the sphere
        let v = self.vertices.len() as i64;
        let e = self.edges.len() as i64;
        let f = self.face_count() as i64;
        if v - e + f != 1 + c as i64 {
            out.push(violation(
                "euler",
                "chart",
                format!("V - E + F = {} - {} + {} != 1 + {}", v, e, f, c),
            ));
        }

        match self.infinity {
            None if !self.is_empty() => out.push(violation(
                "infinity",
                "chart",
                "nonempty chart without infinity face",
            )),
            Some(d) if d >= self.darts.len() || !self.is_real(d) => out.push(violation(
                "infinity",
                "chart",
                "infinity dart is not a real dart",
            )),
            _ => {}
        }
        out
    }

    /// Canonical text: byte-identical for equal charts.
    pub fn to_text(&self) -> String {
        let mut s = format!("chart n={}\n", self.n);
        let mut vorder: Vec<usize> = (0..self.vertices.len()).collect();
        vorder.sort_by(|&a, &b| self.vertices[a].id.cmp(&self.vertices[b].id));
        for &vi in &vorder {
            let v = &self.vertices[vi];
            let rr = self.real_rot(vi);
            let start = (0..rr.len())
                .min_by(|&a, &b| self.darts[rr[a]].id.cmp(&self.darts[rr[b]].id))
                .unwrap_or(0);
            let ids: Vec<&str> = (0..rr.len())
                .map(|k| self.darts[rr[(start + k) % rr.len()]].id.as_str())
                .collect();
            s.push_str(&format!(
                "{} {} darts={}\n",
                v.kind.keyword(),
                v.id,
                ids.join(",")
            ));
        }
        let mut eorder: Vec<usize> = (0..self.edges.len()).collect();
        eorder.sort_by(|&a, &b| self.edges[a].id.cmp(&self.edges[b].id));
        for &ei in &eorder {
            let e = &self.edges[ei];
            s.push_str(&format!(
                "edge {} label={} tail={} head={}\n",
                e.id, e.label, self.darts[e.tail].id, self.darts[e.head].id
            ));
        }
        let mut places = self.place_lines();
        places.sort();
        for p in places {
            s.push_str(&p);
            s.push('\n');
        }
        match self.infinity {
            None => s.push_str("infinity root\n"),
            Some(d) => {
                let faces = self.faces();
                let best = faces.orbits[faces.face_of[d]]
                    .iter()
                    .copied()
                    .filter(|&x| self.is_real(x))
                    .min_by(|&a, &b| self.darts[a].id.cmp(&self.darts[b].id))
                    .unwrap_or(d);
                s.push_str(&format!("infinity face({})\n", self.darts[best].id));
            }
        }
        s
    }

    fn place_lines(&self) -> Vec<String> {
        if self.tethers.is_empty() {
            return vec![];
        }
        let comps = self.components();
        let cidx = self.component_index();
        // root: component holding the smallest vertex id
        let root = (0..self.vertices.len())
            .min_by(|&a, &b| self.vertices[a].id.cmp(&self.vertices[b].id))
            .map(|v| cidx[v])
            .unwrap_or(0);
        let mut adj: Vec<Vec<(usize, usize)>> = vec![vec![]; comps.len()];
        for (i, t) in self.tethers.iter().enumerate() {
            let (a, b) = (cidx[self.darts[t[0]].vertex], cidx[self.darts[t[1]].vertex]);
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        let mut lines = Vec::new();
        let mut visited = vec![false; comps.len()];
        let mut stack = vec![root];
        visited[root] = true;
        while let Some(cur) = stack.pop() {
            for &(nb, t) in &adj[cur] {
                if visited[nb] {
                    continue;
                }
                visited[nb] = true;
                let [x, y] = self.tethers[t];
                let (host, child) = if cidx[self.darts[x].vertex] == cur {
                    (x, y)
                } else {
                    (y, x)
                };
                let h = self.next_real_at(host);
                let c = self.next_real_at(child);
                lines.push(format!(
                    "place face({}) in face({})",
                    self.darts[c].id, self.darts[h].id
                ));
                stack.push(nb);
            }
        }
        lines
    }

    /// Add a tether from the corner just before real dart `host` to the corner just before `child`.
    pub fn add_tether(&mut self, host: usize, child: usize) {
        let t = self.tethers.len();
        let a = self.darts.len();
        let b = a + 1;
        let hv = self.darts[host].vertex;
        let cv = self.darts[child].vertex;
        self.darts.push(Dart {
            id: String::new(),
            vertex: hv,
            link: Link::Tether(t),
        });
        self.darts.push(Dart {
            id: String::new(),
            vertex: cv,
            link: Link::Tether(t),
        });
        self.tethers.push([a, b]);
        let hp = self.rot_pos(host);
        self.vertices[hv].rot.insert(hp, a);
        let cp = self.rot_pos(child);
        self.vertices[cv].rot.insert(cp, b);
    }

    pub fn fresh_id(&self, prefix: &str) -> String {
        let used: HashSet<&str> = self
            .vertices
            .iter()
            .map(|v| v.id.as_str())
            .chain(self.edges.iter().map(|e| e.id.as_str()))
            .chain(self.darts.iter().map(|d| d.id.as_str()))
            .collect();
        let mut k = 1;
        loop {
            let id = format!("{prefix}{k}");
            if !used.contains(id.as_str()) {
                return id;
            }
            k += 1;
        }
    }
}

/// Start index of the inward block of three in a cyclic pattern of six directions.
pub fn inward_block_start(dirs: &[Dir]) -> Option<usize> {
    if dirs.len() != 6 || dirs.iter().filter(|&&d| d == Dir::In).count() != 3 {
        return None;
    }
    (0..6).find(|&s| (0..3).all(|k| dirs[(s + k) % 6] == Dir::In))
}

pub(crate) struct UnionFind {
    p: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            p: (0..n).collect(),
        }
    }
    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.p[r] != r {
            r = self.p[r];
        }
        let mut y = x;
        while self.p[y] != r {
            let nx = self.p[y];
            self.p[y] = r;
            y = nx;
        }
        r
    }
    /// Returns false when already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.p[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Parse the line-oriented chart format.
pub fn build_chart(text: &str) -> Result<Chart> {
    let mut n: Option<u32> = None;
    let mut chart = Chart::empty(0);
    let mut dart_ix: HashMap<String, usize> = HashMap::new();
    let mut vertex_ids: HashSet<String> = HashSet::new();
    let mut edge_ids: HashSet<String> = HashSet::new();
    let mut pending_edges: Vec<(usize, String, u32, String, String)> = Vec::new();
    let mut places: Vec<(usize, String, String)> = Vec::new();
    let mut infinity: Option<(usize, Option<String>)> = None;

    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "chart" => {
                let v = field(&toks, "n", ln)?;
                let nv: u32 = v
                    .parse()
                    .map_err(|_| parse_err(ln, "n must be an integer"))?;
                if nv < 2 {
                    return Err(parse_err(ln, "degree must be at least 2"));
                }
                n = Some(nv);
            }
            kw @ ("white" | "cross" | "black" | "phantom") => {
                let kind = match kw {
                    "white" => VertexKind::White,
                    "cross" => VertexKind::Crossing,
                    "black" => VertexKind::Black,
                    _ => VertexKind::Phantom,
                };
                let id = toks
                    .get(1)
                    .ok_or_else(|| parse_err(ln, "vertex id missing"))?
                    .to_string();
                if !vertex_ids.insert(id.clone()) {
                    return Err(parse_err(ln, format!("duplicate vertex {id}")));
                }
                let list = field(&toks, "darts", ln)?;
                let vi = chart.vertices.len();
                let mut rot = Vec::new();
                for did in list.split(',').filter(|s| !s.is_empty()) {
                    if dart_ix.contains_key(did) {
                        return Err(parse_err(ln, format!("dart {did} listed twice")));
                    }
                    let di = chart.darts.len();
                    chart.darts.push(Dart {
                        id: did.to_string(),
                        vertex: vi,
                        link: Link::Edge(usize::MAX),
                    });
                    dart_ix.insert(did.to_string(), di);
                    rot.push(di);
                }
                chart.vertices.push(Vertex { id, kind, rot });
            }
            "edge" => {
                let id = toks
                    .get(1)
                    .ok_or_else(|| parse_err(ln, "edge id missing"))?
                    .to_string();
                if !edge_ids.insert(id.clone()) {
                    return Err(parse_err(ln, format!("duplicate edge {id}")));
                }
                let label: u32 = field(&toks, "label", ln)?
                    .parse()
                    .map_err(|_| parse_err(ln, "bad label"))?;
                let tail = field(&toks, "tail", ln)?.to_string();
                let head = field(&toks, "head", ln)?.to_string();
                pending_edges.push((ln, id, label, tail, head));
            }
            "place" => {
                if toks.len() != 4 || toks[2] != "in" {
                    return Err(parse_err(ln, "expected: place <root> in <face>"));
                }
                places.push((ln, toks[1].to_string(), toks[3].to_string()));
            }
            "infinity" => {
                let key = toks
                    .get(1)
                    .ok_or_else(|| parse_err(ln, "infinity face missing"))?;
                infinity = Some((ln, face_key(key, ln)?));
            }
            other => return Err(parse_err(ln, format!("unknown keyword {other}"))),
        }
    }
    chart.n = n.ok_or_else(|| parse_err(0, "missing chart header"))?;

    for (ln, id, label, tail, head) in pending_edges {
        let t = *dart_ix
            .get(&tail)
            .ok_or_else(|| Error::DanglingReference(format!("dart {tail} (line {ln})")))?;
        let h = *dart_ix
            .get(&head)
            .ok_or_else(|| Error::DanglingReference(format!("dart {head} (line {ln})")))?;
        let ei = chart.edges.len();
        for d in [t, h] {
            if chart.darts[d].link != Link::Edge(usize::MAX) {
                return Err(parse_err(
                    ln,
                    format!("dart {} used by two edges", chart.darts[d].id),
                ));
            }
            chart.darts[d].link = Link::Edge(ei);
        }
        chart.edges.push(Edge {
            id,
            label,
            tail: t,
            head: h,
        });
    }
    if let Some(d) = chart
        .darts
        .iter()
        .find(|d| d.link == Link::Edge(usize::MAX))
    {
        return Err(Error::DanglingReference(format!(
            "dart {} has no edge",
            d.id
        )));
    }

    let lookup = |id: &str| -> Result<usize> {
        dart_ix
            .get(id)
            .copied()
            .ok_or_else(|| Error::DanglingReference(format!("dart {id}")))
    };
    let mut root_seen = false;
    for (ln, who, host) in places {
        let child = if let Some(inner) = who.strip_prefix("face(").and_then(|s| s.strip_suffix(')'))
        {
            lookup(inner)?
        } else {
            let v = chart
                .vertices
                .iter()
                .position(|v| v.id == who)
                .ok_or_else(|| Error::DanglingReference(format!("vertex {who}")))?;
            *chart.vertices[v]
                .rot
                .first()
                .ok_or_else(|| parse_err(ln, "placed vertex has no darts"))?
        };
        match face_key(&host, ln)? {
            None => {
                if root_seen {
                    return Err(parse_err(ln, "two components placed at the root"));
                }
                root_seen = true;
            }
            Some(h) => {
                let h = lookup(&h)?;
                chart.add_tether(h, child);
            }
        }
    }
    chart.infinity = match infinity {
        Some((_, Some(d))) => Some(lookup(&d)?),
        Some((ln, None)) => {
            if chart.darts.is_empty() {
                None
            } else {
                let _ = ln;
                chart.real_rot(0).first().copied()
            }
        }
        None if chart.vertices.is_empty() => None,
        None => chart.real_rot(0).first().copied(),
    };
    if chart.vertices.is_empty() {
        chart.infinity = None;
    }
    Ok(chart)
}

fn field<'a>(toks: &[&'a str], key: &str, ln: usize) -> Result<&'a str> {
    toks.iter()
        .find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| parse_err(ln, format!("missing {key}=")))
}

fn face_key(key: &str, ln: usize) -> Result<Option<String>> {
    if key == "root" {
        return Ok(None);
    }
    key.strip_prefix("face(")
        .and_then(|s| s.strip_suffix(')'))
        .map(|s| Some(s.to_string()))
        .ok_or_else(|| parse_err(ln, format!("bad face key {key}")))
}

impl std::str::FromStr for Chart {
    type Err = Error;
    fn from_str(s: &str) -> Result<Chart> {
        build_chart(s)
    }
}

/// Faces joined across every dart for which `barrier` is false; returns a region id per face.
pub fn face_regions(chart: &Chart, faces: &Faces, barrier: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut uf = UnionFind::new(faces.count());
    for d in 0..chart.darts.len() {
        if !barrier(d) {
            uf.union(faces.face_of[d], faces.face_of[chart.twin(d)]);
        }
    }
    (0..faces.count()).map(|f| uf.find(f)).collect()
}

/// (w, -f): white vertices and negated free-edge count.
pub fn complexity(chart: &Chart) -> (usize, i64) {
    let free = crate::features::all_strands(chart)
        .iter()
        .filter(|s| s.class == crate::features::StrandClass::Free)
        .count();
    (chart.white_count(), -(free as i64))
}

/// Γ_m: label-m edges with the whites, blacks and crossings they touch.
#[derive(Clone, Debug, Default)]
pub struct SubgraphView {
    pub label: u32,
    pub edges: Vec<usize>,
    pub whites: Vec<usize>,
    pub blacks: Vec<usize>,
    pub crossings: Vec<usize>,
    pub phantoms: Vec<usize>,
}

impl SubgraphView {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

pub fn gamma(chart: &Chart, m: u32) -> Result<SubgraphView> {
    if m < 1 || m + 1 > chart.n {
        return Err(Error::LabelOutOfRange {
            label: m,
            n: chart.n,
        });
    }
    let mut view = SubgraphView {
        label: m,
        ..Default::default()
    };
    let mut vs = Vec::new();
    for (i, e) in chart.edges.iter().enumerate() {
        if e.label == m {
            view.edges.push(i);
            vs.push(chart.vertex_of(e.tail));
            vs.push(chart.vertex_of(e.head));
        }
    }
    vs.sort();
    vs.dedup();
    for v in vs {
        match chart.vertices[v].kind {
            VertexKind::White => view.whites.push(v),
            VertexKind::Black => view.blacks.push(v),
            VertexKind::Crossing => view.crossings.push(v),
            VertexKind::Phantom => view.phantoms.push(v),
        }
    }
    Ok(view)
}

/// Type (m; n_1, ..., n_k) of a chart with white vertices.
pub fn chart_type(chart: &Chart) -> Option<(u32, Vec<usize>)> {
    let mut pairs: BTreeMap<u32, usize> = BTreeMap::new();
    for (v, vx) in chart.vertices.iter().enumerate() {
        if vx.kind == VertexKind::White {
            let low = chart.real_rot(v).iter().map(|&d| chart.label(d)).min()?;
            *pairs.entry(low).or_default() += 1;
        }
    }
    let (&m, _) = pairs.iter().next()?;
    let (&top, _) = pairs.iter().next_back()?;
    let counts = (m..=top)
        .map(|i| pairs.get(&i).copied().unwrap_or(0))
        .collect();
    Some((m, counts))
}

/// Assumptions 2-4 on a valid chart.
pub fn check_assumptions(chart: &Chart) -> ValidationReport {
    use crate::features::{all_strands, dart_is_middle, StrandClass};
    let mut out = Vec::new();
    let strands = all_strands(chart);
    let faces = chart.faces();
    for s in &strands {
        let name = s
            .edges
            .first()
            .map(|&e| chart.edges[e].id.clone())
            .unwrap_or_default();
        match s.class {
            StrandClass::Terminal => {
                let [a, b] = s.ends.unwrap();
                let w = if chart.kind_of(a) == VertexKind::White {
                    a
                } else {
                    b
                };
                if !dart_is_middle(chart, w) {
                    out.push(violation(
                        "A2",
                        &name,
                        "terminal edge is not middle at its white vertex",
                    ));
                }
            }
            StrandClass::Free => out.push(violation("A3", &name, "free edge present")),
            StrandClass::Hoop | StrandClass::Ring => {
                let on: HashSet<usize> = s.darts.iter().copied().collect();
                let region = face_regions(chart, &faces, |d| on.contains(&d));
                let right = region[faces.face_of[s.darts[0]]];
                let left = region[faces.face_of[s.darts[1]]];
                let mut has = [false, false];
                for (v, vx) in chart.vertices.iter().enumerate() {
                    if vx.kind != VertexKind::White {
                        continue;
                    }
                    let r = region[faces.face_of[vx.rot[0]]];
                    let _ = v;
                    if r == right {
                        has[0] = true;
                    }
                    if r == left {
                        has[1] = true;
                    }
                }
                if !(has[0] && has[1]) {
                    if s.class == StrandClass::Hoop {
                        out.push(violation("A3", &name, "simple hoop present"));
                    }
                    out.push(violation(
                        "A4",
                        &name,
                        "a complementary domain holds no white vertex",
                    ));
                }
            }
            _ => {}
        }
    }
    ValidationReport::from_violations(out)
}

/// Rooted code of the component through real dart `r`: darts numbered in
/// discovery order, each recorded with its vertex kind, label, direction,
/// twin and rotation successor. Also returns component-face numbering.
fn rooted_code(chart: &Chart, r: usize) -> (Vec<u32>, Vec<usize>) {
    let mut num: HashMap<usize, u32> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    let mut seen_v: HashSet<usize> = HashSet::new();
    let mut visit = |d: usize, num: &mut HashMap<usize, u32>, order: &mut Vec<usize>| {
        let v = chart.vertex_of(d);
        if !seen_v.insert(v) {
            return;
        }
        let mut x = d;
        loop {
            num.insert(x, order.len() as u32);
            order.push(x);
            x = chart.next_real_at(x);
            if x == d {
                break;
            }
        }
    };
    visit(r, &mut num, &mut order);
    let mut i = 0;
    while i < order.len() {
        let t = chart.twin(order[i]);
        visit(t, &mut num, &mut order);
        i += 1;
    }
    let mut code = Vec::with_capacity(order.len() * 5);
    for &d in &order {
        code.push(chart.kind_of(d) as u32);
        code.push(chart.label(d));
        code.push(chart.dir(d) as u32);
        code.push(num[&chart.twin(d)]);
        code.push(num[&chart.next_real_at(d)]);
    }
    (code, order)
}

/// Faces of the chart with tethers ignored: orbits of d -> next_real(twin d).
fn real_face_orbits(chart: &Chart) -> (Vec<Vec<usize>>, HashMap<usize, usize>) {
    let mut face_of = HashMap::new();
    let mut orbits = Vec::new();
    for s in 0..chart.darts.len() {
        if !chart.is_real(s) || face_of.contains_key(&s) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut d = s;
        loop {
            face_of.insert(d, orbits.len());
            orbit.push(d);
            d = chart.next_real_at(chart.twin(d));
            if d == s {
                break;
            }
        }
        orbits.push(orbit);
    }
    (orbits, face_of)
}

struct Nesting<'a> {
    chart: &'a Chart,
    comp: Vec<usize>,
    /// component-face -> domain (face of the full map)
    domain_of: Vec<usize>,
    cfaces: Vec<Vec<usize>>,
    cface_of: HashMap<usize, usize>,
    /// domain -> component-faces bordering it
    borders: Vec<Vec<usize>>,
}

impl Nesting<'_> {
    fn domain(&self, dom: usize, parent_comp: Option<usize>) -> String {
        let mut parts: Vec<String> = self.borders[dom]
            .iter()
            .filter(|&&cf| Some(self.comp[self.chart.vertex_of(self.cfaces[cf][0])]) != parent_comp)
            .map(|&cf| self.component(cf))
            .collect();
        parts.sort();
        format!("[{}]", parts.join(","))
    }

    fn component(&self, entry: usize) -> String {
        let c = self.comp[self.chart.vertex_of(self.cfaces[entry][0])];
        let mut best: Option<String> = None;
        for &r in &self.cfaces[entry] {
            let (code, order) = rooted_code(self.chart, r);
            let mut s = canonical_string(&code);
            let mut seen = HashSet::new();
            seen.insert(entry);
            for d in order {
                let cf = self.cface_of[&d];
                if seen.insert(cf) {
                    s.push('{');
                    s.push_str(&self.domain(self.domain_of[cf], Some(c)));
                    s.push('}');
                }
            }
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
        best.unwrap_or_default()
    }
}

fn canonical_string(code: &[u32]) -> String {
    code.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

/// Isomorphism-invariant text for a valid chart: equal exactly when two
/// charts agree up to renaming, as maps on the sphere with the infinity
/// face marked.
pub fn canonical_form(chart: &Chart) -> String {
    let Some(inf) = chart.infinity else {
        return format!("n={} empty", chart.n);
    };
    let comp = chart.component_index();
    let full = chart.faces();
    let (cfaces, cface_of) = real_face_orbits(chart);
    let domain_of: Vec<usize> = cfaces.iter().map(|o| full.face_of[o[0]]).collect();
    let mut borders = vec![Vec::new(); full.count()];
    for (cf, &dom) in domain_of.iter().enumerate() {
        borders[dom].push(cf);
    }
    let nest = Nesting {
        chart,
        comp,
        domain_of,
        cfaces,
        cface_of,
        borders,
    };
    format!("n={} {}", chart.n, nest.domain(full.face_of[inf], None))
}

pub fn isomorphic(a: &Chart, b: &Chart) -> bool {
    a.n == b.n
        && a.vertices.len() == b.vertices.len()
        && a.edges.len() == b.edges.len()
        && canonical_form(a) == canonical_form(b)
}
