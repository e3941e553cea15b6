//! Abstract Γ_m graphs: trivalent whites, univalent blacks, optional edge
//! orientations, and RO-equivalence (reflection and global reversal).

use crate::chart::{build_chart, inward_block_start, Chart, Dir, VertexKind};
use crate::error::{parse_err, Error, Result};
use crate::features::{GammaComponent, StrandClass};
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TKind {
    White,
    Black,
}

#[derive(Clone, Debug)]
pub struct TVertex {
    pub id: String,
    pub kind: TKind,
    /// A white whose terminal edge has been contracted away.
    pub bw: bool,
    pub rot: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TDart {
    pub id: String,
    pub vertex: usize,
    pub edge: usize,
    /// Direction at its vertex when the edge is oriented.
    pub dir: Option<Dir>,
}

#[derive(Clone, Debug)]
pub struct TEdge {
    pub id: String,
    pub darts: [usize; 2],
}

#[derive(Clone, Debug)]
pub struct GraphTemplate {
    pub name: String,
    pub vertices: Vec<TVertex>,
    pub darts: Vec<TDart>,
    pub edges: Vec<TEdge>,
    /// Named regions, each given by a dart with the region on its right.
    pub disks: Vec<(String, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Variant {
    pub mirror: bool,
    pub reverse: bool,
}

pub const VARIANTS: [Variant; 4] = [
    Variant {
        mirror: false,
        reverse: false,
    },
    Variant {
        mirror: true,
        reverse: false,
    },
    Variant {
        mirror: false,
        reverse: true,
    },
    Variant {
        mirror: true,
        reverse: true,
    },
];

impl GraphTemplate {
    pub fn parse(text: &str) -> Result<GraphTemplate> {
        let mut t = GraphTemplate {
            name: String::new(),
            vertices: vec![],
            darts: vec![],
            edges: vec![],
            disks: vec![],
        };
        let mut ix: HashMap<String, usize> = HashMap::new();
        let mut pending = Vec::new();
        for (ln0, raw) in text.lines().enumerate() {
            let ln = ln0 + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "template" => {
                    t.name = toks
                        .get(1)
                        .ok_or_else(|| parse_err(ln, "template name missing"))?
                        .to_string()
                }
                "white" | "black" => {
                    let kind = if toks[0] == "white" {
                        TKind::White
                    } else {
                        TKind::Black
                    };
                    let id = toks
                        .get(1)
                        .ok_or_else(|| parse_err(ln, "vertex id missing"))?
                        .to_string();
                    let bw = toks.contains(&"bw");
                    let list = toks
                        .iter()
                        .find_map(|s| s.strip_prefix("darts="))
                        .ok_or_else(|| parse_err(ln, "missing darts="))?;
                    let vi = t.vertices.len();
                    let mut rot = Vec::new();
                    for d in list.split(',').filter(|s| !s.is_empty()) {
                        if ix.contains_key(d) {
                            return Err(parse_err(ln, format!("dart {d} listed twice")));
                        }
                        ix.insert(d.to_string(), t.darts.len());
                        rot.push(t.darts.len());
                        t.darts.push(TDart {
                            id: d.to_string(),
                            vertex: vi,
                            edge: usize::MAX,
                            dir: None,
                        });
                    }
                    t.vertices.push(TVertex { id, kind, bw, rot });
                }
                "edge" => {
                    let id = toks
                        .get(1)
                        .ok_or_else(|| parse_err(ln, "edge id missing"))?
                        .to_string();
                    let (a, b, oriented) = match toks.len() {
                        4 => (toks[2], toks[3], false),
                        5 if toks[3] == "->" => (toks[2], toks[4], true),
                        _ => return Err(parse_err(ln, "expected: edge <id> <dart> [->] <dart>")),
                    };
                    pending.push((ln, id, a.to_string(), b.to_string(), oriented));
                }
                "disk" => {
                    let name = toks
                        .get(1)
                        .ok_or_else(|| parse_err(ln, "disk name missing"))?
                        .to_string();
                    let key = toks
                        .get(2)
                        .and_then(|s| s.strip_prefix("face("))
                        .and_then(|s| s.strip_suffix(')'))
                        .ok_or_else(|| parse_err(ln, "expected face(<dart>)"))?;
                    pending.push((ln, name, key.to_string(), String::new(), false));
                }
                other => return Err(parse_err(ln, format!("unknown keyword {other}"))),
            }
        }
        for (_ln, id, a, b, oriented) in pending {
            let da = *ix
                .get(&a)
                .ok_or_else(|| Error::DanglingReference(format!("dart {a}")))?;
            if b.is_empty() {
                t.disks.push((id, da));
                continue;
            }
            let db = *ix
                .get(&b)
                .ok_or_else(|| Error::DanglingReference(format!("dart {b}")))?;
            let ei = t.edges.len();
            for d in [da, db] {
                if t.darts[d].edge != usize::MAX {
                    return Err(Error::InvalidChart(format!(
                        "dart {} on two edges",
                        t.darts[d].id
                    )));
                }
                t.darts[d].edge = ei;
            }
            if oriented {
                t.darts[da].dir = Some(Dir::Out);
                t.darts[db].dir = Some(Dir::In);
            }
            t.edges.push(TEdge {
                id,
                darts: [da, db],
            });
        }
        if let Some(d) = t.darts.iter().find(|d| d.edge == usize::MAX) {
            return Err(Error::DanglingReference(format!(
                "dart {} has no edge",
                d.id
            )));
        }
        Ok(t)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("template {}\n", self.name);
        for v in &self.vertices {
            let kw = if v.kind == TKind::White {
                "white"
            } else {
                "black"
            };
            let ids: Vec<&str> = v.rot.iter().map(|&d| self.darts[d].id.as_str()).collect();
            let bw = if v.bw { " bw" } else { "" };
            let _ = writeln!(s, "{kw} {}{bw} darts={}", v.id, ids.join(","));
        }
        for e in &self.edges {
            let [a, b] = e.darts;
            match self.darts[a].dir {
                Some(Dir::Out) => {
                    let _ = writeln!(
                        s,
                        "edge {} {} -> {}",
                        e.id, self.darts[a].id, self.darts[b].id
                    );
                }
                Some(Dir::In) => {
                    let _ = writeln!(
                        s,
                        "edge {} {} -> {}",
                        e.id, self.darts[b].id, self.darts[a].id
                    );
                }
                None => {
                    let _ = writeln!(s, "edge {} {} {}", e.id, self.darts[a].id, self.darts[b].id);
                }
            }
        }
        for (name, d) in &self.disks {
            let _ = writeln!(s, "disk {name} face({})", self.darts[*d].id);
        }
        s
    }

    pub fn twin(&self, d: usize) -> usize {
        let [a, b] = self.edges[self.darts[d].edge].darts;
        if a == d {
            b
        } else {
            a
        }
    }

    pub fn next(&self, d: usize) -> usize {
        let v = &self.vertices[self.darts[d].vertex];
        let p = v.rot.iter().position(|&x| x == d).unwrap();
        v.rot[(p + 1) % v.rot.len()]
    }

    pub fn prev(&self, d: usize) -> usize {
        let v = &self.vertices[self.darts[d].vertex];
        let p = v.rot.iter().position(|&x| x == d).unwrap();
        v.rot[(p + v.rot.len() - 1) % v.rot.len()]
    }

    pub fn whites(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.kind == TKind::White)
            .count()
    }

    pub fn blacks(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.kind == TKind::Black)
            .count()
    }

    pub fn bw_count(&self) -> usize {
        if self.blacks() > 0 {
            let mut s: HashSet<usize> = HashSet::new();
            for v in self.vertices.iter().filter(|v| v.kind == TKind::Black) {
                s.insert(self.darts[self.twin(v.rot[0])].vertex);
            }
            s.len()
        } else {
            self.vertices.iter().filter(|v| v.bw).count()
        }
    }

    pub fn is_oriented(&self) -> bool {
        self.darts.iter().all(|d| d.dir.is_some())
    }

    pub fn has_orientation(&self) -> bool {
        self.darts.iter().any(|d| d.dir.is_some())
    }

    /// Face orbits under d -> next(twin d).
    pub fn faces(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let mut face_of = vec![usize::MAX; self.darts.len()];
        let mut orbits = Vec::new();
        for s in 0..self.darts.len() {
            if face_of[s] != usize::MAX {
                continue;
            }
            let mut orbit = Vec::new();
            let mut d = s;
            loop {
                face_of[d] = orbits.len();
                orbit.push(d);
                d = self.next(self.twin(d));
                if d == s {
                    break;
                }
            }
            orbits.push(orbit);
        }
        (orbits, face_of)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &d in &self.vertices[v].rot {
                let u = self.darts[self.twin(d)].vertex;
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.iter().all(|&x| x)
    }

    /// Structural checks: degrees, connectivity, planarity.
    pub fn validate(&self) -> Result<()> {
        for v in &self.vertices {
            let want = match (v.kind, v.bw) {
                (TKind::Black, _) => 1,
                (TKind::White, true) => 2,
                (TKind::White, false) => 3,
            };
            if v.rot.len() != want {
                return Err(Error::InvalidChart(format!(
                    "{} in {} has degree {}",
                    v.id,
                    self.name,
                    v.rot.len()
                )));
            }
        }
        if !self.is_connected() {
            return Err(Error::InvalidChart(format!(
                "{} is disconnected",
                self.name
            )));
        }
        let (orbits, _) = self.faces();
        let chi = self.vertices.len() as i64 - self.edges.len() as i64 + orbits.len() as i64;
        if chi != 2 {
            return Err(Error::InvalidChart(format!(
                "{} is not planar (V-E+F = {chi})",
                self.name
            )));
        }
        Ok(())
    }

    pub fn reflect(&self) -> GraphTemplate {
        let mut t = self.clone();
        for v in &mut t.vertices {
            v.rot.reverse();
        }
        // a region right of d lies right of twin(d) in the mirror
        t.disks = self
            .disks
            .iter()
            .map(|(n, d)| (n.clone(), self.twin(*d)))
            .collect();
        t
    }

    pub fn reverse_all(&self) -> GraphTemplate {
        let mut t = self.clone();
        for d in &mut t.darts {
            d.dir = d.dir.map(Dir::flip);
        }
        t
    }

    /// Same graph with every orientation removed.
    pub fn unoriented(&self) -> GraphTemplate {
        let mut t = self.clone();
        for d in &mut t.darts {
            d.dir = None;
        }
        t
    }

    pub fn variant(&self, v: Variant) -> GraphTemplate {
        let mut t = if v.mirror {
            self.reflect()
        } else {
            self.clone()
        };
        if v.reverse {
            t = t.reverse_all();
        }
        t
    }

    /// Vertex signature used by matchers and canonical codes.
    fn vcode(&self, v: usize) -> u32 {
        let vx = &self.vertices[v];
        match vx.kind {
            TKind::Black => 1,
            TKind::White => 2 + vx.rot.len() as u32,
        }
    }

    fn dcode(&self, d: usize, reverse: bool) -> u32 {
        match self.darts[d]
            .dir
            .map(|x| if reverse { x.flip() } else { x })
        {
            None => 0,
            Some(Dir::In) => 1,
            Some(Dir::Out) => 2,
        }
    }

    /// Breadth-first code from a root dart.
    fn code_from(&self, root: usize, var: Variant) -> Vec<u32> {
        let n = self.darts.len();
        let mut num = vec![u32::MAX; n];
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let step = |d: usize| {
            if var.mirror {
                self.prev(d)
            } else {
                self.next(d)
            }
        };
        let visit = |entry: usize, num: &mut Vec<u32>, order: &mut Vec<usize>| {
            let mut d = entry;
            loop {
                num[d] = order.len() as u32;
                order.push(d);
                d = step(d);
                if d == entry {
                    break;
                }
            }
        };
        visit(root, &mut num, &mut order);
        let mut i = 0;
        while i < order.len() {
            let t = self.twin(order[i]);
            if num[t] == u32::MAX {
                visit(t, &mut num, &mut order);
            }
            i += 1;
        }
        let mut code = Vec::with_capacity(3 * n + 8);
        let mut last_v = usize::MAX;
        for &d in &order {
            let v = self.darts[d].vertex;
            if v != last_v {
                code.push(1000 + self.vcode(v));
                last_v = v;
            }
            code.push(self.dcode(d, var.reverse));
            code.push(num[self.twin(d)]);
        }
        code
    }

    /// Minimum code over every root and RO-variant.
    pub fn canonical_code(&self) -> Vec<u32> {
        let reversals: &[bool] = if self.has_orientation() {
            &[false, true]
        } else {
            &[false]
        };
        let mut best: Option<Vec<u32>> = None;
        for &mirror in &[false, true] {
            for &reverse in reversals {
                for r in 0..self.darts.len() {
                    let c = self.code_from(r, Variant { mirror, reverse });
                    if best.as_ref().map_or(true, |b| c < *b) {
                        best = Some(c);
                    }
                }
            }
        }
        best.unwrap_or_default()
    }
}

/// An RO-class: its canonical form and the distinct variants met.
#[derive(Clone, Debug)]
pub struct ROClass {
    pub canonical_form: String,
    pub representatives: Vec<GraphTemplate>,
}

pub fn canonical_string(code: &[u32]) -> String {
    let mut s = String::with_capacity(code.len() * 3);
    for (i, c) in code.iter().enumerate() {
        if i > 0 {
            s.push('.');
        }
        let _ = write!(s, "{c}");
    }
    s
}

pub fn ro_canonical(t: &GraphTemplate) -> ROClass {
    let canonical_form = canonical_string(&t.canonical_code());
    let mut representatives: Vec<GraphTemplate> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for v in VARIANTS {
        if v.reverse && !t.has_orientation() {
            continue;
        }
        let x = t.variant(v);
        // a lone white with its terminals reduced away has no darts to root at
        let key = if x.darts.is_empty() {
            String::new()
        } else {
            canonical_string(&x.code_from(
                0,
                Variant {
                    mirror: false,
                    reverse: false,
                },
            ))
        };
        if seen.insert(key) {
            representatives.push(x);
        }
    }
    ROClass {
        canonical_form,
        representatives,
    }
}

/// How orientation annotations are compared by the matcher.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrientMode {
    Ignore,
    /// Only pattern edges carrying an orientation are checked.
    Pattern,
}

/// Extend `p0 -> t0` to a full dart bijection, if the maps agree.
pub fn propagate(
    p: &GraphTemplate,
    t: &GraphTemplate,
    p0: usize,
    t0: usize,
    var: Variant,
    mode: OrientMode,
) -> Option<Vec<usize>> {
    if p.darts.len() != t.darts.len() || p.vertices.len() != t.vertices.len() {
        return None;
    }
    let tstep = |d: usize| if var.mirror { t.prev(d) } else { t.next(d) };
    let mut map = vec![usize::MAX; p.darts.len()];
    let mut used = vec![false; t.darts.len()];
    let mut stack = vec![(p0, t0)];
    while let Some((a, b)) = stack.pop() {
        if map[a] != usize::MAX {
            if map[a] != b {
                return None;
            }
            continue;
        }
        if used[b] {
            return None;
        }
        if p.vcode(p.darts[a].vertex) != t.vcode(t.darts[b].vertex) {
            return None;
        }
        if p.vertices[p.darts[a].vertex].bw != t.vertices[t.darts[b].vertex].bw {
            return None;
        }
        if mode == OrientMode::Pattern {
            if let Some(pd) = p.darts[a].dir {
                let td = t.darts[b]
                    .dir
                    .map(|x| if var.reverse { x.flip() } else { x });
                if td != Some(pd) {
                    return None;
                }
            }
        }
        map[a] = b;
        used[b] = true;
        stack.push((p.next(a), tstep(b)));
        stack.push((p.twin(a), t.twin(b)));
    }
    if map.iter().any(|&x| x == usize::MAX) {
        return None;
    }
    Some(map)
}

/// Dart bijection from `p` onto some RO-variant of `t`.
pub fn find_iso(
    p: &GraphTemplate,
    t: &GraphTemplate,
    mode: OrientMode,
) -> Option<(Variant, Vec<usize>)> {
    if p.darts.is_empty() {
        return if t.darts.is_empty() {
            Some((VARIANTS[0], vec![]))
        } else {
            None
        };
    }
    for var in VARIANTS {
        if var.reverse && mode == OrientMode::Ignore {
            continue;
        }
        for t0 in 0..t.darts.len() {
            if let Some(m) = propagate(p, t, 0, t0, var, mode) {
                return Some((var, m));
            }
        }
    }
    None
}

/// RO-equivalence by exhaustive propagation, independent of canonical codes.
pub fn brute_ro_equivalent(a: &GraphTemplate, b: &GraphTemplate) -> bool {
    let mode = if a.has_orientation() || b.has_orientation() {
        OrientMode::Pattern
    } else {
        OrientMode::Ignore
    };
    if a.has_orientation() != b.has_orientation() {
        return false;
    }
    find_iso(a, b, mode).is_some() && find_iso(b, a, mode).is_some()
}

/// A Γ_m component as a template, with the template-dart -> chart-dart map.
/// `reduced` drops terminal strands and marks their whites as BW.
pub fn component_template(
    chart: &Chart,
    comp: &GammaComponent,
    reduced: bool,
) -> (GraphTemplate, Vec<usize>) {
    let mut t = GraphTemplate {
        name: format!("component-{}", comp.label),
        vertices: vec![],
        darts: vec![],
        edges: vec![],
        disks: vec![],
    };
    let mut tv: HashMap<usize, usize> = HashMap::new();
    let mut cd: Vec<usize> = Vec::new();
    let mut td_of: HashMap<usize, usize> = HashMap::new();
    let mut bw: HashSet<usize> = HashSet::new();
    // blacks vanish in the reduced form, so free strands go with them
    let skip = |s: &&crate::features::Strand| {
        !(reduced && matches!(s.class, StrandClass::Terminal | StrandClass::Free))
    };
    for s in comp.strands.iter() {
        if reduced && s.class == StrandClass::Terminal {
            for v in s.endpoints(chart) {
                if chart.vertices[v].kind == VertexKind::White {
                    bw.insert(v);
                }
            }
        }
    }
    let kept: Vec<&crate::features::Strand> = comp.strands.iter().filter(skip).collect();
    let mut end_darts: HashSet<usize> = HashSet::new();
    for s in &kept {
        if let Some([a, b]) = s.ends {
            end_darts.insert(a);
            end_darts.insert(b);
        }
    }
    for &v in &comp.vertices {
        let kind = match chart.vertices[v].kind {
            VertexKind::White => TKind::White,
            VertexKind::Black => TKind::Black,
            _ => continue,
        };
        if kind == TKind::Black && reduced {
            continue;
        }
        let vi = t.vertices.len();
        tv.insert(v, vi);
        let mut rot = Vec::new();
        for d in chart.real_rot(v) {
            if chart.label(d) == comp.label && end_darts.contains(&d) {
                let ti = t.darts.len();
                td_of.insert(d, ti);
                cd.push(d);
                rot.push(ti);
                t.darts.push(TDart {
                    id: chart.darts[d].id.clone(),
                    vertex: vi,
                    edge: usize::MAX,
                    dir: Some(chart.dir(d)),
                });
            }
        }
        t.vertices.push(TVertex {
            id: chart.vertices[v].id.clone(),
            kind,
            bw: bw.contains(&v),
            rot,
        });
    }
    for s in &kept {
        if let Some([a, b]) = s.ends {
            let (ta, tb) = (td_of[&a], td_of[&b]);
            let ei = t.edges.len();
            t.darts[ta].edge = ei;
            t.darts[tb].edge = ei;
            t.edges.push(TEdge {
                id: chart.edges[s.edges[0]].id.clone(),
                darts: [ta, tb],
            });
        }
    }
    (t, cd)
}

/// A full chart (n = 3, m = 1) whose Γ_1 is the template.
///
/// The template must be fully oriented. Every label-2 dart ends in its own
/// black vertex. For BW whites of a reduced template, `sectors` picks which of
/// the two sectors receives the terminal edge (default 0: right after the
/// first listed dart).
pub fn realize(t: &GraphTemplate, sectors: &HashMap<String, usize>) -> Result<Chart> {
    if !t.is_oriented() {
        return Err(Error::InvalidChart(format!(
            "{} is not fully oriented",
            t.name
        )));
    }
    let mut lines = vec!["chart n=3".to_string()];
    let mut edges: Vec<String> = Vec::new();
    let mut blacks = 0usize;
    // stub names must not collide with the template's own ids
    let taken: HashSet<String> = t
        .vertices
        .iter()
        .map(|v| v.id.clone())
        .chain(t.edges.iter().map(|e| e.id.clone()))
        .collect();
    let mut new_black = |dart_at_white: &str,
                         out: bool,
                         label: u32,
                         lines: &mut Vec<String>,
                         edges: &mut Vec<String>| {
        blacks += 1;
        while taken.contains(&format!("b{blacks}")) || taken.contains(&format!("t{blacks}")) {
            blacks += 1;
        }
        let b = format!("b{blacks}");
        let bd = format!("{b}.0");
        lines.push(format!("black {b} darts={bd}"));
        let (tail, head) = if out {
            (dart_at_white.to_string(), bd)
        } else {
            (bd, dart_at_white.to_string())
        };
        edges.push(format!(
            "edge t{blacks} label={label} tail={tail} head={head}"
        ));
    };
    for v in &t.vertices {
        if v.kind == TKind::Black {
            lines.push(format!("black {} darts={}", v.id, t.darts[v.rot[0]].id));
            continue;
        }
        // m-darts with directions, terminal inserted for BW whites
        let mut ms: Vec<(String, Dir)> = v
            .rot
            .iter()
            .map(|&d| (t.darts[d].id.clone(), t.darts[d].dir.unwrap()))
            .collect();
        let mut terminal: Option<String> = None;
        if v.bw && v.rot.len() == 2 {
            let (d0, d1) = (ms[0].1, ms[1].1);
            if d0 != d1 {
                return Err(Error::InvalidChart(format!(
                    "BW vertex {} needs both edges alike",
                    v.id
                )));
            }
            let id = format!("{}.t", v.id);
            let s = sectors.get(&v.id).copied().unwrap_or(0) % 2;
            ms.insert(s + 1, (id.clone(), d0.flip()));
            terminal = Some(id);
        }
        if ms.len() != 3 {
            return Err(Error::InvalidChart(format!(
                "white {} has {} label-m darts",
                v.id,
                ms.len()
            )));
        }
        let ins = ms.iter().filter(|x| x.1 == Dir::In).count();
        if ins == 0 || ins == 3 {
            return Err(Error::InvalidChart(format!(
                "white {} has all label-m darts alike",
                v.id
            )));
        }
        let lone = (0..3)
            .find(|&i| ms.iter().filter(|x| x.1 == ms[i].1).count() == 1)
            .unwrap();
        let delta = ms[lone].1;
        // position of m-dart i is 2i; label-2 darts sit at odd positions
        let mut six: Vec<(String, Dir, u32)> = Vec::new();
        for i in 0..3 {
            six.push((ms[i].0.clone(), ms[i].1, 1));
            let far = i != lone && (i + 1) % 3 != lone;
            let dir = if far { delta.flip() } else { delta };
            six.push((format!("{}.h{i}", v.id), dir, 2));
        }
        let dirs: Vec<Dir> = six.iter().map(|x| x.1).collect();
        debug_assert!(inward_block_start(&dirs).is_some());
        let ids: Vec<&str> = six.iter().map(|x| x.0.as_str()).collect();
        lines.push(format!("white {} darts={}", v.id, ids.join(",")));
        for (id, dir, label) in &six {
            if *label == 2 {
                new_black(id, *dir == Dir::Out, 2, &mut lines, &mut edges);
            }
        }
        if let Some(id) = terminal {
            new_black(&id, delta == Dir::Out, 1, &mut lines, &mut edges);
        }
    }
    for e in &t.edges {
        let [a, b] = e.darts;
        let (tail, head) = if t.darts[a].dir == Some(Dir::Out) {
            (a, b)
        } else {
            (b, a)
        };
        edges.push(format!(
            "edge {} label=1 tail={} head={}",
            e.id, t.darts[tail].id, t.darts[head].id
        ));
    }
    lines.extend(edges);
    if let Some(d) = t.darts.first() {
        lines.push(format!("infinity face({})", d.id));
    }
    build_chart(&(lines.join("\n") + "\n"))
}
