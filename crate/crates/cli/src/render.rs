//! SVG drawings of charts and Γ_m templates.
//!
//! Positions come from a Tutte barycentric embedding with the outer face
//! pinned to a regular polygon. When the linear system is singular or two
//! vertices land on the same spot the drawing falls back to a seeded
//! force layout and says so in `RenderOutput::fallback`.

use chartforge::chart::{Chart, Link, VertexKind};
use chartforge::features::dart_is_middle;
use chartforge::template::{GraphTemplate, TKind};
use chartforge::Dir;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    Tutte,
    Force,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Show {
    pub orientations: bool,
    pub middles: bool,
    pub face_ids: bool,
}

#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub layout: Layout,
    pub width: u32,
    pub height: u32,
    pub label_colors: BTreeMap<u32, String>,
    pub show: Show,
    pub seed: u64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            layout: Layout::Tutte,
            width: 480,
            height: 480,
            label_colors: BTreeMap::new(),
            show: Show {
                orientations: true,
                middles: false,
                face_ids: false,
            },
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RenderOutput {
    pub svg: String,
    /// Set when the Tutte system was degenerate and the force layout was used.
    pub fallback: Option<String>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    White,
    Bw,
    Black,
    Crossing,
    Phantom,
}

struct Arc {
    a: usize,
    b: usize,
    visible: bool,
    label: Option<u32>,
    /// Arrow from `a` to `b`.
    oriented: bool,
}

/// What gets laid out and drawn, independent of where it came from.
struct Scene {
    nodes: Vec<NodeKind>,
    /// Arc indices around each node, counterclockwise.
    rot: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    /// Corners (node, rotation slot) of the face to put outside.
    outer: Vec<(usize, usize)>,
    /// (arc, at the `a` end) pairs carrying a middle arc.
    middles: Vec<(usize, bool)>,
    faces: Vec<(String, Vec<usize>)>,
}

impl Scene {
    fn other(&self, arc: usize, v: usize) -> usize {
        let a = &self.arcs[arc];
        if a.a == v {
            a.b
        } else {
            a.a
        }
    }
}

fn chart_scene(chart: &Chart) -> Scene {
    let nodes = chart
        .vertices
        .iter()
        .map(|v| match v.kind {
            VertexKind::White => NodeKind::White,
            VertexKind::Black => NodeKind::Black,
            VertexKind::Crossing => NodeKind::Crossing,
            VertexKind::Phantom => NodeKind::Phantom,
        })
        .collect();
    let mut arcs = Vec::new();
    for e in &chart.edges {
        let (a, b) = (chart.vertex_of(e.tail), chart.vertex_of(e.head));
        arcs.push(Arc {
            a,
            b,
            visible: true,
            label: Some(e.label),
            oriented: true,
        });
    }
    for t in &chart.tethers {
        arcs.push(Arc {
            a: chart.vertex_of(t[0]),
            b: chart.vertex_of(t[1]),
            visible: false,
            label: None,
            oriented: false,
        });
    }
    let arc_of = |d: usize| match chart.darts[d].link {
        Link::Edge(e) => e,
        Link::Tether(t) => chart.edges.len() + t,
    };
    let mut middles = Vec::new();
    for (d, dart) in chart.darts.iter().enumerate() {
        if let Link::Edge(e) = dart.link {
            if dart_is_middle(chart, d) {
                middles.push((e, chart.edges[e].tail == d));
            }
        }
    }
    let rot = chart
        .vertices
        .iter()
        .map(|v| v.rot.iter().map(|&d| arc_of(d)).collect())
        .collect();
    let faces = chart.faces();
    let corner = |d: usize| {
        let v = chart.vertex_of(d);
        (
            v,
            chart.vertices[v]
                .rot
                .iter()
                .position(|&x| x == d)
                .unwrap_or(0),
        )
    };
    let outer = match chart
        .infinity_face(&faces)
        .or_else(|| (!faces.orbits.is_empty()).then(|| largest(&faces.orbits)))
    {
        Some(f) => faces.orbits[f].iter().map(|&d| corner(d)).collect(),
        None => vec![],
    };
    Scene {
        nodes,
        rot,
        arcs,
        outer,
        middles,
        faces: faces
            .orbits
            .iter()
            .enumerate()
            .map(|(i, o)| {
                (
                    format!("f{i}"),
                    o.iter().map(|&d| chart.vertex_of(d)).collect(),
                )
            })
            .collect(),
    }
}

fn template_scene(t: &GraphTemplate) -> Scene {
    let nodes = t
        .vertices
        .iter()
        .map(|v| match (v.kind, v.bw) {
            (TKind::Black, _) => NodeKind::Black,
            (TKind::White, true) => NodeKind::Bw,
            (TKind::White, false) => NodeKind::White,
        })
        .collect();
    let mut arcs = Vec::new();
    for e in &t.edges {
        let [x, y] = e.darts;
        let (x, y) = if t.darts[y].dir == Some(Dir::Out) {
            (y, x)
        } else {
            (x, y)
        };
        arcs.push(Arc {
            a: t.darts[x].vertex,
            b: t.darts[y].vertex,
            visible: true,
            label: None,
            oriented: t.darts[x].dir.is_some(),
        });
    }
    let (orbits, _) = t.faces();
    let corner = |d: usize| {
        let v = t.darts[d].vertex;
        (
            v,
            t.vertices[v].rot.iter().position(|&x| x == d).unwrap_or(0),
        )
    };
    let outer = if orbits.is_empty() {
        vec![]
    } else {
        orbits[largest(&orbits)]
            .iter()
            .map(|&d| corner(d))
            .collect()
    };
    Scene {
        nodes,
        rot: t
            .vertices
            .iter()
            .map(|v| v.rot.iter().map(|&d| t.darts[d].edge).collect())
            .collect(),
        arcs,
        outer,
        middles: vec![],
        faces: orbits
            .iter()
            .enumerate()
            .map(|(i, o)| {
                (
                    format!("f{i}"),
                    o.iter().map(|&d| t.darts[d].vertex).collect(),
                )
            })
            .collect(),
    }
}

fn largest(orbits: &[Vec<usize>]) -> usize {
    let mut best = 0;
    for (i, o) in orbits.iter().enumerate() {
        if o.len() > orbits[best].len() {
            best = i;
        }
    }
    best
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<[f64; 2]>) -> Option<Vec<[f64; 2]>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r][0] -= f * b[col][0];
            b[r][1] -= f * b[col][1];
        }
    }
    let mut x = vec![[0.0; 2]; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s[0] -= a[r][c] * x[c][0];
            s[1] -= a[r][c] * x[c][1];
        }
        x[r] = [s[0] / a[r][r], s[1] / a[r][r]];
    }
    Some(x)
}

/// Node positions in the unit disk, plus a point each arc must pass
/// through when the layout fixes one.
struct Placement {
    pos: Vec<[f64; 2]>,
    via: Vec<Option<[f64; 2]>>,
}

/// Vertices left after repeatedly stripping degree-1 vertices.
fn two_core(scene: &Scene) -> Vec<bool> {
    let n = scene.nodes.len();
    let mut degree: Vec<usize> = (0..n)
        .map(|v| {
            scene.rot[v]
                .iter()
                .filter(|&&a| scene.other(a, v) != v)
                .count()
        })
        .collect();
    let mut core = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !core[v] {
            continue;
        }
        core[v] = false;
        for &a in &scene.rot[v] {
            let u = scene.other(a, v);
            if u != v && core[u] {
                degree[u] -= 1;
                if degree[u] <= 1 {
                    stack.push(u);
                }
            }
        }
    }
    core
}

/// Tutte's system on the 2-core, augmented so that it stays solvable on
/// maps that are not 3-connected: every outer-face edge gets a fixed
/// midpoint on the polygon, and every inner face gets a free node joined
/// to each of its corners. Pendant trees (terminal edges, free edges,
/// tethered hoops) are then hung inside the rotation sector they occupy.
fn tutte(scene: &Scene) -> Result<Placement, String> {
    let n = scene.nodes.len();
    let core = two_core(scene);
    let core_arc = |a: usize| {
        let x = &scene.arcs[a];
        x.a != x.b && core[x.a] && core[x.b]
    };
    // Core darts: (node, index into the filtered rotation).
    let crot: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            if core[v] {
                scene.rot[v]
                    .iter()
                    .copied()
                    .filter(|&a| core_arc(a))
                    .collect()
            } else {
                vec![]
            }
        })
        .collect();
    let mut dart_ix: HashMap<(usize, usize), usize> = HashMap::new();
    let mut darts = Vec::new();
    for (v, r) in crot.iter().enumerate() {
        for k in 0..r.len() {
            dart_ix.insert((v, k), darts.len());
            darts.push((v, k));
        }
    }
    let twin = |d: usize| {
        let (v, k) = darts[d];
        let a = crot[v][k];
        let u = scene.other(a, v);
        dart_ix[&(u, crot[u].iter().position(|&x| x == a).unwrap())]
    };
    let face_next = |d: usize| {
        let (u, k) = darts[twin(d)];
        dart_ix[&(u, (k + 1) % crot[u].len())]
    };
    let mut face_of = vec![usize::MAX; darts.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for s in 0..darts.len() {
        if face_of[s] != usize::MAX {
            continue;
        }
        let mut o = vec![];
        let mut d = s;
        while face_of[d] == usize::MAX {
            face_of[d] = orbits.len();
            o.push(d);
            d = face_next(d);
        }
        orbits.push(o);
    }
    let mut pos = vec![[0.0; 2]; n];
    let mut placed = vec![false; n];
    let mut via: Vec<Option<[f64; 2]>> = vec![None; scene.arcs.len()];
    if !orbits.is_empty() {
        let outer = scene
            .outer
            .iter()
            .find_map(|&(v, slot)| {
                let a = *scene.rot[v].get(slot)?;
                if !core[v] || !core_arc(a) {
                    return None;
                }
                let k = crot[v].iter().position(|&x| x == a)?;
                Some(face_of[dart_ix[&(v, k)]])
            })
            .unwrap_or_else(|| largest(&orbits));
        // Polygon corners: vertices and outer-edge midpoints, first visits only.
        enum Corner {
            Node(usize),
            Mid(usize),
        }
        let mut corners = Vec::new();
        let mut seen_v = vec![false; n];
        let mut seen_a = vec![false; scene.arcs.len()];
        for &d in &orbits[outer] {
            let (v, k) = darts[d];
            if !seen_v[v] {
                seen_v[v] = true;
                corners.push(Corner::Node(v));
            }
            let a = crot[v][k];
            if !seen_a[a] {
                seen_a[a] = true;
                corners.push(Corner::Mid(a));
            }
        }
        let m = corners.len();
        for (i, c) in corners.iter().enumerate() {
            let t = TAU * i as f64 / m as f64 + FRAC_PI_2;
            let p = [t.cos(), t.sin()];
            match *c {
                Corner::Node(v) => {
                    pos[v] = p;
                    placed[v] = true;
                }
                Corner::Mid(a) => via[a] = Some(p),
            }
        }
        // Node ids: vertices 0..n, inner faces n.., midpoints 2n + faces + arc.
        // Only free core vertices and face nodes are unknowns.
        let mid_base = 2 * n + orbits.len();
        let free: Vec<usize> = (0..n).filter(|&v| core[v] && !placed[v]).collect();
        let mut ix: HashMap<usize, usize> = free.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let inner: Vec<usize> = (0..orbits.len()).filter(|&f| f != outer).collect();
        for (j, &f) in inner.iter().enumerate() {
            ix.insert(n + f, free.len() + j);
        }
        let size = free.len() + inner.len();
        let mut a = vec![vec![0.0; size]; size];
        let mut b = vec![[0.0; 2]; size];
        let fixed = |x: usize| {
            if x < n {
                pos[x]
            } else {
                via[x - mid_base].unwrap_or([0.0, 0.0])
            }
        };
        // Row weights grow with the rotation slot of the dart they come
        // from. Uniform weights would force mirror-symmetric pieces hanging
        // off a cut vertex onto one point.
        let slot_w = |v: usize, k: usize| 1.0 + 0.5 * k as f64 / crot[v].len().max(1) as f64;
        let mut link = |p: usize, q: usize, wp: f64, wq: f64| {
            for (u, w, wt) in [(p, q, wp), (q, p, wq)] {
                if let Some(&i) = ix.get(&u) {
                    a[i][i] += wt;
                    match ix.get(&w) {
                        Some(&j) => a[i][j] -= wt,
                        None => {
                            let fp = fixed(w);
                            b[i][0] += wt * fp[0];
                            b[i][1] += wt * fp[1];
                        }
                    }
                }
            }
        };
        for (k, arc) in scene.arcs.iter().enumerate().filter(|&(k, _)| core_arc(k)) {
            let slot = |v: usize| crot[v].iter().position(|&x| x == k).unwrap_or(0);
            let (wa, wb) = (slot_w(arc.a, slot(arc.a)), slot_w(arc.b, slot(arc.b)));
            match via[k] {
                Some(_) => {
                    link(arc.a, mid_base + k, wa, 1.0);
                    link(mid_base + k, arc.b, 1.0, wb);
                }
                None => link(arc.a, arc.b, wa, wb),
            }
        }
        for &f in &inner {
            for &d in &orbits[f] {
                let (v, k) = darts[d];
                link(n + f, v, 1.0, slot_w(v, k));
            }
        }
        let x = solve(a, b).ok_or_else(|| "singular barycentric system".to_string())?;
        for (i, &v) in free.iter().enumerate() {
            pos[v] = x[i];
            placed[v] = true;
        }
    }
    hang_trees(scene, &mut pos, &mut placed, &via);
    for u in 0..n {
        for v in u + 1..n {
            if dist(pos[u], pos[v]) < 1e-6 {
                return Err(format!("vertices {u} and {v} coincide"));
            }
        }
    }
    Ok(Placement { pos, via })
}

/// Place everything not yet placed, breadth first from what is.
fn hang_trees(scene: &Scene, pos: &mut [[f64; 2]], placed: &mut [bool], via: &[Option<[f64; 2]>]) {
    let n = scene.nodes.len();
    let bend = bends(scene);
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| placed[v]).collect();
    if queue.is_empty() && n > 0 {
        let root = scene.outer.first().map(|c| c.0).unwrap_or(0);
        placed[root] = true;
        queue.push_back(root);
    }
    loop {
        while let Some(v) = queue.pop_front() {
            let angles = slot_angles(scene, pos, placed, via, &bend, v);
            let near = scene.rot[v]
                .iter()
                .map(|&a| scene.other(a, v))
                .filter(|&u| u != v && placed[u])
                .map(|u| dist(pos[u], pos[v]))
                .fold(f64::INFINITY, f64::min);
            let len = if near.is_finite() {
                (0.4 * near).clamp(0.03, 0.3)
            } else {
                0.3
            };
            for (slot, &a) in scene.rot[v].iter().enumerate() {
                let u = scene.other(a, v);
                if !placed[u] {
                    pos[u] = [
                        pos[v][0] + len * angles[slot].cos(),
                        pos[v][1] + len * angles[slot].sin(),
                    ];
                    placed[u] = true;
                    queue.push_back(u);
                }
            }
        }
        // Pieces unreachable from the rest get their own spot.
        match (0..n).find(|&v| !placed[v]) {
            Some(v) => {
                pos[v] = [0.9, -0.9 + 0.1 * v as f64];
                placed[v] = true;
                queue.push_back(v);
            }
            None => break,
        }
    }
}

/// Direction of every rotation slot at `v`: slots on arcs to placed
/// neighbours follow the drawn curve, the rest are spread evenly through
/// the gaps between them.
fn slot_angles(
    scene: &Scene,
    pos: &[[f64; 2]],
    placed: &[bool],
    via: &[Option<[f64; 2]>],
    bend: &[(f64, usize)],
    v: usize,
) -> Vec<f64> {
    let rot = &scene.rot[v];
    let r = rot.len();
    let known: Vec<Option<f64>> = rot
        .iter()
        .map(|&a| {
            let u = scene.other(a, v);
            if u == v || !placed[u] {
                return None;
            }
            let c = curve_control(scene, pos, via, bend, a);
            let c = if dist(c, pos[v]) < 1e-9 { pos[u] } else { c };
            Some((c[1] - pos[v][1]).atan2(c[0] - pos[v][0]))
        })
        .collect();
    let mut out = vec![0.0; r];
    let anchors: Vec<usize> = (0..r).filter(|&i| known[i].is_some()).collect();
    if anchors.is_empty() {
        for (i, o) in out.iter_mut().enumerate() {
            *o = TAU * i as f64 / r as f64;
        }
        return out;
    }
    for (j, &s) in anchors.iter().enumerate() {
        let e = anchors[(j + 1) % anchors.len()];
        let (alpha, beta) = (known[s].unwrap(), known[e].unwrap());
        let mut sweep = (beta - alpha).rem_euclid(TAU);
        if sweep < 1e-9 {
            sweep = TAU;
        }
        out[s] = alpha;
        let gap = match (e + r - s) % r {
            0 => r,
            g => g,
        };
        for t in 1..gap {
            out[(s + t) % r] = alpha + sweep * t as f64 / gap as f64;
        }
    }
    out
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

/// Fruchterman-Reingold in the unit square, seeded for reproducibility.
fn force(scene: &Scene, seed: u64) -> Placement {
    let n = scene.nodes.len();
    let via = vec![None; scene.arcs.len()];
    if n < 2 {
        return Placement {
            pos: vec![[0.0, 0.0]; n],
            via,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    let k = (4.0 / n as f64).sqrt();
    let mut temp = 0.2;
    for _ in 0..300 {
        let mut disp = vec![[0.0; 2]; n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    let l = dist(pos[u], pos[v]).max(1e-3);
                    let f = k * k / l;
                    for c in 0..2 {
                        disp[u][c] += (pos[u][c] - pos[v][c]) / l * f;
                    }
                }
            }
        }
        for arc in scene.arcs.iter().filter(|a| a.a != a.b) {
            let (u, v) = (arc.a, arc.b);
            let l = dist(pos[u], pos[v]).max(1e-3);
            let f = l * l / k;
            for c in 0..2 {
                let d = (pos[u][c] - pos[v][c]) / l * f;
                disp[u][c] -= d;
                disp[v][c] += d;
            }
        }
        for u in 0..n {
            let l = (disp[u][0].powi(2) + disp[u][1].powi(2)).sqrt().max(1e-9);
            for c in 0..2 {
                pos[u][c] = (pos[u][c] + disp[u][c] / l * l.min(temp)).clamp(-1.0, 1.0);
            }
        }
        temp *= 0.98;
    }
    Placement { pos, via }
}

/// Signed bend of each arc and its index within its bundle. Parallel arcs
/// between the same pair fan out alternately to either side.
fn bends(scene: &Scene) -> Vec<(f64, usize)> {
    let mut bundle: HashMap<(usize, usize), usize> = HashMap::new();
    scene
        .arcs
        .iter()
        .map(|arc| {
            let key = (arc.a.min(arc.b), arc.a.max(arc.b));
            let i = *bundle.entry(key).and_modify(|c| *c += 1).or_insert(0);
            let off = if i == 0 {
                0.0
            } else {
                ((i + 1) / 2) as f64 * if i % 2 == 1 { 1.0 } else { -1.0 }
            };
            // Keep the bend side independent of which end is the tail.
            let sign = if arc.a <= arc.b { 1.0 } else { -1.0 };
            (off * sign, i)
        })
        .collect()
}

/// Control point of the quadratic drawn for arc `k`.
fn curve_control(
    scene: &Scene,
    pos: &[[f64; 2]],
    via: &[Option<[f64; 2]>],
    bend: &[(f64, usize)],
    k: usize,
) -> [f64; 2] {
    let (a, b) = (pos[scene.arcs[k].a], pos[scene.arcs[k].b]);
    let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    match via[k] {
        // The quadratic passing through `m` at t = 1/2.
        Some(m) => [2.0 * m[0] - mid[0], 2.0 * m[1] - mid[1]],
        None => {
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let off = bend[k].0;
            [mid[0] - dy * 0.25 * off, mid[1] + dx * 0.25 * off]
        }
    }
}

fn quad_at(a: [f64; 2], c: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    let s = 1.0 - t;
    [
        s * s * a[0] + 2.0 * s * t * c[0] + t * t * b[0],
        s * s * a[1] + 2.0 * s * t * c[1] + t * t * b[1],
    ]
}

fn draw(scene: &Scene, place: &Placement, spec: &RenderSpec) -> String {
    let pos = &place.pos;
    let (w, h) = (spec.width as f64, spec.height as f64);
    let margin = 30.0;
    let scale = ((w.min(h) - 2.0 * margin) / 2.0).max(1.0);
    // Screen y points down; flip so counterclockwise stays counterclockwise.
    let px = |p: [f64; 2]| [w / 2.0 + p[0] * scale, h / 2.0 - p[1] * scale];
    let color =
        |l: Option<u32>| match l {
            Some(l) => spec.label_colors.get(&l).cloned().unwrap_or_else(|| {
                PALETTE[(l as usize).saturating_sub(1) % PALETTE.len()].to_string()
            }),
            None => "#000000".to_string(),
        };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        spec.width, spec.height, spec.width, spec.height
    );
    let arrows = spec.show.orientations && scene.arcs.iter().any(|a| a.visible && a.oriented);
    if arrows {
        out.push_str("<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"5\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n");
    }
    let bend = bends(scene);
    let curves: Vec<_> = scene
        .arcs
        .iter()
        .enumerate()
        .map(|(k, arc)| {
            let (a, b) = (px(pos[arc.a]), px(pos[arc.b]));
            let c = if arc.a == arc.b {
                a
            } else {
                px(curve_control(scene, pos, &place.via, &bend, k))
            };
            (a, c, b, bend[k].1)
        })
        .collect();
    for (arc, &(a, c, b, i)) in scene.arcs.iter().zip(&curves) {
        if !arc.visible {
            continue;
        }
        let marker = if arrows && arc.oriented {
            " marker-mid=\"url(#arrow)\""
        } else {
            ""
        };
        let stroke = color(arc.label);
        let d = if arc.a == arc.b {
            let r = 14.0 + 6.0 * i as f64;
            if scene.nodes[arc.a] == NodeKind::Phantom {
                format!(
                    "M{:.2},{:.2} A{r:.2},{r:.2} 0 1 1 {:.2},{:.2} A{r:.2},{r:.2} 0 1 1 {:.2},{:.2}",
                    a[0] + r,
                    a[1],
                    a[0] - r,
                    a[1],
                    a[0] + r,
                    a[1]
                )
            } else {
                // A teardrop hanging off the vertex.
                format!(
                    "M{:.2},{:.2} Q{:.2},{:.2} {:.2},{:.2} Q{:.2},{:.2} {:.2},{:.2}",
                    a[0],
                    a[1],
                    a[0] - 1.5 * r,
                    a[1] - r,
                    a[0],
                    a[1] - 2.0 * r,
                    a[0] + 1.5 * r,
                    a[1] - r,
                    a[0],
                    a[1]
                )
            }
        } else {
            let m = quad_at(a, c, b, 0.5);
            format!(
                "M{:.2},{:.2} Q{:.2},{:.2} {:.2},{:.2} Q{:.2},{:.2} {:.2},{:.2}",
                a[0],
                a[1],
                (a[0] + c[0]) / 2.0,
                (a[1] + c[1]) / 2.0,
                m[0],
                m[1],
                (c[0] + b[0]) / 2.0,
                (c[1] + b[1]) / 2.0,
                b[0],
                b[1]
            )
        };
        let _ = writeln!(out, "<path class=\"arc\" d=\"{d}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"2\"{marker}/>");
    }
    if spec.show.middles {
        for &(ai, at_a) in &scene.middles {
            let (a, c, b, _) = curves[ai];
            let p = quad_at(a, c, b, if at_a { 0.18 } else { 0.82 });
            let _ = writeln!(
                out,
                "<circle class=\"middle\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#888888\"/>",
                p[0], p[1]
            );
        }
    }
    for (v, &kind) in scene.nodes.iter().enumerate() {
        let p = px(pos[v]);
        match kind {
            NodeKind::White | NodeKind::Bw => {
                let _ = writeln!(
                    out,
                    "<circle class=\"white\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"7\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"1.5\"/>",
                    p[0], p[1]
                );
                if kind == NodeKind::Bw {
                    let _ = writeln!(out, "<circle class=\"dot\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#000000\"/>", p[0], p[1]);
                }
            }
            NodeKind::Black => {
                let _ = writeln!(
                    out,
                    "<circle class=\"dot\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#000000\"/>",
                    p[0], p[1]
                );
            }
            NodeKind::Crossing | NodeKind::Phantom => {}
        }
    }
    if spec.show.face_ids {
        for (name, vs) in &scene.faces {
            if vs.is_empty() {
                continue;
            }
            let mut c = [0.0, 0.0];
            for &v in vs {
                c[0] += pos[v][0] / vs.len() as f64;
                c[1] += pos[v][1] / vs.len() as f64;
            }
            let p = px(c);
            let _ = writeln!(
                out,
                "<text class=\"face\" x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\">{name}</text>",
                p[0], p[1]
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn render_scene(scene: &Scene, spec: &RenderSpec) -> RenderOutput {
    let (place, fallback) = match spec.layout {
        Layout::Force => (force(scene, spec.seed), None),
        Layout::Tutte => match tutte(scene) {
            Ok(p) => (p, None),
            Err(why) => (
                force(scene, spec.seed),
                Some(format!("degenerate layout ({why}); used force layout")),
            ),
        },
    };
    RenderOutput {
        svg: draw(scene, &place, spec),
        fallback,
    }
}

pub fn render_svg(chart: &Chart, spec: &RenderSpec) -> RenderOutput {
    render_scene(&chart_scene(chart), spec)
}

/// Draw a Γ_m graph: whites as circles, BW whites with a dot inside,
/// blacks as dots, one arc per edge.
pub fn render_template(t: &GraphTemplate, spec: &RenderSpec) -> RenderOutput {
    render_scene(&template_scene(t), spec)
}
