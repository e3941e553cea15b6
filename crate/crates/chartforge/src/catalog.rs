//! Built-in figure templates, template containment in Γ_m, and exhaustive
//! enumeration of connected Γ_m components with a fixed number of whites.

use crate::chart::{Chart, Dir};
use crate::error::{Error, Result};
use crate::features::gamma_components;
use crate::template::{
    canonical_string, find_iso, ro_canonical, GraphTemplate, OrientMode, ROClass, TDart, TEdge,
    TKind, TVertex,
};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

const BUILTIN: &[(&str, &str)] = &[
    ("fig2/a", include_str!("../../../catalog/fig2/a.tpl")),
    ("fig2/b", include_str!("../../../catalog/fig2/b.tpl")),
    ("fig13/a", include_str!("../../../catalog/fig13/a.tpl")),
    ("fig13/b", include_str!("../../../catalog/fig13/b.tpl")),
    ("fig13/c", include_str!("../../../catalog/fig13/c.tpl")),
    ("fig13/d", include_str!("../../../catalog/fig13/d.tpl")),
    ("fig13/e", include_str!("../../../catalog/fig13/e.tpl")),
    ("fig13/f", include_str!("../../../catalog/fig13/f.tpl")),
    ("fig13/g", include_str!("../../../catalog/fig13/g.tpl")),
    ("fig14/a", include_str!("../../../catalog/fig14/a.tpl")),
    ("fig14/b", include_str!("../../../catalog/fig14/b.tpl")),
    ("fig14/c", include_str!("../../../catalog/fig14/c.tpl")),
    ("fig14/d", include_str!("../../../catalog/fig14/d.tpl")),
    ("fig23/a", include_str!("../../../catalog/fig23/a.tpl")),
    ("fig23/b", include_str!("../../../catalog/fig23/b.tpl")),
    ("fig23/c", include_str!("../../../catalog/fig23/c.tpl")),
    ("fig29/a", include_str!("../../../catalog/fig29/a.tpl")),
    ("fig29/b", include_str!("../../../catalog/fig29/b.tpl")),
    ("fig29/c", include_str!("../../../catalog/fig29/c.tpl")),
    ("fig29/d", include_str!("../../../catalog/fig29/d.tpl")),
    (
        "extra/fig22a",
        include_str!("../../../catalog/extra/fig22a.tpl"),
    ),
    (
        "extra/fig22b",
        include_str!("../../../catalog/extra/fig22b.tpl"),
    ),
    (
        "extra/fig22c",
        include_str!("../../../catalog/extra/fig22c.tpl"),
    ),
    (
        "extra/fig23e",
        include_str!("../../../catalog/extra/fig23e.tpl"),
    ),
];

/// Keys of the built-in templates, e.g. `fig13/g`.
pub fn builtin_keys() -> Vec<&'static str> {
    BUILTIN.iter().map(|(k, _)| *k).collect()
}

pub fn builtin(key: &str) -> Result<GraphTemplate> {
    let (_, text) = BUILTIN
        .iter()
        .find(|(k, _)| *k == key)
        .ok_or_else(|| Error::DanglingReference(format!("no built-in template {key}")))?;
    GraphTemplate::parse(text)
}

/// All built-in templates of one figure directory, in key order.
pub fn figure(dir: &str) -> Vec<(String, GraphTemplate)> {
    let prefix = format!("{dir}/");
    BUILTIN
        .iter()
        .filter(|(k, _)| k.starts_with(&prefix))
        .map(|(k, t)| {
            (
                k.to_string(),
                GraphTemplate::parse(t).expect("built-in template parses"),
            )
        })
        .collect()
}

/// The nine graphs of Fig. 2 and Fig. 13.
pub fn nine_graphs() -> Vec<(String, GraphTemplate)> {
    let mut v = figure("fig2");
    v.extend(figure("fig13"));
    v
}

/// A Γ_m component matching `t`, with the template-dart -> chart-dart map.
///
/// Templates with BW whites are compared against components with their
/// terminal strands removed; orientations are enforced where `t` has them.
pub fn contains_template(chart: &Chart, m: u32, t: &GraphTemplate) -> Option<Vec<usize>> {
    let comps = gamma_components(chart, m).ok()?;
    let reduced = t.blacks() == 0 && t.vertices.iter().any(|v| v.bw);
    let mode = if t.has_orientation() {
        OrientMode::Pattern
    } else {
        OrientMode::Ignore
    };
    for c in &comps {
        let (g, cd) = crate::template::component_template(chart, c, reduced);
        if g.vertices.len() != t.vertices.len() || g.darts.len() != t.darts.len() {
            continue;
        }
        if let Some((_, map)) = find_iso(t, &g, mode) {
            return Some(map.into_iter().map(|x| cd[x]).collect());
        }
    }
    None
}

/// Which checks the enumerator applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FilterSet {
    pub connected: bool,
    pub planar: bool,
    pub no_loop: bool,
    /// b ≡ 3w (mod 2); holds for every matching, kept as an explicit check.
    pub parity: bool,
    /// At most one terminal edge per white, and some orientation satisfies
    /// condition (iii) with every terminal edge middle (Assumption 2).
    pub assumption2: bool,
    /// A component with one white vertex is impossible (Lemma 4.1).
    pub lemma41: bool,
}

impl FilterSet {
    pub const NAMES: [&'static str; 6] = [
        "connected",
        "planar",
        "no-loop",
        "parity",
        "assumption2",
        "lemma4.1",
    ];

    pub fn none() -> FilterSet {
        FilterSet {
            connected: false,
            planar: false,
            no_loop: false,
            parity: false,
            assumption2: false,
            lemma41: false,
        }
    }

    /// Connected planar components only.
    pub fn structural() -> FilterSet {
        FilterSet {
            connected: true,
            planar: true,
            ..FilterSet::none()
        }
    }

    /// The filter set that reproduces Lemma 7.1 at w = 5.
    pub fn paper() -> FilterSet {
        FilterSet {
            connected: true,
            planar: true,
            no_loop: true,
            parity: true,
            assumption2: true,
            lemma41: true,
        }
    }

    pub fn preset(name: &str) -> Option<FilterSet> {
        match name {
            "paper" => Some(FilterSet::paper()),
            "structural" => Some(FilterSet::structural()),
            "none" => Some(FilterSet::none()),
            _ => None,
        }
    }

    /// Comma-separated filter names, e.g. `connected,planar,no-loop`.
    pub fn parse(list: &str) -> Result<FilterSet> {
        let mut f = FilterSet::none();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "connected" => f.connected = true,
                "planar" => f.planar = true,
                "no-loop" => f.no_loop = true,
                "parity" => f.parity = true,
                "assumption2" => f.assumption2 = true,
                "lemma4.1" => f.lemma41 = true,
                other => return Err(Error::InvalidChart(format!("unknown filter {other}"))),
            }
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub canonical_form: String,
    pub filter: &'static str,
    pub blacks: usize,
}

#[derive(Clone, Debug)]
pub struct EnumResult {
    pub classes: Vec<ROClass>,
    /// Black-vertex count of each class, aligned with `classes`.
    pub blacks: Vec<usize>,
    /// Raw configurations examined (after fixing white order and rotation).
    pub raw: usize,
    /// Raw configurations dropped per structural filter.
    pub raw_rejected: BTreeMap<&'static str, usize>,
    /// Classes dropped by class-level filters.
    pub rejected: Vec<Rejection>,
}

/// Raw configuration: white i owns darts 3i, 3i+1, 3i+2 in rotation order.
struct Raw {
    w: usize,
    terminal: Vec<bool>,
    mate: Vec<usize>,
}

impl Raw {
    fn next(&self, d: usize) -> usize {
        let v = d / 3;
        let mut x = d;
        loop {
            x = 3 * v + (x + 1) % 3;
            if !self.terminal[x] {
                return x;
            }
        }
    }

    fn edges(&self) -> usize {
        (0..3 * self.w)
            .filter(|&d| !self.terminal[d] && self.mate[d] > d)
            .count()
    }

    fn connected(&self) -> bool {
        let mut seen = vec![false; self.w];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for d in 3 * v..3 * v + 3 {
                if !self.terminal[d] {
                    let u = self.mate[d] / 3;
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    fn faces(&self) -> usize {
        let n = 3 * self.w;
        let mut seen = vec![false; n];
        let mut f = 0;
        for s in 0..n {
            if self.terminal[s] || seen[s] {
                continue;
            }
            f += 1;
            let mut d = s;
            while !seen[d] {
                seen[d] = true;
                d = self.next(self.mate[d]);
            }
        }
        f.max(1)
    }

    fn planar(&self) -> bool {
        self.w as i64 - self.edges() as i64 + self.faces() as i64 == 2
    }

    fn has_loop(&self) -> bool {
        (0..3 * self.w).any(|d| !self.terminal[d] && self.mate[d] / 3 == d / 3)
    }

    fn template(&self, name: &str) -> GraphTemplate {
        let mut t = GraphTemplate {
            name: name.to_string(),
            vertices: vec![],
            darts: vec![],
            edges: vec![],
            disks: vec![],
        };
        let mut idx = vec![usize::MAX; 3 * self.w];
        for v in 0..self.w {
            let mut rot = Vec::new();
            for d in 3 * v..3 * v + 3 {
                if !self.terminal[d] {
                    idx[d] = t.darts.len();
                    rot.push(t.darts.len());
                    t.darts.push(TDart {
                        id: format!("d{d}"),
                        vertex: v,
                        edge: usize::MAX,
                        dir: None,
                    });
                }
            }
            let bw = (3 * v..3 * v + 3).any(|d| self.terminal[d]);
            t.vertices.push(TVertex {
                id: format!("v{v}"),
                kind: TKind::White,
                bw,
                rot,
            });
        }
        for d in 0..3 * self.w {
            if !self.terminal[d] && self.mate[d] > d {
                let (a, b) = (idx[d], idx[self.mate[d]]);
                let e = t.edges.len();
                t.darts[a].edge = e;
                t.darts[b].edge = e;
                t.edges.push(TEdge {
                    id: format!("e{e}"),
                    darts: [a, b],
                });
            }
        }
        t
    }
}

/// Terminal-count vectors in non-increasing order summing to `b`.
fn count_vectors(w: usize, b: usize) -> Vec<Vec<usize>> {
    fn rec(w: usize, left: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == w {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for t in (0..=cap.min(left)).rev() {
            cur.push(t);
            rec(w, left - t, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(w, b, 3, &mut vec![], &mut out);
    out
}

fn matchings(
    free: &[usize],
    mate: &mut Vec<usize>,
    f: &mut dyn FnMut(&Vec<usize>) -> Result<()>,
) -> Result<()> {
    let Some(&a) = free.iter().find(|&&d| mate[d] == usize::MAX) else {
        return f(mate);
    };
    for &b in free {
        if b != a && mate[b] == usize::MAX {
            mate[a] = b;
            mate[b] = a;
            matchings(free, mate, f)?;
            mate[a] = usize::MAX;
            mate[b] = usize::MAX;
        }
    }
    Ok(())
}

/// Some orientation makes every trivalent white mixed and every BW white
/// pass straight through (its terminal edge then sits in the middle).
pub fn assumption2_orientable(t: &GraphTemplate) -> bool {
    if t.vertices
        .iter()
        .any(|v| v.kind == TKind::White && v.rot.len() < 2)
    {
        return false;
    }
    let e = t.edges.len();
    if e > 20 {
        return false;
    }
    (0u32..1 << e).any(|mask| local_ok(t, |edge| mask >> edge & 1 == 1))
}

/// Local condition at every white under the orientation `tail_first(edge)`
/// (true: the edge's first dart is its tail).
pub(crate) fn local_ok(t: &GraphTemplate, tail_first: impl Fn(usize) -> bool) -> bool {
    t.vertices.iter().all(|v| {
        if v.kind != TKind::White {
            return true;
        }
        let outs = v
            .rot
            .iter()
            .filter(|&&d| {
                let e = t.darts[d].edge;
                (t.edges[e].darts[0] == d) == tail_first(e)
            })
            .count();
        if v.bw {
            outs == 0 || outs == v.rot.len()
        } else {
            outs != 0 && outs != v.rot.len()
        }
    })
}

/// The template with edge `e` oriented per `tail_first(e)`.
pub(crate) fn with_orientation(
    t: &GraphTemplate,
    tail_first: impl Fn(usize) -> bool,
) -> GraphTemplate {
    let mut o = t.clone();
    for (e, edge) in t.edges.iter().enumerate() {
        let [a, b] = edge.darts;
        let (ta, tb) = if tail_first(e) {
            (Dir::Out, Dir::In)
        } else {
            (Dir::In, Dir::Out)
        };
        o.darts[a].dir = Some(ta);
        o.darts[b].dir = Some(tb);
    }
    o
}

/// All RO-classes of connected Γ_m component shapes with `w` whites.
///
/// Whites are interchangeable and each white's rotation may be turned, so
/// raw configurations are generated with terminal counts non-increasing
/// along the white order and each white's terminals first in its rotation.
pub fn enumerate_components(
    w: usize,
    filters: FilterSet,
    budget: Option<usize>,
) -> Result<EnumResult> {
    if w == 0 || w > 6 {
        return Err(Error::BudgetExceeded(format!("w = {w} outside 1..=6")));
    }
    let mut res = EnumResult {
        classes: vec![],
        blacks: vec![],
        raw: 0,
        raw_rejected: BTreeMap::new(),
        rejected: vec![],
    };
    for name in ["connected", "planar", "no-loop"] {
        res.raw_rejected.insert(name, 0);
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut found: Vec<(String, GraphTemplate, usize)> = Vec::new();
    for b in (0..=3 * w).filter(|b| (3 * w - b) % 2 == 0) {
        for counts in count_vectors(w, b) {
            let mut terminal = vec![false; 3 * w];
            for (v, &c) in counts.iter().enumerate() {
                for j in 0..c {
                    terminal[3 * v + j] = true;
                }
            }
            let free: Vec<usize> = (0..3 * w).filter(|&d| !terminal[d]).collect();
            let mut mate = vec![usize::MAX; 3 * w];
            let mut raw = Raw {
                w,
                terminal: terminal.clone(),
                mate: vec![],
            };
            matchings(&free, &mut mate, &mut |m| {
                res.raw += 1;
                if let Some(cap) = budget {
                    if res.raw > cap {
                        return Err(Error::BudgetExceeded(format!(
                            "more than {cap} raw configurations"
                        )));
                    }
                }
                raw.mate.clone_from(m);
                if filters.connected && !raw.connected() {
                    *res.raw_rejected.get_mut("connected").unwrap() += 1;
                    return Ok(());
                }
                if filters.planar && !raw.planar() {
                    *res.raw_rejected.get_mut("planar").unwrap() += 1;
                    return Ok(());
                }
                if filters.no_loop && raw.has_loop() {
                    *res.raw_rejected.get_mut("no-loop").unwrap() += 1;
                    return Ok(());
                }
                let t = raw.template("candidate");
                let key = canonical_string(&t.canonical_code());
                if !seen.contains_key(&key) {
                    seen.insert(key.clone(), found.len());
                    found.push((key, t, b));
                }
                Ok(())
            })?;
        }
    }
    let mut kept = 0;
    for (key, mut t, b) in found {
        let verdict = class_filter(&t, w, b, filters);
        match verdict {
            Some(filter) => res.rejected.push(Rejection {
                canonical_form: key,
                filter,
                blacks: b,
            }),
            None => {
                kept += 1;
                t.name = format!("w{w}-class{kept}");
                res.classes.push(ro_canonical(&t));
                res.blacks.push(b);
            }
        }
    }
    Ok(res)
}

fn class_filter(t: &GraphTemplate, w: usize, b: usize, f: FilterSet) -> Option<&'static str> {
    if f.lemma41 && w == 1 {
        return Some("lemma4.1");
    }
    if f.parity && (3 * w + b) % 2 != 0 {
        return Some("parity");
    }
    if f.assumption2 {
        let max_terminals = t
            .vertices
            .iter()
            .map(|v| 3 - v.rot.len())
            .max()
            .unwrap_or(0);
        if max_terminals > 1 || !assumption2_orientable(t) {
            return Some("assumption2");
        }
    }
    None
}

/// Canonical form of a template's underlying unoriented graph.
pub fn shape_form(t: &GraphTemplate) -> String {
    ro_canonical(&t.unoriented()).canonical_form
}
