//! Rule-driven replay of the exclusion case analysis for the nine w = 5
//! components: orientation and terminal-placement branches, per-region
//! lower bounds on interior whites, IO-Calculation, and trusted leaves.

use crate::catalog::{builtin, local_ok, nine_graphs, shape_form, with_orientation};
use crate::chart::Dir;
use crate::error::{Error, Result};
use crate::template::{
    canonical_string, find_iso, GraphTemplate, OrientMode, TDart, TEdge, TKind, TVertex,
};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

pub const BUILTIN_RULEBASE: &str = include_str!("../../../catalog/rulebase.rules");

/// Exclusion lemma for each candidate that the case analysis removes.
pub const LEMMA_MAP: &[(&str, &str)] = &[
    ("fig13/a", "Lemma 7.4"),
    ("fig13/c", "Lemma 7.5"),
    ("fig13/b", "Lemma 8.2"),
    ("fig13/d", "Lemma 9.1"),
    ("fig13/e", "Lemma 11.2"),
    ("fig13/f", "Proposition 12.2"),
    ("fig13/g", "Proposition 14.5"),
];

// ---------------------------------------------------------------------------
// IO-Calculation

/// Whether `whites` interior whites (each net ±1) and `terminals` interior
/// black vertices (each ±1) can balance the boundary arcs.
pub fn io_balance(
    boundary_in: usize,
    boundary_out: usize,
    interior_whites: usize,
    interior_terminals: usize,
) -> bool {
    let d = boundary_in.abs_diff(boundary_out);
    let n = interior_whites + interior_terminals;
    d <= n && (n - d) % 2 == 0
}

/// A boundary arc of Γ_k pointing into the region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryArc {
    /// Direction at its boundary white.
    pub dir: Dir,
    /// The arc is middle at its white, so it may be a terminal edge.
    pub may_be_terminal: bool,
}

/// Least number of interior whites making the region balance.
///
/// A terminal boundary arc ends at a black vertex inside and cancels itself.
/// Each interior white contributes ±1 and may carry one terminal edge of
/// label k (its middle arc), whose black vertex contributes another ±1.
pub fn min_interior_whites(spec: &[BoundaryArc]) -> usize {
    let signed = |a: &BoundaryArc| if a.dir == Dir::In { 1i64 } else { -1 };
    let total: i64 = spec.iter().map(signed).sum();
    let optional: Vec<i64> = spec
        .iter()
        .filter(|a| a.may_be_terminal)
        .map(signed)
        .collect();
    let plus = optional.iter().filter(|&&s| s > 0).count() as i64;
    let minus = optional.len() as i64 - plus;
    let mut best = usize::MAX;
    for p in 0..=plus {
        for q in 0..=minus {
            let d = (total - p + q).unsigned_abs() as usize;
            best = best.min(d.div_ceil(2));
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Rulebase

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    LowerBound(usize),
    Io,
    /// Candidate keys and the templates they are forced into, pairwise.
    Forced(Vec<String>),
    Leaf,
    Filter(String),
    Support,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Pattern {
    pub k: Option<usize>,
    pub feelers_min: Option<usize>,
    pub feelers_max: Option<usize>,
    pub coherent: Option<bool>,
    pub outside_same: Option<bool>,
    pub candidates: Vec<String>,
    pub matches: Vec<String>,
    pub tight: bool,
    /// Leaf rules: how far below the budget the branch may sit.
    pub max_slack: Option<usize>,
    pub requires: Vec<String>,
    /// Free-form tags (`lens`, `loop`, `any`, `whites=1`).
    pub tags: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaRule {
    pub id: String,
    pub pattern: Pattern,
    pub conclusion: Conclusion,
    pub cite: String,
    pub quote: String,
}

fn parse_pattern(s: &str, line: usize) -> Result<Pattern> {
    let mut p = Pattern::default();
    let num = |v: &str| {
        v.parse::<usize>().map_err(|_| Error::Parse {
            line,
            msg: format!("bad number {v}"),
        })
    };
    let list = |v: &str| v.split('|').map(str::to_string).collect::<Vec<_>>();
    for tok in s.split_whitespace() {
        if let Some(v) = tok.strip_prefix("feelers>=") {
            p.feelers_min = Some(num(v)?);
        } else if let Some(v) = tok.strip_prefix("feelers<=") {
            p.feelers_max = Some(num(v)?);
        } else if let Some(v) = tok.strip_prefix("feelers=") {
            p.feelers_min = Some(num(v)?);
            p.feelers_max = Some(num(v)?);
        } else if let Some(v) = tok.strip_prefix("k=") {
            p.k = Some(num(v)?);
        } else if let Some(v) = tok.strip_prefix("boundary=") {
            p.coherent = Some(match v {
                "coherent" => true,
                "incoherent" => false,
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("bad boundary {v}"),
                    })
                }
            });
        } else if let Some(v) = tok.strip_prefix("outside=") {
            p.outside_same = Some(match v {
                "same" => true,
                "mixed" => false,
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("bad outside {v}"),
                    })
                }
            });
        } else if let Some(v) = tok.strip_prefix("candidate=") {
            p.candidates = list(v);
        } else if let Some(v) = tok.strip_prefix("match=") {
            p.matches = list(v);
        } else if let Some(v) = tok.strip_prefix("requires=") {
            p.requires = v.split(',').map(str::to_string).collect();
        } else if let Some(v) = tok.strip_prefix("slack<=") {
            p.max_slack = Some(num(v)?);
        } else if tok == "tight" {
            p.tight = true;
        } else {
            p.tags.push(tok.to_string());
        }
    }
    Ok(p)
}

fn parse_conclusion(s: &str, line: usize) -> Result<Conclusion> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    let arg = || {
        toks.get(1)
            .map(|x| x.to_string())
            .ok_or_else(|| Error::Parse {
                line,
                msg: "missing argument".into(),
            })
    };
    Ok(match toks.first().copied() {
        Some("lower_bound") => {
            Conclusion::LowerBound(arg()?.parse().map_err(|_| Error::Parse {
                line,
                msg: "bad bound".into(),
            })?)
        }
        Some("io") => Conclusion::Io,
        Some("forced") => Conclusion::Forced(arg()?.split('|').map(str::to_string).collect()),
        Some("leaf") => Conclusion::Leaf,
        Some("filter") => Conclusion::Filter(arg()?),
        Some("support") => Conclusion::Support,
        _ => {
            return Err(Error::Parse {
                line,
                msg: format!("unknown conclusion {s}"),
            })
        }
    })
}

pub fn parse_rulebase(text: &str) -> Result<Vec<LemmaRule>> {
    let mut rules = Vec::new();
    let mut cur: HashMap<&str, (usize, String)> = HashMap::new();
    let flush =
        |cur: &mut HashMap<&str, (usize, String)>, rules: &mut Vec<LemmaRule>| -> Result<()> {
            if cur.is_empty() {
                return Ok(());
            }
            let get = |k: &str| {
                cur.get(k).cloned().ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("stanza missing {k}"),
                })
            };
            let (_, id) = get("id")?;
            let (pl, pattern) = get("pattern")?;
            let (cl, conclusion) = get("conclusion")?;
            rules.push(LemmaRule {
                id,
                pattern: parse_pattern(&pattern, pl)?,
                conclusion: parse_conclusion(&conclusion, cl)?,
                cite: get("cite")?.1,
                quote: get("quote")?.1,
            });
            cur.clear();
            Ok(())
        };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            flush(&mut cur, &mut rules)?;
            continue;
        }
        let (k, v) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: "expected key: value".into(),
        })?;
        let key = match k.trim() {
            "id" => "id",
            "pattern" => "pattern",
            "conclusion" => "conclusion",
            "cite" => "cite",
            "quote" => "quote",
            other => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("unknown field {other}"),
                })
            }
        };
        cur.insert(key, (i + 1, v.trim().to_string()));
    }
    flush(&mut cur, &mut rules)?;
    Ok(rules)
}

pub fn builtin_rulebase() -> Vec<LemmaRule> {
    parse_rulebase(BUILTIN_RULEBASE).expect("built-in rulebase parses")
}

// ---------------------------------------------------------------------------
// Configurations

/// One complementary region of the component under a fixed orientation and
/// terminal placement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionConfig {
    pub name: String,
    pub k: usize,
    pub is_disk: bool,
    pub feelers: usize,
    pub coherent: bool,
    /// For 2-angled disks without feelers: whether the two edges off the
    /// disk point the same way (both inward or both outward).
    pub outside_same: Option<bool>,
    /// Label m+1 arcs entering the region at boundary whites.
    pub io_spec: Vec<BoundaryArc>,
}

impl Pattern {
    /// Largest slack at which a leaf rule may close a branch.
    pub fn leaf_slack(&self) -> Option<usize> {
        match (self.tight, self.max_slack) {
            (_, Some(s)) => Some(s),
            (true, None) => Some(0),
            _ => None,
        }
    }

    /// Disk-rule pattern test; graph-level tokens are ignored here.
    pub fn matches_region(&self, r: &RegionConfig) -> bool {
        if !r.is_disk {
            return false;
        }
        if self.k.is_some_and(|k| k != r.k) {
            return false;
        }
        if self.feelers_min.is_some_and(|x| r.feelers < x)
            || self.feelers_max.is_some_and(|x| r.feelers > x)
        {
            return false;
        }
        if self.coherent.is_some_and(|c| c != r.coherent) {
            return false;
        }
        if let Some(same) = self.outside_same {
            if r.outside_same != Some(same) {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Dart(usize),
    Terminal,
}

/// Label-m slots at a white in rotation order, with the terminal inserted at
/// `sector` for BW whites.
fn slots(t: &GraphTemplate, v: usize, sector: Option<usize>) -> Vec<(Slot, Dir)> {
    let vx = &t.vertices[v];
    let mut s: Vec<(Slot, Dir)> = vx
        .rot
        .iter()
        .map(|&d| (Slot::Dart(d), t.darts[d].dir.expect("oriented")))
        .collect();
    if vx.bw {
        let d0 = s[0].1;
        s.insert(
            sector.unwrap_or(0) % vx.rot.len() + 1,
            (Slot::Terminal, d0.flip()),
        );
    }
    s
}

fn lone_index(s: &[(Slot, Dir)]) -> usize {
    (0..s.len())
        .find(|&i| s.iter().filter(|x| x.1 == s[i].1).count() == 1)
        .unwrap_or(0)
}

/// Region configurations of an oriented reduced template with terminals
/// placed; `placement[v]` is the sector index at BW white v.
pub fn region_configs(t: &GraphTemplate, placement: &HashMap<usize, usize>) -> Vec<RegionConfig> {
    let (orbits, _) = t.faces();
    let names = region_names(t);
    let mut out = Vec::new();
    for (fi, orbit) in orbits.iter().enumerate() {
        let mut verts: Vec<usize> = orbit.iter().map(|&d| t.darts[d].vertex).collect();
        let len = verts.len();
        verts.sort_unstable();
        verts.dedup();
        let is_disk = verts.len() == len;
        let coherent = orbit.iter().all(|&d| t.darts[d].dir == Some(Dir::Out))
            || orbit.iter().all(|&d| t.darts[d].dir == Some(Dir::In));
        let mut feelers = 0;
        let mut io_spec = Vec::new();
        let mut third_dirs = Vec::new();
        for &y in orbit {
            let v = t.darts[y].vertex;
            let x = t.prev(y);
            let sl = slots(t, v, placement.get(&v).copied());
            let n = sl.len();
            let pos = |d: usize| {
                sl.iter()
                    .position(|s| matches!(s.0, Slot::Dart(z) if z == d))
                    .unwrap()
            };
            let (a, b) = (pos(x), pos(y));
            let lone = lone_index(&sl);
            let delta = sl[lone].1;
            // sectors a, a+1, ..., b-1 lie in this corner
            let mut i = a;
            loop {
                let far = i != lone && (i + 1) % n != lone;
                io_spec.push(BoundaryArc {
                    dir: if far { delta.flip() } else { delta },
                    may_be_terminal: far,
                });
                i = (i + 1) % n;
                if i == b {
                    break;
                }
                if matches!(sl[i].0, Slot::Terminal) {
                    feelers += 1;
                }
            }
            if n == 3 {
                let third = (0..3).find(|&j| j != a && j != b).unwrap();
                third_dirs.push(sl[third].1);
            }
        }
        let outside_same = (is_disk && verts.len() == 2 && feelers == 0 && third_dirs.len() == 2)
            .then(|| third_dirs[0] == third_dirs[1]);
        out.push(RegionConfig {
            name: names[fi].clone(),
            k: verts.len(),
            is_disk,
            feelers,
            coherent,
            outside_same,
            io_spec,
        });
    }
    out
}

/// Region names from the template's disk annotations, `F<i>` otherwise.
pub fn region_names(t: &GraphTemplate) -> Vec<String> {
    let (orbits, face_of) = t.faces();
    let mut names: Vec<String> = (0..orbits.len()).map(|i| format!("F{}", i + 1)).collect();
    for (n, d) in &t.disks {
        names[face_of[*d]] = n.clone();
    }
    names
}

/// The sectors of BW white `v` in face order: sector s puts the terminal in
/// the face of `rot[(s + 1) % 2]`.
pub fn sector_face(t: &GraphTemplate, v: usize, s: usize) -> usize {
    let (_, face_of) = t.faces();
    let rot = &t.vertices[v].rot;
    face_of[rot[(s + 1) % rot.len()]]
}

/// The template with a black vertex and terminal edge at each BW white.
pub fn with_terminals(t: &GraphTemplate, placement: &HashMap<usize, usize>) -> GraphTemplate {
    let mut o = t.clone();
    for v in 0..t.vertices.len() {
        if !t.vertices[v].bw {
            continue;
        }
        let s = placement.get(&v).copied().unwrap_or(0) % t.vertices[v].rot.len();
        let dir = t.darts[t.vertices[v].rot[0]].dir.map(Dir::flip);
        let tw = o.darts.len();
        let tb = tw + 1;
        let bv = o.vertices.len();
        let e = o.edges.len();
        let vid = t.vertices[v].id.clone();
        o.darts.push(TDart {
            id: format!("{vid}.t"),
            vertex: v,
            edge: e,
            dir,
        });
        o.darts.push(TDart {
            id: format!("{vid}.b"),
            vertex: bv,
            edge: e,
            dir: dir.map(Dir::flip),
        });
        o.edges.push(TEdge {
            id: format!("{vid}-terminal"),
            darts: [tw, tb],
        });
        o.vertices.push(TVertex {
            id: format!("{vid}-black"),
            kind: TKind::Black,
            bw: false,
            rot: vec![tb],
        });
        o.vertices[v].rot.insert(s + 1, tw);
        o.vertices[v].bw = false;
    }
    o
}

/// Inverse of [`with_terminals`]: drop black vertices, mark their whites BW.
/// Returns the reduced template and the sector of each BW white.
pub fn reduce(t: &GraphTemplate) -> (GraphTemplate, HashMap<usize, usize>) {
    let mut keep = vec![true; t.darts.len()];
    let mut bw = vec![false; t.vertices.len()];
    let mut sector = HashMap::new();
    for v in t.vertices.iter().filter(|v| v.kind == TKind::Black) {
        let b = v.rot[0];
        let w = t.twin(b);
        keep[b] = false;
        keep[w] = false;
        let wv = t.darts[w].vertex;
        bw[wv] = true;
        let p = t.vertices[wv].rot.iter().position(|&x| x == w).unwrap();
        sector.insert(wv, (p + 2) % 3);
    }
    let mut vmap = vec![usize::MAX; t.vertices.len()];
    let mut dmap = vec![usize::MAX; t.darts.len()];
    let mut o = GraphTemplate {
        name: t.name.clone(),
        vertices: vec![],
        darts: vec![],
        edges: vec![],
        disks: vec![],
    };
    for (i, v) in t.vertices.iter().enumerate() {
        if v.kind == TKind::Black {
            continue;
        }
        vmap[i] = o.vertices.len();
        o.vertices.push(TVertex {
            id: v.id.clone(),
            kind: v.kind,
            bw: v.bw || bw[i],
            rot: vec![],
        });
    }
    for (i, d) in t.darts.iter().enumerate() {
        if keep[i] {
            dmap[i] = o.darts.len();
            o.darts.push(TDart {
                id: d.id.clone(),
                vertex: vmap[d.vertex],
                edge: usize::MAX,
                dir: d.dir,
            });
        }
    }
    for v in &t.vertices {
        if v.kind == TKind::Black {
            continue;
        }
        let nv = vmap[t.darts[v.rot[0]].vertex];
        o.vertices[nv].rot = v
            .rot
            .iter()
            .filter(|&&d| keep[d])
            .map(|&d| dmap[d])
            .collect();
    }
    for e in &t.edges {
        let [a, b] = e.darts;
        if keep[a] {
            let ei = o.edges.len();
            o.darts[dmap[a]].edge = ei;
            o.darts[dmap[b]].edge = ei;
            o.edges.push(TEdge {
                id: e.id.clone(),
                darts: [dmap[a], dmap[b]],
            });
        }
    }
    o.disks = t
        .disks
        .iter()
        .filter(|(_, d)| keep[*d])
        .map(|(n, d)| (n.clone(), dmap[*d]))
        .collect();
    let sector = sector.into_iter().map(|(v, s)| (vmap[v], s)).collect();
    (o, sector)
}

// ---------------------------------------------------------------------------
// Orientation classes

#[derive(Clone, Debug)]
pub struct OrientationClass {
    pub canonical_form: String,
    pub representative: GraphTemplate,
    /// Raw assignments RO-equivalent to the representative.
    pub orbit: usize,
}

#[derive(Clone, Debug)]
pub struct OrientationEnumeration {
    pub raw: usize,
    pub classes: Vec<OrientationClass>,
    /// Classes removed by forced-pseudo-chart rules, with the rule id.
    pub pruned: Vec<(OrientationClass, String)>,
}

fn raw_orientations(t: &GraphTemplate) -> Vec<GraphTemplate> {
    let e = t.edges.len();
    (0u32..1 << e)
        .filter(|mask| local_ok(t, |x| mask >> x & 1 == 1))
        .map(|mask| with_orientation(t, |x| mask >> x & 1 == 1))
        .collect()
}

/// Catalog key whose underlying graph is `t`'s, if any.
pub fn identify(t: &GraphTemplate) -> Option<String> {
    let f = shape_form(t);
    nine_graphs()
        .into_iter()
        .find(|(_, g)| shape_form(g) == f)
        .map(|(k, _)| k)
}

/// Forced template for this candidate, if a forcing rule applies.
fn forced_target(rules: &[LemmaRule], key: Option<&str>) -> Option<(String, GraphTemplate)> {
    let key = key?;
    for r in rules {
        if let Conclusion::Forced(targets) = &r.conclusion {
            if let Some(i) = r.pattern.candidates.iter().position(|c| c == key) {
                let target = builtin(targets.get(i)?).ok()?;
                return Some((r.id.clone(), target));
            }
        }
    }
    None
}

/// Orientation assignments satisfying condition (iii) at trivalent whites
/// and Assumption 2 at BW whites, up to RO-equivalence, pruned by forcing
/// rules of the rulebase.
pub fn enumerate_orientations(
    candidate: &GraphTemplate,
    rules: &[LemmaRule],
) -> OrientationEnumeration {
    let base = candidate.unoriented();
    let raw = raw_orientations(&base);
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut all: Vec<OrientationClass> = Vec::new();
    for o in raw.iter() {
        let key = canonical_string(&o.canonical_code());
        match index.get(&key) {
            Some(&i) => all[i].orbit += 1,
            None => {
                index.insert(key.clone(), all.len());
                all.push(OrientationClass {
                    canonical_form: key,
                    representative: o.clone(),
                    orbit: 1,
                });
            }
        }
    }
    let forced = forced_target(rules, identify(candidate).as_deref());
    let mut classes = Vec::new();
    let mut pruned = Vec::new();
    for c in all {
        match &forced {
            Some((id, target))
                if find_iso(target, &c.representative, OrientMode::Pattern).is_none() =>
            {
                pruned.push((c, id.clone()))
            }
            _ => classes.push(c),
        }
    }
    OrientationEnumeration {
        raw: raw.len(),
        classes,
        pruned,
    }
}

// ---------------------------------------------------------------------------
// Exclusion

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub region: String,
    pub rule: String,
    pub bound: usize,
    /// The facts the rule was matched against.
    pub config: RegionConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// Bounds sum past the white-vertex budget.
    Arithmetic {
        terms: Vec<Term>,
        sum: usize,
        text: String,
    },
    /// The branch is a forced-pseudo-chart violation.
    Forced { rule: String, target: String },
    /// A trusted lemma closes a branch at or just below the budget.
    Leaf {
        rule: String,
        template: String,
        terms: Vec<Term>,
        sum: usize,
        text: String,
    },
    Open {
        terms: Vec<Term>,
        sum: usize,
        slack: usize,
    },
}

impl Outcome {
    pub fn is_closed(&self) -> bool {
        !matches!(self, Outcome::Open { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub orientation: String,
    /// BW white -> region holding its terminal edge.
    pub placement: BTreeMap<String, String>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Excluded,
    Survives,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub candidate: String,
    pub verdict: Verdict,
    pub lemma: Option<String>,
    /// Rule ids used anywhere in the proof forest, sorted.
    pub rule_chain: Vec<String>,
    pub orientation_classes: usize,
    pub branches: Vec<Branch>,
}

fn orientation_text(t: &GraphTemplate) -> String {
    let mut parts = Vec::new();
    for e in &t.edges {
        let [a, b] = e.darts;
        let (tail, head) = if t.darts[a].dir == Some(Dir::Out) {
            (a, b)
        } else {
            (b, a)
        };
        parts.push(format!(
            "{}:{}->{}",
            e.id, t.vertices[t.darts[tail].vertex].id, t.vertices[t.darts[head].vertex].id
        ));
    }
    parts.join(" ")
}

fn sum_text(w: usize, terms: &[Term], sum: usize, w_total: usize) -> String {
    let mut s = w.to_string();
    for t in terms.iter().filter(|t| t.bound > 0) {
        s.push_str(&format!(" + {}", t.bound));
    }
    let rel = if sum > w_total {
        ">"
    } else if sum == w_total {
        "="
    } else {
        "<"
    };
    format!("{s} = {sum} {rel} {w_total}")
}

fn has_rule(rules: &[LemmaRule], id: &str) -> bool {
    rules.iter().any(|r| r.id == id)
}

/// Strongest lemma bound per region (IO excluded).
fn lemma_terms(rules: &[LemmaRule], regions: &[RegionConfig]) -> Vec<Term> {
    regions
        .iter()
        .map(|r| {
            let mut best = Term {
                region: r.name.clone(),
                rule: String::new(),
                bound: 0,
                config: r.clone(),
            };
            for rule in rules {
                if let Conclusion::LowerBound(b) = rule.conclusion {
                    if rule.pattern.tags.is_empty()
                        && rule.pattern.matches_region(r)
                        && b > best.bound
                    {
                        best.bound = b;
                        best.rule = rule.id.clone();
                    }
                }
            }
            best
        })
        .collect()
}

fn io_rule(rules: &[LemmaRule]) -> Option<&LemmaRule> {
    rules.iter().find(|r| r.conclusion == Conclusion::Io)
}

/// Evaluate one branch: lemma bounds first, IO-Calculation where they fall
/// short, then trusted leaves on tight branches.
fn evaluate(
    rules: &[LemmaRule],
    oriented: &GraphTemplate,
    placement: &HashMap<usize, usize>,
    w_total: usize,
) -> Outcome {
    let regions = region_configs(oriented, placement);
    let w = oriented.whites();
    let mut terms = lemma_terms(rules, &regions);
    let mut sum = w + terms.iter().map(|t| t.bound).sum::<usize>();
    if sum <= w_total {
        if let Some(io) = io_rule(rules) {
            for (t, r) in terms.iter_mut().zip(&regions) {
                let b = min_interior_whites(&r.io_spec);
                if b > t.bound {
                    t.bound = b;
                    t.rule = io.id.clone();
                }
            }
            sum = w + terms.iter().map(|t| t.bound).sum::<usize>();
        }
    }
    if sum > w_total {
        let text = sum_text(w, &terms, sum, w_total);
        return Outcome::Arithmetic { terms, sum, text };
    }
    if sum <= w_total {
        let full = with_terminals(oriented, placement);
        for rule in rules.iter().filter(|r| {
            r.conclusion == Conclusion::Leaf
                && r.pattern.leaf_slack().is_some_and(|s| w_total - sum <= s)
        }) {
            if !rule.pattern.requires.iter().all(|q| has_rule(rules, q)) {
                continue;
            }
            for key in &rule.pattern.matches {
                let Ok(tpl) = builtin(key) else { continue };
                let target = if tpl.blacks() > 0 { &full } else { oriented };
                if find_iso(&tpl, target, OrientMode::Pattern).is_some() {
                    let text = sum_text(w, &terms, sum, w_total);
                    return Outcome::Leaf {
                        rule: rule.id.clone(),
                        template: key.clone(),
                        terms,
                        sum,
                        text,
                    };
                }
            }
        }
    }
    Outcome::Open {
        slack: w_total - sum,
        terms,
        sum,
    }
}

/// All terminal placements: one sector per BW white.
fn placements(t: &GraphTemplate) -> Vec<HashMap<usize, usize>> {
    let bws: Vec<usize> = (0..t.vertices.len())
        .filter(|&v| t.vertices[v].bw)
        .collect();
    (0..1usize << bws.len())
        .map(|mask| {
            bws.iter()
                .enumerate()
                .map(|(i, &v)| (v, mask >> i & 1))
                .collect()
        })
        .collect()
}

/// Explore every orientation class and terminal placement of a candidate.
///
/// Excluded when every branch closes; survives when some open branch has
/// slack. A candidate whose open branches are all tight needs a deeper
/// argument than the rulebase provides and is reported as incomplete.
pub fn exclude_candidate(
    candidate: &GraphTemplate,
    rules: &[LemmaRule],
    w_total: usize,
) -> Result<CandidateReport> {
    let key = identify(candidate);
    let names = region_names(&candidate.unoriented());
    let en = enumerate_orientations(candidate, rules);
    let mut branches = Vec::new();
    for (c, rule) in &en.pruned {
        let target = forced_target(rules, key.as_deref())
            .map(|(_, t)| t.name)
            .unwrap_or_default();
        branches.push(Branch {
            orientation: orientation_text(&c.representative),
            placement: BTreeMap::new(),
            outcome: Outcome::Forced {
                rule: rule.clone(),
                target,
            },
        });
    }
    for c in &en.classes {
        for p in placements(&c.representative) {
            let placement = p
                .iter()
                .map(|(&v, &s)| {
                    (
                        c.representative.vertices[v].id.clone(),
                        names[sector_face(&c.representative, v, s)].clone(),
                    )
                })
                .collect();
            let outcome = evaluate(rules, &c.representative, &p, w_total);
            branches.push(Branch {
                orientation: orientation_text(&c.representative),
                placement,
                outcome,
            });
        }
    }
    let open: Vec<&Branch> = branches.iter().filter(|b| !b.outcome.is_closed()).collect();
    let verdict = if open.is_empty() {
        Verdict::Excluded
    } else if open
        .iter()
        .any(|b| matches!(b.outcome, Outcome::Open { slack, .. } if slack > 0))
    {
        Verdict::Survives
    } else {
        return Err(Error::RulebaseIncomplete(format!(
            "{}: {} tight branch(es) left open, e.g. {} with {:?}",
            key.clone().unwrap_or_else(|| candidate.name.clone()),
            open.len(),
            open[0].orientation,
            open[0].placement
        )));
    };
    let mut chain: Vec<String> = Vec::new();
    for b in &branches {
        match &b.outcome {
            Outcome::Arithmetic { terms, .. }
            | Outcome::Leaf { terms, .. }
            | Outcome::Open { terms, .. } => {
                chain.extend(terms.iter().filter(|t| t.bound > 0).map(|t| t.rule.clone()));
            }
            Outcome::Forced { .. } => {}
        }
        match &b.outcome {
            Outcome::Leaf { rule, .. } | Outcome::Forced { rule, .. } => chain.push(rule.clone()),
            _ => {}
        }
    }
    chain.sort();
    chain.dedup();
    let lemma = match verdict {
        Verdict::Excluded => key
            .as_deref()
            .and_then(|k| LEMMA_MAP.iter().find(|(c, _)| *c == k))
            .map(|(_, l)| l.to_string()),
        Verdict::Survives => None,
    };
    Ok(CandidateReport {
        candidate: key.unwrap_or_else(|| candidate.name.clone()),
        verdict,
        lemma,
        rule_chain: chain,
        orientation_classes: en.classes.len(),
        branches,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub w_total: usize,
    pub candidates: Vec<CandidateReport>,
    /// Candidates whose open branches were all tight, with the reason.
    pub incomplete: Vec<(String, String)>,
}

impl VerificationReport {
    pub fn survivors(&self) -> Vec<&str> {
        self.candidates
            .iter()
            .filter(|c| c.verdict == Verdict::Survives)
            .map(|c| c.candidate.as_str())
            .collect()
    }

    pub fn excluded(&self) -> Vec<&str> {
        self.candidates
            .iter()
            .filter(|c| c.verdict == Verdict::Excluded)
            .map(|c| c.candidate.as_str())
            .collect()
    }
}

/// Run the case analysis over the nine graphs, collecting incomplete
/// candidates instead of failing on the first.
pub fn pipeline_report(rules: &[LemmaRule], w_total: usize) -> VerificationReport {
    let graphs = nine_graphs();
    let results: Vec<Result<CandidateReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = graphs
            .iter()
            .map(|(_, t)| s.spawn(move || exclude_candidate(t, rules, w_total)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("candidate worker panicked"))
            .collect()
    });
    let mut rep = VerificationReport {
        w_total,
        candidates: vec![],
        incomplete: vec![],
    };
    for ((key, _), r) in graphs.into_iter().zip(results) {
        match r {
            Ok(c) => rep.candidates.push(c),
            Err(e) => rep.incomplete.push((key, e.to_string())),
        }
    }
    rep
}

/// The full pipeline with the built-in rulebase and w(Γ) = 7.
pub fn theorem_pipeline() -> Result<VerificationReport> {
    pipeline_with(&builtin_rulebase(), 7)
}

pub fn pipeline_with(rules: &[LemmaRule], w_total: usize) -> Result<VerificationReport> {
    let rep = pipeline_report(rules, w_total);
    if let Some((_, why)) = rep.incomplete.first() {
        return Err(Error::RulebaseIncomplete(why.clone()));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Independent re-check

/// Re-check every closed branch using only the recorded facts: each term's
/// rule must match its recorded region and yield its bound (IO terms are
/// recomputed by exhaustive sign search), and sums must close as claimed.
pub fn check_report(
    rep: &VerificationReport,
    rules: &[LemmaRule],
) -> std::result::Result<(), String> {
    let by_id: HashMap<&str, &LemmaRule> = rules.iter().map(|r| (r.id.as_str(), r)).collect();
    for c in &rep.candidates {
        let w = 5;
        for b in &c.branches {
            let check_terms = |terms: &[Term]| -> std::result::Result<usize, String> {
                let mut s = w;
                for t in terms.iter().filter(|t| t.bound > 0) {
                    let rule = by_id
                        .get(t.rule.as_str())
                        .ok_or(format!("{}: unknown rule {}", c.candidate, t.rule))?;
                    match rule.conclusion {
                        Conclusion::LowerBound(x) => {
                            if x != t.bound || !rule.pattern.matches_region(&t.config) {
                                return Err(format!(
                                    "{}: {} does not give {} on {}",
                                    c.candidate, t.rule, t.bound, t.region
                                ));
                            }
                        }
                        Conclusion::Io => {
                            if brute_min_whites(&t.config.io_spec) != t.bound {
                                return Err(format!(
                                    "{}: IO bound on {} is not {}",
                                    c.candidate, t.region, t.bound
                                ));
                            }
                        }
                        _ => {
                            return Err(format!("{}: {} is not a bound rule", c.candidate, t.rule))
                        }
                    }
                    s += t.bound;
                }
                Ok(s)
            };
            match &b.outcome {
                Outcome::Arithmetic { terms, sum, .. } => {
                    let s = check_terms(terms)?;
                    if s != *sum || s <= rep.w_total {
                        return Err(format!(
                            "{}: sum {s} does not exceed {}",
                            c.candidate, rep.w_total
                        ));
                    }
                }
                Outcome::Leaf {
                    rule,
                    template,
                    terms,
                    sum,
                    ..
                } => {
                    let s = check_terms(terms)?;
                    let r = by_id
                        .get(rule.as_str())
                        .ok_or(format!("unknown leaf {rule}"))?;
                    let slack_ok = s <= rep.w_total
                        && r.pattern.leaf_slack().is_some_and(|x| rep.w_total - s <= x);
                    if s != *sum
                        || !slack_ok
                        || r.conclusion != Conclusion::Leaf
                        || !r.pattern.matches.contains(template)
                    {
                        return Err(format!(
                            "{}: leaf {rule} on {template} not justified",
                            c.candidate
                        ));
                    }
                }
                Outcome::Forced { rule, .. } => {
                    let r = by_id
                        .get(rule.as_str())
                        .ok_or(format!("unknown forcing rule {rule}"))?;
                    if !matches!(r.conclusion, Conclusion::Forced(_))
                        || !r.pattern.candidates.contains(&c.candidate)
                    {
                        return Err(format!(
                            "{}: forcing rule {rule} does not apply",
                            c.candidate
                        ));
                    }
                }
                Outcome::Open { .. } => {
                    if c.verdict == Verdict::Excluded {
                        return Err(format!("{}: excluded with an open branch", c.candidate));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Exhaustive version of [`min_interior_whites`]: try every terminal subset
/// and every white/terminal sign pattern.
pub fn brute_min_whites(spec: &[BoundaryArc]) -> usize {
    let optional: Vec<usize> = (0..spec.len())
        .filter(|&i| spec[i].may_be_terminal)
        .collect();
    let mut best = usize::MAX;
    for mask in 0u32..1 << optional.len() {
        let mut d: i64 = 0;
        for (i, a) in spec.iter().enumerate() {
            let term = optional
                .iter()
                .position(|&j| j == i)
                .is_some_and(|p| mask >> p & 1 == 1);
            if !term {
                d += if a.dir == Dir::In { 1 } else { -1 };
            }
        }
        'w: for whites in 0..=spec.len() + 1 {
            for terms in 0..=whites {
                if brute_balance(d, whites + terms) {
                    best = best.min(whites);
                    break 'w;
                }
            }
        }
    }
    best
}

/// Some choice of ±1 for each of `n` interior vertices cancels `d`.
pub fn brute_balance(d: i64, n: usize) -> bool {
    (0u64..1 << n).any(|signs| {
        let s: i64 = (0..n)
            .map(|i| if signs >> i & 1 == 1 { 1 } else { -1 })
            .sum();
        d + s == 0
    })
}
