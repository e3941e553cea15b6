//! C-moves as local rewrites.
//!
//! A template is data: a before and an after fragment sharing a cyclic
//! interface of legs, a list of side conditions and a declared effect. The
//! rewriting itself is done by one engine per move family, working on the
//! rotation system directly. Templates name their engine, so a transcription
//! can be reviewed and replaced, and every application is checked against the
//! declared effect and against `validate`.

use crate::chart::{Chart, Dart, Dir, Edge, Link, UnionFind, Vertex, VertexKind};
use crate::error::{parse_err, Error, Result};
use crate::features::{all_strands, dart_is_middle, Strand};
use serde::Serialize;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    HoopBirth,
    HoopDeath,
    Saddle,
    CrossBirth,
    CrossDeath,
    WhiteBirth,
    WhiteDeath,
    BlackCross,
    BlackUncross,
    BlackThroughWhite,
    BlackOutOfWhite,
}

impl Engine {
    const ALL: [Engine; 11] = [
        Engine::HoopBirth,
        Engine::HoopDeath,
        Engine::Saddle,
        Engine::CrossBirth,
        Engine::CrossDeath,
        Engine::WhiteBirth,
        Engine::WhiteDeath,
        Engine::BlackCross,
        Engine::BlackUncross,
        Engine::BlackThroughWhite,
        Engine::BlackOutOfWhite,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Engine::HoopBirth => "hoop-birth",
            Engine::HoopDeath => "hoop-death",
            Engine::Saddle => "saddle",
            Engine::CrossBirth => "cross-birth",
            Engine::CrossDeath => "cross-death",
            Engine::WhiteBirth => "white-birth",
            Engine::WhiteDeath => "white-death",
            Engine::BlackCross => "black-cross",
            Engine::BlackUncross => "black-uncross",
            Engine::BlackThroughWhite => "black-through-white",
            Engine::BlackOutOfWhite => "black-out-of-white",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Engine> {
        Engine::ALL.iter().copied().find(|e| e.keyword() == s)
    }

    pub fn inverse(self) -> Engine {
        match self {
            Engine::HoopBirth => Engine::HoopDeath,
            Engine::HoopDeath => Engine::HoopBirth,
            Engine::Saddle => Engine::Saddle,
            Engine::CrossBirth => Engine::CrossDeath,
            Engine::CrossDeath => Engine::CrossBirth,
            Engine::WhiteBirth => Engine::WhiteDeath,
            Engine::WhiteDeath => Engine::WhiteBirth,
            Engine::BlackCross => Engine::BlackUncross,
            Engine::BlackUncross => Engine::BlackCross,
            Engine::BlackThroughWhite => Engine::BlackOutOfWhite,
            Engine::BlackOutOfWhite => Engine::BlackThroughWhite,
        }
    }

    /// Names of the dart roles a site of this engine binds.
    fn roles(self) -> &'static [&'static str] {
        match self {
            Engine::HoopBirth => &["anchor"],
            Engine::HoopDeath => &["inner"],
            Engine::Saddle => &["a", "b"],
            Engine::CrossBirth => &["a", "b"],
            Engine::CrossDeath => &["bigon-x", "bigon-y"],
            Engine::WhiteBirth => &["x", "y"],
            Engine::WhiteDeath => &["y-leg"],
            Engine::BlackCross => &["black", "edge"],
            Engine::BlackUncross => &["black"],
            Engine::BlackThroughWhite => &["terminal"],
            Engine::BlackOutOfWhite => &["black", "a", "b"],
        }
    }
}

/// A declared change; `None` means unconstrained.
pub type Delta = Option<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Effect {
    pub w: Delta,
    pub free: Delta,
    pub hoops: Delta,
    pub crossings: Delta,
}

impl Effect {
    fn negate(self) -> Effect {
        let n = |d: Delta| d.map(|x| -x);
        Effect {
            w: n(self.w),
            free: n(self.free),
            hoops: n(self.hoops),
            crossings: n(self.crossings),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub w: i64,
    pub free: i64,
    pub hoops: i64,
    pub crossings: i64,
}

impl Counts {
    pub fn of(chart: &Chart) -> Counts {
        let (_, neg_free) = crate::chart::complexity(chart);
        Counts {
            w: chart.white_count() as i64,
            free: -neg_free,
            hoops: chart.hoop_count() as i64,
            crossings: chart.crossing_count() as i64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LegEnd {
    Dart(String),
    Leg(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Leg {
    pub label: u32,
    pub dir: Dir,
    pub end: LegEnd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FragVertex {
    pub id: String,
    pub kind: VertexKind,
    pub darts: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FragEdge {
    pub id: String,
    pub label: u32,
    pub tail: String,
    pub head: String,
}

/// A pseudo chart inside a disk, with the legs crossing the boundary listed counterclockwise.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Fragment {
    pub vertices: Vec<FragVertex>,
    pub edges: Vec<FragEdge>,
    pub legs: Vec<Leg>,
}

impl Fragment {
    pub fn interface(&self) -> Vec<(u32, Dir)> {
        self.legs.iter().map(|l| (l.label, l.dir)).collect()
    }

    pub fn count(&self, kind: VertexKind) -> usize {
        self.vertices.iter().filter(|v| v.kind == kind).count()
    }

    /// Direction of each fragment dart at its vertex.
    fn dart_dirs(&self) -> std::result::Result<HashMap<&str, (Dir, u32)>, String> {
        let mut m: HashMap<&str, (Dir, u32)> = HashMap::new();
        for e in &self.edges {
            for (d, dir) in [(e.tail.as_str(), Dir::Out), (e.head.as_str(), Dir::In)] {
                if m.insert(d, (dir, e.label)).is_some() {
                    return Err(format!("dart {d} used twice"));
                }
            }
        }
        for (k, l) in self.legs.iter().enumerate() {
            if let LegEnd::Dart(d) = &l.end {
                if m.insert(d.as_str(), (l.dir, l.label)).is_some() {
                    return Err(format!("dart {d} of leg {} used twice", k + 1));
                }
            }
        }
        Ok(m)
    }

    /// Structural checks: every dart is attached once, vertex rules hold, paired legs agree.
    pub fn check(&self) -> std::result::Result<(), String> {
        let dirs = self.dart_dirs()?;
        let mut seen = HashSet::new();
        for v in &self.vertices {
            if v.darts.len() != v.kind.degree() {
                return Err(format!("vertex {} has {} darts", v.id, v.darts.len()));
            }
            let mut ds = Vec::new();
            for d in &v.darts {
                if !seen.insert(d.as_str()) {
                    return Err(format!("dart {d} listed twice"));
                }
                ds.push(
                    *dirs
                        .get(d.as_str())
                        .ok_or_else(|| format!("dart {d} is not attached"))?,
                );
            }
            match v.kind {
                VertexKind::White => {
                    let pattern: Vec<Dir> = ds.iter().map(|x| x.0).collect();
                    if crate::chart::inward_block_start(&pattern).is_none() {
                        return Err(format!("white {} lacks an inward block", v.id));
                    }
                    for i in 0..6 {
                        let (a, b) = (ds[i].1 as i64, ds[(i + 1) % 6].1 as i64);
                        if (a - b).abs() != 1 || ds[i].1 != ds[(i + 2) % 6].1 {
                            return Err(format!("white {} labels do not alternate", v.id));
                        }
                    }
                }
                VertexKind::Crossing => {
                    for i in 0..2 {
                        if ds[i].1 != ds[i + 2].1 || ds[i].0 == ds[i + 2].0 {
                            return Err(format!("crossing {} diagonal mismatch", v.id));
                        }
                    }
                    if (ds[0].1 as i64 - ds[1].1 as i64).abs() < 2 {
                        return Err(format!("crossing {} labels too close", v.id));
                    }
                }
                VertexKind::Phantom | VertexKind::Black => {}
            }
        }
        if seen.len() != dirs.len() {
            return Err("a dart is not on any vertex".into());
        }
        for (k, l) in self.legs.iter().enumerate() {
            if let LegEnd::Leg(j) = l.end {
                let other = self
                    .legs
                    .get(j.wrapping_sub(1))
                    .ok_or_else(|| format!("leg {} points to missing leg {j}", k + 1))?;
                if other.end != LegEnd::Leg(k + 1) || other.label != l.label || other.dir == l.dir {
                    return Err(format!("legs {} and {j} do not pair", k + 1));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveTemplate {
    pub name: String,
    /// Built-in family name or "custom".
    pub family: String,
    pub engine: Engine,
    pub inverse: String,
    pub side_conditions: Vec<String>,
    pub inverse_side_conditions: Vec<String>,
    pub effect: Effect,
    pub before: Fragment,
    pub after: Fragment,
}

const FAMILIES: [&str; 6] = ["CI-R2", "CI-M1", "CI-M2", "CI-M3", "C-II", "C-III"];

const KNOWN_SIDES: [&str; 12] = [
    "no-black-inside",
    "empty-disk",
    "same-label",
    "coherent",
    "not-hoop",
    "label-gap>=2",
    "label-gap=1",
    "not-middle",
    "adjacent-black",
    "bigon-empty",
    "distinct-legs",
    "not-ring",
];

fn known_side(s: &str) -> bool {
    KNOWN_SIDES.contains(&s)
        || s.strip_prefix("label=")
            .is_some_and(|v| v.parse::<u32>().is_ok())
}

fn parse_delta(s: &str, line: usize) -> Result<Delta> {
    if s == "*" {
        return Ok(None);
    }
    s.trim_start_matches('+')
        .parse::<i64>()
        .map(Some)
        .map_err(|_| parse_err(line, format!("bad delta {s}")))
}

fn parse_dir(s: &str, line: usize) -> Result<Dir> {
    match s {
        "in" => Ok(Dir::In),
        "out" => Ok(Dir::Out),
        _ => Err(parse_err(line, format!("bad direction {s}"))),
    }
}

fn kv<'a>(tokens: &'a [&'a str], line: usize) -> Result<HashMap<&'a str, &'a str>> {
    let mut m = HashMap::new();
    for t in tokens {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, got {t}")))?;
        m.insert(k, v);
    }
    Ok(m)
}

fn need<'a>(m: &HashMap<&str, &'a str>, key: &str, line: usize) -> Result<&'a str> {
    m.get(key)
        .copied()
        .ok_or_else(|| parse_err(line, format!("missing {key}=")))
}

fn parse_label(s: &str, line: usize) -> Result<u32> {
    s.parse::<u32>()
        .ok()
        .filter(|&l| l > 0)
        .ok_or_else(|| parse_err(line, format!("bad label {s}")))
}

impl MoveTemplate {
    pub fn parse(text: &str) -> Result<MoveTemplate> {
        let mut name = None;
        let mut engine = None;
        let mut inverse = None;
        let mut sides = Vec::new();
        let mut inv_sides = Vec::new();
        let mut effect = None;
        let mut before = Fragment::default();
        let mut after = Fragment::default();
        let mut section: Option<bool> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            match toks[0] {
                "template" if toks.len() == 2 => name = Some(toks[1].to_string()),
                "engine" if toks.len() == 2 => {
                    engine =
                        Some(Engine::from_keyword(toks[1]).ok_or_else(|| {
                            parse_err(line, format!("unknown engine {}", toks[1]))
                        })?)
                }
                "inverse" if toks.len() == 2 => inverse = Some(toks[1].to_string()),
                "side" | "inverse-side" if toks.len() == 2 => {
                    if !known_side(toks[1]) {
                        return Err(parse_err(
                            line,
                            format!("unknown side condition {}", toks[1]),
                        ));
                    }
                    if toks[0] == "side" {
                        &mut sides
                    } else {
                        &mut inv_sides
                    }
                    .push(toks[1].to_string());
                }
                "effect" => {
                    let m = kv(&toks[1..], line)?;
                    effect = Some(Effect {
                        w: parse_delta(need(&m, "w", line)?, line)?,
                        free: parse_delta(need(&m, "free", line)?, line)?,
                        hoops: parse_delta(need(&m, "hoops", line)?, line)?,
                        crossings: parse_delta(need(&m, "crossings", line)?, line)?,
                    })
                }
                "before" if toks.len() == 1 => section = Some(false),
                "after" if toks.len() == 1 => section = Some(true),
                kw => {
                    let frag = match section {
                        Some(false) => &mut before,
                        Some(true) => &mut after,
                        None => {
                            return Err(parse_err(
                                line,
                                format!("unexpected {kw} outside a fragment"),
                            ))
                        }
                    };
                    parse_fragment_line(frag, &toks, line)?;
                }
            }
        }
        let name = name.ok_or_else(|| parse_err(1, "missing template line"))?;
        let engine = engine.ok_or_else(|| parse_err(1, "missing engine line"))?;
        let effect = effect.ok_or_else(|| parse_err(1, "missing effect line"))?;
        let family = if FAMILIES.contains(&name.as_str()) {
            name.clone()
        } else {
            "custom".to_string()
        };
        let inverse = inverse.unwrap_or_else(|| format!("{name}-inv"));
        let t = MoveTemplate {
            name,
            family,
            engine,
            inverse,
            side_conditions: sides,
            inverse_side_conditions: inv_sides,
            effect,
            before,
            after,
        };
        t.check().map_err(|m| parse_err(0, m))?;
        Ok(t)
    }

    /// Before and after fragments are well formed and share one interface.
    pub fn check(&self) -> std::result::Result<(), String> {
        self.before.check().map_err(|m| format!("before: {m}"))?;
        self.after.check().map_err(|m| format!("after: {m}"))?;
        if self.before.interface() != self.after.interface() {
            return Err("before and after interfaces differ".into());
        }
        Ok(())
    }

    pub fn is_self_inverse(&self) -> bool {
        self.inverse == self.name
    }

    /// The reverse rewrite: fragments swapped, effect negated.
    pub fn inverse_template(&self) -> MoveTemplate {
        if self.is_self_inverse() {
            return self.clone();
        }
        MoveTemplate {
            name: self.inverse.clone(),
            family: self.family.clone(),
            engine: self.engine.inverse(),
            inverse: self.name.clone(),
            side_conditions: self.inverse_side_conditions.clone(),
            inverse_side_conditions: self.side_conditions.clone(),
            effect: self.effect.negate(),
            before: self.after.clone(),
            after: self.before.clone(),
        }
    }

    /// Deltas implied by the fragments themselves.
    pub fn fragment_effect(&self) -> (i64, i64, i64) {
        let d = |k| self.after.count(k) as i64 - self.before.count(k) as i64;
        (
            d(VertexKind::White),
            d(VertexKind::Phantom),
            d(VertexKind::Crossing),
        )
    }

    fn label_filter(&self) -> Option<u32> {
        self.side_conditions
            .iter()
            .find_map(|s| s.strip_prefix("label=").and_then(|v| v.parse().ok()))
    }
}

fn parse_fragment_line(frag: &mut Fragment, toks: &[&str], line: usize) -> Result<()> {
    let kind = match toks[0] {
        "white" => Some(VertexKind::White),
        "black" => Some(VertexKind::Black),
        "cross" => Some(VertexKind::Crossing),
        "phantom" => Some(VertexKind::Phantom),
        _ => None,
    };
    if let Some(kind) = kind {
        if toks.len() != 3 {
            return Err(parse_err(line, "expected: <kind> <id> darts=<list>"));
        }
        let m = kv(&toks[2..], line)?;
        let darts = need(&m, "darts", line)?
            .split(',')
            .map(str::to_string)
            .collect();
        frag.vertices.push(FragVertex {
            id: toks[1].to_string(),
            kind,
            darts,
        });
        return Ok(());
    }
    match toks[0] {
        "edge" if toks.len() >= 2 => {
            let m = kv(&toks[2..], line)?;
            frag.edges.push(FragEdge {
                id: toks[1].to_string(),
                label: parse_label(need(&m, "label", line)?, line)?,
                tail: need(&m, "tail", line)?.to_string(),
                head: need(&m, "head", line)?.to_string(),
            });
        }
        "leg" if toks.len() >= 2 => {
            let k: usize = toks[1]
                .parse()
                .map_err(|_| parse_err(line, "bad leg number"))?;
            if k != frag.legs.len() + 1 {
                return Err(parse_err(line, format!("leg {k} out of order")));
            }
            let m = kv(&toks[2..], line)?;
            let end = match (m.get("dart"), m.get("to")) {
                (Some(d), None) => LegEnd::Dart(d.to_string()),
                (None, Some(j)) => {
                    LegEnd::Leg(j.parse().map_err(|_| parse_err(line, "bad leg target"))?)
                }
                _ => return Err(parse_err(line, "leg needs exactly one of dart= or to=")),
            };
            frag.legs.push(Leg {
                label: parse_label(need(&m, "label", line)?, line)?,
                dir: parse_dir(need(&m, "dir", line)?, line)?,
                end,
            });
        }
        kw => return Err(parse_err(line, format!("unknown line {kw}"))),
    }
    Ok(())
}

const BUILTIN_SOURCES: [&str; 6] = [
    include_str!("../../../catalog/moves/ci-r2.move"),
    include_str!("../../../catalog/moves/ci-m1.move"),
    include_str!("../../../catalog/moves/ci-m2.move"),
    include_str!("../../../catalog/moves/ci-m3.move"),
    include_str!("../../../catalog/moves/c-ii.move"),
    include_str!("../../../catalog/moves/c-iii.move"),
];

/// The six transcribed families followed by their inverses.
pub fn builtin_templates() -> Vec<MoveTemplate> {
    let fwd: Vec<MoveTemplate> = BUILTIN_SOURCES
        .iter()
        .map(|s| MoveTemplate::parse(s).expect("built-in move template parses"))
        .collect();
    let mut all = fwd.clone();
    all.extend(
        fwd.iter()
            .filter(|t| !t.is_self_inverse())
            .map(MoveTemplate::inverse_template),
    );
    all
}

pub fn builtin_template(name: &str) -> Option<MoveTemplate> {
    builtin_templates().into_iter().find(|t| t.name == name)
}

/// A place where a template applies. Darts are named by id, so a site can be
/// printed and parsed back, and `stamp` pins the exact chart it was found on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveSite {
    pub template: MoveTemplate,
    pub darts: Vec<String>,
    pub label: Option<u32>,
    pub inner_right: bool,
    pub stamp: u64,
}

impl MoveSite {
    /// Role name to chart dart id.
    pub fn embedding(&self) -> Vec<(String, String)> {
        self.template
            .engine
            .roles()
            .iter()
            .zip(&self.darts)
            .map(|(r, d)| (r.to_string(), d.clone()))
            .collect()
    }

    /// Compact text form: darts joined by commas, then the optional parameters.
    pub fn spec(&self) -> String {
        let mut s = if self.darts.is_empty() {
            "-".to_string()
        } else {
            self.darts.join(",")
        };
        if let Some(l) = self.label {
            s.push_str(&format!(";label={l}"));
        }
        if self.template.engine == Engine::HoopBirth {
            s.push_str(if self.inner_right {
                ";inner=right"
            } else {
                ";inner=left"
            });
        }
        s
    }

    /// Read back what `spec` printed, checking the result against the current sites.
    pub fn from_spec(chart: &Chart, template: &MoveTemplate, spec: &str) -> Result<MoveSite> {
        let sites = find_sites(chart, template);
        sites
            .into_iter()
            .find(|s| s.spec() == spec)
            .ok_or_else(|| Error::NotIncident(format!("no {} site {spec}", template.name)))
    }
}

pub fn chart_stamp(chart: &Chart) -> u64 {
    let mut h = DefaultHasher::new();
    chart.to_text().hash(&mut h);
    h.finish()
}

struct Raw {
    darts: Vec<usize>,
    label: Option<u32>,
    inner_right: bool,
}

fn raw(darts: Vec<usize>) -> Raw {
    Raw {
        darts,
        label: None,
        inner_right: false,
    }
}

fn on_hoop(c: &Chart, d: usize) -> bool {
    c.kind_of(d) == VertexKind::Phantom
}

fn real_pairs_in_faces(c: &Chart, faces: &crate::chart::Faces) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for orbit in &faces.orbits {
        let real: Vec<usize> = orbit.iter().copied().filter(|&d| c.is_real(d)).collect();
        for i in 0..real.len() {
            for j in 0..real.len() {
                if i != j {
                    out.push((real[i], real[j]));
                }
            }
        }
    }
    out
}

fn gap(c: &Chart, a: usize, b: usize) -> u32 {
    c.label(a).abs_diff(c.label(b))
}

fn raw_sites(c: &Chart, engine: Engine) -> Vec<Raw> {
    let faces = c.faces();
    let inf_face = c.infinity_face(&faces);
    let mut out = Vec::new();
    match engine {
        Engine::HoopBirth => {
            let anchors: Vec<Option<usize>> = if c.is_empty() {
                vec![None]
            } else {
                faces
                    .orbits
                    .iter()
                    .map(|o| o.iter().copied().filter(|&d| c.is_real(d)).min())
                    .collect()
            };
            for a in anchors {
                for label in 1..c.n {
                    for inner_right in [true, false] {
                        out.push(Raw {
                            darts: a.into_iter().collect(),
                            label: Some(label),
                            inner_right,
                        });
                    }
                }
            }
        }
        Engine::HoopDeath => {
            for v in 0..c.vertices.len() {
                if c.vertices[v].kind != VertexKind::Phantom {
                    continue;
                }
                let rr = c.real_rot(v);
                let (po, pi) = if c.dir(rr[0]) == Dir::Out {
                    (rr[0], rr[1])
                } else {
                    (rr[1], rr[0])
                };
                // the removed disk must not hold the point at infinity
                let empty = |d: usize| {
                    faces.orbits[faces.face_of[d]].len() == 1 && inf_face != Some(faces.face_of[d])
                };
                let inner = match (empty(po), empty(pi)) {
                    (true, _) => po,
                    (false, true) => pi,
                    (false, false) => continue,
                };
                out.push(Raw {
                    darts: vec![inner],
                    label: Some(c.label(po)),
                    inner_right: inner == po,
                });
            }
        }
        Engine::Saddle => {
            for (a, b) in real_pairs_in_faces(c, &faces) {
                if a < b
                    && c.label(a) == c.label(b)
                    && c.dir(a) == c.dir(b)
                    && c.edge_of(a) != c.edge_of(b)
                    && !on_hoop(c, a)
                    && !on_hoop(c, b)
                {
                    out.push(raw(vec![a, b]));
                }
            }
        }
        Engine::CrossBirth => {
            for (a, b) in real_pairs_in_faces(c, &faces) {
                if a < b && gap(c, a, b) >= 2 && !on_hoop(c, a) && !on_hoop(c, b) {
                    out.push(raw(vec![a, b]));
                }
            }
        }
        Engine::CrossDeath => {
            for x in 0..c.darts.len() {
                if !c.is_real(x) || c.kind_of(x) != VertexKind::Crossing {
                    continue;
                }
                let orbit = &faces.orbits[faces.face_of[x]];
                if orbit.len() != 2 || inf_face == Some(faces.face_of[x]) {
                    continue;
                }
                let y = if orbit[0] == x { orbit[1] } else { orbit[0] };
                let (c1, c2) = (c.vertex_of(x), c.vertex_of(y));
                if x > y
                    || c1 == c2
                    || c.vertex_of(c.twin(x)) != c2
                    || c.kind_of(y) != VertexKind::Crossing
                {
                    continue;
                }
                if c.twin(y) != c.prev_real_at(x) {
                    continue;
                }
                let n1 = c.next_real_at(x);
                let w1 = c.next_real_at(n1);
                let e2 = c.next_real_at(y);
                let n2 = c.next_real_at(e2);
                if c.twin(n1) == n2 || c.twin(w1) == e2 {
                    continue;
                }
                out.push(raw(vec![x, y]));
            }
        }
        Engine::WhiteBirth => {
            for (x, y) in real_pairs_in_faces(c, &faces) {
                if c.dir(x) == Dir::In
                    && c.dir(y) == Dir::Out
                    && gap(c, x, y) == 1
                    && !on_hoop(c, x)
                    && !on_hoop(c, y)
                {
                    out.push(raw(vec![x, y]));
                }
            }
        }
        Engine::WhiteDeath => {
            for w1 in 0..c.vertices.len() {
                if c.vertices[w1].kind != VertexKind::White {
                    continue;
                }
                let r = c.real_rot(w1);
                for s in 0..6 {
                    if white_death_shape(c, &faces, &r, s).is_some_and(|wp| {
                        wp.a[1..]
                            .iter()
                            .all(|&d| inf_face != Some(faces.face_of[d]))
                    }) {
                        out.push(raw(vec![r[s]]));
                    }
                }
            }
        }
        Engine::BlackCross => {
            for v in 0..c.vertices.len() {
                if c.vertices[v].kind != VertexKind::Black {
                    continue;
                }
                let db = c.real_rot(v)[0];
                for &y in &faces.orbits[faces.face_of[db]] {
                    if c.is_real(y) && gap(c, y, db) >= 2 && !on_hoop(c, y) {
                        out.push(raw(vec![db, y]));
                    }
                }
            }
        }
        Engine::BlackUncross => {
            for v in 0..c.vertices.len() {
                if c.vertices[v].kind != VertexKind::Black {
                    continue;
                }
                let db = c.real_rot(v)[0];
                let nn = c.twin(db);
                if c.kind_of(nn) != VertexKind::Crossing {
                    continue;
                }
                let w = c.next_real_at(nn);
                let s = c.next_real_at(w);
                let e = c.next_real_at(s);
                if c.twin(w) == e || c.twin(s) == db {
                    continue;
                }
                out.push(raw(vec![db]));
            }
        }
        Engine::BlackThroughWhite => {
            for w in 0..c.vertices.len() {
                if c.vertices[w].kind != VertexKind::White {
                    continue;
                }
                let r = c.real_rot(w);
                for s in 0..6 {
                    let d0 = r[s];
                    if c.kind_of(c.twin(d0)) != VertexKind::Black || dart_is_middle(c, d0) {
                        continue;
                    }
                    if (1..6).all(|k| c.vertex_of(c.twin(r[(s + k) % 6])) != w) {
                        out.push(raw(vec![d0]));
                    }
                }
            }
        }
        Engine::BlackOutOfWhite => {
            for v in 0..c.vertices.len() {
                if c.vertices[v].kind != VertexKind::Black {
                    continue;
                }
                let d = c.real_rot(v)[0];
                for &a in &faces.orbits[faces.face_of[d]] {
                    if !c.is_real(a)
                        || gap(c, a, d) != 1
                        || on_hoop(c, a)
                        || c.edge_of(a) == c.edge_of(d)
                    {
                        continue;
                    }
                    for &b in &faces.orbits[faces.face_of[c.twin(a)]] {
                        if c.is_real(b)
                            && c.label(b) == c.label(d)
                            && c.dir(b) == c.dir(a)
                            && !on_hoop(c, b)
                            && c.edge_of(b) != c.edge_of(d)
                            && c.edge_of(b) != c.edge_of(a)
                        {
                            out.push(raw(vec![d, a, b]));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Two white vertices joined by four consecutive edges bounding three empty bigons.
struct WhitePair {
    ly: usize,
    lx: usize,
    a: [usize; 4],
    xb: usize,
    yb: usize,
}

fn white_death_shape(
    c: &Chart,
    faces: &crate::chart::Faces,
    r: &[usize],
    s: usize,
) -> Option<WhitePair> {
    use Dir::*;
    let at = |k: usize| r[(s + k) % 6];
    let want = [In, In, In, Out, Out, Out];
    if (0..6).any(|k| c.dir(at(k)) != want[k]) {
        return None;
    }
    let w1 = c.vertex_of(r[0]);
    let a = [at(2), at(3), at(4), at(5)];
    let w2 = c.vertex_of(c.twin(a[0]));
    if w2 == w1 || c.kind_of(c.twin(a[0])) != VertexKind::White {
        return None;
    }
    let r2 = c.real_rot(w2);
    let q = r2.iter().position(|&d| d == c.twin(a[0]))?;
    for (k, &ak) in a.iter().enumerate() {
        if c.twin(ak) != r2[(q + 6 - k) % 6] {
            return None;
        }
    }
    for &ak in &a[1..] {
        if faces.orbits[faces.face_of[ak]].len() != 2 {
            return None;
        }
    }
    let (ly, lx) = (at(0), at(1));
    let (xb, yb) = (r2[(q + 1) % 6], r2[(q + 2) % 6]);
    for leg in [lx, ly, xb, yb] {
        let far = c.vertex_of(c.twin(leg));
        if far == w1 || far == w2 {
            return None;
        }
    }
    Some(WhitePair { ly, lx, a, xb, yb })
}

/// All places the template applies, each reported once.
pub fn find_sites(chart: &Chart, template: &MoveTemplate) -> Vec<MoveSite> {
    let stamp = chart_stamp(chart);
    let filter = template.label_filter();
    raw_sites(chart, template.engine)
        .into_iter()
        .filter(|r| match filter {
            None => true,
            Some(l) => r.label.or_else(|| r.darts.first().map(|&d| chart.label(d))) == Some(l),
        })
        .map(|r| MoveSite {
            template: template.clone(),
            darts: r.darts.iter().map(|&d| chart.darts[d].id.clone()).collect(),
            label: r.label,
            inner_right: r.inner_right,
            stamp,
        })
        // when the three faces around the new white vertex are not distinct,
        // only some cyclic orders admit a planar rewrite; keep those
        .filter(|s| {
            template.engine != Engine::BlackOutOfWhite
                || run(chart, s).is_ok_and(|a| a.chart.validate().ok)
        })
        .collect()
}

/// Sites of every built-in template.
pub fn all_sites(chart: &Chart) -> Vec<MoveSite> {
    builtin_templates()
        .iter()
        .flat_map(|t| find_sites(chart, t))
        .collect()
}

/// Working copy of a chart during a rewrite. Nothing is removed until
/// `finish`; dead elements are flagged instead, so indices stay valid.
struct Ed {
    c: Chart,
    dead_v: HashSet<usize>,
    dead_e: HashSet<usize>,
    dead_t: HashSet<usize>,
    /// Dead dart to a live dart with the same corner in front of it.
    moved: HashMap<usize, usize>,
    hints: Vec<(usize, usize)>,
}

impl Ed {
    fn new(c: &Chart) -> Ed {
        Ed {
            c: c.clone(),
            dead_v: HashSet::new(),
            dead_e: HashSet::new(),
            dead_t: HashSet::new(),
            moved: HashMap::new(),
            hints: Vec::new(),
        }
    }

    fn vertex(&mut self, kind: VertexKind, prefix: &str, names: &[&str]) -> (usize, Vec<usize>) {
        let vid = self.c.fresh_id(prefix);
        let v = self.c.vertices.len();
        let mut darts = Vec::new();
        for nm in names {
            darts.push(self.c.darts.len());
            self.c.darts.push(Dart {
                id: format!("{vid}.{nm}"),
                vertex: v,
                link: Link::Edge(usize::MAX),
            });
        }
        self.c.vertices.push(Vertex {
            id: vid,
            kind,
            rot: darts.clone(),
        });
        (v, darts)
    }

    fn set(&mut self, e: usize, tail: usize, head: usize) {
        self.c.edges[e].tail = tail;
        self.c.edges[e].head = head;
        self.c.darts[tail].link = Link::Edge(e);
        self.c.darts[head].link = Link::Edge(e);
    }

    /// Reattach edge `e` to `d` and `other`, keeping the direction `d` had.
    fn keep(&mut self, e: usize, d: usize, other: usize, dir_d: Dir) {
        if dir_d == Dir::Out {
            self.set(e, d, other)
        } else {
            self.set(e, other, d)
        }
    }

    fn new_edge(&mut self, label: u32, tail: usize, head: usize) -> usize {
        let id = self.c.fresh_id("e");
        let e = self.c.edges.len();
        self.c.edges.push(Edge {
            id,
            label,
            tail,
            head,
        });
        self.set(e, tail, head);
        e
    }

    /// New edge from `d` with direction `dir_d` at `d`.
    fn new_from(&mut self, label: u32, d: usize, other: usize, dir_d: Dir) {
        if dir_d == Dir::Out {
            self.new_edge(label, d, other);
        } else {
            self.new_edge(label, other, d);
        }
    }

    fn kill_vertex(&mut self, v: usize) {
        self.dead_v.insert(v);
    }

    fn kill_edge(&mut self, e: usize) {
        self.dead_e.insert(e);
    }

    fn map(&mut self, pairs: &[(usize, usize)]) {
        for &(a, b) in pairs {
            self.moved.insert(a, b);
        }
    }

    fn kill_tether(&mut self, t: usize) {
        self.dead_t.insert(t);
        for d in self.c.tethers[t] {
            let v = self.c.darts[d].vertex;
            self.c.vertices[v].rot.retain(|&x| x != d);
        }
    }

    /// Move all tether darts at `from` into the corner before `before`.
    fn move_tethers(&mut self, from: usize, before: usize) {
        let ts: Vec<usize> = self.c.vertices[from]
            .rot
            .iter()
            .copied()
            .filter(|&d| !self.c.is_real(d))
            .collect();
        for t in ts {
            self.c.vertices[from].rot.retain(|&x| x != t);
            self.insert_before(t, before);
        }
    }

    fn insert_before(&mut self, t: usize, before: usize) {
        let tv = self.c.darts[before].vertex;
        let p = self.c.vertices[tv]
            .rot
            .iter()
            .position(|&x| x == before)
            .expect("target in rotation");
        self.c.vertices[tv].rot.insert(p, t);
        self.c.darts[t].vertex = tv;
    }

    fn resolve(&self, mut d: usize) -> Option<usize> {
        for _ in 0..=self.c.darts.len() {
            if !self.dead_v.contains(&self.c.darts[d].vertex) {
                return Some(d);
            }
            d = *self.moved.get(&d)?;
        }
        None
    }

    /// Relocate stranded tethers, repair the tether tree, then compact.
    /// Returns the new chart and the new id of every old dart that survives
    /// or was mapped onto a survivor.
    fn finish(mut self) -> Result<(Chart, HashMap<usize, String>)> {
        let mut dead_vs: Vec<usize> = self.dead_v.iter().copied().collect();
        dead_vs.sort();
        for &v in &dead_vs {
            let rot = self.c.vertices[v].rot.clone();
            for (i, &t) in rot.iter().enumerate() {
                if self.c.is_real(t) {
                    continue;
                }
                let r = (1..rot.len())
                    .map(|k| rot[(i + k) % rot.len()])
                    .find(|&x| self.c.is_real(x));
                let target = r.and_then(|r| self.resolve(r)).ok_or_else(|| {
                    Error::InvalidResult(format!(
                        "nowhere to hang a tether from {}",
                        self.c.vertices[v].id
                    ))
                })?;
                self.insert_before(t, target);
            }
            let keep: Vec<usize> = self.c.vertices[v]
                .rot
                .iter()
                .copied()
                .filter(|&x| self.c.is_real(x))
                .collect();
            self.c.vertices[v].rot = keep;
        }
        let any_live = (0..self.c.vertices.len()).any(|v| !self.dead_v.contains(&v));
        self.c.infinity = match self.c.infinity {
            Some(d) if any_live => Some(
                self.resolve(d)
                    .ok_or_else(|| Error::InvalidResult("lost the infinity face".into()))?,
            ),
            _ => None,
        };
        if any_live && self.c.infinity.is_none() {
            self.c.infinity = (0..self.c.darts.len())
                .find(|&d| self.c.is_real(d) && !self.dead_v.contains(&self.c.darts[d].vertex));
        }
        let mut uf = UnionFind::new(self.c.vertices.len());
        for e in 0..self.c.edges.len() {
            if !self.dead_e.contains(&e) {
                let ed = &self.c.edges[e];
                uf.union(self.c.darts[ed.tail].vertex, self.c.darts[ed.head].vertex);
            }
        }
        for t in 0..self.c.tethers.len() {
            if self.dead_t.contains(&t) {
                continue;
            }
            let [a, b] = self.c.tethers[t];
            if !uf.union(self.c.darts[a].vertex, self.c.darts[b].vertex) {
                self.kill_tether(t);
            }
        }
        for (a, b) in std::mem::take(&mut self.hints) {
            let (Some(a), Some(b)) = (self.resolve(a), self.resolve(b)) else {
                continue;
            };
            if uf.union(self.c.darts[a].vertex, self.c.darts[b].vertex) {
                self.c.add_tether(a, b);
            }
        }
        let live: Vec<usize> = (0..self.c.vertices.len())
            .filter(|v| !self.dead_v.contains(v))
            .collect();
        if let Some(&first) = live.first() {
            let root = uf.find(first);
            if live.iter().any(|&v| uf.find(v) != root) {
                return Err(Error::InvalidResult(
                    "rewrite left the chart disconnected".into(),
                ));
            }
        }
        let mut ids = HashMap::new();
        for d in 0..self.c.darts.len() {
            if let Some(r) = self.resolve(d) {
                if self.c.is_real(r) {
                    ids.insert(d, self.c.darts[r].id.clone());
                }
            }
        }
        Ok((self.compact()?, ids))
    }

    fn compact(self) -> Result<Chart> {
        let c = &self.c;
        let mut vmap = vec![usize::MAX; c.vertices.len()];
        let mut dmap = vec![usize::MAX; c.darts.len()];
        let mut emap = vec![usize::MAX; c.edges.len()];
        let mut tmap = vec![usize::MAX; c.tethers.len()];
        let mut nv = 0;
        for v in 0..c.vertices.len() {
            if !self.dead_v.contains(&v) {
                vmap[v] = nv;
                nv += 1;
            }
        }
        let mut ne = 0;
        for e in 0..c.edges.len() {
            if !self.dead_e.contains(&e) {
                emap[e] = ne;
                ne += 1;
            }
        }
        let mut nt = 0;
        for t in 0..c.tethers.len() {
            if !self.dead_t.contains(&t) {
                tmap[t] = nt;
                nt += 1;
            }
        }
        let mut darts = Vec::new();
        for (d, dart) in c.darts.iter().enumerate() {
            if self.dead_v.contains(&dart.vertex) {
                continue;
            }
            let link = match dart.link {
                Link::Edge(e) if e != usize::MAX && emap[e] != usize::MAX => Link::Edge(emap[e]),
                Link::Tether(t) if tmap[t] != usize::MAX => Link::Tether(tmap[t]),
                Link::Tether(_) => continue,
                Link::Edge(_) => {
                    return Err(Error::InvalidResult(format!(
                        "dart {} lost its edge",
                        dart.id
                    )))
                }
            };
            dmap[d] = darts.len();
            darts.push(Dart {
                id: dart.id.clone(),
                vertex: vmap[dart.vertex],
                link,
            });
        }
        let mut vertices = Vec::new();
        for (v, vx) in c.vertices.iter().enumerate() {
            if vmap[v] == usize::MAX {
                continue;
            }
            let rot: Vec<usize> = vx.rot.iter().map(|&d| dmap[d]).collect();
            if rot.contains(&usize::MAX) {
                return Err(Error::InvalidResult(format!(
                    "vertex {} keeps a removed dart",
                    vx.id
                )));
            }
            vertices.push(Vertex {
                id: vx.id.clone(),
                kind: vx.kind,
                rot,
            });
        }
        let mut edges = Vec::new();
        for (e, ed) in c.edges.iter().enumerate() {
            if emap[e] == usize::MAX {
                continue;
            }
            let (tail, head) = (dmap[ed.tail], dmap[ed.head]);
            if tail == usize::MAX || head == usize::MAX {
                return Err(Error::InvalidResult(format!("edge {} lost an end", ed.id)));
            }
            edges.push(Edge {
                id: ed.id.clone(),
                label: ed.label,
                tail,
                head,
            });
        }
        let tethers = c
            .tethers
            .iter()
            .enumerate()
            .filter(|(t, _)| tmap[*t] != usize::MAX)
            .map(|(_, [a, b])| [dmap[*a], dmap[*b]])
            .collect();
        Ok(Chart {
            n: c.n,
            vertices,
            edges,
            darts,
            tethers,
            infinity: c.infinity.map(|d| dmap[d]),
        })
    }
}

struct Applied {
    chart: Chart,
    inverse_darts: Vec<String>,
    inverse_label: Option<u32>,
    inverse_inner_right: bool,
}

fn resolve_site(chart: &Chart, site: &MoveSite) -> Result<Vec<usize>> {
    site.darts
        .iter()
        .map(|id| {
            chart
                .dart_by_id(id)
                .ok_or_else(|| Error::StaleSite(format!("no dart {id}")))
        })
        .collect()
}

fn ids_of(ids: &HashMap<usize, String>, ds: &[usize]) -> Result<Vec<String>> {
    ds.iter()
        .map(|d| {
            ids.get(d)
                .cloned()
                .ok_or_else(|| Error::InvalidResult("inverse site dart vanished".into()))
        })
        .collect()
}

fn run(chart: &Chart, site: &MoveSite) -> Result<Applied> {
    let c = chart;
    let ds = resolve_site(c, site)?;
    let mut ed = Ed::new(c);
    let applied =
        |ed: Ed, inv: Vec<usize>, label: Option<u32>, inner_right: bool| -> Result<Applied> {
            let (chart, ids) = ed.finish()?;
            Ok(Applied {
                chart,
                inverse_darts: ids_of(&ids, &inv)?,
                inverse_label: label,
                inverse_inner_right: inner_right,
            })
        };
    match site.template.engine {
        Engine::HoopBirth => {
            let label = site
                .label
                .ok_or_else(|| Error::StaleSite("birth needs a label".into()))?;
            if label == 0 || label >= c.n {
                return Err(Error::LabelOutOfRange { label, n: c.n });
            }
            let (_, pd) = ed.vertex(VertexKind::Phantom, "p", &["o", "i"]);
            let (po, pi) = (pd[0], pd[1]);
            ed.new_edge(label, po, pi);
            let inner = if site.inner_right { po } else { pi };
            match ds.first() {
                Some(&anchor) => {
                    let child = if site.inner_right { pi } else { po };
                    ed.c.add_tether(anchor, child);
                }
                None => ed.c.infinity = Some(if site.inner_right { pi } else { po }),
            }
            applied(ed, vec![inner], Some(label), site.inner_right)
        }
        Engine::HoopDeath => {
            let inner = ds[0];
            let p = c.vertex_of(inner);
            let outer = c.twin(inner);
            let first_tether = c.vertices[p].rot.iter().copied().find(|&d| !c.is_real(d));
            let label = c.label(inner);
            let mut inverse = Vec::new();
            if let Some(t0) = first_tether {
                let Link::Tether(t) = c.darts[t0].link else {
                    unreachable!()
                };
                let y0 = c.twin(t0);
                let target = c.next_real_at(y0);
                ed.kill_tether(t);
                ed.map(&[(inner, target), (outer, target)]);
                inverse.push(target);
            }
            ed.kill_vertex(p);
            ed.kill_edge(c.edge_of(inner).expect("real"));
            applied(ed, inverse, Some(label), site.inner_right)
        }
        Engine::Saddle => {
            let (d1, d2) = (ds[0], ds[1]);
            let (t1, t2) = (c.twin(d1), c.twin(d2));
            let dir = c.dir(d1);
            ed.keep(c.edge_of(d1).unwrap(), d1, t2, dir);
            ed.keep(c.edge_of(d2).unwrap(), d2, t1, dir);
            ed.hints.push((t1, t2));
            applied(ed, vec![t1, t2], None, false)
        }
        Engine::CrossBirth => {
            let (da, db) = (ds[0], ds[1]);
            let (ta, tb) = (c.twin(da), c.twin(db));
            let (la, lb) = (c.label(da), c.label(db));
            let (ea, eb) = (c.edge_of(da).unwrap(), c.edge_of(db).unwrap());
            let (_, k1) = ed.vertex(VertexKind::Crossing, "c", &["e", "n", "w", "s"]);
            let (_, k2) = ed.vertex(VertexKind::Crossing, "c", &["e", "n", "w", "s"]);
            let [e1, n1, w1, s1] = [k1[0], k1[1], k1[2], k1[3]];
            let [e2, n2, w2, s2] = [k2[0], k2[1], k2[2], k2[3]];
            let (ad, bd) = (c.dir(da), c.dir(db));
            ed.keep(ea, da, n1, ad);
            ed.new_from(la, s1, s2, ad);
            ed.new_from(la, n2, ta, ad);
            ed.keep(eb, db, e2, bd);
            ed.new_from(lb, w2, e1, bd);
            ed.new_from(lb, w1, tb, bd);
            applied(ed, vec![e1, s2], None, false)
        }
        Engine::CrossDeath => {
            let (x, y) = (ds[0], ds[1]);
            let n1 = c.next_real_at(x);
            let w1 = c.next_real_at(n1);
            let s1 = c.twin(y);
            let e2 = c.next_real_at(y);
            let n2 = c.next_real_at(e2);
            let w2 = c.twin(x);
            let (da, ta, db, tb) = (c.twin(n1), c.twin(n2), c.twin(e2), c.twin(w1));
            let (ad, bd) = (c.dir(da), c.dir(db));
            ed.keep(c.edge_of(n1).unwrap(), da, ta, ad);
            ed.keep(c.edge_of(e2).unwrap(), db, tb, bd);
            for d in [x, y, n2, w1] {
                ed.kill_edge(c.edge_of(d).unwrap());
            }
            ed.kill_vertex(c.vertex_of(x));
            ed.kill_vertex(c.vertex_of(y));
            ed.map(&[
                (n1, ta),
                (w1, da),
                (s1, tb),
                (x, da),
                (n2, db),
                (w2, ta),
                (e2, tb),
                (y, da),
            ]);
            ed.hints.push((da, db));
            let (a, b) = if da < db { (da, db) } else { (db, da) };
            applied(ed, vec![a, b], None, false)
        }
        Engine::WhiteBirth => {
            let (dx, dy) = (ds[0], ds[1]);
            let (tx, ty) = (c.twin(dx), c.twin(dy));
            let (lx, ly) = (c.label(dx), c.label(dy));
            let (_, a) = ed.vertex(VertexKind::White, "w", &["y", "x", "1", "2", "3", "4"]);
            let (_, b) = ed.vertex(VertexKind::White, "w", &["4", "3", "2", "1", "x", "y"]);
            let (wly, wlx) = (a[0], a[1]);
            let (xb, yb) = (b[4], b[5]);
            ed.set(c.edge_of(dx).unwrap(), xb, dx);
            ed.new_edge(lx, tx, wlx);
            ed.set(c.edge_of(dy).unwrap(), dy, wly);
            ed.new_edge(ly, yb, ty);
            ed.new_edge(ly, b[3], a[2]);
            ed.new_edge(lx, a[3], b[2]);
            ed.new_edge(ly, a[4], b[1]);
            ed.new_edge(lx, a[5], b[0]);
            applied(ed, vec![wly], None, false)
        }
        Engine::WhiteDeath => {
            let faces = c.faces();
            let w1 = c.vertex_of(ds[0]);
            let r = c.real_rot(w1);
            let s = r.iter().position(|&d| d == ds[0]).unwrap();
            let wp = white_death_shape(c, &faces, &r, s)
                .ok_or_else(|| Error::StaleSite("not a white pair".into()))?;
            let b: Vec<usize> = wp.a.iter().map(|&d| c.twin(d)).collect();
            let (tx, dx, dy, ty) = (c.twin(wp.lx), c.twin(wp.xb), c.twin(wp.ly), c.twin(wp.yb));
            ed.set(c.edge_of(wp.xb).unwrap(), tx, dx);
            ed.kill_edge(c.edge_of(wp.lx).unwrap());
            ed.set(c.edge_of(wp.ly).unwrap(), dy, ty);
            ed.kill_edge(c.edge_of(wp.yb).unwrap());
            for &d in &wp.a {
                ed.kill_edge(c.edge_of(d).unwrap());
            }
            ed.kill_vertex(w1);
            ed.kill_vertex(c.vertex_of(b[0]));
            ed.map(&[
                (wp.lx, dy),
                (wp.a[0], tx),
                (wp.ly, ty),
                (wp.a[1], dy),
                (wp.a[2], dy),
                (wp.a[3], dy),
                (wp.xb, tx),
                (wp.yb, dx),
                (b[3], ty),
                (b[0], dy),
                (b[1], dy),
                (b[2], dy),
            ]);
            ed.hints.push((dx, dy));
            applied(ed, vec![dx, dy], None, false)
        }
        Engine::BlackCross => {
            let (db, y) = (ds[0], ds[1]);
            let beta = c.vertex_of(db);
            let far = c.twin(db);
            let ty = c.twin(y);
            let (li, lj) = (c.label(db), c.label(y));
            let (_, k) = ed.vertex(VertexKind::Crossing, "c", &["e", "n", "w", "s"]);
            let [ke, kn, kw, ks] = [k[0], k[1], k[2], k[3]];
            let e = c.edge_of(db).unwrap();
            if c.dir(db) == Dir::In {
                ed.set(e, far, ks);
                ed.new_edge(li, kn, db);
            } else {
                ed.set(e, ks, far);
                ed.new_edge(li, db, kn);
            }
            let yd = c.dir(y);
            ed.keep(c.edge_of(y).unwrap(), y, kw, yd);
            ed.new_from(lj, ke, ty, yd);
            ed.move_tethers(beta, ks);
            if c.infinity == Some(db) {
                ed.c.infinity = Some(ks);
            }
            applied(ed, vec![db], None, false)
        }
        Engine::BlackUncross => {
            let db = ds[0];
            let beta = c.vertex_of(db);
            let kn = c.twin(db);
            let kw = c.next_real_at(kn);
            let ks = c.next_real_at(kw);
            let ke = c.next_real_at(ks);
            let far = c.twin(ks);
            let (y, ty) = (c.twin(kw), c.twin(ke));
            ed.keep(c.edge_of(ks).unwrap(), far, db, c.dir(far));
            ed.keep(c.edge_of(kw).unwrap(), y, ty, c.dir(y));
            ed.kill_edge(c.edge_of(kn).unwrap());
            ed.kill_edge(c.edge_of(ke).unwrap());
            ed.kill_vertex(c.vertex_of(kn));
            ed.map(&[(kn, ty), (kw, ty), (ks, y), (ke, far)]);
            ed.hints.push((db, y));
            ed.move_tethers(beta, ty);
            if c.infinity == Some(db) {
                ed.c.infinity = Some(ty);
            }
            applied(ed, vec![db, y], None, false)
        }
        Engine::BlackThroughWhite => {
            let d0 = ds[0];
            let w = c.vertex_of(d0);
            let r = c.real_rot(w);
            let s = r.iter().position(|&d| d == d0).unwrap();
            let d: Vec<usize> = (0..6).map(|k| r[(s + k) % 6]).collect();
            let x: Vec<usize> = d.iter().map(|&q| c.twin(q)).collect();
            let bd = x[0];
            ed.keep(c.edge_of(d[2]).unwrap(), x[2], x[4], c.dir(x[2]));
            ed.kill_edge(c.edge_of(d[4]).unwrap());
            ed.keep(c.edge_of(d[1]).unwrap(), x[1], x[5], c.dir(x[1]));
            ed.kill_edge(c.edge_of(d[5]).unwrap());
            let (_, nb) = ed.vertex(VertexKind::Black, "b", &["0"]);
            let b3 = nb[0];
            ed.keep(c.edge_of(d[3]).unwrap(), b3, x[3], c.dir(d[3]));
            ed.kill_edge(c.edge_of(d0).unwrap());
            ed.kill_vertex(c.vertex_of(bd));
            ed.kill_vertex(w);
            ed.map(&[
                (d[0], x[5]),
                (d[1], x[5]),
                (bd, x[5]),
                (d[2], x[1]),
                (d[5], x[4]),
                (d[3], x[2]),
                (d[4], x[3]),
            ]);
            ed.hints.push((x[4], x[1]));
            ed.hints.push((x[2], b3));
            applied(ed, vec![b3, x[2], x[1]], None, false)
        }
        Engine::BlackOutOfWhite => {
            let (d, a, b) = (ds[0], ds[1], ds[2]);
            let beta = c.vertex_of(d);
            let (x3, ta, tb) = (c.twin(d), c.twin(a), c.twin(b));
            let (la, k) = (c.label(a), c.label(d));
            let (_, wd) = ed.vertex(VertexKind::White, "w", &["0", "1", "2", "3", "4", "5"]);
            let (_, nb) = ed.vertex(VertexKind::Black, "b", &["0"]);
            let bt = nb[0];
            let (ad, bdir) = (c.dir(a), c.dir(b));
            ed.keep(c.edge_of(a).unwrap(), a, wd[2], ad);
            ed.new_from(la, wd[4], ta, ad);
            ed.keep(c.edge_of(b).unwrap(), b, wd[1], bdir);
            ed.new_from(k, wd[5], tb, bdir);
            let d3dir = c.dir(d);
            ed.keep(c.edge_of(d).unwrap(), wd[3], x3, d3dir);
            ed.new_from(la, wd[0], bt, d3dir.flip());
            ed.move_tethers(beta, wd[3]);
            ed.kill_vertex(beta);
            ed.map(&[(d, wd[3])]);
            if c.infinity == Some(d) {
                ed.c.infinity = Some(wd[3]);
            }
            applied(ed, vec![wd[0]], None, false)
        }
    }
}

/// Apply a site, checking the declared effect and the validity of the result.
pub fn apply(chart: &Chart, site: &MoveSite) -> Result<Chart> {
    apply_with_inverse(chart, site).map(|(c, _)| c)
}

/// Apply a site and also return the site of the inverse template that undoes it.
pub fn apply_with_inverse(chart: &Chart, site: &MoveSite) -> Result<(Chart, MoveSite)> {
    if chart_stamp(chart) != site.stamp {
        return Err(Error::StaleSite(format!(
            "{} site was found on a different chart",
            site.template.name
        )));
    }
    let before = Counts::of(chart);
    let out = run(chart, site)?;
    let report = out.chart.validate();
    if !report.ok {
        let first = &report.violations[0];
        return Err(Error::InvalidResult(format!(
            "{} left a {} violation at {}: {}",
            site.template.name, first.rule, first.location, first.message
        )));
    }
    let after = Counts::of(&out.chart);
    let eff = site.template.effect;
    for (name, declared, got) in [
        ("w", eff.w, after.w - before.w),
        ("free", eff.free, after.free - before.free),
        ("hoops", eff.hoops, after.hoops - before.hoops),
        (
            "crossings",
            eff.crossings,
            after.crossings - before.crossings,
        ),
    ] {
        if let Some(x) = declared {
            if x != got {
                return Err(Error::InvalidResult(format!(
                    "{} declared {name} {x:+} but changed it by {got:+}",
                    site.template.name
                )));
            }
        }
    }
    let inverse = MoveSite {
        template: site.template.inverse_template(),
        darts: out.inverse_darts,
        label: out.inverse_label,
        inner_right: out.inverse_inner_right,
        stamp: chart_stamp(&out.chart),
    };
    Ok((out.chart, inverse))
}

/// Drag the black vertex of a terminal strand across the edges named by
/// `path`, one C-II move per edge.
pub fn move_black_along(chart: &Chart, terminal: &Strand, path: &[String]) -> Result<Chart> {
    let black = terminal
        .endpoints(chart)
        .into_iter()
        .find(|&v| chart.vertices[v].kind == VertexKind::Black)
        .ok_or_else(|| Error::NotIncident("strand has no black end".into()))?;
    let black_id = chart.vertices[black].id.clone();
    let template = builtin_template("C-II").expect("built-in");
    let mut cur = chart.clone();
    for id in path {
        let v = cur
            .vertex_by_id(&black_id)
            .expect("black vertex survives C-II");
        let db = cur.real_rot(v)[0];
        let y = cur
            .dart_by_id(id)
            .ok_or_else(|| Error::DanglingReference(id.clone()))?;
        if gap(&cur, db, y) <= 1 {
            return Err(Error::BlockedPath(format!(
                "edge at {id} has label {} next to terminal label {}",
                cur.label(y),
                cur.label(db)
            )));
        }
        let site = find_sites(&cur, &template)
            .into_iter()
            .find(|s| s.darts[0] == cur.darts[db].id && s.darts[1] == *id)
            .ok_or_else(|| {
                Error::BlockedPath(format!(
                    "edge at {id} does not bound the black vertex's face"
                ))
            })?;
        cur = apply(&cur, &site)?;
    }
    Ok(cur)
}

/// Falsifier for minimality: a sequence of at most `depth` moves that lowers
/// the complexity (w, -f) lexicographically. Charts are explored breadth
/// first and deduplicated by canonical form; `limit` caps the states visited.
pub fn find_reduction(chart: &Chart, depth: usize, limit: usize) -> Option<Vec<(String, String)>> {
    let start = crate::chart::complexity(chart);
    let templates = builtin_templates();
    let mut seen = BTreeSet::new();
    seen.insert(crate::chart::canonical_form(chart));
    let mut queue = VecDeque::new();
    queue.push_back((chart.clone(), Vec::new()));
    while let Some((cur, trail)) = queue.pop_front() {
        if trail.len() >= depth {
            continue;
        }
        for t in &templates {
            for site in find_sites(&cur, t) {
                let Ok(next) = apply(&cur, &site) else {
                    continue;
                };
                let mut tr: Vec<(String, String)> = trail.clone();
                tr.push((t.name.clone(), site.spec()));
                let cx = crate::chart::complexity(&next);
                if (cx.0, cx.1) < start {
                    return Some(tr);
                }
                if seen.len() >= limit {
                    return None;
                }
                if seen.insert(crate::chart::canonical_form(&next)) {
                    queue.push_back((next, tr));
                }
            }
        }
    }
    None
}

/// Ids of the strands ending at a black vertex, for `move_black_along`.
pub fn terminal_strands(chart: &Chart) -> Vec<Strand> {
    all_strands(chart)
        .into_iter()
        .filter(|s| {
            s.endpoints(chart)
                .iter()
                .any(|&v| chart.vertices[v].kind == VertexKind::Black)
        })
        .collect()
}

/// Small starting charts for exploration: the empty chart, a free edge, a
/// hoop, and one realization of each oriented case of the nine graphs, all
/// on five labels so that every move family has room.
pub fn seed_charts() -> Vec<(String, Chart)> {
    let mut out = vec![
        ("empty".to_string(), Chart::empty(5)),
        (
            "free-edge".to_string(),
            crate::chart::build_chart(
                "chart n=5\nblack a darts=a.0\nblack b darts=b.0\nedge f label=3 tail=a.0 head=b.0\ninfinity face(a.0)\n",
            )
            .expect("seed parses"),
        ),
        (
            "hoop".to_string(),
            crate::chart::build_chart("chart n=5\nphantom p darts=p.o,p.i\nedge h label=2 tail=p.o head=p.i\ninfinity face(p.o)\n")
                .expect("seed parses"),
        ),
    ];
    for (key, t) in crate::catalog::nine_graphs() {
        let en = crate::verify::enumerate_orientations(&t, &[]);
        for (i, class) in en.classes.iter().enumerate() {
            if let Ok(mut c) = crate::template::realize(&class.representative, &HashMap::new()) {
                c.n = 5;
                // a distant-label free edge next to the graph opens up crossing moves
                let host = c.darts[c.infinity.expect("nonempty")].id.clone();
                let text = c.to_text().replace(
                    "infinity ",
                    &format!("black fx darts=fx.0\nblack fy darts=fy.0\nedge fxy label=4 tail=fx.0 head=fy.0\nplace face(fx.0) in face({host})\ninfinity "),
                );
                out.push((format!("{key}#{i}"), c));
                out.push((
                    format!("{key}#{i}+free"),
                    crate::chart::build_chart(&text).expect("seed parses"),
                ));
            }
        }
    }
    out
}

/// Every chart reachable from `seeds` by at most `depth` moves of the given
/// templates without exceeding `max_vertices` visible vertices, deduplicated
/// by canonical form. Stops after `limit` charts.
pub fn explore(
    seeds: &[Chart],
    templates: &[MoveTemplate],
    depth: usize,
    max_vertices: usize,
    limit: usize,
) -> Vec<Chart> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut frontier: Vec<Chart> = Vec::new();
    for s in seeds {
        if s.visible_vertices() <= max_vertices && seen.insert(crate::chart::canonical_form(s)) {
            out.push(s.clone());
            frontier.push(s.clone());
        }
    }
    for _ in 0..depth {
        let mut next = Vec::new();
        for c in &frontier {
            for t in templates {
                for site in find_sites(c, t) {
                    let Ok(r) = apply(c, &site) else { continue };
                    if r.visible_vertices() > max_vertices
                        || !seen.insert(crate::chart::canonical_form(&r))
                    {
                        continue;
                    }
                    out.push(r.clone());
                    next.push(r);
                    if out.len() >= limit {
                        return out;
                    }
                }
            }
        }
        frontier = next;
    }
    out
}
