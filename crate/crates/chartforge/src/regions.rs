//! Complementary disks of a Γ_m component, feelers, lenses and local complexity.
//!
//! A component G is reduced to G' by dropping its terminal strands. The faces
//! of G' (as a sub-map of the chart) are the complementary domains; terminal
//! strands hang into exactly one of them.

use crate::chart::{face_regions, Chart, VertexKind};
use crate::error::{Error, Result};
use crate::features::{all_strands, dart_is_middle, GammaComponent, Strand, StrandClass};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, HashSet};

/// Rotation system restricted to a subset of real darts.
#[derive(Clone, Debug)]
pub struct SubMap {
    pub in_sub: Vec<bool>,
    pub orbits: Vec<Vec<usize>>,
    pub face_of: HashMap<usize, usize>,
    /// Chart-face index -> sub-map face.
    pub chart_face_to_sub: Vec<usize>,
    pub vertex_count: usize,
}

impl SubMap {
    pub fn new(chart: &Chart, darts: &[usize]) -> SubMap {
        let mut in_sub = vec![false; chart.darts.len()];
        for &d in darts {
            in_sub[d] = true;
        }
        let next = |d: usize| {
            let mut x = chart.next_at(d);
            while !in_sub[x] {
                x = chart.next_at(x);
            }
            x
        };
        let mut face_of = HashMap::new();
        let mut orbits = Vec::new();
        let mut sorted: Vec<usize> = darts.to_vec();
        sorted.sort();
        for &s in &sorted {
            if face_of.contains_key(&s) {
                continue;
            }
            let idx = orbits.len();
            let mut orbit = Vec::new();
            let mut d = s;
            loop {
                face_of.insert(d, idx);
                orbit.push(d);
                d = next(chart.twin(d));
                if d == s {
                    break;
                }
            }
            orbits.push(orbit);
        }
        let faces = chart.faces();
        let region = face_regions(chart, &faces, |d| in_sub[d]);
        let mut region_to_sub = HashMap::new();
        for &d in &sorted {
            region_to_sub.insert(region[faces.face_of[d]], face_of[&d]);
        }
        let chart_face_to_sub = (0..faces.count())
            .map(|f| region_to_sub.get(&region[f]).copied().unwrap_or(usize::MAX))
            .collect();
        let vertex_count = sorted
            .iter()
            .map(|&d| chart.vertex_of(d))
            .collect::<HashSet<_>>()
            .len();
        SubMap {
            in_sub,
            orbits,
            face_of,
            chart_face_to_sub,
            vertex_count,
        }
    }

    /// The sub-map face holding the sector of a dart at a sub-map vertex.
    pub fn sector_face(&self, chart: &Chart, d: usize) -> usize {
        let mut x = d;
        while !self.in_sub[x] {
            x = chart.next_at(x);
        }
        // the corner (prev, x) belongs to the face of x
        self.face_of[&x]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiskRegion {
    pub id: String,
    pub label: u32,
    /// Sub-map faces making up the region (empty for lens sides).
    pub faces: Vec<usize>,
    /// Real darts having the region on their right.
    pub boundary: Vec<usize>,
    /// Distinct boundary whites in walk order.
    pub whites: Vec<usize>,
    pub angled_k: usize,
    /// False when the boundary walk meets some white twice.
    pub is_disk: bool,
    /// Chart faces inside the region.
    pub chart_faces: Vec<usize>,
    /// Darts of the reduced component the region was cut from.
    #[serde(skip)]
    pub gdarts: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LocalComplexity {
    pub w_int: usize,
    pub c_boundary: usize,
}

/// Darts of G' (the component without its terminal strands).
pub fn reduced_darts(comp: &GammaComponent) -> Vec<usize> {
    let mut v: Vec<usize> = comp
        .strands
        .iter()
        .filter(|s| s.class != StrandClass::Terminal && s.class != StrandClass::Free)
        .flat_map(|s| s.darts.iter().copied())
        .collect();
    v.sort();
    v
}

fn region_from_faces(
    chart: &Chart,
    sub: &SubMap,
    label: u32,
    faces: &[usize],
    gdarts: &[usize],
) -> DiskRegion {
    let set: HashSet<usize> = faces.iter().copied().collect();
    let mut boundary = Vec::new();
    for &f in faces {
        for &d in &sub.orbits[f] {
            let other = sub.face_of[&chart.twin(d)];
            if !set.contains(&other) || other == f {
                boundary.push(d);
            }
        }
    }
    let mut whites = Vec::new();
    let mut repeated = false;
    for &d in &boundary {
        let v = chart.vertex_of(d);
        if chart.vertices[v].kind == VertexKind::White {
            if whites.contains(&v) {
                repeated = true;
            } else {
                whites.push(v);
            }
        }
    }
    let chart_faces = sub
        .chart_face_to_sub
        .iter()
        .enumerate()
        .filter(|(_, s)| set.contains(s))
        .map(|(i, _)| i)
        .collect();
    let id = boundary
        .iter()
        .map(|&d| chart.darts[d].id.as_str())
        .min()
        .map(|s| format!("face({s})"))
        .unwrap_or_default();
    DiskRegion {
        id,
        label,
        faces: faces.to_vec(),
        boundary,
        angled_k: whites.len(),
        whites,
        is_disk: !repeated,
        chart_faces,
        gdarts: gdarts.to_vec(),
    }
}

/// One region per complementary domain of the reduced component.
pub fn complementary_disks(chart: &Chart, comp: &GammaComponent) -> Result<Vec<DiskRegion>> {
    let gd = reduced_darts(comp);
    if gd.is_empty() {
        return Ok(vec![]);
    }
    let sub = SubMap::new(chart, &gd);
    let (v, e, f) = (
        sub.vertex_count as i64,
        gd.len() as i64 / 2,
        sub.orbits.len() as i64,
    );
    if v - e + f != 2 {
        return Err(Error::NotCellular(format!(
            "reduced component has Euler characteristic {}",
            v - e + f
        )));
    }
    Ok((0..sub.orbits.len())
        .map(|i| region_from_faces(chart, &sub, comp.label, &[i], &gd))
        .collect())
}

/// Union of several sub-map faces of one component.
pub fn union_region(chart: &Chart, comp: &GammaComponent, faces: &[usize]) -> DiskRegion {
    let gd = reduced_darts(comp);
    let sub = SubMap::new(chart, &gd);
    region_from_faces(chart, &sub, comp.label, faces, &gd)
}

/// Label-m strands reaching into the region at a boundary white.
pub fn feelers(chart: &Chart, disk: &DiskRegion) -> Vec<Strand> {
    if disk.gdarts.is_empty() {
        return vec![];
    }
    let sub = SubMap::new(chart, &disk.gdarts);
    let fset: HashSet<usize> = disk.faces.iter().copied().collect();
    let bset: HashSet<usize> = disk.boundary.iter().copied().collect();
    let mut out: Vec<Strand> = Vec::new();
    for s in all_strands(chart) {
        if s.label != disk.label {
            continue;
        }
        let mut hit = false;
        if let Some(ends) = s.ends {
            for d in ends {
                let v = chart.vertex_of(d);
                if !disk.whites.contains(&v) {
                    continue;
                }
                if !sub.in_sub[d] {
                    if fset.contains(&sub.sector_face(chart, d)) {
                        hit = true;
                    }
                } else {
                    // an interior spoke: both sides in the region, not on its boundary
                    let right = sub.face_of[&d];
                    let left = sub.face_of[&chart.twin(d)];
                    if fset.contains(&right)
                        && fset.contains(&left)
                        && !bset.contains(&d)
                        && !bset.contains(&chart.twin(d))
                    {
                        hit = true;
                    }
                }
            }
        }
        if hit && !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

pub fn is_special(chart: &Chart, disk: &DiskRegion) -> bool {
    feelers(chart, disk)
        .iter()
        .all(|s| s.class == StrandClass::Terminal)
}

pub fn local_complexity(chart: &Chart, disk: &DiskRegion) -> LocalComplexity {
    let faces = chart.faces();
    let inside: HashSet<usize> = disk.chart_faces.iter().copied().collect();
    let on: HashSet<usize> = disk.boundary.iter().map(|&d| chart.vertex_of(d)).collect();
    let mut w_int = 0;
    for (v, vx) in chart.vertices.iter().enumerate() {
        if vx.kind == VertexKind::White
            && !on.contains(&v)
            && inside.contains(&faces.face_of[vx.rot[0]])
        {
            w_int += 1;
        }
    }
    let mut bd_darts: HashSet<usize> = HashSet::new();
    for &d in &disk.boundary {
        bd_darts.insert(d);
        bd_darts.insert(chart.twin(d));
    }
    let crossings: BTreeSet<usize> = bd_darts
        .iter()
        .map(|&d| chart.vertex_of(d))
        .filter(|&v| chart.vertices[v].kind == VertexKind::Crossing)
        .collect();
    LocalComplexity {
        w_int,
        c_boundary: crossings.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LensKind {
    NoMiddle,
    DoubleMiddle,
}

#[derive(Clone, Debug)]
pub struct Lens {
    pub disk: DiskRegion,
    pub e1: Strand,
    pub e2: Strand,
    pub w1: usize,
    pub w2: usize,
    pub kind: LensKind,
}

/// Classify by the middle-arc conditions; `None` when neither holds.
pub fn lens_kind(chart: &Chart, e1: &Strand, e2: &Strand) -> Option<LensKind> {
    let [a1, b1] = e1.ends?;
    let [a2, b2] = e2.ends?;
    let m1 = [dart_is_middle(chart, a1), dart_is_middle(chart, b1)];
    let m2 = [dart_is_middle(chart, a2), dart_is_middle(chart, b2)];
    if !m1[0] && !m1[1] && !m2[0] && !m2[1] {
        Some(LensKind::NoMiddle)
    } else if (m1[0] && m1[1]) || (m2[0] && m2[1]) {
        Some(LensKind::DoubleMiddle)
    } else {
        None
    }
}

/// Lenses of type (m, m+1).
pub fn find_lenses(chart: &Chart, m: u32) -> Vec<Lens> {
    let strands = all_strands(chart);
    let strand_of: HashMap<usize, usize> = strands
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.darts.iter().map(move |&d| (d, i)))
        .collect();
    let faces = chart.faces();
    let mut out: Vec<Lens> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for (w1, vx) in chart.vertices.iter().enumerate() {
        if vx.kind != VertexKind::White {
            continue;
        }
        let rr = chart.real_rot(w1);
        for p in 0..rr.len() {
            let (a, b) = (rr[p], rr[(p + 1) % rr.len()]);
            let (la, lb) = (chart.label(a), chart.label(b));
            if !((la == m && lb == m + 1) || (la == m + 1 && lb == m)) {
                continue;
            }
            let (sa, sb) = (&strands[strand_of[&a]], &strands[strand_of[&b]]);
            if sa.class != StrandClass::Internal || sb.class != StrandClass::Internal {
                continue;
            }
            let (Some(w2a), Some(w2b)) = (sa.other_end(chart, w1), sb.other_end(chart, w1)) else {
                continue;
            };
            if w2a != w2b || w2a == w1 {
                continue;
            }
            let w2 = w2a;
            let a2 = sa.darts_at(chart, w2)[0];
            let b2 = sb.darts_at(chart, w2)[0];
            if chart.next_real_at(b2) != a2 {
                continue;
            }
            let (e1, e2) = if la == m { (sa, sb) } else { (sb, sa) };
            let Some(kind) = lens_kind(chart, e1, e2) else {
                continue;
            };
            let key = (faces.face_of[b], strand_of[&a].min(strand_of[&b]));
            let mut bset: HashSet<usize> = HashSet::new();
            bset.extend(e1.darts.iter().copied());
            bset.extend(e2.darts.iter().copied());
            let region = face_regions(chart, &faces, |d| bset.contains(&d));
            let r = region[faces.face_of[b]];
            let chart_faces: Vec<usize> = (0..faces.count()).filter(|&f| region[f] == r).collect();
            if !seen.insert((chart_faces[0], key.1)) {
                continue;
            }
            let boundary: Vec<usize> = bset
                .iter()
                .copied()
                .filter(|&d| region[faces.face_of[d]] == r)
                .collect();
            let id = boundary
                .iter()
                .map(|&d| chart.darts[d].id.as_str())
                .min()
                .map(|s| format!("face({s})"))
                .unwrap_or_default();
            let disk = DiskRegion {
                id,
                label: m,
                faces: vec![],
                boundary,
                whites: vec![w1, w2],
                angled_k: 2,
                is_disk: true,
                chart_faces,
                gdarts: vec![],
            };
            out.push(Lens {
                disk,
                e1: e1.clone(),
                e2: e2.clone(),
                w1,
                w2,
                kind,
            });
        }
    }
    out
}

#[derive(Serialize)]
pub struct DiskReport {
    pub id: String,
    pub label: u32,
    pub angled_k: usize,
    pub is_disk: bool,
    pub whites: Vec<String>,
    pub feelers: usize,
    pub special: bool,
    pub local_complexity: LocalComplexity,
}

pub fn disk_report(chart: &Chart, disk: &DiskRegion) -> DiskReport {
    let f = feelers(chart, disk);
    DiskReport {
        id: disk.id.clone(),
        label: disk.label,
        angled_k: disk.angled_k,
        is_disk: disk.is_disk,
        whites: disk
            .whites
            .iter()
            .map(|&v| chart.vertices[v].id.clone())
            .collect(),
        feelers: f.len(),
        special: f.iter().all(|s| s.class == StrandClass::Terminal),
        local_complexity: local_complexity(chart, disk),
    }
}
