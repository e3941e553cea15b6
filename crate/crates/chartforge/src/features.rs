//! Strands of Γ_m and the vocabulary built on them.

use crate::chart::{inward_block_start, Chart, UnionFind, VertexKind};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrandClass {
    Free,
    Terminal,
    Internal,
    Hoop,
    Ring,
    Loop,
}

/// A maximal curve of one label, running straight through crossings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strand {
    pub label: u32,
    /// Pairs (d, twin d) for each map edge in walk order.
    pub darts: Vec<usize>,
    pub edges: Vec<usize>,
    pub crossings: Vec<usize>,
    /// First and last dart, at the endpoint vertices; `None` when closed.
    pub ends: Option<[usize; 2]>,
    pub class: StrandClass,
}

impl Strand {
    pub fn is_closed(&self) -> bool {
        self.ends.is_none()
    }

    pub fn endpoints(&self, chart: &Chart) -> Vec<usize> {
        match self.ends {
            Some([a, b]) => vec![chart.vertex_of(a), chart.vertex_of(b)],
            None => vec![],
        }
    }

    /// Endpoint darts lying at vertex `v` (two for a loop).
    pub fn darts_at(&self, chart: &Chart, v: usize) -> Vec<usize> {
        match self.ends {
            Some(ends) => ends
                .iter()
                .copied()
                .filter(|&d| chart.vertex_of(d) == v)
                .collect(),
            None => vec![],
        }
    }

    pub fn contains_dart(&self, d: usize) -> bool {
        self.darts.contains(&d)
    }

    /// The endpoint other than `v` (for a loop, `v` itself).
    pub fn other_end(&self, chart: &Chart, v: usize) -> Option<usize> {
        let [a, b] = self.ends?;
        let (va, vb) = (chart.vertex_of(a), chart.vertex_of(b));
        if va == v {
            Some(vb)
        } else if vb == v {
            Some(va)
        } else {
            None
        }
    }
}

fn pass_through(chart: &Chart, d: usize) -> Option<usize> {
    let v = chart.vertex_of(d);
    let rr = chart.real_rot(v);
    let p = rr.iter().position(|&x| x == d)?;
    match chart.vertices[v].kind {
        VertexKind::Crossing => Some(rr[(p + 2) % 4]),
        VertexKind::Phantom => Some(rr[(p + 1) % 2]),
        _ => None,
    }
}

/// Walk from `d0` until an endpoint vertex or back to `d0`.
fn walk(chart: &Chart, d0: usize) -> (Vec<usize>, bool) {
    let mut darts = Vec::new();
    let mut d = d0;
    loop {
        let t = chart.twin(d);
        darts.push(d);
        darts.push(t);
        match pass_through(chart, t) {
            Some(nx) if nx == d0 => return (darts, true),
            Some(nx) => d = nx,
            None => return (darts, false),
        }
    }
}

fn build(chart: &Chart, darts: Vec<usize>, closed: bool) -> Strand {
    let label = chart.label(darts[0]);
    let mut edges = Vec::new();
    let mut crossings = Vec::new();
    for pair in darts.chunks(2) {
        edges.push(chart.edge_of(pair[0]).unwrap());
        let v = chart.vertex_of(pair[1]);
        if chart.vertices[v].kind == VertexKind::Crossing {
            crossings.push(v);
        }
    }
    if closed {
        let class = if crossings.is_empty() {
            StrandClass::Hoop
        } else {
            StrandClass::Ring
        };
        return Strand {
            label,
            darts,
            edges,
            crossings,
            ends: None,
            class,
        };
    }
    let a = darts[0];
    let b = *darts.last().unwrap();
    let (ka, kb) = (chart.kind_of(a), chart.kind_of(b));
    let class = match (ka, kb) {
        (VertexKind::Black, VertexKind::Black) => StrandClass::Free,
        (VertexKind::Black, _) | (_, VertexKind::Black) => StrandClass::Terminal,
        _ if chart.vertex_of(a) == chart.vertex_of(b) => StrandClass::Loop,
        _ => StrandClass::Internal,
    };
    Strand {
        label,
        darts,
        edges,
        crossings,
        ends: Some([a, b]),
        class,
    }
}

fn normalize(mut s: Strand) -> Strand {
    if let Some([a, b]) = s.ends {
        if b < a {
            s.darts.reverse();
            s.edges.reverse();
            s.crossings.reverse();
            s.ends = Some([b, a]);
        }
    }
    s
}

/// Closed strands restart from their smallest dart.
fn finalize_closed(chart: &Chart, s: Strand) -> Strand {
    let x = *s.darts.iter().min().unwrap();
    let (darts, _) = walk(chart, x);
    build(chart, darts, true)
}

/// All strands of every label.
pub fn all_strands(chart: &Chart) -> Vec<Strand> {
    let mut used = vec![false; chart.darts.len()];
    let mut out = Vec::new();
    for v in 0..chart.vertices.len() {
        let kind = chart.vertices[v].kind;
        if kind != VertexKind::White && kind != VertexKind::Black {
            continue;
        }
        for d in chart.real_rot(v) {
            if used[d] {
                continue;
            }
            let (darts, _) = walk(chart, d);
            for &x in &darts {
                used[x] = true;
            }
            out.push(normalize(build(chart, darts, false)));
        }
    }
    for d in 0..chart.darts.len() {
        if used[d] || !chart.is_real(d) {
            continue;
        }
        let (darts, closed) = walk(chart, d);
        debug_assert!(closed);
        for &x in &darts {
            used[x] = true;
        }
        out.push(finalize_closed(chart, build(chart, darts, true)));
    }
    out
}

fn check_label(chart: &Chart, m: u32) -> Result<()> {
    if m < 1 || m + 1 > chart.n {
        return Err(Error::LabelOutOfRange {
            label: m,
            n: chart.n,
        });
    }
    Ok(())
}

pub fn strands(chart: &Chart, m: u32) -> Result<Vec<Strand>> {
    check_label(chart, m)?;
    Ok(all_strands(chart)
        .into_iter()
        .filter(|s| s.label == m)
        .collect())
}

/// The strand through a real dart.
pub fn strand_of_dart(chart: &Chart, d: usize) -> Strand {
    all_strands(chart)
        .into_iter()
        .find(|s| s.contains_dart(d))
        .expect("every real dart lies on a strand")
}

/// Middle test for a dart at a white vertex.
pub fn dart_is_middle(chart: &Chart, d: usize) -> bool {
    let v = chart.vertex_of(d);
    if chart.vertices[v].kind != VertexKind::White {
        return false;
    }
    let rr = chart.real_rot(v);
    let dirs: Vec<_> = rr.iter().map(|&x| chart.dir(x)).collect();
    let Some(s) = inward_block_start(&dirs) else {
        return false;
    };
    let p = rr.iter().position(|&x| x == d).unwrap();
    p == (s + 1) % 6 || p == (s + 4) % 6
}

pub fn is_middle(chart: &Chart, strand: &Strand, w: usize) -> Result<bool> {
    let ds = strand.darts_at(chart, w);
    if ds.is_empty() || chart.vertices[w].kind != VertexKind::White {
        return Err(Error::NotIncident(format!(
            "strand does not end at {}",
            chart.vertices[w].id
        )));
    }
    Ok(ds.iter().any(|&d| dart_is_middle(chart, d)))
}

/// Darts of `strand` at `w` flanked: (σ⁻¹ d, σ d) for the first such dart.
pub fn flank_darts(chart: &Chart, w: usize, strand: &Strand) -> Result<(usize, usize)> {
    let ds = strand.darts_at(chart, w);
    let &d = ds.first().ok_or_else(|| {
        Error::NotIncident(format!("strand does not end at {}", chart.vertices[w].id))
    })?;
    Ok((chart.prev_real_at(d), chart.next_real_at(d)))
}

/// (a_ij, b_ij): the strands just before and after `e_i` around `w_j`, anticlockwise.
pub fn flank_edges(chart: &Chart, w: usize, strand: &Strand) -> Result<(Strand, Strand)> {
    let (a, b) = flank_darts(chart, w, strand)?;
    let all = all_strands(chart);
    let find = |d: usize| all.iter().find(|s| s.contains_dart(d)).cloned().unwrap();
    Ok((find(a), find(b)))
}

pub fn bw_vertices(chart: &Chart, m: u32) -> Vec<usize> {
    let Ok(ss) = strands(chart, m) else {
        return vec![];
    };
    let mut out: Vec<usize> = ss
        .iter()
        .filter(|s| s.class == StrandClass::Terminal)
        .flat_map(|s| s.endpoints(chart))
        .filter(|&v| chart.vertices[v].kind == VertexKind::White)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// A connected component of Γ_m.
#[derive(Clone, Debug)]
pub struct GammaComponent {
    pub label: u32,
    /// Whites, blacks, crossings passed and phantoms, sorted.
    pub vertices: Vec<usize>,
    pub whites: Vec<usize>,
    pub strands: Vec<Strand>,
}

impl GammaComponent {
    pub fn white_count(&self) -> usize {
        self.whites.len()
    }
    pub fn edges(&self) -> Vec<usize> {
        let mut e: Vec<usize> = self
            .strands
            .iter()
            .flat_map(|s| s.edges.iter().copied())
            .collect();
        e.sort();
        e
    }
}

pub fn gamma_components(chart: &Chart, m: u32) -> Result<Vec<GammaComponent>> {
    let ss = strands(chart, m)?;
    let mut uf = UnionFind::new(chart.vertices.len());
    let mut touched = vec![false; chart.vertices.len()];
    for e in chart.edges.iter().filter(|e| e.label == m) {
        let (a, b) = (chart.vertex_of(e.tail), chart.vertex_of(e.head));
        uf.union(a, b);
        touched[a] = true;
        touched[b] = true;
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..chart.vertices.len() {
        if touched[v] {
            groups.entry(uf.find(v)).or_default().push(v);
        }
    }
    let mut comps: Vec<GammaComponent> = groups
        .into_values()
        .map(|vertices| {
            let whites = vertices
                .iter()
                .copied()
                .filter(|&v| chart.vertices[v].kind == VertexKind::White)
                .collect();
            GammaComponent {
                label: m,
                vertices,
                whites,
                strands: vec![],
            }
        })
        .collect();
    for s in ss {
        let v = chart.vertex_of(s.darts[0]);
        let root = uf.find(v);
        let c = comps
            .iter_mut()
            .find(|c| uf_root_of(&c.vertices, root, &mut uf))
            .unwrap();
        c.strands.push(s);
    }
    comps.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(comps)
}

fn uf_root_of(vs: &[usize], root: usize, uf: &mut UnionFind) -> bool {
    uf.find(vs[0]) == root
}

pub fn component_white_counts(chart: &Chart, m: u32) -> Result<Vec<(GammaComponent, usize)>> {
    Ok(gamma_components(chart, m)?
        .into_iter()
        .map(|c| {
            let w = c.white_count();
            (c, w)
        })
        .collect())
}

#[derive(Serialize)]
pub struct StrandReport {
    pub label: u32,
    pub class: StrandClass,
    pub edges: Vec<String>,
    pub endpoints: Vec<String>,
    pub crossings: Vec<String>,
    pub middle_at: Vec<String>,
}

#[derive(Serialize)]
pub struct FeatureReport {
    pub strands: Vec<StrandReport>,
    pub bw_vertices: BTreeMap<u32, Vec<String>>,
    pub components: BTreeMap<u32, Vec<usize>>,
}

pub fn feature_report(chart: &Chart) -> FeatureReport {
    let ids = |vs: &[usize]| {
        vs.iter()
            .map(|&v| chart.vertices[v].id.clone())
            .collect::<Vec<_>>()
    };
    let mut strands_out = Vec::new();
    let mut labels: Vec<u32> = chart.edges.iter().map(|e| e.label).collect();
    labels.sort();
    labels.dedup();
    for s in all_strands(chart) {
        let middle_at = match s.ends {
            Some(ends) => ends
                .iter()
                .filter(|&&d| dart_is_middle(chart, d))
                .map(|&d| chart.vertices[chart.vertex_of(d)].id.clone())
                .collect(),
            None => vec![],
        };
        strands_out.push(StrandReport {
            label: s.label,
            class: s.class,
            edges: s.edges.iter().map(|&e| chart.edges[e].id.clone()).collect(),
            endpoints: ids(&s.endpoints(chart)),
            crossings: ids(&s.crossings),
            middle_at,
        });
    }
    let mut bw = BTreeMap::new();
    let mut comps = BTreeMap::new();
    for &m in &labels {
        bw.insert(m, ids(&bw_vertices(chart, m)));
        if let Ok(cs) = component_white_counts(chart, m) {
            comps.insert(m, cs.iter().map(|(_, w)| *w).collect());
        }
    }
    FeatureReport {
        strands: strands_out,
        bw_vertices: bw,
        components: comps,
    }
}
