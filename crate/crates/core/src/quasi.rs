//! Simple quasi-measures and quasi-states: the solid-set median
//! construction over a reference measure, the Aarnes integral formula,
//! and the non-additivity defect `Π`.
//!
//! Constructions are restricted to sphere meshes: the solid-set co-basis
//! argument needs trivial first cohomology, which the torus lacks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{MeshKey, ScalarField, SurfaceMesh, Topology};
use crate::topology::{is_solid, ContourTree, Region, TreeLocation, TreePoint};

pub const INTEGRAL_LEVELS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    AreaMedian,
    OddPoints,
}

/// A {0,1}-valued quasi-measure on solid sets, derived from a reference
/// probability measure: 0 below measure 1/2, 1 above, with a small tie
/// band resolved deterministically.
#[derive(Debug, Clone)]
pub struct SimpleQuasiMeasure {
    key: MeshKey,
    kind: MeasureKind,
    weights: Vec<f64>,
    support: Vec<usize>,
    half_tolerance: f64,
}

impl SimpleQuasiMeasure {
    /// Normalized area weights as the reference measure.
    pub fn area_median(mesh: &SurfaceMesh) -> Result<SimpleQuasiMeasure> {
        if mesh.topology() != Topology::Sphere {
            return Err(Error::RequiresSphere);
        }
        let total = mesh.total_area();
        let weights: Vec<f64> = mesh.weights().iter().map(|w| w / total).collect();
        let max_w = weights.iter().cloned().fold(0.0, f64::max);
        Ok(SimpleQuasiMeasure {
            key: mesh.key(),
            kind: MeasureKind::AreaMedian,
            weights,
            support: Vec::new(),
            // ties vanish as the grid refines
            half_tolerance: 1.5 * max_w,
        })
    }

    /// Uniform atoms on an odd number of distinct vertices. The odd count
    /// keeps every solid-set measure away from 1/2, so the tie band only
    /// needs to clear quantization: a quarter of the gap `1/(2m)`.
    pub fn odd_points(mesh: &SurfaceMesh, mut support: Vec<usize>) -> Result<SimpleQuasiMeasure> {
        if mesh.topology() != Topology::Sphere {
            return Err(Error::RequiresSphere);
        }
        support.sort_unstable();
        support.dedup();
        let m = support.len();
        if m < 3 || m % 2 == 0 {
            return Err(Error::BadSupportCount(m));
        }
        if let Some(&v) = support.iter().find(|&&v| v >= mesh.vertex_count()) {
            return Err(Error::SupportOutOfBounds(v));
        }
        let mut weights = vec![0.0; mesh.vertex_count()];
        for &v in &support {
            weights[v] = 1.0 / m as f64;
        }
        Ok(SimpleQuasiMeasure {
            key: mesh.key(),
            kind: MeasureKind::OddPoints,
            weights,
            support,
            half_tolerance: 1.0 / (4.0 * m as f64),
        })
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn key(&self) -> MeshKey {
        self.key
    }

    pub fn half_tolerance(&self) -> f64 {
        self.half_tolerance
    }

    pub fn reference_weight(&self, vertex: usize) -> f64 {
        self.weights[vertex]
    }

    pub fn reference_measure(&self, region: &Region) -> f64 {
        region.vertices().iter().map(|&v| self.weights[v]).sum()
    }

    pub fn to_json(&self) -> QuasiStateJson {
        QuasiStateJson {
            kind: match self.kind {
                MeasureKind::AreaMedian => "area-median".to_string(),
                MeasureKind::OddPoints => "odd-points".to_string(),
            },
            points: self.support.clone(),
            weights: self.support.iter().map(|&v| self.weights[v]).collect(),
            half_tolerance: self.half_tolerance,
        }
    }
}

/// τ of a closed solid region: 0 below the half band, 1 above. Inside
/// the band the lowest-index vertex of the two-sided boundary zone
/// decides, so exactly one of a region and its complement gets 1.
pub fn tau_solid(qm: &SimpleQuasiMeasure, mesh: &SurfaceMesh, region: &Region) -> Result<u8> {
    if qm.key != mesh.key() || region.key() != mesh.key() {
        return Err(Error::MeshMismatch);
    }
    if !is_solid(mesh, region)? {
        return Err(Error::NotSolid);
    }
    let mu = qm.reference_measure(region);
    if mu < 0.5 - qm.half_tolerance {
        return Ok(0);
    }
    if mu > 0.5 + qm.half_tolerance {
        return Ok(1);
    }
    let mask = region.mask(mesh);
    let mut buf = [0usize; 4];
    let mut tie_vertex = usize::MAX;
    for v in 0..mesh.vertex_count() {
        let k = mesh.neighbors(v, &mut buf);
        if buf[..k].iter().any(|&nb| mask[nb] != mask[v]) {
            tie_vertex = v;
            break;
        }
    }
    Ok(if tie_vertex != usize::MAX && mask[tie_vertex] { 1 } else { 0 })
}

/// The median of a field relative to a simple quasi-state.
#[derive(Debug, Clone)]
pub struct MedianResult {
    pub level_value: f64,
    pub component: TreePoint,
    /// complement branch measures in the normalized reference measure
    pub complement_measures: Vec<f64>,
}

enum Candidate {
    Node(usize),
    Gap { edge: usize, lo: f64, hi: f64 },
    AtVertex { edge: usize, value: f64 },
}

impl Candidate {
    fn span(&self, tree: &ContourTree) -> (f64, f64) {
        match *self {
            Candidate::Node(n) => {
                let v = tree.nodes()[n].value;
                (v, v)
            }
            Candidate::Gap { lo, hi, .. } => (lo, hi),
            Candidate::AtVertex { value, .. } => (value, value),
        }
    }

    fn location_for(&self, mid: f64) -> TreeLocation {
        match *self {
            Candidate::Node(n) => TreeLocation::Node(n),
            Candidate::Gap { edge, lo, hi } => {
                let level = mid.clamp(lo, hi);
                TreeLocation::Edge { edge, level }
            }
            Candidate::AtVertex { edge, value } => TreeLocation::Edge { edge, level: value },
        }
    }
}

/// Find the tree point all of whose complement branches carry reference
/// measure at most `1/2 + half_tolerance`. If a whole interval
/// qualifies, the midpoint of its level-value span is reported.
pub fn median(
    qm: &SimpleQuasiMeasure,
    mesh: &SurfaceMesh,
    field: &ScalarField,
) -> Result<MedianResult> {
    let tree = ContourTree::build(mesh, field)?;
    median_on_tree(qm, mesh, &tree)
}

pub fn median_on_tree(
    qm: &SimpleQuasiMeasure,
    mesh: &SurfaceMesh,
    tree: &ContourTree,
) -> Result<MedianResult> {
    if qm.key != mesh.key() || tree.key() != mesh.key() {
        return Err(Error::MeshMismatch);
    }
    let nodes = tree.nodes();
    let edges = tree.edges();
    let w = |v: usize| qm.weights[v];
    let total: f64 = qm.weights.iter().sum();
    let bound = 0.5 + qm.half_tolerance;

    // rooted side sums: sub[n] = reference weight hanging below node n
    // (inclusive) seen from root 0
    let nn = nodes.len();
    let mut parent_edge: Vec<Option<usize>> = vec![None; nn];
    let mut bfs: Vec<usize> = Vec::with_capacity(nn);
    let mut seen = vec![false; nn];
    bfs.push(0);
    seen[0] = true;
    let mut qi = 0;
    while qi < bfs.len() {
        let nid = bfs[qi];
        qi += 1;
        for &e in tree.node_edges(nid) {
            let te = &edges[e as usize];
            let other = if te.a == nid { te.b } else { te.a };
            if !seen[other] {
                seen[other] = true;
                parent_edge[other] = Some(e as usize);
                bfs.push(other);
            }
        }
    }
    let arcw: Vec<f64> = edges
        .iter()
        .map(|e| e.vertices.iter().map(|&v| w(v as usize)).sum())
        .collect();
    let mut sub = vec![0.0f64; nn];
    for &nid in bfs.iter().rev() {
        let mut s = w(nodes[nid].vertex);
        for &e in tree.node_edges(nid) {
            let te = &edges[e as usize];
            let other = if te.a == nid { te.b } else { te.a };
            if parent_edge[other] == Some(e as usize) {
                s += arcw[e as usize] + sub[other];
            }
        }
        sub[nid] = s;
    }
    // side totals per edge, excluding the arc's own vertices
    let mut a_side = vec![0.0f64; edges.len()];
    let mut b_side = vec![0.0f64; edges.len()];
    for (eid, te) in edges.iter().enumerate() {
        if parent_edge[te.b] == Some(eid) {
            b_side[eid] = sub[te.b];
            a_side[eid] = total - b_side[eid] - arcw[eid];
        } else {
            a_side[eid] = sub[te.a];
            b_side[eid] = total - a_side[eid] - arcw[eid];
        }
    }

    let mut qualifying: Vec<Candidate> = Vec::new();
    let mut lo_val = f64::INFINITY;
    let mut hi_val = f64::NEG_INFINITY;
    let mut consider = |c: Candidate, ok: bool, tree: &ContourTree| {
        if ok {
            let (lo, hi) = c.span(tree);
            lo_val = lo_val.min(lo);
            hi_val = hi_val.max(hi);
            qualifying.push(c);
        }
    };

    for nid in 0..nn {
        let ok = tree.node_edges(nid).iter().all(|&e| {
            let eid = e as usize;
            let te = &edges[eid];
            let far = if te.a == nid { b_side[eid] } else { a_side[eid] };
            arcw[eid] + far <= bound
        });
        consider(Candidate::Node(nid), ok, tree);
    }

    for (eid, te) in edges.iter().enumerate() {
        let vals: Vec<f64> = te.vertices.iter().map(|&v| tree.vertex_value(v as usize)).collect();
        let len = vals.len();
        let mut prefix = 0.0f64;
        for k in 0..=len {
            // gap between arc vertices k-1 and k
            let below = a_side[eid] + prefix;
            let above = total - below;
            let lo = if k == 0 { nodes[te.a].value } else { vals[k - 1] };
            let hi = if k == len { nodes[te.b].value } else { vals[k] };
            consider(
                Candidate::Gap { edge: eid, lo, hi },
                below <= bound && above <= bound,
                tree,
            );
            if k < len {
                let wk = w(te.vertices[k] as usize);
                let below_at = below;
                let above_at = total - below - wk;
                consider(
                    Candidate::AtVertex { edge: eid, value: vals[k] },
                    below_at <= bound && above_at <= bound,
                    tree,
                );
                prefix += wk;
            }
        }
    }

    if qualifying.is_empty() {
        return Err(Error::NoMedian);
    }
    let mid = 0.5 * (lo_val + hi_val);
    // representative: the qualifying piece whose span is nearest the midpoint
    let mut best: Option<(f64, &Candidate)> = None;
    for c in &qualifying {
        let (lo, hi) = c.span(tree);
        let dist = if mid < lo {
            lo - mid
        } else if mid > hi {
            mid - hi
        } else {
            0.0
        };
        if best.as_ref().map_or(true, |(d, _)| dist < *d) {
            best = Some((dist, c));
        }
    }
    let loc = best.unwrap().1.location_for(mid);
    let complement_measures = tree.branch_measures_by(&loc, &w, true)?;
    let component = tree.point_at(mesh, loc)?;
    Ok(MedianResult { level_value: mid, component, complement_measures })
}

/// A quasi-state: a simple quasi-measure or a finite convex combination.
#[derive(Debug, Clone)]
pub enum QuasiState {
    Simple(SimpleQuasiMeasure),
    Combination(Vec<(SimpleQuasiMeasure, f64)>),
}

impl QuasiState {
    pub fn simple(qm: SimpleQuasiMeasure) -> QuasiState {
        QuasiState::Simple(qm)
    }

    pub fn key(&self) -> MeshKey {
        match self {
            QuasiState::Simple(qm) => qm.key,
            QuasiState::Combination(parts) => parts[0].0.key,
        }
    }

    pub fn as_simple(&self) -> Result<&SimpleQuasiMeasure> {
        match self {
            QuasiState::Simple(qm) => Ok(qm),
            QuasiState::Combination(_) => Err(Error::NotSimple),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            QuasiState::Simple(qm) => serde_json::to_value(qm.to_json()).unwrap(),
            QuasiState::Combination(parts) => serde_json::json!({
                "kind": "convex-combination",
                "weights": parts.iter().map(|(_, w)| *w).collect::<Vec<f64>>(),
                "parts": parts.iter().map(|(qm, _)| serde_json::to_value(qm.to_json()).unwrap()).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Weighted mixture of simple quasi-states.
pub fn convex_combination(parts: Vec<(SimpleQuasiMeasure, f64)>) -> Result<QuasiState> {
    let sum: f64 = parts.iter().map(|(_, w)| w).sum();
    if parts.is_empty() || parts.iter().any(|(_, w)| *w < 0.0) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::BadWeights(sum));
    }
    if parts.iter().any(|(qm, _)| qm.key != parts[0].0.key) {
        return Err(Error::MeshMismatch);
    }
    Ok(QuasiState::Combination(parts))
}

/// ζ(F): the median level for a simple state, the weighted average for a
/// combination.
pub fn zeta(qs: &QuasiState, mesh: &SurfaceMesh, field: &ScalarField) -> Result<f64> {
    if field.key() != mesh.key() || qs.key() != mesh.key() {
        return Err(Error::MeshMismatch);
    }
    let tree = ContourTree::build(mesh, field)?;
    match qs {
        QuasiState::Simple(qm) => Ok(median_on_tree(qm, mesh, &tree)?.level_value),
        QuasiState::Combination(parts) => {
            let mut acc = 0.0;
            for (qm, w) in parts {
                acc += w * median_on_tree(qm, mesh, &tree)?.level_value;
            }
            Ok(acc)
        }
    }
}

/// ζ via the Aarnes integral: `max F − ∫ b_F`, with
/// `b_F(x) = τ({F < x}) = 1 − τ({F ≥ x})` sampled on 512 uniform levels.
pub fn zeta_via_integral(qs: &QuasiState, mesh: &SurfaceMesh, field: &ScalarField) -> Result<f64> {
    let qm = qs.as_simple()?;
    if field.key() != mesh.key() || qm.key != mesh.key() {
        return Err(Error::MeshMismatch);
    }
    let tree = ContourTree::build(mesh, field)?;
    let (lo, hi) = (field.min(), field.max());
    if lo == hi {
        return Ok(hi);
    }
    let step = (hi - lo) / INTEGRAL_LEVELS as f64;
    // per-edge suffix sums of reference weights, by ascending arc order
    let edges = tree.edges();
    let suffix: Vec<Vec<f64>> = edges
        .iter()
        .map(|e| {
            let mut s = vec![0.0; e.vertices.len() + 1];
            for (i, &v) in e.vertices.iter().enumerate().rev() {
                s[i] = s[i + 1] + qm.weights[v as usize];
            }
            s
        })
        .collect();
    let nn = tree.nodes().len();
    let mut integral = 0.0;
    for i in 0..INTEGRAL_LEVELS {
        let x = lo + i as f64 * step;
        let mut uf_slots = crate::topology::UnionFind::new(nn + edges.len());
        let mut slot_weight = vec![0.0f64; nn + edges.len()];
        for (nid, node) in tree.nodes().iter().enumerate() {
            if node.value >= x {
                slot_weight[nid] = qm.weights[node.vertex];
            }
        }
        for (eid, te) in edges.iter().enumerate() {
            let first_ge = te
                .vertices
                .partition_point(|&v| tree.vertex_value(v as usize) < x);
            slot_weight[nn + eid] = suffix[eid][first_ge];
            if tree.nodes()[te.b].value >= x {
                uf_slots.union(nn + eid, te.b);
            }
            if tree.nodes()[te.a].value >= x {
                uf_slots.union(nn + eid, te.a);
            }
        }
        let mut acc = vec![0.0f64; nn + edges.len()];
        let mut max_comp = 0.0f64;
        for slot in 0..slot_weight.len() {
            if slot_weight[slot] > 0.0 {
                let r = uf_slots.find(slot);
                acc[r] += slot_weight[slot];
                max_comp = max_comp.max(acc[r]);
            }
        }
        let b = if max_comp > 0.5 { 0.0 } else { 1.0 };
        integral += b * step;
    }
    Ok(hi - integral)
}

/// Non-additivity defect `Π(F,G) = |ζ(F+G) − ζ(F) − ζ(G)|`.
pub fn pi_defect(
    qs: &QuasiState,
    mesh: &SurfaceMesh,
    f: &ScalarField,
    g: &ScalarField,
) -> Result<f64> {
    let sum = f.add(g)?;
    Ok((zeta(qs, mesh, &sum)? - zeta(qs, mesh, f)? - zeta(qs, mesh, g)?).abs())
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiStateJson {
    pub kind: String,
    pub points: Vec<usize>,
    pub weights: Vec<f64>,
    pub half_tolerance: f64,
}
