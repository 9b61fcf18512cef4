//! Level-set and region topology: connected components, solid sets, and
//! the measure-weighted contour tree of a scalar field.
//!
//! Value ties between vertices are broken lexicographically by vertex
//! index (simulated simplicity), so every discrete field behaves like a
//! generic Morse function. The contour tree comes from the classical
//! join-tree/split-tree merge; an Euler-characteristic sweep additionally
//! flags levels where the sublevel set closes a 1-cycle (a level-set
//! circle appears or disappears without a component merge), which is how
//! degenerate circle extrema on the torus show up.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{MeshKey, ScalarField, SurfaceMesh, Topology};

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut x = x as u32;
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x as usize
    }

    /// Returns the new root, or `None` if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        Some(ra)
    }
}

/// A set of mesh vertices with its summed area measure.
#[derive(Debug, Clone)]
pub struct Region {
    key: MeshKey,
    vertices: Vec<usize>,
    measure: f64,
}

impl Region {
    pub fn from_vertices(mesh: &SurfaceMesh, mut vertices: Vec<usize>) -> Region {
        vertices.sort_unstable();
        vertices.dedup();
        let measure = vertices.iter().map(|&v| mesh.weight(v)).sum();
        Region { key: mesh.key(), vertices, measure }
    }

    pub fn from_mask(mesh: &SurfaceMesh, keep: &[bool]) -> Region {
        let vertices = (0..mesh.vertex_count()).filter(|&v| keep[v]).collect();
        Region::from_vertices(mesh, vertices)
    }

    pub fn key(&self) -> MeshKey {
        self.key
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn mask(&self, mesh: &SurfaceMesh) -> Vec<bool> {
        let mut m = vec![false; mesh.vertex_count()];
        for &v in &self.vertices {
            m[v] = true;
        }
        m
    }
}

/// Partition of the kept vertices into maximal connected regions,
/// ordered by smallest contained vertex index.
pub fn connected_components(mesh: &SurfaceMesh, keep: &[bool]) -> Vec<Region> {
    assert_eq!(keep.len(), mesh.vertex_count(), "mask length != vertex count");
    let n = mesh.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut buf = [0usize; 4];
    for v in 0..n {
        if !keep[v] {
            continue;
        }
        let k = mesh.neighbors(v, &mut buf);
        for &nb in &buf[..k] {
            if nb < v && keep[nb] {
                uf.union(v, nb);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of_root: Vec<Option<usize>> = vec![None; n];
    for v in 0..n {
        if !keep[v] {
            continue;
        }
        let r = uf.find(v);
        match group_of_root[r] {
            Some(g) => groups[g].push(v),
            None => {
                group_of_root[r] = Some(groups.len());
                groups.push(vec![v]);
            }
        }
    }
    groups.into_iter().map(|vs| Region::from_vertices(mesh, vs)).collect()
}

/// Solid: connected with connected complement.
pub fn is_solid(mesh: &SurfaceMesh, region: &Region) -> Result<bool> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if region.len() == mesh.vertex_count() {
        return Err(Error::EmptyComplement);
    }
    let mask = region.mask(mesh);
    let inside = connected_components(mesh, &mask);
    if inside.len() != 1 {
        return Ok(false);
    }
    let comask: Vec<bool> = mask.iter().map(|b| !b).collect();
    Ok(connected_components(mesh, &comask).len() == 1)
}

/// Sum of area weights over the region.
pub fn region_measure(mesh: &SurfaceMesh, region: &Region) -> f64 {
    region.vertices.iter().map(|&v| mesh.weight(v)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Min,
    Max,
    Saddle,
    RegularCollapse,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub vertex: usize,
    pub value: f64,
    pub kind: NodeKind,
}

/// Monotone arc between two nodes; `a` is the lower end. `vertices`
/// holds the regular vertices mapped into the arc interior, in
/// ascending sweep order.
#[derive(Debug, Clone)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub measure: f64,
    pub vertices: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexLocation {
    Node(u32),
    Edge(u32),
}

/// Where a tree point sits: at a node, or inside an edge at a level value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreeLocation {
    Node(usize),
    Edge { edge: usize, level: f64 },
}

/// A point of the contour tree together with the measures of the
/// branches of its complement.
#[derive(Debug, Clone)]
pub struct TreePoint {
    pub location: TreeLocation,
    pub level_value: f64,
    pub branch_measures: Vec<f64>,
}

/// Contour tree of a field: join/split merge, measure-annotated.
#[derive(Debug, Clone)]
pub struct ContourTree {
    key: MeshKey,
    total_area: f64,
    nodes: Vec<TreeNode>,
    edges: Vec<TreeEdge>,
    vertex_map: Vec<VertexLocation>,
    /// incident edge ids per node
    node_edges: Vec<Vec<u32>>,
    values: Vec<f64>,
}

/// Ascending sweep order under simulated simplicity.
fn sorted_order(values: &[f64]) -> (Vec<u32>, Vec<u32>) {
    let mut order: Vec<u32> = (0..values.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        values[a as usize]
            .partial_cmp(&values[b as usize])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut rank = vec![0u32; values.len()];
    for (pos, &v) in order.iter().enumerate() {
        rank[v as usize] = pos as u32;
    }
    (order, rank)
}

struct MergeForest {
    parent: Vec<Option<u32>>,
    children: Vec<Vec<u32>>,
}

impl MergeForest {
    fn new(n: usize) -> Self {
        MergeForest { parent: vec![None; n], children: vec![Vec::new(); n] }
    }

    fn attach(&mut self, child: u32, parent: u32) {
        self.parent[child as usize] = Some(parent);
        self.children[parent as usize].push(child);
    }

    fn remove_child(&mut self, parent: u32, child: u32) {
        let list = &mut self.children[parent as usize];
        let pos = list.iter().position(|&c| c == child).expect("child present");
        list.swap_remove(pos);
    }

    /// Splice vertex v out: reconnect its (at most one) child to its parent.
    fn splice(&mut self, v: u32) {
        debug_assert!(self.children[v as usize].len() <= 1);
        let p = self.parent[v as usize];
        let child = self.children[v as usize].pop();
        if let Some(p) = p {
            self.remove_child(p, v);
        }
        if let Some(c) = child {
            self.parent[c as usize] = p;
            if let Some(p) = p {
                self.children[p as usize].push(c);
            }
        }
    }
}

/// Build the merge tree of the sweep in direction `ascending`. Also
/// returns, for the ascending sweep, the vertices at which the growing
/// sublevel set closes an independent 1-cycle (Euler bookkeeping).
fn sweep_tree(
    mesh: &SurfaceMesh,
    order: &[u32],
    rank: &[u32],
    ascending: bool,
) -> (MergeForest, Vec<bool>) {
    let n = mesh.vertex_count();
    let mut forest = MergeForest::new(n);
    let mut uf = UnionFind::new(n);
    // component representative -> most recently processed vertex
    let mut comp_top: Vec<u32> = (0..n as u32).collect();
    let mut processed = vec![false; n];
    let mut cycle_event = vec![false; n];
    let mut buf = [0usize; 4];
    let mut fbuf = [0usize; 4];
    // counters for the implicit polar cap faces of the sphere
    let mut cap_count = [0usize; 2];
    let before = |a: u32, b: u32| -> bool {
        if ascending {
            rank[a as usize] < rank[b as usize]
        } else {
            rank[a as usize] > rank[b as usize]
        }
    };
    let iter: Box<dyn Iterator<Item = &u32>> = if ascending {
        Box::new(order.iter())
    } else {
        Box::new(order.iter().rev())
    };
    for &v in iter {
        let vu = v as usize;
        let k = mesh.neighbors(vu, &mut buf);
        let mut edges_to_processed = 0usize;
        let mut distinct = 0usize;
        for &nb in &buf[..k] {
            if !processed[nb] {
                continue;
            }
            edges_to_processed += 1;
            let r = uf.find(nb);
            let top = comp_top[r];
            if top != v {
                distinct += 1;
                forest.attach(top, v);
                let root = uf.union(r, vu).expect("distinct components");
                comp_top[root] = v;
            }
        }
        processed[vu] = true;
        comp_top[uf.find(vu)] = v;
        if ascending {
            // newly completed quad faces (v is the last corner by rank)
            let mut faces = 0usize;
            let fk = mesh.incident_faces(vu, &mut fbuf);
            for &f in &fbuf[..fk] {
                if mesh
                    .face_vertices(f)
                    .iter()
                    .all(|&c| c == vu || before(c as u32, v))
                {
                    faces += 1;
                }
            }
            if mesh.topology() == Topology::Sphere {
                let (row, _) = mesh.row_col(vu);
                if row == 0 {
                    cap_count[0] += 1;
                    if cap_count[0] == mesh.n_v() {
                        faces += 1;
                    }
                } else if row == mesh.n_u() - 1 {
                    cap_count[1] += 1;
                    if cap_count[1] == mesh.n_v() {
                        faces += 1;
                    }
                }
            }
            // Δ(cycle rank) = edges − merges − faces for the growing complex
            if edges_to_processed > distinct + faces {
                cycle_event[vu] = true;
            }
        }
    }
    (forest, cycle_event)
}

impl ContourTree {
    /// Join/split merge of the sublevel and superlevel sweep trees.
    pub fn build(mesh: &SurfaceMesh, field: &ScalarField) -> Result<ContourTree> {
        if field.key() != mesh.key() {
            return Err(Error::MeshMismatch);
        }
        if field.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        let n = mesh.vertex_count();
        let values = field.values().to_vec();
        let (order, rank) = sorted_order(&values);
        let (mut join, cycle_event) = sweep_tree(mesh, &order, &rank, true);
        let (mut split, _) = sweep_tree(mesh, &order, &rank, false);

        // Peel leaves off the two merge trees to assemble the contour
        // tree on all vertices.
        let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(n.saturating_sub(1));
        let mut peeled = vec![false; n];
        let mut alive = n;
        let mut queue: Vec<u32> = order.clone();
        let lower_leaf = |j: &MergeForest, s: &MergeForest, v: usize| {
            j.children[v].is_empty() && s.children[v].len() <= 1 && j.parent[v].is_some()
        };
        let upper_leaf = |j: &MergeForest, s: &MergeForest, v: usize| {
            s.children[v].is_empty() && j.children[v].len() <= 1 && s.parent[v].is_some()
        };
        let mut qi = 0;
        while alive > 1 {
            if qi >= queue.len() {
                // requeue scan; the merge always leaves a peelable leaf
                queue = (0..n as u32).filter(|&v| !peeled[v as usize]).collect();
                qi = 0;
                assert!(
                    queue.iter().any(|&v| {
                        lower_leaf(&join, &split, v as usize) || upper_leaf(&join, &split, v as usize)
                    }),
                    "contour tree merge stuck"
                );
            }
            let v = queue[qi];
            qi += 1;
            let vu = v as usize;
            if peeled[vu] || alive == 1 {
                continue;
            }
            if lower_leaf(&join, &split, vu) {
                let w = join.parent[vu].unwrap();
                arcs.push((v, w));
                join.remove_child(w, v);
                join.parent[vu] = None;
                split.splice(v);
                peeled[vu] = true;
                alive -= 1;
                queue.push(w);
            } else if upper_leaf(&join, &split, vu) {
                let w = split.parent[vu].unwrap();
                arcs.push((v, w));
                split.remove_child(w, v);
                split.parent[vu] = None;
                join.splice(v);
                peeled[vu] = true;
                alive -= 1;
                queue.push(w);
            }
        }
        debug_assert_eq!(arcs.len(), n - 1);

        // CSR adjacency of the augmented tree.
        let mut deg = vec![0u32; n];
        for &(a, b) in &arcs {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut offset = vec![0u32; n + 1];
        for v in 0..n {
            offset[v + 1] = offset[v] + deg[v];
        }
        let mut adj = vec![0u32; 2 * arcs.len()];
        let mut cursor = offset.clone();
        for &(a, b) in &arcs {
            adj[cursor[a as usize] as usize] = b;
            cursor[a as usize] += 1;
            adj[cursor[b as usize] as usize] = a;
            cursor[b as usize] += 1;
        }

        // Contract regular vertices into arcs. A vertex stays a node if
        // its degree differs from 2, if its two arcs run the same way,
        // or if the Euler sweep flagged it.
        let is_node = |v: usize| -> bool {
            if deg[v] != 2 {
                return true;
            }
            if cycle_event[v] {
                return true;
            }
            let a = adj[offset[v] as usize] as usize;
            let b = adj[offset[v] as usize + 1] as usize;
            let up_a = rank[a] > rank[v];
            let up_b = rank[b] > rank[v];
            up_a == up_b
        };

        let mut node_id = vec![u32::MAX; n];
        let mut nodes: Vec<TreeNode> = Vec::new();
        for &v in &order {
            let vu = v as usize;
            if is_node(vu) {
                node_id[vu] = nodes.len() as u32;
                nodes.push(TreeNode { vertex: vu, value: values[vu], kind: NodeKind::Saddle });
            }
        }

        let mut edges: Vec<TreeEdge> = Vec::new();
        let mut vertex_map = vec![VertexLocation::Node(0); n];
        let mut node_edges: Vec<Vec<u32>> = vec![Vec::new(); nodes.len()];
        let mut visited_from: Vec<[bool; 4]> = vec![[false; 4]; n];
        for start in 0..n {
            if node_id[start] == u32::MAX {
                continue;
            }
            vertex_map[start] = VertexLocation::Node(node_id[start]);
            for slot in 0..deg[start] as usize {
                if visited_from[start][slot] {
                    continue;
                }
                visited_from[start][slot] = true;
                let mut prev = start;
                let mut cur = adj[offset[start] as usize + slot] as usize;
                let mut interior: Vec<u32> = Vec::new();
                while node_id[cur] == u32::MAX {
                    interior.push(cur as u32);
                    let base = offset[cur] as usize;
                    let next = if adj[base] as usize == prev { adj[base + 1] } else { adj[base] };
                    prev = cur;
                    cur = next as usize;
                }
                // mark the far slot so the arc is built once
                let far_base = offset[cur] as usize;
                for s in 0..deg[cur] as usize {
                    if adj[far_base + s] as usize == prev && !visited_from[cur][s] {
                        visited_from[cur][s] = true;
                        break;
                    }
                }
                let (lo, hi) = if rank[start] < rank[cur] { (start, cur) } else { (cur, start) };
                if lo != start {
                    interior.reverse();
                }
                let measure: f64 = interior.iter().map(|&v| mesh.weight(v as usize)).sum();
                let eid = edges.len() as u32;
                for &v in &interior {
                    vertex_map[v as usize] = VertexLocation::Edge(eid);
                }
                node_edges[node_id[lo] as usize].push(eid);
                node_edges[node_id[hi] as usize].push(eid);
                edges.push(TreeEdge {
                    a: node_id[lo] as usize,
                    b: node_id[hi] as usize,
                    measure,
                    vertices: interior,
                });
            }
        }

        // Node kinds from tree-local degrees.
        for nid in 0..nodes.len() {
            let v = nodes[nid].vertex;
            let up = node_edges[nid].iter().filter(|&&e| edges[e as usize].a == nid).count();
            let down = node_edges[nid].len() - up;
            nodes[nid].kind = match (down, up) {
                (0, _) => NodeKind::Min,
                (_, 0) => NodeKind::Max,
                (1, 1) if cycle_event[v] => NodeKind::RegularCollapse,
                _ => NodeKind::Saddle,
            };
        }

        // Attribute each node vertex's weight to one incident edge so
        // that edge measures partition the total area: the upward edge
        // when one exists, lowest edge id to break ties.
        for nid in 0..nodes.len() {
            let v = nodes[nid].vertex;
            let pick = node_edges[nid]
                .iter()
                .filter(|&&e| edges[e as usize].a == nid)
                .min()
                .or_else(|| node_edges[nid].iter().min())
                .copied()
                .expect("node has an incident edge");
            edges[pick as usize].measure += mesh.weight(v);
        }

        Ok(ContourTree {
            key: mesh.key(),
            total_area: mesh.total_area(),
            nodes,
            edges,
            vertex_map,
            node_edges,
            values,
        })
    }

    pub fn key(&self) -> MeshKey {
        self.key
    }

    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn node_edges(&self, node: usize) -> &[u32] {
        &self.node_edges[node]
    }

    pub fn vertex_map(&self) -> &[VertexLocation] {
        &self.vertex_map
    }

    pub fn vertex_value(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Min | NodeKind::Max))
    }

    /// Number of connected components of `{F < c}` read off the tree.
    pub fn sublevel_component_count(&self, c: f64) -> usize {
        let mut uf = UnionFind::new(self.nodes.len() + self.edges.len());
        let node_slot = |n: usize| n;
        let edge_slot = |e: usize| self.nodes.len() + e;
        let mut present = vec![false; self.nodes.len() + self.edges.len()];
        for (nid, node) in self.nodes.iter().enumerate() {
            if node.value < c {
                present[node_slot(nid)] = true;
            }
        }
        for (eid, edge) in self.edges.iter().enumerate() {
            let lo = self.nodes[edge.a].value;
            let has_low_part =
                lo < c || edge.vertices.iter().any(|&v| self.values[v as usize] < c);
            if has_low_part {
                present[edge_slot(eid)] = true;
                if self.nodes[edge.a].value < c {
                    uf.union(edge_slot(eid), node_slot(edge.a));
                }
                if self.nodes[edge.b].value < c {
                    uf.union(edge_slot(eid), node_slot(edge.b));
                }
            }
        }
        let mut roots = Vec::new();
        for slot in 0..present.len() {
            if present[slot] {
                let r = uf.find(slot);
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
        roots.len()
    }

    /// Branch measures of the complement of a tree point, one per
    /// connected component of `tree ∖ {point}`, using `weight` per
    /// vertex. With `exclude_at_point` the vertices sitting exactly at
    /// the point keep their mass out of every branch (atomic measures);
    /// otherwise they count toward the lower branch so the branches
    /// partition the total.
    pub fn branch_measures_by(
        &self,
        loc: &TreeLocation,
        weight: &dyn Fn(usize) -> f64,
        exclude_at_point: bool,
    ) -> Result<Vec<f64>> {
        // component sum reached through `edge` starting away from `from_node`
        let side_sum = |edge: usize, from_node: usize| -> f64 {
            let mut total = 0.0;
            let mut stack = vec![(edge, from_node)];
            let mut seen_edges = vec![false; self.edges.len()];
            seen_edges[edge] = true;
            while let Some((e, from)) = stack.pop() {
                let te = &self.edges[e];
                total += te.vertices.iter().map(|&v| weight(v as usize)).sum::<f64>();
                let next = if te.a == from { te.b } else { te.a };
                total += weight(self.nodes[next].vertex);
                for &e2 in &self.node_edges[next] {
                    let e2 = e2 as usize;
                    if !seen_edges[e2] {
                        seen_edges[e2] = true;
                        stack.push((e2, next));
                    }
                }
            }
            total
        };
        match *loc {
            TreeLocation::Node(nid) => {
                if nid >= self.nodes.len() {
                    return Err(Error::PointOffTree);
                }
                let mut out: Vec<f64> = self.node_edges[nid]
                    .iter()
                    .map(|&e| side_sum(e as usize, nid))
                    .collect();
                if !exclude_at_point {
                    if let Some(first) = out.first_mut() {
                        *first += weight(self.nodes[nid].vertex);
                    }
                }
                Ok(out)
            }
            TreeLocation::Edge { edge, level } => {
                if edge >= self.edges.len() {
                    return Err(Error::PointOffTree);
                }
                let te = &self.edges[edge];
                let lo = self.nodes[te.a].value;
                let hi = self.nodes[te.b].value;
                if level < lo || level > hi {
                    return Err(Error::PointOffTree);
                }
                let mut below = side_sum_excluding_arc(self, edge, te.b, weight);
                let mut above = side_sum_excluding_arc(self, edge, te.a, weight);
                for &v in &te.vertices {
                    let val = self.values[v as usize];
                    if val < level {
                        below += weight(v as usize);
                    } else if val > level {
                        above += weight(v as usize);
                    } else if !exclude_at_point {
                        below += weight(v as usize);
                    }
                }
                Ok(vec![below, above])
            }
        }
    }

    /// Area-measure branch decomposition at a tree point.
    pub fn point_at(&self, mesh: &SurfaceMesh, loc: TreeLocation) -> Result<TreePoint> {
        if mesh.key() != self.key {
            return Err(Error::MeshMismatch);
        }
        let level_value = match loc {
            TreeLocation::Node(n) => {
                self.nodes.get(n).ok_or(Error::PointOffTree)?.value
            }
            TreeLocation::Edge { level, .. } => level,
        };
        let weights: Vec<f64> = (0..mesh.vertex_count()).map(|v| mesh.weight(v)).collect();
        let branch_measures = self.branch_measures_by(&loc, &|v| weights[v], false)?;
        Ok(TreePoint { location: loc, level_value, branch_measures })
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            nodes: self
                .nodes
                .iter()
                .map(|n| TreeNodeJson { value: n.value, kind: n.kind })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| TreeEdgeJson { a: e.a, b: e.b, measure: e.measure })
                .collect(),
        }
    }
}

fn side_sum_excluding_arc(
    tree: &ContourTree,
    edge: usize,
    far_node: usize,
    weight: &dyn Fn(usize) -> f64,
) -> f64 {
    // component containing the endpoint opposite `far_node`, not counting
    // the arc's own interior vertices
    let te = &tree.edges[edge];
    let start = if te.b == far_node { te.a } else { te.b };
    let mut total = weight(tree.nodes[start].vertex);
    let mut seen_edges = vec![false; tree.edges.len()];
    seen_edges[edge] = true;
    let mut stack: Vec<(usize, usize)> = tree.node_edges[start]
        .iter()
        .filter(|&&e2| !seen_edges[e2 as usize])
        .map(|&e2| (e2 as usize, start))
        .collect();
    for &(e2, _) in &stack {
        seen_edges[e2] = true;
    }
    while let Some((e, from)) = stack.pop() {
        let te = &tree.edges[e];
        total += te.vertices.iter().map(|&v| weight(v as usize)).sum::<f64>();
        let next = if te.a == from { te.b } else { te.a };
        total += weight(tree.nodes[next].vertex);
        for &e2 in &tree.node_edges[next] {
            let e2 = e2 as usize;
            if !seen_edges[e2] {
                seen_edges[e2] = true;
                stack.push((e2, next));
            }
        }
    }
    total
}

/// Branch measures at a point, area-weighted (the spec operation).
pub fn complement_branch_measures(
    mesh: &SurfaceMesh,
    tree: &ContourTree,
    loc: TreeLocation,
) -> Result<Vec<f64>> {
    tree.point_at(mesh, loc).map(|p| p.branch_measures)
}

#[derive(Debug, Serialize)]
pub struct TreeNodeJson {
    pub value: f64,
    pub kind: NodeKind,
}

#[derive(Debug, Serialize)]
pub struct TreeEdgeJson {
    pub a: usize,
    pub b: usize,
    pub measure: f64,
}

#[derive(Debug, Serialize)]
pub struct TreeJson {
    pub nodes: Vec<TreeNodeJson>,
    pub edges: Vec<TreeEdgeJson>,
}
