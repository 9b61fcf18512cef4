//! Discrete closed surfaces with per-vertex area weights, and scalar
//! fields sampled on them.
//!
//! The sphere uses the area-preserving cylindrical chart `u = z ∈ (−1,1)`,
//! `v = φ ∈ [0,2π)`: every cell carries the same weight and the area form
//! is a constant multiple of `du∧dv`, so no pole singularities enter any
//! downstream derivative. Vertices sit at cell centers; the extreme z-rows
//! stand in for the poles. The torus is the flat unit square with both
//! directions periodic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr, Var};

pub const MIN_GRID: usize = 8;
pub const MAX_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Sphere,
    Torus,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::Sphere => "sphere",
            Topology::Torus => "torus",
        }
    }
}

/// Structural identity of a mesh; two meshes built with identical
/// parameters are interchangeable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshKey {
    topology: Topology,
    n_u: usize,
    n_v: usize,
    area_bits: u64,
}

/// A discretized closed surface: `n_u × n_v` grid of cell-center vertices.
///
/// Vertex `(i, j)` has index `i * n_v + j`. Row index `i` runs along the
/// `u` coordinate (z on the sphere), column `j` along `v` (φ on the
/// sphere). Columns always wrap; rows wrap only on the torus.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    topology: Topology,
    n_u: usize,
    n_v: usize,
    total_area: f64,
    positions: Vec<[f64; 3]>,
    params: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

/// Per-vertex real values, optionally remembering the analytic generator.
#[derive(Debug, Clone)]
pub struct ScalarField {
    key: MeshKey,
    values: Vec<f64>,
    generator: Option<String>,
}

fn check_dims(n_u: usize, n_v: usize) -> Result<()> {
    for n in [n_u, n_v] {
        if !(MIN_GRID..=MAX_GRID).contains(&n) {
            return Err(Error::DimensionOutOfRange(n, MIN_GRID, MAX_GRID));
        }
    }
    Ok(())
}

/// Equal-area sphere grid in the cylindrical `(z, φ)` chart.
pub fn build_sphere_grid(n_z: usize, n_phi: usize, total_area: f64) -> Result<SurfaceMesh> {
    check_dims(n_z, n_phi)?;
    if !(total_area > 0.0) {
        return Err(Error::NonPositiveArea(total_area));
    }
    let n = n_z * n_phi;
    let w = total_area / n as f64;
    let mut positions = Vec::with_capacity(n);
    let mut params = Vec::with_capacity(n);
    for i in 0..n_z {
        let z = -1.0 + (i as f64 + 0.5) * 2.0 / n_z as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * std::f64::consts::TAU / n_phi as f64;
            positions.push([r * phi.cos(), r * phi.sin(), z]);
            params.push([z, phi]);
        }
    }
    Ok(SurfaceMesh {
        topology: Topology::Sphere,
        n_u: n_z,
        n_v: n_phi,
        total_area,
        positions,
        params,
        weights: vec![w; n],
    })
}

/// Flat torus `(u, v) ∈ [0,1)²`, both directions periodic.
pub fn build_torus_grid(n_u: usize, n_v: usize, total_area: f64) -> Result<SurfaceMesh> {
    check_dims(n_u, n_v)?;
    if !(total_area > 0.0) {
        return Err(Error::NonPositiveArea(total_area));
    }
    let n = n_u * n_v;
    let w = total_area / n as f64;
    let mut positions = Vec::with_capacity(n);
    let mut params = Vec::with_capacity(n);
    for i in 0..n_u {
        let u = (i as f64 + 0.5) / n_u as f64;
        for j in 0..n_v {
            let v = (j as f64 + 0.5) / n_v as f64;
            // standard embedding, only used for visualization
            let (big_r, small_r) = (1.0, 0.375);
            let (tu, tv) = (std::f64::consts::TAU * u, std::f64::consts::TAU * v);
            positions.push([
                (big_r + small_r * tv.cos()) * tu.cos(),
                (big_r + small_r * tv.cos()) * tu.sin(),
                small_r * tv.sin(),
            ]);
            params.push([u, v]);
        }
    }
    Ok(SurfaceMesh {
        topology: Topology::Torus,
        n_u,
        n_v,
        total_area,
        positions,
        params,
        weights: vec![w; n],
    })
}

impl SurfaceMesh {
    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn vertex_count(&self) -> usize {
        self.n_u * self.n_v
    }

    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    pub fn key(&self) -> MeshKey {
        MeshKey {
            topology: self.topology,
            n_u: self.n_u,
            n_v: self.n_v,
            area_bits: self.total_area.to_bits(),
        }
    }

    pub fn weight(&self, idx: usize) -> f64 {
        self.weights[idx]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        self.positions[idx]
    }

    /// Parametric coordinates: `(z, φ)` on the sphere, `(u, v)` on the torus.
    pub fn param(&self, idx: usize) -> [f64; 2] {
        self.params[idx]
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.n_v + col
    }

    pub fn row_col(&self, idx: usize) -> (usize, usize) {
        (idx / self.n_v, idx % self.n_v)
    }

    /// Grid spacing `(h_u, h_v)` in parametric coordinates.
    pub fn spacing(&self) -> (f64, f64) {
        match self.topology {
            Topology::Sphere => (2.0 / self.n_u as f64, std::f64::consts::TAU / self.n_v as f64),
            Topology::Torus => (1.0 / self.n_u as f64, 1.0 / self.n_v as f64),
        }
    }

    /// 4-neighbor adjacency. Fills `buf` and returns the neighbor count
    /// (3 for extreme sphere rows, 4 otherwise).
    pub fn neighbors(&self, idx: usize, buf: &mut [usize; 4]) -> usize {
        let (i, j) = self.row_col(idx);
        let mut k = 0;
        buf[k] = self.index(i, (j + 1) % self.n_v);
        k += 1;
        buf[k] = self.index(i, (j + self.n_v - 1) % self.n_v);
        k += 1;
        match self.topology {
            Topology::Torus => {
                buf[k] = self.index((i + 1) % self.n_u, j);
                k += 1;
                buf[k] = self.index((i + self.n_u - 1) % self.n_u, j);
                k += 1;
            }
            Topology::Sphere => {
                if i + 1 < self.n_u {
                    buf[k] = self.index(i + 1, j);
                    k += 1;
                }
                if i > 0 {
                    buf[k] = self.index(i - 1, j);
                    k += 1;
                }
            }
        }
        k
    }

    /// Number of quad faces: `(n_u − 1) · n_v` strips on the sphere,
    /// `n_u · n_v` on the torus.
    pub fn face_count(&self) -> usize {
        match self.topology {
            Topology::Sphere => (self.n_u - 1) * self.n_v,
            Topology::Torus => self.n_u * self.n_v,
        }
    }

    /// Corner vertices of face `f` (lower-left corner `(i, j)` with
    /// `f = i·n_v + j`), in the order LL, LR, UL, UR.
    pub fn face_vertices(&self, f: usize) -> [usize; 4] {
        let i = f / self.n_v;
        let j = f % self.n_v;
        let j1 = (j + 1) % self.n_v;
        let i1 = match self.topology {
            Topology::Sphere => i + 1,
            Topology::Torus => (i + 1) % self.n_u,
        };
        [self.index(i, j), self.index(i, j1), self.index(i1, j), self.index(i1, j1)]
    }

    /// Faces incident to a vertex (up to 4).
    pub fn incident_faces(&self, idx: usize, buf: &mut [usize; 4]) -> usize {
        let (i, j) = self.row_col(idx);
        let jm = (j + self.n_v - 1) % self.n_v;
        let mut k = 0;
        let push_row = |row: Option<usize>, k: &mut usize, buf: &mut [usize; 4]| {
            if let Some(r) = row {
                buf[*k] = r * self.n_v + j;
                *k += 1;
                buf[*k] = r * self.n_v + jm;
                *k += 1;
            }
        };
        match self.topology {
            Topology::Sphere => {
                push_row(if i < self.n_u - 1 { Some(i) } else { None }, &mut k, buf);
                push_row(if i > 0 { Some(i - 1) } else { None }, &mut k, buf);
            }
            Topology::Torus => {
                push_row(Some(i), &mut k, buf);
                push_row(Some((i + self.n_u - 1) % self.n_u), &mut k, buf);
            }
        }
        k
    }

    /// Evaluate an analytic expression at every vertex.
    ///
    /// Sphere fields may reference `x, y, z`; torus fields `u, v`.
    pub fn sample_field(&self, expr: &Expr) -> Result<ScalarField> {
        let allowed: &[Var] = match self.topology {
            Topology::Sphere => &[Var::X, Var::Y, Var::Z],
            Topology::Torus => &[Var::U, Var::V],
        };
        for var in expr.variables() {
            if !allowed.contains(&var) {
                return Err(Error::UnknownVariable(var.name().to_string(), self.topology.name()));
            }
        }
        let mut values = Vec::with_capacity(self.vertex_count());
        for idx in 0..self.vertex_count() {
            let [px, py, pz] = self.positions[idx];
            let [pu, pv] = self.params[idx];
            let val = expr.eval(&Bindings { x: px, y: py, z: pz, u: pu, v: pv });
            if !val.is_finite() {
                return Err(Error::NonFiniteValue(idx));
            }
            values.push(val);
        }
        Ok(ScalarField { key: self.key(), values, generator: Some(expr.text().to_string()) })
    }

    pub fn sample_str(&self, text: &str) -> Result<ScalarField> {
        self.sample_field(&Expr::parse(text)?)
    }

    /// Constant field.
    pub fn constant(&self, c: f64) -> ScalarField {
        ScalarField {
            key: self.key(),
            values: vec![c; self.vertex_count()],
            generator: Some(format!("{c}")),
        }
    }

    pub fn field_from_values(&self, values: Vec<f64>) -> Result<ScalarField> {
        assert_eq!(values.len(), self.vertex_count(), "one value per vertex");
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(ScalarField { key: self.key(), values, generator: None })
    }
}

impl ScalarField {
    pub fn key(&self) -> MeshKey {
        self.key
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn generator(&self) -> Option<&str> {
        self.generator.as_deref()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    fn same_mesh(&self, other: &ScalarField) -> Result<()> {
        if self.key == other.key {
            Ok(())
        } else {
            Err(Error::MeshMismatch)
        }
    }

    fn combined_generator(&self, other: &ScalarField, op: char) -> Option<String> {
        match (&self.generator, &other.generator) {
            (Some(a), Some(b)) => Some(format!("({a}) {op} ({b})")),
            _ => None,
        }
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.same_mesh(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(ScalarField { key: self.key, values, generator: self.combined_generator(other, '+') })
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        let generator = self.generator.as_ref().map(|g| format!("{c} * ({g})"));
        ScalarField { key: self.key, values: self.values.iter().map(|v| c * v).collect(), generator }
    }

    pub fn shift(&self, c: f64) -> ScalarField {
        let generator = self.generator.as_ref().map(|g| format!("({g}) + {c}"));
        ScalarField { key: self.key, values: self.values.iter().map(|v| v + c).collect(), generator }
    }

    pub fn squared(&self) -> ScalarField {
        let generator = self.generator.as_ref().map(|g| format!("({g})^2"));
        ScalarField { key: self.key, values: self.values.iter().map(|v| v * v).collect(), generator }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField { key: self.key, values: self.values.iter().map(|v| f(*v)).collect(), generator: None }
    }

    /// Largest value jump across any mesh edge; three of these make the
    /// default "grid tolerance" for level-value comparisons.
    pub fn max_edge_delta(&self, mesh: &SurfaceMesh) -> f64 {
        assert!(mesh.key() == self.key, "field/mesh mismatch");
        let mut buf = [0usize; 4];
        let mut best = 0.0f64;
        for idx in 0..mesh.vertex_count() {
            let k = mesh.neighbors(idx, &mut buf);
            for &nb in &buf[..k] {
                if nb > idx {
                    best = best.max((self.values[idx] - self.values[nb]).abs());
                }
            }
        }
        best
    }
}

/// Supremum distance between two fields on the same mesh.
pub fn c0_distance(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    a.same_mesh(b)?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// JSON document for a mesh together with one field on it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldJson {
    pub topology: Topology,
    pub n_u: usize,
    pub n_v: usize,
    pub total_area: f64,
    pub values: Vec<f64>,
}

pub fn field_to_json(mesh: &SurfaceMesh, field: &ScalarField) -> FieldJson {
    assert!(mesh.key() == field.key(), "field/mesh mismatch");
    FieldJson {
        topology: mesh.topology(),
        n_u: mesh.n_u(),
        n_v: mesh.n_v(),
        total_area: mesh.total_area(),
        values: field.values().to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_weights_are_equal_and_sum_to_area() {
        let m = build_sphere_grid(8, 8, 1.0).unwrap();
        assert_eq!(m.vertex_count(), 64);
        for idx in 0..64 {
            assert!((m.weight(idx) - 1.0 / 64.0).abs() < 1e-15);
        }
        let m = build_sphere_grid(16, 32, 4.0 * std::f64::consts::PI).unwrap();
        let sum: f64 = m.weights().iter().sum();
        let rel = (sum - m.total_area()).abs() / m.total_area();
        assert!(rel <= 1e-12, "rel err {rel}");
    }

    #[test]
    fn torus_weights() {
        let m = build_torus_grid(8, 8, 1.0).unwrap();
        assert_eq!(m.vertex_count(), 64);
        assert!((m.weight(0) - 1.0 / 64.0).abs() < 1e-15);
        let m = build_torus_grid(16, 16, 2.0).unwrap();
        let sum: f64 = m.weights().iter().sum();
        assert!((sum - 2.0).abs() / 2.0 <= 1e-12);
    }

    #[test]
    fn dimension_and_area_validation() {
        assert!(matches!(build_sphere_grid(4, 16, 1.0), Err(Error::DimensionOutOfRange(4, _, _))));
        assert!(matches!(build_torus_grid(8, 8192, 1.0), Err(Error::DimensionOutOfRange(_, _, _))));
        assert!(matches!(build_sphere_grid(8, 8, 0.0), Err(Error::NonPositiveArea(_))));
        assert!(matches!(build_sphere_grid(8, 8, -1.0), Err(Error::NonPositiveArea(_))));
    }

    #[test]
    fn sphere_positions_on_unit_sphere() {
        let m = build_sphere_grid(16, 16, 1.0).unwrap();
        for idx in 0..m.vertex_count() {
            let [x, y, z] = m.position(idx);
            assert!((x * x + y * y + z * z - 1.0).abs() < 1e-12);
            assert!(z.abs() < 1.0, "vertices never sit at poles");
        }
    }

    #[test]
    fn sample_x_squared_range() {
        let m = build_sphere_grid(64, 64, 1.0).unwrap();
        let f = m.sample_str("x^2").unwrap();
        assert!(f.min() >= 0.0 && f.min() < 0.01);
        assert!(f.max() <= 1.0 && f.max() > 0.99);
    }

    #[test]
    fn sample_constant_and_torus_mean() {
        let m = build_torus_grid(32, 32, 1.0).unwrap();
        let one = m.sample_str("1").unwrap();
        assert!(one.values().iter().all(|&v| v == 1.0));
        let f = m.sample_str("sin(2*pi*u)").unwrap();
        assert!(f.min() >= -1.0 && f.max() <= 1.0);
        let mean: f64 = f.values().iter().sum::<f64>() / f.values().len() as f64;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn sample_rejects_wrong_variables() {
        let sphere = build_sphere_grid(8, 8, 1.0).unwrap();
        assert!(matches!(sphere.sample_str("u + 1"), Err(Error::UnknownVariable(_, _))));
        let torus = build_torus_grid(8, 8, 1.0).unwrap();
        assert!(matches!(torus.sample_str("x"), Err(Error::UnknownVariable(_, _))));
    }

    #[test]
    fn sample_rejects_non_finite() {
        let m = build_torus_grid(8, 8, 1.0).unwrap();
        assert!(matches!(m.sample_str("1/(u - u)"), Err(Error::NonFiniteValue(_))));
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = build_sphere_grid(16, 16, 1.0).unwrap();
        let a = m.sample_str("sin(x*3) + cos(y - z)").unwrap();
        let b = m.sample_str("sin(x*3) + cos(y - z)").unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn c0_distance_basics() {
        let m = build_torus_grid(64, 64, 1.0).unwrap();
        let f = m.sample_str("sin(2*pi*u)").unwrap();
        assert_eq!(c0_distance(&f, &f).unwrap(), 0.0);
        let g = f.shift(0.3);
        assert!((c0_distance(&f, &g).unwrap() - 0.3).abs() < 1e-15);
        let zero = m.constant(0.0);
        let d = c0_distance(&f, &zero).unwrap();
        assert!((d - 1.0).abs() < 0.01, "sup |sin| on a 64 grid: {d}");
        let other = build_torus_grid(32, 32, 1.0).unwrap().constant(0.0);
        assert!(matches!(c0_distance(&f, &other), Err(Error::MeshMismatch)));
    }

    #[test]
    fn c0_metric_properties() {
        let m = build_torus_grid(16, 16, 1.0).unwrap();
        let fields = [
            m.sample_str("sin(2*pi*u)").unwrap(),
            m.sample_str("cos(2*pi*v) * 0.5").unwrap(),
            m.sample_str("u * 0 + 0.25").unwrap(),
        ];
        for a in &fields {
            for b in &fields {
                let dab = c0_distance(a, b).unwrap();
                let dba = c0_distance(b, a).unwrap();
                assert_eq!(dab, dba);
                for c in &fields {
                    let dac = c0_distance(a, c).unwrap();
                    let dcb = c0_distance(c, b).unwrap();
                    assert!(dab <= dac + dcb + 1e-15);
                }
            }
        }
    }

    #[test]
    fn adjacency_wraps_consistently() {
        let sphere = build_sphere_grid(8, 8, 1.0).unwrap();
        let mut buf = [0usize; 4];
        // extreme row vertices have 3 neighbors
        assert_eq!(sphere.neighbors(0, &mut buf), 3);
        assert_eq!(sphere.neighbors(sphere.vertex_count() - 1, &mut buf), 3);
        assert_eq!(sphere.neighbors(sphere.index(4, 4), &mut buf), 4);
        let torus = build_torus_grid(8, 8, 1.0).unwrap();
        for idx in 0..torus.vertex_count() {
            assert_eq!(torus.neighbors(idx, &mut buf), 4);
        }
        // symmetry: a in nbrs(b) iff b in nbrs(a)
        for mesh in [&sphere, &torus] {
            for idx in 0..mesh.vertex_count() {
                let k = mesh.neighbors(idx, &mut buf);
                let nbrs: Vec<usize> = buf[..k].to_vec();
                for nb in nbrs {
                    let mut buf2 = [0usize; 4];
                    let k2 = mesh.neighbors(nb, &mut buf2);
                    assert!(buf2[..k2].contains(&idx));
                }
            }
        }
    }

    #[test]
    fn field_json_roundtrip() {
        let m = build_torus_grid(8, 8, 2.0).unwrap();
        let f = m.sample_str("u").unwrap();
        let doc = field_to_json(&m, &f);
        let text = serde_json::to_string(&doc).unwrap();
        let back: FieldJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.values, f.values());
        assert_eq!(back.topology, Topology::Torus);
    }
}
