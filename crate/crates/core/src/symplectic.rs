//! Area forms and the numerical Poisson bracket.
//!
//! Sign convention: `{F,G}` is fixed so that `{v, u} = +1` under
//! `ω = du∧dv`, i.e. `{F,G} = (∂F/∂v ∂G/∂u − ∂F/∂u ∂G/∂v)/ρ`.
//! Central differences with periodic wraparound; the extreme sphere
//! rows fall back to one-sided differences in z.

use crate::error::{Error, Result};
use crate::mesh::{MeshKey, ScalarField, SurfaceMesh, Topology};

/// `ω = ρ du∧dv` in the mesh's parametric coordinates.
#[derive(Debug, Clone)]
pub struct AreaForm {
    key: MeshKey,
    density: Vec<f64>,
    total_area: f64,
    h_u: f64,
    h_v: f64,
}

impl AreaForm {
    pub fn from_mesh(mesh: &SurfaceMesh) -> AreaForm {
        let parametric_area = match mesh.topology() {
            Topology::Sphere => 2.0 * std::f64::consts::TAU, // 2 in z times 2π in φ
            Topology::Torus => 1.0,
        };
        let rho = mesh.total_area() / parametric_area;
        let (h_u, h_v) = mesh.spacing();
        AreaForm {
            key: mesh.key(),
            density: vec![rho; mesh.vertex_count()],
            total_area: mesh.total_area(),
            h_u,
            h_v,
        }
    }

    pub fn key(&self) -> MeshKey {
        self.key
    }

    pub fn density(&self, idx: usize) -> f64 {
        self.density[idx]
    }

    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    /// Parametric cell area times density: the vertex area weight.
    pub fn cell_weight(&self, idx: usize) -> f64 {
        self.density[idx] * self.h_u * self.h_v
    }
}

#[derive(Debug, Clone)]
pub struct BracketProvenance {
    pub f: Option<String>,
    pub g: Option<String>,
    pub h_u: f64,
    pub h_v: f64,
}

/// `{F,G}` sampled on the mesh.
#[derive(Debug, Clone)]
pub struct BracketField {
    field: ScalarField,
    provenance: BracketProvenance,
}

impl BracketField {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn values(&self) -> &[f64] {
        self.field.values()
    }

    pub fn provenance(&self) -> &BracketProvenance {
        &self.provenance
    }
}

fn d_du(mesh: &SurfaceMesh, f: &[f64], i: usize, j: usize, h_u: f64) -> f64 {
    let n_u = mesh.n_u();
    match mesh.topology() {
        Topology::Torus => {
            let up = mesh.index((i + 1) % n_u, j);
            let dn = mesh.index((i + n_u - 1) % n_u, j);
            (f[up] - f[dn]) / (2.0 * h_u)
        }
        Topology::Sphere => {
            if i == 0 {
                (f[mesh.index(1, j)] - f[mesh.index(0, j)]) / h_u
            } else if i == n_u - 1 {
                (f[mesh.index(i, j)] - f[mesh.index(i - 1, j)]) / h_u
            } else {
                (f[mesh.index(i + 1, j)] - f[mesh.index(i - 1, j)]) / (2.0 * h_u)
            }
        }
    }
}

fn d_dv(mesh: &SurfaceMesh, f: &[f64], i: usize, j: usize, h_v: f64) -> f64 {
    let n_v = mesh.n_v();
    let right = mesh.index(i, (j + 1) % n_v);
    let left = mesh.index(i, (j + n_v - 1) % n_v);
    (f[right] - f[left]) / (2.0 * h_v)
}

/// Bracket values into a caller buffer; the single arithmetic path every
/// sup-norm comparison in the crate goes through.
pub(crate) fn bracket_values_into(
    form: &AreaForm,
    mesh: &SurfaceMesh,
    fv: &[f64],
    gv: &[f64],
    out: &mut Vec<f64>,
) {
    let (h_u, h_v) = mesh.spacing();
    out.clear();
    out.reserve(mesh.vertex_count());
    for i in 0..mesh.n_u() {
        for j in 0..mesh.n_v() {
            let idx = mesh.index(i, j);
            let f_u = d_du(mesh, fv, i, j, h_u);
            let f_v = d_dv(mesh, fv, i, j, h_v);
            let g_u = d_du(mesh, gv, i, j, h_u);
            let g_v = d_dv(mesh, gv, i, j, h_v);
            out.push((f_v * g_u - f_u * g_v) / form.density[idx]);
        }
    }
}

pub(crate) fn sup_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Central-difference Poisson bracket of two fields under an area form.
pub fn poisson_bracket(
    form: &AreaForm,
    mesh: &SurfaceMesh,
    f: &ScalarField,
    g: &ScalarField,
) -> Result<BracketField> {
    if form.key != mesh.key() || f.key() != mesh.key() || g.key() != mesh.key() {
        return Err(Error::MeshMismatch);
    }
    let (h_u, h_v) = mesh.spacing();
    let mut out = Vec::new();
    bracket_values_into(form, mesh, f.values(), g.values(), &mut out);
    let field = mesh.field_from_values(out)?;
    Ok(BracketField {
        field,
        provenance: BracketProvenance {
            f: f.generator().map(str::to_string),
            g: g.generator().map(str::to_string),
            h_u,
            h_v,
        },
    })
}

/// `‖{F,G}‖∞` over the mesh.
pub fn bracket_sup_norm(b: &BracketField) -> f64 {
    sup_abs(b.field.values())
}

/// `∫ |{F,G}| ω` as a weighted vertex sum.
pub fn bracket_l1(form: &AreaForm, b: &BracketField) -> f64 {
    b.field
        .values()
        .iter()
        .enumerate()
        .map(|(idx, v)| v.abs() * form.cell_weight(idx))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_sphere_grid, build_torus_grid};

    #[test]
    fn canonical_pair_gives_plus_one() {
        let mesh = build_torus_grid(64, 64, 1.0).unwrap();
        let form = AreaForm::from_mesh(&mesh);
        let f = mesh.sample_str("v").unwrap();
        let g = mesh.sample_str("u").unwrap();
        let b = poisson_bracket(&form, &mesh, &f, &g).unwrap();
        // v and u wrap, so the wrap rows/columns see the jump; check the
        // interior where the central difference of a linear map is exact
        for i in 1..63 {
            for j in 1..63 {
                let val = b.values()[mesh.index(i, j)];
                assert_eq!(val, 1.0, "at ({i},{j}): {val}");
            }
        }
    }

    #[test]
    fn bracket_with_itself_vanishes() {
        let mesh = build_torus_grid(32, 32, 1.0).unwrap();
        let form = AreaForm::from_mesh(&mesh);
        let f = mesh.sample_str("sin(2*pi*u) * cos(2*pi*v)").unwrap();
        let b = poisson_bracket(&form, &mesh, &f, &f).unwrap();
        assert!(b.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn antisymmetry_is_exact() {
        let mesh = build_sphere_grid(24, 24, 4.0 * std::f64::consts::PI).unwrap();
        let form = AreaForm::from_mesh(&mesh);
        let f = mesh.sample_str("x^2").unwrap();
        let g = mesh.sample_str("y^2 - 0.3*z").unwrap();
        let fg = poisson_bracket(&form, &mesh, &f, &g).unwrap();
        let gf = poisson_bracket(&form, &mesh, &g, &f).unwrap();
        for (a, b) in fg.values().iter().zip(gf.values()) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn bilinearity_is_machine_exact() {
        let mesh = build_torus_grid(16, 16, 1.0).unwrap();
        let form = AreaForm::from_mesh(&mesh);
        let f1 = mesh.sample_str("sin(2*pi*u)").unwrap();
        let f2 = mesh.sample_str("cos(2*pi*v)").unwrap();
        let g = mesh.sample_str("sin(2*pi*(u+v))").unwrap();
        let (a, b) = (2.0, -0.5);
        let combo = f1.scale(a).add(&f2.scale(b)).unwrap();
        let lhs = poisson_bracket(&form, &mesh, &combo, &g).unwrap();
        let b1 = poisson_bracket(&form, &mesh, &f1, &g).unwrap();
        let b2 = poisson_bracket(&form, &mesh, &f2, &g).unwrap();
        for idx in 0..mesh.vertex_count() {
            let rhs = a * b1.values()[idx] + b * b2.values()[idx];
            assert!((lhs.values()[idx] - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_sine_pair_analytic() {
        let mesh = build_torus_grid(128, 128, 1.0).unwrap();
        let form = AreaForm::from_mesh(&mesh);
        let f = mesh.sample_str("sin(2*pi*u)").unwrap();
        let g = mesh.sample_str("sin(2*pi*v)").unwrap();
        let b = poisson_bracket(&form, &mesh, &f, &g).unwrap();
        let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        // pointwise against −4π² cos(2πu) cos(2πv)
        let mut worst = 0.0f64;
        for idx in 0..mesh.vertex_count() {
            let [u, v] = mesh.param(idx);
            let exact = -four_pi_sq
                * (std::f64::consts::TAU * u).cos()
                * (std::f64::consts::TAU * v).cos();
            worst = worst.max((b.values()[idx] - exact).abs());
        }
        assert!(worst < 0.02 * four_pi_sq, "sup error {worst}");
        let sup = bracket_sup_norm(&b);
        assert!((sup - four_pi_sq).abs() < 0.02 * four_pi_sq, "sup {sup}");
        let l1 = bracket_l1(&form, &b);
        assert!((l1 - 16.0).abs() < 0.03 * 16.0, "l1 {l1}");
        // Hölder
        assert!(l1 <= mesh.total_area() * sup + 1e-12);
    }

    #[test]
    fn zero_bracket_norms() {
        let mesh = build_torus_grid(16, 16, 1.0).unwrap();
        let form = AreaForm::from_mesh(&mesh);
        let f = mesh.sample_str("u * 0").unwrap();
        let g = mesh.sample_str("sin(2*pi*v)").unwrap();
        let b = poisson_bracket(&form, &mesh, &f, &g).unwrap();
        assert_eq!(bracket_sup_norm(&b), 0.0);
        assert_eq!(bracket_l1(&form, &b), 0.0);
    }

    #[test]
    fn mesh_mismatch_rejected() {
        let m1 = build_torus_grid(16, 16, 1.0).unwrap();
        let m2 = build_torus_grid(32, 32, 1.0).unwrap();
        let form = AreaForm::from_mesh(&m1);
        let f = m1.sample_str("u").unwrap();
        let g = m2.sample_str("u").unwrap();
        assert!(matches!(
            poisson_bracket(&form, &m1, &f, &g),
            Err(Error::MeshMismatch)
        ));
    }

    #[test]
    fn area_form_partitions_total_area() {
        for mesh in [
            build_sphere_grid(32, 64, 4.0 * std::f64::consts::PI).unwrap(),
            build_torus_grid(16, 48, 2.5).unwrap(),
        ] {
            let form = AreaForm::from_mesh(&mesh);
            let sum: f64 = (0..mesh.vertex_count()).map(|v| form.cell_weight(v)).sum();
            assert!((sum - mesh.total_area()).abs() / mesh.total_area() < 1e-9);
        }
    }
}
