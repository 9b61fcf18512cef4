//! Rasterized image of the moment map `Φ = (F, G)` with multiplicity
//! counts, the `Π` triangle, and the coverage / area-formula checks.
//!
//! Each mesh quad's image is over-approximated by the convex hull of its
//! corner images, so the raster covers at least the piecewise-linear
//! image; containment checks shrink the triangle inward by a margin to
//! absorb the over-approximation.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{self, RasterGrid};
use crate::mesh::{ScalarField, SurfaceMesh, Topology};
use crate::quasi::{zeta, QuasiState};
use crate::symplectic::{bracket_l1, AreaForm, BracketField};

pub const MIN_RESOLUTION: usize = 16;
pub const MAX_RESOLUTION: usize = 4096;

/// Raster of `im Φ` in the `(F, G)` plane.
#[derive(Debug, Clone)]
pub struct MomentMapImage {
    grid: RasterGrid,
    multiplicity: Vec<u32>,
}

impl MomentMapImage {
    pub fn resolution(&self) -> (usize, usize) {
        (self.grid.nx, self.grid.ny)
    }

    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        (
            [self.grid.x0, self.grid.y0],
            [
                self.grid.x0 + self.grid.cell_w * self.grid.nx as f64,
                self.grid.y0 + self.grid.cell_h * self.grid.ny as f64,
            ],
        )
    }

    pub fn grid(&self) -> &RasterGrid {
        &self.grid
    }

    pub fn cell_area(&self) -> f64 {
        self.grid.cell_area()
    }

    pub fn multiplicity(&self, ix: usize, iy: usize) -> u32 {
        self.multiplicity[iy * self.grid.nx + ix]
    }

    pub fn covered(&self, ix: usize, iy: usize) -> bool {
        self.multiplicity(ix, iy) > 0
    }

    pub fn covered_cells(&self) -> usize {
        self.multiplicity.iter().filter(|&&m| m > 0).count()
    }

    /// `Σ n_Φ · cell_area`, the raster side of the area formula.
    pub fn multiplicity_integral(&self) -> f64 {
        self.multiplicity.iter().map(|&m| m as f64).sum::<f64>() * self.grid.cell_area()
    }

    pub fn histogram(&self) -> Vec<(u32, u64)> {
        let mut map = std::collections::BTreeMap::new();
        for &m in &self.multiplicity {
            *map.entry(m).or_insert(0u64) += 1;
        }
        map.into_iter().collect()
    }

    /// Binary PGM, multiplicity scaled into gray levels.
    pub fn write_pgm(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let max = self.multiplicity.iter().cloned().max().unwrap_or(0).max(1);
        writeln!(out, "P5")?;
        writeln!(out, "{} {}", self.grid.nx, self.grid.ny)?;
        writeln!(out, "255")?;
        let mut row = Vec::with_capacity(self.grid.nx);
        // top row first
        for iy in (0..self.grid.ny).rev() {
            row.clear();
            for ix in 0..self.grid.nx {
                let m = self.multiplicity[iy * self.grid.nx + ix] as u64;
                row.push(((m * 255) / max as u64) as u8);
            }
            out.write_all(&row)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> ImageJson {
        let (lo, hi) = self.bounds();
        ImageJson {
            bounds: [lo[0], lo[1], hi[0], hi[1]],
            resolution: [self.grid.nx, self.grid.ny],
            covered_cells: self.covered_cells(),
            multiplicity_histogram: self.histogram(),
        }
    }
}

/// Rasterize the image of `Φ = (F, G)`: multiplicity counts mesh cells
/// whose image hull contains a raster cell center; hulls too thin to
/// catch a center stamp their outline instead.
pub fn rasterize(
    mesh: &SurfaceMesh,
    f: &ScalarField,
    g: &ScalarField,
    resolution: (usize, usize),
) -> Result<MomentMapImage> {
    if f.key() != mesh.key() || g.key() != mesh.key() {
        return Err(Error::MeshMismatch);
    }
    for n in [resolution.0, resolution.1] {
        if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&n) {
            return Err(Error::ResolutionOutOfRange(n, MIN_RESOLUTION, MAX_RESOLUTION));
        }
    }
    let (f_lo, f_hi) = (f.min(), f.max());
    let (g_lo, g_hi) = (g.min(), g.max());
    let pad = |lo: f64, hi: f64| -> (f64, f64) {
        let span = (hi - lo).max(1e-9 * (1.0 + lo.abs() + hi.abs())).max(1e-300);
        (lo - 0.02 * span, hi + 0.02 * span)
    };
    let (x0, x1) = pad(f_lo, f_hi);
    let (y0, y1) = pad(g_lo, g_hi);
    let grid = RasterGrid::new([x0, y0], [x1, y1], resolution.0, resolution.1);
    let mut multiplicity = vec![0u32; resolution.0 * resolution.1];
    let mut thin = vec![false; resolution.0 * resolution.1];

    let fv = f.values();
    let gv = g.values();
    let image = |v: usize| [fv[v], gv[v]];
    for face in 0..mesh.face_count() {
        let corners = mesh.face_vertices(face);
        let pts: Vec<[f64; 2]> = corners.iter().map(|&v| image(v)).collect();
        let hull = geom::convex_hull(&pts);
        geom::stamp_hull(&grid, &hull, &mut multiplicity, &mut thin);
    }
    if mesh.topology() == Topology::Sphere {
        // implicit polar caps: the extreme rows bound two more cells
        for row in [0, mesh.n_u() - 1] {
            let pts: Vec<[f64; 2]> =
                (0..mesh.n_v()).map(|j| image(mesh.index(row, j))).collect();
            let hull = geom::convex_hull(&pts);
            geom::stamp_hull(&grid, &hull, &mut multiplicity, &mut thin);
        }
    }
    for (m, &t) in multiplicity.iter_mut().zip(&thin) {
        if t && *m == 0 {
            *m = 1;
        }
    }
    Ok(MomentMapImage { grid, multiplicity })
}

/// The isosceles right triangle of Π: vertices `(ζF, ζG)`,
/// `(ζF, ζ(F+G)−ζF)`, `(ζ(F+G)−ζG, ζG)`.
#[derive(Debug, Clone, Serialize)]
pub struct PiTriangle {
    pub vertices: [[f64; 2]; 3],
    /// signed defect ζ(F+G) − ζ(F) − ζ(G); the legs have length |defect|
    pub defect: f64,
}

impl PiTriangle {
    pub fn from_zetas(zf: f64, zg: f64, zfg: f64) -> PiTriangle {
        PiTriangle {
            vertices: [[zf, zg], [zf, zfg - zf], [zfg - zg, zg]],
            defect: zfg - zf - zg,
        }
    }

    pub fn leg_length(&self) -> f64 {
        self.defect.abs()
    }

    pub fn is_degenerate(&self) -> bool {
        self.defect == 0.0
    }
}

pub fn pi_triangle(
    qs: &QuasiState,
    mesh: &SurfaceMesh,
    f: &ScalarField,
    g: &ScalarField,
) -> Result<PiTriangle> {
    let zf = zeta(qs, mesh, f)?;
    let zg = zeta(qs, mesh, g)?;
    let zfg = zeta(qs, mesh, &f.add(g)?)?;
    Ok(PiTriangle::from_zetas(zf, zg, zfg))
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageReport {
    pub margin: f64,
    pub interior_cells: usize,
    pub covered_cells: usize,
    pub fraction: f64,
    pub vacuous: bool,
}

/// Fraction of raster centers inside the margin-shrunk triangle that
/// are covered; the containment theorem predicts 1.
pub fn check_triangle_coverage(
    img: &MomentMapImage,
    tri: &PiTriangle,
    margin: f64,
) -> CoverageReport {
    let [a, b, c] = tri.vertices;
    let area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if area2 == 0.0 {
        return CoverageReport {
            margin,
            interior_cells: 0,
            covered_cells: 0,
            fraction: 1.0,
            vacuous: true,
        };
    }
    let orient = area2.signum();
    let edges = [(a, b), (b, c), (c, a)];
    let inside = |p: [f64; 2]| -> bool {
        edges.iter().all(|&(s, t)| {
            let len = ((t[0] - s[0]).powi(2) + (t[1] - s[1]).powi(2)).sqrt();
            let cr = (t[0] - s[0]) * (p[1] - s[1]) - (t[1] - s[1]) * (p[0] - s[0]);
            orient * cr / len >= margin
        })
    };
    let mut interior = 0usize;
    let mut covered = 0usize;
    let grid = img.grid();
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            if inside(grid.center(ix, iy)) {
                interior += 1;
                if img.covered(ix, iy) {
                    covered += 1;
                }
            }
        }
    }
    if interior == 0 {
        return CoverageReport {
            margin,
            interior_cells: 0,
            covered_cells: 0,
            fraction: 1.0,
            vacuous: true,
        };
    }
    CoverageReport {
        margin,
        interior_cells: interior,
        covered_cells: covered,
        fraction: covered as f64 / interior as f64,
        vacuous: false,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicityReport {
    pub interior_cells: usize,
    pub fraction_multiplicity_ge2: f64,
    pub raster_integral: f64,
    pub bracket_l1: f64,
    pub relative_gap: f64,
    pub vacuous: bool,
}

/// Double-cover and area-formula consistency: inside the triangle the
/// multiplicity should be at least 2, and `Σ n_Φ · cell_area` should
/// match `∫ |{F,G}| ω` computed from the bracket.
pub fn multiplicity_check(
    form: &AreaForm,
    img: &MomentMapImage,
    bracket: &BracketField,
    tri: &PiTriangle,
) -> MultiplicityReport {
    let margin = 2.0 * img.grid().cell_diagonal();
    let l1 = bracket_l1(form, bracket);
    let integral = img.multiplicity_integral();
    let relative_gap = if l1 > 0.0 { (integral - l1).abs() / l1 } else { f64::NAN };

    let [a, b, c] = tri.vertices;
    let area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if area2 == 0.0 {
        return MultiplicityReport {
            interior_cells: 0,
            fraction_multiplicity_ge2: 1.0,
            raster_integral: integral,
            bracket_l1: l1,
            relative_gap,
            vacuous: true,
        };
    }
    let orient = area2.signum();
    let edges = [(a, b), (b, c), (c, a)];
    let inside = |p: [f64; 2]| -> bool {
        edges.iter().all(|&(s, t)| {
            let len = ((t[0] - s[0]).powi(2) + (t[1] - s[1]).powi(2)).sqrt();
            let cr = (t[0] - s[0]) * (p[1] - s[1]) - (t[1] - s[1]) * (p[0] - s[0]);
            orient * cr / len >= margin
        })
    };
    let grid = img.grid();
    let mut interior = 0usize;
    let mut deep = 0usize;
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            if inside(grid.center(ix, iy)) {
                interior += 1;
                if img.multiplicity(ix, iy) >= 2 {
                    deep += 1;
                }
            }
        }
    }
    MultiplicityReport {
        interior_cells: interior,
        fraction_multiplicity_ge2: if interior == 0 { 1.0 } else { deep as f64 / interior as f64 },
        raster_integral: integral,
        bracket_l1: l1,
        relative_gap,
        vacuous: interior == 0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ImageJson {
    pub bounds: [f64; 4],
    pub resolution: [usize; 2],
    pub covered_cells: usize,
    pub multiplicity_histogram: Vec<(u32, u64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_sphere_grid, build_torus_grid};

    #[test]
    fn constant_pair_covers_single_cell() {
        let mesh = build_torus_grid(8, 8, 1.0).unwrap();
        let f = mesh.constant(0.0);
        let g = mesh.constant(0.0);
        let img = rasterize(&mesh, &f, &g, (16, 16)).unwrap();
        assert_eq!(img.covered_cells(), 1);
        let (ix, iy) = img.grid().cell_of([0.0, 0.0]);
        assert!(img.covered(ix, iy));
    }

    #[test]
    fn resolution_validation() {
        let mesh = build_torus_grid(8, 8, 1.0).unwrap();
        let f = mesh.constant(0.0);
        assert!(matches!(
            rasterize(&mesh, &f, &f, (8, 64)),
            Err(Error::ResolutionOutOfRange(8, _, _))
        ));
    }

    #[test]
    fn diagonal_is_one_cell_thick() {
        let mesh = build_torus_grid(64, 64, 1.0).unwrap();
        let f = mesh.sample_str("u").unwrap();
        let img = rasterize(&mesh, &f, &f, (64, 64)).unwrap();
        let grid = img.grid();
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                if img.covered(ix, iy) {
                    let c = grid.center(ix, iy);
                    assert!(
                        (c[0] - c[1]).abs() <= 1.5 * grid.cell_w.max(grid.cell_h),
                        "covered off-diagonal cell at {c:?}"
                    );
                }
            }
        }
        // the diagonal chain itself is covered
        let covered = img.covered_cells();
        assert!(covered >= 60, "got {covered}");
    }

    #[test]
    fn chart_identity_multiplicity_is_about_one() {
        let mesh = build_torus_grid(64, 64, 1.0).unwrap();
        let f = mesh.sample_str("u").unwrap();
        let g = mesh.sample_str("v").unwrap();
        let img = rasterize(&mesh, &f, &g, (64, 64)).unwrap();
        let mut ones = 0usize;
        let mut covered = 0usize;
        let mut total_mult = 0u64;
        for iy in 0..64 {
            for ix in 0..64 {
                let m = img.multiplicity(ix, iy);
                if m > 0 {
                    covered += 1;
                    total_mult += m as u64;
                    if m == 1 {
                        ones += 1;
                    }
                }
            }
        }
        // wrap strips of the chart inflate a band of cells; the bulk is 1
        assert!(ones as f64 >= 0.85 * covered as f64, "{ones}/{covered}");
        assert!((total_mult as f64 / covered as f64) < 1.25);
    }

    #[test]
    fn x2_y2_image_is_the_standard_triangle() {
        let mesh = build_sphere_grid(128, 256, 1.0).unwrap();
        let f = mesh.sample_str("x^2").unwrap();
        let g = mesh.sample_str("y^2").unwrap();
        let img = rasterize(&mesh, &f, &g, (128, 128)).unwrap();
        let grid = img.grid();
        let mut outside_covered = 0usize;
        let mut inside_missed = 0usize;
        let fuzz = 3.0 * grid.cell_diagonal();
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let [a, b] = grid.center(ix, iy);
                let inside_deep = a >= fuzz && b >= fuzz && a + b <= 1.0 - fuzz;
                let outside_far = a < -fuzz || b < -fuzz || a + b > 1.0 + fuzz;
                if img.covered(ix, iy) && outside_far {
                    outside_covered += 1;
                }
                if !img.covered(ix, iy) && inside_deep {
                    inside_missed += 1;
                }
            }
        }
        assert_eq!(outside_covered, 0, "image leaked outside the triangle");
        assert_eq!(inside_missed, 0, "triangle interior not fully covered");
    }

    #[test]
    fn triangle_legs_equal_defect() {
        let tri = PiTriangle::from_zetas(0.1, -0.2, 0.9);
        let [v1, v2, v3] = tri.vertices;
        let leg1 = ((v2[0] - v1[0]).powi(2) + (v2[1] - v1[1]).powi(2)).sqrt();
        let leg2 = ((v3[0] - v1[0]).powi(2) + (v3[1] - v1[1]).powi(2)).sqrt();
        assert!((leg1 - tri.leg_length()).abs() < 1e-15);
        assert!((leg2 - tri.leg_length()).abs() < 1e-15);
        assert!((tri.leg_length() - 1.0).abs() < 1e-15);
        assert!(!tri.is_degenerate());
        assert!(PiTriangle::from_zetas(0.3, 0.4, 0.7).is_degenerate());
    }

    #[test]
    fn degenerate_triangle_coverage_is_vacuous() {
        let mesh = build_torus_grid(8, 8, 1.0).unwrap();
        let f = mesh.constant(0.0);
        let img = rasterize(&mesh, &f, &f, (16, 16)).unwrap();
        let tri = PiTriangle::from_zetas(0.0, 0.0, 0.0);
        let rep = check_triangle_coverage(&img, &tri, 0.05);
        assert!(rep.vacuous);
        assert_eq!(rep.fraction, 1.0);
    }

    #[test]
    fn pgm_output_shape() {
        let mesh = build_torus_grid(8, 8, 1.0).unwrap();
        let f = mesh.sample_str("u").unwrap();
        let img = rasterize(&mesh, &f, &f, (16, 16)).unwrap();
        let mut buf = Vec::new();
        img.write_pgm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n16 16\n255\n"));
        assert_eq!(buf.len(), b"P5\n16 16\n255\n".len() + 256);
        let mut buf2 = Vec::new();
        img.write_pgm(&mut buf2).unwrap();
        assert_eq!(buf, buf2, "deterministic bytes");
    }
}
