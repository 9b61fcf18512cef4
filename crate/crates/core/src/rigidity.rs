//! Numerical probes of the `C⁰` rigidity of the Poisson bracket:
//! a constrained perturbation search that tries to push `‖{F′,G′}‖`
//! below `‖{F,G}‖`, a coverage harness for δ-perturbations of the
//! identity on a disk, and a local stability probe around a canonical
//! bracket-one pair.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{self, RasterGrid};
use crate::mesh::{ScalarField, SurfaceMesh, Topology};
use crate::symplectic::{bracket_values_into, sup_abs, AreaForm};

/// Search setup for the Υ upper-bound estimator.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbationProblem {
    pub epsilon: f64,
    pub k_max: usize,
    pub budget: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpsilonEstimate {
    pub epsilon: f64,
    pub base_norm: f64,
    pub best_norm: f64,
    pub best_a: Vec<f64>,
    pub best_b: Vec<f64>,
    pub iterations_used: usize,
}

/// Low-frequency perturbation basis, sup-normalized to 1 on the grid.
/// Torus: sines and cosines of `2π(k₁u + k₂v)` up to the cutoff.
/// Sphere: embedding monomials up to the cutoff degree.
pub fn trig_modes(mesh: &SurfaceMesh, k_max: usize) -> Vec<Vec<f64>> {
    let n = mesh.vertex_count();
    let mut modes: Vec<Vec<f64>> = Vec::new();
    match mesh.topology() {
        Topology::Torus => {
            let km = k_max as i64;
            for k1 in 0..=km {
                for k2 in -km..=km {
                    if k1 == 0 && k2 <= 0 {
                        continue;
                    }
                    let mut s = Vec::with_capacity(n);
                    let mut c = Vec::with_capacity(n);
                    for idx in 0..n {
                        let [u, v] = mesh.param(idx);
                        let phase = std::f64::consts::TAU * (k1 as f64 * u + k2 as f64 * v);
                        s.push(phase.sin());
                        c.push(phase.cos());
                    }
                    modes.push(s);
                    modes.push(c);
                }
            }
        }
        Topology::Sphere => {
            for total in 1..=k_max {
                for a in 0..=total {
                    for b in 0..=(total - a) {
                        let c = total - a - b;
                        let mut vals = Vec::with_capacity(n);
                        for idx in 0..n {
                            let [x, y, z] = mesh.position(idx);
                            vals.push(x.powi(a as i32) * y.powi(b as i32) * z.powi(c as i32));
                        }
                        modes.push(vals);
                    }
                }
            }
        }
    }
    for m in &mut modes {
        let sup = sup_abs(m);
        if sup > 0.0 {
            for v in m.iter_mut() {
                *v /= sup;
            }
        }
    }
    modes
}

/// Rebuild the perturbation field a coefficient vector describes.
pub fn perturbation_field(mesh: &SurfaceMesh, k_max: usize, coeffs: &[f64]) -> Result<ScalarField> {
    let modes = trig_modes(mesh, k_max);
    assert_eq!(modes.len(), coeffs.len(), "coefficient count != mode count");
    let mut vals = vec![0.0; mesh.vertex_count()];
    for (c, m) in coeffs.iter().zip(&modes) {
        for (o, v) in vals.iter_mut().zip(m) {
            *o += c * v;
        }
    }
    mesh.field_from_values(vals)
}

struct Objective<'a> {
    form: &'a AreaForm,
    mesh: &'a SurfaceMesh,
    f0: &'a [f64],
    g0: &'a [f64],
    modes: &'a [Vec<f64>],
    epsilon: f64,
    fp: Vec<f64>,
    gp: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> Objective<'a> {
    /// Bracket sup norm of the perturbed pair, `None` when a C⁰
    /// constraint is violated.
    fn eval(&mut self, pert_f: &[f64], pert_g: &[f64]) -> Option<f64> {
        if sup_abs(pert_f) >= self.epsilon || sup_abs(pert_g) >= self.epsilon {
            return None;
        }
        self.fp.clear();
        self.fp.extend(self.f0.iter().zip(pert_f).map(|(a, b)| a + b));
        self.gp.clear();
        self.gp.extend(self.g0.iter().zip(pert_g).map(|(a, b)| a + b));
        bracket_values_into(self.form, self.mesh, &self.fp, &self.gp, &mut self.scratch);
        Some(sup_abs(&self.scratch))
    }

    fn combine(&self, coeffs: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (c, m) in coeffs.iter().zip(self.modes) {
            if *c != 0.0 {
                for (o, v) in out.iter_mut().zip(m) {
                    *o += c * v;
                }
            }
        }
    }
}

/// Seeded multi-start coordinate descent minimizing `‖{F′,G′}‖∞` over
/// trig perturbations inside the C⁰ budget. The zero perturbation is
/// always a candidate, so the result never exceeds the base norm; with
/// a zero budget it equals the base norm exactly.
pub fn upsilon_search(
    form: &AreaForm,
    mesh: &SurfaceMesh,
    f: &ScalarField,
    g: &ScalarField,
    p: &PerturbationProblem,
) -> Result<UpsilonEstimate> {
    upsilon_search_warm(form, mesh, f, g, p, None)
}

pub fn upsilon_search_warm(
    form: &AreaForm,
    mesh: &SurfaceMesh,
    f: &ScalarField,
    g: &ScalarField,
    p: &PerturbationProblem,
    warm: Option<(&[f64], &[f64])>,
) -> Result<UpsilonEstimate> {
    if f.key() != mesh.key() || g.key() != mesh.key() || form.key() != mesh.key() {
        return Err(Error::MeshMismatch);
    }
    if !(p.epsilon > 0.0) {
        return Err(Error::BadEpsilon(p.epsilon));
    }
    let modes = trig_modes(mesh, p.k_max);
    let dim = modes.len();
    let n = mesh.vertex_count();
    let mut obj = Objective {
        form,
        mesh,
        f0: f.values(),
        g0: g.values(),
        modes: &modes,
        epsilon: p.epsilon,
        fp: Vec::with_capacity(n),
        gp: Vec::with_capacity(n),
        scratch: Vec::with_capacity(n),
    };
    let zero = vec![0.0; n];
    let base_norm = obj.eval(&zero, &zero).expect("zero perturbation is feasible");

    let mut best_norm = base_norm;
    let mut best_a = vec![0.0; dim];
    let mut best_b = vec![0.0; dim];
    let mut evals = 0usize;
    if p.budget == 0 {
        return Ok(UpsilonEstimate {
            epsilon: p.epsilon,
            base_norm,
            best_norm,
            best_a,
            best_b,
            iterations_used: 0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut pert_f = vec![0.0; n];
    let mut pert_g = vec![0.0; n];
    let mut starts: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    if let Some((wa, wb)) = warm {
        starts.push((wa.to_vec(), wb.to_vec()));
    }

    'outer: while evals < p.budget {
        let (mut a, mut b) = if let Some(s) = starts.pop() {
            s
        } else {
            let mut a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let ua: f64 = rng.gen_range(0.2..0.9);
            let ub: f64 = rng.gen_range(0.2..0.9);
            obj.combine(&a, &mut pert_f);
            obj.combine(&b, &mut pert_g);
            let (sa, sb) = (sup_abs(&pert_f), sup_abs(&pert_g));
            if sa > 0.0 {
                let s = p.epsilon * ua / sa;
                a.iter_mut().for_each(|c| *c *= s);
            }
            if sb > 0.0 {
                let s = p.epsilon * ub / sb;
                b.iter_mut().for_each(|c| *c *= s);
            }
            (a, b)
        };
        obj.combine(&a, &mut pert_f);
        obj.combine(&b, &mut pert_g);
        let mut current = match obj.eval(&pert_f, &pert_g) {
            Some(v) => {
                evals += 1;
                v
            }
            None => continue,
        };
        if current < best_norm {
            best_norm = current;
            best_a.copy_from_slice(&a);
            best_b.copy_from_slice(&b);
        }
        let mut step = p.epsilon / 4.0;
        while step > p.epsilon / 256.0 {
            let mut improved = false;
            for coord in 0..2 * dim {
                for dir in [1.0f64, -1.0] {
                    if evals >= p.budget {
                        break 'outer;
                    }
                    let j = coord % dim;
                    let delta = dir * step;
                    let apply = |amount: f64,
                                 a: &mut [f64],
                                 b: &mut [f64],
                                 pert_f: &mut [f64],
                                 pert_g: &mut [f64]| {
                        if coord < dim {
                            a[j] += amount;
                            for (o, v) in pert_f.iter_mut().zip(&modes[j]) {
                                *o += amount * v;
                            }
                        } else {
                            b[j] += amount;
                            for (o, v) in pert_g.iter_mut().zip(&modes[j]) {
                                *o += amount * v;
                            }
                        }
                    };
                    apply(delta, &mut a, &mut b, &mut pert_f, &mut pert_g);
                    let val = obj.eval(&pert_f, &pert_g);
                    let accept = match val {
                        Some(v) => {
                            evals += 1;
                            v < current
                        }
                        None => false,
                    };
                    if accept {
                        current = val.unwrap();
                        if current < best_norm {
                            best_norm = current;
                            best_a.copy_from_slice(&a);
                            best_b.copy_from_slice(&b);
                        }
                        improved = true;
                        break;
                    } else {
                        apply(-delta, &mut a, &mut b, &mut pert_f, &mut pert_g);
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }

    Ok(UpsilonEstimate {
        epsilon: p.epsilon,
        base_norm,
        best_norm,
        best_a,
        best_b,
        iterations_used: evals,
    })
}

/// Best-found norm for each ε, ascending, warm-starting each search from
/// the previous optimum so the curve is non-increasing by construction.
pub fn upsilon_curve(
    form: &AreaForm,
    mesh: &SurfaceMesh,
    f: &ScalarField,
    g: &ScalarField,
    epsilons: &[f64],
    k_max: usize,
    budget: usize,
    seed: u64,
) -> Result<Vec<UpsilonEstimate>> {
    let mut eps: Vec<f64> = epsilons.to_vec();
    eps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<UpsilonEstimate> = Vec::new();
    for (i, &e) in eps.iter().enumerate() {
        let p = PerturbationProblem { epsilon: e, k_max, budget, seed: seed.wrapping_add(i as u64) };
        let warm = out.last().map(|prev| (prev.best_a.as_slice(), prev.best_b.as_slice()));
        out.push(upsilon_search_warm(form, mesh, f, g, &p, warm)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCoverageReport {
    pub r: f64,
    pub delta: f64,
    pub grid: usize,
    pub trials: usize,
    pub passes: usize,
    pub pass_fraction: f64,
}

/// Rasterize the image of a map on the closed disk of radius `r`: cells
/// of an n×n grid over the disk are pushed through `map` and their image
/// hulls stamped onto an n×n raster over `[−bound, bound]²`.
pub fn rasterize_disk_map(
    r: f64,
    bound: f64,
    grid_n: usize,
    map: impl Fn([f64; 2]) -> [f64; 2],
) -> (RasterGrid, Vec<bool>) {
    let raster = RasterGrid::new([-bound, -bound], [bound, bound], grid_n, grid_n);
    let mut count = vec![0u32; grid_n * grid_n];
    let mut thin = vec![false; grid_n * grid_n];
    let h = 2.0 * r / grid_n as f64;
    let corner = |i: usize, j: usize| [-r + i as f64 * h, -r + j as f64 * h];
    let in_disk = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1] <= r * r;
    for i in 0..grid_n {
        for j in 0..grid_n {
            let quad = [corner(i, j), corner(i + 1, j), corner(i, j + 1), corner(i + 1, j + 1)];
            if !quad.iter().all(|&p| in_disk(p)) {
                continue;
            }
            let images: Vec<[f64; 2]> = quad.iter().map(|&p| map(p)).collect();
            let hull = geom::convex_hull(&images);
            geom::stamp_hull(&raster, &hull, &mut count, &mut thin);
        }
    }
    let covered = count.iter().zip(&thin).map(|(&c, &t)| c > 0 || t).collect();
    (raster, covered)
}

/// Every raster center within `radius` of the origin is covered.
pub fn disk_fully_covered(grid: &RasterGrid, covered: &[bool], radius: f64) -> bool {
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let c = grid.center(ix, iy);
            if c[0] * c[0] + c[1] * c[1] <= radius * radius && !covered[iy * grid.nx + ix] {
                return false;
            }
        }
    }
    true
}

/// Random smooth δ-perturbations of the identity on the disk of radius
/// `r`: each trial checks that the image covers `B(r − δ)` up to raster
/// fuzz of two cell diagonals.
pub fn perturbed_identity_coverage(
    r: f64,
    delta: f64,
    trials: usize,
    seed: u64,
    grid_n: usize,
) -> IdentityCoverageReport {
    assert!(trials >= 1, "at least one trial");
    assert!(delta > 0.0 && delta < r, "delta in (0, r)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // low-frequency displacement basis on the square [−r, r]²
    let mut wavevecs: Vec<(f64, f64)> = Vec::new();
    for k in 0..=3i32 {
        for l in 0..=3i32 {
            if k == 0 && l == 0 {
                continue;
            }
            wavevecs.push((k as f64, l as f64));
        }
    }
    let mut passes = 0usize;
    for _ in 0..trials {
        let mut coef: Vec<[f64; 4]> = Vec::with_capacity(wavevecs.len());
        for _ in 0..wavevecs.len() {
            coef.push([
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ]);
        }
        let displacement = |p: [f64; 2], coef: &[[f64; 4]]| -> [f64; 2] {
            let mut d = [0.0f64; 2];
            for (m, &(k, l)) in wavevecs.iter().enumerate() {
                let phase = std::f64::consts::PI * (k * p[0] + l * p[1]) / (2.0 * r);
                let (s, c) = phase.sin_cos();
                d[0] += coef[m][0] * s + coef[m][1] * c;
                d[1] += coef[m][2] * s + coef[m][3] * c;
            }
            d
        };
        // rescale so the sup of the Euclidean displacement sits just
        // under the budget
        let h = 2.0 * r / grid_n as f64;
        let mut sup = 0.0f64;
        for i in 0..=grid_n {
            for j in 0..=grid_n {
                let p = [-r + i as f64 * h, -r + j as f64 * h];
                if p[0] * p[0] + p[1] * p[1] > r * r {
                    continue;
                }
                let d = displacement(p, &coef);
                sup = sup.max((d[0] * d[0] + d[1] * d[1]).sqrt());
            }
        }
        let scale = if sup > 0.0 { 0.999 * delta / sup } else { 0.0 };
        let map = |p: [f64; 2]| {
            let d = displacement(p, &coef);
            [p[0] + scale * d[0], p[1] + scale * d[1]]
        };
        let (raster, covered) = rasterize_disk_map(r, r + delta, grid_n, map);
        let target = r - delta - 2.0 * raster.cell_diagonal();
        if disk_fully_covered(&raster, &covered, target) {
            passes += 1;
        }
    }
    IdentityCoverageReport {
        r,
        delta,
        grid: grid_n,
        trials,
        passes,
        pass_fraction: passes as f64 / trials as f64,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    pub threshold: f64,
    pub max_brackets: Vec<f64>,
    pub passes: usize,
}

/// Perturb a bracket-one pair within δ in C⁰ and record the maximum of
/// `{F,G}` over the probe region (parameters in `[0.3, 0.7]²`); local
/// stability predicts it stays above `1 − ε` for δ small.
pub fn local_stability_probe(
    form: &AreaForm,
    mesh: &SurfaceMesh,
    f0: &ScalarField,
    g0: &ScalarField,
    epsilon: f64,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport> {
    if f0.key() != mesh.key() || g0.key() != mesh.key() || form.key() != mesh.key() {
        return Err(Error::MeshMismatch);
    }
    let probe: Vec<usize> = (0..mesh.vertex_count())
        .filter(|&idx| {
            let [u, v] = mesh.param(idx);
            (0.3..=0.7).contains(&u) && (0.3..=0.7).contains(&v)
        })
        .collect();
    let mut scratch = Vec::new();
    bracket_values_into(form, mesh, f0.values(), g0.values(), &mut scratch);
    let base_max = probe.iter().map(|&i| scratch[i]).fold(f64::NEG_INFINITY, f64::max);
    if base_max < 1.0 - 1e-9 {
        return Err(Error::ProbePrecondition(base_max));
    }
    let modes = trig_modes(mesh, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = mesh.vertex_count();
    let threshold = 1.0 - epsilon;
    let mut max_brackets = Vec::with_capacity(trials);
    let mut passes = 0usize;
    for _ in 0..trials {
        let mut df = vec![0.0; n];
        let mut dg = vec![0.0; n];
        for m in &modes {
            let (cf, cg): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for i in 0..n {
                df[i] += cf * m[i];
                dg[i] += cg * m[i];
            }
        }
        for d in [&mut df, &mut dg] {
            let sup = sup_abs(d);
            let scale = if sup > 0.0 && delta > 0.0 { 0.999 * delta / sup } else { 0.0 };
            d.iter_mut().for_each(|v| *v *= scale);
        }
        let fv: Vec<f64> = f0.values().iter().zip(&df).map(|(a, b)| a + b).collect();
        let gv: Vec<f64> = g0.values().iter().zip(&dg).map(|(a, b)| a + b).collect();
        bracket_values_into(form, mesh, &fv, &gv, &mut scratch);
        let m = probe.iter().map(|&i| scratch[i]).fold(f64::NEG_INFINITY, f64::max);
        if m > threshold {
            passes += 1;
        }
        max_brackets.push(m);
    }
    Ok(StabilityReport { epsilon, delta, trials, threshold, max_brackets, passes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_torus_grid;
    use crate::symplectic::{bracket_sup_norm, poisson_bracket};

    fn setup() -> (SurfaceMesh, AreaForm, ScalarField, ScalarField) {
        let mesh = build_torus_grid(48, 48, 1.0).unwrap();
        let form = AreaForm::from_mesh(&mesh);
        let f = mesh.sample_str("sin(2*pi*u)").unwrap();
        let g = mesh.sample_str("sin(2*pi*v)").unwrap();
        (mesh, form, f, g)
    }

    #[test]
    fn zero_budget_returns_base_norm_exactly() {
        let (mesh, form, f, g) = setup();
        let p = PerturbationProblem { epsilon: 0.05, k_max: 2, budget: 0, seed: 7 };
        let est = upsilon_search(&form, &mesh, &f, &g, &p).unwrap();
        let b = poisson_bracket(&form, &mesh, &f, &g).unwrap();
        assert_eq!(est.best_norm, bracket_sup_norm(&b));
        assert_eq!(est.iterations_used, 0);
    }

    #[test]
    fn commuting_pair_returns_zero() {
        let mesh = build_torus_grid(32, 32, 1.0).unwrap();
        let form = AreaForm::from_mesh(&mesh);
        let f = mesh.sample_str("sin(2*pi*u)").unwrap();
        let g = mesh.constant(0.4);
        let p = PerturbationProblem { epsilon: 0.01, k_max: 2, budget: 50, seed: 3 };
        let est = upsilon_search(&form, &mesh, &f, &g, &p).unwrap();
        assert_eq!(est.base_norm, 0.0);
        assert_eq!(est.best_norm, 0.0);
    }

    #[test]
    fn search_is_deterministic_and_monotone_in_budget() {
        let (mesh, form, f, g) = setup();
        let p300 = PerturbationProblem { epsilon: 0.05, k_max: 2, budget: 300, seed: 11 };
        let a = upsilon_search(&form, &mesh, &f, &g, &p300).unwrap();
        let b = upsilon_search(&form, &mesh, &f, &g, &p300).unwrap();
        assert_eq!(a.best_norm, b.best_norm);
        assert_eq!(a.best_a, b.best_a);
        let p100 = PerturbationProblem { budget: 100, ..p300.clone() };
        let c = upsilon_search(&form, &mesh, &f, &g, &p100).unwrap();
        assert!(a.best_norm <= c.best_norm);
    }

    #[test]
    fn reported_perturbations_respect_the_budget() {
        let (mesh, form, f, g) = setup();
        let p = PerturbationProblem { epsilon: 0.05, k_max: 2, budget: 400, seed: 5 };
        let est = upsilon_search(&form, &mesh, &f, &g, &p).unwrap();
        let pf = perturbation_field(&mesh, 2, &est.best_a).unwrap();
        let pg = perturbation_field(&mesh, 2, &est.best_b).unwrap();
        let zero = mesh.constant(0.0);
        assert!(crate::mesh::c0_distance(&pf, &zero).unwrap() < p.epsilon + 1e-9);
        assert!(crate::mesh::c0_distance(&pg, &zero).unwrap() < p.epsilon + 1e-9);
        assert!(est.best_norm <= est.base_norm);
    }

    #[test]
    fn curve_is_monotone_in_epsilon() {
        let (mesh, form, f, g) = setup();
        let curve =
            upsilon_curve(&form, &mesh, &f, &g, &[0.02, 0.05, 0.1], 2, 150, 9).unwrap();
        assert_eq!(curve.len(), 3);
        assert!(curve[0].epsilon < curve[1].epsilon);
        assert!(curve[1].best_norm <= curve[0].best_norm);
        assert!(curve[2].best_norm <= curve[1].best_norm);
    }

    #[test]
    fn identity_map_covers_the_disk() {
        let (raster, covered) = rasterize_disk_map(1.0, 1.2, 96, |p| p);
        let fuzz = 2.0 * raster.cell_diagonal();
        assert!(disk_fully_covered(&raster, &covered, 1.0 - 1e-6 - fuzz - 2.0 / 96.0));
    }

    #[test]
    fn radial_contraction_is_sharp() {
        let (r, delta) = (1.0, 0.2);
        let (raster, covered) =
            rasterize_disk_map(r, r + delta, 128, |p| [p[0] * (1.0 - delta / r), p[1] * (1.0 - delta / r)]);
        let fuzz = 2.0 * raster.cell_diagonal();
        // inner ball covered
        assert!(disk_fully_covered(&raster, &covered, r - delta - fuzz - 2.0 / 128.0));
        // and nothing beyond the contracted image plus fuzz
        for iy in 0..raster.ny {
            for ix in 0..raster.nx {
                let c = raster.center(ix, iy);
                let rr = (c[0] * c[0] + c[1] * c[1]).sqrt();
                if rr > r - delta + fuzz {
                    assert!(!covered[iy * raster.nx + ix], "covered at radius {rr}");
                }
            }
        }
    }

    #[test]
    fn stability_probe_with_zero_delta_hits_one() {
        let mesh = build_torus_grid(64, 64, 1.0).unwrap();
        let form = AreaForm::from_mesh(&mesh);
        let f0 = mesh.sample_str("v").unwrap();
        let g0 = mesh.sample_str("u").unwrap();
        let rep =
            local_stability_probe(&form, &mesh, &f0, &g0, 0.2, 0.0, 3, 1).unwrap();
        assert_eq!(rep.passes, 3);
        for m in rep.max_brackets {
            assert!(m >= 1.0);
        }
    }

    #[test]
    fn stability_probe_rejects_commuting_base() {
        let mesh = build_torus_grid(32, 32, 1.0).unwrap();
        let form = AreaForm::from_mesh(&mesh);
        let f0 = mesh.sample_str("u").unwrap();
        let g0 = mesh.constant(1.0);
        assert!(matches!(
            local_stability_probe(&form, &mesh, &f0, &g0, 0.2, 0.01, 2, 1),
            Err(Error::ProbePrecondition(_))
        ));
    }
}
