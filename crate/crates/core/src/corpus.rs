//! Seeded corpora of random smooth trig fields, generated as expression
//! text so every value in a report is reproducible from the seed alone.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::mesh::{ScalarField, SurfaceMesh, Topology};

pub fn corpus_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

/// One random trig combination as expression text, frequencies up to
/// `k_max`. Sphere fields are trig functions of linear forms in the
/// embedding; torus fields are trig polynomials in the chart.
pub fn random_expr(rng: &mut ChaCha8Rng, topology: Topology, k_max: usize) -> String {
    let terms = 4;
    let mut parts: Vec<String> = Vec::with_capacity(terms);
    for _ in 0..terms {
        let coef: f64 = rng.gen_range(-1.0..1.0);
        let func = if rng.gen_bool(0.5) { "sin" } else { "cos" };
        match topology {
            Topology::Sphere => {
                let k = rng.gen_range(1..=k_max) as f64;
                let mut dir = [0.0f64; 3];
                loop {
                    for d in dir.iter_mut() {
                        *d = rng.gen_range(-1.0..1.0);
                    }
                    let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
                    if norm > 0.1 {
                        for d in dir.iter_mut() {
                            *d /= norm;
                        }
                        break;
                    }
                }
                parts.push(format!(
                    "{} * {func}({} * ({} * x + {} * y + {} * z))",
                    fmt(coef),
                    fmt(k),
                    fmt(dir[0]),
                    fmt(dir[1]),
                    fmt(dir[2])
                ));
            }
            Topology::Torus => {
                let km = k_max as i64;
                let (mut k1, mut k2) = (0i64, 0i64);
                while k1 == 0 && k2 == 0 {
                    k1 = rng.gen_range(-km..=km);
                    k2 = rng.gen_range(-km..=km);
                }
                let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                parts.push(format!(
                    "{} * {func}(2 * pi * ({k1} * u + {k2} * v) + {})",
                    fmt(coef),
                    fmt(phase)
                ));
            }
        }
    }
    parts.join(" + ")
}

/// Random field sup-normalized to 1 on the grid; the generator
/// expression bakes the normalizer in, so resampling it reproduces the
/// exact values.
pub fn random_normalized_field(
    mesh: &SurfaceMesh,
    rng: &mut ChaCha8Rng,
    k_max: usize,
) -> Result<ScalarField> {
    loop {
        let raw = random_expr(rng, mesh.topology(), k_max);
        let field = mesh.sample_str(&raw)?;
        let sup = field.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sup < 1e-9 {
            continue;
        }
        let normalized = format!("({raw}) / {}", fmt(sup));
        return mesh.sample_str(&normalized);
    }
}

pub fn random_pair(
    mesh: &SurfaceMesh,
    rng: &mut ChaCha8Rng,
    k_max: usize,
) -> Result<(ScalarField, ScalarField)> {
    let f = random_normalized_field(mesh, rng, k_max)?;
    let g = random_normalized_field(mesh, rng, k_max)?;
    Ok((f, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_sphere_grid, build_torus_grid};

    #[test]
    fn corpus_is_reproducible() {
        let mesh = build_sphere_grid(16, 16, 1.0).unwrap();
        let a = random_normalized_field(&mesh, &mut corpus_rng(42), 3).unwrap();
        let b = random_normalized_field(&mesh, &mut corpus_rng(42), 3).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.generator(), b.generator());
        let c = random_normalized_field(&mesh, &mut corpus_rng(43), 3).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn corpus_fields_are_sup_normalized() {
        let mesh = build_torus_grid(24, 24, 1.0).unwrap();
        let mut rng = corpus_rng(7);
        for _ in 0..5 {
            let f = random_normalized_field(&mesh, &mut rng, 3).unwrap();
            let sup = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!((sup - 1.0).abs() < 1e-12, "sup {sup}");
        }
    }

    #[test]
    fn generator_resamples_to_identical_values() {
        let mesh = build_sphere_grid(16, 32, 1.0).unwrap();
        let f = random_normalized_field(&mesh, &mut corpus_rng(9), 2).unwrap();
        let again = mesh.sample_str(f.generator().unwrap()).unwrap();
        assert_eq!(f.values(), again.values());
    }
}
