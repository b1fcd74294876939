//! Ginzburg–Landau energy of a perturbed Hopf map and a finite-difference check of
//! its gradient along a random direction.

use minmax_lab::algebra::Vec3;
use minmax_lab::grid::{S3Grid, SampledMap};
use minmax_lab::spheremaps::{gl_energy, gl_gradient, sample, GLState, MapKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> minmax_lab::Result<()> {
    let g = S3Grid::uniform(16);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut u = sample(&MapKind::Hopf, &g);
    for x in u.data.iter_mut() {
        *x *= 1.0 + 0.1 * rng.gen_range(-1.0..1.0);
    }
    let v: Vec<Vec3> = (0..g.len()).map(|_| Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0))).collect();
    let v = SampledMap::from_vec3(&v);
    for eps in [1.0, 0.3, 0.1] {
        let s = GLState::new(u.clone(), eps)?;
        let grad = gl_gradient(&s, &g)?;
        let pair = g.integrate(&(0..g.len()).map(|i| grad.vec3(i).dot(&v.vec3(i))).collect::<Vec<_>>());
        let at = |t: f64| {
            let d = u.data.iter().zip(&v.data).map(|(a, b)| a + t * b).collect();
            gl_energy(&GLState::new(SampledMap::new(3, d), eps)?, &g)
        };
        let h = 1e-5;
        let fd = (at(h)? - at(-h)?) / (2.0 * h);
        println!("eps {eps:.1}  E {:.8}  <grad, v> {pair:.10}  fd {fd:.10}", gl_energy(&s, &g)?);
    }
    Ok(())
}
