//! Quaternions, bivectors of R^4, the Grassmannian split and the polarization rotations.
//!
//! Vec4 <-> Quat: (x1, x2, x3, x4) <-> w + x i + y j + z k.

use crate::error::{LabError, Result};
use nalgebra::{Matrix3, Matrix4, Quaternion, Vector3, Vector4};
use serde::Serialize;

pub type Vec3 = Vector3<f64>;
pub type Vec4 = Vector4<f64>;
pub type Quat = Quaternion<f64>;

/// Orthonormality tolerance for frame preconditions.
pub const FRAME_TOL: f64 = 1e-10;

pub fn quat(v: &Vec4) -> Quat {
    Quaternion::new(v[0], v[1], v[2], v[3])
}

pub fn vec4(q: &Quat) -> Vec4 {
    Vec4::new(q.w, q.i, q.j, q.k)
}

/// Pure quaternion with imaginary part v.
pub fn pure(v: &Vec3) -> Quat {
    Quaternion::new(0.0, v[0], v[1], v[2])
}

pub fn im(q: &Quat) -> Vec3 {
    Vec3::new(q.i, q.j, q.k)
}

pub fn det4(a: &Vec4, b: &Vec4, c: &Vec4, d: &Vec4) -> f64 {
    Matrix4::from_columns(&[*a, *b, *c, *d]).determinant()
}

/// Vector with components det(a, b, c, e_l); orthogonal to a, b, c.
pub fn cross4(a: &Vec4, b: &Vec4, c: &Vec4) -> Vec4 {
    let m = |l: usize| {
        let r = |v: &Vec4| {
            let mut o = [0.0; 3];
            let mut k = 0;
            for (i, x) in v.iter().enumerate() {
                if i != l {
                    o[k] = *x;
                    k += 1;
                }
            }
            o
        };
        let (x, y, z) = (r(a), r(b), r(c));
        Vec3::from(x).dot(&Vec3::from(y).cross(&Vec3::from(z)))
    };
    // cofactor sign of row l in column 4
    Vec4::new(-m(0), m(1), -m(2), m(3))
}

/// Element of Λ²R⁴ in the basis e12, e13, e14, e23, e24, e34.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bivector4(pub [f64; 6]);

impl Bivector4 {
    pub fn zero() -> Self {
        Bivector4([0.0; 6])
    }

    pub fn dot(&self, o: &Bivector4) -> f64 {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// ⟨B, ⋆B⟩, twice the Pfaffian.
    pub fn pfaffian_pairing(&self) -> f64 {
        self.dot(&hodge(self))
    }

    pub fn add(&self, o: &Bivector4) -> Bivector4 {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(o.0.iter()) {
            *x += y;
        }
        Bivector4(c)
    }

    pub fn scale(&self, s: f64) -> Bivector4 {
        Bivector4(self.0.map(|x| x * s))
    }

    pub fn self_dual(&self) -> Bivector4 {
        self.add(&hodge(self)).scale(0.5)
    }

    pub fn anti_self_dual(&self) -> Bivector4 {
        self.add(&hodge(self).scale(-1.0)).scale(0.5)
    }

    /// Coordinates (plus, minus) in the basis (e12 ± e34, e13 ∓ e24, e14 ± e23), scaled by √2.
    pub fn split(&self) -> (Vec3, Vec3) {
        let b = &self.0;
        (
            Vec3::new(b[0] + b[5], b[1] - b[4], b[2] + b[3]),
            Vec3::new(b[0] - b[5], b[1] + b[4], b[2] - b[3]),
        )
    }
}

pub fn wedge(a: &Vec4, b: &Vec4) -> Bivector4 {
    let w = |i: usize, j: usize| a[i] * b[j] - a[j] * b[i];
    Bivector4([w(0, 1), w(0, 2), w(0, 3), w(1, 2), w(1, 3), w(2, 3)])
}

/// e12 <-> e34, e13 <-> e42, e14 <-> e23.
pub fn hodge(b: &Bivector4) -> Bivector4 {
    let c = &b.0;
    Bivector4([c[5], -c[4], c[3], c[2], -c[1], c[0]])
}

/// Point of Gr₂⁺(R⁴) = S²₊ × S²₋.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrassPoint {
    pub plus: Vec3,
    pub minus: Vec3,
}

impl GrassPoint {
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.plus[0],
            self.plus[1],
            self.plus[2],
            self.minus[0],
            self.minus[1],
            self.minus[2],
        ]
    }

    pub fn dist(&self, o: &GrassPoint) -> f64 {
        (self.plus - o.plus).norm().max((self.minus - o.minus).norm())
    }
}

pub fn frame_residual(a: &Vec4, b: &Vec4) -> f64 {
    (a.norm() - 1.0)
        .abs()
        .max((b.norm() - 1.0).abs())
        .max(a.dot(b).abs())
}

pub fn grass_point(a: &Vec4, b: &Vec4) -> Result<GrassPoint> {
    let r = frame_residual(a, b);
    if r > FRAME_TOL {
        return Err(LabError::NonOrthonormalInput(r));
    }
    Ok(grass_point_unchecked(a, b))
}

/// No frame check; for smooth sampled frames whose orthonormality is asserted elsewhere.
pub fn grass_point_unchecked(a: &Vec4, b: &Vec4) -> GrassPoint {
    let (plus, minus) = wedge(a, b).split();
    GrassPoint { plus, minus }
}

/// Proper rotation of R^3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rotation3(pub Matrix3<f64>);

impl Rotation3 {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let r = Rotation3(m);
        let res = r.orthogonality_residual();
        if res > 1e-12 * 10.0 || (m.determinant() - 1.0).abs() > 1e-10 {
            return Err(LabError::BadParameter(format!(
                "not a rotation (residual {res:.3e}, det {})",
                m.determinant()
            )));
        }
        Ok(r)
    }

    pub fn identity() -> Self {
        Rotation3(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    pub fn compose(&self, o: &Rotation3) -> Rotation3 {
        Rotation3(self.0 * o.0)
    }

    pub fn orthogonality_residual(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).amax()
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }
}

fn check_unit(g: &Quat) -> Result<()> {
    let n = g.norm();
    if (n - 1.0).abs() > FRAME_TOL {
        return Err(LabError::NonUnitQuaternion(n));
    }
    Ok(())
}

/// y ↦ g* y g on imaginary quaternions, in the (i, j, k) basis.
pub fn polar_boundary(g: &Quat) -> Result<Rotation3> {
    check_unit(g)?;
    Ok(polar_unchecked(g))
}

fn polar_unchecked(g: &Quat) -> Rotation3 {
    let gc = g.conjugate();
    let col = |e: Vec3| im(&(gc * pure(&e) * g));
    Rotation3(Matrix3::from_columns(&[
        col(Vec3::x()),
        col(Vec3::y()),
        col(Vec3::z()),
    ]))
}

/// polar_boundary(cos α n + sin α Φ).
pub fn polar_bubble(alpha: f64, phi: &Quat, n: &Quat) -> Result<Rotation3> {
    let r = frame_residual(&vec4(phi), &vec4(n));
    if r > FRAME_TOL {
        return Err(LabError::NonOrthonormalInput(r));
    }
    Ok(polar_unchecked(&(n * alpha.cos() + phi * alpha.sin())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(i: usize) -> Vec4 {
        let mut v = Vec4::zeros();
        v[i] = 1.0;
        v
    }

    fn frame_from(seed: [f64; 8]) -> Option<(Vec4, Vec4)> {
        let a = Vec4::new(seed[0], seed[1], seed[2], seed[3]);
        let b = Vec4::new(seed[4], seed[5], seed[6], seed[7]);
        if a.norm() < 1e-3 {
            return None;
        }
        let a = a.normalize();
        let b = b - a * a.dot(&b);
        if b.norm() < 1e-3 {
            return None;
        }
        Some((a, b.normalize()))
    }

    #[test]
    fn cross4_is_cofactor_vector() {
        let a = Vec4::new(0.3, -1.0, 0.2, 0.7);
        let b = Vec4::new(0.5, 0.1, -0.4, 0.9);
        let c = Vec4::new(-0.2, 0.8, 0.6, 0.1);
        let n = cross4(&a, &b, &c);
        for l in 0..4 {
            assert!((n[l] - det4(&a, &b, &c, &e(l))).abs() < 1e-14);
        }
        assert!(n.dot(&a).abs() < 1e-14 && n.dot(&b).abs() < 1e-14 && n.dot(&c).abs() < 1e-14);
    }

    #[test]
    fn wedge_basis() {
        let b = wedge(&e(0), &e(1));
        assert_eq!(b.0, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(wedge(&e(2), &e(2)).norm(), 0.0);
    }

    #[test]
    fn hodge_basis() {
        assert_eq!(hodge(&wedge(&e(0), &e(1))), wedge(&e(2), &e(3)));
        assert_eq!(hodge(&wedge(&e(0), &e(2))), wedge(&e(3), &e(1)));
        assert_eq!(hodge(&wedge(&e(0), &e(3))), wedge(&e(1), &e(2)));
    }

    #[test]
    fn grass_basis_cases() {
        let p = grass_point(&e(0), &e(1)).unwrap();
        assert_eq!(p.plus, Vec3::x());
        assert_eq!(p.minus, Vec3::x());
        let p = grass_point(&e(2), &e(3)).unwrap();
        assert_eq!(p.plus, Vec3::x());
        assert_eq!(p.minus, -Vec3::x());
        assert!(matches!(
            grass_point(&e(0), &(e(0) + e(1))),
            Err(LabError::NonOrthonormalInput(_))
        ));
    }

    #[test]
    fn grass_plus_is_im_b_conj_a() {
        let (a, b) = frame_from([0.3, -1.0, 0.2, 0.7, 0.5, 0.1, -0.4, 0.9]).unwrap();
        let p = grass_point(&a, &b).unwrap();
        let plus = im(&(quat(&b) * quat(&a).conjugate()));
        let minus = im(&(quat(&a).conjugate() * quat(&b)));
        assert!((p.plus - plus).norm() < 1e-14);
        assert!((p.minus - minus).norm() < 1e-14);
    }

    #[test]
    fn hodge_of_normal_plane_is_tangent_plane() {
        // Clifford torus sample: ⋆(Φ∧n) = e¹∧e² with (Φ, n, e¹, e²) positively oriented.
        let (u, v) = (0.4_f64, 1.3_f64);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = Vec4::new(u.cos(), u.sin(), v.cos(), v.sin()) * s;
        let n = Vec4::new(-u.cos(), -u.sin(), v.cos(), v.sin()) * s;
        let e1 = Vec4::new(-u.sin(), u.cos(), 0.0, 0.0);
        let e2 = Vec4::new(0.0, 0.0, -v.sin(), v.cos());
        // orient the completion so that det(Φ, n, e1, e2) = +1
        let sign = det4(&phi, &n, &e1, &e2).signum();
        let t = wedge(&e1, &e2).scale(sign);
        let h = hodge(&wedge(&phi, &n));
        for k in 0..6 {
            assert!((h.0[k] - t.0[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn polar_examples() {
        let one = Quaternion::new(1.0, 0.0, 0.0, 0.0);
        assert!((polar_boundary(&one).unwrap().0 - Matrix3::identity()).amax() < 1e-15);
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let r = polar_boundary(&i).unwrap();
        assert!((r.0 - Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0))).amax() < 1e-15);
        assert!(polar_boundary(&(i * 2.0)).is_err());
    }

    #[test]
    fn polar_bubble_closes_and_collapses() {
        let phi = Quaternion::new(0.5, 0.5, 0.5, 0.5);
        let n = Quaternion::new(0.5, -0.5, 0.5, -0.5);
        let a = polar_bubble(-std::f64::consts::FRAC_PI_2, &phi, &n).unwrap();
        let b = polar_bubble(std::f64::consts::FRAC_PI_2, &phi, &n).unwrap();
        assert!((a.0 - b.0).amax() < 1e-14);
        let c = polar_bubble(0.0, &phi, &n).unwrap();
        assert!((c.0 - polar_boundary(&n).unwrap().0).amax() < 1e-15);
    }

    fn arb_unit_quat() -> impl Strategy<Value = Quat> {
        prop::array::uniform4(-1.0f64..1.0)
            .prop_filter("nonzero", |c| c.iter().map(|x| x * x).sum::<f64>() > 1e-2)
            .prop_map(|c| quat(&Vec4::new(c[0], c[1], c[2], c[3]).normalize()))
    }

    proptest! {
        #[test]
        fn wedge_norm_identity(a in prop::array::uniform4(-2.0f64..2.0), b in prop::array::uniform4(-2.0f64..2.0)) {
            let (a, b) = (Vec4::from(a), Vec4::from(b));
            let n2 = wedge(&a, &b).norm().powi(2);
            let want = a.norm_squared() * b.norm_squared() - a.dot(&b).powi(2);
            prop_assert!((n2 - want).abs() < 1e-12 * (1.0 + want));
            prop_assert!((wedge(&a, &b).add(&wedge(&b, &a))).norm() < 1e-15);
        }

        #[test]
        fn hodge_is_isometric_involution(c in prop::array::uniform6(-3.0f64..3.0)) {
            let b = Bivector4(c);
            prop_assert_eq!(hodge(&hodge(&b)), b);
            prop_assert!((hodge(&b).norm() - b.norm()).abs() < 1e-14);
            prop_assert!(b.self_dual().dot(&b.anti_self_dual()).abs() < 1e-12);
            let sd = b.self_dual();
            let asd = b.anti_self_dual();
            for k in 0..6 {
                prop_assert!((hodge(&sd).0[k] - sd.0[k]).abs() < 1e-14);
                prop_assert!((hodge(&asd).0[k] + asd.0[k]).abs() < 1e-14);
            }
        }

        #[test]
        fn grass_point_unit_and_rotation_invariant(s in prop::array::uniform8(-1.0f64..1.0), t in -6.3f64..6.3) {
            if let Some((a, b)) = frame_from(s) {
                prop_assert!((wedge(&a, &b).norm() - 1.0).abs() < 1e-13);
                let p = grass_point(&a, &b).unwrap();
                prop_assert!((p.plus.norm() - 1.0).abs() < 1e-12);
                prop_assert!((p.minus.norm() - 1.0).abs() < 1e-12);
                let a2 = a * t.cos() + b * t.sin();
                let b2 = -a * t.sin() + b * t.cos();
                let q = grass_point(&a2, &b2).unwrap();
                prop_assert!(p.dist(&q) < 1e-13);
            }
        }

        #[test]
        fn quat_vec4_round_trip(c in prop::array::uniform4(-5.0f64..5.0)) {
            let v = Vec4::from(c);
            prop_assert_eq!(vec4(&quat(&v)), v);
            let q = quat(&v);
            prop_assert!(((q * q.conjugate()).w - v.norm_squared()).abs() < 1e-12);
        }

        #[test]
        fn polar_antihomomorphism(g in arb_unit_quat(), h in arb_unit_quat()) {
            let pg = polar_boundary(&g).unwrap();
            let ph = polar_boundary(&h).unwrap();
            let pgh = polar_boundary(&(g * h)).unwrap();
            prop_assert!((pgh.0 - ph.compose(&pg).0).amax() < 1e-13);
            prop_assert!((polar_boundary(&(-g)).unwrap().0 - pg.0).amax() < 1e-15);
            prop_assert!(pg.orthogonality_residual() < 1e-12);
            prop_assert!((pg.det() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn polar_bubble_is_rotation(alpha in -1.6f64..1.6, s in prop::array::uniform8(-1.0f64..1.0)) {
            if let Some((a, b)) = frame_from(s) {
                let r = polar_bubble(alpha, &quat(&a), &quat(&b)).unwrap();
                prop_assert!(r.orthogonality_residual() < 1e-12);
                prop_assert!((r.det() - 1.0).abs() < 1e-12);
            }
        }
    }
}
