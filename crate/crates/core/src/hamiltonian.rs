//! Constant Poisson structure frozen at `(-½ dx⊗dx, 0)`.
//!
//! For a functional `H` on the dual, `dH(m)` is an algebra element and the
//! Hamiltonian vector field is `X_H(m) = -ad*_{dH(m)} (-½, 0)` with the
//! Virasoro cocycle. Since `ad*_{(g, c)}(-½, 0) = (g', 0)`, this is simply
//! `X_H = (-(field of dH)', 0)`.

use serde::Serialize;

use crate::algebra::{bracket, coadjoint, pair, AlgebraElement, CocycleParams, InertiaKind, Momentum};
use crate::error::Result;
use crate::euler::NamedEquation;
use crate::spectral::{Field, GridSpec, NullspacePolicy};

pub fn freezing_point(grid: GridSpec) -> Momentum {
    Momentum::new(Field::constant(grid, -0.5), 0.0)
}

/// `dH(m)` regarded as an algebra element: `pair((w, b), dH(m))` is the
/// directional derivative of `H` at `m` along `(w, b)`.
#[derive(Debug, Clone)]
pub struct FunctionalGradient(pub AlgebraElement);

fn half_gradient_energy(u: &Field) -> f64 {
    let ux = u.derivative(1);
    0.5 * ux.inner(&ux).expect("same grid")
}

/// `H(u, a) = ∫ (½u³ - (a/2) u_x²) dx`
pub fn h_kdv(m: &Momentum) -> f64 {
    let u = &m.m;
    let cube = u.multiply(u).and_then(|u2| u2.multiply(u)).expect("same grid");
    0.5 * cube.integrate() - m.c * half_gradient_energy(u)
}

pub fn grad_h_kdv(m: &Momentum) -> FunctionalGradient {
    let u = &m.m;
    let field = &(1.5 * &u.multiply(u).expect("same grid")) + &(m.c * &u.derivative(2));
    FunctionalGradient(AlgebraElement::new(field, -half_gradient_energy(u)))
}

/// `H(u, a) = ∫ (½u⁴ - (a/2) u_x²) dx`, whose vector field is mKdV
/// `u_t = -6u²u_x - a u_xxx`.
pub fn h_mkdv(m: &Momentum) -> f64 {
    let u = &m.m;
    let u2 = u.multiply(u).expect("same grid");
    0.5 * u2.multiply(&u2).expect("same grid").integrate() - m.c * half_gradient_energy(u)
}

pub fn grad_h_mkdv(m: &Momentum) -> FunctionalGradient {
    let u = &m.m;
    let cube = u.multiply(u).and_then(|u2| u2.multiply(u)).expect("same grid");
    let field = &(2.0 * &cube) + &(m.c * &u.derivative(2));
    FunctionalGradient(AlgebraElement::new(field, -half_gradient_energy(u)))
}

pub fn hamiltonian_vf(grad: &FunctionalGradient) -> Momentum {
    let frozen = freezing_point(grad.0.u.grid());
    let ad = coadjoint(&grad.0, &frozen, CocycleParams::VIRASORO).expect("same grid");
    Momentum::new(-&ad.m, 0.0)
}

/// `{F, G}(m) = (-½, 0)[dF(m), dG(m)]`
pub fn poisson_bracket(grad_f: &FunctionalGradient, grad_g: &FunctionalGradient) -> Result<f64> {
    let frozen = freezing_point(grad_f.0.u.grid());
    pair(&frozen, &bracket(&grad_f.0, &grad_g.0, CocycleParams::VIRASORO)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservedQuantities {
    pub mean: f64,
    pub l2: f64,
    pub hamiltonian: Option<f64>,
    pub central: f64,
}

impl ConservedQuantities {
    pub const CSV_HEADER: &'static str = "t,mean,l2,hamiltonian,central";

    pub fn csv_row(&self, t: f64) -> String {
        let h = self.hamiltonian.map(|h| format!("{h:.17e}")).unwrap_or_default();
        format!("{t:.17e},{:.17e},{:.17e},{h},{:.17e}", self.mean, self.l2, self.central)
    }
}

/// Diagnostics for the momentum `m` of `eq`, with constants taken from `eq`.
/// The `hamiltonian` entry is the frozen-bracket Hamiltonian for the KdV
/// family and mKdV, and the kinetic energy `½∫ v A(v) dx` for the H¹ and Ḣ¹ families.
pub fn conserved_quantities(m: &Momentum, eq: &NamedEquation) -> ConservedQuantities {
    let u = &m.m;
    let hamiltonian = match *eq {
        NamedEquation::Burgers => Some(h_kdv(&Momentum::new(u.clone(), 0.0))),
        NamedEquation::Kdv { a } => Some(h_kdv(&Momentum::new(u.clone(), a))),
        NamedEquation::Mkdv { a } => Some(h_mkdv(&Momentum::new(u.clone(), a))),
        NamedEquation::GeneralizedKdv { a, alpha, beta } => {
            let cubic = h_kdv(&Momentum::new(u.clone(), a * alpha));
            Some(cubic - 0.5 * a * beta * u.inner(u).expect("same grid"))
        }
        _ => eq
            .velocity_from_momentum(u, 0.0, NullspacePolicy::Project)
            .ok()
            .map(|v| match eq.family() {
                InertiaKind::HomogeneousH1 => half_gradient_energy(&v),
                _ => 0.5 * u.inner(&v).expect("same grid"),
            }),
    };
    ConservedQuantities {
        mean: u.integrate(),
        l2: u.inner(u).expect("same grid"),
        hamiltonian,
        central: m.c,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::euler::{rhs_kdv, rhs_mkdv};
    use crate::sampling;

    fn grid() -> GridSpec {
        GridSpec::new(64).unwrap()
    }

    fn fd_directional(h: impl Fn(&Momentum) -> f64, m: &Momentum, dir: &Momentum) -> f64 {
        let t = 1e-5;
        let shifted = |s: f64| Momentum::new(&m.m + &(s * &dir.m), m.c + s * dir.c);
        (h(&shifted(t)) - h(&shifted(-t))) / (2.0 * t)
    }

    #[test]
    fn gradient_examples() {
        let g = grid();
        for grad in [grad_h_kdv, grad_h_mkdv] {
            let r = grad(&Momentum::new(Field::zeros(g), 5.0));
            assert!(r.0.u.sup_norm() == 0.0 && r.0.a == 0.0);
        }
        let r = grad_h_kdv(&Momentum::new(Field::from_fn(g, f64::sin), 0.0));
        assert!(r.0.u.max_abs_diff(&Field::from_fn(g, |x| 1.5 * x.sin().powi(2))) < 1e-14);
        assert!((r.0.a + PI / 2.0).abs() < 1e-13);
        let r = grad_h_mkdv(&Momentum::new(Field::from_fn(g, f64::sin), 0.0));
        assert!(r.0.u.max_abs_diff(&Field::from_fn(g, |x| 2.0 * x.sin().powi(3))) < 1e-14);
        assert!((r.0.a + PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let g = grid();
        let mut rng = sampling::rng(5);
        let kmax = sampling::band_limit(&g) / 2;
        for _ in 0..10 {
            let m = Momentum::new(sampling::band_limited_field(g, kmax, &mut rng), 1.5);
            let dir = Momentum::new(sampling::band_limited_field(g, kmax, &mut rng), -0.7);
            for (h, grad) in [
                (h_kdv as fn(&Momentum) -> f64, grad_h_kdv as fn(&Momentum) -> FunctionalGradient),
                (h_mkdv, grad_h_mkdv),
            ] {
                let exact = pair(&dir, &grad(&m).0).unwrap();
                let fd = fd_directional(h, &m, &dir);
                assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0), "{exact} vs {fd}");
            }
        }
    }

    #[test]
    fn vector_fields_reproduce_kdv_and_mkdv() {
        let g = grid();
        let mut rng = sampling::rng(9);
        let kmax = sampling::band_limit(&g);
        for a in [0.0, 1.0, -4.5] {
            let u = sampling::band_limited_field(g, kmax, &mut rng);
            let m = Momentum::new(u.clone(), a);
            let vf = hamiltonian_vf(&grad_h_kdv(&m));
            assert!(vf.m.max_abs_diff(&rhs_kdv(&u, a)) < 1e-10 && vf.c == 0.0);
            let vf = hamiltonian_vf(&grad_h_mkdv(&m));
            assert!(vf.m.max_abs_diff(&rhs_mkdv(&u, a)) < 1e-10);
        }
        let central_only = FunctionalGradient(AlgebraElement::new(Field::zeros(g), 3.0));
        assert!(hamiltonian_vf(&central_only).m.sup_norm() == 0.0);
    }

    #[test]
    fn poisson_bracket_examples() {
        let g = grid();
        let s = FunctionalGradient(AlgebraElement::new(Field::from_fn(g, f64::sin), 0.0));
        let c = FunctionalGradient(AlgebraElement::new(Field::from_fn(g, f64::cos), 0.0));
        assert!(poisson_bracket(&s, &s).unwrap().abs() < 1e-14);
        assert!((poisson_bracket(&s, &c).unwrap() + PI).abs() < 1e-13);
        assert!((poisson_bracket(&c, &s).unwrap() - PI).abs() < 1e-13);
        let central = FunctionalGradient(AlgebraElement::new(Field::zeros(g), 2.0));
        assert_eq!(poisson_bracket(&central, &s).unwrap(), 0.0);
    }

    #[test]
    fn conserved_quantity_examples() {
        let g = grid();
        let q = conserved_quantities(&Momentum::new(Field::from_fn(g, f64::sin), 0.0), &NamedEquation::Kdv { a: 1.0 });
        assert!(q.mean.abs() < 1e-14 && (q.l2 - PI).abs() < 1e-13);
        // ∫ ½ sin³ = 0, -(1/2)∫cos² = -π/2
        assert!((q.hamiltonian.unwrap() + PI / 2.0).abs() < 1e-13);

        let q = conserved_quantities(&Momentum::new(Field::zeros(g), 2.5), &NamedEquation::HunterSaxton { a: 2.5 });
        assert_eq!((q.mean, q.l2, q.hamiltonian, q.central), (0.0, 0.0, Some(0.0), 2.5));
        let row = q.csv_row(0.5);
        assert_eq!(row.split(',').count(), ConservedQuantities::CSV_HEADER.split(',').count());
    }
}
