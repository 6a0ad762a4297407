//! Euler–Arnold right-hand sides and the catalogue of named equations.
//!
//! Every named equation except mKdV is `d/dt m = ad*_{A⁻¹m} m` for a choice
//! of inertia operator and cocycle parameters, written in the velocity `v`
//! after substituting the momentum:
//!
//! | family            | momentum   | velocity recovery       |
//! |-------------------|------------|-------------------------|
//! | `L2`              | `u = v`    | identity                |
//! | `H1`              | `u = v-v''`| `(1-∂²)⁻¹ u`            |
//! | `HomogeneousH1`   | `u = v''`  | `∂⁻² u` plus a constant |
//!
//! The named right-hand sides return the time derivative of the momentum
//! variable (`u_t`, `(v - v_xx)_t` or `v_xxt`).

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{coadjoint, inertia_invert, CocycleParams, InertiaKind, Momentum};
use crate::error::{Error, Result};
use crate::spectral::{ik_power, Field, GridSpec, MultiplierSymbol, NullspacePolicy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationSpec {
    pub inertia: InertiaKind,
    pub params: CocycleParams,
    pub nullspace_policy: NullspacePolicy,
}

impl EquationSpec {
    pub fn new(inertia: InertiaKind, params: CocycleParams) -> Self {
        Self {
            inertia,
            params,
            nullspace_policy: NullspacePolicy::default(),
        }
    }
}

/// `ad*_{A⁻¹(m)} m`. The central coordinate of the result is zero, so the
/// central value of the state is a constant of motion.
pub fn euler_rhs(m: &Momentum, spec: &EquationSpec) -> Result<Momentum> {
    let velocity = inertia_invert(m, spec.inertia, spec.nullspace_policy)?;
    coadjoint(&velocity, m, spec.params)
}

/// `u_t = -3 u_x u`
pub fn rhs_burgers(u: &Field) -> Field {
    -3.0 * &u.derivative(1).multiply(u).expect("same grid")
}

/// `u_t = -3 u_x u - a u_xxx`
pub fn rhs_kdv(u: &Field, a: f64) -> Field {
    &rhs_burgers(u) - &(a * &u.derivative(3))
}

/// `u_t = -6 u² u_x - a u_xxx`
pub fn rhs_mkdv(u: &Field, a: f64) -> Field {
    let u2 = u.multiply(u).expect("same grid");
    &(-6.0 * &u2.multiply(&u.derivative(1)).expect("same grid")) - &(a * &u.derivative(3))
}

/// `u_t = -3 u u' - aα u''' + aβ u'`
pub fn rhs_generalized_kdv(u: &Field, a: f64, alpha: f64, beta: f64) -> Field {
    let linear = &(a * beta * &u.derivative(1)) - &(a * alpha * &u.derivative(3));
    &rhs_burgers(u) + &linear
}

// -3 v_x v + 2 v_x v_xx + v v_xxx
fn h1_quadratic(v: &Field) -> Field {
    let d1 = v.derivative(1);
    let d2 = v.derivative(2);
    let d3 = v.derivative(3);
    let a = -3.0 * &d1.multiply(v).expect("same grid");
    let b = 2.0 * &d1.multiply(&d2).expect("same grid");
    let c = v.multiply(&d3).expect("same grid");
    &(&a + &b) + &c
}

// 2 v_x v_xx + v v_xxx
fn hs_quadratic(v: &Field) -> Field {
    let d1 = v.derivative(1);
    let b = 2.0 * &d1.multiply(&v.derivative(2)).expect("same grid");
    &b + &v.multiply(&v.derivative(3)).expect("same grid")
}

/// Right side of `v_t - v_txx = -3v_x v + 2v_x v_xx + v v_xxx - b v_xxx`.
pub fn rhs_camassa_holm(v: &Field, b: f64) -> Field {
    &h1_quadratic(v) - &(b * &v.derivative(3))
}

/// Right side of `v_xxt = 2 v_xx v_x + v v_xxx + a v_xxx`.
pub fn rhs_hunter_saxton(v: &Field, a: f64) -> Field {
    &hs_quadratic(v) + &(a * &v.derivative(3))
}

/// Right side of `v_xxt = 2 v_x v_xx + v v_xxx + αa v_xxx - βa v_x`.
pub fn rhs_generalized_hs_new(v: &Field, a: f64, alpha: f64, beta: f64) -> Field {
    let linear = &(alpha * a * &v.derivative(3)) - &(beta * a * &v.derivative(1));
    &hs_quadratic(v) + &linear
}

/// Right side of `v_t - v_xxt = -3v_x v + 2v_x v_xx + v v_xxx - αa v_xxx + βa v_x`.
pub fn rhs_generalized_h1(v: &Field, a: f64, alpha: f64, beta: f64) -> Field {
    let linear = &(beta * a * &v.derivative(1)) - &(alpha * a * &v.derivative(3));
    &h1_quadratic(v) + &linear
}

/// The named equations, each carrying the constants it reads. `a` is the
/// central coordinate of the momentum (called `b` in the Camassa–Holm
/// literature).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum NamedEquation {
    Burgers,
    Kdv { a: f64 },
    Mkdv { a: f64 },
    GeneralizedKdv { a: f64, alpha: f64, beta: f64 },
    CamassaHolm { a: f64 },
    HunterSaxton { a: f64 },
    GeneralizedHsNew { a: f64, alpha: f64, beta: f64 },
    GeneralizedH1 { a: f64, alpha: f64, beta: f64 },
}

impl fmt::Display for NamedEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl NamedEquation {
    pub const NAMES: [&'static str; 8] = [
        "burgers",
        "kdv",
        "mkdv",
        "generalized_kdv",
        "camassa_holm",
        "hunter_saxton",
        "generalized_hs_new",
        "generalized_h1",
    ];

    pub fn from_name(name: &str, a: f64, alpha: f64, beta: f64) -> Result<Self> {
        Ok(match name {
            "burgers" => NamedEquation::Burgers,
            "kdv" => NamedEquation::Kdv { a },
            "mkdv" => NamedEquation::Mkdv { a },
            "generalized_kdv" => NamedEquation::GeneralizedKdv { a, alpha, beta },
            "camassa_holm" => NamedEquation::CamassaHolm { a },
            "hunter_saxton" => NamedEquation::HunterSaxton { a },
            "generalized_hs_new" => NamedEquation::GeneralizedHsNew { a, alpha, beta },
            "generalized_h1" => NamedEquation::GeneralizedH1 { a, alpha, beta },
            other => return Err(Error::UnknownEquation(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            NamedEquation::Burgers => "burgers",
            NamedEquation::Kdv { .. } => "kdv",
            NamedEquation::Mkdv { .. } => "mkdv",
            NamedEquation::GeneralizedKdv { .. } => "generalized_kdv",
            NamedEquation::CamassaHolm { .. } => "camassa_holm",
            NamedEquation::HunterSaxton { .. } => "hunter_saxton",
            NamedEquation::GeneralizedHsNew { .. } => "generalized_hs_new",
            NamedEquation::GeneralizedH1 { .. } => "generalized_h1",
        }
    }

    /// Central coordinate of the momentum.
    pub fn central(&self) -> f64 {
        match *self {
            NamedEquation::Burgers => 0.0,
            NamedEquation::Kdv { a }
            | NamedEquation::Mkdv { a }
            | NamedEquation::CamassaHolm { a }
            | NamedEquation::HunterSaxton { a }
            | NamedEquation::GeneralizedKdv { a, .. }
            | NamedEquation::GeneralizedHsNew { a, .. }
            | NamedEquation::GeneralizedH1 { a, .. } => a,
        }
    }

    /// Inertia family of the momentum variable (mKdV evolves `u` directly).
    pub fn family(&self) -> InertiaKind {
        match self {
            NamedEquation::Burgers
            | NamedEquation::Kdv { .. }
            | NamedEquation::Mkdv { .. }
            | NamedEquation::GeneralizedKdv { .. } => InertiaKind::L2,
            NamedEquation::CamassaHolm { .. } | NamedEquation::GeneralizedH1 { .. } => InertiaKind::H1,
            NamedEquation::HunterSaxton { .. } | NamedEquation::GeneralizedHsNew { .. } => {
                InertiaKind::HomogeneousH1
            }
        }
    }

    pub fn params(&self) -> Option<CocycleParams> {
        match *self {
            NamedEquation::Burgers => Some(CocycleParams::TRIVIAL),
            NamedEquation::Mkdv { .. } => None,
            NamedEquation::Kdv { .. } | NamedEquation::CamassaHolm { .. } | NamedEquation::HunterSaxton { .. } => {
                Some(CocycleParams::VIRASORO)
            }
            NamedEquation::GeneralizedKdv { alpha, beta, .. }
            | NamedEquation::GeneralizedHsNew { alpha, beta, .. }
            | NamedEquation::GeneralizedH1 { alpha, beta, .. } => Some(CocycleParams::new(alpha, beta)),
        }
    }

    /// The Euler–Arnold data, or `None` for mKdV which is only Hamiltonian.
    pub fn spec(&self) -> Option<EquationSpec> {
        self.params().map(|p| EquationSpec::new(self.family(), p))
    }

    /// Human-readable `(inertia, α, β)` signature.
    pub fn signature(&self) -> String {
        match self.params() {
            Some(p) => format!("({}, alpha={}, beta={})", self.family().name(), p.alpha, p.beta),
            None => "(hamiltonian, frozen at (-1/2 dx^2, 0))".to_string(),
        }
    }

    /// The named right-hand side in terms of the velocity `v`.
    pub fn rhs(&self, v: &Field) -> Field {
        match *self {
            NamedEquation::Burgers => rhs_burgers(v),
            NamedEquation::Kdv { a } => rhs_kdv(v, a),
            NamedEquation::Mkdv { a } => rhs_mkdv(v, a),
            NamedEquation::GeneralizedKdv { a, alpha, beta } => rhs_generalized_kdv(v, a, alpha, beta),
            NamedEquation::CamassaHolm { a } => rhs_camassa_holm(v, a),
            NamedEquation::HunterSaxton { a } => rhs_hunter_saxton(v, a),
            NamedEquation::GeneralizedHsNew { a, alpha, beta } => rhs_generalized_hs_new(v, a, alpha, beta),
            NamedEquation::GeneralizedH1 { a, alpha, beta } => rhs_generalized_h1(v, a, alpha, beta),
        }
    }

    pub fn momentum_from_velocity(&self, v: &Field) -> Field {
        match self.family() {
            InertiaKind::L2 => v.clone(),
            InertiaKind::H1 => v.apply_multiplier(&MultiplierSymbol::one_plus_k_squared()),
            InertiaKind::HomogeneousH1 => v.derivative(2),
        }
    }

    /// Recovers `v` from the momentum variable. For the homogeneous family
    /// the momentum fixes `v` only up to a constant, supplied as `offset`.
    pub fn velocity_from_momentum(&self, u: &Field, offset: f64, policy: NullspacePolicy) -> Result<Field> {
        Ok(match self.family() {
            InertiaKind::L2 => u.clone(),
            InertiaKind::H1 => u.invert_multiplier(&MultiplierSymbol::one_plus_k_squared(), policy)?,
            InertiaKind::HomogeneousH1 => {
                let v = u.invert_multiplier(&MultiplierSymbol::k_squared(), policy)?;
                (-&v).add_constant(offset)
            }
        })
    }

    /// Time derivative of the momentum variable.
    pub fn momentum_rhs(&self, u: &Field, offset: f64, policy: NullspacePolicy) -> Result<Field> {
        Ok(self.rhs(&self.velocity_from_momentum(u, offset, policy)?))
    }

    /// Diagonal (Fourier) symbol of the part of [`Self::momentum_rhs`] that is
    /// linear in the momentum, in FFT order.
    pub fn linear_symbol(&self, grid: &GridSpec, offset: f64) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        // (coefficient of v_xxx, coefficient of v_x) in the velocity form
        let (c3, c1) = match *self {
            NamedEquation::Burgers => (0.0, 0.0),
            NamedEquation::Kdv { a } | NamedEquation::Mkdv { a } => (-a, 0.0),
            NamedEquation::GeneralizedKdv { a, alpha, beta } => (-a * alpha, a * beta),
            NamedEquation::CamassaHolm { a } => (-a, 0.0),
            NamedEquation::GeneralizedH1 { a, alpha, beta } => (-a * alpha, a * beta),
            NamedEquation::HunterSaxton { a } => (a + offset, 0.0),
            NamedEquation::GeneralizedHsNew { a, alpha, beta } => (alpha * a + offset, -beta * a),
        };
        let nyq = grid.nyquist_index();
        (0..grid.len())
            .map(|i| {
                let k = grid.wavenumber(i) as f64;
                let velocity_symbol = c3 * ik_power(grid, i, 3) + c1 * ik_power(grid, i, 1);
                match self.family() {
                    InertiaKind::L2 => velocity_symbol,
                    _ if i == nyq => zero,
                    InertiaKind::H1 => velocity_symbol / (1.0 + k * k),
                    InertiaKind::HomogeneousH1 if i == 0 => zero,
                    InertiaKind::HomogeneousH1 => velocity_symbol * (-1.0 / (k * k)),
                }
            })
            .collect()
    }
}

/// Outcome of a constant-shift reduction: if `v` solves the original
/// equation then `v - const_shift` solves `canonical`.
#[derive(Debug, Clone)]
pub struct ShiftReduction {
    pub canonical: NamedEquation,
    pub w0: Field,
    pub const_shift: f64,
}

pub fn shift_reduce(eq: &NamedEquation, v0: &Field) -> Result<ShiftReduction> {
    let (canonical, const_shift) = match *eq {
        // u = v + aβ/3
        NamedEquation::GeneralizedKdv { a, alpha, beta } => (NamedEquation::Kdv { a: a * alpha }, a * beta / 3.0),
        // w = v + a
        NamedEquation::HunterSaxton { .. } => (NamedEquation::HunterSaxton { a: 0.0 }, -eq.central()),
        // v = w - αa
        NamedEquation::GeneralizedHsNew { a, alpha, beta } => (
            NamedEquation::GeneralizedHsNew {
                a,
                alpha: 0.0,
                beta,
            },
            -alpha * a,
        ),
        // v = w + aβ/3
        NamedEquation::GeneralizedH1 { a, alpha, beta } => (
            NamedEquation::CamassaHolm {
                a: alpha * a - beta * a / 3.0,
            },
            a * beta / 3.0,
        ),
        _ => return Err(Error::NotReducible(eq.name().to_string())),
    };
    Ok(ShiftReduction {
        canonical,
        w0: v0.add_constant(-const_shift),
        const_shift,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::sampling;

    fn grid() -> GridSpec {
        GridSpec::new(64).unwrap()
    }

    fn sin(g: GridSpec) -> Field {
        Field::from_fn(g, f64::sin)
    }

    fn all_equations(a: f64, alpha: f64, beta: f64) -> Vec<NamedEquation> {
        NamedEquation::NAMES
            .iter()
            .map(|n| NamedEquation::from_name(n, a, alpha, beta).unwrap())
            .collect()
    }

    #[test]
    fn euler_rhs_examples() {
        let g = grid();
        let spec = EquationSpec::new(InertiaKind::L2, CocycleParams::new(1.0, 2.0));
        let r = euler_rhs(&Momentum::new(Field::zeros(g), 3.0), &spec).unwrap();
        assert!(r.m.sup_norm() == 0.0 && r.c == 0.0);

        let spec = EquationSpec::new(InertiaKind::L2, CocycleParams::TRIVIAL);
        let r = euler_rhs(&Momentum::new(Field::constant(g, 2.0), 0.0), &spec).unwrap();
        assert!(r.m.sup_norm() < 1e-14);

        let spec = EquationSpec::new(InertiaKind::L2, CocycleParams::VIRASORO);
        let r = euler_rhs(&Momentum::new(sin(g), 1.0), &spec).unwrap();
        let expected = Field::from_fn(g, |x| -1.5 * (2.0 * x).sin() + x.cos());
        assert!(r.m.max_abs_diff(&expected) < 1e-11);
    }

    #[test]
    fn named_rhs_on_sine() {
        let g = grid();
        let s = sin(g);
        let check = |f: Field, e: fn(f64) -> f64| assert!(f.max_abs_diff(&Field::from_fn(g, e)) < 1e-11);
        check(rhs_burgers(&s), |x| -1.5 * (2.0 * x).sin());
        check(rhs_kdv(&s, 1.0), |x| -1.5 * (2.0 * x).sin() + x.cos());
        check(rhs_mkdv(&s, 0.0), |x| -6.0 * x.sin().powi(2) * x.cos());
        check(rhs_generalized_kdv(&s, 1.0, 2.0, 3.0), |x| -1.5 * (2.0 * x).sin() + 5.0 * x.cos());
        check(rhs_camassa_holm(&s, 0.0), |x| -3.0 * (2.0 * x).sin());
        check(rhs_hunter_saxton(&s, 0.0), |x| -1.5 * (2.0 * x).sin());
        // 2cos(-sin) + sin(-cos) + (-cos) - cos
        check(rhs_generalized_hs_new(&s, 1.0, 1.0, 1.0), |x| -1.5 * (2.0 * x).sin() - 2.0 * x.cos());
    }

    #[test]
    fn reductions_between_named_equations() {
        let mut rng = sampling::rng(3);
        let g = grid();
        let v = sampling::band_limited_field(g, 10, &mut rng);
        let d = rhs_generalized_kdv(&v, 1.3, 0.7, 0.0).max_abs_diff(&rhs_kdv(&v, 1.3 * 0.7));
        assert!(d < 1e-12);
        let d = rhs_generalized_hs_new(&v, 0.0, 0.4, 0.9).max_abs_diff(&rhs_hunter_saxton(&v, 0.0));
        assert!(d < 1e-12);
        let d = rhs_generalized_h1(&v, 0.8, 1.0, 0.0).max_abs_diff(&rhs_camassa_holm(&v, 0.8));
        assert!(d < 1e-12);
    }

    #[test]
    fn constants_are_fixed_points() {
        let g = grid();
        for eq in all_equations(1.7, -0.4, 2.2) {
            for c in [0.0, 1.0, -3.5] {
                let r = eq.rhs(&Field::constant(g, c));
                assert!(r.sup_norm() < 1e-13, "{eq} at {c}");
            }
        }
    }

    #[test]
    fn shift_examples() {
        let g = grid();
        let v0 = sin(g);
        let r = shift_reduce(&NamedEquation::GeneralizedKdv { a: 1.0, alpha: 1.0, beta: 3.0 }, &v0).unwrap();
        assert_eq!(r.canonical, NamedEquation::Kdv { a: 1.0 });
        assert!((r.const_shift - 1.0).abs() < 1e-15);
        assert!(r.w0.max_abs_diff(&v0.add_constant(-1.0)) == 0.0);

        let r = shift_reduce(&NamedEquation::HunterSaxton { a: 2.0 }, &v0).unwrap();
        assert_eq!(r.canonical, NamedEquation::HunterSaxton { a: 0.0 });
        assert_eq!(r.const_shift, -2.0);

        let r = shift_reduce(&NamedEquation::GeneralizedH1 { a: 2.0, alpha: 1.0, beta: 3.0 }, &v0).unwrap();
        assert_eq!(r.canonical, NamedEquation::CamassaHolm { a: 0.0 });
        assert_eq!(r.const_shift, 2.0);

        for name in ["kdv", "burgers", "mkdv", "camassa_holm"] {
            let eq = NamedEquation::from_name(name, 1.0, 1.0, 1.0).unwrap();
            assert!(matches!(shift_reduce(&eq, &v0), Err(Error::NotReducible(_))));
        }
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(matches!(
            NamedEquation::from_name("navier_stokes", 0.0, 0.0, 0.0),
            Err(Error::UnknownEquation(_))
        ));
    }

    #[test]
    fn linear_symbol_matches_rhs_linear_part() {
        // for a tiny perturbation the quadratic terms are negligible
        let g = grid();
        let mut rng = sampling::rng(11);
        let base = sampling::zero_mean_field(g, 8, &mut rng);
        for eq in all_equations(1.3, 0.6, -0.8) {
            let offset = 0.4;
            let v = base.scale(1e-7).add_constant(if eq.family() == InertiaKind::HomogeneousH1 { offset } else { 0.0 });
            let u = eq.momentum_from_velocity(&v);
            let full = eq.momentum_rhs(&u, offset, NullspacePolicy::Project).unwrap();
            let sym = eq.linear_symbol(&g, offset);
            let lin: Vec<Complex64> = u.coefficients().iter().zip(&sym).map(|(c, s)| c * s).collect();
            let lin = Field::from_coefficients(g, lin).unwrap();
            let scale = lin.sup_norm().max(1e-7);
            assert!(full.max_abs_diff(&lin) / scale < 1e-5, "{eq}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn catalogue_matches_euler_rhs(seed in any::<u64>(), a in -3.0..3.0f64, alpha in -2.0..2.0f64, beta in -2.0..2.0f64) {
            let g = GridSpec::new(96).unwrap();
            let mut rng = sampling::rng(seed);
            let kmax = sampling::band_limit(&g);
            for eq in all_equations(a, alpha, beta) {
                let Some(spec) = eq.spec() else { continue };
                let v = match eq.family() {
                    InertiaKind::HomogeneousH1 => sampling::zero_mean_field(g, kmax, &mut rng),
                    _ => sampling::band_limited_field(g, kmax, &mut rng),
                };
                let m = Momentum::new(eq.momentum_from_velocity(&v), eq.central());
                let generic = euler_rhs(&m, &spec).unwrap();
                prop_assert_eq!(generic.c, 0.0);
                let d = generic.m.max_abs_diff(&eq.rhs(&v));
                prop_assert!(d <= 1e-10, "{} defect {:e}", eq, d);
            }
        }
    }
}
