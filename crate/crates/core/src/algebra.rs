//! The generalized Virasoro algebra `𝔛(S¹) ×_{αω+βe} ℝ` and its regular dual.
//!
//! Elements are pairs `(u d/dx, a)`; dual elements are pairs
//! `(m dx⊗dx, c)` paired by `∫ m u dx + c a`. The bracket is
//!
//! ```text
//! [(u, a), (w, b)] = ((u'w - uw') d/dx,  α ∫ u'w'' dx + β ∫ u w' dx)
//! ```
//!
//! so that the coadjoint action reads
//!
//! ```text
//! ad*_{(u, a)} (v, b) = (-2u'v - uv' - αb u''' + βb u',  0).
//! ```

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::{Field, MultiplierSymbol, NullspacePolicy};

/// Weights of the Gelfand–Fuchs (`α`) and Euler (`β`) cocycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CocycleParams {
    pub alpha: f64,
    pub beta: f64,
}

impl CocycleParams {
    /// The trivial extension.
    pub const TRIVIAL: Self = Self::new(0.0, 0.0);
    /// The classical Virasoro algebra.
    pub const VIRASORO: Self = Self::new(1.0, 0.0);

    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }
}

/// `(u d/dx, a)` in the extended algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraElement {
    #[serde(rename = "field")]
    pub u: Field,
    #[serde(rename = "central")]
    pub a: f64,
}

impl AlgebraElement {
    pub fn new(u: Field, a: f64) -> Self {
        Self { u, a }
    }
}

/// `(m dx⊗dx, c)` in the regular dual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Momentum {
    #[serde(rename = "field")]
    pub m: Field,
    #[serde(rename = "central")]
    pub c: f64,
}

impl Momentum {
    pub fn new(m: Field, c: f64) -> Self {
        Self { m, c }
    }
}

/// Inertia operators; each acts as a Fourier multiplier on the field part
/// and as the identity on the central coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InertiaKind {
    /// `u ↦ u`
    L2,
    /// `u ↦ u - u''`
    H1,
    /// `u ↦ -u''`, degenerate on constants.
    HomogeneousH1,
}

impl InertiaKind {
    pub fn symbol(&self) -> MultiplierSymbol {
        match self {
            InertiaKind::L2 => MultiplierSymbol::identity(),
            InertiaKind::H1 => MultiplierSymbol::one_plus_k_squared(),
            InertiaKind::HomogeneousH1 => MultiplierSymbol::k_squared(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InertiaKind::L2 => "L2",
            InertiaKind::H1 => "H1",
            InertiaKind::HomogeneousH1 => "homogeneous_H1",
        }
    }
}

pub fn bracket(x: &AlgebraElement, y: &AlgebraElement, p: CocycleParams) -> Result<AlgebraElement> {
    let (u, w) = (&x.u, &y.u);
    let du = u.derivative(1);
    let dw = w.derivative(1);
    let field = &du.multiply(w)? - &u.multiply(&dw)?;
    let gelfand_fuchs = du.inner(&w.derivative(2))?;
    let euler = u.inner(&dw)?;
    Ok(AlgebraElement::new(field, p.alpha * gelfand_fuchs + p.beta * euler))
}

pub fn pair(mom: &Momentum, x: &AlgebraElement) -> Result<f64> {
    Ok(mom.m.inner(&x.u)? + mom.c * x.a)
}

/// `ad*_{actor} target`. The central coordinate of the result is always zero.
pub fn coadjoint(actor: &AlgebraElement, target: &Momentum, p: CocycleParams) -> Result<Momentum> {
    let u = &actor.u;
    let v = &target.m;
    let b = target.c;
    let du = u.derivative(1);
    let mut field = &(-2.0 * &du.multiply(v)?) - &u.multiply(&v.derivative(1))?;
    if p.alpha != 0.0 && b != 0.0 {
        field = &field - &(p.alpha * b * &u.derivative(3));
    }
    if p.beta != 0.0 && b != 0.0 {
        field = &field + &(p.beta * b * &du);
    }
    Ok(Momentum::new(field, 0.0))
}

pub fn inertia_apply(x: &AlgebraElement, kind: InertiaKind) -> Momentum {
    let m = match kind {
        InertiaKind::L2 => x.u.clone(),
        _ => x.u.apply_multiplier(&kind.symbol()),
    };
    Momentum::new(m, x.a)
}

/// Inverse inertia. For [`InertiaKind::HomogeneousH1`] the zero-mean
/// representative is returned and a non-zero mean is rejected under
/// [`NullspacePolicy::Strict`].
pub fn inertia_invert(mom: &Momentum, kind: InertiaKind, policy: NullspacePolicy) -> Result<AlgebraElement> {
    let u = match kind {
        InertiaKind::L2 => mom.m.clone(),
        _ => mom.m.invert_multiplier(&kind.symbol(), policy)?,
    };
    Ok(AlgebraElement::new(u, mom.c))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::error::Error;
    use crate::spectral::GridSpec;

    fn grid() -> GridSpec {
        GridSpec::new(32).unwrap()
    }

    fn f(g: GridSpec, h: fn(f64) -> f64) -> Field {
        Field::from_fn(g, h)
    }

    #[test]
    fn bracket_examples() {
        let g = grid();
        let x = AlgebraElement::new(f(g, f64::sin), 0.0);
        let y = AlgebraElement::new(f(g, f64::sin), 5.0);
        let r = bracket(&x, &y, CocycleParams::new(1.0, 2.0)).unwrap();
        assert!(r.u.sup_norm() < 1e-14 && r.a.abs() < 1e-14);

        let y = AlgebraElement::new(f(g, f64::cos), 0.0);
        let r = bracket(&x, &y, CocycleParams::VIRASORO).unwrap();
        assert!(r.u.max_abs_diff(&Field::constant(g, 1.0)) < 1e-13);
        assert!((r.a + PI).abs() < 1e-13);

        let r = bracket(&x, &y, CocycleParams::new(0.0, 1.0)).unwrap();
        assert!(r.u.max_abs_diff(&Field::constant(g, 1.0)) < 1e-13);
        assert!((r.a + PI).abs() < 1e-13);
    }

    #[test]
    fn pair_examples() {
        let g = grid();
        let mom = Momentum::new(f(g, f64::sin), 2.0);
        let x = AlgebraElement::new(f(g, f64::sin), 3.0);
        assert!((pair(&mom, &x).unwrap() - (PI + 6.0)).abs() < 1e-13);

        let mom = Momentum::new(Field::zeros(g), 1.0);
        let x = AlgebraElement::new(f(g, |x| (2.0 * x).cos() + 1.0), 0.0);
        assert_eq!(pair(&mom, &x).unwrap(), 0.0);

        let mom = Momentum::new(f(g, f64::cos), 0.0);
        let x = AlgebraElement::new(f(g, f64::sin), 0.0);
        assert!(pair(&mom, &x).unwrap().abs() < 1e-14);
    }

    #[test]
    fn coadjoint_examples() {
        let g = grid();
        let actor = AlgebraElement::new(f(g, |x| x.cos() + 0.3), 4.0);
        let zero = Momentum::new(Field::zeros(g), 0.0);
        let r = coadjoint(&actor, &zero, CocycleParams::new(1.0, 2.0)).unwrap();
        assert!(r.m.sup_norm() < 1e-15 && r.c == 0.0);

        let actor = AlgebraElement::new(f(g, f64::sin), 0.0);
        let r = coadjoint(&actor, &Momentum::new(f(g, f64::sin), 0.0), CocycleParams::VIRASORO).unwrap();
        assert!(r.m.max_abs_diff(&f(g, |x| -1.5 * (2.0 * x).sin())) < 1e-13);

        let r = coadjoint(&actor, &Momentum::new(Field::zeros(g), 1.0), CocycleParams::new(1.0, 2.0)).unwrap();
        assert!(r.m.max_abs_diff(&f(g, |x| 3.0 * x.cos())) < 1e-12);
        assert_eq!(r.c, 0.0);
    }

    #[test]
    fn inertia_examples() {
        let g = grid();
        let r = inertia_apply(&AlgebraElement::new(f(g, f64::sin), 7.0), InertiaKind::H1);
        assert!(r.m.max_abs_diff(&f(g, |x| 2.0 * x.sin())) < 1e-13 && r.c == 7.0);
        let r = inertia_apply(&AlgebraElement::new(f(g, |x| (2.0 * x).cos()), 0.0), InertiaKind::HomogeneousH1);
        assert!(r.m.max_abs_diff(&f(g, |x| 4.0 * (2.0 * x).cos())) < 1e-13);
        let v = f(g, |x| x.sin() * x.cos() + 0.2);
        let r = inertia_apply(&AlgebraElement::new(v.clone(), -1.5), InertiaKind::L2);
        assert!(r.m.max_abs_diff(&v) == 0.0 && r.c == -1.5);

        let strict = NullspacePolicy::default();
        let r = inertia_invert(&Momentum::new(f(g, |x| 2.0 * x.sin()), 3.0), InertiaKind::H1, strict).unwrap();
        assert!(r.u.max_abs_diff(&f(g, f64::sin)) < 1e-13 && r.a == 3.0);
        let r = inertia_invert(&Momentum::new(f(g, f64::cos), 0.0), InertiaKind::HomogeneousH1, strict).unwrap();
        assert!(r.u.max_abs_diff(&f(g, f64::cos)) < 1e-13);
        let r = inertia_invert(&Momentum::new(f(g, |x| 1.0 + x.cos()), 0.0), InertiaKind::HomogeneousH1, strict);
        assert!(matches!(r, Err(Error::KernelObstruction { .. })));
    }

    #[test]
    fn json_schema() {
        let g = GridSpec::new(8).unwrap();
        let x = AlgebraElement::new(f(g, f64::cos), 1.25);
        let v: serde_json::Value = serde_json::to_value(&x).unwrap();
        assert_eq!(v["central"], 1.25);
        assert_eq!(v["field"]["n"], 8);
        let back: Momentum = serde_json::from_value(v).unwrap();
        assert!(back.m.max_abs_diff(&x.u) < 1e-15 && back.c == 1.25);
    }
}
