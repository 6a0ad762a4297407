//! Randomized invariant suites. Each suite draws band-limited fields or
//! smooth diffeomorphisms from a seeded generator and reports the largest
//! defect of every identity it checks.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{bracket, coadjoint, inertia_apply, inertia_invert, pair, AlgebraElement, CocycleParams, InertiaKind, Momentum};
use crate::error::Result;
use crate::euler::{euler_rhs, rhs_kdv, rhs_mkdv, shift_reduce, NamedEquation};
use crate::group::{
    bott_cocycle, cocycle_defect, connection_cochain, euler_cocycle, flow, geodesic_residual,
    infinitesimal_euler_cocycle, velocity_field, LiftedDiffeo,
};
use crate::hamiltonian::{grad_h_kdv, grad_h_mkdv, h_kdv, h_mkdv, hamiltonian_vf, poisson_bracket, FunctionalGradient};
use crate::integrate::{simulate_from, GridConfig, InitialCondition, Integrator, SimConfig, TimeConfig};
use crate::sampling::{self, TestRng};
use crate::spectral::{Field, GridSpec, NullspacePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Passes when the measured value is at most the tolerance.
    AtMost,
    /// Passes when the measured value is at least the tolerance.
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub max_defect: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    /// Defect and tolerance of the check closest to (or furthest past) its bound.
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn failed(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub trials: usize,
    pub seed: u64,
    /// Replaces every check's tolerance when set.
    pub tolerance: Option<f64>,
    pub n: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            trials: 20,
            seed: 0,
            tolerance: None,
            n: 128,
        }
    }
}

struct Check {
    name: String,
    tolerance: f64,
    comparison: Comparison,
    worst: f64,
}

impl Check {
    fn at_most(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            tolerance,
            comparison: Comparison::AtMost,
            worst: 0.0,
        }
    }

    fn at_least(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            tolerance,
            comparison: Comparison::AtLeast,
            worst: f64::INFINITY,
        }
    }

    fn record(&mut self, value: f64) {
        let value = if value.is_nan() {
            match self.comparison {
                Comparison::AtMost => f64::INFINITY,
                Comparison::AtLeast => f64::NEG_INFINITY,
            }
        } else {
            value.abs()
        };
        self.worst = match self.comparison {
            Comparison::AtMost => self.worst.max(value),
            Comparison::AtLeast => self.worst.min(value),
        };
    }
}

struct Suite {
    name: &'static str,
    opts: SuiteOptions,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &'static str, opts: SuiteOptions) -> Self {
        Self {
            name,
            opts,
            checks: Vec::new(),
        }
    }

    fn add(&mut self, check: Check) -> usize {
        self.checks.push(check);
        self.checks.len() - 1
    }

    fn record(&mut self, id: usize, value: f64) {
        self.checks[id].record(value);
    }

    fn finish(self) -> SuiteReport {
        let override_tol = self.opts.tolerance;
        let checks: Vec<CheckReport> = self
            .checks
            .into_iter()
            .map(|c| {
                let tolerance = override_tol.unwrap_or(c.tolerance);
                let pass = match c.comparison {
                    Comparison::AtMost => c.worst <= tolerance,
                    Comparison::AtLeast => c.worst >= tolerance,
                };
                CheckReport {
                    name: c.name,
                    max_defect: c.worst,
                    tolerance,
                    comparison: c.comparison,
                    pass,
                }
            })
            .collect();
        let margin = |c: &CheckReport| match c.comparison {
            Comparison::AtMost => c.max_defect / c.tolerance,
            Comparison::AtLeast => c.tolerance / c.max_defect,
        };
        let worst = checks
            .iter()
            .max_by(|a, b| margin(a).total_cmp(&margin(b)))
            .expect("suites have checks");
        SuiteReport {
            suite: self.name.to_string(),
            trials: self.opts.trials,
            seed: self.opts.seed,
            max_defect: worst.max_defect,
            tolerance: worst.tolerance,
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }
}

fn random_element(g: GridSpec, kmax: usize, rng: &mut TestRng) -> AlgebraElement {
    AlgebraElement::new(sampling::band_limited_field(g, kmax, rng), rng.random_range(-2.0..2.0))
}

fn random_momentum(g: GridSpec, kmax: usize, rng: &mut TestRng) -> Momentum {
    Momentum::new(sampling::band_limited_field(g, kmax, rng), rng.random_range(-2.0..2.0))
}

pub const DUALITY_PARAMS: [CocycleParams; 4] = [
    CocycleParams::new(0.0, 0.0),
    CocycleParams::new(1.0, 0.0),
    CocycleParams::new(0.0, 1.0),
    CocycleParams::new(1.0, 2.0),
];

pub const INERTIA_KINDS: [InertiaKind; 3] = [InertiaKind::L2, InertiaKind::H1, InertiaKind::HomogeneousH1];

/// Bracket, coadjoint action, pairing and inertia operators.
pub fn verify_algebra(opts: SuiteOptions) -> Result<SuiteReport> {
    let g = GridSpec::new(opts.n)?;
    let kmax = sampling::band_limit(&g);
    // keeps the doubly nested products of the Jacobi identity alias free
    let kmax_jacobi = g.dealias_cutoff() / 3;
    let mut rng = sampling::rng(opts.seed);
    let mut s = Suite::new("algebra", opts);
    let duality = s.add(Check::at_most("coadjoint_duality", 1e-9));
    let antisym = s.add(Check::at_most("bracket_antisymmetry", 1e-10));
    let jacobi = s.add(Check::at_most("jacobi_identity", 1e-9));
    let symmetry = s.add(Check::at_most("inertia_symmetry", 1e-10));
    let roundtrip = s.add(Check::at_most("inertia_roundtrip", 1e-10));
    let constant_actor = s.add(Check::at_most("constant_actor_duality", 1e-10));
    let exact_derivative = s.add(Check::at_most("derivative_integrates_to_zero", 1e-12));
    let by_parts = s.add(Check::at_most("integration_by_parts", 1e-10));

    for _ in 0..opts.trials {
        let x = random_element(g, kmax, &mut rng);
        let y = random_element(g, kmax, &mut rng);
        let m = random_momentum(g, kmax, &mut rng);
        for p in DUALITY_PARAMS {
            let lhs = pair(&coadjoint(&x, &m, p)?, &y)? + pair(&m, &bracket(&x, &y, p)?)?;
            s.record(duality, lhs);
            let sum = &bracket(&x, &y, p)?.u + &bracket(&y, &x, p)?.u;
            s.record(antisym, sum.sup_norm());
            s.record(antisym, bracket(&x, &y, p)?.a + bracket(&y, &x, p)?.a);
        }

        let p = CocycleParams::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let (a, b, c) = (
            random_element(g, kmax_jacobi, &mut rng),
            random_element(g, kmax_jacobi, &mut rng),
            random_element(g, kmax_jacobi, &mut rng),
        );
        let cyc = |a: &AlgebraElement, b: &AlgebraElement, c: &AlgebraElement| bracket(a, &bracket(b, c, p)?, p);
        let (j1, j2, j3) = (cyc(&a, &b, &c)?, cyc(&b, &c, &a)?, cyc(&c, &a, &b)?);
        s.record(jacobi, (&(&j1.u + &j2.u) + &j3.u).sup_norm());
        s.record(jacobi, j1.a + j2.a + j3.a);

        for kind in INERTIA_KINDS {
            let lhs = pair(&inertia_apply(&x, kind), &y)?;
            let rhs = pair(&inertia_apply(&y, kind), &x)?;
            s.record(symmetry, lhs - rhs);
            let z = match kind {
                InertiaKind::HomogeneousH1 => AlgebraElement::new(x.u.add_constant(-x.u.mean()), x.a),
                _ => x.clone(),
            };
            let back = inertia_invert(&inertia_apply(&z, kind), kind, NullspacePolicy::default())?;
            s.record(roundtrip, back.u.max_abs_diff(&z.u).max((back.a - z.a).abs()));
        }

        let v = AlgebraElement::new(Field::constant(g, rng.random_range(-2.0..2.0)), rng.random_range(-2.0..2.0));
        let ax = inertia_apply(&x, InertiaKind::HomogeneousH1);
        let p = CocycleParams::new(1.0, rng.random_range(-2.0..2.0));
        s.record(
            constant_actor,
            pair(&coadjoint(&v, &ax, p)?, &y)? + pair(&ax, &bracket(&v, &y, p)?)?,
        );

        s.record(exact_derivative, x.u.derivative(1).integrate());
        let lhs = x.u.multiply(&y.u.derivative(1))?.integrate();
        let rhs = -x.u.derivative(1).multiply(&y.u)?.integrate();
        s.record(by_parts, lhs - rhs);
    }
    Ok(s.finish())
}

/// Hamiltonian vector fields, gradients and the frozen Poisson bracket.
pub fn verify_hamiltonian(opts: SuiteOptions) -> Result<SuiteReport> {
    let g = GridSpec::new(opts.n)?;
    let kmax = sampling::band_limit(&g);
    let mut rng = sampling::rng(opts.seed);
    let mut s = Suite::new("hamiltonian", opts);
    let kdv = s.add(Check::at_most("kdv_vector_field", 1e-10));
    let mkdv = s.add(Check::at_most("mkdv_vector_field", 1e-10));
    let grad_kdv = s.add(Check::at_most("kdv_gradient_vs_finite_difference", 1e-6));
    let grad_mkdv = s.add(Check::at_most("mkdv_gradient_vs_finite_difference", 1e-6));
    let antisym = s.add(Check::at_most("poisson_antisymmetry", 1e-10));
    let mean = s.add(Check::at_most("vector_field_preserves_mean", 1e-10));
    let casimir = s.add(Check::at_most("central_coordinate_is_casimir", 0.0));

    for _ in 0..opts.trials {
        let a = rng.random_range(-3.0..3.0);
        // the cubic mKdV term has thrice the band of its argument
        let u = sampling::band_limited_field(g, g.dealias_cutoff() / 3, &mut rng);
        let m = Momentum::new(u.clone(), a);
        let vf = hamiltonian_vf(&grad_h_kdv(&m));
        s.record(kdv, vf.m.max_abs_diff(&rhs_kdv(&u, a)));
        s.record(mean, vf.m.integrate());
        s.record(casimir, vf.c);
        let vf = hamiltonian_vf(&grad_h_mkdv(&m));
        s.record(mkdv, vf.m.max_abs_diff(&rhs_mkdv(&u, a)));
        s.record(mean, vf.m.integrate());
        s.record(casimir, vf.c);

        let dir = random_momentum(g, kmax / 2, &mut rng);
        let m = Momentum::new(sampling::band_limited_field(g, kmax / 2, &mut rng), a);
        let fd = |h: fn(&Momentum) -> f64| {
            let t = 1e-5;
            let at = |s: f64| h(&Momentum::new(&m.m + &(s * &dir.m), m.c + s * dir.c));
            (at(t) - at(-t)) / (2.0 * t)
        };
        for (id, h, grad) in [
            (grad_kdv, h_kdv as fn(&Momentum) -> f64, grad_h_kdv as fn(&Momentum) -> FunctionalGradient),
            (grad_mkdv, h_mkdv, grad_h_mkdv),
        ] {
            let exact = pair(&dir, &grad(&m).0)?;
            s.record(id, (exact - fd(h)) / exact.abs().max(1.0));
        }

        let f = FunctionalGradient(random_element(g, kmax, &mut rng));
        let h = FunctionalGradient(random_element(g, kmax, &mut rng));
        s.record(antisym, poisson_bracket(&f, &h)? + poisson_bracket(&h, &f)?);
    }
    Ok(s.finish())
}

/// Infinitesimal-cocycle pairs are capped at this many per run.
pub const INFINITESIMAL_PAIRS: usize = 10;

/// Bott and Euler cocycles, the connection cochain and the infinitesimal
/// Euler cocycle.
pub fn verify_cocycles(opts: SuiteOptions) -> Result<SuiteReport> {
    let g = GridSpec::new(opts.n)?;
    let mut rng = sampling::rng(opts.seed);
    let mut s = Suite::new("cocycles", opts);
    let bott = s.add(Check::at_most("bott_cocycle_identity", 1e-8));
    let chi = s.add(Check::at_most("euler_cocycle_identity", 1e-8));
    let coboundary = s.add(Check::at_most("euler_cocycle_plus_coboundary", 1e-9));
    let deck = s.add(Check::at_most("connection_deck_equivariance", 1e-12));
    let lift = s.add(Check::at_most("euler_cocycle_lift_independence", 1e-9));
    let normalized = s.add(Check::at_most("identity_normalization", 1e-12));
    let infinitesimal = s.add(Check::at_most("infinitesimal_euler_cocycle_relative", 1e-2));
    let id = LiftedDiffeo::identity(g);

    for trial in 0..opts.trials {
        let alpha = rng.random_range(0.5..2.0);
        let f = sampling::smooth_diffeo(g, &mut rng);
        let h = sampling::smooth_diffeo(g, &mut rng);
        let k = sampling::smooth_diffeo(g, &mut rng);
        s.record(bott, cocycle_defect(bott_cocycle, &f, &h, &k)?);
        let chi_a = |x: &LiftedDiffeo, y: &LiftedDiffeo| euler_cocycle(x, y, alpha);
        s.record(chi, cocycle_defect(chi_a, &f, &h, &k)?);

        let tau = |x: &LiftedDiffeo| connection_cochain(x, 0, alpha);
        let delta_tau = tau(&f) + tau(&h) - tau(&f.compose(&h)?);
        s.record(coboundary, euler_cocycle(&f, &h, alpha)? + delta_tau);

        let shift = rng.random_range(-3..=3);
        let expected = tau(&f) - 2.0 * PI * PI * alpha * shift as f64;
        s.record(deck, connection_cochain(&f, shift, alpha) - expected);

        let lifted = euler_cocycle(&f.deck_translate(shift), &h.deck_translate(-shift), alpha)?;
        s.record(lift, lifted - euler_cocycle(&f, &h, alpha)?);

        s.record(normalized, bott_cocycle(&id, &f)?);
        s.record(normalized, bott_cocycle(&f, &id)?);
        s.record(normalized, euler_cocycle(&id, &f, alpha)?);
        s.record(normalized, euler_cocycle(&f, &id, alpha)?);

        if trial < INFINITESIMAL_PAIRS {
            let kmax = 6;
            let u = sampling::band_limited_field(g, kmax, &mut rng);
            let v = sampling::band_limited_field(g, kmax, &mut rng);
            s.record(infinitesimal, infinitesimal_relative_error(&u, &v, alpha)?);
        }
    }
    Ok(s.finish())
}

/// Relative error of the mixed second difference of `χ^α` against
/// `(α/2)∫uv'`. When that integral is small compared with `‖u‖‖v'‖` the
/// error is measured relative to a tenth of the latter instead.
pub fn infinitesimal_relative_error(u: &Field, v: &Field, alpha: f64) -> Result<f64> {
    let dv = v.derivative(1);
    let expected = 0.5 * alpha * u.inner(&dv)?;
    let scale = 0.1 * 0.5 * alpha * (u.inner(u)? * dv.inner(&dv)?).sqrt();
    let measured = infinitesimal_euler_cocycle(u, v, alpha, 1e-3)?;
    Ok((measured - expected) / expected.abs().max(scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicField {
    Constant,
    Sin,
    Cos,
}

impl GeodesicField {
    pub const NAMES: [&'static str; 3] = ["constant", "sin", "cos"];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "constant" => Some(Self::Constant),
            "sin" => Some(Self::Sin),
            "cos" => Some(Self::Cos),
            _ => None,
        }
    }

    pub fn field(&self, g: GridSpec) -> Field {
        match self {
            Self::Constant => Field::constant(g, 1.0),
            Self::Sin => Field::from_fn(g, f64::sin),
            Self::Cos => Field::from_fn(g, f64::cos),
        }
    }
}

/// Flows the chosen field on `[0, 1]` and tests the Burgers geodesic
/// equation on the result. Only the constant field generates a geodesic;
/// for the others the residual at `t = 0.5` must be visibly non-zero.
pub fn verify_geodesic(field: GeodesicField, opts: SuiteOptions) -> Result<SuiteReport> {
    let g = GridSpec::new(opts.n)?;
    let x = field.field(g);
    let c = flow(&x, 1.0, 1001)?;
    let residuals = geodesic_residual(&c)?;
    let mut s = Suite::new("geodesic", opts);
    match field {
        GeodesicField::Constant => {
            let id = s.add(Check::at_most("geodesic_residual", 1e-7));
            for (_, r) in &residuals {
                s.record(id, r.sup_norm());
            }
            let id = s.add(Check::at_most("velocity_time_independence", 1e-8));
            let first = velocity_field(&c, 1)?;
            for i in (50..c.len() - 1).step_by(50) {
                s.record(id, velocity_field(&c, i)?.max_abs_diff(&first));
            }
        }
        _ => {
            let id = s.add(Check::at_least("residual_at_half_time", 1e-2));
            let i = c.index_near(0.5);
            s.record(id, residuals[i - 1].1.sup_norm());
        }
    }
    // an autonomous flow is transported by its own generator
    let id = s.add(Check::at_most("velocity_matches_generator", 1e-5));
    for i in (100..c.len() - 1).step_by(100) {
        s.record(id, velocity_field(&c, i)?.max_abs_diff(&x));
    }
    Ok(s.finish())
}

/// The shift-reducible equations with their test parameters.
pub fn shift_cases() -> [(NamedEquation, f64); 4] {
    [
        (NamedEquation::GeneralizedKdv { a: 1.0, alpha: 1.0, beta: 3.0 }, 1.0),
        (NamedEquation::HunterSaxton { a: 1.0 }, 0.0),
        (NamedEquation::GeneralizedHsNew { a: 1.0, alpha: 1.0, beta: 1.0 }, 0.0),
        (NamedEquation::GeneralizedH1 { a: 1.0, alpha: 1.0, beta: 3.0 }, 0.0),
    ]
}

/// Integrating-factor configuration used for shift comparisons.
pub fn shift_config(eq: NamedEquation, n: usize, dt: f64, t_end: f64) -> SimConfig {
    SimConfig {
        equation: eq,
        grid: GridConfig { n },
        time: TimeConfig {
            dt,
            t_end,
            output_every: (t_end / dt).round() as usize,
            integrator: Integrator::IntegratingFactorRk4,
            blowup_guard: 1e6,
            gradient_growth: 10.0,
        },
        initial: InitialCondition {
            preset: Default::default(),
            amplitude: 1.0,
            wavenumber: 1,
            mean: 0.0,
            coefficients: vec![],
            variable: Default::default(),
        },
        nullspace: Default::default(),
    }
}

/// Evolves `eq` from `v0` and its canonical form from `v0 - const_shift`,
/// and returns `sup |v(t_end) - const_shift - w(t_end)|`.
pub fn shift_trajectory_defect(eq: NamedEquation, const_shift: f64, canonical: NamedEquation, v0: &Field, t_end: f64) -> Result<f64> {
    let n = v0.len();
    let original = simulate_from(&shift_config(eq, n, 1e-3, t_end), v0)?;
    let reduced = simulate_from(&shift_config(canonical, n, 1e-3, t_end), &v0.add_constant(-const_shift))?;
    let last = original.times.len() - 1;
    let v = original.velocity(last)?;
    let w = reduced.velocity(reduced.times.len() - 1)?;
    Ok(v.add_constant(-const_shift).max_abs_diff(&w))
}

/// Catalogue consistency, fixed points and constant-shift reductions.
pub fn verify_shifts(opts: SuiteOptions) -> Result<SuiteReport> {
    let g = GridSpec::new(opts.n)?;
    let kmax = sampling::band_limit(&g);
    let mut rng = sampling::rng(opts.seed);
    let mut s = Suite::new("shifts", opts);
    let catalogue = s.add(Check::at_most("catalogue_matches_euler_rhs", 1e-10));
    let fixed = s.add(Check::at_most("constants_are_fixed_points", 1e-12));

    for _ in 0..opts.trials {
        let (a, alpha, beta) = (
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        for name in NamedEquation::NAMES {
            let eq = NamedEquation::from_name(name, a, alpha, beta)?;
            let Some(spec) = eq.spec() else { continue };
            let v = match eq.family() {
                InertiaKind::HomogeneousH1 => sampling::zero_mean_field(g, kmax, &mut rng),
                _ => sampling::band_limited_field(g, kmax, &mut rng),
            };
            let m = Momentum::new(eq.momentum_from_velocity(&v), eq.central());
            let generic = euler_rhs(&m, &spec)?;
            s.record(catalogue, generic.m.max_abs_diff(&eq.rhs(&v)).max(generic.c.abs()));
            s.record(fixed, eq.rhs(&Field::constant(g, rng.random_range(-3.0..3.0))).sup_norm());
        }
    }

    let v0 = Field::from_fn(g, f64::sin);
    for (eq, mean) in shift_cases() {
        let id = s.add(Check::at_most(&format!("shift_reduction_{}", eq.name()), 1e-6));
        let start = v0.add_constant(mean);
        let r = shift_reduce(&eq, &start)?;
        s.record(id, shift_trajectory_defect(eq, r.const_shift, r.canonical, &start, 0.5)?);
    }
    Ok(s.finish())
}
