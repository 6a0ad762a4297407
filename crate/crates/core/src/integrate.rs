//! Time stepping and the simulation driver.
//!
//! Trajectories evolve the momentum variable of a [`NamedEquation`] (`v` for
//! the L² family, `v - v''` for H¹, `v''` for Ḣ¹); velocities are recovered
//! by multiplier inversion at every right-hand-side evaluation.
//!
//! Explicit RK4 on KdV-type equations needs roughly `dt ≤ 2.8 / (a (n/2)³)`;
//! the integrating-factor stepper removes that restriction and is the
//! default for anything with a third-derivative term.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Momentum;
use crate::error::{Error, Result};
use crate::euler::NamedEquation;
use crate::hamiltonian::{conserved_quantities, ConservedQuantities};
use crate::spectral::{Field, GridSpec, NullspacePolicy};

/// One classical RK4 step.
pub fn step_rk4<F>(rhs: F, state: &Field, dt: f64) -> Result<Field>
where
    F: Fn(&Field) -> Result<Field>,
{
    let k1 = rhs(state)?;
    let k2 = rhs(&(state + &(0.5 * dt * &k1)))?;
    let k3 = rhs(&(state + &(0.5 * dt * &k2)))?;
    let k4 = rhs(&(state + &(dt * &k3)))?;
    let incr = &(&k1 + &k4) + &(2.0 * &(&k2 + &k3));
    Ok(state + &((dt / 6.0) * &incr))
}

fn apply_diagonal(f: &Field, d: &[Complex64]) -> Field {
    let coeffs = f.coefficients().iter().zip(d).map(|(c, d)| c * d).collect();
    Field::from_coefficients(f.grid(), coeffs).expect("symbol matches grid")
}

/// One integrating-factor RK4 step for `u_t = L u + N(u)` with `L` diagonal
/// in Fourier space (given in FFT order). The linear part is integrated
/// exactly; RK4 is applied to `e^{-Lt} u`.
pub fn step_integrating_factor<F>(linear_symbol: &[Complex64], nonlinear: F, state: &Field, dt: f64) -> Result<Field>
where
    F: Fn(&Field) -> Result<Field>,
{
    if linear_symbol.len() != state.len() {
        return Err(Error::LengthMismatch {
            expected: state.len(),
            got: linear_symbol.len(),
        });
    }
    let half: Vec<Complex64> = linear_symbol.iter().map(|l| (l * (0.5 * dt)).exp()).collect();
    let full: Vec<Complex64> = linear_symbol.iter().map(|l| (l * dt).exp()).collect();

    let k1 = nonlinear(state)?;
    let k2 = nonlinear(&apply_diagonal(&(state + &(0.5 * dt * &k1)), &half))?;
    let e_state = apply_diagonal(state, &half);
    let k3 = nonlinear(&(&e_state + &(0.5 * dt * &k2)))?;
    let k4 = nonlinear(&(&apply_diagonal(state, &full) + &(dt * &apply_diagonal(&k3, &half))))?;

    let mid = apply_diagonal(&(state + &((dt / 6.0) * &k1)), &full);
    let mid_stages = apply_diagonal(&(&k2 + &k3), &half);
    Ok(&(&mid + &((dt / 3.0) * &mid_stages)) + &((dt / 6.0) * &k4))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Rk4,
    IntegratingFactorRk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    None,
    Sin,
    Cos,
    /// `exp(cos(kx) - 1)`
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialVariable {
    /// The field is the velocity `v`; the momentum is derived from it.
    #[default]
    Velocity,
    Momentum,
}

fn one() -> f64 {
    1.0
}

fn one_i() -> i64 {
    1
}

/// `mean + amplitude · preset(wavenumber · x) + Σ Re/Im modes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    #[serde(default)]
    pub preset: Preset,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "one_i")]
    pub wavenumber: i64,
    #[serde(default)]
    pub mean: f64,
    /// `[k, re, im]` triples, added to the preset; the conjugate mode is implied.
    #[serde(default)]
    pub coefficients: Vec<[f64; 3]>,
    #[serde(default)]
    pub variable: InitialVariable,
}

impl InitialCondition {
    pub fn field(&self, grid: GridSpec) -> Result<Field> {
        let (amp, k) = (self.amplitude, self.wavenumber as f64);
        let base = match self.preset {
            Preset::None => Field::zeros(grid),
            Preset::Sin => Field::from_fn(grid, |x| amp * (k * x).sin()),
            Preset::Cos => Field::from_fn(grid, |x| amp * (k * x).cos()),
            Preset::Bump => Field::from_fn(grid, |x| amp * ((k * x).cos() - 1.0).exp()),
        };
        let mut modes = Vec::with_capacity(self.coefficients.len());
        for &[k, re, im] in &self.coefficients {
            if k.fract() != 0.0 || k < 0.0 {
                return Err(Error::Config(format!("coefficient wavenumber {k} must be a non-negative integer")));
            }
            let k = k as i64;
            // a mode and its conjugate both contribute
            let scale = if k == 0 { 1.0 } else { 0.5 };
            modes.push((k, Complex64::new(re, im) * scale));
        }
        let extra = if modes.is_empty() {
            Field::zeros(grid)
        } else {
            Field::from_modes(grid, &modes)?
        };
        Ok((&base + &extra).add_constant(self.mean))
    }
}

fn default_blowup_guard() -> f64 {
    1e6
}

fn default_gradient_growth() -> f64 {
    10.0
}

fn default_output_every() -> usize {
    1
}

fn default_tolerance() -> f64 {
    crate::spectral::KERNEL_TOLERANCE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_output_every")]
    pub output_every: usize,
    pub integrator: Integrator,
    /// Stop when `max(|u|∞, |u_x|∞)` exceeds this.
    #[serde(default = "default_blowup_guard")]
    pub blowup_guard: f64,
    /// Stop when `|u_x|∞` exceeds this multiple of its initial scale
    /// `max(|u₀_x|∞, |u₀|∞, 1)`.
    #[serde(default = "default_gradient_growth")]
    pub gradient_growth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyName {
    #[default]
    Strict,
    Project,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullspaceConfig {
    #[serde(default)]
    pub policy: PolicyName,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl Default for NullspaceConfig {
    fn default() -> Self {
        Self {
            policy: PolicyName::Strict,
            tolerance: default_tolerance(),
        }
    }
}

impl NullspaceConfig {
    pub fn policy(&self) -> NullspacePolicy {
        match self.policy {
            PolicyName::Strict => NullspacePolicy::Strict {
                tolerance: self.tolerance,
            },
            PolicyName::Project => NullspacePolicy::Project,
        }
    }
}

/// Simulation configuration, read from TOML:
///
/// ```toml
/// [equation]
/// name = "kdv"
/// a = 1.0
///
/// [grid]
/// n = 128
///
/// [time]
/// dt = 1e-3
/// t_end = 1.0
/// output_every = 100
/// integrator = "integrating_factor_rk4"
/// blowup_guard = 1e6      # optional
/// gradient_growth = 10.0  # optional
///
/// [initial]
/// preset = "sin"          # none | sin | cos | bump
/// amplitude = 1.0
/// wavenumber = 1
/// mean = 0.0
/// coefficients = [[2, 0.1, 0.0]]   # [k, re, im], coefficient of e^{ikx} + c.c.
/// variable = "velocity"   # or "momentum"
///
/// [nullspace]             # optional
/// policy = "strict"       # or "project"
/// tolerance = 1e-10
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub equation: NamedEquation,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub initial: InitialCondition,
    #[serde(default)]
    pub nullspace: NullspaceConfig,
}

const PRESETS: [(&str, &str); 9] = [
    ("kdv_demo", include_str!("../presets/kdv_demo.toml")),
    ("burgers", include_str!("../presets/burgers.toml")),
    ("kdv", include_str!("../presets/kdv.toml")),
    ("mkdv", include_str!("../presets/mkdv.toml")),
    ("generalized_kdv", include_str!("../presets/generalized_kdv.toml")),
    ("camassa_holm", include_str!("../presets/camassa_holm.toml")),
    ("hunter_saxton", include_str!("../presets/hunter_saxton.toml")),
    ("generalized_hs_new", include_str!("../presets/generalized_hs_new.toml")),
    ("generalized_h1", include_str!("../presets/generalized_h1.toml")),
];

impl SimConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn preset_names() -> impl Iterator<Item = &'static str> {
        PRESETS.iter().map(|(name, _)| *name)
    }

    pub fn preset_source(name: &str) -> Option<&'static str> {
        PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
    }

    pub fn preset(name: &str) -> Option<Self> {
        Self::preset_source(name).map(|s| Self::from_toml_str(s).expect("embedded presets are valid"))
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.time;
        GridSpec::new(self.grid.n)?;
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            return bad("time.dt must be positive");
        }
        if !(t.t_end > 0.0 && t.t_end.is_finite()) {
            return bad("time.t_end must be positive");
        }
        if t.dt > t.t_end {
            return bad("time.dt must not exceed time.t_end");
        }
        if t.output_every == 0 {
            return bad("time.output_every must be at least 1");
        }
        if t.blowup_guard <= 0.0 || t.blowup_guard.is_nan() {
            return bad("time.blowup_guard must be positive");
        }
        if t.gradient_growth <= 0.0 || t.gradient_growth.is_nan() {
            return bad("time.gradient_growth must be positive");
        }
        let k = self.initial.wavenumber.unsigned_abs() as usize;
        if k >= self.grid.n / 2 {
            return bad("initial.wavenumber is not resolved on the grid");
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::new(self.grid.n).expect("validated")
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Blowup { t: f64 },
    KernelObstruction { t: f64 },
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Blowup { .. } => "blowup",
            Termination::KernelObstruction { .. } => "kernel_obstruction",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub equation: NamedEquation,
    pub times: Vec<f64>,
    pub snapshots: Vec<Momentum>,
    pub conserved: Vec<ConservedQuantities>,
    /// Spatial mean of the velocity for the Ḣ¹ family, where the momentum
    /// does not determine it. Zero otherwise.
    pub velocity_offset: f64,
    pub status: Termination,
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &Momentum {
        self.snapshots.last().expect("trajectory has the initial sample")
    }

    pub fn velocity(&self, index: usize) -> Result<Field> {
        self.equation
            .velocity_from_momentum(&self.snapshots[index].m, self.velocity_offset, NullspacePolicy::Project)
    }

    /// `t,x_0,...,x_{n-1}` rows of the momentum field.
    pub fn snapshots_csv(&self) -> String {
        let mut out = String::from("t");
        for j in 0..self.last().m.len() {
            write!(out, ",x_{j}").unwrap();
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.snapshots) {
            write!(out, "{t:.17e}").unwrap();
            for v in s.m.values() {
                write!(out, ",{v:.17e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn conserved_csv(&self) -> String {
        let mut out = String::from(ConservedQuantities::CSV_HEADER);
        out.push('\n');
        for (t, q) in self.times.iter().zip(&self.conserved) {
            out.push_str(&q.csv_row(*t));
            out.push('\n');
        }
        out
    }

    pub fn meta_json(&self, cfg: &SimConfig) -> serde_json::Value {
        serde_json::json!({
            "config": cfg,
            "termination": self.status,
            "steps": self.steps,
            "samples": self.times.len(),
            "final_time": self.times.last(),
            "velocity_offset": self.velocity_offset,
        })
    }

    /// Writes `snapshots.csv`, `conserved.csv` and `meta.json` into `dir`.
    pub fn write_outputs(&self, cfg: &SimConfig, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("snapshots.csv"), self.snapshots_csv())?;
        std::fs::write(dir.join("conserved.csv"), self.conserved_csv())?;
        let meta = serde_json::to_string_pretty(&self.meta_json(cfg)).expect("json");
        std::fs::write(dir.join("meta.json"), meta + "\n")
    }
}

/// Momentum-space right-hand side and (for integrating-factor stepping)
/// its diagonal linear part.
struct System {
    eq: NamedEquation,
    offset: f64,
    policy: NullspacePolicy,
    linear: Option<Vec<Complex64>>,
}

impl System {
    fn full(&self, u: &Field) -> Result<Field> {
        self.eq.momentum_rhs(u, self.offset, self.policy)
    }

    fn nonlinear(&self, u: &Field) -> Result<Field> {
        let full = self.full(u)?;
        let lin = self.linear.as_ref().expect("integrating factor");
        Ok(&full - &apply_diagonal(u, lin))
    }

    fn step(&self, u: &Field, dt: f64) -> Result<Field> {
        match &self.linear {
            None => step_rk4(|s| self.full(s), u, dt),
            Some(lin) => step_integrating_factor(lin, |s| self.nonlinear(s), u, dt),
        }
    }
}

/// Runs `cfg` from `t = 0` to `t_end`. Blow-up and mid-run kernel
/// obstructions end the run with the corresponding [`Termination`];
/// an initial momentum outside the admissible range is an error.
pub fn simulate(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let field = cfg.initial.field(cfg.grid_spec())?;
    simulate_from(cfg, &field)
}

/// As [`simulate`], with the initial field supplied directly instead of by
/// `cfg.initial` (whose `variable` still says how to read it).
pub fn simulate_from(cfg: &SimConfig, field: &Field) -> Result<Trajectory> {
    cfg.validate()?;
    let grid = cfg.grid_spec();
    if field.grid() != grid {
        return Err(Error::GridMismatch {
            left: grid.len(),
            right: field.len(),
        });
    }
    let field = field.clone();
    let eq = cfg.equation;
    let policy = cfg.nullspace.policy();
    let (u0, offset) = match cfg.initial.variable {
        InitialVariable::Velocity => {
            let offset = match eq.family() {
                crate::algebra::InertiaKind::HomogeneousH1 => field.mean(),
                _ => 0.0,
            };
            (eq.momentum_from_velocity(&field), offset)
        }
        InitialVariable::Momentum => (field, 0.0),
    };
    let linear = match cfg.time.integrator {
        Integrator::Rk4 => None,
        Integrator::IntegratingFactorRk4 => Some(eq.linear_symbol(&grid, offset)),
    };
    let system = System {
        eq,
        offset,
        policy,
        linear,
    };
    // surfaces an inadmissible initial momentum before any stepping
    system.full(&u0)?;

    let central = eq.central();
    let record = |u: &Field| Momentum::new(u.clone(), central);
    let gradient_scale = u0.derivative(1).sup_norm().max(u0.sup_norm()).max(1.0);
    let gradient_guard = cfg.time.gradient_growth * gradient_scale;

    let dt = cfg.time.dt;
    let n_steps = (cfg.time.t_end / dt).round().max(1.0) as usize;
    let mut traj = Trajectory {
        equation: eq,
        times: vec![0.0],
        snapshots: vec![record(&u0)],
        conserved: vec![conserved_quantities(&record(&u0), &eq)],
        velocity_offset: offset,
        status: Termination::Completed,
        steps: 0,
    };
    let mut u = u0;
    for step in 1..=n_steps {
        let t = step as f64 * dt;
        let next = match system.step(&u, dt) {
            Ok(next) => next,
            Err(Error::KernelObstruction { .. }) => {
                traj.status = Termination::KernelObstruction { t };
                break;
            }
            Err(e) => return Err(e),
        };
        traj.steps = step;
        if !next.is_finite() {
            traj.status = Termination::Blowup { t };
            break;
        }
        let gradient = next.derivative(1).sup_norm();
        let blown = next.sup_norm().max(gradient) > cfg.time.blowup_guard || gradient > gradient_guard;
        u = next;
        if blown || step % cfg.time.output_every == 0 || step == n_steps {
            let m = record(&u);
            traj.conserved.push(conserved_quantities(&m, &eq));
            traj.snapshots.push(m);
            traj.times.push(t);
        }
        if blown {
            traj.status = Termination::Blowup { t };
            break;
        }
    }
    Ok(traj)
}
