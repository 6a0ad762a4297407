//! Lifted circle diffeomorphisms and group-level cocycles.
//!
//! A [`LiftedDiffeo`] is an increasing map `f̃(x) = x + p(x)` of the real line
//! with `p` 2π-periodic, so `f̃(x + 2π) = f̃(x) + 2π`. Off-grid values of `p`
//! come from its trigonometric interpolant, which is exact for band-limited
//! displacements.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{Field, GridSpec, TWO_PI};

#[derive(Debug, Clone)]
pub struct LiftedDiffeo {
    p: Field,
}

impl LiftedDiffeo {
    /// Wraps a displacement, rejecting maps with `1 + p' <= 0` at a grid point.
    pub fn new(p: Field) -> Result<Self> {
        let f = Self { p };
        let min_derivative = f.min_derivative();
        if min_derivative <= 0.0 || !min_derivative.is_finite() {
            return Err(Error::NonMonotone { min_derivative });
        }
        Ok(f)
    }

    pub fn identity(grid: GridSpec) -> Self {
        Self { p: Field::zeros(grid) }
    }

    pub fn rotation(grid: GridSpec, theta: f64) -> Self {
        Self {
            p: Field::constant(grid, theta),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.p.grid()
    }

    pub fn displacement(&self) -> &Field {
        &self.p
    }

    pub fn eval(&self, x: f64) -> f64 {
        x + self.p.evaluate(x)
    }

    pub fn eval_derivative(&self, x: f64) -> f64 {
        1.0 + self.p.evaluate_derivative(x)
    }

    /// `f̃'` on the grid.
    pub fn derivative_field(&self) -> Field {
        self.p.derivative(1).add_constant(1.0)
    }

    pub fn min_derivative(&self) -> f64 {
        self.derivative_field().values().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The lift `f̃ + 2πk` of the same circle map.
    pub fn deck_translate(&self, k: i64) -> Self {
        Self {
            p: self.p.add_constant(TWO_PI * k as f64),
        }
    }

    /// Lift normalized so that `f̃(0) ∈ [0, 2π)`.
    pub fn canonical(&self) -> Self {
        let k = (self.p.values()[0] / TWO_PI).floor() as i64;
        self.deck_translate(-k)
    }

    /// `x ↦ f̃(g̃(x))`.
    pub fn compose(&self, g: &LiftedDiffeo) -> Result<Self> {
        if self.grid() != g.grid() {
            return Err(Error::GridMismatch {
                left: self.grid().len(),
                right: g.grid().len(),
            });
        }
        let grid = g.grid();
        let values = grid
            .points()
            .zip(g.p.values())
            .map(|(x, &pg)| pg + self.p.evaluate(x + pg))
            .collect();
        Self::new(Field::from_values(grid, values)?)
    }

    /// Inverse lift, by Newton iteration on `y + p(y) = x_j` at each grid point.
    pub fn invert(&self) -> Result<Self> {
        let min_derivative = self.min_derivative();
        if min_derivative <= 0.0 {
            return Err(Error::NonMonotone { min_derivative });
        }
        let grid = self.grid();
        let mut values = Vec::with_capacity(grid.len());
        for x in grid.points() {
            let mut y = x - self.p.evaluate(x);
            let mut converged = false;
            for _ in 0..60 {
                let step = (self.eval(y) - x) / self.eval_derivative(y);
                y -= step;
                if step.abs() <= 1e-15 * (1.0 + y.abs()) {
                    converged = true;
                    break;
                }
            }
            if !converged || !y.is_finite() {
                return Err(Error::InversionFailed { x });
            }
            values.push(y - x);
        }
        Self::new(Field::from_values(grid, values)?)
    }

    /// Sup-norm distance between displacements, i.e. between the lifts.
    pub fn distance(&self, other: &LiftedDiffeo) -> f64 {
        self.p.max_abs_diff(&other.p)
    }
}

/// `B(φ, ψ) = ½ ∫ log((φ∘ψ)') d log ψ'`, evaluated as
/// `½ ∫ log(φ'(ψ) ψ') ψ''/ψ' dx` by spectral quadrature.
pub fn bott_cocycle(phi: &LiftedDiffeo, psi: &LiftedDiffeo) -> Result<f64> {
    let grid = psi.grid();
    let dpsi = psi.derivative_field();
    let ddpsi = psi.p.derivative(2);
    let mut acc = 0.0;
    for ((x, &d1), &d2) in grid.points().zip(dpsi.values()).zip(ddpsi.values()) {
        let chain = phi.eval_derivative(psi.eval(x)) * d1;
        if chain <= 0.0 || d1 <= 0.0 {
            return Err(Error::NonMonotone {
                min_derivative: chain.min(d1),
            });
        }
        acc += chain.ln() * d2 / d1;
    }
    Ok(0.5 * acc * grid.spacing())
}

/// `∫₀^{2π} f̃(x) dx` for the lift `f̃ = x + p`: the `x` part is integrated
/// exactly, the periodic part by the trapezoid rule.
fn lift_integral(f: &LiftedDiffeo) -> f64 {
    2.0 * PI * PI + f.p.integrate()
}

/// `τ^α(f̃) = -(α/2) ∫₀^{2π} f̃ dx + π²α` for the lift `f̃ + 2π·lift_offset`.
pub fn connection_cochain(f: &LiftedDiffeo, lift_offset: i64, alpha: f64) -> f64 {
    -0.5 * alpha * lift_integral(&f.deck_translate(lift_offset)) + PI * PI * alpha
}

/// `χ^α(f₁, f₂) = (α/2) ∫₀^{2π} (f̃₁ + f̃₂ - f̃₁∘f̃₂) dx - π²α`.
pub fn euler_cocycle(f1: &LiftedDiffeo, f2: &LiftedDiffeo, alpha: f64) -> Result<f64> {
    let composite = f1.compose(f2)?;
    // x + x - x leaves a single ∫x = 2π²
    let periodic = f1.p.integrate() + f2.p.integrate() - composite.p.integrate();
    Ok(0.5 * alpha * (2.0 * PI * PI + periodic) - PI * PI * alpha)
}

/// `δc(f, g, h) = c(g, h) - c(f∘g, h) + c(f, g∘h) - c(f, g)`.
pub fn cocycle_defect<C>(c: C, f: &LiftedDiffeo, g: &LiftedDiffeo, h: &LiftedDiffeo) -> Result<f64>
where
    C: Fn(&LiftedDiffeo, &LiftedDiffeo) -> Result<f64>,
{
    let fg = f.compose(g)?;
    let gh = g.compose(h)?;
    Ok(c(g, h)? - c(&fg, h)? + c(f, &gh)? - c(f, g)?)
}

/// Samples of the flow `c(·, t)` of an autonomous vector field.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub times: Vec<f64>,
    pub maps: Vec<LiftedDiffeo>,
}

impl FlowResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Uniform spacing between samples.
    pub fn sample_step(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    /// Index of the sample closest to `t`.
    pub fn index_near(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &ti) in self.times.iter().enumerate() {
            if (ti - t).abs() < (self.times[best] - t).abs() {
                best = i;
            }
        }
        best
    }

    fn check_interior(&self, index: usize) -> Result<()> {
        if self.len() < 3 {
            return Err(Error::InsufficientSamples {
                needed: 3,
                got: self.len(),
            });
        }
        if index == 0 || index + 1 >= self.len() {
            return Err(Error::NotInterior { index, len: self.len() });
        }
        Ok(())
    }

    // central difference of the displacement in time
    fn time_derivative(&self, index: usize) -> Field {
        let dt = self.sample_step();
        let ahead = self.maps[index + 1].displacement();
        let behind = self.maps[index - 1].displacement();
        (1.0 / (2.0 * dt)) * &(ahead - behind)
    }
}

/// Integrates `ẋ = X(x)` from every grid point with RK4, recording
/// `n_samples` uniformly spaced maps on `[0, t_end]` (`t_end` may be
/// negative). Off-grid values of `X` use its trigonometric interpolant.
pub fn flow(x_field: &Field, t_end: f64, n_samples: usize) -> Result<FlowResult> {
    if n_samples < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: n_samples,
        });
    }
    let grid = x_field.grid();
    let sample_dt = t_end / (n_samples - 1) as f64;
    let stiffness = x_field.derivative(1).sup_norm().max(1.0);
    let substeps = ((sample_dt.abs() * stiffness / 1e-3).ceil() as usize).max(1);
    let h = sample_dt / substeps as f64;

    let vel = |ys: &[f64]| -> Vec<f64> { ys.iter().map(|&y| x_field.evaluate(y)).collect() };
    let axpy = |ys: &[f64], k: &[f64], s: f64| -> Vec<f64> { ys.iter().zip(k).map(|(y, k)| y + s * k).collect() };

    let mut ys: Vec<f64> = grid.points().collect();
    let mut times = vec![0.0];
    let mut maps = vec![LiftedDiffeo::identity(grid)];
    for i in 1..n_samples {
        for _ in 0..substeps {
            let k1 = vel(&ys);
            let k2 = vel(&axpy(&ys, &k1, 0.5 * h));
            let k3 = vel(&axpy(&ys, &k2, 0.5 * h));
            let k4 = vel(&axpy(&ys, &k3, h));
            for j in 0..ys.len() {
                ys[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        let p: Vec<f64> = ys.iter().zip(grid.points()).map(|(y, x)| y - x).collect();
        times.push(i as f64 * sample_dt);
        maps.push(LiftedDiffeo::new(Field::from_values(grid, p)?)?);
    }
    Ok(FlowResult { times, maps })
}

/// `2 c_tx c_t + c_tt c_x` at every interior sample, with time derivatives
/// by central differences and space derivatives spectral.
pub fn geodesic_residual(c: &FlowResult) -> Result<Vec<(f64, Field)>> {
    if c.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: c.len(),
        });
    }
    let dt = c.sample_step();
    let mut out = Vec::with_capacity(c.len() - 2);
    for i in 1..c.len() - 1 {
        let p_minus = c.maps[i - 1].displacement();
        let p = c.maps[i].displacement();
        let p_plus = c.maps[i + 1].displacement();
        let c_t = c.time_derivative(i);
        let c_tt = (1.0 / (dt * dt)) * &(&(p_plus - &(2.0 * p)) + p_minus);
        let c_x = c.maps[i].derivative_field();
        let c_tx = c_t.derivative(1);
        let residual = &(2.0 * &c_tx.pointwise_mul(&c_t)?) + &c_tt.pointwise_mul(&c_x)?;
        out.push((c.times[i], residual));
    }
    Ok(out)
}

/// Right-translated velocity `u(·, t) = c_t(·, t) ∘ c(·, t)⁻¹` at the
/// interior sample `index`.
pub fn velocity_field(c: &FlowResult, index: usize) -> Result<Field> {
    c.check_interior(index)?;
    let c_t = c.time_derivative(index);
    let inverse = c.maps[index].invert()?;
    let grid = c_t.grid();
    let values = grid
        .points()
        .map(|x| c_t.evaluate(inverse.eval(x)))
        .collect();
    Field::from_values(grid, values)
}

/// Mixed second difference of `χ^α(c_u(t), c_v(s))` at `t = s = 0`, which
/// approximates the algebra cocycle `(α/2) ∫ u v' dx`.
pub fn infinitesimal_euler_cocycle(u: &Field, v: &Field, alpha: f64, h: f64) -> Result<f64> {
    let end = |x: &Field, t: f64| -> Result<LiftedDiffeo> { Ok(flow(x, t, 2)?.maps.pop().expect("two samples")) };
    let (up, um) = (end(u, h)?, end(u, -h)?);
    let (vp, vm) = (end(v, h)?, end(v, -h)?);
    let chi = |a: &LiftedDiffeo, b: &LiftedDiffeo| euler_cocycle(a, b, alpha);
    Ok((chi(&up, &vp)? - chi(&up, &vm)? - chi(&um, &vp)? + chi(&um, &vm)?) / (4.0 * h * h))
}
