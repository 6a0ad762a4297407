//! Periodic fields on the circle `[0, 2π)`.
//!
//! A [`Field`] holds `n` uniform samples together with (lazily computed)
//! Fourier coefficients `c_k`, normalized so that `f(x) = Σ c_k e^{ikx}`.
//! Coefficients are stored in FFT order: index `i < n/2` is wavenumber `i`,
//! index `i >= n/2` is wavenumber `i - n`. The Nyquist index `n/2` carries
//! wavenumber `-n/2`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Default tolerance on kernel modes for [`NullspacePolicy::Strict`].
pub const KERNEL_TOLERANCE: f64 = 1e-10;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    fft.process(&mut buf);
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

fn inverse(coefficients: &[Complex64]) -> Vec<f64> {
    let n = coefficients.len();
    let mut buf = coefficients.to_vec();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    fft.process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Uniform grid of `n` points on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        TWO_PI / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Wavenumber carried by FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT index of wavenumber `k`, if it is resolved on this grid.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k >= -half && k < half {
            Some(if k >= 0 { k as usize } else { (k + self.n as i64) as usize })
        } else {
            None
        }
    }

    /// Largest wavenumber kept by the 2/3 rule. Chosen so that `3K < n`,
    /// which keeps every aliased product mode outside `[-K, K]`.
    pub fn dealias_cutoff(&self) -> usize {
        (self.n - 1) / 3
    }

    fn check(&self, other: &GridSpec) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

/// `(ik)^order` as used by spectral differentiation on `grid`; the Nyquist
/// mode is dropped for odd orders.
pub fn ik_power(grid: &GridSpec, index: usize, order: u32) -> Complex64 {
    if order % 2 == 1 && index == grid.nyquist_index() {
        return Complex64::new(0.0, 0.0);
    }
    let k = grid.wavenumber(index) as f64;
    Complex64::new(0.0, k).powu(order)
}

/// Real Fourier multiplier `c_k ↦ symbol(k) c_k`.
#[derive(Clone, Copy)]
pub struct MultiplierSymbol {
    name: &'static str,
    symbol: fn(f64) -> f64,
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiplierSymbol({})", self.name)
    }
}

impl MultiplierSymbol {
    pub const fn new(name: &'static str, symbol: fn(f64) -> f64) -> Self {
        Self { name, symbol }
    }

    pub const fn identity() -> Self {
        Self::new("1", |_| 1.0)
    }

    /// Symbol of `1 - ∂²`.
    pub const fn one_plus_k_squared() -> Self {
        Self::new("1+k^2", |k| 1.0 + k * k)
    }

    /// Symbol of `-∂²`; its kernel is the constant mode.
    pub const fn k_squared() -> Self {
        Self::new("k^2", |k| k * k)
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn eval(&self, k: i64) -> f64 {
        (self.symbol)(k as f64)
    }

    pub fn is_kernel(&self, k: i64) -> bool {
        self.eval(k) == 0.0
    }

    pub fn kernel_modes(&self, grid: &GridSpec) -> Vec<i64> {
        (0..grid.len())
            .map(|i| grid.wavenumber(i))
            .filter(|&k| self.is_kernel(k))
            .collect()
    }
}

/// What to do with kernel modes when inverting a degenerate multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NullspacePolicy {
    /// Reject inputs whose kernel modes exceed `tolerance` in magnitude.
    Strict { tolerance: f64 },
    /// Silently drop kernel modes.
    Project,
}

impl Default for NullspacePolicy {
    fn default() -> Self {
        NullspacePolicy::Strict {
            tolerance: KERNEL_TOLERANCE,
        }
    }
}

/// A real 2π-periodic function sampled on a uniform grid.
#[derive(Clone)]
pub struct Field {
    grid: GridSpec,
    values: Arc<[f64]>,
    spectrum: OnceLock<Arc<[Complex64]>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("n", &self.grid.n)
            .field("values", &&self.values[..self.grid.n.min(8)])
            .finish_non_exhaustive()
    }
}

impl Field {
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            grid,
            values: values.into(),
            spectrum: OnceLock::new(),
        })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = grid.points().map(f).collect();
        Self {
            grid,
            values: values.into(),
            spectrum: OnceLock::new(),
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self::from_fn(grid, |_| c)
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Builds a field from coefficients in FFT order. The conjugate-symmetric
    /// part is kept, i.e. the result is the real part of the synthesized signal.
    pub fn from_coefficients(grid: GridSpec, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coefficients.len(),
            });
        }
        Ok(Self::from_spectrum(grid, coefficients))
    }

    /// Builds a real field from `(k, c_k)` pairs for `k >= 0`; the `-k`
    /// coefficients are filled in by conjugation.
    pub fn from_modes(grid: GridSpec, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut spec = vec![Complex64::new(0.0, 0.0); grid.len()];
        for &(k, c) in modes {
            let (i, j) = match (grid.index_of(k), grid.index_of(-k)) {
                (Some(i), Some(j)) => (i, j),
                _ => return Err(Error::Config(format!("wavenumber {k} is not resolved on {} points", grid.len()))),
            };
            if k == 0 {
                spec[i] += Complex64::new(c.re, 0.0);
            } else {
                spec[i] += c;
                spec[j] += c.conj();
            }
        }
        Ok(Self::from_spectrum(grid, spec))
    }

    fn from_spectrum(grid: GridSpec, mut spec: Vec<Complex64>) -> Self {
        let n = grid.len();
        let sym: Vec<Complex64> = (0..n)
            .map(|i| {
                let j = (n - i) % n;
                (spec[i] + spec[j].conj()) * 0.5
            })
            .collect();
        spec.copy_from_slice(&sym);
        let values = inverse(&spec);
        let spectrum = OnceLock::new();
        let _ = spectrum.set(Arc::from(spec));
        Self {
            grid,
            values: values.into(),
            spectrum,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fourier coefficients in FFT order.
    pub fn coefficients(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| forward(&self.values).into())
    }

    /// Coefficient of wavenumber `k` (zero if unresolved).
    pub fn coefficient(&self, k: i64) -> Complex64 {
        match self.grid.index_of(k) {
            Some(i) => self.coefficients()[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    fn map_spectrum(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let spec = self
            .coefficients()
            .iter()
            .enumerate()
            .map(|(i, &c)| f(i, c))
            .collect();
        Self::from_spectrum(self.grid, spec)
    }

    /// Exact spectral derivative `c_k ↦ (ik)^order c_k`.
    pub fn derivative(&self, order: u32) -> Self {
        let grid = self.grid;
        self.map_spectrum(|i, c| c * ik_power(&grid, i, order))
    }

    pub fn apply_multiplier(&self, symbol: &MultiplierSymbol) -> Self {
        let grid = self.grid;
        self.map_spectrum(|i, c| c * symbol.eval(grid.wavenumber(i)))
    }

    /// Inverts `symbol` mode by mode. Kernel modes and the Nyquist mode of
    /// the result are zero, so for `k²` the zero-mean representative is
    /// returned.
    pub fn invert_multiplier(&self, symbol: &MultiplierSymbol, policy: NullspacePolicy) -> Result<Self> {
        let nyq = self.grid.nyquist_index();
        let mut spec = Vec::with_capacity(self.len());
        for (i, &c) in self.coefficients().iter().enumerate() {
            let k = self.grid.wavenumber(i);
            let s = symbol.eval(k);
            if s == 0.0 {
                if let NullspacePolicy::Strict { tolerance } = policy {
                    if c.norm() > tolerance {
                        return Err(Error::KernelObstruction {
                            mode: k,
                            magnitude: c.norm(),
                            tolerance,
                        });
                    }
                }
                spec.push(Complex64::new(0.0, 0.0));
            } else if i == nyq {
                spec.push(Complex64::new(0.0, 0.0));
            } else {
                spec.push(c / s);
            }
        }
        Ok(Self::from_spectrum(self.grid, spec))
    }

    /// Integral over `[0, 2π)`; the trapezoid rule equals `2π c_0`.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Drops all modes with `|k|` above the 2/3-rule cutoff.
    pub fn dealiased(&self) -> Self {
        let cutoff = self.grid.dealias_cutoff() as i64;
        let grid = self.grid;
        self.map_spectrum(|i, c| {
            if grid.wavenumber(i).abs() > cutoff {
                Complex64::new(0.0, 0.0)
            } else {
                c
            }
        })
    }

    /// Dealiased product: both factors and the result are truncated with
    /// the 2/3 rule, which makes the product alias-free.
    pub fn multiply(&self, other: &Field) -> Result<Self> {
        self.grid.check(&other.grid)?;
        let a = self.dealiased();
        let b = other.dealiased();
        let raw: Vec<f64> = a.values.iter().zip(b.values.iter()).map(|(x, y)| x * y).collect();
        Ok(Self::from_values(self.grid, raw)?.dealiased())
    }

    /// Plain pointwise product on the grid, without dealiasing.
    pub fn pointwise_mul(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.check(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(&x, &y)| f(x, y))
            .collect();
        Self::from_values(self.grid, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        Self {
            grid: self.grid,
            values: values.into(),
            spectrum: OnceLock::new(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add_constant(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    /// `∫ f g dx` by the trapezoid rule (exact when `f g` is resolved).
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.grid.check(&other.grid)?;
        let s: f64 = self.values.iter().zip(other.values.iter()).map(|(x, y)| x * y).sum();
        Ok(s * self.grid.spacing())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.values
            .iter()
            .zip(other.values.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Trigonometric interpolant evaluated at an arbitrary `x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let c = self.coefficients();
        let half = self.grid.nyquist_index();
        let z = Complex64::from_polar(1.0, x);
        let mut w = Complex64::new(1.0, 0.0);
        let mut acc = c[0].re;
        for ck in &c[1..half] {
            w *= z;
            acc += 2.0 * (ck * w).re;
        }
        acc + c[half].re * (half as f64 * x).cos()
    }

    /// Derivative of the trigonometric interpolant at `x` (Nyquist mode
    /// excluded, matching [`Field::derivative`]).
    pub fn evaluate_derivative(&self, x: f64) -> f64 {
        let c = self.coefficients();
        let half = self.grid.nyquist_index();
        let z = Complex64::from_polar(1.0, x);
        let mut w = Complex64::new(1.0, 0.0);
        let mut acc = 0.0;
        for (k, ck) in c[1..half].iter().enumerate() {
            w *= z;
            acc += 2.0 * (ck * w * Complex64::new(0.0, (k + 1) as f64)).re;
        }
        acc
    }

    /// `x ↦ f(x - θ)`, applied as the phase shift `c_k e^{-ikθ}`.
    pub fn translate(&self, theta: f64) -> Self {
        let grid = self.grid;
        self.map_spectrum(|i, c| c * Complex64::from_polar(1.0, -(grid.wavenumber(i) as f64) * theta))
    }

    /// CSV with a header row and one `(x_j, value_j)` row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (x, v) in self.grid.points().zip(self.values.iter()) {
            out.push_str(&format!("{x:.17e},{v:.17e}\n"));
        }
        out
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a + b).expect("grid mismatch")
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a - b).expect("grid mismatch")
    }
}

impl Mul<&Field> for f64 {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        rhs.scale(self)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}

/// JSON form: `{n, coefficients: [[re, im], ...]}` with wavenumbers ordered
/// `-n/2, ..., n/2 - 1`.
#[derive(Serialize, Deserialize)]
struct FieldJson {
    n: usize,
    coefficients: Vec<[f64; 2]>,
}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.len();
        let half = (n / 2) as i64;
        let coefficients = (-half..half)
            .map(|k| {
                let c = self.coefficient(k);
                [c.re, c.im]
            })
            .collect();
        FieldJson { n, coefficients }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FieldJson::deserialize(deserializer)?;
        let grid = GridSpec::new(raw.n).map_err(D::Error::custom)?;
        if raw.coefficients.len() != raw.n {
            return Err(D::Error::custom(format!(
                "expected {} coefficients, got {}",
                raw.n,
                raw.coefficients.len()
            )));
        }
        let half = (raw.n / 2) as i64;
        let mut spec = vec![Complex64::new(0.0, 0.0); raw.n];
        for (k, [re, im]) in (-half..half).zip(raw.coefficients) {
            spec[grid.index_of(k).expect("in range")] = Complex64::new(re, im);
        }
        Field::from_coefficients(grid, spec).map_err(D::Error::custom)
    }
}
