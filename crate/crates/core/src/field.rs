//! Uniform periodic grid, complex sampled fields and the spectral
//! operations every other module builds on.
//!
//! The grid covers `[-L, L)` with `N` points, `x_j = -L + j dx`, `dx = 2L/N`.
//! Derivatives are Fourier-collocation derivatives, integrals use the
//! rectangle rule `dx * sum`, which is spectrally accurate for smooth
//! periodic data.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "L")]
    half_length: f64,
    #[serde(rename = "N")]
    n: usize,
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half length must be positive, got {half_length}"
            )));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and at least 8, got {n}"
            )));
        }
        Ok(Self { half_length, n })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    /// Measured from the centre so that `x(N/2 + m) == -x(N/2 - m)` exactly.
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Index of the grid point `x = 0`.
    pub fn center_index(&self) -> usize {
        self.n / 2
    }

    /// Angular wavenumbers in FFT order. The Nyquist entry is kept at its
    /// negative value `-pi/dx`; callers that differentiate zero it out.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n as isize;
        let base = PI / self.half_length;
        (0..n)
            .map(|j| {
                let m = if j < n / 2 { j } else { j - n };
                base * m as f64
            })
            .collect()
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }
}

/// A complex-valued sampled function on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "FieldFile", try_from = "FieldFile")]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidField(format!("sample {j} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Skips the finiteness check; for internal producers that already
    /// guarantee it.
    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn modulus(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: f64) -> Field {
        self.map(|_, z| z * factor)
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Field {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &z)| f(self.grid.x(j), z))
            .collect();
        Field::from_parts(self.grid, values)
    }

    /// Multiplies by `exp(i k x)`.
    pub fn modulate(&self, k: f64) -> Field {
        self.map(|x, z| z * Complex64::from_polar(1.0, k * x))
    }

    /// Translates by an integer number of grid cells (periodic rotation):
    /// the result at `x` is the input at `x - shift * dx`.
    pub fn rotate(&self, shift: isize) -> Field {
        let n = self.grid.len() as isize;
        let values = (0..n)
            .map(|j| self.values[(j - shift).rem_euclid(n) as usize])
            .collect();
        Field::from_parts(self.grid, values)
    }

    /// Discrete `||f||_p^p`.
    pub fn lp_pow(&self, p: i32) -> f64 {
        let dx = self.grid.dx();
        dx * self
            .values
            .iter()
            .map(|z| z.norm_sqr().powf(p as f64 / 2.0))
            .sum::<f64>()
    }

    pub fn l2_sq(&self) -> f64 {
        integrate(&self.grid, &self.density())
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Field::from_parts(self.grid, values))
    }

    /// Discrete L² distance to another field on the same grid.
    pub fn l2_distance(&self, other: &Field) -> Result<f64> {
        Ok(self.sub(other)?.l2_sq().sqrt())
    }

    pub fn to_file(&self) -> FieldFile {
        FieldFile {
            grid: self.grid,
            re: self.values.iter().map(|z| z.re).collect(),
            im: self.values.iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_file(file: FieldFile) -> Result<Self> {
        let grid = Grid::new(file.grid.half_length, file.grid.n)?;
        if file.re.len() != file.im.len() {
            return Err(Error::InvalidField(format!(
                "re has {} samples but im has {}",
                file.re.len(),
                file.im.len()
            )));
        }
        let values = file
            .re
            .into_iter()
            .zip(file.im)
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        Field::new(grid, values)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FieldFile = serde_json::from_str(text)?;
        Field::from_file(file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Field::from_json(&text)
    }
}

/// On-disk field layout: `{"grid": {"L", "N"}, "re": [...], "im": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldFile {
    pub grid: Grid,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<Field> for FieldFile {
    fn from(f: Field) -> Self {
        f.to_file()
    }
}

impl TryFrom<FieldFile> for Field {
    type Error = Error;

    fn try_from(file: FieldFile) -> Result<Self> {
        Field::from_file(file)
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Cached forward/inverse FFT plans for one transform length.
#[derive(Clone)]
pub struct FftPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    n: usize,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            Self {
                forward: p.plan_fft_forward(n),
                inverse: p.plan_fft_inverse(n),
                n,
            }
        })
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Normalized inverse transform.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / self.n as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }
}

/// Fourier-collocation derivative of `samples` (length must match `grid`).
pub(crate) fn spectral_derivative_values(grid: &Grid, samples: &[Complex64]) -> Vec<Complex64> {
    let fft = FftPair::new(grid.len());
    let mut buf = samples.to_vec();
    fft.forward(&mut buf);
    let k = grid.wavenumbers();
    for (z, &kj) in buf.iter_mut().zip(&k) {
        *z *= Complex64::new(0.0, kj);
    }
    buf[grid.nyquist_index()] = Complex64::new(0.0, 0.0);
    fft.inverse(&mut buf);
    buf
}

pub fn spectral_derivative(f: &Field) -> Field {
    Field::from_parts(f.grid, spectral_derivative_values(&f.grid, &f.values))
}

/// Rectangle rule `dx * sum(f)`.
pub fn integrate(grid: &Grid, samples: &[f64]) -> f64 {
    grid.dx() * samples.iter().sum::<f64>()
}

/// `Re ∫ v conj(w) dx`.
pub fn inner_re(v: &Field, w: &Field) -> Result<f64> {
    if v.grid != w.grid {
        return Err(Error::GridMismatch);
    }
    Ok(v.grid.dx()
        * v.values
            .iter()
            .zip(&w.values)
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>())
}

/// Running integral `I(x_j) = ∫_{-L}^{x_j} f`, computed spectrally: the
/// mean of `f` integrates exactly to a linear ramp and the zero-mean
/// remainder through its periodic antiderivative. `I(x_0) = 0`, and the
/// ramp reaches `integrate(grid, f)` at `x = L`.
pub fn cumulative_integral(grid: &Grid, samples: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let fft = FftPair::new(n);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.forward(&mut buf);
    let mean = buf[0].re / n as f64;
    let k = grid.wavenumbers();
    buf[0] = Complex64::new(0.0, 0.0);
    buf[grid.nyquist_index()] = Complex64::new(0.0, 0.0);
    for j in 1..n {
        if j != grid.nyquist_index() {
            buf[j] /= Complex64::new(0.0, k[j]);
        }
    }
    fft.inverse(&mut buf);
    let g0 = buf[0].re;
    (0..n)
        .map(|j| mean * (grid.x(j) + grid.half_length) + buf[j].re - g0)
        .collect()
}
