//! Closed-form soliton profiles.
//!
//! For admissible `(omega, c)` the real profile `Phi` solves
//!
//! ```text
//! -Phi'' + (omega - c^2/4) Phi + (c/2) Phi^3 - (3 gamma / 16) Phi^5 = 0
//! ```
//!
//! and is given explicitly by
//! `Phi^2 = 2 k^2 / (sqrt(c^2 + gamma k^2) cosh(k x) - c)`, `k^2 = 4 omega - c^2`,
//! degenerating to `4 c / ((c x)^2 + gamma)` on the algebraic edge
//! `c = 2 sqrt(omega)`. Two complex profiles are derived from it:
//! `varphi = e^{icx/2} Phi` (gauge frame) and
//! `phi = Phi exp(i c x / 2 - (i/4) ∫_{-L}^x Phi^2)` (original frame).

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{cumulative_integral, Field, Grid};

/// Relative width of the band around `c = 2 sqrt(omega)` treated as the
/// algebraic edge.
const ALGEBRAIC_EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    b: f64,
    gamma: f64,
}

impl ModelParams {
    pub fn new(b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidParameter(format!("b must be finite, got {b}")));
        }
        Ok(Self {
            b,
            gamma: 1.0 + 16.0 * b / 3.0,
        })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Lower speed ratio `s_* = sqrt(-gamma / (1 - gamma))` bounding the
    /// admissible range from above when `gamma <= 0`; `None` for `gamma > 0`.
    pub fn s_lower(&self) -> Option<f64> {
        (self.gamma <= 0.0).then(|| (-self.gamma / (1.0 - self.gamma)).sqrt())
    }

    /// Admissible range of `s = c / (2 sqrt(omega))`: `(lo, hi, hi_included)`.
    pub fn s_range(&self) -> (f64, f64, bool) {
        match self.s_lower() {
            None => (-1.0, 1.0, true),
            Some(s) => (-1.0, -s, false),
        }
    }

    pub fn s_admissible(&self, s: f64) -> bool {
        let (lo, hi, closed) = self.s_range();
        s > lo && (s < hi || (closed && s <= hi * (1.0 + 1e-15)))
    }
}

/// Whether a soliton with frequency `omega` and speed `c` exists.
pub fn existence_region(p: &ModelParams, omega: f64, c: f64) -> Result<bool> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "omega must be positive, got {omega}"
        )));
    }
    if !c.is_finite() {
        return Ok(false);
    }
    Ok(p.s_admissible(c / (2.0 * omega.sqrt())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub params: ModelParams,
    pub omega: f64,
    pub c: f64,
    pub s: f64,
}

impl SolitonParams {
    pub fn new(params: ModelParams, omega: f64, c: f64) -> Result<Self> {
        if !existence_region(&params, omega, c)? {
            return Err(Error::OutsideExistenceRegion {
                b: params.b,
                omega,
                c,
            });
        }
        Ok(Self {
            params,
            omega,
            c,
            s: c / (2.0 * omega.sqrt()),
        })
    }

    /// Parameters on the scaling curve `c = 2 s sqrt(omega)`.
    pub fn from_s(params: ModelParams, omega: f64, s: f64) -> Result<Self> {
        let mut sp = Self::new(params, omega, 2.0 * s * omega.sqrt())?;
        sp.s = s;
        Ok(sp)
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    pub fn is_algebraic(&self) -> bool {
        self.c > 0.0 && self.raw_kappa_sq() <= ALGEBRAIC_EDGE_TOL * 4.0 * self.omega
    }

    fn raw_kappa_sq(&self) -> f64 {
        // (2 sqrt(w) - c)(2 sqrt(w) + c) is exact to a few ulps near the edge.
        let two_root = 2.0 * self.omega.sqrt();
        (two_root - self.c) * (two_root + self.c)
    }

    /// Exponential decay rate squared, `4 omega - c^2` (zero on the algebraic edge).
    pub fn kappa_sq(&self) -> f64 {
        if self.is_algebraic() {
            0.0
        } else {
            self.raw_kappa_sq()
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_sq().sqrt()
    }

    /// `sqrt(c^2 + gamma k^2)`.
    pub fn root_r(&self) -> f64 {
        (self.c * self.c + self.gamma() * self.kappa_sq()).sqrt()
    }
}

/// `sinh(z) / z`, accurate near zero.
fn sinhc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 + z * z / 6.0
    } else {
        z.sinh() / z
    }
}

/// Squared profile `Phi^2(x)`.
pub fn phi_sq(sp: &SolitonParams, x: f64) -> f64 {
    let c = sp.c;
    let g = sp.gamma();
    if sp.is_algebraic() {
        return 4.0 * c / ((c * x).powi(2) + g);
    }
    let k2 = sp.kappa_sq();
    let k = k2.sqrt();
    let r = sp.root_r();
    let kx = k * x.abs();
    if c > 0.0 {
        // R cosh - c = gamma k^2 cosh / (R + c) + 2 c sinh^2(kx/2), so the
        // k^2 factor cancels without loss near the algebraic edge.
        if kx > 700.0 {
            return 0.0;
        }
        let half = 0.5 * x.abs() * sinhc(0.5 * kx);
        2.0 / (g * kx.cosh() / (r + c) + 2.0 * c * half * half)
    } else {
        2.0 * k2 / (r * kx.cosh() - c)
    }
}

/// Analytic mass of the algebraic profile outside `[-L, L]`.
pub fn algebraic_tail_mass(sp: &SolitonParams, half_length: f64) -> f64 {
    let rg = sp.gamma().sqrt();
    8.0 / rg * (rg / (sp.c * half_length)).atan()
}

/// A half length large enough that the profile's truncated tail is below
/// `tail_tol`: `|Phi(L)|^2`-based in the exponential regime, tail mass in
/// the algebraic one.
pub fn suggested_half_length(sp: &SolitonParams, tail_tol: f64) -> f64 {
    if sp.is_algebraic() {
        let rg = sp.gamma().sqrt();
        rg / sp.c / (tail_tol * rg / 8.0).tan()
    } else {
        let k = sp.kappa();
        let peak = phi_sq(sp, 0.0).max(1.0);
        ((peak / tail_tol).ln() + 2.0).max(30.0) / k
    }
}

/// Which of the three profiles to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    /// Real `Phi`.
    #[serde(rename = "Phi")]
    CapitalPhi,
    /// Gauge-frame `e^{icx/2} Phi`.
    #[serde(rename = "varphi")]
    Varphi,
    /// Original-frame profile with the cumulative mass phase.
    #[serde(rename = "phi")]
    Phi,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Phi" => Ok(Profile::CapitalPhi),
            "varphi" => Ok(Profile::Varphi),
            "phi" => Ok(Profile::Phi),
            other => Err(Error::InvalidParameter(format!(
                "unknown profile {other:?} (expected Phi, varphi or phi)"
            ))),
        }
    }
}

pub fn sample(sp: &SolitonParams, g: &Grid, which: Profile) -> Field {
    match which {
        Profile::CapitalPhi => sample_capital_phi(sp, g),
        Profile::Varphi => sample_varphi(sp, g),
        Profile::Phi => sample_phi(sp, g),
    }
}

pub fn sample_capital_phi(sp: &SolitonParams, g: &Grid) -> Field {
    Field::from_real_fn(*g, |x| phi_sq(sp, x).sqrt())
}

pub fn sample_varphi(sp: &SolitonParams, g: &Grid) -> Field {
    let c = sp.c;
    Field::from_fn(*g, |x| Complex64::from_polar(phi_sq(sp, x).sqrt(), 0.5 * c * x))
}

pub fn sample_phi(sp: &SolitonParams, g: &Grid) -> Field {
    let dens: Vec<f64> = g.points().iter().map(|&x| phi_sq(sp, x)).collect();
    let cum = cumulative_integral(g, &dens);
    let values = dens
        .iter()
        .zip(&cum)
        .enumerate()
        .map(|(j, (&d, &m))| Complex64::from_polar(d.sqrt(), 0.5 * sp.c * g.x(j) - 0.25 * m))
        .collect();
    Field::from_parts(*g, values)
}

/// Peak value `Phi(0)^2`; on the algebraic edge `4 c / gamma`.
pub fn peak_sq(sp: &SolitonParams) -> f64 {
    phi_sq(sp, 0.0)
}
