//! Scalar functionals in both frames.
//!
//! Everything is assembled from six discrete integrals of a field `u`:
//!
//! | symbol | integral |
//! |---|---|
//! | `g`  | `‖u_x‖²` |
//! | `M`  | `‖u‖²` |
//! | `p`  | `⟨i u_x, u⟩` |
//! | `q`  | `⟨i |u|² u_x, u⟩` |
//! | `l4` | `‖u‖₄⁴` |
//! | `l6` | `‖u‖₆⁶` |
//!
//! with `⟨v, w⟩ = Re ∫ v conj(w)`. The original (DNLS) frame uses
//! `E = g/2 - q/4 - (b/6) l6` and `P = p`; the gauge frame uses
//! `E = g/2 - (gamma/32) l6` and `P = p + l4/4`.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closedform::d_value;
use crate::error::{Error, Result};
use crate::field::{spectral_derivative, Field};
use crate::solitons::{ModelParams, SolitonParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Dnls,
    Gauge,
}

impl FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dnls" => Ok(Frame::Dnls),
            "gauge" => Ok(Frame::Gauge),
            other => Err(Error::InvalidParameter(format!("unknown frame {other:?}"))),
        }
    }
}

/// The six base integrals of a field.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Norms {
    pub grad_sq: f64,
    pub mass: f64,
    pub p_lin: f64,
    pub interaction: f64,
    pub l4: f64,
    pub l6: f64,
}

impl Norms {
    pub fn of(f: &Field) -> Self {
        let d = spectral_derivative(f);
        let dx = f.grid().dx();
        let mut n = Norms::default();
        for (u, ux) in f.values().iter().zip(d.values()) {
            let rho = u.norm_sqr();
            // Re(i ux conj(u)) = -Im(ux conj(u))
            let cur = -(ux * u.conj()).im;
            n.grad_sq += ux.norm_sqr();
            n.mass += rho;
            n.p_lin += cur;
            n.interaction += rho * cur;
            n.l4 += rho * rho;
            n.l6 += rho * rho * rho;
        }
        n.grad_sq *= dx;
        n.mass *= dx;
        n.p_lin *= dx;
        n.interaction *= dx;
        n.l4 *= dx;
        n.l6 *= dx;
        n
    }

    pub fn energy(&self, p: &ModelParams, frame: Frame) -> f64 {
        match frame {
            Frame::Dnls => 0.5 * self.grad_sq - 0.25 * self.interaction - p.b() / 6.0 * self.l6,
            Frame::Gauge => 0.5 * self.grad_sq - p.gamma() / 32.0 * self.l6,
        }
    }

    pub fn momentum(&self, frame: Frame) -> f64 {
        match frame {
            Frame::Dnls => self.p_lin,
            Frame::Gauge => self.p_lin + 0.25 * self.l4,
        }
    }

    /// Energy conserved by the gauge-`a` equation.
    pub fn energy_a(&self, p: &ModelParams, a: f64) -> f64 {
        0.5 * self.grad_sq + (a - 0.25) * self.interaction + (0.5 * a * a - 0.25 * a - p.b() / 6.0) * self.l6
    }

    /// Momentum conserved by the gauge-`a` equation.
    pub fn momentum_a(&self, a: f64) -> f64 {
        self.p_lin + a * self.l4
    }

    pub fn action(&self, p: &ModelParams, omega: f64, c: f64, frame: Frame) -> f64 {
        self.energy(p, frame) + 0.5 * omega * self.mass + 0.5 * c * self.momentum(frame)
    }

    /// `d/dλ S(λu)` at `λ = 1`.
    pub fn nehari(&self, p: &ModelParams, omega: f64, c: f64, frame: Frame) -> f64 {
        let quad = self.grad_sq + omega * self.mass + c * self.p_lin;
        match frame {
            Frame::Dnls => quad - self.interaction - p.b() * self.l6,
            Frame::Gauge => quad + 0.5 * c * self.l4 - 3.0 * p.gamma() / 16.0 * self.l6,
        }
    }

    pub fn ell(&self, omega: f64, c: f64) -> f64 {
        self.grad_sq + omega * self.mass + c * self.p_lin
    }

    pub fn ii(&self, p: &ModelParams, omega: f64, c: f64, frame: Frame) -> f64 {
        self.action(p, omega, c, frame) - 0.25 * self.nehari(p, omega, c, frame)
    }

    /// Norms of `λ u`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let l2 = lambda * lambda;
        Norms {
            grad_sq: l2 * self.grad_sq,
            mass: l2 * self.mass,
            p_lin: l2 * self.p_lin,
            interaction: l2 * l2 * self.interaction,
            l4: l2 * l2 * self.l4,
            l6: l2 * l2 * l2 * self.l6,
        }
    }

    /// Norms of `e^{iμx} u`.
    pub fn modulated(&self, mu: f64) -> Self {
        Norms {
            grad_sq: self.grad_sq + mu * mu * self.mass - 2.0 * mu * self.p_lin,
            p_lin: self.p_lin - mu * self.mass,
            interaction: self.interaction - mu * self.l4,
            ..*self
        }
    }
}

pub fn energy(f: &Field, p: &ModelParams, frame: Frame) -> f64 {
    Norms::of(f).energy(p, frame)
}

pub fn mass(f: &Field) -> f64 {
    f.l2_sq()
}

pub fn momentum(f: &Field, frame: Frame) -> f64 {
    Norms::of(f).momentum(frame)
}

pub fn action(f: &Field, p: &ModelParams, omega: f64, c: f64, frame: Frame) -> f64 {
    Norms::of(f).action(p, omega, c, frame)
}

pub fn nehari(f: &Field, p: &ModelParams, omega: f64, c: f64, frame: Frame) -> f64 {
    Norms::of(f).nehari(p, omega, c, frame)
}

pub fn ell(f: &Field, omega: f64, c: f64) -> f64 {
    Norms::of(f).ell(omega, c)
}

pub fn ii(f: &Field, p: &ModelParams, omega: f64, c: f64, frame: Frame) -> f64 {
    Norms::of(f).ii(p, omega, c, frame)
}

/// `‖f‖₆⁶ / ((4/π²) ‖f‖₂⁴ ‖f_x‖₂²)`, at most one for every `f`.
pub fn gn_ratio(f: &Field) -> Result<f64> {
    let n = Norms::of(f);
    let denom = 4.0 / (PI * PI) * n.mass * n.mass * n.grad_sq;
    if !(denom > 0.0) {
        return Err(Error::InvalidField("ratio undefined for a constant or zero field".into()));
    }
    Ok(n.l6 / denom)
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionalReport {
    pub frame: Frame,
    pub omega: f64,
    pub c: f64,
    pub energy: f64,
    pub mass: f64,
    pub momentum: f64,
    pub action: f64,
    pub nehari: f64,
    pub ell: f64,
    pub ii: f64,
    pub l6: f64,
    /// Soliton action level when `(omega, c)` is admissible.
    pub d: Option<f64>,
}

pub fn report(f: &Field, p: &ModelParams, omega: f64, c: f64, frame: Frame) -> FunctionalReport {
    from_norms(&Norms::of(f), p, omega, c, frame)
}

pub fn from_norms(n: &Norms, p: &ModelParams, omega: f64, c: f64, frame: Frame) -> FunctionalReport {
    let d = SolitonParams::new(*p, omega, c).ok().map(|sp| d_value(&sp));
    FunctionalReport {
        frame,
        omega,
        c,
        energy: n.energy(p, frame),
        mass: n.mass,
        momentum: n.momentum(frame),
        action: n.action(p, omega, c, frame),
        nehari: n.nehari(p, omega, c, frame),
        ell: n.ell(omega, c),
        ii: n.ii(p, omega, c, frame),
        l6: n.l6,
        d,
    }
}
