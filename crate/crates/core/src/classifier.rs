//! Potential-well membership along scaling curves.
//!
//! For a fixed field the action and the Nehari functional restricted to the
//! curve `(omega, c) = (mu^2, 2 s mu)` are quadratics in `mu`:
//!
//! ```text
//! f_s(mu) = S - d = E + (mu^2 / 2)(M - 2 d(1,2s)) + s mu P
//! K(mu)          = M mu^2 + k1 s mu + k0
//! ```
//!
//! so the well `{mu : f_s < 0}` and the sign of `K` on it are found exactly
//! from root analysis, without sampling `mu`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::closedform::{d_on_curve, d_value, mass_threshold, s_star};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::functionals::{Frame, Norms};
use crate::solitons::{ModelParams, SolitonParams};

const CRITICAL_B: f64 = -3.0 / 16.0;
const SEARCH_CAP: f64 = (1u64 << 30) as f64;

/// Scalar invariants of a field in one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarInvariants {
    pub frame: Frame,
    pub grad_sq: f64,
    pub mass: f64,
    pub p_lin: f64,
    pub l4: f64,
    pub l6: f64,
    pub energy: f64,
    pub momentum: f64,
    /// `⟨i|u|² u_x, u⟩`, needed by the original-frame energy.
    pub interaction: f64,
}

impl ScalarInvariants {
    pub fn from_norms(n: &Norms, p: &ModelParams, frame: Frame) -> Self {
        Self {
            frame,
            grad_sq: n.grad_sq,
            mass: n.mass,
            p_lin: n.p_lin,
            l4: n.l4,
            l6: n.l6,
            energy: n.energy(p, frame),
            momentum: n.momentum(frame),
            interaction: n.interaction,
        }
    }

    pub fn norms(&self) -> Norms {
        Norms {
            grad_sq: self.grad_sq,
            mass: self.mass,
            p_lin: self.p_lin,
            interaction: self.interaction,
            l4: self.l4,
            l6: self.l6,
        }
    }

    /// Invariants of `λ φ`.
    pub fn scaled(&self, p: &ModelParams, lambda: f64) -> Self {
        Self::from_norms(&self.norms().scaled(lambda), p, self.frame)
    }

    /// Invariants of `e^{iμx} φ`.
    pub fn modulated(&self, p: &ModelParams, mu: f64) -> Self {
        Self::from_norms(&self.norms().modulated(mu), p, self.frame)
    }

    pub fn action(&self, p: &ModelParams, omega: f64, c: f64) -> f64 {
        self.norms().action(p, omega, c, self.frame)
    }

    pub fn nehari(&self, p: &ModelParams, omega: f64, c: f64) -> f64 {
        self.norms().nehari(p, omega, c, self.frame)
    }

    /// Coefficients `(k0, k1)` of `K(mu) = M mu^2 + k1 s mu + k0` on the
    /// scaling curve.
    fn nehari_curve_coeffs(&self, p: &ModelParams) -> (f64, f64) {
        match self.frame {
            Frame::Gauge => (
                self.grad_sq - 3.0 * p.gamma() / 16.0 * self.l6,
                2.0 * self.p_lin + self.l4,
            ),
            Frame::Dnls => (self.grad_sq - self.interaction - p.b() * self.l6, 2.0 * self.p_lin),
        }
    }
}

pub fn invariant_summary(f: &Field, p: &ModelParams, frame: Frame) -> ScalarInvariants {
    ScalarInvariants::from_norms(&Norms::of(f), p, frame)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub in_a: bool,
    pub k_sign: i8,
    pub action: f64,
    pub d: f64,
    pub nehari: f64,
}

/// Membership of a single well `A_{omega,c}` and the sign of `K_{omega,c}`.
/// Values within `1e-6` relative of the boundary count as on it
/// (`in_a = false`, `k_sign = 0`).
pub fn member(si: &ScalarInvariants, p: &ModelParams, omega: f64, c: f64) -> Result<Membership> {
    let d = d_value(&SolitonParams::new(*p, omega, c)?);
    let action = si.action(p, omega, c);
    let nehari = si.nehari(p, omega, c);
    let in_a = action < d - 1e-6 * (action.abs() + d);
    let k_tol = 1e-6 * (si.grad_sq + omega * si.mass);
    let k_sign = if nehari.abs() <= k_tol { 0 } else if nehari > 0.0 { 1 } else { -1 };
    Ok(Membership { in_a, k_sign, action, d, nehari })
}

/// Open interval of `mu > 0`; `hi = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuInterval {
    pub lo: f64,
    pub hi: Option<f64>,
}

impl MuInterval {
    pub fn contains(&self, mu: f64) -> bool {
        mu > self.lo && self.hi.is_none_or(|h| mu < h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    APlus,
    AMinus,
    Both,
    Neither,
}

impl Verdict {
    fn from_flags(plus: bool, minus: bool) -> Self {
        match (plus, minus) {
            (true, true) => Verdict::Both,
            (true, false) => Verdict::APlus,
            (false, true) => Verdict::AMinus,
            (false, false) => Verdict::Neither,
        }
    }

    pub fn has_plus(self) -> bool {
        matches!(self, Verdict::APlus | Verdict::Both)
    }

    pub fn has_minus(self) -> bool {
        matches!(self, Verdict::AMinus | Verdict::Both)
    }
}

/// Range of `K` over one component of the well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KRange {
    pub interval: MuInterval,
    pub k_inf: f64,
    /// `None` when `K` is unbounded above on the component.
    pub k_sup: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveVerdict {
    pub s: f64,
    pub verdict: Verdict,
    pub well: Vec<KRange>,
}

/// `{mu > 0 : a mu^2 + b mu + c < 0}`.
fn negative_set(a: f64, b: f64, c: f64) -> Vec<MuInterval> {
    let all = MuInterval { lo: 0.0, hi: None };
    if a == 0.0 {
        return if b > 0.0 {
            let r = -c / b;
            if r > 0.0 { vec![MuInterval { lo: 0.0, hi: Some(r) }] } else { vec![] }
        } else if b < 0.0 {
            vec![MuInterval { lo: (-c / b).max(0.0), hi: None }]
        } else if c < 0.0 {
            vec![all]
        } else {
            vec![]
        };
    }
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        return if a < 0.0 { vec![all] } else { vec![] };
    }
    let q = -0.5 * (b + disc.sqrt().copysign(b));
    let (mut r1, mut r2) = (q / a, c / q);
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    if a > 0.0 {
        if r2 <= 0.0 {
            vec![]
        } else {
            vec![MuInterval { lo: r1.max(0.0), hi: Some(r2) }]
        }
    } else {
        let mut out = Vec::new();
        if r1 > 0.0 {
            out.push(MuInterval { lo: 0.0, hi: Some(r1) });
        }
        out.push(MuInterval { lo: r2.max(0.0), hi: None });
        out
    }
}

fn quad_range(a: f64, b: f64, c: f64, iv: &MuInterval) -> (f64, Option<f64>) {
    let k = |mu: f64| (a * mu + b) * mu + c;
    let vertex = -b / (2.0 * a);
    let inf_at = match iv.hi {
        Some(h) => vertex.clamp(iv.lo, h),
        None => vertex.max(iv.lo),
    };
    let sup = iv.hi.map(|h| k(iv.lo).max(k(h)));
    (k(inf_at), sup)
}

/// The curve `s` viewed from one field: its well on the curve and the sign
/// pattern of `K` there.
pub fn scan_curve(si: &ScalarInvariants, p: &ModelParams, s: f64) -> Result<CurveVerdict> {
    if !p.s_admissible(s) {
        return Err(Error::InvalidParameter(format!("s = {s} is not admissible for b = {}", p.b())));
    }
    let d1 = d_on_curve(p.b(), s)?;
    let well_set = negative_set(0.5 * (si.mass - 2.0 * d1), s * si.momentum, si.energy);
    let (k0, k1) = si.nehari_curve_coeffs(p);
    let mut plus = false;
    let mut minus = false;
    let well: Vec<KRange> = well_set
        .into_iter()
        .map(|iv| {
            let (k_inf, k_sup) = quad_range(si.mass, s * k1, k0, &iv);
            plus |= k_sup.is_none_or(|v| v >= 0.0);
            minus |= k_inf < 0.0;
            KRange { interval: iv, k_inf, k_sup }
        })
        .collect();
    Ok(CurveVerdict { s, verdict: Verdict::from_flags(plus, minus), well })
}

/// A point `(omega, c)` on curve `s` where the field sits in `A^+_{omega,c}`,
/// with the resulting bound `8 S + (c^2/2) M` on `‖v_x(t)‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub s: f64,
    pub omega: f64,
    pub c: f64,
    pub action: f64,
    pub nehari: f64,
    pub gradient_bound: f64,
}

/// Finds a `mu` on curve `s` where the well holds with margin and `K > 0`.
pub fn plus_witness(si: &ScalarInvariants, p: &ModelParams, s: f64) -> Result<Option<Witness>> {
    let cv = scan_curve(si, p, s)?;
    let d1 = d_on_curve(p.b(), s)?;
    let f = |mu: f64| si.energy + 0.5 * mu * mu * (si.mass - 2.0 * d1) + s * mu * si.momentum;
    let (k0, k1) = si.nehari_curve_coeffs(p);
    let k = |mu: f64| (si.mass * mu + s * k1) * mu + k0;
    let strict = |mu: f64| {
        let d = mu * mu * d1;
        let action = f(mu) + d;
        f(mu) < -1e-6 * (action.abs() + d) && k(mu) > 1e-6 * (si.grad_sq + mu * mu * si.mass)
    };
    for r in cv.well.iter().filter(|r| r.k_sup.is_none_or(|v| v > 0.0)) {
        let iv = r.interval;
        let candidates: Vec<f64> = match iv.hi {
            Some(h) => (1..64).map(|j| iv.lo + (h - iv.lo) * j as f64 / 64.0).collect(),
            None => {
                let start = iv.lo.max(1e-3) * 1.5 + 1e-3;
                (0..80).map(|j| start * 2f64.powi(j)).collect()
            }
        };
        if let Some(mu) = candidates.into_iter().filter(|&m| iv.contains(m)).find(|&m| strict(m)) {
            let omega = mu * mu;
            let c = 2.0 * s * mu;
            let action = si.action(p, omega, c);
            return Ok(Some(Witness {
                s,
                omega,
                c,
                action,
                nehari: si.nehari(p, omega, c),
                gradient_bound: 8.0 * action + 0.5 * c * c * si.mass,
            }));
        }
    }
    Ok(None)
}

/// Smallest `λ > 0` with `K_{omega,c}(λ φ) = 0`.
pub fn nehari_normalize(si: &ScalarInvariants, p: &ModelParams, omega: f64, c: f64) -> Result<f64> {
    // K(λφ) = λ² (a1 + a2 t + a3 t²), t = λ²
    let a1 = si.grad_sq + omega * si.mass + c * si.p_lin;
    let (a2, a3) = match si.frame {
        Frame::Gauge => (0.5 * c * si.l4, -3.0 * p.gamma() / 16.0 * si.l6),
        Frame::Dnls => (-si.interaction, -p.b() * si.l6),
    };
    let roots: Vec<f64> = if a3 == 0.0 {
        if a2 != 0.0 { vec![-a1 / a2] } else { vec![] }
    } else {
        let disc = a2 * a2 - 4.0 * a3 * a1;
        if disc < 0.0 {
            vec![]
        } else {
            let q = -0.5 * (a2 + disc.sqrt().copysign(a2));
            if q == 0.0 { vec![0.0] } else { vec![q / a3, a1 / q] }
        }
    };
    let t = roots
        .into_iter()
        .filter(|t| t.is_finite() && *t > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !t.is_finite() {
        return Err(Error::NoPositiveRoot(format!(
            "K(λφ) has no positive zero (coefficients {a1}, {a2}, {a3})"
        )));
    }
    let lambda = t.sqrt();
    let residual = (a1 + a2 * t + a3 * t * t) * t;
    let scale = (a1.abs() + (a2 * t).abs() + (a3 * t * t).abs()) * t;
    if residual.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NoConvergence(format!("Nehari residual {residual} at λ = {lambda}")));
    }
    Ok(lambda)
}

/// `S_{omega,c}(λ₀ φ)` with `λ₀` from [`nehari_normalize`].
pub fn normalized_action(si: &ScalarInvariants, p: &ModelParams, omega: f64, c: f64) -> Result<f64> {
    let lambda = nehari_normalize(si, p, omega, c)?;
    Ok(si.scaled(p, lambda).action(p, omega, c))
}

/// Smallest doubling `mu ∈ {1, 2, 4, …, 2^30}` with `e^{iμx} ψ ∈ A^+_1`.
pub fn oscillation_plus_search(si: &ScalarInvariants, p: &ModelParams) -> Result<Option<f64>> {
    let mut mu = 1.0;
    while mu <= SEARCH_CAP {
        if scan_curve(&si.modulated(p, mu), p, 1.0)?.verdict.has_plus() {
            return Ok(Some(mu));
        }
        mu *= 2.0;
    }
    Ok(None)
}

/// `(ε, μ)` with `e^{-i(1-ε)μx} ψ ∈ A^-_{-(1-ε)}`, scanning `ε = 2^{-j}`
/// and doubling `μ` up to `2^30`.
pub fn oscillation_minus_search(si: &ScalarInvariants, p: &ModelParams) -> Result<Option<(f64, f64)>> {
    for j in 1..=30 {
        let eps = 2f64.powi(-j);
        let s = -(1.0 - eps);
        if !p.s_admissible(s) {
            continue;
        }
        let mut mu = 1.0;
        while mu <= SEARCH_CAP {
            if scan_curve(&si.modulated(p, s * mu), p, s)?.verdict.has_minus() {
                return Ok(Some((eps, mu)));
            }
            mu *= 2.0;
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// Mass below the threshold (or at it with negative momentum):
    /// the field lies in `A^+` on the distinguished curve.
    BelowThreshold,
    /// Negative energy: in `A^-_s` for every `s`.
    NegativeEnergy,
    /// Non-negative energy at or above the threshold with `P >= 0`:
    /// outside every well with `s ∈ [0, 1]`.
    OutsideNonNegativeS,
    /// Same with `P <= 0`: outside every well with `s ∈ (-1, 0]`.
    OutsideNonPositiveS,
    /// Mass, energy and momentum all at the soliton values: a modulated,
    /// translated soliton on the distinguished curve.
    BoundarySoliton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Threshold,
    /// `b = -3/16`: every field lies in some `A^+_s` with `s < 0`.
    CriticalGamma,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationResult {
    pub frame: Frame,
    pub b: f64,
    pub route: Route,
    pub invariants: ScalarInvariants,
    pub mass_threshold: Option<f64>,
    /// Curve carrying the threshold: `s*` for `b > 0`, `1` for `b <= 0`,
    /// `s_0` with `2 d(1, 2 s_0) > M` on the critical route.
    pub distinguished_s: f64,
    pub cases: Vec<Case>,
    pub global_existence: bool,
    pub per_s: Vec<CurveVerdict>,
    pub witness: Option<Witness>,
    /// Smallest doubling `mu` putting `e^{iμx} φ` in `A^+_1`.
    pub oscillation_plus_mu: Option<f64>,
    /// `(ε, μ)` putting `e^{-i(1-ε)μx} φ` in `A^-_{-(1-ε)}`.
    pub oscillation_minus: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub s_grid: Vec<f64>,
    /// Relative tolerance for "at the threshold" and "zero" energy/momentum.
    pub tol: f64,
    pub oscillation_searches: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            s_grid: (0..=20).map(|j| -0.95 + 0.0975 * j as f64).collect(),
            tol: 1e-6,
            oscillation_searches: true,
        }
    }
}

/// Applies the threshold classification to a field.
///
/// The gauge frame accepts every `b >= -3/16`; `b = -3/16` takes the
/// critical route. The original frame is supported for `b = 0` only, with
/// threshold `4π`.
pub fn classify(f: &Field, p: &ModelParams, frame: Frame, opts: &ClassifyOptions) -> Result<ClassificationResult> {
    classify_invariants(&invariant_summary(f, p, frame), p, opts)
}

pub fn classify_invariants(si: &ScalarInvariants, p: &ModelParams, opts: &ClassifyOptions) -> Result<ClassificationResult> {
    let b = p.b();
    if si.frame == Frame::Dnls && b != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "original-frame classification is available for b = 0 only, got b = {b}"
        )));
    }
    if b < CRITICAL_B {
        return Err(Error::InvalidParameter(format!("classification needs b >= -3/16, got {b}")));
    }
    if si.mass <= 0.0 {
        return Err(Error::InvalidField("zero field".into()));
    }
    let critical = b == CRITICAL_B;
    let mut s_list: Vec<f64> = opts.s_grid.iter().copied().filter(|&s| p.s_admissible(s)).collect();

    let (route, m_star, s_dist) = if critical {
        (Route::CriticalGamma, None, critical_curve(si.mass)?)
    } else {
        let m_star = mass_threshold(b)?;
        let s_dist = if b > 0.0 { s_star(b)? } else { 1.0 };
        (Route::Threshold, Some(m_star), s_dist)
    };
    if !s_list.contains(&s_dist) {
        s_list.push(s_dist);
    }
    s_list.sort_by(f64::total_cmp);

    let per_s = s_list.iter().map(|&s| scan_curve(si, p, s)).collect::<Result<Vec<_>>>()?;

    let mut cases = Vec::new();
    if let Some(ms) = m_star {
        let tol = opts.tol;
        let e_scale = tol * (0.5 * si.grad_sq).max(f64::MIN_POSITIVE);
        let p_scale = tol * (si.grad_sq * si.mass).sqrt().max(f64::MIN_POSITIVE);
        let at_threshold = (si.mass - ms).abs() <= tol * ms;
        let above = si.mass >= ms * (1.0 - tol);
        let e_zero = si.energy.abs() <= e_scale;
        let p_zero = si.momentum.abs() <= p_scale;
        if b >= 0.0 && at_threshold && e_zero && p_zero {
            cases.push(Case::BoundarySoliton);
        }
        if si.mass < ms * (1.0 - tol) || (at_threshold && si.momentum < -p_scale) {
            cases.push(Case::BelowThreshold);
        }
        if si.energy < -e_scale {
            cases.push(Case::NegativeEnergy);
        }
        if above && si.energy >= -e_scale && !cases.contains(&Case::BoundarySoliton) {
            if si.momentum >= -p_scale {
                cases.push(Case::OutsideNonNegativeS);
            }
            if si.momentum <= p_scale {
                cases.push(Case::OutsideNonPositiveS);
            }
        }
    }
    let global_existence = critical || cases.contains(&Case::BelowThreshold);
    let witness = plus_witness(si, p, s_dist)?;
    let (oscillation_plus_mu, oscillation_minus) = if opts.oscillation_searches && !critical {
        (oscillation_plus_search(si, p)?, oscillation_minus_search(si, p)?)
    } else {
        (None, None)
    };
    Ok(ClassificationResult {
        frame: si.frame,
        b,
        route,
        invariants: *si,
        mass_threshold: m_star,
        distinguished_s: s_dist,
        cases,
        global_existence,
        per_s,
        witness,
        oscillation_plus_mu,
        oscillation_minus,
    })
}

/// At `b = -3/16`, `2 d(1, 2s) = (2/3)(1 - s²) M(1, 2s)` grows without
/// bound as `s -> 0-`; returns the first `s = -2^{-j}` with
/// `2 d(1, 2s) > 2 M`.
fn critical_curve(mass: f64) -> Result<f64> {
    for j in 1..=60 {
        let s = -2f64.powi(-j);
        if 2.0 * d_on_curve(CRITICAL_B, s)? > 2.0 * mass {
            return Ok(s);
        }
    }
    Err(Error::NoConvergence(format!("no curve with 2d > 2M for mass {mass}")))
}

/// `4π`, the threshold of the original-frame theory at `b = 0`.
pub const DNLS_THRESHOLD: f64 = 4.0 * PI;
