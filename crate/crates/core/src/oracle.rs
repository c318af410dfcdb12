//! Independent checks: adaptive quadrature, an ODE shooting solver for the
//! profile equation, and the verification suites built on them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::{cosh_integral, soliton_l4, soliton_mass, soliton_momentum};
use crate::error::{Error, Result};
use crate::evolve::gauge_consistency;
use crate::field::{Field, Grid};
use crate::functionals::{momentum, Frame};
use crate::gauge::gauge_transform;
use crate::random::smooth_field;
use crate::solitons::{
    algebraic_tail_mass, phi_sq, sample_phi, sample_varphi, suggested_half_length, ModelParams, SolitonParams,
};

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// `∫_a^b f`, limits may be infinite. Infinite ranges are mapped to finite
/// ones by `x = t/(1 - t²)` or `x = a + t/(1 - t)`, then subdivided
/// adaptively (largest error first) until the error estimate is below `tol`.
pub fn adaptive_quad(f: impl Fn(f64) -> f64 + Sync, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() || a == b {
        return if a == b { Ok(0.0) } else { Err(Error::InvalidParameter("NaN limit".into())) };
    }
    if a > b {
        return adaptive_quad(f, b, a, tol).map(|v| -v);
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => gk_adaptive(&f, a, b, tol),
        (false, false) => gk_adaptive(
            &|t: f64| {
                let d = 1.0 - t * t;
                f(t / d) * (1.0 + t * t) / (d * d)
            },
            -1.0,
            1.0,
            tol,
        ),
        (true, false) => gk_adaptive(
            &|t: f64| {
                let d = 1.0 - t;
                f(a + t / d) / (d * d)
            },
            0.0,
            1.0,
            tol,
        ),
        (false, true) => gk_adaptive(
            &|t: f64| {
                let d = 1.0 - t;
                f(b - t / d) / (d * d)
            },
            0.0,
            1.0,
            tol,
        ),
    }
}

fn gk_adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (v, e) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::NoConvergence("quadrature produced a non-finite value".into()));
        }
        if err <= tol {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::NoConvergence(format!(
                "quadrature error {err:e} above {tol:e} after {MAX_INTERVALS} subintervals"
            )));
        }
        let worst = (0..parts.len()).max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3)).unwrap_or(0);
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(Error::NoConvergence(format!("interval [{lo}, {hi}] cannot be split further")));
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Even solution of `-Phi'' + (omega - c²/4) Phi + (c/2) Phi³ - (3 gamma/16) Phi⁵ = 0`
/// sampled at the points of `Grid(half_length, n)`.
///
/// Shoots from `x = 0` with `Phi'(0) = 0`, bisecting `Phi(0)` between
/// undershoot (turns back up) and overshoot (crosses zero) to `1e-12`
/// relative. Once the profile falls below `1e-3 Phi(0)` the remaining tail
/// is continued by the linear decay `e^{-kappa x}`; the neglected cubic
/// term is below `1e-6` relative there.
pub fn ode_profile(p: &ModelParams, omega: f64, c: f64, half_length: f64, n: usize) -> Result<Vec<f64>> {
    let sp = SolitonParams::new(*p, omega, c)?;
    if sp.is_algebraic() {
        return Err(Error::AlgebraicNotShootable);
    }
    let g = Grid::new(half_length, n)?;
    let k2 = omega - 0.25 * c * c;
    let kappa = k2.sqrt();
    let cubic = 0.5 * c;
    let quintic = -3.0 * p.gamma() / 16.0;
    let rhs = move |phi: f64| (k2 + cubic * phi * phi + quintic * phi.powi(4)) * phi;
    let dx = g.dx();
    let sub = (dx / 1e-3).ceil() as usize;
    let h = dx / sub as f64;
    let rk4 = |y: (f64, f64)| {
        let f = |y: (f64, f64)| (y.1, rhs(y.0));
        let a = f(y);
        let b = f((y.0 + 0.5 * h * a.0, y.1 + 0.5 * h * a.1));
        let c = f((y.0 + 0.5 * h * b.0, y.1 + 0.5 * h * b.1));
        let d = f((y.0 + h * c.0, y.1 + h * c.1));
        (y.0 + h / 6.0 * (a.0 + 2.0 * b.0 + 2.0 * c.0 + d.0), y.1 + h / 6.0 * (a.1 + 2.0 * b.1 + 2.0 * c.1 + d.1))
    };
    // +1 overshoot, -1 undershoot, 0 undecided within the domain
    let shoot = |amp: f64| -> i8 {
        let mut y = (amp, 0.0);
        let steps = (half_length / h).ceil() as usize;
        for _ in 0..steps {
            y = rk4(y);
            if y.0 < 0.0 {
                return 1;
            }
            if y.1 > 0.0 {
                return -1;
            }
            if !y.0.is_finite() {
                return -1;
            }
        }
        0
    };
    let mut lo = 1e-3 * kappa.max(1e-3);
    if shoot(lo) != -1 {
        return Err(Error::NoConvergence(format!("no undershoot at Phi(0) = {lo}")));
    }
    let mut hi = lo;
    loop {
        hi *= 1.05;
        if hi > 1e4 {
            return Err(Error::NoConvergence("no overshoot below Phi(0) = 1e4".into()));
        }
        match shoot(hi) {
            1 => break,
            -1 => lo = hi,
            _ => break,
        }
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        match shoot(mid) {
            1 => hi = mid,
            -1 => lo = mid,
            _ => {
                lo = mid;
                hi = mid;
            }
        }
    }
    let amp = 0.5 * (lo + hi);

    let half_n = n / 2;
    let mut values = vec![0.0; half_n + 1];
    values[0] = amp;
    let mut y = (amp, 0.0);
    let mut tail: Option<(f64, f64)> = None;
    for (m, slot) in values.iter_mut().enumerate().skip(1) {
        let x = m as f64 * dx;
        if let Some((x1, v1)) = tail {
            *slot = v1 * (-kappa * (x - x1)).exp();
            continue;
        }
        for _ in 0..sub {
            y = rk4(y);
        }
        *slot = y.0;
        if y.0 < 1e-3 * amp {
            tail = Some((x, y.0));
        }
    }
    if tail.is_none() && values[half_n] > 1e-8 {
        return Err(Error::NoConvergence(format!("profile is {} at the boundary", values[half_n])));
    }
    Ok((0..n).map(|j| values[(j as isize - half_n as isize).unsigned_abs()]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Quad,
    Ode,
    Mass,
    Momentum,
    Gauge,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad" => Ok(Suite::Quad),
            "ode" => Ok(Suite::Ode),
            "mass" => Ok(Suite::Mass),
            "momentum" => Ok(Suite::Momentum),
            "gauge" => Ok(Suite::Gauge),
            _ => Err(Error::InvalidParameter(format!("unknown suite '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
    pub tol: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, reference: f64, tol: f64) -> Self {
        let error = (value - reference).abs();
        Self { name: name.into(), value, reference, error, tol, passed: error <= tol, note: None }
    }

    fn relative(name: impl Into<String>, value: f64, reference: f64, tol: f64) -> Self {
        let error = (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
        Self { name: name.into(), value, reference, error, tol, passed: error <= tol, note: None }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            reference: f64::NAN,
            error: f64::INFINITY,
            tol: 0.0,
            passed: false,
            note: Some(err.to_string()),
        }
    }

    fn skipped(name: impl Into<String>, note: &str) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            reference: f64::NAN,
            error: 0.0,
            tol: 0.0,
            passed: true,
            note: Some(note.into()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub worst_error: f64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn from_checks(suite: Suite, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        let worst_error = checks
            .iter()
            .filter(|c| c.note.is_none() || !c.passed)
            .map(|c| c.error)
            .fold(0.0, f64::max);
        Self { suite, passed, worst_error, checks }
    }
}

/// Regime of `gamma` for random parameter draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRegime {
    Positive,
    Zero,
    Negative,
    /// `gamma > 0` on the algebraic edge `c = 2 sqrt(omega)`.
    Algebraic,
}

/// A random admissible `(b, omega, c)` in the given regime, exponential
/// decay rate bounded away from zero.
pub fn random_soliton(regime: GammaRegime, rng: &mut impl Rng) -> SolitonParams {
    let b = match regime {
        GammaRegime::Positive | GammaRegime::Algebraic => rng.gen_range(-0.15..0.6),
        GammaRegime::Zero => -3.0 / 16.0,
        GammaRegime::Negative => rng.gen_range(-0.6..-0.2),
    };
    let p = ModelParams::new(b).expect("finite b");
    let omega = rng.gen_range(0.5..2.0);
    let s = match regime {
        GammaRegime::Algebraic => 1.0,
        _ => {
            let (lo, hi, _) = p.s_range();
            let pad = 0.05 * (hi - lo);
            rng.gen_range(lo + pad..hi - pad)
        }
    };
    SolitonParams::from_s(p, omega, s).expect("admissible draw")
}

/// `∫ Phi^{2k}` over the line by adaptive quadrature of the profile.
pub fn quad_profile_power(sp: &SolitonParams, k: i32, tol: f64) -> Result<f64> {
    let sp = *sp;
    let half = adaptive_quad(move |x| phi_sq(&sp, x).powi(k), 0.0, f64::INFINITY, 0.5 * tol)?;
    Ok(2.0 * half)
}

fn quad_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    let inf = f64::INFINITY;
    let push = |checks: &mut Vec<Check>, name: &str, r: Result<f64>, reference: f64, tol: f64| {
        checks.push(match r {
            Ok(v) => Check::new(name, v, reference, tol),
            Err(e) => Check::failed(name, &e),
        });
    };
    push(&mut checks, "int 1/(cosh y + 1)", adaptive_quad(|y| 1.0 / (y.cosh() + 1.0), -inf, inf, 1e-12), 2.0, 1e-10);
    push(&mut checks, "int sech^2", adaptive_quad(|y| 1.0 / y.cosh().powi(2), -inf, inf, 1e-12), 2.0, 1e-10);
    push(
        &mut checks,
        "int 1/(1 + x^2)",
        adaptive_quad(|x| 1.0 / (1.0 + x * x), -inf, inf, 1e-12),
        std::f64::consts::PI,
        1e-10,
    );
    push(&mut checks, "int_0^1 x^2", adaptive_quad(|x| x * x, 0.0, 1.0, 1e-14), 1.0 / 3.0, 1e-14);
    for alpha in [-0.95, -0.5, 0.0, 0.3, 0.95, 1.0, 1.05, 3.0, 10.0, 1e3] {
        for power in [1u32, 2] {
            let name = format!("cosh_integral({alpha}, {power})");
            let q = adaptive_quad(move |y| (y.cosh() + alpha).powi(-(power as i32)), -inf, inf, 1e-12);
            match cosh_integral(alpha, power) {
                Ok(closed) => push(&mut checks, &name, q, closed, 1e-9),
                Err(e) => checks.push(Check::failed(name, &e)),
            }
        }
    }
    checks
}

fn ode_suite() -> Vec<Check> {
    let cases: [(f64, f64, f64); 6] = [(0.0, 1.0, 0.0), (3.0 / 16.0, 1.0, 1.0), (0.1, 1.3, 0.7), (-0.1, 0.8, -0.9), (0.5, 2.0, 1.5), (-3.0 / 16.0, 1.0, -1.0)];
    let mut checks: Vec<Check> = cases
        .par_iter()
        .map(|&(b, omega, c)| {
            let name = format!("profile b={b} omega={omega} c={c}");
            let p = ModelParams::new(b).expect("finite b");
            let sp = match SolitonParams::new(p, omega, c) {
                Ok(sp) => sp,
                Err(e) => return Check::failed(name, &e),
            };
            let g = Grid::new(30.0, 2048).expect("valid grid");
            match ode_profile(&p, omega, c, g.half_length(), g.len()) {
                Ok(shot) => {
                    let err = shot
                        .iter()
                        .zip(g.points())
                        .map(|(v, x)| (v - phi_sq(&sp, x).sqrt()).abs())
                        .fold(0.0, f64::max);
                    Check::new(name, err, 0.0, 1e-6)
                }
                Err(e) => Check::failed(name, &e),
            }
        })
        .collect();
    let p = ModelParams::new(0.0).expect("finite b");
    checks.push(match ode_profile(&p, 1.0, 2.0, 30.0, 2048) {
        Err(Error::AlgebraicNotShootable) => Check::skipped("profile b=0 omega=1 c=2", "algebraic decay not shootable"),
        Ok(_) => Check::failed("profile b=0 omega=1 c=2", &Error::InvalidParameter("algebraic case was shot".into())),
        Err(e) => Check::failed("profile b=0 omega=1 c=2", &e),
    });
    checks
}

const REGIMES: [GammaRegime; 4] = [GammaRegime::Positive, GammaRegime::Zero, GammaRegime::Negative, GammaRegime::Algebraic];

fn draws(seed: u64, per_regime: usize) -> Vec<(GammaRegime, SolitonParams)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    REGIMES
        .iter()
        .flat_map(|&r| (0..per_regime).map(move |_| r).collect::<Vec<_>>())
        .map(|r| (r, random_soliton(r, &mut rng)))
        .collect()
}

fn label(r: GammaRegime, sp: &SolitonParams) -> String {
    format!("{r:?} b={} omega={} c={}", sp.params.b(), sp.omega, sp.c)
}

/// Mass of an algebraic soliton on a truncated grid plus the analytic tail.
fn algebraic_grid_mass(sp: &SolitonParams) -> Result<f64> {
    let l = suggested_half_length(sp, 1e-2).min(4000.0);
    let g = Grid::new(l, 1 << 16)?;
    let f = sample_varphi(sp, &g);
    Ok(f.l2_sq() + algebraic_tail_mass(sp, l))
}

fn mass_suite(seed: u64) -> Vec<Check> {
    draws(seed, 10)
        .par_iter()
        .flat_map_iter(|(r, sp)| {
            let name = label(*r, sp);
            let closed = soliton_mass(sp);
            let mut out = vec![match quad_profile_power(sp, 1, 1e-11) {
                Ok(q) => Check::relative(format!("quad mass {name}"), closed, q, 1e-8),
                Err(e) => Check::failed(format!("quad mass {name}"), &e),
            }];
            if *r == GammaRegime::Algebraic {
                out.push(match algebraic_grid_mass(sp) {
                    Ok(m) => Check::relative(format!("grid+tail mass {name}"), m, closed, 1e-4),
                    Err(e) => Check::failed(format!("grid+tail mass {name}"), &e),
                });
            }
            out
        })
        .collect()
}

fn momentum_suite(seed: u64) -> Vec<Check> {
    draws(seed ^ 0x5eed, 10)
        .par_iter()
        .flat_map_iter(|(r, sp)| {
            let name = label(*r, sp);
            let closed = soliton_momentum(sp);
            let q = quad_profile_power(sp, 1, 1e-11).and_then(|m| Ok((m, quad_profile_power(sp, 2, 1e-11)?)));
            let scale = closed.abs().max(soliton_mass(sp));
            let mut out = Vec::new();
            match q {
                Ok((m, l4)) => {
                    let p_quad = -0.5 * sp.c * m + 0.25 * l4;
                    let mut ch = Check::new(format!("quad momentum {name}"), closed, p_quad, 1e-8 * scale);
                    ch.error /= scale;
                    ch.tol /= scale;
                    out.push(ch);
                    out.push(Check::relative(format!("quad l4 {name}"), soliton_l4(sp), l4, 1e-8));
                }
                Err(e) => out.push(Check::failed(format!("quad momentum {name}"), &e)),
            }
            out
        })
        .collect()
}

fn gauge_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Grid::new(40.0, 1024).expect("valid grid");
    let mut checks = Vec::new();
    for (b, omega, c) in [(0.0, 1.0, 1.0), (0.1, 1.3, 0.7), (-0.1, 1.0, -0.5)] {
        let sp = SolitonParams::new(ModelParams::new(b).expect("finite b"), omega, c).expect("admissible");
        let phi = sample_phi(&sp, &g);
        let varphi = sample_varphi(&sp, &g);
        let d = gauge_transform(&phi, 0.25).l2_distance(&varphi).expect("same grid");
        checks.push(Check::new(format!("G_1/4 phi = varphi b={b} omega={omega} c={c}"), d, 0.0, 1e-10));
    }
    for j in 0..5 {
        let f = smooth_field(&g, &mut rng);
        let lhs = momentum(&gauge_transform(&f, 0.25), Frame::Gauge);
        let rhs = momentum(&f, Frame::Dnls);
        checks.push(Check::new(format!("gauge momentum map, random field {j}"), lhs, rhs, 1e-10 * (1.0 + rhs.abs())));
        let back = gauge_transform(&gauge_transform(&f, 0.25), -0.25);
        checks.push(Check::new(format!("G_-1/4 G_1/4 = id, random field {j}"), back.l2_distance(&f).expect("same grid"), 0.0, 1e-12));
    }
    let gaussian = Field::from_real_fn(g, |x| (-x * x).exp());
    let wave = Field::from_fn(g, |x| Complex64::from_polar(0.8 * (-x * x / 4.0).exp(), 0.5 * x));
    let sol = sample_phi(&SolitonParams::new(ModelParams::new(0.1).expect("finite b"), 1.0, 0.5).expect("admissible"), &g);
    let data = [("gaussian b=0", 0.0, gaussian), ("modulated gaussian b=-0.1", -0.1, wave), ("soliton b=0.1", 0.1, sol)];
    let flows: Vec<Check> = data
        .par_iter()
        .map(|(name, b, f)| match gauge_consistency(f, *b, 0.5, 1e-3) {
            Ok(d) => Check::new(format!("gauge consistency T=0.5 {name}"), d, 0.0, 1e-5),
            Err(e) => Check::failed(format!("gauge consistency T=0.5 {name}"), &e),
        })
        .collect();
    checks.extend(flows);
    checks
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let checks = match suite {
        Suite::Quad => quad_suite(),
        Suite::Ode => ode_suite(),
        Suite::Mass => mass_suite(seed),
        Suite::Momentum => momentum_suite(seed),
        Suite::Gauge => gauge_suite(seed),
    };
    SuiteReport::from_checks(suite, checks)
}
