//! Exact scalar formulas: cosh integrals, soliton mass, momentum, energy,
//! the action level `d`, and the thresholds `s*`, `s_*`, `M*`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::brent_root;
use crate::solitons::{ModelParams, SolitonParams};

/// Below this `|gamma|` the momentum uses its `gamma = 0` limit.
const GAMMA_ZERO_TOL: f64 = 1e-8;
/// Half width of the band around `alpha = 1` evaluated by series.
const SERIES_BAND: f64 = 0.1;

/// `beta = c / sqrt(c^2 + gamma (4 omega - c^2))` and `alpha = -beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveParams {
    pub beta: f64,
    pub alpha: f64,
}

impl CurveParams {
    pub fn new(sp: &SolitonParams) -> Self {
        let beta = if sp.is_algebraic() { 1.0 } else { sp.c / sp.root_r() };
        Self { beta, alpha: -beta }
    }
}

/// `∫_R dy / (cosh y + alpha)^power` for `alpha > -1`, `power` 1 or 2.
pub fn cosh_integral(alpha: f64, power: u32) -> Result<f64> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("cosh integral needs alpha > -1, got {alpha}")));
    }
    if power != 1 && power != 2 {
        return Err(Error::InvalidParameter(format!("power must be 1 or 2, got {power}")));
    }
    let eps = alpha - 1.0;
    if eps.abs() < SERIES_BAND {
        return Ok(cosh_integral_series(eps, power));
    }
    Ok(if alpha < 1.0 {
        let one_m = 1.0 - alpha * alpha;
        let t = (1.0 - alpha).sqrt().atan2((1.0 + alpha).sqrt());
        if power == 1 {
            4.0 / one_m.sqrt() * t
        } else {
            2.0 / one_m - 4.0 * alpha / one_m.powf(1.5) * t
        }
    } else {
        let sq = alpha * alpha - 1.0;
        let lg = alpha.acosh();
        if power == 1 {
            2.0 / sq.sqrt() * lg
        } else {
            -2.0 / sq + 2.0 * alpha / sq.powf(1.5) * lg
        }
    })
}

/// Expansion about `alpha = 1`:
/// `∫(cosh y + 1 + e)^{-p} = Σ_n C(n+p-1, p-1) (-e)^n ∫(cosh y + 1)^{-(n+p)}`,
/// with `∫(cosh y + 1)^{-m} = 2^{1-m} ∫sech^{2m}`.
fn cosh_integral_series(eps: f64, power: u32) -> f64 {
    let p = power as usize;
    // w[m] = ∫ sech^{2m}, w[1] = 2, w[m] = w[m-1] (2m-2)/(2m-1)
    let mut w = 2.0;
    let mut j = Vec::with_capacity(80);
    j.push(0.0);
    for m in 1..80usize {
        if m > 1 {
            w *= (2 * m - 2) as f64 / (2 * m - 1) as f64;
        }
        j.push(2f64.powi(1 - m as i32) * w);
    }
    let mut sum = 0.0;
    let mut pow = 1.0;
    for n in 0..(80 - p) {
        let binom = if p == 1 { 1.0 } else { (n + 1) as f64 };
        let term = binom * pow * j[n + p];
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        pow *= -eps;
    }
    sum
}

/// `atan(sqrt((1+beta)/(1-beta)))` evaluated from `R ± c` without forming
/// the quotient, so it stays exact as `beta -> ±1`.
fn half_angle(sp: &SolitonParams) -> f64 {
    if sp.is_algebraic() {
        return PI / 2.0;
    }
    let c = sp.c;
    let r = sp.root_r();
    let gk2 = sp.gamma() * sp.kappa_sq();
    let (plus, minus) = if c > 0.0 { (r + c, gk2 / (r + c)) } else { (gk2 / (r - c), r - c) };
    plus.sqrt().atan2(minus.sqrt())
}

/// `‖Phi‖^2` in closed form.
pub fn soliton_mass(sp: &SolitonParams) -> f64 {
    let g = sp.gamma();
    if sp.is_algebraic() {
        return 4.0 * PI / g.sqrt();
    }
    let k = sp.kappa();
    let c = sp.c;
    if g > 0.0 {
        8.0 / g.sqrt() * half_angle(sp)
    } else if g == 0.0 {
        4.0 * k / (-c)
    } else {
        // alpha - 1 = -gamma k^2 / (R (R - c))
        let r = sp.root_r();
        let e = -g * sp.kappa_sq() / (r * (r - c));
        let acosh = (e + (e * (2.0 + e)).sqrt()).ln_1p();
        4.0 / (-g).sqrt() * acosh
    }
}

/// `P(phi)` in closed form.
pub fn soliton_momentum(sp: &SolitonParams) -> f64 {
    let g = sp.gamma();
    let c = sp.c;
    let m = soliton_mass(sp);
    if g.abs() < GAMMA_ZERO_TOL && c < 0.0 {
        -(2.0 * sp.omega + c * c) / (3.0 * c) * m
    } else {
        0.5 * c * (-1.0 + 1.0 / g) * m + 2.0 / g * sp.kappa()
    }
}

/// `E(phi) = -(c/4) P(phi)`.
pub fn soliton_energy(sp: &SolitonParams) -> f64 {
    -0.25 * sp.c * soliton_momentum(sp)
}

/// `‖Phi‖_4^4` from the second cosh integral (all regimes).
pub fn soliton_l4(sp: &SolitonParams) -> f64 {
    let g = sp.gamma();
    if sp.is_algebraic() {
        return 8.0 * PI * sp.c / g.powf(1.5);
    }
    let k2 = sp.kappa_sq();
    let r2 = sp.c * sp.c + g * k2;
    let alpha = CurveParams::new(sp).alpha;
    4.0 * k2 * k2.sqrt() / r2 * cosh_integral(alpha, 2).expect("alpha > -1 in the existence region")
}

/// `d(omega, c) = S(phi) = (omega/2) M + (c/4) P`.
pub fn d_value(sp: &SolitonParams) -> f64 {
    0.5 * sp.omega * soliton_mass(sp) + 0.25 * sp.c * soliton_momentum(sp)
}

fn unit_curve(b: f64, s: f64) -> Result<SolitonParams> {
    SolitonParams::from_s(ModelParams::new(b)?, 1.0, s)
}

/// `d(1, 2s) = (M + s P) / 2` at `omega = 1`.
pub fn d_on_curve(b: f64, s: f64) -> Result<f64> {
    let sp = unit_curve(b, s)?;
    Ok(0.5 * (soliton_mass(&sp) + s * soliton_momentum(&sp)))
}

pub fn mass_on_curve(b: f64, s: f64) -> Result<f64> {
    Ok(soliton_mass(&unit_curve(b, s)?))
}

pub fn momentum_on_curve(b: f64, s: f64) -> Result<f64> {
    Ok(soliton_momentum(&unit_curve(b, s)?))
}

/// The speed ratio at which the soliton momentum vanishes, `b > 0`.
///
/// `1 - s*` shrinks like `b^2`, so below `b ≈ 1e-7` the root is no longer
/// separable from `s = 1` in double precision and this returns an error.
pub fn s_star(b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("s* is defined for b > 0, got {b}")));
    }
    let p = ModelParams::new(b)?;
    let f = |s: f64| soliton_momentum(&SolitonParams::from_s(p, 1.0, s).expect("s in (0, 1]"));
    let root = brent_root(f, 1e-6, 1.0, 1e-15, 1e-13, 200)?;
    let res = f(root);
    if res.abs() >= 1e-10 {
        return Err(Error::NoConvergence(format!("momentum residual {res} at s = {root}")));
    }
    Ok(root)
}

/// `s_* = sqrt(-gamma / (1 - gamma))` for `gamma <= 0`.
pub fn s_lower(b: f64) -> Result<f64> {
    ModelParams::new(b)?
        .s_lower()
        .ok_or_else(|| Error::InvalidParameter(format!("s_* is defined for gamma <= 0 (b <= -3/16), got b = {b}")))
}

/// Mass threshold `M*(b)` for `b > -3/16`.
pub fn mass_threshold(b: f64) -> Result<f64> {
    if !(b > -3.0 / 16.0) || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("M* is defined for b > -3/16, got {b}")));
    }
    if b > 0.0 {
        mass_on_curve(b, s_star(b)?)
    } else if b == 0.0 {
        Ok(4.0 * PI)
    } else {
        Ok(4.0 * PI / ModelParams::new(b)?.gamma().powf(1.5))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DScanRow {
    pub s: f64,
    pub d: f64,
    pub momentum: f64,
    /// Central difference of `d` in `s`, where both neighbours are admissible.
    pub d_prime_fd: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DScan {
    pub rows: Vec<DScanRow>,
    /// Sample with the largest `d`.
    pub argmax_s: f64,
    /// Whether the sampled `d` rises up to `s*` (or everywhere when `b <= 0`)
    /// and falls after it.
    pub pattern_holds: bool,
    /// Largest `|d' - P| / max(|P|, 1e-2)` over rows with a difference.
    pub max_fd_error: f64,
}

/// Tabulates `d(1, 2s)` over `s_samples`, compares its finite-difference
/// slope with `P(phi_{1,2s})` and checks the rise/fall pattern around `s*`.
pub fn d_monotonicity_scan(b: f64, s_samples: &[f64], fd_step: f64) -> Result<DScan> {
    let p = ModelParams::new(b)?;
    if let Some(&bad) = s_samples.iter().find(|&&s| !p.s_admissible(s)) {
        return Err(Error::InvalidParameter(format!("s = {bad} is outside the admissible range")));
    }
    let peak = if b > 0.0 { Some(s_star(b)?) } else { None };
    let mut rows = Vec::with_capacity(s_samples.len());
    let mut max_fd_error: f64 = 0.0;
    for &s in s_samples {
        let d = d_on_curve(b, s)?;
        let momentum = momentum_on_curve(b, s)?;
        let d_prime_fd = if p.s_admissible(s - fd_step) && p.s_admissible(s + fd_step) && s + fd_step < 1.0 {
            Some((d_on_curve(b, s + fd_step)? - d_on_curve(b, s - fd_step)?) / (2.0 * fd_step))
        } else {
            None
        };
        if let Some(fd) = d_prime_fd {
            max_fd_error = max_fd_error.max((fd - momentum).abs() / momentum.abs().max(1e-2));
        }
        rows.push(DScanRow { s, d, momentum, d_prime_fd });
    }
    let argmax_s = rows
        .iter()
        .max_by(|a, b| a.d.total_cmp(&b.d))
        .map(|r| r.s)
        .unwrap_or(f64::NAN);
    let pattern_holds = rows.windows(2).all(|w| {
        let rising = match peak {
            Some(sp) => w[1].s <= sp,
            None => true,
        };
        let falling = matches!(peak, Some(sp) if w[0].s >= sp);
        if w[1].s <= w[0].s {
            false
        } else if rising {
            w[1].d > w[0].d
        } else if falling {
            w[1].d < w[0].d
        } else {
            true
        }
    });
    Ok(DScan { rows, argmax_s, pattern_holds, max_fd_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(b: f64, omega: f64, c: f64) -> SolitonParams {
        SolitonParams::new(ModelParams::new(b).unwrap(), omega, c).unwrap()
    }

    #[test]
    fn cosh_integral_constants() {
        assert_eq!(cosh_integral(1.0, 1).unwrap(), 2.0);
        assert!((cosh_integral(1.0, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((cosh_integral(0.0, 1).unwrap() - PI).abs() < 1e-15);
        assert!((cosh_integral(0.0, 2).unwrap() - 2.0).abs() < 1e-15);
        assert!((cosh_integral(3.0, 1).unwrap() - 1.246_450_480_280_461).abs() < 1e-14);
        assert!((cosh_integral(3.0, 1).unwrap() - 2.0 / 8f64.sqrt() * (3.0 + 8f64.sqrt()).ln()).abs() < 1e-14);
        assert!(cosh_integral(-1.0, 1).is_err());
        assert!(cosh_integral(0.5, 3).is_err());
    }

    #[test]
    fn cosh_integral_branches_meet_series() {
        for power in [1, 2] {
            for edge in [1.0 - SERIES_BAND, 1.0 + SERIES_BAND] {
                let inside = cosh_integral_series(edge - 1.0, power);
                let outside = cosh_integral(edge + 1e-14 * (edge - 1.0).signum(), power).unwrap();
                assert!((inside - outside).abs() < 1e-12, "power {power} at {edge}: {inside} vs {outside}");
            }
            let target = if power == 1 { 2.0 } else { 2.0 / 3.0 };
            for a in [1.0 - 1e-9, 1.0 + 1e-9] {
                assert!((cosh_integral(a, power).unwrap() - target).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn half_angle_stable_form() {
        let beta: f64 = 0.9;
        let naive = ((1.0 + beta) / (1.0 - beta)).sqrt().atan();
        let asin_form = 0.5 * (PI / 2.0 + beta.asin());
        let stable = (1.0 + beta).sqrt().atan2((1.0 - beta).sqrt());
        assert!((naive - stable).abs() < 1e-12);
        assert!((asin_form - stable).abs() < 1e-12);
    }

    #[test]
    fn mass_examples() {
        assert!((soliton_mass(&sp(0.0, 1.0, 0.0)) - 2.0 * PI).abs() < 1e-14);
        assert!((soliton_mass(&sp(0.0, 1.0, 2.0)) - 4.0 * PI).abs() < 1e-14);
        assert!((soliton_mass(&sp(-3.0 / 16.0, 1.0, -1.0)) - 4.0 * 3f64.sqrt()).abs() < 1e-14);
        assert!((soliton_mass(&sp(0.1, 1.3, 0.7)) - 5.897_255_804_210_481).abs() < 1e-13);
    }

    #[test]
    fn mass_continuous_across_gamma_zero() {
        let b0 = -3.0 / 16.0;
        let m0 = soliton_mass(&sp(b0, 1.0, -1.0));
        for db in [1e-7, -1e-7] {
            let m = soliton_mass(&sp(b0 + db, 1.0, -1.0));
            assert!((m - m0).abs() < 1e-5);
        }
    }

    #[test]
    fn momentum_examples() {
        assert!((soliton_momentum(&sp(0.0, 1.0, 0.0)) - 4.0).abs() < 1e-14);
        assert!(soliton_momentum(&sp(0.0, 1.0, 2.0)).abs() < 1e-13);
        assert!((soliton_momentum(&sp(-3.0 / 16.0, 1.0, -1.0)) - 4.0 * 3f64.sqrt()).abs() < 1e-13);
        assert!((soliton_momentum(&sp(0.1, 1.3, 0.7)) - 2.112_838_564_819_251).abs() < 1e-12);
        assert!((soliton_momentum(&sp(0.0, 1.0, 1.0)) - 2.0 * 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn momentum_matches_l4_route() {
        for &(b, omega, c) in &[(0.1, 1.3, 0.7), (0.0, 1.0, 1.5), (-0.3, 1.0, -1.8), (-0.1, 2.0, -2.0), (0.2, 1.0, 2.0)] {
            let s = sp(b, omega, c);
            let via_l4 = -0.5 * c * soliton_mass(&s) + 0.25 * soliton_l4(&s);
            assert!((soliton_momentum(&s) - via_l4).abs() < 1e-12, "{b} {omega} {c}");
        }
    }

    #[test]
    fn energy_examples() {
        assert_eq!(soliton_energy(&sp(0.0, 1.0, 0.0)), 0.0);
        assert!((soliton_energy(&sp(0.0, 1.0, 1.0)) + 3f64.sqrt() / 2.0).abs() < 1e-14);
        let s = 0.5;
        let e4 = soliton_energy(&sp(0.0, 4.0, 2.0));
        let p1 = momentum_on_curve(0.0, s).unwrap();
        assert!((e4 + 0.25 * 2.0 * 2.0 * p1).abs() < 1e-13);
    }

    #[test]
    fn d_examples() {
        assert!((d_value(&sp(0.0, 1.0, 0.0)) - PI).abs() < 1e-14);
        assert!((d_value(&sp(0.0, 1.0, 2.0)) - 2.0 * PI).abs() < 1e-13);
        assert!((d_value(&sp(0.0, 4.0, 0.0)) - 4.0 * PI).abs() < 1e-13);
        let s = sp(0.1, 2.25, 2.0 * 0.4 * 1.5);
        assert!((d_value(&s) - 2.25 * d_on_curve(0.1, 0.4).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn s_star_golden_values() {
        assert!((s_star(3.0 / 16.0).unwrap() - 0.571_855_481_284_981_4).abs() < 1e-12);
        assert!((s_star(0.1).unwrap() - 0.716_149_964_884_136_4).abs() < 1e-12);
        assert!((s_star(1e-2).unwrap() - 0.988_191_639_501_483_2).abs() < 1e-12);
        assert!((s_star(1e-3).unwrap() - 0.999_861_882_915_514_8).abs() < 1e-12);
        assert!(s_star(0.0).is_err());
        assert!(s_star(-0.1).is_err());
    }

    #[test]
    fn momentum_changes_sign_for_positive_b() {
        for b in [1e-3, 0.1, 3.0 / 16.0, 1.0] {
            assert!(momentum_on_curve(b, 0.0).unwrap() > 0.0);
            assert!(momentum_on_curve(b, 1.0).unwrap() < 0.0);
        }
    }

    #[test]
    fn thresholds() {
        assert_eq!(mass_threshold(0.0).unwrap(), 4.0 * PI);
        assert!((mass_threshold(-3.0 / 32.0).unwrap() - 8.0 * 2f64.sqrt() * PI).abs() < 1e-12);
        assert!((mass_threshold(3.0 / 16.0).unwrap() - 5.738_193_698_852_992).abs() < 1e-11);
        assert!(mass_threshold(-3.0 / 16.0).is_err());
        let mut prev = mass_threshold(-0.01).unwrap();
        for b in [-0.05, -0.1, -0.15, -0.18, -0.187] {
            let m = mass_threshold(b).unwrap();
            assert!(m > prev);
            prev = m;
        }
        let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&b| (mass_threshold(b).unwrap() - 4.0 * PI).abs())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 2e-2);
        for b in [-0.1, -0.01] {
            let m = mass_on_curve(b, 1.0).unwrap() + momentum_on_curve(b, 1.0).unwrap();
            assert!((m - mass_threshold(b).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn s_lower_values() {
        assert!((s_lower(-3.0 / 8.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(s_lower(-3.0 / 16.0).unwrap(), 0.0);
        assert!(s_lower(0.0).is_err());
    }

    #[test]
    fn d_scan_patterns() {
        let grid: Vec<f64> = (1..40).map(|j| -1.0 + j as f64 * 0.05).collect();
        let scan = d_monotonicity_scan(0.0, &grid, 1e-4).unwrap();
        assert!(scan.pattern_holds);
        assert!(scan.max_fd_error < 1e-4);

        let mut full = grid.clone();
        full.push(1.0);
        let scan = d_monotonicity_scan(0.0, &full, 1e-4).unwrap();
        assert_eq!(scan.argmax_s, 1.0);
        assert!((2.0 * scan.rows.last().unwrap().d - 4.0 * PI).abs() < 1e-12);

        let b = 3.0 / 16.0;
        let ss = s_star(b).unwrap();
        let fine: Vec<f64> = (1..400).map(|j| -1.0 + j as f64 * 0.005).collect();
        let scan = d_monotonicity_scan(b, &fine, 1e-4).unwrap();
        assert!(scan.pattern_holds);
        assert!((scan.argmax_s - ss).abs() <= 0.005);
        assert!(scan.max_fd_error < 1e-4);

        assert!(d_monotonicity_scan(-0.3, &[0.0], 1e-4).is_err());
    }
}
