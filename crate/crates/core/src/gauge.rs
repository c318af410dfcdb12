//! Gauge transforms `G_a(u) = exp(i a ∫_{-L}^x |u|²) u`.
//!
//! Since `|G_a u| = |u|`, the family is a group: `G_a ∘ G_b = G_{a+b}`.
//! `G_{1/4}` maps the original equation to the gauge-frame equation and
//! carries soliton `phi` to `e^{icx/2} Phi` exactly.

use num_complex::Complex64;

use crate::field::{cumulative_integral, Field};

pub fn gauge_transform(f: &Field, a: f64) -> Field {
    if a == 0.0 {
        return f.clone();
    }
    let cum = cumulative_integral(f.grid(), &f.density());
    let mut out = f.clone();
    for (z, m) in out.values_mut().iter_mut().zip(cum) {
        *z *= Complex64::from_polar(1.0, a * m);
    }
    out
}
