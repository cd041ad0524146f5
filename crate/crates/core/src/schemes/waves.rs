//! Characteristic speeds of the equilibrium (h, q, z_b) system.
//!
//! With `c^2 = g h` and the partials of the signed bedload rate, the
//! eigenvalues solve
//!
//! ```text
//! l^3 - 2u l^2 - (c^2 - u^2 + c^2 dq_b/dq) l - c^2 dq_b/dh = 0
//! ```
//!
//! Two roots are perturbed gravity waves, the third is the slow bed wave.

use crate::laws::EffectiveParams;
use crate::mesh::H_DRY;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpeeds {
    /// Signed bed wave speed.
    pub bed: f64,
    /// Largest speed magnitude of the fan.
    pub fast: f64,
}

/// Real roots of `x^3 + a x^2 + b x + c`; one or three values.
pub(crate) fn cubic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let shift = -a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if p == 0.0 && q == 0.0 {
        return vec![shift];
    }
    if disc <= 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| shift + m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    } else {
        let s = disc.sqrt();
        vec![shift + (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()]
    }
}

/// One Newton polish of a cubic root.
fn polish(x: f64, a: f64, b: f64, c: f64) -> f64 {
    let f = ((x + a) * x + b) * x + c;
    let df = (3.0 * x + 2.0 * a) * x + b;
    if df != 0.0 {
        x - f / df
    } else {
        x
    }
}

pub fn equilibrium_wave_speeds(h: f64, q: f64, g: f64, law: &EffectiveParams) -> WaveSpeeds {
    if h <= H_DRY {
        return WaveSpeeds {
            bed: 0.0,
            fast: 0.0,
        };
    }
    let u = q / h;
    let c2 = g * h;
    let gravity = u.abs() + c2.sqrt();
    let d = law
        .signed_rate_partials(h, q)
        .expect("depth checked positive above");
    if d.d_q == 0.0 && d.d_h == 0.0 {
        return WaveSpeeds {
            bed: 0.0,
            fast: gravity,
        };
    }

    let a = -2.0 * u;
    let b = -(c2 - u * u + c2 * d.d_q);
    let c = -c2 * d.d_h;
    let roots: Vec<f64> = cubic_roots(a, b, c)
        .into_iter()
        .map(|r| polish(r, a, b, c))
        .collect();

    if roots.len() == 3 {
        let bed = roots
            .iter()
            .copied()
            .fold(f64::INFINITY, |m, r| if r.abs() < m.abs() { r } else { m });
        let fast = roots.iter().map(|r| r.abs()).fold(0.0, f64::max);
        WaveSpeeds {
            bed,
            fast: fast.max(gravity),
        }
    } else {
        // complex pair z, conj(z): r |z|^2 = -c; fall back to the Cauchy bound at r = 0
        let r = roots[0];
        let pair = if r != 0.0 {
            (c / r).abs().sqrt()
        } else {
            1.0 + a.abs().max(b.abs()).max(c.abs())
        };
        WaveSpeeds {
            bed: r,
            fast: r.abs().max(pair).max(gravity),
        }
    }
}
