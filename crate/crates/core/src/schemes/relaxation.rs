//! Interface solver for the five-equation relaxation system
//!
//! ```text
//! d_t h   + d_x(hu)                          = 0
//! d_t hu  + d_x(hu^2 + pi) + g h d_x z_b     = 0
//! d_t pi  + u d_x pi + (a^2/h) d_x u         = 0
//! d_t z_b + d_x q_r                          = 0
//! d_t q_r + (b^2/h^2 - u^2) d_x z_b + 2u d_x q_r = 0
//! ```
//!
//! relaxed to `pi = g h^2 / 2`, `q_r = q_b`. The `(h, hu, pi)` block is a
//! Suliciu system with waves `u - a/h, u, u + a/h`; the `(z_b, q_r)` block is
//! linear at frozen `(u, b/h)` with waves `u -+ b/h`. The topography term
//! `g h d_x z_b` goes through a hydrostatic reconstruction of the depths at
//! the higher of the two beds, keeping the cell discharge.

use super::waves::equilibrium_wave_speeds;
use super::InterfaceFlux;
use crate::laws::EffectiveParams;
use crate::mesh::{RelaxCellState, H_DRY};

/// Relaxation speeds at one interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationParams {
    /// Suliciu speed, `h c` scale (m^2/s).
    pub a: f64,
    /// Bed-coupling speed, `h c` scale (m^2/s).
    pub b: f64,
}

impl RelaxationParams {
    /// Speeds for the equilibrium states on either side of an interface.
    ///
    /// `a = max_k h_k (c_k + 2 |u_R - u_L|)` and `b / h = max_k |bed speed_k - u_mid|`,
    /// the smallest bed fan `u_mid -+ b/h` enclosing the bed wave of both sides.
    pub fn at_interface(
        left: &RelaxCellState,
        right: &RelaxCellState,
        law: &EffectiveParams,
        g: f64,
    ) -> Self {
        let (hl, hr) = (left.state.h.max(0.0), right.state.h.max(0.0));
        let (ul, ur) = (left.state.velocity(), right.state.velocity());
        RelaxationParams {
            a: suliciu_speed(hl, ul, hr, ur, g),
            b: bed_speed(left, right, law, g) * 0.5 * (hl + hr),
        }
    }
}

fn suliciu_speed(hl: f64, ul: f64, hr: f64, ur: f64, g: f64) -> f64 {
    let jump = 2.0 * (ur - ul).abs();
    let side = |h: f64| h * ((g * h).sqrt() + jump);
    side(hl).max(side(hr))
}

/// `b / h` for the bed block, relative to the mid velocity.
fn bed_speed(left: &RelaxCellState, right: &RelaxCellState, law: &EffectiveParams, g: f64) -> f64 {
    let u_mid = 0.5 * (left.state.velocity() + right.state.velocity());
    let offset = |c: &RelaxCellState| {
        (equilibrium_wave_speeds(c.state.h, c.state.hu, g, law).bed - u_mid).abs()
    };
    offset(left).max(offset(right))
}

/// Interface `(z_b, q_r)` of the linear bed block with waves `u -+ speed`.
fn bed_riemann(zl: f64, ql: f64, zr: f64, qr: f64, u: f64, speed: f64) -> (f64, f64) {
    if speed <= 0.0 && u == 0.0 {
        return (0.5 * (zl + zr), 0.5 * (ql + qr));
    }
    if u - speed >= 0.0 {
        return (zl, ql);
    }
    if u + speed <= 0.0 {
        return (zr, qr);
    }
    let two_s = 2.0 * speed;
    let z = ((speed - u) * zl + (speed + u) * zr + ql - qr) / two_s;
    let q = ((speed + u) * ql + (speed - u) * qr - (speed * speed - u * u) * (zr - zl)) / two_s;
    (z, q)
}

const MAX_WIDENINGS: usize = 200;

struct SuliciuFlux {
    mass: f64,
    momentum: f64,
    speed: f64,
}

fn suliciu_flux(hl: f64, ul: f64, pl: f64, hr: f64, ur: f64, pr: f64, mut a: f64) -> SuliciuFlux {
    if hl <= H_DRY && hr <= H_DRY {
        return SuliciuFlux {
            mass: 0.0,
            momentum: 0.5 * (pl + pr),
            speed: 0.0,
        };
    }
    let (hl, hr) = (hl.max(H_DRY), hr.max(H_DRY));
    let (mut u_star, mut p_star, hl_star, hr_star);
    let mut widenings = 0;
    loop {
        u_star = 0.5 * (ul + ur) - (pr - pl) / (2.0 * a);
        p_star = 0.5 * (pl + pr) - 0.5 * a * (ur - ul);
        let inv_l = 1.0 / hl + (u_star - ul) / a;
        let inv_r = 1.0 / hr + (ur - u_star) / a;
        if inv_l > 0.0 && inv_r > 0.0 {
            hl_star = 1.0 / inv_l;
            hr_star = 1.0 / inv_r;
            break;
        }
        // intermediate depth would be negative: widen the fan
        a *= 1.5;
        widenings += 1;
        if widenings > MAX_WIDENINGS || !a.is_finite() {
            return SuliciuFlux {
                mass: f64::NAN,
                momentum: f64::NAN,
                speed: f64::NAN,
            };
        }
    }
    let sl = ul - a / hl;
    let sr = ur + a / hr;
    let speed = sl.abs().max(sr.abs()).max(u_star.abs());
    let flux = |h: f64, u: f64, p: f64| (h * u, h * u * u + p);
    let (mass, momentum) = if sl >= 0.0 {
        flux(hl, ul, pl)
    } else if u_star >= 0.0 {
        flux(hl_star, u_star, p_star)
    } else if sr > 0.0 {
        flux(hr_star, u_star, p_star)
    } else {
        flux(hr, ur, pr)
    };
    SuliciuFlux {
        mass,
        momentum,
        speed,
    }
}

pub(super) fn interface_flux(
    left: &RelaxCellState,
    right: &RelaxCellState,
    law: &EffectiveParams,
    g: f64,
) -> InterfaceFlux {
    let (ul, ur) = (left.state.velocity(), right.state.velocity());
    let (zl, zr) = (left.state.z_b, right.state.z_b);

    let beta = bed_speed(left, right, law, g);
    let u_bed = 0.5 * (ul + ur);
    let (_, bed) = bed_riemann(zl, left.q_r, zr, right.q_r, u_bed, beta);

    // the bed fan sits almost entirely on one side when transport is weak, so
    // its interface value would make the reconstruction one-sided
    let z_if = zl.max(zr);
    let hl = (left.state.h + zl - z_if).max(0.0);
    let hr = (right.state.h + zr - z_if).max(0.0);
    let pl = 0.5 * g * hl * hl;
    let pr = 0.5 * g * hr * hr;
    // reconstructed states keep the cell discharge
    let velocity = |h: f64, q: f64| if h > H_DRY { q / h } else { 0.0 };
    let (ul, ur) = (velocity(hl, left.state.hu), velocity(hr, right.state.hu));
    let a = suliciu_speed(hl, ul, hr, ur, g);
    let water = if a > 0.0 {
        suliciu_flux(hl, ul, pl, hr, ur, pr, a)
    } else {
        SuliciuFlux {
            mass: 0.0,
            momentum: 0.5 * (pl + pr),
            speed: 0.0,
        }
    };

    InterfaceFlux {
        mass: water.mass,
        mom_left: water.momentum + (left.pi - pl),
        mom_right: water.momentum + (right.pi - pr),
        bed,
        speed: water
            .speed
            .max((u_bed - beta).abs())
            .max((u_bed + beta).abs()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::BedloadLaw;
    use crate::mesh::CellState;
    use approx::assert_relative_eq;

    const G: f64 = 9.81;

    fn lift(h: f64, u: f64, z: f64, law: &BedloadLaw) -> RelaxCellState {
        RelaxCellState::at_equilibrium(CellState::from_primitive(h, u, z), law, G)
    }

    #[test]
    fn consistent_with_physical_flux() {
        let law = BedloadLaw::grass(0.005).unwrap();
        let s = lift(0.8, 1.3, 0.1, &law);
        let f = interface_flux(&s, &s, &law.effective_params(), G);
        assert_relative_eq!(f.mass, 0.8 * 1.3, max_relative = 1e-14);
        assert_relative_eq!(
            f.mom_left,
            0.8 * 1.69 + 0.5 * G * 0.64,
            max_relative = 1e-14
        );
        assert_eq!(f.mom_left, f.mom_right);
        assert_relative_eq!(f.bed, law.rate(1.3), max_relative = 1e-14);
    }

    #[test]
    fn lake_at_rest_interface_is_balanced() {
        let law = BedloadLaw::no_transport();
        let l = lift(1.0, 0.0, 0.0, &law);
        let r = lift(0.7, 0.0, 0.3, &law);
        let f = interface_flux(&l, &r, &law.effective_params(), G);
        assert_eq!(f.mass, 0.0);
        assert_eq!(f.bed, 0.0);
        assert_relative_eq!(f.mom_left, l.pi, max_relative = 1e-15);
        assert_relative_eq!(f.mom_right, r.pi, max_relative = 1e-15);
    }

    #[test]
    fn speeds_satisfy_subcharacteristic_bounds() {
        let law = BedloadLaw::grass(0.005).unwrap();
        let e = law.effective_params();
        let l = lift(1.0, 1.0, 0.0, &law);
        let r = lift(0.9, 1.1, 0.02, &law);
        let p = RelaxationParams::at_interface(&l, &r, &e, G);
        for c in [&l, &r] {
            let h = c.state.h;
            assert!(p.a >= h * (G * h).sqrt());
            let u_mid = 0.5 * (l.state.velocity() + r.state.velocity());
            let beta = p.b / (0.5 * (l.state.h + r.state.h));
            let w = equilibrium_wave_speeds(h, c.state.hu, G, &e);
            assert!(u_mid - beta <= w.bed && w.bed <= u_mid + beta);
        }
    }

    #[test]
    fn bed_riemann_upwinds_supersonic_bed() {
        assert_eq!(bed_riemann(1.0, 2.0, 3.0, 4.0, 2.0, 1.0), (1.0, 2.0));
        assert_eq!(bed_riemann(1.0, 2.0, 3.0, 4.0, -2.0, 1.0), (3.0, 4.0));
        // at speed == |u| the flux is fully upwind with no bed diffusion
        let (_, q) = bed_riemann(0.0, 2.0, 1.0, 4.0, 1.0, 1.0);
        assert_eq!(q, 2.0);
    }

    #[test]
    fn bed_riemann_preserves_invariants() {
        let (zl, ql, zr, qr, u, s) = (0.1, 0.02, 0.3, 0.05, 0.4, 1.1);
        let (z, q) = bed_riemann(zl, ql, zr, qr, u, s);
        assert_relative_eq!((s - u) * z + q, (s - u) * zl + ql, max_relative = 1e-14);
        assert_relative_eq!(q - (u + s) * z, qr - (u + s) * zr, max_relative = 1e-14);
    }

    #[test]
    fn suliciu_intermediate_depths_positive_in_strong_rarefaction() {
        let f = suliciu_flux(
            1.0,
            -5.0,
            0.5 * G,
            1.0,
            5.0,
            0.5 * G,
            suliciu_speed(1.0, -5.0, 1.0, 5.0, G),
        );
        assert!(f.mass.abs() < 1e-12);
        assert!(f.speed.is_finite());
    }
}
