//! Local Lax-Friedrichs flux for the equilibrium system.
//!
//! Diffusion acts on the free surface (not the depth) with the fast speed and
//! on the bed with the bed-wave speed only. The topography term is split
//! between the two interfaces of a cell with interface-averaged depths,
//! `g/2 [h_{j+1/2}(z_{j+1} - z_j) + h_{j-1/2}(z_j - z_{j-1})]`, which balances
//! the centered pressure flux exactly at rest.

use super::waves::equilibrium_wave_speeds;
use super::InterfaceFlux;
use crate::laws::EffectiveParams;
use crate::mesh::CellState;

pub(super) fn interface_flux(
    left: &CellState,
    right: &CellState,
    law: &EffectiveParams,
    g: f64,
) -> InterfaceFlux {
    let wl = equilibrium_wave_speeds(left.h, left.hu, g, law);
    let wr = equilibrium_wave_speeds(right.h, right.hu, g, law);
    let fast = wl.fast.max(wr.fast);
    let slow = wl.bed.abs().max(wr.bed.abs());

    let (ul, ur) = (left.velocity(), right.velocity());
    let momentum = |c: &CellState, u: f64| c.hu * u + 0.5 * g * c.h * c.h;

    let mass = 0.5 * (left.hu + right.hu) - 0.5 * fast * (right.eta() - left.eta());
    let mom = 0.5 * (momentum(left, ul) + momentum(right, ur)) - 0.5 * fast * (right.hu - left.hu);
    let bed =
        0.5 * (law.signed_rate(ul) + law.signed_rate(ur)) - 0.5 * slow * (right.z_b - left.z_b);

    let source = 0.25 * g * (left.h + right.h) * (right.z_b - left.z_b);
    InterfaceFlux {
        mass,
        mom_left: mom + source,
        mom_right: mom - source,
        bed,
        speed: fast.max(slow),
    }
}
