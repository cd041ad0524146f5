//! Explicit first-order finite-volume schemes for the coupled system.
//!
//! Both schemes share the same update skeleton: ghost cells are filled from
//! the boundary condition, one numerical flux is computed per interface, the
//! time step follows from the largest wave speed, and every cell is updated
//! in flux-difference form. Water and bed volumes therefore change only
//! through the two boundary interfaces, which each [`StepReport`] records.

mod relaxation;
mod rusanov;
pub mod waves;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ExnerError, Result};
use crate::exact::ExactSolution;
use crate::laws::{BedloadLaw, EffectiveParams};
use crate::mesh::{CellState, FieldSnapshot, RelaxCellState};

pub use relaxation::RelaxationParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Five-equation relaxation solver.
    Relaxation,
    /// Local Lax-Friedrichs cross-check.
    Rusanov,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Relaxation => "relaxation",
            Scheme::Rusanov => "rusanov",
        })
    }
}

impl FromStr for Scheme {
    type Err = ExnerError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relaxation" => Ok(Scheme::Relaxation),
            "rusanov" => Ok(Scheme::Rusanov),
            other => Err(ExnerError::Config(format!(
                "unknown scheme `{other}` (expected relaxation | rusanov)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// Ghost cell filled from the exact solution.
    Exact,
    /// Ghost cell copies the adjacent interior cell.
    Transmissive,
}

impl FromStr for BoundaryKind {
    type Err = ExnerError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(BoundaryKind::Exact),
            "transmissive" => Ok(BoundaryKind::Transmissive),
            other => Err(ExnerError::Config(format!(
                "unknown boundary condition `{other}` (expected exact | transmissive)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    /// Source of ghost values for [`BoundaryKind::Exact`] sides.
    pub oracle: Option<ExactSolution>,
    /// Evaluate the oracle at t = 0 regardless of the current time.
    pub frozen_bed: bool,
}

impl BoundaryCondition {
    pub fn exact(sol: ExactSolution) -> Self {
        BoundaryCondition {
            left: BoundaryKind::Exact,
            right: BoundaryKind::Exact,
            oracle: Some(sol),
            frozen_bed: false,
        }
    }

    pub fn transmissive() -> Self {
        BoundaryCondition {
            left: BoundaryKind::Transmissive,
            right: BoundaryKind::Transmissive,
            oracle: None,
            frozen_bed: false,
        }
    }

    pub fn with_frozen_bed(mut self) -> Self {
        self.frozen_bed = true;
        self
    }

    fn ghost(&self, kind: BoundaryKind, x: f64, t: f64, inner: CellState) -> Result<CellState> {
        match kind {
            BoundaryKind::Transmissive => Ok(inner),
            BoundaryKind::Exact => {
                let sol = self.oracle.as_ref().ok_or_else(|| {
                    ExnerError::Config("exact boundary condition needs an exact solution".into())
                })?;
                let t = if self.frozen_bed { 0.0 } else { t };
                let p = sol.eval(x, t)?;
                if !(p.h > 0.0) {
                    return Err(ExnerError::Domain {
                        x,
                        reason: format!("ghost depth {} must be > 0", p.h),
                    });
                }
                Ok(CellState::from_primitive(p.h, p.u, p.z_b))
            }
        }
    }

    /// Interior cells padded with one ghost cell on each side.
    fn extend(&self, snap: &FieldSnapshot) -> Result<Vec<CellState>> {
        let mesh = &snap.mesh;
        let n = mesh.cells();
        let mut ext = Vec::with_capacity(n + 2);
        ext.push(self.ghost(self.left, mesh.center(-1), snap.time, snap.cells[0])?);
        ext.extend_from_slice(&snap.cells);
        ext.push(self.ghost(
            self.right,
            mesh.center(n as isize),
            snap.time,
            snap.cells[n - 1],
        )?);
        Ok(ext)
    }
}

/// Bookkeeping for one explicit step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub dt: f64,
    pub max_speed: f64,
    /// `dt * max_speed / dx`.
    pub courant: f64,
    /// Net water volume entering through both boundaries (m^2).
    pub water_influx: f64,
    /// Net bed volume entering through both boundaries (m^2).
    pub bed_influx: f64,
}

/// Numerical fluxes at one interface. The momentum flux may differ on the
/// two sides when it carries a share of the topography source.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct InterfaceFlux {
    pub mass: f64,
    pub mom_left: f64,
    pub mom_right: f64,
    pub bed: f64,
    pub speed: f64,
}

/// Water and bed volume balance over a run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VolumeBudget {
    pub initial: f64,
    pub r#final: f64,
    pub influx: f64,
}

impl VolumeBudget {
    /// `|final - initial - influx| / |initial|` (absolute when initial is 0).
    pub fn closure_error(&self) -> f64 {
        let defect = (self.r#final - self.initial - self.influx).abs();
        if self.initial.abs() > 0.0 {
            defect / self.initial.abs()
        } else {
            defect
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integration {
    pub snapshot: FieldSnapshot,
    pub steps: Vec<StepReport>,
    pub water: VolumeBudget,
    pub bed: VolumeBudget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solver {
    pub scheme: Scheme,
    pub law: BedloadLaw,
    pub g: f64,
    pub bc: BoundaryCondition,
    pub cfl: f64,
}

impl Solver {
    pub fn new(
        scheme: Scheme,
        law: BedloadLaw,
        g: f64,
        bc: BoundaryCondition,
        cfl: f64,
    ) -> Result<Self> {
        if !(cfl > 0.0 && cfl.is_finite()) {
            return Err(ExnerError::InvalidParameter {
                name: "cfl",
                value: cfl,
                reason: "must be > 0",
            });
        }
        if !(g > 0.0 && g.is_finite()) {
            return Err(ExnerError::InvalidParameter {
                name: "g",
                value: g,
                reason: "must be > 0",
            });
        }
        Ok(Solver {
            scheme,
            law,
            g,
            bc,
            cfl,
        })
    }

    fn fluxes(&self, ext: &[CellState]) -> Vec<InterfaceFlux> {
        let law: EffectiveParams = self.law.effective_params();
        match self.scheme {
            Scheme::Relaxation => {
                let lifted: Vec<RelaxCellState> = ext
                    .iter()
                    .map(|&c| RelaxCellState::at_equilibrium(c, &self.law, self.g))
                    .collect();
                lifted
                    .windows(2)
                    .map(|w| relaxation::interface_flux(&w[0], &w[1], &law, self.g))
                    .collect()
            }
            Scheme::Rusanov => ext
                .windows(2)
                .map(|w| rusanov::interface_flux(&w[0], &w[1], &law, self.g))
                .collect(),
        }
    }

    /// One step, never past `t_end`; lands exactly on `t_end` when clipped.
    pub fn step_until(
        &self,
        snap: &FieldSnapshot,
        t_end: f64,
    ) -> Result<(FieldSnapshot, StepReport)> {
        if let Some((j, c)) = snap.cells.iter().enumerate().find(|(_, c)| !(c.h >= 0.0)) {
            return Err(ExnerError::Positivity {
                cell: j,
                x: snap.mesh.center(j as isize),
                h: c.h,
            });
        }
        let ext = self.bc.extend(snap)?;
        let fluxes = self.fluxes(&ext);

        let mesh = snap.mesh;
        let dx = mesh.dx();
        // fixed left-to-right reduction
        let max_speed = fluxes.iter().fold(0.0f64, |m, f| m.max(f.speed));
        if !max_speed.is_finite() {
            let i = fluxes
                .iter()
                .position(|f| !f.speed.is_finite())
                .unwrap_or(0);
            return Err(ExnerError::Divergence {
                cell: i.min(mesh.cells() - 1),
                x: mesh.interface(i),
            });
        }
        let remaining = t_end - snap.time;
        let dt_cfl = if max_speed > 0.0 {
            self.cfl * dx / max_speed
        } else {
            f64::INFINITY
        };
        let (dt, time) = if dt_cfl >= remaining {
            (remaining, t_end)
        } else {
            (dt_cfl, snap.time + dt_cfl)
        };
        let ratio = dt / dx;

        let mut cells = Vec::with_capacity(mesh.cells());
        for (j, c) in snap.cells.iter().enumerate() {
            let (w, e) = (&fluxes[j], &fluxes[j + 1]);
            let next = CellState {
                h: c.h - ratio * (e.mass - w.mass),
                hu: c.hu - ratio * (e.mom_left - w.mom_right),
                z_b: c.z_b - ratio * (e.bed - w.bed),
            };
            let x = mesh.center(j as isize);
            if !next.is_finite() {
                return Err(ExnerError::Divergence { cell: j, x });
            }
            if next.h <= 0.0 {
                return Err(ExnerError::Positivity {
                    cell: j,
                    x,
                    h: next.h,
                });
            }
            cells.push(next);
        }

        let last = fluxes.len() - 1;
        let report = StepReport {
            dt,
            max_speed,
            courant: dt * max_speed / dx,
            water_influx: dt * (fluxes[0].mass - fluxes[last].mass),
            bed_influx: dt * (fluxes[0].bed - fluxes[last].bed),
        };
        Ok((FieldSnapshot { mesh, cells, time }, report))
    }

    /// A single unclipped step.
    pub fn step(&self, snap: &FieldSnapshot) -> Result<(FieldSnapshot, StepReport)> {
        self.step_until(snap, f64::INFINITY)
    }

    /// March from `snap.time` to exactly `t_end`.
    pub fn integrate(&self, snap: FieldSnapshot, t_end: f64) -> Result<Integration> {
        if !(t_end >= snap.time) {
            return Err(ExnerError::InvalidParameter {
                name: "T",
                value: t_end,
                reason: "final time must not precede the snapshot time",
            });
        }
        let mesh = snap.mesh;
        let guard = (10.0 * mesh.cells() as f64 * (t_end - snap.time) / mesh.dx()).ceil();
        let max_steps = (guard as usize).max(1000);

        let mut water = VolumeBudget {
            initial: snap.water_volume(),
            ..Default::default()
        };
        let mut bed = VolumeBudget {
            initial: snap.bed_volume(),
            ..Default::default()
        };
        let mut steps: Vec<StepReport> = Vec::new();
        let mut current = snap;
        while current.time < t_end {
            if steps.len() >= max_steps {
                return Err(ExnerError::NonTermination {
                    steps: steps.len(),
                    t: current.time,
                    t_end,
                });
            }
            let (next, report) = self.step_until(&current, t_end)?;
            if let Some(first) = steps.first() {
                if first.max_speed > 0.0 && report.max_speed > SPEED_BLOWUP * first.max_speed {
                    let (cell, x) = fastest_cell(&next, self.g);
                    return Err(ExnerError::Divergence { cell, x });
                }
            }
            water.influx += report.water_influx;
            bed.influx += report.bed_influx;
            steps.push(report);
            current = next;
        }
        water.r#final = current.water_volume();
        bed.r#final = current.bed_volume();
        Ok(Integration {
            snapshot: current,
            steps,
            water,
            bed,
        })
    }
}

/// Growth of the largest wave speed over a run that counts as a blow-up.
pub const SPEED_BLOWUP: f64 = 1e3;

fn fastest_cell(snap: &FieldSnapshot, g: f64) -> (usize, f64) {
    let speed = |c: &CellState| c.velocity().abs() + (g * c.h.max(0.0)).sqrt();
    let (j, _) = snap
        .cells
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, c)| {
            let s = speed(c);
            if s > best.1 {
                (j, s)
            } else {
                best
            }
        });
    (j, snap.mesh.center(j as isize))
}

/// One relaxation step with the given law, boundary condition and Courant number.
pub fn relaxation_step(
    snap: &FieldSnapshot,
    law: &BedloadLaw,
    bc: &BoundaryCondition,
    cfl: f64,
    g: f64,
) -> Result<(FieldSnapshot, StepReport)> {
    Solver::new(Scheme::Relaxation, *law, g, *bc, cfl)?.step(snap)
}

/// One Rusanov step with the given law, boundary condition and Courant number.
pub fn rusanov_step(
    snap: &FieldSnapshot,
    law: &BedloadLaw,
    bc: &BoundaryCondition,
    cfl: f64,
    g: f64,
) -> Result<(FieldSnapshot, StepReport)> {
    Solver::new(Scheme::Rusanov, *law, g, *bc, cfl)?.step(snap)
}
