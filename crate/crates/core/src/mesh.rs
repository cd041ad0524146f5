//! Uniform 1D mesh, per-cell states and error norms against the exact solution.

use serde::{Deserialize, Serialize};

use crate::error::{ExnerError, Result};
use crate::exact::ExactSolution;
use crate::laws::BedloadLaw;

/// Depth below which a cell is treated as dry and its velocity as zero.
pub const H_DRY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh1D {
    x_min: f64,
    x_max: f64,
    cells: usize,
}

impl Mesh1D {
    pub fn new(x_min: f64, x_max: f64, cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(ExnerError::InvalidParameter {
                name: "x_max",
                value: x_max,
                reason: "must be finite and greater than x_min",
            });
        }
        if cells < 2 {
            return Err(ExnerError::InvalidParameter {
                name: "cells",
                value: cells as f64,
                reason: "need at least 2 cells",
            });
        }
        Ok(Mesh1D {
            x_min,
            x_max,
            cells,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.cells as f64
    }

    /// Center of cell `j`; `j` may index one ghost cell past either end.
    pub fn center(&self, j: isize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.cells as isize).map(|j| self.center(j))
    }

    /// Position of interface `i`, between cells `i - 1` and `i`.
    pub fn interface(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }
}

/// Conserved variables of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CellState {
    pub h: f64,
    pub hu: f64,
    pub z_b: f64,
}

impl CellState {
    pub fn from_primitive(h: f64, u: f64, z_b: f64) -> Self {
        CellState { h, hu: h * u, z_b }
    }

    pub fn velocity(&self) -> f64 {
        if self.h > H_DRY {
            self.hu / self.h
        } else {
            0.0
        }
    }

    pub fn discharge(&self) -> f64 {
        self.hu
    }

    pub fn eta(&self) -> f64 {
        self.h + self.z_b
    }

    pub fn is_finite(&self) -> bool {
        self.h.is_finite() && self.hu.is_finite() && self.z_b.is_finite()
    }
}

/// A cell state extended with the relaxation pressure and bedload flux.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RelaxCellState {
    pub state: CellState,
    pub pi: f64,
    pub q_r: f64,
}

impl RelaxCellState {
    /// Instantaneous relaxation: `pi = g h^2 / 2`, `q_r = q_b(u)`.
    pub fn at_equilibrium(state: CellState, law: &BedloadLaw, g: f64) -> Self {
        let h = state.h.max(0.0);
        RelaxCellState {
            state,
            pi: 0.5 * g * h * h,
            q_r: law.signed_rate(state.velocity()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub mesh: Mesh1D,
    pub cells: Vec<CellState>,
    pub time: f64,
}

impl FieldSnapshot {
    pub fn new(mesh: Mesh1D, cells: Vec<CellState>, time: f64) -> Result<Self> {
        if cells.len() != mesh.cells() {
            return Err(ExnerError::InvalidParameter {
                name: "cells",
                value: cells.len() as f64,
                reason: "state array length must equal the mesh cell count",
            });
        }
        Ok(FieldSnapshot { mesh, cells, time })
    }

    /// Exact solution sampled at cell centers.
    pub fn project_exact(mesh: Mesh1D, sol: &ExactSolution, t: f64) -> Result<Self> {
        let cells = mesh
            .centers()
            .map(|x| {
                sol.eval(x, t)
                    .map(|p| CellState::from_primitive(p.h, p.u, p.z_b))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldSnapshot {
            mesh,
            cells,
            time: t,
        })
    }

    pub fn equilibrium_lift(&self, law: &BedloadLaw, g: f64) -> Vec<RelaxCellState> {
        self.cells
            .iter()
            .map(|&c| RelaxCellState::at_equilibrium(c, law, g))
            .collect()
    }

    /// `sum h dx`.
    pub fn water_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.h).sum::<f64>() * self.mesh.dx()
    }

    /// `sum z_b dx`.
    pub fn bed_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.z_b).sum::<f64>() * self.mesh.dx()
    }

    pub fn norms(&self, sol: &ExactSolution) -> Result<ErrorNorms> {
        let dx = self.mesh.dx();
        let mut h = NormAccumulator::default();
        let mut u = NormAccumulator::default();
        let mut z = NormAccumulator::default();
        for (x, c) in self.mesh.centers().zip(&self.cells) {
            let e = sol.eval(x, self.time)?;
            h.push(c.h, e.h, dx);
            u.push(c.velocity(), e.u, dx);
            z.push(c.z_b, e.z_b, dx);
        }
        Ok(ErrorNorms {
            h: h.finish(),
            u: u.finish(),
            z_b: z.finish(),
        })
    }
}

/// Absolute and relative discrete norms of one field's error.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub rel_l1: f64,
    pub rel_l2: f64,
    pub rel_linf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub h: FieldNorms,
    pub u: FieldNorms,
    pub z_b: FieldNorms,
}

const REL_GUARD: f64 = 1e-14;

#[derive(Default)]
struct NormAccumulator {
    err: [f64; 3],
    reference: [f64; 3],
}

impl NormAccumulator {
    fn push(&mut self, value: f64, exact: f64, dx: f64) {
        let d = (value - exact).abs();
        self.err[0] += d * dx;
        self.err[1] += d * d * dx;
        self.err[2] = self.err[2].max(d);
        let r = exact.abs();
        self.reference[0] += r * dx;
        self.reference[1] += r * r * dx;
        self.reference[2] = self.reference[2].max(r);
    }

    fn finish(self) -> FieldNorms {
        let [l1, l2sq, linf] = self.err;
        let [r1, r2sq, rinf] = self.reference;
        let l2 = l2sq.sqrt();
        let rel = |e: f64, r: f64| if r < REL_GUARD { e } else { e / r };
        FieldNorms {
            l1,
            l2,
            linf,
            rel_l1: rel(l1, r1),
            rel_l2: rel(l2, r2sq.sqrt()),
            rel_linf: rel(linf, rinf),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bench_mesh(cells: usize) -> Mesh1D {
        Mesh1D::new(0.0, 4.0, cells).unwrap()
    }

    #[test]
    fn mesh_geometry() {
        let m = bench_mesh(500);
        assert_relative_eq!(m.dx(), 0.008);
        assert_relative_eq!(m.center(0), 0.004);
        assert_relative_eq!(m.center(-1), -0.004);
        assert_relative_eq!(m.interface(500), 4.0);
        assert!(Mesh1D::new(0.0, 4.0, 1).is_err());
        assert!(Mesh1D::new(4.0, 4.0, 10).is_err());
    }

    #[test]
    fn projection_two_cells() {
        let sol = ExactSolution::benchmark();
        let snap = FieldSnapshot::project_exact(bench_mesh(2), &sol, 0.0).unwrap();
        let u = [2f64.cbrt(), 4f64.cbrt()];
        for (c, u) in snap.cells.iter().zip(u) {
            assert_relative_eq!(c.h, 1.0 / u, max_relative = 1e-14);
            assert_relative_eq!(c.velocity(), u, max_relative = 1e-14);
        }
    }

    #[test]
    fn projection_time_shift_only_moves_bed() {
        let sol = ExactSolution::benchmark();
        let a = FieldSnapshot::project_exact(bench_mesh(8), &sol, 0.0).unwrap();
        let b = FieldSnapshot::project_exact(bench_mesh(8), &sol, 7.0).unwrap();
        for (a, b) in a.cells.iter().zip(&b.cells) {
            assert_eq!((a.h, a.hu), (b.h, b.hu));
            assert_relative_eq!(b.z_b - a.z_b, -0.035, epsilon = 1e-14);
        }
    }

    #[test]
    fn lift_values() {
        let law = BedloadLaw::grass(0.005).unwrap();
        let r =
            RelaxCellState::at_equilibrium(CellState::from_primitive(1.0, 0.0, 0.0), &law, 9.81);
        assert_relative_eq!(r.pi, 4.905);
        let dry = RelaxCellState::at_equilibrium(CellState::default(), &law, 9.81);
        assert_eq!((dry.pi, dry.q_r), (0.0, 0.0));

        let sol = ExactSolution::benchmark();
        let p = sol.eval(0.0, 0.0).unwrap();
        let r =
            RelaxCellState::at_equilibrium(CellState::from_primitive(p.h, p.u, p.z_b), &law, 9.81);
        assert_relative_eq!(r.q_r, 0.005, max_relative = 1e-14);
    }

    #[test]
    fn lift_is_idempotent() {
        let sol = ExactSolution::benchmark();
        let snap = FieldSnapshot::project_exact(bench_mesh(16), &sol, 0.3).unwrap();
        let once = snap.equilibrium_lift(&sol.law, 9.81);
        let again: Vec<_> = once
            .iter()
            .map(|r| RelaxCellState::at_equilibrium(r.state, &sol.law, 9.81))
            .collect();
        assert_eq!(once, again);
    }

    #[test]
    fn norms_of_exact_projection_vanish() {
        let sol = ExactSolution::benchmark();
        let snap = FieldSnapshot::project_exact(bench_mesh(50), &sol, 2.0).unwrap();
        let n = snap.norms(&sol).unwrap();
        for f in [n.h, n.u, n.z_b] {
            assert!(f.l1 <= 1e-15 && f.l2 <= 1e-15 && f.linf <= 1e-15);
        }
    }

    #[test]
    fn constant_depth_offset() {
        let sol = ExactSolution::benchmark();
        let mut snap = FieldSnapshot::project_exact(bench_mesh(40), &sol, 0.0).unwrap();
        for c in &mut snap.cells {
            // keep u fixed
            let u = c.velocity();
            c.h += 1e-3;
            c.hu = c.h * u;
        }
        let n = snap.norms(&sol).unwrap();
        assert_relative_eq!(n.h.linf, 1e-3, max_relative = 1e-9);
        assert_relative_eq!(n.h.l1, 4e-3, max_relative = 1e-9);
        assert!(n.u.linf < 1e-14);
    }

    #[test]
    fn cauchy_schwarz_on_random_perturbation() {
        let sol = ExactSolution::benchmark();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut snap = FieldSnapshot::project_exact(bench_mesh(64), &sol, 0.0).unwrap();
        for c in &mut snap.cells {
            c.h += rng.random_range(-1e-2..1e-2);
            c.z_b += rng.random_range(-1e-2..1e-2);
        }
        let n = snap.norms(&sol).unwrap();
        let len = snap.mesh.length();
        for f in [n.h, n.z_b] {
            assert!(f.l1 <= len.sqrt() * f.l2 * (1.0 + 1e-12));
            assert!(f.l2 <= len.sqrt() * f.linf * (1.0 + 1e-12));
        }
    }

    #[test]
    fn relative_norm_guard() {
        let mut acc = NormAccumulator::default();
        acc.push(1e-3, 0.0, 1.0);
        let f = acc.finish();
        assert_eq!(f.rel_l1, f.l1);
    }

    #[test]
    fn snapshot_length_checked() {
        assert!(FieldSnapshot::new(bench_mesh(3), vec![CellState::default(); 2], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn primitive_round_trip(h in 1e-12f64..100.0, u in -20.0f64..20.0) {
            let c = CellState::from_primitive(h, u, 0.0);
            let back = c.velocity();
            prop_assert!((back - u).abs() <= 2.0 * f64::EPSILON * u.abs());
        }
    }
}
