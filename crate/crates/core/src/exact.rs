//! Closed-form unsteady solution of the Saint-Venant-Exner system.
//!
//! For a uniform discharge `q` the flow `(h, u)` is steady, the bedload flux
//! is linear in space (`q_b = alpha x + beta`) and the bed is lowered
//! uniformly at rate `alpha`:
//!
//! ```text
//! u_e^2 = ((alpha x + beta) / A)^(1/p)
//! u     = sqrt(u_e^2 + u_cr^2),   h = q / u
//! z_b0  = -(u^3 + 2 g q) / (2 g u) + C
//! z_b   = z_b0 - alpha t
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{ExnerError, Result};
use crate::laws::{BedloadLaw, EffectiveParams};

pub const DEFAULT_G: f64 = 9.81;

/// Primitive variables of the exact solution at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactPoint {
    pub h: f64,
    pub u: f64,
    pub z_b: f64,
}

impl ExactPoint {
    /// Free-surface elevation `h + z_b`.
    pub fn eta(&self) -> f64 {
        self.h + self.z_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    /// Uniform discharge (m^2/s).
    pub q: f64,
    /// Bed lowering rate, also the slope of `q_b` in x (m/s).
    pub alpha: f64,
    /// Bedload flux at x = 0 (m^2/s).
    pub beta: f64,
    /// Bed level offset (m).
    pub c: f64,
    pub g: f64,
    pub law: BedloadLaw,
}

impl ExactSolution {
    pub fn new(q: f64, alpha: f64, beta: f64, c: f64, g: f64, law: BedloadLaw) -> Result<Self> {
        let bad = |name, value, reason| ExnerError::InvalidParameter {
            name,
            value,
            reason,
        };
        if !(q > 0.0 && q.is_finite()) {
            return Err(bad("q", q, "must be > 0"));
        }
        if !(g > 0.0 && g.is_finite()) {
            return Err(bad("g", g, "must be > 0"));
        }
        if !alpha.is_finite() {
            return Err(bad("alpha", alpha, "must be finite"));
        }
        if !beta.is_finite() {
            return Err(bad("beta", beta, "must be finite"));
        }
        if !c.is_finite() {
            return Err(bad("C", c, "must be finite"));
        }
        let a = law.effective_params().a;
        if !(a > 0.0) {
            return Err(bad("A", a, "interaction coefficient must be > 0"));
        }
        Ok(ExactSolution {
            q,
            alpha,
            beta,
            c,
            g,
            law,
        })
    }

    /// Grass law, `q = 1`, `A_g = alpha = beta = 0.005`, `C = 1`.
    pub fn benchmark() -> Self {
        let law = BedloadLaw::grass(0.005).expect("valid Grass coefficient");
        ExactSolution::new(1.0, 0.005, 0.005, 1.0, DEFAULT_G, law).expect("valid benchmark")
    }

    fn params(&self) -> EffectiveParams {
        self.law.effective_params()
    }

    /// The linear bedload flux `alpha x + beta`.
    pub fn linear_flux(&self, x: f64) -> f64 {
        self.alpha * x + self.beta
    }

    fn velocity(&self, x: f64) -> Result<f64> {
        let flux = self.linear_flux(x);
        if !(flux > 0.0) {
            return Err(ExnerError::Domain {
                x,
                reason: format!("alpha x + beta = {flux} must be > 0"),
            });
        }
        let e = self.params();
        let ue2 = (flux / e.a).powf(1.0 / e.p);
        let u2 = ue2 + e.u_cr2;
        if !(u2 > e.u_cr2) {
            return Err(ExnerError::Domain {
                x,
                reason: "shear stress does not exceed the critical value".into(),
            });
        }
        Ok(u2.sqrt())
    }

    /// Initial bed profile `z_b0(x)` given the velocity there.
    fn bed_from_velocity(&self, u: f64) -> f64 {
        -(u * u * u + 2.0 * self.g * self.q) / (2.0 * self.g * u) + self.c
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<ExactPoint> {
        let u = self.velocity(x)?;
        Ok(ExactPoint {
            h: self.q / u,
            u,
            z_b: -self.alpha * t + self.bed_from_velocity(u),
        })
    }

    pub fn initial_bed(&self, x: f64) -> Result<f64> {
        Ok(self.bed_from_velocity(self.velocity(x)?))
    }

    /// The law evaluated on the exact velocity; equals `alpha x + beta`.
    pub fn bedload_at(&self, x: f64) -> Result<f64> {
        let u = self.velocity(x)?;
        Ok(self.law.rate(u))
    }

    /// Closed-form `d z_b0 / dx = (q/u^2 - u/g) du/dx`.
    pub fn bed_slope(&self, x: f64) -> Result<f64> {
        let u = self.velocity(x)?;
        let e = self.params();
        let ratio = self.linear_flux(x) / e.a;
        let due2_dx = ratio.powf(1.0 / e.p - 1.0) * self.alpha / (e.p * e.a);
        let du_dx = due2_dx / (2.0 * u);
        Ok((self.q / (u * u) - u / self.g) * du_dx)
    }

    /// Central-difference residuals of mass, momentum and Exner equations.
    pub fn residual(&self, x: f64, t: f64, dx: f64, dt: f64) -> Result<[f64; 3]> {
        let g = self.g;
        let c = self.eval(x, t)?;
        let w = self.eval(x - dx, t)?;
        let e = self.eval(x + dx, t)?;
        let before = self.eval(x, t - dt)?;
        let after = self.eval(x, t + dt)?;

        let ddt = |f: fn(&ExactPoint) -> f64| (f(&after) - f(&before)) / (2.0 * dt);
        let ddx = |f: &dyn Fn(&ExactPoint) -> f64| (f(&e) - f(&w)) / (2.0 * dx);

        let mass = ddt(|p| p.h) + ddx(&|p| p.h * p.u);
        let momentum = ddt(|p| p.h * p.u)
            + ddx(&|p| p.h * p.u * p.u + 0.5 * g * p.h * p.h)
            + g * c.h * ddx(&|p| p.z_b);
        let exner = ddt(|p| p.z_b) + ddx(&|p| self.law.rate(p.u));
        Ok([mass, momentum, exner])
    }

    /// Fails unless every point of `[x_min, x_max]` lies in the validity domain.
    pub fn check_interval(&self, x_min: f64, x_max: f64) -> Result<()> {
        // linear in x, so the endpoints decide
        self.eval(x_min, 0.0)?;
        self.eval(x_max, 0.0)?;
        Ok(())
    }

    /// Froude number `u / sqrt(g h)` at x.
    pub fn froude(&self, x: f64) -> Result<f64> {
        let p = self.eval(x, 0.0)?;
        Ok(p.u / (self.g * p.h).sqrt())
    }
}
