//! Bedload transport laws.
//!
//! Every law handled here reduces to the canonical form
//! `q_b = A * (u^2 - u_cr^2)_+^p`, so the solver and the exact solution only
//! ever see an [`EffectiveParams`] triple.

use serde::{Deserialize, Serialize};

use crate::error::{ExnerError, Result};

/// Threshold bedload law driven by the Shields stress under Darcy-Weisbach
/// friction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SedimentLaw {
    /// Empirical coefficient.
    pub kappa: f64,
    /// Exponent on the excess shear stress.
    pub p: f64,
    /// Critical Shields stress.
    pub tau_cr: f64,
    /// Darcy-Weisbach friction coefficient.
    pub f: f64,
    /// Relative sediment density `rho_s / rho`.
    pub s: f64,
    /// Sediment diameter (m).
    pub d_s: f64,
    /// Gravitational acceleration (m/s^2).
    pub g: f64,
}

fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ExnerError::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}

impl SedimentLaw {
    pub const MPM_KAPPA: f64 = 8.0;
    pub const MPM_TAU_CR: f64 = 0.047;

    pub fn new(kappa: f64, p: f64, tau_cr: f64, f: f64, s: f64, d_s: f64, g: f64) -> Result<Self> {
        let law = SedimentLaw {
            kappa,
            p,
            tau_cr,
            f,
            s,
            d_s,
            g,
        };
        law.validate()?;
        Ok(law)
    }

    /// Meyer-Peter & Muller: `kappa = 8`, `p = 3/2`, `tau_cr = 0.047`.
    pub fn meyer_peter_muller(f: f64, s: f64, d_s: f64, g: f64) -> Result<Self> {
        Self::new(Self::MPM_KAPPA, 1.5, Self::MPM_TAU_CR, f, s, d_s, g)
    }

    pub fn validate(&self) -> Result<()> {
        check("kappa", self.kappa, self.kappa >= 0.0, "must be >= 0")?;
        check("p", self.p, self.p > 0.0, "must be > 0")?;
        check("tau_cr", self.tau_cr, self.tau_cr >= 0.0, "must be >= 0")?;
        check("f", self.f, self.f > 0.0, "must be > 0")?;
        check("s", self.s, self.s > 1.0, "must be > 1")?;
        check("d_s", self.d_s, self.d_s > 0.0, "must be > 0")?;
        check("g", self.g, self.g > 0.0, "must be > 0")
    }

    /// `f / (8 (s-1) g d_s)`: the factor turning `u^2` into a Shields stress.
    fn stress_factor(&self) -> f64 {
        self.f / (8.0 * (self.s - 1.0) * self.g * self.d_s)
    }

    /// Dimensionless bottom shear stress for depth-averaged velocity `u`.
    pub fn shields_stress(&self, u: f64) -> f64 {
        self.stress_factor() * u * u
    }

    pub fn effective_params(&self) -> EffectiveParams {
        let k = self.stress_factor();
        EffectiveParams {
            a: self.kappa * k.powf(self.p) * ((self.s - 1.0) * self.g * self.d_s.powi(3)).sqrt(),
            u_cr2: self.tau_cr / k,
            p: self.p,
        }
    }
}

/// Grass law `q_b = A_g |u|^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrassLaw {
    pub a_g: f64,
}

impl GrassLaw {
    pub fn new(a_g: f64) -> Result<Self> {
        check("a_g", a_g, a_g > 0.0, "must be > 0")?;
        Ok(GrassLaw { a_g })
    }

    pub fn effective_params(&self) -> EffectiveParams {
        EffectiveParams {
            a: self.a_g,
            u_cr2: 0.0,
            p: 1.5,
        }
    }
}

/// The reduced form `(A, u_cr^2, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// Interaction coefficient.
    pub a: f64,
    /// Squared critical velocity (m^2/s^2).
    pub u_cr2: f64,
    pub p: f64,
}

/// Partial derivatives of `q_b(h, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePartials {
    pub d_q: f64,
    pub d_h: f64,
}

impl EffectiveParams {
    fn excess(&self, u: f64) -> f64 {
        u * u - self.u_cr2
    }

    /// Unsigned transport rate; zero at and below the threshold.
    pub fn rate(&self, u: f64) -> f64 {
        let e = self.excess(u);
        if e <= 0.0 || self.a == 0.0 {
            0.0
        } else {
            self.a * e.powf(self.p)
        }
    }

    /// Transport rate carrying the sign of the flow.
    pub fn signed_rate(&self, u: f64) -> f64 {
        if u < 0.0 {
            -self.rate(u)
        } else {
            self.rate(u)
        }
    }

    /// d(rate)/du, with the one-sided value 0 at the threshold.
    fn rate_slope(&self, u: f64) -> f64 {
        let e = self.excess(u);
        if e <= 0.0 || self.a == 0.0 {
            0.0
        } else {
            2.0 * self.a * self.p * u * e.powf(self.p - 1.0)
        }
    }

    fn partials_from_slope(h: f64, q: f64, slope: f64) -> Result<RatePartials> {
        if !(h > 0.0) {
            return Err(ExnerError::Domain {
                x: f64::NAN,
                reason: format!("bedload partials need h > 0, got h = {h}"),
            });
        }
        let u = q / h;
        Ok(RatePartials {
            d_q: slope / h,
            d_h: -u * slope / h,
        })
    }

    /// Partials of the unsigned rate `A ((q/h)^2 - u_cr^2)_+^p`.
    pub fn rate_partials(&self, h: f64, q: f64) -> Result<RatePartials> {
        let slope = if h > 0.0 { self.rate_slope(q / h) } else { 0.0 };
        Self::partials_from_slope(h, q, slope)
    }

    /// Partials of the signed rate used by the solvers.
    pub fn signed_rate_partials(&self, h: f64, q: f64) -> Result<RatePartials> {
        let slope = if h > 0.0 {
            self.rate_slope(q / h).abs()
        } else {
            0.0
        };
        Self::partials_from_slope(h, q, slope)
    }
}

/// Any supported bedload law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BedloadLaw {
    Threshold(SedimentLaw),
    Grass(GrassLaw),
}

impl BedloadLaw {
    pub fn grass(a_g: f64) -> Result<Self> {
        Ok(BedloadLaw::Grass(GrassLaw::new(a_g)?))
    }

    pub fn meyer_peter_muller(f: f64, s: f64, d_s: f64, g: f64) -> Result<Self> {
        Ok(BedloadLaw::Threshold(SedimentLaw::meyer_peter_muller(
            f, s, d_s, g,
        )?))
    }

    /// A law with `kappa = 0`: the bed never moves.
    pub fn no_transport() -> Self {
        BedloadLaw::Threshold(SedimentLaw {
            kappa: 0.0,
            p: 1.5,
            tau_cr: 0.0,
            f: 0.1,
            s: 2.65,
            d_s: 1e-3,
            g: 9.81,
        })
    }

    pub fn effective_params(&self) -> EffectiveParams {
        match self {
            BedloadLaw::Threshold(law) => law.effective_params(),
            BedloadLaw::Grass(law) => law.effective_params(),
        }
    }

    pub fn rate(&self, u: f64) -> f64 {
        self.effective_params().rate(u)
    }

    pub fn signed_rate(&self, u: f64) -> f64 {
        self.effective_params().signed_rate(u)
    }

    pub fn rate_partials(&self, h: f64, q: f64) -> Result<RatePartials> {
        self.effective_params().rate_partials(h, q)
    }

    pub fn name(&self) -> &'static str {
        match self {
            BedloadLaw::Grass(_) => "grass",
            BedloadLaw::Threshold(l)
                if l.kappa == SedimentLaw::MPM_KAPPA
                    && l.tau_cr == SedimentLaw::MPM_TAU_CR
                    && l.p == 1.5 =>
            {
                "mpm"
            }
            BedloadLaw::Threshold(_) => "custom",
        }
    }
}
