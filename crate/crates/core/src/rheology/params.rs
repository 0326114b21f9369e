use crate::error::{Error, Result};

/// Equation of state `p(rho)`, entering the system only through the
/// pressure remainder `w(sigma) = p'(alpha + eps^2 sigma) - p'(alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PressureLaw {
    /// `p = (rho - alpha) / eps^2`.
    Linear,
    /// `p = cs^2 rho`.
    Isothermal { cs: f64 },
    /// `p = kappa rho^2 / 2`.
    Quadratic { kappa: f64 },
    /// Tabulated `dp/drho`, interpolated by a natural cubic spline.
    Table(SoundSpeedTable),
}

impl PressureLaw {
    pub fn kind(&self) -> &'static str {
        match self {
            PressureLaw::Linear => "linear",
            PressureLaw::Isothermal { .. } => "isothermal",
            PressureLaw::Quadratic { .. } => "quadratic",
            PressureLaw::Table(_) => "table",
        }
    }

    /// `dp/drho` at density `rho`.
    pub fn dp_drho(&self, rho: f64, eps: f64) -> Result<f64> {
        match self {
            PressureLaw::Linear => Ok(1.0 / (eps * eps)),
            PressureLaw::Isothermal { cs } => Ok(cs * cs),
            PressureLaw::Quadratic { kappa } => Ok(kappa * rho),
            PressureLaw::Table(t) => t.eval(rho),
        }
    }

    /// Whether `dp/drho` is constant, in which case `w` vanishes identically.
    pub fn has_constant_sound_speed(&self) -> bool {
        matches!(self, PressureLaw::Linear | PressureLaw::Isothermal { .. })
    }

    fn validate(&self) -> Result<()> {
        match self {
            PressureLaw::Isothermal { cs } if !(cs.is_finite() && *cs > 0.0) => Err(
                Error::InvalidParams(format!("isothermal sound speed {cs} must be positive")),
            ),
            PressureLaw::Quadratic { kappa } if !(kappa.is_finite() && *kappa > 0.0) => Err(
                Error::InvalidParams(format!("quadratic coefficient {kappa} must be positive")),
            ),
            _ => Ok(()),
        }
    }
}

/// Natural cubic spline through `(rho_k, dp/drho_k)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SoundSpeedTable {
    rho: Vec<f64>,
    value: Vec<f64>,
    second: Vec<f64>,
}

impl SoundSpeedTable {
    pub fn new(rho: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        let n = rho.len();
        if n < 3 || value.len() != n {
            return Err(Error::InvalidParams(
                "pressure table needs at least 3 matching (rho, dp/drho) samples".into(),
            ));
        }
        if rho.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams(
                "pressure table densities must be strictly increasing".into(),
            ));
        }
        // tridiagonal solve for the second derivatives, natural end conditions
        let mut second = vec![0.0; n];
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = rho[i] - rho[i - 1];
            let h1 = rho[i + 1] - rho[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let c = h1 / 6.0;
            let d = (value[i + 1] - value[i]) / h1 - (value[i] - value[i - 1]) / h0;
            let denom = b - a * c_prime[i - 1];
            c_prime[i] = c / denom;
            d_prime[i] = (d - a * d_prime[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            second[i] = d_prime[i] - c_prime[i] * second[i + 1];
        }
        Ok(Self { rho, value, second })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.rho[0], self.rho[self.rho.len() - 1])
    }

    pub fn samples(&self) -> (&[f64], &[f64]) {
        (&self.rho, &self.value)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return Err(Error::PressureRange {
                density: x,
                reason: format!("outside tabulated range [{lo}, {hi}]"),
            });
        }
        let k = match self.rho.partition_point(|r| *r <= x) {
            0 => 0,
            p if p >= self.rho.len() => self.rho.len() - 2,
            p => p - 1,
        };
        let h = self.rho[k + 1] - self.rho[k];
        let a = (self.rho[k + 1] - x) / h;
        let b = (x - self.rho[k]) / h;
        Ok(a * self.value[k]
            + b * self.value[k + 1]
            + ((a * a * a - a) * self.second[k] + (b * b * b - b) * self.second[k + 1]) * h * h
                / 6.0)
    }
}

/// Nondimensional parameters of the compressible Oldroyd-B system.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidParams {
    /// Mach number, in `(0, 1]`.
    pub eps: f64,
    /// Retardation ratio (polymer viscosity fraction), in `(0, 1)`.
    pub omega: f64,
    /// Weissenberg number.
    pub we: f64,
    /// Reference density.
    pub alpha: f64,
    /// Slip parameter of the objective derivative, in `[-1, 1]`.
    pub a: f64,
    /// Lower bound on the initial density `alpha + eps^2 sigma_0`.
    pub m1: f64,
    /// Upper bound on the initial density.
    pub m_upper: f64,
    pub pressure: PressureLaw,
}

impl Default for FluidParams {
    fn default() -> Self {
        Self {
            eps: 0.1,
            omega: 0.5,
            we: 0.1,
            alpha: 1.0,
            a: 1.0,
            m1: 0.5,
            m_upper: 2.0,
            pressure: PressureLaw::Linear,
        }
    }
}

impl FluidParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return bad(format!("eps = {} must lie in (0, 1]", self.eps));
        }
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return bad(format!("omega = {} must lie in (0, 1)", self.omega));
        }
        if !(self.we > 0.0 && self.we.is_finite()) {
            return bad(format!("We = {} must be positive", self.we));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha = {} must be positive", self.alpha));
        }
        if !(-1.0..=1.0).contains(&self.a) {
            return bad(format!("a = {} must lie in [-1, 1]", self.a));
        }
        if !(self.m1 > 0.0 && self.m1 <= self.m_upper && self.m_upper.is_finite()) {
            return bad(format!(
                "density bounds must satisfy 0 < m1 <= M1, got m1 = {}, M1 = {}",
                self.m1, self.m_upper
            ));
        }
        if !(self.m1 <= self.alpha && self.alpha <= self.m_upper) {
            return bad(format!(
                "alpha = {} must lie in [m1, M1] = [{}, {}]",
                self.alpha, self.m1, self.m_upper
            ));
        }
        self.pressure.validate()?;
        if let PressureLaw::Table(t) = &self.pressure {
            let (lo, hi) = t.range();
            let (blo, bhi) = self.density_band();
            if lo > blo || hi < bhi {
                return bad(format!(
                    "pressure table range [{lo}, {hi}] must cover the operating band [{blo}, {bhi}]"
                ));
            }
        }
        Ok(())
    }

    /// Operating band `[m1/2, 2 M1]` for `alpha + eps^2 sigma`.
    pub fn density_band(&self) -> (f64, f64) {
        (0.5 * self.m1, 2.0 * self.m_upper)
    }

    pub fn density(&self, sigma: f64) -> f64 {
        self.alpha + self.eps * self.eps * sigma
    }

    /// `eps^-2 alpha`, the density source coefficient.
    pub fn acoustic_coefficient(&self) -> f64 {
        self.alpha / (self.eps * self.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_are_valid() {
        FluidParams::default().validate().unwrap();
    }

    #[test]
    fn range_checks() {
        let base = FluidParams::default();
        for p in [
            FluidParams { eps: 0.0, ..base.clone() },
            FluidParams { eps: 1.5, ..base.clone() },
            FluidParams { omega: 1.0, ..base.clone() },
            FluidParams { we: -1.0, ..base.clone() },
            FluidParams { a: 1.5, ..base.clone() },
            FluidParams { m1: 2.0, m_upper: 1.0, ..base.clone() },
            FluidParams { alpha: 3.0, ..base.clone() },
            FluidParams { pressure: PressureLaw::Isothermal { cs: 0.0 }, ..base.clone() },
        ] {
            assert!(p.validate().is_err(), "{p:?}");
        }
        assert!(FluidParams { eps: 1.0, ..base }.validate().is_ok());
    }

    #[test]
    fn spline_reproduces_quadratic_samples_and_is_smooth() {
        let rho: Vec<f64> = (0..21).map(|i| 0.1 + 0.2 * i as f64).collect();
        let val: Vec<f64> = rho.iter().map(|r| 2.0 * r).collect();
        let t = SoundSpeedTable::new(rho.clone(), val).unwrap();
        // linear data is reproduced exactly by a natural spline
        for x in [0.1, 0.77, 1.0, 2.345, 4.1] {
            assert!((t.eval(x).unwrap() - 2.0 * x).abs() < 1e-12);
        }
        assert!(t.eval(0.05).is_err());
        assert!(t.eval(4.2).is_err());
    }

    #[test]
    fn table_must_cover_band() {
        let t = SoundSpeedTable::new(vec![0.9, 1.0, 1.1], vec![1.0, 1.0, 1.0]).unwrap();
        let p = FluidParams {
            pressure: PressureLaw::Table(t),
            ..FluidParams::default()
        };
        assert!(p.validate().is_err());
        assert!(SoundSpeedTable::new(vec![1.0, 0.5, 2.0], vec![1.0; 3]).is_err());
    }
}
