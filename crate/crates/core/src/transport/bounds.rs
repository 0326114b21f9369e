use crate::error::{Error, Result};
use crate::fields::norms::norm;
use crate::fields::{Field, ScalarField, SymTensorField, VectorField};
use crate::rheology::FluidParams;

/// Discrete norms of a transported history and the driving velocity, with
/// the smallest constants that make the a-priori bounds hold.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportBounds {
    /// `sup_n |q^n|_{H2}`.
    pub sup_h2: f64,
    /// `sup_n |(q^n - q^{n-1})/dt|_{H1}`.
    pub sup_dt_h1: f64,
    /// `sum_n dt |w^n|_{H3}`.
    pub w_l1_h3: f64,
    /// `sup_n |w^n|_{H2}`.
    pub w_linf_h2: f64,
    /// Initial `H2` norm.
    pub initial_h2: f64,
    /// Initial `L2` norm.
    pub initial_l2: f64,
    /// Smallest admissible `C_Omega`; infinite when no value works.
    pub c_omega: f64,
    /// Constant in front of the time-derivative bound (stress only).
    pub c_zero: Option<f64>,
}

/// Per-level norms from which every prefix of the history can be fitted.
struct Series {
    h2: Vec<f64>,
    /// `|(q^n - q^{n-1})/dt|_{H1}`, zero at `n = 0`.
    dt_h1: Vec<f64>,
    w_h3: Vec<f64>,
    w_h2: Vec<f64>,
    initial_l2: f64,
}

/// Running quantities up to some level.
struct Prefix {
    sup_h2: f64,
    sup_dt: f64,
    wl1: f64,
    winf: f64,
}

impl Series {
    fn new<F: Field>(q: &[F], w: &[VectorField], dt: f64, diff: impl Fn(&F, &F) -> F) -> Result<Self> {
        if q.len() != w.len() || q.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "history of {} levels against {} velocity levels",
                q.len(),
                w.len()
            )));
        }
        let mut s = Series {
            h2: Vec::with_capacity(q.len()),
            dt_h1: Vec::with_capacity(q.len()),
            w_h3: Vec::with_capacity(q.len()),
            w_h2: Vec::with_capacity(q.len()),
            initial_l2: norm(&q[0], 0)?,
        };
        for n in 0..q.len() {
            s.h2.push(norm(&q[n], 2)?);
            s.w_h2.push(norm(&w[n], 2)?);
            if n > 0 {
                s.dt_h1.push(norm(&diff(&q[n], &q[n - 1]), 1)? / dt);
                s.w_h3.push(norm(&w[n], 3)?);
            } else {
                s.dt_h1.push(0.0);
                s.w_h3.push(0.0);
            }
        }
        Ok(s)
    }

    fn prefixes(&self, dt: f64) -> Vec<Prefix> {
        let mut out = Vec::with_capacity(self.h2.len());
        let mut p = Prefix {
            sup_h2: 0.0,
            sup_dt: 0.0,
            wl1: 0.0,
            winf: 0.0,
        };
        for n in 0..self.h2.len() {
            p.sup_h2 = p.sup_h2.max(self.h2[n]);
            p.sup_dt = p.sup_dt.max(self.dt_h1[n]);
            p.wl1 += dt * self.w_h3[n];
            p.winf = p.winf.max(self.w_h2[n]);
            out.push(Prefix { ..p });
        }
        out
    }
}

/// Smallest `c >= 0` with `f(c) >= target` for increasing `f`.
fn smallest_increasing(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    if f(0.0) >= target {
        return 0.0;
    }
    let mut hi = 1.0;
    while f(hi) < target {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Density bounds: `sup |sigma|_2 <= (|sigma0|_2 + alpha/eps^2) e^{C W}` and
/// `sup |sigma'|_1 <= C |w|_{Linf H2} (|sigma0|_2 + alpha/eps^2) e^{C W}`
/// with `W = |w|_{L1 H3}`. The reported constant is the smallest one
/// satisfying both.
pub fn density_bounds(
    sigma: &[ScalarField],
    w: &[VectorField],
    dt: f64,
    params: &FluidParams,
) -> Result<TransportBounds> {
    let mut all = density_bounds_running(sigma, w, dt, params)?;
    Ok(all.pop().expect("non-empty history"))
}

/// [`density_bounds`] for every prefix `0..=n` of the history.
pub fn density_bounds_running(
    sigma: &[ScalarField],
    w: &[VectorField],
    dt: f64,
    params: &FluidParams,
) -> Result<Vec<TransportBounds>> {
    let series = Series::new(sigma, w, dt, |a, b| {
        let mut d = a.clone();
        d.axpy(-1.0, b);
        d
    })?;
    let init2 = series.h2[0];
    let base = init2 + params.acoustic_coefficient();
    Ok(series
        .prefixes(dt)
        .into_iter()
        .map(|p| {
            let c_sup = smallest_increasing(|c| base * (c * p.wl1).exp(), p.sup_h2);
            let c_dt = if p.sup_dt == 0.0 {
                0.0
            } else if p.winf == 0.0 {
                f64::INFINITY
            } else {
                smallest_increasing(|c| c * p.winf * base * (c * p.wl1).exp(), p.sup_dt)
            };
            TransportBounds {
                sup_h2: p.sup_h2,
                sup_dt_h1: p.sup_dt,
                w_l1_h3: p.wl1,
                w_linf_h2: p.winf,
                initial_h2: init2,
                initial_l2: series.initial_l2,
                c_omega: c_sup.max(c_dt),
                c_zero: None,
            }
        })
        .collect())
}

/// Stress bounds: `sup |tau|_2 <= (|tau0|_2 + 2 omega/(C We)) e^{C W}` and
/// `sup |tau'|_1 <= C0 (|w|_{Linf H2} + 1/(C We)) (|tau0|_2 + 2 omega/(C We)) e^{C W}`.
///
/// The first right side blows up as `C -> 0`, so it holds trivially for
/// small `C`; the constant is fitted as the smallest `C >= c_floor` for
/// which it holds, where `c_floor` is typically the density constant (one
/// constant serves both). `C0` is then the smallest factor closing the
/// derivative bound at that `C`.
pub fn stress_bounds(
    tau: &[SymTensorField],
    w: &[VectorField],
    dt: f64,
    params: &FluidParams,
    c_floor: f64,
) -> Result<TransportBounds> {
    let floors = vec![c_floor; tau.len()];
    let mut all = stress_bounds_running(tau, w, dt, params, &floors)?;
    Ok(all.pop().expect("non-empty history"))
}

/// [`stress_bounds`] for every prefix, with one floor per prefix.
pub fn stress_bounds_running(
    tau: &[SymTensorField],
    w: &[VectorField],
    dt: f64,
    params: &FluidParams,
    c_floor: &[f64],
) -> Result<Vec<TransportBounds>> {
    let series = Series::new(tau, w, dt, |a, b| {
        let mut d = a.clone();
        d.axpy(-1.0, b);
        d
    })?;
    if c_floor.len() != tau.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} floors for {} levels",
            c_floor.len(),
            tau.len()
        )));
    }
    let init2 = series.h2[0];
    let (we, om) = (params.we, params.omega);
    Ok(series
        .prefixes(dt)
        .into_iter()
        .zip(c_floor)
        .map(|(p, &c_floor)| {
            let rhs = |c: f64| (init2 + 2.0 * om / (c * we)) * (c * p.wl1).exp();
            let floor = if c_floor > 0.0 { c_floor } else { f64::MIN_POSITIVE };
            let c_omega = if rhs(floor) >= p.sup_h2 {
                c_floor.max(0.0)
            } else if p.wl1 == 0.0 {
                f64::INFINITY
            } else {
                // past the minimiser of rhs the right side increases
                let (a, b) = (init2, 2.0 * om / we);
                let cstar = if a > 0.0 {
                    (-p.wl1 * b + (p.wl1 * p.wl1 * b * b + 4.0 * p.wl1 * a * b).sqrt())
                        / (2.0 * p.wl1 * a)
                } else {
                    1.0 / p.wl1
                };
                let start = cstar.max(floor);
                start + smallest_increasing(|s| rhs(start + s), p.sup_h2)
            };
            let c_zero = if c_omega.is_finite() && c_omega > 0.0 {
                let denom = (p.winf + 1.0 / (c_omega * we)) * rhs(c_omega);
                Some(p.sup_dt / denom)
            } else {
                None
            };
            TransportBounds {
                sup_h2: p.sup_h2,
                sup_dt_h1: p.sup_dt,
                w_l1_h3: p.wl1,
                w_linf_h2: p.winf,
                initial_h2: init2,
                initial_l2: series.initial_l2,
                c_omega,
                c_zero,
            }
        })
        .collect())
}
