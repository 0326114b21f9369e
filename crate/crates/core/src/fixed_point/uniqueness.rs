use super::triple::{diff_sq, IterTriple};
use crate::error::{Error, Result};
use crate::fields::norms::{l2, norm};
use crate::rheology::FluidParams;

/// Largest `delta` keeping both dissipation coefficients of the difference
/// energy inequality positive:
/// `1 - delta (10 eps^2 omega + alpha We) / (4 alpha omega (1-omega))` and
/// `1 - delta eps^2 / (alpha (1-omega))`.
pub fn delta_threshold(params: &FluidParams) -> f64 {
    let (a, e2, om, we) = (params.alpha, params.eps * params.eps, params.omega, params.we);
    let grad = 4.0 * a * om * (1.0 - om) / (10.0 * e2 * om + a * we);
    let div = a * (1.0 - om) / e2;
    grad.min(div)
}

/// Difference energy `alpha |u|^2 + (eps^2/alpha)|sigma|^2 + (We/(2 omega))|tau|^2`
/// of two trajectories at every level.
pub fn difference_energy(a: &IterTriple, b: &IterTriple, params: &FluidParams) -> Result<Vec<f64>> {
    if a.w.len() != b.w.len() {
        return Err(Error::ShapeMismatch(format!(
            "trajectories of {} and {} levels",
            a.w.len(),
            b.w.len()
        )));
    }
    let (al, e2) = (params.alpha, params.eps * params.eps);
    let ct = params.we / (2.0 * params.omega);
    Ok((0..a.w.len())
        .map(|n| {
            al * diff_sq(&a.w[n], &b.w[n])
                + e2 / al * diff_sq(&a.pi[n], &b.pi[n])
                + ct * diff_sq(&a.psi[n], &b.psi[n])
        })
        .collect())
}

/// Integrands of the growth rate, split so that
/// `X = C12 * linear + C12^2 / (2 delta) * quadratic` with
/// `linear = |u1| + |u2| + |u1|_3` and
/// `quadratic = |u1|_2^3 + |sigma1|_2^2 + 2|sigma2|_2^2 + |tau1|_2^2`.
fn rate_parts(a: &IterTriple, b: &IterTriple) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lin = Vec::with_capacity(a.w.len());
    let mut quad = Vec::with_capacity(a.w.len());
    for n in 0..a.w.len() {
        lin.push(l2(&a.w[n]) + l2(&b.w[n]) + norm(&a.w[n], 3)?);
        let s1 = norm(&a.pi[n], 2)?;
        let s2 = norm(&b.pi[n], 2)?;
        let t1 = norm(&a.psi[n], 2)?;
        quad.push(norm(&a.w[n], 2)?.powi(3) + s1 * s1 + 2.0 * s2 * s2 + t1 * t1);
    }
    Ok((lin, quad))
}

/// Trapezoidal running integral.
fn cumulative(v: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    out.push(0.0);
    for n in 1..v.len() {
        acc += 0.5 * dt * (v[n] + v[n - 1]);
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallRow {
    pub t: f64,
    pub energy: f64,
    /// Growth rate `X_delta` at this level.
    pub rate: f64,
    /// `e(0) exp(2 int_0^t X_delta)`.
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallLedger {
    pub delta: f64,
    pub threshold: f64,
    pub c12: f64,
    pub rows: Vec<GronwallRow>,
}

impl GronwallLedger {
    /// `e(t) <= envelope(t) * factor + floor` at every level.
    pub fn holds(&self, factor: f64, floor: f64) -> bool {
        self.rows.iter().all(|r| r.energy <= r.envelope * factor + floor)
    }

    pub fn final_energy(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.energy)
    }
}

fn check_delta(delta: f64, params: &FluidParams) -> Result<f64> {
    let threshold = delta_threshold(params);
    if !(delta > 0.0 && delta < threshold) {
        return Err(Error::DeltaTooLarge { delta, threshold });
    }
    Ok(threshold)
}

/// Smallest `C12 >= 0` for which the Gronwall envelope dominates the
/// difference energy at every level. Infinite when the energy grows from
/// zero or no finite constant suffices.
pub fn fit_c12(a: &IterTriple, b: &IterTriple, delta: f64, params: &FluidParams) -> Result<f64> {
    check_delta(delta, params)?;
    let e = difference_energy(a, b, params)?;
    let (lin, quad) = rate_parts(a, b)?;
    let il = cumulative(&lin, a.dt);
    let iq = cumulative(&quad, a.dt);
    let mut c = 0.0f64;
    for n in 1..e.len() {
        if e[n] <= e[0] {
            continue;
        }
        if e[0] == 0.0 {
            return Ok(f64::INFINITY);
        }
        // need 2 (C il + C^2 iq / (2 delta)) >= ln(e_n / e_0)
        let l = (e[n] / e[0]).ln();
        let (p, q) = (iq[n] / delta, 2.0 * il[n]);
        let need = if p > 0.0 {
            (-q + (q * q + 4.0 * p * l).sqrt()) / (2.0 * p)
        } else if q > 0.0 {
            l / q
        } else {
            f64::INFINITY
        };
        c = c.max(need);
    }
    Ok(c)
}

/// Difference energy of two solutions against its Gronwall envelope for a
/// given `C12`.
pub fn uniqueness_experiment(
    a: &IterTriple,
    b: &IterTriple,
    delta: f64,
    c12: f64,
    params: &FluidParams,
) -> Result<GronwallLedger> {
    let threshold = check_delta(delta, params)?;
    let e = difference_energy(a, b, params)?;
    let (lin, quad) = rate_parts(a, b)?;
    let rate: Vec<f64> = lin
        .iter()
        .zip(&quad)
        .map(|(l, q)| c12 * l + c12 * c12 / (2.0 * delta) * q)
        .collect();
    let int = cumulative(&rate, a.dt);
    let rows = (0..e.len())
        .map(|n| GronwallRow {
            t: n as f64 * a.dt,
            energy: e[n],
            rate: rate[n],
            envelope: e[0] * (2.0 * int[n]).exp(),
        })
        .collect();
    Ok(GronwallLedger {
        delta,
        threshold,
        c12,
        rows,
    })
}
