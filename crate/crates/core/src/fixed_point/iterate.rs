use super::map::{picard_map, MapOutput, MapSettings};
use super::membership::{check_membership, Budgets};
use super::triple::{IterTriple, YDistance};
use crate::error::{Error, Result};
use crate::fields::{mean, Field, ScalarField, SymTensorField, VectorField};
use crate::rheology::FluidParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub map: MapSettings,
    /// When set, every iterate is checked against the invariant set.
    pub budgets: Option<Budgets>,
}

impl Default for FixedPointSettings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 50,
            map: MapSettings::default(),
            budgets: None,
        }
    }
}

/// One row of the convergence history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    pub distance: YDistance,
    /// Ratio of successive distances; `None` for the first iteration.
    pub ratio: Option<f64>,
    pub membership_slack: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Converged {
    /// Last map output; its triple is the computed fixed point.
    pub output: MapOutput,
    pub history: Vec<IterationRecord>,
}

impl Converged {
    pub fn solution(&self) -> &IterTriple {
        &self.output.triple
    }

    pub fn is_monotone(&self) -> bool {
        self.history
            .windows(2)
            .all(|w| w[1].distance.total <= w[0].distance.total)
    }

    /// Largest ratio of successive distances.
    pub fn contraction(&self) -> Option<f64> {
        self.history
            .iter()
            .filter_map(|r| r.ratio)
            .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
    }
}

const MEAN_TOL: f64 = 1e-12;

/// Checks the discrete hypotheses on the initial data: zero-mean density,
/// density inside `[m1, M1]`, Dirichlet velocity, symmetric stress is
/// implied by the storage.
pub fn check_initial_data(
    u0: &VectorField,
    sigma0: &ScalarField,
    params: &FluidParams,
) -> Result<()> {
    params.validate()?;
    if !u0.is_dirichlet() {
        return Err(Error::Hypothesis(
            "initial velocity must vanish on the boundary".into(),
        ));
    }
    let m = mean(sigma0);
    if m.abs() > MEAN_TOL * (1.0 + sigma0.max_abs()) {
        return Err(Error::Hypothesis(format!(
            "initial density remainder must have zero mean, found {m:.3e}"
        )));
    }
    for (idx, s) in sigma0.values().iter().enumerate() {
        let rho = params.density(*s);
        if !(rho >= params.m1 && rho <= params.m_upper) {
            return Err(Error::Hypothesis(format!(
                "initial density band m1 <= alpha + eps^2 sigma0 <= M1 fails at node {:?}: {rho} outside [{}, {}]",
                sigma0.grid().coords(idx),
                params.m1,
                params.m_upper
            )));
        }
    }
    Ok(())
}

/// Successive substitution `x_{k+1} = K(x_k)` over the whole window until
/// the sup-in-time `L2` distance between iterates drops below `tol`.
pub fn iterate(
    u0: &VectorField,
    sigma0: &ScalarField,
    tau0: &SymTensorField,
    f: &[VectorField],
    dt: f64,
    params: &FluidParams,
    settings: FixedPointSettings,
) -> Result<Converged> {
    let start = IterTriple::constant(u0, sigma0, tau0, f.len().saturating_sub(1), dt)?;
    iterate_from(start, f, params, settings, |_| {})
}

/// Same as [`iterate`], starting from an arbitrary guess carrying the
/// initial data, and reporting each iteration to `observe`.
pub fn iterate_from(
    start: IterTriple,
    f: &[VectorField],
    params: &FluidParams,
    settings: FixedPointSettings,
    mut observe: impl FnMut(&IterationRecord),
) -> Result<Converged> {
    check_initial_data(&start.w[0], &start.pi[0], params)?;
    let mut current = start;
    let mut history: Vec<IterationRecord> = Vec::new();
    for k in 1..=settings.max_iter {
        let out = picard_map(&current, f, params, settings.map)?;
        let distance = out.triple.distance(&current, params)?;
        let ratio = history
            .last()
            .filter(|r| r.distance.total > 0.0)
            .map(|r| distance.total / r.distance.total);
        let membership_slack = match settings.budgets {
            Some(b) => Some(check_membership(&out.triple, b, params)?.min_slack()),
            None => None,
        };
        let rec = IterationRecord {
            iteration: k,
            distance,
            ratio,
            membership_slack,
        };
        observe(&rec);
        history.push(rec);
        if !distance.total.is_finite() {
            break;
        }
        if distance.total <= settings.tol {
            return Ok(Converged {
                output: out,
                history,
            });
        }
        current = out.triple;
    }
    Err(Error::NoConvergence {
        iterations: history.len(),
        distance: history.last().map_or(f64::NAN, |r| r.distance.total),
    })
}
