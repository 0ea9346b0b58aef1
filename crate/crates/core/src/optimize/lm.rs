//! Dense Levenberg-Marquardt with Marquardt's diagonal scaling.
//!
//! Minimizes `cost(x) = 0.5 * |r(x)|^2`. Each iteration solves
//! `(J^T J + lambda * D) dx = -J^T r` with `D = diag(J^T J)`; an accepted step
//! divides `lambda` by ten, a rejected one multiplies it by ten.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonlinear least-squares problem.
pub trait NllsProblem {
    fn num_params(&self) -> usize;
    fn num_residuals(&self) -> usize;
    fn residuals(&self, x: &DVector<f64>) -> DVector<f64>;

    /// Analytic Jacobian, `num_residuals x num_params`. `None` selects
    /// central finite differences.
    fn jacobian(&self, _x: &DVector<f64>) -> Option<DMatrix<f64>> {
        None
    }
}

/// Closure-backed problem without an analytic Jacobian.
pub struct FnProblem<F> {
    pub num_params: usize,
    pub num_residuals: usize,
    pub f: F,
}

impl<F: Fn(&DVector<f64>) -> DVector<f64>> NllsProblem for FnProblem<F> {
    fn num_params(&self) -> usize {
        self.num_params
    }

    fn num_residuals(&self) -> usize {
        self.num_residuals
    }

    fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.f)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub initial_damping: f64,
    pub damping_increase: f64,
    pub damping_decrease: f64,
    pub gradient_tolerance: f64,
    pub step_tolerance: f64,
    pub cost_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 200,
            initial_damping: 1e-3,
            damping_increase: 10.0,
            damping_decrease: 0.1,
            gradient_tolerance: 1e-10,
            step_tolerance: 1e-12,
            cost_tolerance: 1e-12,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.initial_damping,
            self.damping_increase,
            self.damping_decrease,
            self.gradient_tolerance,
            self.step_tolerance,
            self.cost_tolerance,
        ]
        .iter()
        .all(|&v| v > 0.0 && v.is_finite());
        if !positive || self.max_iterations == 0 {
            return Err(Error::Config("solver options must all be positive".into()));
        }
        if self.damping_increase <= 1.0 || self.damping_decrease >= 1.0 {
            return Err(Error::Config(
                "damping must grow on rejection and shrink on acceptance".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// `|J^T r|_inf` fell below the gradient tolerance.
    Gradient,
    /// The step became negligible relative to the parameters, or damping
    /// saturated without finding a descent step.
    Step,
    /// Zero cost, or an accepted step improved the cost by less than the
    /// relative cost tolerance.
    Cost,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub final_cost: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Initial cost followed by the cost after every accepted step.
    pub cost_trace: Vec<f64>,
}

/// Largest damping tried before giving up on an iteration.
const MAX_DAMPING: f64 = 1e12;
const MIN_DAMPING: f64 = 1e-15;

/// Central differences with step `max(1e-6, 1e-6 |x_j|)`.
pub fn finite_difference_jacobian<P: NllsProblem + ?Sized>(p: &P, x: &DVector<f64>) -> DMatrix<f64> {
    let mut jac = DMatrix::zeros(p.num_residuals(), x.len());
    let mut probe = x.clone();
    for j in 0..x.len() {
        let h = (1e-6 * x[j].abs()).max(1e-6);
        probe[j] = x[j] + h;
        let plus = p.residuals(&probe);
        probe[j] = x[j] - h;
        let minus = p.residuals(&probe);
        probe[j] = x[j];
        jac.set_column(j, &((plus - minus) / (2.0 * h)));
    }
    jac
}

fn cost_of(r: &DVector<f64>) -> f64 {
    0.5 * r.norm_squared()
}

fn check_finite(r: &DVector<f64>, iteration: usize) -> Result<()> {
    if r.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { iteration })
    }
}

pub fn levenberg_marquardt<P: NllsProblem + ?Sized>(
    problem: &P,
    init: DVector<f64>,
    opts: &SolverOptions,
) -> Result<(DVector<f64>, SolverReport)> {
    opts.validate()?;
    if init.len() != problem.num_params() {
        return Err(Error::LengthMismatch(format!(
            "initial vector has {} entries, problem has {} parameters",
            init.len(),
            problem.num_params()
        )));
    }
    let mut x = init;
    let mut r = problem.residuals(&x);
    if r.len() != problem.num_residuals() {
        return Err(Error::LengthMismatch(format!(
            "residual evaluator returned {} values, expected {}",
            r.len(),
            problem.num_residuals()
        )));
    }
    check_finite(&r, 0)?;
    let mut cost = cost_of(&r);
    let mut trace = vec![cost];
    let mut lambda = opts.initial_damping;

    let report = |cost: f64, iterations: usize, termination: Termination, trace: Vec<f64>| SolverReport {
        final_cost: cost,
        iterations,
        termination,
        cost_trace: trace,
    };

    for iteration in 0..opts.max_iterations {
        if cost == 0.0 {
            return Ok((x, report(cost, iteration, Termination::Cost, trace)));
        }
        let jac = problem
            .jacobian(&x)
            .unwrap_or_else(|| finite_difference_jacobian(problem, &x));
        if jac.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { iteration });
        }
        let grad = jac.tr_mul(&r);
        if grad.amax() < opts.gradient_tolerance {
            return Ok((x, report(cost, iteration, Termination::Gradient, trace)));
        }
        let normal = jac.tr_mul(&jac);
        let diag_floor = normal.diagonal().amax().max(1.0) * 1e-15;
        let scaling = normal.diagonal().map(|d| d.max(diag_floor));

        loop {
            let mut damped = normal.clone();
            for k in 0..damped.nrows() {
                damped[(k, k)] += lambda * scaling[k];
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= opts.damping_increase;
                if lambda > MAX_DAMPING {
                    return Err(Error::Singular(lambda));
                }
                continue;
            };
            let step = -chol.solve(&grad);
            let small_step = step.norm() <= opts.step_tolerance * (x.norm() + opts.step_tolerance);
            let candidate = &x + &step;
            let r_new = problem.residuals(&candidate);
            check_finite(&r_new, iteration + 1)?;
            let new_cost = cost_of(&r_new);

            if new_cost < cost {
                let improvement = cost - new_cost;
                x = candidate;
                r = r_new;
                let previous = cost;
                cost = new_cost;
                trace.push(cost);
                lambda = (lambda * opts.damping_decrease).max(MIN_DAMPING);
                if small_step {
                    return Ok((x, report(cost, iteration + 1, Termination::Step, trace)));
                }
                if cost == 0.0 || improvement <= opts.cost_tolerance * previous {
                    return Ok((x, report(cost, iteration + 1, Termination::Cost, trace)));
                }
                break;
            }
            if small_step {
                return Ok((x, report(cost, iteration + 1, Termination::Step, trace)));
            }
            lambda *= opts.damping_increase;
            if lambda > MAX_DAMPING {
                return Ok((x, report(cost, iteration + 1, Termination::Step, trace)));
            }
        }
    }
    Ok((
        x,
        report(cost, opts.max_iterations, Termination::MaxIterations, trace),
    ))
}
