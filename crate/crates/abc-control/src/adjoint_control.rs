//! Tracking-type optimal control of the fractional diffusion equation.
//!
//! Cost J(v) = ½‖y(v) - z_d‖²_{L²(Q)} + (𝒩/2)‖v‖²_{L²(Q)} subject to
//! D^α y - Δy = v + f, y(0) = y⁰. The adjoint state η solves the
//! backward problem -D_T^α η - Δη = ŷ - z_d, η(T) = 0, realized by time
//! reversal per mode: the reversed adjoint is a forward solve with zero
//! initial data. The reduced gradient is 𝒩v + η, the optimizer is
//! conjugate gradient on the strictly convex reduced problem, and the
//! optimal control satisfies û = -η/𝒩.

use crate::error::{Error, Result};
use crate::forward_solver::{residual, Field, Forcing, ForwardSolver};
use crate::frac_ops::{
    abc_derivative_left, abc_derivative_right, AlphaContext, TimeGrid, TimeSeries,
};
use crate::mlf::{mlf_with, MlfAccuracy};
use crate::spectral::ModalCoefficients;
use crate::spectral::SpectralBasis;

/// Data of the tracking problem.
#[derive(Clone, Debug)]
pub struct ControlProblem {
    pub basis: SpectralBasis,
    pub grid: TimeGrid,
    pub ctx: AlphaContext,
    pub y0: ModalCoefficients,
    pub z_d: Field,
    /// Tikhonov weight 𝒩 > 0.
    pub n_reg: f64,
    /// Fixed forcing added on top of the control.
    pub background_f: Option<Forcing>,
}

impl ControlProblem {
    pub fn new(
        basis: SpectralBasis,
        grid: TimeGrid,
        ctx: AlphaContext,
        y0: ModalCoefficients,
        z_d: Field,
        n_reg: f64,
        background_f: Option<Forcing>,
    ) -> Result<ControlProblem> {
        if !(n_reg > 0.0) {
            return Err(Error::Config(format!("n_reg must be > 0, got {n_reg}")));
        }
        if y0.basis != basis || z_d.basis != basis || z_d.grid != grid {
            return Err(Error::Config("control problem pieces on mismatched basis/grid".into()));
        }
        Ok(ControlProblem { basis, grid, ctx, y0, z_d, n_reg, background_f })
    }
}

/// Output of [`optimize`].
#[derive(Clone, Debug)]
pub struct OptimalityResult {
    pub u_hat: Field,
    pub y_hat: Field,
    pub eta: Field,
    pub j_value: f64,
    pub grad_norm_history: Vec<f64>,
    pub j_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Problem plus the prebuilt per-mode solver kernels; every operation
/// below reuses these tables.
pub struct ControlSolver {
    pub problem: ControlProblem,
    forward: ForwardSolver,
}

impl ControlSolver {
    pub fn new(problem: ControlProblem) -> Result<ControlSolver> {
        let forward = ForwardSolver::new(problem.basis, problem.grid, problem.ctx)?;
        Ok(ControlSolver { problem, forward })
    }

    fn zero_field(&self) -> Field {
        Field::zeros(self.problem.basis, self.problem.grid)
    }

    /// y(v): forward solve with initial data and v + background forcing.
    pub fn state_of(&self, v: &Field) -> Result<Field> {
        let mut f_modal = v.modal_series.clone();
        if let Some(bg) = &self.problem.background_f {
            for (fi, bi) in f_modal
                .iter_mut()
                .zip(bg.to_modal(&self.problem.basis, &self.problem.grid)?)
            {
                for (a, b) in fi.values.iter_mut().zip(&bi.values) {
                    *a += b;
                }
            }
        }
        self.forward.solve(&self.problem.y0, &Forcing::Modal(f_modal))
    }

    /// The linear control-to-state map S (zero data, no background).
    fn apply_s(&self, v: &Field) -> Result<Field> {
        self.forward.solve(
            &ModalCoefficients::zeros(self.problem.basis),
            &Forcing::Modal(v.modal_series.clone()),
        )
    }

    /// J(v) = ½‖y(v) - z_d‖² + 𝒩/2 ‖v‖².
    pub fn cost(&self, v: &Field) -> Result<f64> {
        let y = self.state_of(v)?;
        let diff = y.axpy(1.0, &self.problem.z_d, -1.0)?;
        let j = 0.5 * diff.inner(&diff) + 0.5 * self.problem.n_reg * v.inner(v);
        if !j.is_finite() {
            return Err(Error::Numerical("cost is not finite".into()));
        }
        Ok(j)
    }

    /// η solving -D_T^α η - Δη = source, η(T) = 0: per mode, reverse the
    /// source, run the zero-initial-data forward solve, reverse back.
    pub fn solve_adjoint(&self, source: &Field) -> Result<Field> {
        if source.basis != self.problem.basis || source.grid != self.problem.grid {
            return Err(Error::Grid("adjoint source on a mismatched grid".into()));
        }
        let modal = crate::par::parallel_modes(self.problem.basis.n_modes, |i| {
            let reversed = source.modal_series[i].reversed();
            let solved = self.forward.mode(i).solve(0.0, &reversed)?;
            Ok(solved.reversed())
        })?;
        Field::new(self.problem.basis, self.problem.grid, modal)
    }

    /// Riesz representative of J'(v): 𝒩 v + η with η the adjoint state
    /// of y(v) - z_d.
    pub fn reduced_gradient(&self, v: &Field) -> Result<Field> {
        let y = self.state_of(v)?;
        let eta = self.solve_adjoint(&y.axpy(1.0, &self.problem.z_d, -1.0)?)?;
        v.axpy(self.problem.n_reg, &eta, 1.0)
    }

    /// Conjugate gradient on the reduced problem v ↦ 𝒩v + S*Sv, from 0.
    pub fn optimize(&self, tol: f64, max_iter: usize) -> Result<OptimalityResult> {
        if !(tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be > 0, got {tol}")));
        }
        let affine = self.state_of(&self.zero_field())?;
        // b = -S*(y(0) - z_d); residual r = b - A v equals -grad J(v)
        let b = self
            .solve_adjoint(&affine.axpy(1.0, &self.problem.z_d, -1.0)?)?
            .scaled(-1.0);

        let mut v = self.zero_field();
        let mut r = b;
        let mut rs_old = r.inner(&r);
        let grad0 = rs_old.sqrt();
        let threshold = tol * (1.0 + grad0);
        let mut p = r.clone();

        let mut grad_norm_history = vec![grad0];
        let mut j_history = vec![self.cost(&v)?];
        let mut iterations = 0;
        let mut converged = grad0 <= threshold;

        while !converged && iterations < max_iter {
            let ap = p
                .scaled(self.problem.n_reg)
                .axpy(1.0, &self.solve_adjoint(&self.apply_s(&p)?)?, 1.0)?;
            let denom = p.inner(&ap);
            if !(denom > 0.0) || !denom.is_finite() {
                return Err(Error::Numerical(format!(
                    "conjugate gradient curvature degenerate: {denom}"
                )));
            }
            let step = rs_old / denom;
            v = v.axpy(1.0, &p, step)?;
            r = r.axpy(1.0, &ap, -step)?;
            let rs_new = r.inner(&r);
            p = r.axpy(1.0, &p, rs_new / rs_old)?;
            rs_old = rs_new;
            iterations += 1;

            let g = rs_new.sqrt();
            grad_norm_history.push(g);
            let j = self.cost(&v)?;
            j_history.push(j);
            if !j.is_finite() || !g.is_finite() {
                return Err(Error::Numerical("optimizer produced non-finite values".into()));
            }
            converged = g <= threshold;
        }

        let y_hat = self.state_of(&v)?;
        let eta = self.solve_adjoint(&y_hat.axpy(1.0, &self.problem.z_d, -1.0)?)?;
        let j_value = *j_history.last().expect("history is never empty");
        Ok(OptimalityResult {
            u_hat: v,
            y_hat,
            eta,
            j_value,
            grad_norm_history,
            j_history,
            iterations,
            converged,
        })
    }
}

/// Residual bundle produced by [`verify_optimality`].
#[derive(Clone, Debug)]
pub struct OptimalityReport {
    /// Discrete residual of the state equation at (ŷ, û + background).
    pub forward_residual: f64,
    /// Discrete residual of the reversed adjoint equation.
    pub adjoint_residual: f64,
    /// ‖û + η/𝒩‖_{L²(Q)}.
    pub stationarity: f64,
    /// ‖η(·, T)‖_{L²(Ω)}.
    pub terminal_value: f64,
    /// ‖η(·,T) - (1-α)ζ_i/B · g_i(T)‖: distance from the exact terminal
    /// value the representation imposes; nonzero means broken wiring.
    pub terminal_defect: f64,
    pub perturbations_passed: usize,
    pub perturbations_total: usize,
}

impl OptimalityReport {
    /// Overall pass at the given stationarity tolerance.
    pub fn pass(&self, stationarity_tol: f64, residual_tol: f64) -> bool {
        self.stationarity <= stationarity_tol
            && self.forward_residual <= residual_tol
            && self.adjoint_residual <= residual_tol
            && self.terminal_defect <= 1e-10
            && self.perturbations_passed == self.perturbations_total
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn uniform_pm1(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

/// Check the optimality system at a computed result: state residual,
/// adjoint residual, stationarity û = -η/𝒩, terminal condition, and
/// cost dominance over 10 seeded 1% perturbations.
pub fn verify_optimality(
    result: &OptimalityResult,
    solver: &ControlSolver,
) -> Result<OptimalityReport> {
    let problem = &solver.problem;
    // (i) forward residual with forcing û + background
    let mut f_modal = result.u_hat.modal_series.clone();
    if let Some(bg) = &problem.background_f {
        for (fi, bi) in f_modal.iter_mut().zip(bg.to_modal(&problem.basis, &problem.grid)?) {
            for (a, b) in fi.values.iter_mut().zip(&bi.values) {
                *a += b;
            }
        }
    }
    let forward_residual = residual(&result.y_hat, &Forcing::Modal(f_modal), &problem.ctx)?;

    // (ii) reversed adjoint solves the forward equation with reversed source
    let source = result.y_hat.axpy(1.0, &problem.z_d, -1.0)?;
    let eta_rev = Field::new(
        problem.basis,
        problem.grid,
        result.eta.modal_series.iter().map(|s| s.reversed()).collect(),
    )?;
    let source_rev = Forcing::Modal(source.modal_series.iter().map(|s| s.reversed()).collect());
    let adjoint_residual = residual(&eta_rev, &source_rev, &problem.ctx)?;

    // (iii) stationarity
    let stationarity = result
        .u_hat
        .axpy(1.0, &result.eta, 1.0 / problem.n_reg)?
        .norm_l2q();

    // (iv) terminal condition of the adjoint state
    let n = problem.grid.n_steps;
    let mut terminal_sq = 0.0;
    let mut defect_sq = 0.0;
    for (i, eta_i) in result.eta.modal_series.iter().enumerate() {
        let mc = crate::forward_solver::modal_constants(problem.basis.eigenvalue(i + 1), &problem.ctx)?;
        let expected =
            (1.0 - problem.ctx.alpha) * mc.zeta_i / problem.ctx.b_of_alpha * source.modal_series[i].values[n];
        terminal_sq += eta_i.values[n] * eta_i.values[n];
        defect_sq += (eta_i.values[n] - expected) * (eta_i.values[n] - expected);
    }

    // (v) J(û) against seeded random 1%-perturbations
    let total = 10;
    let mut passed = 0;
    let mut state = 0x5DEECE66D_u64;
    let j_opt = solver.cost(&result.u_hat)?;
    let u_scale = result.u_hat.norm_l2q().max(1.0);
    for _ in 0..total {
        let delta = Field::new(
            problem.basis,
            problem.grid,
            (0..problem.basis.n_modes)
                .map(|_| TimeSeries {
                    grid: problem.grid,
                    values: (0..problem.grid.n_nodes())
                        .map(|_| uniform_pm1(&mut state))
                        .collect(),
                })
                .collect(),
        )?;
        let scale = 0.01 * u_scale / delta.norm_l2q();
        let perturbed = result.u_hat.axpy(1.0, &delta, scale)?;
        if solver.cost(&perturbed)? >= j_opt {
            passed += 1;
        }
    }

    Ok(OptimalityReport {
        forward_residual,
        adjoint_residual,
        stationarity,
        terminal_value: terminal_sq.sqrt(),
        terminal_defect: defect_sq.sqrt(),
        perturbations_passed: passed,
        perturbations_total: total,
    })
}

/// Relative defect of the integration-by-parts identity with a test
/// function vanishing at the final time:
///
/// ∫∫ (D₀^α y - Δy) φ = ∫∫ y (-D_T^α φ - Δφ)
///                      - B(α)/(1-α) ∫_Ω y(x,0) ∫₀ᵀ E_α(-γt^α) φ dt dx.
pub fn duality_check(y: &Field, phi: &Field, ctx: &AlphaContext) -> Result<f64> {
    if y.basis != phi.basis || y.grid != phi.grid {
        return Err(Error::Grid("duality check needs a shared basis and grid".into()));
    }
    let n = y.grid.n_steps;
    for (i, s) in phi.modal_series.iter().enumerate() {
        if s.values[n] != 0.0 {
            return Err(Error::Precondition(format!(
                "phi must vanish at t = T; mode {} ends at {}",
                i + 1,
                s.values[n]
            )));
        }
    }
    let acc = MlfAccuracy::default();
    let kernel: Vec<f64> = y
        .grid
        .nodes()
        .map(|t| {
            if t == 0.0 {
                Ok(1.0)
            } else {
                mlf_with(ctx.alpha, 1.0, -ctx.gamma_rate * t.powf(ctx.alpha), &acc)
            }
        })
        .collect::<Result<_>>()?;

    let trapz = |a: &[f64], b: &[f64]| -> f64 {
        let mut acc = 0.0;
        for j in 0..=n {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            acc += w * a[j] * b[j];
        }
        acc * y.grid.dt
    };

    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let scale = ctx.derivative_scale();
    for i in 0..y.basis.n_modes {
        let lam = y.basis.eigenvalue(i + 1);
        let yi = &y.modal_series[i];
        let pi = &phi.modal_series[i];
        let dy = abc_derivative_left(yi, ctx)?;
        let lhs_i: Vec<f64> = dy
            .values
            .iter()
            .zip(&yi.values)
            .map(|(d, v)| d + lam * v)
            .collect();
        lhs += trapz(&lhs_i, &pi.values);

        let dphi = abc_derivative_right(pi, ctx)?;
        let rhs_i: Vec<f64> = dphi
            .values
            .iter()
            .zip(&pi.values)
            .map(|(d, v)| -d + lam * v)
            .collect();
        rhs += trapz(&yi.values, &rhs_i);
        rhs -= scale * yi.values[0] * trapz(&kernel, &pi.values);
    }
    Ok((lhs - rhs).abs() / (1.0 + lhs.abs()))
}

/// Free-function mirrors of the solver methods, for one-shot use.
pub fn cost(v: &Field, problem: &ControlProblem) -> Result<f64> {
    ControlSolver::new(problem.clone())?.cost(v)
}

pub fn solve_adjoint(source: &Field, problem: &ControlProblem) -> Result<Field> {
    ControlSolver::new(problem.clone())?.solve_adjoint(source)
}

pub fn reduced_gradient(v: &Field, problem: &ControlProblem) -> Result<Field> {
    ControlSolver::new(problem.clone())?.reduced_gradient(v)
}

pub fn optimize(problem: &ControlProblem, tol: f64, max_iter: usize) -> Result<OptimalityResult> {
    ControlSolver::new(problem.clone())?.optimize(tol, max_iter)
}
