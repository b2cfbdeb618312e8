//! Sparse linear programs and their certified solutions.
//!
//! The model is a plain sparse row list with equality/inequality tags,
//! per-variable bounds and a linear objective. Solving is delegated to two
//! backends behind one interface: a revised simplex (the `minilp` crate) for
//! small and mid-size models, which returns exact basic solutions, and an
//! interior-point solver (the `clarabel` crate) for large models, where the
//! box polytopes become too degenerate for simplex pivoting to finish in
//! reasonable time. Both are deterministic. The wrapper pins the build-time
//! guardrails, re-checks primal feasibility of the returned solution against
//! the caller's tolerance, and reports the worst constraint violation
//! alongside the optimum. Models are immutable once built, so distinct
//! solves can run concurrently.

use crate::{Error, Result};

/// Default primal feasibility tolerance.
pub const DEFAULT_FEAS_TOL: f64 = 1e-9;
/// Default optimality tolerance recorded with solutions.
pub const DEFAULT_OPT_TOL: f64 = 1e-8;
/// Guardrail: models with more nonzeros than this are rejected.
pub const MAX_NONZEROS: usize = 5_000_000;
/// Models with more variables than this go to the interior-point backend.
pub const SIMPLEX_VAR_LIMIT: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ConstraintOp {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LpConstraint {
    pub coeffs: Vec<(usize, f64)>,
    pub op: ConstraintOp,
    pub rhs: f64,
}

/// Objective sense, constraint rows and variable bounds.
#[derive(Debug, Clone)]
pub struct LpModel {
    num_vars: usize,
    maximize: bool,
    objective: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    constraints: Vec<LpConstraint>,
    nnz: usize,
}

impl LpModel {
    /// New model with all variables bounded to `[0, +inf)` and a zero
    /// objective.
    pub fn new(num_vars: usize, maximize: bool) -> Self {
        Self {
            num_vars,
            maximize,
            objective: vec![0.0; num_vars],
            bounds: vec![(0.0, f64::INFINITY); num_vars],
            constraints: Vec::new(),
            nnz: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn is_maximize(&self) -> bool {
        self.maximize
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[LpConstraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn set_objective_coeff(&mut self, var: usize, coeff: f64) -> Result<()> {
        self.check_var(var)?;
        self.check_finite(coeff)?;
        self.objective[var] = coeff;
        Ok(())
    }

    pub fn add_objective_coeff(&mut self, var: usize, coeff: f64) -> Result<()> {
        self.check_var(var)?;
        self.check_finite(coeff)?;
        self.objective[var] += coeff;
        Ok(())
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) -> Result<()> {
        self.check_var(var)?;
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty bound [{lo}, {hi}]")));
        }
        self.bounds[var] = (lo, hi);
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<(usize, f64)>,
        op: ConstraintOp,
        rhs: f64,
    ) -> Result<()> {
        for &(v, c) in &coeffs {
            self.check_var(v)?;
            self.check_finite(c)?;
        }
        self.check_finite(rhs)?;
        self.nnz += coeffs.len();
        if self.nnz > MAX_NONZEROS {
            return Err(Error::ResourceLimit(format!(
                "model exceeds {MAX_NONZEROS} nonzeros"
            )));
        }
        self.constraints.push(LpConstraint { coeffs, op, rhs });
        Ok(())
    }

    fn check_var(&self, var: usize) -> Result<()> {
        if var >= self.num_vars {
            return Err(Error::InvalidArgument(format!(
                "variable {var} out of range (model has {})",
                self.num_vars
            )));
        }
        Ok(())
    }

    fn check_finite(&self, v: f64) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite coefficient {v}")));
        }
        Ok(())
    }

    /// Worst absolute violation of constraints and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_finite() {
                worst = worst.max(lo - x[i]);
            }
            if hi.is_finite() {
                worst = worst.max(x[i] - hi);
            }
        }
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(v, a)| a * x[v]).sum();
            let defect = match c.op {
                ConstraintOp::Eq => (lhs - c.rhs).abs(),
                ConstraintOp::Le => (lhs - c.rhs).max(0.0),
                ConstraintOp::Ge => (c.rhs - lhs).max(0.0),
            };
            worst = worst.max(defect);
        }
        worst
    }

    /// Objective value at `x`.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Human-readable dump, one constraint per line, in the common text LP
    /// interchange layout.
    pub fn dump_lp(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(s, "{}", if self.maximize { "Maximize" } else { "Minimize" });
        let mut obj = String::from(" obj:");
        for (i, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                let _ = write!(obj, " {:+} x{}", c, i);
            }
        }
        let _ = writeln!(s, "{obj}");
        let _ = writeln!(s, "Subject To");
        for (r, c) in self.constraints.iter().enumerate() {
            let mut line = format!(" c{r}:");
            for &(v, a) in &c.coeffs {
                let _ = write!(line, " {:+} x{}", a, v);
            }
            let op = match c.op {
                ConstraintOp::Eq => "=",
                ConstraintOp::Le => "<=",
                ConstraintOp::Ge => ">=",
            };
            let _ = writeln!(s, "{line} {op} {}", c.rhs);
        }
        let _ = writeln!(s, "Bounds");
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            let _ = writeln!(s, " {lo} <= x{i} <= {hi}");
        }
        let _ = writeln!(s, "End");
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericFailure,
}

/// Result of a solve. When `status` is `Optimal` the primal vector is
/// feasible within the feasibility tolerance passed to [`solve`] and the
/// objective is the certified optimum.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub max_violation: f64,
}

/// Solve with the default tolerances.
pub fn solve_default(model: &LpModel) -> Result<LpSolution> {
    solve(model, DEFAULT_FEAS_TOL, DEFAULT_OPT_TOL)
}

/// Solve `model`.
///
/// Infeasible and unbounded models are reported through `status`, not as
/// errors. A returned `Optimal` status additionally guarantees
/// `max_violation <= feas_tol`; if the solver's solution fails that re-check
/// the status is demoted to `NumericFailure`. Models above
/// [`SIMPLEX_VAR_LIMIT`] variables are routed to the interior-point backend,
/// everything else to the simplex.
pub fn solve(model: &LpModel, feas_tol: f64, opt_tol: f64) -> Result<LpSolution> {
    if feas_tol <= 0.0 || opt_tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    if model.num_vars() > SIMPLEX_VAR_LIMIT {
        solve_interior(model, feas_tol)
    } else {
        solve_simplex(model, feas_tol)
    }
}

fn solve_simplex(model: &LpModel, feas_tol: f64) -> Result<LpSolution> {
    let direction = if model.is_maximize() {
        minilp::OptimizationDirection::Maximize
    } else {
        minilp::OptimizationDirection::Minimize
    };
    let mut problem = minilp::Problem::new(direction);
    let vars: Vec<minilp::Variable> = (0..model.num_vars())
        .map(|i| problem.add_var(model.objective()[i], model.bounds()[i]))
        .collect();
    for c in model.constraints() {
        let expr: Vec<(minilp::Variable, f64)> =
            c.coeffs.iter().map(|&(v, a)| (vars[v], a)).collect();
        let op = match c.op {
            ConstraintOp::Eq => minilp::ComparisonOp::Eq,
            ConstraintOp::Le => minilp::ComparisonOp::Le,
            ConstraintOp::Ge => minilp::ComparisonOp::Ge,
        };
        problem.add_constraint(expr.as_slice(), op, c.rhs);
    }
    match problem.solve() {
        Ok(sol) => {
            let primal: Vec<f64> = vars.iter().map(|&v| sol[v]).collect();
            let max_violation = model.max_violation(&primal);
            let status = if max_violation <= feas_tol {
                LpStatus::Optimal
            } else {
                LpStatus::NumericFailure
            };
            Ok(LpSolution { status, objective: sol.objective(), primal, max_violation })
        }
        Err(minilp::Error::Infeasible) => Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective: f64::NAN,
            primal: vec![],
            max_violation: f64::NAN,
        }),
        Err(minilp::Error::Unbounded) => Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective: if model.is_maximize() { f64::INFINITY } else { f64::NEG_INFINITY },
            primal: vec![],
            max_violation: f64::NAN,
        }),
    }
}

/// Interior-point backend. Equalities map to the zero cone, inequalities
/// and finite bounds to the nonnegative cone.
fn solve_interior(model: &LpModel, feas_tol: f64) -> Result<LpSolution> {
    use clarabel::algebra::CscMatrix;
    use clarabel::solver::{
        DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
    };

    let n = model.num_vars();
    let sign = if model.is_maximize() { -1.0 } else { 1.0 };
    let q: Vec<f64> = model.objective().iter().map(|c| sign * c).collect();

    // rows: equalities first (zero cone), then all inequalities as `<=`
    // rows (nonnegative cone), then finite bounds
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(model.nnz() + 2 * n);
    let mut b: Vec<f64> = Vec::new();
    let mut row = 0usize;
    for c in model.constraints() {
        if c.op == ConstraintOp::Eq {
            for &(v, a) in &c.coeffs {
                triplets.push((row, v, a));
            }
            b.push(c.rhs);
            row += 1;
        }
    }
    let n_eq = row;
    for c in model.constraints() {
        let flip = match c.op {
            ConstraintOp::Eq => continue,
            ConstraintOp::Le => 1.0,
            ConstraintOp::Ge => -1.0,
        };
        for &(v, a) in &c.coeffs {
            triplets.push((row, v, flip * a));
        }
        b.push(flip * c.rhs);
        row += 1;
    }
    for (v, &(lo, hi)) in model.bounds().iter().enumerate() {
        if lo.is_finite() {
            triplets.push((row, v, -1.0));
            b.push(-lo);
            row += 1;
        }
        if hi.is_finite() {
            triplets.push((row, v, 1.0));
            b.push(hi);
            row += 1;
        }
    }
    let m = row;
    let n_ineq = m - n_eq;

    // CSC assembly
    triplets.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
    let mut colptr = vec![0usize; n + 1];
    let mut rowval = Vec::with_capacity(triplets.len());
    let mut nzval = Vec::with_capacity(triplets.len());
    for &(r, c, v) in &triplets {
        colptr[c + 1] += 1;
        rowval.push(r);
        nzval.push(v);
    }
    for c in 0..n {
        colptr[c + 1] += colptr[c];
    }
    let a_mat = CscMatrix::new(m, n, colptr, rowval, nzval);
    let p_mat = CscMatrix::<f64>::zeros((n, n));
    let cones = [
        SupportedConeT::ZeroConeT(n_eq),
        SupportedConeT::NonnegativeConeT(n_ineq),
    ];
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-11)
        .tol_gap_rel(1e-11)
        .tol_feas(1e-11)
        .max_iter(400)
        .build()
        .map_err(|e| Error::NumericFailure(format!("solver settings: {e}")))?;
    let mut solver = DefaultSolver::new(&p_mat, &q, &a_mat, &b, &cones, settings)
        .map_err(|e| Error::InvalidArgument(format!("solver rejected model: {e:?}")))?;
    solver.solve();

    let status = solver.solution.status;
    match status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => {
            let primal = solver.solution.x.clone();
            let max_violation = model.max_violation(&primal);
            let objective = model.objective_value(&primal);
            let status = if max_violation <= feas_tol {
                LpStatus::Optimal
            } else {
                LpStatus::NumericFailure
            };
            Ok(LpSolution { status, objective, primal, max_violation })
        }
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective: f64::NAN,
            primal: vec![],
            max_violation: f64::NAN,
        }),
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective: if model.is_maximize() { f64::INFINITY } else { f64::NEG_INFINITY },
            primal: vec![],
            max_violation: f64::NAN,
        }),
        other => Err(Error::NumericFailure(format!(
            "interior-point solve ended with status {other:?}"
        ))),
    }
}

/// Solve with a starting point: `start` is screened for feasibility and its
/// objective value is used as a sanity floor (resp. ceiling) on the returned
/// optimum. The simplex itself restarts from scratch; the screen guards
/// against a silently wrong solve.
pub fn solve_from(model: &LpModel, start: &[f64], feas_tol: f64, opt_tol: f64) -> Result<LpSolution> {
    if start.len() != model.num_vars() {
        return Err(Error::InvalidArgument("starting point has wrong dimension".into()));
    }
    let start_feasible = model.max_violation(start) <= feas_tol;
    let sol = solve(model, feas_tol, opt_tol)?;
    if sol.status == LpStatus::Optimal && start_feasible {
        let start_obj = model.objective_value(start);
        let slack = opt_tol.max(1e-12);
        let consistent = if model.is_maximize() {
            sol.objective >= start_obj - slack
        } else {
            sol.objective <= start_obj + slack
        };
        if !consistent {
            return Err(Error::NumericFailure(format!(
                "optimum {} is worse than the feasible starting objective {}",
                sol.objective, start_obj
            )));
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn box_lp() {
        let mut m = LpModel::new(1, true);
        m.set_objective_coeff(0, 1.0).unwrap();
        m.add_constraint(vec![(0, 1.0)], ConstraintOp::Le, 1.0).unwrap();
        let sol = solve_default(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn segment_lp() {
        let mut m = LpModel::new(2, true);
        m.set_objective_coeff(0, 1.0).unwrap();
        m.set_objective_coeff(1, 1.0).unwrap();
        m.add_constraint(vec![(0, 1.0), (1, 1.0)], ConstraintOp::Eq, 1.0).unwrap();
        let sol = solve_default(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective, 1.0, epsilon = 1e-9);
        assert!(sol.max_violation <= 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded_are_statuses() {
        let mut m = LpModel::new(1, true);
        m.add_constraint(vec![(0, 1.0)], ConstraintOp::Ge, 2.0).unwrap();
        m.add_constraint(vec![(0, 1.0)], ConstraintOp::Le, 1.0).unwrap();
        assert_eq!(solve_default(&m).unwrap().status, LpStatus::Infeasible);

        let mut m = LpModel::new(1, true);
        m.set_objective_coeff(0, 1.0).unwrap();
        assert_eq!(solve_default(&m).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn objective_scaling() {
        let mut m = LpModel::new(3, true);
        for i in 0..3 {
            m.set_objective_coeff(i, (i + 1) as f64).unwrap();
            m.set_bounds(i, 0.0, 1.0).unwrap();
        }
        m.add_constraint(vec![(0, 1.0), (1, 1.0), (2, 1.0)], ConstraintOp::Le, 1.5).unwrap();
        let base = solve_default(&m).unwrap();
        let mut scaled = m.clone();
        for i in 0..3 {
            scaled.set_objective_coeff(i, 7.0 * (i + 1) as f64).unwrap();
        }
        let s = solve_default(&scaled).unwrap();
        assert_abs_diff_eq!(s.objective, 7.0 * base.objective, epsilon = 1e-8);
        for i in 0..3 {
            assert_abs_diff_eq!(s.primal[i], base.primal[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn resolve_from_optimum_is_stable() {
        let mut m = LpModel::new(4, false);
        // tiny transportation problem: 2x2, rows (0.3, 0.7), cols (0.4, 0.6)
        let cost = [1.0, 3.0, 2.0, 0.5];
        for (i, &c) in cost.iter().enumerate() {
            m.set_objective_coeff(i, c).unwrap();
        }
        m.add_constraint(vec![(0, 1.0), (1, 1.0)], ConstraintOp::Eq, 0.3).unwrap();
        m.add_constraint(vec![(2, 1.0), (3, 1.0)], ConstraintOp::Eq, 0.7).unwrap();
        m.add_constraint(vec![(0, 1.0), (2, 1.0)], ConstraintOp::Eq, 0.4).unwrap();
        m.add_constraint(vec![(1, 1.0), (3, 1.0)], ConstraintOp::Eq, 0.6).unwrap();
        let first = solve_default(&m).unwrap();
        let again = solve_from(&m, &first.primal, DEFAULT_FEAS_TOL, DEFAULT_OPT_TOL).unwrap();
        assert_abs_diff_eq!(first.objective, again.objective, epsilon = DEFAULT_OPT_TOL);
        assert_eq!(first.primal, again.primal);
    }

    #[test]
    fn nnz_guardrail() {
        let mut m = LpModel::new(2, true);
        let err = (0..=MAX_NONZEROS / 2 + 1)
            .try_for_each(|_| m.add_constraint(vec![(0, 1.0), (1, 1.0)], ConstraintOp::Le, 1.0));
        assert!(matches!(err, Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn dump_format() {
        let mut m = LpModel::new(2, true);
        m.set_objective_coeff(0, 1.0).unwrap();
        m.set_bounds(0, 0.0, 1.0).unwrap();
        m.set_bounds(1, 0.0, 1.0).unwrap();
        m.add_constraint(vec![(0, 1.0), (1, -2.0)], ConstraintOp::Eq, 0.5).unwrap();
        let dump = m.dump_lp();
        assert!(dump.contains("Maximize"));
        assert!(dump.contains("c0: +1 x0 -2 x1 = 0.5"));
        assert!(dump.contains("Bounds"));
    }
}
