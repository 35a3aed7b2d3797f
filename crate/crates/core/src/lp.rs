//! Self-contained linear program representation and solver.
//!
//! Dense two-phase simplex with Bland's rule: termination over performance,
//! which is the right trade at desk scale (programs here have at most a few
//! thousand variables). Double precision with a 1e-9 pivot tolerance.

use crate::error::{Error, Result};
use crate::linalg::Lu;

pub const PIVOT_TOL: f64 = 1e-9;
pub const FEAS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Le,
    Eq,
    Ge,
}

impl RelOp {
    fn as_str(self) -> &'static str {
        match self {
            RelOp::Le => "<=",
            RelOp::Eq => "=",
            RelOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub op: RelOp,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
struct Variable {
    name: String,
    lower: Option<f64>,
    upper: Option<f64>,
    objective: f64,
}

/// A linear program over named variables with optional bounds.
/// Variables default to the bound `0 <= x`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
}

/// An optimal solution: the assignment, the objective value, and (for
/// programs whose variables all carry the default bounds) dual multipliers
/// per constraint forming a duality certificate.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub duals: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Result<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Ok(s),
            LpOutcome::Infeasible => Err(Error::Lp("program is infeasible".into())),
            LpOutcome::Unbounded => Err(Error::Lp("program is unbounded".into())),
        }
    }
}

impl LinearProgram {
    pub fn new(sense: Sense) -> LinearProgram {
        LinearProgram { sense, vars: Vec::new(), constraints: Vec::new() }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Adds a variable and returns its index. `lower: None` means free.
    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: Option<f64>,
        upper: Option<f64>,
        objective: f64,
    ) -> usize {
        self.vars.push(Variable { name: name.into(), lower, upper, objective });
        self.vars.len() - 1
    }

    /// Adds a variable with the default bound `0 <= x`.
    pub fn add_default_var(&mut self, name: impl Into<String>, objective: f64) -> usize {
        self.add_var(name, Some(0.0), None, objective)
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.vars[var].objective = coeff;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, op: RelOp, rhs: f64) {
        self.constraints.push(Constraint { coeffs, op, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraint(&self, i: usize) -> &Constraint {
        &self.constraints[i]
    }

    pub fn objective_coeff(&self, var: usize) -> f64 {
        self.vars[var].objective
    }

    pub fn var_bounds(&self, var: usize) -> (Option<f64>, Option<f64>) {
        (self.vars[var].lower, self.vars[var].upper)
    }

    /// Plain-text dump in an LP-like format for external cross-checking.
    pub fn dump(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        out.push_str(match self.sense {
            Sense::Maximize => "Maximize\n",
            Sense::Minimize => "Minimize\n",
        });
        out.push_str(" obj:");
        for v in &self.vars {
            if v.objective != 0.0 {
                let _ = write!(out, " {:+} {}", v.objective, v.name);
            }
        }
        out.push_str("\nSubject To\n");
        for (i, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{i}:");
            for &(j, a) in &c.coeffs {
                let _ = write!(out, " {:+} {}", a, self.vars[j].name);
            }
            let _ = writeln!(out, " {} {}", c.op.as_str(), c.rhs);
        }
        out.push_str("Bounds\n");
        for v in &self.vars {
            match (v.lower, v.upper) {
                (Some(l), Some(u)) => {
                    let _ = writeln!(out, " {} <= {} <= {}", l, v.name, u);
                }
                (Some(l), None) => {
                    if l != 0.0 {
                        let _ = writeln!(out, " {} <= {}", l, v.name);
                    }
                }
                (None, Some(u)) => {
                    let _ = writeln!(out, " -inf <= {} <= {}", v.name, u);
                }
                (None, None) => {
                    let _ = writeln!(out, " {} free", v.name);
                }
            }
        }
        out.push_str("End\n");
        out
    }

    /// Solves the program with the two-phase simplex method.
    pub fn solve(&self) -> Result<LpOutcome> {
        for c in &self.constraints {
            for &(j, a) in &c.coeffs {
                if j >= self.vars.len() {
                    return Err(Error::Lp(format!("constraint references unknown variable {j}")));
                }
                if !a.is_finite() {
                    return Err(Error::Lp("non-finite constraint coefficient".into()));
                }
            }
            if !c.rhs.is_finite() {
                return Err(Error::Lp("non-finite right-hand side".into()));
            }
        }
        if self.vars.iter().any(|v| !v.objective.is_finite()) {
            return Err(Error::Lp("non-finite objective coefficient".into()));
        }
        Simplex::build(self).run()
    }
}

pub fn solve_lp(p: &LinearProgram) -> Result<LpOutcome> {
    p.solve()
}

impl LinearProgram {
    /// Solves a row-heavy minimization with default-bounded variables
    /// through its dual: the dual has one row per primal variable, so the
    /// simplex works on a much smaller basis, and the primal solution is
    /// read off the dual multipliers. Falls back to the direct solve when
    /// the program does not fit the pattern or the multipliers are not
    /// available.
    pub fn solve_preferring_dual(&self) -> Result<LpOutcome> {
        let plain = (0..self.num_vars())
            .all(|j| self.var_bounds(j) == (Some(0.0), None));
        if self.sense != Sense::Minimize
            || !plain
            || self.num_constraints() < 3 * self.num_vars()
        {
            return self.solve();
        }
        let dual = self.dualize();
        match dual.solve()? {
            LpOutcome::Optimal(sol) => {
                let Some(multipliers) = sol.duals else {
                    return self.solve();
                };
                let values: Vec<f64> =
                    multipliers.iter().map(|&x| x.max(0.0)).collect();
                let objective: f64 = (0..self.num_vars())
                    .map(|j| self.objective_coeff(j) * values[j])
                    .sum();
                // The dual's primal solution holds the original program's
                // multipliers (with the sign flip undone for Le rows).
                let mut duals = Vec::with_capacity(self.num_constraints());
                for (i, c) in self.constraints.iter().enumerate() {
                    let v = sol.values[i];
                    duals.push(if c.op == RelOp::Le { -v } else { v });
                }
                Ok(LpOutcome::Optimal(LpSolution { values, objective, duals: Some(duals) }))
            }
            // An unbounded dual certifies primal infeasibility; an
            // infeasible dual leaves primal feasibility open.
            LpOutcome::Unbounded => Ok(LpOutcome::Infeasible),
            LpOutcome::Infeasible => self.solve(),
        }
    }

    /// The dual of a minimization with `x >= 0`: maximize `b' y` subject to
    /// `A' y <= c`, with `y >= 0` for `>=` rows, `y <= 0` for `<=` rows
    /// (represented negated, so every dual variable is plain or free) and
    /// free `y` for equalities.
    fn dualize(&self) -> LinearProgram {
        debug_assert_eq!(self.sense, Sense::Minimize);
        let mut dual = LinearProgram::new(Sense::Maximize);
        let mut per_var: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.num_vars()];
        for (i, c) in self.constraints.iter().enumerate() {
            let flip = if c.op == RelOp::Le { -1.0 } else { 1.0 };
            let lower = if c.op == RelOp::Eq { None } else { Some(0.0) };
            let var = dual.add_var(format!("y{i}"), lower, None, flip * c.rhs);
            for &(j, a) in &c.coeffs {
                per_var[j].push((var, flip * a));
            }
        }
        for (j, coeffs) in per_var.into_iter().enumerate() {
            dual.add_constraint(coeffs, RelOp::Le, self.objective_coeff(j));
        }
        dual
    }
}

/// Mapping from an original variable to standard-form columns:
/// `x = offset + col_pos - col_neg` (the negative part exists only for
/// free variables).
#[derive(Debug, Clone)]
struct VarMap {
    offset: f64,
    pos: usize,
    neg: Option<usize>,
}

struct Simplex {
    sense: Sense,
    objective: Vec<f64>,
    var_maps: Vec<VarMap>,
    /// Working tableau (m x total_cols) and right-hand side.
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// Snapshot of the standard-form system before any pivot, for dual
    /// extraction and final refinement of the basic solution.
    snapshot: Vec<Vec<f64>>,
    snapshot_rhs: Vec<f64>,
    /// Phase-2 minimization costs over all columns.
    cost: Vec<f64>,
    basis: Vec<usize>,
    artificial_start: usize,
    /// Per row: originating constraint index and whether it was negated;
    /// `None` for internally added upper-bound rows.
    row_origin: Vec<Option<(usize, bool)>>,
    num_original_rows: usize,
    plain_bounds: bool,
    rows_removed: bool,
}

#[derive(PartialEq, Eq)]
enum IterateOutcome {
    Optimal,
    Unbounded,
}

impl Simplex {
    fn build(p: &LinearProgram) -> Simplex {
        let plain_bounds =
            p.vars.iter().all(|v| v.lower == Some(0.0) && v.upper.is_none());

        let mut var_maps = Vec::with_capacity(p.vars.len());
        let mut num_cols = 0usize;
        for v in &p.vars {
            match v.lower {
                Some(l) => {
                    var_maps.push(VarMap { offset: l, pos: num_cols, neg: None });
                    num_cols += 1;
                }
                None => {
                    var_maps.push(VarMap { offset: 0.0, pos: num_cols, neg: Some(num_cols + 1) });
                    num_cols += 2;
                }
            }
        }
        let num_structural = num_cols;

        let sign = match p.sense {
            Sense::Maximize => -1.0,
            Sense::Minimize => 1.0,
        };
        let mut cost = vec![0.0; num_structural];
        for (v, m) in p.vars.iter().zip(&var_maps) {
            cost[m.pos] += sign * v.objective;
            if let Some(neg) = m.neg {
                cost[neg] -= sign * v.objective;
            }
        }

        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs = Vec::new();
        let mut row_origin = Vec::new();
        let mut ops = Vec::new();
        let mut push_row = |coeffs: Vec<(usize, f64)>,
                            op: RelOp,
                            b0: f64,
                            origin: Option<usize>,
                            var_maps: &[VarMap]| {
            let mut row = vec![0.0; num_structural];
            let mut b = b0;
            for (j, a) in coeffs {
                let m = &var_maps[j];
                row[m.pos] += a;
                if let Some(neg) = m.neg {
                    row[neg] -= a;
                }
                b -= a * m.offset;
            }
            let mut op = op;
            let mut flipped = false;
            if b < 0.0 {
                for x in row.iter_mut() {
                    *x = -*x;
                }
                b = -b;
                flipped = true;
                op = match op {
                    RelOp::Le => RelOp::Ge,
                    RelOp::Ge => RelOp::Le,
                    RelOp::Eq => RelOp::Eq,
                };
            }
            rows.push(row);
            rhs.push(b);
            row_origin.push(origin.map(|i| (i, flipped)));
            ops.push(op);
        };
        for (i, c) in p.constraints.iter().enumerate() {
            push_row(c.coeffs.clone(), c.op, c.rhs, Some(i), &var_maps);
        }
        for (j, v) in p.vars.iter().enumerate() {
            if let Some(u) = v.upper {
                push_row(vec![(j, 1.0)], RelOp::Le, u, None, &var_maps);
            }
        }

        // Slack and surplus columns.
        let m = rows.len();
        let mut slack_basis: Vec<Option<usize>> = vec![None; m];
        for (i, op) in ops.iter().enumerate() {
            match op {
                RelOp::Le | RelOp::Ge => {
                    let col = cost.len();
                    let coeff = if *op == RelOp::Le { 1.0 } else { -1.0 };
                    for (r, row) in rows.iter_mut().enumerate() {
                        row.push(if r == i { coeff } else { 0.0 });
                    }
                    cost.push(0.0);
                    if *op == RelOp::Le {
                        slack_basis[i] = Some(col);
                    }
                }
                RelOp::Eq => {}
            }
        }
        // Artificial columns for rows without a ready-made basic column.
        let artificial_start = cost.len();
        let mut basis = vec![usize::MAX; m];
        for i in 0..m {
            match slack_basis[i] {
                Some(col) => basis[i] = col,
                None => {
                    let col = cost.len();
                    for (r, row) in rows.iter_mut().enumerate() {
                        row.push(if r == i { 1.0 } else { 0.0 });
                    }
                    cost.push(0.0);
                    basis[i] = col;
                }
            }
        }

        let snapshot = rows.clone();
        let snapshot_rhs = rhs.clone();
        Simplex {
            sense: p.sense,
            objective: p.vars.iter().map(|v| v.objective).collect(),
            var_maps,
            rows,
            rhs,
            snapshot,
            snapshot_rhs,
            cost,
            basis,
            artificial_start,
            row_origin,
            num_original_rows: p.constraints.len(),
            plain_bounds,
            rows_removed: false,
        }
    }

    fn run(mut self) -> Result<LpOutcome> {
        if self.rows.is_empty() {
            if self.cost.iter().any(|&c| c < -PIVOT_TOL) {
                return Ok(LpOutcome::Unbounded);
            }
            let values = self.extract_values();
            let objective = self.original_objective(&values);
            let duals = if self.plain_bounds { Some(Vec::new()) } else { None };
            return Ok(LpOutcome::Optimal(LpSolution { values, objective, duals }));
        }

        if self.artificial_start < self.cost.len() {
            let phase1: Vec<f64> = (0..self.cost.len())
                .map(|j| if j >= self.artificial_start { 1.0 } else { 0.0 })
                .collect();
            if self.iterate(&phase1) == IterateOutcome::Unbounded {
                return Err(Error::Lp("phase-1 objective unbounded".into()));
            }
            let infeasibility: f64 = self
                .basis
                .iter()
                .zip(&self.rhs)
                .filter(|(b, _)| **b >= self.artificial_start)
                .map(|(_, v)| v)
                .sum();
            if infeasibility > FEAS_TOL {
                return Ok(LpOutcome::Infeasible);
            }
            self.evict_artificials();
        }

        self.refactorize();
        let cost = self.cost.clone();
        if self.iterate(&cost) == IterateOutcome::Unbounded {
            return Ok(LpOutcome::Unbounded);
        }

        let values = self.extract_values();
        let objective = self.original_objective(&values);
        let duals = if self.rows_removed { None } else { self.extract_duals() };
        Ok(LpOutcome::Optimal(LpSolution { values, objective, duals }))
    }

    /// Simplex iterations over a maintained reduced-cost row. Dantzig
    /// pivoting while progress is made; after a run of degenerate pivots
    /// the entering rule switches to Bland's (smallest index), which
    /// guarantees termination, and switches back once the objective moves.
    fn iterate(&mut self, cost: &[f64]) -> IterateOutcome {
        const STALL_LIMIT: u32 = 32;
        const REFACTOR_EVERY: u32 = 64;
        let m = self.rows.len();
        // Reduced costs z_j = c_j - c_B B^-1 A_j for the current basis,
        // maintained across pivots and rebuilt on refactorization.
        let rebuild_z = |rows: &Vec<Vec<f64>>, basis: &Vec<usize>| -> Vec<f64> {
            let mut z = cost.to_vec();
            for i in 0..m {
                let cb = z[basis[i]];
                if cb != 0.0 {
                    let row = &rows[i];
                    for (zj, aj) in z.iter_mut().zip(row.iter()) {
                        *zj -= cb * aj;
                    }
                }
            }
            z
        };
        let mut z = rebuild_z(&self.rows, &self.basis);
        let mut basic = vec![false; self.cost.len()];
        for &b in &self.basis {
            basic[b] = true;
        }
        let mut stalled: u32 = 0;
        let mut since_refactor: u32 = 0;
        loop {
            let bland = stalled >= STALL_LIMIT;
            let mut entering: Option<usize> = None;
            let mut best = -PIVOT_TOL;
            for (j, &zj) in z.iter().take(self.artificial_start).enumerate() {
                if !basic[j] && zj < -PIVOT_TOL {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    if zj < best {
                        best = zj;
                        entering = Some(j);
                    }
                }
            }
            let Some(j) = entering else {
                return IterateOutcome::Optimal;
            };
            // Ratio test. In Bland mode ties break by the smallest basic
            // index (the termination argument needs it); otherwise by the
            // largest pivot element, which keeps the tableau well scaled.
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.rows[i][j];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i] / a;
                    let better = match leaving {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - PIVOT_TOL
                                || ((ratio - lr).abs() <= PIVOT_TOL
                                    && if bland {
                                        self.basis[i] < self.basis[li]
                                    } else {
                                        a > self.rows[li][j]
                                    })
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leaving else {
                return IterateOutcome::Unbounded;
            };
            if ratio.abs() <= PIVOT_TOL {
                stalled = stalled.saturating_add(1);
            } else {
                stalled = 0;
            }
            basic[self.basis[r]] = false;
            basic[j] = true;
            self.pivot_with_cost(r, j, &mut z);
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                since_refactor = 0;
                if self.refactorize() {
                    z = rebuild_z(&self.rows, &self.basis);
                }
            }
        }
    }

    fn pivot_with_cost(&mut self, r: usize, j: usize, z: &mut [f64]) {
        self.pivot(r, j);
        let zj = z[j];
        if zj != 0.0 {
            let row = &self.rows[r];
            for (zk, ak) in z.iter_mut().zip(row.iter()) {
                *zk -= zj * ak;
            }
            z[j] = 0.0;
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let ncols = self.cost.len();
        let pivot = self.rows[r][j];
        for k in 0..ncols {
            self.rows[r][k] /= pivot;
        }
        self.rhs[r] /= pivot;
        self.rows[r][j] = 1.0;
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][j];
            if f != 0.0 {
                let row = &mut self.rows[i];
                for (xk, pk) in row.iter_mut().zip(pivot_row.iter()) {
                    *xk -= f * pk;
                }
                self.rhs[i] -= f * pivot_rhs;
                row[j] = 0.0;
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = j;
    }

    /// After phase 1: pivot zero-level artificials out of the basis
    /// (choosing the largest available pivot element), and drop rows that
    /// turn out redundant.
    fn evict_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.artificial_start {
                let col = (0..self.artificial_start)
                    .filter(|&j| self.rows[i][j].abs() > 1e-7)
                    .max_by(|&a, &b| {
                        self.rows[i][a].abs().partial_cmp(&self.rows[i][b].abs()).unwrap()
                    });
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        self.rows.swap_remove(i);
                        self.rhs.swap_remove(i);
                        self.basis.swap_remove(i);
                        self.row_origin.swap_remove(i);
                        self.rows_removed = true;
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    /// Rebuilds the tableau for the current basis from the clean snapshot,
    /// discarding accumulated pivot drift. Returns false when the basis
    /// matrix cannot be factored (callers then keep the drifted tableau).
    fn refactorize(&mut self) -> bool {
        if self.rows_removed {
            return false;
        }
        let m = self.rows.len();
        if m == 0 {
            return true;
        }
        let mut bmat = vec![0.0; m * m];
        for (i, &col) in self.basis.iter().enumerate() {
            for r in 0..m {
                bmat[r * m + i] = self.snapshot[r][col];
            }
        }
        let Ok(lu) = Lu::factor(bmat, m) else {
            return false;
        };
        let ncols = self.cost.len();
        let mut new_rows = vec![vec![0.0; ncols]; m];
        let mut column = vec![0.0; m];
        for col in 0..ncols {
            for r in 0..m {
                column[r] = self.snapshot[r][col];
            }
            let x = lu.solve(&column);
            for r in 0..m {
                new_rows[r][col] = x[r];
            }
        }
        let mut rhs = lu.solve(&self.snapshot_rhs);
        for v in rhs.iter_mut() {
            // Degenerate basics come back as numerical zeros; keep the
            // tableau primal-feasible.
            if *v < 0.0 && *v > -1e-7 {
                *v = 0.0;
            }
        }
        if rhs.iter().any(|&v| v < 0.0) {
            return false;
        }
        self.rows = new_rows;
        self.rhs = rhs;
        true
    }

    /// Re-solves the final basic system against the clean snapshot, which
    /// removes the drift accumulated by pivoting; falls back to the tableau
    /// right-hand side when rows were dropped or the basis is too
    /// ill-conditioned to refactor.
    fn refined_basic_values(&self) -> Option<Vec<f64>> {
        if self.rows_removed {
            return None;
        }
        let m = self.rows.len();
        if m == 0 {
            return Some(Vec::new());
        }
        let mut bmat = vec![0.0; m * m];
        for (i, &col) in self.basis.iter().enumerate() {
            for r in 0..m {
                bmat[r * m + i] = self.snapshot[r][col];
            }
        }
        let lu = Lu::factor(bmat, m).ok()?;
        Some(lu.solve(&self.snapshot_rhs))
    }

    fn extract_values(&self) -> Vec<f64> {
        let mut col_values = vec![0.0; self.cost.len()];
        match self.refined_basic_values() {
            Some(xb) => {
                for (i, &b) in self.basis.iter().enumerate() {
                    if b != usize::MAX {
                        col_values[b] = xb[i];
                    }
                }
            }
            None => {
                for (i, &b) in self.basis.iter().enumerate() {
                    if b != usize::MAX {
                        col_values[b] = self.rhs[i];
                    }
                }
            }
        }
        self.var_maps
            .iter()
            .map(|m| {
                let mut x = m.offset + col_values[m.pos];
                if let Some(neg) = m.neg {
                    x -= col_values[neg];
                }
                x
            })
            .collect()
    }

    fn original_objective(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// Duals `y` with `B^T y = c_B` over the final basis, mapped back to
    /// the original row orientation and objective sense.
    fn extract_duals(&self) -> Option<Vec<f64>> {
        let m = self.rows.len();
        if m == 0 {
            return Some(Vec::new());
        }
        let total_cols = self.cost.len();
        let mut bt = vec![0.0; m * m];
        let mut cb = vec![0.0; m];
        for (i, &col) in self.basis.iter().enumerate() {
            debug_assert!(col < total_cols);
            for r in 0..m {
                bt[i * m + r] = self.snapshot[r][col];
            }
            cb[i] = self.cost[col];
        }
        let y = Lu::factor(bt, m).ok()?.solve(&cb);
        let sense_sign = match self.sense {
            Sense::Maximize => -1.0,
            Sense::Minimize => 1.0,
        };
        let mut duals = vec![0.0; self.num_original_rows];
        for (r, origin) in self.row_origin.iter().enumerate() {
            if let Some((idx, flipped)) = origin {
                let s = if *flipped { -1.0 } else { 1.0 };
                duals[*idx] = sense_sign * s * y[r];
            }
        }
        Some(duals)
    }
}
