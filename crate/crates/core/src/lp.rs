//! Dense two-phase simplex over an exact field, with certificates.
//!
//! Every outcome carries a certificate that [`verify_certificates`] can check
//! independently of the solver:
//!
//! * `Optimal`: a primal point and row multipliers `y` such that the reduced
//!   costs `d = c - A^T y` are supported by the variable bounds and the dual
//!   objective equals the primal objective.
//! * `Infeasible`: a Farkas vector `y` proving that no point satisfies the
//!   rows and bounds simultaneously.
//! * `Unbounded`: a feasible point together with an improving recession ray.
//!
//! Sign conventions for `y` (minimization): `y_i <= 0` on `<=` rows,
//! `y_i >= 0` on `>=` rows, free on equalities. For maximization the signs
//! flip, i.e. `y` is the negated multiplier of the equivalent minimization.

use std::fmt;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use serde::Serialize;
use thiserror::Error;

use crate::scalar::{dot, Scalar};

pub const DEFAULT_MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// `optimize c^T x  s.t.  a_i^T x (rel_i) b_i,  lower <= x <= upper`.
///
/// Variables are free unless bounds are given.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub sense: Sense,
    pub objective: Vec<T>,
    pub rows: Vec<Row<T>>,
    pub lower: Vec<Option<T>>,
    pub upper: Vec<Option<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("variable {var} has lower bound above its upper bound")]
    InvalidBounds { var: usize },
    #[error("pivot limit of {limit} reached before termination")]
    PivotLimit { limit: usize },
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(sense: Sense, objective: Vec<T>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            rows: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    pub fn minimize(objective: Vec<T>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    pub fn maximize(objective: Vec<T>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Gives every variable the lower bound 0.
    pub fn nonnegative(mut self) -> Self {
        self.lower = vec![Some(T::zero()); self.num_vars()];
        self
    }

    pub fn bound(mut self, var: usize, lower: Option<T>, upper: Option<T>) -> Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn row(mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> Self {
        self.push_row(coeffs, relation, rhs);
        self
    }

    pub fn push_row(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) {
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Dimension(format!(
                "{} variables but {} lower / {} upper bounds",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.coeffs.len() != n {
                return Err(LpError::Dimension(format!(
                    "row {i} has {} coefficients, expected {n}",
                    r.coeffs.len()
                )));
            }
        }
        for j in 0..n {
            if let (Some(l), Some(u)) = (&self.lower[j], &self.upper[j]) {
                if l > u && !l.approx_eq(u) {
                    return Err(LpError::InvalidBounds { var: j });
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        dot(&self.objective, x)
    }

    pub fn is_feasible(&self, x: &[T]) -> bool {
        x.len() == self.num_vars()
            && (0..x.len()).all(|j| {
                self.lower[j].as_ref().map_or(true, |l| !(x[j].clone() - l.clone()).is_neg())
                    && self.upper[j].as_ref().map_or(true, |u| !(u.clone() - x[j].clone()).is_neg())
            })
            && self.rows.iter().all(|r| {
                let slack = dot(&r.coeffs, x) - r.rhs.clone();
                relation_holds(r.relation, &slack)
            })
    }
}

fn relation_holds<T: Scalar>(rel: Relation, lhs_minus_rhs: &T) -> bool {
    match rel {
        Relation::Le => !lhs_minus_rhs.is_pos(),
        Relation::Eq => lhs_minus_rhs.is_zero_tol(),
        Relation::Ge => !lhs_minus_rhs.is_neg(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal {
        primal: Vec<T>,
        dual: Vec<T>,
        objective: T,
    },
    Infeasible {
        farkas: Vec<T>,
    },
    Unbounded {
        point: Vec<T>,
        ray: Vec<T>,
    },
}

impl<T: Scalar> LpOutcome<T> {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible { .. } => LpStatus::Infeasible,
            LpOutcome::Unbounded { .. } => LpStatus::Unbounded,
        }
    }

    pub fn objective(&self) -> Option<&T> {
        match self {
            LpOutcome::Optimal { objective, .. } => Some(objective),
            _ => None,
        }
    }

    pub fn primal(&self) -> Option<&[T]> {
        match self {
            LpOutcome::Optimal { primal, .. } => Some(primal),
            _ => None,
        }
    }

    pub fn dual(&self) -> Option<&[T]> {
        match self {
            LpOutcome::Optimal { dual, .. } => Some(dual),
            _ => None,
        }
    }
}

pub struct SolveOptions<'a> {
    pub max_pivots: usize,
    /// Receives one line per pivot when set.
    pub trace: Option<&'a mut dyn Write>,
}

impl Default for SolveOptions<'_> {
    fn default() -> Self {
        SolveOptions {
            max_pivots: DEFAULT_MAX_PIVOTS,
            trace: None,
        }
    }
}

impl SolveOptions<'_> {
    pub fn with_max_pivots(max_pivots: usize) -> Self {
        SolveOptions {
            max_pivots,
            trace: None,
        }
    }
}

static PIVOT_LIMIT: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_PIVOTS);

/// Sets the process-wide pivot limit used by [`solve`].
pub fn set_pivot_limit(limit: usize) {
    PIVOT_LIMIT.store(limit, AtomicOrdering::Relaxed);
}

pub fn pivot_limit() -> usize {
    PIVOT_LIMIT.load(AtomicOrdering::Relaxed)
}

pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpOutcome<T>, LpError> {
    solve_with(lp, SolveOptions::with_max_pivots(pivot_limit()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    /// Original variable `j` enters as `x_j = offset_j + sign * z`.
    Structural { var: usize, negated: bool },
    Slack,
    Artificial,
}

struct Tableau<'a, T> {
    rows: Vec<Vec<T>>,
    /// Reduced costs, with `-objective` in the last slot.
    cost: Vec<T>,
    basis: Vec<usize>,
    columns: Vec<Column>,
    pivots: usize,
    max_pivots: usize,
    trace: Option<&'a mut dyn Write>,
}

enum PhaseEnd {
    Optimal,
    Unbounded(usize),
}

impl<T: Scalar> Tableau<'_, T> {
    fn width(&self) -> usize {
        self.columns.len()
    }

    fn rhs(&self, k: usize) -> &T {
        &self.rows[k][self.width()]
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), LpError> {
        self.pivots += 1;
        if self.pivots > self.max_pivots {
            return Err(LpError::PivotLimit {
                limit: self.max_pivots,
            });
        }
        if let Some(w) = self.trace.as_mut() {
            let _ = writeln!(
                w,
                "pivot {}: column {} enters, column {} leaves (row {}), objective {}",
                self.pivots,
                c,
                self.basis[r],
                r,
                -self.cost[self.columns.len()].clone()
            );
        }
        let inv = T::one() / self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        let prow = self.rows[r].clone();
        let eliminate = |target: &mut Vec<T>| {
            let f = target[c].clone();
            if f.is_zero() {
                return;
            }
            for (t, p) in target.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *t = t.clone() - f.clone() * p.clone();
                }
            }
        };
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
        Ok(())
    }

    fn set_costs(&mut self, c: &[T]) {
        let w = self.width();
        let mut cost: Vec<T> = c.to_vec();
        cost.push(T::zero());
        for (k, row) in self.rows.iter().enumerate() {
            let cb = &c[self.basis[k]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=w {
                if !row[j].is_zero() {
                    cost[j] = cost[j].clone() - cb.clone() * row[j].clone();
                }
            }
        }
        self.cost = cost;
    }

    /// Bland's rule: lowest-index improving column, ratio ties broken by the
    /// lowest basic column index.
    fn run(&mut self, allow_artificial: bool) -> Result<PhaseEnd, LpError> {
        loop {
            let entering = (0..self.width()).find(|&j| {
                (allow_artificial || self.columns[j] != Column::Artificial) && self.cost[j].is_neg()
            });
            let Some(q) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut best: Option<(usize, T)> = None;
            for k in 0..self.rows.len() {
                let a = &self.rows[k][q];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs(k).clone() / a.clone();
                best = match best {
                    None => Some((k, ratio)),
                    Some((bk, br)) => {
                        if ratio.approx_eq(&br) {
                            if self.basis[k] < self.basis[bk] {
                                Some((k, ratio))
                            } else {
                                Some((bk, br))
                            }
                        } else if ratio < br {
                            Some((k, ratio))
                        } else {
                            Some((bk, br))
                        }
                    }
                };
            }
            match best {
                None => return Ok(PhaseEnd::Unbounded(q)),
                Some((r, _)) => self.pivot(r, q)?,
            }
        }
    }

    /// `c_B B^{-1}` read off the artificial columns, which started as the identity.
    fn row_duals(&self, c: &[T], artificial: &[usize]) -> Vec<T> {
        artificial
            .iter()
            .map(|&a| {
                let mut y = T::zero();
                for (k, row) in self.rows.iter().enumerate() {
                    let cb = &c[self.basis[k]];
                    if !cb.is_zero() && !row[a].is_zero() {
                        y = y + cb.clone() * row[a].clone();
                    }
                }
                y
            })
            .collect()
    }

    fn basic_values(&self) -> Vec<T> {
        let mut z = vec![T::zero(); self.width()];
        for (k, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs(k).clone();
        }
        z
    }
}

pub fn solve_with<T: Scalar>(
    lp: &LinearProgram<T>,
    opts: SolveOptions<'_>,
) -> Result<LpOutcome<T>, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    let m_orig = lp.rows.len();

    // Substitution x_j = offset_j (+/-) z with z >= 0.
    let offset: Vec<T> = (0..n)
        .map(|j| {
            lp.lower[j]
                .clone()
                .or_else(|| lp.upper[j].clone())
                .unwrap_or_else(T::zero)
        })
        .collect();
    let mut columns = Vec::new();
    let mut struct_cols: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        match (&lp.lower[j], &lp.upper[j]) {
            (Some(_), _) => {
                struct_cols[j].push(columns.len());
                columns.push(Column::Structural { var: j, negated: false });
            }
            (None, Some(_)) => {
                struct_cols[j].push(columns.len());
                columns.push(Column::Structural { var: j, negated: true });
            }
            (None, None) => {
                struct_cols[j].push(columns.len());
                columns.push(Column::Structural { var: j, negated: false });
                struct_cols[j].push(columns.len());
                columns.push(Column::Structural { var: j, negated: true });
            }
        }
    }
    let col_coeff = |col: &Column, a: &T| -> T {
        match col {
            Column::Structural { negated: true, .. } => -a.clone(),
            _ => a.clone(),
        }
    };

    // Rows as (coefficients over structural columns, slack sign, rhs).
    struct StdRow<T> {
        coeffs: Vec<(usize, T)>,
        slack: Option<T>,
        rhs: T,
    }
    let mut std_rows: Vec<StdRow<T>> = Vec::new();
    for r in &lp.rows {
        let mut coeffs = Vec::new();
        let mut rhs = r.rhs.clone();
        for j in 0..n {
            let a = &r.coeffs[j];
            if a.is_zero() {
                continue;
            }
            rhs = rhs - a.clone() * offset[j].clone();
            for &c in &struct_cols[j] {
                coeffs.push((c, col_coeff(&columns[c], a)));
            }
        }
        let slack = match r.relation {
            Relation::Le => Some(T::one()),
            Relation::Ge => Some(-T::one()),
            Relation::Eq => None,
        };
        std_rows.push(StdRow { coeffs, slack, rhs });
    }
    for j in 0..n {
        if let (Some(l), Some(u)) = (&lp.lower[j], &lp.upper[j]) {
            std_rows.push(StdRow {
                coeffs: vec![(struct_cols[j][0], T::one())],
                slack: Some(T::one()),
                rhs: u.clone() - l.clone(),
            });
        }
    }
    let m = std_rows.len();
    let mut slack_col = vec![None; m];
    for (i, r) in std_rows.iter().enumerate() {
        if r.slack.is_some() {
            slack_col[i] = Some(columns.len());
            columns.push(Column::Slack);
        }
    }
    let artificial: Vec<usize> = (0..m)
        .map(|_| {
            columns.push(Column::Artificial);
            columns.len() - 1
        })
        .collect();
    let width = columns.len();

    let mut flip = vec![false; m];
    let mut rows = Vec::with_capacity(m);
    for (i, r) in std_rows.into_iter().enumerate() {
        let mut row = vec![T::zero(); width + 1];
        for (c, a) in r.coeffs {
            row[c] = row[c].clone() + a;
        }
        if let (Some(sc), Some(s)) = (slack_col[i], r.slack) {
            row[sc] = s;
        }
        row[width] = r.rhs;
        if row[width].is_neg() {
            flip[i] = true;
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[artificial[i]] = T::one();
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        cost: Vec::new(),
        basis: artificial.clone(),
        columns,
        pivots: 0,
        max_pivots: opts.max_pivots,
        trace: opts.trace,
    };

    // Phase one: minimize the sum of artificials.
    let c1: Vec<T> = tab
        .columns
        .iter()
        .map(|c| if *c == Column::Artificial { T::one() } else { T::zero() })
        .collect();
    tab.set_costs(&c1);
    if let Some(w) = tab.trace.as_mut() {
        let _ = writeln!(w, "phase 1: {m} rows, {width} columns");
    }
    tab.run(true)?;
    let infeasibility = -tab.cost[width].clone();
    let to_original_rows = |y_std: Vec<T>, negate: bool| -> Vec<T> {
        (0..m_orig)
            .map(|i| {
                let v = y_std[i].clone();
                let v = if flip[i] { -v } else { v };
                if negate {
                    -v
                } else {
                    v
                }
            })
            .collect()
    };
    if infeasibility.is_pos() {
        let y = tab.row_duals(&c1, &artificial);
        return Ok(LpOutcome::Infeasible {
            farkas: to_original_rows(y, false),
        });
    }

    // Drive remaining artificials out of the basis where a real column allows it.
    for k in 0..m {
        if tab.columns[tab.basis[k]] != Column::Artificial {
            continue;
        }
        if let Some(j) = (0..width)
            .find(|&j| tab.columns[j] != Column::Artificial && !tab.rows[k][j].is_zero_tol())
        {
            tab.pivot(k, j)?;
        }
    }

    // Phase two on the true objective (as a minimization).
    let negate = lp.sense == Sense::Maximize;
    let c2: Vec<T> = tab
        .columns
        .iter()
        .map(|col| match col {
            Column::Structural { var, negated } => {
                let c = lp.objective[*var].clone();
                let c = if *negated { -c } else { c };
                if negate {
                    -c
                } else {
                    c
                }
            }
            _ => T::zero(),
        })
        .collect();
    tab.set_costs(&c2);
    if let Some(w) = tab.trace.as_mut() {
        let _ = writeln!(w, "phase 2");
    }
    let end = tab.run(false)?;

    let to_original = |z: &[T], with_offset: bool| -> Vec<T> {
        let mut x: Vec<T> = if with_offset {
            offset.clone()
        } else {
            vec![T::zero(); n]
        };
        for (c, col) in tab.columns.iter().enumerate() {
            if let Column::Structural { var, negated } = col {
                if !z[c].is_zero() {
                    x[*var] = if *negated {
                        x[*var].clone() - z[c].clone()
                    } else {
                        x[*var].clone() + z[c].clone()
                    };
                }
            }
        }
        x
    };
    let z = tab.basic_values();
    let point = to_original(&z, true);
    match end {
        PhaseEnd::Unbounded(q) => {
            let mut dz = vec![T::zero(); width];
            dz[q] = T::one();
            for (k, &b) in tab.basis.iter().enumerate() {
                dz[b] = -tab.rows[k][q].clone();
            }
            Ok(LpOutcome::Unbounded {
                point,
                ray: to_original(&dz, false),
            })
        }
        PhaseEnd::Optimal => {
            let y = tab.row_duals(&c2, &artificial);
            let objective = lp.objective_value(&point);
            Ok(LpOutcome::Optimal {
                primal: point,
                dual: to_original_rows(y, negate),
                objective,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate rejected: {0}")]
pub struct CertificateError(pub String);

fn reject<T>(msg: impl Into<String>) -> Result<T, CertificateError> {
    Err(CertificateError(msg.into()))
}

/// Re-checks a solver outcome from scratch. See the module docs for the
/// conditions each certificate must meet.
pub fn check_certificates<T: Scalar>(
    lp: &LinearProgram<T>,
    outcome: &LpOutcome<T>,
) -> Result<(), CertificateError> {
    if lp.validate().is_err() {
        return reject("malformed program");
    }
    let n = lp.num_vars();
    let m = lp.rows.len();
    match outcome {
        LpOutcome::Optimal {
            primal,
            dual,
            objective,
        } => {
            if primal.len() != n || dual.len() != m {
                return reject("certificate dimensions");
            }
            if !lp.is_feasible(primal) {
                return reject("primal point infeasible");
            }
            let cx = lp.objective_value(primal);
            if !cx.approx_eq(objective) {
                return reject("reported objective differs from c^T x");
            }
            // Work in minimization form.
            let flip = |v: &T| if lp.sense == Sense::Maximize { -v.clone() } else { v.clone() };
            let c: Vec<T> = lp.objective.iter().map(flip).collect();
            let y: Vec<T> = dual.iter().map(flip).collect();
            let d = reduced_costs(lp, &c, &y);
            check_row_signs(lp, &y)?;
            let mut dual_obj = dot(&y, &lp.rows.iter().map(|r| r.rhs.clone()).collect::<Vec<_>>());
            for j in 0..n {
                if d[j].is_pos() {
                    match &lp.lower[j] {
                        Some(l) if primal[j].approx_eq(l) => dual_obj = dual_obj + d[j].clone() * l.clone(),
                        Some(_) => return reject(format!("slackness fails at lower bound of x{j}")),
                        None => return reject(format!("positive reduced cost on x{j} without lower bound")),
                    }
                } else if d[j].is_neg() {
                    match &lp.upper[j] {
                        Some(u) if primal[j].approx_eq(u) => dual_obj = dual_obj + d[j].clone() * u.clone(),
                        Some(_) => return reject(format!("slackness fails at upper bound of x{j}")),
                        None => return reject(format!("negative reduced cost on x{j} without upper bound")),
                    }
                }
            }
            for (i, r) in lp.rows.iter().enumerate() {
                if !y[i].is_zero_tol() && !(dot(&r.coeffs, primal) - r.rhs.clone()).is_zero_tol() {
                    return reject(format!("slackness fails on row {i}"));
                }
            }
            if !dual_obj.approx_eq(&flip(&cx)) {
                return reject("duality gap is nonzero");
            }
            Ok(())
        }
        LpOutcome::Infeasible { farkas } => {
            if farkas.len() != m {
                return reject("certificate dimensions");
            }
            check_row_signs(lp, farkas)?;
            let zero = vec![T::zero(); n];
            let d = reduced_costs(lp, &zero, farkas);
            let mut value = dot(farkas, &lp.rows.iter().map(|r| r.rhs.clone()).collect::<Vec<_>>());
            for j in 0..n {
                if d[j].is_pos() {
                    match &lp.lower[j] {
                        Some(l) => value = value + d[j].clone() * l.clone(),
                        None => return reject(format!("x{j} unbounded below in Farkas combination")),
                    }
                } else if d[j].is_neg() {
                    match &lp.upper[j] {
                        Some(u) => value = value + d[j].clone() * u.clone(),
                        None => return reject(format!("x{j} unbounded above in Farkas combination")),
                    }
                }
            }
            if !value.is_pos() {
                return reject("Farkas combination is not strictly positive");
            }
            Ok(())
        }
        LpOutcome::Unbounded { point, ray } => {
            if point.len() != n || ray.len() != n {
                return reject("certificate dimensions");
            }
            if !lp.is_feasible(point) {
                return reject("base point infeasible");
            }
            for (i, r) in lp.rows.iter().enumerate() {
                if !relation_holds(r.relation, &dot(&r.coeffs, ray)) {
                    return reject(format!("ray leaves row {i}"));
                }
            }
            for j in 0..n {
                if ray[j].is_neg() && lp.lower[j].is_some() {
                    return reject(format!("ray violates lower bound of x{j}"));
                }
                if ray[j].is_pos() && lp.upper[j].is_some() {
                    return reject(format!("ray violates upper bound of x{j}"));
                }
            }
            let slope = dot(&lp.objective, ray);
            let improving = match lp.sense {
                Sense::Minimize => slope.is_neg(),
                Sense::Maximize => slope.is_pos(),
            };
            if !improving {
                return reject("ray does not improve the objective");
            }
            Ok(())
        }
    }
}

pub fn verify_certificates<T: Scalar>(lp: &LinearProgram<T>, outcome: &LpOutcome<T>) -> bool {
    check_certificates(lp, outcome).is_ok()
}

fn reduced_costs<T: Scalar>(lp: &LinearProgram<T>, c: &[T], y: &[T]) -> Vec<T> {
    let mut d = c.to_vec();
    for (r, yi) in lp.rows.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (dj, a) in d.iter_mut().zip(&r.coeffs) {
            if !a.is_zero() {
                *dj = dj.clone() - yi.clone() * a.clone();
            }
        }
    }
    d
}

fn check_row_signs<T: Scalar>(lp: &LinearProgram<T>, y: &[T]) -> Result<(), CertificateError> {
    for (i, (r, yi)) in lp.rows.iter().zip(y).enumerate() {
        let ok = match r.relation {
            Relation::Le => !yi.is_pos(),
            Relation::Ge => !yi.is_neg(),
            Relation::Eq => true,
        };
        if !ok {
            return reject(format!("multiplier on row {i} has the wrong sign"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    type Q = BigRational;

    fn r(n: i64) -> Q {
        rat(n, 1)
    }

    #[test]
    fn bounded_maximum() {
        let lp = LinearProgram::maximize(vec![r(1)])
            .nonnegative()
            .row(vec![r(1)], Relation::Le, r(5));
        let out = solve(&lp).unwrap();
        assert_eq!(out.primal().unwrap(), &[r(5)]);
        assert_eq!(out.dual().unwrap(), &[r(1)]);
        assert!(verify_certificates(&lp, &out));
    }

    #[test]
    fn unbounded_ray() {
        let lp = LinearProgram::maximize(vec![r(1)])
            .nonnegative()
            .row(vec![r(1)], Relation::Ge, r(0));
        let out = solve(&lp).unwrap();
        match &out {
            LpOutcome::Unbounded { ray, .. } => assert_eq!(ray, &vec![r(1)]),
            other => panic!("expected unbounded, got {other:?}"),
        }
        assert!(verify_certificates(&lp, &out));
    }

    #[test]
    fn infeasible_with_farkas() {
        let lp = LinearProgram::minimize(vec![r(0)])
            .row(vec![r(1)], Relation::Le, r(-1))
            .row(vec![r(1)], Relation::Ge, r(0));
        let out = solve(&lp).unwrap();
        assert_eq!(out.status(), LpStatus::Infeasible);
        assert!(verify_certificates(&lp, &out));
        // Wrong sign on the <= row.
        let forged = LpOutcome::Infeasible {
            farkas: vec![r(1), r(1)],
        };
        assert!(!verify_certificates(&lp, &forged));
    }

    #[test]
    fn perturbed_primal_is_rejected() {
        let lp = LinearProgram::maximize(vec![r(3), r(2)])
            .nonnegative()
            .row(vec![r(1), r(1)], Relation::Le, r(4))
            .row(vec![r(1), r(3)], Relation::Le, r(6));
        let out = solve(&lp).unwrap();
        assert_eq!(out.objective().unwrap(), &r(12));
        assert!(verify_certificates(&lp, &out));
        if let LpOutcome::Optimal { mut primal, dual, objective } = out {
            primal[0] = primal[0].clone() - rat(1, 1000);
            let bad = LpOutcome::Optimal { primal, dual, objective };
            assert!(!verify_certificates(&lp, &bad));
        }
    }

    #[test]
    fn free_and_bounded_variables() {
        // min x - y, x free, -2 <= y <= 3, x >= y - 1
        let lp = LinearProgram::minimize(vec![r(1), r(-1)])
            .bound(1, Some(r(-2)), Some(r(3)))
            .row(vec![r(1), r(-1)], Relation::Ge, r(-1));
        let out = solve(&lp).unwrap();
        assert_eq!(out.objective().unwrap(), &r(-1));
        assert!(verify_certificates(&lp, &out));

        // Upper bound only.
        let lp = LinearProgram::maximize(vec![r(2)]).bound(0, None, Some(rat(7, 2)));
        let out = solve(&lp).unwrap();
        assert_eq!(out.primal().unwrap(), &[rat(7, 2)]);
        assert!(verify_certificates(&lp, &out));
    }

    #[test]
    fn classic_cycling_example_terminates() {
        // Beale's example: cycles under the textbook largest-coefficient rule.
        let lp = LinearProgram::minimize(vec![rat(-3, 4), r(150), rat(-1, 50), r(6)])
            .nonnegative()
            .row(vec![rat(1, 4), r(-60), rat(-1, 25), r(9)], Relation::Le, r(0))
            .row(vec![rat(1, 2), r(-90), rat(-1, 50), r(3)], Relation::Le, r(0))
            .row(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1));
        let out = solve(&lp).unwrap();
        assert_eq!(out.objective().unwrap(), &rat(-1, 20));
        assert!(verify_certificates(&lp, &out));
    }

    #[test]
    fn pivot_limit_is_reported() {
        let lp = LinearProgram::maximize(vec![r(3), r(2)])
            .nonnegative()
            .row(vec![r(1), r(1)], Relation::Le, r(4))
            .row(vec![r(1), r(3)], Relation::Le, r(6));
        let err = solve_with(&lp, SolveOptions::with_max_pivots(0)).unwrap_err();
        assert_eq!(err, LpError::PivotLimit { limit: 0 });
    }

    #[test]
    fn trace_output() {
        let lp = LinearProgram::maximize(vec![r(1)])
            .nonnegative()
            .row(vec![r(1)], Relation::Le, r(5));
        let mut buf = Vec::new();
        solve_with(
            &lp,
            SolveOptions {
                max_pivots: 100,
                trace: Some(&mut buf),
            },
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("phase 1") && text.contains("pivot 1"));
    }

    #[test]
    fn malformed_dimensions() {
        let lp = LinearProgram::minimize(vec![r(1), r(1)]).row(vec![r(1)], Relation::Le, r(0));
        assert!(matches!(solve(&lp), Err(LpError::Dimension(_))));
        let lp = LinearProgram::minimize(vec![r(1)]).bound(0, Some(r(2)), Some(r(1)));
        assert_eq!(solve(&lp).unwrap_err(), LpError::InvalidBounds { var: 0 });
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram::minimize(vec![r(1), r(2)])
            .nonnegative()
            .row(vec![r(1), r(1)], Relation::Eq, r(1))
            .row(vec![r(2), r(2)], Relation::Eq, r(2));
        let out = solve(&lp).unwrap();
        assert_eq!(out.objective().unwrap(), &r(1));
        assert!(verify_certificates(&lp, &out));
    }

    #[test]
    fn float_scalar_solves() {
        let lp = LinearProgram::maximize(vec![3.0, 2.0])
            .nonnegative()
            .row(vec![1.0, 1.0], Relation::Le, 4.0)
            .row(vec![1.0, 3.0], Relation::Le, 6.0);
        let out = solve(&lp).unwrap();
        assert!((out.objective().unwrap() - 12.0).abs() < 1e-9);
        assert!(verify_certificates(&lp, &out));
    }
}
