//! Exact two-phase simplex over an ordered field.
//!
//! The solver is generic over the scalar via `num-traits` bounds; the crate
//! instantiates it with [`crate::Rational`], where every comparison is exact
//! and feasibility questions have unambiguous answers. Termination is
//! guaranteed by an anti-cycling discipline: pivoting starts with the
//! largest-improvement rule and permanently switches to Bland's rule once a
//! run of degenerate pivots is observed.

use num_traits::{Num, Signed, Zero};

/// Scalar bound for the simplex kernel: an ordered field with exact
/// comparisons when instantiated at a rational type.
pub trait LpScalar: Clone + std::fmt::Debug + PartialOrd + Num + Signed {}
impl<T: Clone + std::fmt::Debug + PartialOrd + Num + Signed> LpScalar for T {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintOp {
    Eq,
    Le,
    Ge,
}

/// One row `Σ coeffs · x  (=|≤|≥)  rhs` over nonnegative variables. Sparse
/// coefficient list; repeated indices are summed.
#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub coeffs: Vec<(usize, T)>,
    pub op: ConstraintOp,
    pub rhs: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
pub struct Program<T> {
    pub num_vars: usize,
    pub constraints: Vec<Constraint<T>>,
    /// Sparse objective.
    pub objective: Vec<(usize, T)>,
    pub sense: Sense,
}

#[derive(Debug, Clone)]
pub enum Solution<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

/// Equality system `Ax = b`, `x ≥ 0`, queried for feasibility only.
#[derive(Debug, Clone)]
pub struct EqSystem<T> {
    pub num_vars: usize,
    pub rows: Vec<(Vec<(usize, T)>, T)>,
}

/// Feasibility outcome for an [`EqSystem`]. The infeasible branch carries an
/// exact Farkas certificate: multipliers `y` with `yᵀA ≤ 0` componentwise
/// and `yᵀb > 0`, verified before being returned.
#[derive(Debug, Clone)]
pub enum Feasibility<T> {
    Feasible(Vec<T>),
    Infeasible(Vec<T>),
}

/// Decides feasibility of an equality system with a basic solution or a
/// Farkas certificate.
pub fn feasible_eq<T: LpScalar>(system: &EqSystem<T>) -> Feasibility<T> {
    let constraints: Vec<Constraint<T>> = system
        .rows
        .iter()
        .map(|(coeffs, rhs)| Constraint {
            coeffs: coeffs.clone(),
            op: ConstraintOp::Eq,
            rhs: rhs.clone(),
        })
        .collect();
    let mut tableau = Tableau::new(system.num_vars, &constraints);
    match tableau.phase_one() {
        PhaseOne::Feasible => Feasibility::Feasible(tableau.extract_x()),
        PhaseOne::Infeasible => {
            let y = tableau.farkas();
            debug_assert!(verify_farkas(system, &y));
            Feasibility::Infeasible(y)
        }
    }
}

/// Checks a Farkas certificate against the original system.
pub fn verify_farkas<T: LpScalar>(system: &EqSystem<T>, y: &[T]) -> bool {
    let mut column_sums = vec![T::zero(); system.num_vars];
    let mut value = T::zero();
    for (i, (coeffs, rhs)) in system.rows.iter().enumerate() {
        for (j, c) in coeffs {
            column_sums[*j] = column_sums[*j].clone() + y[i].clone() * c.clone();
        }
        value = value + y[i].clone() * rhs.clone();
    }
    column_sums.iter().all(|s| !s.is_positive()) && value.is_positive()
}

/// Solves a general program with nonnegative variables.
pub fn solve<T: LpScalar>(program: &Program<T>) -> Solution<T> {
    let mut tableau = Tableau::new(program.num_vars, &program.constraints);
    if let PhaseOne::Infeasible = tableau.phase_one() {
        return Solution::Infeasible;
    }
    let mut dense_obj = vec![T::zero(); program.num_vars];
    for (j, c) in &program.objective {
        dense_obj[*j] = dense_obj[*j].clone() + c.clone();
    }
    if program.sense == Sense::Maximize {
        for c in dense_obj.iter_mut() {
            *c = -c.clone();
        }
    }
    match tableau.phase_two(&dense_obj) {
        PhaseTwo::Optimal => {
            let x = tableau.extract_x();
            let mut value = T::zero();
            for (j, c) in &program.objective {
                value = value + c.clone() * x[*j].clone();
            }
            Solution::Optimal { x, value }
        }
        PhaseTwo::Unbounded => Solution::Unbounded,
    }
}

enum PhaseOne {
    Feasible,
    Infeasible,
}

enum PhaseTwo {
    Optimal,
    Unbounded,
}

struct Tableau<T> {
    num_vars: usize,
    num_cols: usize,
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    obj: Vec<T>,
    basis: Vec<usize>,
    /// Artificial column of each original row (`usize::MAX` when none), in
    /// original row order. Used for certificate extraction.
    artificial_of_row: Vec<usize>,
    /// Sign applied to each original row to normalize its rhs.
    row_sign: Vec<bool>, // true = negated
    first_artificial: usize,
    banned_from: usize,
    /// Original row index carried by each current tableau row (rows may be
    /// dropped as redundant after phase one).
    row_origin: Vec<usize>,
    bland: bool,
    degenerate_run: u32,
}

impl<T: LpScalar> Tableau<T> {
    fn new(num_vars: usize, constraints: &[Constraint<T>]) -> Self {
        let m = constraints.len();
        // Column layout: structural | slack or surplus | artificial.
        let mut num_slack = 0usize;
        let mut num_artificial = 0usize;
        let mut normalized: Vec<(Vec<T>, ConstraintOp, T, bool)> = Vec::with_capacity(m);
        for c in constraints {
            let mut dense = vec![T::zero(); num_vars];
            for (j, v) in &c.coeffs {
                dense[*j] = dense[*j].clone() + v.clone();
            }
            let negate = c.rhs.is_negative();
            let (dense, op, rhs) = if negate {
                let flipped = match c.op {
                    ConstraintOp::Le => ConstraintOp::Ge,
                    ConstraintOp::Ge => ConstraintOp::Le,
                    ConstraintOp::Eq => ConstraintOp::Eq,
                };
                (dense.into_iter().map(|v| -v).collect::<Vec<_>>(), flipped, -c.rhs.clone())
            } else {
                (dense, c.op, c.rhs.clone())
            };
            match op {
                ConstraintOp::Le => num_slack += 1,
                ConstraintOp::Ge => {
                    num_slack += 1;
                    num_artificial += 1;
                }
                ConstraintOp::Eq => num_artificial += 1,
            }
            normalized.push((dense, op, rhs, negate));
        }

        let first_slack = num_vars;
        let first_artificial = num_vars + num_slack;
        let num_cols = first_artificial + num_artificial;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut artificial_of_row = vec![usize::MAX; m];
        let mut row_sign = Vec::with_capacity(m);
        let mut next_slack = first_slack;
        let mut next_artificial = first_artificial;
        for (i, (dense, op, b, negated)) in normalized.into_iter().enumerate() {
            let mut row = vec![T::zero(); num_cols];
            row[..num_vars].clone_from_slice(&dense);
            match op {
                ConstraintOp::Le => {
                    row[next_slack] = T::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                ConstraintOp::Ge => {
                    row[next_slack] = -T::one();
                    next_slack += 1;
                    row[next_artificial] = T::one();
                    basis.push(next_artificial);
                    artificial_of_row[i] = next_artificial;
                    next_artificial += 1;
                }
                ConstraintOp::Eq => {
                    row[next_artificial] = T::one();
                    basis.push(next_artificial);
                    artificial_of_row[i] = next_artificial;
                    next_artificial += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
            row_sign.push(negated);
        }

        Tableau {
            num_vars,
            num_cols,
            rows,
            rhs,
            obj: vec![T::zero(); num_cols],
            basis,
            artificial_of_row,
            row_sign,
            first_artificial,
            banned_from: num_cols,
            row_origin: (0..m).collect(),
            bland: false,
            degenerate_run: 0,
        }
    }

    fn phase_one(&mut self) -> PhaseOne {
        if self.first_artificial == self.num_cols {
            return PhaseOne::Feasible; // all-slack basis is feasible
        }
        // Reduced costs for min Σ artificials: start from c (1 on
        // artificials) and price out the artificial basics.
        self.obj = vec![T::zero(); self.num_cols];
        for col in self.first_artificial..self.num_cols {
            self.obj[col] = T::one();
        }
        for (i, &b) in self.basis.iter().enumerate() {
            if b >= self.first_artificial {
                for j in 0..self.num_cols {
                    let delta = self.rows[i][j].clone();
                    self.obj[j] = self.obj[j].clone() - delta;
                }
            }
        }
        match self.run() {
            PhaseTwo::Unbounded => unreachable!("phase one objective is bounded below"),
            PhaseTwo::Optimal => {}
        }
        let optimum = self.objective_value(|col| {
            if col >= self.first_artificial {
                T::one()
            } else {
                T::zero()
            }
        });
        if optimum.is_positive() {
            return PhaseOne::Infeasible;
        }
        self.evict_artificials();
        self.banned_from = self.first_artificial;
        PhaseOne::Feasible
    }

    /// Objective value under cost function `c`, evaluated at the current
    /// basic solution.
    fn objective_value(&self, c: impl Fn(usize) -> T) -> T {
        let mut total = T::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            total = total + c(b) * self.rhs[i].clone();
        }
        total
    }

    /// Farkas multipliers for the original rows, valid after an infeasible
    /// phase one on an all-equality system (every row carries an
    /// artificial). The multipliers are the phase-one simplex multipliers,
    /// recovered from the reduced costs of the artificial columns and
    /// unscaled by the rhs sign normalization.
    fn farkas(&self) -> Vec<T> {
        let m = self.artificial_of_row.len();
        let mut y = vec![T::zero(); m];
        for (orig, &col) in self.artificial_of_row.iter().enumerate() {
            debug_assert_ne!(col, usize::MAX, "certificates require an all-equality system");
            y[orig] = T::one() - self.obj[col].clone();
            if self.row_sign[orig] {
                y[orig] = -y[orig].clone();
            }
        }
        y
    }

    fn evict_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.first_artificial {
                // Value is zero here (phase-one optimum is zero). Pivot any
                // non-artificial column into the basis, else the row is
                // redundant and dropped.
                let pivot_col = (0..self.first_artificial)
                    .find(|&j| !self.rows[i][j].is_zero());
                match pivot_col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                        self.row_origin.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    fn phase_two(&mut self, objective: &[T]) -> PhaseTwo {
        self.obj = vec![T::zero(); self.num_cols];
        self.obj[..self.num_vars].clone_from_slice(objective);
        for (i, &b) in self.basis.iter().enumerate() {
            if self.obj[b].is_zero() {
                continue;
            }
            let factor = self.obj[b].clone();
            for j in 0..self.num_cols {
                let delta = factor.clone() * self.rows[i][j].clone();
                self.obj[j] = self.obj[j].clone() - delta;
            }
        }
        self.run()
    }

    fn run(&mut self) -> PhaseTwo {
        let switch_threshold = 3 * (self.rows.len() as u32 + self.num_cols as u32) + 16;
        loop {
            let entering = self.pick_entering();
            let Some(e) = entering else {
                return PhaseTwo::Optimal;
            };
            let Some(leave) = self.pick_leaving(e) else {
                return PhaseTwo::Unbounded;
            };
            if self.rhs[leave].is_zero() {
                self.degenerate_run += 1;
                if self.degenerate_run > switch_threshold {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(leave, e);
        }
    }

    fn pick_entering(&self) -> Option<usize> {
        if self.bland {
            (0..self.banned_from).find(|&j| self.obj[j].is_negative())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..self.banned_from {
                if self.obj[j].is_negative() {
                    match best {
                        None => best = Some(j),
                        Some(b) => {
                            if self.obj[j] < self.obj[b] {
                                best = Some(j);
                            }
                        }
                    }
                }
            }
            best
        }
    }

    fn pick_leaving(&self, entering: usize) -> Option<usize> {
        let mut best: Option<(usize, T)> = None; // (row, ratio)
        for i in 0..self.rows.len() {
            let a = &self.rows[i][entering];
            if !a.is_positive() {
                continue;
            }
            let ratio = self.rhs[i].clone() / a.clone();
            match &best {
                None => best = Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < *br
                        || (ratio == *br
                            && self.bland
                            && self.basis[i] < self.basis[*bi])
                    {
                        best = Some((i, ratio));
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        debug_assert!(!pivot.is_zero());
        for j in 0..self.num_cols {
            self.rows[row][j] = self.rows[row][j].clone() / pivot.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / pivot.clone();
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..self.num_cols {
                let delta = factor.clone() * self.rows[row][j].clone();
                self.rows[i][j] = self.rows[i][j].clone() - delta;
            }
            let delta = factor * self.rhs[row].clone();
            self.rhs[i] = self.rhs[i].clone() - delta;
        }
        let factor = self.obj[col].clone();
        if !factor.is_zero() {
            for j in 0..self.num_cols {
                let delta = factor.clone() * self.rows[row][j].clone();
                self.obj[j] = self.obj[j].clone() - delta;
            }
        }
        self.basis[row] = col;
    }

    fn extract_x(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.num_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_vars {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::Rational;

    fn eq_system(num_vars: usize, rows: Vec<(Vec<(usize, i64)>, i64)>) -> EqSystem<Rational> {
        EqSystem {
            num_vars,
            rows: rows
                .into_iter()
                .map(|(coeffs, rhs)| {
                    (
                        coeffs.into_iter().map(|(j, c)| (j, ratio(c, 1))).collect(),
                        ratio(rhs, 1),
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn balanced_pair_has_the_unique_solution() {
        // x1 + x2 = 1, x1 − x2 = 0 → x = (1/2, 1/2).
        let sys = eq_system(2, vec![(vec![(0, 1), (1, 1)], 1), (vec![(0, 1), (1, -1)], 0)]);
        match feasible_eq(&sys) {
            Feasibility::Feasible(x) => assert_eq!(x, vec![ratio(1, 2), ratio(1, 2)]),
            Feasibility::Infeasible(_) => panic!("system is feasible"),
        }
    }

    #[test]
    fn contradictory_rows_produce_a_certificate() {
        // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
        let sys = eq_system(2, vec![(vec![(0, 1), (1, 1)], 1), (vec![(0, 1), (1, 1)], 2)]);
        match feasible_eq(&sys) {
            Feasibility::Feasible(_) => panic!("system is infeasible"),
            Feasibility::Infeasible(y) => assert!(verify_farkas(&sys, &y)),
        }
    }

    #[test]
    fn nonnegativity_blocks_negative_rhs() {
        // x1 + 2 x2 = −1 with x ≥ 0.
        let sys = eq_system(2, vec![(vec![(0, 1), (1, 2)], -1)]);
        match feasible_eq(&sys) {
            Feasibility::Feasible(_) => panic!("system is infeasible"),
            Feasibility::Infeasible(y) => assert!(verify_farkas(&sys, &y)),
        }
    }

    #[test]
    fn zero_variable_systems() {
        let sys = eq_system(0, vec![(vec![], 0)]);
        assert!(matches!(feasible_eq(&sys), Feasibility::Feasible(_)));
        let sys = eq_system(0, vec![(vec![], 1)]);
        match feasible_eq(&sys) {
            Feasibility::Feasible(_) => panic!("1 = 0 over no variables"),
            Feasibility::Infeasible(y) => assert!(verify_farkas(&sys, &y)),
        }
    }

    #[test]
    fn maximization_with_inequalities() {
        // max x1 + x2 st x1 + 2 x2 ≤ 4, 3 x1 + x2 ≤ 6 → optimum at (8/5, 6/5).
        let program = Program {
            num_vars: 2,
            constraints: vec![
                Constraint {
                    coeffs: vec![(0, ratio(1, 1)), (1, ratio(2, 1))],
                    op: ConstraintOp::Le,
                    rhs: ratio(4, 1),
                },
                Constraint {
                    coeffs: vec![(0, ratio(3, 1)), (1, ratio(1, 1))],
                    op: ConstraintOp::Le,
                    rhs: ratio(6, 1),
                },
            ],
            objective: vec![(0, ratio(1, 1)), (1, ratio(1, 1))],
            sense: Sense::Maximize,
        };
        match solve(&program) {
            Solution::Optimal { x, value } => {
                assert_eq!(value, ratio(14, 5));
                assert_eq!(x, vec![ratio(8, 5), ratio(6, 5)]);
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_is_detected() {
        // max x1 st x1 − x2 ≤ 1.
        let program = Program {
            num_vars: 2,
            constraints: vec![Constraint {
                coeffs: vec![(0, ratio(1, 1)), (1, ratio(-1, 1))],
                op: ConstraintOp::Le,
                rhs: ratio(1, 1),
            }],
            objective: vec![(0, ratio(1, 1))],
            sense: Sense::Maximize,
        };
        assert!(matches!(solve(&program), Solution::Unbounded));
    }

    #[test]
    fn mixed_constraint_kinds() {
        // min x1 st x1 ≥ 3, x1 + x2 = 5, x2 ≤ 10.
        let program = Program {
            num_vars: 2,
            constraints: vec![
                Constraint {
                    coeffs: vec![(0, ratio(1, 1))],
                    op: ConstraintOp::Ge,
                    rhs: ratio(3, 1),
                },
                Constraint {
                    coeffs: vec![(0, ratio(1, 1)), (1, ratio(1, 1))],
                    op: ConstraintOp::Eq,
                    rhs: ratio(5, 1),
                },
                Constraint {
                    coeffs: vec![(1, ratio(1, 1))],
                    op: ConstraintOp::Le,
                    rhs: ratio(10, 1),
                },
            ],
            objective: vec![(0, ratio(1, 1))],
            sense: Sense::Minimize,
        };
        match solve(&program) {
            Solution::Optimal { x, value } => {
                assert_eq!(value, ratio(3, 1));
                assert_eq!(x, vec![ratio(3, 1), ratio(2, 1)]);
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        // Duplicate rows leave a basic artificial at zero after phase one.
        let sys = eq_system(
            2,
            vec![
                (vec![(0, 1), (1, 1)], 1),
                (vec![(0, 1), (1, 1)], 1),
                (vec![(0, 2), (1, 2)], 2),
            ],
        );
        match feasible_eq(&sys) {
            Feasibility::Feasible(x) => {
                assert_eq!(x[0].clone() + x[1].clone(), ratio(1, 1));
            }
            Feasibility::Infeasible(_) => panic!("system is feasible"),
        }
    }
}
