//! Dense two-phase tableau simplex over exact rationals (Bland's rule).

use super::{DualCertificate, FarkasCertificate, LinearProgram, LpOutcome, Multipliers};
use crate::rational::{one, zero, Rational};
use num_traits::{Signed, Zero};

/// How an original variable is expressed in nonnegative standard columns.
#[derive(Debug, Clone)]
enum VarRepr {
    /// `x = shift + z`
    Lower { col: usize, shift: Rational },
    /// `x = shift - z`
    UpperOnly { col: usize, shift: Rational },
    /// `x = z_pos - z_neg`
    Free { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy)]
enum RowKind {
    Eq(usize),
    Ineq(usize),
    /// Upper bound of a variable that also has a lower bound.
    Upper(usize),
}

pub(super) struct StandardForm<'a> {
    lp: &'a LinearProgram,
    vars: Vec<VarRepr>,
    kinds: Vec<RowKind>,
    /// +1 or -1: the row was negated to make its rhs nonnegative.
    negated: Vec<bool>,
    n_struct: usize,
    n_slack: usize,
    n_cols: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Column that held the unit vector `e_i` in the initial tableau.
    unit_col: Vec<usize>,
}

enum PhaseEnd {
    Optimal(Vec<Rational>),
    Unbounded { entering: usize },
}

impl<'a> StandardForm<'a> {
    pub(super) fn build(lp: &'a LinearProgram) -> Self {
        let mut vars = Vec::with_capacity(lp.num_vars());
        let mut n_struct = 0;
        let mut kinds: Vec<RowKind> = (0..lp.equalities.len()).map(RowKind::Eq).collect();
        kinds.extend((0..lp.inequalities.len()).map(RowKind::Ineq));
        for j in 0..lp.num_vars() {
            let repr = match (&lp.lower[j], &lp.upper[j]) {
                (Some(l), u) => {
                    if u.is_some() {
                        kinds.push(RowKind::Upper(j));
                    }
                    VarRepr::Lower { col: n_struct, shift: l.clone() }
                }
                (None, Some(u)) => VarRepr::UpperOnly { col: n_struct, shift: u.clone() },
                (None, None) => {
                    n_struct += 1;
                    VarRepr::Free { pos: n_struct - 1, neg: n_struct }
                }
            };
            n_struct += 1;
            vars.push(repr);
        }
        let n_slack = kinds.iter().filter(|k| !matches!(k, RowKind::Eq(_))).count();

        let m = kinds.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut negated = Vec::with_capacity(m);
        let mut needs_artificial = Vec::with_capacity(m);
        let mut slack_of_row = vec![None; m];
        let mut next_slack = n_struct;
        for (i, kind) in kinds.iter().enumerate() {
            let mut row = vec![zero(); n_struct + n_slack];
            let mut b = match *kind {
                RowKind::Eq(e) => place(&vars, &lp.equalities[e].coeffs, &lp.equalities[e].rhs, &mut row),
                RowKind::Ineq(k) => place(&vars, &lp.inequalities[k].coeffs, &lp.inequalities[k].rhs, &mut row),
                RowKind::Upper(j) => {
                    let VarRepr::Lower { col, shift } = &vars[j] else { unreachable!() };
                    row[*col] = one();
                    lp.upper[j].as_ref().expect("upper bound row") - shift
                }
            };
            if !matches!(kind, RowKind::Eq(_)) {
                row[next_slack] = one();
                slack_of_row[i] = Some(next_slack);
                next_slack += 1;
            }
            let neg = b.is_negative();
            if neg {
                for v in row.iter_mut() {
                    if !v.is_zero() {
                        *v = -v.clone();
                    }
                }
                b = -b;
            }
            needs_artificial.push(neg || slack_of_row[i].is_none());
            rows.push(row);
            rhs.push(b);
            negated.push(neg);
        }

        let n_art = needs_artificial.iter().filter(|&&x| x).count();
        let n_cols = n_struct + n_slack + n_art;
        let mut basis = Vec::with_capacity(m);
        let mut unit_col = Vec::with_capacity(m);
        let mut next_art = n_struct + n_slack;
        for (i, row) in rows.iter_mut().enumerate() {
            row.resize(n_cols, zero());
            let col = if needs_artificial[i] {
                row[next_art] = one();
                next_art += 1;
                next_art - 1
            } else {
                slack_of_row[i].expect("slack row")
            };
            basis.push(col);
            unit_col.push(col);
        }

        StandardForm {
            lp,
            vars,
            kinds,
            negated,
            n_struct,
            n_slack,
            n_cols,
            rows,
            rhs,
            basis,
            unit_col,
        }
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.n_struct + self.n_slack
    }

    pub(super) fn solve(mut self) -> LpOutcome {
        let has_artificials = self.n_cols > self.n_struct + self.n_slack;
        if has_artificials {
            let costs: Vec<Rational> = (0..self.n_cols)
                .map(|j| if self.is_artificial(j) { -one() } else { zero() })
                .collect();
            let PhaseEnd::Optimal(reduced) = self.run(&costs) else {
                unreachable!("phase one is bounded above by zero")
            };
            let value: Rational = self
                .basis
                .iter()
                .zip(&self.rhs)
                .map(|(&b, r)| &costs[b] * r)
                .sum();
            if value.is_negative() {
                let farkas = self.multipliers(&costs, &reduced, &vec![zero(); self.lp.num_vars()]);
                return LpOutcome::Infeasible { farkas: FarkasCertificate(farkas) };
            }
            self.drive_out_artificials();
        }

        let mut costs = vec![zero(); self.n_cols];
        for (j, repr) in self.vars.iter().enumerate() {
            let c = &self.lp.objective[j];
            match repr {
                VarRepr::Lower { col, .. } => costs[*col] = c.clone(),
                VarRepr::UpperOnly { col, .. } => costs[*col] = -c.clone(),
                VarRepr::Free { pos, neg } => {
                    costs[*pos] = c.clone();
                    costs[*neg] = -c.clone();
                }
            }
        }
        match self.run(&costs) {
            PhaseEnd::Optimal(reduced) => {
                let primal = self.primal();
                let value = self.lp.objective_value(&primal);
                let dual = self.multipliers(&costs, &reduced, &self.lp.objective);
                LpOutcome::Optimal { primal, value, dual: DualCertificate(dual) }
            }
            PhaseEnd::Unbounded { entering } => {
                let mut dz = vec![zero(); self.n_cols];
                dz[entering] = one();
                for (i, &b) in self.basis.iter().enumerate() {
                    dz[b] = -self.rows[i][entering].clone();
                }
                let ray = self.map_to_original(&dz, false);
                LpOutcome::Unbounded { point: self.primal(), ray }
            }
        }
    }

    /// Maximizes `costs . z` from the current basis. Artificial columns never enter.
    fn run(&mut self, costs: &[Rational]) -> PhaseEnd {
        let mut reduced: Vec<Rational> = costs.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (d, a) in reduced.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *d -= cb * a;
                }
            }
        }
        loop {
            let entering = (0..self.n_struct + self.n_slack).find(|&j| reduced[j].is_positive());
            let Some(e) = entering else {
                return PhaseEnd::Optimal(reduced);
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return PhaseEnd::Unbounded { entering: e };
            };
            self.pivot(r, e, Some(&mut reduced));
        }
    }

    fn pivot(&mut self, r: usize, e: usize, reduced: Option<&mut Vec<Rational>>) {
        let piv = self.rows[r][e].clone();
        if piv != one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
            self.rhs[r] /= &piv;
        }
        let support: Vec<usize> = (0..self.n_cols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][e].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &support {
                row[j] -= &f * &pivot_row[j];
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= &f * &pivot_rhs;
            }
        }
        if let Some(d) = reduced {
            let f = d[e].clone();
            if !f.is_zero() {
                for &j in &support {
                    d[j] -= &f * &pivot_row[j];
                }
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = e;
    }

    /// Replaces zero-level basic artificials by real columns where possible.
    /// Rows where no real column has a nonzero entry are redundant and keep
    /// their artificial, which then stays at zero.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if !self.is_artificial(self.basis[i]) {
                continue;
            }
            debug_assert!(self.rhs[i].is_zero());
            if let Some(j) = (0..self.n_struct + self.n_slack).find(|&j| !self.rows[i][j].is_zero()) {
                self.pivot(i, j, None);
            }
        }
    }

    fn primal(&self) -> Vec<Rational> {
        let mut z = vec![zero(); self.n_cols];
        for (i, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs[i].clone();
        }
        self.map_to_original(&z, true)
    }

    fn map_to_original(&self, z: &[Rational], with_shift: bool) -> Vec<Rational> {
        self.vars
            .iter()
            .map(|repr| match repr {
                VarRepr::Lower { col, shift } => {
                    if with_shift {
                        shift + &z[*col]
                    } else {
                        z[*col].clone()
                    }
                }
                VarRepr::UpperOnly { col, shift } => {
                    if with_shift {
                        shift - &z[*col]
                    } else {
                        -z[*col].clone()
                    }
                }
                VarRepr::Free { pos, neg } => &z[*pos] - &z[*neg],
            })
            .collect()
    }

    /// Row multipliers `y = c_B B^-1`, mapped back onto the original rows and
    /// bounds. `objective` is zero for a Farkas certificate.
    fn multipliers(&self, costs: &[Rational], reduced: &[Rational], objective: &[Rational]) -> Multipliers {
        let lp = self.lp;
        let n = lp.num_vars();
        let mut out = Multipliers {
            eq: vec![zero(); lp.equalities.len()],
            ineq: vec![zero(); lp.inequalities.len()],
            lower: vec![zero(); n],
            upper: vec![zero(); n],
        };
        for (i, kind) in self.kinds.iter().enumerate() {
            let u = self.unit_col[i];
            let mut y = &costs[u] - &reduced[u];
            if self.negated[i] {
                y = -y;
            }
            match *kind {
                RowKind::Eq(e) => out.eq[e] = y,
                RowKind::Ineq(k) => out.ineq[k] = y,
                RowKind::Upper(j) => out.upper[j] = y,
            }
        }
        let mut r = vec![zero(); n];
        for (m, c) in out.eq.iter().zip(&lp.equalities).chain(out.ineq.iter().zip(&lp.inequalities)) {
            if m.is_zero() {
                continue;
            }
            for (rj, a) in r.iter_mut().zip(&c.coeffs) {
                if !a.is_zero() {
                    *rj += m * a;
                }
            }
        }
        for (j, repr) in self.vars.iter().enumerate() {
            match repr {
                VarRepr::Lower { .. } => out.lower[j] = &r[j] + &out.upper[j] - &objective[j],
                VarRepr::UpperOnly { .. } => out.upper[j] = &objective[j] - &r[j],
                VarRepr::Free { .. } => {}
            }
        }
        out
    }
}

/// Writes `coeffs` into standard columns and returns the shifted rhs.
fn place(vars: &[VarRepr], coeffs: &[Rational], rhs: &Rational, row: &mut [Rational]) -> Rational {
    let mut b = rhs.clone();
    for (a, repr) in coeffs.iter().zip(vars) {
        if a.is_zero() {
            continue;
        }
        match repr {
            VarRepr::Lower { col, shift } => {
                row[*col] += a;
                if !shift.is_zero() {
                    b -= a * shift;
                }
            }
            VarRepr::UpperOnly { col, shift } => {
                row[*col] -= a;
                b -= a * shift;
            }
            VarRepr::Free { pos, neg } => {
                row[*pos] += a;
                row[*neg] -= a;
            }
        }
    }
    b
}
