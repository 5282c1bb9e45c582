use super::{dot, LinearProgram, LpOutcome, Multipliers};
use num_traits::{Signed, Zero};

/// Re-checks an outcome against `lp` with exact arithmetic, without
/// consulting the solver.
pub fn verify_certificate(lp: &LinearProgram, outcome: &LpOutcome) -> bool {
    if lp.check_dimensions().is_err() {
        return false;
    }
    match outcome {
        LpOutcome::Optimal { primal, value, dual } => {
            lp.is_feasible_point(primal)
                && lp.objective_value(primal) == *value
                && signs_ok(lp, &dual.0)
                && dual.0.combined_row(lp) == lp.objective
                && dual.0.combined_rhs(lp) == *value
        }
        LpOutcome::Infeasible { farkas } => {
            signs_ok(lp, &farkas.0)
                && farkas.0.combined_row(lp).iter().all(|v| v.is_zero())
                && farkas.0.combined_rhs(lp).is_negative()
        }
        LpOutcome::Unbounded { point, ray } => {
            ray.len() == lp.num_vars()
                && lp.is_feasible_point(point)
                && lp.equalities.iter().all(|c| dot(&c.coeffs, ray).is_zero())
                && lp.inequalities.iter().all(|c| !dot(&c.coeffs, ray).is_positive())
                && ray
                    .iter()
                    .zip(lp.lower.iter().zip(&lp.upper))
                    .all(|(d, (l, u))| !(l.is_some() && d.is_negative() || u.is_some() && d.is_positive()))
                && dot(&lp.objective, ray).is_positive()
        }
    }
}

fn signs_ok(lp: &LinearProgram, m: &Multipliers) -> bool {
    let n = lp.num_vars();
    m.eq.len() == lp.equalities.len()
        && m.ineq.len() == lp.inequalities.len()
        && m.lower.len() == n
        && m.upper.len() == n
        && m.ineq.iter().all(|v| !v.is_negative())
        && (0..n).all(|j| {
            let lower_ok = match lp.lower[j] {
                Some(_) => !m.lower[j].is_negative(),
                None => m.lower[j].is_zero(),
            };
            let upper_ok = match lp.upper[j] {
                Some(_) => !m.upper[j].is_negative(),
                None => m.upper[j].is_zero(),
            };
            lower_ok && upper_ok
        })
}
