//! Exact-rational linear programming.
//!
//! Problems are stated as
//!
//! ```text
//! maximize    c . x
//! subject to  A_eq x  = b_eq
//!             G x    <= h
//!             l_j <= x_j <= u_j   (either bound may be absent)
//! ```
//!
//! and solved by a two-phase dense tableau simplex using Bland's rule, so the
//! pivot sequence is deterministic and cycling is impossible. Every outcome
//! carries a certificate that [`verify_certificate`] re-checks from scratch:
//! a dual solution for `Optimal`, a Farkas combination for `Infeasible`, and
//! an improving ray for `Unbounded`.

mod certificate;
mod simplex;

pub use certificate::verify_certificate;

use crate::rational::{zero, Rational};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// One linear row `coeffs . x (= or <=) rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    num_vars: usize,
    pub objective: Vec<Rational>,
    pub equalities: Vec<Constraint>,
    pub inequalities: Vec<Constraint>,
    pub lower: Vec<Option<Rational>>,
    pub upper: Vec<Option<Rational>>,
}

impl LinearProgram {
    /// `num_vars` variables, zero objective, every variable `>= 0`.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![zero(); num_vars],
            equalities: Vec::new(),
            inequalities: Vec::new(),
            lower: vec![Some(zero()); num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Appends a fresh variable (bounded below by zero) and returns its index.
    pub fn add_var(&mut self) -> usize {
        self.num_vars += 1;
        self.objective.push(zero());
        self.lower.push(Some(zero()));
        self.upper.push(None);
        for row in self.equalities.iter_mut().chain(self.inequalities.iter_mut()) {
            row.coeffs.push(zero());
        }
        self.num_vars - 1
    }

    pub fn set_objective(&mut self, objective: Vec<Rational>) -> &mut Self {
        self.objective = objective;
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.equalities.push(Constraint { coeffs, rhs });
        self
    }

    pub fn add_le(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.inequalities.push(Constraint { coeffs, rhs });
        self
    }

    pub fn add_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.inequalities.push(Constraint {
            coeffs: coeffs.into_iter().map(|c| -c).collect(),
            rhs: -rhs,
        });
        self
    }

    /// Equality from `(var, coeff)` pairs; repeated vars accumulate.
    pub fn add_eq_sparse(&mut self, terms: &[(usize, Rational)], rhs: Rational) -> &mut Self {
        let coeffs = self.densify(terms);
        self.add_eq(coeffs, rhs)
    }

    pub fn add_le_sparse(&mut self, terms: &[(usize, Rational)], rhs: Rational) -> &mut Self {
        let coeffs = self.densify(terms);
        self.add_le(coeffs, rhs)
    }

    pub fn add_ge_sparse(&mut self, terms: &[(usize, Rational)], rhs: Rational) -> &mut Self {
        let coeffs = self.densify(terms);
        self.add_ge(coeffs, rhs)
    }

    fn densify(&self, terms: &[(usize, Rational)]) -> Vec<Rational> {
        let mut v = vec![zero(); self.num_vars];
        for (j, c) in terms {
            v[*j] += c;
        }
        v
    }

    pub fn check_dimensions(&self) -> Result<(), LpError> {
        let n = self.num_vars;
        let bad = |what: &str, len: usize| {
            Err(LpError::DimensionMismatch(format!("{what} has length {len}, expected {n}")))
        };
        if self.objective.len() != n {
            return bad("objective", self.objective.len());
        }
        if self.lower.len() != n {
            return bad("lower bounds", self.lower.len());
        }
        if self.upper.len() != n {
            return bad("upper bounds", self.upper.len());
        }
        for (i, c) in self.equalities.iter().enumerate() {
            if c.coeffs.len() != n {
                return bad(&format!("equality {i}"), c.coeffs.len());
            }
        }
        for (i, c) in self.inequalities.iter().enumerate() {
            if c.coeffs.len() != n {
                return bad(&format!("inequality {i}"), c.coeffs.len());
            }
        }
        Ok(())
    }

    /// Whether `x` satisfies every constraint and bound exactly.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && self.equalities.iter().all(|c| dot(&c.coeffs, x) == c.rhs)
            && self.inequalities.iter().all(|c| dot(&c.coeffs, x) <= c.rhs)
            && x.iter().zip(&self.lower).all(|(v, l)| l.as_ref().is_none_or(|l| v >= l))
            && x.iter().zip(&self.upper).all(|(v, u)| u.as_ref().is_none_or(|u| v <= u))
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    pub fn solve(&self) -> Result<LpOutcome, LpError> {
        solve(self)
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// Multipliers for every row of an LP, in the orientation where each row
/// reads `row . x <= rhs`: equalities (any sign), inequalities, upper bounds
/// `x_j <= u_j`, and lower bounds `-x_j <= -l_j`. Entries for absent bounds
/// are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multipliers {
    pub eq: Vec<Rational>,
    pub ineq: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

impl Multipliers {
    /// `sum eq_i a_i + sum ineq_k g_k + upper - lower`, a vector over variables.
    pub fn combined_row(&self, lp: &LinearProgram) -> Vec<Rational> {
        let mut r = vec![zero(); lp.num_vars()];
        for (m, c) in self.eq.iter().zip(&lp.equalities).chain(self.ineq.iter().zip(&lp.inequalities)) {
            if m.is_zero() {
                continue;
            }
            for (rj, a) in r.iter_mut().zip(&c.coeffs) {
                if !a.is_zero() {
                    *rj += m * a;
                }
            }
        }
        for (j, rj) in r.iter_mut().enumerate() {
            *rj += &self.upper[j];
            *rj -= &self.lower[j];
        }
        r
    }

    /// `sum eq_i b_i + sum ineq_k h_k + sum upper_j u_j - sum lower_j l_j`.
    pub fn combined_rhs(&self, lp: &LinearProgram) -> Rational {
        let mut v: Rational = self
            .eq
            .iter()
            .zip(&lp.equalities)
            .chain(self.ineq.iter().zip(&lp.inequalities))
            .map(|(m, c)| m * &c.rhs)
            .sum();
        for j in 0..lp.num_vars() {
            if let Some(u) = &lp.upper[j] {
                v += &self.upper[j] * u;
            }
            if let Some(l) = &lp.lower[j] {
                v -= &self.lower[j] * l;
            }
        }
        v
    }
}

/// Farkas certificate: nonnegative multipliers (free on equalities) whose
/// combination of the rows gives `0 . x <= negative`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate(pub Multipliers);

/// Dual solution: `combined_row == objective` and `combined_rhs == value`,
/// which by weak duality proves the primal optimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate(pub Multipliers);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        primal: Vec<Rational>,
        value: Rational,
        dual: DualCertificate,
    },
    Infeasible {
        farkas: FarkasCertificate,
    },
    /// `point` is feasible and `point + t * ray` stays feasible for all
    /// `t >= 0` while the objective grows.
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible { .. } => LpStatus::Infeasible,
            LpOutcome::Unbounded { .. } => LpStatus::Unbounded,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn primal(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { primal, .. } => Some(primal),
            _ => None,
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.check_dimensions()?;
    Ok(simplex::StandardForm::build(lp).solve())
}
