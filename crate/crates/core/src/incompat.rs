//! Compatibility of two observables of one party, the incompatibility
//! weight, and the entropy bounds it implies.

use crate::correlation::CorrelationBox;
use crate::error::{Error, Result};
use crate::lp::{FarkasCertificate, LinearProgram, LpOutcome};
use crate::polytope::{add_nonsignaling_rows, nonsignaling_rows, BlockTotal};
use crate::rational::{one, to_f64, zero, Rational};
use crate::scenario::Scenario;
use num_traits::Zero;

/// Comparison slack for the floating-point entropy checks.
pub const ENTROPY_SLACK: f64 = 1e-12;

/// Two inputs `y0 != y1` of `party` (0 for Alice, 1 for Bob).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ObservablePair {
    pub party: usize,
    pub y0: usize,
    pub y1: usize,
}

impl ObservablePair {
    pub fn new(party: usize, y0: usize, y1: usize) -> Self {
        ObservablePair { party, y0, y1 }
    }

    pub fn bob() -> Self {
        ObservablePair { party: 1, y0: 0, y1: 1 }
    }

    fn check(&self, b: &CorrelationBox) -> Result<()> {
        let s = b.scenario();
        if s.parties() != 2 {
            return Err(Error::ScenarioMismatch(format!("expected two parties, got {s}")));
        }
        if self.party > 1 {
            return Err(Error::BadPair(format!("party {} does not exist", self.party)));
        }
        let n = s.inputs()[self.party];
        if self.y0 == self.y1 || self.y0 >= n || self.y1 >= n {
            return Err(Error::BadPair(format!("inputs ({}, {}) must be distinct and below {n}", self.y0, self.y1)));
        }
        if let Some(w) = b.signaling_witness() {
            return Err(Error::SignalingBox(w.to_string()));
        }
        Ok(())
    }

    /// The box with the observed party second and its inputs restricted to
    /// `(y0, y1)`, renumbered `(0, 1)`.
    /// The box with the observed party second and its inputs `(y0, y1)`
    /// renumbered `(0, 1)`.
    pub fn restricted(&self, b: &CorrelationBox) -> Result<CorrelationBox> {
        self.check(b)?;
        let oriented = if self.party == 1 { b.clone() } else { b.permute_parties(&[1, 0])? };
        oriented.restrict_inputs(1, &[self.y0, self.y1])
    }
}

/// Joint distribution `P'(a, b0, b1 | x)` stored as a three-party box whose
/// second and third parties have a single input.
fn joint_scenario(restricted: &Scenario) -> Scenario {
    let (x, a, b) = (restricted.inputs()[0], restricted.outputs()[0], restricted.outputs()[1]);
    Scenario::new(vec![x, 1, 1], vec![a, b, b]).expect("sizes from a valid scenario")
}

/// Adds `sum_{b1} W = target(.., y = 0)` and `sum_{b0} W = target(.., y = 1)`
/// with `W` at LP offset 0 and `extra(i)` a variable added to row `i` of the
/// restricted table.
fn add_joint_marginal_rows(
    lp: &mut LinearProgram,
    joint: &Scenario,
    restricted: &CorrelationBox,
    extra: impl Fn(usize) -> Option<usize>,
) {
    let rs = restricted.scenario();
    let bn = rs.outputs()[1];
    for (i, (x, o)) in rs.entries().enumerate() {
        let mut terms: Vec<(usize, Rational)> = (0..bn)
            .map(|other| {
                let (b0, b1) = if x[1] == 0 { (o[1], other) } else { (other, o[1]) };
                (joint.entry_index(&[x[0], 0, 0], &[o[0], b0, b1]), one())
            })
            .collect();
        if let Some(v) = extra(i) {
            terms.push((v, one()));
        }
        lp.add_eq_sparse(&terms, restricted.table()[i].clone());
    }
}

/// Tables on the restricted scenario from the two-copy marginals of `w`.
fn joint_marginals(joint: &CorrelationBox, restricted: &Scenario) -> Vec<Rational> {
    let bn = restricted.outputs()[1];
    restricted
        .entries()
        .map(|(x, o)| {
            (0..bn)
                .map(|other| {
                    let (b0, b1) = if x[1] == 0 { (o[1], other) } else { (other, o[1]) };
                    joint.get(&[x[0], 0, 0], &[o[0], b0, b1]).clone()
                })
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compatibility {
    /// `P'(a, b0, b1 | x)` with the stated marginals.
    Compatible(CorrelationBox),
    Incompatible(FarkasCertificate),
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible(_))
    }
}

/// LP for the joint distribution: box constraints, `sum_a P'` independent
/// of `x`, and the two marginal families.
pub fn compatibility_lp(b: &CorrelationBox, pair: &ObservablePair) -> Result<LinearProgram> {
    let restricted = pair.restricted(b)?;
    let joint = joint_scenario(restricted.scenario());
    let mut lp = LinearProgram::new(joint.table_len());
    add_nonsignaling_rows(&mut lp, &joint, 0, BlockTotal::One);
    add_joint_marginal_rows(&mut lp, &joint, &restricted, |_| None);
    Ok(lp)
}

pub fn is_compatible(b: &CorrelationBox, pair: &ObservablePair) -> Result<Compatibility> {
    let lp = compatibility_lp(b, pair)?;
    let joint = joint_scenario(pair.restricted(b)?.scenario());
    match lp.solve()? {
        LpOutcome::Optimal { primal, .. } => Ok(Compatibility::Compatible(CorrelationBox::from_parts_unchecked(joint, primal))),
        LpOutcome::Infeasible { farkas } => Ok(Compatibility::Incompatible(farkas)),
        LpOutcome::Unbounded { .. } => Err(Error::Internal("feasibility LP reported unbounded".into())),
    }
}

/// Checks a joint distribution against the box without solving anything.
pub fn verify_joint(b: &CorrelationBox, pair: &ObservablePair, joint: &CorrelationBox) -> Result<bool> {
    let restricted = pair.restricted(b)?;
    Ok(joint.scenario() == &joint_scenario(restricted.scenario())
        && joint.is_nonsignaling()
        && joint_marginals(joint, restricted.scenario()) == restricted.table())
}

/// Optimal split `P = eta P_INC + (1 - eta) P_COM` on the restricted box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompatibilityResult {
    pub eta: Rational,
    /// The restricted box: observed party second, inputs `(y0, y1)` as `(0, 1)`.
    pub restricted: CorrelationBox,
    /// `eta P_INC`: nonnegative, nonsignaling, block sums `eta`.
    pub incompatible_part: Vec<Rational>,
    /// `(1 - eta) P'`: subnormalized joint distribution of `b0, b1`.
    pub compatible_joint: Vec<Rational>,
}

impl IncompatibilityResult {
    /// Re-checks the decomposition exactly.
    pub fn verify(&self) -> bool {
        let rs = self.restricted.scenario();
        let joint = joint_scenario(rs);
        if self.incompatible_part.len() != rs.table_len() || self.compatible_joint.len() != joint.table_len() {
            return false;
        }
        let nonneg = |t: &[Rational]| t.iter().all(|v| *v >= zero());
        let ns = |s: &Scenario, t: &[Rational]| {
            nonsignaling_rows(s)
                .iter()
                .all(|row| row.iter().map(|(i, c)| c * &t[*i]).sum::<Rational>().is_zero())
        };
        let n_out = rs.num_output_tuples();
        let blocks_ok = (0..rs.num_input_tuples())
            .all(|k| self.incompatible_part[k * n_out..(k + 1) * n_out].iter().sum::<Rational>() == self.eta);
        let w = CorrelationBox::from_parts_unchecked(joint.clone(), self.compatible_joint.clone());
        let sum: Vec<Rational> = joint_marginals(&w, rs)
            .into_iter()
            .zip(&self.incompatible_part)
            .map(|(m, s)| m + s)
            .collect();
        nonneg(&self.incompatible_part)
            && nonneg(&self.compatible_joint)
            && ns(rs, &self.incompatible_part)
            && ns(&joint, &self.compatible_joint)
            && blocks_ok
            && sum == self.restricted.table()
    }
}

/// Minimizes the weight `eta` of a nonsignaling part that must be removed
/// for the remaining part to admit a joint distribution of `b0, b1`.
pub fn incompatibility(b: &CorrelationBox, pair: &ObservablePair) -> Result<IncompatibilityResult> {
    let restricted = pair.restricted(b)?;
    let rs = restricted.scenario().clone();
    let joint = joint_scenario(&rs);
    let nw = joint.table_len();
    let ns = rs.table_len();
    let eta = nw + ns;
    let mut lp = LinearProgram::new(eta + 1);
    for row in nonsignaling_rows(&joint) {
        lp.add_eq_sparse(&row, zero());
    }
    add_nonsignaling_rows(&mut lp, &rs, nw, BlockTotal::Var(eta));
    add_joint_marginal_rows(&mut lp, &joint, &restricted, |i| Some(nw + i));
    let mut obj = vec![zero(); eta + 1];
    obj[eta] = -one();
    lp.set_objective(obj);
    match lp.solve()? {
        LpOutcome::Optimal { primal, .. } => Ok(IncompatibilityResult {
            eta: primal[eta].clone(),
            restricted,
            incompatible_part: primal[nw..nw + ns].to_vec(),
            compatible_joint: primal[..nw].to_vec(),
        }),
        other => Err(Error::Internal(format!("incompatibility LP returned {:?}", other.status()))),
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    shannon(&[p, 1.0 - p])
}

fn shannon(ps: &[f64]) -> f64 {
    ps.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Entropy in bits of `party`'s output at `input`.
pub fn output_entropy(b: &CorrelationBox, party: usize, input: usize) -> Result<f64> {
    let dist = b.party_distribution(party, input)?;
    Ok(shannon(&dist.iter().map(to_f64).collect::<Vec<_>>()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub inc: Rational,
    pub h0: f64,
    pub h1: f64,
    /// `h(inc / 2)`.
    pub bound: f64,
    pub holds0: bool,
    pub holds1: bool,
}

impl EntropyReport {
    pub fn holds(&self) -> bool {
        self.holds0 && self.holds1
    }
}

/// `H(b0) >= h(inc/2)` and `H(b1) >= h(inc/2)`, for binary outputs or
/// binary inputs.
pub fn entropy_bound_check(b: &CorrelationBox, pair: &ObservablePair) -> Result<EntropyReport> {
    pair.check(b)?;
    let s = b.scenario();
    let binary_outputs = s.outputs().iter().all(|&a| a == 2);
    let binary_inputs = s.inputs().iter().all(|&x| x == 2);
    if !binary_outputs && !binary_inputs {
        return Err(Error::OutOfScope(format!("entropy bounds need binary outputs or binary inputs, got {s}")));
    }
    let inc = incompatibility(b, pair)?.eta;
    let h0 = output_entropy(b, pair.party, pair.y0)?;
    let h1 = output_entropy(b, pair.party, pair.y1)?;
    let bound = binary_entropy(to_f64(&inc) / 2.0);
    Ok(EntropyReport {
        inc,
        h0,
        h1,
        bound,
        holds0: h0 + ENTROPY_SLACK >= bound,
        holds1: h1 + ENTROPY_SLACK >= bound,
    })
}
