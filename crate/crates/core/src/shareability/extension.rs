use crate::correlation::CorrelationBox;
use crate::error::{Error, Result};
use crate::locality::LocalModel;
use crate::lp::{FarkasCertificate, LinearProgram, LpOutcome};
use crate::polytope::{add_nonsignaling_rows, BlockTotal, DeterministicStrategy};
use crate::rational::{one, zero, Rational};
use crate::scenario::{Scenario, TupleIter};
use num_traits::Zero;

/// Largest extension table the LP will be built for.
pub const EXTENSION_CAP: u128 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SharedParty {
    A,
    B,
}

impl SharedParty {
    pub fn index(self) -> usize {
        match self {
            SharedParty::A => 0,
            SharedParty::B => 1,
        }
    }
}

/// Does `base` admit `copies` symmetric copies of `shared_party`?
///
/// Extensions are laid out as `(kept party, copy 1, ..., copy m)`, so when
/// Alice is shared Bob comes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionProblem {
    pub base: CorrelationBox,
    pub shared_party: SharedParty,
    pub copies: usize,
}

impl ExtensionProblem {
    pub fn new(base: CorrelationBox, shared_party: SharedParty, copies: usize) -> Result<Self> {
        if base.scenario().parties() != 2 {
            return Err(Error::ScenarioMismatch(format!("extension base must be bipartite, got {}", base.scenario())));
        }
        if copies == 0 {
            return Err(Error::BadParams("copies must be at least 1".into()));
        }
        if let Some(w) = base.signaling_witness() {
            return Err(Error::SignalingBox(w.to_string()));
        }
        Ok(ExtensionProblem { base, shared_party, copies })
    }

    /// The base with the kept party first and the shared party second.
    pub fn oriented_base(&self) -> CorrelationBox {
        orient(&self.base, self.shared_party)
    }

    pub fn extension_scenario(&self) -> Scenario {
        extension_scenario(self.oriented_base().scenario(), self.copies)
    }
}

fn orient(base: &CorrelationBox, shared: SharedParty) -> CorrelationBox {
    match shared {
        SharedParty::B => base.clone(),
        SharedParty::A => base.permute_parties(&[1, 0]).expect("two-party swap"),
    }
}

fn extension_scenario(oriented: &Scenario, m: usize) -> Scenario {
    let mut inputs = vec![oriented.inputs()[0]];
    let mut outputs = vec![oriented.outputs()[0]];
    inputs.extend(std::iter::repeat_n(oriented.inputs()[1], m));
    outputs.extend(std::iter::repeat_n(oriented.outputs()[1], m));
    Scenario::new(inputs, outputs).expect("sizes come from a valid scenario")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionWitness {
    Extension(CorrelationBox),
    Infeasible(FarkasCertificate),
}

impl ExtensionWitness {
    pub fn is_feasible(&self) -> bool {
        matches!(self, ExtensionWitness::Extension(_))
    }
}

/// Copy of `(x, a)` with copy slots `i` and `i + 1` (parties `1 + i`, `2 + i`) exchanged.
fn swap_copies(x: &[usize], a: &[usize], i: usize) -> (Vec<usize>, Vec<usize>) {
    let (mut x, mut a) = (x.to_vec(), a.to_vec());
    x.swap(1 + i, 2 + i);
    a.swap(1 + i, 2 + i);
    (x, a)
}

/// The feasibility LP whose variables are the extension entries: box
/// constraints, nonsignaling, symmetry under adjacent copy swaps, and the
/// first copy's marginal equal to the base. The other marginals follow
/// from symmetry.
pub fn extension_lp(problem: &ExtensionProblem) -> Result<LinearProgram> {
    let ext = problem.extension_scenario();
    let entries = ext.table_len_u128();
    if entries > EXTENSION_CAP {
        return Err(Error::ExtensionTooLarge { entries, cap: EXTENSION_CAP });
    }
    let base = problem.oriented_base();
    let mut lp = LinearProgram::new(ext.table_len());
    add_nonsignaling_rows(&mut lp, &ext, 0, BlockTotal::One);
    add_symmetry_rows(&mut lp, &ext, problem.copies);
    add_marginal_rows(&mut lp, &ext, &base, None);
    Ok(lp)
}

pub(crate) fn add_symmetry_rows(lp: &mut LinearProgram, ext: &Scenario, m: usize) {
    for i in 0..m.saturating_sub(1) {
        for (idx, (x, a)) in ext.entries().enumerate() {
            let (sx, sa) = swap_copies(&x, &a, i);
            let other = ext.entry_index(&sx, &sa);
            if idx < other {
                lp.add_eq_sparse(&[(idx, one()), (other, -one())], zero());
            }
        }
    }
}

/// Rows forcing the (party 0, party 1) marginal of the extension, read at
/// input 0 for the remaining copies, to equal `base + t * dir`, where `t` is
/// LP variable `param.0` and `dir` is `param.1`; without `param`, `t = 0`.
pub(crate) fn add_marginal_rows(
    lp: &mut LinearProgram,
    ext: &Scenario,
    base: &CorrelationBox,
    param: Option<(usize, &[Rational])>,
) {
    let rest_radices: Vec<usize> = ext.outputs()[2..].to_vec();
    let rest_len = rest_radices.len();
    for (i, (x, a)) in base.scenario().entries().enumerate() {
        let mut fx = x.clone();
        fx.extend(std::iter::repeat_n(0, rest_len));
        let mut terms: Vec<(usize, Rational)> = TupleIter::new(&rest_radices)
            .map(|rest| {
                let mut fa = a.clone();
                fa.extend(rest);
                (ext.entry_index(&fx, &fa), one())
            })
            .collect();
        if let Some((t, dir)) = param {
            if !dir[i].is_zero() {
                terms.push((t, -dir[i].clone()));
            }
        }
        lp.add_eq_sparse(&terms, base.table()[i].clone());
    }
}

pub fn is_m_shareable(problem: &ExtensionProblem) -> Result<ExtensionWitness> {
    let lp = extension_lp(problem)?;
    match lp.solve()? {
        LpOutcome::Optimal { primal, .. } => {
            let ext = CorrelationBox::from_parts_unchecked(problem.extension_scenario(), primal);
            debug_assert!(validate_extension(&ext, &problem.base, problem.shared_party, problem.copies).is_ok());
            Ok(ExtensionWitness::Extension(ext))
        }
        LpOutcome::Infeasible { farkas } => Ok(ExtensionWitness::Infeasible(farkas)),
        LpOutcome::Unbounded { .. } => Err(Error::Internal("feasibility LP reported unbounded".into())),
    }
}

/// Checks the extension invariants exactly: shape, nonsignaling, symmetry
/// under every permutation of the copies, and every copy marginal.
pub fn validate_extension(ext: &CorrelationBox, base: &CorrelationBox, shared: SharedParty, m: usize) -> Result<()> {
    let oriented = orient(base, shared);
    let want = extension_scenario(oriented.scenario(), m);
    if ext.scenario() != &want {
        return Err(Error::NotAnExtension(format!("scenario {} but expected {want}", ext.scenario())));
    }
    if let Some(w) = ext.signaling_witness() {
        return Err(Error::NotAnExtension(format!("signaling: {w}")));
    }
    let s = ext.scenario();
    for i in 0..m.saturating_sub(1) {
        for (idx, (x, a)) in s.entries().enumerate() {
            let (sx, sa) = swap_copies(&x, &a, i);
            if ext.table()[idx] != ext.table()[s.entry_index(&sx, &sa)] {
                return Err(Error::NotAnExtension(format!("not symmetric under swapping copies {} and {}", i + 1, i + 2)));
            }
        }
    }
    for copy in 1..=m {
        if ext.marginal_of(&[0, copy])? != oriented {
            return Err(Error::NotAnExtension(format!("marginal of copy {copy} differs from the base")));
        }
    }
    Ok(())
}

/// Local model for the base restricted to the shared party's inputs
/// `y_values` (renumbered `0..m`), built from an `m`-extension: the hidden
/// variable is the string of copy outputs at those inputs, the shared party
/// answers `b_j` at input `j`, and the other party's stochastic response is
/// expanded into deterministic strategies.
pub fn local_model_from_extension(
    ext: &CorrelationBox,
    base: &CorrelationBox,
    shared: SharedParty,
    y_values: &[usize],
) -> Result<(CorrelationBox, LocalModel)> {
    let m = y_values.len();
    validate_extension(ext, base, shared, m)?;
    let oriented = orient(base, shared);
    let os = oriented.scenario();
    let (xn, an, bn) = (os.inputs()[0], os.outputs()[0], os.outputs()[1]);
    let mut seen = vec![false; os.inputs()[1]];
    for &y in y_values {
        if y >= seen.len() || std::mem::replace(&mut seen[y], true) {
            return Err(Error::BadParams(format!("restricted inputs {y_values:?} must be distinct and below {}", seen.len())));
        }
    }
    let restricted = oriented.restrict_inputs(1, y_values)?;
    let rs = restricted.scenario().clone();
    let s = ext.scenario();

    let copy_radices = vec![bn; m];
    let alice_radices = vec![an; xn];
    let mut strategies = Vec::new();
    let mut weights = Vec::new();
    for bs in TupleIter::new(&copy_radices) {
        let joint_at = |x: usize, a: usize| -> &Rational {
            let mut fx = vec![x];
            fx.extend_from_slice(y_values);
            let mut fa = vec![a];
            fa.extend_from_slice(&bs);
            &ext.table()[s.entry_index(&fx, &fa)]
        };
        let pe: Rational = (0..an).map(|a| joint_at(0, a)).sum();
        if pe.is_zero() {
            continue;
        }
        let alice: Vec<Vec<Rational>> = (0..xn)
            .map(|x| (0..an).map(|a| joint_at(x, a) / &pe).collect())
            .collect();
        for choice in TupleIter::new(&alice_radices) {
            let w: Rational = choice.iter().enumerate().map(|(x, &a)| alice[x][a].clone()).product();
            if w.is_zero() {
                continue;
            }
            strategies.push(DeterministicStrategy { responses: vec![choice.clone(), bs.clone()] });
            weights.push(w * &pe);
        }
    }
    let model = LocalModel::new(strategies, weights)?;
    if !model.reproduces(&restricted) {
        return Err(Error::NotAnExtension("extension does not reproduce the restricted box".into()));
    }
    debug_assert_eq!(model.reconstruct(&rs)?, restricted);
    Ok((restricted, model))
}

/// The extension `sum_e P(e) P(a|x,e) P(b_1|y_1,e) ... P(b_m|y_m,e)` of a
/// local model, copying the `shared` party's response `m` times.
pub fn infinite_shareability_extension(model: &LocalModel, base: &Scenario, shared: SharedParty, m: usize) -> Result<CorrelationBox> {
    if base.parties() != 2 || m == 0 {
        return Err(Error::BadParams("need a bipartite scenario and m >= 1".into()));
    }
    let oriented = match shared {
        SharedParty::B => base.clone(),
        SharedParty::A => base.restrict(&[1, 0]),
    };
    let ext = extension_scenario(&oriented, m);
    let mut table = vec![zero(); ext.table_len()];
    for (d, w) in model.strategies().iter().zip(model.weights()) {
        if d.responses.len() != 2 {
            return Err(Error::ScenarioMismatch("model is not bipartite".into()));
        }
        let (keep, copy) = match shared {
            SharedParty::B => (&d.responses[0], &d.responses[1]),
            SharedParty::A => (&d.responses[1], &d.responses[0]),
        };
        for x in ext.input_tuples() {
            let mut a = vec![keep[x[0]]];
            a.extend(x[1..].iter().map(|&y| copy[y]));
            table[ext.entry_index(&x, &a)] += w;
        }
    }
    Ok(CorrelationBox::from_parts_unchecked(ext, table))
}

/// Whether a perfect cloner for Bob's system producing `m` clones is
/// consistent with `b`.
pub fn clone_feasibility(b: &CorrelationBox, m: usize) -> Result<ExtensionWitness> {
    is_m_shareable(&ExtensionProblem::new(b.clone(), SharedParty::B, m)?)
}
