//! The [`CorrelationBox`] data model: a conditional probability table
//! `P(a_1..a_n | x_1..x_n)` over a [`Scenario`], stored densely in canonical
//! order with exact rational entries.

use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};
use crate::scenario::{PartySubset, Scenario};
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorrelationBox {
    scenario: Scenario,
    table: Vec<Rational>,
}

/// First violated nonsignaling equality found by
/// [`CorrelationBox::signaling_witness`].
#[derive(Debug, Clone, PartialEq)]
pub struct SignalingWitness {
    pub party: usize,
    /// Full input tuple, with `inputs[party]` the first compared input.
    pub inputs: Vec<usize>,
    /// The other value of `x_party` that gives a different traced sum.
    pub alt_input: usize,
    /// Outputs of the remaining parties (party `party` removed).
    pub other_outputs: Vec<usize>,
    pub sum: Rational,
    pub alt_sum: Rational,
}

impl std::fmt::Display for SignalingWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "party {} inputs {:?}: tracing out its output gives {} at x={} but {} at x={} (other outputs {:?})",
            self.party,
            self.inputs,
            self.sum,
            self.inputs[self.party],
            self.alt_sum,
            self.alt_input,
            self.other_outputs
        )
    }
}

/// Checks nonnegativity and per-input normalization, then wraps the table.
pub fn validate_box(table: Vec<Rational>, scenario: &Scenario) -> Result<CorrelationBox> {
    CorrelationBox::new(scenario.clone(), table)
}

impl CorrelationBox {
    pub fn new(scenario: Scenario, table: Vec<Rational>) -> Result<Self> {
        if table.len() != scenario.table_len() {
            return Err(Error::TableSize {
                expected: scenario.table_len(),
                got: table.len(),
            });
        }
        if let Some((index, value)) = table.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(Error::NegativeEntry {
                index,
                value: value.clone(),
            });
        }
        let n_out = scenario.num_output_tuples();
        for (block, chunk) in table.chunks(n_out).enumerate() {
            let sum: Rational = chunk.iter().sum();
            if sum != one() {
                return Err(Error::NormalizationFailure {
                    inputs: scenario.decode_inputs(block),
                    sum,
                });
            }
        }
        Ok(CorrelationBox { scenario, table })
    }

    /// Builds a box from `f(inputs, outputs)`, validating the result.
    pub fn from_fn(
        scenario: Scenario,
        mut f: impl FnMut(&[usize], &[usize]) -> Rational,
    ) -> Result<Self> {
        let table = scenario.entries().map(|(x, a)| f(&x, &a)).collect();
        CorrelationBox::new(scenario, table)
    }

    /// Uniform noise: every output tuple has probability `1 / prod A_k`.
    pub fn uniform(scenario: Scenario) -> Self {
        let p = Rational::new(1.into(), (scenario.num_output_tuples() as i64).into());
        let table = vec![p; scenario.table_len()];
        CorrelationBox { scenario, table }
    }

    /// Point-mass box where party `k` answers `responses[k][x_k]`.
    pub fn deterministic(scenario: Scenario, responses: &[Vec<usize>]) -> Result<Self> {
        if responses.len() != scenario.parties()
            || responses
                .iter()
                .zip(scenario.inputs().iter().zip(scenario.outputs()))
                .any(|(r, (&x, &a))| r.len() != x || r.iter().any(|&v| v >= a))
        {
            return Err(Error::BadParams("response table does not fit scenario".into()));
        }
        CorrelationBox::from_fn(scenario, |x, a| {
            let hit = x.iter().zip(a).enumerate().all(|(k, (&xk, &ak))| responses[k][xk] == ak);
            if hit {
                one()
            } else {
                zero()
            }
        })
    }

    /// Wraps a table without validation. Callers guarantee the invariants.
    pub(crate) fn from_parts_unchecked(scenario: Scenario, table: Vec<Rational>) -> Self {
        debug_assert_eq!(table.len(), scenario.table_len());
        CorrelationBox { scenario, table }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn into_table(self) -> Vec<Rational> {
        self.table
    }

    pub fn get(&self, inputs: &[usize], outputs: &[usize]) -> &Rational {
        &self.table[self.scenario.entry_index(inputs, outputs)]
    }

    pub fn is_nonsignaling(&self) -> bool {
        self.signaling_witness().is_none()
    }

    /// `None` when every single-party traced marginal is independent of that
    /// party's input; otherwise the first violated equality in canonical order.
    /// The single-party conditions imply the conditions for every subset.
    pub fn signaling_witness(&self) -> Option<SignalingWitness> {
        let s = &self.scenario;
        for k in 0..s.parties() {
            let others: Vec<usize> = (0..s.parties()).filter(|&j| j != k).collect();
            let other_radices: Vec<usize> = others.iter().map(|&j| s.outputs()[j]).collect();
            for x in s.input_tuples().filter(|x| x[k] == 0) {
                let reference = self.traced(&x, &others, &other_radices);
                for alt in 1..s.inputs()[k] {
                    let mut x_alt = x.clone();
                    x_alt[k] = alt;
                    let traced = self.traced(&x_alt, &others, &other_radices);
                    if let Some(pos) = reference.iter().zip(&traced).position(|(p, q)| p != q) {
                        return Some(SignalingWitness {
                            party: k,
                            inputs: x.clone(),
                            alt_input: alt,
                            other_outputs: crate::scenario::decode(pos, &other_radices),
                            sum: reference[pos].clone(),
                            alt_sum: traced[pos].clone(),
                        });
                    }
                }
            }
        }
        None
    }

    /// `sum_{a_k} P(a | x)` for every output tuple of the other parties.
    fn traced(&self, x: &[usize], others: &[usize], radices: &[usize]) -> Vec<Rational> {
        let s = &self.scenario;
        let base = s.input_index(x) * s.num_output_tuples();
        let mut out = vec![zero(); radices.iter().product()];
        for (o, a) in s.output_tuples().enumerate() {
            let rest: Vec<usize> = others.iter().map(|&j| a[j]).collect();
            out[crate::scenario::encode(&rest, radices)] += &self.table[base + o];
        }
        out
    }

    fn require_nonsignaling(&self) -> Result<()> {
        match self.signaling_witness() {
            None => Ok(()),
            Some(w) => Err(Error::SignalingBox(w.to_string())),
        }
    }

    /// Sums out the complement of `keep`, with the complement's inputs fixed
    /// to `complement_inputs` (in increasing party order).
    fn sum_out(&self, keep: &[usize], complement_inputs: &[usize]) -> Vec<Rational> {
        let s = &self.scenario;
        let sub = s.restrict(keep);
        let complement: Vec<usize> = (0..s.parties()).filter(|k| !keep.contains(k)).collect();
        let mut out = vec![zero(); sub.table_len()];
        let mut full_x = vec![0; s.parties()];
        for (&j, &xj) in complement.iter().zip(complement_inputs) {
            full_x[j] = xj;
        }
        for (si, xs) in sub.input_tuples().enumerate() {
            for (&k, &xk) in keep.iter().zip(&xs) {
                full_x[k] = xk;
            }
            let base = s.input_index(&full_x) * s.num_output_tuples();
            let out_base = si * sub.num_output_tuples();
            for (o, a) in s.output_tuples().enumerate() {
                let kept: Vec<usize> = keep.iter().map(|&k| a[k]).collect();
                out[out_base + sub.output_index(&kept)] += &self.table[base + o];
            }
        }
        out
    }

    /// Marginal on `subset`. Only defined for nonsignaling boxes.
    pub fn marginal(&self, subset: &PartySubset) -> Result<Self> {
        self.require_nonsignaling()?;
        let n = self.scenario.parties();
        if subset.indices().iter().any(|&k| k >= n) {
            return Err(Error::BadSubset(format!("{:?} for {n} parties", subset.indices())));
        }
        let complement = subset.complement(n);
        let table = self.sum_out(subset.indices(), &vec![0; complement.len()]);
        debug_assert_eq!(
            table,
            self.sum_out(
                subset.indices(),
                &complement.iter().map(|&j| self.scenario.inputs()[j] - 1).collect::<Vec<_>>()
            )
        );
        Ok(CorrelationBox::from_parts_unchecked(
            self.scenario.restrict(subset.indices()),
            table,
        ))
    }

    /// Marginal on the listed parties (convenience wrapper around [`marginal`](Self::marginal)).
    pub fn marginal_of(&self, parties: &[usize]) -> Result<Self> {
        self.marginal(&PartySubset::new(parties.to_vec(), self.scenario.parties())?)
    }

    /// Output distribution of one party at one input.
    pub fn party_distribution(&self, party: usize, input: usize) -> Result<Vec<Rational>> {
        let m = self.marginal_of(&[party])?;
        let n_out = m.scenario.num_output_tuples();
        Ok(m.table[input * n_out..(input + 1) * n_out].to_vec())
    }

    /// Box of the remaining parties after party `k` used input `x_k` and
    /// observed `a_k`.
    pub fn condition(&self, k: usize, x_k: usize, a_k: usize) -> Result<Self> {
        let s = &self.scenario;
        if s.parties() < 2 {
            return Err(Error::BadParams("cannot condition a one-party box".into()));
        }
        if k >= s.parties() || x_k >= s.inputs()[k] || a_k >= s.outputs()[k] {
            return Err(Error::BadParams(format!("event (party {k}, x={x_k}, a={a_k}) out of range")));
        }
        let rest: Vec<usize> = (0..s.parties()).filter(|&j| j != k).collect();
        let sub = s.restrict(&rest);
        let mut table = Vec::with_capacity(sub.table_len());
        for xs in sub.input_tuples() {
            let mut full_x = Vec::with_capacity(s.parties());
            full_x.extend_from_slice(&xs[..k]);
            full_x.push(x_k);
            full_x.extend_from_slice(&xs[k..]);
            let mut block = Vec::with_capacity(sub.num_output_tuples());
            for a_rest in sub.output_tuples() {
                let mut full_a = Vec::with_capacity(s.parties());
                full_a.extend_from_slice(&a_rest[..k]);
                full_a.push(a_k);
                full_a.extend_from_slice(&a_rest[k..]);
                block.push(self.get(&full_x, &full_a).clone());
            }
            let weight: Rational = block.iter().sum();
            if weight.is_zero() {
                return Err(Error::ZeroProbabilityCondition);
            }
            table.extend(block.into_iter().map(|v| v / &weight));
        }
        Ok(CorrelationBox::from_parts_unchecked(sub, table))
    }

    /// Product box on the concatenated scenario.
    pub fn tensor(&self, other: &CorrelationBox) -> Self {
        let s = self.scenario.concat(&other.scenario);
        let n1 = self.scenario.parties();
        let table = s
            .entries()
            .map(|(x, a)| self.get(&x[..n1], &a[..n1]) * other.get(&x[n1..], &a[n1..]))
            .collect();
        CorrelationBox::from_parts_unchecked(s, table)
    }

    /// Reorders parties: party `i` of the result is party `order[i]` of `self`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<Self> {
        let n = self.scenario.parties();
        check_permutation(order, n, "party order")?;
        let s = self.scenario.restrict(order);
        let table = s
            .entries()
            .map(|(x, a)| {
                let mut ox = vec![0; n];
                let mut oa = vec![0; n];
                for (i, &k) in order.iter().enumerate() {
                    ox[k] = x[i];
                    oa[k] = a[i];
                }
                self.get(&ox, &oa).clone()
            })
            .collect();
        Ok(CorrelationBox::from_parts_unchecked(s, table))
    }

    /// Keeps only the listed inputs of `party`, renumbered `0..inputs.len()`.
    pub fn restrict_inputs(&self, party: usize, inputs: &[usize]) -> Result<Self> {
        let s = &self.scenario;
        if party >= s.parties()
            || inputs.is_empty()
            || inputs.iter().any(|&x| x >= s.inputs()[party])
        {
            return Err(Error::BadParams(format!("cannot restrict party {party} to inputs {inputs:?}")));
        }
        let sub = s.with_party(party, inputs.len(), s.outputs()[party])?;
        let table = sub
            .entries()
            .map(|(mut x, a)| {
                x[party] = inputs[x[party]];
                self.get(&x, &a).clone()
            })
            .collect();
        Ok(CorrelationBox::from_parts_unchecked(sub, table))
    }

    /// Applies local reversible relabelings.
    pub fn relabel(&self, r: &Relabeling) -> Result<Self> {
        r.check(&self.scenario)?;
        let s = &self.scenario;
        let mut table = vec![zero(); s.table_len()];
        for (i, (x, a)) in s.entries().enumerate() {
            table[r.image_index(s, &x, &a)] = self.table[i].clone();
        }
        Ok(CorrelationBox::from_parts_unchecked(s.clone(), table))
    }

    /// Convex combination `sum_i w_i P_i`.
    pub fn mix(parts: &[(&CorrelationBox, Rational)]) -> Result<Self> {
        let (first, _) = parts
            .first()
            .ok_or_else(|| Error::WeightError("empty mixture".into()))?;
        if let Some((b, _)) = parts.iter().find(|(b, _)| b.scenario != first.scenario) {
            return Err(Error::ScenarioMismatch(format!(
                "{} vs {}",
                first.scenario, b.scenario
            )));
        }
        if parts.iter().any(|(_, w)| w.is_negative()) {
            return Err(Error::WeightError("negative weight".into()));
        }
        let total: Rational = parts.iter().map(|(_, w)| w).sum();
        if total != one() {
            return Err(Error::WeightError(format!("weights sum to {total}")));
        }
        let mut table = vec![zero(); first.table.len()];
        for (b, w) in parts {
            if w.is_zero() {
                continue;
            }
            for (t, v) in table.iter_mut().zip(&b.table) {
                *t += v * w;
            }
        }
        Ok(CorrelationBox::from_parts_unchecked(first.scenario.clone(), table))
    }

    /// Whether every conditional distribution is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.table.iter().all(|v| v.is_zero() || *v == one())
    }
}

fn check_permutation(p: &[usize], n: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; n];
    if p.len() != n {
        return Err(Error::BadPermutation(format!("{what} {p:?} has wrong length, want {n}")));
    }
    for &v in p {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::BadPermutation(format!("{what} {p:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// Local reversible relabeling: party `k` maps input `x` to
/// `input_perms[k][x]` and, given original input `x`, output `a` to
/// `output_perms[k][x][a]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relabeling {
    pub input_perms: Vec<Vec<usize>>,
    pub output_perms: Vec<Vec<Vec<usize>>>,
}

impl Relabeling {
    pub fn identity(s: &Scenario) -> Self {
        Relabeling {
            input_perms: s.inputs().iter().map(|&x| (0..x).collect()).collect(),
            output_perms: s
                .inputs()
                .iter()
                .zip(s.outputs())
                .map(|(&x, &a)| vec![(0..a).collect(); x])
                .collect(),
        }
    }

    pub fn check(&self, s: &Scenario) -> Result<()> {
        if self.input_perms.len() != s.parties() || self.output_perms.len() != s.parties() {
            return Err(Error::BadPermutation("one permutation set per party required".into()));
        }
        for k in 0..s.parties() {
            check_permutation(&self.input_perms[k], s.inputs()[k], "input permutation")?;
            if self.output_perms[k].len() != s.inputs()[k] {
                return Err(Error::BadPermutation(format!(
                    "party {k} needs one output permutation per input"
                )));
            }
            for p in &self.output_perms[k] {
                check_permutation(p, s.outputs()[k], "output permutation")?;
            }
        }
        Ok(())
    }

    /// Table index that entry `(x, a)` is moved to.
    pub fn image_index(&self, s: &Scenario, x: &[usize], a: &[usize]) -> usize {
        let nx: Vec<usize> = x.iter().enumerate().map(|(k, &xk)| self.input_perms[k][xk]).collect();
        let na: Vec<usize> = a
            .iter()
            .enumerate()
            .map(|(k, &ak)| self.output_perms[k][x[k]][ak])
            .collect();
        s.entry_index(&nx, &na)
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &Relabeling) -> Relabeling {
        let input_perms = first
            .input_perms
            .iter()
            .zip(&self.input_perms)
            .map(|(p, q)| p.iter().map(|&v| q[v]).collect())
            .collect();
        let output_perms = first
            .output_perms
            .iter()
            .enumerate()
            .map(|(k, per_x)| {
                per_x
                    .iter()
                    .enumerate()
                    .map(|(x, p)| {
                        let x_mid = first.input_perms[k][x];
                        p.iter().map(|&v| self.output_perms[k][x_mid][v]).collect()
                    })
                    .collect()
            })
            .collect();
        Relabeling {
            input_perms,
            output_perms,
        }
    }
}
