//! Party/alphabet bookkeeping and the canonical table order.
//!
//! A table over a scenario is indexed by `(inputs, outputs)` with the input
//! tuple outermost. Inside each block, tuples are mixed-radix numbers with
//! party 0 as the most significant digit.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl Scenario {
    pub fn new(inputs: Vec<usize>, outputs: Vec<usize>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidScenario("need at least one party".into()));
        }
        if inputs.len() != outputs.len() {
            return Err(Error::InvalidScenario(format!(
                "{} input sizes but {} output sizes",
                inputs.len(),
                outputs.len()
            )));
        }
        if inputs.iter().chain(&outputs).any(|&n| n == 0) {
            return Err(Error::InvalidScenario("alphabet sizes must be >= 1".into()));
        }
        Ok(Scenario { inputs, outputs })
    }

    /// `parties` parties, each with `x` inputs and `a` outputs.
    pub fn uniform(parties: usize, x: usize, a: usize) -> Self {
        Scenario::new(vec![x; parties], vec![a; parties]).expect("valid uniform scenario")
    }

    /// The two-party, binary-input, binary-output scenario.
    pub fn chsh() -> Self {
        Scenario::uniform(2, 2, 2)
    }

    pub fn parties(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn is_2222(&self) -> bool {
        self.inputs == [2, 2] && self.outputs == [2, 2]
    }

    pub fn num_input_tuples(&self) -> usize {
        self.inputs.iter().product()
    }

    pub fn num_output_tuples(&self) -> usize {
        self.outputs.iter().product()
    }

    /// Number of table entries, `prod X_k * prod A_k`.
    pub fn table_len(&self) -> usize {
        self.num_input_tuples() * self.num_output_tuples()
    }

    /// Same size computed without overflow, for cap checks.
    pub fn table_len_u128(&self) -> u128 {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .fold(1u128, |acc, &n| acc.saturating_mul(n as u128))
    }

    pub fn input_index(&self, inputs: &[usize]) -> usize {
        encode(inputs, &self.inputs)
    }

    pub fn output_index(&self, outputs: &[usize]) -> usize {
        encode(outputs, &self.outputs)
    }

    pub fn entry_index(&self, inputs: &[usize], outputs: &[usize]) -> usize {
        self.input_index(inputs) * self.num_output_tuples() + self.output_index(outputs)
    }

    pub fn decode_inputs(&self, index: usize) -> Vec<usize> {
        decode(index, &self.inputs)
    }

    pub fn decode_outputs(&self, index: usize) -> Vec<usize> {
        decode(index, &self.outputs)
    }

    /// `(inputs, outputs)` for a flat table index.
    pub fn decode_entry(&self, index: usize) -> (Vec<usize>, Vec<usize>) {
        let n_out = self.num_output_tuples();
        (self.decode_inputs(index / n_out), self.decode_outputs(index % n_out))
    }

    pub fn input_tuples(&self) -> TupleIter<'_> {
        TupleIter::new(&self.inputs)
    }

    pub fn output_tuples(&self) -> TupleIter<'_> {
        TupleIter::new(&self.outputs)
    }

    /// All `(inputs, outputs)` pairs in table order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> + '_ {
        self.input_tuples()
            .flat_map(move |x| self.output_tuples().map(move |a| (x.clone(), a)))
    }

    /// Sub-scenario for the given parties, in the given order.
    pub fn restrict(&self, parties: &[usize]) -> Scenario {
        Scenario {
            inputs: parties.iter().map(|&k| self.inputs[k]).collect(),
            outputs: parties.iter().map(|&k| self.outputs[k]).collect(),
        }
    }

    /// Parties of `self` followed by parties of `other`.
    pub fn concat(&self, other: &Scenario) -> Scenario {
        Scenario {
            inputs: self.inputs.iter().chain(&other.inputs).copied().collect(),
            outputs: self.outputs.iter().chain(&other.outputs).copied().collect(),
        }
    }

    /// Copy of this scenario with one party's alphabet sizes replaced.
    pub fn with_party(&self, party: usize, inputs: usize, outputs: usize) -> Result<Scenario> {
        let mut s = self.clone();
        s.inputs[party] = inputs;
        s.outputs[party] = outputs;
        Scenario::new(s.inputs, s.outputs)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[usize]| v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "X=[{}] A=[{}]", join(&self.inputs), join(&self.outputs))
    }
}

/// Mixed-radix encoding, first digit most significant.
pub fn encode(digits: &[usize], radices: &[usize]) -> usize {
    debug_assert_eq!(digits.len(), radices.len());
    digits
        .iter()
        .zip(radices)
        .fold(0, |acc, (&d, &r)| {
            debug_assert!(d < r);
            acc * r + d
        })
}

pub fn decode(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; radices.len()];
    for (slot, &r) in digits.iter_mut().zip(radices).rev() {
        *slot = index % r;
        index /= r;
    }
    digits
}

/// Odometer over all digit tuples of a mixed radix, in encoding order.
pub struct TupleIter<'a> {
    radices: &'a [usize],
    next: Option<Vec<usize>>,
}

impl<'a> TupleIter<'a> {
    pub fn new(radices: &'a [usize]) -> Self {
        let next = if radices.contains(&0) {
            None
        } else {
            Some(vec![0; radices.len()])
        };
        TupleIter { radices, next }
    }
}

impl Iterator for TupleIter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for (d, &r) in succ.iter_mut().zip(self.radices).rev() {
            *d += 1;
            if *d < r {
                carried = false;
                break;
            }
            *d = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Ordered, nonempty set of party indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartySubset(Vec<usize>);

impl PartySubset {
    pub fn new(indices: Vec<usize>, parties: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::BadSubset("empty".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadSubset(format!("{indices:?} is not strictly increasing")));
        }
        if indices.iter().any(|&k| k >= parties) {
            return Err(Error::BadSubset(format!("{indices:?} exceeds {parties} parties")));
        }
        Ok(PartySubset(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// Parties not in the subset, increasing.
    pub fn complement(&self, parties: usize) -> Vec<usize> {
        (0..parties).filter(|k| !self.0.contains(k)).collect()
    }
}
