//! Building blocks shared by the LP-based modules: deterministic strategies
//! (vertices of the local polytope), the nonsignaling polytope as LP rows,
//! and the known vertex list of the two-party binary polytope.

use crate::correlation::CorrelationBox;
use crate::lp::LinearProgram;
use crate::rational::{int, one, rat, zero, Rational};
use crate::scenario::{decode, Scenario};

/// Local deterministic response: party `k` answers `responses[k][x_k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy {
    pub responses: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    /// `prod_k A_k^{X_k}`, saturating.
    pub fn count(s: &Scenario) -> u128 {
        s.inputs().iter().zip(s.outputs()).fold(1u128, |acc, (&x, &a)| {
            (0..x).fold(acc, |acc, _| acc.saturating_mul(a as u128))
        })
    }

    /// The `index`-th strategy in enumeration order: one digit per
    /// (party, input) slot, party 0 input 0 most significant.
    pub fn nth(s: &Scenario, index: usize) -> Self {
        let radices: Vec<usize> = s
            .inputs()
            .iter()
            .zip(s.outputs())
            .flat_map(|(&x, &a)| std::iter::repeat_n(a, x))
            .collect();
        let digits = decode(index, &radices);
        let mut responses = Vec::with_capacity(s.parties());
        let mut pos = 0;
        for &x in s.inputs() {
            responses.push(digits[pos..pos + x].to_vec());
            pos += x;
        }
        DeterministicStrategy { responses }
    }

    /// All strategies in enumeration order. Callers check [`count`](Self::count) first.
    pub fn enumerate(s: &Scenario) -> impl Iterator<Item = DeterministicStrategy> + '_ {
        let n = Self::count(s) as usize;
        (0..n).map(move |i| Self::nth(s, i))
    }

    /// Table index of the single nonzero entry at input tuple `x`.
    pub fn entry_for(&self, s: &Scenario, x: &[usize]) -> usize {
        let a: Vec<usize> = x.iter().enumerate().map(|(k, &xk)| self.responses[k][xk]).collect();
        s.entry_index(x, &a)
    }

    /// Table indices of all nonzero entries, one per input tuple.
    pub fn support(&self, s: &Scenario) -> Vec<usize> {
        s.input_tuples().map(|x| self.entry_for(s, &x)).collect()
    }

    pub fn to_box(&self, s: &Scenario) -> CorrelationBox {
        CorrelationBox::deterministic(s.clone(), &self.responses).expect("strategy fits its scenario")
    }

    /// `coeffs . box(self)` without materializing the box.
    pub fn evaluate(&self, s: &Scenario, coeffs: &[Rational]) -> Rational {
        self.support(s).into_iter().map(|i| coeffs[i].clone()).sum()
    }
}

/// How the entries of each input block must sum.
#[derive(Debug, Clone, Copy)]
pub enum BlockTotal {
    One,
    /// Equal to LP variable `v` (a subnormalized cone).
    Var(usize),
}

/// Adds normalization and single-party nonsignaling rows for a table whose
/// entries are LP variables `offset .. offset + s.table_len()`.
pub fn add_nonsignaling_rows(lp: &mut LinearProgram, s: &Scenario, offset: usize, total: BlockTotal) {
    let n_out = s.num_output_tuples();
    for block in 0..s.num_input_tuples() {
        let mut terms: Vec<(usize, Rational)> = (0..n_out).map(|o| (offset + block * n_out + o, one())).collect();
        let rhs = match total {
            BlockTotal::One => one(),
            BlockTotal::Var(v) => {
                terms.push((v, -one()));
                zero()
            }
        };
        lp.add_eq_sparse(&terms, rhs);
    }
    for row in nonsignaling_rows(s) {
        let terms: Vec<(usize, Rational)> = row.into_iter().map(|(i, c)| (offset + i, c)).collect();
        lp.add_eq_sparse(&terms, zero());
    }
}

/// Rows `sum_{a_k} P(.|x) - sum_{a_k} P(.|x') = 0` over table indices, for
/// every party `k`, every context, and `x'_k` ranging over `1..X_k` against `x_k = 0`.
pub fn nonsignaling_rows(s: &Scenario) -> Vec<Vec<(usize, Rational)>> {
    let mut rows = Vec::new();
    for k in 0..s.parties() {
        let others: Vec<usize> = (0..s.parties()).filter(|&j| j != k).collect();
        for x in s.input_tuples().filter(|x| x[k] == 0) {
            for alt in 1..s.inputs()[k] {
                let mut x_alt = x.clone();
                x_alt[k] = alt;
                let rest_radices: Vec<usize> = others.iter().map(|&j| s.outputs()[j]).collect();
                for rest in crate::scenario::TupleIter::new(&rest_radices) {
                    let mut row = Vec::with_capacity(2 * s.outputs()[k]);
                    for ak in 0..s.outputs()[k] {
                        let mut a = Vec::with_capacity(s.parties());
                        a.extend_from_slice(&rest[..k]);
                        a.push(ak);
                        a.extend_from_slice(&rest[k..]);
                        row.push((s.entry_index(&x, &a), one()));
                        row.push((s.entry_index(&x_alt, &a), -one()));
                    }
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// LP whose feasible set is the nonsignaling polytope of `s`; variables are
/// the table entries in canonical order.
pub fn nonsignaling_lp(s: &Scenario) -> LinearProgram {
    let mut lp = LinearProgram::new(s.table_len());
    add_nonsignaling_rows(&mut lp, s, 0, BlockTotal::One);
    lp
}

/// PR-type box `a + b = xy + alpha x + beta y + gamma (mod 2)`.
pub fn pr_variant(alpha: usize, beta: usize, gamma: usize) -> CorrelationBox {
    CorrelationBox::from_fn(Scenario::chsh(), |x, a| {
        if (a[0] + a[1]) % 2 == (x[0] * x[1] + alpha * x[0] + beta * x[1] + gamma) % 2 {
            rat(1, 2)
        } else {
            zero()
        }
    })
    .expect("PR variant is a valid box")
}

/// The 24 vertices of the two-party binary nonsignaling polytope: the 16
/// deterministic boxes followed by the 8 PR-type boxes.
pub fn nonsignaling_vertices_2222() -> Vec<CorrelationBox> {
    let s = Scenario::chsh();
    let mut out: Vec<CorrelationBox> = DeterministicStrategy::enumerate(&s).map(|d| d.to_box(&s)).collect();
    for alpha in 0..2 {
        for beta in 0..2 {
            for gamma in 0..2 {
                out.push(pr_variant(alpha, beta, gamma));
            }
        }
    }
    out
}

/// Sum over output tuples of `sign(a) * P`, a helper for correlator rows.
pub(crate) fn parity_sign(a: &[usize]) -> Rational {
    if a.iter().sum::<usize>() % 2 == 0 {
        one()
    } else {
        int(-1)
    }
}
