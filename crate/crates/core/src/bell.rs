//! Bell functionals: evaluation, normalization (local bound 0, nonsignaling
//! maximum 1), CHSH and CGLMP, correlators, and maximizer uniqueness.

use crate::correlation::{CorrelationBox, Relabeling};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};
use crate::polytope::{nonsignaling_lp, parity_sign, DeterministicStrategy};
use crate::rational::{one, rat, zero, Rational};
use crate::scenario::{PartySubset, Scenario};
use num_traits::{Signed, Zero};

/// Default ceiling on the number of deterministic strategies enumerated.
pub const DEFAULT_STRATEGY_CAP: u128 = 10_000;

/// Largest CGLMP output size accepted by [`cglmp`].
pub const CGLMP_MAX_D: usize = 4;

/// Affine functional `coefficients . P + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BellFunctional {
    scenario: Scenario,
    coefficients: Vec<Rational>,
    offset: Rational,
}

impl BellFunctional {
    pub fn new(scenario: Scenario, coefficients: Vec<Rational>, offset: Rational) -> Result<Self> {
        if coefficients.len() != scenario.table_len() {
            return Err(Error::TableSize { expected: scenario.table_len(), got: coefficients.len() });
        }
        Ok(BellFunctional { scenario, coefficients, offset })
    }

    pub fn zero(scenario: Scenario) -> Self {
        let n = scenario.table_len();
        BellFunctional { scenario, coefficients: vec![zero(); n], offset: zero() }
    }

    pub fn from_fn(scenario: Scenario, offset: Rational, mut f: impl FnMut(&[usize], &[usize]) -> Rational) -> Self {
        let coefficients = scenario.entries().map(|(x, a)| f(&x, &a)).collect();
        BellFunctional { scenario, coefficients, offset }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn evaluate(&self, b: &CorrelationBox) -> Result<Rational> {
        if b.scenario() != &self.scenario {
            return Err(Error::ScenarioMismatch(format!("functional on {}, box on {}", self.scenario, b.scenario())));
        }
        Ok(self.evaluate_table(b.table()))
    }

    /// Evaluates on a raw table of the right length.
    pub fn evaluate_table(&self, table: &[Rational]) -> Rational {
        crate::lp::dot(&self.coefficients, table) + &self.offset
    }

    /// Maximum over deterministic strategies, with the maximizing strategy.
    pub fn local_bound(&self, cap: u128) -> Result<(Rational, DeterministicStrategy)> {
        let count = DeterministicStrategy::count(&self.scenario);
        if count > cap {
            return Err(Error::StrategySpaceTooLarge { count, cap });
        }
        let mut best: Option<(Rational, DeterministicStrategy)> = None;
        for d in DeterministicStrategy::enumerate(&self.scenario) {
            let v = d.evaluate(&self.scenario, &self.coefficients);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, d));
            }
        }
        let (v, d) = best.expect("every scenario has a strategy");
        Ok((v + &self.offset, d))
    }

    /// Maximum over the nonsignaling polytope, with an optimal box.
    pub fn ns_max(&self) -> Result<(Rational, CorrelationBox)> {
        let mut lp = nonsignaling_lp(&self.scenario);
        lp.set_objective(self.coefficients.clone());
        match lp.solve()? {
            LpOutcome::Optimal { primal, value, .. } => {
                Ok((value + &self.offset, CorrelationBox::from_parts_unchecked(self.scenario.clone(), primal)))
            }
            other => Err(Error::Internal(format!("nonsignaling maximization returned {:?}", other.status()))),
        }
    }

    /// Minimum over the nonsignaling polytope.
    pub fn ns_min(&self) -> Result<Rational> {
        let (v, _) = self.scaled(&-one()).ns_max()?;
        Ok(-v)
    }

    fn scaled(&self, s: &Rational) -> BellFunctional {
        BellFunctional {
            scenario: self.scenario.clone(),
            coefficients: self.coefficients.iter().map(|c| c * s).collect(),
            offset: &self.offset * s,
        }
    }

    /// The affine rescaling with local bound 0 and nonsignaling maximum 1.
    pub fn normalize(&self) -> Result<BellFunctional> {
        self.normalize_with_cap(DEFAULT_STRATEGY_CAP)
    }

    pub fn normalize_with_cap(&self, cap: u128) -> Result<BellFunctional> {
        let (l, _) = self.local_bound(cap)?;
        let (m, _) = self.ns_max()?;
        if m <= l {
            return Err(Error::DegenerateFunctional(format!(
                "nonsignaling maximum {m} does not exceed the local bound {l}"
            )));
        }
        let scale = (m - &l).recip();
        Ok(BellFunctional {
            scenario: self.scenario.clone(),
            coefficients: self.coefficients.iter().map(|c| c * &scale).collect(),
            offset: (&self.offset - l) * scale,
        })
    }

    pub fn is_normalized(&self) -> Result<bool> {
        Ok(self.local_bound(DEFAULT_STRATEGY_CAP)?.0.is_zero() && self.ns_max()?.0 == one())
    }

    /// The functional `g` with `g(relabel(P, r)) = self(P)`.
    pub fn relabel(&self, r: &Relabeling) -> Result<BellFunctional> {
        r.check(&self.scenario)?;
        let s = &self.scenario;
        let mut coefficients = vec![zero(); s.table_len()];
        for (i, (x, a)) in s.entries().enumerate() {
            coefficients[r.image_index(s, &x, &a)] = self.coefficients[i].clone();
        }
        Ok(BellFunctional { scenario: s.clone(), coefficients, offset: self.offset.clone() })
    }

    /// Whether the two functionals agree on every nonsignaling box.
    pub fn equivalent_on_ns(&self, other: &BellFunctional) -> Result<bool> {
        if self.scenario != other.scenario {
            return Ok(false);
        }
        let diff = BellFunctional {
            scenario: self.scenario.clone(),
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a - b).collect(),
            offset: &self.offset - &other.offset,
        };
        Ok(diff.ns_max()?.0.is_zero() && diff.ns_min()?.is_zero())
    }

    /// Pulls the functional back to `full` so that it acts on the marginal
    /// of `subset`; complement parties are read at input 0.
    pub fn lift(&self, full: &Scenario, subset: &PartySubset) -> Result<BellFunctional> {
        let sub = full.restrict(subset.indices());
        if sub != self.scenario {
            return Err(Error::ScenarioMismatch(format!("marginal scenario {sub} vs functional on {}", self.scenario)));
        }
        let idx = subset.indices();
        let complement = subset.complement(full.parties());
        let coefficients = full
            .entries()
            .map(|(x, a)| {
                if complement.iter().any(|&k| x[k] != 0) {
                    return zero();
                }
                let sx: Vec<usize> = idx.iter().map(|&k| x[k]).collect();
                let sa: Vec<usize> = idx.iter().map(|&k| a[k]).collect();
                self.coefficients[sub.entry_index(&sx, &sa)].clone()
            })
            .collect();
        Ok(BellFunctional { scenario: full.clone(), coefficients, offset: self.offset.clone() })
    }
}

/// Correlation functions `C_xy` of a two-party binary box.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Correlators {
    pub c00: Rational,
    pub c01: Rational,
    pub c10: Rational,
    pub c11: Rational,
}

impl Correlators {
    pub fn get(&self, x: usize, y: usize) -> &Rational {
        match (x, y) {
            (0, 0) => &self.c00,
            (0, 1) => &self.c01,
            (1, 0) => &self.c10,
            _ => &self.c11,
        }
    }
}

fn require_2222(b: &CorrelationBox) -> Result<()> {
    if b.scenario().is_2222() {
        Ok(())
    } else {
        Err(Error::ScenarioMismatch(format!("expected two binary parties, got {}", b.scenario())))
    }
}

pub fn correlators(b: &CorrelationBox) -> Result<Correlators> {
    require_2222(b)?;
    let c = |x: usize, y: usize| -> Rational {
        b.scenario().output_tuples().map(|a| parity_sign(&a) * b.get(&[x, y], &a)).sum()
    };
    Ok(Correlators { c00: c(0, 0), c01: c(0, 1), c10: c(1, 0), c11: c(1, 1) })
}

/// `(C00 + C01 + C10 - C11)/2 - 1`.
pub fn chsh(b: &CorrelationBox) -> Result<Rational> {
    let c = correlators(b)?;
    Ok((c.c00 + c.c01 + c.c10 - c.c11) * rat(1, 2) - one())
}

/// CHSH variant maximized by the PR-type box
/// `a + b = xy + alpha x + beta y + gamma`.
pub fn chsh_variant_functional(alpha: usize, beta: usize, gamma: usize) -> BellFunctional {
    BellFunctional::from_fn(Scenario::chsh(), -one(), |x, a| {
        let s = (x[0] * x[1] + alpha * x[0] + beta * x[1] + gamma) % 2;
        let sign = if s == 0 { one() } else { -one() };
        sign * parity_sign(a) * rat(1, 2)
    })
}

pub fn chsh_functional() -> BellFunctional {
    chsh_variant_functional(0, 0, 0)
}

/// Largest value among the eight CHSH variants.
pub fn max_chsh_variant(b: &CorrelationBox) -> Result<Rational> {
    require_2222(b)?;
    let mut best: Option<Rational> = None;
    for alpha in 0..2 {
        for beta in 0..2 {
            for gamma in 0..2 {
                let v = chsh_variant_functional(alpha, beta, gamma).evaluate(b)?;
                if best.as_ref().is_none_or(|m| v > *m) {
                    best = Some(v);
                }
            }
        }
    }
    Ok(best.expect("eight variants"))
}

/// The 64 local reversible relabelings of the two-party binary scenario:
/// input swaps for each party and an independent output flip per input.
pub fn relabelings_2222() -> Vec<Relabeling> {
    let perm = |swap: bool| if swap { vec![1, 0] } else { vec![0, 1] };
    let mut out = Vec::with_capacity(64);
    for code in 0..64usize {
        let bit = |i: usize| code >> i & 1 == 1;
        out.push(Relabeling {
            input_perms: vec![perm(bit(0)), perm(bit(1))],
            output_perms: vec![vec![perm(bit(2)), perm(bit(3))], vec![perm(bit(4)), perm(bit(5))]],
        });
    }
    out
}

/// Relabels a two-party binary box so that `C00, C01, C10 >= 0`. Among the
/// admissible relabelings the one with the largest CHSH value wins, ties
/// going to the first in [`relabelings_2222`] order.
pub fn canonical_form_2222(b: &CorrelationBox) -> Result<(Relabeling, CorrelationBox)> {
    require_2222(b)?;
    let mut best: Option<(Rational, Relabeling, CorrelationBox)> = None;
    for r in relabelings_2222() {
        let candidate = b.relabel(&r)?;
        let c = correlators(&candidate)?;
        if c.c00.is_negative() || c.c01.is_negative() || c.c10.is_negative() {
            continue;
        }
        let v = chsh(&candidate)?;
        if best.as_ref().is_none_or(|(m, _, _)| v > *m) {
            best = Some((v, r, candidate));
        }
    }
    let (_, r, candidate) = best.expect("sign flips span all correlator sign patterns");
    Ok((r, candidate))
}

/// CGLMP functional for two inputs and `d` outputs, normalized by LP.
pub fn cglmp(d: usize) -> Result<BellFunctional> {
    if d > CGLMP_MAX_D {
        return Err(Error::BadParams(format!("CGLMP output size {d} exceeds cap {CGLMP_MAX_D}")));
    }
    cglmp_uncapped(d)
}

pub fn cglmp_uncapped(d: usize) -> Result<BellFunctional> {
    cglmp_raw(d)?.normalize()
}

/// Probability-form CGLMP expression, before normalization.
pub fn cglmp_raw(d: usize) -> Result<BellFunctional> {
    if d < 2 {
        return Err(Error::BadParams(format!("CGLMP needs d >= 2, got {d}")));
    }
    let s = Scenario::uniform(2, 2, d);
    let di = d as i64;
    let mut coefficients = vec![zero(); s.table_len()];
    // (x, y, shift, sign_of_b): event  a = b + shift  for sign +1, b = a + shift for sign -1.
    let mut add = |x: usize, y: usize, a_minus_b: i64, w: &Rational| {
        for a in 0..d {
            let b = (a as i64 - a_minus_b).rem_euclid(di) as usize;
            coefficients[s.entry_index(&[x, y], &[a, b])] += w;
        }
    };
    for k in 0..(d / 2) as i64 {
        let w = one() - rat(2 * k, di - 1);
        let mw = -w.clone();
        add(0, 0, k, &w); // A0 = B0 + k
        add(1, 0, -(k + 1), &w); // B0 = A1 + k + 1
        add(1, 1, k, &w); // A1 = B1 + k
        add(0, 1, -k, &w); // B1 = A0 + k
        add(0, 0, -(k + 1), &mw); // A0 = B0 - k - 1
        add(1, 0, k, &mw); // B0 = A1 - k
        add(1, 1, -(k + 1), &mw); // A1 = B1 - k - 1
        add(0, 1, k + 1, &mw); // B1 = A0 - k - 1
    }
    BellFunctional::new(s, coefficients, zero())
}

/// Outcome of [`unique_ns_maximizer`].
#[derive(Debug, Clone, PartialEq)]
pub struct NsMaximizer {
    pub value: Rational,
    pub unique: bool,
    /// Present only when the maximizer is unique.
    pub maximizer: Option<CorrelationBox>,
}

/// Maximizes `f` over the nonsignaling polytope and checks whether the
/// optimal face is a single point, coordinate by coordinate.
pub fn unique_ns_maximizer(f: &BellFunctional) -> Result<NsMaximizer> {
    let (value, opt) = f.ns_max()?;
    let s = f.scenario();
    let mut face = nonsignaling_lp(s);
    face.add_eq(f.coefficients.clone(), &value - &f.offset);
    let n = s.table_len();
    for i in 0..n {
        for sign in [one(), -one()] {
            let mut obj = vec![zero(); n];
            obj[i] = sign.clone();
            face.set_objective(obj);
            let extreme = optimum(&face)? * &sign;
            if extreme != opt.table()[i] {
                return Ok(NsMaximizer { value, unique: false, maximizer: None });
            }
        }
    }
    Ok(NsMaximizer { value, unique: true, maximizer: Some(opt) })
}

fn optimum(lp: &LinearProgram) -> Result<Rational> {
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Internal(format!("bounded LP returned {:?}", other.status()))),
    }
}

/// The correlator `C_xy` as a functional.
pub fn correlator_functional(x: usize, y: usize) -> BellFunctional {
    BellFunctional::from_fn(Scenario::chsh(), zero(), |xx, a| {
        if xx == [x, y] {
            parity_sign(a)
        } else {
            zero()
        }
    })
}
