//! Local-polytope membership, local models, nonlocality certificates, and
//! the secrecy content of a bipartite box.

use crate::bell::{BellFunctional, DEFAULT_STRATEGY_CAP};
use crate::correlation::CorrelationBox;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};
use crate::polytope::DeterministicStrategy;
use crate::rational::{one, zero, Rational};
use crate::scenario::Scenario;
use num_traits::{Signed, Zero};

/// Mixture of deterministic strategies, `sum_e P(e) D_e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalModel {
    strategies: Vec<DeterministicStrategy>,
    weights: Vec<Rational>,
}

impl LocalModel {
    /// Zero-weight terms are dropped and repeated strategies merged.
    pub fn new(strategies: Vec<DeterministicStrategy>, weights: Vec<Rational>) -> Result<Self> {
        if strategies.len() != weights.len() {
            return Err(Error::WeightError(format!(
                "{} strategies but {} weights",
                strategies.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::WeightError("negative weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if total != one() {
            return Err(Error::WeightError(format!("weights sum to {total}")));
        }
        let mut merged: Vec<(DeterministicStrategy, Rational)> = Vec::new();
        for (d, w) in strategies.into_iter().zip(weights) {
            if w.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(e, _)| *e == d) {
                Some((_, acc)) => *acc += w,
                None => merged.push((d, w)),
            }
        }
        let (strategies, weights) = merged.into_iter().unzip();
        Ok(LocalModel { strategies, weights })
    }

    pub fn strategies(&self) -> &[DeterministicStrategy] {
        &self.strategies
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn reconstruct(&self, s: &Scenario) -> Result<CorrelationBox> {
        let mut table = vec![zero(); s.table_len()];
        for (d, w) in self.strategies.iter().zip(&self.weights) {
            check_strategy(d, s)?;
            for i in d.support(s) {
                table[i] += w;
            }
        }
        Ok(CorrelationBox::from_parts_unchecked(s.clone(), table))
    }

    pub fn reproduces(&self, b: &CorrelationBox) -> bool {
        self.reconstruct(b.scenario()).is_ok_and(|r| r == *b)
    }
}

fn check_strategy(d: &DeterministicStrategy, s: &Scenario) -> Result<()> {
    let fits = d.responses.len() == s.parties()
        && d.responses.iter().enumerate().all(|(k, r)| {
            r.len() == s.inputs()[k] && r.iter().all(|&a| a < s.outputs()[k])
        });
    if fits {
        Ok(())
    } else {
        Err(Error::ScenarioMismatch(format!("strategy {:?} does not fit {s}", d.responses)))
    }
}

/// A normalized Bell functional together with its value on the box it refutes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub functional: BellFunctional,
    pub violation: Rational,
}

impl Certificate {
    /// Independent check: every deterministic strategy scores at most 0 and
    /// the box scores `violation > 0`.
    pub fn verify(&self, b: &CorrelationBox, cap: u128) -> Result<bool> {
        let (local, _) = self.functional.local_bound(cap)?;
        let value = self.functional.evaluate(b)?;
        Ok(!local.is_positive() && value.is_positive() && value == self.violation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalityVerdict {
    Local(LocalModel),
    Nonlocal(Certificate),
}

impl LocalityVerdict {
    pub fn is_local(&self) -> bool {
        matches!(self, LocalityVerdict::Local(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalityOptions {
    pub strategy_cap: u128,
}

impl Default for LocalityOptions {
    fn default() -> Self {
        LocalityOptions { strategy_cap: DEFAULT_STRATEGY_CAP }
    }
}

pub fn is_local(b: &CorrelationBox) -> Result<LocalityVerdict> {
    is_local_with(b, &LocalityOptions::default())
}

/// Decides membership by maximizing the visibility `t` such that
/// `t P + (1 - t) N` is a mixture of deterministic strategies, `N` the
/// uniform box, with `t <= 1`. At `t = 1` the weights are a local model;
/// otherwise the optimal dual is a functional that is nonpositive on every
/// strategy and positive on `P`.
pub fn is_local_with(b: &CorrelationBox, opts: &LocalityOptions) -> Result<LocalityVerdict> {
    if let Some(w) = b.signaling_witness() {
        return Err(Error::SignalingBox(w.to_string()));
    }
    let s = b.scenario();
    let count = DeterministicStrategy::count(s);
    if count > opts.strategy_cap {
        return Err(Error::StrategySpaceTooLarge { count, cap: opts.strategy_cap });
    }
    let strategies: Vec<DeterministicStrategy> = DeterministicStrategy::enumerate(s).collect();
    let n = strategies.len();
    let noise = CorrelationBox::uniform(s.clone());
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); s.table_len()];
    for (e, d) in strategies.iter().enumerate() {
        for i in d.support(s) {
            rows[i].push((e, one()));
        }
    }
    let mut lp = LinearProgram::new(n + 1);
    for (i, mut row) in rows.into_iter().enumerate() {
        let dir = &b.table()[i] - &noise.table()[i];
        if !dir.is_zero() {
            row.push((n, -dir));
        }
        lp.add_eq_sparse(&row, noise.table()[i].clone());
    }
    lp.set_bounds(n, Some(zero()), Some(one()));
    let mut obj = vec![zero(); n + 1];
    obj[n] = one();
    lp.set_objective(obj);

    let (primal, value, dual) = match lp.solve()? {
        LpOutcome::Optimal { primal, value, dual } => (primal, value, dual),
        other => return Err(Error::Internal(format!("visibility LP returned {:?}", other.status()))),
    };
    if value == one() {
        let model = LocalModel::new(strategies, primal[..n].to_vec())?;
        debug_assert!(model.reproduces(b));
        return Ok(LocalityVerdict::Local(model));
    }
    let raw = BellFunctional::new(s.clone(), dual.0.eq.iter().map(|y| -y).collect(), zero())?;
    let functional = raw.normalize_with_cap(opts.strategy_cap)?;
    let violation = functional.evaluate(b)?;
    if !violation.is_positive() {
        return Err(Error::Internal("extracted functional is not violated".into()));
    }
    Ok(LocalityVerdict::Nonlocal(Certificate { functional, violation }))
}

/// True iff every conditional distribution is a point mass.
pub fn is_deterministic(b: &CorrelationBox) -> bool {
    b.is_deterministic()
}

/// Tripartite box `P(a, b, e | x, y)` in which Eve has one input and
/// outputs the index of the model's hidden variable.
pub fn eve_extension(b: &CorrelationBox, model: &LocalModel) -> Result<CorrelationBox> {
    if model.is_empty() || !model.reproduces(b) {
        return Err(Error::ModelMismatch);
    }
    let s = b.scenario();
    let eve = Scenario::new(vec![1], vec![model.len()])?;
    let full = s.concat(&eve);
    let n = s.parties();
    let mut table = vec![zero(); full.table_len()];
    for (e, (d, w)) in model.strategies().iter().zip(model.weights()).enumerate() {
        for x in s.input_tuples() {
            let mut fx = x.clone();
            fx.push(0);
            let mut fa: Vec<usize> = (0..n).map(|k| d.responses[k][x[k]]).collect();
            fa.push(e);
            table[full.entry_index(&fx, &fa)] = w.clone();
        }
    }
    Ok(CorrelationBox::from_parts_unchecked(full, table))
}

/// Whether a box equals the product of its single-party marginals.
pub fn is_product(b: &CorrelationBox) -> Result<bool> {
    let n = b.scenario().parties();
    let mut product = b.marginal_of(&[0])?;
    for k in 1..n {
        product = product.tensor(&b.marginal_of(&[k])?);
    }
    Ok(product == *b)
}

/// Checks that conditioned on each of Eve's outputs (the last party, a
/// single input) the remaining parties hold a product box.
pub fn product_given_eve(ext: &CorrelationBox) -> Result<bool> {
    let s = ext.scenario();
    let eve = s.parties() - 1;
    if s.inputs()[eve] != 1 {
        return Err(Error::ScenarioMismatch("eavesdropper must have a single input".into()));
    }
    for e in 0..s.outputs()[eve] {
        match ext.condition(eve, 0, e) {
            Ok(c) => {
                if !is_product(&c)? {
                    return Ok(false);
                }
            }
            Err(Error::ZeroProbabilityCondition) => continue,
            Err(err) => return Err(err),
        }
    }
    Ok(true)
}

/// Joint distribution of `A = (a, x)`, `B = (b, y)` and `E = e` with inputs
/// drawn uniformly; indices `[a * X + x][b * Y + y][e]` flattened row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CryptoDistribution {
    pub sizes: [usize; 3],
    pub probs: Vec<Rational>,
}

impl CryptoDistribution {
    pub fn get(&self, a: usize, b: usize, e: usize) -> &Rational {
        &self.probs[(a * self.sizes[1] + b) * self.sizes[2] + e]
    }

    /// `P_{AB|E} = P_{A|E} P_{B|E}` for every `e` of positive weight.
    pub fn is_conditionally_product(&self) -> bool {
        let [na, nb, ne] = self.sizes;
        (0..ne).all(|e| {
            let pe: Rational = (0..na).flat_map(|a| (0..nb).map(move |b| (a, b))).map(|(a, b)| self.get(a, b, e)).sum();
            if pe.is_zero() {
                return true;
            }
            let pa: Vec<Rational> = (0..na).map(|a| (0..nb).map(|b| self.get(a, b, e)).sum()).collect();
            let pb: Vec<Rational> = (0..nb).map(|b| (0..na).map(|a| self.get(a, b, e)).sum()).collect();
            (0..na).all(|a| (0..nb).all(|b| self.get(a, b, e) * &pe == &pa[a] * &pb[b]))
        })
    }
}

/// Builds `P_ABE = P(a, b, e | x, y) / (X Y)` from a tripartite extension
/// whose last party has one input.
pub fn crypto_distribution(ext: &CorrelationBox) -> Result<CryptoDistribution> {
    let s = ext.scenario();
    if s.parties() != 3 || s.inputs()[2] != 1 {
        return Err(Error::ScenarioMismatch(format!("expected an A-B-E extension, got {s}")));
    }
    let (xn, yn) = (s.inputs()[0], s.inputs()[1]);
    let sizes = [s.outputs()[0] * xn, s.outputs()[1] * yn, s.outputs()[2]];
    let prior = Rational::from_integer(((xn * yn) as i64).into()).recip();
    let mut probs = vec![zero(); sizes[0] * sizes[1] * sizes[2]];
    for (i, (x, a)) in s.entries().enumerate() {
        let ai = a[0] * xn + x[0];
        let bi = a[1] * yn + x[1];
        probs[(ai * sizes[1] + bi) * sizes[2] + a[2]] = &ext.table()[i] * &prior;
    }
    Ok(CryptoDistribution { sizes, probs })
}

/// Either a local model (no secrecy) or a violated Bell functional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecrecyVerdict {
    NoSecrecy(LocalModel),
    Secrecy(Certificate),
}

impl SecrecyVerdict {
    pub fn contains_secrecy(&self) -> bool {
        matches!(self, SecrecyVerdict::Secrecy(_))
    }
}

pub fn secrecy_content(b: &CorrelationBox) -> Result<SecrecyVerdict> {
    secrecy_content_with(b, &LocalityOptions::default())
}

pub fn secrecy_content_with(b: &CorrelationBox, opts: &LocalityOptions) -> Result<SecrecyVerdict> {
    if b.scenario().parties() != 2 {
        return Err(Error::ScenarioMismatch(format!("secrecy needs two parties, got {}", b.scenario())));
    }
    Ok(match is_local_with(b, opts)? {
        LocalityVerdict::Local(model) => SecrecyVerdict::NoSecrecy(model),
        LocalityVerdict::Nonlocal(cert) => SecrecyVerdict::Secrecy(cert),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{chsh, chsh_functional};
    use crate::polytope::{nonsignaling_vertices_2222, pr_variant};
    use crate::rational::rat;

    fn iso(c: Rational) -> CorrelationBox {
        let noise = CorrelationBox::uniform(Scenario::chsh());
        let pr = pr_variant(0, 0, 0);
        CorrelationBox::mix(&[(&pr, c.clone()), (&noise, one() - c)]).unwrap()
    }

    #[test]
    fn pr_certificate_is_chsh() {
        let LocalityVerdict::Nonlocal(cert) = is_local(&pr_variant(0, 0, 0)).unwrap() else {
            panic!("PR box must be nonlocal");
        };
        assert_eq!(cert.violation, one());
        assert!(cert.verify(&pr_variant(0, 0, 0), DEFAULT_STRATEGY_CAP).unwrap());
        assert!(cert.functional.equivalent_on_ns(&chsh_functional()).unwrap());
    }

    #[test]
    fn isotropic_half_is_local() {
        let b = iso(rat(1, 2));
        let LocalityVerdict::Local(model) = is_local(&b).unwrap() else { panic!() };
        assert!(model.reproduces(&b));
        let ext = eve_extension(&b, &model).unwrap();
        assert!(ext.is_nonsignaling());
        assert!(product_given_eve(&ext).unwrap());
        let crypto = crypto_distribution(&ext).unwrap();
        assert!(crypto.is_conditionally_product());
        assert_eq!(crypto.probs.iter().sum::<Rational>(), one());
    }

    #[test]
    fn vertices_classified() {
        for v in nonsignaling_vertices_2222() {
            let local = is_local(&v).unwrap().is_local();
            assert_eq!(local, v.is_deterministic());
            if local {
                assert!(chsh(&v).unwrap() <= zero());
            }
        }
    }

    #[test]
    fn secrecy_matches_locality() {
        assert!(secrecy_content(&iso(rat(3, 4))).unwrap().contains_secrecy());
        let prod = CorrelationBox::uniform(Scenario::chsh());
        let SecrecyVerdict::NoSecrecy(m) = secrecy_content(&prod).unwrap() else { panic!() };
        assert!(m.reproduces(&prod));
    }

    #[test]
    fn cap_and_signaling_errors() {
        let opts = LocalityOptions { strategy_cap: 15 };
        assert!(matches!(
            is_local_with(&iso(zero()), &opts),
            Err(Error::StrategySpaceTooLarge { count: 16, cap: 15 })
        ));
        let signaling = CorrelationBox::from_fn(Scenario::chsh(), |x, a| {
            if a == [0, x[0]] {
                one()
            } else {
                zero()
            }
        })
        .unwrap();
        assert!(matches!(is_local(&signaling), Err(Error::SignalingBox(_))));
    }

    #[test]
    fn model_validation() {
        let s = Scenario::chsh();
        let d0 = DeterministicStrategy::nth(&s, 0);
        let d1 = DeterministicStrategy::nth(&s, 5);
        assert!(LocalModel::new(vec![d0.clone()], vec![rat(1, 2)]).is_err());
        let m = LocalModel::new(vec![d0.clone(), d1, d0.clone()], vec![rat(1, 4), zero(), rat(3, 4)]).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m.reproduces(&d0.to_box(&s)));
        let other = iso(zero());
        assert_eq!(eve_extension(&other, &m), Err(Error::ModelMismatch));
    }
}
