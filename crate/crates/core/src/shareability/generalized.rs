use crate::correlation::CorrelationBox;
use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};
use crate::scenario::Scenario;
use num_traits::Signed;

fn check_outputs(a: usize) -> Result<()> {
    if a < 2 {
        return Err(Error::BadParams(format!("output alphabet {a} must be at least 2")));
    }
    Ok(())
}

fn uniform_weight(a: usize) -> Rational {
    Rational::from_integer((a as i64).into()).recip()
}

/// Two inputs, `a` outputs: `1/A` when `a - b = xy (mod A)`.
pub fn generalized_pr(a: usize) -> Result<CorrelationBox> {
    check_outputs(a)?;
    let w = uniform_weight(a);
    CorrelationBox::from_fn(Scenario::uniform(2, 2, a), |x, o| {
        if (o[0] + a - o[1]) % a == x[0] * x[1] {
            w.clone()
        } else {
            zero()
        }
    })
}

fn check_distribution(p: &[Rational], a: usize, who: &str) -> Result<()> {
    if p.len() != a || p.iter().any(|v| v.is_negative()) || p.iter().sum::<Rational>() != one() {
        return Err(Error::BadParams(format!("{who} noise must be a distribution over {a} outputs")));
    }
    Ok(())
}

/// `C PR + (1 - C) P_A x P_B` with input-independent single-party noises.
pub fn generalized_isotropic(a: usize, c: &Rational, p_a: &[Rational], p_b: &[Rational]) -> Result<CorrelationBox> {
    check_outputs(a)?;
    if c.is_negative() || *c > one() {
        return Err(Error::BadParams(format!("C = {c} must lie in [0, 1]")));
    }
    check_distribution(p_a, a, "Alice's")?;
    check_distribution(p_b, a, "Bob's")?;
    let pr = generalized_pr(a)?;
    let noise = CorrelationBox::from_fn(Scenario::uniform(2, 2, a), |_, o| &p_a[o[0]] * &p_b[o[1]])?;
    CorrelationBox::mix(&[(&pr, c.clone()), (&noise, one() - c)])
}

/// Averages `a -> a + r`, `b -> b + r (mod A)` over a uniform shared `r`.
pub fn shared_shift(b: &CorrelationBox) -> Result<CorrelationBox> {
    let s = b.scenario();
    if s.parties() != 2 || s.outputs()[0] != s.outputs()[1] {
        return Err(Error::ScenarioMismatch(format!("shared shift needs two parties with equal outputs, got {s}")));
    }
    let a = s.outputs()[0];
    let w = uniform_weight(a);
    let table = s
        .entries()
        .map(|(x, o)| {
            (0..a)
                .map(|r| b.get(&x, &[(o[0] + a - r) % a, (o[1] + a - r) % a]) * &w)
                .sum()
        })
        .collect();
    CorrelationBox::new(s.clone(), table)
}

/// Whether every single-party output distribution is uniform.
pub fn has_uniform_marginals(b: &CorrelationBox) -> Result<bool> {
    let s = b.scenario();
    for k in 0..s.parties() {
        let w = uniform_weight(s.outputs()[k]);
        for x in 0..s.inputs()[k] {
            if b.party_distribution(k, x)?.iter().any(|p| *p != w) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether shifting `C PR + (1 - C) P_A P_B` yields the uniform-noise
/// isotropic box: the noise part becomes `sum_r P_A(a - r) P_B(b - r) / A`,
/// which is the uniform product exactly when one of the noises is uniform.
pub fn shift_yields_uniform_noise(p_a: &[Rational], p_b: &[Rational]) -> bool {
    let a = p_a.len();
    let w = uniform_weight(a);
    p_a.iter().all(|v| *v == w) || p_b.iter().all(|v| *v == w)
}
