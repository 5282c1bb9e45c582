//! The isotropic family `C PR + (1 - C) N`, depolarization onto it, and
//! the one-sided shrinking map `C -> (1 - eps) C`.

use crate::bell::correlators;
use crate::correlation::{CorrelationBox, Relabeling};
use crate::error::{Error, Result};
use crate::polytope::parity_sign;
use crate::rational::{one, rat, zero, Rational};
use crate::scenario::Scenario;
use num_traits::Signed;

fn in_unit_interval(v: &Rational) -> bool {
    !v.is_negative() && *v <= one()
}

/// `P(a, b | x, y) = (1 + s_xy C (-1)^(a+b)) / 4` with `s = (1, 1, 1, -1)`.
/// Accepts `C` in `[-1, 1]`; negative values mix in the anti-correlated PR box.
fn isotropic_signed(c: &Rational) -> CorrelationBox {
    CorrelationBox::from_fn(Scenario::chsh(), |x, a| {
        let s = if x == [1, 1] { -one() } else { one() };
        (one() + s * c * parity_sign(a)) * rat(1, 4)
    })
    .expect("isotropic entries are valid for |C| <= 1")
}

pub fn make_isotropic(c: Rational) -> Result<CorrelationBox> {
    if !in_unit_interval(&c) {
        return Err(Error::BadParams(format!("isotropic parameter {c} must lie in [0, 1]")));
    }
    Ok(isotropic_signed(&c))
}

/// `C` if the box has the isotropic form with unbiased marginals and
/// `C00 = C01 = C10 = -C11 = C`, for any sign of `C`.
pub fn signed_isotropic_parameter(b: &CorrelationBox) -> Option<Rational> {
    let c = correlators(b).ok()?.c00;
    (isotropic_signed(&c) == *b).then_some(c)
}

/// `C` if the box is isotropic with `C` in `[0, 1]`.
pub fn isotropic_parameter(b: &CorrelationBox) -> Option<Rational> {
    signed_isotropic_parameter(b).filter(in_unit_interval)
}

fn flip(on: bool) -> Vec<usize> {
    if on {
        vec![1, 0]
    } else {
        vec![0, 1]
    }
}

/// One local operation: flip the input of each party and flip each party's
/// output at each original input.
fn operation(flip_x: bool, flip_y: bool, a_at: [bool; 2], b_at: [bool; 2]) -> Relabeling {
    Relabeling {
        input_perms: vec![flip(flip_x), flip(flip_y)],
        output_perms: vec![vec![flip(a_at[0]), flip(a_at[1])], vec![flip(b_at[0]), flip(b_at[1])]],
    }
}

/// The eight composite operations averaged by [`depolarize`]: the second
/// step (nothing; flip `a` at `x = 1` and `y`; flip `x` and `b` at `y = 1`;
/// flip `x`, `a` at `x = 0`, `y` and `b` at `y = 1`) after the first
/// (nothing; flip `a` and `b`).
pub fn depolarization_operations() -> Vec<Relabeling> {
    let step1 = [
        operation(false, false, [false; 2], [false; 2]),
        operation(false, false, [true; 2], [true; 2]),
    ];
    let step2 = [
        operation(false, false, [false; 2], [false; 2]),
        operation(false, true, [false, true], [false; 2]),
        operation(true, false, [false; 2], [false, true]),
        operation(true, true, [true, false], [false, true]),
    ];
    let mut out = Vec::with_capacity(8);
    for first in &step1 {
        for second in &step2 {
            out.push(second.after(first));
        }
    }
    out
}

/// Uniform average of the box over [`depolarization_operations`]. The
/// result has unbiased marginals, correlators `(S, S, S, -S)/4` where
/// `S = C00 + C01 + C10 - C11`, and the same CHSH value as the input.
/// No sign fix is applied, so the result has a negative parameter when the
/// input's CHSH value is below -1.
pub fn depolarize(b: &CorrelationBox) -> Result<CorrelationBox> {
    if !b.scenario().is_2222() {
        return Err(Error::ScenarioMismatch(format!("depolarization needs two binary parties, got {}", b.scenario())));
    }
    let images: Vec<CorrelationBox> = depolarization_operations()
        .iter()
        .map(|r| b.relabel(r))
        .collect::<Result<_>>()?;
    let parts: Vec<(&CorrelationBox, Rational)> = images.iter().map(|i| (i, rat(1, 8))).collect();
    CorrelationBox::mix(&parts)
}

/// Bob keeps his output with probability `1 - eps` and otherwise outputs
/// an unbiased bit. Defined for any bipartite box with binary Bob outputs.
pub fn bob_noise(b: &CorrelationBox, eps: &Rational) -> Result<CorrelationBox> {
    if !in_unit_interval(eps) {
        return Err(Error::BadParams(format!("epsilon {eps} must lie in [0, 1]")));
    }
    let s = b.scenario();
    if s.parties() != 2 {
        return Err(Error::ScenarioMismatch(format!("expected two parties, got {s}")));
    }
    let alice = b.marginal_of(&[0])?;
    let noisy = alice.tensor(&CorrelationBox::uniform(Scenario::new(vec![s.inputs()[1]], vec![s.outputs()[1]])?));
    CorrelationBox::mix(&[(b, one() - eps), (&noisy, eps.clone())])
}

/// `C -> (1 - eps) C` on an isotropic box.
pub fn shrink(b: &CorrelationBox, eps: &Rational) -> Result<CorrelationBox> {
    if isotropic_parameter(b).is_none() {
        return Err(Error::NotIsotropic);
    }
    bob_noise(b, eps)
}

/// Shrinks the isotropic box with the larger parameter until both match.
pub fn equalize(ab: &CorrelationBox, ac: &CorrelationBox) -> Result<(CorrelationBox, CorrelationBox)> {
    let c1 = isotropic_parameter(ab).ok_or(Error::NotIsotropic)?;
    let c2 = isotropic_parameter(ac).ok_or(Error::NotIsotropic)?;
    if c1 == c2 {
        return Ok((ab.clone(), ac.clone()));
    }
    let eps = equalizing_epsilon(&c1, &c2);
    if c1 > c2 {
        Ok((shrink(ab, &eps)?, ac.clone()))
    } else {
        Ok((ab.clone(), shrink(ac, &eps)?))
    }
}

/// Epsilon used by [`equalize`] for the given pair of parameters.
pub fn equalizing_epsilon(c1: &Rational, c2: &Rational) -> Rational {
    let (lo, hi) = if c1 < c2 { (c1, c2) } else { (c2, c1) };
    if *hi == zero() {
        zero()
    } else {
        one() - lo / hi
    }
}
