use super::extension::{add_marginal_rows, add_symmetry_rows, is_m_shareable, ExtensionProblem, SharedParty};
use crate::correlation::CorrelationBox;
use crate::error::{Error, Result};
use crate::isotropic::make_isotropic;
use crate::lp::{LinearProgram, LpOutcome};
use crate::polytope::{add_nonsignaling_rows, BlockTotal};
use crate::rational::{one, rat, simplest_between, zero, Rational};
use crate::scenario::Scenario;
use num_traits::Signed;

/// Bisection steps before the bracket is handed to the exact confirmation.
const BISECTION_STEPS: usize = 10;

fn shareable_at(c: &Rational, copies: usize) -> Result<bool> {
    let p = ExtensionProblem::new(make_isotropic(c.clone())?, SharedParty::B, copies)?;
    Ok(is_m_shareable(&p)?.is_feasible())
}

/// `max C` such that the isotropic box is `copies`-shareable wrt Bob, as a
/// single LP with `C` as a variable (the target marginal is affine in `C`).
fn parametric_max(copies: usize) -> Result<Rational> {
    let noise = CorrelationBox::uniform(Scenario::chsh());
    let pr = make_isotropic(one())?;
    let dir: Vec<Rational> = pr.table().iter().zip(noise.table()).map(|(p, n)| p - n).collect();
    let ext = Scenario::new(
        std::iter::once(2).chain(std::iter::repeat_n(2, copies)).collect(),
        vec![2; copies + 1],
    )?;
    let n = ext.table_len();
    let mut lp = LinearProgram::new(n + 1);
    add_nonsignaling_rows(&mut lp, &ext, 0, BlockTotal::One);
    add_symmetry_rows(&mut lp, &ext, copies);
    add_marginal_rows(&mut lp, &ext, &noise, Some((n, &dir)));
    lp.set_bounds(n, Some(zero()), Some(one()));
    let mut obj = vec![zero(); n + 1];
    obj[n] = one();
    lp.set_objective(obj);
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Internal(format!("clone ceiling LP returned {:?}", other.status()))),
    }
}

/// Largest isotropic parameter whose box admits `copies` symmetric copies of
/// Bob. Bisects on feasibility, takes the simplest rational in the final
/// bracket, and confirms it is feasible and equals the parametric LP optimum.
pub fn clone_ceiling(copies: usize) -> Result<Rational> {
    if copies < 2 {
        return Err(Error::BadParams("clone ceiling needs at least two copies".into()));
    }
    let (mut lo, mut hi) = (zero(), one());
    if shareable_at(&hi, copies)? {
        return Ok(hi);
    }
    for _ in 0..BISECTION_STEPS {
        let mid = (&lo + &hi) * rat(1, 2);
        if shareable_at(&mid, copies)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let candidate = simplest_between(&lo, &hi);
    let exact = parametric_max(copies)?;
    let above = &candidate + rat(1, 1 << 20);
    if exact != candidate || !shareable_at(&candidate, copies)? || shareable_at(&above, copies)? {
        return Err(Error::Internal(format!(
            "bisection candidate {candidate} disagrees with parametric optimum {exact}"
        )));
    }
    Ok(exact)
}

/// `C_CLN`: the isotropic clone ceiling for two clones.
pub fn isotropic_clone_ceiling() -> Result<Rational> {
    clone_ceiling(2)
}

/// `C_CLN / C`, the factor by which an optimal symmetric two-clone map
/// must shrink the isotropic parameter; 1 when no shrinking is needed.
pub fn shrinking_factor(c: &Rational) -> Result<Rational> {
    if !c.is_positive() || *c > one() {
        return Err(Error::BadParams(format!("isotropic parameter {c} must lie in (0, 1]")));
    }
    let ceiling = isotropic_clone_ceiling()?;
    Ok(std::cmp::min(one(), ceiling / c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceiling_is_one_half() {
        assert_eq!(isotropic_clone_ceiling().unwrap(), rat(1, 2));
        assert_eq!(parametric_max(2).unwrap(), rat(1, 2));
    }

    #[test]
    fn shrinking_factor_values() {
        assert_eq!(shrinking_factor(&rat(3, 4)).unwrap(), rat(2, 3));
        assert_eq!(shrinking_factor(&rat(1, 2)).unwrap(), one());
        assert_eq!(shrinking_factor(&one()).unwrap(), rat(1, 2));
        assert!(shrinking_factor(&zero()).is_err());
    }
}
