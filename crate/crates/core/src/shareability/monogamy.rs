use crate::bell::{chsh_functional, unique_ns_maximizer, BellFunctional};
use crate::correlation::CorrelationBox;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};
use crate::polytope::nonsignaling_lp;
use crate::rational::{one, rat, zero, Rational};
use crate::scenario::{PartySubset, Scenario};
use rayon::prelude::*;

fn pair(parties: [usize; 2]) -> PartySubset {
    PartySubset::new(parties.to_vec(), 3).expect("valid pair of three parties")
}

fn maximize(lp: &mut LinearProgram, objective: &BellFunctional) -> Result<Rational> {
    lp.set_objective(objective.coefficients().to_vec());
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(value + objective.offset()),
        other => Err(Error::Internal(format!("monogamy LP returned {:?}", other.status()))),
    }
}

/// Maximum CHSH value of the Alice-Clare marginal over tripartite binary
/// nonsignaling boxes whose Alice-Bob marginal has CHSH value at least `beta`.
pub fn monogamy_tradeoff(beta: &Rational) -> Result<Rational> {
    if *beta < -one() || *beta > one() {
        return Err(Error::BadParams(format!("beta = {beta} must lie in [-1, 1]")));
    }
    let s = Scenario::uniform(3, 2, 2);
    let ab = chsh_functional().lift(&s, &pair([0, 1]))?;
    let ac = chsh_functional().lift(&s, &pair([0, 2]))?;
    let mut lp = nonsignaling_lp(&s);
    lp.add_ge(ab.coefficients().to_vec(), beta - ab.offset());
    maximize(&mut lp, &ac)
}

/// [`monogamy_tradeoff`] over a grid, solved in parallel; output follows
/// the input order.
pub fn monogamy_scan(betas: &[Rational]) -> Result<Vec<(Rational, Rational)>> {
    betas
        .par_iter()
        .map(|b| monogamy_tradeoff(b).map(|v| (b.clone(), v)))
        .collect()
}

/// Range `(max, min)` of `g` on the Alice-Clare marginal over tripartite
/// nonsignaling boxes whose Alice-Bob marginal attains the nonsignaling
/// maximum of `f`. Requires `f` to have a unique maximizer.
pub fn unique_violator_decoupling(f: &BellFunctional, g: &BellFunctional) -> Result<(Rational, Rational)> {
    let (fs, gs) = (f.scenario(), g.scenario());
    if fs.parties() != 2 || gs.parties() != 2 || fs.restrict(&[0]) != gs.restrict(&[0]) {
        return Err(Error::ScenarioMismatch(format!("f on {fs} and g on {gs} must share Alice")));
    }
    let m = unique_ns_maximizer(f)?;
    if !m.unique {
        return Err(Error::NotUniqueMaximizer);
    }
    let s = fs.concat(&gs.restrict(&[1]));
    let fl = f.lift(&s, &pair([0, 1]))?;
    let gl = g.lift(&s, &pair([0, 2]))?;
    let mut lp = nonsignaling_lp(&s);
    lp.add_eq(fl.coefficients().to_vec(), &m.value - fl.offset());
    let max = maximize(&mut lp, &gl)?;
    let neg = BellFunctional::new(s.clone(), gl.coefficients().iter().map(|c| -c).collect(), -gl.offset())?;
    let min = -maximize(&mut lp, &neg)?;
    Ok((max, min))
}

/// The tripartite box `1/2 PR^{AB}_{0,1} N^C_{0,1} + 1/2 PR^{AC}_{2,3} N^B_{2,3}`
/// with four outputs and two inputs per party.
pub fn polygamy_example() -> CorrelationBox {
    let s = Scenario::uniform(3, 2, 4);
    let pr_block = |a: usize, b: usize, x: usize, y: usize, base: usize| {
        (base..base + 2).contains(&a) && (base..base + 2).contains(&b) && ((a - base) ^ (b - base)) == x * y
    };
    CorrelationBox::from_fn(s, |x, a| {
        let mut p = zero();
        if pr_block(a[0], a[1], x[0], x[1], 0) && a[2] < 2 {
            p += rat(1, 8);
        }
        if pr_block(a[0], a[2], x[0], x[2], 2) && (2..4).contains(&a[1]) {
            p += rat(1, 8);
        }
        p
    })
    .expect("polygamy box is normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{cglmp, correlator_functional};
    use crate::correlation::Relabeling;
    use crate::locality::is_local;

    #[test]
    fn tradeoff_endpoints() {
        assert_eq!(monogamy_tradeoff(&-one()).unwrap(), one());
        assert!(monogamy_tradeoff(&one()).unwrap() <= zero());
        assert!(monogamy_tradeoff(&rat(1, 4)).unwrap() <= zero());
        assert!(monogamy_tradeoff(&rat(2, 1)).is_err());
    }

    #[test]
    fn scan_preserves_order_and_is_nonincreasing() {
        let grid: Vec<Rational> = (-4..=4).map(|k| rat(k, 4)).collect();
        let out = monogamy_scan(&grid).unwrap();
        assert_eq!(out.iter().map(|(b, _)| b.clone()).collect::<Vec<_>>(), grid);
        assert!(out.windows(2).all(|w| w[1].1 <= w[0].1));
    }

    #[test]
    fn chsh_decouples_clare() {
        let (max, min) = unique_violator_decoupling(&chsh_functional(), &correlator_functional(0, 0)).unwrap();
        assert_eq!((max, min), (zero(), zero()));
        let constant = BellFunctional::new(Scenario::chsh(), vec![zero(); 16], rat(3, 7)).unwrap();
        assert_eq!(unique_violator_decoupling(&chsh_functional(), &constant).unwrap(), (rat(3, 7), rat(3, 7)));
    }

    #[test]
    fn non_unique_functional_rejected() {
        let z = BellFunctional::zero(Scenario::chsh());
        assert_eq!(unique_violator_decoupling(&z, &z), Err(Error::NotUniqueMaximizer));
    }

    #[test]
    fn cglmp_covariance_vanishes() {
        let f = cglmp(3).unwrap();
        let pmax = unique_ns_maximizer(&f).unwrap().maximizer.unwrap();
        let s = f.scenario().clone();
        // P(a=1, c=2 | x=1, z=0) - P_MAX(a=1 | x=1) P(c=2 | z=0)
        let pa = pmax.party_distribution(0, 1).unwrap()[1].clone();
        let g = BellFunctional::from_fn(s, zero(), |x, a| {
            if x != [1, 0] || a[1] != 2 {
                return zero();
            }
            let hit = if a[0] == 1 { one() } else { zero() };
            hit - &pa
        });
        let (max, min) = unique_violator_decoupling(&f, &g).unwrap();
        assert_eq!(max, min);
        assert_eq!(max, zero());
    }

    #[test]
    fn polygamy_marginals_nonlocal_and_symmetric() {
        let p = polygamy_example();
        assert!(p.is_nonsignaling());
        for m in [p.marginal_of(&[0, 1]).unwrap(), p.marginal_of(&[0, 2]).unwrap()] {
            assert!(!is_local(&m).unwrap().is_local());
        }
        let shift: Vec<usize> = vec![2, 3, 0, 1];
        let r = Relabeling {
            input_perms: vec![vec![0, 1]; 3],
            output_perms: vec![vec![shift.clone(); 2]; 3],
        };
        let swapped = p.permute_parties(&[0, 2, 1]).unwrap().relabel(&r).unwrap();
        assert_eq!(swapped, p);
    }
}
