#![allow(dead_code)]

use boxlab::lp::{LinearProgram, LpStatus};
use boxlab::polytope::{nonsignaling_vertices_2222, DeterministicStrategy};
use boxlab::{rat, CorrelationBox, LocalModel, Rational, Scenario};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Random rational weights summing to one, roughly half of them zero.
pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    loop {
        let raw: Vec<i64> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..=9) } else { 0 })
            .collect();
        let total: i64 = raw.iter().sum();
        if total > 0 {
            return raw.into_iter().map(|w| rat(w, total)).collect();
        }
    }
}

/// Random mixture of the 24 two-party binary nonsignaling vertices.
pub fn random_ns_box(rng: &mut ChaCha8Rng) -> CorrelationBox {
    let vertices = nonsignaling_vertices_2222();
    let weights = random_weights(rng, vertices.len());
    let parts: Vec<(&CorrelationBox, Rational)> = vertices.iter().zip(weights).collect();
    CorrelationBox::mix(&parts).unwrap()
}

/// Random mixture with a few vertices only, so that a good share is nonlocal.
pub fn random_sparse_ns_box(rng: &mut ChaCha8Rng) -> CorrelationBox {
    let vertices = nonsignaling_vertices_2222();
    let k = rng.gen_range(1..=3);
    let picks: Vec<usize> = (0..k).map(|_| rng.gen_range(0..vertices.len())).collect();
    let weights = random_weights_dense(rng, k);
    let parts: Vec<(&CorrelationBox, Rational)> = picks.iter().map(|&i| &vertices[i]).zip(weights).collect();
    CorrelationBox::mix(&parts).unwrap()
}

fn random_weights_dense(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| rat(w, total)).collect()
}

pub fn random_local_model(rng: &mut ChaCha8Rng, s: &Scenario) -> LocalModel {
    let count = DeterministicStrategy::count(s) as usize;
    let k = rng.gen_range(1..=4);
    let strategies: Vec<DeterministicStrategy> = (0..k).map(|_| DeterministicStrategy::nth(s, rng.gen_range(0..count))).collect();
    let weights = random_weights_dense(rng, k);
    LocalModel::new(strategies, weights).unwrap()
}

/// Independent brute-force solver for small LPs whose variables all have
/// finite lower bounds: enumerates basic solutions and extreme rays.
pub struct BruteForce {
    pub status: LpStatus,
    pub value: Option<Rational>,
}

struct Row {
    coeffs: Vec<Rational>,
    rhs: Rational,
}

fn solve_square(rows: &[&Row], n: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            let mut v = r.coeffs.clone();
            v.push(r.rhs.clone());
            v
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v /= &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (cell, p) in m[r].iter_mut().zip(&pivot_row) {
                    *cell -= &f * p;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// Vertices of `{eqs =, les <=}` in `n` variables: every `n`-subset of the
/// constraints with a unique solution that satisfies all of them.
fn vertices(eqs: &[Row], les: &[Row], n: usize) -> Vec<Vec<Rational>> {
    let all: Vec<&Row> = eqs.iter().chain(les).collect();
    let mut out = Vec::new();
    combinations(all.len(), n, &mut |pick| {
        let rows: Vec<&Row> = pick.iter().map(|&i| all[i]).collect();
        if let Some(x) = solve_square(&rows, n) {
            let ok = eqs.iter().all(|r| dot(&r.coeffs, &x) == r.rhs) && les.iter().all(|r| dot(&r.coeffs, &x) <= r.rhs);
            if ok {
                out.push(x);
            }
        }
    });
    out
}

pub fn brute_force(lp: &LinearProgram) -> BruteForce {
    let n = lp.num_vars();
    let eqs: Vec<Row> = lp.equalities.iter().map(|c| Row { coeffs: c.coeffs.clone(), rhs: c.rhs.clone() }).collect();
    let mut les: Vec<Row> = lp.inequalities.iter().map(|c| Row { coeffs: c.coeffs.clone(), rhs: c.rhs.clone() }).collect();
    let unit = |j: usize, s: Rational| {
        let mut v = vec![Rational::zero(); n];
        v[j] = s;
        v
    };
    for j in 0..n {
        let l = lp.lower[j].clone().expect("brute force needs finite lower bounds");
        les.push(Row { coeffs: unit(j, -Rational::one()), rhs: -l });
        if let Some(u) = &lp.upper[j] {
            les.push(Row { coeffs: unit(j, Rational::one()), rhs: u.clone() });
        }
    }
    let points = vertices(&eqs, &les, n);
    if points.is_empty() {
        return BruteForce { status: LpStatus::Infeasible, value: None };
    }
    // extreme rays: recession cone intersected with sum(d) = 1
    let mut ray_eqs: Vec<Row> = eqs.iter().map(|r| Row { coeffs: r.coeffs.clone(), rhs: Rational::zero() }).collect();
    ray_eqs.push(Row { coeffs: vec![Rational::one(); n], rhs: Rational::one() });
    let ray_les: Vec<Row> = les.iter().map(|r| Row { coeffs: r.coeffs.clone(), rhs: Rational::zero() }).collect();
    let rays = vertices(&ray_eqs, &ray_les, n);
    if rays.iter().any(|d| dot(&lp.objective, d).is_positive()) {
        return BruteForce { status: LpStatus::Unbounded, value: None };
    }
    let best = points.iter().map(|p| dot(&lp.objective, p)).max().unwrap();
    BruteForce { status: LpStatus::Optimal, value: Some(best) }
}

/// Small random LP with finite lower bounds.
pub fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=6);
    let mut lp = LinearProgram::new(n);
    let coef = |rng: &mut ChaCha8Rng| Rational::from_integer(rng.gen_range(-3i64..=3).into());
    let n_eq = if n > 1 { rng.gen_range(0..=2.min(n - 1)) } else { 0 };
    let n_le = rng.gen_range(0..=if n > 4 { 2 } else { 3 });
    for _ in 0..n_eq {
        let row: Vec<Rational> = (0..n).map(|_| coef(rng)).collect();
        let rhs = coef(rng);
        lp.add_eq(row, rhs);
    }
    for _ in 0..n_le {
        let row: Vec<Rational> = (0..n).map(|_| coef(rng)).collect();
        let rhs = Rational::from_integer(rng.gen_range(-2i64..=6).into());
        lp.add_le(row, rhs);
    }
    for j in 0..n {
        let lower = Rational::from_integer(rng.gen_range(-2i64..=1).into());
        let upper = rng.gen_bool(0.3).then(|| &lower + Rational::from_integer(rng.gen_range(0i64..=4).into()));
        lp.set_bounds(j, Some(lower), upper);
    }
    lp.set_objective((0..n).map(|_| coef(rng)).collect());
    lp
}
