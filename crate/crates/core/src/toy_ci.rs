//! Exact 1-D toy scheme u_{k+1} = u_k + ½(1 − u_k²) s(λ_k x) with s the 1-periodic square wave.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Piecewise-constant function on [0, 1]; `values[i]` holds on (breakpoints[i], breakpoints[i+1]].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseConstantFn {
    pub breakpoints: Vec<BigRational>,
    pub values: Vec<BigRational>,
}

impl PiecewiseConstantFn {
    pub fn new(breakpoints: Vec<BigRational>, values: Vec<BigRational>) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(Error::Shape(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                values.len()
            )));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return Err(Error::Shape("breakpoints must start at 0 and end at 1".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Shape("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn constant(c: BigRational) -> Self {
        Self {
            breakpoints: vec![BigRational::zero(), BigRational::one()],
            values: vec![c],
        }
    }

    pub fn zero() -> Self {
        Self::constant(BigRational::zero())
    }

    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    pub fn length(&self, i: usize) -> BigRational {
        &self.breakpoints[i + 1] - &self.breakpoints[i]
    }

    pub fn sup_abs(&self) -> BigRational {
        self.values
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn integral(&self, f: impl Fn(&BigRational) -> BigRational) -> BigRational {
        exact_sum((0..self.pieces()).map(|i| qmul(&self.length(i), &f(&self.values[i]))))
    }

    /// ∫₀¹ (1 − u²) dx.
    pub fn defect(&self) -> BigRational {
        self.integral(one_minus_sq)
    }

    /// Value on the piece containing the open interval (a, b) of a common refinement.
    fn value_on(&self, mid: &BigRational) -> &BigRational {
        let i = self.breakpoints.partition_point(|b| b < mid);
        &self.values[i.saturating_sub(1).min(self.pieces() - 1)]
    }

    /// self − other on the union of both partitions.
    pub fn sub(&self, other: &Self) -> Self {
        let mut bps: Vec<BigRational> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        bps.sort();
        bps.dedup();
        let two = rat(2, 1);
        let values = bps
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / &two;
                qsub(self.value_on(&mid), other.value_on(&mid))
            })
            .collect();
        Self {
            breakpoints: bps,
            values,
        }
    }

    /// Σ |jumps| at interior breakpoints (no wrap jump).
    pub fn total_variation(&self) -> BigRational {
        self.values
            .windows(2)
            .fold(BigRational::zero(), |acc, w| qadd(&acc, &qsub(&w[1], &w[0]).abs()))
    }

    pub fn l1(&self) -> BigRational {
        self.integral(|u| u.abs())
    }
}

fn pow2_exp(d: &BigInt) -> Option<u64> {
    let z = d.trailing_zeros().unwrap_or(0);
    (d >> z as usize).is_one().then_some(z)
}

/// n/d in lowest terms; power-of-two denominators are reduced by shifting instead of a gcd.
fn reduce(n: BigInt, d: BigInt) -> BigRational {
    if pow2_exp(&d).is_some() {
        if n.is_zero() {
            return BigRational::zero();
        }
        let z = n.trailing_zeros().unwrap_or(0).min(d.trailing_zeros().unwrap_or(0)) as usize;
        return BigRational::new_raw(n >> z, d >> z);
    }
    BigRational::new(n, d)
}

fn qmul(a: &BigRational, b: &BigRational) -> BigRational {
    reduce(a.numer() * b.numer(), a.denom() * b.denom())
}

fn qadd(a: &BigRational, b: &BigRational) -> BigRational {
    match (pow2_exp(a.denom()), pow2_exp(b.denom())) {
        (Some(ea), Some(eb)) => {
            let top = ea.max(eb);
            let n = (a.numer() << (top - ea) as usize) + (b.numer() << (top - eb) as usize);
            reduce(n, BigInt::one() << top as usize)
        }
        _ => a + b,
    }
}

fn qsub(a: &BigRational, b: &BigRational) -> BigRational {
    qadd(a, &-b)
}

/// 1 − u².
fn one_minus_sq(u: &BigRational) -> BigRational {
    let d2 = u.denom() * u.denom();
    reduce(&d2 - u.numer() * u.numer(), d2)
}

/// Exact sum; dyadic terms are aligned to the largest power-of-two denominator.
pub fn exact_sum(terms: impl Iterator<Item = BigRational>) -> BigRational {
    let terms: Vec<BigRational> = terms.collect();
    let exps: Option<Vec<u64>> = terms.iter().map(|t| pow2_exp(t.denom())).collect();
    match exps {
        Some(exps) => {
            let top = exps.iter().copied().max().unwrap_or(0);
            let num = terms
                .iter()
                .zip(&exps)
                .fold(BigInt::zero(), |acc, (t, e)| acc + (t.numer() << (top - e) as usize));
            reduce(num, BigInt::one() << top as usize)
        }
        None => terms.into_iter().fold(BigRational::zero(), |a, b| a + b),
    }
}

/// One toy step. Each piece must start on a multiple of 1/λ and span whole periods of s(λ·).
pub fn toy_step(u: &PiecewiseConstantFn, lambda: u64) -> Result<PiecewiseConstantFn> {
    if lambda == 0 {
        return Err(Error::Alignment("lambda must be a positive integer".into()));
    }
    if u.sup_abs() >= BigRational::one() {
        return Err(Error::Domain(format!(
            "sup|u| = {} is not below 1",
            u.sup_abs()
        )));
    }
    let lam = BigRational::from_integer(BigInt::from(lambda));
    let half = rat(1, 2);
    let half_period = BigRational::one() / (&lam * rat(2, 1));
    let mut breakpoints = vec![BigRational::zero()];
    let mut values = Vec::new();
    for i in 0..u.pieces() {
        let start = &u.breakpoints[i] * &lam;
        let periods = u.length(i) * &lam;
        if !start.is_integer() || !periods.is_integer() {
            return Err(Error::Alignment(format!(
                "piece {i} of length {} is not a whole number of periods of s({lambda}x)",
                u.length(i)
            )));
        }
        let amp = qmul(&half, &one_minus_sq(&u.values[i]));
        let up = qadd(&u.values[i], &amp);
        let down = qsub(&u.values[i], &amp);
        let halves = 2 * periods.to_integer().to_usize().unwrap_or(0);
        let mut x = u.breakpoints[i].clone();
        for h in 0..halves {
            x = qadd(&x, &half_period);
            breakpoints.push(x.clone());
            values.push(if h % 2 == 0 { up.clone() } else { down.clone() });
        }
    }
    Ok(PiecewiseConstantFn {
        breakpoints,
        values,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// λ_k = 2^(k + shift).
    Dyadic { shift: u32 },
    Explicit(Vec<u64>),
}

impl Schedule {
    pub fn lambda(&self, k: usize) -> Result<u64> {
        match self {
            Schedule::Dyadic { shift } => 1u64
                .checked_shl(k as u32 + shift)
                .filter(|_| (k as u32 + shift) < 63)
                .ok_or_else(|| Error::Config(format!("2^{} overflows", k as u32 + shift))),
            Schedule::Explicit(l) => l
                .get(k)
                .copied()
                .ok_or_else(|| Error::Config(format!("schedule has no entry for step {k}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyTrajectory {
    pub states: Vec<PiecewiseConstantFn>,
    pub lambdas: Vec<u64>,
    pub defects: Vec<BigRational>,
}

pub fn toy_run(u0: &PiecewiseConstantFn, schedule: &Schedule, steps: usize) -> Result<ToyTrajectory> {
    let mut states = vec![u0.clone()];
    let mut lambdas = Vec::with_capacity(steps);
    let mut defects = vec![u0.defect()];
    for k in 0..steps {
        let lam = schedule.lambda(k)?;
        let next = toy_step(&states[k], lam)?;
        defects.push(next.defect());
        lambdas.push(lam);
        states.push(next);
    }
    Ok(ToyTrajectory {
        states,
        lambdas,
        defects,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncrementRow {
    pub k: usize,
    pub lambda: u64,
    pub l1: BigRational,
    pub tv: BigRational,
}

/// ‖u_{k+1} − u_k‖_{L¹} and TV(u_{k+1} − u_k) for every step.
pub fn increment_norms(traj: &ToyTrajectory) -> Result<Vec<IncrementRow>> {
    if traj.states.len() < 2 {
        return Err(Error::Shape("trajectory needs at least two states".into()));
    }
    Ok((0..traj.states.len() - 1)
        .map(|k| {
            let w = traj.states[k + 1].sub(&traj.states[k]);
            IncrementRow {
                k,
                lambda: traj.lambdas[k],
                l1: w.l1(),
                tv: w.total_variation(),
            }
        })
        .collect())
}

/// Per parent piece: mean of 1 − u_{k+1}² over the children equals E(1 − E/4), E = 1 − u_k².
pub fn averaged_defect_recursion_check(traj: &ToyTrajectory) -> bool {
    let quarter = rat(1, 4);
    traj.states.windows(2).all(|w| {
        let (parent, child) = (&w[0], &w[1]);
        let mut j = 0;
        for i in 0..parent.pieces() {
            let e = one_minus_sq(&parent.values[i]);
            let target = qmul(&e, &qsub(&BigRational::one(), &qmul(&e, &quarter)));
            let mut terms = Vec::new();
            while j < child.pieces() && child.breakpoints[j + 1] <= parent.breakpoints[i + 1] {
                terms.push(qmul(&child.length(j), &one_minus_sq(&child.values[j])));
                j += 1;
            }
            let acc = exact_sum(terms.into_iter());
            if acc != qmul(&target, &parent.length(i)) {
                return false;
            }
        }
        j == child.pieces()
    })
}

/// defects[k]·8^k ≤ 7^k·defects[0] as an exact inequality, for every recorded k.
pub fn lemma_bound_holds(traj: &ToyTrajectory) -> bool {
    let seven = BigInt::from(7);
    let eight = BigInt::from(8);
    traj.defects.iter().enumerate().all(|(k, d)| {
        let lhs = d * BigRational::from_integer(num_traits::pow(eight.clone(), k));
        let rhs = &traj.defects[0] * BigRational::from_integer(num_traits::pow(seven.clone(), k));
        lhs <= rhs
    })
}

/// Every consecutive ratio defects[k+1]/defects[k] lies in [3/4, 7/8].
pub fn ratios_in_band(traj: &ToyTrajectory) -> bool {
    let lo = rat(3, 4);
    let hi = rat(7, 8);
    traj.defects.windows(2).all(|w| {
        if w[0].is_zero() {
            return w[1].is_zero();
        }
        let r = &w[1] / &w[0];
        r >= lo && r <= hi
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToyCsvRow {
    pub k: usize,
    pub lambda_k: u64,
    pub defect: String,
    pub defect_float: f64,
    pub l1_increment: f64,
    pub tv_increment: f64,
}

/// Rows k = 0..=steps; the increment columns are 0 on the last row (no next state).
pub fn toy_table(traj: &ToyTrajectory) -> Result<Vec<ToyCsvRow>> {
    let inc = increment_norms(traj)?;
    Ok(traj
        .defects
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let (lam, l1, tv) = match inc.get(k) {
                Some(r) => (r.lambda, to_f64(&r.l1), to_f64(&r.tv)),
                None => (0, 0.0, 0.0),
            };
            ToyCsvRow {
                k,
                lambda_k: lam,
                defect: d.to_string(),
                defect_float: to_f64(d),
                l1_increment: l1,
                tv_increment: tv,
            }
        })
        .collect())
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_from_zero() {
        let u = toy_step(&PiecewiseConstantFn::zero(), 1).unwrap();
        assert_eq!(u.values, vec![rat(1, 2), rat(-1, 2)]);
        assert_eq!(u.breakpoints, vec![rat(0, 1), rat(1, 2), rat(1, 1)]);
        assert_eq!(u.defect(), rat(3, 4));
    }

    #[test]
    fn two_steps_oracle() {
        let t = toy_run(&PiecewiseConstantFn::zero(), &Schedule::Dyadic { shift: 0 }, 2).unwrap();
        assert_eq!(t.states[2].values, vec![rat(7, 8), rat(1, 8), rat(-1, 8), rat(-7, 8)]);
        assert_eq!(t.defects, vec![rat(1, 1), rat(3, 4), rat(39, 64)]);
        let inc = increment_norms(&t).unwrap();
        assert_eq!(inc[0].l1, rat(1, 2));
        assert_eq!(inc[1].l1, rat(3, 8));
        assert!(averaged_defect_recursion_check(&t));
    }

    #[test]
    fn alignment_and_domain_errors() {
        let u = toy_step(&PiecewiseConstantFn::zero(), 1).unwrap();
        assert!(matches!(toy_step(&u, 1), Err(Error::Alignment(_))));
        assert!(matches!(toy_step(&u, 3), Err(Error::Alignment(_))));
        let one = PiecewiseConstantFn::constant(rat(1, 1));
        assert!(matches!(toy_step(&one, 1), Err(Error::Domain(_))));
        assert!(matches!(toy_step(&u, 0), Err(Error::Alignment(_))));
    }

    #[test]
    fn near_fixed_point_barely_moves() {
        let c = rat(999, 1000);
        let u = toy_step(&PiecewiseConstantFn::constant(c.clone()), 1).unwrap();
        for v in &u.values {
            assert!((v - &c).abs() <= rat(1, 1000));
        }
    }

    #[test]
    fn zero_defect_piece_is_a_fixed_point_of_the_average() {
        // E = 0 cannot occur with sup|u| < 1; the per-piece identity still maps E = 1 to 3/4
        let e = BigRational::one();
        assert_eq!(&e * (BigRational::one() - &e / rat(4, 1)), rat(3, 4));
    }

    #[test]
    fn exact_sum_paths_agree() {
        let dy = vec![rat(3, 8), rat(-5, 64), rat(1, 1), rat(7, 2)];
        let mixed = vec![rat(1, 3), rat(1, 6), rat(1, 2)];
        let fold = |v: &Vec<BigRational>| v.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(exact_sum(dy.clone().into_iter()), fold(&dy));
        assert_eq!(exact_sum(mixed.clone().into_iter()), rat(1, 1));
        assert_eq!(exact_sum(std::iter::empty()), BigRational::zero());
    }

    #[test]
    fn fast_arithmetic_matches_generic() {
        let xs = [rat(3, 8), rat(-5, 64), rat(1, 3), rat(0, 1), rat(7, 6), rat(-1, 2)];
        for a in &xs {
            assert_eq!(one_minus_sq(a), BigRational::one() - a * a);
            for b in &xs {
                assert_eq!(qmul(a, b), a * b);
                assert_eq!(qadd(a, b), a + b);
                assert_eq!(qsub(a, b), a - b);
            }
        }
    }

    #[test]
    fn table_rows() {
        let t = toy_run(&PiecewiseConstantFn::zero(), &Schedule::Dyadic { shift: 0 }, 2).unwrap();
        let rows = toy_table(&t).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].defect, "39/64");
        assert_eq!(rows[1].l1_increment, 0.375);
    }
}
