//! Detection probabilities on d-regular trees, exactly at finite n and in
//! the large-n limit, together with the reinforced-urn machinery they rest
//! on and counts of the increasing trees a spread can build.
//!
//! The finite-n evaluator works through the marginal law of one source
//! branch: at most one branch can hold more than half the nodes, so the
//! probability that the source is a balance point is one minus d times the
//! single-branch tail. The branch law is a reinforced urn: color j starts
//! with one ball, every draw returns the ball plus d-2 copies.

use std::f64::consts::LN_2;

use num::{BigInt, BigRational, BigUint, One, Zero};
use statrs::function::gamma::ln_gamma;

use crate::numeric::{big_ratio, factorial};
use crate::rng::{rng_for, stage};
use crate::{Error, Result};

/// Reinforced urn: `initial[j]` balls of color j, and every draw returns the
/// drawn ball together with `reinforcement` extra copies of its color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UrnSpec {
    pub colors: usize,
    pub initial: Vec<u64>,
    pub reinforcement: u64,
    pub draws: usize,
}

impl UrnSpec {
    pub fn new(initial: Vec<u64>, reinforcement: u64, draws: usize) -> Result<UrnSpec> {
        if initial.is_empty() || initial.iter().any(|&b| b == 0) {
            return Err(Error::InvalidParam(
                "urn: need at least one color, each with at least one ball".into(),
            ));
        }
        Ok(UrnSpec {
            colors: initial.len(),
            initial,
            reinforcement,
            draws,
        })
    }

    /// The urn whose color counts follow the source's branch sizes on a
    /// d-regular tree after n nodes are infected: d colors, one ball each,
    /// d-2 extra balls per draw, n-1 draws.
    pub fn spreading(d: usize, n: usize) -> Result<UrnSpec> {
        if d < 2 || n == 0 {
            return Err(Error::InvalidParam(
                "spreading urn: need d >= 2 and n >= 1".into(),
            ));
        }
        UrnSpec::new(vec![1; d], (d - 2) as u64, n - 1)
    }
}

/// Branch sizes around the source (or urn color counts): non-negative parts
/// with a fixed total.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BranchComposition {
    pub parts: Vec<usize>,
}

impl BranchComposition {
    pub fn new(parts: Vec<usize>) -> BranchComposition {
        BranchComposition { parts }
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// True when no branch exceeds half of an n-node snapshot, i.e. the
    /// source is a balance point (possibly tied).
    pub fn is_balanced(&self, n: usize) -> bool {
        self.parts.iter().all(|&x| 2 * x <= n)
    }
}

fn rising_product(base: u64, step: u64, terms: usize) -> BigUint {
    let mut p = BigUint::one();
    for i in 0..terms {
        p *= BigUint::from(base + step * i as u64);
    }
    p
}

/// Exact probability that the urn draws end with the given color counts.
pub fn urn_joint_pmf(spec: &UrnSpec, outcome: &BranchComposition) -> Result<BigRational> {
    if outcome.parts.len() != spec.colors {
        return Err(Error::InvalidParam(format!(
            "urn pmf: outcome has {} parts for {} colors",
            outcome.parts.len(),
            spec.colors
        )));
    }
    if outcome.total() != spec.draws {
        return Err(Error::InvalidParam(format!(
            "urn pmf: outcome totals {} but there are {} draws",
            outcome.total(),
            spec.draws
        )));
    }
    let mut num = factorial(spec.draws);
    for (&b, &x) in spec.initial.iter().zip(&outcome.parts) {
        num *= rising_product(b, spec.reinforcement, x);
        num /= factorial(x);
    }
    let start: u64 = spec.initial.iter().sum();
    let den = rising_product(start, spec.reinforcement, spec.draws);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Draw-by-draw sample of the urn's final color counts.
pub fn urn_sample(spec: &UrnSpec, seed: u64) -> BranchComposition {
    let mut rng = rng_for(seed, 0, stage::URN);
    let mut balls: Vec<u128> = spec.initial.iter().map(|&b| b as u128).collect();
    let mut total: u128 = balls.iter().sum();
    let mut counts = vec![0usize; spec.colors];
    for _ in 0..spec.draws {
        let mut pick = rand::Rng::gen_range(&mut rng, 0..total);
        let mut color = spec.colors - 1;
        for (j, &b) in balls.iter().enumerate() {
            if pick < b {
                color = j;
                break;
            }
            pick -= b;
        }
        counts[color] += 1;
        balls[color] += spec.reinforcement as u128;
        total += spec.reinforcement as u128;
    }
    BranchComposition::new(counts)
}

/// Tie handling when a branch holds exactly half the snapshot: the balance
/// point set then has two nodes, and detection can count fully or by half.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieWeight {
    Full,
    Half,
}

fn validate_detection(d: usize, n: usize) -> Result<()> {
    if d < 2 || n == 0 {
        return Err(Error::InvalidParam(
            "detection probability: need d >= 2 and n >= 1".into(),
        ));
    }
    Ok(())
}

/// Exact probability that the source of an n-node spread on the d-regular
/// tree is a balance point of its own snapshot.
pub fn detection_prob_exact_rational(d: usize, n: usize, tie: TieWeight) -> Result<BigRational> {
    validate_detection(d, n)?;
    if n == 1 {
        return Ok(BigRational::one());
    }
    // One branch against the other d-1 merged: merging urn colors adds
    // their ball counts and keeps the law of the remaining color.
    let merged = UrnSpec::new(vec![1, (d - 1) as u64], (d - 2) as u64, n - 1)?;
    let mut tail = BigRational::zero();
    for x in (n / 2 + 1)..n {
        tail += urn_joint_pmf(&merged, &BranchComposition::new(vec![x, n - 1 - x]))?;
    }
    let mut p = BigRational::one() - big_ratio(d, 1) * tail;
    if tie == TieWeight::Half && n % 2 == 0 && n / 2 <= n - 1 {
        let at_half = urn_joint_pmf(&merged, &BranchComposition::new(vec![n / 2, n - 1 - n / 2]))?;
        p -= big_ratio(d, 2) * at_half;
    }
    Ok(p)
}

/// Closed form of the d=3 detection probability.
pub fn detection_prob_closed_form_d3(n: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidParam("closed form: need n >= 1".into()));
    }
    if n == 1 {
        return Ok(BigRational::one());
    }
    let (num, den) = if n % 2 == 0 {
        (n * n + 10 * n, 4 * n * n + 4 * n)
    } else {
        (n * n + 4 * n + 3, 4 * n * n + 4 * n)
    };
    Ok(big_ratio(num, den))
}

struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn new() -> KahanSum {
        KahanSum { sum: 0.0, carry: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Detection probability evaluated in the log domain with compensated
/// summation; matches the rational evaluator to full double precision and
/// stays feasible for n in the thousands.
pub fn detection_prob_exact_with_ties(d: usize, n: usize, tie: TieWeight) -> Result<f64> {
    validate_detection(d, n)?;
    if n == 1 {
        return Ok(1.0);
    }
    let m = (d - 2) as f64;
    let draws = n - 1;
    // Prefix log-sums of the three rising products in the branch law.
    let mut ln_one = vec![0.0f64; draws + 1];
    let mut ln_rest = vec![0.0f64; draws + 1];
    let mut ln_all = 0.0f64;
    for i in 0..draws {
        ln_one[i + 1] = ln_one[i] + (1.0 + m * i as f64).ln();
        ln_rest[i + 1] = ln_rest[i] + ((d - 1) as f64 + m * i as f64).ln();
        ln_all += (d as f64 + m * i as f64).ln();
    }
    let ln_draws_fact = ln_gamma(draws as f64 + 1.0);
    let term = |x: usize| -> f64 {
        let ln_choose =
            ln_draws_fact - ln_gamma(x as f64 + 1.0) - ln_gamma((draws - x) as f64 + 1.0);
        (ln_choose + ln_one[x] + ln_rest[draws - x] - ln_all).exp()
    };
    let mut tail = KahanSum::new();
    for x in (n / 2 + 1)..n {
        tail.add(term(x));
    }
    let mut p = 1.0 - d as f64 * tail.sum;
    if tie == TieWeight::Half && n % 2 == 0 {
        p -= d as f64 / 2.0 * term(n / 2);
    }
    Ok(p)
}

pub fn detection_prob_exact(d: usize, n: usize) -> Result<f64> {
    detection_prob_exact_with_ties(d, n, TieWeight::Full)
}

/// Limiting detection probability as n grows, for d >= 3.
///
/// The tail integral over the limiting branch-fraction density, times the d
/// branches and the density's normalizing prefactor, collapses to
/// (d/2)·[1 - 4^{-a}·G(1+2a)/G(1+a)^2] with a = 1/(d-2), which avoids the
/// 1/a blowup of the raw beta-function assembly for large d.
pub fn detection_prob_limit(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::InvalidParam(
            "limiting detection probability: need d >= 3".into(),
        ));
    }
    let a = 1.0 / (d as f64 - 2.0);
    let t = ln_gamma(1.0 + 2.0 * a) - 2.0 * ln_gamma(1.0 + a) - 2.0 * a * LN_2;
    let val = 1.0 + d as f64 / 2.0 * t.exp_m1();
    if d == 3 {
        debug_assert!((val - 0.25).abs() < 1e-12);
        return Ok(0.25);
    }
    Ok(val)
}

/// Iteration cap for the continued-fraction evaluation below.
const BETA_CF_MAX_ITERS: usize = 500;

/// Regularized incomplete beta function I_x(a, b), by Lentz's method on the
/// standard continued fraction, switched through the symmetry
/// I_x(a,b) = 1 - I_{1-x}(b,a) to the fast-converging side.
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !x.is_finite() {
        return Err(Error::InvalidParam(format!(
            "incomplete beta: x={x} outside [0, 1]"
        )));
    }
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::InvalidParam(format!(
            "incomplete beta: need a > 0 and b > 0, got a={a} b={b}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        return Ok(1.0 - incomplete_beta(1.0 - x, b, a)?);
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() + ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
    let tiny = 1e-300;
    let clamp = |v: f64| if v.abs() < tiny { tiny } else { v };
    let mut c = 1.0f64;
    let mut den = 1.0 / clamp(1.0 - (a + b) * x / (a + 1.0));
    let mut h = den;
    for it in 1..=BETA_CF_MAX_ITERS {
        let mf = it as f64;
        let even = mf * (b - mf) * x / ((a + 2.0 * mf - 1.0) * (a + 2.0 * mf));
        den = 1.0 / clamp(1.0 + even * den);
        c = clamp(1.0 + even / c);
        h *= den * c;
        let odd = -(a + mf) * (a + b + mf) * x / ((a + 2.0 * mf) * (a + 2.0 * mf + 1.0));
        den = 1.0 / clamp(1.0 + odd * den);
        c = clamp(1.0 + odd / c);
        let delta = den * c;
        h *= delta;
        if (delta - 1.0).abs() < 3e-16 {
            return Ok(ln_front.exp() * h / a);
        }
    }
    Err(Error::CapExceeded {
        what: "incomplete beta iterations",
        limit: BETA_CF_MAX_ITERS,
    })
}

/// Counts of n-node increasing trees grown by a spread on the d-regular
/// tree: first with every node opening d-1 slots (one branch), then with a
/// d-slot root (the whole source neighborhood; equals the number of length
/// n-1 spreading sequences).
pub fn increasing_tree_count(d: usize, n: usize) -> Result<(BigUint, BigUint)> {
    if d < 3 || n == 0 {
        return Err(Error::InvalidParam(
            "increasing tree count: need d >= 3 and n >= 1".into(),
        ));
    }
    let m = (d - 2) as u64;
    let per_branch = rising_product(1, m, n);
    let rooted_times_two = rising_product(2, m, n);
    debug_assert!((&rooted_times_two % BigUint::from(2u32)).is_zero());
    Ok((per_branch, rooted_times_two / BigUint::from(2u32)))
}
