//! Enumeration of structured packings of empty shelves into bins.

use std::ops::ControlFlow;

use num::{BigUint, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{ceil_to_u64, format_rational, Rational};

use super::RoundedItem;

/// Shelves of distinct heights `heights[0] > heights[1] > ...` packed into bins.
/// `bins[b][r]` is the number of shelves of height `heights[r]` in bin `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShelfPlan {
    pub heights: Vec<Rational>,
    pub bins: Vec<Vec<u32>>,
}

impl ShelfPlan {
    pub fn t(&self) -> usize {
        self.heights.len()
    }

    /// Shelves per height class over all bins.
    pub fn shelf_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.t()];
        for c in &self.bins {
            for (r, &x) in c.iter().enumerate() {
                counts[r] += u64::from(x);
            }
        }
        counts
    }

    /// `h_C`, the stacked height of bin `b`'s shelves.
    pub fn load(&self, b: usize) -> Rational {
        config_height(&self.bins[b], &self.heights)
    }

    /// Checks the plan is structured for `large` (distinct δ-large heights) and fits `max_bins` bins.
    pub fn check(&self, delta: &Rational, large: &[Rational], max_bins: usize) -> Result<()> {
        let bound = max_heights(delta)?;
        if self.t() as u64 > bound {
            return Err(Error::Contract(format!("{} distinct heights, at most {bound} allowed", self.t())));
        }
        if self.heights.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Contract("plan heights must strictly decrease".into()));
        }
        for h in &self.heights {
            if h <= delta || !large.contains(h) {
                return Err(Error::Contract(format!(
                    "shelf height {} is not the height of a large item",
                    format_rational(h)
                )));
            }
        }
        if self.bins.len() > max_bins {
            return Err(Error::Contract(format!("{} bins, at most {max_bins} allowed", self.bins.len())));
        }
        for (b, c) in self.bins.iter().enumerate() {
            if c.len() != self.t() {
                return Err(Error::Contract(format!("bin {b} has a configuration of the wrong length")));
            }
            if self.load(b) > Rational::one() {
                return Err(Error::Contract(format!("bin {b} holds shelves taller than the bin")));
            }
        }
        if self.shelf_counts().contains(&0) {
            return Err(Error::Contract("a plan height has no shelf".into()));
        }
        Ok(())
    }
}

fn config_height(c: &[u32], heights: &[Rational]) -> Rational {
    c.iter()
        .zip(heights)
        .map(|(&x, h)| h * Rational::from_integer(x.into()))
        .sum()
}

/// `⌈1/δ²⌉`, the allowed number of distinct shelf heights.
pub fn max_heights(delta: &Rational) -> Result<u64> {
    check_delta(delta)?;
    Ok(ceil_to_u64(&(delta * delta).recip()))
}

pub(crate) fn check_delta(delta: &Rational) -> Result<()> {
    if *delta <= Rational::zero() || *delta >= Rational::one() {
        return Err(Error::Domain(format!("delta {} outside (0,1)", format_rational(delta))));
    }
    Ok(())
}

/// Distinct heights of the δ-large members, tallest first.
pub fn large_heights(rounded: &[Vec<RoundedItem>], delta: &Rational) -> Vec<Rational> {
    let mut hs: Vec<Rational> = rounded
        .iter()
        .flatten()
        .filter(|r| r.height > *delta)
        .map(|r| r.height.clone())
        .collect();
    hs.sort_by(|a, b| b.cmp(a));
    hs.dedup();
    hs
}

/// All nonzero configurations over `heights` (lexicographically decreasing).
pub fn configurations(heights: &[Rational]) -> Vec<Vec<u32>> {
    fn rec(heights: &[Rational], r: usize, room: Rational, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if r == heights.len() {
            if cur.iter().any(|&x| x > 0) {
                out.push(cur.clone());
            }
            return;
        }
        let most = (&room / &heights[r]).floor().to_integer().to_u32().unwrap_or(u32::MAX);
        for x in (0..=most).rev() {
            cur.push(x);
            let rest = &room - &heights[r] * Rational::from_integer(x.into());
            rec(heights, r + 1, rest, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(heights, 0, Rational::one(), &mut Vec::new(), &mut out);
    out
}

/// Subsets of `0..n` with at most `s` elements, by size then lexicographically.
fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(n, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 0..=s.min(n) {
        rec(n, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Height subsets with their configurations, enumerated by number of bins.
#[derive(Debug, Clone)]
pub struct PlanSpace {
    pub large: Vec<Rational>,
    pub max_bins: usize,
    groups: Vec<(Vec<Rational>, Vec<Vec<u32>>)>,
}

impl PlanSpace {
    pub fn new(rounded: &[Vec<RoundedItem>], delta: &Rational) -> Result<Self> {
        let s = max_heights(delta)?;
        let large = large_heights(rounded, delta);
        let s = usize::try_from(s).unwrap_or(usize::MAX);
        let groups = subsets(large.len(), s)
            .into_iter()
            .map(|idx| {
                let hs: Vec<Rational> = idx.iter().map(|&i| large[i].clone()).collect();
                let configs = configurations(&hs);
                (hs, configs)
            })
            .collect();
        Ok(PlanSpace {
            large,
            max_bins: rounded.len(),
            groups,
        })
    }

    /// Calls `f` on every plan with exactly `m` bins; stops early when `f` breaks.
    pub fn level<F>(&self, m: usize, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(ShelfPlan) -> ControlFlow<()>,
    {
        if m > self.max_bins {
            return ControlFlow::Continue(());
        }
        for (hs, configs) in &self.groups {
            if hs.is_empty() {
                if m == 0 {
                    f(ShelfPlan {
                        heights: Vec::new(),
                        bins: Vec::new(),
                    })?;
                }
                continue;
            }
            if m == 0 || configs.is_empty() {
                continue;
            }
            let support = configs.iter().map(|c| c.iter().filter(|&&x| x > 0).count()).max().unwrap_or(0);
            if support * m < hs.len() {
                continue;
            }
            let mut chosen = Vec::with_capacity(m);
            let mut used = vec![0u32; hs.len()];
            multisets(configs, m, 0, support, &mut chosen, &mut used, &mut |picked: &[usize]| {
                f(ShelfPlan {
                    heights: hs.clone(),
                    bins: picked.iter().map(|&c| configs[c].clone()).collect(),
                })
            })?;
        }
        ControlFlow::Continue(())
    }

    /// Every plan, levels `0..=n` in order.
    pub fn for_each<F>(&self, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(ShelfPlan) -> ControlFlow<()>,
    {
        for m in 0..=self.max_bins {
            self.level(m, f)?;
        }
        ControlFlow::Continue(())
    }
}

// Nondecreasing config index sequences of length `m` whose shelves cover every height.
fn multisets<F>(
    configs: &[Vec<u32>],
    m: usize,
    start: usize,
    support: usize,
    chosen: &mut Vec<usize>,
    used: &mut [u32],
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let missing = used.iter().filter(|&&x| x == 0).count();
    if chosen.len() == m {
        if missing == 0 {
            return f(chosen);
        }
        return ControlFlow::Continue(());
    }
    if missing > support * (m - chosen.len()) {
        return ControlFlow::Continue(());
    }
    for c in start..configs.len() {
        chosen.push(c);
        for (u, &x) in used.iter_mut().zip(&configs[c]) {
            *u += x;
        }
        let flow = multisets(configs, m, c, support, chosen, used, f);
        for (u, &x) in used.iter_mut().zip(&configs[c]) {
            *u -= x;
        }
        chosen.pop();
        flow?;
    }
    ControlFlow::Continue(())
}

/// Outcome of a materialized enumeration.
#[derive(Debug, Clone)]
pub struct Guess {
    pub plans: Vec<ShelfPlan>,
    /// Set when the budget stopped the enumeration.
    pub truncated: bool,
}

/// All structured plans with at most `n` bins, or the first `budget` of them.
pub fn guess_shelves(rounded: &[Vec<RoundedItem>], delta: &Rational, budget: Option<u64>) -> Result<Guess> {
    let space = PlanSpace::new(rounded, delta)?;
    let mut plans = Vec::new();
    let mut truncated = false;
    let _ = space.for_each(&mut |plan| {
        if budget.is_some_and(|b| plans.len() as u64 >= b) {
            truncated = true;
            return ControlFlow::Break(());
        }
        plans.push(plan);
        ControlFlow::Continue(())
    });
    Ok(Guess { plans, truncated })
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `(N^S + 1) (n + 1)^R` with `S = ⌈1/δ²⌉` and `R = C(S + ⌈1/δ⌉ - 1, ⌈1/δ⌉ - 1)`.
pub fn plan_count_bound(total_items: usize, itemsets: usize, delta: &Rational) -> Result<BigUint> {
    let s = max_heights(delta)?;
    let per_bin = ceil_to_u64(&delta.recip()) - 1;
    let r = binomial(s + per_bin, per_bin);
    let r = r
        .to_u32()
        .ok_or_else(|| Error::TooLarge("plan count exponent does not fit in 32 bits".into()))?;
    let s = u32::try_from(s).map_err(|_| Error::TooLarge("too many shelf heights".into()))?;
    let big_n = BigUint::from(total_items);
    Ok((big_n.pow(s) + BigUint::one()) * BigUint::from(itemsets + 1).pow(r))
}
