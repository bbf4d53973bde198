//! Exhaustive solvers for tiny instances, used as ground truth.
//!
//! Every routine has a hard size cap and fails with [`Error::TooLarge`] beyond it.

use std::collections::HashMap;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dff::WeightingFn;
use crate::error::{Error, Result};
use crate::model::{check_items, check_itemsets, Item, Itemset, RotationPolicy};
use crate::numeric::{format_rational, rat, Rational};

pub const MAX_1BP_ITEMS: usize = 15;
pub const MAX_DBP_ITEMS: usize = 5;
pub const MAX_DBP_DIM: usize = 3;
pub const MAX_MCKS_SELECTIONS: u64 = 100_000;

/// Minimum number of bins of size `capacity` holding `sizes`.
pub fn opt_1bp_exact(sizes: &[Rational], capacity: &Rational) -> Result<usize> {
    if sizes.len() > MAX_1BP_ITEMS {
        return Err(Error::TooLarge(format!("{} items, limit {MAX_1BP_ITEMS}", sizes.len())));
    }
    if let Some(s) = sizes.iter().find(|s| *s > capacity) {
        return Err(Error::Infeasible(format!("size {} exceeds capacity", format_rational(s))));
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    // first-fit decreasing seeds the incumbent
    let mut loads: Vec<Rational> = Vec::new();
    for s in &sorted {
        match loads.iter_mut().find(|l| &**l + s <= *capacity) {
            Some(l) => *l += s,
            None => loads.push(s.clone()),
        }
    }
    let mut best = loads.len();
    let total: Rational = sorted.iter().sum();
    let lower = (total / capacity).ceil().to_integer();
    let lower: usize = lower.try_into().unwrap_or(usize::MAX);
    if best <= lower {
        return Ok(best);
    }
    fn search(i: usize, sorted: &[Rational], cap: &Rational, loads: &mut Vec<Rational>, best: &mut usize, lower: usize) {
        if *best == lower {
            return;
        }
        if i == sorted.len() {
            *best = (*best).min(loads.len());
            return;
        }
        for b in 0..loads.len() {
            // bins with equal load are interchangeable
            if loads[..b].contains(&loads[b]) {
                continue;
            }
            if &loads[b] + &sorted[i] <= *cap {
                loads[b] += &sorted[i];
                search(i + 1, sorted, cap, loads, best, lower);
                loads[b] -= &sorted[i];
            }
        }
        if loads.len() + 1 < *best {
            loads.push(sorted[i].clone());
            search(i + 1, sorted, cap, loads, best, lower);
            loads.pop();
        }
    }
    search(0, &sorted, capacity, &mut Vec::new(), &mut best, lower);
    Ok(best)
}

/// Whether `items` fit together in one box of size `container`, each in some orientation
/// allowed by `policy`.
///
/// Positions are restricted to sums of item lengths along each axis, which loses no
/// packings: pushing every item down and left as far as possible yields such coordinates.
pub fn fits_in_box(items: &[Item], container: &[Rational], policy: &RotationPolicy) -> bool {
    let d = container.len();
    if items.is_empty() {
        return true;
    }
    let shapes: Vec<Vec<Vec<Rational>>> = items
        .iter()
        .map(|it| {
            let mut out: Vec<Vec<Rational>> = Vec::new();
            for perm in policy.permutations(d) {
                let l: Vec<Rational> = perm.iter().map(|&a| it.lengths[a].clone()).collect();
                if l.iter().zip(container).all(|(x, c)| x <= c) && !out.contains(&l) {
                    out.push(l);
                }
            }
            out
        })
        .collect();
    if shapes.iter().any(Vec::is_empty) {
        return false;
    }
    let volume: Rational = items.iter().map(Item::volume).sum();
    if volume > container.iter().product::<Rational>() {
        return false;
    }
    // coordinate candidates per axis: subset sums of lengths that can lie along it
    let mut candidates: Vec<Vec<Rational>> = Vec::with_capacity(d);
    for (j, cap) in container.iter().enumerate() {
        let mut sums = vec![Rational::zero()];
        for shape in &shapes {
            let mut lens: Vec<&Rational> = shape.iter().map(|l| &l[j]).collect();
            lens.sort();
            lens.dedup();
            let mut next = sums.clone();
            for s in &sums {
                for l in &lens {
                    let t = s + *l;
                    if t < *cap {
                        next.push(t);
                    }
                }
            }
            next.sort();
            next.dedup();
            sums = next;
        }
        candidates.push(sums);
    }
    let n = items.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| items[b].volume().cmp(&items[a].volume()));
    let shapes: Vec<Vec<Vec<Rational>>> = order.iter().map(|&i| shapes[i].clone()).collect();

    struct Search<'a> {
        shapes: &'a [Vec<Vec<Rational>>],
        candidates: &'a [Vec<Rational>],
        container: &'a [Rational],
        placed: Vec<(Vec<Rational>, Vec<Rational>)>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn free(&self, pos: &[Rational], len: &[Rational]) -> bool {
            self.placed.iter().all(|(p, l)| {
                (0..pos.len()).any(|j| pos[j] >= &p[j] + &l[j] || p[j] >= &pos[j] + &len[j])
            })
        }

        // Items are placed in lexicographic order of position (last axis most significant).
        fn run(&mut self, last: Option<&[Rational]>) -> bool {
            if self.used.iter().all(|&u| u) {
                return true;
            }
            let d = self.container.len();
            let n = self.shapes.len();
            for i in 0..n {
                if self.used[i] {
                    continue;
                }
                // identical shapes are interchangeable: only the first unused one moves
                if (0..i).any(|h| !self.used[h] && self.shapes[h] == self.shapes[i]) {
                    continue;
                }
                for len in &self.shapes[i] {
                    let mut pos: Vec<usize> = vec![0; d];
                    'positions: loop {
                        let p: Vec<Rational> = (0..d).map(|j| self.candidates[j][pos[j]].clone()).collect();
                        let in_box = (0..d).all(|j| &p[j] + &len[j] <= self.container[j]);
                        let ordered = match last {
                            None => true,
                            Some(prev) => {
                                let mut ord = std::cmp::Ordering::Equal;
                                for j in (0..d).rev() {
                                    ord = p[j].cmp(&prev[j]);
                                    if ord != std::cmp::Ordering::Equal {
                                        break;
                                    }
                                }
                                ord != std::cmp::Ordering::Less
                            }
                        };
                        if in_box && ordered && self.free(&p, len) {
                            self.used[i] = true;
                            self.placed.push((p.clone(), len.clone()));
                            let ok = self.run(Some(&p));
                            self.placed.pop();
                            self.used[i] = false;
                            if ok {
                                return true;
                            }
                        }
                        // odometer over candidate indices
                        let mut j = 0;
                        loop {
                            if j == d {
                                break 'positions;
                            }
                            pos[j] += 1;
                            if pos[j] < self.candidates[j].len() {
                                break;
                            }
                            pos[j] = 0;
                            j += 1;
                        }
                    }
                }
            }
            false
        }
    }

    let mut s = Search {
        shapes: &shapes,
        candidates: &candidates,
        container,
        placed: Vec::new(),
        used: vec![false; n],
    };
    s.run(None)
}

fn check_dbp_size(items: &[Item]) -> Result<usize> {
    let d = check_items(items)?.unwrap_or(1);
    if items.len() > MAX_DBP_ITEMS || d > MAX_DBP_DIM {
        return Err(Error::TooLarge(format!(
            "{} items in {d} dimensions, limit {MAX_DBP_ITEMS} items and {MAX_DBP_DIM} dimensions",
            items.len()
        )));
    }
    Ok(d)
}

/// Minimum number of unit bins for `items` under `policy`.
pub fn opt_dbp_exact(items: &[Item], policy: &RotationPolicy) -> Result<usize> {
    let d = check_dbp_size(items)?;
    let n = items.len();
    let unit = vec![Rational::one(); d];
    for it in items {
        if !fits_in_box(std::slice::from_ref(it), &unit, policy) {
            return Err(Error::Infeasible(format!("item {} fits no bin", it.id)));
        }
    }
    let full = (1usize << n) - 1;
    let mut feasible = vec![false; full + 1];
    for mask in 1..=full {
        let subset: Vec<Item> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| items[i].clone()).collect();
        // a subset of an infeasible set is checked on its own; supersets of infeasible sets are skipped
        let sub_ok = (0..n).filter(|i| mask >> i & 1 == 1).all(|i| {
            let m = mask & !(1 << i);
            m == 0 || feasible[m]
        });
        feasible[mask] = sub_ok && fits_in_box(&subset, &unit, policy);
    }
    let mut best = vec![usize::MAX; full + 1];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let mut sub = mask;
        while sub > 0 {
            if sub & low != 0 && feasible[sub] && best[mask ^ sub] != usize::MAX {
                best[mask] = best[mask].min(best[mask ^ sub] + 1);
            }
            sub = (sub - 1) & mask;
        }
    }
    Ok(best[full])
}

/// Least strip height for `items` in a unit-base strip, without rotations.
///
/// The optimal height of a compacted packing is a sum of item heights, so those sums are
/// tried in increasing order.
pub fn opt_sp_exact(items: &[Item]) -> Result<Rational> {
    let d = check_dbp_size(items)?;
    if items.is_empty() {
        return Ok(Rational::zero());
    }
    if d < 2 {
        return Err(Error::Input("strip packing needs at least two dimensions".into()));
    }
    let tallest = items.iter().map(|it| it.height().clone()).max().expect("non-empty");
    let mut sums = vec![Rational::zero()];
    for it in items {
        let mut next = sums.clone();
        next.extend(sums.iter().map(|s| s + it.height()));
        next.sort();
        next.dedup();
        sums = next;
    }
    for h in sums.into_iter().filter(|h| *h >= tallest) {
        let mut container = vec![Rational::one(); d];
        container[d - 1] = h.clone();
        if fits_in_box(items, &container, &RotationPolicy::None) {
            return Ok(h);
        }
    }
    Err(Error::Contract("stacking every item must fit".into()))
}

/// Largest profit of at most one member per itemset packed together in one unit bin.
pub fn opt_mcks_exact(itemsets: &[Itemset], policy: &RotationPolicy) -> Result<Rational> {
    let d = check_itemsets(itemsets)?.unwrap_or(1);
    let mut count: u64 = 1;
    for set in itemsets {
        count = count.saturating_mul(set.members.len() as u64 + 1);
        if count > MAX_MCKS_SELECTIONS {
            return Err(Error::TooLarge(format!("more than {MAX_MCKS_SELECTIONS} selections")));
        }
    }
    if itemsets.len() > MAX_DBP_ITEMS || d > MAX_DBP_DIM {
        return Err(Error::TooLarge(format!(
            "{} itemsets in {d} dimensions, limit {MAX_DBP_ITEMS} and {MAX_DBP_DIM}",
            itemsets.len()
        )));
    }
    let unit = vec![Rational::one(); d];
    let mut selections: Vec<(Rational, Vec<(usize, usize)>)> = vec![(Rational::zero(), Vec::new())];
    for (j, set) in itemsets.iter().enumerate() {
        let mut next = Vec::with_capacity(selections.len() * (set.members.len() + 1));
        for (p, sel) in &selections {
            next.push((p.clone(), sel.clone()));
            for (m, it) in set.members.iter().enumerate() {
                let mut s = sel.clone();
                s.push((j, m));
                next.push((p + it.profit_or_zero(), s));
            }
        }
        selections = next;
    }
    selections.sort_by(|a, b| b.0.cmp(&a.0));
    let mut cache: HashMap<Vec<(usize, usize)>, bool> = HashMap::new();
    for (profit, sel) in selections {
        let fits = *cache.entry(sel.clone()).or_insert_with(|| {
            let chosen: Vec<Item> = sel.iter().map(|&(j, m)| itemsets[j].members[m].clone()).collect();
            fits_in_box(&chosen, &unit, policy)
        });
        if fits {
            return Ok(profit);
        }
    }
    Ok(Rational::zero())
}

/// A multiset of sizes summing to at most 1 whose images sum to more than 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub xs: Vec<Rational>,
    pub size_sum: Rational,
    pub weight_sum: Rational,
}

/// Randomized search for a certificate that `g` is not a weighting function.
///
/// Half of the trials draw sizes just above the breakpoints `1/(q+1)` and exactly at `1/q`,
/// where step functions jump; the rest draw uniform rationals. Every trial fills up to
/// total size 1. Any certificate is re-checked exactly before it is returned.
pub fn weighting_violation_search(g: &WeightingFn, trials: u64, seed: u64) -> Result<Option<Violation>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Rational::one();
    for t in 0..trials {
        let boundary = t % 2 == 0;
        let mut xs: Vec<Rational> = Vec::new();
        let mut total = Rational::zero();
        for _ in 0..64 {
            let room = &one - &total;
            if room <= Rational::zero() {
                break;
            }
            let x = if boundary {
                let q: i64 = rng.gen_range(1..=12);
                match rng.gen_range(0..3) {
                    0 => rat(1, q),
                    1 => rat(1, q + 1) + rat(1, rng.gen_range(50..=100_000)),
                    _ => rat(1, q + 1) + rat(1, q * (q + 1) * rng.gen_range(2..=1000)),
                }
            } else {
                let den: i64 = rng.gen_range(2..=10_000);
                rat(rng.gen_range(1..=den), den)
            };
            let x = if x > one { one.clone() } else { x };
            if x > room {
                // close the trial with the exact remainder half of the time
                if rng.gen_bool(0.5) {
                    xs.push(room.clone());
                    total += room;
                }
                break;
            }
            total += &x;
            xs.push(x);
        }
        if xs.is_empty() {
            continue;
        }
        let mut weight = Rational::zero();
        for x in &xs {
            weight += g.eval(x)?;
        }
        if weight > one {
            let size_sum: Rational = xs.iter().sum();
            let weight_sum = xs.iter().map(|x| g.eval(x)).sum::<Result<Rational>>()?;
            if size_sum <= one && weight_sum > one {
                return Ok(Some(Violation {
                    xs,
                    size_sum,
                    weight_sum,
                }));
            }
        }
    }
    Ok(None)
}
