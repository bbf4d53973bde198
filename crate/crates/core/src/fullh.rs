//! `fullh_k`: harmonic bin packing by full type class, and its multiple-choice extension.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::harmonic::{HarmonicContext, TypeVector};
use crate::model::{check_items, check_itemsets, Choice, Item, Itemset, Packing, Placement};
use crate::numeric::{format_rational, pow, Rational};
use crate::shelves::hdh_unit_pack;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveStats {
    /// Number of distinct type classes used.
    pub q: usize,
    /// `vol(f_k)` (bin packing) or `vol(wf_k)` (strip, knapsack) of the packed items.
    pub volume: Rational,
    /// The guarantee checked against the result.
    pub bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub packing: Packing,
    /// One entry per itemset for multiple-choice solvers; empty otherwise.
    pub assortment: Vec<Choice>,
    pub stats: SolveStats,
}

/// Items grouped by a key, classes in key order, input order inside a class.
pub(crate) fn group_by<K: Ord>(items: &[Item], key: impl Fn(&Item) -> Result<K>) -> Result<BTreeMap<K, Vec<usize>>> {
    let mut classes: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for (i, it) in items.iter().enumerate() {
        classes.entry(key(it)?).or_default().push(i);
    }
    Ok(classes)
}

/// Packs `items` into unit bins. Uses fewer than `Q + vol(f_k(items))` bins.
pub fn fullh_bp(items: &[Item], ctx: &HarmonicContext) -> Result<SolveResult> {
    let d = check_items(items)?.unwrap_or(1);
    let classes: BTreeMap<TypeVector, Vec<usize>> = group_by(items, |it| ctx.type_vector(&it.lengths, false))?;
    let mut packing = Packing::unit_bins(d);
    let mut trees = Vec::new();
    let one = Rational::one();
    for members in classes.values() {
        let mut start = 0;
        while start < members.len() {
            let mut end = start;
            let mut vol = Rational::zero();
            while end < members.len() && vol < one {
                vol += ctx.vol_f(&items[members[end]].lengths);
                end += 1;
            }
            let chunk = &members[start..end];
            let seq: Vec<(usize, &[Rational])> = chunk
                .iter()
                .map(|&i| (items[i].id, items[i].lengths.as_slice()))
                .collect();
            let pack = hdh_unit_pack(&seq, ctx)?;
            let bin = packing.bins;
            for (&i, pos) in chunk.iter().zip(pack.positions) {
                packing.placements.push(Placement::of(&items[i], pos, bin));
            }
            trees.push(pack.tree);
            packing.bins += 1;
            start = end;
        }
    }
    packing.shelves = Some(trees);
    let volume: Rational = items.iter().map(|it| ctx.vol_f(&it.lengths)).sum();
    let q = classes.len();
    let bound = Rational::from_integer(q.into()) + &volume;
    if !items.is_empty() && Rational::from_integer(packing.bins.into()) >= bound {
        return Err(Error::Contract(format!(
            "{} bins is not below Q + vol(f) = {}",
            packing.bins,
            format_rational(&bound)
        )));
    }
    Ok(SolveResult {
        packing,
        assortment: Vec::new(),
        stats: SolveStats { q, volume, bound },
    })
}

/// Index of the member minimizing `key`, ties to the smaller item id, then earlier member.
pub(crate) fn argmin_member(set: &Itemset, key: impl Fn(&Item) -> Rational) -> usize {
    let mut best = 0;
    let mut best_key = key(&set.members[0]);
    for (m, it) in set.members.iter().enumerate().skip(1) {
        let k = key(it);
        if k < best_key || (k == best_key && it.id < set.members[best].id) {
            best = m;
            best_key = k;
        }
    }
    best
}

/// Picks from each itemset the member of least `vol(f_k)` and packs the picks with [`fullh_bp`].
pub fn fullh_mcbp(itemsets: &[Itemset], ctx: &HarmonicContext) -> Result<SolveResult> {
    check_itemsets(itemsets)?;
    let mut chosen = Vec::with_capacity(itemsets.len());
    let mut assortment = Vec::with_capacity(itemsets.len());
    for set in itemsets {
        let m = argmin_member(set, |it| ctx.vol_f(&it.lengths));
        chosen.push(set.members[m].clone());
        assortment.push(Choice {
            itemset: set.id,
            member: m,
            item: set.members[m].id,
        });
    }
    let mut result = fullh_bp(&chosen, ctx)?;
    result.assortment = assortment;
    Ok(result)
}

/// `max(vol(I), vol(f_k(I)) / T_k^d)`, a lower bound on the optimal number of bins.
pub fn lower_bound_bp(items: &[Item], ctx: &HarmonicContext) -> Rational {
    let Some(d) = items.first().map(Item::dim) else {
        return Rational::zero();
    };
    let vol: Rational = items.iter().map(Item::volume).sum();
    let vol_f: Rational = items.iter().map(|it| ctx.vol_f(&it.lengths)).sum();
    vol.max(vol_f / pow(ctx.t_k(), d))
}
