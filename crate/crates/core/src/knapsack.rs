//! Shelf Next-Fit bin packing and the multiple-choice knapsack built on it.

use num::{BigInt, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fullh::{SolveResult, SolveStats};
use crate::harmonic::HarmonicContext;
use crate::model::{check_itemsets, Choice, Item, Itemset, Packing};
use crate::numeric::{ceil_to_u64, format_rational, pow, Rational};
use crate::shelves::{next_fit_1d, ShelfTree};
use crate::strip::{build_shelves, distinct_btypes, place_shelf, vol_wf};

/// The tallest shelf of each base type gets a bin of its own; the other shelves are
/// packed by Next-Fit on their heights. Uses at most `Q + ceil(2 vol(wf_k))` bins.
pub fn hdh_nf(items: &[Item], ctx: &HarmonicContext) -> Result<SolveResult> {
    let shelves = build_shelves(items, ctx)?;
    let d = items.first().map(Item::dim).unwrap_or(2);
    let mut packing = Packing::unit_bins(d);
    let mut trees: Vec<ShelfTree> = Vec::new();
    let mut rest = Vec::new();
    for (idx, s) in shelves.iter().enumerate() {
        let first_of_type = idx == 0 || shelves[idx - 1].btype != s.btype;
        if first_of_type {
            let bin = packing.bins;
            let shelf = place_shelf(items, s, &Rational::zero(), bin, &mut packing.placements);
            trees.push(ShelfTree::Stack(vec![shelf]));
            packing.bins += 1;
        } else {
            rest.push(idx);
        }
    }
    let heights: Vec<Rational> = rest.iter().map(|&i| shelves[i].height.clone()).collect();
    for group in next_fit_1d(&heights, &Rational::one())? {
        let bin = packing.bins;
        let mut cursor = Rational::zero();
        let mut stack = Vec::new();
        for g in group {
            let s = &shelves[rest[g]];
            stack.push(place_shelf(items, s, &cursor, bin, &mut packing.placements));
            cursor += &s.height;
        }
        trees.push(ShelfTree::Stack(stack));
        packing.bins += 1;
    }
    packing.shelves = Some(trees);
    let q = distinct_btypes(items, ctx)?;
    let volume = vol_wf(items, ctx);
    let bound = Rational::from_integer((q as u64 + ceil_to_u64(&(&volume * Rational::from_integer(2.into())))).into());
    if Rational::from_integer(packing.bins.into()) > bound {
        return Err(Error::Contract(format!(
            "{} bins exceeds Q + ceil(2 vol(wf)) = {}",
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

/// One candidate of a 1D multiple-choice knapsack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackItem {
    pub size: Rational,
    pub profit: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    /// `(itemset index, member index)` pairs, by itemset.
    pub picks: Vec<(usize, usize)>,
    pub profit: Rational,
    pub size: Rational,
}

/// Largest number of profit levels the dynamic program will allocate.
const MAX_LEVELS: u64 = 50_000_000;

/// Profit-scaling FPTAS for the 1D multiple-choice knapsack: at most one member per
/// itemset, total size at most `capacity`, profit at least `(1 - eps)` times optimal.
///
/// Profits are rounded down to multiples of `mu = eps * P_max / (2n)`; a dynamic program
/// over rounded profit levels keeps the least size reaching each level.
pub fn mcks_1d_fptas(itemsets: &[Vec<KnapsackItem>], eps: &Rational, capacity: &Rational) -> Result<Selection> {
    if *eps <= Rational::zero() || *eps >= Rational::one() {
        return Err(Error::Domain(format!("epsilon must lie in (0,1), got {}", format_rational(eps))));
    }
    let empty = Selection {
        picks: Vec::new(),
        profit: Rational::zero(),
        size: Rational::zero(),
    };
    for set in itemsets {
        for it in set {
            if it.size <= Rational::zero() || it.profit < Rational::zero() {
                return Err(Error::Input("knapsack sizes must be positive and profits non-negative".into()));
            }
        }
    }
    let usable = |it: &KnapsackItem| it.size <= *capacity;
    let p_max = itemsets
        .iter()
        .flatten()
        .filter(|it| usable(it))
        .map(|it| it.profit.clone())
        .max();
    let Some(p_max) = p_max.filter(|p| *p > Rational::zero()) else {
        return Ok(empty);
    };
    let n = itemsets.len();
    let mu = eps * &p_max / Rational::from_integer(BigInt::from(2 * n));
    let scaled = |p: &Rational| -> usize { (p / &mu).floor().to_integer().to_usize().unwrap_or(usize::MAX) };
    let per_set_max = scaled(&p_max);
    let levels = per_set_max as u64 * n as u64 + 1;
    if levels > MAX_LEVELS {
        return Err(Error::TooLarge(format!("{levels} profit levels")));
    }
    let levels = levels as usize;

    // best[P] = least size reaching rounded profit P; trail[j][P] = member chosen in set j
    // together with the previous level, or None when set j was skipped.
    let mut best: Vec<Option<Rational>> = vec![None; levels];
    best[0] = Some(Rational::zero());
    let mut trail: Vec<Vec<Option<(usize, usize)>>> = Vec::with_capacity(n);
    let mut reach = 0usize;
    for set in itemsets {
        let mut next = best.clone();
        let mut choice: Vec<Option<(usize, usize)>> = vec![None; levels];
        let mut new_reach = reach;
        for (m, it) in set.iter().enumerate() {
            if !usable(it) {
                continue;
            }
            let gain = scaled(&it.profit);
            for (p, slot) in best.iter().enumerate().take(reach + 1) {
                let Some(size) = slot else { continue };
                let total = size + &it.size;
                if total > *capacity {
                    continue;
                }
                let q = p + gain;
                let better = match &next[q] {
                    None => true,
                    Some(cur) => total < *cur,
                };
                if better {
                    next[q] = Some(total);
                    choice[q] = Some((m, p));
                    new_reach = new_reach.max(q);
                }
            }
        }
        best = next;
        trail.push(choice);
        reach = new_reach;
    }
    let top = (0..=reach).rev().find(|&p| best[p].is_some()).unwrap_or(0);
    let mut picks = Vec::new();
    let mut level = top;
    for j in (0..n).rev() {
        if let Some((m, prev)) = trail[j][level] {
            picks.push((j, m));
            level = prev;
        }
    }
    picks.reverse();
    let profit = picks.iter().map(|&(j, m)| itemsets[j][m].profit.clone()).sum();
    let size: Rational = picks.iter().map(|&(j, m)| itemsets[j][m].size.clone()).sum();
    debug_assert!(size <= *capacity);
    Ok(Selection { picks, profit, size })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackResult {
    /// The single knapsack bin.
    pub packing: Packing,
    /// Members packed, one per contributing itemset.
    pub assortment: Vec<Choice>,
    pub profit: Rational,
    /// Bins used when packing the whole 1D selection.
    pub bins_before_pick: usize,
    /// Profit of the whole 1D selection.
    pub selection_profit: Rational,
    /// The whole 1D selection.
    pub selection: Vec<Choice>,
}

/// Multiple-choice knapsack in a unit bin, `(1 - eps) 3^-d` approximate.
///
/// Each item becomes a 1D item of size `vol(wH_3(i))`; the 1D selection is packed into
/// bins by [`hdh_nf`] with `k = 3` and the most profitable bin is returned.
pub fn hdh_ks(itemsets: &[Itemset], eps: &Rational) -> Result<KnapsackResult> {
    let ctx = HarmonicContext::new(3)?;
    let d = check_itemsets(itemsets)?.unwrap_or(2);
    if d < 2 {
        return Err(Error::Input("knapsack packing needs at least two dimensions".into()));
    }
    let scale = pow(ctx.t_k(), d - 1);
    let reduced: Vec<Vec<KnapsackItem>> = itemsets
        .iter()
        .map(|set| {
            set.members
                .iter()
                .map(|it| KnapsackItem {
                    size: ctx.vol_wf(&it.lengths) / &scale,
                    profit: it.profit_or_zero(),
                })
                .collect()
        })
        .collect();
    let selection = mcks_1d_fptas(&reduced, eps, &Rational::one())?;
    let chosen: Vec<Item> = selection
        .picks
        .iter()
        .map(|&(j, m)| itemsets[j].members[m].clone())
        .collect();
    let picked: Vec<Choice> = selection
        .picks
        .iter()
        .map(|&(j, m)| Choice {
            itemset: itemsets[j].id,
            member: m,
            item: itemsets[j].members[m].id,
        })
        .collect();
    let mut packing = Packing::unit_bins(d);
    packing.bins = 1;
    if chosen.is_empty() {
        return Ok(KnapsackResult {
            packing,
            assortment: Vec::new(),
            profit: Rational::zero(),
            bins_before_pick: 0,
            selection_profit: selection.profit,
            selection: picked,
        });
    }
    let all = hdh_nf(&chosen, &ctx)?;
    let b = all.packing.bins;
    let three_pow = 3u64.pow(d as u32);
    let wh: Rational = selection.size.clone();
    let inner = Rational::from_integer(BigInt::from(3u64.pow(d as u32 - 1)))
        + Rational::from_integer(ceil_to_u64(&(Rational::from_integer(2.into()) * &scale * &wh)).into());
    if Rational::from_integer(b.into()) > inner || inner > Rational::from_integer(three_pow.into()) {
        return Err(Error::Contract(format!(
            "{b} bins breaks b <= 3^(d-1) + ceil(2 T_3^(d-1) vol(wH_3(J))) = {} <= 3^d",
            format_rational(&inner)
        )));
    }
    let mut bin_profit = vec![Rational::zero(); b];
    let by_id: std::collections::BTreeMap<usize, usize> =
        chosen.iter().enumerate().map(|(i, it)| (it.id, i)).collect();
    for pl in &all.packing.placements {
        bin_profit[pl.bin] += chosen[by_id[&pl.item]].profit_or_zero();
    }
    let mut best = 0;
    for (i, p) in bin_profit.iter().enumerate() {
        if *p > bin_profit[best] {
            best = i;
        }
    }
    let mut assortment = Vec::new();
    for pl in all.packing.placements.iter().filter(|pl| pl.bin == best) {
        let mut pl = pl.clone();
        pl.bin = 0;
        let (j, m) = selection.picks[by_id[&pl.item]];
        assortment.push(Choice {
            itemset: itemsets[j].id,
            member: m,
            item: pl.item,
        });
        packing.placements.push(pl);
    }
    assortment.sort_by_key(|c| c.itemset);
    if let Some(trees) = &all.packing.shelves {
        packing.shelves = Some(vec![trees[best].clone()]);
    }
    Ok(KnapsackResult {
        packing,
        assortment,
        profit: bin_profit[best].clone(),
        bins_before_pick: b,
        selection_profit: selection.profit,
        selection: picked,
    })
}
