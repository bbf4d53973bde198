//! `HGaP_k`: round every item to a rectangle, guess structured shelf plans, fill each plan
//! by dynamic programming and inflate the best fractional packing back to whole items.

mod choose;
mod guess;
mod inflate;

use std::ops::ControlFlow;

use num::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fullh::{SolveResult, SolveStats};
use crate::harmonic::{HarmonicContext, TransformMode, Transformed};
use crate::model::{check_itemsets, Choice, Item, Itemset};
use crate::numeric::{format_rational, Rational};
use crate::shelves::{canonical_shelving, next_fit_1d, Rect};

pub use choose::choose_and_pack;
pub use guess::{configurations, guess_shelves, large_heights, max_heights, plan_count_bound, Guess, PlanSpace, ShelfPlan};
pub use inflate::{inflate, Inflated};

/// A member of an itemset seen as the rectangle `w(i) x h(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedItem {
    /// Index of the itemset in the input slice.
    pub set: usize,
    pub member: usize,
    pub item: Item,
    pub width: Rational,
    pub height: Rational,
}

impl RoundedItem {
    pub fn area(&self) -> Rational {
        &self.width * &self.height
    }

    pub fn is_large(&self, delta: &Rational) -> bool {
        self.height > *delta
    }
}

/// Maps every member to `(w(i), h(i))`, keeping the original item.
pub fn round_instance(itemsets: &[Itemset], ctx: &HarmonicContext) -> Result<Vec<Vec<RoundedItem>>> {
    check_itemsets(itemsets)?;
    itemsets
        .iter()
        .enumerate()
        .map(|(s, set)| {
            set.members
                .iter()
                .enumerate()
                .map(|(m, it)| match ctx.transform(&it.lengths, TransformMode::Round2d)? {
                    Transformed::Rect { width, height, .. } => Ok(RoundedItem {
                        set: s,
                        member: m,
                        item: it.clone(),
                        width,
                        height,
                    }),
                    Transformed::Cuboid(_) => unreachable!("Round2d yields a rectangle"),
                })
                .collect()
        })
        .collect()
}

/// A vertical slice of a large rectangle lying on a shelf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargePiece {
    /// Index into [`FractionalAssignment::items`].
    pub item: usize,
    pub width: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracShelf {
    /// Index into [`FractionalAssignment::heights`].
    pub class: usize,
    pub pieces: Vec<LargePiece>,
}

/// Part of a small rectangle's area placed in a bin's space above its shelves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallPiece {
    pub item: usize,
    pub area: Rational,
}

/// One bin: shelves stacked from the floor in order, then free space for small items.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FracBin {
    pub shelves: Vec<FracShelf>,
    pub small: Vec<SmallPiece>,
}

/// A shelf-based δ-fractional packing of rounded items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalAssignment {
    pub delta: Rational,
    /// Shelf heights, strictly decreasing.
    pub heights: Vec<Rational>,
    /// The packed d-D items.
    pub items: Vec<Item>,
    /// `rects[i]` is `items[i]` rounded, with `id = i`.
    pub rects: Vec<Rect>,
    /// Member chosen from each itemset, when built from itemsets.
    pub picks: Vec<usize>,
    pub bins: Vec<FracBin>,
    /// Total area of the small items.
    pub small_area: Rational,
}

impl FractionalAssignment {
    pub fn shelf_load(&self, b: usize) -> Rational {
        self.bins[b].shelves.iter().map(|s| self.heights[s.class].clone()).sum()
    }

    /// Distinct heights of the shelves actually present.
    pub fn used_heights(&self) -> Vec<Rational> {
        let mut used = vec![false; self.heights.len()];
        for b in &self.bins {
            for s in &b.shelves {
                used[s.class] = true;
            }
        }
        self.heights
            .iter()
            .zip(used)
            .filter(|(_, u)| *u)
            .map(|(h, _)| h.clone())
            .collect()
    }

    pub fn is_large(&self, i: usize) -> bool {
        self.rects[i].height > self.delta
    }

    /// Checks that this is a shelf-based δ-fractional packing of all of `items`.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Contract(m));
        if self.heights.windows(2).any(|w| w[0] <= w[1]) {
            return bad("shelf heights must strictly decrease".into());
        }
        if self.heights.iter().any(|h| *h <= self.delta || *h > Rational::one()) {
            return bad("shelf heights must lie in (delta, 1]".into());
        }
        if self.rects.len() != self.items.len() || self.rects.iter().enumerate().any(|(i, r)| r.id != i) {
            return bad("rectangles must be indexed like the items".into());
        }
        let mut placed = vec![Rational::zero(); self.items.len()];
        for (b, bin) in self.bins.iter().enumerate() {
            let load = self.shelf_load(b);
            let small: Rational = bin.small.iter().map(|p| p.area.clone()).sum();
            if &load + &small > Rational::one() {
                return bad(format!("bin {b} is overfull"));
            }
            for s in &bin.shelves {
                let h = self.heights.get(s.class).ok_or_else(|| Error::Contract("unknown shelf class".into()))?;
                let mut used = Rational::zero();
                for p in &s.pieces {
                    if !p.width.is_positive() || !self.is_large(p.item) || self.rects[p.item].height > *h {
                        return bad(format!("item {} does not fit its shelf in bin {b}", p.item));
                    }
                    used += &p.width;
                    placed[p.item] += &p.width;
                }
                if used > Rational::one() {
                    return bad(format!("a shelf in bin {b} is wider than the bin"));
                }
            }
            for p in &bin.small {
                if !p.area.is_positive() || self.is_large(p.item) {
                    return bad(format!("bad small piece of item {} in bin {b}", p.item));
                }
                placed[p.item] += &p.area;
            }
        }
        for (i, r) in self.rects.iter().enumerate() {
            let want = if self.is_large(i) { r.width.clone() } else { &r.width * &r.height };
            if placed[i] != want {
                return bad(format!(
                    "item {i} is covered {} instead of {}",
                    format_rational(&placed[i]),
                    format_rational(&want)
                ));
            }
        }
        Ok(())
    }

    /// Builds a fractional packing of `items`: large rectangles go through canonical
    /// shelving, shelves into bins by Next-Fit, then small area fills bins in order.
    pub fn canonical(items: Vec<Item>, delta: Rational, ctx: &HarmonicContext) -> Result<Self> {
        guess::check_delta(&delta)?;
        let rects = rects_of(&items, ctx)?;
        let large: Vec<Rect> = rects.iter().filter(|r| r.height > delta).cloned().collect();
        let shelving = canonical_shelving(&large)?;
        let mut heights = shelving.heights();
        heights.dedup();
        let sizes = shelving.heights();
        let mut bins: Vec<FracBin> = next_fit_1d(&sizes, &Rational::one())?
            .into_iter()
            .map(|group| FracBin {
                shelves: group
                    .into_iter()
                    .map(|s| FracShelf {
                        class: heights.iter().position(|h| *h == sizes[s]).expect("known height"),
                        pieces: shelving.shelves[s]
                            .pieces
                            .iter()
                            .map(|p| LargePiece {
                                item: p.rect,
                                width: p.width.clone(),
                            })
                            .collect(),
                    })
                    .collect(),
                small: Vec::new(),
            })
            .collect();
        let mut fa = FractionalAssignment {
            delta,
            heights,
            items,
            rects,
            picks: Vec::new(),
            bins: Vec::new(),
            small_area: Rational::zero(),
        };
        let smalls: Vec<usize> = (0..fa.items.len()).filter(|&i| !fa.is_large(i)).collect();
        fa.small_area = smalls.iter().map(|&i| &fa.rects[i].width * &fa.rects[i].height).sum();
        std::mem::swap(&mut fa.bins, &mut bins);
        fill_small(&mut fa, &smalls);
        Ok(fa)
    }
}

pub(crate) fn rects_of(items: &[Item], ctx: &HarmonicContext) -> Result<Vec<Rect>> {
    items
        .iter()
        .enumerate()
        .map(|(i, it)| {
            ctx.type_vector(&it.lengths, false)?;
            Ok(Rect {
                id: i,
                width: ctx.base_width(&it.lengths),
                height: it.height().clone(),
            })
        })
        .collect()
}

/// Pours the small items' area into the free space of the bins in order, adding empty
/// bins when it runs out.
pub(crate) fn fill_small(fa: &mut FractionalAssignment, smalls: &[usize]) {
    let mut b = 0;
    let mut room: Option<Rational> = None;
    for &i in smalls {
        let mut left = &fa.rects[i].width * &fa.rects[i].height;
        while left.is_positive() {
            if b == fa.bins.len() {
                fa.bins.push(FracBin::default());
            }
            let r = room.take().unwrap_or_else(|| Rational::one() - fa.shelf_load(b));
            if !r.is_positive() {
                b += 1;
                continue;
            }
            let take = if left < r { left.clone() } else { r.clone() };
            fa.bins[b].small.push(SmallPiece {
                item: i,
                area: take.clone(),
            });
            left -= &take;
            room = Some(r - take);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HgapOptions {
    /// Most plans to evaluate; `None` enumerates everything.
    pub budget: Option<u64>,
    /// Worker threads for plan evaluation.
    pub threads: usize,
}

impl Default for HgapOptions {
    fn default() -> Self {
        HgapOptions {
            budget: None,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HgapTrace {
    pub delta: Rational,
    pub plans_evaluated: u64,
    pub feasible_plans: u64,
    /// The budget cut the enumeration short.
    pub truncated: bool,
    pub plan: Option<ShelfPlan>,
    /// Bins of the best fractional packing.
    pub fractional_bins: usize,
    /// Distinct shelf heights in the best fractional packing.
    pub t: usize,
    pub inflate_bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HgapResult {
    pub result: SolveResult,
    pub trace: HgapTrace,
}

const CHUNK: usize = 512;

struct Search {
    evaluated: u64,
    feasible: u64,
    best: Option<(ShelfPlan, FractionalAssignment)>,
}

impl Search {
    fn best_bins(&self) -> Option<usize> {
        self.best.as_ref().map(|(_, fa)| fa.bins.len())
    }

    // Outcomes in enumeration order; the first plan with the fewest bins wins.
    fn absorb(&mut self, outcomes: impl Iterator<Item = (ShelfPlan, Result<Option<FractionalAssignment>>)>) -> Result<()> {
        for (plan, out) in outcomes {
            self.evaluated += 1;
            if let Some(fa) = out? {
                self.feasible += 1;
                if self.best_bins().is_none_or(|b| fa.bins.len() < b) {
                    self.best = Some((plan, fa));
                }
            }
        }
        Ok(())
    }
}

/// Runs `HGaP_k` with `δ = ε/(2+ε)` on unit-bin itemsets of dimension at least 2.
pub fn hgap(itemsets: &[Itemset], eps: &Rational, ctx: &HarmonicContext, opts: HgapOptions) -> Result<HgapResult> {
    if *eps <= Rational::zero() || *eps > Rational::one() {
        return Err(Error::Domain(format!("epsilon {} outside (0,1]", format_rational(eps))));
    }
    let delta = eps / (Rational::from_integer(2.into()) + eps);
    let d = check_itemsets(itemsets)?.unwrap_or(2);
    if d < 2 {
        return Err(Error::Input("hgap needs at least two dimensions".into()));
    }
    let rounded = round_instance(itemsets, ctx)?;
    let space = PlanSpace::new(&rounded, &delta)?;
    let n = rounded.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))?;

    let mut search = Search {
        evaluated: 0,
        feasible: 0,
        best: None,
    };
    let mut truncated = false;
    let mut failure: Option<Error> = None;
    let eval = |plan: &ShelfPlan| -> Result<Option<FractionalAssignment>> {
        plan.check(&delta, &space.large, n)?;
        choose_and_pack(&rounded, plan, &delta)
    };
    let run = |search: &mut Search, chunk: &mut Vec<ShelfPlan>| -> Result<()> {
        let outcomes: Vec<Result<Option<FractionalAssignment>>> = if opts.threads > 1 {
            pool.install(|| chunk.par_iter().map(eval).collect())
        } else {
            chunk.iter().map(eval).collect()
        };
        search.absorb(chunk.drain(..).zip(outcomes))
    };

    for m in 0..=n {
        // every plan on this level has at least m (m = 0) or m + 1 bins
        let floor = if m == 0 { 0 } else { m + 1 };
        if search.best_bins().is_some_and(|b| b <= floor) {
            break;
        }
        let mut chunk: Vec<ShelfPlan> = Vec::with_capacity(CHUNK);
        let _ = space.level(m, &mut |plan| {
            if opts.budget.is_some_and(|b| search.evaluated + chunk.len() as u64 >= b) {
                truncated = true;
                return ControlFlow::Break(());
            }
            chunk.push(plan);
            if chunk.len() == CHUNK {
                if let Err(e) = run(&mut search, &mut chunk) {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
                if search.best_bins().is_some_and(|b| b <= floor) {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        });
        if let Some(e) = failure.take() {
            return Err(e);
        }
        run(&mut search, &mut chunk)?;
        if truncated {
            break;
        }
    }
    let (evaluated, feasible) = (search.evaluated, search.feasible);
    let Some((plan, fa)) = search.best else {
        return Err(match opts.budget {
            Some(budget) if truncated => Error::BudgetExhausted { budget, evaluated },
            _ => Error::Infeasible("no shelf plan admits an assortment".into()),
        });
    };
    fa.check()?;
    let inflated = inflate(&fa, ctx)?;
    let assortment: Vec<Choice> = fa
        .picks
        .iter()
        .enumerate()
        .map(|(j, &m)| Choice {
            itemset: itemsets[j].id,
            member: m,
            item: itemsets[j].members[m].id,
        })
        .collect();
    let volume: Rational = fa.rects.iter().map(|r| &r.width * &r.height).sum();
    let trace = HgapTrace {
        delta,
        plans_evaluated: evaluated,
        feasible_plans: feasible,
        truncated,
        plan: Some(plan),
        fractional_bins: fa.bins.len(),
        t: fa.used_heights().len(),
        inflate_bound: inflated.bound.clone(),
    };
    Ok(HgapResult {
        result: SolveResult {
            packing: inflated.packing,
            assortment,
            stats: SolveStats {
                q: inflated.q,
                volume,
                bound: inflated.bound,
            },
        },
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};
    use crate::validate::{validate_assortment, validate_packing};
    use proptest::prelude::*;

    fn ctx() -> HarmonicContext {
        HarmonicContext::new(4).unwrap()
    }

    fn sets_from(raw: &[Vec<(i64, i64)>]) -> Vec<Itemset> {
        let mut id = 0;
        raw.iter()
            .enumerate()
            .map(|(s, members)| {
                Itemset::new(
                    s,
                    members
                        .iter()
                        .map(|&(w, h)| {
                            id += 1;
                            Item::new(id - 1, vec![rat(w, 10), rat(h, 10)])
                        })
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn rounding_examples() {
        let rect = |lengths: Vec<Rational>| {
            let r = round_instance(&[Itemset::singleton(Item::new(0, lengths))], &ctx()).unwrap();
            (r[0][0].width.clone(), r[0][0].height.clone())
        };
        assert_eq!(rect(vec![rat(3, 5), rat(3, 10), rat(7, 10)]), (rat(1, 3), rat(7, 10)));
        assert_eq!(rect(vec![rat(2, 5), rat(1, 2)]), (rat(1, 2), rat(1, 2)));
        assert_eq!(rect(vec![int(1), int(1), int(1)]), (int(1), int(1)));
    }

    #[test]
    fn one_large_item_plan_exists() {
        let sets = vec![Itemset::singleton(Item::new(0, vec![rat(1, 2), rat(7, 10)]))];
        let r = round_instance(&sets, &ctx()).unwrap();
        let g = guess_shelves(&r, &rat(1, 2), None).unwrap();
        let want = ShelfPlan {
            heights: vec![rat(7, 10)],
            bins: vec![vec![1]],
        };
        assert!(g.plans.contains(&want));
        assert!(!g.truncated);
    }

    #[test]
    fn all_small_single_plan() {
        let sets = sets_from(&[vec![(5, 2)], vec![(3, 1), (1, 3)]]);
        let r = round_instance(&sets, &ctx()).unwrap();
        let g = guess_shelves(&r, &rat(1, 2), None).unwrap();
        assert_eq!(g.plans, vec![ShelfPlan { heights: vec![], bins: vec![] }]);
    }

    #[test]
    fn budget_truncates() {
        let sets = sets_from(&[vec![(5, 6)], vec![(3, 7)], vec![(4, 8)]]);
        let r = round_instance(&sets, &ctx()).unwrap();
        let g = guess_shelves(&r, &rat(1, 2), Some(2)).unwrap();
        assert_eq!(g.plans.len(), 2);
        assert!(g.truncated);
        let e = hgap(&sets, &rat(1, 2), &ctx(), HgapOptions { budget: Some(1), threads: 1 });
        assert!(matches!(e, Err(Error::BudgetExhausted { budget: 1, .. })));
    }

    #[test]
    fn one_small_item_one_bin() {
        let sets = sets_from(&[vec![(5, 2)]]);
        let out = hgap(&sets, &rat(1, 2), &ctx(), HgapOptions::default()).unwrap();
        assert_eq!(out.result.packing.bins, 1);
    }

    #[test]
    fn rejects_bad_epsilon_and_one_dimension() {
        let sets = sets_from(&[vec![(5, 2)]]);
        assert!(matches!(hgap(&sets, &rat(3, 2), &ctx(), HgapOptions::default()), Err(Error::Domain(_))));
        assert!(matches!(hgap(&sets, &int(0), &ctx(), HgapOptions::default()), Err(Error::Domain(_))));
        assert_eq!(hgap(&sets, &int(1), &ctx(), HgapOptions::default()).unwrap().trace.delta, rat(1, 3));
        let flat = vec![Itemset::singleton(Item::new(0, vec![rat(1, 2)]))];
        assert!(matches!(hgap(&flat, &rat(1, 2), &ctx(), HgapOptions::default()), Err(Error::Input(_))));
    }

    #[test]
    fn threads_do_not_change_result() {
        let sets = sets_from(&[vec![(5, 6), (6, 5)], vec![(3, 7)], vec![(4, 8), (8, 4)], vec![(2, 2)]]);
        let a = hgap(&sets, &int(1), &ctx(), HgapOptions::default()).unwrap();
        let b = hgap(&sets, &int(1), &ctx(), HgapOptions { budget: None, threads: 4 }).unwrap();
        assert_eq!(a, b);
        let a = hgap(&sets, &rat(9, 10), &ctx(), HgapOptions::default()).unwrap();
        let b = hgap(&sets, &rat(9, 10), &ctx(), HgapOptions { budget: None, threads: 4 }).unwrap();
        assert_eq!(a, b);
    }

    // Least small area over assortments whose large widths satisfy the nested supply
    // conditions of the plan's shelf classes.
    fn brute_small_area(r: &[Vec<RoundedItem>], plan: &ShelfPlan, delta: &Rational) -> Option<Rational> {
        let n = r.len() as i64;
        let mut caps: Vec<i64> = plan.shelf_counts().iter().map(|&c| c as i64 * n).collect();
        if !caps.is_empty() {
            caps[0] += n;
        }
        let mut best: Option<Rational> = None;
        let mut pick = vec![0usize; r.len()];
        loop {
            let mut demand = vec![0i64; caps.len()];
            let mut ok = true;
            let mut small = Rational::zero();
            for (j, &m) in pick.iter().enumerate() {
                let it = &r[j][m];
                if it.height <= *delta {
                    small += it.area();
                    continue;
                }
                match plan.heights.iter().rposition(|h| it.height <= *h) {
                    Some(p) => demand[p] += (&it.width * Rational::from_integer(n.into())).ceil().to_integer().try_into().unwrap_or(i64::MAX),
                    None => ok = false,
                }
            }
            if ok {
                let (mut need, mut have) = (0, 0);
                for r in 0..caps.len() {
                    need += demand[r];
                    have += caps[r];
                    ok &= need <= have;
                }
            }
            if ok && best.as_ref().is_none_or(|b| small < *b) {
                best = Some(small);
            }
            let mut j = 0;
            while j < pick.len() {
                pick[j] += 1;
                if pick[j] < r[j].len() {
                    break;
                }
                pick[j] = 0;
                j += 1;
            }
            if j == pick.len() {
                return best;
            }
        }
    }

    fn member() -> impl Strategy<Value = (i64, i64)> {
        (1i64..=10, 1i64..=10)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn dp_matches_brute_force(
            raw in prop::collection::vec(prop::collection::vec(member(), 1..=2), 1..=3),
            pick_heights in prop::collection::vec(0usize..8, 1..=2),
            configs in prop::collection::vec(0usize..8, 1..=3),
        ) {
            let delta = rat(1, 3);
            let sets = sets_from(&raw);
            let r = round_instance(&sets, &ctx()).unwrap();
            let large = large_heights(&r, &delta);
            prop_assume!(!large.is_empty());
            let mut idx: Vec<usize> = pick_heights.iter().map(|&i| i % large.len()).collect();
            idx.sort();
            idx.dedup();
            let heights: Vec<Rational> = idx.iter().map(|&i| large[i].clone()).collect();
            let all = configurations(&heights);
            let bins: Vec<Vec<u32>> = configs.iter().map(|&c| all[c % all.len()].clone()).collect();
            let plan = ShelfPlan { heights, bins };
            prop_assume!(plan.check(&delta, &large, 3).is_ok());
            let got = choose_and_pack(&r, &plan, &delta).unwrap();
            let want = brute_small_area(&r, &plan, &delta);
            prop_assert_eq!(got.as_ref().map(|fa| fa.small_area.clone()), want);
            if let Some(fa) = got {
                fa.check().unwrap();
                prop_assert_eq!(fa.used_heights(), plan.heights.clone());
                let counts: u64 = plan.shelf_counts().iter().sum();
                let shelves: usize = fa.bins.iter().map(|b| b.shelves.len()).sum();
                prop_assert_eq!(shelves as u64, counts + 1);
            }
        }

        #[test]
        fn plan_count_within_bound(raw in prop::collection::vec(prop::collection::vec(member(), 1..=2), 1..=4)) {
            let delta = rat(1, 2);
            let sets = sets_from(&raw);
            let r = round_instance(&sets, &ctx()).unwrap();
            let g = guess_shelves(&r, &delta, None).unwrap();
            let total: usize = r.iter().map(Vec::len).sum();
            let large = large_heights(&r, &delta);
            for p in &g.plans {
                p.check(&delta, &large, r.len()).unwrap();
            }
            prop_assert!(num::BigUint::from(g.plans.len()) <= plan_count_bound(total, r.len(), &delta).unwrap());
        }

        #[test]
        fn hgap_packings_are_valid(raw in prop::collection::vec(prop::collection::vec(member(), 1..=2), 0..=4)) {
            let sets = sets_from(&raw);
            let out = hgap(&sets, &rat(1, 2), &ctx(), HgapOptions::default()).unwrap();
            prop_assert!(validate_packing(&out.result.packing).is_valid());
            prop_assert!(validate_assortment(&out.result.packing, &sets, &out.result.assortment).is_valid());
            prop_assert!(Rational::from_integer(out.result.packing.bins.into()) < out.trace.inflate_bound || sets.is_empty());
        }
    }
}
