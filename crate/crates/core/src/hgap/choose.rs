//! Filling a shelf plan with an assortment: dynamic programming over residual shelf width.
//!
//! Large widths are rounded up to multiples of `1/n` and one extra shelf of the tallest
//! height, in a bin of its own, absorbs the rounding. A state `u` holds the free width
//! units per height class; the table keeps the least small-item area reaching each state.

use std::collections::HashMap;

use num::{One, ToPrimitive, Zero};

use crate::error::Result;
use crate::numeric::Rational;

use super::{fill_small, FracBin, FracShelf, FractionalAssignment, LargePiece, RoundedItem, ShelfPlan};

/// Width units and deepest usable class of a large member; `None` for small members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Need {
    units: u32,
    /// Largest class index whose height still holds the item.
    deepest: usize,
}

// Member is unusable when it is large and taller than every shelf.
fn need_of(r: &RoundedItem, plan: &ShelfPlan, n: u32, delta: &Rational) -> Option<Option<Need>> {
    if !r.is_large(delta) {
        return Some(None);
    }
    let deepest = plan.heights.iter().rposition(|h| r.height <= *h)?;
    let units = (&r.width * Rational::from_integer(n.into()))
        .ceil()
        .to_integer()
        .to_u32()
        .expect("width units fit");
    Some(Some(Need { units, deepest }))
}

/// Takes `need.units` from classes `deepest, ..., 1` as far as they go, the rest from
/// class 0. Returns the units taken per class, or `None` when class 0 runs short.
fn reduce(u: &mut [u32], need: Need) -> Option<Vec<(usize, u32)>> {
    let mut x = need.units;
    let mut takes = Vec::new();
    for r in (1..=need.deepest).rev() {
        let take = x.min(u[r]);
        if take > 0 {
            u[r] -= take;
            x -= take;
            takes.push((r, take));
        }
    }
    if x > 0 {
        if u[0] < x {
            return None;
        }
        u[0] -= x;
        takes.push((0, x));
    }
    Some(takes)
}

struct Entry {
    value: Rational,
    prev: usize,
    member: usize,
}

/// Packs an assortment of `rounded` into `plan` plus one extra shelf of height `h_1`,
/// minimizing the small area; `None` when no assortment fits the shelves. The small items
/// fill the free space of the bins, with empty bins appended if they need more room.
pub fn choose_and_pack(
    rounded: &[Vec<RoundedItem>],
    plan: &ShelfPlan,
    delta: &Rational,
) -> Result<Option<FractionalAssignment>> {
    let n = rounded.len();
    let t = plan.t();
    if n == 0 {
        return Ok(Some(FractionalAssignment {
            delta: delta.clone(),
            heights: Vec::new(),
            items: Vec::new(),
            rects: Vec::new(),
            picks: Vec::new(),
            bins: Vec::new(),
            small_area: Rational::zero(),
        }));
    }
    let n32 = u32::try_from(n).expect("itemset count fits u32");
    let mut counts = plan.shelf_counts();
    if t > 0 {
        counts[0] += 1;
    }
    let cap = u64::from(n32) * u64::from(n32);
    let full: Vec<u32> = counts
        .iter()
        .map(|&c| (c * u64::from(n32)).min(cap) as u32)
        .collect();

    let needs: Vec<Vec<Option<Option<Need>>>> = rounded
        .iter()
        .map(|set| set.iter().map(|r| need_of(r, plan, n32, delta)).collect())
        .collect();

    // layers[j] holds the states after the first j itemsets
    let mut layers: Vec<(Vec<Vec<u32>>, Vec<Entry>)> = Vec::with_capacity(n + 1);
    layers.push((
        vec![full.clone()],
        vec![Entry {
            value: Rational::zero(),
            prev: usize::MAX,
            member: usize::MAX,
        }],
    ));
    for (j, set) in rounded.iter().enumerate() {
        let (states, entries) = &layers[j];
        let mut next_states: Vec<Vec<u32>> = Vec::new();
        let mut next_entries: Vec<Entry> = Vec::new();
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        for (s, (u, e)) in states.iter().zip(entries).enumerate() {
            for (m, r) in set.iter().enumerate() {
                let Some(need) = needs[j][m] else { continue };
                let mut v = u.clone();
                let small = match need {
                    Some(nd) => {
                        if reduce(&mut v, nd).is_none() {
                            continue;
                        }
                        Rational::zero()
                    }
                    None => r.area(),
                };
                let value = &e.value + small;
                match index.get(&v) {
                    Some(&at) => {
                        let old = &mut next_entries[at];
                        let better = value < old.value
                            || (value == old.value && r.item.id < set[old.member].item.id);
                        if better {
                            *old = Entry { value, prev: s, member: m };
                        }
                    }
                    None => {
                        index.insert(v.clone(), next_states.len());
                        next_states.push(v);
                        next_entries.push(Entry { value, prev: s, member: m });
                    }
                }
            }
        }
        if next_states.is_empty() {
            return Ok(None);
        }
        layers.push((next_states, next_entries));
    }

    let (_, last) = &layers[n];
    let mut at = 0;
    for (s, e) in last.iter().enumerate() {
        if e.value < last[at].value {
            at = s;
        }
    }
    let small_area = last[at].value.clone();
    let mut picks = vec![0usize; n];
    for j in (1..=n).rev() {
        let e = &layers[j].1[at];
        picks[j - 1] = e.member;
        at = e.prev;
    }

    // bins of the plan, then the extra bin
    let mut bins: Vec<FracBin> = plan
        .bins
        .iter()
        .map(|c| FracBin {
            shelves: c
                .iter()
                .enumerate()
                .flat_map(|(r, &x)| (0..x).map(move |_| FracShelf { class: r, pieces: Vec::new() }))
                .collect(),
            small: Vec::new(),
        })
        .collect();
    if t > 0 {
        bins.push(FracBin {
            shelves: vec![FracShelf { class: 0, pieces: Vec::new() }],
            small: Vec::new(),
        });
    }
    let mut slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t];
    for (b, bin) in bins.iter().enumerate() {
        for (s, sh) in bin.shelves.iter().enumerate() {
            slots[sh.class].push((b, s));
        }
    }

    // replay the reductions and lay the units out shelf by shelf
    let unit = Rational::new(One::one(), n.into());
    let mut cursor: Vec<(usize, u32)> = vec![(0, 0); t];
    let mut u = full;
    let mut last_piece: Vec<Option<(usize, usize, usize)>> = vec![None; n];
    for (j, &m) in picks.iter().enumerate() {
        let Some(Some(need)) = needs[j][m] else { continue };
        let takes = reduce(&mut u, need).expect("replayed path stays feasible");
        for (r, mut x) in takes {
            while x > 0 {
                let (slot, used) = cursor[r];
                let (b, s) = slots[r][slot];
                let take = x.min(n32 - used);
                let pieces = &mut bins[b].shelves[s].pieces;
                pieces.push(LargePiece {
                    item: j,
                    width: &unit * Rational::from_integer(take.into()),
                });
                last_piece[j] = Some((b, s, pieces.len() - 1));
                x -= take;
                cursor[r] = if used + take == n32 { (slot + 1, 0) } else { (slot, used + take) };
            }
        }
    }

    let items: Vec<_> = picks.iter().enumerate().map(|(j, &m)| rounded[j][m].item.clone()).collect();
    let rects = picks
        .iter()
        .enumerate()
        .map(|(j, &m)| crate::shelves::Rect {
            id: j,
            width: rounded[j][m].width.clone(),
            height: rounded[j][m].height.clone(),
        })
        .collect::<Vec<_>>();
    // trim the rounding back off each item's last slice
    for (j, lp) in last_piece.iter().enumerate() {
        if let Some((b, s, p)) = *lp {
            let m = picks[j];
            let units = needs[j][m].flatten().expect("large").units;
            let excess = &unit * Rational::from_integer(units.into()) - &rounded[j][m].width;
            bins[b].shelves[s].pieces[p].width -= excess;
        }
    }

    let mut fa = FractionalAssignment {
        delta: delta.clone(),
        heights: plan.heights.clone(),
        items,
        rects,
        picks,
        bins,
        small_area,
    };
    let smalls: Vec<usize> = (0..n).filter(|&j| !fa.is_large(j)).collect();
    fill_small(&mut fa, &smalls);
    Ok(Some(fa))
}
