//! Turning a shelf-based fractional packing of rounded items into a packing of the
//! d-D items: one base type per shelf, small items re-shelved, shelves filled by
//! `hdh_unit_pack`.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::harmonic::{HarmonicContext, TypeVector};
use crate::model::{Packing, Placement};
use crate::numeric::{format_rational, Rational};
use crate::shelves::{canonical_shelving, hdh_unit_pack, next_fit_1d, CanonShelf, Rect, Shelf, ShelfTree};

use super::FractionalAssignment;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inflated {
    pub packing: Packing,
    /// `m/(1-δ) + t(Q-1) + 1 + δQ/(1-δ)`.
    pub bound: Rational,
    /// Bins before empty ones are dropped.
    pub raw_bins: usize,
    pub q: usize,
    pub t: usize,
    /// Bins opened for shelves split by base type.
    pub split_bins: usize,
    /// Bins opened for small-item shelves that did not fit.
    pub overflow_bins: usize,
}

#[derive(Debug, Clone)]
struct Slot {
    bin: usize,
    offset: Rational,
    height: Rational,
}

/// Rebuilds `a` as a whole-item packing of `a.items` in unit bins.
pub fn inflate(a: &FractionalAssignment, ctx: &HarmonicContext) -> Result<Inflated> {
    a.check()?;
    let Some(d) = a.items.first().map(|it| it.dim()) else {
        return Ok(Inflated {
            packing: Packing::unit_bins(2),
            bound: Rational::zero(),
            raw_bins: 0,
            q: 0,
            t: 0,
            split_bins: 0,
            overflow_bins: 0,
        });
    };
    if d < 2 {
        return Err(Error::Input("inflate needs at least two dimensions".into()));
    }
    let one = Rational::one();
    let btypes: Vec<TypeVector> = a
        .items
        .iter()
        .map(|it| ctx.type_vector(&it.lengths[..d - 1], false))
        .collect::<Result<_>>()?;
    let q = {
        let mut all = btypes.clone();
        all.sort();
        all.dedup();
        all.len()
    };
    let t = a.used_heights().len();
    let m = a.bins.len();

    // existing shelf slots and the height already stacked in each bin
    let mut top: Vec<Rational> = Vec::with_capacity(m);
    let mut class_slots: Vec<Vec<Slot>> = vec![Vec::new(); a.heights.len()];
    for (b, bin) in a.bins.iter().enumerate() {
        let mut cursor = Rational::zero();
        for s in &bin.shelves {
            let h = &a.heights[s.class];
            class_slots[s.class].push(Slot {
                bin: b,
                offset: cursor.clone(),
                height: h.clone(),
            });
            cursor += h;
        }
        top.push(cursor);
    }

    // one base type per shelf: ceil(width) shelves per (class, btype)
    let mut typed_slots: BTreeMap<TypeVector, Vec<Slot>> = BTreeMap::new();
    let mut extra: Vec<(TypeVector, Rational)> = Vec::new();
    for (class, slots) in class_slots.into_iter().enumerate() {
        let mut widths: BTreeMap<TypeVector, Rational> = BTreeMap::new();
        for bin in &a.bins {
            for s in bin.shelves.iter().filter(|s| s.class == class) {
                for p in &s.pieces {
                    *widths.entry(btypes[p.item].clone()).or_insert_with(Rational::zero) += &p.width;
                }
            }
        }
        let mut free = slots.into_iter();
        for (bt, w) in widths {
            let k = w.ceil().to_integer();
            let mut i = num::BigInt::zero();
            while i < k {
                match free.next() {
                    Some(slot) => typed_slots.entry(bt.clone()).or_default().push(slot),
                    None => extra.push((bt.clone(), a.heights[class].clone())),
                }
                i += 1;
            }
        }
    }
    let extra_sizes: Vec<Rational> = extra.iter().map(|(_, h)| h.clone()).collect();
    let split_groups = next_fit_1d(&extra_sizes, &one)?;
    for group in &split_groups {
        let b = top.len();
        let mut cursor = Rational::zero();
        for &e in group {
            let (bt, h) = &extra[e];
            typed_slots.entry(bt.clone()).or_default().push(Slot {
                bin: b,
                offset: cursor.clone(),
                height: h.clone(),
            });
            cursor += h;
        }
        top.push(cursor);
    }
    let split_bins = split_groups.len();

    // small items: canonical shelves per base type, Next-Fit into the free space
    let mut by_type: BTreeMap<&TypeVector, (Vec<Rect>, Vec<Rect>)> = BTreeMap::new();
    for (i, r) in a.rects.iter().enumerate() {
        let entry = by_type.entry(&btypes[i]).or_default();
        if a.is_large(i) {
            entry.0.push(r.clone());
        } else {
            entry.1.push(r.clone());
        }
    }
    let mut small_shelves: Vec<CanonShelf> = Vec::new();
    for (_, small) in by_type.values() {
        small_shelves.extend(canonical_shelving(small)?.shelves);
    }
    let mut small_slots: Vec<Option<Slot>> = Vec::with_capacity(small_shelves.len());
    let mut b = 0;
    let mut spill = Vec::new();
    for (s, shelf) in small_shelves.iter().enumerate() {
        while b < top.len() && &top[b] + &shelf.height > one {
            b += 1;
        }
        if b == top.len() {
            spill.push(s);
            small_slots.push(None);
            continue;
        }
        small_slots.push(Some(Slot {
            bin: b,
            offset: top[b].clone(),
            height: shelf.height.clone(),
        }));
        top[b] += &shelf.height;
    }
    let spill_sizes: Vec<Rational> = spill.iter().map(|&s| small_shelves[s].height.clone()).collect();
    let overflow_groups = next_fit_1d(&spill_sizes, &one)?;
    for group in &overflow_groups {
        let b = top.len();
        let mut cursor = Rational::zero();
        for &g in group {
            let s = spill[g];
            small_slots[s] = Some(Slot {
                bin: b,
                offset: cursor.clone(),
                height: small_shelves[s].height.clone(),
            });
            cursor += &small_shelves[s].height;
        }
        top.push(cursor);
    }
    let overflow_bins = overflow_groups.len();

    let bins = top.len();
    let mut packing = Packing::unit_bins(d);
    packing.bins = bins;
    let mut trees: Vec<Vec<Shelf>> = vec![Vec::new(); bins];

    // large items: canonical shelving per base type, matched tallest to tallest slot
    for (bt, (large, _)) in &by_type {
        if large.is_empty() {
            continue;
        }
        let shelving = canonical_shelving(large)?;
        let mut slots = typed_slots.remove(*bt).unwrap_or_default();
        slots.sort_by(|x, y| y.height.cmp(&x.height));
        if shelving.shelves.len() > slots.len() {
            return Err(Error::Contract(format!(
                "base type {bt} needs {} shelves but has {}",
                shelving.shelves.len(),
                slots.len()
            )));
        }
        for (shelf, slot) in shelving.shelves.iter().zip(&slots) {
            if shelf.height > slot.height {
                return Err(Error::Contract(format!(
                    "canonical shelf of height {} does not fit a slot of height {}",
                    format_rational(&shelf.height),
                    format_rational(&slot.height)
                )));
            }
            place(a, shelf, slot, d, ctx, &mut packing.placements, &mut trees)?;
        }
    }
    for (shelf, slot) in small_shelves.iter().zip(&small_slots) {
        let slot = slot.as_ref().expect("every small shelf is placed");
        place(a, shelf, slot, d, ctx, &mut packing.placements, &mut trees)?;
    }

    packing.shelves = Some(
        trees
            .into_iter()
            .map(|mut shelves| {
                shelves.sort_by(|x, y| x.offset.cmp(&y.offset));
                ShelfTree::Stack(shelves)
            })
            .collect(),
    );

    let mf = Rational::from_integer(m.into());
    let qf = Rational::from_integer(q.into());
    let tf = Rational::from_integer(t.into());
    let rest = &one - &a.delta;
    let bound = &mf / &rest + tf * (&qf - &one) + &one + &a.delta * &qf / &rest;
    if Rational::from_integer(bins.into()) >= bound {
        return Err(Error::Contract(format!(
            "{bins} bins is not below {}",
            format_rational(&bound)
        )));
    }
    packing.drop_empty_bins();
    Ok(Inflated {
        packing,
        bound,
        raw_bins: bins,
        q,
        t,
        split_bins,
        overflow_bins,
    })
}

// Places the unsliced items of `shelf` and the item whose first slice it holds.
fn place(
    a: &FractionalAssignment,
    shelf: &CanonShelf,
    slot: &Slot,
    d: usize,
    ctx: &HarmonicContext,
    out: &mut Vec<Placement>,
    trees: &mut [Vec<Shelf>],
) -> Result<()> {
    let members: Vec<usize> = shelf
        .pieces
        .iter()
        .filter(|p| p.slice != Some(2))
        .map(|p| p.rect)
        .collect();
    if members.is_empty() {
        return Ok(());
    }
    let seq: Vec<(usize, &[Rational])> = members
        .iter()
        .map(|&i| (a.items[i].id, &a.items[i].lengths[..d - 1]))
        .collect();
    let pack = hdh_unit_pack(&seq, ctx)?;
    for (&i, mut pos) in members.iter().zip(pack.positions) {
        pos.push(slot.offset.clone());
        out.push(Placement::of(&a.items[i], pos, slot.bin));
    }
    trees[slot.bin].push(Shelf {
        height: slot.height.clone(),
        offset: slot.offset.clone(),
        base: pack.tree,
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Item;
    use crate::numeric::rat;
    use crate::validate::validate_items;

    fn ctx() -> HarmonicContext {
        HarmonicContext::new(4).unwrap()
    }

    #[test]
    fn empty_gives_no_bins() {
        let fa = FractionalAssignment::canonical(Vec::new(), rat(1, 3), &ctx()).unwrap();
        assert_eq!(inflate(&fa, &ctx()).unwrap().packing.bins, 0);
    }

    #[test]
    fn single_btype_needs_no_split_bins() {
        let items: Vec<Item> = (0..6)
            .map(|i| Item::new(i, vec![rat(3, 5), rat(2, 5) + rat(i as i64, 100)]))
            .collect();
        let fa = FractionalAssignment::canonical(items.clone(), rat(1, 3), &ctx()).unwrap();
        let out = inflate(&fa, &ctx()).unwrap();
        assert_eq!(out.q, 1);
        assert_eq!(out.split_bins, 0);
        assert!(validate_items(&out.packing, &items).is_valid());
    }

    #[test]
    fn mixed_types_and_small_items() {
        let items = vec![
            Item::new(0, vec![rat(3, 5), rat(1, 4), rat(9, 10)]),
            Item::new(1, vec![rat(1, 3), rat(2, 5), rat(4, 5)]),
            Item::new(2, vec![rat(1, 7), rat(1, 9), rat(1, 5)]),
            Item::new(3, vec![rat(1, 2), rat(1, 2), rat(1, 10)]),
            Item::new(4, vec![rat(2, 3), rat(1, 6), rat(1, 2)]),
        ];
        let fa = FractionalAssignment::canonical(items.clone(), rat(1, 3), &ctx()).unwrap();
        let out = inflate(&fa, &ctx()).unwrap();
        assert!(Rational::from_integer(out.raw_bins.into()) < out.bound);
        assert!(validate_items(&out.packing, &items).is_valid());
    }
}
