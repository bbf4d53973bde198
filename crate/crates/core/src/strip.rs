//! Strip packing by base-type shelves, and its multiple-choice extension.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::fullh::{argmin_member, group_by, SolveResult, SolveStats};
use crate::harmonic::{HarmonicContext, TypeVector};
use crate::model::{check_items, check_itemsets, Choice, Item, Itemset, Packing, Placement};
use crate::numeric::{format_rational, pow, Rational};
use crate::shelves::{hdh_unit_pack, Shelf, ShelfTree, UnitPack};

/// A full-base shelf of items sharing a base type.
#[derive(Debug, Clone)]
pub struct BaseShelf {
    pub btype: TypeVector,
    /// Indices into the item slice, in shelf order.
    pub items: Vec<usize>,
    /// Tallest item on the shelf.
    pub height: Rational,
    /// Arrangement of the item bases, `d - 1` axes.
    pub base: UnitPack,
}

/// Shelves per base type in type order; inside a type, non-increasing height.
pub fn build_shelves(items: &[Item], ctx: &HarmonicContext) -> Result<Vec<BaseShelf>> {
    let d = check_items(items)?.unwrap_or(2);
    if d < 2 {
        return Err(Error::Input("strip packing needs at least two dimensions".into()));
    }
    let classes = group_by(items, |it| ctx.type_vector(&it.lengths, true))?;
    let one = Rational::one();
    let mut shelves = Vec::new();
    for (btype, mut members) in classes {
        members.sort_by(|&a, &b| {
            items[b]
                .height()
                .cmp(items[a].height())
                .then(items[a].id.cmp(&items[b].id))
        });
        let mut start = 0;
        while start < members.len() {
            let mut end = start;
            let mut width = Rational::zero();
            while end < members.len() && width < one {
                width += ctx.base_width(&items[members[end]].lengths);
                end += 1;
            }
            let chunk = members[start..end].to_vec();
            let seq: Vec<(usize, &[Rational])> = chunk
                .iter()
                .map(|&i| (items[i].id, &items[i].lengths[..d - 1]))
                .collect();
            let base = hdh_unit_pack(&seq, ctx)?;
            shelves.push(BaseShelf {
                btype: btype.clone(),
                height: items[chunk[0]].height().clone(),
                items: chunk,
                base,
            });
            start = end;
        }
    }
    Ok(shelves)
}

/// Places `shelf`'s items with the shelf base at `offset` in `bin`.
pub(crate) fn place_shelf(
    items: &[Item],
    shelf: &BaseShelf,
    offset: &Rational,
    bin: usize,
    out: &mut Vec<Placement>,
) -> Shelf {
    for (&i, base_pos) in shelf.items.iter().zip(&shelf.base.positions) {
        let mut pos = base_pos.clone();
        pos.push(offset.clone());
        out.push(Placement::of(&items[i], pos, bin));
    }
    Shelf {
        height: shelf.height.clone(),
        offset: offset.clone(),
        base: shelf.base.tree.clone(),
    }
}

pub fn vol_wf(items: &[Item], ctx: &HarmonicContext) -> Rational {
    items.iter().map(|it| ctx.vol_wf(&it.lengths)).sum()
}

pub fn distinct_btypes(items: &[Item], ctx: &HarmonicContext) -> Result<usize> {
    Ok(group_by(items, |it| ctx.type_vector(&it.lengths, true))?.len())
}

/// Stacks the base-type shelves into a unit-base strip; height below `Q + vol(wf_k)`.
pub fn hdh_sp(items: &[Item], ctx: &HarmonicContext) -> Result<SolveResult> {
    let shelves = build_shelves(items, ctx)?;
    let d = items.first().map(Item::dim).unwrap_or(2);
    let mut packing = Packing::unit_strip(d);
    let mut tree = Vec::new();
    let mut cursor = Rational::zero();
    for s in &shelves {
        tree.push(place_shelf(items, s, &cursor, 0, &mut packing.placements));
        cursor += &s.height;
    }
    packing.bins = 1;
    packing.shelves = Some(vec![ShelfTree::Stack(tree)]);
    let q = distinct_btypes(items, ctx)?;
    let volume = vol_wf(items, ctx);
    let bound = Rational::from_integer(q.into()) + &volume;
    if !items.is_empty() && cursor >= bound {
        return Err(Error::Contract(format!(
            "strip height {} is not below Q + vol(wf) = {}",
            format_rational(&cursor),
            format_rational(&bound)
        )));
    }
    Ok(SolveResult {
        packing,
        assortment: Vec::new(),
        stats: SolveStats { q, volume, bound },
    })
}

/// Picks from each itemset the member of least `vol(wf_k)` and packs the picks with [`hdh_sp`].
pub fn hdh_mcsp(itemsets: &[Itemset], ctx: &HarmonicContext) -> Result<SolveResult> {
    check_itemsets(itemsets)?;
    let mut chosen = Vec::with_capacity(itemsets.len());
    let mut assortment = Vec::with_capacity(itemsets.len());
    for set in itemsets {
        let m = argmin_member(set, |it| ctx.vol_wf(&it.lengths));
        chosen.push(set.members[m].clone());
        assortment.push(Choice {
            itemset: set.id,
            member: m,
            item: set.members[m].id,
        });
    }
    let mut result = hdh_sp(&chosen, ctx)?;
    result.assortment = assortment;
    Ok(result)
}

/// `max(vol(I), vol(wf_k(I)) / T_k^(d-1), tallest item)`.
pub fn lower_bound_sp(items: &[Item], ctx: &HarmonicContext) -> Rational {
    let Some(d) = items.first().map(Item::dim) else {
        return Rational::zero();
    };
    let vol: Rational = items.iter().map(Item::volume).sum();
    let wf = vol_wf(items, ctx) / pow(ctx.t_k(), d - 1);
    let tallest = items.iter().map(|it| it.height().clone()).max().unwrap_or_else(Rational::zero);
    vol.max(wf).max(tallest)
}
