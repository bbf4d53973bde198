//! Shelf-based packing: the recursive unit-bin packer, canonical shelving of
//! rectangles with vertical slicing, and Next-Fit.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::harmonic::HarmonicContext;
use crate::numeric::{format_rational, Rational};

/// Recursive shelf structure of one bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShelfTree {
    /// One axis left: item ids laid end to end in this order.
    Line(Vec<usize>),
    /// Shelves stacked along the current last axis, bottom first.
    Stack(Vec<Shelf>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shelf {
    pub height: Rational,
    /// Coordinate of the shelf's base along the stacking axis.
    pub offset: Rational,
    /// How the item bases are arranged on the shelf, one axis lower.
    pub base: ShelfTree,
}

impl ShelfTree {
    /// Item ids in the order they were laid out.
    pub fn items(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_items(&mut out);
        out
    }

    fn collect_items(&self, out: &mut Vec<usize>) {
        match self {
            ShelfTree::Line(ids) => out.extend(ids),
            ShelfTree::Stack(shelves) => {
                for s in shelves {
                    s.base.collect_items(out);
                }
            }
        }
    }

    /// Heights of the top-level shelves; empty for a line.
    pub fn shelf_heights(&self) -> Vec<Rational> {
        match self {
            ShelfTree::Line(_) => Vec::new(),
            ShelfTree::Stack(shelves) => shelves.iter().map(|s| s.height.clone()).collect(),
        }
    }
}

/// Output of [`hdh_unit_pack`]: the tree and, for each input item in order, its position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitPack {
    pub tree: ShelfTree,
    pub positions: Vec<Vec<Rational>>,
}

/// Packs a sequence of items sharing one type vector into a single unit bin.
///
/// Requires `vol(f_k(seq - last)) < 1`. For `d > 1`, items whose last length is of
/// type `k` are sorted by that length (decreasing, stable); otherwise the given order is
/// kept. Minimal prefixes whose bases reach `f_k`-volume 1 become shelves, packed
/// recursively one dimension lower.
pub fn hdh_unit_pack(seq: &[(usize, &[Rational])], ctx: &HarmonicContext) -> Result<UnitPack> {
    let n = seq.len();
    if n == 0 {
        return Ok(UnitPack {
            tree: ShelfTree::Stack(Vec::new()),
            positions: Vec::new(),
        });
    }
    let d = seq[0].1.len();
    if d == 0 || seq.iter().any(|(_, l)| l.len() != d) {
        return Err(Error::Contract("items must share a positive dimension".into()));
    }
    let types = ctx.type_vector(seq[0].1, false)?;
    for (id, l) in seq {
        if ctx.type_vector(l, false)? != types {
            return Err(Error::Contract(format!(
                "item {id} has type {} but the sequence has type {types}",
                ctx.type_vector(l, false)?
            )));
        }
    }
    let head: Rational = seq[..n - 1].iter().map(|(_, l)| ctx.vol_f(l)).sum();
    if head >= Rational::one() {
        return Err(Error::Contract(format!(
            "f-volume of all but the last item is {}, not below 1",
            format_rational(&head)
        )));
    }
    let lengths: Vec<&[Rational]> = seq.iter().map(|(_, l)| *l).collect();
    let small_axes: Vec<bool> = types.0.iter().map(|&q| q == ctx.k()).collect();
    let mut positions = vec![vec![Rational::zero(); d]; n];
    let order: Vec<usize> = (0..n).collect();
    let tree = pack_level(&lengths, &small_axes, order, d, ctx, &mut positions)?;
    let tree = relabel(tree, &|i| seq[i].0);
    Ok(UnitPack { tree, positions })
}

fn relabel(tree: ShelfTree, id_of: &dyn Fn(usize) -> usize) -> ShelfTree {
    match tree {
        ShelfTree::Line(ix) => ShelfTree::Line(ix.into_iter().map(id_of).collect()),
        ShelfTree::Stack(shelves) => ShelfTree::Stack(
            shelves
                .into_iter()
                .map(|s| Shelf {
                    height: s.height,
                    offset: s.offset,
                    base: relabel(s.base, id_of),
                })
                .collect(),
        ),
    }
}

// Packs items `order` (indices into `lengths`) using their first `dim` axes,
// writing coordinates 0..dim into `positions`.
fn pack_level(
    lengths: &[&[Rational]],
    small_axes: &[bool],
    mut order: Vec<usize>,
    dim: usize,
    ctx: &HarmonicContext,
    positions: &mut [Vec<Rational>],
) -> Result<ShelfTree> {
    let one = Rational::one();
    if dim == 1 {
        let mut cursor = Rational::zero();
        for &i in &order {
            positions[i][0] = cursor.clone();
            cursor += &lengths[i][0];
        }
        if cursor > one {
            return Err(Error::Contract(format!(
                "1D line has length {}",
                format_rational(&cursor)
            )));
        }
        return Ok(ShelfTree::Line(order));
    }
    let axis = dim - 1;
    let small = small_axes[axis];
    if small {
        order.sort_by(|&a, &b| lengths[b][axis].cmp(&lengths[a][axis]));
    }
    let mut shelves = Vec::new();
    let mut cursor = Rational::zero();
    let mut prev_wf: Option<Rational> = None;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        let mut width = Rational::zero();
        while end < order.len() && width < one {
            width += ctx.vol_f(&lengths[order[end]][..axis]);
            end += 1;
        }
        let prefix: Vec<usize> = order[start..end].to_vec();
        let height = prefix
            .iter()
            .map(|&i| lengths[i][axis].clone())
            .max()
            .expect("non-empty prefix");
        if small {
            if let Some(wf) = &prev_wf {
                if height > *wf {
                    return Err(Error::Contract(format!(
                        "shelf height {} exceeds previous shelf's wf-volume {}",
                        format_rational(&height),
                        format_rational(wf)
                    )));
                }
            }
            prev_wf = Some(
                prefix
                    .iter()
                    .map(|&i| ctx.vol_f(&lengths[i][..axis]) * &lengths[i][axis])
                    .sum(),
            );
        }
        for &i in &prefix {
            positions[i][axis] = cursor.clone();
        }
        let base = pack_level(lengths, small_axes, prefix, axis, ctx, positions)?;
        shelves.push(Shelf {
            height: height.clone(),
            offset: cursor.clone(),
            base,
        });
        cursor += height;
        start = end;
    }
    if cursor > one {
        return Err(Error::Contract(format!(
            "shelves reach height {} in a unit bin",
            format_rational(&cursor)
        )));
    }
    Ok(ShelfTree::Stack(shelves))
}

/// A rectangle to be shelved; `id` is the caller's label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub id: usize,
    pub width: Rational,
    pub height: Rational,
}

/// A horizontal run of one rectangle inside a shelf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub rect: usize,
    pub width: Rational,
    /// `Some(1)` or `Some(2)` for the two halves of a sliced rectangle.
    pub slice: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonShelf {
    pub height: Rational,
    pub pieces: Vec<Piece>,
}

impl CanonShelf {
    pub fn used_width(&self) -> Rational {
        self.pieces.iter().map(|p| p.width.clone()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceRecord {
    pub rect: usize,
    pub widths: [Rational; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shelving {
    pub shelves: Vec<CanonShelf>,
    pub slices: Vec<SliceRecord>,
}

impl Shelving {
    pub fn heights(&self) -> Vec<Rational> {
        self.shelves.iter().map(|s| s.height.clone()).collect()
    }
}

/// Sort order used by [`canonical_shelving`]: taller first, then wider, then smaller id.
pub fn canonical_order(rects: &[Rect]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&rects[a], &rects[b]);
        y.height
            .cmp(&x.height)
            .then(y.width.cmp(&x.width))
            .then(x.id.cmp(&y.id))
    });
    order
}

/// Greedy width-1 tight shelves over rectangles sorted by [`canonical_order`]; a rectangle
/// crossing a shelf boundary is cut vertically, so each is cut at most once.
pub fn canonical_shelving(rects: &[Rect]) -> Result<Shelving> {
    let one = Rational::one();
    for r in rects {
        if !crate::numeric::in_unit_interval(&r.width) || !crate::numeric::in_unit_interval(&r.height) {
            return Err(Error::Input(format!("rectangle {} is not within the unit square", r.id)));
        }
    }
    let mut shelves: Vec<CanonShelf> = Vec::new();
    let mut slices = Vec::new();
    let mut room = Rational::zero();
    for i in canonical_order(rects) {
        let r = &rects[i];
        if room.is_zero() {
            shelves.push(CanonShelf {
                height: r.height.clone(),
                pieces: Vec::new(),
            });
            room = one.clone();
        }
        if r.width <= room {
            room -= &r.width;
            shelves.last_mut().expect("open shelf").pieces.push(Piece {
                rect: r.id,
                width: r.width.clone(),
                slice: None,
            });
        } else {
            let first = room.clone();
            let second = &r.width - &first;
            shelves.last_mut().expect("open shelf").pieces.push(Piece {
                rect: r.id,
                width: first.clone(),
                slice: Some(1),
            });
            shelves.push(CanonShelf {
                height: r.height.clone(),
                pieces: vec![Piece {
                    rect: r.id,
                    width: second.clone(),
                    slice: Some(2),
                }],
            });
            room = &one - &second;
            slices.push(SliceRecord {
                rect: r.id,
                widths: [first, second],
            });
        }
    }
    Ok(Shelving { shelves, slices })
}

/// `a ⪯ b`: with both sorted in decreasing order, `a` is no longer than `b` and
/// each entry of `a` is at most the matching entry of `b`.
pub fn dominated_by(a: &[Rational], b: &[Rational]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| y.cmp(x));
    b.sort_by(|x, y| y.cmp(x));
    a.len() <= b.len() && a.iter().zip(&b).all(|(x, y)| x <= y)
}

/// Sequential Next-Fit; returns the indices held by each bin.
pub fn next_fit_1d(sizes: &[Rational], capacity: &Rational) -> Result<Vec<Vec<usize>>> {
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut load = Rational::zero();
    for (i, s) in sizes.iter().enumerate() {
        if s > capacity {
            return Err(Error::Input(format!(
                "size {} exceeds capacity {}",
                format_rational(s),
                format_rational(capacity)
            )));
        }
        match bins.last_mut() {
            Some(bin) if &load + s <= *capacity => {
                bin.push(i);
                load += s;
            }
            _ => {
                bins.push(vec![i]);
                load = s.clone();
            }
        }
    }
    Ok(bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Item, Packing, Placement};
    use crate::numeric::{int, parse_rational, rat};
    use crate::validate::validate_packing;

    fn ctx(k: u32) -> HarmonicContext {
        HarmonicContext::new(k).unwrap()
    }

    fn to_packing(items: &[Item], pack: &UnitPack) -> Packing {
        let d = items[0].dim();
        let mut p = Packing::unit_bins(d);
        p.bins = 1;
        p.placements = items
            .iter()
            .zip(&pack.positions)
            .map(|(it, pos)| Placement::of(it, pos.clone(), 0))
            .collect();
        p
    }

    fn seq(items: &[Item]) -> Vec<(usize, &[Rational])> {
        items.iter().map(|it| (it.id, it.lengths.as_slice())).collect()
    }

    #[test]
    fn single_item() {
        let items = vec![Item::new(7, vec![rat(3, 5), rat(2, 3)])];
        let pack = hdh_unit_pack(&seq(&items), &ctx(4)).unwrap();
        assert_eq!(pack.tree.shelf_heights(), vec![rat(2, 3)]);
        assert!(validate_packing(&to_packing(&items, &pack)).is_valid());
    }

    #[test]
    fn eight_small_squares_fit_one_bin() {
        let items: Vec<Item> = (0..8).map(|i| Item::new(i, vec![rat(3, 10); 2])).collect();
        let pack = hdh_unit_pack(&seq(&items), &ctx(4)).unwrap();
        assert!(validate_packing(&to_packing(&items, &pack)).is_valid());
        assert_eq!(pack.tree.items().len(), 8);
        // three per shelf: f-width 1/3 each
        assert_eq!(pack.tree.shelf_heights().len(), 3);
    }

    #[test]
    fn small_heights_sorted() {
        let hs = [rat(1, 10), rat(1, 12), rat(1, 11), rat(1, 13), rat(1, 14)];
        let items: Vec<Item> = hs
            .iter()
            .enumerate()
            .map(|(i, h)| Item::new(i, vec![rat(3, 5), rat(3, 5), h.clone()]))
            .collect();
        let pack = hdh_unit_pack(&seq(&items), &ctx(4)).unwrap();
        let heights = pack.tree.shelf_heights();
        assert_eq!(heights, vec![rat(1, 10), rat(1, 11), rat(1, 12), rat(1, 13), rat(1, 14)]);
        assert!(validate_packing(&to_packing(&items, &pack)).is_valid());
    }

    #[test]
    fn preconditions_enforced() {
        let items = vec![
            Item::new(0, vec![rat(3, 5)]),
            Item::new(1, vec![rat(3, 5)]),
        ];
        assert!(matches!(hdh_unit_pack(&seq(&items), &ctx(4)), Err(Error::Contract(_))));
        let mixed = vec![Item::new(0, vec![rat(3, 5)]), Item::new(1, vec![rat(1, 3)])];
        assert!(matches!(hdh_unit_pack(&seq(&mixed), &ctx(4)), Err(Error::Contract(_))));
    }

    #[test]
    fn six_rectangles_two_slices() {
        let widths = ["0.3", "0.4", "0.4", "0.5", "0.9", "0.25"];
        let rects: Vec<Rect> = widths
            .iter()
            .enumerate()
            .map(|(i, w)| Rect {
                id: i + 1,
                width: parse_rational(w).unwrap(),
                height: rat(10 - i as i64, 20),
            })
            .collect();
        let s = canonical_shelving(&rects).unwrap();
        assert_eq!(s.shelves.len(), 3);
        assert_eq!(
            s.slices,
            vec![
                SliceRecord { rect: 3, widths: [rat(3, 10), rat(1, 10)] },
                SliceRecord { rect: 5, widths: [rat(2, 5), rat(1, 2)] },
            ]
        );
        assert_eq!(s.heights(), vec![rat(10, 20), rat(8, 20), rat(6, 20)]);
    }

    #[test]
    fn full_width_rects() {
        let rects: Vec<Rect> = (0..4)
            .map(|i| Rect { id: i, width: int(1), height: rat(1, 2 + i as i64) })
            .collect();
        let s = canonical_shelving(&rects).unwrap();
        assert_eq!(s.shelves.len(), 4);
        assert!(s.slices.is_empty());
    }

    #[test]
    fn next_fit_examples() {
        let one = int(1);
        assert_eq!(next_fit_1d(&vec![rat(3, 5); 3], &one).unwrap().len(), 3);
        assert_eq!(next_fit_1d(&vec![rat(1, 2); 4], &one).unwrap().len(), 2);
        assert!(next_fit_1d(&[], &one).unwrap().is_empty());
        assert!(next_fit_1d(&[rat(3, 2)], &one).is_err());
    }
}
