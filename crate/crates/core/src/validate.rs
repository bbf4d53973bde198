//! Geometric validity of packings.
//!
//! Cuboids are closed; two placements conflict only when their intersection has
//! positive volume, so touching faces are fine.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{Signed, Zero};

use crate::model::{is_permutation, Choice, Item, Itemset, Packing, PackingKind, Placement};
use crate::numeric::format_rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape { item: usize, message: String },
    Containment { item: usize, axis: usize },
    Overlap { bin: usize, a: usize, b: usize },
    BinIndex { item: usize, bin: usize },
    Duplicate { item: usize },
    Missing { item: usize },
    Unexpected { item: usize },
    Lengths { item: usize },
    Assortment { itemset: usize, message: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { item, message } => write!(f, "item {item}: {message}"),
            Violation::Containment { item, axis } => {
                write!(f, "item {item} leaves the container along axis {}", axis + 1)
            }
            Violation::Overlap { bin, a, b } => write!(f, "items {a} and {b} overlap in bin {bin}"),
            Violation::BinIndex { item, bin } => write!(f, "item {item} refers to missing bin {bin}"),
            Violation::Duplicate { item } => write!(f, "item {item} placed more than once"),
            Violation::Missing { item } => write!(f, "item {item} not placed"),
            Violation::Unexpected { item } => write!(f, "item {item} is not part of the instance"),
            Violation::Lengths { item } => {
                write!(f, "item {item} placed with lengths that do not match its orientation")
            }
            Violation::Assortment { itemset, message } => write!(f, "itemset {itemset}: {message}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Containment, pairwise overlap and duplicate placements.
pub fn validate_packing(p: &Packing) -> ValidationReport {
    let mut out = Vec::new();
    let d = p.dim();
    let mut seen = BTreeSet::new();
    let mut shaped_ok = vec![false; p.placements.len()];
    for (idx, pl) in p.placements.iter().enumerate() {
        if !seen.insert(pl.item) {
            out.push(Violation::Duplicate { item: pl.item });
        }
        if pl.lengths.len() != d || pl.position.len() != d {
            out.push(Violation::Shape {
                item: pl.item,
                message: format!("expected {d} coordinates"),
            });
            continue;
        }
        if !is_permutation(&pl.orientation, d) {
            out.push(Violation::Shape {
                item: pl.item,
                message: "orientation is not a permutation".into(),
            });
        }
        if let Some(x) = pl.lengths.iter().find(|x| !x.is_positive()) {
            out.push(Violation::Shape {
                item: pl.item,
                message: format!("non-positive length {}", format_rational(x)),
            });
            continue;
        }
        let bins = if p.kind == PackingKind::Strip { 1 } else { p.bins };
        if pl.bin >= bins {
            out.push(Violation::BinIndex {
                item: pl.item,
                bin: pl.bin,
            });
        }
        for axis in 0..d {
            let unbounded = p.kind == PackingKind::Strip && axis == d - 1;
            if pl.position[axis].is_negative() || (!unbounded && pl.end(axis) > p.container[axis]) {
                out.push(Violation::Containment {
                    item: pl.item,
                    axis,
                });
            }
        }
        shaped_ok[idx] = true;
    }

    let mut by_bin: BTreeMap<usize, Vec<&Placement>> = BTreeMap::new();
    for (pl, ok) in p.placements.iter().zip(&shaped_ok) {
        if *ok {
            by_bin.entry(pl.bin).or_default().push(pl);
        }
    }
    for (bin, mut list) in by_bin {
        list.sort_by(|a, b| a.position[0].cmp(&b.position[0]).then(a.item.cmp(&b.item)));
        for i in 0..list.len() {
            let a = list[i];
            let a_end = a.end(0);
            for b in &list[i + 1..] {
                if b.position[0] >= a_end {
                    break;
                }
                if overlaps(a, b, 0..d) {
                    let (x, y) = (a.item.min(b.item), a.item.max(b.item));
                    out.push(Violation::Overlap { bin, a: x, b: y });
                }
            }
        }
    }
    ValidationReport { violations: out }
}

/// Positive-measure intersection of the projections onto `axes`.
pub fn overlaps(a: &Placement, b: &Placement, axes: impl IntoIterator<Item = usize>) -> bool {
    axes.into_iter()
        .all(|j| a.position[j] < b.end(j) && b.position[j] < a.end(j))
}

/// [`validate_packing`] plus: every item of `items` placed exactly once, nothing else
/// placed, and the placed lengths are the item's lengths under the placement's orientation.
pub fn validate_items(p: &Packing, items: &[Item]) -> ValidationReport {
    let mut report = validate_packing(p);
    let by_id: BTreeMap<usize, &Item> = items.iter().map(|it| (it.id, it)).collect();
    let mut placed = BTreeSet::new();
    for pl in &p.placements {
        placed.insert(pl.item);
        match by_id.get(&pl.item) {
            None => report.violations.push(Violation::Unexpected { item: pl.item }),
            Some(src) => {
                let ok = is_permutation(&pl.orientation, src.dim())
                    && pl.lengths.len() == src.dim()
                    && pl
                        .orientation
                        .iter()
                        .zip(&pl.lengths)
                        .all(|(&a, x)| src.lengths[a] == *x);
                if !ok {
                    report.violations.push(Violation::Lengths { item: pl.item });
                }
            }
        }
    }
    for id in by_id.keys() {
        if !placed.contains(id) {
            report.violations.push(Violation::Missing { item: *id });
        }
    }
    report
}

/// [`validate_packing`] plus: exactly one member chosen per itemset, that member placed
/// once with its own lengths, and nothing else placed.
pub fn validate_assortment(p: &Packing, itemsets: &[Itemset], assortment: &[Choice]) -> ValidationReport {
    let mut report = validate_packing(p);
    let mut chosen: BTreeMap<usize, &Choice> = BTreeMap::new();
    for c in assortment {
        if chosen.insert(c.itemset, c).is_some() {
            report.violations.push(Violation::Assortment {
                itemset: c.itemset,
                message: "chosen more than once".into(),
            });
        }
    }
    let placements: BTreeMap<usize, &Placement> = p.placements.iter().map(|pl| (pl.item, pl)).collect();
    let mut expected_ids = BTreeSet::new();
    for set in itemsets {
        let Some(c) = chosen.get(&set.id) else {
            report.violations.push(Violation::Assortment {
                itemset: set.id,
                message: "no member chosen".into(),
            });
            continue;
        };
        let Some(member) = set.members.get(c.member) else {
            report.violations.push(Violation::Assortment {
                itemset: set.id,
                message: format!("member index {} out of range", c.member),
            });
            continue;
        };
        if member.id != c.item {
            report.violations.push(Violation::Assortment {
                itemset: set.id,
                message: "item id does not match the chosen member".into(),
            });
        }
        expected_ids.insert(member.id);
        match placements.get(&member.id) {
            None => report.violations.push(Violation::Missing { item: member.id }),
            Some(pl) => {
                if pl.lengths != member.lengths {
                    report.violations.push(Violation::Lengths { item: member.id });
                }
            }
        }
    }
    for id in placements.keys() {
        if !expected_ids.contains(id) {
            report.violations.push(Violation::Unexpected { item: *id });
        }
    }
    report
}

/// Total placed volume per bin, for diagnostics.
pub fn bin_loads(p: &Packing) -> Vec<crate::Rational> {
    let mut loads = vec![crate::Rational::zero(); p.bins.max(1)];
    for pl in &p.placements {
        if pl.bin < loads.len() {
            loads[pl.bin] += crate::numeric::product(&pl.lengths);
        }
    }
    loads
}
