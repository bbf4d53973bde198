//! Items, itemsets, placements and packings.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, in_unit_interval, product, Rational};
use crate::shelves::ShelfTree;

/// An axis-parallel cuboid.
///
/// `orientation[j]` is the axis of the source item that became axis `j` here; the
/// identity for items that were never rotated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: usize,
    pub lengths: Vec<Rational>,
    pub profit: Option<Rational>,
    pub orientation: Vec<usize>,
}

impl Item {
    pub fn new(id: usize, lengths: Vec<Rational>) -> Self {
        let orientation = (0..lengths.len()).collect();
        Item {
            id,
            lengths,
            profit: None,
            orientation,
        }
    }

    pub fn with_profit(mut self, profit: Rational) -> Self {
        self.profit = Some(profit);
        self
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn volume(&self) -> Rational {
        product(&self.lengths)
    }

    pub fn height(&self) -> &Rational {
        self.lengths.last().expect("item has at least one dimension")
    }

    pub fn profit_or_zero(&self) -> Rational {
        self.profit.clone().unwrap_or_else(Rational::zero)
    }

    /// Lengths must lie in `(0,1]`, profit must be non-negative.
    pub fn check_unit(&self) -> Result<()> {
        if self.lengths.is_empty() {
            return Err(Error::Input(format!("item {} has no dimensions", self.id)));
        }
        for (j, x) in self.lengths.iter().enumerate() {
            if !in_unit_interval(x) {
                return Err(Error::Input(format!(
                    "item {} has length {} in dimension {}, outside (0,1]",
                    self.id,
                    format_rational(x),
                    j + 1
                )));
            }
        }
        if let Some(p) = &self.profit {
            if *p < Rational::zero() {
                return Err(Error::Input(format!("item {} has negative profit", self.id)));
            }
        }
        if !is_permutation(&self.orientation, self.dim()) {
            return Err(Error::Input(format!("item {} has an invalid orientation", self.id)));
        }
        Ok(())
    }

    /// The item with axes permuted: new axis `j` is current axis `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Item {
        Item {
            id: self.id,
            lengths: perm.iter().map(|&a| self.lengths[a].clone()).collect(),
            profit: self.profit.clone(),
            orientation: perm.iter().map(|&a| self.orientation[a]).collect(),
        }
    }

    /// Lengths divided componentwise by `bin`.
    pub fn scaled_down(&self, bin: &[Rational]) -> Item {
        let mut out = self.clone();
        for (x, l) in out.lengths.iter_mut().zip(bin) {
            *x = &*x / l;
        }
        out
    }
}

pub fn is_permutation(perm: &[usize], d: usize) -> bool {
    if perm.len() != d {
        return false;
    }
    let mut seen = vec![false; d];
    for &a in perm {
        if a >= d || seen[a] {
            return false;
        }
        seen[a] = true;
    }
    true
}

/// Mutually exclusive alternatives; exactly one member is packed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Itemset {
    pub id: usize,
    pub members: Vec<Item>,
}

impl Itemset {
    pub fn new(id: usize, members: Vec<Item>) -> Self {
        Itemset { id, members }
    }

    pub fn singleton(item: Item) -> Self {
        Itemset {
            id: item.id,
            members: vec![item],
        }
    }

    pub fn check(&self) -> Result<usize> {
        let first = self
            .members
            .first()
            .ok_or_else(|| Error::Input(format!("itemset {} is empty", self.id)))?;
        let d = first.dim();
        for m in &self.members {
            m.check_unit()?;
            if m.dim() != d {
                return Err(Error::Input(format!(
                    "itemset {} mixes dimensions {} and {}",
                    self.id,
                    d,
                    m.dim()
                )));
            }
        }
        Ok(d)
    }
}

/// Checks every itemset and returns the common dimension (`None` when there are no itemsets).
pub fn check_itemsets(itemsets: &[Itemset]) -> Result<Option<usize>> {
    let mut d = None;
    for set in itemsets {
        let dd = set.check()?;
        match d {
            None => d = Some(dd),
            Some(prev) if prev != dd => {
                return Err(Error::Input(format!(
                    "itemsets mix dimensions {prev} and {dd}"
                )))
            }
            _ => {}
        }
    }
    Ok(d)
}

pub fn check_items(items: &[Item]) -> Result<Option<usize>> {
    let mut d = None;
    for it in items {
        it.check_unit()?;
        match d {
            None => d = Some(it.dim()),
            Some(prev) if prev != it.dim() => {
                return Err(Error::Input(format!(
                    "items mix dimensions {prev} and {}",
                    it.dim()
                )))
            }
            _ => {}
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationPolicy {
    None,
    All,
    /// Permute the base axes, keep the last axis in place.
    FixLastAxis,
    Explicit(Vec<Vec<usize>>),
}

impl RotationPolicy {
    pub fn check(&self, d: usize) -> Result<()> {
        if let RotationPolicy::Explicit(perms) = self {
            if perms.is_empty() {
                return Err(Error::Input("explicit rotation set is empty".into()));
            }
            if let Some(p) = perms.iter().find(|p| !is_permutation(p, d)) {
                return Err(Error::Input(format!("{p:?} is not a permutation of {d} axes")));
            }
        }
        Ok(())
    }

    /// Allowed permutations in lexicographic order.
    pub fn permutations(&self, d: usize) -> Vec<Vec<usize>> {
        match self {
            RotationPolicy::None => vec![(0..d).collect()],
            RotationPolicy::All => all_permutations(d),
            RotationPolicy::FixLastAxis => all_permutations(d.saturating_sub(1))
                .into_iter()
                .map(|mut p| {
                    if d > 0 {
                        p.push(d - 1);
                    }
                    p
                })
                .collect(),
            RotationPolicy::Explicit(perms) => {
                let mut ps = perms.clone();
                ps.sort();
                ps.dedup();
                ps
            }
        }
    }
}

/// All permutations of `0..d` in lexicographic order.
pub fn all_permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(d);
    let mut used = vec![false; d];
    fn rec(d: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == d {
            out.push(current.clone());
            return;
        }
        for a in 0..d {
            if !used[a] {
                used[a] = true;
                current.push(a);
                rec(d, current, used, out);
                current.pop();
                used[a] = false;
            }
        }
    }
    rec(d, &mut current, &mut used, &mut out);
    out
}

/// One member per distinct oriented length vector allowed by `policy`, first
/// permutation in lexicographic order kept. Members share the item's id.
pub fn orientations(item: &Item, policy: &RotationPolicy) -> Itemset {
    let mut members: Vec<Item> = Vec::new();
    for perm in policy.permutations(item.dim()) {
        let candidate = item.permuted(&perm);
        if !members.iter().any(|m| m.lengths == candidate.lengths) {
            members.push(candidate);
        }
    }
    Itemset::new(item.id, members)
}

/// The member picked from an itemset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub itemset: usize,
    pub member: usize,
    pub item: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub item: usize,
    pub orientation: Vec<usize>,
    /// Lengths as placed (already oriented).
    pub lengths: Vec<Rational>,
    pub position: Vec<Rational>,
    pub bin: usize,
}

impl Placement {
    pub fn of(item: &Item, position: Vec<Rational>, bin: usize) -> Self {
        Placement {
            item: item.id,
            orientation: item.orientation.clone(),
            lengths: item.lengths.clone(),
            position,
            bin,
        }
    }

    pub fn end(&self, axis: usize) -> Rational {
        &self.position[axis] + &self.lengths[axis]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PackingKind {
    Bin,
    /// Bounded base, unbounded last axis.
    Strip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packing {
    pub kind: PackingKind,
    /// Bin lengths; for a strip, the last entry is ignored.
    pub container: Vec<Rational>,
    pub bins: usize,
    pub placements: Vec<Placement>,
    /// Shelf structure per bin, when the producer was shelf based.
    pub shelves: Option<Vec<ShelfTree>>,
}

impl Packing {
    pub fn unit_bins(d: usize) -> Self {
        Packing {
            kind: PackingKind::Bin,
            container: vec![Rational::one(); d],
            bins: 0,
            placements: Vec::new(),
            shelves: None,
        }
    }

    pub fn unit_strip(d: usize) -> Self {
        Packing {
            kind: PackingKind::Strip,
            ..Packing::unit_bins(d)
        }
    }

    pub fn dim(&self) -> usize {
        self.container.len()
    }

    /// Highest point reached along the last axis.
    pub fn height(&self) -> Rational {
        let d = self.dim();
        self.placements
            .iter()
            .map(|p| p.end(d - 1))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Appends `other`'s bins after this packing's bins.
    pub fn append_bins(&mut self, other: Packing) {
        let offset = self.bins;
        for mut p in other.placements {
            p.bin += offset;
            self.placements.push(p);
        }
        self.bins += other.bins;
        match (&mut self.shelves, other.shelves) {
            (Some(mine), Some(theirs)) => mine.extend(theirs),
            (mine @ None, Some(theirs)) if offset == 0 => *mine = Some(theirs),
            (mine, _) => *mine = None,
        }
    }

    /// Lengths and positions multiplied componentwise by `factors`.
    pub fn scaled_up(&self, factors: &[Rational]) -> Packing {
        let mut out = self.clone();
        for (c, f) in out.container.iter_mut().zip(factors) {
            *c = &*c * f;
        }
        for p in &mut out.placements {
            for (j, f) in factors.iter().enumerate() {
                p.lengths[j] = &p.lengths[j] * f;
                p.position[j] = &p.position[j] * f;
            }
        }
        out
    }

    /// Keeps only bins holding at least one placement and renumbers them in order.
    pub fn drop_empty_bins(&mut self) {
        let mut used = vec![false; self.bins];
        for p in &self.placements {
            used[p.bin] = true;
        }
        let mut remap = vec![usize::MAX; self.bins];
        let mut next = 0;
        for (b, &u) in used.iter().enumerate() {
            if u {
                remap[b] = next;
                next += 1;
            }
        }
        for p in &mut self.placements {
            p.bin = remap[p.bin];
        }
        if let Some(trees) = &mut self.shelves {
            if trees.len() == self.bins {
                let kept: Vec<ShelfTree> = trees
                    .drain(..)
                    .zip(&used)
                    .filter(|(_, &u)| u)
                    .map(|(t, _)| t)
                    .collect();
                *trees = kept;
            } else {
                self.shelves = None;
            }
        }
        self.bins = next;
    }
}
