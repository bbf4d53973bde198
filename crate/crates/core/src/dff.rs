//! Rewriting a packing so that one axis of every item is mapped through a weighting function.
//!
//! Along axis `q`, item `a` precedes item `b` when `a` starts strictly lower and their
//! projections onto the other axes overlap. Each item is lifted to sit on top of its
//! heaviest chain of predecessors, where a chain weighs the sum of `g` over its lengths.
//! If `g` is a weighting function the result is again a valid packing.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::harmonic::HarmonicContext;
use crate::model::{Packing, PackingKind, Placement};
use crate::numeric::{format_rational, Rational};
use crate::validate::{overlaps, validate_packing};

/// `g(x) = slope * x + intercept` on `(previous upper, upper]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearPiece {
    pub upper: Rational,
    pub slope: Rational,
    pub intercept: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightingFn {
    Identity,
    /// `H_k = f_k / T_k`.
    Harmonic(HarmonicContext),
    /// `f_k` itself, which is not a weighting function.
    HarmonicUnscaled(HarmonicContext),
    /// Pieces in increasing order of `upper`; the last must reach 1.
    Piecewise(Vec<LinearPiece>),
}

impl WeightingFn {
    pub fn piecewise(pieces: Vec<LinearPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Input("piecewise function needs at least one piece".into()));
        }
        let mut prev = Rational::zero();
        for p in &pieces {
            if p.upper <= prev {
                return Err(Error::Input("piece bounds must increase".into()));
            }
            prev = p.upper.clone();
        }
        if prev < Rational::one() {
            return Err(Error::Input("pieces must cover (0,1]".into()));
        }
        Ok(WeightingFn::Piecewise(pieces))
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if *x <= Rational::zero() || *x > Rational::one() {
            return Err(Error::Domain(format!("{} outside (0,1]", format_rational(x))));
        }
        match self {
            WeightingFn::Identity => Ok(x.clone()),
            WeightingFn::Harmonic(ctx) => ctx.h_of(x),
            WeightingFn::HarmonicUnscaled(ctx) => ctx.f_of(x),
            WeightingFn::Piecewise(pieces) => {
                let p = pieces
                    .iter()
                    .find(|p| *x <= p.upper)
                    .expect("pieces cover (0,1]");
                Ok(&p.slope * x + &p.intercept)
            }
        }
    }

    /// True for the variants known to be weighting functions.
    pub fn is_known_weighting(&self) -> bool {
        matches!(self, WeightingFn::Identity | WeightingFn::Harmonic(_))
    }

    pub fn name(&self) -> String {
        match self {
            WeightingFn::Identity => "identity".into(),
            WeightingFn::Harmonic(c) => format!("H_{}", c.k()),
            WeightingFn::HarmonicUnscaled(c) => format!("f_{}", c.k()),
            WeightingFn::Piecewise(p) => format!("piecewise({} pieces)", p.len()),
        }
    }
}

/// Chain bookkeeping for one item along the transformed axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainState {
    pub item: usize,
    pub level: usize,
    /// Weight of the heaviest chain headed at the item, in bin-normalized units.
    pub u: Rational,
    /// The predecessor that chain continues with.
    pub pi: Option<usize>,
}

/// Maps axis `q` of every placement through `g` and restacks along that axis.
///
/// The input must be a valid bin packing. When `g` is a known weighting function the
/// chain weights are asserted to stay within the bin; other functions are applied as is
/// and the output may fail validation.
pub fn weighting_transform_dim(p: &Packing, g: &WeightingFn, q: usize) -> Result<(Packing, Vec<ChainState>)> {
    if p.kind != PackingKind::Bin {
        return Err(Error::Input("the transform applies to bin packings".into()));
    }
    let d = p.dim();
    if q >= d {
        return Err(Error::Input(format!("axis {q} out of range for {d} dimensions")));
    }
    let report = validate_packing(p);
    if !report.is_valid() {
        return Err(Error::Contract(format!("input packing is invalid: {report}")));
    }
    let len_q = p.container[q].clone();
    let others: Vec<usize> = (0..d).filter(|&j| j != q).collect();
    let mut by_bin: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, pl) in p.placements.iter().enumerate() {
        by_bin.entry(pl.bin).or_default().push(idx);
    }
    let mut out = p.clone();
    let mut states = Vec::with_capacity(p.placements.len());
    for (_, mut members) in by_bin {
        members.sort_by(|&a, &b| {
            p.placements[a].position[q]
                .cmp(&p.placements[b].position[q])
                .then(p.placements[a].item.cmp(&p.placements[b].item))
        });
        // normalized g-length and chain data per member, in processing order
        let mut done: Vec<(usize, Rational, ChainState)> = Vec::with_capacity(members.len());
        for &idx in &members {
            let pl: &Placement = &p.placements[idx];
            let glen = g.eval(&(&pl.lengths[q] / &len_q))?;
            let mut level = 0;
            let mut best: Option<(&Rational, usize)> = None;
            for (j, _, st) in &done {
                let other = &p.placements[*j];
                if other.position[q] < pl.position[q] && overlaps(pl, other, others.iter().copied()) {
                    level = level.max(st.level + 1);
                    let better = match best {
                        None => true,
                        Some((u, id)) => st.u > *u || (st.u == *u && st.item < id),
                    };
                    if better {
                        best = Some((&st.u, st.item));
                    }
                }
            }
            let (u, pi) = match best {
                None => (glen.clone(), None),
                Some((u, id)) => (&glen + u, Some(id)),
            };
            if g.is_known_weighting() && u > Rational::one() {
                return Err(Error::Contract(format!(
                    "chain weight {} above 1 at item {}",
                    format_rational(&u),
                    pl.item
                )));
            }
            let state = ChainState {
                item: pl.item,
                level,
                u,
                pi,
            };
            done.push((idx, glen, state));
        }
        for (idx, glen, state) in done {
            let target = &mut out.placements[idx];
            target.position[q] = (&state.u - &glen) * &len_q;
            target.lengths[q] = glen * &len_q;
            states.push(state);
        }
    }
    out.shelves = None;
    Ok((out, states))
}

/// Applies [`weighting_transform_dim`] for axes `0..d` in order, axis `j` with `gs[j]`.
pub fn weighting_transform_all(p: &Packing, gs: &[WeightingFn]) -> Result<Packing> {
    if gs.len() != p.dim() {
        return Err(Error::Input(format!(
            "{} functions for {} dimensions",
            gs.len(),
            p.dim()
        )));
    }
    let mut current = p.clone();
    for (q, g) in gs.iter().enumerate() {
        current = weighting_transform_dim(&current, g, q)?.0;
    }
    Ok(current)
}
