//! Choosing item orientations for non-cubic bins.
//!
//! Rotating an item by `pi` puts source axis `pi[j]` along bin axis `j`. Scaled by the
//! bin, the harmonic volume of the result is a product of per-axis factors, which makes
//! the best orientation an assignment problem.

use num::One;

use crate::assignment::min_product_assignment;
use crate::error::{Error, Result};
use crate::harmonic::HarmonicContext;
use crate::model::Item;
use crate::numeric::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Minimize `prod_j f_k(l_{pi_j} / L_j)` over all axes.
    FullVolume,
    /// Put source axis `height_axis` last and minimize `prod_{j<d} f_k(l_{pi_j} / L_j)`.
    BaseWidth { height_axis: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Oriented {
    /// The rotated item, in the same units as the input.
    pub item: Item,
    pub perm: Vec<usize>,
    /// Objective value computed on bin-scaled lengths.
    pub value: Rational,
}

/// Objective value of one orientation, `None` when it does not fit.
pub fn objective_value(
    item: &Item,
    perm: &[usize],
    bin: &[Rational],
    ctx: &HarmonicContext,
    objective: Objective,
) -> Option<Rational> {
    let d = item.dim();
    let mut value = Rational::one();
    for (j, &a) in perm.iter().enumerate() {
        let scaled = &item.lengths[a] / &bin[j];
        if scaled > Rational::one() {
            return None;
        }
        let counted = match objective {
            Objective::FullVolume => true,
            Objective::BaseWidth { height_axis } => {
                if j == d - 1 && a != height_axis {
                    return None;
                }
                j < d - 1
            }
        };
        if counted {
            value *= ctx.f_unchecked(&scaled);
        }
    }
    Some(value)
}

/// Best orientation under `objective`; ties go to the lexicographically smallest permutation.
pub fn best_orientation(
    item: &Item,
    bin: &[Rational],
    ctx: &HarmonicContext,
    objective: Objective,
) -> Result<Oriented> {
    let d = item.dim();
    if bin.len() != d {
        return Err(Error::Input(format!(
            "item {} has {} axes but the bin has {}",
            item.id,
            d,
            bin.len()
        )));
    }
    if let Objective::BaseWidth { height_axis } = objective {
        if height_axis >= d {
            return Err(Error::Input(format!("height axis {height_axis} out of range")));
        }
    }
    let one = Rational::one();
    // cost[j][a]: source axis a along bin axis j
    let cost: Vec<Vec<Option<Rational>>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|a| {
                    let scaled = &item.lengths[a] / &bin[j];
                    if scaled > one {
                        return None;
                    }
                    match objective {
                        Objective::FullVolume => Some(ctx.f_unchecked(&scaled)),
                        Objective::BaseWidth { height_axis } => {
                            if j == d - 1 {
                                (a == height_axis).then(|| one.clone())
                            } else if a == height_axis {
                                None
                            } else {
                                Some(ctx.f_unchecked(&scaled))
                            }
                        }
                    }
                })
                .collect()
        })
        .collect();
    let infeasible = || Error::Infeasible(format!("item {} fits the bin in no orientation", item.id));
    let (_, best) = min_product_assignment(&cost).map_err(|_| infeasible())?;

    let mut perm: Vec<usize> = Vec::with_capacity(d);
    let mut used = vec![false; d];
    let mut prefix = Rational::one();
    for j in 0..d {
        let mut fixed = false;
        for a in 0..d {
            if used[a] {
                continue;
            }
            let Some(c) = &cost[j][a] else { continue };
            used[a] = true;
            let rest_cols: Vec<usize> = (0..d).filter(|&b| !used[b]).collect();
            let sub: Vec<Vec<Option<Rational>>> = ((j + 1)..d)
                .map(|r| rest_cols.iter().map(|&b| cost[r][b].clone()).collect())
                .collect();
            if let Ok((_, rest)) = min_product_assignment(&sub) {
                if &prefix * c * &rest == best {
                    prefix *= c;
                    perm.push(a);
                    fixed = true;
                    break;
                }
            }
            used[a] = false;
        }
        if !fixed {
            return Err(Error::Contract("orientation tie-break lost the optimum".into()));
        }
    }
    Ok(Oriented {
        item: item.permuted(&perm),
        perm,
        value: best,
    })
}

/// At most one orientation per distinct height: each distinct length that fits along
/// the last bin axis becomes the height, with the base arranged by [`Objective::BaseWidth`].
pub fn height_orientations(item: &Item, bin: &[Rational], ctx: &HarmonicContext) -> Vec<Oriented> {
    let mut out: Vec<Oriented> = Vec::new();
    for a in 0..item.dim() {
        if out.iter().any(|o| *o.item.height() == item.lengths[a]) {
            continue;
        }
        if let Ok(o) = best_orientation(item, bin, ctx, Objective::BaseWidth { height_axis: a }) {
            out.push(o);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::all_permutations;
    use crate::numeric::{int, rat};

    #[test]
    fn flat_bin_forces_orientation() {
        let ctx = HarmonicContext::new(4).unwrap();
        let item = Item::new(0, vec![rat(3, 5), rat(1, 5)]);
        let o = best_orientation(&item, &[int(1), rat(1, 2)], &ctx, Objective::FullVolume).unwrap();
        assert_eq!(o.perm, vec![0, 1]);
        assert_eq!(o.item.lengths, vec![rat(3, 5), rat(1, 5)]);
        // f(3/5) * f(2/5) = 1 * 1/2
        assert_eq!(o.value, rat(1, 2));
    }

    #[test]
    fn nothing_fits() {
        let ctx = HarmonicContext::new(4).unwrap();
        let item = Item::new(0, vec![rat(3, 5), rat(3, 5)]);
        let r = best_orientation(&item, &[int(1), rat(1, 2)], &ctx, Objective::FullVolume);
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn square_bin_tie_gives_identity() {
        let ctx = HarmonicContext::new(5).unwrap();
        let item = Item::new(0, vec![rat(1, 3), rat(3, 4), rat(1, 7)]);
        let o = best_orientation(&item, &vec![int(1); 3], &ctx, Objective::FullVolume).unwrap();
        assert_eq!(o.perm, vec![0, 1, 2]);
        for perm in all_permutations(3) {
            assert_eq!(
                objective_value(&item, &perm, &vec![int(1); 3], &ctx, Objective::FullVolume),
                Some(o.value.clone())
            );
        }
    }

    #[test]
    fn one_orientation_per_distinct_height() {
        let ctx = HarmonicContext::new(4).unwrap();
        let item = Item::new(0, vec![rat(1, 2), rat(1, 3), rat(1, 2)]);
        let hs = height_orientations(&item, &vec![int(1); 3], &ctx);
        let heights: Vec<_> = hs.iter().map(|o| o.item.height().clone()).collect();
        assert_eq!(heights, vec![rat(1, 2), rat(1, 3)]);
    }
}
