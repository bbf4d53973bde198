//! The harmonic function family.
//!
//! For an integer `k >= 3`, lengths in `(1/(q+1), 1/q]` with `q < k` have type `q`
//! and are rounded up to `1/q`; lengths at most `1/k` have type `k` and are scaled by
//! `k/(k-2)`. `T_k` is the least constant making `f_k / T_k` a weighting function.

use std::fmt;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{int, rat, Rational};

/// Largest `k` accepted by [`HarmonicContext::new`]; the `T_k` enumeration grows quickly past it.
pub const MAX_K: u32 = 40;

/// Per-dimension harmonic classes of an item.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypeVector(pub Vec<u32>);

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMode {
    /// `f_k` on every dimension.
    Full,
    /// `f_k` on the base dimensions, height unchanged.
    BaseF,
    /// `H_k = f_k / T_k` on the base dimensions, height unchanged.
    BaseH,
    /// Rectangle of width `prod_{j<d} f_k(l_j)` and height `l_d`.
    Round2d,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transformed {
    Cuboid(Vec<Rational>),
    Rect {
        width: Rational,
        height: Rational,
        area: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicContext {
    k: u32,
    t_k: Rational,
    small_slope: Rational,
}

impl HarmonicContext {
    pub fn new(k: u32) -> Result<Self> {
        let t_k = compute_t(k)?;
        Ok(HarmonicContext {
            k,
            t_k,
            small_slope: rat(k as i64, k as i64 - 2),
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn t_k(&self) -> &Rational {
        &self.t_k
    }

    /// `k / (k - 2)`.
    pub fn small_slope(&self) -> &Rational {
        &self.small_slope
    }

    pub fn type_of(&self, x: &Rational) -> Result<u32> {
        check_length(x)?;
        Ok(self.type_unchecked(x))
    }

    pub fn f_of(&self, x: &Rational) -> Result<Rational> {
        check_length(x)?;
        Ok(self.f_unchecked(x))
    }

    /// The harmonic weighting function `H_k = f_k / T_k`.
    pub fn h_of(&self, x: &Rational) -> Result<Rational> {
        Ok(self.f_of(x)? / &self.t_k)
    }

    // x in (1/(q+1), 1/q]  <=>  floor(1/x) = q
    pub(crate) fn type_unchecked(&self, x: &Rational) -> u32 {
        debug_assert!(x.is_positive() && *x <= Rational::one());
        let q = (x.denom() / x.numer()).to_u64().unwrap_or(u64::MAX);
        if q >= self.k as u64 {
            self.k
        } else {
            q as u32
        }
    }

    pub(crate) fn f_unchecked(&self, x: &Rational) -> Rational {
        let q = self.type_unchecked(x);
        if q < self.k {
            Rational::new(BigInt::one(), BigInt::from(q))
        } else {
            &self.small_slope * x
        }
    }

    /// Per-dimension types; `base_only` drops the last dimension.
    pub fn type_vector(&self, lengths: &[Rational], base_only: bool) -> Result<TypeVector> {
        let dims = if base_only {
            &lengths[..lengths.len().saturating_sub(1)]
        } else {
            lengths
        };
        dims.iter()
            .map(|x| self.type_of(x))
            .collect::<Result<Vec<_>>>()
            .map(TypeVector)
    }

    pub fn transform(&self, lengths: &[Rational], mode: TransformMode) -> Result<Transformed> {
        for x in lengths {
            check_length(x)?;
        }
        let d = lengths.len();
        let out = match mode {
            TransformMode::Full => {
                Transformed::Cuboid(lengths.iter().map(|x| self.f_unchecked(x)).collect())
            }
            TransformMode::BaseF | TransformMode::BaseH => {
                let mut out: Vec<Rational> = lengths.to_vec();
                for x in out.iter_mut().take(d.saturating_sub(1)) {
                    let f = self.f_unchecked(x);
                    *x = if mode == TransformMode::BaseH {
                        f / &self.t_k
                    } else {
                        f
                    };
                }
                Transformed::Cuboid(out)
            }
            TransformMode::Round2d => {
                let width = self.base_width(lengths);
                let height = lengths.last().cloned().unwrap_or_else(Rational::zero);
                let area = &width * &height;
                Transformed::Rect {
                    width,
                    height,
                    area,
                }
            }
        };
        Ok(out)
    }

    /// `vol(f_k(i))`.
    pub fn vol_f(&self, lengths: &[Rational]) -> Rational {
        lengths
            .iter()
            .fold(Rational::one(), |acc, x| acc * self.f_unchecked(x))
    }

    /// `w(i) = prod_{j<d} f_k(l_j)`, i.e. `vol(f_k)` of the base.
    pub fn base_width(&self, lengths: &[Rational]) -> Rational {
        let d = lengths.len();
        self.vol_f(&lengths[..d.saturating_sub(1)])
    }

    /// `vol(wf_k(i)) = w(i) * l_d(i)`.
    pub fn vol_wf(&self, lengths: &[Rational]) -> Rational {
        match lengths.last() {
            Some(h) => self.base_width(lengths) * h,
            None => Rational::one(),
        }
    }
}

fn check_length(x: &Rational) -> Result<()> {
    if x.is_positive() && *x <= Rational::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "length {} outside (0,1]",
            crate::numeric::format_rational(x)
        )))
    }
}

/// `T_k` by enumeration of worst-case item configurations.
///
/// A configuration takes `n_q` items just above `1/(q+1)` for each `q < k` and fills
/// the remaining capacity with type-`k` items. Its weight tends to
/// `sum n_q/q + k/(k-2) * (1 - sum n_q/(q+1))` while `sum n_q/(q+1) < 1`; `T_k` is the
/// maximum of that expression. A fractional bound on the unused capacity prunes the search.
pub fn compute_t(k: u32) -> Result<Rational> {
    if k < 3 {
        return Err(Error::Domain(format!("k must be at least 3, got {k}")));
    }
    if k > MAX_K {
        return Err(Error::Domain(format!("k must be at most {MAX_K}, got {k}")));
    }
    let slope = rat(k as i64, k as i64 - 2);
    // gain of one type-q item over filling its share of capacity with small items
    let gains: Vec<Rational> = (1..k)
        .map(|q| rat(1, q as i64) - &slope * rat(1, q as i64 + 1))
        .collect();
    let sizes: Vec<Rational> = (1..k).map(|q| rat(1, q as i64 + 1)).collect();
    // best gain per unit of capacity over classes q..k-1
    let mut density_tail = vec![Rational::zero(); k as usize];
    for idx in (0..(k as usize - 1)).rev() {
        let density = (&gains[idx] / &sizes[idx]).max(Rational::zero());
        density_tail[idx] = density.max(density_tail[idx + 1].clone());
    }

    struct Search<'a> {
        gains: &'a [Rational],
        sizes: &'a [Rational],
        density_tail: &'a [Rational],
        best: Rational,
    }

    impl Search<'_> {
        fn visit(&mut self, idx: usize, room: &Rational, gain: Rational) {
            if gain > self.best {
                self.best = gain.clone();
            }
            if idx == self.gains.len() {
                return;
            }
            if &gain + room * &self.density_tail[idx] <= self.best {
                return;
            }
            // taking items of this class first, then skipping it
            let mut room_left = room.clone();
            let mut acc = gain.clone();
            let mut branches = Vec::new();
            while room_left > self.sizes[idx] {
                room_left -= &self.sizes[idx];
                acc += &self.gains[idx];
                branches.push((room_left.clone(), acc.clone()));
            }
            for (r, g) in branches.into_iter().rev() {
                self.visit(idx + 1, &r, g);
            }
            self.visit(idx + 1, room, gain);
        }
    }

    let mut search = Search {
        gains: &gains,
        sizes: &sizes,
        density_tail: &density_tail,
        best: Rational::zero(),
    };
    search.visit(0, &int(1), Rational::zero());
    Ok(slope + search.best)
}
