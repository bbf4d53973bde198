//! Kuhn-Munkres assignment minimizing a product of positive rationals.
//!
//! Positive rationals under multiplication form an ordered group, so the usual
//! potential-based algorithm runs unchanged with `*` and `/` in place of `+` and `-`.
//! That keeps weights such as `f_k(x)` exact where a logarithm could not.

use num::{One, Signed};

use crate::error::{Error, Result};
use crate::numeric::Rational;

/// `cost[row][col]`, `None` for a forbidden cell. Entries must be positive.
///
/// Returns `assign[row] = col` for a square matrix, with the minimal product.
pub fn min_product_assignment(cost: &[Vec<Option<Rational>>]) -> Result<(Vec<usize>, Rational)> {
    let n = cost.len();
    if n == 0 {
        return Ok((Vec::new(), Rational::one()));
    }
    for row in cost {
        if row.len() != n {
            return Err(Error::Contract("assignment matrix must be square".into()));
        }
        if row.iter().flatten().any(|c| !c.is_positive()) {
            return Err(Error::Contract("assignment weights must be positive".into()));
        }
    }
    // 1-based indices; column 0 and row 0 are sentinels.
    let one = Rational::one();
    let mut u = vec![one.clone(); n + 1];
    let mut v = vec![one.clone(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<Rational>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<Rational> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                if let Some(c) = &cost[i0 - 1][j - 1] {
                    let cur = c / (&u[i0] * &v[j]);
                    if minv[j].as_ref().is_none_or(|m| cur < *m) {
                        minv[j] = Some(cur);
                        way[j] = j0;
                    }
                }
                if let Some(m) = &minv[j] {
                    if delta.as_ref().is_none_or(|d| m < d) {
                        delta = Some(m.clone());
                        j1 = j;
                    }
                }
            }
            let delta = delta.ok_or_else(|| {
                Error::Infeasible("no assignment avoids every forbidden cell".into())
            })?;
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = &u[p[j]] * &delta;
                    v[j] = &v[j] / &delta;
                } else if let Some(m) = &mut minv[j] {
                    *m = &*m / &delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    let mut total = one;
    for (row, &col) in assign.iter().enumerate() {
        match &cost[row][col] {
            Some(c) => total *= c,
            None => return Err(Error::Infeasible("no assignment avoids every forbidden cell".into())),
        }
    }
    Ok((assign, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::all_permutations;
    use crate::numeric::rat;
    use proptest::prelude::*;

    fn brute(cost: &[Vec<Option<Rational>>]) -> Option<Rational> {
        all_permutations(cost.len())
            .into_iter()
            .filter_map(|perm| {
                perm.iter()
                    .enumerate()
                    .map(|(r, &c)| cost[r][c].clone())
                    .try_fold(Rational::one(), |acc, x| x.map(|x| acc * x))
            })
            .min()
    }

    #[test]
    fn small_example() {
        let c = |n, d| Some(rat(n, d));
        let cost = vec![vec![c(1, 2), c(1, 1)], vec![c(1, 3), c(1, 1)]];
        let (assign, total) = min_product_assignment(&cost).unwrap();
        assert_eq!(total, rat(1, 3));
        assert_eq!(assign, vec![1, 0]);
    }

    #[test]
    fn forbidden_cells() {
        let cost = vec![vec![Some(rat(1, 2)), None], vec![None, None]];
        assert!(matches!(min_product_assignment(&cost), Err(Error::Infeasible(_))));
        let cost = vec![vec![None, Some(rat(1, 1))], vec![Some(rat(5, 1)), Some(rat(1, 9))]];
        let (assign, total) = min_product_assignment(&cost).unwrap();
        assert_eq!(assign, vec![1, 0]);
        assert_eq!(total, rat(5, 1));
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            n in 1usize..=5,
            cells in proptest::collection::vec((1i64..=12, 1i64..=12, 0u8..10), 25)
        ) {
            let cost: Vec<Vec<Option<Rational>>> = (0..n)
                .map(|r| (0..n).map(|c| {
                    let (a, b, f) = cells[r * 5 + c];
                    if f == 0 { None } else { Some(rat(a, b)) }
                }).collect())
                .collect();
            match (min_product_assignment(&cost), brute(&cost)) {
                (Ok((_, total)), Some(best)) => prop_assert_eq!(total, best),
                (Err(Error::Infeasible(_)), None) => {}
                (got, want) => prop_assert!(false, "got {:?}, want {:?}", got, want),
            }
        }
    }
}
