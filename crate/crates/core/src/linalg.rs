//! Exact rational linear algebra on small dense matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub fn to_rational(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Rank of a list of row vectors by Gaussian elimination over Q.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let p = m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = &m[r][col] / &p;
                for c in col..ncols {
                    let delta = &factor * &m[rank][c];
                    m[r][c] -= delta;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

pub fn rank_u64(rows: &[Vec<u64>]) -> usize {
    let q: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| to_rational(x)).collect())
        .collect();
    rank(&q)
}

/// Sign of the 2x2 determinant `u.0*v.1 - u.1*v.0` for rational points.
pub fn cross_sign(
    u: (&BigRational, &BigRational),
    v: (&BigRational, &BigRational),
) -> std::cmp::Ordering {
    let c = u.0 * v.1 - u.1 * v.0;
    if c.is_positive() {
        std::cmp::Ordering::Greater
    } else if c.is_negative() {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Equal
    }
}
