//! Finite-depth letter frequency cones: the cone spanned by the columns of
//! `M(σ_[n,m))` contains the frequency cone at level `n`, and the
//! dimensions of these outer approximations locate the critical level.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::directive::DirectiveSequence;
use crate::error::{Error, Result};
use crate::linalg::{rank_u64, to_rational};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeReport {
    pub level: usize,
    pub probe: usize,
    pub ambient_dim: usize,
    /// Columns of `M(σ_[level,probe))`, one per letter of `A_probe`.
    pub generators: Vec<Vec<u64>>,
    pub rank: usize,
    /// Primitive extreme rays in generator order; `None` above dimension 3.
    pub extreme_rays: Option<Vec<Vec<u64>>>,
    /// Largest angle in radians between two generators (diagnostic only).
    pub angular_width: f64,
    /// Whether every generator at `probe` is a nonnegative combination of the
    /// generators at `probe - 1` (checked exactly); `None` when `probe = level + 1`.
    pub nested_in_previous: Option<bool>,
}

pub fn cone_at_level(seq: &DirectiveSequence, n: usize, m: usize) -> Result<ConeReport> {
    if n >= m || m > seq.depth() {
        return Err(Error::LevelOutOfRange {
            level: m,
            depth: seq.depth(),
        });
    }
    let matrix = seq.telescoped_matrix(n, m)?;
    let generators = matrix.columns();
    let ambient_dim = matrix.rows();
    let rank = rank_u64(&generators);
    let extreme_rays = (ambient_dim <= 3).then(|| extreme_rays(&generators));
    let angular_width = angular_width(&generators);
    let nested_in_previous = if m > n + 1 {
        let previous = seq.telescoped_matrix(n, m - 1)?;
        let step = seq.level(m - 1)?.incidence_matrix();
        Some(previous.mul(&step)? == *matrix)
    } else {
        None
    };
    Ok(ConeReport {
        level: n,
        probe: m,
        ambient_dim,
        generators,
        rank,
        extreme_rays,
        angular_width,
        nested_in_previous,
    })
}

fn primitive(v: &[u64]) -> Vec<u64> {
    let g = v.iter().fold(0u64, |g, &x| g.gcd(&x));
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Extreme rays of a cone in the nonnegative orthant of dimension <= 3.
fn extreme_rays(generators: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut rays: Vec<Vec<u64>> = Vec::new();
    for g in generators {
        let p = primitive(g);
        if p.iter().any(|&x| x != 0) && !rays.contains(&p) {
            rays.push(p);
        }
    }
    if rays.len() <= 1 {
        return rays;
    }
    // points on the simplex x_1 + ... + x_d = 1, first d-1 coordinates
    let points: Vec<Vec<BigRational>> = rays
        .iter()
        .map(|r| {
            let s = to_rational(r.iter().sum());
            r[..r.len() - 1]
                .iter()
                .map(|&x| to_rational(x) / &s)
                .collect()
        })
        .collect();
    let keep: Vec<usize> = match points[0].len() {
        0 => vec![0],
        1 => {
            let lo = (0..points.len())
                .min_by(|&i, &j| points[i][0].cmp(&points[j][0]))
                .unwrap();
            let hi = (0..points.len())
                .max_by(|&i, &j| points[i][0].cmp(&points[j][0]))
                .unwrap();
            if lo == hi {
                vec![lo]
            } else {
                vec![lo.min(hi), lo.max(hi)]
            }
        }
        _ => hull_vertices(&points),
    };
    keep.into_iter().map(|i| rays[i].clone()).collect()
}

fn cross(o: &[BigRational], a: &[BigRational], b: &[BigRational]) -> BigRational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Indices of the strict vertices of the convex hull of distinct planar
/// points (monotone chain), returned sorted.
fn hull_vertices(points: &[Vec<BigRational>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].cmp(&points[j]));
    if order.len() <= 2 {
        return order;
    }
    let build = |iter: &mut dyn Iterator<Item = usize>| {
        let mut chain: Vec<usize> = Vec::new();
        for i in iter {
            while chain.len() >= 2
                && !cross(
                    &points[chain[chain.len() - 2]],
                    &points[chain[chain.len() - 1]],
                    &points[i],
                )
                .is_positive()
            {
                chain.pop();
            }
            chain.push(i);
        }
        chain.pop();
        chain
    };
    let mut hull = build(&mut order.iter().copied());
    hull.extend(build(&mut order.iter().rev().copied()));
    if hull.is_empty() {
        // all points collinear and the chain collapsed; keep the two ends
        hull = vec![order[0], order[order.len() - 1]];
    }
    hull.sort_unstable();
    hull.dedup();
    hull
}

fn big(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Angle between two nonnegative vectors, from the exact Lagrange identity
/// `|u|^2 |v|^2 - (u.v)^2 = |u x v|^2`.
fn angle(u: &[u64], v: &[u64]) -> f64 {
    let (u, v) = (big(u), big(v));
    let dot: BigInt = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    let nu: BigInt = u.iter().map(|a| a * a).sum();
    let nv: BigInt = v.iter().map(|a| a * a).sum();
    let cross2 = nu * nv - &dot * &dot;
    if cross2.is_zero() {
        return 0.0;
    }
    let (c, d) = scaled_pair(&cross2, &(&dot * &dot));
    c.sqrt().atan2(d.sqrt())
}

/// Converts two nonnegative big integers to floats sharing a power-of-two
/// scale so their ratio survives even when both exceed `f64` range.
fn scaled_pair(a: &BigInt, b: &BigInt) -> (f64, f64) {
    let bits = a.bits().max(b.bits());
    let shift = bits.saturating_sub(1000) & !1;
    let a = (a >> shift).to_f64().unwrap_or(f64::MAX);
    let b = (b >> shift).to_f64().unwrap_or(f64::MAX);
    (a, b)
}

fn angular_width(generators: &[Vec<u64>]) -> f64 {
    let mut width: f64 = 0.0;
    for (i, u) in generators.iter().enumerate() {
        for v in &generators[i + 1..] {
            width = width.max(angle(u, v));
        }
    }
    width
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalLevelReport {
    pub depth: usize,
    pub probe_extra: usize,
    /// `ranks[n] = rank M(σ_[n, n + probe_extra))` for `n = 0..=depth`.
    pub ranks: Vec<usize>,
    /// Least `n` such that no later scanned level has a larger rank.
    pub apparent_critical_level: usize,
    pub thin: bool,
    /// Every scanned `M(σ_n)` is square and invertible.
    pub invertible_shortcut: bool,
}

pub fn critical_level_estimate(
    seq: &DirectiveSequence,
    depth: usize,
    probe_extra: usize,
) -> Result<CriticalLevelReport> {
    if probe_extra == 0 {
        return Err(Error::InvalidParameter("probe must be at least 1".into()));
    }
    if depth + probe_extra > seq.depth() {
        return Err(Error::LevelOutOfRange {
            level: depth + probe_extra,
            depth: seq.depth(),
        });
    }
    let ranks = (0..=depth)
        .map(|n| Ok(seq.telescoped_matrix(n, n + probe_extra)?.rank()))
        .collect::<Result<Vec<_>>>()?;
    let apparent_critical_level = (0..=depth)
        .find(|&n| ranks[n..].iter().all(|&r| r <= ranks[n]))
        .unwrap_or(depth);
    let mut invertible_shortcut = true;
    for k in 0..depth + probe_extra {
        let m = seq.level(k)?.incidence_matrix();
        if !m.is_square() || m.rank() != m.rows() {
            invertible_shortcut = false;
            break;
        }
    }
    Ok(CriticalLevelReport {
        depth,
        probe_extra,
        ranks,
        apparent_critical_level,
        thin: apparent_critical_level == 0,
        invertible_shortcut,
    })
}
