//! Small exact linear-algebra helpers over `i128` and `Ratio<i128>`.
//!
//! Every operation is checked; overflow surfaces as [`Error::Overflow`].

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};

use crate::error::{overflow, Result};

pub(crate) type Q = Ratio<i128>;

pub(crate) fn qadd(a: &Q, b: &Q) -> Result<Q> {
    a.checked_add(b).ok_or_else(|| overflow("rational sum"))
}

pub(crate) fn qsub(a: &Q, b: &Q) -> Result<Q> {
    a.checked_sub(b).ok_or_else(|| overflow("rational difference"))
}

pub(crate) fn qmul(a: &Q, b: &Q) -> Result<Q> {
    a.checked_mul(b).ok_or_else(|| overflow("rational product"))
}

pub(crate) fn qdiv(a: &Q, b: &Q) -> Result<Q> {
    a.checked_div(b).ok_or_else(|| overflow("rational quotient"))
}

pub(crate) fn imul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or_else(|| overflow("integer product"))
}

pub(crate) fn iadd(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or_else(|| overflow("integer sum"))
}

pub(crate) fn isub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or_else(|| overflow("integer difference"))
}

pub(crate) fn lcm(a: i128, b: i128) -> Result<i128> {
    let g = a.gcd(&b);
    if g == 0 {
        return Ok(0);
    }
    imul(a / g, b).map(i128::abs)
}

/// Largest `r >= 0` with `r*r <= n`; `n` must be non-negative.
pub fn isqrt(n: i128) -> i128 {
    debug_assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r > 0 && r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// [`isqrt`] for `0 <= n < 2^62`, without wide arithmetic.
#[inline]
pub fn isqrt_i64(n: i64) -> i64 {
    debug_assert!((0..1 << 62).contains(&n));
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Smallest `r >= 0` with `r*r >= n`.
pub fn isqrt_ceil(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let r = isqrt(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Ceiling of the square root of a non-negative rational.
pub(crate) fn qsqrt_ceil(x: &Q) -> Result<i128> {
    if !x.is_positive() {
        return Ok(0);
    }
    // ceil(sqrt(p/q)) = ceil(sqrt(p*q) / q) <= ceil(isqrt_ceil(p*q) / q)
    let pq = imul(*x.numer(), *x.denom())?;
    let s = isqrt_ceil(pq);
    Ok(Integer::div_ceil(&s, x.denom()))
}

/// Determinant by fraction-free Gaussian elimination.
pub(crate) fn det_bareiss(m: &[Vec<i128>]) -> Result<i128> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = isub(imul(a[i][j], a[k][k])?, imul(a[i][k], a[k][j])?)?;
                a[i][j] = t / prev;
            }
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// Counts of positive, negative and zero eigen-directions of a symmetric
/// integer matrix, by rational congruence diagonalization.
pub(crate) fn inertia(m: &[Vec<i128>]) -> Result<(usize, usize, usize)> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .map(|r| r.iter().map(|&v| Q::from_integer(v)).collect())
        .collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg) = (0, 0);
    while !remaining.is_empty() {
        let pivot = remaining.iter().copied().find(|&i| !a[i][i].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                let pair = remaining.iter().enumerate().find_map(|(s, &i)| {
                    remaining[s + 1..]
                        .iter()
                        .copied()
                        .find(|&j| !a[i][j].is_zero())
                        .map(|j| (i, j))
                });
                let Some((i, j)) = pair else { break };
                // row_i += row_j, col_i += col_j
                for c in 0..n {
                    let v = qadd(&a[i][c], &a[j][c])?;
                    a[i][c] = v;
                }
                for r in 0..n {
                    let v = qadd(&a[r][i], &a[r][j])?;
                    a[r][i] = v;
                }
                i
            }
        };
        let d = a[p][p];
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        remaining.retain(|&i| i != p);
        for &i in &remaining {
            let f = qdiv(&a[i][p], &d)?;
            if f.is_zero() {
                continue;
            }
            for &j in &remaining {
                let v = qsub(&a[i][j], &qmul(&f, &a[p][j])?)?;
                a[i][j] = v;
            }
        }
        for &i in &remaining {
            a[i][p] = Q::zero();
            a[p][i] = Q::zero();
        }
    }
    Ok((pos, neg, remaining.len()))
}

/// Inverse of a square rational matrix, or `None` if singular.
pub(crate) fn inverse(m: &[Vec<Q>]) -> Result<Option<Vec<Vec<Q>>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut inv: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(None);
        };
        a.swap(col, p);
        inv.swap(col, p);
        let piv = a[col][col];
        for j in 0..n {
            a[col][j] = qdiv(&a[col][j], &piv)?;
            inv[col][j] = qdiv(&inv[col][j], &piv)?;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col];
            for j in 0..n {
                a[r][j] = qsub(&a[r][j], &qmul(&f, &a[col][j])?)?;
                inv[r][j] = qsub(&inv[r][j], &qmul(&f, &inv[col][j])?)?;
            }
        }
    }
    Ok(Some(inv))
}

/// Square-completion of a positive definite form:
/// `x^T A x = sum_i d_i (x_i + sum_{j>i} q_ij x_j)^2`.
///
/// Returns `(d, q)` with `q` strictly upper triangular (diagonal unused).
pub(crate) fn square_completion(a: &[Vec<Q>]) -> Result<(Vec<Q>, Vec<Vec<Q>>)> {
    let n = a.len();
    let mut q: Vec<Vec<Q>> = a.to_vec();
    for i in 0..n {
        if !q[i][i].is_positive() {
            return Err(crate::Error::InvalidInput(
                "form is not positive definite".into(),
            ));
        }
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] = qdiv(&q[i][j], &q[i][i])?;
        }
        for k in i + 1..n {
            for l in k..n {
                let v = qsub(&q[k][l], &qmul(&q[k][i], &q[i][l])?)?;
                q[k][l] = v;
            }
        }
    }
    let d = (0..n).map(|i| q[i][i]).collect();
    for (i, row) in q.iter_mut().enumerate() {
        for v in row.iter_mut().take(i + 1) {
            *v = Q::zero();
        }
    }
    Ok((d, q))
}

#[cfg(test)]
mod tests {
    #[test]
    fn narrow_isqrt_agrees() {
        for n in (0..5000).chain([(1 << 62) - 1, (1i64 << 61) + 12345, 999_999_999_999]) {
            assert_eq!(super::isqrt_i64(n) as i128, super::isqrt(n as i128), "{n}");
        }
    }

    use super::*;

    fn qm(rows: &[&[i128]]) -> Vec<Vec<Q>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Q::from_integer(v)).collect())
            .collect()
    }

    #[test]
    fn isqrt_edges() {
        for n in 0..2000i128 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
            let c = isqrt_ceil(n);
            assert!(c * c >= n && (c == 0 || (c - 1) * (c - 1) < n));
        }
        let big = (1i128 << 100) + 12345;
        let r = isqrt(big);
        assert!(r * r <= big && (r + 1) * (r + 1) > big);
    }

    #[test]
    fn rational_sqrt_ceiling() {
        assert_eq!(qsqrt_ceil(&Q::new(9, 4)).unwrap(), 2);
        assert_eq!(qsqrt_ceil(&Q::new(1, 4)).unwrap(), 1);
        assert_eq!(qsqrt_ceil(&Q::new(17, 1)).unwrap(), 5);
        assert_eq!(qsqrt_ceil(&Q::new(0, 1)).unwrap(), 0);
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let m = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        assert_eq!(det_bareiss(&m).unwrap(), 4);
        let u = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(det_bareiss(&u).unwrap(), -1);
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        assert_eq!(inertia(&[vec![0, 1], vec![1, 0]]).unwrap(), (1, 1, 0));
        assert_eq!(inertia(&[vec![0, 0], vec![0, 0]]).unwrap(), (0, 0, 2));
        assert_eq!(inertia(&[vec![-2, 1], vec![1, -2]]).unwrap(), (0, 2, 0));
    }

    #[test]
    fn inverse_round_trip() {
        let a = qm(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap().unwrap();
        assert_eq!(inv, qm(&[&[1, -1], &[-1, 2]]));
        assert!(inverse(&qm(&[&[1, 2], &[2, 4]])).unwrap().is_none());
    }

    #[test]
    fn square_completion_reproduces_form() {
        let a = qm(&[&[4, 2, 1], &[2, 3, 0], &[1, 0, 5]]);
        let (d, q) = square_completion(&a).unwrap();
        let x = [1i128, -2, 3];
        let mut direct = Q::zero();
        for i in 0..3 {
            for j in 0..3 {
                direct += a[i][j] * Q::from_integer(x[i] * x[j]);
            }
        }
        let mut completed = Q::zero();
        for i in 0..3 {
            let mut t = Q::from_integer(x[i]);
            for j in i + 1..3 {
                t += q[i][j] * Q::from_integer(x[j]);
            }
            completed += d[i] * t * t;
        }
        assert_eq!(direct, completed);
    }
}
