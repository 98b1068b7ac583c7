//! Integral LLL reduction (δ = 3/4) of a basis under a positive definite
//! integer form, in exact checked 128-bit arithmetic.

use crate::error::{Error, Result};
use crate::linalg::{iadd, imul, isub};

fn dot(form: &[Vec<i128>], x: &[i128], y: &[i128]) -> Result<i128> {
    let mut s = 0i128;
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        let mut r = 0i128;
        for (j, &yj) in y.iter().enumerate() {
            r = iadd(r, imul(form[i][j], yj)?)?;
        }
        s = iadd(s, imul(xi, r)?)?;
    }
    Ok(s)
}

/// Nearest integer to `a / b` for `b > 0`, ties rounded down.
fn round_div(a: i128, b: i128) -> i128 {
    let two_a_plus_b = 2 * a + b;
    let q = two_a_plus_b.div_euclid(2 * b);
    if two_a_plus_b.rem_euclid(2 * b) == 0 {
        q - 1
    } else {
        q
    }
}

/// Reduces `basis` (rows) in place with respect to `form`.
///
/// The rows must be linearly independent and `form` positive definite on
/// their span; otherwise an error is returned.
pub fn lll_reduce(basis: &mut [Vec<i128>], form: &[Vec<i128>]) -> Result<()> {
    let n = basis.len();
    if n <= 1 {
        return Ok(());
    }
    // 1-based indexing for d and lambda as in the textbook formulation.
    let mut d = vec![0i128; n + 1];
    let mut lam = vec![vec![0i128; n + 1]; n + 1];
    d[0] = 1;
    d[1] = dot(form, &basis[0], &basis[0])?;
    if d[1] <= 0 {
        return Err(Error::InvalidInput("LLL: form not positive on basis".into()));
    }
    let mut k = 2usize;
    let mut kmax = 1usize;

    let red = |basis: &mut [Vec<i128>],
               lam: &mut [Vec<i128>],
               d: &[i128],
               k: usize,
               l: usize|
     -> Result<()> {
        if imul(2, lam[k][l])?.abs() > d[l] {
            let q = round_div(lam[k][l], d[l]);
            let (bl, bk) = if l < k {
                let (lo, hi) = basis.split_at_mut(k - 1);
                (&lo[l - 1], &mut hi[0])
            } else {
                unreachable!()
            };
            for (x, &y) in bk.iter_mut().zip(bl.iter()) {
                *x = isub(*x, imul(q, y)?)?;
            }
            lam[k][l] = isub(lam[k][l], imul(q, d[l])?)?;
            for i in 1..l {
                lam[k][i] = isub(lam[k][i], imul(q, lam[l][i])?)?;
            }
        }
        Ok(())
    };

    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(form, &basis[k - 1], &basis[j - 1])?;
                for i in 1..j {
                    u = isub(imul(d[i], u)?, imul(lam[k][i], lam[j][i])?)? / d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u <= 0 {
                        return Err(Error::InvalidInput(
                            "LLL: basis dependent or form not positive".into(),
                        ));
                    }
                    d[k] = u;
                }
            }
        }
        loop {
            red(basis, &mut lam, &d, k, k - 1)?;
            let lhs = imul(imul(4, d[k])?, d[k - 2])?;
            let rhs = isub(
                imul(imul(3, d[k - 1])?, d[k - 1])?,
                imul(imul(4, lam[k][k - 1])?, lam[k][k - 1])?,
            )?;
            if lhs < rhs {
                // SWAP(k)
                basis.swap(k - 1, k - 2);
                for j in 1..k - 1 {
                    let t = lam[k][j];
                    lam[k][j] = lam[k - 1][j];
                    lam[k - 1][j] = t;
                }
                let l = lam[k][k - 1];
                let b = iadd(imul(d[k - 2], d[k])?, imul(l, l)?)? / d[k - 1];
                for i in k + 1..=kmax {
                    let t = lam[i][k];
                    lam[i][k] = isub(imul(d[k], lam[i][k - 1])?, imul(l, t)?)? / d[k - 1];
                    lam[i][k - 1] = iadd(imul(b, t)?, imul(l, lam[i][k])?)? / d[k];
                }
                d[k - 1] = b;
                if k > 2 {
                    k -= 1;
                }
            } else {
                for l in (1..k - 1).rev() {
                    red(basis, &mut lam, &d, k, l)?;
                }
                k += 1;
                break;
            }
        }
    }
    Ok(())
}
