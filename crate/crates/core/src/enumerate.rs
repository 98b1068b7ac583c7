//! Enumeration of lattice classes `x` with `x² = s` and `x·L = c` for a
//! fixed anchor `L` of positive square.
//!
//! Solutions form the affine coset `x0 + L^⊥`; on `L^⊥` the negated form is
//! positive definite, so the condition becomes an ellipsoid surface
//! `(τ-μ)ᵀ M (τ-μ) = c²/L² - s` in kernel coordinates τ. The kernel basis is
//! LLL-reduced and the ellipsoid is walked level by level after completing
//! squares, entirely in scaled integer arithmetic.

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{overflow, Error, Result};
use crate::lattice::{EnriquesLattice, LatticeClass, MAX_COORD, RANK};
use crate::linalg::{self, iadd, imul, isqrt, isqrt_i64, isub, qadd, qmul, qsqrt_ceil, qsub, Q};
use crate::lll::lll_reduce;

const KDIM: usize = RANK - 1;

/// Largest per-coordinate search radius accepted before refusing a query.
pub const MAX_SEARCH_RADIUS: i128 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumQuery {
    pub anchor: LatticeClass,
    pub target_norm: i64,
    pub target_pairing: i64,
    pub primitive_only: bool,
    pub effective_only: bool,
}

impl EnumQuery {
    /// Primitive effective isotropic classes with the given degree on `anchor`.
    pub fn isotropic(anchor: LatticeClass, pairing: i64) -> Self {
        EnumQuery {
            anchor,
            target_norm: 0,
            target_pairing: pairing,
            primitive_only: true,
            effective_only: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumResult {
    /// Sorted lexicographically by coordinates, without duplicates.
    pub solutions: Vec<LatticeClass>,
    pub complete: bool,
}

/// Everything about an anchor that does not depend on `(s, c)`.
#[derive(Clone, Debug)]
pub struct AnchorFrame<'a> {
    lat: &'a EnriquesLattice,
    anchor: LatticeClass,
    l2: i128,
    gcd: i128,
    x_unit: [i128; RANK],
    kernel: Vec<[i128; RANK]>,
    h_unit: Vec<i128>,
    mu_unit: Vec<Q>,
    minv_diag: Vec<Q>,
    d: Vec<Q>,
    q: Vec<Vec<Q>>,
    q_den: i128,
    d_den: i128,
}

fn gram_dot(lat: &EnriquesLattice, x: &[i128; RANK], y: &[i128; RANK]) -> Result<i128> {
    let g = lat.gram();
    let mut s = 0i128;
    for i in 0..RANK {
        if x[i] == 0 {
            continue;
        }
        let mut r = 0i128;
        for j in 0..RANK {
            r = iadd(r, imul(g[i][j] as i128, y[j])?)?;
        }
        s = iadd(s, imul(x[i], r)?)?;
    }
    Ok(s)
}

fn round_q(x: &Q) -> i128 {
    (x + Q::new(1, 2)).floor().to_integer()
}

impl<'a> AnchorFrame<'a> {
    pub fn new(lat: &'a EnriquesLattice, anchor: &LatticeClass) -> Result<Self> {
        anchor.check_range()?;
        let l2 = lat.norm(anchor);
        if l2 <= 0 {
            return Err(Error::InvalidAnchor(l2));
        }
        let w: [i128; RANK] = lat.dual(anchor).map(i128::from);

        // Column operations on the identity reduce w to (±g) at one slot;
        // the remaining columns span ker(w).
        let mut r = w;
        let mut cols: [[i128; RANK]; RANK] = [[0; RANK]; RANK];
        for (i, c) in cols.iter_mut().enumerate() {
            c[i] = 1;
        }
        loop {
            let nz: Vec<usize> = (0..RANK).filter(|&i| r[i] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| (r[i].abs(), i)).unwrap();
            for &j in &nz {
                if j == p {
                    continue;
                }
                let qt = Integer::div_floor(&r[j], &r[p]);
                r[j] = isub(r[j], imul(qt, r[p])?)?;
                for k in 0..RANK {
                    cols[j][k] = isub(cols[j][k], imul(qt, cols[p][k])?)?;
                }
            }
        }
        let p = (0..RANK)
            .find(|&i| r[i] != 0)
            .ok_or_else(|| Error::InvalidAnchor(l2 as i64))?;
        let mut x_unit = cols[p];
        let mut gcd = r[p];
        if gcd < 0 {
            gcd = -gcd;
            x_unit = x_unit.map(|v| -v);
        }
        let mut kernel: Vec<Vec<i128>> = (0..RANK)
            .filter(|&i| i != p)
            .map(|i| cols[i].to_vec())
            .collect();

        let neg_form: Vec<Vec<i128>> = lat
            .gram()
            .iter()
            .map(|row| row.iter().map(|&v| -(v as i128)).collect())
            .collect();
        lll_reduce(&mut kernel, &neg_form)?;
        let kernel: Vec<[i128; RANK]> = kernel
            .into_iter()
            .map(|v| v.try_into().expect("rank"))
            .collect();

        let mut m = vec![vec![Q::zero(); KDIM]; KDIM];
        for i in 0..KDIM {
            for j in 0..KDIM {
                m[i][j] = Q::from_integer(-gram_dot(lat, &kernel[i], &kernel[j])?);
            }
        }
        let minv = linalg::inverse(&m)?
            .ok_or_else(|| Error::InvalidInput("anchor complement is degenerate".into()))?;
        let h_unit: Vec<i128> = kernel
            .iter()
            .map(|k| gram_dot(lat, k, &x_unit))
            .collect::<Result<_>>()?;
        let mut mu_unit = vec![Q::zero(); KDIM];
        for i in 0..KDIM {
            let mut s = Q::zero();
            for j in 0..KDIM {
                s = qadd(&s, &qmul(&minv[i][j], &Q::from_integer(h_unit[j]))?)?;
            }
            mu_unit[i] = s;
        }
        let (d, q) = linalg::square_completion(&m)?;
        let mut q_den = 1i128;
        for i in 0..KDIM {
            for j in i + 1..KDIM {
                q_den = linalg::lcm(q_den, *q[i][j].denom())?;
            }
        }
        let mut d_den = 1i128;
        for di in &d {
            d_den = linalg::lcm(d_den, *di.denom())?;
        }
        Ok(AnchorFrame {
            lat,
            anchor: *anchor,
            l2: l2 as i128,
            gcd,
            x_unit,
            kernel,
            h_unit,
            mu_unit,
            minv_diag: (0..KDIM).map(|i| minv[i][i]).collect(),
            d,
            q,
            q_den,
            d_den,
        })
    }

    pub fn anchor(&self) -> &LatticeClass {
        &self.anchor
    }

    pub fn anchor_norm(&self) -> i64 {
        self.l2 as i64
    }

    fn check_query(&self, s: i64, c: i64) -> Result<()> {
        if c < 1 {
            return Err(Error::InfeasibleQuery(format!(
                "target pairing must be at least 1, got {c}"
            )));
        }
        let lhs = imul(s as i128, self.l2)?;
        let rhs = imul(c as i128, c as i128)?;
        if lhs > rhs {
            return Err(Error::InfeasibleQuery(format!(
                "s*L^2 = {lhs} exceeds c^2 = {rhs}"
            )));
        }
        Ok(())
    }

    /// Calls `visit` on every solution of `x² = s`, `x·L = c` passing the
    /// filters, in an unspecified but deterministic order. Returns the number
    /// visited.
    pub fn visit(
        &self,
        s: i64,
        c: i64,
        primitive_only: bool,
        effective_only: bool,
        mut visit: impl FnMut(&LatticeClass),
    ) -> Result<u64> {
        self.visit_while(s, c, primitive_only, effective_only, |x| {
            visit(x);
            true
        })
    }

    /// Like [`AnchorFrame::visit`], stopping as soon as `visit` returns false.
    pub fn visit_while(
        &self,
        s: i64,
        c: i64,
        primitive_only: bool,
        effective_only: bool,
        mut visit: impl FnMut(&LatticeClass) -> bool,
    ) -> Result<u64> {
        self.check_query(s, c)?;
        if s % 2 != 0 {
            return Ok(0);
        }
        let c = c as i128;
        if c % self.gcd != 0 {
            return Ok(0);
        }
        let t = c / self.gcd;
        let tq = Q::from_integer(t);

        // Shift the particular solution next to the ellipsoid centre.
        let mut shift = vec![0i128; KDIM];
        let mut mu = vec![Q::zero(); KDIM];
        for i in 0..KDIM {
            let full = qmul(&self.mu_unit[i], &tq)?;
            shift[i] = round_q(&full);
            mu[i] = qsub(&full, &Q::from_integer(shift[i]))?;
        }
        let mut x0 = [0i128; RANK];
        for k in 0..RANK {
            let mut v = imul(t, self.x_unit[k])?;
            for i in 0..KDIM {
                v = iadd(v, imul(shift[i], self.kernel[i][k])?)?;
            }
            x0[k] = v;
        }
        let x0_norm = gram_dot(self.lat, &x0, &x0)?;
        let mut radius = Q::from_integer(isub(x0_norm, s as i128)?);
        for i in 0..KDIM {
            let h = gram_dot(self.lat, &self.kernel[i], &x0)?;
            radius = qadd(&radius, &qmul(&Q::from_integer(h), &mu[i])?)?;
        }
        let expected = Q::new(
            isub(imul(c, c)?, imul(s as i128, self.l2)?)?,
            self.l2,
        );
        if radius != expected {
            return Err(Error::TheoremViolation(format!(
                "ellipsoid radius {radius} disagrees with c²/L² - s = {expected}"
            )));
        }
        if radius.is_negative() {
            return Ok(0);
        }
        debug_assert!(self.h_unit.len() == KDIM);

        // Certified coordinate radius in kernel coordinates.
        let mut tau_radius = 0i128;
        for i in 0..KDIM {
            let b = qsqrt_ceil(&qmul(&radius, &self.minv_diag[i])?)?;
            tau_radius = tau_radius.max(b + 1);
        }
        if tau_radius > MAX_SEARCH_RADIUS {
            return Err(Error::Overflow(format!(
                "search radius {tau_radius} exceeds {MAX_SEARCH_RADIUS}"
            )));
        }

        // nu_i = mu_i + sum_{j>i} q_ij mu_j
        let mut nu = vec![Q::zero(); KDIM];
        let mut delta = self.q_den;
        for i in 0..KDIM {
            let mut v = mu[i];
            for j in i + 1..KDIM {
                v = qadd(&v, &qmul(&self.q[i][j], &mu[j])?)?;
            }
            delta = linalg::lcm(delta, *v.denom())?;
            nu[i] = v;
        }
        let e = linalg::lcm(self.d_den, *radius.denom())?;
        let dq_: Vec<Vec<i128>> = (0..KDIM)
            .map(|i| {
                (0..KDIM)
                    .map(|j| {
                        if j > i {
                            (self.q[i][j] * Q::from_integer(delta)).to_integer()
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let dnu: Vec<i128> = nu
            .iter()
            .map(|v| qmul(v, &Q::from_integer(delta)).map(|x| x.to_integer()))
            .collect::<Result<_>>()?;
        let dd: Vec<i128> = self
            .d
            .iter()
            .map(|v| qmul(v, &Q::from_integer(e)).map(|x| x.to_integer()))
            .collect::<Result<_>>()?;
        let rho = qmul(&qmul(&radius, &Q::from_integer(e))?, &Q::from_integer(imul(delta, delta)?))?
            .to_integer();

        // Bounds that keep the unchecked inner loop exact.
        let tb = tau_radius + 1;
        for k in 0..RANK {
            let mut v = x0[k].abs();
            for i in 0..KDIM {
                v = iadd(v, imul(self.kernel[i][k].abs(), tb)?)?;
            }
            if v > i128::from(i64::MAX) / 4 {
                return Err(overflow("solution coordinate"));
            }
        }

        // every solution has x² = s and x·L = c >= 1, so x ≠ 0 and
        // effectivity reduces to x·h0 > 0 once s >= 0
        if effective_only && s < 0 {
            return Ok(0);
        }
        let gh = self.lat.dual(&self.lat.reference_ample());
        let mut count = 0u64;
        let mut emit = |x: &[i64; RANK]| {
            if effective_only && x.iter().zip(&gh).map(|(a, b)| a * b).sum::<i64>() <= 0 {
                return true;
            }
            let v = LatticeClass(*x);
            if primitive_only && v.content() != 1 {
                return true;
            }
            count += 1;
            visit(&v)
        };
        // Pick the narrowest integer type that provably cannot overflow.
        let mut peak = rho.max(delta).max(imul(delta, tb)?);
        for i in 0..KDIM {
            let mut cmax = dnu[i].abs();
            for j in i + 1..KDIM {
                cmax = iadd(cmax, imul(dq_[i][j].abs(), tb)?)?;
            }
            let zmax = iadd(imul(delta, tb)?, cmax)?;
            peak = peak.max(imul(imul(zmax, zmax)?, dd[i])?);
        }
        if peak < (1i128 << 61) {
            let mut search = Search::<i64>::new(delta, &dq_, &dnu, &dd, &x0, &self.kernel);
            search.level(KDIM - 1, rho as i64, &mut emit);
        } else {
            let mut search = Search::<i128>::new(delta, &dq_, &dnu, &dd, &x0, &self.kernel);
            search.level(KDIM - 1, rho, &mut emit);
        }
        Ok(count)
    }

    /// Sorted solutions of one query.
    pub fn collect(
        &self,
        s: i64,
        c: i64,
        primitive_only: bool,
        effective_only: bool,
    ) -> Result<Vec<LatticeClass>> {
        let mut out = Vec::new();
        self.visit(s, c, primitive_only, effective_only, |x| out.push(*x))?;
        out.sort_unstable();
        out.dedup();
        for x in &out {
            if x.max_abs() > MAX_COORD {
                return Err(Error::Overflow(format!("solution {x} leaves coordinate range")));
            }
        }
        Ok(out)
    }
}

/// Integer types the inner enumeration loop can run in.
trait SearchInt:
    Copy
    + Ord
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Rem<Output = Self>
    + std::ops::Neg<Output = Self>
{
    const ZERO: Self;
    fn from_i128(v: i128) -> Self;
    fn to_i64(self) -> i64;
    fn sqrt_floor(self) -> Self;
    fn div_floor(self, d: Self) -> Self;
    fn div_ceil(self, d: Self) -> Self;
}

impl SearchInt for i64 {
    const ZERO: Self = 0;
    fn from_i128(v: i128) -> Self {
        v as i64
    }
    fn to_i64(self) -> i64 {
        self
    }
    fn sqrt_floor(self) -> Self {
        isqrt_i64(self)
    }
    fn div_floor(self, d: Self) -> Self {
        Integer::div_floor(&self, &d)
    }
    fn div_ceil(self, d: Self) -> Self {
        Integer::div_ceil(&self, &d)
    }
}

impl SearchInt for i128 {
    const ZERO: Self = 0;
    fn from_i128(v: i128) -> Self {
        v
    }
    fn to_i64(self) -> i64 {
        self as i64
    }
    fn sqrt_floor(self) -> Self {
        isqrt(self)
    }
    fn div_floor(self, d: Self) -> Self {
        Integer::div_floor(&self, &d)
    }
    fn div_ceil(self, d: Self) -> Self {
        Integer::div_ceil(&self, &d)
    }
}

struct Search<T: SearchInt> {
    delta: T,
    dq: [[T; KDIM]; KDIM],
    dnu: [T; KDIM],
    dd: [T; KDIM],
    tau: [T; KDIM],
    kernel: [[T; RANK]; KDIM],
    /// `partial[i] = x0 + Σ_{j >= i} τ_j K_j`; `partial[KDIM] = x0`.
    partial: [[T; RANK]; KDIM + 1],
}

impl<T: SearchInt> Search<T> {
    fn new(
        delta: i128,
        dq: &[Vec<i128>],
        dnu: &[i128],
        dd: &[i128],
        x0: &[i128; RANK],
        kernel: &[[i128; RANK]],
    ) -> Self {
        let c = T::from_i128;
        let mut s = Search {
            delta: c(delta),
            dq: [[T::ZERO; KDIM]; KDIM],
            dnu: [T::ZERO; KDIM],
            dd: [T::ZERO; KDIM],
            tau: [T::ZERO; KDIM],
            kernel: [[T::ZERO; RANK]; KDIM],
            partial: [[T::ZERO; RANK]; KDIM + 1],
        };
        for i in 0..KDIM {
            for j in 0..KDIM {
                s.dq[i][j] = c(dq[i][j]);
            }
            s.dnu[i] = c(dnu[i]);
            s.dd[i] = c(dd[i]);
            for k in 0..RANK {
                s.kernel[i][k] = c(kernel[i][k]);
            }
        }
        for k in 0..RANK {
            s.partial[KDIM][k] = c(x0[k]);
        }
        s
    }

    fn centre(&self, i: usize) -> T {
        let mut c = self.dnu[i];
        for j in i + 1..KDIM {
            c = c - self.dq[i][j] * self.tau[j];
        }
        c
    }

    fn set(&mut self, i: usize, t: T) {
        self.tau[i] = t;
        for k in 0..RANK {
            self.partial[i][k] = self.partial[i + 1][k] + t * self.kernel[i][k];
        }
    }

    fn emit(&self, emit: &mut impl FnMut(&[i64; RANK]) -> bool) -> bool {
        let mut x = [0i64; RANK];
        for k in 0..RANK {
            x[k] = self.partial[0][k].to_i64();
        }
        emit(&x)
    }

    /// Returns false once the visitor asked to stop.
    fn level(&mut self, i: usize, rho: T, emit: &mut impl FnMut(&[i64; RANK]) -> bool) -> bool {
        let c = self.centre(i);
        let di = self.dd[i];
        if i == 0 {
            if rho % di != T::ZERO {
                return true;
            }
            let zz = rho / di;
            let z = zz.sqrt_floor();
            if z * z != zz {
                return true;
            }
            let roots = [-z, z];
            let roots = if z == T::ZERO { &roots[..1] } else { &roots[..] };
            for &zc in roots {
                let num = c + zc;
                if num % self.delta == T::ZERO {
                    self.set(0, num / self.delta);
                    if !self.emit(emit) {
                        return false;
                    }
                }
            }
            return true;
        }
        let m = (rho / di).sqrt_floor();
        let lo = (c - m).div_ceil(self.delta);
        let hi = (c + m).div_floor(self.delta);
        let mut t = lo;
        while t <= hi {
            let z = self.delta * t - c;
            let rest = rho - di * z * z;
            if rest >= T::ZERO {
                self.set(i, t);
                if !self.level(i - 1, rest, emit) {
                    return false;
                }
            }
            t = t + T::from_i128(1);
        }
        true
    }
}

/// Visits all solutions of `q`. Returns the number visited.
pub fn enumerate_with(
    lat: &EnriquesLattice,
    q: &EnumQuery,
    visit: impl FnMut(&LatticeClass),
) -> Result<u64> {
    let frame = AnchorFrame::new(lat, &q.anchor)?;
    frame.visit(
        q.target_norm,
        q.target_pairing,
        q.primitive_only,
        q.effective_only,
        visit,
    )
}

/// All solutions of `q`, sorted lexicographically.
pub fn enumerate(lat: &EnriquesLattice, q: &EnumQuery) -> Result<EnumResult> {
    let frame = AnchorFrame::new(lat, &q.anchor)?;
    let solutions = frame.collect(
        q.target_norm,
        q.target_pairing,
        q.primitive_only,
        q.effective_only,
    )?;
    Ok(EnumResult {
        solutions,
        complete: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> &'static EnriquesLattice {
        EnriquesLattice::standard()
    }

    fn v(c: [i64; RANK]) -> LatticeClass {
        LatticeClass(c)
    }

    #[test]
    fn anchor_must_be_positive() {
        let e = LatticeClass::basis(0);
        let err = enumerate(lat(), &EnumQuery::isotropic(e, 1)).unwrap_err();
        assert_eq!(err, Error::InvalidAnchor(0));
    }

    #[test]
    fn pairing_must_be_positive() {
        let h0 = lat().reference_ample();
        let err = enumerate(lat(), &EnumQuery::isotropic(h0, 0)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleQuery(_)));
    }

    #[test]
    fn hodge_infeasible_rejected() {
        let h0 = lat().reference_ample();
        let q = EnumQuery {
            anchor: h0,
            target_norm: 4,
            target_pairing: 2,
            primitive_only: false,
            effective_only: false,
        };
        assert!(matches!(enumerate(lat(), &q), Err(Error::InfeasibleQuery(_))));
    }

    #[test]
    fn isotropic_degree_one_on_h0() {
        // x = (a, b, v): x·h0 = a + b = 1 and 2ab = -v² forces {a,b} = {0,1}, v = 0.
        let h0 = lat().reference_ample();
        let r = enumerate(lat(), &EnumQuery::isotropic(h0, 1)).unwrap();
        assert_eq!(
            r.solutions,
            vec![
                v([0, 1, 0, 0, 0, 0, 0, 0, 0, 0]),
                v([1, 0, 0, 0, 0, 0, 0, 0, 0, 0])
            ]
        );
        assert!(r.complete);
    }

    #[test]
    fn every_solution_satisfies_query() {
        let l = v([2, 3, 1, 0, -1, 0, 0, 0, 0, 0]);
        let l2 = lat().norm(&l);
        assert!(l2 > 0);
        for (s, c) in [(0, 3), (0, 4), (2, 5), (4, 6), (-2, 3)] {
            if s * l2 > c * c {
                continue;
            }
            let q = EnumQuery {
                anchor: l,
                target_norm: s,
                target_pairing: c,
                primitive_only: false,
                effective_only: false,
            };
            let r = enumerate(lat(), &q).unwrap();
            for x in &r.solutions {
                assert_eq!(lat().norm(x), s);
                assert_eq!(lat().pairing(x, &l), c);
            }
        }
    }

    #[test]
    fn degree_two_isotropic_on_h0() {
        // x = (a, b, r) with a + b = 2 and 2ab = -r²: either (2,0,0), (0,2,0)
        // or (1,1,r) with r one of the 240 roots of E8.
        let h0 = lat().reference_ample();
        let q = EnumQuery {
            anchor: h0,
            target_norm: 0,
            target_pairing: 2,
            primitive_only: false,
            effective_only: false,
        };
        let r = enumerate(lat(), &q).unwrap();
        assert_eq!(r.solutions.len(), 242);
        let prim = enumerate(lat(), &EnumQuery::isotropic(h0, 2)).unwrap();
        assert_eq!(prim.solutions.len(), 240);
    }

    #[test]
    fn odd_norm_is_empty() {
        let h0 = lat().reference_ample();
        let q = EnumQuery {
            anchor: h0,
            target_norm: 1,
            target_pairing: 3,
            primitive_only: false,
            effective_only: false,
        };
        assert!(enumerate(lat(), &q).unwrap().solutions.is_empty());
    }

    #[test]
    fn gcd_obstruction() {
        // 2h0 pairs evenly with everything.
        let l = 2 * lat().reference_ample();
        let q = EnumQuery::isotropic(l, 3);
        assert!(enumerate(lat(), &q).unwrap().solutions.is_empty());
        assert_eq!(enumerate(lat(), &EnumQuery::isotropic(l, 2)).unwrap().solutions.len(), 2);
    }
}
