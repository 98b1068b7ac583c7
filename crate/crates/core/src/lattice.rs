//! The lattice `U ⊕ E8(-1)` with coordinates `(e, f, α1, …, α8)`.
//!
//! `e, f` span the hyperbolic plane, `α1..α8` are simple roots of E8 in
//! Bourbaki numbering (chain 1-3-4-5-6-7-8, node 2 attached to node 4).

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Q};

pub const RANK: usize = 10;

/// Coordinates above this magnitude are rejected so that pairings and the
/// enumeration internals stay inside 128-bit arithmetic.
pub const MAX_COORD: i64 = 1 << 20;

pub type Gram = [[i64; RANK]; RANK];

/// An element of the lattice, as an integer coordinate vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeClass(pub [i64; RANK]);

impl LatticeClass {
    pub const ZERO: LatticeClass = LatticeClass([0; RANK]);

    pub fn new(coords: [i64; RANK]) -> Self {
        LatticeClass(coords)
    }

    /// Unit vector along coordinate `i`.
    pub fn basis(i: usize) -> Self {
        let mut c = [0; RANK];
        c[i] = 1;
        LatticeClass(c)
    }

    pub fn coords(&self) -> &[i64; RANK] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &c| g.gcd(&c))
    }

    /// Whether the class is not a proper multiple of another class.
    pub fn is_primitive(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::InvalidInput("zero vector has no primitivity".into()));
        }
        Ok(self.content() == 1)
    }

    /// `self / k` if every coordinate is divisible by `k`.
    pub fn div_exact(&self, k: i64) -> Option<LatticeClass> {
        if k == 0 || self.0.iter().any(|c| c % k != 0) {
            return None;
        }
        Some(LatticeClass(self.0.map(|c| c / k)))
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// Rejects coordinates outside the supported range.
    pub fn check_range(&self) -> Result<()> {
        if self.max_abs() > MAX_COORD {
            return Err(Error::Overflow(format!(
                "coordinate magnitude {} exceeds {MAX_COORD}",
                self.max_abs()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for LatticeClass {
    type Err = Error;

    /// Accepts `v[a,b,…]`, `[a,b,…]` or a bare comma/space separated list.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('v').unwrap_or(t).trim();
        let t = t
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .unwrap_or(t);
        let parts: Vec<&str> = t
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != RANK {
            return Err(Error::InvalidInput(format!(
                "expected {RANK} coordinates, got {}",
                parts.len()
            )));
        }
        let mut c = [0i64; RANK];
        for (slot, p) in c.iter_mut().zip(parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::InvalidInput(format!("not an integer: {p:?}")))?;
        }
        Ok(LatticeClass(c))
    }
}

impl Index<usize> for LatticeClass {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for LatticeClass {
    fn index_mut(&mut self, i: usize) -> &mut i64 {
        &mut self.0[i]
    }
}

impl Add for LatticeClass {
    type Output = LatticeClass;
    fn add(mut self, rhs: LatticeClass) -> LatticeClass {
        self += rhs;
        self
    }
}

impl AddAssign for LatticeClass {
    fn add_assign(&mut self, rhs: LatticeClass) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for LatticeClass {
    type Output = LatticeClass;
    fn sub(mut self, rhs: LatticeClass) -> LatticeClass {
        self -= rhs;
        self
    }
}

impl SubAssign for LatticeClass {
    fn sub_assign(&mut self, rhs: LatticeClass) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
    }
}

impl Neg for LatticeClass {
    type Output = LatticeClass;
    fn neg(self) -> LatticeClass {
        LatticeClass(self.0.map(|c| -c))
    }
}

impl Mul<LatticeClass> for i64 {
    type Output = LatticeClass;
    fn mul(self, rhs: LatticeClass) -> LatticeClass {
        LatticeClass(rhs.0.map(|c| self * c))
    }
}

/// E8 Cartan matrix, Bourbaki numbering.
pub fn e8_cartan() -> [[i64; 8]; 8] {
    const EDGES: [(usize, usize); 7] = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    let mut c = [[0i64; 8]; 8];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in EDGES {
        c[a][b] = -1;
        c[b][a] = -1;
    }
    c
}

/// Gram matrix of `U ⊕ E8(-1)` in the `(e, f, α1..α8)` basis.
pub fn standard_gram() -> Gram {
    let mut g = [[0i64; RANK]; RANK];
    g[0][1] = 1;
    g[1][0] = 1;
    let c = e8_cartan();
    for i in 0..8 {
        for j in 0..8 {
            g[i + 2][j + 2] = -c[i][j];
        }
    }
    g
}

/// An even unimodular lattice of signature (1, 9) with a fixed class of
/// positive square used to decide effectivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnriquesLattice {
    gram: Gram,
    ample: LatticeClass,
}

impl EnriquesLattice {
    /// `U ⊕ E8(-1)` with reference class `e + f`.
    pub fn standard() -> &'static EnriquesLattice {
        static STD: OnceLock<EnriquesLattice> = OnceLock::new();
        STD.get_or_init(|| {
            let mut h0 = LatticeClass::ZERO;
            h0[0] = 1;
            h0[1] = 1;
            EnriquesLattice::new(standard_gram(), h0).expect("standard lattice is valid")
        })
    }

    /// Validates that `gram` is symmetric, even, unimodular, integrally
    /// invertible and of signature (1, 9), and that `ample` has positive square.
    pub fn new(gram: Gram, ample: LatticeClass) -> Result<EnriquesLattice> {
        for i in 0..RANK {
            for j in 0..RANK {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "Gram matrix not symmetric at ({i},{j})"
                    )));
                }
            }
            if gram[i][i] % 2 != 0 {
                return Err(Error::InvalidInput(format!(
                    "Gram matrix not even: entry ({i},{i}) = {}",
                    gram[i][i]
                )));
            }
        }
        let wide: Vec<Vec<i128>> = gram
            .iter()
            .map(|r| r.iter().map(|&v| v as i128).collect())
            .collect();
        let det = linalg::det_bareiss(&wide)?;
        if det.abs() != 1 {
            return Err(Error::InvalidInput(format!(
                "Gram matrix has determinant {det}, expected ±1"
            )));
        }
        let (pos, neg, zero) = linalg::inertia(&wide)?;
        if (pos, neg, zero) != (1, 9, 0) {
            return Err(Error::InvalidInput(format!(
                "signature ({pos},{neg}) with {zero} null directions, expected (1,9)"
            )));
        }
        let lat = EnriquesLattice { gram, ample };
        if lat.inverse_gram()?.is_none() {
            return Err(Error::InvalidInput("Gram inverse is not integral".into()));
        }
        if lat.norm(&ample) <= 0 {
            return Err(Error::InvalidInput("reference class must have positive square".into()));
        }
        Ok(lat)
    }

    /// Skips every check. Only meant for exercising the verifier against a
    /// deliberately wrong lattice.
    #[doc(hidden)]
    pub fn from_gram_unchecked(gram: Gram, ample: LatticeClass) -> EnriquesLattice {
        EnriquesLattice { gram, ample }
    }

    pub fn gram(&self) -> &Gram {
        &self.gram
    }

    pub fn reference_ample(&self) -> LatticeClass {
        self.ample
    }

    /// Integral inverse of the Gram matrix, or `None` if it is not integral.
    pub fn inverse_gram(&self) -> Result<Option<Gram>> {
        let q: Vec<Vec<Q>> = self
            .gram
            .iter()
            .map(|r| r.iter().map(|&v| Q::from_integer(v as i128)).collect())
            .collect();
        let Some(inv) = linalg::inverse(&q)? else {
            return Ok(None);
        };
        let mut out = [[0i64; RANK]; RANK];
        for i in 0..RANK {
            for j in 0..RANK {
                if !inv[i][j].is_integer() {
                    return Ok(None);
                }
                out[i][j] = *inv[i][j].numer() as i64;
            }
        }
        Ok(Some(out))
    }

    /// `G·x`, the pairing functional of `x`.
    pub fn dual(&self, x: &LatticeClass) -> [i64; RANK] {
        let mut w = [0i64; RANK];
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = (0..RANK).map(|j| self.gram[i][j] * x.0[j]).sum();
        }
        w
    }

    pub fn pairing(&self, x: &LatticeClass, y: &LatticeClass) -> i64 {
        let mut s = 0i64;
        for i in 0..RANK {
            if x.0[i] == 0 {
                continue;
            }
            let mut r = 0i64;
            for j in 0..RANK {
                r += self.gram[i][j] * y.0[j];
            }
            s += x.0[i] * r;
        }
        s
    }

    pub fn norm(&self, x: &LatticeClass) -> i64 {
        self.pairing(x, x)
    }

    /// Numerically effective in the unnodal model: non-zero, non-negative
    /// square and positive degree against the reference class.
    pub fn is_num_effective(&self, x: &LatticeClass) -> bool {
        !x.is_zero() && self.norm(x) >= 0 && self.pairing(x, &self.ample) > 0
    }

    /// Primitive, effective and isotropic.
    pub fn is_isotropic_effective(&self, x: &LatticeClass) -> bool {
        self.norm(x) == 0 && x.content() == 1 && self.is_num_effective(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std() -> &'static EnriquesLattice {
        EnriquesLattice::standard()
    }

    #[test]
    fn standard_is_valid() {
        let g = standard_gram();
        assert_eq!(g[0][1], 1);
        assert_eq!(g[2][2], -2);
        // node 2 (index 3) is attached to node 4 (index 5)
        assert_eq!(g[3][5], 1);
        assert_eq!(g[3][4], 0);
        let inv = std().inverse_gram().unwrap().unwrap();
        for i in 0..RANK {
            for j in 0..RANK {
                let s: i64 = (0..RANK).map(|k| g[i][k] * inv[k][j]).sum();
                assert_eq!(s, i64::from(i == j));
            }
        }
    }

    #[test]
    fn rejects_bad_grams() {
        let h0 = std().reference_ample();
        let mut odd = standard_gram();
        odd[2][2] = -1;
        assert!(matches!(EnriquesLattice::new(odd, h0), Err(Error::InvalidInput(_))));

        let mut asym = standard_gram();
        asym[2][3] = 1;
        assert!(matches!(EnriquesLattice::new(asym, h0), Err(Error::InvalidInput(_))));

        let mut u2 = standard_gram();
        u2[0][1] = 2;
        u2[1][0] = 2;
        let err = EnriquesLattice::new(u2, h0).unwrap_err();
        assert!(err.to_string().contains("determinant"), "{err}");

        let mut flipped = standard_gram();
        flipped[0][1] = -1;
        flipped[1][0] = -1;
        // still unimodular and hyperbolic; e+f now has negative square
        assert!(EnriquesLattice::new(flipped, h0).is_err());
    }

    #[test]
    fn pairing_basics() {
        let h0 = std().reference_ample();
        assert_eq!(std().norm(&h0), 2);
        let e = LatticeClass::basis(0);
        let f = LatticeClass::basis(1);
        assert_eq!(std().norm(&e), 0);
        assert_eq!(std().pairing(&e, &f), 1);
        assert!(std().is_num_effective(&e));
        assert!(!std().is_num_effective(&-e));
        assert!(!std().is_num_effective(&LatticeClass::ZERO));
        assert!(!std().is_num_effective(&LatticeClass::basis(2)));
    }

    #[test]
    fn primitivity() {
        assert!(LatticeClass::ZERO.is_primitive().is_err());
        let v = LatticeClass::new([2, 4, 0, 0, 0, 0, 0, 0, 0, 6]);
        assert!(!v.is_primitive().unwrap());
        assert_eq!(v.content(), 2);
        assert_eq!(v.div_exact(2).unwrap().0[1], 2);
        assert!(v.div_exact(4).is_none());
        assert!(LatticeClass::basis(3).is_primitive().unwrap());
    }

    #[test]
    fn parse_and_display() {
        let v: LatticeClass = "v[1,2,0,0,0,0,0,0,0,-3]".parse().unwrap();
        assert_eq!(v.to_string(), "v[1,2,0,0,0,0,0,0,0,-3]");
        let w: LatticeClass = "1 2 0 0 0 0 0 0 0 -3".parse().unwrap();
        assert_eq!(v, w);
        assert!("v[1,2]".parse::<LatticeClass>().is_err());
        assert!("v[1,2,x,0,0,0,0,0,0,0]".parse::<LatticeClass>().is_err());
    }

    #[test]
    fn range_guard() {
        let mut v = LatticeClass::ZERO;
        v[4] = MAX_COORD + 1;
        assert!(matches!(v.check_range(), Err(Error::Overflow(_))));
    }
}
