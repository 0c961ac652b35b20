//! Arithmetic in GF(2^ell).
//!
//! Elements are ell-bit polynomials over GF(2), stored as bit masks (bit i
//! holds the coefficient of x^i). Addition is XOR; multiplication is a
//! carry-less shift-XOR product reduced modulo a monic irreducible
//! polynomial of degree ell. The solver picks ell = ceil(log2 k) + 3 so
//! that k / 2^ell <= 1/8.

use rand::RngCore;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// An element of GF(2^ell): bit i is the coefficient of x^i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FieldElement(pub u32);

pub const F_ZERO: FieldElement = FieldElement(0);
pub const F_ONE: FieldElement = FieldElement(1);

impl FieldElement {
    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Addition in characteristic 2 is bitwise XOR; every element is its own
/// additive inverse.
impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

/// Degree of a GF(2) polynomial mask, or `None` for the zero polynomial.
#[inline]
pub fn poly_degree(p: u64) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(63 - p.leading_zeros())
    }
}

/// Carry-less product of two GF(2) polynomial masks.
///
/// Operands must have degree < 32 so the product fits in a u64.
#[inline]
pub fn clmul(a: u64, b: u64) -> u64 {
    debug_assert!(a < (1 << 32) && b < (1 << 32));
    let mut acc = 0u64;
    let mut rem = b;
    let mut shift = 0;
    while rem != 0 {
        if rem & 1 != 0 {
            acc ^= a << shift;
        }
        rem >>= 1;
        shift += 1;
    }
    acc
}

/// Remainder of `a` modulo the polynomial `m` over GF(2).
pub fn poly_mod(a: u64, m: u64) -> u64 {
    let deg_m = poly_degree(m).expect("zero modulus polynomial");
    let mut r = a;
    while let Some(deg_r) = poly_degree(r) {
        if deg_r < deg_m {
            break;
        }
        r ^= m << (deg_r - deg_m);
    }
    r
}

/// Irreducibility over GF(2) by trial division against every monic
/// polynomial of degree 1..=deg/2.
pub fn is_irreducible(p: u64) -> bool {
    let deg = match poly_degree(p) {
        Some(d) => d,
        None => return false,
    };
    if deg == 0 {
        return false; // units are not irreducible
    }
    if deg == 1 {
        return true;
    }
    let limit = 1u64 << (deg / 2 + 1);
    let mut d = 2u64;
    while d < limit {
        if poly_mod(p, d) == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The lexicographically smallest monic irreducible polynomial of degree
/// `ell`. Deterministic, so golden values stay stable.
pub fn find_irreducible(ell: u32) -> FieldParams {
    assert!((1..=30).contains(&ell), "field degree {ell} out of range 1..=30");
    for mask in (1u64 << ell)..(1u64 << (ell + 1)) {
        if is_irreducible(mask) {
            return FieldParams { ell, modpoly: mask };
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Field parameters: the degree ell and the monic irreducible modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldParams {
    ell: u32,
    modpoly: u64,
}

impl FieldParams {
    /// Build params from an explicit modulus, validating that it is monic
    /// of degree exactly `ell` and irreducible.
    pub fn new(ell: u32, modpoly: u64) -> Result<Self, String> {
        if !(1..=30).contains(&ell) {
            return Err(format!("field degree {ell} out of range 1..=30"));
        }
        if poly_degree(modpoly) != Some(ell) {
            return Err(format!("modulus {modpoly:#b} is not monic of degree {ell}"));
        }
        if !is_irreducible(modpoly) {
            return Err(format!("modulus {modpoly:#b} is reducible"));
        }
        Ok(FieldParams { ell, modpoly })
    }

    /// Field for multilinear degree k: ell = ceil(log2 k) + 3, which keeps
    /// the Schwartz-Zippel failure bound k / 2^ell at or below 1/8.
    pub fn for_k(k: u32) -> Self {
        assert!(k >= 1);
        find_irreducible(ceil_log2(k) + 3)
    }

    #[inline]
    pub fn ell(&self) -> u32 {
        self.ell
    }

    #[inline]
    pub fn modpoly(&self) -> u64 {
        self.modpoly
    }

    /// Number of field elements, 2^ell.
    #[inline]
    pub fn size(&self) -> u64 {
        1 << self.ell
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        u64::from(a.0) < self.size()
    }

    /// Carry-less product reduced modulo the irreducible polynomial.
    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        FieldElement(poly_mod(clmul(u64::from(a.0), u64::from(b.0)), self.modpoly) as u32)
    }

    /// Exponentiation by squaring.
    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = F_ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// A uniform element; the mask of one u32 draw. Reproducible for a
    /// fixed generator state.
    #[inline]
    pub fn random(&self, rng: &mut impl RngCore) -> FieldElement {
        FieldElement(rng.next_u32() & ((1u32 << self.ell) - 1))
    }
}

#[inline]
pub fn ceil_log2(k: u32) -> u32 {
    assert!(k >= 1);
    32 - (k - 1).leading_zeros()
}

/// Log/antilog tables over the multiplicative group. One table lookup per
/// product instead of a shift-XOR loop; used by the ring hot paths.
pub struct MulTable {
    params: FieldParams,
    log: Vec<u32>,
    exp: Vec<u32>,
}

impl MulTable {
    fn build(params: FieldParams) -> Self {
        assert!(params.ell <= 16, "mul table limited to ell <= 16");
        let size = params.size() as usize;
        let order = (size - 1) as u64;
        let generator = (2..size as u64)
            .map(|c| FieldElement(c as u32))
            .find(|&c| multiplicative_order(params, c) == order)
            .unwrap_or(F_ONE); // size == 2: the group is trivial
        let mut log = vec![0u32; size];
        let mut exp = vec![0u32; (2 * order.max(1)) as usize];
        let mut acc = F_ONE;
        for i in 0..order.max(1) {
            exp[i as usize] = acc.0;
            if order > 0 {
                exp[(i + order) as usize] = acc.0;
            }
            log[acc.0 as usize] = i as u32;
            acc = params.mul(acc, generator);
        }
        MulTable { params, log, exp }
    }

    #[inline]
    pub fn params(&self) -> FieldParams {
        self.params
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return F_ZERO;
        }
        let idx = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[idx as usize])
    }
}

fn multiplicative_order(params: FieldParams, a: FieldElement) -> u64 {
    assert!(!a.is_zero());
    let mut acc = a;
    let mut t = 1u64;
    while acc != F_ONE {
        acc = params.mul(acc, a);
        t += 1;
    }
    t
}

static TABLES: OnceLock<Mutex<HashMap<(u32, u64), Arc<MulTable>>>> = OnceLock::new();

/// Shared multiplication table for the given params, built on first use.
pub fn mul_table(params: FieldParams) -> Arc<MulTable> {
    let cache = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((params.ell, params.modpoly))
        .or_insert_with(|| Arc::new(MulTable::build(params)))
        .clone()
}
