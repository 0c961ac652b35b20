//! The truncated polynomial ring (F[Z_2^k])[z].
//!
//! Elements are dense 2^k x D tables of GF(2^ell) coefficients indexed by
//! (group vector, z-degree). The group product on Z_2^k is XOR of masks,
//! so ring multiplication is an XOR convolution across the group dimension
//! and an ordinary truncated convolution across the degree dimension.
//! Degrees at or above the cap D are discarded.
//!
//! Two multiplication routes are kept bit-identical: a schoolbook
//! convolution (`mul_naive`) and a transform pipeline (`mul_fast`) that
//! lifts GF(2^ell) coefficients to integer bit-polynomials, applies an
//! exact integer Walsh-Hadamard transform over the k binary dimensions,
//! convolves pointwise along degree, and reduces mod 2 and mod the
//! irreducible polynomial afterwards. The all-integer route avoids any
//! floating-point rounding concerns.

use crate::gf2e::{self, ceil_log2, mul_table, FieldElement, FieldParams, F_ONE};
use rand::RngCore;

/// An element of Z_2^k as a k-bit mask; the group product is XOR and every
/// element is its own inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GroupVector(pub u32);

impl GroupVector {
    pub const IDENTITY: GroupVector = GroupVector(0);

    #[inline]
    pub fn combine(self, other: GroupVector) -> GroupVector {
        GroupVector(self.0 ^ other.0)
    }
}

/// Ring shape: group dimension k, degree cap, and the coefficient field.
/// The field degree is pinned to ceil(log2 k) + 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingParams {
    k: u32,
    cap: usize,
    field: FieldParams,
}

impl RingParams {
    pub fn new(k: u32, cap: usize) -> Self {
        assert!((1..=24).contains(&k), "group dimension {k} out of range 1..=24");
        assert!(cap >= 1, "degree cap must be at least 1");
        let field = FieldParams::for_k(k);
        debug_assert_eq!(field.ell(), ceil_log2(k) + 3);
        RingParams { k, cap, field }
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn cap(&self) -> usize {
        self.cap
    }

    #[inline]
    pub fn field(&self) -> FieldParams {
        self.field
    }

    #[inline]
    pub fn group_size(&self) -> usize {
        1 << self.k
    }

    /// Uniform group vector; one u32 draw.
    #[inline]
    pub fn random_vector(&self, rng: &mut impl RngCore) -> GroupVector {
        GroupVector(rng.next_u32() & ((1u32 << self.k) - 1))
    }

    #[inline]
    fn len(&self) -> usize {
        self.group_size() * self.cap
    }
}

/// Dense ring element: `coeff[u * cap + d]` is the GF(2^ell) mask at group
/// vector u and degree d. One byte per coefficient: the supported group
/// dimensions k <= 24 pin the field degree to at most 8.
#[derive(Clone, PartialEq, Eq)]
pub struct RingElement {
    params: RingParams,
    coeff: Vec<u8>,
}

impl std::fmt::Debug for RingElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut entries = f.debug_map();
        for u in 0..self.params.group_size() {
            for d in 0..self.params.cap {
                let c = self.coeff[u * self.params.cap + d];
                if c != 0 {
                    entries.entry(&(u, d), &c);
                }
            }
        }
        entries.finish()
    }
}

impl RingElement {
    pub fn zero(params: RingParams) -> Self {
        RingElement { params, coeff: vec![0; params.len()] }
    }

    /// The multiplicative identity: 1_F at (identity vector, degree 0).
    pub fn one(params: RingParams) -> Self {
        let mut e = Self::zero(params);
        e.coeff[0] = F_ONE.0 as u8;
        e
    }

    #[inline]
    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().all(|&c| c == 0)
    }

    #[inline]
    pub fn get(&self, v: GroupVector, d: usize) -> FieldElement {
        FieldElement(u32::from(self.coeff[v.0 as usize * self.params.cap + d]))
    }

    pub fn set(&mut self, v: GroupVector, d: usize, c: FieldElement) {
        assert!((v.0 as usize) < self.params.group_size() && d < self.params.cap);
        assert!(self.params.field.contains(c));
        self.coeff[v.0 as usize * self.params.cap + d] = c.0 as u8;
    }

    fn assert_same_params(&self, other: &RingElement) {
        assert_eq!(self.params, other.params, "ring params mismatch");
    }

    /// Same group and field; the degree caps may differ.
    fn assert_compatible(&self, other: &RingElement) {
        assert_eq!(self.params.k, other.params.k, "group dimension mismatch");
        assert_eq!(self.params.field, other.params.field, "field mismatch");
    }

    /// Copy into a table with a different degree cap; degrees at or above
    /// the new cap are dropped.
    pub(crate) fn resized(&self, cap: usize) -> RingElement {
        let params = RingParams { cap, ..self.params };
        let mut out = RingElement::zero(params);
        let span = cap.min(self.params.cap);
        for u in 0..self.params.group_size() {
            out.coeff[u * cap..u * cap + span]
                .copy_from_slice(&self.coeff[u * self.params.cap..u * self.params.cap + span]);
        }
        out
    }

    /// Component-wise addition (XOR of coefficient masks).
    pub fn add(&self, other: &RingElement) -> RingElement {
        self.assert_same_params(other);
        let coeff = self
            .coeff
            .iter()
            .zip(&other.coeff)
            .map(|(&a, &b)| a ^ b)
            .collect();
        RingElement { params: self.params, coeff }
    }

    pub fn add_assign(&mut self, other: &RingElement) {
        self.assert_same_params(other);
        for (a, &b) in self.coeff.iter_mut().zip(&other.coeff) {
            *a ^= b;
        }
    }

    /// self += y * z^shift * (1_G + v) * src, truncated at the cap.
    ///
    /// This is the structured product used for every walk step: the result
    /// entry at (u, d) picks up y * (src(u, d-shift) + src(u XOR v, d-shift)).
    pub fn accumulate_monomial(
        &mut self,
        src: &RingElement,
        y: FieldElement,
        v: GroupVector,
        shift: usize,
    ) {
        self.assert_compatible(src);
        let cap = self.params.cap;
        let src_cap = src.params.cap;
        assert!(shift < cap, "degree shift {shift} outside cap {cap}");
        if y.is_zero() {
            return;
        }
        let table = mul_table(self.params.field);
        let gs = self.params.group_size();
        let v = v.0 as usize;
        let span = (cap - shift).min(src_cap);
        for u in 0..gs {
            let a = &src.coeff[u * src_cap..u * src_cap + span];
            let b = &src.coeff[(u ^ v) * src_cap..(u ^ v) * src_cap + span];
            let dst = &mut self.coeff[u * cap + shift..(u + 1) * cap];
            if y == F_ONE {
                for i in 0..span {
                    dst[i] ^= a[i] ^ b[i];
                }
            } else {
                for i in 0..span {
                    let s = a[i] ^ b[i];
                    if s != 0 {
                        dst[i] ^= table.mul(y, FieldElement(u32::from(s))).0 as u8;
                    }
                }
            }
        }
    }

    /// y * z^shift * (1_G + v) * self as a fresh element.
    pub fn mul_monomial(&self, y: FieldElement, v: GroupVector, shift: usize) -> RingElement {
        let mut out = RingElement::zero(self.params);
        out.accumulate_monomial(self, y, v, shift);
        out
    }

    /// self += y * z^shift * src (scalar/degree scaling without a group
    /// factor); used when summing over graph neighbours in circuits.
    pub fn accumulate_scaled(&mut self, src: &RingElement, y: FieldElement, shift: usize) {
        self.assert_compatible(src);
        let cap = self.params.cap;
        let src_cap = src.params.cap;
        assert!(shift < cap, "degree shift {shift} outside cap {cap}");
        if y.is_zero() {
            return;
        }
        let table = mul_table(self.params.field);
        let gs = self.params.group_size();
        let span = (cap - shift).min(src_cap);
        for u in 0..gs {
            let a = &src.coeff[u * src_cap..u * src_cap + span];
            let dst = &mut self.coeff[u * cap + shift..(u + 1) * cap];
            if y == F_ONE {
                for i in 0..span {
                    dst[i] ^= a[i];
                }
            } else {
                for i in 0..span {
                    if a[i] != 0 {
                        dst[i] ^= table.mul(y, FieldElement(u32::from(a[i]))).0 as u8;
                    }
                }
            }
        }
    }

    /// Schoolbook convolution over both dimensions. Quadratic in the table
    /// size; the reference that `mul_fast` must match bit for bit.
    pub fn mul_naive(&self, other: &RingElement) -> RingElement {
        self.assert_same_params(other);
        let cap = self.params.cap;
        let gs = self.params.group_size();
        let table = mul_table(self.params.field);
        let mut out = RingElement::zero(self.params);
        for u1 in 0..gs {
            for d1 in 0..cap {
                let a = self.coeff[u1 * cap + d1];
                if a == 0 {
                    continue;
                }
                let a = FieldElement(u32::from(a));
                for u2 in 0..gs {
                    let row = (u1 ^ u2) * cap;
                    for d2 in 0..cap - d1 {
                        let b = other.coeff[u2 * cap + d2];
                        if b == 0 {
                            continue;
                        }
                        out.coeff[row + d1 + d2] ^= table.mul(a, FieldElement(u32::from(b))).0 as u8;
                    }
                }
            }
        }
        out
    }

    /// Transform-based product, bit-identical to `mul_naive`.
    ///
    /// GF(2^ell) masks are lifted to 0/1 integer coefficients per bit; the
    /// group dimension is handled by an exact integer Walsh-Hadamard
    /// transform (inverse divides by 2^k, exactly), the degree dimension by
    /// truncated schoolbook convolution in the transform domain, and the
    /// bit dimension by carry-full polynomial convolution that is reduced
    /// mod 2 and mod the irreducible polynomial at the end.
    pub fn mul_fast(&self, other: &RingElement) -> RingElement {
        self.assert_same_params(other);
        self.mul_fast_with_cap(other, self.params.cap)
    }

    /// Transform product of operands whose degree caps may differ, with an
    /// explicit cap on the result; agrees entry-wise with the truncated
    /// convolution below every cap involved.
    pub(crate) fn mul_fast_with_cap(&self, other: &RingElement, out_cap: usize) -> RingElement {
        self.assert_compatible(other);
        let k = self.params.k;
        let cap_a = self.params.cap;
        let cap_b = other.params.cap;
        let gs = self.params.group_size();
        let ell = self.params.field.ell() as usize;
        let w_in = ell;
        let w_out = 2 * ell - 1;

        // Magnitudes after the pointwise convolution are bounded by
        // 2^k * 2^k * cap * ell, and the inverse transform accumulates
        // another 2^k factor; insist this fits an i64 accumulator.
        let cap_max = cap_a.max(cap_b).max(out_cap);
        let bits = 3 * k
            + (usize::BITS - cap_max.leading_zeros())
            + (usize::BITS - ell.leading_zeros());
        assert!(bits <= 62, "lifted coefficients would overflow: k={k} cap={cap_max} ell={ell}");

        let lift = |e: &RingElement, cap: usize| -> Vec<i64> {
            let mut out = vec![0i64; gs * cap * w_in];
            for u in 0..gs {
                for d in 0..cap {
                    let mask = e.coeff[u * cap + d];
                    if mask == 0 {
                        continue;
                    }
                    let base = (u * cap + d) * w_in;
                    for t in 0..w_in {
                        out[base + t] = i64::from((mask >> t) & 1);
                    }
                }
            }
            out
        };

        let mut a = lift(self, cap_a);
        let mut b = lift(other, cap_b);
        walsh_hadamard(&mut a, gs, cap_a * w_in);
        walsh_hadamard(&mut b, gs, cap_b * w_in);

        let mut c = vec![0i64; gs * out_cap * w_out];
        for u in 0..gs {
            let ra = &a[u * cap_a * w_in..(u + 1) * cap_a * w_in];
            let rb = &b[u * cap_b * w_in..(u + 1) * cap_b * w_in];
            let rc = &mut c[u * out_cap * w_out..(u + 1) * out_cap * w_out];
            for d1 in 0..cap_a.min(out_cap) {
                for t1 in 0..w_in {
                    let av = ra[d1 * w_in + t1];
                    if av == 0 {
                        continue;
                    }
                    let d2_end = cap_b.min(out_cap - d1);
                    for d2 in 0..d2_end {
                        let dst = (d1 + d2) * w_out + t1;
                        let src = d2 * w_in;
                        for t2 in 0..w_in {
                            rc[dst + t2] += av * rb[src + t2];
                        }
                    }
                }
            }
        }

        walsh_hadamard(&mut c, gs, out_cap * w_out);

        let modpoly = self.params.field.modpoly();
        let mut out = RingElement::zero(RingParams { cap: out_cap, ..self.params });
        let gs_i = gs as i64;
        for u in 0..gs {
            for d in 0..out_cap {
                let base = (u * out_cap + d) * w_out;
                let mut mask = 0u64;
                for t in 0..w_out {
                    let val = c[base + t];
                    assert!(val % gs_i == 0 && val >= 0, "inexact inverse transform");
                    mask |= (((val / gs_i) & 1) as u64) << t;
                }
                out.coeff[u * out_cap + d] = gf2e::poly_mod(mask, modpoly) as u8;
            }
        }
        out
    }

    /// Smallest degree holding any nonzero coefficient, with the witness at
    /// the smallest group-vector mask. `None` for the zero element.
    pub fn min_degree(&self) -> Option<(usize, GroupVector, FieldElement)> {
        let cap = self.params.cap;
        for d in 0..cap {
            for u in 0..self.params.group_size() {
                let c = self.coeff[u * cap + d];
                if c != 0 {
                    return Some((d, GroupVector(u as u32), FieldElement(u32::from(c))));
                }
            }
        }
        None
    }

    /// The sum of all 2^k group vectors, each with coefficient 1; the
    /// signature of a surviving multilinear product.
    pub fn all_vectors_sum(params: RingParams) -> RingElement {
        let mut e = Self::zero(params);
        for u in 0..params.group_size() {
            e.coeff[u * params.cap] = F_ONE.0 as u8;
        }
        e
    }
}

/// In-place Walsh-Hadamard butterflies over the group dimension, applied to
/// whole rows of length `row`. Applying it twice multiplies by 2^k.
fn walsh_hadamard(data: &mut [i64], group_size: usize, row: usize) {
    debug_assert_eq!(data.len(), group_size * row);
    let mut half = 1;
    while half < group_size {
        let mut u = 0;
        while u < group_size {
            for lo in u..u + half {
                let hi = lo + half;
                let (lo_row, hi_row) = data.split_at_mut(hi * row);
                let lo_row = &mut lo_row[lo * row..lo * row + row];
                let hi_row = &mut hi_row[..row];
                for i in 0..row {
                    let x = lo_row[i];
                    let y = hi_row[i];
                    lo_row[i] = x + y;
                    hi_row[i] = x - y;
                }
            }
            u += 2 * half;
        }
        half *= 2;
    }
}

/// The product of (1_G + v) over the given vectors, computed in F[G] (the
/// degree dimension is unused). Equals the all-vectors sum J when the
/// vectors are linearly independent and vanishes when they are dependent.
pub fn product_of_lifted_vectors(k: u32, vs: &[GroupVector]) -> RingElement {
    assert_eq!(vs.len(), k as usize, "expected exactly k vectors");
    let params = RingParams::new(k, 1);
    let mut acc = RingElement::one(params);
    for &v in vs {
        acc = acc.mul_monomial(F_ONE, v, 0);
    }
    acc
}
