//! Truncated arithmetic in `W = Z_q[pi] / (pi^{p-1} + p)`, `Z_q` the
//! unramified extension of `Z_p` of degree `s`.
//!
//! An element is a grid `c[i][j]` of residues modulo `p^digits`, standing for
//! `sum_{i < p-1} pi^i sum_{j < s} c[i][j] y^j` where `y` is the root of the
//! lifted unramified modulus. All elements are integral, so products keep the
//! smaller absolute precision of their factors.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{mod_inverse, FqField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicRing {
    p: u64,
    s: usize,
    /// Absolute precision in `p`-adic digits.
    digits: u32,
    modulus: u64,
    /// Monic lift of the `F_q` modulus, low to high, length `s + 1`.
    unram: Vec<u64>,
}

/// Largest `p^k` accepted as coefficient modulus; products go through `u128`.
const WORD_LIMIT: u128 = 1 << 63;

impl PadicRing {
    /// `precision_pi` is the `pi`-adic truncation order `M`; it is rounded up
    /// to whole `p`-adic digits.
    pub fn new(p: u64, s: usize, precision_pi: u64, unramified_modulus: &[u64]) -> Result<Arc<Self>> {
        if !crate::params::is_prime(p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        if s == 0 || unramified_modulus.len() != s + 1 || unramified_modulus[s] != 1 {
            return Err(Error::Precondition("unramified modulus must be monic of degree s".into()));
        }
        let e = p - 1;
        let digits = precision_pi.div_ceil(e).max(1) as u32;
        let modulus = (p as u128)
            .checked_pow(digits)
            .filter(|&m| m < WORD_LIMIT)
            .ok_or_else(|| Error::Precision {
                reason: format!("{p}^{digits} does not fit a 63-bit coefficient word"),
                required_pi_digits: precision_pi,
            })? as u64;
        let unram = unramified_modulus.iter().map(|&c| c % modulus).collect();
        Ok(Arc::new(Self {
            p,
            s,
            digits,
            modulus,
            unram,
        }))
    }

    /// Ring whose residue field is `field`, with the unramified modulus
    /// lifted coefficientwise from the field's modulus.
    pub fn for_field(field: &FqField, precision_pi: u64) -> Result<Arc<Self>> {
        Self::new(field.p(), field.degree() as usize, precision_pi, field.modulus())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn ramification(&self) -> usize {
        (self.p - 1) as usize
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn precision_pi(&self) -> u64 {
        self.digits as u64 * (self.p - 1)
    }

    pub fn unramified_modulus(&self) -> &[u64] {
        &self.unram
    }

    fn width(&self) -> usize {
        self.ramification() * self.s
    }

    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.modulus as u128) as u64
    }

    #[inline]
    fn addmod(&self, a: u64, b: u64) -> u64 {
        let (r, carry) = a.overflowing_add(b);
        if carry || r >= self.modulus {
            r.wrapping_sub(self.modulus)
        } else {
            r
        }
    }

    fn reduce_int(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    /// Product in `Z_q`, accumulated into `out` after scaling by `scale`.
    fn zq_mul_acc(&self, a: &[u64], b: &[u64], scale: u64, out: &mut [u64]) {
        let s = self.s;
        if s == 1 {
            out[0] = self.addmod(out[0], self.mulmod(self.mulmod(a[0], b[0]), scale));
            return;
        }
        let mut t = vec![0u64; 2 * s - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                t[i + j] = self.addmod(t[i + j], self.mulmod(x, y));
            }
        }
        // y^s = -sum unram[j] y^j
        for k in (s..2 * s - 1).rev() {
            let top = t[k];
            if top == 0 {
                continue;
            }
            t[k] = 0;
            for j in 0..s {
                let sub = self.mulmod(top, self.unram[j]);
                t[k - s + j] = self.addmod(t[k - s + j], self.modulus - sub);
            }
        }
        for j in 0..s {
            out[j] = self.addmod(out[j], self.mulmod(t[j], scale));
        }
    }

    pub fn zero(self: &Arc<Self>) -> PadicElement {
        PadicElement {
            ring: self.clone(),
            c: vec![0; self.width()],
            digits: self.digits,
        }
    }

    pub fn from_int(self: &Arc<Self>, v: i64) -> PadicElement {
        let mut z = self.zero();
        z.c[0] = self.reduce_int(v as i128);
        z
    }

    pub fn one(self: &Arc<Self>) -> PadicElement {
        self.from_int(1)
    }

    /// The uniformizer, `pi^{p-1} = -p`.
    pub fn pi(self: &Arc<Self>) -> PadicElement {
        if self.p == 2 {
            return self.from_int(-2);
        }
        let mut z = self.zero();
        z.c[self.s] = 1;
        z
    }

    /// Element of `Z_q` with the given coordinates in the basis `y^j`.
    pub fn from_unramified(self: &Arc<Self>, coords: &[u64]) -> PadicElement {
        let mut z = self.zero();
        for (j, &c) in coords.iter().enumerate().take(self.s) {
            z.c[j] = c % self.modulus;
        }
        z
    }

    /// Teichmüller lift of the `F_q` element with code `x` (see
    /// [`FqField`]): the unique `(q-1)`-th root of unity reducing to `x`.
    pub fn teichmuller(self: &Arc<Self>, field: &FqField, x: u64) -> Result<PadicElement> {
        if field.p() != self.p || field.degree() as usize != self.s {
            return Err(Error::RingMismatch);
        }
        if x == 0 {
            return Ok(self.zero());
        }
        let q = field.size();
        let mut t = self.from_unramified(&field.coords(x));
        for _ in 0..self.digits + 2 {
            let next = t.pow(q);
            if next == t {
                return Ok(t);
            }
            t = next;
        }
        Err(Error::Geometry("Teichmüller iteration did not stabilize".into()))
    }

    /// The primitive `p`-th root of unity congruent to `1 + pi` mod `pi^2`.
    pub fn zeta_p(self: &Arc<Self>) -> Result<PadicElement> {
        let p = self.p;
        if p == 2 {
            return Ok(self.from_int(-1));
        }
        // zeta = 1 + pi u; dividing ((1+pi u)^p - 1)/(pi u) by p gives
        // h(u) = 1 - u^{p-1} + sum_{k=2}^{p-1} (C(p,k)/p) pi^{k-1} u^{k-1},
        // whose derivative is a unit at u = 1.
        let pi = self.pi();
        let mut coef = Vec::with_capacity(p as usize);
        let mut binom: u128 = 1;
        for k in 1..p {
            binom = binom * (p - k + 1) as u128 / k as u128;
            if k >= 2 {
                coef.push(((binom / p as u128) % self.modulus as u128) as u64);
            }
        }
        let pi_pow: Vec<PadicElement> = {
            let mut v = vec![self.one()];
            for _ in 1..p {
                let next = v.last().unwrap().mul_unchecked(&pi);
                v.push(next);
            }
            v
        };
        let eval = |u: &PadicElement| -> (PadicElement, PadicElement) {
            let mut h = self.one().sub_unchecked(&u.pow(p - 1));
            let mut dh = u.pow(p - 2).scale_int(-((p - 1) as i64));
            for (idx, &c) in coef.iter().enumerate() {
                let k = idx as u64 + 2;
                let term = pi_pow[(k - 1) as usize].scale_u64(c);
                h = h.add_unchecked(&term.mul_unchecked(&u.pow(k - 1)));
                dh = dh.add_unchecked(&term.mul_unchecked(&u.pow(k - 2)).scale_u64(k - 1));
            }
            (h, dh)
        };
        let mut u = self.one();
        for _ in 0..64 {
            let (h, dh) = eval(&u);
            if h.is_zero() {
                return Ok(self.one().add_unchecked(&pi.mul_unchecked(&u)));
            }
            u = u.sub_unchecked(&h.mul_unchecked(&dh.unit_inverse()?));
        }
        Err(Error::Geometry("Hensel lifting of zeta_p did not converge".into()))
    }
}

#[derive(Clone)]
pub struct PadicElement {
    ring: Arc<PadicRing>,
    c: Vec<u64>,
    digits: u32,
}

impl PartialEq for PadicElement {
    /// Equality to the common precision.
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.sub_unchecked(other).is_zero()
    }
}

impl fmt::Debug for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadicElement(p={}, s={}, digits={}, {:?})", self.ring.p, self.ring.s, self.digits, self.pi_coeffs())
    }
}

/// Wire form of an element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PadicJson {
    pub pi_coeffs: Vec<Vec<u64>>,
    pub precision: u64,
}

impl PadicElement {
    pub fn ring(&self) -> &Arc<PadicRing> {
        &self.ring
    }

    /// Absolute precision in `p`-adic digits.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    fn modulus(&self) -> u64 {
        self.ring.p.pow(self.digits)
    }

    /// `c[i][j]` reduced to the element's own precision.
    pub fn pi_coeffs(&self) -> Vec<Vec<u64>> {
        let md = self.modulus();
        self.c
            .chunks(self.ring.s)
            .map(|row| row.iter().map(|&x| x % md).collect())
            .collect()
    }

    pub fn to_json(&self) -> PadicJson {
        PadicJson {
            pi_coeffs: self.pi_coeffs(),
            precision: self.digits as u64 * (self.ring.p - 1),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn neg(&self) -> Self {
        let r = &self.ring;
        Self {
            ring: r.clone(),
            c: self.c.iter().map(|&x| if x == 0 { 0 } else { r.modulus - x }).collect(),
            digits: self.digits,
        }
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let r = &self.ring;
        Self {
            ring: r.clone(),
            c: self.c.iter().zip(&other.c).map(|(&a, &b)| r.addmod(a, b)).collect(),
            digits: self.digits.min(other.digits),
        }
    }

    pub(crate) fn sub_unchecked(&self, other: &Self) -> Self {
        self.add_unchecked(&other.neg())
    }

    /// `self += k * other` in place, for a machine integer `k`.
    pub fn add_scaled_assign(&mut self, other: &Self, k: i64) {
        let r = &self.ring;
        let k = r.reduce_int(k as i128);
        if k == 0 {
            return;
        }
        for (a, &b) in self.c.iter_mut().zip(&other.c) {
            *a = r.addmod(*a, r.mulmod(b, k));
        }
        self.digits = self.digits.min(other.digits);
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale_u64(self.ring.reduce_int(k as i128))
    }

    fn scale_u64(&self, k: u64) -> Self {
        let r = &self.ring;
        Self {
            ring: r.clone(),
            c: self.c.iter().map(|&a| r.mulmod(a, k % r.modulus)).collect(),
            digits: self.digits,
        }
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let r = &self.ring;
        let (e, s) = (r.ramification(), r.s);
        let mut out = vec![0u64; e * s];
        let minus_p = r.modulus - r.p % r.modulus;
        for i in 0..e {
            let a = &self.c[i * s..(i + 1) * s];
            if a.iter().all(|&x| x == 0) {
                continue;
            }
            for k in 0..e {
                let b = &other.c[k * s..(k + 1) * s];
                if b.iter().all(|&x| x == 0) {
                    continue;
                }
                let (idx, scale) = if i + k >= e { (i + k - e, minus_p) } else { (i + k, 1) };
                r.zq_mul_acc(a, b, scale, &mut out[idx * s..(idx + 1) * s]);
            }
        }
        Self {
            ring: r.clone(),
            c: out,
            digits: self.digits.min(other.digits),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        acc.digits = self.digits;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Zero to the element's precision.
    pub fn is_zero(&self) -> bool {
        let md = self.modulus();
        self.c.iter().all(|&x| x % md == 0)
    }

    /// `pi`-adic valuation, `None` if the element vanishes to precision.
    pub fn ord_pi(&self) -> Option<u64> {
        let r = &self.ring;
        let e = r.ramification() as u64;
        let md = self.modulus();
        (0..r.ramification())
            .filter_map(|i| {
                let v = r.c_valuation(&self.c[i * r.s..(i + 1) * r.s], md, self.digits)?;
                Some(i as u64 + e * v as u64)
            })
            .min()
    }

    /// `ord_q = ord_pi / (s (p - 1))`.
    pub fn ord_q(&self) -> Result<Ratio<BigInt>> {
        let r = &self.ring;
        let v = self.ord_pi().ok_or_else(|| Error::Precision {
            reason: "element vanishes to working precision".into(),
            required_pi_digits: 2 * r.precision_pi(),
        })?;
        Ok(Ratio::new(
            BigInt::from(v),
            BigInt::from(r.s as u64 * (r.p - 1)),
        ))
    }

    /// Lower bound on `ord_q` implied by the precision when the element
    /// vanishes.
    pub fn ord_q_floor(&self) -> Ratio<BigInt> {
        Ratio::new(BigInt::from(self.digits), BigInt::from(self.ring.s as u64))
    }

    /// Exact division by a nonzero integer `k = p^v u`: requires divisibility
    /// by `p^v` and loses `v` digits.
    pub fn div_int(&self, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let r = &self.ring;
        let (mut v, mut u) = (0u32, k);
        while u % r.p == 0 {
            u /= r.p;
            v += 1;
        }
        if v >= self.digits {
            return Err(Error::Precision {
                reason: format!("dividing by {k} exhausts all {} digits", self.digits),
                required_pi_digits: (self.digits + 2 * v) as u64 * (r.p - 1),
            });
        }
        let pv = r.p.pow(v);
        let md = self.modulus();
        if self.c.iter().any(|&x| (x % md) % pv != 0) {
            return Err(Error::Domain(format!("element is not divisible by {k}")));
        }
        let digits = self.digits - v;
        let new_md = r.p.pow(digits);
        let u_inv = mod_inverse(u % new_md, new_md).expect("unit modulo p^k");
        let c = self
            .c
            .iter()
            .map(|&x| ((x % md) / pv) as u128 * u_inv as u128 % new_md as u128)
            .map(|x| x as u64)
            .collect();
        Ok(Self {
            ring: r.clone(),
            c,
            digits,
        })
    }

    /// Inverse of a unit by Newton iteration `x <- x (2 - a x)`.
    pub fn unit_inverse(&self) -> Result<Self> {
        if self.ord_pi() != Some(0) {
            return Err(Error::Domain("element is not a unit".into()));
        }
        let q = self.ring.p.pow(self.ring.s as u32);
        // a^{q-2} inverts the residue in F_q
        let mut x = self.pow(q - 2);
        let two = self.ring.from_int(2);
        for _ in 0..64 {
            let next = x.mul_unchecked(&two.sub_unchecked(&self.mul_unchecked(&x)));
            if next == x {
                return Ok(next);
            }
            x = next;
        }
        Err(Error::Geometry("unit inversion did not converge".into()))
    }

    /// Symmetric integer representative of the `pi^0, y^0` coefficient when
    /// the element lies in `Z_p`.
    pub fn as_int(&self) -> Option<i128> {
        let md = self.modulus();
        if self.c.iter().skip(1).any(|&x| x % md != 0) {
            return None;
        }
        let v = (self.c[0] % md) as i128;
        Some(if v > md as i128 / 2 { v - md as i128 } else { v })
    }
}

impl PadicRing {
    /// `min_j v_p(c_j)` for a `Z_q` coefficient, `None` if all vanish.
    fn c_valuation(&self, c: &[u64], md: u64, digits: u32) -> Option<u32> {
        c.iter()
            .filter_map(|&x| {
                let mut x = x % md;
                if x == 0 {
                    return None;
                }
                let mut v = 0;
                while x % self.p == 0 && v < digits {
                    x /= self.p;
                    v += 1;
                }
                Some(v)
            })
            .min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn ring(p: u64, pi_prec: u64) -> Arc<PadicRing> {
        let f = FqField::build(p, 1).unwrap();
        PadicRing::for_field(&f, pi_prec).unwrap()
    }

    fn q(a: i64, b: i64) -> Ratio<BigInt> {
        Ratio::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn defining_relation() {
        for p in [2, 3, 5, 7, 13] {
            let r = ring(p, 40);
            let pi = r.pi();
            assert_eq!(pi.pow(p - 1), r.from_int(-(p as i64)));
            assert_eq!(pi.mul(&pi.pow(p - 2)).unwrap().as_int(), Some(-(p as i128)));
            assert_eq!(pi.ord_q().unwrap(), q(1, p as i64 - 1));
            assert_eq!(r.from_int(p as i64).ord_q().unwrap(), q(1, 1));
        }
    }

    #[test]
    fn identities() {
        let r = ring(5, 20);
        let a = r.pi().add(&r.from_int(3)).unwrap();
        assert_eq!(a.add(&r.zero()).unwrap(), a);
        assert_eq!(a.mul(&r.one()).unwrap(), a);
        assert!(a.sub(&a).unwrap().is_zero());
        assert_eq!(a.neg().add(&a).unwrap(), r.zero());
    }

    #[test]
    fn binomial_expansion_p3() {
        // (1+pi)^3 = 1 + 3pi + 3pi^2 + pi^3 with pi^2 = -3:
        // = 1 + 3pi - 9 - 3pi = -8
        let r = ring(3, 12);
        let x = r.one().add(&r.pi()).unwrap().pow(3);
        assert_eq!(x.as_int(), Some(-8));
    }

    #[test]
    fn ring_mismatch() {
        let a = ring(5, 20).one();
        let b = ring(7, 24).one();
        assert_eq!(a.add(&b).unwrap_err(), Error::RingMismatch);
        assert_eq!(a.mul(&b).unwrap_err(), Error::RingMismatch);
    }

    #[test]
    fn zeta_p_properties() {
        for p in [2, 3, 5, 7, 11, 13] {
            let r = ring(p, 8 * (p - 1));
            let z = r.zeta_p().unwrap();
            assert_eq!(z.pow(p), r.one());
            assert_ne!(z, r.one());
            let mut total = r.zero();
            for t in 0..p {
                total = total.add(&z.pow(t)).unwrap();
            }
            assert!(total.is_zero());
            let diff = z.sub(&r.one()).unwrap();
            assert_eq!(diff.ord_q().unwrap(), q(1, p as i64 - 1));
            if p > 2 {
                // zeta = 1 + pi mod pi^2
                let rest = diff.sub(&r.pi()).unwrap();
                assert!(rest.ord_pi().unwrap() >= 2);
            }
        }
    }

    #[test]
    fn teichmuller_prime_field() {
        let f = FqField::build(5, 1).unwrap();
        let r = PadicRing::for_field(&f, 40).unwrap();
        assert_eq!(r.teichmuller(&f, 1).unwrap(), r.one());
        let t2 = r.teichmuller(&f, 2).unwrap();
        assert_eq!(t2.pow(4), r.one());
        assert_eq!(t2.as_int().unwrap().rem_euclid(5), 2);
        let t4 = r.teichmuller(&f, 4).unwrap();
        assert_eq!(t4, r.from_int(-1));
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        for (p, s) in [(2, 3), (3, 2), (5, 2), (7, 2), (3, 3)] {
            let f = FqField::build(p, s).unwrap();
            let r = PadicRing::for_field(&f, 6 * (p - 1)).unwrap();
            let lifts: Vec<_> = (0..f.size()).map(|x| r.teichmuller(&f, x).unwrap()).collect();
            for x in 1..f.size() {
                assert_eq!(lifts[x as usize].pow(f.order()), r.one());
                for y in (1..f.size()).step_by(3) {
                    let xy = f.mul(x, y);
                    assert_eq!(
                        lifts[x as usize].mul(&lifts[y as usize]).unwrap(),
                        lifts[xy as usize],
                        "p={p} s={s} x={x} y={y}"
                    );
                }
            }
        }
    }

    #[test]
    fn division_and_inverse() {
        let r = ring(5, 40);
        let x = r.from_int(50);
        let y = x.div_int(10).unwrap();
        assert_eq!(y.as_int(), Some(5));
        assert_eq!(y.digits(), r.digits() - 1);
        assert!(r.from_int(3).div_int(5).is_err());
        let u = r.from_int(3).add(&r.pi()).unwrap();
        let inv = u.unit_inverse().unwrap();
        assert_eq!(u.mul(&inv).unwrap(), r.one());
        assert!(r.pi().unit_inverse().is_err());
    }

    #[test]
    fn zero_has_no_valuation() {
        let r = ring(7, 30);
        assert!(r.zero().ord_pi().is_none());
        assert!(matches!(r.zero().ord_q(), Err(Error::Precision { .. })));
        assert!(!r.zero().ord_q_floor().is_zero());
    }

    #[test]
    fn precision_overflow_rejected() {
        assert!(matches!(
            PadicRing::new(13, 1, 12 * 40, &[11, 1]),
            Err(Error::Precision { .. })
        ));
    }

    #[test]
    fn json_shape() {
        let r = ring(3, 8);
        let j = r.pi().to_json();
        assert_eq!(j.pi_coeffs, vec![vec![0], vec![1]]);
        assert_eq!(j.precision, 8);
    }
}
