//! Small finite fields `F_{p^k}` with discrete-log tables, plus the
//! norm/trace maps of an extension `F_{q^e} / F_q`.
//!
//! Elements are encoded as integers `sum_j c_j p^j`, where `c_j` are the
//! coordinates in the power basis of `F_p[x]/(modulus)`. The class of `x` is
//! a primitive element, so logs are taken to that base.

use crate::error::{Error, Result};
use crate::params::is_prime;

pub const DEFAULT_FIELD_BUDGET: u64 = 1_000_000;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqField {
    p: u64,
    degree: u32,
    size: u64,
    /// Monic primitive modulus, low to high, length `degree + 1`.
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `Tr_{F_q/F_p}` indexed by log.
    trace: Vec<u32>,
}

impl FqField {
    pub fn build(p: u64, degree: u32) -> Result<Self> {
        Self::build_with_budget(p, degree, DEFAULT_FIELD_BUDGET)
    }

    pub fn build_with_budget(p: u64, degree: u32, budget: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        if degree == 0 {
            return Err(Error::Precondition("field degree must be positive".into()));
        }
        let size = p
            .checked_pow(degree)
            .filter(|&q| q <= budget)
            .ok_or_else(|| Error::Resource(format!("F_{{{p}^{degree}}} exceeds the field budget {budget}")))?;

        let (modulus, exp) = if degree == 1 {
            let g = smallest_primitive_root(p);
            let mut exp = Vec::with_capacity(size as usize - 1);
            let mut x = 1u64;
            for _ in 0..size - 1 {
                exp.push(x as u32);
                x = x * g % p;
            }
            (vec![(p - g) % p, 1], exp)
        } else {
            find_primitive(p, degree, size)?
        };

        let mut log = vec![NO_LOG; size as usize];
        for (l, &e) in exp.iter().enumerate() {
            log[e as usize] = l as u32;
        }
        let mut field = Self {
            p,
            degree,
            size,
            modulus,
            exp,
            log,
            trace: Vec::new(),
        };
        field.trace = (0..size - 1)
            .map(|l| {
                let mut acc = 0u64;
                let mut e = l;
                for _ in 0..degree {
                    acc = field.add(acc, field.exp[e as usize] as u64);
                    e = e * p % (size - 1);
                }
                debug_assert!(acc < p, "trace must land in the prime field");
                acc as u32
            })
            .collect();
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn order(&self) -> u64 {
        self.size - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The primitive element (class of `x`).
    pub fn generator(&self) -> u64 {
        self.exp[1 % self.exp.len()] as u64
    }

    pub fn exp(&self, l: u64) -> u64 {
        self.exp[(l % self.order()) as usize] as u64
    }

    pub fn log(&self, x: u64) -> Option<u64> {
        match self.log.get(x as usize) {
            Some(&l) if l != NO_LOG => Some(l as u64),
            _ => None,
        }
    }

    pub fn coords(&self, x: u64) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.degree as usize);
        let mut x = x;
        for _ in 0..self.degree {
            c.push(x % self.p);
            x /= self.p;
        }
        c
    }

    pub fn from_coords(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (p, mut a, mut b) = (self.p, a, b);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.degree {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        let c: Vec<u64> = self.coords(a).iter().map(|&d| (self.p - d) % self.p).collect();
        self.from_coords(&c)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match (self.log(a), self.log(b)) {
            (Some(x), Some(y)) => self.exp(x + y),
            _ => 0,
        }
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        match self.log(a) {
            Some(x) => self.exp((x as u128 * e as u128 % self.order() as u128) as u64),
            None if e == 0 => 1,
            None => 0,
        }
    }

    /// `Tr_{F_q/F_p}(g^l)` as an integer in `[0, p)`.
    pub fn trace_of_log(&self, l: u64) -> u64 {
        self.trace[(l % self.order()) as usize] as u64
    }

    pub fn trace(&self, x: u64) -> u64 {
        self.log(x).map_or(0, |l| self.trace_of_log(l))
    }

    /// Evaluates a polynomial with `F_p` coefficients (low to high) at `x`.
    pub fn eval_prime_poly(&self, coeffs: &[u64], x: u64) -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.add(self.mul(acc, x), c % self.p))
    }
}

fn smallest_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (p - 1) / f, p) != 1))
        .expect("every prime has a primitive root")
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// First monic polynomial (in code order) for which `x` has order `q - 1`.
/// Such a polynomial is automatically irreducible.
fn find_primitive(p: u64, degree: u32, size: u64) -> Result<(Vec<u64>, Vec<u32>)> {
    let deg = degree as usize;
    for code in 1..size {
        let mut low: Vec<u64> = Vec::with_capacity(deg);
        let mut c = code;
        for _ in 0..deg {
            low.push(c % p);
            c /= p;
        }
        if low[0] == 0 {
            continue;
        }
        // x^deg = -sum low_j x^j
        let reduce: Vec<u64> = low.iter().map(|&v| (p - v) % p).collect();
        let mut cur = vec![0u64; deg];
        cur[0] = 1;
        let mut exp = Vec::with_capacity(size as usize - 1);
        let mut ok = true;
        for step in 0..size - 1 {
            let code: u64 = cur.iter().rev().fold(0, |acc, &d| acc * p + d);
            if step > 0 && code == 1 {
                ok = false;
                break;
            }
            exp.push(code as u32);
            let top = cur[deg - 1];
            for j in (1..deg).rev() {
                cur[j] = (cur[j - 1] + top * reduce[j]) % p;
            }
            cur[0] = top * reduce[0] % p;
        }
        if ok && cur.iter().rev().fold(0, |acc, &d| acc * p + d) == 1 {
            let mut modulus = low;
            modulus.push(1);
            return Ok((modulus, exp));
        }
    }
    Err(Error::Geometry(format!("no primitive polynomial of degree {degree} over F_{p}")))
}

/// `F_{q^e}` over `F_q`, with `F_q` embedded by sending the base generator
/// to a fixed root of the base modulus.
#[derive(Debug, Clone)]
pub struct FieldTower {
    pub ext_degree: u32,
    pub ext: FqField,
    base_order: u64,
    /// `(q^e - 1) / (q - 1)`
    cofactor: u64,
    /// `u` with embedded base generator `= G^{cofactor * u}`.
    unit: u64,
    unit_inv: u64,
    norm_log: Vec<u32>,
}

impl FieldTower {
    pub fn new(base: &FqField, ext_degree: u32, budget: u64) -> Result<Self> {
        if ext_degree == 0 {
            return Err(Error::Precondition("extension degree must be positive".into()));
        }
        let ext = FqField::build_with_budget(base.p(), base.degree() * ext_degree, budget)?;
        let base_order = base.order();
        let cofactor = ext.order() / base_order;
        let unit = if ext_degree == 1 || base_order == 1 {
            1
        } else {
            (1..base_order)
                .find(|&u| {
                    let r = ext.exp(cofactor * u);
                    ext.eval_prime_poly(base.modulus(), r) == 0
                })
                .ok_or_else(|| Error::Geometry("base modulus has no root in the extension".into()))?
        };
        let unit_inv = mod_inverse(unit, base_order)
            .ok_or_else(|| Error::Geometry("embedded generator is not primitive".into()))?;
        let norm_log = (0..ext.order())
            .map(|l| ((l as u128 * unit_inv as u128) % base_order as u128) as u32)
            .collect();
        Ok(Self {
            ext_degree,
            ext,
            base_order,
            cofactor,
            unit,
            unit_inv,
            norm_log,
        })
    }

    /// Log (base generator) of `Nm_{F_{q^e}/F_q}(G^l)`.
    pub fn norm_log(&self, l: u64) -> u64 {
        self.norm_log[(l % self.ext.order()) as usize] as u64
    }

    /// Log in the extension of the image of `g^k`.
    pub fn embed_log(&self, k: u64) -> u64 {
        (self.cofactor as u128 * ((k % self.base_order) as u128 * self.unit as u128 % self.base_order as u128)
            % self.ext.order() as u128) as u64
    }

    pub fn cofactor(&self) -> u64 {
        self.cofactor
    }

    pub fn unit_inverse(&self) -> u64 {
        self.unit_inv
    }
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field() {
        let f = FqField::build(5, 1).unwrap();
        assert_eq!(f.generator(), 2);
        assert_eq!(f.order(), 4);
        assert_eq!(f.mul(3, 4), 2);
        assert_eq!(f.trace(3), 3);
        assert_eq!(f.log(0), None);
        assert_eq!(f.eval_prime_poly(f.modulus(), 2), 0);
    }

    #[test]
    fn generator_has_full_order() {
        for (p, k) in [(2, 3), (3, 2), (3, 3), (5, 2), (7, 2), (2, 5)] {
            let f = FqField::build(p, k).unwrap();
            let g = f.generator();
            let mut x = g;
            for i in 1..f.order() {
                assert_ne!(x, 1, "order of generator divides {i}");
                x = f.mul(x, g);
            }
            assert_eq!(x, 1);
            assert_eq!(f.eval_prime_poly(f.modulus(), g), 0);
        }
    }

    #[test]
    fn norm_surjective_f25() {
        let base = FqField::build(5, 1).unwrap();
        let t = FieldTower::new(&base, 2, DEFAULT_FIELD_BUDGET).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for l in 0..t.ext.order() {
            seen.insert(t.norm_log(l));
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn norm_matches_product_of_conjugates() {
        for (p, s, e) in [(3, 1, 3), (5, 1, 2), (2, 2, 2), (3, 2, 2)] {
            let base = FqField::build(p, s).unwrap();
            let t = FieldTower::new(&base, e, DEFAULT_FIELD_BUDGET).unwrap();
            let q = base.size();
            for l in (0..t.ext.order()).step_by(7) {
                let x = t.ext.exp(l);
                let mut nm = 1;
                let mut c = x;
                for _ in 0..e {
                    nm = t.ext.mul(nm, c);
                    c = t.ext.pow(c, q);
                }
                assert_eq!(nm, t.ext.exp(t.embed_log(t.norm_log(l))));
            }
        }
    }

    #[test]
    fn trace_is_linear_and_nonzero() {
        let f = FqField::build(3, 3).unwrap();
        let mut nonzero = false;
        for a in 0..f.size() {
            for b in (0..f.size()).step_by(5) {
                assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % 3);
            }
            nonzero |= f.trace(a) != 0;
        }
        assert!(nonzero);
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(FqField::build_with_budget(7, 4, 1000), Err(Error::Resource(_))));
        assert!(FqField::build(4, 1).is_err());
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(mod_inverse(5, 1), Some(0));
    }
}
