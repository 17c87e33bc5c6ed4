//! Hypergeometric character sums over `F_{q^e}`.
//!
//! Sums are accumulated exactly in the group ring `Z[mu_p x mu_{q-1}]`: a
//! term `psi(t) omega(g)^e` adds one to the coefficient at `(t, e)`. The
//! p-adic value is obtained by a single evaluation
//! `sum c[t][e] zeta_p^t T^e`, `T` the Teichmüller lift of the generator of
//! `F_q`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldTower, FqField, DEFAULT_FIELD_BUDGET};
use crate::hodge::theta;
use crate::padic::{PadicElement, PadicRing};
use crate::params::CharParams;
use crate::scalar::Scalar;
use crate::Rational;

/// Default cap on enumerated terms in [`hyp_sum`].
pub const DEFAULT_SUM_BUDGET: u64 = 50_000_000;

/// Cap on coefficient additions for the all-points convolution.
pub const DEFAULT_KERNEL_BUDGET: u64 = 1 << 32;

/// Integer coefficients on `mu_p x mu_{q-1}`, row-major in `(t, e)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupRingSum {
    p: u64,
    order: u64,
    coeffs: Vec<i64>,
}

impl GroupRingSum {
    pub fn zero(p: u64, order: u64) -> Self {
        Self {
            p,
            order,
            coeffs: vec![0; (p * order) as usize],
        }
    }

    /// Multiplicative order `q - 1` of the Teichmüller part.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeff(&self, t: u64, e: u64) -> i64 {
        self.coeffs[self.idx(t, e)]
    }

    #[inline]
    fn idx(&self, t: u64, e: u64) -> usize {
        ((t % self.p) * self.order + e % self.order) as usize
    }

    pub fn add_term(&mut self, t: u64, e: u64, c: i64) {
        let i = self.idx(t, e);
        self.coeffs[i] += c;
    }

    /// Sum of the absolute values of the coefficients.
    pub fn l1_norm(&self) -> u64 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            ..self.clone()
        }
    }

    /// Product in the group ring.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.p, self.order);
        for t1 in 0..self.p {
            for e1 in 0..self.order {
                let c1 = self.coeff(t1, e1);
                if c1 == 0 {
                    continue;
                }
                for t2 in 0..self.p {
                    for e2 in 0..self.order {
                        let c2 = other.coeff(t2, e2);
                        if c2 != 0 {
                            out.add_term(t1 + t2, e1 + e2, c1 * c2);
                        }
                    }
                }
            }
        }
        out
    }

    /// Nonzero coefficients as `(t, e, c)`.
    pub fn terms(&self) -> Vec<(u64, u64, i64)> {
        let mut out = Vec::new();
        for t in 0..self.p {
            for e in 0..self.order {
                let c = self.coeff(t, e);
                if c != 0 {
                    out.push((t, e, c));
                }
            }
        }
        out
    }

    /// Image under `zeta_p -> exp(2 pi i / p)`, `T -> exp(2 pi i / (q-1))`.
    pub fn to_complex(&self) -> Complex64 {
        let tau = std::f64::consts::TAU;
        self.terms()
            .into_iter()
            .map(|(t, e, c)| {
                let angle = tau * (t as f64 / self.p as f64 + e as f64 / self.order as f64);
                Complex64::from_polar(c as f64, angle)
            })
            .sum()
    }
}

/// A computed sum: its p-adic value and, when available, the exact
/// group-ring form it was evaluated from.
#[derive(Debug, Clone)]
pub struct SumValue {
    pub padic: PadicElement,
    pub group_ring: Option<GroupRingSum>,
}

impl SumValue {
    pub fn ord_q(&self) -> Result<Rational> {
        self.padic.ord_q()
    }
}

/// Field tables and p-adic constants shared by every sum for one
/// [`CharParams`].
#[derive(Debug)]
pub struct SumContext {
    cp: CharParams,
    field: FqField,
    ring: Arc<PadicRing>,
    zeta_pows: Vec<PadicElement>,
    teich_pows: Vec<PadicElement>,
    field_budget: u64,
}

/// Default pi-adic precision `s (p - 1) (ceil(sum theta) + n + 2 + 2 v_p(n!))`.
///
/// The last term pays for the divisions in Newton's identities when `p <= n`.
pub fn default_precision(cp: &CharParams) -> u64 {
    let params = cp.hyp_params::<Rational>();
    let total: Rational = theta(&params).iter().cloned().sum();
    let ceil = -((-total).floor_val());
    let ceil = ceil.numer_i64().unwrap_or(0).max(0) as u64;
    let n = cp.n() as u64;
    let mut vp_fact = 0;
    let mut pk = cp.p;
    while pk <= n {
        vp_fact += n / pk;
        pk *= cp.p;
    }
    cp.s as u64 * (cp.p - 1) * (ceil + n + 2 + 2 * vp_fact)
}

impl SumContext {
    /// `precision_pi` defaults to [`default_precision`].
    pub fn new(cp: &CharParams, precision_pi: Option<u64>) -> Result<Self> {
        Self::with_budget(cp, precision_pi, DEFAULT_FIELD_BUDGET)
    }

    pub fn with_budget(cp: &CharParams, precision_pi: Option<u64>, field_budget: u64) -> Result<Self> {
        let field = FqField::build_with_budget(cp.p, cp.s, field_budget)?;
        let precision = precision_pi.unwrap_or_else(|| default_precision(cp));
        let ring = PadicRing::for_field(&field, precision)?;
        let zeta = ring.zeta_p()?;
        let mut zeta_pows = vec![ring.one()];
        for _ in 1..cp.p {
            let next = zeta_pows.last().unwrap().mul_unchecked(&zeta);
            zeta_pows.push(next);
        }
        let t = ring.teichmuller(&field, field.generator())?;
        let mut teich_pows = vec![ring.one()];
        for _ in 1..field.order() {
            let next = teich_pows.last().unwrap().mul_unchecked(&t);
            teich_pows.push(next);
        }
        Ok(Self {
            cp: cp.clone(),
            field,
            ring,
            zeta_pows,
            teich_pows,
            field_budget,
        })
    }

    pub fn params(&self) -> &CharParams {
        &self.cp
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn ring(&self) -> &Arc<PadicRing> {
        &self.ring
    }

    pub fn zeta_p(&self) -> &PadicElement {
        &self.zeta_pows[1 % self.zeta_pows.len()]
    }

    /// `omega(g)^e` for the field generator `g`.
    pub fn teichmuller_power(&self, e: u64) -> &PadicElement {
        &self.teich_pows[(e % self.field.order()) as usize]
    }

    /// `psi(t) = zeta_p^t`.
    pub fn psi(&self, t: u64) -> &PadicElement {
        &self.zeta_pows[(t % self.cp.p) as usize]
    }

    pub fn tower(&self, ext: u32) -> Result<FieldTower> {
        FieldTower::new(&self.field, ext, self.field_budget)
    }

    pub fn evaluate(&self, g: &GroupRingSum) -> PadicElement {
        let mut total = self.ring.zero();
        for t in 0..g.p {
            let mut inner = self.ring.zero();
            let mut any = false;
            for e in 0..g.order {
                let c = g.coeff(t, e);
                if c != 0 {
                    inner.add_scaled_assign(&self.teich_pows[e as usize], c);
                    any = true;
                }
            }
            if any {
                total = total.add_unchecked(&inner.mul_unchecked(&self.zeta_pows[t as usize]));
            }
        }
        total
    }

    fn value(&self, g: GroupRingSum) -> SumValue {
        SumValue {
            padic: self.evaluate(&g),
            group_ring: Some(g),
        }
    }

    /// Discrete log of a nonzero point of `F_q`.
    fn point_log(&self, a: u64) -> Result<u64> {
        if a >= self.field.size() {
            return Err(Error::Domain(format!("{a} is not an element of F_{}", self.field.size())));
        }
        self.field
            .log(a)
            .ok_or_else(|| Error::Domain("the point a must be nonzero".into()))
    }
}

/// Gauss sum `sum_{x in F_q^x} psi(Tr x) omega^{-k}(x)` in group-ring form.
pub fn gauss_sum_group_ring(field: &FqField, k: u64) -> GroupRingSum {
    let order = field.order();
    let mut g = GroupRingSum::zero(field.p(), order);
    let neg = (order - k % order) % order;
    for l in 0..order {
        g.add_term(field.trace_of_log(l), (neg as u128 * l as u128 % order as u128) as u64, 1);
    }
    g
}

/// Gauss sum `G(psi, omega^{-k})` over `F_q` evaluated in `W`.
pub fn gauss_sum(ctx: &SumContext, k: u64) -> SumValue {
    ctx.value(gauss_sum_group_ring(&ctx.field, k))
}

/// Gauss sum over `F_{q^e}` of the character `omega^{c} o Nm`, as a group
/// ring element over `F_q`: `sum_x psi(Tr x) omega^c(Nm x)`.
fn lifted_gauss_group_ring(tower: &FieldTower, p: u64, order: u64, c: u64) -> GroupRingSum {
    let mut g = GroupRingSum::zero(p, order);
    for l in 0..tower.ext.order() {
        let e = c as u128 * tower.norm_log(l) as u128 % order as u128;
        g.add_term(tower.ext.trace_of_log(l), e as u64, 1);
    }
    g
}

/// Direct evaluation of
/// `sum_{x_1...x_n = a y_1...y_m} psi(Tr(sum x - sum y)) prod omega^{a_i}(Nm x_i) prod omega^{-b_j}(Nm y_j)`
/// over `F_{q^ext}`, eliminating `x_1`.
pub fn hyp_sum(ctx: &SumContext, a: u64, ext: u32) -> Result<SumValue> {
    hyp_sum_with_budget(ctx, a, ext, DEFAULT_SUM_BUDGET)
}

pub fn hyp_sum_with_budget(ctx: &SumContext, a: u64, ext: u32, budget: u64) -> Result<SumValue> {
    let g = hyp_sum_group_ring(ctx, a, ext, budget)?;
    Ok(ctx.value(g))
}

fn hyp_sum_group_ring(ctx: &SumContext, a: u64, ext: u32, budget: u64) -> Result<GroupRingSum> {
    let log_a = ctx.point_log(a)?;
    brute_force(&ctx.cp, &ctx.tower(ext)?, log_a, budget)
}

fn brute_force(cp: &CharParams, tower: &FieldTower, log_a: u64, budget: u64) -> Result<GroupRingSum> {
    let big = tower.ext.order();
    let free = cp.n() + cp.m() - 1;
    let terms = (big as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
    if terms > budget as u128 {
        return Err(Error::Resource(format!(
            "{terms} terms exceed the enumeration budget {budget}"
        )));
    }
    let p = cp.p;
    let order = cp.q() - 1;
    let target = tower.embed_log(log_a);
    // free variables: x_2..x_n then y_1..y_m, each a log in [0, big)
    let mut weights: Vec<(u64, bool)> = cp.a_exps[1..].iter().map(|&c| (c, true)).collect();
    weights.extend(cp.b_exps.iter().map(|&c| (c, false)));
    let a1 = cp.a_exps[0];

    let outer = if free == 0 { 1 } else { big };
    let partials: Vec<GroupRingSum> = (0..outer)
        .into_par_iter()
        .map(|first| {
            let mut acc = GroupRingSum::zero(p, order);
            let mut logs = vec![0u64; free];
            if free > 0 {
                logs[0] = first;
            }
            loop {
                // x_1 = a prod y / prod_{i>=2} x_i
                let mut l1 = target as i128;
                let mut tr = 0u64;
                let mut e = 0u128;
                for (k, &l) in logs.iter().enumerate() {
                    let (c, is_x) = weights[k];
                    let nl = tower.norm_log(l) as u128;
                    let t = tower.ext.trace_of_log(l);
                    if is_x {
                        l1 -= l as i128;
                        tr += t;
                        e += c as u128 * nl;
                    } else {
                        l1 += l as i128;
                        tr += p - t;
                        e += (order as u128 - c as u128 % order as u128) * nl;
                    }
                }
                let l1 = l1.rem_euclid(big as i128) as u64;
                tr += tower.ext.trace_of_log(l1);
                e += a1 as u128 * tower.norm_log(l1) as u128;
                acc.add_term(tr, (e % order as u128) as u64, 1);
                // odometer over logs[1..]
                let mut k = 1;
                while k < free {
                    logs[k] += 1;
                    if logs[k] < big {
                        break;
                    }
                    logs[k] = 0;
                    k += 1;
                }
                if k >= free {
                    break;
                }
            }
            acc
        })
        .collect();
    Ok(partials
        .into_iter()
        .reduce(|x, y| x.add(&y))
        .unwrap_or_else(|| GroupRingSum::zero(p, order)))
}

/// State of the convolution kernel: for every target log `L` in
/// `F_{q^e}^x`, a group-ring element.
struct FiberTable {
    rows: Vec<Vec<i64>>,
}

/// All fibers at once: entry `k` is the sum at `a = g^k` over `F_{q^ext}`.
///
/// The constraint set is a fiber of the map `(x, y) -> prod x / prod y`, so
/// the sums for all `a` together form a convolution over the cyclic group
/// `F_{q^ext}^x`, computed one variable at a time. Agrees with [`hyp_sum`]
/// term by term.
pub fn hyp_sums_all_points(ctx: &SumContext, ext: u32) -> Result<Vec<SumValue>> {
    let groups = hyp_sums_all_points_group_ring(ctx, ext)?;
    Ok(groups.into_par_iter().map(|g| ctx.value(g)).collect())
}

pub fn hyp_sums_all_points_group_ring(ctx: &SumContext, ext: u32) -> Result<Vec<GroupRingSum>> {
    let tower = ctx.tower(ext)?;
    let big = tower.ext.order() as usize;
    let p = ctx.cp.p;
    let order = ctx.field.order();
    let width = (p * order) as usize;
    let factors_count = (ctx.cp.n() + ctx.cp.m()).saturating_sub(2) as u128;
    let work = factors_count * (big as u128) * (big as u128) * width as u128;
    if work > DEFAULT_KERNEL_BUDGET as u128 {
        return Err(Error::Resource(format!(
            "convolution over F_{}^x needs {work} additions, budget is {DEFAULT_KERNEL_BUDGET}",
            tower.ext.size()
        )));
    }
    // factor tables: (trace, character exponent) of each variable value
    let factor = |c: u64, inverse: bool| -> Vec<(usize, usize)> {
        (0..big as u64)
            .map(|l| {
                let t = tower.ext.trace_of_log(l);
                let e = c as u128 * tower.norm_log(l) as u128 % order as u128;
                if inverse {
                    (((p - t) % p) as usize, ((order as u128 - e) % order as u128) as usize)
                } else {
                    (t as usize, e as usize)
                }
            })
            .collect()
    };
    let mut factors: Vec<(Vec<(usize, usize)>, bool)> = Vec::new();
    for &c in &ctx.cp.a_exps[1..] {
        factors.push((factor(c, false), false));
    }
    for &c in &ctx.cp.b_exps {
        factors.push((factor(c, true), true));
    }
    let first = factor(ctx.cp.a_exps[0], false);
    let mut table = FiberTable {
        rows: (0..big)
            .map(|l| {
                let mut row = vec![0i64; width];
                let (t, e) = first[l];
                row[t * order as usize + e] = 1;
                row
            })
            .collect(),
    };
    let targets: Vec<usize> = (0..order).map(|k| tower.embed_log(k) as usize).collect();
    let count = factors.len();
    for (idx, (f, inverse)) in factors.iter().enumerate() {
        let last = idx + 1 == count;
        let wanted: Vec<usize> = if last { targets.clone() } else { (0..big).collect() };
        let rows: Vec<Vec<i64>> = wanted
            .par_iter()
            .map(|&target| {
                let mut out = vec![0i64; width];
                for (l, &(dt, de)) in f.iter().enumerate() {
                    // x-variables multiply the running product, y-variables divide it
                    let src = if *inverse { (target + l) % big } else { (target + big - l) % big };
                    shift_add(&table.rows[src], &mut out, dt, de, p as usize, order as usize);
                }
                out
            })
            .collect();
        table = if last {
            let mut full = vec![Vec::new(); big];
            for (row, &t) in rows.into_iter().zip(&targets) {
                full[t] = row;
            }
            FiberTable { rows: full }
        } else {
            FiberTable { rows }
        };
    }
    Ok(targets
        .iter()
        .map(|&t| GroupRingSum {
            p,
            order,
            coeffs: table.rows[t].clone(),
        })
        .collect())
}

/// `out[(t + dt, e + de)] += src[(t, e)]`, cyclically.
#[inline]
fn shift_add(src: &[i64], out: &mut [i64], dt: usize, de: usize, p: usize, order: usize) {
    for t in 0..p {
        let s_row = &src[t * order..(t + 1) * order];
        let t2 = (t + dt) % p;
        let o_row = &mut out[t2 * order..(t2 + 1) * order];
        let split = order - de;
        for (o, s) in o_row[de..].iter_mut().zip(&s_row[..split]) {
            *o += s;
        }
        for (o, s) in o_row[..de].iter_mut().zip(&s_row[split..]) {
            *o += s;
        }
    }
}

/// Both sides of the resonant decomposition
/// `CHyp_{(n,m)}(a) = Q CHyp_{(n-1,m-1)}(a) - prod_j rho_j(-1) prod_{i<n} G(chi_i) prod_{j<m} G(rho_j^{-1})`
/// over `F_Q`, `Q = q^ext`, where one `chi` and one `rho` are trivial.
#[derive(Debug, Clone)]
pub struct ResonantSides {
    pub lhs: GroupRingSum,
    pub rhs: GroupRingSum,
}

pub fn resonant_sides(ctx: &SumContext, a: u64, ext: u32) -> Result<ResonantSides> {
    resonant_sides_signed(ctx, a, ext, false)
}

/// `parity_sign` replaces the character sign by `(-1)^{m-1}`; kept to show
/// that variant fails.
fn resonant_sides_signed(ctx: &SumContext, a: u64, ext: u32, parity_sign: bool) -> Result<ResonantSides> {
    let cp = &ctx.cp;
    let (n, m) = (cp.n(), cp.m());
    if m == 0 || n < 2 {
        return Err(Error::Precondition("resonant decomposition needs n >= 2 and m >= 1".into()));
    }
    let ia = cp.a_exps.iter().position(|&e| e == 0);
    let ib = cp.b_exps.iter().position(|&e| e == 0);
    let (Some(ia), Some(ib)) = (ia, ib) else {
        return Err(Error::Precondition(
            "resonant decomposition needs a trivial chi and a trivial rho".into(),
        ));
    };
    let mut a_rest = cp.a_exps.clone();
    a_rest.remove(ia);
    let mut b_rest = cp.b_exps.clone();
    b_rest.remove(ib);
    let log_a = ctx.point_log(a)?;
    let tower = ctx.tower(ext)?;
    let lhs = brute_force(cp, &tower, log_a, DEFAULT_SUM_BUDGET)?;
    let reduced = CharParams::new(cp.p, cp.s, a_rest.clone(), b_rest.clone())?;
    let inner = brute_force(&reduced, &tower, log_a, DEFAULT_SUM_BUDGET)?;

    let order = ctx.field.order();
    let big_q = tower.ext.size() as i64;
    let mut product = GroupRingSum::zero(cp.p, order);
    product.add_term(0, 0, 1);
    for &c in &a_rest {
        product = product.mul(&lifted_gauss_group_ring(&tower, cp.p, order, c));
    }
    for &c in &b_rest {
        product = product.mul(&lifted_gauss_group_ring(&tower, cp.p, order, (order - c % order) % order));
    }
    // rho_j(Nm(-1)) = T^{b_j * log Nm(-1)}
    let log_minus_one = if tower.ext.p() == 2 { 0 } else { tower.ext.order() / 2 };
    let nm = tower.norm_log(log_minus_one);
    let mut sign = GroupRingSum::zero(cp.p, order);
    if parity_sign {
        sign.add_term(0, 0, if (m - 1) % 2 == 0 { 1 } else { -1 });
    } else {
        let e: u128 = b_rest.iter().map(|&c| c as u128 * nm as u128).sum();
        sign.add_term(0, (e % order as u128) as u64, 1);
    }
    let rhs = inner.scale(big_q).add(&product.mul(&sign).scale(-1));
    Ok(ResonantSides { lhs, rhs })
}

/// Evaluates both sides of the resonant decomposition in `W` and compares
/// them to working precision.
pub fn resonant_decomposition_check(ctx: &SumContext, a: u64, ext: u32) -> Result<bool> {
    let sides = resonant_sides(ctx, a, ext)?;
    Ok(ctx.evaluate(&sides.lhs) == ctx.evaluate(&sides.rhs))
}

/// Complex absolute value of the sum under a fixed embedding, with the
/// bound `n Q^{(n+m-1)/2}`.
pub fn archimedean_check(ctx: &SumContext, value: &SumValue, ext: u32) -> Option<(f64, f64)> {
    let g = value.group_ring.as_ref()?;
    let q = (ctx.field.size() as f64).powi(ext as i32);
    let w = (ctx.cp.n() + ctx.cp.m() - 1) as f64;
    Some((g.to_complex().norm(), ctx.cp.n() as f64 * q.powf(w / 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn ctx(p: u64, s: u32, a: &[u64], b: &[u64]) -> SumContext {
        let cp = CharParams::new(p, s, a.to_vec(), b.to_vec()).unwrap();
        SumContext::new(&cp, None).unwrap()
    }

    #[test]
    fn rank_one_is_single_term() {
        let c = ctx(7, 1, &[0], &[]);
        for a in 1..7 {
            let v = hyp_sum(&c, a, 1).unwrap();
            assert_eq!(v.padic, *c.psi(a));
            assert_eq!(v.group_ring.unwrap().l1_norm(), 1);
        }
    }

    #[test]
    fn kloosterman_p5() {
        // sum_x psi(x + 1/x) over F_5^x = 2 + zeta^2 + zeta^3
        let c = ctx(5, 1, &[0, 0], &[]);
        let v = hyp_sum(&c, 1, 1).unwrap();
        let z = c.zeta_p();
        let expected = c.ring().from_int(2).add(&z.pow(2)).unwrap().add(&z.pow(3)).unwrap();
        assert_eq!(v.padic, expected);
        assert_eq!(v.ord_q().unwrap(), q(0, 1));
    }

    #[test]
    fn kloosterman_units() {
        for p in [3, 5, 7] {
            let c = ctx(p, 1, &[0, 0], &[]);
            for a in 1..p {
                for ext in 1..=2 {
                    assert_eq!(hyp_sum(&c, a, ext).unwrap().ord_q().unwrap(), q(0, 1));
                }
            }
        }
    }

    #[test]
    fn zero_point_rejected() {
        let c = ctx(5, 1, &[0, 0], &[]);
        assert!(matches!(hyp_sum(&c, 0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn budget_enforced() {
        let c = ctx(7, 1, &[0, 0, 0], &[1]);
        assert!(matches!(hyp_sum_with_budget(&c, 1, 2, 1000), Err(Error::Resource(_))));
    }

    #[test]
    fn stickelberger() {
        for p in [3u64, 5, 7, 11, 13] {
            let c = ctx(p, 1, &[0], &[]);
            for k in 0..p - 1 {
                let g = gauss_sum(&c, k);
                assert_eq!(g.ord_q().unwrap(), q(k as i64, p as i64 - 1), "p={p} k={k}");
            }
            assert_eq!(gauss_sum(&c, 0).padic, c.ring().from_int(-1));
        }
    }

    #[test]
    fn gauss_norm() {
        for p in [3u64, 5, 7] {
            let c = ctx(p, 1, &[0], &[]);
            for k in 1..p - 1 {
                // G(psi, omega^{-k}) G(psi^{-1}, omega^k) = q
                let g1 = gauss_sum_group_ring(c.field(), k);
                let mut g2 = GroupRingSum::zero(p, p - 1);
                for (t, e, v) in gauss_sum_group_ring(c.field(), p - 1 - k).terms() {
                    g2.add_term((p - t) % p, e, v);
                }
                let prod = c.evaluate(&g1.mul(&g2));
                assert_eq!(prod.ord_q().unwrap(), q(1, 1));
                assert_eq!(prod, c.ring().from_int(p as i64));
            }
        }
    }

    #[test]
    fn convolution_matches_brute_force() {
        let cases: &[(u64, u32, &[u64], &[u64], u32)] = &[
            (5, 1, &[0, 0], &[], 2),
            (5, 1, &[1, 3], &[2], 1),
            (7, 1, &[0, 2, 4], &[3], 1),
            (3, 1, &[0, 1, 1], &[0, 0], 2),
            (3, 2, &[2, 4], &[0], 1),
            (2, 2, &[0, 1], &[2], 1),
        ];
        for &(p, s, a, b, ext) in cases {
            let c = ctx(p, s, a, b);
            let fast = hyp_sums_all_points_group_ring(&c, ext).unwrap();
            for k in 0..c.field().order() {
                let point = c.field().exp(k);
                let slow = hyp_sum_group_ring(&c, point, ext, DEFAULT_SUM_BUDGET).unwrap();
                assert_eq!(fast[k as usize], slow, "p={p} s={s} a={a:?} b={b:?} k={k}");
            }
        }
    }

    #[test]
    fn group_ring_evaluation_matches_direct() {
        let c = ctx(5, 1, &[1, 2], &[3]);
        let g = hyp_sum_group_ring(&c, 2, 1, DEFAULT_SUM_BUDGET).unwrap();
        let mut direct = c.ring().zero();
        for (t, e, v) in g.terms() {
            let term = c.psi(t).mul(c.teichmuller_power(e)).unwrap();
            direct.add_scaled_assign(&term, v);
        }
        assert_eq!(direct, c.evaluate(&g));
    }

    #[test]
    fn resonant_identity() {
        for (p, a, b) in [
            (5u64, vec![0u64, 0], vec![0u64]),
            (3, vec![0, 0], vec![0]),
            (7, vec![1, 0, 0], vec![0]),
            (5, vec![0, 0, 0], vec![0, 0]),
            (5, vec![2, 1, 0], vec![3, 0]),
        ] {
            let c = ctx(p, 1, &a, &b);
            for point in 1..p {
                assert!(resonant_decomposition_check(&c, point, 1).unwrap(), "p={p} a={a:?} b={b:?}");
            }
        }
    }

    #[test]
    fn parity_sign_variant_fails() {
        // (n, m) = (3, 2) with trivial characters: the (-1)^{m-1} sign breaks
        let c = ctx(5, 1, &[0, 0, 0], &[0, 0]);
        let sides = resonant_sides_signed(&c, 1, 1, true).unwrap();
        assert_ne!(c.evaluate(&sides.lhs), c.evaluate(&sides.rhs));
    }

    #[test]
    fn resonant_preconditions() {
        let c = ctx(5, 1, &[1, 0], &[2]);
        assert!(matches!(resonant_decomposition_check(&c, 1, 1), Err(Error::Precondition(_))));
        let c = ctx(5, 1, &[0], &[]);
        assert!(matches!(resonant_decomposition_check(&c, 1, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn archimedean_bound() {
        let c = ctx(7, 1, &[0, 2, 4], &[3]);
        for ext in 1..=2 {
            for (k, v) in hyp_sums_all_points(&c, ext).unwrap().iter().enumerate() {
                let (abs, bound) = archimedean_check(&c, v, ext).unwrap();
                assert!(abs <= bound + 1e-6, "k={k} ext={ext} |S|={abs} bound={bound}");
            }
        }
    }
}
