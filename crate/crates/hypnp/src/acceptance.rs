//! The acceptance criteria as runnable checks, shared by the test suite and
//! `hypnp selftest`.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::charsum::{gauss_sum, resonant_decomposition_check, SumContext};
use crate::error::{Error, Result};
use crate::frobenius::{compare_all_points, nonresonant_tuples, Verdict};
use crate::hodge::{duality_pairing, irregular_hodge_polygon, theta};
use crate::params::CharParams;
use crate::polytope::{basis_exponents, volume_matches_lattice_count, wan_certificate_holds, wan_facet_groups, FacetSystem};
use crate::{HypParams, Rational};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {} ({:.1}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "Newton = Hodge for all tuples, p in {3,5,7}, n <= 3, m < n"),
    (2, "Kloosterman sums are everywhere ordinary"),
    (3, "Stickelberger valuations of Gauss sums"),
    (4, "basis exponent weights realize theta"),
    (5, "Hodge number duality on non-resonant params"),
    (6, "Hodge slopes for alpha = 0^4, beta = (1/5,2/5,3/5,4/5)"),
    (7, "resonant decomposition identity"),
    (8, "closed-form volume matches lattice counts"),
    (9, "Wan facet certificates"),
    (10, "weight subadditivity, Newton above Hodge, precision stability"),
];

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, seed)).collect()
}

pub fn run_criterion(id: u8, seed: u64) -> CriterionResult {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map_or("unknown criterion", |c| c.1);
    let start = Instant::now();
    let outcome = match id {
        1 => desk_scale_ordinary(),
        2 => kloosterman(),
        3 => stickelberger(),
        4 => basis_weights(seed),
        5 => duality(seed),
        6 => hodge_example(),
        7 => resonant(),
        8 => volume_oracle(),
        9 => wan(),
        10 => properties(seed),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

type Outcome = std::result::Result<String, String>;

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn ordinary_everywhere(cp: &CharParams) -> Result<bool> {
    let ctx = SumContext::new(cp, None)?;
    Ok(compare_all_points(&ctx)?
        .iter()
        .all(|r| r.verdict == Verdict::Ordinary))
}

fn desk_scale_ordinary() -> Outcome {
    let mut total = 0;
    for p in [3u64, 5, 7] {
        let tuples = nonresonant_tuples(p, 3, 2).map_err(|e| e.to_string())?;
        let bad: Vec<String> = tuples
            .par_iter()
            .filter_map(|cp| match ordinary_everywhere(cp) {
                Ok(true) => None,
                Ok(false) => Some(format!("{cp:?}: not ordinary")),
                Err(e) => Some(format!("{cp:?}: {e}")),
            })
            .collect();
        if let Some(first) = bad.first() {
            return Err(format!("{} failing tuples at p={p}, first {first}", bad.len()));
        }
        total += tuples.len();
    }
    Ok(format!("{total} tuples, every fiber ordinary"))
}

fn kloosterman() -> Outcome {
    let mut fibers = 0;
    for p in [5u64, 7, 11] {
        for n in [2usize, 3] {
            let cp = CharParams::new(p, 1, vec![0; n], vec![]).map_err(|e| e.to_string())?;
            let ctx = SumContext::new(&cp, None).map_err(|e| e.to_string())?;
            let expected: Vec<Rational> = (0..n as i64).map(|k| q(k, 1)).collect();
            for r in compare_all_points(&ctx).map_err(|e| e.to_string())? {
                let slopes = r.newton_polygon.as_ref().map(|np| np.slopes().to_vec());
                if slopes.as_deref() != Some(&expected[..]) {
                    return Err(format!("p={p} n={n} a={}: slopes {slopes:?}", r.point));
                }
                fibers += 1;
            }
        }
    }
    Ok(format!("{fibers} fibers with slopes 0..n-1"))
}

fn stickelberger() -> Outcome {
    let mut count = 0;
    for p in [2u64, 3, 5, 7, 11, 13] {
        let cp = CharParams::new(p, 1, vec![0], vec![]).map_err(|e| e.to_string())?;
        let ctx = SumContext::new(&cp, Some(4 * (p - 1))).map_err(|e| e.to_string())?;
        for k in 0..p - 1 {
            let ord = gauss_sum(&ctx, k).ord_q().map_err(|e| e.to_string())?;
            if ord != q(k as i64, p as i64 - 1) {
                return Err(format!("p={p} k={k}: ord_q = {ord}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} Gauss sums"))
}

/// Random normalized parameters with `2 <= n + m <= max_total`, entries with
/// denominators at most `max_den`.
fn random_params(rng: &mut ChaCha8Rng, max_total: usize, max_den: i64, alpha_zero: bool, nonresonant: bool) -> HypParams {
    loop {
        let n = rng.gen_range(1..=max_total - 1);
        let m = rng.gen_range(0..=n.min(max_total - n));
        if n + m < 2 {
            continue;
        }
        let entry = |rng: &mut ChaCha8Rng| {
            let den = rng.gen_range(1..=max_den);
            q(rng.gen_range(0..den), den)
        };
        let mut alpha: Vec<Rational> = (0..n).map(|_| entry(rng)).collect();
        if alpha_zero {
            alpha[0] = q(0, 1);
        }
        let beta: Vec<Rational> = (0..m).map(|_| entry(rng)).collect();
        let params = HypParams::normalize(&alpha, &beta).expect("valid shape");
        if !nonresonant || params.is_nonresonant() {
            return params;
        }
    }
}

fn basis_weights(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..200 {
        let params = random_params(&mut rng, 8, 24, true, true);
        let d = params.common_denominator().map_err(|e| e.to_string())? as i64;
        let basis = basis_exponents(&params, d).map_err(|e| format!("{params:?}: {e}"))?;
        let top = q(params.ambient_dim() as i64, 1);
        let mut lhs: Vec<Rational> = basis.iter().map(|g| &top - &g.weight).collect();
        let mut rhs = theta(&params);
        lhs.sort();
        rhs.sort();
        if lhs != rhs {
            return Err(format!("sample {i} {params:?}: {lhs:?} vs {rhs:?}"));
        }
    }
    Ok("200 samples".into())
}

fn duality(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for i in 0..500 {
        let params = random_params(&mut rng, 8, 24, false, true);
        if !duality_pairing(&params) {
            return Err(format!("sample {i} {params:?}"));
        }
    }
    Ok("500 samples".into())
}

fn hodge_example() -> Outcome {
    let params = HypParams::from_lists("0,0,0,0", "1/5,2/5,3/5,4/5").map_err(|e| e.to_string())?;
    let slopes = irregular_hodge_polygon(&params);
    let expected: Vec<Rational> = (2..=5).map(|k| q(k, 1)).collect();
    if slopes.slopes() == &expected[..] {
        Ok(format!("slopes {slopes}"))
    } else {
        Err(format!("slopes {slopes}"))
    }
}

fn resonant() -> Outcome {
    let mut checks = 0;
    for p in [3u64, 5, 7] {
        for (n, m) in [(2usize, 1usize), (3, 1), (3, 2)] {
            let trivial = (vec![0; n], vec![0; m]);
            let mut a = vec![0; n];
            a[0] = 1;
            let mut b = vec![0; m];
            if m > 1 {
                b[0] = p - 2;
            }
            for (a_exps, b_exps) in [trivial, (a, b)] {
                let cp = CharParams::new(p, 1, a_exps, b_exps).map_err(|e| e.to_string())?;
                let ctx = SumContext::new(&cp, None).map_err(|e| e.to_string())?;
                for ext in 1..=2u32 {
                    for point in 1..p {
                        match resonant_decomposition_check(&ctx, point, ext) {
                            Ok(true) => checks += 1,
                            Ok(false) => return Err(format!("{cp:?} a={point} ext={ext}: sides differ")),
                            Err(e) => return Err(format!("{cp:?} a={point} ext={ext}: {e}")),
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{checks} identities"))
}

fn volume_oracle() -> Outcome {
    let mut shapes = 0;
    for n in 1..=4usize {
        for m in 0..=n {
            let dim = n + m - 1;
            if dim == 0 || dim > 3 {
                continue;
            }
            for d in 1..=2 {
                match volume_matches_lattice_count(n, m, d, dim as i64 + 1) {
                    Ok(true) => shapes += 1,
                    Ok(false) => return Err(format!("(n,m,d) = ({n},{m},{d})")),
                    Err(e) => return Err(format!("(n,m,d) = ({n},{m},{d}): {e}")),
                }
            }
        }
    }
    Ok(format!("{shapes} shapes"))
}

fn wan() -> Outcome {
    let mut shapes = 0;
    for p in [3u64, 5, 7] {
        for n in 1..=5usize {
            for m in 0..n {
                if n + m - 1 > 4 || n + m < 2 {
                    continue;
                }
                let groups = wan_facet_groups(n, m, p).map_err(|e| e.to_string())?;
                if !wan_certificate_holds(&groups, p) {
                    return Err(format!("(n,m,p) = ({n},{m},{p}): {groups:?}"));
                }
                shapes += 1;
            }
        }
    }
    Ok(format!("{shapes} shapes"))
}

fn properties(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa11ce);
    // weight subadditivity
    let mut samples = 0;
    while samples < 1000 {
        let n = rng.gen_range(1..=4usize);
        let m = rng.gen_range(0..=n);
        if n + m < 2 {
            continue;
        }
        let d = rng.gen_range(1..=6i64);
        let fs = FacetSystem::build(n, m, d).map_err(|e| e.to_string())?;
        let point = |rng: &mut ChaCha8Rng| -> Vec<i64> {
            loop {
                let v: Vec<i64> = (0..n + m - 1).map(|_| rng.gen_range(-3 * d..=3 * d)).collect();
                if fs.in_cone(&v) {
                    return v;
                }
            }
        };
        let (u, v) = (point(&mut rng), point(&mut rng));
        let w: Vec<i64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let weight = |x: &[i64]| fs.weight::<Rational>(x).map_err(|e| e.to_string());
        if weight(&w)? > weight(&u)? + weight(&v)? {
            return Err(format!("subadditivity fails at {u:?} + {v:?}"));
        }
        samples += 1;
    }

    // Newton above Hodge and precision stability on resampled runs
    let mut pool = Vec::new();
    for p in [5u64, 7] {
        pool.extend(nonresonant_tuples(p, 3, 2).map_err(|e| e.to_string())?);
    }
    pool.shuffle(&mut rng);
    let picks: Vec<(CharParams, u64)> = pool
        .into_iter()
        .take(20)
        .map(|cp| {
            let a = rng.gen_range(1..cp.p);
            (cp, a)
        })
        .collect();
    let stable: Vec<std::result::Result<(), String>> = picks
        .par_iter()
        .map(|(cp, a)| {
            let base = SumContext::new(cp, None).map_err(|e| e.to_string())?;
            let extra = base.ring().precision_pi() + 2 * (cp.p - 1);
            let more = SumContext::new(cp, Some(extra)).map_err(|e| e.to_string())?;
            let run = |ctx: &SumContext| -> std::result::Result<_, String> {
                let reports = match compare_all_points(ctx) {
                    Err(e @ Error::NewtonBelowHodge(_)) => return Err(format!("{cp:?}: {e}")),
                    Err(e) => return Err(format!("{cp:?}: {e}")),
                    Ok(r) => r,
                };
                if let Some(r) = reports.iter().find(|r| r.verdict == Verdict::NewtonBelowHodge) {
                    return Err(format!("{cp:?} a={}: Newton below Hodge", r.point));
                }
                let r = reports.iter().find(|r| r.point == *a).expect("every point reported");
                Ok(r.newton_polygon.clone())
            };
            let (x, y) = (run(&base)?, run(&more)?);
            if x.is_none() || x != y {
                return Err(format!("{cp:?} a={a}: {x:?} then {y:?}"));
            }
            Ok(())
        })
        .collect();
    if let Some(Err(e)) = stable.into_iter().find(|r| r.is_err()) {
        return Err(e);
    }
    Ok("1000 weight samples, 20 stable compare runs".into())
}
