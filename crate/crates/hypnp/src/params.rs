//! Hypergeometric parameter data: the two sequences `alpha`, `beta` and the
//! multiplicative-character exponents that realize them over a finite field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{in_unit_interval, Scalar};

/// Normalized hypergeometric parameters.
///
/// Invariants: `n >= m`, `n >= 1`, every entry in `[0, 1)`, both sequences
/// sorted nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HypParams<T> {
    alpha: Vec<T>,
    beta: Vec<T>,
}

impl<T: Scalar> HypParams<T> {
    /// Validates already-normalized sequences.
    pub fn new(alpha: Vec<T>, beta: Vec<T>) -> Result<Self> {
        check_shape(alpha.len(), beta.len())?;
        for (name, seq) in [("alpha", &alpha), ("beta", &beta)] {
            if let Some(x) = seq.iter().find(|x| !in_unit_interval(*x)) {
                return Err(Error::Precondition(format!("{name} entry {x} is not in [0,1)")));
            }
            if seq.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Precondition(format!("{name} is not sorted")));
            }
        }
        Ok(Self { alpha, beta })
    }

    /// Reduces every entry to its fractional part and sorts both sequences.
    pub fn normalize(alpha_raw: &[T], beta_raw: &[T]) -> Result<Self> {
        check_shape(alpha_raw.len(), beta_raw.len())?;
        Ok(Self {
            alpha: canonical(alpha_raw),
            beta: canonical(beta_raw),
        })
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn m(&self) -> usize {
        self.beta.len()
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    /// Dimension `n + m - 1` of the torus carrying the Laurent polynomial.
    pub fn ambient_dim(&self) -> usize {
        self.n() + self.m() - 1
    }

    pub fn is_nonresonant(&self) -> bool {
        !self.alpha.iter().any(|a| self.beta.contains(a))
    }

    /// Conjugate parameters: `alpha` keeps its leading zeros and the rest is
    /// reflected `x -> 1 - x` in reverse order; `beta -> 1 - beta` mod 1.
    pub fn conjugate(&self) -> Self {
        let n = self.n();
        let t = self.alpha.iter().take_while(|a| a.is_zero()).count();
        let mut alpha = Vec::with_capacity(n);
        for k in 1..=n {
            if k <= t {
                alpha.push(T::zero());
            } else {
                alpha.push(T::one() - self.alpha[n + t - k].clone());
            }
        }
        let beta: Vec<T> = self
            .beta
            .iter()
            .map(|b| (T::one() - b.clone()).fract_val())
            .collect();
        Self {
            alpha: canonical(&alpha),
            beta: canonical(&beta),
        }
    }

    /// Multiplies every entry by `prime` modulo 1.
    pub fn frobenius_twist(&self, prime: u64) -> Self {
        let p = T::from_int(prime as i64);
        let twist = |xs: &[T]| -> Vec<T> {
            let v: Vec<T> = xs.iter().map(|x| x.clone() * p.clone()).collect();
            canonical(&v)
        };
        Self {
            alpha: twist(&self.alpha),
            beta: twist(&self.beta),
        }
    }

    /// Least common denominator of all entries.
    pub fn common_denominator(&self) -> Result<u64> {
        self.alpha
            .iter()
            .chain(&self.beta)
            .try_fold(1u64, |acc, x| {
                let d = x
                    .denom_u64()
                    .ok_or_else(|| Error::Precondition(format!("denominator of {x} is too large")))?;
                Ok(num_integer::lcm(acc, d))
            })
    }

    /// `true` when every denominator divides `modulus`.
    pub fn denominators_divide(&self, modulus: u64) -> bool {
        matches!(self.common_denominator(), Ok(d) if modulus % d == 0)
    }

    pub fn map_scalar<U: Scalar>(&self) -> HypParams<U> {
        let conv = |xs: &[T]| -> Vec<U> {
            xs.iter()
                .map(|x| crate::scalar::convert(x).expect("scalar conversion"))
                .collect()
        };
        HypParams {
            alpha: conv(&self.alpha),
            beta: conv(&self.beta),
        }
    }

    /// Parses comma-separated lists such as `"0,1/2"`; an empty string is the
    /// empty sequence.
    pub fn from_lists(alpha: &str, beta: &str) -> Result<Self> {
        let a = parse_list::<T>(alpha)?;
        let b = parse_list::<T>(beta)?;
        Self::normalize(&a, &b)
    }

    pub fn to_raw(&self) -> RawParams {
        RawParams {
            alpha: self.alpha.iter().map(|x| x.to_string()).collect(),
            beta: self.beta.iter().map(|x| x.to_string()).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawParams = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_params()
    }
}

fn check_shape(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidShape("alpha must be nonempty".into()));
    }
    if n < m {
        return Err(Error::InvalidShape(format!(
            "alpha has {n} entries but beta has {m}; need len(alpha) >= len(beta)"
        )));
    }
    Ok(())
}

fn canonical<T: Scalar>(xs: &[T]) -> Vec<T> {
    let mut v: Vec<T> = xs.iter().map(|x| x.fract_val()).collect();
    v.sort();
    v
}

pub fn parse_list<T: Scalar>(text: &str) -> Result<Vec<T>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| T::parse(tok).ok_or_else(|| Error::Parse(format!("bad rational {tok:?}"))))
        .collect()
}

/// Wire form of [`HypParams`]: rationals as `"num/den"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawParams {
    pub alpha: Vec<String>,
    #[serde(default)]
    pub beta: Vec<String>,
}

impl RawParams {
    pub fn into_params<T: Scalar>(&self) -> Result<HypParams<T>> {
        let parse = |xs: &[String]| -> Result<Vec<T>> {
            xs.iter()
                .map(|s| T::parse(s).ok_or_else(|| Error::Parse(format!("bad rational {s:?}"))))
                .collect()
        };
        HypParams::normalize(&parse(&self.alpha)?, &parse(&self.beta)?)
    }
}

/// Character data over `F_q`, `q = p^s`: `chi_i = omega^{a_i}`,
/// `rho_j = omega^{b_j}` with `omega` the Teichmüller character.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharParams {
    pub p: u64,
    pub s: u32,
    pub a_exps: Vec<u64>,
    pub b_exps: Vec<u64>,
}

impl CharParams {
    pub fn new(p: u64, s: u32, a_exps: Vec<u64>, b_exps: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        if s == 0 {
            return Err(Error::Precondition("s must be positive".into()));
        }
        check_shape(a_exps.len(), b_exps.len())?;
        let q = p
            .checked_pow(s)
            .ok_or_else(|| Error::Resource(format!("{p}^{s} overflows")))?;
        if let Some(e) = a_exps.iter().chain(&b_exps).find(|&&e| e > q - 2) {
            return Err(Error::Precondition(format!("exponent {e} outside [0, {}]", q - 2)));
        }
        Ok(Self { p, s, a_exps, b_exps })
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.s)
    }

    pub fn n(&self) -> usize {
        self.a_exps.len()
    }

    pub fn m(&self) -> usize {
        self.b_exps.len()
    }

    /// `alpha_i = a_i / (q - 1)`, `beta_j = b_j / (q - 1)`, normalized.
    pub fn hyp_params<T: Scalar>(&self) -> HypParams<T> {
        let den = (self.q() - 1) as i64;
        let a: Vec<T> = self.a_exps.iter().map(|&e| T::ratio(e as i64, den)).collect();
        let b: Vec<T> = self.b_exps.iter().map(|&e| T::ratio(e as i64, den)).collect();
        HypParams::normalize(&a, &b).expect("shape checked at construction")
    }

    /// Inverse of [`CharParams::hyp_params`] when all denominators divide
    /// `p^s - 1`.
    pub fn from_hyp_params<T: Scalar>(params: &HypParams<T>, p: u64, s: u32) -> Result<Self> {
        let q1 = p.pow(s) - 1;
        if !params.denominators_divide(q1) {
            return Err(Error::Precondition(format!(
                "parameter denominators do not divide {q1}"
            )));
        }
        let scale = T::from_int(q1 as i64);
        let exps = |xs: &[T]| -> Vec<u64> {
            xs.iter()
                .map(|x| (x.clone() * scale.clone()).numer_i64().unwrap() as u64)
                .collect()
        };
        Self::new(p, s, exps(params.alpha()), exps(params.beta()))
    }

    pub fn is_nonresonant(&self) -> bool {
        !self.a_exps.iter().any(|a| self.b_exps.contains(a))
    }

    /// All characters have order dividing `p - 1`.
    pub fn orders_divide_p_minus_1(&self) -> bool {
        let c = (self.q() - 1) / (self.p - 1);
        self.a_exps.iter().chain(&self.b_exps).all(|&e| e % c == 0)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
