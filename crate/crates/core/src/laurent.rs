//! Exact arithmetic in `Z[A, A^-1]` and Gaussian binomials.
//!
//! A [`LaurentPoly`] is a sparse map from exponent to a nonzero `i64`
//! coefficient. Every constructor and operation keeps that map canonical, so
//! structural equality is polynomial equality. Coefficient arithmetic is
//! checked: the `checked_*` methods return [`LaurentError::Overflow`], and the
//! operator impls (`+`, `-`, `*`) panic on overflow instead of wrapping.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("coefficient overflow in {0}")]
    Overflow(&'static str),
    #[error("cannot parse Laurent polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `coeff * A^exp`; zero when `coeff == 0`.
    pub fn monomial(coeff: i64, exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// repeated exponents.
    pub fn from_terms<I>(terms: I) -> Result<Self, LaurentError>
    where
        I: IntoIterator<Item = (i32, i64)>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c)?;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i32) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    /// Sum of coefficients, i.e. the value at `A = 1`.
    pub fn eval_at_one(&self) -> Result<i64, LaurentError> {
        self.terms.values().try_fold(0i64, |acc, &c| {
            acc.checked_add(c)
                .ok_or(LaurentError::Overflow("evaluation"))
        })
    }

    /// Adds `coeff * A^exp` in place.
    pub fn add_term(&mut self, exp: i32, coeff: i64) -> Result<(), LaurentError> {
        if coeff == 0 {
            return Ok(());
        }
        let slot = self.terms.entry(exp).or_insert(0);
        *slot = slot
            .checked_add(coeff)
            .ok_or(LaurentError::Overflow("addition"))?;
        if *slot == 0 {
            self.terms.remove(&exp);
        }
        Ok(())
    }

    pub fn add_assign_checked(&mut self, other: &Self) -> Result<(), LaurentError> {
        for (&e, &c) in &other.terms {
            self.add_term(e, c)?;
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LaurentError> {
        let mut out = self.clone();
        out.add_assign_checked(other)?;
        Ok(out)
    }

    pub fn checked_neg(&self) -> Result<Self, LaurentError> {
        let terms = self
            .terms
            .iter()
            .map(|(&e, &c)| {
                c.checked_neg()
                    .map(|c| (e, c))
                    .ok_or(LaurentError::Overflow("negation"))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { terms })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.checked_add(&other.checked_neg()?)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        let mut out = Self::zero();
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &other.terms {
                let e = e1
                    .checked_add(e2)
                    .ok_or(LaurentError::Overflow("exponent"))?;
                let c = c1
                    .checked_mul(c2)
                    .ok_or(LaurentError::Overflow("multiplication"))?;
                out.add_term(e, c)?;
            }
        }
        Ok(out)
    }

    pub fn checked_pow(&self, k: u32) -> Result<Self, LaurentError> {
        let mut out = Self::one();
        for _ in 0..k {
            out = out.checked_mul(self)?;
        }
        Ok(out)
    }

    /// Multiplies by `A^shift`.
    pub fn shifted(&self, shift: i32) -> Result<Self, LaurentError> {
        let terms = self
            .terms
            .iter()
            .map(|(&e, &c)| {
                e.checked_add(shift)
                    .map(|e| (e, c))
                    .ok_or(LaurentError::Overflow("exponent"))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { terms })
    }

    /// Substitutes `A := A^factor`. With `factor == -1` this is the bar
    /// involution `A -> A^-1`; with `factor == -4` it sends `q` to `A^-4`.
    pub fn substitute_power(&self, factor: i32) -> Result<Self, LaurentError> {
        if factor == 0 {
            return Self::from_terms([(0, self.eval_at_one()?)]);
        }
        let terms = self
            .terms
            .iter()
            .map(|(&e, &c)| {
                e.checked_mul(factor)
                    .map(|e| (e, c))
                    .ok_or(LaurentError::Overflow("exponent"))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { terms })
    }
}

/// The loop value `-A^2 - A^-2`.
pub fn loop_value() -> LaurentPoly {
    LaurentPoly::from_terms([(2, -1), (-2, -1)]).expect("constant")
}

/// `(-A^2 - A^-2)^l`.
pub fn delta_power(l: u32) -> LaurentPoly {
    // Binomial expansion: sum_j C(l,j) (-1)^l A^{2l - 4j}.
    let sign: i64 = if l.is_multiple_of(2) { 1 } else { -1 };
    let mut c: i64 = 1;
    let mut out = LaurentPoly::zero();
    for j in 0..=l {
        out.add_term(2 * l as i32 - 4 * j as i32, sign * c)
            .expect("delta power in range");
        c = c * (l - j) as i64 / (j + 1) as i64;
    }
    out
}

/// How the variable of a Gaussian binomial is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QSubst {
    /// The result is a polynomial in a formal `q`, stored with `q` in the
    /// role of `A`.
    Formal,
    /// `q := A^-4`.
    AInverseFourth,
}

/// Table of Gaussian binomials `[r k]_q` for all `0 <= k <= r <= rows`,
/// filled by the recurrence `[r k] = [r-1 k] + q^{r-k} [r-1 k-1]`.
#[derive(Debug, Clone)]
pub struct QBinomialTable {
    rows: Vec<Vec<LaurentPoly>>,
}

impl QBinomialTable {
    pub fn new(rows: u32) -> Self {
        let mut table: Vec<Vec<LaurentPoly>> = vec![vec![LaurentPoly::one()]];
        for r in 1..=rows as usize {
            let prev = &table[r - 1];
            let mut row = Vec::with_capacity(r + 1);
            for k in 0..=r {
                let mut entry = if k < r {
                    prev[k].clone()
                } else {
                    LaurentPoly::zero()
                };
                if k > 0 {
                    let lifted = prev[k - 1]
                        .shifted((r - k) as i32)
                        .expect("q-binomial exponent in range");
                    entry
                        .add_assign_checked(&lifted)
                        .expect("q-binomial coefficient overflow");
                }
                row.push(entry);
            }
            table.push(row);
        }
        Self { rows: table }
    }

    pub fn rows(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    /// `[m k]_q` in formal `q`; zero outside `0..=m`. Panics when `m`
    /// exceeds the table.
    pub fn get(&self, m: u32, k: i64) -> LaurentPoly {
        if k < 0 || k > m as i64 {
            return LaurentPoly::zero();
        }
        self.rows[m as usize][k as usize].clone()
    }
}

pub fn qbinom(m: u32, k: i64, subst: QSubst) -> LaurentPoly {
    if k < 0 || k > m as i64 {
        return LaurentPoly::zero();
    }
    let formal = QBinomialTable::new(m).get(m, k);
    match subst {
        QSubst::Formal => formal,
        QSubst::AInverseFourth => formal
            .substitute_power(-4)
            .expect("q-binomial exponent in range"),
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (&e, &c)) in self.terms.iter().rev().enumerate() {
            let mag = c.unsigned_abs();
            match (i, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match (e, mag) {
                (0, _) => write!(f, "{mag}")?,
                (_, 1) => write!(f, "A^{e}")?,
                _ => write!(f, "{mag}*A^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;

    /// Accepts the rendering grammar (`c*A^e` terms joined by `+`/`-`), with
    /// whitespace optional and `A` accepted for `A^1`.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| LaurentError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s: Vec<u8> = input.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty input"));
        }
        let mut out = LaurentPoly::zero();
        let mut pos = 0;
        let mut first = true;
        while pos < s.len() {
            let mut sign: i64 = 1;
            match s[pos] {
                b'+' if !first => pos += 1,
                b'-' => {
                    sign = -1;
                    pos += 1;
                }
                _ if first => {}
                _ => return Err(err("expected '+' or '-' between terms")),
            }
            first = false;
            let digits_start = pos;
            while pos < s.len() && s[pos].is_ascii_digit() {
                pos += 1;
            }
            let coeff: Option<i64> = if pos > digits_start {
                let text = std::str::from_utf8(&s[digits_start..pos]).unwrap();
                Some(text.parse().map_err(|_| err("coefficient out of range"))?)
            } else {
                None
            };
            let has_var = if pos < s.len() && s[pos] == b'*' {
                if coeff.is_none() {
                    return Err(err("'*' without coefficient"));
                }
                pos += 1;
                if pos >= s.len() || s[pos] != b'A' {
                    return Err(err("expected 'A' after '*'"));
                }
                true
            } else {
                pos < s.len() && s[pos] == b'A'
            };
            let mut exp: i32 = 0;
            if has_var {
                pos += 1;
                exp = 1;
                if pos < s.len() && s[pos] == b'^' {
                    pos += 1;
                    let e_start = pos;
                    if pos < s.len() && s[pos] == b'-' {
                        pos += 1;
                    }
                    let d_start = pos;
                    while pos < s.len() && s[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if pos == d_start {
                        return Err(err("missing exponent"));
                    }
                    let text = std::str::from_utf8(&s[e_start..pos]).unwrap();
                    exp = text.parse().map_err(|_| err("exponent out of range"))?;
                }
            } else if coeff.is_none() {
                return Err(err("expected a term"));
            }
            let c = coeff.unwrap_or(1);
            out.add_term(exp, sign * c)?;
        }
        Ok(out)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs)
            .expect("LaurentPoly addition overflow")
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs)
            .expect("LaurentPoly subtraction overflow")
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs)
            .expect("LaurentPoly multiplication overflow")
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.checked_neg().expect("LaurentPoly negation overflow")
    }
}
