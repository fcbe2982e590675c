//! Closed formulas: coefficients of no-return states, ballot-path counts,
//! and the numbers of excluded and realizable Catalan states.

use std::fmt::Write as _;

use thiserror::Error;

use crate::laurent::{qbinom, LaurentError, LaurentPoly, QSubst};
use crate::states::{
    bottom, left, right, top, Axis, BoardShape, CatalanState, StateError, StateIter,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid no-return parameters m={m} n={n} k={k}: {reason}")]
    InvalidParams {
        m: usize,
        n: usize,
        k: usize,
        reason: &'static str,
    },
    #[error("excluded count for {m}x{n} disagrees between routes: {direct} vs {reflected}")]
    Inconsistent {
        m: usize,
        n: usize,
        direct: u128,
        reflected: i128,
    },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// `C(y, z)` when `y >= z >= 0`, otherwise 0.
pub fn binom_plus(y: i64, z: i64) -> Result<u128, CensusError> {
    if y < 0 || z < 0 || y < z {
        return Ok(0);
    }
    let z = z.min(y - z) as u128;
    let y = y as u128;
    let mut acc: u128 = 1;
    for i in 0..z {
        // acc * (y - i) is divisible by (i + 1) after the multiplication.
        acc = acc
            .checked_mul(y - i)
            .ok_or(CensusError::Overflow("binomial"))?
            / (i + 1);
    }
    Ok(acc)
}

fn signed(v: u128) -> Result<i128, CensusError> {
    i128::try_from(v).map_err(|_| CensusError::Overflow("signed conversion"))
}

fn sub(a: i128, b: i128) -> Result<i128, CensusError> {
    a.checked_sub(b).ok_or(CensusError::Overflow("subtraction"))
}

fn add(a: i128, b: i128) -> Result<i128, CensusError> {
    a.checked_add(b).ok_or(CensusError::Overflow("addition"))
}

/// `|L(m,n;t)| = C(m+n, n) - C(m+n, m-t)`: lattice paths to `(m, n)` never
/// touching `y = x - t`.
pub fn ballot_count(m: i64, n: i64, t: i64) -> Result<i128, CensusError> {
    assert!(t > 0, "barrier offset must be positive");
    sub(
        signed(binom_plus(m + n, n)?)?,
        signed(binom_plus(m + n, m - t)?)?,
    )
}

/// `|L(m,n;t,s)|`: lattice paths to `(m, n)` avoiding both `y = x - t` and
/// `y = x + s`, by the two-sided reflection sum
/// `sum_k C(m+n, m - k(t+s)) - C(m+n, m + k(t+s) + s)`.
///
/// On square boards the second binomial equals `C(2m, m + k'(t+s) + t)`
/// with `k' = -k - 1`, so either form serves the excluded-state count.
pub fn ballot_count2(m: i64, n: i64, t: i64, s: i64) -> Result<i128, CensusError> {
    assert!(t > 0 && s > 0, "barrier offsets must be positive");
    let top = m + n;
    let period = t + s;
    let term = |k: i64| -> Result<i128, CensusError> {
        sub(
            signed(binom_plus(top, m - k * period)?)?,
            signed(binom_plus(top, m + k * period + s)?)?,
        )
    };
    let in_range = |z: i64| (0..=top).contains(&z);
    let mut total = term(0)?;
    for dir in [1i64, -1] {
        let mut k = dir;
        while in_range(m - k * period) || in_range(m + k * period + s) {
            total = add(total, term(k)?)?;
            k += dir;
        }
    }
    Ok(total)
}

pub fn catalan_number(k: u64) -> Result<u128, CensusError> {
    let k = i64::try_from(k).map_err(|_| CensusError::Overflow("Catalan index"))?;
    let central = binom_plus(
        k.checked_mul(2)
            .ok_or(CensusError::Overflow("Catalan index"))?,
        k,
    )?;
    Ok(central / (k as u128 + 1))
}

/// `T^h(m,n)`: Catalan states of the `m x n` board cutting some horizontal
/// line more than `n` times.
///
/// Evaluated as the direct alternating sum and as a difference of ballot
/// counts; the two must agree.
pub fn excluded_count(m: usize, n: usize) -> Result<u128, CensusError> {
    let (mi, ni) = (m as i64, n as i64);
    let top = 2 * (mi + ni);
    let mut direct: i128 = 0;
    let mut i = 0i64;
    while mi - i * (ni + 3) - 2 >= 0 {
        let base = mi - i * (ni + 3);
        direct = add(direct, signed(binom_plus(top, base - 2)?)?)?;
        direct = sub(direct, 2 * signed(binom_plus(top, base - 3)?)?)?;
        direct = add(direct, signed(binom_plus(top, base - 4)?)?)?;
        i += 1;
    }
    let size = mi + ni;
    let reflected = sub(
        ballot_count(size, size, 1)?,
        ballot_count2(size, size, 1, ni + 2)?,
    )?;
    if direct != reflected || direct < 0 {
        return Err(CensusError::Inconsistent {
            m,
            n,
            direct: direct.max(0) as u128,
            reflected,
        });
    }
    Ok(direct as u128)
}

pub fn realizable_count(m: usize, n: usize) -> Result<u128, CensusError> {
    let total = catalan_number((m + n) as u64)?;
    total
        .checked_sub(excluded_count(m, n)?)
        .and_then(|v| v.checked_sub(excluded_count(n, m).ok()?))
        .ok_or(CensusError::Overflow("realizable count"))
}

/// One line of the census table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusRow {
    pub m: usize,
    pub n: usize,
    pub catalan: u128,
    pub excluded_h: u128,
    pub excluded_v: u128,
    pub realizable: u128,
}

impl CensusRow {
    pub fn compute(m: usize, n: usize) -> Result<Self, CensusError> {
        let catalan = catalan_number((m + n) as u64)?;
        let excluded_h = excluded_count(m, n)?;
        let excluded_v = excluded_count(n, m)?;
        let realizable = catalan
            .checked_sub(excluded_h + excluded_v)
            .ok_or(CensusError::Overflow("realizable count"))?;
        Ok(Self {
            m,
            n,
            catalan,
            excluded_h,
            excluded_v,
            realizable,
        })
    }
}

pub const CSV_HEADER: &str = "m,n,catalan,excluded_h,excluded_v,realizable";

/// Census rows for `1..=m_max` by `1..=n_max` as CSV with a header line.
pub fn census_csv(m_max: usize, n_max: usize) -> Result<String, CensusError> {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for m in 1..=m_max {
        for n in 1..=n_max {
            let r = CensusRow::compute(m, n)?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.m, r.n, r.catalan, r.excluded_h, r.excluded_v, r.realizable
            )
            .expect("writing to a String");
        }
    }
    Ok(out)
}

/// Counts obtained by walking every Catalan state of a board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanCounts {
    pub total: u128,
    /// States with `d^h > n`.
    pub excluded_h: u128,
    /// States with `d^v > m`.
    pub excluded_v: u128,
    pub forbidden: u128,
}

pub fn scan_counts(shape: BoardShape) -> ScanCounts {
    let mut counts = ScanCounts::default();
    for c in StateIter::new(shape) {
        let r = c.realizability();
        counts.total += 1;
        counts.excluded_h += u128::from(r.d_h > shape.n);
        counts.excluded_v += u128::from(r.d_v > shape.m);
        counts.forbidden += u128::from(!r.realizable);
    }
    counts
}

/// Board shape `m x n` with `n >= m` and the number `k` of positive
/// diagonal arc pairs, `0 <= k <= m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoReturnParams {
    m: usize,
    n: usize,
    k: usize,
}

impl NoReturnParams {
    pub fn new(m: usize, n: usize, k: usize) -> Result<Self, CensusError> {
        let invalid = |reason| CensusError::InvalidParams { m, n, k, reason };
        if n < m {
            return Err(invalid("requires n >= m; transpose the board"));
        }
        if k > m {
            return Err(invalid("requires k <= m"));
        }
        Ok(Self { m, n, k })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h(&self) -> usize {
        self.n - self.m
    }
}

/// `A^(mn - 2(k+h)k) [m k]` with `q = A^-4`.
pub fn no_return_coefficient(p: NoReturnParams) -> Result<LaurentPoly, CensusError> {
    let (m, n, k, h) = (p.m as i64, p.n as i64, p.k as i64, p.h() as i64);
    let exp = m * n - 2 * (k + h) * k;
    let exp = i32::try_from(exp).map_err(|_| CensusError::Overflow("exponent"))?;
    let m32 = u32::try_from(p.m).map_err(|_| CensusError::Overflow("q-binomial row"))?;
    Ok(qbinom(m32, k, QSubst::AInverseFourth).shifted(exp)?)
}

/// The no-return state `T_{k, m-k, h}`: `m-k` arcs `Tj-Lj`, `h` vertical
/// arcs, `k` arcs `T-R`, `k` arcs `B-L` and `m-k` arcs `B-R`.
pub fn no_return_state(p: NoReturnParams) -> CatalanState {
    let (m, n, k, h) = (p.m, p.n, p.k, p.h());
    let shape = BoardShape::new(m, n).expect("board within limits");
    let pairs = (1..=m - k)
        .map(|j| (top(j), left(j)))
        .chain((1..=h).map(|j| (top(m - k + j), bottom(k + j))))
        .chain((1..=k).map(|j| (top(n - k + j), right(k + 1 - j))))
        .chain((1..=k).map(|j| (bottom(j), left(m + 1 - j))))
        .chain((1..=m - k).map(|j| (bottom(k + h + j), right(k + j))));
    let state = CatalanState::from_pairs(shape, pairs).expect("no-return state is noncrossing");
    debug_assert!(state.max_cut(Axis::Horizontal) <= n);
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;
    use crate::skein::{coefficient, expand, Budget, Engine};
    use crate::states::Side;

    /// Monotone paths from the origin to `(m, n)` whose points all satisfy
    /// `-t < y - x < s`.
    fn walk(m: i64, n: i64, t: i64, s: Option<i64>) -> i128 {
        fn go(x: i64, y: i64, m: i64, n: i64, t: i64, s: Option<i64>) -> i128 {
            let d = y - x;
            if d <= -t || s.is_some_and(|s| d >= s) {
                return 0;
            }
            if x == m && y == n {
                return 1;
            }
            let mut total = 0;
            if x < m {
                total += go(x + 1, y, m, n, t, s);
            }
            if y < n {
                total += go(x, y + 1, m, n, t, s);
            }
            total
        }
        go(0, 0, m, n, t, s)
    }

    fn p(text: &str) -> LaurentPoly {
        text.parse().unwrap()
    }

    #[test]
    fn binom_plus_examples() {
        assert_eq!(binom_plus(4, -1).unwrap(), 0);
        assert_eq!(binom_plus(4, 2).unwrap(), 6);
        assert_eq!(binom_plus(3, 5).unwrap(), 0);
        assert_eq!(binom_plus(-1, 0).unwrap(), 0);
        assert_eq!(binom_plus(60, 30).unwrap(), 118264581564861424);
    }

    #[test]
    fn ballot_examples() {
        assert_eq!(ballot_count(2, 2, 1).unwrap(), 2);
        assert_eq!(ballot_count(6, 6, 1).unwrap(), 132);
        assert_eq!(ballot_count(1, 0, 1).unwrap(), 0);
        assert_eq!(ballot_count2(6, 6, 1, 5).unwrap(), 122);
        assert_eq!(ballot_count2(7, 7, 1, 3).unwrap(), 64);
        for (m, n, t, s) in [(4, 3, 5, 8), (1, 5, 2, 7), (2, 6, 3, 9)] {
            assert_eq!(
                ballot_count2(m, n, t, s).unwrap(),
                ballot_count(m, n, t).unwrap()
            );
        }
    }

    #[test]
    fn ballot_counts_match_path_walks() {
        for m in 0..=14i64 {
            for n in 0..=14 - m {
                for t in 1..=4 {
                    if n >= m - t {
                        assert_eq!(ballot_count(m, n, t).unwrap(), walk(m, n, t, None));
                    }
                }
            }
        }
        for m in 0..=14i64 {
            for n in 0..=14 - m {
                for t in 1..=4 {
                    for s in 1..=6 {
                        if (-t..=s).contains(&(n - m)) {
                            assert_eq!(
                                ballot_count2(m, n, t, s).unwrap(),
                                walk(m, n, t, Some(s)),
                                "m={m} n={n} t={t} s={s}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ballot_matches_catalan() {
        for k in 0..=10 {
            assert_eq!(
                ballot_count(k, k, 1).unwrap(),
                catalan_number(k as u64).unwrap() as i128
            );
        }
    }

    #[test]
    fn catalan_examples() {
        assert_eq!(catalan_number(0).unwrap(), 1);
        assert_eq!(catalan_number(4).unwrap(), 14);
        assert_eq!(catalan_number(7).unwrap(), 429);
    }

    #[test]
    fn excluded_examples() {
        assert_eq!(excluded_count(2, 1).unwrap(), 1);
        assert_eq!(excluded_count(3, 3).unwrap(), 10);
        assert_eq!(excluded_count(6, 1).unwrap(), 365);
        assert_eq!(excluded_count(1, 2).unwrap(), 0);
        for m in 0..=12 {
            for n in 0..=12 {
                excluded_count(m, n).unwrap();
            }
        }
    }

    #[test]
    fn realizable_examples() {
        assert_eq!(realizable_count(1, 1).unwrap(), 2);
        assert_eq!(realizable_count(2, 2).unwrap(), 12);
        assert_eq!(realizable_count(3, 3).unwrap(), 112);
        assert_eq!(realizable_count(6, 1).unwrap(), 64);
    }

    #[test]
    fn counts_match_scans() {
        let budget = Budget::default();
        for (m, n) in [(2, 1), (2, 2), (3, 2), (3, 3), (6, 1), (1, 6), (4, 2)] {
            let shape = BoardShape::new(m, n).unwrap();
            let scan = scan_counts(shape);
            assert_eq!(scan.total, catalan_number((m + n) as u64).unwrap());
            assert_eq!(scan.excluded_h, excluded_count(m, n).unwrap(), "{m}x{n}");
            assert_eq!(scan.excluded_v, excluded_count(n, m).unwrap(), "{m}x{n}");
            assert_eq!(
                scan.forbidden,
                excluded_count(m, n).unwrap() + excluded_count(n, m).unwrap()
            );
            let table = expand(shape, Engine::Transfer, &budget).unwrap();
            assert_eq!(table.len() as u128, realizable_count(m, n).unwrap());
        }
    }

    #[test]
    fn coefficient_examples() {
        let c = |m, n, k| no_return_coefficient(NoReturnParams::new(m, n, k).unwrap()).unwrap();
        assert_eq!(c(1, 1, 0), p("A^1"));
        assert_eq!(c(1, 1, 1), p("A^-1"));
        assert_eq!(c(2, 2, 1), p("A^2 + A^-2"));
        assert_eq!(c(1, 2, 0), p("A^2"));
        assert!(NoReturnParams::new(2, 1, 0).is_err());
        assert!(NoReturnParams::new(2, 3, 3).is_err());
    }

    #[test]
    fn state_examples() {
        let s = |m, n, k| no_return_state(NoReturnParams::new(m, n, k).unwrap()).to_string();
        let canon = |t: &str, m, n| {
            CatalanState::parse(t, BoardShape::new(m, n).unwrap())
                .unwrap()
                .to_string()
        };
        assert_eq!(s(1, 2, 0), canon("T1-L1,T2-B1,R1-B2", 1, 2));
        assert_eq!(s(1, 2, 1), canon("T1-B2,T2-R1,B1-L1", 1, 2));
        assert_eq!(s(1, 1, 0), canon("T1-L1,B1-R1", 1, 1));
    }

    #[test]
    fn no_return_states_have_no_returns() {
        for m in 0..=5 {
            for n in m..=6 {
                for k in 0..=m {
                    let c = no_return_state(NoReturnParams::new(m, n, k).unwrap());
                    for side in Side::ALL {
                        assert!(c.returns(side).is_empty(), "{c}");
                        for i in 1..=c.shape().side_len(side) {
                            let q = c.partner_of(crate::states::BoundaryPoint { side, index: i });
                            assert_ne!(q.side, side, "{c}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn formula_matches_engine() {
        let budget = Budget::default();
        for m in 0..=4 {
            for n in m..=12 {
                if m * n > 12 {
                    continue;
                }
                for k in 0..=m {
                    let params = NoReturnParams::new(m, n, k).unwrap();
                    let shape = BoardShape::new(m, n).unwrap();
                    assert_eq!(
                        coefficient(shape, &no_return_state(params), &budget).unwrap(),
                        no_return_coefficient(params).unwrap(),
                        "m={m} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn all_positive_and_all_negative_grids() {
        let budget = Budget::default();
        for (m, n) in [(1, 1), (1, 3), (2, 2), (2, 3)] {
            let shape = BoardShape::new(m, n).unwrap();
            let table = expand(shape, Engine::BruteForce, &budget).unwrap();
            let zero = no_return_state(NoReturnParams::new(m, n, 0).unwrap());
            let full = no_return_state(NoReturnParams::new(m, n, m).unwrap());
            assert_eq!(table.get(&zero).max_exp(), Some((m * n) as i32));
            assert_eq!(table.get(&full).min_exp(), Some(-((m * n) as i32)));
        }
    }

    #[test]
    fn recurrence_holds() {
        // P_{k,m-k,h} = A^{(m+n)-1} P_{k,m-k-1,h} + A^{1-(m+n)} P_{k-1,m-k,h},
        // where the smaller terms live on the (m-1) x (n-1) board.
        for m in 1..=5usize {
            for n in m..=m + 4 {
                for k in 0..=m {
                    let lhs = no_return_coefficient(NoReturnParams::new(m, n, k).unwrap()).unwrap();
                    let s = (m + n) as i32;
                    let mut rhs = LaurentPoly::zero();
                    if k < m {
                        let q = NoReturnParams::new(m - 1, n - 1, k).unwrap();
                        rhs = rhs + no_return_coefficient(q).unwrap().shifted(s - 1).unwrap();
                    }
                    if k >= 1 {
                        let q = NoReturnParams::new(m - 1, n - 1, k - 1).unwrap();
                        rhs = rhs + no_return_coefficient(q).unwrap().shifted(1 - s).unwrap();
                    }
                    assert_eq!(lhs, rhs, "m={m} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn csv_table() {
        let csv = census_csv(3, 3).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[9], "3,3,132,10,10,112");
    }
}
