//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Oracles here are written independently of the library where practical:
//! cut counts come from chord lists and explicit point sets, q-binomials from
//! inversion counting, ballot numbers from walking every lattice path, and
//! Dyck words from direct generation.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lattice_skein::census::{
    ballot_count, ballot_count2, catalan_number, excluded_count, no_return_coefficient,
    no_return_state, realizable_count, NoReturnParams,
};
use lattice_skein::states::{enumerate_states, DyckWord, Step, DEFAULT_STATE_CAP};
use lattice_skein::{
    coefficient, expand, expand_transfer, realize, resolve, BoardShape, BoundaryPoint, Budget,
    CatalanState, Engine, LaurentPoly, MarkerGrid, RealizeError, Side,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn shape(m: usize, n: usize) -> BoardShape {
    BoardShape::new(m, n).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Does `p` lie on the upper side of horizontal line `i`, i.e. in
/// `{T*, L1..Li, R1..Ri}`?
fn above(p: BoundaryPoint, i: usize) -> bool {
    match p.side {
        Side::Top => true,
        Side::Left | Side::Right => p.index <= i,
        Side::Bottom => false,
    }
}

/// Does `p` lie left of vertical line `j`, i.e. in `{L*, T1..Tj, B1..Bj}`?
fn west_of(p: BoundaryPoint, j: usize) -> bool {
    match p.side {
        Side::Left => true,
        Side::Top | Side::Bottom => p.index <= j,
        Side::Right => false,
    }
}

/// `(d^h, d^v)` from the chord list.
fn oracle_cuts(c: &CatalanState) -> (usize, usize) {
    let BoardShape { m, n } = c.shape();
    let chords = c.chords();
    let dh = (1..m)
        .map(|i| {
            chords
                .iter()
                .filter(|(a, b)| above(*a, i) != above(*b, i))
                .count()
        })
        .max()
        .unwrap_or(0);
    let dv = (1..n)
        .map(|j| {
            chords
                .iter()
                .filter(|(a, b)| west_of(*a, j) != west_of(*b, j))
                .count()
        })
        .max()
        .unwrap_or(0);
    (dh, dv)
}

fn oracle_realizable(c: &CatalanState) -> bool {
    let (dh, dv) = oracle_cuts(c);
    dh <= c.shape().n && dv <= c.shape().m
}

/// Gaussian binomial in `q` by summing `q^inv` over 0/1 words with `k` ones.
fn qbinom_by_inversions(m: u32, k: u32) -> Vec<i64> {
    let mut coeffs = vec![0i64; (k * (m - k) + 1) as usize];
    for word in 0u32..1 << m {
        if word.count_ones() != k {
            continue;
        }
        // An inversion is a 1 to the left of a 0.
        let mut inv = 0;
        for a in 0..m {
            for b in a + 1..m {
                if (word >> a) & 1 == 1 && (word >> b) & 1 == 0 {
                    inv += 1;
                }
            }
        }
        coeffs[inv] += 1;
    }
    coeffs
}

fn formula_oracle(m: usize, n: usize, k: usize) -> LaurentPoly {
    let h = (n - m) as i32;
    let (mi, ni, ki) = (m as i32, n as i32, k as i32);
    let base = mi * ni - 2 * (ki + h) * ki;
    let terms = qbinom_by_inversions(m as u32, k as u32)
        .into_iter()
        .enumerate()
        .map(|(e, c)| (base - 4 * e as i32, c));
    LaurentPoly::from_terms(terms).unwrap()
}

fn criterion_1() -> Outcome {
    let budget = Budget::default();
    let mut checked = 0;
    for m in 0..=12usize {
        for n in m..=12 {
            if m * n > 12 {
                continue;
            }
            for k in 0..=m {
                let params = NoReturnParams::new(m, n, k).unwrap();
                let state = no_return_state(params);
                let engine = expand(shape(m, n), Engine::BruteForce, &budget)
                    .map_err(|e| e.to_string())?
                    .get(&state);
                let expected = formula_oracle(m, n, k);
                ensure(engine == expected, || {
                    format!("m={m} n={n} k={k}: engine {engine}, formula {expected}")
                })?;
                let library = no_return_coefficient(params).map_err(|e| e.to_string())?;
                ensure(library == expected, || {
                    format!("m={m} n={n} k={k}: library formula {library}, oracle {expected}")
                })?;
                checked += 1;
            }
        }
    }
    let spot = |m, n, k| {
        let s = no_return_state(NoReturnParams::new(m, n, k).unwrap());
        coefficient(shape(m, n), &s, &budget).unwrap().to_string()
    };
    let spots = [spot(1, 1, 0), spot(1, 1, 1), spot(1, 2, 0), spot(2, 2, 1)];
    ensure(spots == ["A^1", "A^-1", "A^2", "A^2 + A^-2"], || {
        format!("spot values {spots:?}")
    })?;
    Ok(format!(
        "{checked} (m,n,k) triples exact; spot values {spots:?}"
    ))
}

fn criterion_2() -> Outcome {
    let boards = [
        (1, 1),
        (1, 2),
        (2, 1),
        (2, 2),
        (2, 3),
        (3, 2),
        (3, 3),
        (2, 4),
        (4, 2),
        (6, 1),
    ];
    let mut sizes = Vec::new();
    for (m, n) in boards {
        let s = shape(m, n);
        let resolved: BTreeSet<CatalanState> = (0..1u64 << (m * n))
            .map(|i| resolve(&MarkerGrid::from_index(s, i)).matching)
            .collect();
        let predicted: BTreeSet<CatalanState> = enumerate_states(s, DEFAULT_STATE_CAP)
            .unwrap()
            .into_iter()
            .filter(oracle_realizable)
            .collect();
        ensure(resolved == predicted, || {
            format!(
                "{m}x{n}: {} resolutions vs {} states with d_h<=n, d_v<=m",
                resolved.len(),
                predicted.len()
            )
        })?;
        sizes.push(format!("{m}x{n}:{}", resolved.len()));
    }
    Ok(format!("set equality on {}", sizes.join(" ")))
}

fn scan(m: usize, n: usize) -> (u128, u128, u128, u128) {
    let states = enumerate_states(shape(m, n), DEFAULT_STATE_CAP).unwrap();
    let mut counts = (states.len() as u128, 0, 0, 0);
    for c in &states {
        let (dh, dv) = oracle_cuts(c);
        counts.1 += u128::from(dh > n);
        counts.2 += u128::from(dv > m);
        counts.3 += u128::from(dh <= n && dv <= m);
    }
    counts
}

fn criterion_3() -> Outcome {
    for (m, n, expected) in [(2, 1, 1), (3, 3, 10), (6, 1, 365), (1, 2, 0)] {
        let formula = excluded_count(m, n).map_err(|e| e.to_string())?;
        let (_, scanned, _, _) = scan(m, n);
        ensure(formula == expected && scanned == expected, || {
            format!("T^h({m},{n}): formula {formula}, scan {scanned}, expected {expected}")
        })?;
    }
    for (m, n, expected) in [(1, 1, 2), (2, 2, 12), (3, 3, 112), (6, 1, 64)] {
        let formula = realizable_count(m, n).map_err(|e| e.to_string())?;
        let (total, eh, ev, scanned) = scan(m, n);
        ensure(formula == expected && scanned == expected, || {
            format!("realizable({m},{n}): formula {formula}, scan {scanned}, expected {expected}")
        })?;
        // Forbidden states split exactly into the two excluded families.
        ensure(total - scanned == eh + ev, || {
            format!("{m}x{n}: forbidden {} vs {eh}+{ev}", total - scanned)
        })?;
        ensure(ev == excluded_count(n, m).unwrap(), || {
            format!("{m}x{n}: vertical exclusions {ev} vs T^h({n},{m})")
        })?;
    }
    Ok("T^h = 1, 10, 365, 0; realizable = 2, 12, 112, 64".into())
}

fn walk(x: i64, y: i64, m: i64, n: i64, t: i64, s: Option<i64>) -> i128 {
    let d = y - x;
    if d <= -t || s.is_some_and(|s| d >= s) {
        return 0;
    }
    if (x, y) == (m, n) {
        return 1;
    }
    let mut total = 0;
    if x < m {
        total += walk(x + 1, y, m, n, t, s);
    }
    if y < n {
        total += walk(x, y + 1, m, n, t, s);
    }
    total
}

fn criterion_4() -> Outcome {
    for m in 0..=12 {
        for n in 0..=12 {
            excluded_count(m, n).map_err(|e| e.to_string())?;
        }
    }
    for k in 0..=10u64 {
        let b = ballot_count(k as i64, k as i64, 1).unwrap();
        let c = catalan_number(k).unwrap() as i128;
        ensure(b == c, || format!("ballot({k},{k},1) = {b}, Catalan = {c}"))?;
    }
    let mut walked = 0;
    for m in 0..=14i64 {
        for n in 0..=14 - m {
            for t in 1..=m + 1 {
                if n >= m - t {
                    let (f, w) = (ballot_count(m, n, t).unwrap(), walk(0, 0, m, n, t, None));
                    ensure(f == w, || format!("L({m},{n};{t}): formula {f}, walk {w}"))?;
                    walked += 1;
                }
                for s in 1..=n + 2 {
                    if (-t..=s).contains(&(n - m)) {
                        let f = ballot_count2(m, n, t, s).unwrap();
                        let w = walk(0, 0, m, n, t, Some(s));
                        ensure(f == w, || {
                            format!("L({m},{n};{t},{s}): formula {f}, walk {w}")
                        })?;
                        walked += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "two routes agree for m,n<=12; ballot=Catalan for k<=10; {walked} ballot values match path walks"
    ))
}

fn criterion_5() -> Outcome {
    let budget = Budget::default();
    let mut boards: Vec<(usize, usize)> =
        (0..=3).flat_map(|m| (0..=3).map(move |n| (m, n))).collect();
    boards.push((4, 4));
    let (mut realized, mut forbidden) = (0, 0);
    for (m, n) in boards {
        let s = shape(m, n);
        let keys = expand_transfer(s, &budget).map_err(|e| e.to_string())?;
        for c in enumerate_states(s, DEFAULT_STATE_CAP).unwrap() {
            match realize(&c) {
                Ok(grid) => {
                    let r = resolve(&grid);
                    ensure(r.matching == c && r.loops == 0, || {
                        format!(
                            "{c}: witness {grid} resolves to {} with {} loops",
                            r.matching, r.loops
                        )
                    })?;
                    ensure(keys.contains(&c), || format!("{c} realized but r(C)=0"))?;
                    realized += 1;
                }
                Err(RealizeError::Forbidden { .. }) => {
                    ensure(!keys.contains(&c), || format!("{c} reported forbidden"))?;
                    forbidden += 1;
                }
                Err(e) => return Err(format!("{c}: {e}")),
            }
        }
    }
    Ok(format!(
        "{realized} witnesses verified, {forbidden} forbidden states rejected"
    ))
}

/// Every Dyck word of semilength `k`.
fn dyck_words(k: usize) -> Vec<Vec<Step>> {
    fn go(open: usize, close: usize, k: usize, cur: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        if cur.len() == 2 * k {
            out.push(cur.clone());
            return;
        }
        if open < k {
            cur.push(Step::V);
            go(open + 1, close, k, cur, out);
            cur.pop();
        }
        if close < open {
            cur.push(Step::H);
            go(open, close + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, 0, k, &mut Vec::new(), &mut out);
    out
}

fn criterion_6() -> Outcome {
    let mut boards: Vec<(usize, usize)> =
        (0..=3).flat_map(|m| (0..=3).map(move |n| (m, n))).collect();
    boards.extend([(1, 5), (5, 1)]);
    let mut total = 0;
    for (m, n) in boards {
        let s = shape(m, n);
        let states = enumerate_states(s, DEFAULT_STATE_CAP).unwrap();
        let mut image = BTreeSet::new();
        for c in &states {
            let w = c.dyck_word();
            let heights: Vec<i64> = w
                .steps()
                .iter()
                .scan(0i64, |h, st| {
                    *h += if *st == Step::V { 1 } else { -1 };
                    Some(*h)
                })
                .collect();
            let balanced =
                heights.iter().all(|&h| h >= 0) && heights.last().copied().unwrap_or(0) == 0;
            ensure(balanced && w.len() == 2 * (m + n), || {
                format!("{c}: {w} is not a Dyck word of semilength {}", m + n)
            })?;
            let max = heights.iter().copied().max().unwrap_or(0) as usize;
            let (dh, _) = oracle_cuts(c);
            ensure((max <= n + 1) == (dh <= n), || {
                format!("{c}: max height {max}, d_h {dh}, n {n}")
            })?;
            let back = CatalanState::from_dyck_word(s, &w).map_err(|e| e.to_string())?;
            ensure(&back == c, || format!("{c} decodes back to {back}"))?;
            image.insert(w.steps().to_vec());
        }
        ensure(image.len() == states.len(), || {
            format!("{m}x{n}: encoding not injective")
        })?;
        let all: BTreeSet<Vec<Step>> = dyck_words(m + n).into_iter().collect();
        ensure(image == all, || {
            format!(
                "{m}x{n}: image has {} words, expected {}",
                image.len(),
                all.len()
            )
        })?;
        for word in &all {
            ensure(DyckWord::from_steps(word.clone()).is_some(), || {
                "generated word rejected".into()
            })?;
        }
        total += states.len();
    }
    Ok(format!(
        "bijection onto Dyck words and height criterion on {total} states"
    ))
}

fn criterion_7() -> Outcome {
    let budget = Budget::default();
    let mut boards = 0;
    for m in 1..=12usize {
        for n in 1..=12usize {
            if m * n > 12 {
                continue;
            }
            let brute =
                expand(shape(m, n), Engine::BruteForce, &budget).map_err(|e| e.to_string())?;
            let transfer =
                expand(shape(m, n), Engine::Transfer, &budget).map_err(|e| e.to_string())?;
            let (a, b) = (brute.to_json("table"), transfer.to_json("table"));
            ensure(a == b, || format!("{m}x{n}: serialized tables differ"))?;
            boards += 1;
        }
    }
    Ok(format!("byte-identical tables on {boards} boards"))
}

fn criterion_8() -> Outcome {
    let budget = Budget::default();
    let start = Instant::now();
    let t44 = expand(shape(4, 4), Engine::BruteForce, &budget).map_err(|e| e.to_string())?;
    let brute = start.elapsed();
    ensure(brute < Duration::from_secs(5), || {
        format!("expand(4,4) took {brute:?}")
    })?;
    let start = Instant::now();
    let t55 = expand_transfer(shape(5, 5), &budget).map_err(|e| e.to_string())?;
    let transfer = start.elapsed();
    ensure(t44.len() as u128 == realizable_count(4, 4).unwrap(), || {
        "4x4 key count".into()
    })?;
    ensure(t55.len() as u128 == realizable_count(5, 5).unwrap(), || {
        "5x5 key count".into()
    })?;
    Ok(format!(
        "expand(4,4) brute {:.2}s ({} states); expand_transfer(5,5) {:.2}s ({} states)",
        brute.as_secs_f64(),
        t44.len(),
        transfer.as_secs_f64(),
        t55.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "no-return coefficients match the closed formula",
            criterion_1,
        ),
        (
            "resolutions are exactly the states with d_h<=n and d_v<=m",
            criterion_2,
        ),
        ("census counts match exhaustive scans", criterion_3),
        ("formula routes and ballot oracles agree", criterion_4),
        ("realization roundtrip and totality", criterion_5),
        (
            "Dyck encoding is a bijection with the height criterion",
            criterion_6,
        ),
        (
            "brute-force and transfer engines agree byte for byte",
            criterion_7,
        ),
        ("performance floor", criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} [{detail}] ({secs:.2}s)", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {}: {name} [{why}] ({secs:.2}s)", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
