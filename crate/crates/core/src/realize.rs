//! Explicit witnesses for realizable Catalan states.
//!
//! A state that saturates a separating line is cut along it and the halves
//! are realized on stacked (or side-by-side) sub-boards. Otherwise the state
//! has a top corner connection or a top return, and a single row of markers
//! consumes that chord while handing the rest of the state to a board with
//! one row fewer.

use thiserror::Error;

use crate::skein::{Marker, MarkerGrid};
use crate::states::{
    bottom, left, right, top, Axis, BoardShape, BoundaryPoint, CatalanState, Side,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("state is forbidden: d_h={d_h} d_v={d_v}")]
    Forbidden { d_h: usize, d_v: usize },
    #[error("internal realization failure: {0}")]
    Internal(String),
}

fn internal(what: impl std::fmt::Display) -> RealizeError {
    RealizeError::Internal(what.to_string())
}

/// A marker grid whose resolution is `state` with no closed loops.
pub fn realize(state: &CatalanState) -> Result<MarkerGrid, RealizeError> {
    let r = state.realizability();
    if !r.realizable {
        return Err(RealizeError::Forbidden {
            d_h: r.d_h,
            d_v: r.d_v,
        });
    }
    realize_inner(state)
}

fn realize_inner(state: &CatalanState) -> Result<MarkerGrid, RealizeError> {
    let shape = state.shape();
    let BoardShape { m, n } = shape;
    if m == 0 || n == 0 {
        let straight = CatalanState::straight(shape).expect("degenerate board");
        if *state != straight {
            return Err(internal(format!("{state} on a degenerate {shape} board")));
        }
        return Ok(MarkerGrid::uniform(shape, Marker::Positive));
    }
    let r = state.realizability();
    if !r.realizable {
        return Err(internal(format!(
            "intermediate state {state} on {shape} is forbidden (d_h={}, d_v={})",
            r.d_h, r.d_v
        )));
    }
    if m >= 2 && r.d_h == n {
        let line = state
            .first_line_with_cut(Axis::Horizontal, n)
            .ok_or_else(|| internal("no saturated horizontal line"))?;
        let (upper, lower) = state.split(line).map_err(internal)?;
        let grid = realize_inner(&upper)?
            .stack(&realize_inner(&lower)?)
            .map_err(internal)?;
        return Ok(grid);
    }
    if n >= 2 && r.d_v == m {
        let line = state
            .first_line_with_cut(Axis::Vertical, m)
            .ok_or_else(|| internal("no saturated vertical line"))?;
        let (west, east) = state.split(line).map_err(internal)?;
        let grid = realize_inner(&west)?
            .beside(&realize_inner(&east)?)
            .map_err(internal)?;
        return Ok(grid);
    }
    let (row, peeled) = top_row_gadget(state)?;
    let first = MarkerGrid::new(BoardShape::new(1, n).map_err(internal)?, row).map_err(internal)?;
    first.stack(&realize_inner(&peeled)?).map_err(internal)
}

/// One row of markers consuming a top corner or top return of `state`,
/// together with the state left for the remaining `m - 1` rows.
///
/// Priority: corner `T1-L1` (all positive), corner `Tn-R1` (all negative),
/// then the leftmost return `Ti-T(i+1)` (negative in columns `1..=i`,
/// positive after).
pub fn top_row_gadget(state: &CatalanState) -> Result<(Vec<Marker>, CatalanState), RealizeError> {
    let shape = state.shape();
    let BoardShape { m, n } = shape;
    if m == 0 || n == 0 {
        return Err(internal(format!("no top row to peel on {shape}")));
    }
    // `new_tops[k]` is the old point that becomes `T(k+1)` of the peeled
    // board; `consumed` is the chord the row realizes.
    let (row, new_tops, consumed) = if state.has_chord(top(1), left(1)) {
        let tops: Vec<_> = (2..=n).map(top).chain([right(1)]).collect();
        (vec![Marker::Positive; n], tops, (top(1), left(1)))
    } else if state.has_chord(top(n), right(1)) {
        let tops: Vec<_> = [left(1)].into_iter().chain((1..n).map(top)).collect();
        (vec![Marker::Negative; n], tops, (top(n), right(1)))
    } else if let Some(&i) = state.returns(Side::Top).first() {
        let tops: Vec<_> = [left(1)]
            .into_iter()
            .chain((1..i).map(top))
            .chain((i + 2..=n).map(top))
            .chain([right(1)])
            .collect();
        let row = (1..=n)
            .map(|j| {
                if j <= i {
                    Marker::Negative
                } else {
                    Marker::Positive
                }
            })
            .collect();
        (row, tops, (top(i), top(i + 1)))
    } else {
        return Err(internal(format!(
            "{state} has neither a top corner connection nor a top return"
        )));
    };
    debug_assert_eq!(new_tops.len(), n);

    let target = BoardShape::new(m - 1, n).map_err(internal)?;
    let relabel = |p: BoundaryPoint| -> Option<BoundaryPoint> {
        if let Some(k) = new_tops.iter().position(|&q| q == p) {
            return Some(top(k + 1));
        }
        match p.side {
            Side::Bottom => Some(bottom(p.index)),
            Side::Left if p.index >= 2 => Some(left(p.index - 1)),
            Side::Right if p.index >= 2 => Some(right(p.index - 1)),
            _ => None,
        }
    };
    let mut pairs = Vec::with_capacity(target.num_points() / 2);
    for (a, b) in state.chords() {
        if (a, b) == consumed || (b, a) == consumed {
            continue;
        }
        match (relabel(a), relabel(b)) {
            (Some(x), Some(y)) => pairs.push((x, y)),
            _ => {
                return Err(internal(format!(
                    "chord {a}-{b} has no place after peeling"
                )))
            }
        }
    }
    let peeled = CatalanState::from_pairs(target, pairs).map_err(internal)?;
    Ok((row, peeled))
}
