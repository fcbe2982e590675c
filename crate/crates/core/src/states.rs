//! Catalan states of the `m x n` rectangle.
//!
//! The `2(m+n)` boundary points are labelled `T1..Tn` (top, left to right),
//! `R1..Rm` (right, top to bottom), `B1..Bn` (bottom, left to right) and
//! `L1..Lm` (left, top to bottom). Their clockwise cyclic order is
//! `T1..Tn, R1..Rm, Bn..B1, Lm..L1`; a [`CatalanState`] stores its matching as
//! a partner array indexed by that cyclic position.
//!
//! Text form is a comma separated chord list such as `T1-L1,R1-B1`. The
//! canonical text order ranks points `T1<..<Tn<R1<..<Rm<B1<..<Bn<L1<..<Lm`;
//! each chord is written smaller endpoint first and chords are sorted by that
//! endpoint. [`CatalanState`]'s `Ord` agrees with this order.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("syntax error in {text:?}: {reason}")]
    Syntax { text: String, reason: String },
    #[error("point {point} is out of range for a {m}x{n} board")]
    PointOutOfRange { point: String, m: usize, n: usize },
    #[error("point {0} appears in more than one chord")]
    RepeatedPoint(String),
    #[error("incomplete matching: point {0} is not covered")]
    IncompleteMatching(String),
    #[error("chords {0} and {1} cross")]
    Crossing(String, String),
    #[error("board {m}x{n} is too large (m + n must be at most {max})")]
    BoardTooLarge { m: usize, n: usize, max: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("glued side has a return: chord {0}")]
    ReturnOnGluedSide(String),
    #[error("line {line} is cut {cut} times, splitting needs {required}")]
    Unsaturated {
        line: SeparatingLine,
        cut: usize,
        required: usize,
    },
    #[error("line {line} does not exist on a {m}x{n} board")]
    InvalidLine {
        line: SeparatingLine,
        m: usize,
        n: usize,
    },
    #[error("{count} states exceed the enumeration cap of {cap}")]
    TooManyStates { count: u128, cap: u128 },
}

/// Upper bound on `m + n`, so that point indices fit in a `u16`.
pub const MAX_SEMILENGTH: usize = 4096;

const UNSET: u16 = u16::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoardShape {
    pub m: usize,
    pub n: usize,
}

impl BoardShape {
    pub fn new(m: usize, n: usize) -> Result<Self, StateError> {
        if m + n > MAX_SEMILENGTH {
            return Err(StateError::BoardTooLarge {
                m,
                n,
                max: MAX_SEMILENGTH,
            });
        }
        Ok(Self { m, n })
    }

    pub fn num_points(&self) -> usize {
        2 * (self.m + self.n)
    }

    pub fn transposed(&self) -> Self {
        Self {
            m: self.n,
            n: self.m,
        }
    }

    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::Top | Side::Bottom => self.n,
            Side::Left | Side::Right => self.m,
        }
    }

    pub fn point(&self, side: Side, index: usize) -> Result<BoundaryPoint, StateError> {
        if index == 0 || index > self.side_len(side) {
            return Err(StateError::PointOutOfRange {
                point: format!("{}{}", side.letter(), index),
                m: self.m,
                n: self.n,
            });
        }
        Ok(BoundaryPoint { side, index })
    }

    /// Clockwise position of `p`: `T1..Tn, R1..Rm, Bn..B1, Lm..L1`.
    pub fn cyc(&self, p: BoundaryPoint) -> usize {
        let (m, n) = (self.m, self.n);
        match p.side {
            Side::Top => p.index - 1,
            Side::Right => n + p.index - 1,
            Side::Bottom => n + m + (n - p.index),
            Side::Left => 2 * n + m + (m - p.index),
        }
    }

    pub fn point_at(&self, cyc: usize) -> BoundaryPoint {
        let (m, n) = (self.m, self.n);
        let (side, index) = if cyc < n {
            (Side::Top, cyc + 1)
        } else if cyc < n + m {
            (Side::Right, cyc - n + 1)
        } else if cyc < 2 * n + m {
            (Side::Bottom, 2 * n + m - cyc)
        } else {
            (Side::Left, 2 * (n + m) - cyc)
        };
        BoundaryPoint { side, index }
    }

    /// Position of `p` in the canonical text order `T.. R.. B.. L..`.
    pub fn rank(&self, p: BoundaryPoint) -> usize {
        let (m, n) = (self.m, self.n);
        match p.side {
            Side::Top => p.index - 1,
            Side::Right => n + p.index - 1,
            Side::Bottom => n + m + p.index - 1,
            Side::Left => 2 * n + m + p.index - 1,
        }
    }

    fn point_of_rank(&self, rank: usize) -> BoundaryPoint {
        let (m, n) = (self.m, self.n);
        let (side, index) = if rank < n {
            (Side::Top, rank + 1)
        } else if rank < n + m {
            (Side::Right, rank - n + 1)
        } else if rank < 2 * n + m {
            (Side::Bottom, rank - n - m + 1)
        } else {
            (Side::Left, rank - 2 * n - m + 1)
        };
        BoundaryPoint { side, index }
    }

    pub fn lines(&self, axis: Axis) -> impl Iterator<Item = SeparatingLine> {
        let count = match axis {
            Axis::Horizontal => self.m.saturating_sub(1),
            Axis::Vertical => self.n.saturating_sub(1),
        };
        (1..=count).map(move |index| SeparatingLine { axis, index })
    }

    pub fn has_line(&self, line: SeparatingLine) -> bool {
        let count = match line.axis {
            Axis::Horizontal => self.m,
            Axis::Vertical => self.n,
        };
        line.index >= 1 && line.index < count
    }
}

impl fmt::Display for BoardShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Top,
    Right,
    Bottom,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Top, Side::Right, Side::Bottom, Side::Left];

    pub fn letter(self) -> char {
        match self {
            Side::Top => 'T',
            Side::Right => 'R',
            Side::Bottom => 'B',
            Side::Left => 'L',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundaryPoint {
    pub side: Side,
    /// 1-based.
    pub index: usize,
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side.letter(), self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// A line between rows `index` and `index + 1` (horizontal) or between
/// columns `index` and `index + 1` (vertical).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeparatingLine {
    pub axis: Axis,
    pub index: usize,
}

impl SeparatingLine {
    pub fn horizontal(index: usize) -> Self {
        Self {
            axis: Axis::Horizontal,
            index,
        }
    }

    pub fn vertical(index: usize) -> Self {
        Self {
            axis: Axis::Vertical,
            index,
        }
    }

    /// Whether `p` lies on the top (horizontal) or left (vertical) side.
    fn contains(&self, p: BoundaryPoint) -> bool {
        match self.axis {
            Axis::Horizontal => match p.side {
                Side::Top => true,
                Side::Bottom => false,
                Side::Left | Side::Right => p.index <= self.index,
            },
            Axis::Vertical => match p.side {
                Side::Left => true,
                Side::Right => false,
                Side::Top | Side::Bottom => p.index <= self.index,
            },
        }
    }
}

impl fmt::Display for SeparatingLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.axis {
            Axis::Horizontal => write!(f, "h{}", self.index),
            Axis::Vertical => write!(f, "v{}", self.index),
        }
    }
}

/// A noncrossing perfect matching of the boundary points of a board.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CatalanState {
    shape: BoardShape,
    partner: Box<[u16]>,
}

impl CatalanState {
    /// Validates a partner array indexed by cyclic position.
    pub fn from_partners(shape: BoardShape, partner: &[usize]) -> Result<Self, StateError> {
        let total = shape.num_points();
        if partner.len() != total {
            return Err(StateError::ShapeMismatch(format!(
                "{} partners for a {shape} board",
                partner.len()
            )));
        }
        for (p, &q) in partner.iter().enumerate() {
            if q >= total {
                return Err(StateError::PointOutOfRange {
                    point: format!("#{q}"),
                    m: shape.m,
                    n: shape.n,
                });
            }
            if q == p || partner[q] != p {
                return Err(StateError::RepeatedPoint(shape.point_at(p).to_string()));
            }
        }
        let state = Self {
            shape,
            partner: partner.iter().map(|&q| q as u16).collect(),
        };
        state.check_noncrossing()?;
        Ok(state)
    }

    pub fn from_pairs<I>(shape: BoardShape, pairs: I) -> Result<Self, StateError>
    where
        I: IntoIterator<Item = (BoundaryPoint, BoundaryPoint)>,
    {
        let mut partner = vec![UNSET; shape.num_points()];
        for (a, b) in pairs {
            for p in [a, b] {
                shape.point(p.side, p.index)?;
            }
            let (ca, cb) = (shape.cyc(a), shape.cyc(b));
            for (c, p) in [(ca, a), (cb, b)] {
                if partner[c] != UNSET {
                    return Err(StateError::RepeatedPoint(p.to_string()));
                }
            }
            if ca == cb {
                return Err(StateError::RepeatedPoint(a.to_string()));
            }
            partner[ca] = cb as u16;
            partner[cb] = ca as u16;
        }
        if let Some(c) = partner.iter().position(|&q| q == UNSET) {
            return Err(StateError::IncompleteMatching(
                shape.point_at(c).to_string(),
            ));
        }
        let state = Self {
            shape,
            partner: partner.into_boxed_slice(),
        };
        state.check_noncrossing()?;
        Ok(state)
    }

    /// Parses the chord-list grammar; chords may come in any order.
    pub fn parse(text: &str, shape: BoardShape) -> Result<Self, StateError> {
        let syntax = |reason: &str| StateError::Syntax {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = text.trim();
        let mut pairs = Vec::new();
        if !trimmed.is_empty() {
            for chunk in trimmed.split(',') {
                let (a, b) = chunk
                    .trim()
                    .split_once('-')
                    .ok_or_else(|| syntax("chord must be written point-point"))?;
                let a = parse_point(a.trim(), shape)
                    .map_err(|e| e.unwrap_or_else(|| syntax("bad point")))?;
                let b = parse_point(b.trim(), shape)
                    .map_err(|e| e.unwrap_or_else(|| syntax("bad point")))?;
                pairs.push((a, b));
            }
        }
        Self::from_pairs(shape, pairs)
    }

    /// Builds a state without validating; callers guarantee a noncrossing
    /// perfect matching.
    pub(crate) fn from_partners_unchecked(shape: BoardShape, partner: Box<[u16]>) -> Self {
        debug_assert_eq!(partner.len(), shape.num_points());
        let state = Self { shape, partner };
        debug_assert!(state.check_noncrossing().is_ok(), "{state}");
        state
    }

    fn check_noncrossing(&self) -> Result<(), StateError> {
        let mut stack: Vec<usize> = Vec::new();
        for p in 0..self.partner.len() {
            let q = self.partner[p] as usize;
            if q > p {
                stack.push(p);
            } else {
                let top = stack.pop().expect("partner seen earlier");
                if top != q {
                    return Err(StateError::Crossing(
                        self.chord_text(top),
                        self.chord_text(p),
                    ));
                }
            }
        }
        Ok(())
    }

    fn chord_text(&self, cyc: usize) -> String {
        let a = self.shape.point_at(cyc);
        let b = self.shape.point_at(self.partner[cyc] as usize);
        if self.shape.rank(a) < self.shape.rank(b) {
            format!("{a}-{b}")
        } else {
            format!("{b}-{a}")
        }
    }

    pub fn shape(&self) -> BoardShape {
        self.shape
    }

    /// The trivial state of a degenerate board: `Tj-Bj` when `m == 0`,
    /// `Li-Ri` when `n == 0`. `None` for boards with both sides nonempty.
    pub fn straight(shape: BoardShape) -> Option<Self> {
        if shape.m != 0 && shape.n != 0 {
            return None;
        }
        let pairs: Vec<_> = if shape.m == 0 {
            (1..=shape.n).map(|j| (top(j), bottom(j))).collect()
        } else {
            (1..=shape.m).map(|i| (left(i), right(i))).collect()
        };
        Some(Self::from_pairs(shape, pairs).expect("straight state is valid"))
    }

    pub fn partner_cyc(&self, cyc: usize) -> usize {
        self.partner[cyc] as usize
    }

    pub fn partner_of(&self, p: BoundaryPoint) -> BoundaryPoint {
        self.shape.point_at(self.partner_cyc(self.shape.cyc(p)))
    }

    pub fn has_chord(&self, a: BoundaryPoint, b: BoundaryPoint) -> bool {
        self.partner_of(a) == b
    }

    /// Chords in canonical order.
    pub fn chords(&self) -> Vec<(BoundaryPoint, BoundaryPoint)> {
        let shape = self.shape;
        (0..shape.num_points())
            .filter_map(|r| {
                let a = shape.point_of_rank(r);
                let b = self.partner_of(a);
                (shape.rank(b) > r).then_some((a, b))
            })
            .collect()
    }

    pub fn cut_count(&self, line: SeparatingLine) -> Result<usize, StateError> {
        if !self.shape.has_line(line) {
            return Err(StateError::InvalidLine {
                line,
                m: self.shape.m,
                n: self.shape.n,
            });
        }
        Ok(self.cut_count_unchecked(line))
    }

    fn cut_count_unchecked(&self, line: SeparatingLine) -> usize {
        (0..self.partner.len())
            .filter(|&p| {
                let q = self.partner_cyc(p);
                p < q
                    && line.contains(self.shape.point_at(p))
                        != line.contains(self.shape.point_at(q))
            })
            .count()
    }

    /// `d^h` or `d^v`: the largest cut count over the lines of `axis`, 0 when
    /// there are none.
    pub fn max_cut(&self, axis: Axis) -> usize {
        self.shape
            .lines(axis)
            .map(|l| self.cut_count_unchecked(l))
            .max()
            .unwrap_or(0)
    }

    /// Smallest line of `axis` attaining `cut` crossings.
    pub fn first_line_with_cut(&self, axis: Axis, cut: usize) -> Option<SeparatingLine> {
        self.shape
            .lines(axis)
            .find(|&l| self.cut_count_unchecked(l) == cut)
    }

    pub fn realizability(&self) -> Realizability {
        let d_h = self.max_cut(Axis::Horizontal);
        let d_v = self.max_cut(Axis::Vertical);
        Realizability {
            realizable: d_h <= self.shape.n && d_v <= self.shape.m,
            d_h,
            d_v,
        }
    }

    pub fn is_realizable(&self) -> bool {
        self.realizability().realizable
    }

    /// Indices `i` with chord `{side_i, side_(i+1)}`.
    pub fn returns(&self, side: Side) -> Vec<usize> {
        let len = self.shape.side_len(side);
        (1..len)
            .filter(|&i| {
                self.has_chord(
                    BoundaryPoint { side, index: i },
                    BoundaryPoint { side, index: i + 1 },
                )
            })
            .collect()
    }

    fn has_same_side_chord(&self, side: Side) -> Option<String> {
        (1..=self.shape.side_len(side)).find_map(|i| {
            let p = BoundaryPoint { side, index: i };
            (self.partner_of(p).side == side).then(|| self.chord_text(self.shape.cyc(p)))
        })
    }

    pub fn corner_connections(&self) -> CornerConnections {
        let BoardShape { m, n } = self.shape;
        if m == 0 || n == 0 {
            return CornerConnections::default();
        }
        CornerConnections {
            top_left: self.has_chord(top(1), left(1)),
            top_right: self.has_chord(top(n), right(1)),
            bottom_right: self.has_chord(bottom(n), right(m)),
            bottom_left: self.has_chord(bottom(1), left(m)),
        }
    }

    fn relabel<F>(&self, target: BoardShape, map: F) -> CatalanState
    where
        F: Fn(BoundaryPoint) -> BoundaryPoint,
    {
        let old = self.shape;
        let mut partner = vec![UNSET; target.num_points()].into_boxed_slice();
        for p in 0..old.num_points() {
            let a = target.cyc(map(old.point_at(p)));
            let b = target.cyc(map(old.point_at(self.partner_cyc(p))));
            partner[a] = b as u16;
        }
        CatalanState::from_partners_unchecked(target, partner)
    }

    /// Reflection in the main diagonal: the state on the `n x m` board with
    /// `Ti -> Li`, `Bi -> Ri`, `Lj -> Tj`, `Rj -> Bj`.
    pub fn transpose(&self) -> CatalanState {
        self.relabel(self.shape.transposed(), |p| BoundaryPoint {
            side: match p.side {
                Side::Top => Side::Left,
                Side::Bottom => Side::Right,
                Side::Left => Side::Top,
                Side::Right => Side::Bottom,
            },
            index: p.index,
        })
    }

    /// Left-right mirror image on the same board.
    pub fn reflect_horizontal(&self) -> CatalanState {
        let n = self.shape.n;
        self.relabel(self.shape, |p| match p.side {
            Side::Top | Side::Bottom => BoundaryPoint {
                side: p.side,
                index: n + 1 - p.index,
            },
            Side::Left => right(p.index),
            Side::Right => left(p.index),
        })
    }

    /// `C1 *_v C2` (bottom of `self` glued to top of `other`) or `C1 *_h C2`
    /// (right of `self` glued to left of `other`).
    pub fn compose(&self, other: &CatalanState, axis: Axis) -> Result<CatalanState, StateError> {
        let (s1, s2) = (self.shape, other.shape);
        let (glue1, glue2, target) = match axis {
            Axis::Vertical => {
                if s1.n != s2.n {
                    return Err(StateError::ShapeMismatch(format!(
                        "vertical composition of {s1} and {s2}"
                    )));
                }
                (Side::Bottom, Side::Top, BoardShape::new(s1.m + s2.m, s1.n)?)
            }
            Axis::Horizontal => {
                if s1.m != s2.m {
                    return Err(StateError::ShapeMismatch(format!(
                        "horizontal composition of {s1} and {s2}"
                    )));
                }
                (Side::Right, Side::Left, BoardShape::new(s1.m, s1.n + s2.n)?)
            }
        };
        if let Some(chord) = self.has_same_side_chord(glue1) {
            return Err(StateError::ReturnOnGluedSide(chord));
        }
        if let Some(chord) = other.has_same_side_chord(glue2) {
            return Err(StateError::ReturnOnGluedSide(chord));
        }
        // Maps a point of either factor to its label on the composite, or
        // `None` for interface points.
        let outer = |first: bool, p: BoundaryPoint| -> Option<BoundaryPoint> {
            let shift = |side, index| Some(BoundaryPoint { side, index });
            match (axis, first, p.side) {
                (Axis::Vertical, true, Side::Bottom) | (Axis::Vertical, false, Side::Top) => None,
                (Axis::Horizontal, true, Side::Right) | (Axis::Horizontal, false, Side::Left) => {
                    None
                }
                (Axis::Vertical, false, Side::Left | Side::Right) => shift(p.side, p.index + s1.m),
                (Axis::Horizontal, false, Side::Top | Side::Bottom) => {
                    shift(p.side, p.index + s1.n)
                }
                _ => Some(p),
            }
        };
        let mut partner = vec![UNSET; target.num_points()].into_boxed_slice();
        let factors = [self, other];
        for (fi, start_state) in factors.iter().enumerate() {
            for c in 0..start_state.shape.num_points() {
                let start = start_state.shape.point_at(c);
                let Some(from) = outer(fi == 0, start) else {
                    continue;
                };
                let (mut fi, mut p) = (fi, start);
                let to = loop {
                    let q = factors[fi].partner_of(p);
                    match outer(fi == 0, q) {
                        Some(t) => break t,
                        None => {
                            // Cross the interface into the other factor.
                            fi = 1 - fi;
                            p = BoundaryPoint {
                                side: if fi == 0 { glue1 } else { glue2 },
                                index: q.index,
                            };
                        }
                    }
                };
                partner[target.cyc(from)] = target.cyc(to) as u16;
            }
        }
        Ok(CatalanState::from_partners_unchecked(target, partner))
    }

    /// Cuts along a saturated line (cut count `n` for horizontal, `m` for
    /// vertical). Returns the top/left part first; `a.compose(&b, axis)`
    /// reassembles `self`, with `axis` vertical for horizontal lines.
    pub fn split(&self, line: SeparatingLine) -> Result<(CatalanState, CatalanState), StateError> {
        let shape = self.shape;
        let cut = self.cut_count(line)?;
        let (first, second, required) = match line.axis {
            Axis::Horizontal => (
                BoardShape::new(line.index, shape.n)?,
                BoardShape::new(shape.m - line.index, shape.n)?,
                shape.n,
            ),
            Axis::Vertical => (
                BoardShape::new(shape.m, line.index)?,
                BoardShape::new(shape.m, shape.n - line.index)?,
                shape.m,
            ),
        };
        if cut != required {
            return Err(StateError::Unsaturated {
                line,
                cut,
                required,
            });
        }
        let i = line.index;
        // Near side of the line, ordered from the line's left (resp. top) end
        // so that the k-th crossing chord meets the line at position k.
        let arc: Vec<BoundaryPoint> = match line.axis {
            Axis::Horizontal => (1..=i)
                .rev()
                .map(left)
                .chain((1..=shape.n).map(top))
                .chain((1..=i).map(right))
                .collect(),
            Axis::Vertical => (1..=i)
                .rev()
                .map(top)
                .chain((1..=shape.m).map(left))
                .chain((1..=i).map(bottom))
                .collect(),
        };
        let (glue1, glue2) = match line.axis {
            Axis::Horizontal => (Side::Bottom, Side::Top),
            Axis::Vertical => (Side::Right, Side::Left),
        };
        let to_second = |p: BoundaryPoint| match (line.axis, p.side) {
            (Axis::Horizontal, Side::Left | Side::Right) => BoundaryPoint {
                side: p.side,
                index: p.index - i,
            },
            (Axis::Vertical, Side::Top | Side::Bottom) => BoundaryPoint {
                side: p.side,
                index: p.index - i,
            },
            _ => p,
        };
        let mut part1 = vec![UNSET; first.num_points()].into_boxed_slice();
        let mut part2 = vec![UNSET; second.num_points()].into_boxed_slice();
        let link = |part: &mut [u16], s: BoardShape, a: BoundaryPoint, b: BoundaryPoint| {
            let (ca, cb) = (s.cyc(a), s.cyc(b));
            part[ca] = cb as u16;
            part[cb] = ca as u16;
        };
        let mut slot = 0;
        for &a in &arc {
            let b = self.partner_of(a);
            if line.contains(b) {
                if shape.rank(a) < shape.rank(b) {
                    link(&mut part1, first, a, b);
                }
            } else {
                slot += 1;
                link(
                    &mut part1,
                    first,
                    a,
                    BoundaryPoint {
                        side: glue1,
                        index: slot,
                    },
                );
                link(
                    &mut part2,
                    second,
                    to_second(b),
                    BoundaryPoint {
                        side: glue2,
                        index: slot,
                    },
                );
            }
        }
        for c in 0..shape.num_points() {
            let a = shape.point_at(c);
            let b = self.partner_of(a);
            if !line.contains(a) && !line.contains(b) && shape.rank(a) < shape.rank(b) {
                link(&mut part2, second, to_second(a), to_second(b));
            }
        }
        Ok((
            CatalanState::from_partners_unchecked(first, part1),
            CatalanState::from_partners_unchecked(second, part2),
        ))
    }

    /// The Dyck word of the boundary sweep `T1..Tn, L1, R1, .., Lm, Rm,
    /// B1..Bn`: `V` when the partner is still unvisited, `H` otherwise.
    pub fn dyck_word(&self) -> DyckWord {
        let shape = self.shape;
        let mut seen = vec![false; shape.num_points()];
        let mut steps = Vec::with_capacity(shape.num_points());
        for p in sweep_order(shape) {
            let c = shape.cyc(p);
            steps.push(if seen[self.partner_cyc(c)] {
                Step::H
            } else {
                Step::V
            });
            seen[c] = true;
        }
        DyckWord::from_steps(steps).expect("sweep of a matching is balanced")
    }

    /// Inverse of [`CatalanState::dyck_word`].
    pub fn from_dyck_word(shape: BoardShape, word: &DyckWord) -> Result<CatalanState, StateError> {
        if word.len() != shape.num_points() {
            return Err(StateError::ShapeMismatch(format!(
                "Dyck word of length {} for a {shape} board",
                word.len()
            )));
        }
        // Swept points form a contiguous arc of the cycle; `open` holds its
        // unmatched points in clockwise order. A point joining at one end can
        // only pair with the open point nearest that end.
        let mut open: VecDeque<usize> = VecDeque::new();
        let mut partner = vec![UNSET; shape.num_points()].into_boxed_slice();
        for (p, &step) in sweep_order(shape).zip(word.steps()) {
            let c = shape.cyc(p);
            let at_front = matches!(p.side, Side::Left | Side::Bottom);
            match step {
                Step::V if at_front => open.push_front(c),
                Step::V => open.push_back(c),
                Step::H => {
                    let q = if at_front {
                        open.pop_front()
                    } else {
                        open.pop_back()
                    }
                    .expect("Dyck word never goes below zero");
                    partner[c] = q as u16;
                    partner[q] = c as u16;
                }
            }
        }
        let state = CatalanState { shape, partner };
        state.check_noncrossing()?;
        Ok(state)
    }
}

pub(crate) fn top(index: usize) -> BoundaryPoint {
    BoundaryPoint {
        side: Side::Top,
        index,
    }
}

pub(crate) fn bottom(index: usize) -> BoundaryPoint {
    BoundaryPoint {
        side: Side::Bottom,
        index,
    }
}

pub(crate) fn left(index: usize) -> BoundaryPoint {
    BoundaryPoint {
        side: Side::Left,
        index,
    }
}

pub(crate) fn right(index: usize) -> BoundaryPoint {
    BoundaryPoint {
        side: Side::Right,
        index,
    }
}

fn sweep_order(shape: BoardShape) -> impl Iterator<Item = BoundaryPoint> {
    (1..=shape.n)
        .map(top)
        .chain((1..=shape.m).flat_map(|i| [left(i), right(i)]))
        .chain((1..=shape.n).map(bottom))
}

/// Parses `T3` style point names. `Err(None)` signals a syntax problem the
/// caller reports with its own context.
fn parse_point(text: &str, shape: BoardShape) -> Result<BoundaryPoint, Option<StateError>> {
    let mut chars = text.chars();
    let side = match chars.next() {
        Some('T') => Side::Top,
        Some('R') => Side::Right,
        Some('B') => Side::Bottom,
        Some('L') => Side::Left,
        _ => return Err(None),
    };
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(None);
    }
    let index: usize = digits.parse().map_err(|_| {
        Some(StateError::PointOutOfRange {
            point: text.to_string(),
            m: shape.m,
            n: shape.n,
        })
    })?;
    shape.point(side, index).map_err(Some)
}

impl fmt::Display for CatalanState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.chords().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}-{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CatalanState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CatalanState({}: {})", self.shape, self)
    }
}

impl Ord for CatalanState {
    /// Shape first, then lexicographic order of partners read in canonical
    /// rank order, which coincides with comparing canonical chord lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.shape.cmp(&other.shape).then_with(|| {
            let shape = self.shape;
            for r in 0..shape.num_points() {
                let c = shape.cyc(shape.point_of_rank(r));
                let a = shape.rank(shape.point_at(self.partner_cyc(c)));
                let b = shape.rank(shape.point_at(other.partner_cyc(c)));
                match a.cmp(&b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for CatalanState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Realizability {
    pub realizable: bool,
    pub d_h: usize,
    pub d_v: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CornerConnections {
    /// `T1-L1`
    pub top_left: bool,
    /// `Tn-R1`
    pub top_right: bool,
    /// `Bn-Rm`
    pub bottom_right: bool,
    /// `B1-Lm`
    pub bottom_left: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    V,
    H,
}

/// A balanced word over `V` (+1) and `H` (-1) whose prefix heights stay
/// nonnegative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyckWord {
    steps: Vec<Step>,
    /// `heights[j]` is the height after `j` steps; `heights[0] == 0`.
    heights: Vec<usize>,
}

impl DyckWord {
    pub fn from_steps(steps: Vec<Step>) -> Option<Self> {
        let mut heights = Vec::with_capacity(steps.len() + 1);
        let mut h: usize = 0;
        heights.push(h);
        for s in &steps {
            h = match s {
                Step::V => h + 1,
                Step::H => h.checked_sub(1)?,
            };
            heights.push(h);
        }
        (h == 0).then_some(Self { steps, heights })
    }

    pub fn parse(text: &str) -> Option<Self> {
        let steps = text
            .chars()
            .map(|c| match c {
                'V' => Some(Step::V),
                'H' => Some(Step::H),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Self::from_steps(steps)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn max_height(&self) -> usize {
        self.heights.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for DyckWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            f.write_str(match s {
                Step::V => "V",
                Step::H => "H",
            })?;
        }
        Ok(())
    }
}

/// Exact Catalan number, `None` on `u128` overflow.
pub fn catalan(k: usize) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c.checked_mul(2 * (2 * i + 1))? / (i + 2);
    }
    Some(c)
}

/// Streams every Catalan state of `shape` in canonical order, holding only
/// the current partial matching.
pub struct StateIter {
    shape: BoardShape,
    /// Partner by cyclic position, `UNSET` when free.
    partner: Vec<u16>,
    /// Chosen chords as `(rank, rank)`, smaller rank first.
    stack: Vec<(usize, usize)>,
    started: bool,
    done: bool,
}

impl StateIter {
    pub fn new(shape: BoardShape) -> Self {
        Self {
            shape,
            partner: vec![UNSET; shape.num_points()],
            stack: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn cyc_of_rank(&self, r: usize) -> usize {
        self.shape.cyc(self.shape.point_of_rank(r))
    }

    /// A chord between free points `x` and `y` is admissible when no chosen
    /// chord crosses it and the free points on either side pair up evenly.
    fn admissible(&self, x: usize, y: usize) -> bool {
        let total = self.partner.len();
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let inside = |c: usize| c > lo && c < hi;
        let mut free = 0;
        for c in lo + 1..hi {
            match self.partner[c] {
                UNSET => free += 1,
                q if !inside(q as usize) => return false,
                _ => {}
            }
        }
        debug_assert!(hi < total);
        free % 2 == 0
    }

    fn next_candidate(&self, x_rank: usize, from_rank: usize) -> Option<usize> {
        let x = self.cyc_of_rank(x_rank);
        (from_rank..self.partner.len()).find(|&r| {
            let y = self.cyc_of_rank(r);
            self.partner[y] == UNSET && self.admissible(x, y)
        })
    }

    fn push(&mut self, x_rank: usize, y_rank: usize) {
        let (x, y) = (self.cyc_of_rank(x_rank), self.cyc_of_rank(y_rank));
        self.partner[x] = y as u16;
        self.partner[y] = x as u16;
        self.stack.push((x_rank, y_rank));
    }

    fn pop(&mut self) -> Option<(usize, usize)> {
        let (x_rank, y_rank) = self.stack.pop()?;
        let (x, y) = (self.cyc_of_rank(x_rank), self.cyc_of_rank(y_rank));
        self.partner[x] = UNSET;
        self.partner[y] = UNSET;
        Some((x_rank, y_rank))
    }

    fn backtrack(&mut self) -> bool {
        while let Some((x, y)) = self.pop() {
            if let Some(y2) = self.next_candidate(x, y + 1) {
                self.push(x, y2);
                return true;
            }
        }
        false
    }

    fn fill(&mut self) -> bool {
        loop {
            let free =
                (0..self.partner.len()).find(|&r| self.partner[self.cyc_of_rank(r)] == UNSET);
            let Some(x) = free else {
                return true;
            };
            match self.next_candidate(x, x + 1) {
                Some(y) => self.push(x, y),
                None => {
                    if !self.backtrack() {
                        return false;
                    }
                }
            }
        }
    }
}

impl Iterator for StateIter {
    type Item = CatalanState;

    fn next(&mut self) -> Option<CatalanState> {
        if self.done {
            return None;
        }
        let ok = if !self.started {
            self.started = true;
            self.fill()
        } else {
            self.backtrack() && self.fill()
        };
        if !ok {
            self.done = true;
            return None;
        }
        Some(CatalanState::from_partners_unchecked(
            self.shape,
            self.partner.clone().into_boxed_slice(),
        ))
    }
}

/// Default cap for [`enumerate_states`].
pub const DEFAULT_STATE_CAP: u128 = 5_000_000;

/// All Catalan states of `shape` in canonical order.
pub fn enumerate_states(shape: BoardShape, cap: u128) -> Result<Vec<CatalanState>, StateError> {
    let count = catalan(shape.m + shape.n).unwrap_or(u128::MAX);
    if count > cap {
        return Err(StateError::TooManyStates { count, cap });
    }
    Ok(StateIter::new(shape).collect())
}
