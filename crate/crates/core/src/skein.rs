//! Kauffman state sums for the lattice crossing.
//!
//! A [`MarkerGrid`] chooses a smoothing at each of the `m*n` crossings.
//! Crossing `(i, j)` has ports N, E, S, W shared with its grid neighbours (or
//! with the boundary points `Tj`, `Ri`, `Bj`, `Li` on the rim). A positive
//! marker joins N-W and S-E, a negative marker joins N-E and S-W.
//!
//! [`expand`] sums `A^(p-n) * (-A^2 - A^-2)^loops` over all grids, grouped by
//! the resulting boundary matching. Two engines produce the same table: a
//! brute-force sweep over all `2^(mn)` grids and a transfer engine that
//! processes crossings row by row while tracking only the connectivity of
//! the current frontier.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{delta_power, LaurentError, LaurentPoly};
use crate::states::{BoardShape, BoundaryPoint, CatalanState, Side, StateError};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeinError {
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("invalid marker grid: {0}")]
    Grid(String),
    #[error("invalid expansion table: {0}")]
    Table(String),
}

/// Resource limits; both engines refuse work beyond them rather than
/// truncating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest `m*n` the brute-force engine accepts.
    pub max_grid_bits: u32,
    /// Largest number of frontier patterns the transfer engine may hold.
    pub max_frontier: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_grid_bits: 26,
            max_frontier: 20_000_000,
        }
    }
}

pub const ENV_MAX_GRID_BITS: &str = "LATTICE_SKEIN_MAX_GRID_BITS";
pub const ENV_MAX_FRONTIER: &str = "LATTICE_SKEIN_MAX_FRONTIER";

impl Budget {
    /// Defaults overridden by `LATTICE_SKEIN_MAX_GRID_BITS` and
    /// `LATTICE_SKEIN_MAX_FRONTIER` when set.
    pub fn from_env() -> Result<Self, String> {
        let mut budget = Self::default();
        if let Ok(v) = std::env::var(ENV_MAX_GRID_BITS) {
            budget.max_grid_bits = v
                .trim()
                .parse()
                .map_err(|_| format!("{ENV_MAX_GRID_BITS}={v:?} is not an integer"))?;
        }
        if let Ok(v) = std::env::var(ENV_MAX_FRONTIER) {
            budget.max_frontier = v
                .trim()
                .parse()
                .map_err(|_| format!("{ENV_MAX_FRONTIER}={v:?} is not an integer"))?;
        }
        Ok(budget)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Marker {
    Positive,
    Negative,
}

impl Marker {
    pub fn flipped(self) -> Self {
        match self {
            Marker::Positive => Marker::Negative,
            Marker::Negative => Marker::Positive,
        }
    }
}

/// A Kauffman state: one marker per crossing, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkerGrid {
    shape: BoardShape,
    markers: Vec<Marker>,
}

impl MarkerGrid {
    pub fn new(shape: BoardShape, markers: Vec<Marker>) -> Result<Self, SkeinError> {
        if markers.len() != shape.m * shape.n {
            return Err(SkeinError::Grid(format!(
                "{} markers for a {shape} board",
                markers.len()
            )));
        }
        Ok(Self { shape, markers })
    }

    pub fn uniform(shape: BoardShape, marker: Marker) -> Self {
        Self {
            shape,
            markers: vec![marker; shape.m * shape.n],
        }
    }

    /// Grid number `index` of the brute-force sweep: bit `i*n + j` set means
    /// crossing `(i, j)` is negative.
    pub fn from_index(shape: BoardShape, index: u64) -> Self {
        let markers = (0..shape.m * shape.n)
            .map(|b| {
                if b < 64 && (index >> b) & 1 == 1 {
                    Marker::Negative
                } else {
                    Marker::Positive
                }
            })
            .collect();
        Self { shape, markers }
    }

    pub fn shape(&self) -> BoardShape {
        self.shape
    }

    /// Marker at 0-based row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> Marker {
        self.markers[i * self.shape.n + j]
    }

    pub fn markers(&self) -> &[Marker] {
        &self.markers
    }

    pub fn positives(&self) -> usize {
        self.markers
            .iter()
            .filter(|&&mk| mk == Marker::Positive)
            .count()
    }

    pub fn negatives(&self) -> usize {
        self.markers.len() - self.positives()
    }

    /// `self` on top of `below`.
    pub fn stack(&self, below: &MarkerGrid) -> Result<MarkerGrid, SkeinError> {
        if self.shape.n != below.shape.n {
            return Err(SkeinError::Grid(format!(
                "cannot stack {} on {}",
                self.shape, below.shape
            )));
        }
        let shape = BoardShape::new(self.shape.m + below.shape.m, self.shape.n)?;
        let markers = self.markers.iter().chain(&below.markers).copied().collect();
        Ok(MarkerGrid { shape, markers })
    }

    /// `self` to the left of `right`.
    pub fn beside(&self, right: &MarkerGrid) -> Result<MarkerGrid, SkeinError> {
        if self.shape.m != right.shape.m {
            return Err(SkeinError::Grid(format!(
                "cannot place {} beside {}",
                self.shape, right.shape
            )));
        }
        let shape = BoardShape::new(self.shape.m, self.shape.n + right.shape.n)?;
        let (n1, n2) = (self.shape.n, right.shape.n);
        let markers = (0..shape.m)
            .flat_map(|i| {
                self.markers[i * n1..(i + 1) * n1]
                    .iter()
                    .chain(&right.markers[i * n2..(i + 1) * n2])
                    .copied()
            })
            .collect();
        Ok(MarkerGrid { shape, markers })
    }

    /// Parses the row-major `+`/`-` form with rows separated by `/`.
    pub fn parse(text: &str, shape: BoardShape) -> Result<Self, SkeinError> {
        let text = text.trim();
        let rows: Vec<&str> = if shape.m == 0 {
            if !text.is_empty() {
                return Err(SkeinError::Grid(format!("{text:?} for a {shape} board")));
            }
            Vec::new()
        } else {
            text.split('/').collect()
        };
        if rows.len() != shape.m || rows.iter().any(|r| r.len() != shape.n) {
            return Err(SkeinError::Grid(format!("{text:?} for a {shape} board")));
        }
        let markers = rows
            .iter()
            .flat_map(|r| r.chars())
            .map(|c| match c {
                '+' => Ok(Marker::Positive),
                '-' => Ok(Marker::Negative),
                _ => Err(SkeinError::Grid(format!("unexpected {c:?} in {text:?}"))),
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { shape, markers })
    }
}

impl fmt::Display for MarkerGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.shape.m {
            if i > 0 {
                f.write_str("/")?;
            }
            for j in 0..self.shape.n {
                f.write_str(match self.get(i, j) {
                    Marker::Positive => "+",
                    Marker::Negative => "-",
                })?;
            }
        }
        Ok(())
    }
}

/// Outcome of smoothing every crossing of a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    /// `K(s)`, the boundary matching.
    pub matching: CatalanState,
    /// `|s|`, closed components.
    pub loops: u32,
    pub positives: u32,
    pub negatives: u32,
}

impl Resolution {
    /// `A^(p-n) * (-A^2 - A^-2)^loops`.
    pub fn weight(&self) -> LaurentPoly {
        delta_power(self.loops)
            .shifted(self.positives as i32 - self.negatives as i32)
            .expect("weight exponent in range")
    }
}

/// Wire ids: vertical segments `(r, j)` for `r in 0..=m`, then horizontal
/// segments `(i, c)` for `c in 0..=n`. Rim segments are boundary points.
struct WireLayout {
    shape: BoardShape,
    vertical: usize,
}

impl WireLayout {
    fn new(shape: BoardShape) -> Self {
        Self {
            shape,
            vertical: (shape.m + 1) * shape.n,
        }
    }

    fn len(&self) -> usize {
        self.vertical + self.shape.m * (self.shape.n + 1)
    }

    fn v(&self, r: usize, j: usize) -> usize {
        r * self.shape.n + j
    }

    fn h(&self, i: usize, c: usize) -> usize {
        self.vertical + i * (self.shape.n + 1) + c
    }

    fn boundary(&self, p: BoundaryPoint) -> usize {
        let (m, n) = (self.shape.m, self.shape.n);
        match p.side {
            Side::Top => self.v(0, p.index - 1),
            Side::Bottom => self.v(m, p.index - 1),
            Side::Left => self.h(p.index - 1, 0),
            Side::Right => self.h(p.index - 1, n),
        }
    }
}

/// Smooths every crossing of `grid` and traces the resulting arcs.
pub fn resolve(grid: &MarkerGrid) -> Resolution {
    let shape = grid.shape;
    let layout = WireLayout::new(shape);
    let mut uf = UnionFind::new(layout.len());
    let mut loops = 0u32;
    for i in 0..shape.m {
        for j in 0..shape.n {
            let (north, south) = (layout.v(i, j), layout.v(i + 1, j));
            let (west, east) = (layout.h(i, j), layout.h(i, j + 1));
            let pairs = match grid.get(i, j) {
                Marker::Positive => [(north, west), (south, east)],
                Marker::Negative => [(north, east), (south, west)],
            };
            for (a, b) in pairs {
                // Each wire has degree at most two, so joining two wires
                // that are already connected closes a loop.
                if !uf.union(a, b) {
                    loops += 1;
                }
            }
        }
    }
    let total = shape.num_points();
    let mut first_at_root: HashMap<usize, usize> = HashMap::with_capacity(total);
    let mut partner = vec![0u16; total].into_boxed_slice();
    for c in 0..total {
        let root = uf.find(layout.boundary(shape.point_at(c)));
        if let Some(other) = first_at_root.remove(&root) {
            partner[c] = other as u16;
            partner[other] = c as u16;
        } else {
            first_at_root.insert(root, c);
        }
    }
    debug_assert!(first_at_root.is_empty());
    let positives = grid.positives() as u32;
    Resolution {
        matching: CatalanState::from_partners_unchecked(shape, partner),
        loops,
        positives,
        negatives: (shape.m * shape.n) as u32 - positives,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    BruteForce,
    Transfer,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::BruteForce => "brute",
            Engine::Transfer => "transfer",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "brute" => Ok(Engine::BruteForce),
            "transfer" => Ok(Engine::Transfer),
            _ => Err(format!("unknown engine {s:?} (expected brute or transfer)")),
        }
    }
}

/// `L(m,n) = sum r(C) C`, keyed by state in canonical order. Zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionTable {
    shape: BoardShape,
    entries: BTreeMap<CatalanState, LaurentPoly>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    m: usize,
    n: usize,
    engine: String,
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    state: String,
    coeff: String,
}

impl ExpansionTable {
    fn from_map(
        shape: BoardShape,
        entries: impl IntoIterator<Item = (CatalanState, LaurentPoly)>,
    ) -> Self {
        Self {
            shape,
            entries: entries.into_iter().filter(|(_, p)| !p.is_zero()).collect(),
        }
    }

    pub fn shape(&self) -> BoardShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `r(C)`; zero for states not in the table.
    pub fn get(&self, state: &CatalanState) -> LaurentPoly {
        self.entries.get(state).cloned().unwrap_or_default()
    }

    pub fn contains(&self, state: &CatalanState) -> bool {
        self.entries.contains_key(state)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CatalanState, &LaurentPoly)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CatalanState> {
        self.entries.keys()
    }

    /// Applies `A -> A^-1` to every coefficient.
    pub fn bar(&self) -> Result<Self, SkeinError> {
        let entries = self
            .entries
            .iter()
            .map(|(c, p)| Ok((c.clone(), p.substitute_power(-1)?)))
            .collect::<Result<BTreeMap<_, _>, LaurentError>>()?;
        Ok(Self {
            shape: self.shape,
            entries,
        })
    }

    /// Single-line JSON: `{"m":..,"n":..,"engine":..,"entries":[{"state":..,"coeff":..}]}`.
    pub fn to_json(&self, engine: &str) -> String {
        let doc = TableJson {
            m: self.shape.m,
            n: self.shape.n,
            engine: engine.to_string(),
            entries: self
                .entries
                .iter()
                .map(|(c, p)| EntryJson {
                    state: c.to_string(),
                    coeff: p.to_string(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("table serializes")
    }

    /// Parses [`ExpansionTable::to_json`] output; returns the table and the
    /// engine name it carries.
    pub fn from_json(text: &str) -> Result<(Self, String), SkeinError> {
        let doc: TableJson =
            serde_json::from_str(text).map_err(|e| SkeinError::Table(e.to_string()))?;
        let shape = BoardShape::new(doc.m, doc.n)?;
        let mut entries = BTreeMap::new();
        for e in doc.entries {
            let state = CatalanState::parse(&e.state, shape)?;
            let coeff: LaurentPoly = e.coeff.parse()?;
            if coeff.is_zero() {
                return Err(SkeinError::Table(format!("zero coefficient for {state}")));
            }
            if entries.insert(state.clone(), coeff).is_some() {
                return Err(SkeinError::Table(format!("duplicate state {state}")));
            }
        }
        Ok((Self { shape, entries }, doc.engine))
    }
}

pub fn expand(
    shape: BoardShape,
    engine: Engine,
    budget: &Budget,
) -> Result<ExpansionTable, SkeinError> {
    match engine {
        Engine::BruteForce => expand_brute(shape, budget),
        Engine::Transfer => expand_transfer(shape, budget),
    }
}

fn check_grid_budget(shape: BoardShape, budget: &Budget) -> Result<u64, SkeinError> {
    let bits = shape.m * shape.n;
    if bits > budget.max_grid_bits as usize || bits >= 64 {
        return Err(SkeinError::Budget(format!(
            "brute force over 2^{bits} grids exceeds the cap of 2^{}",
            budget.max_grid_bits
        )));
    }
    Ok(1u64 << bits)
}

/// Per-state histogram of `(p - n, loops)` over grids.
type Histogram = HashMap<CatalanState, HashMap<(i32, u32), u64>>;

fn merge_histograms(mut a: Histogram, b: Histogram) -> Result<Histogram, SkeinError> {
    for (state, counts) in b {
        let slot = a.entry(state).or_default();
        for (key, c) in counts {
            let v = slot.entry(key).or_insert(0);
            *v = v
                .checked_add(c)
                .ok_or(LaurentError::Overflow("grid count"))?;
        }
    }
    Ok(a)
}

fn expand_brute(shape: BoardShape, budget: &Budget) -> Result<ExpansionTable, SkeinError> {
    let total = check_grid_budget(shape, budget)?;
    let chunks = (rayon::current_num_threads() as u64 * 8).clamp(1, total);
    let step = total.div_ceil(chunks);
    let histogram = (0..chunks)
        .into_par_iter()
        .map(|k| -> Result<Histogram, SkeinError> {
            let mut local: Histogram = HashMap::new();
            for index in k * step..((k + 1) * step).min(total) {
                let r = resolve(&MarkerGrid::from_index(shape, index));
                let key = (r.positives as i32 - r.negatives as i32, r.loops);
                *local.entry(r.matching).or_default().entry(key).or_insert(0) += 1;
            }
            Ok(local)
        })
        .try_reduce(HashMap::new, merge_histograms)?;
    let mut entries = Vec::with_capacity(histogram.len());
    for (state, counts) in histogram {
        let mut poly = LaurentPoly::zero();
        for ((shift, loops), count) in counts {
            let count = i64::try_from(count).map_err(|_| LaurentError::Overflow("grid count"))?;
            let term = delta_power(loops)
                .shifted(shift)?
                .checked_mul(&LaurentPoly::monomial(count, 0))?;
            poly.add_assign_checked(&term)?;
        }
        entries.push((state, poly));
    }
    Ok(ExpansionTable::from_map(shape, entries))
}

const NONE: u16 = u16::MAX;

/// Transfer engine.
///
/// Nodes are the `2(m+n)` boundary points (by cyclic position), then one
/// slot per column for the vertical wire crossing the frontier, then one
/// slot for the horizontal wire of the current row. A pattern maps every
/// node that has been reached to the other end of its partial arc, so it
/// records finished chords together with the frontier connectivity.
pub fn expand_transfer(shape: BoardShape, budget: &Budget) -> Result<ExpansionTable, SkeinError> {
    let (m, n) = (shape.m, shape.n);
    let total = shape.num_points();
    let vslot = |j: usize| total + j;
    let hslot = total + n;
    let width = total + n + 1;
    if width >= NONE as usize {
        return Err(SkeinError::Budget(format!("{shape} board is too wide")));
    }
    let cyc = |side, index| shape.cyc(BoundaryPoint { side, index });
    let link = |k: &mut [u16], a: usize, b: usize| {
        k[a] = b as u16;
        k[b] = a as u16;
    };

    let mut start = vec![NONE; width];
    for j in 0..n {
        link(&mut start, vslot(j), cyc(Side::Top, j + 1));
    }
    let mut table: HashMap<Box<[u16]>, LaurentPoly> = HashMap::new();
    table.insert(start.into_boxed_slice(), LaurentPoly::one());
    let delta = delta_power(1);

    for i in 0..m {
        let left = cyc(Side::Left, i + 1);
        table = table
            .into_iter()
            .map(|(mut k, w)| {
                link(&mut k, hslot, left);
                (k, w)
            })
            .collect();
        for j in 0..n {
            let mut next: HashMap<Box<[u16]>, LaurentPoly> =
                HashMap::with_capacity(table.len() * 2);
            let v = vslot(j);
            for (key, weight) in &table {
                let north = key[v] as usize;
                let west = key[hslot] as usize;
                let closed = north == hslot;
                for marker in [Marker::Positive, Marker::Negative] {
                    let mut k = key.clone();
                    let mut w = weight.shifted(match marker {
                        Marker::Positive => 1,
                        Marker::Negative => -1,
                    })?;
                    match marker {
                        Marker::Positive => {
                            if closed {
                                w = w.checked_mul(&delta)?;
                            } else {
                                link(&mut k, north, west);
                            }
                            link(&mut k, v, hslot);
                        }
                        Marker::Negative => {
                            if closed {
                                link(&mut k, v, hslot);
                            } else {
                                link(&mut k, north, hslot);
                                link(&mut k, west, v);
                            }
                        }
                    }
                    match next.get_mut(&k) {
                        Some(acc) => acc.add_assign_checked(&w)?,
                        None => {
                            next.insert(k, w);
                        }
                    }
                }
            }
            next.retain(|_, w| !w.is_zero());
            if next.len() > budget.max_frontier {
                return Err(SkeinError::Budget(format!(
                    "{} frontier patterns exceed the cap of {}",
                    next.len(),
                    budget.max_frontier
                )));
            }
            table = next;
        }
        let right = cyc(Side::Right, i + 1);
        table = table
            .into_iter()
            .map(|(mut k, w)| {
                let end = k[hslot] as usize;
                link(&mut k, end, right);
                k[hslot] = NONE;
                (k, w)
            })
            .collect();
    }

    let mut entries: HashMap<CatalanState, LaurentPoly> = HashMap::with_capacity(table.len());
    for (mut k, w) in table {
        for j in 0..n {
            let end = k[vslot(j)] as usize;
            link(&mut k, end, cyc(Side::Bottom, j + 1));
        }
        let partner: Box<[u16]> = k[..total].into();
        let state = CatalanState::from_partners_unchecked(shape, partner);
        match entries.get_mut(&state) {
            Some(acc) => acc.add_assign_checked(&w)?,
            None => {
                entries.insert(state, w);
            }
        }
    }
    Ok(ExpansionTable::from_map(shape, entries))
}

/// `r(C)`, the zero polynomial exactly when `state` is forbidden.
pub fn coefficient(
    shape: BoardShape,
    state: &CatalanState,
    budget: &Budget,
) -> Result<LaurentPoly, SkeinError> {
    if state.shape() != shape {
        return Err(StateError::ShapeMismatch(format!(
            "state on {} queried on {shape}",
            state.shape()
        ))
        .into());
    }
    Ok(expand_transfer(shape, budget)?.get(state))
}

/// `R(C)`: every grid resolving to `state`, in sweep order.
pub fn preimages(
    shape: BoardShape,
    state: &CatalanState,
    budget: &Budget,
) -> Result<Vec<MarkerGrid>, SkeinError> {
    if state.shape() != shape {
        return Err(StateError::ShapeMismatch(format!(
            "state on {} queried on {shape}",
            state.shape()
        ))
        .into());
    }
    let total = check_grid_budget(shape, budget)?;
    Ok((0..total)
        .into_par_iter()
        .map(|idx| MarkerGrid::from_index(shape, idx))
        .filter(|g| resolve(g).matching == *state)
        .collect())
}
