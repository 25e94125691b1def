//! The discrete Morse matching on `UD^n T`, the discrete flow it induces, and
//! the resulting Betti numbers.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell::{Cell, CellError, Chain, ConfigSpace, Item};
use crate::tree::{EdgeRef, PlaneTree, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorseError {
    #[error("vertex {0} is not a member of the cell")]
    VertexNotInCell(Vertex),
    #[error("{0} is not a member of the cell")]
    EdgeNotInCell(EdgeRef),
    #[error("{cell} is {found}, expected {expected}")]
    WrongStatus {
        cell: Cell,
        expected: CellStatus,
        found: CellStatus,
    },
    #[error("flow did not stabilize within {0} iterations")]
    StabilizationGuardExceeded(u128),
    #[error("{0} is not critical")]
    NotCritical(Cell),
    #[error("the Morse boundary of {0} is nonzero")]
    MorseBoundaryNonzero(Cell),
    #[error(transparent)]
    Cell(#[from] CellError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Critical,
    Redundant,
    Collapsible,
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellStatus::Critical => "critical",
            CellStatus::Redundant => "redundant",
            CellStatus::Collapsible => "collapsible",
        })
    }
}

fn check_vertex(c: &Cell, v: Vertex) -> Result<(), MorseError> {
    if c.contains_vertex(v) {
        Ok(())
    } else {
        Err(MorseError::VertexNotInCell(v))
    }
}

/// A vertex of `c` is blocked when it is the root, or when the edge from it
/// toward the root touches another member of `c`.
pub fn is_blocked(tree: &PlaneTree, c: &Cell, v: Vertex) -> Result<bool, MorseError> {
    check_vertex(c, v)?;
    Ok(blocked_unchecked(tree, c, v))
}

fn blocked_unchecked(tree: &PlaneTree, c: &Cell, v: Vertex) -> bool {
    match tree.parent(v) {
        None => true,
        Some(p) => c.occupies_except(tree, p, Item::vertex(v)),
    }
}

/// An edge `e` of `c` is disrespectful when some vertex of `c` is a child of
/// `τ(e)` numbered strictly between `τ(e)` and `ι(e)`.
pub fn is_disrespectful(tree: &PlaneTree, c: &Cell, e: EdgeRef) -> Result<bool, MorseError> {
    if !c.contains_edge(e) {
        return Err(MorseError::EdgeNotInCell(e));
    }
    Ok(disrespectful_unchecked(tree, c, e))
}

fn disrespectful_unchecked(tree: &PlaneTree, c: &Cell, e: EdgeRef) -> bool {
    let (iota, tau) = (tree.initial(e), tree.terminal(e));
    c.vertices()
        .any(|v| tau < v && v < iota && tree.parent(v) == Some(tau))
}

/// The member that decides the status, scanning in order of number.
fn deciding_member(tree: &PlaneTree, c: &Cell) -> Option<(Item, CellStatus)> {
    c.items().iter().find_map(|&it| match it.as_edge() {
        Some(e) if !disrespectful_unchecked(tree, c, e) => Some((it, CellStatus::Collapsible)),
        Some(_) => None,
        None if !blocked_unchecked(tree, c, it.number()) => Some((it, CellStatus::Redundant)),
        None => None,
    })
}

pub fn classify(tree: &PlaneTree, c: &Cell) -> CellStatus {
    deciding_member(tree, c).map_or(CellStatus::Critical, |(_, s)| s)
}

/// For a redundant cell, replaces the smallest unblocked vertex `v` by the
/// edge from `v` toward the root.
pub fn match_up(tree: &PlaneTree, c: &Cell) -> Result<Cell, MorseError> {
    match deciding_member(tree, c) {
        Some((it, CellStatus::Redundant)) => {
            let e = tree
                .edge_toward_root(it.number())
                .expect("the root is always blocked");
            Ok(c.replace(it, Item::edge(e)))
        }
        other => Err(MorseError::WrongStatus {
            cell: c.clone(),
            expected: CellStatus::Redundant,
            found: other.map_or(CellStatus::Critical, |(_, s)| s),
        }),
    }
}

/// For a collapsible cell, replaces the smallest respectful edge by its
/// initial vertex.
pub fn match_down(tree: &PlaneTree, c: &Cell) -> Result<Cell, MorseError> {
    match deciding_member(tree, c) {
        Some((it, CellStatus::Collapsible)) => {
            let e = it.as_edge().expect("collapsible members are edges");
            Ok(c.replace(it, Item::vertex(tree.initial(e))))
        }
        other => Err(MorseError::WrongStatus {
            cell: c.clone(),
            expected: CellStatus::Collapsible,
            found: other.map_or(CellStatus::Critical, |(_, s)| s),
        }),
    }
}

/// `Ŵ(c) = -ε W(c)` where `ε` is the incidence of `c` in `∂W(c)`; zero unless
/// `c` is redundant.
fn w_hat(tree: &PlaneTree, c: &Cell) -> Option<(Cell, i64)> {
    let w = match_up(tree, c).ok()?;
    let eps = w
        .signed_faces(tree)
        .into_iter()
        .find(|(f, _)| f == c)
        .map(|(_, s)| s)
        .expect("a matched cell is a face of its partner");
    Some((w, -eps))
}

/// One step of the discrete flow `f = 1 + ∂Ŵ + Ŵ∂`.
pub fn flow(space: &ConfigSpace, ch: &Chain) -> Chain {
    let tree = space.tree();
    let mut acc: HashMap<Cell, i64> = ch.terms().map(|(c, a)| (c.clone(), a)).collect();
    for (c, a) in ch.terms() {
        if let Some((w, s)) = w_hat(tree, c) {
            for (f, t) in w.signed_faces(tree) {
                *acc.entry(f).or_insert(0) += a * s * t;
            }
        }
    }
    if ch.dim() > 0 {
        for (c, a) in space.boundary(ch).terms() {
            if let Some((w, s)) = w_hat(tree, c) {
                *acc.entry(w).or_insert(0) += a * s;
            }
        }
    }
    Chain::from_accumulator(ch.dim(), acc)
}

/// Iterates [`flow`] until the chain stops changing. The number of
/// iterations is bounded by one more than the number of cells in the
/// dimension; exceeding it means the matching is not acyclic.
pub fn flow_infinity(space: &ConfigSpace, ch: &Chain) -> Result<Chain, MorseError> {
    let guard = space.cell_count(ch.dim()) + 1;
    let mut cur = ch.clone();
    let mut steps: u128 = 0;
    loop {
        let next = flow(space, &cur);
        if next == cur {
            return Ok(cur);
        }
        steps += 1;
        if steps > guard {
            return Err(MorseError::StabilizationGuardExceeded(guard));
        }
        cur = next;
    }
}

/// `Π ∂ f∞(c)`: the boundary in the Morse complex, as a chain of critical
/// cells.
pub fn morse_boundary(space: &ConfigSpace, c: &Cell) -> Result<Chain, MorseError> {
    let tree = space.tree();
    if classify(tree, c) != CellStatus::Critical {
        return Err(MorseError::NotCritical(c.clone()));
    }
    if c.dim() == 0 {
        return Ok(Chain::zero(0));
    }
    let image = flow_infinity(space, &Chain::from_cell(c.clone()))?;
    Ok(space
        .boundary(&image)
        .filter(|f| classify(tree, f) == CellStatus::Critical))
}

/// The critical `dim`-cells in enumeration order.
pub fn critical_cells(space: &ConfigSpace, dim: usize) -> Vec<Cell> {
    let tree = space.tree();
    space
        .enumerate(dim)
        .into_par_iter()
        .filter(|c| classify(tree, c) == CellStatus::Critical)
        .collect()
}

/// Ranks of `H_0 … H_n`. Each rank is the number of critical cells; every
/// Morse boundary is checked to vanish.
pub fn betti_numbers(space: &ConfigSpace) -> Result<Vec<usize>, MorseError> {
    let mut out = Vec::with_capacity(space.strands() + 1);
    for dim in 0..=space.strands() {
        let crit = critical_cells(space, dim);
        crit.par_iter().try_for_each(|c| {
            if morse_boundary(space, c)?.is_zero() {
                Ok(())
            } else {
                Err(MorseError::MorseBoundaryNonzero(c.clone()))
            }
        })?;
        out.push(crit.len());
    }
    Ok(out)
}

/// Status of every cell, with the matching and its inverse.
#[derive(Debug, Clone)]
pub struct MorseData {
    status: Vec<HashMap<Cell, CellStatus>>,
    matching: HashMap<Cell, Cell>,
    inverse: HashMap<Cell, Cell>,
}

impl MorseData {
    pub fn build(space: &ConfigSpace) -> MorseData {
        let tree = space.tree();
        let mut status = Vec::with_capacity(space.strands() + 1);
        let mut matching = HashMap::new();
        let mut inverse = HashMap::new();
        for dim in 0..=space.strands() {
            let table: Vec<(Cell, CellStatus, Option<Cell>)> = space
                .enumerate(dim)
                .into_par_iter()
                .map(|c| {
                    let s = classify(tree, &c);
                    let up = (s == CellStatus::Redundant)
                        .then(|| match_up(tree, &c).expect("redundant"));
                    (c, s, up)
                })
                .collect();
            let mut map = HashMap::with_capacity(table.len());
            for (c, s, up) in table {
                if let Some(w) = up {
                    inverse.insert(w.clone(), c.clone());
                    matching.insert(c.clone(), w);
                }
                map.insert(c, s);
            }
            status.push(map);
        }
        MorseData {
            status,
            matching,
            inverse,
        }
    }

    pub fn status(&self, c: &Cell) -> Option<CellStatus> {
        self.status.get(c.dim())?.get(c).copied()
    }

    /// `W(c)` for a redundant cell.
    pub fn matched_up(&self, c: &Cell) -> Option<&Cell> {
        self.matching.get(c)
    }

    /// `W⁻¹(c)` for a collapsible cell.
    pub fn matched_down(&self, c: &Cell) -> Option<&Cell> {
        self.inverse.get(c)
    }

    pub fn cells(&self, dim: usize) -> impl Iterator<Item = (&Cell, CellStatus)> {
        self.status
            .get(dim)
            .into_iter()
            .flat_map(|m| m.iter().map(|(c, &s)| (c, s)))
    }

    /// `(critical, redundant, collapsible)` counts in `dim`.
    pub fn counts(&self, dim: usize) -> (usize, usize, usize) {
        let mut out = (0, 0, 0);
        for (_, s) in self.cells(dim) {
            match s {
                CellStatus::Critical => out.0 += 1,
                CellStatus::Redundant => out.1 += 1,
                CellStatus::Collapsible => out.2 += 1,
            }
        }
        out
    }

    pub fn max_dim(&self) -> usize {
        self.status.len().saturating_sub(1)
    }
}
