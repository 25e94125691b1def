//! Equivalence classes of cells, their partial order and least upper bounds,
//! the indicator cocycles of classes, and mod-2 cup products in the basis
//! dual to the critical cells.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell::{
    for_each_combination, Cell, CellError, Chain, Cochain, ConfigSpace, Endpoint, Item,
};
use crate::morse::{classify, critical_cells, flow_infinity, CellStatus, MorseError};
use crate::tree::{EdgeRef, PlaneTree, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CupError {
    #[error("class {0} appears more than once")]
    DuplicateClass(CellClass),
    #[error("expected classes of dimension one")]
    MixedDimensions,
    #[error("classes disagree on the number of strands")]
    StrandMismatch,
    #[error("no classes given")]
    Empty,
    #[error("several classes satisfy the upper-bound constraints")]
    AmbiguousUpperBound,
    #[error("the cochain is not a cocycle")]
    NotACocycle,
    #[error("{0} is not a critical cell")]
    NotCritical(Cell),
    #[error("dimension {0} exceeds the precomputed range")]
    DimensionOutOfRange(usize),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Cell(#[from] CellError),
}

/// Connected components of `T` minus the closed edges of a cell, each
/// labelled by its top vertex (which is also its smallest vertex).
#[derive(Debug, Clone)]
struct Components {
    top: Vec<Option<Vertex>>,
}

impl Components {
    fn new(tree: &PlaneTree, edges: &[EdgeRef]) -> Components {
        let mut removed = vec![false; tree.vertex_count()];
        for &e in edges {
            removed[tree.initial(e)] = true;
            removed[tree.terminal(e)] = true;
        }
        // Preorder puts parents first, so one pass suffices.
        let mut top = vec![None; tree.vertex_count()];
        for v in tree.vertices() {
            if removed[v] {
                continue;
            }
            top[v] = match tree.parent(v) {
                Some(p) if !removed[p] => top[p],
                _ => Some(v),
            };
        }
        Components { top }
    }

    fn top(&self, v: Vertex) -> Option<Vertex> {
        self.top[v]
    }

    fn members(&self, key: Vertex) -> Vec<Vertex> {
        (key..self.top.len())
            .filter(|&v| self.top[v] == Some(key))
            .collect()
    }

    fn keys(&self) -> Vec<Vertex> {
        (0..self.top.len())
            .filter(|&v| self.top[v] == Some(v))
            .collect()
    }
}

/// The `∼`-class of a cell: its edge set and how many vertices sit in each
/// component of the complement. Components with no vertices are omitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellClass {
    edges: Vec<EdgeRef>,
    counts: BTreeMap<Vertex, usize>,
}

impl CellClass {
    pub fn edges(&self) -> &[EdgeRef] {
        &self.edges
    }

    /// Vertex count per component, keyed by the component's smallest vertex.
    pub fn counts(&self) -> &BTreeMap<Vertex, usize> {
        &self.counts
    }

    pub fn dim(&self) -> usize {
        self.edges.len()
    }

    pub fn strands(&self) -> usize {
        self.edges.len() + self.counts.values().sum::<usize>()
    }

    /// The representative whose vertices fill each component from its top
    /// downward in preorder. Every vertex of it is blocked.
    pub fn representative(&self, tree: &PlaneTree) -> Cell {
        let comps = Components::new(tree, &self.edges);
        let mut items: Vec<Item> = self.edges.iter().map(|&e| Item::edge(e)).collect();
        for (&key, &k) in &self.counts {
            items.extend(comps.members(key).into_iter().take(k).map(Item::vertex));
        }
        Cell::from_items(items).expect("members are distinct")
    }

    /// Every cell of the class.
    pub fn cells(&self, tree: &PlaneTree) -> Vec<Cell> {
        let comps = Components::new(tree, &self.edges);
        let mut partial: Vec<Vec<Item>> = vec![self.edges.iter().map(|&e| Item::edge(e)).collect()];
        for (&key, &k) in &self.counts {
            let members = comps.members(key);
            let mut next = Vec::new();
            for base in &partial {
                for_each_combination(members.len(), k, |pick| {
                    let mut items = base.clone();
                    items.extend(pick.iter().map(|&j| Item::vertex(members[j])));
                    next.push(items);
                });
            }
            partial = next;
        }
        let mut out: Vec<Cell> = partial
            .into_iter()
            .map(|it| Cell::from_items(it).expect("distinct"))
            .collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Display for CellClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(" |")?;
        for (key, k) in &self.counts {
            let name = if *key == 0 {
                "*".to_string()
            } else {
                format!("v{key}")
            };
            write!(f, " {name}:{k}")?;
        }
        f.write_str("]")
    }
}

pub fn class_of(tree: &PlaneTree, c: &Cell) -> CellClass {
    let edges: Vec<EdgeRef> = c.edges().collect();
    let comps = Components::new(tree, &edges);
    let mut counts = BTreeMap::new();
    for v in c.vertices() {
        let key = comps.top(v).expect("a vertex of a cell avoids its edges");
        *counts.entry(key).or_insert(0) += 1;
    }
    CellClass { edges, counts }
}

/// The class obtained from `k` by breaking every edge not in `keep`. Both
/// endpoints of a broken edge land in the same component, so the result does
/// not depend on which endpoint is chosen.
fn face_class(tree: &PlaneTree, k: &CellClass, keep: &[EdgeRef]) -> CellClass {
    let comps = Components::new(tree, keep);
    let mut counts = BTreeMap::new();
    for (&key, &m) in &k.counts {
        *counts
            .entry(comps.top(key).expect("kept edges avoid old components"))
            .or_insert(0) += m;
    }
    for e in k.edges.iter().filter(|e| !keep.contains(e)) {
        *counts
            .entry(
                comps
                    .top(tree.initial(*e))
                    .expect("broken edge is not kept"),
            )
            .or_insert(0) += 1;
    }
    CellClass {
        edges: keep.to_vec(),
        counts,
    }
}

/// Moves the smallest unblocked vertex one edge toward the root until every
/// vertex is blocked.
pub fn push_to_normal_form(tree: &PlaneTree, c: &Cell) -> Cell {
    push_to_normal_form_by(tree, c, |_| 0)
}

/// Like [`push_to_normal_form`], but `choose` picks which of the currently
/// unblocked vertices (listed in increasing order) moves next.
pub fn push_to_normal_form_by(
    tree: &PlaneTree,
    c: &Cell,
    mut choose: impl FnMut(&[Vertex]) -> usize,
) -> Cell {
    let mut cur = c.clone();
    loop {
        let free: Vec<Vertex> = cur
            .vertices()
            .filter(|&v| tree.parent(v).is_some_and(|p| !cur.occupies(tree, p)))
            .collect();
        if free.is_empty() {
            return cur;
        }
        let v = free[choose(&free).min(free.len() - 1)];
        cur = cur.replace(Item::vertex(v), Item::vertex(tree.parent(v).unwrap()));
    }
}

/// The critical cell of the class, if any. When one exists it is the unique
/// critical cell of the class and equals every fully pushed representative.
pub fn try_critical_representative(tree: &PlaneTree, k: &CellClass) -> Option<Cell> {
    let rep = k.representative(tree);
    (classify(tree, &rep) == CellStatus::Critical).then_some(rep)
}

/// Whether some cell of `a` is a face of some cell of `b`.
pub fn class_leq(tree: &PlaneTree, a: &CellClass, b: &CellClass) -> bool {
    a.strands() == b.strands()
        && a.edges.iter().all(|e| b.edges.contains(e))
        && face_class(tree, b, &a.edges) == *a
}

/// The single-edge classes below `k`, one per edge, in edge order.
pub fn one_classes_of(tree: &PlaneTree, k: &CellClass) -> Vec<CellClass> {
    k.edges.iter().map(|&e| face_class(tree, k, &[e])).collect()
}

fn check_one_classes(classes: &[CellClass]) -> Result<(), CupError> {
    let first = classes.first().ok_or(CupError::Empty)?;
    if classes.iter().any(|k| k.dim() != 1) {
        return Err(CupError::MixedDimensions);
    }
    if classes.iter().any(|k| k.strands() != first.strands()) {
        return Err(CupError::StrandMismatch);
    }
    let mut seen = BTreeSet::new();
    for k in classes {
        if !seen.insert(k) {
            return Err(CupError::DuplicateClass(k.clone()));
        }
    }
    Ok(())
}

/// Least upper bound of distinct single-edge classes, found by solving for
/// the vertex counts on the components cut out by all their edges.
pub fn lub(tree: &PlaneTree, classes: &[CellClass]) -> Result<Option<CellClass>, CupError> {
    check_one_classes(classes)?;
    let mut edges: Vec<EdgeRef> = classes.iter().map(|k| k.edges[0]).collect();
    edges.sort_unstable();
    let mut used = BTreeSet::new();
    for &e in &edges {
        if !used.insert(tree.initial(e)) || !used.insert(tree.terminal(e)) {
            return Ok(None);
        }
    }
    let comps = Components::new(tree, &edges);
    let keys = comps.keys();
    let sizes: Vec<usize> = keys.iter().map(|&k| comps.members(k).len()).collect();
    let Some(free) = classes[0].strands().checked_sub(edges.len()) else {
        return Ok(None);
    };

    let mut found: Option<CellClass> = None;
    let mut counts = vec![0usize; keys.len()];
    let mut ambiguous = false;
    distribute(&sizes, free, 0, &mut counts, &mut |counts| {
        let candidate = CellClass {
            edges: edges.clone(),
            counts: keys
                .iter()
                .zip(counts)
                .filter(|(_, &m)| m > 0)
                .map(|(&k, &m)| (k, m))
                .collect(),
        };
        if classes
            .iter()
            .all(|k| face_class(tree, &candidate, &k.edges) == *k)
        {
            if found.is_some() {
                ambiguous = true;
            } else {
                found = Some(candidate);
            }
        }
    });
    if ambiguous {
        return Err(CupError::AmbiguousUpperBound);
    }
    Ok(found)
}

fn distribute(
    sizes: &[usize],
    left: usize,
    at: usize,
    counts: &mut [usize],
    visit: &mut impl FnMut(&[usize]),
) {
    if at == sizes.len() {
        if left == 0 {
            visit(counts);
        }
        return;
    }
    let room: usize = sizes[at + 1..].iter().sum();
    let lo = left.saturating_sub(room);
    for m in lo..=left.min(sizes[at]) {
        counts[at] = m;
        distribute(sizes, left - m, at + 1, counts, visit);
    }
    counts[at] = 0;
}

/// The same least upper bound, found by scanning every cell with the united
/// edge set and breaking its edges explicitly.
pub fn lub_by_scan(
    space: &ConfigSpace,
    classes: &[CellClass],
) -> Result<Option<CellClass>, CupError> {
    check_one_classes(classes)?;
    let tree = space.tree();
    let mut edges: Vec<EdgeRef> = classes.iter().map(|k| k.edges[0]).collect();
    edges.sort_unstable();
    let wanted: BTreeSet<&CellClass> = classes.iter().collect();
    let mut hits = BTreeSet::new();
    for c in space.cells_with_edges(&edges) {
        let below: Result<BTreeSet<CellClass>, CellError> = edges
            .iter()
            .map(|&e| {
                let others: Vec<(EdgeRef, Endpoint)> = edges
                    .iter()
                    .filter(|&&f| f != e)
                    .map(|&f| (f, Endpoint::Initial))
                    .collect();
                Ok(class_of(tree, &c.break_edges(tree, &others)?))
            })
            .collect();
        if below?.iter().collect::<BTreeSet<_>>() == wanted {
            hits.insert(class_of(tree, &c));
        }
    }
    match hits.len() {
        0 => Ok(None),
        1 => Ok(hits.into_iter().next()),
        _ => Err(CupError::AmbiguousUpperBound),
    }
}

/// The indicator cochain of a class, checked to be a cocycle.
pub fn phi_cocycle(space: &ConfigSpace, k: &CellClass) -> Result<Cochain, CupError> {
    let co = Cochain::from_cells(k.dim(), k.cells(space.tree()))?;
    if !space.coboundary(&co)?.is_zero() {
        return Err(CupError::NotACocycle);
    }
    Ok(co)
}

/// Coordinates of a mod-2 cohomology class in the basis dual to the critical
/// cells of one dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualBasisVector {
    pub dim: usize,
    pub coefficients: Vec<u8>,
}

impl DualBasisVector {
    pub fn zero(dim: usize, len: usize) -> DualBasisVector {
        DualBasisVector {
            dim,
            coefficients: vec![0; len],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&a| a == 0)
    }

    /// Indices with coefficient one.
    pub fn support(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == 1)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Critical cells and their `f∞` images, computed once per dimension.
#[derive(Debug, Clone)]
pub struct CupRing {
    space: ConfigSpace,
    basis: Vec<Vec<Cell>>,
    flows: Vec<Vec<Chain>>,
}

impl CupRing {
    /// Prepares dimensions `0..=max_dim` (capped at the strand count).
    pub fn new(space: ConfigSpace, max_dim: usize) -> Result<CupRing, CupError> {
        let top = max_dim.min(space.strands());
        let mut basis = Vec::with_capacity(top + 1);
        let mut flows = Vec::with_capacity(top + 1);
        for dim in 0..=top {
            let crit = critical_cells(&space, dim);
            let images: Result<Vec<Chain>, MorseError> = crit
                .par_iter()
                .map(|c| flow_infinity(&space, &Chain::from_cell(c.clone())))
                .collect();
            flows.push(images?);
            basis.push(crit);
        }
        Ok(CupRing {
            space,
            basis,
            flows,
        })
    }

    pub fn space(&self) -> &ConfigSpace {
        &self.space
    }

    pub fn tree(&self) -> &PlaneTree {
        self.space.tree()
    }

    /// Critical cells of `dim`; empty above the strand count.
    pub fn basis(&self, dim: usize) -> Result<&[Cell], CupError> {
        if dim > self.space.strands() {
            return Ok(&[]);
        }
        self.basis
            .get(dim)
            .map(Vec::as_slice)
            .ok_or(CupError::DimensionOutOfRange(dim))
    }

    /// Pairs a cocycle with `f∞` of each critical cell.
    pub fn express_in_dual_basis(&self, co: &Cochain) -> Result<DualBasisVector, CupError> {
        if !self.space.coboundary(co)?.is_zero() {
            return Err(CupError::NotACocycle);
        }
        let dim = co.dim();
        if dim > self.space.strands() {
            return Ok(DualBasisVector::zero(dim, 0));
        }
        let flows = self
            .flows
            .get(dim)
            .ok_or(CupError::DimensionOutOfRange(dim))?;
        Ok(DualBasisVector {
            dim,
            coefficients: flows.iter().map(|ch| co.evaluate(ch)).collect(),
        })
    }

    /// The cup product of the duals of the given critical 1-cells.
    pub fn cup(&self, cells: &[Cell]) -> Result<DualBasisVector, CupError> {
        let tree = self.tree();
        if cells.is_empty() {
            return Err(CupError::Empty);
        }
        for c in cells {
            if c.dim() != 1 {
                return Err(CupError::MixedDimensions);
            }
            if classify(tree, c) != CellStatus::Critical || c.len() != self.space.strands() {
                return Err(CupError::NotCritical(c.clone()));
            }
        }
        let dim = cells.len();
        let len = self.basis(dim)?.len();
        let classes: Vec<CellClass> = cells.iter().map(|c| class_of(tree, c)).collect();
        if classes.iter().collect::<BTreeSet<_>>().len() < classes.len() {
            return Ok(DualBasisVector::zero(dim, len));
        }
        match lub(tree, &classes)? {
            None => Ok(DualBasisVector::zero(dim, len)),
            Some(k) => self.express_in_dual_basis(&phi_cocycle(&self.space, &k)?),
        }
    }

    /// All products of pairs of degree-one basis elements, with the derived
    /// pairing rank and the triangles of the product graph.
    pub fn ring_table(&self) -> Result<RingTable, CupError> {
        let basis1 = self.basis(1)?.to_vec();
        let basis2 = self.basis(2)?.to_vec();
        let basis3 = if self.space.strands() >= 3 {
            self.basis(3)?.to_vec()
        } else {
            Vec::new()
        };
        let pairs: Vec<(usize, usize)> = (0..basis1.len())
            .flat_map(|i| (i + 1..basis1.len()).map(move |j| (i, j)))
            .collect();
        let products: Result<Vec<Option<Product>>, CupError> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let v = self.cup(&[basis1[i].clone(), basis1[j].clone()])?;
                Ok((!v.is_zero()).then(|| Product {
                    left: i,
                    right: j,
                    value: v.support(),
                }))
            })
            .collect();
        let products: Vec<Product> = products?.into_iter().flatten().collect();

        let b1 = basis1.len();
        let b2 = basis2.len();
        let mut rows = vec![vec![0u64; (b1 * b2).div_ceil(64).max(1)]; b1];
        for p in &products {
            for &l in &p.value {
                for (row, other) in [(p.left, p.right), (p.right, p.left)] {
                    let bit = other * b2 + l;
                    rows[row][bit / 64] ^= 1 << (bit % 64);
                }
            }
        }
        let pairing_rank = gf2_rank(rows);

        let nonzero: BTreeSet<(usize, usize)> =
            products.iter().map(|p| (p.left, p.right)).collect();
        let mut triangles = Vec::new();
        for &(i, j) in &nonzero {
            for k in j + 1..b1 {
                if nonzero.contains(&(i, k)) && nonzero.contains(&(j, k)) {
                    let v = self.cup(&[basis1[i].clone(), basis1[j].clone(), basis1[k].clone()])?;
                    triangles.push(Triangle {
                        members: [i, j, k],
                        product: v.support(),
                    });
                }
            }
        }
        Ok(RingTable {
            strands: self.space.strands(),
            basis1,
            basis2,
            basis3,
            products,
            pairing_rank,
            radical_dim: b1 - pairing_rank,
            triangles,
        })
    }
}

/// Rank over GF(2) of rows packed into 64-bit words.
pub(crate) fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let words = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..words * 64 {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & b != 0 {
                row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
            }
        }
        rank += 1;
    }
    rank
}

/// A nonzero product `basis1[left] ∪ basis1[right]`, as indices into `basis2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Product {
    pub left: usize,
    pub right: usize,
    pub value: Vec<usize>,
}

/// Three degree-one basis elements with pairwise nonzero products, and their
/// triple product as indices into `basis3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub members: [usize; 3],
    pub product: Vec<usize>,
}

/// The multiplication `H^1 × H^1 → H^2` in the critical-cell dual bases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingTable {
    pub strands: usize,
    pub basis1: Vec<Cell>,
    pub basis2: Vec<Cell>,
    pub basis3: Vec<Cell>,
    /// Only nonzero products, with `left < right`.
    pub products: Vec<Product>,
    pub pairing_rank: usize,
    pub radical_dim: usize,
    pub triangles: Vec<Triangle>,
}

impl RingTable {
    /// The product of two basis indices as indices into `basis2`. Symmetric;
    /// the diagonal is zero.
    pub fn product(&self, i: usize, j: usize) -> Vec<usize> {
        let (a, b) = (i.min(j), i.max(j));
        self.products
            .iter()
            .find(|p| p.left == a && p.right == b)
            .map_or_else(Vec::new, |p| p.value.clone())
    }

    /// Number of distinct nonzero product values.
    pub fn distinct_values(&self) -> usize {
        self.products
            .iter()
            .map(|p| &p.value)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Product graph in DOT: vertices are basis elements with some nonzero
    /// product, edges carry the product.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph products {\n");
        let used: BTreeSet<usize> = self
            .products
            .iter()
            .flat_map(|p| [p.left, p.right])
            .collect();
        for &i in &used {
            let _ = writeln!(out, "  \"{}\";", self.basis1[i]);
        }
        for p in &self.products {
            let label: Vec<String> = p
                .value
                .iter()
                .map(|&l| self.basis2[l].to_string())
                .collect();
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\" [label=\"{}\"];",
                self.basis1[p.left],
                self.basis1[p.right],
                label.join(" + ")
            );
        }
        out.push_str("}\n");
        out
    }
}

/// A simplex of the class complex: distinct single-edge classes with a common
/// upper bound, labelled by their least upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HatCell {
    pub members: Vec<usize>,
    pub label: CellClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HatComplex {
    /// Every single-edge class, sorted.
    pub vertices: Vec<CellClass>,
    /// `levels[d - 1]` holds the simplices with `d` members.
    pub levels: Vec<Vec<HatCell>>,
}

/// The complex whose vertices are the single-edge classes and whose
/// simplices are the sets having a least upper bound, up to `max_dim` members.
pub fn build_hat_complex(space: &ConfigSpace, max_dim: usize) -> Result<HatComplex, CupError> {
    let tree = space.tree();
    let vertices: Vec<CellClass> = space
        .enumerate(1)
        .par_iter()
        .map(|c| class_of(tree, c))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let top = max_dim.min(space.strands());
    let mut levels: Vec<Vec<HatCell>> = Vec::new();
    if top >= 1 {
        levels.push(
            vertices
                .iter()
                .enumerate()
                .map(|(i, k)| HatCell {
                    members: vec![i],
                    label: k.clone(),
                })
                .collect(),
        );
    }
    for _ in 2..=top {
        let prev = levels.last().unwrap();
        let next: Result<Vec<Vec<HatCell>>, CupError> = prev
            .par_iter()
            .map(|cell| {
                let last = *cell.members.last().unwrap();
                let mut out = Vec::new();
                for extra in last + 1..vertices.len() {
                    let mut members = cell.members.clone();
                    members.push(extra);
                    let classes: Vec<CellClass> =
                        members.iter().map(|&i| vertices[i].clone()).collect();
                    if let Some(label) = lub(tree, &classes)? {
                        out.push(HatCell { members, label });
                    }
                }
                Ok(out)
            })
            .collect();
        levels.push(next?.into_iter().flatten().collect());
    }
    Ok(HatComplex { vertices, levels })
}
