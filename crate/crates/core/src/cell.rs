//! Cells, chains and cochains of the discretized configuration space
//! `UD^n T`.
//!
//! An `i`-cell is a set of `n` members, `i` of them edges and the rest
//! vertices, whose closures are pairwise disjoint. Members are kept sorted by
//! number (an edge is numbered by its initial vertex), which is also the order
//! in which the Morse matching scans them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;
use thiserror::Error;

use crate::tree::{EdgeRef, PlaneTree, TreeError, Vertex, ROOT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("malformed cell text: {0}")]
    Parse(String),
    #[error("not a cell: {0}")]
    Invalid(String),
    #[error("tree is not sufficiently subdivided for {0} strands")]
    NotSufficientlySubdivided(usize),
    #[error("the strand count must be at least 1")]
    NoStrands,
    #[error("a 0-dimensional cell has no faces")]
    ZeroDimensional,
    #[error("expected a {expected}-dimensional cell, got dimension {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0} is not an edge of the cell")]
    NotAnEdgeOfCell(EdgeRef),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// One member of a cell: a vertex or (the interior of) an edge. Packed as
/// `number << 1 | is_edge`, so the derived order is the order by number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item(u32);

impl Item {
    pub fn vertex(v: Vertex) -> Item {
        Item((v as u32) << 1)
    }

    pub fn edge(e: EdgeRef) -> Item {
        Item(((e.id() as u32) << 1) | 1)
    }

    pub fn number(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_edge(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn as_vertex(self) -> Option<Vertex> {
        (!self.is_edge()).then(|| self.number())
    }

    pub fn as_edge(self) -> Option<EdgeRef> {
        if self.is_edge() {
            EdgeRef::new(self.number())
        } else {
            None
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.is_edge(), self.number()) {
            (true, k) => write!(f, "e{k}"),
            (false, ROOT) => f.write_str("*"),
            (false, k) => write!(f, "v{k}"),
        }
    }
}

/// Which endpoint replaces an edge when it is broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Initial,
    Terminal,
}

/// An open cell of `UD^n T`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    items: SmallVec<[Item; 8]>,
}

impl Cell {
    /// Validates `items` against `tree` and sorts them.
    pub fn new(tree: &PlaneTree, items: impl IntoIterator<Item = Item>) -> Result<Cell, CellError> {
        let cell = Cell::from_items(items)?;
        cell.validate(tree)?;
        Ok(cell)
    }

    /// Sorts the members; rejects repeated numbers but does not look at any tree.
    pub fn from_items(items: impl IntoIterator<Item = Item>) -> Result<Cell, CellError> {
        let mut items: SmallVec<[Item; 8]> = items.into_iter().collect();
        items.sort_unstable();
        if let Some(w) = items.windows(2).find(|w| w[0].number() == w[1].number()) {
            return Err(CellError::Invalid(format!(
                "{} and {} share a number",
                w[0], w[1]
            )));
        }
        Ok(Cell { items })
    }

    pub(crate) fn from_sorted(items: SmallVec<[Item; 8]>) -> Cell {
        debug_assert!(items.windows(2).all(|w| w[0].number() < w[1].number()));
        Cell { items }
    }

    /// Parses the text form, e.g. `{e16, e19, v10, v13}` or `{*, v1, v2, v3}`,
    /// and validates the result against `tree`.
    pub fn parse(text: &str, tree: &PlaneTree) -> Result<Cell, CellError> {
        let cell: Cell = text.parse()?;
        cell.validate(tree)?;
        Ok(cell)
    }

    /// Checks that every member exists and that closures are pairwise disjoint.
    pub fn validate(&self, tree: &PlaneTree) -> Result<(), CellError> {
        let mut used = vec![false; tree.vertex_count()];
        let mut claim = |v: Vertex, what: Item| -> Result<(), CellError> {
            if v >= used.len() {
                return Err(CellError::Invalid(format!("{what} is not in the tree")));
            }
            if std::mem::replace(&mut used[v], true) {
                return Err(CellError::Invalid(format!(
                    "closure of {what} meets another member"
                )));
            }
            Ok(())
        };
        for &it in &self.items {
            match it.as_edge() {
                Some(e) => {
                    if tree.edge(e.id()).is_none() {
                        return Err(CellError::Invalid(format!(
                            "{it} is not an edge of the tree"
                        )));
                    }
                    claim(tree.initial(e), it)?;
                    claim(tree.terminal(e), it)?;
                }
                None if it.is_edge() => return Err(CellError::Invalid("e0 is not an edge".into())),
                None => claim(it.number(), it)?,
            }
        }
        Ok(())
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    /// Number of strands `n`.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.items.iter().filter(|it| it.is_edge()).count()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.items.iter().filter_map(|it| it.as_vertex())
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.items.iter().filter_map(|it| it.as_edge())
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.items.binary_search(&Item::vertex(v)).is_ok()
    }

    pub fn contains_edge(&self, e: EdgeRef) -> bool {
        self.items.binary_search(&Item::edge(e)).is_ok()
    }

    /// Whether `v` lies in the closure of some member other than `skip`.
    pub fn occupies_except(&self, tree: &PlaneTree, v: Vertex, skip: Item) -> bool {
        self.items.iter().any(|&it| {
            it != skip
                && match it.as_edge() {
                    Some(e) => tree.initial(e) == v || tree.terminal(e) == v,
                    None => it.number() == v,
                }
        })
    }

    /// Whether `v` lies in the closure of some member.
    pub fn occupies(&self, tree: &PlaneTree, v: Vertex) -> bool {
        self.items.iter().any(|&it| match it.as_edge() {
            Some(e) => tree.initial(e) == v || tree.terminal(e) == v,
            None => it.number() == v,
        })
    }

    /// Replaces the member `old` by `new`, keeping the order.
    pub fn replace(&self, old: Item, new: Item) -> Cell {
        let mut items: SmallVec<[Item; 8]> =
            self.items.iter().copied().filter(|&it| it != old).collect();
        let at = items.binary_search(&new).unwrap_or_else(|i| i);
        items.insert(at, new);
        Cell::from_sorted(items)
    }

    /// Replaces each listed edge by the chosen endpoint.
    pub fn break_edges(
        &self,
        tree: &PlaneTree,
        choices: &[(EdgeRef, Endpoint)],
    ) -> Result<Cell, CellError> {
        let mut out = self.clone();
        for &(e, end) in choices {
            if !out.contains_edge(e) {
                return Err(CellError::NotAnEdgeOfCell(e));
            }
            let v = match end {
                Endpoint::Initial => tree.initial(e),
                Endpoint::Terminal => tree.terminal(e),
            };
            out = out.replace(Item::edge(e), Item::vertex(v));
        }
        Ok(out)
    }

    /// The `2 dim` codimension-one faces with their incidence signs. With the
    /// edges ranked `k = 1, 2, …` by initial vertex, replacing the `k`-th edge
    /// by its initial vertex has sign `(-1)^k` and by its terminal vertex
    /// `(-1)^(k+1)`.
    pub fn faces_with_sign(&self, tree: &PlaneTree) -> Result<Vec<(Cell, i64)>, CellError> {
        if self.dim() == 0 {
            return Err(CellError::ZeroDimensional);
        }
        Ok(self.signed_faces(tree))
    }

    pub(crate) fn signed_faces(&self, tree: &PlaneTree) -> Vec<(Cell, i64)> {
        let mut out = Vec::with_capacity(2 * self.dim());
        let mut sign = 1i64;
        for &it in &self.items {
            let Some(e) = it.as_edge() else { continue };
            sign = -sign;
            out.push((self.replace(it, Item::vertex(tree.initial(e))), sign));
            out.push((self.replace(it, Item::vertex(tree.terminal(e))), -sign));
        }
        out
    }

    /// All `(dim + 1)`-cells having this cell as a face: some vertex is
    /// replaced by an edge toward an unoccupied neighbour.
    pub fn cofaces(&self, tree: &PlaneTree) -> Vec<Cell> {
        let mut out = Vec::new();
        for &it in &self.items {
            let Some(v) = it.as_vertex() else { continue };
            for u in tree.neighbors(v) {
                if !self.occupies(tree, u) {
                    let e = tree.edge_between(u, v).expect("neighbours are adjacent");
                    out.push(self.replace(it, Item::edge(e)));
                }
            }
        }
        out
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, it) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{it}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Cell {
    type Err = CellError;

    /// Syntax only: `'{' item (',' item)* '}'` with items `e<k>`, `v<k>`, `*`.
    fn from_str(s: &str) -> Result<Cell, CellError> {
        let body = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| CellError::Parse(format!("expected braces around {s:?}")))?;
        let mut items = SmallVec::<[Item; 8]>::new();
        for tok in body.split(',') {
            let tok = tok.trim();
            let item = if tok == "*" {
                Item::vertex(ROOT)
            } else if let Some(digits) = tok.strip_prefix('v') {
                Item::vertex(parse_number(digits, tok)?)
            } else if let Some(digits) = tok.strip_prefix('e') {
                let k = parse_number(digits, tok)?;
                Item::edge(
                    EdgeRef::new(k).ok_or_else(|| CellError::Parse("e0 is not an edge".into()))?,
                )
            } else {
                return Err(CellError::Parse(format!("unrecognised member {tok:?}")));
            };
            items.push(item);
        }
        Cell::from_items(items)
    }
}

fn parse_number(digits: &str, tok: &str) -> Result<usize, CellError> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(CellError::Parse(format!("unrecognised member {tok:?}")));
    }
    digits
        .parse::<usize>()
        .ok()
        .filter(|&k| k < (1 << 30))
        .ok_or_else(|| CellError::Parse(format!("number out of range in {tok:?}")))
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Cell, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// An integral chain: a finite combination of cells of one dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    dim: usize,
    terms: BTreeMap<Cell, i64>,
}

impl Chain {
    pub fn zero(dim: usize) -> Chain {
        Chain {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_cell(cell: Cell) -> Chain {
        let mut ch = Chain::zero(cell.dim());
        ch.terms.insert(cell, 1);
        ch
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, cell: &Cell) -> i64 {
        self.terms.get(cell).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Cell, i64)> {
        self.terms.iter().map(|(c, &a)| (c, a))
    }

    pub fn add_term(&mut self, cell: Cell, coeff: i64) {
        debug_assert_eq!(cell.dim(), self.dim, "chain terms share one dimension");
        if coeff == 0 {
            return;
        }
        match self.terms.entry(cell) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn add_chain(&mut self, other: &Chain, scale: i64) {
        for (c, a) in other.terms() {
            self.add_term(c.clone(), scale * a);
        }
    }

    /// Keeps only the terms whose cells satisfy `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Cell) -> bool) -> Chain {
        Chain {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(c, _)| keep(c))
                .map(|(c, &a)| (c.clone(), a))
                .collect(),
        }
    }

    pub(crate) fn from_accumulator(dim: usize, acc: HashMap<Cell, i64>) -> Chain {
        Chain {
            dim,
            terms: acc.into_iter().filter(|&(_, a)| a != 0).collect(),
        }
    }
}

/// A mod-2 cochain, stored as the set of cells where it takes the value 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cochain {
    dim: usize,
    support: BTreeSet<Cell>,
}

impl Cochain {
    pub fn zero(dim: usize) -> Cochain {
        Cochain {
            dim,
            support: BTreeSet::new(),
        }
    }

    pub fn from_cells(
        dim: usize,
        cells: impl IntoIterator<Item = Cell>,
    ) -> Result<Cochain, CellError> {
        let mut co = Cochain::zero(dim);
        for c in cells {
            if c.dim() != dim {
                return Err(CellError::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
            co.support.insert(c);
        }
        Ok(co)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &BTreeSet<Cell> {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn value(&self, cell: &Cell) -> u8 {
        u8::from(self.support.contains(cell))
    }

    /// `⟨self, ch⟩` reduced mod 2.
    pub fn evaluate(&self, ch: &Chain) -> u8 {
        let s: i64 = ch
            .terms()
            .filter(|(c, _)| self.support.contains(*c))
            .map(|(_, a)| a)
            .sum();
        s.rem_euclid(2) as u8
    }

    /// Sum mod 2.
    pub fn add(&self, other: &Cochain) -> Cochain {
        Cochain {
            dim: self.dim,
            support: self
                .support
                .symmetric_difference(&other.support)
                .cloned()
                .collect(),
        }
    }
}

/// `UD^n T` for a tree sufficiently subdivided for `n` strands.
#[derive(Debug, Clone)]
pub struct ConfigSpace {
    tree: PlaneTree,
    n: usize,
}

impl ConfigSpace {
    pub fn new(tree: PlaneTree, n: usize) -> Result<ConfigSpace, CellError> {
        if n == 0 {
            return Err(CellError::NoStrands);
        }
        if !tree.is_sufficiently_subdivided(n)? {
            return Err(CellError::NotSufficientlySubdivided(n));
        }
        Ok(ConfigSpace { tree, n })
    }

    pub fn tree(&self) -> &PlaneTree {
        &self.tree
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    /// Every set of `i` pairwise disjoint edges, in lexicographic order.
    pub fn disjoint_edge_sets(&self, i: usize) -> Vec<Vec<EdgeRef>> {
        let tree = &self.tree;
        let mut out = Vec::new();
        let mut used = vec![false; tree.vertex_count()];
        let mut current = Vec::with_capacity(i);
        fn rec(
            tree: &PlaneTree,
            from: usize,
            left: usize,
            used: &mut [bool],
            current: &mut Vec<EdgeRef>,
            out: &mut Vec<Vec<EdgeRef>>,
        ) {
            if left == 0 {
                out.push(current.clone());
                return;
            }
            for k in from..tree.vertex_count() {
                let e = tree.edge(k).unwrap();
                let (a, b) = (tree.initial(e), tree.terminal(e));
                if used[a] || used[b] {
                    continue;
                }
                used[a] = true;
                used[b] = true;
                current.push(e);
                rec(tree, k + 1, left - 1, used, current, out);
                current.pop();
                used[a] = false;
                used[b] = false;
            }
        }
        if i <= self.n {
            rec(tree, 1, i, &mut used, &mut current, &mut out);
        }
        out
    }

    /// All `i`-cells, sorted lexicographically by member sequence.
    pub fn enumerate(&self, i: usize) -> Vec<Cell> {
        let tree = &self.tree;
        let mut out = Vec::new();
        let want = match self.n.checked_sub(i) {
            Some(w) => w,
            None => return out,
        };
        for edges in self.disjoint_edge_sets(i) {
            let mut blocked = vec![false; tree.vertex_count()];
            for &e in &edges {
                blocked[tree.initial(e)] = true;
                blocked[tree.terminal(e)] = true;
            }
            let free: Vec<Vertex> = tree.vertices().filter(|&v| !blocked[v]).collect();
            for_each_combination(free.len(), want, |pick| {
                let items = edges
                    .iter()
                    .map(|&e| Item::edge(e))
                    .chain(pick.iter().map(|&j| Item::vertex(free[j])));
                let mut items: SmallVec<[Item; 8]> = items.collect();
                items.sort_unstable();
                out.push(Cell::from_sorted(items));
            });
        }
        out.sort_unstable();
        out
    }

    /// All cells whose edge set is exactly `edges`. Empty when the edges are
    /// not pairwise disjoint or there are too many of them.
    pub fn cells_with_edges(&self, edges: &[EdgeRef]) -> Vec<Cell> {
        let tree = &self.tree;
        let mut out = Vec::new();
        let Some(want) = self.n.checked_sub(edges.len()) else {
            return out;
        };
        let mut blocked = vec![false; tree.vertex_count()];
        for &e in edges {
            if tree.edge(e.id()).is_none() {
                return out;
            }
            for v in [tree.initial(e), tree.terminal(e)] {
                if std::mem::replace(&mut blocked[v], true) {
                    return out;
                }
            }
        }
        let free: Vec<Vertex> = tree.vertices().filter(|&v| !blocked[v]).collect();
        for_each_combination(free.len(), want, |pick| {
            let items = edges
                .iter()
                .map(|&e| Item::edge(e))
                .chain(pick.iter().map(|&j| Item::vertex(free[j])));
            let mut items: SmallVec<[Item; 8]> = items.collect();
            items.sort_unstable();
            out.push(Cell::from_sorted(items));
        });
        out.sort_unstable();
        out
    }

    /// `|enumerate(i)|`, without building the cells.
    pub fn cell_count(&self, i: usize) -> u128 {
        let Some(want) = self.n.checked_sub(i) else {
            return 0;
        };
        let Some(free) = self.tree.vertex_count().checked_sub(2 * i) else {
            return 0;
        };
        self.disjoint_edge_sets(i).len() as u128 * binomial(free as u128, want as u128)
    }

    pub fn faces_with_sign(&self, cell: &Cell) -> Result<Vec<(Cell, i64)>, CellError> {
        cell.faces_with_sign(&self.tree)
    }

    /// Cellular boundary. The boundary of a 0-chain is the zero 0-chain.
    pub fn boundary(&self, ch: &Chain) -> Chain {
        if ch.dim() == 0 {
            return Chain::zero(0);
        }
        let mut acc: HashMap<Cell, i64> = HashMap::new();
        for (c, a) in ch.terms() {
            for (f, s) in c.signed_faces(&self.tree) {
                *acc.entry(f).or_insert(0) += a * s;
            }
        }
        Chain::from_accumulator(ch.dim() - 1, acc)
    }

    /// Mod-2 coboundary: the `(d+1)`-cells with an odd number of faces in the
    /// support.
    pub fn coboundary(&self, co: &Cochain) -> Result<Cochain, CellError> {
        let mut parity: HashMap<Cell, bool> = HashMap::new();
        for c in co.support() {
            if c.dim() != co.dim() {
                return Err(CellError::DimensionMismatch {
                    expected: co.dim(),
                    found: c.dim(),
                });
            }
            if c.len() != self.n {
                return Err(CellError::Invalid(format!(
                    "{c} does not have {} members",
                    self.n
                )));
            }
            for up in c.cofaces(&self.tree) {
                *parity.entry(up).or_insert(false) ^= true;
            }
        }
        Ok(Cochain {
            dim: co.dim() + 1,
            support: parity
                .into_iter()
                .filter(|&(_, odd)| odd)
                .map(|(c, _)| c)
                .collect(),
        })
    }

    /// Validates a cell for this space, including the strand count.
    pub fn cell(&self, items: impl IntoIterator<Item = Item>) -> Result<Cell, CellError> {
        let c = Cell::new(&self.tree, items)?;
        self.check(&c)?;
        Ok(c)
    }

    pub fn parse_cell(&self, text: &str) -> Result<Cell, CellError> {
        let c = Cell::parse(text, &self.tree)?;
        self.check(&c)?;
        Ok(c)
    }

    fn check(&self, c: &Cell) -> Result<(), CellError> {
        if c.len() != self.n {
            return Err(CellError::Invalid(format!(
                "{c} has {} members, expected {}",
                c.len(),
                self.n
            )));
        }
        Ok(())
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

/// Calls `f` with every `k`-subset of `0..n`, in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmin() -> PlaneTree {
        PlaneTree::canonical_t_min()
    }

    #[test]
    fn parse_and_display() {
        let t = tmin();
        let c = Cell::parse("{v13, e19, v10,e16}", &t).unwrap();
        assert_eq!(c.to_string(), "{v10, v13, e16, e19}");
        assert_eq!(c.dim(), 2);
        assert_eq!(
            Cell::parse("{*, v1, v2, v3}", &t).unwrap().to_string(),
            "{*, v1, v2, v3}"
        );
        assert!(matches!(
            "{v1, x2}".parse::<Cell>(),
            Err(CellError::Parse(_))
        ));
        assert!(matches!("v1, v2".parse::<Cell>(), Err(CellError::Parse(_))));
        assert!(matches!("{e0}".parse::<Cell>(), Err(CellError::Parse(_))));
        assert!(matches!("{v}".parse::<Cell>(), Err(CellError::Parse(_))));
    }

    #[test]
    fn closure_disjointness() {
        let t = tmin();
        assert!(matches!(
            Cell::parse("{v9, e19}", &t),
            Err(CellError::Invalid(_))
        ));
        assert!(matches!(
            Cell::parse("{e10, e11}", &t),
            Err(CellError::Invalid(_))
        ));
        assert!(matches!(
            Cell::parse("{v1, e1}", &t),
            Err(CellError::Invalid(_))
        ));
        assert!(matches!(
            Cell::parse("{v40}", &t),
            Err(CellError::Invalid(_))
        ));
        assert!(Cell::parse("{e16, e19, v10, v13}", &t).is_ok());
    }

    #[test]
    fn faces_of_a_one_cell() {
        let t = tmin();
        let c = Cell::parse("{e19, v10, v13, *}", &t).unwrap();
        let faces = c.faces_with_sign(&t).unwrap();
        assert_eq!(
            faces,
            vec![
                (Cell::parse("{v19, v10, v13, *}", &t).unwrap(), -1),
                (Cell::parse("{v9, v10, v13, *}", &t).unwrap(), 1),
            ]
        );
        let v = Cell::parse("{*, v1, v2, v3}", &t).unwrap();
        assert_eq!(v.faces_with_sign(&t), Err(CellError::ZeroDimensional));
    }

    #[test]
    fn faces_of_a_two_cell_are_cells() {
        let t = tmin();
        let c = Cell::parse("{e16, e19, v10, v13}", &t).unwrap();
        let faces = c.faces_with_sign(&t).unwrap();
        assert_eq!(faces.len(), 4);
        for (f, _) in &faces {
            f.validate(&t).unwrap();
            assert_eq!(f.dim(), 1);
        }
    }

    #[test]
    fn breaking_edges() {
        let t = tmin();
        let c = Cell::parse("{e16, e19, v10, v13}", &t).unwrap();
        let e16 = t.edge(16).unwrap();
        let e19 = t.edge(19).unwrap();
        assert_eq!(
            c.break_edges(&t, &[(e16, Endpoint::Terminal)]).unwrap(),
            Cell::parse("{v12, e19, v10, v13}", &t).unwrap()
        );
        assert_eq!(c.break_edges(&t, &[]).unwrap(), c);
        let all = c
            .break_edges(&t, &[(e16, Endpoint::Initial), (e19, Endpoint::Initial)])
            .unwrap();
        assert_eq!(all.dim(), 0);
        all.validate(&t).unwrap();
        let e7 = t.edge(7).unwrap();
        assert_eq!(
            c.break_edges(&t, &[(e7, Endpoint::Initial)]),
            Err(CellError::NotAnEdgeOfCell(e7))
        );
    }

    #[test]
    fn small_enumerations() {
        let p = ConfigSpace::new(PlaneTree::path(4), 4).unwrap();
        assert_eq!(p.enumerate(0).len(), 1);
        assert_eq!(p.enumerate(1).len(), 0);
        let s = ConfigSpace::new(tmin(), 4).unwrap();
        assert_eq!(s.cell_count(0), 20475);
        assert_eq!(s.cell_count(1), 70200);
        assert!(matches!(
            ConfigSpace::new(PlaneTree::star(3), 4),
            Err(CellError::NotSufficientlySubdivided(4))
        ));
    }

    #[test]
    fn boundary_of_boundary_vanishes_on_a_sample() {
        let s = ConfigSpace::new(tmin(), 4).unwrap();
        let c = s.parse_cell("{e16, e19, v10, v13}").unwrap();
        let d = s.boundary(&Chain::from_cell(c));
        assert_eq!(d.len(), 4);
        assert!(s.boundary(&d).is_zero());
        let v = s.parse_cell("{*, v1, v2, v3}").unwrap();
        assert!(s.boundary(&Chain::from_cell(v)).is_zero());
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut count = 0;
        for_each_combination(3, 0, |_| count += 1);
        assert_eq!(count, 1);
        assert_eq!(binomial(28, 4), 20475);
    }

    #[test]
    fn coboundary_rejects_wrong_dimension() {
        let s = ConfigSpace::new(tmin(), 4).unwrap();
        let c = s.parse_cell("{e16, e19, v10, v13}").unwrap();
        let bad = Cochain {
            dim: 1,
            support: [c].into_iter().collect(),
        };
        assert_eq!(
            s.coboundary(&bad),
            Err(CellError::DimensionMismatch {
                expected: 1,
                found: 2
            })
        );
        assert!(s.coboundary(&Cochain::zero(1)).unwrap().is_zero());
    }
}
