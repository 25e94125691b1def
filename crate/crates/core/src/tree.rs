//! Rooted plane trees.
//!
//! Vertices are identified by their position in the depth-first preorder that
//! starts at the root and always takes the leftmost unvisited branch, so the
//! root is `0` and its unique neighbour is `1`. Every edge is named after its
//! endpoint farther from the root (the *initial* vertex), which makes the
//! edge numbering compatible with the vertex numbering.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A vertex, given by its preorder number.
pub type Vertex = usize;

/// The basepoint `*`.
pub const ROOT: Vertex = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("input is not a tree: {0}")]
    NotATree(String),
    #[error("the root must have degree 1, found degree {0}")]
    RootDegreeInvalid(usize),
    #[error("direction from vertex {0} to itself is undefined")]
    SameVertex(Vertex),
    #[error("tree has {vertices} vertices, fewer than the {strands} strands requested")]
    TooFewVertices { vertices: usize, strands: usize },
    #[error("vertex {0} is not in the tree")]
    UnknownVertex(Vertex),
}

/// An edge `e_k`, identified by the number `k` of its initial vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeRef(usize);

impl EdgeRef {
    /// `None` for `k == 0`: the root is never an initial vertex.
    pub fn new(k: usize) -> Option<Self> {
        (k >= 1).then_some(Self(k))
    }

    pub fn id(self) -> usize {
        self.0
    }

    /// The initial vertex of the edge.
    pub fn initial(self) -> Vertex {
        self.0
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// One of the `d(v)` directions leaving a vertex: `0` points at the root,
/// `1..d(v)` follow the child order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DirectionIndex(usize);

impl DirectionIndex {
    pub fn value(self) -> usize {
        self.0
    }
}

/// Vertex identifier in tree documents. Both `"a"` and `7` are accepted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeLabel {
    Name(String),
    Number(u64),
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeLabel::Name(s) => f.write_str(s),
            NodeLabel::Number(k) => write!(f, "{k}"),
        }
    }
}

/// The on-disk tree description: a root and the ordered child list of every
/// internal vertex. Leaves may be omitted from `children`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub root: NodeLabel,
    pub children: BTreeMap<String, Vec<NodeLabel>>,
}

/// A finite tree with a degree-one root and a fixed left-to-right order of
/// children at every vertex, numbered in preorder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneTree {
    parent: Vec<Vertex>,
    children: Vec<Vec<Vertex>>,
    subtree_end: Vec<Vertex>,
    depth: Vec<usize>,
    labels: Vec<String>,
}

impl PlaneTree {
    /// Builds a plane tree from child lists over arbitrary indices `0..m`,
    /// renumbering vertices in preorder. Returns the tree together with the
    /// map from input index to preorder number.
    pub fn order_vertices(
        root: usize,
        children: &[Vec<usize>],
        labels: Option<Vec<String>>,
    ) -> Result<(PlaneTree, Vec<Vertex>), TreeError> {
        let m = children.len();
        if root >= m {
            return Err(TreeError::NotATree(format!("root {root} is not a vertex")));
        }
        let mut parent: Vec<Option<usize>> = vec![None; m];
        for (p, cs) in children.iter().enumerate() {
            for &c in cs {
                if c >= m {
                    return Err(TreeError::NotATree(format!(
                        "child {c} of {p} is not a vertex"
                    )));
                }
                if c == root {
                    return Err(TreeError::NotATree(format!(
                        "root is listed as a child of {p}"
                    )));
                }
                if let Some(q) = parent[c] {
                    return Err(TreeError::NotATree(format!(
                        "vertex {c} is a child of both {q} and {p}"
                    )));
                }
                parent[c] = Some(p);
            }
        }
        if children[root].len() != 1 {
            return Err(TreeError::RootDegreeInvalid(children[root].len()));
        }

        let mut order = Vec::with_capacity(m);
        let mut stack = vec![root];
        let mut seen = vec![false; m];
        while let Some(v) = stack.pop() {
            if seen[v] {
                return Err(TreeError::NotATree(format!("vertex {v} reached twice")));
            }
            seen[v] = true;
            order.push(v);
            stack.extend(children[v].iter().rev().copied());
        }
        if order.len() != m {
            let missing = (0..m).find(|&v| !seen[v]).unwrap_or(0);
            return Err(TreeError::NotATree(format!(
                "vertex {missing} is not connected to the root"
            )));
        }

        let mut number = vec![0; m];
        for (k, &v) in order.iter().enumerate() {
            number[v] = k;
        }
        let mut new_children = vec![Vec::new(); m];
        let mut new_parent = vec![ROOT; m];
        for (v, cs) in children.iter().enumerate() {
            new_children[number[v]] = cs.iter().map(|&c| number[c]).collect();
            for &c in cs {
                new_parent[number[c]] = number[v];
            }
        }
        let new_labels = match labels {
            Some(ls) => {
                if ls.len() != m {
                    return Err(TreeError::NotATree(
                        "label count differs from vertex count".into(),
                    ));
                }
                order.iter().map(|&v| ls[v].clone()).collect()
            }
            None => (0..m).map(|k| k.to_string()).collect(),
        };
        Ok((
            PlaneTree::from_numbered(new_parent, new_children, new_labels),
            number,
        ))
    }

    fn from_numbered(parent: Vec<Vertex>, children: Vec<Vec<Vertex>>, labels: Vec<String>) -> Self {
        let m = parent.len();
        let mut depth = vec![0; m];
        for v in 1..m {
            depth[v] = depth[parent[v]] + 1;
        }
        let mut subtree_end: Vec<Vertex> = (1..=m).collect();
        for v in (1..m).rev() {
            let p = parent[v];
            subtree_end[p] = subtree_end[p].max(subtree_end[v]);
        }
        PlaneTree {
            parent,
            children,
            subtree_end,
            depth,
            labels,
        }
    }

    pub fn from_spec(spec: &TreeSpec) -> Result<PlaneTree, TreeError> {
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut labels = Vec::new();
        let mut intern = |s: String, labels: &mut Vec<String>| -> usize {
            *index.entry(s.clone()).or_insert_with(|| {
                labels.push(s);
                labels.len() - 1
            })
        };
        let root = intern(spec.root.to_string(), &mut labels);
        let mut lists: Vec<(usize, Vec<usize>)> = Vec::new();
        for (p, cs) in &spec.children {
            let pi = intern(p.clone(), &mut labels);
            let ci = cs
                .iter()
                .map(|c| intern(c.to_string(), &mut labels))
                .collect();
            lists.push((pi, ci));
        }
        let mut children = vec![Vec::new(); labels.len()];
        for (p, cs) in lists {
            children[p] = cs;
        }
        Self::order_vertices(root, &children, Some(labels)).map(|(t, _)| t)
    }

    pub fn to_spec(&self) -> TreeSpec {
        let children = (0..self.vertex_count())
            .filter(|&v| !self.children[v].is_empty())
            .map(|v| {
                let cs = self.children[v]
                    .iter()
                    .map(|&c| NodeLabel::Name(self.labels[c].clone()))
                    .collect();
                (self.labels[v].clone(), cs)
            })
            .collect();
        TreeSpec {
            root: NodeLabel::Name(self.labels[ROOT].clone()),
            children,
        }
    }

    /// A path on `vertices` vertices, rooted at one end.
    pub fn path(vertices: usize) -> PlaneTree {
        assert!(vertices >= 2, "a path needs at least two vertices");
        let children: Vec<Vec<usize>> = (0..vertices)
            .map(|v| {
                if v + 1 < vertices {
                    vec![v + 1]
                } else {
                    vec![]
                }
            })
            .collect();
        Self::order_vertices(0, &children, None)
            .expect("paths are trees")
            .0
    }

    /// A root leaf attached to a centre carrying `leaves` further leaves.
    pub fn star(leaves: usize) -> PlaneTree {
        Self::spider(1, &vec![1; leaves])
    }

    /// A root arm of `root_arm` edges ending at a centre, from which hang
    /// further arms with the given edge counts, left to right.
    pub fn spider(root_arm: usize, arms: &[usize]) -> PlaneTree {
        assert!(root_arm >= 1);
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); root_arm + 1];
        for (v, kids) in children.iter_mut().enumerate().take(root_arm) {
            kids.push(v + 1);
        }
        let centre = root_arm;
        for &len in arms {
            let mut prev = centre;
            for _ in 0..len {
                children.push(Vec::new());
                let v = children.len() - 1;
                children[prev].push(v);
                prev = v;
            }
        }
        Self::order_vertices(0, &children, None)
            .expect("spiders are trees")
            .0
    }

    /// The minimal nonlinear tree, with 28 vertices and essential vertices
    /// 3, 9, 12 and 21; every arc has exactly three edges.
    pub fn canonical_t_min() -> PlaneTree {
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); 28];
        let chain = |children: &mut Vec<Vec<usize>>, from: usize, to: usize| {
            for (v, kids) in children.iter_mut().enumerate().take(to).skip(from) {
                kids.push(v + 1);
            }
        };
        chain(&mut children, 0, 3);
        for (branch, left, right) in [(3, 4, 7), (9, 10, 19), (12, 13, 16), (21, 22, 25)] {
            children[branch].push(left);
            children[branch].push(right);
            chain(&mut children, left, left + 2);
            chain(&mut children, right, right + 2);
        }
        let mut t = Self::order_vertices(0, &children, None)
            .expect("T_min is a tree")
            .0;
        t.labels[ROOT] = "*".into();
        t
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.parent.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        (1..self.parent.len()).map(EdgeRef)
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v < self.parent.len()
    }

    /// `None` for the root.
    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        (v != ROOT).then(|| self.parent[v])
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v]
    }

    /// Neighbours in clockwise order starting with the direction of the root.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.parent(v)
            .into_iter()
            .chain(self.children[v].iter().copied())
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.children[v].len() + usize::from(v != ROOT)
    }

    pub fn depth(&self, v: Vertex) -> usize {
        self.depth[v]
    }

    /// Whether `w` lies in the subtree hanging from `v` (including `v`).
    pub fn in_subtree(&self, v: Vertex, w: Vertex) -> bool {
        v <= w && w < self.subtree_end[v]
    }

    /// The vertices of the subtree rooted at `v`, which form a contiguous range.
    pub fn subtree(&self, v: Vertex) -> std::ops::Range<Vertex> {
        v..self.subtree_end[v]
    }

    pub fn edge(&self, k: usize) -> Option<EdgeRef> {
        (k >= 1 && k < self.vertex_count()).then_some(EdgeRef(k))
    }

    /// `ι(e)`: the endpoint farther from the root.
    pub fn initial(&self, e: EdgeRef) -> Vertex {
        e.0
    }

    /// `τ(e)`: the endpoint nearer the root.
    pub fn terminal(&self, e: EdgeRef) -> Vertex {
        self.parent[e.0]
    }

    /// The edge leaving `v` toward the root, `e(v)`.
    pub fn edge_toward_root(&self, v: Vertex) -> Option<EdgeRef> {
        EdgeRef::new(v).filter(|_| v < self.vertex_count())
    }

    /// The edge joining two adjacent vertices.
    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeRef> {
        if u != ROOT && self.parent[u] == v {
            Some(EdgeRef(u))
        } else if v != ROOT && self.parent[v] == u {
            Some(EdgeRef(v))
        } else {
            None
        }
    }

    pub fn direction_index(&self, v: Vertex, w: Vertex) -> Result<DirectionIndex, TreeError> {
        for x in [v, w] {
            if !self.contains(x) {
                return Err(TreeError::UnknownVertex(x));
            }
        }
        if v == w {
            return Err(TreeError::SameVertex(v));
        }
        if !self.in_subtree(v, w) {
            return Ok(DirectionIndex(0));
        }
        let k = self.children[v]
            .iter()
            .position(|&c| self.in_subtree(c, w))
            .expect("w lies below some child of v");
        Ok(DirectionIndex(k + 1))
    }

    pub fn is_essential(&self, v: Vertex) -> bool {
        self.degree(v) >= 3
    }

    pub fn essential_vertices(&self) -> Vec<Vertex> {
        self.vertices().filter(|&v| self.is_essential(v)).collect()
    }

    /// Vertices on the geodesic from `u` to `v`, both included.
    pub fn geodesic(&self, u: Vertex, v: Vertex) -> Vec<Vertex> {
        let (mut a, mut b) = (u, v);
        let mut head = Vec::new();
        let mut tail = Vec::new();
        while a != b {
            if self.depth[a] >= self.depth[b] {
                head.push(a);
                a = self.parent[a];
            } else {
                tail.push(b);
                b = self.parent[b];
            }
        }
        head.push(a);
        head.extend(tail.into_iter().rev());
        head
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> usize {
        self.geodesic(u, v).len() - 1
    }

    /// True iff all essential vertices lie on one embedded arc, i.e. the
    /// subtree they span is a path.
    pub fn is_linear(&self) -> bool {
        let m = self.vertex_count();
        let mut below = vec![0usize; m];
        for v in (0..m).rev() {
            below[v] += usize::from(self.is_essential(v));
            if v != ROOT {
                let p = self.parent[v];
                below[p] += below[v];
            }
        }
        let total = below[ROOT];
        if total <= 1 {
            return true;
        }
        let mut spanned_degree = vec![0usize; m];
        for v in 1..m {
            if below[v] > 0 && below[v] < total {
                spanned_degree[v] += 1;
                spanned_degree[self.parent[v]] += 1;
            }
        }
        spanned_degree.iter().all(|&d| d <= 2)
    }

    /// Edge counts of all arcs: maximal paths whose interior vertices have
    /// degree two. Each arc is reported once, walking away from the root.
    pub fn arc_lengths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for start in self.vertices().filter(|&v| self.degree(v) != 2) {
            for &c in &self.children[start] {
                let mut len = 1;
                let mut cur = c;
                while self.degree(cur) == 2 {
                    cur = self.children[cur][0];
                    len += 1;
                }
                out.push(len);
            }
        }
        out
    }

    /// Whether every path between distinct vertices of degree other than two
    /// crosses at least `n - 1` edges. Trees have no cycles, so this is the
    /// whole subdivision requirement.
    pub fn is_sufficiently_subdivided(&self, n: usize) -> Result<bool, TreeError> {
        if self.vertex_count() < n {
            return Err(TreeError::TooFewVertices {
                vertices: self.vertex_count(),
                strands: n,
            });
        }
        if n <= 1 {
            return Ok(true);
        }
        // Any such path starts with a whole arc.
        Ok(self.arc_lengths().into_iter().all(|len| len + 1 >= n))
    }

    /// The smallest subdivision sufficient for `n` strands: each short arc is
    /// stretched to exactly `n - 1` edges, with the new vertices spread evenly
    /// over its original edges. Also returns the map from old to new vertex
    /// numbers.
    pub fn subdivide_for(&self, n: usize) -> (PlaneTree, Vec<Vertex>) {
        let m = self.vertex_count();
        if n <= 1 {
            return (self.clone(), (0..m).collect());
        }
        let target = n - 1;
        let mut children = self.children.clone();
        let mut labels = self.labels.clone();
        for start in self.vertices().filter(|&v| self.degree(v) != 2) {
            for &first in &self.children[start] {
                let mut arc = vec![start, first];
                while self.degree(*arc.last().unwrap()) == 2 {
                    let last = *arc.last().unwrap();
                    arc.push(self.children[last][0]);
                }
                let len = arc.len() - 1;
                if len >= target {
                    continue;
                }
                let extra = target - len;
                for j in 0..len {
                    let count = (j + 1) * extra / len - j * extra / len;
                    let (p, c) = (arc[j], arc[j + 1]);
                    let mut prev = p;
                    let mut fresh = Vec::with_capacity(count);
                    for i in 0..count {
                        children.push(Vec::new());
                        labels.push(format!("{}~{}.{}", self.labels[p], self.labels[c], i + 1));
                        fresh.push(children.len() - 1);
                    }
                    for &s in &fresh {
                        if prev == p {
                            let slot = children[p].iter().position(|&x| x == c).unwrap();
                            children[p][slot] = s;
                        } else {
                            children[prev].push(s);
                        }
                        prev = s;
                    }
                    if prev != p {
                        children[prev].push(c);
                    }
                }
            }
        }
        let (tree, number) = Self::order_vertices(ROOT, &children, Some(labels))
            .expect("subdivision of a tree is a tree");
        let map = (0..m).map(|v| number[v]).collect();
        (tree, map)
    }

    /// The same plane tree with basepoint moved to the degree-one vertex
    /// `new_root`; the clockwise order around every vertex is kept. Returns
    /// the old-to-new numbering as well.
    pub fn reroot(&self, new_root: Vertex) -> Result<(PlaneTree, Vec<Vertex>), TreeError> {
        if !self.contains(new_root) {
            return Err(TreeError::UnknownVertex(new_root));
        }
        if self.degree(new_root) != 1 {
            return Err(TreeError::RootDegreeInvalid(self.degree(new_root)));
        }
        let m = self.vertex_count();
        let mut children = vec![Vec::new(); m];
        for (v, slot) in children.iter_mut().enumerate() {
            let around: Vec<Vertex> = self.neighbors(v).collect();
            if v == new_root {
                *slot = around;
                continue;
            }
            let toward = if self.in_subtree(v, new_root) {
                *self.children[v]
                    .iter()
                    .find(|&&c| self.in_subtree(c, new_root))
                    .unwrap()
            } else {
                self.parent[v]
            };
            let j = around.iter().position(|&x| x == toward).unwrap();
            *slot = around[j + 1..]
                .iter()
                .chain(&around[..j])
                .copied()
                .collect();
        }
        Self::order_vertices(new_root, &children, Some(self.labels.clone()))
    }
}
