//! Flag complexes, the right-angled Artin group verdict, and the embedding of
//! the minimal nonlinear tree into a larger host.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell::{Cell, CellError, ConfigSpace, Item};
use crate::cup::RingTable;
use crate::morse::{classify, CellStatus};
use crate::tree::{EdgeRef, PlaneTree, TreeError, Vertex, ROOT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RaagError {
    #[error("the host tree is linear")]
    HostLinear,
    #[error("the host tree is too small: {0}")]
    HostTooSmall(String),
    #[error("an embedding needs at least 4 strands, got {0}")]
    TooFewStrands(usize),
    #[error("filler vertex {0} meets the image cell")]
    FillerCollision(Vertex),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Cell(#[from] CellError),
}

/// A finite simplicial complex, stored as all of its nonempty simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex<V: Ord + Clone> {
    vertices: BTreeSet<V>,
    simplices: BTreeSet<BTreeSet<V>>,
}

impl<V: Ord + Clone> SimplicialComplex<V> {
    /// The smallest complex containing the given vertices and faces.
    pub fn from_faces(
        vertices: impl IntoIterator<Item = V>,
        faces: impl IntoIterator<Item = BTreeSet<V>>,
    ) -> Self {
        let mut out = SimplicialComplex {
            vertices: vertices.into_iter().collect(),
            simplices: BTreeSet::new(),
        };
        for f in faces {
            out.vertices.extend(f.iter().cloned());
            out.add_closure(f);
        }
        let singletons: Vec<BTreeSet<V>> = out
            .vertices
            .iter()
            .map(|v| BTreeSet::from([v.clone()]))
            .collect();
        out.simplices.extend(singletons);
        out
    }

    fn add_closure(&mut self, face: BTreeSet<V>) {
        if face.is_empty() || self.simplices.contains(&face) {
            return;
        }
        for v in &face {
            let mut smaller = face.clone();
            smaller.remove(v);
            self.add_closure(smaller);
        }
        self.simplices.insert(face);
    }

    pub fn vertices(&self) -> &BTreeSet<V> {
        &self.vertices
    }

    pub fn simplices(&self) -> &BTreeSet<BTreeSet<V>> {
        &self.simplices
    }

    pub fn contains(&self, face: &BTreeSet<V>) -> bool {
        face.is_empty() || self.simplices.contains(face)
    }

    /// Pairs of vertices spanning an edge.
    pub fn edges(&self) -> Vec<(V, V)> {
        self.simplices
            .iter()
            .filter(|s| s.len() == 2)
            .map(|s| {
                let mut it = s.iter().cloned();
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect()
    }

    /// Whether every clique of the 1-skeleton is a simplex.
    pub fn is_flag(&self) -> bool {
        self.minimal_missing_clique().is_none()
    }

    /// A clique of the 1-skeleton that is not a simplex although all of its
    /// proper subsets are.
    pub fn minimal_missing_clique(&self) -> Option<BTreeSet<V>> {
        let cliques = maximal_cliques(&self.vertices, &self.edges());
        let mut missing = cliques.into_iter().find(|c| !self.contains(c))?;
        loop {
            let smaller = missing.iter().find_map(|v| {
                let mut s = missing.clone();
                s.remove(v);
                (!self.contains(&s)).then_some(s)
            });
            match smaller {
                Some(s) => missing = s,
                None => return Some(missing),
            }
        }
    }
}

/// The clique complex of a simple graph.
pub fn flag_completion<V: Ord + Clone>(
    vertices: impl IntoIterator<Item = V>,
    edges: &[(V, V)],
) -> SimplicialComplex<V> {
    let vertices: BTreeSet<V> = vertices
        .into_iter()
        .chain(edges.iter().flat_map(|(a, b)| [a.clone(), b.clone()]))
        .collect();
    let cliques = maximal_cliques(&vertices, edges);
    SimplicialComplex::from_faces(vertices, cliques)
}

/// Bron–Kerbosch with pivoting.
fn maximal_cliques<V: Ord + Clone>(vertices: &BTreeSet<V>, edges: &[(V, V)]) -> Vec<BTreeSet<V>> {
    let mut adj: BTreeMap<V, BTreeSet<V>> = vertices
        .iter()
        .map(|v| (v.clone(), BTreeSet::new()))
        .collect();
    for (a, b) in edges {
        if a != b {
            adj.entry(a.clone()).or_default().insert(b.clone());
            adj.entry(b.clone()).or_default().insert(a.clone());
        }
    }
    fn rec<V: Ord + Clone>(
        adj: &BTreeMap<V, BTreeSet<V>>,
        r: BTreeSet<V>,
        mut p: BTreeSet<V>,
        mut x: BTreeSet<V>,
        out: &mut Vec<BTreeSet<V>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r);
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .max_by_key(|u| adj[*u].intersection(&p).count())
            .cloned()
            .unwrap();
        let candidates: Vec<V> = p.difference(&adj[&pivot]).cloned().collect();
        for v in candidates {
            let mut r2 = r.clone();
            r2.insert(v.clone());
            let p2 = p.intersection(&adj[&v]).cloned().collect();
            let x2 = x.intersection(&adj[&v]).cloned().collect();
            rec(adj, r2, p2, x2, out);
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    rec(
        &adj,
        BTreeSet::new(),
        adj.keys().cloned().collect(),
        BTreeSet::new(),
        &mut out,
    );
    out.retain(|c| !c.is_empty());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    IsRAAG,
    NotRAAG,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictReason {
    /// All essential vertices lie on one arc.
    Linear,
    /// Fewer than four strands; the group is free.
    FewStrands,
    /// A nonlinear tree with at least four strands.
    NonlinearManyStrands,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for VerdictReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Whether the braid group of `n` strands on `tree` is a right-angled Artin
/// group: exactly when the tree is linear or there are fewer than four strands.
pub fn raag_status(tree: &PlaneTree, n: usize) -> (Verdict, VerdictReason) {
    if tree.is_linear() {
        (Verdict::IsRAAG, VerdictReason::Linear)
    } else if n < 4 {
        (Verdict::IsRAAG, VerdictReason::FewStrands)
    } else {
        (Verdict::NotRAAG, VerdictReason::NonlinearManyStrands)
    }
}

/// The complex on degree-one basis indices whose simplices are the sets with
/// a nonzero product (up to triples, the range the table covers).
pub fn product_complex(rt: &RingTable) -> SimplicialComplex<usize> {
    let mut faces: Vec<BTreeSet<usize>> = rt
        .products
        .iter()
        .map(|p| BTreeSet::from([p.left, p.right]))
        .collect();
    faces.extend(
        rt.triangles
            .iter()
            .filter(|t| !t.product.is_empty())
            .map(|t| t.members.into_iter().collect()),
    );
    SimplicialComplex::from_faces(0..rt.basis1.len(), faces)
}

/// Three degree-one classes with pairwise nonzero products whose triple
/// product vanishes. Diagnostic only: it concerns the given basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonFlagWitness {
    pub triangle: [Cell; 3],
    /// Products of the pairs (0,1), (0,2), (1,2), as degree-two basis cells.
    pub pair_products: [Vec<Cell>; 3],
}

pub fn non_flag_witness(rt: &RingTable) -> Option<NonFlagWitness> {
    let t = rt.triangles.iter().find(|t| t.product.is_empty())?;
    let [a, b, c] = t.members;
    let cells = |v: Vec<usize>| {
        v.into_iter()
            .map(|l| rt.basis2[l].clone())
            .collect::<Vec<_>>()
    };
    Some(NonFlagWitness {
        triangle: [
            rt.basis1[a].clone(),
            rt.basis1[b].clone(),
            rt.basis1[c].clone(),
        ],
        pair_products: [
            cells(rt.product(a, b)),
            cells(rt.product(a, c)),
            cells(rt.product(b, c)),
        ],
    })
}

/// A subdivided copy of the minimal nonlinear tree inside a host, with the
/// host rerooted so that the copy's basepoint sits `n - 4` edges from the
/// host basepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEmbedding {
    /// The embedded tree, numbered from its own basepoint.
    pub source: PlaneTree,
    /// The host, rerooted at its new basepoint.
    pub host: PlaneTree,
    /// Source vertex to host vertex.
    pub vertex_map: Vec<Vertex>,
    /// The `n - 4` host vertices closest to the host basepoint.
    pub fillers: Vec<Vertex>,
    /// Edges on the geodesic between the two basepoints.
    pub basepoint_gap: usize,
    /// Host vertices (original numbering) of the three branch ends and the
    /// branch point.
    pub anchors: [Vertex; 4],
}

impl TreeEmbedding {
    pub fn strands(&self) -> usize {
        4 + self.fillers.len()
    }

    pub fn image_of(&self, v: Vertex) -> Vertex {
        self.vertex_map[v]
    }
}

/// Places a subdivided minimal nonlinear tree inside `host`. A longest run of
/// essential vertices on one arc gives two branch ends, the smallest
/// essential vertex off that arc gives the third, and each end grows two arms
/// of three edges. The basepoint is chosen at the smallest arm tip and pushed
/// outward until it is `n - 4` edges from a leaf.
pub fn embed_t_min(host: &PlaneTree, n: usize) -> Result<TreeEmbedding, RaagError> {
    if n < 4 {
        return Err(RaagError::TooFewStrands(n));
    }
    if host.is_linear() {
        return Err(RaagError::HostLinear);
    }
    if !host.is_sufficiently_subdivided(n)? {
        return Err(RaagError::HostTooSmall(format!(
            "not sufficiently subdivided for {n} strands"
        )));
    }
    let ess = host.essential_vertices();
    let on_path = |path: &[Vertex]| path.iter().filter(|&&v| host.is_essential(v)).count();
    let mut best: Option<(usize, Vertex, Vertex)> = None;
    for (i, &a) in ess.iter().enumerate() {
        for &b in &ess[i + 1..] {
            let k = on_path(&host.geodesic(a, b));
            if best.is_none_or(|(bk, _, _)| k > bk) {
                best = Some((k, a, b));
            }
        }
    }
    let (_, v1, v2) = best.ok_or(RaagError::HostLinear)?;
    let spine: BTreeSet<Vertex> = host.geodesic(v1, v2).into_iter().collect();
    let v3 = *ess
        .iter()
        .find(|v| !spine.contains(v))
        .ok_or(RaagError::HostLinear)?;
    let v4 = *host
        .geodesic(v3, v1)
        .iter()
        .find(|v| spine.contains(v))
        .unwrap();

    let mut image: BTreeSet<Vertex> = BTreeSet::new();
    let mut tips = Vec::new();
    for end in [v1, v2, v3] {
        let leg = host.geodesic(v4, end);
        let inward = leg[leg.len() - 2];
        image.extend(leg);
        let outward: Vec<Vertex> = host
            .neighbors(end)
            .filter(|&u| u != inward)
            .take(2)
            .collect();
        for first in outward {
            let mut arm = vec![end, first];
            while arm.len() < 4 {
                let cur = *arm.last().unwrap();
                if host.degree(cur) != 2 {
                    return Err(RaagError::HostTooSmall(format!(
                        "arm from {end} stops at {cur}"
                    )));
                }
                let prev = arm[arm.len() - 2];
                arm.push(host.neighbors(cur).find(|&u| u != prev).unwrap());
            }
            tips.push((arm[3], arm[2]));
            image.extend(arm);
        }
    }

    let &(hat, before) = tips.iter().min().unwrap();
    let mut walk = vec![hat];
    let mut prev = before;
    loop {
        let cur = *walk.last().unwrap();
        let Some(next) = host
            .neighbors(cur)
            .filter(|&u| u != prev && !image.contains(&u))
            .min()
        else {
            break;
        };
        prev = cur;
        walk.push(next);
    }
    let star = *walk.last().unwrap();
    if host.degree(star) != 1 || walk.len() - 1 < n - 4 {
        return Err(RaagError::HostTooSmall(
            "no room for the basepoint segment".into(),
        ));
    }
    let bar_at = walk.len() - 1 - (n - 4);
    image.extend(&walk[..=bar_at]);
    let star_bar = walk[bar_at];

    let (rerooted, renumber) = host.reroot(star)?;
    let image_new: Vec<Vertex> = image
        .iter()
        .map(|&v| renumber[v])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<Vertex, usize> =
        image_new.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let children: Vec<Vec<usize>> = image_new
        .iter()
        .map(|&v| {
            rerooted
                .children(v)
                .iter()
                .filter_map(|c| index.get(c).copied())
                .collect()
        })
        .collect();
    let (source, number) = PlaneTree::order_vertices(index[&renumber[star_bar]], &children, None)?;
    let mut vertex_map = vec![0; image_new.len()];
    for (i, &v) in image_new.iter().enumerate() {
        vertex_map[number[i]] = v;
    }
    let bar_new = renumber[star_bar];
    let mut fillers = rerooted.geodesic(ROOT, bar_new);
    fillers.pop();
    Ok(TreeEmbedding {
        source,
        host: rerooted,
        vertex_map,
        basepoint_gap: fillers.len(),
        fillers,
        anchors: [v1, v2, v3, v4],
    })
}

/// Image of a 4-strand cell of the embedded tree, completed by the fillers.
pub fn theta_cell(c: &Cell, emb: &TreeEmbedding) -> Result<Cell, RaagError> {
    let mut items = Vec::with_capacity(c.len() + emb.fillers.len());
    for &it in c.items() {
        items.push(match it.as_edge() {
            Some(e) => {
                let image = emb.image_of(e.initial());
                Item::edge(
                    EdgeRef::new(image)
                        .ok_or_else(|| RaagError::HostTooSmall("edge maps to root".into()))?,
                )
            }
            None => Item::vertex(emb.image_of(it.number())),
        });
    }
    let partial = Cell::from_items(items.iter().copied())?;
    for &f in &emb.fillers {
        if partial.occupies(&emb.host, f) {
            return Err(RaagError::FillerCollision(f));
        }
        items.push(Item::vertex(f));
    }
    Ok(Cell::new(&emb.host, items)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeFailure {
    pub source: Cell,
    pub expected: CellStatus,
    /// The image and its status, or `None` when the image is not a cell.
    pub image: Option<(Cell, CellStatus)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TypeReport {
    pub checked: usize,
    pub failures: Vec<TypeFailure>,
}

impl TypeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares the status of every cell of `UD^4` of the embedded tree, up to
/// `max_dim`, with the status of its image.
pub fn check_type_preservation(
    emb: &TreeEmbedding,
    max_dim: usize,
) -> Result<TypeReport, RaagError> {
    let space = ConfigSpace::new(emb.source.clone(), 4)?;
    let mut report = TypeReport::default();
    for dim in 0..=max_dim.min(4) {
        let cells = space.enumerate(dim);
        report.checked += cells.len();
        let failures: Vec<TypeFailure> = cells
            .par_iter()
            .filter_map(|c| {
                let expected = classify(&emb.source, c);
                match theta_cell(c, emb) {
                    Ok(img) => {
                        let found = classify(&emb.host, &img);
                        (found != expected).then(|| TypeFailure {
                            source: c.clone(),
                            expected,
                            image: Some((img, found)),
                        })
                    }
                    Err(_) => Some(TypeFailure {
                        source: c.clone(),
                        expected,
                        image: None,
                    }),
                }
            })
            .collect();
        report.failures.extend(failures);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn hollow_triangle_is_not_flag() {
        let k = SimplicialComplex::from_faces(0..3, [set(&[0, 1]), set(&[1, 2]), set(&[0, 2])]);
        assert!(!k.is_flag());
        assert_eq!(k.minimal_missing_clique(), Some(set(&[0, 1, 2])));
        let full = SimplicialComplex::from_faces(0..3, [set(&[0, 1, 2])]);
        assert!(full.is_flag());
        assert_eq!(full.simplices().len(), 7);
    }

    #[test]
    fn completions() {
        let tri = flag_completion(0..3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(tri.contains(&set(&[0, 1, 2])));
        let bare = flag_completion(0..4, &[]);
        assert_eq!(bare.simplices().len(), 4);
        let path = flag_completion(0..3, &[(0, 1), (1, 2)]);
        assert_eq!(path.simplices().len(), 5);
        assert!(path.is_flag());
    }

    #[test]
    fn verdicts() {
        let t = PlaneTree::canonical_t_min();
        assert_eq!(
            raag_status(&t, 4),
            (Verdict::NotRAAG, VerdictReason::NonlinearManyStrands)
        );
        assert_eq!(
            raag_status(&t, 3),
            (Verdict::IsRAAG, VerdictReason::FewStrands)
        );
        assert_eq!(
            raag_status(&PlaneTree::path(9), 7),
            (Verdict::IsRAAG, VerdictReason::Linear)
        );
    }

    #[test]
    fn identity_embedding() {
        let t = PlaneTree::canonical_t_min();
        let emb = embed_t_min(&t, 4).unwrap();
        assert_eq!(emb.source.children(0), t.children(0));
        assert_eq!(emb.vertex_map, (0..28).collect::<Vec<_>>());
        assert!(emb.fillers.is_empty());
        assert_eq!(emb.anchors, [3, 12, 21, 9]);
        let base = Cell::parse("{*, v1, v2, v3}", &t).unwrap();
        assert_eq!(theta_cell(&base, &emb).unwrap(), base);
        assert!(matches!(
            embed_t_min(&PlaneTree::path(9), 4),
            Err(RaagError::HostLinear)
        ));
        assert!(matches!(
            embed_t_min(&t, 5),
            Err(RaagError::HostTooSmall(_))
        ));
    }

    #[test]
    fn longer_gap() {
        let (host, _) = PlaneTree::canonical_t_min().subdivide_for(6);
        let emb = embed_t_min(&host, 6).unwrap();
        assert_eq!(emb.basepoint_gap, 2);
        assert_eq!(emb.fillers.len(), 2);
        assert_eq!(emb.source.essential_vertices().len(), 4);
        assert!(emb.source.is_sufficiently_subdivided(4).unwrap());
        for &f in &emb.fillers {
            assert!(!emb.vertex_map.contains(&f));
        }
    }

    #[test]
    fn types_survive_for_five_strands() {
        let (host, _) = PlaneTree::canonical_t_min().subdivide_for(5);
        let emb = embed_t_min(&host, 5).unwrap();
        assert_eq!(emb.basepoint_gap, 1);
        let report = check_type_preservation(&emb, 2).unwrap();
        assert!(report.passed(), "{:?}", report.failures.first());
        assert!(report.checked > 0);
    }

    #[test]
    fn misplaced_filler_is_reported() {
        let (host, _) = PlaneTree::canonical_t_min().subdivide_for(5);
        let mut emb = embed_t_min(&host, 5).unwrap();
        // A vertex hanging off an arm tip, next to the image but not on the
        // basepoint segment.
        let stray = emb
            .host
            .vertices()
            .find(|v| {
                !emb.vertex_map.contains(v)
                    && !emb.fillers.contains(v)
                    && emb.host.neighbors(*v).any(|u| emb.vertex_map.contains(&u))
            })
            .unwrap();
        emb.fillers = vec![stray];
        assert!(!check_type_preservation(&emb, 1).unwrap().passed());
    }
}
