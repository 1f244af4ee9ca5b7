//! Stationary ordered Bratteli diagrams.
//!
//! A stationary diagram is stored as one level of data: the vertex set and
//! the ordered edges between two consecutive levels. Level 0 is an implicit
//! top vertex with exactly one edge to each level-1 vertex. Paths are
//! listed top-down, so the last edge of a path is the one nearest its range
//! and is the most significant one in the lexicographic order.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::matrix::IntMatrix;
use crate::substitution::{Alphabet, Letter, Substitution};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("diagram has no vertices")]
    Empty,
    #[error("edge refers to vertex {0}, which does not exist")]
    VertexOutOfRange(usize),
    #[error("vertex `{0}` has no incoming edges")]
    NoIncoming(String),
    #[error("vertex `{0}` has no outgoing edges")]
    NoOutgoing(String),
    #[error("order indices into `{0}` are not exactly 1..k")]
    BadOrder(String),
    #[error("triple ({0}) has a middle vertex without incoming edges")]
    MiddleWithoutEdges(String),
    #[error("lifted source ({0}) is not in the supplied triple set")]
    TripleNotInVertexSet(String),
    #[error("telescoping factor must be at least 1")]
    ZeroTelescope,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedEdge {
    pub source: usize,
    pub range: usize,
    /// 1-based position in the order of the edges into `range`.
    pub order_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationaryOrderedDiagram {
    labels: Vec<String>,
    /// Sorted by `(range, order_index)`.
    edges: Vec<OrderedEdge>,
    incoming: Vec<Vec<usize>>,
}

/// A path from the top vertex down to some level-`n` vertex. `first` is the
/// level-1 vertex reached by the (unique) top edge; `edges[j]` goes from
/// level `j + 1` to level `j + 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePath {
    pub first: usize,
    pub edges: Vec<usize>,
}

impl FinitePath {
    pub fn level(&self) -> usize {
        self.edges.len() + 1
    }

    pub fn range(&self, d: &StationaryOrderedDiagram) -> usize {
        self.edges.last().map_or(self.first, |&e| d.edge(e).range)
    }

    pub fn is_valid(&self, d: &StationaryOrderedDiagram) -> bool {
        let mut at = self.first;
        if at >= d.vertex_count() {
            return false;
        }
        for &e in &self.edges {
            if e >= d.edges.len() || d.edge(e).source != at {
                return false;
            }
            at = d.edge(e).range;
        }
        true
    }

    pub fn is_maximal(&self, d: &StationaryOrderedDiagram) -> bool {
        self.edges.iter().all(|&e| d.is_max_edge(e))
    }

    pub fn is_minimal(&self, d: &StationaryOrderedDiagram) -> bool {
        self.edges.iter().all(|&e| d.edge(e).order_index == 1)
    }
}

/// Exact properness verdict for a stationary diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProperOrder {
    /// Unique all-minimal and all-maximal infinite paths; they sit on the
    /// given vertices at every level.
    Proper {
        min_vertex: usize,
        max_vertex: usize,
    },
    NonProper,
    Unknown,
}

impl ProperOrder {
    pub fn is_proper(&self) -> bool {
        matches!(self, ProperOrder::Proper { .. })
    }
}

/// A half-open interval `[lower, upper)` of paths from level `n` to level
/// `n + depth` ranging at `range`, whose end paths share their source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathInterval {
    pub depth: usize,
    pub range: usize,
    /// Positions of the end paths in the lexicographic order.
    pub lower: usize,
    pub upper: usize,
    pub lower_path: Vec<usize>,
    pub upper_path: Vec<usize>,
    /// Multiset of member sources, indexed by vertex.
    pub source_counts: Vec<u32>,
}

impl PathInterval {
    pub fn is_empty(&self) -> bool {
        self.lower == self.upper
    }

    /// The member paths, in order.
    pub fn contents(&self, d: &StationaryOrderedDiagram) -> Vec<Vec<usize>> {
        d.paths_between(self.range, self.depth)[self.lower..self.upper].to_vec()
    }
}

impl StationaryOrderedDiagram {
    pub fn new(labels: Vec<String>, mut edges: Vec<OrderedEdge>) -> Result<Self, DiagramError> {
        let n = labels.len();
        if n == 0 {
            return Err(DiagramError::Empty);
        }
        if let Some(e) = edges.iter().find(|e| e.source >= n || e.range >= n) {
            return Err(DiagramError::VertexOutOfRange(e.source.max(e.range)));
        }
        edges.sort_by_key(|e| (e.range, e.order_index));
        let mut incoming = vec![Vec::new(); n];
        let mut has_out = vec![false; n];
        for (i, e) in edges.iter().enumerate() {
            incoming[e.range].push(i);
            has_out[e.source] = true;
        }
        for v in 0..n {
            if incoming[v].is_empty() {
                return Err(DiagramError::NoIncoming(labels[v].clone()));
            }
            if !has_out[v] {
                return Err(DiagramError::NoOutgoing(labels[v].clone()));
            }
            if incoming[v].iter().enumerate().any(|(k, &e)| edges[e].order_index != k + 1) {
                return Err(DiagramError::BadOrder(labels[v].clone()));
            }
        }
        Ok(Self { labels, edges, incoming })
    }

    /// Edges `(a, k, b)` for each letter `a` at position `k` of `σ(b)`.
    pub fn from_substitution(s: &Substitution) -> Self {
        let labels = s.alphabet().symbols().to_vec();
        let edges = s
            .alphabet()
            .letters()
            .flat_map(|b| {
                s.image(b).iter().enumerate().map(move |(k, a)| OrderedEdge {
                    source: a.0,
                    range: b.0,
                    order_index: k + 1,
                })
            })
            .collect();
        Self::new(labels, edges).expect("primitive substitutions give valid diagrams")
    }

    /// Reads the substitution off the diagram: the image of `v` lists the
    /// sources of the edges into `v` in order.
    pub fn to_substitution(&self) -> Substitution {
        let alphabet = Alphabet::new(self.labels.clone()).expect("labels are distinct");
        let rules = (0..self.vertex_count())
            .map(|v| self.incoming[v].iter().map(|&e| Letter(self.edges[e].source)).collect())
            .collect();
        Substitution::new(alphabet, rules).expect("every vertex has incoming edges")
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn edges(&self) -> &[OrderedEdge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &OrderedEdge {
        &self.edges[i]
    }

    /// Edge ids into `v`, in order.
    pub fn incoming(&self, v: usize) -> &[usize] {
        &self.incoming[v]
    }

    pub fn max_edge(&self, v: usize) -> usize {
        *self.incoming[v].last().expect("non-empty fan-in")
    }

    pub fn min_edge(&self, v: usize) -> usize {
        self.incoming[v][0]
    }

    pub fn is_max_edge(&self, e: usize) -> bool {
        self.max_edge(self.edges[e].range) == e
    }

    /// The successor of `e` in the order on the edges into its range.
    pub fn successor(&self, e: usize) -> Option<usize> {
        let edge = self.edges[e];
        self.incoming[edge.range].get(edge.order_index).copied()
    }

    /// Level-to-level map `Z^V -> Z^V`: row `v` counts the sources of the
    /// edges into `v`.
    pub fn level_map(&self) -> IntMatrix {
        let n = self.vertex_count();
        let mut m = vec![vec![0i64; n]; n];
        for e in &self.edges {
            m[e.range][e.source] += 1;
        }
        IntMatrix::from_rows(&m)
    }

    /// Paths of `depth` edges ending at `v`, in increasing lexicographic
    /// order, each listed from its lowest-level edge to the edge into `v`.
    pub fn paths_between(&self, v: usize, depth: usize) -> Vec<Vec<usize>> {
        if depth == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for &e in &self.incoming[v] {
            for mut p in self.paths_between(self.edges[e].source, depth - 1) {
                p.push(e);
                out.push(p);
            }
        }
        out
    }

    /// Sources of the paths of `paths_between(v, depth)`, in the same order.
    pub fn source_sequence(&self, v: usize, depth: usize) -> Vec<usize> {
        let mut seq = vec![v];
        for _ in 0..depth {
            seq = seq.iter().flat_map(|&u| self.incoming[u].iter().map(|&e| self.edges[e].source)).collect();
        }
        seq
    }

    /// Diagram whose edges are the paths of length `k`.
    pub fn telescope(&self, k: usize) -> Result<Self, DiagramError> {
        if k == 0 {
            return Err(DiagramError::ZeroTelescope);
        }
        let mut edges = Vec::new();
        for v in 0..self.vertex_count() {
            for (i, p) in self.paths_between(v, k).iter().enumerate() {
                let source = self.edges[p[0]].source;
                edges.push(OrderedEdge { source, range: v, order_index: i + 1 });
            }
        }
        Self::new(self.labels.clone(), edges)
    }

    /// The tripling on the vertex set `blocks3`. The `i`-th edge into
    /// `(u, v, w)` lifts the `i`-th edge `e_i` into `v` and has source
    /// `(s(e_{i-1}), s(e_i), s(e_{i+1}))`, where `s(e_0)` is the source of
    /// the last edge into `u` and `s(e_{k+1})` that of the first edge into `w`.
    pub fn triple(&self, blocks3: &[[usize; 3]]) -> Result<Self, DiagramError> {
        let index: HashMap<[usize; 3], usize> = blocks3.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let labels: Vec<String> = blocks3.iter().map(|t| self.triple_label(t)).collect();
        let mut edges = Vec::new();
        for (ti, &[u, v, w]) in blocks3.iter().enumerate() {
            if [u, v, w].iter().any(|&x| x >= self.vertex_count()) {
                return Err(DiagramError::VertexOutOfRange(u.max(v).max(w)));
            }
            if self.incoming[v].is_empty() {
                return Err(DiagramError::MiddleWithoutEdges(labels[ti].clone()));
            }
            let mut sources = vec![self.edges[self.max_edge(u)].source];
            sources.extend(self.incoming[v].iter().map(|&e| self.edges[e].source));
            sources.push(self.edges[self.min_edge(w)].source);
            for (i, win) in sources.windows(3).enumerate() {
                let key = [win[0], win[1], win[2]];
                let source =
                    *index.get(&key).ok_or_else(|| DiagramError::TripleNotInVertexSet(self.triple_label(&key)))?;
                edges.push(OrderedEdge { source, range: ti, order_index: i + 1 });
            }
        }
        Self::new(labels, edges)
    }

    fn triple_label(&self, t: &[usize; 3]) -> String {
        format!("{}.{}.{}", self.labels[t[0]], self.labels[t[1]], self.labels[t[2]])
    }

    /// Number of paths from the top vertex to `v` at level `n` (tower height).
    pub fn path_count_from_top(&self, v: usize, n: usize) -> u128 {
        assert!(n >= 1);
        let mut heights = vec![1u128; self.vertex_count()];
        for _ in 1..n {
            heights = (0..self.vertex_count())
                .map(|u| self.incoming[u].iter().map(|&e| heights[self.edges[e].source]).sum())
                .collect();
        }
        heights[v]
    }

    /// All paths from the top vertex to `v` at level `n`, lexicographically.
    pub fn paths_from_top(&self, v: usize, n: usize) -> Vec<FinitePath> {
        assert!(n >= 1);
        self.paths_between(v, n - 1)
            .into_iter()
            .map(|edges| {
                let first = edges.first().map_or(v, |&e| self.edges[e].source);
                FinitePath { first, edges }
            })
            .collect()
    }

    fn extremal_path(&self, v: usize, n: usize, pick: impl Fn(usize) -> usize) -> FinitePath {
        let mut edges = Vec::with_capacity(n - 1);
        let mut at = v;
        for _ in 1..n {
            let e = pick(at);
            edges.push(e);
            at = self.edges[e].source;
        }
        edges.reverse();
        FinitePath { first: at, edges }
    }

    pub fn max_path_to(&self, v: usize, n: usize) -> FinitePath {
        self.extremal_path(v, n, |u| self.max_edge(u))
    }

    pub fn min_path_to(&self, v: usize, n: usize) -> FinitePath {
        self.extremal_path(v, n, |u| self.min_edge(u))
    }

    /// For each level-`n` vertex, its all-maximal and all-minimal path from
    /// the top vertex.
    pub fn max_min_paths(&self, n: usize) -> (Vec<FinitePath>, Vec<FinitePath>) {
        assert!(n >= 1);
        let v = 0..self.vertex_count();
        (v.clone().map(|u| self.max_path_to(u, n)).collect(), v.map(|u| self.min_path_to(u, n)).collect())
    }

    /// Unique fixed point of `f` reached from every vertex, if any.
    fn attracting_fixed_point(&self, f: impl Fn(usize) -> usize) -> Option<usize> {
        let n = self.vertex_count();
        let ends: Vec<usize> = (0..n).map(|v| (0..n).fold(v, |x, _| f(x))).collect();
        let c = ends[0];
        (f(c) == c && ends.iter().all(|&x| x == c)).then_some(c)
    }

    /// Exact properness test. Infinite all-maximal paths correspond to the
    /// periodic points of the map "vertex -> source of its maximal incoming
    /// edge" (likewise for minimal), so the diagram is proper iff both maps
    /// have a single periodic point, and the diagram is simple.
    pub fn proper_order(&self) -> ProperOrder {
        if !self.to_substitution().is_primitive() {
            return ProperOrder::NonProper;
        }
        let max_v = self.attracting_fixed_point(|v| self.edges[self.max_edge(v)].source);
        let min_v = self.attracting_fixed_point(|v| self.edges[self.min_edge(v)].source);
        match (min_v, max_v) {
            (Some(min_vertex), Some(max_vertex)) => ProperOrder::Proper { min_vertex, max_vertex },
            _ => ProperOrder::NonProper,
        }
    }

    /// Depth-bounded variant kept for interface parity; stationary input is
    /// always decided exactly, so `depth` only has to be at least 2.
    pub fn is_properly_ordered_bounded(&self, depth: usize) -> ProperOrder {
        assert!(depth >= 2, "depth must be at least 2");
        self.proper_order()
    }

    /// Calls `f` on every interval `[ϖ1, ϖ2)` of paths of `1..=n_levels`
    /// edges whose end paths share source and range, including empty ones.
    pub fn for_each_path_interval(&self, n_levels: usize, mut f: impl FnMut(&PathInterval)) {
        let nv = self.vertex_count();
        for depth in 1..=n_levels {
            for v in 0..nv {
                let paths = self.paths_between(v, depth);
                let sources: Vec<usize> = paths.iter().map(|p| self.edges[p[0]].source).collect();
                for lower in 0..paths.len() {
                    let mut counts = vec![0u32; nv];
                    for upper in lower..paths.len() {
                        if sources[upper] == sources[lower] {
                            f(&PathInterval {
                                depth,
                                range: v,
                                lower,
                                upper,
                                lower_path: paths[lower].clone(),
                                upper_path: paths[upper].clone(),
                                source_counts: counts.clone(),
                            });
                        }
                        counts[sources[upper]] += 1;
                    }
                }
            }
        }
    }

    pub fn enumerate_path_intervals(&self, n_levels: usize) -> Vec<PathInterval> {
        let mut out = Vec::new();
        self.for_each_path_interval(n_levels, |iv| out.push(iv.clone()));
        out
    }

    /// Graphviz rendering of levels `0..=levels`.
    pub fn to_dot(&self, levels: usize) -> String {
        let mut out = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n");
        out.push_str("  top [label=\"*\"];\n");
        for level in 1..=levels {
            let _ = write!(out, "  {{ rank=same;");
            for v in 0..self.vertex_count() {
                let _ = write!(out, " L{level}_{v};");
            }
            out.push_str(" }\n");
            for v in 0..self.vertex_count() {
                let _ = writeln!(out, "  L{level}_{v} [label=\"{}\"];", escape(&self.labels[v]));
            }
        }
        if levels >= 1 {
            for v in 0..self.vertex_count() {
                let _ = writeln!(out, "  top -> L1_{v} [label=\"1\"];");
            }
        }
        for level in 2..=levels {
            for e in &self.edges {
                let _ = writeln!(
                    out,
                    "  L{}_{} -> L{level}_{} [label=\"{}\"];",
                    level - 1,
                    e.source,
                    e.range,
                    e.order_index
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The 3-block substitution `σ^Q` on the alphabet of length-3 factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripledSubstitution {
    pub substitution: Substitution,
    /// `triples[i]` is the letter triple behind tripled letter `i`.
    pub triples: Vec<[Letter; 3]>,
}

impl TripledSubstitution {
    pub fn triple_indices(&self) -> Vec<[usize; 3]> {
        self.triples.iter().map(|t| [t[0].0, t[1].0, t[2].0]).collect()
    }

    /// Middle letter of each tripled letter.
    pub fn middle(&self, t: Letter) -> Letter {
        self.triples[t.0][1]
    }
}

/// `σ^Q(a,b,c) = (a_m,b_1,b_2)(b_1,b_2,b_3)...(b_{n-1},b_n,c_1)` with
/// `σ(b) = b_1...b_n`, `a_m` the last letter of `σ(a)` and `c_1` the first
/// letter of `σ(c)`. For `n = 1` the image is the single letter
/// `(a_m, b_1, c_1)`.
pub fn tripled_substitution(s: &Substitution) -> TripledSubstitution {
    let blocks = s.language_blocks(3);
    let triples: Vec<[Letter; 3]> = blocks.iter().map(|b| [b[0], b[1], b[2]]).collect();
    let index: HashMap<[Letter; 3], usize> = triples.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let alphabet = s.alphabet();
    let symbols: Vec<String> = triples
        .iter()
        .map(|t| format!("{}.{}.{}", alphabet.symbol(t[0]), alphabet.symbol(t[1]), alphabet.symbol(t[2])))
        .collect();
    let rules = triples
        .iter()
        .map(|&[a, b, c]| {
            let mut ext = vec![s.last_letter(a)];
            ext.extend_from_slice(s.image(b));
            ext.push(s.first_letter(c));
            ext.windows(3).map(|w| Letter(index[&[w[0], w[1], w[2]]])).collect()
        })
        .collect();
    let substitution = Substitution::new(Alphabet::new(symbols).expect("distinct triples"), rules)
        .expect("images of language blocks stay in the language");
    TripledSubstitution { substitution, triples }
}
