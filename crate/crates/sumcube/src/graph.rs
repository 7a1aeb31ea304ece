//! The template graph and its exhaustive reachability search.
//!
//! A template vertex carries the four letters delimiting a triple block
//! together with the two Parikh difference vectors of its blocks. Edges
//! follow the prefix graph of the morphism in each coordinate and push
//! the difference vectors through the incidence matrix, so walks mirror
//! descending one level in the position tree. The search closes the nine
//! start templates under successors inside a finite universe and reports
//! every vertex whose difference vectors both lie in the
//! equal-length-equal-sum lattice; finding none proves the fixed point
//! has no additive cube.

use crate::bounds::{Lattice, USet};
use crate::certificate::sha256_hex;
use crate::word::{parikh, FixedPoint, IncidenceMatrix, Letter, Morphism, Vec4, Word, ALPHABET};
use crate::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
#[cfg(feature = "parallel")]
use std::sync::atomic::{AtomicU64, Ordering};

/// Labelled edge of the prefix graph: `label`·`to` is a prefix of the
/// image of `from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QEdge {
    pub from: Letter,
    pub to: Letter,
    pub label: Word,
}

/// The finite digraph on the alphabet whose edges are the proper prefixes
/// of letter images; walks here are in label-preserving bijection with
/// walks in the position tree.
#[derive(Clone, Debug)]
pub struct QGraph {
    edges: Vec<QEdge>,
    out: [Vec<usize>; 4],
}

impl QGraph {
    pub fn from_morphism(m: &Morphism) -> QGraph {
        let mut edges = Vec::new();
        let mut out: [Vec<usize>; 4] = Default::default();
        for &from in &ALPHABET {
            let image = m.image(from);
            for (i, &to) in image.letters().iter().enumerate() {
                out[from.index()].push(edges.len());
                edges.push(QEdge {
                    from,
                    to,
                    label: Word::from_letters(image.letters()[..i].to_vec()),
                });
            }
        }
        QGraph { edges, out }
    }

    pub fn edges(&self) -> &[QEdge] {
        &self.edges
    }

    pub fn out_edges(&self, from: Letter) -> impl Iterator<Item = &QEdge> + '_ {
        self.out[from.index()].iter().map(|&i| &self.edges[i])
    }
}

/// A vertex of the template graph.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct TemplateVertex {
    pub c: [Letter; 4],
    pub u: Vec4,
    pub v: Vec4,
}

impl std::fmt::Display for TemplateVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(({}{}{}{}), {}, {})",
            self.c[0], self.c[1], self.c[2], self.c[3], self.u, self.v
        )
    }
}

/// Which membership test successors must pass to stay in the search.
///
/// `PairInSet` (both difference vectors in the set) is the universe the
/// published reachable count comes from. `PairAndSumInSet` additionally
/// requires the end-to-end difference u+v in the set; it is a sound
/// strengthening that prunes the search further.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum UniverseFilter {
    PairInSet,
    PairAndSumInSet,
}

#[derive(Copy, Clone, Debug)]
pub struct BfsOptions {
    pub filter: UniverseFilter,
    /// Iterate each vertex's transitions in reverse; the reachable set
    /// and its hash must not change.
    pub reversed_successor_order: bool,
}

impl Default for BfsOptions {
    fn default() -> Self {
        BfsOptions {
            filter: UniverseFilter::PairInSet,
            reversed_successor_order: false,
        }
    }
}

#[derive(Clone, Debug)]
struct Transition {
    c_next: u8,
    du: Vec4,
    dv: Vec4,
}

/// The template graph over a fixed difference-vector set, with packed
/// transition tables for the search.
pub struct CubeGraph {
    q: QGraph,
    m: IncidenceMatrix,
    uset: USet,
    lattice: Lattice,
    /// Outgoing edge 4-tuples per packed letter 4-tuple.
    transitions: Vec<Vec<Transition>>,
}

const KEY_SPACE: usize = 1 << 26;

fn pack_letters(c: &[Letter; 4]) -> u8 {
    (c[0].index() | (c[1].index() << 2) | (c[2].index() << 4) | (c[3].index() << 6)) as u8
}

fn unpack_letters(p: u8) -> [Letter; 4] {
    let p = p as usize;
    [
        Letter::from_index(p & 3),
        Letter::from_index((p >> 2) & 3),
        Letter::from_index((p >> 4) & 3),
        Letter::from_index((p >> 6) & 3),
    ]
}

impl CubeGraph {
    pub fn new(uset: USet) -> CubeGraph {
        assert!(uset.len() <= 512, "set index must fit 9 bits");
        let morphism = Morphism::canonical();
        let m = morphism.incidence_matrix();
        let q = QGraph::from_morphism(&morphism);

        // ψ-labelled out-edges per letter.
        let per_letter: Vec<Vec<(Letter, Vec4)>> = ALPHABET
            .iter()
            .map(|&l| q.out_edges(l).map(|e| (e.to, parikh(&e.label))).collect())
            .collect();

        let mut transitions = Vec::with_capacity(256);
        for packed in 0..256u16 {
            let c = unpack_letters(packed as u8);
            let mut list = Vec::new();
            for &(d1, a1) in &per_letter[c[0].index()] {
                for &(d2, a2) in &per_letter[c[1].index()] {
                    for &(d3, a3) in &per_letter[c[2].index()] {
                        for &(d4, a4) in &per_letter[c[3].index()] {
                            list.push(Transition {
                                c_next: pack_letters(&[d1, d2, d3, d4]),
                                du: a3 - a2 - a2 + a1,
                                dv: a4 - a3 - a3 + a2,
                            });
                        }
                    }
                }
            }
            transitions.push(list);
        }

        CubeGraph {
            q,
            m,
            uset,
            lattice: Lattice::canonical(),
            transitions,
        }
    }

    pub fn q_graph(&self) -> &QGraph {
        &self.q
    }

    pub fn u_set(&self) -> &USet {
        &self.uset
    }

    /// u, v and u+v all in the difference-vector set.
    pub fn is_in_h(&self, t: &TemplateVertex) -> bool {
        self.uset.contains(&t.u) && self.uset.contains(&t.v) && self.uset.contains(&(t.u + t.v))
    }

    /// Both difference vectors in the equal-length-equal-sum lattice:
    /// the vertex describes an additive cube.
    pub fn is_target(&self, t: &TemplateVertex) -> bool {
        self.lattice.contains(&t.u) && self.lattice.contains(&t.v)
    }

    fn encode(&self, t: &TemplateVertex) -> Option<u32> {
        let u = self.uset.index_of(&t.u)?;
        let v = self.uset.index_of(&t.v)?;
        Some(pack_letters(&t.c) as u32 | ((u as u32) << 8) | ((v as u32) << 17))
    }

    fn decode(&self, key: u32) -> TemplateVertex {
        TemplateVertex {
            c: unpack_letters((key & 0xff) as u8),
            u: self.uset.members[((key >> 8) & 0x1ff) as usize],
            v: self.uset.members[((key >> 17) & 0x1ff) as usize],
        }
    }

    fn passes(&self, filter: UniverseFilter, u: &Vec4, v: &Vec4) -> bool {
        match filter {
            UniverseFilter::PairInSet => true,
            UniverseFilter::PairAndSumInSet => self.uset.contains(&(*u + *v)),
        }
    }

    /// The nine start templates: triples delimited inside a single letter
    /// image, i.e. position 4-tuples with a common parent, taken from the
    /// first seven positions where every letter image occurs.
    pub fn start_set(&self, fp: &mut FixedPoint) -> Result<Vec<TemplateVertex>, Error> {
        let mut tuples = Vec::new();
        for p1 in 0..7usize {
            for p2 in p1..7 {
                for p3 in p2..7 {
                    for p4 in p3..7 {
                        if p1 == p4 {
                            continue;
                        }
                        let par = fp.parent(p1);
                        if fp.parent(p2) == par && fp.parent(p3) == par && fp.parent(p4) == par {
                            tuples.push([p1, p2, p3, p4]);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        for t in tuples {
            let g = self.template_at(fp, t);
            if !self.is_in_h(&g) {
                return Err(Error::StartOutsideUniverse(g.to_string()));
            }
            out.push(g);
        }
        Ok(out)
    }

    /// The template of a position 4-tuple, from prefix Parikh vectors.
    pub fn template_at(&self, fp: &mut FixedPoint, p: [usize; 4]) -> TemplateVertex {
        let c = [
            fp.letter(p[0]),
            fp.letter(p[1]),
            fp.letter(p[2]),
            fp.letter(p[3]),
        ];
        let s: Vec<Vec4> = p.iter().map(|&q| fp.sigma(q)).collect();
        TemplateVertex {
            c,
            u: s[2] - s[1] - s[1] + s[0],
            v: s[3] - s[2] - s[2] + s[1],
        }
    }

    /// All successors of a template that stay inside H (both vectors and
    /// their sum in the set). At most 16 candidates exist.
    pub fn successors(&self, t: &TemplateVertex) -> Vec<TemplateVertex> {
        let mu = self.m.mul_vec(&t.u);
        let mv = self.m.mul_vec(&t.v);
        self.transitions[pack_letters(&t.c) as usize]
            .iter()
            .filter_map(|tr| {
                let u = mu + tr.du;
                let v = mv + tr.dv;
                let s = TemplateVertex {
                    c: unpack_letters(tr.c_next),
                    u,
                    v,
                };
                self.is_in_h(&s).then_some(s)
            })
            .collect()
    }

    fn seed_frontier(
        &self,
        starts: &[TemplateVertex],
        filter: UniverseFilter,
    ) -> Result<(Vec<u32>, Vec<u32>), Error> {
        let mut frontier = Vec::new();
        let mut hits = Vec::new();
        for s in starts {
            if !(self.uset.contains(&s.u)
                && self.uset.contains(&s.v)
                && self.passes(filter, &s.u, &s.v))
            {
                return Err(Error::StartOutsideUniverse(s.to_string()));
            }
            let key = self.encode(s).expect("members indexed");
            if !frontier.contains(&key) {
                frontier.push(key);
                if self.is_target(s) {
                    hits.push(key);
                }
            }
        }
        Ok((frontier, hits))
    }

    fn finish(
        &self,
        visited: Vec<u64>,
        start_count: usize,
        levels: Vec<usize>,
        mut hit_keys: Vec<u32>,
    ) -> BfsOutcome {
        let mut count = 0usize;
        let mut bytes = Vec::new();
        for (w, word) in visited.iter().enumerate() {
            let mut bits = *word;
            while bits != 0 {
                let b = bits.trailing_zeros();
                let key = (w as u32) * 64 + b;
                bytes.extend_from_slice(&key.to_le_bytes());
                count += 1;
                bits &= bits - 1;
            }
        }
        hit_keys.sort_unstable();
        let target_hits = hit_keys.iter().map(|&k| self.decode(k)).collect();
        BfsOutcome {
            report: ReachabilityReport {
                start_count,
                reachable_count: count,
                target_hits,
                levels,
                set_hash: sha256_hex(&bytes),
                u_set_hash: self.uset.hash_hex(),
            },
            visited,
        }
    }

    /// Level-synchronous breadth-first closure of the start set.
    pub fn bfs(&self, starts: &[TemplateVertex], opts: BfsOptions) -> Result<BfsOutcome, Error> {
        let (frontier, mut hit_keys) = self.seed_frontier(starts, opts.filter)?;
        let mut visited = vec![0u64; KEY_SPACE / 64];
        for &k in &frontier {
            visited[(k / 64) as usize] |= 1u64 << (k % 64);
        }
        let mut levels = vec![frontier.len()];
        let mut frontier = frontier;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &key in &frontier {
                let c = (key & 0xff) as usize;
                let u = self.uset.members[((key >> 8) & 0x1ff) as usize];
                let v = self.uset.members[((key >> 17) & 0x1ff) as usize];
                let mu = self.m.mul_vec(&u);
                let mv = self.m.mul_vec(&v);
                let trans = &self.transitions[c];
                let mut visit = |tr: &Transition| {
                    let Some(ui) = self.uset.index_of(&(mu + tr.du)) else {
                        return;
                    };
                    let Some(vi) = self.uset.index_of(&(mv + tr.dv)) else {
                        return;
                    };
                    let (nu, nv) = (mu + tr.du, mv + tr.dv);
                    if !self.passes(opts.filter, &nu, &nv) {
                        return;
                    }
                    let nk = tr.c_next as u32 | ((ui as u32) << 8) | ((vi as u32) << 17);
                    let (w, b) = ((nk / 64) as usize, nk % 64);
                    if visited[w] & (1u64 << b) == 0 {
                        visited[w] |= 1u64 << b;
                        next.push(nk);
                        if self.lattice.contains(&nu) && self.lattice.contains(&nv) {
                            hit_keys.push(nk);
                        }
                    }
                };
                if opts.reversed_successor_order {
                    trans.iter().rev().for_each(&mut visit);
                } else {
                    trans.iter().for_each(&mut visit);
                }
            }
            if !next.is_empty() {
                levels.push(next.len());
            }
            frontier = next;
        }
        Ok(self.finish(visited, starts.len(), levels, hit_keys))
    }

    /// Parallel variant: the frontier expands on the thread pool and the
    /// visited set is claimed with atomic bit sets, so the reachable set,
    /// per-level counts and canonical hash match the sequential run.
    #[cfg(feature = "parallel")]
    pub fn bfs_parallel(
        &self,
        starts: &[TemplateVertex],
        filter: UniverseFilter,
    ) -> Result<BfsOutcome, Error> {
        let (frontier, hit_keys) = self.seed_frontier(starts, filter)?;
        let visited: Vec<AtomicU64> = (0..KEY_SPACE / 64).map(|_| AtomicU64::new(0)).collect();
        for &k in &frontier {
            visited[(k / 64) as usize].fetch_or(1u64 << (k % 64), Ordering::Relaxed);
        }
        let mut levels = vec![frontier.len()];
        let mut frontier = frontier;
        let mut hits: Vec<u32> = hit_keys;
        let visited_ref = &visited;
        while !frontier.is_empty() {
            let produced: Vec<(u32, bool)> = frontier
                .par_iter()
                .flat_map_iter(|&key| {
                    let c = (key & 0xff) as usize;
                    let u = self.uset.members[((key >> 8) & 0x1ff) as usize];
                    let v = self.uset.members[((key >> 17) & 0x1ff) as usize];
                    let mu = self.m.mul_vec(&u);
                    let mv = self.m.mul_vec(&v);
                    self.transitions[c].iter().filter_map(move |tr| {
                        let nu = mu + tr.du;
                        let nv = mv + tr.dv;
                        let ui = self.uset.index_of(&nu)?;
                        let vi = self.uset.index_of(&nv)?;
                        if !self.passes(filter, &nu, &nv) {
                            return None;
                        }
                        let nk = tr.c_next as u32 | ((ui as u32) << 8) | ((vi as u32) << 17);
                        let (w, b) = ((nk / 64) as usize, nk % 64);
                        let prev = visited_ref[w].fetch_or(1u64 << b, Ordering::Relaxed);
                        if prev & (1u64 << b) == 0 {
                            let hit =
                                self.lattice.contains(&nu) && self.lattice.contains(&nv);
                            Some((nk, hit))
                        } else {
                            None
                        }
                    })
                })
                .collect();
            let mut next = Vec::with_capacity(produced.len());
            for (k, hit) in produced {
                next.push(k);
                if hit {
                    hits.push(k);
                }
            }
            if !next.is_empty() {
                levels.push(next.len());
            }
            frontier = next;
        }
        let visited: Vec<u64> = visited.into_iter().map(AtomicU64::into_inner).collect();
        Ok(self.finish(visited, starts.len(), levels, hits))
    }

    /// Scan every equal-length triple block of the length-n prefix:
    /// confirms that templates inside H were reached by the search and
    /// that no triple has equal block sums. Returns true when no additive
    /// cube exists in the prefix.
    pub fn cross_check_prefix(
        &self,
        fp: &mut FixedPoint,
        outcome: &BfsOutcome,
        n: usize,
    ) -> Result<bool, Error> {
        fp.prefix(n + 1);
        for block_len in 1..=(n / 3) {
            for start in 0..=(n - 3 * block_len) {
                let p = [
                    start,
                    start + block_len,
                    start + 2 * block_len,
                    start + 3 * block_len,
                ];
                let t = self.template_at(fp, p);
                if self.is_in_h(&t) && !outcome.contains(self, &t) {
                    return Err(Error::UnreachableTemplate(format!(
                        "{t} from positions {p:?}"
                    )));
                }
                if self.is_target(&t) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Summary of one reachability run.
#[derive(Clone, Debug)]
pub struct ReachabilityReport {
    pub start_count: usize,
    pub reachable_count: usize,
    pub target_hits: Vec<TemplateVertex>,
    /// Newly visited vertices per level, starting with the start set.
    pub levels: Vec<usize>,
    /// SHA-256 of the canonically ordered reachable set.
    pub set_hash: String,
    /// SHA-256 of the difference-vector set the run was tied to.
    pub u_set_hash: String,
}

/// Report plus the visited bitmap for membership queries.
pub struct BfsOutcome {
    pub report: ReachabilityReport,
    visited: Vec<u64>,
}

impl BfsOutcome {
    pub fn contains(&self, graph: &CubeGraph, t: &TemplateVertex) -> bool {
        match graph.encode(t) {
            Some(key) => self.visited[(key / 64) as usize] & (1u64 << (key % 64)) != 0,
            None => false,
        }
    }

    /// Reachable templates in canonical (key) order.
    pub fn iter_reachable<'a>(
        &'a self,
        graph: &'a CubeGraph,
    ) -> impl Iterator<Item = TemplateVertex> + 'a {
        self.visited.iter().enumerate().flat_map(move |(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                Some(graph.decode((w as u32) * 64 + b))
            })
        })
    }
}
