//! The finite data the avoidance argument rests on: the set of length-ℓ
//! walk vectors, the four eigencoordinate bound constants, the lattice of
//! equal-length-equal-sum differences, and the finite set 𝔘 of integer
//! vectors satisfying all four bounds.

use crate::ball::{decide_le, Ball, BallCmp, CBall};
use crate::graph::QGraph;
use crate::spectral::SpectralData;
use crate::word::{parikh, Morphism, Vec4};
use crate::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Vectors Σᵢ M^(ℓ−i) ψ(aᵢ) over all label sequences a₁…a_ℓ of walks in
/// the prefix graph, deduplicated and sorted.
#[derive(Clone, Debug)]
pub struct WalkVectorSet {
    pub ell: usize,
    pub vectors: Vec<Vec4>,
}

impl WalkVectorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &Vec4) -> bool {
        self.vectors.binary_search(v).is_ok()
    }
}

/// Enumerate all directed walks of length `ell` in the prefix graph from
/// every start vertex, accumulating M·acc + ψ(label) along each edge so a
/// finished walk carries Σ M^(ℓ−i) ψ(aᵢ).
pub fn enumerate_walk_vectors(ell: usize) -> WalkVectorSet {
    let morphism = Morphism::canonical();
    let m = morphism.incidence_matrix();
    let q = QGraph::from_morphism(&morphism);

    let mut out = std::collections::BTreeSet::new();
    let mut stack: Vec<(crate::word::Letter, usize, Vec4)> = crate::word::ALPHABET
        .iter()
        .map(|&l| (l, 0, Vec4::ZERO))
        .collect();
    while let Some((v, depth, acc)) = stack.pop() {
        if depth == ell {
            out.insert(acc);
            continue;
        }
        for e in q.out_edges(v) {
            let next = m.mul_vec(&acc) + parikh(&e.label);
            stack.push((e.to, depth + 1, next));
        }
    }
    WalkVectorSet {
        ell,
        vectors: out.into_iter().collect(),
    }
}

/// The third-coordinate bound and its ingredients.
#[derive(Clone, Debug)]
pub struct C3Parts {
    /// max over u,v in the walk-vector set of |τ₃(u) − τ₃(v)|.
    pub pair_max: Ball,
    /// The pair attaining the maximum (by midpoint).
    pub pair: (Vec4, Vec4),
    /// max over s,t in {ε, "0", "4"} of |τ₃(ψ(s) − ψ(t))|.
    pub per_step: Ball,
    /// Geometric remainder of the ancestor series beyond nine levels.
    pub tail: Ball,
    /// C₃ = 2·(pair_max + tail).
    pub c3: Ball,
}

#[derive(Copy, Clone)]
struct MaxScan {
    lo: f64,
    hi: f64,
    best_mid: f64,
    best: (usize, usize),
}

impl MaxScan {
    const EMPTY: MaxScan = MaxScan {
        lo: f64::NEG_INFINITY,
        hi: f64::NEG_INFINITY,
        best_mid: f64::NEG_INFINITY,
        best: (usize::MAX, usize::MAX),
    };

    fn absorb(&mut self, value: &Ball, idx: (usize, usize)) {
        self.lo = self.lo.max(value.lo());
        self.hi = self.hi.max(value.hi());
        let mid = value.mid();
        if mid > self.best_mid || (mid == self.best_mid && idx < self.best) {
            self.best_mid = mid;
            self.best = idx;
        }
    }

    fn merge(a: MaxScan, b: MaxScan) -> MaxScan {
        let mut out = a;
        out.lo = a.lo.max(b.lo);
        out.hi = a.hi.max(b.hi);
        if b.best_mid > a.best_mid || (b.best_mid == a.best_mid && b.best < a.best) {
            out.best_mid = b.best_mid;
            out.best = b.best;
        }
        out
    }

    fn ball(&self) -> Ball {
        Ball::from_interval(self.lo, self.hi)
    }
}

fn pair_scan_row(t3: &[CBall], i: usize) -> MaxScan {
    let mut scan = MaxScan::EMPTY;
    for j in (i + 1)..t3.len() {
        let d = (t3[i] - t3[j]).magnitude();
        scan.absorb(&d, (i, j));
    }
    scan
}

/// The per-step label differences: ψ(s) − ψ(t) for s, t proper prefixes
/// of letter images (ε, "0", "4"), omitting the zero s = t cases.
fn step_differences() -> Vec<Vec4> {
    let prefixes = [Vec4::ZERO, Vec4::new(1, 0, 0, 0), Vec4::new(0, 0, 0, 1)];
    let mut out = Vec::new();
    for s in &prefixes {
        for t in &prefixes {
            if s != t {
                out.push(*s - *t);
            }
        }
    }
    out
}

/// Verified maximum of |τⱼ(d)| over the step differences: the claimed
/// maximizer must dominate every other candidate decisively (mirror
/// differences evaluate to the identical ball and are accepted as ties).
fn verified_step_max(sd: &SpectralData, j: usize, claimed: &Vec4) -> Result<Ball, Error> {
    let top = sd.tau_abs(j, claimed);
    for d in step_differences() {
        let v = sd.tau_abs(j, &d);
        if v == top {
            continue;
        }
        if v.compare(&top) != BallCmp::Less {
            return Err(Error::Undecided {
                context: format!("step maximum for tau_{j} at {d}"),
            });
        }
    }
    Ok(top)
}

fn c3_from_scan(sd: &SpectralData, d9: &WalkVectorSet, scan: MaxScan) -> Result<C3Parts, Error> {
    let pair_max = scan.ball();
    let pair = (d9.vectors[scan.best.0], d9.vectors[scan.best.1]);

    let per_step = verified_step_max(sd, 3, &Vec4::new(1, 0, 0, 0))?;
    let lam3 = sd.lambda[2].magnitude();
    let mut pow = Ball::ONE;
    for _ in 0..9 {
        pow = pow * lam3;
    }
    let tail = (per_step * pow).div(&(Ball::ONE - lam3))?;
    let c3 = Ball::exact(2.0) * (pair_max + tail);
    Ok(C3Parts {
        pair_max,
        pair,
        per_step,
        tail,
        c3,
    })
}

/// C₃: twice the sum of the finite nine-level pair maximum and the
/// geometric tail of deeper ancestor levels.
pub fn c3_parts(sd: &SpectralData, d9: &WalkVectorSet) -> Result<C3Parts, Error> {
    let t3: Vec<CBall> = d9.vectors.iter().map(|v| sd.tau(3, v)).collect();
    let mut scan = MaxScan::EMPTY;
    for i in 0..t3.len() {
        scan = MaxScan::merge(scan, pair_scan_row(&t3, i));
    }
    c3_from_scan(sd, d9, scan)
}

/// Parallel pair scan; produces the identical ball and maximizer.
#[cfg(feature = "parallel")]
pub fn c3_parts_parallel(sd: &SpectralData, d9: &WalkVectorSet) -> Result<C3Parts, Error> {
    let t3: Vec<CBall> = d9.vectors.iter().map(|v| sd.tau(3, v)).collect();
    let scan = (0..t3.len())
        .into_par_iter()
        .map(|i| pair_scan_row(&t3, i))
        .reduce(|| MaxScan::EMPTY, MaxScan::merge);
    c3_from_scan(sd, d9, scan)
}

/// The rank-2 integer lattice of vectors orthogonal to (1,1,1,1) and
/// (0,1,3,4): exactly the Parikh differences of equal-length, equal-sum
/// blocks.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub basis: [Vec4; 2],
    constraints: [Vec4; 2],
}

impl Default for Lattice {
    fn default() -> Self {
        Lattice::canonical()
    }
}

impl Lattice {
    pub fn canonical() -> Lattice {
        Lattice {
            basis: [Vec4::new(1, -2, 2, -1), Vec4::new(1, -1, -1, 1)],
            constraints: [Vec4::new(1, 1, 1, 1), Vec4::new(0, 1, 3, 4)],
        }
    }

    /// Exact integer membership test against the defining equations.
    pub fn contains(&self, v: &Vec4) -> bool {
        self.constraints.iter().all(|c| c.dot(v) == 0)
    }

    pub fn member(&self, m: i64, n: i64) -> Vec4 {
        self.basis[0] * m + self.basis[1] * n
    }
}

/// One row of the short-vector table: the lattice member for (m, n) with
/// its three distinct functional magnitudes.
#[derive(Clone, Debug)]
pub struct LatticeTableRow {
    pub v: Vec4,
    pub m: i64,
    pub n: i64,
    pub t1: Ball,
    pub t2: Ball,
    pub t3: Ball,
}

const TABLE_ORDER: [(i64, i64); 9] = [
    (0, 0),
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (-1, -1),
    (-1, 1),
    (1, -1),
];

/// All nine lattice members with coordinates in {−1, 0, 1}.
pub fn short_lattice_table(sd: &SpectralData) -> Vec<LatticeTableRow> {
    let lat = Lattice::canonical();
    TABLE_ORDER
        .iter()
        .map(|&(m, n)| {
            let v = lat.member(m, n);
            LatticeTableRow {
                v,
                m,
                n,
                t1: sd.tau_abs(1, &v),
                t2: sd.tau_abs(2, &v),
                t3: sd.tau_abs(3, &v),
            }
        })
        .collect()
}

/// The constants α, β with |τ₃(m b₁ + n b₂)| ≥ α|m| and ≥ β|n|: each is
/// the magnitude of τ₃ at one basis vector times the size of the
/// imaginary part of the basis ratio (exchanging the basis roles for β).
pub fn alpha_beta(sd: &SpectralData) -> Result<(Ball, Ball), Error> {
    let lat = Lattice::canonical();
    let tb1 = sd.tau(3, &lat.basis[0]);
    let tb2 = sd.tau(3, &lat.basis[1]);
    let alpha = tb2.magnitude() * tb1.div(&tb2)?.im.abs();
    let beta = tb1.magnitude() * tb2.div(&tb1)?.im.abs();
    Ok((alpha, beta))
}

/// The lattice members that can be the block-difference of an additive
/// cube: coordinates are confined to {−1, 0, 1} by C₃/α and C₃/β, then
/// filtered by the decisive |τ₃| ≤ C₃ test.
pub fn initial_difference_candidates(sd: &SpectralData, c3: &Ball) -> Result<Vec<Vec4>, Error> {
    let (alpha, beta) = alpha_beta(sd)?;
    // Coordinate ranges must certify |m|, |n| ≤ 1.
    for (name, denom) in [("alpha", alpha), ("beta", beta)] {
        let range = c3.div(&denom)?;
        if range.compare(&Ball::exact(2.0)) != BallCmp::Less {
            return Err(Error::Undecided {
                context: format!("coordinate range bound via {name}"),
            });
        }
    }
    let mut out = Vec::new();
    for row in short_lattice_table(sd) {
        if decide_le(&row.t3, c3, || format!("candidate filter at {}", row.v))? {
            out.push(row.v);
        }
    }
    Ok(out)
}

/// The first- and second-coordinate bound constants with their verified
/// per-step maxima.
#[derive(Clone, Debug)]
pub struct C1C2 {
    pub c1: Ball,
    pub c2: Ball,
    /// max |τ₁(ψ(s) − ψ(t))| over step labels: attained at ψ("4").
    pub step1: Ball,
    /// max |τ₂(ψ(s) − ψ(t))| over step labels: attained at ψ("0") − ψ("4").
    pub step2: Ball,
}

/// C₁ = 2·step₁/(|λ₁| − 1) and C₂ = 2·step₂/(|λ₂| − 1), after checking
/// the induction base: every initial candidate satisfies both bounds.
pub fn c1_c2_bounds(sd: &SpectralData, candidates: &[Vec4]) -> Result<C1C2, Error> {
    let step1 = verified_step_max(sd, 1, &Vec4::new(0, 0, 0, 1))?;
    let step2 = verified_step_max(sd, 2, &Vec4::new(1, 0, 0, -1))?;

    let l1 = sd.lambda[0].re; // real, > 1
    let l2_abs = -sd.lambda[1].re; // real, < −1
    let c1 = (Ball::exact(2.0) * step1).div(&(l1 - Ball::ONE))?;
    let c2 = (Ball::exact(2.0) * step2).div(&(l2_abs - Ball::ONE))?;

    for v in candidates {
        for (j, c) in [(1usize, &c1), (2usize, &c2)] {
            if !decide_le(&sd.tau_abs(j, v), c, || {
                format!("induction base for tau_{j} at {v}")
            })? {
                return Err(Error::Undecided {
                    context: format!("induction base fails at {v}"),
                });
            }
        }
    }
    Ok(C1C2 {
        c1,
        c2,
        step1,
        step2,
    })
}

/// The finite set of integer vectors within all four bound constants,
/// together with the constants and the norm budget that made the
/// enumeration finite.
#[derive(Clone, Debug)]
pub struct USet {
    /// Certified constants (C₄ = C₃).
    pub c: [Ball; 4],
    /// Working bounds used for membership: the certified constants
    /// rounded up to two decimals. The relaxation is sound (a larger set
    /// can only weaken the later reachability filter) and reproduces the
    /// canonical 503-vector set.
    pub enumeration_c: [f64; 4],
    /// (C₁² + C₂² + C₃² + C₄²)/μ_min.
    pub budget: Ball,
    /// Decisive integer floor of the budget: members satisfy |x|² ≤ this.
    pub budget_floor: i64,
    /// Members in lexicographic order.
    pub members: Vec<Vec4>,
}

impl USet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index_of(&self, v: &Vec4) -> Option<usize> {
        self.members.binary_search(v).ok()
    }

    pub fn contains(&self, v: &Vec4) -> bool {
        self.index_of(v).is_some()
    }

    /// Canonical serialization: one `n0,n1,n3,n4` line per member, in
    /// lexicographic order. Downstream certificates hash these bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for v in &self.members {
            out.extend_from_slice(
                format!("{},{},{},{}\n", v.0[0], v.0[1], v.0[2], v.0[3]).as_bytes(),
            );
        }
        out
    }

    pub fn hash_hex(&self) -> String {
        crate::certificate::sha256_hex(&self.canonical_bytes())
    }
}

/// Bound selection for the set enumeration.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MembershipBounds {
    /// Certified constants rounded up to two decimals; every comparison
    /// is decisive and the canonical 503-vector set is reproduced.
    Rounded,
    /// Raw certified balls. Exact boundary vectors (the C₁ bound is
    /// attained by ±(0,2,2,0) exactly) make this variant fail with an
    /// undecided-membership report; kept for demonstrating that failure
    /// mode.
    Strict,
}

fn membership_bounds(c: &[Ball; 4], mode: MembershipBounds) -> Result<[Ball; 4], Error> {
    match mode {
        MembershipBounds::Strict => Ok(*c),
        MembershipBounds::Rounded => {
            let mut out = [Ball::ZERO; 4];
            for i in 0..4 {
                let relaxed = (c[i].hi() * 100.0).ceil() / 100.0;
                let b = Ball::exact(relaxed);
                if c[i].compare(&b) != BallCmp::Less {
                    return Err(Error::BoundNotRelaxed { relaxed });
                }
                out[i] = b;
            }
            Ok(out)
        }
    }
}

fn budget_floor(budget: &Ball) -> Result<i64, Error> {
    let f = budget.lo().floor();
    if budget.hi() >= f + 1.0 || budget.lo() < f {
        return Err(Error::Undecided {
            context: format!("integer floor of norm budget {budget}"),
        });
    }
    Ok(f as i64)
}

fn member_test(sd: &SpectralData, bounds: &[Ball; 4], x: &Vec4) -> Result<bool, Error> {
    for j in 0..4 {
        let value = sd.tau_abs(j + 1, x);
        match value.compare(&bounds[j]) {
            BallCmp::Less => {}
            BallCmp::Greater => return Ok(false),
            BallCmp::Undecided => return Err(Error::UndecidedMembership { vector: *x }),
        }
    }
    Ok(true)
}

fn u_set_common(
    sd: &SpectralData,
    c1c2: &C1C2,
    c3: &Ball,
    mode: MembershipBounds,
) -> Result<(USet, i64, [Ball; 4]), Error> {
    let c = [c1c2.c1, c1c2.c2, *c3, *c3];
    let bounds = membership_bounds(&c, mode)?;
    let mut sum_sq = Ball::ZERO;
    for cj in &c {
        sum_sq = sum_sq + *cj * *cj;
    }
    let budget = sum_sq.div(&sd.mu_min)?;
    let floor = budget_floor(&budget)?;
    let set = USet {
        c,
        enumeration_c: [bounds[0].mid(), bounds[1].mid(), bounds[2].mid(), bounds[3].mid()],
        budget,
        budget_floor: floor,
        members: Vec::new(),
    };
    Ok((set, floor, bounds))
}

/// Enumerate the set by scanning every integer vector of squared norm
/// within the budget and keeping those inside all four bounds.
pub fn enumerate_u(
    sd: &SpectralData,
    c1c2: &C1C2,
    c3: &Ball,
    mode: MembershipBounds,
) -> Result<USet, Error> {
    let (mut set, floor, bounds) = u_set_common(sd, c1c2, c3, mode)?;
    let lim = (0..).take_while(|k| k * k <= floor).last().unwrap_or(0);
    let mut members = Vec::new();
    for x0 in -lim..=lim {
        scan_tail(sd, &bounds, floor, x0, &mut members)?;
    }
    set.members = members;
    Ok(set)
}

fn scan_tail(
    sd: &SpectralData,
    bounds: &[Ball; 4],
    floor: i64,
    x0: i64,
    out: &mut Vec<Vec4>,
) -> Result<(), Error> {
    let lim = (0..).take_while(|k| k * k <= floor).last().unwrap_or(0);
    for x1 in -lim..=lim {
        if x0 * x0 + x1 * x1 > floor {
            continue;
        }
        for x2 in -lim..=lim {
            let partial = x0 * x0 + x1 * x1 + x2 * x2;
            if partial > floor {
                continue;
            }
            for x3 in -lim..=lim {
                if partial + x3 * x3 > floor {
                    continue;
                }
                let x = Vec4::new(x0, x1, x2, x3);
                if member_test(sd, bounds, &x)? {
                    out.push(x);
                }
            }
        }
    }
    Ok(())
}

/// Parallel enumeration over the first coordinate; identical output.
#[cfg(feature = "parallel")]
pub fn enumerate_u_parallel(
    sd: &SpectralData,
    c1c2: &C1C2,
    c3: &Ball,
    mode: MembershipBounds,
) -> Result<USet, Error> {
    let (mut set, floor, bounds) = u_set_common(sd, c1c2, c3, mode)?;
    let lim = (0..).take_while(|k| k * k <= floor).last().unwrap_or(0);
    let chunks: Vec<Vec<Vec4>> = (-lim..=lim)
        .into_par_iter()
        .map(|x0| {
            let mut part = Vec::new();
            scan_tail(sd, &bounds, floor, x0, &mut part).map(|()| part)
        })
        .collect::<Result<_, _>>()?;
    set.members = chunks.into_iter().flatten().collect();
    Ok(set)
}

/// Everything the reachability stage consumes, computed in dependency
/// order with decisive comparisons throughout.
pub struct BoundData {
    pub spectral: SpectralData,
    pub d9: WalkVectorSet,
    pub c3: C3Parts,
    pub alpha: Ball,
    pub beta: Ball,
    pub table: Vec<LatticeTableRow>,
    pub candidates: Vec<Vec4>,
    pub c1c2: C1C2,
    pub uset: USet,
}

impl BoundData {
    pub fn compute() -> Result<BoundData, Error> {
        Self::compute_inner(false)
    }

    /// Same pipeline with the scan-heavy stages on the thread pool.
    #[cfg(feature = "parallel")]
    pub fn compute_parallel() -> Result<BoundData, Error> {
        Self::compute_inner(true)
    }

    fn compute_inner(parallel: bool) -> Result<BoundData, Error> {
        let spectral = SpectralData::compute()?;
        let d9 = enumerate_walk_vectors(9);
        let c3 = if parallel {
            #[cfg(feature = "parallel")]
            {
                c3_parts_parallel(&spectral, &d9)?
            }
            #[cfg(not(feature = "parallel"))]
            {
                unreachable!("parallel pipeline requires the parallel feature")
            }
        } else {
            c3_parts(&spectral, &d9)?
        };
        let (alpha, beta) = alpha_beta(&spectral)?;
        let table = short_lattice_table(&spectral);
        let candidates = initial_difference_candidates(&spectral, &c3.c3)?;
        let c1c2 = c1_c2_bounds(&spectral, &candidates)?;
        let uset = if parallel {
            #[cfg(feature = "parallel")]
            {
                enumerate_u_parallel(&spectral, &c1c2, &c3.c3, MembershipBounds::Rounded)?
            }
            #[cfg(not(feature = "parallel"))]
            {
                unreachable!("parallel pipeline requires the parallel feature")
            }
        } else {
            enumerate_u(&spectral, &c1c2, &c3.c3, MembershipBounds::Rounded)?
        };
        Ok(BoundData {
            spectral,
            d9,
            c3,
            alpha,
            beta,
            table,
            candidates,
            c1c2,
            uset,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sd() -> SpectralData {
        SpectralData::compute().unwrap()
    }

    #[test]
    fn walk_vectors_trivial_and_nine() {
        let d0 = enumerate_walk_vectors(0);
        assert_eq!(d0.vectors, vec![Vec4::ZERO]);

        let d9 = enumerate_walk_vectors(9);
        assert_eq!(d9.len(), 301);
        assert!(d9.contains(&Vec4::new(24, 30, 24, 12)));
        assert!(d9.contains(&Vec4::new(17, 25, 13, 5)));
    }

    #[test]
    fn walk_vectors_match_per_vertex_dynamic_program() {
        // Independent route: level sets of partial sums per end vertex.
        let morphism = Morphism::canonical();
        let m = morphism.incidence_matrix();
        let q = QGraph::from_morphism(&morphism);
        let mut per_vertex: [std::collections::BTreeSet<Vec4>; 4] = Default::default();
        for s in per_vertex.iter_mut() {
            s.insert(Vec4::ZERO);
        }
        for _ in 0..9 {
            let mut next: [std::collections::BTreeSet<Vec4>; 4] = Default::default();
            for e in q.edges() {
                for acc in &per_vertex[e.from.index()] {
                    next[e.to.index()].insert(m.mul_vec(acc) + parikh(&e.label));
                }
            }
            per_vertex = next;
        }
        let mut dp: std::collections::BTreeSet<Vec4> = Default::default();
        for s in &per_vertex {
            dp.extend(s.iter().copied());
        }
        let listed = enumerate_walk_vectors(9);
        assert_eq!(dp.into_iter().collect::<Vec<_>>(), listed.vectors);
    }

    #[test]
    fn walk_vectors_are_prefix_counts() {
        // Every member has nonnegative components and total within the
        // longest ninth image of a letter.
        let phi = Morphism::canonical();
        let max_len = (0..4)
            .map(|i| {
                let mut w = crate::word::Word::from_letters(vec![crate::word::ALPHABET[i]]);
                for _ in 0..9 {
                    w = phi.apply(&w);
                }
                w.len() as i64
            })
            .max()
            .unwrap();
        for v in &enumerate_walk_vectors(9).vectors {
            assert!(v.0.iter().all(|&c| c >= 0));
            assert!(v.0.iter().sum::<i64>() <= max_len);
        }
    }

    #[test]
    fn c3_parts_values() {
        let s = sd();
        let d9 = enumerate_walk_vectors(9);
        let p = c3_parts(&s, &d9).unwrap();
        assert!((p.pair_max.mid() - 1.05517).abs() < 1e-4);
        assert!((p.tail.mid() - 0.032736).abs() < 1e-5);
        assert!((p.c3.mid() - 2.1758).abs() < 2e-4);
        assert!((p.per_step.mid() - 0.81582).abs() < 1e-5);
        let attained: std::collections::BTreeSet<Vec4> = [p.pair.0, p.pair.1].into();
        let expected: std::collections::BTreeSet<Vec4> =
            [Vec4::new(24, 30, 24, 12), Vec4::new(17, 25, 13, 5)].into();
        assert_eq!(attained, expected);
        // Safety margin: C₃ < 2.176 decisively.
        assert_eq!(p.c3.compare(&Ball::exact(2.176)), BallCmp::Less);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn c3_parallel_agrees() {
        let s = sd();
        let d9 = enumerate_walk_vectors(9);
        let a = c3_parts(&s, &d9).unwrap();
        let b = c3_parts_parallel(&s, &d9).unwrap();
        assert_eq!(a.c3.mid(), b.c3.mid());
        assert_eq!(a.c3.rad(), b.c3.rad());
        assert_eq!(a.pair, b.pair);
    }

    #[test]
    fn lattice_membership() {
        let lat = Lattice::canonical();
        assert!(lat.contains(&Vec4::new(1, -2, 2, -1)));
        assert!(lat.contains(&Vec4::ZERO));
        assert!(!lat.contains(&Vec4::new(1, 0, 0, 0)));
        assert_eq!(lat.basis[0].dot(&lat.basis[1]), 0);
        for b in &lat.basis {
            assert!(lat.contains(b));
        }
    }

    #[test]
    fn alpha_beta_values() {
        let s = sd();
        let (alpha, beta) = alpha_beta(&s).unwrap();
        assert!((alpha.mid() - 1.4914).abs() < 1e-3);
        assert!((beta.mid() - 2.1657).abs() < 1e-3);

        let d9 = enumerate_walk_vectors(9);
        let c3 = c3_parts(&s, &d9).unwrap().c3;
        let range = c3.div(&alpha).unwrap();
        assert!((range.mid() - 1.4589).abs() < 1e-3);
        assert_eq!(range.compare(&Ball::exact(2.0)), BallCmp::Less);
    }

    #[test]
    fn table_and_candidates() {
        let s = sd();
        let table = short_lattice_table(&s);
        let expect: [(Vec4, f64, f64, f64); 9] = [
            (Vec4::ZERO, 0.0, 0.0, 0.0),
            (Vec4::new(1, -2, 2, -1), 0.63278, 1.51365, 1.5425),
            (Vec4::new(-1, 2, -2, 1), 0.63278, 1.51365, 1.5425),
            (Vec4::new(1, -1, -1, 1), 0.21770, 0.62031, 2.23992),
            (Vec4::new(-1, 1, 1, -1), 0.21770, 0.62031, 2.23992),
            (Vec4::new(2, -3, 1, 0), 0.41508, 2.13396, 2.37327),
            (Vec4::new(-2, 3, -1, 0), 0.41508, 2.13396, 2.37327),
            (Vec4::new(0, 1, -3, 2), 0.85048, 0.89334, 3.02667),
            (Vec4::new(0, -1, 3, -2), 0.85048, 0.89334, 3.02667),
        ];
        assert_eq!(table.len(), 9);
        for (row, (v, t1, t2, t3)) in table.iter().zip(expect) {
            assert_eq!(row.v, v);
            assert!((row.t1.mid() - t1).abs() < 1e-4, "{v} t1");
            assert!((row.t2.mid() - t2).abs() < 1e-4, "{v} t2");
            assert!((row.t3.mid() - t3).abs() < 1e-4, "{v} t3");
        }

        let d9 = enumerate_walk_vectors(9);
        let c3 = c3_parts(&s, &d9).unwrap().c3;
        let cands = initial_difference_candidates(&s, &c3).unwrap();
        assert_eq!(
            cands,
            vec![Vec4::ZERO, Vec4::new(1, -2, 2, -1), Vec4::new(-1, 2, -2, 1)]
        );
    }

    #[test]
    fn c1_c2_values() {
        let s = sd();
        let d9 = enumerate_walk_vectors(9);
        let c3 = c3_parts(&s, &d9).unwrap().c3;
        let cands = initial_difference_candidates(&s, &c3).unwrap();
        let cc = c1_c2_bounds(&s, &cands).unwrap();
        assert!((cc.c1.mid() - 1.9032).abs() < 1e-3);
        assert!((cc.c2.mid() - 2.9818).abs() < 1e-3);
        assert!((cc.step2.mid() - 0.75301).abs() < 1e-5);
        assert!((cc.step1.mid() - 0.65687).abs() < 1e-5);
    }

    fn full() -> BoundData {
        BoundData::compute().unwrap()
    }

    #[test]
    fn u_set_cardinality_and_budget() {
        let b = full();
        assert_eq!(b.uset.len(), 503);
        assert!((b.uset.budget.mid() - 39.455).abs() < 1e-2);
        assert_eq!(b.uset.budget_floor, 39);
        assert_eq!(b.uset.enumeration_c, [1.91, 2.99, 2.18, 2.18]);
        assert!(b.uset.contains(&Vec4::ZERO));
        // members are sorted and unique
        assert!(b.uset.members.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn u_set_negation_closure() {
        let b = full();
        for v in &b.uset.members {
            assert!(b.uset.contains(&-*v), "missing -{v}");
        }
    }

    #[test]
    fn u_set_meets_lattice_in_candidates() {
        let b = full();
        let lat = Lattice::canonical();
        let mut meet: Vec<Vec4> = Vec::new();
        for m in -1..=1 {
            for n in -1..=1 {
                let v = lat.member(m, n);
                if b.uset.contains(&v) {
                    meet.push(v);
                }
            }
        }
        meet.sort();
        let mut cands = b.candidates.clone();
        cands.sort();
        assert_eq!(meet, cands);
    }

    #[test]
    fn strict_bounds_hit_exact_boundary() {
        // ±(0,2,2,0) attains the C₁ bound exactly, so the strict variant
        // must refuse to decide rather than guess.
        let b = full();
        let err = enumerate_u(
            &b.spectral,
            &b.c1c2,
            &b.c3.c3,
            MembershipBounds::Strict,
        )
        .unwrap_err();
        match err {
            Error::UndecidedMembership { vector } => {
                assert_eq!(vector, Vec4::new(0, -2, -2, 0));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rounded_extras_fail_certified_bounds() {
        // The six members admitted by the two-decimal ceilings but not by
        // the certified constants, each decisively outside some bound.
        let b = full();
        let extras = [
            Vec4::new(-2, -2, -1, 3),
            Vec4::new(-2, 0, 2, 3),
            Vec4::new(0, -2, 3, -1),
            Vec4::new(0, 2, -3, 1),
            Vec4::new(2, 0, -2, -3),
            Vec4::new(2, 2, 1, -3),
        ];
        for v in extras {
            assert!(b.uset.contains(&v));
            let outside = (0..4).any(|j| {
                b.spectral.tau_abs(j + 1, &v).compare(&b.uset.c[j]) == BallCmp::Greater
            });
            assert!(outside, "{v} should fail a certified bound");
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn u_set_parallel_agrees() {
        let b = full();
        let par = enumerate_u_parallel(
            &b.spectral,
            &b.c1c2,
            &b.c3.c3,
            MembershipBounds::Rounded,
        )
        .unwrap();
        assert_eq!(par.members, b.uset.members);
        assert_eq!(par.hash_hex(), b.uset.hash_hex());
    }

    #[test]
    fn proposition_inequality_spot_check() {
        // |τ₃(m b₁ + n b₂)| ≥ α|m| and ≥ β|n| on a deterministic grid of
        // coordinates up to ±20.
        let s = sd();
        let (alpha, beta) = alpha_beta(&s).unwrap();
        let lat = Lattice::canonical();
        let mut checked = 0;
        for m in (-20..=20).step_by(4) {
            for n in (-20..=20).step_by(4) {
                let v = lat.member(m, n);
                let t = s.tau_abs(3, &v);
                let am = alpha * Ball::from_int(m.abs());
                let bn = beta * Ball::from_int(n.abs());
                assert_ne!(t.compare(&am), BallCmp::Less, "alpha bound at ({m},{n})");
                assert_ne!(t.compare(&bn), BallCmp::Less, "beta bound at ({m},{n})");
                checked += 1;
            }
        }
        assert!(checked >= 100);
    }
}
