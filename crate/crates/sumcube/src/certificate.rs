//! Reproducible records of pipeline runs: every number is serialized as a
//! decimal string with its explicit error radius, vector sets go out in a
//! canonical order, and set hashes chain the stages together. Identical
//! inputs produce byte-identical JSON apart from the wall time.

use std::io::{self, Write};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ball::{Ball, CBall};
use crate::bounds::BoundData;
use crate::graph::{ReachabilityReport, TemplateVertex, UniverseFilter};
use crate::word::Vec4;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// A ball as decimal strings: `mid` is the shortest round-trip decimal of
/// the midpoint, `rad` the radius in scientific notation.
#[derive(Clone, Debug, Serialize)]
pub struct BallRecord {
    pub mid: String,
    pub rad: String,
}

impl From<&Ball> for BallRecord {
    fn from(b: &Ball) -> BallRecord {
        BallRecord {
            mid: format!("{}", b.mid()),
            rad: format!("{:e}", b.rad()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexRecord {
    pub re: BallRecord,
    pub im: BallRecord,
}

impl From<&CBall> for ComplexRecord {
    fn from(z: &CBall) -> ComplexRecord {
        ComplexRecord {
            re: (&z.re).into(),
            im: (&z.im).into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VectorRecord {
    pub n0: i64,
    pub n1: i64,
    pub n3: i64,
    pub n4: i64,
}

impl From<&Vec4> for VectorRecord {
    fn from(v: &Vec4) -> VectorRecord {
        VectorRecord {
            n0: v.0[0],
            n1: v.0[1],
            n3: v.0[2],
            n4: v.0[3],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TemplateRecord {
    pub letters: String,
    pub u: VectorRecord,
    pub v: VectorRecord,
}

impl From<&TemplateVertex> for TemplateRecord {
    fn from(t: &TemplateVertex) -> TemplateRecord {
        TemplateRecord {
            letters: t.c.iter().map(|l| l.to_string()).collect(),
            u: (&t.u).into(),
            v: (&t.v).into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRowRecord {
    pub v: VectorRecord,
    pub m: i64,
    pub n: i64,
    pub tau1: BallRecord,
    pub tau2: BallRecord,
    pub tau3: BallRecord,
}

/// Every certified constant of the bound pipeline.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstantsDoc {
    pub lambda: Vec<ComplexRecord>,
    pub c1: BallRecord,
    pub c2: BallRecord,
    pub c3: BallRecord,
    pub c4: BallRecord,
    pub alpha: BallRecord,
    pub beta: BallRecord,
    pub mu_min: BallRecord,
    pub pair_max: BallRecord,
    pub pair_max_at: [VectorRecord; 2],
    pub tail: BallRecord,
    pub per_step_tau3: BallRecord,
    pub per_step_tau1: BallRecord,
    pub per_step_tau2: BallRecord,
    pub norm_budget: BallRecord,
    pub norm_budget_floor: i64,
    pub enumeration_bounds: [f64; 4],
    pub d9_count: usize,
    pub u_count: usize,
    pub u_set_hash: String,
    pub table: Vec<TableRowRecord>,
    pub initial_candidates: Vec<VectorRecord>,
}

impl ConstantsDoc {
    pub fn from_bound_data(b: &BoundData) -> ConstantsDoc {
        ConstantsDoc {
            lambda: b.spectral.lambda.iter().map(ComplexRecord::from).collect(),
            c1: (&b.c1c2.c1).into(),
            c2: (&b.c1c2.c2).into(),
            c3: (&b.c3.c3).into(),
            c4: (&b.c3.c3).into(),
            alpha: (&b.alpha).into(),
            beta: (&b.beta).into(),
            mu_min: (&b.spectral.mu_min).into(),
            pair_max: (&b.c3.pair_max).into(),
            pair_max_at: [(&b.c3.pair.0).into(), (&b.c3.pair.1).into()],
            tail: (&b.c3.tail).into(),
            per_step_tau3: (&b.c3.per_step).into(),
            per_step_tau1: (&b.c1c2.step1).into(),
            per_step_tau2: (&b.c1c2.step2).into(),
            norm_budget: (&b.uset.budget).into(),
            norm_budget_floor: b.uset.budget_floor,
            enumeration_bounds: b.uset.enumeration_c,
            d9_count: b.d9.len(),
            u_count: b.uset.len(),
            u_set_hash: b.uset.hash_hex(),
            table: b
                .table
                .iter()
                .map(|r| TableRowRecord {
                    v: (&r.v).into(),
                    m: r.m,
                    n: r.n,
                    tau1: (&r.t1).into(),
                    tau2: (&r.t2).into(),
                    tau3: (&r.t3).into(),
                })
                .collect(),
            initial_candidates: b.candidates.iter().map(VectorRecord::from).collect(),
        }
    }
}

/// Certificate of a full proof run: constants chain to the vector set by
/// hash, the reachability run chains to the same hash, and the exit
/// status is determined by the recorded counts and hits.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProveCertificate {
    pub u_set_hash: String,
    pub d9_count: usize,
    pub u_count: usize,
    pub start_count: usize,
    pub start_vertices: Vec<TemplateRecord>,
    pub universe_filter: String,
    pub reachable_count: usize,
    pub levels: Vec<usize>,
    pub target_hits: Vec<TemplateRecord>,
    pub set_hash: String,
    pub threads: usize,
    pub wall_time_seconds: f64,
}

impl ProveCertificate {
    pub fn new(
        bounds: &BoundData,
        starts: &[TemplateVertex],
        report: &ReachabilityReport,
        filter: UniverseFilter,
        threads: usize,
        wall_time_seconds: f64,
    ) -> ProveCertificate {
        ProveCertificate {
            u_set_hash: report.u_set_hash.clone(),
            d9_count: bounds.d9.len(),
            u_count: bounds.uset.len(),
            start_count: report.start_count,
            start_vertices: starts.iter().map(TemplateRecord::from).collect(),
            universe_filter: filter_name(filter).to_string(),
            reachable_count: report.reachable_count,
            levels: report.levels.clone(),
            target_hits: report.target_hits.iter().map(TemplateRecord::from).collect(),
            set_hash: report.set_hash.clone(),
            threads,
            wall_time_seconds,
        }
    }
}

pub fn filter_name(f: UniverseFilter) -> &'static str {
    match f {
        UniverseFilter::PairInSet => "pair-in-set",
        UniverseFilter::PairAndSumInSet => "pair-and-sum-in-set",
    }
}

/// Vector table as CSV: `# name = mid rad` header lines for the supplied
/// constants, then one `n0,n1,n3,n4` record per vector.
pub fn write_vectors_csv<W: Write>(
    mut w: W,
    constants: &[(&str, &Ball)],
    vectors: &[Vec4],
) -> io::Result<()> {
    for (name, b) in constants {
        writeln!(w, "# {} = {} rad {:e}", name, b.mid(), b.rad())?;
    }
    writeln!(w, "n0,n1,n3,n4")?;
    for v in vectors {
        writeln!(w, "{},{},{},{}", v.0[0], v.0[1], v.0[2], v.0[3])?;
    }
    Ok(())
}

/// Vector table as JSON with the same header constants.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VectorsDoc {
    pub name: String,
    pub constants: Vec<(String, BallRecord)>,
    pub count: usize,
    pub vectors: Vec<VectorRecord>,
}

impl VectorsDoc {
    pub fn new(name: &str, constants: &[(&str, &Ball)], vectors: &[Vec4]) -> VectorsDoc {
        VectorsDoc {
            name: name.to_string(),
            constants: constants
                .iter()
                .map(|(n, b)| (n.to_string(), BallRecord::from(*b)))
                .collect(),
            count: vectors.len(),
            vectors: vectors.iter().map(VectorRecord::from).collect(),
        }
    }
}
