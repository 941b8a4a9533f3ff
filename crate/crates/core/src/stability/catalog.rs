use super::QuadInvariants;
use crate::higgs::QuadrupletSpec;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Label for entries found by [`coordinate_subquadruplets`].
pub const PROVENANCE_COORDINATE: &str = "coordinate";
pub const PROVENANCE_USER: &str = "user";
pub const PROVENANCE_DEGREE_LOWERED: &str = "degree-lowered";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub invariants: QuadInvariants,
    pub provenance: String,
}

impl CatalogEntry {
    pub fn new(invariants: QuadInvariants, provenance: &str) -> CatalogEntry {
        CatalogEntry { invariants, provenance: provenance.to_string() }
    }
}

/// Candidate sub-quadruplets of an ambient quadruplet. Trivial entries (zero
/// and the ambient itself) are rejected on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubobjectCatalog {
    pub ambient: QuadInvariants,
    pub entries: Vec<CatalogEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    role: String,
    r1: u32,
    r2: u32,
    d1: i64,
    d2: i64,
    provenance: String,
}

impl SubobjectCatalog {
    pub fn new(ambient: QuadInvariants, entries: Vec<CatalogEntry>) -> Result<SubobjectCatalog> {
        if ambient.is_zero() {
            return Err(Error::Invalid("ambient quadruplet has rank zero".into()));
        }
        let mut cat = SubobjectCatalog { ambient, entries: Vec::new() };
        for e in entries {
            cat.push(e)?;
        }
        Ok(cat)
    }

    pub fn push(&mut self, e: CatalogEntry) -> Result<()> {
        let s = e.invariants;
        if s.is_zero() || s == self.ambient {
            return Err(Error::Invalid(format!("trivial sub-quadruplet {s}")));
        }
        if s.r1 > self.ambient.r1 || s.r2 > self.ambient.r2 {
            return Err(Error::Invalid(format!("sub-object {s} exceeds ambient {}", self.ambient)));
        }
        if !self.entries.contains(&e) {
            self.entries.push(e);
        }
        Ok(())
    }

    /// Write as CSV with columns role,r1,r2,d1,d2,provenance; the first row is
    /// the ambient quadruplet.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let a = self.ambient;
        let rows = std::iter::once(Record {
            role: "ambient".into(),
            r1: a.r1,
            r2: a.r2,
            d1: a.d1,
            d2: a.d2,
            provenance: String::new(),
        })
        .chain(self.entries.iter().map(|e| Record {
            role: "entry".into(),
            r1: e.invariants.r1,
            r2: e.invariants.r2,
            d1: e.invariants.d1,
            d2: e.invariants.d2,
            provenance: e.provenance.clone(),
        }));
        for r in rows {
            wr.serialize(r).map_err(|e| Error::Invalid(e.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<SubobjectCatalog> {
        let mut rd = csv::Reader::from_reader(r);
        let mut ambient = None;
        let mut entries = Vec::new();
        for (line, rec) in rd.deserialize::<Record>().enumerate() {
            let rec = rec.map_err(|e| Error::Invalid(format!("catalog record {}: {e}", line + 1)))?;
            let inv = QuadInvariants::new(rec.r1, rec.r2, rec.d1, rec.d2);
            match rec.role.as_str() {
                "ambient" if ambient.is_none() => ambient = Some(inv),
                "ambient" => return Err(Error::Invalid("catalog has two ambient rows".into())),
                "entry" => entries.push(CatalogEntry { invariants: inv, provenance: rec.provenance }),
                other => return Err(Error::Invalid(format!("unknown catalog role '{other}'"))),
            }
        }
        let ambient = ambient.ok_or_else(|| Error::Invalid("catalog has no ambient row".into()))?;
        SubobjectCatalog::new(ambient, entries)
    }
}

/// Which blocks of θ₁, θ₂, φ, ψ are nonzero, indexed by line summands.
/// `theta1[a][b]` is true when θ₁ maps summand b into summand a.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSupport {
    pub e1_degrees: Vec<i64>,
    pub e2_degrees: Vec<i64>,
    pub theta1: Vec<Vec<bool>>,
    pub theta2: Vec<Vec<bool>>,
    /// r₂ × r₁
    pub phi: Vec<Vec<bool>>,
    /// r₁ × r₂
    pub psi: Vec<Vec<bool>>,
}

fn support(f: &crate::geometry::Field, tol: f64) -> Vec<Vec<bool>> {
    (0..f.rows).map(|a| (0..f.cols).map(|b| f.sup_entry(a, b) > tol).collect()).collect()
}

/// Largest summand count handled by the exhaustive enumeration.
const MAX_SUMMANDS: usize = 20;

impl BlockSupport {
    pub fn from_quadruplet(q: &QuadrupletSpec, tol: f64) -> BlockSupport {
        BlockSupport {
            e1_degrees: q.e1_degrees.clone(),
            e2_degrees: q.e2_degrees.clone(),
            theta1: support(&q.theta1, tol),
            theta2: support(&q.theta2, tol),
            phi: support(&q.phi, tol),
            psi: support(&q.psi, tol),
        }
    }

    pub fn ambient(&self) -> QuadInvariants {
        QuadInvariants::new(
            self.e1_degrees.len() as u32,
            self.e2_degrees.len() as u32,
            self.e1_degrees.iter().sum(),
            self.e2_degrees.iter().sum(),
        )
    }

    fn check_shapes(&self) -> Result<()> {
        let (k1, k2) = (self.e1_degrees.len(), self.e2_degrees.len());
        let ok = |m: &Vec<Vec<bool>>, r: usize, c: usize| m.len() == r && m.iter().all(|row| row.len() == c);
        if !(ok(&self.theta1, k1, k1) && ok(&self.theta2, k2, k2) && ok(&self.phi, k2, k1) && ok(&self.psi, k1, k2)) {
            return Err(Error::Shape("block support patterns do not match the summand counts".into()));
        }
        if k1 + k2 > MAX_SUMMANDS {
            return Err(Error::Invalid(format!("sub-object enumeration supports at most {MAX_SUMMANDS} summands")));
        }
        Ok(())
    }

    /// Whether (S₁, S₂) is invariant: θ₁(S₁) ⊆ S₁, θ₂(S₂) ⊆ S₂,
    /// φ(S₁) ⊆ S₂ and ψ(S₂) ⊆ S₁.
    pub fn is_invariant(&self, s1: &[bool], s2: &[bool]) -> bool {
        let closed = |m: &Vec<Vec<bool>>, src: &[bool], dst: &[bool]| {
            m.iter().enumerate().all(|(a, row)| row.iter().enumerate().all(|(b, &nz)| !(nz && src[b]) || dst[a]))
        };
        closed(&self.theta1, s1, s1)
            && closed(&self.theta2, s2, s2)
            && closed(&self.phi, s1, s2)
            && closed(&self.psi, s2, s1)
    }

    /// All nontrivial invariant coordinate sub-quadruplets.
    pub fn subquadruplets(&self) -> Result<SubobjectCatalog> {
        self.check_shapes()?;
        let (k1, k2) = (self.e1_degrees.len(), self.e2_degrees.len());
        let total = k1 + k2;
        let mut cat = SubobjectCatalog::new(self.ambient(), Vec::new())?;
        for mask in 1u64..(1u64 << total) - 1 {
            let s1: Vec<bool> = (0..k1).map(|i| mask >> i & 1 == 1).collect();
            let s2: Vec<bool> = (0..k2).map(|i| mask >> (k1 + i) & 1 == 1).collect();
            if !self.is_invariant(&s1, &s2) {
                continue;
            }
            let pick = |s: &[bool], d: &[i64]| -> (u32, i64) {
                s.iter().zip(d).filter(|(b, _)| **b).fold((0, 0), |(r, dd), (_, x)| (r + 1, dd + x))
            };
            let (r1, d1) = pick(&s1, &self.e1_degrees);
            let (r2, d2) = pick(&s2, &self.e2_degrees);
            let label = format!(
                "{PROVENANCE_COORDINATE}:{:?}|{:?}",
                (0..k1).filter(|&i| s1[i]).collect::<Vec<_>>(),
                (0..k2).filter(|&i| s2[i]).collect::<Vec<_>>()
            );
            cat.push(CatalogEntry { invariants: QuadInvariants::new(r1, r2, d1, d2), provenance: label })?;
        }
        Ok(cat)
    }
}

/// Coordinate sub-quadruplets of a block-structured quadruplet; blocks with
/// sup norm above `tol` count as nonzero.
pub fn coordinate_subquadruplets(q: &QuadrupletSpec, tol: f64) -> Result<SubobjectCatalog> {
    BlockSupport::from_quadruplet(q, tol).subquadruplets()
}
