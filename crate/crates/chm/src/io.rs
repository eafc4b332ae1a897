//! File formats: row-per-point CSV input, JSON results, CSV traces.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use chm_core::{ChmOutcome, Ellipsoid, IterationTrace, PointSet, Verdict, VertexReport};
use serde::{Deserialize, Serialize};

/// Rows of numbers, all of equal length, optionally after one header line.
pub fn read_rows<R: Read>(reader: R, header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("reading CSV record {}", i + 1))?;
        let row = rec
            .iter()
            .filter(|f| !f.is_empty())
            .map(|f| f.parse::<f64>().with_context(|| format!("record {}: {f:?} is not a number", i + 1)))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                bail!("record {} has {} fields, expected {}", i + 1, row.len(), first.len());
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("no data rows");
    }
    Ok(rows)
}

pub fn read_rows_file(path: &Path, header: bool) -> Result<Vec<Vec<f64>>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_rows(f, header).with_context(|| format!("parsing {}", path.display()))
}

/// One point per row.
pub fn read_points<R: Read>(reader: R, header: bool) -> Result<PointSet> {
    Ok(PointSet::from_points(&read_rows(reader, header)?)?)
}

pub fn read_points_file(path: &Path, header: bool) -> Result<PointSet> {
    Ok(PointSet::from_points(&read_rows_file(path, header)?)?)
}

/// A matrix as `(rows, cols, row-major data)`.
pub fn read_matrix_file(path: &Path, header: bool) -> Result<(usize, usize, Vec<f64>)> {
    let rows = read_rows_file(path, header)?;
    let cols = rows[0].len();
    Ok((rows.len(), cols, rows.into_iter().flatten().collect()))
}

/// A vector stored either as one row or as one column.
pub fn read_vector_file(path: &Path, header: bool) -> Result<Vec<f64>> {
    let rows = read_rows_file(path, header)?;
    if rows.len() == 1 {
        Ok(rows.into_iter().next().unwrap())
    } else if rows[0].len() == 1 {
        Ok(rows.into_iter().flatten().collect())
    } else {
        bail!("{} is neither a single row nor a single column", path.display())
    }
}

/// `"c1,c2,..."`.
pub fn parse_query(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|f| f.trim().parse::<f64>().with_context(|| format!("{f:?} is not a number")))
        .collect()
}

pub fn write_points<W: Write>(writer: W, points: &PointSet) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for p in points.iter() {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rows<W: Write>(writer: W, rows: &[&[f64]]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneDoc {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub point: Vec<f64>,
    pub plane: PlaneDoc,
}

/// The membership result document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub status: String,
    pub epsilon: f64,
    pub iterations: usize,
    pub elapsed_ms: f64,
    pub coefficients: Vec<(usize, f64)>,
    pub witness: Option<WitnessDoc>,
}

impl ResultDoc {
    /// The witness plane is oriented so that `normalᵀp < offset` for the
    /// query `p` and `normalᵀv > offset` for every point.
    pub fn from_outcome(out: &ChmOutcome, p: &[f64], epsilon: f64, elapsed_ms: f64) -> Self {
        let (coefficients, witness) = match &out.verdict {
            Verdict::InsideApprox { iterate, .. } => (iterate.coeffs().to_vec(), None),
            Verdict::IterationLimit { best, .. } => (best.coeffs().to_vec(), None),
            Verdict::Witness { cert, .. } => {
                let flip = if cert.plane.eval(p) > 0.0 { -1.0 } else { 1.0 };
                (
                    cert.witness.coeffs().to_vec(),
                    Some(WitnessDoc {
                        point: cert.witness.coords().to_vec(),
                        plane: PlaneDoc {
                            normal: cert.plane.normal.iter().map(|x| flip * x).collect(),
                            offset: flip * cert.plane.offset,
                        },
                    }),
                )
            }
        };
        Self {
            status: out.verdict.name().to_string(),
            epsilon,
            iterations: out.iterations,
            elapsed_ms,
            coefficients,
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerticesDoc {
    pub vertices: Vec<usize>,
    pub queries: usize,
    pub gamma: f64,
    pub elapsed_ms: f64,
    pub gamma_exceeds_diameter: bool,
}

impl VerticesDoc {
    pub fn from_report(r: &VertexReport, gamma: f64, elapsed_ms: f64) -> Self {
        let mut vertices = r.vertex_indices.clone();
        vertices.sort_unstable();
        Self {
            vertices,
            queries: r.queries,
            gamma,
            elapsed_ms,
            gamma_exceeds_diameter: r.gamma_exceeds_diameter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidDoc {
    /// Rows of `M`.
    pub shape: Vec<Vec<f64>>,
    pub center: Vec<f64>,
    pub eps_mvee: f64,
    pub elapsed_ms: f64,
    pub vertices_used: Option<usize>,
}

impl EllipsoidDoc {
    pub fn new(e: &Ellipsoid, eps_mvee: f64, elapsed_ms: f64, vertices_used: Option<usize>) -> Self {
        let m = e.dim();
        Self {
            shape: e.shape_m.chunks(m).map(<[f64]>::to_vec).collect(),
            center: e.center_b.clone(),
            eps_mvee,
            elapsed_ms,
            vertices_used,
        }
    }
}

#[derive(Serialize)]
struct TraceRow {
    iteration: usize,
    delta: f64,
    pivot: Option<usize>,
    eps_property: Option<bool>,
}

/// `iteration,delta,pivot,eps_property`; the pivot column of row `k` is the
/// pivot used to leave iterate `k`.
pub fn write_trace<W: Write>(writer: W, trace: &IterationTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (k, &delta) in trace.deltas.iter().enumerate() {
        w.serialize(TraceRow {
            iteration: k,
            delta,
            pivot: trace.pivot_indices.get(k).copied(),
            eps_property: trace.eps_property_flags.get(k).copied(),
        })?;
    }
    w.flush()?;
    Ok(())
}
