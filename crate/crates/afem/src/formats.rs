//! Text formats: per-level CSV, mesh dumps and indicator tables.

use std::io::{BufRead, Write};

use afem_core::adapt::LoopRecord;
use afem_core::estimator::{IndicatorKind, IndicatorSet};
use afem_core::mesh::{Mesh, Triangle};
use afem_core::Point;
use serde::{Deserialize, Serialize};

use crate::error::{AfemError, Result};

/// Column names of the per-level CSV, `eps` included.
pub const LEVEL_COLUMNS: [&str; 9] = ["level", "N", "rho", "rho_tilde", "apx", "J", "eps", "pdas_iters", "wall_ms"];

/// One row of the per-level CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub rho: f64,
    pub rho_tilde: f64,
    pub apx: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(default)]
    pub eps: Option<f64>,
    pub pdas_iters: usize,
    pub wall_ms: f64,
}

impl From<&LoopRecord> for LevelRow {
    fn from(r: &LoopRecord) -> Self {
        LevelRow {
            level: r.level,
            n: r.elements,
            rho: r.rho,
            rho_tilde: r.rho_tilde,
            apx: r.apx,
            j: r.energy,
            eps: r.eps,
            pdas_iters: r.pdas_iterations,
            wall_ms: r.wall_ms,
        }
    }
}

/// Writes the per-level CSV. The `eps` column is written only if every row has a value.
pub fn write_levels<W: Write>(rows: &[LevelRow], out: W) -> Result<()> {
    let with_eps = !rows.is_empty() && rows.iter().all(|r| r.eps.is_some());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LEVEL_COLUMNS.iter().filter(|&&c| with_eps || c != "eps"))?;
    for r in rows {
        let mut rec = vec![
            r.level.to_string(),
            r.n.to_string(),
            r.rho.to_string(),
            r.rho_tilde.to_string(),
            r.apx.to_string(),
            r.j.to_string(),
        ];
        if with_eps {
            rec.push(r.eps.map_or_else(String::new, |e| e.to_string()));
        }
        rec.push(r.pdas_iters.to_string());
        rec.push(r.wall_ms.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| AfemError::io("<csv>", e))?;
    Ok(())
}

pub fn read_levels<R: std::io::Read>(input: R) -> Result<Vec<LevelRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let rows = rd.deserialize().collect::<std::result::Result<Vec<LevelRow>, _>>()?;
    Ok(rows)
}

/// `nodes N triangles M`, then `x y` per node and `v0 v1 v2 ref_edge` per triangle.
pub fn write_mesh<W: Write>(mesh: &Mesh, mut out: W) -> std::io::Result<()> {
    writeln!(out, "nodes {} triangles {}", mesh.num_nodes(), mesh.num_triangles())?;
    for p in mesh.nodes() {
        writeln!(out, "{} {}", p.x, p.y)?;
    }
    for t in mesh.triangles() {
        let [a, b, c] = t.vertices;
        writeln!(out, "{a} {b} {c} {}", t.ref_edge)?;
    }
    out.flush()
}

pub fn read_mesh<R: BufRead>(input: R) -> Result<Mesh> {
    let bad = |m: &str| AfemError::MeshFormat(m.to_owned());
    let mut lines = input.lines();
    let mut next = move || -> Result<String> {
        match lines.next() {
            Some(l) => l.map_err(|e| AfemError::io("<mesh>", e)),
            None => Err(AfemError::MeshFormat("unexpected end of file".into())),
        }
    };
    let header = next()?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = match h.as_slice() {
        ["nodes", n, "triangles", m] => {
            (n.parse::<usize>().map_err(|_| bad("node count"))?, m.parse::<usize>().map_err(|_| bad("triangle count"))?)
        }
        _ => return Err(bad("header must read `nodes N triangles M`")),
    };
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let l = next()?;
        let v: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("node line"))?;
        match v.as_slice() {
            [x, y] => nodes.push(Point::new(*x, *y)),
            _ => return Err(bad("node line needs two coordinates")),
        }
    }
    let mut triangles = Vec::with_capacity(m);
    for _ in 0..m {
        let l = next()?;
        let v: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("triangle line"))?;
        match v.as_slice() {
            &[a, b, c, r] if r < 3 => triangles.push(Triangle::new([a, b, c], r as u8)),
            _ => return Err(bad("triangle line needs three vertices and a reference edge in 0..3")),
        }
    }
    Ok(Mesh::new(nodes, triangles)?)
}

/// `edge_id,kind,eta2,osc2,apx2`, one row per edge.
pub fn write_indicators<W: Write>(set: &IndicatorSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["edge_id", "kind", "eta2", "osc2", "apx2"])?;
    for (id, e) in set.edges.iter().enumerate() {
        let kind = match e.kind {
            IndicatorKind::Interior => "interior",
            IndicatorKind::Boundary => "boundary",
        };
        w.write_record([id.to_string(), kind.to_owned(), e.eta2.to_string(), e.osc2.to_string(), e.apx2.to_string()])?;
    }
    w.flush().map_err(|e| AfemError::io("<csv>", e))?;
    Ok(())
}
