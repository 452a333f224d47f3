//! CSV state and surface files.
//!
//! Schemas, one header line each:
//! spinor `n,re_R,im_R,re_L,im_L`, scalar `n,re,im`, probability `n,p`,
//! surface `t,n,rho`. Reals carry 17 significant digits so files round-trip.

use std::io::{Read, Write};

use qwalk_core::lattice::site_position;
use qwalk_core::{Complex64, ProbabilityField, ScalarWaveField, SpinorField};

use crate::error::{LabError, LabResult};

pub const SPINOR_HEADER: [&str; 5] = ["n", "re_R", "im_R", "re_L", "im_L"];
pub const SCALAR_HEADER: [&str; 3] = ["n", "re", "im"];
pub const PROBABILITY_HEADER: [&str; 2] = ["n", "p"];
pub const SURFACE_HEADER: [&str; 3] = ["t", "n", "rho"];

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Densities sampled at integer times, one row per time.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub times: Vec<u64>,
    pub positions: Vec<i64>,
    pub rho: Vec<Vec<f64>>,
}

impl Surface {
    pub fn from_fields(times: Vec<u64>, fields: &[ProbabilityField]) -> Self {
        let n_sites = fields.first().map_or(0, |f| f.n_sites());
        let positions = (0..n_sites).map(|i| site_position(n_sites, i)).collect();
        let rho = fields.iter().map(|f| f.values().to_vec()).collect();
        Self { times, positions, rho }
    }

    pub fn max(&self) -> f64 {
        self.rho.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn row(&self, t: u64) -> Option<&[f64]> {
        self.times.iter().position(|&s| s == t).map(|i| self.rho[i].as_slice())
    }
}

fn malformed(path: &str, reason: impl Into<String>) -> LabError {
    LabError::Format { path: path.to_string(), reason: reason.into() }
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, want: &[&str], path: &str) -> LabResult<()> {
    let header = reader.headers()?;
    if header.iter().ne(want.iter().copied()) {
        return Err(malformed(path, format!("expected header {}", want.join(","))));
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(field: Option<&str>, path: &str, what: &str) -> LabResult<T> {
    field.and_then(|s| s.trim().parse().ok()).ok_or_else(|| malformed(path, format!("bad {what}")))
}

fn sorted_rows<T>(mut rows: Vec<(i64, T)>, path: &str) -> LabResult<Vec<T>> {
    let n_sites = rows.len();
    for (n, _) in &rows {
        let half = (n_sites / 2) as i64;
        if *n < -half || *n >= half {
            return Err(malformed(path, format!("position {n} outside a ring of {n_sites} sites")));
        }
    }
    rows.sort_by_key(|(n, _)| *n);
    if rows.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(malformed(path, "repeated position"));
    }
    Ok(rows.into_iter().map(|(_, v)| v).collect())
}

pub fn write_spinor<W: Write>(out: W, field: &SpinorField) -> LabResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SPINOR_HEADER)?;
    let n_sites = field.n_sites();
    for (i, (r, l)) in field.right().iter().zip(field.left()).enumerate() {
        let n = site_position(n_sites, i);
        w.write_record([n.to_string(), fmt_real(r.re), fmt_real(r.im), fmt_real(l.re), fmt_real(l.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spinor<R: Read>(input: R, path: &str) -> LabResult<SpinorField> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &SPINOR_HEADER, path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let rec = record?;
        let n: i64 = parse(rec.get(0), path, "position")?;
        let vals: Vec<f64> = (1..5).map(|j| parse(rec.get(j), path, "amplitude")).collect::<LabResult<_>>()?;
        rows.push((n, (Complex64::new(vals[0], vals[1]), Complex64::new(vals[2], vals[3]))));
    }
    let (right, left) = sorted_rows(rows, path)?.into_iter().unzip();
    Ok(SpinorField::from_components(right, left)?)
}

pub fn write_scalar<W: Write>(out: W, field: &ScalarWaveField) -> LabResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCALAR_HEADER)?;
    let n_sites = field.n_sites();
    for (i, z) in field.amplitudes().iter().enumerate() {
        w.write_record([site_position(n_sites, i).to_string(), fmt_real(z.re), fmt_real(z.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scalar<R: Read>(input: R, path: &str) -> LabResult<ScalarWaveField> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &SCALAR_HEADER, path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let rec = record?;
        let n: i64 = parse(rec.get(0), path, "position")?;
        let re: f64 = parse(rec.get(1), path, "amplitude")?;
        let im: f64 = parse(rec.get(2), path, "amplitude")?;
        rows.push((n, Complex64::new(re, im)));
    }
    Ok(ScalarWaveField::from_amplitudes(sorted_rows(rows, path)?)?)
}

pub fn write_probability<W: Write>(out: W, field: &ProbabilityField) -> LabResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROBABILITY_HEADER)?;
    let n_sites = field.n_sites();
    for (i, p) in field.values().iter().enumerate() {
        w.write_record([site_position(n_sites, i).to_string(), fmt_real(*p)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_probability<R: Read>(input: R, path: &str) -> LabResult<ProbabilityField> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &PROBABILITY_HEADER, path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let rec = record?;
        rows.push((parse(rec.get(0), path, "position")?, parse::<f64>(rec.get(1), path, "probability")?));
    }
    Ok(ProbabilityField::from_values(sorted_rows(rows, path)?)?)
}

pub fn write_surface<W: Write>(out: W, surface: &Surface) -> LabResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SURFACE_HEADER)?;
    for (t, row) in surface.times.iter().zip(&surface.rho) {
        for (n, rho) in surface.positions.iter().zip(row) {
            w.write_record([t.to_string(), n.to_string(), fmt_real(*rho)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_surface<R: Read>(input: R, path: &str) -> LabResult<Surface> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &SURFACE_HEADER, path)?;
    let mut times: Vec<u64> = Vec::new();
    let mut positions: Vec<i64> = Vec::new();
    let mut rho: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let rec = record?;
        let t: u64 = parse(rec.get(0), path, "time")?;
        let n: i64 = parse(rec.get(1), path, "position")?;
        let value: f64 = parse(rec.get(2), path, "density")?;
        if times.last() != Some(&t) {
            times.push(t);
            rho.push(Vec::new());
        }
        let row = rho.last_mut().expect("row pushed above");
        if times.len() == 1 {
            positions.push(n);
        } else if positions.get(row.len()) != Some(&n) {
            return Err(malformed(path, "rows do not share one position axis"));
        }
        row.push(value);
    }
    if rho.iter().any(|r| r.len() != positions.len()) {
        return Err(malformed(path, "ragged surface"));
    }
    Ok(Surface { times, positions, rho })
}
