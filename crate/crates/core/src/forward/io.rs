//! Trace CSV and raw field dumps, plus the `# key = value` header convention
//! shared by all CSV files of the crate.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use super::DiscreteField;
use crate::error::{Result, SuperlensError};
use crate::spectral::C64;

/// Writes `# key = value` lines.
pub fn write_header<W: Write>(w: &mut W, entries: &[(&str, String)]) -> Result<()> {
    for (k, v) in entries {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

/// Splits a commented CSV into its header map and the remaining text.
pub fn split_header<R: Read>(r: R) -> Result<(BTreeMap<String, String>, String)> {
    let mut header = BTreeMap::new();
    let mut body = String::new();
    for line in BufReader::new(r).lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
        } else {
            body.push_str(&line);
            body.push('\n');
        }
    }
    Ok((header, body))
}

pub(crate) fn parse_f64(s: &str, context: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| SuperlensError::Parse {
        context: context.to_string(),
        message: format!("{s:?}: {e}"),
    })
}

/// Trace CSV: columns `x, re_u, im_u`.
pub fn write_trace_csv<W: Write>(mut w: W, x: &[f64], trace: &[C64], header: &[(&str, String)]) -> Result<()> {
    write_header(&mut w, header)?;
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x", "re_u", "im_u"])?;
    for (xi, u) in x.iter().zip(trace) {
        wr.write_record([format!("{xi:.17e}"), format!("{:.17e}", u.re), format!("{:.17e}", u.im)])?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads a trace CSV written by [`write_trace_csv`].
pub fn read_trace_csv<R: Read>(r: R) -> Result<(BTreeMap<String, String>, Vec<f64>, Vec<C64>)> {
    let (header, body) = split_header(r)?;
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let mut x = Vec::new();
    let mut u = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() < 3 {
            return Err(SuperlensError::Parse {
                context: "trace csv".into(),
                message: format!("expected 3 columns, got {}", rec.len()),
            });
        }
        x.push(parse_f64(&rec[0], "trace x")?);
        u.push(C64::new(parse_f64(&rec[1], "trace re_u")?, parse_f64(&rec[2], "trace im_u")?));
    }
    Ok((header, x, u))
}

/// Binary dump: little-endian `u64 nx, u64 ny, f64 period, f64 a, f64 b`, then
/// `ny * nx` complex doubles (re, im), level by level.
pub fn write_field_binary<W: Write>(mut w: W, field: &DiscreteField) -> Result<()> {
    let ny = field.values.len();
    w.write_all(&(field.grid.nx as u64).to_le_bytes())?;
    w.write_all(&(ny as u64).to_le_bytes())?;
    for v in [field.scene.period, field.scene.slab_bottom, field.scene.slab_top] {
        w.write_all(&v.to_le_bytes())?;
    }
    for level in &field.values {
        for u in level {
            w.write_all(&u.re.to_le_bytes())?;
            w.write_all(&u.im.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Header and values of a binary field dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub nx: usize,
    pub ny: usize,
    pub period: f64,
    pub slab_bottom: f64,
    pub slab_top: f64,
    pub values: Vec<C64>,
}

pub fn read_field_binary<R: Read>(mut r: R) -> Result<FieldDump> {
    let mut b8 = [0u8; 8];
    let mut u64_next = |r: &mut R| -> Result<u64> {
        r.read_exact(&mut b8)?;
        Ok(u64::from_le_bytes(b8))
    };
    let nx = u64_next(&mut r)? as usize;
    let ny = u64_next(&mut r)? as usize;
    let period = f64::from_bits(u64_next(&mut r)?);
    let slab_bottom = f64::from_bits(u64_next(&mut r)?);
    let slab_top = f64::from_bits(u64_next(&mut r)?);
    let mut values = Vec::with_capacity(nx * ny);
    for _ in 0..nx * ny {
        let re = f64::from_bits(u64_next(&mut r)?);
        let im = f64::from_bits(u64_next(&mut r)?);
        values.push(C64::new(re, im));
    }
    Ok(FieldDump {
        nx,
        ny,
        period,
        slab_bottom,
        slab_top,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{solve_total_field, Grid, Profile, SolverOptions};
    use crate::spectral::SceneParameters;

    #[test]
    fn trace_round_trip() {
        let x = vec![0.0, 0.25, 0.5];
        let u = vec![C64::new(1.0, -2.0), C64::new(0.1, 1e-17), C64::new(-3.5, 0.0)];
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &x, &u, &[("nx", "3".into())]).unwrap();
        let (h, x2, u2) = read_trace_csv(buf.as_slice()).unwrap();
        assert_eq!(h["nx"], "3");
        assert_eq!(x, x2);
        assert_eq!(u, u2);
    }

    #[test]
    fn field_dump_round_trip() {
        let p = SceneParameters::vacuum();
        let g = Grid::new(4, 3, 3).unwrap();
        let f = solve_total_field(&Profile::flat(), &p, &g, &SolverOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_field_binary(&mut buf, &f).unwrap();
        assert_eq!(buf.len(), 40 + 16 * 4 * 5);
        let d = read_field_binary(buf.as_slice()).unwrap();
        assert_eq!((d.nx, d.ny), (4, 5));
        assert_eq!(d.slab_top, 0.2);
        assert_eq!(d.values[4 * 4 + 1], f.values[4][1]);
    }
}
