//! CSV import and export of sampled data.
//!
//! Functions of time: header `t,v1,...,vd`, one row per node.
//! Fields: header `t,x,v` or `t,x,y,v`, time outermost, last axis fastest.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grids::{AxisKind, Grid1D, SampledFunction, SpaceTimeField, SpatialAxis, SpatialSample};
use crate::verify::fmt_num;

/// Relative tolerance for recognizing grid structure in imported coordinates.
const COORD_TOL: f64 = 1e-9;

fn bad(msg: impl Into<String>) -> Error {
    Error::DataFormat(msg.into())
}

fn read_table(reader: impl Read) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| bad(format!("row {}: not a number: {f:?}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        if !row.iter().all(|v| v.is_finite()) {
            return Err(bad(format!("row {}: non-finite value", i + 1)));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

fn write_row(w: &mut csv::Writer<impl Write>, row: &[f64]) -> Result<()> {
    w.write_record(row.iter().map(|x| fmt_num(*x))).map_err(|e| Error::Io(e.to_string()))
}

fn finish(mut w: csv::Writer<impl Write>) -> Result<()> {
    w.flush().map_err(Error::from)
}

/// Reads `t,v1..vd`; the `t` column must be the midpoints of a partition of `(0, T)`.
pub fn read_function_csv(reader: impl Read) -> Result<SampledFunction> {
    let (header, rows) = read_table(reader)?;
    if header.len() < 2 || header[0] != "t" {
        return Err(bad(format!("expected header t,v1..vd, got {}", header.join(","))));
    }
    let d = header.len() - 1;
    let nodes: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let grid = Grid1D::from_midpoints(&nodes, false).map_err(|e| bad(e.to_string()))?;
    let values = rows.iter().flat_map(|r| r[1..].iter().copied()).collect();
    SampledFunction::from_values(Arc::new(grid), d, values)
}

pub fn write_function_csv(u: &SampledFunction, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend((1..=u.dim()).map(|c| format!("v{c}")));
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    let mut row = Vec::with_capacity(u.dim() + 1);
    for i in 0..u.len() {
        row.clear();
        row.push(u.grid().nodes()[i]);
        row.extend_from_slice(u.value(i));
        write_row(&mut w, &row)?;
    }
    finish(w)
}

fn distinct(xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for x in xs {
        if !out.iter().any(|y| (x - y).abs() <= COORD_TOL * (1.0 + y.abs())) {
            out.push(x);
        }
    }
    out
}

/// Periodic axes have nodes `j h` with a power-of-two count; half-line axes `(j + 1/2) h`.
fn infer_axis(coords: &[f64]) -> Result<SpatialAxis> {
    let n = coords.len();
    if n < 2 {
        return Err(bad("a spatial axis needs at least two nodes"));
    }
    let h = (coords[n - 1] - coords[0]) / (n - 1) as f64;
    let uniform = coords.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= COORD_TOL * h.abs().max(1.0));
    if !(h > 0.0) || !uniform {
        return Err(bad("spatial coordinates must be uniform and increasing"));
    }
    if coords[0].abs() <= COORD_TOL * h {
        SpatialAxis::periodic(n, n as f64 * h / (2.0 * std::f64::consts::PI)).map_err(|e| bad(e.to_string()))
    } else if (coords[0] - 0.5 * h).abs() <= COORD_TOL * h {
        SpatialAxis::half_line(n, h)
    } else {
        Err(bad(format!("axis starting at {} is neither periodic (0) nor half-line (h/2)", coords[0])))
    }
}

/// Reads `t,x,v` or `t,x,y,v` on a tensor grid.
pub fn read_field_csv(reader: impl Read) -> Result<SpaceTimeField> {
    let (header, rows) = read_table(reader)?;
    let dims = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["t", "x", "v"] => 1,
        ["t", "x", "y", "v"] => 2,
        _ => return Err(bad(format!("expected header t,x,v or t,x,y,v, got {}", header.join(",")))),
    };
    let ts = distinct(rows.iter().map(|r| r[0]));
    let axes = (1..=dims).map(|c| infer_axis(&distinct(rows.iter().map(|r| r[c])))).collect::<Result<Vec<_>>>()?;
    let per: usize = axes.iter().map(|a| a.n).product();
    if rows.len() != ts.len() * per {
        return Err(bad(format!("{} rows do not form a {}x{per} tensor grid", rows.len(), ts.len())));
    }
    for (k, r) in rows.iter().enumerate() {
        let (i, mut rest) = (k / per, k % per);
        let mut expect = vec![ts[i]];
        let mut idx = vec![0; dims];
        for a in (0..dims).rev() {
            idx[a] = rest % axes[a].n;
            rest /= axes[a].n;
        }
        expect.extend(idx.iter().zip(&axes).map(|(&j, ax)| ax.node(j)));
        if expect.iter().zip(r).any(|(e, v)| (e - v).abs() > COORD_TOL * (1.0 + e.abs()) * 1e3) {
            return Err(bad(format!("row {} is out of order (time outermost, last axis fastest)", k + 1)));
        }
    }
    let grid = Grid1D::from_midpoints(&ts, false).map_err(|e| bad(e.to_string()))?;
    SpaceTimeField::new(Arc::new(grid), axes, rows.iter().map(|r| r[dims + 1]).collect())
}

fn axis_header(axes: &[SpatialAxis]) -> Vec<String> {
    ["x", "y"].iter().take(axes.len()).map(|s| s.to_string()).collect()
}

fn spatial_points(axes: &[SpatialAxis]) -> Vec<Vec<f64>> {
    let mut pts = vec![Vec::new()];
    for ax in axes {
        pts = pts.into_iter().flat_map(|p| (0..ax.n).map(move |j| [p.clone(), vec![ax.node(j)]].concat())).collect();
    }
    pts
}

pub fn write_field_csv(u: &SpaceTimeField, writer: impl Write) -> Result<()> {
    if u.axes().len() > 2 {
        return Err(bad("CSV export supports at most two spatial axes"));
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend(axis_header(u.axes()));
    header.push("v".into());
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    let pts = spatial_points(u.axes());
    for (i, &t) in u.tgrid().nodes().iter().enumerate() {
        for (x, v) in pts.iter().zip(u.slice(i)) {
            write_row(&mut w, &[vec![t], x.clone(), vec![*v]].concat())?;
        }
    }
    finish(w)
}

/// `x,v` or `x,y,v`.
pub fn write_spatial_csv(x: &SpatialSample, writer: impl Write) -> Result<()> {
    if x.axes().len() > 2 {
        return Err(bad("CSV export supports at most two spatial axes"));
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = axis_header(x.axes());
    header.push("v".into());
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for (p, v) in spatial_points(x.axes()).iter().zip(x.values()) {
        write_row(&mut w, &[p.clone(), vec![*v]].concat())?;
    }
    finish(w)
}

/// Reads `x,v` or `x,y,v`.
pub fn read_spatial_csv(reader: impl Read) -> Result<SpatialSample> {
    let (header, rows) = read_table(reader)?;
    let dims = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x", "v"] => 1,
        ["x", "y", "v"] => 2,
        _ => return Err(bad(format!("expected header x,v or x,y,v, got {}", header.join(",")))),
    };
    let axes = (0..dims).map(|c| infer_axis(&distinct(rows.iter().map(|r| r[c])))).collect::<Result<Vec<_>>>()?;
    if axes.iter().any(|a| a.kind != AxisKind::Periodic) && dims == 1 {
        return Err(bad("spatial data must live on a periodic axis"));
    }
    SpatialSample::new(axes, rows.iter().map(|r| r[dims]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::{make_graded_grid, sample, Grading, TimeDomain};

    #[test]
    fn function_round_trip() {
        let g = Arc::new(make_graded_grid(TimeDomain::finite(2.0).unwrap(), 16, Grading::default()).unwrap());
        let u = sample(
            |t, out| {
                out[0] = t.sin();
                out[1] = t * t;
            },
            g,
            2,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_function_csv(&u, &mut buf).unwrap();
        let v = read_function_csv(buf.as_slice()).unwrap();
        assert_eq!(v.dim(), 2);
        assert!((v.grid().length() - 2.0).abs() < 1e-12);
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn field_round_trip() {
        let g = Arc::new(make_graded_grid(TimeDomain::finite(1.0).unwrap(), 8, Grading::Uniform).unwrap());
        let axes = vec![SpatialAxis::periodic(8, 1.0).unwrap(), SpatialAxis::half_line(4, 0.1).unwrap()];
        let u = SpaceTimeField::from_fn(g, axes, |t, x| t + x[0].cos() * x[1]).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&u, &mut buf).unwrap();
        let v = read_field_csv(buf.as_slice()).unwrap();
        for (a, b) in u.axes().iter().zip(v.axes()) {
            assert_eq!((a.kind, a.n), (b.kind, b.n));
            assert!((a.length - b.length).abs() < 1e-13);
        }
        assert!(u.values().iter().zip(v.values()).all(|(a, b)| (a - b).abs() < 1e-13));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(read_function_csv("t,v1\n0.5,1\n0.4,2\n".as_bytes()), Err(Error::DataFormat(_))));
        assert!(matches!(read_function_csv("x,v1\n0.5,1\n".as_bytes()), Err(Error::DataFormat(_))));
        assert!(matches!(read_field_csv("t,x,v\n0.5,0,abc\n".as_bytes()), Err(Error::DataFormat(_))));
    }
}
