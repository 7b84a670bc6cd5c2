//! CSV and binary serialization of signals, interval lists, coefficient
//! tables, Carleson sequences and step multipliers.

use std::io::{Read, Write};

use crate::carleson::CarlesonSeq;
use crate::error::{LabError, Result};
use crate::grid::{DyadicInterval, FreqInterval, IntervalCollection, TorusSignal, C64};
use crate::product_carleson::{DyadicRect, ProductCarlesonSeq};
use crate::tiles::{coefficient_rows, TileSet};
use crate::variation::StepMultiplier;

pub const SIGNAL_MAGIC: &[u8; 4] = b"LPT1";

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

/// Rows `(index, re, im)`.
pub fn write_signal_csv<W: Write>(w: W, f: &TorusSignal) -> Result<()> {
    let mut out = writer(w, &["index", "re", "im"])?;
    for (i, z) in f.samples().iter().enumerate() {
        out.serialize((i, z.re, z.im))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_signal_csv<R: Read>(r: R) -> Result<TorusSignal> {
    let mut samples = Vec::new();
    for (row, rec) in csv::Reader::from_reader(r).deserialize::<(usize, f64, f64)>().enumerate() {
        let (i, re, im) = rec?;
        if i != row {
            return Err(LabError::Malformed(format!("row {row} carries index {i}")));
        }
        samples.push(C64::new(re, im));
    }
    TorusSignal::new(samples)
}

/// `"LPT1"`, `u32` length, then `(re, im)` pairs, all little-endian.
pub fn write_signal_bin<W: Write>(mut w: W, f: &TorusSignal) -> Result<()> {
    let n = u32::try_from(f.len()).map_err(|_| LabError::InvalidLength(f.len()))?;
    let mut buf = Vec::with_capacity(8 + 16 * f.len());
    buf.extend_from_slice(SIGNAL_MAGIC);
    buf.extend_from_slice(&n.to_le_bytes());
    for z in f.samples() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_signal_bin<R: Read>(mut r: R) -> Result<TorusSignal> {
    let mut head = [0u8; 8];
    r.read_exact(&mut head)?;
    if &head[..4] != SIGNAL_MAGIC {
        return Err(LabError::Malformed("missing LPT1 magic".into()));
    }
    let n = u32::from_le_bytes(head[4..].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != 16 * n {
        return Err(LabError::Malformed(format!("expected {} payload bytes, found {}", 16 * n, body.len())));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
    TorusSignal::new(body.chunks_exact(16).map(|c| C64::new(f(&c[..8]), f(&c[8..]))).collect())
}

/// Rows `(lo, hi)`.
pub fn write_intervals_csv<W: Write>(w: W, c: &IntervalCollection) -> Result<()> {
    let mut out = writer(w, &["lo", "hi"])?;
    for iv in c.intervals() {
        out.serialize((iv.lo, iv.hi))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_intervals_csv<R: Read>(r: R) -> Result<IntervalCollection> {
    let v = csv::Reader::from_reader(r)
        .deserialize::<(i64, i64)>()
        .map(|rec| {
            let (lo, hi) = rec?;
            FreqInterval::new(lo, hi)
        })
        .collect::<Result<Vec<_>>>()?;
    IntervalCollection::new(v)
}

/// Rows `(omega_lo, omega_hi, level, offset, re, im)`.
pub fn write_coefficients_csv<W: Write>(w: W, tiles: &TileSet, coefficients: &[Vec<C64>]) -> Result<()> {
    let mut out = writer(w, &["omega_lo", "omega_hi", "level", "offset", "re", "im"])?;
    for row in coefficient_rows(tiles, coefficients) {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

/// Rows `(level, offset, value)` for the nonzero entries.
pub fn write_carleson_csv<W: Write>(w: W, a: &CarlesonSeq) -> Result<()> {
    let mut out = writer(w, &["level", "offset", "value"])?;
    for (i, v) in a.entries() {
        out.serialize((i.level, i.offset, v))?;
    }
    out.flush()?;
    Ok(())
}

/// Depth defaults to the finest level present.
pub fn read_carleson_csv<R: Read>(r: R, depth: Option<u32>) -> Result<CarlesonSeq> {
    let rows = csv::Reader::from_reader(r).deserialize::<(u32, u64, f64)>().collect::<std::result::Result<Vec<_>, _>>()?;
    let d = depth.unwrap_or_else(|| rows.iter().map(|r| r.0).max().unwrap_or(0));
    CarlesonSeq::from_entries(d, rows.into_iter().map(|(level, offset, v)| (DyadicInterval { level, offset }, v)))
}

/// Rows `(lev1, off1, lev2, off2, value)`.
pub fn write_product_carleson_csv<W: Write>(w: W, a: &ProductCarlesonSeq) -> Result<()> {
    let mut out = writer(w, &["lev1", "off1", "lev2", "off2", "value"])?;
    for (r, v) in a.entries() {
        out.serialize((r.x.level, r.x.offset, r.y.level, r.y.offset, *v))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_product_carleson_csv<R: Read>(r: R, depths: Option<(u32, u32)>) -> Result<ProductCarlesonSeq> {
    let rows = csv::Reader::from_reader(r).deserialize::<(u32, u64, u32, u64, f64)>().collect::<std::result::Result<Vec<_>, _>>()?;
    let (d1, d2) = depths.unwrap_or_else(|| (rows.iter().map(|r| r.0).max().unwrap_or(0), rows.iter().map(|r| r.2).max().unwrap_or(0)));
    let mut a = ProductCarlesonSeq::new(d1, d2);
    for (l1, o1, l2, o2, v) in rows {
        a.add(DyadicRect { x: DyadicInterval { level: l1, offset: o1 }, y: DyadicInterval { level: l2, offset: o2 } }, v)?;
    }
    Ok(a)
}

/// Rows `(breakpoint, re, im)` per cell, then `(end, , )` closing the domain.
pub fn write_step_csv<W: Write>(w: W, m: &StepMultiplier) -> Result<()> {
    let mut out = writer(w, &["breakpoint", "re", "im"])?;
    for (&b, v) in m.breakpoints().iter().zip(m.values()) {
        out.serialize((b, Some(v.re), Some(v.im)))?;
    }
    out.serialize((m.domain().hi, None::<f64>, None::<f64>))?;
    out.flush()?;
    Ok(())
}

pub fn read_step_csv<R: Read>(r: R) -> Result<StepMultiplier> {
    let rows = csv::Reader::from_reader(r)
        .deserialize::<(i64, Option<f64>, Option<f64>)>()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let Some((&(end, None, None), cells)) = rows.split_last() else {
        return Err(LabError::Malformed("step multiplier must end with a (end, , ) row".into()));
    };
    let mut bps = Vec::with_capacity(cells.len());
    let mut vals = Vec::with_capacity(cells.len());
    for &(b, re, im) in cells {
        match (re, im) {
            (Some(re), Some(im)) => {
                bps.push(b);
                vals.push(C64::new(re, im));
            }
            _ => return Err(LabError::Malformed(format!("cell at {b} lacks a value"))),
        }
    }
    StepMultiplier::new(bps, vals, end)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_signal, trial_rng};

    #[test]
    fn signal_round_trips() {
        let f = gaussian_signal(&mut trial_rng(4, 0), 64);
        let mut csv_buf = Vec::new();
        write_signal_csv(&mut csv_buf, &f).unwrap();
        assert_eq!(read_signal_csv(&csv_buf[..]).unwrap(), f);
        let mut bin = Vec::new();
        write_signal_bin(&mut bin, &f).unwrap();
        assert_eq!(&bin[..4], b"LPT1");
        assert_eq!(u32::from_le_bytes(bin[4..8].try_into().unwrap()), 64);
        assert_eq!(bin.len(), 8 + 64 * 16);
        assert_eq!(read_signal_bin(&bin[..]).unwrap(), f);
        bin[0] = b'X';
        assert!(read_signal_bin(&bin[..]).is_err());
    }

    #[test]
    fn step_and_intervals_round_trip() {
        let m = StepMultiplier::new(vec![-8, -1, 4], vec![C64::new(1.0, 0.5), C64::new(-0.25, 0.0), C64::new(0.0, 3.0)], 8).unwrap();
        let mut buf = Vec::new();
        write_step_csv(&mut buf, &m).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().ends_with("8,,\n"));
        assert_eq!(read_step_csv(&buf[..]).unwrap(), m);
        assert!(read_step_csv(&b"breakpoint,re,im\n0,1,0\n"[..]).is_err());
        let c = IntervalCollection::new(vec![FreqInterval::new(-4, 0).unwrap(), FreqInterval::new(1, 3).unwrap()]).unwrap();
        let mut buf = Vec::new();
        write_intervals_csv(&mut buf, &c).unwrap();
        assert_eq!(read_intervals_csv(&buf[..]).unwrap(), c);
        assert!(read_intervals_csv(&b"lo,hi\n0,4\n2,6\n"[..]).is_err());
    }

    #[test]
    fn carleson_round_trips() {
        let a = crate::carleson::random_carleson(&mut trial_rng(2, 0), 5);
        let mut buf = Vec::new();
        write_carleson_csv(&mut buf, &a).unwrap();
        let b = read_carleson_csv(&buf[..], Some(5)).unwrap();
        assert_eq!(a.entries().collect::<Vec<_>>(), b.entries().collect::<Vec<_>>());
        let p = crate::product_carleson::cross_instance();
        let mut buf = Vec::new();
        write_product_carleson_csv(&mut buf, &p).unwrap();
        let q = read_product_carleson_csv(&buf[..], Some((p.d1, p.d2))).unwrap();
        assert_eq!(p.entries(), q.entries());
    }
}
