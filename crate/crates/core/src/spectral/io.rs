//! Field files.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! u64  n_points
//! f64  length
//! f64  re_0, im_0, re_1, im_1, ... (n_points pairs)
//! ```
//!
//! CSV layout:
//!
//! ```text
//! n_points,length
//! <n_points>,<length>
//! re,im
//! <re_0>,<im_0>
//! ...
//! ```
//!
//! Floats in CSV are written with Rust's shortest round-trip formatting, so a
//! CSV round trip is exact.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{ComplexField, Grid};
use crate::error::{Error, Result};

pub fn write_binary<W: Write>(field: &ComplexField, mut out: W) -> Result<()> {
    let grid = field.grid();
    out.write_all(&(grid.n_points() as u64).to_le_bytes())?;
    out.write_all(&grid.length().to_le_bytes())?;
    for z in field.values() {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<ComplexField> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let n_points = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let length = f64::from_le_bytes(word);
    let grid = Grid::new(n_points, length)?;
    let mut values = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        input.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        input.read_exact(&mut word)?;
        let im = f64::from_le_bytes(word);
        values.push(Complex64::new(re, im));
    }
    ComplexField::new(&grid, values)
}

pub fn write_csv<W: Write>(field: &ComplexField, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["n_points", "length"])?;
    w.write_record([
        field.grid().n_points().to_string(),
        field.grid().length().to_string(),
    ])?;
    w.write_record(["re", "im"])?;
    for z in field.values() {
        w.write_record([z.re.to_string(), z.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<ComplexField> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = rdr.records();
    let mut next = |expect: &str| -> Result<(usize, csv::StringRecord)> {
        match records.next() {
            Some(rec) => {
                let rec = rec?;
                let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
                Ok((line, rec))
            }
            None => Err(Error::Parse {
                line: 0,
                message: format!("unexpected end of file, expected {expect}"),
            }),
        }
    };

    next("header")?;
    let (line, dims) = next("dimensions")?;
    let parse_err = |line: usize, what: &str| Error::Parse {
        line,
        message: format!("cannot parse {what}"),
    };
    if dims.len() != 2 {
        return Err(parse_err(line, "n_points,length"));
    }
    let n_points: usize = dims[0].trim().parse().map_err(|_| parse_err(line, "n_points"))?;
    let length: f64 = dims[1].trim().parse().map_err(|_| parse_err(line, "length"))?;
    let grid = Grid::new(n_points, length)?;
    next("re,im header")?;

    let mut values = Vec::with_capacity(n_points);
    for rec in records {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != 2 {
            return Err(parse_err(line, "re,im pair"));
        }
        let re: f64 = rec[0].trim().parse().map_err(|_| parse_err(line, "re"))?;
        let im: f64 = rec[1].trim().parse().map_err(|_| parse_err(line, "im"))?;
        values.push(Complex64::new(re, im));
    }
    ComplexField::new(&grid, values)
}

/// Save by extension: `.csv` writes CSV, anything else the binary layout.
pub fn save(field: &ComplexField, path: &Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    if is_csv(path) {
        write_csv(field, file)
    } else {
        write_binary(field, file)
    }
}

pub fn load(path: &Path) -> Result<ComplexField> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    if is_csv(path) {
        read_csv(file)
    } else {
        read_binary(file)
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ComplexField {
        let g = Grid::new(16, 3.5).unwrap();
        ComplexField::from_fn(&g, |x| Complex64::new(x.cos(), 0.1 * x))
    }

    #[test]
    fn binary_header_is_little_endian() {
        let f = sample();
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 16 * 16);
        assert_eq!(&buf[0..8], &16u64.to_le_bytes());
        assert_eq!(&buf[8..16], &3.5f64.to_le_bytes());
        let back = read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn csv_roundtrip_exact() {
        let f = sample();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values(), f.values());
        assert_eq!(back.grid().length(), 3.5);
    }

    #[test]
    fn csv_reports_line_of_bad_row() {
        let text = "n_points,length\n8,1.0\nre,im\n0,0\n0,0\nx,0\n";
        match read_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_binary_is_an_error() {
        let f = sample();
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_binary(buf.as_slice()).is_err());
    }
}
