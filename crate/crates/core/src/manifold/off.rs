//! ASCII OFF persistence. Curves use a `DIM 1` line after the `OFF` header,
//! two-column vertex lines and `2 i j` segment lines.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::Mesh;

pub fn write_off<T: Real, W: Write>(mesh: &Mesh<T>, mut out: W) -> Result<()> {
    writeln!(out, "OFF")?;
    let one_d = mesh.dimension() == 1;
    if one_d {
        writeln!(out, "DIM 1")?;
    }
    writeln!(out, "{} {} 0", mesh.vertex_count(), mesh.cell_count())?;
    for x in mesh.vertices() {
        if one_d {
            writeln!(out, "{:?} {:?}", x[0].as_f64(), x[1].as_f64())?;
        } else {
            writeln!(out, "{:?} {:?} {:?}", x[0].as_f64(), x[1].as_f64(), x[2].as_f64())?;
        }
    }
    for cell in mesh.cells() {
        write!(out, "{}", cell.len())?;
        for v in cell {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_off<T: Real, R: BufRead>(input: R) -> Result<Mesh<T>> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty() && !s.trim_start().starts_with('#')).unwrap_or(true));
    let mut next = || -> Result<(usize, String)> {
        match lines.next() {
            Some((n, Ok(s))) => Ok((n, s)),
            Some((_, Err(e))) => Err(e.into()),
            None => Err(Error::Parse { line: 0, msg: "unexpected end of file".into() }),
        }
    };
    let parse_err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };

    let (n, header) = next()?;
    if header.trim() != "OFF" {
        return Err(parse_err(n, "expected OFF header"));
    }
    let (mut n, mut line) = next()?;
    let mut dim = 2;
    if line.trim() == "DIM 1" {
        dim = 1;
        (n, line) = next()?;
    }
    let counts: Vec<usize> = line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(n, "bad count")))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(parse_err(n, "expected vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let cols = if dim == 1 { 2 } else { 3 };
    let mut verts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, line) = next()?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(n, "bad coordinate")))
            .collect::<Result<_>>()?;
        if vals.len() != cols {
            return Err(parse_err(n, &format!("expected {cols} coordinates")));
        }
        let z = if dim == 1 { 0.0 } else { vals[2] };
        verts.push([T::of(vals[0]), T::of(vals[1]), T::of(z)]);
    }
    let mut cells = Vec::with_capacity(nf * (dim + 1));
    for _ in 0..nf {
        let (n, line) = next()?;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(n, "bad index")))
            .collect::<Result<_>>()?;
        if idx.is_empty() || idx[0] != dim + 1 || idx.len() != dim + 2 {
            return Err(parse_err(n, &format!("expected {} indices", dim + 1)));
        }
        cells.extend_from_slice(&idx[1..]);
    }
    Mesh::new(dim, verts, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_circle, build_icosphere};

    #[test]
    fn roundtrip_surface_and_curve() {
        let m = build_icosphere::<f64>(1, 1.0).unwrap();
        let mut buf = Vec::new();
        write_off(&m, &mut buf).unwrap();
        let back: Mesh<f64> = read_off(&buf[..]).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.cells().collect::<Vec<_>>(), m.cells().collect::<Vec<_>>());

        let c = build_circle::<f64>(12, 2.0).unwrap();
        let mut buf = Vec::new();
        write_off(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("OFF\nDIM 1\n12 12 0\n"));
        let back: Mesh<f64> = read_off(&buf[..]).unwrap();
        assert_eq!(back.dimension(), 1);
        assert_eq!(back.vertices(), c.vertices());
    }

    #[test]
    fn reports_line_numbers() {
        let text = "OFF\n3 1 0\n0 0 0\n1 0 0\nx 1 0\n3 0 1 2\n";
        match read_off::<f64, _>(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }
}
