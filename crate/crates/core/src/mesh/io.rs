//! Plain-text mesh format:
//!
//! ```text
//! vertices N / triangles M
//! x y                      (N lines)
//! a b c                    (M lines, zero-based, counterclockwise)
//! boundary_edges K
//! a b marker               (marker: solid:<k>, left, right, bottom, top)
//! periodic_pairs P
//! low high axis            (axis: x or y)
//! inclusions Q
//! ellipse cx cy a b rotation | rectangle cx cy hx hy
//! ```
//!
//! Reals are written with 17 significant digits.

use super::{
    Axis, BoundaryEdge, Inclusion, Marker, Mesh, MeshError, PeriodicPair, UnitCellGeometry,
};
use std::fmt::Write as _;

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "vertices {} / triangles {}",
        mesh.vertices.len(),
        mesh.triangles.len()
    );
    for p in &mesh.vertices {
        let _ = writeln!(s, "{:.16e} {:.16e}", p[0], p[1]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "boundary_edges {}", mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let m = match e.marker {
            Marker::Solid(k) => format!("solid:{k}"),
            Marker::Left => "left".into(),
            Marker::Right => "right".into(),
            Marker::Bottom => "bottom".into(),
            Marker::Top => "top".into(),
        };
        let _ = writeln!(s, "{} {} {m}", e.v[0], e.v[1]);
    }
    let _ = writeln!(s, "periodic_pairs {}", mesh.periodic_pairs.len());
    for p in &mesh.periodic_pairs {
        let a = if p.axis == Axis::X { "x" } else { "y" };
        let _ = writeln!(s, "{} {} {a}", p.low, p.high);
    }
    let incs = mesh
        .geometry
        .as_ref()
        .map_or(&[][..], |g| &g.inclusions[..]);
    let _ = writeln!(s, "inclusions {}", incs.len());
    for inc in incs {
        let _ = match *inc {
            Inclusion::Ellipse {
                center,
                a,
                b,
                rotation,
            } => writeln!(
                s,
                "ellipse {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
                center[0], center[1], a, b, rotation
            ),
            Inclusion::Rectangle { center, hx, hy } => {
                writeln!(
                    s,
                    "rectangle {:.16e} {:.16e} {:.16e} {:.16e}",
                    center[0], center[1], hx, hy
                )
            }
        };
    }
    s
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<Vec<&'a str>, MeshError> {
        for (i, l) in self.it.by_ref() {
            self.line = i + 1;
            let f: Vec<&str> = l.split_whitespace().collect();
            if !f.is_empty() {
                return Ok(f);
            }
        }
        Err(self.err("unexpected end of file"))
    }

    fn err(&self, msg: &str) -> MeshError {
        MeshError::Parse {
            line: self.line,
            msg: msg.to_string(),
        }
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T, MeshError> {
        s.parse()
            .map_err(|_| self.err(&format!("cannot parse '{s}'")))
    }

    fn header(&mut self, key: &str) -> Result<usize, MeshError> {
        let f = self.next()?;
        if f.len() != 2 || f[0] != key {
            return Err(self.err(&format!("expected '{key} <count>'")));
        }
        self.num(f[1])
    }
}

pub fn read_mesh(text: &str) -> Result<Mesh, MeshError> {
    let mut r = Lines {
        it: text.lines().enumerate(),
        line: 0,
    };
    let h = r.next()?;
    if h.len() != 5 || h[0] != "vertices" || h[2] != "/" || h[3] != "triangles" {
        return Err(r.err("expected 'vertices N / triangles M'"));
    }
    let (nv, nt): (usize, usize) = (r.num(h[1])?, r.num(h[4])?);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let f = r.next()?;
        if f.len() != 2 {
            return Err(r.err("expected two coordinates"));
        }
        vertices.push([r.num(f[0])?, r.num(f[1])?]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let f = r.next()?;
        if f.len() != 3 {
            return Err(r.err("expected three vertex indices"));
        }
        let t: [usize; 3] = [r.num(f[0])?, r.num(f[1])?, r.num(f[2])?];
        if t.iter().any(|&i| i >= nv) {
            return Err(r.err("vertex index out of range"));
        }
        triangles.push(t);
    }
    let ne = r.header("boundary_edges")?;
    let mut boundary_edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let f = r.next()?;
        if f.len() != 3 {
            return Err(r.err("expected 'a b marker'"));
        }
        let marker = match f[2] {
            "left" => Marker::Left,
            "right" => Marker::Right,
            "bottom" => Marker::Bottom,
            "top" => Marker::Top,
            m => match m.strip_prefix("solid:") {
                Some(k) => Marker::Solid(r.num(k)?),
                None => return Err(r.err(&format!("unknown marker '{m}'"))),
            },
        };
        boundary_edges.push(BoundaryEdge {
            v: [r.num(f[0])?, r.num(f[1])?],
            marker,
        });
    }
    let np = r.header("periodic_pairs")?;
    let mut periodic_pairs = Vec::with_capacity(np);
    for _ in 0..np {
        let f = r.next()?;
        let axis = match f.get(2) {
            Some(&"x") => Axis::X,
            Some(&"y") => Axis::Y,
            _ => return Err(r.err("expected 'low high x|y'")),
        };
        periodic_pairs.push(PeriodicPair {
            low: r.num(f[0])?,
            high: r.num(f[1])?,
            axis,
        });
    }
    let ni = r.header("inclusions")?;
    let mut inclusions = Vec::with_capacity(ni);
    for _ in 0..ni {
        let f = r.next()?;
        let vals = f[1..]
            .iter()
            .map(|s| r.num::<f64>(s))
            .collect::<Result<Vec<_>, _>>()?;
        inclusions.push(match (f[0], vals.len()) {
            ("ellipse", 5) => Inclusion::Ellipse {
                center: [vals[0], vals[1]],
                a: vals[2],
                b: vals[3],
                rotation: vals[4],
            },
            ("rectangle", 4) => Inclusion::Rectangle {
                center: [vals[0], vals[1]],
                hx: vals[2],
                hy: vals[3],
            },
            _ => return Err(r.err("malformed inclusion")),
        });
    }
    let geometry = (!inclusions.is_empty()).then_some(UnitCellGeometry { inclusions });
    Ok(Mesh {
        vertices,
        triangles,
        boundary_edges,
        periodic_pairs,
        geometry,
    })
}
