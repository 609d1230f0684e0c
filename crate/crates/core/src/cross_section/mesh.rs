//! Triangle meshes: validation, the plain-text interchange format, and a
//! structured generator for rectangles.

use std::collections::HashMap;

use crate::error::Error;

/// A conforming P1 triangle mesh of a plane domain.
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges as node pairs. Orientation is normalised during
    /// validation so that the outward normal is `(dy, -dx)` of the edge.
    pub boundary_edges: Vec<[usize; 2]>,
}

impl TriMesh {
    /// Validate invariants: positive triangle areas, boundary edges matching
    /// the triangulation, and a single closed boundary loop (1-connected
    /// domain).
    pub fn validated(mut self) -> Result<Self, Error> {
        let n = self.nodes.len();
        if n < 3 || self.triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh needs at least one triangle".into()));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                if v >= n {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {t} references node {v} out of range"
                    )));
                }
            }
            if self.signed_area(*tri) <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has non-positive signed area; node order must be counter-clockwise"
                )));
            }
        }

        // edges used exactly once by the triangulation are the true boundary
        let mut edge_use: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for tri in &self.triangles {
            for e in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let key = (e.0.min(e.1), e.0.max(e.1));
                let entry = edge_use.entry(key).or_insert((0, 0));
                entry.0 += 1;
                // remember the oriented form from the triangle (interior on the left)
                entry.1 = if e.0 == key.0 { 0 } else { 1 };
            }
        }
        let mut true_boundary: HashMap<(usize, usize), usize> = HashMap::new();
        for (&key, &(count, orient)) in &edge_use {
            if count == 1 {
                true_boundary.insert(key, orient);
            } else if count > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge {key:?} is shared by {count} triangles"
                )));
            }
        }
        if self.boundary_edges.len() != true_boundary.len() {
            return Err(Error::InvalidMesh(format!(
                "boundary edge list has {} edges, triangulation boundary has {}",
                self.boundary_edges.len(),
                true_boundary.len()
            )));
        }
        for e in &self.boundary_edges {
            let key = (e[0].min(e[1]), e[0].max(e[1]));
            if !true_boundary.contains_key(&key) {
                return Err(Error::InvalidMesh(format!(
                    "listed boundary edge {e:?} is not on the triangulation boundary"
                )));
            }
        }
        // re-orient every boundary edge so the domain lies on its left
        for e in self.boundary_edges.iter_mut() {
            let key = (e[0].min(e[1]), e[0].max(e[1]));
            let orient = true_boundary[&key];
            *e = if orient == 0 { [key.0, key.1] } else { [key.1, key.0] };
        }

        // closed loops: every boundary node has degree exactly 2
        let mut degree: HashMap<usize, usize> = HashMap::new();
        for e in &self.boundary_edges {
            *degree.entry(e[0]).or_insert(0) += 1;
            *degree.entry(e[1]).or_insert(0) += 1;
        }
        if degree.values().any(|&d| d != 2) {
            return Err(Error::InvalidMesh(
                "boundary edges do not form closed loops (open or branching chain)".into(),
            ));
        }
        let loops = self.count_boundary_loops();
        if loops != 1 {
            return Err(Error::MultiplyConnected { loops });
        }
        Ok(self)
    }

    fn count_boundary_loops(&self) -> usize {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for e in &self.boundary_edges {
            next.insert(e[0], e[1]);
        }
        let mut seen: HashMap<usize, bool> = HashMap::new();
        let mut loops = 0;
        for e in &self.boundary_edges {
            let start = e[0];
            if seen.get(&start).copied().unwrap_or(false) {
                continue;
            }
            loops += 1;
            let mut v = start;
            loop {
                seen.insert(v, true);
                v = match next.get(&v) {
                    Some(&u) => u,
                    None => break,
                };
                if v == start {
                    break;
                }
            }
        }
        loops
    }

    pub fn signed_area(&self, tri: [usize; 3]) -> f64 {
        let [p0, p1, p2] = [self.nodes[tri[0]], self.nodes[tri[1]], self.nodes[tri[2]]];
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|&t| self.signed_area(t)).sum()
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .boundary_edges
            .iter()
            .flat_map(|e| e.iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Parse the plain-text mesh format:
    ///
    /// ```text
    /// nodes N
    /// x y          (N lines)
    /// tris M
    /// i j k        (M lines, 0-based)
    /// bedges K
    /// i j          (K lines)
    /// ```
    ///
    /// Whitespace separated, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut tokens: Vec<&str> = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            tokens.extend(line.split_whitespace());
        }
        let mut it = tokens.into_iter();
        let expect = |it: &mut std::vec::IntoIter<&str>, word: &str| -> Result<(), Error> {
            match it.next() {
                Some(t) if t == word => Ok(()),
                other => Err(Error::InvalidMesh(format!(
                    "expected keyword '{word}', found {other:?}"
                ))),
            }
        };
        let take_usize = |it: &mut std::vec::IntoIter<&str>| -> Result<usize, Error> {
            it.next()
                .ok_or_else(|| Error::InvalidMesh("unexpected end of mesh file".into()))?
                .parse()
                .map_err(|e| Error::InvalidMesh(format!("bad integer: {e}")))
        };
        let take_f64 = |it: &mut std::vec::IntoIter<&str>| -> Result<f64, Error> {
            it.next()
                .ok_or_else(|| Error::InvalidMesh("unexpected end of mesh file".into()))?
                .parse()
                .map_err(|e| Error::InvalidMesh(format!("bad number: {e}")))
        };

        let mut it = {
            expect(&mut it, "nodes")?;
            it
        };
        let n = take_usize(&mut it)?;
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            nodes.push([take_f64(&mut it)?, take_f64(&mut it)?]);
        }
        expect(&mut it, "tris")?;
        let m = take_usize(&mut it)?;
        let mut triangles = Vec::with_capacity(m);
        for _ in 0..m {
            triangles.push([take_usize(&mut it)?, take_usize(&mut it)?, take_usize(&mut it)?]);
        }
        expect(&mut it, "bedges")?;
        let k = take_usize(&mut it)?;
        let mut boundary_edges = Vec::with_capacity(k);
        for _ in 0..k {
            boundary_edges.push([take_usize(&mut it)?, take_usize(&mut it)?]);
        }
        TriMesh { nodes, triangles, boundary_edges }.validated()
    }

    /// Structured mesh of the rectangle `(0,a) x (0,b)` with target element
    /// size `h` (two right triangles per cell).
    pub fn structured_rectangle(a: f64, b: f64, h: f64) -> Result<Self, Error> {
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::NonPositiveDimension { name: "rectangle side", value: a.min(b) });
        }
        if h <= 0.0 {
            return Err(Error::NonPositiveDimension { name: "mesh size h", value: h });
        }
        let nx = (a / h).ceil().max(1.0) as usize;
        let ny = (b / h).ceil().max(1.0) as usize;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([a * i as f64 / nx as f64, b * j as f64 / ny as f64]);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mut boundary_edges = Vec::new();
        for i in 0..nx {
            boundary_edges.push([id(i, 0), id(i + 1, 0)]);
            boundary_edges.push([id(i + 1, ny), id(i, ny)]);
        }
        for j in 0..ny {
            boundary_edges.push([id(nx, j), id(nx, j + 1)]);
            boundary_edges.push([id(0, j + 1), id(0, j)]);
        }
        TriMesh { nodes, triangles, boundary_edges }.validated()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_rectangle_is_valid() {
        let mesh = TriMesh::structured_rectangle(1.0, 1.0, 0.25).unwrap();
        assert_eq!(mesh.nodes.len(), 25);
        assert_eq!(mesh.triangles.len(), 32);
        assert!((mesh.area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn parse_round_trip() {
        let text = "
# a single square split in two
nodes 4
0 0
1 0   # lower right
1 1
0 1
tris 2
0 1 2
0 2 3
bedges 4
0 1
1 2
2 3
3 0
";
        let mesh = TriMesh::parse(text).unwrap();
        assert_eq!(mesh.nodes.len(), 4);
        assert!((mesh.area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mesh_with_hole_is_rejected() {
        // square ring: outer square of 8 triangles minus inner square
        // build a 3x3 grid of nodes, omit the centre cell's coverage by
        // carving out the middle: simplest is two concentric square loops
        let mut nodes = Vec::new();
        for j in 0..4 {
            for i in 0..4 {
                nodes.push([i as f64, j as f64]);
            }
        }
        let id = |i: usize, j: usize| j * 4 + i;
        let mut triangles = Vec::new();
        for j in 0..3 {
            for i in 0..3 {
                if i == 1 && j == 1 {
                    continue; // the hole
                }
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        // boundary: outer loop + hole loop
        let mut boundary_edges = Vec::new();
        for i in 0..3 {
            boundary_edges.push([id(i, 0), id(i + 1, 0)]);
            boundary_edges.push([id(i + 1, 3), id(i, 3)]);
        }
        for j in 0..3 {
            boundary_edges.push([id(3, j), id(3, j + 1)]);
            boundary_edges.push([id(0, j + 1), id(0, j)]);
        }
        boundary_edges.extend_from_slice(&[
            [id(1, 1), id(2, 1)],
            [id(2, 1), id(2, 2)],
            [id(2, 2), id(1, 2)],
            [id(1, 2), id(1, 1)],
        ]);
        let res = TriMesh { nodes, triangles, boundary_edges }.validated();
        match res {
            Err(Error::MultiplyConnected { loops }) => assert_eq!(loops, 2),
            other => panic!("expected MultiplyConnected, got {other:?}"),
        }
    }

    #[test]
    fn flipped_triangle_is_rejected() {
        let text = "nodes 3\n0 0\n1 0\n0 1\ntris 1\n0 2 1\nbedges 3\n0 1\n1 2\n2 0\n";
        assert!(matches!(TriMesh::parse(text), Err(Error::InvalidMesh(_))));
    }
}
