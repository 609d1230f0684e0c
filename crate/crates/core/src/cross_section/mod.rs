//! Cross-section domains and their scalar Helmholtz eigenpairs.
//!
//! Everything downstream (pencils, waves, scattering) reduces to the
//! Dirichlet and Neumann eigenproblems
//!
//! ```text
//! -Delta u = mu u  in Omega,      u = 0  or  du/dnu = 0  on the boundary,
//! ```
//!
//! solved in closed form on rectangles and discs, or by P1 finite elements
//! on a triangle mesh.

mod analytic;
pub mod fem;
pub mod mesh;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub use analytic::{DiscMode, Parity, RectMode};
pub use fem::FemSpace;
pub use mesh::TriMesh;

use crate::error::Error;
use crate::numerics::eig::EigOptions;
use crate::numerics::quadrature::{gauss_legendre_on, TriRule};
use crate::Result;

/// Boundary condition of a scalar Helmholtz problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Dirichlet => write!(f, "dirichlet"),
            BoundaryCondition::Neumann => write!(f, "neumann"),
        }
    }
}

/// Value, gradient and (symmetric) Hessian of a scalar field at a point.
#[derive(Debug, Clone, Copy, Default)]
pub struct FieldSample {
    pub value: f64,
    pub grad: [f64; 2],
    /// `(d_xx, d_xy, d_yy)`; the mixed entry is stored once, so evaluated
    /// cross derivatives are symmetric by construction.
    pub hessian: [f64; 3],
}

impl FieldSample {
    pub fn laplacian(&self) -> f64 {
        self.hessian[0] + self.hessian[2]
    }
}

/// Geometry kinds supported by [`CrossSection`].
#[derive(Debug, Clone)]
pub enum SectionKind {
    Rectangle { a: f64, b: f64 },
    Disc { radius: f64 },
    Mesh(Arc<TriMesh>),
}

/// Eigenproblem backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Analytic,
    Fem,
}

/// Descriptor consumed by [`make_cross_section`].
#[derive(Debug, Clone)]
pub enum GeometryDescriptor {
    Rectangle { a: f64, b: f64 },
    Disc { radius: f64 },
    /// Rectangle solved with P1 elements on a structured mesh of size `h`.
    RectangleFem { a: f64, b: f64, h: f64 },
    Mesh(TriMesh),
}

/// Build a validated cross-section from a geometry descriptor. The analytic
/// backend is selected automatically for rectangles and discs.
pub fn make_cross_section(descriptor: GeometryDescriptor) -> Result<CrossSection> {
    match descriptor {
        GeometryDescriptor::Rectangle { a, b } => CrossSection::rectangle(a, b),
        GeometryDescriptor::Disc { radius } => CrossSection::disc(radius),
        GeometryDescriptor::RectangleFem { a, b, h } => CrossSection::rectangle_fem(a, b, h),
        GeometryDescriptor::Mesh(m) => CrossSection::from_mesh(m),
    }
}

/// A bounded 2D cross-section with an eigensolver backend.
///
/// Immutable after construction; the per-(bc, cutoff) spectrum cache behind
/// a mutex is observationally pure.
pub struct CrossSection {
    kind: SectionKind,
    backend: Backend,
    fem_h: Option<f64>,
    eig_options: EigOptions,
    space: OnceLock<Arc<FemSpace>>,
    cache: Mutex<HashMap<(BoundaryCondition, u64), Arc<Vec<Arc<ScalarEigenpair>>>>>,
}

impl std::fmt::Debug for CrossSection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CrossSection")
            .field("kind", &self.kind)
            .field("backend", &self.backend)
            .field("fem_h", &self.fem_h)
            .finish()
    }
}

impl Clone for CrossSection {
    fn clone(&self) -> Self {
        let space = OnceLock::new();
        if let Some(s) = self.space.get() {
            let _ = space.set(s.clone());
        }
        CrossSection {
            kind: self.kind.clone(),
            backend: self.backend,
            fem_h: self.fem_h,
            eig_options: self.eig_options,
            space,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl CrossSection {
    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        if a <= 0.0 {
            return Err(Error::NonPositiveDimension { name: "a", value: a });
        }
        if b <= 0.0 {
            return Err(Error::NonPositiveDimension { name: "b", value: b });
        }
        Ok(Self::with(SectionKind::Rectangle { a, b }, Backend::Analytic, None))
    }

    pub fn disc(radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::NonPositiveDimension { name: "R", value: radius });
        }
        Ok(Self::with(SectionKind::Disc { radius }, Backend::Analytic, None))
    }

    pub fn rectangle_fem(a: f64, b: f64, h: f64) -> Result<Self> {
        if a <= 0.0 {
            return Err(Error::NonPositiveDimension { name: "a", value: a });
        }
        if b <= 0.0 {
            return Err(Error::NonPositiveDimension { name: "b", value: b });
        }
        if h <= 0.0 {
            return Err(Error::NonPositiveDimension { name: "h", value: h });
        }
        Ok(Self::with(SectionKind::Rectangle { a, b }, Backend::Fem, Some(h)))
    }

    pub fn from_mesh(mesh: TriMesh) -> Result<Self> {
        let mesh = mesh.validated()?;
        Ok(Self::with(SectionKind::Mesh(Arc::new(mesh)), Backend::Fem, None))
    }

    fn with(kind: SectionKind, backend: Backend, fem_h: Option<f64>) -> Self {
        CrossSection {
            kind,
            backend,
            fem_h,
            eig_options: EigOptions::default(),
            space: OnceLock::new(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn kind(&self) -> &SectionKind {
        &self.kind
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn area(&self) -> f64 {
        match &self.kind {
            SectionKind::Rectangle { a, b } => a * b,
            SectionKind::Disc { radius } => std::f64::consts::PI * radius * radius,
            SectionKind::Mesh(m) => m.area(),
        }
    }

    pub fn centroid(&self) -> [f64; 2] {
        match &self.kind {
            SectionKind::Rectangle { a, b } => [0.5 * a, 0.5 * b],
            SectionKind::Disc { .. } => [0.0, 0.0],
            SectionKind::Mesh(m) => {
                let mut c = [0.0, 0.0];
                for p in &m.nodes {
                    c[0] += p[0];
                    c[1] += p[1];
                }
                [c[0] / m.nodes.len() as f64, c[1] / m.nodes.len() as f64]
            }
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let eps = 1e-12;
        match &self.kind {
            SectionKind::Rectangle { a, b } => {
                p[0] >= -eps && p[0] <= a + eps && p[1] >= -eps && p[1] <= b + eps
            }
            SectionKind::Disc { radius } => p[0].hypot(p[1]) <= radius + eps,
            SectionKind::Mesh(_) => self.fem_space().locate(p).is_some(),
        }
    }

    /// The FEM space backing this cross-section (built on first use).
    pub fn fem_space(&self) -> Arc<FemSpace> {
        self.space
            .get_or_init(|| {
                let mesh = match &self.kind {
                    SectionKind::Mesh(m) => m.clone(),
                    SectionKind::Rectangle { a, b } => {
                        let h = self.fem_h.unwrap_or(0.05);
                        Arc::new(
                            TriMesh::structured_rectangle(*a, *b, h)
                                .expect("validated rectangle meshes"),
                        )
                    }
                    SectionKind::Disc { .. } => {
                        unreachable!("disc has no FEM backend; constructors forbid it")
                    }
                };
                Arc::new(FemSpace::new(mesh))
            })
            .clone()
    }

    /// All eigenpairs with `mu <= cutoff`, ascending, repeated by
    /// multiplicity, eigenfunctions L2-orthonormal. The Neumann list starts
    /// with the exact constant mode `1 / sqrt(|Omega|)`.
    pub fn helmholtz_eigs(
        &self,
        bc: BoundaryCondition,
        cutoff: f64,
    ) -> Result<Arc<Vec<Arc<ScalarEigenpair>>>> {
        if cutoff <= 0.0 {
            return Err(Error::InvalidCutoff(cutoff));
        }
        let key = (bc, cutoff.to_bits());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let pairs = Arc::new(self.compute_eigs(bc, cutoff)?);
        self.cache.lock().unwrap().insert(key, pairs.clone());
        Ok(pairs)
    }

    fn compute_eigs(
        &self,
        bc: BoundaryCondition,
        cutoff: f64,
    ) -> Result<Vec<Arc<ScalarEigenpair>>> {
        let shape = self.shape();
        let mut out: Vec<Arc<ScalarEigenpair>> = Vec::new();
        if bc == BoundaryCondition::Neumann {
            out.push(Arc::new(ScalarEigenpair {
                bc,
                mu: 0.0,
                shape: shape.clone(),
                repr: ModeRepr::Const { value: 1.0 / self.area().sqrt() },
            }));
        }
        match (self.backend, &self.kind) {
            (Backend::Analytic, SectionKind::Rectangle { a, b }) => {
                for (_, m, n) in analytic::rect_spectrum(*a, *b, bc, cutoff) {
                    let mode = RectMode { a: *a, b: *b, m, n, bc };
                    out.push(Arc::new(ScalarEigenpair {
                        bc,
                        mu: mode.mu(),
                        shape: shape.clone(),
                        repr: ModeRepr::Rect(mode),
                    }));
                }
            }
            (Backend::Analytic, SectionKind::Disc { radius }) => {
                for (_, n, parity, zero) in analytic::disc_spectrum(*radius, bc, cutoff) {
                    let mode = DiscMode::new(*radius, n, parity, zero, bc);
                    out.push(Arc::new(ScalarEigenpair {
                        bc,
                        mu: mode.mu(),
                        shape: shape.clone(),
                        repr: ModeRepr::Disc(mode),
                    }));
                }
            }
            (Backend::Analytic, SectionKind::Mesh(_)) => {
                return Err(Error::BackendUnavailable { backend: "analytic" });
            }
            (Backend::Fem, _) => {
                let space = self.fem_space();
                for (mu, coeffs) in space.solve(bc, cutoff, &self.eig_options)? {
                    out.push(Arc::new(ScalarEigenpair {
                        bc,
                        mu,
                        shape: shape.clone(),
                        repr: ModeRepr::Fem {
                            coeffs: Arc::new(coeffs),
                            second: OnceLock::new(),
                        },
                    }));
                }
            }
        }
        Ok(out)
    }

    fn shape(&self) -> Shape {
        match (&self.kind, self.backend) {
            (SectionKind::Rectangle { a, b }, Backend::Analytic) => Shape::Rect { a: *a, b: *b },
            (SectionKind::Disc { radius }, Backend::Analytic) => Shape::Disc { radius: *radius },
            _ => Shape::Mesh(self.fem_space()),
        }
    }

    /// Interior quadrature points and weights; `order` points per direction
    /// (tensor Gauss-Legendre) for analytic backends, a per-triangle rule
    /// (exact for P1 products) on FEM backends.
    pub fn interior_quadrature(&self, order: usize) -> Vec<([f64; 2], f64)> {
        if self.backend == Backend::Fem {
            let mesh = self.fem_space().mesh.clone();
            return mesh_interior_quadrature(&mesh, order);
        }
        match (&self.kind, self.backend) {
            (SectionKind::Rectangle { a, b }, _) => {
                let gx = gauss_legendre_on(order, 0.0, *a);
                let gy = gauss_legendre_on(order, 0.0, *b);
                let mut out = Vec::with_capacity(order * order);
                for &(x, wx) in &gx {
                    for &(y, wy) in &gy {
                        out.push(([x, y], wx * wy));
                    }
                }
                out
            }
            (SectionKind::Disc { radius }, _) => {
                let gr = gauss_legendre_on(order, 0.0, *radius);
                let na = (2 * order).max(8);
                let wt = 2.0 * std::f64::consts::PI / na as f64;
                let mut out = Vec::with_capacity(order * na);
                for &(r, wr) in &gr {
                    for k in 0..na {
                        let th = wt * (k as f64 + 0.5);
                        out.push(([r * th.cos(), r * th.sin()], wr * r * wt));
                    }
                }
                out
            }
            (SectionKind::Mesh(m), _) => mesh_interior_quadrature(m, order),
        }
    }

    /// Boundary quadrature with outward normals.
    pub fn boundary_quadrature(&self, order: usize) -> Vec<BoundaryPoint> {
        if self.backend == Backend::Fem {
            let mesh = self.fem_space().mesh.clone();
            return mesh_boundary_quadrature(&mesh, order);
        }
        match &self.kind {
            SectionKind::Rectangle { a, b } => {
                let mut out = Vec::new();
                for (p0, p1, normal) in rect_edges(*a, *b) {
                    for (t, w) in gauss_legendre_on(order, 0.0, 1.0) {
                        let len = ((p1[0] - p0[0]).powi(2) + (p1[1] - p0[1]).powi(2)).sqrt();
                        out.push(BoundaryPoint {
                            point: [
                                p0[0] + t * (p1[0] - p0[0]),
                                p0[1] + t * (p1[1] - p0[1]),
                            ],
                            weight: w * len,
                            normal,
                        });
                    }
                }
                out
            }
            SectionKind::Disc { radius } => {
                let n = (8 * order).max(32);
                let wt = 2.0 * std::f64::consts::PI * radius / n as f64;
                (0..n)
                    .map(|k| {
                        let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
                        BoundaryPoint {
                            point: [radius * th.cos(), radius * th.sin()],
                            weight: wt,
                            normal: [th.cos(), th.sin()],
                        }
                    })
                    .collect()
            }
            SectionKind::Mesh(m) => mesh_boundary_quadrature(m, order),
        }
    }

    /// `count` roughly equally spaced boundary sample points with normals.
    pub fn boundary_samples(&self, count: usize) -> Vec<BoundaryPoint> {
        match &self.kind {
            SectionKind::Rectangle { a, b } => {
                let perim = 2.0 * (a + b);
                (0..count)
                    .map(|i| {
                        let s = perim * (i as f64 + 0.5) / count as f64;
                        rect_point_at_arclength(*a, *b, s)
                    })
                    .collect()
            }
            SectionKind::Disc { radius } => (0..count)
                .map(|i| {
                    let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / count as f64;
                    BoundaryPoint {
                        point: [radius * th.cos(), radius * th.sin()],
                        weight: 1.0,
                        normal: [th.cos(), th.sin()],
                    }
                })
                .collect(),
            SectionKind::Mesh(m) => {
                let total: f64 = m
                    .boundary_edges
                    .iter()
                    .map(|e| {
                        let (p0, p1) = (m.nodes[e[0]], m.nodes[e[1]]);
                        (p1[0] - p0[0]).hypot(p1[1] - p0[1])
                    })
                    .sum();
                let mut out = Vec::with_capacity(count);
                let mut target = 0.5 * total / count as f64;
                let step = total / count as f64;
                let mut acc = 0.0;
                for e in &m.boundary_edges {
                    let (p0, p1) = (m.nodes[e[0]], m.nodes[e[1]]);
                    let d = [p1[0] - p0[0], p1[1] - p0[1]];
                    let len = d[0].hypot(d[1]);
                    let normal = [d[1] / len, -d[0] / len];
                    while target <= acc + len && out.len() < count {
                        let t = (target - acc) / len;
                        out.push(BoundaryPoint {
                            point: [p0[0] + t * d[0], p0[1] + t * d[1]],
                            weight: 1.0,
                            normal,
                        });
                        target += step;
                    }
                    acc += len;
                }
                out
            }
        }
    }

    /// Candidate reference points for deterministic phase fixing: the
    /// centroid for analytic backends, the lowest-index interior node for
    /// FEM, then interior quadrature points as fallbacks.
    pub fn reference_points(&self) -> Vec<[f64; 2]> {
        let mut pts = Vec::new();
        match (self.backend, &self.kind) {
            (Backend::Fem, _) => {
                let space = self.fem_space();
                if let Some(first_interior) =
                    (0..space.mesh.nodes.len()).find(|&v| !space.is_boundary[v])
                {
                    pts.push(space.mesh.nodes[first_interior]);
                }
                pts.push(self.centroid());
            }
            _ => pts.push(self.centroid()),
        }
        pts.extend(self.interior_quadrature(6).into_iter().map(|(p, _)| p));
        pts
    }
}

/// A boundary point with quadrature weight and outward unit normal.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub point: [f64; 2],
    pub weight: f64,
    pub normal: [f64; 2],
}

fn mesh_interior_quadrature(m: &TriMesh, order: usize) -> Vec<([f64; 2], f64)> {
    let rule = if order <= 2 { TriRule::Midpoint3 } else { TriRule::Gauss7 };
    let pts = rule.points();
    let mut out = Vec::with_capacity(m.triangles.len() * pts.len());
    for &tri in &m.triangles {
        let [p0, p1, p2] = tri.map(|v| m.nodes[v]);
        let area = m.signed_area(tri);
        for (bary, w) in &pts {
            let x = bary[0] * p0[0] + bary[1] * p1[0] + bary[2] * p2[0];
            let y = bary[0] * p0[1] + bary[1] * p1[1] + bary[2] * p2[1];
            out.push(([x, y], w * area));
        }
    }
    out
}

fn mesh_boundary_quadrature(m: &TriMesh, order: usize) -> Vec<BoundaryPoint> {
    let mut out = Vec::new();
    for e in &m.boundary_edges {
        let (p0, p1) = (m.nodes[e[0]], m.nodes[e[1]]);
        let d = [p1[0] - p0[0], p1[1] - p0[1]];
        let len = d[0].hypot(d[1]);
        let normal = [d[1] / len, -d[0] / len];
        for (t, w) in gauss_legendre_on(order.clamp(2, 4), 0.0, 1.0) {
            out.push(BoundaryPoint {
                point: [p0[0] + t * d[0], p0[1] + t * d[1]],
                weight: w * len,
                normal,
            });
        }
    }
    out
}

fn rect_edges(a: f64, b: f64) -> [([f64; 2], [f64; 2], [f64; 2]); 4] {
    [
        ([0.0, 0.0], [a, 0.0], [0.0, -1.0]),
        ([a, 0.0], [a, b], [1.0, 0.0]),
        ([a, b], [0.0, b], [0.0, 1.0]),
        ([0.0, b], [0.0, 0.0], [-1.0, 0.0]),
    ]
}

fn rect_point_at_arclength(a: f64, b: f64, s: f64) -> BoundaryPoint {
    let mut s = s % (2.0 * (a + b));
    for (p0, p1, normal) in rect_edges(a, b) {
        let len = (p1[0] - p0[0]).hypot(p1[1] - p0[1]);
        if s <= len {
            let t = s / len;
            return BoundaryPoint {
                point: [p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])],
                weight: 1.0,
                normal,
            };
        }
        s -= len;
    }
    BoundaryPoint { point: [0.0, 0.0], weight: 1.0, normal: [-1.0, 0.0] }
}

/// One `(mu, u)` solution of the scalar Helmholtz problem; `u` is
/// L2-normalised over the cross-section.
pub struct ScalarEigenpair {
    bc: BoundaryCondition,
    mu: f64,
    shape: Shape,
    repr: ModeRepr,
}

#[derive(Clone)]
enum Shape {
    Rect { a: f64, b: f64 },
    Disc { radius: f64 },
    Mesh(Arc<FemSpace>),
}

enum ModeRepr {
    Rect(RectMode),
    Disc(DiscMode),
    Const { value: f64 },
    Fem { coeffs: Arc<Vec<f64>>, second: OnceLock<FemSecond> },
}

/// Recovered second-derivative data for a FEM eigenfunction.
struct FemSecond {
    /// Nodal discrete Laplacian (`M z = -K u`).
    lap: Vec<f64>,
    /// Per-triangle recovered Hessian `(h11, h12, h22)` before trace
    /// correction.
    h_tri: Vec<[f64; 3]>,
}

impl std::fmt::Debug for ScalarEigenpair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarEigenpair")
            .field("bc", &self.bc)
            .field("mu", &self.mu)
            .finish()
    }
}

impl ScalarEigenpair {
    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.repr, ModeRepr::Const { .. })
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let eps = 1e-12;
        match &self.shape {
            Shape::Rect { a, b } => {
                p[0] >= -eps && p[0] <= a + eps && p[1] >= -eps && p[1] <= b + eps
            }
            Shape::Disc { radius } => p[0].hypot(p[1]) <= radius + eps,
            Shape::Mesh(space) => space.locate(p).is_some(),
        }
    }

    /// Value, gradient and Hessian at `p` (assumed inside the domain).
    ///
    /// FEM: P1 value, piecewise-constant gradient, and a recovered Hessian
    /// whose trace is corrected to the discrete Laplacian so that pencil
    /// residuals see the accuracy of the eigensolve rather than the O(h)
    /// recovery error.
    pub fn sample(&self, p: [f64; 2]) -> FieldSample {
        match &self.repr {
            ModeRepr::Rect(mode) => mode.sample(p),
            ModeRepr::Disc(mode) => mode.sample(p),
            ModeRepr::Const { value } => FieldSample { value: *value, ..Default::default() },
            ModeRepr::Fem { coeffs, second } => {
                let space = match &self.shape {
                    Shape::Mesh(s) => s,
                    _ => unreachable!("FEM repr always carries a mesh shape"),
                };
                let (tri, bary) = match space.locate(p) {
                    Some(hit) => hit,
                    None => return FieldSample::default(),
                };
                let sec = second.get_or_init(|| self.build_second(space, coeffs));
                let value = space.value_at(coeffs, tri, bary);
                let grad = space.element_gradient(tri, coeffs);
                let lap = space.value_at(&sec.lap, tri, bary);
                let h = sec.h_tri[tri];
                let shift = 0.5 * (lap - h[0] - h[2]);
                FieldSample {
                    value,
                    grad,
                    hessian: [h[0] + shift, h[1], h[2] + shift],
                }
            }
        }
    }

    fn build_second(&self, space: &Arc<FemSpace>, coeffs: &Arc<Vec<f64>>) -> FemSecond {
        let lap = space.discrete_laplacian(self.bc, coeffs);
        let (g1, g2) = space.recovered_gradient(coeffs);
        let h_tri = (0..space.mesh.triangles.len())
            .map(|t| {
                let d1 = space.element_gradient(t, &g1);
                let d2 = space.element_gradient(t, &g2);
                [d1[0], 0.5 * (d1[1] + d2[0]), d2[1]]
            })
            .collect();
        FemSecond { lap, h_tri }
    }
}

/// Values and gradients of an eigenfunction at the given points.
///
/// Errors if any point lies outside the closure of the domain.
pub fn eval_field(
    pair: &ScalarEigenpair,
    points: &[[f64; 2]],
) -> Result<Vec<(f64, [f64; 2])>> {
    let mut out = Vec::with_capacity(points.len());
    for &p in points {
        if !pair.contains(p) {
            return Err(Error::PointOutsideDomain(p[0], p[1]));
        }
        let s = pair.sample(p);
        out.push((s.value, s.grad));
    }
    Ok(out)
}
