//! P1 finite-element backend: assembly, generalized eigensolve, point
//! evaluation and recovered second derivatives.
//!
//! Dirichlet conditions are imposed by eliminating boundary rows and
//! columns, Neumann is natural; both keep the pencil symmetric
//! positive-(semi)definite. The mass matrix uses the 3-point edge-midpoint
//! rule, which integrates P1 products exactly.

use std::sync::{Arc, OnceLock};

use super::mesh::TriMesh;
use super::BoundaryCondition;
use crate::error::Error;
use crate::numerics::eig::{lowest_generalized, EigOptions};
use crate::numerics::quadrature::TriRule;
use crate::numerics::sparse::{reverse_cuthill_mckee, BandedCholesky, Csr, Triplets};

/// Mesh plus assembled operators and a point locator; shared by all
/// eigenpairs computed on it.
#[derive(Debug)]
pub struct FemSpace {
    pub mesh: Arc<TriMesh>,
    pub is_boundary: Vec<bool>,
    locator: BucketGrid,
    /// Per-triangle gradients of the three barycentric basis functions.
    tri_grads: Vec<[[f64; 2]; 3]>,
    tri_areas: Vec<f64>,
    full: DofSystem,
    interior: DofSystem,
    mass_chol_full: OnceLock<BandedCholesky>,
    mass_chol_interior: OnceLock<BandedCholesky>,
}

/// Stiffness/mass pair over a subset of nodes, relabelled by RCM.
#[derive(Debug)]
struct DofSystem {
    /// `dofs[permuted] = original node id`
    dofs: Vec<usize>,
    /// `slot[node] = Some(permuted index)`
    #[allow(dead_code)]
    slot: Vec<Option<usize>>,
    k: Csr,
    m: Csr,
}

impl FemSpace {
    pub fn new(mesh: Arc<TriMesh>) -> Self {
        let n = mesh.nodes.len();
        let mut is_boundary = vec![false; n];
        for v in mesh.boundary_nodes() {
            is_boundary[v] = true;
        }
        let mut tri_grads = Vec::with_capacity(mesh.triangles.len());
        let mut tri_areas = Vec::with_capacity(mesh.triangles.len());
        for &tri in &mesh.triangles {
            let [p0, p1, p2] = tri.map(|v| mesh.nodes[v]);
            let area = mesh.signed_area(tri);
            let inv2a = 1.0 / (2.0 * area);
            tri_grads.push([
                [(p1[1] - p2[1]) * inv2a, (p2[0] - p1[0]) * inv2a],
                [(p2[1] - p0[1]) * inv2a, (p0[0] - p2[0]) * inv2a],
                [(p0[1] - p1[1]) * inv2a, (p1[0] - p0[0]) * inv2a],
            ]);
            tri_areas.push(area);
        }
        let full = assemble(&mesh, &tri_grads, &tri_areas, |_| true);
        let interior = assemble(&mesh, &tri_grads, &tri_areas, |v| !is_boundary[v]);
        let locator = BucketGrid::new(&mesh);
        FemSpace {
            mesh,
            is_boundary,
            locator,
            tri_grads,
            tri_areas,
            full,
            interior,
            mass_chol_full: OnceLock::new(),
            mass_chol_interior: OnceLock::new(),
        }
    }

    fn system(&self, bc: BoundaryCondition) -> &DofSystem {
        match bc {
            BoundaryCondition::Dirichlet => &self.interior,
            BoundaryCondition::Neumann => &self.full,
        }
    }

    /// All eigenpairs with `mu <= cutoff` as full nodal vectors
    /// (zeros on the boundary for Dirichlet), ascending and deterministic.
    pub fn solve(
        &self,
        bc: BoundaryCondition,
        cutoff: f64,
        opts: &EigOptions,
    ) -> Result<Vec<(f64, Vec<f64>)>, Error> {
        let sys = self.system(bc);
        if sys.dofs.is_empty() {
            return Ok(Vec::new());
        }
        let pairs = lowest_generalized(&sys.k, &sys.m, cutoff, opts)?;
        let n = self.mesh.nodes.len();
        let mut out: Vec<(f64, Vec<f64>)> = pairs
            .into_iter()
            .map(|(mu, v)| {
                let mut full = vec![0.0; n];
                for (p, &node) in sys.dofs.iter().enumerate() {
                    full[node] = v[p];
                }
                (mu, full)
            })
            .collect();
        // Neumann: drop the numerically computed kernel; the exact constant
        // mode is represented separately by the caller.
        if bc == BoundaryCondition::Neumann {
            out.retain(|(mu, _)| *mu > 1e-8 * cutoff.max(1.0));
        }
        canonical_order(&mut out);
        Ok(out)
    }

    /// L2 Riesz representative of the weak Laplacian of `u` on the dof set
    /// of `bc`: solves `M z = -K u`. For a discrete eigenpair this is
    /// `-mu u` up to the solver residual.
    pub fn discrete_laplacian(&self, bc: BoundaryCondition, u: &[f64]) -> Vec<f64> {
        let sys = self.system(bc);
        let ud: Vec<f64> = sys.dofs.iter().map(|&v| u[v]).collect();
        let mut rhs = sys.k.matvec_alloc(&ud);
        for r in rhs.iter_mut() {
            *r = -*r;
        }
        let chol = match bc {
            BoundaryCondition::Dirichlet => self
                .mass_chol_interior
                .get_or_init(|| BandedCholesky::factor(&sys.m).expect("mass matrix is SPD")),
            BoundaryCondition::Neumann => self
                .mass_chol_full
                .get_or_init(|| BandedCholesky::factor(&sys.m).expect("mass matrix is SPD")),
        };
        chol.solve_in_place(&mut rhs);
        let mut z = vec![0.0; self.mesh.nodes.len()];
        for (p, &node) in sys.dofs.iter().enumerate() {
            z[node] = rhs[p];
        }
        z
    }

    /// Nodal gradient recovery: P1 fields `(g1, g2)` with `M g_j = (phi_i, d_j u)`.
    pub fn recovered_gradient(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let sys = &self.full;
        let n = self.mesh.nodes.len();
        let mut rhs1 = vec![0.0; n];
        let mut rhs2 = vec![0.0; n];
        for (t, &tri) in self.mesh.triangles.iter().enumerate() {
            let g = self.element_gradient(t, u);
            let w = self.tri_areas[t] / 3.0;
            for &v in &tri {
                rhs1[v] += w * g[0];
                rhs2[v] += w * g[1];
            }
        }
        let chol = self
            .mass_chol_full
            .get_or_init(|| BandedCholesky::factor(&sys.m).expect("mass matrix is SPD"));
        let mut p1: Vec<f64> = sys.dofs.iter().map(|&v| rhs1[v]).collect();
        let mut p2: Vec<f64> = sys.dofs.iter().map(|&v| rhs2[v]).collect();
        chol.solve_in_place(&mut p1);
        chol.solve_in_place(&mut p2);
        let mut g1 = vec![0.0; n];
        let mut g2 = vec![0.0; n];
        for (p, &node) in sys.dofs.iter().enumerate() {
            g1[node] = p1[p];
            g2[node] = p2[p];
        }
        (g1, g2)
    }

    /// Constant gradient of the P1 interpolant of `u` on triangle `t`.
    pub fn element_gradient(&self, t: usize, u: &[f64]) -> [f64; 2] {
        let tri = self.mesh.triangles[t];
        let g = &self.tri_grads[t];
        let mut out = [0.0; 2];
        for i in 0..3 {
            out[0] += u[tri[i]] * g[i][0];
            out[1] += u[tri[i]] * g[i][1];
        }
        out
    }

    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        self.locator.locate(&self.mesh, p)
    }

    pub fn value_at(&self, u: &[f64], tri: usize, bary: [f64; 3]) -> f64 {
        let t = self.mesh.triangles[tri];
        bary[0] * u[t[0]] + bary[1] * u[t[1]] + bary[2] * u[t[2]]
    }

    /// Residual `||K u - mu M u||_2 / ||K u||_2` on the dof set of `bc`.
    pub fn rayleigh_residual(&self, bc: BoundaryCondition, mu: f64, u: &[f64]) -> f64 {
        let sys = self.system(bc);
        let ud: Vec<f64> = sys.dofs.iter().map(|&v| u[v]).collect();
        let ku = sys.k.matvec_alloc(&ud);
        let mu_mu = sys.m.matvec_alloc(&ud);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..ud.len() {
            let r = ku[i] - mu * mu_mu[i];
            num += r * r;
            den += ku[i] * ku[i];
        }
        num.sqrt() / den.sqrt().max(1e-300)
    }
}

fn assemble(
    mesh: &TriMesh,
    tri_grads: &[[[f64; 2]; 3]],
    tri_areas: &[f64],
    keep: impl Fn(usize) -> bool,
) -> DofSystem {
    let n = mesh.nodes.len();
    let kept: Vec<usize> = (0..n).filter(|&v| keep(v)).collect();
    let mut tmp_slot = vec![None; n];
    for (i, &v) in kept.iter().enumerate() {
        tmp_slot[v] = Some(i);
    }
    // adjacency over kept nodes for RCM
    let mut adj = vec![Vec::new(); kept.len()];
    for tri in &mesh.triangles {
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    if let (Some(ia), Some(ib)) = (tmp_slot[tri[a]], tmp_slot[tri[b]]) {
                        adj[ia].push(ib);
                    }
                }
            }
        }
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    let perm = reverse_cuthill_mckee(&adj); // perm[new] = old kept-index
    let dofs: Vec<usize> = perm.iter().map(|&old| kept[old]).collect();
    let mut slot = vec![None; n];
    for (p, &node) in dofs.iter().enumerate() {
        slot[node] = Some(p);
    }

    let rule = TriRule::Midpoint3.points();
    let mut tk = Triplets::new(dofs.len());
    let mut tm = Triplets::new(dofs.len());
    for (t, &tri) in mesh.triangles.iter().enumerate() {
        let area = tri_areas[t];
        let g = &tri_grads[t];
        for a in 0..3 {
            let pa = match slot[tri[a]] {
                Some(p) => p,
                None => continue,
            };
            for b in 0..3 {
                let pb = match slot[tri[b]] {
                    Some(p) => p,
                    None => continue,
                };
                let kab = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                let mut mab = 0.0;
                for (bary, w) in &rule {
                    mab += area * w * bary[a] * bary[b];
                }
                tk.add(pa, pb, kab);
                tm.add(pa, pb, mab);
            }
        }
    }
    DofSystem { dofs, slot, k: tk.to_csr(), m: tm.to_csr() }
}

/// Deterministic eigenpair ordering: ascending mu; inside a degeneracy
/// cluster (relative gap below `tol::CLUSTER_GAP`) vectors are sign-fixed
/// and sorted by lexicographic comparison of their nodal values.
fn canonical_order(pairs: &mut [(f64, Vec<f64>)]) {
    for (_, v) in pairs.iter_mut() {
        sign_fix(v);
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i + 1;
        while j < pairs.len()
            && (pairs[j].0 - pairs[i].0).abs()
                <= crate::tol::CLUSTER_GAP * pairs[i].0.abs().max(1.0)
        {
            j += 1;
        }
        if j - i > 1 {
            pairs[i..j].sort_by(|a, b| lex_cmp(&a.1, &b.1));
        }
        i = j;
    }
}

fn sign_fix(v: &mut [f64]) {
    let scale = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if scale == 0.0 {
        return;
    }
    for &x in v.iter() {
        if x.abs() > 1e-6 * scale {
            if x < 0.0 {
                for y in v.iter_mut() {
                    *y = -*y;
                }
            }
            return;
        }
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-9 {
            return x.partial_cmp(y).unwrap();
        }
    }
    std::cmp::Ordering::Equal
}

/// Uniform-grid triangle locator.
#[derive(Debug)]
struct BucketGrid {
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl BucketGrid {
    fn new(mesh: &TriMesh) -> Self {
        let (mut xmin, mut ymin) = (f64::INFINITY, f64::INFINITY);
        let (mut xmax, mut ymax) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &mesh.nodes {
            xmin = xmin.min(p[0]);
            ymin = ymin.min(p[1]);
            xmax = xmax.max(p[0]);
            ymax = ymax.max(p[1]);
        }
        let m = (mesh.triangles.len() as f64).sqrt().ceil() as usize;
        let (nx, ny) = (m.max(1), m.max(1));
        let dx = ((xmax - xmin) / nx as f64).max(1e-300);
        let dy = ((ymax - ymin) / ny as f64).max(1e-300);
        let mut cells = vec![Vec::new(); nx * ny];
        for (t, &tri) in mesh.triangles.iter().enumerate() {
            let pts = tri.map(|v| mesh.nodes[v]);
            let txmin = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let txmax = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let tymin = pts.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
            let tymax = pts.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
            let i0 = (((txmin - xmin) / dx).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let i1 = (((txmax - xmin) / dx).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let j0 = (((tymin - ymin) / dy).floor() as isize).clamp(0, ny as isize - 1) as usize;
            let j1 = (((tymax - ymin) / dy).floor() as isize).clamp(0, ny as isize - 1) as usize;
            for j in j0..=j1 {
                for i in i0..=i1 {
                    cells[j * nx + i].push(t as u32);
                }
            }
        }
        BucketGrid { x0: xmin, y0: ymin, dx, dy, nx, ny, cells }
    }

    fn locate(&self, mesh: &TriMesh, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let i = (((p[0] - self.x0) / self.dx).floor() as isize).clamp(0, self.nx as isize - 1)
            as usize;
        let j = (((p[1] - self.y0) / self.dy).floor() as isize).clamp(0, self.ny as isize - 1)
            as usize;
        for &t in &self.cells[j * self.nx + i] {
            if let Some(b) = barycentric(mesh, t as usize, p) {
                return Some((t as usize, b));
            }
        }
        // points on cell borders can be missed by the fast path
        for t in 0..mesh.triangles.len() {
            if let Some(b) = barycentric(mesh, t, p) {
                return Some((t, b));
            }
        }
        None
    }
}

fn barycentric(mesh: &TriMesh, t: usize, p: [f64; 2]) -> Option<[f64; 3]> {
    let tri = mesh.triangles[t];
    let [p0, p1, p2] = tri.map(|v| mesh.nodes[v]);
    let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    let l1 = ((p[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p[1] - p0[1])) / det;
    let l2 = ((p1[0] - p0[0]) * (p[1] - p0[1]) - (p[0] - p0[0]) * (p1[1] - p0[1])) / det;
    let l0 = 1.0 - l1 - l2;
    let eps = -1e-10;
    if l0 >= eps && l1 >= eps && l2 >= eps {
        Some([l0.max(0.0), l1.max(0.0), l2.max(0.0)])
    } else {
        None
    }
}
