use crate::error::{Error, Result};
use crate::isoperim::superlevel_integrals;
use crate::manifold::{beta, cap_boundary, Domain, Mesh};
use crate::pspectral::{dirichlet_eigen, EigenResult, PExponent, ScalarField, SolverOptions};
use crate::rearrange::{radius_for, symmetrize_levels, threshold_grid, CHECK_LEVELS};
use crate::scalar::{norm, sub, Real};

/// Interior thresholds of the audit grid.
pub const AUDIT_THRESHOLDS: usize = 64;

const PROFILE_VERTICES_PER_LEVEL: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Both sides agree.
    Identity,
    /// Left side at least the right side.
    Inequality,
}

/// One step of the chain evaluated on every threshold of the grid.
#[derive(Debug, Clone)]
pub struct AuditStep<T> {
    pub name: &'static str,
    pub kind: StepKind,
    pub lhs: Vec<T>,
    pub rhs: Vec<T>,
    /// `(lhs - rhs) / lhs` at every threshold.
    pub relative: Vec<T>,
}

impl<T: Real> AuditStep<T> {
    fn new(name: &'static str, kind: StepKind, lhs: Vec<T>, rhs: Vec<T>) -> Self {
        let relative = lhs.iter().zip(&rhs).map(|(&l, &r)| (l - r) / l).collect();
        AuditStep { name, kind, lhs, rhs, relative }
    }

    /// Index and signed relative value of the worst threshold: the largest
    /// magnitude for identities, the most negative value for inequalities.
    pub fn worst(&self) -> (usize, T) {
        let key = |v: T| match self.kind {
            StepKind::Identity => v.abs(),
            StepKind::Inequality => -v,
        };
        let mut best = (0, self.relative[0]);
        for (i, &v) in self.relative.iter().enumerate() {
            if key(v) > key(best.1) {
                best = (i, v);
            }
        }
        best
    }

    /// Nonnegative size of the worst violation relative to the left side.
    pub fn violation(&self) -> T {
        let v = self.worst().1;
        match self.kind {
            StepKind::Identity => v.abs(),
            StepKind::Inequality => (-v).max(T::zero()),
        }
    }

    pub fn holds(&self, tol: T) -> bool {
        self.violation() <= tol
    }
}

/// Step-by-step evaluation of the symmetrization argument on one eigenfunction.
#[derive(Debug, Clone)]
pub struct ChainAudit<T> {
    pub p: T,
    pub beta: T,
    pub thresholds: Vec<T>,
    /// Distribution derivative, `L^p` chain, Holder bound, radial equality
    /// and integrated energy comparison, in that order.
    pub steps: Vec<AuditStep<T>>,
}

impl<T: Real> ChainAudit<T> {
    pub fn worst_violation(&self) -> T {
        self.steps.iter().map(AuditStep::violation).fold(T::zero(), T::max)
    }

    pub fn holds(&self, tol: T) -> bool {
        self.steps.iter().all(|s| s.holds(tol))
    }
}

// degree-5 rule on the reference triangle, weights summing to one
const TRI_RULE: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    ([0.059_715_871_789_770, 0.470_142_064_105_115, 0.470_142_064_105_115], 0.132_394_152_788_506),
    ([0.470_142_064_105_115, 0.059_715_871_789_770, 0.470_142_064_105_115], 0.132_394_152_788_506),
    ([0.470_142_064_105_115, 0.470_142_064_105_115, 0.059_715_871_789_770], 0.132_394_152_788_506),
    ([0.797_426_985_353_087, 0.101_286_507_323_456, 0.101_286_507_323_456], 0.125_939_180_544_827),
    ([0.101_286_507_323_456, 0.797_426_985_353_087, 0.101_286_507_323_456], 0.125_939_180_544_827),
    ([0.101_286_507_323_456, 0.101_286_507_323_456, 0.797_426_985_353_087], 0.125_939_180_544_827),
];

// 5-point Gauss-Legendre on [0, 1]
const SEG_RULE: [(f64, f64); 5] = [
    (0.5, 0.284_444_444_444_444_4),
    (0.230_765_344_947_158_5, 0.239_314_335_249_683_2),
    (0.769_234_655_052_841_5, 0.239_314_335_249_683_2),
    (0.046_910_077_030_668, 0.118_463_442_528_094_5),
    (0.953_089_922_969_332, 0.118_463_442_528_094_5),
];

/// `int_{u > t} u^p` over one cell of the vertex-linear interpolant, clipping
/// the cell to the superlevel set and integrating by quadrature.
fn cell_power_integral<T: Real>(vals: &[T], measure: T, t: T, p: T) -> T {
    if vals.len() == 2 {
        let (a, b) = (vals[0], vals[1]);
        let (s0, s1) = match (a > t, b > t) {
            (true, true) => (T::zero(), T::one()),
            (false, false) => return T::zero(),
            (true, false) => (T::zero(), (t - a) / (b - a)),
            (false, true) => ((t - a) / (b - a), T::one()),
        };
        let len = s1 - s0;
        return SEG_RULE
            .iter()
            .map(|&(x, w)| {
                let s = s0 + len * T::of(x);
                T::of(w) * (a + (b - a) * s).max(T::zero()).powf(p)
            })
            .sum::<T>()
            * len
            * measure;
    }
    // clipped polygon in barycentric coordinates, with the field value at each corner
    let mut poly: Vec<([T; 3], T)> = Vec::with_capacity(4);
    for i in 0..3 {
        let j = (i + 1) % 3;
        let mut ei = [T::zero(); 3];
        ei[i] = T::one();
        if vals[i] > t {
            poly.push((ei, vals[i]));
        }
        if (vals[i] > t) != (vals[j] > t) {
            let s = (t - vals[i]) / (vals[j] - vals[i]);
            let mut b = [T::zero(); 3];
            b[i] = T::one() - s;
            b[j] = s;
            poly.push((b, t));
        }
    }
    if poly.len() < 3 {
        return T::zero();
    }
    let mut total = T::zero();
    for k in 1..poly.len() - 1 {
        let (b0, u0) = poly[0];
        let (b1, u1) = poly[k];
        let (b2, u2) = poly[k + 1];
        let det = ((b1[0] - b0[0]) * (b2[1] - b0[1]) - (b1[1] - b0[1]) * (b2[0] - b0[0])).abs();
        let q: T = TRI_RULE
            .iter()
            .map(|&(l, w)| T::of(w) * (T::of(l[0]) * u0 + T::of(l[1]) * u1 + T::of(l[2]) * u2).max(T::zero()).powf(p))
            .sum();
        total = total + q * det;
    }
    total * measure
}

/// Per-threshold quantities read directly off the level sets.
struct LevelData<T> {
    /// `H^(n-1)({u = t})`.
    length: T,
    /// `int_{u = t} 1 / |grad u|`.
    inv_grad: T,
    /// `int_{u > t} u^p`.
    power: T,
}

fn level_data<T: Real>(mesh: &Mesh<T>, u: &[T], t: T, p: T) -> LevelData<T> {
    let x = mesh.vertices();
    let mut out = LevelData { length: T::zero(), inv_grad: T::zero(), power: T::zero() };
    let mut vals = [T::zero(); 3];
    for c in 0..mesh.cell_count() {
        let cell = mesh.cell(c);
        for (k, &v) in cell.iter().enumerate() {
            vals[k] = u[v];
        }
        let vals = &vals[..cell.len()];
        out.power = out.power + cell_power_integral(vals, mesh.cell_measure()[c], t, p);
        let mut pts = Vec::with_capacity(2);
        for i in 0..cell.len() {
            for j in i + 1..cell.len() {
                let (a, b) = (cell[i], cell[j]);
                if (u[a] > t) != (u[b] > t) {
                    let s = (t - u[a]) / (u[b] - u[a]);
                    let d = sub(&x[b], &x[a]);
                    pts.push([x[a][0] + s * d[0], x[a][1] + s * d[1], x[a][2] + s * d[2]]);
                }
            }
        }
        let len = match (cell.len(), pts.len()) {
            (2, 1) => T::one(),
            (3, 2) => norm(&sub(&pts[1], &pts[0])),
            _ => continue,
        };
        let g = norm(&mesh.cell_gradient(c, u));
        out.length = out.length + len;
        out.inv_grad = out.inv_grad + len / g;
    }
    out
}

/// Audits the chain of the symmetrization argument on a nonnegative field
/// vanishing outside its domain.
///
/// Thresholds are `max u * i / 65` for `i = 1..=64`. Derivatives of the
/// superlevel measure and energy are central differences of their exact
/// cumulatives on this grid. The steps are
///
/// 1. `-d/dt H^n(u > t) = int_{u = t} 1/|grad u|`,
/// 2. `int_{u > t} u^p = beta int_{B(r(t))} u_*^p`,
/// 3. `-d/dt int_{u > t} |grad u|^p >= H^(n-1)(u = t)^p / (-d/dt H^n(u > t))^(p-1)`,
/// 4. equality in the Holder bound on the level spheres of `u_*`,
/// 5. `int_{u > t} |grad u|^p >= beta int_{B(r(t))} |grad u_*|^p`,
///
/// where `B(r(t))` is the cap of measure `H^n(u > t) / beta`. The
/// symmetrized profile has one level per ten mesh vertices, and at least
/// [`CHECK_LEVELS`].
pub fn audit_field<T: Real>(field: &ScalarField<'_, T>, beta: T, p: PExponent<T>) -> Result<ChainAudit<T>> {
    let p = p.get();
    let mesh = field.mesh();
    let n = mesh.dimension();
    let u = field.values();
    if field.min() < T::zero() {
        return Err(Error::InvalidArgument("audited field must be nonnegative".into()));
    }
    if field.is_constant() {
        return Err(Error::ConstantField);
    }
    let top = field.max();
    let grid = threshold_grid(T::zero(), top, AUDIT_THRESHOLDS + 2);
    let h = grid[1] - grid[0];
    let cumulative = superlevel_integrals(field, &grid, p);
    // the profile's level spacing must keep up with the mesh for step 2 to converge
    let levels = CHECK_LEVELS.max(mesh.vertex_count() / PROFILE_VERTICES_PER_LEVEL);
    let profile = symmetrize_levels(field, beta, levels)?;

    let m = AUDIT_THRESHOLDS;
    let mut s1 = (Vec::with_capacity(m), Vec::with_capacity(m));
    let mut s2 = (Vec::with_capacity(m), Vec::with_capacity(m));
    let mut s3 = (Vec::with_capacity(m), Vec::with_capacity(m));
    let mut s4 = (Vec::with_capacity(m), Vec::with_capacity(m));
    let mut s5 = (Vec::with_capacity(m), Vec::with_capacity(m));
    let two = T::of(2.0);
    for i in 1..=m {
        let t = grid[i];
        let (area, energy) = cumulative[i];
        let d_area = (cumulative[i - 1].0 - cumulative[i + 1].0) / (two * h);
        let d_energy = (cumulative[i - 1].1 - cumulative[i + 1].1) / (two * h);
        let level = level_data(mesh, u, t, p);
        let r = radius_for(area, beta, n)?;

        s1.0.push(d_area);
        s1.1.push(level.inv_grad);

        s2.0.push(level.power);
        s2.1.push(beta * profile.lp_integral_within(r, p));

        s3.0.push(d_energy);
        s3.1.push(level.length.powf(p) / d_area.powf(p - T::one()));

        let sphere = cap_boundary(r, n)?;
        let slope = profile.slope_at(r);
        s4.0.push(sphere);
        s4.1.push(if slope > T::zero() {
            let a = sphere * slope.powf(p - T::one());
            let b = sphere / slope;
            a.powf(T::one() / p) * b.powf((p - T::one()) / p)
        } else {
            sphere
        });

        s5.0.push(energy);
        s5.1.push(beta * profile.energy_within(r, p));
    }
    Ok(ChainAudit {
        p,
        beta,
        thresholds: grid[1..=m].to_vec(),
        steps: vec![
            AuditStep::new("distribution derivative", StepKind::Identity, s1.0, s1.1),
            AuditStep::new("L^p equimeasurability", StepKind::Identity, s2.0, s2.1),
            AuditStep::new("Holder bound", StepKind::Inequality, s3.0, s3.1),
            AuditStep::new("radial Holder equality", StepKind::Identity, s4.0, s4.1),
            AuditStep::new("energy comparison", StepKind::Inequality, s5.0, s5.1),
        ],
    })
}

/// Audits an already computed Dirichlet eigenfunction; non-converged solves are rejected.
pub fn audit_eigenfunction<T: Real>(eig: &EigenResult<'_, T>, p: PExponent<T>) -> Result<ChainAudit<T>> {
    if !eig.converged {
        return Err(Error::NonConvergence { iterations: eig.iterations, residual: eig.residual.as_f64() });
    }
    audit_field(&eig.field, beta(eig.field.mesh())?, p)
}

/// Solves the Dirichlet problem on `domain` and audits its first eigenfunction.
pub fn lemma_chain_audit<T: Real>(
    domain: &Domain<'_, T>,
    p: PExponent<T>,
    opts: &SolverOptions<T>,
) -> Result<ChainAudit<T>> {
    let eig = dirichlet_eigen(domain, p, opts)?;
    audit_eigenfunction(&eig, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::build_icosphere;

    #[test]
    fn clipped_quadrature_is_exact_for_linear_powers() {
        // u^1 and u^2 are polynomials of degree at most 5 on each piece
        let vals = [0.2f64, 1.0, 0.6];
        for (p, t) in [(1.0, 0.0), (2.0, 0.0), (1.0, 0.5), (2.0, 0.5)] {
            let q = cell_power_integral(&vals, 1.0, t, p);
            // reference: dense barycentric midpoint sum
            let n = 800;
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n - i {
                    for (a, b) in [((i as f64 + 1.0 / 3.0), (j as f64 + 1.0 / 3.0)), ((i as f64 + 2.0 / 3.0), (j as f64 + 2.0 / 3.0))] {
                        let (l1, l2) = (a / n as f64, b / n as f64);
                        if l1 + l2 >= 1.0 {
                            continue;
                        }
                        let v = vals[0] * (1.0 - l1 - l2) + vals[1] * l1 + vals[2] * l2;
                        if v > t {
                            s += v.powf(p);
                        }
                    }
                }
            }
            let reference = s / (n * n) as f64;
            assert!((q - reference).abs() < 2e-3 * reference, "{p} {t} {q} {reference}");
        }
        assert_eq!(cell_power_integral(&vals, 1.0, 1.5, 2.0), 0.0);
    }

    #[test]
    fn full_cell_matches_closed_form() {
        // int_T u^2 = |T| (a^2 + b^2 + c^2 + ab + bc + ca) / 6
        let (a, b, c) = (0.3f64, 0.9, 1.4);
        let q = cell_power_integral(&[a, b, c], 2.0, 0.0, 2.0);
        let exact = 2.0 * (a * a + b * b + c * c + a * b + b * c + c * a) / 6.0;
        assert!((q - exact).abs() < 1e-14);
    }

    #[test]
    fn hemisphere_cap_function_audits_cleanly() {
        let m = build_icosphere::<f64>(4, 1.0).unwrap();
        let f = ScalarField::from_fn(&m, |x| x[2].max(0.0)).unwrap();
        let audit = audit_field(&f, 1.0, PExponent::new(2.0).unwrap()).unwrap();
        assert_eq!(audit.thresholds.len(), AUDIT_THRESHOLDS);
        for s in &audit.steps {
            assert!(s.holds(0.03), "{} {:?}", s.name, s.worst());
        }
        assert!(audit.steps[3].violation() < 1e-10);
    }

    #[test]
    fn signed_fields_are_rejected() {
        let m = build_icosphere::<f64>(2, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        assert!(audit_field(&z, 1.0, PExponent::new(2.0).unwrap()).is_err());
    }

    #[test]
    fn unconverged_solve_is_rejected() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let d = Domain::upper_half(&m).unwrap();
        let opts = SolverOptions { max_iter: 1, stage_max_iter: 1, ..SolverOptions::default() };
        let eig = dirichlet_eigen(&d, PExponent::new(3.0).unwrap(), &opts);
        if let Ok(eig) = eig {
            if !eig.converged {
                assert!(matches!(audit_eigenfunction(&eig, PExponent::new(3.0).unwrap()), Err(Error::NonConvergence { .. })));
            }
        }
    }
}
