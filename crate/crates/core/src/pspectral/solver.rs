use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{EnvelopeCholesky, LocalIndex, SparseSym};
use crate::manifold::{Domain, Mesh};
use crate::scalar::{dot, Power, Real};

use super::constraint::{constraint_shift, constraint_value};
use super::rayleigh::{rayleigh_quotient, Region};
use super::{PExponent, ScalarField};

const START_SEED: u64 = 0x05ee_d0f1_25e1_9e7a;

/// Stopping rules and continuation parameters for the eigenvalue solvers.
#[derive(Debug, Clone)]
pub struct SolverOptions<T> {
    /// Relative decrease of the quotient below which an iteration counts as stalled.
    pub tol: T,
    /// Consecutive stalled iterations required to stop.
    pub window: usize,
    /// Iteration budget of the final stage.
    pub max_iter: usize,
    /// Largest change of `p` between continuation stages.
    pub p_step: T,
    /// Tolerance and budget of intermediate continuation stages.
    pub stage_tol: T,
    pub stage_max_iter: usize,
    /// Gradient regularization for `p < 2`, relative to the mean edge length.
    pub eps_scale: T,
    /// Iterations between preconditioner refreshes.
    pub refresh: usize,
    /// Inverse power iteration at `p = 2`.
    pub power_tol: T,
    pub power_max_iter: usize,
    /// Bound on `|d ln(lambda) / dp|` along the continuation path.
    pub lipschitz_budget: T,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tol: T::of(1e-9).max(T::epsilon() * T::of(1e3)),
            window: 10,
            max_iter: 50_000,
            p_step: T::of(0.25),
            stage_tol: T::of(1e-6),
            stage_max_iter: 5_000,
            eps_scale: T::of(1e-9),
            refresh: 10,
            power_tol: T::of(1e-12).max(T::epsilon() * T::of(1e3)),
            power_max_iter: 1_000,
            lipschitz_budget: T::of(3.0),
        }
    }
}

/// Outcome of a first-eigenvalue computation.
#[derive(Debug, Clone)]
pub struct EigenResult<'m, T: Real> {
    /// Rayleigh quotient of `field`.
    pub lambda: T,
    /// Minimizer normalized to unit `L^p` norm. Nonnegative for Dirichlet
    /// problems; positive at its largest absolute value for closed ones.
    pub field: ScalarField<'m, T>,
    /// Relative decrease of the quotient over the last iteration.
    pub residual: T,
    /// `|int |u|^(p-2) u|` for closed problems, zero otherwise.
    pub constraint_residual: T,
    pub iterations: usize,
    pub converged: bool,
    /// Quotient after each accepted iterate of the final stage.
    pub trace: Vec<T>,
    /// `(p, lambda)` at the end of every continuation stage, starting at `p = 2`.
    pub path: Vec<(T, T)>,
    /// Whether consecutive path points respect the Lipschitz budget.
    pub path_lipschitz: bool,
}

struct Problem<'a, T: Real> {
    mesh: &'a Mesh<T>,
    index: LocalIndex,
    mass: Vec<T>,
    closed: bool,
}

struct Eval<T> {
    energy: T,
    mass: T,
    g_energy: Vec<T>,
    g_mass: Vec<T>,
}

struct Stage<T> {
    lambda: T,
    iterations: usize,
    converged: bool,
    residual: T,
}

impl<'a, T: Real> Problem<'a, T> {
    fn new(mesh: &'a Mesh<T>, active: &[bool], closed: bool) -> Self {
        let index = LocalIndex::new(active);
        let mass = index.gather(mesh.vertex_measure());
        Problem { mesh, index, mass, closed }
    }

    fn full(&self, u: &[T]) -> Vec<T> {
        let mut f = vec![T::zero(); self.mesh.vertex_count()];
        self.index.scatter(u, &mut f);
        f
    }

    fn eval(&self, u: &[T], p: T, eps: T, grad: bool) -> Eval<T> {
        let mesh = self.mesh;
        let full = self.full(u);
        let n = u.len();
        let mut out = Eval {
            energy: T::zero(),
            mass: T::zero(),
            g_energy: if grad { vec![T::zero(); n] } else { Vec::new() },
            g_mass: if grad { vec![T::zero(); n] } else { Vec::new() },
        };
        let grad_pow = Power::new(p - T::of(2.0));
        let mass_pow = Power::new(p - T::one());
        for c in 0..mesh.cell_count() {
            let g = mesh.cell_gradient(c, &full);
            let s = dot(&g, &g) + eps * eps;
            if s == T::zero() {
                continue;
            }
            let area = mesh.cell_measure()[c];
            // |g|^(p-2), with |g| regularized
            let t = grad_pow.of(s.sqrt());
            out.energy = out.energy + area * t * s;
            if grad {
                let coef = area * p * t;
                for (&v, gv) in mesh.cell(c).iter().zip(mesh.cell_gradients(c)) {
                    if let Some(l) = self.index.local(v) {
                        out.g_energy[l] = out.g_energy[l] + coef * dot(&g, gv);
                    }
                }
            }
        }
        for l in 0..n {
            let a = u[l].abs();
            if a == T::zero() {
                continue;
            }
            let t = self.mass[l] * mass_pow.of(a);
            out.mass = out.mass + t * a;
            if grad {
                out.g_mass[l] = p * t * u[l].signum();
            }
        }
        out
    }

    fn mass_norm(&self, u: &[T], p: T) -> T {
        let pw = Power::new(p);
        u.iter().zip(&self.mass).map(|(&x, &m)| m * pw.of(x.abs())).sum()
    }

    /// Restores the constraint (closed) and the unit `L^p` norm.
    fn admissible(&self, u: &mut [T], p: T) -> Result<()> {
        if self.closed {
            let c = constraint_shift(u, &self.mass, p)?;
            for x in u.iter_mut() {
                *x = *x - c;
            }
        }
        let norm = self.mass_norm(u, p);
        if !(norm > T::zero()) {
            return Err(Error::ConstantField);
        }
        let s = norm.powf(-T::one() / p);
        for x in u.iter_mut() {
            *x = *x * s;
        }
        Ok(())
    }

    fn preconditioner(&self, u: &[T], p: T, rq: T) -> Result<EnvelopeCholesky<T>> {
        let mesh = self.mesh;
        let full = self.full(u);
        let norms: Vec<T> = (0..mesh.cell_count())
            .map(|c| {
                let g = mesh.cell_gradient(c, &full);
                dot(&g, &g).sqrt()
            })
            .collect();
        let area: T = mesh.cell_measure().iter().copied().sum();
        let ms: T = norms.iter().zip(mesh.cell_measure()).map(|(&g, &a)| a * g * g).sum::<T>() / area;
        let gfloor = if ms > T::zero() { T::of(1e-2) * ms.sqrt() } else { T::one() };
        let pm2 = p - T::of(2.0);
        let w: Vec<T> = norms.iter().map(|&g| g.max(gfloor).powf(pm2)).collect();
        let umax = u.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
        let ufloor = if umax > T::zero() { T::of(1e-2) * umax } else { T::one() };
        let diag: Vec<T> = u.iter().zip(&self.mass).map(|(&x, &m)| rq * m * x.abs().max(ufloor).powf(pm2)).collect();
        let mut k = SparseSym::stiffness(mesh, &self.index, Some(&w));
        k.add_diagonal(&diag);
        EnvelopeCholesky::factor(&k)
    }

    /// Inverse power iteration for the linear problem.
    fn power_iteration(&self, opts: &SolverOptions<T>) -> Result<Vec<T>> {
        let n = self.index.len();
        let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
        let mut u: Vec<T> = (0..n)
            .map(|_| if self.closed { T::of(rng.gen_range(-1.0..1.0)) } else { T::of(rng.gen_range(0.5..1.5)) })
            .collect();
        let mut k = SparseSym::stiffness(self.mesh, &self.index, None);
        if self.closed {
            let total: T = self.mass.iter().copied().sum();
            let len = total.powf(T::one() / T::of_usize(self.mesh.dimension()));
            let sigma = T::of(0.05) / len.powi(2);
            k.add_diagonal(&self.mass.iter().map(|&m| sigma * m).collect::<Vec<_>>());
        }
        let chol = EnvelopeCholesky::factor(&k)?;
        let two = T::of(2.0);
        let mut last = T::infinity();
        let mut stable = 0;
        for _ in 0..opts.power_max_iter {
            self.deflate(&mut u);
            self.admissible_linear(&mut u)?;
            let rhs: Vec<T> = u.iter().zip(&self.mass).map(|(&x, &m)| x * m).collect();
            let mut next = chol.solve(&rhs);
            self.deflate(&mut next);
            self.admissible_linear(&mut next)?;
            let e = self.eval(&next, two, T::zero(), false);
            let rq = e.energy / e.mass;
            u = next;
            if (last - rq).abs() <= opts.power_tol * rq {
                stable += 1;
                if stable >= 3 {
                    break;
                }
            } else {
                stable = 0;
            }
            last = rq;
        }
        Ok(u)
    }

    fn deflate(&self, u: &mut [T]) {
        if self.closed {
            let total: T = self.mass.iter().copied().sum();
            let mean: T = u.iter().zip(&self.mass).map(|(&x, &m)| x * m).sum::<T>() / total;
            for x in u.iter_mut() {
                *x = *x - mean;
            }
        }
    }

    fn admissible_linear(&self, u: &mut [T]) -> Result<()> {
        let norm = self.mass_norm(u, T::of(2.0));
        if !(norm > T::zero()) {
            return Err(Error::ConstantField);
        }
        let s = T::one() / norm.sqrt();
        for x in u.iter_mut() {
            *x = *x * s;
        }
        Ok(())
    }

    /// Gradient of `ln R` composed with the constraint projection.
    fn log_gradient(&self, e: &Eval<T>, u: &[T], p: T) -> Vec<T> {
        let mut g: Vec<T> =
            e.g_energy.iter().zip(&e.g_mass).map(|(&a, &b)| a / e.energy - b / e.mass).collect();
        if self.closed {
            let umax = u.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
            let floor = umax * T::of(1e-12);
            let w: Vec<T> =
                u.iter().zip(&self.mass).map(|(&x, &m)| m * x.abs().max(floor).powf(p - T::of(2.0))).collect();
            let sg: T = g.iter().copied().sum();
            let sw: T = w.iter().copied().sum();
            for (gi, wi) in g.iter_mut().zip(&w) {
                *gi = *gi - *wi * sg / sw;
            }
        }
        g
    }

    /// Preconditioned descent on `ln R` at fixed `p` and `eps`, starting from an
    /// admissible `u`.
    fn descend(
        &self,
        u: &mut Vec<T>,
        p: T,
        eps: T,
        tol: T,
        max_iter: usize,
        opts: &SolverOptions<T>,
        mut trace: Option<&mut Vec<T>>,
    ) -> Result<Stage<T>> {
        let c1 = T::of(1e-4);
        let min_step = T::of(1e-12);
        let mut e = self.eval(u, p, eps, true);
        let mut rq = e.energy / e.mass;
        if let Some(t) = trace.as_deref_mut() {
            t.push(rq);
        }
        let mut chol = None;
        let mut since_refresh = 0;
        let mut stalled = 0;
        let mut residual = T::infinity();
        let mut alpha = T::one();
        for it in 0..max_iter {
            if chol.is_none() || since_refresh >= opts.refresh {
                chol = Some(self.preconditioner(u, p, rq)?);
                since_refresh = 0;
            }
            since_refresh += 1;
            let g = self.log_gradient(&e, u, p);
            let pg = chol.as_ref().expect("factored").solve(&g);
            let scale = -rq / p;
            let d: Vec<T> = pg.iter().map(|&x| x * scale).collect();
            let slope = dot_slices(&g, &d);

            let mut accepted = None;
            if slope < T::zero() {
                let mut a = alpha;
                // below this the predicted decrease is lost in rounding
                let resolvable = T::epsilon() * T::of(16.0);
                while a >= min_step && -a * slope > resolvable {
                    let mut v: Vec<T> = u.iter().zip(&d).map(|(&x, &y)| x + a * y).collect();
                    if self.admissible(&mut v, p).is_ok() {
                        let ev = self.eval(&v, p, eps, false);
                        let r = ev.energy / ev.mass;
                        if r.ln() <= rq.ln() + c1 * a * slope {
                            accepted = Some((v, r, a));
                            break;
                        }
                    }
                    a = a / T::of(2.0);
                }
            }
            match accepted {
                Some((v, r, a)) => {
                    residual = (rq - r) / r;
                    *u = v;
                    rq = r;
                    alpha = (a * T::of(2.0)).min(T::one());
                    e = self.eval(u, p, eps, true);
                }
                None => {
                    if -slope > tol && since_refresh > 1 {
                        // stale preconditioner; rebuild before giving up
                        chol = None;
                        alpha = T::one();
                        continue;
                    }
                    if -slope > tol {
                        return Ok(Stage { lambda: rq, iterations: it + 1, converged: false, residual: -slope });
                    }
                    residual = T::zero();
                }
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(rq);
            }
            if residual < tol {
                stalled += 1;
                if stalled >= opts.window {
                    return Ok(Stage { lambda: rq, iterations: it + 1, converged: true, residual });
                }
            } else {
                stalled = 0;
            }
        }
        Ok(Stage { lambda: rq, iterations: max_iter, converged: false, residual })
    }

    fn solve(&self, p: PExponent<T>, opts: &SolverOptions<T>) -> Result<EigenResult<'a, T>> {
        if self.index.is_empty() {
            return Err(Error::InvalidArgument("no free vertices".into()));
        }
        let target = p.get();
        let two = T::of(2.0);
        let mut u = self.power_iteration(opts)?;
        self.admissible(&mut u, two)?;

        let steps = if target == two {
            0
        } else {
            let ratio = (target / two).ln().abs();
            let mut k = 1usize;
            loop {
                // geometric spacing: the largest step is the one next to the larger end
                let hi = target.max(two);
                let step = hi * (T::one() - (-ratio / T::of_usize(k)).exp());
                if step <= opts.p_step {
                    break k;
                }
                k += 1;
            }
        };
        let h = self.mesh.mean_edge_length();
        let eps0 = if target < two { opts.eps_scale * h } else { T::zero() };

        let mut path = Vec::with_capacity(steps + 1);
        let mut iterations = 0;
        let first = self.descend(&mut u, two, T::zero(), opts.stage_tol, opts.stage_max_iter, opts, None)?;
        iterations += first.iterations;
        path.push((two, first.lambda));

        let mut trace = Vec::new();
        let mut last = first;
        for k in 1..=steps {
            let t = T::of_usize(k) / T::of_usize(steps);
            let pk = two * (target / two).powf(t);
            let pk = if k == steps { target } else { pk };
            let final_stage = k == steps;
            let eps = eps0 * (T::one() - t);
            self.admissible(&mut u, pk)?;
            let (tol, budget) =
                if final_stage { (opts.tol, opts.max_iter) } else { (opts.stage_tol, opts.stage_max_iter) };
            let tr = if final_stage { Some(&mut trace) } else { None };
            last = self.descend(&mut u, pk, eps, tol, budget, opts, tr)?;
            iterations += last.iterations;
            log::debug!("stage p={pk} iterations={} converged={} residual={:e}", last.iterations, last.converged, last.residual);
            path.push((pk, last.lambda));
        }
        if steps == 0 {
            last = self.descend(&mut u, two, T::zero(), opts.tol, opts.max_iter, opts, Some(&mut trace))?;
            iterations += last.iterations;
            path[0] = (two, last.lambda);
        }

        let path_lipschitz = path.windows(2).all(|w| {
            let (p0, l0) = w[0];
            let (p1, l1) = w[1];
            (l1 - l0).abs() <= opts.lipschitz_budget * (p1 - p0).abs() * l0.max(l1)
        });

        let mut values = self.full(&u);
        if self.closed {
            let imax = (0..values.len()).fold(0, |b, i| if values[i].abs() > values[b].abs() { i } else { b });
            if values[imax] < T::zero() {
                values.iter_mut().for_each(|x| *x = -*x);
            }
        } else {
            let s: T = values.iter().copied().sum();
            if s < T::zero() {
                values.iter_mut().for_each(|x| *x = -*x);
            }
            values.iter_mut().for_each(|x| *x = x.max(T::zero()));
        }
        let field = ScalarField::new(self.mesh, values)?;
        let active = (!self.closed).then(|| {
            let mut a = vec![false; self.mesh.vertex_count()];
            for l in 0..self.index.len() {
                a[self.index.global(l)] = true;
            }
            a
        });
        let lambda = match &active {
            None => rayleigh_quotient(&field, Region::Mesh(self.mesh), p)?,
            Some(a) => {
                let d = Domain::from_mask(self.mesh, a.clone())?;
                rayleigh_quotient(&field, Region::Domain(&d), p)?
            }
        };
        let constraint_residual = if self.closed {
            constraint_value(field.values(), self.mesh.vertex_measure(), T::zero(), target).abs()
        } else {
            T::zero()
        };
        Ok(EigenResult {
            lambda,
            field,
            residual: last.residual,
            constraint_residual,
            iterations,
            converged: last.converged,
            trace,
            path,
            path_lipschitz,
        })
    }
}

fn dot_slices<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).fold(T::zero(), |s, t| s + t)
}

/// First Dirichlet eigenpair of the p-Laplacian on a domain.
pub fn dirichlet_eigen<'m, T: Real>(
    domain: &Domain<'m, T>,
    p: PExponent<T>,
    opts: &SolverOptions<T>,
) -> Result<EigenResult<'m, T>> {
    if !domain.has_boundary() {
        return Err(Error::InvalidArgument("domain has no boundary".into()));
    }
    Problem::new(domain.mesh(), domain.interior_mask(), false).solve(p, opts)
}

/// First nonzero eigenpair of the p-Laplacian on a closed mesh, minimizing the
/// Rayleigh quotient under `int |u|^(p-2) u = 0`.
pub fn closed_eigen<'m, T: Real>(mesh: &'m Mesh<T>, p: PExponent<T>, opts: &SolverOptions<T>) -> Result<EigenResult<'m, T>> {
    if !mesh.is_closed() {
        return Err(Error::OpenMesh);
    }
    Problem::new(mesh, &vec![true; mesh.vertex_count()], true).solve(p, opts)
}
