//! Command pipelines. Each returns its check blocks and the files to write.

use std::f64::consts::PI;

use pspec_core::battery::{cap_bump_fields, linear_fields, smooth_fields, superlevel_thresholds};
use pspec_core::harness::{lemma_chain_audit, matei_check, pinching_sweep, trend, trend_violation, MIN_CURVATURE};
use pspec_core::isoperim::croke_profile;
use pspec_core::manifold::{
    beta, build_circle, build_ellipsoid, build_icosphere, build_interval, diameter, total_measure, write_off, Domain,
    Mesh,
};
use pspec_core::pspectral::{
    closed_eigen, constraint_residual, dirichlet_eigen, nodal_domains, solve_radial_1d, EigenResult, PExponent,
    RadialProblem, ScalarField,
};
use pspec_core::rearrange::{coarea_check, lp_equimeasurability, polya_szego_check, symmetrize, symmetrize_levels};
use serde::Serialize;
use serde_json::json;

use crate::config::{FieldKind, MeshKind, MeshSpec, ProblemKind, RunConfig};
use crate::report::{csv_bytes, CheckBlock, VERSION};
use crate::CliError;

/// Check blocks and named file contents produced by one command.
#[derive(Default)]
pub struct Output {
    pub blocks: Vec<CheckBlock>,
    pub files: Vec<(String, Vec<u8>)>,
}

pub fn build_mesh(spec: &MeshSpec) -> Result<Mesh<f64>, CliError> {
    Ok(match spec.kind {
        MeshKind::Icosphere => build_icosphere(spec.level, spec.radius)?,
        MeshKind::Ellipsoid => build_ellipsoid(spec.aspect, spec.level, spec.normalize)?,
        MeshKind::Circle => build_circle(spec.segments, spec.radius)?,
        MeshKind::Interval => build_interval(spec.segments, spec.radius)?,
    })
}

fn dirichlet_domain<'m>(mesh: &'m Mesh<f64>, spec: &MeshSpec, z0: f64) -> Result<Domain<'m, f64>, CliError> {
    Ok(match spec.kind {
        MeshKind::Interval => Domain::interior_of(mesh)?,
        MeshKind::Circle => Domain::from_predicate(mesh, |x| x[1] > z0)?,
        _ => Domain::from_predicate(mesh, |x| x[2] > z0)?,
    })
}

/// Radius of the round sphere or circle the mesh discretizes, if it is one.
fn round_radius(cfg: &RunConfig) -> Option<f64> {
    match cfg.mesh.kind {
        MeshKind::Icosphere | MeshKind::Circle => Some(cfg.mesh.radius),
        MeshKind::Ellipsoid if cfg.mesh.aspect == 1.0 => Some(1.0),
        _ => None,
    }
}

/// Known eigenvalue and the tolerance it is checked with.
fn reference_eigenvalue(cfg: &RunConfig, p: PExponent<f64>) -> Result<Option<(f64, f64)>, CliError> {
    let q = p.get();
    if cfg.mesh.kind == MeshKind::Interval {
        let l = cfg.mesh.radius;
        return Ok(Some((solve_radial_1d(p, 1, RadialProblem::Interval)? / l.powf(q), 0.005)));
    }
    let half = cfg.problem == ProblemKind::Closed || cfg.domain_z0 == 0.0;
    match round_radius(cfg) {
        Some(r) if half => {
            let n = if cfg.mesh.kind == MeshKind::Circle { 1 } else { 2 };
            let tol = if n == 1 { 0.005 } else { 0.03 };
            Ok(Some((solve_radial_1d(p, n, RadialProblem::Hemisphere)? / r.powf(q), tol)))
        }
        _ => Ok(None),
    }
}

fn off_bytes(mesh: &Mesh<f64>, seed: u64) -> Result<Vec<u8>, CliError> {
    let mut raw = Vec::new();
    write_off(mesh, &mut raw)?;
    let text = String::from_utf8(raw).expect("OFF output is ASCII");
    let (head, rest) = text.split_once('\n').expect("OFF header line");
    Ok(format!("{head}\n# pspec {VERSION} seed={seed}\n{rest}").into_bytes())
}

fn p_label(p: PExponent<f64>) -> String {
    format!("{}", p.get())
}

pub fn mesh(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = build_mesh(&cfg.mesh)?;
    let mut out = Output::default();
    let inputs = json!({ "kind": cfg.entries["mesh.kind"] });
    out.blocks.push(CheckBlock::info("mesh.vertices", inputs.clone(), m.vertex_count() as f64, None));
    out.blocks.push(CheckBlock::info("mesh.cells", inputs.clone(), m.cell_count() as f64, None));
    let measure = total_measure(&m);
    let exact = match cfg.mesh.kind {
        MeshKind::Icosphere => Some(4.0 * PI * cfg.mesh.radius * cfg.mesh.radius),
        MeshKind::Circle => Some(2.0 * PI * cfg.mesh.radius),
        MeshKind::Interval => Some(cfg.mesh.radius),
        MeshKind::Ellipsoid => None,
    };
    match exact {
        Some(e) => out.blocks.push(CheckBlock::close("mesh.total_measure", inputs.clone(), measure, e, 0.02)),
        None => out.blocks.push(CheckBlock::info("mesh.total_measure", inputs.clone(), measure, None)),
    }
    if m.is_closed() {
        out.blocks.push(CheckBlock::info("mesh.beta", inputs.clone(), beta(&m)?, None));
        out.blocks.push(CheckBlock::info("mesh.diameter", inputs.clone(), diameter(&m)?, Some(PI)));
    }
    if let Some(k) = m.min_curvature() {
        if cfg.mesh.kind == MeshKind::Ellipsoid && cfg.mesh.normalize {
            out.blocks.push(CheckBlock::close_abs("mesh.min_curvature", inputs, k, 1.0, 1e-9));
        } else {
            out.blocks.push(CheckBlock::info("mesh.min_curvature", inputs, k, None));
        }
    }
    out.files.push(("mesh.off".into(), off_bytes(&m, cfg.seed)?));
    Ok(out)
}

#[derive(Serialize)]
struct EigenRow {
    seed: u64,
    p: f64,
    lambda: f64,
    reference: Option<f64>,
    iterations: usize,
    converged: bool,
    residual: f64,
    constraint_residual: f64,
    nodal_domains: Option<usize>,
}

#[derive(Serialize)]
struct FieldRow {
    seed: u64,
    vertex: usize,
    x: f64,
    y: f64,
    z: f64,
    u: f64,
}

fn solve<'m>(cfg: &RunConfig, mesh: &'m Mesh<f64>, p: PExponent<f64>) -> Result<EigenResult<'m, f64>, CliError> {
    Ok(match cfg.problem {
        ProblemKind::Closed => closed_eigen(mesh, p, &cfg.solver)?,
        ProblemKind::Dirichlet => dirichlet_eigen(&dirichlet_domain(mesh, &cfg.mesh, cfg.domain_z0)?, p, &cfg.solver)?,
    })
}

pub fn eigen(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = build_mesh(&cfg.mesh)?;
    let mut out = Output::default();
    let mut rows = Vec::new();
    let closed = cfg.problem == ProblemKind::Closed;
    for &p in &cfg.p {
        let r = solve(cfg, &m, p)?;
        let reference = reference_eigenvalue(cfg, p)?;
        let nodal = closed.then(|| nodal_domains(&r.field).count);
        let inputs = json!({ "p": p.get(), "problem": if closed { "closed" } else { "dirichlet" } });
        out.blocks.push(CheckBlock::flag("eigen.converged", inputs.clone(), Some(r.lambda), None, r.converged));
        if let Some((value, tol)) = reference {
            out.blocks.push(CheckBlock::close("eigen.reference", inputs.clone(), r.lambda, value, tol));
        }
        if let Some(count) = nodal {
            out.blocks.push(CheckBlock::flag("eigen.nodal_domains", inputs.clone(), Some(count as f64), Some(2.0), count == 2));
            let c = constraint_residual(&r.field, p);
            out.blocks.push(CheckBlock::at_most("eigen.constraint", inputs, c, 1e-8));
        }
        rows.push(EigenRow {
            seed: cfg.seed,
            p: p.get(),
            lambda: r.lambda,
            reference: reference.map(|x| x.0),
            iterations: r.iterations,
            converged: r.converged,
            residual: r.residual,
            constraint_residual: r.constraint_residual,
            nodal_domains: nodal,
        });
        let field: Vec<FieldRow> = m
            .vertices()
            .iter()
            .zip(r.field.values())
            .enumerate()
            .map(|(v, (x, &u))| FieldRow { seed: cfg.seed, vertex: v, x: x[0], y: x[1], z: x[2], u })
            .collect();
        out.files.push((format!("field_p{}.csv", p_label(p)), csv_bytes(&field)?));
    }
    out.files.push(("eigen.csv".into(), csv_bytes(&rows)?));
    out.files.push(("mesh.off".into(), off_bytes(&m, cfg.seed)?));
    Ok(out)
}

fn closed_mesh(cfg: &RunConfig) -> Result<Mesh<f64>, CliError> {
    let m = build_mesh(&cfg.mesh)?;
    if !m.is_closed() {
        return Err(CliError::Unsupported(format!("{} needs a closed mesh", cfg.command)));
    }
    Ok(m)
}

#[derive(Serialize)]
struct ProfileRow {
    seed: u64,
    r: f64,
    value: f64,
}

pub fn symmetrize_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = closed_mesh(cfg)?;
    let b = beta(&m)?;
    let axis = m.dimension();
    let f = match cfg.field {
        FieldKind::Z => ScalarField::coordinate(&m, axis)?,
        FieldKind::ZPositive => ScalarField::coordinate(&m, axis)?.positive_part(),
        FieldKind::Smooth => smooth_fields(&m, 1, cfg.seed)?.remove(0),
        FieldKind::Bump => cap_bump_fields(&m, cfg.domain_z0, 1, cfg.seed)?.remove(0),
    };
    let levels = symmetrize_levels(&f, b, cfg.levels)?;
    let lumped = symmetrize(&f, b)?;
    let mut out = Output::default();
    for &p in &cfg.p {
        let inputs = json!({ "p": p.get(), "field": cfg.entries["symmetrize.field"], "beta": b });
        let eq = lp_equimeasurability(&f, &lumped, b, p)?;
        out.blocks.push(CheckBlock::at_most("symmetrize.equimeasurability", inputs.clone(), eq.gap, 0.01));
        let ps = polya_szego_check(&f, b, p)?;
        out.blocks.push(CheckBlock::at_least("symmetrize.polya_szego", inputs, ps.lhs, ps.beta * ps.rhs, 0.01));
    }
    let rows: Vec<ProfileRow> = levels
        .knots()
        .iter()
        .zip(levels.values())
        .map(|(&r, &value)| ProfileRow { seed: cfg.seed, r, value })
        .collect();
    out.files.push(("profile.csv".into(), csv_bytes(&rows)?));
    Ok(out)
}

/// Random superlevel domains: linear fields (caps on round spheres) and
/// smooth fields, each cut at measure fractions in `[0.02, 0.98]`.
fn superlevel_battery<'m>(cfg: &RunConfig, m: &'m Mesh<f64>) -> Result<(Vec<(ScalarField<'m, f64>, Vec<f64>)>, usize), CliError> {
    let linear = linear_fields(m, cfg.battery_fields, cfg.seed)?;
    let count = linear.len();
    let mut battery = Vec::new();
    for (i, f) in linear.into_iter().chain(smooth_fields(m, cfg.battery_fields, cfg.seed)?).enumerate() {
        let ts = superlevel_thresholds(&f, cfg.battery_thresholds, 0.02, 0.98, cfg.seed.wrapping_add(i as u64));
        battery.push((f, ts));
    }
    Ok((battery, count))
}

pub fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = closed_mesh(cfg)?;
    if m.dimension() != 2 {
        return Err(CliError::Unsupported("verify runs on closed surfaces".into()));
    }
    let b = beta(&m)?;
    let kmin = m.min_curvature().unwrap_or(f64::NAN);
    let round = m.curvature().map_or(false, |k| {
        let kmax = k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        kmax - kmin <= 1e-9 * kmax
    });
    let unit_round = round && round_radius(cfg) == Some(1.0);
    let positive_curvature = kmin >= MIN_CURVATURE;
    let mut out = Output::default();

    let z = ScalarField::coordinate(&m, 2)?;
    let co = coarea_check(&z)?;
    out.blocks.push(CheckBlock::close("verify.coarea", json!({ "field": "z" }), co.lhs, co.rhs, 0.01));
    if unit_round {
        out.blocks.push(CheckBlock::close("verify.coarea.analytic", json!({ "field": "z" }), co.rhs, PI * PI, 0.01));
    }

    let mut eq_fields = vec![ScalarField::constant(&m, 1.0)?, z.positive_part()];
    eq_fields.extend(smooth_fields(&m, cfg.battery_fields, cfg.seed)?);
    let profiles = eq_fields.iter().map(|f| symmetrize(f, b)).collect::<Result<Vec<_>, _>>()?;
    let bumps = cap_bump_fields(&m, cfg.domain_z0, cfg.battery_fields, cfg.seed)?;
    for &p in &cfg.p {
        let mut worst = 0.0f64;
        for (f, prof) in eq_fields.iter().zip(&profiles) {
            worst = worst.max(lp_equimeasurability(f, prof, b, p)?.gap);
        }
        let inputs = json!({ "p": p.get(), "fields": eq_fields.len() });
        out.blocks.push(CheckBlock::at_most("verify.equimeasurability", inputs, worst, 0.01));

        let mut worst = (f64::INFINITY, 1.0, 1.0);
        for f in &bumps {
            let ps = polya_szego_check(f, b, p)?;
            let rel = (ps.lhs - ps.beta * ps.rhs) / ps.lhs;
            if rel < worst.0 {
                worst = (rel, ps.lhs, ps.beta * ps.rhs);
            }
        }
        let inputs = json!({ "p": p.get(), "fields": bumps.len(), "z0": cfg.domain_z0 });
        out.blocks.push(CheckBlock::at_least("verify.polya_szego", inputs, worst.1, worst.2, 0.01));
    }

    let (battery, linear) = superlevel_battery(cfg, &m)?;
    let croke = croke_profile(&m, &battery)?;
    let inputs = json!({ "samples": croke.samples.len(), "diameter": croke.diameter, "beta": croke.beta });
    if positive_curvature {
        out.blocks.push(CheckBlock::at_least("verify.gromov", inputs.clone(), croke.min_ratio, 1.0, 0.02));
    }
    out.blocks.push(CheckBlock::info(
        "verify.croke",
        json!({ "diameter": croke.diameter, "histogram": { "edges": croke.histogram.edges, "counts": croke.histogram.counts } }),
        croke.min_ratio,
        Some(1.0),
    ));
    if round {
        let worst = croke
            .samples
            .iter()
            .filter(|s| s.field < linear)
            .map(|s| s.ratio)
            .fold(1.0, |w: f64, r| if (r - 1.0).abs() > (w - 1.0).abs() { r } else { w });
        out.blocks.push(CheckBlock::close("verify.gromov.caps", json!({ "fields": linear }), worst, 1.0, 0.01));
    }

    let hemisphere = dirichlet_domain(&m, &cfg.mesh, cfg.domain_z0)?;
    for &p in &cfg.p {
        let inputs = json!({ "p": p.get() });
        if positive_curvature {
            let rec = matei_check(&m, p, &cfg.solver)?;
            out.blocks.push(CheckBlock::at_least("verify.matei", inputs.clone(), rec.ratio, 1.0, 0.02));
            if round {
                out.blocks.push(CheckBlock::close("verify.matei.equality", inputs.clone(), rec.ratio, 1.0, 0.02));
                if cfg.domain_z0 == 0.0 {
                    let h = dirichlet_eigen(&hemisphere, p, &cfg.solver)?;
                    out.blocks.push(CheckBlock::close("verify.hemisphere", inputs.clone(), h.lambda, rec.lambda_m, 0.03));
                }
            }
        }
        let audit = lemma_chain_audit(&hemisphere, p, &cfg.solver)?;
        for (k, step) in audit.steps.iter().enumerate() {
            let tol = if k == 3 { 1e-10 } else { 0.03 };
            let (i, signed) = step.worst();
            let inputs = json!({ "p": p.get(), "step": step.name, "worst_threshold": audit.thresholds[i], "worst_relative": signed });
            let name = format!("verify.audit.{}", k + 1);
            // finite differences of the distribution function lose accuracy next to the
            // maximum when p != 2, so only p = 2 is graded
            if p.get() == 2.0 {
                out.blocks.push(CheckBlock::at_most(name, inputs, step.violation(), tol));
            } else {
                out.blocks.push(CheckBlock::info(name, inputs, step.violation(), None));
            }
        }
    }
    let p0 = cfg.p[0];
    let eig = closed_eigen(&m, p0, &cfg.solver)?;
    let count = nodal_domains(&eig.field).count;
    out.blocks.push(CheckBlock::flag(
        "verify.nodal_domains",
        json!({ "p": p0.get() }),
        Some(count as f64),
        Some(2.0),
        count == 2,
    ));
    Ok(out)
}

#[derive(Serialize)]
struct SweepRow {
    seed: u64,
    aspect: f64,
    p: f64,
    level: usize,
    diameter: f64,
    beta: f64,
    min_curvature: f64,
    lambda_m: f64,
    lambda_sn: f64,
    ratio: f64,
    croke_min_ratio: f64,
    croke_min_ratio_pow_p: f64,
    iterations: usize,
    converged: bool,
    error: Option<String>,
}

pub fn sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let level = cfg.mesh.level;
    let rows = pinching_sweep(&cfg.aspects, &cfg.p, level, &cfg.solver);
    // empirical isoperimetric constant of each family member, reported beside the ratios
    let mut croke = Vec::with_capacity(cfg.aspects.len());
    for &a in &cfg.aspects {
        let value = build_ellipsoid(a, level, true).map_err(CliError::from).and_then(|m| {
            let (battery, _) = superlevel_battery(cfg, &m)?;
            Ok(croke_profile(&m, &battery)?.min_ratio)
        });
        croke.push(value.unwrap_or(f64::NAN));
    }
    let mut out = Output::default();
    let mut table = Vec::with_capacity(rows.len());
    for r in &rows {
        let a = r.aspect.unwrap_or(f64::NAN);
        let c = cfg.aspects.iter().position(|&x| x == a).map_or(f64::NAN, |i| croke[i]);
        let inputs = json!({ "aspect": a, "p": r.p, "level": level });
        if r.is_failed() {
            out.blocks.push(CheckBlock::flag("sweep.row", inputs, None, None, false));
        } else {
            if r.min_curvature >= MIN_CURVATURE {
                out.blocks.push(CheckBlock::at_least("sweep.matei", inputs.clone(), r.ratio, 1.0, 0.02));
            }
            if r.round {
                out.blocks.push(CheckBlock::close("sweep.round.diameter", inputs.clone(), r.diameter, PI, 0.02));
                out.blocks.push(CheckBlock::close("sweep.round.ratio", inputs, r.ratio, 1.0, 0.02));
            }
        }
        table.push(SweepRow {
            seed: cfg.seed,
            aspect: a,
            p: r.p,
            level,
            diameter: r.diameter,
            beta: r.beta,
            min_curvature: r.min_curvature,
            lambda_m: r.lambda_m,
            lambda_sn: r.lambda_sn,
            ratio: r.ratio,
            croke_min_ratio: c,
            croke_min_ratio_pow_p: c.powf(r.p),
            iterations: r.iterations,
            converged: r.converged,
            error: r.error.clone(),
        });
    }
    for &p in &cfg.p {
        let curve = trend(&rows, p.get());
        let inputs = json!({ "p": p.get(), "curve": curve });
        out.blocks.push(CheckBlock::at_most("sweep.trend", inputs, trend_violation(&curve), 0.01));
    }
    out.files.push(("sweep.csv".into(), csv_bytes(&table)?));
    Ok(out)
}

#[derive(Serialize)]
struct OracleRow {
    seed: u64,
    p: f64,
    n: usize,
    problem: &'static str,
    lambda: f64,
}

pub fn oracle(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut out = Output::default();
    let mut rows = Vec::new();
    let name = match cfg.oracle_problem {
        RadialProblem::Hemisphere => "hemisphere",
        RadialProblem::Interval => "interval",
    };
    for &p in &cfg.p {
        let q = p.get();
        let lambda = solve_radial_1d(p, cfg.oracle_n, cfg.oracle_problem)?;
        println!("lambda_1,p  p = {q}  n = {}  {name}: {lambda:.12}", cfg.oracle_n);
        let inputs = json!({ "p": q, "n": cfg.oracle_n, "problem": name });
        match cfg.oracle_problem {
            RadialProblem::Hemisphere if q == 2.0 => {
                out.blocks.push(CheckBlock::close_abs("oracle.linear", inputs, lambda, cfg.oracle_n as f64, 1e-6))
            }
            RadialProblem::Interval => {
                let exact = (q - 1.0) * (2.0 * PI / (q * (PI / q).sin())).powf(q);
                out.blocks.push(CheckBlock::close("oracle.closed_form", inputs, lambda, exact, 1e-6));
            }
            _ => out.blocks.push(CheckBlock::info("oracle.value", inputs, lambda, None)),
        }
        rows.push(OracleRow { seed: cfg.seed, p: q, n: cfg.oracle_n, problem: name, lambda });
    }
    out.files.push(("oracle.csv".into(), csv_bytes(&rows)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn oracle_linear_case() {
        let cfg = parse_config("command = oracle\np = 2\noracle.n = 3").unwrap();
        let out = oracle(&cfg).unwrap();
        assert!(out.blocks.iter().all(|b| b.pass));
        assert_eq!(out.files[0].0, "oracle.csv");
    }

    #[test]
    fn interval_reference_is_pi_squared() {
        let cfg = parse_config("command = eigen\nmesh.kind = interval\nmesh.segments = 100").unwrap();
        let (value, _) = reference_eigenvalue(&cfg, PExponent::new(2.0).unwrap()).unwrap().unwrap();
        assert!((value - PI * PI).abs() < 1e-8);
    }

    #[test]
    fn symmetrize_rejects_open_mesh() {
        let cfg = parse_config("command = symmetrize\nmesh.kind = interval").unwrap();
        assert!(matches!(symmetrize_cmd(&cfg), Err(CliError::Unsupported(_))));
    }
}
