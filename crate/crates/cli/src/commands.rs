use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tlspin_core::cupcap::{cup_state, evaluate, parse, rank_one, CupType, Diagram, EvalResult};
use tlspin_core::doublewell::{independent_wells_limit, map_well, LimitRow, WellParams, INDEPENDENT_WELLS_THRESHOLD};
use tlspin_core::dynamics::{tunneling_time, tunneling_trace, zeno_run_with, Propagator, ZenoRun};
use tlspin_core::hamiltonian::{build_h, spectrum, splitting, topological_projector, ModelParams, Splitting};
use tlspin_core::numerics::{gram_residual, hermitian_eig, Operator, C64};
use tlspin_core::tl_algebra::{make_generator, verify_generator_relations, Sign, TLParams, LOOP_VALUE, MAX_SITES};
use tlspin_core::topo_basis::{consistency_report, graphical_basis, spectral_basis, ConsistencyReport, Family};

use crate::output::{json, num, Format, Table};
use crate::specs::{SweepParam, SweepSpec};
use crate::{Command, Failure, Settings, EXIT_DOMAIN, EXIT_OK};

pub(crate) struct Report {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Report {
    fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }
}

pub(crate) fn dispatch(cmd: &Command, s: &Settings) -> Result<Report, Failure> {
    match cmd {
        Command::Verify {
            model,
            perturb,
            seed,
            max_sites,
        } => verify(s, &s.model(model)?, perturb.or(s.file.perturb), *seed, *max_sites),
        Command::Spectrum { model } => cmd_spectrum(s, &s.model(model)?),
        Command::Evolve { model, t_max, steps } => evolve(s, &s.model(model)?, *t_max, *steps),
        Command::Zeno { model, n } => zeno(s, &s.model(model)?, &n.0),
        Command::Well { well } => cmd_well(s, &s.well(well)?, well.sweep.as_ref()),
        Command::Diagram { expr, file, phi, eps } => {
            let src = match (expr, file) {
                (Some(e), _) => e.clone(),
                (None, Some(path)) => std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
                (None, None) => return Err(Failure::Usage("no diagram given".into())),
            };
            let p = TLParams::new(
                phi.or(s.file.phi).unwrap_or(0.0),
                eps.or(s.file.eps).unwrap_or(Sign::Plus),
            )
            .map_err(|e| Failure::Usage(e.to_string()))?;
            diagram(s, &src, &p)
        }
    }
}

// ---- verify ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    status: Status,
    max_residual: Option<f64>,
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl Check {
    fn measured(name: &'static str, residual: f64, tolerance: f64) -> Self {
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            name,
            status,
            max_residual: Some(residual),
            tolerance,
            note: None,
        }
    }

    fn skipped(name: &'static str, tolerance: f64, why: String) -> Self {
        Self {
            name,
            status: Status::Skipped,
            max_residual: None,
            tolerance,
            note: Some(why),
        }
    }
}

#[derive(Debug, Serialize)]
struct Tolerances {
    abs: f64,
    eig: f64,
}

#[derive(Debug, Serialize)]
struct Informational {
    single_basis_compatible: Option<bool>,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    passed: bool,
    params: ModelParams,
    tolerances: Tolerances,
    perturb: Option<f64>,
    seed: u64,
    max_sites: usize,
    grid_points: usize,
    checks: Vec<Check>,
    informational: Informational,
    consistency: Option<ConsistencyReport>,
    warnings: Vec<String>,
}

fn grid(p: &TLParams) -> Vec<TLParams> {
    let mut out: Vec<TLParams> = Sign::BOTH
        .into_iter()
        .flat_map(|eps| (0..12).map(move |k| TLParams { phi: k as f64 * PI / 6.0, eps }))
        .collect();
    if !out.contains(p) {
        out.push(*p);
    }
    out
}

fn noise(size: f64, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Operator::from_fn(4, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * size
    })
}

fn max_over<T>(items: &[T], f: impl Fn(&T) -> tlspin_core::Result<f64>) -> Result<f64, Failure> {
    let mut worst = 0.0_f64;
    for it in items {
        let r = f(it)?;
        worst = if r.is_nan() || worst.is_nan() { f64::NAN } else { worst.max(r) };
    }
    Ok(worst)
}

fn verify(s: &Settings, mp: &ModelParams, perturb: Option<f64>, seed: u64, max_sites: usize) -> Result<Report, Failure> {
    if let Some(size) = perturb {
        if !size.is_finite() || size < 0.0 {
            return Err(Failure::Usage(format!("perturb must be finite and >= 0, got {size}")));
        }
    }
    if !(2..=MAX_SITES).contains(&max_sites) {
        return Err(Failure::Usage(format!("max-sites must be in 2..={MAX_SITES}, got {max_sites}")));
    }
    let (ta, te) = (s.tol_abs, s.tol_eig);
    let points = grid(&mp.tl_params());
    let delta_u = perturb.map(|size| noise(size, seed));
    let generator = |p: &TLParams| match &delta_u {
        Some(n) => make_generator(p).add(n).expect("4x4"),
        None => make_generator(p),
    };

    let mut checks = Vec::new();
    checks.push(Check::measured(
        "tl_relations",
        max_over(&points, |p| {
            let u = generator(p);
            let mut worst = 0.0_f64;
            for m in 2..=max_sites {
                worst = worst.max(verify_generator_relations(&u, LOOP_VALUE, m, ta)?.worst());
            }
            Ok(worst)
        })?,
        ta,
    ));
    checks.push(Check::measured(
        "generator_hermitian",
        max_over(&points, |p| Ok(generator(p).hermiticity_residual()))?,
        ta,
    ));
    checks.push(Check::measured(
        "generator_decomposition",
        max_over(&points, |p| {
            rank_one(CupType::D1, p).add(&rank_one(CupType::D2, p))?.max_abs_diff(&generator(p))
        })?,
        ta,
    ));
    checks.push(Check::measured(
        "cup_orthonormality",
        max_over(&points, |p| {
            let states: Vec<_> = CupType::ALL.iter().map(|t| cup_state(*t, p)).collect();
            gram_residual(&states)
        })?,
        ta,
    ));
    checks.push(Check::measured(
        "loop_value",
        max_over(&points, |p| {
            let mut worst = 0.0_f64;
            for top in CupType::ALL {
                for bottom in CupType::ALL {
                    let d = Diagram::compose(Diagram::cap(1, 2, top), Diagram::cup(1, 2, bottom));
                    let z = evaluate(&d, p)?.as_scalar().expect("closed diagram");
                    let want = if top == bottom { SQRT_2 } else { 0.0 };
                    worst = worst.max((z - C64::new(want, 0.0)).norm());
                }
            }
            Ok(worst)
        })?,
        ta,
    ));
    checks.push(Check::measured(
        "two_d_representation",
        max_over(&points, |p| {
            let mut worst = 0.0_f64;
            for family in [Family::D, Family::Zero] {
                let rep = graphical_basis(p, family)?.two_d_rep(p)?;
                worst = worst.max(rep.deviation()).max(rep.residuals.max());
            }
            Ok(worst)
        })?,
        ta,
    ));

    let h = build_h(mp);
    checks.push(Check::measured("hamiltonian_hermitian", h.hermiticity_residual(), ta));
    let eig = hermitian_eig(&h)?;
    let mut expected: Vec<f64> = mp.labelled_energies().to_vec();
    expected.extend([0.0; 12]);
    expected.sort_by(f64::total_cmp);
    let spectrum_dev = eig
        .values
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        .max(eig.residual(&h)?);
    checks.push(Check::measured("spectrum", spectrum_dev, te));
    checks.push(Check::measured(
        "topological_commutator",
        h.commutator(&topological_projector(&mp.tl_params()))?.max_abs(),
        te,
    ));

    let (consistency, single) = match spectral_basis(mp) {
        Ok(basis) => {
            checks.push(Check::measured("spectral_gram", basis.gram_residual()?, ta));
            checks.push(Check::measured("eigenstate_relations", basis.eigen_relation_residual(mp)?, te));
            let report = consistency_report(mp)?;
            checks.push(Check::measured(
                "subspace_agreement",
                report.projector_difference.max(report.overlap_unitarity_residual),
                te,
            ));
            let single = report.flags.single_basis_compatible;
            (Some(report), Some(single))
        }
        Err(tlspin_core::Error::DegenerateSpectrum(why)) => {
            for name in ["spectral_gram", "eigenstate_relations", "subspace_agreement"] {
                let tol = if name == "spectral_gram" { ta } else { te };
                checks.push(Check::skipped(name, tol, format!("spectral basis undefined: {why}")));
            }
            (None, None)
        }
        Err(e) => return Err(e.into()),
    };

    let failed: Vec<&str> = checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name).collect();
    let report = VerifyReport {
        passed: failed.is_empty(),
        params: *mp,
        tolerances: Tolerances { abs: ta, eig: te },
        perturb,
        seed,
        max_sites,
        grid_points: points.len(),
        checks,
        informational: Informational {
            single_basis_compatible: single,
        },
        consistency,
        warnings: mp.warnings(),
    };

    let stdout = match s.format_or(Format::Json) {
        Format::Json => json(&report),
        f => {
            let mut t = Table::new(&["check", "status", "max_residual", "tolerance"]);
            for c in &report.checks {
                let status = match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::Skipped => "skipped",
                };
                t.push(vec![
                    c.name.to_string(),
                    status.to_string(),
                    c.max_residual.map(num).unwrap_or_default(),
                    num(c.tolerance),
                ]);
            }
            t.render(f)
        }
    };
    if failed.is_empty() {
        Ok(Report::ok(stdout))
    } else {
        Ok(Report {
            code: EXIT_DOMAIN,
            stdout,
            stderr: format!("verify: failed checks: {}\n", failed.join(", ")),
        })
    }
}

// ---- spectrum ----

#[derive(Serialize)]
struct LevelOut {
    energy: f64,
    multiplicity: usize,
}

#[derive(Serialize)]
struct Labelled {
    #[serde(rename = "E1+")]
    e1_plus: f64,
    #[serde(rename = "E1-")]
    e1_minus: f64,
    #[serde(rename = "E2+")]
    e2_plus: f64,
    #[serde(rename = "E2-")]
    e2_minus: f64,
}

#[derive(Serialize)]
struct SpectrumOut {
    params: ModelParams,
    eigenvalues: Vec<f64>,
    levels: Vec<LevelOut>,
    labelled: Labelled,
    splitting: Splitting,
    rank: usize,
    reconstruction_residual: f64,
    warnings: Vec<String>,
}

fn cmd_spectrum(s: &Settings, mp: &ModelParams) -> Result<Report, Failure> {
    let spec = spectrum(mp)?;
    let [e1p, e1m, e2p, e2m] = mp.labelled_energies();
    let out = SpectrumOut {
        params: *mp,
        eigenvalues: spec.eigen.values.clone(),
        levels: spec
            .levels
            .iter()
            .map(|l| LevelOut {
                energy: l.energy,
                multiplicity: l.multiplicity,
            })
            .collect(),
        labelled: Labelled {
            e1_plus: e1p,
            e1_minus: e1m,
            e2_plus: e2p,
            e2_minus: e2m,
        },
        splitting: splitting(mp),
        rank: spec.rank(s.tol_eig),
        reconstruction_residual: spec.eigen.residual(&build_h(mp))?,
        warnings: mp.warnings(),
    };
    let stdout = match s.format_or(Format::Json) {
        Format::Json => json(&out),
        f => {
            let mut t = Table::new(&["energy", "multiplicity"]);
            for l in &out.levels {
                t.push(vec![num(l.energy), l.multiplicity.to_string()]);
            }
            t.render(f)
        }
    };
    Ok(with_warnings(stdout, &out.warnings))
}

fn with_warnings(stdout: String, warnings: &[String]) -> Report {
    let mut r = Report::ok(stdout);
    for w in warnings {
        r.stderr.push_str(&format!("warning: {w}\n"));
    }
    r
}

// ---- evolve ----

#[derive(Serialize)]
struct Sample {
    t: f64,
    p_e1: f64,
    p_e3: f64,
    leak: f64,
}

#[derive(Serialize)]
struct EvolveOut {
    params: ModelParams,
    tau: f64,
    t_max: f64,
    steps: usize,
    samples: Vec<Sample>,
}

fn evolve(s: &Settings, mp: &ModelParams, t_max: Option<f64>, steps: usize) -> Result<Report, Failure> {
    if steps < 2 {
        return Err(Failure::Usage(format!("steps must be at least 2, got {steps}")));
    }
    if let Some(t) = t_max {
        if !t.is_finite() || t < 0.0 {
            return Err(Failure::Usage(format!("t-max must be finite and >= 0, got {t}")));
        }
    }
    let tau = tunneling_time(mp)?;
    let t_max = t_max.unwrap_or(tau);
    let tr = tunneling_trace(mp, t_max, steps)?;
    let out = EvolveOut {
        params: *mp,
        tau,
        t_max,
        steps,
        samples: (0..tr.len())
            .map(|k| Sample {
                t: tr.times[k],
                p_e1: tr.p_e1[k],
                p_e3: tr.p_e3[k],
                leak: tr.leak[k],
            })
            .collect(),
    };
    let stdout = match s.format_or(Format::Csv) {
        Format::Json => json(&out),
        f => {
            let mut t = Table::new(&["t", "p_e1", "p_e3", "leak"]);
            for r in &out.samples {
                t.push(vec![num(r.t), num(r.p_e1), num(r.p_e3), num(r.leak)]);
            }
            t.render(f)
        }
    };
    Ok(with_warnings(stdout, &mp.warnings()))
}

// ---- zeno ----

#[derive(Serialize)]
struct ZenoOut {
    params: ModelParams,
    tau: f64,
    runs: Vec<ZenoRun>,
}

fn zeno(s: &Settings, mp: &ModelParams, ns: &[u32]) -> Result<Report, Failure> {
    let tau = tunneling_time(mp)?;
    let basis = spectral_basis(mp)?;
    let prop = Propagator::new(mp)?;
    let runs = ns
        .iter()
        .map(|&n| zeno_run_with(mp, &basis, &prop, n))
        .collect::<tlspin_core::Result<Vec<_>>>()?;
    let out = ZenoOut { params: *mp, tau, runs };
    let stdout = match s.format_or(Format::Csv) {
        Format::Json => json(&out),
        f => {
            let mut t = Table::new(&["n", "survival_exact", "survival_analytic", "survival_limit"]);
            for r in &out.runs {
                t.push(vec![
                    r.n.to_string(),
                    num(r.survival_exact),
                    num(r.survival_analytic),
                    num(r.survival_limit),
                ]);
            }
            t.render(f)
        }
    };
    Ok(with_warnings(stdout, &mp.warnings()))
}

// ---- well ----

#[derive(Serialize)]
struct SweepRow {
    value: f64,
    xi: f64,
    #[serde(rename = "J")]
    j: f64,
    delta: f64,
    /// `null` once delta underflows.
    tau: Option<f64>,
    independent_wells: bool,
}

#[derive(Serialize)]
struct SweepOut {
    param: &'static str,
    base: WellParams,
    threshold: f64,
    rows: Vec<SweepRow>,
}

const ANNOTATION: &str = "independent wells";

fn cmd_well(s: &Settings, w: &WellParams, sweep: Option<&SweepSpec>) -> Result<Report, Failure> {
    let Some(spec) = sweep else {
        let map = map_well(w);
        if !map.is_usable() {
            return Err(Failure::Domain(format!(
                "delta = {} underflows for V0 = {}: the wells are independent and tau is infinite",
                map.delta, w.v0
            )));
        }
        let stdout = match s.format_or(Format::Json) {
            Format::Json => json(&map),
            f => {
                let mut t = Table::new(&["xi", "J", "delta", "delta_freq", "tau"]);
                t.push(vec![num(map.xi), num(map.j), num(map.delta), num(map.delta_freq), num(map.tau)]);
                t.render(f)
            }
        };
        return Ok(Report::ok(stdout));
    };

    let values = spec.values();
    let points: Vec<WellParams> = values
        .iter()
        .map(|&v| match spec.param {
            SweepParam::V0 => w.with_v0(v),
            SweepParam::A => w.with_a(v),
        })
        .collect::<tlspin_core::Result<_>>()
        .map_err(|e| Failure::Usage(format!("sweep {spec}: {e}")))?;
    let limit: Option<Vec<LimitRow>> = match spec.param {
        SweepParam::V0 => Some(independent_wells_limit(w, &values)?),
        SweepParam::A => None,
    };
    let rows: Vec<SweepRow> = points
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(k, (p, &value))| {
            let map = map_well(p);
            let independent = match &limit {
                Some(l) => l[k].independent_wells,
                None => map.delta < INDEPENDENT_WELLS_THRESHOLD,
            };
            SweepRow {
                value,
                xi: map.xi,
                j: map.j,
                delta: map.delta,
                tau: map.tau.is_finite().then_some(map.tau),
                independent_wells: independent,
            }
        })
        .collect();
    let out = SweepOut {
        param: spec.param.name(),
        base: *w,
        threshold: INDEPENDENT_WELLS_THRESHOLD,
        rows,
    };
    let stdout = match s.format_or(Format::Csv) {
        Format::Json => json(&out),
        f => {
            let mut t = Table::new(&[spec.param.name(), "xi", "J", "delta", "tau", "annotation"]);
            for r in &out.rows {
                t.push(vec![
                    num(r.value),
                    num(r.xi),
                    num(r.j),
                    num(r.delta),
                    r.tau.map(num).unwrap_or_else(|| "inf".into()),
                    if r.independent_wells { ANNOTATION.into() } else { String::new() },
                ]);
            }
            t.render(f)
        }
    };
    Ok(Report::ok(stdout))
}

// ---- diagram ----

#[derive(Serialize)]
struct DiagramOut {
    expr: String,
    kind: &'static str,
    dim: usize,
    shape: [usize; 2],
    top: Vec<u8>,
    bottom: Vec<u8>,
    params: TLParams,
    data: Vec<[f64; 2]>,
}

fn diagram(s: &Settings, src: &str, p: &TLParams) -> Result<Report, Failure> {
    let d = parse(src)?;
    let value = evaluate(&d, p)?;
    let (rows, cols) = value.shape();
    let dim = match value {
        EvalResult::CoState { .. } => cols,
        _ => rows,
    };
    let out = DiagramOut {
        expr: d.to_string(),
        kind: value.kind(),
        dim,
        shape: [rows, cols],
        top: value.top_sites(),
        bottom: value.bottom_sites(),
        params: *p,
        data: value.data().iter().map(|z| [z.re, z.im]).collect(),
    };
    let stdout = match s.format_or(Format::Json) {
        Format::Json => json(&out),
        f => {
            let mut t = Table::new(&["row", "col", "re", "im"]);
            for (k, z) in out.data.iter().enumerate() {
                t.push(vec![(k / cols).to_string(), (k % cols).to_string(), num(z[0]), num(z[1])]);
            }
            t.render(f)
        }
    };
    Ok(Report::ok(stdout))
}
