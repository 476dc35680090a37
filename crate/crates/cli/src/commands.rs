use std::path::Path;
use std::process::ExitCode;

use serde_json::{json, Value};
use stabgap::averages::{
    expected_gap_random_subspace, extrinsic_ase, extrinsic_ase_embedding, group_intrinsic_ase,
    intrinsic_ase_dim, Embedding, SubspaceProjector,
};
use stabgap::codes::{
    a_set, builtin_codes, classify_gap, code_gap_closed_form, codespace_projector, zd_gauge_set, Homomorphism,
    IsotropicSet,
};
use stabgap::encodings::{
    majorana_roots, roots_to_bloch, roots_to_product_state, separable_qubit_ase, separable_qubit_se,
    spin_zero_projector, symmetric_qubit_embedding, symmetrized_product, SpinState, Star,
};
use stabgap::estimate::{
    complement_basis, haar_embedding, haar_state, loglog_slope, mc_ase, mc_ase_projector, mc_ase_runs,
    mc_convergence_curve, mc_separable_ase, optimal_complement_per_state, optimal_fixed_complement, stream_rng,
    subspace_ensemble_stats, SubspaceAverage,
};
use stabgap::io::{load_embedding, load_isotropic, load_projector, EmbeddingJson};
use stabgap::magic::{linear_se, renyi_se, robustness_lower_bound, se_upper_bound, st_norm, PureState};
use stabgap::optimize::{extremal_sweep, extremize_ase, Direction, Objective, OptimizerConfig};
use stabgap::{Complex64, Error, Flavor, HilbertSpec};

use crate::output::{Report, Row};
use crate::{
    AseCmd, AseCommon, CodeArgs, ComplementCmd, ExamplesCmd, GapCmd, McCmd, OptArgs, OptimizeCmd, SeCmd, Space,
};

pub struct CliError(Error);

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        if self.0.is_io() {
            ExitCode::from(2)
        } else {
            ExitCode::from(1)
        }
    }
}

type Out = Result<Report, CliError>;

/// Largest host dimension for which dense codespace projectors are built.
const DENSE_LIMIT: usize = 1024;

fn domain(msg: impl Into<String>) -> CliError {
    CliError(Error::Domain(msg.into()))
}

impl Space {
    fn spec(&self) -> Result<HilbertSpec, CliError> {
        Ok(match &self.flavor {
            Some(f) => HilbertSpec::new(self.d, self.n, Flavor::parse(f)?)?,
            None => HilbertSpec::multiqudit(self.d, self.n)?,
        })
    }
}

fn space_params(r: Report, spec: &HilbertSpec) -> Report {
    r.param("d", spec.d()).param("n", spec.n()).param("flavor", spec.flavor().name())
}

fn small_flavor(given: &Option<String>, ds: usize) -> Result<Flavor, CliError> {
    Ok(match given {
        Some(f) => Flavor::parse(f)?,
        None => Flavor::qudit_for(ds),
    })
}

fn parse_spin(s: &str) -> Result<u32, CliError> {
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| domain(format!("bad spin {s:?}")))?;
            let b: f64 = b.trim().parse().map_err(|_| domain(format!("bad spin {s:?}")))?;
            a / b
        }
        None => s.trim().parse().map_err(|_| domain(format!("bad spin {s:?}")))?,
    };
    let two_j = (2.0 * value).round();
    if !(value > 0.0) || (2.0 * value - two_j).abs() > 1e-9 || two_j > 64.0 {
        return Err(domain(format!("spin {s} must be a positive half-integer")));
    }
    Ok(two_j as u32)
}

fn spin_label(two_j: u32) -> String {
    if two_j % 2 == 0 {
        (two_j / 2).to_string()
    } else {
        format!("{two_j}/2")
    }
}

fn parse_amplitudes(text: &str) -> Result<Vec<Complex64>, CliError> {
    let pairs: Vec<[f64; 2]> =
        serde_json::from_str(text).map_err(|e| domain(format!("amplitudes must be a JSON list of [re, im]: {e}")))?;
    Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

fn named_state(spec: &HilbertSpec, name: &str, seed: u64) -> Result<PureState, CliError> {
    let d = spec.d();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let local: Vec<Complex64> = match name {
        "random" => return Ok(haar_state(spec.dim(), &mut stream_rng(seed, 0))?),
        "zero" => (0..d).map(|k| c(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect(),
        "plus" => vec![c(1.0 / (d as f64).sqrt(), 0.0); d],
        "t" if d == 2 => vec![c(r, 0.0), Complex64::from_polar(r, std::f64::consts::FRAC_PI_4)],
        "h" if d == 2 => {
            let a = std::f64::consts::PI / 8.0;
            vec![c(a.cos(), 0.0), c(a.sin(), 0.0)]
        }
        "strange" if d == 3 => vec![c(0.0, 0.0), c(r, 0.0), c(-r, 0.0)],
        "t" | "h" => return Err(domain(format!("state `{name}` needs d = 2"))),
        "strange" => return Err(domain("state `strange` needs d = 3")),
        other => return Err(domain(format!("unknown state `{other}`"))),
    };
    let one = PureState::new(local)?;
    let mut psi = one.clone();
    for _ in 1..spec.n() {
        psi = psi.tensor(&one);
    }
    Ok(psi)
}

pub fn se(cmd: SeCmd) -> Out {
    match cmd {
        SeCmd::State { space, state, amplitudes, alpha, seed } => {
            let spec = space.spec()?;
            let (psi, label) = match amplitudes {
                Some(text) => (PureState::normalized(parse_amplitudes(&text)?)?, "explicit".to_string()),
                None => (named_state(&spec, &state, seed)?, state.clone()),
            };
            let m = linear_se(&spec, &psi)?;
            let mut row = Row::new()
                .exact("M", m)
                .num("st_norm", st_norm(&spec, &psi)?)
                .num("robustness_lower_bound", robustness_lower_bound(m)?);
            for a in alpha {
                row = row.num(&format!("renyi_{a}"), renyi_se(&spec, &psi, a)?);
            }
            let mut r = space_params(Report::new(), &spec).param("state", label);
            if state == "random" {
                r = r.param("seed", seed);
            }
            Ok(r.row(row))
        }
        SeCmd::Bound { space, alpha } => {
            let spec = space.spec()?;
            Ok(space_params(Report::new(), &spec)
                .param("alpha", alpha)
                .row(Row::new().num("upper_bound", se_upper_bound(&spec, alpha)?)))
        }
    }
}

fn ase_report(p: &SubspaceProjector, common: &AseCommon, source: &Path) -> Out {
    let ds = p.rank();
    let flavor = small_flavor(&common.small_flavor, ds)?;
    let intrinsic = intrinsic_ase_dim(ds, flavor)?;
    let r = space_params(Report::new(), p.big())
        .param("input", source.display().to_string())
        .param("d_small", ds)
        .param("small_flavor", flavor.name());
    if common.mode.mc {
        let est = mc_ase_projector(p, common.samples, common.seed)?;
        return Ok(r.param("method", "monte-carlo").param("samples", est.samples).param("seed", est.seed).row(
            Row::new()
                .num("extrinsic", est.mean)
                .num("stderr", est.stderr)
                .exact("intrinsic", intrinsic)
                .num("gap", est.mean - intrinsic),
        ));
    }
    let ext = extrinsic_ase(p)?;
    Ok(r.param("method", "exact")
        .row(Row::new().exact("extrinsic", ext).exact("intrinsic", intrinsic).exact("gap", ext - intrinsic)))
}

pub fn ase(cmd: AseCmd) -> Out {
    match cmd {
        AseCmd::Intrinsic { space } => {
            let spec = space.spec()?;
            Ok(space_params(Report::new(), &spec)
                .param("dim", spec.dim())
                .row(Row::new().exact("intrinsic", group_intrinsic_ase(&spec))))
        }
        AseCmd::Projector { file, common } => {
            let p = load_projector(&file)?;
            ase_report(&p, &common, &file)
        }
        AseCmd::Embedding { file, common } => {
            let e = load_embedding(&file)?;
            if common.mode.mc {
                return ase_report(&e.projector(), &common, &file);
            }
            let ds = e.small_dim();
            let flavor = small_flavor(&common.small_flavor, ds)?;
            let ext = extrinsic_ase_embedding(&e)?;
            let intrinsic = intrinsic_ase_dim(ds, flavor)?;
            Ok(space_params(Report::new(), e.big())
                .param("input", file.display().to_string())
                .param("d_small", ds)
                .param("small_flavor", flavor.name())
                .param("method", "exact")
                .row(Row::new().exact("extrinsic", ext).exact("intrinsic", intrinsic).exact("gap", ext - intrinsic)))
        }
    }
}

pub fn gap(cmd: GapCmd) -> Out {
    match cmd {
        GapCmd::Code(args) => code(&args),
        GapCmd::Projector { file, common } => {
            let p = load_projector(&file)?;
            ase_report(&p, &common, &file)
        }
        GapCmd::Random { space, d_small, small_flavor: sf } => {
            let spec = space.spec()?;
            let flavor = small_flavor(&sf, d_small)?;
            let g = expected_gap_random_subspace(&spec, d_small, flavor)?;
            Ok(space_params(Report::new(), &spec)
                .param("d_small", d_small)
                .param("small_flavor", flavor.name())
                .row(
                    Row::new()
                        .exact("intrinsic_big", group_intrinsic_ase(&spec))
                        .exact("intrinsic_small", intrinsic_ase_dim(d_small, flavor)?)
                        .exact("expected_gap", g),
                ))
        }
    }
}

fn code_row(set: &IsotropicSet, f: &Homomorphism, flavor: Flavor) -> Result<Row, CliError> {
    let ds = set.small_dim();
    let intrinsic = intrinsic_ase_dim(ds, flavor)?;
    let (class, reason) = classify_gap(set, flavor);
    let mut row = Row::new()
        .val("set_size", set.len())
        .val("d_small", ds)
        .val("a_set_size", a_set(set)?.len())
        .val("trivial_character", f.is_trivial())
        .exact("intrinsic", intrinsic);
    if f.is_trivial() {
        row = row.exact("closed_form_gap", code_gap_closed_form(set, f, flavor)?);
    }
    if set.spec().dim() <= DENSE_LIMIT {
        let ext = extrinsic_ase(&codespace_projector(set, f)?)?;
        row = row.exact("extrinsic", ext).exact("gap", ext - intrinsic);
    }
    Ok(row.val("class", format!("{class:?}").to_lowercase()).val("reason", reason))
}

pub fn code(args: &CodeArgs) -> Out {
    let (set, f, source) = match (&args.builtin, &args.file) {
        (Some(name), None) => {
            let set = builtin_codes()
                .remove(name.as_str())
                .ok_or_else(|| domain(format!("unknown built-in code `{name}` (have 422, 412)")))?;
            let f = Homomorphism::trivial(&set);
            (set, f, format!("builtin:{name}"))
        }
        (None, Some(path)) => {
            let (s, f) = load_isotropic(path)?;
            (s, f, path.display().to_string())
        }
        _ => return Err(domain("give exactly one of --builtin or --file")),
    };
    let flavor = small_flavor(&args.small_flavor, set.small_dim())?;
    let generators: Vec<Value> = set.generators().iter().map(|g| json!(g.components())).collect();
    Ok(space_params(Report::new(), set.spec())
        .param("code", source)
        .param("small_flavor", flavor.name())
        .row(code_row(&set, &f, flavor)?)
        .extra("generators", Value::Array(generators)))
}

fn config(opt: &OptArgs, direction: Direction) -> OptimizerConfig {
    let objective = if opt.mode.mc {
        Objective::MonteCarlo { samples: opt.samples, seed: opt.seed }
    } else if opt.mode.exact {
        Objective::Exact
    } else {
        Objective::Auto
    };
    OptimizerConfig {
        restarts: opt.restarts,
        max_iters: opt.max_iters,
        objective,
        direction,
        seed: opt.seed,
        ..Default::default()
    }
}

fn opt_params(r: Report, opt: &OptArgs, cfg: &OptimizerConfig) -> Report {
    let objective = match cfg.objective {
        Objective::Exact => "exact".to_string(),
        Objective::Auto => "auto".to_string(),
        Objective::MonteCarlo { samples, .. } => format!("monte-carlo:{samples}"),
    };
    r.param("restarts", opt.restarts).param("max_iters", opt.max_iters).param("seed", opt.seed).param("objective", objective)
}

pub fn optimize(cmd: OptimizeCmd) -> Out {
    match cmd {
        OptimizeCmd::Extremize { space, d_small, maximize, opt, save } => {
            let spec = space.spec()?;
            let direction = if maximize { Direction::Maximize } else { Direction::Minimize };
            let cfg = config(&opt, direction);
            let res = extremize_ase(&spec, d_small, &cfg)?;
            if let Some(path) = &save {
                let text = serde_json::to_string_pretty(&EmbeddingJson::from_embedding(&res.embedding))
                    .map_err(|e| CliError(Error::Internal(e.to_string())))?;
                std::fs::write(path, text).map_err(|e| CliError(Error::Io(format!("{}: {e}", path.display()))))?;
            }
            let small = intrinsic_ase_dim(d_small, Flavor::qudit_for(d_small))?;
            let restart_values: Vec<Value> = res.restart_values.iter().map(|&v| crate::output::sig12(v)).collect();
            Ok(opt_params(space_params(Report::new(), &spec), &opt, &cfg)
                .param("d_small", d_small)
                .param("direction", if maximize { "maximize" } else { "minimize" })
                .row(
                    Row::new()
                        .num("value", res.value)
                        .exact("intrinsic_small", small)
                        .exact("intrinsic_big", group_intrinsic_ase(&spec))
                        .num("gap", res.value - small)
                        .val("unconverged_restarts", res.unconverged),
                )
                .extra("restart_values", Value::Array(restart_values)))
        }
        OptimizeCmd::Sweep { space, from, to, opt } => {
            let spec = space.spec()?;
            let to = to.unwrap_or(spec.dim());
            if from == 0 || from > to || to > spec.dim() {
                return Err(domain(format!("need 1 <= from <= to <= {}", spec.dim())));
            }
            let cfg = config(&opt, Direction::Minimize);
            let dims: Vec<usize> = (from..=to).collect();
            let rep = extremal_sweep(&spec, &dims, &cfg)?;
            let mut r = opt_params(space_params(Report::new(), &spec), &opt, &cfg);
            for row in &rep.rows {
                r.push(
                    Row::new()
                        .val("d_S", row.d_s)
                        .num("min_ase", row.min_ase)
                        .num("max_ase", row.max_ase)
                        .num("intrinsic_small", row.intrinsic_small)
                        .num("intrinsic_big", row.intrinsic_big),
                );
            }
            Ok(r.extra("findings", json!(rep.findings)))
        }
    }
}

pub fn mc(cmd: McCmd) -> Out {
    match cmd {
        McCmd::Ase { projector, embedding, samples, runs, seed } => {
            let (emb, source) = match (projector, embedding) {
                (Some(p), None) => (load_projector(&p)?.isometry()?, p),
                (None, Some(e)) => (load_embedding(&e)?, e),
                _ => return Err(domain("give exactly one of --projector or --embedding")),
            };
            let r = space_params(Report::new(), emb.big())
                .param("input", source.display().to_string())
                .param("d_small", emb.small_dim())
                .param("samples", samples)
                .param("runs", runs)
                .param("seed", seed);
            if runs > 1 {
                let res = mc_ase_runs(&emb, runs, samples, seed)?;
                Ok(r.row(Row::new().num("mean", res.mean).num("run_std", res.run_std).num("stderr", res.stderr)))
            } else {
                let res = mc_ase(&emb, samples, seed)?;
                Ok(r.row(Row::new().num("mean", res.mean).num("stderr", res.stderr)))
            }
        }
        McCmd::Curve { space, d_small, grid, repetitions, seed } => {
            let spec = space.spec()?;
            let emb = haar_embedding(&spec, d_small, &mut stream_rng(seed, u64::MAX))?;
            let curve = mc_convergence_curve(&emb, &grid, repetitions, seed)?;
            let mut r = space_params(Report::new(), &spec)
                .param("d_small", d_small)
                .param("repetitions", repetitions)
                .param("seed", seed)
                .param("exact", crate::output::sig12(extrinsic_ase_embedding(&emb)?));
            for &(s, err) in &curve {
                r.push(Row::new().val("samples", s).num("median_squared_error", err));
            }
            Ok(r.extra("loglog_slope", crate::output::sig12(loglog_slope(&curve)?)))
        }
        McCmd::Ensemble { space, d_small, subspaces, mode, samples, seed } => {
            let spec = space.spec()?;
            let method = if mode.mc { SubspaceAverage::MonteCarlo { samples } } else { SubspaceAverage::Exact };
            let s = subspace_ensemble_stats(&spec, d_small, subspaces, method, seed)?;
            let want = group_intrinsic_ase(&spec);
            Ok(space_params(Report::new(), &spec)
                .param("d_small", d_small)
                .param("subspaces", subspaces)
                .param("method", if mode.mc { format!("monte-carlo:{samples}") } else { "exact".into() })
                .param("seed", seed)
                .row(
                    Row::new()
                        .num("mean", s.mean)
                        .num("std", s.std)
                        .num("stderr", s.stderr)
                        .exact("intrinsic_big", want)
                        .num("z_score", (s.mean - want) / s.stderr),
                ))
        }
    }
}

fn kappa_json(k: &[Complex64]) -> Value {
    Value::Array(k.iter().map(|z| json!([crate::output::sig12(z.re), crate::output::sig12(z.im)])).collect())
}

pub fn complement(cmd: ComplementCmd) -> Out {
    match cmd {
        ComplementCmd::PerState { embedding, amplitudes, restarts, seed } => {
            let emb = load_embedding(&embedding)?;
            complement_basis(&emb)?;
            let psi = match amplitudes {
                Some(t) => PureState::normalized(parse_amplitudes(&t)?)?,
                None => haar_state(emb.small_dim(), &mut stream_rng(seed, u64::MAX))?,
            };
            let encoded = emb.encode(psi.amplitudes())?;
            let base = linear_se(emb.big(), &PureState::normalized(encoded)?)?;
            let (kappa, best) = optimal_complement_per_state(&emb, &psi, restarts, seed)?;
            Ok(space_params(Report::new(), emb.big())
                .param("embedding", embedding.display().to_string())
                .param("restarts", restarts)
                .param("seed", seed)
                .row(Row::new().num("se_in_subspace", base).num("se_with_complement", best))
                .extra("kappa", kappa_json(&kappa)))
        }
        ComplementCmd::Fixed { embedding, samples, restarts, seed } => {
            let emb = load_embedding(&embedding)?;
            let base = mc_ase(&emb, samples, seed)?;
            let (kappa, res) = optimal_fixed_complement(&emb, samples, restarts, seed)?;
            Ok(space_params(Report::new(), emb.big())
                .param("embedding", embedding.display().to_string())
                .param("samples", samples)
                .param("restarts", restarts)
                .param("seed", seed)
                .row(
                    Row::new()
                        .num("ase_in_subspace", base.mean)
                        .num("ase_with_fixed_complement", res.mean)
                        .num("stderr", res.stderr),
                )
                .extra("kappa", kappa_json(&kappa)))
        }
    }
}

fn embedding_gap_row(label: &str, emb: &Embedding, flavor: Flavor) -> Result<Row, CliError> {
    let ext = extrinsic_ase_embedding(emb)?;
    let intrinsic = intrinsic_ase_dim(emb.small_dim(), flavor)?;
    Ok(Row::new()
        .val("host", label)
        .val("small_flavor", flavor.name())
        .exact("extrinsic", ext)
        .exact("intrinsic", intrinsic)
        .exact("gap", ext - intrinsic))
}

pub fn examples(cmd: ExamplesCmd) -> Out {
    match cmd {
        ExamplesCmd::Gss => {
            let qubits = HilbertSpec::qubits(3)?;
            let qudit = HilbertSpec::qudit(8)?;
            let a = stabgap::encodings::gss_embedding(&qubits)?;
            let b = stabgap::encodings::gss_embedding(&qudit)?;
            Ok(Report::new()
                .param("example", "gss")
                .param("d_small", 2)
                .row(embedding_gap_row("3 qubits", &a, Flavor::Multiqubit)?)
                .row(embedding_gap_row("qudit 8", &b, Flavor::EvenQudit)?))
        }
        ExamplesCmd::SymQubits { max_spin, mc, samples, seed } => {
            let max_two_j = parse_spin(&max_spin)?;
            if max_two_j > 8 {
                return Err(domain("max spin above 4 needs more than 256 host dimensions"));
            }
            let mut r = Report::new().param("example", "sym-qubits").param("max_spin", spin_label(max_two_j));
            if mc {
                r = r.param("samples", samples).param("seed", seed);
            }
            for two_j in 1..=max_two_j {
                let emb = symmetric_qubit_embedding(two_j)?;
                let ds = two_j as usize + 1;
                let flavor = Flavor::qudit_for(ds);
                let intrinsic = intrinsic_ase_dim(ds, flavor)?;
                let sym = extrinsic_ase_embedding(&emb)?;
                let sep = separable_qubit_ase(two_j);
                let mut row = Row::new()
                    .val("j", spin_label(two_j))
                    .val("d_small", ds)
                    .exact("intrinsic", intrinsic)
                    .exact("symmetrized", sym)
                    .num("separable", sep)
                    .exact("symmetrized_gap", sym - intrinsic)
                    .num("separable_gap", sep - intrinsic);
                if mc {
                    let est = mc_separable_ase(two_j, samples, seed)?;
                    row = row.num("separable_mc", est.mean).num("separable_mc_stderr", est.stderr);
                }
                r.push(row);
            }
            Ok(r)
        }
        ExamplesCmd::Majorana { spin, amplitudes, seed } => {
            let two_j = parse_spin(&spin)?;
            let amps = match amplitudes {
                Some(t) => parse_amplitudes(&t)?,
                None => haar_state(two_j as usize + 1, &mut stream_rng(seed, 0))?.into_amplitudes(),
            };
            let psi = SpinState::new(two_j, amps)?;
            let stars = majorana_roots(&psi)?;
            let sym = symmetrized_product(&roots_to_product_state(&stars))?;
            let encoded = symmetric_qubit_embedding(two_j)?.encode(psi.amplitudes())?;
            let overlap: Complex64 = encoded.iter().zip(&sym).map(|(a, b)| a.conj() * b).sum();
            let mut r = Report::new()
                .param("example", "majorana")
                .param("j", spin_label(two_j))
                .param("seed", seed)
                .extra("round_trip_fidelity", crate::output::sig12(overlap.norm_sqr()))
                .extra("separable_se", crate::output::sig12(separable_qubit_se(&psi)?));
            for (i, star) in stars.stars().iter().enumerate() {
                let [x, y, z] = roots_to_bloch(*star);
                let root = match star {
                    Star::Finite(a) => json!([crate::output::sig12(a.re), crate::output::sig12(a.im)]),
                    Star::Infinity => json!("inf"),
                };
                r.push(Row::new().val("star", i).val("root", root).num("x", x).num("y", y).num("z", z));
            }
            Ok(r)
        }
        ExamplesCmd::Polyhedron { faces, spin, mode, runs, samples, seed } => {
            let two_j = parse_spin(&spin)?;
            if faces < 2 {
                return Err(domain("a polyhedron needs at least 2 faces"));
            }
            let projector = spin_zero_projector(&vec![two_j; faces])?;
            let emb = projector.isometry()?;
            let ds = emb.small_dim();
            let flavor = Flavor::qudit_for(ds);
            let intrinsic = if ds == 1 { 0.0 } else { intrinsic_ase_dim(ds, flavor)? };
            let r = space_params(Report::new(), emb.big())
                .param("example", "polyhedron")
                .param("faces", faces)
                .param("spin", spin_label(two_j))
                .param("d_small", ds);
            let use_mc = mode.mc || (!mode.exact && emb.big().dim() > 256);
            if use_mc {
                let res = mc_ase_runs(&emb, runs, samples, seed)?;
                return Ok(r.param("method", "monte-carlo").param("runs", runs).param("samples", samples).param("seed", seed).row(
                    Row::new()
                        .num("extrinsic", res.mean)
                        .num("run_std", res.run_std)
                        .num("stderr", res.stderr)
                        .exact("intrinsic", intrinsic)
                        .num("gap", res.mean - intrinsic),
                ));
            }
            let ext = extrinsic_ase_embedding(&emb)?;
            Ok(r.param("method", "exact")
                .row(Row::new().exact("extrinsic", ext).exact("intrinsic", intrinsic).exact("gap", ext - intrinsic)))
        }
        ExamplesCmd::Gauge { d, n } => {
            let set = zd_gauge_set(d, n)?;
            let f = Homomorphism::trivial(&set);
            let mut r = space_params(Report::new(), set.spec()).param("example", "gauge");
            let ds = set.small_dim();
            let mut flavors = vec![Flavor::qudit_for(ds)];
            if ds.is_power_of_two() && ds > 1 {
                flavors.push(Flavor::Multiqubit);
            }
            for flavor in flavors {
                r.push(code_row(&set, &f, flavor)?.val("small_flavor", flavor.name()));
            }
            Ok(r)
        }
        ExamplesCmd::Code422 => {
            let codes = builtin_codes();
            let mut r = Report::new().param("example", "422");
            let cases = [("422", Flavor::Multiqubit), ("422", Flavor::EvenQudit), ("412", Flavor::EvenQudit)];
            for (name, flavor) in cases {
                let set = &codes[name];
                let f = Homomorphism::trivial(set);
                r.push(code_row(set, &f, flavor)?.val("code", name).val("small_flavor", flavor.name()));
            }
            Ok(r)
        }
    }
}
