//! Experiment runners: parse the config, dispatch, emit artifacts
//! (JSON/CSV/SVG) and a manifest with content hashes. Partial artifacts
//! are removed on failure.

use crate::plots::LogLogPlot;
use crate::Cli;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use vfl_algebra as alg;
use vfl_algebra::instances::{random_death_birth, random_handleslide};
use vfl_core::divisor::Divisor;
use vfl_core::solver;
use vfl_core::torus::FlatTorus;
use vfl_core::transport::{transport, ModulusPath};

pub struct RunError {
    pub message: String,
    pub pointer: String,
    pub exit_code: u8,
}

impl RunError {
    fn config(msg: impl Into<String>, pointer: impl Into<String>) -> Self {
        RunError { message: msg.into(), pointer: pointer.into(), exit_code: 2 }
    }

    fn compute(msg: impl Into<String>) -> Self {
        RunError { message: msg.into(), pointer: String::new(), exit_code: 1 }
    }
}

/// Artifact collector: files land on disk only through this, so a failure
/// can remove everything it created.
struct Artifacts {
    dir: PathBuf,
    written: Vec<(String, String)>, // (relative name, sha256)
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self, RunError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| RunError::config(format!("output dir: {e}"), "/output_dir"))?;
        Ok(Artifacts { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)
            .map_err(|e| RunError::compute(format!("writing {name}: {e}")))?;
        let mut h = Sha256::new();
        h.update(bytes);
        self.written.push((name.to_string(), hex::encode(h.finalize())));
        Ok(())
    }

    fn finish(mut self) -> Result<(), RunError> {
        let manifest: Vec<_> = self
            .written
            .iter()
            .map(|(name, sha)| serde_json::json!({"path": name, "sha256": sha}))
            .collect();
        let text = serde_json::to_string_pretty(&serde_json::json!({ "artifacts": manifest }))
            .unwrap();
        self.write("manifest.json", text.as_bytes())?;
        Ok(())
    }

    fn abort(self) {
        for (name, _) in &self.written {
            let _ = std::fs::remove_file(self.dir.join(name));
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), RunError> {
    let mut artifacts = Artifacts::new(&cli.out)?;
    let result = dispatch(cli, &mut artifacts);
    match result {
        Ok(()) => artifacts.finish(),
        Err(e) => {
            artifacts.abort();
            Err(e)
        }
    }
}

fn dispatch(cli: &Cli, artifacts: &mut Artifacts) -> Result<(), RunError> {
    match cli.kind.as_str() {
        "solve" => run_solve(cli, artifacts),
        "transport" => run_transport(cli, artifacts),
        "decay-study" => run_decay_study(cli, artifacts),
        "symprod" => run_symprod(cli, artifacts),
        "lefschetz" => run_lefschetz(cli, artifacts),
        "nielsen" => run_nielsen(cli, artifacts),
        "bifurcation" => run_bifurcation(cli, artifacts),
        "spinc" => run_spinc(cli, artifacts),
        other => Err(RunError::config(format!("unknown kind {other:?}"), "/kind")),
    }
}

// --- config schemas (External Interfaces) ---

#[derive(Deserialize)]
struct TorusConfig {
    modulus_re: f64,
    modulus_im: f64,
    grid_n: usize,
}

impl TorusConfig {
    fn build(&self) -> Result<FlatTorus, RunError> {
        FlatTorus::new(Complex64::new(self.modulus_re, self.modulus_im), self.grid_n)
            .map_err(|e| RunError::config(e.to_string(), "/torus"))
    }
}

#[derive(Deserialize)]
struct SolveConfig {
    torus: TorusConfig,
    tau: f64,
    divisor: Vec<(f64, f64, u32)>,
    #[serde(default)]
    dump_fields: bool,
}

#[derive(Deserialize)]
struct PathConfig {
    rho0: (f64, f64),
    rho1: (f64, f64),
}

#[derive(Deserialize)]
struct TransportConfig {
    torus: TorusConfig,
    tau: f64,
    divisor: Vec<(f64, f64, u32)>,
    path: PathConfig,
    steps: usize,
}

#[derive(Deserialize)]
struct DecayConfig {
    torus: TorusConfig,
    taus: Vec<f64>,
    point: (f64, f64),
}

#[derive(Deserialize)]
struct BifurcationConfig {
    instances: usize,
    max_generators: usize,
    cutoff: f64,
}

fn load_config<T: serde::de::DeserializeOwned>(cli: &Cli) -> Result<T, RunError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| RunError::config("--config FILE is required for this kind", "/config"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::config(format!("reading config: {e}"), "/config"))?;
    serde_json::from_str(&text).map_err(|e| {
        RunError::config(format!("config schema: {e}"), format!("/{}", e.line()))
    })
}

fn divisor_from(entries: &[(f64, f64, u32)]) -> Result<Divisor, RunError> {
    let list: Vec<((f64, f64), u32)> =
        entries.iter().map(|&(x, y, m)| ((x, y), m)).collect();
    Divisor::new(&list).map_err(|e| RunError::config(e.to_string(), "/divisor"))
}

fn flag<T: std::str::FromStr>(cli: &Cli, name: &str) -> Result<T, RunError> {
    let raw = cli
        .flags
        .get(name)
        .ok_or_else(|| RunError::config(format!("--{name} is required"), format!("/{name}")))?;
    raw.parse()
        .map_err(|_| RunError::config(format!("--{name}: bad value {raw:?}"), format!("/{name}")))
}

// --- runners ---

fn run_solve(cli: &Cli, artifacts: &mut Artifacts) -> Result<(), RunError> {
    let cfg: SolveConfig = load_config(cli)?;
    let torus = cfg.torus.build()?;
    let divisor = divisor_from(&cfg.divisor)?;
    let (field, report) =
        solver::solve_vortex(&torus, &divisor, cfg.tau).map_err(|e| RunError::compute(e.to_string()))?;
    let (r_holo, r_curv) = vfl_core::lattice::vortex_residual(&field);
    let (w_min, grad_excess) = solver::sup_bounds_check(&field);
    let record = serde_json::json!({
        "newton_iters": report.newton_iters,
        "final_residual": report.final_residual,
        "mass": report.mass,
        "mass_expected": 2.0 * std::f64::consts::PI * divisor.degree() as f64 / cfg.tau,
        "decay_rate": report.decay_rate,
        "r_holo": r_holo,
        "r_curv": r_curv,
        "w_min": w_min,
        "grad_excess": grad_excess,
    });
    artifacts.write("solve.json", serde_json::to_string_pretty(&record).unwrap().as_bytes())?;
    if cfg.dump_fields {
        let mut buf = Vec::new();
        solver::w_field(&field).write_binary(&mut buf).map_err(|e| RunError::compute(e.to_string()))?;
        artifacts.write("w.f64", &buf)?;
        let mut buf = Vec::new();
        field.theta.write_binary(&mut buf).map_err(|e| RunError::compute(e.to_string()))?;
        artifacts.write("theta.c64", &buf)?;
    }
    Ok(())
}

fn run_transport(cli: &Cli, artifacts: &mut Artifacts) -> Result<(), RunError> {
    let cfg: TransportConfig = load_config(cli)?;
    let _ = cfg.torus.build()?;
    let divisor = divisor_from(&cfg.divisor)?;
    let path = ModulusPath {
        rho0: Complex64::new(cfg.path.rho0.0, cfg.path.rho0.1),
        rho1: Complex64::new(cfg.path.rho1.0, cfg.path.rho1.1),
    };
    let trace = transport(path, &divisor, cfg.tau, cfg.steps, cfg.torus.grid_n)
        .map_err(|e| RunError::compute(e.to_string()))?;
    // CSV: t, zero coordinates, residuals
    let mut csv = String::from("t");
    for k in 0..divisor.degree() {
        csv.push_str(&format!(",x{k},y{k}"));
    }
    csv.push_str(",r_holo,r_curv\n");
    for (i, t) in trace.times.iter().enumerate() {
        csv.push_str(&format!("{t}"));
        for &(x, y) in &trace.divisors[i] {
            csv.push_str(&format!(",{x},{y}"));
        }
        let (rh, rc) = trace.residuals[i];
        csv.push_str(&format!(",{rh:e},{rc:e}\n"));
    }
    artifacts.write("trace.csv", csv.as_bytes())?;
    let max_res = trace
        .residuals
        .iter()
        .fold(0.0f64, |a, &(h, c)| a.max(h).max(c));
    let summary = serde_json::json!({
        "displacement": trace.displacement,
        "max_residual": max_res,
        "eta_iterations": trace.eta_iterations,
        "end_divisor": trace.located_end.points(),
        "end_multiplicities": trace.located_end.multiplicities(),
    });
    artifacts.write("transport.json", serde_json::to_string_pretty(&summary).unwrap().as_bytes())?;
    Ok(())
}

fn run_decay_study(cli: &Cli, artifacts: &mut Artifacts) -> Result<(), RunError> {
    let cfg: DecayConfig = load_config(cli)?;
    let torus = cfg.torus.build()?;
    if cfg.taus.is_empty() {
        return Err(RunError::config("taus must be nonempty", "/taus"));
    }
    let divisor = Divisor::single(cfg.point);
    let rows: Result<Vec<(f64, f64, f64)>, RunError> = cfg
        .taus
        .par_iter()
        .map(|&tau| {
            let (field, _) = solver::solve_vortex(&torus, &divisor, tau)
                .map_err(|e| RunError::compute(e.to_string()))?;
            let (c_fit, r2) =
                solver::decay_fit(&field).map_err(|e| RunError::compute(e.to_string()))?;
            Ok((tau, c_fit, r2))
        })
        .collect();
    let rows = rows?;
    let mut csv = String::from("tau,c_fit,r2\n");
    for &(tau, c, r2) in &rows {
        csv.push_str(&format!("{tau},{c},{r2}\n"));
    }
    artifacts.write("decay.csv", csv.as_bytes())?;
    // log-log regression of c_fit on tau
    let logs: Vec<(f64, f64)> = rows.iter().map(|&(t, c, _)| (t.ln(), c.ln())).collect();
    let m = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept_ln = (sy - slope * sx) / m;
    let plot = LogLogPlot {
        title: "single-vortex decay rate".into(),
        x_label: "tau".into(),
        y_label: "c_fit".into(),
        points: rows.iter().map(|&(t, c, _)| (t, c)).collect(),
        fit: Some((slope, intercept_ln / std::f64::consts::LN_10)),
        annotation: format!("log-log slope = {slope:.4}"),
    };
    artifacts.write("decay.svg", plot.render().as_bytes())?;
    let record = serde_json::json!({
        "slope": slope,
        "rows": rows.iter().map(|&(t, c, r2)| serde_json::json!({"tau": t, "c_fit": c, "r2": r2})).collect::<Vec<_>>(),
    });
    artifacts.write("decay.json", serde_json::to_string_pretty(&record).unwrap().as_bytes())?;
    Ok(())
}

fn run_symprod(cli: &Cli, artifacts: &mut Artifacts) -> Result<(), RunError> {
    let g: usize = flag(cli, "g")?;
    let d: usize = flag(cli, "d")?;
    let mode = cli.flags.get("mode").map(|s| s.as_str()).unwrap_or("betti");
    let record = match mode {
        "betti" => {
            let betti: Vec<usize> = (0..=2 * d).map(|k| alg::basis(g, d, k).len()).collect();
            let oracle: Vec<String> =
                (0..=2 * d).map(|k| alg::betti_oracle(g, d, k).to_string()).collect();
            serde_json::json!({"g": g, "d": d, "betti": betti, "generating_function": oracle})
        }
        "euler" => {
            let direct: i64 = (0..=2 * d)
                .map(|k| {
                    let b = alg::basis(g, d, k).len() as i64;
                    if k % 2 == 0 { b } else { -b }
                })
                .sum();
            serde_json::json!({"g": g, "d": d, "euler": direct, "oracle": alg::euler_oracle(g, d).to_string()})
        }
        other => return Err(RunError::config(format!("bad --mode {other:?}"), "/mode")),
    };
    artifacts.write("symprod.json", serde_json::to_string_pretty(&record).unwrap().as_bytes())?;
    Ok(())
}

fn run_lefschetz(cli: &Cli, artifacts: &mut Artifacts) -> Result<(), RunError> {
    let g: usize = flag(cli, "g")?;
    let d: usize = flag(cli, "d")?;
    let matrix_path: String = flag(cli, "matrix")?;
    let text = std::fs::read_to_string(&matrix_path)
        .map_err(|e| RunError::config(format!("reading matrix: {e}"), "/matrix"))?;
    let rows: Vec<Vec<i64>> = serde_json::from_str(&text)
        .map_err(|e| RunError::config(format!("matrix JSON: {e}"), "/matrix"))?;
    let n = 2 * g;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(RunError::config(format!("matrix must be {n}×{n}"), "/matrix"));
    }
    let flat: Vec<i64> = rows.into_iter().flatten().collect();
    let a = alg::SymplecticMatrix::new(g, flat)
        .map_err(|e| RunError::config(e.to_string(), "/matrix"))?;
    let series = alg::lefschetz_series(&a, d);
    let record = serde_json::json!({
        "g": g, "d": d,
        "lefschetz": alg::lefschetz(&a, g, d).to_string(),
        "series": series.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "series_consistent": alg::lefschetz_series_check(&a, g, d).is_ok(),
    });
    artifacts.write("lefschetz.json", serde_json::to_string_pretty(&record).unwrap().as_bytes())?;
    Ok(())
}

fn run_nielsen(cli: &Cli, artifacts: &mut Artifacts) -> Result<(), RunError> {
    let g: usize = flag(cli, "g")?;
    let trials: usize = flag(cli, "trials")?;
    if g < 3 {
        return Err(RunError::config("nielsen requires g ≥ 3", "/g"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut violations = 0usize;
    let mut triples = Vec::new();
    for _ in 0..trials {
        let a = alg::SymplecticMatrix::random_word(g, 6, &mut rng);
        let (l1, l2, l3, any) = alg::nielsen_triple(&a, g);
        if !any {
            violations += 1;
            triples.push((l1.to_string(), l2.to_string(), l3.to_string()));
        }
    }
    let record = serde_json::json!({
        "g": g, "trials": trials, "seed": cli.seed,
        "violations": violations,
        "violating_triples": triples,
    });
    artifacts.write("nielsen.json", serde_json::to_string_pretty(&record).unwrap().as_bytes())?;
    Ok(())
}

fn run_bifurcation(cli: &Cli, artifacts: &mut Artifacts) -> Result<(), RunError> {
    let cfg: BifurcationConfig = load_config(cli)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut db_failures = 0usize;
    let mut hs_failures = 0usize;
    for _ in 0..cfg.instances {
        let inst = random_death_birth(&mut rng, cfg.max_generators, cfg.cutoff);
        match alg::death_birth_extend(&inst.0, &inst.1, &inst.2, &inst.3) {
            Ok(db) => {
                let r_minus = inst.0.homology_ranks().map_err(|e| RunError::compute(e.to_string()))?;
                let r_plus = db.plus.homology_ranks().map_err(|e| RunError::compute(e.to_string()))?;
                if r_minus != r_plus {
                    db_failures += 1;
                }
            }
            Err(_) => db_failures += 1,
        }
        let (complex, slides) = random_handleslide(&mut rng, cfg.max_generators, cfg.cutoff);
        match alg::handleslide_transform(&complex, &slides) {
            Ok((c2, _)) => {
                let r0 = complex.homology_ranks().map_err(|e| RunError::compute(e.to_string()))?;
                let r1 = c2.homology_ranks().map_err(|e| RunError::compute(e.to_string()))?;
                if r0 != r1 {
                    hs_failures += 1;
                }
            }
            Err(_) => hs_failures += 1,
        }
    }
    let record = serde_json::json!({
        "instances": cfg.instances,
        "seed": cli.seed,
        "death_birth_failures": db_failures,
        "handleslide_failures": hs_failures,
    });
    artifacts.write("bifurcation.json", serde_json::to_string_pretty(&record).unwrap().as_bytes())?;
    if db_failures + hs_failures > 0 {
        return Err(RunError::compute(format!(
            "bifurcation identities failed on {} instances",
            db_failures + hs_failures
        )));
    }
    Ok(())
}

fn run_spinc(cli: &Cli, artifacts: &mut Artifacts) -> Result<(), RunError> {
    #[derive(Deserialize)]
    struct SpincConfig {
        e: Vec<i64>,
        h2pd: Vec<i64>,
        c: Vec<f64>,
    }
    let cfg: SpincConfig = load_config(cli)?;
    let lattice = alg::SpincLattice::new(cfg.e, cfg.h2pd, cfg.c)
        .map_err(|e| RunError::config(e.to_string(), "/e"))?;
    let desc = alg::ring_descriptors(&lattice);
    let record = serde_json::json!({
        "c1": lattice.c1_vector(),
        "grading_divisor": alg::grading_divisor(&lattice),
        "kernel_basis": desc.kernel_basis,
        "n_values": desc.n_values,
        "lambda_rank": desc.lambda_rank,
        "base_ring_flag": desc.base_ring_flag,
    });
    artifacts.write("spinc.json", serde_json::to_string_pretty(&record).unwrap().as_bytes())?;
    Ok(())
}

