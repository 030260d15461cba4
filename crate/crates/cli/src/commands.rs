//! One function per subcommand. Each returns an [`Outcome`] holding the
//! outputs and the certificates backing every printed norm or flag.

use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use opsysdual::certificate::{
    bidual_certificate, cone_certificate, cp_certificate, decomposition_certificate, element_norm_certificate,
    flat_norm_certificate, norm_certificate, properness_certificate, verify, wittstock_certificate, Certificate,
    CertificateKind,
};
use opsysdual::corpus::{manifest, write_system};
use opsysdual::dualspace::{
    bidual_norm, cb_norm_seesaw, d_norm, dual_cone_lineality, dual_map, dual_norm, dualizable_verdict,
    functional_sample, ratio_report, span_samples, wittstock_decompose, BidualSettings, CpStatus, DNormSettings,
    DualMapSettings, NormReport, RatioReport, Verdict, VerdictSettings,
};
use opsysdual::opsys::{
    cone_membership, decomposition_constant, decomposition_value, element_norm, DecompositionValue,
};
use opsysdual::scalar_layer::{diagonal_shadow, flat_norm, oracle_compare, shadow_functional};
use opsysdual::{Element, Functional, System};

use crate::inputs;
use crate::output::{fmt_num, num, CsvRow, Outcome, Status};
use crate::{CliError, Command, ElementArgs, FunctionalArgs, GlobalArgs};

pub fn dispatch(cmd: &Command, g: &GlobalArgs) -> Result<Outcome, CliError> {
    match cmd {
        Command::Make { spec, out, manifest } => make(spec.as_deref(), out.as_deref(), *manifest),
        Command::ConeCheck(a) => cone_check(a, g),
        Command::Norm(a) => norm(a, g),
        Command::DualNorm { args, seesaw } => dual_norm_cmd(args, *seesaw, g),
        Command::DNorm(a) => d_norm_cmd(a, g),
        Command::Ratio { args, csv } => ratio(args, csv.as_deref(), g),
        Command::Decomp {
            system,
            element,
            samples,
        } => decomp(system, element.as_deref(), *samples, g),
        Command::Verdict { system, samples } => verdict(system, *samples, g),
        Command::Wittstock(a) => wittstock(a, g),
        Command::DualMap {
            source,
            target,
            map,
            samples,
        } => dual_map_cmd(source, target.as_deref(), map, *samples, g),
        Command::Bidual(a) => bidual(a, g),
        Command::Oracle(a) => oracle(a, g),
        Command::Verify { suite } => verify_suites(suite, g),
        Command::Report {
            verify_cert,
            csv,
            system,
            random,
        } => report(verify_cert, csv.as_deref(), system.as_deref(), *random, g),
    }
}

pub fn dnorm_settings(g: &GlobalArgs) -> DNormSettings {
    DNormSettings {
        level_max: g.level,
        tol: g.tol,
        restarts: g.restarts,
        seed: g.seed,
    }
}

fn element_inputs(a: &ElementArgs) -> Result<(System, Element, Value), CliError> {
    let sys = inputs::system(&a.system)?;
    let x = inputs::element(&sys, &a.element)?;
    let v = json!({"system": inputs::system_json(&sys), "element": inputs::element_json(&x)});
    Ok((sys, x, v))
}

fn functional_inputs(a: &FunctionalArgs) -> Result<(System, Functional, Value), CliError> {
    let sys = inputs::system(&a.system)?;
    let f = inputs::functional(&sys, &a.functional)?;
    let v = json!({"system": inputs::system_json(&sys), "functional": f.to_json()});
    Ok((sys, f, v))
}

fn put_functional(o: &mut Outcome, sys: &System, f: &Functional) {
    o.put("system", sys.label());
    o.put("functional_digest", f.digest());
    o.put("functional_level", f.level());
}

fn per_level(r: &NormReport<f64>) -> Value {
    Value::Array(
        r.per_level
            .iter()
            .map(|l| json!({"level": l.level, "raw": num(l.raw), "running": num(l.running)}))
            .collect(),
    )
}

fn make(spec: Option<&str>, out: Option<&Path>, want_manifest: bool) -> Result<Outcome, CliError> {
    let mut o = Outcome::new(json!({"spec": spec, "manifest": want_manifest}));
    if want_manifest {
        let m = manifest()?;
        let n = m.as_array().map(Vec::len).unwrap_or(0);
        o.put("entries", n);
        if let Some(p) = out {
            let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
            std::fs::write(p, text).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
            o.files.push(p.display().to_string());
        } else {
            o.put("manifest", m);
        }
        return Ok(o);
    }
    let spec = spec.ok_or_else(|| CliError::Usage("make needs a system spec or --manifest".into()))?;
    let sys = inputs::system(spec)?;
    o.inputs = json!({"system": inputs::system_json(&sys)});
    o.put("label", sys.label());
    o.put("dim", sys.dim());
    o.put("ambient_dim", sys.ambient_dim());
    match out {
        Some(p) => {
            write_system(&sys, p)?;
            o.files.push(p.display().to_string());
        }
        None => o.put("system", inputs::system_json(&sys)),
    }
    Ok(o)
}

fn cone_check(a: &ElementArgs, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let (sys, x, v) = element_inputs(a)?;
    let r = cone_membership(&x, g.tol);
    let mut o = Outcome::new(v);
    o.put("system", sys.label());
    o.put("level", x.level());
    o.put("member", r.member);
    o.put_num("min_eigenvalue", r.min_eigenvalue);
    o.put_num("hermitian_defect", r.hermitian_defect);
    o.cert(cone_certificate(&x, &r, g.tol));
    Ok(o)
}

fn norm(a: &ElementArgs, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let (sys, x, v) = element_inputs(a)?;
    let mut o = Outcome::new(v);
    o.put("system", sys.label());
    o.put("level", x.level());
    o.put_num("norm", element_norm(&x));
    o.cert(element_norm_certificate(&x, g.tol));
    Ok(o)
}

fn check_converged(o: &mut Outcome, r: &NormReport<f64>) {
    if !r.converged {
        o.undecided();
    }
}

fn dual_norm_cmd(a: &FunctionalArgs, seesaw: bool, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let (sys, f, v) = functional_inputs(a)?;
    let mut o = Outcome::new(json!({"args": v, "seesaw": seesaw}));
    put_functional(&mut o, &sys, &f);
    let r = dual_norm(&f, g.tol);
    check_converged(&mut o, &r);
    o.put_num("dual_norm", r.value);
    o.put_num("residual", r.residual);
    o.put("method", r.method.as_str());
    o.cert(norm_certificate(&f, &r, CertificateKind::CbNorm, g.seed)?);
    if seesaw {
        let s = cb_norm_seesaw(&f, g.restarts, g.seed, g.tol);
        o.put_num("seesaw", s.value);
        o.put_num("gap", (r.value - s.value).abs());
        o.cert(norm_certificate(&f, &s, CertificateKind::CbSeeSaw, g.seed)?);
    }
    Ok(o)
}

fn d_norm_cmd(a: &FunctionalArgs, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let (sys, f, v) = functional_inputs(a)?;
    let mut o = Outcome::new(v);
    put_functional(&mut o, &sys, &f);
    let r = d_norm(&f, dnorm_settings(g));
    o.put_num("d_norm", r.value);
    o.put("method", r.method.as_str());
    o.put("per_level", per_level(&r));
    o.cert(norm_certificate(&f, &r, CertificateKind::DNorm, g.seed)?);
    Ok(o)
}

pub fn csv_row(f: &Functional, r: &RatioReport<f64>) -> CsvRow {
    CsvRow {
        system: f.system().label().to_string(),
        functional_digest: f.digest(),
        dual_norm: fmt_num(r.dual_norm.value),
        d_norm: fmt_num(r.d_norm.value),
        ratio: fmt_num(r.ratio),
        level: r.d_norm.level,
        method: format!("{}/{}", r.dual_norm.method.as_str(), r.d_norm.method.as_str()),
        residual: fmt_num(r.dual_norm.residual.max(r.d_norm.residual)),
    }
}

fn ratio_into(o: &mut Outcome, f: &Functional, g: &GlobalArgs) -> Result<RatioReport<f64>, CliError> {
    let r = ratio_report(f, dnorm_settings(g));
    check_converged(o, &r.dual_norm);
    o.cert(norm_certificate(f, &r.dual_norm, CertificateKind::CbNorm, g.seed)?);
    o.cert(norm_certificate(f, &r.d_norm, CertificateKind::DNorm, g.seed)?);
    o.csv.push(csv_row(f, &r));
    Ok(r)
}

fn ratio(a: &FunctionalArgs, csv: Option<&Path>, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let (sys, f, v) = functional_inputs(a)?;
    let mut o = Outcome::new(v);
    put_functional(&mut o, &sys, &f);
    let r = ratio_into(&mut o, &f, g)?;
    o.put_num("dual_norm", r.dual_norm.value);
    o.put_num("d_norm", r.d_norm.value);
    o.put_num("ratio", r.ratio);
    o.put("overflow", r.overflow);
    if let Some(ok) = r.within_bounds(1e-3) {
        o.put("within_one_four", ok);
    }
    o.csv_path = csv.map(PathBuf::from);
    Ok(o)
}

fn decomposition_cert(x: &Element, dv: &DecompositionValue<f64>, g: &GlobalArgs) -> Certificate {
    let lineality = if dv.is_finite() {
        None
    } else {
        dual_cone_lineality(x.system(), g.seed).witness
    };
    decomposition_certificate(x, dv, lineality.as_ref(), g.tol)
}

fn decomp(system: &str, element: Option<&str>, samples: usize, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let sys = inputs::system(system)?;
    match element {
        Some(spec) => {
            let x = inputs::element(&sys, spec)?;
            let mut o = Outcome::new(json!({"system": inputs::system_json(&sys), "element": inputs::element_json(&x)}));
            let dv = decomposition_value(&x, g.tol)?;
            o.put("system", sys.label());
            o.put("level", x.level());
            o.put_num("value", dv.value);
            o.put_num("lower_bound", dv.lower_bound);
            o.put("method", json!(dv.method));
            o.cert(decomposition_cert(&x, &dv, g));
            Ok(o)
        }
        None => {
            let mut o = Outcome::new(json!({"system": inputs::system_json(&sys), "samples": samples}));
            let r = decomposition_constant(&sys, g.level, samples, g.seed, g.tol)?;
            o.put("system", sys.label());
            o.put_num("r_hat", r.r_hat);
            o.put("sample_count", r.sample_count);
            o.put(
                "per_level",
                Value::Array(
                    r.per_level
                        .iter()
                        .map(|l| json!({"level": l.level, "samples": l.samples, "r_hat": num(l.r_hat)}))
                        .collect(),
                ),
            );
            if let Some(w) = &r.worst {
                let dv = decomposition_value(w, g.tol)?;
                o.cert(decomposition_cert(w, &dv, g));
            }
            Ok(o)
        }
    }
}

/// Properness certificate: spanning positives or a lineality witness.
pub fn properness_cert(sys: &System, proper: bool, seed: u64) -> Result<Certificate, CliError> {
    if proper {
        let samples = span_samples(sys, 1, seed);
        Ok(properness_certificate(sys, true, &samples, None, seed)?)
    } else {
        let lin = dual_cone_lineality(sys, seed);
        Ok(properness_certificate(sys, false, &[], lin.witness.as_ref(), seed)?)
    }
}

fn verdict(system: &str, samples: usize, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let sys = inputs::system(system)?;
    let mut o = Outcome::new(json!({"system": inputs::system_json(&sys), "samples": samples}));
    let settings = VerdictSettings {
        level_max: g.level,
        tol: g.tol,
        restarts: g.restarts,
        seed: g.seed,
        random_functionals: samples,
        decomposition_samples: samples,
    };
    let r = dualizable_verdict(&sys, settings)?;
    o.put("system", sys.label());
    o.put(
        "verdict",
        match r.verdict {
            Verdict::DualizableAtLevel(_) => "dualizable",
            Verdict::NotDualizable => "not-dualizable",
        },
    );
    o.put("dualizable", r.is_dualizable());
    o.put_num("r_hat", r.decomposition.r_hat);
    o.put_num("implied_bound", r.implied_bound);
    o.put("dual_cone_proper", r.properness.proper);
    o.put("functionals", r.functionals);
    o.put_num("max_ratio", r.max_ratio);
    o.put("overflows", r.overflows);
    o.cert(properness_cert(&sys, r.properness.proper, g.seed)?);
    if let Some(w) = &r.decomposition.worst {
        let dv = decomposition_value(w, g.tol)?;
        o.cert(decomposition_cert(w, &dv, g));
    }
    Ok(o)
}

fn wittstock(a: &FunctionalArgs, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let (sys, f, v) = functional_inputs(a)?;
    let mut o = Outcome::new(v);
    put_functional(&mut o, &sys, &f);
    let r = wittstock_decompose(&f, g.tol)?;
    o.put_num("cb_norm", r.cb_norm);
    o.put_num("reconstruction", r.reconstruction);
    o.put_num("psd_violation", r.psd_violation);
    o.put_num("cap_violation", r.cap_violation);
    o.put("method", r.method);
    o.cert(wittstock_certificate(&f, &r, g.tol));
    if r.residual() > 10.0 * g.tol {
        o.undecided();
    }
    Ok(o)
}

fn dual_map_cmd(
    source: &str,
    target: Option<&str>,
    map: &str,
    samples: usize,
    g: &GlobalArgs,
) -> Result<Outcome, CliError> {
    let s = inputs::system(source)?;
    let t = match target {
        Some(t) => inputs::system(t)?,
        None => s.clone(),
    };
    let phi = inputs::linear_map(&s, &t, map)?;
    let mut o = Outcome::new(json!({
        "source": inputs::system_json(&s),
        "target": inputs::system_json(&t),
        "images": phi.images().iter().map(opsysdual::opsys::matrix_to_json).collect::<Vec<_>>(),
        "samples": samples,
    }));
    let r = dual_map(
        &phi,
        DualMapSettings {
            samples,
            dnorm: dnorm_settings(g),
        },
    )?;
    let f = phi.as_functional();
    o.put("source", s.label());
    o.put("target", t.label());
    o.put("cp", json!(r.cp.status));
    o.put_num("cb_norm", r.cb_norm.value);
    o.put("completely_contractive", r.completely_contractive);
    o.put("asserted", r.asserted);
    o.put_num("max_ratio", r.max_ratio);
    if let Some(h) = r.holds {
        o.put("holds", h);
        if !h {
            o.status = Status::Failed;
        }
    }
    if r.cp.status == CpStatus::Undecided {
        o.undecided();
    }
    check_converged(&mut o, &r.cb_norm);
    if let Some(c) = cp_certificate(&f, &r.cp, g.tol) {
        o.cert(c);
    }
    o.cert(norm_certificate(&f, &r.cb_norm, CertificateKind::CbNorm, g.seed)?);
    Ok(o)
}

fn bidual(a: &ElementArgs, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let (sys, z, v) = element_inputs(a)?;
    let mut o = Outcome::new(v);
    let r = bidual_norm(
        &z,
        BidualSettings {
            level_max: g.level,
            tol: g.tol,
            restarts: g.restarts,
            seed: g.seed,
        },
    );
    o.put("system", sys.label());
    o.put("level", z.level());
    o.put_num("bidual_norm", r.report.value);
    o.put_num("element_norm", r.element_norm);
    o.put_num("gap", (r.report.value - r.element_norm).abs());
    o.put("functional_level", r.functional_level);
    o.put("per_level", per_level(&r.report));
    o.cert(bidual_certificate(&z, &r, g.seed));
    o.cert(element_norm_certificate(&z, g.tol));
    Ok(o)
}

fn oracle(a: &FunctionalArgs, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let (sys, f, v) = functional_inputs(a)?;
    let mut o = Outcome::new(v);
    put_functional(&mut o, &sys, &f);
    let oracle_tol = g.tol.max(1e-6);
    let r = oracle_compare(&f, dnorm_settings(g), oracle_tol)?;
    o.put_num("d_norm", r.d_norm);
    o.put_num("flat_norm", r.flat_norm);
    o.put_num("dual_norm", r.dual_norm);
    o.put_num("dual_ball_norm", r.dual_ball_norm);
    o.put_num("d_gap", r.d_gap);
    o.put_num("dual_gap", r.dual_gap);
    o.put("passes", r.passes);
    if !r.passes {
        o.status = Status::Failed;
    }
    let space = diagonal_shadow(&sys)?;
    let fs = shadow_functional(&f)?;
    let flat = flat_norm(&fs, &space)?;
    o.cert(flat_norm_certificate(&space, &fs, &flat, 1e-9));
    o.cert(norm_certificate(
        &f,
        &d_norm(&f, dnorm_settings(g)),
        CertificateKind::DNorm,
        g.seed,
    )?);
    o.cert(norm_certificate(
        &f,
        &dual_norm(&f, g.tol),
        CertificateKind::CbNorm,
        g.seed,
    )?);
    Ok(o)
}

fn verify_suites(suite: &str, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let ids = crate::suites::select(suite).map_err(CliError::Invalid)?;
    let mut o = Outcome::new(json!({"suite": suite}));
    let cfg = crate::suites::SuiteConfig::from_global(g);
    let mut results = Vec::new();
    let mut all = true;
    for id in ids {
        let r = crate::suites::run_criterion(id, &cfg);
        all &= r.passed;
        results.push(serde_json::to_value(&r).expect("criterion serializes"));
    }
    o.put("criteria", Value::Array(results));
    o.put("passed", all);
    if !all {
        o.status = Status::Failed;
    }
    Ok(o)
}

/// Certificate files under `paths` (directories are listed, sorted).
pub fn certificate_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|e| e.extension().is_some_and(|x| x == "json"))
                .collect();
            entries.sort();
            out.extend(entries);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            return Err(CliError::Invalid(format!("no such certificate: {}", p.display())));
        }
    }
    Ok(out)
}

fn report(
    certs: &[PathBuf],
    csv: Option<&Path>,
    system: Option<&str>,
    random: usize,
    g: &GlobalArgs,
) -> Result<Outcome, CliError> {
    if certs.is_empty() && csv.is_none() {
        return Err(CliError::Usage(
            "report needs --verify-cert or --csv with --system".into(),
        ));
    }
    let mut o = Outcome::new(json!({"verify_cert": certs, "system": system, "random": random}));
    if !certs.is_empty() {
        let files = certificate_files(certs)?;
        let mut rows = Vec::new();
        let mut failed = 0usize;
        for p in &files {
            let (ok, kind, detail) = match Certificate::read(p).and_then(|c| verify(&c)) {
                Ok(v) => {
                    let bad: Vec<String> = v.checks.iter().filter(|c| !c.ok).map(|c| c.name.clone()).collect();
                    (v.ok, v.kind.as_str().to_string(), bad.join("; "))
                }
                Err(e) => (false, "unreadable".to_string(), e.to_string()),
            };
            if !ok {
                failed += 1;
            }
            rows.push(json!({"file": p.display().to_string(), "kind": kind, "ok": ok, "failed_checks": detail}));
        }
        o.put("verified", files.len() - failed);
        o.put("failed", failed);
        o.put("certificates", Value::Array(rows));
        if failed > 0 {
            o.status = Status::Failed;
        }
    }
    if let Some(path) = csv {
        let sys = inputs::system(system.unwrap_or_default())?;
        o.inputs["system_json"] = inputs::system_json(&sys);
        let sample = functional_sample(&sys, random, g.seed);
        let mut worst = 0.0f64;
        for f in &sample {
            let r = ratio_into(&mut o, f, g)?;
            worst = worst.max(r.ratio);
        }
        o.put("rows", sample.len());
        o.put_num("max_ratio", worst);
        o.csv_path = Some(path.to_path_buf());
    }
    Ok(o)
}
