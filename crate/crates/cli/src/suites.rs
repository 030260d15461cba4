//! The acceptance criteria as runnable suites.
//!
//! Each criterion returns a [`CriterionResult`]; `verify --suite` and the
//! `acceptance` test target both go through [`run_criterion`]. Sizes are
//! chosen so the whole set runs in a few minutes with an optimized build.

use serde::Serialize;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use opsysdual::certificate::{
    bidual_certificate, decomposition_certificate, order_unit_certificate, properness_certificate, verify,
    wittstock_certificate, Certificate,
};
use opsysdual::corpus::{
    build_full, build_graph_system, build_linfty, build_offdiag_m2, build_toeplitz, corpus, path_adjacency,
};
use opsysdual::dualspace::{
    bidual_norm, cb_norm_seesaw, d_norm, dual_cone_lineality, dual_cone_proper, dual_norm, dualizable_verdict,
    functional_sample, is_cp, ratio_report, span_samples, wittstock_decompose, wittstock_residuals, BidualSettings,
    CpSettings, DNormSettings, MatrixFunctional, Verdict, VerdictSettings,
};
use opsysdual::numkernel::ComplexMatrix;
use opsysdual::opsys::{cone_membership, decomposition_value, element_norm, structured_samples, MatrixElement};
use opsysdual::rng::XorShiftRng;
use opsysdual::scalar_layer::{oracle_compare, order_unit_check, OrderedSpace};
use opsysdual::{Cx, Element, Functional, System};

use crate::GlobalArgs;

pub const CRITERIA: [&str; 10] = [
    "four-bound",
    "positive-equality",
    "counterexample",
    "properness",
    "order-unit",
    "bidual",
    "wittstock",
    "oracle",
    "stabilization",
    "determinism",
];

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0x5EED,
            tol: 1e-7,
        }
    }
}

impl SuiteConfig {
    pub fn from_global(g: &GlobalArgs) -> Self {
        Self {
            seed: g.seed,
            tol: g.tol,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    /// First few violations, if any.
    pub failures: Vec<String>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {:<18} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.summary
        )
    }
}

/// `all`, `1`..`10`, or a criterion name; comma-separated lists allowed.
pub fn select(spec: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim) {
        if part == "all" {
            out.extend(1..=CRITERIA.len());
        } else if let Ok(n) = part.parse::<usize>() {
            if !(1..=CRITERIA.len()).contains(&n) {
                return Err(format!("criterion {n} out of range 1..={}", CRITERIA.len()));
            }
            out.push(n);
        } else if let Some(i) = CRITERIA.iter().position(|c| *c == part) {
            out.push(i + 1);
        } else {
            return Err(format!(
                "unknown suite '{part}'; expected all, 1..=10 or one of {}",
                CRITERIA.join(", ")
            ));
        }
    }
    out.dedup();
    Ok(out)
}

pub fn run_criterion(id: usize, cfg: &SuiteConfig) -> CriterionResult {
    let name = CRITERIA[id - 1];
    let mut log = Log::default();
    let summary = match id {
        1 => four_bound(cfg, &mut log),
        2 => positive_equality(cfg, &mut log),
        3 => counterexample(cfg, &mut log),
        4 => properness(cfg, &mut log),
        5 => order_unit(cfg, &mut log),
        6 => bidual(cfg, &mut log),
        7 => wittstock(cfg, &mut log),
        8 => oracle(cfg, &mut log),
        9 => stabilization(cfg, &mut log),
        10 => determinism(cfg, &mut log),
        _ => unreachable!("criterion ids are validated by select"),
    };
    let summary = summary.unwrap_or_else(|e| {
        log.fail(format!("error: {e}"));
        format!("error: {e}")
    });
    CriterionResult {
        id,
        name,
        passed: log.failures == 0,
        summary,
        failures: log.shown,
    }
}

#[derive(Default)]
struct Log {
    failures: usize,
    shown: Vec<String>,
}

impl Log {
    fn fail(&mut self, m: String) {
        self.failures += 1;
        if self.shown.len() < 10 {
            self.shown.push(m);
        }
    }

    fn check(&mut self, ok: bool, m: impl FnOnce() -> String) {
        if !ok {
            self.fail(m());
        }
    }

    fn cert(&mut self, c: &Certificate, what: &str) {
        match verify(c) {
            Ok(v) if v.ok => {}
            Ok(v) => {
                let bad: Vec<&str> = v.checks.iter().filter(|c| !c.ok).map(|c| c.name.as_str()).collect();
                self.fail(format!(
                    "{what}: {} certificate rejected ({})",
                    c.kind.as_str(),
                    bad.join(", ")
                ));
            }
            Err(e) => self.fail(format!("{what}: certificate error {e}")),
        }
    }
}

type Outcome = Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn unit_systems() -> Result<Vec<System>, String> {
    Ok(vec![
        build_linfty(3).map_err(err)?,
        build_full(2).map_err(err)?,
        build_toeplitz(3).map_err(err)?,
        build_graph_system(&path_adjacency(3)).map_err(err)?,
    ])
}

/// `f` with Choi matrix `A†A` for uniform complex `A`: CP by
/// construction, scaled by a factor in `[0.25, 2]`.
fn random_cp(sys: &System, m: usize, rng: &mut XorShiftRng) -> Result<Functional, String> {
    let n = sys.ambient_dim() * m;
    let a = ComplexMatrix::<f64>::from_fn(n, n, |_, _| rng.complex());
    let scale = 0.25 + 1.75 * rng.unit();
    let c = a.adjoint_mul(&a).scale_real(scale / n as f64);
    MatrixFunctional::from_choi(sys.clone(), m, &c).map_err(err)
}

/// A random functional of level `m` (not self-adjoint).
fn random_general(sys: &System, m: usize, rng: &mut XorShiftRng) -> Result<Functional, String> {
    let values = (0..m * m * sys.dim()).map(|_| rng.complex::<f64>()).collect();
    MatrixFunctional::new(sys.clone(), m, values).map_err(err)
}

/// `x + i·y` for random self-adjoint `x, y`.
fn random_element(sys: &System, n: usize, rng: &mut XorShiftRng) -> Result<Element, String> {
    let x = MatrixElement::<f64>::random_self_adjoint(sys.clone(), n, rng);
    let y = MatrixElement::<f64>::random_self_adjoint(sys.clone(), n, rng);
    let z = x.concrete().add(&y.concrete().scale(Cx::new(0.0, 1.0)));
    MatrixElement::from_concrete(sys.clone(), &z).map_err(err)
}

fn four_bound(cfg: &SuiteConfig, log: &mut Log) -> Outcome {
    let settings = DNormSettings {
        level_max: 2,
        tol: cfg.tol,
        restarts: 8,
        seed: cfg.seed,
    };
    let (mut total, mut lo, mut hi) = (0usize, f64::INFINITY, 0.0f64);
    for sys in unit_systems()? {
        let k = sys.frame().len();
        let structured = k + if k <= 7 { 1 << k } else { 128 };
        let sample = functional_sample(&sys, 50usize.saturating_sub(structured).max(8), cfg.seed);
        for (i, f) in sample.iter().enumerate() {
            let r = ratio_report(f, settings);
            total += 1;
            lo = lo.min(r.ratio);
            hi = hi.max(r.ratio);
            log.check(r.within_bounds(1e-3) == Some(true), || {
                format!(
                    "{} #{i}: ratio {:.6} (dual {:.6}, d {:.6})",
                    sys.label(),
                    r.ratio,
                    r.dual_norm.value,
                    r.d_norm.value
                )
            });
        }
    }
    log.check(total >= 200, || format!("only {total} functionals"));
    Ok(format!("{total} functionals, ratio in [{lo:.4}, {hi:.4}] ⊆ [1, 4]"))
}

fn positive_equality(cfg: &SuiteConfig, log: &mut Log) -> Outcome {
    let mut systems = 0;
    let mut total = 0;
    let mut worst = 0.0f64;
    for (idx, entry) in corpus().map_err(err)?.iter().enumerate() {
        let sys = &entry.system;
        if !sys.is_unital() {
            continue;
        }
        systems += 1;
        let mut rng = XorShiftRng::fork(cfg.seed, 0xC2 + idx as u64);
        let mut certified = 0;
        let mut attempts = 0;
        while certified < 50 && attempts < 100 {
            let m = 1 + attempts % 2;
            attempts += 1;
            let f = random_cp(sys, m, &mut rng)?;
            let cp = is_cp(
                &f,
                CpSettings {
                    tol: cfg.tol,
                    seed: cfg.seed,
                    ..CpSettings::default()
                },
            )
            .map_err(err)?;
            if !cp.is_member() {
                continue;
            }
            certified += 1;
            let a = dual_norm(&f, cfg.tol).value;
            let b = d_norm(
                &f,
                DNormSettings {
                    level_max: 2 * m,
                    tol: cfg.tol,
                    restarts: 4,
                    seed: cfg.seed,
                },
            )
            .value;
            let gap = (a - b).abs() / (1.0 + a);
            worst = worst.max(gap);
            log.check(gap <= 1e-3, || {
                format!("{} m={m}: dual {a:.6} vs d {b:.6}", sys.label())
            });
        }
        total += certified;
        log.check(certified >= 50, || {
            format!("{}: only {certified} certified CP functionals", sys.label())
        });
    }
    Ok(format!(
        "{total} CP functionals on {systems} unital systems, max relative gap {worst:.2e}"
    ))
}

fn counterexample(cfg: &SuiteConfig, log: &mut Log) -> Outcome {
    let sys = build_offdiag_m2().map_err(err)?;
    let mut rng = XorShiftRng::fork(cfg.seed, 0xC3);
    let mut samples = 0;
    for n in 1..=3 {
        let mut xs = structured_samples(&sys, n);
        xs.extend((0..8).map(|_| MatrixElement::random_self_adjoint(sys.clone(), n, &mut rng)));
        for x in xs.iter().filter(|x| x.norm() > 1e-6) {
            samples += 1;
            let r = cone_membership(x, cfg.tol);
            log.check(!r.member, || format!("level {n}: nonzero element reported positive"));
        }
    }
    let proper = dual_cone_proper(&sys, 2, cfg.seed);
    log.check(!proper.proper, || "dual cone reported proper".into());
    let lin = dual_cone_lineality(&sys, cfg.seed);
    log.check(lin.dim > 0, || "lineality SDP found no two-sided functional".into());
    let x = structured_samples(&sys, 1).into_iter().next().ok_or("no samples")?;
    let dv = decomposition_value(&x, cfg.tol).map_err(err)?;
    log.check(!dv.is_finite(), || {
        format!("decomposition value {} is finite", dv.value)
    });
    log.cert(
        &decomposition_certificate(&x, &dv, lin.witness.as_ref(), cfg.tol),
        "decomposition",
    );
    match properness_certificate(&sys, false, &[], lin.witness.as_ref(), cfg.seed) {
        Ok(c) => log.cert(&c, "properness"),
        Err(e) => log.fail(format!("properness certificate: {e}")),
    }
    let verdict = dualizable_verdict(
        &sys,
        VerdictSettings {
            level_max: 2,
            tol: cfg.tol,
            restarts: 4,
            seed: cfg.seed,
            random_functionals: 4,
            decomposition_samples: 4,
        },
    )
    .map_err(err)?;
    log.check(verdict.verdict == Verdict::NotDualizable, || {
        format!("verdict {:?}", verdict.verdict)
    });
    Ok(format!(
        "offdiag-m2: {samples} nonzero samples outside the cone, lineality dim {}, decomposition +∞, not dualizable",
        lin.dim
    ))
}

fn properness(cfg: &SuiteConfig, log: &mut Log) -> Outcome {
    let entries = corpus().map_err(err)?;
    let (mut proper, mut not_proper) = (0, 0);
    for e in &entries {
        let sys = &e.system;
        let span = dual_cone_proper(sys, 2, cfg.seed);
        let lin = dual_cone_lineality(sys, cfg.seed);
        if span.proper {
            proper += 1;
        } else {
            not_proper += 1;
        }
        log.check(span.proper == lin.proper, || {
            format!(
                "{}: span test {} but lineality dim {}",
                sys.label(),
                span.proper,
                lin.dim
            )
        });
        if let Some(expected) = e.expected.dual_cone_proper {
            log.check(expected == span.proper, || {
                format!("{}: expected proper = {expected}", sys.label())
            });
        }
        let cert = if span.proper {
            properness_certificate(sys, true, &span_samples(sys, 1, cfg.seed), None, cfg.seed)
        } else {
            properness_certificate(sys, false, &[], lin.witness.as_ref(), cfg.seed)
        };
        match cert {
            Ok(c) => log.cert(&c, sys.label()),
            Err(e) => log.fail(format!("{}: {e}", sys.label())),
        }
    }
    Ok(format!(
        "{} corpus entries: {proper} proper, {not_proper} not; span test agrees with the lineality SDP",
        entries.len()
    ))
}

fn order_unit(_cfg: &SuiteConfig, log: &mut Log) -> Outcome {
    let mut masses = Vec::new();
    for n in [2usize, 3, 5] {
        let space = OrderedSpace::l1(n).map_err(err)?;
        let u = vec![1.0; n];
        let r = order_unit_check(&u, &space).map_err(err)?;
        log.check(r.is_order_unit, || format!("N={n}: u is not an order unit"));
        log.check(r.forced_mass >= n as f64 - 1e-6, || {
            format!("N={n}: forced mass {}", r.forced_mass)
        });
        log.cert(&order_unit_certificate(&space, &u, &r, 1e-9), &format!("N={n}"));
        masses.push(format!("N={n}: {:.9}", r.forced_mass));
    }
    let zero = OrderedSpace::new(2, Vec::new(), opsysdual::scalar_layer::Ball::Linf, "zero-cone").map_err(err)?;
    let r = order_unit_check(&[0.0, 0.0], &zero).map_err(err)?;
    log.check(!r.is_order_unit, || "cone {0} admits an order unit".into());
    Ok(format!("forced ℓ1 mass {}", masses.join(", ")))
}

fn bidual(cfg: &SuiteConfig, log: &mut Log) -> Outcome {
    let settings = BidualSettings {
        level_max: 4,
        tol: cfg.tol,
        restarts: 16,
        seed: cfg.seed,
    };
    let mut worst = 0.0f64;
    let mut count = 0;
    for sys in [build_linfty(2).map_err(err)?, build_full(2).map_err(err)?] {
        let mut rng = XorShiftRng::fork(cfg.seed, 0xB6);
        for k in 1..=2 {
            let mut zs = Vec::new();
            for _ in 0..2 {
                let scale = 0.5 + 2.0 * rng.unit();
                zs.push(MatrixElement::random_self_adjoint(sys.clone(), k, &mut rng).scale(scale));
            }
            zs.push(random_element(&sys, k, &mut rng)?);
            for z in zs {
                let r = bidual_norm(&z, settings);
                let norm = element_norm(&z);
                let gap = (r.report.value - norm).abs();
                worst = worst.max(gap / (1.0 + norm));
                count += 1;
                log.check(gap <= 1e-2 * (1.0 + norm), || {
                    format!(
                        "{} level {k}: bidual {:.6} vs norm {norm:.6}",
                        sys.label(),
                        r.report.value
                    )
                });
                log.cert(&bidual_certificate(&z, &r, cfg.seed), sys.label());
            }
        }
    }
    Ok(format!(
        "{count} elements on linfty:2 and m:2, max relative gap {worst:.2e}"
    ))
}

fn wittstock(cfg: &SuiteConfig, log: &mut Log) -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for sys in [build_full(2).map_err(err)?, build_linfty(3).map_err(err)?] {
        let mut rng = XorShiftRng::fork(cfg.seed, 0x77);
        for i in 0..20 {
            let f = random_general(&sys, 2, &mut rng)?;
            let nrm = dual_norm(&f, cfg.tol).value;
            let f = f.scale(Cx::new(1.0 / nrm, 0.0));
            let r = match wittstock_decompose(&f, cfg.tol) {
                Ok(r) => r,
                Err(e) => {
                    log.fail(format!("{} #{i}: {e}", sys.label()));
                    continue;
                }
            };
            let parts: Vec<_> = r.parts.iter().map(|p| p.choi.as_matrix().clone()).collect();
            let (recon, psd, cap) = wittstock_residuals(&f, &parts);
            let res = recon.max(psd).max(cap);
            worst = worst.max(res);
            count += 1;
            log.check(parts.len() == 4 && res <= 1e-6, || {
                format!(
                    "{} #{i}: reconstruction {recon:.2e}, psd {psd:.2e}, cap {cap:.2e}",
                    sys.label()
                )
            });
            log.cert(&wittstock_certificate(&f, &r, cfg.tol), sys.label());
        }
    }
    Ok(format!(
        "{count} complete contractions into M_2, max residual {worst:.2e}"
    ))
}

fn oracle(cfg: &SuiteConfig, log: &mut Log) -> Outcome {
    let settings = DNormSettings {
        level_max: 2,
        tol: cfg.tol,
        restarts: 8,
        seed: cfg.seed,
    };
    let entries = corpus().map_err(err)?;
    let (mut diag, mut oracle_count, mut seesaw_count) = (0, 0, 0);
    let (mut d_gap, mut dual_gap, mut ss_gap) = (0.0f64, 0.0f64, 0.0f64);
    for e in &entries {
        let sys = &e.system;
        let sample = functional_sample(sys, 8, cfg.seed);
        if sys.is_diagonal() {
            diag += 1;
            for (i, f) in sample.iter().enumerate() {
                let r = oracle_compare(f, settings, 1e-6).map_err(err)?;
                oracle_count += 1;
                d_gap = d_gap.max(r.d_gap);
                dual_gap = dual_gap.max(r.dual_gap);
                log.check(r.passes, || {
                    format!(
                        "{} #{i}: d gap {:.2e}, dual gap {:.2e}",
                        sys.label(),
                        r.d_gap,
                        r.dual_gap
                    )
                });
            }
        }
        for (i, f) in sample.iter().take(12).enumerate() {
            let a = dual_norm(f, cfg.tol).value;
            let b = cb_norm_seesaw(f, 16, cfg.seed, cfg.tol).value;
            seesaw_count += 1;
            ss_gap = ss_gap.max((a - b).abs());
            log.check((a - b).abs() <= 1e-5, || {
                format!("{} #{i}: SDP {a:.8} vs see-saw {b:.8}", sys.label())
            });
        }
    }
    Ok(format!(
        "{oracle_count} LP comparisons on {diag} diagonal systems (gaps {d_gap:.1e}, {dual_gap:.1e}); \
         {seesaw_count} SDP/see-saw pairs (gap {ss_gap:.1e})"
    ))
}

fn stabilization(cfg: &SuiteConfig, log: &mut Log) -> Outcome {
    let mut traces = 0;
    let mut worst = 0.0f64;
    let mut cases: Vec<(System, usize, usize)> = Vec::new();
    for sys in [build_linfty(2).map_err(err)?, build_full(2).map_err(err)?] {
        for m in 1..=3 {
            cases.push((sys.clone(), m, 2 * m + 1));
        }
    }
    for sys in [
        build_toeplitz(3).map_err(err)?,
        build_graph_system(&path_adjacency(3)).map_err(err)?,
    ] {
        cases.push((sys, 1, 3));
    }
    let mut rng = XorShiftRng::fork(cfg.seed, 0x99);
    for (sys, m, top) in cases {
        let fs = [
            MatrixFunctional::random_self_adjoint(sys.clone(), m, &mut rng),
            random_general(&sys, m, &mut rng)?,
        ];
        for f in fs {
            let r = d_norm(
                &f,
                DNormSettings {
                    level_max: top,
                    tol: cfg.tol,
                    restarts: 8,
                    seed: cfg.seed,
                },
            );
            traces += 1;
            let raw: Vec<f64> = r.per_level.iter().map(|l| l.raw).collect();
            let label = format!("{} m={m}", sys.label());
            log.check(raw.windows(2).all(|w| w[1] >= w[0] - 1e-9), || {
                format!("{label}: trace {raw:?} decreases")
            });
            let base = r.per_level.iter().find(|l| l.level == 2 * m).map(|l| l.running);
            if let Some(base) = base {
                for l in r.per_level.iter().filter(|l| l.level >= 2 * m) {
                    let gap = (l.running - base).abs();
                    worst = worst.max(gap);
                    log.check(gap <= 1e-6, || format!("{label}: level {} moves by {gap:.2e}", l.level));
                }
            }
        }
    }
    Ok(format!(
        "{traces} traces nondecreasing, constant from level 2m (max drift {worst:.1e})"
    ))
}

static SCRATCH: AtomicUsize = AtomicUsize::new(0);

fn scratch_dir() -> PathBuf {
    let n = SCRATCH.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("opsysdual-determinism-{}-{n}", std::process::id()))
}

/// Commands exercised by the determinism criterion.
pub fn determinism_commands() -> Vec<Vec<&'static str>> {
    vec![
        vec!["d-norm", "--system", "linfty:2", "--functional", "[1,-1]"],
        vec!["dual-norm", "--system", "m:2", "--functional", "transpose", "--seesaw"],
        vec![
            "ratio",
            "--system",
            "toeplitz:3",
            "--functional",
            "random:11",
            "--level",
            "2",
        ],
        vec!["cone-check", "--system", "offdiag-m2", "--element", "[[0,1],[1,0]]"],
        vec!["cone-check", "--system", "m:2", "--element", "unit:2"],
        vec!["norm", "--system", "m:2", "--element", "random:5:2"],
        vec!["decomp", "--system", "offdiag-m2", "--element", "[[0,1],[1,0]]"],
        vec!["decomp", "--system", "linfty:3", "--level", "2", "--samples", "4"],
        vec![
            "verdict",
            "--system",
            "linfty:3",
            "--level",
            "2",
            "--samples",
            "4",
            "--restarts",
            "4",
        ],
        vec![
            "verdict",
            "--system",
            "offdiag-m2",
            "--level",
            "2",
            "--samples",
            "4",
            "--restarts",
            "4",
        ],
        vec!["wittstock", "--system", "m:2", "--functional", "identity"],
        vec![
            "dual-map",
            "--source",
            "m:2",
            "--map",
            "transpose",
            "--samples",
            "4",
            "--level",
            "2",
        ],
        vec![
            "dual-map",
            "--source",
            "linfty:3",
            "--map",
            "identity",
            "--samples",
            "4",
            "--level",
            "2",
        ],
        vec!["bidual", "--system", "m:2", "--element", "random:3:2", "--level", "2"],
        vec![
            "oracle",
            "--system",
            "linfty:3",
            "--functional",
            "[1,-2,0.5]",
            "--level",
            "2",
        ],
    ]
}

fn run_all(dir: &Path, log: &mut Log) -> Vec<(Value, Vec<(String, String)>)> {
    let mut out = Vec::new();
    for cmd in determinism_commands() {
        let mut argv = vec!["opsysdual".to_string()];
        argv.extend(cmd.iter().map(|s| s.to_string()));
        argv.extend(["--cert-dir".to_string(), dir.display().to_string()]);
        match crate::execute(&argv) {
            Ok(r) => {
                log.check(r.exit_code == 0, || format!("{}: exit code {}", cmd[0], r.exit_code));
                let certs = r
                    .certificates
                    .iter()
                    .map(|p| {
                        let name = Path::new(p)
                            .file_name()
                            .map(|n| n.to_string_lossy().to_string())
                            .unwrap_or_default();
                        (name, std::fs::read_to_string(p).unwrap_or_default())
                    })
                    .collect();
                out.push((r.outputs, certs));
            }
            Err(e) => log.fail(format!("{}: {e}", cmd.join(" "))),
        }
    }
    out
}

fn determinism(_cfg: &SuiteConfig, log: &mut Log) -> Outcome {
    let (a, b) = (scratch_dir(), scratch_dir());
    let first = run_all(&a, log);
    let second = run_all(&b, log);
    let mut certs = 0;
    for (i, (x, y)) in first.iter().zip(&second).enumerate() {
        log.check(x.0 == y.0, || format!("command {i}: outputs differ between runs"));
        log.check(x.1 == y.1, || format!("command {i}: certificates differ between runs"));
        for (name, text) in &x.1 {
            certs += 1;
            match serde_json::from_str::<Value>(text)
                .map_err(err)
                .and_then(|v| Certificate::from_json(&v).map_err(err))
            {
                Ok(c) => log.cert(&c, name),
                Err(e) => log.fail(format!("{name}: {e}")),
            }
        }
    }
    if let Some((out, _)) = first.first() {
        log.check(out["d_norm"] == serde_json::json!(1.0), || {
            format!("d-norm example gave {}", out["d_norm"])
        });
    }
    if let Some((out, _)) = first.get(3) {
        log.check(out["member"] == serde_json::json!(false), || {
            "offdiag cone-check reported membership".into()
        });
    }
    if let Some((out, _)) = first.get(8) {
        log.check(
            out["verdict"] == serde_json::json!("dualizable") && out["r_hat"] == serde_json::json!(1.0),
            || format!("linfty:3 verdict {} r_hat {}", out["verdict"], out["r_hat"]),
        );
    }
    let _ = std::fs::remove_dir_all(&a);
    let _ = std::fs::remove_dir_all(&b);
    Ok(format!(
        "{} commands run twice with identical 9-digit outputs; {certs} certificates re-verified",
        first.len()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_selection() {
        assert_eq!(select("all").unwrap(), (1..=10).collect::<Vec<_>>());
        assert_eq!(select("3,oracle").unwrap(), vec![3, 8]);
        assert!(select("11").is_err());
        assert!(select("nope").is_err());
    }
}
