//! One function per subcommand. Each reads its resolved keys, runs the
//! library pipeline and writes artifacts into the output directory.

use std::f64::consts::PI;

use cascade::builder::*;
use cascade::hamiltonian::{find_frak_s2, find_frak_s3};
use cascade::local::{slider_shoot, verify_slider, SliderConfig, SliderError};
use cascade::nls::*;
use cascade::numeric::Precision;
use cascade::reduced::*;
use cascade::resonance::*;
use cascade::toy::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{key, Key, Resolved};
use crate::output::{f, json, write_atomic, Csv};
use crate::Failure;

pub struct Subcommand {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [Key],
    pub run: fn(&Resolved) -> Result<(), Failure>,
}

pub const SUBCOMMANDS: &[Subcommand] = &[
    Subcommand {
        name: "build-set",
        about: "Build a generation set (combinatorial model, placement, integer dilation)",
        keys: &[
            key("N", "3", "number of generations"),
            key("seed", "0", "placement seed"),
            key("strategy", "auto", "auto, chord, lattice, compact:B or prototype"),
            key("budget", "16", "placement attempts"),
            key("min-norm", "", "dilate until every |k| is at least this"),
            key("target", "", "K/δ: choose N for the norm-explosion target (overrides N)"),
            key("s", "2", "Sobolev exponent for the target"),
        ],
        run: build_set,
    },
    Subcommand {
        name: "certify",
        about: "Verify completeness, non-degeneracy and the resonant-vector classification of a set",
        keys: &[key("set", "", "generation-set file")],
        run: certify_cmd,
    },
    Subcommand {
        name: "simulate-toy",
        about: "Integrate the toy model and record the trajectory",
        keys: &[
            key("N", "4", "number of generations"),
            key("n", "", "family parameter [default: 2^(N-1)]"),
            key("b0", "periodic:1", "periodic:j | pair:j:I | random:SEED | values:re:im,re:im,..."),
            key("T", "1", "final time"),
            key("tol", "1e-13", "integrator tolerance"),
            key("dt", "", "sample spacing [default: T/1000]"),
            key("precision", "f64", "f64 or dd"),
            key("rescaled", "false", "use the rescaled time of the local analysis"),
        ],
        run: simulate_toy,
    },
    Subcommand {
        name: "slider-search",
        about: "Shoot for a slider orbit T_3 → … → T_{N-2} and verify it",
        keys: &[
            key("N", "6", "number of generations (≥ 6)"),
            key("n", "", "family parameter [default: 2^(N-1)]"),
            key("eps", "0.1", "closeness at the visited orbits"),
            key("precision", "f64", "starting rung of the precision ladder"),
            key("tol", "1e-13", "integrator tolerance"),
            key("phases", "", "initial phase offsets of modes 4..N-2"),
            key("hop-time", "60", "longest interval between hops"),
            key("dt", "0.01", "sample spacing of the written trajectory"),
        ],
        run: slider_search,
    },
    Subcommand {
        name: "compare-nls",
        about: "Compare the truncated quintic NLS with its resonant part over a λ ladder",
        keys: &[
            key("set", "", "generation-set file [default: build one]"),
            key("N", "3", "generations when building"),
            key("seed", "0", "placement seed when building"),
            key("b0", "periodic:2", "toy datum (as in simulate-toy)"),
            key("lambdas", "8,16,32", "comma-separated amplitude scales"),
            key("sigma", "0.5", "regime exponent σ ∈ (0, 1)"),
            key("horizon", "1e-3", "final time"),
            key("s", "1", "Sobolev exponent for reported norms"),
            key("samples", "16", "output samples per run"),
            key("tol", "1e-12", "integrator tolerance"),
        ],
        run: compare_nls,
    },
    Subcommand {
        name: "phase-portrait",
        about: "Level sets of a reduced two-mode system on I1 + I2 = 1",
        keys: &[
            key("system", "s2", "s2, s2-derived, s3 or rectangle"),
            key("n", "2", "family parameter of the rectangle system"),
            key("grid", "101", "grid points per axis"),
            key("resolution", "256", "bisection cells for critical points"),
        ],
        run: phase_portrait_cmd,
    },
    Subcommand {
        name: "no-transfer-scan",
        about: "Scan initial phases and record the largest I1 reached",
        keys: &[
            key("system", "s2", "s2, s2-derived, s3 or rectangle"),
            key("n", "2", "family parameter of the rectangle system"),
            key("i1", "1e-3", "initial action I1"),
            key("phases", "100", "number of initial phases over one period"),
            key("T", "100", "horizon"),
            key("margin", "0.5", "pass if sup I1 ≤ 1 − margin"),
            key("control", "true", "also run the rectangle positive control"),
        ],
        run: no_transfer_scan,
    },
];

fn write(r: &Resolved, name: &str, contents: &str) -> Result<(), Failure> {
    let p = write_atomic(r.out_dir(), name, contents).map_err(|e| Failure::Io(format!("{name}: {e}")))?;
    eprintln!("wrote {}", p.display());
    Ok(())
}

fn family_parameter(r: &Resolved, n_gen: usize) -> Result<f64, Failure> {
    Ok(r.opt::<f64>("n")?.unwrap_or((1u64 << (n_gen.saturating_sub(1)).min(62)) as f64))
}

fn n_gen(r: &Resolved, min: usize) -> Result<usize, Failure> {
    let n: usize = r.get("N")?;
    if n < min {
        return Err(Failure::Config(format!("N = {n} must be at least {min}")));
    }
    Ok(n)
}

fn placement_config(r: &Resolved, n_gen: usize) -> Result<PerturbConfig, Failure> {
    let seed = r.get("seed")?;
    let mut cfg = default_config_for(n_gen, seed);
    cfg.budget = r.get("budget")?;
    match r.raw("strategy") {
        "auto" => {}
        s => cfg.strategy = s.parse().map_err(Failure::Config)?,
    }
    Ok(cfg)
}

fn certificate_summary(c: &Certificate) -> serde_json::Value {
    json!({ "certified": c.passed(), "backend": c.backend, "complete": c.complete })
}

fn build_set(r: &Resolved) -> Result<(), Failure> {
    let s: f64 = r.get("s")?;
    let min_norm: Option<f64> = r.opt("min-norm")?;
    if let Some(k) = r.opt::<f64>("target")? {
        let n = generations_for_target(k, s);
        let cfg = placement_config(r, n)?;
        let out = build_for_target(k, 1.0, min_norm.unwrap_or(1.0), s, &cfg).map_err(|e| match e {
            TargetError::Invalid(m) => Failure::Config(m),
            e => Failure::Numerical(e.to_string()),
        })?;
        write(r, "set.txt", &lattice_set_to_text(&out.set))?;
        if let Some(c) = &out.certificate {
            write(r, "certificate.txt", &c.to_text())?;
        }
        let summary = json!({
            "N": out.n_gen,
            "points": out.set.len(),
            "target_ratio": f(out.target),
            "ratio": out.ratio.to_string(),
            "ratio_precision": "dd",
            "norm_explosion": out.norm_explosion,
            "dilation": out.dilation.to_string(),
            "attempts": out.attempts,
            "certification": format!("{:?}", out.level),
        });
        return write(r, "summary.json", &json(&summary));
    }
    let n = n_gen(r, 2)?;
    let model = build_combinatorial_model(n).map_err(|e| Failure::Config(e.to_string()))?;
    if r.raw("strategy") == "prototype" {
        let p = prototype_embedding(&model).map_err(|e| Failure::Numerical(e.to_string()))?;
        let table = model.table(p.points).map_err(|e| Failure::Numerical(e.to_string()))?;
        write(r, "set.txt", &rational_set_to_text(&table))?;
        return write(r, "summary.json", &json(&json!({ "N": n, "points": table.len(), "embedding": "prototype" })));
    }
    let cfg = placement_config(r, n)?;
    let out = perturb_to_nondegenerate(&model, &cfg).map_err(|e| Failure::Numerical(e.to_string()))?;
    let (mut set, mut dilation) = out.set.dilate_to_integers(&BigInt::one());
    if let Some(rmin) = min_norm {
        let min2 = set.points().iter().map(|p| p.norm2.clone()).min().unwrap_or_default();
        let m = dilation_for_size(&BigInt::one(), &BigRational::from_integer(min2), rmin);
        set = set.dilate(&m);
        dilation *= m;
    }
    write(r, "set.txt", &lattice_set_to_text(&set))?;
    if let Some(c) = &out.certificate {
        write(r, "certificate.txt", &c.to_text())?;
    }
    let summary = json!({
        "N": n,
        "points": set.len(),
        "attempts": out.attempts,
        "dilation": dilation.to_string(),
        "max_coordinate": coordinate_bound(&set).to_string(),
        "certificate": out.certificate.as_ref().map(certificate_summary),
    });
    write(r, "summary.json", &json(&summary))
}

pub const MAX_CERTIFY_ENV: &str = "CASCADE_MAX_CERTIFY_POINTS";

fn read_set(path: &str) -> Result<RationalGenerationSet, Failure> {
    if path.is_empty() {
        return Err(Failure::Config("`set` is required".into()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {path}: {e}")))?;
    parse_generation_set(&text).map_err(|e| Failure::Config(format!("{path}: {e}")))
}

fn certify_cmd(r: &Resolved) -> Result<(), Failure> {
    let set = read_set(r.raw("set"))?;
    let limit: usize = match std::env::var(MAX_CERTIFY_ENV) {
        Ok(v) => v.parse().map_err(|_| Failure::Config(format!("{MAX_CERTIFY_ENV} = `{v}` is not a count")))?,
        Err(_) => 512,
    };
    if set.len() > limit {
        return Err(Failure::Config(format!("{} points exceed the enumeration cap {limit} (set {MAX_CERTIFY_ENV})", set.len())));
    }
    // Resonances are invariant under dilation, so rational sets are cleared of denominators.
    let (ints, dilation) = set.dilate_to_integers(&BigInt::one());
    let cert = certify(&ints);
    let mut text = format!("dilation = {dilation}\n");
    text.push_str(&cert.to_text());
    write(r, "certificate.txt", &text)?;
    if cert.passed() {
        Ok(())
    } else {
        let forbidden = cert.nondegeneracy.as_ref().map(|n| n.witnesses.iter().filter(|(_, c)| *c == WitnessClass::Forbidden).count()).unwrap_or(0);
        Err(Failure::Certificate(format!("certificate failed ({forbidden} forbidden witnesses; see certificate.txt)")))
    }
}

fn parse_b0(spec: &str, n_gen: usize) -> Result<Vec<Complex64>, Failure> {
    let bad = |m: String| Failure::Config(format!("b0 = `{spec}`: {m}"));
    let zero = Complex64::new(0.0, 0.0);
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mode = |s: &str| -> Result<usize, Failure> {
        let j: usize = s.parse().map_err(|_| bad(format!("bad mode `{s}`")))?;
        if (1..=n_gen).contains(&j) {
            Ok(j)
        } else {
            Err(bad(format!("mode {j} outside 1..={n_gen}")))
        }
    };
    match kind {
        "periodic" => {
            let mut b = vec![zero; n_gen];
            b[mode(rest)? - 1] = Complex64::new(1.0, 0.0);
            Ok(b)
        }
        "pair" => {
            let (j, i) = rest.split_once(':').ok_or_else(|| bad("expected pair:j:I".into()))?;
            let j = mode(j)?;
            if j == n_gen {
                return Err(bad("pair needs modes j and j+1".into()));
            }
            let i1: f64 = i.parse().map_err(|_| bad(format!("bad action `{i}`")))?;
            if !(0.0..=1.0).contains(&i1) {
                return Err(bad("I must lie in [0, 1]".into()));
            }
            let n = (1u64 << (n_gen - 1).min(62)) as f64;
            let s = two_generation_state(i1, 1.0, heteroclinic_angle(n));
            let mut b = vec![zero; n_gen];
            b[j] = s[0];
            b[j - 1] = s[1];
            Ok(b)
        }
        "random" => {
            let seed: u64 = rest.parse().map_err(|_| bad(format!("bad seed `{rest}`")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut b: Vec<Complex64> = (0..n_gen).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let norm = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            b.iter_mut().for_each(|z| *z /= norm);
            Ok(b)
        }
        "values" => {
            let b = rest
                .split(',')
                .map(|c| {
                    let (re, im) = c.split_once(':').unwrap_or((c, "0"));
                    Ok(Complex64::new(re.trim().parse().map_err(|_| bad(format!("bad value `{c}`")))?, im.trim().parse().map_err(|_| bad(format!("bad value `{c}`")))?))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            if b.len() != n_gen {
                return Err(bad(format!("{} values for N = {n_gen}", b.len())));
            }
            Ok(b)
        }
        _ => Err(bad("expected periodic:j, pair:j:I, random:SEED or values:...".into())),
    }
}

fn toy_csv(tr: &Trajectory, n_gen: usize) -> String {
    let mut header = vec!["t".to_string(), "J".into(), "h".into()];
    for k in 1..=n_gen {
        header.extend([format!("re_b{k}"), format!("im_b{k}"), format!("abs2_b{k}")]);
    }
    let mut csv = Csv::new(tr.precision.tag(), &header);
    for (i, (t, b)) in tr.times.iter().zip(&tr.states).enumerate() {
        let mut row = vec![f(*t), f(tr.mass[i]), f(tr.energy[i])];
        for z in b {
            row.extend([f(z.re), f(z.im), f(z.norm_sqr())]);
        }
        csv.row(&row);
    }
    csv.finish()
}

fn simulate_toy(r: &Resolved) -> Result<(), Failure> {
    let n_gen = n_gen(r, 2)?;
    let n = family_parameter(r, n_gen)?;
    let t_end: f64 = r.get("T")?;
    if !(t_end > 0.0) {
        return Err(Failure::Config("T must be positive".into()));
    }
    let precision: Precision = r.get("precision")?;
    let mut model = ToyModel::new(n_gen, n);
    if r.get::<bool>("rescaled")? {
        model = model.rescaled();
    }
    let b0 = parse_b0(r.raw("b0"), n_gen)?;
    let opts = IntegrateOptions { tol: r.get("tol")?, precision, sample_dt: Some(r.opt("dt")?.unwrap_or(t_end / 1000.0)), ..IntegrateOptions::default() };
    let tr = integrate(&model, &b0, t_end, &opts).map_err(|e| match e {
        ToyError::Invalid(m) => Failure::Config(m),
        e => Failure::Numerical(e.to_string()),
    })?;
    write(r, "trajectory.csv", &toy_csv(&tr, n_gen))?;
    let summary = json!({
        "N": n_gen,
        "n": f(n),
        "precision": tr.precision.tag(),
        "samples": tr.times.len(),
        "J0": f(tr.mass[0]),
        "h0": f(tr.energy[0]),
        "mass_drift": f(tr.mass_drift()),
        "energy_drift": f(tr.energy_drift()),
        "steps_accepted": tr.stats.accepted,
        "steps_rejected": tr.stats.rejected,
    });
    write(r, "summary.json", &json(&summary))
}

fn slider_search(r: &Resolved) -> Result<(), Failure> {
    let n_gen = n_gen(r, 6)?;
    let mut cfg = SliderConfig::new(n_gen, family_parameter(r, n_gen)?, r.get("eps")?);
    cfg.precision = r.get("precision")?;
    cfg.tol = r.get("tol")?;
    cfg.hop_time = r.get("hop-time")?;
    cfg.initial_phases = r.list("phases")?;
    let res = slider_shoot(&cfg).map_err(|e| match e {
        SliderError::Invalid(m) => Failure::Config(m),
        e => Failure::Numerical(e.to_string()),
    })?;
    let rep = verify_slider(&res, cfg.eps);
    let dt: f64 = r.get("dt")?;
    let tr = &res.trajectory;
    let mut header = vec!["t".to_string(), "J".into()];
    header.extend((1..=n_gen).map(|k| format!("abs2_b{k}")));
    let mut csv = Csv::new(res.precision.tag(), &header);
    let mut next = f64::NEG_INFINITY;
    for (i, (t, b)) in tr.times.iter().zip(&tr.states).enumerate() {
        if *t >= next || i + 1 == tr.times.len() {
            let mut row = vec![f(*t), f(tr.mass[i])];
            row.extend(b.iter().map(|z| f(z.norm_sqr())));
            csv.row(&row);
            next = t + dt;
        }
    }
    write(r, "slider_trajectory.csv", &csv.finish())?;
    let summary = json!({
        "config": cfg,
        "precision": res.precision.tag(),
        "final_time": f(res.final_time),
        "hops": res.hops,
        "report": rep,
    });
    write(r, "slider.json", &json(&summary))?;
    if rep.ok {
        Ok(())
    } else {
        Err(Failure::Certificate("the orbit does not pass the slider checks (see slider.json)".into()))
    }
}

fn compare_nls(r: &Resolved) -> Result<(), Failure> {
    let set: GenerationSet = if r.raw("set").is_empty() {
        let n = n_gen(r, 2)?;
        let model = build_combinatorial_model(n).map_err(|e| Failure::Config(e.to_string()))?;
        let out = perturb_to_nondegenerate(&model, &default_config_for(n, r.get("seed")?)).map_err(|e| Failure::Numerical(e.to_string()))?;
        out.set.dilate_to_integers(&BigInt::one()).0.convert::<i64>()
    } else {
        read_set(r.raw("set"))?.dilate_to_integers(&BigInt::one()).0.convert::<i64>()
    }
    .ok_or_else(|| Failure::Config("set coordinates exceed i64".into()))?;
    let b0 = parse_b0(r.raw("b0"), set.n_generations())?;
    let cfg = ExperimentConfig {
        lambdas: r.list("lambdas")?,
        sigma: r.get("sigma")?,
        horizon: r.get("horizon")?,
        s: r.get("s")?,
        samples: r.get("samples")?,
        tol: r.get("tol")?,
    };
    let lad = approximation_ladder(&set, &b0, &cfg).map_err(|e| match e {
        ExperimentError::Integration(e) => Failure::Numerical(e.to_string()),
        e => Failure::Config(e.to_string()),
    })?;
    let mut csv = Csv::new("f64", &["lambda", "t", "error_l1", "sobolev_g", "sobolev_a"].map(String::from));
    for rep in &lad.reports {
        for i in 0..rep.times.len() {
            csv.row(&[f(rep.lambda), f(rep.times[i]), f(rep.error_l1[i]), f(rep.sobolev_g[i]), f(rep.sobolev_a[i])]);
        }
    }
    write(r, "nls_errors.csv", &csv.finish())?;
    let mut v = serde_json::to_value(&lad).map_err(|e| Failure::Io(e.to_string()))?;
    v["precision"] = json!("f64");
    v["config"] = serde_json::to_value(&cfg).map_err(|e| Failure::Io(e.to_string()))?;
    write(r, "nls_report.json", &json(&v))
}

fn reduced_system(r: &Resolved) -> Result<ReducedSystem, Failure> {
    let num = |e: ReducedError| Failure::Numerical(e.to_string());
    match r.raw("system") {
        "s2" => Ok(frak_s2_system()),
        "s2-derived" => {
            let k = find_frak_s2(3).ok_or_else(|| Failure::Numerical("no 𝔖⁽²⁾ configuration in the search box".into()))?;
            Ok(frak_s2_from_configuration(&k).map_err(num)?.0)
        }
        "s3" => {
            let q = find_frak_s3(10).ok_or_else(|| Failure::Numerical("no 𝔖⁽³⁾ quadruple in the search box".into()))?;
            frak_s3_system(&q).map_err(num)
        }
        "rectangle" => {
            let n: usize = r.get("n")?;
            if n < 2 {
                return Err(Failure::Config("n must be at least 2".into()));
            }
            Ok(rectangle_system(n))
        }
        other => Err(Failure::Config(format!("unknown system `{other}` (expected s2, s2-derived, s3 or rectangle)"))),
    }
}

fn phase_portrait_cmd(r: &Resolved) -> Result<(), Failure> {
    let sys = reduced_system(r)?;
    let grid: usize = r.get("grid")?;
    if grid < 2 {
        return Err(Failure::Config("grid must be at least 2".into()));
    }
    let mut csv = Csv::new("f64", &["dtheta", "i1", "h"].map(String::from));
    for p in phase_portrait(&sys, grid) {
        csv.row(&[f(p.dtheta), f(p.i1), f(p.h)]);
    }
    write(r, "portrait.csv", &csv.finish())?;
    let mut crit = Csv::new("f64", &["dtheta", "i1", "h"].map(String::from));
    for p in critical_points(&sys, r.get("resolution")?) {
        crit.row(&[f(p.dtheta), f(p.i1), f(p.h)]);
    }
    write(r, "critical.csv", &crit.finish())?;
    let mut text = format!("# {}: H(z1, z2), period {} in Δθ\n", sys.name, f(sys.period));
    text.push_str(&sys.hamiltonian.to_text());
    write(r, "hamiltonian.txt", &text)
}

fn no_transfer_scan(r: &Resolved) -> Result<(), Failure> {
    let sys = reduced_system(r)?;
    let scan = no_full_transfer_scan(&sys, r.get("i1")?, r.get("phases")?, r.get("T")?, r.get("margin")?).map_err(|e| match e {
        ReducedError::Invalid(m) => Failure::Config(m),
        e => Failure::Numerical(e.to_string()),
    })?;
    let control = if r.get::<bool>("control")? {
        let n: usize = r.get("n")?;
        Some(positive_control(n.max(2), 1e-3, 3.0).map_err(|e| Failure::Numerical(e.to_string()))?)
    } else {
        None
    };
    let control_ok = control.as_ref().is_none_or(|c| c.sup_i1 >= 1.0 - 1e-4);
    let v = json!({
        "precision": "f64",
        "period": f(sys.period),
        "period_over_pi": f(sys.period / PI),
        "scan": scan,
        "control": control,
        "control_passes": control_ok,
    });
    write(r, "scan.json", &json(&v))?;
    eprintln!("sup I1 = {} over {} phases", f(scan.sup_i1), scan.orbits.len());
    match (scan.passes, control_ok) {
        (true, true) => Ok(()),
        (false, _) => Err(Failure::Certificate(format!("sup I1 = {} exceeds 1 − margin", f(scan.sup_i1)))),
        (true, false) => Err(Failure::Certificate("positive control did not transfer".into())),
    }
}
