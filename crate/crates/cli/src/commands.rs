use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use l2tors::abelian::{l2_torsion_abelian, mahler_log, mahler_monte_carlo, LaurentPoly, QuadratureConfig};
use l2tors::chain::{extend_tower, mapping_torus, validate_complex, ChainComplex, ComplexReport, MappingTorusSpec};
use l2tors::combine::{rational_string, DecompositionSpec};
use l2tors::engine::{
    betti, fk_log_det, l2_torsion, rho_of_automorphism, BettiEstimate, CutoffPolicy, EigenMethod,
    EngineConfig, TorsionEstimate,
};
use l2tors::group::{validate_tower, GroupPresentation, QuotientTower, RingElement, TowerReport};
use l2tors::growth::growth_series;

use crate::args::*;
use crate::report::{num, Body, Job};

/// Failure classes, mapped to exit statuses 2 and 3.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numeric(String),
}

impl From<l2tors::Error> for Failure {
    fn from(e: l2tors::Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

/// A written report; `failed` carries a validation failure that is reported
/// after the report has been emitted.
pub struct Done {
    pub job: Job,
    pub body: Body,
    pub failed: Option<String>,
}

type Outcome = Result<Done, Failure>;

fn done(job: Job, body: Body) -> Outcome {
    Ok(Done {
        job,
        body,
        failed: None,
    })
}

fn read(path: &Path, role: &str, job: &mut Job) -> Result<String, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Validation(format!("cannot read {role} file {}: {e}", path.display())))?;
    job.input(role, &bytes);
    String::from_utf8(bytes)
        .map_err(|_| Failure::Validation(format!("{role} file {} is not UTF-8", path.display())))
}

fn load_complex(path: &Path, job: &mut Job) -> Result<ChainComplex, Failure> {
    let text = read(path, "complex", job)?;
    ChainComplex::from_json(&text)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn load_tower(path: &Path, g: &GroupPresentation, job: &mut Job) -> Result<QuotientTower, Failure> {
    let text = read(path, "tower", job)?;
    QuotientTower::from_json(&text, g).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn tower_failures(r: &TowerReport) -> Result<(), Failure> {
    if r.pass {
        Ok(())
    } else {
        Err(Failure::Validation(format!("tower fails validation: {}", r.failures().join("; "))))
    }
}

fn complex_failure(r: &ComplexReport) -> Result<(), Failure> {
    match r.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure::Validation(format!(
            "not a chain complex: ∂_{}∘∂_{} ≠ 0 at level {} (label {}), max entry {}",
            c.degree - 1,
            c.degree,
            c.level,
            c.label,
            c.max_abs_entry
        ))),
    }
}

/// Complex and tower loaded and validated against each other.
fn complex_and_tower(
    complex: &Path,
    tower: &Path,
    job: &mut Job,
) -> Result<(ChainComplex, QuotientTower), Failure> {
    let c = load_complex(complex, job)?;
    let t = load_tower(tower, c.group(), job)?;
    tower_failures(&validate_tower(c.group(), &t))?;
    complex_failure(&validate_complex(&c, &t)?)?;
    Ok((c, t))
}

fn engine_config(a: &EngineArgs, job: &mut Job) -> Result<EngineConfig, Failure> {
    let mut cfg = EngineConfig::default();
    if let Some(c) = a.cutoff {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Failure::Validation(format!("--cutoff must be positive and finite, got {c}")));
        }
        cfg.cutoff = CutoffPolicy::Fixed(c);
    }
    if a.dense_limit == 0 {
        return Err(Failure::Validation("--dense-limit must be at least 1".into()));
    }
    cfg.method = match a.method {
        Method::Auto => EigenMethod::Auto,
        Method::Dense => EigenMethod::Dense,
        Method::Fourier => EigenMethod::Fourier,
        Method::Lanczos => EigenMethod::Lanczos,
    };
    cfg.dense_limit = a.dense_limit;
    cfg.seed = a.seed;
    job.knob("engine", &cfg);
    Ok(cfg)
}

fn quadrature_config(a: &QuadratureArgs, job: &mut Job) -> Result<QuadratureConfig, Failure> {
    if a.grid < 1 {
        return Err(Failure::Validation("--grid must be at least 1".into()));
    }
    if !(a.tolerance > 0.0 && a.tolerance.is_finite()) {
        return Err(Failure::Validation(format!("--tolerance must be positive, got {}", a.tolerance)));
    }
    if a.max_points < a.grid {
        return Err(Failure::Validation("--max-points must be at least --grid".into()));
    }
    let cfg = QuadratureConfig {
        grid: a.grid.max(8),
        tolerance: a.tolerance,
        max_points: a.max_points,
    };
    job.knob("quadrature", cfg);
    Ok(cfg)
}

fn t_order(m: usize, job: &mut Job) -> Result<usize, Failure> {
    if m == 0 {
        return Err(Failure::Validation("--t-order must be at least 1".into()));
    }
    job.knob("t_order", m);
    Ok(m)
}

pub fn validate(a: &ValidateArgs) -> Outcome {
    let mut job = Job::new("validate");
    let mut text = String::new();
    let mut csv = String::from("kind,level,label,degree,status,detail\n");
    let mut errors: Vec<String> = Vec::new();
    let mut result = json!({});

    let tower_section = |r: &TowerReport, text: &mut String, csv: &mut String, errors: &mut Vec<String>| {
        for c in &r.levels {
            let status = if c.pass() { "pass" } else { "FAIL" };
            let _ = writeln!(text, "tower level {} (label {}, degree {}): {status}", c.level, c.label, c.degree);
            let _ = writeln!(csv, "tower,{},{},{},{status},", c.level, c.label, c.degree);
        }
        if !r.degrees_monotone {
            let _ = writeln!(csv, "tower,,,,FAIL,degrees not monotone");
        }
        for f in r.failures() {
            let _ = writeln!(text, "  {f}");
            errors.push(format!("tower: {f}"));
        }
    };
    let complex_section = |r: &ComplexReport, what: &str, text: &mut String, csv: &mut String, errors: &mut Vec<String>| {
        let _ = writeln!(text, "{what}:");
        for c in &r.checks {
            let status = if c.max_abs_entry == 0 { "pass" } else { "FAIL" };
            let _ = writeln!(csv, "{what},{},{},{},{status},{}", c.level, c.label, c.degree, c.max_abs_entry);
            let _ = writeln!(
                text,
                "  level {} (label {}), degree {}: max |∂∂| = {} {status}",
                c.level, c.label, c.degree, c.max_abs_entry
            );
        }
        if let Some(c) = r.first_failure() {
            errors.push(format!(
                "{what}: ∂_{}∘∂_{} ≠ 0 at level {} (label {}), max entry {}",
                c.degree - 1,
                c.degree,
                c.level,
                c.label,
                c.max_abs_entry
            ));
        }
    };

    if let Some(p) = &a.presentation {
        let src = read(p, "presentation", &mut job)?;
        let g = GroupPresentation::parse(&src).map_err(|e| Failure::Validation(format!("{}: {e}", p.display())))?;
        let _ = writeln!(text, "presentation: {} generators, {} relators", g.rank(), g.relators().len());
        if let Some(tp) = &a.tower {
            let t = load_tower(tp, &g, &mut job)?;
            let r = validate_tower(&g, &t);
            tower_section(&r, &mut text, &mut csv, &mut errors);
            result["tower"] = serde_json::to_value(&r).expect("serialises");
        }
    } else if let Some(cp) = &a.complex {
        let c = load_complex(cp, &mut job)?;
        let _ = writeln!(text, "complex: ranks {:?}, free {}", c.ranks(), c.is_free());
        result["ranks"] = json!(c.ranks());
        if let Some(tp) = &a.tower {
            let t = load_tower(tp, c.group(), &mut job)?;
            let r = validate_tower(c.group(), &t);
            tower_section(&r, &mut text, &mut csv, &mut errors);
            result["tower"] = serde_json::to_value(&r).expect("serialises");
            let cr = validate_complex(&c, &t)?;
            complex_section(&cr, "complex", &mut text, &mut csv, &mut errors);
            result["complex"] = serde_json::to_value(&cr).expect("serialises");
        }
    } else if let Some(mp) = &a.mapping_torus {
        let src = read(mp, "mapping_torus", &mut job)?;
        let spec = MappingTorusSpec::from_json(&src).map_err(|e| Failure::Validation(format!("{}: {e}", mp.display())))?;
        let tp = a
            .tower
            .as_ref()
            .ok_or_else(|| Failure::Validation("--mapping-torus needs --tower".into()))?;
        let m = t_order(a.t_order, &mut job)?;
        let t = load_tower(tp, spec.base.group(), &mut job)?;
        let r = validate_tower(spec.base.group(), &t);
        tower_section(&r, &mut text, &mut csv, &mut errors);
        result["tower"] = serde_json::to_value(&r).expect("serialises");
        if r.pass {
            let (ext, complex) = mapping_torus(&spec, &t)?;
            let et = extend_tower(spec.base.group(), &t, &spec.automorphism, m)?;
            let er = validate_tower(&ext.presentation, &et);
            for f in er.failures() {
                errors.push(format!("extended tower: {f}"));
            }
            let degrees: Vec<usize> = et.levels().iter().map(|l| l.degree()).collect();
            let _ = writeln!(text, "extended tower: degrees {degrees:?}, {}", if er.pass { "pass" } else { "FAIL" });
            let cr = validate_complex(&complex, &et)?;
            complex_section(&cr, "mapping-torus", &mut text, &mut csv, &mut errors);
            result["extended_degrees"] = json!(degrees);
            result["extended_tower_pass"] = json!(er.pass);
            result["mapping_torus"] = serde_json::to_value(&cr).expect("serialises");
            result["mapping_torus_ranks"] = json!(complex.ranks());
        }
    } else {
        return Err(Failure::Validation(
            "validate needs --presentation, --complex or --mapping-torus".into(),
        ));
    }
    result["pass"] = json!(errors.is_empty());
    let _ = writeln!(text, "overall: {}", if errors.is_empty() { "pass" } else { "FAIL" });
    let body = Body {
        text,
        csv: ("validate", csv),
        json: result,
    };
    Ok(Done {
        job,
        body,
        failed: (!errors.is_empty()).then(|| errors.join("\n")),
    })
}

fn betti_text(b: &BettiEstimate, out: &mut String) {
    let _ = writeln!(
        out,
        "degree {}: extrapolated b = {:.12}, dispersion {:.3e}",
        b.degree, b.extrapolated, b.dispersion
    );
    let _ = writeln!(out, "  {:>8} {:>8} {:>10} {:>16} {}", "label", "index", "kernel", "b_p", "exact");
    for l in &b.levels {
        let _ = writeln!(
            out,
            "  {:>8} {:>8} {:>10} {:>16.12} {}",
            l.label, l.index, l.kernel_dim, l.value, l.exact
        );
    }
}

pub fn betti_cmd(a: &BettiArgs) -> Outcome {
    let mut job = Job::new("betti");
    let cfg = engine_config(&a.engine, &mut job)?;
    let (c, t) = complex_and_tower(&a.complex, &a.tower, &mut job)?;
    let degrees: Vec<usize> = match a.degree {
        Some(p) if p > c.top_degree() => {
            return Err(Failure::Validation(format!(
                "--degree {p} exceeds the top degree {}",
                c.top_degree()
            )))
        }
        Some(p) => vec![p],
        None => (0..=c.top_degree()).collect(),
    };
    job.knob("degrees", &degrees);
    let estimates = degrees
        .iter()
        .map(|&p| betti(&c, &t, p, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::new();
    let mut csv = String::from("degree,level,index,kernel_dim,betti,exact\n");
    for b in &estimates {
        betti_text(b, &mut text);
        for l in &b.levels {
            let _ = writeln!(csv, "{},{},{},{},{},{}", b.degree, l.label, l.index, l.kernel_dim, num(l.value), l.exact);
        }
    }
    done(
        job,
        Body {
            text,
            csv: ("betti", csv),
            json: serde_json::to_value(&estimates).expect("serialises"),
        },
    )
}

pub fn logdet_cmd(a: &LogdetArgs) -> Outcome {
    let mut job = Job::new("logdet");
    let cfg = engine_config(&a.engine, &mut job)?;
    job.knob("degree", a.degree);
    let (c, t) = complex_and_tower(&a.complex, &a.tower, &mut job)?;
    if a.degree > c.top_degree() {
        return Err(Failure::Validation(format!(
            "--degree {} exceeds the top degree {}",
            a.degree,
            c.top_degree()
        )));
    }
    let est = fk_log_det(&c.laplacian(a.degree)?, &t, &cfg)?;
    let mut text = format!(
        "log det Δ_{} = {:.12}, dispersion {:.3e}\n",
        a.degree, est.headline, est.dispersion
    );
    let _ = writeln!(
        text,
        "  {:>8} {:>8} {:>8} {:>20} {:>10} {:>10} {}",
        "label", "index", "dim", "log det", "cutoff", "discarded", "method"
    );
    let mut csv = String::from("level,index,dim,log_det,cutoff,discarded,min_eigenvalue,method\n");
    for l in &est.levels {
        let _ = writeln!(
            text,
            "  {:>8} {:>8} {:>8} {:>20.12} {:>10.2e} {:>10} {}",
            l.label, l.index, l.dim, l.value, l.cutoff, l.discarded, l.method
        );
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            l.label,
            l.index,
            l.dim,
            num(l.value),
            num(l.cutoff),
            l.discarded,
            num(l.min_eigenvalue),
            l.method
        );
    }
    done(
        job,
        Body {
            text,
            csv: ("logdet", csv),
            json: serde_json::to_value(&est).expect("serialises"),
        },
    )
}

fn torsion_body(r: &TorsionEstimate) -> Body {
    let mut text = format!(
        "rho = {:.12} ± {:.3e} [{}]\n",
        r.value, r.dispersion, r.provenance
    );
    let _ = writeln!(
        text,
        "L2-acyclic: {} (threshold {:.3e})",
        if r.is_l2_acyclic() { "yes" } else { "no" },
        r.acyclicity_threshold
    );
    let _ = writeln!(text, "levels:\n  {:>8} {:>8} {:>20}", "label", "index", "rho");
    let mut csv = String::from("level,index,rho");
    for d in &r.degrees {
        let _ = write!(csv, ",log_det_{}", d.degree);
    }
    csv.push('\n');
    for (i, l) in r.levels.iter().enumerate() {
        let _ = writeln!(text, "  {:>8} {:>8} {:>20.12}", l.label, l.index, l.value);
        let _ = write!(csv, "{},{},{}", l.label, l.index, num(l.value));
        for d in &r.degrees {
            let _ = write!(csv, ",{}", num(d.log_det.levels[i].value));
        }
        csv.push('\n');
    }
    let _ = writeln!(text, "degree terms (weight × log det, last level):");
    for d in &r.degrees {
        let _ = writeln!(
            text,
            "  Δ_{}: {:+.1} × {:.12}",
            d.degree,
            d.weight,
            d.log_det.headline
        );
    }
    for b in &r.betti {
        betti_text(b, &mut text);
    }
    if !r.diagnostics.is_empty() {
        let _ = writeln!(text, "diagnostics:");
        for d in &r.diagnostics {
            let _ = writeln!(text, "  {d}");
        }
    }
    Body {
        text,
        csv: ("torsion", csv),
        json: serde_json::to_value(r).expect("serialises"),
    }
}

pub fn torsion_cmd(a: &TorsionArgs) -> Outcome {
    let mut job = Job::new("torsion");
    job.knob("abelian", a.abelian);
    if a.abelian {
        let q = quadrature_config(&a.quadrature, &mut job)?;
        let c = load_complex(&a.complex, &mut job)?;
        let r = l2_torsion_abelian(&c, &q)?;
        let mut text = format!(
            "rho = {:.12} [{}]\ngrid {} per axis, refinement difference {:.3e}\n",
            r.value, r.provenance, r.grid, r.error_proxy
        );
        let mut csv = String::from("degree,weight,determinant,mahler\n");
        for d in &r.degrees {
            let _ = writeln!(text, "  Δ_{}: {:+.1} × m({}) = {:+.1} × {:.12}", d.degree, d.weight, d.determinant, d.weight, d.mahler);
            let _ = writeln!(csv, "{},{},\"{}\",{}", d.degree, num(d.weight), d.determinant, num(d.mahler));
        }
        return done(
            job,
            Body {
                text,
                csv: ("torsion-abelian", csv),
                json: serde_json::to_value(&r).expect("serialises"),
            },
        );
    }
    let cfg = engine_config(&a.engine, &mut job)?;
    let tower = a.tower.as_ref().expect("clap requires --tower without --abelian");
    let (c, t) = complex_and_tower(&a.complex, tower, &mut job)?;
    let r = l2_torsion(&c, &t, &cfg)?;
    for d in &r.diagnostics {
        eprintln!("warning: {d}");
    }
    done(job, torsion_body(&r))
}

pub fn auto_torsion_cmd(a: &AutoTorsionArgs) -> Outcome {
    let mut job = Job::new("auto-torsion");
    let cfg = engine_config(&a.engine, &mut job)?;
    let m = t_order(a.t_order, &mut job)?;
    let src = read(&a.mapping_torus, "mapping_torus", &mut job)?;
    let spec = MappingTorusSpec::from_json(&src)
        .map_err(|e| Failure::Validation(format!("{}: {e}", a.mapping_torus.display())))?;
    let t = load_tower(&a.tower, spec.base.group(), &mut job)?;
    tower_failures(&validate_tower(spec.base.group(), &t))?;
    let r = rho_of_automorphism(&spec, &t, m, &cfg)?;
    for d in &r.diagnostics {
        eprintln!("warning: {d}");
    }
    done(job, torsion_body(&r))
}

pub fn mahler_cmd(a: &MahlerArgs) -> Outcome {
    let mut job = Job::new("mahler");
    job.knob("poly", &a.poly);
    job.knob("vars", &a.vars);
    let x = RingElement::parse(&a.poly, &a.vars)?;
    let nvars = x.max_generator().map_or(1, |g| g + 1);
    let p = LaurentPoly::from_ring_element(&x, nvars);
    let r = match a.monte_carlo {
        Some(0) => return Err(Failure::Validation("--monte-carlo needs at least one sample".into())),
        Some(n) => {
            job.knob("monte_carlo", n);
            job.knob("seed", a.seed);
            mahler_monte_carlo(&p, n, a.seed)?
        }
        None => mahler_log(&p, &quadrature_config(&a.quadrature, &mut job)?)?,
    };
    let method = serde_json::to_value(r.method).expect("serialises");
    let method = method.as_str().unwrap_or_default().to_string();
    let text = format!(
        "m({p}) = {:.12}\nmethod {method}, grid {}, error proxy {:.3e}\n",
        r.value, r.grid, r.error_proxy
    );
    let csv = format!(
        "polynomial,value,method,grid,error_proxy\n\"{p}\",{},{method},{},{}\n",
        num(r.value),
        r.grid,
        num(r.error_proxy)
    );
    let mut json = serde_json::to_value(&r).expect("serialises");
    json["polynomial"] = Value::String(p.to_string());
    done(job, Body { text, csv: ("mahler", csv), json })
}

pub fn combine_cmd(a: &CombineArgs) -> Outcome {
    let mut job = Job::new("combine");
    let src = read(&a.spec, "spec", &mut job)?;
    let spec = DecompositionSpec::from_json(&src)
        .map_err(|e| Failure::Validation(format!("{}: {e}", a.spec.display())))?;
    let e = spec.evaluate()?;
    let text = format!("value = {}\ntrace:\n{}", e.value, e.trace_text());
    let mut csv = String::from("path,depth,rule,value,exact,provenance\n");
    let mut steps: Vec<_> = e.trace.iter().collect();
    steps.sort_by(|a, b| a.path.cmp(&b.path));
    for s in steps {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            s.path,
            s.depth,
            s.rule,
            num(s.result.value()),
            s.result.exact().map(rational_string).unwrap_or_default(),
            s.result.provenance
        );
    }
    done(
        job,
        Body {
            text,
            csv: ("combine", csv),
            json: serde_json::to_value(&e).expect("serialises"),
        },
    )
}

pub fn growth_cmd(a: &GrowthArgs) -> Outcome {
    let mut job = Job::new("growth");
    job.knob("with_engine", a.with_engine);
    let cfg = if a.with_engine {
        Some(engine_config(&a.engine, &mut job)?)
    } else {
        None
    };
    let (c, t) = complex_and_tower(&a.complex, &a.tower, &mut job)?;
    let r = growth_series(&c, &t, cfg.as_ref())?;
    let mut text = format!(
        "  {:>8} {:>8} {:>6} {:>20} {:>40}\n",
        "label", "index", "degree", "ln|tors H_n|/index", "|tors H_n|"
    );
    for row in &r.rows {
        let _ = writeln!(
            text,
            "  {:>8} {:>8} {:>6} {:>20.12} {:>40}",
            row.label, row.index, row.degree, row.normalized_log, row.torsion
        );
    }
    let _ = writeln!(text, "rho_Z per level:");
    for (l, v) in t.levels().iter().zip(&r.rho_z) {
        let _ = writeln!(text, "  {:>8} {:>20.12}", l.label(), v);
    }
    if let Some(e) = r.engine_rho {
        let _ = writeln!(text, "engine rho (last level): {e:.12}");
    }
    done(
        job,
        Body {
            text,
            csv: ("growth", r.to_csv()),
            json: serde_json::to_value(&r).expect("serialises"),
        },
    )
}
