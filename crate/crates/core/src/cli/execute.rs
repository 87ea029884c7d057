use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::schema::{csv_columns, SCHEMA_VERSION};
use crate::cli::RunConfig;
use crate::error::{Error, Result};
use crate::filtration::{
    check_growth_inequalities, smoothing, truncation_budget, FilteredVector,
};
use crate::freeprod::{
    component_bounds, component_from_cyclic, cross_validate_group, free_product_check, trivial_component, ComponentAlgebra,
    FreeProduct,
};
use crate::groups::{ball_sizes, four_point_delta, growth_exponent, make_model, DeltaMode, GroupModel};
use crate::haagerup::{growth_obstruction, haagerup_scan, known_ceiling, z2_witness, Strategy};
use crate::linop::NormOptions;
use crate::qmetric::{metric_table, MetricOptions};

/// Slack allowed above a known ceiling before a ratio counts as falsifying.
pub const CEILING_TOL: f64 = 1e-8;

pub const VERSION: &str = concat!("fcstar ", env!("CARGO_PKG_VERSION"));

/// The rendered output of one command.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub json: String,
    pub csv: Option<String>,
    /// Some checked invariant failed.
    pub falsified: bool,
    pub summary: String,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    version: &'a str,
    config: &'a RunConfig,
    status: &'a str,
    result: Value,
}

struct Outcome {
    result: Value,
    rows: Option<Vec<Vec<String>>>,
    falsified: bool,
    summary: String,
}

fn s<T: ToString>(v: T) -> String {
    v.to_string()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn model_of(cfg: &RunConfig) -> Result<GroupModel> {
    let spec = cfg
        .model
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter(format!("{} needs --model", cfg.command)))?;
    let model = make_model(spec.parse()?)?;
    Ok(match &cfg.cache_dir {
        Some(dir) => model.with_cache_dir(dir),
        None => model,
    })
}

fn norm_opts(cfg: &RunConfig) -> NormOptions {
    NormOptions::with_seed(cfg.seed)
}

fn strategy(cfg: &RunConfig) -> Result<Strategy> {
    Ok(Strategy::Combined {
        trials: cfg.need(cfg.trials, "trials")?,
        starts: cfg.need(cfg.starts, "starts")?,
        iters: cfg.need(cfg.iters, "iters")?,
        seed: cfg.seed,
    })
}

/// Parses `trivial`, `cyclic(p)` or a path to a JSON structure tensor.
pub fn parse_component(spec: &str) -> Result<ComponentAlgebra> {
    let t = spec.trim();
    if t == "trivial" {
        return Ok(trivial_component());
    }
    if let Some(p) = t.strip_prefix("cyclic(").and_then(|r| r.strip_suffix(')')) {
        let p = p.trim().parse().map_err(|_| Error::Parse(format!("bad cyclic order in '{t}'")))?;
        return component_from_cyclic(p);
    }
    let text = std::fs::read_to_string(t).map_err(|e| Error::io(t, e))?;
    ComponentAlgebra::from_json(&text)
}

/// Runs `cfg` and renders its report.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let out = match cfg.command.as_str() {
        "spheres" => spheres(cfg)?,
        "growth" => growth(cfg)?,
        "delta" => delta(cfg)?,
        "haagerup-scan" => scan(cfg)?,
        "z2-witness" => witness(cfg)?,
        "inequalities" => inequalities(cfg)?,
        "smoothing" => smoothing_cmd(cfg)?,
        "budget" => budget(cfg)?,
        "freeprod-check" => freeprod(cfg)?,
        "cross-validate" => cross(cfg)?,
        "metric" => metric(cfg)?,
        other => return Err(Error::InvalidParameter(format!("unknown command '{other}'"))),
    };
    let json = serde_json::to_string_pretty(&Envelope {
        schema_version: SCHEMA_VERSION,
        version: VERSION,
        config: cfg,
        status: if out.falsified { "falsified" } else { "ok" },
        result: out.result,
    })? + "\n";
    let csv = match (cfg.csv, out.rows, csv_columns(&cfg.command)?) {
        (true, Some(rows), Some(columns)) => Some(render_csv(&columns, &rows)?),
        _ => None,
    };
    Ok(Report {
        command: cfg.command.clone(),
        json,
        csv,
        falsified: out.falsified,
        summary: out.summary,
    })
}

fn render_csv(columns: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    let wrap = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    w.write_record(columns).map_err(wrap)?;
    for r in rows {
        assert_eq!(r.len(), columns.len(), "row width matches the schema");
        w.write_record(r).map_err(wrap)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn spheres(cfg: &RunConfig) -> Result<Outcome> {
    let model = model_of(cfg)?;
    let radius = cfg.need(cfg.radius, "radius")?;
    let balls = ball_sizes(&model, radius)?;
    let spheres: Vec<usize> = (0..=radius).map(|k| model.sphere(k).map(|s| s.len())).collect::<Result<_>>()?;
    let rows = (0..=radius).map(|k| vec![s(k), s(spheres[k]), s(balls[k])]).collect();
    Ok(Outcome {
        summary: format!("{}: |B_{radius}| = {}", model.kind(), balls[radius]),
        result: json!({
            "model": model.kind().to_string(),
            "fingerprint": model.fingerprint(),
            "radius": radius,
            "sphere_sizes": spheres,
            "ball_sizes": balls,
        }),
        rows: Some(rows),
        falsified: false,
    })
}

fn growth(cfg: &RunConfig) -> Result<Outcome> {
    let model = model_of(cfg)?;
    let p_max = cfg.need(cfg.p_max, "p_max")?;
    let g = growth_exponent(&model, p_max)?;
    let obstruction = match growth_obstruction(&model, p_max) {
        Ok(o) => Some(o),
        Err(Error::Refused(_)) => None,
        Err(e) => return Err(e),
    };
    let rows = g
        .sizes
        .iter()
        .enumerate()
        .map(|(p, &b)| vec![s(p), s(b), s(b as f64 / ((p + 1) as f64).powi(3))])
        .collect();
    Ok(Outcome {
        summary: format!("{}: slope {:.3}, {:?}", model.kind(), g.loglog_slope, g.classification),
        result: json!({ "model": model.kind().to_string(), "growth": g, "obstruction": obstruction }),
        rows: Some(rows),
        falsified: false,
    })
}

fn delta(cfg: &RunConfig) -> Result<Outcome> {
    let model = model_of(cfg)?;
    let radius = cfg.need(cfg.radius, "radius")?;
    let mode = if cfg.exhaustive.unwrap_or(true) {
        DeltaMode::Exhaustive
    } else {
        DeltaMode::Sampled { trials: cfg.need(cfg.trials, "trials")? as u64, seed: cfg.seed }
    };
    let r = four_point_delta(&model, radius, mode)?;
    Ok(Outcome {
        summary: format!("{}: delta on B_{radius} = {}", model.kind(), r.delta),
        result: json!({ "model": model.kind().to_string(), "report": r }),
        rows: None,
        falsified: false,
    })
}

fn scan(cfg: &RunConfig) -> Result<Outcome> {
    let model = model_of(cfg)?;
    let max = cfg.need(cfg.max, "max")?;
    let reports = haagerup_scan(&model, max, strategy(cfg)?, norm_opts(cfg))?;
    let max_ratio = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let exceeded: Vec<(usize, usize, usize)> =
        reports.iter().filter(|r| r.exceeds_ceiling(CEILING_TOL)).map(|r| (r.k, r.m, r.n)).collect();
    let rows = reports
        .iter()
        .map(|r| vec![s(r.k), s(r.m), s(r.n), s(r.ratio), opt(r.ceiling), s(r.evaluations), s(r.converged)])
        .collect();
    Ok(Outcome {
        summary: format!("{}: {} triples, max ratio {max_ratio:.12}", model.kind(), reports.len()),
        falsified: !exceeded.is_empty(),
        result: json!({
            "model": model.kind().to_string(),
            "reports": reports,
            "max_ratio": max_ratio,
            "ceiling": known_ceiling(model.kind()),
            "exceeded": exceeded,
        }),
        rows: Some(rows),
    })
}

fn witness(cfg: &RunConfig) -> Result<Outcome> {
    let w = z2_witness(cfg.need(cfg.k, "k")?, cfg.need(cfg.n, "n")?)?;
    Ok(Outcome {
        summary: format!("identities hold: {}, ratio bound {:.9}", w.identities_hold, w.ratio_bound),
        falsified: !w.identities_hold,
        result: json!({ "witness": w }),
        rows: None,
    })
}

fn samples(cfg: &RunConfig, model: &GroupModel) -> Result<Vec<FilteredVector>> {
    let top = cfg.need(cfg.top, "top")?;
    (0..cfg.need(cfg.samples, "samples")?)
        .map(|i| FilteredVector::random(model, top, cfg.seed.wrapping_add(i as u64), false))
        .collect()
}

fn inequalities(cfg: &RunConfig) -> Result<Outcome> {
    let model = model_of(cfg)?;
    let (c, radius) = (cfg.need(cfg.c, "c")?, cfg.need(cfg.radius, "radius")?);
    let reports = samples(cfg, &model)?
        .iter()
        .map(|f| check_growth_inequalities(&model, f, c, radius, norm_opts(cfg)))
        .collect::<Result<Vec<_>>>()?;
    let min_margin = reports.iter().map(|r| r.min_margin).fold(f64::INFINITY, f64::min);
    let violated = reports.iter().any(|r| r.violated);
    let mut rows = vec![];
    for (i, r) in reports.iter().enumerate() {
        for ch in &r.checks {
            let name = serde_json::to_value(ch.inequality)?.as_str().unwrap_or_default().to_string();
            rows.push(vec![s(i), name, opt(ch.k), opt(ch.m), opt(ch.n), s(ch.lhs), s(ch.rhs), s(ch.margin), s(ch.violated)]);
        }
    }
    Ok(Outcome {
        summary: format!("{}: {} samples, min margin {min_margin:.6e}", model.kind(), reports.len()),
        falsified: violated,
        result: json!({ "model": model.kind().to_string(), "reports": reports, "min_margin": min_margin, "violated": violated }),
        rows: Some(rows),
    })
}

fn smoothing_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let model = model_of(cfg)?;
    let (n_cut, radius) = (cfg.need(cfg.n_cut, "n_cut")?, cfg.need(cfg.radius, "radius")?);
    let reports = samples(cfg, &model)?
        .iter()
        .map(|f| smoothing(&model, f, n_cut, radius, cfg.c, norm_opts(cfg)).map(|s| s.report))
        .collect::<Result<Vec<_>>>()?;
    let all_hold = reports.iter().all(|r| r.holds_truncated && r.holds_upper && r.split_exact);
    let rows = reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                s(i),
                s(r.n_cut),
                s(r.radius),
                s(r.tail_norm),
                s(r.commutator_lower),
                s(r.commutator_upper),
                s(r.bound_truncated),
                s(r.bound_upper),
                s(r.holds_truncated),
                s(r.holds_upper),
                s(r.split_exact),
            ]
        })
        .collect();
    Ok(Outcome {
        summary: format!("{}: {} samples, all hold: {all_hold}", model.kind(), reports.len()),
        falsified: !all_hold,
        result: json!({ "model": model.kind().to_string(), "reports": reports, "all_hold": all_hold }),
        rows: Some(rows),
    })
}

fn budget(cfg: &RunConfig) -> Result<Outcome> {
    let b = truncation_budget(cfg.need(cfg.eps, "eps")?, cfg.need(cfg.c, "c")?)?;
    Ok(Outcome {
        summary: format!("N = {}, K = {}", b.n, b.k),
        result: json!({ "budget": b }),
        rows: None,
        falsified: false,
    })
}

fn freeprod(cfg: &RunConfig) -> Result<Outcome> {
    let specs = cfg
        .components
        .clone()
        .ok_or_else(|| Error::InvalidParameter("freeprod-check needs --a and --b".into()))?;
    let fp = FreeProduct::new(parse_component(&specs[0])?, parse_component(&specs[1])?);
    let max = cfg.need(cfg.max, "max")?;
    let strategy = strategy(cfg)?;
    let constants = component_bounds(&fp, strategy, norm_opts(cfg))?;
    let mut checks = vec![];
    for k in 0..=max {
        for m in 0..=max {
            for n in 0..=max {
                if m.abs_diff(n) <= k && k <= m + n {
                    checks.push(free_product_check(&fp, k, m, n, &constants, strategy, norm_opts(cfg))?);
                }
            }
        }
    }
    let all_hold = checks.iter().all(|c| c.holds && c.cells.as_ref().is_none_or(|s| s.cell_forms_hold));
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                s(c.k),
                s(c.m),
                s(c.n),
                s(c.ratio),
                s(c.bound),
                s(c.holds),
                opt(c.cells.as_ref().map(|s| s.cells.len())),
                opt(c.cells.as_ref().map(|s| s.cell_forms_hold)),
            ]
        })
        .collect();
    let max_ratio = checks.iter().map(|c| c.ratio).fold(0.0, f64::max);
    Ok(Outcome {
        summary: format!("{} * {}: {} triples, max ratio {max_ratio:.9}, all hold: {all_hold}", specs[0], specs[1], checks.len()),
        falsified: !all_hold,
        result: json!({ "components": specs, "constants": constants, "checks": checks, "all_hold": all_hold }),
        rows: Some(rows),
    })
}

fn cross(cfg: &RunConfig) -> Result<Outcome> {
    let max = cfg.need(cfg.max, "max")?;
    let mut checks = vec![];
    for k in 0..=max {
        for m in 0..=max {
            for n in 0..=max {
                checks.push(cross_validate_group(k, m, n, cfg.seed, norm_opts(cfg))?);
            }
        }
    }
    let all_agree = checks.iter().all(|c| c.agree);
    let rows = checks
        .iter()
        .map(|c| {
            vec![s(c.k), s(c.m), s(c.n), s(c.entries), s(c.max_entry_diff), s(c.norm_free), s(c.norm_group), s(c.agree)]
        })
        .collect();
    Ok(Outcome {
        summary: format!("{} blocks, all agree: {all_agree}", checks.len()),
        falsified: !all_agree,
        result: json!({ "checks": checks, "all_agree": all_agree }),
        rows: Some(rows),
    })
}

fn metric(cfg: &RunConfig) -> Result<Outcome> {
    let model = model_of(cfg)?;
    let states = cfg
        .states
        .clone()
        .ok_or_else(|| Error::InvalidParameter("metric needs --state or --states".into()))?;
    let opts = MetricOptions {
        tol: cfg.need(cfg.tol, "tol")?,
        starts: cfg.need(cfg.starts, "starts")?,
        iters: cfg.need(cfg.iters, "iters")?,
        seed: cfg.seed,
        c: cfg.c,
    };
    let (k, r) = (cfg.need(cfg.big_k, "big_k")?, cfg.need(cfg.big_r, "big_r")?);
    let table = metric_table(&model, &states, k, r, opts)?;
    let mut estimates = vec![];
    let mut rows = vec![];
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let e = crate::qmetric::metric_estimate(&model, &states[i], &states[j], k, r, opts)?;
            rows.push(vec![s(i), s(j), s(e.upper_estimate), s(e.certified_lower), s(e.converged)]);
            estimates.push(json!({
                "i": i,
                "j": j,
                "estimate": e,
                "witness": e.witness.to_text(&model)?,
            }));
        }
    }
    let ok = table.diagonal_ok && table.symmetric_ok && table.triangle_ok;
    Ok(Outcome {
        summary: format!("{}: {} states, metric checks pass: {ok}", model.kind(), states.len()),
        falsified: !ok,
        result: json!({ "model": model.kind().to_string(), "table": table, "estimates": estimates }),
        rows: Some(rows),
    })
}
