use std::fs;
use std::path::Path;

use ramify_core::decomposition::{good_decomposition, remove_cycles};
use ramify_core::metrics::{flat_distance_1, flat_norm_0, GridComplex};
use ramify_core::optimizer::{brute_force_optimal, local_search};
use ramify_core::stability::{competitor_for_instance, run_stability_trial, synthetic_suboptimal, TrialReport};
use ramify_core::{AtomicMeasure, CompetitorConfig, ExperimentConfig, TrafficPath};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::format::{canonical_json, fmt_g};
use crate::schema::{from_measure, from_path, parse_json, InstanceFile};
use crate::svg;

/// Output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Svg,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Svg => "svg",
            Format::Csv => "csv",
        }
    }
}

/// Flags shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct Globals {
    pub alpha: Option<f64>,
    pub dim: Option<usize>,
    pub tol: f64,
    pub seed: Option<u64>,
    pub out: Format,
}

impl Globals {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn only(&self, allowed: &[Format], command: &str) -> Result<()> {
        if allowed.contains(&self.out) {
            Ok(())
        } else {
            Err(CliError::Schema(format!("out: {command} cannot write {}", self.out.name())))
        }
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_instance(path: &Path, g: &Globals) -> Result<InstanceFile> {
    let f: InstanceFile = parse_json(&read(path)?)?;
    let f = f.with_overrides(g.alpha, g.dim)?;
    f.check_path_boundary()?;
    Ok(f)
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Numeric(format!("{what} is {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Oracle,
    Local,
}

#[derive(Serialize)]
struct Solution<'a> {
    #[serde(flatten)]
    instance: &'a InstanceFile,
    cost: f64,
    method: &'static str,
    metadata: serde_json::Value,
}

pub fn solve(instance: &Path, method: Method, budget: usize, g: &Globals) -> Result<String> {
    g.only(&[Format::Json, Format::Svg], "solve")?;
    let inst = load_instance(instance, g)?;
    let (m, p) = inst.measures();
    let alpha = inst.alpha;
    let (path, cost, name, metadata) = match method {
        Method::Oracle => {
            let sol = brute_force_optimal(&m, &p, alpha, g.tol)?;
            let meta = json!({
                "label": sol.label,
                "topologies_evaluated": sol.topologies_evaluated,
                "safeguard_improved": sol.safeguard_improved,
                "tol": g.tol,
            });
            (sol.path, sol.cost, "oracle", meta)
        }
        Method::Local => {
            let init = inst.traffic_path();
            let rep = local_search(&m, &p, alpha, init.as_ref(), budget, g.seed())?;
            let meta = json!({
                "accepted_moves": rep.accepted_moves,
                "budget": budget,
                "seed": g.seed(),
                "history": rep.history,
            });
            (rep.path, rep.cost, "local", meta)
        }
    };
    let cost = finite(cost, "cost")?;
    match g.out {
        Format::Svg => Ok(svg::render(&m, &p, &path, alpha)),
        _ => {
            let mut out = inst.clone();
            out.path = Some(from_path(&path, inst.dimension));
            canonical_json(&Solution { instance: &out, cost, method: name, metadata })
        }
    }
}

#[derive(Serialize)]
struct CurveOut {
    waypoints: Vec<Vec<f64>>,
    weight: f64,
    length: f64,
}

pub fn decompose(instance: &Path, g: &Globals) -> Result<String> {
    g.only(&[Format::Json], "decompose")?;
    let inst = load_instance(instance, g)?;
    let Some(t) = inst.traffic_path() else {
        return Err(CliError::Schema("path: required by decompose".into()));
    };
    let acyclic = remove_cycles(&t);
    let pi = good_decomposition(&acyclic)?;
    let d = inst.dimension;
    let curves: Vec<CurveOut> = pi
        .entries
        .iter()
        .map(|(c, w)| CurveOut {
            waypoints: c.waypoints.iter().map(|p| p.coords[..d].to_vec()).collect(),
            weight: *w,
            length: c.length(),
        })
        .collect();
    canonical_json(&json!({
        "curves": curves,
        "total_weight": pi.total_weight(),
        "mass": acyclic.mass(),
        "mass_before_cycle_removal": t.mass(),
        "boundary_mass": acyclic.boundary().total_variation(),
        "alpha_mass": acyclic.alpha_mass(inst.alpha),
    }))
}

fn net(inst: &InstanceFile) -> AtomicMeasure {
    let (m, p) = inst.measures();
    p.sub(&m)
}

/// Flat distance between the paths of two instances, or between their
/// boundaries when a path is missing.
pub fn flatnorm(a: &Path, b: &Path, h: Option<f64>, g: &Globals) -> Result<String> {
    g.only(&[Format::Json], "flatnorm")?;
    let (ia, ib) = (load_instance(a, g)?, load_instance(b, g)?);
    if ia.dimension != ib.dimension {
        return Err(CliError::Schema(format!("dimension: {} vs {}", ia.dimension, ib.dimension)));
    }
    let boundary_gap = flat_norm_0(&net(&ia).sub(&net(&ib)));
    let out = match (ia.traffic_path(), ib.traffic_path()) {
        (Some(ta), Some(tb)) if ia.dimension == 2 => {
            let h = match h {
                Some(h) if h > 0.0 => h,
                Some(h) => return Err(CliError::Schema(format!("h: must be positive, got {h}"))),
                None => default_spacing(&ta, &tb),
            };
            let grid = GridComplex::covering(&[&ta, &tb], h, 2)?;
            let est = flat_distance_1(&ta, &tb, &grid)?;
            json!({"method": "grid", "value": finite(est.value, "flat distance")?, "error_bound": est.error_bound, "h": h, "boundary_gap": boundary_gap})
        }
        (Some(ta), Some(tb)) => {
            let v = ta.sub(&tb).mass();
            json!({"method": "mass_of_difference", "value": v, "error_bound": 0.0, "boundary_gap": boundary_gap})
        }
        _ => json!({"method": "boundary", "value": boundary_gap, "error_bound": 0.0, "boundary_gap": boundary_gap}),
    };
    canonical_json(&out)
}

fn default_spacing(a: &TrafficPath, b: &TrafficPath) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in a.vertices.iter().chain(b.vertices.iter()) {
        for k in 0..2 {
            lo[k] = lo[k].min(p.coords[k]);
            hi[k] = hi[k].max(p.coords[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if span.is_finite() && span > 0.0 {
        span / 64.0
    } else {
        1.0 / 64.0
    }
}

pub fn load_experiment(path: &Path, g: &Globals) -> Result<ExperimentConfig> {
    let mut cfg: ExperimentConfig = parse_json(&read(path)?)?;
    if let Some(a) = g.alpha {
        cfg.config.alpha = a;
    }
    if let Some(d) = g.dim {
        cfg.config.dimension = d;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub const CSV_COLUMNS: [&str; 8] =
    ["n", "cost_n", "boundary_gap_minus", "boundary_gap_plus", "flat_gap_T", "mass_bounded", "gaps_monotone", "verdict"];

pub fn trial_csv(rep: &TrialReport<f64>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Numeric(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(err)?;
    for r in &rep.rows {
        w.write_record([
            r.n.to_string(),
            fmt_g(r.cost_n),
            fmt_g(r.boundary_gap_minus),
            fmt_g(r.boundary_gap_plus),
            fmt_g(r.flat_gap_t),
            r.mass_bounded.to_string(),
            r.gaps_monotone.to_string(),
            r.verdict.clone(),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Numeric(e.to_string()))
}

pub fn stability(config: &Path, g: &Globals) -> Result<String> {
    g.only(&[Format::Json, Format::Csv], "stability")?;
    let cfg = load_experiment(config, g)?;
    let rep = run_stability_trial(&cfg)?;
    match g.out {
        Format::Csv => trial_csv(&rep),
        _ => canonical_json(&json!({"config": cfg, "report": rep})),
    }
}

/// Settings of the synthetic competitor experiment.
#[derive(Debug, Clone, Copy)]
pub struct CompetitorArgs {
    pub energy_gap: f64,
    pub shift: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub delta: f64,
    pub sphere_constant: f64,
    /// Defaults to twice the alpha-mass of the perturbed member.
    pub mass_bound: Option<f64>,
}

impl Default for CompetitorArgs {
    fn default() -> Self {
        CompetitorArgs {
            energy_gap: 1.0,
            shift: 1e-8,
            eps1: 1e-24,
            eps2: 1e-7,
            delta: 1e-2,
            sphere_constant: 2.0 * std::f64::consts::PI,
            mass_bound: None,
        }
    }
}

pub fn competitor(instance: &Path, args: &CompetitorArgs, g: &Globals) -> Result<String> {
    g.only(&[Format::Json, Format::Svg], "competitor")?;
    let inst = load_instance(instance, g)?;
    let (m, p) = inst.measures();
    let alpha = inst.alpha;
    let syn = synthetic_suboptimal(&m, &p, alpha, args.energy_gap, args.shift, inst.dimension, g.seed())?;
    let cc = CompetitorConfig {
        alpha,
        dimension: inst.dimension,
        ambient_radius: inst.ambient_radius,
        energy_gap: args.energy_gap,
        eps1: args.eps1,
        eps2: args.eps2,
        delta: args.delta,
        mass_bound: args.mass_bound.unwrap_or(2.0 * syn.t_n.alpha_mass(alpha)),
        sphere_constant: args.sphere_constant,
        n_minus: None,
        n_plus: None,
    };
    cc.validate()?;
    let rep = competitor_for_instance(&syn, &cc)?;
    if g.out == Format::Svg {
        let bd = syn.t_n.boundary();
        return Ok(svg::render(&bd.negative_part(), &bd.positive_part(), &rep.competitor, alpha));
    }
    let d = inst.dimension;
    let bd = syn.t_n.boundary();
    canonical_json(&json!({
        "config": cc,
        "member": {
            "mu_minus": from_measure(&bd.negative_part(), d),
            "mu_plus": from_measure(&bd.positive_part(), d),
            "path": from_path(&syn.t_n, d),
            "cost": syn.t_n.alpha_mass(alpha),
        },
        "optimum_cost": syn.t_opt.alpha_mass(alpha),
        "competitor": {
            "path": from_path(&rep.competitor, d),
            "cost": rep.competitor.alpha_mass(alpha),
        },
        "boundary_error": rep.boundary_error,
        "boundary_error_selected": rep.boundary_error_selected,
        "alphas_minus": rep.alphas_minus,
        "alphas_plus": rep.alphas_plus,
        "checks": rep.checks,
        "ledger": rep.ledger,
    }))
}
