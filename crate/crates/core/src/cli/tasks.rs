use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::{verify, Prepared, Task};
use crate::ccdiag::{existence_predictor, mass_ratio, trichotomy_classify, SequenceSnapshot};
use crate::eigen::{exhaustion_ground_states, lambda_constant, lambda_infinity_const, lambda_infinity_exterior, SpectralTrace, TracePoint};
use crate::entropy::{d_constant, d_infinity, mu_constant, mu_infinity, proposition6_report, EntropyResult};
use crate::error::{Error, Result};
use crate::forms::OperatorPair;
use crate::geometry::{fit_growth_exponent_with, DiscreteManifold, NodeField, Region};

pub struct TaskOutput {
    pub results: Value,
    pub traces: Vec<String>,
    pub all_passed: bool,
}

fn to_value(x: impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn default_radii(m: &DiscreteManifold, fractions: &[f64]) -> Vec<f64> {
    let t = m.truncation_radius();
    fractions.iter().map(|f| f * t).collect()
}

fn exhaustion_radii(p: &Prepared) -> Vec<f64> {
    p.scenario.params.radii.clone().unwrap_or_else(|| default_radii(&p.manifold, &[0.125, 0.25, 0.5, 0.75]))
}

fn exterior_radii(p: &Prepared) -> Vec<f64> {
    p.scenario.params.exterior_radii.clone().unwrap_or_else(|| default_radii(&p.manifold, &[0.25, 0.5, 0.75]))
}

fn write_field(path: &Path, m: &DiscreteManifold, u: &NodeField) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["node", "r_or_id", "u"])?;
    for i in 0..m.node_count() {
        w.write_record(&[i.to_string(), m.labels()[i].to_string(), u[i].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

struct Traces<'a> {
    dir: &'a Path,
    names: Vec<String>,
}

impl<'a> Traces<'a> {
    fn path(&mut self, name: &str) -> std::path::PathBuf {
        let file = format!("trace_{name}.csv");
        self.names.push(file.clone());
        self.dir.join(file)
    }
}

/// `V∞` from the scenario, else the family's own limit.
fn v_infinity(p: &Prepared) -> Option<f64> {
    p.scenario.params.v_infinity.or_else(|| p.scenario.potential.limit())
}

fn entropy_value(res: &EntropyResult, trace_name: &str, traces: &mut Traces) -> Result<Value> {
    res.write_trace_csv(traces.path(trace_name))?;
    to_value(res)
}

pub fn run_task(p: &Prepared, dir: &Path) -> Result<TaskOutput> {
    let s = &p.scenario;
    let m = &p.manifold;
    let ops = OperatorPair::new(m, p.potential.field.clone())?;
    let cfg = &s.solver;
    let mut traces = Traces { dir, names: Vec::new() };
    let mut all_passed = true;
    let inf_v = ops.potential().iter().cloned().fold(f64::INFINITY, f64::min);
    let results = match s.task {
        Task::Lambda | Task::Groundstate => {
            let region = s.params.region.build(m)?;
            let res = lambda_constant(&ops, &region, &cfg.eigen)?;
            if s.task == Task::Groundstate {
                write_field(&traces.path("groundstate"), m, &res.eigenfunction)?;
            }
            let mut v = to_value(&res)?;
            v["inf_v"] = json!(inf_v);
            v["lower_bound_holds"] = json!(res.lambda >= inf_v - 1e-8);
            v
        }
        Task::Exhaustion => {
            let states = exhaustion_ground_states(&ops, &exhaustion_radii(p), &cfg.eigen)?;
            let trace = SpectralTrace { points: states.iter().map(|(r, s)| TracePoint::from_result(*r, s)).collect() };
            trace.write_csv(traces.path("exhaustion"))?;
            json!({
                "points": trace.points,
                "final_lambda": trace.last(),
                "nonincreasing": trace.is_nonincreasing(0.0),
                "gradient_sup": p.potential.gradient_sup,
                "inf_v": inf_v,
            })
        }
        Task::LambdaInf => {
            let whole = lambda_constant(&ops, &Region::whole(m), &cfg.eigen)?;
            let exterior = lambda_infinity_exterior(&ops, &exterior_radii(p), &cfg.eigen)?;
            exterior.write_csv(traces.path("lambda_inf"))?;
            let constant = v_infinity(p).map(|v| lambda_infinity_const(&ops, v, &cfg.eigen)).transpose()?;
            let reference = constant.as_ref().map_or(exterior.last(), |c| c.lambda);
            json!({
                "lambda": whole.lambda,
                "residual": whole.residual,
                "exterior": exterior.points,
                "lambda_inf_exterior": exterior.last(),
                "lambda_inf_constant": constant.as_ref().map(|c| c.lambda),
                "v_infinity": v_infinity(p),
                "definitions_gap": constant.as_ref().map(|c| (c.lambda - exterior.last()).abs()),
                "prediction": existence_predictor(whole.lambda, reference, cfg.eigen.margin)?,
            })
        }
        Task::Mu | Task::D => {
            let region = s.params.region.build(m)?;
            let (res, name) = if s.task == Task::Mu {
                (mu_constant(&ops, &region, &cfg.entropy)?, "descent_mu")
            } else {
                (d_constant(&ops, &region, &cfg.entropy)?, "descent_d")
            };
            let mut v = entropy_value(&res, name, &mut traces)?;
            if let Some(radii) = &s.params.exterior_radii {
                let at_inf = if s.task == Task::Mu { mu_infinity(&ops, radii, &cfg.entropy)? } else { d_infinity(&ops, radii, &cfg.entropy)? };
                at_inf.write_csv(traces.path(if s.task == Task::Mu { "mu_inf" } else { "d_inf" }))?;
                v["at_infinity"] = to_value(&at_inf)?;
            }
            v
        }
        Task::Prop6 => {
            let region = s.params.region.build(m)?;
            to_value(proposition6_report(&ops, &region, &cfg.entropy)?)?
        }
        Task::Growth => {
            let [lo, hi] = s.params.growth_range.unwrap_or_else(|| {
                let t = m.truncation_radius();
                [0.1 * t, t]
            });
            let fit = fit_growth_exponent_with(m, lo, hi, s.params.growth_samples)?;
            let path = traces.path("growth");
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(["R", "volume"])?;
            for (r, v) in fit.radii.iter().zip(&fit.volumes) {
                w.write_record(&[r.to_string(), v.to_string()])?;
            }
            w.flush()?;
            to_value(&fit)?
        }
        Task::Trichotomy => {
            let states = exhaustion_ground_states(&ops, &exhaustion_radii(p), &cfg.eigen)?;
            let (fields, objectives): (Vec<NodeField>, Vec<f64>) = states.iter().map(|(_, s)| (s.eigenfunction.clone(), s.lambda)).unzip();
            let snapshot = SequenceSnapshot::new(m, fields, objectives)?;
            let probe = s.params.probe_radius.unwrap_or(0.125 * m.truncation_radius());
            let mut verdict = trichotomy_classify(m, &snapshot, probe, &cfg.thresholds)?;
            verdict.attach_energy_density(&ops, &snapshot);
            let mass_radius = s.params.mass_radius.unwrap_or(probe);
            let ball = Region::ball(m, m.base_point(), mass_radius)?;
            let ratios = mass_ratio(m, &snapshot.fields, &ball)?;
            let lambda = states.last().map(|(_, s)| s.lambda).unwrap_or(f64::NAN);
            let lambda_inf = match v_infinity(p) {
                Some(v) => lambda_infinity_const(&ops, v, &cfg.eigen)?.lambda,
                None => lambda_infinity_exterior(&ops, &exterior_radii(p), &cfg.eigen)?.last(),
            };
            let path = traces.path("concentration");
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(["index", "R", "lambda", "q", "split_first", "split_second", "separation", "mass_ratio"])?;
            for (k, ((r, st), ev)) in states.iter().zip(&verdict.evidence.fields).enumerate() {
                w.write_record(&[
                    k.to_string(),
                    r.to_string(),
                    st.lambda.to_string(),
                    ev.q.to_string(),
                    ev.split.0.to_string(),
                    ev.split.1.to_string(),
                    ev.separation.to_string(),
                    ratios[k].to_string(),
                ])?;
            }
            w.flush()?;
            json!({
                "verdict": verdict.verdict,
                "evidence": verdict.evidence,
                "mass_radius": mass_radius,
                "mass_ratio": ratios,
                "lambda": lambda,
                "lambda_inf": lambda_inf,
                "prediction": existence_predictor(lambda, lambda_inf, cfg.eigen.margin)?,
            })
        }
        Task::Verify => {
            let props = verify::run_suite(p)?;
            all_passed = props.iter().all(|p| p.passed != Some(false));
            json!({ "properties": props, "all_passed": all_passed })
        }
    };
    if results.is_null() {
        return Err(Error::Scenario("task produced no results".into()));
    }
    Ok(TaskOutput { results, traces: traces.names, all_passed })
}
