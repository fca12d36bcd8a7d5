use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use superrep_core::cloners::{
    fidelity_det_equatorial, fidelity_prob_equatorial, repeated_attempt_curve, ReplicationReport, RetryPolicy,
};
use superrep_core::estimation::{gate_estimation_pipeline_bound, EstimationReport};
use superrep_core::gatesim::{mc_gate_fidelity, projected_probe, worst_case_probe, DenseState, McConfig};
use superrep_core::schur::{gate_fidelity_bound, qubit_sectors};
use superrep_core::sequential::{plan_interaction_size, sequential_fidelity};

use crate::config::{CommandKind, Params};
use crate::error::CliError;
use crate::output::{format_number, to_json, Artifact, Cell, Table};

pub fn dispatch(kind: CommandKind, params: &mut Params, seed: u64, workers: usize) -> Result<Artifact, CliError> {
    match kind {
        CommandKind::Fidelity => fidelity(params),
        CommandKind::Figure => figure(params),
        CommandKind::Table => table(params),
        CommandKind::GateSim => gate_sim(params, seed, workers),
        CommandKind::Schur => schur(params),
        CommandKind::Estimate => estimate(params),
        CommandKind::Plan => plan(params),
    }
}

const KINDS: &[&str] = &["prob", "det"];

fn report(kind: &str, n: u64, m: u64) -> Result<ReplicationReport, CliError> {
    Ok(match kind {
        "prob" => ReplicationReport::probabilistic(n, m)?,
        _ => ReplicationReport::deterministic(n, m)?,
    })
}

fn report_header() -> Table {
    Table::new(vec!["N", "M", "fidelity", "success_probability", "lower_bound", "lower_bound_clamped"])
}

fn report_row(r: &ReplicationReport) -> Vec<Cell> {
    vec![
        Cell::Int(r.n as u128),
        Cell::Int(r.m as u128),
        Cell::Num(r.fidelity),
        Cell::Num(r.success_probability),
        Cell::Num(r.lower_bound),
        Cell::Flag(r.lower_bound_clamped),
    ]
}

fn fidelity(params: &mut Params) -> Result<Artifact, CliError> {
    let kind = params.string("kind", Some("prob"), KINDS)?;
    let n = params.u64("n", None)?;
    let m = params.u64("m", None)?;
    let r = report(&kind, n, m)?;
    let mut table = report_header();
    table.push(report_row(&r));
    Ok(Artifact { summary: format_number(r.fidelity), table, json: to_json(&r) })
}

fn figure(params: &mut Params) -> Result<Artifact, CliError> {
    match params.string("name", None, &["sequential", "qubit-recycle"])?.as_str() {
        "sequential" => figure_sequential(params),
        _ => figure_recycle(params),
    }
}

/// Sequential network against the one-shot cloners at `M = K N`.
fn figure_sequential(params: &mut Params) -> Result<Artifact, CliError> {
    let n = params.u64("n", Some(8))?;
    let k_max = params.u64("k_max", Some(8))?;
    if k_max < 2 {
        return Err(CliError::config("k_max", "the network needs at least two blocks"));
    }
    let mut table = Table::new(vec!["M", "F_seq", "F_prob", "F_det"]);
    let mut points = Vec::new();
    for k in 2..=k_max {
        let m = k * n;
        let (seq, prob, det) = (sequential_fidelity(n, k)?, fidelity_prob_equatorial(n, m)?, fidelity_det_equatorial(n, m)?);
        table.push(vec![Cell::Int(m as u128), Cell::Num(seq), Cell::Num(prob), Cell::Num(det)]);
        points.push(json!({"M": m, "F_seq": seq, "F_prob": prob, "F_det": det}));
    }
    Ok(Artifact {
        summary: format!("sequential network N={n}: {} points, M = {}..{}", points.len(), 2 * n, k_max * n),
        table,
        json: json!(points),
    })
}

/// Fidelity against cumulative success probability over repeated attempts,
/// with the deterministic fidelity as a constant reference column.
fn figure_recycle(params: &mut Params) -> Result<Artifact, CliError> {
    let n = params.u64("n", Some(50))?;
    let m = params.u64("m", Some(1000))?;
    let attempts = params.u64("attempts", Some(40))?;
    let attempts = u32::try_from(attempts).map_err(|_| CliError::config("attempts", "too many attempts"))?;
    let policy = match params.string("policy", Some("narrowing-window"), &["narrowing-window", "same-filter"])?.as_str()
    {
        "same-filter" => RetryPolicy::SameFilter,
        _ => RetryPolicy::NarrowingWindow,
    };
    let det = fidelity_det_equatorial(n, m)?;
    let curve = repeated_attempt_curve(n, m, attempts, policy)?;
    let mut table =
        Table::new(vec!["attempt", "window_half_width", "cumulative_probability", "fidelity", "F_det"]);
    for p in &curve {
        table.push(vec![
            Cell::Int(p.attempt as u128),
            Cell::Int(p.window_half_width as u128),
            Cell::Num(p.cumulative_success_probability),
            Cell::Num(p.conditional_fidelity),
            Cell::Num(det),
        ]);
    }
    let last = curve.last().expect("at least one attempt");
    Ok(Artifact {
        summary: format!(
            "{} attempts: cumulative probability {}, fidelity {} (deterministic {})",
            curve.len(),
            format_number(last.cumulative_success_probability),
            format_number(last.conditional_fidelity),
            format_number(det)
        ),
        table,
        json: json!({"F_det": det, "attempts": to_json(&curve)}),
    })
}

fn table(params: &mut Params) -> Result<Artifact, CliError> {
    let kind = params.string("kind", Some("prob"), KINDS)?;
    let ns = params.u64_list("n", Some(&[10, 20, 50, 100, 200]))?;
    let ratios = params.u64_list("ratio", Some(&[2, 6, 10]))?;
    let mut table = report_header();
    let mut reports = Vec::new();
    for &n in &ns {
        for &ratio in &ratios {
            let r = report(&kind, n, ratio * n)?;
            table.push(report_row(&r));
            reports.push(r);
        }
    }
    let clamped = reports.iter().filter(|r| r.lower_bound_clamped).count();
    Ok(Artifact {
        summary: format!("{} rows ({clamped} with clamped bounds)", reports.len()),
        table,
        json: to_json(&reports),
    })
}

fn gate_sim(params: &mut Params, seed: u64, workers: usize) -> Result<Artifact, CliError> {
    let n = params.u64("n", Some(2))?;
    let m = params.u64("m", Some(4))?;
    let samples = params.u64("samples", Some(10_000))?;
    let probe = params.string("probe", Some("haar"), &["haar", "dicke", "projected"])?;
    let config = McConfig::new(samples, seed).with_workers(workers);
    let estimate = match probe.as_str() {
        "haar" => mc_gate_fidelity(n, m, &config)?,
        "dicke" => worst_case_probe(n, m, &[DenseState::dicke(m, m / 2)?], &config)?.per_probe[0],
        _ => {
            // The probe state draws from a stream separate from the unitaries.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            let state = projected_probe(n, m, &mut rng)?;
            worst_case_probe(n, m, &[state], &config)?.per_probe[0]
        }
    };
    let mut table = Table::new(vec!["mean", "std_error", "samples", "seed"]);
    table.push(vec![
        Cell::Num(estimate.mean),
        Cell::Num(estimate.std_error),
        Cell::Int(estimate.samples as u128),
        Cell::Int(estimate.seed as u128),
    ]);
    Ok(Artifact {
        summary: format!(
            "{probe} probe N={n} M={m}: fidelity {} ± {}",
            format_number(estimate.mean),
            format_number(estimate.std_error)
        ),
        table,
        json: to_json(&estimate),
    })
}

fn spin_label(two_j: u64) -> String {
    if two_j % 2 == 0 {
        (two_j / 2).to_string()
    } else {
        format!("{}.5", two_j / 2)
    }
}

fn schur(params: &mut Params) -> Result<Artifact, CliError> {
    let k = params.u64("k", None)?;
    let sectors = qubit_sectors(k)?;
    let mut table = Table::new(vec!["j", "d_j", "m_jK"]);
    for s in &sectors {
        table.push(vec![Cell::Text(spin_label(s.two_j)), Cell::Int(s.rep_dim as u128), Cell::Int(s.multiplicity)]);
    }
    // u128 multiplicities exceed what JSON readers hold exactly; they go out as strings.
    let json = json!(sectors
        .iter()
        .map(|s| json!({"j": s.j(), "d_j": s.rep_dim, "m_jK": s.multiplicity.to_string()}))
        .collect::<Vec<_>>());
    Ok(Artifact { summary: format!("{k} qubits: {} sectors", sectors.len()), table, json })
}

fn estimate(params: &mut Params) -> Result<Artifact, CliError> {
    let d = params.u64("d", Some(2))?;
    let ns = params.u64_list("n", None)?;
    let c_est = params.f64("c_est", Some(1.0))?;
    let outputs = params.optional_u64("outputs")?;
    let mut table = Table::new(vec!["N", "M", "est_fidelity", "est_clamped", "bound", "bound_clamped"]);
    let mut reports = Vec::new();
    for &n in &ns {
        let r = EstimationReport::new(d, n, c_est, outputs)?;
        let (_, est) = gate_estimation_pipeline_bound(d, n, c_est)?;
        let bound = gate_fidelity_bound(d, n, r.derived_m)?;
        table.push(vec![
            Cell::Int(n as u128),
            Cell::Int(r.derived_m as u128),
            Cell::Num(r.est_fidelity),
            Cell::Flag(est.clamped),
            Cell::Num(bound.value),
            Cell::Flag(bound.clamped),
        ]);
        reports.push(r);
    }
    let last = reports.last().expect("non-empty list");
    let json = if reports.len() == 1 { to_json(last) } else { to_json(&reports) };
    Ok(Artifact {
        summary: format!("N={}: estimation fidelity >= {} with M={}", last.n, format_number(last.est_fidelity), last.derived_m),
        table,
        json,
    })
}

fn plan(params: &mut Params) -> Result<Artifact, CliError> {
    let n = params.u64("n", None)?;
    let m = params.u64("m", None)?;
    let target = params.f64("target", Some(0.01))?;
    let plan = plan_interaction_size(n, m, target).map_err(|e| match e {
        superrep_core::Error::InvalidParameter { name: "target_infidelity", reason } => CliError::config("target", reason),
        other => other.into(),
    })?;
    let mut table = Table::new(vec!["group_size", "outputs_per_group", "group_count", "predicted_fidelity"]);
    table.push(vec![
        Cell::Int(plan.group_size as u128),
        Cell::Int(plan.outputs_per_group as u128),
        Cell::Int(plan.group_count as u128),
        Cell::Num(plan.predicted_fidelity),
    ]);
    Ok(Artifact {
        summary: format!(
            "{} groups of {} -> {} each, predicted fidelity {}",
            plan.group_count,
            plan.group_size,
            plan.outputs_per_group,
            format_number(plan.predicted_fidelity)
        ),
        table,
        json: to_json(&plan),
    })
}
